//! Ideal post-selection on `(N, 0)` photon counts.
//!
//! With detectors on both beamsplitter outputs (`b` counts `N`, `c` counts
//! zero) the free amplifier output `a` is left with at most `N` photons. With
//! detectors on `a` and `c` the beamsplitter output `b` is left with at
//! least `N` photons.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::devices::DeviceParams;
use crate::fock::{FockVector, Mode, MultimodeState};
use crate::special::LnFactorial;
use crate::{Error, Result};

/// Herald probabilities below this are treated as impossible events.
pub const MIN_HERALD_PROBABILITY: f64 = 1e-15;

/// Tolerance on the input normalization accepted by the closed forms.
pub const INPUT_NORM_TOL: f64 = 1e-9;

/// Which detector placement is used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Configuration {
    /// Detectors on `b` (N photons) and `c` (none); output in `a`.
    Max,
    /// Detectors on `a` (N photons) and `c` (none); output in `b`.
    Min,
}

impl Configuration {
    pub fn pattern(self, count: usize) -> HeraldPattern {
        match self {
            Configuration::Max => HeraldPattern::case_max(count),
            Configuration::Min => HeraldPattern::case_min(count),
        }
    }
}

/// Which modes register `N` and zero photons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeraldPattern {
    detect_n: Mode,
    detect_zero: Mode,
    count: usize,
}

impl HeraldPattern {
    pub fn new(detect_n: Mode, detect_zero: Mode, count: usize) -> Result<Self> {
        if detect_n == detect_zero {
            return Err(Error::InvalidPattern(format!(
                "both detectors placed on mode {detect_n}"
            )));
        }
        Ok(Self {
            detect_n,
            detect_zero,
            count,
        })
    }

    pub fn case_max(count: usize) -> Self {
        Self {
            detect_n: Mode::B,
            detect_zero: Mode::C,
            count,
        }
    }

    pub fn case_min(count: usize) -> Self {
        Self {
            detect_n: Mode::A,
            detect_zero: Mode::C,
            count,
        }
    }

    pub fn detect_n(&self) -> Mode {
        self.detect_n
    }

    pub fn detect_zero(&self) -> Mode {
        self.detect_zero
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// The mode left undetected.
    pub fn output_mode(&self) -> Mode {
        Mode::ALL
            .into_iter()
            .find(|m| *m != self.detect_n && *m != self.detect_zero)
            .expect("two distinct detected modes leave one free")
    }
}

/// Normalized conditional state of the undetected mode and its probability.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeraldedState {
    pub state: FockVector,
    pub probability: f64,
    /// Upper bound on probability left out by a finite input cutoff.
    pub tail_bound: f64,
}

fn check_input(input: &FockVector) -> Result<()> {
    let n2 = input.norm_sqr();
    if (n2 - 1.0).abs() > INPUT_NORM_TOL {
        return Err(Error::Unnormalized { norm_sqr: n2 });
    }
    Ok(())
}

fn finish(unnormalized: Vec<Complex64>, tail_bound: f64) -> Result<HeraldedState> {
    let probability: f64 = unnormalized.iter().map(|z| z.norm_sqr()).sum();
    if !(probability >= MIN_HERALD_PROBABILITY) {
        return Err(Error::ZeroProbabilityHerald { probability });
    }
    let scale = 1.0 / probability.sqrt();
    let state = FockVector::new(unnormalized.into_iter().map(|z| z * scale).collect())?;
    Ok(HeraldedState {
        state,
        probability: probability.min(1.0),
        tail_bound,
    })
}

/// `N` photons at `b`, none at `c`: the state left in `a` is
///
/// ```text
/// sech s Σ_{n≤N} √C(N,n) ψ_{N-n} (-e^{iφ} tanh s)^n T*^n (-R*)^{N-n} |n⟩
/// ```
///
/// returned normalized, with output dimension `N + 1`. The probability is
/// the squared norm of the unnormalized sum.
pub fn truncate_max(
    input: &FockVector,
    params: &DeviceParams,
    count: usize,
) -> Result<HeraldedState> {
    check_input(input)?;
    let lf = LnFactorial::new(count);
    let sech = 1.0 / params.s.cosh();
    let ratio = params.squeeze_ratio() * params.transmittance().conj();
    let minus_r_conj = -params.reflectance().conj();
    let amps = (0..=count)
        .map(|n| {
            let weight = (0.5 * lf.ln_binomial(count, n)).exp();
            input.amplitude(count - n)
                * ratio.powu(n as u32)
                * minus_r_conj.powu((count - n) as u32)
                * (sech * weight)
        })
        .collect();
    finish(amps, 0.0)
}

/// `N` photons at `a`, none at `c`: the state left in `b` is
///
/// ```text
/// sech s (-e^{iφ} tanh s)^N T*^N Σ_i √((i+N)!/(i! N!)) ψ_i (-R*)^i |i+N⟩
/// ```
///
/// with `i` running over the input cutoff; output dimension is
/// `input.dim() + N`. `tail_bound` bounds the probability carried by the
/// input components beyond the cutoff.
pub fn truncate_min(
    input: &FockVector,
    params: &DeviceParams,
    count: usize,
) -> Result<HeraldedState> {
    check_input(input)?;
    let dim = input.dim();
    let lf = LnFactorial::new(dim + count);
    let prefactor =
        params.squeeze_coefficient(count) * params.transmittance().conj().powu(count as u32);
    let minus_r_conj = -params.reflectance().conj();

    let mut amps = vec![Complex64::new(0.0, 0.0); dim + count];
    let mut r_pow = Complex64::new(1.0, 0.0);
    for i in 0..dim {
        let weight = (0.5 * lf.ln_binomial(i + count, count)).exp();
        amps[i + count] = prefactor * input.amplitude(i) * r_pow * weight;
        r_pow *= minus_r_conj;
    }

    let tail_bound = min_config_tail_bound(input, params, count);
    finish(amps, tail_bound)
}

/// Bound on `Σ_{i≥D} C(i+N,N) |ψ_i|² |R|^{2i}` times the prefactor, using
/// the unplaced input mass `1 - ‖ψ‖²` and the largest weight past the cutoff
/// (the weight ratio `(i+1+N)/(i+1)·|R|²` decreases in `i`).
fn min_config_tail_bound(input: &FockVector, params: &DeviceParams, count: usize) -> f64 {
    let missing = (1.0 - input.norm_sqr()).max(0.0);
    if missing == 0.0 {
        return 0.0;
    }
    let r2 = params.reflectance().norm_sqr();
    let prefactor = params.squeeze_coefficient(count).norm_sqr()
        * params.transmittance().norm_sqr().powi(count as i32);
    if r2 >= 1.0 {
        return prefactor * missing;
    }
    let lf = LnFactorial::new(input.dim() + count);
    let mut i = input.dim();
    let mut ln_w = lf.ln_binomial(i + count, count) + i as f64 * r2.ln();
    loop {
        let ratio = (i + 1 + count) as f64 / (i + 1) as f64 * r2;
        if ratio <= 1.0 {
            break;
        }
        ln_w += ratio.ln();
        i += 1;
    }
    prefactor * missing * ln_w.exp()
}

/// Projects a three-mode state onto `N` photons at one detector and zero at
/// the other; the result is renormalized and the probability is the
/// collected mass divided by the full state's squared norm.
pub fn project_herald(full: &MultimodeState, pattern: &HeraldPattern) -> Result<HeraldedState> {
    let out_mode = pattern.output_mode();
    let dim = full.cutoffs().get(out_mode);
    let (n_idx, z_idx, o_idx) = (
        pattern.detect_n.index(),
        pattern.detect_zero.index(),
        out_mode.index(),
    );
    if pattern.count >= full.cutoffs().get(pattern.detect_n) {
        return Err(Error::DimensionMismatch {
            expected: pattern.count + 1,
            found: full.cutoffs().get(pattern.detect_n),
        });
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    for (t, &z) in full.iter() {
        if t[n_idx] == pattern.count && t[z_idx] == 0 {
            amps[t[o_idx]] += z;
        }
    }
    let total = full.norm_sqr();
    if !(total > 0.0) {
        return Err(Error::ZeroProbabilityHerald { probability: 0.0 });
    }
    let collected: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
    let probability = collected / total;
    if !(probability >= MIN_HERALD_PROBABILITY) {
        return Err(Error::ZeroProbabilityHerald { probability });
    }
    let scale = 1.0 / collected.sqrt();
    Ok(HeraldedState {
        state: FockVector::new(amps.into_iter().map(|z| z * scale).collect())?,
        probability,
        tail_bound: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{coherent_coefficients, Cutoffs};
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    fn coherent(alpha: f64) -> FockVector {
        coherent_coefficients(Complex64::new(alpha, 0.0), 30)
            .unwrap()
            .state
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn full_transmission_gives_one_photon() {
        let p = DeviceParams::new(0.5, FRAC_PI_2, 0.0).unwrap();
        let h = truncate_max(&coherent(1.0), &p, 1).unwrap();
        let one = FockVector::basis(1, 2).unwrap();
        assert!((h.state.overlap_sqr(&one) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn full_reflection_gives_vacuum() {
        let p = DeviceParams::new(0.5, FRAC_PI_2, FRAC_PI_2).unwrap();
        let h = truncate_max(&coherent(1.0), &p, 1).unwrap();
        let vac = FockVector::vacuum(2).unwrap();
        assert!((h.state.overlap_sqr(&vac) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unpumped_single_photon_herald() {
        let p = DeviceParams::new(0.0, 0.0, FRAC_PI_4).unwrap();
        let input = coherent(1.0);
        let h = truncate_max(&input, &p, 1).unwrap();
        // |R|² |ψ₁|² = 0.5 e^{-1}
        let expected = 0.5 * (-1.0f64).exp();
        assert!((h.probability - expected).abs() < 1e-15);
        assert!((h.state.overlap_sqr(&FockVector::vacuum(2).unwrap()) - 1.0).abs() < 1e-15);

        let full = crate::devices::output_state_oracle(
            &input,
            &p,
            Cutoffs::uniform(30).unwrap(),
            Default::default(),
        )
        .unwrap();
        let proj = project_herald(&full, &HeraldPattern::case_max(1)).unwrap();
        assert!((proj.probability - expected).abs() < 1e-10);
    }

    #[test]
    fn vacuum_input_without_pump_is_impossible() {
        let p = DeviceParams::new(0.0, 0.0, FRAC_PI_4).unwrap();
        let err = truncate_max(&FockVector::vacuum(5).unwrap(), &p, 1).unwrap_err();
        assert!(matches!(err, Error::ZeroProbabilityHerald { .. }));
        let err = truncate_min(&coherent(1.0), &p, 1).unwrap_err();
        assert!(matches!(err, Error::ZeroProbabilityHerald { .. }));
        let blocked = DeviceParams::new(0.5, 0.0, FRAC_PI_2).unwrap();
        let err = truncate_min(&coherent(1.0), &blocked, 1).unwrap_err();
        assert!(matches!(err, Error::ZeroProbabilityHerald { .. }));
    }

    #[test]
    fn min_config_removes_vacuum() {
        let p = DeviceParams::new(0.4, 0.3, 0.7).unwrap();
        let h = truncate_min(&coherent(1.3), &p, 1).unwrap();
        assert_eq!(h.state.amplitude(0), c(0.0));
        assert!((h.state.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn min_config_vacuum_input() {
        let s = 0.5f64;
        let p = DeviceParams::new(s, 0.2, FRAC_PI_4).unwrap();
        let h = truncate_min(&FockVector::vacuum(4).unwrap(), &p, 1).unwrap();
        let expected = (s.tanh() / s.cosh()).powi(2) * 0.5;
        assert!((h.probability - expected).abs() < 1e-15);
        assert!((h.state.overlap_sqr(&FockVector::basis(1, 5).unwrap()) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_count_heralds_are_degenerate_but_valid() {
        let p = DeviceParams::new(0.5, 0.0, FRAC_PI_4).unwrap();
        let h = truncate_max(&coherent(1.0), &p, 0).unwrap();
        assert_eq!(h.state.dim(), 1);
        let h = truncate_min(&coherent(1.0), &p, 0).unwrap();
        assert!(h.probability > 0.0);
    }

    #[test]
    fn projection_basics() {
        let cut = Cutoffs::uniform(2).unwrap();
        let full = MultimodeState::from_terms(cut, [([0, 1, 0], c(1.0))]).unwrap();
        let h = project_herald(&full, &HeraldPattern::case_max(1)).unwrap();
        assert_eq!(h.probability, 1.0);
        assert_eq!(h.state.amplitude(0), c(1.0));

        let full = MultimodeState::from_terms(
            cut,
            [([0, 1, 0], c(FRAC_1_SQRT_2)), ([1, 0, 0], c(FRAC_1_SQRT_2))],
        )
        .unwrap();
        let h = project_herald(&full, &HeraldPattern::case_max(1)).unwrap();
        assert!((h.probability - 0.5).abs() < 1e-15);
        assert!((h.state.amplitude(0) - c(1.0)).norm() < 1e-15);

        let none = project_herald(&full, &HeraldPattern::new(Mode::C, Mode::A, 1).unwrap());
        assert!(matches!(none, Err(Error::ZeroProbabilityHerald { .. })));
    }

    #[test]
    fn pattern_validation() {
        assert!(HeraldPattern::new(Mode::B, Mode::B, 1).is_err());
        assert_eq!(HeraldPattern::case_max(2).output_mode(), Mode::A);
        assert_eq!(HeraldPattern::case_min(2).output_mode(), Mode::B);
    }

    #[test]
    fn rejects_unnormalized_input() {
        let p = DeviceParams::new(0.5, 0.0, FRAC_PI_4).unwrap();
        let v = FockVector::from_real(&[1.0, 1.0]).unwrap();
        assert!(matches!(
            truncate_max(&v, &p, 1),
            Err(Error::Unnormalized { .. })
        ));
    }

    #[test]
    fn tail_bound_tracks_missing_mass() {
        let p = DeviceParams::new(0.5, 0.0, FRAC_PI_4).unwrap();
        // Coherent α = 2 cut at 25 levels misses ~1e-12 of its mass.
        let raw = coherent_coefficients(c(2.0), 25).unwrap();
        assert!(raw.tail_mass > 0.0);
        let h = truncate_min(&raw.state, &p, 2).unwrap();
        assert!(h.tail_bound > 0.0 && h.tail_bound < 1e-10);
        let full = truncate_min(&raw.state.normalize().unwrap(), &p, 2).unwrap();
        assert_eq!(full.tail_bound, 0.0);
    }
}
