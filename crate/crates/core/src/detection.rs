//! Imperfect number-resolving detectors and the mixed conditional state they
//! herald.
//!
//! A detector with efficiency `η` and dark-count probability `ν` reports `N`
//! counts on `|m⟩` with probability
//!
//! ```text
//! Σ_{n=0}^{min(N,m)} e^{-ν} ν^{N-n}/(N-n)! · C(m,n) η^n (1-η)^{m-n}
//! ```
//!
//! i.e. binomial loss followed by independent Poisson dark counts.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::devices::{output_state_closed_form, DeviceParams};
use crate::fock::{Cutoffs, DensityMatrix, FockVector, MultimodeState};
use crate::scissors::{
    truncate_max, truncate_min, Configuration, HeraldPattern, MIN_HERALD_PROBABILITY,
};
use crate::special::{binomial, powu, LnFactorial};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorModel {
    pub eta: f64,
    pub nu: f64,
    /// Largest count the detector can resolve.
    pub max_resolved: usize,
}

impl DetectorModel {
    pub fn new(eta: f64, nu: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::InvalidParameter(format!(
                "efficiency must lie in [0, 1], got {eta}"
            )));
        }
        if !(nu >= 0.0) || !nu.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "dark-count probability must be non-negative, got {nu}"
            )));
        }
        Ok(Self {
            eta,
            nu,
            max_resolved: usize::MAX,
        })
    }

    pub fn perfect() -> Self {
        Self {
            eta: 1.0,
            nu: 0.0,
            max_resolved: usize::MAX,
        }
    }

    pub fn with_max_resolved(mut self, max_resolved: usize) -> Self {
        self.max_resolved = max_resolved;
        self
    }

    /// Bound on the POVM weight lost by cutting the Fock sum at `dim`.
    pub fn truncation_bound(&self, count: usize, dim: usize) -> f64 {
        powu(1.0 - self.eta, dim.saturating_sub(count))
    }
}

/// Fock-diagonal POVM element `Π_N`, restricted to `|m⟩` with `m < dim`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PovmElement {
    pub count: usize,
    pub diagonal: Vec<f64>,
}

pub fn povm_element(model: &DetectorModel, count: usize, dim: usize) -> Result<PovmElement> {
    if dim == 0 {
        return Err(Error::InvalidDimension { dim });
    }
    let lf = LnFactorial::new(count);
    // Poisson dark-count weight for N - n spurious clicks.
    let dark: Vec<f64> = (0..=count)
        .map(|n| {
            let k = count - n;
            let ln_nu_pow = if k == 0 {
                0.0
            } else {
                k as f64 * model.nu.ln()
            };
            if model.nu == 0.0 && k > 0 {
                0.0
            } else {
                (-model.nu + ln_nu_pow - lf.get(k)).exp()
            }
        })
        .collect();
    let diagonal = (0..dim)
        .map(|m| {
            (0..=count.min(m))
                .map(|n| {
                    dark[n] * binomial(m, n) * powu(model.eta, n) * powu(1.0 - model.eta, m - n)
                })
                .sum()
        })
        .collect();
    Ok(PovmElement { count, diagonal })
}

/// Mixed state of the undetected mode after imperfect `(N, 0)` detection.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionedState {
    pub rho: DensityMatrix,
    /// Trace before normalization, relative to the full state's norm.
    pub probability: f64,
}

/// Applies `Π_N` on the `N`-detecting mode and `Π_0` on the other detected
/// mode, traces both out and normalizes. Both elements are Fock-diagonal on
/// different modes, so they act as a per-term weight on the amplitudes.
pub fn conditioned_density(
    full: &MultimodeState,
    pattern: &HeraldPattern,
    model: &DetectorModel,
) -> Result<ConditionedState> {
    if pattern.count() > model.max_resolved {
        return Err(Error::InvalidParameter(format!(
            "detector resolves at most {} photons, herald asks for {}",
            model.max_resolved,
            pattern.count()
        )));
    }
    let cut = full.cutoffs();
    let pi_n = povm_element(model, pattern.count(), cut.get(pattern.detect_n()))?;
    let pi_0 = povm_element(model, 0, cut.get(pattern.detect_zero()))?;
    let out_mode = pattern.output_mode();
    let (n_idx, z_idx, o_idx) = (
        pattern.detect_n().index(),
        pattern.detect_zero().index(),
        out_mode.index(),
    );

    let mut groups: BTreeMap<[usize; 2], Vec<(usize, Complex64)>> = BTreeMap::new();
    for (t, &z) in full.iter() {
        groups
            .entry([t[n_idx], t[z_idx]])
            .or_default()
            .push((t[o_idx], z));
    }

    let mut rho = DensityMatrix::zeros(cut.get(out_mode))?;
    for ([mn, mz], entries) in &groups {
        let w = pi_n.diagonal[*mn] * pi_0.diagonal[*mz];
        if w == 0.0 {
            continue;
        }
        for &(i, zi) in entries {
            for &(j, zj) in entries {
                rho.add_at(i, j, zi * zj.conj() * w);
            }
        }
    }

    let total = full.norm_sqr();
    let trace = rho.trace().re;
    let probability = if total > 0.0 { trace / total } else { 0.0 };
    if !(probability >= MIN_HERALD_PROBABILITY) {
        return Err(Error::ZeroProbabilityHerald { probability });
    }
    let rho = rho.normalized()?;
    rho.validate()?;
    Ok(ConditionedState { rho, probability })
}

/// `⟨φ|ρ|φ⟩`, clamped to `[0, 1]`.
pub fn fidelity(rho: &DensityMatrix, target: &FockVector) -> Result<f64> {
    let d = rho.dim();
    if target.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: target.dim(),
        });
    }
    let phi = target.amplitudes();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..d {
        if phi[i] == Complex64::new(0.0, 0.0) {
            continue;
        }
        for j in 0..d {
            acc += phi[i].conj() * rho.get(i, j) * phi[j];
        }
    }
    Ok(acc.re.clamp(0.0, 1.0))
}

/// Imperfectly heralded state next to the ideal scissors output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FidelityReport {
    pub fidelity: f64,
    pub herald_probability: f64,
    pub ideal_probability: f64,
    pub rho: DensityMatrix,
}

/// Builds the three-mode state, conditions it on lossy `(N, 0)` counts and
/// compares with the ideal truncation of the same input.
pub fn heralded_fidelity(
    input: &FockVector,
    params: &DeviceParams,
    config: Configuration,
    count: usize,
    model: &DetectorModel,
) -> Result<FidelityReport> {
    let ideal = match config {
        Configuration::Max => truncate_max(input, params, count)?,
        Configuration::Min => truncate_min(input, params, count)?,
    };
    let rec = params.recommended_cutoffs(input.dim())?;
    // The counting detector must see at least N photons in its own mode.
    let a = rec.a.max(count + 1);
    let mixed = rec.b.max(a + input.dim() - 1).max(count + 1);
    let full = output_state_closed_form(input, params, Cutoffs::new(a, mixed, mixed)?)?;
    let conditioned = conditioned_density(&full, &config.pattern(count), model)?;

    let dim = conditioned.rho.dim().max(ideal.state.dim());
    let rho = conditioned.rho.resized(dim)?;
    let fidelity = fidelity(&rho, &ideal.state.resized(dim)?)?;
    Ok(FidelityReport {
        fidelity,
        herald_probability: conditioned.probability,
        ideal_probability: ideal.probability,
        rho,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn perfect_detector_is_projector() {
        let m = DetectorModel::perfect();
        assert_eq!(
            povm_element(&m, 1, 4).unwrap().diagonal,
            vec![0.0, 1.0, 0.0, 0.0]
        );
        assert_eq!(
            povm_element(&m, 0, 4).unwrap().diagonal,
            vec![1.0, 0.0, 0.0, 0.0]
        );
    }

    #[test]
    fn lossy_dark_count_entries() {
        let m = DetectorModel::new(0.7, 1e-4).unwrap();
        let d = povm_element(&m, 1, 3).unwrap().diagonal;
        let e = (-1e-4f64).exp();
        // m = 0: only a dark count
        assert!((d[0] - e * 1e-4).abs() < 1e-18);
        assert!((d[1] - e * (1e-4 * 0.3 + 0.7)).abs() < 1e-15);
        assert!((d[2] - e * (1e-4 * 0.09 + 2.0 * 0.7 * 0.3)).abs() < 1e-15);
    }

    #[test]
    fn parameter_checks() {
        assert!(DetectorModel::new(1.1, 0.0).is_err());
        assert!(DetectorModel::new(0.5, -1.0).is_err());
        assert!(povm_element(&DetectorModel::perfect(), 0, 0).is_err());
    }

    #[test]
    fn fidelity_examples() {
        let phi = FockVector::from_real(&[0.6, 0.8]).unwrap();
        let rho = DensityMatrix::from_pure(&phi);
        assert!((fidelity(&rho, &phi).unwrap() - 1.0).abs() < 1e-15);

        let rho = DensityMatrix::from_diagonal(&[1.0, 0.0]).unwrap();
        let one = FockVector::basis(1, 2).unwrap();
        assert_eq!(fidelity(&rho, &one).unwrap(), 0.0);

        let rho = DensityMatrix::from_diagonal(&[0.25, 0.75]).unwrap();
        let plus = FockVector::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        assert!((fidelity(&rho, &plus).unwrap() - 0.5).abs() < 1e-15);

        assert!(fidelity(&rho, &FockVector::vacuum(3).unwrap()).is_err());
    }

    #[test]
    fn half_efficient_single_term() {
        let cut = Cutoffs::uniform(2).unwrap();
        let full =
            MultimodeState::from_terms(cut, [([0, 1, 0], Complex64::new(1.0, 0.0))]).unwrap();
        let m = DetectorModel::new(0.5, 0.0).unwrap();
        let out = conditioned_density(&full, &HeraldPattern::case_max(1), &m).unwrap();
        assert!((out.probability - 0.5).abs() < 1e-15);
        assert!((out.rho.get(0, 0).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn resolution_limit() {
        let cut = Cutoffs::uniform(3).unwrap();
        let full =
            MultimodeState::from_terms(cut, [([0, 2, 0], Complex64::new(1.0, 0.0))]).unwrap();
        let m = DetectorModel::perfect().with_max_resolved(1);
        assert!(conditioned_density(&full, &HeraldPattern::case_max(2), &m).is_err());
    }

    #[test]
    fn heralded_fidelity_limits() {
        let input = crate::fock::coherent_coefficients(Complex64::new(1.0, 0.0), 30)
            .unwrap()
            .state
            .normalize()
            .unwrap();
        let params = DeviceParams::new(0.5, 0.3, 0.6).unwrap();
        for config in [Configuration::Max, Configuration::Min] {
            let r =
                heralded_fidelity(&input, &params, config, 2, &DetectorModel::perfect()).unwrap();
            assert!((r.fidelity - 1.0).abs() < 1e-12);
            assert!((r.herald_probability - r.ideal_probability).abs() < 1e-12);
            let lossy = DetectorModel::new(0.5, 1e-3).unwrap();
            let r = heralded_fidelity(&input, &params, config, 2, &lossy).unwrap();
            assert!(r.fidelity < 1.0);
            assert!((r.rho.trace().re - 1.0).abs() < 1e-12);
        }
    }
}
