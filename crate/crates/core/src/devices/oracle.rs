//! Independent route to the device output: build the amplifier and
//! beamsplitter generators as matrices, exponentiate them, and apply them to
//! the input state.
//!
//! The squeezer conserves `n_a - n_b` and the beamsplitter conserves
//! `n_b + n_c`, so each generator is exponentiated one conserved sector at a
//! time. Beamsplitter sectors are finite and exact; squeezer sectors are
//! truncated at the mode cutoff plus a padding margin.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use super::expm::{expm, unitarity_defect};
use super::{DeviceParams, TAIL_BUDGET};
use crate::fock::{Cutoffs, FockVector, MultimodeState};
use crate::{Error, Result};

type Terms = BTreeMap<[usize; 3], Complex64>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    /// Extra levels added to the squeezer's truncated space before the
    /// result is cut back to the requested cutoffs.
    pub padding: usize,
    /// Largest tolerated entry of `|U†U - I|` for any exponentiated block.
    pub unitarity_tol: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            padding: 20,
            unitarity_tol: 1e-8,
        }
    }
}

/// `R(θ) S(ξ) |0, 0, ψ⟩` with `S = exp(ξ* ab - ξ a†b†)` and
/// `R = exp(iθ (b†c + bc†))`, evaluated numerically.
pub fn output_state_oracle(
    input: &FockVector,
    params: &DeviceParams,
    cutoffs: Cutoffs,
    options: OracleOptions,
) -> Result<MultimodeState> {
    let mut terms = Terms::new();
    for (i, &psi) in input.amplitudes().iter().enumerate() {
        if psi != Complex64::new(0.0, 0.0) {
            terms.insert([0, 0, i], psi);
        }
    }
    let squeezed = apply_squeezer(
        &terms,
        params.xi(),
        cutoffs.a + options.padding,
        cutoffs.b + options.padding,
        options.unitarity_tol,
    )?;
    let (mixed, skipped) =
        apply_beamsplitter(&squeezed, params.theta, cutoffs, options.unitarity_tol)?;

    let mut full = MultimodeState::new(Cutoffs::new(
        mixed.keys().map(|t| t[0]).max().unwrap_or(0) + 1,
        mixed.keys().map(|t| t[1]).max().unwrap_or(0) + 1,
        mixed.keys().map(|t| t[2]).max().unwrap_or(0) + 1,
    )?);
    for (t, z) in mixed {
        if z != Complex64::new(0.0, 0.0) {
            full.add(t, z)?;
        }
    }
    let (state, dropped) = full.restricted(cutoffs);
    let dropped = dropped + skipped;
    if dropped > TAIL_BUDGET {
        return Err(Error::Truncation {
            tail: dropped,
            budget: TAIL_BUDGET,
            detail: format!(
                "oracle with cutoffs (a={}, b={}, c={}), s={}",
                cutoffs.a, cutoffs.b, cutoffs.c, params.s
            ),
        });
    }
    Ok(state)
}

fn check_unitary(u: &DMatrix<Complex64>, tol: f64, what: &str) -> Result<()> {
    let defect = unitarity_defect(u);
    if defect > tol {
        return Err(Error::OracleFailure(format!(
            "{what} block of size {} deviates from unitarity by {defect:.3e}",
            u.nrows()
        )));
    }
    Ok(())
}

/// Applies `exp(ξ* ab - ξ a†b†)` with modes `a`, `b` limited to
/// `0..limit_a`, `0..limit_b`.
fn apply_squeezer(
    terms: &Terms,
    xi: Complex64,
    limit_a: usize,
    limit_b: usize,
    tol: f64,
) -> Result<Terms> {
    // Sector key: (n_a - n_b, n_c). Within a sector, basis k ↦ (p0 + k, q0 + k).
    let mut sectors: BTreeMap<(isize, usize), Vec<(usize, Complex64)>> = BTreeMap::new();
    for (t, &z) in terms {
        let d = t[0] as isize - t[1] as isize;
        let k = t[0].min(t[1]);
        sectors.entry((d, t[2])).or_default().push((k, z));
    }

    let mut unitaries: BTreeMap<isize, DMatrix<Complex64>> = BTreeMap::new();
    let mut out = Terms::new();
    for ((d, nc), entries) in sectors {
        let (p0, q0) = if d >= 0 {
            (d as usize, 0)
        } else {
            (0, (-d) as usize)
        };
        if p0 >= limit_a || q0 >= limit_b {
            return Err(Error::OracleFailure(format!(
                "input occupation outside squeezer space (sector {d})"
            )));
        }
        let len = (limit_a - p0).min(limit_b - q0);
        let u = match unitaries.entry(d) {
            Entry::Occupied(e) => e.into_mut(),
            Entry::Vacant(e) => {
                let mut g = DMatrix::<Complex64>::zeros(len, len);
                for k in 0..len {
                    let (p, q) = ((p0 + k) as f64, (q0 + k) as f64);
                    if k + 1 < len {
                        // a†b†|p,q⟩ = √((p+1)(q+1)) |p+1,q+1⟩
                        g[(k + 1, k)] = -xi * ((p + 1.0) * (q + 1.0)).sqrt();
                        // ab|p+1,q+1⟩ = √((p+1)(q+1)) |p,q⟩
                        g[(k, k + 1)] = xi.conj() * ((p + 1.0) * (q + 1.0)).sqrt();
                    }
                }
                let u = expm(&g);
                check_unitary(&u, tol, "squeezer")?;
                e.insert(u)
            }
        };
        for row in 0..len {
            let z: Complex64 = entries.iter().map(|&(k, amp)| u[(row, k)] * amp).sum();
            if z != Complex64::new(0.0, 0.0) {
                *out.entry([p0 + row, q0 + row, nc]).or_default() += z;
            }
        }
    }
    Ok(out)
}

/// Applies `exp(iθ (b†c + bc†))`. Each sector of fixed `n_b + n_c = M` is
/// the full `(M+1)`-dimensional space, so no truncation is involved.
///
/// Sectors that cannot reach any triple inside `keep` are not evolved; the
/// map is unitary on each sector, so their squared norm is returned as mass
/// lost to the cutoffs.
fn apply_beamsplitter(terms: &Terms, theta: f64, keep: Cutoffs, tol: f64) -> Result<(Terms, f64)> {
    let max_total = keep.b + keep.c - 2;
    let mut skipped = 0.0;
    let mut sectors: BTreeMap<(usize, usize), Vec<(usize, Complex64)>> = BTreeMap::new();
    for (t, &z) in terms {
        let total = t[1] + t[2];
        if t[0] >= keep.a || total > max_total {
            skipped += z.norm_sqr();
            continue;
        }
        sectors.entry((t[0], total)).or_default().push((t[1], z));
    }

    let gen = Complex64::new(0.0, theta);
    let mut unitaries: BTreeMap<usize, DMatrix<Complex64>> = BTreeMap::new();
    let mut out = Terms::new();
    for ((na, total), entries) in sectors {
        let len = total + 1;
        let u = match unitaries.entry(total) {
            Entry::Occupied(e) => e.into_mut(),
            Entry::Vacant(e) => {
                let mut g = DMatrix::<Complex64>::zeros(len, len);
                for k in 0..total {
                    // b†c|k, M-k⟩ = √((k+1)(M-k)) |k+1, M-k-1⟩, and its adjoint.
                    let w = (((k + 1) * (total - k)) as f64).sqrt();
                    g[(k + 1, k)] = gen * w;
                    g[(k, k + 1)] = gen * w;
                }
                let u = expm(&g);
                check_unitary(&u, tol, "beamsplitter")?;
                e.insert(u)
            }
        };
        for row in 0..len {
            let z: Complex64 = entries.iter().map(|&(k, amp)| u[(row, k)] * amp).sum();
            if z != Complex64::new(0.0, 0.0) {
                *out.entry([na, row, total - row]).or_default() += z;
            }
        }
    }
    Ok((out, skipped))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_devices() {
        let input = FockVector::new(vec![c(0.6, 0.0), c(0.0, 0.48), c(0.64, 0.0)]).unwrap();
        let p = DeviceParams::new(0.0, 0.0, 0.0).unwrap();
        let out = output_state_oracle(
            &input,
            &p,
            Cutoffs::uniform(3).unwrap(),
            OracleOptions::default(),
        )
        .unwrap();
        for i in 0..3 {
            assert!((out.amplitude([0, 0, i]) - input.amplitude(i)).norm() < 1e-12);
        }
        assert!((out.norm_sqr() - input.norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn heisenberg_relation_for_input_photon() {
        // R c† R† = -R* b† + T c†
        let input = FockVector::basis(1, 2).unwrap();
        let p = DeviceParams::new(0.0, 0.0, FRAC_PI_4).unwrap();
        let out = output_state_oracle(
            &input,
            &p,
            Cutoffs::uniform(2).unwrap(),
            OracleOptions::default(),
        )
        .unwrap();
        assert!((out.amplitude([0, 1, 0]) - (-p.reflectance().conj())).norm() < 1e-12);
        assert!((out.amplitude([0, 0, 1]) - p.transmittance()).norm() < 1e-12);
    }

    #[test]
    fn heisenberg_relation_for_b_photon() {
        // R b† R† = T* b† + R c†, checked on |0,1,0⟩ directly.
        let mut terms = Terms::new();
        terms.insert([0, 1, 0], c(1.0, 0.0));
        let theta = 0.6;
        let (out, skipped) =
            apply_beamsplitter(&terms, theta, Cutoffs::uniform(2).unwrap(), 1e-10).unwrap();
        assert_eq!(skipped, 0.0);
        let p = DeviceParams::new(0.0, 0.0, theta).unwrap();
        assert!((out[&[0, 1, 0]] - p.transmittance().conj()).norm() < 1e-13);
        assert!((out[&[0, 0, 1]] - p.reflectance()).norm() < 1e-13);
    }

    #[test]
    fn squeezed_vacuum_matches_series() {
        let s = 0.5;
        let phi = 0.7;
        let p = DeviceParams::new(s, phi, 0.0).unwrap();
        let input = FockVector::vacuum(1).unwrap();
        let cut = Cutoffs::new(40, 40, 1).unwrap();
        let out = output_state_oracle(&input, &p, cut, OracleOptions::default()).unwrap();
        for n in 0..40 {
            assert!(
                (out.amplitude([n, n, 0]) - p.squeeze_coefficient(n)).norm() < 1e-12,
                "n={n}"
            );
        }
    }
}
