use num_complex::Complex64;
use std::collections::BTreeMap;

use super::{Cutoffs, DensityMatrix, Mode};
use crate::{Error, Result};

/// Three-mode pure state over occupation triples `(n_a, n_b, n_c)`.
///
/// Terms are kept in a `BTreeMap`, so iteration is sorted by triple and
/// every reduction over the state is reproducible bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct MultimodeState {
    terms: BTreeMap<[usize; 3], Complex64>,
    cutoffs: Cutoffs,
}

impl MultimodeState {
    pub fn new(cutoffs: Cutoffs) -> Self {
        Self {
            terms: BTreeMap::new(),
            cutoffs,
        }
    }

    pub fn from_terms<I>(cutoffs: Cutoffs, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = ([usize; 3], Complex64)>,
    {
        let mut state = Self::new(cutoffs);
        for (triple, amp) in terms {
            state.add(triple, amp)?;
        }
        Ok(state)
    }

    /// Accumulates `amp` onto `triple`.
    pub fn add(&mut self, triple: [usize; 3], amp: Complex64) -> Result<()> {
        if !self.cutoffs.contains(triple) {
            return Err(Error::DimensionMismatch {
                expected: self.cutoffs.as_array().into_iter().max().unwrap_or(0),
                found: triple.into_iter().max().unwrap_or(0) + 1,
            });
        }
        *self.terms.entry(triple).or_insert(Complex64::new(0.0, 0.0)) += amp;
        Ok(())
    }

    #[inline]
    pub fn cutoffs(&self) -> Cutoffs {
        self.cutoffs
    }

    pub fn amplitude(&self, triple: [usize; 3]) -> Complex64 {
        self.terms
            .get(&triple)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[usize; 3], &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|z| z.norm_sqr()).sum()
    }

    /// Drops exact zeros and entries below `tol` in magnitude.
    pub fn pruned(&self, tol: f64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(_, z)| z.norm() > tol)
                .map(|(k, v)| (*k, *v))
                .collect(),
            cutoffs: self.cutoffs,
        }
    }

    /// Keeps the triples inside `cutoffs`; returns the restricted state and
    /// the squared norm that fell outside.
    pub fn restricted(&self, cutoffs: Cutoffs) -> (Self, f64) {
        let mut kept = BTreeMap::new();
        let mut dropped = 0.0;
        for (&t, &z) in &self.terms {
            if cutoffs.contains(t) {
                kept.insert(t, z);
            } else {
                dropped += z.norm_sqr();
            }
        }
        (
            Self {
                terms: kept,
                cutoffs,
            },
            dropped,
        )
    }

    /// Largest `|ψ(t) - φ(t)|` over the union of supports.
    pub fn max_abs_difference(&self, other: &MultimodeState) -> f64 {
        let mut worst = 0.0f64;
        for (t, z) in &self.terms {
            worst = worst.max((z - other.amplitude(*t)).norm());
        }
        for (t, z) in &other.terms {
            if !self.terms.contains_key(t) {
                worst = worst.max(z.norm());
            }
        }
        worst
    }

    /// Reduced density matrix of `keep`, tracing the other two modes.
    /// Not normalized: its trace is the squared norm of the state.
    pub fn partial_trace(&self, keep: Mode) -> DensityMatrix {
        let k = keep.index();
        let dim = self.cutoffs.get(keep);
        // Group by the traced-out occupations.
        let mut groups: BTreeMap<[usize; 2], Vec<(usize, Complex64)>> = BTreeMap::new();
        for (t, &z) in &self.terms {
            let rest = match k {
                0 => [t[1], t[2]],
                1 => [t[0], t[2]],
                _ => [t[0], t[1]],
            };
            groups.entry(rest).or_default().push((t[k], z));
        }
        let mut rho = DensityMatrix::zeros(dim).expect("cutoffs are positive");
        for entries in groups.values() {
            for &(i, zi) in entries {
                for &(j, zj) in entries {
                    rho.add_at(i, j, zi * zj.conj());
                }
            }
        }
        rho
    }
}
