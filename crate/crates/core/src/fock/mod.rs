//! Fock-space state representations and expectation values.
//!
//! Three modes are labelled after the device ports: `a` and `b` leave the
//! parametric amplifier, `c` is the free beamsplitter input. Mode `b` also
//! feeds the beamsplitter.

mod density;
mod ladder;
mod multimode;
pub(crate) mod vector;

pub use density::DensityMatrix;
pub use ladder::{Expectation, Ladder, LadderWord, SingleModeState};
pub use multimode::MultimodeState;
pub use vector::{coherent_coefficients, CoherentExpansion, FockVector};

use serde::{Deserialize, Serialize};
use std::fmt;

/// Normalization tolerance used by `normalize` and the state invariants.
pub const NORM_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    A,
    B,
    C,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::A, Mode::B, Mode::C];

    #[inline]
    pub fn index(self) -> usize {
        match self {
            Mode::A => 0,
            Mode::B => 1,
            Mode::C => 2,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Mode::A => "a",
            Mode::B => "b",
            Mode::C => "c",
        };
        f.write_str(s)
    }
}

/// Per-mode photon-number cutoffs `(D_a, D_b, D_c)`: mode `x` holds `0..D_x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cutoffs {
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

impl Cutoffs {
    pub fn new(a: usize, b: usize, c: usize) -> crate::Result<Self> {
        for dim in [a, b, c] {
            if dim == 0 {
                return Err(crate::Error::InvalidDimension { dim });
            }
        }
        Ok(Self { a, b, c })
    }

    pub fn uniform(dim: usize) -> crate::Result<Self> {
        Self::new(dim, dim, dim)
    }

    #[inline]
    pub fn get(&self, mode: Mode) -> usize {
        match mode {
            Mode::A => self.a,
            Mode::B => self.b,
            Mode::C => self.c,
        }
    }

    #[inline]
    pub fn as_array(&self) -> [usize; 3] {
        [self.a, self.b, self.c]
    }

    #[inline]
    pub fn contains(&self, triple: [usize; 3]) -> bool {
        triple[0] < self.a && triple[1] < self.b && triple[2] < self.c
    }
}
