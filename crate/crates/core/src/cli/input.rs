use num_complex::Complex64;
use serde::Serialize;
use std::path::Path;

use crate::fock::{coherent_coefficients, vector::coherent_dim_for_tail, FockVector};
use crate::{Error, Result};

/// Minimum input cutoff used by the CLI.
pub const DEFAULT_DIM: usize = 30;

/// Coherent inputs are cut where their tail mass drops below this, then
/// renormalized.
pub const INPUT_TAIL_TOL: f64 = 1e-14;

/// Input state of mode `c` together with how it was built.
#[derive(Debug, Clone, Serialize)]
pub struct PreparedInput {
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub dim: usize,
    /// Mass discarded by the cutoff before renormalization.
    pub tail_mass: f64,
    #[serde(skip)]
    pub state: FockVector,
}

/// Coherent state `|α⟩` with real `α` (the pump phase is then `φ - β`).
pub fn coherent_input(alpha: f64, dim: Option<usize>) -> Result<PreparedInput> {
    let alpha_c = Complex64::new(alpha, 0.0);
    let dim = match dim {
        Some(d) => d,
        None => coherent_dim_for_tail(alpha_c, DEFAULT_DIM, INPUT_TAIL_TOL),
    };
    let expansion = coherent_coefficients(alpha_c, dim)?;
    Ok(PreparedInput {
        kind: "coherent",
        alpha: Some(alpha),
        dim,
        tail_mass: expansion.tail_mass,
        state: expansion.state.normalize()?,
    })
}

pub fn vacuum_input(dim: Option<usize>) -> Result<PreparedInput> {
    let dim = dim.unwrap_or(1);
    Ok(PreparedInput {
        kind: "vacuum",
        alpha: None,
        dim,
        tail_mass: 0.0,
        state: FockVector::vacuum(dim)?,
    })
}

/// Parses `0.6,0.8` or complex entries written `re:im`, e.g. `0.6,0:0.8`.
pub fn parse_amplitudes(list: &str) -> Result<FockVector> {
    let mut amps = Vec::new();
    for entry in list.split(',') {
        let entry = entry.trim();
        let bad = || Error::InvalidParameter(format!("cannot parse amplitude {entry:?}"));
        let z = match entry.split_once(':') {
            Some((re, im)) => Complex64::new(
                re.trim().parse().map_err(|_| bad())?,
                im.trim().parse().map_err(|_| bad())?,
            ),
            None => Complex64::new(entry.parse().map_err(|_| bad())?, 0.0),
        };
        amps.push(z);
    }
    FockVector::new(amps)
}

pub fn explicit_input(state: FockVector) -> Result<PreparedInput> {
    let tail_mass = (1.0 - state.norm_sqr()).max(0.0);
    Ok(PreparedInput {
        kind: "explicit",
        alpha: None,
        dim: state.dim(),
        tail_mass,
        state: state.normalize()?,
    })
}

pub fn json_input(path: &Path) -> Result<PreparedInput> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidParameter(format!("reading {}: {e}", path.display())))?;
    let state: FockVector = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidParameter(format!("parsing {}: {e}", path.display())))?;
    explicit_input(state)
}
