//! Nonclassicality indicators for single-mode states.

use serde::Serialize;

use crate::fock::{LadderWord, SingleModeState};
use crate::{Error, Result};

/// Below this mean photon number the Mandel parameter is treated as 0/0.
pub const MIN_MEAN_PHOTONS: f64 = 1e-14;

pub fn mean_photon_number<S: SingleModeState + ?Sized>(state: &S) -> f64 {
    state.expect_real(&LadderWord::number())
}

/// `Q = ⟨(Δn)²⟩/⟨n⟩ - 1`, using `⟨n²⟩ = ⟨a†²a²⟩ + ⟨n⟩`.
pub fn mandel_q<S: SingleModeState + ?Sized>(state: &S) -> Result<f64> {
    let n = mean_photon_number(state);
    if n < MIN_MEAN_PHOTONS {
        return Err(Error::UndefinedMetric(
            "Mandel Q of a state with no photons",
        ));
    }
    let pairs = state.expect_real(&LadderWord::normal_ordered_power(2));
    let variance = pairs + n - n * n;
    Ok(variance / n - 1.0)
}

/// Variance of `X = (a + a†)/2`; the coherent-state value is 1/4.
pub fn quadrature_variance<S: SingleModeState + ?Sized>(state: &S) -> f64 {
    let a = state.expectation(&LadderWord::annihilation()).value;
    let a2 = state.expectation(&LadderWord::annihilation_pow(2)).value;
    let n = mean_photon_number(state);
    // ⟨X²⟩ = (⟨a²⟩ + ⟨a†²⟩ + 2⟨a†a⟩ + 1)/4 and ⟨X⟩ = Re⟨a⟩.
    let x2 = (2.0 * a2.re + 2.0 * n + 1.0) / 4.0;
    x2 - a.re * a.re
}

/// Wigner–Yanase skew information of a pure state,
/// `W = 1/2 + ⟨a†a⟩ - ⟨a†⟩⟨a⟩`.
pub fn skew_information<S: SingleModeState + ?Sized>(state: &S) -> Result<f64> {
    let psi = state
        .as_pure()
        .ok_or(Error::UnsupportedForMixedState("skew information"))?;
    let n = mean_photon_number(psi);
    let a = psi.expectation(&LadderWord::annihilation()).value;
    Ok(0.5 + n - a.norm_sqr())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricReport {
    pub mean_n: f64,
    /// `None` for the vacuum.
    pub mandel_q: Option<f64>,
    pub var_x: f64,
    /// `None` for mixed states.
    pub skew_w: Option<f64>,
}

impl MetricReport {
    pub fn evaluate<S: SingleModeState + ?Sized>(state: &S) -> Self {
        Self {
            mean_n: mean_photon_number(state),
            mandel_q: mandel_q(state).ok(),
            var_x: quadrature_variance(state),
            skew_w: skew_information(state).ok(),
        }
    }
}
