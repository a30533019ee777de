//! The amplifier + beamsplitter pair and the three-mode state it produces.

mod closed_form;
pub mod expm;
mod oracle;

pub use closed_form::output_state_closed_form;
pub use oracle::{output_state_oracle, OracleOptions};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::fock::Cutoffs;
use crate::{Error, Result};

/// Tail budget for discarded probability mass before a cutoff is rejected.
pub const TAIL_BUDGET: f64 = 1e-9;

/// Amplifier strength `s`, pump phase `phi` and beamsplitter angle `theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviceParams {
    pub s: f64,
    pub phi: f64,
    pub theta: f64,
}

impl DeviceParams {
    pub fn new(s: f64, phi: f64, theta: f64) -> Result<Self> {
        if !(s >= 0.0) || !s.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "amplifier strength s must be finite and non-negative, got {s}"
            )));
        }
        if !phi.is_finite() || !theta.is_finite() {
            return Err(Error::InvalidParameter(
                "phase and beamsplitter angle must be finite".into(),
            ));
        }
        Ok(Self { s, phi, theta })
    }

    /// Transmittance `T = cos θ`.
    #[inline]
    pub fn transmittance(&self) -> Complex64 {
        Complex64::new(self.theta.cos(), 0.0)
    }

    /// Reflectance `R = i sin θ`.
    #[inline]
    pub fn reflectance(&self) -> Complex64 {
        Complex64::new(0.0, self.theta.sin())
    }

    /// Squeezing parameter `ξ = s e^{iφ}`.
    #[inline]
    pub fn xi(&self) -> Complex64 {
        Complex64::from_polar(self.s, self.phi)
    }

    /// `-e^{iφ} tanh s`, the per-pair ratio of the two-mode squeezed vacuum.
    #[inline]
    pub fn squeeze_ratio(&self) -> Complex64 {
        -Complex64::from_polar(self.s.tanh(), self.phi)
    }

    /// `A_n(s, φ) = sech s (-e^{iφ} tanh s)^n`.
    pub fn squeeze_coefficient(&self, n: usize) -> Complex64 {
        let sech = 1.0 / self.s.cosh();
        if n == 0 {
            return Complex64::new(sech, 0.0);
        }
        let t = self.s.tanh();
        Complex64::from_polar(
            sech * t.powi(n as i32),
            n as f64 * (self.phi + std::f64::consts::PI),
        )
    }

    /// Smallest `N` with `tanh^{2N} s < tol`; zero when `s = 0`.
    pub fn squeeze_photon_cutoff(&self, tol: f64) -> usize {
        let t2 = self.s.tanh().powi(2);
        if t2 == 0.0 {
            return 0;
        }
        (tol.ln() / t2.ln()).floor() as usize + 1
    }

    /// Cutoffs for an input of dimension `input_dim`: mode `a` holds the
    /// squeezed pairs up to a `1e-14` tail; the beamsplitter can route every
    /// pair photon and every input photon into either `b` or `c`.
    pub fn recommended_cutoffs(&self, input_dim: usize) -> Result<Cutoffs> {
        let a = self.squeeze_photon_cutoff(1e-14) + 1;
        let mixed = a + input_dim.max(1) - 1;
        Cutoffs::new(a, mixed, mixed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beamsplitter_is_lossless() {
        for k in 0..50 {
            let p = DeviceParams::new(0.3, 0.0, k as f64 * 0.37).unwrap();
            let sum = p.transmittance().norm_sqr() + p.reflectance().norm_sqr();
            assert!((sum - 1.0).abs() <= 1e-15);
        }
    }

    #[test]
    fn rejects_negative_strength() {
        assert!(DeviceParams::new(-0.1, 0.0, 0.0).is_err());
        assert!(DeviceParams::new(f64::NAN, 0.0, 0.0).is_err());
    }

    #[test]
    fn squeeze_coefficients_decay_and_sum_to_one() {
        let p = DeviceParams::new(0.7, 1.3, 0.0).unwrap();
        let mut partial = 0.0;
        let mut prev = f64::INFINITY;
        for n in 0..200 {
            let a = p.squeeze_coefficient(n);
            let expected = (1.0 / 0.7f64.cosh()) * 0.7f64.tanh().powi(n as i32);
            assert!((a.norm() - expected).abs() < 1e-15);
            assert!(a.norm() < prev);
            prev = a.norm();
            let next = partial + a.norm_sqr();
            assert!(next >= partial);
            partial = next;
        }
        assert!((partial - 1.0).abs() < 1e-12);
        // Phase: (-e^{iφ})^n
        let a3 = p.squeeze_coefficient(3);
        let direct = Complex64::new(1.0 / 0.7f64.cosh(), 0.0) * p.squeeze_ratio().powu(3);
        assert!((a3 - direct).norm() < 1e-15);
    }

    #[test]
    fn photon_cutoff() {
        let p = DeviceParams::new(0.8, 0.0, 0.0).unwrap();
        let n = p.squeeze_photon_cutoff(1e-14);
        let t2 = 0.8f64.tanh().powi(2);
        assert!(t2.powi(n as i32) < 1e-14);
        assert!(t2.powi(n as i32 - 1) >= 1e-14);
        assert_eq!(
            DeviceParams::new(0.0, 0.0, 0.0)
                .unwrap()
                .squeeze_photon_cutoff(1e-14),
            0
        );
    }
}
