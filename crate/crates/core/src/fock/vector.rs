use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::NORM_EPS;
use crate::{Error, Result};

/// Single-mode pure state as amplitudes over photon numbers `0..dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "FockVectorJson", try_from = "FockVectorJson")]
pub struct FockVector {
    amplitudes: Vec<Complex64>,
}

impl FockVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidDimension { dim: 0 });
        }
        Ok(Self { amplitudes })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); dim])
    }

    /// Fock state `|n⟩` in a space of dimension `dim`.
    pub fn basis(n: usize, dim: usize) -> Result<Self> {
        if n >= dim {
            return Err(Error::DimensionMismatch {
                expected: n + 1,
                found: dim,
            });
        }
        let mut v = Self::zeros(dim)?;
        v.amplitudes[n] = Complex64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn vacuum(dim: usize) -> Result<Self> {
        Self::basis(0, dim)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Amplitude of `|n⟩`; zero beyond the cutoff.
    #[inline]
    pub fn amplitude(&self, n: usize) -> Complex64 {
        self.amplitudes
            .get(n)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Rescales to unit norm. A vector already within rounding of unit norm
    /// is returned unchanged, so repeated calls are bit-stable.
    pub fn normalize(&self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if !(n2 > 0.0) || !n2.is_finite() {
            return Err(Error::Unnormalized { norm_sqr: n2 });
        }
        if (n2 - 1.0).abs() <= 4.0 * f64::EPSILON {
            return Ok(self.clone());
        }
        let scale = 1.0 / n2.sqrt();
        Ok(Self {
            amplitudes: self.amplitudes.iter().map(|z| z * scale).collect(),
        })
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_EPS
    }

    /// Zero-pads or cuts to `dim`.
    pub fn resized(&self, dim: usize) -> Result<Self> {
        let mut amplitudes = self.amplitudes.clone();
        amplitudes.resize(dim, Complex64::new(0.0, 0.0));
        Self::new(amplitudes)
    }

    /// `⟨self|other⟩`, treating missing components as zero.
    pub fn inner(&self, other: &FockVector) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(u, v)| u.conj() * v)
            .sum()
    }

    /// `|⟨self|other⟩|²` for normalized inputs; insensitive to global phase.
    pub fn overlap_sqr(&self, other: &FockVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Largest photon number with `|amplitude| > tol`, if any.
    pub fn max_support(&self, tol: f64) -> Option<usize> {
        self.amplitudes.iter().rposition(|z| z.norm() > tol)
    }

    /// Smallest photon number with `|amplitude| > tol`, if any.
    pub fn min_support(&self, tol: f64) -> Option<usize> {
        self.amplitudes.iter().position(|z| z.norm() > tol)
    }
}

#[derive(Serialize, Deserialize)]
struct FockVectorJson {
    dim: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl From<FockVector> for FockVectorJson {
    fn from(v: FockVector) -> Self {
        Self {
            dim: v.dim(),
            re: v.amplitudes.iter().map(|z| z.re).collect(),
            im: v.amplitudes.iter().map(|z| z.im).collect(),
        }
    }
}

impl TryFrom<FockVectorJson> for FockVector {
    type Error = Error;

    fn try_from(j: FockVectorJson) -> Result<Self> {
        if j.re.len() != j.dim {
            return Err(Error::DimensionMismatch {
                expected: j.dim,
                found: j.re.len(),
            });
        }
        if j.im.len() != j.dim {
            return Err(Error::DimensionMismatch {
                expected: j.dim,
                found: j.im.len(),
            });
        }
        FockVector::new(
            j.re.into_iter()
                .zip(j.im)
                .map(|(re, im)| Complex64::new(re, im))
                .collect(),
        )
    }
}

/// Truncated coherent-state expansion and the probability mass it leaves out.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentExpansion {
    pub state: FockVector,
    pub tail_mass: f64,
}

/// Coefficients `e^{-|α|²/2} α^i / √(i!)` for `i < dim`, not renormalized.
pub fn coherent_coefficients(alpha: Complex64, dim: usize) -> Result<CoherentExpansion> {
    if dim == 0 {
        return Err(Error::InvalidDimension { dim });
    }
    let mut amplitudes = Vec::with_capacity(dim);
    let mut psi = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    amplitudes.push(psi);
    for i in 1..dim {
        psi = psi * alpha / (i as f64).sqrt();
        amplitudes.push(psi);
    }
    let state = FockVector::new(amplitudes)?;
    let tail_mass = (1.0 - state.norm_sqr()).max(0.0);
    Ok(CoherentExpansion { state, tail_mass })
}

/// Smallest cutoff `≥ min_dim` whose coherent tail mass is below `tol`.
pub(crate) fn coherent_dim_for_tail(alpha: Complex64, min_dim: usize, tol: f64) -> usize {
    let mean = alpha.norm_sqr();
    // Poisson weight of |dim⟩ and the mass already covered by 0..dim.
    let mut weight = (-mean).exp();
    let mut covered = 0.0;
    let mut dim = 0;
    loop {
        covered += weight;
        dim += 1;
        weight *= mean / dim as f64;
        // Past the mode the remaining terms shrink geometrically; the second
        // test guards against `1 - covered` bottoming out at rounding level.
        let past_peak = dim as f64 > 2.0 * mean + 1.0;
        if dim >= min_dim && (1.0 - covered < tol || (past_peak && weight < 1e-3 * tol)) {
            return dim;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn vacuum_coefficients() {
        let exp = coherent_coefficients(c(0.0), 5).unwrap();
        assert_eq!(exp.state.amplitudes()[0], c(1.0));
        assert!(exp.state.amplitudes()[1..].iter().all(|z| *z == c(0.0)));
        assert_eq!(exp.tail_mass, 0.0);
    }

    #[test]
    fn unit_alpha_ratio_and_norm() {
        let exp = coherent_coefficients(c(1.0), 30).unwrap();
        let a = exp.state.amplitudes();
        assert_eq!(a[1] / a[0], c(1.0));
        assert!((exp.state.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn alpha_two_tail_matches_series() {
        let exp = coherent_coefficients(c(2.0), 10).unwrap();
        // 1 - e^{-4} Σ_{i<10} 4^i / i!
        let mut term = 1.0;
        let mut sum = 1.0;
        for i in 1..10 {
            term *= 4.0 / i as f64;
            sum += term;
        }
        let expected = 1.0 - (-4.0f64).exp() * sum;
        assert!((exp.tail_mass - expected).abs() < 1e-14);
        assert!(expected > 1e-3);
    }

    #[test]
    fn zero_dim_rejected() {
        assert_eq!(
            coherent_coefficients(c(1.0), 0),
            Err(Error::InvalidDimension { dim: 0 })
        );
        assert!(FockVector::new(vec![]).is_err());
    }

    #[test]
    fn json_shape() {
        let v = FockVector::new(vec![c(0.6), Complex64::new(0.0, 0.8)]).unwrap();
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"{"dim":2,"re":[0.6,0.0],"im":[0.0,0.8]}"#);
        let back: FockVector = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
        assert!(serde_json::from_str::<FockVector>(r#"{"dim":3,"re":[1.0],"im":[0.0]}"#).is_err());
    }

    #[test]
    fn tail_dim_search() {
        let d = coherent_dim_for_tail(c(3.0), 30, 1e-14);
        let exp = coherent_coefficients(c(3.0), d).unwrap();
        assert!(exp.tail_mass < 1e-14);
        assert!(d >= 30);
    }
}
