use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::FockVector;
use crate::{Error, Result};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-10;
pub const EIGEN_TOL: f64 = 1e-10;

/// Single-mode density operator in the Fock basis, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "DensityJson", try_from = "DensityJson")]
pub struct DensityMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension { dim });
        }
        Ok(Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        })
    }

    pub fn from_row_major(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension { dim });
        }
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        let mut rho = Self::zeros(diag.len())?;
        for (i, &p) in diag.iter().enumerate() {
            rho.data[i * rho.dim + i] = Complex64::new(p, 0.0);
        }
        Ok(rho)
    }

    /// `|ψ⟩⟨ψ|`
    pub fn from_pure(psi: &FockVector) -> Self {
        let a = psi.amplitudes();
        let dim = a.len();
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(a[i] * a[j].conj());
            }
        }
        Self { dim, data }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub(crate) fn add_at(&mut self, row: usize, col: usize, z: Complex64) {
        self.data[row * self.dim + col] += z;
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i).re).collect()
    }

    /// Divides by the (real) trace.
    pub fn normalized(&self) -> Result<Self> {
        let tr = self.trace().re;
        if !(tr > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "density matrix trace {tr} is not positive"
            )));
        }
        Ok(Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z / tr).collect(),
        })
    }

    /// Zero-pads or cuts to `dim`.
    pub fn resized(&self, dim: usize) -> Result<Self> {
        let mut out = Self::zeros(dim)?;
        let n = dim.min(self.dim);
        for i in 0..n {
            for j in 0..n {
                out.data[i * dim + j] = self.get(i, j);
            }
        }
        Ok(out)
    }

    pub fn max_hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let m = DMatrix::from_row_slice(self.dim, self.dim, &self.data);
        // Symmetrize away rounding before the Hermitian solver.
        let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    /// `Tr ρ²`
    pub fn purity(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += (self.get(i, j) * self.get(j, i)).re;
            }
        }
        acc
    }

    /// Checks Hermiticity, unit trace and positivity at the module tolerances.
    pub fn validate(&self) -> Result<()> {
        let herm = self.max_hermiticity_defect();
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidParameter(format!(
                "density matrix not Hermitian (defect {herm:.3e})"
            )));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidParameter(format!(
                "density matrix trace {tr} is not 1"
            )));
        }
        let min_ev = self.eigenvalues().first().copied().unwrap_or(0.0);
        if min_ev < -EIGEN_TOL {
            return Err(Error::InvalidParameter(format!(
                "density matrix has negative eigenvalue {min_ev:.3e}"
            )));
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct DensityJson {
    dim: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl From<DensityMatrix> for DensityJson {
    fn from(m: DensityMatrix) -> Self {
        Self {
            dim: m.dim,
            re: m.data.iter().map(|z| z.re).collect(),
            im: m.data.iter().map(|z| z.im).collect(),
        }
    }
}

impl TryFrom<DensityJson> for DensityMatrix {
    type Error = Error;

    fn try_from(j: DensityJson) -> Result<Self> {
        if j.re.len() != j.im.len() {
            return Err(Error::DimensionMismatch {
                expected: j.re.len(),
                found: j.im.len(),
            });
        }
        DensityMatrix::from_row_major(
            j.dim,
            j.re.into_iter()
                .zip(j.im)
                .map(|(re, im)| Complex64::new(re, im))
                .collect(),
        )
    }
}
