//! Dense complex matrix exponential: scaling and squaring around a
//! degree-13 Padé approximant (Higham 2005).

use nalgebra::DMatrix;
use num_complex::Complex64;

type CMatrix = DMatrix<Complex64>;

const THETA_13: f64 = 5.371_920_351_148_152;

// Numerator coefficients of the [13/13] Padé approximant of e^x.
const PADE_13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

fn one_norm(m: &CMatrix) -> f64 {
    m.column_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

#[inline]
fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn expm(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm requires a square matrix");
    if n == 0 {
        return a.clone();
    }
    let norm = one_norm(a);
    let squarings = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a * re(0.5f64.powi(squarings));

    let b = &PADE_13;
    let eye = CMatrix::identity(n, n);
    let a2 = &scaled * &scaled;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let u_inner = &a6 * (&a6 * re(b[13]) + &a4 * re(b[11]) + &a2 * re(b[9]))
        + &a6 * re(b[7])
        + &a4 * re(b[5])
        + &a2 * re(b[3])
        + &eye * re(b[1]);
    let u = &scaled * u_inner;
    let v = &a6 * (&a6 * re(b[12]) + &a4 * re(b[10]) + &a2 * re(b[8]))
        + &a6 * re(b[6])
        + &a4 * re(b[4])
        + &a2 * re(b[2])
        + &eye * re(b[0]);

    let p = &v + &u;
    let q = &v - &u;
    let mut r = q
        .lu()
        .solve(&p)
        .expect("Padé denominator is nonsingular after scaling");
    for _ in 0..squarings {
        r = &r * &r;
    }
    r
}

/// Largest entry of `|U†U - I|`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.nrows();
    let g = u.adjoint() * u;
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { re(1.0) } else { re(0.0) };
            worst = worst.max((g[(i, j)] - target).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_exponential() {
        let a = CMatrix::from_element(1, 1, Complex64::new(0.3, 2.0));
        let e = expm(&a);
        assert!((e[(0, 0)] - Complex64::new(0.3, 2.0).exp()).norm() < 1e-14);
    }

    #[test]
    fn rotation_generator() {
        // exp(θ [[0,-1],[1,0]]) is a rotation by θ; large θ exercises squaring.
        for theta in [0.1, 1.0, 7.5, 40.0] {
            let a = CMatrix::from_row_slice(2, 2, &[re(0.0), re(-theta), re(theta), re(0.0)]);
            let e = expm(&a);
            assert!((e[(0, 0)].re - theta.cos()).abs() < 1e-12);
            assert!((e[(1, 0)].re - theta.sin()).abs() < 1e-12);
            assert!(unitarity_defect(&e) < 1e-12);
        }
    }

    #[test]
    fn nilpotent_matches_series() {
        // Strictly upper triangular: the series terminates.
        let a = CMatrix::from_row_slice(
            3,
            3,
            &[
                re(0.0),
                re(1.0),
                re(2.0),
                re(0.0),
                re(0.0),
                re(3.0),
                re(0.0),
                re(0.0),
                re(0.0),
            ],
        );
        let e = expm(&a);
        let expected = CMatrix::identity(3, 3) + &a + (&a * &a) * re(0.5);
        assert!((e - expected).iter().all(|z| z.norm() < 1e-13));
    }
}
