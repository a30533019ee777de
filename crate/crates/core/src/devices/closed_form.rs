use num_complex::Complex64;

use super::{DeviceParams, TAIL_BUDGET};
use crate::fock::{Cutoffs, FockVector, MultimodeState};
use crate::special::LnFactorial;
use crate::{Error, Result};

/// A complex factor kept as `ln |z|` and `arg z`, so factorial ratios never
/// overflow before the final exponentiation. `None` means exactly zero.
#[derive(Clone, Copy)]
struct LogAmp {
    ln_mag: f64,
    phase: f64,
}

impl LogAmp {
    fn of(z: Complex64) -> Option<Self> {
        let mag = z.norm();
        (mag > 0.0).then(|| Self {
            ln_mag: mag.ln(),
            phase: z.arg(),
        })
    }

    /// `z^k` with `0^0 = 1`.
    fn pow(base: Option<Self>, k: usize) -> Option<Self> {
        if k == 0 {
            return Some(Self {
                ln_mag: 0.0,
                phase: 0.0,
            });
        }
        base.map(|b| Self {
            ln_mag: b.ln_mag * k as f64,
            phase: b.phase * k as f64,
        })
    }

    fn mul(self, other: Self) -> Self {
        Self {
            ln_mag: self.ln_mag + other.ln_mag,
            phase: self.phase + other.phase,
        }
    }

    fn to_complex(self) -> Complex64 {
        Complex64::from_polar(self.ln_mag.exp(), self.phase)
    }
}

/// Output of the amplifier + beamsplitter acting on `|0⟩_a |0⟩_b |ψ⟩_c`,
/// summed term by term from the binomial expansion of the transformed
/// creation operators:
///
/// ```text
/// Σ_{i,n,j≤i,m≤n} √i!/(j!(i-j)!) · √n!/(m!(n-m)!) · √(i-j+n-m)! · √(j+m)!
///     · ψ_i A_n T^j T*^(n-m) R^m (-R*)^(i-j) |n, i-j+n-m, j+m⟩
/// ```
///
/// Terms whose triple falls outside `cutoffs` are dropped; if the dropped
/// mass exceeds [`TAIL_BUDGET`] the call fails with a truncation error.
pub fn output_state_closed_form(
    input: &FockVector,
    params: &DeviceParams,
    cutoffs: Cutoffs,
) -> Result<MultimodeState> {
    let t = params.transmittance();
    let r = params.reflectance();
    let ln_t = LogAmp::of(t);
    let ln_t_conj = LogAmp::of(t.conj());
    let ln_r = LogAmp::of(r);
    let ln_minus_r_conj = LogAmp::of(-r.conj());

    let n_terms = cutoffs.a;
    let i_terms = input.dim();
    let lf = LnFactorial::new(n_terms + i_terms + cutoffs.b + cutoffs.c);

    let squeeze: Vec<Option<LogAmp>> = (0..n_terms)
        .map(|n| LogAmp::of(params.squeeze_coefficient(n)))
        .collect();

    let mut out = MultimodeState::new(cutoffs);
    for (i, &psi_i) in input.amplitudes().iter().enumerate() {
        let Some(ln_psi) = LogAmp::of(psi_i) else {
            continue;
        };
        for (n, ln_a) in squeeze.iter().enumerate() {
            let Some(ln_a) = *ln_a else { continue };
            let base = ln_psi.mul(ln_a);
            for j in 0..=i {
                for m in 0..=n {
                    let nb = i - j + n - m;
                    let nc = j + m;
                    if nb >= cutoffs.b || nc >= cutoffs.c {
                        continue;
                    }
                    let powers = [
                        LogAmp::pow(ln_t, j),
                        LogAmp::pow(ln_t_conj, n - m),
                        LogAmp::pow(ln_r, m),
                        LogAmp::pow(ln_minus_r_conj, i - j),
                    ];
                    let Some(powers) = powers
                        .into_iter()
                        .try_fold(base, |acc, p| p.map(|p| acc.mul(p)))
                    else {
                        continue;
                    };
                    let ln_comb = 0.5 * lf.get(i) - lf.get(j) - lf.get(i - j) + 0.5 * lf.get(n)
                        - lf.get(m)
                        - lf.get(n - m)
                        + 0.5 * lf.get(nb)
                        + 0.5 * lf.get(nc);
                    let term = LogAmp {
                        ln_mag: powers.ln_mag + ln_comb,
                        phase: powers.phase,
                    };
                    out.add([n, nb, nc], term.to_complex())?;
                }
            }
        }
    }

    let tail = input.norm_sqr() - out.norm_sqr();
    if tail > TAIL_BUDGET {
        return Err(Error::Truncation {
            tail,
            budget: TAIL_BUDGET,
            detail: format!(
                "closed form with cutoffs (a={}, b={}, c={}), s={}",
                cutoffs.a, cutoffs.b, cutoffs.c, params.s
            ),
        });
    }
    Ok(out)
}
