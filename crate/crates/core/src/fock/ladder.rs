use num_complex::Complex64;
use std::fmt;
use std::str::FromStr;

use super::{DensityMatrix, FockVector};
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Create,
    Annihilate,
}

/// Ordered product of creation/annihilation operators, written left to
/// right as in `a†a` (so the rightmost factor acts first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LadderWord(Vec<Ladder>);

impl LadderWord {
    pub fn new(ops: Vec<Ladder>) -> Self {
        Self(ops)
    }

    pub fn ops(&self) -> &[Ladder] {
        &self.0
    }

    pub fn annihilation() -> Self {
        Self(vec![Ladder::Annihilate])
    }

    pub fn creation() -> Self {
        Self(vec![Ladder::Create])
    }

    /// `a†a`
    pub fn number() -> Self {
        Self(vec![Ladder::Create, Ladder::Annihilate])
    }

    /// `a^k`
    pub fn annihilation_pow(k: usize) -> Self {
        Self(vec![Ladder::Annihilate; k])
    }

    /// `a†^k a^k`
    pub fn normal_ordered_power(k: usize) -> Self {
        let mut ops = vec![Ladder::Create; k];
        ops.extend(std::iter::repeat_n(Ladder::Annihilate, k));
        Self(ops)
    }

    /// Image of `|k⟩`: `Some((j, c))` with `word|k⟩ = c|j⟩`, or `None` if it
    /// annihilates the state. Intermediate photon numbers are unbounded.
    pub fn apply_to_basis(&self, k: usize) -> Option<(usize, f64)> {
        let mut n = k;
        let mut coef = 1.0f64;
        for op in self.0.iter().rev() {
            match op {
                Ladder::Annihilate => {
                    if n == 0 {
                        return None;
                    }
                    coef *= (n as f64).sqrt();
                    n -= 1;
                }
                Ladder::Create => {
                    n += 1;
                    coef *= (n as f64).sqrt();
                }
            }
        }
        Some((n, coef))
    }
}

impl fmt::Display for LadderWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for op in &self.0 {
            match op {
                Ladder::Create => f.write_str("a†")?,
                Ladder::Annihilate => f.write_str("a")?,
            }
        }
        Ok(())
    }
}

/// Accepts `a`, `a†`, `a^`, `a+` and `adag` tokens, whitespace optional:
/// `"a†a"`, `"adag adag a a"`.
impl FromStr for LadderWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut ops = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            if chars[i] != 'a' {
                return Err(Error::LadderParse(s.to_string()));
            }
            i += 1;
            match chars.get(i) {
                Some('†') | Some('^') | Some('+') => {
                    ops.push(Ladder::Create);
                    i += 1;
                }
                Some('d') if chars[i..].starts_with(&['d', 'a', 'g']) => {
                    ops.push(Ladder::Create);
                    i += 3;
                }
                _ => ops.push(Ladder::Annihilate),
            }
        }
        if ops.is_empty() {
            return Err(Error::LadderParse(s.to_string()));
        }
        Ok(Self(ops))
    }
}

/// Expectation value with a flag raised when the word maps populated
/// components beyond the cutoff, where the stored state has no amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Expectation {
    pub value: Complex64,
    pub truncated: bool,
}

/// Single-mode state that supports ladder-word expectation values.
pub trait SingleModeState {
    fn dim(&self) -> usize;

    fn expectation(&self, word: &LadderWord) -> Expectation;

    /// The pure-state view, when the state is a vector.
    fn as_pure(&self) -> Option<&FockVector> {
        None
    }

    /// Real part of `⟨word⟩`; callers use it for Hermitian words.
    fn expect_real(&self, word: &LadderWord) -> f64 {
        self.expectation(word).value.re
    }
}

impl SingleModeState for FockVector {
    fn dim(&self) -> usize {
        FockVector::dim(self)
    }

    fn expectation(&self, word: &LadderWord) -> Expectation {
        let psi = self.amplitudes();
        let mut value = Complex64::new(0.0, 0.0);
        let mut truncated = false;
        for (k, &amp) in psi.iter().enumerate() {
            if amp == Complex64::new(0.0, 0.0) {
                continue;
            }
            if let Some((j, coef)) = word.apply_to_basis(k) {
                match psi.get(j) {
                    Some(bra) => value += bra.conj() * amp * coef,
                    None => truncated = true,
                }
            }
        }
        Expectation { value, truncated }
    }

    fn as_pure(&self) -> Option<&FockVector> {
        Some(self)
    }
}

impl SingleModeState for DensityMatrix {
    fn dim(&self) -> usize {
        DensityMatrix::dim(self)
    }

    // Tr(ρ O) = Σ_k c_k ρ[k][j_k] where O|k⟩ = c_k |j_k⟩.
    fn expectation(&self, word: &LadderWord) -> Expectation {
        let d = self.dim();
        let mut value = Complex64::new(0.0, 0.0);
        let mut truncated = false;
        for k in 0..d {
            if let Some((j, coef)) = word.apply_to_basis(k) {
                if j < d {
                    value += self.get(k, j) * coef;
                } else if (0..d).any(|r| self.get(r, k) != Complex64::new(0.0, 0.0)) {
                    truncated = true;
                }
            }
        }
        Expectation { value, truncated }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::coherent_coefficients;

    #[test]
    fn parse_words() {
        assert_eq!("a†a".parse::<LadderWord>().unwrap(), LadderWord::number());
        assert_eq!(
            "adag a".parse::<LadderWord>().unwrap(),
            LadderWord::number()
        );
        assert_eq!(
            "a†a†aa".parse::<LadderWord>().unwrap(),
            LadderWord::normal_ordered_power(2)
        );
        assert_eq!(
            "a".parse::<LadderWord>().unwrap(),
            LadderWord::annihilation()
        );
        assert!("b".parse::<LadderWord>().is_err());
        assert!("".parse::<LadderWord>().is_err());
        assert_eq!(LadderWord::normal_ordered_power(1).to_string(), "a†a");
    }

    #[test]
    fn number_on_fock_one() {
        let v = FockVector::basis(1, 4).unwrap();
        let e = v.expectation(&LadderWord::number());
        assert_eq!(e.value, Complex64::new(1.0, 0.0));
        assert!(!e.truncated);
    }

    #[test]
    fn annihilation_on_vacuum() {
        let v = FockVector::vacuum(4).unwrap();
        assert_eq!(
            v.expectation(&LadderWord::annihilation()).value,
            Complex64::new(0.0, 0.0)
        );
    }

    #[test]
    fn annihilation_on_coherent_state() {
        let psi = coherent_coefficients(Complex64::new(1.0, 0.0), 30)
            .unwrap()
            .state;
        // Σ √(n+1) ψ*_n ψ_{n+1}
        let a = psi.amplitudes();
        let direct: Complex64 = (0..29)
            .map(|n| a[n].conj() * a[n + 1] * ((n + 1) as f64).sqrt())
            .sum();
        let e = psi.expectation(&LadderWord::annihilation());
        assert!((e.value - direct).norm() < 1e-14);
        assert!((e.value - Complex64::new(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn truncation_flag() {
        let v = FockVector::basis(3, 4).unwrap();
        assert!(v.expectation(&LadderWord::creation()).truncated);
        assert!(!v.expectation(&LadderWord::number()).truncated);
        // a a† on the top level leaves the cutoff only in between.
        let aad = LadderWord::new(vec![Ladder::Annihilate, Ladder::Create]);
        let e = v.expectation(&aad);
        assert!(!e.truncated);
        assert!((e.value.re - 4.0).abs() < 1e-14);
    }

    #[test]
    fn density_matches_vector() {
        let psi = coherent_coefficients(Complex64::new(0.7, 0.4), 20)
            .unwrap()
            .state;
        let rho = DensityMatrix::from_pure(&psi);
        for w in ["a", "a†", "a†a", "aa", "a†a†aa", "aa†"] {
            let word: LadderWord = w.parse().unwrap();
            let ev = psi.expectation(&word).value;
            let er = rho.expectation(&word).value;
            assert!((ev - er).norm() < 1e-13, "{w}: {ev} vs {er}");
        }
    }
}
