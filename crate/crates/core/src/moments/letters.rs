//! State invariants that appear in the fourth-order Haar average.

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::linalg::{identity, partial_trace, sqrtm_psd, tensor, ComplexMatrix, DensityMatrix, Keep};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Letter {
    One,
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl Letter {
    pub const ALL: [Letter; 8] = [
        Letter::One,
        Letter::A,
        Letter::B,
        Letter::C,
        Letter::D,
        Letter::E,
        Letter::F,
        Letter::G,
    ];
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Letter::One => "1",
            Letter::A => "A",
            Letter::B => "B",
            Letter::C => "C",
            Letter::D => "D",
            Letter::E => "E",
            Letter::F => "F",
            Letter::G => "G",
        };
        f.write_str(s)
    }
}

/// With `X = √ρ`, `R_B = Tr_A X` and `ρ_A = Tr_B ρ`:
///
/// - `a = Tr[R_B²]`
/// - `b = Tr[ρ_A²]`
/// - `c = a²`
/// - `d = Tr[M²]`, `g = Tr[M² S]`, where `M = Tr_B[(1_{A'} ⊗ X_{AB})(1_A ⊗ X_{A'B})]`
///   lives on `A ⊗ A'` and `S` swaps `A` and `A'`
/// - `e = Tr[X (ρ_A ⊗ R_B)]`
/// - `f = Tr[Y²]` with `Y = Tr_B[X (1_A ⊗ R_B)]`
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LetterValues {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
    pub g: f64,
    /// Largest imaginary part discarded while forming the letters.
    pub max_imag: f64,
}

impl LetterValues {
    pub fn get(&self, letter: Letter) -> f64 {
        match letter {
            Letter::One => 1.0,
            Letter::A => self.a,
            Letter::B => self.b,
            Letter::C => self.c,
            Letter::D => self.d,
            Letter::E => self.e,
            Letter::F => self.f,
            Letter::G => self.g,
        }
    }
}

fn trace_sq(m: &ComplexMatrix) -> Complex64 {
    let n = m.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += m[(i, j)] * m[(j, i)];
        }
    }
    acc
}

pub fn letters(rho: &DensityMatrix) -> LetterValues {
    let (na, nb) = (rho.dim_a(), rho.dim_b());
    let x = sqrtm_psd(rho);
    let r_b = partial_trace(&x, na, nb, Keep::B).expect("dims match");
    let rho_a = rho.marginal_a().matrix().clone();

    let a = trace_sq(&r_b);
    let b = trace_sq(&rho_a);

    // X[(α,β),(γ,δ)] with row index α·nb + β.
    let xe = |al: usize, be: usize, ga: usize, de: usize| x[(al * nb + be, ga * nb + de)];

    // M[(a,a'),(e,e')] = Σ_{b,d} X[(a,b),(e,d)] X[(a',d),(e',b)]
    let mut m = ComplexMatrix::zeros(na * na, na * na);
    for a0 in 0..na {
        for a1 in 0..na {
            for e0 in 0..na {
                for e1 in 0..na {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for bb in 0..nb {
                        for dd in 0..nb {
                            acc += xe(a0, bb, e0, dd) * xe(a1, dd, e1, bb);
                        }
                    }
                    m[(a0 * na + a1, e0 * na + e1)] = acc;
                }
            }
        }
    }
    let m2 = &m * &m;
    let d = m2.trace();
    // Tr[M² S] = Σ M²[(a,a'),(a',a)]
    let mut g = Complex64::new(0.0, 0.0);
    for a0 in 0..na {
        for a1 in 0..na {
            g += m2[(a0 * na + a1, a1 * na + a0)];
        }
    }

    let e = (&x * tensor(&rho_a, &r_b)).trace();

    let y_full = &x * tensor(&identity(na), &r_b);
    let y = partial_trace(&y_full, na, nb, Keep::A).expect("dims match");
    let f = trace_sq(&y);

    let max_imag = [a, b, d, e, f, g].iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    LetterValues {
        a: a.re,
        b: b.re,
        c: a.re * a.re,
        d: d.re,
        e: e.re,
        f: f.re,
        g: g.re,
        max_imag,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ket;
    use crate::states::{make_state, random_density, RandomSeed, StateFamily};

    #[test]
    fn bell_letters() {
        let l = letters(&make_state(&StateFamily::Bell { dim: 2 }).unwrap());
        assert!((l.a - 0.5).abs() < 1e-12);
        assert!((l.b - 0.5).abs() < 1e-12);
        assert!((l.c - 0.25).abs() < 1e-12);
    }

    #[test]
    fn free_state_letters() {
        let a = DensityMatrix::maximally_mixed(2, 1);
        let b = DensityMatrix::from_pure(&ket(2, 0), 2, 1).unwrap();
        let rho = DensityMatrix::product(&a, &b);
        let l = letters(&rho);
        assert!((l.a - 2.0).abs() < 1e-12);
        assert!((l.b - 0.5).abs() < 1e-12);
    }

    #[test]
    fn pure_product_letters() {
        let rho = DensityMatrix::from_pure(&ket(4, 0), 2, 2).unwrap();
        let l = letters(&rho);
        for v in [l.a, l.b, l.c, l.d, l.e, l.f, l.g] {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn real_and_consistent_on_random_states() {
        for (k, (na, nb)) in [(2, 2), (2, 3), (3, 2), (3, 3)].into_iter().enumerate() {
            let rho = random_density(na, nb, na * nb, RandomSeed::new(k as u64)).unwrap();
            let l = letters(&rho);
            assert!(l.max_imag < 1e-10);
            assert!((l.c - l.a * l.a).abs() < 1e-10);
        }
    }
}
