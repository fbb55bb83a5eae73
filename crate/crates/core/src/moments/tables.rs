//! Index contractions of the two state-dependent terms in the fourth
//! moment, one entry per `τ ∈ S₄` in lexicographic one-line order.

use super::letters::{Letter, LetterValues};
use super::perm::Perm4;

use Letter::*;

/// Factor in front of a `G₃` letter. `Dim` is a free trace over A, which
/// contributes `N_A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Multiplier {
    One,
    Dim,
}

const G2: [([u8; 4], Letter); 24] = [
    ([1, 2, 3, 4], One),
    ([1, 2, 4, 3], A),
    ([1, 3, 2, 4], B),
    ([1, 3, 4, 2], E),
    ([1, 4, 2, 3], E),
    ([1, 4, 3, 2], B),
    ([2, 1, 3, 4], A),
    ([2, 1, 4, 3], C),
    ([2, 3, 1, 4], E),
    ([2, 3, 4, 1], F),
    ([2, 4, 1, 3], F),
    ([2, 4, 3, 1], E),
    ([3, 1, 2, 4], E),
    ([3, 1, 4, 2], F),
    ([3, 2, 1, 4], B),
    ([3, 2, 4, 1], E),
    ([3, 4, 1, 2], D),
    ([3, 4, 2, 1], G),
    ([4, 1, 2, 3], F),
    ([4, 1, 3, 2], E),
    ([4, 2, 1, 3], E),
    ([4, 2, 3, 1], B),
    ([4, 3, 1, 2], G),
    ([4, 3, 2, 1], D),
];

const G3: [([u8; 4], Multiplier, Letter); 24] = [
    ([1, 2, 3, 4], Multiplier::One, One),
    ([1, 2, 4, 3], Multiplier::One, A),
    ([1, 3, 2, 4], Multiplier::One, B),
    ([1, 3, 4, 2], Multiplier::One, E),
    ([1, 4, 2, 3], Multiplier::One, E),
    ([1, 4, 3, 2], Multiplier::One, B),
    ([2, 1, 3, 4], Multiplier::Dim, One),
    ([2, 1, 4, 3], Multiplier::Dim, A),
    ([2, 3, 1, 4], Multiplier::One, One),
    ([2, 3, 4, 1], Multiplier::One, A),
    ([2, 4, 1, 3], Multiplier::One, A),
    ([2, 4, 3, 1], Multiplier::One, One),
    ([3, 1, 2, 4], Multiplier::Dim, B),
    ([3, 1, 4, 2], Multiplier::Dim, E),
    ([3, 2, 1, 4], Multiplier::One, B),
    ([3, 2, 4, 1], Multiplier::One, E),
    ([3, 4, 1, 2], Multiplier::One, E),
    ([3, 4, 2, 1], Multiplier::One, B),
    ([4, 1, 2, 3], Multiplier::Dim, E),
    ([4, 1, 3, 2], Multiplier::Dim, B),
    ([4, 2, 1, 3], Multiplier::One, E),
    ([4, 2, 3, 1], Multiplier::One, B),
    ([4, 3, 1, 2], Multiplier::One, B),
    ([4, 3, 2, 1], Multiplier::One, E),
];

fn index(tau: Perm4) -> usize {
    let line = tau.one_line();
    G2.iter()
        .position(|(p, _)| *p == line)
        .expect("table covers S4")
}

pub fn g2_letter(tau: Perm4) -> Letter {
    G2[index(tau)].1
}

pub fn g3_term(tau: Perm4) -> (Multiplier, Letter) {
    let (_, m, l) = G3[index(tau)];
    (m, l)
}

pub fn g2_value(tau: Perm4, letters: &LetterValues) -> f64 {
    letters.get(g2_letter(tau))
}

/// `G₃(τ)` for a subsystem A of dimension `dim_a`.
pub fn g3_value(tau: Perm4, letters: &LetterValues, dim_a: usize) -> f64 {
    let (m, l) = g3_term(tau);
    let factor = match m {
        Multiplier::One => 1.0,
        Multiplier::Dim => dim_a as f64,
    };
    factor * letters.get(l)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_are_in_lexicographic_order() {
        let perms = Perm4::all();
        for (k, p) in perms.iter().enumerate() {
            assert_eq!(G2[k].0, p.one_line());
            assert_eq!(G3[k].0, p.one_line());
        }
    }

    #[test]
    fn spot_entries() {
        let p = |l| Perm4::from_one_line(l).unwrap();
        assert_eq!(g2_letter(Perm4::IDENTITY), One);
        assert_eq!(g2_letter(p([2, 1, 4, 3])), C);
        assert_eq!(g3_term(p([3, 1, 2, 4])), (Multiplier::Dim, B));
        assert_eq!(g3_term(p([2, 4, 3, 1])), (Multiplier::One, One));
    }
}
