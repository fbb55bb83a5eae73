//! Order-4 Weingarten functions of `U(N)` and the S₄ character data behind
//! them.

use serde::Serialize;

use super::perm::{CycleClass, Perm4};
use super::rational::{q, Polynomial, Rational, RationalFunctionOfN};
use crate::error::Result;

/// Irreducible representations of S₄, by partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Irrep4 {
    /// `[4]`
    Trivial,
    /// `[3,1]`
    Standard,
    /// `[2,2]`
    TwoTwo,
    /// `[2,1,1]`
    StandardSign,
    /// `[1⁴]`
    Sign,
}

impl Irrep4 {
    pub const ALL: [Irrep4; 5] = [
        Irrep4::Trivial,
        Irrep4::Standard,
        Irrep4::TwoTwo,
        Irrep4::StandardSign,
        Irrep4::Sign,
    ];

    pub fn partition(self) -> &'static [usize] {
        match self {
            Irrep4::Trivial => &[4],
            Irrep4::Standard => &[3, 1],
            Irrep4::TwoTwo => &[2, 2],
            Irrep4::StandardSign => &[2, 1, 1],
            Irrep4::Sign => &[1, 1, 1, 1],
        }
    }

    /// Number of rows of the Young diagram. The isotypic component of
    /// `(C^N)^{⊗4}` for this irrep vanishes when `N` is smaller.
    pub fn length(self) -> usize {
        self.partition().len()
    }

    pub fn dim(self) -> i64 {
        self.character(CycleClass::Identity)
    }

    pub fn character(self, cls: CycleClass) -> i64 {
        use CycleClass::*;
        let row: [i64; 5] = match self {
            Irrep4::Trivial => [1, 1, 1, 1, 1],
            Irrep4::Standard => [3, 1, -1, 0, -1],
            Irrep4::TwoTwo => [2, 0, 2, -1, 0],
            Irrep4::StandardSign => [3, -1, -1, 0, 1],
            Irrep4::Sign => [1, -1, 1, 1, -1],
        };
        match cls {
            Identity => row[0],
            Transposition => row[1],
            DoubleTransposition => row[2],
            ThreeCycle => row[3],
            FourCycle => row[4],
        }
    }

    /// Cell contents `j - i` and the hook-length product.
    fn contents_and_hooks(self) -> (Vec<i64>, i64) {
        let parts = self.partition();
        let mut contents = Vec::new();
        let mut hooks = 1;
        for (i, &len) in parts.iter().enumerate() {
            for j in 0..len {
                contents.push(j as i64 - i as i64);
                let arm = len - j - 1;
                let leg = parts.iter().skip(i + 1).filter(|&&p| p > j).count();
                hooks *= (arm + leg + 1) as i64;
            }
        }
        (contents, hooks)
    }

    /// Dimension of the `U(N)` irrep, `s_λ(1^N) = Π (N + c) / Π hooks`.
    pub fn unitary_dim(self) -> RationalFunctionOfN {
        let (contents, hooks) = self.contents_and_hooks();
        let num = contents
            .iter()
            .fold(Polynomial::constant(q(1)), |acc, &c| &acc * &Polynomial::linear(-c));
        RationalFunctionOfN::polynomial(num.scale(Rational::new(1, hooks as i128)))
    }

    /// `1 / s_λ(1^N)`, poles at `N = -c` for every cell content `c`.
    pub fn inverse_unitary_dim(self) -> RationalFunctionOfN {
        let (contents, hooks) = self.contents_and_hooks();
        let roots: Vec<i64> = contents.iter().map(|c| -c).collect();
        RationalFunctionOfN::inverse_linear_product(q(hooks as i128), &roots)
    }
}

const FULL: [i64; 7] = [-3, -2, -1, 0, 1, 2, 3];

/// The order-4 Weingarten function, per cycle class, in closed form.
pub fn weingarten4_rational(cls: CycleClass) -> RationalFunctionOfN {
    let mut with_n = FULL.to_vec();
    with_n.push(0);
    let over = |num: &[i128], roots: &[i64]| RationalFunctionOfN::new(Polynomial::from_ints(num), roots.to_vec());
    match cls {
        CycleClass::FourCycle => over(&[-5], &FULL),
        CycleClass::ThreeCycle => over(&[-3, 0, 2], &with_n),
        CycleClass::DoubleTransposition => over(&[6, 0, 1], &with_n),
        CycleClass::Transposition => over(&[-1], &[-3, -1, 0, 1, 3]),
        CycleClass::Identity => over(&[6, 0, -8, 0, 1], &with_n),
    }
}

/// The widely reproduced table with a single factor of `N` in every
/// denominator and a positive transposition entry. It disagrees with
/// [`weingarten4_rational`] by `N` on `[1^4]`, `[2^2]`, `[1,3]` and by a sign
/// on `[1^2,2]`; kept for comparison only.
pub fn weingarten4_printed(cls: CycleClass) -> RationalFunctionOfN {
    let over_full = |num: &[i128]| RationalFunctionOfN::new(Polynomial::from_ints(num), FULL.to_vec());
    match cls {
        CycleClass::FourCycle => over_full(&[-5]),
        CycleClass::ThreeCycle => over_full(&[-3, 0, 2]),
        CycleClass::DoubleTransposition => over_full(&[6, 0, 1]),
        CycleClass::Transposition => RationalFunctionOfN::inverse_linear_product(q(1), &[-3, -1, 0, 1, 3]),
        CycleClass::Identity => over_full(&[6, 0, -8, 0, 1]),
    }
}

/// The same function rebuilt from characters:
/// `Wg(σ) = (1/4!²) Σ_λ d_λ² χ^λ(σ) / s_λ(1^N)`.
pub fn weingarten4_from_characters(cls: CycleClass) -> RationalFunctionOfN {
    Irrep4::ALL.iter().fold(RationalFunctionOfN::zero(), |acc, &lam| {
        let d = lam.dim() as i128;
        let weight = Rational::new(d * d * lam.character(cls) as i128, 576);
        &acc + &lam.inverse_unitary_dim().scale(weight)
    })
}

/// Exact `Wg(σ, N)`; `PoleEvaluation` for `N ≤ 3`.
pub fn weingarten4_exact(sigma: Perm4, n: i64) -> Result<Rational> {
    weingarten4_rational(sigma.cycle_class()).eval(n)
}

pub fn weingarten4(sigma: Perm4, n: i64) -> Result<f64> {
    weingarten4_rational(sigma.cycle_class()).eval_f64(n)
}

/// Weingarten function valid for every `n >= 1`: the character sum restricted
/// to irreps with at most `n` rows. Equals the table for `n >= 4`.
pub fn weingarten4_general(sigma: Perm4, n: usize) -> Result<Rational> {
    if n == 0 {
        return Err(crate::error::Error::param("n", "dimension must be positive"));
    }
    let cls = sigma.cycle_class();
    let mut total = q(0);
    for lam in Irrep4::ALL.into_iter().filter(|l| l.length() <= n) {
        let d = lam.dim() as i128;
        let weight = Rational::new(d * d * lam.character(cls) as i128, 576);
        total += lam.inverse_unitary_dim().eval(n as i64)? * weight;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::moments::rational::frac;

    #[test]
    fn values_at_four() {
        let e = Perm4::IDENTITY;
        let t = Perm4::from_one_line([2, 1, 3, 4]).unwrap();
        assert_eq!(weingarten4_exact(e, 4).unwrap(), frac(67, 10080));
        assert_eq!(weingarten4_exact(t, 4).unwrap(), frac(-1, 420));
        assert_eq!(weingarten4_printed(CycleClass::Identity).eval(4).unwrap(), frac(67, 2520));
        assert_eq!(weingarten4_printed(CycleClass::Transposition).eval(4).unwrap(), frac(1, 420));
        let c4 = Perm4::from_one_line([2, 3, 4, 1]).unwrap();
        assert_eq!(weingarten4(c4, 2), Err(Error::PoleEvaluation { n: 2 }));
    }

    #[test]
    fn closed_form_equals_character_expansion() {
        for cls in CycleClass::ALL {
            assert_eq!(weingarten4_rational(cls), weingarten4_from_characters(cls), "{cls}");
        }
    }

    #[test]
    fn printed_table_deviations() {
        let n = RationalFunctionOfN::polynomial(Polynomial::from_ints(&[0, 1]));
        for cls in CycleClass::ALL {
            let printed = weingarten4_printed(cls);
            let exact = weingarten4_rational(cls);
            match cls {
                CycleClass::FourCycle => assert_eq!(exact, printed),
                CycleClass::Transposition => assert_eq!(exact, -&printed),
                _ => assert_eq!(&exact * &n, printed, "{cls}"),
            }
        }
    }

    #[test]
    fn general_form_agrees_with_table_from_four() {
        for n in 4..=8usize {
            for p in Perm4::all() {
                assert_eq!(weingarten4_general(p, n).unwrap(), weingarten4_exact(p, n as i64).unwrap());
            }
        }
        assert!(weingarten4_general(Perm4::IDENTITY, 2).is_ok());
    }

    #[test]
    fn character_orthogonality() {
        for a in Irrep4::ALL {
            for b in Irrep4::ALL {
                let ip: i64 = CycleClass::ALL
                    .iter()
                    .map(|&c| c.size() as i64 * a.character(c) * b.character(c))
                    .sum();
                assert_eq!(ip, if a == b { 24 } else { 0 });
            }
        }
    }

    #[test]
    fn unitary_dims() {
        // Σ_λ d_λ s_λ(1^N) = N⁴
        for n in 1..=6 {
            let total: Rational = Irrep4::ALL
                .iter()
                .map(|l| l.unitary_dim().eval(n).unwrap() * q(l.dim() as i128))
                .sum();
            assert_eq!(total, q((n as i128).pow(4)));
        }
        assert_eq!(Irrep4::Sign.unitary_dim().eval(3).unwrap(), q(0));
        assert_eq!(Irrep4::StandardSign.unitary_dim().eval(2).unwrap(), q(0));
        assert!(Irrep4::TwoTwo.unitary_dim().eval(2).unwrap() > q(0));
    }

    #[test]
    fn first_order_orthogonality() {
        // Wg is the inverse of the Gram matrix N^{cycles(σ^-1 τ)}; row e gives 1.
        for n in 4..=7i64 {
            let total: Rational = Perm4::all()
                .iter()
                .map(|&s| weingarten4_exact(s, n).unwrap() * q((n as i128).pow(s.cycle_class().cycles() as u32)))
                .sum();
            assert_eq!(total, q(1));
        }
    }
}
