//! Exact rational functions of the dimension `N`.
//!
//! Denominators that arise from unitary-group integrals are products of
//! linear factors `N - r` with integer `r`, so they are stored factored. That
//! makes cancellation against the numerator exact: a factor `N - r` divides
//! the numerator iff the numerator vanishes at `r`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = Ratio<i128>;

pub fn q(n: i128) -> Rational {
    Rational::from_integer(n)
}

pub fn frac(n: i128, d: i128) -> Rational {
    Rational::new(n, d)
}

/// Dense polynomial in `N`, coefficients in ascending order, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn from_ints(coeffs: &[i128]) -> Self {
        Self::new(coeffs.iter().map(|&c| q(c)).collect())
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: vec![] }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// `N - r`.
    pub fn linear(r: i64) -> Self {
        Self::new(vec![q(-(r as i128)), q(1)])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + to_f64(c))
    }

    pub fn scale(&self, s: Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Synthetic division by `N - r`: returns `(quotient, remainder)`.
    pub fn div_linear(&self, r: i64) -> (Self, Rational) {
        if self.coeffs.is_empty() {
            return (Self::zero(), Rational::zero());
        }
        let root = q(r as i128);
        let n = self.coeffs.len();
        let mut quot = vec![Rational::zero(); n - 1];
        let mut carry = Rational::zero();
        for k in (0..n).rev() {
            let v = self.coeffs[k] + carry * root;
            if k == 0 {
                return (Self::new(quot), v);
            }
            quot[k - 1] = v;
            carry = v;
        }
        unreachable!()
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let get = |p: &Polynomial, k: usize| p.coeffs.get(k).copied().unwrap_or_else(Rational::zero);
        Polynomial::new((0..n).map(|k| get(self, k) + get(rhs, k)).collect())
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(q(-1))
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.abs();
            let show_coeff = k == 0 || !mag.is_one();
            if show_coeff {
                write!(f, "{mag}")?;
            }
            match k {
                0 => {}
                1 => write!(f, "N")?,
                _ => write!(f, "N^{k}")?,
            }
        }
        Ok(())
    }
}

fn to_f64(r: &Rational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    to_f64(r)
}

/// `numerator / Π (N - r)` over the multiset `roots`, kept in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFunctionOfN {
    numerator: Polynomial,
    roots: Vec<i64>,
}

impl RationalFunctionOfN {
    pub fn new(numerator: Polynomial, mut roots: Vec<i64>) -> Self {
        roots.sort_unstable();
        let mut out = RationalFunctionOfN { numerator, roots };
        out.cancel();
        out
    }

    pub fn zero() -> Self {
        Self::new(Polynomial::zero(), vec![])
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(Polynomial::constant(c), vec![])
    }

    pub fn polynomial(p: Polynomial) -> Self {
        Self::new(p, vec![])
    }

    /// `c / Π (N - r)`.
    pub fn inverse_linear_product(c: Rational, roots: &[i64]) -> Self {
        Self::new(Polynomial::constant(c), roots.to_vec())
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.numerator
    }

    /// Roots of the denominator with multiplicity, ascending.
    pub fn denominator_roots(&self) -> &[i64] {
        &self.roots
    }

    pub fn denominator(&self) -> Polynomial {
        self.roots
            .iter()
            .fold(Polynomial::constant(q(1)), |acc, &r| &acc * &Polynomial::linear(r))
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    /// Distinct poles of the reduced form.
    pub fn poles(&self) -> Vec<i64> {
        let mut p = self.roots.clone();
        p.dedup();
        p
    }

    pub fn has_pole_at(&self, n: i64) -> bool {
        self.roots.contains(&n)
    }

    fn cancel(&mut self) {
        if self.numerator.is_zero() {
            self.roots.clear();
            return;
        }
        let mut kept = Vec::with_capacity(self.roots.len());
        for &r in &self.roots {
            let (quot, rem) = self.numerator.div_linear(r);
            if rem.is_zero() {
                self.numerator = quot;
            } else {
                kept.push(r);
            }
        }
        self.roots = kept;
    }

    /// Exact value at an integer `N`; a surviving pole there is an error.
    pub fn eval(&self, n: i64) -> Result<Rational> {
        if self.has_pole_at(n) {
            return Err(Error::PoleEvaluation { n });
        }
        let x = q(n as i128);
        let den = self.roots.iter().fold(q(1), |acc, &r| acc * (x - q(r as i128)));
        Ok(self.numerator.eval(x) / den)
    }

    pub fn eval_f64(&self, n: i64) -> Result<f64> {
        self.eval(n).map(|r| to_f64(&r))
    }

    /// Multiplies both sides by the missing factors to reach `roots`.
    fn lift(&self, roots: &[i64]) -> Polynomial {
        let mut missing = roots.to_vec();
        for r in &self.roots {
            let pos = missing.iter().position(|m| m == r).expect("target contains own roots");
            missing.remove(pos);
        }
        missing
            .iter()
            .fold(self.numerator.clone(), |acc, &r| &acc * &Polynomial::linear(r))
    }

    pub fn scale(&self, s: Rational) -> Self {
        Self::new(self.numerator.scale(s), self.roots.clone())
    }
}

/// Multiset union, keeping the larger multiplicity of each root.
fn lcm_roots(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) if x == y => {
                out.push(*x);
                i += 1;
                j += 1;
            }
            (Some(x), Some(y)) if x < y => {
                out.push(*x);
                i += 1;
            }
            (Some(_), Some(y)) => {
                out.push(*y);
                j += 1;
            }
            (Some(x), None) => {
                out.push(*x);
                i += 1;
            }
            (None, Some(y)) => {
                out.push(*y);
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

impl Add for &RationalFunctionOfN {
    type Output = RationalFunctionOfN;
    fn add(self, rhs: &RationalFunctionOfN) -> RationalFunctionOfN {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let roots = lcm_roots(&self.roots, &rhs.roots);
        let num = &self.lift(&roots) + &rhs.lift(&roots);
        RationalFunctionOfN::new(num, roots)
    }
}

impl Neg for &RationalFunctionOfN {
    type Output = RationalFunctionOfN;
    fn neg(self) -> RationalFunctionOfN {
        self.scale(q(-1))
    }
}

impl Sub for &RationalFunctionOfN {
    type Output = RationalFunctionOfN;
    fn sub(self, rhs: &RationalFunctionOfN) -> RationalFunctionOfN {
        self + &(-rhs)
    }
}

impl Mul for &RationalFunctionOfN {
    type Output = RationalFunctionOfN;
    fn mul(self, rhs: &RationalFunctionOfN) -> RationalFunctionOfN {
        let mut roots = self.roots.clone();
        roots.extend_from_slice(&rhs.roots);
        RationalFunctionOfN::new(&self.numerator * &rhs.numerator, roots)
    }
}

impl fmt::Display for RationalFunctionOfN {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.roots.is_empty() {
            return write!(f, "{}", self.numerator);
        }
        write!(f, "({})/(", self.numerator)?;
        for r in &self.roots {
            match r.cmp(&0) {
                std::cmp::Ordering::Equal => write!(f, "N")?,
                std::cmp::Ordering::Greater => write!(f, "(N-{r})")?,
                std::cmp::Ordering::Less => write!(f, "(N+{})", -r)?,
            }
        }
        write!(f, ")")
    }
}
