//! Haar moments over local unitaries on A: twirls, order-4 Weingarten
//! calculus, and the second moment of the skew information.

pub mod letters;
pub mod perm;
pub mod rational;
pub mod tables;
pub mod twirl;
pub mod weingarten;

use std::collections::BTreeMap;
use std::sync::LazyLock;

use serde::Serialize;

pub use letters::{letters, Letter, LetterValues};
pub use perm::{CycleClass, Perm4};
pub use rational::{Polynomial, Rational, RationalFunctionOfN};
pub use tables::{g2_value, g3_value};
pub use twirl::twirl2;
pub use weingarten::{
    weingarten4, weingarten4_exact, weingarten4_general, weingarten4_printed, weingarten4_rational, Irrep4,
};

use crate::error::{Error, Result};
use crate::linalg::DensityMatrix;
use crate::measures::{avsk, LocalSkew, Moments, Spectrum, CLAMP_TOL};
use crate::states::{haar_unitary_with, RandomSeed};
use rational::q;
use tables::{g2_letter, g3_term, Multiplier};

/// Power-sum invariants of a traceless spectrum that survive in the sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SpectralInvariant {
    /// `Tr[Λ⁴]`, from `τσ` a four-cycle.
    P4,
    /// `Tr[Λ²]²`, from `τσ` a double transposition.
    P22,
}

impl SpectralInvariant {
    fn of_class(cls: CycleClass) -> Option<Self> {
        // A traceless spectrum kills every class with a fixed point.
        match cls {
            CycleClass::FourCycle => Some(SpectralInvariant::P4),
            CycleClass::DoubleTransposition => Some(SpectralInvariant::P22),
            _ => None,
        }
    }
}

type Key = (Letter, SpectralInvariant);

/// `Σ_{σ,τ} Wg(σ) F(τσ) (G₂(τ) - 2 G₃(τ))` collected as
/// `Σ_{λ, letter, p} coeff(N) · p · letter`.
///
/// `Wg` is expanded over S₄ irreps, so each coefficient belongs to one irrep
/// `λ` and carries the factor `1/s_λ(1^N)`. Its poles sit at `N < ℓ(λ)`,
/// exactly where the `λ`-isotypic part of `(C^N)^{⊗4}` is empty and the
/// spectral projection multiplying it vanishes. Dropping those irreps is the
/// exact cancellation; every kept coefficient is finite.
#[derive(Debug, Clone)]
pub struct LetterForm {
    by_irrep: BTreeMap<Irrep4, BTreeMap<Key, RationalFunctionOfN>>,
}

impl LetterForm {
    fn build() -> Self {
        let perms = Perm4::all();
        let mut by_irrep = BTreeMap::new();
        for lam in Irrep4::ALL {
            let d = lam.dim() as i128;
            let scale = lam.inverse_unitary_dim().scale(Rational::new(d * d, 576));
            let mut polys: BTreeMap<Key, Polynomial> = BTreeMap::new();
            for &tau in &perms {
                let mut weights: BTreeMap<SpectralInvariant, i128> = BTreeMap::new();
                for &sigma in &perms {
                    if let Some(p) = SpectralInvariant::of_class(tau.compose(sigma).cycle_class()) {
                        *weights.entry(p).or_default() += lam.character(sigma.cycle_class()) as i128;
                    }
                }
                let (mult, l3) = g3_term(tau);
                let g3_poly = match mult {
                    Multiplier::One => Polynomial::from_ints(&[-2]),
                    Multiplier::Dim => Polynomial::from_ints(&[0, -2]),
                };
                for (p, w) in weights {
                    if w == 0 {
                        continue;
                    }
                    let e2 = polys.entry((g2_letter(tau), p)).or_default();
                    *e2 = &*e2 + &Polynomial::from_ints(&[w]);
                    let e3 = polys.entry((l3, p)).or_default();
                    *e3 = &*e3 + &g3_poly.scale(q(w));
                }
            }
            let coeffs = polys
                .into_iter()
                .filter(|(_, poly)| !poly.is_zero())
                .map(|(k, poly)| (k, &scale * &RationalFunctionOfN::polynomial(poly)))
                .collect();
            by_irrep.insert(lam, coeffs);
        }
        LetterForm { by_irrep }
    }

    pub fn shared() -> &'static LetterForm {
        static FORM: LazyLock<LetterForm> = LazyLock::new(LetterForm::build);
        &FORM
    }

    pub fn irrep_coefficients(&self, lam: Irrep4) -> &BTreeMap<Key, RationalFunctionOfN> {
        &self.by_irrep[&lam]
    }

    /// Sum over all irreps: the coefficient a literal reading of the
    /// Weingarten table would give. Carries poles at small `N`.
    pub fn unsplit(&self, key: Key) -> RationalFunctionOfN {
        self.by_irrep.values().fold(RationalFunctionOfN::zero(), |acc, m| match m.get(&key) {
            Some(c) => &acc + c,
            None => acc,
        })
    }

    /// Irreps whose isotypic component exists for `C^n`.
    pub fn supported(n: usize) -> impl Iterator<Item = Irrep4> {
        Irrep4::ALL.into_iter().filter(move |l| l.length() <= n)
    }

    /// Coefficients with the unsupported irreps dropped; `None` if a pole
    /// survives at `n`.
    pub fn reduced_at(&self, n: usize) -> Option<BTreeMap<Key, Rational>> {
        let mut out: BTreeMap<Key, Rational> = BTreeMap::new();
        for lam in Self::supported(n) {
            for (key, c) in &self.by_irrep[&lam] {
                let v = c.eval(n as i64).ok()?;
                *out.entry(*key).or_insert_with(|| q(0)) += v;
            }
        }
        Some(out)
    }

    fn evaluate(&self, n: usize, letters: &LetterValues, p4: f64, p22: f64) -> f64 {
        let coeffs = self
            .reduced_at(n)
            .unwrap_or_else(|| panic!("residual pole in the fourth-moment coefficients at N = {n}"));
        coeffs
            .iter()
            .map(|((letter, p), c)| {
                let pv = match p {
                    SpectralInvariant::P4 => p4,
                    SpectralInvariant::P22 => p22,
                };
                rational::rational_to_f64(c) * pv * letters.get(*letter)
            })
            .sum()
    }
}

/// Haar average of `I(ρ, U Λ U^dagger ⊗ 1)²`.
pub fn second_moment(rho: &DensityMatrix, spec: &Spectrum) -> Result<f64> {
    if spec.dim() != rho.dim_a() {
        return Err(Error::dims("spectrum length must equal dim_a"));
    }
    let n = rho.dim_a();
    let nf = n as f64;
    let p2 = spec.traceless_power_sum(2);
    let p4 = spec.traceless_power_sum(4);
    let l = letters(rho);

    // Tr[ρ Λ² ⊗ 1]² averaged, through the order-2 twirl of Λ² ⊗ Λ².
    let den = nf * (nf * nf - 1.0);
    let a = (nf * p2 * p2 - p4) / den;
    let b = (nf * p4 - p2 * p2) / den;
    let first = a + b * l.b;

    Ok(first + LetterForm::shared().evaluate(n, &l, p4, p2 * p2))
}

/// `E[I²] - E[I]²`, clamped at zero within round-off.
pub fn variance(rho: &DensityMatrix, spec: &Spectrum) -> Result<f64> {
    let mean = avsk(rho, spec)?;
    if mean == 0.0 {
        // The integrand is nonnegative, so a zero mean means it vanishes
        // identically; the letter sum would only contribute round-off.
        return Ok(0.0);
    }
    let v = second_moment(rho, spec)? - mean * mean;
    Ok(if v < 0.0 && v > -CLAMP_TOL { 0.0 } else { v })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VarianceEstimate {
    pub samples: usize,
    pub mean: f64,
    pub mean_stderr: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    pub variance_stderr: f64,
    pub second_moment: f64,
    pub second_moment_stderr: f64,
}

pub fn variance_monte_carlo(
    rho: &DensityMatrix,
    spec: &Spectrum,
    samples: usize,
    seed: RandomSeed,
) -> Result<VarianceEstimate> {
    if spec.dim() != rho.dim_a() {
        return Err(Error::dims("spectrum length must equal dim_a"));
    }
    if samples < 4 {
        return Err(Error::param("samples", "need at least 4 samples"));
    }
    let skew = LocalSkew::new(rho);
    let lambda = spec.diag_matrix();
    let mut rng = seed.rng();
    let values: Vec<f64> = (0..samples)
        .map(|_| {
            let u = haar_unitary_with(rho.dim_a(), &mut rng);
            skew.eval_rotated(&u, &lambda)
        })
        .collect();

    let mut first = Moments::default();
    let mut squares = Moments::default();
    for &v in &values {
        first.push(v);
        squares.push(v * v);
    }
    let nf = samples as f64;
    let mean = first.mean;
    let m2 = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / nf;
    let m4 = values.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / nf;
    let var_of_var = (m4 - m2 * m2 * (nf - 3.0) / (nf - 1.0)) / nf;
    Ok(VarianceEstimate {
        samples,
        mean,
        mean_stderr: first.stderr(),
        variance: first.variance(),
        variance_stderr: var_of_var.max(0.0).sqrt(),
        second_moment: squares.mean,
        second_moment_stderr: squares.stderr(),
    })
}

/// Variance at which the printed upper bound switches branch.
pub const BOUND_SPLIT: f64 = 1.0 / 45.0;

/// Two-sided bounds on the two-qubit LQU (`σ_z` on A) from the first two
/// moments.
///
/// The three eigen-skews `x₁ ≤ x₂ ≤ x₃` of the local skew form have mean
/// `avsk` and `Σ (x_i - avsk)² = 15Δ/2`, and all lie in `[0, 1]`. The lower
/// bound puts `x₂ = x₃`. The upper bound puts `x₁ = x₂` until `x₃` would
/// exceed 1, then pins `x₃ = 1`.
pub fn lqu_bounds(avsk: f64, variance: f64) -> (f64, f64) {
    let v = variance.max(0.0);
    let lower = (avsk - (5.0 * v).sqrt()).max(0.0);
    let room = 1.0 - avsk;
    let upper = if 5.0 * v <= room * room {
        avsk - 0.5 * (5.0 * v).sqrt()
    } else {
        0.5 * (3.0 * avsk - 1.0) - 0.5 * (15.0 * v - 3.0 * room * room).max(0.0).sqrt()
    };
    (lower, upper)
}

/// The bounds with the commonly quoted second branch
/// `avsk - 1/3 - sqrt(15Δ - 1/3)` above [`BOUND_SPLIT`]. That branch
/// undershoots the LQU of pure states, so it is kept for comparison only.
pub fn lqu_bounds_printed(avsk: f64, variance: f64) -> (f64, f64) {
    let v = variance.max(0.0);
    let lower = (avsk - (5.0 * v).sqrt()).max(0.0);
    let upper = if v <= BOUND_SPLIT {
        avsk - 0.5 * (5.0 * v).sqrt()
    } else {
        avsk - 1.0 / 3.0 - (15.0 * v - 1.0 / 3.0).sqrt()
    };
    (lower, upper)
}

/// `E[U_{i₁j₁}⋯U_{i₄j₄} conj(U_{i'₁j'₁}⋯U_{i'₄j'₄})]` over Haar `U(n)`.
pub fn haar_moment4(i: [usize; 4], j: [usize; 4], ip: [usize; 4], jp: [usize; 4], n: usize) -> Result<Rational> {
    if [i, j, ip, jp].iter().flatten().any(|&k| k >= n) {
        return Err(Error::param("index", format!("indices must be below n = {n}")));
    }
    let perms = Perm4::all();
    let mut total = q(0);
    for &sigma in &perms {
        if !(0..4).all(|k| i[k] == ip[sigma.apply(k)]) {
            continue;
        }
        for &tau in &perms {
            if !(0..4).all(|k| j[k] == jp[tau.apply(k)]) {
                continue;
            }
            total += weingarten4_general(tau.compose(sigma.inverse()), n)?;
        }
    }
    Ok(total)
}
