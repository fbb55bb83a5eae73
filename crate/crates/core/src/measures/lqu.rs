use argmin::core::{CostFunction, Executor};
use argmin::solver::neldermead::NelderMead;
use nalgebra::{Matrix3, SymmetricEigen};
use num_complex::Complex64;

use super::{LocalSkew, Spectrum};
use crate::error::{Error, Result};
use crate::linalg::{embed_local, hermitian_eig, pauli_x, pauli_y, pauli_z, sqrtm_psd, ComplexMatrix, DensityMatrix};
use crate::states::{haar_unitary_with, RandomSeed};

pub const DEFAULT_RESTARTS: usize = 32;

const MAX_ITERS: u64 = 4000;
const SD_TOL: f64 = 1e-15;

/// Closed form for a qubit probed with `σ_z`-like observables:
/// `1 - λ_max(W)`, `W_ij = Tr[√ρ (σ_i ⊗ 1) √ρ (σ_j ⊗ 1)]`.
pub fn lqu_two_qubit(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim_a() != 2 || rho.dim_b() != 2 {
        return Err(Error::dims(format!(
            "closed form needs 2x2, got {}x{}",
            rho.dim_a(),
            rho.dim_b()
        )));
    }
    let sq = sqrtm_psd(rho);
    let sigmas = [pauli_x(), pauli_y(), pauli_z()].map(|s| embed_local(&s, 2));
    let prods: Vec<ComplexMatrix> = sigmas.iter().map(|s| &sq * s).collect();
    let mut w = Matrix3::<f64>::zeros();
    for i in 0..3 {
        for j in i..3 {
            let v = (&prods[i] * &prods[j]).trace().re;
            w[(i, j)] = v;
            w[(j, i)] = v;
        }
    }
    let top = SymmetricEigen::new(w).eigenvalues.max();
    Ok((1.0 - top).max(0.0))
}

/// Closed form rescaled to an arbitrary qubit spectrum `{λ₁, λ₂}`, which is
/// `((λ₁ - λ₂)/2)² σ_z` up to an irrelevant shift.
pub fn lqu_two_qubit_scaled(rho: &DensityMatrix, spec: &Spectrum) -> Result<f64> {
    if spec.dim() != 2 {
        return Err(Error::dims("closed form needs a two-level spectrum"));
    }
    let half_gap = 0.5 * (spec.values()[0] - spec.values()[1]);
    Ok(half_gap * half_gap * lqu_two_qubit(rho)?)
}

/// Traceless Hermitian basis of `su(n)`: symmetric, antisymmetric, diagonal.
fn gell_mann(n: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(n * n - 1);
    for j in 0..n {
        for k in j + 1..n {
            let mut s = ComplexMatrix::zeros(n, n);
            s[(j, k)] = Complex64::new(1.0, 0.0);
            s[(k, j)] = Complex64::new(1.0, 0.0);
            out.push(s);
            let mut a = ComplexMatrix::zeros(n, n);
            a[(j, k)] = Complex64::new(0.0, -1.0);
            a[(k, j)] = Complex64::new(0.0, 1.0);
            out.push(a);
        }
    }
    for l in 1..n {
        let norm = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut d = ComplexMatrix::zeros(n, n);
        for j in 0..l {
            d[(j, j)] = Complex64::new(norm, 0.0);
        }
        d[(l, l)] = Complex64::new(-(l as f64) * norm, 0.0);
        out.push(d);
    }
    out
}

/// `exp(i x)` for Hermitian `x`.
fn expi(x: &ComplexMatrix) -> ComplexMatrix {
    let eig = hermitian_eig(x).expect("generator combination is Hermitian");
    let n = eig.values.len();
    let mut scaled = eig.vectors.clone();
    for k in 0..n {
        let phase = Complex64::from_polar(1.0, eig.values[k]);
        for i in 0..n {
            scaled[(i, k)] *= phase;
        }
    }
    scaled * eig.vectors.adjoint()
}

struct RotatedSkew<'a> {
    skew: &'a LocalSkew,
    base: ComplexMatrix,
    lambda: &'a ComplexMatrix,
    generators: &'a [ComplexMatrix],
}

impl RotatedSkew<'_> {
    fn unitary(&self, theta: &[f64]) -> ComplexMatrix {
        let n = self.base.nrows();
        let mut x = ComplexMatrix::zeros(n, n);
        for (t, g) in theta.iter().zip(self.generators) {
            x += g.scale(*t);
        }
        &self.base * expi(&x)
    }
}

impl CostFunction for RotatedSkew<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, theta: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        Ok(self.skew.eval_rotated(&self.unitary(theta), self.lambda))
    }
}

fn descend(problem: RotatedSkew<'_>, step: f64) -> (f64, ComplexMatrix) {
    let dim = problem.generators.len();
    let mut simplex = vec![vec![0.0; dim]];
    for k in 0..dim {
        let mut v = vec![0.0; dim];
        v[k] = step;
        simplex.push(v);
    }
    let solver = NelderMead::new(simplex)
        .with_sd_tolerance(SD_TOL)
        .expect("tolerance is nonnegative");
    let result = Executor::new(problem, solver)
        .configure(|s| s.max_iters(MAX_ITERS))
        .run()
        .expect("cost evaluation cannot fail");
    let best = result.state.best_param.clone().unwrap_or_else(|| vec![0.0; dim]);
    let u = result.problem.problem.as_ref().expect("problem is kept").unitary(&best);
    (result.state.best_cost, u)
}

/// Minimum of `I(ρ, U Λ U^dagger ⊗ 1)` over `U ∈ U(N_A)` by multi-start
/// Nelder-Mead over `U = U₀ exp(i Σ θ_k G_k)` with Haar-random `U₀`.
///
/// A local method, so the result is an upper bound on the true minimum.
pub fn lqu_minimize(rho: &DensityMatrix, spec: &Spectrum, restarts: usize, seed: RandomSeed) -> Result<f64> {
    if spec.dim() != rho.dim_a() {
        return Err(Error::dims("spectrum length must equal dim_a"));
    }
    if restarts == 0 {
        return Err(Error::param("restarts", "need at least one start"));
    }
    if spec.is_degenerate(1e-12) {
        return Err(Error::DegenerateSpectrum);
    }
    let skew = LocalSkew::new(rho);
    let lambda = spec.diag_matrix();
    let generators = gell_mann(rho.dim_a());
    let mut best = (f64::INFINITY, ComplexMatrix::identity(rho.dim_a(), rho.dim_a()));
    for r in 0..restarts {
        let mut rng = seed.derive(r as u64).rng();
        let base = haar_unitary_with(rho.dim_a(), &mut rng);
        let problem = RotatedSkew {
            skew: &skew,
            base,
            lambda: &lambda,
            generators: &generators,
        };
        let found = descend(problem, 0.5);
        if found.0 < best.0 {
            best = found;
        }
    }
    // Polish from the winner with a tighter simplex.
    let problem = RotatedSkew {
        skew: &skew,
        base: best.1.clone(),
        lambda: &lambda,
        generators: &generators,
    };
    let polished = descend(problem, 0.05);
    Ok(best.0.min(polished.0).max(0.0))
}
