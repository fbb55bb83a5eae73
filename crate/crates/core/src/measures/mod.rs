//! Scalar functionals of a bipartite state probed by local observables on A.

mod lqu;
mod report;
mod spectrum;

pub use lqu::{lqu_minimize, lqu_two_qubit, lqu_two_qubit_scaled, DEFAULT_RESTARTS};
pub use report::{measure, MeasureOptions, MeasureReport};
pub use spectrum::{optimal_spectrum, Spectrum};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    embed_local, hermitian_residual, partial_trace, sqrtm_psd, ComplexMatrix, DensityMatrix, Keep,
    StateVector, HERMITIAN_TOL,
};
use crate::states::{haar_unitary_with, RandomSeed};

/// Negative round-off below this magnitude is reported as zero.
pub const CLAMP_TOL: f64 = 1e-9;

fn clamp_nonneg(x: f64) -> f64 {
    if x < 0.0 && x > -CLAMP_TOL {
        0.0
    } else {
        x
    }
}

fn check_hermitian(h: &ComplexMatrix) -> Result<()> {
    let residual = hermitian_residual(h);
    if residual > HERMITIAN_TOL * (1.0 + h.norm()) {
        return Err(Error::NonHermitianInput { residual });
    }
    Ok(())
}

/// `Tr[X Y]` for square matrices of equal size, without forming the product.
fn trace_of_product(x: &ComplexMatrix, y: &ComplexMatrix) -> Complex64 {
    let n = x.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += x[(i, j)] * y[(j, i)];
        }
    }
    acc
}

/// Skew information of `rho` against a Hermitian `h`. `h` may act on the full
/// space or on A alone, in which case it is embedded as `h ⊗ 1_B`.
pub fn skew_information(rho: &DensityMatrix, h: &ComplexMatrix) -> Result<f64> {
    if !h.is_square() {
        return Err(Error::dims("observable must be square"));
    }
    check_hermitian(h)?;
    let full = if h.nrows() == rho.dim() {
        h.clone()
    } else if h.nrows() == rho.dim_a() {
        embed_local(h, rho.dim_b())
    } else {
        return Err(Error::dims(format!(
            "observable is {}x{}, state is {}x{} = {}",
            h.nrows(),
            h.ncols(),
            rho.dim_a(),
            rho.dim_b(),
            rho.dim()
        )));
    };
    let sq = sqrtm_psd(rho);
    Ok(skew_with_sqrt(rho.matrix(), &sq, &full))
}

fn skew_with_sqrt(rho: &ComplexMatrix, sq: &ComplexMatrix, h: &ComplexMatrix) -> f64 {
    let h2 = h * h;
    let sh = sq * h;
    let value = trace_of_product(rho, &h2).re - trace_of_product(&sh, &sh).re;
    clamp_nonneg(value).max(0.0)
}

/// Caches `√ρ` so that many local observables can be scored cheaply.
#[derive(Debug, Clone)]
pub struct LocalSkew {
    rho: ComplexMatrix,
    sqrt: ComplexMatrix,
    dim_b: usize,
}

impl LocalSkew {
    pub fn new(rho: &DensityMatrix) -> Self {
        LocalSkew {
            rho: rho.matrix().clone(),
            sqrt: sqrtm_psd(rho),
            dim_b: rho.dim_b(),
        }
    }

    /// `I(ρ, k ⊗ 1)` for a Hermitian `k` on A.
    pub fn eval(&self, k: &ComplexMatrix) -> f64 {
        skew_with_sqrt(&self.rho, &self.sqrt, &embed_local(k, self.dim_b))
    }

    /// `I(ρ, U Λ U^dagger ⊗ 1)`.
    pub fn eval_rotated(&self, u: &ComplexMatrix, lambda: &ComplexMatrix) -> f64 {
        self.eval(&(u * lambda * u.adjoint()))
    }
}

/// `N_A - Tr_B[(Tr_A √ρ)²]`, the state-dependent bracket of the average.
pub fn q_a(rho: &DensityMatrix) -> f64 {
    let sq = sqrtm_psd(rho);
    q_a_with_sqrt(rho, &sq)
}

fn q_a_with_sqrt(rho: &DensityMatrix, sq: &ComplexMatrix) -> f64 {
    let reduced = partial_trace(sq, rho.dim_a(), rho.dim_b(), Keep::B)
        .expect("sqrt has the state's dimensions");
    // reduced is Hermitian, so Tr[X²] is its squared Frobenius norm.
    rho.dim_a() as f64 - reduced.norm_squared()
}

fn check_spectrum(rho: &DensityMatrix, spec: &Spectrum) -> Result<()> {
    if spec.dim() != rho.dim_a() {
        return Err(Error::dims(format!(
            "spectrum has {} values, subsystem A has dimension {}",
            spec.dim(),
            rho.dim_a()
        )));
    }
    Ok(())
}

/// Haar average over local unitaries on A of `I(ρ, U Λ U^dagger ⊗ 1)`.
pub fn avsk(rho: &DensityMatrix, spec: &Spectrum) -> Result<f64> {
    check_spectrum(rho, spec)?;
    Ok(clamp_nonneg(spec.prefactor() * q_a(rho)).max(0.0))
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

/// Running mean and centred moments (Welford).
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Moments {
    pub n: usize,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn stderr(&self) -> f64 {
        (self.variance() / self.n as f64).sqrt()
    }
}

/// Direct sampling of the average with Haar unitaries on A.
pub fn avsk_monte_carlo(
    rho: &DensityMatrix,
    spec: &Spectrum,
    samples: usize,
    seed: RandomSeed,
) -> Result<McEstimate> {
    check_spectrum(rho, spec)?;
    if samples < 2 {
        return Err(Error::param("samples", "need at least 2 samples"));
    }
    let skew = LocalSkew::new(rho);
    let lambda = spec.diag_matrix();
    let mut rng = seed.rng();
    let mut acc = Moments::default();
    for _ in 0..samples {
        let u = haar_unitary_with(rho.dim_a(), &mut rng);
        acc.push(skew.eval_rotated(&u, &lambda));
    }
    Ok(McEstimate {
        mean: acc.mean,
        stderr: acc.stderr(),
        samples,
    })
}

fn check_unit(psi: &StateVector) -> Result<()> {
    let norm = psi.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized { norm });
    }
    Ok(())
}

/// `√(2 - 2 Tr[ρ_B²])` for a pure state.
pub fn concurrence_pure(psi: &StateVector, dim_a: usize, dim_b: usize) -> Result<f64> {
    check_unit(psi)?;
    let rho = DensityMatrix::from_pure(psi, dim_a, dim_b)?;
    let purity_b = rho.marginal_b().purity();
    Ok((2.0 - 2.0 * purity_b).max(0.0).sqrt())
}

/// Pure-state shortcut `prefactor · (N_A - 1 + C²/2)`.
pub fn avsk_pure_relation(psi: &StateVector, dim_a: usize, dim_b: usize, spec: &Spectrum) -> Result<f64> {
    if spec.dim() != dim_a {
        return Err(Error::dims("spectrum length must equal dim_a"));
    }
    let c = concurrence_pure(psi, dim_a, dim_b)?;
    Ok(spec.prefactor() * (dim_a as f64 - 1.0 + 0.5 * c * c))
}

/// Largest average reachable by separable states.
pub fn separable_cap(spec: &Spectrum) -> f64 {
    spec.prefactor() * (spec.dim() as f64 - 1.0)
}

/// True when the average exceeds the separable cap, which certifies
/// entanglement. Never fires on separable input.
pub fn entanglement_witness(rho: &DensityMatrix, spec: &Spectrum) -> Result<bool> {
    Ok(avsk(rho, spec)? > separable_cap(spec) + CLAMP_TOL)
}

/// Average minus its value on the product of marginals.
pub fn avsk_corr(rho: &DensityMatrix, spec: &Spectrum) -> Result<f64> {
    check_spectrum(rho, spec)?;
    let sq_a = sqrtm_psd(&rho.marginal_a());
    let tr_sq_a = sq_a.trace().re;
    let sq = sqrtm_psd(rho);
    let reduced = partial_trace(&sq, rho.dim_a(), rho.dim_b(), Keep::B)?;
    let value = spec.prefactor() * (tr_sq_a * tr_sq_a - reduced.norm_squared());
    Ok(clamp_nonneg(value).max(0.0))
}

/// Quantum Cramér-Rao sandwich `(1/(8I), 1/(4I))` on the single-shot
/// estimation error of a phase generated by `h`.
pub fn precision_bounds(rho: &DensityMatrix, h: &ComplexMatrix) -> Result<(f64, f64)> {
    let i = skew_information(rho, h)?;
    if i <= 1e-12 {
        return Err(Error::ZeroSusceptibility { value: i });
    }
    Ok((1.0 / (8.0 * i), 1.0 / (4.0 * i)))
}
