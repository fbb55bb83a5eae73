//! Dense complex linear algebra on small bipartite Hilbert spaces.
//!
//! Matrices are `nalgebra` dense matrices of `Complex64`. Bipartite indices
//! follow the Kronecker convention: basis state `|i>_A |j>_B` sits at row
//! `i * dim_b + j`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type StateVector = DVector<Complex64>;

/// Entrywise tolerance on `|M - M^dagger|` for Hermitian inputs.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Eigenvalues in `[-PSD_TOL, 0)` are treated as round-off and clamped.
pub const PSD_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;

pub fn cplx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn diag(values: &[f64]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(values.len(), values.len());
    for (i, &v) in values.iter().enumerate() {
        m[(i, i)] = cplx(v, 0.0);
    }
    m
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[cplx(0.0, 0.0), cplx(1.0, 0.0), cplx(1.0, 0.0), cplx(0.0, 0.0)])
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[cplx(0.0, 0.0), cplx(0.0, -1.0), cplx(0.0, 1.0), cplx(0.0, 0.0)])
}

pub fn pauli_z() -> ComplexMatrix {
    diag(&[1.0, -1.0])
}

/// Computational basis ket `|i>` in dimension `n`.
pub fn ket(n: usize, i: usize) -> StateVector {
    let mut v = StateVector::zeros(n);
    v[i] = cplx(1.0, 0.0);
    v
}

pub fn projector(v: &StateVector) -> ComplexMatrix {
    v * v.adjoint()
}

/// Largest entrywise deviation from Hermiticity.
pub fn hermitian_residual(m: &ComplexMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn ensure_hermitian(m: &ComplexMatrix) -> Result<()> {
    let residual = hermitian_residual(m);
    if residual > HERMITIAN_TOL {
        return Err(Error::NonHermitianInput { residual });
    }
    Ok(())
}

/// Kronecker product `a ⊗ b`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn tensor_vec(a: &StateVector, b: &StateVector) -> StateVector {
    a.kronecker(b)
}

/// `h ⊗ 1_B`, the embedding of a local observable on A.
pub fn embed_local(h: &ComplexMatrix, dim_b: usize) -> ComplexMatrix {
    tensor(h, &identity(dim_b))
}

pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.trace()
}

/// `Tr[a b]` without forming the product.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    assert_eq!(a.ncols(), b.nrows());
    assert_eq!(a.nrows(), b.ncols());
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: ComplexMatrix,
}

impl HermitianEig {
    /// Rebuild `V f(diag(values)) V^dagger`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for k in 0..n {
            let s = f(self.values[k]);
            for i in 0..n {
                scaled[(i, k)] *= s;
            }
        }
        let out = &scaled * self.vectors.adjoint();
        hermitize(&out)
    }
}

/// Eigendecomposition of a Hermitian matrix with ascending eigenvalues.
///
/// The underlying QL sweep is deterministic, so identical input bits give
/// identical output bits.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEig> {
    ensure_hermitian(m)?;
    let n = m.nrows();
    if n == 0 {
        return Ok(HermitianEig {
            values: vec![],
            vectors: ComplexMatrix::zeros(0, 0),
        });
    }
    let eig = nalgebra::SymmetricEigen::new(hermitize(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(HermitianEig { values, vectors })
}

/// `(m + m^dagger) / 2`.
pub fn hermitize(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Which factor of a bipartite operator survives a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    A,
    B,
}

/// Partial trace of an operator on `H_A ⊗ H_B`.
pub fn partial_trace(m: &ComplexMatrix, dim_a: usize, dim_b: usize, keep: Keep) -> Result<ComplexMatrix> {
    let d = dim_a * dim_b;
    if m.nrows() != d || m.ncols() != d {
        return Err(Error::dims(format!(
            "partial trace expects a {d}x{d} matrix for dims {dim_a}x{dim_b}, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let out = match keep {
        Keep::A => ComplexMatrix::from_fn(dim_a, dim_a, |i, k| {
            (0..dim_b).map(|j| m[(i * dim_b + j, k * dim_b + j)]).sum()
        }),
        Keep::B => ComplexMatrix::from_fn(dim_b, dim_b, |j, l| {
            (0..dim_a).map(|i| m[(i * dim_b + j, i * dim_b + l)]).sum()
        }),
    };
    Ok(out)
}

/// The flip operator `S |i>|j> = |j>|i>` on `H_X ⊗ H_X'`.
#[derive(Debug, Clone, PartialEq)]
pub struct SwapOperator {
    dim: usize,
    matrix: ComplexMatrix,
}

impl SwapOperator {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }
}

pub fn swap_operator(n: usize) -> SwapOperator {
    assert!(n >= 1, "swap operator needs n >= 1");
    let mut matrix = ComplexMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            matrix[(j * n + i, i * n + j)] = cplx(1.0, 0.0);
        }
    }
    SwapOperator { dim: n, matrix }
}

/// Positive semidefinite, unit-trace operator on `H_A ⊗ H_B`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityMatrix {
    dim_a: usize,
    dim_b: usize,
    #[serde(skip)]
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, positivity and unit trace. The stored matrix is
    /// the Hermitian part of the input.
    pub fn new(matrix: ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::dims("factor dimensions must be positive"));
        }
        let d = dim_a * dim_b;
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::dims(format!(
                "density matrix for {dim_a}x{dim_b} must be {d}x{d}, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        ensure_hermitian(&matrix)?;
        let matrix = hermitize(&matrix);
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::TraceNotOne { trace: tr });
        }
        let eig = hermitian_eig(&matrix)?;
        let min = eig.values.first().copied().unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::NotPositive { min_eigenvalue: min });
        }
        Ok(DensityMatrix { dim_a, dim_b, matrix })
    }

    /// Rescales a PSD matrix to unit trace before validating.
    pub fn normalized(matrix: ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<Self> {
        let tr = matrix.trace().re;
        if tr.is_nan() || tr <= 0.0 {
            return Err(Error::TraceNotOne { trace: tr });
        }
        Self::new(matrix.unscale(tr), dim_a, dim_b)
    }

    pub fn from_pure(psi: &StateVector, dim_a: usize, dim_b: usize) -> Result<Self> {
        let norm = psi.norm();
        if (norm - 1.0).abs() > TRACE_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Self::new(projector(psi), dim_a, dim_b)
    }

    pub fn product(rho_a: &DensityMatrix, rho_b: &DensityMatrix) -> Self {
        DensityMatrix {
            dim_a: rho_a.dim(),
            dim_b: rho_b.dim(),
            matrix: tensor(&rho_a.matrix, &rho_b.matrix),
        }
    }

    pub fn maximally_mixed(dim_a: usize, dim_b: usize) -> Self {
        let d = dim_a * dim_b;
        DensityMatrix {
            dim_a,
            dim_b,
            matrix: identity(d).unscale(d as f64),
        }
    }

    /// Convex combination `Σ w_i ρ_i`; weights must be a probability vector.
    pub fn mixture(weights: &[f64], states: &[DensityMatrix]) -> Result<Self> {
        if weights.len() != states.len() || states.is_empty() {
            return Err(Error::param("weights", "need one weight per state"));
        }
        if weights.iter().any(|&w| w < 0.0) || (weights.iter().sum::<f64>() - 1.0).abs() > TRACE_TOL {
            return Err(Error::param("weights", "must be nonnegative and sum to 1"));
        }
        let (da, db) = (states[0].dim_a, states[0].dim_b);
        let mut m = ComplexMatrix::zeros(da * db, da * db);
        for (w, s) in weights.iter().zip(states) {
            if (s.dim_a, s.dim_b) != (da, db) {
                return Err(Error::dims("mixture components have different dimensions"));
            }
            m += s.matrix.scale(*w);
        }
        Self::new(m, da, db)
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn eig(&self) -> HermitianEig {
        hermitian_eig(&self.matrix).expect("density matrices are Hermitian")
    }

    /// Eigenvalues, ascending, with round-off negatives clamped to zero.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eig().values.into_iter().map(|v| v.max(0.0)).collect()
    }

    pub fn rank(&self, tol: f64) -> usize {
        self.eigenvalues().iter().filter(|&&v| v > tol).count()
    }

    pub fn purity(&self) -> f64 {
        trace_product(&self.matrix, &self.matrix).re
    }

    pub fn marginal_a(&self) -> DensityMatrix {
        let m = partial_trace(&self.matrix, self.dim_a, self.dim_b, Keep::A).expect("dims match");
        DensityMatrix {
            dim_a: self.dim_a,
            dim_b: 1,
            matrix: hermitize(&m),
        }
    }

    pub fn marginal_b(&self) -> DensityMatrix {
        let m = partial_trace(&self.matrix, self.dim_a, self.dim_b, Keep::B).expect("dims match");
        DensityMatrix {
            dim_a: self.dim_b,
            dim_b: 1,
            matrix: hermitize(&m),
        }
    }

    /// `(W ⊗ V) ρ (W ⊗ V)^dagger` for a unitary acting on the whole space.
    pub fn conjugate(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::dims("conjugating unitary has the wrong size"));
        }
        Ok(DensityMatrix {
            dim_a: self.dim_a,
            dim_b: self.dim_b,
            matrix: hermitize(&(u * &self.matrix * u.adjoint())),
        })
    }

    /// Same matrix, factors relabelled `(dim_a, dim_b)`.
    pub fn with_dims(&self, dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a * dim_b != self.dim() {
            return Err(Error::dims("relabelled dims must keep the total dimension"));
        }
        Ok(DensityMatrix {
            dim_a,
            dim_b,
            matrix: self.matrix.clone(),
        })
    }
}

/// Eigenvalues of a unit-trace matrix below this are indistinguishable from
/// solver noise (a few ulps times the dimension).
pub const EIG_ZERO: f64 = 1e-14;

/// Principal square root of a density matrix.
///
/// Eigenvalues in `[-1e-10, 0)` are clamped to zero before the root is taken;
/// `DensityMatrix` construction already rejects anything more negative.
/// Eigenvalues at or below [`EIG_ZERO`] are treated as exact zeros, since the
/// square root would otherwise amplify `1e-16` noise to `1e-8`.
pub fn sqrtm_psd(rho: &DensityMatrix) -> ComplexMatrix {
    rho.eig().apply(|v| if v <= EIG_ZERO { 0.0 } else { v.sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2(a: [f64; 4]) -> ComplexMatrix {
        ComplexMatrix::from_row_slice(2, 2, &a.map(|x| cplx(x, 0.0)))
    }

    #[test]
    fn tensor_of_identities_and_sigma_z() {
        assert_eq!(tensor(&identity(2), &identity(2)), identity(4));
        assert_eq!(tensor(&pauli_z(), &identity(2)), diag(&[1.0, 1.0, -1.0, -1.0]));
    }

    #[test]
    fn eig_sorts_ascending() {
        let e = hermitian_eig(&diag(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
        let e = hermitian_eig(&pauli_x()).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = m2([0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(hermitian_eig(&m), Err(Error::NonHermitianInput { .. })));
    }

    #[test]
    fn sqrt_of_diagonal() {
        let rho = DensityMatrix::new(diag(&[0.25, 0.75]), 2, 1).unwrap();
        let s = sqrtm_psd(&rho);
        assert!(max_abs_diff(&s, &diag(&[0.5, 0.75f64.sqrt()])) < 1e-14);
    }

    #[test]
    fn density_rejects_bad_inputs() {
        assert!(matches!(
            DensityMatrix::new(diag(&[0.5, 0.6]), 2, 1),
            Err(Error::TraceNotOne { .. })
        ));
        assert!(matches!(
            DensityMatrix::new(diag(&[1.5, -0.5]), 2, 1),
            Err(Error::NotPositive { .. })
        ));
        assert!(matches!(
            DensityMatrix::new(diag(&[0.5, 0.5]), 2, 2),
            Err(Error::DimensionMismatch(_))
        ));
        // round-off negatives are tolerated
        assert!(DensityMatrix::new(diag(&[1.0 + 5e-11, -5e-11]), 2, 1).is_ok());
    }

    #[test]
    fn partial_trace_of_bell_and_product() {
        let s = 0.5f64.sqrt();
        let psi = StateVector::from_vec(vec![cplx(s, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0), cplx(s, 0.0)]);
        let bell = DensityMatrix::from_pure(&psi, 2, 2).unwrap();
        let half = identity(2).unscale(2.0);
        assert!(max_abs_diff(&partial_trace(bell.matrix(), 2, 2, Keep::A).unwrap(), &half) < 1e-15);
        assert!(max_abs_diff(&partial_trace(bell.matrix(), 2, 2, Keep::B).unwrap(), &half) < 1e-15);

        let ra = m2([0.7, 0.1, 0.1, 0.3]);
        let rb = diag(&[0.2, 0.8]);
        let prod = tensor(&ra, &rb);
        assert!(max_abs_diff(&partial_trace(&prod, 2, 2, Keep::A).unwrap(), &ra) < 1e-15);
        assert!(max_abs_diff(&partial_trace(&prod, 2, 2, Keep::B).unwrap(), &rb) < 1e-15);
        assert!(matches!(partial_trace(&prod, 3, 2, Keep::A), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn swap_basis_action() {
        let s = swap_operator(2);
        let v01 = tensor_vec(&ket(2, 0), &ket(2, 1));
        let v10 = tensor_vec(&ket(2, 1), &ket(2, 0));
        assert_eq!(s.matrix() * v01, v10);
        let s3 = swap_operator(3);
        assert!(max_abs_diff(&(s3.matrix() * s3.matrix()), &identity(9)) < 1e-15);
    }
}
