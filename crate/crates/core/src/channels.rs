//! Kraus channels and their action on one side of a bipartite state.

use crate::error::{Error, Result};
use crate::linalg::{cplx, identity, max_abs_diff, tensor, ComplexMatrix, DensityMatrix};

#[derive(Debug, Clone)]
pub struct Channel {
    kraus: Vec<ComplexMatrix>,
}

impl Channel {
    /// Checks `Σ K†K = 1`.
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let Some(first) = kraus.first() else {
            return Err(Error::param("kraus", "needs at least one operator"));
        };
        let d = first.ncols();
        if kraus.iter().any(|k| k.nrows() != d || k.ncols() != d) {
            return Err(Error::dims("Kraus operators must share one square shape"));
        }
        let sum = kraus
            .iter()
            .fold(ComplexMatrix::zeros(d, d), |acc, k| acc + k.adjoint() * k);
        let resid = max_abs_diff(&sum, &identity(d));
        if resid > 1e-10 {
            return Err(Error::param("kraus", format!("not trace preserving (residual {resid:e})")));
        }
        Ok(Channel { kraus })
    }

    /// `ρ ↦ (1-p) ρ + p 1/d`, for `p ∈ [0, 1]`.
    pub fn depolarizing(dim: usize, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::param("p", "must lie in [0, 1]"));
        }
        if dim == 0 {
            return Err(Error::param("dim", "must be positive"));
        }
        // Uniform mixture of the d² Weyl operators realizes the full twirl.
        let d = dim;
        let omega = |k: usize| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / d as f64;
            cplx(t.cos(), t.sin())
        };
        let mut kraus = vec![identity(d).scale((1.0 - p + p / (d * d) as f64).sqrt())];
        let w = (p / (d * d) as f64).sqrt();
        for a in 0..d {
            for b in 0..d {
                if a == 0 && b == 0 {
                    continue;
                }
                let mut k = ComplexMatrix::zeros(d, d);
                for j in 0..d {
                    k[((j + a) % d, j)] = omega(b * j % d) * w;
                }
                kraus.push(k);
            }
        }
        Channel::new(kraus)
    }

    /// Qubit decay `|1> → |0>` with probability `gamma`.
    pub fn amplitude_damping(gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::param("gamma", "must lie in [0, 1]"));
        }
        let mut k0 = ComplexMatrix::zeros(2, 2);
        k0[(0, 0)] = cplx(1.0, 0.0);
        k0[(1, 1)] = cplx((1.0 - gamma).sqrt(), 0.0);
        let mut k1 = ComplexMatrix::zeros(2, 2);
        k1[(0, 1)] = cplx(gamma.sqrt(), 0.0);
        Channel::new(vec![k0, k1])
    }

    pub fn dim(&self) -> usize {
        self.kraus[0].nrows()
    }

    /// `(1 ⊗ Φ)(ρ)`.
    pub fn apply_on_b(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim_b() != self.dim() {
            return Err(Error::dims(format!(
                "channel acts on dimension {}, subsystem B has {}",
                self.dim(),
                rho.dim_b()
            )));
        }
        let id = identity(rho.dim_a());
        let n = rho.dim();
        let out = self.kraus.iter().fold(ComplexMatrix::zeros(n, n), |acc, k| {
            let big = tensor(&id, k);
            acc + &big * rho.matrix() * big.adjoint()
        });
        DensityMatrix::new(out, rho.dim_a(), rho.dim_b())
    }
}
