//! Special bipartite state families and seeded random samplers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{
    cplx, identity, ket, projector, swap_operator, tensor, ComplexMatrix, DensityMatrix,
    StateVector,
};

/// Master seed plus a stream counter. Each `(seed, stream)` pair drives an
/// independent ChaCha8 stream, so parallel workers never share state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RandomSeed {
    pub seed: u64,
    pub stream: u64,
}

impl RandomSeed {
    pub fn new(seed: u64) -> Self {
        RandomSeed { seed, stream: 0 }
    }

    pub fn with_stream(self, stream: u64) -> Self {
        RandomSeed { stream, ..self }
    }

    /// Derive a sub-stream; used to give every state index its own stream.
    pub fn derive(self, index: u64) -> Self {
        let mixed = self
            .stream
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .rotate_left(17)
            ^ index.wrapping_add(1).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        RandomSeed {
            seed: self.seed,
            stream: mixed,
        }
    }

    pub fn rng(self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> num_complex::Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    cplx(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    // fill row-major so the draw order does not depend on storage layout
    let mut m = ComplexMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = gaussian_complex(rng);
        }
    }
    m
}

/// Haar-random unitary: QR of a Ginibre matrix with the phases of `diag(R)`
/// moved into `Q`.
pub fn haar_unitary_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    assert!(n >= 1);
    let z = ginibre(n, n, rng);
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..n {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { cplx(1.0, 0.0) };
        for i in 0..n {
            q[(i, k)] *= phase;
        }
    }
    q
}

pub fn haar_unitary(n: usize, seed: RandomSeed) -> ComplexMatrix {
    haar_unitary_with(n, &mut seed.rng())
}

/// `ρ = G G^dagger / Tr[G G^dagger]` with `G` a `d × rank` Ginibre matrix.
pub fn random_density_with<R: Rng + ?Sized>(
    dim_a: usize,
    dim_b: usize,
    rank: usize,
    rng: &mut R,
) -> Result<DensityMatrix> {
    let d = dim_a * dim_b;
    if rank == 0 || rank > d {
        return Err(Error::InvalidRank { rank, dim: d });
    }
    let g = ginibre(d, rank, rng);
    DensityMatrix::normalized(&g * g.adjoint(), dim_a, dim_b)
}

pub fn random_density(dim_a: usize, dim_b: usize, rank: usize, seed: RandomSeed) -> Result<DensityMatrix> {
    random_density_with(dim_a, dim_b, rank, &mut seed.rng())
}

pub fn random_state_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> StateVector {
    let v = StateVector::from_fn(dim, |_, _| gaussian_complex(rng));
    let n = v.norm();
    v.unscale(n)
}

pub fn random_pure(dim_a: usize, dim_b: usize, seed: RandomSeed) -> DensityMatrix {
    let psi = random_state_vector(dim_a * dim_b, &mut seed.rng());
    DensityMatrix::from_pure(&psi, dim_a, dim_b).expect("normalized vector")
}

/// Flat-Dirichlet probability vector.
pub fn dirichlet_weights<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// Convex mixture of `terms` random product states with flat-Dirichlet
/// weights. Each local factor is an induced-measure state whose rank is drawn
/// uniformly, so pure local factors are reachable.
pub fn random_separable_with<R: Rng + ?Sized>(
    dim_a: usize,
    dim_b: usize,
    terms: usize,
    rng: &mut R,
) -> Result<DensityMatrix> {
    if terms == 0 {
        return Err(Error::param("terms", "need at least one product term"));
    }
    let weights = dirichlet_weights(terms, rng);
    let mut components = Vec::with_capacity(terms);
    for _ in 0..terms {
        let ra = rng.random_range(1..=dim_a);
        let rb = rng.random_range(1..=dim_b);
        let a = random_density_with(dim_a, 1, ra, rng)?;
        let b = random_density_with(dim_b, 1, rb, rng)?;
        components.push(DensityMatrix::product(&a, &b));
    }
    DensityMatrix::mixture(&weights, &components)
}

pub fn random_separable(dim_a: usize, dim_b: usize, terms: usize, seed: RandomSeed) -> Result<DensityMatrix> {
    random_separable_with(dim_a, dim_b, terms, &mut seed.rng())
}

/// `Σ_i |ii> / sqrt(n)`.
pub fn max_entangled_vector(n: usize) -> StateVector {
    let mut v = StateVector::zeros(n * n);
    let amp = 1.0 / (n as f64).sqrt();
    for i in 0..n {
        v[i * n + i] = cplx(amp, 0.0);
    }
    v
}

pub fn plus_ket() -> StateVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    StateVector::from_vec(vec![cplx(s, 0.0), cplx(s, 0.0)])
}

/// Two-qubit pure state `sqrt(c1)|00> + sqrt(1-c1)|11>`.
pub fn schmidt_vector(c1: f64) -> StateVector {
    let mut v = StateVector::zeros(4);
    v[0] = cplx(c1.sqrt(), 0.0);
    v[3] = cplx((1.0 - c1).sqrt(), 0.0);
    v
}

fn check_unit(field: &'static str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::param(field, format!("{p} is outside [0, 1]")));
    }
    Ok(())
}

fn check_probs(field: &'static str, probs: &[f64]) -> Result<()> {
    if probs.is_empty() || probs.iter().any(|&p| p.is_nan() || p < 0.0) {
        return Err(Error::param(field, "probabilities must be nonnegative"));
    }
    if (probs.iter().sum::<f64>() - 1.0).abs() > 1e-10 {
        return Err(Error::param(field, "probabilities must sum to 1"));
    }
    Ok(())
}

fn check_unitary(field: &'static str, u: &ComplexMatrix, n: usize) -> Result<()> {
    if u.nrows() != n || u.ncols() != n {
        return Err(Error::param(field, format!("basis must be {n}x{n}")));
    }
    let resid = crate::linalg::max_abs_diff(&(u.adjoint() * u), &identity(n));
    if resid > 1e-10 {
        return Err(Error::param(field, format!("basis is not unitary (residual {resid:e})")));
    }
    Ok(())
}

/// Every state family the library knows how to build.
#[derive(Debug, Clone)]
pub enum StateFamily {
    /// Maximally entangled `Σ|ii>/sqrt(n)` on `n × n`.
    Bell { dim: usize },
    /// `q · 2P_sym/(n(n+1)) + (1-q) · 2P_asym/(n(n-1))`.
    Werner { dim: usize, q: f64 },
    /// Fidelity `F` with the maximally entangled state, `U ⊗ U*` invariant.
    Isotropic { dim: usize, fidelity: f64 },
    /// `Σ_i p_i |i><i| ⊗ ρ_B^(i)`, where `|i>` are the columns of `basis_a`.
    ClassicalQuantum {
        probs: Vec<f64>,
        basis_a: ComplexMatrix,
        blocks_b: Vec<DensityMatrix>,
    },
    /// `Σ_ij p_ij |i><i| ⊗ |j><j|` in the given local bases.
    ClassicalClassical {
        joint: Vec<Vec<f64>>,
        basis_a: ComplexMatrix,
        basis_b: ComplexMatrix,
    },
    /// `Σ_i p_i ρ_A^(i) ⊗ |i><i|`, where `|i>` are the columns of `basis_b`.
    QuantumClassical {
        probs: Vec<f64>,
        blocks_a: Vec<DensityMatrix>,
        basis_b: ComplexMatrix,
    },
    /// `Σ_i p_i |ψ_i><ψ_i| ⊗ |i><i|` with arbitrary (non-orthogonal) pure `ψ_i`.
    PureQuantumClassical {
        probs: Vec<f64>,
        kets_a: Vec<StateVector>,
        basis_b: ComplexMatrix,
    },
    Product { a: DensityMatrix, b: DensityMatrix },
    /// `½|0><0|⊗|0><0| + ½|+><+|⊗|1><1|`.
    MaxDiscordant,
    /// Two-qubit pure state with Schmidt coefficient `c1`.
    Schmidt { c1: f64 },
    /// `(p|0><0| + (1-p) 1/2) ⊗ |0><0|`.
    FamilyProduct { p: f64 },
    /// `(1-p)/2 |0><0|⊗|0><0| + (1+p)/2 |+><+|⊗|1><1|`.
    FamilyPqc { p: f64 },
    /// `p/2 (|0><0|⊗|0><0| + |+><+|⊗|1><1|) + (1-p) 1/4`.
    FamilySep { p: f64 },
    /// Zero-discord line from `|0><0|⊗|0>`-vs-`|1>` blocks to `1/2 ⊗ |0><0|`:
    /// `½|0><0|⊗|0><0| + ½|1><1|⊗(p|0><0| + (1-p)|1><1|)`.
    CqLine { p: f64 },
    RandomGinibre {
        dim_a: usize,
        dim_b: usize,
        rank: usize,
        seed: RandomSeed,
    },
    RandomPure {
        dim_a: usize,
        dim_b: usize,
        seed: RandomSeed,
    },
}

impl StateFamily {
    pub fn tag(&self) -> &'static str {
        match self {
            StateFamily::Bell { .. } => "bell",
            StateFamily::Werner { .. } => "werner",
            StateFamily::Isotropic { .. } => "isotropic",
            StateFamily::ClassicalQuantum { .. } => "cq",
            StateFamily::ClassicalClassical { .. } => "cc",
            StateFamily::QuantumClassical { .. } => "qc",
            StateFamily::PureQuantumClassical { .. } => "pqc",
            StateFamily::Product { .. } => "product",
            StateFamily::MaxDiscordant => "max_discordant",
            StateFamily::Schmidt { .. } => "pure",
            StateFamily::FamilyProduct { .. } => "family_product",
            StateFamily::FamilyPqc { .. } => "family_pqc",
            StateFamily::FamilySep { .. } => "family_sep",
            StateFamily::CqLine { .. } => "cq_line",
            StateFamily::RandomGinibre { .. } => "random_ginibre",
            StateFamily::RandomPure { .. } => "random_pure",
        }
    }

    /// Build a one-parameter family from its CLI name. Two-qubit families
    /// ignore `dim`.
    pub fn from_name(name: &str, param: f64, dim: usize) -> Result<Self> {
        let fam = match name {
            "bell" => StateFamily::Bell { dim },
            "werner" => StateFamily::Werner { dim, q: param },
            "isotropic" => StateFamily::Isotropic { dim, fidelity: param },
            "max_discordant" | "max-discordant" => StateFamily::MaxDiscordant,
            "pure" | "pure-schmidt" | "schmidt" => StateFamily::Schmidt { c1: param },
            "family_product" | "product" => StateFamily::FamilyProduct { p: param },
            "family_pqc" | "pqc" => StateFamily::FamilyPqc { p: param },
            "family_sep" | "sep" => StateFamily::FamilySep { p: param },
            "cq-line" | "cq_line" | "cq" => StateFamily::CqLine { p: param },
            other => return Err(Error::param("family", format!("unknown family `{other}`"))),
        };
        Ok(fam)
    }
}

fn basis_projector(basis: &ComplexMatrix, i: usize) -> ComplexMatrix {
    projector(&basis.column(i).into_owned())
}

pub fn make_state(family: &StateFamily) -> Result<DensityMatrix> {
    match family {
        StateFamily::Bell { dim } => {
            if *dim < 2 {
                return Err(Error::param("dim", "needs dim >= 2"));
            }
            DensityMatrix::from_pure(&max_entangled_vector(*dim), *dim, *dim)
        }
        StateFamily::Werner { dim, q } => {
            check_unit("q", *q)?;
            let n = *dim;
            if n < 2 {
                return Err(Error::param("dim", "needs dim >= 2"));
            }
            let s = swap_operator(n).into_matrix();
            let id = identity(n * n);
            let sym = (&id + &s).scale(0.5);
            let asym = (&id - &s).scale(0.5);
            let nf = n as f64;
            let m = sym.scale(2.0 * q / (nf * (nf + 1.0))) + asym.scale(2.0 * (1.0 - q) / (nf * (nf - 1.0)));
            DensityMatrix::new(m, n, n)
        }
        StateFamily::Isotropic { dim, fidelity } => {
            check_unit("fidelity", *fidelity)?;
            let n = *dim;
            if n < 2 {
                return Err(Error::param("dim", "needs dim >= 2"));
            }
            let phi = projector(&max_entangled_vector(n));
            let id = identity(n * n);
            let d2 = (n * n) as f64;
            let m = (&id - &phi).scale((1.0 - fidelity) / (d2 - 1.0)) + phi.scale(*fidelity);
            DensityMatrix::new(m, n, n)
        }
        StateFamily::ClassicalQuantum {
            probs,
            basis_a,
            blocks_b,
        } => {
            check_probs("probs", probs)?;
            let na = basis_a.nrows();
            check_unitary("basis_a", basis_a, na)?;
            if probs.len() != na || blocks_b.len() != na {
                return Err(Error::param("probs", format!("need {na} probabilities and blocks")));
            }
            let nb = blocks_b[0].dim();
            let mut m = ComplexMatrix::zeros(na * nb, na * nb);
            for i in 0..na {
                if blocks_b[i].dim() != nb {
                    return Err(Error::param("blocks_b", "blocks have different dimensions"));
                }
                m += tensor(&basis_projector(basis_a, i), blocks_b[i].matrix()).scale(probs[i]);
            }
            DensityMatrix::new(m, na, nb)
        }
        StateFamily::ClassicalClassical {
            joint,
            basis_a,
            basis_b,
        } => {
            let na = basis_a.nrows();
            let nb = basis_b.nrows();
            check_unitary("basis_a", basis_a, na)?;
            check_unitary("basis_b", basis_b, nb)?;
            if joint.len() != na || joint.iter().any(|r| r.len() != nb) {
                return Err(Error::param("joint", format!("need a {na}x{nb} table")));
            }
            let flat: Vec<f64> = joint.iter().flatten().copied().collect();
            check_probs("joint", &flat)?;
            let mut m = ComplexMatrix::zeros(na * nb, na * nb);
            for (i, row) in joint.iter().enumerate() {
                for (j, &p) in row.iter().enumerate() {
                    m += tensor(&basis_projector(basis_a, i), &basis_projector(basis_b, j)).scale(p);
                }
            }
            DensityMatrix::new(m, na, nb)
        }
        StateFamily::QuantumClassical {
            probs,
            blocks_a,
            basis_b,
        } => {
            check_probs("probs", probs)?;
            let nb = basis_b.nrows();
            check_unitary("basis_b", basis_b, nb)?;
            if probs.len() > nb || blocks_a.len() != probs.len() {
                return Err(Error::param("probs", format!("need at most {nb} terms, one block each")));
            }
            let na = blocks_a[0].dim();
            let mut m = ComplexMatrix::zeros(na * nb, na * nb);
            for (i, (p, block)) in probs.iter().zip(blocks_a).enumerate() {
                if block.dim() != na {
                    return Err(Error::param("blocks_a", "blocks have different dimensions"));
                }
                m += tensor(block.matrix(), &basis_projector(basis_b, i)).scale(*p);
            }
            DensityMatrix::new(m, na, nb)
        }
        StateFamily::PureQuantumClassical { probs, kets_a, basis_b } => {
            let blocks = kets_a
                .iter()
                .map(|k| {
                    let norm = k.norm();
                    if (norm - 1.0).abs() > 1e-10 {
                        return Err(Error::NotNormalized { norm });
                    }
                    DensityMatrix::from_pure(k, k.len(), 1)
                })
                .collect::<Result<Vec<_>>>()?;
            make_state(&StateFamily::QuantumClassical {
                probs: probs.clone(),
                blocks_a: blocks,
                basis_b: basis_b.clone(),
            })
        }
        StateFamily::Product { a, b } => Ok(DensityMatrix::product(a, b)),
        StateFamily::MaxDiscordant => two_term_pqc(0.5, 0.5),
        StateFamily::Schmidt { c1 } => {
            check_unit("c1", *c1)?;
            DensityMatrix::from_pure(&schmidt_vector(*c1), 2, 2)
        }
        StateFamily::FamilyProduct { p } => {
            check_unit("p", *p)?;
            let a = projector(&ket(2, 0)).scale(*p) + identity(2).scale((1.0 - p) / 2.0);
            DensityMatrix::new(tensor(&a, &projector(&ket(2, 0))), 2, 2)
        }
        StateFamily::FamilyPqc { p } => {
            check_unit("p", *p)?;
            two_term_pqc((1.0 - p) / 2.0, (1.0 + p) / 2.0)
        }
        StateFamily::FamilySep { p } => {
            check_unit("p", *p)?;
            let disc = two_term_pqc(0.5, 0.5)?;
            let m = disc.matrix().scale(*p) + identity(4).scale((1.0 - p) / 4.0);
            DensityMatrix::new(m, 2, 2)
        }
        StateFamily::CqLine { p } => {
            check_unit("p", *p)?;
            let b1 = projector(&ket(2, 0)).scale(*p) + projector(&ket(2, 1)).scale(1.0 - p);
            let m = tensor(&projector(&ket(2, 0)), &projector(&ket(2, 0))).scale(0.5)
                + tensor(&projector(&ket(2, 1)), &b1).scale(0.5);
            DensityMatrix::new(m, 2, 2)
        }
        StateFamily::RandomGinibre {
            dim_a,
            dim_b,
            rank,
            seed,
        } => random_density(*dim_a, *dim_b, *rank, *seed),
        StateFamily::RandomPure { dim_a, dim_b, seed } => Ok(random_pure(*dim_a, *dim_b, *seed)),
    }
}

/// `w0 |0><0|⊗|0><0| + w1 |+><+|⊗|1><1|`.
fn two_term_pqc(w0: f64, w1: f64) -> Result<DensityMatrix> {
    make_state(&StateFamily::PureQuantumClassical {
        probs: vec![w0, w1],
        kets_a: vec![ket(2, 0), plus_ket()],
        basis_b: identity(2),
    })
}

/// Random CQ state: random local basis on A, Dirichlet weights, random
/// induced-measure blocks on B.
pub fn random_cq<R: Rng + ?Sized>(dim_a: usize, dim_b: usize, rng: &mut R) -> Result<DensityMatrix> {
    let basis_a = haar_unitary_with(dim_a, rng);
    let probs = dirichlet_weights(dim_a, rng);
    let blocks_b = (0..dim_a)
        .map(|_| {
            let r = rng.random_range(1..=dim_b);
            random_density_with(dim_b, 1, r, rng)
        })
        .collect::<Result<Vec<_>>>()?;
    make_state(&StateFamily::ClassicalQuantum {
        probs,
        basis_a,
        blocks_b,
    })
}

/// Random pQC state with one pure A-state per element of a random B basis.
pub fn random_pqc<R: Rng + ?Sized>(dim_a: usize, dim_b: usize, rng: &mut R) -> Result<DensityMatrix> {
    let basis_b = haar_unitary_with(dim_b, rng);
    let probs = dirichlet_weights(dim_b, rng);
    let kets_a = (0..dim_b).map(|_| random_state_vector(dim_a, rng)).collect();
    make_state(&StateFamily::PureQuantumClassical { probs, kets_a, basis_b })
}

/// Random Hermitian matrix, `(G + G^dagger)/2` with `G` Ginibre.
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(n, n, rng);
    (&g + g.adjoint()).scale(0.5)
}

/// Complex conjugate (entrywise), used for `U ⊗ U*` symmetry checks.
pub fn conj(m: &ComplexMatrix) -> ComplexMatrix {
    m.map(|z| z.conj())
}
