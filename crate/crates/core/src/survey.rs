//! Batch runs: random scatters over state space and one-parameter sweeps
//! along the boundary families.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::DensityMatrix;
use crate::measures::{measure, separable_cap, MeasureOptions, Spectrum, CLAMP_TOL, DEFAULT_RESTARTS};
use crate::moments::variance;
use crate::states::{make_state, random_density, random_pure, random_separable, RandomSeed, StateFamily};

/// Slack on the separable LQU cap; the closed form goes through an
/// eigendecomposition and loses a few digits.
pub const LQU_CAP_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ScatterMode {
    /// Ginibre-induced mixed states; `rank = None` means full rank.
    Ginibre { rank: Option<usize> },
    Pure,
    /// Convex mixtures of `terms` random product states.
    Separable { terms: usize },
    /// A named one-parameter family, at `param` or with the parameter drawn
    /// uniformly over its range.
    Family { name: String, param: Option<f64> },
}

impl ScatterMode {
    pub fn is_separable(&self) -> bool {
        match self {
            ScatterMode::Separable { .. } => true,
            ScatterMode::Family { name, .. } => BoundaryFamily::parse(name).is_ok_and(|f| f.is_separable()),
            _ => false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub dims: (usize, usize),
    pub count: usize,
    pub seed: RandomSeed,
    pub spectrum: Spectrum,
    pub with_variance: bool,
    pub mode: ScatterMode,
    pub restarts: usize,
}

impl RunConfig {
    pub fn new(dims: (usize, usize), count: usize, seed: u64, spectrum: Spectrum) -> Result<Self> {
        let cfg = RunConfig {
            dims,
            count,
            seed: RandomSeed::new(seed),
            spectrum,
            with_variance: false,
            mode: ScatterMode::Ginibre { rank: None },
            restarts: DEFAULT_RESTARTS,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let (na, nb) = self.dims;
        if na < 2 || nb < 1 {
            return Err(Error::param("dims", format!("need at least 2x1, got {na}x{nb}")));
        }
        if self.count == 0 {
            return Err(Error::param("count", "must be at least 1"));
        }
        if self.spectrum.dim() != na {
            return Err(Error::param(
                "spectrum",
                format!("has {} values but subsystem A has dimension {na}", self.spectrum.dim()),
            ));
        }
        if self.restarts == 0 {
            return Err(Error::param("restarts", "must be at least 1"));
        }
        match &self.mode {
            ScatterMode::Ginibre { rank: Some(r) } if *r == 0 || *r > na * nb => {
                return Err(Error::InvalidRank { rank: *r, dim: na * nb });
            }
            ScatterMode::Separable { terms: 0 } => return Err(Error::param("terms", "must be at least 1")),
            ScatterMode::Family { name, param } => {
                let fam = BoundaryFamily::parse(name)?;
                if self.dims != (2, 2) {
                    return Err(Error::param("dims", format!("family `{}` is two-qubit only", fam.name())));
                }
                let (lo, hi) = fam.range();
                if let Some(p) = param {
                    if !(lo..=hi).contains(p) {
                        return Err(Error::param("param", format!("must lie in [{lo}, {hi}]")));
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }

    fn sample(&self, index: u64) -> Result<(DensityMatrix, String)> {
        let (na, nb) = self.dims;
        let seed = self.seed.derive(index);
        match &self.mode {
            ScatterMode::Ginibre { rank } => {
                let r = rank.unwrap_or(na * nb);
                Ok((random_density(na, nb, r, seed)?, "random_ginibre".to_string()))
            }
            ScatterMode::Pure => Ok((random_pure(na, nb, seed), "random_pure".to_string())),
            ScatterMode::Separable { terms } => {
                Ok((random_separable(na, nb, *terms, seed)?, "random_separable".to_string()))
            }
            ScatterMode::Family { name, param } => {
                use rand::Rng;
                let fam = BoundaryFamily::parse(name)?;
                let (lo, hi) = fam.range();
                let p = param.unwrap_or_else(|| lo + (hi - lo) * seed.rng().random::<f64>());
                let rho = fam.state(p)?;
                Ok((rho, fam.name().to_string()))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ScatterRow {
    pub state_id: u64,
    pub family_tag: String,
    pub lqu: Option<f64>,
    pub avsk: f64,
    pub variance: Option<f64>,
    pub purity_a: f64,
    pub purity_b: f64,
    pub witness_entangled: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ColumnRange {
    pub min: f64,
    pub max: f64,
}

impl ColumnRange {
    fn of(values: impl Iterator<Item = f64>) -> Option<Self> {
        values.fold(None, |acc, v| match acc {
            None => Some(ColumnRange { min: v, max: v }),
            Some(r) => Some(ColumnRange {
                min: r.min.min(v),
                max: r.max.max(v),
            }),
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ViolationCounts {
    /// `lqu > avsk`.
    pub ordering: usize,
    /// `avsk` above the largest value any state reaches.
    pub ceiling: usize,
    /// Separable mode only: `avsk` above the separable cap.
    pub separable_avsk: usize,
    /// Separable mode with a qubit on A: `lqu` above its separable cap.
    pub separable_lqu: usize,
    /// Separable mode only: witness fired.
    pub witness: usize,
}

impl ViolationCounts {
    pub fn total(&self) -> usize {
        self.ordering + self.ceiling + self.separable_avsk + self.separable_lqu + self.witness
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatterSummary {
    pub count: usize,
    pub lqu: Option<ColumnRange>,
    pub avsk: Option<ColumnRange>,
    pub variance: Option<ColumnRange>,
    pub purity_a: Option<ColumnRange>,
    pub purity_b: Option<ColumnRange>,
    pub witness_fired: usize,
    pub violations: ViolationCounts,
}

/// Largest average over all states of the given dimensions. The average is
/// convex, so the maximum sits on a pure state, where it is
/// `prefactor · (N_A - Tr ρ_B²)` and `Tr ρ_B² ≥ 1/min(N_A, N_B)`.
pub fn avsk_ceiling(spec: &Spectrum, dims: (usize, usize)) -> f64 {
    let m = dims.0.min(dims.1) as f64;
    spec.prefactor() * (dims.0 as f64 - 1.0 / m)
}

/// LQU cap for separable states with a qubit on A: half the squared half-gap.
pub fn separable_lqu_cap(spec: &Spectrum) -> Option<f64> {
    if spec.dim() != 2 {
        return None;
    }
    let gap = (spec.values()[0] - spec.values()[1]) / 2.0;
    Some(0.5 * gap * gap)
}

pub fn count_violations(rows: &[ScatterRow], cfg: &RunConfig) -> ViolationCounts {
    let spec = &cfg.spectrum;
    let ceiling = avsk_ceiling(spec, cfg.dims);
    let sep = cfg.mode.is_separable();
    let sep_cap = separable_cap(spec);
    let lqu_cap = separable_lqu_cap(spec);
    let mut v = ViolationCounts::default();
    for r in rows {
        if r.lqu.is_some_and(|l| l > r.avsk + CLAMP_TOL) {
            v.ordering += 1;
        }
        if r.avsk > ceiling + CLAMP_TOL {
            v.ceiling += 1;
        }
        if sep {
            if r.avsk > sep_cap + CLAMP_TOL {
                v.separable_avsk += 1;
            }
            if let (Some(l), Some(cap)) = (r.lqu, lqu_cap) {
                if l > cap + LQU_CAP_TOL {
                    v.separable_lqu += 1;
                }
            }
            if r.witness_entangled {
                v.witness += 1;
            }
        }
    }
    v
}

pub fn summarize(rows: &[ScatterRow], cfg: &RunConfig) -> ScatterSummary {
    ScatterSummary {
        count: rows.len(),
        lqu: ColumnRange::of(rows.iter().filter_map(|r| r.lqu)),
        avsk: ColumnRange::of(rows.iter().map(|r| r.avsk)),
        variance: ColumnRange::of(rows.iter().filter_map(|r| r.variance)),
        purity_a: ColumnRange::of(rows.iter().map(|r| r.purity_a)),
        purity_b: ColumnRange::of(rows.iter().map(|r| r.purity_b)),
        witness_fired: rows.iter().filter(|r| r.witness_entangled).count(),
        violations: count_violations(rows, cfg),
    }
}

fn scatter_row(cfg: &RunConfig, index: u64) -> Result<ScatterRow> {
    let (rho, tag) = cfg.sample(index)?;
    let opts = MeasureOptions {
        with_variance: cfg.with_variance,
        restarts: cfg.restarts,
        seed: cfg.seed.derive(index).with_stream(1),
    };
    let rep = measure(&rho, &cfg.spectrum, &opts)?;
    Ok(ScatterRow {
        state_id: index,
        family_tag: tag,
        lqu: rep.lqu,
        avsk: rep.avsk,
        variance: rep.variance,
        purity_a: rep.purity_a,
        purity_b: rep.purity_b,
        witness_entangled: rep.witness_entangled,
    })
}

/// Sample `cfg.count` states and measure each. Every state draws from its
/// own derived seed, so the output is independent of thread scheduling and
/// rows come back ordered by index.
pub fn run_scatter(cfg: &RunConfig) -> Result<(Vec<ScatterRow>, ScatterSummary)> {
    cfg.validate()?;
    let rows = (0..cfg.count as u64)
        .into_par_iter()
        .map(|i| scatter_row(cfg, i))
        .collect::<Result<Vec<_>>>()?;
    let summary = summarize(&rows, cfg);
    Ok((rows, summary))
}

/// Two-qubit one-parameter families swept by `run_boundary`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundaryFamily {
    PureSchmidt,
    Isotropic,
    Werner,
    CqLine,
    FamilyProduct,
    FamilyPqc,
    FamilySep,
}

impl BoundaryFamily {
    pub const ALL: [BoundaryFamily; 7] = [
        BoundaryFamily::PureSchmidt,
        BoundaryFamily::Isotropic,
        BoundaryFamily::Werner,
        BoundaryFamily::CqLine,
        BoundaryFamily::FamilyProduct,
        BoundaryFamily::FamilyPqc,
        BoundaryFamily::FamilySep,
    ];

    pub fn parse(name: &str) -> Result<Self> {
        let fam = match name {
            "pure" | "pure-schmidt" | "pure_schmidt" | "schmidt" => BoundaryFamily::PureSchmidt,
            "isotropic" => BoundaryFamily::Isotropic,
            "werner" => BoundaryFamily::Werner,
            "cq-line" | "cq_line" => BoundaryFamily::CqLine,
            "family_product" | "family-product" => BoundaryFamily::FamilyProduct,
            "family_pqc" | "family-pqc" => BoundaryFamily::FamilyPqc,
            "family_sep" | "family-sep" => BoundaryFamily::FamilySep,
            other => return Err(Error::param("family", format!("unknown family `{other}`"))),
        };
        Ok(fam)
    }

    pub fn name(self) -> &'static str {
        match self {
            BoundaryFamily::PureSchmidt => "pure-schmidt",
            BoundaryFamily::Isotropic => "isotropic",
            BoundaryFamily::Werner => "werner",
            BoundaryFamily::CqLine => "cq-line",
            BoundaryFamily::FamilyProduct => "family_product",
            BoundaryFamily::FamilyPqc => "family_pqc",
            BoundaryFamily::FamilySep => "family_sep",
        }
    }

    /// Parameter interval swept by default.
    pub fn range(self) -> (f64, f64) {
        match self {
            BoundaryFamily::PureSchmidt => (0.0, 0.5),
            _ => (0.0, 1.0),
        }
    }

    pub fn is_separable(self) -> bool {
        matches!(
            self,
            BoundaryFamily::CqLine | BoundaryFamily::FamilyProduct | BoundaryFamily::FamilyPqc | BoundaryFamily::FamilySep
        )
    }

    pub fn family(self, param: f64) -> StateFamily {
        match self {
            BoundaryFamily::PureSchmidt => StateFamily::Schmidt { c1: param },
            BoundaryFamily::Isotropic => StateFamily::Isotropic { dim: 2, fidelity: param },
            BoundaryFamily::Werner => StateFamily::Werner { dim: 2, q: param },
            BoundaryFamily::CqLine => StateFamily::CqLine { p: param },
            BoundaryFamily::FamilyProduct => StateFamily::FamilyProduct { p: param },
            BoundaryFamily::FamilyPqc => StateFamily::FamilyPqc { p: param },
            BoundaryFamily::FamilySep => StateFamily::FamilySep { p: param },
        }
    }

    pub fn state(self, param: f64) -> Result<DensityMatrix> {
        make_state(&self.family(param))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryRow {
    pub param: f64,
    pub lqu: f64,
    pub avsk: f64,
    pub variance: f64,
}

/// `steps + 1` evenly spaced parameters across the family's range, measured
/// with `σ_z` on the first qubit.
pub fn run_boundary(family: BoundaryFamily, steps: usize) -> Result<Vec<BoundaryRow>> {
    if steps == 0 {
        return Err(Error::param("steps", "must be at least 1"));
    }
    let spec = Spectrum::sigma_z();
    let (lo, hi) = family.range();
    (0..=steps)
        .map(|k| {
            let param = lo + (hi - lo) * k as f64 / steps as f64;
            let rho = family.state(param)?;
            let opts = MeasureOptions::default();
            let rep = measure(&rho, &spec, &opts)?;
            Ok(BoundaryRow {
                param,
                lqu: rep.lqu.expect("two-qubit LQU is always defined"),
                avsk: rep.avsk,
                variance: variance(&rho, &spec)?,
            })
        })
        .collect()
}
