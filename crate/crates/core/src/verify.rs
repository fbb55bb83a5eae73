//! Self-checks over states, measures and moments, reported as counts and
//! worst residuals so a driver can decide pass/fail.

use serde::Serialize;

use crate::error::Result;
use crate::linalg::{hermitian_residual, ket, DensityMatrix};
use crate::measures::{
    avsk, entanglement_witness, lqu_minimize, lqu_two_qubit, measure, separable_cap, MeasureOptions, Spectrum,
};
use crate::moments::{
    lqu_bounds, second_moment, variance, weingarten4_exact, weingarten4_printed, CycleClass, Perm4, Rational,
};
use crate::states::{
    haar_unitary, make_state, random_density, random_pure, random_separable, RandomSeed, StateFamily,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    States,
    Measures,
    Moments,
}

impl Suite {
    pub const ALL: [Suite; 3] = [Suite::States, Suite::Measures, Suite::Moments];

    pub fn name(self) -> &'static str {
        match self {
            Suite::States => "states",
            Suite::Measures => "measures",
            Suite::Moments => "moments",
        }
    }
}

/// Deliberate defects used to confirm that the checks can fail.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    #[default]
    None,
    /// Flip the sign of the spectral prefactor in the average.
    NegatePrefactor,
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Random states per sampled check.
    pub samples: usize,
    pub fault: Fault,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 0,
            samples: 200,
            fault: Fault::None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    pub worst_residual: f64,
    pub tolerance: f64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }
}

struct Check {
    name: &'static str,
    tolerance: f64,
    cases: usize,
    failures: usize,
    worst: f64,
}

impl Check {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Check {
            name,
            tolerance,
            cases: 0,
            failures: 0,
            worst: 0.0,
        }
    }

    /// Record a residual; anything above tolerance, or NaN, is a failure.
    fn residual(&mut self, r: f64) {
        self.cases += 1;
        if r.is_nan() || r > self.tolerance {
            self.failures += 1;
        }
        if r.is_nan() || r > self.worst {
            self.worst = r;
        }
    }

    fn flag(&mut self, ok: bool) {
        self.residual(if ok { 0.0 } else { f64::INFINITY });
    }

    fn finish(self) -> CheckResult {
        CheckResult {
            name: self.name.to_string(),
            cases: self.cases,
            failures: self.failures,
            worst_residual: self.worst,
            tolerance: self.tolerance,
        }
    }
}

struct Ctx {
    opts: VerifyOptions,
    seed: RandomSeed,
}

impl Ctx {
    fn avsk(&self, rho: &DensityMatrix, spec: &Spectrum) -> Result<f64> {
        let v = avsk(rho, spec)?;
        Ok(match self.opts.fault {
            Fault::None => v,
            Fault::NegatePrefactor => -v,
        })
    }

    fn seed(&self, stream: u64, i: usize) -> RandomSeed {
        self.seed.with_stream(stream).derive(i as u64)
    }
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<SuiteReport> {
    let ctx = Ctx {
        opts: *opts,
        seed: RandomSeed::new(opts.seed),
    };
    let checks = match suite {
        Suite::States => states_suite(&ctx)?,
        Suite::Measures => measures_suite(&ctx)?,
        Suite::Moments => moments_suite(&ctx)?,
    };
    Ok(SuiteReport { suite, checks })
}

pub fn run_all(opts: &VerifyOptions) -> Result<Vec<SuiteReport>> {
    Suite::ALL.iter().map(|&s| run_suite(s, opts)).collect()
}

fn state_residual(rho: &DensityMatrix) -> f64 {
    let tr = (rho.matrix().trace().re - 1.0).abs();
    let herm = hermitian_residual(rho.matrix());
    let neg = rho.eigenvalues().iter().fold(0.0f64, |m, &e| m.max(-e));
    tr.max(herm).max(neg)
}

fn states_suite(ctx: &Ctx) -> Result<Vec<CheckResult>> {
    let n = ctx.opts.samples;
    let dims = [(2, 2), (2, 3), (3, 2), (3, 3)];
    let mut valid = Check::new("random states are valid", 1e-10);
    let mut marg = Check::new("marginal purities in range", 1e-12);
    for i in 0..n {
        let (na, nb) = dims[i % dims.len()];
        let s = ctx.seed(0, i);
        let rank = 1 + i % (na * nb);
        for rho in [
            random_density(na, nb, rank, s)?,
            random_pure(na, nb, s),
            random_separable(na, nb, 1 + i % 5, s)?,
        ] {
            valid.residual(state_residual(&rho));
            for (p, d) in [(rho.marginal_a().purity(), na), (rho.marginal_b().purity(), nb)] {
                let lo = 1.0 / d as f64;
                marg.residual((lo - p).max(p - 1.0).max(0.0));
            }
        }
    }
    let mut fam = Check::new("family constructors are valid", 1e-10);
    for k in 0..=20 {
        let t = k as f64 / 20.0;
        for f in [
            StateFamily::Schmidt { c1: t / 2.0 },
            StateFamily::Isotropic { dim: 3, fidelity: t },
            StateFamily::Werner { dim: 3, q: t },
            StateFamily::FamilyProduct { p: t },
            StateFamily::FamilyPqc { p: t },
            StateFamily::FamilySep { p: t },
            StateFamily::CqLine { p: t },
        ] {
            fam.residual(state_residual(&make_state(&f)?));
        }
    }
    let mut unitary = Check::new("sampled unitaries are unitary", 1e-12);
    for i in 0..n.min(50) {
        let u = haar_unitary(2 + i % 4, ctx.seed(1, i));
        let id = crate::linalg::identity(u.nrows());
        unitary.residual(crate::linalg::max_abs_diff(&(u.adjoint() * &u), &id));
    }
    Ok(vec![valid.finish(), marg.finish(), fam.finish(), unitary.finish()])
}

fn measures_suite(ctx: &Ctx) -> Result<Vec<CheckResult>> {
    let n = ctx.opts.samples;
    let sz = Spectrum::sigma_z();

    let mut anchors = Check::new("exact anchors", 1e-9);
    let bell = make_state(&StateFamily::Bell { dim: 2 })?;
    anchors.residual((ctx.avsk(&bell, &sz)? - 1.0).abs());
    let prod = DensityMatrix::from_pure(&ket(4, 0), 2, 2)?;
    anchors.residual((ctx.avsk(&prod, &sz)? - 2.0 / 3.0).abs());
    let free = DensityMatrix::product(
        &DensityMatrix::maximally_mixed(2, 1),
        &random_density(2, 1, 2, ctx.seed(2, 0))?,
    )
    .with_dims(2, 2)?;
    anchors.residual(ctx.avsk(&free, &sz)?.abs());
    let md = make_state(&StateFamily::MaxDiscordant)?;
    anchors.residual((ctx.avsk(&md, &sz)? - 2.0 / 3.0).abs());
    anchors.residual((lqu_two_qubit(&md)? - 0.5).abs());

    let mut ordering = Check::new("average dominates minimum", 1e-9);
    let mut closed = Check::new("two-qubit closed form matches search", 1e-6);
    let mut shift = Check::new("shift invariance", 1e-12);
    let mut lu = Check::new("local unitary invariance", 1e-9);
    let mut witness = Check::new("witness silent on separable states", 0.0);
    for i in 0..n {
        let s = ctx.seed(3, i);
        let rho = random_density(2, 2, 1 + i % 4, s)?;
        let av = ctx.avsk(&rho, &sz)?;
        let lqu = lqu_two_qubit(&rho)?;
        ordering.residual(lqu - av);
        if i < 10 {
            let num = lqu_minimize(&rho, &sz, 8, s.with_stream(1))?;
            closed.residual((num - lqu).abs());
        }
        let base = avsk(&rho, &sz)?;
        for eta in [-3.0, 0.7, 10.0] {
            shift.residual((avsk(&rho, &sz.shifted(eta))? - base).abs());
        }
        let u = crate::linalg::tensor(&haar_unitary(2, s.with_stream(2)), &haar_unitary(2, s.with_stream(3)));
        lu.residual((avsk(&rho.conjugate(&u)?, &sz)? - base).abs());
        let sep = random_separable(2, 2, 1 + i % 6, s.with_stream(4))?;
        witness.flag(!entanglement_witness(&sep, &sz)?);
    }

    let mut higher = Check::new("qutrit ordering and separable cap", 1e-6);
    let spec3 = Spectrum::new(vec![1.0, 0.0, -1.0])?;
    for i in 0..n.min(12) {
        let s = ctx.seed(5, i);
        let sep = random_separable(3, 2, 3, s)?;
        let rep = measure(&sep, &spec3, &MeasureOptions {
            restarts: 8,
            seed: s.with_stream(1),
            ..MeasureOptions::default()
        })?;
        let av = ctx.avsk(&sep, &spec3)?;
        higher.residual(rep.lqu.unwrap_or(0.0) - av);
        higher.residual(av - separable_cap(&spec3));
    }

    Ok(vec![
        anchors.finish(),
        ordering.finish(),
        closed.finish(),
        shift.finish(),
        lu.finish(),
        witness.finish(),
        higher.finish(),
    ])
}

fn moments_suite(ctx: &Ctx) -> Result<Vec<CheckResult>> {
    let n = ctx.opts.samples;
    let sz = Spectrum::sigma_z();

    let mut wg = Check::new("Weingarten values at N = 4", 0.0);
    let exact = |cls_rep: [u8; 4]| weingarten4_exact(Perm4::from_one_line(cls_rep).expect("valid"), 4);
    wg.flag(exact([1, 2, 3, 4])? == Rational::new(67, 10080));
    wg.flag(exact([2, 1, 3, 4])? == Rational::new(-1, 420));
    wg.flag(weingarten4_printed(CycleClass::Identity).eval(4)? == Rational::new(67, 2520));
    wg.flag(weingarten4_printed(CycleClass::Transposition).eval(4)? == Rational::new(1, 420));

    let mut anchors = Check::new("second-moment anchors", 1e-9);
    let bell = make_state(&StateFamily::Bell { dim: 2 })?;
    anchors.residual((second_moment(&bell, &sz)? - 1.0).abs());
    anchors.residual(variance(&bell, &sz)?.abs());

    let mut pure = Check::new("pure two-qubit variance law", 1e-8);
    for k in 0..=20 {
        let c1 = 0.5 * k as f64 / 20.0;
        let rho = make_state(&StateFamily::Schmidt { c1 })?;
        let expected = 4.0 / 45.0 * (1.0 - 2.0 * c1).powi(4);
        pure.residual((variance(&rho, &sz)? - expected).abs());
    }

    let mut nonneg = Check::new("variance nonnegative and ordered", 1e-9);
    let mut bounds = Check::new("moment bounds on LQU", 1e-6);
    for i in 0..n {
        let rho = random_density(2, 2, 1 + i % 4, ctx.seed(6, i))?;
        let av = ctx.avsk(&rho, &sz)?;
        let m2 = second_moment(&rho, &sz)?;
        let var = m2 - av * av;
        nonneg.residual(-var);
        let lqu = lqu_two_qubit(&rho)?;
        let (lo, hi) = lqu_bounds(av, variance(&rho, &sz)?);
        bounds.residual((lo - lqu).max(lqu - hi));
    }

    Ok(vec![
        wg.finish(),
        anchors.finish(),
        pure.finish(),
        nonneg.finish(),
        bounds.finish(),
    ])
}
