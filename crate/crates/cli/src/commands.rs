use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use probe_core::measures::{measure, optimal_spectrum, MeasureOptions, Spectrum, DEFAULT_RESTARTS};
use probe_core::moments::lqu_bounds;
use probe_core::survey::{run_boundary, run_scatter, BoundaryFamily, RunConfig, ScatterMode};
use probe_core::verify::{run_suite, Fault, Suite, VerifyOptions};
use probe_core::{make_state, RandomSeed, StateFamily};

use crate::error::{CliError, CliResult};
use crate::format::{self, parse_dims, read_scatter, BoundsRow, Metadata};

/// Average, minimum and variance of local skew information.
#[derive(Debug, Parser)]
#[command(name = "probe", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Measure a batch of random states.
    Scatter(ScatterArgs),
    /// Sweep a one-parameter two-qubit family.
    Boundary(BoundaryArgs),
    /// Measure a single named state.
    State(StateArgs),
    /// Run the built-in invariant suites.
    Verify(VerifyArgs),
    /// Apply the two-moment LQU bounds to each row of a scatter file.
    Bounds(BoundsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct ScatterArgs {
    #[arg(long, default_value = "2x2")]
    pub dims: String,
    #[arg(long = "n", default_value_t = 1000)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// sigma-z, optimal, harmonic, or a comma-separated list.
    #[arg(long, default_value = "sigma-z")]
    pub spectrum: String,
    #[arg(long)]
    pub with_variance: bool,
    /// Rank of the sampled states (default: full rank).
    #[arg(long, conflicts_with_all = ["separable", "family"])]
    pub rank: Option<usize>,
    /// Sample separable mixtures instead of Ginibre states.
    #[arg(long, conflicts_with = "family")]
    pub separable: bool,
    /// Product terms per separable mixture.
    #[arg(long, default_value_t = 4)]
    pub terms: usize,
    /// Draw from a named two-qubit family with a uniform parameter.
    #[arg(long)]
    pub family: Option<String>,
    /// Fix the family parameter instead of drawing it.
    #[arg(long, requires = "family")]
    pub param: Option<f64>,
    /// Pure states only.
    #[arg(long, conflicts_with_all = ["rank", "separable", "family"])]
    pub pure: bool,
    /// Restarts of the numerical LQU search beyond two qubits.
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    pub restarts: usize,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundaryArgs {
    #[arg(long)]
    pub family: String,
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Measure {
    All,
    Avsk,
    Lqu,
    Variance,
}

#[derive(Debug, Args)]
pub struct StateArgs {
    #[arg(long)]
    pub family: String,
    #[arg(long, default_value_t = 0.0)]
    pub param: f64,
    /// Local dimension for bell, werner and isotropic.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value = "sigma-z")]
    pub spectrum: String,
    #[arg(long, value_enum, default_value = "all")]
    pub measure: Measure,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    All,
    States,
    Measures,
    Moments,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FaultArg {
    NegatePrefactor,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: SuiteArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    /// Break the library on purpose to confirm the suites notice.
    #[arg(long, value_enum)]
    pub inject_fault: Option<FaultArg>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn parse_spectrum(s: &str, dim_a: usize) -> CliResult<Spectrum> {
    let spec = match s {
        "sigma-z" | "sigma_z" | "sz" => {
            if dim_a != 2 {
                return Err(CliError::config(format!("sigma-z needs a qubit on A, got dimension {dim_a}")));
            }
            Spectrum::sigma_z()
        }
        "optimal" => optimal_spectrum(dim_a)?,
        "harmonic" => Spectrum::harmonic(dim_a)?,
        list => {
            let values = list
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| CliError::config(format!("spectrum `{list}` is not a known name or a number list")))?;
            if values.len() != dim_a {
                return Err(CliError::config(format!(
                    "spectrum has {} values but subsystem A has dimension {dim_a}",
                    values.len()
                )));
            }
            Spectrum::new(values)?
        }
    };
    Ok(spec)
}

/// Where output goes: a file or stdout. Keeps the path for error messages.
fn sink(out: &Option<PathBuf>) -> CliResult<(Box<dyn Write>, PathBuf)> {
    match out {
        Some(p) => {
            let f = File::create(p).map_err(|e| CliError::io(p, e))?;
            Ok((Box::new(BufWriter::new(f)), p.clone()))
        }
        None => Ok((Box::new(BufWriter::new(io::stdout().lock())), PathBuf::from("<stdout>"))),
    }
}

fn write_json<T: Serialize>(value: &T, out: &Option<PathBuf>) -> CliResult<()> {
    let (mut w, path) = sink(out)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::io(&path, e.into()))?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| CliError::io(&path, e))
}

pub fn scatter(args: &ScatterArgs) -> CliResult<()> {
    let dims = parse_dims(&args.dims)?;
    if dims.0 < 2 || dims.1 < 1 {
        return Err(CliError::config(format!("dims must be at least 2x1, got {}x{}", dims.0, dims.1)));
    }
    let spectrum = parse_spectrum(&args.spectrum, dims.0)?;
    let mode = if args.separable {
        ScatterMode::Separable { terms: args.terms }
    } else if let Some(name) = &args.family {
        ScatterMode::Family {
            name: name.clone(),
            param: args.param,
        }
    } else if args.pure {
        ScatterMode::Pure
    } else {
        ScatterMode::Ginibre { rank: args.rank }
    };
    let cfg = RunConfig {
        dims,
        count: args.count,
        seed: RandomSeed::new(args.seed),
        spectrum,
        with_variance: args.with_variance,
        mode,
        restarts: args.restarts,
    };
    cfg.validate().map_err(|e| CliError::config(e.to_string()))?;
    let (rows, summary) = run_scatter(&cfg)?;

    match args.format {
        Format::Csv => {
            let meta = Metadata {
                dims,
                spectrum: cfg.spectrum.values().to_vec(),
                seed: Some(args.seed),
                mode: mode_label(&cfg.mode),
            };
            let (w, path) = sink(&args.out)?;
            format::write_scatter(w, &path, &meta, &rows)?;
        }
        Format::Json => write_json(&json!({ "rows": rows, "summary": summary }), &args.out)?,
    }
    eprintln!("{}", serde_json::to_string(&summary).expect("summary serializes"));
    let n = summary.violations.total();
    if n > 0 {
        return Err(CliError::Invariant(format!("{n} rows violate the scatter invariants")));
    }
    Ok(())
}

fn mode_label(mode: &ScatterMode) -> String {
    match mode {
        ScatterMode::Ginibre { rank: None } => "ginibre".to_string(),
        ScatterMode::Ginibre { rank: Some(r) } => format!("ginibre-rank-{r}"),
        ScatterMode::Pure => "pure".to_string(),
        ScatterMode::Separable { terms } => format!("separable-{terms}"),
        ScatterMode::Family { name, param: None } => format!("family-{name}"),
        ScatterMode::Family { name, param: Some(p) } => format!("family-{name}-{}", format::sig12(*p)),
    }
}

pub fn boundary(args: &BoundaryArgs) -> CliResult<()> {
    let family = BoundaryFamily::parse(&args.family).map_err(|e| CliError::config(e.to_string()))?;
    if args.steps == 0 {
        return Err(CliError::config("steps must be at least 1"));
    }
    let rows = run_boundary(family, args.steps)?;
    match args.format {
        Format::Csv => {
            let (w, path) = sink(&args.out)?;
            format::write_boundary(w, &path, family.name(), &rows)
        }
        Format::Json => write_json(&json!({ "family": family.name(), "rows": rows }), &args.out),
    }
}

pub fn state(args: &StateArgs) -> CliResult<()> {
    let fam = StateFamily::from_name(&args.family, args.param, args.dim).map_err(|e| CliError::config(e.to_string()))?;
    let rho = make_state(&fam).map_err(|e| CliError::config(e.to_string()))?;
    let spec = parse_spectrum(&args.spectrum, rho.dim_a())?;
    let opts = MeasureOptions {
        with_variance: matches!(args.measure, Measure::All | Measure::Variance),
        seed: RandomSeed::new(args.seed),
        ..MeasureOptions::default()
    };
    let report = measure(&rho, &spec, &opts)?;
    let value = match args.measure {
        Measure::All => {
            let mut v = serde_json::to_value(&report).expect("report serializes");
            if let Some(o) = v.as_object_mut() {
                o.remove("family_tag");
            }
            v
        }
        Measure::Avsk => json!({ "avsk": report.avsk }),
        Measure::Lqu => json!({ "lqu": report.lqu }),
        Measure::Variance => json!({ "variance": report.variance }),
    };
    let mut out = json!({ "family": fam.tag(), "param": args.param, "dims": [rho.dim_a(), rho.dim_b()] });
    if let (Some(o), Some(v)) = (out.as_object_mut(), value.as_object()) {
        o.extend(v.clone());
    }
    match args.format {
        Format::Json => write_json(&out, &args.out)?,
        Format::Csv => {
            let (mut w, path) = sink(&args.out)?;
            let obj = out.as_object().expect("object");
            let keys: Vec<&String> = obj.keys().filter(|k| !obj[*k].is_array()).collect();
            let cell = |v: &serde_json::Value| match v {
                serde_json::Value::Number(n) => format::sig12(n.as_f64().unwrap_or(f64::NAN)),
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Null => String::new(),
                other => other.to_string(),
            };
            let header: Vec<&str> = keys.iter().map(|k| k.as_str()).collect();
            let values: Vec<String> = keys.iter().map(|k| cell(&obj[*k])).collect();
            writeln!(w, "{}\n{}\n{}", format::HEADER, header.join(","), values.join(","))
                .and_then(|_| w.flush())
                .map_err(|e| CliError::io(&path, e))?;
        }
    }
    let broken = report.violations(&spec);
    if !broken.is_empty() {
        return Err(CliError::Invariant(broken.join("; ")));
    }
    Ok(())
}

pub fn verify(args: &VerifyArgs) -> CliResult<()> {
    if args.samples == 0 {
        return Err(CliError::config("samples must be at least 1"));
    }
    let opts = VerifyOptions {
        seed: args.seed,
        samples: args.samples,
        fault: match args.inject_fault {
            Some(FaultArg::NegatePrefactor) => Fault::NegatePrefactor,
            None => Fault::None,
        },
    };
    let suites: Vec<Suite> = match args.suite {
        SuiteArg::All => Suite::ALL.to_vec(),
        SuiteArg::States => vec![Suite::States],
        SuiteArg::Measures => vec![Suite::Measures],
        SuiteArg::Moments => vec![Suite::Moments],
    };
    let reports = suites
        .into_iter()
        .map(|s| run_suite(s, &opts))
        .collect::<probe_core::Result<Vec<_>>>()?;
    let passed = reports.iter().all(|r| r.passed());
    let failed: Vec<String> = reports
        .iter()
        .flat_map(|r| r.checks.iter().filter(|c| !c.passed()).map(move |c| format!("{}/{}", r.suite.name(), c.name)))
        .collect();
    write_json(
        &json!({ "passed": passed, "seed": args.seed, "fault": opts.fault, "suites": reports }),
        &args.out,
    )?;
    if passed {
        Ok(())
    } else {
        Err(CliError::Invariant(format!("failed checks: {}", failed.join(", "))))
    }
}

pub fn bounds(args: &BoundsArgs) -> CliResult<()> {
    let path: &Path = &args.input;
    let f = File::open(path).map_err(|e| CliError::io(path, e))?;
    let (meta, rows) = read_scatter(BufReader::new(f), path)?;
    if meta.dims != (2, 2) || meta.spectrum != [1.0, -1.0] {
        return Err(CliError::config("the bounds apply to two qubits measured with sigma-z"));
    }
    let mut out = Vec::with_capacity(rows.len());
    for r in &rows {
        let (Some(lqu), Some(variance)) = (r.lqu, r.variance) else {
            return Err(CliError::config(format!(
                "{}: state {} has no lqu or variance; rerun scatter with --with-variance",
                path.display(),
                r.state_id
            )));
        };
        let (lower, upper) = lqu_bounds(r.avsk, variance);
        out.push(BoundsRow {
            state_id: r.state_id,
            lqu,
            avsk: r.avsk,
            variance,
            lower,
            upper,
            within: lower <= lqu + 1e-6 && lqu <= upper + 1e-6,
        });
    }
    let (w, out_path) = sink(&args.out)?;
    format::write_bounds(w, &out_path, &out)?;
    let n = out.iter().filter(|r| !r.within).count();
    if n > 0 {
        return Err(CliError::Invariant(format!("{n} rows fall outside the bounds")));
    }
    Ok(())
}

pub fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Scatter(a) => scatter(a),
        Command::Boundary(a) => boundary(a),
        Command::State(a) => state(a),
        Command::Verify(a) => verify(a),
        Command::Bounds(a) => bounds(a),
    }
}
