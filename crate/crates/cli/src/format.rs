//! Number formatting and the versioned CSV layout.

use std::io::{BufRead, Write};
use std::path::Path;

use probe_core::measures::{MeasureReport, Spectrum};
use probe_core::survey::{BoundaryRow, ScatterRow};

use crate::error::{CliError, CliResult};

pub const HEADER: &str = "# probe-metrics v1";

pub const SCATTER_COLUMNS: [&str; 8] = [
    "stateId",
    "familyTag",
    "lqu",
    "avsk",
    "variance",
    "purityA",
    "purityB",
    "witnessEntangled",
];

pub const BOUNDARY_COLUMNS: [&str; 5] = ["family", "param", "lqu", "avsk", "variance"];

pub const BOUNDS_COLUMNS: [&str; 7] = ["stateId", "lqu", "avsk", "variance", "lower", "upper", "withinBounds"];

/// `%.12g`: twelve significant digits, trailing zeros dropped, exponent form
/// outside `1e-5 ..= 1e12`.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(sig12).unwrap_or_default()
}

/// Run metadata carried on the second comment line.
#[derive(Debug, Clone, PartialEq)]
pub struct Metadata {
    pub dims: (usize, usize),
    pub spectrum: Vec<f64>,
    pub seed: Option<u64>,
    pub mode: String,
}

impl Metadata {
    fn line(&self) -> String {
        let spec: Vec<String> = self.spectrum.iter().map(|&v| sig12(v)).collect();
        let mut s = format!("# dims={}x{} spectrum={}", self.dims.0, self.dims.1, spec.join(";"));
        if let Some(seed) = self.seed {
            s.push_str(&format!(" seed={seed}"));
        }
        s.push_str(&format!(" mode={}", self.mode));
        s
    }

    fn parse(line: &str) -> Option<Self> {
        let body = line.strip_prefix('#')?.trim();
        let mut dims = None;
        let mut spectrum = None;
        let mut seed = None;
        let mut mode = None;
        for field in body.split_whitespace() {
            let (k, v) = field.split_once('=')?;
            match k {
                "dims" => dims = Some(parse_dims(v).ok()?),
                "spectrum" => {
                    spectrum = Some(v.split(';').map(str::parse).collect::<Result<Vec<f64>, _>>().ok()?);
                }
                "seed" => seed = Some(v.parse().ok()?),
                "mode" => mode = Some(v.to_string()),
                _ => {}
            }
        }
        Some(Metadata {
            dims: dims?,
            spectrum: spectrum?,
            seed,
            mode: mode.unwrap_or_default(),
        })
    }

    pub fn spectrum(&self) -> CliResult<Spectrum> {
        Ok(Spectrum::new(self.spectrum.clone())?)
    }
}

pub fn parse_dims(s: &str) -> CliResult<(usize, usize)> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| CliError::config(format!("dims `{s}` must look like 2x2")))?;
    let parse = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| CliError::config(format!("dims `{s}` must look like 2x2")))
    };
    Ok((parse(a)?, parse(b)?))
}

fn csv_err(path: &Path, e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => CliError::Parse {
            path: path.to_path_buf(),
            message: format!("{other:?}"),
        },
    }
}

pub fn write_scatter<W: Write>(out: W, path: &Path, meta: &Metadata, rows: &[ScatterRow]) -> CliResult<()> {
    let mut out = out;
    writeln!(out, "{HEADER}").map_err(|e| CliError::io(path, e))?;
    writeln!(out, "{}", meta.line()).map_err(|e| CliError::io(path, e))?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SCATTER_COLUMNS).map_err(|e| csv_err(path, e))?;
    for r in rows {
        w.write_record([
            r.state_id.to_string(),
            r.family_tag.clone(),
            opt(r.lqu),
            sig12(r.avsk),
            opt(r.variance),
            sig12(r.purity_a),
            sig12(r.purity_b),
            r.witness_entangled.to_string(),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_boundary<W: Write>(out: W, path: &Path, family: &str, rows: &[BoundaryRow]) -> CliResult<()> {
    let mut out = out;
    writeln!(out, "{HEADER}").map_err(|e| CliError::io(path, e))?;
    writeln!(out, "# dims=2x2 spectrum=1;-1 mode=boundary").map_err(|e| CliError::io(path, e))?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(BOUNDARY_COLUMNS).map_err(|e| csv_err(path, e))?;
    for r in rows {
        w.write_record([
            family.to_string(),
            sig12(r.param),
            sig12(r.lqu),
            sig12(r.avsk),
            sig12(r.variance),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsRow {
    pub state_id: u64,
    pub lqu: f64,
    pub avsk: f64,
    pub variance: f64,
    pub lower: f64,
    pub upper: f64,
    pub within: bool,
}

pub fn write_bounds<W: Write>(out: W, path: &Path, rows: &[BoundsRow]) -> CliResult<()> {
    let mut out = out;
    writeln!(out, "{HEADER}").map_err(|e| CliError::io(path, e))?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(BOUNDS_COLUMNS).map_err(|e| csv_err(path, e))?;
    for r in rows {
        w.write_record([
            r.state_id.to_string(),
            sig12(r.lqu),
            sig12(r.avsk),
            sig12(r.variance),
            sig12(r.lower),
            sig12(r.upper),
            r.within.to_string(),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

fn parse_err(path: &Path, line: usize, message: impl std::fmt::Display) -> CliError {
    CliError::Parse {
        path: path.to_path_buf(),
        message: format!("record {line}: {message}"),
    }
}

/// Read a scatter CSV and re-check every row against the invariants of the
/// report it came from. Broken rows are an invariant failure.
pub fn read_scatter<R: BufRead>(mut input: R, path: &Path) -> CliResult<(Metadata, Vec<ScatterRow>)> {
    let mut first = String::new();
    input.read_line(&mut first).map_err(|e| CliError::io(path, e))?;
    if first.trim_end() != HEADER {
        return Err(CliError::Parse {
            path: path.to_path_buf(),
            message: format!("expected `{HEADER}` on the first line"),
        });
    }
    let mut second = String::new();
    input.read_line(&mut second).map_err(|e| CliError::io(path, e))?;
    let meta = Metadata::parse(second.trim_end()).ok_or_else(|| CliError::Parse {
        path: path.to_path_buf(),
        message: "missing or malformed metadata line".to_string(),
    })?;
    let spec = meta.spectrum()?;

    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let headers = r.headers().map_err(|e| csv_err(path, e))?.clone();
    if headers.iter().ne(SCATTER_COLUMNS) {
        return Err(parse_err(path, 0, format!("unexpected columns {headers:?}")));
    }
    let num = |s: &str, line: usize| s.parse::<f64>().map_err(|e| parse_err(path, line, e));
    let opt_num = |s: &str, line: usize| if s.is_empty() { Ok(None) } else { num(s, line).map(Some) };

    let mut rows = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let line = k + 1;
        let row = ScatterRow {
            state_id: rec[0].parse().map_err(|e| parse_err(path, line, e))?,
            family_tag: rec[1].to_string(),
            lqu: opt_num(&rec[2], line)?,
            avsk: num(&rec[3], line)?,
            variance: opt_num(&rec[4], line)?,
            purity_a: num(&rec[5], line)?,
            purity_b: num(&rec[6], line)?,
            witness_entangled: rec[7].parse().map_err(|e| parse_err(path, line, e))?,
        };
        let report = MeasureReport {
            avsk: row.avsk,
            lqu: row.lqu,
            variance: row.variance,
            purity_a: row.purity_a,
            purity_b: row.purity_b,
            concurrence: None,
            witness_entangled: row.witness_entangled,
            family_tag: Some(row.family_tag.clone()),
        };
        let broken = report.violations(&spec);
        if !broken.is_empty() {
            return Err(CliError::Invariant(format!(
                "{}: state {}: {}",
                path.display(),
                row.state_id,
                broken.join("; ")
            )));
        }
        rows.push(row);
    }
    Ok((meta, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12(1.0), "1");
        assert_eq!(sig12(2.0 / 3.0), "0.666666666667");
        assert_eq!(sig12(-0.5), "-0.5");
        assert_eq!(sig12(1.0 / 3.0 * 1e-7), "3.33333333333e-8");
        assert_eq!(sig12(123456.7890123456), "123456.789012");
        assert_eq!(sig12(1e15), "1e15");
        assert_eq!(sig12(0.99999999999999), "1");
    }

    #[test]
    fn round_trip_is_stable() {
        for &x in &[0.123456789012345, 1.0 / 7.0, 4.0 / 45.0, 1e-9] {
            let once = sig12(x);
            assert_eq!(sig12(once.parse().unwrap()), once);
        }
    }

    #[test]
    fn metadata_round_trip() {
        let m = Metadata {
            dims: (3, 2),
            spectrum: vec![1.0, 0.0, -1.0],
            seed: Some(42),
            mode: "ginibre".to_string(),
        };
        assert_eq!(Metadata::parse(&m.line()), Some(m));
        assert!(parse_dims("2x").is_err());
        assert_eq!(parse_dims("4X1").unwrap(), (4, 1));
    }
}
