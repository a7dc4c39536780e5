//! `sweep`: bounds over a one-parameter grid, written as CSV.
//!
//! The header is the parameter name followed by the requested fields in the
//! order given. Rows are sorted by grid value.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use qnetcap::{lossy_gap_ratio, plan, sandwich_report, Network, RateModel, SandwichReport};
use rayon::prelude::*;

use crate::commands::{read_network, resolve_regime};
use crate::CliError;

pub const FIELDS: &[&str] = &["lower", "upper", "upper_esq", "upper_eps", "vacuous", "ratio", "m"];

/// Grid points further apart than this count as distinct; values are also
/// snapped to this resolution so `0.1 + 2 * 0.1` prints as `0.3`.
const SNAP: f64 = 1e-12;

pub struct SweepArgs {
    pub path: PathBuf,
    pub param: String,
    pub grid: Option<String>,
    pub values: Option<Vec<f64>>,
    pub fields: Vec<String>,
    pub regime: Option<String>,
    pub epsilon: f64,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Param {
    Eta(String),
    Epsilon,
    Scale,
}

impl Param {
    pub fn parse(s: &str) -> Result<Param, CliError> {
        match s {
            "epsilon" => Ok(Param::Epsilon),
            "scale" => Ok(Param::Scale),
            _ => match s.strip_prefix("eta:") {
                Some(id) if !id.is_empty() => Ok(Param::Eta(id.to_string())),
                _ => Err(CliError::Domain(format!(
                    "unknown sweep parameter `{s}` (expected eta:<edge-id>, epsilon or scale)"
                ))),
            },
        }
    }
}

fn snap(x: f64) -> f64 {
    let s = (x / SNAP).round() * SNAP;
    // round-trip through the shortest decimal to drop representation noise
    format!("{s:.12}").parse().unwrap_or(s)
}

/// Parses `start:stop:step`, inclusive of `stop` when it lands on the grid.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Domain(format!("bad grid `{spec}` (expected start:stop:step)"));
    let parts: Vec<f64> = spec
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    let [start, stop, step] = parts[..] else {
        return Err(bad());
    };
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
        return Err(CliError::Domain(format!("grid `{spec}` is not finite")));
    }
    if step == 0.0 {
        return Err(CliError::Domain("grid step must be non-zero".into()));
    }
    let span = (stop - start) / step;
    if span < -SNAP {
        return Err(CliError::Domain(format!("grid `{spec}` is empty")));
    }
    let n = (span + 1e-9).floor() as usize + 1;
    check_values((0..n).map(|i| start + i as f64 * step).collect())
}

/// Snaps, sorts and checks an explicit list of grid values.
pub fn check_values(values: Vec<f64>) -> Result<Vec<f64>, CliError> {
    if values.is_empty() {
        return Err(CliError::Domain("grid is empty".into()));
    }
    if let Some(x) = values.iter().find(|x| !x.is_finite()) {
        return Err(CliError::Domain(format!("grid value {x} is not finite")));
    }
    let mut values: Vec<f64> = values.into_iter().map(snap).collect();
    values.sort_by(f64::total_cmp);
    if values.windows(2).any(|w| w[1] - w[0] < SNAP) {
        return Err(CliError::Domain("grid values must be distinct".into()));
    }
    Ok(values)
}

fn check_fields(fields: &[String]) -> Result<(), CliError> {
    if fields.is_empty() {
        return Err(CliError::Domain("no output fields requested".into()));
    }
    match fields.iter().find(|f| !FIELDS.contains(&f.as_str())) {
        Some(f) => Err(CliError::Domain(format!(
            "unknown field `{f}` (known: {})",
            FIELDS.join(", ")
        ))),
        None => Ok(()),
    }
}

struct Point {
    report: SandwichReport,
    m: Option<usize>,
}

fn evaluate(
    net: &Network,
    param: &Param,
    x: f64,
    args: &SweepArgs,
    want_m: bool,
) -> Result<Point, CliError> {
    let (net, epsilon) = match param {
        Param::Eta(id) => (net.with_eta(id, x)?, args.epsilon),
        Param::Scale => (net.with_scaled_budgets(x)?, args.epsilon),
        Param::Epsilon => (net.clone(), x),
    };
    let regime = resolve_regime(&net, args.regime.as_deref())?;
    let report = sandwich_report(&net, regime, epsilon)?;
    let m = if want_m {
        Some(plan(&net, epsilon, &RateModel::AsymptoticQCap)?.m)
    } else {
        None
    };
    Ok(Point { report, m })
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn cell(field: &str, p: &Point) -> String {
    let r = &p.report;
    let upper = || match (r.vacuous, r.upper_eps_corrected) {
        (true, _) => "vacuous".to_string(),
        (false, Some(u)) => num(u),
        (false, None) => num(r.upper_esq),
    };
    match field {
        "lower" => num(r.lower),
        "upper" | "upper_eps" => upper(),
        "upper_esq" => num(r.upper_esq),
        "vacuous" => r.vacuous.to_string(),
        "ratio" => lossy_gap_ratio(r).map(num).unwrap_or_default(),
        "m" => p.m.map(|m| m.to_string()).unwrap_or_default(),
        other => unreachable!("field `{other}` passed validation"),
    }
}

pub fn run(args: SweepArgs) -> Result<(), CliError> {
    let param = Param::parse(&args.param)?;
    check_fields(&args.fields)?;
    let grid = match (&args.grid, &args.values) {
        (Some(g), _) => parse_grid(g)?,
        (None, Some(v)) => check_values(v.clone())?,
        (None, None) => return Err(CliError::Domain("give --grid or --values".into())),
    };
    let net = read_network(&args.path)?;
    let want_m = args.fields.iter().any(|f| f == "m");

    let points: Vec<Point> = grid
        .par_iter()
        .map(|&x| evaluate(&net, &param, x, &args, want_m))
        .collect::<Result<_, _>>()?;

    let sink: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(File::create(path).map_err(|e| CliError::io(path, e))?),
        None => Box::new(io::stdout().lock()),
    };
    let io_err = |e: csv::Error| -> Option<CliError> {
        let e: io::Error = e.into();
        match &args.out {
            Some(path) => Some(CliError::io(path, e)),
            None if e.kind() == io::ErrorKind::BrokenPipe => None,
            None => Some(CliError::io("<stdout>", e)),
        }
    };
    let mut w = csv::Writer::from_writer(sink);
    let mut header = vec![args.param.clone()];
    header.extend(args.fields.iter().cloned());
    let written = (|| {
        w.write_record(&header)?;
        for (x, p) in grid.iter().zip(&points) {
            let mut row = vec![num(*x)];
            row.extend(args.fields.iter().map(|f| cell(f, p)));
            w.write_record(&row)?;
        }
        w.flush().map_err(csv::Error::from)
    })();
    match written.err().and_then(io_err) {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_includes_stop_and_snaps() {
        let g = parse_grid("0.1:0.9:0.1").unwrap();
        assert_eq!(g.len(), 9);
        assert_eq!(g[2], 0.3);
        assert_eq!(g[8], 0.9);
    }

    #[test]
    fn descending_grid_is_sorted() {
        assert_eq!(parse_grid("3:1:-1").unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn bad_grids_are_rejected() {
        for g in ["1:0:0.1", "0:1:0", "0:1", "a:b:c", "0:inf:1"] {
            assert!(parse_grid(g).is_err(), "{g}");
        }
        assert!(check_values(vec![]).is_err());
        assert!(check_values(vec![0.2, 0.2]).is_err());
        assert!(check_values(vec![f64::NAN]).is_err());
    }

    #[test]
    fn fields_and_params_are_checked() {
        assert!(check_fields(&["lower".into(), "bogus".into()]).is_err());
        assert!(check_fields(&[]).is_err());
        assert_eq!(Param::parse("eta:e1").unwrap(), Param::Eta("e1".into()));
        assert!(Param::parse("eta:").is_err());
        assert!(Param::parse("length").is_err());
    }
}
