//! CSV files written by the command-line front end.
//!
//! Numbers use Rust's shortest round-trip formatting so a reloaded design
//! reproduces the written one bit for bit.

use std::path::Path;

use crate::criteria::CriterionValue;
use crate::error::{Error, Result};
use crate::model::{equispaced, Bounds, Coordinate, Design, ProblemSpec};

pub const DESIGN_HEADER: [&str; 5] = ["run", "factor", "kind", "index", "value"];

pub const SUMMARY_HEADER: [&str; 9] = [
    "criterion",
    "efficiency",
    "reference_value",
    "winning_start_index",
    "sweeps",
    "seed",
    "starts",
    "feasible_starts",
    "oracle_value",
];

pub const SWEEP_HEADER: [&str; 6] = ["runs", "size", "criterion", "efficiency", "winning_start_index", "sweeps"];

pub(crate) fn num(v: f64) -> String {
    format!("{v}")
}

pub(crate) fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// One row per coordinate, in sweep order; run, factor, and index are 1-based.
pub fn write_design_csv(path: &Path, spec: &ProblemSpec, design: &Design) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(DESIGN_HEADER)?;
    for c in spec.coordinates() {
        let (run, factor, kind, index) = match c {
            Coordinate::Profile { factor, run, index } => (run, factor, "profile", index),
            Coordinate::Scalar { run, factor } => (run, factor, "scalar", 0),
        };
        w.write_record([
            (run + 1).to_string(),
            (factor + 1).to_string(),
            kind.to_string(),
            (index + 1).to_string(),
            num(design.get(c)),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a file produced by [`write_design_csv`]. Every coordinate of `spec`
/// must appear exactly once.
pub fn read_design_csv(path: &Path, spec: &ProblemSpec) -> Result<Design> {
    let mut r = csv::Reader::from_path(path)?;
    if r.headers()?.iter().ne(DESIGN_HEADER) {
        return Err(Error::Config(format!("{}: unexpected design header", path.display())));
    }
    let mut design = Design::centered(spec);
    let mut seen = std::collections::HashSet::new();
    for rec in r.records() {
        let rec = rec?;
        let field = |i: usize| rec.get(i).unwrap_or("");
        let bad = || Error::Config(format!("{}: malformed design row {:?}", path.display(), rec));
        let int = |i: usize| field(i).parse::<usize>().ok().filter(|&v| v >= 1).map(|v| v - 1);
        let (run, factor, index) = (int(0).ok_or_else(bad)?, int(1).ok_or_else(bad)?, int(3).ok_or_else(bad)?);
        let value: f64 = field(4).parse().map_err(|_| bad())?;
        let c = match field(2) {
            "profile" if factor < spec.profile.len() && index < spec.profile[factor].n_x() => {
                Coordinate::Profile { factor, run, index }
            }
            "scalar" if factor < spec.scalar.len() && index == 0 => Coordinate::Scalar { run, factor },
            _ => return Err(bad()),
        };
        if run >= spec.runs || !seen.insert(c) {
            return Err(bad());
        }
        design.set(c, value);
    }
    if seen.len() != spec.coordinate_count() {
        return Err(Error::Config(format!(
            "{}: {} of {} coordinates present",
            path.display(),
            seen.len(),
            spec.coordinate_count()
        )));
    }
    spec.check_design(&design)?;
    Ok(design)
}

/// Samples every run's profile function on `sample_points` equally spaced
/// times covering the factor's domain: columns `t, run_1, …, run_n`.
pub fn write_functions_csv(
    path: &Path,
    spec: &ProblemSpec,
    design: &Design,
    factor: usize,
    sample_points: usize,
) -> Result<()> {
    let (lo, hi) = spec.profile[factor].x_basis().domain();
    let ts = equispaced(Bounds::new(lo, hi)?, sample_points);
    let values = design.sample_profile(spec, factor, &ts)?;
    let mut w = csv::Writer::from_path(path)?;
    let header: Vec<String> = std::iter::once("t".to_string())
        .chain((1..=spec.runs).map(|i| format!("run_{i}")))
        .collect();
    w.write_record(&header)?;
    for (r, &t) in ts.iter().enumerate() {
        let row: Vec<String> = std::iter::once(num(t))
            .chain(values.row(r).iter().map(|&v| num(v)))
            .collect();
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub criterion: f64,
    pub efficiency: Option<f64>,
    pub reference_value: Option<f64>,
    pub winning_start_index: usize,
    pub sweeps: usize,
    pub seed: u64,
    pub starts: usize,
    pub feasible_starts: usize,
    pub oracle_value: Option<CriterionValue>,
}

pub fn write_summary_csv(path: &Path, s: &Summary) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(SUMMARY_HEADER)?;
    w.write_record([
        num(s.criterion),
        opt_num(s.efficiency),
        opt_num(s.reference_value),
        s.winning_start_index.to_string(),
        s.sweeps.to_string(),
        s.seed.to_string(),
        s.starts.to_string(),
        s.feasible_starts.to_string(),
        s.oracle_value.map(|v| v.to_string()).unwrap_or_default(),
    ])?;
    w.flush()?;
    Ok(())
}

/// Reads back the criterion value from a summary file.
pub fn read_summary_criterion(path: &Path) -> Result<f64> {
    let mut r = csv::Reader::from_path(path)?;
    let rec = r
        .records()
        .next()
        .ok_or_else(|| Error::Config(format!("{}: empty summary", path.display())))??;
    rec.get(0)
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::Config(format!("{}: bad criterion field", path.display())))
}
