//! Drivers behind the `fundesign` binary: a single design search (`run`) and
//! a grid of searches over run counts and basis sizes (`sweep`).

mod config;
mod output;

use std::path::{Path, PathBuf};

pub use config::{
    Effects, OptimizerSection, OutputSection, ProblemConfig, ProfileConfig, RunConfig, ScalarConfig,
    SweepSection, XBasisKind,
};
pub use output::{
    read_design_csv, read_summary_criterion, write_design_csv, write_functions_csv, write_summary_csv, Summary,
    DESIGN_HEADER, SUMMARY_HEADER, SWEEP_HEADER,
};

use crate::criteria::CriterionValue;
use crate::error::{Error, Result};
use crate::model::Design;
use crate::optimizer::{coordinate_exchange, OptimizerResult};
use crate::oracle::exhaustive_vertex_search;

/// Command-line overrides applied on top of a configuration file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub starts: Option<usize>,
    pub out: Option<PathBuf>,
    pub oracle: bool,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut RunConfig) {
        if let Some(s) = self.seed {
            cfg.optimizer.seed = s;
        }
        if let Some(k) = self.starts {
            cfg.optimizer.starts = k;
        }
        if let Some(o) = &self.out {
            cfg.output.dir = o.clone();
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub result: OptimizerResult,
    pub summary: Summary,
    pub oracle: Option<(Design, CriterionValue)>,
    pub files: Vec<PathBuf>,
}

/// Runs one design search and writes `design.csv`, `summary.csv` and one
/// `functions_<j>.csv` per profile factor into the output directory.
pub fn run(cfg: &RunConfig, oracle: bool) -> Result<RunReport> {
    let spec = cfg.problem_spec()?;
    let opt = cfg.optimizer_config();
    spec.validate()?;
    opt.validate()?;

    let oracle = if oracle {
        Some(exhaustive_vertex_search(&spec)?)
    } else {
        None
    };
    let result = coordinate_exchange(&spec, &opt)?;

    let dir = &cfg.output.dir;
    std::fs::create_dir_all(dir)?;
    let mut files = Vec::new();

    let path = dir.join("design.csv");
    write_design_csv(&path, &spec, &result.best_design)?;
    files.push(path);

    let reference = cfg.output.reference_value;
    let summary = Summary {
        criterion: result.best_value,
        efficiency: reference.map(|r| r / result.best_value),
        reference_value: reference,
        winning_start_index: result.winning_start_index,
        sweeps: result.sweeps_used,
        seed: opt.seed,
        starts: opt.n_starts,
        feasible_starts: result.per_start_values.iter().filter(|v| v.is_feasible()).count(),
        oracle_value: oracle.as_ref().map(|(_, v)| *v),
    };
    let path = dir.join("summary.csv");
    write_summary_csv(&path, &summary)?;
    files.push(path);

    for j in 0..spec.profile.len() {
        let path = dir.join(format!("functions_{}.csv", j + 1));
        write_functions_csv(&path, &spec, &result.best_design, j, cfg.output.sample_points)?;
        files.push(path);
    }

    Ok(RunReport {
        result,
        summary,
        oracle,
        files,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub runs: usize,
    pub size: usize,
    pub criterion: f64,
    /// Relative to the largest size swept for the same run count.
    pub efficiency: f64,
    pub winning_start_index: usize,
    pub sweeps: usize,
}

/// Searches every `(runs, size)` cell of the `[sweep]` section and writes
/// `sweep.csv` into the output directory.
pub fn sweep(cfg: &RunConfig) -> Result<Vec<SweepRow>> {
    let section = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config("missing [sweep] section".into()))?;
    let factor = section.factor - 1;
    let largest = *section.sizes.iter().max().expect("sizes checked non-empty");

    let mut rows = Vec::new();
    for &n in &section.runs {
        let mut cells = Vec::new();
        for &size in &section.sizes {
            let mut cell = cfg.clone();
            cell.problem.runs = n;
            cell.problem.profile[factor].size = size;
            let spec = cell.problem_spec()?;
            let r = coordinate_exchange(&spec, &cell.optimizer_config())?;
            cells.push((size, r));
        }
        let reference = cells
            .iter()
            .find(|(s, _)| *s == largest)
            .map(|(_, r)| r.best_value)
            .expect("largest size is swept");
        rows.extend(cells.into_iter().map(|(size, r)| SweepRow {
            runs: n,
            size,
            criterion: r.best_value,
            efficiency: reference / r.best_value,
            winning_start_index: r.winning_start_index,
            sweeps: r.sweeps_used,
        }));
    }

    std::fs::create_dir_all(&cfg.output.dir)?;
    write_sweep_csv(&cfg.output.dir.join("sweep.csv"), &rows)?;
    Ok(rows)
}

pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(SWEEP_HEADER)?;
    for r in rows {
        w.write_record([
            r.runs.to_string(),
            r.size.to_string(),
            output::num(r.criterion),
            output::num(r.efficiency),
            r.winning_start_index.to_string(),
            r.sweeps.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
