//! Multi-start coordinate exchange.
//!
//! Each start draws a random design and sweeps over every coordinate
//! (all `γ_{ijl}`, then all scalar settings). A coordinate is re-optimized
//! over an equispaced candidate grid spanning its bounds, optionally refined
//! by golden-section search around the best grid point, and changed only on
//! strict improvement of the criterion. Starts are independent and seeded
//! from `(seed, start index)`, so the result does not depend on the number
//! of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::criteria::{a_criterion, information_matrix, AOptimality, Criterion, CriterionValue};
use crate::error::{Error, Result};
use crate::line_search::golden_section;
use crate::model::{build_model_matrix, equispaced, Coordinate, Design, ProblemSpec, RowLayout};

/// Bracket width, relative to the coordinate's bounds, at which golden-section refinement stops.
pub const REFINE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub n_starts: usize,
    pub seed: u64,
    /// Number of equispaced candidate values per coordinate, endpoints included.
    pub candidate_grid_size: usize,
    pub max_sweeps: usize,
    /// A start stops once a full sweep improves the criterion by less than this
    /// relative amount.
    pub improvement_tol: f64,
    pub refine: bool,
    /// Worker threads for the starts; 0 uses rayon's default.
    pub workers: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            n_starts: 1000,
            seed: 0,
            candidate_grid_size: 21,
            max_sweeps: 50,
            improvement_tol: 1e-10,
            refine: true,
            workers: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_starts == 0 {
            return Err(Error::Config("at least one start is required".into()));
        }
        if self.candidate_grid_size < 3 || self.candidate_grid_size.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "candidate grid size must be odd and at least 3, got {}",
                self.candidate_grid_size
            )));
        }
        if self.max_sweeps == 0 {
            return Err(Error::Config("max_sweeps must be positive".into()));
        }
        if !(self.improvement_tol > 0.0) {
            return Err(Error::Config("improvement_tol must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct OptimizerResult {
    pub best_design: Design,
    pub best_value: f64,
    /// Final criterion value of every start, in start order.
    pub per_start_values: Vec<CriterionValue>,
    pub winning_start_index: usize,
    /// Sweeps performed by the winning start.
    pub sweeps_used: usize,
}

/// Outcome of a single start.
#[derive(Debug, Clone)]
pub struct StartOutcome {
    pub design: Design,
    /// Criterion of the final design, re-evaluated from scratch.
    pub value: CriterionValue,
    pub sweeps: usize,
    /// Criterion after every coordinate exchange, preceded by the starting
    /// value. Empty unless requested.
    pub trace: Vec<CriterionValue>,
}

/// `Ψ_A` of a design.
pub fn evaluate_design(spec: &ProblemSpec, design: &Design) -> Result<CriterionValue> {
    let z = build_model_matrix(spec, design)?;
    Ok(a_criterion(&information_matrix(&z.z)))
}

/// Random stream for start `start` under `seed`.
pub fn start_stream(seed: u64, start: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(start as u64);
    rng
}

/// Draws every coordinate independently and uniformly on its bounds (or
/// uniformly among the levels of a discrete scalar factor).
pub fn random_design<R: Rng + ?Sized>(spec: &ProblemSpec, rng: &mut R) -> Design {
    let mut design = Design::centered(spec);
    for c in spec.coordinates() {
        let b = spec.bounds_of(c);
        let v = match c {
            Coordinate::Scalar { factor, .. } => match spec.scalar[factor].level_values() {
                Some(levels) if !levels.is_empty() => levels[rng.gen_range(0..levels.len())],
                _ => b.lower + b.width() * rng.gen::<f64>(),
            },
            Coordinate::Profile { .. } => b.lower + b.width() * rng.gen::<f64>(),
        };
        design.set(c, v.clamp(b.lower, b.upper));
    }
    design
}

/// Re-optimizes one coordinate of `design`, returning the (possibly updated)
/// design and its criterion value. The coordinate changes only if some
/// candidate is strictly better than `current`.
pub fn exchange_coordinate(
    spec: &ProblemSpec,
    config: &OptimizerConfig,
    design: Design,
    coordinate: Coordinate,
    current: CriterionValue,
) -> (Design, CriterionValue) {
    let mut ex = Exchanger::new(spec, config, AOptimality, design);
    ex.current = current;
    ex.exchange(coordinate);
    (ex.design, ex.current)
}

/// Runs start number `start` to convergence.
pub fn run_start(spec: &ProblemSpec, config: &OptimizerConfig, start: usize, record_trace: bool) -> StartOutcome {
    let mut rng = start_stream(config.seed, start);
    let design = random_design(spec, &mut rng);
    let mut ex = Exchanger::new(spec, config, AOptimality, design);
    let coords = spec.coordinates();
    let mut trace = Vec::new();
    if record_trace {
        trace.push(ex.current);
    }

    let mut sweeps = 0;
    while sweeps < config.max_sweeps {
        let before = ex.current;
        for &c in &coords {
            ex.exchange(c);
            if record_trace {
                trace.push(ex.current);
            }
        }
        sweeps += 1;
        let converged = match (before, ex.current) {
            (CriterionValue::Feasible(b), CriterionValue::Feasible(a)) => (b - a) / b < config.improvement_tol,
            (CriterionValue::Infeasible, CriterionValue::Infeasible) => true,
            _ => false,
        };
        if converged {
            break;
        }
    }

    let value = evaluate_design(spec, &ex.design).unwrap_or(CriterionValue::Infeasible);
    StartOutcome {
        design: ex.design,
        value,
        sweeps,
        trace,
    }
}

/// Multi-start coordinate exchange minimizing `tr(M⁻¹)`. The best start wins;
/// ties go to the lowest start index.
pub fn coordinate_exchange(spec: &ProblemSpec, config: &OptimizerConfig) -> Result<OptimizerResult> {
    spec.validate()?;
    config.validate()?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?;
    let outcomes: Vec<StartOutcome> = pool.install(|| {
        (0..config.n_starts)
            .into_par_iter()
            .map(|s| run_start(spec, config, s, false))
            .collect()
    });

    let mut winner: Option<usize> = None;
    for (i, o) in outcomes.iter().enumerate() {
        if winner.map_or(o.value.is_feasible(), |w| o.value.is_better_than(outcomes[w].value)) {
            winner = Some(i);
        }
    }
    let w = winner.ok_or(Error::AllStartsInfeasible {
        starts: config.n_starts,
    })?;
    let per_start_values = outcomes.iter().map(|o| o.value).collect();
    let best = outcomes.into_iter().nth(w).expect("winner index in range");
    Ok(OptimizerResult {
        best_value: best.value.or_infinity(),
        best_design: best.design,
        per_start_values,
        winning_start_index: w,
        sweeps_used: best.sweeps,
    })
}

/// Working state of one start: the design, its model rows, and reusable buffers.
struct Exchanger<'a, C> {
    spec: &'a ProblemSpec,
    config: &'a OptimizerConfig,
    criterion: C,
    layout: RowLayout,
    p: usize,
    design: Design,
    /// Row-major `n × p` model matrix of `design`.
    rows: Vec<f64>,
    current: CriterionValue,
    /// Information matrix without the run being exchanged.
    others: Vec<f64>,
    info: Vec<f64>,
    row: Vec<f64>,
    scratch: Vec<f64>,
}

impl<'a, C: Criterion> Exchanger<'a, C> {
    fn new(spec: &'a ProblemSpec, config: &'a OptimizerConfig, criterion: C, design: Design) -> Self {
        let p = spec.parameter_count();
        let n = spec.runs;
        let mut rows = vec![0.0; n * p];
        for i in 0..n {
            spec.model_row(&design, i, &mut rows[i * p..(i + 1) * p]);
        }
        let mut ex = Self {
            spec,
            config,
            criterion,
            layout: spec.layout(),
            p,
            design,
            rows,
            current: CriterionValue::Infeasible,
            others: vec![0.0; p * p],
            info: vec![0.0; p * p],
            row: vec![0.0; p],
            scratch: Vec::with_capacity(p * p + p),
        };
        ex.exclude_run(usize::MAX);
        ex.info.copy_from_slice(&ex.others);
        ex.current = ex.criterion.evaluate(&ex.info, p, &mut ex.scratch);
        ex
    }

    /// Sets `others` to the information matrix of all runs except `skip`.
    fn exclude_run(&mut self, skip: usize) {
        let p = self.p;
        self.others.iter_mut().for_each(|v| *v = 0.0);
        for (i, r) in self.rows.chunks_exact(p).enumerate() {
            if i == skip {
                continue;
            }
            for a in 0..p {
                for b in a..p {
                    self.others[a * p + b] += r[a] * r[b];
                }
            }
        }
        for a in 0..p {
            for b in 0..a {
                self.others[a * p + b] = self.others[b * p + a];
            }
        }
    }

    /// Criterion with coordinate `c` (in run `run`) moved from `base` to `x`.
    fn candidate(&mut self, c: Coordinate, run: usize, base: f64, x: f64) -> CriterionValue {
        let p = self.p;
        self.row.copy_from_slice(&self.rows[run * p..(run + 1) * p]);
        match c {
            Coordinate::Profile { factor, index, .. } => {
                let w = &self.spec.profile[factor].cross_integral().0;
                let off = self.layout.profile[factor];
                let delta = x - base;
                for m in 0..w.ncols() {
                    self.row[off + m] += delta * w[(index, m)];
                }
            }
            Coordinate::Scalar { factor, .. } => {
                self.row[self.layout.main + factor] = x;
                if let Some(q) = self.layout.quad[factor] {
                    self.row[q] = x * x;
                }
            }
        }
        for a in 0..p {
            for b in 0..p {
                self.info[a * p + b] = self.others[a * p + b] + self.row[a] * self.row[b];
            }
        }
        self.criterion.evaluate(&self.info, p, &mut self.scratch)
    }

    /// Re-optimizes one coordinate; returns whether it changed.
    fn exchange(&mut self, c: Coordinate) -> bool {
        let run = match c {
            Coordinate::Profile { run, .. } | Coordinate::Scalar { run, .. } => run,
        };
        let bounds = self.spec.bounds_of(c);
        let base = self.design.get(c);
        self.exclude_run(run);

        let levels = match c {
            Coordinate::Scalar { factor, .. } => self.spec.scalar[factor].level_values(),
            Coordinate::Profile { .. } => None,
        };
        let discrete = levels.is_some();
        let grid = levels.unwrap_or_else(|| equispaced(bounds, self.config.candidate_grid_size));

        let mut best: Option<(usize, f64, CriterionValue)> = None;
        for (k, &x) in grid.iter().enumerate() {
            let v = self.candidate(c, run, base, x);
            if best.map_or(v.is_feasible(), |(_, _, bv)| v.is_better_than(bv)) {
                best = Some((k, x, v));
            }
        }

        if let (Some((k, _, bv)), true, false) = (best, self.config.refine, discrete) {
            let lo = grid[k.saturating_sub(1)];
            let hi = grid[(k + 1).min(grid.len() - 1)];
            if hi > lo {
                let tol = REFINE_TOL * bounds.width();
                let (x, fx) = golden_section(|x| self.candidate(c, run, base, x).or_infinity(), lo, hi, tol);
                if fx < bv.or_infinity() {
                    best = Some((k, x, CriterionValue::Feasible(fx)));
                }
            }
        }

        match best {
            Some((_, x, v)) if v.is_better_than(self.current) => {
                self.design.set(c, x);
                let p = self.p;
                self.spec
                    .model_row(&self.design, run, &mut self.rows[run * p..(run + 1) * p]);
                self.current = v;
                true
            }
            _ => false,
        }
    }
}
