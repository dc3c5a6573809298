//! Problem description, designs, and the collapsed linear-model matrix
//! `Z = [1 | J | X]`.
//!
//! Each profile factor contributes a block `J_j = Γ_j W_j`, where `W_j` is
//! the cross-integral matrix of its x- and β-bases. Scalar factors contribute
//! their main-effect columns followed by any quadratic-effect columns.

use nalgebra::{DMatrix, DVector};

use crate::basis::{cross_integral, BasisKind, BasisSystem, CrossIntegralMatrix};
use crate::error::{Error, Result};

/// Closed interval of admissible settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

impl Bounds {
    /// Degenerate intervals (`lower == upper`) are allowed here; [`ProblemSpec::validate`]
    /// rejects them for searchable problems.
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !lower.is_finite() || !upper.is_finite() || lower > upper {
            return Err(Error::InvalidBounds(lower, upper));
        }
        Ok(Self { lower, upper })
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lower && v <= self.upper
    }
}

/// One profile factor: the basis for its settings `x(t)`, the basis for its
/// functional parameter `β(t)`, and the admissible range of `x(t)`.
#[derive(Debug, Clone)]
pub struct ProfileFactorSpec {
    x_basis: BasisSystem,
    beta_basis: BasisSystem,
    bounds: Bounds,
    cross: CrossIntegralMatrix,
}

impl ProfileFactorSpec {
    pub fn new(x_basis: BasisSystem, beta_basis: BasisSystem, bounds: Bounds) -> Result<Self> {
        if x_basis.kind() == BasisKind::Power {
            return Err(Error::UnsupportedPairing(
                "profile settings need a step or degree-1 B-spline basis".into(),
            ));
        }
        let cross = cross_integral(&x_basis, &beta_basis)?;
        Ok(Self {
            x_basis,
            beta_basis,
            bounds,
            cross,
        })
    }

    pub fn x_basis(&self) -> &BasisSystem {
        &self.x_basis
    }

    pub fn beta_basis(&self) -> &BasisSystem {
        &self.beta_basis
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    /// The cross-integral matrix `W` of this factor's bases.
    pub fn cross_integral(&self) -> &CrossIntegralMatrix {
        &self.cross
    }

    pub fn n_x(&self) -> usize {
        self.x_basis.size()
    }

    pub fn n_beta(&self) -> usize {
        self.beta_basis.size()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EffectModel {
    MainOnly,
    MainPlusQuadratic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarFactorSpec {
    pub bounds: Bounds,
    pub effect: EffectModel,
    /// Restricts the factor to this many equally spaced levels (bounds included).
    /// `None` means the setting is continuous.
    pub levels: Option<usize>,
}

impl ScalarFactorSpec {
    pub fn new(bounds: Bounds, effect: EffectModel) -> Self {
        Self {
            bounds,
            effect,
            levels: None,
        }
    }

    pub fn with_levels(mut self, levels: usize) -> Self {
        self.levels = Some(levels);
        self
    }

    /// Candidate values when the factor is discrete.
    pub fn level_values(&self) -> Option<Vec<f64>> {
        self.levels.map(|k| equispaced(self.bounds, k))
    }
}

/// `k` equally spaced values spanning `bounds`, endpoints exact.
pub(crate) fn equispaced(bounds: Bounds, k: usize) -> Vec<f64> {
    match k {
        0 => Vec::new(),
        1 => vec![bounds.midpoint()],
        _ => (0..k)
            .map(|i| {
                if i == k - 1 {
                    bounds.upper
                } else {
                    bounds.lower + i as f64 * bounds.width() / (k - 1) as f64
                }
            })
            .collect(),
    }
}

/// A full experiment: run count plus profile and scalar factors. An
/// intercept is always part of the model.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub runs: usize,
    pub profile: Vec<ProfileFactorSpec>,
    pub scalar: Vec<ScalarFactorSpec>,
}

/// Addresses one decision variable of a [`Design`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coordinate {
    /// `Γ_factor[run, index]`.
    Profile {
        factor: usize,
        run: usize,
        index: usize,
    },
    /// Setting of scalar factor `factor` in run `run`.
    Scalar { run: usize, factor: usize },
}

impl ProblemSpec {
    pub fn new(runs: usize, profile: Vec<ProfileFactorSpec>, scalar: Vec<ScalarFactorSpec>) -> Self {
        Self {
            runs,
            profile,
            scalar,
        }
    }

    pub fn quadratic_count(&self) -> usize {
        self.scalar
            .iter()
            .filter(|s| s.effect == EffectModel::MainPlusQuadratic)
            .count()
    }

    /// Number of columns of `Z`.
    pub fn parameter_count(&self) -> usize {
        1 + self.profile.iter().map(|f| f.n_beta()).sum::<usize>()
            + self.scalar.len()
            + self.quadratic_count()
    }

    pub fn coordinate_count(&self) -> usize {
        self.runs * (self.profile.iter().map(|f| f.n_x()).sum::<usize>() + self.scalar.len())
    }

    /// Decision variables in sweep order: profile factors in order, each Γ
    /// row-major; then the scalar matrix row-major.
    pub fn coordinates(&self) -> Vec<Coordinate> {
        let mut out = Vec::with_capacity(self.coordinate_count());
        for (factor, f) in self.profile.iter().enumerate() {
            for run in 0..self.runs {
                for index in 0..f.n_x() {
                    out.push(Coordinate::Profile { factor, run, index });
                }
            }
        }
        for run in 0..self.runs {
            for factor in 0..self.scalar.len() {
                out.push(Coordinate::Scalar { run, factor });
            }
        }
        out
    }

    pub fn bounds_of(&self, c: Coordinate) -> Bounds {
        match c {
            Coordinate::Profile { factor, .. } => self.profile[factor].bounds,
            Coordinate::Scalar { factor, .. } => self.scalar[factor].bounds,
        }
    }

    /// Checks that a design search on this problem is meaningful: bounds are
    /// non-degenerate and the collapsed model can have full column rank.
    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::Identifiability("run count must be positive".into()));
        }
        for (j, f) in self.profile.iter().enumerate() {
            let b = f.bounds;
            if !(b.lower < b.upper) {
                return Err(Error::InvalidBounds(b.lower, b.upper));
            }
            if f.n_x() < f.n_beta() {
                return Err(Error::Identifiability(format!(
                    "profile factor {} has {} x-basis functions but {} β-basis functions",
                    j + 1,
                    f.n_x(),
                    f.n_beta()
                )));
            }
        }
        for s in &self.scalar {
            if !(s.bounds.lower < s.bounds.upper) {
                return Err(Error::InvalidBounds(s.bounds.lower, s.bounds.upper));
            }
            match (s.effect, s.levels) {
                (_, Some(k)) if k < 2 => {
                    return Err(Error::Config(format!(
                        "a discrete scalar factor needs at least 2 levels, got {k}"
                    )))
                }
                (EffectModel::MainPlusQuadratic, Some(2)) => {
                    return Err(Error::Identifiability(
                        "a quadratic effect needs at least 3 levels".into(),
                    ))
                }
                _ => {}
            }
        }
        let p = self.parameter_count();
        if self.runs < p {
            return Err(Error::Identifiability(format!(
                "{} runs cannot identify {} parameters",
                self.runs, p
            )));
        }
        Ok(())
    }

    /// Labels for the columns of `Z`, in column order.
    pub fn column_labels(&self) -> Vec<String> {
        let mut labels = vec!["intercept".to_string()];
        for (j, f) in self.profile.iter().enumerate() {
            for m in 0..f.n_beta() {
                labels.push(format!("theta_{}_{}", j + 1, m + 1));
            }
        }
        for k in 0..self.scalar.len() {
            labels.push(format!("main_{}", k + 1));
        }
        for (k, s) in self.scalar.iter().enumerate() {
            if s.effect == EffectModel::MainPlusQuadratic {
                labels.push(format!("quad_{}", k + 1));
            }
        }
        labels
    }

    /// Checks shapes and bounds of `design` against this problem.
    pub fn check_design(&self, design: &Design) -> Result<()> {
        if design.gammas.len() != self.profile.len() {
            return Err(Error::DimensionMismatch(format!(
                "design has {} profile blocks, problem has {}",
                design.gammas.len(),
                self.profile.len()
            )));
        }
        for (j, (g, f)) in design.gammas.iter().zip(&self.profile).enumerate() {
            if g.nrows() != self.runs || g.ncols() != f.n_x() {
                return Err(Error::DimensionMismatch(format!(
                    "Γ_{} is {}×{}, expected {}×{}",
                    j + 1,
                    g.nrows(),
                    g.ncols(),
                    self.runs,
                    f.n_x()
                )));
            }
            check_in_bounds(g.iter(), f.bounds, &format!("Γ_{}", j + 1))?;
        }
        if design.scalars.nrows() != self.runs || design.scalars.ncols() != self.scalar.len() {
            return Err(Error::DimensionMismatch(format!(
                "scalar settings are {}×{}, expected {}×{}",
                design.scalars.nrows(),
                design.scalars.ncols(),
                self.runs,
                self.scalar.len()
            )));
        }
        for (k, s) in self.scalar.iter().enumerate() {
            check_in_bounds(design.scalars.column(k).iter(), s.bounds, &format!("scalar factor {}", k + 1))?;
        }
        Ok(())
    }

    /// Writes row `run` of `Z` into `out` (length `parameter_count()`).
    pub(crate) fn model_row(&self, design: &Design, run: usize, out: &mut [f64]) {
        out[0] = 1.0;
        let mut col = 1;
        for (f, g) in self.profile.iter().zip(&design.gammas) {
            let w = &f.cross.0;
            for m in 0..w.ncols() {
                out[col + m] = (0..w.nrows()).map(|l| g[(run, l)] * w[(l, m)]).sum();
            }
            col += w.ncols();
        }
        let f2 = self.scalar.len();
        for k in 0..f2 {
            out[col + k] = design.scalars[(run, k)];
        }
        col += f2;
        for (k, s) in self.scalar.iter().enumerate() {
            if s.effect == EffectModel::MainPlusQuadratic {
                let x = design.scalars[(run, k)];
                out[col] = x * x;
                col += 1;
            }
        }
    }

    /// Column offsets of each profile block and of the scalar main/quadratic
    /// columns within a row of `Z`.
    pub(crate) fn layout(&self) -> RowLayout {
        let mut profile = Vec::with_capacity(self.profile.len());
        let mut col = 1;
        for f in &self.profile {
            profile.push(col);
            col += f.n_beta();
        }
        let main = col;
        col += self.scalar.len();
        let quad = self
            .scalar
            .iter()
            .map(|s| {
                (s.effect == EffectModel::MainPlusQuadratic).then(|| {
                    col += 1;
                    col - 1
                })
            })
            .collect();
        RowLayout { profile, main, quad }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct RowLayout {
    pub profile: Vec<usize>,
    pub main: usize,
    pub quad: Vec<Option<usize>>,
}

fn check_in_bounds<'a>(values: impl Iterator<Item = &'a f64>, b: Bounds, what: &str) -> Result<()> {
    for &v in values {
        if !b.contains(v) {
            return Err(Error::OutOfBounds {
                what: what.to_string(),
                value: v,
                lower: b.lower,
                upper: b.upper,
            });
        }
    }
    Ok(())
}

/// Decision variables: one `n × n_x` coefficient matrix per profile factor
/// and an `n × f₂` matrix of scalar settings. Row `i` of every block is run `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub gammas: Vec<DMatrix<f64>>,
    pub scalars: DMatrix<f64>,
}

impl Design {
    /// A design with every coordinate set to the midpoint of its bounds.
    pub fn centered(spec: &ProblemSpec) -> Self {
        let gammas = spec
            .profile
            .iter()
            .map(|f| DMatrix::from_element(spec.runs, f.n_x(), f.bounds.midpoint()))
            .collect();
        let scalars = DMatrix::from_fn(spec.runs, spec.scalar.len(), |_, k| {
            spec.scalar[k].bounds.midpoint()
        });
        Self { gammas, scalars }
    }

    pub fn get(&self, c: Coordinate) -> f64 {
        match c {
            Coordinate::Profile { factor, run, index } => self.gammas[factor][(run, index)],
            Coordinate::Scalar { run, factor } => self.scalars[(run, factor)],
        }
    }

    pub fn set(&mut self, c: Coordinate, value: f64) {
        match c {
            Coordinate::Profile { factor, run, index } => self.gammas[factor][(run, index)] = value,
            Coordinate::Scalar { run, factor } => self.scalars[(run, factor)] = value,
        }
    }

    /// Reorders runs: run `i` of the result is run `perm[i]` of `self`.
    pub fn permute_runs(&self, perm: &[usize]) -> Self {
        let rows = |m: &DMatrix<f64>| DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(perm[i], j)]);
        Self {
            gammas: self.gammas.iter().map(rows).collect(),
            scalars: rows(&self.scalars),
        }
    }

    /// Samples the profile function of `factor` for every run at each `t`.
    /// Returns a `t.len() × n` matrix.
    pub fn sample_profile(&self, spec: &ProblemSpec, factor: usize, ts: &[f64]) -> Result<DMatrix<f64>> {
        let f = &spec.profile[factor];
        let g = &self.gammas[factor];
        let mut basis = vec![0.0; f.n_x()];
        let mut out = DMatrix::zeros(ts.len(), spec.runs);
        for (r, &t) in ts.iter().enumerate() {
            f.x_basis.eval_into(t, &mut basis)?;
            for i in 0..spec.runs {
                out[(r, i)] = basis.iter().enumerate().map(|(l, c)| g[(i, l)] * c).sum();
            }
        }
        Ok(out)
    }
}

/// The collapsed model matrix with its column labels.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelMatrix {
    pub z: DMatrix<f64>,
    pub column_labels: Vec<String>,
}

/// `J = Γ W`: the profile block of `Z` for one factor.
pub fn build_j(gamma: &DMatrix<f64>, w: &CrossIntegralMatrix) -> Result<DMatrix<f64>> {
    if gamma.ncols() != w.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "Γ has {} columns but W has {} rows",
            gamma.ncols(),
            w.nrows()
        )));
    }
    Ok(gamma * &w.0)
}

/// Main-effect columns for every factor, followed by quadratic columns for
/// the factors that carry a quadratic effect.
pub fn scalar_effect_columns(settings: &DMatrix<f64>, specs: &[ScalarFactorSpec]) -> Result<DMatrix<f64>> {
    if settings.ncols() != specs.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} setting columns for {} scalar factors",
            settings.ncols(),
            specs.len()
        )));
    }
    for (k, s) in specs.iter().enumerate() {
        check_in_bounds(settings.column(k).iter(), s.bounds, &format!("scalar factor {}", k + 1))?;
    }
    let quad: Vec<usize> = specs
        .iter()
        .enumerate()
        .filter(|(_, s)| s.effect == EffectModel::MainPlusQuadratic)
        .map(|(k, _)| k)
        .collect();
    let n = settings.nrows();
    let f2 = specs.len();
    let mut out = DMatrix::zeros(n, f2 + quad.len());
    out.columns_mut(0, f2).copy_from(settings);
    for (c, &k) in quad.iter().enumerate() {
        out.set_column(f2 + c, &settings.column(k).map(|x| x * x));
    }
    Ok(out)
}

/// Assembles `Z = [1 | J_1 … J_f₁ | scalar effects]`.
pub fn build_model_matrix(spec: &ProblemSpec, design: &Design) -> Result<ModelMatrix> {
    spec.check_design(design)?;
    let n = spec.runs;
    let mut blocks: Vec<DMatrix<f64>> = vec![DMatrix::from_element(n, 1, 1.0)];
    for (f, g) in spec.profile.iter().zip(&design.gammas) {
        blocks.push(build_j(g, &f.cross)?);
    }
    blocks.push(scalar_effect_columns(&design.scalars, &spec.scalar)?);
    let p: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut z = DMatrix::zeros(n, p);
    let mut col = 0;
    for b in &blocks {
        z.columns_mut(col, b.ncols()).copy_from(b);
        col += b.ncols();
    }
    Ok(ModelMatrix {
        z,
        column_labels: spec.column_labels(),
    })
}

/// Least-squares coefficients `ν̂ = (ZᵀZ)⁻¹ Zᵀ y`, solved through an SVD of `Z`.
pub fn least_squares_estimate(z: &ModelMatrix, y: &DVector<f64>) -> Result<DVector<f64>> {
    let zm = &z.z;
    if zm.nrows() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "Z has {} rows, y has {} entries",
            zm.nrows(),
            y.len()
        )));
    }
    if zm.nrows() < zm.ncols() {
        return Err(Error::Singular);
    }
    let svd = zm.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    // squared singular values are the eigenvalues of M
    if !(smin > 0.0) || (smax / smin).powi(2) > 1e12 {
        return Err(Error::Singular);
    }
    svd.solve(y, 0.0).map_err(|_| Error::Singular)
}
