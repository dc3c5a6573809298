//! Finite basis systems on a time interval `[lower, upper]`.
//!
//! Profile factors are expanded in a step (piecewise-constant) or degree-1
//! B-spline basis; functional parameters in a power series basis. Coupling
//! the two is done through the matrix of cross integrals
//! `W[l][m] = ∫ c_l(t) b_m(t) dt`, computed here in closed form.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Strictly increasing breakpoints (or knots), endpoints included.
#[derive(Debug, Clone, PartialEq)]
pub struct BreakpointGrid {
    points: Vec<f64>,
}

impl BreakpointGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 points, got {}",
                points.len()
            )));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidGrid("non-finite breakpoint".into()));
        }
        if let Some(w) = points.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGrid(format!(
                "breakpoints must be strictly increasing ({} >= {})",
                w[0], w[1]
            )));
        }
        Ok(Self { points })
    }

    /// `n_intervals + 1` equally spaced points on `[lower, upper]`.
    pub fn uniform(lower: f64, upper: f64, n_intervals: usize) -> Result<Self> {
        if n_intervals == 0 {
            return Err(Error::InvalidGrid("interval count must be positive".into()));
        }
        if !(lower < upper) {
            return Err(Error::InvalidGrid(format!(
                "lower ({lower}) must be below upper ({upper})"
            )));
        }
        let width = upper - lower;
        let points = (0..=n_intervals)
            .map(|k| lower + k as f64 * width / n_intervals as f64)
            .collect();
        Self::new(points)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn lower(&self) -> f64 {
        self.points[0]
    }

    pub fn upper(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    pub fn n_intervals(&self) -> usize {
        self.points.len() - 1
    }

    /// Index of the half-open interval `[λ_k, λ_{k+1})` holding `t`; the last
    /// interval is closed at `upper`.
    pub fn interval_of(&self, t: f64) -> Result<usize> {
        if !(t >= self.lower() && t <= self.upper()) {
            return Err(Error::OutOfDomain {
                t,
                lower: self.lower(),
                upper: self.upper(),
            });
        }
        let k = self.points.partition_point(|&p| p <= t);
        Ok((k - 1).min(self.n_intervals() - 1))
    }
}

/// Free-function form of [`BreakpointGrid::uniform`].
pub fn make_uniform_grid(lower: f64, upper: f64, n_intervals: usize) -> Result<BreakpointGrid> {
    BreakpointGrid::uniform(lower, upper, n_intervals)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    Step,
    BSpline1,
    Power,
}

/// An evaluable finite basis on a closed interval.
#[derive(Debug, Clone, PartialEq)]
pub enum BasisSystem {
    /// Interval indicators, one per breakpoint interval.
    Step(BreakpointGrid),
    /// Degree-1 B-splines (hat functions), one per knot; the end knots carry half-hats.
    BSpline1(BreakpointGrid),
    /// Monomials `1, t, ..., t^degree`.
    Power { degree: usize, lower: f64, upper: f64 },
}

impl BasisSystem {
    /// Step basis with `size` equal intervals on `[lower, upper]`.
    pub fn uniform_step(lower: f64, upper: f64, size: usize) -> Result<Self> {
        Ok(Self::Step(BreakpointGrid::uniform(lower, upper, size)?))
    }

    /// Degree-1 B-spline basis of `size` hat functions on `size` equally spaced knots.
    pub fn uniform_bspline1(lower: f64, upper: f64, size: usize) -> Result<Self> {
        if size < 2 {
            return Err(Error::InvalidGrid(format!(
                "degree-1 B-spline basis needs at least 2 functions, got {size}"
            )));
        }
        Ok(Self::BSpline1(BreakpointGrid::uniform(lower, upper, size - 1)?))
    }

    pub fn power(degree: usize, lower: f64, upper: f64) -> Result<Self> {
        if !(lower < upper) || !lower.is_finite() || !upper.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "invalid power-basis domain [{lower}, {upper}]"
            )));
        }
        Ok(Self::Power {
            degree,
            lower,
            upper,
        })
    }

    pub fn kind(&self) -> BasisKind {
        match self {
            Self::Step(_) => BasisKind::Step,
            Self::BSpline1(_) => BasisKind::BSpline1,
            Self::Power { .. } => BasisKind::Power,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Self::Step(g) => g.n_intervals(),
            Self::BSpline1(g) => g.points().len(),
            Self::Power { degree, .. } => degree + 1,
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        match self {
            Self::Step(g) | Self::BSpline1(g) => (g.lower(), g.upper()),
            Self::Power { lower, upper, .. } => (*lower, *upper),
        }
    }

    pub fn grid(&self) -> Option<&BreakpointGrid> {
        match self {
            Self::Step(g) | Self::BSpline1(g) => Some(g),
            Self::Power { .. } => None,
        }
    }

    /// Values of every basis function at `t`.
    pub fn eval(&self, t: f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.size()];
        self.eval_into(t, &mut out)?;
        Ok(out)
    }

    /// Like [`eval`](Self::eval), writing into a caller-provided slice of length `size()`.
    pub fn eval_into(&self, t: f64, out: &mut [f64]) -> Result<()> {
        debug_assert_eq!(out.len(), self.size());
        let (lower, upper) = self.domain();
        if !(t >= lower && t <= upper) {
            return Err(Error::OutOfDomain { t, lower, upper });
        }
        out.iter_mut().for_each(|v| *v = 0.0);
        match self {
            Self::Step(g) => out[g.interval_of(t)?] = 1.0,
            Self::BSpline1(g) => {
                let k = g.interval_of(t)?;
                let (a, b) = (g.points()[k], g.points()[k + 1]);
                let right = (t - a) / (b - a);
                out[k] = 1.0 - right;
                out[k + 1] = right;
            }
            Self::Power { .. } => {
                let mut v = 1.0;
                for o in out.iter_mut() {
                    *o = v;
                    v *= t;
                }
            }
        }
        Ok(())
    }
}

/// Free-function form of [`BasisSystem::eval`].
pub fn eval_basis(basis: &BasisSystem, t: f64) -> Result<Vec<f64>> {
    basis.eval(t)
}

/// `n_x × n_β` matrix with entries `∫ c_l(t) b_m(t) dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossIntegralMatrix(pub DMatrix<f64>);

impl CrossIntegralMatrix {
    pub fn values(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn nrows(&self) -> usize {
        self.0.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.0.ncols()
    }
}

/// Closed-form cross integrals between an x-basis (step or degree-1 B-spline)
/// and a power-series β-basis on the same domain.
pub fn cross_integral(x_basis: &BasisSystem, beta_basis: &BasisSystem) -> Result<CrossIntegralMatrix> {
    let (xl, xu) = x_basis.domain();
    let (bl, bu) = beta_basis.domain();
    if xl != bl || xu != bu {
        return Err(Error::DomainMismatch(xl, xu, bl, bu));
    }
    let degree = match beta_basis {
        BasisSystem::Power { degree, .. } => *degree,
        other => {
            return Err(Error::UnsupportedPairing(format!(
                "β-basis must be a power basis, got {:?}",
                other.kind()
            )))
        }
    };
    let n_beta = degree + 1;
    match x_basis {
        BasisSystem::Step(g) => {
            let pts = g.points();
            let w = DMatrix::from_fn(g.n_intervals(), n_beta, |l, m| {
                let e = (m + 1) as i32;
                (pts[l + 1].powi(e) - pts[l].powi(e)) / e as f64
            });
            Ok(CrossIntegralMatrix(w))
        }
        BasisSystem::BSpline1(g) => {
            let pts = g.points();
            let mut w = DMatrix::zeros(pts.len(), n_beta);
            for (k, span) in pts.windows(2).enumerate() {
                let (a, h) = (span[0], span[1] - span[0]);
                for m in 0..n_beta {
                    let (down, up) = hat_moments(a, h, m);
                    w[(k, m)] += down;
                    w[(k + 1, m)] += up;
                }
            }
            Ok(CrossIntegralMatrix(w))
        }
        BasisSystem::Power { .. } => Err(Error::UnsupportedPairing(
            "x-basis must be a step or degree-1 B-spline basis".into(),
        )),
    }
}

/// Integrals of `t^m` against the descending and ascending hat halves on the
/// span `[a, a + h]`, expanded in `s = t − a` to avoid cancellation.
fn hat_moments(a: f64, h: f64, m: usize) -> (f64, f64) {
    let mut down = 0.0;
    let mut up = 0.0;
    let mut binom = 1.0;
    for r in 0..=m {
        // t^m = Σ C(m, r) a^(m−r) s^r
        let coef = binom * a.powi((m - r) as i32);
        let hr = h.powi(r as i32 + 1);
        let rf = r as f64;
        up += coef * hr / (rf + 2.0);
        down += coef * hr / ((rf + 1.0) * (rf + 2.0));
        binom = binom * (m - r) as f64 / (rf + 1.0);
    }
    (down, up)
}
