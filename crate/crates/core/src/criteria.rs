//! Information matrix, the A-optimality objective `tr(M⁻¹)`, and relative
//! A-efficiency.

use std::cmp::Ordering;
use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Largest accepted condition estimate of `M` before a design is treated as
/// unidentifiable.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Objective value of a design; infeasible designs compare worse than any
/// feasible one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CriterionValue {
    Feasible(f64),
    Infeasible,
}

impl CriterionValue {
    pub fn value(self) -> Option<f64> {
        match self {
            Self::Feasible(v) => Some(v),
            Self::Infeasible => None,
        }
    }

    pub fn is_feasible(self) -> bool {
        matches!(self, Self::Feasible(_))
    }

    /// `+∞` for infeasible values.
    pub fn or_infinity(self) -> f64 {
        self.value().unwrap_or(f64::INFINITY)
    }

    /// Strict improvement: `self` is feasible and lower than `other`.
    pub fn is_better_than(self, other: Self) -> bool {
        match (self, other) {
            (Self::Feasible(a), Self::Feasible(b)) => a < b,
            (Self::Feasible(_), Self::Infeasible) => true,
            (Self::Infeasible, _) => false,
        }
    }

    pub fn compare(self, other: Self) -> Ordering {
        if self.is_better_than(other) {
            Ordering::Less
        } else if other.is_better_than(self) {
            Ordering::Greater
        } else {
            Ordering::Equal
        }
    }
}

impl fmt::Display for CriterionValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Feasible(v) => write!(f, "{v}"),
            Self::Infeasible => f.write_str("infeasible"),
        }
    }
}

/// A scalar design criterion on a packed row-major `p × p` information matrix.
/// Lower is better.
pub trait Criterion: Send + Sync {
    fn evaluate(&self, info: &[f64], p: usize, scratch: &mut Vec<f64>) -> CriterionValue;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct AOptimality;

impl Criterion for AOptimality {
    fn evaluate(&self, info: &[f64], p: usize, scratch: &mut Vec<f64>) -> CriterionValue {
        trace_of_inverse(info, p, scratch)
    }
}

/// `M = ZᵀZ`, symmetric by construction.
pub fn information_matrix(z: &DMatrix<f64>) -> DMatrix<f64> {
    let p = z.ncols();
    let mut m = DMatrix::zeros(p, p);
    for a in 0..p {
        for b in a..p {
            let v = z.column(a).dot(&z.column(b));
            m[(a, b)] = v;
            m[(b, a)] = v;
        }
    }
    m
}

/// `Ψ_A(M) = tr(M⁻¹)`, or infeasible when `M` is not numerically positive definite.
pub fn a_criterion(m: &DMatrix<f64>) -> CriterionValue {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return CriterionValue::Infeasible;
    }
    let p = m.nrows();
    let packed: Vec<f64> = (0..p * p).map(|k| m[(k / p, k % p)]).collect();
    let mut scratch = Vec::new();
    trace_of_inverse(&packed, p, &mut scratch)
}

/// Relative A-efficiency `Ψ_A(M_ref) / Ψ_A(M_test)`.
pub fn a_efficiency(m_ref: &DMatrix<f64>, m_test: &DMatrix<f64>) -> Result<f64> {
    if m_ref.shape() != m_test.shape() {
        return Err(Error::DimensionMismatch(format!(
            "information matrices are {:?} and {:?}",
            m_ref.shape(),
            m_test.shape()
        )));
    }
    let r = a_criterion(m_ref).value().ok_or(Error::Singular)?;
    let t = a_criterion(m_test).value().ok_or(Error::Singular)?;
    Ok(r / t)
}

/// Efficiency from two criterion values.
pub fn efficiency_from_values(reference: f64, test: f64) -> f64 {
    reference / test
}

/// Trace of the inverse of a packed SPD matrix via `M = L D Lᵀ` (unit lower
/// `L`): `tr(M⁻¹) = Σ_c Σ_i y_i² / D_i` where `L y = e_c`. Exact for diagonal
/// `M`. The condition estimate `‖M‖_F · tr(M⁻¹)` bounds `κ₂(M)` from above.
pub(crate) fn trace_of_inverse(m: &[f64], p: usize, scratch: &mut Vec<f64>) -> CriterionValue {
    debug_assert_eq!(m.len(), p * p);
    scratch.clear();
    scratch.resize(p * p + 2 * p, 0.0);
    let (l, rest) = scratch.split_at_mut(p * p);
    let (d, y) = rest.split_at_mut(p);

    for j in 0..p {
        let mut dj = m[j * p + j];
        for k in 0..j {
            dj -= l[j * p + k] * l[j * p + k] * d[k];
        }
        if !(dj > 0.0) || !dj.is_finite() {
            return CriterionValue::Infeasible;
        }
        d[j] = dj;
        l[j * p + j] = 1.0;
        for i in j + 1..p {
            let mut s = m[i * p + j];
            for k in 0..j {
                s -= l[i * p + k] * l[j * p + k] * d[k];
            }
            l[i * p + j] = s / dj;
        }
    }

    let mut trace = 0.0;
    for c in 0..p {
        for i in c..p {
            let mut s = if i == c { 1.0 } else { 0.0 };
            for k in c..i {
                s -= l[i * p + k] * y[k];
            }
            y[i] = s;
            trace += s * s / d[i];
        }
    }

    let frob = m.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !trace.is_finite() || frob * trace > CONDITION_LIMIT {
        return CriterionValue::Infeasible;
    }
    CriterionValue::Feasible(trace)
}
