//! Brute-force references: composite Simpson quadrature for cross integrals
//! and exhaustive enumeration of vertex designs for small problems.

use nalgebra::DMatrix;

use crate::basis::{BasisSystem, CrossIntegralMatrix};
use crate::criteria::CriterionValue;
use crate::error::{Error, Result};
use crate::model::{Coordinate, Design, EffectModel, ProblemSpec};
use crate::optimizer::evaluate_design;

/// Largest number of design coordinates [`exhaustive_vertex_search`] accepts.
pub const MAX_ENUMERATED_COORDINATES: usize = 16;

/// Composite Simpson rule with `panels` subintervals in total.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureRule {
    panels: usize,
}

impl QuadratureRule {
    pub fn new(panels: usize) -> Result<Self> {
        if panels < 2 || !panels.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "Simpson panel count must be even and at least 2, got {panels}"
            )));
        }
        Ok(Self { panels })
    }

    pub fn panels(&self) -> usize {
        self.panels
    }
}

impl Default for QuadratureRule {
    fn default() -> Self {
        Self { panels: 10_000 }
    }
}

/// Largest float strictly below `b`.
fn prev_float(b: f64) -> f64 {
    if b > 0.0 {
        f64::from_bits(b.to_bits() - 1)
    } else if b < 0.0 {
        f64::from_bits(b.to_bits() + 1)
    } else {
        -f64::from_bits(1)
    }
}

/// Simpson approximation of every `∫ c_l(t) b_m(t) dt`. Panels are laid per
/// span of the x-basis grid, so piecewise-polynomial integrands of degree ≤ 3
/// are integrated exactly up to rounding. Basis values at the right end of a
/// span are taken as left limits.
pub fn quad_cross_integral(
    x_basis: &BasisSystem,
    beta_basis: &BasisSystem,
    rule: QuadratureRule,
) -> Result<CrossIntegralMatrix> {
    let (xl, xu) = x_basis.domain();
    let (bl, bu) = beta_basis.domain();
    if xl != bl || xu != bu {
        return Err(Error::DomainMismatch(xl, xu, bl, bu));
    }
    let spans: Vec<f64> = match x_basis.grid() {
        Some(g) => g.points().to_vec(),
        None => vec![xl, xu],
    };
    let n_spans = spans.len() - 1;
    let mut per_span = (rule.panels / n_spans).max(2);
    per_span += per_span % 2;

    let (nx, nb) = (x_basis.size(), beta_basis.size());
    let mut w = DMatrix::zeros(nx, nb);
    let mut cx = vec![0.0; nx];
    let mut cb = vec![0.0; nb];
    for span in spans.windows(2) {
        let (a, b) = (span[0], span[1]);
        let h = (b - a) / per_span as f64;
        for k in 0..=per_span {
            let t = if k == per_span { b } else { a + k as f64 * h };
            let t_eval = if k == per_span { prev_float(b) } else { t };
            let weight = if k == 0 || k == per_span {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            } * h
                / 3.0;
            x_basis.eval_into(t_eval, &mut cx)?;
            // β-basis is smooth across spans; evaluate at the exact point
            beta_basis.eval_into(t, &mut cb)?;
            for l in 0..nx {
                if cx[l] == 0.0 {
                    continue;
                }
                for m in 0..nb {
                    w[(l, m)] += weight * cx[l] * cb[m];
                }
            }
        }
    }
    Ok(CrossIntegralMatrix(w))
}

/// Candidate values for each coordinate on the vertex lattice: the two bounds,
/// plus the midpoint for scalar factors with a quadratic effect.
fn lattice(spec: &ProblemSpec, c: Coordinate) -> Vec<f64> {
    let b = spec.bounds_of(c);
    match c {
        Coordinate::Scalar { factor, .. } if spec.scalar[factor].effect == EffectModel::MainPlusQuadratic => {
            vec![b.lower, b.midpoint(), b.upper]
        }
        _ => vec![b.lower, b.upper],
    }
}

/// Best design on the vertex lattice by full enumeration. Ties keep the
/// lexicographically first design (coordinates in sweep order, lower values
/// first). Returns an infeasible value with the first design when no lattice
/// design is identifiable.
pub fn exhaustive_vertex_search(spec: &ProblemSpec) -> Result<(Design, CriterionValue)> {
    let coords = spec.coordinates();
    if coords.len() > MAX_ENUMERATED_COORDINATES {
        return Err(Error::InstanceTooLarge {
            coordinates: coords.len(),
            limit: MAX_ENUMERATED_COORDINATES,
        });
    }
    let levels: Vec<Vec<f64>> = coords.iter().map(|&c| lattice(spec, c)).collect();
    let mut digits = vec![0usize; coords.len()];
    let mut design = Design::centered(spec);
    let mut best: Option<(Design, CriterionValue)> = None;

    loop {
        for ((&c, lv), &d) in coords.iter().zip(&levels).zip(&digits) {
            design.set(c, lv[d]);
        }
        let v = evaluate_design(spec, &design)?;
        match &best {
            Some((_, bv)) if !v.is_better_than(*bv) => {}
            _ => best = Some((design.clone(), v)),
        }

        // odometer with the last coordinate varying fastest
        let mut pos = coords.len();
        loop {
            if pos == 0 {
                return Ok(best.expect("at least one design enumerated"));
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < levels[pos].len() {
                break;
            }
            digits[pos] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::cross_integral;
    use crate::model::{Bounds, ProfileFactorSpec, ScalarFactorSpec};
    use approx::assert_abs_diff_eq;

    fn unit() -> Bounds {
        Bounds::new(-1.0, 1.0).unwrap()
    }

    #[test]
    fn quadrature_matches_closed_form_on_small_grids() {
        let rule = QuadratureRule::default();
        let step = BasisSystem::uniform_step(0.0, 1.0, 2).unwrap();
        let lin = BasisSystem::power(1, 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(
            quad_cross_integral(&step, &lin, rule).unwrap().0,
            cross_integral(&step, &lin).unwrap().0,
            epsilon = 1e-12
        );
        let hat = BasisSystem::uniform_bspline1(0.0, 1.0, 3).unwrap();
        let quad = BasisSystem::power(2, 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(
            quad_cross_integral(&hat, &quad, rule).unwrap().0,
            cross_integral(&hat, &quad).unwrap().0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn quadrature_of_constants() {
        let c = BasisSystem::power(0, 0.0, 1.0).unwrap();
        let w = quad_cross_integral(&c, &c, QuadratureRule::default()).unwrap();
        assert_abs_diff_eq!(w.0[(0, 0)], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn rule_validation() {
        assert!(QuadratureRule::new(0).is_err());
        assert!(QuadratureRule::new(3).is_err());
        assert_eq!(QuadratureRule::new(4).unwrap().panels(), 4);
    }

    #[test]
    fn single_run_is_always_infeasible() {
        let f = ProfileFactorSpec::new(
            BasisSystem::uniform_step(0.0, 1.0, 2).unwrap(),
            BasisSystem::power(1, 0.0, 1.0).unwrap(),
            unit(),
        )
        .unwrap();
        let spec = ProblemSpec::new(1, vec![f], vec![]);
        let (_, v) = exhaustive_vertex_search(&spec).unwrap();
        assert_eq!(v, CriterionValue::Infeasible);
    }

    #[test]
    fn two_run_scalar_main_effect() {
        let spec = ProblemSpec::new(2, vec![], vec![ScalarFactorSpec::new(unit(), EffectModel::MainOnly)]);
        let (d, v) = exhaustive_vertex_search(&spec).unwrap();
        assert_eq!(v, CriterionValue::Feasible(1.0));
        assert_eq!(d.scalars.as_slice(), &[-1.0, 1.0]);
    }

    #[test]
    fn refuses_large_instances() {
        let f = ProfileFactorSpec::new(
            BasisSystem::uniform_step(0.0, 1.0, 4).unwrap(),
            BasisSystem::power(1, 0.0, 1.0).unwrap(),
            unit(),
        )
        .unwrap();
        let spec = ProblemSpec::new(5, vec![f], vec![]);
        assert!(matches!(
            exhaustive_vertex_search(&spec),
            Err(Error::InstanceTooLarge { coordinates: 20, .. })
        ));
    }
}
