//! Proximal iteration with convergence diagnostics.
//!
//! From a start point in the proximal subset of `Re`, each step picks the
//! candidate of that subset whose gap `||phi(x, F(prev))| - D|` is
//! smallest (ties to the smallest index). The run converges when the
//! consecutive gap `|phi(x_n, x_{n+1})|` drops to `conv_tol`: the iterates
//! stay in the proximal subset, and their gap sequence contracts at rate
//! `2c/(1+c)` whenever the map is a p-proximal contraction with
//! constant `c`.

use serde::Serialize;
use thiserror::Error;

use crate::instance::{proximal_indices, ProblemInstance};
use crate::point::Point;
use crate::{DEFAULT_CONV_TOL, DEFAULT_MAX_ITERS, EPS_DUP};

/// How a run terminated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceStatus {
    Converged,
    MaxIters,
    InfeasibleStep,
}

/// The iterate sequence with per-step diagnostics. `step_gaps[n]` and
/// `feasibility_errors[n]` describe the step from `points[n]` to
/// `points[n+1]`.
#[derive(Debug, Clone, Serialize)]
pub struct IterationTrace {
    pub points: Vec<Point>,
    pub step_gaps: Vec<f64>,
    pub feasibility_errors: Vec<f64>,
    pub status: TraceStatus,
    pub final_residual: f64,
}

impl IterationTrace {
    pub fn final_point(&self) -> &Point {
        self.points.last().expect("trace has a start point")
    }

    pub fn iterations(&self) -> usize {
        self.points.len() - 1
    }
}

/// Knobs of [`iterate`]. `feas_tol: None` selects the default: `eps_eq`
/// on explicit sets, half the largest gap between `|phi|` values of
/// neighbouring grid candidates on sampled ones (a grid rarely achieves
/// the proximal equality exactly).
#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    pub start: Option<Point>,
    pub max_iters: Option<usize>,
    pub conv_tol: Option<f64>,
    pub feas_tol: Option<f64>,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SolveError {
    #[error("proximal subset of Re is empty")]
    EmptyProximalSet,
    #[error("start point {0} is not in the proximal subset of Re")]
    StartNotProximal(Point),
    #[error("no candidate reaches the proximal equality: best error {best} > tolerance {tol}")]
    InfeasibleStep { best: f64, tol: f64 },
}

/// One step of the iteration: the member of the proximal subset whose
/// `||phi(x, F(from))| - D|` is least, ties to the smallest index.
pub fn proximal_step(
    inst: &ProblemInstance,
    from: &Point,
    feas_tol: f64,
) -> Result<(Point, f64), SolveError> {
    let (re_phi, _) = proximal_indices(inst);
    if re_phi.is_empty() {
        return Err(SolveError::EmptyProximalSet);
    }
    let target = inst
        .map()
        .apply(from)
        .expect("map is total on Re by construction");
    let (idx, err) = argmin_step(inst, &re_phi, &target);
    if err > feas_tol {
        return Err(SolveError::InfeasibleStep {
            best: err,
            tol: feas_tol,
        });
    }
    Ok((inst.re().points()[idx].clone(), err))
}

fn argmin_step(inst: &ProblemInstance, re_phi: &[usize], target: &Point) -> (usize, f64) {
    let d = inst.proximity_distance();
    let mut best_idx = re_phi[0];
    let mut best_err = f64::INFINITY;
    for &i in re_phi {
        let err = (inst.phi_abs(&inst.re().points()[i], target) - d).abs();
        if err < best_err {
            best_err = err;
            best_idx = i;
        }
    }
    (best_idx, best_err)
}

/// Default feasibility tolerance; see [`SolveOptions`].
pub fn default_feas_tol(inst: &ProblemInstance, re_phi: &[usize]) -> f64 {
    if inst.re().half_spacing().is_none() {
        return inst.eps_eq();
    }
    // largest |phi| jump between neighbouring candidates, over all step
    // targets the iteration can produce
    let mut max_jump: f64 = 0.0;
    for &b in re_phi {
        let target = inst.image(b);
        for w in re_phi.windows(2) {
            let v0 = inst.phi_abs(&inst.re().points()[w[0]], target);
            let v1 = inst.phi_abs(&inst.re().points()[w[1]], target);
            max_jump = max_jump.max((v1 - v0).abs());
        }
    }
    (max_jump / 2.0).max(inst.eps_eq())
}

/// Run the proximal iteration from `options.start` (default: the first
/// point of the proximal subset) until the consecutive gap falls to
/// `conv_tol`, a step becomes infeasible, or `max_iters` is reached.
pub fn iterate(
    inst: &ProblemInstance,
    options: &SolveOptions,
) -> Result<IterationTrace, SolveError> {
    let (re_phi, _) = proximal_indices(inst);
    if re_phi.is_empty() {
        return Err(SolveError::EmptyProximalSet);
    }
    let conv_tol = options.conv_tol.unwrap_or(DEFAULT_CONV_TOL);
    let max_iters = options.max_iters.unwrap_or(DEFAULT_MAX_ITERS);
    let feas_tol = options
        .feas_tol
        .unwrap_or_else(|| default_feas_tol(inst, &re_phi));

    let start_idx = match &options.start {
        None => re_phi[0],
        Some(p) => *re_phi
            .iter()
            .find(|&&i| inst.re().points()[i].max_dist(p) <= EPS_DUP)
            .ok_or_else(|| SolveError::StartNotProximal(p.clone()))?,
    };

    let mut points = vec![inst.re().points()[start_idx].clone()];
    let mut current = start_idx;
    let mut step_gaps = Vec::new();
    let mut feasibility_errors = Vec::new();
    let mut status = TraceStatus::MaxIters;

    for _ in 0..max_iters {
        let target = inst.image(current);
        let (next, err) = argmin_step(inst, &re_phi, target);
        if err > feas_tol {
            status = TraceStatus::InfeasibleStep;
            break;
        }
        let gap = inst.phi_abs(&inst.re().points()[current], &inst.re().points()[next]);
        points.push(inst.re().points()[next].clone());
        step_gaps.push(gap);
        feasibility_errors.push(err);
        current = next;
        if gap <= conv_tol {
            status = TraceStatus::Converged;
            break;
        }
    }

    let final_residual = residual(inst, &points[points.len() - 1]);
    Ok(IterationTrace {
        points,
        step_gaps,
        feasibility_errors,
        status,
        final_residual,
    })
}

/// `||phi(x, F(x))| - D|`; a value at `eps_eq` or below certifies `x` as
/// a best proximity point of the finite instance.
pub fn residual(inst: &ProblemInstance, x: &Point) -> f64 {
    let image = inst
        .map()
        .apply(x)
        .expect("residual is evaluated on points of Re");
    (inst.phi_abs(x, &image) - inst.proximity_distance()).abs()
}

/// Outcome of checking the geometric bound
/// `step_gaps[n] <= (2c/(1+c))^n * step_gaps[0] + eps`.
#[derive(Debug, Clone, Serialize)]
pub struct RateCheck {
    pub holds: bool,
    pub factor: f64,
    pub first_violation: Option<usize>,
}

/// Verify the contraction-rate bound along a trace for a constant `c`
/// in (0,1).
pub fn rate_check(trace: &IterationTrace, c: f64, eps: f64) -> RateCheck {
    let factor = 2.0 * c / (1.0 + c);
    if trace.step_gaps.is_empty() {
        return RateCheck {
            holds: true,
            factor,
            first_violation: None,
        };
    }
    let g0 = trace.step_gaps[0];
    let mut bound = g0;
    for (n, gap) in trace.step_gaps.iter().enumerate() {
        if *gap > bound + eps {
            return RateCheck {
                holds: false,
                factor,
                first_violation: Some(n),
            };
        }
        bound *= factor;
    }
    RateCheck {
        holds: true,
        factor,
        first_violation: None,
    }
}

/// Tail profile `t_n = max over p <= p_max of |phi(x_n, x_{n+p})|` and a
/// consistency verdict: the final quarter of the profile must sit at or
/// below `conv_tol`.
#[derive(Debug, Clone, Serialize)]
pub struct CauchyProfile {
    pub tail: Vec<f64>,
    pub consistent: bool,
}

pub fn cauchy_profile(
    inst: &ProblemInstance,
    trace: &IterationTrace,
    p_max: usize,
    conv_tol: f64,
) -> CauchyProfile {
    let n = trace.points.len();
    let mut tail = Vec::new();
    for start in 0..n.saturating_sub(1) {
        let mut worst: f64 = 0.0;
        for p in 1..=p_max.min(n - 1 - start) {
            worst = worst.max(inst.phi_abs(&trace.points[start], &trace.points[start + p]));
        }
        tail.push(worst);
    }
    let quarter = (tail.len() / 4).max(1).min(tail.len());
    let consistent =
        !tail.is_empty() && tail[tail.len() - quarter..].iter().all(|t| *t <= conv_tol);
    CauchyProfile { tail, consistent }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::instance::{Assumptions, MappingF, ProblemInstance, ProximityFunction};
    use crate::point::PointSet;
    use crate::DEFAULT_EPS_EQ;

    fn pt(coords: &[f64]) -> Point {
        Point::new(coords.to_vec())
    }

    #[test]
    fn fixed_instance_steps_to_itself() {
        let inst = corpus::load_builtin("ex_thm1").unwrap().instance;
        // singleton proximal subset: the step has one candidate
        let (next, err) = proximal_step(&inst, &pt(&[0.0, 0.0]), 1e-9).unwrap();
        assert_eq!(next, pt(&[0.0, 0.0]));
        assert_eq!(err, 0.0);
    }

    #[test]
    fn converges_at_the_proximal_point() {
        let inst = corpus::load_builtin("ex_thm1").unwrap().instance;
        let trace = iterate(&inst, &SolveOptions::default()).unwrap();
        assert_eq!(trace.status, TraceStatus::Converged);
        assert_eq!(trace.final_point(), &pt(&[0.0, 0.0]));
        assert_eq!(trace.final_residual, 0.0);
        assert!(trace.iterations() <= 1);
    }

    #[test]
    fn halving_ladder_steps_and_gaps() {
        let inst = corpus::synthetic_halving();
        let (next, err) = proximal_step(&inst, &pt(&[0.0, 1.0]), 1e-9).unwrap();
        assert_eq!(next, pt(&[0.0, 0.5]));
        assert_eq!(err, 0.0);

        let trace = iterate(
            &inst,
            &SolveOptions {
                start: Some(pt(&[0.0, 1.0])),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(trace.status, TraceStatus::Converged);
        // second coordinates 1, 1/2, 1/4, ... with exactly halving gaps
        assert_eq!(trace.points[1], pt(&[0.0, 0.5]));
        assert_eq!(trace.points[2], pt(&[0.0, 0.25]));
        for (n, gap) in trace.step_gaps.iter().enumerate() {
            assert_eq!(*gap, 0.5_f64.powi(n as i32 + 1));
        }
        assert!(trace.final_residual <= DEFAULT_EPS_EQ + 1e-12);
        // every accepted step satisfied the proximal equality exactly
        assert!(trace.feasibility_errors.iter().all(|e| *e == 0.0));
    }

    #[test]
    fn rate_bound_is_exact_on_the_halving_ladder() {
        let inst = corpus::synthetic_halving();
        let trace = iterate(
            &inst,
            &SolveOptions {
                start: Some(pt(&[0.0, 1.0])),
                ..Default::default()
            },
        )
        .unwrap();
        // c = 1/3 gives factor 2c/(1+c) = 1/2
        let rate = rate_check(&trace, 1.0 / 3.0, 1e-9);
        assert_eq!(rate.factor, 0.5);
        assert!(rate.holds);
    }

    #[test]
    fn rate_bound_holds_trivially_on_short_traces() {
        let inst = corpus::load_builtin("ex_thm1").unwrap().instance;
        let trace = iterate(&inst, &SolveOptions::default()).unwrap();
        assert!(rate_check(&trace, 0.25, 1e-9).holds);
        // constant trace: every gap is zero, any c works
        assert!(rate_check(&trace, 0.9, 0.0).holds);
    }

    #[test]
    fn cauchy_profile_decreases_on_the_halving_ladder() {
        let inst = corpus::synthetic_halving();
        let trace = iterate(
            &inst,
            &SolveOptions {
                start: Some(pt(&[0.0, 1.0])),
                ..Default::default()
            },
        )
        .unwrap();
        let profile = cauchy_profile(&inst, &trace, 5, DEFAULT_CONV_TOL);
        // telescoping geometric gaps: t_n = 2^-n (1 - 2^-p_max) until the
        // trace runs out of room
        for n in 0..profile.tail.len().saturating_sub(5) {
            let expected = 0.5_f64.powi(n as i32) * (1.0 - 0.5_f64.powi(5));
            assert!((profile.tail[n] - expected).abs() <= 1e-12, "n = {n}");
        }
        for w in profile.tail.windows(2) {
            assert!(w[1] <= w[0] + 1e-15);
        }
    }

    #[test]
    fn oscillating_map_never_becomes_cauchy() {
        // F swaps two points, gaps never shrink
        let pts = vec![pt(&[0.0, 0.0]), pt(&[0.0, 1.0])];
        let re = PointSet::explicit("Re", pts.clone()).unwrap();
        let om = PointSet::explicit("Om", pts).unwrap();
        let map = MappingF::parse_simple(&["0", "1 - a2"], 2).unwrap();
        let phi = ProximityFunction::parse("a2 - b2", 2).unwrap();
        let inst = ProblemInstance::new(
            "swap",
            re,
            om,
            map,
            phi,
            DEFAULT_EPS_EQ,
            Assumptions::default(),
        )
        .unwrap();
        let trace = iterate(
            &inst,
            &SolveOptions {
                max_iters: Some(40),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(trace.status, TraceStatus::MaxIters);
        let profile = cauchy_profile(&inst, &trace, 3, DEFAULT_CONV_TOL);
        assert!(!profile.consistent);
    }

    #[test]
    fn residual_measures_distance_to_best_proximity() {
        let inst = corpus::load_builtin("ex_thm1").unwrap().instance;
        assert_eq!(residual(&inst, &pt(&[0.0, 0.0])), 0.0);
        assert_eq!(residual(&inst, &pt(&[0.0, -1.0])), 0.75);
    }

    #[test]
    fn start_point_must_be_proximal() {
        let inst = corpus::load_builtin("ex_thm1").unwrap().instance;
        let err = iterate(
            &inst,
            &SolveOptions {
                start: Some(pt(&[0.0, -1.0])),
                ..Default::default()
            },
        )
        .unwrap_err();
        assert!(matches!(err, SolveError::StartNotProximal(_)));
    }

    #[test]
    fn step_accepts_only_within_tolerance() {
        let inst = corpus::synthetic_halving();
        // from the bottom rung the exact target is off the ladder by 2^-31,
        // still within eps_eq
        let bottom = pt(&[0.0, 0.5_f64.powi(30)]);
        let (next, err) = proximal_step(&inst, &bottom, DEFAULT_EPS_EQ).unwrap();
        assert_eq!(next, bottom);
        assert_eq!(err, 0.5_f64.powi(31));
        // and rejected under a tolerance below that error
        assert!(matches!(
            proximal_step(&inst, &bottom, 1e-12),
            Err(SolveError::InfeasibleStep { .. })
        ));
    }

    #[test]
    fn traces_from_every_start_reach_the_same_point_when_hypotheses_hold() {
        let inst = corpus::load_builtin("ex_thm1").unwrap().instance;
        let (re_phi, _) = crate::instance::proximal_indices(&inst);
        let mut finals = Vec::new();
        for &i in &re_phi {
            let trace = iterate(
                &inst,
                &SolveOptions {
                    start: Some(inst.re().points()[i].clone()),
                    ..Default::default()
                },
            )
            .unwrap();
            assert_eq!(trace.status, TraceStatus::Converged);
            finals.push(trace.final_point().clone());
        }
        for f in &finals {
            assert!(f.max_dist(&finals[0]) <= DEFAULT_EPS_EQ);
        }
    }
}
