//! Best-proximity analysis on finite point sets.
//!
//! Given two finite (or segment-sampled) point sets `Re` and `Om`, a
//! real-valued proximity function `phi(a, b)` over pairs of points, and a
//! point map `F` from `Re` towards `Om`, this crate computes the proximity
//! distance `D = min |phi(a, b)|`, the proximal subsets that achieve it,
//! and decides by exhaustive scan whether the map belongs to each of the
//! contraction classes defined over that structure. A proximal fixed-point
//! iteration with rate and Cauchy diagnostics approximates best proximity
//! points, and an independent brute-force oracle validates it.
//!
//! Entry points:
//!
//! * [`expr`] — arithmetic expression parser/evaluator for `phi` and `F`
//! * [`instance`] — point sets, proximity functions, problem instances
//! * [`checkers`] — contraction-class and structural condition checks
//! * [`solver`] — proximal iteration, rate bound, Cauchy profile
//! * [`oracle`] — brute-force best-proximity-point search
//! * [`corpus`] — built-in regression instances with expected results
//! * [`probfile`] — the on-disk problem-definition format

pub mod checkers;
pub mod corpus;
pub mod expr;
pub mod instance;
pub mod oracle;
pub mod point;
pub mod probfile;
pub mod report;
pub mod solver;

pub use checkers::{CheckName, CheckReport, Verdict, Witness};
pub use instance::{Assumptions, AxiomReport, MappingF, ProblemInstance, ProximityFunction};
pub use point::{Point, PointSet};
pub use solver::{IterationTrace, SolveOptions, TraceStatus};

/// Default tolerance for the equality `|phi| = D` and friends.
pub const DEFAULT_EPS_EQ: f64 = 1e-9;

/// Two points closer than this (coordinate-wise) are considered duplicates.
pub const EPS_DUP: f64 = 1e-12;

/// Default convergence tolerance for the proximal iteration.
pub const DEFAULT_CONV_TOL: f64 = 1e-9;

/// Default iteration cap for the proximal iteration.
pub const DEFAULT_MAX_ITERS: usize = 10_000;

/// Reported contraction constant when every scanned gap is zero and any
/// c in (0,1) would do.
pub const MIN_C_FLOOR: f64 = 1e-6;
