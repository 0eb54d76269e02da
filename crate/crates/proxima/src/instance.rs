//! Problem instances: point sets, a proximity function, and a point map.
//!
//! The proximity function `phi` is an expression over `a1..ak, b1..bk`
//! evaluated on pairs of points; the map `F` is a list of per-coordinate
//! expressions over `a1..ak`, optionally guarded for piecewise definitions
//! (a branch is active when its guard evaluates `>= 0`; the first active
//! branch wins). Construction validates everything that can fail up front:
//! variable bindings, totality of `F` on `Re`, and finiteness of `phi` on
//! the sample the checks will ever touch.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::expr::{self, ArgSpec, BindError, BoundExpr, EvalError, Expr, ParseError};
use crate::point::{Point, PointSet, SetError};

/// Evaluable `phi(a, b)` over pairs of points.
#[derive(Debug, Clone, PartialEq)]
pub struct ProximityFunction {
    expr: BoundExpr,
}

impl ProximityFunction {
    pub fn new(ast: Expr, dim: usize) -> Result<Self, BindError> {
        Ok(ProximityFunction {
            expr: BoundExpr::bind(ast, dim, ArgSpec::Pair)?,
        })
    }

    pub fn parse(src: &str, dim: usize) -> Result<Self, ModelError> {
        let ast = expr::parse(src)?;
        Ok(Self::new(ast, dim)?)
    }

    pub fn ast(&self) -> &Expr {
        self.expr.ast()
    }

    pub fn eval(&self, a: &Point, b: &Point) -> Result<f64, EvalError> {
        self.expr.eval(a.coords(), b.coords())
    }

    pub fn eval_abs(&self, a: &Point, b: &Point) -> Result<f64, EvalError> {
        Ok(self.eval(a, b)?.abs())
    }
}

/// One branch of a piecewise map: optional guard plus one expression per
/// output coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    guard: Option<BoundExpr>,
    values: Vec<BoundExpr>,
}

impl Branch {
    pub fn guard_ast(&self) -> Option<&Expr> {
        self.guard.as_ref().map(|g| g.ast())
    }

    pub fn value_asts(&self) -> impl Iterator<Item = &Expr> {
        self.values.iter().map(|v| v.ast())
    }
}

/// The point map `F`, expression-defined and possibly piecewise.
#[derive(Debug, Clone, PartialEq)]
pub struct MappingF {
    branches: Vec<Branch>,
}

impl MappingF {
    /// Build from `(guard, per-coordinate values)` pairs, already parsed.
    pub fn new(branches: Vec<(Option<Expr>, Vec<Expr>)>, dim: usize) -> Result<Self, ModelError> {
        if branches.is_empty() {
            return Err(ModelError::EmptyMap);
        }
        let mut out = Vec::with_capacity(branches.len());
        for (guard, values) in branches {
            if values.len() != dim {
                return Err(ModelError::MapArity {
                    expected: dim,
                    got: values.len(),
                });
            }
            let guard = guard
                .map(|g| BoundExpr::bind(g, dim, ArgSpec::Single))
                .transpose()?;
            let values = values
                .into_iter()
                .map(|v| BoundExpr::bind(v, dim, ArgSpec::Single))
                .collect::<Result<Vec<_>, _>>()?;
            out.push(Branch { guard, values });
        }
        Ok(MappingF { branches: out })
    }

    /// Unguarded single-branch map from per-coordinate sources.
    pub fn parse_simple(values: &[&str], dim: usize) -> Result<Self, ModelError> {
        let parsed = values
            .iter()
            .map(|s| expr::parse(s))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(vec![(None, parsed)], dim)
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    /// Evaluate at `x`: first branch whose guard is `>= 0` (or has no
    /// guard) wins.
    pub fn apply(&self, x: &Point) -> Result<Point, MapError> {
        for branch in &self.branches {
            let active = match &branch.guard {
                None => true,
                Some(g) => g.eval(x.coords(), &[])? >= 0.0,
            };
            if active {
                let coords = branch
                    .values
                    .iter()
                    .map(|v| v.eval(x.coords(), &[]))
                    .collect::<Result<Vec<_>, _>>()?;
                if !coords.iter().all(|c| c.is_finite()) {
                    return Err(MapError::NonFiniteImage { at: x.clone() });
                }
                return Ok(Point::new(coords));
            }
        }
        Err(MapError::NoBranchActive { at: x.clone() })
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum MapError {
    #[error("no branch active at {at}")]
    NoBranchActive { at: Point },
    #[error("map image at {at} is not finite")]
    NonFiniteImage { at: Point },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Hypotheses that cannot be verified on a finite sample and are simply
/// declared by the instance author.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Assumptions {
    pub phi_complete: bool,
    pub approx_phi_compact: bool,
}

impl Default for Assumptions {
    fn default() -> Self {
        Assumptions {
            phi_complete: false,
            approx_phi_compact: false,
        }
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Bind(#[from] BindError),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("evaluation failed on the instance sample: {0}")]
    Eval(#[from] EvalError),
    #[error("map must define exactly one branch list")]
    EmptyMap,
    #[error("map branch has {got} coordinate expressions, instance dimension is {expected}")]
    MapArity { expected: usize, got: usize },
    #[error("sets have different dimensions: {re} vs {om}")]
    DimensionMismatch { re: usize, om: usize },
    #[error("eps_eq must be positive, got {0}")]
    BadTolerance(f64),
}

/// The bundle every check and solve runs on.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    name: String,
    re: PointSet,
    om: PointSet,
    map: MappingF,
    phi: ProximityFunction,
    eps_eq: f64,
    assumptions: Assumptions,
    /// F applied to every point of `re`, in index order.
    images: Vec<Point>,
    /// min over Re x Om of |phi|.
    d_phi: f64,
}

impl PartialEq for ProblemInstance {
    fn eq(&self, other: &Self) -> bool {
        self.re == other.re
            && self.om == other.om
            && self.map == other.map
            && self.phi == other.phi
            && self.eps_eq == other.eps_eq
            && self.assumptions == other.assumptions
    }
}

impl ProblemInstance {
    pub fn new(
        name: impl Into<String>,
        re: PointSet,
        om: PointSet,
        map: MappingF,
        phi: ProximityFunction,
        eps_eq: f64,
        assumptions: Assumptions,
    ) -> Result<Self, ModelError> {
        if re.dim() != om.dim() {
            return Err(ModelError::DimensionMismatch {
                re: re.dim(),
                om: om.dim(),
            });
        }
        if !(eps_eq > 0.0) || !eps_eq.is_finite() {
            return Err(ModelError::BadTolerance(eps_eq));
        }
        // totality of F on Re, recorded once
        let images = re
            .points()
            .iter()
            .map(|p| map.apply(p))
            .collect::<Result<Vec<_>, _>>()?;
        for img in &images {
            if img.dim() != re.dim() {
                return Err(ModelError::MapArity {
                    expected: re.dim(),
                    got: img.dim(),
                });
            }
        }
        let mut inst = ProblemInstance {
            name: name.into(),
            re,
            om,
            map,
            phi,
            eps_eq,
            assumptions,
            images,
            d_phi: 0.0,
        };
        // phi must be finite wherever the checks can evaluate it
        let sample = inst.sample_points();
        for x in &sample {
            for y in &sample {
                inst.phi.eval(x, y)?;
            }
        }
        inst.d_phi = d_phi(&inst.re, &inst.om, &inst.phi)?;
        Ok(inst)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn re(&self) -> &PointSet {
        &self.re
    }

    pub fn om(&self) -> &PointSet {
        &self.om
    }

    pub fn map(&self) -> &MappingF {
        &self.map
    }

    pub fn phi(&self) -> &ProximityFunction {
        &self.phi
    }

    pub fn eps_eq(&self) -> f64 {
        self.eps_eq
    }

    pub fn assumptions(&self) -> Assumptions {
        self.assumptions
    }

    /// Same instance with a different equality tolerance.
    pub fn with_eps_eq(&self, eps_eq: f64) -> Result<Self, ModelError> {
        Self::new(
            self.name.clone(),
            self.re.clone(),
            self.om.clone(),
            self.map.clone(),
            self.phi.clone(),
            eps_eq,
            self.assumptions,
        )
    }

    /// `F(re[i])`, precomputed.
    pub fn image(&self, re_index: usize) -> &Point {
        &self.images[re_index]
    }

    pub fn images(&self) -> &[Point] {
        &self.images
    }

    /// `|phi(a, b)|`; evaluation is validated at construction, so failures
    /// on instance points are programming errors.
    pub fn phi_abs(&self, a: &Point, b: &Point) -> f64 {
        self.phi
            .eval_abs(a, b)
            .expect("phi validated finite on the instance sample")
    }

    /// min over Re x Om of |phi|, computed once at construction.
    pub fn proximity_distance(&self) -> f64 {
        self.d_phi
    }

    /// `Re ∪ Om ∪ F(Re)` with duplicates removed, the sample the axiom
    /// checks run on.
    pub fn sample_points(&self) -> Vec<Point> {
        let mut out: Vec<Point> = Vec::new();
        for p in self
            .re
            .points()
            .iter()
            .chain(self.om.points())
            .chain(self.images.iter())
        {
            if !out.iter().any(|q| q.same_as(p)) {
                out.push(p.clone());
            }
        }
        out
    }

    /// Tolerance for "lies in this set", per coordinate: the equality
    /// tolerance, widened by half the sampling step on sampled segments
    /// (a grid rarely contains an image point exactly, and images landing
    /// mid-cell must not flip on rounding).
    pub fn membership_tol(&self, target: &PointSet) -> Vec<f64> {
        match target.half_spacing() {
            None => vec![self.eps_eq; target.dim()],
            Some(hs) => hs.into_iter().map(|h| h + self.eps_eq).collect(),
        }
    }

    /// Whether `p` matches some member of `target` within the per-coordinate
    /// membership tolerance; returns the first matching index.
    pub fn member_of(&self, p: &Point, target: &PointSet) -> Option<usize> {
        let tol = self.membership_tol(target);
        target.points().iter().position(|q| {
            q.coords()
                .iter()
                .zip(p.coords())
                .zip(&tol)
                .all(|((a, b), t)| (a - b).abs() <= *t)
        })
    }

    /// Points of `Re` whose image under `F` is not in `Om` (within the
    /// membership tolerance). Such instances are still checkable — all
    /// conditions read `phi`, not set membership — but the configuration
    /// is worth surfacing.
    pub fn range_warnings(&self) -> Vec<(Point, Point)> {
        self.re
            .points()
            .iter()
            .zip(&self.images)
            .filter(|(_, img)| self.member_of(img, &self.om).is_none())
            .map(|(p, img)| (p.clone(), img.clone()))
            .collect()
    }
}

/// min over all `(a, b)` in `Re x Om` of `|phi(a, b)|`. Finite sets make
/// the infimum a minimum.
pub fn d_phi(re: &PointSet, om: &PointSet, phi: &ProximityFunction) -> Result<f64, EvalError> {
    let values = re
        .points()
        .par_iter()
        .map(|a| {
            let mut best = f64::INFINITY;
            for b in om.points() {
                let v = phi.eval_abs(a, b)?;
                if v < best {
                    best = v;
                }
            }
            Ok(best)
        })
        .collect::<Result<Vec<f64>, EvalError>>()?;
    Ok(values.into_iter().fold(f64::INFINITY, f64::min))
}

/// Indices into `Re` and `Om` of the points achieving the proximity
/// distance within `eps_eq`, in set order.
pub fn proximal_indices(inst: &ProblemInstance) -> (Vec<usize>, Vec<usize>) {
    let d = inst.proximity_distance();
    let eps = inst.eps_eq();
    let re_idx = inst
        .re()
        .points()
        .iter()
        .enumerate()
        .filter(|(_, a)| {
            inst.om()
                .points()
                .iter()
                .any(|b| (inst.phi_abs(a, b) - d).abs() <= eps)
        })
        .map(|(i, _)| i)
        .collect();
    let om_idx = inst
        .om()
        .points()
        .iter()
        .enumerate()
        .filter(|(_, b)| {
            inst.re()
                .points()
                .iter()
                .any(|a| (inst.phi_abs(a, b) - d).abs() <= eps)
        })
        .map(|(i, _)| i)
        .collect();
    (re_idx, om_idx)
}

/// The proximal subsets as point sets, order inherited from the parents.
/// Either may be empty on a degenerate tolerance; callers decide whether
/// that is fatal, so the sets are returned as plain point lists.
pub fn proximal_subsets(inst: &ProblemInstance) -> (Vec<Point>, Vec<Point>) {
    let (re_idx, om_idx) = proximal_indices(inst);
    (
        re_idx
            .into_iter()
            .map(|i| inst.re().points()[i].clone())
            .collect(),
        om_idx
            .into_iter()
            .map(|i| inst.om().points()[i].clone())
            .collect(),
    )
}

/// Verdict and witness for one proximity-function axiom.
#[derive(Debug, Clone, Serialize)]
pub struct AxiomVerdict {
    pub holds: bool,
    /// Failing points (two for zero/symmetry, three for the triangle) with
    /// the two sides of the violated relation.
    pub witness: Option<AxiomWitness>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomWitness {
    pub points: Vec<Point>,
    pub lhs: f64,
    pub rhs: f64,
}

/// Result of checking the three structural axioms of `phi` on the finite
/// sample `Re ∪ Om ∪ F(Re)`.
#[derive(Debug, Clone, Serialize)]
pub struct AxiomReport {
    pub zero_iff_equal: AxiomVerdict,
    pub symmetric: AxiomVerdict,
    pub triangle: AxiomVerdict,
    pub sample_size: usize,
}

impl AxiomReport {
    pub fn all_hold(&self) -> bool {
        self.zero_iff_equal.holds && self.symmetric.holds && self.triangle.holds
    }
}

/// Exhaustively test, over the sample `S = Re ∪ Om ∪ F(Re)`:
/// `|phi(x,y)| <= eps` iff `x = y`, symmetry of `|phi|`, and the triangle
/// inequality with `eps` slack. First witness in index order per axiom.
pub fn check_phi_axioms(inst: &ProblemInstance) -> AxiomReport {
    let sample = inst.sample_points();
    let n = sample.len();
    let eps = inst.eps_eq();

    // |phi| over the sample, cached for the triangle scan
    let abs: Vec<Vec<f64>> = sample
        .par_iter()
        .map(|x| sample.iter().map(|y| inst.phi_abs(x, y)).collect())
        .collect();

    let mut zero_iff = AxiomVerdict {
        holds: true,
        witness: None,
    };
    'zero: for i in 0..n {
        for j in 0..n {
            let equal = sample[i].same_as(&sample[j]);
            let zero = abs[i][j] <= eps;
            if zero != equal {
                zero_iff = AxiomVerdict {
                    holds: false,
                    witness: Some(AxiomWitness {
                        points: vec![sample[i].clone(), sample[j].clone()],
                        lhs: abs[i][j],
                        rhs: 0.0,
                    }),
                };
                break 'zero;
            }
        }
    }

    let mut symmetric = AxiomVerdict {
        holds: true,
        witness: None,
    };
    'sym: for i in 0..n {
        for j in 0..n {
            if (abs[i][j] - abs[j][i]).abs() > eps {
                symmetric = AxiomVerdict {
                    holds: false,
                    witness: Some(AxiomWitness {
                        points: vec![sample[i].clone(), sample[j].clone()],
                        lhs: abs[i][j],
                        rhs: abs[j][i],
                    }),
                };
                break 'sym;
            }
        }
    }

    // first violating triple in (i, j, k) index order, scanned in parallel
    // over i with a min-index merge
    let triangle_violation = (0..n)
        .into_par_iter()
        .filter_map(|i| {
            for j in 0..n {
                for k in 0..n {
                    if abs[i][k] > abs[i][j] + abs[j][k] + eps {
                        return Some((i, j, k));
                    }
                }
            }
            None
        })
        .min();
    let triangle = match triangle_violation {
        None => AxiomVerdict {
            holds: true,
            witness: None,
        },
        Some((i, j, k)) => AxiomVerdict {
            holds: false,
            witness: Some(AxiomWitness {
                points: vec![sample[i].clone(), sample[j].clone(), sample[k].clone()],
                lhs: abs[i][k],
                rhs: abs[i][j] + abs[j][k],
            }),
        },
    };

    AxiomReport {
        zero_iff_equal: zero_iff,
        symmetric,
        triangle,
        sample_size: n,
    }
}
