//! Exhaustive checks of the contraction classes and structural conditions
//! on a finite instance.
//!
//! Every check scans the instance completely, so verdicts come with the
//! smallest feasible contraction constant where one applies and with a
//! concrete witness whenever they fail. Scans are data-parallel with
//! deterministic reduction: witnesses are chosen by the smallest position
//! in a fixed enumeration and constants by an order-independent max, so
//! reports are identical for any thread count.
//!
//! Shared antecedent: a pair `(alpha, beta)` of points of `Re` qualifies
//! when `|phi(alpha, F(beta))| = D` within `eps_eq`. The contraction
//! checks quantify over ordered pairs of qualifying pairs; a check whose
//! qualifying-pair set is empty is reported `vacuous` rather than `holds`
//! so that degenerate configurations stay visible. When pairs exist but a
//! distinctness restriction leaves nothing to scan, the condition is
//! satisfied for everything in scope and the verdict is `holds`.

use rayon::prelude::*;
use serde::Serialize;

use crate::instance::{proximal_indices, ProblemInstance};
use crate::point::Point;
use crate::MIN_C_FLOOR;

/// Outcome of a single check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails,
    Vacuous,
}

/// The four points of a violating (or certifying) configuration and the
/// two sides of the inequality at it. For the contraction checks `rhs` is
/// the quantity multiplied by the constant.
#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub alpha1: Point,
    pub alpha2: Point,
    pub beta1: Point,
    pub beta2: Point,
    pub lhs: f64,
    pub rhs: f64,
}

/// Report of one definition checked on one instance.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub definition: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub pairs_scanned: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckReport {
    fn new(name: CheckName, verdict: Verdict) -> Self {
        CheckReport {
            definition: name.as_str().to_string(),
            verdict,
            min_c: None,
            witness: None,
            pairs_scanned: 0,
            detail: None,
        }
    }
}

/// Names of the available checks, as used on the command line and in
/// structured reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CheckName {
    PhiAxioms,
    PProperty,
    ProximalContraction,
    ModifiedProximalContraction,
    PProximalContraction,
    PProximalContractive,
    ContractiveHypotheses,
    RangeCondition,
}

impl CheckName {
    pub const ALL: [CheckName; 8] = [
        CheckName::PhiAxioms,
        CheckName::PProperty,
        CheckName::ProximalContraction,
        CheckName::ModifiedProximalContraction,
        CheckName::PProximalContraction,
        CheckName::PProximalContractive,
        CheckName::ContractiveHypotheses,
        CheckName::RangeCondition,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::PhiAxioms => "phi-axioms",
            CheckName::PProperty => "p-property",
            CheckName::ProximalContraction => "proximal-contraction",
            CheckName::ModifiedProximalContraction => "modified-proximal-contraction",
            CheckName::PProximalContraction => "p-proximal-contraction",
            CheckName::PProximalContractive => "p-proximal-contractive",
            CheckName::ContractiveHypotheses => "contractive-hypotheses",
            CheckName::RangeCondition => "range-condition",
        }
    }

    pub fn parse(s: &str) -> Option<CheckName> {
        CheckName::ALL.iter().copied().find(|c| c.as_str() == s)
    }
}

/// A qualifying pair: indices into `Re` with `|phi(alpha, F(beta))| = D`
/// within `eps_eq`.
#[derive(Debug, Clone, Copy)]
pub struct AntecedentPair {
    pub alpha: usize,
    pub beta: usize,
}

/// All pairs `(alpha, beta)` in `Re x Re` with `|phi(alpha, F(beta))| = D`
/// within `eps_eq`, in `(alpha index, beta index)` order.
pub fn antecedent_pairs(inst: &ProblemInstance) -> Vec<AntecedentPair> {
    let d = inst.proximity_distance();
    let eps = inst.eps_eq();
    let re = inst.re().points();
    let mut out = Vec::new();
    for (ai, a) in re.iter().enumerate() {
        for bi in 0..re.len() {
            let v = inst.phi_abs(a, inst.image(bi));
            if (v - d).abs() <= eps {
                out.push(AntecedentPair {
                    alpha: ai,
                    beta: bi,
                });
            }
        }
    }
    out
}

/// Materialised form of [`antecedent_pairs`].
pub fn antecedent_points(inst: &ProblemInstance) -> Vec<(Point, Point)> {
    antecedent_pairs(inst)
        .into_iter()
        .map(|p| {
            (
                inst.re().points()[p.alpha].clone(),
                inst.re().points()[p.beta].clone(),
            )
        })
        .collect()
}

/// Position of the ordered pair `(i, j)` in the scan enumeration. Pairs
/// are visited in growing blocks: block `m` covers every ordered pair
/// whose larger index is `m`, with `(m, j)` just before `(j, m)` for
/// `j < m` and `(m, m)` last. The witness of a failing check is the
/// violation with the smallest such position, which makes parallel and
/// sequential scans agree.
fn enum_index(i: usize, j: usize) -> u64 {
    let (i, j) = (i as u64, j as u64);
    if i == j {
        i * i + 2 * i
    } else if i > j {
        i * i + 2 * j
    } else {
        j * j + 2 * i + 1
    }
}

struct QuadScan {
    /// Cached per pair p: |phi(alpha_p, beta_p)|.
    cross: Vec<f64>,
    /// alpha_gap[p][q] = |phi(alpha_p, alpha_q)|.
    alpha_gap: Vec<Vec<f64>>,
    /// beta_gap[p][q] = |phi(beta_p, beta_q)|.
    beta_gap: Vec<Vec<f64>>,
    pairs: Vec<AntecedentPair>,
}

impl QuadScan {
    fn build(inst: &ProblemInstance, pairs: Vec<AntecedentPair>) -> Self {
        let re = inst.re().points();
        let cross = pairs
            .iter()
            .map(|p| inst.phi_abs(&re[p.alpha], &re[p.beta]))
            .collect();
        let alpha_gap: Vec<Vec<f64>> = pairs
            .par_iter()
            .map(|p| {
                pairs
                    .iter()
                    .map(|q| inst.phi_abs(&re[p.alpha], &re[q.alpha]))
                    .collect()
            })
            .collect();
        let beta_gap: Vec<Vec<f64>> = pairs
            .par_iter()
            .map(|p| {
                pairs
                    .iter()
                    .map(|q| inst.phi_abs(&re[p.beta], &re[q.beta]))
                    .collect()
            })
            .collect();
        QuadScan {
            cross,
            alpha_gap,
            beta_gap,
            pairs,
        }
    }

    fn witness(&self, inst: &ProblemInstance, p: usize, q: usize, lhs: f64, rhs: f64) -> Witness {
        let re = inst.re().points();
        Witness {
            alpha1: re[self.pairs[p].alpha].clone(),
            alpha2: re[self.pairs[q].alpha].clone(),
            beta1: re[self.pairs[p].beta].clone(),
            beta2: re[self.pairs[q].beta].clone(),
            lhs,
            rhs,
        }
    }
}

/// Per-quadruple outcome folded over a scan.
#[derive(Clone, Copy)]
struct ScanAcc {
    scanned: u64,
    /// Best (largest) ratio lhs/rhs over rhs > eps, smallest enum index on ties.
    max_ratio: Option<(f64, u64, usize, usize)>,
    /// Violation that no constant can repair, smallest enum index.
    hard_violation: Option<(u64, usize, usize)>,
}

impl ScanAcc {
    fn empty() -> Self {
        ScanAcc {
            scanned: 0,
            max_ratio: None,
            hard_violation: None,
        }
    }

    fn merge(a: Self, b: Self) -> Self {
        let max_ratio = match (a.max_ratio, b.max_ratio) {
            (None, r) | (r, None) => r,
            (Some(x), Some(y)) => {
                if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) {
                    Some(y)
                } else {
                    Some(x)
                }
            }
        };
        let hard_violation = match (a.hard_violation, b.hard_violation) {
            (None, v) | (v, None) => v,
            (Some(x), Some(y)) => Some(if y.0 < x.0 { y } else { x }),
        };
        ScanAcc {
            scanned: a.scanned + b.scanned,
            max_ratio,
            hard_violation,
        }
    }
}

/// Right-hand quantity of the contraction inequality.
#[derive(Clone, Copy)]
enum Rhs {
    /// `|phi(beta1, beta2)|`
    BetaGap,
    /// `|phi(beta1, beta2)| + ||phi(a1,b1)| - |phi(a2,b2)||`
    BetaGapPlusCrossDiff,
}

impl Rhs {
    fn value(self, scan: &QuadScan, p: usize, q: usize) -> f64 {
        match self {
            Rhs::BetaGap => scan.beta_gap[p][q],
            Rhs::BetaGapPlusCrossDiff => {
                scan.beta_gap[p][q] + (scan.cross[p] - scan.cross[q]).abs()
            }
        }
    }
}

fn contraction_scan(
    inst: &ProblemInstance,
    name: CheckName,
    distinct_beta: bool,
    rhs_kind: Rhs,
) -> CheckReport {
    let pairs = antecedent_pairs(inst);
    if pairs.is_empty() {
        let mut rep = CheckReport::new(name, Verdict::Vacuous);
        rep.detail = Some("no pair satisfies the proximal equality".to_string());
        return rep;
    }
    let scan = QuadScan::build(inst, pairs);
    let n = scan.pairs.len();
    let eps = inst.eps_eq();

    let acc = (0..n)
        .into_par_iter()
        .map(|p| {
            let mut acc = ScanAcc::empty();
            for q in 0..n {
                if distinct_beta && scan.pairs[p].beta == scan.pairs[q].beta {
                    continue;
                }
                acc.scanned += 1;
                let lhs = scan.alpha_gap[p][q];
                let rhs = rhs_kind.value(&scan, p, q);
                let idx = enum_index(p, q);
                if rhs <= eps {
                    if lhs > eps {
                        let better = match acc.hard_violation {
                            None => true,
                            Some((best, _, _)) => idx < best,
                        };
                        if better {
                            acc.hard_violation = Some((idx, p, q));
                        }
                    }
                } else {
                    let ratio = lhs / rhs;
                    let better = match acc.max_ratio {
                        None => true,
                        Some((best, best_idx, _, _)) => {
                            ratio > best || (ratio == best && idx < best_idx)
                        }
                    };
                    if better {
                        acc.max_ratio = Some((ratio, idx, p, q));
                    }
                }
            }
            acc
        })
        .reduce(ScanAcc::empty, ScanAcc::merge);

    let mut rep = CheckReport::new(name, Verdict::Holds);
    rep.pairs_scanned = acc.scanned;
    if let Some((_, p, q)) = acc.hard_violation {
        rep.verdict = Verdict::Fails;
        let lhs = scan.alpha_gap[p][q];
        let rhs = rhs_kind.value(&scan, p, q);
        rep.witness = Some(scan.witness(inst, p, q, lhs, rhs));
        rep.detail = Some("left side is positive while the right side vanishes".to_string());
        return rep;
    }
    match acc.max_ratio {
        Some((ratio, _, p, q)) if ratio >= 1.0 => {
            rep.verdict = Verdict::Fails;
            let lhs = scan.alpha_gap[p][q];
            let rhs = rhs_kind.value(&scan, p, q);
            rep.witness = Some(scan.witness(inst, p, q, lhs, rhs));
            rep.detail = Some(format!("no c in (0,1) is feasible; ratio sup = {ratio}"));
        }
        Some((ratio, _, _, _)) => {
            rep.min_c = Some(ratio.max(MIN_C_FLOOR));
        }
        None => {
            // nothing bounded the constant: every scanned right side vanished
            // together with its left side
            rep.min_c = Some(MIN_C_FLOOR);
        }
    }
    rep
}

/// `|phi(a1, F(b1))| = |phi(a2, F(b2))| = D` forces
/// `|phi(a1, a2)| <= c |phi(b1, b2)|` for a fixed `c` in (0,1);
/// quantified over all qualifying pairs, `b1 = b2` allowed.
pub fn check_proximal_contraction(inst: &ProblemInstance) -> CheckReport {
    contraction_scan(inst, CheckName::ProximalContraction, false, Rhs::BetaGap)
}

/// Same inequality restricted to distinct `b1 != b2`.
pub fn check_modified_proximal_contraction(inst: &ProblemInstance) -> CheckReport {
    contraction_scan(
        inst,
        CheckName::ModifiedProximalContraction,
        true,
        Rhs::BetaGap,
    )
}

/// Contraction with the correction term:
/// `|phi(a1, a2)| <= c (|phi(b1, b2)| + ||phi(a1,b1)| - |phi(a2,b2)||)`
/// over distinct `b1 != b2`.
pub fn check_p_proximal_contraction(inst: &ProblemInstance) -> CheckReport {
    contraction_scan(
        inst,
        CheckName::PProximalContraction,
        true,
        Rhs::BetaGapPlusCrossDiff,
    )
}

/// Strict, constant-free analogue:
/// `|phi(a1, a2)| < |phi(b1, b2)| + ||phi(a1,b1)| - |phi(a2,b2)||`
/// over distinct `b1 != b2`. Strictness is encoded as `<= rhs - eps_eq`.
pub fn check_p_proximal_contractive(inst: &ProblemInstance) -> CheckReport {
    let name = CheckName::PProximalContractive;
    let pairs = antecedent_pairs(inst);
    if pairs.is_empty() {
        let mut rep = CheckReport::new(name, Verdict::Vacuous);
        rep.detail = Some("no pair satisfies the proximal equality".to_string());
        return rep;
    }
    let scan = QuadScan::build(inst, pairs);
    let n = scan.pairs.len();
    let eps = inst.eps_eq();

    let (scanned, violation) = (0..n)
        .into_par_iter()
        .map(|p| {
            let mut scanned = 0u64;
            let mut best: Option<(u64, usize, usize)> = None;
            for q in 0..n {
                if scan.pairs[p].beta == scan.pairs[q].beta {
                    continue;
                }
                scanned += 1;
                let lhs = scan.alpha_gap[p][q];
                let rhs = Rhs::BetaGapPlusCrossDiff.value(&scan, p, q);
                if lhs > rhs - eps {
                    let idx = enum_index(p, q);
                    if best.map_or(true, |(b, _, _)| idx < b) {
                        best = Some((idx, p, q));
                    }
                }
            }
            (scanned, best)
        })
        .reduce(
            || (0, None),
            |a, b| {
                let v = match (a.1, b.1) {
                    (None, v) | (v, None) => v,
                    (Some(x), Some(y)) => Some(if y.0 < x.0 { y } else { x }),
                };
                (a.0 + b.0, v)
            },
        );

    let mut rep = CheckReport::new(name, Verdict::Holds);
    rep.pairs_scanned = scanned;
    if let Some((_, p, q)) = violation {
        rep.verdict = Verdict::Fails;
        let lhs = scan.alpha_gap[p][q];
        let rhs = Rhs::BetaGapPlusCrossDiff.value(&scan, p, q);
        rep.witness = Some(scan.witness(inst, p, q, lhs, rhs));
        rep.detail = Some("strict inequality violated".to_string());
    }
    rep
}

/// Whenever two cross-pairs both achieve the proximity distance, the
/// alpha-side and beta-side gaps must agree:
/// `|phi(a1, b1)| = |phi(a2, b2)| = D` forces
/// `|phi(a1, a2)| = |phi(b1, b2)|` within `eps_eq`. Pairs live in
/// `Re x Om` here.
pub fn check_p_property(inst: &ProblemInstance) -> CheckReport {
    let name = CheckName::PProperty;
    let d = inst.proximity_distance();
    let eps = inst.eps_eq();
    let re = inst.re().points();
    let om = inst.om().points();

    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for (ai, a) in re.iter().enumerate() {
        for (bi, b) in om.iter().enumerate() {
            if (inst.phi_abs(a, b) - d).abs() <= eps {
                pairs.push((ai, bi));
            }
        }
    }
    if pairs.is_empty() {
        let mut rep = CheckReport::new(name, Verdict::Vacuous);
        rep.detail = Some("no pair achieves the proximity distance".to_string());
        return rep;
    }
    let n = pairs.len();
    let alpha_gap: Vec<Vec<f64>> = pairs
        .par_iter()
        .map(|(ai, _)| {
            pairs
                .iter()
                .map(|(aj, _)| inst.phi_abs(&re[*ai], &re[*aj]))
                .collect()
        })
        .collect();
    let beta_gap: Vec<Vec<f64>> = pairs
        .par_iter()
        .map(|(_, bi)| {
            pairs
                .iter()
                .map(|(_, bj)| inst.phi_abs(&om[*bi], &om[*bj]))
                .collect()
        })
        .collect();

    let violation = (0..n)
        .into_par_iter()
        .map(|p| {
            let mut best: Option<(u64, usize, usize)> = None;
            for q in 0..n {
                if (alpha_gap[p][q] - beta_gap[p][q]).abs() > eps {
                    let idx = enum_index(p, q);
                    if best.map_or(true, |(b, _, _)| idx < b) {
                        best = Some((idx, p, q));
                    }
                }
            }
            best
        })
        .reduce(
            || None,
            |a, b| match (a, b) {
                (None, v) | (v, None) => v,
                (Some(x), Some(y)) => Some(if y.0 < x.0 { y } else { x }),
            },
        );

    let mut rep = CheckReport::new(name, Verdict::Holds);
    rep.pairs_scanned = (n * n) as u64;
    if let Some((_, p, q)) = violation {
        rep.verdict = Verdict::Fails;
        rep.witness = Some(Witness {
            alpha1: re[pairs[p].0].clone(),
            alpha2: re[pairs[q].0].clone(),
            beta1: om[pairs[p].1].clone(),
            beta2: om[pairs[q].1].clone(),
            lhs: alpha_gap[p][q],
            rhs: beta_gap[p][q],
        });
    }
    rep
}

/// The range condition required by the existence results: the proximal
/// subset of `Re` is non-empty and `F` maps it into the proximal subset
/// of `Om`.
pub fn check_range_condition(inst: &ProblemInstance) -> CheckReport {
    let (re_idx, om_idx) = proximal_indices(inst);
    range_condition_over(inst, &re_idx, &om_idx)
}

/// Core of [`check_range_condition`], taking the proximal subsets as
/// index lists so degenerate inputs can be exercised directly.
pub fn range_condition_over(
    inst: &ProblemInstance,
    re_phi: &[usize],
    om_phi: &[usize],
) -> CheckReport {
    let name = CheckName::RangeCondition;
    let mut rep = CheckReport::new(name, Verdict::Holds);
    rep.pairs_scanned = re_phi.len() as u64;
    if re_phi.is_empty() {
        rep.verdict = Verdict::Fails;
        rep.detail = Some("proximal subset of Re is empty".to_string());
        return rep;
    }
    let om_points: Vec<&Point> = om_phi.iter().map(|&i| &inst.om().points()[i]).collect();
    let tol = inst.membership_tol(inst.om());
    for &i in re_phi {
        let img = inst.image(i);
        let inside = om_points.iter().any(|q| {
            q.coords()
                .iter()
                .zip(img.coords())
                .zip(&tol)
                .all(|((a, b), t)| (a - b).abs() <= *t)
        });
        if !inside {
            rep.verdict = Verdict::Fails;
            rep.detail = Some(format!(
                "image {} of {} misses the proximal subset of Om",
                img,
                inst.re().points()[i]
            ));
            return rep;
        }
    }
    rep
}

/// Hypotheses of the existence result for contractive maps: the pair
/// satisfies the p-property, `F` maps the proximal subset of `Re` into
/// that of `Om`, and some `xi, lambda` in the proximal subset satisfy
/// `|phi(xi, F(lambda))| = D` together with
/// `|phi(xi, lambda)| <= |phi(F(xi), F(lambda))|`. The witness carries the
/// found `(xi, lambda)` as `alpha1, alpha2` and their images as
/// `beta1, beta2`.
pub fn check_contractive_hypotheses(inst: &ProblemInstance) -> CheckReport {
    let (re_idx, om_idx) = proximal_indices(inst);
    contractive_hypotheses_over(inst, &re_idx, &om_idx)
}

/// Core of [`check_contractive_hypotheses`] over explicit subset indices.
pub fn contractive_hypotheses_over(
    inst: &ProblemInstance,
    re_phi: &[usize],
    om_phi: &[usize],
) -> CheckReport {
    let name = CheckName::ContractiveHypotheses;
    let mut rep = CheckReport::new(name, Verdict::Vacuous);
    if re_phi.is_empty() {
        rep.detail = Some("proximal subset of Re is empty".to_string());
        return rep;
    }

    let p_property = check_p_property(inst);
    if p_property.verdict != Verdict::Holds {
        rep.verdict = Verdict::Fails;
        rep.detail = Some("p-property does not hold".to_string());
        rep.witness = p_property.witness;
        return rep;
    }
    let range = range_condition_over(inst, re_phi, om_phi);
    if range.verdict != Verdict::Holds {
        rep.verdict = Verdict::Fails;
        rep.detail = range.detail;
        return rep;
    }

    let d = inst.proximity_distance();
    let eps = inst.eps_eq();
    let re = inst.re().points();
    let mut scanned = 0u64;
    for &xi in re_phi {
        for &lam in re_phi {
            scanned += 1;
            let feasible = (inst.phi_abs(&re[xi], inst.image(lam)) - d).abs() <= eps;
            if !feasible {
                continue;
            }
            let lhs = inst.phi_abs(&re[xi], &re[lam]);
            let rhs = inst.phi_abs(inst.image(xi), inst.image(lam));
            if lhs <= rhs + eps {
                rep.verdict = Verdict::Holds;
                rep.pairs_scanned = scanned;
                rep.witness = Some(Witness {
                    alpha1: re[xi].clone(),
                    alpha2: re[lam].clone(),
                    beta1: inst.image(xi).clone(),
                    beta2: inst.image(lam).clone(),
                    lhs,
                    rhs,
                });
                return rep;
            }
        }
    }
    rep.verdict = Verdict::Fails;
    rep.pairs_scanned = scanned;
    rep.detail =
        Some("no pair in the proximal subset satisfies the existence conditions".to_string());
    rep
}

/// Dispatch a named check.
pub fn run_check(inst: &ProblemInstance, name: CheckName) -> CheckOutput {
    match name {
        CheckName::PhiAxioms => CheckOutput::Axioms(crate::instance::check_phi_axioms(inst)),
        CheckName::PProperty => CheckOutput::Report(check_p_property(inst)),
        CheckName::ProximalContraction => CheckOutput::Report(check_proximal_contraction(inst)),
        CheckName::ModifiedProximalContraction => {
            CheckOutput::Report(check_modified_proximal_contraction(inst))
        }
        CheckName::PProximalContraction => CheckOutput::Report(check_p_proximal_contraction(inst)),
        CheckName::PProximalContractive => CheckOutput::Report(check_p_proximal_contractive(inst)),
        CheckName::ContractiveHypotheses => CheckOutput::Report(check_contractive_hypotheses(inst)),
        CheckName::RangeCondition => CheckOutput::Report(check_range_condition(inst)),
    }
}

/// Either a contraction-style report or the axiom report.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum CheckOutput {
    Report(CheckReport),
    Axioms(crate::instance::AxiomReport),
}

impl CheckOutput {
    /// Whether this output counts as "passing" for exit status purposes.
    pub fn passes(&self) -> bool {
        match self {
            CheckOutput::Report(r) => r.verdict == Verdict::Holds,
            CheckOutput::Axioms(a) => a.all_hold(),
        }
    }
}

/// Re-evaluate the inequality of `report.definition` at its witness;
/// used to assert witness soundness.
pub fn witness_reproduces(inst: &ProblemInstance, report: &CheckReport) -> bool {
    let Some(w) = &report.witness else {
        return false;
    };
    let eps = inst.eps_eq();
    let lhs = inst.phi_abs(&w.alpha1, &w.alpha2);
    match CheckName::parse(&report.definition) {
        Some(CheckName::ProximalContraction) | Some(CheckName::ModifiedProximalContraction) => {
            let rhs = inst.phi_abs(&w.beta1, &w.beta2);
            lhs == w.lhs && rhs == w.rhs && ((rhs <= eps && lhs > eps) || lhs / rhs >= 1.0)
        }
        Some(CheckName::PProximalContraction) => {
            let rhs = inst.phi_abs(&w.beta1, &w.beta2)
                + (inst.phi_abs(&w.alpha1, &w.beta1) - inst.phi_abs(&w.alpha2, &w.beta2)).abs();
            lhs == w.lhs && rhs == w.rhs && ((rhs <= eps && lhs > eps) || lhs / rhs >= 1.0)
        }
        Some(CheckName::PProximalContractive) => {
            let rhs = inst.phi_abs(&w.beta1, &w.beta2)
                + (inst.phi_abs(&w.alpha1, &w.beta1) - inst.phi_abs(&w.alpha2, &w.beta2)).abs();
            lhs == w.lhs && rhs == w.rhs && lhs > rhs - eps
        }
        Some(CheckName::PProperty) => {
            let rhs = inst.phi_abs(&w.beta1, &w.beta2);
            lhs == w.lhs && rhs == w.rhs && (lhs - rhs).abs() > eps
        }
        _ => false,
    }
}

#[cfg(test)]
pub(crate) fn count_violations_at(inst: &ProblemInstance, c: f64, with_correction: bool) -> usize {
    let pairs = antecedent_pairs(inst);
    let scan = QuadScan::build(inst, pairs);
    let mut count = 0;
    for p in 0..scan.pairs.len() {
        for q in 0..scan.pairs.len() {
            if scan.pairs[p].beta == scan.pairs[q].beta {
                continue;
            }
            let rhs = if with_correction {
                Rhs::BetaGapPlusCrossDiff.value(&scan, p, q)
            } else {
                Rhs::BetaGap.value(&scan, p, q)
            };
            if scan.alpha_gap[p][q] > c * rhs + inst.eps_eq() {
                count += 1;
            }
        }
    }
    count
}
