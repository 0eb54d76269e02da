//! Stable output envelope for machine-readable reports.
//!
//! Every structured document carries `schema_version`; field names inside
//! the payloads are part of the contract and never change meaning within
//! a version.

use serde::Serialize;

use crate::checkers::CheckOutput;
use crate::oracle::OracleResult;
use crate::point::Point;
use crate::solver::{IterationTrace, TraceStatus};

pub const SCHEMA_VERSION: u32 = 1;

/// Envelope for `check` runs.
#[derive(Debug, Serialize)]
pub struct CheckDocument {
    pub schema_version: u32,
    pub instance: String,
    pub reports: Vec<CheckOutput>,
    pub range_warnings: usize,
}

/// Envelope and summary for `solve` runs.
#[derive(Debug, Serialize)]
pub struct SolveDocument {
    pub schema_version: u32,
    pub instance: String,
    pub status: TraceStatus,
    pub iterations: usize,
    pub final_point: Point,
    pub final_residual: f64,
}

impl SolveDocument {
    pub fn from_trace(instance: &str, trace: &IterationTrace) -> Self {
        SolveDocument {
            schema_version: SCHEMA_VERSION,
            instance: instance.to_string(),
            status: trace.status,
            iterations: trace.iterations(),
            final_point: trace.final_point().clone(),
            final_residual: trace.final_residual,
        }
    }
}

/// Envelope for `oracle` runs.
#[derive(Debug, Serialize)]
pub struct OracleDocument {
    pub schema_version: u32,
    pub instance: String,
    pub result: OracleResult,
}

/// Trace export: one row per iterate with the gap and feasibility error
/// of the step that produced it (blank for the start row).
pub fn trace_csv(trace: &IterationTrace) -> String {
    let dim = trace.points[0].dim();
    let mut out = String::from("n");
    for i in 1..=dim {
        out.push_str(&format!(",x{i}"));
    }
    out.push_str(",step_gap,feasibility_error\n");
    for (n, p) in trace.points.iter().enumerate() {
        out.push_str(&n.to_string());
        for c in p.coords() {
            out.push_str(&format!(",{c}"));
        }
        if n == 0 {
            out.push_str(",,");
        } else {
            out.push_str(&format!(
                ",{},{}",
                trace.step_gaps[n - 1],
                trace.feasibility_errors[n - 1]
            ));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::solver::{iterate, SolveOptions};

    #[test]
    fn trace_csv_has_one_row_per_iterate() {
        let inst = corpus::synthetic_halving();
        let trace = iterate(
            &inst,
            &SolveOptions {
                start: Some(Point::new(vec![0.0, 1.0])),
                ..Default::default()
            },
        )
        .unwrap();
        let csv = trace_csv(&trace);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,x1,x2,step_gap,feasibility_error");
        assert_eq!(lines.len(), trace.points.len() + 1);
        assert!(lines[1].starts_with("0,0,1,,"));
        assert!(lines[2].starts_with("1,0,0.5,0.5,0"));
    }
}
