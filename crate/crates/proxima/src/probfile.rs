//! On-disk problem definition format.
//!
//! Instances are TOML documents with a `schema_version`, two set sections
//! (`re`, `om`; explicit `points` or `segment_start`/`segment_end`/`samples`),
//! a `phi` expression, a list of `[[f.branch]]` tables (optional `guard`,
//! per-coordinate `values`), and optional `[tolerances]` / `[assumptions]`
//! sections. Reals are plain decimal literals. Loading validates the
//! schema first and then cross-checks dimensions and expression variables,
//! so diagnostics name the offending section or line.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr;
use crate::instance::{Assumptions, MappingF, ModelError, ProblemInstance, ProximityFunction};
use crate::point::{Point, PointSet, SetSource};
use crate::report::SCHEMA_VERSION;
use crate::DEFAULT_EPS_EQ;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {message}")]
    Toml {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: [{section}] {message}")]
    Schema {
        path: String,
        section: String,
        message: String,
    },
    #[error("{path}: {source}")]
    Model {
        path: String,
        #[source]
        source: ModelError,
    },
}

#[derive(Debug, Serialize, Deserialize)]
struct SetDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    points: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    segment_start: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    segment_end: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
struct PhiDoc {
    expr: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct BranchDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    guard: Option<String>,
    values: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct MapDoc {
    branch: Vec<BranchDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TolerancesDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    eps_eq: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize, Default)]
struct AssumptionsDoc {
    #[serde(default)]
    phi_complete: bool,
    #[serde(default)]
    approx_phi_compact: bool,
}

#[derive(Debug, Serialize, Deserialize)]
struct ProblemDoc {
    schema_version: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    re: SetDoc,
    om: SetDoc,
    phi: PhiDoc,
    f: MapDoc,
    #[serde(skip_serializing_if = "Option::is_none")]
    tolerances: Option<TolerancesDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    assumptions: Option<AssumptionsDoc>,
}

fn schema_err(path: &str, section: &str, message: impl Into<String>) -> FileError {
    FileError::Schema {
        path: path.to_string(),
        section: section.to_string(),
        message: message.into(),
    }
}

fn build_set(doc: &SetDoc, default_label: &str, path: &str) -> Result<PointSet, FileError> {
    let label = doc
        .label
        .clone()
        .unwrap_or_else(|| default_label.to_string());
    let section = default_label.to_lowercase();
    match (&doc.points, &doc.segment_start, &doc.segment_end) {
        (Some(points), None, None) => {
            if doc.samples.is_some() {
                return Err(schema_err(path, &section, "samples is only for segments"));
            }
            let points = points.iter().map(|c| Point::new(c.clone())).collect();
            PointSet::explicit(label, points).map_err(|e| FileError::Model {
                path: path.to_string(),
                source: e.into(),
            })
        }
        (None, Some(start), Some(end)) => {
            let samples = doc
                .samples
                .ok_or_else(|| schema_err(path, &section, "segment needs samples"))?;
            PointSet::segment(
                label,
                Point::new(start.clone()),
                Point::new(end.clone()),
                samples,
            )
            .map_err(|e| FileError::Model {
                path: path.to_string(),
                source: e.into(),
            })
        }
        _ => Err(schema_err(
            path,
            &section,
            "give either points or segment_start + segment_end + samples",
        )),
    }
}

/// Parse and fully validate a problem document.
pub fn from_toml_str(text: &str, path: &str) -> Result<ProblemInstance, FileError> {
    let doc: ProblemDoc = toml::from_str(text).map_err(|e| {
        let (line, column) = e
            .span()
            .map(|s| offset_to_line_col(text, s.start))
            .unwrap_or((0, 0));
        FileError::Toml {
            path: path.to_string(),
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(schema_err(
            path,
            "schema_version",
            format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                doc.schema_version
            ),
        ));
    }

    let re = build_set(&doc.re, "Re", path)?;
    let om = build_set(&doc.om, "Om", path)?;
    if re.dim() != om.dim() {
        return Err(schema_err(
            path,
            "om",
            format!(
                "dimension {} does not match re dimension {}",
                om.dim(),
                re.dim()
            ),
        ));
    }
    let dim = re.dim();

    let model = |e: ModelError| FileError::Model {
        path: path.to_string(),
        source: e,
    };

    let phi = ProximityFunction::parse(&doc.phi.expr, dim).map_err(model)?;

    if doc.f.branch.is_empty() {
        return Err(schema_err(path, "f", "at least one branch is required"));
    }
    let mut branches = Vec::new();
    for b in &doc.f.branch {
        let guard = b
            .guard
            .as_ref()
            .map(|g| expr::parse(g))
            .transpose()
            .map_err(|e| model(e.into()))?;
        let values = b
            .values
            .iter()
            .map(|v| expr::parse(v))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| model(e.into()))?;
        branches.push((guard, values));
    }
    let map = MappingF::new(branches, dim).map_err(model)?;

    let eps_eq = doc
        .tolerances
        .as_ref()
        .and_then(|t| t.eps_eq)
        .unwrap_or(DEFAULT_EPS_EQ);
    let assumptions = doc
        .assumptions
        .map(|a| Assumptions {
            phi_complete: a.phi_complete,
            approx_phi_compact: a.approx_phi_compact,
        })
        .unwrap_or_default();

    let name = doc.name.unwrap_or_else(|| {
        Path::new(path)
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "instance".to_string())
    });

    ProblemInstance::new(name, re, om, map, phi, eps_eq, assumptions).map_err(model)
}

/// Load a problem file from disk.
pub fn load(path: &Path) -> Result<ProblemInstance, FileError> {
    let text = std::fs::read_to_string(path).map_err(|e| FileError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    from_toml_str(&text, &path.display().to_string())
}

fn set_doc(set: &PointSet) -> SetDoc {
    match set.source() {
        SetSource::Explicit => SetDoc {
            label: Some(set.label().to_string()),
            points: Some(set.points().iter().map(|p| p.coords().to_vec()).collect()),
            segment_start: None,
            segment_end: None,
            samples: None,
        },
        SetSource::Segment {
            start,
            end,
            samples,
        } => SetDoc {
            label: Some(set.label().to_string()),
            points: None,
            segment_start: Some(start.coords().to_vec()),
            segment_end: Some(end.coords().to_vec()),
            samples: Some(*samples),
        },
    }
}

/// Serialise an instance to the problem-file format. Expressions are
/// pretty-printed from their trees, which re-parse to identical trees.
pub fn to_toml_string(inst: &ProblemInstance) -> String {
    let doc = ProblemDoc {
        schema_version: SCHEMA_VERSION,
        name: Some(inst.name().to_string()),
        re: set_doc(inst.re()),
        om: set_doc(inst.om()),
        phi: PhiDoc {
            expr: inst.phi().ast().to_string(),
        },
        f: MapDoc {
            branch: inst
                .map()
                .branches()
                .iter()
                .map(|b| BranchDoc {
                    guard: b.guard_ast().map(|g| g.to_string()),
                    values: b.value_asts().map(|v| v.to_string()).collect(),
                })
                .collect(),
        },
        tolerances: Some(TolerancesDoc {
            eps_eq: Some(inst.eps_eq()),
        }),
        assumptions: Some(AssumptionsDoc {
            phi_complete: inst.assumptions().phi_complete,
            approx_phi_compact: inst.assumptions().approx_phi_compact,
        }),
    };
    toml::to_string_pretty(&doc).expect("problem documents serialise")
}

fn offset_to_line_col(text: &str, offset: usize) -> (usize, usize) {
    let mut line = 1;
    let mut col = 1;
    for (i, c) in text.char_indices() {
        if i >= offset {
            break;
        }
        if c == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    (line, col)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn builtins_round_trip_through_the_file_format() {
        for name in corpus::BUILTIN_NAMES {
            let original = corpus::load_builtin(name).unwrap().instance;
            let text = to_toml_string(&original);
            let reloaded = from_toml_str(&text, &format!("{name}.prob")).unwrap();
            assert_eq!(reloaded, original, "{name}");
        }
    }

    #[test]
    fn parse_errors_are_line_anchored() {
        let err = from_toml_str("schema_version = 1\nre = {", "bad.prob").unwrap_err();
        match err {
            FileError::Toml { line, .. } => assert!(line >= 1),
            other => panic!("expected toml error, got {other}"),
        }
    }

    #[test]
    fn unbound_variable_is_diagnosed() {
        let text = r#"
schema_version = 1

[re]
points = [[0.0, 0.0]]

[om]
points = [[0.0, 1.0]]

[phi]
expr = "c3 - b2"

[[f.branch]]
values = ["a1", "a2"]
"#;
        let err = from_toml_str(text, "unbound.prob").unwrap_err();
        assert!(err.to_string().contains("unbound variable 'c3'"));
    }

    #[test]
    fn empty_set_is_rejected() {
        let text = r#"
schema_version = 1

[re]
points = []

[om]
points = [[0.0, 1.0]]

[phi]
expr = "a2 - b2"

[[f.branch]]
values = ["a1", "a2"]
"#;
        let err = from_toml_str(text, "empty.prob").unwrap_err();
        assert!(err.to_string().contains("empty"));
    }

    #[test]
    fn dimension_mismatch_is_diagnosed() {
        let text = r#"
schema_version = 1

[re]
points = [[0.0]]

[om]
points = [[0.0, 1.0]]

[phi]
expr = "a1 - b1"

[[f.branch]]
values = ["a1"]
"#;
        let err = from_toml_str(text, "dims.prob").unwrap_err();
        assert!(err.to_string().contains("dimension"));
    }

    #[test]
    fn wrong_schema_version_is_rejected() {
        let text = r#"
schema_version = 99

[re]
points = [[0.0]]

[om]
points = [[1.0]]

[phi]
expr = "a1 - b1"

[[f.branch]]
values = ["a1"]
"#;
        let err = from_toml_str(text, "v.prob").unwrap_err();
        assert!(err.to_string().contains("schema_version"));
    }
}
