//! Points and finite point sets.
//!
//! A set is either an explicit list or a uniformly sampled segment. Segment
//! sampling with `n` points materialises exactly `a + (i/(n-1))*(b-a)` for
//! `i = 0..n-1`; with `n = 1` only `a`. Sets are immutable after
//! construction and reject duplicates closer than [`crate::EPS_DUP`].

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::EPS_DUP;

/// A point of the ambient space: an ordered tuple of finite reals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    /// Coordinate-wise max distance (Chebyshev).
    pub fn max_dist(&self, other: &Point) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    /// Same point up to the duplicate tolerance.
    pub fn same_as(&self, other: &Point) -> bool {
        self.dim() == other.dim() && self.max_dist(other) <= EPS_DUP
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

/// How a set's points were produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SetSource {
    Explicit,
    Segment {
        start: Point,
        end: Point,
        samples: usize,
    },
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SetError {
    #[error("point set '{label}' is empty")]
    Empty { label: String },
    #[error("point set '{label}' mixes dimensions {a} and {b}")]
    MixedDimensions { label: String, a: usize, b: usize },
    #[error("point set '{label}' has a non-finite coordinate in point {index}")]
    NonFinite { label: String, index: usize },
    #[error("point set '{label}' has duplicate points at indices {i} and {j}")]
    Duplicate { label: String, i: usize, j: usize },
    #[error("segment for '{label}' needs at least 1 sample")]
    NoSamples { label: String },
}

/// A finite, indexed, labelled collection of points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    label: String,
    points: Vec<Point>,
    source: SetSource,
}

impl PointSet {
    pub fn explicit(label: impl Into<String>, points: Vec<Point>) -> Result<Self, SetError> {
        let set = PointSet {
            label: label.into(),
            points,
            source: SetSource::Explicit,
        };
        set.validate()?;
        Ok(set)
    }

    /// Uniform samples of the segment from `start` to `end`, inclusive.
    pub fn segment(
        label: impl Into<String>,
        start: Point,
        end: Point,
        samples: usize,
    ) -> Result<Self, SetError> {
        let label = label.into();
        if samples == 0 {
            return Err(SetError::NoSamples { label });
        }
        let mut points = Vec::with_capacity(samples);
        if samples == 1 {
            points.push(start.clone());
        } else {
            let denom = (samples - 1) as f64;
            for i in 0..samples {
                let t = i as f64 / denom;
                let coords = start
                    .coords()
                    .iter()
                    .zip(end.coords())
                    .map(|(a, b)| a + t * (b - a))
                    .collect();
                points.push(Point(coords));
            }
        }
        let set = PointSet {
            label,
            points,
            source: SetSource::Segment {
                start,
                end,
                samples,
            },
        };
        set.validate()?;
        Ok(set)
    }

    fn validate(&self) -> Result<(), SetError> {
        if self.points.is_empty() {
            return Err(SetError::Empty {
                label: self.label.clone(),
            });
        }
        let dim = self.points[0].dim();
        for (i, p) in self.points.iter().enumerate() {
            if p.dim() != dim {
                return Err(SetError::MixedDimensions {
                    label: self.label.clone(),
                    a: dim,
                    b: p.dim(),
                });
            }
            if !p.coords().iter().all(|c| c.is_finite()) {
                return Err(SetError::NonFinite {
                    label: self.label.clone(),
                    index: i,
                });
            }
        }
        for i in 0..self.points.len() {
            for j in (i + 1)..self.points.len() {
                if self.points[i].same_as(&self.points[j]) {
                    return Err(SetError::Duplicate {
                        label: self.label.clone(),
                        i,
                        j,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn source(&self) -> &SetSource {
        &self.source
    }

    /// Half the sampling step per coordinate, for sampled segments.
    /// Explicit sets have no intrinsic resolution and return `None`.
    pub fn half_spacing(&self) -> Option<Vec<f64>> {
        match &self.source {
            SetSource::Explicit => None,
            SetSource::Segment {
                start,
                end,
                samples,
            } => {
                if *samples < 2 {
                    return Some(vec![0.0; start.dim()]);
                }
                let denom = (*samples - 1) as f64;
                Some(
                    start
                        .coords()
                        .iter()
                        .zip(end.coords())
                        .map(|(a, b)| ((b - a) / denom).abs() / 2.0)
                        .collect(),
                )
            }
        }
    }

    /// Index of the first point within `tol` (coordinate-wise) of `p`.
    pub fn find_within(&self, p: &Point, tol: f64) -> Option<usize> {
        self.points
            .iter()
            .position(|q| q.dim() == p.dim() && q.max_dist(p) <= tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(coords: &[f64]) -> Point {
        Point::new(coords.to_vec())
    }

    #[test]
    fn segment_sampling_hits_exact_endpoints() {
        let s = PointSet::segment("s", pt(&[0.0, -1.0]), pt(&[0.0, 0.0]), 101).unwrap();
        assert_eq!(s.len(), 101);
        assert_eq!(s.points()[0], pt(&[0.0, -1.0]));
        assert_eq!(s.points()[100], pt(&[0.0, 0.0]));
        assert_eq!(s.points()[50].coords()[1], -0.5);
    }

    #[test]
    fn single_sample_yields_start() {
        let s = PointSet::segment("s", pt(&[2.0, 3.0]), pt(&[9.0, 9.0]), 1).unwrap();
        assert_eq!(s.points(), &[pt(&[2.0, 3.0])]);
    }

    #[test]
    fn rejects_empty_and_mixed_and_duplicates() {
        assert!(matches!(
            PointSet::explicit("e", vec![]),
            Err(SetError::Empty { .. })
        ));
        assert!(matches!(
            PointSet::explicit("m", vec![pt(&[0.0]), pt(&[0.0, 1.0])]),
            Err(SetError::MixedDimensions { .. })
        ));
        assert!(matches!(
            PointSet::explicit("d", vec![pt(&[1.0, 2.0]), pt(&[1.0, 2.0 + 1e-13])]),
            Err(SetError::Duplicate { .. })
        ));
        // distinct grid points just above the tolerance survive
        assert!(PointSet::explicit("ok", vec![pt(&[0.0]), pt(&[1e-11])]).is_ok());
    }

    #[test]
    fn half_spacing_reflects_the_grid() {
        let s = PointSet::segment("s", pt(&[0.0, 0.0]), pt(&[0.0, 1.0]), 101).unwrap();
        assert_eq!(s.half_spacing(), Some(vec![0.0, 0.005]));
        let e = PointSet::explicit("e", vec![pt(&[0.0, 0.0])]).unwrap();
        assert_eq!(e.half_spacing(), None);
    }
}
