//! Point/label containers, synthetic manifold generation, and the empirical
//! ball-occupancy density check.

mod density;
mod io;
mod synthetic;

pub use density::{density_check, DensityReport};
pub use io::{load_csv, load_libsvm, load_mask, save_csv, save_libsvm, save_mask};
pub use synthetic::{generate_synthetic, ManifoldSpec};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A dense feature vector. All coordinates are finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidParam("point must have dimension >= 1".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParam(
                "point has non-finite coordinate".into(),
            ));
        }
        Ok(Point { coords })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dist(&self, other: &Point) -> f64 {
        self.dist_sq(other).sqrt()
    }

    pub fn dist_sq(&self, other: &Point) -> f64 {
        squared_distance(&self.coords, &other.coords)
    }
}

impl std::ops::Index<usize> for Point {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.coords[i]
    }
}

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Binary class label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "+1")]
    Plus,
    #[serde(rename = "-1")]
    Minus,
}

impl Label {
    pub fn to_f64(self) -> f64 {
        match self {
            Label::Plus => 1.0,
            Label::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Label {
        match self {
            Label::Plus => Label::Minus,
            Label::Minus => Label::Plus,
        }
    }

    /// Sign convention used everywhere: value >= 0 maps to `Plus`.
    pub fn from_sign(v: f64) -> Label {
        if v >= 0.0 {
            Label::Plus
        } else {
            Label::Minus
        }
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Label::Plus => write!(f, "1"),
            Label::Minus => write!(f, "-1"),
        }
    }
}

/// A labelled point set with an optional per-point poison mask
/// (`true` = injected or flipped by an attack).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    points: Vec<Point>,
    labels: Vec<Label>,
    poison_mask: Option<Vec<bool>>,
    name: String,
}

impl LabeledDataset {
    pub fn new(
        points: Vec<Point>,
        labels: Vec<Label>,
        poison_mask: Option<Vec<bool>>,
        name: impl Into<String>,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyData("no samples".into()));
        }
        if points.len() != labels.len() {
            return Err(Error::InvalidParam(format!(
                "{} points but {} labels",
                points.len(),
                labels.len()
            )));
        }
        if let Some(mask) = &poison_mask {
            if mask.len() != points.len() {
                return Err(Error::InvalidParam(format!(
                    "{} points but {} mask entries",
                    points.len(),
                    mask.len()
                )));
            }
        }
        let dim = points[0].dim();
        if points.iter().any(|p| p.dim() != dim) {
            return Err(Error::InvalidParam("points have mixed dimensions".into()));
        }
        Ok(LabeledDataset {
            points,
            labels,
            poison_mask,
            name: name.into(),
        })
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> Label {
        self.labels[i]
    }

    pub fn poison_mask(&self) -> Option<&[bool]> {
        self.poison_mask.as_deref()
    }

    pub fn has_both_labels(&self) -> bool {
        self.labels.contains(&Label::Plus) && self.labels.contains(&Label::Minus)
    }

    pub fn class_indices(&self, label: Label) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.labels[i] == label).collect()
    }

    /// Restriction to `indices` (in the given order). The poison mask, when
    /// present, is restricted alongside.
    pub fn subset(&self, indices: &[usize], name: impl Into<String>) -> Result<LabeledDataset> {
        let points = indices.iter().map(|&i| self.points[i].clone()).collect();
        let labels = indices.iter().map(|&i| self.labels[i]).collect();
        let mask = self
            .poison_mask
            .as_ref()
            .map(|m| indices.iter().map(|&i| m[i]).collect());
        LabeledDataset::new(points, labels, mask, name)
    }

    /// Copy with every point re-labelled and the mask replaced.
    pub(crate) fn with_labels_and_mask(
        &self,
        labels: Vec<Label>,
        poison_mask: Vec<bool>,
        name: impl Into<String>,
    ) -> Result<LabeledDataset> {
        LabeledDataset::new(self.points.clone(), labels, Some(poison_mask), name)
    }
}

/// Exact maximum pairwise Euclidean distance; 0 for a single point.
pub fn diameter(data: &LabeledDataset) -> f64 {
    let pts = data.points();
    let mut best = 0.0f64;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let d = pts[i].dist_sq(&pts[j]);
            if d > best {
                best = d;
            }
        }
    }
    best.sqrt()
}
