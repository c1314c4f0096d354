//! 3-SAT to one-class SVM with outliers.
//!
//! A formula with l variables and m clauses becomes 2(l+1) + m points in
//! R^{l+1} with outlier budget z = l+1: the unit vectors ±e_i, then one
//! point per clause with coordinate `alpha` (`-alpha`) at each variable
//! occurring positively (negatively) and `3*alpha` in the last coordinate.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::Point;
use crate::error::{Error, Result};

use super::sat::SatInstance;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionInstance {
    pub points: Vec<Point>,
    pub z: usize,
    pub alpha: f64,
    pub source: SatInstance,
}

impl ReductionInstance {
    pub fn dim(&self) -> usize {
        self.source.num_vars() + 1
    }

    /// Index of +e_i (i is 1-based).
    pub fn plus_unit_index(&self, i: usize) -> usize {
        2 * (i - 1)
    }

    /// Index of -e_i (i is 1-based).
    pub fn minus_unit_index(&self, i: usize) -> usize {
        2 * (i - 1) + 1
    }

    /// Index of the j-th clause point (0-based j).
    pub fn clause_index(&self, j: usize) -> usize {
        2 * self.dim() + j
    }

    /// Decodes a satisfying assignment from an inlier set: variable i is
    /// true exactly when +e_i was kept.
    pub fn decode_assignment(&self, inliers: &[usize]) -> Vec<bool> {
        let l = self.source.num_vars();
        (1..=l)
            .map(|i| inliers.contains(&self.plus_unit_index(i)))
            .collect()
    }

    /// Plain coordinate CSV (`x1,...,x{l+1}` header, one point per row).
    pub fn save_points_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out = String::new();
        for k in 0..self.dim() {
            if k > 0 {
                out.push(',');
            }
            out.push_str(&format!("x{}", k + 1));
        }
        out.push('\n');
        for p in &self.points {
            for (k, v) in p.coords().iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                out.push_str(&format!("{v}"));
            }
            out.push('\n');
        }
        std::fs::write(path, out).map_err(|e| Error::io(path, e))
    }
}

/// Builds the reduction. Requires `alpha > 1/2`; point order is
/// +e_1, -e_1, ..., +e_{l+1}, -e_{l+1}, then clause points in clause order.
pub fn reduce(sat: &SatInstance, alpha: f64) -> Result<ReductionInstance> {
    if !(alpha.is_finite() && alpha > 0.5) {
        return Err(Error::InvalidParam(format!(
            "reduction requires alpha > 1/2, got {alpha}"
        )));
    }
    let l = sat.num_vars();
    let dim = l + 1;
    let mut points = Vec::with_capacity(2 * dim + sat.clauses().len());

    for i in 0..dim {
        let mut plus = vec![0.0; dim];
        plus[i] = 1.0;
        points.push(Point::new(plus)?);
        let mut minus = vec![0.0; dim];
        minus[i] = -1.0;
        points.push(Point::new(minus)?);
    }

    for clause in sat.clauses() {
        let mut q = vec![0.0; dim];
        for &lit in clause {
            let var = lit.unsigned_abs() as usize; // 1-based
            if lit > 0 {
                // A positive occurrence wins over a negative one when both
                // appear (the construction's `else if`).
                q[var - 1] = alpha;
            } else if q[var - 1] == 0.0 {
                q[var - 1] = -alpha;
            }
        }
        q[l] = 3.0 * alpha;
        points.push(Point::new(q)?);
    }

    Ok(ReductionInstance {
        points,
        z: dim,
        alpha,
        source: sat.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_match_the_construction() {
        // l = 3, m = 2 -> 10 points in R^4, z = 4.
        let sat = SatInstance::new(3, vec![[1, 2, 3], [-1, -2, -3]]).unwrap();
        let red = reduce(&sat, 1.0).unwrap();
        assert_eq!(red.points.len(), 10);
        assert_eq!(red.dim(), 4);
        assert_eq!(red.z, 4);
    }

    #[test]
    fn clause_point_layout() {
        // E = u1 v ~u2 v u3 with l = 3, alpha = 1 -> q = (1, -1, 1, 3).
        let sat = SatInstance::new(3, vec![[1, -2, 3]]).unwrap();
        let red = reduce(&sat, 1.0).unwrap();
        let q = &red.points[red.clause_index(0)];
        assert_eq!(q.coords(), &[1.0, -1.0, 1.0, 3.0]);
    }

    #[test]
    fn absent_variable_coordinate_is_zero() {
        let sat = SatInstance::new(3, vec![[1, 1, 1]]).unwrap();
        let red = reduce(&sat, 0.75).unwrap();
        let q = &red.points[red.clause_index(0)];
        assert_eq!(q.coords(), &[0.75, 0.0, 0.0, 2.25]);
    }

    #[test]
    fn tautological_clause_prefers_positive() {
        let sat = SatInstance::new(2, vec![[1, -1, 2]]).unwrap();
        let red = reduce(&sat, 1.0).unwrap();
        let q = &red.points[red.clause_index(0)];
        assert_eq!(q.coords(), &[1.0, 1.0, 3.0]);
    }

    #[test]
    fn unit_vector_ordering() {
        let sat = SatInstance::new(2, vec![[1, 2, 2]]).unwrap();
        let red = reduce(&sat, 1.0).unwrap();
        assert_eq!(
            red.points[red.plus_unit_index(1)].coords(),
            &[1.0, 0.0, 0.0]
        );
        assert_eq!(
            red.points[red.minus_unit_index(1)].coords(),
            &[-1.0, 0.0, 0.0]
        );
        assert_eq!(
            red.points[red.plus_unit_index(3)].coords(),
            &[0.0, 0.0, 1.0]
        );
    }

    #[test]
    fn alpha_at_or_below_half_rejected() {
        let sat = SatInstance::new(1, vec![[1, 1, 1]]).unwrap();
        assert!(reduce(&sat, 0.5).is_err());
        assert!(reduce(&sat, 0.25).is_err());
        assert!(reduce(&sat, 0.500001).is_ok());
    }
}
