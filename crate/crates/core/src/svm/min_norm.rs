//! Minimum-norm point of a convex hull.
//!
//! Frank-Wolfe with away steps and exact line search, followed by an
//! active-set polish (equality-constrained least squares on the support)
//! that pushes the final iterate to solver tolerance. Plain Frank-Wolfe
//! zigzags near low-dimensional faces and cannot reach 1e-9 in reasonable
//! time; the away steps restore linear convergence.

use crate::dataset::{dot, Point};

const GAP_REL_TOL: f64 = 1e-12;
const MAX_ITERS: usize = 50_000;

/// Margin width of a one-class instance: the distance from the origin to the
/// convex hull of `points` (0 when the origin lies inside the hull).
pub fn one_class_margin(points: &[Point]) -> f64 {
    let slices: Vec<&[f64]> = points.iter().map(|p| p.coords()).collect();
    min_norm_distance(&slices)
}

/// Slice-level entry point used by the subset-enumeration oracles.
pub fn min_norm_distance(pts: &[&[f64]]) -> f64 {
    assert!(!pts.is_empty(), "min_norm_distance on empty set");
    let n = pts.len();
    let d = pts[0].len();
    let scale_sq = pts
        .iter()
        .map(|p| dot(p, p))
        .fold(0.0f64, f64::max)
        .max(1e-300);

    if n == 1 {
        return dot(pts[0], pts[0]).sqrt();
    }

    // Start from the shortest vertex.
    let start = (0..n)
        .min_by(|&a, &b| dot(pts[a], pts[a]).total_cmp(&dot(pts[b], pts[b])))
        .expect("nonempty");
    let mut weights = vec![0.0f64; n];
    weights[start] = 1.0;
    let mut x: Vec<f64> = pts[start].to_vec();

    for iter in 0..MAX_ITERS {
        let xx = dot(&x, &x);
        if xx <= 1e-24 * scale_sq {
            return 0.0;
        }

        let mut fw = 0usize;
        let mut fw_dot = f64::INFINITY;
        let mut away = usize::MAX;
        let mut away_dot = f64::NEG_INFINITY;
        for i in 0..n {
            let di = dot(&x, pts[i]);
            if di < fw_dot {
                fw_dot = di;
                fw = i;
            }
            if weights[i] > 0.0 && di > away_dot {
                away_dot = di;
                away = i;
            }
        }

        let gap_fw = xx - fw_dot;
        if gap_fw <= GAP_REL_TOL * scale_sq {
            break;
        }

        let gap_away = if away != usize::MAX {
            away_dot - xx
        } else {
            f64::NEG_INFINITY
        };

        let (dir, theta_max, step_kind) =
            if gap_fw >= gap_away || away == usize::MAX || weights[away] >= 1.0 {
                let dir: Vec<f64> = (0..d).map(|k| pts[fw][k] - x[k]).collect();
                (dir, 1.0, StepKind::Toward(fw))
            } else {
                let w = weights[away];
                let dir: Vec<f64> = (0..d).map(|k| x[k] - pts[away][k]).collect();
                (dir, w / (1.0 - w), StepKind::Away(away))
            };

        let dd = dot(&dir, &dir);
        if dd <= 1e-30 * scale_sq {
            break;
        }
        let theta = (-dot(&x, &dir) / dd).clamp(0.0, theta_max);
        if theta <= 0.0 {
            break;
        }

        match step_kind {
            StepKind::Toward(s) => {
                for w in weights.iter_mut() {
                    *w *= 1.0 - theta;
                }
                weights[s] += theta;
            }
            StepKind::Away(a) => {
                for w in weights.iter_mut() {
                    *w *= 1.0 + theta;
                }
                weights[a] -= theta;
                if weights[a] < 1e-15 || theta >= theta_max - 1e-15 {
                    weights[a] = 0.0;
                }
            }
        }

        for k in 0..d {
            x[k] += theta * dir[k];
        }

        // Periodically rebuild x from the weights to cancel drift.
        if iter % 64 == 63 {
            let sum: f64 = weights.iter().sum();
            for w in weights.iter_mut() {
                *w /= sum;
            }
            x = combine(pts, &weights);
        }
    }

    if let Some(polished) = polish(pts, &weights) {
        if dot(&polished, &polished) <= dot(&x, &x) {
            x = polished;
        }
    }

    let norm = dot(&x, &x).sqrt();
    if norm < 1e-12 * scale_sq.sqrt() {
        0.0
    } else {
        norm
    }
}

enum StepKind {
    Toward(usize),
    Away(usize),
}

fn combine(pts: &[&[f64]], weights: &[f64]) -> Vec<f64> {
    let d = pts[0].len();
    let mut x = vec![0.0f64; d];
    for (i, &w) in weights.iter().enumerate() {
        if w != 0.0 {
            for k in 0..d {
                x[k] += w * pts[i][k];
            }
        }
    }
    x
}

/// One exact active-set step: solve min ||sum l_a p_a||^2 with sum l_a = 1
/// over the current support and accept the solution when it stays convex.
fn polish(pts: &[&[f64]], weights: &[f64]) -> Option<Vec<f64>> {
    let active: Vec<usize> = (0..pts.len()).filter(|&i| weights[i] > 1e-12).collect();
    let m = active.len();
    if m == 0 || m > 64 {
        return None;
    }
    if m == 1 {
        return Some(pts[active[0]].to_vec());
    }

    // KKT system: [G 1; 1^T 0] [lambda; mu] = [0; 1].
    let dim = m + 1;
    let mut mat = vec![0.0f64; dim * dim];
    let mut rhs = vec![0.0f64; dim];
    for a in 0..m {
        for b in 0..m {
            mat[a * dim + b] = dot(pts[active[a]], pts[active[b]]);
        }
        mat[a * dim + m] = -1.0;
        mat[m * dim + a] = 1.0;
    }
    rhs[m] = 1.0;
    let sol = solve_dense(&mut mat, &mut rhs, dim)?;

    let mut lambda: Vec<f64> = sol[..m].to_vec();
    if lambda.iter().any(|&l| l < -1e-10) {
        return None;
    }
    for l in lambda.iter_mut() {
        if *l < 0.0 {
            *l = 0.0;
        }
    }
    let sum: f64 = lambda.iter().sum();
    if sum <= 0.0 {
        return None;
    }
    let mut full = vec![0.0f64; pts.len()];
    for (k, &i) in active.iter().enumerate() {
        full[i] = lambda[k] / sum;
    }
    Some(combine(pts, &full))
}

/// Gaussian elimination with partial pivoting; None on (near-)singularity.
fn solve_dense(mat: &mut [f64], rhs: &mut [f64], n: usize) -> Option<Vec<f64>> {
    for col in 0..n {
        let mut piv = col;
        let mut best = mat[col * n + col].abs();
        for r in (col + 1)..n {
            let v = mat[r * n + col].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best < 1e-12 {
            return None;
        }
        if piv != col {
            for k in 0..n {
                mat.swap(col * n + k, piv * n + k);
            }
            rhs.swap(col, piv);
        }
        let diag = mat[col * n + col];
        for r in (col + 1)..n {
            let factor = mat[r * n + col] / diag;
            if factor != 0.0 {
                for k in col..n {
                    mat[r * n + k] -= factor * mat[col * n + k];
                }
                rhs[r] -= factor * rhs[col];
            }
        }
    }
    let mut x = vec![0.0f64; n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for k in (row + 1)..n {
            acc -= mat[row * n + k] * x[k];
        }
        x[row] = acc / mat[row * n + row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Point;

    fn pts(rows: &[&[f64]]) -> Vec<Point> {
        rows.iter()
            .map(|r| Point::new(r.to_vec()).unwrap())
            .collect()
    }

    #[test]
    fn two_unit_vectors() {
        let p = pts(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let w = one_class_margin(&p);
        assert!((w - 1.0 / 2.0f64.sqrt()).abs() < 1e-9, "{w}");
    }

    #[test]
    fn single_point() {
        let p = pts(&[&[1.0, 0.0]]);
        assert!((one_class_margin(&p) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn origin_inside_hull() {
        let p = pts(&[&[1.0, 0.0], &[-1.0, 0.0]]);
        assert_eq!(one_class_margin(&p), 0.0);
        let q = pts(&[&[1.0, 0.0], &[-1.0, 1.0], &[-1.0, -1.0]]);
        assert!(one_class_margin(&q) < 1e-9);
    }

    #[test]
    fn offset_segment() {
        // Segment from (1, 1) to (3, 1): closest point is (1, 1).
        let p = pts(&[&[1.0, 1.0], &[3.0, 1.0]]);
        assert!((one_class_margin(&p) - 2.0f64.sqrt()).abs() < 1e-9);
        // Segment crossing x = 0 at height 1: distance 1.
        let q = pts(&[&[-1.0, 1.0], &[3.0, 1.0]]);
        assert!((one_class_margin(&q) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn uniform_mean_of_orthonormal_vectors() {
        // Hull of k orthonormal vectors: min-norm point is the centroid,
        // norm 1/sqrt(k).
        for k in 2..=6 {
            let rows: Vec<Vec<f64>> = (0..k)
                .map(|i| {
                    let mut v = vec![0.0; 6];
                    v[i] = 1.0;
                    v
                })
                .collect();
            let p: Vec<Point> = rows.into_iter().map(|r| Point::new(r).unwrap()).collect();
            let w = one_class_margin(&p);
            assert!((w - 1.0 / (k as f64).sqrt()).abs() < 1e-9, "k={k} w={w}");
        }
    }

    #[test]
    fn monotone_under_subset() {
        // Removing points can only move the hull away from the origin.
        let p = pts(&[&[2.0, 0.5], &[0.5, 2.0], &[1.5, 1.5], &[3.0, 0.2]]);
        let full = one_class_margin(&p);
        for drop in 0..p.len() {
            let sub: Vec<Point> = p
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != drop)
                .map(|(_, pt)| pt.clone())
                .collect();
            assert!(one_class_margin(&sub) >= full - 1e-10);
        }
    }
}
