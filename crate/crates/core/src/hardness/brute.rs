//! Exhaustive solver for one-class SVM with outliers at small scale.

use crate::dataset::Point;
use crate::error::{Error, Result};
use crate::svm::min_norm_distance;

const SUBSET_BUDGET: u128 = 10_000_000;

/// Enumerates every (n-z)-subset of `points`, scores each by its one-class
/// margin (distance from the origin to the subset's convex hull), and
/// returns the best width with the lexicographically smallest optimal
/// inlier set (width ties resolved at 1e-9).
///
/// Two sound prunes keep this fast: a subset containing an exact antipodal
/// pair has the origin inside its hull (width 0), and no subset can beat the
/// norm of its shortest vertex.
pub fn oneclass_with_outliers_brute_force(points: &[Point], z: usize) -> Result<(f64, Vec<usize>)> {
    let n = points.len();
    if n == 0 {
        return Err(Error::EmptyData("no points".into()));
    }
    if z >= n {
        return Err(Error::InvalidParam(format!(
            "outlier budget {z} must be below the point count {n}"
        )));
    }
    if binomial(n, z) > SUBSET_BUDGET {
        return Err(Error::BudgetExceeded(format!(
            "C({n}, {z}) subsets exceed the 1e7 budget"
        )));
    }

    // Exact antipodal partners (coordinate-wise negation).
    let mut partner: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        if partner[i].is_some() {
            continue;
        }
        for j in (i + 1)..n {
            let anti = points[i]
                .coords()
                .iter()
                .zip(points[j].coords())
                .all(|(a, b)| *a == -*b);
            if anti {
                partner[i] = Some(j);
                partner[j] = Some(i);
                break;
            }
        }
    }

    let keep = n - z;
    let mut subset: Vec<usize> = (0..keep).collect();
    let mut in_subset = vec![false; n];
    let mut best_width = f64::NEG_INFINITY;
    let mut best_subset: Vec<usize> = Vec::new();
    let tol = 1e-9;

    loop {
        for f in in_subset.iter_mut() {
            *f = false;
        }
        for &i in &subset {
            in_subset[i] = true;
        }

        let has_antipodal = subset
            .iter()
            .any(|&i| partner[i].is_some_and(|j| j > i && in_subset[j]));

        let width = if has_antipodal {
            0.0
        } else {
            let min_vertex = subset
                .iter()
                .map(|&i| points[i].coords().iter().map(|c| c * c).sum::<f64>().sqrt())
                .fold(f64::INFINITY, f64::min);
            if min_vertex <= best_width + tol {
                // Cannot beat the incumbent: the hull reaches at least as
                // close as its shortest vertex.
                f64::NEG_INFINITY
            } else {
                let slices: Vec<&[f64]> = subset.iter().map(|&i| points[i].coords()).collect();
                min_norm_distance(&slices)
            }
        };

        // Lexicographic enumeration order plus strictly-better replacement
        // keeps the lexicographically smallest optimum among ties.
        if width > best_width + tol {
            best_width = width;
            best_subset = subset.clone();
        }

        if !advance(&mut subset, n) {
            break;
        }
    }

    Ok((best_width, best_subset))
}

/// Next k-combination of 0..n in lexicographic order; false when exhausted.
fn advance(subset: &mut [usize], n: usize) -> bool {
    let k = subset.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if subset[i] < n - k + i {
            subset[i] += 1;
            for j in (i + 1)..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c.saturating_mul((n - i) as u128) / (i as u128 + 1);
        if c > SUBSET_BUDGET {
            return c;
        }
    }
    c
}
