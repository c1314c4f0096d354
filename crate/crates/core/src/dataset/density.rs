//! Empirical ball-occupancy check: does every interior ball of radius delta
//! hold more than m sample points?

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::LabeledDataset;

/// Outcome of [`density_check`]. `lambda_proxy` (max/min occupancy over the
/// tested balls) is a uniformity diagnostic only, never a pass/fail input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub delta: f64,
    pub m: usize,
    pub tested_balls: usize,
    pub passing_fraction: f64,
    pub lambda_proxy: f64,
}

/// Samples `n_balls` centers among interior points and reports the fraction
/// whose closed `delta`-ball holds strictly more than `m` same-class points
/// (the center counts itself).
///
/// Interiority proxy: a point is an eligible center when the distance to the
/// farthest of its `m` nearest same-class neighbours is below `margin`.
/// Occupancy is likewise counted within the center's own class.
pub fn density_check(
    data: &LabeledDataset,
    delta: f64,
    m: usize,
    margin: f64,
    n_balls: usize,
    seed: u64,
) -> Result<DensityReport> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::InvalidParam("delta must be positive".into()));
    }
    if !(margin.is_finite() && margin >= 0.0) {
        return Err(Error::InvalidParam("margin must be >= 0".into()));
    }
    if n_balls == 0 {
        return Err(Error::InvalidParam("n_balls must be >= 1".into()));
    }

    let n = data.n();
    // Eligibility: max distance among the m nearest same-class neighbours
    // (vacuously 0 when m == 0 or the class has no other points).
    let mut eligible = Vec::new();
    for i in 0..n {
        let mut dists: Vec<f64> = (0..n)
            .filter(|&j| j != i && data.label(j) == data.label(i))
            .map(|j| data.point(i).dist(data.point(j)))
            .collect();
        dists.sort_by(f64::total_cmp);
        let knn_radius = if m == 0 {
            0.0
        } else {
            dists.iter().take(m).copied().fold(0.0f64, f64::max)
        };
        if knn_radius < margin {
            eligible.push(i);
        }
    }
    if eligible.is_empty() {
        return Err(Error::NoEligibleCenters);
    }

    let centers: Vec<usize> = if eligible.len() <= n_balls {
        eligible
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut picks = rand::seq::index::sample(&mut rng, eligible.len(), n_balls).into_vec();
        picks.sort_unstable();
        picks.into_iter().map(|k| eligible[k]).collect()
    };

    let mut passing = 0usize;
    let mut min_occ = usize::MAX;
    let mut max_occ = 0usize;
    for &c in &centers {
        let occ = (0..n)
            .filter(|&j| data.label(j) == data.label(c))
            .filter(|&j| data.point(c).dist(data.point(j)) <= delta)
            .count();
        if occ > m {
            passing += 1;
        }
        min_occ = min_occ.min(occ);
        max_occ = max_occ.max(occ);
    }

    Ok(DensityReport {
        delta,
        m,
        tested_balls: centers.len(),
        passing_fraction: passing as f64 / centers.len() as f64,
        // The center counts itself, so min_occ >= 1 and the ratio is finite.
        lambda_proxy: max_occ as f64 / min_occ as f64,
    })
}
