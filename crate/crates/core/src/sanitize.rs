//! The five data-sanitization defenses and F1 scoring of removed-point
//! identification. Every defense removes a fixed budget `z` split across the
//! two classes proportionally to class size (largest-remainder rounding,
//! ties to the positive class).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::{dot, Label, LabeledDataset};
use crate::dbscan::{cluster, DbscanParams};
use crate::error::{Error, Result};
use crate::svm::{self, KernelSpec};

/// MinPts default used throughout the experiments.
pub const DEFAULT_MIN_PTS: usize = 5;
/// k-NN defense default neighbour count.
pub const DEFAULT_KNN_K: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SanitizationResult {
    pub kept: Vec<usize>,
    pub removed: Vec<usize>,
    pub tuned_radius: Option<f64>,
    pub defense_name: String,
}

impl SanitizationResult {
    pub fn kept_dataset(&self, data: &LabeledDataset) -> Result<LabeledDataset> {
        data.subset(&self.kept, format!("{}:{}", data.name(), self.defense_name))
    }

    /// One removed index per line under a `removed_index` header.
    pub fn save_removed_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out = String::from("removed_index\n");
        for i in &self.removed {
            out.push_str(&format!("{i}\n"));
        }
        std::fs::write(path, out).map_err(|e| Error::io(path, e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct F1Score {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Precision/recall/F1 of the removed set against the poison mask.
/// Empty denominators score 0.
pub fn f1(result: &SanitizationResult, poison_mask: &[bool]) -> F1Score {
    let tp = result.removed.iter().filter(|&&i| poison_mask[i]).count() as f64;
    let removed = result.removed.len() as f64;
    let poison = poison_mask.iter().filter(|&&m| m).count() as f64;
    let precision = if removed > 0.0 { tp / removed } else { 0.0 };
    let recall = if poison > 0.0 { tp / poison } else { 0.0 };
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    F1Score {
        precision,
        recall,
        f1,
    }
}

/// Largest-remainder split of `z` across the two class sizes; a remainder
/// tie goes to the positive class.
pub fn split_budget(z: usize, n_plus: usize, n_minus: usize) -> (usize, usize) {
    let n = (n_plus + n_minus) as f64;
    if n == 0.0 || z == 0 {
        return (0, 0);
    }
    let q_plus = z as f64 * n_plus as f64 / n;
    let q_minus = z as f64 * n_minus as f64 / n;
    let mut z_plus = q_plus.floor() as usize;
    let mut z_minus = q_minus.floor() as usize;
    // The quotas sum to z exactly, so at most one unit is left over.
    if z_plus + z_minus < z {
        if q_plus - q_plus.floor() >= q_minus - q_minus.floor() {
            z_plus += 1;
        } else {
            z_minus += 1;
        }
    }
    (z_plus, z_minus)
}

fn class_budgets(data: &LabeledDataset, z: usize) -> Result<[(Label, Vec<usize>, usize); 2]> {
    let plus = data.class_indices(Label::Plus);
    let minus = data.class_indices(Label::Minus);
    let (z_plus, z_minus) = split_budget(z, plus.len(), minus.len());
    for (idx, z_c) in [(&plus, z_plus), (&minus, z_minus)] {
        if !idx.is_empty() && z_c >= idx.len() {
            return Err(Error::BudgetTooLarge {
                z: z_c,
                class_size: idx.len(),
            });
        }
    }
    Ok([(Label::Plus, plus, z_plus), (Label::Minus, minus, z_minus)])
}

fn finish(
    data: &LabeledDataset,
    mut removed: Vec<usize>,
    tuned_radius: Option<f64>,
    defense_name: &str,
) -> SanitizationResult {
    removed.sort_unstable();
    let mut is_removed = vec![false; data.n()];
    for &i in &removed {
        is_removed[i] = true;
    }
    let kept = (0..data.n()).filter(|&i| !is_removed[i]).collect();
    SanitizationResult {
        kept,
        removed,
        tuned_radius,
        defense_name: defense_name.to_string(),
    }
}

/// Per class, sorts by `score` descending (ties broken by the lower original
/// index first) and returns the top `z_c` indices.
fn take_top(scored: &[(usize, f64)], z_c: usize) -> Vec<usize> {
    let mut s = scored.to_vec();
    s.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    s.into_iter().take(z_c).map(|(i, _)| i).collect()
}

/// DBSCAN defense with per-class radius auto-tuning: binary search over the
/// sorted multiset of pairwise distances for the smallest radius whose
/// largest cluster reaches `n_class - z_class` points, then keep that
/// cluster. When the exact target is unattainable the largest cluster at the
/// smallest feasible radius is kept and the discrepancy is logged.
pub fn dbscan_defense(
    data: &LabeledDataset,
    z: usize,
    min_pts: usize,
) -> Result<SanitizationResult> {
    let mut removed = Vec::new();
    let mut tuned: Option<f64> = None;

    for (label, idx, z_c) in class_budgets(data, z)? {
        if idx.is_empty() {
            continue;
        }
        let n_c = idx.len();
        let target = n_c - z_c;
        let pts: Vec<_> = idx.iter().map(|&i| data.point(i).clone()).collect();

        // Candidate radii: distinct positive pairwise distances.
        let mut candidates = Vec::with_capacity(n_c * (n_c - 1) / 2);
        for a in 0..n_c {
            for b in (a + 1)..n_c {
                let d = pts[a].dist(&pts[b]);
                if d > 0.0 {
                    candidates.push(d);
                }
            }
        }
        candidates.sort_unstable_by(f64::total_cmp);
        candidates.dedup();

        if candidates.is_empty() {
            log::warn!(
                "dbscan defense: class {label} is degenerate (all points identical); keeping all {n_c}"
            );
            continue;
        }

        let largest_at = |r: f64| -> usize {
            cluster(&pts, &DbscanParams { r, min_pts }).largest_cluster_size()
        };

        if largest_at(*candidates.last().expect("nonempty")) < target {
            // Even the full-diameter radius cannot reach the target.
            let r = *candidates.last().expect("nonempty");
            let labeling = cluster(&pts, &DbscanParams { r, min_pts });
            let members = labeling.largest_cluster_members();
            if members.is_empty() {
                log::warn!(
                    "dbscan defense: class {label} yields no cluster at any radius; keeping all {n_c}"
                );
                continue;
            }
            log::warn!(
                "dbscan defense: class {label} target {target} unattainable; keeping largest cluster of {} at r={r}",
                members.len()
            );
            mark_removed(&idx, &members, &mut removed);
            tuned = Some(tuned.map_or(r, |t: f64| t.max(r)));
            continue;
        }

        // Exponential search from the small end before bisecting: the
        // feasible radius usually sits at a low quantile of the distance
        // multiset, and DBSCAN probes get expensive at large radii.
        let mut lo = 0usize;
        let mut hi = 0usize;
        let mut step = 1usize;
        while largest_at(candidates[hi]) < target {
            lo = hi + 1;
            hi = (hi + step).min(candidates.len() - 1);
            step *= 2;
        }
        while lo < hi {
            let mid = (lo + hi) / 2;
            if largest_at(candidates[mid]) >= target {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let r = candidates[lo];
        let labeling = cluster(&pts, &DbscanParams { r, min_pts });
        let members = labeling.largest_cluster_members();
        if members.len() != target {
            log::warn!(
                "dbscan defense: class {label} largest cluster has {} points at r={r}, target {target}",
                members.len()
            );
        }
        mark_removed(&idx, &members, &mut removed);
        tuned = Some(tuned.map_or(r, |t: f64| t.max(r)));
    }

    Ok(finish(data, removed, tuned, "dbscan"))
}

fn mark_removed(class_idx: &[usize], kept_local: &[usize], removed: &mut Vec<usize>) {
    let kept: std::collections::HashSet<usize> = kept_local.iter().copied().collect();
    for (local, &global) in class_idx.iter().enumerate() {
        if !kept.contains(&local) {
            removed.push(global);
        }
    }
}

fn centroid(data: &LabeledDataset, idx: &[usize]) -> Vec<f64> {
    let mut c = vec![0.0f64; data.dim()];
    for &i in idx {
        for (ck, xk) in c.iter_mut().zip(data.point(i).coords()) {
            *ck += xk;
        }
    }
    for ck in c.iter_mut() {
        *ck /= idx.len() as f64;
    }
    c
}

/// Removes, per class, the points farthest from their class centroid.
pub fn l2_defense(data: &LabeledDataset, z: usize) -> Result<SanitizationResult> {
    let mut removed = Vec::new();
    for (_, idx, z_c) in class_budgets(data, z)? {
        if idx.is_empty() || z_c == 0 {
            continue;
        }
        let mu = centroid(data, &idx);
        let scored: Vec<(usize, f64)> = idx
            .iter()
            .map(|&i| {
                (
                    i,
                    crate::dataset::squared_distance(data.point(i).coords(), &mu),
                )
            })
            .collect();
        removed.extend(take_top(&scored, z_c));
    }
    Ok(finish(data, removed, None, "l2"))
}

/// Removes, per class, the points with the largest absolute projection onto
/// the inter-centroid direction.
pub fn slab_defense(data: &LabeledDataset, z: usize) -> Result<SanitizationResult> {
    let budgets = class_budgets(data, z)?;
    let plus_idx = &budgets[0].1;
    let minus_idx = &budgets[1].1;

    let mut u = vec![0.0f64; data.dim()];
    if !plus_idx.is_empty() && !minus_idx.is_empty() {
        let mu_p = centroid(data, plus_idx);
        let mu_m = centroid(data, minus_idx);
        for k in 0..data.dim() {
            u[k] = mu_p[k] - mu_m[k];
        }
        let norm = dot(&u, &u).sqrt();
        if norm > 1e-12 {
            for v in u.iter_mut() {
                *v /= norm;
            }
        } else {
            // Coincident centroids: projections all zero, ties resolve by
            // index.
            u.fill(0.0);
        }
    }

    let mut removed = Vec::new();
    for (_, idx, z_c) in &budgets {
        if idx.is_empty() || *z_c == 0 {
            continue;
        }
        let mu = centroid(data, idx);
        let scored: Vec<(usize, f64)> = idx
            .iter()
            .map(|&i| {
                let x = data.point(i).coords();
                let proj: f64 = (0..data.dim()).map(|k| (x[k] - mu[k]) * u[k]).sum();
                (i, proj.abs())
            })
            .collect();
        removed.extend(take_top(&scored, *z_c));
    }
    Ok(finish(data, removed, None, "slab"))
}

/// Trains a C=1 soft-margin SVM on the full data and removes, per class, the
/// points of largest hinge loss.
pub fn loss_defense(
    data: &LabeledDataset,
    z: usize,
    kernel: &KernelSpec,
) -> Result<SanitizationResult> {
    let budgets = class_budgets(data, z)?;
    if z == 0 {
        return Ok(finish(data, Vec::new(), None, "loss"));
    }
    let model = svm::train(data, kernel, 1.0, svm::DEFAULT_TOL)?;
    let losses = svm::hinge_losses(&model, data)?;
    let mut removed = Vec::new();
    for (_, idx, z_c) in &budgets {
        if idx.is_empty() || *z_c == 0 {
            continue;
        }
        let scored: Vec<(usize, f64)> = idx.iter().map(|&i| (i, losses[i])).collect();
        removed.extend(take_top(&scored, *z_c));
    }
    Ok(finish(data, removed, None, "loss"))
}

/// Removes, per class, the points with the largest distance to their own
/// k-th nearest same-class neighbour.
pub fn knn_defense(data: &LabeledDataset, z: usize, k: usize) -> Result<SanitizationResult> {
    if k == 0 {
        return Err(Error::InvalidParam("knn defense requires k >= 1".into()));
    }
    let mut removed = Vec::new();
    for (_, idx, z_c) in class_budgets(data, z)? {
        if idx.is_empty() || z_c == 0 {
            continue;
        }
        let scored: Vec<(usize, f64)> = idx
            .iter()
            .map(|&i| {
                let mut dists: Vec<f64> = idx
                    .iter()
                    .filter(|&&j| j != i)
                    .map(|&j| data.point(i).dist(data.point(j)))
                    .collect();
                dists.sort_by(f64::total_cmp);
                let score = if dists.is_empty() {
                    f64::INFINITY
                } else {
                    dists[(k - 1).min(dists.len() - 1)]
                };
                (i, score)
            })
            .collect();
        removed.extend(take_top(&scored, z_c));
    }
    Ok(finish(data, removed, None, "knn"))
}

/// Defense selector used by the harness and the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Defense {
    Dbscan {
        #[serde(default = "default_min_pts")]
        min_pts: usize,
    },
    L2,
    Slab,
    Loss,
    Knn {
        #[serde(default = "default_knn_k")]
        k: usize,
    },
}

fn default_min_pts() -> usize {
    DEFAULT_MIN_PTS
}

fn default_knn_k() -> usize {
    DEFAULT_KNN_K
}

impl Defense {
    pub fn name(&self) -> &'static str {
        match self {
            Defense::Dbscan { .. } => "dbscan",
            Defense::L2 => "l2",
            Defense::Slab => "slab",
            Defense::Loss => "loss",
            Defense::Knn { .. } => "knn",
        }
    }
}

/// Runs one defense; `kernel` is only consulted by the Loss defense, which
/// mirrors the downstream trainer's kernel.
pub fn apply(
    data: &LabeledDataset,
    defense: &Defense,
    z: usize,
    kernel: &KernelSpec,
) -> Result<SanitizationResult> {
    match defense {
        Defense::Dbscan { min_pts } => dbscan_defense(data, z, *min_pts),
        Defense::L2 => l2_defense(data, z),
        Defense::Slab => slab_defense(data, z),
        Defense::Loss => loss_defense(data, z, kernel),
        Defense::Knn { k } => knn_defense(data, z, *k),
    }
}
