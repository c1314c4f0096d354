//! DBSCAN with a strict occupancy rule: a point is core when its closed
//! ball of radius `r` holds *strictly more than* `min_pts` points, counting
//! the point itself. Many library implementations use `>=`; the one-off
//! difference shifts every downstream result, so watch out when comparing.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::dataset::Point;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DbscanParams {
    pub r: f64,
    pub min_pts: usize,
}

impl DbscanParams {
    pub fn new(r: f64, min_pts: usize) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidParam(
                "dbscan radius must be finite and > 0".into(),
            ));
        }
        Ok(DbscanParams { r, min_pts })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointRole {
    Core,
    Border,
    Outlier,
}

/// Per-point roles and cluster assignment. Outliers carry no cluster id;
/// `cluster_sizes` is sorted descending and sums to #core + #border.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DbscanLabeling {
    pub roles: Vec<PointRole>,
    pub cluster_id: Vec<Option<usize>>,
    pub cluster_sizes: Vec<usize>,
}

impl DbscanLabeling {
    pub fn largest_cluster_size(&self) -> usize {
        self.cluster_sizes.first().copied().unwrap_or(0)
    }

    /// Members of the largest cluster; among equal-size largest clusters the
    /// one with the lowest id wins.
    pub fn largest_cluster_members(&self) -> Vec<usize> {
        let target = self.largest_cluster_size();
        if target == 0 {
            return Vec::new();
        }
        let mut counts: HashMap<usize, usize> = HashMap::new();
        for id in self.cluster_id.iter().flatten() {
            *counts.entry(*id).or_insert(0) += 1;
        }
        // Cluster ids are contiguous from 0, so the scan finds the lowest id.
        let best_id = (0..counts.len())
            .find(|id| counts.get(id) == Some(&target))
            .expect("some cluster has the target size");
        (0..self.cluster_id.len())
            .filter(|&i| self.cluster_id[i] == Some(best_id))
            .collect()
    }
}

/// Exact neighbour index: grid hashing for dimension <= 8, brute force above.
enum NeighborIndex<'a> {
    Grid {
        points: &'a [Point],
        r: f64,
        cells: HashMap<Vec<i64>, Vec<usize>>,
        dim: usize,
    },
    Brute {
        points: &'a [Point],
        r: f64,
    },
}

impl<'a> NeighborIndex<'a> {
    fn build(points: &'a [Point], r: f64) -> Self {
        let dim = if points.is_empty() {
            0
        } else {
            points[0].dim()
        };
        if dim == 0 || dim > 8 {
            return NeighborIndex::Brute { points, r };
        }
        let mut cells: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            cells.entry(cell_of(p.coords(), r)).or_default().push(i);
        }
        NeighborIndex::Grid {
            points,
            r,
            cells,
            dim,
        }
    }

    /// Indices within the closed ball of radius r around `points[i]`,
    /// including `i` itself.
    fn neighbors(&self, i: usize) -> Vec<usize> {
        match self {
            NeighborIndex::Brute { points, r } => {
                let rr = r * r;
                (0..points.len())
                    .filter(|&j| points[i].dist_sq(&points[j]) <= rr)
                    .collect()
            }
            NeighborIndex::Grid {
                points,
                r,
                cells,
                dim,
            } => {
                let rr = r * r;
                let center = cell_of(points[i].coords(), *r);
                let mut out = Vec::new();
                let mut offset = vec![-1i64; *dim];
                loop {
                    let key: Vec<i64> = center.iter().zip(&offset).map(|(c, o)| c + o).collect();
                    if let Some(bucket) = cells.get(&key) {
                        for &j in bucket {
                            if points[i].dist_sq(&points[j]) <= rr {
                                out.push(j);
                            }
                        }
                    }
                    // Odometer over {-1, 0, 1}^dim.
                    let mut k = 0;
                    loop {
                        if k == *dim {
                            return out;
                        }
                        offset[k] += 1;
                        if offset[k] <= 1 {
                            break;
                        }
                        offset[k] = -1;
                        k += 1;
                    }
                }
            }
        }
    }
}

fn cell_of(coords: &[f64], r: f64) -> Vec<i64> {
    coords.iter().map(|c| (c / r).floor() as i64).collect()
}

/// Runs DBSCAN. Clusters are connected components of the core-point graph
/// (edges at distance <= r); border points attach to the cluster of their
/// nearest core neighbour, ties broken by the lower cluster id. Cluster ids
/// are assigned by ascending smallest core index, so permuting the input
/// renumbers clusters but never changes roles or the size multiset.
///
/// ```
/// use poisonlab::dataset::Point;
/// use poisonlab::dbscan::{cluster, DbscanParams, PointRole};
///
/// let points: Vec<Point> = [0.0, 0.5, 1.0, 10.0]
///     .iter()
///     .map(|&x| Point::new(vec![x]).unwrap())
///     .collect();
/// let out = cluster(&points, &DbscanParams::new(0.6, 1).unwrap());
/// assert_eq!(out.roles[3], PointRole::Outlier);
/// assert_eq!(out.cluster_sizes, vec![3]);
/// ```
pub fn cluster(points: &[Point], params: &DbscanParams) -> DbscanLabeling {
    let n = points.len();
    if n == 0 {
        return DbscanLabeling {
            roles: Vec::new(),
            cluster_id: Vec::new(),
            cluster_sizes: Vec::new(),
        };
    }

    let index = NeighborIndex::build(points, params.r);
    let core: Vec<bool> = (0..n)
        .map(|i| index.neighbors(i).len() > params.min_pts)
        .collect();

    let mut cluster_id: Vec<Option<usize>> = vec![None; n];
    let mut next_id = 0usize;
    for start in 0..n {
        if !core[start] || cluster_id[start].is_some() {
            continue;
        }
        let id = next_id;
        next_id += 1;
        let mut stack = vec![start];
        cluster_id[start] = Some(id);
        while let Some(p) = stack.pop() {
            for j in index.neighbors(p) {
                if core[j] && cluster_id[j].is_none() {
                    cluster_id[j] = Some(id);
                    stack.push(j);
                }
            }
        }
    }

    let mut roles = vec![PointRole::Outlier; n];
    for i in 0..n {
        if core[i] {
            roles[i] = PointRole::Core;
            continue;
        }
        // Nearest core within r, ties by lower cluster id.
        let mut best: Option<(f64, usize)> = None;
        for j in index.neighbors(i) {
            if !core[j] {
                continue;
            }
            let d = points[i].dist(&points[j]);
            let cid = cluster_id[j].expect("core points are clustered");
            let cand = (d, cid);
            best = match best {
                None => Some(cand),
                Some(cur) => {
                    if cand.0 < cur.0 || (cand.0 == cur.0 && cand.1 < cur.1) {
                        Some(cand)
                    } else {
                        Some(cur)
                    }
                }
            };
        }
        if let Some((_, cid)) = best {
            roles[i] = PointRole::Border;
            cluster_id[i] = Some(cid);
        }
    }

    let mut sizes = vec![0usize; next_id];
    for id in cluster_id.iter().flatten() {
        sizes[*id] += 1;
    }
    let mut cluster_sizes = sizes;
    cluster_sizes.sort_unstable_by(|a, b| b.cmp(a));

    DbscanLabeling {
        roles,
        cluster_id,
        cluster_sizes,
    }
}
