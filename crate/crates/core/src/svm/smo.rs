//! SMO dual solver: maximal-KKT-violating-pair working set selection,
//! full Gram cache for n <= 4000 and an LRU row cache above that.

use std::collections::HashMap;

use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};

use super::KernelSpec;

const FULL_GRAM_LIMIT: usize = 4000;
const ROW_CACHE_BYTES: usize = 32_000_000;
pub(crate) const MAX_KERNEL_EVALS: u64 = 10_000_000;

pub(crate) struct SmoSolution {
    pub alpha: Vec<f64>,
    pub bias: f64,
    /// ||w||^2 in feature space, from the converged gradient.
    pub w_norm_sq: f64,
}

struct KernelCache<'a> {
    data: &'a LabeledDataset,
    kernel: &'a KernelSpec,
    full: Option<Vec<f64>>,
    rows: HashMap<usize, (u64, Vec<f64>)>,
    row_cap: usize,
    tick: u64,
    evals: u64,
}

impl<'a> KernelCache<'a> {
    fn new(data: &'a LabeledDataset, kernel: &'a KernelSpec) -> Self {
        let n = data.n();
        let full = if n <= FULL_GRAM_LIMIT {
            let mut k = vec![0.0f64; n * n];
            for i in 0..n {
                for j in i..n {
                    let v = kernel.eval(data.point(i).coords(), data.point(j).coords());
                    k[i * n + j] = v;
                    k[j * n + i] = v;
                }
            }
            Some(k)
        } else {
            None
        };
        let evals = if full.is_some() { (n * n) as u64 } else { 0 };
        KernelCache {
            data,
            kernel,
            full,
            rows: HashMap::new(),
            row_cap: (ROW_CACHE_BYTES / (8 * n)).max(16),
            tick: 0,
            evals,
        }
    }

    fn row_into(&mut self, i: usize, buf: &mut Vec<f64>) {
        let n = self.data.n();
        buf.clear();
        if let Some(full) = &self.full {
            buf.extend_from_slice(&full[i * n..(i + 1) * n]);
            return;
        }
        self.tick += 1;
        if let Some((stamp, row)) = self.rows.get_mut(&i) {
            *stamp = self.tick;
            buf.extend_from_slice(row);
            return;
        }
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            row.push(
                self.kernel
                    .eval(self.data.point(i).coords(), self.data.point(j).coords()),
            );
        }
        self.evals += n as u64;
        buf.extend_from_slice(&row);
        if self.rows.len() >= self.row_cap {
            if let Some((&oldest, _)) = self.rows.iter().min_by_key(|(_, (stamp, _))| *stamp) {
                self.rows.remove(&oldest);
            }
        }
        self.rows.insert(i, (self.tick, row));
    }
}

/// Solves the dual problem
/// `min 1/2 a^T Q a - e^T a, s.t. 0 <= a_i <= C, sum y_i a_i = 0`
/// to KKT tolerance `tol` (max violating pair gap).
pub(crate) fn solve(
    data: &LabeledDataset,
    kernel: &KernelSpec,
    c: f64,
    tol: f64,
) -> Result<SmoSolution> {
    let n = data.n();
    let y: Vec<f64> = data.labels().iter().map(|l| l.to_f64()).collect();
    let mut alpha = vec![0.0f64; n];
    // Gradient of the dual objective; -1 at alpha = 0.
    let mut grad = vec![-1.0f64; n];

    let mut cache = KernelCache::new(data, kernel);
    let mut row_i = Vec::with_capacity(n);
    let mut row_j = Vec::with_capacity(n);

    loop {
        // Maximal violating pair.
        let mut i_sel = usize::MAX;
        let mut m_val = f64::NEG_INFINITY;
        let mut j_sel = usize::MAX;
        let mut m_low = f64::INFINITY;
        for k in 0..n {
            let v = -y[k] * grad[k];
            let in_up = (y[k] > 0.0 && alpha[k] < c) || (y[k] < 0.0 && alpha[k] > 0.0);
            let in_low = (y[k] < 0.0 && alpha[k] < c) || (y[k] > 0.0 && alpha[k] > 0.0);
            if in_up && v > m_val {
                m_val = v;
                i_sel = k;
            }
            if in_low && v < m_low {
                m_low = v;
                j_sel = k;
            }
        }

        if i_sel == usize::MAX || j_sel == usize::MAX || m_val - m_low <= tol {
            let bias = compute_bias(&alpha, &grad, &y, c, m_val, m_low);
            let w_norm_sq = alpha
                .iter()
                .zip(&grad)
                .map(|(&a, &g)| a * (g + 1.0))
                .sum::<f64>();
            return Ok(SmoSolution {
                alpha,
                bias,
                w_norm_sq,
            });
        }

        cache.row_into(i_sel, &mut row_i);
        cache.row_into(j_sel, &mut row_j);

        let eta = (row_i[i_sel] + row_j[j_sel] - 2.0 * row_i[j_sel]).max(1e-12);
        let mut t = (m_val - m_low) / eta;
        // Box constraints along the feasible direction.
        t = t.min(if y[i_sel] > 0.0 {
            c - alpha[i_sel]
        } else {
            alpha[i_sel]
        });
        t = t.min(if y[j_sel] > 0.0 {
            alpha[j_sel]
        } else {
            c - alpha[j_sel]
        });

        alpha[i_sel] += y[i_sel] * t;
        alpha[j_sel] -= y[j_sel] * t;
        // Snap to the box to keep bound membership exact.
        alpha[i_sel] = alpha[i_sel].clamp(0.0, c);
        alpha[j_sel] = alpha[j_sel].clamp(0.0, c);

        for k in 0..n {
            grad[k] += y[k] * t * (row_i[k] - row_j[k]);
        }

        if cache.evals > MAX_KERNEL_EVALS {
            let bias = compute_bias(&alpha, &grad, &y, c, m_val, m_low);
            let gap = duality_gap_from_state(data, &alpha, &grad, &y, bias, c);
            return Err(Error::NonConvergence { gap });
        }
    }
}

fn compute_bias(alpha: &[f64], grad: &[f64], y: &[f64], c: f64, m_val: f64, m_low: f64) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    for k in 0..alpha.len() {
        if alpha[k] > 0.0 && alpha[k] < c {
            sum += -y[k] * grad[k];
            count += 1;
        }
    }
    if count > 0 {
        sum / count as f64
    } else if m_val.is_finite() && m_low.is_finite() {
        (m_val + m_low) / 2.0
    } else {
        0.0
    }
}

fn duality_gap_from_state(
    data: &LabeledDataset,
    alpha: &[f64],
    grad: &[f64],
    y: &[f64],
    bias: f64,
    c: f64,
) -> f64 {
    let w_sq: f64 = alpha.iter().zip(grad).map(|(&a, &g)| a * (g + 1.0)).sum();
    let dual: f64 = alpha.iter().sum::<f64>() - 0.5 * w_sq;
    let mut hinge = 0.0;
    for k in 0..data.n() {
        // u_k = y_k * (grad_k + 1).
        let f = y[k] * (grad[k] + 1.0) + bias;
        hinge += (1.0 - y[k] * f).max(0.0);
    }
    0.5 * w_sq + c * hinge - dual
}
