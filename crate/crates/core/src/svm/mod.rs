//! Soft/hard-margin SVM training (SMO), prediction, margin widths, and the
//! one-class hull-distance margin.

mod min_norm;
mod smo;

pub use min_norm::{min_norm_distance, one_class_margin};

use serde::{Deserialize, Serialize};

use crate::dataset::{dot, squared_distance, Label, LabeledDataset, Point};
use crate::error::{Error, Result};

/// Hard margin is realized as a documented large-C sentinel rather than a
/// separate QP path.
pub const HARD_MARGIN_C: f64 = 1e8;

/// Default KKT tolerance for [`train`].
pub const DEFAULT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum KernelSpec {
    Linear,
    Rbf { gamma: f64 },
}

impl KernelSpec {
    pub fn linear() -> Self {
        KernelSpec::Linear
    }

    pub fn rbf(gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidParam(
                "rbf gamma must be finite and > 0".into(),
            ));
        }
        Ok(KernelSpec::Rbf { gamma })
    }

    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            KernelSpec::Linear => dot(a, b),
            KernelSpec::Rbf { gamma } => (-gamma * squared_distance(a, b)).exp(),
        }
    }
}

/// Median heuristic for an unset RBF gamma:
/// `gamma = 1 / (d * median pairwise squared distance)`.
pub fn median_heuristic_gamma(data: &LabeledDataset) -> f64 {
    let n = data.n();
    let stride = (n / 1500).max(1);
    let idx: Vec<usize> = (0..n).step_by(stride).collect();
    let mut sq = Vec::with_capacity(idx.len() * (idx.len().saturating_sub(1)) / 2);
    for (a, &i) in idx.iter().enumerate() {
        for &j in &idx[a + 1..] {
            sq.push(data.point(i).dist_sq(data.point(j)));
        }
    }
    if sq.is_empty() {
        return 1.0;
    }
    sq.sort_by(f64::total_cmp);
    let median = sq[sq.len() / 2];
    if median <= 0.0 {
        return 1.0;
    }
    1.0 / (data.dim() as f64 * median)
}

/// A trained classifier. `support_indices` refer into the training dataset,
/// which prediction takes explicitly; `dual_coefs[k]` is `alpha_k * y_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub support_indices: Vec<usize>,
    pub dual_coefs: Vec<f64>,
    pub bias: f64,
    pub kernel: KernelSpec,
    pub c_param: f64,
    pub margin_width: f64,
}

impl SvmModel {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }

    /// Explicit weight vector for linear models.
    pub fn linear_weights(&self, train: &LabeledDataset) -> Option<Vec<f64>> {
        match self.kernel {
            KernelSpec::Linear => {
                let mut w = vec![0.0f64; train.dim()];
                for (&i, &coef) in self.support_indices.iter().zip(&self.dual_coefs) {
                    for (wk, xk) in w.iter_mut().zip(train.point(i).coords()) {
                        *wk += coef * xk;
                    }
                }
                Some(w)
            }
            KernelSpec::Rbf { .. } => None,
        }
    }
}

/// Trains a two-class SVM by SMO to KKT tolerance `tol`. Pass
/// [`HARD_MARGIN_C`] as `c` for the hard-margin problem.
///
/// ```
/// use poisonlab::dataset::{Label, LabeledDataset, Point};
/// use poisonlab::svm::{predict, train, KernelSpec, DEFAULT_TOL, HARD_MARGIN_C};
///
/// let data = LabeledDataset::new(
///     vec![
///         Point::new(vec![1.0, 0.0]).unwrap(),
///         Point::new(vec![-1.0, 0.0]).unwrap(),
///     ],
///     vec![Label::Plus, Label::Minus],
///     None,
///     "pair",
/// )
/// .unwrap();
/// let model = train(&data, &KernelSpec::Linear, HARD_MARGIN_C, DEFAULT_TOL).unwrap();
/// assert!((model.margin_width - 2.0).abs() < 1e-6);
/// let probe = Point::new(vec![5.0, 0.0]).unwrap();
/// assert_eq!(predict(&model, &data, &probe).unwrap(), Label::Plus);
/// ```
pub fn train(data: &LabeledDataset, kernel: &KernelSpec, c: f64, tol: f64) -> Result<SvmModel> {
    if !data.has_both_labels() {
        return Err(Error::InvalidParam(
            "training data must contain both labels".into(),
        ));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::InvalidParam("C must be finite and > 0".into()));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidParam("tol must be finite and > 0".into()));
    }
    if let KernelSpec::Rbf { gamma } = kernel {
        if !(gamma.is_finite() && *gamma > 0.0) {
            return Err(Error::InvalidParam(
                "rbf gamma must be finite and > 0".into(),
            ));
        }
    }

    let sol = smo::solve(data, kernel, c, tol)?;
    let mut support_indices = Vec::new();
    let mut dual_coefs = Vec::new();
    for (i, &a) in sol.alpha.iter().enumerate() {
        if a > 0.0 {
            support_indices.push(i);
            dual_coefs.push(a * data.label(i).to_f64());
        }
    }
    let margin_width = if sol.w_norm_sq > 0.0 {
        2.0 / sol.w_norm_sq.sqrt()
    } else {
        f64::INFINITY
    };
    Ok(SvmModel {
        support_indices,
        dual_coefs,
        bias: sol.bias,
        kernel: kernel.clone(),
        c_param: c,
        margin_width,
    })
}

/// Raw decision value `sum coef_k K(p_k, x) + b`.
pub fn decision_value(model: &SvmModel, train: &LabeledDataset, x: &Point) -> Result<f64> {
    if x.dim() != train.dim() {
        return Err(Error::DimensionMismatch {
            expected: train.dim(),
            got: x.dim(),
        });
    }
    let mut f = model.bias;
    for (&i, &coef) in model.support_indices.iter().zip(&model.dual_coefs) {
        f += coef * model.kernel.eval(train.point(i).coords(), x.coords());
    }
    Ok(f)
}

/// Predicted label; a decision value of exactly 0 maps to `Plus`.
pub fn predict(model: &SvmModel, train: &LabeledDataset, x: &Point) -> Result<Label> {
    Ok(Label::from_sign(decision_value(model, train, x)?))
}

/// Fraction of `test` points classified correctly.
pub fn accuracy(model: &SvmModel, train: &LabeledDataset, test: &LabeledDataset) -> Result<f64> {
    if test.n() == 0 {
        return Err(Error::EmptyData("empty test set".into()));
    }
    let mut correct = 0usize;
    for i in 0..test.n() {
        if predict(model, train, test.point(i))? == test.label(i) {
            correct += 1;
        }
    }
    Ok(correct as f64 / test.n() as f64)
}

/// Per-point hinge loss `max(0, 1 - y f(x))` of every training point.
pub fn hinge_losses(model: &SvmModel, train: &LabeledDataset) -> Result<Vec<f64>> {
    (0..train.n())
        .map(|i| {
            let f = decision_value(model, train, train.point(i))?;
            Ok((1.0 - train.label(i).to_f64() * f).max(0.0))
        })
        .collect()
}

/// Maximum KKT violation over the training set:
/// `alpha = 0` wants `y f >= 1`, a free alpha wants `y f = 1`, and
/// `alpha = C` wants `y f <= 1`.
pub fn kkt_residual(model: &SvmModel, train: &LabeledDataset) -> Result<f64> {
    let mut alpha = vec![0.0f64; train.n()];
    for (&i, &coef) in model.support_indices.iter().zip(&model.dual_coefs) {
        alpha[i] = coef.abs();
    }
    let mut worst = 0.0f64;
    for (i, &a) in alpha.iter().enumerate() {
        let yf = train.label(i).to_f64() * decision_value(model, train, train.point(i))?;
        let viol = if a <= 0.0 {
            (1.0 - yf).max(0.0)
        } else if a >= model.c_param {
            (yf - 1.0).max(0.0)
        } else {
            (yf - 1.0).abs()
        };
        worst = worst.max(viol);
    }
    Ok(worst)
}

/// `sum alpha_i y_i` of the trained model (zero at an exact optimum).
pub fn equality_residual(model: &SvmModel) -> f64 {
    model.dual_coefs.iter().sum()
}

/// Primal minus dual objective, recomputed from the stored model.
pub fn duality_gap(model: &SvmModel, train: &LabeledDataset) -> Result<f64> {
    let m = model.support_indices.len();
    let mut w_sq = 0.0;
    for a in 0..m {
        for b in 0..m {
            w_sq += model.dual_coefs[a]
                * model.dual_coefs[b]
                * model.kernel.eval(
                    train.point(model.support_indices[a]).coords(),
                    train.point(model.support_indices[b]).coords(),
                );
        }
    }
    let alpha_sum: f64 = model.dual_coefs.iter().map(|c| c.abs()).sum();
    let hinge: f64 = hinge_losses(model, train)?.iter().sum();
    Ok(0.5 * w_sq + model.c_param * hinge - (alpha_sum - 0.5 * w_sq))
}
