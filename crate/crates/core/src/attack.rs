//! Poisoning attacks: greedy adversarial label flipping and min-max style
//! poison-point insertion. Both are functional stand-ins for the external
//! reference attacks: they target the qualitative effect (accuracy
//! degradation growing with the poisoned fraction), not bit-compatibility.
//! The surrogate victim is a linear soft-margin SVM with C = 1.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{dot, Label, LabeledDataset, Point};
use crate::error::{Error, Result};
use crate::sanitize::split_budget;
use crate::svm::{self, KernelSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackKind {
    LabelFlip,
    MinMax,
}

/// Either a poisoned fraction of the input or an absolute point count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PoisonBudget {
    Fraction(f64),
    Count(usize),
}

impl PoisonBudget {
    /// Derived budget: at least 1, strictly below n.
    pub fn resolve(&self, n: usize) -> Result<usize> {
        let z = match self {
            PoisonBudget::Fraction(f) => {
                if !(f.is_finite() && *f > 0.0 && *f < 1.0) {
                    return Err(Error::InvalidParam(format!(
                        "poison fraction {f} must lie in (0, 1)"
                    )));
                }
                ((f * n as f64).round() as usize).max(1)
            }
            PoisonBudget::Count(z) => *z,
        };
        if z == 0 || z >= n {
            return Err(Error::InvalidParam(format!(
                "poison budget {z} must satisfy 1 <= z < n = {n}"
            )));
        }
        Ok(z)
    }
}

fn default_steps() -> usize {
    50
}

fn default_step_size() -> f64 {
    0.25
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackConfig {
    pub kind: AttackKind,
    pub budget: PoisonBudget,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default = "default_step_size")]
    pub step_size: f64,
    pub seed: u64,
}

impl AttackConfig {
    fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::InvalidParam("attack steps must be >= 1".into()));
        }
        if !(self.step_size.is_finite() && self.step_size > 0.0) {
            return Err(Error::InvalidParam(
                "step_size must be finite and > 0".into(),
            ));
        }
        Ok(())
    }
}

fn require_clean(data: &LabeledDataset) -> Result<()> {
    if let Some(mask) = data.poison_mask() {
        if mask.iter().any(|&m| m) {
            return Err(Error::InvalidParam(
                "attack input must be clean (poison mask already set)".into(),
            ));
        }
    }
    Ok(())
}

/// Greedy ALFA-style label flipping: retrain, flip the unflipped point whose
/// flip most increases the current model's total hinge loss, repeat z times.
/// Flipped points keep their coordinates; the mask marks them.
pub fn label_flip_attack(data: &LabeledDataset, config: &AttackConfig) -> Result<LabeledDataset> {
    config.validate()?;
    require_clean(data)?;
    let n = data.n();
    let z = config.budget.resolve(n)?;

    let mut labels: Vec<Label> = data.labels().to_vec();
    let mut flipped = vec![false; n];

    for _ in 0..z {
        let current = data.with_labels_and_mask(labels.clone(), vec![false; n], data.name())?;
        let model = svm::train(&current, &KernelSpec::Linear, 1.0, svm::DEFAULT_TOL)?;

        // Flipping i changes its own hinge term from (1 - y f)+ to (1 + y f)+.
        let mut best: Option<(usize, f64)> = None;
        for i in 0..n {
            if flipped[i] {
                continue;
            }
            let f = svm::decision_value(&model, &current, current.point(i))?;
            let y = labels[i].to_f64();
            let delta = (1.0 + y * f).max(0.0) - (1.0 - y * f).max(0.0);
            if best.is_none_or(|(_, d)| delta > d) {
                best = Some((i, delta));
            }
        }
        let (pick, _) = best.expect("z < n leaves an unflipped candidate");
        labels[pick] = labels[pick].flip();
        flipped[pick] = true;
    }

    data.with_labels_and_mask(labels, flipped, format!("{}:alfa", data.name()))
}

/// Change in total hinge loss caused by flipping each point of `data` under
/// `model`. Exposed so tests can check the greedy argmax exhaustively.
pub fn flip_gains(model: &svm::SvmModel, data: &LabeledDataset) -> Result<Vec<f64>> {
    (0..data.n())
        .map(|i| {
            let f = svm::decision_value(model, data, data.point(i))?;
            let y = data.label(i).to_f64();
            Ok((1.0 + y * f).max(0.0) - (1.0 - y * f).max(0.0))
        })
        .collect()
}

/// Min-max style insertion: each poison point starts at a random
/// opposite-class point with flipped label, then ascends its own hinge loss
/// under the current model by `steps` gradient steps, clipped to the clean
/// bounding box inflated by 20%. The victim is retrained after every point.
/// Poison labels are allocated across classes proportionally to the clean
/// class sizes so a defense's per-class budget can meet them one-for-one.
pub fn min_max_attack(data: &LabeledDataset, config: &AttackConfig) -> Result<LabeledDataset> {
    config.validate()?;
    require_clean(data)?;
    let n = data.n();
    let z = config.budget.resolve(n)?;
    if !data.has_both_labels() {
        return Err(Error::InvalidParam(
            "min-max attack requires both classes present".into(),
        ));
    }

    let dim = data.dim();
    let (lo, hi) = inflated_bounding_box(data, 0.2);

    let plus_idx = data.class_indices(Label::Plus);
    let minus_idx = data.class_indices(Label::Minus);
    let (z_plus, z_minus) = split_budget(z, plus_idx.len(), minus_idx.len());

    // Alternate poison labels until one side's budget runs out.
    let mut label_seq = Vec::with_capacity(z);
    let (mut left_p, mut left_m) = (z_plus, z_minus);
    while left_p + left_m > 0 {
        if left_p >= left_m && left_p > 0 {
            label_seq.push(Label::Plus);
            left_p -= 1;
        } else {
            label_seq.push(Label::Minus);
            left_m -= 1;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut points: Vec<Point> = data.points().to_vec();
    let mut labels: Vec<Label> = data.labels().to_vec();
    let mut mask = vec![false; n];

    for poison_label in label_seq {
        let current = LabeledDataset::new(points.clone(), labels.clone(), None, data.name())?;
        let model = svm::train(&current, &KernelSpec::Linear, 1.0, svm::DEFAULT_TOL)?;
        let w = model
            .linear_weights(&current)
            .expect("surrogate kernel is linear");

        let seed_pool = if poison_label == Label::Plus {
            &minus_idx
        } else {
            &plus_idx
        };
        let seed_idx = seed_pool[rng.random_range(0..seed_pool.len())];
        let mut x: Vec<f64> = data.point(seed_idx).coords().to_vec();
        let y = poison_label.to_f64();

        for _ in 0..config.steps {
            let f = dot(&w, &x) + model.bias;
            if 1.0 - y * f <= 0.0 {
                break;
            }
            // Hinge gradient w.r.t. the point is -y w in the active region;
            // ascend it.
            for k in 0..dim {
                x[k] = (x[k] - config.step_size * y * w[k]).clamp(lo[k], hi[k]);
            }
        }

        points.push(Point::new(x)?);
        labels.push(poison_label);
        mask.push(true);
    }

    LabeledDataset::new(
        points,
        labels,
        Some(mask),
        format!("{}:minmax", data.name()),
    )
}

fn inflated_bounding_box(data: &LabeledDataset, inflation: f64) -> (Vec<f64>, Vec<f64>) {
    let dim = data.dim();
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for p in data.points() {
        for k in 0..dim {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    for k in 0..dim {
        let pad = (hi[k] - lo[k]) * inflation;
        lo[k] -= pad;
        hi[k] += pad;
    }
    (lo, hi)
}

/// Dispatch on the configured attack kind.
pub fn run_attack(data: &LabeledDataset, config: &AttackConfig) -> Result<LabeledDataset> {
    match config.kind {
        AttackKind::LabelFlip => label_flip_attack(data, config),
        AttackKind::MinMax => min_max_attack(data, config),
    }
}
