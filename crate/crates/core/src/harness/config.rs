//! Experiment configuration (JSON-loadable).

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::attack::AttackConfig;
use crate::dataset::{self, LabeledDataset, ManifoldSpec};
use crate::error::{Error, Result};
use crate::sanitize::Defense;
use crate::svm::{median_heuristic_gamma, KernelSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetSource {
    Synthetic {
        pos: ManifoldSpec,
        neg: ManifoldSpec,
        n_per_class: usize,
    },
    /// CSV (`label,x1,...`) or LIBSVM file, chosen by extension.
    Path(PathBuf),
}

/// Kernel choice; an RBF without gamma resolves through the median
/// heuristic on the full dataset at run start.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum KernelConfig {
    Linear,
    Rbf { gamma: Option<f64> },
}

impl KernelConfig {
    pub fn resolve(&self, data: &LabeledDataset) -> Result<KernelSpec> {
        match self {
            KernelConfig::Linear => Ok(KernelSpec::Linear),
            KernelConfig::Rbf { gamma: Some(g) } => KernelSpec::rbf(*g),
            KernelConfig::Rbf { gamma: None } => KernelSpec::rbf(median_heuristic_gamma(data)),
        }
    }
}

fn default_trials() -> usize {
    20
}

fn default_train_split() -> f64 {
    0.3
}

/// Full experiment recipe. Victims are soft-margin SVMs trained at C = 1
/// with the configured kernel; the attack budget is swept over `fractions`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dataset: DatasetSource,
    pub attack: AttackConfig,
    pub defenses: Vec<Defense>,
    pub kernel: KernelConfig,
    pub fractions: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_train_split")]
    pub train_split: f64,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.fractions.is_empty() {
            return Err(Error::InvalidParam("fractions must be nonempty".into()));
        }
        if self
            .fractions
            .iter()
            .any(|f| !(f.is_finite() && *f > 0.0 && *f < 1.0))
        {
            return Err(Error::InvalidParam(
                "every fraction must lie in (0, 1)".into(),
            ));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParam("trials must be >= 1".into()));
        }
        if !(self.train_split > 0.0 && self.train_split < 1.0) {
            return Err(Error::InvalidParam("train_split must lie in (0, 1)".into()));
        }
        Ok(())
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let config: ExperimentConfig = serde_json::from_str(json)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn load_dataset(&self) -> Result<(LabeledDataset, u64)> {
        match &self.dataset {
            DatasetSource::Synthetic {
                pos,
                neg,
                n_per_class,
            } => {
                let data = dataset::generate_synthetic(pos, neg, *n_per_class, self.seed)?;
                Ok((data, self.seed))
            }
            DatasetSource::Path(path) => {
                let is_csv = path
                    .extension()
                    .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
                let data = if is_csv {
                    dataset::load_csv(path)?
                } else {
                    dataset::load_libsvm(path)?
                };
                Ok((data, self.seed))
            }
        }
    }
}
