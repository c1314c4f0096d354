//! The experiment pipeline: per trial, split, poison the training split
//! only, sanitize, train, and evaluate on the untouched test split.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::attack::{run_attack, PoisonBudget};
use crate::dataset::LabeledDataset;
use crate::error::Result;
use crate::sanitize::{self, SanitizationResult};
use crate::svm;

use super::config::ExperimentConfig;
use super::report::{ExperimentReport, ReportRow, RunError};

/// Soft-margin C used by every victim model in the pipeline.
const VICTIM_C: f64 = 1.0;

pub fn run(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let (data, _) = config.load_dataset()?;
    let kernel = config.kernel.resolve(&data)?;

    // One deterministic seed stream feeds the splits and the attacks.
    let mut master = ChaCha8Rng::seed_from_u64(config.seed);
    let split_seeds: Vec<u64> = (0..config.trials).map(|_| master.random()).collect();
    let attack_seeds: Vec<Vec<u64>> = (0..config.trials)
        .map(|_| {
            (0..config.fractions.len())
                .map(|_| master.random())
                .collect()
        })
        .collect();

    let mut report = ExperimentReport::default();
    let defense_names: Vec<String> = std::iter::once("none".to_string())
        .chain(config.defenses.iter().map(|d| d.name().to_string()))
        .collect();

    for trial in 0..config.trials {
        let mut indices: Vec<usize> = (0..data.n()).collect();
        let mut split_rng = ChaCha8Rng::seed_from_u64(split_seeds[trial]);
        indices.shuffle(&mut split_rng);
        let n_train =
            ((data.n() as f64 * config.train_split).round() as usize).clamp(1, data.n() - 1);
        let (train_idx, test_idx) = indices.split_at(n_train);

        let train_data = data.subset(train_idx, format!("{}:train", data.name()))?;
        let test_data = data.subset(test_idx, format!("{}:test", data.name()))?;

        if !train_data.has_both_labels() {
            for fraction in &config.fractions {
                for name in &defense_names {
                    report.errors.push(RunError {
                        defense: name.clone(),
                        fraction: *fraction,
                        trial,
                        message: "training split lacks one class".into(),
                    });
                }
            }
            continue;
        }

        let test_fingerprint = fingerprint(&test_data);

        for (fi, &fraction) in config.fractions.iter().enumerate() {
            let mut attack_cfg = config.attack.clone();
            attack_cfg.budget = PoisonBudget::Fraction(fraction);
            attack_cfg.seed = attack_seeds[trial][fi];

            let poisoned = match run_attack(&train_data, &attack_cfg) {
                Ok(p) => p,
                Err(e) => {
                    for name in &defense_names {
                        report.errors.push(RunError {
                            defense: name.clone(),
                            fraction,
                            trial,
                            message: format!("attack failed: {e}"),
                        });
                    }
                    continue;
                }
            };
            let mask = poisoned
                .poison_mask()
                .expect("attacks set the poison mask")
                .to_vec();
            let z = mask.iter().filter(|&&m| m).count();

            for (di, name) in defense_names.iter().enumerate() {
                let started = Instant::now();
                let sanitized: Result<SanitizationResult> = if di == 0 {
                    Ok(SanitizationResult {
                        kept: (0..poisoned.n()).collect(),
                        removed: Vec::new(),
                        tuned_radius: None,
                        defense_name: "none".into(),
                    })
                } else {
                    sanitize::apply(&poisoned, &config.defenses[di - 1], z, &kernel)
                };

                let outcome = sanitized.and_then(|result| {
                    let score = sanitize::f1(&result, &mask);
                    let kept = result.kept_dataset(&poisoned)?;
                    let model = svm::train(&kept, &kernel, VICTIM_C, svm::DEFAULT_TOL)?;
                    let accuracy = svm::accuracy(&model, &kept, &test_data)?;
                    Ok((accuracy, score.f1))
                });

                match outcome {
                    Ok((accuracy, f1)) => report.rows.push(ReportRow {
                        defense: name.clone(),
                        fraction,
                        trial,
                        accuracy,
                        f1,
                        wall_ms: started.elapsed().as_millis() as u64,
                    }),
                    Err(e) => report.errors.push(RunError {
                        defense: name.clone(),
                        fraction,
                        trial,
                        message: e.to_string(),
                    }),
                }
            }
        }

        // The test split must never be touched by attacks or defenses.
        assert_eq!(
            fingerprint(&test_data),
            test_fingerprint,
            "test partition mutated during trial {trial}"
        );
    }

    report.sort_rows();
    Ok(report)
}

/// FNV-1a over labels and coordinate bits.
fn fingerprint(data: &LabeledDataset) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    let mut eat = |v: u64| {
        h ^= v;
        h = h.wrapping_mul(0x100000001b3);
    };
    for i in 0..data.n() {
        eat(data.label(i).to_f64().to_bits());
        for &c in data.point(i).coords() {
            eat(c.to_bits());
        }
    }
    h
}
