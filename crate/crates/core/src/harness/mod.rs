//! Experiment orchestration: configuration, the
//! generate/attack/sanitize/train/evaluate pipeline, report emission, and
//! the Lemma-1 verification runner.

mod config;
mod lemma1;
mod report;
mod run;

pub use config::{DatasetSource, ExperimentConfig, KernelConfig};
pub use lemma1::{verify_lemma1, Lemma1Report, Lemma1Row, SuiteSpec, SUITE_ALPHA};
pub use report::{
    emit_csv, emit_svg, parse_csv, AggregateRow, ExperimentReport, ReportRow, RunError,
};
pub use run::run;
