//! A laboratory for poisoning attacks on support vector machines and
//! data-sanitization defenses.
//!
//! The crate bundles:
//!
//! - [`dataset`]: point/label containers, LIBSVM/CSV i/o, synthetic manifold
//!   generation with a tunable intrinsic-dimension knob, and an empirical
//!   ball-occupancy density check;
//! - [`svm`]: an SMO trainer for linear/RBF soft- and hard-margin SVMs plus
//!   the one-class hull-distance margin;
//! - [`dbscan`]: density clustering with the strict `> MinPts` occupancy
//!   rule;
//! - [`sanitize`]: the DBSCAN defense with radius auto-tuning and the Slab,
//!   L2, Loss, and k-NN baselines, with F1 scoring;
//! - [`attack`]: adversarial label flipping and min-max style poison
//!   insertion;
//! - [`hardness`]: the 3-SAT to one-class-SVM-with-outliers reduction with
//!   brute-force oracles for both sides and the approximation-gap
//!   certificate;
//! - [`harness`]: the experiment pipeline, CSV/SVG reports, and the Lemma-1
//!   verification runner.

pub mod attack;
pub mod dataset;
pub mod dbscan;
pub mod error;
pub mod hardness;
pub mod harness;
pub mod sanitize;
pub mod svm;

pub use error::{Error, Result};
