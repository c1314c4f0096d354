//! The 3-SAT to one-class-SVM-with-outliers reduction, brute-force oracles
//! for both sides at small scale, and the approximation-gap certificate.

mod brute;
mod gap;
mod reduction;
mod sat;
mod suite;

pub use brute::oneclass_with_outliers_brute_force;
pub use gap::{gap_certificate, GapCertificate};
pub use reduction::{reduce, ReductionInstance};
pub use sat::{load_dimacs, parse_dimacs, sat_brute_force, Clause, SatInstance, Satisfiability};
pub use suite::{curated_suite, random_3sat, CuratedInstance};
