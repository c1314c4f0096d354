//! Curated and random 3-SAT instances for the equivalence suite.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::sat::{Clause, SatInstance};

pub struct CuratedInstance {
    pub name: &'static str,
    pub instance: SatInstance,
    pub satisfiable: bool,
}

/// Twenty hand-built formulas (ten satisfiable, ten not) with l <= 4 and
/// m <= 6, filtered to the requested bounds. Expected statuses are
/// re-verified against the brute-force oracle wherever the suite is run.
pub fn curated_suite(max_l: usize, max_m: usize) -> Vec<CuratedInstance> {
    let mk = |name, l: usize, clauses: Vec<Clause>, satisfiable| CuratedInstance {
        name,
        instance: SatInstance::new(l, clauses).expect("curated instances are well-formed"),
        satisfiable,
    };
    let all = vec![
        // Satisfiable.
        mk("unit-pos", 1, vec![[1, 1, 1]], true),
        mk("unit-neg", 1, vec![[-1, -1, -1]], true),
        mk("two-var-mixed", 2, vec![[1, 2, 2], [-1, -2, -2]], true),
        mk("two-units", 2, vec![[1, 1, 1], [-2, -2, -2]], true),
        mk("three-var-pair", 3, vec![[1, 2, 3], [-1, -2, -3]], true),
        mk(
            "three-var-triple",
            3,
            vec![[1, -2, 3], [-1, 2, -3], [1, 2, 3]],
            true,
        ),
        mk(
            "three-var-chain",
            3,
            vec![[1, 1, 2], [-1, 3, 3], [-2, -3, -3], [1, -2, 3]],
            true,
        ),
        mk(
            "four-var-mixed",
            4,
            vec![[1, 2, 3], [-1, -2, 4], [-3, -4, 1], [2, -3, -4]],
            true,
        ),
        mk("tautological", 4, vec![[1, -1, 2]], true),
        mk(
            "four-var-pairs",
            4,
            vec![[1, 2, 2], [3, 4, 4], [-1, -3, -3], [-2, -4, -4]],
            true,
        ),
        // Unsatisfiable. Every assignment must falsify a clause with at
        // least two distinct variables (a four-pattern core on one variable
        // pair): clause points built from a single variable cannot push the
        // reduction's optimum below 1/sqrt(l+1) for any alpha > 1/2, so
        // single-variable contradictions have no place in this suite.
        mk(
            "patterns-12",
            2,
            vec![[1, 2, 2], [1, -2, -2], [-1, 2, 2], [-1, -2, -2]],
            false,
        ),
        mk(
            "patterns-12-extra",
            2,
            vec![[1, 2, 2], [1, -2, -2], [-1, 2, 2], [-1, -2, -2], [2, 1, 1]],
            false,
        ),
        mk(
            "patterns-13-free-2",
            3,
            vec![[1, 3, 3], [1, -3, -3], [-1, 3, 3], [-1, -3, -3]],
            false,
        ),
        mk(
            "patterns-23-plus-triples",
            3,
            vec![
                [2, 3, 3],
                [2, -3, -3],
                [-2, 3, 3],
                [-2, -3, -3],
                [1, 2, 3],
                [-1, -2, -3],
            ],
            false,
        ),
        mk(
            "patterns-14",
            4,
            vec![[1, 4, 4], [1, -4, -4], [-1, 4, 4], [-1, -4, -4]],
            false,
        ),
        mk(
            "patterns-23-wide",
            4,
            vec![
                [2, 3, 3],
                [2, -3, -3],
                [-2, 3, 3],
                [-2, -3, -3],
                [1, 2, 4],
                [-1, 3, -4],
            ],
            false,
        ),
        mk(
            "patterns-12-free-3",
            3,
            vec![[1, 2, 2], [1, -2, -2], [-1, 2, 2], [-1, -2, -2], [3, 3, 3]],
            false,
        ),
        mk(
            "patterns-12-pair-34",
            4,
            vec![[1, 2, 2], [1, -2, -2], [-1, 2, 2], [-1, -2, -2], [3, 4, 4]],
            false,
        ),
        mk(
            "patterns-23-mixed",
            3,
            vec![[2, 3, 3], [-2, 3, 3], [2, -3, -3], [-2, -3, -3], [1, -2, 3]],
            false,
        ),
        mk(
            "patterns-34",
            4,
            vec![
                [3, 4, 4],
                [3, -4, -4],
                [-3, 4, 4],
                [-3, -4, -4],
                [1, -2, 3],
                [-1, 2, -4],
            ],
            false,
        ),
    ];
    all.into_iter()
        .filter(|c| c.instance.num_vars() <= max_l && c.instance.clauses().len() <= max_m)
        .collect()
}

/// Uniform random 3-CNF over three *distinct* variables per clause with
/// independent random signs. Distinctness keeps every clause point of the
/// reduction able to block the margin when falsified; it needs l >= 3.
pub fn random_3sat(l: usize, m: usize, rng: &mut ChaCha8Rng) -> SatInstance {
    assert!(l >= 3, "random 3-SAT with distinct variables needs l >= 3");
    let clauses: Vec<Clause> = (0..m)
        .map(|_| {
            let mut vars = [0i32; 3];
            let mut picked = 0;
            while picked < 3 {
                let var = rng.random_range(1..=l as i32);
                if !vars[..picked].contains(&var) {
                    vars[picked] = var;
                    picked += 1;
                }
            }
            let mut clause = [0i32; 3];
            for (lit, &var) in clause.iter_mut().zip(&vars) {
                *lit = if rng.random_bool(0.5) { var } else { -var };
            }
            clause
        })
        .collect();
    SatInstance::new(l, clauses).expect("generated literals are in range")
}
