//! 3-CNF instances, exhaustive satisfiability, and a DIMACS reader.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exactly three literals; a literal is a signed 1-based variable index and
/// repeats are allowed.
pub type Clause = [i32; 3];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SatInstance {
    num_vars: usize,
    clauses: Vec<Clause>,
}

impl SatInstance {
    pub fn new(num_vars: usize, clauses: Vec<Clause>) -> Result<Self> {
        if num_vars == 0 {
            return Err(Error::InvalidParam(
                "formula needs at least one variable".into(),
            ));
        }
        for (ci, clause) in clauses.iter().enumerate() {
            for &lit in clause {
                if lit == 0 || lit.unsigned_abs() as usize > num_vars {
                    return Err(Error::InvalidParam(format!(
                        "clause {ci} holds literal {lit} outside 1..={num_vars}"
                    )));
                }
            }
        }
        Ok(SatInstance { num_vars, clauses })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// `assignment[i]` is the value of variable i+1.
    pub fn evaluate(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|clause| {
            clause.iter().any(|&lit| {
                let v = assignment[(lit.unsigned_abs() - 1) as usize];
                if lit > 0 {
                    v
                } else {
                    !v
                }
            })
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Satisfiability {
    Satisfiable(Vec<bool>),
    Unsatisfiable,
}

impl Satisfiability {
    pub fn is_satisfiable(&self) -> bool {
        matches!(self, Satisfiability::Satisfiable(_))
    }
}

/// Exhaustive check over all 2^l assignments (l <= 24). The witness is the
/// first satisfying assignment in counting order, bit i of the counter being
/// variable i+1.
pub fn sat_brute_force(sat: &SatInstance) -> Result<Satisfiability> {
    let l = sat.num_vars();
    if l > 24 {
        return Err(Error::BudgetExceeded(format!(
            "brute-force SAT supports at most 24 variables, got {l}"
        )));
    }
    let mut assignment = vec![false; l];
    for counter in 0u64..(1u64 << l) {
        for (i, a) in assignment.iter_mut().enumerate() {
            *a = (counter >> i) & 1 == 1;
        }
        if sat.evaluate(&assignment) {
            return Ok(Satisfiability::Satisfiable(assignment));
        }
    }
    Ok(Satisfiability::Unsatisfiable)
}

/// DIMACS CNF reader. Clauses with fewer than three literals are padded by
/// repeating their last literal; clauses with more are rejected.
pub fn parse_dimacs(text: &str) -> Result<SatInstance> {
    let mut num_vars: Option<usize> = None;
    let mut clauses: Vec<Clause> = Vec::new();
    let mut current: Vec<i32> = Vec::new();

    for (lineno, line) in text.lines().enumerate() {
        let line_1 = lineno + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('p') {
            let fields: Vec<&str> = rest.split_whitespace().collect();
            if fields.len() != 3 || fields[0] != "cnf" {
                return Err(Error::Parse {
                    line: line_1,
                    msg: "expected `p cnf <vars> <clauses>`".into(),
                });
            }
            num_vars = Some(fields[1].parse().map_err(|_| Error::Parse {
                line: line_1,
                msg: format!("bad variable count `{}`", fields[1]),
            })?);
            continue;
        }
        for tok in line.split_whitespace() {
            let lit: i32 = tok.parse().map_err(|_| Error::Parse {
                line: line_1,
                msg: format!("bad literal `{tok}`"),
            })?;
            if lit == 0 {
                match current.len() {
                    0 => {
                        return Err(Error::Parse {
                            line: line_1,
                            msg: "empty clause cannot be padded to three literals".into(),
                        })
                    }
                    1..=3 => {
                        let last = *current.last().expect("nonempty");
                        while current.len() < 3 {
                            current.push(last);
                        }
                        clauses.push([current[0], current[1], current[2]]);
                        current.clear();
                    }
                    _ => {
                        return Err(Error::Parse {
                            line: line_1,
                            msg: format!(
                                "clause has {} literals; at most 3 allowed",
                                current.len()
                            ),
                        })
                    }
                }
            } else {
                current.push(lit);
            }
        }
    }
    if !current.is_empty() {
        return Err(Error::Parse {
            line: 0,
            msg: "last clause is not 0-terminated".into(),
        });
    }
    let num_vars = num_vars.ok_or(Error::Parse {
        line: 0,
        msg: "missing `p cnf` header".into(),
    })?;
    if clauses.is_empty() {
        return Err(Error::EmptyData("formula has no clauses".into()));
    }
    SatInstance::new(num_vars, clauses)
}

pub fn load_dimacs(path: impl AsRef<Path>) -> Result<SatInstance> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_dimacs(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivially_satisfiable() {
        let sat = SatInstance::new(1, vec![[1, 1, 1]]).unwrap();
        match sat_brute_force(&sat).unwrap() {
            Satisfiability::Satisfiable(a) => assert_eq!(a, vec![true]),
            Satisfiability::Unsatisfiable => panic!("should be satisfiable"),
        }
    }

    #[test]
    fn trivially_unsatisfiable() {
        let sat = SatInstance::new(1, vec![[1, 1, 1], [-1, -1, -1]]).unwrap();
        assert_eq!(
            sat_brute_force(&sat).unwrap(),
            Satisfiability::Unsatisfiable
        );
    }

    #[test]
    fn rejects_out_of_range_literals() {
        assert!(SatInstance::new(2, vec![[1, 3, 2]]).is_err());
        assert!(SatInstance::new(2, vec![[0, 1, 2]]).is_err());
    }

    #[test]
    fn rejects_too_many_vars() {
        let sat = SatInstance::new(25, vec![[1, 2, 3]]).unwrap();
        assert!(matches!(
            sat_brute_force(&sat),
            Err(Error::BudgetExceeded(_))
        ));
    }

    #[test]
    fn dimacs_parses_and_pads() {
        let text = "c comment\np cnf 3 3\n1 -2 3 0\n2 0\n-1 -3 0\n";
        let sat = parse_dimacs(text).unwrap();
        assert_eq!(sat.num_vars(), 3);
        assert_eq!(sat.clauses(), &[[1, -2, 3], [2, 2, 2], [-1, -3, -3]]);
    }

    #[test]
    fn dimacs_rejects_long_clause() {
        let text = "p cnf 4 1\n1 2 3 4 0\n";
        assert!(parse_dimacs(text).is_err());
    }

    #[test]
    fn dimacs_rejects_empty_clause() {
        let text = "p cnf 2 1\n0\n";
        assert!(parse_dimacs(text).is_err());
    }
}
