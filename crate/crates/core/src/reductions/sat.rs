use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::rational::int;

/// A literal over 0-based variable `var`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Literal {
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    pub fn positive(var: usize) -> Self {
        Self { var, negated: false }
    }

    pub fn negative(var: usize) -> Self {
        Self { var, negated: true }
    }

    pub fn complements(&self, other: &Literal) -> bool {
        self.var == other.var && self.negated != other.negated
    }

    pub fn is_true(&self, assignment: &[u8]) -> bool {
        (assignment[self.var] != 0) != self.negated
    }

    fn to_dimacs(self) -> i64 {
        let v = self.var as i64 + 1;
        if self.negated {
            -v
        } else {
            v
        }
    }
}

/// CNF formula. Clause lengths are not restricted here; the reductions that
/// need 3-literal clauses check it themselves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cnf {
    num_vars: usize,
    clauses: Vec<Vec<Literal>>,
}

impl Cnf {
    pub fn new(num_vars: usize, clauses: Vec<Vec<Literal>>) -> Result<Self> {
        for (c, clause) in clauses.iter().enumerate() {
            if clause.is_empty() {
                return Err(Error::InvalidInput(format!("clause {c} is empty")));
            }
            if let Some(l) = clause.iter().find(|l| l.var >= num_vars) {
                return Err(Error::InvalidInput(format!(
                    "clause {c} uses variable {} but the formula has {num_vars}",
                    l.var + 1
                )));
            }
        }
        Ok(Self { num_vars, clauses })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Vec<Literal>] {
        &self.clauses
    }

    pub fn all_positive(&self) -> bool {
        self.clauses.iter().flatten().all(|l| !l.negated)
    }

    /// Parses DIMACS: `c` comment lines, a `p cnf <vars> <clauses>` header,
    /// then whitespace-separated literals with each clause ended by `0`.
    pub fn parse_dimacs(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        let mut current = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line_no = lineno + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('c') || trimmed.starts_with('%') {
                continue;
            }
            if trimmed.starts_with('p') {
                let parts: Vec<&str> = trimmed.split_whitespace().collect();
                if parts.len() != 4 || parts[1] != "cnf" {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "expected `p cnf <vars> <clauses>`".into(),
                    });
                }
                let parse = |s: &str| {
                    s.parse::<usize>().map_err(|_| Error::Parse {
                        line: line_no,
                        message: format!("bad header number {s:?}"),
                    })
                };
                header = Some((parse(parts[2])?, parse(parts[3])?));
                continue;
            }
            let (num_vars, _) = header.ok_or(Error::Parse {
                line: line_no,
                message: "clause before `p cnf` header".into(),
            })?;
            for tok in trimmed.split_whitespace() {
                let v: i64 = tok.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("bad literal {tok:?}"),
                })?;
                if v == 0 {
                    if current.is_empty() {
                        return Err(Error::Parse {
                            line: line_no,
                            message: "empty clause".into(),
                        });
                    }
                    clauses.push(std::mem::take(&mut current));
                    continue;
                }
                let var = v.unsigned_abs() as usize - 1;
                if var >= num_vars {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("variable {} exceeds header count {num_vars}", var + 1),
                    });
                }
                current.push(Literal { var, negated: v < 0 });
            }
        }
        let (num_vars, num_clauses) = header.ok_or(Error::Parse {
            line: 0,
            message: "missing `p cnf` header".into(),
        })?;
        if !current.is_empty() {
            // tolerate a missing final terminator
            clauses.push(current);
        }
        if clauses.len() != num_clauses {
            return Err(Error::Parse {
                line: 0,
                message: format!("header declares {num_clauses} clauses, found {}", clauses.len()),
            });
        }
        Self::new(num_vars, clauses)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_dimacs(&std::fs::read_to_string(path)?)
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for clause in &self.clauses {
            for l in clause {
                let _ = write!(out, "{} ", l.to_dimacs());
            }
            out.push_str("0\n");
        }
        out
    }
}

/// Triangle gadget per clause (vertex `3c + t` is literal `t` of clause `c`),
/// plus an edge between complementary literals of different clauses. Unit
/// weights; satisfiable iff the MIS has size `m`. Repeated literals in a
/// clause still get their own vertices.
pub fn threesat_to_mis(cnf: &Cnf) -> Result<WeightedGraph> {
    let m = cnf.clauses().len();
    if m == 0 {
        return Err(Error::InvalidInput("formula has no clauses".into()));
    }
    if let Some((c, clause)) = cnf.clauses().iter().enumerate().find(|(_, cl)| cl.len() != 3) {
        return Err(Error::InvalidInput(format!(
            "clause {c} has {} literals; the triangle gadget needs 3",
            clause.len()
        )));
    }
    let literals: Vec<Literal> = cnf.clauses().iter().flatten().copied().collect();
    let mut edges = Vec::new();
    for c in 0..m {
        let base = 3 * c;
        edges.extend([(base, base + 1), (base, base + 2), (base + 1, base + 2)]);
    }
    for a in 0..literals.len() {
        for b in a + 1..literals.len() {
            if a / 3 != b / 3 && literals[a].complements(&literals[b]) {
                edges.push((a, b));
            }
        }
    }
    WeightedGraph::new(vec![int(1); 3 * m], edges)
}
