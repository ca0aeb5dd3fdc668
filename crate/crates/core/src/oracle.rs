//! Brute-force and dense references. Everything combinatorial is done in
//! exact integer arithmetic over a common denominator; the dense eigensolver
//! shares no code with the iterative one.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::hamiltonian::SystemHamiltonian;
use crate::rational::{self, Rational};
use crate::reductions::{decode_index, Cnf, Couplings, EcInstance, IsingModel};

pub const ENUMERATION_LIMIT: usize = 24;
pub const DENSE_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    #[serde(with = "rational::exact")]
    pub optimum: Rational,
    /// Optimal vertex sets (ascending vertex lists), in enumeration order.
    pub optimizers: Vec<Vec<usize>>,
    pub enumerated: u64,
}

fn check_size(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::TooLarge { n, limit });
    }
    Ok(())
}

fn scaled_weights(graph: &WeightedGraph) -> (i64, Vec<i64>) {
    let den = rational::common_denominator(graph.weights());
    let w = graph.weights().iter().map(|c| c.numer() * (den / c.denom())).collect();
    (den, w)
}

/// Maximum-weight independent sets by exhaustive branching with a
/// remaining-weight bound.
pub fn brute_force_mis(graph: &WeightedGraph) -> Result<OracleReport> {
    let n = graph.n();
    check_size(n, ENUMERATION_LIMIT)?;
    let (den, w) = scaled_weights(graph);
    let nbr_mask: Vec<u32> = (0..n)
        .map(|i| graph.neighbors(i).iter().fold(0u32, |m, &j| m | (1 << j)))
        .collect();
    let mut suffix = vec![0i64; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] + w[i];
    }
    struct Search<'a> {
        n: usize,
        w: &'a [i64],
        nbr: &'a [u32],
        suffix: &'a [i64],
        best: i64,
        optimizers: Vec<u32>,
        visited: u64,
    }
    impl Search<'_> {
        fn go(&mut self, i: usize, chosen: u32, blocked: u32, value: i64) {
            self.visited += 1;
            if value + self.suffix[i] < self.best {
                return;
            }
            if i == self.n {
                if value > self.best {
                    self.best = value;
                    self.optimizers.clear();
                }
                self.optimizers.push(chosen);
                return;
            }
            if blocked & (1 << i) == 0 {
                self.go(i + 1, chosen | (1 << i), blocked | self.nbr[i], value + self.w[i]);
            }
            self.go(i + 1, chosen, blocked, value);
        }
    }
    let mut search = Search {
        n,
        w: &w,
        nbr: &nbr_mask,
        suffix: &suffix,
        best: i64::MIN,
        optimizers: Vec::new(),
        visited: 0,
    };
    search.go(0, 0, 0, 0);
    let mut optimizers: Vec<Vec<usize>> = search
        .optimizers
        .iter()
        .map(|&m| (0..n).filter(|&i| m & (1 << i) != 0).collect())
        .collect();
    optimizers.sort();
    Ok(OracleReport {
        optimum: Rational::new(search.best, den),
        optimizers,
        enumerated: search.visited,
    })
}

/// Maximum of `Y(x)` over all `2^n` indicator vectors; optimizers are the
/// sets `{i : x_i = 1}`.
pub fn max_pseudo_boolean(graph: &WeightedGraph, couplings: &Couplings) -> Result<OracleReport> {
    let n = graph.n();
    check_size(n, ENUMERATION_LIMIT)?;
    let mut entries: Vec<Rational> = graph.weights().to_vec();
    let mut edges = Vec::with_capacity(graph.edges().len());
    for &(i, j) in graph.edges() {
        let v = couplings.get(i, j).ok_or(Error::MissingCoupling(i, j))?;
        entries.push(v);
        edges.push((i, j, v));
    }
    let den = rational::common_denominator(entries.iter());
    let scale = |r: &Rational| r.numer() * (den / r.denom());
    let w: Vec<i64> = graph.weights().iter().map(scale).collect();
    let mut adj: Vec<Vec<(usize, i64)>> = vec![Vec::new(); n];
    for (i, j, v) in edges {
        adj[i].push((j, scale(&v)));
        adj[j].push((i, scale(&v)));
    }
    // Gray-code walk: flipping x_t changes Y by ±(c_t − Σ_{j: x_j=1} J_tj)
    let mut x = 0u64;
    let mut value = 0i64;
    let mut best = 0i64;
    let mut optimizers = vec![0u64];
    let total = 1u64 << n;
    for step in 1..total {
        let t = step.trailing_zeros() as usize;
        let coupled: i64 = adj[t].iter().filter(|(j, _)| x >> j & 1 == 1).map(|(_, v)| v).sum();
        if x >> t & 1 == 0 {
            value += w[t] - coupled;
        } else {
            value -= w[t] - coupled;
        }
        x ^= 1 << t;
        if value > best {
            best = value;
            optimizers.clear();
        }
        if value == best {
            optimizers.push(x);
        }
    }
    let mut sets: Vec<Vec<usize>> = optimizers
        .iter()
        .map(|&m| (0..n).filter(|&i| m >> i & 1 == 1).collect())
        .collect();
    sets.sort();
    Ok(OracleReport {
        optimum: Rational::new(best, den),
        optimizers: sets,
        enumerated: total,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsingReport {
    #[serde(with = "rational::exact")]
    pub minimum: Rational,
    /// Minimizing basis indices, ascending.
    pub minimizers: Vec<u64>,
    /// The minimizers decoded under the model's bit convention.
    pub decoded: Vec<Vec<usize>>,
    pub enumerated: u64,
}

/// Exhaustive Ising minimum (exact integer Gray-code walk).
pub fn brute_force_ising_min(model: &IsingModel) -> Result<IsingReport> {
    let n = model.n();
    check_size(n, ENUMERATION_LIMIT)?;
    let (den, h, couplings) = model.integer_form()?;
    let mut adj: Vec<Vec<(usize, i64)>> = vec![Vec::new(); n];
    for &(i, j, v) in &couplings {
        adj[i].push((j, v));
        adj[j].push((i, v));
    }
    let spin = |x: u64, i: usize| if x >> i & 1 == 0 { 1i64 } else { -1 };
    let mut x = 0u64;
    let mut energy: i64 = h.iter().sum::<i64>() + couplings.iter().map(|c| c.2).sum::<i64>();
    let mut best = energy;
    let mut minimizers = vec![0u64];
    let total = 1u64 << n;
    for step in 1..total {
        let t = step.trailing_zeros() as usize;
        let local: i64 = h[t] + adj[t].iter().map(|&(j, v)| v * spin(x, j)).sum::<i64>();
        energy -= 2 * spin(x, t) * local;
        x ^= 1 << t;
        if energy < best {
            best = energy;
            minimizers.clear();
        }
        if energy == best {
            minimizers.push(x);
        }
    }
    minimizers.sort_unstable();
    let decoded = minimizers.iter().map(|&m| decode_index(model, m)).collect();
    Ok(IsingReport {
        minimum: Rational::new(best, den),
        minimizers,
        decoded,
        enumerated: total,
    })
}

/// Dense `H(s)` assembled entry by entry.
pub fn dense_hamiltonian(h: &SystemHamiltonian, s: f64) -> Result<DMatrix<f64>> {
    check_size(h.n(), DENSE_LIMIT)?;
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::ParameterOutOfRange(s));
    }
    let dim = h.dim();
    let mut m = DMatrix::zeros(dim, dim);
    for x in 0..dim {
        m[(x, x)] = s * h.diag()[x];
        for i in 0..h.n() {
            m[(x, x ^ (1 << i))] = -(1.0 - s);
        }
    }
    Ok(m)
}

#[derive(Debug, Clone)]
pub struct DenseSpectrum {
    /// Ascending.
    pub values: Vec<f64>,
    /// `vectors[l]` belongs to `values[l]`.
    pub vectors: Vec<Vec<f64>>,
}

/// Full eigendecomposition of `H(s)` by a dense symmetric solver.
pub fn dense_eigs(h: &SystemHamiltonian, s: f64) -> Result<DenseSpectrum> {
    let m = dense_hamiltonian(h, s)?;
    let dim = m.nrows();
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    Ok(DenseSpectrum {
        values: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
        vectors: order.iter().map(|&i| eig.eigenvectors.column(i).iter().copied().collect()).collect(),
    })
}

/// Every clause has exactly one true literal.
pub fn check_1in3(cnf: &Cnf, assignment: &[u8]) -> Result<bool> {
    if assignment.len() != cnf.num_vars() {
        return Err(Error::DimensionMismatch {
            expected: cnf.num_vars(),
            got: assignment.len(),
        });
    }
    Ok(cnf
        .clauses()
        .iter()
        .all(|clause| clause.iter().filter(|l| l.is_true(assignment)).count() == 1))
}

/// The chosen sets (0-based indices) are pairwise disjoint and cover every
/// element. Out-of-range indices make the answer `false`.
pub fn check_exact_cover(instance: &EcInstance, chosen: &[usize]) -> bool {
    let mut hits = vec![0usize; instance.m];
    for &i in chosen {
        let Some(set) = instance.sets.get(i) else {
            return false;
        };
        for &e in set {
            match hits.get_mut(e) {
                Some(h) => *h += 1,
                None => return false,
            }
        }
    }
    let mut seen = chosen.to_vec();
    seen.sort_unstable();
    seen.dedup();
    seen.len() == chosen.len() && hits.iter().all(|&h| h == 1)
}
