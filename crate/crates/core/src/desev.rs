//! Decomposed state evolution: basis states grouped into problem-energy levels
//! `D_k`, and the weight `Γ_k(s) = Σ_{x∈D_k} |⟨x|ψ(s)⟩|²` an eigenstate puts on
//! each level as `s` runs from 0 to 1.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::hamiltonian::SystemHamiltonian;
use crate::lanczos::dot;
use crate::rational::{self, Rational};
use crate::reductions::{indicator_of_index, pseudo_boolean_value, Couplings};
use crate::spectra::{self, format_sig, SolverOptions, DEGENERACY_RATIO};

pub const DEFAULT_TOP_LEVELS: usize = 7;

/// How levels are labelled.
#[derive(Debug, Clone, Copy)]
pub enum Labeler<'a> {
    /// `Y(x)` of a representative, with weights `c_i / k` (the "(-)energy").
    PseudoBoolean {
        graph: &'a WeightedGraph,
        couplings: &'a Couplings,
        k: Rational,
    },
    /// The problem energy itself.
    Energy,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Level {
    #[serde(with = "rational::exact")]
    pub energy: Rational,
    #[serde(with = "rational::exact")]
    pub label: Rational,
    pub count: usize,
    /// Smallest basis index in the level.
    pub representative: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelTable {
    n: usize,
    levels: Vec<Level>,
    level_of: Vec<u32>,
}

/// Groups basis states by exact problem energy, lowest level first.
pub fn group_levels(h: &SystemHamiltonian, labeler: Labeler<'_>) -> Result<LevelTable> {
    let mut index_of_energy: BTreeMap<i64, (usize, usize)> = BTreeMap::new();
    for (x, &e) in h.diag_scaled().iter().enumerate() {
        index_of_energy.entry(e).and_modify(|c| c.1 += 1).or_insert((x, 1));
    }
    let mut levels = Vec::with_capacity(index_of_energy.len());
    let mut rank: BTreeMap<i64, u32> = BTreeMap::new();
    for (pos, (&e, &(rep, count))) in index_of_energy.iter().enumerate() {
        let energy = Rational::new(e, h.denominator());
        let label = match labeler {
            Labeler::Energy => energy,
            Labeler::PseudoBoolean { graph, couplings, k } => {
                if graph.n() != h.n() {
                    return Err(Error::DimensionMismatch {
                        expected: h.n(),
                        got: graph.n(),
                    });
                }
                pseudo_boolean_value(graph, couplings, &indicator_of_index(rep as u64, h.n()))? / k
            }
        };
        levels.push(Level {
            energy,
            label,
            count,
            representative: rep,
        });
        rank.insert(e, pos as u32);
    }
    let level_of = h.diag_scaled().iter().map(|e| rank[e]).collect();
    Ok(LevelTable {
        n: h.n(),
        levels,
        level_of,
    })
}

impl LevelTable {
    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn level_of(&self, index: usize) -> usize {
        self.level_of[index] as usize
    }

    /// Basis indices of level `k`, ascending.
    pub fn members(&self, k: usize) -> Vec<usize> {
        (0..self.level_of.len()).filter(|&x| self.level_of[x] as usize == k).collect()
    }

    /// Representative of level `k` as 1-based positions of its zero bits,
    /// e.g. `"123456"`; comma-separated once any position exceeds 9.
    pub fn zero_positions(&self, k: usize) -> String {
        zero_position_notation(self.levels[k].representative, self.n)
    }

    /// `|D_k| / 2^n` for every level.
    pub fn uniform_weights(&self) -> Vec<f64> {
        let dim = self.level_of.len() as f64;
        self.levels.iter().map(|l| l.count as f64 / dim).collect()
    }
}

pub fn zero_position_notation(index: usize, n: usize) -> String {
    let zeros: Vec<usize> = (0..n).filter(|&i| (index >> i) & 1 == 0).map(|i| i + 1).collect();
    let sep = if zeros.iter().any(|&p| p >= 10) { "," } else { "" };
    zeros.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(sep)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tracking {
    /// Always the `eigenstate`-th lowest eigenvector.
    IndexOrdered,
    /// The eigenvector with the largest overlap with the previous point's.
    Overlap,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GammaOptions {
    pub eigenstate: usize,
    pub top_levels: usize,
    pub tracking: Tracking,
    pub solver: SolverOptions,
}

impl Default for GammaOptions {
    fn default() -> Self {
        Self {
            eigenstate: 0,
            top_levels: DEFAULT_TOP_LEVELS,
            tracking: Tracking::IndexOrdered,
            solver: SolverOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaTrace {
    pub grid: Vec<f64>,
    pub eigenstate: usize,
    pub tracking: Tracking,
    /// Level indices shown, lowest energy first.
    pub levels: Vec<usize>,
    /// Per grid point: one value per shown level, then the "other" bucket.
    pub values: Vec<Vec<f64>>,
    /// Grid points where the traced state is within the degeneracy threshold
    /// of a neighbouring eigenvalue.
    pub near_degenerate: Vec<f64>,
}

impl GammaTrace {
    /// `Γ` of shown level `pos` at every grid point.
    pub fn column(&self, pos: usize) -> Vec<f64> {
        self.values.iter().map(|row| row[pos]).collect()
    }

    pub fn other(&self) -> Vec<f64> {
        let t = self.levels.len();
        self.column(t)
    }
}

fn level_weights(table: &LevelTable, v: &[f64]) -> Vec<f64> {
    let mut acc = vec![0.0; table.levels.len()];
    for (x, &a) in v.iter().enumerate() {
        acc[table.level_of[x] as usize] += a * a;
    }
    acc
}

pub fn gamma_trace(h: &SystemHamiltonian, table: &LevelTable, grid: &[f64], opts: &GammaOptions) -> Result<GammaTrace> {
    if opts.top_levels == 0 {
        return Err(Error::InvalidInput("top_levels must be at least 1".into()));
    }
    if opts.eigenstate > 6 {
        return Err(Error::InvalidInput(format!("eigenstate {} is too high", opts.eigenstate)));
    }
    if table.level_of.len() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            got: table.level_of.len(),
        });
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("grid must be strictly increasing".into()));
    }
    let shown: Vec<usize> = (0..opts.top_levels.min(table.levels.len())).collect();
    let q = (opts.eigenstate + 2).min(h.dim());
    let target = opts.eigenstate.min(q - 1);
    let mut values = Vec::with_capacity(grid.len());
    let mut near_degenerate = Vec::new();
    let mut warm: Option<Vec<Vec<f64>>> = None;
    let mut previous: Option<Vec<f64>> = None;
    for &s in grid {
        let eig = spectra::lowest_eigenpairs_with(h, s, q, &opts.solver, warm.as_deref())?;
        let pick = match (opts.tracking, &previous) {
            (Tracking::Overlap, Some(prev)) => (0..q)
                .max_by(|&a, &b| dot(prev, &eig.vectors[a]).abs().total_cmp(&dot(prev, &eig.vectors[b]).abs()))
                .expect("q ≥ 1"),
            _ => target,
        };
        let scale = (s * h.problem_norm() + (1.0 - s) * h.n() as f64).max(1.0);
        let mut spacing = f64::INFINITY;
        if pick > 0 {
            spacing = spacing.min(eig.values[pick] - eig.values[pick - 1]);
        }
        if pick + 1 < q {
            spacing = spacing.min(eig.values[pick + 1] - eig.values[pick]);
        }
        if spacing < DEGENERACY_RATIO * scale {
            near_degenerate.push(s);
        }
        let weights = level_weights(table, &eig.vectors[pick]);
        let mut row: Vec<f64> = shown.iter().map(|&k| weights[k]).collect();
        row.push(weights[shown.len()..].iter().sum());
        values.push(row);
        previous = Some(eig.vectors[pick].clone());
        warm = Some(eig.vectors.clone());
    }
    Ok(GammaTrace {
        grid: grid.to_vec(),
        eigenstate: opts.eigenstate,
        tracking: opts.tracking,
        levels: shown,
        values,
        near_degenerate,
    })
}

/// DESEV CSV: `s,<label>...,other`.
pub fn gamma_csv(trace: &GammaTrace, table: &LevelTable, digits: usize) -> String {
    let mut out = String::from("s");
    for &k in &trace.levels {
        out.push(',');
        out.push_str(&rational::format_exact(&table.levels[k].label));
    }
    out.push_str(",other\n");
    for (s, row) in trace.grid.iter().zip(&trace.values) {
        out.push_str(&format_sig(*s, digits));
        for v in row {
            let _ = write!(out, ",{}", format_sig(*v, digits));
        }
        out.push('\n');
    }
    out
}

/// Companion metadata: membership counts and representatives of the shown
/// levels.
pub fn gamma_metadata(trace: &GammaTrace, table: &LevelTable) -> serde_json::Value {
    let levels: Vec<_> = trace
        .levels
        .iter()
        .map(|&k| {
            let l = &table.levels[k];
            json!({
                "label": rational::format_exact(&l.label),
                "energy": rational::format_exact(&l.energy),
                "count": l.count,
                "representative": table.zero_positions(k),
            })
        })
        .collect();
    json!({
        "eigenstate": trace.eigenstate,
        "tracking": trace.tracking,
        "total_levels": table.levels.len(),
        "levels": levels,
        "near_degenerate": trace.near_degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use crate::reductions::{BitConvention, IsingModel};

    #[test]
    fn zero_position_examples() {
        assert_eq!(zero_position_notation(0b111111111000000, 15), "123456");
        assert_eq!(zero_position_notation(0b011111111111111, 15), "15");
        assert_eq!(zero_position_notation(0b000000000111111, 15), "7,8,9,10,11,12,13,14,15");
        assert_eq!(zero_position_notation(0b11, 2), "");
    }

    #[test]
    fn levels_partition_states() {
        let m = IsingModel::new(3, vec![int(1), int(1), int(1)], [], BitConvention::Plus).unwrap();
        let h = SystemHamiltonian::build(&m).unwrap();
        let t = group_levels(&h, Labeler::Energy).unwrap();
        let counts: Vec<usize> = t.levels().iter().map(|l| l.count).collect();
        assert_eq!(counts, vec![1, 3, 3, 1]);
        assert_eq!(t.levels()[0].energy, int(-3));
        assert_eq!(t.members(1), vec![3, 5, 6]);
        assert_eq!(t.uniform_weights(), vec![0.125, 0.375, 0.375, 0.125]);
    }

    #[test]
    fn rejects_bad_options() {
        let m = IsingModel::new(2, vec![int(1), int(-1)], [], BitConvention::Plus).unwrap();
        let h = SystemHamiltonian::build(&m).unwrap();
        let t = group_levels(&h, Labeler::Energy).unwrap();
        let opts = GammaOptions {
            top_levels: 0,
            ..Default::default()
        };
        assert!(gamma_trace(&h, &t, &[0.0, 1.0], &opts).is_err());
        assert!(gamma_trace(&h, &t, &[0.5, 0.4], &GammaOptions::default()).is_err());
    }
}
