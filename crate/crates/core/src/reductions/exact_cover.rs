use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ising::{BitConvention, IsingModel};
use super::sat::{Cnf, Literal};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::rational::int;

/// Exact cover instance: `sets` are subsets of the elements `0..m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EcInstance {
    pub m: usize,
    pub sets: Vec<Vec<usize>>,
}

impl EcInstance {
    pub fn new(m: usize, sets: Vec<Vec<usize>>) -> Result<Self> {
        let inst = Self { m, sets };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sets.is_empty() {
            return Err(Error::InvalidInput("exact cover instance has no sets".into()));
        }
        for (i, set) in self.sets.iter().enumerate() {
            if set.is_empty() {
                return Err(Error::InvalidInput(format!("set {i} is empty")));
            }
            if let Some(&e) = set.iter().find(|&&e| e >= self.m) {
                return Err(Error::InvalidInput(format!(
                    "set {i} contains element {e}, but there are only {} elements",
                    self.m
                )));
            }
            let mut sorted = set.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != set.len() {
                return Err(Error::InvalidInput(format!("set {i} repeats an element")));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.sets.len()
    }

    /// Indices of the sets containing `element`, ascending.
    pub fn containing(&self, element: usize) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.sets[i].contains(&element)).collect()
    }

    pub fn overlap(&self, i: usize, j: usize) -> usize {
        self.sets[i].iter().filter(|e| self.sets[j].contains(e)).count()
    }

    /// Every element lies in exactly three sets.
    pub fn is_ec3(&self) -> bool {
        (0..self.m).all(|e| self.containing(e).len() == 3)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let inst: Self = serde_json::from_str(text)?;
        inst.validate()?;
        Ok(inst)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// The worked 7-set, 5-element example (`S_1 = {c_1, c_2, c_4}`, …, 0-based).
pub fn appendix_ec_instance() -> EcInstance {
    EcInstance::new(
        5,
        vec![
            vec![0, 1, 3],
            vec![0, 1, 4],
            vec![0, 2, 3],
            vec![1, 2],
            vec![2],
            vec![3, 4],
            vec![4],
        ],
    )
    .expect("static instance is valid")
}

/// Conflict graph: one vertex per set weighted by its size, an edge whenever
/// two sets intersect. An exact cover exists iff the MIS weight equals `m`.
pub fn ec_to_mis(instance: &EcInstance) -> Result<WeightedGraph> {
    instance.validate()?;
    let n = instance.n();
    let weights = instance.sets.iter().map(|s| int(s.len() as i64)).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if instance.overlap(i, j) > 0 {
                edges.push((i, j));
            }
        }
    }
    WeightedGraph::new(weights, edges)
}

/// One all-positive clause per element, over the three sets that contain it.
pub fn ec3_to_1in3sat(instance: &EcInstance) -> Result<Cnf> {
    instance.validate()?;
    let mut clauses = Vec::with_capacity(instance.m);
    for e in 0..instance.m {
        let holders = instance.containing(e);
        if holders.len() != 3 {
            return Err(Error::InvalidInput(format!(
                "element {e} appears in {} sets; EC3 needs exactly 3",
                holders.len()
            )));
        }
        clauses.push(holders.into_iter().map(Literal::positive).collect());
    }
    Cnf::new(instance.n(), clauses)
}

/// Clause-violation Hamiltonian `Σ B_i σ^z_i + Σ I_ij σ^z_i σ^z_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AyHamiltonian {
    /// `B_i`: clauses containing variable `i`.
    pub clause_counts: Vec<i64>,
    /// `I_ij`: clauses containing both `i` and `j`, for every sharing pair.
    pub pair_counts: Vec<(usize, usize, i64)>,
    pub model: IsingModel,
}

/// Builds the clause-violation Hamiltonian of an EC3 instance.
///
/// The model is twice the violation count `Σ_c (x_a + x_b + x_c − 1)²` up to
/// a constant under `x_i = (1 + s_i)/2`, so it is tagged with the plus
/// convention and energy unit 2. The original sign (`−B_i` fields read with
/// `x_i = (1 − s_i)/2`) is [`IsingModel::to_opposite_convention`] of it.
pub fn ay_hamiltonian(instance: &EcInstance) -> Result<AyHamiltonian> {
    let cnf = ec3_to_1in3sat(instance)?;
    let n = cnf.num_vars();
    let mut clause_counts = vec![0i64; n];
    let mut pairs = std::collections::BTreeMap::new();
    for clause in cnf.clauses() {
        for (a, la) in clause.iter().enumerate() {
            clause_counts[la.var] += 1;
            for lb in &clause[a + 1..] {
                let key = (la.var.min(lb.var), la.var.max(lb.var));
                *pairs.entry(key).or_insert(0i64) += 1;
            }
        }
    }
    let pair_counts: Vec<_> = pairs.into_iter().map(|((i, j), c)| (i, j, c)).collect();
    let model = IsingModel::new(
        n,
        clause_counts.iter().map(|&b| int(b)).collect(),
        pair_counts.iter().map(|&(i, j, c)| (i, j, int(c))),
        BitConvention::Plus,
    )?
    .with_energy_unit(int(2))?;
    Ok(AyHamiltonian {
        clause_counts,
        pair_counts,
        model,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::appendix_ec_graph;

    #[test]
    fn appendix_reduces_to_appendix_graph() {
        let inst = appendix_ec_instance();
        assert!(inst.is_ec3());
        assert_eq!(ec_to_mis(&inst).unwrap(), appendix_ec_graph());
    }

    #[test]
    fn appendix_clauses() {
        let cnf = ec3_to_1in3sat(&appendix_ec_instance()).unwrap();
        assert_eq!(cnf.clauses().len(), 5);
        let first: Vec<usize> = cnf.clauses()[0].iter().map(|l| l.var).collect();
        assert_eq!(first, vec![0, 1, 2]);
        assert!(cnf.all_positive());
    }

    #[test]
    fn non_ec3_rejected() {
        let inst = EcInstance::new(2, vec![vec![0, 1], vec![0], vec![1]]).unwrap();
        assert!(ec3_to_1in3sat(&inst).is_err());
        assert!(ay_hamiltonian(&inst).is_err());
    }

    #[test]
    fn disjoint_sets_give_edgeless_graph() {
        let inst = EcInstance::new(4, vec![vec![0], vec![1, 2], vec![3]]).unwrap();
        let g = ec_to_mis(&inst).unwrap();
        assert!(g.edges().is_empty());
        assert_eq!(g.total_weight(), int(4));
    }

    #[test]
    fn validation() {
        assert!(EcInstance::new(2, vec![]).is_err());
        assert!(EcInstance::new(2, vec![vec![]]).is_err());
        assert!(EcInstance::new(2, vec![vec![2]]).is_err());
        assert!(EcInstance::new(2, vec![vec![1, 1]]).is_err());
    }

    #[test]
    fn ay_counts_on_appendix() {
        let ay = ay_hamiltonian(&appendix_ec_instance()).unwrap();
        assert_eq!(ay.clause_counts, vec![3, 3, 3, 2, 1, 2, 1]);
        let i23 = ay.pair_counts.iter().find(|&&(i, j, _)| (i, j) == (1, 2)).unwrap().2;
        assert_eq!(i23, 1);
        for i in 0..7 {
            let s: i64 = ay
                .pair_counts
                .iter()
                .filter(|&&(a, b, _)| a == i || b == i)
                .map(|&(_, _, c)| c)
                .sum();
            assert_eq!(s, 2 * ay.clause_counts[i]);
        }
    }
}
