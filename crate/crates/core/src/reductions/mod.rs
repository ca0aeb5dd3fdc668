//! Problem-to-Hamiltonian and problem-to-problem reductions.
//!
//! The MIS problem Hamiltonian comes from the pseudo-boolean function
//! `Y(x) = Σ c_i x_i − Σ J_ij x_i x_j` under `x_i = (1 + s_i)/2`, which gives
//! `h_i = Σ_{j ∈ nbr(i)} J_ij − 2 c_i` and couplings `J_ij`.
//!
//! Basis states are indexed by integers whose bit `i` is the qubit of vertex
//! `i`. Qubit value 0 is the `σ^z = +1` eigenstate, so in the `plus` bit
//! convention a vertex belongs to the decoded set exactly when its bit is 0
//! (the solution of the 15-vertex CK instance is `|000000111111111⟩`).

mod exact_cover;
mod ising;
mod sat;

use std::collections::BTreeMap;

pub use exact_cover::{
    appendix_ec_instance, ay_hamiltonian, ec3_to_1in3sat, ec_to_mis, AyHamiltonian, EcInstance,
};
pub use ising::{bits_of, index_of, BitConvention, IsingModel};
pub use sat::{threesat_to_mis, Cnf, Literal};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::rational::{self, int, Rational};

/// Per-edge coupling strengths `J_ij`, keyed by `(i, j)` with `i < j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Couplings {
    values: BTreeMap<(usize, usize), Rational>,
}

impl Couplings {
    pub fn uniform(graph: &WeightedGraph, j: Rational) -> Self {
        Self {
            values: graph.edges().iter().map(|&e| (e, j)).collect(),
        }
    }

    /// Uniform `J = ⌈max_{ij} min(c_i, c_j) + 1⌉`, strictly above every
    /// `min(c_i, c_j)`.
    pub fn default_rule(graph: &WeightedGraph) -> Self {
        Self::uniform(graph, default_uniform_value(graph))
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (usize, usize, Rational)>) -> Self {
        Self {
            values: entries
                .into_iter()
                .map(|(i, j, v)| ((i.min(j), i.max(j)), v))
                .collect(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Option<Rational> {
        self.values.get(&(i.min(j), i.max(j))).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Rational)> + '_ {
        self.values.iter().map(|(&(i, j), &v)| (i, j, v))
    }

    fn require(&self, i: usize, j: usize) -> Result<Rational> {
        self.get(i, j).ok_or(Error::MissingCoupling(i, j))
    }
}

pub fn default_uniform_value(graph: &WeightedGraph) -> Rational {
    let largest_min = graph
        .edges()
        .iter()
        .map(|&(i, j)| graph.weight(i).min(graph.weight(j)))
        .max();
    match largest_min {
        Some(m) => int(rational::ceil_integer(&(m + int(1)))),
        None => int(1),
    }
}

/// `Y(x) = Σ c_i x_i − Σ_{ij ∈ E} J_ij x_i x_j` for an indicator vector `x`.
pub fn pseudo_boolean_value(graph: &WeightedGraph, couplings: &Couplings, x: &[u8]) -> Result<Rational> {
    check_len(graph.n(), x.len())?;
    let mut value = int(0);
    for (i, &xi) in x.iter().enumerate() {
        if xi != 0 {
            value += graph.weight(i);
        }
    }
    for &(i, j) in graph.edges() {
        let jij = couplings.require(i, j)?;
        if x[i] != 0 && x[j] != 0 {
            value -= jij;
        }
    }
    Ok(value)
}

/// Ising form of the MIS pseudo-boolean function with weights `c_i / k`, no
/// admissibility check on the couplings.
pub fn ising_from_pseudo_boolean(graph: &WeightedGraph, couplings: &Couplings, k: Rational) -> Result<IsingModel> {
    if k <= int(0) {
        return Err(Error::InvalidInput(format!(
            "scaling factor k = {} must be positive",
            rational::format_exact(&k)
        )));
    }
    let mut coupling_list = Vec::with_capacity(graph.edges().len());
    for &(i, j) in graph.edges() {
        coupling_list.push((i, j, couplings.require(i, j)?));
    }
    let fields = (0..graph.n())
        .map(|i| {
            let neighbor_sum: Rational = graph
                .neighbors(i)
                .iter()
                .map(|&j| couplings.get(i, j).expect("checked above"))
                .sum();
            neighbor_sum - int(2) * graph.weight(i) / k
        })
        .collect();
    // energy = -4 Y + const, so one unit of -Y is four units of Ising energy
    IsingModel::new(graph.n(), fields, coupling_list, BitConvention::Plus)?.with_energy_unit(int(4))
}

/// `H_Ising = Σ h_i σ^z_i + Σ J_ij σ^z_i σ^z_j` with `h_i = Σ_{j∈nbr(i)} J_ij − 2c_i`.
/// Every coupling must strictly exceed `min(c_i, c_j)`.
pub fn mis_to_ising(graph: &WeightedGraph, couplings: &Couplings) -> Result<IsingModel> {
    scaled_ising(graph, couplings, int(1))
}

/// The scaled family `H_k`: weights `c_i / k`, couplings unchanged.
pub fn scaled_ising(graph: &WeightedGraph, couplings: &Couplings, k: Rational) -> Result<IsingModel> {
    if k <= int(0) {
        return Err(Error::InvalidInput(format!(
            "scaling factor k = {} must be positive",
            rational::format_exact(&k)
        )));
    }
    check_strict(graph, couplings, k)?;
    ising_from_pseudo_boolean(graph, couplings, k)
}

fn check_strict(graph: &WeightedGraph, couplings: &Couplings, k: Rational) -> Result<()> {
    for &(i, j) in graph.edges() {
        let value = couplings.require(i, j)?;
        let bound = graph.weight(i).min(graph.weight(j)) / k;
        if value <= bound {
            return Err(Error::NonStrictCoupling {
                i,
                j,
                value: rational::format_exact(&value),
                bound: rational::format_exact(&bound),
            });
        }
    }
    Ok(())
}

/// The vertex set encoded by a ground bitstring under the model's convention.
pub fn decode_ground_bitstring(model: &IsingModel, bits: &[u8]) -> Result<Vec<usize>> {
    check_len(model.n(), bits.len())?;
    let selected_bit = match model.convention() {
        BitConvention::Plus => 0,
        BitConvention::Minus => 1,
    };
    Ok((0..bits.len()).filter(|&i| bits[i] == selected_bit).collect())
}

/// Same as [`decode_ground_bitstring`] for a basis index.
pub fn decode_index(model: &IsingModel, index: u64) -> Vec<usize> {
    let bits = bits_of(index, model.n());
    decode_ground_bitstring(model, &bits).expect("length matches by construction")
}

/// Pseudo-boolean indicator (`x_i = 1` for selected vertices) of a basis index
/// under the plus convention.
pub fn indicator_of_index(index: u64, n: usize) -> Vec<u8> {
    (0..n).map(|i| u8::from((index >> i) & 1 == 0)).collect()
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{appendix_ec_graph, generate_ck, CkParams};

    fn ck(w_b: Rational) -> WeightedGraph {
        generate_ck(&CkParams::fifteen_vertex(w_b)).unwrap()
    }

    #[test]
    fn pseudo_boolean_examples() {
        let g = ck(Rational::new(9, 5));
        let j = Couplings::uniform(&g, int(2));
        let mut x = vec![0u8; 15];
        assert_eq!(pseudo_boolean_value(&g, &j, &x).unwrap(), int(0));
        x[..6].fill(1);
        assert_eq!(pseudo_boolean_value(&g, &j, &x).unwrap(), int(6));

        let pair = WeightedGraph::new(vec![int(2), int(3)], [(0, 1)]).unwrap();
        let jp = Couplings::uniform(&pair, int(5));
        assert_eq!(pseudo_boolean_value(&pair, &jp, &[1, 1]).unwrap(), int(2 + 3 - 5));
        assert!(pseudo_boolean_value(&pair, &Couplings::from_entries([]), &[1, 1]).is_err());
        assert!(pseudo_boolean_value(&pair, &jp, &[1]).is_err());
    }

    #[test]
    fn ck_fields_match_closed_form() {
        let g = ck(Rational::new(9, 5));
        let model = mis_to_ising(&g, &Couplings::uniform(&g, int(2))).unwrap();
        assert_eq!(model.fields()[0], int(10));
        assert_eq!(model.fields()[6], Rational::new(42, 5));
        assert_eq!(model.couplings().len(), 45);

        let scaled = scaled_ising(&g, &Couplings::uniform(&g, int(2)), int(10)).unwrap();
        assert_eq!(scaled.fields()[0], Rational::new(59, 5));
        let same = scaled_ising(&g, &Couplings::uniform(&g, int(2)), int(1)).unwrap();
        assert_eq!(same, model);
    }

    #[test]
    fn isolated_vertex_field() {
        let g = WeightedGraph::new(vec![Rational::new(3, 2)], []).unwrap();
        let model = mis_to_ising(&g, &Couplings::default_rule(&g)).unwrap();
        assert_eq!(model.fields(), &[int(-3)]);
        assert!(model.couplings().is_empty());
    }

    #[test]
    fn rejects_non_strict_and_bad_k() {
        let g = ck(Rational::new(9, 5));
        let err = mis_to_ising(&g, &Couplings::uniform(&g, Rational::new(9, 5))).unwrap_err();
        assert!(matches!(err, Error::NonStrictCoupling { .. }));
        assert!(scaled_ising(&g, &Couplings::uniform(&g, int(2)), int(0)).is_err());
        assert!(scaled_ising(&g, &Couplings::uniform(&g, int(2)), int(-3)).is_err());
    }

    #[test]
    fn default_rule_is_strict() {
        let g = appendix_ec_graph();
        assert_eq!(default_uniform_value(&g), int(4));
        assert!(mis_to_ising(&g, &Couplings::default_rule(&g)).is_ok());
        let ckg = ck(Rational::new(9, 5));
        assert_eq!(default_uniform_value(&ckg), int(3));
    }

    #[test]
    fn decoding_conventions() {
        let g = ck(Rational::new(9, 5));
        let model = mis_to_ising(&g, &Couplings::uniform(&g, int(2))).unwrap();
        let mut bits = vec![1u8; 15];
        bits[..6].fill(0);
        assert_eq!(decode_ground_bitstring(&model, &bits).unwrap(), (0..6).collect::<Vec<_>>());
        assert!(decode_ground_bitstring(&model, &[1u8; 15]).unwrap().is_empty());
        assert!(decode_ground_bitstring(&model, &[0u8; 3]).is_err());
        let flipped = model.to_opposite_convention();
        assert_eq!(decode_ground_bitstring(&flipped, &[1u8; 15]).unwrap().len(), 15);
    }
}
