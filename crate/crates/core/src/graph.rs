//! Vertex-weighted graphs, the CK family and the appendix exact-cover graph.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, int, Rational};

/// Undirected simple graph with positive rational vertex weights.
///
/// Vertices are 0-based. Edges are stored once, as `(i, j)` with `i < j`, in
/// lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedGraph {
    weights: Vec<Rational>,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    n: usize,
    #[serde(with = "rational::exact_vec")]
    weights: Vec<Rational>,
    edges: Vec<[usize; 2]>,
}

impl WeightedGraph {
    pub fn new(weights: Vec<Rational>, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let n = weights.len();
        if n == 0 {
            return Err(Error::InvalidInput("graph must have at least one vertex".into()));
        }
        if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !rational::is_positive(w)) {
            return Err(Error::InvalidInput(format!(
                "vertex {i} has non-positive weight {}",
                rational::format_exact(w)
            )));
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            for v in [a, b] {
                if v >= n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
            }
            if a == b {
                return Err(Error::InvalidInput(format!("self-loop on vertex {a}")));
            }
            if !set.insert((a.min(b), a.max(b))) {
                return Err(Error::InvalidInput(format!("duplicate edge ({a}, {b})")));
            }
        }
        let edges: Vec<_> = set.into_iter().collect();
        let mut adjacency = vec![Vec::new(); n];
        for &(i, j) in &edges {
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Self {
            weights,
            edges,
            adjacency,
        })
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> Rational {
        self.weights[i]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.n() && self.adjacency[i].binary_search(&j).is_ok()
    }

    pub fn degree(&self, i: usize) -> Result<usize> {
        if i >= self.n() {
            return Err(Error::VertexOutOfRange { vertex: i, n: self.n() });
        }
        Ok(self.adjacency[i].len())
    }

    pub fn total_weight(&self) -> Rational {
        self.weights.iter().sum()
    }

    /// Whether the vertex set (given as a 0-based list) is independent.
    pub fn is_independent(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(a, &i)| set[a + 1..].iter().all(|&j| !self.has_edge(i, j)))
    }

    pub fn set_weight(&self, set: &[usize]) -> Rational {
        set.iter().map(|&i| self.weights[i]).sum()
    }

    pub fn to_json(&self) -> Result<String> {
        let file = GraphFile {
            n: self.n(),
            weights: self.weights.clone(),
            edges: self.edges.iter().map(|&(i, j)| [i, j]).collect(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(text)?;
        if file.weights.len() != file.n {
            return Err(Error::DimensionMismatch {
                expected: file.n,
                got: file.weights.len(),
            });
        }
        Self::new(file.weights, file.edges.into_iter().map(|[i, j]| (i, j)))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn store(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }
}

/// Parameters of a CK graph: `g` cliques of size `r` plus a `2g`-vertex
/// independent set split into `g` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CkParams {
    pub r: usize,
    pub g: usize,
    #[serde(with = "rational::exact")]
    pub w_a: Rational,
    #[serde(with = "rational::exact")]
    pub w_b: Rational,
}

impl CkParams {
    pub fn new(r: usize, g: usize, w_a: Rational, w_b: Rational) -> Self {
        Self { r, g, w_a, w_b }
    }

    /// The 15-vertex instance (`r = g = 3`, `w_A = 1`) with the given `w_B`.
    pub fn fifteen_vertex(w_b: Rational) -> Self {
        Self::new(3, 3, int(1), w_b)
    }

    pub fn validate(&self) -> Result<()> {
        if self.r < 2 {
            return Err(Error::InvalidInput(format!("clique size r = {} must be at least 2", self.r)));
        }
        if self.g < 1 {
            return Err(Error::InvalidInput(format!("group count g = {} must be at least 1", self.g)));
        }
        if !rational::is_positive(&self.w_a) || !rational::is_positive(&self.w_b) {
            return Err(Error::InvalidInput("CK weights must be positive".into()));
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        2 * self.g + self.g * self.r
    }

    /// 0-based vertices of the planted independent set `V_A`.
    pub fn set_a(&self) -> Vec<usize> {
        (0..2 * self.g).collect()
    }

    /// 0-based vertices of clique `t`.
    pub fn clique(&self, t: usize) -> Vec<usize> {
        let start = 2 * self.g + t * self.r;
        (start..start + self.r).collect()
    }
}

/// Builds the CK graph. `V_A` occupies vertices `0..2g` (group `t` is
/// `{2t, 2t+1}`), clique `t` occupies `2g + t·r .. 2g + (t+1)·r`, and group `t`
/// is joined to every vertex of every clique except clique `t`.
pub fn generate_ck(params: &CkParams) -> Result<WeightedGraph> {
    params.validate()?;
    let (r, g) = (params.r, params.g);
    let mut weights = vec![params.w_a; 2 * g];
    weights.extend(std::iter::repeat(params.w_b).take(g * r));

    let mut edges = Vec::new();
    for t in 0..g {
        let clique = params.clique(t);
        for (a, &u) in clique.iter().enumerate() {
            for &v in &clique[a + 1..] {
                edges.push((u, v));
            }
        }
    }
    for group in 0..g {
        for label in (0..g).filter(|&l| l != group) {
            for a in [2 * group, 2 * group + 1] {
                for b in params.clique(label) {
                    edges.push((a, b));
                }
            }
        }
    }
    WeightedGraph::new(weights, edges)
}

/// The 7-vertex exact-cover graph of the worked example: vertex `i` is the set
/// of clauses containing `x_{i+1}`, weighted by its size, with an edge wherever
/// two sets share a clause.
pub fn appendix_ec_graph() -> WeightedGraph {
    let weights = [3, 3, 3, 2, 1, 2, 1].map(int).to_vec();
    // 1-based pairs sharing a clause
    let pairs = [
        (1, 2),
        (1, 3),
        (2, 3),
        (1, 4),
        (2, 4),
        (3, 4),
        (3, 5),
        (4, 5),
        (1, 6),
        (3, 6),
        (2, 6),
        (2, 7),
        (6, 7),
    ];
    WeightedGraph::new(weights, pairs.map(|(a, b)| (a - 1, b - 1))).expect("static graph is valid")
}
