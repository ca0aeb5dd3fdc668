//! Resolving the problem instance a command runs on.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::Serialize;

use gapscope_core::rational::{self, format_exact, parse_rational};
use gapscope_core::reductions::{mis_to_ising, scaled_ising};
use gapscope_core::{generate_ck, CkParams, Couplings, IsingModel, Rational, WeightedGraph};

/// Where the problem Hamiltonian comes from: a graph file, an Ising file, or
/// CK parameters (the default, with `--wb`).
#[derive(Debug, Clone, Args, Serialize)]
pub struct InstanceArgs {
    /// Weighted graph JSON file.
    #[arg(long, conflicts_with_all = ["ising", "wb"])]
    pub graph: Option<PathBuf>,

    /// Ising model JSON file (used as-is; `--j` and `--k` do not apply).
    #[arg(long, conflicts_with_all = ["wb", "j", "k"])]
    pub ising: Option<PathBuf>,

    /// CK graph: weight of the V_B vertices.
    #[arg(long)]
    pub wb: Option<String>,

    /// CK graph: clique size.
    #[arg(long = "ck-r", default_value_t = 3)]
    pub r: usize,

    /// CK graph: number of groups.
    #[arg(long = "ck-g", default_value_t = 3)]
    pub g: usize,

    /// CK graph: weight of the V_A vertices.
    #[arg(long, default_value = "1")]
    pub wa: String,

    /// Uniform coupling J, or "default" for the smallest-integer strict rule.
    /// CK instances default to J = 2, graph files to "default".
    #[arg(long)]
    pub j: Option<String>,

    /// Scaling factor k (weights divided by k).
    #[arg(long)]
    pub k: Option<String>,
}

pub struct Instance {
    pub label: String,
    /// Present unless the instance was given as an Ising file.
    pub graph: Option<(WeightedGraph, Couplings)>,
    pub k: Rational,
    pub model: IsingModel,
    pub inputs: Vec<PathBuf>,
}

impl InstanceArgs {
    pub fn resolve(&self) -> Result<Instance> {
        if let Some(path) = &self.ising {
            let model = IsingModel::load(path).with_context(|| format!("reading Ising model {}", path.display()))?;
            return Ok(Instance {
                label: path.display().to_string(),
                graph: None,
                k: rational::int(1),
                model,
                inputs: vec![path.clone()],
            });
        }
        let (label, graph, default_j, inputs) = match (&self.graph, &self.wb) {
            (Some(path), _) => {
                let graph =
                    WeightedGraph::load(path).with_context(|| format!("reading graph {}", path.display()))?;
                (path.display().to_string(), graph, None, vec![path.clone()])
            }
            (None, Some(wb)) => {
                let params = CkParams::new(self.r, self.g, parse_rational(&self.wa)?, parse_rational(wb)?);
                let graph = generate_ck(&params)?;
                let label = format!(
                    "ck-r{}-g{}-wa{}-wb{}",
                    self.r,
                    self.g,
                    format_exact(&params.w_a),
                    format_exact(&params.w_b)
                );
                (label, graph, Some(rational::int(2)), Vec::new())
            }
            (None, None) => bail!("no instance: pass --graph, --ising or --wb"),
        };
        let couplings = couplings_for(&graph, self.j.as_deref(), default_j)?;
        let k = match &self.k {
            Some(k) => parse_rational(k)?,
            None => rational::int(1),
        };
        let model = if k == rational::int(1) {
            mis_to_ising(&graph, &couplings)?
        } else {
            scaled_ising(&graph, &couplings, k)?
        };
        Ok(Instance {
            label,
            graph: Some((graph, couplings)),
            k,
            model,
            inputs,
        })
    }
}

/// `--j` value: a number, "default", or absent (then `fallback`, or the
/// default rule when there is none).
pub fn couplings_for(graph: &WeightedGraph, j: Option<&str>, fallback: Option<Rational>) -> Result<Couplings> {
    Ok(match (j, fallback) {
        (Some("default"), _) | (None, None) => Couplings::default_rule(graph),
        (Some(value), _) => Couplings::uniform(graph, parse_rational(value)?),
        (None, Some(value)) => Couplings::uniform(graph, value),
    })
}
