//! Spectral commands: `sweep`, `art-table`, `desev`, `debug diag-info`.

use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use gapscope_core::desev::{self, GammaOptions, Labeler, Tracking};
use gapscope_core::rational::{format_exact, to_f64};
use gapscope_core::spectra::{self, format_sig, ArtReport, SolverOptions, SweepOptions};
use gapscope_core::SystemHamiltonian;

use crate::instance::{Instance, InstanceArgs};
use crate::output::{precision, OutputDir};
use crate::Format;

#[derive(Debug, Clone, Args, Serialize)]
pub struct SolverArgs {
    /// Number of uniformly spaced s values.
    #[arg(long, default_value_t = spectra::DEFAULT_GRID_POINTS)]
    pub grid: usize,
    /// Restrict the grid to FROM,TO instead of [0, 1] (e.g. to zoom in on s*).
    #[arg(long, value_delimiter = ',', value_name = "FROM,TO")]
    pub s_range: Option<Vec<f64>>,
    /// Eigenpair residual tolerance, relative to max(1, ‖H(s)‖).
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Width to which s* and s′ are refined.
    #[arg(long, default_value_t = spectra::DEFAULT_S_TOL)]
    pub s_tol: f64,
    /// Seed for the eigensolver's random start vectors.
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
}

impl SolverArgs {
    fn grid(&self) -> Result<Vec<f64>> {
        Ok(match self.s_range.as_deref() {
            Some([from, to]) => spectra::grid_between(*from, *to, self.grid)?,
            Some(other) => bail!("--s-range takes two values FROM,TO, got {}", other.len()),
            None => spectra::uniform_grid(self.grid)?,
        })
    }

    fn sweep_options(&self) -> Result<SweepOptions> {
        if !(self.tol > 0.0 && self.tol < 1.0) {
            bail!("--tol must be in (0, 1), got {}", self.tol);
        }
        if !(self.s_tol > 0.0 && self.s_tol < 0.1) {
            bail!("--s-tol must be in (0, 0.1), got {}", self.s_tol);
        }
        Ok(SweepOptions {
            solver: SolverOptions {
                tol: self.tol,
                seed: self.seed,
                ..SolverOptions::default()
            },
            with_norm: true,
            s_tol: self.s_tol,
        })
    }
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Format of the report printed to stdout.
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

fn k_value(inst: &Instance) -> Option<f64> {
    inst.graph.as_ref().map(|_| to_f64(&inst.k))
}

pub fn sweep(args: &SweepArgs) -> Result<()> {
    let inst = args.instance.resolve()?;
    let opts = args.solver.sweep_options()?;
    let digits = precision()?;
    let out = OutputDir::create(&args.out, "sweep", args, &inst.inputs)?;
    let h = SystemHamiltonian::build(&inst.model)?;
    let grid = args.solver.grid()?;
    let analysis = spectra::analyze(&h, &grid, &opts, k_value(&inst))?;
    out.write("sweep.csv", &spectra::sweep_csv(&analysis.points, digits))?;
    out.write_json("art.json", &analysis.report)?;
    let row = TableRow::new(&inst, analysis.report);
    print!("{}", render_table(std::slice::from_ref(&row), args.format, digits)?);
    Ok(())
}

#[derive(Debug, Args, Serialize)]
pub struct ArtTableArgs {
    /// Graph file (instead of CK graphs).
    #[arg(long, conflicts_with = "wb")]
    pub graph: Option<PathBuf>,
    /// Comma-separated CK V_B weights.
    #[arg(long, value_delimiter = ',')]
    pub wb: Vec<String>,
    #[arg(long = "ck-r", default_value_t = 3)]
    pub r: usize,
    #[arg(long = "ck-g", default_value_t = 3)]
    pub g: usize,
    #[arg(long, default_value = "1")]
    pub wa: String,
    /// Uniform coupling J, or "default".
    #[arg(long)]
    pub j: Option<String>,
    /// Comma-separated scaling factors.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub k: Vec<String>,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

/// One ART report with the instance it belongs to.
#[derive(Debug, Clone, Serialize)]
pub struct TableRow {
    pub instance: String,
    /// Exact scaling factor; the report's `k` is its float value.
    pub scaling: String,
    #[serde(flatten)]
    pub report: ArtReport,
}

impl TableRow {
    fn new(inst: &Instance, report: ArtReport) -> Self {
        Self {
            instance: inst.label.clone(),
            scaling: format_exact(&inst.k),
            report,
        }
    }
}

const TABLE_COLUMNS: [&str; 13] = [
    "s_star",
    "g_min",
    "mat_at_s_star",
    "max_mat",
    "max_norm",
    "art1",
    "art2",
    "art3",
    "s_prime",
    "g_at_s_prime",
    "mat_at_s_prime",
    "boundary_minimum",
    "max_mat_s",
];

pub fn render_table(rows: &[TableRow], format: Format, digits: usize) -> Result<String> {
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(rows)? + "\n",
        Format::Csv => {
            let mut out = format!("instance,k,{}\n", TABLE_COLUMNS.join(","));
            for row in rows {
                let r = &row.report;
                let f = |x: f64| format_sig(x, digits);
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                    row.instance,
                    row.scaling,
                    f(r.s_star),
                    f(r.g_min),
                    f(r.mat_at_s_star),
                    f(r.max_mat),
                    f(r.max_norm),
                    f(r.art1),
                    f(r.art2),
                    f(r.art3),
                    f(r.s_prime),
                    f(r.g_at_s_prime),
                    f(r.mat_at_s_prime),
                    r.boundary_minimum,
                    f(r.max_mat_s),
                ));
            }
            out
        }
    })
}

pub fn art_table(args: &ArtTableArgs) -> Result<()> {
    let opts = args.solver.sweep_options()?;
    let digits = precision()?;
    let mut specs = Vec::new();
    let weights: Vec<Option<String>> = if args.graph.is_some() {
        vec![None]
    } else if args.wb.is_empty() {
        bail!("pass --graph or at least one --wb value");
    } else {
        args.wb.iter().cloned().map(Some).collect()
    };
    for wb in &weights {
        for k in &args.k {
            specs.push(InstanceArgs {
                graph: args.graph.clone(),
                ising: None,
                wb: wb.clone(),
                r: args.r,
                g: args.g,
                wa: args.wa.clone(),
                j: args.j.clone(),
                k: Some(k.clone()),
            });
        }
    }
    let instances = specs.iter().map(InstanceArgs::resolve).collect::<Result<Vec<_>>>()?;
    let inputs: Vec<PathBuf> = args.graph.iter().cloned().collect();
    let out = OutputDir::create(&args.out, "art-table", args, &inputs)?;
    let grid = args.solver.grid()?;
    let results = instances
        .par_iter()
        .map(|inst| -> Result<(TableRow, String)> {
            let h = SystemHamiltonian::build(&inst.model)?;
            let analysis = spectra::analyze(&h, &grid, &opts, k_value(inst))?;
            Ok((
                TableRow::new(inst, analysis.report),
                spectra::sweep_csv(&analysis.points, digits),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(results.len());
    for (i, (row, csv)) in results.into_iter().enumerate() {
        out.write(&format!("sweeps/{i:02}_{}.csv", file_stem(&row)), &csv)?;
        rows.push(row);
    }
    let table = render_table(&rows, args.format, digits)?;
    let name = match args.format {
        Format::Csv => "art_table.csv",
        Format::Json => "art_table.json",
    };
    out.write(name, &table)?;
    print!("{table}");
    Ok(())
}

fn file_stem(row: &TableRow) -> String {
    let label = format!("{}-k{}", row.instance, row.scaling);
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrackingArg {
    /// Always the n-th lowest eigenvector.
    Index,
    /// Follow the eigenvector with the largest overlap with the previous one.
    Overlap,
}

#[derive(Debug, Args, Serialize)]
pub struct DesevArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Eigenstate to trace (0 = ground).
    #[arg(long, default_value_t = 0)]
    pub eigenstate: usize,
    /// Number of lowest levels shown; the rest go to the "other" column.
    #[arg(long, default_value_t = desev::DEFAULT_TOP_LEVELS)]
    pub levels: usize,
    #[arg(long, value_enum, default_value = "index")]
    pub tracking: TrackingArg,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn desev(args: &DesevArgs) -> Result<()> {
    let inst = args.instance.resolve()?;
    let sweep = args.solver.sweep_options()?;
    let digits = precision()?;
    let out = OutputDir::create(&args.out, "desev", args, &inst.inputs)?;
    let h = SystemHamiltonian::build(&inst.model)?;
    let labeler = match &inst.graph {
        Some((graph, couplings)) => Labeler::PseudoBoolean {
            graph,
            couplings,
            k: inst.k,
        },
        None => Labeler::Energy,
    };
    let table = desev::group_levels(&h, labeler)?;
    let grid = args.solver.grid()?;
    let opts = GammaOptions {
        eigenstate: args.eigenstate,
        top_levels: args.levels,
        tracking: match args.tracking {
            TrackingArg::Index => Tracking::IndexOrdered,
            TrackingArg::Overlap => Tracking::Overlap,
        },
        solver: sweep.solver,
    };
    let trace = desev::gamma_trace(&h, &table, &grid, &opts)?;
    out.write("desev.csv", &desev::gamma_csv(&trace, &table, digits))?;
    out.write_json("desev_meta.json", &desev::gamma_metadata(&trace, &table))?;
    println!("{}", out.path("desev.csv").display());
    Ok(())
}

pub fn diag_info(args: &InstanceArgs) -> Result<()> {
    let inst = args.resolve()?;
    let h = SystemHamiltonian::build(&inst.model)?;
    let diag = h.diag_scaled();
    let (lo, hi) = diag
        .iter()
        .fold((i64::MAX, i64::MIN), |(lo, hi), &d| (lo.min(d), hi.max(d)));
    let mut hasher = Sha256::new();
    for d in diag {
        hasher.update(d.to_le_bytes());
    }
    let den = h.denominator();
    let info = json!({
        "instance": inst.label,
        "n": h.n(),
        "dim": h.dim(),
        "denominator": den,
        "min": format_exact(&gapscope_core::Rational::new(lo, den)),
        "max": format_exact(&gapscope_core::Rational::new(hi, den)),
        "argmin_count": diag.iter().filter(|&&d| d == lo).count(),
        "problem_norm": h.problem_norm(),
        "diag_sha256": hex::encode(hasher.finalize()),
    });
    println!("{}", serde_json::to_string_pretty(&info)?);
    Ok(())
}
