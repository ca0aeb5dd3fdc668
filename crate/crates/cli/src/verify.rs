//! `verify`: oracle cross-checks on a single instance.

use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use gapscope_core::desev::{self, GammaOptions, Labeler};
use gapscope_core::oracle::{self, DENSE_LIMIT, ENUMERATION_LIMIT};
use gapscope_core::rational::{format_exact, int};
use gapscope_core::spectra::{self, SolverOptions};
use gapscope_core::SystemHamiltonian;

use crate::instance::{Instance, InstanceArgs};
use crate::output::OutputDir;
use crate::{Format, NumericalFailure};

/// Largest instance whose iterative spectrum is checked.
const SPECTRAL_LIMIT: usize = 16;
/// Dense comparisons are only worth their cost up to this size.
const DENSE_CHECK_LIMIT: usize = 10;

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// Also write the report (and config.json) here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Seed for random test vectors.
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Serialize)]
struct Report {
    instance: String,
    n: usize,
    passed: bool,
    checks: Vec<Check>,
}

fn check(name: &'static str, passed: bool, detail: impl Into<String>) -> Check {
    Check {
        name,
        passed,
        detail: detail.into(),
    }
}

pub fn verify(args: &VerifyArgs) -> Result<()> {
    let inst = args.instance.resolve()?;
    let checks = run_checks(&inst, args.seed)?;
    let report = Report {
        instance: inst.label.clone(),
        n: inst.model.n(),
        passed: checks.iter().all(|c| c.passed),
        checks,
    };
    let text = match args.format {
        Format::Json => serde_json::to_string_pretty(&report)? + "\n",
        Format::Csv => {
            let mut s = String::from("check,passed,detail\n");
            for c in &report.checks {
                s.push_str(&format!("{},{},\"{}\"\n", c.name, c.passed, c.detail.replace('"', "'")));
            }
            s
        }
    };
    if let Some(dir) = &args.out {
        let out = OutputDir::create(dir, "verify", args, &inst.inputs)?;
        let name = match args.format {
            Format::Json => "verify.json",
            Format::Csv => "verify.csv",
        };
        out.write(name, &text)?;
    }
    print!("{text}");
    if report.passed {
        Ok(())
    } else {
        let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
        Err(NumericalFailure(format!("failed checks: {}", failed.join(", "))).into())
    }
}

pub fn run_checks(inst: &Instance, seed: u64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let n = inst.model.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    if n <= ENUMERATION_LIMIT {
        let ising = oracle::brute_force_ising_min(&inst.model)?;
        if let Some((graph, couplings)) = &inst.graph {
            let mis = oracle::brute_force_mis(graph)?;
            if inst.k == int(1) {
                let pb = oracle::max_pseudo_boolean(graph, couplings)?;
                checks.push(check(
                    "pseudo-boolean-max-equals-mis",
                    pb.optimum == mis.optimum && pb.optimizers == mis.optimizers,
                    format!(
                        "max Y = {}, MIS weight = {}",
                        format_exact(&pb.optimum),
                        format_exact(&mis.optimum)
                    ),
                ));
            }
            let mut decoded = ising.decoded.clone();
            decoded.sort();
            let mut expected = mis.optimizers.clone();
            expected.sort();
            checks.push(check(
                "ising-ground-decodes-to-mis",
                decoded == expected,
                format!("{} ground state(s), {} maximum set(s)", decoded.len(), expected.len()),
            ));
        }
        let h = SystemHamiltonian::build(&inst.model)?;
        let lowest = h.diag_scaled().iter().min().copied().unwrap_or_default();
        let minimum = gapscope_core::Rational::new(lowest, h.denominator());
        checks.push(check(
            "diagonal-minimum-matches-enumeration",
            minimum == ising.minimum,
            format!("diag min {}, enumerated {}", format_exact(&minimum), format_exact(&ising.minimum)),
        ));
    }

    if n > SPECTRAL_LIMIT {
        checks.push(check("spectral-checks", true, format!("skipped: n = {n} > {SPECTRAL_LIMIT}")));
        return Ok(checks);
    }
    let h = SystemHamiltonian::build(&inst.model)?;
    let dim = h.dim();
    let opts = SolverOptions::default();

    if n <= DENSE_CHECK_LIMIT.min(DENSE_LIMIT) {
        let s = 0.37;
        let dense = oracle::dense_hamiltonian(&h, s)?;
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut w = vec![0.0; dim];
        h.apply_h(s, &v, &mut w)?;
        let reference: Vec<f64> = (0..dim)
            .map(|i| (0..dim).map(|j| dense[(i, j)] * v[j]).sum())
            .collect();
        let err = w.iter().zip(reference.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let scale = reference.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        checks.push(check(
            "matvec-matches-dense",
            err <= 1e-12 * scale,
            format!("max deviation {err:.2e}"),
        ));
        let mut worst = 0.0f64;
        for s in [0.25, 0.5, 0.75] {
            let eig = spectra::lowest_eigenpairs_with(&h, s, 2.min(dim), &opts, None)?;
            let reference = oracle::dense_eigs(&h, s)?;
            for (a, b) in eig.values.iter().zip(&reference.values) {
                worst = worst.max((a - b).abs());
            }
        }
        checks.push(check(
            "iterative-matches-dense",
            worst <= 1e-10,
            format!("max eigenvalue deviation {worst:.2e}"),
        ));
    } else {
        let s = 0.5;
        let eig = spectra::lowest_eigenpairs_with(&h, s, 2, &opts, None)?;
        let mut lowest_rayleigh = f64::INFINITY;
        let mut w = vec![0.0; dim];
        for _ in 0..8 {
            let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm2: f64 = v.iter().map(|x| x * x).sum();
            h.apply_h(s, &v, &mut w)?;
            let rq: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() / norm2;
            lowest_rayleigh = lowest_rayleigh.min(rq);
        }
        let residual = eig.residuals.iter().fold(0.0f64, |m, &r| m.max(r));
        checks.push(check(
            "variational-bound",
            eig.values[0] <= lowest_rayleigh,
            format!("E0 = {:.12}, lowest random Rayleigh quotient {lowest_rayleigh:.6}", eig.values[0]),
        ));
        checks.push(check(
            "eigen-residuals",
            residual <= opts.tol * (0.5 * h.problem_norm() + 0.5 * n as f64).max(1.0),
            format!("max residual {residual:.2e}"),
        ));
    }

    if dim >= 2 {
        // Where E_1 lies outside E_0's symmetry sector both forms are pure
        // rounding (≈1e-13); a relative comparison there is meaningless.
        const FLOOR: f64 = 1e-9;
        let mut worst = 0.0f64;
        let (mut compared, mut at_floor) = (0, 0);
        for s in [0.3, 0.6, 0.9] {
            let eig = spectra::lowest_eigenpairs_with(&h, s, 2, &opts, None)?;
            let m = spectra::matrix_element(&h, &eig)?;
            let alt = m.alt.expect("s > 0");
            if eig.gap() <= 1e-6 || m.degenerate {
                continue;
            }
            if m.value.max(alt) < FLOOR {
                at_floor += 1;
                continue;
            }
            worst = worst.max((m.value - alt).abs() / m.value.max(alt));
            compared += 1;
        }
        checks.push(check(
            "matrix-element-identity",
            worst <= 1e-8,
            format!("{compared} point(s) compared, {at_floor} at rounding level, worst relative difference {worst:.2e}"),
        ));
    }

    let labeler = match &inst.graph {
        Some((graph, couplings)) => Labeler::PseudoBoolean {
            graph,
            couplings,
            k: inst.k,
        },
        None => Labeler::Energy,
    };
    let table = desev::group_levels(&h, labeler)?;
    let top = table.levels().len();
    let trace = desev::gamma_trace(
        &h,
        &table,
        &[0.0, 0.5, 1.0],
        &GammaOptions {
            top_levels: top,
            ..GammaOptions::default()
        },
    )?;
    let uniform = table.uniform_weights();
    let s0_err = trace.values[0]
        .iter()
        .zip(&uniform)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let sum_err = trace
        .values
        .iter()
        .map(|row| (row.iter().sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max);
    let s1_ground = trace.values[2][0];
    checks.push(check(
        "gamma-normalization",
        sum_err <= 1e-10,
        format!("max |Σ Γ − 1| = {sum_err:.2e}"),
    ));
    checks.push(check(
        "gamma-uniform-at-s0",
        s0_err <= 1e-12,
        format!("max deviation from |D_k|/2^n = {s0_err:.2e}"),
    ));
    checks.push(check(
        "gamma-ground-level-at-s1",
        (s1_ground - 1.0).abs() <= 1e-10,
        format!("Γ(lowest level) at s = 1 is {s1_ground:.12}"),
    ));
    Ok(checks)
}
