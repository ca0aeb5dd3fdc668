//! Acceptance suite: one PASS/FAIL line per criterion, with the individual
//! comparisons indented above it. Exits non-zero if any criterion fails.
//!
//! Runs without the libtest harness so the report is always printed; the
//! full-resolution sweeps are shared between criteria.

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gapscope_core::desev::{self, GammaOptions, GammaTrace, Labeler, LevelTable};
use gapscope_core::oracle;
use gapscope_core::rational::{int, parse_rational, to_f64};
use gapscope_core::reductions::{
    appendix_ec_instance, ay_hamiltonian, bits_of, ec3_to_1in3sat, ec_to_mis, mis_to_ising, scaled_ising,
};
use gapscope_core::spectra::{self, Analysis, SolverOptions, SweepOptions};
use gapscope_core::{generate_ck, CkParams, Couplings, Rational, SystemHamiltonian, WeightedGraph};
use gapscope_validation::{
    GAP_VS_WEIGHT, SCALING, EXAMPLE_CLAUSE_COUNTS, EXAMPLE_COVER, EXAMPLE_COVER_WEIGHT,
};

// Pinned tolerances.
const GRID_POINTS: usize = 401;
const C1_GAP_REL: f64 = 0.02;
const C1_SMALL_GAP: f64 = 1e-6;
const C1_SMALL_GAP_FACTOR: f64 = 1.5;
const C1_S_STAR_ABS: f64 = 5e-4;
const C2_S_STAR_ABS: f64 = 1e-6;
const C2_REL: f64 = 0.02;
const C2_ART_REL: f64 = 0.05;
const C2_TINY_FROM_K: i64 = 30;
const C2_TINY_FACTOR: f64 = 2.0;
const C3_LOW: f64 = 0.1;
const C3_DROP: f64 = 0.05;
const C4_GRAPHS: usize = 200;
const C4_MAX_N: usize = 14;
const C5_MIN_GAP: f64 = 1e-6;
const C5_REL: f64 = 1e-8;
const C7_INSTANCES: usize = 50;
const C7_MAX_N: usize = 10;
const C7_ABS: f64 = 1e-10;
const C8_SUM_ABS: f64 = 1e-10;
const C8_UNIFORM_ABS: f64 = 1e-12;
const C8_GRID_POINTS: usize = 101;
const C9_ABS: f64 = 1e-12;
const CK_COUPLING: i64 = 2;

type Detail = Vec<String>;

struct Outcome {
    pass: bool,
    summary: String,
    details: Detail,
}

struct Instance {
    graph: WeightedGraph,
    couplings: Couplings,
    k: Rational,
    h: SystemHamiltonian,
}

fn ck_instance(w_b: &str, k: i64) -> Instance {
    let graph = generate_ck(&CkParams::fifteen_vertex(parse_rational(w_b).unwrap())).unwrap();
    let couplings = Couplings::uniform(&graph, int(CK_COUPLING));
    let model = scaled_ising(&graph, &couplings, int(k)).unwrap();
    let h = SystemHamiltonian::build(&model).unwrap();
    Instance {
        graph,
        couplings,
        k: int(k),
        h,
    }
}

/// Full-resolution analyses, computed once per `(w_B, k)`.
#[derive(Default)]
struct Sweeps {
    done: HashMap<(String, i64), Analysis>,
}

impl Sweeps {
    fn get(&mut self, w_b: &str, k: i64) -> &Analysis {
        self.done.entry((w_b.to_string(), k)).or_insert_with(|| {
            let inst = ck_instance(w_b, k);
            let grid = spectra::uniform_grid(GRID_POINTS).unwrap();
            let t = Instant::now();
            let a = spectra::analyze(&inst.h, &grid, &SweepOptions::default(), Some(k as f64)).unwrap();
            eprintln!("    (swept w_B = {w_b}, k = {k} in {:.1?})", t.elapsed());
            a
        })
    }
}

fn rel(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs()
}

fn factor(got: f64, want: f64) -> f64 {
    (got / want).max(want / got)
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "ok  "
    } else {
        "MISS"
    }
}

/// Records one comparison; returns whether it held.
fn compare(details: &mut Detail, ok: bool, line: String) -> bool {
    details.push(format!("{} {line}", mark(ok)));
    ok
}

fn gap_vs_weight(sweeps: &mut Sweeps) -> Outcome {
    let start = Instant::now();
    let mut d = Detail::new();
    let mut all = true;
    for row in GAP_VS_WEIGHT {
        let m = &sweeps.get(row.w_b, 1).min;
        let gap_ok = if row.g_min >= C1_SMALL_GAP {
            rel(m.g_min, row.g_min) <= C1_GAP_REL
        } else {
            factor(m.g_min, row.g_min) <= C1_SMALL_GAP_FACTOR
        };
        let s_ok = (m.s_star - row.s_star).abs() <= C1_S_STAR_ABS;
        all &= compare(
            &mut d,
            gap_ok && s_ok,
            format!(
                "w_B = {}: s* = {:.6} (ref {}), g_min = {:.4e} (ref {:.2e})",
                row.w_b, m.s_star, row.s_star, m.g_min, row.g_min
            ),
        );
    }
    d.push(format!("     elapsed (including shared sweeps) {:.1?}", start.elapsed()));
    Outcome {
        pass: all,
        summary: "minimum gap and position versus w_B (k = 1)".into(),
        details: d,
    }
}

fn scaling_table(sweeps: &mut Sweeps) -> Outcome {
    let mut d = Detail::new();
    let mut all = true;
    for row in SCALING {
        let r = &sweeps.get("1.8", row.k).report;
        let tiny = row.k >= C2_TINY_FROM_K;
        let mut line = |name: &str, got: f64, want: f64, ok: bool| {
            compare(&mut d, ok, format!("k = {:2} {name:>14}: {got:.8e} vs {want:.3e}", row.k))
        };
        let mut ok = true;
        ok &= line("s*", r.s_star, row.s_star, (r.s_star - row.s_star).abs() <= C2_S_STAR_ABS);
        ok &= line("g_min", r.g_min, row.g_min, rel(r.g_min, row.g_min) <= C2_REL);
        let mat_star_ok = if tiny {
            factor(r.mat_at_s_star, row.mat_at_s_star) <= C2_TINY_FACTOR
        } else {
            rel(r.mat_at_s_star, row.mat_at_s_star) <= C2_REL
        };
        ok &= line("M(s*)", r.mat_at_s_star, row.mat_at_s_star, mat_star_ok);
        ok &= line("max M", r.max_mat, row.max_mat, rel(r.max_mat, row.max_mat) <= C2_REL);
        ok &= line("max ||H||", r.max_norm, row.max_norm, rel(r.max_norm, row.max_norm) <= C2_REL);
        ok &= line("s'", r.s_prime, row.s_prime, rel(r.s_prime, row.s_prime) <= C2_REL);
        ok &= line("g(s')", r.g_at_s_prime, row.g_at_s_prime, rel(r.g_at_s_prime, row.g_at_s_prime) <= C2_REL);
        ok &= line("M(s')", r.mat_at_s_prime, row.mat_at_s_prime, rel(r.mat_at_s_prime, row.mat_at_s_prime) <= C2_REL);
        ok &= line("ART1", r.art1, row.art1, rel(r.art1, row.art1) <= C2_ART_REL);
        let art2_ok = if tiny {
            factor(r.art2, row.art2) <= C2_TINY_FACTOR
        } else {
            rel(r.art2, row.art2) <= C2_ART_REL
        };
        ok &= line("ART2", r.art2, row.art2, art2_ok);
        ok &= line("ART3", r.art3, row.art3, rel(r.art3, row.art3) <= C2_ART_REL);
        let ratio = r.mat_at_s_prime / (r.g_at_s_prime * r.g_at_s_prime);
        // informational: the table's M/g² column is not itself a criterion
        d.push(format!(
            "     k = {:2} M(s')/g(s')² = {ratio:.4e} (ref {:.2e}); max M attained at s = {:.6}",
            row.k, row.ratio_at_s_prime, r.max_mat_s
        ));
        all &= ok;
    }
    Outcome {
        pass: all,
        summary: "running-time ingredients of the scaled family (w_B = 1.8)".into(),
        details: d,
    }
}

fn labeler(inst: &Instance) -> Labeler<'_> {
    Labeler::PseudoBoolean {
        graph: &inst.graph,
        couplings: &inst.couplings,
        k: inst.k,
    }
}

/// Ground-state Γ of the solution level (the lowest problem level) on `grid`.
fn solution_gamma(w_b: &str, k: i64, grid: &[f64]) -> (Vec<f64>, String) {
    let inst = ck_instance(w_b, k);
    let table = desev::group_levels(&inst.h, labeler(&inst)).unwrap();
    let trace = desev::gamma_trace(&inst.h, &table, grid, &GammaOptions::default()).unwrap();
    let label = gapscope_core::rational::format_exact(&table.levels()[0].label);
    (trace.column(0), label)
}

fn desev_shapes() -> Outcome {
    let mut d = Detail::new();
    let mut all = true;

    let (g, label) = solution_gamma("1.5", 1, &[0.4, 0.8]);
    all &= compare(&mut d, g[0] > 0.4, format!("w_B = 1.5, k = 1: Γ(level {label}) at s = 0.4 is {:.4} (> 0.4)", g[0]));
    all &= compare(&mut d, g[1] > 0.95, format!("w_B = 1.5, k = 1: Γ(level {label}) at s = 0.8 is {:.4} (> 0.95)", g[1]));

    let (g, label) = solution_gamma("1.8", 1, &[0.6, 0.7]);
    all &= compare(&mut d, g[0] < C3_LOW, format!("w_B = 1.8, k = 1: Γ(level {label}) at s = 0.6 is {:.4e} (< {C3_LOW})", g[0]));
    all &= compare(&mut d, g[1] > 0.9, format!("w_B = 1.8, k = 1: Γ(level {label}) at s = 0.7 is {:.4} (> 0.9)", g[1]));

    let grid = spectra::uniform_grid(GRID_POINTS).unwrap();
    let (g, label) = solution_gamma("1.8", 10, &grid);
    let mut running = f64::NEG_INFINITY;
    let mut worst_drop = 0.0f64;
    for (s, v) in grid.iter().zip(&g) {
        if *s >= 0.5 {
            running = running.max(*v);
            worst_drop = worst_drop.max(running - v);
        }
    }
    let half = grid.iter().position(|&s| s >= 0.5).unwrap();
    let rises = g[grid.len() - 1] > g[half];
    all &= compare(
        &mut d,
        worst_drop <= C3_DROP && rises,
        format!(
            "w_B = 1.8, k = 10: Γ(level {label}) {:.4} at s = 0.5 → {:.4} at s = 1, largest drop after s = 0.5 is {worst_drop:.2e} (≤ {C3_DROP})",
            g[half],
            g[grid.len() - 1]
        ),
    );
    Outcome {
        pass: all,
        summary: "qualitative DESEV shapes".into(),
        details: d,
    }
}

fn random_strict_instance(rng: &mut ChaCha8Rng, max_n: usize) -> (WeightedGraph, Couplings) {
    let n = rng.gen_range(1..=max_n);
    let weights: Vec<Rational> = (0..n).map(|_| Rational::new(rng.gen_range(1..=8), 2)).collect();
    let density = rng.gen_range(0.1..0.9);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density) {
                edges.push((i, j));
            }
        }
    }
    let graph = WeightedGraph::new(weights, edges).unwrap();
    let entries: Vec<_> = graph
        .edges()
        .iter()
        .map(|&(i, j)| (i, j, graph.weight(i).min(graph.weight(j)) + Rational::new(rng.gen_range(1..=8), 4)))
        .collect();
    (graph, Couplings::from_entries(entries))
}

fn pseudo_boolean_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut failures = 0;
    let mut d = Detail::new();
    for case in 0..C4_GRAPHS {
        let (g, c) = random_strict_instance(&mut rng, C4_MAX_N);
        let mis = oracle::brute_force_mis(&g).unwrap();
        let pb = oracle::max_pseudo_boolean(&g, &c).unwrap();
        let ground = oracle::brute_force_ising_min(&mis_to_ising(&g, &c).unwrap()).unwrap();
        let mut expected = mis.optimizers.clone();
        expected.sort();
        let mut maximizers = pb.optimizers.clone();
        maximizers.sort();
        let mut decoded = ground.decoded.clone();
        decoded.sort();
        let each_is_mis = maximizers
            .iter()
            .all(|set| g.is_independent(set) && g.set_weight(set) == mis.optimum);
        if pb.optimum != mis.optimum || maximizers != expected || decoded != expected || !each_is_mis {
            failures += 1;
            d.push(format!("MISS graph #{case}: n = {}, {} edges", g.n(), g.edges().len()));
        }
    }
    d.push(format!("     {C4_GRAPHS} graphs with n ≤ {C4_MAX_N}, {failures} failure(s)"));
    Outcome {
        pass: failures == 0,
        summary: "pseudo-boolean maximum equals maximum-weight independent set".into(),
        details: d,
    }
}

fn matrix_element_identity(sweeps: &mut Sweeps) -> Outcome {
    let mut d = Detail::new();
    let mut all = true;
    for k in [1, 10] {
        let points = &sweeps.get("1.8", k).points;
        let (mut compared, mut failed) = (0, 0);
        let mut worst = 0.0f64;
        let mut largest_failing = 0.0f64;
        for p in points.iter().filter(|p| p.gap > C5_MIN_GAP) {
            let Some(alt) = p.mat_alt else { continue };
            compared += 1;
            // exact agreement (including 0 = 0 at s = 1) has no relative error
            let r = if p.mat == alt { 0.0 } else { (p.mat - alt).abs() / p.mat.max(alt) };
            worst = worst.max(r);
            if !(r <= C5_REL) {
                failed += 1;
                largest_failing = largest_failing.max(p.mat.max(alt));
            }
        }
        let ok = failed == 0;
        all &= ok;
        let mut line = format!("k = {k}: {compared} points with g > {C5_MIN_GAP:e}, {failed} beyond {C5_REL:e} relative");
        if failed > 0 {
            line += &format!(
                " (largest M among them {largest_failing:.2e}: both forms at rounding level)"
            );
        } else {
            line += &format!(", worst {worst:.2e}");
        }
        compare(&mut d, ok, line);
    }
    Outcome {
        pass: all,
        summary: "matrix element equals |⟨E1|H_init|E0⟩|/s along the sweep".into(),
        details: d,
    }
}

fn worked_example() -> Outcome {
    let mut d = Detail::new();
    let inst = appendix_ec_instance();
    let graph = ec_to_mis(&inst).unwrap();
    let model = mis_to_ising(&graph, &Couplings::default_rule(&graph)).unwrap();
    let ground = oracle::brute_force_ising_min(&model).unwrap();
    let mut all = compare(
        &mut d,
        ground.decoded == vec![EXAMPLE_COVER.to_vec()],
        format!("ground state decodes to {:?} (0-based)", ground.decoded),
    );
    all &= compare(
        &mut d,
        graph.set_weight(&EXAMPLE_COVER) == int(EXAMPLE_COVER_WEIGHT),
        format!("weight {}", gapscope_core::rational::format_exact(&graph.set_weight(&EXAMPLE_COVER))),
    );
    let ay = ay_hamiltonian(&inst).unwrap();
    all &= compare(&mut d, ay.clause_counts == EXAMPLE_CLAUSE_COUNTS, format!("B = {:?}", ay.clause_counts));
    let i23 = ay.pair_counts.iter().find(|p| (p.0, p.1) == (1, 2)).map(|p| p.2);
    all &= compare(&mut d, i23 == Some(1), format!("I_23 = {i23:?}"));
    let sums_ok = ay.clause_counts.iter().enumerate().all(|(i, &b)| {
        ay.pair_counts.iter().filter(|p| p.0 == i || p.1 == i).map(|p| p.2).sum::<i64>() == 2 * b
    });
    all &= compare(&mut d, sums_ok, "Σ_j I_ij = 2 B_i for every i".into());
    Outcome {
        pass: all,
        summary: "exact-cover worked example end to end".into(),
        details: d,
    }
}

fn dense_agreement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    let mut d = Detail::new();
    for _ in 0..C7_INSTANCES {
        let (g, c) = random_strict_instance(&mut rng, C7_MAX_N);
        let k = int(rng.gen_range(1..=5));
        let h = SystemHamiltonian::build(&scaled_ising(&g, &c, k).unwrap()).unwrap();
        let s = rng.gen_range(0.0..1.0);
        let q = 2.min(h.dim());
        let eig = spectra::lowest_eigenpairs_with(&h, s, q, &SolverOptions::default(), None).unwrap();
        let dense = oracle::dense_eigs(&h, s).unwrap();
        for l in 0..q {
            worst = worst.max((eig.values[l] - dense.values[l]).abs());
        }
    }
    let ok = worst <= C7_ABS;
    compare(&mut d, ok, format!("{C7_INSTANCES} instances, n ≤ {C7_MAX_N}: worst deviation {worst:.2e}"));
    Outcome {
        pass: ok,
        summary: "iterative eigenvalues match dense diagonalization".into(),
        details: d,
    }
}

fn gamma_limits() -> Outcome {
    let mut d = Detail::new();
    let mut all = true;
    let grid = spectra::uniform_grid(C8_GRID_POINTS).unwrap();
    for (w_b, k) in [("1.8", 1), ("1.8", 10), ("1.5", 1)] {
        let inst = ck_instance(w_b, k);
        let table: LevelTable = desev::group_levels(&inst.h, labeler(&inst)).unwrap();
        let opts = GammaOptions {
            top_levels: table.levels().len(),
            ..GammaOptions::default()
        };
        let trace: GammaTrace = desev::gamma_trace(&inst.h, &table, &grid, &opts).unwrap();
        let sum_err = trace
            .values
            .iter()
            .map(|row| (row.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max);
        let uniform_err = trace.values[0]
            .iter()
            .zip(table.uniform_weights())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let last = &trace.values[grid.len() - 1];
        let minimizer = table
            .levels()
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.energy.cmp(&b.1.energy))
            .unwrap()
            .0;
        let elsewhere: f64 = last.iter().enumerate().filter(|&(i, _)| i != minimizer).map(|(_, v)| v).sum();
        let ok = sum_err <= C8_SUM_ABS && uniform_err <= C8_UNIFORM_ABS && (last[minimizer] - 1.0).abs() <= C8_SUM_ABS;
        all &= compare(
            &mut d,
            ok,
            format!(
                "w_B = {w_b}, k = {k}: max |ΣΓ − 1| = {sum_err:.1e}, s = 0 deviation {uniform_err:.1e}, \
                 s = 1 weight off the minimizer level {elsewhere:.1e}"
            ),
        );
    }
    Outcome {
        pass: all,
        summary: "Γ normalization and endpoint limits".into(),
        details: d,
    }
}

fn second_order_closed_form() -> Outcome {
    let mut d = Detail::new();
    let inst = appendix_ec_instance();
    let ay = ay_hamiltonian(&inst).unwrap();
    let cnf = ec3_to_1in3sat(&inst).unwrap();
    let expected = -ay.clause_counts.iter().map(|&b| to_f64(&Rational::new(1, b))).sum::<f64>();
    let (mut matching, mut differing, mut undefined) = (0, 0, 0);
    let mut examples = Vec::new();
    for x in 0..1u64 << 7 {
        let bits = bits_of(x, 7);
        let chosen: Vec<u8> = bits.iter().map(|b| 1 - b).collect();
        let satisfying = oracle::check_1in3(&cnf, &chosen).unwrap();
        match spectra::second_order_correction(&ay.model, &bits) {
            Ok(v) if (v - expected).abs() <= C9_ABS => {
                matching += 1;
                if satisfying {
                    examples.push(format!("satisfying assignment {chosen:?}: {v}"));
                }
            }
            Ok(v) => {
                differing += 1;
                if examples.len() < 4 {
                    examples.push(format!("assignment {chosen:?}: {v:.6}"));
                }
            }
            Err(_) => undefined += 1,
        }
    }
    compare(&mut d, (expected + 4.0).abs() <= C9_ABS, format!("−Σ 1/B_i = {expected}"));
    for e in examples {
        d.push(format!("     {e}"));
    }
    let ok = differing == 0 && undefined == 0 && (expected + 4.0).abs() <= C9_ABS;
    compare(
        &mut d,
        ok,
        format!("{matching} of 128 assignments equal −Σ 1/B_i, {differing} differ, {undefined} have a degenerate flip"),
    );
    Outcome {
        pass: ok,
        summary: "second-order correction of the clause-violation Hamiltonian".into(),
        details: d,
    }
}

fn main() -> ExitCode {
    let mut sweeps = Sweeps::default();
    let mut failed = Vec::new();
    let mut run = |id: u32, f: &mut dyn FnMut(&mut Sweeps) -> Outcome| {
        let t = Instant::now();
        let outcome = f(&mut sweeps);
        for line in &outcome.details {
            println!("    {line}");
        }
        let verdict = if outcome.pass { "PASS" } else { "FAIL" };
        println!("{verdict} criterion {id}: {} [{:.1?}]", outcome.summary, t.elapsed());
        if !outcome.pass {
            failed.push(id);
        }
    };
    // cheap criteria first; 1, 2 and 5 share the full sweeps
    run(4, &mut |_| pseudo_boolean_equivalence());
    run(6, &mut |_| worked_example());
    run(7, &mut |_| dense_agreement());
    run(9, &mut |_| second_order_closed_form());
    run(8, &mut |_| gamma_limits());
    run(3, &mut |_| desev_shapes());
    run(5, &mut matrix_element_identity);
    run(2, &mut scaling_table);
    run(1, &mut gap_vs_weight);
    failed.sort();
    if failed.is_empty() {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?}");
        ExitCode::FAILURE
    }
}
