//! Frozen reference values: small instances whose answers are known exactly
//! or in closed form.

use gapscope_core::desev::{self, GammaOptions, Labeler};
use gapscope_core::oracle;
use gapscope_core::rational::{int, parse_rational};
use gapscope_core::reductions::{
    appendix_ec_instance, ay_hamiltonian, bits_of, ec3_to_1in3sat, ec_to_mis, mis_to_ising, scaled_ising,
    threesat_to_mis, Cnf,
};
use gapscope_core::spectra::{self, SolverOptions, SweepOptions};
use gapscope_core::{generate_ck, BitConvention, CkParams, Couplings, IsingModel, SystemHamiltonian};

fn fifteen(wb: &str) -> gapscope_core::WeightedGraph {
    generate_ck(&CkParams::fifteen_vertex(parse_rational(wb).unwrap())).unwrap()
}

#[test]
fn ck_fifteen_vertex_shape() {
    let g = fifteen("9/5");
    assert_eq!(g.n(), 15);
    // three triangles plus each V_A pair joined to the two other cliques
    assert_eq!(g.edges().len(), 3 * 3 + 3 * 2 * 2 * 3);
    let mis = oracle::brute_force_mis(&g).unwrap();
    assert_eq!(mis.optimum, int(6));
    assert_eq!(mis.optimizers, vec![vec![0, 1, 2, 3, 4, 5]]);
}

#[test]
fn ck_local_maxima_weight() {
    // one vertex per clique: 3 · w_B, the runner-up for w_B < 2
    let g = fifteen("9/5");
    let clique_pick = [6, 9, 12];
    assert!(g.is_independent(&clique_pick));
    assert_eq!(g.set_weight(&clique_pick), parse_rational("27/5").unwrap());
}

#[test]
fn ck_ground_state_bitstring() {
    let g = fifteen("3/2");
    let model = scaled_ising(&g, &Couplings::uniform(&g, int(2)), int(1)).unwrap();
    let report = oracle::brute_force_ising_min(&model).unwrap();
    assert_eq!(report.minimizers, vec![0b111_111_111_000_000]);
    assert_eq!(report.decoded, vec![vec![0, 1, 2, 3, 4, 5]]);
}

#[test]
fn appendix_end_to_end() {
    let inst = appendix_ec_instance();
    let graph = ec_to_mis(&inst).unwrap();
    let model = mis_to_ising(&graph, &Couplings::default_rule(&graph)).unwrap();
    let report = oracle::brute_force_ising_min(&model).unwrap();
    assert_eq!(report.decoded, vec![vec![0, 4, 6]]);
    assert_eq!(graph.set_weight(&[0, 4, 6]), int(5));
    assert!(oracle::check_exact_cover(&inst, &[0, 4, 6]));
}

#[test]
fn appendix_clause_counts() {
    let ay = ay_hamiltonian(&appendix_ec_instance()).unwrap();
    assert_eq!(ay.clause_counts, vec![3, 3, 3, 2, 1, 2, 1]);
    let i23 = ay.pair_counts.iter().find(|&&(i, j, _)| (i, j) == (1, 2)).unwrap().2;
    assert_eq!(i23, 1);
    for (i, &b) in ay.clause_counts.iter().enumerate() {
        let sum: i64 = ay
            .pair_counts
            .iter()
            .filter(|&&(a, c, _)| a == i || c == i)
            .map(|p| p.2)
            .sum();
        assert_eq!(sum, 2 * b, "variable {i}");
    }
}

#[test]
fn appendix_second_order_at_solution() {
    let inst = appendix_ec_instance();
    let ay = ay_hamiltonian(&inst).unwrap();
    let cnf = ec3_to_1in3sat(&inst).unwrap();
    let mut solutions = 0;
    for x in 0..1u64 << 7 {
        // x_i = 1 selects the set; under the plus convention that is qubit 0
        let chosen: Vec<u8> = bits_of(x, 7).iter().map(|b| 1 - b).collect();
        if oracle::check_1in3(&cnf, &chosen).unwrap() {
            solutions += 1;
            let e2 = spectra::second_order_correction(&ay.model, &bits_of(x, 7)).unwrap();
            assert!((e2 + 4.0).abs() < 1e-12, "E2 = {e2}");
        }
    }
    assert_eq!(solutions, 1);
}

#[test]
fn dimacs_single_clause_is_triangle() {
    let cnf = Cnf::parse_dimacs("c one clause\np cnf 3 1\n1 -2 3 0\n").unwrap();
    let g = threesat_to_mis(&cnf).unwrap();
    assert_eq!(g.n(), 3);
    assert_eq!(g.edges().len(), 3);
    assert_eq!(oracle::brute_force_mis(&g).unwrap().optimum, int(1));
}

#[test]
fn single_spin_spectrum_closed_form() {
    // H(s) = −(1−s)σ^x + s·h·σ^z has eigenvalues ±√((1−s)² + (s h)²)
    let model = IsingModel::new(1, vec![int(3)], [], BitConvention::Plus).unwrap();
    let h = SystemHamiltonian::build(&model).unwrap();
    for s in [0.0, 0.2, 0.5, 0.9, 1.0] {
        let eig = spectra::lowest_eigenpairs(&h, s, 2, 1e-12).unwrap();
        let r = ((1.0 - s) * (1.0 - s) + 9.0 * s * s).sqrt();
        assert!((eig.values[0] + r).abs() < 1e-12, "s = {s}");
        assert!((eig.values[1] - r).abs() < 1e-12, "s = {s}");
    }
}

#[test]
fn two_spin_sweep_matches_dense() {
    let model = IsingModel::new(2, vec![int(1), int(-1)], [(0, 1, int(2))], BitConvention::Plus).unwrap();
    let h = SystemHamiltonian::build(&model).unwrap();
    let grid = spectra::uniform_grid(41).unwrap();
    let points = spectra::gap_sweep(&h, &grid, &SweepOptions::default()).unwrap();
    for p in &points {
        let dense = oracle::dense_eigs(&h, p.s).unwrap();
        assert!((p.gap - (dense.values[1] - dense.values[0])).abs() < 1e-10, "s = {}", p.s);
    }
}

#[test]
fn transverse_field_limit_matches_small_s() {
    // The s = 0 matrix element is the s → 0⁺ limit.
    let g = fifteen("9/5");
    let model = scaled_ising(&g, &Couplings::uniform(&g, int(2)), int(3)).unwrap();
    let h = SystemHamiltonian::build(&model).unwrap();
    let opts = SolverOptions::default();
    let at = |s: f64| {
        let eig = spectra::lowest_eigenpairs_with(&h, s, 2, &opts, None).unwrap();
        spectra::matrix_element(&h, &eig).unwrap().value
    };
    let limit = at(0.0);
    assert!((limit - at(1e-4)).abs() < 1e-2, "M(0) = {limit}");
    assert!((limit - 1.0119288512539248).abs() < 1e-9, "M(0) = {limit}");
}

#[test]
fn gamma_at_endpoints() {
    let g = fifteen("3/2");
    let couplings = Couplings::uniform(&g, int(2));
    let model = scaled_ising(&g, &couplings, int(1)).unwrap();
    let h = SystemHamiltonian::build(&model).unwrap();
    let table = desev::group_levels(
        &h,
        Labeler::PseudoBoolean {
            graph: &g,
            couplings: &couplings,
            k: int(1),
        },
    )
    .unwrap();
    assert_eq!(table.levels()[0].label, int(6));
    assert_eq!(table.levels()[0].count, 1);
    assert_eq!(table.zero_positions(0), "123456");
    let opts = GammaOptions {
        top_levels: table.levels().len(),
        ..GammaOptions::default()
    };
    let trace = desev::gamma_trace(&h, &table, &[0.0, 1.0], &opts).unwrap();
    let uniform = table.uniform_weights();
    for (a, b) in trace.values[0].iter().zip(&uniform) {
        assert!((a - b).abs() < 1e-12);
    }
    assert!((trace.values[1][0] - 1.0).abs() < 1e-10);
}
