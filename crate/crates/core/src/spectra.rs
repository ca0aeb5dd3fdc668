//! Low-lying spectrum of `H(s)`: gap sweeps, minimum-gap refinement, the
//! matrix element `M(s) = |⟨E_1|dH/ds|E_0⟩|`, operator norms and the three
//! running-time formulations built from them.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::SystemHamiltonian;
use crate::lanczos::{self, axpy, dot, norm, scale, small_symmetric_eigen, LanczosConfig};
use crate::rational;
use crate::reductions::IsingModel;

pub const DEFAULT_GRID_POINTS: usize = 401;
pub const DEFAULT_S_TOL: f64 = 1e-9;
/// Pairs with `g < DEGENERACY_RATIO · ‖H‖` are flagged as degenerate.
pub const DEGENERACY_RATIO: f64 = 1e-10;
const GOLDEN: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Residual tolerance relative to `max(1, ‖H(s)‖)`.
    pub tol: f64,
    pub basis_size: usize,
    pub max_restarts: usize,
    pub seed: u64,
    /// Pairs computed beyond the requested ones, to keep clusters intact.
    pub extra_pairs: usize,
    /// After convergence, search the orthogonal complement for a missed
    /// eigenvalue (catches degenerate multiplets a single Krylov space can't).
    pub complement_check: bool,
    /// From this `s` on, diagonally preconditioned Davidson is tried before
    /// Lanczos; it wins once the problem term dominates.
    pub davidson_from: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            basis_size: 40,
            max_restarts: 600,
            seed: 0x5eed,
            extra_pairs: 2,
            complement_check: false,
            davidson_from: 0.3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EigenResult {
    pub s: f64,
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
}

impl EigenResult {
    pub fn gap(&self) -> f64 {
        self.values[1] - self.values[0]
    }
}

/// Upper bound on `‖H(s)‖` used to scale tolerances.
fn operator_scale(h: &SystemHamiltonian, s: f64) -> f64 {
    (s * h.problem_norm() + (1.0 - s) * h.n() as f64).max(1.0)
}

fn point_rng(seed: u64, s: f64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ s.to_bits().rotate_left(17))
}

/// Flip the sign so the largest-magnitude component (first on ties) is positive.
fn fix_phase(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        scale(-1.0, v);
    }
}

fn check_request(h: &SystemHamiltonian, s: f64, q: usize, tol: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::ParameterOutOfRange(s));
    }
    if !(1..=8).contains(&q) {
        return Err(Error::InvalidInput(format!("eigenpair count {q} must be in 1..=8")));
    }
    if q > h.dim() {
        return Err(Error::InvalidInput(format!(
            "asked for {q} eigenpairs of a {}-dimensional operator",
            h.dim()
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance {tol} must be positive")));
    }
    Ok(())
}

/// The `q` lowest eigenpairs of `H(s)` with default solver settings and the
/// given residual tolerance.
pub fn lowest_eigenpairs(h: &SystemHamiltonian, s: f64, q: usize, tol: f64) -> Result<EigenResult> {
    let opts = SolverOptions {
        tol,
        ..SolverOptions::default()
    };
    lowest_eigenpairs_with(h, s, q, &opts, None)
}

/// As [`lowest_eigenpairs`], optionally warm-started from approximate
/// eigenvectors (e.g. those of a neighbouring `s`).
pub fn lowest_eigenpairs_with(
    h: &SystemHamiltonian,
    s: f64,
    q: usize,
    opts: &SolverOptions,
    guess: Option<&[Vec<f64>]>,
) -> Result<EigenResult> {
    check_request(h, s, q, opts.tol)?;
    if s == 0.0 {
        return Ok(transverse_field_pairs(h, q));
    }
    if s == 1.0 {
        return Ok(diagonal_pairs(h, q));
    }
    let dim = h.dim();
    let nev = (q + opts.extra_pairs).min(dim);
    let op = |v: &[f64], out: &mut [f64]| h.apply_h_unchecked(s, v, out);
    let mut rng = point_rng(opts.seed, s);
    let cfg = LanczosConfig {
        basis_size: opts.basis_size,
        max_restarts: opts.max_restarts,
        // the Ritz estimate is a little optimistic; aim below the target
        tol: opts.tol * 0.3,
    };
    let target = opts.tol * operator_scale(h, s);

    let mut start = lanczos::random_vector(dim, &mut rng);
    if let Some(g) = guess {
        let noise = norm(&start);
        scale(1e-3 / noise, &mut start);
        for (l, v) in g.iter().enumerate() {
            axpy(1.0 / (1.0 + l as f64), v, &mut start);
        }
    }

    let mut best_residuals = Vec::new();
    for attempt in 0..3 {
        let ritz = if attempt == 0 && s >= opts.davidson_from {
            let guesses: Vec<Vec<f64>> = match guess {
                Some(g) => g.to_vec(),
                None => vec![start.clone()],
            };
            let dcfg = LanczosConfig {
                basis_size: opts.basis_size.min(32),
                tol: 0.5 * target,
                ..cfg.clone()
            };
            let diag: Vec<f64> = h.diag().iter().map(|d| s * d).collect();
            let pre = |shift: f64, r: &[f64], out: &mut [f64]| lanczos::diagonal_solve(&diag, shift, r, out);
            lanczos::lowest_davidson(&op, &pre, dim, nev, q, &guesses, &dcfg, &mut rng)
        } else {
            lanczos::lowest_ritz(&op, dim, nev, q, &start, &[], &cfg, &mut rng)
        };
        let (values, vectors, residuals) = rayleigh_ritz(&op, dim, ritz.vectors);
        if residuals[..q].iter().all(|&r| r <= target) {
            let mut result = EigenResult {
                s,
                values,
                vectors,
                residuals,
            };
            if opts.complement_check {
                complement_check(h, s, q, &op, &cfg, target, &mut result, &mut rng)?;
            }
            result.values.truncate(q);
            result.vectors.truncate(q);
            result.residuals.truncate(q);
            for v in &mut result.vectors {
                fix_phase(v);
            }
            return Ok(result);
        }
        best_residuals = residuals[..q].to_vec();
        // restart from the current best subspace plus fresh noise
        start = lanczos::random_vector(dim, &mut rng);
        let noise = norm(&start);
        scale(1e-6 / noise, &mut start);
        for (l, v) in vectors.iter().enumerate() {
            axpy(1.0 / (1.0 + l as f64), v, &mut start);
        }
    }
    Err(Error::NoConvergence {
        s,
        residuals: best_residuals,
    })
}

/// Rayleigh–Ritz on an (approximately orthonormal) set of vectors, with
/// explicit residual norms. Returns ascending values.
fn rayleigh_ritz(
    op: &dyn Fn(&[f64], &mut [f64]),
    dim: usize,
    mut basis: Vec<Vec<f64>>,
) -> (Vec<f64>, Vec<Vec<f64>>, Vec<f64>) {
    // re-orthonormalize (modified Gram–Schmidt, twice)
    for i in 0..basis.len() {
        for _ in 0..2 {
            for j in 0..i {
                let (head, tail) = basis.split_at_mut(i);
                let c = dot(&head[j], &tail[0]);
                axpy(-c, &head[j], &mut tail[0]);
            }
        }
        let nv = norm(&basis[i]);
        scale(1.0 / nv, &mut basis[i]);
    }
    let k = basis.len();
    let images: Vec<Vec<f64>> = basis
        .iter()
        .map(|v| {
            let mut w = vec![0.0; dim];
            op(v, &mut w);
            w
        })
        .collect();
    let mut g = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            g[i * k + j] = dot(&basis[i], &images[j]);
        }
    }
    let (theta, y) = small_symmetric_eigen(&g, k, k);
    let mut vectors = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    for l in 0..k {
        let mut x = vec![0.0; dim];
        let mut ax = vec![0.0; dim];
        for i in 0..k {
            axpy(y[(i, l)], &basis[i], &mut x);
            axpy(y[(i, l)], &images[i], &mut ax);
        }
        let nx = norm(&x);
        scale(1.0 / nx, &mut x);
        scale(1.0 / nx, &mut ax);
        axpy(-theta[l], &x, &mut ax);
        residuals.push(norm(&ax));
        vectors.push(x);
    }
    (theta, vectors, residuals)
}

#[allow(clippy::too_many_arguments)]
fn complement_check(
    h: &SystemHamiltonian,
    s: f64,
    q: usize,
    op: &dyn Fn(&[f64], &mut [f64]),
    cfg: &LanczosConfig,
    target: f64,
    result: &mut EigenResult,
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    let dim = h.dim();
    for _ in 0..q {
        let known: Vec<Vec<f64>> = result.vectors[..q.min(result.vectors.len())].to_vec();
        if known.len() >= dim {
            return Ok(());
        }
        let start = lanczos::random_vector(dim, rng);
        let probe = lanczos::lowest_ritz(op, dim, 1, 1, &start, &known, cfg, rng);
        let theta = probe.values[0];
        if theta >= result.values[q - 1] - 10.0 * target {
            return Ok(());
        }
        let mut basis = known;
        basis.extend(probe.vectors);
        let (values, vectors, residuals) = rayleigh_ritz(op, dim, basis);
        if residuals[..q].iter().any(|&r| r > target) {
            return Err(Error::NoConvergence {
                s,
                residuals: residuals[..q].to_vec(),
            });
        }
        *result = EigenResult {
            s,
            values,
            vectors,
            residuals,
        };
    }
    Ok(())
}

/// Eigenpairs of `H(0) = −Σσ^x`, taken as the `s → 0⁺` limits.
///
/// The first excited level is the `n`-fold single-flip multiplet
/// `w_i(x) = (−1)^{x_i} / √2ⁿ`. First-order perturbation in `H_problem` lifts
/// it by the coupling matrix `⟨w_i|H_problem|w_j⟩ = J_ij`, so its members are
/// ordered and combined by that matrix's eigenvectors. Inside a degenerate
/// cluster the vector carrying the coupling to the ground state
/// (`⟨w_i|H_problem|+⟩ = h_i`, projected onto the cluster) comes first, which
/// makes `M(0)` the basis-independent limit. Higher levels are plain Walsh
/// functions.
fn transverse_field_pairs(h: &SystemHamiltonian, q: usize) -> EigenResult {
    let n = h.n();
    let dim = h.dim();
    let amp = 1.0 / (dim as f64).sqrt();
    let walsh = |c: usize| -> Vec<f64> {
        (0..dim)
            .map(|x| if (x & c).count_ones() % 2 == 0 { amp } else { -amp })
            .collect()
    };
    let mut values = vec![-(n as f64)];
    let mut vectors = vec![walsh(0)];
    if q > 1 {
        let take = (q - 1).min(n);
        for c in multiplet_combinations(h.model(), take) {
            let mut v = vec![0.0; dim];
            for (i, &ci) in c.iter().enumerate() {
                if ci != 0.0 {
                    axpy(ci, &walsh(1 << i), &mut v);
                }
            }
            values.push(-(n as f64) + 2.0);
            vectors.push(v);
        }
    }
    'outer: for w in 2..=n {
        for c in 0..dim {
            if vectors.len() == q {
                break 'outer;
            }
            if c.count_ones() as usize == w {
                values.push(-(n as f64) + 2.0 * w as f64);
                vectors.push(walsh(c));
            }
        }
    }
    for v in &mut vectors {
        fix_phase(v);
    }
    EigenResult {
        s: 0.0,
        residuals: vec![0.0; values.len()],
        values,
        vectors,
    }
}

/// Coefficient vectors (over the single-flip states) of the `take` lowest
/// first-order combinations; see [`transverse_field_pairs`].
fn multiplet_combinations(model: &IsingModel, take: usize) -> Vec<Vec<f64>> {
    let n = model.n();
    let mut jm = nalgebra::DMatrix::zeros(n, n);
    for &(i, j, v) in model.couplings() {
        jm[(i, j)] = rational::to_f64(&v);
        jm[(j, i)] = rational::to_f64(&v);
    }
    let fields: Vec<f64> = model.fields().iter().map(rational::to_f64).collect();
    let (vals, vecs) = lanczos::jacobi_eigen(&mut jm);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let spread = vals.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(take);
    let mut start = 0;
    while start < n && out.len() < take {
        let mut end = start + 1;
        while end < n && vals[order[end]] - vals[order[start]] <= 1e-9 * spread {
            end += 1;
        }
        let cluster: Vec<Vec<f64>> = order[start..end]
            .iter()
            .map(|&c| vecs.column(c).iter().copied().collect())
            .collect();
        // projection of the fields onto the cluster first, then the rest
        let mut coupled = vec![0.0; n];
        for u in &cluster {
            axpy(dot(u, &fields), u, &mut coupled);
        }
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for mut cand in std::iter::once(coupled).chain(cluster) {
            for b in &basis {
                let c = dot(b, &cand);
                axpy(-c, b, &mut cand);
            }
            let len = norm(&cand);
            if len > 1e-8 && basis.len() < end - start {
                scale(1.0 / len, &mut cand);
                basis.push(cand);
            }
        }
        out.extend(basis);
        start = end;
    }
    out.truncate(take);
    out
}

fn diagonal_pairs(h: &SystemHamiltonian, q: usize) -> EigenResult {
    let mut order: Vec<usize> = (0..h.dim()).collect();
    order.sort_by_key(|&x| (h.diag_scaled()[x], x));
    let picks = &order[..q];
    EigenResult {
        s: 1.0,
        values: picks.iter().map(|&x| h.diag()[x]).collect(),
        vectors: picks
            .iter()
            .map(|&x| {
                let mut v = vec![0.0; h.dim()];
                v[x] = 1.0;
                v
            })
            .collect(),
        residuals: vec![0.0; q],
    }
}

/// Both forms of `M(s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatrixElement {
    /// `|⟨E_1|(H_problem − H_init)|E_0⟩|`.
    pub value: f64,
    /// `|⟨E_1|H_init|E_0⟩| / s`, for `s > 0`.
    pub alt: Option<f64>,
    /// The pair is within the degeneracy threshold; the values depend on the
    /// arbitrary basis chosen inside the degenerate space.
    pub degenerate: bool,
}

pub fn matrix_element(h: &SystemHamiltonian, eig: &EigenResult) -> Result<MatrixElement> {
    if eig.vectors.len() < 2 {
        return Err(Error::InvalidInput("matrix element needs two eigenpairs".into()));
    }
    let (e0, e1) = (&eig.vectors[0], &eig.vectors[1]);
    let mut w = vec![0.0; h.dim()];
    h.apply_init(e0, &mut w)?;
    let init = dot(e1, &w);
    h.apply_dh(e0, &mut w)?;
    let value = dot(e1, &w).abs();
    let alt = (eig.s > 0.0).then(|| init.abs() / eig.s);
    let degenerate = eig.gap() < DEGENERACY_RATIO * operator_scale(h, eig.s);
    Ok(MatrixElement { value, alt, degenerate })
}

/// `‖H(s)‖ = max(|λ_min|, |λ_max|)`, each extreme from the iterative solver.
pub fn operator_norm(h: &SystemHamiltonian, s: f64, opts: &SolverOptions) -> Result<f64> {
    let low = lowest_eigenpairs_with(h, s, 1, opts, None)?.values[0];
    Ok(low.abs().max(largest_eigenvalue(h, s, opts, None)?.0.abs()))
}

/// `λ_max(H(s))` from the lowest eigenpair of `−H(s)`.
fn largest_eigenvalue(
    h: &SystemHamiltonian,
    s: f64,
    opts: &SolverOptions,
    guess: Option<&[f64]>,
) -> Result<(f64, Vec<f64>)> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::ParameterOutOfRange(s));
    }
    if s == 0.0 {
        let dim = h.dim();
        let top = dim - 1;
        let v = transverse_field_vector(h.n(), top);
        return Ok((h.n() as f64, v));
    }
    if s == 1.0 {
        let (x, _) = h
            .diag_scaled()
            .iter()
            .enumerate()
            .max_by_key(|&(x, &e)| (e, std::cmp::Reverse(x)))
            .expect("non-empty");
        let mut v = vec![0.0; h.dim()];
        v[x] = 1.0;
        return Ok((h.diag()[x], v));
    }
    let dim = h.dim();
    let op = |v: &[f64], out: &mut [f64]| {
        h.apply_h_unchecked(s, v, out);
        scale(-1.0, out);
    };
    let mut rng = point_rng(opts.seed.wrapping_add(1), s);
    let mut start = lanczos::random_vector(dim, &mut rng);
    if let Some(g) = guess {
        let noise = norm(&start);
        scale(1e-3 / noise, &mut start);
        axpy(1.0, g, &mut start);
    }
    let cfg = LanczosConfig {
        basis_size: opts.basis_size.min(24),
        max_restarts: opts.max_restarts,
        tol: opts.tol.max(1e-10),
    };
    let ritz = lanczos::lowest_ritz(&op, dim, 1, 1, &start, &[], &cfg, &mut rng);
    if !ritz.converged {
        return Err(Error::NoConvergence {
            s,
            residuals: ritz.residual_estimates,
        });
    }
    Ok((-ritz.values[0], ritz.vectors.into_iter().next().expect("one pair")))
}

fn transverse_field_vector(n: usize, character: usize) -> Vec<f64> {
    let dim = 1usize << n;
    let amp = 1.0 / (dim as f64).sqrt();
    (0..dim)
        .map(|x| if (x & character).count_ones() % 2 == 0 { amp } else { -amp })
        .collect()
}

/// `n` uniformly spaced points on `[0, 1]`, endpoints included.
pub fn uniform_grid(n: usize) -> Result<Vec<f64>> {
    grid_between(0.0, 1.0, n)
}

/// `n` uniformly spaced points on `[from, to] ⊆ [0, 1]`, endpoints included.
pub fn grid_between(from: f64, to: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("grid needs at least 2 points, got {n}")));
    }
    if !(0.0..=1.0).contains(&from) || !(0.0..=1.0).contains(&to) || from >= to {
        return Err(Error::InvalidInput(format!("grid range [{from}, {to}] must be an interval inside [0, 1]")));
    }
    let step = (to - from) / (n - 1) as f64;
    Ok((0..n)
        .map(|i| if i == n - 1 { to } else { from + i as f64 * step })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapPoint {
    pub s: f64,
    pub e0: f64,
    pub e1: f64,
    pub gap: f64,
    pub mat: f64,
    pub mat_alt: Option<f64>,
    pub norm: Option<f64>,
    pub degenerate: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepOptions {
    pub solver: SolverOptions,
    /// Also compute `‖H(s)‖` at every grid point.
    pub with_norm: bool,
    pub s_tol: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            solver: SolverOptions::default(),
            with_norm: true,
            s_tol: DEFAULT_S_TOL,
        }
    }
}

fn gap_point(h: &SystemHamiltonian, eig: &EigenResult, norm: Option<f64>) -> Result<GapPoint> {
    let m = matrix_element(h, eig)?;
    Ok(GapPoint {
        s: eig.s,
        e0: eig.values[0],
        e1: eig.values[1],
        gap: eig.gap().max(0.0),
        mat: m.value,
        mat_alt: m.alt,
        norm,
        degenerate: m.degenerate,
    })
}

/// Per-point spectral data along `grid`, warm-started from the previous
/// point's eigenvectors.
pub fn gap_sweep(h: &SystemHamiltonian, grid: &[f64], opts: &SweepOptions) -> Result<Vec<GapPoint>> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty grid".into()));
    }
    if let Some(&bad) = grid.iter().find(|s| !(0.0..=1.0).contains(*s)) {
        return Err(Error::ParameterOutOfRange(bad));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("grid must be strictly increasing".into()));
    }
    let mut points = Vec::with_capacity(grid.len());
    let mut prev: Option<Vec<Vec<f64>>> = None;
    let mut prev_top: Option<Vec<f64>> = None;
    for &s in grid {
        let eig = lowest_eigenpairs_with(h, s, 2, &opts.solver, prev.as_deref())?;
        let norm = if opts.with_norm {
            let (top, v) = largest_eigenvalue(h, s, &opts.solver, prev_top.as_deref())?;
            prev_top = Some(v);
            Some(eig.values[0].abs().max(top.abs()))
        } else {
            None
        };
        points.push(gap_point(h, &eig, norm)?);
        prev = Some(eig.vectors.clone());
    }
    Ok(points)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinGap {
    pub s_star: f64,
    pub g_min: f64,
    pub mat_at_s_star: f64,
    /// The global minimum sits at an end of the grid; no interior bracket.
    pub at_boundary: bool,
}

/// Spectral data at a single `s`, for refinement.
fn evaluate(h: &SystemHamiltonian, s: f64, solver: &SolverOptions, guess: Option<&[Vec<f64>]>) -> Result<(EigenResult, GapPoint)> {
    let eig = lowest_eigenpairs_with(h, s, 2, solver, guess)?;
    let point = gap_point(h, &eig, None)?;
    Ok((eig, point))
}

/// Golden-section search for a minimum of `f` on `[a, b]`.
fn golden_section(mut a: f64, mut b: f64, tol: f64, mut f: impl FnMut(f64) -> Result<f64>) -> Result<(f64, f64)> {
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc <= fd { (c, fc) } else { (d, fd) })
}

/// Indices of strict-ish local minima of `values` (interior points not above
/// either neighbour and below at least one).
fn local_minima(values: &[f64]) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&i| values[i] <= values[i - 1] && values[i] <= values[i + 1] && values[i] < values[i - 1].max(values[i + 1]))
        .collect()
}

/// `dg/ds` by Hellmann–Feynman: `⟨E_1|dH|E_1⟩ − ⟨E_0|dH|E_0⟩`.
fn gap_derivative(h: &SystemHamiltonian, eig: &EigenResult) -> Result<f64> {
    let mut w = vec![0.0; h.dim()];
    h.apply_dh(&eig.vectors[1], &mut w)?;
    let d1 = dot(&eig.vectors[1], &w);
    h.apply_dh(&eig.vectors[0], &mut w)?;
    let d0 = dot(&eig.vectors[0], &w);
    Ok(d1 - d0)
}

/// Refines the minimum of `g` inside one bracket to `s_tol`.
///
/// Golden-section on `g` itself is limited by eigenvalue precision when the
/// minimum is shallow (uncertainty `~√(ε/g'')`), so once it has converged the
/// location is polished by bisection on the Hellmann–Feynman derivative,
/// provided the gap is wide enough for the eigenvectors to be accurate.
pub fn refine_min_gap(h: &SystemHamiltonian, bracket: (f64, f64, f64), s_tol: f64, solver: &SolverOptions) -> Result<MinGap> {
    let (lo, mid, hi) = bracket;
    if !(lo < mid && mid < hi) || lo < 0.0 || hi > 1.0 {
        return Err(Error::InvalidInput(format!("bad bracket ({lo}, {mid}, {hi})")));
    }
    let mut warm: Option<Vec<Vec<f64>>> = Some(evaluate(h, mid, solver, None)?.0.vectors);
    let (s_gs, _) = golden_section(lo, hi, s_tol, |s| {
        let (eig, p) = evaluate(h, s, solver, warm.as_deref())?;
        warm = Some(eig.vectors);
        Ok(p.gap)
    })?;
    let mut s_best = s_gs;
    let (eig, p) = evaluate(h, s_best, solver, warm.as_deref())?;
    let polish_floor = 1e-3 * operator_scale(h, s_best).sqrt();
    if p.gap > polish_floor {
        if let Some(s) = polish_by_derivative(h, (lo, hi), s_best, s_tol, solver, &eig)? {
            s_best = s;
        }
    }
    let (_, p) = evaluate(h, s_best, solver, Some(&eig.vectors))?;
    Ok(MinGap {
        s_star: s_best,
        g_min: p.gap,
        mat_at_s_star: p.mat,
        at_boundary: false,
    })
}

fn polish_by_derivative(
    h: &SystemHamiltonian,
    (lo, hi): (f64, f64),
    s0: f64,
    s_tol: f64,
    solver: &SolverOptions,
    eig0: &EigenResult,
) -> Result<Option<f64>> {
    let mut warm = eig0.vectors.clone();
    let mut deriv = |s: f64| -> Result<f64> {
        let (eig, _) = evaluate(h, s, solver, Some(&warm))?;
        let d = gap_derivative(h, &eig)?;
        warm = eig.vectors;
        Ok(d)
    };
    // widen a sign-change bracket around s0 inside (lo, hi)
    let mut width = 1e-5_f64;
    let (mut a, mut b);
    loop {
        a = (s0 - width).max(lo);
        b = (s0 + width).min(hi);
        let (da, db) = (deriv(a)?, deriv(b)?);
        if da < 0.0 && db > 0.0 {
            break;
        }
        if a == lo && b == hi {
            return Ok(None);
        }
        width *= 8.0;
    }
    while b - a > s_tol * 0.1 {
        let m = 0.5 * (a + b);
        if deriv(m)? < 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(Some(0.5 * (a + b)))
}

/// Global minimum gap: refine every local grid minimum and keep the smallest.
/// When no interior bracket exists the best grid end point is returned with
/// `at_boundary` set.
pub fn find_min_gap(h: &SystemHamiltonian, points: &[GapPoint], opts: &SweepOptions) -> Result<MinGap> {
    if points.is_empty() {
        return Err(Error::InvalidInput("empty sweep".into()));
    }
    let gaps: Vec<f64> = points.iter().map(|p| p.gap).collect();
    let minima = local_minima(&gaps);
    if minima.is_empty() {
        let p = points
            .iter()
            .min_by(|a, b| a.gap.total_cmp(&b.gap))
            .expect("non-empty");
        return Ok(MinGap {
            s_star: p.s,
            g_min: p.gap,
            mat_at_s_star: p.mat,
            at_boundary: true,
        });
    }
    let mut best: Option<MinGap> = None;
    for i in minima {
        for bracket in local_brackets(h, points, i, opts)? {
            let cand = refine_min_gap(h, bracket, opts.s_tol, &opts.solver)?;
            if best.map_or(true, |b| cand.g_min < b.g_min) {
                best = Some(cand);
            }
        }
    }
    let best = best.expect("at least one bracket");
    // a boundary grid point can still beat every interior minimum
    let edge = [points[0], points[points.len() - 1]]
        .into_iter()
        .min_by(|a, b| a.gap.total_cmp(&b.gap))
        .expect("two points");
    if edge.gap < best.g_min {
        return Ok(MinGap {
            s_star: edge.s,
            g_min: edge.gap,
            mat_at_s_star: edge.mat,
            at_boundary: true,
        });
    }
    Ok(best)
}

/// Bracket(s) around grid minimum `i`. If the parabola through the three
/// points is narrower than the grid spacing, the interval is resampled at
/// double density (twice) so that a second, narrower dip is not missed.
fn local_brackets(h: &SystemHamiltonian, points: &[GapPoint], i: usize, opts: &SweepOptions) -> Result<Vec<(f64, f64, f64)>> {
    let (l, m, r) = (points[i - 1], points[i], points[i + 1]);
    let spacing = 0.5 * (r.s - l.s);
    let curvature = (l.gap - 2.0 * m.gap + r.gap) / (spacing * spacing);
    let width = if curvature > 0.0 { (2.0 * m.gap / curvature).sqrt() } else { f64::INFINITY };
    if width >= spacing {
        return Ok(vec![(l.s, m.s, r.s)]);
    }
    let mut samples = vec![l, m, r];
    for _ in 0..2 {
        let mut refined = Vec::with_capacity(2 * samples.len());
        let mut warm: Option<Vec<Vec<f64>>> = None;
        for w in samples.windows(2) {
            refined.push(w[0]);
            let (eig, p) = evaluate(h, 0.5 * (w[0].s + w[1].s), &opts.solver, warm.as_deref())?;
            warm = Some(eig.vectors);
            refined.push(p);
        }
        refined.push(*samples.last().expect("non-empty"));
        samples = refined;
    }
    let gaps: Vec<f64> = samples.iter().map(|p| p.gap).collect();
    let found: Vec<_> = local_minima(&gaps)
        .into_iter()
        .map(|j| (samples[j - 1].s, samples[j].s, samples[j + 1].s))
        .collect();
    if found.is_empty() {
        return Ok(vec![(l.s, m.s, r.s)]);
    }
    Ok(found)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioMax {
    pub s_prime: f64,
    pub gap: f64,
    pub mat: f64,
    /// `M(s′)/g(s′)²`.
    pub ratio: f64,
}

fn ratio_of(p: &GapPoint) -> f64 {
    if p.gap > 0.0 {
        p.mat / (p.gap * p.gap)
    } else {
        f64::INFINITY
    }
}

/// `s′ = argmax M(s)/g(s)²`: best grid point, then golden-section on the two
/// neighbouring intervals.
pub fn find_max_ratio(h: &SystemHamiltonian, points: &[GapPoint], opts: &SweepOptions) -> Result<RatioMax> {
    let (i, best) = points
        .iter()
        .enumerate()
        .max_by(|a, b| ratio_of(a.1).total_cmp(&ratio_of(b.1)))
        .ok_or_else(|| Error::InvalidInput("empty sweep".into()))?;
    let mut result = RatioMax {
        s_prime: best.s,
        gap: best.gap,
        mat: best.mat,
        ratio: ratio_of(best),
    };
    if points.len() < 3 {
        return Ok(result);
    }
    let lo = points[i.saturating_sub(1)].s;
    let hi = points[(i + 1).min(points.len() - 1)].s;
    let mut warm: Option<Vec<Vec<f64>>> = None;
    let (s, _) = golden_section(lo, hi, opts.s_tol, |s| {
        let (eig, p) = evaluate(h, s, &opts.solver, warm.as_deref())?;
        warm = Some(eig.vectors);
        Ok(-ratio_of(&p))
    })?;
    let (_, p) = evaluate(h, s, &opts.solver, warm.as_deref())?;
    if ratio_of(&p) > result.ratio {
        result = RatioMax {
            s_prime: s,
            gap: p.gap,
            mat: p.mat,
            ratio: ratio_of(&p),
        };
    }
    Ok(result)
}

/// The three running-time formulations and their ingredients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtReport {
    pub k: Option<f64>,
    pub s_star: f64,
    pub g_min: f64,
    pub mat_at_s_star: f64,
    pub max_mat: f64,
    /// Where `max_mat` is attained.
    pub max_mat_s: f64,
    pub max_norm: f64,
    /// `max M / g_min² · max‖H‖`.
    pub art1: f64,
    /// `M(s*) / g_min² · max‖H‖`.
    pub art2: f64,
    /// `M(s′) / g(s′)² · max‖H‖`.
    pub art3: f64,
    pub s_prime: f64,
    pub g_at_s_prime: f64,
    pub mat_at_s_prime: f64,
    pub boundary_minimum: bool,
}

/// Combines the sweep with the refined minimum and ratio maximum. `max_mat`
/// is taken over the grid points together with `s*` and `s′` (at `s = 0` the
/// sweep holds the `s → 0⁺` limit); `max_norm` over the grid points.
pub fn art_report(points: &[GapPoint], min: &MinGap, ratio: &RatioMax, k: Option<f64>) -> Result<ArtReport> {
    if min.g_min <= 0.0 || ratio.gap <= 0.0 {
        return Err(Error::Degenerate(
            "minimum gap is zero; the final ground state is degenerate and the running-time formulas diverge".into(),
        ));
    }
    let (max_mat_s, max_mat) = points
        .iter()
        .map(|p| (p.s, p.mat))
        .chain([(min.s_star, min.mat_at_s_star), (ratio.s_prime, ratio.mat)])
        .fold((0.0, f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best });
    let max_norm = points
        .iter()
        .map(|p| p.norm.ok_or_else(|| Error::InvalidInput("sweep was run without norms".into())))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let g2 = min.g_min * min.g_min;
    Ok(ArtReport {
        k,
        s_star: min.s_star,
        g_min: min.g_min,
        mat_at_s_star: min.mat_at_s_star,
        max_mat,
        max_mat_s,
        max_norm,
        art1: max_mat / g2 * max_norm,
        art2: min.mat_at_s_star / g2 * max_norm,
        art3: ratio.mat / (ratio.gap * ratio.gap) * max_norm,
        s_prime: ratio.s_prime,
        g_at_s_prime: ratio.gap,
        mat_at_s_prime: ratio.mat,
        boundary_minimum: min.at_boundary,
    })
}

/// Sweep, minimum-gap refinement and ratio maximization in one go.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub points: Vec<GapPoint>,
    pub min: MinGap,
    pub ratio: RatioMax,
    pub report: ArtReport,
}

pub fn analyze(h: &SystemHamiltonian, grid: &[f64], opts: &SweepOptions, k: Option<f64>) -> Result<Analysis> {
    let points = gap_sweep(h, grid, opts)?;
    let min = find_min_gap(h, &points, opts)?;
    let ratio = find_max_ratio(h, &points, opts)?;
    let report = art_report(&points, &min, &ratio, k)?;
    Ok(Analysis {
        points,
        min,
        ratio,
        report,
    })
}

/// Second-order energy shift of basis state `x` under a transverse-field
/// perturbation `−Σσ^x`, in the cost units of the model:
///
/// `E⁽²⁾ = u · Σ_i 1 / (E(x) − E(x with bit i flipped))`
///
/// where `u` is the model's energy unit. For the clause-violation Hamiltonian
/// flipping any variable of a satisfying assignment costs `2·B_i` energy, i.e.
/// `B_i` violations, so the shift is `−Σ 1/B_i`.
pub fn second_order_correction(model: &IsingModel, bits: &[u8]) -> Result<f64> {
    if bits.len() != model.n() {
        return Err(Error::DimensionMismatch {
            expected: model.n(),
            got: bits.len(),
        });
    }
    let index = crate::reductions::index_of(bits);
    let e = model.energy_exact(index);
    let mut total = rational::int(0);
    for i in 0..model.n() {
        let delta = e - model.energy_exact(index ^ (1 << i));
        if rational::is_zero(&delta) {
            return Err(Error::ZeroDenominator { bit: i });
        }
        total += delta.recip();
    }
    Ok(rational::to_f64(&(total * model.energy_unit())))
}

/// Sweep CSV: `s,E0,E1,gap,mat,mat_alt,norm` at `digits` significant digits.
pub fn sweep_csv(points: &[GapPoint], digits: usize) -> String {
    let mut out = String::from("s,E0,E1,gap,mat,mat_alt,norm\n");
    let fmt = |x: f64| format_sig(x, digits);
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt(p.s),
            fmt(p.e0),
            fmt(p.e1),
            fmt(p.gap),
            fmt(p.mat),
            p.mat_alt.map(fmt).unwrap_or_default(),
            p.norm.map(fmt).unwrap_or_default()
        );
    }
    out
}

/// `x` in scientific notation with `digits` significant digits.
pub fn format_sig(x: f64, digits: usize) -> String {
    format!("{:.*e}", digits.saturating_sub(1), x)
}
