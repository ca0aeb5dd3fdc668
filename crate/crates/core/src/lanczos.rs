//! Thick-restart Lanczos for the lowest eigenpairs of a symmetric operator.
//!
//! Every new Krylov vector is orthogonalized against the whole basis twice
//! (classical Gram-Schmidt, then again), so the projected matrix is a true
//! Rayleigh quotient and Ritz residual estimates can be trusted. On restart the
//! lowest Ritz vectors are kept together with the current residual direction.

use nalgebra::DMatrix;
use rand::Rng;

#[derive(Debug, Clone)]
pub struct LanczosConfig {
    /// Maximum basis size per restart cycle.
    pub basis_size: usize,
    pub max_restarts: usize,
    /// Relative residual tolerance: `‖Ax − θx‖ ≤ tol · max(1, |θ|_max)`.
    pub tol: f64,
}

impl Default for LanczosConfig {
    fn default() -> Self {
        Self {
            basis_size: 40,
            max_restarts: 400,
            tol: 1e-11,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RitzPairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub residual_estimates: Vec<f64>,
    pub restarts: usize,
    pub converged: bool,
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    // four accumulators, fixed order
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let k = 4 * c;
        acc[0] += a[k] * b[k];
        acc[1] += a[k + 1] * b[k + 1];
        acc[2] += a[k + 2] * b[k + 2];
        acc[3] += a[k + 3] * b[k + 3];
    }
    let mut tail = 0.0;
    for k in 4 * chunks..a.len() {
        tail += a[k] * b[k];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn scale(alpha: f64, a: &mut [f64]) {
    for x in a.iter_mut() {
        *x *= alpha;
    }
}

pub(crate) fn project_out(w: &mut [f64], vectors: &[Vec<f64>]) {
    for _ in 0..2 {
        for v in vectors {
            let c = dot(v, w);
            axpy(-c, v, w);
        }
    }
}

pub(crate) fn random_vector(dim: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Eigen-decomposition of the leading `k × k` block of a row-major `m × m`
/// symmetric matrix, eigenvalues ascending. Column `l` of the returned matrix
/// is the eigenvector of value `l`.
///
/// Cyclic Jacobi: slow for big matrices but accurate to working precision on
/// the arrowhead-plus-tridiagonal matrices thick restarts produce, where
/// nalgebra's implicit QR was seen to stall at 1e-6 residuals.
pub(crate) fn small_symmetric_eigen(t: &[f64], m: usize, k: usize) -> (Vec<f64>, DMatrix<f64>) {
    let mut a = DMatrix::from_fn(k, k, |i, j| 0.5 * (t[i * m + j] + t[j * m + i]));
    let (values, vectors) = jacobi_eigen(&mut a);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&x, &y| values[x].total_cmp(&values[y]).then(x.cmp(&y)));
    let sorted = order.iter().map(|&i| values[i]).collect();
    let vecs = DMatrix::from_fn(k, k, |i, l| vectors[(i, order[l])]);
    (sorted, vecs)
}

/// Cyclic Jacobi rotations until the off-diagonal part is negligible.
/// Consumes `a` (left diagonalized); returns unsorted values and vectors.
pub(crate) fn jacobi_eigen(a: &mut DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let mut v = DMatrix::identity(n, n);
    for _sweep in 0..100 {
        let mut off = 0.0;
        let mut diag = 0.0;
        for i in 0..n {
            diag += a[(i, i)] * a[(i, i)];
            for j in i + 1..n {
                off += a[(i, j)] * a[(i, j)];
            }
        }
        if off <= 1e-34 * diag.max(f64::MIN_POSITIVE) || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let (app, aqq) = (a[(p, p)], a[(q, q)]);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..n {
                    let (arp, arq) = (a[(r, p)], a[(r, q)]);
                    a[(r, p)] = c * arp - s * arq;
                    a[(r, q)] = s * arp + c * arq;
                }
                for r in 0..n {
                    let (apr, aqr) = (a[(p, r)], a[(q, r)]);
                    a[(p, r)] = c * apr - s * aqr;
                    a[(q, r)] = s * apr + c * aqr;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for r in 0..n {
                    let (vrp, vrq) = (v[(r, p)], v[(r, q)]);
                    v[(r, p)] = c * vrp - s * vrq;
                    v[(r, q)] = s * vrp + c * vrq;
                }
            }
        }
    }
    ((0..n).map(|i| a[(i, i)]).collect(), v)
}

fn combine(basis: &[Vec<f64>], coeffs: impl Iterator<Item = f64>, dim: usize) -> Vec<f64> {
    let mut out = vec![0.0; dim];
    for (v, c) in basis.iter().zip(coeffs) {
        if c != 0.0 {
            axpy(c, v, &mut out);
        }
    }
    out
}

/// A random unit vector orthogonal to `basis` and `deflate`, if one exists.
fn fresh_direction(dim: usize, basis: &[Vec<f64>], deflate: &[Vec<f64>], rng: &mut impl Rng) -> Option<Vec<f64>> {
    for _ in 0..3 {
        let mut v = random_vector(dim, rng);
        let before = norm(&v);
        project_out(&mut v, deflate);
        project_out(&mut v, basis);
        let after = norm(&v);
        if after > 1e-8 * before {
            scale(1.0 / after, &mut v);
            return Some(v);
        }
    }
    None
}

/// Lowest `nev` eigenpairs of `op` restricted to the orthogonal complement of
/// `deflate` (which must be orthonormal and, for the answer to be meaningful,
/// invariant under `op`). Only the lowest `nconv` must meet the tolerance;
/// the rest are carried along as guards.
#[allow(clippy::too_many_arguments)]
pub fn lowest_ritz(
    op: &dyn Fn(&[f64], &mut [f64]),
    dim: usize,
    nev: usize,
    nconv: usize,
    start: &[f64],
    deflate: &[Vec<f64>],
    cfg: &LanczosConfig,
    rng: &mut impl Rng,
) -> RitzPairs {
    assert!(nev >= 1, "need at least one eigenpair");
    let available = dim.saturating_sub(deflate.len()).max(1);
    let m = cfg.basis_size.max(nev + 6).min(available);
    let nev = nev.min(m);
    let nconv = nconv.clamp(1, nev);

    let mut v0 = start.to_vec();
    project_out(&mut v0, deflate);
    let n0 = norm(&v0);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    if n0 > 1e-12 && n0.is_finite() {
        scale(1.0 / n0, &mut v0);
        basis.push(v0);
    } else {
        basis.push(fresh_direction(dim, &[], deflate, rng).expect("non-empty space"));
    }

    let mut t = vec![0.0; m * m];
    let mut w = vec![0.0; dim];
    let mut coeffs = vec![0.0; m];
    let mut kept = 0usize;

    for restart in 0..=cfg.max_restarts {
        // Extend the basis column by column. `size` is the current basis
        // size once the cycle stops; `beta_last` the norm of the residual `w`.
        let mut size;
        let mut beta_last;
        let mut j = kept;
        let mut exhausted = false;
        loop {
            op(&basis[j], &mut w);
            project_out_once(&mut w, deflate);
            coeffs[..=j].fill(0.0);
            for _ in 0..2 {
                for i in 0..=j {
                    let c = dot(&basis[i], &w);
                    axpy(-c, &basis[i], &mut w);
                    coeffs[i] += c;
                }
            }
            for i in 0..=j {
                t[i * m + j] = coeffs[i];
                t[j * m + i] = coeffs[i];
            }
            let beta = norm(&w);
            size = j + 1;
            beta_last = beta;
            if size == m {
                break;
            }
            let local_scale = coeffs[j].abs().max(beta).max(1.0);
            if beta <= 1e-13 * local_scale {
                // invariant subspace: continue with a fresh direction
                match fresh_direction(dim, &basis[..size], deflate, rng) {
                    Some(v) => {
                        basis.truncate(size);
                        basis.push(v);
                    }
                    None => {
                        exhausted = true;
                        beta_last = 0.0;
                        break;
                    }
                }
                t[size * m + j] = 0.0;
                t[j * m + size] = 0.0;
            } else {
                // cheap early exit for warm starts
                if size >= nconv + 2 && (size - kept) % 6 == 0 {
                    let (theta, y) = small_symmetric_eigen(&t, m, size);
                    let anorm = theta.iter().fold(1.0f64, |a, x| a.max(x.abs()));
                    if (0..nconv).all(|l| beta * y[(size - 1, l)].abs() <= cfg.tol * anorm) {
                        break;
                    }
                }
                let mut v = w.clone();
                scale(1.0 / beta, &mut v);
                basis.truncate(size);
                basis.push(v);
                t[size * m + j] = beta;
                t[j * m + size] = beta;
            }
            j += 1;
        }
        basis.truncate(size);

        let (theta, y) = small_symmetric_eigen(&t, m, size);
        let anorm = theta.iter().fold(1.0f64, |a, x| a.max(x.abs()));
        let estimates: Vec<f64> = (0..size).map(|l| beta_last * y[(size - 1, l)].abs()).collect();
        let nev_here = nev.min(size);
        let converged = estimates[..nconv.min(nev_here)].iter().all(|&r| r <= cfg.tol * anorm);
        let exhausted = exhausted || (beta_last <= 1e-13 * anorm && size == available);

        if converged || exhausted || restart == cfg.max_restarts || size <= nev_here + 1 {
            let vectors = (0..nev_here)
                .map(|l| combine(&basis, (0..size).map(|i| y[(i, l)]), dim))
                .collect();
            return RitzPairs {
                values: theta[..nev_here].to_vec(),
                vectors,
                residual_estimates: estimates[..nev_here].to_vec(),
                restarts: restart,
                converged: converged || exhausted,
            };
        }

        // keep the lowest Ritz vectors plus the residual direction
        let keep = (nev + (size - nev) / 3).max(nev + 1).min(size - 2);
        let mut new_basis: Vec<Vec<f64>> = (0..keep)
            .map(|l| combine(&basis, (0..size).map(|i| y[(i, l)]), dim))
            .collect();
        t.fill(0.0);
        for l in 0..keep {
            t[l * m + l] = theta[l];
        }
        if beta_last > 1e-13 * anorm {
            let mut r = w.clone();
            scale(1.0 / beta_last, &mut r);
            project_out(&mut r, &new_basis);
            let rn = norm(&r);
            scale(1.0 / rn, &mut r);
            for l in 0..keep {
                let c = beta_last * y[(size - 1, l)];
                t[l * m + keep] = c;
                t[keep * m + l] = c;
            }
            new_basis.push(r);
        } else {
            match fresh_direction(dim, &new_basis, deflate, rng) {
                Some(v) => new_basis.push(v),
                None => {
                    let vectors = new_basis[..nev_here].to_vec();
                    return RitzPairs {
                        values: theta[..nev_here].to_vec(),
                        vectors,
                        residual_estimates: estimates[..nev_here].to_vec(),
                        restarts: restart,
                        converged: true,
                    };
                }
            }
        }
        basis = new_basis;
        kept = keep;
    }
    unreachable!("loop returns on the final restart")
}

/// Block Davidson with Olsen's correction.
///
/// `precond(shift, r, out)` applies an approximation of `(A − shift)⁻¹`. With
/// a good one (the diagonal, once the problem term dominates) this needs far fewer products than
/// unpreconditioned Lanczos at tight tolerances. Unlike
/// [`lowest_ritz`], `cfg.tol` is an absolute bound on the true residual norm.
#[allow(clippy::too_many_arguments)]
pub fn lowest_davidson(
    op: &dyn Fn(&[f64], &mut [f64]),
    precond: &dyn Fn(f64, &[f64], &mut [f64]),
    dim: usize,
    nev: usize,
    nconv: usize,
    guesses: &[Vec<f64>],
    cfg: &LanczosConfig,
    rng: &mut impl Rng,
) -> RitzPairs {
    let m = cfg.basis_size.max(3 * nev).min(dim);
    let nev = nev.min(m);
    let nconv = nconv.clamp(1, nev);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut images: Vec<Vec<f64>> = Vec::with_capacity(m);
    let push = |v: Vec<f64>, basis: &mut Vec<Vec<f64>>, images: &mut Vec<Vec<f64>>| -> bool {
        let mut v = v;
        let before = norm(&v);
        project_out(&mut v, basis);
        let after = norm(&v);
        if !(after > 1e-10 * before) || !after.is_finite() {
            return false;
        }
        scale(1.0 / after, &mut v);
        let mut av = vec![0.0; v.len()];
        op(&v, &mut av);
        basis.push(v);
        images.push(av);
        true
    };
    for g in guesses {
        if basis.len() < nev {
            push(g.clone(), &mut basis, &mut images);
        }
    }
    while basis.len() < nev {
        push(random_vector(dim, rng), &mut basis, &mut images);
    }
    let mut g = vec![0.0; m * m];
    let mut filled = 0usize;
    for iter in 0..=cfg.max_restarts * 4 {
        let k = basis.len();
        for j in filled..k {
            for i in 0..=j {
                let v = dot(&basis[i], &images[j]);
                g[i * m + j] = v;
                g[j * m + i] = v;
            }
        }
        filled = k;
        let (theta, y) = small_symmetric_eigen(&g, m, k);
        let mut xs = Vec::with_capacity(nev);
        let mut rs = Vec::with_capacity(nev);
        let mut res = Vec::with_capacity(nev);
        for l in 0..nev {
            let x = combine(&basis, (0..k).map(|i| y[(i, l)]), dim);
            let mut r = combine(&images, (0..k).map(|i| y[(i, l)]), dim);
            axpy(-theta[l], &x, &mut r);
            res.push(norm(&r));
            xs.push(x);
            rs.push(r);
        }
        let converged = res[..nconv].iter().all(|&r| r <= cfg.tol);
        if converged || iter == cfg.max_restarts * 4 {
            return RitzPairs {
                values: theta[..nev].to_vec(),
                vectors: xs,
                residual_estimates: res,
                restarts: iter,
                converged,
            };
        }
        if k + nev > m {
            // thick restart onto the current Ritz block
            let keep = (2 * nev).min(k);
            let new_basis: Vec<Vec<f64>> = (0..keep).map(|l| combine(&basis, (0..k).map(|i| y[(i, l)]), dim)).collect();
            let new_images: Vec<Vec<f64>> = (0..keep).map(|l| combine(&images, (0..k).map(|i| y[(i, l)]), dim)).collect();
            basis = new_basis;
            images = new_images;
            g.fill(0.0);
            for l in 0..keep {
                g[l * m + l] = theta[l];
            }
            filled = keep;
        }
        let mut added = 0;
        for l in 0..nconv {
            if res[l] <= cfg.tol {
                continue;
            }
            let x = &xs[l];
            let r = &rs[l];
            let mut mr = vec![0.0; dim];
            let mut mx = vec![0.0; dim];
            precond(theta[l], r, &mut mr);
            precond(theta[l], x, &mut mx);
            let eps = dot(x, &mr) / dot(x, &mx);
            axpy(-eps, &mx, &mut mr);
            if push(mr, &mut basis, &mut images) {
                added += 1;
            }
        }
        if added == 0 {
            push(random_vector(dim, rng), &mut basis, &mut images);
        }
    }
    unreachable!("loop returns on the last iteration")
}

/// Diagonal preconditioner `(d − shift)⁻¹`, with tiny denominators clamped.
pub fn diagonal_solve(d: &[f64], shift: f64, r: &[f64], out: &mut [f64]) {
    for ((o, &di), &ri) in out.iter_mut().zip(d).zip(r) {
        let mut den = di - shift;
        if den.abs() < 1e-8 {
            den = 1e-8_f64.copysign(den);
        }
        *o = ri / den;
    }
}

fn project_out_once(w: &mut [f64], vectors: &[Vec<f64>]) {
    for v in vectors {
        let c = dot(v, w);
        axpy(-c, v, w);
    }
}
