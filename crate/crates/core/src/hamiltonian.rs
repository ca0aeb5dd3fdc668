//! Matrix-free `H(s) = (1 − s)·H_init + s·H_problem` with `H_init = −Σ σ^x_i`.
//!
//! Basis index bit `i` is the qubit of spin `i`; bit 0 is `σ^z = +1`. A single
//! spin flip is `index ^ (1 << i)`, so `H_init` is applied with no allocation.

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::reductions::IsingModel;

pub const DEFAULT_MAX_QUBITS: usize = 24;

#[derive(Debug, Clone)]
pub struct SystemHamiltonian {
    model: IsingModel,
    /// Problem energies times `denominator`, exact.
    diag_exact: Vec<i64>,
    denominator: i64,
    diag: Vec<f64>,
}

impl SystemHamiltonian {
    pub fn build(model: &IsingModel) -> Result<Self> {
        Self::build_with_limit(model, DEFAULT_MAX_QUBITS)
    }

    pub fn build_with_limit(model: &IsingModel, max_qubits: usize) -> Result<Self> {
        let n = model.n();
        if n > max_qubits {
            return Err(Error::TooLarge { n, limit: max_qubits });
        }
        let (den, fields, couplings) = model.integer_form()?;
        let mut neighbors: Vec<Vec<(usize, i64)>> = vec![Vec::new(); n];
        for &(i, j, v) in &couplings {
            neighbors[i].push((j, v));
            neighbors[j].push((i, v));
        }
        let dim = 1usize << n;
        let mut diag_exact = vec![0i64; dim];
        diag_exact[0] = fields.iter().sum::<i64>() + couplings.iter().map(|c| c.2).sum::<i64>();
        for x in 1..dim {
            // turn spin t from +1 to -1 on top of `base`
            let t = x.trailing_zeros() as usize;
            let base = x ^ (1 << t);
            let local: i64 = neighbors[t]
                .iter()
                .map(|&(j, v)| if (x >> j) & 1 == 0 { v } else { -v })
                .sum();
            diag_exact[x] = diag_exact[base] - 2 * (fields[t] + local);
        }
        let scale = den as f64;
        let diag = diag_exact.iter().map(|&e| e as f64 / scale).collect();
        Ok(Self {
            model: model.clone(),
            diag_exact,
            denominator: den,
            diag,
        })
    }

    pub fn n(&self) -> usize {
        self.model.n()
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn model(&self) -> &IsingModel {
        &self.model
    }

    /// Problem energies `E_problem(x)` in double precision.
    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    /// Problem energies scaled by [`Self::denominator`], exact.
    pub fn diag_scaled(&self) -> &[i64] {
        &self.diag_exact
    }

    pub fn denominator(&self) -> i64 {
        self.denominator
    }

    pub fn energy_exact(&self, index: usize) -> Rational {
        Rational::new(self.diag_exact[index], self.denominator)
    }

    /// `out = H(s) v`.
    pub fn apply_h(&self, s: f64, v: &[f64], out: &mut [f64]) -> Result<()> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::ParameterOutOfRange(s));
        }
        self.check_dims(v, out)?;
        self.apply_h_unchecked(s, v, out);
        Ok(())
    }

    /// `out = dH/ds v = (H_problem − H_init) v`.
    pub fn apply_dh(&self, v: &[f64], out: &mut [f64]) -> Result<()> {
        self.check_dims(v, out)?;
        for ((o, d), x) in out.iter_mut().zip(&self.diag).zip(v) {
            *o = d * x;
        }
        add_flip_sum(v, out, 1.0);
        Ok(())
    }

    /// `out = H_init v`.
    pub fn apply_init(&self, v: &[f64], out: &mut [f64]) -> Result<()> {
        self.check_dims(v, out)?;
        out.fill(0.0);
        add_flip_sum(v, out, -1.0);
        Ok(())
    }

    pub(crate) fn apply_h_unchecked(&self, s: f64, v: &[f64], out: &mut [f64]) {
        for ((o, d), x) in out.iter_mut().zip(&self.diag).zip(v) {
            *o = s * d * x;
        }
        if s < 1.0 {
            add_flip_sum(v, out, -(1.0 - s));
        }
    }

    /// `‖H(1)‖ = max |E_problem|`.
    pub fn problem_norm(&self) -> f64 {
        self.diag.iter().fold(0.0f64, |m, d| m.max(d.abs()))
    }

    fn check_dims(&self, v: &[f64], out: &[f64]) -> Result<()> {
        for len in [v.len(), out.len()] {
            if len != self.dim() {
                return Err(Error::DimensionMismatch {
                    expected: self.dim(),
                    got: len,
                });
            }
        }
        Ok(())
    }
}

/// `out[x] += coef · Σ_i v[x ^ (1 << i)]`.
fn add_flip_sum(v: &[f64], out: &mut [f64], coef: f64) {
    let dim = v.len();
    let mut stride = 1;
    while stride < dim {
        for (o, x) in out.chunks_exact_mut(2 * stride).zip(v.chunks_exact(2 * stride)) {
            let (o_lo, o_hi) = o.split_at_mut(stride);
            let (x_lo, x_hi) = x.split_at(stride);
            for (a, b) in o_lo.iter_mut().zip(x_hi) {
                *a += coef * b;
            }
            for (a, b) in o_hi.iter_mut().zip(x_lo) {
                *a += coef * b;
            }
        }
        stride *= 2;
    }
}
