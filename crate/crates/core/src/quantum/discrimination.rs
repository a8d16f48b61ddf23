//! Minimum-error discrimination among several weighted states.

use num_complex::Complex64;

use super::density::{hermitian_eigen, CMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Discrimination {
    /// Probability of identifying the right hypothesis.
    pub success: f64,
    /// POVM element for guessing hypothesis `k`.
    pub povm: Vec<CMatrix>,
    pub iterations: usize,
}

/// `f(H)` for Hermitian `H`, applied on the spectrum.
fn spectral_map(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(m);
    let d = m.nrows();
    let mut out = CMatrix::zeros(d, d);
    for (k, v) in vals.iter().enumerate() {
        let col = vecs.column(k);
        out += (col * col.adjoint()) * Complex64::new(f(*v), 0.0);
    }
    out
}

fn inv_sqrt(m: &CMatrix) -> CMatrix {
    spectral_map(m, |v| if v > 1e-300 { 1.0 / v.sqrt() } else { 0.0 })
}

fn success_of(weighted: &[CMatrix], povm: &[CMatrix]) -> f64 {
    weighted.iter().zip(povm).map(|(r, p)| (r * p).trace().re).sum()
}

fn check_inputs(weighted: &[CMatrix]) -> Result<usize> {
    let d = weighted
        .first()
        .map(|m| m.nrows())
        .ok_or_else(|| Error::InvalidParams("no hypotheses".into()))?;
    if let Some(m) = weighted.iter().find(|m| m.nrows() != d || m.ncols() != d) {
        return Err(Error::DimensionMismatch(m.nrows(), d));
    }
    Ok(d)
}

/// Square-root ("pretty good") measurement. Its success is a lower bound on
/// the optimum.
pub fn pretty_good_measurement(weighted: &[CMatrix]) -> Result<Discrimination> {
    let d = check_inputs(weighted)?;
    let total = weighted.iter().fold(CMatrix::zeros(d, d), |acc, r| acc + r);
    let s = inv_sqrt(&total);
    let povm: Vec<CMatrix> = weighted.iter().map(|r| &s * r * &s).collect();
    Ok(Discrimination {
        success: success_of(weighted, &povm),
        povm,
        iterations: 0,
    })
}

/// Optimal minimum-error measurement for hypotheses given as prior-weighted
/// density matrices `p_k ρ_k`, by the fixed-point iteration
/// `Π_k ← G^{-1/2} ρ_k Π_k ρ_k G^{-1/2}`, `G = Σ_k ρ_k Π_k ρ_k`.
/// Iterates until the success probability changes by less than `tol`.
pub fn min_error_discrimination(weighted: &[CMatrix], tol: f64, max_iter: usize) -> Result<Discrimination> {
    let d = check_inputs(weighted)?;
    let m = weighted.len();
    let mut povm: Vec<CMatrix> = (0..m)
        .map(|_| CMatrix::identity(d, d) * Complex64::new(1.0 / m as f64, 0.0))
        .collect();
    let mut last = success_of(weighted, &povm);
    for it in 1..=max_iter {
        let g = weighted
            .iter()
            .zip(&povm)
            .fold(CMatrix::zeros(d, d), |acc, (r, p)| acc + r * p * r);
        let gs = inv_sqrt(&g);
        povm = weighted
            .iter()
            .zip(&povm)
            .map(|(r, p)| {
                let e = &gs * r * p * r * &gs;
                (&e + e.adjoint()) * Complex64::new(0.5, 0.0)
            })
            .collect();
        let now = success_of(weighted, &povm);
        if (now - last).abs() < tol {
            return Ok(Discrimination {
                success: now,
                povm,
                iterations: it,
            });
        }
        last = now;
    }
    Ok(Discrimination {
        success: last,
        povm,
        iterations: max_iter,
    })
}

/// Holevo–Yuen–Kennedy–Lax optimality gap: the largest violation of
/// `Σ_j ρ_j Π_j − ρ_k ⪰ 0`. Zero (up to rounding) certifies optimality.
pub fn optimality_gap(weighted: &[CMatrix], povm: &[CMatrix]) -> f64 {
    let d = weighted[0].nrows();
    let lagrange = weighted
        .iter()
        .zip(povm)
        .fold(CMatrix::zeros(d, d), |acc, (r, p)| acc + r * p);
    let lagrange = (&lagrange + lagrange.adjoint()) * Complex64::new(0.5, 0.0);
    weighted
        .iter()
        .map(|r| -hermitian_eigen(&(&lagrange - r)).0[0])
        .fold(0.0, f64::max)
}
