//! The course where Adam measures the whole pair to learn `U_k` and then
//! prepares the qubit Babe expects.
//!
//! The pair is lost to the measurement, so Adam announces `i` without a
//! Bell measurement. On outcome `g` of his POVM he prepares the top
//! eigenvector of `M_g = Σ_k λ_k p(g|k) |t_k⟩⟨t_k|` with
//! `t_k = U_k σ_i |b⟩`, which is the best state to return given `g`.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use super::formulas::{ket, Qubit};
use crate::error::Result;
use crate::family::UnitaryFamily;
use crate::quantum::{hermitian_eigen, min_error_discrimination, optimality_gap, pretty_good_measurement, CMatrix};
use crate::teleport::BellOutcome;

#[derive(Debug, Clone, Serialize)]
pub struct DiscriminationCourse {
    pub i: BellOutcome,
    pub b: u8,
    /// Optimal probability of identifying `k` from the pair.
    pub identify: f64,
    /// Success of the square-root measurement, a lower bound on `identify`.
    pub identify_pgm: f64,
    /// Optimality certificate gap of the identifying POVM.
    pub gap: f64,
    /// Acceptance when Adam returns `U_g σ_i |b⟩` for his guess `g`.
    pub guess_then_prepare: f64,
    /// Acceptance when Adam returns the best state for each outcome.
    pub value: f64,
    #[serde(skip)]
    pub povm: Vec<CMatrix>,
    /// State returned on each POVM outcome.
    #[serde(skip)]
    pub prepared: Vec<Qubit>,
}

/// `|Ψ_k⟩ = (U_k ⊗ I)Ψ⁻` as column vectors.
pub fn pair_vectors(family: &UnitaryFamily) -> Vec<DVector<Complex64>> {
    (0..family.len())
        .map(|k| DVector::from_column_slice(family.pair_state(k, "1", "2").amplitudes()))
        .collect()
}

/// `p(g|k) = ⟨Ψ_k|Π_g|Ψ_k⟩`.
pub fn outcome_probabilities(povm: &[CMatrix], pair: &DVector<Complex64>) -> Vec<f64> {
    povm.iter()
        .map(|p| (pair.adjoint() * p * pair)[(0, 0)].re.max(0.0))
        .collect()
}

pub fn discrimination_course(family: &UnitaryFamily, i: BellOutcome, b: u8) -> Result<DiscriminationCourse> {
    let pairs = pair_vectors(family);
    let weighted: Vec<CMatrix> = pairs
        .iter()
        .zip(family.weights())
        .map(|(v, w)| v * v.adjoint() * Complex64::new(w, 0.0))
        .collect();
    let best = min_error_discrimination(&weighted, 1e-13, 20_000)?;
    let pgm = pretty_good_measurement(&weighted)?;

    let s = i.sigma();
    let targets: Vec<Qubit> = (0..family.len())
        .map(|k| (family.unitary(k) * &s).apply(ket(b)))
        .collect();
    let likelihood: Vec<Vec<f64>> = pairs.iter().map(|p| outcome_probabilities(&best.povm, p)).collect();

    let mut value = 0.0;
    let mut guess_then_prepare = 0.0;
    let mut prepared = Vec::with_capacity(family.len());
    for g in 0..best.povm.len() {
        let mut m = CMatrix::zeros(2, 2);
        for (k, t) in targets.iter().enumerate() {
            let w = family.weight(k) * likelihood[k][g];
            let col = nalgebra::Vector2::new(t[0], t[1]);
            let outer = col * col.adjoint() * Complex64::new(w, 0.0);
            for r in 0..2 {
                for c in 0..2 {
                    m[(r, c)] += outer[(r, c)];
                }
            }
        }
        let (vals, vecs) = hermitian_eigen(&m);
        value += vals[1];
        prepared.push([vecs[(0, 1)], vecs[(1, 1)]]);
        let tg = targets[g];
        guess_then_prepare += (0..family.len())
            .map(|k| {
                let t = targets[k];
                let ov = t[0].conj() * tg[0] + t[1].conj() * tg[1];
                family.weight(k) * likelihood[k][g] * ov.norm_sqr()
            })
            .sum::<f64>();
    }
    Ok(DiscriminationCourse {
        i,
        b,
        identify: best.success,
        identify_pgm: pgm.success,
        gap: optimality_gap(&weighted, &best.povm),
        guess_then_prepare,
        value,
        povm: best.povm,
        prepared,
    })
}
