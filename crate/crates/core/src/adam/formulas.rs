//! Adam's success probability for each cheating course, as a function of
//! his correction `V`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::family::UnitaryFamily;
use crate::quantum::Unitary2;
use crate::teleport::BellOutcome;

pub type Qubit = [Complex64; 2];

pub fn ket(b: u8) -> Qubit {
    let (z, o) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    if b == 0 {
        [o, z]
    } else {
        [z, o]
    }
}

/// Bloch-sphere qubit `cos(θ/2)|0⟩ + e^{iϕ} sin(θ/2)|1⟩`.
pub fn bloch(theta: f64, phi: f64) -> Qubit {
    let (s, c) = (theta / 2.0).sin_cos();
    [Complex64::new(c, 0.0), Complex64::from_polar(s, phi)]
}

fn braket(c: &Qubit, a: &Qubit) -> Complex64 {
    c[0].conj() * a[0] + c[1].conj() * a[1]
}

/// Which course of action Adam takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Strategy {
    /// Teleport `|0⟩` honestly, then rotate toward `|1⟩`.
    S1,
    /// Announce `i` without measuring; teleport `|φ⟩` at opening, see `j`,
    /// then rotate.
    S2,
    /// Announce `i`; return a fresh `V|φ⟩`.
    S3,
    /// Measure the pair to identify `U_k`, then prepare the opening state.
    Discriminate,
}

impl Strategy {
    pub const OPTIMIZED: [Strategy; 3] = [Strategy::S1, Strategy::S2, Strategy::S3];
    pub const ALL: [Strategy; 4] = [Strategy::S1, Strategy::S2, Strategy::S3, Strategy::Discriminate];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::S1 => "s1",
            Strategy::S2 => "s2",
            Strategy::S3 => "s3",
            Strategy::Discriminate => "discriminate",
        }
    }
}

/// `Σ_k λ_k |⟨c_k|V|a_k⟩|²`: the common shape of every course.
#[derive(Debug, Clone)]
pub struct OverlapSum {
    terms: Vec<(f64, Qubit, Qubit)>,
}

impl OverlapSum {
    /// Terms `(λ_k, a_k, c_k)`.
    pub fn new(terms: Vec<(f64, Qubit, Qubit)>) -> Self {
        OverlapSum { terms }
    }

    pub fn terms(&self) -> &[(f64, Qubit, Qubit)] {
        &self.terms
    }

    pub fn eval(&self, v: &Unitary2) -> f64 {
        self.terms
            .iter()
            .map(|(w, a, c)| w * braket(c, &v.apply(*a)).norm_sqr())
            .sum()
    }

    /// Individual `|⟨c_k|V|a_k⟩|²`, unweighted.
    pub fn summands(&self, v: &Unitary2) -> Vec<f64> {
        self.terms
            .iter()
            .map(|(_, a, c)| braket(c, &v.apply(*a)).norm_sqr())
            .collect()
    }

    /// Upper bound on `|f(V) − f(W)| / ‖V − W‖` in operator norm.
    pub fn lipschitz(&self) -> f64 {
        2.0 * self.terms.iter().map(|t| t.0).sum::<f64>()
    }
}

/// `U_k σ_i |x⟩` for every member.
fn images(family: &UnitaryFamily, i: BellOutcome, x: Qubit) -> Vec<Qubit> {
    let s = i.sigma();
    (0..family.len()).map(|k| (family.unitary(k) * &s).apply(x)).collect()
}

/// First course: commit `|0⟩`, try to open 1.
pub fn s1_objective(family: &UnitaryFamily, i: BellOutcome) -> OverlapSum {
    let a = images(family, i, ket(0));
    let c = images(family, i, ket(1));
    OverlapSum::new(
        family
            .weights()
            .into_iter()
            .zip(a)
            .zip(c)
            .map(|((w, a), c)| (w, a, c))
            .collect(),
    )
}

/// Second course for a fixed teleportation result `j`.
pub fn s2_objective(family: &UnitaryFamily, i: BellOutcome, j: BellOutcome, b: u8, phi: Qubit) -> OverlapSum {
    let a = images(family, j, phi);
    let c = images(family, i, ket(b));
    OverlapSum::new(
        family
            .weights()
            .into_iter()
            .zip(a)
            .zip(c)
            .map(|((w, a), c)| (w, a, c))
            .collect(),
    )
}

/// Third course; `V|φ⟩` does not depend on `k`.
pub fn s3_objective(family: &UnitaryFamily, i: BellOutcome, b: u8, phi: Qubit) -> OverlapSum {
    let c = images(family, i, ket(b));
    OverlapSum::new(family.weights().into_iter().zip(c).map(|(w, c)| (w, phi, c)).collect())
}

/// `Σ_k λ_k |⟨1|σ_i† U_k† V U_k σ_i|0⟩|²`.
pub fn cheat_prob_s1(family: &UnitaryFamily, i: BellOutcome, v: &Unitary2) -> f64 {
    let s = i.sigma();
    family
        .members()
        .iter()
        .map(|m| {
            let op = s.adjoint() * m.unitary.adjoint() * *v * m.unitary * s;
            m.weight * op.entry(1, 0).norm_sqr()
        })
        .sum()
}

/// `Σ_k λ_k |⟨b|σ_i† U_k† V U_k σ_j|φ⟩|²`.
pub fn cheat_prob_s2(family: &UnitaryFamily, i: BellOutcome, j: BellOutcome, b: u8, phi: Qubit, v: &Unitary2) -> f64 {
    let (si, sj) = (i.sigma(), j.sigma());
    family
        .members()
        .iter()
        .map(|m| {
            let op = si.adjoint() * m.unitary.adjoint() * *v * m.unitary * sj;
            m.weight * op.apply(phi)[b as usize].norm_sqr()
        })
        .sum()
}

/// `Σ_k λ_k |⟨b|σ_i† U_k† V|φ⟩|²`.
pub fn cheat_prob_s3(family: &UnitaryFamily, i: BellOutcome, b: u8, phi: Qubit, v: &Unitary2) -> f64 {
    let si = i.sigma();
    family
        .members()
        .iter()
        .map(|m| {
            let op = si.adjoint() * m.unitary.adjoint() * *v;
            m.weight * op.apply(phi)[b as usize].norm_sqr()
        })
        .sum()
}

/// Second course averaged over the teleportation result: `φ` is fixed before
/// `j` is known, and `v[j]` is used after seeing `j`. Each `j` occurs with
/// probability 1/4.
pub fn cheat_prob_s2_averaged(family: &UnitaryFamily, i: BellOutcome, b: u8, phi: Qubit, v: &[Unitary2; 4]) -> f64 {
    BellOutcome::all()
        .iter()
        .zip(v)
        .map(|(&j, vj)| 0.25 * cheat_prob_s2(family, i, j, b, phi, vj))
        .sum()
}
