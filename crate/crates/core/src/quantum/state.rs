//! Pure states on small labeled qubit registers.
//!
//! Amplitudes are stored in the computational basis with the first label as
//! the most significant bit, so `tensor` order is label order.

use std::collections::HashSet;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::density::DensityMatrix;
use super::gates::Unitary2;
use crate::error::{Error, Result};

pub const NORM_TOL: f64 = 1e-12;
pub const MAX_QUBITS: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    labels: Vec<String>,
    amplitudes: Vec<Complex64>,
}

/// Result of a projective measurement.
#[derive(Debug, Clone)]
pub struct Measurement {
    pub outcome: usize,
    /// Born probability of every basis element, in basis order.
    pub probabilities: Vec<f64>,
    /// Renormalized projected state on the full register.
    pub post_state: StateVector,
}

/// Bit positions of `targets` inside a register with `labels`, most
/// significant first.
fn positions(labels: &[String], targets: &[&str]) -> Result<Vec<usize>> {
    let q = labels.len();
    let mut seen = HashSet::new();
    targets
        .iter()
        .map(|t| {
            if !seen.insert(*t) {
                return Err(Error::DuplicateLabel(t.to_string()));
            }
            labels
                .iter()
                .position(|l| l == t)
                .map(|p| q - 1 - p)
                .ok_or_else(|| Error::UnknownLabel(t.to_string()))
        })
        .collect()
}

/// Scatters the bits of `sub` (most significant first) into `bits`.
fn scatter(sub: usize, bits: &[usize]) -> usize {
    let m = bits.len();
    bits.iter()
        .enumerate()
        .filter(|(j, _)| (sub >> (m - 1 - j)) & 1 == 1)
        .fold(0, |acc, (_, &b)| acc | (1 << b))
}

fn check_labels(labels: &[String]) -> Result<()> {
    let mut seen = HashSet::new();
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(Error::DuplicateLabel(l.clone()));
        }
    }
    if labels.len() > MAX_QUBITS {
        return Err(Error::InvalidParams(format!(
            "{} qubits exceeds the register limit of {MAX_QUBITS}",
            labels.len()
        )));
    }
    Ok(())
}

impl StateVector {
    /// Builds a state, requiring unit norm within [`NORM_TOL`].
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>, amplitudes: Vec<Complex64>) -> Result<Self> {
        let s = Self::unnormalized(labels, amplitudes)?;
        let n2 = s.norm_sqr();
        if (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(n2));
        }
        Ok(s)
    }

    /// Builds a state and rescales it to unit norm.
    pub fn normalized<S: Into<String>>(
        labels: impl IntoIterator<Item = S>,
        amplitudes: Vec<Complex64>,
    ) -> Result<Self> {
        let mut s = Self::unnormalized(labels, amplitudes)?;
        let n = s.norm_sqr().sqrt();
        if n == 0.0 {
            return Err(Error::NotNormalized(0.0));
        }
        s.amplitudes.iter_mut().for_each(|a| *a /= n);
        Ok(s)
    }

    fn unnormalized<S: Into<String>>(labels: impl IntoIterator<Item = S>, amplitudes: Vec<Complex64>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        check_labels(&labels)?;
        if amplitudes.len() != 1 << labels.len() {
            return Err(Error::BadLength {
                len: amplitudes.len(),
                qubits: labels.len(),
            });
        }
        Ok(StateVector { labels, amplitudes })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis<S: Into<String>>(labels: impl IntoIterator<Item = S>, index: usize) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let dim = 1usize << labels.len();
        if index >= dim {
            return Err(Error::InvalidParams(format!("basis index {index} >= {dim}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Self::new(labels, amps)
    }

    /// `|bit⟩` on a single qubit.
    pub fn bit(label: impl Into<String>, bit: u8) -> Self {
        Self::basis([label.into()], usize::from(bit & 1)).expect("single qubit basis state")
    }

    /// `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
    pub fn bloch(label: impl Into<String>, theta: f64, phi: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        StateVector {
            labels: vec![label.into()],
            amplitudes: vec![Complex64::new(c, 0.0), Complex64::from_polar(s, phi)],
        }
    }

    /// Haar-random state on the given labels.
    pub fn random<R: Rng + ?Sized, S: Into<String>>(labels: impl IntoIterator<Item = S>, rng: &mut R) -> Self {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let dim = 1usize << labels.len();
        loop {
            let amps: Vec<Complex64> = (0..dim).map(|_| Complex64::new(gaussian(rng), gaussian(rng))).collect();
            if let Ok(s) = Self::normalized(labels.clone(), amps) {
                return s;
            }
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn has_label(&self, label: &str) -> bool {
        self.labels.iter().any(|l| l == label)
    }

    pub fn scaled(&self, phase: Complex64) -> Self {
        StateVector {
            labels: self.labels.clone(),
            amplitudes: self.amplitudes.iter().map(|a| a * phase).collect(),
        }
    }

    /// Same amplitudes under new names.
    pub fn relabeled<S: Into<String>>(&self, labels: impl IntoIterator<Item = S>) -> Result<Self> {
        Self::unnormalized(labels, self.amplitudes.clone())
    }

    /// Kronecker product; labels are concatenated.
    pub fn tensor(&self, other: &StateVector) -> Result<Self> {
        let overlap: Vec<String> = self.labels.iter().filter(|l| other.has_label(l)).cloned().collect();
        if !overlap.is_empty() {
            return Err(Error::OverlappingLabels(overlap));
        }
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        check_labels(&labels)?;
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Ok(StateVector { labels, amplitudes })
    }

    /// Applies `u` to the qubit named `target`, identity elsewhere.
    pub fn apply_unitary(&self, u: &Unitary2, target: &str) -> Result<Self> {
        let bit = positions(&self.labels, &[target])?[0];
        let mask = 1usize << bit;
        let mut out = self.amplitudes.clone();
        for i in 0..self.dim() {
            if i & mask == 0 {
                let [a0, a1] = u.apply([self.amplitudes[i], self.amplitudes[i | mask]]);
                out[i] = a0;
                out[i | mask] = a1;
            }
        }
        Ok(StateVector {
            labels: self.labels.clone(),
            amplitudes: out,
        })
    }

    /// The same physical state with its qubits listed in `order`.
    pub fn permuted(&self, order: &[&str]) -> Result<Self> {
        if order.len() != self.labels.len() {
            return Err(Error::DimensionMismatch(order.len(), self.labels.len()));
        }
        let bits = positions(&self.labels, order)?;
        let amplitudes = (0..self.dim())
            .map(|new| self.amplitudes[scatter(new, &bits)])
            .collect();
        Ok(StateVector {
            labels: order.iter().map(|s| s.to_string()).collect(),
            amplitudes,
        })
    }

    /// `⟨self|other⟩`; `other` is reordered to match this register.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        let order: Vec<&str> = self.labels.iter().map(String::as_str).collect();
        let other = if other.labels == self.labels {
            std::borrow::Cow::Borrowed(other)
        } else {
            std::borrow::Cow::Owned(other.permuted(&order)?)
        };
        Ok(self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨self|other⟩|²`, insensitive to global phase.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Applies the bra `⟨bra|` to the `bra.labels()` subsystem and returns the
    /// unnormalized remainder on the other qubits.
    pub fn contract(&self, bra: &StateVector) -> Result<StateVector> {
        let targets: Vec<&str> = bra.labels.iter().map(String::as_str).collect();
        let tbits = positions(&self.labels, &targets)?;
        let rest_labels: Vec<String> = self.labels.iter().filter(|l| !bra.has_label(l)).cloned().collect();
        let rest_refs: Vec<&str> = rest_labels.iter().map(String::as_str).collect();
        let rbits = positions(&self.labels, &rest_refs)?;
        let amplitudes = (0..1usize << rbits.len())
            .map(|r| {
                let base = scatter(r, &rbits);
                bra.amplitudes
                    .iter()
                    .enumerate()
                    .map(|(t, b)| b.conj() * self.amplitudes[base | scatter(t, &tbits)])
                    .sum()
            })
            .collect();
        Ok(StateVector {
            labels: rest_labels,
            amplitudes,
        })
    }

    /// Born probabilities of an orthonormal basis on a subset of qubits,
    /// together with the unnormalized remainders `⟨e_k|ψ⟩`.
    pub fn projective_branches(&self, basis: &[StateVector]) -> Result<Vec<(f64, StateVector)>> {
        validate_basis(basis)?;
        basis
            .iter()
            .map(|e| {
                let rest = self.contract(e)?;
                Ok((rest.norm_sqr(), rest))
            })
            .collect()
    }

    /// Measures the qubits spanned by `basis` and samples an outcome.
    pub fn measure_projective<R: Rng + ?Sized>(&self, basis: &[StateVector], rng: &mut R) -> Result<Measurement> {
        let branches = self.projective_branches(basis)?;
        let probabilities: Vec<f64> = branches.iter().map(|(p, _)| *p).collect();
        let outcome = sample_index(&probabilities, rng);
        self.finish_measurement(basis, branches, outcome)
    }

    /// Projects onto a chosen outcome (post-selection).
    pub fn measure_projective_forced(&self, basis: &[StateVector], outcome: usize) -> Result<Measurement> {
        let branches = self.projective_branches(basis)?;
        if outcome >= branches.len() {
            return Err(Error::InvalidParams(format!("outcome {outcome} out of range")));
        }
        if branches[outcome].0 <= 0.0 {
            return Err(Error::InvalidParams(format!("outcome {outcome} has probability zero")));
        }
        self.finish_measurement(basis, branches, outcome)
    }

    fn finish_measurement(
        &self,
        basis: &[StateVector],
        branches: Vec<(f64, StateVector)>,
        outcome: usize,
    ) -> Result<Measurement> {
        let probabilities: Vec<f64> = branches.iter().map(|(p, _)| *p).collect();
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized(total));
        }
        let (p, rest) = &branches[outcome];
        let rest = rest.scaled(Complex64::new(1.0 / p.sqrt(), 0.0));
        let order: Vec<&str> = self.labels.iter().map(String::as_str).collect();
        let post_state = basis[outcome].tensor(&rest)?.permuted(&order)?;
        Ok(Measurement {
            outcome,
            probabilities,
            post_state,
        })
    }

    /// Reduced state on `keep` (in the order given).
    pub fn partial_trace(&self, keep: &[&str]) -> Result<DensityMatrix> {
        if keep.is_empty() {
            return Err(Error::EmptyKeep);
        }
        let kbits = positions(&self.labels, keep)?;
        let rest: Vec<&str> = self
            .labels
            .iter()
            .map(String::as_str)
            .filter(|l| !keep.contains(l))
            .collect();
        let rbits = positions(&self.labels, &rest)?;
        let dk = 1usize << kbits.len();
        let mut m = nalgebra::DMatrix::<Complex64>::zeros(dk, dk);
        for r in 0..1usize << rbits.len() {
            let base = scatter(r, &rbits);
            for i in 0..dk {
                let ai = self.amplitudes[base | scatter(i, &kbits)];
                if ai == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..dk {
                    let aj = self.amplitudes[base | scatter(j, &kbits)];
                    m[(i, j)] += ai * aj.conj();
                }
            }
        }
        DensityMatrix::new(keep.iter().map(|s| s.to_string()).collect(), m)
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn to_density(&self) -> DensityMatrix {
        let d = self.dim();
        let m = nalgebra::DMatrix::from_fn(d, d, |i, j| self.amplitudes[i] * self.amplitudes[j].conj());
        DensityMatrix::from_parts_unchecked(self.labels.clone(), m)
    }
}

/// Checks that `basis` is a complete orthonormal family on one register.
pub fn validate_basis(basis: &[StateVector]) -> Result<()> {
    let first = basis.first().ok_or(Error::IncompleteBasis { got: 0, expected: 1 })?;
    if basis.len() != first.dim() {
        return Err(Error::IncompleteBasis {
            got: basis.len(),
            expected: first.dim(),
        });
    }
    let mut worst = 0.0f64;
    if let Some(e) = basis.iter().find(|e| e.num_qubits() != first.num_qubits()) {
        return Err(Error::DimensionMismatch(e.dim(), first.dim()));
    }
    for (a, ea) in basis.iter().enumerate() {
        for (b, eb) in basis.iter().enumerate() {
            let target = if a == b { 1.0 } else { 0.0 };
            let ip = ea.inner(eb)?;
            worst = worst.max((ip - Complex64::new(target, 0.0)).norm());
        }
    }
    if worst > 1e-10 {
        return Err(Error::NotOrthonormal(worst));
    }
    Ok(())
}

/// Samples an index with the given (approximately normalized) weights.
pub fn sample_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            return i;
        }
        u -= w;
    }
    // rounding: fall back to the last index with positive weight
    weights.iter().rposition(|w| *w > 0.0).unwrap_or(0)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box-Muller
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
