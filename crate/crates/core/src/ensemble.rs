//! Sample-and-test checking of the states Babe sends.
//!
//! Babe sends `N` states, `m` of them illegal. Adam sets `n` aside at random
//! and tests the other `N − n`; each tested illegal state is caught with
//! probability `δ`. Babe escapes if nothing is caught, so the failure
//! probability is `E[(1 − δ)^T]` with `T` hypergeometric.

use rand::seq::index;
use rand::Rng;
use serde::Serialize;
use statrs::distribution::{Discrete, Hypergeometric};

use crate::error::{Error, Result};
use crate::family::UnitaryFamily;
use crate::par::{count_trials, Estimate, Execution};
use crate::quantum::{hermitian_eigen, CMatrix, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnsembleParams {
    /// States sent.
    pub total: u64,
    /// States set aside untested.
    pub untested: u64,
    /// Illegal states among them.
    pub illegal: u64,
    /// Detection probability of one tested illegal state.
    pub delta: f64,
}

impl EnsembleParams {
    pub fn new(total: u64, untested: u64, illegal: u64, delta: f64) -> Result<Self> {
        let p = EnsembleParams {
            total,
            untested,
            illegal,
            delta,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0 < self.untested && self.untested < self.total) {
            return Err(Error::InvalidParams(format!(
                "need 0 < n < N, got n = {}, N = {}",
                self.untested, self.total
            )));
        }
        if self.illegal > self.total {
            return Err(Error::InvalidParams(format!(
                "m = {} exceeds N = {}",
                self.illegal, self.total
            )));
        }
        if !(0.0..=1.0).contains(&self.delta) {
            return Err(Error::InvalidParams(format!("δ = {} outside [0, 1]", self.delta)));
        }
        Ok(())
    }

    /// `α = n/N`.
    pub fn alpha(&self) -> f64 {
        self.untested as f64 / self.total as f64
    }

    pub fn tested(&self) -> u64 {
        self.total - self.untested
    }
}

/// `min_k 1 − |⟨ψ'|ψ_k⟩|²`.
pub fn delta_of(psi_prime: &StateVector, legal: &[StateVector]) -> Result<f64> {
    if legal.is_empty() {
        return Err(Error::InvalidParams("empty legal set".into()));
    }
    let mut best = f64::INFINITY;
    for s in legal {
        if s.dim() != psi_prime.dim() {
            return Err(Error::DimensionMismatch(s.dim(), psi_prime.dim()));
        }
        best = best.min(1.0 - psi_prime.fidelity(s)?);
    }
    Ok(best.clamp(0.0, 1.0))
}

/// `Σ_t P(T = t)(1 − δ)^t` with `T ~ Hypergeometric(N, m, N − n)`.
pub fn detection_fail_exact(p: &EnsembleParams) -> Result<f64> {
    p.validate()?;
    let dist = Hypergeometric::new(p.total, p.illegal, p.tested()).map_err(|e| Error::InvalidParams(e.to_string()))?;
    let lo = (p.illegal + p.tested()).saturating_sub(p.total);
    let hi = p.illegal.min(p.tested());
    Ok((lo..=hi)
        .map(|t| dist.pmf(t) * (1.0 - p.delta).powi(t as i32))
        .sum::<f64>()
        .clamp(0.0, 1.0))
}

/// `(1 − δ)^{(1−α)/α}`.
pub fn detection_fail_bound(alpha: f64, delta: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParams(format!("α = {alpha} outside (0, 1)")));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidParams(format!("δ = {delta} outside (0, 1]")));
    }
    Ok((1.0 - delta).powf((1.0 - alpha) / alpha))
}

/// `(1 − δ)^{m(1−α)}`, the value at the mean number of tested illegal
/// states.
pub fn mean_field(p: &EnsembleParams) -> f64 {
    (1.0 - p.delta).powf(p.illegal as f64 * (1.0 - p.alpha()))
}

/// Monte Carlo of one round of sample-and-test.
pub fn simulate_ensemble(p: &EnsembleParams, trials: u64, seed: u64, exec: Execution) -> Result<Estimate> {
    p.validate()?;
    let p = *p;
    // the untested set is fixed to the first n slots; the illegal states
    // land uniformly
    let hits = count_trials(exec, seed, trials, move |rng| {
        index::sample(rng, p.total as usize, p.illegal as usize)
            .iter()
            .filter(|&pos| pos as u64 >= p.untested)
            .all(|_| rng.random::<f64>() >= p.delta)
    });
    Ok(Estimate::new(hits, trials))
}

/// Whether the legal states span their whole space, so that any state
/// Babe sends can be written over them.
#[derive(Debug, Clone, Serialize)]
pub struct SpanCheck {
    pub states: usize,
    pub dimension: usize,
    pub rank: usize,
    pub spans: bool,
}

pub fn span_check(family: &UnitaryFamily) -> SpanCheck {
    let states: Vec<StateVector> = (0..family.len()).map(|k| family.pair_state(k, "1", "2")).collect();
    let dimension = states.first().map_or(0, StateVector::dim);
    let gram = CMatrix::from_fn(states.len(), states.len(), |a, b| {
        states[b].inner(&states[a]).expect("same registers")
    });
    let rank = hermitian_eigen(&gram).0.iter().filter(|&&v| v > 1e-10).count();
    SpanCheck {
        states: states.len(),
        dimension,
        rank,
        spans: rank == dimension,
    }
}

/// One row of the ensemble table.
#[derive(Debug, Clone, Serialize)]
pub struct EnsembleRow {
    #[serde(rename = "N")]
    pub total: u64,
    pub n: u64,
    pub m: u64,
    pub delta: f64,
    pub alpha: f64,
    pub exact: f64,
    pub bound: f64,
    pub empirical: f64,
    /// Four standard errors at the exact value.
    pub band: f64,
}

impl EnsembleRow {
    pub fn in_regime(&self) -> bool {
        self.m as f64 * self.alpha >= 1.0 - 1e-12
    }

    pub fn within_bound(&self) -> bool {
        self.exact <= self.bound + 1e-12
    }

    pub fn simulation_agrees(&self) -> bool {
        (self.empirical - self.exact).abs() <= self.band + 1e-12
    }
}

pub fn ensemble_row(p: &EnsembleParams, trials: u64, seed: u64, exec: Execution) -> Result<EnsembleRow> {
    let exact = detection_fail_exact(p)?;
    let est = simulate_ensemble(p, trials, seed, exec)?;
    Ok(EnsembleRow {
        total: p.total,
        n: p.untested,
        m: p.illegal,
        delta: p.delta,
        alpha: p.alpha(),
        exact,
        bound: detection_fail_bound(p.alpha(), p.delta)?,
        empirical: est.rate(),
        band: 4.0 * est.sigma_at(exact),
    })
}
