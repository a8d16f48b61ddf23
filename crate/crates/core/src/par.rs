//! Data-parallel execution with a sequential fallback.
//!
//! Monte Carlo work is split into fixed-size blocks; block `b` draws from
//! ChaCha8 stream `b` of the run seed. Results are combined in block order,
//! so output is identical for either [`Execution`] mode and any thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub type TrialRng = ChaCha8Rng;

/// Trials per RNG stream.
pub const BLOCK: u64 = 4096;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Rayon thread pool; falls back to sequential without the `parallel` feature.
    #[default]
    Parallel,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// RNG for stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Maps `f` over `items`, preserving order.
pub fn map<T, U, F>(exec: Execution, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Maps `f` over `0..n`, preserving order.
pub fn map_range<U, F>(exec: Execution, n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// Runs `trials` Monte Carlo trials. Each block starts from `init()`, every
/// trial calls `step(acc, rng)`, and block accumulators are merged in order.
pub fn fold_trials<A, I, S, M>(exec: Execution, seed: u64, trials: u64, init: I, step: S, merge: M) -> A
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    S: Fn(&mut A, &mut TrialRng) + Sync + Send,
    M: Fn(A, A) -> A,
{
    let blocks = trials.div_ceil(BLOCK) as usize;
    let run_block = |b: usize| {
        let mut rng = stream_rng(seed, b as u64);
        let mut acc = init();
        let start = b as u64 * BLOCK;
        let end = (start + BLOCK).min(trials);
        for _ in start..end {
            step(&mut acc, &mut rng);
        }
        acc
    };
    map_range(exec, blocks, run_block).into_iter().fold(init(), merge)
}

/// Number of trials for which `trial` returns `true`.
pub fn count_trials<F>(exec: Execution, seed: u64, trials: u64, trial: F) -> u64
where
    F: Fn(&mut TrialRng) -> bool + Sync + Send,
{
    fold_trials(
        exec,
        seed,
        trials,
        || 0u64,
        |acc, rng| *acc += u64::from(trial(rng)),
        |a, b| a + b,
    )
}

/// Binomial proportion with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Estimate {
    pub successes: u64,
    pub trials: u64,
}

impl Estimate {
    pub fn new(successes: u64, trials: u64) -> Self {
        Estimate { successes, trials }
    }

    pub fn rate(&self) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        self.successes as f64 / self.trials as f64
    }

    /// Standard error of the rate under the hypothesis `p`.
    pub fn sigma_at(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.trials.max(1) as f64).sqrt()
    }

    /// Whether the rate lies within `k` standard errors of `p`. When `p` is
    /// 0 or 1 the rate must match exactly.
    pub fn consistent_with(&self, p: f64, k: f64) -> bool {
        (self.rate() - p).abs() <= k * self.sigma_at(p) + 1e-12
    }
}
