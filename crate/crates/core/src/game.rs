//! The repeated checking game between a sender `B` and a checker `A`.
//!
//! Each trial `B` cheats with probability `p_c`; `A` accepts without
//! checking with probability `p_a`. A trial ends the game with a successful
//! cheat, an accepted legal state, or a detection; otherwise it repeats.
//!
//! Two per-trial models are provided. [`Model::Unconditional`] uses the terms
//! `p_c p_a`, `(1 − p_c) p_a`, `p_c p_d`, valid while `p_a + p_c p_d ≤ 1`.
//! [`Model::Partitioned`] detects only on checked trials:
//! `p_c (1 − p_a) p_d`.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::par::{fold_trials, Execution};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GameParams {
    pub p_a: f64,
    pub p_c: f64,
    pub p_d: f64,
    /// Trial horizon.
    pub n: u64,
    /// Detections `B` survives; she loses at detection `n_c + 1`.
    pub n_c: u32,
}

impl GameParams {
    pub fn new(p_a: f64, p_c: f64, p_d: f64, n: u64) -> Result<Self> {
        let p = GameParams {
            p_a,
            p_c,
            p_d,
            n,
            n_c: 0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_allowed_detections(mut self, n_c: u32) -> Self {
        self.n_c = n_c;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("p_a", self.p_a), ("p_c", self.p_c), ("p_d", self.p_d)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParams(format!("{name} = {v} outside [0, 1]")));
            }
        }
        if self.n == 0 {
            return Err(Error::InvalidParams("n must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Unconditional,
    Partitioned,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Unconditional => "unconditional",
            Model::Partitioned => "partitioned",
        }
    }

    /// Per-trial `(cheat success, legal accept, detection, continue)`.
    pub fn step(self, p: &GameParams) -> Result<[f64; 4]> {
        let cheat = p.p_c * p.p_a;
        let legal = (1.0 - p.p_c) * p.p_a;
        let detect = match self {
            Model::Unconditional => p.p_c * p.p_d,
            Model::Partitioned => p.p_c * (1.0 - p.p_a) * p.p_d,
        };
        let cont = 1.0 - cheat - legal - detect;
        if cont < -1e-15 {
            return Err(Error::ModelDomain {
                model: self.name(),
                reason: format!("p_a + p_c·p_d = {} exceeds 1", p.p_a + p.p_c * p.p_d),
            });
        }
        Ok([cheat, legal, detect, cont.max(0.0)])
    }
}

/// Absorbed masses after `n` trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GameOutcomeDist {
    pub p_c: f64,
    pub p_a: f64,
    pub p_d: f64,
    /// Probability the game is still running.
    pub residual: f64,
}

impl GameOutcomeDist {
    pub fn total(&self) -> f64 {
        self.p_c + self.p_a + self.p_d + self.residual
    }
}

/// The three closed forms, verbatim; `residual` is whatever they leave.
pub fn closed_form(p: &GameParams) -> Result<GameOutcomeDist> {
    p.validate()?;
    let (a, c, d, n) = (p.p_a, p.p_c, p.p_d, p.n as i32);
    let ratio = |num: f64, den: f64| if den == 0.0 { 0.0 } else { num / den };
    let pc = ratio(a, a + d) * (1.0 - (1.0 - c * a - c * d).powi(n));
    let pa = ratio(a * (1.0 - c), a * (1.0 - c) + c * d) * (1.0 - (1.0 - a + a * c - c * d).powi(n));
    let pd = ratio(c * d, a + c * d) * (1.0 - (1.0 - a - c * d).powi(n));
    Ok(GameOutcomeDist {
        p_c: pc,
        p_a: pa,
        p_d: pd,
        residual: 1.0 - pc - pa - pd,
    })
}

/// Exact `n`-step recursion of the absorbing chain.
pub fn markov_oracle(p: &GameParams, model: Model) -> Result<GameOutcomeDist> {
    Ok(*markov_path(p, model)?.last().expect("n ≥ 1"))
}

/// Oracle masses after each of trials `1..=n`.
pub fn markov_path(p: &GameParams, model: Model) -> Result<Vec<GameOutcomeDist>> {
    p.validate()?;
    let [cheat, legal, detect, cont] = model.step(p)?;
    let mut alive = 1.0;
    let mut dist = GameOutcomeDist {
        p_c: 0.0,
        p_a: 0.0,
        p_d: 0.0,
        residual: 1.0,
    };
    let mut path = Vec::with_capacity(p.n as usize);
    for _ in 0..p.n {
        dist.p_c += alive * cheat;
        dist.p_a += alive * legal;
        dist.p_d += alive * detect;
        alive *= cont;
        dist.residual = alive;
        path.push(dist);
    }
    Ok(path)
}

/// `p_c p_a [1 − (1 − p_a − p_c p_d)^n] / (p_a + p_c p_d)`: the geometric
/// sum of the per-trial cheat terms.
pub fn geometric_cheat(p: &GameParams) -> f64 {
    let r = 1.0 - p.p_a - p.p_c * p.p_d;
    let den = p.p_a + p.p_c * p.p_d;
    if den == 0.0 {
        return 0.0;
    }
    p.p_c * p.p_a * (1.0 - r.powi(p.n as i32)) / den
}

/// Empirical game outcomes, including the multi-detection variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GameTally {
    pub trials: u64,
    pub cheat: u64,
    pub legal: u64,
    /// Games lost to detection.
    pub lost: u64,
    pub running: u64,
    /// Detections summed over all games.
    pub detections: u64,
}

impl GameTally {
    fn zero() -> Self {
        GameTally {
            trials: 0,
            cheat: 0,
            legal: 0,
            lost: 0,
            running: 0,
            detections: 0,
        }
    }

    fn merge(a: GameTally, b: GameTally) -> GameTally {
        GameTally {
            trials: a.trials + b.trials,
            cheat: a.cheat + b.cheat,
            legal: a.legal + b.legal,
            lost: a.lost + b.lost,
            running: a.running + b.running,
            detections: a.detections + b.detections,
        }
    }

    pub fn dist(&self) -> GameOutcomeDist {
        let t = self.trials.max(1) as f64;
        GameOutcomeDist {
            p_c: self.cheat as f64 / t,
            p_a: self.legal as f64 / t,
            p_d: self.lost as f64 / t,
            residual: self.running as f64 / t,
        }
    }

    /// Four-sigma band at proportion `q`.
    pub fn band(&self, q: f64) -> f64 {
        4.0 * (q * (1.0 - q) / self.trials.max(1) as f64).sqrt()
    }
}

fn play<R: Rng + ?Sized>(p: &GameParams, step: &[f64; 4], rng: &mut R, t: &mut GameTally) {
    t.trials += 1;
    let mut caught = 0u32;
    for _ in 0..p.n {
        let u: f64 = rng.random();
        if u < step[0] {
            t.cheat += 1;
            return;
        }
        if u < step[0] + step[1] {
            t.legal += 1;
            return;
        }
        if u < step[0] + step[1] + step[2] {
            t.detections += 1;
            caught += 1;
            if caught > p.n_c {
                t.lost += 1;
                return;
            }
        }
    }
    t.running += 1;
}

/// Monte Carlo of the game under `model`, honoring `n_c`.
pub fn game_simulate(p: &GameParams, model: Model, trials: u64, seed: u64, exec: Execution) -> Result<GameTally> {
    p.validate()?;
    let step = model.step(p)?;
    let p = *p;
    Ok(fold_trials(
        exec,
        seed,
        trials,
        GameTally::zero,
        move |acc, rng| play(&p, &step, rng, acc),
        GameTally::merge,
    ))
}

/// The game with `n_c` survivable detections.
pub fn multi_cheat_game(p: &GameParams, model: Model, trials: u64, seed: u64, exec: Execution) -> Result<GameTally> {
    game_simulate(p, model, trials, seed, exec)
}

/// Closed forms at horizon `n` along a sequence of `p_c → 0`.
#[derive(Debug, Clone, Serialize)]
pub struct LimitRow {
    pub p_c: f64,
    pub n: u64,
    #[serde(rename = "P_C")]
    pub cheat: f64,
    #[serde(rename = "P_A")]
    pub legal: f64,
    #[serde(rename = "P_D")]
    pub detect: f64,
    pub oracle_cheat: f64,
    pub oracle_legal: f64,
    pub oracle_detect: f64,
}

pub fn limits(p_a: f64, p_d: f64, p_cs: &[f64], n: u64) -> Result<Vec<LimitRow>> {
    if p_d <= 0.0 {
        return Err(Error::InvalidParams("the limits need p_d > 0".into()));
    }
    p_cs.iter()
        .map(|&p_c| {
            let p = GameParams::new(p_a, p_c, p_d, n)?;
            let d = closed_form(&p)?;
            let o = markov_oracle(&p, Model::Partitioned)?;
            Ok(LimitRow {
                oracle_cheat: o.p_c,
                oracle_legal: o.p_a,
                oracle_detect: o.p_d,
                p_c,
                n,
                cheat: d.p_c,
                legal: d.p_a,
                detect: d.p_d,
            })
        })
        .collect()
}

/// Largest `p_c` on `grid` whose oracle detection mass stays within `eps`.
pub fn max_cheat_rate(eps: f64, p_a: f64, p_d: f64, n: u64, grid: &[f64]) -> Result<f64> {
    let mut best = 0.0f64;
    for &p_c in grid {
        let d = markov_oracle(&GameParams::new(p_a, p_c, p_d, n)?, Model::Unconditional)?;
        if d.p_d <= eps {
            best = best.max(p_c);
        }
    }
    Ok(best)
}

/// Closed form against oracle for one parameter point.
#[derive(Debug, Clone, Serialize)]
pub struct DiscrepancyRow {
    pub p_a: f64,
    pub p_c: f64,
    pub p_d: f64,
    pub n: u64,
    pub closed_c: f64,
    pub oracle_c: f64,
    pub closed_a: f64,
    pub oracle_a: f64,
    pub closed_d: f64,
    pub oracle_d: f64,
}

impl DiscrepancyRow {
    pub fn max_abs_diff(&self) -> f64 {
        [
            self.closed_c - self.oracle_c,
            self.closed_a - self.oracle_a,
            self.closed_d - self.oracle_d,
        ]
        .iter()
        .fold(0.0, |m, x| m.max(x.abs()))
    }
}

pub fn discrepancy(p: &GameParams) -> Result<DiscrepancyRow> {
    let c = closed_form(p)?;
    let o = markov_oracle(p, Model::Unconditional)?;
    Ok(DiscrepancyRow {
        p_a: p.p_a,
        p_c: p.p_c,
        p_d: p.p_d,
        n: p.n,
        closed_c: c.p_c,
        oracle_c: o.p_c,
        closed_a: c.p_a,
        oracle_a: o.p_a,
        closed_d: c.p_d,
        oracle_d: o.p_d,
    })
}
