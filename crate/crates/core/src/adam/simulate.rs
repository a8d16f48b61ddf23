//! End-to-end runs of each cheating course through the protocol, with Babe's
//! ordinary verification deciding the outcome.

use nalgebra::DVector;
use rand::Rng;

use super::discriminate::outcome_probabilities;
use super::formulas::{cheat_prob_s1, cheat_prob_s2_averaged, ket, Qubit};
use super::{discrimination_course, optimize_cheat, CheatObjective, Method, SearchOptions, Strategy};
use crate::error::Result;
use crate::family::UnitaryFamily;
use crate::par::{count_trials, Estimate, Execution};
use crate::protocol::{
    adam_commit, babe_prepare, babe_verify, Commitment, Opening, ProtocolParams, TeleportedQubit, Verdict,
};
use crate::quantum::{sample_index, CMatrix, StateVector, Unitary2};
use crate::teleport::{teleport, BellOutcome};

/// A fully specified cheating Adam for a single-pair stage.
#[derive(Debug, Clone)]
pub enum CheatPlan {
    /// Commit `|0⟩`, apply `v[slot of i]`, claim 1.
    S1 { v: [Unitary2; 4] },
    /// Announce `i`, teleport `φ` at opening, apply `v[slot of j]`, claim `b`.
    S2 {
        i: BellOutcome,
        b: u8,
        phi: Qubit,
        v: [Unitary2; 4],
    },
    /// Announce `i`, return `state`, claim `b`.
    S3 { i: BellOutcome, b: u8, state: Qubit },
    /// Measure the pair, return `prepared[g]` on outcome `g`, claim `b`.
    Discriminate {
        i: BellOutcome,
        b: u8,
        povm: Vec<CMatrix>,
        prepared: Vec<Qubit>,
    },
}

fn qubit(label: &str, q: Qubit) -> StateVector {
    StateVector::normalized([label], q.to_vec()).expect("nonzero qubit")
}

impl CheatPlan {
    /// The optimized plan for `strategy` with outcome `i` and bit `b`
    /// (the first course always claims 1 and uses every outcome).
    pub fn optimized(
        strategy: Strategy,
        family: &UnitaryFamily,
        i: BellOutcome,
        b: u8,
        opts: &SearchOptions,
    ) -> Result<CheatPlan> {
        Ok(match strategy {
            Strategy::S1 => {
                let mut v = [Unitary2::identity(); 4];
                for o in BellOutcome::all() {
                    let r = optimize_cheat(&CheatObjective::s1(family.clone(), o), Method::Grid, opts)?;
                    v[o.slot()] = r.v[0];
                }
                CheatPlan::S1 { v }
            }
            Strategy::S2 => {
                let r = optimize_cheat(&CheatObjective::s2_averaged(family.clone(), i, b), Method::Grid, opts)?;
                CheatPlan::S2 {
                    i,
                    b,
                    phi: r.phi.expect("optimized φ"),
                    v: std::array::from_fn(|k| r.v[k]),
                }
            }
            Strategy::S3 => {
                let r = optimize_cheat(&CheatObjective::s3(family.clone(), i, b, ket(0)), Method::Grid, opts)?;
                CheatPlan::S3 {
                    i,
                    b,
                    state: r.v[0].apply(ket(0)),
                }
            }
            Strategy::Discriminate => {
                let c = discrimination_course(family, i, b)?;
                CheatPlan::Discriminate {
                    i,
                    b,
                    povm: c.povm,
                    prepared: c.prepared,
                }
            }
        })
    }

    pub fn strategy(&self) -> Strategy {
        match self {
            CheatPlan::S1 { .. } => Strategy::S1,
            CheatPlan::S2 { .. } => Strategy::S2,
            CheatPlan::S3 { .. } => Strategy::S3,
            CheatPlan::Discriminate { .. } => Strategy::Discriminate,
        }
    }

    /// Acceptance probability of one stage, from the formulas.
    pub fn expected(&self, family: &UnitaryFamily) -> f64 {
        match self {
            CheatPlan::S1 { v } => BellOutcome::all()
                .iter()
                .map(|&o| 0.25 * cheat_prob_s1(family, o, &v[o.slot()]))
                .sum(),
            CheatPlan::S2 { i, b, phi, v } => cheat_prob_s2_averaged(family, *i, *b, *phi, v),
            CheatPlan::S3 { i, b, state } => super::cheat_prob_s3(family, *i, *b, *state, &Unitary2::identity()),
            CheatPlan::Discriminate { i, b, povm, prepared } => {
                let pairs = super::discriminate::pair_vectors(family);
                let s = i.sigma();
                pairs
                    .iter()
                    .enumerate()
                    .map(|(k, pair)| {
                        let t = (family.unitary(k) * &s).apply(ket(*b));
                        outcome_probabilities(povm, pair)
                            .iter()
                            .zip(prepared)
                            .map(|(p, q)| p * (t[0].conj() * q[0] + t[1].conj() * q[1]).norm_sqr())
                            .sum::<f64>()
                            * family.weight(k)
                    })
                    .sum()
            }
        }
    }

    /// Adam's messages for one freshly prepared single pair.
    fn play<R: Rng + ?Sized>(
        &self,
        pair: &crate::protocol::Pair,
        params: &ProtocolParams,
        rng: &mut R,
    ) -> Result<(Commitment, Opening)> {
        let label = format!("p{}.1", pair.name);
        let send = |i: BellOutcome, b: u8, state: StateVector| {
            (
                Commitment { outcomes: vec![i] },
                Opening {
                    claimed_bit: b,
                    teleported: vec![TeleportedQubit {
                        name: pair.name,
                        slot: 0,
                        state,
                    }],
                    untouched: Vec::new(),
                },
            )
        };
        Ok(match self {
            CheatPlan::S1 { v } => {
                let (c, private) = adam_commit(vec![pair.clone()], 0, params, rng)?;
                let i = c.outcomes[0];
                let q = private.residual[0].apply_unitary(&v[i.slot()], &label)?;
                send(i, 1, q)
            }
            CheatPlan::S2 { i, b, phi, v } => {
                let rec = teleport(&pair.state, &qubit("adam.0", *phi), rng)?;
                let q = rec.post_state.apply_unitary(&v[rec.outcome.slot()], &label)?;
                send(*i, *b, q)
            }
            CheatPlan::S3 { i, b, state } => send(*i, *b, qubit(&label, *state)),
            CheatPlan::Discriminate { i, b, povm, prepared } => {
                let amps = DVector::from_column_slice(pair.state.amplitudes());
                let g = sample_index(&outcome_probabilities(povm, &amps), rng);
                send(*i, *b, qubit(&label, prepared[g]))
            }
        })
    }

    /// One stage: Babe prepares a pair, Adam cheats, Babe verifies.
    pub fn attempt<R: Rng + ?Sized>(&self, family: &UnitaryFamily, rng: &mut R) -> Result<bool> {
        let params = ProtocolParams::new(1, 1, family.clone(), 0)?;
        let (pairs, secret) = babe_prepare(&params, rng)?;
        let (commitment, opening) = self.play(&pairs[0], &params, rng)?;
        Ok(babe_verify(&secret, &commitment, &opening, rng).verdict == Verdict::Accept)
    }
}

/// Fraction of trials in which Adam passes all `stages` stages.
pub fn simulate_cheat(
    plan: &CheatPlan,
    family: &UnitaryFamily,
    stages: u32,
    trials: u64,
    seed: u64,
    exec: Execution,
) -> Estimate {
    let hits = count_trials(exec, seed, trials, |rng| {
        (0..stages).all(|_| plan.attempt(family, rng).expect("valid plan"))
    });
    Estimate::new(hits, trials)
}
