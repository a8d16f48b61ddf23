//! The multi-pair commitment protocol between honest parties.
//!
//! 1. Babe prepares `n·N` pairs `(U_{ℓk} ⊗ I)Ψ⁻`, named `1..=n·N`, with each
//!    `k` drawn from the family, and sends them to Adam.
//! 2. Adam teleports `|b⟩` into `n` randomly chosen pairs and sends the Bell
//!    outcomes in a shuffled order, without pair names.
//! 3. Adam opens by returning the teleported halves with their names and
//!    outcome positions, plus every untouched pair. Babe projects each
//!    returned system onto the state it should be in.
//!
//! Qubit transfer is modeled as a change of ownership; both parties live in
//! one process.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::family::UnitaryFamily;
use crate::quantum::StateVector;
use crate::teleport::{teleport, teleport_branches, BellOutcome, OutcomeLabeling};

/// Upper bound on `n·N` for a single run.
pub const MAX_PAIRS: usize = 1 << 16;

#[derive(Debug, Clone)]
pub struct ProtocolParams {
    /// Pairs teleported into (and outcomes committed).
    pub n: usize,
    /// Amplification factor; Babe sends `n·N` pairs.
    pub stages: usize,
    pub family: UnitaryFamily,
    pub seed: u64,
}

impl ProtocolParams {
    pub fn new(n: usize, stages: usize, family: UnitaryFamily, seed: u64) -> Result<Self> {
        let p = ProtocolParams {
            n,
            stages,
            family,
            seed,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.stages == 0 {
            return Err(Error::InvalidParams("n and N must be positive".into()));
        }
        match self.n.checked_mul(self.stages) {
            Some(t) if t <= MAX_PAIRS => Ok(()),
            _ => Err(Error::InvalidParams(format!("n·N exceeds {MAX_PAIRS}"))),
        }
    }

    pub fn total_pairs(&self) -> usize {
        self.n * self.stages
    }
}

/// Qubit names of pair `name`: `("p{name}.1", "p{name}.2")`.
pub fn pair_labels(name: usize) -> (String, String) {
    (format!("p{name}.1"), format!("p{name}.2"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Pair {
    pub name: usize,
    pub state: StateVector,
}

/// Babe's record of which unitary was applied to each pair.
#[derive(Debug, Clone)]
pub struct BabeSecret {
    pub family: UnitaryFamily,
    /// Member index for pair `name`, at position `name − 1`.
    pub choices: Vec<usize>,
}

impl BabeSecret {
    pub fn choice(&self, name: usize) -> Option<usize> {
        name.checked_sub(1).and_then(|i| self.choices.get(i)).copied()
    }

    /// `(U_{ℓk} ⊗ I)Ψ⁻` for pair `name`.
    pub fn expected_pair(&self, name: usize) -> Option<StateVector> {
        let (a, b) = pair_labels(name);
        self.choice(name).map(|k| self.family.pair_state(k, &a, &b))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Commitment {
    pub outcomes: Vec<BellOutcome>,
}

#[derive(Debug, Clone)]
pub struct AdamPrivate {
    pub bit: u8,
    /// Pair name behind commitment slot `m`.
    pub selected: Vec<usize>,
    /// Residual first-half qubits, by commitment slot.
    pub residual: Vec<StateVector>,
    pub untouched: Vec<Pair>,
    opened: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TeleportedQubit {
    pub name: usize,
    /// Zero-based position of this pair's outcome in the commitment.
    pub slot: usize,
    pub state: StateVector,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Opening {
    pub claimed_bit: u8,
    pub teleported: Vec<TeleportedQubit>,
    pub untouched: Vec<Pair>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accept,
    Reject,
}

/// Babe's checks on an opening.
#[derive(Debug, Clone, Serialize)]
pub struct Verification {
    pub verdict: Verdict,
    /// Projection probability for each checked system (teleported first,
    /// then untouched), in opening order.
    pub overlaps: Vec<f64>,
    /// Product of the overlaps: the probability the opening is accepted.
    pub acceptance_probability: f64,
    /// Set when the opening was structurally invalid.
    pub malformed: Option<String>,
}

impl Verification {
    fn malformed(reason: String) -> Self {
        Verification {
            verdict: Verdict::Reject,
            overlaps: Vec::new(),
            acceptance_probability: 0.0,
            malformed: Some(reason),
        }
    }
}

/// Step (i).
pub fn babe_prepare<R: Rng + ?Sized>(params: &ProtocolParams, rng: &mut R) -> Result<(Vec<Pair>, BabeSecret)> {
    params.validate()?;
    let mut pairs = Vec::with_capacity(params.total_pairs());
    let mut choices = Vec::with_capacity(params.total_pairs());
    for name in 1..=params.total_pairs() {
        let k = params.family.sample(rng);
        let (a, b) = pair_labels(name);
        pairs.push(Pair {
            name,
            state: params.family.pair_state(k, &a, &b),
        });
        choices.push(k);
    }
    Ok((
        pairs,
        BabeSecret {
            family: params.family.clone(),
            choices,
        },
    ))
}

/// Step (ii).
pub fn adam_commit<R: Rng + ?Sized>(
    pairs: Vec<Pair>,
    bit: u8,
    params: &ProtocolParams,
    rng: &mut R,
) -> Result<(Commitment, AdamPrivate)> {
    if bit > 1 {
        return Err(Error::InvalidParams(format!("bit must be 0 or 1, got {bit}")));
    }
    if params.n > pairs.len() {
        return Err(Error::InvalidParams(format!(
            "cannot select {} pairs out of {}",
            params.n,
            pairs.len()
        )));
    }
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    order.shuffle(rng);
    let chosen: BTreeSet<usize> = order[..params.n].iter().copied().collect();
    // commitment slots follow the shuffled order, not pair names
    let slots: Vec<usize> = order[..params.n].to_vec();

    let mut outcomes = Vec::with_capacity(params.n);
    let mut selected = Vec::with_capacity(params.n);
    let mut residual = Vec::with_capacity(params.n);
    for (m, &idx) in slots.iter().enumerate() {
        let pair = &pairs[idx];
        let phi = StateVector::bit(format!("adam.{m}"), bit);
        let rec = teleport(&pair.state, &phi, rng)?;
        outcomes.push(rec.outcome);
        selected.push(pair.name);
        residual.push(rec.post_state);
    }
    let untouched = pairs
        .into_iter()
        .enumerate()
        .filter(|(i, _)| !chosen.contains(i))
        .map(|(_, p)| p)
        .collect();
    Ok((
        Commitment { outcomes },
        AdamPrivate {
            bit,
            selected,
            residual,
            untouched,
            opened: false,
        },
    ))
}

/// Step (iii), honest: the true bit and true names.
pub fn adam_open(private: &mut AdamPrivate) -> Result<Opening> {
    let bit = private.bit;
    adam_open_claiming(private, bit)
}

/// Opens with an arbitrary claimed bit and otherwise honest physics.
pub fn adam_open_claiming(private: &mut AdamPrivate, claimed_bit: u8) -> Result<Opening> {
    if private.opened {
        return Err(Error::Protocol("commitment already opened".into()));
    }
    private.opened = true;
    let teleported = private
        .selected
        .iter()
        .zip(&private.residual)
        .enumerate()
        .map(|(slot, (&name, state))| TeleportedQubit {
            name,
            slot,
            state: state.clone(),
        })
        .collect();
    Ok(Opening {
        claimed_bit,
        teleported,
        untouched: private.untouched.clone(),
    })
}

fn check_structure(secret: &BabeSecret, commitment: &Commitment, opening: &Opening) -> std::result::Result<(), String> {
    let total = secret.choices.len();
    if opening.claimed_bit > 1 {
        return Err(format!("claimed bit {}", opening.claimed_bit));
    }
    if opening.teleported.len() != commitment.outcomes.len() {
        return Err(format!(
            "{} teleported qubits for {} committed outcomes",
            opening.teleported.len(),
            commitment.outcomes.len()
        ));
    }
    let mut names = BTreeSet::new();
    let mut slots = BTreeSet::new();
    for t in &opening.teleported {
        if t.state.num_qubits() != 1 {
            return Err(format!("pair {} returned {} qubits", t.name, t.state.num_qubits()));
        }
        if !slots.insert(t.slot) || t.slot >= commitment.outcomes.len() {
            return Err(format!("bad outcome slot {}", t.slot));
        }
        if !names.insert(t.name) {
            return Err(format!("pair {} listed twice", t.name));
        }
    }
    for p in &opening.untouched {
        if p.state.num_qubits() != 2 {
            return Err(format!("pair {} returned {} qubits", p.name, p.state.num_qubits()));
        }
        if !names.insert(p.name) {
            return Err(format!("pair {} listed twice", p.name));
        }
    }
    if names.len() != total || names.iter().any(|&n| n == 0 || n > total) {
        return Err("pair names do not partition 1..=nN".into());
    }
    Ok(())
}

/// Probability that each returned system passes Babe's projection.
pub fn verification_overlaps(
    secret: &BabeSecret,
    commitment: &Commitment,
    opening: &Opening,
) -> std::result::Result<Vec<f64>, String> {
    check_structure(secret, commitment, opening)?;
    let mut overlaps = Vec::with_capacity(secret.choices.len());
    for t in &opening.teleported {
        let k = secret.choice(t.name).ok_or("unknown pair")?;
        let i = commitment.outcomes[t.slot];
        let label = t.state.labels()[0].clone();
        let target = StateVector::bit(label.clone(), opening.claimed_bit)
            .apply_unitary(&(secret.family.unitary(k) * &i.sigma()), &label)
            .map_err(|e| e.to_string())?;
        overlaps.push(t.state.fidelity(&target).map_err(|e| e.to_string())?);
    }
    for p in &opening.untouched {
        let expected = secret.expected_pair(p.name).ok_or("unknown pair")?;
        let expected = expected
            .relabeled(p.state.labels().to_vec())
            .map_err(|e| e.to_string())?;
        overlaps.push(p.state.fidelity(&expected).map_err(|e| e.to_string())?);
    }
    Ok(overlaps)
}

/// Step (iii), Babe's side. Each projection succeeds with its Born
/// probability; the opening is accepted iff all succeed. Malformed openings
/// are rejected.
pub fn babe_verify<R: Rng + ?Sized>(
    secret: &BabeSecret,
    commitment: &Commitment,
    opening: &Opening,
    rng: &mut R,
) -> Verification {
    let overlaps = match verification_overlaps(secret, commitment, opening) {
        Ok(o) => o,
        Err(reason) => return Verification::malformed(reason),
    };
    // one draw per system, so the stream does not depend on earlier failures
    let all_pass = overlaps
        .iter()
        .filter(|&&p| rng.random::<f64>() >= p.clamp(0.0, 1.0))
        .count()
        == 0;
    Verification {
        verdict: if all_pass { Verdict::Accept } else { Verdict::Reject },
        acceptance_probability: overlaps.iter().product(),
        overlaps,
        malformed: None,
    }
}

/// Exact distribution of a single committed outcome given bit `b`, averaged
/// over Babe's unitary: what an unentangled Babe learns.
pub fn outcome_distribution(family: &UnitaryFamily, bit: u8) -> Result<[f64; 4]> {
    let mut dist = [0.0; 4];
    let phi = StateVector::bit("adam", bit);
    for (k, m) in family.members().iter().enumerate() {
        let pair = family.pair_state(k, "1", "2");
        for (slot, (p, _)) in teleport_branches(&pair, &phi, OutcomeLabeling::standard())?
            .iter()
            .enumerate()
        {
            dist[slot] += m.weight * p;
        }
    }
    Ok(dist)
}

/// One protocol message.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TranscriptRecord {
    pub step: u8,
    pub sender: &'static str,
    pub kind: &'static str,
    pub payload_digest: String,
    pub outcome: serde_json::Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct Transcript {
    pub params: serde_json::Value,
    pub records: Vec<TranscriptRecord>,
    pub verification: Verification,
}

impl Transcript {
    pub fn verdict(&self) -> Verdict {
        self.verification.verdict
    }

    /// One JSON object per line, one line per message.
    pub fn to_jsonl(&self) -> String {
        self.records
            .iter()
            .map(|r| serde_json::to_string(r).expect("records serialize") + "\n")
            .collect()
    }
}

fn digest<T: Serialize>(payload: &T) -> String {
    let bytes = serde_json::to_vec(payload).expect("payload serializes");
    hex::encode(Sha256::digest(&bytes))
}

/// How Adam behaves at opening in [`run`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Opener {
    Honest,
    /// Claims the other bit with untouched physics.
    FlipClaim,
}

/// Runs all three steps with honest parties.
pub fn run_honest<R: Rng + ?Sized>(params: &ProtocolParams, bit: u8, rng: &mut R) -> Result<Transcript> {
    run(params, bit, Opener::Honest, rng)
}

pub fn run<R: Rng + ?Sized>(params: &ProtocolParams, bit: u8, opener: Opener, rng: &mut R) -> Result<Transcript> {
    let (pairs, secret) = babe_prepare(params, rng)?;
    let mut records = vec![TranscriptRecord {
        step: 1,
        sender: "babe",
        kind: "pairs",
        payload_digest: digest(&pairs),
        outcome: json!({ "pairs": pairs.len() }),
    }];
    let (commitment, mut private) = adam_commit(pairs, bit, params, rng)?;
    records.push(TranscriptRecord {
        step: 2,
        sender: "adam",
        kind: "commitment",
        payload_digest: digest(&commitment),
        outcome: json!({ "outcomes": commitment.outcomes }),
    });
    let opening = match opener {
        Opener::Honest => adam_open(&mut private)?,
        Opener::FlipClaim => adam_open_claiming(&mut private, 1 - bit)?,
    };
    let names: Vec<usize> = opening.teleported.iter().map(|t| t.name).collect();
    records.push(TranscriptRecord {
        step: 3,
        sender: "adam",
        kind: "opening",
        payload_digest: digest(&opening),
        outcome: json!({
            "claimed_bit": opening.claimed_bit,
            "teleported_names": names,
            "untouched": opening.untouched.len(),
        }),
    });
    let verification = babe_verify(&secret, &commitment, &opening, rng);
    Ok(Transcript {
        params: json!({
            "n": params.n,
            "N": params.stages,
            "family": params.family,
            "seed": params.seed,
            "bit": bit,
        }),
        records,
        verification,
    })
}
