//! Teleportation through a modified singlet without the receiver's correction.
//!
//! Bell-measuring qubits `(2, 3)` of `(U ⊗ I)Ψ⁻₁₂ ⊗ |φ⟩₃` leaves qubit 1 in
//! `U σ_i |φ⟩` up to a global phase, where
//!
//! | i | Bell state on (2,3) | σ_i      |
//! |---|---------------------|----------|
//! | 1 | Ψ⁺                  | −σ_z     |
//! | 2 | Ψ⁻                  | −I       |
//! | 3 | Φ⁺                  | −iσ_y    |
//! | 4 | Φ⁻                  | σ_x      |
//!
//! The table is [`OutcomeLabeling::standard`]. It is checked against a full
//! three-qubit simulation by the tests below and by `qbc5 teleport-check`.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{BellState, StateVector, Unitary2};

/// Classical result `i ∈ {1, 2, 3, 4}` of Adam's Bell measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct BellOutcome(u8);

impl BellOutcome {
    pub fn new(i: u8) -> Result<Self> {
        if (1..=4).contains(&i) {
            Ok(BellOutcome(i))
        } else {
            Err(Error::OutcomeOutOfRange(i))
        }
    }

    pub fn all() -> [BellOutcome; 4] {
        [BellOutcome(1), BellOutcome(2), BellOutcome(3), BellOutcome(4)]
    }

    pub fn index(self) -> u8 {
        self.0
    }

    /// Zero-based position, `i − 1`.
    pub fn slot(self) -> usize {
        usize::from(self.0 - 1)
    }

    pub fn from_slot(slot: usize) -> Result<Self> {
        u8::try_from(slot + 1)
            .map_err(|_| Error::OutcomeOutOfRange(u8::MAX))
            .and_then(Self::new)
    }

    /// The signed correction operator σ_i.
    pub fn sigma(self) -> Unitary2 {
        let i = Complex64::new(0.0, 1.0);
        let minus = Complex64::new(-1.0, 0.0);
        match self.0 {
            1 => Unitary2::pauli_z().scaled(minus),
            2 => Unitary2::identity().scaled(minus),
            3 => Unitary2::pauli_y().scaled(-i),
            _ => Unitary2::pauli_x(),
        }
    }
}

impl TryFrom<u8> for BellOutcome {
    type Error = Error;
    fn try_from(i: u8) -> Result<Self> {
        BellOutcome::new(i)
    }
}

impl From<BellOutcome> for u8 {
    fn from(o: BellOutcome) -> u8 {
        o.0
    }
}

impl fmt::Display for BellOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// σ_i for an integer outcome index.
pub fn sigma_of(i: u8) -> Result<Unitary2> {
    Ok(BellOutcome::new(i)?.sigma())
}

/// Which Bell state is reported as outcome `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutcomeLabeling([BellState; 4]);

impl OutcomeLabeling {
    /// `(Ψ⁺, Ψ⁻, Φ⁺, Φ⁻) → (1, 2, 3, 4)`, the assignment under which the
    /// closed form `U σ_i |φ⟩` holds.
    pub const fn standard() -> Self {
        OutcomeLabeling([
            BellState::PsiPlus,
            BellState::PsiMinus,
            BellState::PhiPlus,
            BellState::PhiMinus,
        ])
    }

    /// `(Ψ⁻, Ψ⁺, Φ⁻, Φ⁺) → (1, 2, 3, 4)`. Wrong for the σ_i table; kept as a
    /// negative control.
    pub const fn misordered() -> Self {
        OutcomeLabeling([
            BellState::PsiMinus,
            BellState::PsiPlus,
            BellState::PhiMinus,
            BellState::PhiPlus,
        ])
    }

    pub fn bell_state(&self, outcome: BellOutcome) -> BellState {
        self.0[outcome.slot()]
    }

    pub fn basis(&self, first: &str, second: &str) -> Vec<StateVector> {
        self.0.iter().map(|b| b.state(first, second)).collect()
    }
}

impl Default for OutcomeLabeling {
    fn default() -> Self {
        Self::standard()
    }
}

/// Outcome and residual state of one teleportation.
#[derive(Debug, Clone)]
pub struct TeleportRecord {
    pub outcome: BellOutcome,
    /// State of the pair's first qubit after the measurement.
    pub post_state: StateVector,
    /// Born probability of the observed outcome.
    pub probability: f64,
}

impl TeleportRecord {
    /// Fidelity of the residual qubit with `U σ_i |φ⟩`.
    pub fn fidelity_with_formula(&self, u: &Unitary2, phi: &StateVector) -> Result<f64> {
        let expected = teleport_formula(u, self.outcome, phi)?.relabeled(self.post_state.labels().to_vec())?;
        self.post_state.fidelity(&expected)
    }
}

/// `U σ_i |φ⟩`.
pub fn teleport_formula(u: &Unitary2, outcome: BellOutcome, phi: &StateVector) -> Result<StateVector> {
    if phi.num_qubits() != 1 {
        return Err(Error::InvalidParams(format!(
            "teleported state must be one qubit, got {}",
            phi.num_qubits()
        )));
    }
    let label = phi.labels()[0].clone();
    let op = u * &outcome.sigma();
    phi.apply_unitary(&op, &label)
}

/// Per-outcome probabilities and residual states, computed on the joint
/// three-qubit register.
pub fn teleport_branches(
    pair: &StateVector,
    phi: &StateVector,
    labeling: OutcomeLabeling,
) -> Result<Vec<(f64, StateVector)>> {
    if pair.num_qubits() != 2 {
        return Err(Error::InvalidParams(format!(
            "pair must be two qubits, got {}",
            pair.num_qubits()
        )));
    }
    if phi.num_qubits() != 1 {
        return Err(Error::InvalidParams(format!(
            "teleported state must be one qubit, got {}",
            phi.num_qubits()
        )));
    }
    let joint = pair.tensor(phi)?;
    let basis = labeling.basis(&pair.labels()[1], &phi.labels()[0]);
    joint.projective_branches(&basis)
}

fn record_from_branch(outcome: BellOutcome, branch: &(f64, StateVector)) -> TeleportRecord {
    let (p, rest) = branch;
    TeleportRecord {
        outcome,
        post_state: rest.scaled(Complex64::new(1.0 / p.sqrt(), 0.0)),
        probability: *p,
    }
}

/// Teleports `phi` into the first qubit of `pair`, sampling the outcome.
pub fn teleport<R: Rng + ?Sized>(pair: &StateVector, phi: &StateVector, rng: &mut R) -> Result<TeleportRecord> {
    teleport_with(pair, phi, OutcomeLabeling::standard(), rng)
}

pub fn teleport_with<R: Rng + ?Sized>(
    pair: &StateVector,
    phi: &StateVector,
    labeling: OutcomeLabeling,
    rng: &mut R,
) -> Result<TeleportRecord> {
    let branches = teleport_branches(pair, phi, labeling)?;
    let probs: Vec<f64> = branches.iter().map(|b| b.0).collect();
    let slot = crate::quantum::sample_index(&probs, rng);
    Ok(record_from_branch(BellOutcome::from_slot(slot)?, &branches[slot]))
}

/// Teleportation post-selected on `outcome`.
pub fn teleport_forced(
    pair: &StateVector,
    phi: &StateVector,
    outcome: BellOutcome,
    labeling: OutcomeLabeling,
) -> Result<TeleportRecord> {
    let branches = teleport_branches(pair, phi, labeling)?;
    let branch = &branches[outcome.slot()];
    if branch.0 <= 0.0 {
        return Err(Error::InvalidParams(format!("outcome {outcome} has probability zero")));
    }
    Ok(record_from_branch(outcome, branch))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::UnitaryFamily;
    use crate::quantum::Axis;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn o(i: u8) -> BellOutcome {
        BellOutcome::new(i).unwrap()
    }

    #[test]
    fn sigma_table() {
        let minus = Complex64::new(-1.0, 0.0);
        assert!(sigma_of(2).unwrap().max_abs_diff(&Unitary2::identity().scaled(minus)) < 1e-15);
        assert!(sigma_of(4).unwrap().max_abs_diff(&Unitary2::pauli_x()) < 1e-15);
        for i in 1..=4 {
            assert!(sigma_of(i).unwrap().unitarity_deviation() < 1e-15);
        }
        assert!(matches!(sigma_of(0), Err(Error::OutcomeOutOfRange(0))));
        assert!(matches!(sigma_of(5), Err(Error::OutcomeOutOfRange(5))));
    }

    #[test]
    fn formula_examples() {
        let zero = StateVector::bit("q", 0);
        let r = teleport_formula(&Unitary2::identity(), o(2), &zero).unwrap();
        assert!((r.amplitudes()[0] - Complex64::new(-1.0, 0.0)).norm() < 1e-15);

        // R_z σ_x |1⟩ = R_z |0⟩
        let rz = Unitary2::quarter_turn(Axis::Z);
        let r = teleport_formula(&rz, o(4), &StateVector::bit("q", 1)).unwrap();
        let want = zero.apply_unitary(&rz, "q").unwrap();
        assert!((r.inner(&want).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn forced_outcomes() {
        let fam = UnitaryFamily::single("I", Unitary2::identity());
        let pair = fam.pair_state(0, "1", "2");
        let rec = teleport_forced(&pair, &StateVector::bit("3", 0), o(2), OutcomeLabeling::standard()).unwrap();
        assert!((rec.probability - 0.25).abs() < 1e-12);
        assert!((rec.post_state.fidelity(&StateVector::bit("1", 0)).unwrap() - 1.0).abs() < 1e-12);

        let rec = teleport_forced(&pair, &StateVector::bit("3", 1), o(4), OutcomeLabeling::standard()).unwrap();
        assert!((rec.post_state.fidelity(&StateVector::bit("1", 0)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_matches_simulation_for_every_member_and_outcome() {
        let fam = UnitaryFamily::standard();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..25 {
            let phi = StateVector::random(["3"], &mut rng);
            for k in 0..fam.len() {
                let pair = fam.pair_state(k, "1", "2");
                for i in BellOutcome::all() {
                    let rec = teleport_forced(&pair, &phi, i, OutcomeLabeling::standard()).unwrap();
                    assert!((rec.probability - 0.25).abs() < 1e-12);
                    let f = rec.fidelity_with_formula(fam.unitary(k), &phi).unwrap();
                    assert!(f > 1.0 - 1e-10, "k={k} i={i} fidelity {f}");
                }
            }
        }
    }

    #[test]
    fn misordered_labeling_breaks_the_identity() {
        let fam = UnitaryFamily::standard();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let phi = StateVector::random(["3"], &mut rng);
        let pair = fam.pair_state(0, "1", "2");
        let worst = BellOutcome::all()
            .iter()
            .map(|&i| {
                teleport_forced(&pair, &phi, i, OutcomeLabeling::misordered())
                    .unwrap()
                    .fidelity_with_formula(fam.unitary(0), &phi)
                    .unwrap()
            })
            .fold(1.0, f64::min);
        assert!(worst < 1.0 - 1e-3);
    }

    #[test]
    fn undoing_the_corrections_recovers_the_input() {
        let fam = UnitaryFamily::standard();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for k in 0..fam.len() {
            let phi = StateVector::random(["3"], &mut rng);
            let rec = teleport(&fam.pair_state(k, "1", "2"), &phi, &mut rng).unwrap();
            let undo = rec.outcome.sigma().adjoint() * fam.unitary(k).adjoint();
            let back = rec
                .post_state
                .apply_unitary(&undo, "1")
                .unwrap()
                .relabeled(["3"])
                .unwrap();
            assert!(back.fidelity(&phi).unwrap() > 1.0 - 1e-10);
        }
    }

    #[test]
    fn rejects_malformed_registers() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let pair = StateVector::bit("1", 0);
        assert!(teleport(&pair, &StateVector::bit("3", 0), &mut rng).is_err());
        let pair = UnitaryFamily::standard().pair_state(0, "1", "2");
        let two = StateVector::basis(["3", "4"], 0).unwrap();
        assert!(teleport(&pair, &two, &mut rng).is_err());
    }
}
