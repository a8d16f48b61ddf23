//! The four Bell states.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::StateVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellState {
    /// `(|01⟩ + |10⟩)/√2`
    PsiPlus,
    /// `(|01⟩ − |10⟩)/√2`, the singlet.
    PsiMinus,
    /// `(|00⟩ + |11⟩)/√2`
    PhiPlus,
    /// `(|00⟩ − |11⟩)/√2`
    PhiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PsiPlus,
        BellState::PsiMinus,
        BellState::PhiPlus,
        BellState::PhiMinus,
    ];

    /// Amplitudes over `|00⟩, |01⟩, |10⟩, |11⟩`.
    pub fn amplitudes(self) -> [Complex64; 4] {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let z = Complex64::new(0.0, 0.0);
        match self {
            BellState::PsiPlus => [z, h, h, z],
            BellState::PsiMinus => [z, h, -h, z],
            BellState::PhiPlus => [h, z, z, h],
            BellState::PhiMinus => [h, z, z, -h],
        }
    }

    pub fn state(self, first: &str, second: &str) -> StateVector {
        StateVector::new([first, second], self.amplitudes().to_vec()).expect("Bell states are normalized")
    }

    pub fn name(self) -> &'static str {
        match self {
            BellState::PsiPlus => "Psi+",
            BellState::PsiMinus => "Psi-",
            BellState::PhiPlus => "Phi+",
            BellState::PhiMinus => "Phi-",
        }
    }
}

/// Bell basis on `(first, second)` in [`BellState::ALL`] order.
pub fn bell_basis(first: &str, second: &str) -> Vec<StateVector> {
    BellState::ALL.iter().map(|b| b.state(first, second)).collect()
}
