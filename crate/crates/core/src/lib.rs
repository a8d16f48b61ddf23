//! Simulation and security analysis of a teleportation-based quantum bit
//! commitment scheme.
//!
//! Babe sends Adam singlet pairs with a secret local unitary `U_k` applied to
//! one half. Adam commits a bit by teleporting `|b⟩` into a randomly chosen
//! pair and announcing only the Bell-measurement result `i`; he opens by
//! returning the residual qubit, which Babe checks against `U_k σ_i |b⟩`.
//!
//! * [`quantum`]: state vectors, density matrices, Helstrom discrimination.
//! * [`teleport`]: the outcome identity `U σ_i |φ⟩` and its simulation.
//! * [`protocol`]: the honest multi-pair protocol with transcripts.
//! * [`adam`]: Adam's cheating strategies, the optimizer for `p_A`, and
//!   end-to-end Monte Carlo of each strategy.
//! * [`babe`]: Babe's entanglement attack and the concealment bound.
//! * [`ensemble`]: sample-and-test honesty checking (hypergeometric).
//! * [`game`]: the repeated checking game as an absorbing Markov chain.
//! * [`par`]: rayon execution with a sequential fallback.

pub mod adam;
pub mod babe;
pub mod ensemble;
pub mod error;
pub mod family;
pub mod game;
pub mod par;
pub mod protocol;
pub mod quantum;
pub mod teleport;

pub use error::{Error, Result};
pub use family::UnitaryFamily;
pub use par::Execution;
pub use teleport::BellOutcome;
