//! Exact linear algebra on small labeled qubit registers.

mod bell;
mod density;
mod discrimination;
mod gates;
mod state;

pub use bell::{bell_basis, BellState};
pub use density::{
    helstrom_guess_prob, helstrom_measurement, hermitian_eigen, trace_distance, trace_norm_hermitian, CMatrix,
    DensityMatrix, HelstromMeasurement,
};
pub use discrimination::{min_error_discrimination, optimality_gap, pretty_good_measurement, Discrimination};
pub use gates::{Axis, Unitary2};
pub use state::{sample_index, validate_basis, Measurement, StateVector, MAX_QUBITS, NORM_TOL};
