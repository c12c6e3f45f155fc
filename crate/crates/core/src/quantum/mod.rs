//! Finite-dimensional operator algebra: truncated bosonic modes, density
//! matrices on tensor-product spaces, and entropy functionals.

pub mod entropy;
pub mod fock;
pub mod state;

pub use entropy::{mutual_information, relative_entropy, relative_entropy_detailed, von_neumann_entropy};
pub use fock::{ladder_operators, squeeze_operator, squeezed_thermal_state, thermal_state, FockCutoff};
pub use state::{partial_trace, DensityMatrix};
