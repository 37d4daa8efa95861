//! States, channels and the elementary channel algebra.
//!
//! All matrices are dense `nalgebra` matrices over `Complex64` in the fixed
//! incoherent basis. Tensor products use row-major composite indices with
//! the first factor varying slowest.

mod channel;
mod density;
mod state;

pub use channel::{apply, apply_with, is_incoherent, Channel, KrausOperator};
pub(crate) use density::hermiticity_residual;
pub use density::{dephase, fidelity_to_pure, max_abs_diff, DensityMatrix};
pub use state::{profile, tensor, ProbabilityProfile, PureState};

/// Dense complex matrix used throughout the crate.
pub type CMatrix = nalgebra::DMatrix<num_complex::Complex64>;
