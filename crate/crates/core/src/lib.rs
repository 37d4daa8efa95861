//! Pure-state coherence transformations under incoherent operations.
//!
//! A pure state `|psi>` can be turned into `|phi>` by an incoherent
//! operation exactly when the squared-amplitude profile of `psi` is
//! majorized by that of `phi`. This crate decides that relation, builds
//! explicit incoherent Kraus channels realizing allowed conversions,
//! searches for coherent catalysts, evaluates coherence measures, and
//! constructs the channel that sends any state to a prescribed
//! incoherent state.

pub mod absorption;
pub mod catalysis;
pub mod error;
pub mod io;
pub mod majorization;
pub mod measures;
pub mod model;
pub mod synthesis;
pub mod tolerance;

pub use error::{CoherenceError, Result};
pub use model::{
    apply, dephase, fidelity_to_pure, is_incoherent, tensor, CMatrix, Channel, DensityMatrix,
    KrausOperator, ProbabilityProfile, PureState,
};
pub use num_complex::Complex64;
pub use tolerance::ToleranceConfig;
