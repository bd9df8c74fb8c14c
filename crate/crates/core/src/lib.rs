//! Numerical toolkit for a cavity-field "quantum switch" driven by
//! relativistic time dilation: two pointlike two-level detectors couple to
//! a Dirichlet cavity field through sharp time windows whose order depends
//! on a spin-controlled trajectory. The crate provides
//!
//! - cavity mode data and single-excitation field states ([`cavity`]),
//! - proper-time kinematics and causal classification of the interaction
//!   regions ([`kinematics`]),
//! - closed-form first-order branch amplitudes, norms, and their normalized
//!   overlap ([`perturbation`]),
//! - the post-selected two-qubit reduction, concurrence, and CHSH bounds
//!   ([`entanglement`]),
//! - a deterministic simplex minimizer for parameter searches
//!   ([`optimize`]),
//! - and an independent brute-force evolution on a truncated Fock space
//!   used to validate all of the above ([`oracle`]).
//!
//! Natural units (`c = hbar = 1`) throughout.

pub mod cavity;
pub mod entanglement;
pub mod error;
pub mod kinematics;
pub mod optimize;
pub mod oracle;
pub mod perturbation;

pub use cavity::{mode_frequency, mode_function, CavityConfig, SingleExcitationState};
pub use entanglement::{BellReport, EffectiveTwoQubit, Sign};
pub use error::{Error, Result};
pub use kinematics::{InteractionRegions, SeparationClass, TrajectoryParams};
pub use oracle::TruncatedSystem;
pub use perturbation::{InteractionOrder, OverlapResult, ProtocolParams};
