//! Laser-driven rotational dynamics of a linear polar molecule.
//!
//! A rigid rotor at fixed M is propagated through one or two (ω, 2ω) pulses with a
//! Strang split-operator scheme; ⟨cos θ⟩ (orientation) and ⟨cos² θ⟩ (alignment) are
//! averaged over a Boltzmann ensemble of initial states. The [`harness`] module turns
//! config files and figure presets into sweeps and CSV/JSON output.

pub mod basis;
pub mod error;
pub mod field;
pub mod harness;
pub mod molecule;
pub mod observables;
pub mod propagator;
pub mod units;

pub use error::{Error, Result};
