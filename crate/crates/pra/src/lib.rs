//! Time-bin qutrit readout for echo-based optical memories.
//!
//! The crate covers the full chain from abstract state analysis to a
//! first-principles light–matter simulation:
//!
//! - [`analyzer`] — effective algebra of partial-readout pulse sequences
//!   acting on time-bin states.
//! - `solver` — exact pulse parameters that project onto a chosen
//!   three-bin superposition, plus the efficiency optimum.
//! - `bounds` — certified efficiency ceilings for *any* readout scheme
//!   with bounded temporal support.
//! - `pulse` — chirped hyperbolic-secant waveform synthesis for robust
//!   population transfer.
//! - `sim` — one-dimensional Maxwell–Bloch simulation of storage and
//!   composite readout in a spectrally structured absorber.
//! - `analysis` — tomography-style post-processing: basis matrices,
//!   fidelity, interference visibility, and report generation.

pub mod analysis;
pub mod analyzer;
pub mod bounds;
pub mod error;
pub mod pulse;
pub mod sim;
pub mod solver;

pub use error::{Error, Result};
