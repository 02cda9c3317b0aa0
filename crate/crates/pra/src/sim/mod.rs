//! First-principles check of the analyzer on a simulated storage medium.
//!
//! The closed-form analyzer treats readout pulses as ideal beamsplitters
//! acting on a stored train. This module drops that idealization: it
//! propagates a weak three-bin pulse through an absorber whose spectrum is
//! a comb of narrow teeth, transfers the stored excitation to a spin level
//! with a real chirped pulse, reads it out with one full pulse or a
//! three-component analyzer, and integrates the emitted slots — so every
//! analyzer number can be compared against the same quantity measured on
//! simulated physics.
//!
//! The pieces:
//!
//! - [`Comb`]: the absorption spectrum, discretized into spectral classes.
//! - [`SimConfig`]: one run's full description, loadable from JSON.
//! - [`run_sequence`]: the Maxwell–Bloch propagation itself.
//! - [`run_storage`] / [`run_pra`] / [`simulate_basis`]: reference
//!   efficiency, single analyzer projections, and whole-basis
//!   characterization.
//! - [`TransferCalibration`]: the amplitude-scale-to-transfer map that
//!   compiles solved pulses into control components.

mod comb;
mod config;
mod engine;
mod runs;

pub use comb::{afc_theory_efficiency, comb_finesse, Comb, SpectralClass};
pub use config::{CombConfig, GridConfig, InputConfig, PulseConfig, SimConfig};
pub use engine::{
    run_sequence, FieldTrace, ReadStage, SequenceResult, Timeline, WEAK_DRIVE_RAD_S,
};
pub use runs::{
    calibrate_transfer, run_pra, run_storage, simulate_basis, simulate_named_basis, BasisReport,
    PraReport, RunSummary, StorageReport, TransferCalibration, CALIBRATION_POINTS,
};
pub(crate) use runs::with_amps;
