//! From projection outcomes to deliverables: overlap matrices and the
//! average fidelity they imply, visibility scans with sinusoid fits, and
//! CSV/SVG report emission.
//!
//! The pieces:
//!
//! - [`OverlapMatrix`] / [`average_fidelity`]: how exclusively each
//!   analyzer answers to its own state, from either backend.
//! - [`visibility_scan`] (exact model) and [`visibility_scan_simulated`]
//!   (Maxwell–Bloch): projector responses as the prepared state rotates
//!   through a plane of the basis.
//! - [`fit_sinusoid`]: the period-π least-squares fit every visibility
//!   curve is reduced to.
//! - [`ReportBundle`] / [`emit_report`]: deterministic CSV and SVG
//!   artifacts named by configuration hash.

mod fit;
mod overlap;
mod report;
mod scan;

pub use fit::{fit_sinusoid, SinusoidFit};
pub use overlap::{average_fidelity, squared_overlap, MatrixSource, OverlapMatrix};
pub use report::{
    config_digest, describe_emission, emit_report, table1_csv, table1_rows, table2_csv,
    ReportBundle, Table1Row,
};
pub use scan::{
    rotated_state, scan_effective, scan_grid, visibility_scan, visibility_scan_simulated,
    ScanPlane, VisibilityCurve,
};
