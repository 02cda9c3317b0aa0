//! Overlap matrices between prepared states and analyzer settings, and the
//! average measurement fidelity they imply.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::analyzer::{project, TimeBinState};
use crate::error::{Error, Result};
use crate::sim::BasisReport;
use crate::solver::{basis_phases, basis_states, solve_analyzer, BasisId};

/// Where an overlap matrix came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatrixSource {
    /// Exact effective-model projections.
    EffectiveModel,
    /// Maxwell-Bloch simulation outputs.
    Simulation,
}

/// A 3×3 grid of projection outcomes: `values[j][i]` is the overlap
/// measured with analyzer setting `j` on prepared state `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapMatrix {
    values: [[f64; 3]; 3],
    source: MatrixSource,
}

impl OverlapMatrix {
    /// Wraps a measured grid. Entries are probabilities (or efficiencies)
    /// and must be finite and nonnegative.
    pub fn new(values: [[f64; 3]; 3], source: MatrixSource) -> Result<Self> {
        for row in &values {
            for &v in row {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "overlap entries must be finite and nonnegative, got {v}"
                    )));
                }
            }
        }
        Ok(Self { values, source })
    }

    /// The projections of a simulated basis characterization.
    pub fn from_basis_report(report: &BasisReport) -> Self {
        Self {
            values: report.projections,
            source: MatrixSource::Simulation,
        }
    }

    /// Exact effective-model overlaps of a named basis: solve its three
    /// analyzers and project each basis state through each. For an ideal
    /// analyzer the result is the basis efficiency on the diagonal and
    /// zero elsewhere.
    pub fn effective_for_basis(id: BasisId) -> Result<Self> {
        let phases = basis_phases(id);
        let states = basis_states(id);
        let mut values = [[0.0; 3]; 3];
        for (j, row_phases) in phases.iter().enumerate() {
            let solution = solve_analyzer(row_phases)?;
            for (i, state) in states.iter().enumerate() {
                let input = TimeBinState::new(state.to_vec(), 1.0)?;
                values[j][i] = project(&input, &solution.pulses)?;
            }
        }
        Ok(Self {
            values,
            source: MatrixSource::EffectiveModel,
        })
    }

    pub fn values(&self) -> &[[f64; 3]; 3] {
        &self.values
    }

    pub fn source(&self) -> MatrixSource {
        self.source
    }

    /// Largest entry; the normalization used when plotting.
    pub fn max_entry(&self) -> f64 {
        self.values
            .iter()
            .flatten()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Average measurement fidelity of an overlap grid: the summed diagonal
/// over the summed matrix — how much of the total answer lands on the
/// matching analyzer. Invariant under global rescaling, so it can be
/// evaluated on raw energies as well as on normalized probabilities.
pub fn average_fidelity(m: &OverlapMatrix) -> Result<f64> {
    let total: f64 = m.values.iter().flatten().sum();
    if total <= 0.0 {
        return Err(Error::Degenerate(
            "fidelity of an all-zero overlap matrix is undefined".into(),
        ));
    }
    let diagonal: f64 = (0..3).map(|i| m.values[i][i]).sum();
    Ok(diagonal / total)
}

/// Squared overlap `|⟨a|b⟩|²` of two three-bin states — the ideal-analyzer
/// prediction for a unit-efficiency projection.
pub fn squared_overlap(a: &[C64; 3], b: &[C64; 3]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.conj() * y)
        .sum::<C64>()
        .norm_sqr()
}
