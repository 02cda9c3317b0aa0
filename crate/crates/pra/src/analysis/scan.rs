//! Visibility scans: rotate the prepared state through a plane of a basis
//! and record every projector's response, then fit each curve with the
//! period-π sinusoid it must follow.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::analyzer::{project, TimeBinState};
use crate::error::{Error, Result};
use crate::sim::{calibrate_transfer, run_pra, run_storage, SimConfig, CALIBRATION_POINTS};
use crate::solver::{basis_phases, basis_states, solve_analyzer, AnalyzerSolution, BasisId};

use super::fit::{fit_sinusoid, SinusoidFit};

/// Which pair of basis states the prepared state rotates between.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScanPlane {
    /// `cos φ |ψ₀⟩ + sin φ |ψ₁⟩`.
    ZeroOne,
    /// `cos φ |ψ₀⟩ + sin φ |ψ₂⟩`.
    ZeroTwo,
}

impl ScanPlane {
    /// Indices of the two basis states spanning the plane.
    pub fn axes(&self) -> (usize, usize) {
        match self {
            ScanPlane::ZeroOne => (0, 1),
            ScanPlane::ZeroTwo => (0, 2),
        }
    }

    /// Compact name used in file names and on the command line.
    pub fn name(&self) -> &'static str {
        match self {
            ScanPlane::ZeroOne => "01",
            ScanPlane::ZeroTwo => "02",
        }
    }
}

impl std::str::FromStr for ScanPlane {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "01" | "0-1" => Ok(ScanPlane::ZeroOne),
            "02" | "0-2" => Ok(ScanPlane::ZeroTwo),
            other => Err(Error::InvalidArgument(format!(
                "unknown scan plane {other:?}; use 01 or 02"
            ))),
        }
    }
}

/// One projector's response over the scan, with its sinusoid fit.
#[derive(Debug, Clone, PartialEq)]
pub struct VisibilityCurve {
    /// Index of the projector within the basis.
    pub projector: usize,
    /// Scan angles in radians.
    pub phis: Vec<f64>,
    /// Measured overlap at each angle.
    pub values: Vec<f64>,
    /// Least-squares sinusoid through the samples.
    pub fit: SinusoidFit,
}

/// The state `cos φ |ψ_a⟩ + sin φ |ψ_b⟩` for the plane's axis pair
/// `(a, b)`, renormalized to guard against round-off in the inputs.
pub fn rotated_state(states: &[[C64; 3]; 3], plane: ScanPlane, phi: f64) -> [C64; 3] {
    let (a, b) = plane.axes();
    let mut out = [C64::new(0.0, 0.0); 3];
    for k in 0..3 {
        out[k] = phi.cos() * states[a][k] + phi.sin() * states[b][k];
    }
    let norm = out.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    for c in &mut out {
        *c /= norm;
    }
    out
}

fn check_grid(phis: &[f64]) -> Result<()> {
    if phis.len() < 8 {
        return Err(Error::InvalidArgument(format!(
            "a visibility scan needs at least 8 angles, got {}",
            phis.len()
        )));
    }
    if phis.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidArgument(
            "scan angles must be finite".into(),
        ));
    }
    Ok(())
}

/// A uniform scan grid of `points` angles covering a full period `[0, π)`.
pub fn scan_grid(points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| std::f64::consts::PI * i as f64 / points as f64)
        .collect()
}

/// Scans a named basis with the exact effective model: every projector of
/// the basis against the state rotated through `plane`. Instantaneous, so
/// suited for dense grids.
pub fn visibility_scan(basis: BasisId, plane: ScanPlane, phis: &[f64]) -> Result<[VisibilityCurve; 3]> {
    check_grid(phis)?;
    let phases = basis_phases(basis);
    let states = basis_states(basis);
    let solutions = [
        solve_analyzer(&phases[0])?,
        solve_analyzer(&phases[1])?,
        solve_analyzer(&phases[2])?,
    ];
    scan_effective(&solutions, &states, plane, phis)
}

/// [`visibility_scan`] over explicit analyzers and states — the building
/// block for synthetic-misalignment studies, where one side is rotated
/// away from its nominal orientation before scanning.
pub fn scan_effective(
    solutions: &[AnalyzerSolution; 3],
    states: &[[C64; 3]; 3],
    plane: ScanPlane,
    phis: &[f64],
) -> Result<[VisibilityCurve; 3]> {
    check_grid(phis)?;
    let mut curves = Vec::with_capacity(3);
    for (j, solution) in solutions.iter().enumerate() {
        let values = phis
            .iter()
            .map(|&phi| {
                let input = TimeBinState::new(rotated_state(states, plane, phi).to_vec(), 1.0)?;
                project(&input, &solution.pulses)
            })
            .collect::<Result<Vec<f64>>>()?;
        let fit = fit_sinusoid(phis, &values)?;
        curves.push(VisibilityCurve {
            projector: j,
            phis: phis.to_vec(),
            values,
            fit,
        });
    }
    Ok(curves.try_into().expect("three projectors per basis"))
}

/// Scans a named basis through the Maxwell-Bloch simulation: one storage
/// reference run, then one full propagation per projector per angle. At
/// `n` angles this costs `3n + 1` runs of the configured grids — minutes
/// to hours — so keep the grid small or use [`visibility_scan`] unless the
/// propagation physics is the point.
pub fn visibility_scan_simulated(
    cfg: &SimConfig,
    basis: BasisId,
    plane: ScanPlane,
    phis: &[f64],
) -> Result<[VisibilityCurve; 3]> {
    check_grid(phis)?;
    let phases = basis_phases(basis);
    let states = basis_states(basis);
    let solutions = [
        solve_analyzer(&phases[0])?,
        solve_analyzer(&phases[1])?,
        solve_analyzer(&phases[2])?,
    ];
    let calib = calibrate_transfer(&cfg.read_pulse()?, CALIBRATION_POINTS)?;
    let mut reference_amps = vec![C64::new(0.0, 0.0); cfg.input.amps_re.len()];
    reference_amps[0] = C64::new(1.0, 0.0);
    let eta0 = run_storage(&crate::sim::with_amps(cfg, &reference_amps))?.efficiency;

    let mut curves = Vec::with_capacity(3);
    for (j, solution) in solutions.iter().enumerate() {
        let values = phis
            .iter()
            .map(|&phi| {
                let input = rotated_state(&states, plane, phi);
                let run = run_pra(
                    &crate::sim::with_amps(cfg, &input),
                    solution,
                    &calib,
                    eta0,
                )?;
                Ok(run.projection)
            })
            .collect::<Result<Vec<f64>>>()?;
        let fit = fit_sinusoid(phis, &values)?;
        curves.push(VisibilityCurve {
            projector: j,
            phis: phis.to_vec(),
            values,
            fit,
        });
    }
    Ok(curves.try_into().expect("three projectors per basis"))
}
