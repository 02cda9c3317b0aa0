//! High-level simulation runs: transfer calibration, reference storage
//! efficiency, analyzer projections, and whole-basis characterization.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pulse::HshPulse;
use crate::solver::{basis_phases, basis_states, solve_analyzer, AnalyzerSolution, BasisId};

use super::config::SimConfig;
use super::engine::{run_sequence, ReadStage, SequenceResult};

/// Default number of grid points for [`calibrate_transfer`].
pub const CALIBRATION_POINTS: usize = 41;

/// Largest transfer decrease between neighboring calibration points that
/// still counts as saturation of an adiabatic pulse rather than genuine
/// non-monotonicity. Near full amplitude the transfer curve is flat to a
/// few parts in 1e5, while a pulse that really leaves the monotone regime
/// (for instance by Rabi flopping) swings by order 0.1.
const SATURATION_SLACK: f64 = 1e-4;

/// Monotone map from control amplitude scale to the population a single
/// readout pulse transfers at band center, with its inverse.
///
/// Reduced-amplitude chirped pulses do not transfer a population equal to
/// the square of the amplitude ratio, so analyzer pulses cannot be
/// programmed by scaling amplitudes directly; this map assigns each target
/// transfer probability the amplitude scale that actually realizes it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferCalibration {
    scales: Vec<f64>,
    probs: Vec<f64>,
}

impl TransferCalibration {
    /// Builds the map from precomputed samples. `scales` must increase
    /// strictly from 0 to 1 and `probs` must be nondecreasing; a decreasing
    /// stretch means the pulse has left its monotone transfer regime and is
    /// reported as an error naming the offending scales. Dips within the
    /// saturation slack are flattened to the running maximum instead, so
    /// the stored map is always nondecreasing.
    pub fn from_samples(scales: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if scales.len() != probs.len() || scales.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "calibration needs matching grids of at least 2 points, got {} and {}",
                scales.len(),
                probs.len()
            )));
        }
        if scales[0] != 0.0 || *scales.last().unwrap() != 1.0 {
            return Err(Error::InvalidArgument(format!(
                "calibration grid must span [0, 1], got [{}, {}]",
                scales[0],
                scales.last().unwrap()
            )));
        }
        for w in scales.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidArgument(format!(
                    "calibration grid must increase strictly, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        if probs.iter().any(|p| !p.is_finite() || !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidArgument(
                "calibration probabilities must lie in [0, 1]".into(),
            ));
        }
        let mut monotone = probs.clone();
        for i in 1..monotone.len() {
            if monotone[i] < monotone[i - 1] - SATURATION_SLACK {
                return Err(Error::Degenerate(format!(
                    "transfer map is not monotone: P({:.4}) = {:.6} but P({:.4}) = {:.6}; \
                     the pulse drives more than a half cycle at high amplitude, so \
                     transfers cannot be assigned a unique scale",
                    scales[i - 1],
                    monotone[i - 1],
                    scales[i],
                    probs[i]
                )));
            }
            monotone[i] = monotone[i].max(monotone[i - 1]);
        }
        Ok(Self {
            scales,
            probs: monotone,
        })
    }

    /// Sweeps the amplitude scale of `shape` over a uniform grid of
    /// `points` values spanning [0, 1] and records the band-center
    /// transfer probability of each.
    pub fn for_pulse(shape: &HshPulse, points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::InvalidArgument(format!(
                "calibration needs at least 2 grid points, got {points}"
            )));
        }
        let scales: Vec<f64> = (0..points)
            .map(|i| i as f64 / (points - 1) as f64)
            .collect();
        let probs = scales
            .iter()
            .map(|&sc| Ok(shape.clone().with_scale(sc)?.transfer_probability(0.0)))
            .collect::<Result<Vec<f64>>>()?;
        Self::from_samples(scales, probs)
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Largest transfer the pulse reaches (at full amplitude).
    pub fn p_max(&self) -> f64 {
        *self.probs.last().unwrap()
    }

    /// Transfer probability at an amplitude scale in [0, 1], by linear
    /// interpolation.
    pub fn probability(&self, scale: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&scale) {
            return Err(Error::InvalidArgument(format!(
                "amplitude scale must lie in [0, 1], got {scale}"
            )));
        }
        let i = self.scales.partition_point(|&s| s < scale);
        if i == 0 {
            return Ok(self.probs[0]);
        }
        if i == self.scales.len() {
            return Ok(*self.probs.last().unwrap());
        }
        let f = (scale - self.scales[i - 1]) / (self.scales[i] - self.scales[i - 1]);
        Ok(self.probs[i - 1] + f * (self.probs[i] - self.probs[i - 1]))
    }

    /// Amplitude scale that realizes transfer probability `p`. Targets at
    /// or above the map's maximum clamp to full amplitude, so a nominal
    /// `p = 1` readout is the plain full recall pulse.
    pub fn scale_for(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!(
                "transfer probability must lie in [0, 1], got {p}"
            )));
        }
        if p >= self.p_max() {
            return Ok(1.0);
        }
        let i = self.probs.partition_point(|&q| q < p);
        if i == 0 {
            return Ok(self.scales[0]);
        }
        let (p0, p1) = (self.probs[i - 1], self.probs[i]);
        if p1 == p0 {
            return Ok(self.scales[i - 1]);
        }
        let f = (p - p0) / (p1 - p0);
        Ok(self.scales[i - 1] + f * (self.scales[i] - self.scales[i - 1]))
    }
}

/// Calibrates the readout amplitude scale against the transfer it
/// realizes; see [`TransferCalibration::for_pulse`].
pub fn calibrate_transfer(shape: &HshPulse, points: usize) -> Result<TransferCalibration> {
    TransferCalibration::for_pulse(shape, points)
}

/// Outcome of a store-and-recall reference run.
#[derive(Debug, Clone)]
pub struct StorageReport {
    /// Echo energy in the first `bins` output slots over the input energy.
    pub efficiency: f64,
    /// Energy in every output slot, in slot order.
    pub slot_energies: Vec<f64>,
    /// The underlying propagation.
    pub result: SequenceResult,
}

/// Stores the configured input train and recalls it with one
/// full-amplitude readout pulse. Each input bin echoes into its own output
/// slot; the summed slot energies over the input energy is the reference
/// efficiency every analyzer projection is normalized by.
pub fn run_storage(cfg: &SimConfig) -> Result<StorageReport> {
    let result = run_sequence(cfg, ReadStage::Full)?;
    let slot_energies = result.trace.window_energies();
    let bins = result.timeline.bins();
    let efficiency = slot_energies[..bins].iter().sum::<f64>() / result.input_energy;
    Ok(StorageReport {
        efficiency,
        slot_energies,
        result,
    })
}

/// Outcome of one analyzer projection run.
#[derive(Debug, Clone)]
pub struct PraReport {
    /// Energy in each output slot over the input energy.
    pub slot_ratios: Vec<f64>,
    /// Interference-slot energy over `eta0 *` input energy: the measured
    /// projection probability of the stored state onto the analyzer state.
    pub projection: f64,
    /// Index of the interference slot among the output windows.
    pub interference_slot: usize,
    /// The underlying propagation.
    pub result: SequenceResult,
}

/// Reads the stored train out through a three-component analyzer.
///
/// Each solved model pulse `(P, theta)` is compiled to a control component
/// whose amplitude scale realizes transfer `P` per the calibration map and
/// whose field phase is `-theta`: the stored amplitude is emitted through
/// the conjugate of the control coupling, so imprinting a model phase
/// requires its negative on the field. `eta0` is the reference efficiency
/// from [`run_storage`] under the same comb, pulses, and grids.
pub fn run_pra(
    cfg: &SimConfig,
    solution: &AnalyzerSolution,
    calib: &TransferCalibration,
    eta0: f64,
) -> Result<PraReport> {
    if !(eta0.is_finite() && eta0 > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "reference efficiency must be positive, got {eta0}"
        )));
    }
    let mut components = [(0.0, 0.0); 3];
    for (slot, pulse) in components.iter_mut().zip(&solution.pulses) {
        *slot = (calib.scale_for(pulse.transfer())?, -pulse.phase());
    }
    let result = run_sequence(cfg, ReadStage::Composite(components))?;
    let interference_slot = result.timeline.interference_slot().ok_or_else(|| {
        Error::InvalidArgument(format!(
            "a 3-component readout reaches no common slot for {} input bins",
            result.timeline.bins()
        ))
    })?;
    let energies = result.trace.window_energies();
    let slot_ratios: Vec<f64> = energies.iter().map(|e| e / result.input_energy).collect();
    let projection = energies[interference_slot] / (eta0 * result.input_energy);
    Ok(PraReport {
        slot_ratios,
        projection,
        interference_slot,
        result,
    })
}

/// Outcome of characterizing one three-state basis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BasisReport {
    /// Reference storage efficiency of the configuration.
    pub eta0: f64,
    /// `projections[i][j]`: projection measured with analyzer `i` on
    /// prepared state `j`.
    pub projections: [[f64; 3]; 3],
    /// Mean diagonal projection: the basis readout efficiency.
    pub efficiency: f64,
    /// Diagonal energy over total energy in the interference slot: how
    /// exclusively each analyzer answers to its own state.
    pub fidelity: f64,
}

pub(crate) fn with_amps(cfg: &SimConfig, amps: &[C64]) -> SimConfig {
    let mut out = cfg.clone();
    out.input.amps_re = amps.iter().map(|a| a.re).collect();
    out.input.amps_im = amps.iter().map(|a| a.im).collect();
    out
}

/// Projects every state of a basis onto every analyzer of the basis: one
/// reference storage run plus nine analyzer runs.
///
/// `solutions[i]` must be the solved analyzer for `states[i]`. The
/// reference efficiency is measured once with a single populated bin (the
/// echo efficiency per bin is state-independent in the linear regime) and
/// shared by all nine projections.
pub fn simulate_basis(
    cfg: &SimConfig,
    solutions: &[AnalyzerSolution; 3],
    states: &[[C64; 3]; 3],
) -> Result<BasisReport> {
    let calib = calibrate_transfer(&cfg.read_pulse()?, CALIBRATION_POINTS)?;
    let mut reference_amps = vec![C64::new(0.0, 0.0); cfg.input.amps_re.len()];
    reference_amps[0] = C64::new(1.0, 0.0);
    let eta0 = run_storage(&with_amps(cfg, &reference_amps))?.efficiency;

    let mut projections = [[0.0; 3]; 3];
    for (i, solution) in solutions.iter().enumerate() {
        for (j, state) in states.iter().enumerate() {
            let run = run_pra(&with_amps(cfg, state), solution, &calib, eta0)?;
            projections[i][j] = run.projection;
        }
    }
    let efficiency = (0..3).map(|i| projections[i][i]).sum::<f64>() / 3.0;
    let total: f64 = projections.iter().flatten().sum();
    let diagonal: f64 = (0..3).map(|i| projections[i][i]).sum();
    let fidelity = diagonal / total;
    Ok(BasisReport {
        eta0,
        projections,
        efficiency,
        fidelity,
    })
}

/// [`simulate_basis`] for one of the named bases, solving its three
/// analyzers from the basis phases first.
pub fn simulate_named_basis(cfg: &SimConfig, id: BasisId) -> Result<BasisReport> {
    let phases = basis_phases(id);
    let solutions = [
        solve_analyzer(&phases[0])?,
        solve_analyzer(&phases[1])?,
        solve_analyzer(&phases[2])?,
    ];
    let states = basis_states(id);
    simulate_basis(cfg, &solutions, &states)
}

/// Headline numbers of a run, serialized for the command-line interface.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSummary {
    /// Reference storage efficiency.
    pub eta0: f64,
    /// Per-slot output energies over the input energy.
    pub bin_energies: Vec<f64>,
    /// Basis readout efficiency, when a basis was characterized.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    /// Basis readout fidelity, when a basis was characterized.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fidelity: Option<f64>,
}

impl RunSummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::Config(vec![format!("malformed summary: {e}")]))
    }
}
