//! JSON-backed configuration of a full storage sequence.
//!
//! The documented schema:
//!
//! ```json
//! {
//!   "comb":  { "d": 4.0, "bw_hz": 4e6, "delta_hz": 4e4 },
//!   "input": { "amps_re": [1.0, 0.0, 0.0], "amps_im": [0.0, 0.0, 0.0],
//!              "tau_s": 1.67e-6 },
//!   "write": { "chirp_range_hz": 1.5e6, "ramp_s": 3e-6, "plateau_s": 6e-6,
//!              "window_s": 12e-6, "rabi_hz": 3.5e5 },
//!   "read":  { "chirp_range_hz": 1.5e6, "ramp_s": 3e-6, "plateau_s": 6e-6,
//!              "window_s": 12e-6, "rabi_hz": 3.5e5 },
//!   "grids": { "dt_s": 5e-9, "nz": 50, "ndelta": 10 }
//! }
//! ```
//!
//! Unknown keys are rejected. An optional top-level `spin_wait_s`
//! records the logical storage interval; the spin transition is
//! homogeneous and undamped here, so the value is metadata and does
//! not change the dynamics.
//!
//! [`SimConfig::validate`] checks every constraint and reports all
//! violations at once, each as its own line of the configuration
//! error.

use super::comb::Comb;
use crate::error::{Error, Result};
use crate::pulse::HshPulse;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// Comb geometry: optical depth, total bandwidth, tooth period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CombConfig {
    /// On-tooth optical depth (dimensionless).
    pub d: f64,
    /// Total comb bandwidth in Hz.
    pub bw_hz: f64,
    /// Tooth period in Hz.
    pub delta_hz: f64,
}

/// Input train: complex bin amplitudes and the bin period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputConfig {
    /// Real parts of the bin amplitudes, one per bin.
    pub amps_re: Vec<f64>,
    /// Imaginary parts of the bin amplitudes, one per bin.
    pub amps_im: Vec<f64>,
    /// Bin period in seconds.
    pub tau_s: f64,
}

/// Chirped-pulse waveform parameters (see [`crate::pulse::HshPulse`]).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseConfig {
    /// Total swept range of the chirp in Hz.
    pub chirp_range_hz: f64,
    /// Hyperbolic-secant ramp time constant scale in seconds.
    pub ramp_s: f64,
    /// Full width of the constant-amplitude plateau in seconds.
    pub plateau_s: f64,
    /// Full width of the truncation window in seconds.
    pub window_s: f64,
    /// Peak Rabi frequency in Hz.
    pub rabi_hz: f64,
}

/// Numerical grids: time step, propagation slices, detuning sampling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Time step in seconds.
    pub dt_s: f64,
    /// Number of propagation slices along the medium.
    pub nz: usize,
    /// Detuning samples per comb tooth.
    pub ndelta: usize,
}

/// Full sequence configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub comb: CombConfig,
    pub input: InputConfig,
    pub write: PulseConfig,
    pub read: PulseConfig,
    pub grids: GridConfig,
    /// Logical spin storage interval (metadata; the spin evolution is
    /// frozen, so this does not affect the dynamics).
    #[serde(default)]
    pub spin_wait_s: f64,
}

const REFERENCE_PULSE: PulseConfig = PulseConfig {
    chirp_range_hz: 1.5e6,
    ramp_s: 3e-6,
    plateau_s: 6e-6,
    window_s: 12e-6,
    rabi_hz: 3.5e5,
};

impl Default for SimConfig {
    /// The reference parameter set: d = 4 comb over 4 MHz with 40 kHz
    /// teeth, a single stored bin with τ = 1.67 µs, matched 1.5 MHz /
    /// 350 kHz write and read chirps, and grids that resolve the
    /// fastest scale fifty-fold.
    fn default() -> Self {
        Self {
            comb: CombConfig {
                d: 4.0,
                bw_hz: 4e6,
                delta_hz: 4e4,
            },
            input: InputConfig {
                amps_re: vec![1.0, 0.0, 0.0],
                amps_im: vec![0.0, 0.0, 0.0],
                tau_s: 1.67e-6,
            },
            write: REFERENCE_PULSE,
            read: REFERENCE_PULSE,
            grids: GridConfig {
                dt_s: 5e-9,
                nz: 50,
                ndelta: 10,
            },
            spin_wait_s: 0.0,
        }
    }
}

/// Largest admissible time step: a tenth of the default rule
/// `dt = 1 / (50 · max(BW, chirp range, Rabi))`.
fn max_dt_s(cfg: &SimConfig) -> f64 {
    let fastest = cfg
        .comb
        .bw_hz
        .max(cfg.write.chirp_range_hz)
        .max(cfg.read.chirp_range_hz)
        .max(cfg.write.rabi_hz)
        .max(cfg.read.rabi_hz);
    1.0 / (10.0 * fastest)
}

impl SimConfig {
    /// Parses a JSON document and validates it.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)
            .map_err(|e| Error::Config(vec![format!("malformed configuration: {e}")]))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configuration always serializes")
    }

    /// Checks every constraint, collecting all violations.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        let c = &self.comb;
        if !(c.d.is_finite() && c.d >= 0.0) {
            errs.push(format!("comb.d must be finite and nonnegative, got {}", c.d));
        }
        if !(c.bw_hz.is_finite() && c.bw_hz > 0.0) {
            errs.push(format!("comb.bw_hz must be positive, got {}", c.bw_hz));
        }
        if !(c.delta_hz.is_finite() && c.delta_hz > 0.0) {
            errs.push(format!("comb.delta_hz must be positive, got {}", c.delta_hz));
        } else if c.bw_hz.is_finite() && c.bw_hz / c.delta_hz < 3.0 {
            errs.push(format!(
                "too few comb teeth: comb.bw_hz / comb.delta_hz = {:.3} < 3",
                c.bw_hz / c.delta_hz
            ));
        }

        let i = &self.input;
        if i.amps_re.is_empty() {
            errs.push("input.amps_re must list at least one bin".into());
        }
        if i.amps_re.len() != i.amps_im.len() {
            errs.push(format!(
                "input.amps_re and input.amps_im must have equal length, got {} and {}",
                i.amps_re.len(),
                i.amps_im.len()
            ));
        }
        if i.amps_re.len() > 8 {
            errs.push(format!(
                "input supports at most 8 bins, got {}",
                i.amps_re.len()
            ));
        }
        if i.amps_re.iter().chain(&i.amps_im).any(|a| !a.is_finite()) {
            errs.push("input amplitudes must be finite".into());
        }
        if !(i.tau_s.is_finite() && i.tau_s > 0.0) {
            errs.push(format!("input.tau_s must be positive, got {}", i.tau_s));
        }

        for (label, p) in [("write", &self.write), ("read", &self.read)] {
            if let Err(e) = HshPulse::new(
                p.chirp_range_hz,
                p.ramp_s,
                p.plateau_s,
                p.window_s,
                p.rabi_hz,
            ) {
                errs.push(format!("{label}: {e}"));
            }
        }

        let g = &self.grids;
        if !(g.dt_s.is_finite() && g.dt_s > 0.0) {
            errs.push(format!("grids.dt_s must be positive, got {}", g.dt_s));
        } else {
            let cap = max_dt_s(self);
            if g.dt_s > cap {
                errs.push(format!(
                    "grids.dt_s = {:.3e} s does not resolve the fastest configured \
                     frequency; need at most {cap:.3e} s",
                    g.dt_s
                ));
            }
        }
        if g.nz < 2 {
            errs.push(format!("grids.nz must be at least 2, got {}", g.nz));
        }
        if g.ndelta < 10 {
            errs.push(format!(
                "grids.ndelta must provide at least 10 samples per tooth, got {}",
                g.ndelta
            ));
        }

        // The stored pattern must be written before it first rephases,
        // and a three-component read must finish before the earliest
        // echo window opens; both reduce to the same bound.
        if errs.is_empty() {
            let bins = i.amps_re.len() as f64;
            let latest = (2.0 * bins - 1.0) * i.tau_s
                + 0.5 * (self.write.window_s + self.read.window_s);
            let rephase = 1.0 / c.delta_hz;
            if latest > rephase {
                errs.push(format!(
                    "sequence does not fit before the first comb rephasing: write and \
                     read need {latest:.3e} s but the comb rephases after {rephase:.3e} s"
                ));
            }
        }

        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }

    /// Complex bin amplitudes of the input train.
    pub fn input_amps(&self) -> Vec<C64> {
        self.input
            .amps_re
            .iter()
            .zip(&self.input.amps_im)
            .map(|(&re, &im)| C64::new(re, im))
            .collect()
    }

    pub fn write_pulse(&self) -> Result<HshPulse> {
        let p = &self.write;
        HshPulse::new(
            p.chirp_range_hz,
            p.ramp_s,
            p.plateau_s,
            p.window_s,
            p.rabi_hz,
        )
    }

    pub fn read_pulse(&self) -> Result<HshPulse> {
        let p = &self.read;
        HshPulse::new(
            p.chirp_range_hz,
            p.ramp_s,
            p.plateau_s,
            p.window_s,
            p.rabi_hz,
        )
    }

    pub fn comb(&self) -> Result<Comb> {
        Comb::build(
            self.comb.d,
            self.comb.bw_hz,
            self.comb.delta_hz,
            self.grids.ndelta,
        )
    }
}
