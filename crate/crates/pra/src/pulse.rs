//! Adiabatic pulse synthesis: chirped sech-plateau-sech envelopes, their
//! three-component composites, and Gaussian time-bin input trains.
//!
//! All fields are returned as complex Rabi frequencies in angular units
//! (rad/s), ready to drive a two- or three-level amplitude equation. Pulse
//! frequency parameters are given in ordinary Hz (cycles per second).

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use std::f64::consts::TAU;

/// Intensity-FWHM of a default time-bin pulse as a fraction of the bin
/// width: FWHM = bin / 2.38.
pub const BIN_FWHM_RATIO: f64 = 2.38;

/// Ramp steepness parameter: the sech envelope has fallen to 1% of peak
/// exactly one ramp duration past the plateau edge.
fn ramp_mu() -> f64 {
    100.0f64.acosh()
}

/// Chirped adiabatic pulse: a constant-amplitude plateau of duration
/// `plateau_s` flanked by sech-shaped ramps of characteristic duration
/// `ramp_s`, hard-truncated to a window of `window_s` around the center.
/// The instantaneous frequency is linear over the plateau and follows a
/// tanh profile over the ramps, joined with continuous slope, sweeping the
/// full `chirp_range_hz` across the truncation window.
///
/// ```
/// use pra::pulse::HshPulse;
/// use std::f64::consts::TAU;
///
/// let p = HshPulse::new(1.5e6, 3.0e-6, 6.0e-6, 12.0e-6, 350.0e3).unwrap();
/// // Peak field at the center, in angular units.
/// assert!((p.envelope(0.0).norm() - TAU * 350.0e3).abs() < 1e-6);
/// // Hard zero outside the window.
/// assert_eq!(p.envelope(6.1e-6).norm(), 0.0);
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct HshPulse {
    chirp_range_hz: f64,
    ramp_s: f64,
    plateau_s: f64,
    window_s: f64,
    rabi_hz: f64,
    phase_rad: f64,
    scale: f64,
    offset_hz: f64,
}

impl HshPulse {
    /// Builds a full-scale, zero-phase, zero-offset pulse.
    pub fn new(
        chirp_range_hz: f64,
        ramp_s: f64,
        plateau_s: f64,
        window_s: f64,
        rabi_hz: f64,
    ) -> Result<Self> {
        for (name, v) in [
            ("chirp range", chirp_range_hz),
            ("ramp duration", ramp_s),
            ("plateau duration", plateau_s),
            ("window duration", window_s),
            ("peak Rabi frequency", rabi_hz),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        if ramp_s == 0.0 || plateau_s == 0.0 {
            return Err(Error::InvalidArgument(
                "ramp and plateau durations must be positive".into(),
            ));
        }
        if window_s <= plateau_s {
            return Err(Error::InvalidArgument(format!(
                "truncation window ({window_s} s) must exceed the plateau ({plateau_s} s)"
            )));
        }
        Ok(Self {
            chirp_range_hz,
            ramp_s,
            plateau_s,
            window_s,
            rabi_hz,
            phase_rad: 0.0,
            scale: 1.0,
            offset_hz: 0.0,
        })
    }

    /// Sets the amplitude scale (0 ..= 1).
    pub fn with_scale(mut self, scale: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&scale) {
            return Err(Error::InvalidArgument(format!(
                "amplitude scale must lie in [0, 1], got {scale}"
            )));
        }
        self.scale = scale;
        Ok(self)
    }

    /// Sets the constant phase added to the whole pulse.
    pub fn with_phase(mut self, phase_rad: f64) -> Self {
        self.phase_rad = phase_rad;
        self
    }

    /// Sets the center-frequency offset (Hz) added to the chirp.
    pub fn with_offset(mut self, offset_hz: f64) -> Self {
        self.offset_hz = offset_hz;
        self
    }

    pub fn chirp_range_hz(&self) -> f64 {
        self.chirp_range_hz
    }

    pub fn ramp_s(&self) -> f64 {
        self.ramp_s
    }

    pub fn plateau_s(&self) -> f64 {
        self.plateau_s
    }

    pub fn window_s(&self) -> f64 {
        self.window_s
    }

    pub fn rabi_hz(&self) -> f64 {
        self.rabi_hz
    }

    pub fn phase_rad(&self) -> f64 {
        self.phase_rad
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn offset_hz(&self) -> f64 {
        self.offset_hz
    }

    /// Plateau chirp rate (Hz per second), normalized so the instantaneous
    /// frequency sweeps exactly `chirp_range_hz` across the window.
    pub fn chirp_rate_hz_per_s(&self) -> f64 {
        let mu = ramp_mu();
        let half_ramp_span = (self.window_s - self.plateau_s) / 2.0;
        let effective = self.plateau_s
            + 2.0 * (self.ramp_s / mu) * (mu * half_ramp_span / self.ramp_s).tanh();
        self.chirp_range_hz / effective
    }

    /// Instantaneous frequency (Hz) at time `t` from the pulse center:
    /// linear over the plateau, tanh-saturating over the ramps, plus the
    /// constant center offset.
    pub fn detuning_hz(&self, t: f64) -> f64 {
        let rate = self.chirp_rate_hz_per_s();
        let x = t.abs() - self.plateau_s / 2.0;
        let chirp = if x <= 0.0 {
            rate * t
        } else {
            let mu = ramp_mu();
            let edge = rate * self.plateau_s / 2.0;
            let ramp = rate * (self.ramp_s / mu) * (mu * x / self.ramp_s).tanh();
            (edge + ramp) * t.signum()
        };
        chirp + self.offset_hz
    }

    /// Accumulated phase (rad) at time `t`: the integral of the
    /// instantaneous frequency plus the constant pulse phase.
    fn phase_at(&self, t: f64) -> f64 {
        let rate = self.chirp_rate_hz_per_s();
        let x = t.abs() - self.plateau_s / 2.0;
        let chirp_cycles = if x <= 0.0 {
            rate * t * t / 2.0
        } else {
            let mu = ramp_mu();
            let half = self.plateau_s / 2.0;
            let plateau = rate * half * half / 2.0;
            let ramp =
                rate * half * x + rate * (self.ramp_s / mu).powi(2) * (mu * x / self.ramp_s).cosh().ln();
            plateau + ramp
        };
        TAU * (chirp_cycles + self.offset_hz * t) + self.phase_rad
    }

    /// Complex field (angular Rabi frequency, rad/s) at time `t` from the
    /// pulse center. Exactly zero outside the truncation window.
    pub fn envelope(&self, t: f64) -> C64 {
        if t.abs() > self.window_s / 2.0 || self.scale == 0.0 {
            return C64::new(0.0, 0.0);
        }
        let x = t.abs() - self.plateau_s / 2.0;
        let shape = if x <= 0.0 {
            1.0
        } else {
            (ramp_mu() * x / self.ramp_s).cosh().recip()
        };
        let amp = self.scale * TAU * self.rabi_hz * shape;
        amp * C64::from_polar(1.0, self.phase_at(t))
    }

    /// Population transferred by this pulse between the two levels of an
    /// isolated atom detuned by `detuning_hz` from the pulse center
    /// frequency, starting in the lower level (fourth-order Runge-Kutta on
    /// the two-level amplitude equations).
    pub fn transfer_probability(&self, detuning_hz: f64) -> f64 {
        let half = self.window_s / 2.0;
        let bandwidth = self.chirp_range_hz + self.rabi_hz + detuning_hz.abs() + 1.0;
        let steps = (self.window_s * 160.0 * bandwidth).ceil() as usize;
        let dt = self.window_s / steps as f64;
        let delta = TAU * detuning_hz;
        let deriv = |t: f64, g: C64, e: C64| -> (C64, C64) {
            let w = self.envelope(t);
            let rot = C64::from_polar(1.0, delta * t);
            (
                -0.5 * C64::i() * w.conj() * rot * e,
                -0.5 * C64::i() * w * rot.conj() * g,
            )
        };
        let mut g = C64::new(1.0, 0.0);
        let mut e = C64::new(0.0, 0.0);
        for k in 0..steps {
            let t = -half + k as f64 * dt;
            let (k1g, k1e) = deriv(t, g, e);
            let (k2g, k2e) = deriv(t + dt / 2.0, g + dt / 2.0 * k1g, e + dt / 2.0 * k1e);
            let (k3g, k3e) = deriv(t + dt / 2.0, g + dt / 2.0 * k2g, e + dt / 2.0 * k2e);
            let (k4g, k4e) = deriv(t + dt, g + dt * k3g, e + dt * k3e);
            g += dt / 6.0 * (k1g + 2.0 * (k2g + k3g) + k4g);
            e += dt / 6.0 * (k1e + 2.0 * (k2e + k3e) + k4e);
        }
        e.norm_sqr()
    }
}

/// Regular time grid for waveform sampling.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGrid {
    t0_s: f64,
    dt_s: f64,
    len: usize,
}

impl SampleGrid {
    pub fn new(t0_s: f64, dt_s: f64, len: usize) -> Result<Self> {
        if !t0_s.is_finite() || !dt_s.is_finite() || dt_s <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "grid needs a finite start and positive step, got t0 = {t0_s}, dt = {dt_s}"
            )));
        }
        if len == 0 {
            return Err(Error::InvalidArgument("grid needs at least one sample".into()));
        }
        Ok(Self { t0_s, dt_s, len })
    }

    /// Grid covering `[t0, t1]` at 40 samples per period of the given
    /// bandwidth.
    pub fn for_bandwidth(t0_s: f64, t1_s: f64, bandwidth_hz: f64) -> Result<Self> {
        if !(bandwidth_hz.is_finite() && bandwidth_hz > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "bandwidth must be positive, got {bandwidth_hz}"
            )));
        }
        if !(t1_s > t0_s) {
            return Err(Error::InvalidArgument(format!(
                "grid span must be positive, got [{t0_s}, {t1_s}]"
            )));
        }
        let dt = 1.0 / (40.0 * bandwidth_hz);
        let len = ((t1_s - t0_s) / dt).ceil() as usize + 1;
        Self::new(t0_s, dt, len)
    }

    pub fn t0_s(&self) -> f64 {
        self.t0_s
    }

    pub fn dt_s(&self) -> f64 {
        self.dt_s
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.len
    }

    /// Sample times, in order.
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(move |k| self.t0_s + k as f64 * self.dt_s)
    }
}

/// Composite readout pulse: three copies of one adiabatic shape, delayed
/// by multiples of `delay_s`, each with its own amplitude scale and phase.
/// Component `n` is centered `n` delays after component 0, matching the
/// order in which the readout acts on successive time bins.
#[derive(Debug, Clone, PartialEq)]
pub struct ChshPulse {
    base: HshPulse,
    components: [(f64, f64); 3],
    delay_s: f64,
}

impl ChshPulse {
    /// `components` are `(scale, phase)` pairs; the shape's own scale and
    /// phase are replaced by them. A zero delay degenerates to a coherent
    /// sum of coincident pulses.
    pub fn new(shape: HshPulse, components: [(f64, f64); 3], delay_s: f64) -> Result<Self> {
        if !delay_s.is_finite() || delay_s < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "component delay must be finite and non-negative, got {delay_s}"
            )));
        }
        for (n, &(scale, phase)) in components.iter().enumerate() {
            if !(0.0..=1.0).contains(&scale) || !phase.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "component {n} needs scale in [0, 1] and finite phase, got ({scale}, {phase})"
                )));
            }
        }
        let base = shape.with_scale(1.0)?.with_phase(0.0);
        Ok(Self {
            base,
            components,
            delay_s,
        })
    }

    pub fn shape(&self) -> &HshPulse {
        &self.base
    }

    pub fn components(&self) -> &[(f64, f64); 3] {
        &self.components
    }

    pub fn delay_s(&self) -> f64 {
        self.delay_s
    }

    /// Total duration from the first window edge to the last.
    pub fn span_s(&self) -> f64 {
        self.base.window_s() + 2.0 * self.delay_s
    }

    /// Pointwise field at time `t` from component 0's center:
    /// `sum_n scale_n e^{i phase_n} f(t - n delay)`.
    pub fn field(&self, t: f64) -> C64 {
        self.components
            .iter()
            .enumerate()
            .map(|(n, &(scale, phase))| {
                scale * C64::from_polar(1.0, phase) * self.base.envelope(t - n as f64 * self.delay_s)
            })
            .sum()
    }

    /// Samples the field on a grid, rejecting grids below the Nyquist rate
    /// of the pulse bandwidth (chirp range + peak Rabi + |offset|).
    pub fn sample(&self, grid: &SampleGrid) -> Result<Vec<C64>> {
        let bandwidth =
            self.base.chirp_range_hz() + self.base.rabi_hz() + self.base.offset_hz().abs();
        if grid.dt_s() > 1.0 / (2.0 * bandwidth) {
            return Err(Error::InvalidArgument(format!(
                "grid step {} s undersamples a {} Hz bandwidth",
                grid.dt_s(),
                bandwidth
            )));
        }
        Ok(grid.times().map(|t| self.field(t)).collect())
    }
}

/// Train of Gaussian pulses, one per time bin: bin `i` spans
/// `[i tau, (i+1) tau)`, carries complex amplitude `amps[i]` at its
/// center, and is hard-truncated to its own bin so bins never overlap.
///
/// ```
/// use num_complex::Complex64 as C64;
/// use pra::pulse::BinTrain;
///
/// let train = BinTrain::new(vec![C64::new(1.0, 0.0); 3], 1.67e-6).unwrap();
/// // Default intensity FWHM is bin / 2.38.
/// assert!((train.fwhm_s() - 1.67e-6 / 2.38).abs() < 1e-18);
/// // Peak of bin 1 sits at its center.
/// assert!((train.field(1.5 * 1.67e-6).norm() - 1.0).abs() < 1e-12);
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct BinTrain {
    amps: Vec<C64>,
    tau_s: f64,
    fwhm_s: f64,
}

impl BinTrain {
    /// Builds a train with the default intensity FWHM of `tau / 2.38`.
    pub fn new(amps: Vec<C64>, tau_s: f64) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::InvalidArgument(
                "bin train needs at least one amplitude".into(),
            ));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidArgument(
                "bin amplitudes must be finite".into(),
            ));
        }
        if !(tau_s.is_finite() && tau_s > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "bin width must be positive, got {tau_s}"
            )));
        }
        Ok(Self {
            amps,
            tau_s,
            fwhm_s: tau_s / BIN_FWHM_RATIO,
        })
    }

    /// Overrides the intensity FWHM.
    pub fn with_fwhm(mut self, fwhm_s: f64) -> Result<Self> {
        if !(fwhm_s.is_finite() && fwhm_s > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "FWHM must be positive, got {fwhm_s}"
            )));
        }
        self.fwhm_s = fwhm_s;
        Ok(self)
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn tau_s(&self) -> f64 {
        self.tau_s
    }

    pub fn fwhm_s(&self) -> f64 {
        self.fwhm_s
    }

    /// Total train duration.
    pub fn span_s(&self) -> f64 {
        self.amps.len() as f64 * self.tau_s
    }

    /// Field at time `t` from the start of bin 0 (dimensionless, unit peak
    /// for unit amplitude).
    pub fn field(&self, t: f64) -> C64 {
        if t < 0.0 {
            return C64::new(0.0, 0.0);
        }
        let bin = (t / self.tau_s).floor() as usize;
        if bin >= self.amps.len() {
            return C64::new(0.0, 0.0);
        }
        let center = (bin as f64 + 0.5) * self.tau_s;
        let x = (t - center) / self.fwhm_s;
        // Amplitude Gaussian whose intensity has the declared FWHM.
        self.amps[bin] * (-2.0 * std::f64::consts::LN_2 * x * x).exp()
    }

    /// Samples the train on a grid.
    pub fn sample(&self, grid: &SampleGrid) -> Vec<C64> {
        grid.times().map(|t| self.field(t)).collect()
    }
}

/// Renders sampled waveform quadratures as CSV with a `t_s,re,im` header.
pub fn waveform_csv(grid: &SampleGrid, samples: &[C64]) -> String {
    let mut out = String::from("t_s,re,im\n");
    for (t, s) in grid.times().zip(samples) {
        out.push_str(&format!("{:e},{:e},{:e}\n", t, s.re, s.im));
    }
    out
}
