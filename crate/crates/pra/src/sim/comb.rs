//! Atomic-frequency-comb geometry and its discretized detuning classes.
//!
//! The absorption profile is a periodic train of square teeth: period
//! `Δ` (`spacing_hz`), tooth width `Δ / F`, zero outside the bandwidth.
//! The finesse follows from the optical depth via the optimal-finesse
//! rule `F = π / arctan(2π / d)`, and a comb rephases stored optical
//! coherence every `1 / Δ`.
//!
//! For propagation the profile is discretized into detuning classes:
//! every tooth carries `samples_per_tooth` midpoint samples, each
//! weighted by the angular spectral measure it represents. On-tooth
//! spectral density is one by construction, which fixes the
//! field-medium coupling so a weak resonant pulse is attenuated by
//! the configured optical depth (see [`Comb::coupling`]).

use crate::error::{Error, Result};
use std::f64::consts::{PI, TAU};

/// One propagated detuning class: a spectral sample of the comb.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralClass {
    /// Detuning of the class from line center, in angular units (rad/s).
    pub detuning_rad_s: f64,
    /// Angular spectral measure the class represents (rad/s).
    pub weight_rad_s: f64,
}

/// Finesse of a comb with optical depth `d` under the optimal-finesse
/// rule `F = π / arctan(2π / d)`.
///
/// Tends to 2 as `d → 0` and grows without bound with `d`.
pub fn comb_finesse(od_depth: f64) -> f64 {
    PI / (TAU / od_depth).atan()
}

/// First-order forward-recall efficiency of a square-tooth comb:
/// `(d/F)² e^{−d/F} sinc²(π/F)`.
///
/// The three factors are the coherent recall amplitude of a medium with
/// effective depth `d/F`, its re-absorption on the way out, and the
/// dephasing from the finite tooth width.
///
/// ```
/// use pra::sim::{afc_theory_efficiency, comb_finesse};
///
/// let eta = afc_theory_efficiency(4.0, comb_finesse(4.0)).unwrap();
/// assert!((eta - 0.321).abs() < 1e-3);
/// ```
pub fn afc_theory_efficiency(od_depth: f64, finesse: f64) -> Result<f64> {
    if !(od_depth.is_finite() && od_depth >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "optical depth must be finite and nonnegative, got {od_depth}"
        )));
    }
    if !(finesse.is_finite() && finesse > 1.0) {
        return Err(Error::InvalidArgument(format!(
            "finesse must exceed 1, got {finesse}"
        )));
    }
    let x = od_depth / finesse;
    let arg = PI / finesse;
    let sinc = arg.sin() / arg;
    Ok(x * x * (-x).exp() * sinc * sinc)
}

/// A built comb: geometry plus the discretized detuning classes.
#[derive(Debug, Clone, PartialEq)]
pub struct Comb {
    od_depth: f64,
    bandwidth_hz: f64,
    spacing_hz: f64,
    finesse: f64,
    tooth_count: usize,
    samples_per_tooth: usize,
    classes: Vec<SpectralClass>,
}

impl Comb {
    /// Builds the comb and its detuning classes.
    ///
    /// Teeth are centered on a grid symmetric about line center with
    /// period `spacing_hz`, filling the bandwidth; each tooth gets
    /// `samples_per_tooth` midpoint detuning samples across its width.
    /// A zero optical depth is allowed and describes a transparent
    /// medium.
    ///
    /// ```
    /// use pra::sim::Comb;
    ///
    /// let comb = Comb::build(4.0, 4e6, 40e3, 10).unwrap();
    /// assert_eq!(comb.tooth_count(), 100);
    /// assert!((comb.finesse() - 3.1296).abs() < 1e-4);
    /// assert!((comb.rephasing_time_s() - 25e-6).abs() < 1e-12);
    /// ```
    pub fn build(
        od_depth: f64,
        bandwidth_hz: f64,
        spacing_hz: f64,
        samples_per_tooth: usize,
    ) -> Result<Self> {
        if !(od_depth.is_finite() && od_depth >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "optical depth must be finite and nonnegative, got {od_depth}"
            )));
        }
        if !(bandwidth_hz.is_finite() && bandwidth_hz > 0.0)
            || !(spacing_hz.is_finite() && spacing_hz > 0.0)
        {
            return Err(Error::InvalidArgument(format!(
                "bandwidth and tooth spacing must be positive, got {bandwidth_hz} Hz / {spacing_hz} Hz"
            )));
        }
        let ratio = bandwidth_hz / spacing_hz;
        if ratio < 3.0 {
            return Err(Error::InvalidArgument(format!(
                "too few comb teeth: bandwidth / spacing = {ratio:.3} < 3"
            )));
        }
        if samples_per_tooth == 0 {
            return Err(Error::InvalidArgument(
                "need at least one detuning sample per tooth".into(),
            ));
        }
        let finesse = comb_finesse(od_depth);
        let tooth_count = ratio.floor() as usize;
        let tooth_width_hz = spacing_hz / finesse;
        let sample_width_hz = tooth_width_hz / samples_per_tooth as f64;
        let mut classes = Vec::with_capacity(tooth_count * samples_per_tooth);
        for m in 0..tooth_count {
            let center = (m as f64 - 0.5 * (tooth_count as f64 - 1.0)) * spacing_hz;
            for i in 0..samples_per_tooth {
                let offset = ((i as f64 + 0.5) / samples_per_tooth as f64 - 0.5) * tooth_width_hz;
                classes.push(SpectralClass {
                    detuning_rad_s: TAU * (center + offset),
                    weight_rad_s: TAU * sample_width_hz,
                });
            }
        }
        Ok(Self {
            od_depth,
            bandwidth_hz,
            spacing_hz,
            finesse,
            tooth_count,
            samples_per_tooth,
            classes,
        })
    }

    pub fn od_depth(&self) -> f64 {
        self.od_depth
    }

    pub fn bandwidth_hz(&self) -> f64 {
        self.bandwidth_hz
    }

    pub fn spacing_hz(&self) -> f64 {
        self.spacing_hz
    }

    pub fn finesse(&self) -> f64 {
        self.finesse
    }

    pub fn tooth_count(&self) -> usize {
        self.tooth_count
    }

    pub fn tooth_width_hz(&self) -> f64 {
        self.spacing_hz / self.finesse
    }

    /// Time after which stored optical coherence rephases: `1 / Δ`.
    pub fn rephasing_time_s(&self) -> f64 {
        self.spacing_hz.recip()
    }

    pub fn samples_per_tooth(&self) -> usize {
        self.samples_per_tooth
    }

    pub fn classes(&self) -> &[SpectralClass] {
        &self.classes
    }

    /// Field-medium coupling constant for a unit-length medium.
    ///
    /// A weak field at detuning δ decays as `∂_z E = −κ π ρ(δ) E` when
    /// the classes tile the spectrum with density ρ; on a tooth ρ = 1,
    /// so `κ = d / π` makes the on-tooth amplitude transmission
    /// `e^{−d/2}` exactly.
    pub fn coupling(&self) -> f64 {
        self.od_depth / PI
    }

    /// First-order forward-recall efficiency of this comb.
    pub fn theory_efficiency(&self) -> f64 {
        afc_theory_efficiency(self.od_depth, self.finesse)
            .expect("a built comb always has admissible depth and finesse")
    }
}
