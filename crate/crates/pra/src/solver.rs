//! Exact pulse parameters for a requested three-bin projector.
//!
//! A three-pulse analyzer projects onto the state with amplitudes
//! `(1/sqrt 3) (e^{i phi_0}, e^{i phi_1}, e^{i phi_2})` exactly when its
//! bright coefficients have equal magnitude and the conjugated target
//! phases. Pulling a common phase out, everything depends on the target
//! only through the class invariant `phi_tot = phi_0 + phi_2 - 2 phi_1`:
//!
//! - the outer transfers are equal, `P2 = P0`;
//! - the outer pulse phases are fixed, `theta_0 = phi_2`, `theta_2 = phi_0`;
//! - the reduced middle phase solves a one-variable phase-matching
//!   equation ([`solve_theta1`]);
//! - the middle transfer then follows in closed form ([`solve_p1`]);
//! - one free parameter remains, `P0`, which [`maximize_eta`] uses to
//!   maximize the detection efficiency.
//!
//! [`solve_analyzer`] chains all of this and returns ready-to-use pulses.

use crate::analyzer::ReadoutPulse;
use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

/// Wraps an angle to `(-pi, pi]`.
pub fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y > PI {
        y - TAU
    } else {
        y
    }
}

/// Distance of a wrapped angle from the nearest multiple of pi, split by
/// parity: `.0` is the distance from 0 (mod 2pi), `.1` from pi (mod 2pi).
fn mod_distances(phi: f64) -> (f64, f64) {
    (phi.abs(), (phi.abs() - PI).abs())
}

const SINGULAR_TOL: f64 = 1e-12;
const IM_TOL: f64 = 1e-9;

fn check_p0(p0: f64) -> Result<()> {
    if !(p0.is_finite() && 0.0 < p0 && p0 < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "first transfer must lie strictly inside (0, 1), got {p0}"
        )));
    }
    Ok(())
}

/// Interference amplitude of the middle bin in the reduced frame:
/// `z = (1 - P0) e^{-i theta} - P0 e^{i (theta - phi_tot)}`.
///
/// A valid middle phase makes `z` real; a useful one makes it positive.
fn interference_amp(p0: f64, theta1: f64, phi_tot: f64) -> C64 {
    C64::from_polar(1.0 - p0, -theta1) - C64::from_polar(p0, theta1 - phi_tot)
}

/// Roots of the phase-matching equation
/// `(1 - P0) sin(theta) + P0 sin(theta - phi_tot) = 0` in `(-pi, pi]`.
///
/// Away from `phi_tot ≡ 0, pi` there are exactly two roots, a pi apart; at
/// most one of them gives a positive interference amplitude. On the
/// degenerate class `phi_tot ≡ pi` with `P0 = 1/2` every angle is a root
/// and the two canonical representatives `{0, pi/2}` are returned.
///
/// ```
/// use pra::solver::solve_theta1;
/// use std::f64::consts::{FRAC_PI_2, PI};
///
/// let roots = solve_theta1(0.5, PI).unwrap();
/// assert_eq!(roots, vec![0.0, FRAC_PI_2]);
/// ```
pub fn solve_theta1(p0: f64, phi_tot: f64) -> Result<Vec<f64>> {
    check_p0(p0)?;
    if !phi_tot.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "total phase must be finite, got {phi_tot}"
        )));
    }
    let phi = wrap_angle(phi_tot);
    let (d0, dpi) = mod_distances(phi);
    if d0 < SINGULAR_TOL {
        // sin(theta) = 0
        return Ok(vec![0.0, PI]);
    }
    if dpi < SINGULAR_TOL {
        // (1 - 2 P0) sin(theta) = 0
        if (p0 - 0.5).abs() < SINGULAR_TOL {
            return Ok(vec![0.0, FRAC_PI_2]);
        }
        return Ok(vec![0.0, PI]);
    }
    let x = (1.0 / p0 - 1.0 + phi.cos()) / phi.sin();
    let root = FRAC_PI_2 - x.atan(); // in (0, pi)
    Ok(vec![root, root - PI])
}

/// Middle transfer for an admissible middle phase:
/// `P1 = Q / (|z|^2 + Q)` with `Q = P0 (1 - P0)`.
///
/// Fails when `theta1` does not satisfy the phase-matching equation or
/// selects the sign-flipped branch (`Re z <= 0`). On the degenerate class
/// (`phi_tot ≡ pi`, `P0 = 1/2`) the canonical solution `P1 = 1/5` is
/// returned for every representative angle.
///
/// ```
/// use pra::solver::solve_p1;
/// use std::f64::consts::{FRAC_PI_2, PI};
///
/// assert!((solve_p1(0.5, 0.0, PI).unwrap() - 0.2).abs() < 1e-12);
/// assert!((solve_p1(0.5, FRAC_PI_2, PI).unwrap() - 0.2).abs() < 1e-12);
/// ```
pub fn solve_p1(p0: f64, theta1: f64, phi_tot: f64) -> Result<f64> {
    check_p0(p0)?;
    if !(theta1.is_finite() && phi_tot.is_finite()) {
        return Err(Error::InvalidArgument(
            "middle phase and total phase must be finite".into(),
        ));
    }
    let phi = wrap_angle(phi_tot);
    let (_, dpi) = mod_distances(phi);
    if dpi < SINGULAR_TOL && (p0 - 0.5).abs() < SINGULAR_TOL {
        return Ok(0.2);
    }
    let z = interference_amp(p0, theta1, phi);
    if z.im.abs() > IM_TOL {
        return Err(Error::InvalidArgument(format!(
            "middle phase violates phase matching: Im(z) = {:.3e}",
            z.im
        )));
    }
    if z.re <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "root selects a negative interference amplitude (Re(z) = {:.3e}); \
             take the branch shifted by pi",
            z.re
        )));
    }
    let q = p0 * (1.0 - p0);
    Ok(q / (z.norm_sqr() + q))
}

/// Detection efficiency for an admissible `(P0, theta1)` pair, or `None`
/// when the root is inadmissible.
fn eta_at(p0: f64, theta1: f64, phi: f64) -> Option<f64> {
    let z = interference_amp(p0, theta1, phi);
    if z.im.abs() > IM_TOL || z.re <= 0.0 {
        return None;
    }
    let q = p0 * (1.0 - p0);
    let zz = z.norm_sqr();
    Some(3.0 * q * zz / (zz + q))
}

/// The efficiency optimum of a target class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaOptimum {
    /// Outer transfer at the optimum (`P2 = P0`).
    pub p0: f64,
    /// Reduced middle phase at the optimum.
    pub theta1: f64,
    /// Detection efficiency at the optimum.
    pub eta: f64,
}

/// Maximizes the detection efficiency of the class `phi_tot` over the free
/// outer transfer.
///
/// With `w = 1 - 2 P0` and `t = tan(phi_tot / 2)` the interference weight
/// at the matched root is `|z|^2 = w^2 (1 + t^2) / (1 + w^2 t^2)`, and
/// `3/eta = 1/Q + 1/|z|^2` turns the maximization into a one-line
/// stationarity condition with the closed-form root
///
/// ```text
/// w^2 = 1 / (1 + 2 s),   s = sqrt(1 + t^2) = 1 / |cos(phi_tot / 2)|
/// ```
///
/// giving `eta = 3 s / (5 s + 4)`. The efficiency is exactly symmetric
/// under `P0 <-> 1 - P0` (with the reflected middle phase); the returned
/// representative is the one with `P0 <= 1/2`. The `phi_tot ≡ pi` class
/// attains the global ceiling `eta = 3/5` at `P0 = 1/2` exactly.
///
/// ```
/// use pra::solver::maximize_eta;
/// use std::f64::consts::PI;
///
/// let opt = maximize_eta(PI).unwrap();
/// assert_eq!((opt.p0, opt.theta1, opt.eta), (0.5, 0.0, 0.6));
/// ```
pub fn maximize_eta(phi_tot: f64) -> Result<EtaOptimum> {
    if !phi_tot.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "total phase must be finite, got {phi_tot}"
        )));
    }
    let phi = wrap_angle(phi_tot);
    let (_, dpi) = mod_distances(phi);
    if dpi < 1e-9 {
        return Ok(EtaOptimum {
            p0: 0.5,
            theta1: 0.0,
            eta: 0.6,
        });
    }
    let half = 0.5 * phi;
    let t = half.tan();
    let s = (1.0 + t * t).sqrt();
    let w = (1.0 + 2.0 * s).sqrt().recip();
    let p0 = 0.5 * (1.0 - w);
    // Stationary root of the phase-matching equation; its pi-shifted twin
    // carries a negative interference amplitude, so at most one candidate
    // survives eta_at.
    let theta_star = wrap_angle(half + (-(w * t)).atan());
    for theta in [theta_star, wrap_angle(theta_star - PI)] {
        if let Some(eta) = eta_at(p0, theta, phi) {
            return Ok(EtaOptimum {
                p0,
                theta1: theta,
                eta,
            });
        }
    }
    Err(Error::Numerical(format!(
        "no admissible stationary root for class {phi}"
    )))
}

/// A complete analyzer synthesis for one target state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyzerSolution {
    /// Readout pulses in time order.
    pub pulses: [ReadoutPulse; 3],
    /// Detection efficiency of the matched target.
    pub efficiency: f64,
    /// Class invariant `phi_0 + phi_2 - 2 phi_1`, wrapped to `(-pi, pi]`.
    pub phi_tot: f64,
    /// Reduced middle phase; the physical one is `theta1_reduced + phi_1`.
    pub theta1_reduced: f64,
}

/// Synthesizes the efficiency-optimal analyzer that projects onto
/// `(1/sqrt 3) (e^{i phi_0}, e^{i phi_1}, e^{i phi_2})`.
///
/// The returned pulses reproduce the target phases exactly:
/// the bright coefficients are `-sqrt(eta/3) e^{-i phi_k}`.
///
/// ```
/// use pra::solver::solve_analyzer;
/// use std::f64::consts::FRAC_PI_2;
///
/// let sol = solve_analyzer(&[0.0, FRAC_PI_2, 0.0]).unwrap();
/// let p: Vec<f64> = sol.pulses.iter().map(|p| p.transfer()).collect();
/// assert_eq!(p, vec![0.5, 0.2, 0.5]);
/// assert!((sol.efficiency - 0.6).abs() < 1e-12);
/// ```
pub fn solve_analyzer(phases: &[f64; 3]) -> Result<AnalyzerSolution> {
    if phases.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "target phases must be finite, got {phases:?}"
        )));
    }
    let phi_tot = wrap_angle(phases[0] + phases[2] - 2.0 * phases[1]);
    let opt = maximize_eta(phi_tot)?;
    let p1 = solve_p1(opt.p0, opt.theta1, phi_tot)?;
    let efficiency = 3.0 * opt.p0 * (1.0 - opt.p0) * (1.0 - p1);
    let pulses = [
        ReadoutPulse::new(opt.p0, wrap_angle(phases[2]))?,
        ReadoutPulse::new(p1, wrap_angle(opt.theta1 + phases[1]))?,
        ReadoutPulse::new(opt.p0, wrap_angle(phases[0]))?,
    ];
    Ok(AnalyzerSolution {
        pulses,
        efficiency,
        phi_tot,
        theta1_reduced: opt.theta1,
    })
}

/// The four measurement bases used throughout the crate: three mutually
/// unbiased bases reachable with real-valued analyses of the canonical
/// basis, and the efficiency-optimal basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisId {
    Mub1,
    Mub2,
    Mub3,
    Optimal,
}

impl BasisId {
    pub const ALL: [BasisId; 4] = [BasisId::Mub1, BasisId::Mub2, BasisId::Mub3, BasisId::Optimal];

    pub fn name(&self) -> &'static str {
        match self {
            BasisId::Mub1 => "mub1",
            BasisId::Mub2 => "mub2",
            BasisId::Mub3 => "mub3",
            BasisId::Optimal => "optimal",
        }
    }
}

impl std::str::FromStr for BasisId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mub1" => Ok(BasisId::Mub1),
            "mub2" => Ok(BasisId::Mub2),
            "mub3" => Ok(BasisId::Mub3),
            "optimal" => Ok(BasisId::Optimal),
            other => Err(Error::InvalidArgument(format!(
                "unknown basis {other:?}; expected mub1, mub2, mub3 or optimal"
            ))),
        }
    }
}

/// Component phases of the three states of a basis; row `r` is the phase
/// triple of state `r`.
pub fn basis_phases(id: BasisId) -> [[f64; 3]; 3] {
    let t = 2.0 * PI / 3.0;
    match id {
        BasisId::Mub1 => [[0.0, 0.0, 0.0], [0.0, -t, t], [0.0, t, -t]],
        BasisId::Mub2 => [[0.0, 0.0, -t], [0.0, -t, 0.0], [-t, 0.0, 0.0]],
        BasisId::Mub3 => [[0.0, 0.0, t], [0.0, t, 0.0], [t, 0.0, 0.0]],
        BasisId::Optimal => [
            [0.0, FRAC_PI_2, 0.0],
            [-t, FRAC_PI_2, t],
            [t, FRAC_PI_2, -t],
        ],
    }
}

/// Normalized amplitude triples of the three states of a basis.
pub fn basis_states(id: BasisId) -> [[C64; 3]; 3] {
    let r = (1.0f64 / 3.0).sqrt();
    basis_phases(id).map(|row| row.map(|phi| C64::from_polar(r, phi)))
}
