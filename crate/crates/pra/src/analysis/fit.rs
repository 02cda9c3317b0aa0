//! Least-squares sinusoid fitting for visibility curves.
//!
//! An analyzer overlap scanned against a rotation angle φ varies as the
//! squared cosine of the angle to the analyzer's own orientation, so the
//! fitted model is fixed to period π:
//!
//! ```text
//! y(φ) = A · cos(2(φ − φ_off)) + B,   A ≥ 0.
//! ```
//!
//! The fit is linear: regress on `(cos 2φ, sin 2φ, 1)` and convert the
//! rectangular pair back to amplitude and offset. No initial guess is
//! involved, so the result is deterministic and exact on noiseless data.

use crate::error::{Error, Result};

/// Fitted sinusoid `A · cos(2(φ − φ_off)) + B` with its RMS residual.
#[derive(Debug, Clone, PartialEq)]
pub struct SinusoidFit {
    /// Modulation amplitude `A ≥ 0`.
    pub amplitude: f64,
    /// Angular offset `φ_off`, reduced to `(−π/2, π/2]`. `None` when the
    /// samples carry no modulation (`A` at the numerical floor), where the
    /// offset is undefined.
    pub phase_offset: Option<f64>,
    /// Mean level `B`.
    pub mean: f64,
    /// Root-mean-square misfit of the samples.
    pub residual: f64,
}

impl SinusoidFit {
    /// The fitted model evaluated at `phi`.
    pub fn evaluate(&self, phi: f64) -> f64 {
        let off = self.phase_offset.unwrap_or(0.0);
        self.amplitude * (2.0 * (phi - off)).cos() + self.mean
    }
}

/// Amplitudes below this count as "no modulation": the offset of a flat
/// curve is undefined and reported as such.
const FLAT_AMPLITUDE: f64 = 1e-9;

/// Fits `A · cos(2(φ − φ_off)) + B` to the samples by linear least
/// squares.
///
/// Needs at least 4 samples spanning at least half a period (π/2) so the
/// three regressors are resolved; a narrower or degenerate grid is
/// rejected.
pub fn fit_sinusoid(phis: &[f64], values: &[f64]) -> Result<SinusoidFit> {
    if phis.len() != values.len() {
        return Err(Error::InvalidArgument(format!(
            "angle and value grids must match, got {} and {}",
            phis.len(),
            values.len()
        )));
    }
    if phis.len() < 4 {
        return Err(Error::InvalidArgument(format!(
            "sinusoid fit needs at least 4 samples, got {}",
            phis.len()
        )));
    }
    if phis.iter().chain(values).any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument(
            "sinusoid fit needs finite samples".into(),
        ));
    }
    let span = phis.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - phis.iter().cloned().fold(f64::INFINITY, f64::min);
    if span < std::f64::consts::FRAC_PI_2 {
        return Err(Error::InvalidArgument(format!(
            "sinusoid fit needs samples spanning at least half a period \
             (pi/2), got a span of {span:.4}"
        )));
    }

    // Normal equations for y ~ a cos2φ + b sin2φ + B.
    let mut m = [[0.0_f64; 3]; 3];
    let mut rhs = [0.0_f64; 3];
    for (&phi, &y) in phis.iter().zip(values) {
        let row = [(2.0 * phi).cos(), (2.0 * phi).sin(), 1.0];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += row[i] * row[j];
            }
            rhs[i] += row[i] * y;
        }
    }
    let [a, b, mean] = solve3(&m, &rhs).ok_or_else(|| {
        Error::Degenerate(
            "sinusoid fit is underdetermined: the sample angles do not \
             separate cos 2phi, sin 2phi, and a constant"
                .into(),
        )
    })?;

    let amplitude = a.hypot(b);
    let phase_offset = if amplitude <= FLAT_AMPLITUDE {
        None
    } else {
        // atan2 yields 2φ_off in (−π, π], so φ_off lands in (−π/2, π/2].
        Some(0.5 * b.atan2(a))
    };
    let residual = (phis
        .iter()
        .zip(values)
        .map(|(&phi, &y)| {
            let fit = a * (2.0 * phi).cos() + b * (2.0 * phi).sin() + mean;
            (y - fit) * (y - fit)
        })
        .sum::<f64>()
        / phis.len() as f64)
        .sqrt();

    Ok(SinusoidFit {
        amplitude: if phase_offset.is_none() { 0.0 } else { amplitude },
        phase_offset,
        mean,
        residual,
    })
}

/// Solves a symmetric 3×3 system by Cramer's rule; `None` when singular.
fn solve3(m: &[[f64; 3]; 3], rhs: &[f64; 3]) -> Option<[f64; 3]> {
    let det = |c0: &[f64; 3], c1: &[f64; 3], c2: &[f64; 3]| {
        c0[0] * (c1[1] * c2[2] - c1[2] * c2[1]) - c1[0] * (c0[1] * c2[2] - c0[2] * c2[1])
            + c2[0] * (c0[1] * c1[2] - c0[2] * c1[1])
    };
    let cols = [
        [m[0][0], m[1][0], m[2][0]],
        [m[0][1], m[1][1], m[2][1]],
        [m[0][2], m[1][2], m[2][2]],
    ];
    let d = det(&cols[0], &cols[1], &cols[2]);
    // The Gram matrix of n ≥ 4 well-spread sample rows has determinant of
    // order n³; anything near round-off means collinear regressors.
    if d.abs() < 1e-9 {
        return None;
    }
    Some([
        det(rhs, &cols[1], &cols[2]) / d,
        det(&cols[0], rhs, &cols[2]) / d,
        det(&cols[0], &cols[1], rhs) / d,
    ])
}
