//! Effective algebra of a pulsed time-bin analyzer.
//!
//! A stored excitation sits in a *shelved* state and is brought into an
//! *emitting* state by a sequence of partial readout pulses, one per time
//! bin. Between consecutive pulses every shelved component is carried one
//! bin later while emitted light leaves immediately, so the whole sequence
//! acts on the two-level (shelved, emitting) space tensored with the bin
//! ladder. Writing `C` for the one-bin shift, the sequence operator is a
//! 2×2 block matrix whose entries are polynomials in `C` — that compact
//! form is what [`ShiftBlockUnitary`] stores.
//!
//! For a three-pulse sequence the emitting output in the final bin is a
//! fixed linear form in the three input-bin amplitudes; [`BrightAmplitudes`]
//! holds its coefficients and [`project`] evaluates the detection
//! probability.

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use std::ops::Mul;

/// One partial readout pulse: population transfer `P` and optical phase
/// `theta`.
///
/// Acting on the (shelved, emitting) pair the pulse is the unitary
///
/// ```text
/// [ a       b ]        a = sqrt(1 - P)
/// [ -conj(b) a ]       b = exp(i theta) sqrt(P)
/// ```
///
/// ```
/// use pra::analyzer::ReadoutPulse;
///
/// let p = ReadoutPulse::new(0.2, 0.5).unwrap();
/// assert!((p.survival_amp() - 0.8f64.sqrt()).abs() < 1e-15);
/// assert!((p.transfer_amp().norm() - 0.2f64.sqrt()).abs() < 1e-15);
/// assert!(ReadoutPulse::new(1.5, 0.0).is_err());
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadoutPulse {
    transfer: f64,
    phase: f64,
}

impl ReadoutPulse {
    pub fn new(transfer: f64, phase: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&transfer) {
            return Err(Error::InvalidArgument(format!(
                "pulse transfer must lie in [0, 1], got {transfer}"
            )));
        }
        if !phase.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "pulse phase must be finite, got {phase}"
            )));
        }
        Ok(Self { transfer, phase })
    }

    /// Population transferred out of the shelved state.
    pub fn transfer(&self) -> f64 {
        self.transfer
    }

    /// Optical phase imprinted on the transferred amplitude.
    pub fn phase(&self) -> f64 {
        self.phase
    }

    /// Amplitude left in the shelved state, `a = sqrt(1 - P)`.
    pub fn survival_amp(&self) -> f64 {
        (1.0 - self.transfer).sqrt()
    }

    /// Amplitude moved to the emitting state, `b = exp(i theta) sqrt(P)`.
    pub fn transfer_amp(&self) -> C64 {
        C64::from_polar(self.transfer.sqrt(), self.phase)
    }
}

/// Polynomial in the one-bin shift operator; index `k` holds the `C^k`
/// coefficient.
pub type ShiftPoly = Vec<C64>;

fn poly_mul(a: &[C64], b: &[C64]) -> ShiftPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![C64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

fn poly_add(a: &[C64], b: &[C64]) -> ShiftPoly {
    let n = a.len().max(b.len());
    let mut out = vec![C64::new(0.0, 0.0); n];
    for (i, &ai) in a.iter().enumerate() {
        out[i] += ai;
    }
    for (i, &bi) in b.iter().enumerate() {
        out[i] += bi;
    }
    out
}

/// Operator on (shelved, emitting) ⊗ bins, stored as four shift polynomials.
///
/// Block `xy` maps input branch `y` to output branch `x`, with `s` the
/// shelved and `e` the emitting branch.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftBlockUnitary {
    ss: ShiftPoly,
    se: ShiftPoly,
    es: ShiftPoly,
    ee: ShiftPoly,
    pulse_count: Option<usize>,
}

impl ShiftBlockUnitary {
    pub fn identity() -> Self {
        Self {
            ss: vec![C64::new(1.0, 0.0)],
            se: Vec::new(),
            es: Vec::new(),
            ee: vec![C64::new(1.0, 0.0)],
            pulse_count: None,
        }
    }

    /// Assembles an operator from explicit block polynomials. The result is
    /// not checked for unitarity; see [`unitarity_residual`].
    pub fn from_blocks(ss: ShiftPoly, se: ShiftPoly, es: ShiftPoly, ee: ShiftPoly) -> Self {
        Self {
            ss,
            se,
            es,
            ee,
            pulse_count: None,
        }
    }

    pub fn ss(&self) -> &[C64] {
        &self.ss
    }

    pub fn se(&self) -> &[C64] {
        &self.se
    }

    pub fn es(&self) -> &[C64] {
        &self.es
    }

    pub fn ee(&self) -> &[C64] {
        &self.ee
    }

    pub fn coeff_ss(&self, k: usize) -> C64 {
        self.ss.get(k).copied().unwrap_or_default()
    }

    pub fn coeff_se(&self, k: usize) -> C64 {
        self.se.get(k).copied().unwrap_or_default()
    }

    pub fn coeff_es(&self, k: usize) -> C64 {
        self.es.get(k).copied().unwrap_or_default()
    }

    pub fn coeff_ee(&self, k: usize) -> C64 {
        self.ee.get(k).copied().unwrap_or_default()
    }

    /// Number of readout pulses this operator was composed from, when it was
    /// built by [`compose_analyzer`].
    pub fn pulse_count(&self) -> Option<usize> {
        self.pulse_count
    }

    fn coeff_matrix(&self, k: usize) -> [[C64; 2]; 2] {
        [
            [self.coeff_ss(k), self.coeff_se(k)],
            [self.coeff_es(k), self.coeff_ee(k)],
        ]
    }

    fn max_len(&self) -> usize {
        self.ss
            .len()
            .max(self.se.len())
            .max(self.es.len())
            .max(self.ee.len())
    }
}

/// Matrix product; `rhs` acts first.
impl Mul<&ShiftBlockUnitary> for &ShiftBlockUnitary {
    type Output = ShiftBlockUnitary;

    fn mul(self, rhs: &ShiftBlockUnitary) -> ShiftBlockUnitary {
        ShiftBlockUnitary {
            ss: poly_add(&poly_mul(&self.ss, &rhs.ss), &poly_mul(&self.se, &rhs.es)),
            se: poly_add(&poly_mul(&self.ss, &rhs.se), &poly_mul(&self.se, &rhs.ee)),
            es: poly_add(&poly_mul(&self.es, &rhs.ss), &poly_mul(&self.ee, &rhs.es)),
            ee: poly_add(&poly_mul(&self.es, &rhs.se), &poly_mul(&self.ee, &rhs.ee)),
            pulse_count: None,
        }
    }
}

/// Lifts a single pulse to the full bin space (it acts on every bin at once).
pub fn pulse_operator(pulse: &ReadoutPulse) -> ShiftBlockUnitary {
    let a = C64::new(pulse.survival_amp(), 0.0);
    let b = pulse.transfer_amp();
    ShiftBlockUnitary {
        ss: vec![a],
        se: vec![b],
        es: vec![-b.conj()],
        ee: vec![a],
        pulse_count: Some(1),
    }
}

/// Inter-pulse evolution: shelved amplitude moves one bin later, emitted
/// amplitude is already gone and keeps its bin.
pub fn delay_operator() -> ShiftBlockUnitary {
    ShiftBlockUnitary {
        ss: vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        se: Vec::new(),
        es: Vec::new(),
        ee: vec![C64::new(1.0, 0.0)],
        pulse_count: None,
    }
}

/// Composes `pulses[0]`, then a one-bin delay, then `pulses[1]`, and so on
/// (`pulses[0]` is earliest in time). Between one and eight pulses are
/// supported.
///
/// ```
/// use pra::analyzer::{compose_analyzer, ReadoutPulse};
///
/// let pulses = vec![ReadoutPulse::new(0.5, 0.0).unwrap(); 3];
/// let u = compose_analyzer(&pulses).unwrap();
/// assert_eq!(u.pulse_count(), Some(3));
/// assert!(u.es().len() <= 3);
/// ```
pub fn compose_analyzer(pulses: &[ReadoutPulse]) -> Result<ShiftBlockUnitary> {
    if pulses.is_empty() || pulses.len() > 8 {
        return Err(Error::InvalidArgument(format!(
            "analyzer needs 1..=8 pulses, got {}",
            pulses.len()
        )));
    }
    let delay = delay_operator();
    let mut u = pulse_operator(&pulses[0]);
    for pulse in &pulses[1..] {
        u = &pulse_operator(pulse) * &(&delay * &u);
    }
    u.pulse_count = Some(pulses.len());
    Ok(u)
}

/// Largest deviation of `U† U` from the identity, evaluated as a shift-
/// polynomial identity: for every relative shift `d` the 2×2 matrix
/// `Σ_k M_k† M_{k+d}` must equal `δ_{d,0} · I`, where `M_k` is the `C^k`
/// coefficient block of `U`.
pub fn unitarity_residual(u: &ShiftBlockUnitary) -> f64 {
    let len = u.max_len();
    if len == 0 {
        return 1.0;
    }
    let mats: Vec<[[C64; 2]; 2]> = (0..len).map(|k| u.coeff_matrix(k)).collect();
    let mut worst = 0.0f64;
    for d in 0..len {
        let mut acc = [[C64::new(0.0, 0.0); 2]; 2];
        for k in 0..len - d {
            let (m, n) = (&mats[k], &mats[k + d]);
            for r in 0..2 {
                for c in 0..2 {
                    // (M_k† M_{k+d})[r][c] = Σ_j conj(M_k[j][r]) M_{k+d}[j][c]
                    acc[r][c] += m[0][r].conj() * n[0][c] + m[1][r].conj() * n[1][c];
                }
            }
        }
        for r in 0..2 {
            for c in 0..2 {
                let target = if d == 0 && r == c {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                };
                worst = worst.max((acc[r][c] - target).norm());
            }
        }
    }
    worst
}

/// Coefficients of the emitting output in the interference bin of a
/// three-pulse analyzer, ordered by *input* bin.
///
/// `amps()[k]` multiplies input-bin amplitude `k`; input bin `k` needs
/// `2 - k` inter-pulse shifts to reach the final readout, so `amps()[k]`
/// is the `C^(2-k)` coefficient of the emitting block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrightAmplitudes {
    amps: [C64; 3],
}

impl BrightAmplitudes {
    /// Closed form for a three-pulse sequence: with `a_i`, `b_i` the pulse
    /// amplitudes,
    ///
    /// ```text
    /// amps[0] = -a0 a1 conj(b2)
    /// amps[1] = -a0 conj(b1) a2 + conj(b0) b1 conj(b2)
    /// amps[2] = -conj(b0) a1 a2
    /// ```
    pub fn from_pulses(pulses: &[ReadoutPulse; 3]) -> Self {
        let a: Vec<f64> = pulses.iter().map(|p| p.survival_amp()).collect();
        let b: Vec<C64> = pulses.iter().map(|p| p.transfer_amp()).collect();
        Self {
            amps: [
                -a[0] * a[1] * b[2].conj(),
                -a[0] * b[1].conj() * a[2] + b[0].conj() * b[1] * b[2].conj(),
                -b[0].conj() * a[1] * a[2],
            ],
        }
    }

    pub fn amps(&self) -> &[C64; 3] {
        &self.amps
    }

    /// Emitting-bin amplitude for a given input amplitude triple.
    pub fn amplitude(&self, input: &[C64; 3]) -> C64 {
        self.amps
            .iter()
            .zip(input)
            .map(|(z, c)| z * c)
            .sum()
    }

    /// Total detection weight `Σ |amps[k]|²`; for an analyzer with equal
    /// weights this is its efficiency.
    pub fn sum_sq(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Reads the bright-port coefficients off a composed three-pulse operator.
/// Fails when the operator was not built from exactly three pulses.
pub fn bright_amplitudes(u: &ShiftBlockUnitary) -> Result<BrightAmplitudes> {
    if u.pulse_count() != Some(3) {
        return Err(Error::InvalidArgument(format!(
            "bright amplitudes are defined for three-pulse analyzers, got pulse count {:?}",
            u.pulse_count()
        )));
    }
    Ok(BrightAmplitudes {
        amps: [u.coeff_es(2), u.coeff_es(1), u.coeff_es(0)],
    })
}

/// A pure state spread over consecutive time bins of width `tau_s`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeBinState {
    amps: Vec<C64>,
    tau_s: f64,
}

impl TimeBinState {
    pub fn new(amps: Vec<C64>, tau_s: f64) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::InvalidArgument("state needs at least one bin".into()));
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("state amplitudes must be finite".into()));
        }
        if !(tau_s.is_finite() && tau_s > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "bin width must be positive, got {tau_s}"
            )));
        }
        Ok(Self { amps, tau_s })
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn tau_s(&self) -> f64 {
        self.tau_s
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Detection probability of a normalized three-bin state on a three-pulse
/// analyzer: `|Σ_k amps[k] state[k]|²`.
///
/// ```
/// use num_complex::Complex64 as C64;
/// use pra::analyzer::{project, ReadoutPulse, TimeBinState};
///
/// let r = (1.0f64 / 3.0).sqrt();
/// let state = TimeBinState::new(vec![C64::new(r, 0.0); 3], 1.0).unwrap();
/// let p0 = (3.0 - 3.0f64.sqrt()) / 6.0;
/// let pulses = [
///     ReadoutPulse::new(p0, 0.0).unwrap(),
///     ReadoutPulse::new(1.0 / 3.0, 0.0).unwrap(),
///     ReadoutPulse::new(p0, 0.0).unwrap(),
/// ];
/// let p = project(&state, &pulses).unwrap();
/// assert!((p - 1.0 / 3.0).abs() < 1e-12);
/// ```
pub fn project(state: &TimeBinState, pulses: &[ReadoutPulse; 3]) -> Result<f64> {
    if state.amps().len() != 3 {
        return Err(Error::InvalidArgument(format!(
            "projection needs a three-bin state, got {} bins",
            state.amps().len()
        )));
    }
    let norm = state.norm_sqr();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidArgument(format!(
            "state must be normalized (|norm² - 1| ≤ 1e-6), got norm² = {norm}"
        )));
    }
    let z = BrightAmplitudes::from_pulses(pulses);
    let input = [state.amps()[0], state.amps()[1], state.amps()[2]];
    Ok(z.amplitude(&input).norm_sqr())
}
