//! Reference models shared by the integration tests.
//!
//! Everything in this module is deliberately naive and independent of the
//! library internals: operators are built as dense matrices on a truncated
//! bin space and multiplied out term by term. The truncation is safe as long
//! as no amplitude reaches the last bin, which holds for up to 8 readout
//! pulses acting on inputs in bins 0..3 with `BINS` = 12.

// Each test binary uses its own subset of these helpers.
#![allow(dead_code)]

use num_complex::Complex64 as C64;

pub const BINS: usize = 12;
const DIM: usize = 2 * BINS;

// state index = 2 * bin + spin, spin 0 = shelved, spin 1 = emitting
const S: usize = 0;
const E: usize = 1;

pub type Mat = Vec<Vec<C64>>;

pub fn zeros() -> Mat {
    vec![vec![C64::new(0.0, 0.0); DIM]; DIM]
}

pub fn eye() -> Mat {
    let mut m = zeros();
    for i in 0..DIM {
        m[i][i] = C64::new(1.0, 0.0);
    }
    m
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let mut out = zeros();
    for i in 0..DIM {
        for k in 0..DIM {
            let aik = a[i][k];
            if aik.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..DIM {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

/// Readout pulse as a dense operator: identity on bins, SU(2) block on the
/// internal pair per bin.
pub fn pulse_dense(transfer: f64, phase: f64) -> Mat {
    let a = C64::new((1.0 - transfer).sqrt(), 0.0);
    let b = C64::from_polar(transfer.sqrt(), phase);
    let mut m = zeros();
    for bin in 0..BINS {
        m[2 * bin + S][2 * bin + S] = a;
        m[2 * bin + S][2 * bin + E] = b;
        m[2 * bin + E][2 * bin + S] = -b.conj();
        m[2 * bin + E][2 * bin + E] = a;
    }
    m
}

/// Free evolution between readouts: shelved amplitude moves one bin later,
/// emitting amplitude keeps its bin.
pub fn delay_dense() -> Mat {
    let mut m = zeros();
    for bin in 0..BINS {
        if bin + 1 < BINS {
            m[2 * (bin + 1) + S][2 * bin + S] = C64::new(1.0, 0.0);
        }
        m[2 * bin + E][2 * bin + E] = C64::new(1.0, 0.0);
    }
    m
}

/// Full analyzer: U = A_{n-1} B ... B A_0 applied to whatever comes in.
pub fn compose_dense(pulses: &[(f64, f64)]) -> Mat {
    let mut u = pulse_dense(pulses[0].0, pulses[0].1);
    for &(p, th) in &pulses[1..] {
        u = matmul(&pulse_dense(p, th), &matmul(&delay_dense(), &u));
    }
    u
}

/// Coefficient of the k-th shift power in a block entry, read off the dense
/// matrix as <out_spin, bin0+k | U | in_spin, bin0>. Shift invariance away
/// from the truncation edge makes the choice of bin0 irrelevant; we use 1 so
/// negative shifts would show up as a nonzero residual rather than silently
/// vanishing.
pub fn block_coeff(u: &Mat, out_spin: usize, in_spin: usize, k: usize) -> C64 {
    let bin0 = 1;
    u[2 * (bin0 + k) + out_spin][2 * bin0 + in_spin]
}

pub fn bright_coeff(u: &Mat, k: usize) -> C64 {
    block_coeff(u, E, S, k)
}

/// Detection probability in the interference bin: prepare the input train in
/// bins 0..3 with the internal state shelved, apply the analyzer, project on
/// bin 2 of the emitting port.
pub fn project_dense(input: &[C64; 3], pulses: &[(f64, f64); 3]) -> f64 {
    let u = compose_dense(pulses);
    let mut amp = C64::new(0.0, 0.0);
    for (bin, c) in input.iter().enumerate() {
        amp += u[2 * 2 + E][2 * bin + S] * c;
    }
    amp.norm_sqr()
}

/// Largest deviation of U^dagger U from the identity, restricted to input
/// bins that cannot reach the truncation edge (up to 8 pulses = 7 shifts).
pub fn unitarity_defect(u: &Mat) -> f64 {
    let mut worst: f64 = 0.0;
    let lo = 0;
    let hi = 2 * (BINS - 7);
    for i in lo..hi {
        for j in lo..hi {
            let mut acc = C64::new(0.0, 0.0);
            for r in 0..DIM {
                acc += u[r][i].conj() * u[r][j];
            }
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((acc - want).norm());
        }
    }
    worst
}

pub fn approx(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

pub fn capprox(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() <= tol
}
