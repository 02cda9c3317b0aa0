//! Full-resolution basis characterizations: the simulated 3×3 projection
//! matrices, their mean diagonal efficiencies and fidelities, and the
//! single-bin splitting invariant of every standard analyzer.
//!
//! Expectations carry two layers: a physics window (the published
//! efficiency ±2 percentage points, fidelity floors) and a frozen
//! regression value measured on this grid and cross-checked against an
//! independent integrator to a few 1e-4. Each basis runs one storage
//! reference plus nine projections at the reference grids, roughly nine
//! minutes apiece on one core.

use pra::sim::{run_pra, run_storage, simulate_named_basis, SimConfig};
use pra::solver::{basis_phases, solve_analyzer, BasisId};

struct Expected {
    basis: BasisId,
    /// Published basis efficiency.
    published_eta: f64,
    /// Fidelity floor for this basis.
    min_fidelity: f64,
    /// Frozen diagonal measured on the reference grid.
    diagonal: [f64; 3],
    /// Frozen mean efficiency and fidelity on the reference grid.
    frozen_eta: f64,
    frozen_fidelity: f64,
}

/// Cross-engine agreement on the reference grid is a few 1e-4; frozen
/// windows use 3e-3 to absorb round-off differences without ever letting
/// a physics regression through.
const FROZEN_TOL: f64 = 3e-3;

fn characterize(exp: &Expected) {
    let report = simulate_named_basis(&SimConfig::default(), exp.basis).expect("basis run");
    println!(
        "{}: eta0 = {:.4}, diag = [{:.4}, {:.4}, {:.4}], eta = {:.4}, F = {:.4}",
        exp.basis.name(),
        report.eta0,
        report.projections[0][0],
        report.projections[1][1],
        report.projections[2][2],
        report.efficiency,
        report.fidelity
    );

    assert!(
        (report.eta0 - 0.3072).abs() < 1e-3,
        "reference efficiency {} drifted",
        report.eta0
    );
    assert!(
        (report.efficiency - exp.published_eta).abs() < 0.02,
        "{}: efficiency {:.4} outside the published {:.3} ± 0.02",
        exp.basis.name(),
        report.efficiency,
        exp.published_eta
    );
    assert!(
        report.fidelity >= exp.min_fidelity,
        "{}: fidelity {:.4} below {:.3}",
        exp.basis.name(),
        report.fidelity,
        exp.min_fidelity
    );

    for i in 0..3 {
        assert!(
            (report.projections[i][i] - exp.diagonal[i]).abs() < FROZEN_TOL,
            "{}: diagonal {} = {:.4} moved from frozen {:.4}",
            exp.basis.name(),
            i,
            report.projections[i][i],
            exp.diagonal[i]
        );
        for j in 0..3 {
            if i != j {
                // A state orthogonal to the analyzer target answers at the
                // few-per-mil level; 0.02 is the contrast floor implied by
                // the published fidelities.
                assert!(
                    report.projections[i][j] < 0.02,
                    "{}: cross projection [{}][{}] = {:.4}",
                    exp.basis.name(),
                    i,
                    j,
                    report.projections[i][j]
                );
                assert!(report.projections[i][j] < 0.01, "frozen cross floor");
            }
        }
    }
    assert!((report.efficiency - exp.frozen_eta).abs() < FROZEN_TOL);
    assert!((report.fidelity - exp.frozen_fidelity).abs() < FROZEN_TOL);
}

#[test]
fn first_unbiased_basis_matches_its_published_row() {
    characterize(&Expected {
        basis: BasisId::Mub1,
        published_eta: 0.337,
        min_fidelity: 0.985,
        diagonal: [0.3277, 0.3336, 0.3338],
        frozen_eta: 0.3317,
        frozen_fidelity: 0.9908,
    });
}

#[test]
fn second_unbiased_basis_matches_its_published_row() {
    characterize(&Expected {
        basis: BasisId::Mub2,
        published_eta: 0.425,
        min_fidelity: 0.975,
        diagonal: [0.4456, 0.4285, 0.4456],
        frozen_eta: 0.4399,
        frozen_fidelity: 0.9898,
    });
}

#[test]
fn third_unbiased_basis_matches_its_published_row() {
    characterize(&Expected {
        basis: BasisId::Mub3,
        published_eta: 0.429,
        min_fidelity: 0.97,
        diagonal: [0.4192, 0.3981, 0.4189],
        frozen_eta: 0.4120,
        frozen_fidelity: 0.9872,
    });
}

#[test]
fn optimal_basis_matches_its_published_row() {
    characterize(&Expected {
        basis: BasisId::Optimal,
        published_eta: 0.619,
        min_fidelity: 0.97,
        diagonal: [0.6041, 0.6130, 0.6130],
        frozen_eta: 0.6100,
        frozen_fidelity: 0.9854,
    });
}

/// Every solved analyzer emits a single stored bin into three output
/// slots with equal weights (|ζ_k|² = η/3 for all of them, because the
/// targets are equal-modulus superpositions). The simulation must
/// reproduce that splitting for all twelve standard settings — a shape
/// check on the interferometer arms that is independent of the overall
/// recall efficiency.
///
/// The tolerance is frozen from measurement. The middle slot is fed by
/// two interfering readout paths and carries the full band-averaging
/// deviation of the finite-bandwidth pulses; on the reference grid an
/// independent integrator measures relative deviations of (outer, middle)
/// = (2.0%, 3.4%) for the canonical-basis analyzer, (5.7%, 9.9%) for the
/// second unbiased basis, and (6.6%, 13.3%) for the first optimal-basis
/// row — the worst case, where the phase pattern (0, pi/2, 0) lets the
/// band-phase tilt of the two middle paths add instead of cancel. This
/// engine reproduces that worst case to four decimals (fractions 0.3114,
/// 0.3775, 0.3111 in both). The bound is 16%: just above the genuine
/// dispersion, far below the swing any phase or calibration error
/// produces.
#[test]
fn single_bin_splitting_is_even_for_all_standard_analyzers() {
    let cfg = SimConfig::default();
    let calib = pra::sim::calibrate_transfer(
        &cfg.read_pulse().unwrap(),
        pra::sim::CALIBRATION_POINTS,
    )
    .unwrap();
    let eta0 = run_storage(&cfg).expect("reference run").efficiency;

    for basis in [BasisId::Mub1, BasisId::Mub2, BasisId::Mub3, BasisId::Optimal] {
        for (row, phases) in basis_phases(basis).iter().enumerate() {
            let solution = solve_analyzer(phases).unwrap();
            let run = run_pra(&cfg, &solution, &calib, eta0).expect("single-bin run");
            let total: f64 = run.slot_ratios[..3].iter().sum();
            let fractions: Vec<f64> =
                run.slot_ratios[..3].iter().map(|r| r / total).collect();
            println!(
                "{} row {}: slot fractions [{:.4}, {:.4}, {:.4}]",
                basis.name(),
                row,
                fractions[0],
                fractions[1],
                fractions[2]
            );
            for (slot, f) in fractions.iter().enumerate() {
                let rel = (f - 1.0 / 3.0).abs() * 3.0;
                assert!(
                    rel < 0.16,
                    "{} row {} slot {}: fraction {:.4} is {:.1}% from even",
                    basis.name(),
                    row,
                    slot,
                    f,
                    rel * 100.0
                );
            }
        }
    }
}
