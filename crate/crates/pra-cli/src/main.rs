//! `pra` — command-line front end for the time-bin readout toolkit.
//!
//! Subcommands:
//!
//! - `solve` — pulse parameters projecting onto a phase triple.
//! - `table1` — the solved-parameter table for all standard bases, as CSV.
//! - `bounds` — certified efficiency ceilings by readout support length.
//! - `simulate` — storage / analyzer / basis runs from a JSON config.
//! - `visibility` — interference scan in a two-state plane.
//! - `report` — the full effective-model artifact suite.
//!
//! Exit codes: `0` success, `1` invalid input or configuration, `2`
//! numerical failure. Angles are decimal radians or fractions of pi
//! (`2pi/3`, `-pi/2`, `0.5pi`).

use clap::{Parser, Subcommand};
use num_complex::Complex64 as C64;
use pra::analysis::{
    config_digest, describe_emission, emit_report, table1_csv, table1_rows, visibility_scan,
    visibility_scan_simulated, ReportBundle, ScanPlane, VisibilityCurve,
};
use pra::analyzer::{project, TimeBinState};
use pra::bounds::{certification_csv, max_eta_generic};
use pra::sim::{
    calibrate_transfer, run_pra, run_storage, simulate_named_basis, RunSummary, SimConfig,
    CALIBRATION_POINTS,
};
use pra::solver::{solve_analyzer, BasisId};
use pra::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "pra",
    about = "Partial-readout analysis of time-bin qutrits in an echo-based optical memory",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the readout pulse parameters that project onto a phase triple.
    Solve {
        /// Target phases, three comma-separated angles (radians or pi
        /// fractions), e.g. `0,2pi/3,-2pi/3`.
        #[arg(long, allow_hyphen_values = true)]
        phases: String,
    },
    /// Print the solved parameters of all twelve standard analyzers as CSV.
    Table1 {
        /// Also write `table1.csv` into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the certified efficiency ceilings by readout support length.
    Bounds {
        /// Also write `bounds.csv` into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the storage simulation from a JSON configuration.
    ///
    /// Without further flags: store and recall the configured input train.
    /// With `--phases`: read out through the solved three-pulse analyzer.
    /// With `--basis`: characterize all nine analyzer/state projections.
    Simulate {
        /// JSON configuration file.
        #[arg(long)]
        config: PathBuf,
        /// Analyzer target phases (three angles, as in `solve`).
        #[arg(long, allow_hyphen_values = true)]
        phases: Option<String>,
        /// Characterize a named basis instead of a single analyzer.
        #[arg(long, value_parser = parse_basis)]
        basis: Option<BasisId>,
        /// Write summary JSON (and trace CSV where applicable) here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (default: all cores; `PRA_THREADS` also works).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Scan interference visibility of a basis in a two-state plane.
    Visibility {
        /// Basis to scan: mub1, mub2, mub3 or optimal.
        #[arg(long, value_parser = parse_basis)]
        basis: BasisId,
        /// Scan plane: 01 (first/second state) or 02 (first/third).
        #[arg(long, value_parser = parse_plane)]
        plane: ScanPlane,
        /// Number of scan angles, uniform over [0, pi).
        #[arg(long, default_value_t = 64)]
        points: usize,
        /// `effective` (instantaneous) or `simulation` (3·points + 1 full
        /// propagations — minutes at reference grids).
        #[arg(long, default_value = "effective")]
        backend: String,
        /// JSON configuration file (required for `--backend simulation`).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write scan CSV, fit CSV and SVG into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (default: all cores; `PRA_THREADS` also works).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Generate the effective-model artifact suite: solved-parameter
    /// table, overlap matrices, visibility curves, and SVG renderings.
    Report {
        /// Output directory (default `pra-report`).
        #[arg(long, default_value = "pra-report")]
        out: PathBuf,
        /// Seed for the randomized solver self-check sweep.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_basis(s: &str) -> Result<BasisId> {
    s.parse()
}

fn parse_plane(s: &str) -> Result<ScanPlane> {
    s.parse()
}

/// Parses one angle: decimal radians (`1.5`, `-0.3e-2`) or a pi fraction
/// (`pi`, `-pi/2`, `2pi/3`, `0.5pi`).
fn parse_angle(text: &str) -> Result<f64> {
    let t = text.trim().to_ascii_lowercase();
    let invalid = || {
        Error::InvalidArgument(format!(
            "angle {text:?} is neither decimal radians nor a pi fraction like 2pi/3"
        ))
    };
    if t.is_empty() {
        return Err(invalid());
    }
    let Some(pos) = t.find("pi") else {
        return t.parse::<f64>().map_err(|_| invalid());
    };
    let coefficient = match &t[..pos] {
        "" | "+" => 1.0,
        "-" => -1.0,
        s => s.parse::<f64>().map_err(|_| invalid())?,
    };
    let denominator = match &t[pos + 2..] {
        "" => 1.0,
        s => {
            let d = s
                .strip_prefix('/')
                .ok_or_else(invalid)?
                .parse::<f64>()
                .map_err(|_| invalid())?;
            if d == 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "angle {text:?} divides by zero"
                )));
            }
            d
        }
    };
    let angle = coefficient * PI / denominator;
    if !angle.is_finite() {
        return Err(invalid());
    }
    Ok(angle)
}

fn parse_phases(text: &str) -> Result<[f64; 3]> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(Error::InvalidArgument(format!(
            "--phases needs three comma-separated angles, got {} in {text:?}",
            parts.len()
        )));
    }
    Ok([
        parse_angle(parts[0])?,
        parse_angle(parts[1])?,
        parse_angle(parts[2])?,
    ])
}

/// Loads and validates a configuration file. A missing `grids` section is
/// filled with the reference defaults (with a warning); unknown keys and
/// constraint violations are itemized diagnostics.
fn load_config(path: &Path) -> Result<SimConfig> {
    let text = fs::read_to_string(path)?;
    let mut value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::Config(vec![format!("{}: malformed JSON: {e}", path.display())]))?;
    if let Some(object) = value.as_object_mut() {
        if !object.contains_key("grids") {
            let defaults = SimConfig::default().grids;
            object.insert(
                "grids".into(),
                serde_json::to_value(defaults).expect("grid defaults serialize"),
            );
            eprintln!(
                "warning: no \"grids\" section in {}; using defaults \
                 (dt_s = {:e}, nz = {}, ndelta = {})",
                path.display(),
                defaults.dt_s,
                defaults.nz,
                defaults.ndelta
            );
        }
    }
    let cfg: SimConfig = serde_json::from_value(value)
        .map_err(|e| Error::Config(vec![format!("{}: {e}", path.display())]))?;
    cfg.validate()?;
    Ok(cfg)
}

/// Applies `--threads`, falling back to the `PRA_THREADS` environment
/// variable. Without either, rayon keeps its default (all cores).
fn configure_threads(flag: Option<usize>) -> Result<()> {
    let count = match flag {
        Some(n) => Some(n),
        None => match std::env::var("PRA_THREADS") {
            Ok(raw) => Some(raw.trim().parse::<usize>().map_err(|_| {
                Error::InvalidArgument(format!(
                    "PRA_THREADS must be a positive integer, got {raw:?}"
                ))
            })?),
            Err(_) => None,
        },
    };
    if let Some(n) = count {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "thread count must be positive".into(),
            ));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn write_artifact(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}

fn cmd_solve(phases_text: &str) -> Result<()> {
    let phases = parse_phases(phases_text)?;
    let solution = solve_analyzer(&phases)?;
    let p: Vec<f64> = solution.pulses.iter().map(|p| p.transfer()).collect();
    let theta: Vec<f64> = solution.pulses.iter().map(|p| p.phase()).collect();
    println!(
        "phases (rad): ({:.6}, {:.6}, {:.6})",
        phases[0], phases[1], phases[2]
    );
    println!("P     = ({:.4}, {:.4}, {:.4})", p[0], p[1], p[2]);
    println!(
        "theta = ({:.4}, {:.4}, {:.4})",
        theta[0], theta[1], theta[2]
    );
    println!("eta   = {:.4}", solution.efficiency);
    Ok(())
}

fn cmd_table1(out: Option<&Path>) -> Result<()> {
    let csv = table1_csv(&table1_rows()?);
    print!("{csv}");
    if let Some(dir) = out {
        let path = write_artifact(dir, "table1.csv", &csv)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_bounds(out: Option<&Path>) -> Result<()> {
    let csv = certification_csv()?;
    print!("{csv}");
    eprintln!(
        "generic ceiling (unbounded support): {:.6}",
        max_eta_generic()
    );
    if let Some(dir) = out {
        let path = write_artifact(dir, "bounds.csv", &csv)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

/// The configured input train replaced by a single populated first bin —
/// the reference every analyzer projection is normalized by.
fn reference_config(cfg: &SimConfig) -> SimConfig {
    let bins = cfg.input.amps_re.len();
    let mut reference = cfg.clone();
    reference.input.amps_re = vec![0.0; bins];
    reference.input.amps_re[0] = 1.0;
    reference.input.amps_im = vec![0.0; bins];
    reference
}

fn cmd_simulate(
    config: &Path,
    phases: Option<&str>,
    basis: Option<BasisId>,
    out: Option<&Path>,
    threads: Option<usize>,
) -> Result<()> {
    configure_threads(threads)?;
    let cfg = load_config(config)?;
    let (summary, trace_csv, basis_json) = match (phases, basis) {
        (Some(_), Some(_)) => {
            return Err(Error::InvalidArgument(
                "--phases and --basis are mutually exclusive".into(),
            ));
        }
        (None, None) => {
            let report = run_storage(&cfg)?;
            let ratios = report
                .slot_energies
                .iter()
                .map(|e| e / report.result.input_energy)
                .collect();
            let summary = RunSummary {
                eta0: report.efficiency,
                bin_energies: ratios,
                eta: None,
                fidelity: None,
            };
            (summary, Some(report.result.trace.to_csv()), None)
        }
        (Some(text), None) => {
            let solution = solve_analyzer(&parse_phases(text)?)?;
            let calib = calibrate_transfer(&cfg.read_pulse()?, CALIBRATION_POINTS)?;
            let eta0 = run_storage(&reference_config(&cfg))?.efficiency;
            let run = run_pra(&cfg, &solution, &calib, eta0)?;
            let summary = RunSummary {
                eta0,
                bin_energies: run.slot_ratios.clone(),
                eta: Some(run.projection),
                fidelity: None,
            };
            (summary, Some(run.result.trace.to_csv()), None)
        }
        (None, Some(id)) => {
            let report = simulate_named_basis(&cfg, id)?;
            let summary = RunSummary {
                eta0: report.eta0,
                bin_energies: Vec::new(),
                eta: Some(report.efficiency),
                fidelity: Some(report.fidelity),
            };
            let json =
                serde_json::to_string_pretty(&report).expect("basis report serializes");
            (summary, None, Some(json))
        }
    };
    println!("{}", summary.to_json());
    if let Some(dir) = out {
        let mut written = vec![write_artifact(dir, "summary.json", &summary.to_json())?];
        if let Some(csv) = &trace_csv {
            written.push(write_artifact(dir, "trace.csv", csv)?);
        }
        if let Some(json) = &basis_json {
            written.push(write_artifact(dir, "basis.json", json)?);
        }
        for path in written {
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn fits_csv(curves: &[VisibilityCurve; 3]) -> String {
    let mut out = String::from("projector,amplitude,phase_offset_rad,mean,rms_residual\n");
    for c in curves {
        let offset = c
            .fit
            .phase_offset
            .map_or_else(|| "".into(), |x| format!("{x:.6}"));
        out.push_str(&format!(
            "{},{:.6},{offset},{:.6},{:.6}\n",
            c.projector, c.fit.amplitude, c.fit.mean, c.fit.residual
        ));
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn cmd_visibility(
    basis: BasisId,
    plane: ScanPlane,
    points: usize,
    backend: &str,
    config: Option<&Path>,
    out: Option<&Path>,
    threads: Option<usize>,
) -> Result<()> {
    configure_threads(threads)?;
    let phis = pra::analysis::scan_grid(points);
    let curves = match backend {
        "effective" => visibility_scan(basis, plane, &phis)?,
        "simulation" => {
            let path = config.ok_or_else(|| {
                Error::InvalidArgument(
                    "--backend simulation needs --config (propagation grids)".into(),
                )
            })?;
            let cfg = load_config(path)?;
            visibility_scan_simulated(&cfg, basis, plane, &phis)?
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown backend {other:?}; use effective or simulation"
            )));
        }
    };
    print!("{}", fits_csv(&curves));
    if let Some(dir) = out {
        let manifest = format!(
            "visibility basis={} plane={} points={points} backend={backend}",
            basis.name(),
            plane.name()
        );
        let mut bundle = ReportBundle::new(&manifest);
        bundle.push_curves(&format!("{}-{}", basis.name(), plane.name()), curves);
        let paths = emit_report(&bundle, dir)?;
        eprint!("{}", describe_emission(&paths));
    }
    Ok(())
}

/// Randomized round-trip check: solve a random target, project the target
/// state through the solved pulses, and compare against the reported
/// efficiency. Returns the worst deviation.
fn solver_sweep(seed: u64, trials: usize) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let phases = [
            rng.gen_range(-PI..PI),
            rng.gen_range(-PI..PI),
            rng.gen_range(-PI..PI),
        ];
        let solution = solve_analyzer(&phases)?;
        let amps: Vec<C64> = phases
            .iter()
            .map(|&phi| C64::from_polar((1.0f64 / 3.0).sqrt(), phi))
            .collect();
        let state = TimeBinState::new(amps, 1.0)?;
        let projection = project(&state, &solution.pulses)?;
        worst = worst.max((projection - solution.efficiency).abs());
    }
    if worst > 1e-10 {
        return Err(Error::Numerical(format!(
            "solver sweep residual {worst:.3e} exceeds 1e-10 (seed {seed})"
        )));
    }
    Ok(worst)
}

fn cmd_report(out: &Path, seed: u64) -> Result<()> {
    const SWEEP_TRIALS: usize = 200;
    let worst = solver_sweep(seed, SWEEP_TRIALS)?;
    println!(
        "solver sweep: {SWEEP_TRIALS} random targets, max |projection - eta| = {worst:.3e} (seed {seed})"
    );

    let manifest = format!("report seed={seed}");
    let mut bundle = ReportBundle::new(&manifest).with_standard_table()?;
    for id in BasisId::ALL {
        bundle.push_matrix(
            id.name(),
            pra::analysis::OverlapMatrix::effective_for_basis(id)?,
        );
    }
    let phis = pra::analysis::scan_grid(64);
    for id in BasisId::ALL {
        for plane in [ScanPlane::ZeroOne, ScanPlane::ZeroTwo] {
            let curves = visibility_scan(id, plane, &phis)?;
            bundle.push_curves(&format!("{}-{}", id.name(), plane.name()), curves);
        }
    }
    let paths = emit_report(&bundle, out)?;
    if paths.is_empty() {
        eprintln!("warning: nothing to report");
    } else {
        print!("{}", describe_emission(&paths));
    }
    println!("manifest digest: {:016x}", config_digest(&manifest));
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve { phases } => cmd_solve(&phases),
        Command::Table1 { out } => cmd_table1(out.as_deref()),
        Command::Bounds { out } => cmd_bounds(out.as_deref()),
        Command::Simulate {
            config,
            phases,
            basis,
            out,
            threads,
        } => cmd_simulate(&config, phases.as_deref(), basis, out.as_deref(), threads),
        Command::Visibility {
            basis,
            plane,
            points,
            backend,
            config,
            out,
            threads,
        } => cmd_visibility(
            basis,
            plane,
            points,
            &backend,
            config.as_deref(),
            out.as_deref(),
            threads,
        ),
        Command::Report { out, seed } => cmd_report(&out, seed),
    }
}

fn main() -> ExitCode {
    // Die quietly when a downstream pager closes the pipe instead of
    // panicking on the next print.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successful output; everything
            // else is invalid input and exits 1 per the interface contract
            // (clap's default of 2 is reserved for numerical failures).
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

// The solver examples in this file's own documentation are exercised by
// the integration tests in `tests/cli.rs`.
#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angle_literals_parse_exactly() {
        assert_eq!(parse_angle("0").unwrap(), 0.0);
        assert_eq!(parse_angle("1.5").unwrap(), 1.5);
        assert_eq!(parse_angle("-2.5e-3").unwrap(), -2.5e-3);
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("-pi").unwrap(), -PI);
        assert_eq!(parse_angle("+pi").unwrap(), PI);
        assert_eq!(parse_angle("pi/2").unwrap(), PI / 2.0);
        assert_eq!(parse_angle("2pi/3").unwrap(), 2.0 * PI / 3.0);
        assert_eq!(parse_angle("-2pi/3").unwrap(), -2.0 * PI / 3.0);
        assert_eq!(parse_angle("0.5pi").unwrap(), 0.5 * PI);
        assert_eq!(parse_angle(" 2PI/3 ").unwrap(), 2.0 * PI / 3.0);
    }

    #[test]
    fn malformed_angles_are_rejected() {
        for bad in ["", "abc", "pi/0", "2pi3", "pi/", "1..2", "2pi/x", "--phases"] {
            assert!(parse_angle(bad).is_err(), "{bad:?} should not parse");
        }
    }

    #[test]
    fn phase_triples_enforce_arity() {
        assert!(parse_phases("0,0").is_err());
        assert!(parse_phases("0,0,0,0").is_err());
        let p = parse_phases("0,2pi/3,-2pi/3").unwrap();
        assert_eq!(p, [0.0, 2.0 * PI / 3.0, -2.0 * PI / 3.0]);
    }
}
