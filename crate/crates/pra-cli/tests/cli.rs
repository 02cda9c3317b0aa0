//! End-to-end tests of the `pra` binary: flag handling, exit codes,
//! printed tables, artifact reproducibility.

use num_complex::Complex64 as C64;
use pra::analyzer::{project, ReadoutPulse, TimeBinState};
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

/// A storage sequence shrunk until a full propagation takes milliseconds:
/// a 4-tooth comb over 0.4 MHz and grids that barely satisfy the
/// resolution floors. Physically coarse, numerically valid.
const TINY_CONFIG: &str = r#"{
  "comb":  { "d": 4.0, "bw_hz": 4e5, "delta_hz": 1e5 },
  "input": { "amps_re": [1.0], "amps_im": [0.0], "tau_s": 1.2e-6 },
  "write": { "chirp_range_hz": 4e5, "ramp_s": 8e-7, "plateau_s": 1.6e-6,
             "window_s": 3.2e-6, "rabi_hz": 2e5 },
  "read":  { "chirp_range_hz": 4e5, "ramp_s": 8e-7, "plateau_s": 1.6e-6,
             "window_s": 3.2e-6, "rabi_hz": 2e5 },
  "grids": { "dt_s": 5e-8, "nz": 2, "ndelta": 10 }
}"#;

fn pra(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pra"))
        .args(args)
        .env_remove("PRA_THREADS")
        .output()
        .expect("binary spawns")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is UTF-8")
}

#[test]
fn solve_prints_the_published_first_row() {
    let out = pra(&["solve", "--phases", "0,0,0"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("P     = (0.2113, 0.3333, 0.2113)"), "{text}");
    assert!(text.contains("theta = (0.0000, 0.0000, 0.0000)"), "{text}");
    assert!(text.contains("eta   = 0.3333"), "{text}");
}

#[test]
fn solve_accepts_pi_fraction_literals() {
    let out = pra(&["solve", "--phases", "-2pi/3,pi/2,2pi/3"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("P     = (0.5000, 0.2000, 0.5000)"), "{text}");
    assert!(text.contains("eta   = 0.6000"), "{text}");
}

#[test]
fn wrong_phase_arity_exits_one_with_usage() {
    let out = pra(&["solve", "--phases", "0,0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr(&out).contains("three comma-separated angles"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn missing_required_flag_exits_one() {
    let out = pra(&["solve"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("--phases"), "{}", stderr(&out));
}

#[test]
fn unknown_basis_is_rejected() {
    let out = pra(&["simulate", "--config", "/dev/null", "--basis", "mub4"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("unknown basis"), "{}", stderr(&out));
}

#[test]
fn help_exits_zero() {
    let out = pra(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for subcommand in ["solve", "table1", "bounds", "simulate", "visibility", "report"] {
        assert!(text.contains(subcommand), "missing {subcommand}: {text}");
    }
}

/// Every printed row, rebuilt as pulses and applied to its own target
/// state, must reproduce the printed efficiency: the table is not just
/// text, it re-verifies through the projection algebra.
#[test]
fn table1_emits_twelve_verified_rows() {
    let out = pra(&["table1"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 13, "{text}");
    assert_eq!(
        lines[0],
        "basis,row,phi0_rad,phi1_rad,phi2_rad,p0,p1,p2,theta0_rad,theta1_rad,theta2_rad,eta"
    );
    for line in &lines[1..] {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), 12, "{line}");
        let num: Vec<f64> = cells[2..].iter().map(|c| c.parse().unwrap()).collect();
        let (phases, p, theta, eta) = (&num[0..3], &num[3..6], &num[6..9], num[9]);
        let pulses = [
            ReadoutPulse::new(p[0], theta[0]).unwrap(),
            ReadoutPulse::new(p[1], theta[1]).unwrap(),
            ReadoutPulse::new(p[2], theta[2]).unwrap(),
        ];
        let amps: Vec<C64> = phases
            .iter()
            .map(|&phi| C64::from_polar((1.0f64 / 3.0).sqrt(), phi))
            .collect();
        let state = TimeBinState::new(amps, 1.0).unwrap();
        let projection = project(&state, &pulses).unwrap();
        // The CSV rounds to 1e-6; the projection inherits that rounding.
        assert!(
            (projection - eta).abs() < 1e-5,
            "row {line}: projection {projection} vs printed eta {eta}"
        );
    }
}

#[test]
fn bounds_certifies_the_structured_ceiling() {
    let out = pra(&["bounds"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("support,sup_eta,witness\n"), "{text}");
    assert!(text.contains("\n3,0.600000,"), "{text}");
    assert!(text.contains("\n8,0.600000,"), "{text}");
}

#[test]
fn simulate_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    fs::write(&config, TINY_CONFIG).unwrap();
    let run = |out_dir: &Path| {
        let out = pra(&[
            "simulate",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
        stdout(&out)
    };
    let (first_dir, second_dir) = (dir.path().join("a"), dir.path().join("b"));
    let first = run(&first_dir);
    let second = run(&second_dir);
    assert_eq!(first, second);
    for name in ["summary.json", "trace.csv"] {
        let a = fs::read(first_dir.join(name)).unwrap();
        let b = fs::read(second_dir.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between reruns");
    }
}

#[test]
fn simulate_reports_an_analyzer_projection() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    fs::write(&config, TINY_CONFIG).unwrap();
    let out = pra(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--phases",
        "0,0,0",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let summary: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(summary["eta0"].as_f64().unwrap() > 0.0);
    assert!(summary["eta"].as_f64().unwrap() > 0.0);
    assert_eq!(summary["bin_energies"].as_array().unwrap().len(), 3);
}

#[test]
fn missing_grids_warn_then_validation_reports_all_faults() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    let mut cfg: serde_json::Value = serde_json::from_str(TINY_CONFIG).unwrap();
    cfg["input"]["tau_s"] = (-1.0).into();
    cfg.as_object_mut().unwrap().remove("grids");
    fs::write(&config, cfg.to_string()).unwrap();
    let out = pra(&["simulate", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("no \"grids\" section"), "{err}");
    assert!(err.contains("tau_s"), "{err}");
}

#[test]
fn unknown_config_keys_are_itemized() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    let mut cfg: serde_json::Value = serde_json::from_str(TINY_CONFIG).unwrap();
    cfg["detuning_offset"] = 1.0.into();
    fs::write(&config, cfg.to_string()).unwrap();
    let out = pra(&["simulate", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr(&out).contains("unknown field `detuning_offset`"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn visibility_fits_the_effective_interference_law() {
    let out = pra(&["visibility", "--basis", "mub1", "--plane", "01"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4, "{text}");
    assert_eq!(
        lines[0],
        "projector,amplitude,phase_offset_rad,mean,rms_residual"
    );
    // Projector 0 follows (eta/2)(1 + cos 2phi): amplitude and mean are
    // both eta/2 = 1/6. Projector 2 is orthogonal to the whole scan plane,
    // so its curve is identically zero and its phase is undefined (empty).
    let first: Vec<&str> = lines[1].split(',').collect();
    assert!((first[1].parse::<f64>().unwrap() - 1.0 / 6.0).abs() < 1e-4);
    assert!((first[3].parse::<f64>().unwrap() - 1.0 / 6.0).abs() < 1e-4);
    let third: Vec<&str> = lines[3].split(',').collect();
    assert_eq!(third[1], "0.000000");
    assert_eq!(third[2], "");
}

#[test]
fn visibility_rejects_an_unknown_backend() {
    let out = pra(&[
        "visibility",
        "--basis",
        "mub1",
        "--plane",
        "01",
        "--backend",
        "oracle",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("unknown backend"), "{}", stderr(&out));
}

#[test]
fn report_writes_the_artifact_suite() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("artifacts");
    let out = pra(&[
        "report",
        "--out",
        out_dir.to_str().unwrap(),
        "--seed",
        "3",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("solver sweep: 200 random targets"), "{text}");
    let names: Vec<String> = fs::read_dir(&out_dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    assert!(names.iter().any(|n| n.starts_with("table1_")), "{names:?}");
    for basis in ["mub1", "mub2", "mub3", "optimal"] {
        assert!(
            names
                .iter()
                .any(|n| n.starts_with(&format!("overlap_{basis}_")) && n.ends_with(".svg")),
            "{names:?}"
        );
        assert!(
            names
                .iter()
                .any(|n| n.starts_with(&format!("visibility_{basis}-01_"))),
            "{names:?}"
        );
    }
}

#[test]
fn thread_override_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    fs::write(&config, TINY_CONFIG).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_pra"))
        .args(["simulate", "--config", config.to_str().unwrap()])
        .env("PRA_THREADS", "not-a-number")
        .output()
        .expect("binary spawns");
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("PRA_THREADS"), "{}", stderr(&out));

    let out = Command::new(env!("CARGO_BIN_EXE_pra"))
        .args(["simulate", "--config", config.to_str().unwrap()])
        .env("PRA_THREADS", "2")
        .output()
        .expect("binary spawns");
    assert!(out.status.success(), "{}", stderr(&out));
}
