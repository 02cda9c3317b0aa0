//! Report artifacts: CSV tables and SVG plots with deterministic,
//! config-addressed file names.
//!
//! Every file name ends in the FNV-1a hash of the manifest string the
//! bundle was created with, so re-running the same configuration
//! overwrites its own artifacts and different configurations never
//! collide.
//!
//! CSV schemas (one header line each):
//!
//! - `table1_<hash>.csv` — `basis,row,phi0_rad,phi1_rad,phi2_rad,p0,p1,p2,
//!   theta0_rad,theta1_rad,theta2_rad,eta`: solved pulse parameters and
//!   efficiency for the twelve standard analyzer settings.
//! - `table2_<hash>.csv` — `basis,eta0,efficiency,fidelity`: simulated
//!   basis characterizations.
//! - `overlap_<label>_<hash>.csv` — `analyzer,state0,state1,state2`: one
//!   row per analyzer setting.
//! - `visibility_<label>_<hash>.csv` — `projector,phi_rad,overlap`.
//! - `visibility_<label>_fits_<hash>.csv` — `projector,amplitude,
//!   phase_offset_rad,mean,rms_residual` (offset empty when the curve is
//!   flat).
//! - `trace_<label>_<hash>.csv` — `t_s,re,im,intensity`.
//!
//! Each overlap matrix, visibility scan, and field trace also renders to
//! an SVG plot of the same stem.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::sim::{BasisReport, FieldTrace};
use crate::solver::{basis_phases, solve_analyzer, AnalyzerSolution, BasisId};

use super::overlap::OverlapMatrix;
use super::scan::VisibilityCurve;

/// FNV-1a 64-bit hash of a manifest string; the suffix that makes report
/// file names deterministic per configuration.
pub fn config_digest(manifest: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in manifest.as_bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// One solved analyzer setting of the standard twelve (four bases, three
/// settings each).
#[derive(Debug, Clone)]
pub struct Table1Row {
    /// Basis the setting belongs to.
    pub basis: BasisId,
    /// Row index within the basis (0..3).
    pub row: usize,
    /// Target projector phases.
    pub phases: [f64; 3],
    /// Solved pulses and efficiency.
    pub solution: AnalyzerSolution,
}

/// Solves all twelve standard analyzer settings.
pub fn table1_rows() -> Result<Vec<Table1Row>> {
    let mut rows = Vec::with_capacity(12);
    for basis in [BasisId::Mub1, BasisId::Mub2, BasisId::Mub3, BasisId::Optimal] {
        for (row, phases) in basis_phases(basis).iter().enumerate() {
            rows.push(Table1Row {
                basis,
                row,
                phases: *phases,
                solution: solve_analyzer(phases)?,
            });
        }
    }
    Ok(rows)
}

/// Everything one report run wants written, with the digest that stamps
/// its file names.
#[derive(Debug, Clone, Default)]
pub struct ReportBundle {
    digest: u64,
    table1: Vec<Table1Row>,
    table2: Vec<(String, BasisReport)>,
    matrices: Vec<(String, OverlapMatrix)>,
    curves: Vec<(String, [VisibilityCurve; 3])>,
    traces: Vec<(String, FieldTrace)>,
}

impl ReportBundle {
    /// An empty bundle stamped with the digest of `manifest` (typically
    /// the configuration text or the command line that produced the
    /// results).
    pub fn new(manifest: &str) -> Self {
        Self {
            digest: config_digest(manifest),
            ..Self::default()
        }
    }

    pub fn digest(&self) -> u64 {
        self.digest
    }

    pub fn is_empty(&self) -> bool {
        self.table1.is_empty()
            && self.table2.is_empty()
            && self.matrices.is_empty()
            && self.curves.is_empty()
            && self.traces.is_empty()
    }

    /// Adds the twelve standard solved analyzer settings.
    pub fn with_standard_table(mut self) -> Result<Self> {
        self.table1 = table1_rows()?;
        Ok(self)
    }

    pub fn push_basis(&mut self, label: &str, report: BasisReport) {
        self.table2.push((sanitize(label), report));
    }

    pub fn push_matrix(&mut self, label: &str, matrix: OverlapMatrix) {
        self.matrices.push((sanitize(label), matrix));
    }

    pub fn push_curves(&mut self, label: &str, curves: [VisibilityCurve; 3]) {
        self.curves.push((sanitize(label), curves));
    }

    pub fn push_trace(&mut self, label: &str, trace: FieldTrace) {
        self.traces.push((sanitize(label), trace));
    }
}

/// Lowercases a label and maps anything outside `[a-z0-9]` to `-` so it
/// can sit inside a file name.
fn sanitize(label: &str) -> String {
    label
        .chars()
        .map(|c| {
            let c = c.to_ascii_lowercase();
            if c.is_ascii_alphanumeric() {
                c
            } else {
                '-'
            }
        })
        .collect()
}

/// Writes every artifact in the bundle into `dir` (created if missing)
/// and returns the paths written, in emission order. An empty bundle
/// writes nothing and returns an empty list; the caller decides whether
/// that deserves a warning.
pub fn emit_report(bundle: &ReportBundle, dir: &Path) -> Result<Vec<PathBuf>> {
    if bundle.is_empty() {
        return Ok(Vec::new());
    }
    std::fs::create_dir_all(dir)?;
    let tag = format!("{:016x}", bundle.digest);
    let mut written = Vec::new();
    let mut emit = |name: String, content: String| -> Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, content)?;
        written.push(path);
        Ok(())
    };

    if !bundle.table1.is_empty() {
        emit(format!("table1_{tag}.csv"), table1_csv(&bundle.table1))?;
    }
    if !bundle.table2.is_empty() {
        emit(format!("table2_{tag}.csv"), table2_csv(&bundle.table2))?;
    }
    for (label, matrix) in &bundle.matrices {
        emit(format!("overlap_{label}_{tag}.csv"), overlap_csv(matrix))?;
        emit(format!("overlap_{label}_{tag}.svg"), overlap_svg(matrix))?;
    }
    for (label, curves) in &bundle.curves {
        emit(
            format!("visibility_{label}_{tag}.csv"),
            visibility_csv(curves),
        )?;
        emit(
            format!("visibility_{label}_fits_{tag}.csv"),
            visibility_fits_csv(curves),
        )?;
        emit(
            format!("visibility_{label}_{tag}.svg"),
            visibility_svg(curves),
        )?;
    }
    for (label, trace) in &bundle.traces {
        emit(format!("trace_{label}_{tag}.csv"), trace.to_csv())?;
        emit(format!("trace_{label}_{tag}.svg"), trace_svg(trace))?;
    }
    Ok(written)
}

/// Renders solved-parameter rows as CSV (the `table1_*.csv` schema).
pub fn table1_csv(rows: &[Table1Row]) -> String {
    let mut out = String::from(
        "basis,row,phi0_rad,phi1_rad,phi2_rad,p0,p1,p2,theta0_rad,theta1_rad,theta2_rad,eta\n",
    );
    for r in rows {
        let p = &r.solution.pulses;
        let _ = writeln!(
            out,
            "{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
            r.basis.name(),
            r.row,
            r.phases[0],
            r.phases[1],
            r.phases[2],
            p[0].transfer(),
            p[1].transfer(),
            p[2].transfer(),
            p[0].phase(),
            p[1].phase(),
            p[2].phase(),
            r.solution.efficiency,
        );
    }
    out
}

/// Renders basis characterization rows as CSV (the `table2_*.csv` schema).
pub fn table2_csv(rows: &[(String, BasisReport)]) -> String {
    let mut out = String::from("basis,eta0,efficiency,fidelity\n");
    for (label, r) in rows {
        let _ = writeln!(
            out,
            "{label},{:.6},{:.6},{:.6}",
            r.eta0, r.efficiency, r.fidelity
        );
    }
    out
}

fn overlap_csv(m: &OverlapMatrix) -> String {
    let mut out = String::from("analyzer,state0,state1,state2\n");
    for (j, row) in m.values().iter().enumerate() {
        let _ = writeln!(out, "{j},{:.6},{:.6},{:.6}", row[0], row[1], row[2]);
    }
    out
}

fn visibility_csv(curves: &[VisibilityCurve; 3]) -> String {
    let mut out = String::from("projector,phi_rad,overlap\n");
    for c in curves {
        for (&phi, &v) in c.phis.iter().zip(&c.values) {
            let _ = writeln!(out, "{},{:.6},{:.6}", c.projector, phi, v);
        }
    }
    out
}

fn visibility_fits_csv(curves: &[VisibilityCurve; 3]) -> String {
    let mut out = String::from("projector,amplitude,phase_offset_rad,mean,rms_residual\n");
    for c in curves {
        let offset = c
            .fit
            .phase_offset
            .map(|x| format!("{x:.6}"))
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{:.6},{},{:.6},{:.6e}",
            c.projector, c.fit.amplitude, offset, c.fit.mean, c.fit.residual
        );
    }
    out
}

// ---------------------------------------------------------------------
// SVG rendering. Hand-rolled: fixed canvas, numeric formatting pinned so
// identical inputs render byte-identical files.

const PLOT_W: f64 = 640.0;
const PLOT_H: f64 = 400.0;
const MARGIN: f64 = 52.0;
const SERIES_COLORS: [&str; 3] = ["#1f77b4", "#d62728", "#2ca02c"];

fn svg_open(width: f64, height: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" \
         height=\"{height:.0}\" viewBox=\"0 0 {width:.0} {height:.0}\" \
         font-family=\"sans-serif\" font-size=\"12\">\n\
         <rect width=\"{width:.0}\" height=\"{height:.0}\" fill=\"white\"/>\n"
    )
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    /// Data ranges padded so flat curves stay visible.
    fn new(xs: (f64, f64), ys: (f64, f64)) -> Self {
        let (mut y0, mut y1) = ys;
        if y1 - y0 < 1e-12 {
            y0 -= 0.5;
            y1 += 0.5;
        }
        let pad = 0.05 * (y1 - y0);
        Self {
            x0: xs.0,
            x1: xs.1,
            y0: y0 - pad,
            y1: y1 + pad,
        }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (PLOT_W - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        PLOT_H - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (PLOT_H - 2.0 * MARGIN)
    }

    /// Border, four ticks per axis, and axis titles.
    fn axes(&self, xlabel: &str, ylabel: &str) -> String {
        let mut out = format!(
            "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"{:.1}\" height=\"{:.1}\" \
             fill=\"none\" stroke=\"#444\"/>\n",
            MARGIN,
            MARGIN,
            PLOT_W - 2.0 * MARGIN,
            PLOT_H - 2.0 * MARGIN
        );
        for i in 0..=4 {
            let f = i as f64 / 4.0;
            let x = self.x0 + f * (self.x1 - self.x0);
            let y = self.y0 + f * (self.y1 - self.y0);
            let _ = writeln!(
                out,
                "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{:.4}</text>",
                self.px(x),
                PLOT_H - MARGIN + 16.0,
                x
            );
            let _ = writeln!(
                out,
                "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{:.4}</text>",
                MARGIN - 6.0,
                self.py(y) + 4.0,
                y
            );
        }
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>",
            PLOT_W / 2.0,
            PLOT_H - 10.0,
            xlabel
        );
        let _ = writeln!(
            out,
            "<text x=\"14\" y=\"{:.1}\" text-anchor=\"middle\" \
             transform=\"rotate(-90 14 {:.1})\">{}</text>",
            PLOT_H / 2.0,
            PLOT_H / 2.0,
            ylabel
        );
        out
    }

    fn polyline(&self, points: impl Iterator<Item = (f64, f64)>, color: &str, dashed: bool) -> String {
        let coords: String = points
            .map(|(x, y)| format!("{:.2},{:.2} ", self.px(x), self.py(y)))
            .collect();
        let dash = if dashed { " stroke-dasharray=\"6 4\"" } else { "" };
        format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" \
             stroke-width=\"1.5\"{dash}/>\n",
            coords.trim_end()
        )
    }
}

/// 3×3 heatmap, shaded by entry over the matrix maximum.
fn overlap_svg(m: &OverlapMatrix) -> String {
    let size = 90.0;
    let left = 70.0;
    let top = 40.0;
    let mut out = svg_open(left + 3.0 * size + 30.0, top + 3.0 * size + 50.0);
    let max = m.max_entry().max(f64::MIN_POSITIVE);
    for (j, row) in m.values().iter().enumerate() {
        for (i, &v) in row.iter().enumerate() {
            let x = left + i as f64 * size;
            let y = top + j as f64 * size;
            let shade = (255.0 * (1.0 - v / max)).round() as u8;
            let text_fill = if v / max > 0.5 { "white" } else { "black" };
            let _ = writeln!(
                out,
                "<rect x=\"{x:.1}\" y=\"{y:.1}\" width=\"{size:.1}\" height=\"{size:.1}\" \
                 fill=\"rgb({shade},{shade},{})\" stroke=\"#444\"/>",
                shade.saturating_add(24)
            );
            let _ = writeln!(
                out,
                "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" fill=\"{text_fill}\">{v:.4}</text>",
                x + size / 2.0,
                y + size / 2.0 + 4.0
            );
        }
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">analyzer {j}</text>",
            left - 8.0,
            top + j as f64 * size + size / 2.0 + 4.0
        );
    }
    for i in 0..3 {
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">state {i}</text>",
            left + i as f64 * size + size / 2.0,
            top + 3.0 * size + 20.0
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Sampled overlaps as dots-on-lines plus the fitted sinusoids, dashed.
fn visibility_svg(curves: &[VisibilityCurve; 3]) -> String {
    let xs = (
        curves[0].phis.iter().cloned().fold(f64::INFINITY, f64::min),
        curves[0]
            .phis
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max),
    );
    let ys = curves
        .iter()
        .flat_map(|c| c.values.iter().cloned())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    let frame = Frame::new(xs, (ys.0.min(0.0), ys.1));
    let mut out = svg_open(PLOT_W, PLOT_H);
    out.push_str(&frame.axes("phi (rad)", "overlap"));
    for (c, color) in curves.iter().zip(SERIES_COLORS) {
        out.push_str(&frame.polyline(
            c.phis.iter().cloned().zip(c.values.iter().cloned()),
            color,
            false,
        ));
        let fit_points = (0..=200).map(|i| {
            let phi = xs.0 + (xs.1 - xs.0) * i as f64 / 200.0;
            (phi, c.fit.evaluate(phi))
        });
        out.push_str(&frame.polyline(fit_points, color, true));
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" fill=\"{color}\">projector {}</text>",
            PLOT_W - MARGIN - 100.0,
            MARGIN + 18.0 * (c.projector as f64 + 1.0),
            c.projector
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Output intensity over time with the integration windows shaded.
fn trace_svg(trace: &FieldTrace) -> String {
    let n = trace.samples().len().max(1);
    let stride = n.div_ceil(4000);
    let t_at = |i: usize| trace.t0_s() + i as f64 * trace.dt_s();
    let points: Vec<(f64, f64)> = (0..n)
        .step_by(stride)
        .map(|i| (t_at(i) * 1e6, trace.samples()[i].norm_sqr()))
        .collect();
    let peak = points
        .iter()
        .map(|&(_, y)| y)
        .fold(f64::MIN_POSITIVE, f64::max);
    let frame = Frame::new((points[0].0, points[points.len() - 1].0), (0.0, peak));
    let mut out = svg_open(PLOT_W, PLOT_H);
    for &(a, b) in trace.windows() {
        let _ = writeln!(
            out,
            "<rect x=\"{:.1}\" y=\"{MARGIN:.1}\" width=\"{:.1}\" height=\"{:.1}\" \
             fill=\"#ffdf80\" fill-opacity=\"0.5\"/>",
            frame.px(a * 1e6),
            frame.px(b * 1e6) - frame.px(a * 1e6),
            PLOT_H - 2.0 * MARGIN
        );
    }
    out.push_str(&frame.axes("t (us)", "intensity"));
    out.push_str(&frame.polyline(points.into_iter(), SERIES_COLORS[0], false));
    out.push_str("</svg>\n");
    out
}

/// Convenience check used by the command line: an empty emission deserves
/// a warning rather than silence.
pub fn describe_emission(paths: &[PathBuf]) -> String {
    if paths.is_empty() {
        "nothing to report: the bundle was empty".into()
    } else {
        let mut out = format!("wrote {} files:\n", paths.len());
        for p in paths {
            let _ = writeln!(out, "  {}", p.display());
        }
        out
    }
}
