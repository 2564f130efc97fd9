//! Batch experiment driver: JSON configs, diagnostics, CSV tables and a
//! run manifest with content hashes.
//!
//! Every table has a header row, LF line endings and floats in shortest
//! round-trip form. Rows are produced in a fixed order, so a fixed config
//! and seed give identical bytes.

use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::boundary::{cesaro_averages, deift_simon_wave, recover_p_from_u};
use crate::bounds::{check_cesaro_bound_scaled, check_sup_bound_scaled, BoundReport};
use crate::dos::{dos_counting, dos_kotani, equilibrium_density};
use crate::error::{Error, Result};
use crate::jacobi::evaluate_polys;
use crate::kernel::{
    derivative_identity_check, diagonal_derivative, diagonal_derivative_fd, scaled_diagonal, scaled_grid, sinc, ScalingMode,
};
use crate::models::{realize, ErgodicModel, ModelKind, GOLDEN_MEAN};
use crate::zeros::zeros_in_window;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Zeros,
    Kernel,
    Universality,
    Dos,
    Wave,
    Bounds,
    Derivative,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Zeros => "zeros",
            Self::Kernel => "kernel",
            Self::Universality => "universality",
            Self::Dos => "dos",
            Self::Wave => "wave",
            Self::Bounds => "bounds",
            Self::Derivative => "derivative",
        }
    }

    fn default_n(self) -> i64 {
        match self {
            Self::Dos => 5000,
            Self::Wave => 10_000,
            Self::Derivative => 100,
            _ => 2000,
        }
    }

    /// Experiments whose meaning depends on absolutely continuous spectrum.
    fn needs_ac_spectrum(self) -> bool {
        matches!(self, Self::Universality | Self::Kernel | Self::Wave)
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Model descriptor as written in configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSpec {
    /// `free`, `periodic`, `amo` or `anderson`.
    pub name: String,
    pub lambda: f64,
    pub alpha: f64,
    pub theta: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub coupling: f64,
    pub seed: Option<u64>,
}

impl Default for ModelSpec {
    fn default() -> Self {
        Self {
            name: "free".into(),
            lambda: 0.5,
            alpha: GOLDEN_MEAN,
            theta: 0.0,
            a: Vec::new(),
            b: Vec::new(),
            coupling: 1.0,
            seed: None,
        }
    }
}

impl ModelSpec {
    /// Builds the model; a random model without its own seed takes
    /// `fallback_seed`.
    pub fn build(&self, fallback_seed: Option<u64>) -> Result<ErgodicModel> {
        let kind = match self.name.as_str() {
            "free" => ModelKind::Free,
            "periodic" => ModelKind::Periodic {
                a: self.a.clone(),
                b: self.b.clone(),
            },
            "amo" | "almost_mathieu" => ModelKind::AlmostMathieu {
                lambda: self.lambda,
                alpha: self.alpha,
                theta: self.theta,
            },
            "anderson" => ModelKind::Anderson {
                coupling: self.coupling,
                seed: self.seed.or(fallback_seed),
            },
            other => return Err(Error::UnsupportedModel(format!("unknown model '{other}'"))),
        };
        ErgodicModel::new(kind)
    }
}

/// Evenly spaced energies `start..=stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyRange {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Option<ExperimentKind>,
    pub model: ModelSpec,
    /// Explicit energies (`x0` values). `None` means `[0.0]`.
    pub energies: Option<Vec<f64>>,
    pub energy_range: Option<EnergyRange>,
    /// Degrees; signed so that bad input is reported, not rejected by the parser.
    pub n: Vec<i64>,
    pub epsilon: Vec<f64>,
    pub phase_samples: usize,
    pub seed: Option<u64>,
    pub out: PathBuf,
    pub threads: Option<usize>,
    /// Shift `k` of the base point `S^k ω`.
    pub shift: i64,
    /// Zero window half width; defaults to `30/n`.
    pub half_width: Option<f64>,
    /// Reference density for clock and sinc comparisons.
    pub rho_ref: Option<f64>,
    /// Offsets `a, b` for kernel grids; defaults to `-10..=10` step `0.5`.
    pub offsets: Option<Vec<f64>>,
    /// `z` values as `[re, im]` pairs for bound checks.
    pub z_values: Option<Vec<[f64; 2]>>,
    /// Multiplier on the exponent of the bound right-hand sides. Values
    /// below one inject faults.
    pub bound_exponent_scale: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            kind: None,
            model: ModelSpec::default(),
            energies: None,
            energy_range: None,
            n: Vec::new(),
            epsilon: vec![1e-4],
            phase_samples: 1000,
            seed: None,
            out: PathBuf::from("out"),
            threads: None,
            shift: 0,
            half_width: None,
            rho_ref: None,
            offsets: None,
            z_values: None,
            bound_exponent_scale: 1.0,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> std::result::Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("config parse error: {e}"))
    }

    pub fn load(path: &Path) -> std::result::Result<Self, String> {
        let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        Self::from_json(&text)
    }

    pub fn energies(&self) -> Vec<f64> {
        let mut out = self.energies.clone().unwrap_or_default();
        if let Some(r) = self.energy_range {
            match r.count {
                0 => {}
                1 => out.push(r.start),
                c => out.extend((0..c).map(|i| r.start + (r.stop - r.start) * i as f64 / (c - 1) as f64)),
            }
        }
        if self.energies.is_none() && self.energy_range.is_none() {
            out.push(0.0);
        }
        out
    }

    fn degrees(&self, kind: ExperimentKind) -> Vec<usize> {
        if self.n.is_empty() {
            vec![kind.default_n() as usize]
        } else {
            self.n.iter().map(|&v| v as usize).collect()
        }
    }

    fn epsilon(&self) -> f64 {
        self.epsilon.last().copied().unwrap_or(1e-4)
    }

    fn offsets(&self) -> Vec<f64> {
        self.offsets
            .clone()
            .unwrap_or_else(|| (-20..=20).map(|i| i as f64 * 0.5).collect())
    }

    fn z_values(&self) -> Vec<Complex64> {
        match &self.z_values {
            Some(v) => v.iter().map(|[re, im]| Complex64::new(*re, *im)).collect(),
            None => vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 1.0),
                Complex64::new(0.0, 2.0),
                Complex64::new(5.0, 0.0),
                Complex64::new(-3.0, 4.0),
                Complex64::new(0.0, 10.0),
            ],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{tag}: {}", self.message)
    }
}

/// Human-readable diagnostics. The run exits with status 1 exactly when an
/// error-severity diagnostic is present; warnings are informational.
pub fn validate(config: &ExperimentConfig) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut error = |m: String| {
        out.push(Diagnostic {
            severity: Severity::Error,
            message: m,
        })
    };
    let kind = config.kind;
    if kind.is_none() {
        error("no experiment kind given".into());
    }
    if let Err(e) = config.model.build(config.seed) {
        error(format!("model: {e}"));
    }
    if let Some(&bad) = config.n.iter().find(|&&v| v < 1) {
        error(format!("degree n = {bad} must be at least 1"));
    }
    let energies = config.energies();
    if energies.is_empty() {
        error("empty energy list".into());
    }
    if energies.iter().any(|e| !e.is_finite()) {
        error("energies must be finite".into());
    }
    if config.epsilon.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
        error("epsilon values must be positive".into());
    }
    if config.phase_samples == 0 {
        error("phase_samples must be at least 1".into());
    }
    if matches!(config.half_width, Some(w) if !(w > 0.0)) {
        error("half_width must be positive".into());
    }
    if matches!(config.rho_ref, Some(r) if !(r > 0.0 && r.is_finite())) {
        error("rho_ref must be positive".into());
    }
    if matches!(config.threads, Some(0)) {
        error("threads must be at least 1".into());
    }
    if matches!(&config.offsets, Some(v) if v.is_empty()) {
        error("empty offset list".into());
    }
    if matches!(&config.z_values, Some(v) if v.is_empty()) {
        error("empty z list".into());
    }
    if !(config.bound_exponent_scale.is_finite() && config.bound_exponent_scale > 0.0) {
        error("bound_exponent_scale must be positive".into());
    }
    if let Some(k) = kind {
        if k.needs_ac_spectrum() {
            match config.model.name.as_str() {
                "amo" | "almost_mathieu" if config.model.lambda.abs() >= 1.0 => out.push(Diagnostic {
                    severity: Severity::Warning,
                    message: "no a.c. spectrum expected for |λ| ≥ 1".into(),
                }),
                "anderson" => out.push(Diagnostic {
                    severity: Severity::Warning,
                    message: "no a.c. spectrum expected for the random model".into(),
                }),
                _ => {}
            }
        }
    }
    out
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(|d| d.severity == Severity::Error)
}

/// One written artifact.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileRecord {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub experiment: String,
    pub config: ExperimentConfig,
    pub exit_code: i32,
    pub violations: usize,
    pub wall_time_seconds: f64,
    pub files: Vec<FileRecord>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub violations: usize,
    pub files: Vec<PathBuf>,
    pub diagnostics: Vec<Diagnostic>,
}

/// A header plus rows of preformatted cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    /// Header row then data rows, comma separated with LF line endings.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header).expect("writing to memory");
        for row in &self.rows {
            w.write_record(row).expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("writing to memory")).expect("cells are UTF-8")
    }
}

/// Shortest round-trip float formatting.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

macro_rules! row {
    ($($e:expr),* $(,)?) => { vec![$(Cell::cell(&$e)),*] };
}

trait Cell {
    fn cell(&self) -> String;
}

impl Cell for f64 {
    fn cell(&self) -> String {
        fmt_f64(*self)
    }
}

impl Cell for usize {
    fn cell(&self) -> String {
        self.to_string()
    }
}

impl Cell for i64 {
    fn cell(&self) -> String {
        self.to_string()
    }
}

impl Cell for bool {
    fn cell(&self) -> String {
        self.to_string()
    }
}

impl Cell for &str {
    fn cell(&self) -> String {
        self.to_string()
    }
}

/// Runs the experiment, writes `<kind>.csv` and `manifest.json` into
/// `config.out` and reports the exit status.
pub fn run(config: &ExperimentConfig) -> RunOutcome {
    let diagnostics = validate(config);
    if has_errors(&diagnostics) {
        return RunOutcome {
            exit_code: EXIT_CONFIG,
            violations: 0,
            files: Vec::new(),
            diagnostics,
        };
    }
    let start = Instant::now();
    let result = match config.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::InvalidArgument(e.to_string()))
            .and_then(|pool| pool.install(|| compute(config))),
        None => compute(config),
    };
    let fail = |diagnostics: &mut Vec<Diagnostic>, message: String| {
        diagnostics.push(Diagnostic {
            severity: Severity::Error,
            message,
        });
    };
    let mut diagnostics = diagnostics;
    let (table, violations) = match result {
        Ok(v) => v,
        Err(e) => {
            fail(&mut diagnostics, e.to_string());
            return RunOutcome {
                exit_code: EXIT_CONFIG,
                violations: 0,
                files: Vec::new(),
                diagnostics,
            };
        }
    };
    let kind = config.kind.expect("validated");
    let exit_code = if violations > 0 { EXIT_VIOLATION } else { EXIT_OK };
    match write_outputs(config, kind, &table, violations, exit_code, start) {
        Ok(files) => RunOutcome {
            exit_code,
            violations,
            files,
            diagnostics,
        },
        Err(message) => {
            fail(&mut diagnostics, message);
            RunOutcome {
                exit_code: EXIT_CONFIG,
                violations,
                files: Vec::new(),
                diagnostics,
            }
        }
    }
}

fn write_outputs(
    config: &ExperimentConfig,
    kind: ExperimentKind,
    table: &Table,
    violations: usize,
    exit_code: i32,
    start: Instant,
) -> std::result::Result<Vec<PathBuf>, String> {
    let dir = &config.out;
    fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
    let csv_path = dir.join(format!("{}.csv", kind.name()));
    let csv = table.to_csv();
    fs::write(&csv_path, &csv).map_err(|e| format!("cannot write {}: {e}", csv_path.display()))?;
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        experiment: kind.name().into(),
        config: config.clone(),
        exit_code,
        violations,
        wall_time_seconds: start.elapsed().as_secs_f64(),
        files: vec![FileRecord {
            path: csv_path.file_name().unwrap().to_string_lossy().into_owned(),
            sha256: hex::encode(Sha256::digest(csv.as_bytes())),
            bytes: csv.len(),
        }],
    };
    let manifest_path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| e.to_string())? + "\n";
    fs::write(&manifest_path, text).map_err(|e| format!("cannot write {}: {e}", manifest_path.display()))?;
    Ok(vec![csv_path, manifest_path])
}

/// Builds the table for `config` without touching the file system.
pub fn compute(config: &ExperimentConfig) -> Result<(Table, usize)> {
    let kind = config
        .kind
        .ok_or_else(|| Error::InvalidArgument("no experiment kind given".into()))?;
    let model = config.model.build(config.seed)?;
    let energies = config.energies();
    let degrees = config.degrees(kind);
    match kind {
        ExperimentKind::Zeros => zeros_table(config, &model, &energies, &degrees),
        ExperimentKind::Kernel => kernel_table(config, &model, &energies, &degrees),
        ExperimentKind::Universality => universality_table(config, &model, &energies, &degrees),
        ExperimentKind::Dos => dos_table(config, &model, &energies, &degrees),
        ExperimentKind::Wave => wave_table(config, &model, &energies, &degrees),
        ExperimentKind::Bounds => bounds_table(config, &model, &energies, &degrees),
        ExperimentKind::Derivative => derivative_table(config, &model, &energies, &degrees),
    }
}

/// Density used as the spacing and sinc reference: the configured value,
/// the arcsine density for free parameters, or the counting estimate.
fn reference_density(config: &ExperimentConfig, model: &ErgodicModel, x0: f64, n: usize) -> Result<f64> {
    if let Some(r) = config.rho_ref {
        return Ok(r);
    }
    if model.kind == ModelKind::Free {
        return equilibrium_density((-2.0, 2.0), x0);
    }
    Ok(dos_counting(model, config.shift, n, &[x0])?.rho[0])
}

fn zeros_table(config: &ExperimentConfig, model: &ErgodicModel, energies: &[f64], degrees: &[usize]) -> Result<(Table, usize)> {
    let mut t = Table::new(&["n", "x0", "j", "x_j", "x_next", "scaled_spacing"]);
    for &n in degrees {
        let params = realize(model, config.shift, n)?;
        for &x0 in energies {
            let w = config.half_width.unwrap_or(30.0 / n as f64);
            let window = zeros_in_window(&params, n, x0, w)?;
            let rho = reference_density(config, model, x0, n)?;
            for (label, pair) in window.labels().zip(window.zeros.windows(2)) {
                let spacing = n as f64 * (pair[1] - pair[0]) * rho;
                t.rows.push(row![n, x0, label, pair[0], pair[1], spacing]);
            }
        }
    }
    Ok((t, 0))
}

fn kernel_table(config: &ExperimentConfig, model: &ErgodicModel, energies: &[f64], degrees: &[usize]) -> Result<(Table, usize)> {
    let mut t = Table::new(&["n", "x0", "a", "diag_ratio", "abs_dev"]);
    let offsets = config.offsets();
    for &n in degrees {
        let params = realize(model, config.shift, n)?;
        for &x0 in energies {
            let center = scaled_diagonal(&params, x0, n, 0.0)?;
            let vals = offsets
                .par_iter()
                .map(|&a| scaled_diagonal(&params, x0, n, a))
                .collect::<Result<Vec<f64>>>()?;
            for (&a, v) in offsets.iter().zip(vals) {
                let ratio = v / center;
                t.rows.push(row![n, x0, a, ratio, (ratio - 1.0).abs()]);
            }
        }
    }
    Ok((t, 0))
}

fn universality_table(
    config: &ExperimentConfig,
    model: &ErgodicModel,
    energies: &[f64],
    degrees: &[usize],
) -> Result<(Table, usize)> {
    let mut t = Table::new(&["n", "x0", "a", "b", "ratio", "sinc_ref", "abs_err"]);
    let offsets = config.offsets();
    for &n in degrees {
        let params = realize(model, config.shift, n)?;
        for &x0 in energies {
            let rho = reference_density(config, model, x0, n)?;
            let grid = scaled_grid(&params, x0, n, &offsets, ScalingMode::Plain, None)?;
            for (i, &a) in offsets.iter().enumerate() {
                for (j, &b) in offsets.iter().enumerate() {
                    let ratio = grid.values[i][j];
                    let reference = sinc(std::f64::consts::PI * rho * (b - a));
                    t.rows.push(row![n, x0, a, b, ratio, reference, (ratio - reference).abs()]);
                }
            }
        }
    }
    Ok((t, 0))
}

fn dos_table(config: &ExperimentConfig, model: &ErgodicModel, energies: &[f64], degrees: &[usize]) -> Result<(Table, usize)> {
    let mut t = Table::new(&[
        "n",
        "energy",
        "nu_cdf",
        "rho_counting",
        "rho_kotani",
        "kotani_stderr",
        "phase_samples",
    ]);
    let mut grid = energies.to_vec();
    grid.sort_by(f64::total_cmp);
    let eps = config.epsilon();
    let seed = config.seed.unwrap_or(0);
    let kotani = grid
        .iter()
        .map(|&x| dos_kotani(model, x, eps, config.phase_samples, seed))
        .collect::<Result<Vec<_>>>()?;
    for &n in degrees {
        let counting = dos_counting(model, config.shift, n, &grid)?;
        for (i, k) in kotani.iter().enumerate() {
            t.rows.push(row![
                n,
                grid[i],
                counting.nu_cdf[i],
                counting.rho[i],
                k.rho,
                k.stderr,
                k.samples
            ]);
        }
    }
    Ok((t, 0))
}

fn wave_table(config: &ExperimentConfig, model: &ErgodicModel, energies: &[f64], degrees: &[usize]) -> Result<(Table, usize)> {
    let mut t = Table::new(&[
        "n",
        "x",
        "epsilon",
        "wronskian_err",
        "phase_err",
        "p_recovery_err",
        "avg_p2",
        "avg_im_u2",
        "rho_l",
        "re_avg_u2",
        "im_avg_u2",
        "kernel_density",
        "ids_rotation",
    ]);
    let eps = config.epsilon();
    let tasks: Vec<(usize, f64)> = degrees.iter().flat_map(|&n| energies.iter().map(move |&x| (n, x))).collect();
    let rows = tasks
        .par_iter()
        .map(|&(n, x)| {
            let wave = deift_simon_wave(model, config.shift, x, eps, n)?;
            let p = recover_p_from_u(&wave, n)?;
            let params = realize(model, config.shift, n)?;
            let direct = evaluate_polys(&params, x, n)?;
            let p_err = p_recovery_error(&params, &direct.p, &p, direct.scale_log);
            let avg = cesaro_averages(model, config.shift, x, eps, n)?;
            Ok(row![
                n,
                x,
                eps,
                wave.wronskian_error(),
                wave.phase_factorization_error(),
                p_err,
                avg.avg_p2,
                avg.avg_im_u2,
                avg.rho_l,
                avg.r(),
                avg.i(),
                avg.kernel_density(),
                avg.ids_from_rotation
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    t.rows = rows;
    Ok((t, 0))
}

/// `max_j |p̂_j - p_j| / √(p_j² + (a_j p_{j-1})²)`, the error relative to the
/// size of the solution vector at step `j`.
pub fn p_recovery_error(params: &crate::jacobi::JacobiParams, direct: &[f64], recovered: &[f64], scale_log: f64) -> f64 {
    let s = scale_log.exp();
    let mut worst = (recovered[0] - direct[0] * s).abs();
    for j in 1..direct.len().min(recovered.len()) {
        let pj = direct[j] * s;
        let prev = params.a(j) * direct[j - 1] * s;
        let size = (pj * pj + prev * prev).sqrt();
        worst = worst.max((recovered[j] - pj).abs() / size);
    }
    worst
}

fn bounds_table(config: &ExperimentConfig, model: &ErgodicModel, energies: &[f64], degrees: &[usize]) -> Result<(Table, usize)> {
    let mut t = Table::new(&["form", "n", "x0", "z_re", "z_im", "lhs", "rhs", "constant_c", "holds", "margin"]);
    let zs = config.z_values();
    let kappa = config.bound_exponent_scale;
    let mut violations = 0;
    for &n in degrees {
        let params = realize(model, config.shift, n)?;
        for &x0 in energies {
            for &z in &zs {
                let reports: [(&str, BoundReport); 2] = [
                    ("cesaro", check_cesaro_bound_scaled(&params, x0, z, n, kappa)?),
                    ("sup", check_sup_bound_scaled(&params, x0, z, n, kappa)?),
                ];
                for (form, r) in reports {
                    if !r.holds {
                        violations += 1;
                    }
                    t.rows.push(row![form, n, x0, r.z.0, r.z.1, r.lhs, r.rhs, r.constant_c, r.holds, r.margin]);
                }
            }
        }
    }
    Ok((t, violations))
}

fn derivative_table(config: &ExperimentConfig, model: &ErgodicModel, energies: &[f64], degrees: &[usize]) -> Result<(Table, usize)> {
    let mut t = Table::new(&["n", "x0", "diag_derivative", "fd_derivative", "rel_err", "identity_rel_err"]);
    for &n in degrees {
        let params = realize(model, config.shift, n)?;
        for &x0 in energies {
            let d = diagonal_derivative(&params, x0, n)?;
            let fd = diagonal_derivative_fd(&params, x0, n)?;
            let scale = d.abs().max(scaled_diagonal(&params, x0, n, 0.0)? / n as f64);
            let rel = (d - fd).abs() / scale;
            let id = derivative_identity_check(&params, x0, n)?;
            t.rows.push(row![n, x0, d, fd, rel, id]);
        }
    }
    Ok((t, 0))
}

/// Renders diagnostics one per line.
pub fn render_diagnostics(diags: &[Diagnostic]) -> String {
    let mut s = String::new();
    for d in diags {
        let _ = writeln!(s, "{d}");
    }
    s
}
