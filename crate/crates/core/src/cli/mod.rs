//! Command-line front end.
//!
//! Exit codes: 0 success, 2 usage or validation error, 3 solver failure,
//! 4 enumeration capacity exceeded.

pub mod table;
pub mod units;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::error::Error;
use crate::fields::{normalization_check, stationarity_residual, conjugated_state, BoxState, GridSpec};
use crate::model::{BoxSpec, QuantumNumbers};
use crate::rootfind::SolverConfig;
use crate::spectra::{count_states, enumerate_levels, figure_table, Extent, Level, Model, SpectrumRequest};
use table::{Cell, Report, Table};
use units::{annotate_units, Preset};

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_CAPACITY: i32 = 4;

/// L_C values tabulated when `--lc` is not given. Only 300 is fixed by the
/// reference figures; the other three span the relativistic regime.
pub const DEFAULT_LCS: [f64; 4] = [1.0, 10.0, 100.0, 300.0];

#[derive(Debug, Parser)]
#[command(name = "relbox", version, about = "Relativistic particle-in-a-box spectra, fields and state counts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Energy levels per model and box size.
    ///
    /// CSV columns: model, dim, lc, lengths, level, qnums, wavenumbers,
    /// kinetic, degeneracy, merged. List-valued cells are ';'-separated.
    /// Rows are ordered by model, then L_C, then kinetic energy.
    Spectrum(Opts),
    /// Samples of a Klein-Gordon box eigenstate on a closed grid.
    ///
    /// CSV columns: x (or x1, x2, x3), t, re_phi, im_phi, re_chi, im_chi,
    /// rho, j (or j1, j2, j3), followed by '# key=value' summary lines for
    /// normalization, max_abs_current, stationarity_residual and energy.
    Field(Opts),
    /// Degeneracy-weighted number of states up to each kinetic cutoff.
    ///
    /// CSV columns: model, dim, lc, lengths, tmax, spin_counting, count.
    Count(Opts),
}

#[derive(Debug, Clone, Args)]
pub struct Opts {
    /// Spatial dimension, 1 or 3.
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    /// kg, dirac, nonrel or all.
    #[arg(long, default_value = "all")]
    pub model: String,
    /// Comma-separated box sizes in Compton wavelengths (cubes in 3D).
    #[arg(long, allow_hyphen_values = true, conflicts_with = "lengths")]
    pub lc: Option<String>,
    /// One box as comma-separated side lengths (1 or 3 values).
    #[arg(long, allow_hyphen_values = true)]
    pub lengths: Option<String>,
    /// Number of distinct levels per spectrum.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "tmax")]
    pub levels: Option<i64>,
    /// Kinetic cutoff(s) in units of m c^2, comma-separated for `count`.
    #[arg(long, allow_hyphen_values = true)]
    pub tmax: Option<String>,
    /// Quantum number(s) of the sampled state: n or n1,n2,n3.
    #[arg(long)]
    pub n: Option<String>,
    /// Grid points per axis for `field`.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<i64>,
    /// Time of the field samples in units of hbar / (m c^2).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub time: f64,
    /// Sample the charge-conjugated state.
    #[arg(long)]
    pub conjugate: bool,
    /// Include the two Dirac spin polarizations in degeneracies.
    #[arg(long)]
    pub spin_counting: bool,
    /// csv or json.
    #[arg(long, default_value = "csv")]
    pub format: String,
    /// Output file (standard output if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// electron or pion: add physical box lengths.
    #[arg(long)]
    pub preset: Option<String>,
    /// Relative root tolerance.
    #[arg(long, allow_hyphen_values = true)]
    pub tol: Option<f64>,
}

/// Failure carrying the process exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct RunError {
    pub code: i32,
    pub message: String,
}

impl RunError {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Capacity { .. } => EXIT_CAPACITY,
            e if e.is_solver_failure() => EXIT_SOLVER,
            _ => EXIT_USAGE,
        };
        Self { code, message: e.to_string() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the exit code. Diagnostics go to `stderr`; output goes to the
/// `--out` file or `stdout`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    match execute(&cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}

fn execute(cmd: &Command, stdout: &mut dyn Write) -> Result<(), RunError> {
    let (opts, report) = match cmd {
        Command::Spectrum(o) => (o, cmd_spectrum(o)?),
        Command::Field(o) => (o, cmd_field(o)?),
        Command::Count(o) => (o, cmd_count(o)?),
    };
    let format = parse_format(&opts.format)?;
    let io_err = |e: std::io::Error| RunError::usage(format!("writing output: {e}"));
    match &opts.out {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| RunError::usage(format!("--out {}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            emit(&report, format, &mut w).map_err(io_err)?;
            w.flush().map_err(io_err)
        }
        None => emit(&report, format, stdout).map_err(io_err),
    }
}

fn emit(report: &Report, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
    match format {
        Format::Csv => report.write_csv(out),
        Format::Json => report.write_json(out),
    }
}

fn parse_format(s: &str) -> Result<Format, RunError> {
    match s {
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        other => Err(RunError::usage(format!("--format: expected csv or json, got '{other}'"))),
    }
}

fn parse_list(flag: &str, s: &str) -> Result<Vec<f64>, RunError> {
    let values = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| RunError::usage(format!("--{flag}: {e} in '{s}'")))?;
    if values.is_empty() || values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(RunError::usage(format!("--{flag}: values must be positive and finite, got '{s}'")));
    }
    Ok(values)
}

fn parse_models(s: &str) -> Result<(Vec<Model>, bool), RunError> {
    if s == "all" {
        return Ok((Model::ALL.to_vec(), true));
    }
    s.parse::<Model>()
        .map(|m| (vec![m], false))
        .map_err(|_| RunError::usage(format!("--model: expected kg, dirac, nonrel or all, got '{s}'")))
}

fn parse_dim(dim: usize) -> Result<usize, RunError> {
    if dim == 1 || dim == 3 {
        Ok(dim)
    } else {
        Err(RunError::usage(format!("--dim must be 1 or 3, got {dim}")))
    }
}

fn parse_preset(p: &Option<String>) -> Result<Option<Preset>, RunError> {
    p.as_deref()
        .map(|s| s.parse::<Preset>().map_err(|e| RunError::usage(format!("--preset: {e}"))))
        .transpose()
}

fn solver_config(tol: Option<f64>) -> Result<SolverConfig, RunError> {
    let mut cfg = SolverConfig::default();
    if let Some(t) = tol {
        if !(t.is_finite() && t > 0.0 && t < 1.0) {
            return Err(RunError::usage(format!("--tol must lie in (0, 1), got {t}")));
        }
        cfg.rel_tol = t;
    }
    Ok(cfg)
}

/// A box with its L_C when cubic (or 1D).
#[derive(Debug, Clone)]
struct Boxed {
    lc: Option<f64>,
    spec: BoxSpec,
}

fn parse_boxes(o: &Opts, dim: usize) -> Result<Vec<Boxed>, RunError> {
    if let Some(ls) = &o.lengths {
        let lengths = parse_list("lengths", ls)?;
        if lengths.len() != dim {
            return Err(RunError::usage(format!(
                "--lengths: {} values given for --dim {dim}",
                lengths.len()
            )));
        }
        let spec = BoxSpec::new(lengths).map_err(|e| RunError::usage(format!("--lengths: {e}")))?;
        let lc = spec.is_cubic().then(|| spec.lengths()[0]);
        return Ok(vec![Boxed { lc, spec }]);
    }
    let mut lcs = match &o.lc {
        Some(s) => parse_list("lc", s)?,
        None => DEFAULT_LCS.to_vec(),
    };
    lcs.sort_by(f64::total_cmp);
    lcs.dedup();
    lcs.into_iter()
        .map(|lc| {
            let spec = BoxSpec::new(vec![lc; dim]).map_err(|e| RunError::usage(format!("--lc: {e}")))?;
            Ok(Boxed { lc: Some(lc), spec })
        })
        .collect()
}

fn config_echo(sub: &str, o: &Opts, extra: Value) -> Value {
    let mut v = json!({
        "subcommand": sub,
        "dim": o.dim,
        "model": o.model,
        "lc": o.lc,
        "lengths": o.lengths,
        "levels": o.levels,
        "tmax": o.tmax,
        "n": o.n,
        "grid": o.grid,
        "time": o.time,
        "conjugate": o.conjugate,
        "spin_counting": o.spin_counting,
        "format": o.format,
        "preset": o.preset,
        "tol": o.tol,
    });
    if let (Value::Object(base), Value::Object(more)) = (&mut v, extra) {
        base.extend(more);
    }
    v
}

fn lc_cell(lc: Option<f64>) -> Cell {
    lc.map_or(Cell::Empty, Cell::Float)
}

fn ints(v: &[u32]) -> Cell {
    Cell::Ints(v.iter().map(|i| i64::from(*i)).collect())
}

fn level_row(dim: usize, b: &Boxed, index: usize, level: &Level) -> Vec<Cell> {
    let merged: Vec<String> = level.merged.iter().map(ToString::to_string).collect();
    vec![
        Cell::Text(level.model.tag().into()),
        Cell::Int(dim as i64),
        lc_cell(b.lc),
        Cell::Floats(b.spec.lengths().to_vec()),
        Cell::Int(index as i64),
        ints(level.qnums.indices()),
        Cell::Floats(level.wavenumbers.clone()),
        Cell::Float(level.kinetic),
        Cell::Int(i64::from(level.degeneracy)),
        Cell::Text(merged.join(" ")),
    ]
}

pub const SPECTRUM_COLUMNS: [&str; 10] = [
    "model", "dim", "lc", "lengths", "level", "qnums", "wavenumbers", "kinetic", "degeneracy", "merged",
];

/// `spectrum`: level tables per model and box.
pub fn cmd_spectrum(o: &Opts) -> Result<Report, RunError> {
    let dim = parse_dim(o.dim)?;
    let (models, all) = parse_models(&o.model)?;
    let boxes = parse_boxes(o, dim)?;
    let preset = parse_preset(&o.preset)?;
    let cfg = solver_config(o.tol)?;
    let extent = match (&o.tmax, o.levels) {
        (Some(t), _) => {
            let t = parse_list("tmax", t)?;
            if t.len() != 1 {
                return Err(RunError::usage("--tmax: spectrum takes a single cutoff"));
            }
            Extent::Cutoff(t[0])
        }
        (None, Some(k)) if k >= 1 => Extent::Count(k as usize),
        (None, Some(k)) => return Err(RunError::usage(format!("--levels must be >= 1, got {k}"))),
        (None, None) => Extent::Count(4),
    };

    let mut table = Table::new(SPECTRUM_COLUMNS);
    let all_lcs: Option<Vec<f64>> = boxes.iter().map(|b| b.lc).collect();
    match (extent, all_lcs) {
        (Extent::Count(count), Some(lcs)) if all => {
            for row in figure_table(&models, &lcs, count, dim, o.spin_counting, &cfg)? {
                let b = boxes.iter().find(|b| b.lc == Some(row.lc)).expect("row box is one of the inputs");
                table.push(level_row(dim, b, row.index, &row.level));
            }
        }
        _ => {
            for &model in &models {
                for b in &boxes {
                    let req = SpectrumRequest {
                        solver: cfg,
                        ..SpectrumRequest::new(model, b.spec.clone(), extent).with_spin_counting(o.spin_counting)
                    };
                    for (i, level) in enumerate_levels(&req)?.iter().enumerate() {
                        table.push(level_row(dim, b, i + 1, level));
                    }
                }
            }
        }
    }

    Ok(Report {
        config: config_echo("spectrum", o, json!({})),
        table: annotate_units(table, preset),
        summary: Vec::new(),
    })
}

/// `count`: cumulative state counts per model, box and cutoff.
pub fn cmd_count(o: &Opts) -> Result<Report, RunError> {
    let dim = parse_dim(o.dim)?;
    let (models, _) = parse_models(&o.model)?;
    let boxes = parse_boxes(o, dim)?;
    let preset = parse_preset(&o.preset)?;
    let cfg = solver_config(o.tol)?;
    let mut cutoffs = match &o.tmax {
        Some(t) => parse_list("tmax", t)?,
        None => return Err(RunError::usage("--tmax is required for count")),
    };
    cutoffs.sort_by(f64::total_cmp);
    cutoffs.dedup();

    let mut table = Table::new(["model", "dim", "lc", "lengths", "tmax", "spin_counting", "count"]);
    for &model in &models {
        for b in &boxes {
            for &t in &cutoffs {
                let n = count_states(model, &b.spec, t, o.spin_counting, &cfg)?;
                table.push(vec![
                    Cell::Text(model.tag().into()),
                    Cell::Int(dim as i64),
                    lc_cell(b.lc),
                    Cell::Floats(b.spec.lengths().to_vec()),
                    Cell::Float(t),
                    Cell::Int(i64::from(o.spin_counting)),
                    Cell::Int(n as i64),
                ]);
            }
        }
    }
    Ok(Report {
        config: config_echo("count", o, json!({})),
        table: annotate_units(table, preset),
        summary: Vec::new(),
    })
}

fn parse_qnums(o: &Opts, dim: usize) -> Result<QuantumNumbers, RunError> {
    let raw = o.n.clone().unwrap_or_else(|| vec!["1"; dim].join(","));
    let idx = raw
        .split(',')
        .map(|p| p.trim().parse::<u32>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| RunError::usage(format!("--n: {e} in '{raw}'")))?;
    if idx.len() != dim {
        return Err(RunError::usage(format!("--n: {} values given for --dim {dim}", idx.len())));
    }
    QuantumNumbers::new(idx).map_err(|e| RunError::usage(format!("--n: {e}")))
}

/// `field`: samples of one box eigenstate plus integral checks.
pub fn cmd_field(o: &Opts) -> Result<Report, RunError> {
    let dim = parse_dim(o.dim)?;
    let boxes = parse_boxes(o, dim)?;
    if boxes.len() != 1 {
        return Err(RunError::usage("--lc: field takes a single box size"));
    }
    let b = &boxes[0];
    let qn = parse_qnums(o, dim)?;
    let points = o.grid.unwrap_or(if dim == 1 { 201 } else { 21 });
    if points < 3 {
        return Err(RunError::usage(format!("--grid must be >= 3, got {points}")));
    }
    if !o.time.is_finite() {
        return Err(RunError::usage("--time must be finite"));
    }
    let grid = GridSpec::closed(points as usize);
    let preset = parse_preset(&o.preset)?;

    let mut state = BoxState::new(qn, b.spec.clone())?;
    if o.conjugate {
        state = conjugated_state(&state);
    }

    let mut columns: Vec<String> = if dim == 1 {
        vec!["x".into()]
    } else {
        vec!["x1".into(), "x2".into(), "x3".into()]
    };
    columns.extend(["t", "re_phi", "im_phi", "re_chi", "im_chi", "rho"].map(String::from));
    if dim == 1 {
        columns.push("j".into());
    } else {
        columns.extend(["j1", "j2", "j3"].map(String::from));
    }
    let mut table = Table::new(columns);

    let axes: Vec<Vec<f64>> = b.spec.lengths().iter().map(|l| grid.axis(*l)).collect();
    let positions: Vec<Vec<f64>> = if dim == 1 {
        axes[0].iter().map(|x| vec![*x]).collect()
    } else {
        let mut p = Vec::with_capacity(points.pow(3) as usize);
        for a in &axes[0] {
            for bb in &axes[1] {
                for c in &axes[2] {
                    p.push(vec![*a, *bb, *c]);
                }
            }
        }
        p
    };

    let mut max_current = 0.0f64;
    for pos in &positions {
        let s = state.sample(pos, o.time)?;
        let mut row: Vec<Cell> = pos.iter().map(|v| Cell::Float(*v)).collect();
        // `+ 0.0` turns -0 into +0 so wall rows print as plain zeros
        row.extend(
            [o.time, s.spinor.upper.re, s.spinor.upper.im, s.spinor.lower.re, s.spinor.lower.im, s.rho]
                .map(|v| Cell::Float(v + 0.0)),
        );
        for j in &s.current {
            max_current = max_current.max(j.abs());
            row.push(Cell::Float(j + 0.0));
        }
        table.push(row);
    }

    let summary = vec![
        ("normalization".to_string(), Cell::Float(normalization_check(&state, &grid)?)),
        ("max_abs_current".to_string(), Cell::Float(max_current)),
        ("stationarity_residual".to_string(), Cell::Float(stationarity_residual(&state, &grid)?)),
        ("energy".to_string(), Cell::Float(state.energy())),
    ];
    let extra = match preset {
        Some(p) => {
            let (lambda, unit) = p.compton_wavelength();
            json!({ "length_unit": unit, "compton_wavelength": lambda })
        }
        None => json!({}),
    };
    Ok(Report {
        config: config_echo("field", o, extra),
        table: annotate_units(table, preset),
        summary,
    })
}
