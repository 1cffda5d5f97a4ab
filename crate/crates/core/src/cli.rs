//! Batch commands behind the `quatnls` binary. Each command writes its result to `out` (or a
//! file), diagnostics to `err`, and returns the process exit code.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ConfigError, TripletFile};
use crate::linalg::{eigenvalues, matrix_det, C64};
use crate::soliton::{gauge_transform, BuildOptions, SolitonError, SolitonSolution};
use crate::triplet::{TripletError, ADMISSIBILITY_TOL};
use crate::verify::{run_suite, Level};

/// Stable exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(i32)]
pub enum Exit {
    Ok = 0,
    VerificationFailed = 1,
    NoSoliton = 2,
    Validation = 3,
    Parse = 4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Build,
    Sample,
    Verify,
    ScanSingular,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub nt: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Self { x_min: -10.0, x_max: 10.0, nx: 201, t_min: 0.0, t_max: 0.0, nt: 1 }
    }
}

impl Grid {
    pub fn validate(&self) -> Result<(), String> {
        if self.nx == 0 || self.nt == 0 {
            return Err("grids must be nonempty".into());
        }
        if !(self.x_min < self.x_max) {
            return Err("x_min must be below x_max".into());
        }
        if !(self.t_min <= self.t_max) || (self.nt > 1 && self.t_min == self.t_max) {
            return Err("t_min must be below t_max".into());
        }
        Ok(())
    }

    fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        if n == 1 {
            return vec![lo];
        }
        (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
    }

    pub fn xs(&self) -> Vec<f64> {
        Self::axis(self.x_min, self.x_max, self.nx)
    }

    pub fn ts(&self) -> Vec<f64> {
        Self::axis(self.t_min, self.t_max, self.nt)
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input: PathBuf,
    pub command: Command,
    pub grid: Grid,
    /// Time of the singular-locus scan.
    pub t: f64,
    pub level: Level,
    /// Relative tolerance for admissibility and compatibility.
    pub tol: Option<f64>,
    pub output: Option<PathBuf>,
    /// Negative control: scale `P_r` by this factor before verifying.
    pub corrupt_p_r: Option<f64>,
}

impl RunConfig {
    pub fn new(command: Command, input: impl Into<PathBuf>) -> Self {
        Self {
            input: input.into(),
            command,
            grid: Grid::default(),
            t: 0.0,
            level: Level::Fast,
            tol: None,
            output: None,
            corrupt_p_r: None,
        }
    }

    fn options(&self, strict: bool) -> BuildOptions {
        let base = if strict { BuildOptions::default() } else { BuildOptions::lenient() };
        BuildOptions { tol: self.tol.unwrap_or(ADMISSIBILITY_TOL), ..base }
    }
}

/// Maps a construction failure to its exit code.
pub fn exit_for(e: &SolitonError) -> Exit {
    match e {
        SolitonError::Triplet(TripletError::NoSoliton { .. }) => Exit::NoSoliton,
        _ => Exit::Validation,
    }
}

fn load(cfg: &RunConfig, strict: bool, err: &mut dyn Write) -> Result<SolitonSolution, Exit> {
    let triplet = TripletFile::load(&cfg.input).and_then(|f| f.to_triplet()).map_err(|e| {
        let _ = writeln!(err, "error: {e}");
        match e {
            ConfigError::Triplet(_) => Exit::Validation,
            _ => Exit::Parse,
        }
    })?;
    SolitonSolution::build_with(triplet, cfg.options(strict)).map_err(|e| {
        let code = exit_for(&e);
        let _ = match code {
            Exit::NoSoliton => writeln!(err, "error: {e}"),
            _ => writeln!(err, "error: validation failed: {e}"),
        };
        code
    })
}

fn emit(cfg: &RunConfig, text: &str, out: &mut dyn Write, err: &mut dyn Write) -> Exit {
    let res = match &cfg.output {
        Some(p) => std::fs::write(p, text),
        None => out.write_all(text.as_bytes()),
    };
    match res {
        Ok(()) => Exit::Ok,
        Err(e) => {
            let _ = writeln!(err, "error: cannot write output: {e}");
            Exit::Validation
        }
    }
}

/// Summary printed by `build`; complex numbers are `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BuildSummary {
    pub p: usize,
    pub mu: f64,
    pub q_r: [f64; 2],
    pub q_l: [f64; 2],
    pub theta_l: f64,
    pub det_p_r: [f64; 2],
    pub spectrum_a: Vec<[f64; 2]>,
    pub controllability_rank: usize,
    pub observability_rank: usize,
    pub compatibility_defect: f64,
    pub generator_residual: f64,
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

impl BuildSummary {
    pub fn of(sol: &SolitonSolution) -> Result<Self, SolitonError> {
        let mut spec = eigenvalues(&sol.cfg().a)?;
        spec.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let m = sol.minimality();
        Ok(Self {
            p: sol.cfg().p(),
            mu: sol.mu(),
            q_r: pair(sol.q_r()),
            q_l: pair(sol.q_l()),
            theta_l: sol.theta_l(),
            det_p_r: pair(matrix_det(sol.p_r())?),
            spectrum_a: spec.into_iter().map(pair).collect(),
            controllability_rank: m.controllability_rank,
            observability_rank: m.observability_rank,
            compatibility_defect: sol.compatibility_defect(),
            generator_residual: sol.generator_residual(),
        })
    }
}

pub fn cmd_build(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Exit {
    let sol = match load(cfg, true, err) {
        Ok(s) => s,
        Err(code) => return code,
    };
    match BuildSummary::of(&sol) {
        Ok(s) => emit(cfg, &(serde_json::to_string_pretty(&s).expect("plain data") + "\n"), out, err),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            Exit::Validation
        }
    }
}

pub const CSV_HEADER: &str = "x,t,re_q,im_q,abs_q,re_qtilde,im_qtilde";

/// CSV of `q` and its gauge transform on the grid, `t` outermost. Singular points are written as
/// `nan`; their count is returned alongside.
pub fn sample_csv(sol: &SolitonSolution, grid: &Grid) -> (String, usize) {
    let xs = grid.xs();
    let pts: Vec<(f64, f64)> = grid.ts().into_iter().flat_map(|t| xs.iter().map(move |&x| (x, t))).collect();
    let vals: Vec<Option<C64>> = pts.par_iter().map(|&(x, t)| sol.eval_q(x, t).ok()).collect();
    let mut s = String::with_capacity(64 * pts.len());
    s.push_str(CSV_HEADER);
    s.push('\n');
    let mut bad = 0;
    for (&(x, t), v) in pts.iter().zip(&vals) {
        match v {
            Some(q) => {
                let g = gauge_transform(*q, t, sol.mu());
                let _ = writeln!(s, "{x},{t},{},{},{},{},{}", q.re, q.im, q.norm(), g.re, g.im);
            }
            None => {
                bad += 1;
                let _ = writeln!(s, "{x},{t},nan,nan,nan,nan,nan");
            }
        }
    }
    (s, bad)
}

pub fn cmd_sample(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Exit {
    if let Err(m) = cfg.grid.validate() {
        let _ = writeln!(err, "error: {m}");
        return Exit::Parse;
    }
    let sol = match load(cfg, false, err) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let (csv, bad) = sample_csv(&sol, &cfg.grid);
    if bad > 0 {
        let _ = writeln!(err, "warning: {bad} singular grid points written as nan");
    }
    emit(cfg, &csv, out, err)
}

pub fn cmd_verify(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Exit {
    let mut sol = match load(cfg, true, err) {
        Ok(s) => s,
        Err(code) => return code,
    };
    if let Some(f) = cfg.corrupt_p_r {
        sol = sol.with_corrupted_p_r(f);
    }
    let report = run_suite(&sol, cfg.level);
    for c in report.checks.iter().filter(|c| !c.pass) {
        let _ = writeln!(err, "FAIL {}: {:e} (tolerance {:e})", c.name, c.residual, c.tolerance);
    }
    match emit(cfg, &(report.to_json() + "\n"), out, err) {
        Exit::Ok if report.pass => Exit::Ok,
        Exit::Ok => Exit::VerificationFailed,
        other => other,
    }
}

pub fn cmd_scan_singular(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Exit {
    if let Err(m) = cfg.grid.validate() {
        let _ = writeln!(err, "error: {m}");
        return Exit::Parse;
    }
    if cfg.grid.nx < 2 {
        let _ = writeln!(err, "error: scan needs at least two x samples");
        return Exit::Parse;
    }
    let sol = match load(cfg, false, err) {
        Ok(s) => s,
        Err(code) => return code,
    };
    match sol.singular_locus(cfg.t, (cfg.grid.x_min, cfg.grid.x_max), cfg.grid.nx) {
        Ok(r) => emit(cfg, &(serde_json::to_string_pretty(&r).expect("plain data") + "\n"), out, err),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            Exit::Validation
        }
    }
}

pub fn run(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Exit {
    match cfg.command {
        Command::Build => cmd_build(cfg, out, err),
        Command::Sample => cmd_sample(cfg, out, err),
        Command::Verify => cmd_verify(cfg, out, err),
        Command::ScanSingular => cmd_scan_singular(cfg, out, err),
    }
}

/// Caps the global rayon pool at `QUATNLS_THREADS` when set.
pub fn init_threads() {
    if let Some(n) = std::env::var("QUATNLS_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}
