//! Command-line front end. [`run`] takes the argument list and returns the
//! process exit code, so the binary is a one-liner and tests can drive it
//! in-process.
//!
//! Exit codes: 0 success, 2 configuration error, 3 solver failure,
//! 4 checks ran but reported violations.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use faer::c64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::baseflow::{extrema, make_profile, BaseFlow, ProfileSpec};
use crate::bounds::{
    evaluate_all, wave_speed_interval, BoundsReport, EvaluateOptions, Policy, BEAM_CONSTANT,
    BEAM_CONSTANT_PRECISE, BOUND_SLACK, IDENTITY_TOL,
};
use crate::eigensolve::{solve_filtered, Cutoffs, EigenSolution};
use crate::error::{Error, Result};
use crate::params::{classical_limit, MicropolarParams};
use crate::pencil::{assemble, classical_pencil, EigenProblem};
use crate::regionscan::{
    classify, curves_with, fmt_f64, linspace, write_region_csv, ClassifyOptions, CurveTable,
    RegionGrid, RegionPoint,
};
use crate::spectral::SpectralOperator;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_VIOLATIONS: i32 = 4;

/// Environment variable capping the worker-thread count.
pub const THREADS_ENV: &str = "MOS_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum PolicyArg {
    AsStated,
    Conservative,
}

impl From<PolicyArg> for Policy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::AsStated => Policy::AsStated,
            PolicyArg::Conservative => Policy::Conservative,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Classical {
    pub reynolds: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Range {
    fn values(&self, what: &str) -> Result<Vec<f64>> {
        if self.count == 0 {
            return Err(Error::Config(format!("{what}: empty range")));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min <= self.max) {
            return Err(Error::Config(format!("{what}: need min <= max")));
        }
        Ok(linspace(self.min, self.max, self.count))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    #[serde(flatten)]
    pub cutoffs: Cutoffs,
    pub identity_tol: f64,
    pub bound_slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { cutoffs: Cutoffs::default(), identity_tol: IDENTITY_TOL, bound_slack: BOUND_SLACK }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegionConfig {
    /// Threshold curves over this wave-number range.
    pub curves: Option<Range>,
    /// Classification grid: wave numbers come from the run's alphas.
    pub reynolds: Option<Range>,
    pub with_spectrum: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
    pub format: Format,
}

fn default_n() -> usize {
    100
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub profile: ProfileSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<MicropolarParams>,
    /// Classical Orr-Sommerfeld limit in channel units (half-gap, centreline velocity).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classical: Option<Classical>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_range: Option<Range>,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub policy: Policy,
    #[serde(default)]
    pub precise_beam_constant: bool,
    #[serde(default)]
    pub with_spectrum: bool,
    #[serde(default)]
    pub region: RegionConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.params, &self.classical) {
            (Some(p), None) => p.validate()?,
            (None, Some(c)) => {
                classical_limit(c.reynolds)?;
            }
            (None, None) => return Err(Error::Config("one of `params` or `classical` is required".into())),
            (Some(_), Some(_)) => {
                return Err(Error::Config("`params` and `classical` are mutually exclusive".into()))
            }
        }
        if self.n < 16 {
            return Err(Error::GridTooSmall(self.n));
        }
        let alphas = self.alpha_values()?;
        if let Some(a) = alphas.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
            return Err(Error::InvalidWaveNumber(*a));
        }
        self.flow()?;
        Ok(())
    }

    pub fn alpha_values(&self) -> Result<Vec<f64>> {
        let v = match (&self.alphas, &self.alpha_range) {
            (Some(v), None) => v.clone(),
            (None, Some(r)) => r.values("alpha_range")?,
            (None, None) => return Err(Error::Config("one of `alphas` or `alpha_range` is required".into())),
            (Some(_), Some(_)) => {
                return Err(Error::Config("`alphas` and `alpha_range` are mutually exclusive".into()))
            }
        };
        if v.is_empty() {
            return Err(Error::Config("no wave numbers given".into()));
        }
        Ok(v)
    }

    pub fn flow(&self) -> Result<BaseFlow> {
        make_profile(&self.profile)
    }

    pub fn beam(&self) -> f64 {
        if self.precise_beam_constant {
            BEAM_CONSTANT_PRECISE
        } else {
            BEAM_CONSTANT
        }
    }

    /// Parameters and wave number that enter the pencil for a configured `alpha`.
    pub fn pencil_inputs(&self, alpha: f64) -> Result<(f64, MicropolarParams)> {
        match (&self.params, &self.classical) {
            (Some(p), _) => Ok((alpha, *p)),
            (None, Some(c)) => Ok((2.0 * alpha, classical_limit(2.0 * c.reynolds)?)),
            (None, None) => Err(Error::Config("missing params".into())),
        }
    }

    fn problem(&self, alpha: f64, flow: &BaseFlow, op: Arc<SpectralOperator>) -> Result<EigenProblem> {
        match &self.classical {
            Some(c) => classical_pencil(alpha, c.reynolds, flow, op),
            None => {
                let (a, p) = self.pencil_inputs(alpha)?;
                assemble(a, &p, flow, op)
            }
        }
    }

    pub fn evaluate_options(&self) -> EvaluateOptions {
        EvaluateOptions {
            policy: self.policy,
            beam: self.beam(),
            identity_tol: self.tolerances.identity_tol,
            bound_slack: self.tolerances.bound_slack,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "mos", version, about = "Linear stability of micropolar channel flows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug, Clone)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Chebyshev grid order.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_enum)]
    policy: Option<PolicyArg>,
    #[arg(long)]
    with_spectrum: bool,
    /// Shift every computed wave speed before the checks (testing only).
    #[arg(long, hide = true)]
    corrupt: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Retained eigenvalues per wave number.
    Spectrum(Common),
    /// Identities, growth bound, certificate and wave-speed interval checks.
    Verify(Common),
    /// Threshold curves and certificate/spectrum classification grid.
    Region(Common),
    /// Wave-speed intervals, optionally checked against computed spectra.
    Wavespeed(Common),
}

enum Failure {
    Config(String),
    Solver(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Solver(_) => EXIT_SOLVER,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Solver(m) => m,
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> Failure {
    Failure::Config(e.to_string())
}

fn solver_err(e: impl std::fmt::Display) -> Failure {
    Failure::Solver(e.to_string())
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(t) if t > 0 => Some(t),
            _ => {
                eprintln!("error: {THREADS_ENV} must be a positive integer, got `{v}`");
                return EXIT_CONFIG;
            }
        },
        Err(_) => None,
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return EXIT_SOLVER;
        }
    };
    match pool.install(|| dispatch(cli.command)) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.code()
        }
    }
}

fn resolve(common: &Common) -> std::result::Result<RunConfig, Failure> {
    let mut cfg = RunConfig::load(&common.config).map_err(config_err)?;
    if let Some(n) = common.n {
        cfg.n = n;
    }
    if let Some(p) = common.policy {
        cfg.policy = p.into();
    }
    if let Some(f) = common.format {
        cfg.output.format = f;
    }
    if let Some(o) = &common.out {
        cfg.output.path = Some(o.clone());
    }
    if common.with_spectrum {
        cfg.with_spectrum = true;
        cfg.region.with_spectrum = true;
    }
    cfg.validate().map_err(config_err)?;
    Ok(cfg)
}

fn dispatch(command: Command) -> std::result::Result<i32, Failure> {
    let (common, kind) = match &command {
        Command::Spectrum(c) => (c, "spectrum"),
        Command::Verify(c) => (c, "verify"),
        Command::Region(c) => (c, "region"),
        Command::Wavespeed(c) => (c, "wavespeed"),
    };
    let cfg = resolve(common)?;
    let (body, code) = match kind {
        "spectrum" => cmd_spectrum(&cfg)?,
        "verify" => cmd_verify(&cfg, common.corrupt)?,
        "region" => cmd_region(&cfg)?,
        _ => cmd_wavespeed(&cfg)?,
    };
    emit(&cfg, &body).map_err(solver_err)?;
    Ok(code)
}

fn emit(cfg: &RunConfig, body: &str) -> std::io::Result<()> {
    match &cfg.output.path {
        Some(p) => fs::write(p, body),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())?;
            out.flush()
        }
    }
}

fn config_json(cfg: &RunConfig) -> String {
    serde_json::to_string(cfg).expect("config serializes")
}

fn csv_header(cfg: &RunConfig) -> String {
    format!("# config: {}\n", config_json(cfg))
}

fn json_body(cfg: &RunConfig, key: &str, value: serde_json::Value) -> String {
    let mut doc = json!({ "config": cfg });
    doc[key] = value;
    let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
    s.push('\n');
    s
}

fn solve_alpha(
    cfg: &RunConfig,
    alpha: f64,
    flow: &BaseFlow,
    op: &Arc<SpectralOperator>,
) -> std::result::Result<EigenSolution, Failure> {
    let problem = cfg.problem(alpha, flow, op.clone()).map_err(|e| match e {
        Error::InvalidWaveNumber(_) | Error::InvalidParameter { .. } => config_err(e),
        other => solver_err(other),
    })?;
    solve_filtered(&problem, &cfg.tolerances.cutoffs).map_err(solver_err)
}

fn solve_all(
    cfg: &RunConfig,
    alphas: &[f64],
    flow: &BaseFlow,
) -> std::result::Result<(Arc<SpectralOperator>, Vec<EigenSolution>), Failure> {
    use rayon::prelude::*;
    let op = Arc::new(SpectralOperator::build(cfg.n).map_err(config_err)?);
    let sols = alphas
        .par_iter()
        .map(|&a| solve_alpha(cfg, a, flow, &op))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok((op, sols))
}

#[derive(Serialize)]
struct SpectrumRecord {
    alpha: f64,
    params: MicropolarParams,
    c_r: f64,
    c_i: f64,
    residual: f64,
    bc_error: f64,
    converged: Option<bool>,
}

fn cmd_spectrum(cfg: &RunConfig) -> std::result::Result<(String, i32), Failure> {
    let flow = cfg.flow().map_err(config_err)?;
    let alphas = cfg.alpha_values().map_err(config_err)?;
    let (_, sols) = solve_all(cfg, &alphas, &flow)?;
    let checked = cfg.tolerances.cutoffs.refine_order.is_some();
    let mut records = Vec::new();
    for (&alpha, sol) in alphas.iter().zip(&sols) {
        for m in &sol.modes {
            records.push(SpectrumRecord {
                alpha,
                params: sol.problem.params,
                c_r: m.c.re,
                c_i: m.c.im,
                residual: m.residual,
                bc_error: m.bc_error,
                converged: checked.then_some(m.converged),
            });
        }
    }
    let body = match cfg.output.format {
        Format::Json => json_body(cfg, "modes", serde_json::to_value(&records).expect("serializes")),
        Format::Csv => {
            let mut s = csv_header(cfg);
            s.push_str("alpha,r0,rk,rmu,rnu,rgamma,c_r,c_i,residual,bc_error,converged\n");
            for r in &records {
                let p = &r.params;
                let conv = r.converged.map(|b| b.to_string()).unwrap_or_default();
                let cells = [r.alpha, p.r0, p.rk, p.rmu, p.rnu, p.rgamma, r.c_r, r.c_i, r.residual, r.bc_error];
                let nums: Vec<String> = cells.iter().map(|v| fmt_f64(*v)).collect();
                writeln!(s, "{},{conv}", nums.join(",")).expect("string write");
            }
            s
        }
    };
    Ok((body, EXIT_OK))
}

/// With a refinement grid configured, checks only see modes that converged.
fn trusted(cfg: &RunConfig, mut sols: Vec<EigenSolution>) -> Vec<EigenSolution> {
    if cfg.tolerances.cutoffs.refine_order.is_some() {
        for s in &mut sols {
            s.modes.retain(|m| m.converged);
        }
    }
    sols
}

fn corrupt(sol: &mut EigenSolution, shift: f64) {
    for m in &mut sol.modes {
        m.c += c64::new(shift, shift);
    }
}

fn cmd_verify(cfg: &RunConfig, corruption: Option<f64>) -> std::result::Result<(String, i32), Failure> {
    let flow = cfg.flow().map_err(config_err)?;
    let alphas = cfg.alpha_values().map_err(config_err)?;
    let (op, sols) = solve_all(cfg, &alphas, &flow)?;
    let mut sols = trusted(cfg, sols);
    if let Some(shift) = corruption {
        sols.iter_mut().for_each(|s| corrupt(s, shift));
    }
    let opts = cfg.evaluate_options();
    let reports: Vec<BoundsReport> = sols
        .iter()
        .map(|sol| evaluate_all(sol, &flow, &sol.problem.params, &op, &opts))
        .collect::<Result<_>>()
        .map_err(solver_err)?;
    let violations: usize = reports.iter().map(|r| r.violations.len()).sum();
    let code = if violations == 0 { EXIT_OK } else { EXIT_VIOLATIONS };
    let body = match cfg.output.format {
        Format::Json => {
            let v = json!({ "alphas": alphas, "passed": violations == 0, "reports": reports });
            json_body(cfg, "verify", v)
        }
        Format::Csv => {
            let mut s = csv_header(cfg);
            s.push_str(
                "alpha,modes,max_ci,theorem1_bound,certified,interval_lower,interval_upper,case,worst_identity_ci,worst_identity_cr,violations\n",
            );
            for (&alpha, r) in alphas.iter().zip(&reports) {
                let worst_ci = r.identities.iter().map(|i| i.rel_err_ci).fold(0.0, f64::max);
                let worst_cr = r.identities.iter().map(|i| i.rel_err_cr).fold(0.0, f64::max);
                writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    fmt_f64(alpha),
                    r.identities.len(),
                    r.max_ci.map(fmt_f64).unwrap_or_default(),
                    r.theorem1_bound.map(fmt_f64).unwrap_or_else(|| "skipped".into()),
                    r.stability_certified,
                    fmt_f64(r.interval.lower),
                    fmt_f64(r.interval.upper),
                    r.interval.case_label,
                    fmt_f64(worst_ci),
                    fmt_f64(worst_cr),
                    r.violations.len()
                )
                .expect("string write");
            }
            s
        }
    };
    if code != EXIT_OK {
        for (&alpha, r) in alphas.iter().zip(&reports) {
            for v in &r.violations {
                eprintln!("violation at alpha = {alpha}: {} (mode {:?}, slack {:e})", v.check, v.mode_index, v.slack);
            }
        }
    }
    Ok((body, code))
}

fn cmd_region(cfg: &RunConfig) -> std::result::Result<(String, i32), Failure> {
    let region = &cfg.region;
    if region.curves.is_none() && region.reynolds.is_none() {
        return Err(Failure::Config("region needs `curves` and/or `reynolds`".into()));
    }
    let table: Option<CurveTable> = match &region.curves {
        Some(r) => Some(curves_with(r.min, r.max, r.count, cfg.beam()).map_err(config_err)?),
        None => None,
    };
    let points: Option<Vec<RegionPoint>> = match &region.reynolds {
        Some(r) => {
            let params = match (&cfg.params, &cfg.classical) {
                (Some(p), _) => *p,
                _ => return Err(Failure::Config("region classification needs `params`".into())),
            };
            let grid = RegionGrid { alphas: cfg.alpha_values().map_err(config_err)?, reynolds: r.values("region.reynolds").map_err(config_err)? };
            let opts = ClassifyOptions {
                policy: cfg.policy,
                beam: cfg.beam(),
                with_spectrum: region.with_spectrum,
                n: cfg.n,
                cutoffs: cfg.tolerances.cutoffs,
                stable_tol: cfg.tolerances.bound_slack,
            };
            let flow = cfg.flow().map_err(config_err)?;
            Some(classify(&grid, &params, &flow, &opts).map_err(|e| match e {
                Error::NotApplicable { .. } | Error::InvalidRange(_) | Error::InvalidWaveNumber(_) => config_err(e),
                other => solver_err(other),
            })?)
        }
        None => None,
    };
    let unsound = points
        .iter()
        .flatten()
        .any(|p| p.certified && p.spectrum_stable == Some(false));
    let code = if unsound { EXIT_VIOLATIONS } else { EXIT_OK };
    let body = match cfg.output.format {
        Format::Json => json_body(cfg, "region", json!({ "curves": table, "points": points })),
        Format::Csv => {
            let mut buf = csv_header(cfg).into_bytes();
            if let Some(t) = &table {
                if points.is_some() {
                    buf.extend_from_slice(b"# curves\n");
                }
                t.write_csv(&mut buf).map_err(solver_err)?;
            }
            if let Some(p) = &points {
                if table.is_some() {
                    buf.extend_from_slice(b"# points\n");
                }
                write_region_csv(p, &mut buf).map_err(solver_err)?;
            }
            String::from_utf8(buf).expect("ascii output")
        }
    };
    Ok((body, code))
}

#[derive(Serialize)]
struct WaveSpeedRecord {
    alpha: f64,
    case_label: char,
    cases: String,
    lower: f64,
    upper: f64,
    cr_min: Option<f64>,
    cr_max: Option<f64>,
    inside: Option<bool>,
}

fn cmd_wavespeed(cfg: &RunConfig) -> std::result::Result<(String, i32), Failure> {
    let flow = cfg.flow().map_err(config_err)?;
    let ext = extrema(&flow);
    let alphas = cfg.alpha_values().map_err(config_err)?;
    let sols = if cfg.with_spectrum { Some(trusted(cfg, solve_all(cfg, &alphas, &flow)?.1)) } else { None };
    let slack = cfg.tolerances.bound_slack;
    let mut records = Vec::with_capacity(alphas.len());
    for (k, &alpha) in alphas.iter().enumerate() {
        // wave speeds are invariant under the channel rescaling; the interval
        // must use the wave number the pencil saw
        let (pencil_alpha, _) = cfg.pencil_inputs(alpha).map_err(config_err)?;
        let iv = wave_speed_interval(pencil_alpha, &ext).map_err(config_err)?;
        let mut rec = WaveSpeedRecord {
            alpha,
            case_label: iv.case_label,
            cases: iv.cases.iter().map(|c| c.label()).collect(),
            lower: iv.lower,
            upper: iv.upper,
            cr_min: None,
            cr_max: None,
            inside: None,
        };
        if let Some(sols) = &sols {
            let crs: Vec<f64> = sols[k].modes.iter().map(|m| m.c.re).collect();
            rec.cr_min = crs.iter().copied().min_by(f64::total_cmp);
            rec.cr_max = crs.iter().copied().max_by(f64::total_cmp);
            rec.inside = Some(crs.iter().all(|&c| iv.contains(c, slack)));
        }
        records.push(rec);
    }
    let code = if records.iter().any(|r| r.inside == Some(false)) { EXIT_VIOLATIONS } else { EXIT_OK };
    let body = match cfg.output.format {
        Format::Json => json_body(cfg, "intervals", serde_json::to_value(&records).expect("serializes")),
        Format::Csv => {
            let mut s = csv_header(cfg);
            s.push_str("alpha,case,cases,lower,upper,cr_min,cr_max,inside\n");
            for r in &records {
                writeln!(
                    s,
                    "{},{},{},{},{},{},{},{}",
                    fmt_f64(r.alpha),
                    r.case_label,
                    r.cases,
                    fmt_f64(r.lower),
                    fmt_f64(r.upper),
                    r.cr_min.map(fmt_f64).unwrap_or_default(),
                    r.cr_max.map(fmt_f64).unwrap_or_default(),
                    r.inside.map(|b| b.to_string()).unwrap_or_default()
                )
                .expect("string write");
            }
            s
        }
    };
    Ok((body, code))
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{"profile": "couette", "params": {"r0": 0.8, "rk": 10, "rmu": 1, "rnu": 15, "rgamma": 1}, "alphas": [1.0]}"#;

    #[test]
    fn parses_minimal_config() {
        let cfg = RunConfig::from_json(BASE).unwrap();
        assert_eq!(cfg.n, 100);
        assert_eq!(cfg.policy, Policy::Conservative);
        assert_eq!(cfg.output.format, Format::Csv);
        assert_eq!(cfg.tolerances.cutoffs, Cutoffs::default());
    }

    #[test]
    fn rejects_bad_configs() {
        for bad in [
            r#"{"profile": "couette", "alphas": [1.0]}"#,
            r#"{"profile": "couette", "classical": {"reynolds": 100}, "params": {"r0": 1, "rk": 1, "rmu": 1, "rnu": 1, "rgamma": 1}, "alphas": [1.0]}"#,
            r#"{"profile": "couette", "classical": {"reynolds": 100}, "alphas": []}"#,
            r#"{"profile": "couette", "classical": {"reynolds": 100}, "alphas": [-1.0]}"#,
            r#"{"profile": "couette", "classical": {"reynolds": 100}, "alphas": [1.0], "n": 8}"#,
            r#"{"profile": "wobbly", "classical": {"reynolds": 100}, "alphas": [1.0]}"#,
            r#"{"profile": "couette", "classical": {"reynolds": 100}, "alpha_range": {"min": 0.1, "max": 5, "count": 0}}"#,
            r#"{"profile": "couette", "classical": {"reynolds": 100}, "alphas": [1.0], "typo": 1}"#,
        ] {
            assert!(RunConfig::from_json(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn alpha_range_expands() {
        let cfg = RunConfig::from_json(
            r#"{"profile": {"u": [0, 1], "w": [0]}, "classical": {"reynolds": 100}, "alpha_range": {"min": 0.1, "max": 5, "count": 100}}"#,
        )
        .unwrap();
        let a = cfg.alpha_values().unwrap();
        assert_eq!(a.len(), 100);
        assert_eq!((a[0], a[99]), (0.1, 5.0));
    }

    #[test]
    fn classical_inputs_are_rescaled() {
        let cfg = RunConfig::from_json(
            r#"{"profile": "poiseuille", "classical": {"reynolds": 1e4}, "alphas": [1.0]}"#,
        )
        .unwrap();
        let (a, p) = cfg.pencil_inputs(1.0).unwrap();
        assert_eq!(a, 2.0);
        assert!((p.viscous() - 0.5e-4).abs() < 1e-18);
    }

    #[test]
    fn config_round_trips() {
        let cfg = RunConfig::from_json(BASE).unwrap();
        let back = RunConfig::from_json(&config_json(&cfg)).unwrap();
        assert_eq!(cfg, back);
    }
}
