//! Run configuration and deterministic CSV/JSON emitters for the `mh` tool.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functional::{energy_parametric, KernelSpec};
use crate::info::EntropyReport;
use crate::model::{derive_frequencies, exact_energy, hartree_fock, EnergyBreakdown, ModelParams};
use crate::numeric::{linspace, logspace};
use crate::solver::{
    find_crossing, scaling_exponent, solve_xi_p, StationaritySolution, SweepRecord, DEFAULT_ROOT_TOL,
};
use crate::spectral::DEFAULT_TRUNCATION_TOL;

/// Environment variable capping the worker-thread count.
pub const THREADS_ENV: &str = "MH_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

/// `start:stop:count[:log]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl LambdaGrid {
    pub fn linear(start: f64, stop: f64, count: usize) -> Self {
        Self {
            start,
            stop,
            count,
            spacing: Spacing::Linear,
        }
    }

    pub fn points(&self) -> Vec<f64> {
        match self.spacing {
            Spacing::Linear => linspace(self.start, self.stop, self.count),
            Spacing::Log => logspace(self.start, self.stop, self.count),
        }
    }
}

impl FromStr for LambdaGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("lambda grid `{s}` is not start:stop:count[:log]"));
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(bad());
        }
        let start: f64 = parts[0].parse().map_err(|_| bad())?;
        let stop: f64 = parts[1].parse().map_err(|_| bad())?;
        let count: usize = parts[2].parse().map_err(|_| bad())?;
        let spacing = match parts.get(3) {
            None | Some(&"lin") | Some(&"linear") => Spacing::Linear,
            Some(&"log") => Spacing::Log,
            Some(_) => return Err(bad()),
        };
        if count < 2 {
            return Err(Error::Config(format!("lambda grid needs at least 2 points, got {count}")));
        }
        if !(start.is_finite() && stop.is_finite()) || stop <= start {
            return Err(Error::Config(format!("lambda grid bounds {start}..{stop} are not increasing")));
        }
        if spacing == Spacing::Log && start <= 0.0 {
            return Err(Error::Config("log-spaced lambda grid needs start > 0".into()));
        }
        Ok(Self {
            start,
            stop,
            count,
            spacing,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!("unknown format `{other}` (csv|json)"))),
        }
    }
}

/// Settings that may come from a `key = value` file; command-line flags
/// override whatever the file sets.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    pub omega0: Option<f64>,
    pub lambda: Option<f64>,
    pub lambda_grid: Option<LambdaGrid>,
    pub q: Option<Vec<f64>>,
    pub tol_root: Option<f64>,
    pub tol_trunc: Option<f64>,
    pub format: Option<OutputFormat>,
    pub out: Option<String>,
}

impl FromStr for ConfigFile {
    type Err = Error;

    /// Blank lines and `#` comments are ignored. `q` takes a comma-separated list.
    fn from_str(text: &str) -> Result<Self> {
        let mut cfg = ConfigFile::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let num = |v: &str| -> Result<f64> {
                v.parse()
                    .map_err(|_| Error::Config(format!("line {}: `{v}` is not a number", lineno + 1)))
            };
            match key.replace('_', "-").as_str() {
                "omega0" => cfg.omega0 = Some(num(value)?),
                "lambda" => cfg.lambda = Some(num(value)?),
                "lambda-grid" => cfg.lambda_grid = Some(value.parse()?),
                "q" => cfg.q = Some(value.split(',').map(|v| num(v.trim())).collect::<Result<_>>()?),
                "tol-root" => cfg.tol_root = Some(num(value)?),
                "tol-trunc" => cfg.tol_trunc = Some(num(value)?),
                "format" => cfg.format = Some(value.parse()?),
                "out" => cfg.out = Some(value.to_string()),
                other => return Err(Error::Config(format!("line {}: unknown key `{other}`", lineno + 1))),
            }
        }
        Ok(cfg)
    }
}

/// Fully resolved settings for one `mh` invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub omega0: f64,
    pub lambda: Option<f64>,
    pub lambda_grid: Option<LambdaGrid>,
    pub q: Vec<f64>,
    pub tol_root: f64,
    pub tol_trunc: f64,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    /// Layers `flags` over `file` and fills in defaults.
    pub fn resolve(flags: ConfigFile, file: ConfigFile) -> Result<Self> {
        let cfg = Self {
            omega0: flags.omega0.or(file.omega0).unwrap_or(1.0),
            lambda: flags.lambda.or(file.lambda),
            lambda_grid: flags.lambda_grid.or(file.lambda_grid),
            q: flags.q.filter(|q| !q.is_empty()).or(file.q).unwrap_or_default(),
            tol_root: flags.tol_root.or(file.tol_root).unwrap_or(DEFAULT_ROOT_TOL),
            tol_trunc: flags.tol_trunc.or(file.tol_trunc).unwrap_or(DEFAULT_TRUNCATION_TOL),
            format: flags.format.or(file.format).unwrap_or(OutputFormat::Csv),
            out: flags.out.or(file.out).map(PathBuf::from),
        };
        for (name, v) in [("omega0", cfg.omega0), ("tol-root", cfg.tol_root), ("tol-trunc", cfg.tol_trunc)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(cfg)
    }

    pub fn base_params(&self) -> Result<ModelParams> {
        ModelParams::new(self.omega0, 0.0)
    }

    /// The grid if given, else the single coupling, else `fallback`.
    pub fn lambdas_or(&self, fallback: Option<LambdaGrid>) -> Result<Vec<f64>> {
        match (self.lambda_grid, self.lambda, fallback) {
            (Some(g), _, _) => Ok(g.points()),
            (None, Some(l), _) => Ok(vec![l]),
            (None, None, Some(g)) => Ok(g.points()),
            _ => Err(Error::Config("pass --lambda or --lambda-grid".into())),
        }
    }

    pub fn qs_or(&self, fallback: &[f64]) -> Vec<f64> {
        if self.q.is_empty() {
            fallback.to_vec()
        } else {
            self.q.clone()
        }
    }
}

/// 17 significant digits, enough to round-trip any double.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub const SWEEP_HEADER: &str =
    "lambda,q,xi,xi_p,ratio,e_p,e_ex,purity,linear_entropy,exact_linear_entropy,dual_lambda,dual_linear_entropy,error";

pub fn sweep_csv(rows: &[SweepRecord]) -> String {
    let mut out = String::new();
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        let nums = [
            r.lambda,
            r.q,
            r.xi,
            r.xi_p,
            r.ratio,
            r.e_p,
            r.e_ex,
            r.purity,
            r.linear_entropy,
            r.exact_linear_entropy,
            r.dual_lambda,
            r.dual_linear_entropy,
        ];
        let fields: Vec<String> = nums.iter().map(|&v| fmt_num(v)).collect();
        let _ = writeln!(
            out,
            "{},{}",
            fields.join(","),
            csv_field(r.error.as_deref().unwrap_or(""))
        );
    }
    out
}

pub fn sweep_json(rows: &[SweepRecord]) -> Result<String> {
    to_json(&rows)
}

fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Config(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub const FIGURE1_HEADER: &str = "lambda,xi,xi_p_q04,R_q04,xi_p_q03,R_q03";
const ERROR_MARK: &str = "ERR";

/// One row of the ratio dataset for q = 0.4 and q = 0.3.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Figure1Row {
    pub lambda: f64,
    pub xi: Option<f64>,
    pub xi_p_q04: Option<f64>,
    pub r_q04: Option<f64>,
    pub xi_p_q03: Option<f64>,
    pub r_q03: Option<f64>,
}

impl Figure1Row {
    pub fn is_ok(&self) -> bool {
        [self.xi, self.xi_p_q04, self.r_q04, self.xi_p_q03, self.r_q03]
            .iter()
            .all(Option::is_some)
    }
}

pub fn default_figure1_grid() -> LambdaGrid {
    LambdaGrid::linear(0.005, 0.495, 99)
}

pub fn figure1_rows(base: &ModelParams, lambdas: &[f64], tol: f64) -> Vec<Figure1Row> {
    lambdas
        .par_iter()
        .map(|&lambda| {
            let params = base.with_lambda(lambda);
            let xi = params
                .as_ref()
                .ok()
                .and_then(|p| derive_frequencies(p).ok())
                .map(|f| f.xi);
            let solve = |q: f64| {
                params
                    .as_ref()
                    .ok()
                    .and_then(|p| solve_xi_p(p, q, tol).ok())
                    .map(|s| s.xi_p)
            };
            let (x4, x3) = (solve(0.4), solve(0.3));
            let ratio = |x: Option<f64>| match (x, xi) {
                (Some(a), Some(b)) if b > 0.0 => Some(a / b),
                _ => None,
            };
            Figure1Row {
                lambda,
                xi,
                xi_p_q04: x4,
                r_q04: ratio(x4),
                xi_p_q03: x3,
                r_q03: ratio(x3),
            }
        })
        .collect()
}

pub fn figure1_csv(rows: &[Figure1Row]) -> String {
    let cell = |v: Option<f64>| v.map(fmt_num).unwrap_or_else(|| ERROR_MARK.to_string());
    let mut out = String::new();
    out.push_str(FIGURE1_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_num(r.lambda),
            cell(r.xi),
            cell(r.xi_p_q04),
            cell(r.r_q04),
            cell(r.xi_p_q03),
            cell(r.r_q03)
        );
    }
    out
}

pub fn figure1_json(rows: &[Figure1Row]) -> Result<String> {
    to_json(&rows)
}

/// Number of sign changes of `v − 1` along a column (failed rows skipped).
pub fn crossings_of_one(values: impl IntoIterator<Item = Option<f64>>) -> usize {
    let signs: Vec<bool> = values.into_iter().flatten().map(|v| v > 1.0).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Everything `mh solve` prints for one (Λ, q).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub omega0: f64,
    pub solution: StationaritySolution,
    pub energy: EnergyBreakdown,
    pub exact: EnergyBreakdown,
    pub entropy: EntropyReport,
}

pub fn solve_report(params: &ModelParams, q: f64, tol: f64) -> Result<SolveReport> {
    let solution = solve_xi_p(params, q, tol)?;
    let energy = energy_parametric(params, &KernelSpec::sum_one(q)?, solution.xi_p)?;
    Ok(SolveReport {
        omega0: params.omega0(),
        solution,
        energy,
        exact: exact_energy(params)?,
        entropy: EntropyReport::from_xi(solution.xi_p)?,
    })
}

pub const SOLVE_HEADER: &str = "omega0,lambda,q,xi_p,rhs,iterations,residual,kinetic,external,interaction,e_p,e_ex,purity,linear_entropy,quasiparticle_weight";

pub fn solve_csv(r: &SolveReport) -> String {
    let s = &r.solution;
    let fields = [
        fmt_num(r.omega0),
        fmt_num(s.lambda),
        fmt_num(s.q),
        fmt_num(s.xi_p),
        fmt_num(s.rhs),
        s.iterations.to_string(),
        fmt_num(s.residual),
        fmt_num(r.energy.kinetic),
        fmt_num(r.energy.external),
        fmt_num(r.energy.interaction),
        fmt_num(r.energy.total),
        fmt_num(r.exact.total),
        fmt_num(r.entropy.purity),
        fmt_num(r.entropy.linear_entropy),
        fmt_num(r.entropy.quasiparticle_weight),
    ];
    format!("{SOLVE_HEADER}\n{}\n", fields.join(","))
}

pub fn solve_json(r: &SolveReport) -> Result<String> {
    to_json(r)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossingEntry {
    pub q: f64,
    pub lambda0: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingEntry {
    pub q: f64,
    pub fitted_exponent: f64,
    pub asymptotic_exponent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HartreeFockEntry {
    pub lambda: f64,
    pub omega_hf: f64,
    /// Minimum of the parametric functional at ξ_p = 0 with free orbital frequency.
    pub e_hf: f64,
    pub e_ex: f64,
    /// The frequently quoted closed form 2·ω₀·√(1−Λ); it is twice `e_hf` and
    /// does not reduce to E_ex = ω₀ at Λ = 0.
    pub quoted_e_hf: f64,
}

/// Summary produced by `mh report`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryReport {
    pub omega0: f64,
    pub crossings: Vec<CrossingEntry>,
    pub scaling: Vec<ScalingEntry>,
    pub hartree_fock: Vec<HartreeFockEntry>,
    pub hartree_fock_note: String,
}

pub fn summary_report(base: &ModelParams, crossing_qs: &[f64], hf_lambdas: &[f64]) -> Result<SummaryReport> {
    let crossings = crossing_qs
        .par_iter()
        .map(|&q| match find_crossing(base, q) {
            Ok(l) => CrossingEntry {
                q,
                lambda0: Some(l),
                error: None,
            },
            Err(e) => CrossingEntry {
                q,
                lambda0: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    let scaling = [0.5, 0.4, 0.3]
        .par_iter()
        .map(|&q| {
            Ok(ScalingEntry {
                q,
                fitted_exponent: scaling_exponent(base, q)?,
                asymptotic_exponent: 2.0 / (1.0 + 2.0 * (q - 0.5f64).abs()),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let hartree_fock = hf_lambdas
        .iter()
        .map(|&lambda| {
            let params = base.with_lambda(lambda)?;
            let hf = hartree_fock(&params)?;
            Ok(HartreeFockEntry {
                lambda,
                omega_hf: hf.omega_hf,
                e_hf: hf.energy.total,
                e_ex: exact_energy(&params)?.total,
                quoted_e_hf: 2.0 * base.omega0() * (1.0 - lambda).sqrt(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SummaryReport {
        omega0: base.omega0(),
        crossings,
        scaling,
        hartree_fock,
        hartree_fock_note: "e_hf is the minimum of the functional at xi_p = 0 over the orbital \
            frequency, omega0*sqrt(1-lambda); the commonly quoted 2*omega0*sqrt(1-lambda) is listed \
            as quoted_e_hf for comparison and is not asserted"
            .to_string(),
    })
}

pub fn summary_json(r: &SummaryReport) -> Result<String> {
    to_json(r)
}

/// Writes `bytes` to a temporary file next to `path` and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Thread cap from `MH_THREADS`, if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Runs `f` on a dedicated pool with `threads` workers (global pool if `None`).
pub fn with_threads<T: Send, F: FnOnce() -> T + Send>(threads: Option<usize>, f: F) -> T {
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}
