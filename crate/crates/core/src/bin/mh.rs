use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mueller_harmonium::oracle::verify::{run_verification, VerifyConfig};
use mueller_harmonium::report::{
    crossings_of_one, default_figure1_grid, figure1_csv, figure1_json, figure1_rows, solve_csv, solve_json,
    solve_report, summary_json, summary_report, sweep_csv, sweep_json, threads_from_env, with_threads,
    write_atomic, ConfigFile, LambdaGrid, OutputFormat, RunConfig,
};
use mueller_harmonium::solver::sweep;
use mueller_harmonium::{Error, ModelParams};

/// Variational occupation spectra of the two-particle harmonic model.
#[derive(Debug, Parser)]
#[command(name = "mh", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the stationarity condition at one (lambda, q).
    Solve(Common),
    /// Sweep a lambda grid for one or more q values.
    Sweep(Common),
    /// Ratio dataset R = xi_p/xi for q = 0.4 and q = 0.3.
    Figure1(Common),
    /// Compare every closed form against numerical quadrature.
    Verify(Common),
    /// Crossing points, small-coupling exponents and the HF reduction.
    Report(Common),
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long)]
    omega0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
    /// start:stop:count[:log]
    #[arg(long)]
    lambda_grid: Option<LambdaGrid>,
    #[arg(long)]
    q: Vec<f64>,
    #[arg(long)]
    tol_root: Option<f64>,
    #[arg(long)]
    tol_trunc: Option<f64>,
    /// csv or json
    #[arg(long)]
    format: Option<OutputFormat>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// key = value file; flags override its entries
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, hide = true)]
    tamper: bool,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig, Error> {
        let file = match &self.config {
            Some(path) => std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
                .parse()?,
            None => ConfigFile::default(),
        };
        let flags = ConfigFile {
            omega0: self.omega0,
            lambda: self.lambda,
            lambda_grid: self.lambda_grid,
            q: Some(self.q.clone()),
            tol_root: self.tol_root,
            tol_trunc: self.tol_trunc,
            format: self.format,
            out: self.out.as_ref().map(|p| p.display().to_string()),
        };
        RunConfig::resolve(flags, file)
    }
}

/// More than this fraction of failed rows makes a sweep exit nonzero.
const MAX_FAILED_FRACTION: f64 = 0.1;

fn emit(cfg: &RunConfig, text: &str) -> Result<(), String> {
    match &cfg.out {
        Some(path) => write_atomic(path, text.as_bytes()).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| e.to_string()),
    }
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("mh: {msg}");
    ExitCode::from(code)
}

fn emit_or_fail(cfg: &RunConfig, text: &str, ok_code: u8) -> ExitCode {
    match emit(cfg, text) {
        Ok(()) => ExitCode::from(ok_code),
        Err(e) => fail(1, e),
    }
}

fn too_many_failures(failed: usize, total: usize) -> bool {
    failed as f64 > MAX_FAILED_FRACTION * total as f64
}

fn cmd_solve(cfg: &RunConfig) -> ExitCode {
    let Some(lambda) = cfg.lambda else {
        return fail(2, "solve needs --lambda");
    };
    let q = match cfg.qs_or(&[0.5]).as_slice() {
        [q] => *q,
        _ => return fail(2, "solve takes a single --q"),
    };
    let report = ModelParams::new(cfg.omega0, lambda).and_then(|p| solve_report(&p, q, cfg.tol_root));
    let report = match report {
        Ok(r) => r,
        Err(e) if e.is_domain() => return fail(2, e),
        Err(e) => return fail(3, e),
    };
    let text = match cfg.format {
        OutputFormat::Csv => solve_csv(&report),
        OutputFormat::Json => match solve_json(&report) {
            Ok(t) => t,
            Err(e) => return fail(1, e),
        },
    };
    emit_or_fail(cfg, &text, 0)
}

fn cmd_sweep(cfg: &RunConfig) -> ExitCode {
    let (base, lambdas) = match cfg.base_params().and_then(|b| Ok((b, cfg.lambdas_or(None)?))) {
        Ok(v) => v,
        Err(e) => return fail(2, e),
    };
    let qs = cfg.qs_or(&[0.5]);
    let rows = sweep(&base, &qs, &lambdas, cfg.tol_root);
    let failed = rows.iter().filter(|r| !r.is_ok()).count();
    let text = match cfg.format {
        OutputFormat::Csv => sweep_csv(&rows),
        OutputFormat::Json => match sweep_json(&rows) {
            Ok(t) => t,
            Err(e) => return fail(1, e),
        },
    };
    if too_many_failures(failed, rows.len()) {
        eprintln!("mh: {failed} of {} sweep points failed", rows.len());
        return emit_or_fail(cfg, &text, 1);
    }
    emit_or_fail(cfg, &text, 0)
}

fn cmd_figure1(cfg: &RunConfig) -> ExitCode {
    let (base, lambdas) = match cfg
        .base_params()
        .and_then(|b| Ok((b, cfg.lambdas_or(Some(default_figure1_grid()))?)))
    {
        Ok(v) => v,
        Err(e) => return fail(2, e),
    };
    let rows = figure1_rows(&base, &lambdas, cfg.tol_root);
    let failed = rows.iter().filter(|r| !r.is_ok()).count();
    for (name, col) in [
        ("R_q04", rows.iter().map(|r| r.r_q04).collect::<Vec<_>>()),
        ("R_q03", rows.iter().map(|r| r.r_q03).collect()),
    ] {
        let n = crossings_of_one(col);
        if n != 1 {
            eprintln!("mh: warning: {name} - 1 changes sign {n} times");
        }
    }
    let text = match cfg.format {
        OutputFormat::Csv => figure1_csv(&rows),
        OutputFormat::Json => match figure1_json(&rows) {
            Ok(t) => t,
            Err(e) => return fail(1, e),
        },
    };
    if too_many_failures(failed, rows.len()) {
        eprintln!("mh: {failed} of {} rows failed", rows.len());
        return emit_or_fail(cfg, &text, 1);
    }
    emit_or_fail(cfg, &text, 0)
}

fn cmd_verify(cfg: &RunConfig, tamper: bool) -> ExitCode {
    let mut config = VerifyConfig {
        omega0: cfg.omega0,
        truncation_tol: cfg.tol_trunc,
        tamper,
        ..VerifyConfig::default()
    };
    if cfg.lambda.is_some() || cfg.lambda_grid.is_some() {
        match cfg.lambdas_or(None) {
            Ok(l) => config.lambdas = l,
            Err(e) => return fail(2, e),
        }
    }
    config.qs = cfg.qs_or(&config.qs);
    let checks = match run_verification(&config) {
        Ok(c) => c,
        Err(e) if e.is_domain() => return fail(2, e),
        Err(e) => return fail(3, e),
    };
    let text = match serde_json::to_string_pretty(&checks) {
        Ok(t) => t + "\n",
        Err(e) => return fail(1, e),
    };
    let failing: Vec<_> = checks.iter().filter(|c| !c.pass).collect();
    for c in &failing {
        eprintln!(
            "mh: FAIL {}: error {:.3e} > tolerance {:.1e}",
            c.name, c.measured_error, c.tolerance
        );
    }
    emit_or_fail(cfg, &text, if failing.is_empty() { 0 } else { 1 })
}

fn cmd_report(cfg: &RunConfig) -> ExitCode {
    let base = match cfg.base_params() {
        Ok(b) => b,
        Err(e) => return fail(2, e),
    };
    let hf_lambdas = if cfg.lambda.is_some() || cfg.lambda_grid.is_some() {
        match cfg.lambdas_or(None) {
            Ok(l) => l,
            Err(e) => return fail(2, e),
        }
    } else {
        vec![0.1, 0.3, 0.36]
    };
    let report = match summary_report(&base, &cfg.qs_or(&[0.4, 0.3]), &hf_lambdas) {
        Ok(r) => r,
        Err(e) if e.is_domain() => return fail(2, e),
        Err(e) => return fail(3, e),
    };
    match summary_json(&report) {
        Ok(t) => emit_or_fail(cfg, &t, 0),
        Err(e) => fail(1, e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (Command::Solve(common)
    | Command::Sweep(common)
    | Command::Figure1(common)
    | Command::Verify(common)
    | Command::Report(common)) = &cli.command;
    let cfg = match common.resolve() {
        Ok(c) => c,
        Err(e) => return fail(2, e),
    };
    with_threads(threads_from_env(), || match &cli.command {
        Command::Solve(_) => cmd_solve(&cfg),
        Command::Sweep(_) => cmd_sweep(&cfg),
        Command::Figure1(_) => cmd_figure1(&cfg),
        Command::Verify(c) => cmd_verify(&cfg, c.tamper),
        Command::Report(_) => cmd_report(&cfg),
    })
}
