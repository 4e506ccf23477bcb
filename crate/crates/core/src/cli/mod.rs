//! The `pcurv` command line: run configuration, subcommands and CSV output.
//!
//! Exit codes: 0 success, 1 i/o failure, 2 invalid input, 3 numerical failure.

pub mod config;
pub mod output;
pub mod shape;

use crate::diagnostics::{identity_suite, monotonicity_scan, neck_scan};
use crate::energy::{energy, willmore, Functional};
use crate::error::{invalid, PcurvError};
use crate::optimize::{minimize, p_sweep, OptStatus};
use crate::surfaces::{make_neck_family, write_mesh, write_node_table, Surface};
use crate::variation::{gradient_check, verify_ellipticity, verify_growth, STABILITY_DECADES};
use clap::{Args, Parser, Subcommand};
use config::RunConfig;
use output::{num, opt, Table};
use shape::ShapeSpec;
use std::ffi::OsString;
use std::path::PathBuf;
use thiserror::Error;

pub use output::{parse as parse_output, Header};

/// Environment variable overriding the thread count.
pub const THREADS_ENV: &str = "PCURV_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(#[from] toml::de::Error),
    #[error(transparent)]
    Pcurv(#[from] PcurvError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 2,
            CliError::Pcurv(PcurvError::InvalidParameter(_) | PcurvError::ShapeMismatch { .. } | PcurvError::NotClosed) => 2,
            CliError::Pcurv(PcurvError::Io(_)) | CliError::Io(_) | CliError::Csv(_) => 1,
            CliError::Pcurv(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "pcurv", version, about = "Curvature energies E^p and W^p on discretized surfaces")]
struct Cli {
    /// TOML run configuration; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output CSV path (standard output if omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default 1; PCURV_THREADS overrides).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Energies, area, Willmore energy and Gauss–Bonnet defect of one shape.
    Energy(ShapeArgs),
    /// Discrete gradient against central differences of the energy.
    Gradcheck(GradcheckArgs),
    /// Sampled ellipticity and growth-ratio certification.
    VerifyBounds(BoundsArgs),
    /// Steepest descent; writes the trace and optionally the final mesh.
    Minimize(MinimizeArgs),
    /// Attained minima over a grid of exponents.
    PSweep(SweepArgs),
    /// Area ratios in balls against the monotonicity bounds.
    Monotonicity(MonotonicityArgs),
    /// Energies of the sphere–catenoid–sphere family.
    Neck(NeckArgs),
    /// Identity checks over a shape library.
    Suite(SuiteArgs),
    /// Triangulated mesh or node table of one shape.
    DumpMesh(DumpArgs),
}

#[derive(Debug, Args)]
struct ShapeArgs {
    /// Shape spec, e.g. `sphere:r=1,M=256` or `torus:R=2,a=1,N=64`.
    #[arg(long)]
    shape: Option<String>,
    #[arg(long)]
    p: Option<f64>,
    /// Ep or Wp.
    #[arg(long)]
    functional: Option<Functional>,
}

#[derive(Debug, Args)]
struct GradcheckArgs {
    #[command(flatten)]
    shape: ShapeArgs,
    #[arg(long)]
    checks: Option<usize>,
    #[arg(long)]
    step: Option<f64>,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    /// Comma-separated exponents.
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<f64>>,
    /// Comma-separated slope caps.
    #[arg(long, value_delimiter = ',')]
    lambda_cap: Option<Vec<f64>>,
    #[arg(long)]
    samples: Option<usize>,
    /// Ambient dimension of the sampled graphs.
    #[arg(long)]
    dim: Option<usize>,
}

#[derive(Debug, Args)]
struct MinimizeArgs {
    #[command(flatten)]
    shape: ShapeArgs,
    /// Final surface as a mesh dump.
    #[arg(long)]
    mesh_out: Option<PathBuf>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    ps_tol: Option<f64>,
    #[arg(long)]
    rel_energy_tol: Option<f64>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Start shape; `r=critical` follows each p.
    #[arg(long)]
    shape: Option<String>,
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<f64>>,
    #[arg(long)]
    functional: Option<Functional>,
    #[arg(long)]
    max_iters: Option<usize>,
}

#[derive(Debug, Args)]
struct MonotonicityArgs {
    #[command(flatten)]
    shape: ShapeArgs,
    /// Ball center `x,y,z`.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    center: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    sigmas: Option<Vec<f64>>,
    #[arg(long)]
    azimuthal: Option<usize>,
}

#[derive(Debug, Args)]
struct NeckArgs {
    #[arg(long)]
    p: Option<f64>,
    /// Strictly decreasing neck scales.
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    /// Profile nodes per surface.
    #[arg(long)]
    m: Option<usize>,
    /// Directory receiving one mesh per scale.
    #[arg(long)]
    mesh_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SuiteArgs {
    /// Shape specs (repeatable); defaults to the built-in library.
    #[arg(long)]
    shape: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
struct DumpArgs {
    #[arg(long)]
    shape: Option<String>,
    #[arg(long)]
    azimuthal: Option<usize>,
    /// `mesh` or `nodes`.
    #[arg(long)]
    format: Option<String>,
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

impl ShapeArgs {
    fn apply(self, cfg: &mut RunConfig) {
        set(&mut cfg.shape, self.shape);
        set(&mut cfg.p, self.p);
        set(&mut cfg.functional, self.functional);
    }
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Energy(_) => "energy",
            Command::Gradcheck(_) => "gradcheck",
            Command::VerifyBounds(_) => "verify-bounds",
            Command::Minimize(_) => "minimize",
            Command::PSweep(_) => "p-sweep",
            Command::Monotonicity(_) => "monotonicity",
            Command::Neck(_) => "neck",
            Command::Suite(_) => "suite",
            Command::DumpMesh(_) => "dump-mesh",
        }
    }

    fn apply(self, cfg: &mut RunConfig) -> Result<(), CliError> {
        match self {
            Command::Energy(a) => a.apply(cfg),
            Command::Gradcheck(a) => {
                a.shape.apply(cfg);
                set(&mut cfg.checks, a.checks);
                set(&mut cfg.fd_step, a.step);
            }
            Command::VerifyBounds(a) => {
                set(&mut cfg.ps, a.p);
                set(&mut cfg.lambda_caps, a.lambda_cap);
                set(&mut cfg.samples, a.samples);
                set(&mut cfg.dim, a.dim);
            }
            Command::Minimize(a) => {
                a.shape.apply(cfg);
                if a.mesh_out.is_some() {
                    cfg.mesh_out = a.mesh_out;
                }
                set(&mut cfg.optimizer.max_iters, a.max_iters);
                if a.ps_tol.is_some() {
                    cfg.optimizer.stop_ps_tol = a.ps_tol;
                }
                set(&mut cfg.optimizer.stop_rel_energy_tol, a.rel_energy_tol);
            }
            Command::PSweep(a) => {
                set(&mut cfg.shape, a.shape);
                set(&mut cfg.ps, a.p);
                set(&mut cfg.functional, a.functional);
                set(&mut cfg.optimizer.max_iters, a.max_iters);
            }
            Command::Monotonicity(a) => {
                a.shape.apply(cfg);
                if let Some(c) = a.center {
                    let c: [f64; 3] =
                        c.try_into().map_err(|_| CliError::Usage("--center takes three coordinates".into()))?;
                    cfg.center = Some(c);
                }
                set(&mut cfg.sigmas, a.sigmas);
                set(&mut cfg.azimuthal, a.azimuthal);
            }
            Command::Neck(a) => {
                set(&mut cfg.p, a.p);
                set(&mut cfg.eps, a.eps);
                set(&mut cfg.neck_m, a.m);
                if a.mesh_out.is_some() {
                    cfg.mesh_out = a.mesh_out;
                }
            }
            Command::Suite(a) => {
                if !a.shape.is_empty() {
                    cfg.shapes = a.shape;
                }
                set(&mut cfg.ps, a.p);
            }
            Command::DumpMesh(a) => {
                set(&mut cfg.shape, a.shape);
                set(&mut cfg.azimuthal, a.azimuthal);
                set(&mut cfg.format, a.format);
            }
        }
        Ok(())
    }
}

/// Output of one command before anything is written.
struct Outcome {
    /// CSV table, or raw text for mesh dumps.
    table: Option<Table>,
    raw: Option<String>,
    extra: Vec<(String, String)>,
    /// Additional files (path, contents).
    files: Vec<(PathBuf, String)>,
    /// Numerical failure recorded in the output.
    failed: bool,
}

impl Outcome {
    fn table(table: Table) -> Self {
        Outcome { table: Some(table), raw: None, extra: Vec::new(), files: Vec::new(), failed: false }
    }
}

fn mesh_text(s: &Surface, azimuthal: usize) -> Result<String, CliError> {
    let mut buf = Vec::new();
    write_mesh(s, azimuthal, &mut buf)?;
    Ok(String::from_utf8(buf).expect("mesh output is utf-8"))
}

fn azimuthal_for(s: &Surface, requested: usize, default: usize) -> usize {
    match (requested, s) {
        (0, Surface::Axisym(p)) if default == 0 => 2 * p.node_count(),
        (0, _) => default,
        (a, _) => a,
    }
}

fn shape_of(cfg: &RunConfig) -> Result<(ShapeSpec, Surface), CliError> {
    let spec: ShapeSpec = cfg.shape.parse()?;
    let s = spec.build(cfg.p, cfg.functional, cfg.seed)?;
    Ok((spec, s))
}

fn execute(command: &str, cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.optimizer.validate()?;
    match command {
        "energy" => {
            let (_, s) = shape_of(cfg)?;
            let ep = energy(&s, Functional::Ep, cfg.p, false)?;
            let wp = energy(&s, Functional::Wp, cfg.p, false)?;
            let gb = if s.is_closed() { Some(willmore(&s)?.gauss_bonnet_defect) } else { None };
            let mut t = Table::new(&["shape", "p", "N", "value_Ep", "value_Wp", "area", "willmore", "gb_defect"]);
            t.push(vec![
                cfg.shape.clone(),
                num(cfg.p),
                s.node_count().to_string(),
                num(ep.value),
                num(wp.value),
                num(ep.area),
                num(ep.willmore),
                opt(gb),
            ]);
            Ok(Outcome::table(t))
        }
        "gradcheck" => {
            let (_, s) = shape_of(cfg)?;
            let rows = gradient_check(&s, cfg.p, cfg.functional, cfg.checks, cfg.fd_step, cfg.seed)?;
            let mut t =
                Table::new(&["shape", "functional", "p", "dof", "gradient", "central_difference", "rel_error"]);
            for r in &rows {
                t.push(vec![
                    cfg.shape.clone(),
                    cfg.functional.to_string(),
                    num(cfg.p),
                    r.dof.to_string(),
                    num(r.gradient),
                    num(r.central_difference),
                    num(r.rel_error),
                ]);
            }
            let mut out = Outcome::table(t);
            let worst = rows.iter().map(|r| r.rel_error).fold(0.0, f64::max);
            out.extra.push(("max_rel_error".into(), num(worst)));
            Ok(out)
        }
        "verify-bounds" => {
            let mut cols = vec!["p", "lambda_cap", "samples", "lambda_min", "violations"];
            cols.extend(["max_dq_a", "max_a", "max_dp_a", "max_dq_b", "max_b", "max_dp_b", "max_B"]);
            cols.push("max_stability");
            let mut t = Table::new(&cols);
            for &p in &cfg.ps {
                for &cap in &cfg.lambda_caps {
                    let e = verify_ellipticity(cfg.dim, p, cap, cfg.samples, cfg.seed)?;
                    let g = verify_growth(cfg.dim, p, cap, cfg.samples, cfg.seed)?;
                    let mut row = vec![num(p), num(cap), cfg.samples.to_string(), num(e.lambda_min)];
                    row.push(e.violations.to_string());
                    row.extend(g.max.iter().map(|&x| num(x)));
                    row.push(num(g.stability().iter().copied().fold(0.0, f64::max)));
                    t.push(row);
                }
            }
            let mut out = Outcome::table(t);
            let decades: Vec<String> = STABILITY_DECADES.iter().map(|(a, b)| format!("{a}-{b}")).collect();
            out.extra.push(("stability_decades".into(), decades.join(" ")));
            Ok(out)
        }
        "minimize" => {
            let (_, s) = shape_of(cfg)?;
            let run = minimize(&s, cfg.p, cfg.functional, &cfg.optimizer)?;
            let mut t = Table::new(&["iteration", "energy", "step", "ps_surrogate", "grad_norm", "min_detg"]);
            for r in &run.trace {
                t.push(vec![
                    r.iteration.to_string(),
                    num(r.energy),
                    num(r.step),
                    num(r.ps_surrogate),
                    num(r.grad_norm),
                    num(r.min_detg),
                ]);
            }
            let mut out = Outcome::table(t);
            out.extra.push(("status".into(), run.status.to_string()));
            out.extra.push(("ps_tol".into(), num(run.ps_tol)));
            out.failed = run.status == OptStatus::DegenerateStep;
            if let Some(path) = &cfg.mesh_out {
                let az = azimuthal_for(&run.final_surface, cfg.azimuthal, 64);
                out.files.push((path.clone(), mesh_text(&run.final_surface, az)?));
            }
            Ok(out)
        }
        "p-sweep" => {
            let spec: ShapeSpec = cfg.shape.parse()?;
            let table = p_sweep(cfg.functional, &cfg.ps, &cfg.optimizer, |p| spec.build(p, cfg.functional, cfg.seed))?;
            let mut t =
                Table::new(&["p", "functional", "energy", "willmore", "status", "iterations", "ps_surrogate", "error"]);
            for r in &table.rows {
                t.push(vec![
                    num(r.p),
                    cfg.functional.to_string(),
                    num(r.energy),
                    num(r.willmore),
                    r.status.map(|s| s.to_string()).unwrap_or_default(),
                    r.iterations.to_string(),
                    num(r.ps_surrogate),
                    r.error.clone().unwrap_or_default(),
                ]);
            }
            let mut out = Outcome::table(t);
            out.extra.push(("monotone".into(), table.monotone.to_string()));
            out.failed = table.rows.iter().any(|r| r.error.is_some() || r.status == Some(OptStatus::DegenerateStep));
            Ok(out)
        }
        "monotonicity" => {
            let (_, s) = shape_of(cfg)?;
            if s.dim() != 3 {
                return Err(invalid("monotonicity needs a surface in R^3").into());
            }
            let center = match cfg.center {
                Some(c) => c,
                None => {
                    let x = s.position(s.node_count() / 2);
                    [x[0], x[1], x[2]]
                }
            };
            let az = azimuthal_for(&s, cfg.azimuthal, 0);
            let r = monotonicity_scan(&s, center, &cfg.sigmas, cfg.p, az)?;
            let mut t = Table::new(&["sigma", "ratio", "ball_abs_h", "rhs_simon", "rhs_es", "slack"]);
            for k in 0..r.sigmas.len() {
                t.push(vec![
                    num(r.sigmas[k]),
                    num(r.ratios[k]),
                    num(r.ball_abs_h[k]),
                    num(r.rhs_simon[k]),
                    num(r.rhs_es[k]),
                    num(r.rhs_simon[k] - r.ratios[k]),
                ]);
            }
            let mut out = Outcome::table(t);
            out.extra.push(("center".into(), center.map(num).join(" ")));
            out.extra.push(("willmore".into(), num(r.willmore)));
            out.extra.push(("es_constant".into(), num(r.es_constant)));
            Ok(out)
        }
        "neck" => {
            let r = neck_scan(&cfg.eps, cfg.p, cfg.neck_m)?;
            let mut t =
                Table::new(&["eps", "p", "M", "value_Ep", "value_Wp", "willmore", "area", "slope", "excess_slope"]);
            for k in 0..r.eps.len() {
                t.push(vec![
                    num(r.eps[k]),
                    num(r.p),
                    r.m.to_string(),
                    num(r.ep[k]),
                    num(r.wp[k]),
                    num(r.willmore[k]),
                    num(r.area[k]),
                    num(r.slope),
                    num(r.excess_slope),
                ]);
            }
            let mut out = Outcome::table(t);
            out.extra.push(("wp_spread".into(), num(r.wp_spread())));
            if let Some(dir) = &cfg.mesh_out {
                for &e in &cfg.eps {
                    let s = Surface::Axisym(make_neck_family(e, cfg.neck_m)?);
                    let az = azimuthal_for(&s, cfg.azimuthal, 64);
                    out.files.push((dir.join(format!("neck_eps{e}.mesh")), mesh_text(&s, az)?));
                }
            }
            Ok(out)
        }
        "suite" => {
            let shapes = cfg
                .shapes
                .iter()
                .map(|spec| {
                    let s = spec.parse::<ShapeSpec>()?.build(cfg.p, cfg.functional, cfg.seed)?;
                    Ok((spec.clone(), s))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            let rows = identity_suite(&shapes, &cfg.ps)?;
            let mut t = Table::new(&["shape", "check", "value", "tolerance", "pass", "error"]);
            for r in &rows {
                t.push(vec![
                    r.shape.clone(),
                    r.check.clone(),
                    num(r.value),
                    num(r.tolerance),
                    r.pass.to_string(),
                    r.error.clone().unwrap_or_default(),
                ]);
            }
            let mut out = Outcome::table(t);
            let passed = rows.iter().filter(|r| r.pass).count();
            out.extra.push(("passed".into(), format!("{passed}/{}", rows.len())));
            out.failed = rows.iter().any(|r| r.error.is_some());
            Ok(out)
        }
        "dump-mesh" => {
            let (_, s) = shape_of(cfg)?;
            match cfg.format.as_str() {
                "mesh" => {
                    let az = azimuthal_for(&s, cfg.azimuthal, 64);
                    let text = mesh_text(&s, az)?;
                    Ok(Outcome { table: None, raw: Some(text), extra: Vec::new(), files: Vec::new(), failed: false })
                }
                "nodes" => {
                    let mut buf = Vec::new();
                    write_node_table(&s, &mut buf)?;
                    let mut rdr = csv::Reader::from_reader(buf.as_slice());
                    let mut t = Table { columns: rdr.headers()?.iter().map(String::from).collect(), rows: Vec::new() };
                    for rec in rdr.records() {
                        t.push(rec?.iter().map(String::from).collect());
                    }
                    Ok(Outcome::table(t))
                }
                f => Err(CliError::Usage(format!("unknown dump format `{f}` (expected mesh or nodes)"))),
            }
        }
        other => Err(CliError::Usage(format!("unknown command `{other}`"))),
    }
}

fn effective_config(cli: Cli) -> Result<(String, RunConfig), CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_toml(&std::fs::read_to_string(path)?)?,
        None => RunConfig::default(),
    };
    if cli.out.is_some() {
        cfg.out = cli.out;
    }
    set(&mut cfg.threads, cli.threads);
    set(&mut cfg.seed, cli.seed);
    if let Ok(v) = std::env::var(THREADS_ENV) {
        cfg.threads = v.parse().map_err(|_| CliError::Usage(format!("{THREADS_ENV} must be a positive integer")))?;
    }
    if cfg.threads == 0 {
        return Err(CliError::Usage("thread count must be positive".into()));
    }
    let name = cli.command.name().to_string();
    cli.command.apply(&mut cfg)?;
    Ok((name, cfg))
}

fn run_parsed(cli: Cli) -> Result<i32, CliError> {
    let (command, cfg) = effective_config(cli)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    let outcome = pool.install(|| execute(&command, &cfg))?;
    let text = match (&outcome.table, &outcome.raw) {
        (Some(t), _) => output::render(&command, &cfg, &outcome.extra, t)?,
        (None, Some(raw)) => raw.clone(),
        (None, None) => String::new(),
    };
    output::emit(cfg.out.as_deref(), &text)?;
    for (path, contents) in &outcome.files {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, contents)?;
    }
    Ok(if outcome.failed { 3 } else { 0 })
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run_parsed(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("pcurv: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg_of(args: &[&str]) -> RunConfig {
        effective_config(Cli::try_parse_from(args).unwrap()).unwrap().1
    }

    #[test]
    fn flags_override_defaults() {
        let c = cfg_of(&["pcurv", "neck", "--p", "3", "--eps", "0.1,0.05", "--seed", "4"]);
        assert_eq!((c.p, c.eps.clone(), c.seed), (3.0, vec![0.1, 0.05], 4));
        let c = cfg_of(&["pcurv", "monotonicity", "--center", "1,0,0", "--sigmas", "0.5,1"]);
        assert_eq!(c.center, Some([1.0, 0.0, 0.0]));
        let c = cfg_of(&["pcurv", "minimize", "--functional", "Wp", "--ps-tol", "1e-6"]);
        assert_eq!((c.functional, c.optimizer.stop_ps_tol), (Functional::Wp, Some(1e-6)));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Pcurv(invalid("x")).exit_code(), 2);
        assert_eq!(CliError::Pcurv(PcurvError::DegenerateStep { iteration: 1, step: 0.0 }).exit_code(), 3);
        assert_eq!(CliError::Pcurv(PcurvError::DegenerateJet { node: None, detg: 0.0 }).exit_code(), 3);
        assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
        assert_eq!(run(["pcurv", "bogus"]), 2);
        assert_eq!(run(["pcurv", "energy", "--nope"]), 2);
    }

    #[test]
    fn bad_center_is_a_usage_error() {
        let cli = Cli::try_parse_from(["pcurv", "monotonicity", "--center", "1,0"]).unwrap();
        assert_eq!(effective_config(cli).unwrap_err().exit_code(), 2);
    }
}
