//! Command line driver.
//!
//! Every subcommand prints a JSON summary on stdout and writes the summary
//! plus its CSV data into `--out` (created if missing). Exit codes: 0 on
//! success, 1 when a solver fails or reports a failure status, 2 on usage or
//! graph-spec errors.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::assembly::{assemble, LinearForm};
use crate::bifurcation::{
    continue_branch, fit_asymptotics, gamma, runaway_threshold, soliton_frequency, BranchOptions,
};
use crate::dynamics::{conservation_report, evolve, orbital_distance, EvolveOptions, Scheme};
use crate::error::{Error, Result};
use crate::function::GraphFunction;
use crate::mesh::Mesh;
use crate::nls::{minimize_ground_state, InitialGuess, NlsParams, Status};
use crate::spec_file::load_graph;
use crate::spectral::{linear_ground_state, SpectralStatus};

/// Environment variable capping the number of sweep workers.
pub const THREADS_ENV: &str = "GRAPHNLS_THREADS";

#[derive(Debug, Parser)]
#[command(name = "graphnls", version, about = "Focusing NLS ground states, branches and dynamics on starlike metric graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Linear ground state energy E0, spectral gap and Φ₀.
    Spectrum(SpectrumArgs),
    /// Mass-constrained minimizer of the NLS energy.
    GroundState(GroundStateArgs),
    /// Newton continuation of the branch bifurcating from E0.
    Continue(ContinueArgs),
    /// Energy of the escaping line soliton, −γ_μ m^{1+2μ/(2−μ)}.
    Threshold(ThresholdArgs),
    /// Time evolution with conservation and runaway monitoring.
    Evolve(EvolveArgs),
    /// Ground-state status over a grid of masses.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Graph description (JSON).
    #[arg(long)]
    graph: PathBuf,
    /// Target mesh width.
    #[arg(long)]
    h: Option<f64>,
    /// Output directory.
    #[arg(long, default_value = "graphnls-out")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SpectrumArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Debug, Args)]
struct GroundStateArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    mu: f64,
    #[arg(long)]
    mass: f64,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 20_000)]
    max_iters: usize,
    /// Radius on the half-lines beyond which mass counts as escaping
    /// (default: a quarter of the truncation length).
    #[arg(long)]
    runaway_radius: Option<f64>,
}

#[derive(Debug, Args)]
struct ContinueArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    mu: f64,
    #[arg(long)]
    omega_max: f64,
    #[arg(long, default_value_t = 20)]
    steps: usize,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Smallest ω − E0 on the geometric grid.
    #[arg(long, default_value_t = 1e-3)]
    offset_min: f64,
}

#[derive(Debug, Args)]
struct ThresholdArgs {
    #[arg(long)]
    mu: f64,
    #[arg(long)]
    mass: f64,
}

#[derive(Debug, Args)]
struct EvolveArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    mu: f64,
    #[arg(long)]
    dt: f64,
    /// Final time.
    #[arg(long = "T")]
    t_final: f64,
    #[arg(long, default_value = "strang")]
    scheme: Scheme,
    /// `ground-state` (needs --mass), `branch:<omega>`, or a CSV file with
    /// columns edge,x,re[,im].
    #[arg(long, default_value = "ground-state")]
    initial: String,
    /// Mass of the ground state used with `--initial ground-state`.
    #[arg(long, default_value_t = 1.0)]
    mass: f64,
    #[arg(long, default_value_t = 100)]
    snapshot_stride: usize,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    mu: f64,
    /// Comma-separated masses.
    #[arg(long, value_delimiter = ',', required = true, num_args = 0..)]
    masses: Vec<f64>,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 20_000)]
    max_iters: usize,
    #[arg(long)]
    runaway_radius: Option<f64>,
}

impl clap::ValueEnum for Scheme {
    fn value_variants<'a>() -> &'a [Self] {
        &[Scheme::Strang, Scheme::Cn]
    }

    fn to_possible_value(&self) -> Option<clap::builder::PossibleValue> {
        Some(clap::builder::PossibleValue::new(match self {
            Scheme::Strang => "strang",
            Scheme::Cn => "cn",
        }))
    }
}

/// Failure with an exit code; the message goes to stderr.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: exit_code(&e),
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

/// Exit code for a library error: 2 for bad input, 1 for solver failures.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::SingularMatrix(_)
        | Error::NoConvergence { .. }
        | Error::SpectralAssumption(_)
        | Error::BranchTooShort(..)
        | Error::MassOutOfRange { .. }
        | Error::EmptyTrajectory => 1,
        _ => 2,
    }
}

/// Runs the driver with process stdout/stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::Spectrum(a) => spectrum(a),
        Command::GroundState(a) => ground_state(a),
        Command::Continue(a) => continuation(a),
        Command::Threshold(a) => threshold(a),
        Command::Evolve(a) => evolution(a),
        Command::Sweep(a) => sweep(a),
    };
    match result {
        Ok((summary, code)) => {
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
            code
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

type Outcome = std::result::Result<(Value, i32), Failure>;

fn load_form(common: &Common, default_h: f64) -> std::result::Result<LinearForm, Failure> {
    let graph = load_graph(&common.graph).map_err(|e| usage(e.to_string()))?;
    let mesh = Mesh::new(Arc::new(graph), common.h.unwrap_or(default_h)).map_err(|e| usage(e.to_string()))?;
    Ok(assemble(Arc::new(mesh))?)
}

fn output_dir(dir: &Path) -> std::result::Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| usage(format!("cannot create {}: {e}", dir.display())))
}

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure {
        code: 1,
        message: format!("cannot write {}: {e}", path.display()),
    }
}

fn write_json(path: &Path, value: &Value) -> std::result::Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("summary serializes");
    std::fs::write(path, text + "\n").map_err(|e| io_failure(path, e))
}

fn write_rows<R: Serialize>(path: &Path, header: &[&str], rows: impl IntoIterator<Item = R>) -> std::result::Result<(), Failure> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| io_failure(path, e))?;
    w.write_record(header).map_err(|e| io_failure(path, e))?;
    for r in rows {
        w.serialize(r).map_err(|e| io_failure(path, e))?;
    }
    w.flush().map_err(|e| io_failure(path, e))
}

/// One row per unknown: `edge, x, re, im`. Vertices appear once, on the edge
/// that represents them.
fn write_profile(path: &Path, f: &GraphFunction) -> std::result::Result<(), Failure> {
    let rows = f
        .mesh()
        .dof_points()
        .iter()
        .zip(f.values())
        .map(|(p, v)| (p.edge, p.x, v.re, v.im));
    write_rows(path, &["edge", "x", "re", "im"], rows)
}

/// Reads a profile written by [`write_profile`] (the `im` column is
/// optional) onto `mesh`, matching rows to mesh nodes.
pub fn read_profile(path: &Path, mesh: &Arc<Mesh>) -> Result<GraphFunction> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::Spec(format!("{}: {e}", path.display())))?;
    let mut values = vec![Complex64::new(0.0, 0.0); mesh.num_dofs()];
    let mut seen = vec![false; mesh.num_dofs()];
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Spec(format!("{}: {e}", path.display())))?;
        let field = |k: usize| -> Result<f64> {
            record
                .get(k)
                .ok_or_else(|| Error::Spec(format!("{}: row {} has too few columns", path.display(), line + 2)))?
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Spec(format!("{}: row {}: {e}", path.display(), line + 2)))
        };
        let edge = field(0)? as usize;
        let x = field(1)?;
        let re = field(2)?;
        let im = if record.len() > 3 { field(3)? } else { 0.0 };
        if edge >= mesh.edges().len() {
            return Err(Error::Spec(format!("{}: row {}: no edge {edge}", path.display(), line + 2)));
        }
        let em = mesh.edge(edge);
        let k = (x / em.h).round();
        if k < 0.0 || k as usize > em.intervals || (x - k * em.h).abs() > 1e-6 * em.h.max(1.0) {
            return Err(Error::Spec(format!(
                "{}: row {}: x = {x} is not a node of edge {edge}",
                path.display(),
                line + 2
            )));
        }
        if let Some(d) = em.dofs[k as usize] {
            values[d] = Complex64::new(re, im);
            seen[d] = true;
        }
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        let p = mesh.dof_points()[missing];
        return Err(Error::Spec(format!(
            "{}: no value for node (edge {}, x = {})",
            path.display(),
            p.edge,
            p.x
        )));
    }
    GraphFunction::from_values(Arc::clone(mesh), values)
}

fn spectrum(a: SpectrumArgs) -> Outcome {
    let form = load_form(&a.common, 0.02)?;
    let res = linear_ground_state(&form, a.tol)?;
    output_dir(&a.common.out)?;
    let summary = json!({
        "E0": res.e0,
        "gap": res.gap,
        "lambda2": res.lambda2,
        "residual": res.residual,
        "iterations": res.iterations,
        "converged": res.converged,
        "status": res.status,
        "dofs": form.dim(),
        "h": form.mesh().h_max(),
    });
    write_json(&a.common.out.join("spectrum.json"), &summary)?;
    let phi = res.phi0.real_parts();
    let rows = form.mesh().dof_points().iter().zip(phi).map(|(p, v)| (p.edge, p.x, v));
    write_rows(&a.common.out.join("phi0.csv"), &["edge", "x", "value"], rows)?;
    let code = if res.converged { 0 } else { 1 };
    Ok((summary, code))
}

fn nls_params(mu: f64, mass: f64, tol: f64, max_iters: usize, radius: Option<f64>) -> std::result::Result<NlsParams, Failure> {
    let params = NlsParams {
        tol,
        max_iters,
        runaway_radius: radius,
        ..NlsParams::new(mu, mass)
    };
    params.validate().map_err(|e| usage(e.to_string()))?;
    Ok(params)
}

fn status_code(status: Status) -> i32 {
    match status {
        Status::Converged | Status::Runaway => 0,
        Status::MaxIters => 1,
    }
}

fn ground_state(a: GroundStateArgs) -> Outcome {
    let params = nls_params(a.mu, a.mass, a.tol, a.max_iters, a.runaway_radius)?;
    let form = load_form(&a.common, 0.05)?;
    let res = minimize_ground_state(&form, &params, InitialGuess::Auto)?;
    output_dir(&a.common.out)?;
    let summary = json!({
        "energy": res.energy,
        "omega": res.omega,
        "residual": res.residual,
        "status": res.status,
        "runaway_fraction": res.runaway_fraction,
        "runaway_edge": res.runaway_edge,
        "iterations": res.iterations,
        "mass": res.psi.mass(),
        "threshold": runaway_threshold(a.mu, a.mass)?,
    });
    write_json(&a.common.out.join("ground_state.json"), &summary)?;
    write_profile(&a.common.out.join("ground_state.csv"), &res.psi)?;
    Ok((summary, status_code(res.status)))
}

fn continuation(a: ContinueArgs) -> Outcome {
    if !(a.mu > 0.0 && a.mu < 2.0) {
        return Err(usage(format!("--mu must lie in (0, 2), got {}", a.mu)));
    }
    let form = load_form(&a.common, 0.02)?;
    let spec = linear_ground_state(&form, 1e-10)?;
    if spec.status != SpectralStatus::Ok {
        return Err(Failure {
            code: 1,
            message: format!("no isolated bound state to continue from (status {:?}, E0 = {})", spec.status, spec.e0),
        });
    }
    let opts = BranchOptions {
        tol: a.tol,
        offset_min: a.offset_min,
        ..BranchOptions::new(a.mu, a.omega_max, a.steps)
    };
    if a.omega_max <= spec.e0 + a.offset_min {
        return Err(usage(format!(
            "--omega-max must exceed E0 + offset = {}",
            spec.e0 + a.offset_min
        )));
    }
    let branch = continue_branch(&form, &spec, &opts)?;
    output_dir(&a.common.out)?;
    let rows = branch
        .points
        .iter()
        .map(|p| (p.omega, p.mass, p.energy, p.amplitude, p.residual));
    write_rows(
        &a.common.out.join("branch.csv"),
        &["omega", "mass", "energy", "amplitude", "residual"],
        rows,
    )?;
    let fit = fit_asymptotics(&branch).ok();
    let summary = json!({
        "E0": spec.e0,
        "phi0_norm": crate::spectral::phi0_nonlinear_norm(&spec, a.mu),
        "points": branch.points.len(),
        "stopped": branch.stopped,
        "fit": fit,
        "expected_exponent": 1.0 / a.mu,
    });
    write_json(&a.common.out.join("asymptotics.json"), &summary)?;
    let code = if branch.stopped.is_some() { 1 } else { 0 };
    Ok((summary, code))
}

fn threshold(a: ThresholdArgs) -> Outcome {
    if !(a.mu > 0.0 && a.mu < 2.0) || !(a.mass > 0.0) {
        return Err(usage("need 0 < --mu < 2 and --mass > 0"));
    }
    let summary = json!({
        "mu": a.mu,
        "mass": a.mass,
        "gamma": gamma(a.mu)?,
        "soliton_omega": soliton_frequency(a.mu, a.mass)?,
        "threshold": runaway_threshold(a.mu, a.mass)?,
    });
    Ok((summary, 0))
}

fn evolution(a: EvolveArgs) -> Outcome {
    if !(a.dt > 0.0 && a.t_final >= a.dt) {
        return Err(usage("need --dt > 0 and --T ≥ --dt"));
    }
    if !(a.mu > 0.0 && a.mu < 2.0) {
        return Err(usage(format!("--mu must lie in (0, 2), got {}", a.mu)));
    }
    let form = load_form(&a.common, 0.05)?;
    let (f0, reference, label) = if a.initial == "ground-state" {
        let params = nls_params(a.mu, a.mass, 1e-8, 20_000, None)?;
        let gs = minimize_ground_state(&form, &params, InitialGuess::Auto)?;
        if gs.status != Status::Converged {
            return Err(Failure {
                code: 1,
                message: format!("initial ground state did not converge (status {:?})", gs.status),
            });
        }
        (gs.psi.clone(), Some(gs.psi), json!({"kind": "ground-state", "mass": a.mass, "omega": gs.omega}))
    } else if let Some(w) = a.initial.strip_prefix("branch:") {
        let omega: f64 = w.parse().map_err(|_| usage(format!("bad frequency in --initial {}", a.initial)))?;
        let spec = linear_ground_state(&form, 1e-10)?;
        if spec.status != SpectralStatus::Ok || omega <= spec.e0 {
            return Err(usage(format!("branch:{omega} needs a bound state with E0 < ω (E0 = {})", spec.e0)));
        }
        let offset = (1e-3f64).min(0.5 * (omega - spec.e0));
        let opts = BranchOptions {
            offset_min: offset,
            ..BranchOptions::new(a.mu, omega, 25)
        };
        let branch = continue_branch(&form, &spec, &opts)?;
        if branch.stopped.is_some() {
            return Err(Failure {
                code: 1,
                message: format!("branch did not reach ω = {omega}: {}", branch.stopped.unwrap_or_default()),
            });
        }
        let p = branch.points.last().expect("non-empty branch").clone();
        (p.phi.clone(), Some(p.phi), json!({"kind": "branch", "omega": p.omega, "mass": p.mass}))
    } else {
        let f = read_profile(Path::new(&a.initial), form.mesh()).map_err(|e| usage(e.to_string()))?;
        (f, None, json!({"kind": "csv", "path": a.initial}))
    };
    let opts = EvolveOptions {
        scheme: a.scheme,
        snapshot_stride: a.snapshot_stride,
        ..EvolveOptions::new(a.mu, a.t_final, a.dt)
    };
    let traj = evolve(&f0, &form, &opts)?;
    let report = conservation_report(&traj)?;
    output_dir(&a.common.out)?;
    let snap_dir = a.common.out.join("snapshots");
    output_dir(&snap_dir)?;
    for (k, s) in traj.snapshots.iter().enumerate() {
        write_profile(&snap_dir.join(format!("snapshot_{k:05}.csv")), &s.psi)?;
    }
    write_rows(
        &a.common.out.join("records.csv"),
        &["t", "mass", "energy"],
        traj.records.iter().map(|r| (r.t, r.mass, r.energy)),
    )?;
    let runaway: Vec<(f64, f64)> = traj.snapshots.iter().map(|s| (s.t, s.runaway_fraction)).collect();
    let orbital = match &reference {
        Some(r) => Some(orbital_distance(&traj, r)?.into_iter().fold(0.0, f64::max)),
        None => None,
    };
    let summary = json!({
        "initial": label,
        "scheme": a.scheme,
        "dt": a.dt,
        "T": traj.records.last().map(|r| r.t),
        "steps": traj.records.len() - 1,
        "snapshots": traj.snapshots.len(),
        "mass_drift": report.mass_drift,
        "energy_drift": report.energy_drift,
        "max_orbital_distance": orbital,
        "max_runaway_fraction": runaway.iter().map(|r| r.1).fold(0.0, f64::max),
        "snapshot_times": runaway.iter().map(|r| r.0).collect::<Vec<_>>(),
    });
    write_json(&a.common.out.join("conservation.json"), &summary)?;
    Ok((summary, 0))
}

/// Number of sweep workers: `GRAPHNLS_THREADS` if set, otherwise rayon's
/// default.
pub fn sweep_threads() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(Error::InvalidArgument(format!("{THREADS_ENV} must be a positive integer, got '{s}'"))),
        },
    }
}

#[derive(Debug, Clone, Serialize)]
struct SweepRow {
    mass: f64,
    status: String,
    energy: Option<f64>,
    omega: Option<f64>,
    residual: Option<f64>,
    runaway_fraction: Option<f64>,
    iterations: Option<usize>,
    threshold: f64,
    below_threshold: Option<bool>,
}

fn sweep(a: SweepArgs) -> Outcome {
    let mut masses = a.masses.clone();
    if masses.is_empty() {
        return Err(usage("--masses must list at least one mass"));
    }
    if masses.iter().any(|m| !(*m > 0.0 && m.is_finite())) {
        return Err(usage("masses must be positive"));
    }
    masses.sort_by(f64::total_cmp);
    masses.dedup();
    for &m in &masses {
        nls_params(a.mu, m, a.tol, a.max_iters, a.runaway_radius)?;
    }
    let threads = sweep_threads()?;
    let form = load_form(&a.common, 0.05)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Failure { code: 1, message: format!("thread pool: {e}") })?;

    let solve = |m: f64| -> SweepRow {
        let params = NlsParams {
            tol: a.tol,
            max_iters: a.max_iters,
            runaway_radius: a.runaway_radius,
            ..NlsParams::new(a.mu, m)
        };
        let threshold = runaway_threshold(a.mu, m).unwrap_or(f64::NAN);
        match minimize_ground_state(&form, &params, InitialGuess::Auto) {
            Ok(r) => SweepRow {
                mass: m,
                status: serde_json::to_value(r.status).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
                energy: Some(r.energy),
                omega: Some(r.omega),
                residual: Some(r.residual),
                runaway_fraction: Some(r.runaway_fraction),
                iterations: Some(r.iterations),
                threshold,
                below_threshold: Some(r.energy < threshold),
            },
            Err(e) => SweepRow {
                mass: m,
                status: format!("error: {e}"),
                energy: None,
                omega: None,
                residual: None,
                runaway_fraction: None,
                iterations: None,
                threshold,
                below_threshold: None,
            },
        }
    };
    let mut rows: Vec<SweepRow> = pool.install(|| masses.par_iter().map(|&m| solve(m)).collect());
    rows.sort_by(|x, y| x.mass.total_cmp(&y.mass));

    output_dir(&a.common.out)?;
    write_rows(
        &a.common.out.join("sweep.csv"),
        &["mass", "status", "energy", "omega", "residual", "runaway_fraction", "iterations", "threshold", "below_threshold"],
        rows.iter().map(|r| {
            (
                r.mass,
                &r.status,
                r.energy,
                r.omega,
                r.residual,
                r.runaway_fraction,
                r.iterations,
                r.threshold,
                r.below_threshold,
            )
        }),
    )?;
    let largest_converged = rows.iter().filter(|r| r.status == "converged").map(|r| r.mass).fold(None, |acc: Option<f64>, m| Some(acc.map_or(m, |a| a.max(m))));
    let smallest_runaway = rows.iter().filter(|r| r.status == "runaway").map(|r| r.mass).fold(None, |acc: Option<f64>, m| Some(acc.map_or(m, |a| a.min(m))));
    let failed = rows.iter().any(|r| r.status.starts_with("error") || r.status == "max-iters");
    let summary = json!({
        "mu": a.mu,
        "largest_converged": largest_converged,
        "smallest_runaway": smallest_runaway,
        "rows": rows,
    });
    write_json(&a.common.out.join("sweep.json"), &summary)?;
    Ok((summary, if failed { 1 } else { 0 }))
}
