//! Time evolution of `i ∂ₜΨ = HΨ − |Ψ|^{2μ}Ψ` on the discretized graph.
//!
//! In nodal form the semi-discrete equation is
//! `M ψ' = −i (Aψ − M |ψ|^{2μ} ψ)` with the diagonal mass `M`.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::assembly::LinearForm;
use crate::error::{Error, Result};
use crate::function::GraphFunction;
use crate::linalg::{Ldlt, SymMatrix};
use crate::nls::runaway_indicator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Exact nonlinear phase half-steps around a Crank–Nicolson linear step.
    Strang,
    /// Crank–Nicolson with the energy-conserving discrete-gradient
    /// nonlinearity, solved by fixed-point iteration.
    Cn,
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strang" => Ok(Scheme::Strang),
            "cn" => Ok(Scheme::Cn),
            other => Err(Error::InvalidArgument(format!("unknown scheme '{other}' (expected strang or cn)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub mu: f64,
    pub t_final: f64,
    pub dt: f64,
    pub scheme: Scheme,
    /// Keep every `snapshot_stride`-th step; the first and last states are
    /// always kept.
    pub snapshot_stride: usize,
    /// When false the nonlinear term is dropped and the linear flow is run.
    pub nonlinear: bool,
    pub fixed_point_tol: f64,
    pub max_fixed_point: usize,
    /// Radius for the per-snapshot runaway indicator; `None` means a quarter
    /// of the truncation length.
    pub runaway_radius: Option<f64>,
}

impl EvolveOptions {
    pub fn new(mu: f64, t_final: f64, dt: f64) -> Self {
        EvolveOptions {
            mu,
            t_final,
            dt,
            scheme: Scheme::Strang,
            snapshot_stride: 100,
            nonlinear: true,
            fixed_point_tol: 1e-13,
            max_fixed_point: 100,
            runaway_radius: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepRecord {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    pub psi: GraphFunction,
    pub runaway_fraction: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub dt: f64,
    pub scheme: Scheme,
    pub mu: f64,
    pub nonlinear: bool,
    pub snapshots: Vec<Snapshot>,
    /// Mass and energy after every step, starting at `t = 0`.
    pub records: Vec<StepRecord>,
}

impl Trajectory {
    pub fn final_state(&self) -> Option<&GraphFunction> {
        self.snapshots.last().map(|s| &s.psi)
    }
}

fn discrete_energy(form: &LinearForm, psi: &[Complex64], mu: f64, nonlinear: bool) -> f64 {
    let lin = form.energy_lin_values(psi);
    if !nonlinear {
        return lin;
    }
    let nl: f64 = psi
        .iter()
        .zip(form.m())
        .map(|(v, w)| w * v.norm_sqr().powf(mu + 1.0))
        .sum();
    lin - nl / (mu + 1.0)
}

fn discrete_mass(form: &LinearForm, psi: &[Complex64]) -> f64 {
    psi.iter().zip(form.m()).map(|(v, w)| w * v.norm_sqr()).sum()
}

pub fn evolve(f0: &GraphFunction, form: &LinearForm, opts: &EvolveOptions) -> Result<Trajectory> {
    let mu = opts.mu;
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::InvalidArgument(format!("μ must be positive, got {mu}")));
    }
    if !(opts.dt > 0.0 && opts.t_final >= opts.dt) {
        return Err(Error::InvalidArgument(format!(
            "need dt > 0 and T ≥ dt, got dt = {}, T = {}",
            opts.dt, opts.t_final
        )));
    }
    if !Arc::ptr_eq(f0.mesh(), form.mesh()) && **f0.mesh() != **form.mesh() {
        return Err(Error::MeshMismatch);
    }
    let steps = (opts.t_final / opts.dt - 1e-9).ceil() as usize;
    let stride = opts.snapshot_stride.max(1);
    let radius = opts
        .runaway_radius
        .unwrap_or(0.25 * form.mesh().graph().truncation());
    let dt = opts.dt;
    let w = form.m();
    let mesh = Arc::clone(form.mesh());

    // (M ± i dt/2 A)
    let half = Complex64::new(0.0, 0.5 * dt);
    let mut lhs: SymMatrix<Complex64> = form.a().map(|a| half * a);
    let mw: Vec<Complex64> = w.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    lhs.add_diagonal(&mw);
    let mut rhs_op: SymMatrix<Complex64> = form.a().map(|a| -half * a);
    rhs_op.add_diagonal(&mw);
    let solver = Ldlt::new(&lhs)?;

    let snapshot = |t: f64, psi: &[Complex64]| -> Result<Snapshot> {
        let f = GraphFunction::from_values(Arc::clone(&mesh), psi.to_vec())?;
        let runaway_fraction = runaway_indicator(&f, radius)?.fraction;
        Ok(Snapshot { t, psi: f, runaway_fraction })
    };
    let record = |t: f64, psi: &[Complex64]| StepRecord {
        t,
        mass: discrete_mass(form, psi),
        energy: discrete_energy(form, psi, mu, opts.nonlinear),
    };

    let mut psi: Vec<Complex64> = f0.values().to_vec();
    let mut snapshots = vec![snapshot(0.0, &psi)?];
    let mut records = Vec::with_capacity(steps + 1);
    records.push(record(0.0, &psi));

    for n in 1..=steps {
        match (opts.scheme, opts.nonlinear) {
            (_, false) => {
                psi = rhs_op.matvec(&psi);
                solver.solve_in_place(&mut psi);
            }
            (Scheme::Strang, true) => {
                phase_rotation(&mut psi, 0.5 * dt, mu);
                psi = rhs_op.matvec(&psi);
                solver.solve_in_place(&mut psi);
                phase_rotation(&mut psi, 0.5 * dt, mu);
            }
            (Scheme::Cn, true) => {
                psi = conservative_cn_step(&psi, &rhs_op, &solver, w, dt, mu, opts)?;
            }
        }
        let t = n as f64 * dt;
        records.push(record(t, &psi));
        if n % stride == 0 || n == steps {
            snapshots.push(snapshot(t, &psi)?);
        }
    }
    Ok(Trajectory {
        dt,
        scheme: opts.scheme,
        mu,
        nonlinear: opts.nonlinear,
        snapshots,
        records,
    })
}

/// Exact flow of `ψ' = i |ψ|^{2μ} ψ` over time `tau`.
fn phase_rotation(psi: &mut [Complex64], tau: f64, mu: f64) {
    for v in psi.iter_mut() {
        let theta = tau * v.norm_sqr().powf(mu);
        *v *= Complex64::from_polar(1.0, theta);
    }
}

/// Discrete gradient of `F(s) = s^{μ+1}/(μ+1)` between `s` and `s⁺`.
fn discrete_gradient(s_new: f64, s_old: f64, mu: f64) -> f64 {
    let d = s_new - s_old;
    let scale = s_new.abs().max(s_old.abs());
    if d.abs() <= 1e-9 * scale || scale == 0.0 {
        // second-order accurate midpoint value of F'
        return (0.5 * (s_new + s_old)).max(0.0).powf(mu);
    }
    (s_new.powf(mu + 1.0) - s_old.powf(mu + 1.0)) / ((mu + 1.0) * d)
}

fn conservative_cn_step(
    psi: &[Complex64],
    rhs_op: &SymMatrix<Complex64>,
    solver: &Ldlt<Complex64>,
    w: &[f64],
    dt: f64,
    mu: f64,
    opts: &EvolveOptions,
) -> Result<Vec<Complex64>> {
    let base = rhs_op.matvec(psi);
    let half = Complex64::new(0.0, 0.5 * dt);
    let norm = |v: &[Complex64]| v.iter().zip(w).map(|(x, wi)| wi * x.norm_sqr()).sum::<f64>().sqrt();
    let scale = norm(psi).max(1e-300);
    let mut next = psi.to_vec();
    let mut change = f64::INFINITY;
    for _ in 0..opts.max_fixed_point {
        let mut rhs = base.clone();
        for i in 0..psi.len() {
            let g = discrete_gradient(next[i].norm_sqr(), psi[i].norm_sqr(), mu);
            rhs[i] += half * w[i] * g * (next[i] + psi[i]);
        }
        solver.solve_in_place(&mut rhs);
        let diff: Vec<Complex64> = rhs.iter().zip(&next).map(|(a, b)| a - b).collect();
        change = norm(&diff) / scale;
        next = rhs;
        if change <= opts.fixed_point_tol {
            return Ok(next);
        }
    }
    Err(Error::NoConvergence {
        what: "implicit nonlinear step",
        iterations: opts.max_fixed_point,
        residual: change,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConservationReport {
    pub mass_drift: f64,
    pub energy_drift: f64,
}

/// Smallest denominator used for relative drifts.
pub const DRIFT_FLOOR: f64 = 1e-12;

pub fn conservation_report(traj: &Trajectory) -> Result<ConservationReport> {
    if traj.records.len() < 2 {
        return Err(Error::EmptyTrajectory);
    }
    let first = traj.records[0];
    let m0 = first.mass.abs().max(DRIFT_FLOOR);
    let e0 = first.energy.abs().max(DRIFT_FLOOR);
    let mut report = ConservationReport {
        mass_drift: 0.0,
        energy_drift: 0.0,
    };
    for r in &traj.records[1..] {
        report.mass_drift = report.mass_drift.max((r.mass - first.mass).abs() / m0);
        report.energy_drift = report.energy_drift.max((r.energy - first.energy).abs() / e0);
    }
    Ok(report)
}

/// `min_θ ‖Ψ(t) − e^{iθ} ref‖_{H¹}` for every snapshot. The minimizing phase
/// is the argument of the `H¹` inner product `(Ψ(t), ref)_{H¹}`.
pub fn orbital_distance(traj: &Trajectory, reference: &GraphFunction) -> Result<Vec<f64>> {
    let rr = reference.h1_inner(reference)?.re;
    traj.snapshots
        .iter()
        .map(|s| {
            let c = s.psi.h1_inner(reference)?;
            let pp = s.psi.h1_inner(&s.psi)?.re;
            Ok((pp + rr - 2.0 * c.norm()).max(0.0).sqrt())
        })
        .collect()
}

/// Unwrapped phase of `(Ψ(t), ref)` along the snapshots; for a standing wave
/// `e^{iωt}Φ` it grows like `ωt`.
pub fn phase_track(traj: &Trajectory, reference: &GraphFunction) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(traj.snapshots.len());
    let mut last: Option<f64> = None;
    for s in &traj.snapshots {
        let raw = s.psi.inner(reference)?.arg();
        let value = match last {
            None => raw,
            Some(prev) => {
                let tau = std::f64::consts::TAU;
                let mut v = raw;
                while v - prev > std::f64::consts::PI {
                    v -= tau;
                }
                while prev - v > std::f64::consts::PI {
                    v += tau;
                }
                v
            }
        };
        out.push(value);
        last = Some(value);
    }
    Ok(out)
}
