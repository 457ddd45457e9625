//! Mass-constrained minimization of the NLS energy by a normalized,
//! preconditioned gradient flow.
//!
//! Each step moves along `−P⁻¹ g`, where `g = Af − N(f) + ωMf` is the
//! gradient projected on the mass sphere and `P = A + σM` is a shifted
//! copy of the linear operator (positive definite by construction), then
//! rescales back onto the sphere. The step length adapts; a step is accepted
//! only if the energy does not increase.

use std::sync::Arc;

use serde::Serialize;

use crate::assembly::LinearForm;
use crate::error::{Error, Result};
use crate::function::GraphFunction;
use crate::graph::{EdgeId, GraphPoint};
use crate::linalg::Ldlt;
use crate::spectral::{linear_ground_state, SpectralResult};

use super::diagnostics::runaway_indicator;
use super::functional::nonlinear_term_real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NlsParams {
    /// Nonlinearity power, `0 < μ < 2`.
    pub mu: f64,
    pub mass: f64,
    /// Initial step of the flow.
    pub step: f64,
    pub tol: f64,
    pub max_iters: usize,
    /// Runaway radius on the half-lines; `None` means a quarter of the
    /// truncation length.
    pub runaway_radius: Option<f64>,
    /// Fraction of the mass beyond the runaway radius that classifies a run
    /// as runaway.
    pub runaway_fraction: f64,
}

impl NlsParams {
    pub fn new(mu: f64, mass: f64) -> Self {
        NlsParams {
            mu,
            mass,
            step: 1.0,
            tol: 1e-8,
            max_iters: 20_000,
            runaway_radius: None,
            runaway_fraction: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.mu < 2.0) {
            return Err(Error::InvalidArgument(format!(
                "nonlinearity power must satisfy 0 < μ < 2, got {}",
                self.mu
            )));
        }
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(Error::InvalidArgument(format!("mass must be positive, got {}", self.mass)));
        }
        if !(self.step > 0.0 && self.tol > 0.0) {
            return Err(Error::InvalidArgument("step and tolerance must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Converged,
    Runaway,
    MaxIters,
}

#[derive(Debug, Clone)]
pub struct GroundStateResult {
    pub psi: GraphFunction,
    pub energy: f64,
    pub omega: f64,
    pub residual: f64,
    pub status: Status,
    pub iterations: usize,
    pub runaway_fraction: f64,
    pub runaway_edge: EdgeId,
    /// Energy of every accepted iterate, starting with the initial guess.
    pub energy_history: Vec<f64>,
    /// `H¹` norm of every accepted iterate.
    pub h1_history: Vec<f64>,
}

#[derive(Debug, Clone)]
pub enum InitialGuess {
    /// `√m·Φ₀` when the linear problem has a bound state, otherwise
    /// [`core_bump`].
    Auto,
    /// `√m·Φ₀` from an already computed spectrum.
    FromSpectrum(SpectralResult),
    Given(GraphFunction),
}

/// Gaussian bump around the first vertex, slightly tilted toward the first
/// half-line so that a symmetric saddle is not preserved by the flow.
pub fn core_bump(form: &LinearForm) -> GraphFunction {
    let mesh = Arc::clone(form.mesh());
    let graph = Arc::clone(mesh.graph());
    let field = graph.distance_field(&graph.vertex_point(0));
    let tilt_edge = graph.external_edges().next();
    GraphFunction::from_real_fn(mesh, |p: GraphPoint| {
        let d = field.at(p.edge, p.x);
        let tilt = if Some(p.edge) == tilt_edge { 1.0 + 0.1 * p.x.tanh() } else { 1.0 };
        (-0.5 * d * d).exp() * tilt
    })
}

pub fn minimize_ground_state(
    form: &LinearForm,
    params: &NlsParams,
    initial: InitialGuess,
) -> Result<GroundStateResult> {
    params.validate()?;
    let mu = params.mu;
    let target = params.mass;
    let w = form.m();
    let a = form.a();
    let radius = params
        .runaway_radius
        .unwrap_or(0.25 * form.mesh().graph().truncation());

    let start = match initial {
        InitialGuess::Given(f) => {
            if !Arc::ptr_eq(f.mesh(), form.mesh()) && **f.mesh() != **form.mesh() {
                return Err(Error::MeshMismatch);
            }
            f
        }
        InitialGuess::FromSpectrum(spec) if spec.e0 > 0.0 => spec.phi0,
        InitialGuess::FromSpectrum(_) => core_bump(form),
        InitialGuess::Auto => {
            let spec = linear_ground_state(form, 1e-9)?;
            if spec.e0 > 0.0 && spec.converged {
                spec.phi0
            } else {
                core_bump(form)
            }
        }
    };
    // ground states can be taken real and nonnegative: |f| never raises the energy
    let mut f: Vec<f64> = start.values().iter().map(|v| v.norm()).collect();
    if !renormalize(&mut f, w, target) {
        return Err(Error::InvalidArgument("initial guess vanishes".into()));
    }

    let energy_of = |f: &[f64]| -> f64 {
        let nl: f64 = f
            .iter()
            .zip(w)
            .map(|(v, wi)| wi * v.abs().powf(2.0 * mu + 2.0))
            .sum();
        a.quadratic_form_real(f) - nl / (mu + 1.0)
    };
    let mesh = Arc::clone(form.mesh());
    let to_function = |f: &[f64]| GraphFunction::from_real(Arc::clone(&mesh), f);
    let h1 = |f: &[f64]| -> Result<f64> { Ok(to_function(f)?.h1_norm()) };

    let mut energy = energy_of(&f);
    let mut energy_history = vec![energy];
    let mut h1_history = vec![h1(&f)?];
    let mut tau = params.step;
    let mut state = gradient(form, &f, mu);
    let mut precond: Option<(f64, Ldlt<f64>)> = None;
    let mut status = Status::MaxIters;
    let mut iterations = 0;

    for it in 0..params.max_iters {
        iterations = it;
        if state.residual <= params.tol {
            status = Status::Converged;
            break;
        }
        let runaway = runaway_indicator(&to_function(&f)?, radius)?;
        if runaway.fraction > params.runaway_fraction {
            status = Status::Runaway;
            break;
        }

        // refactor only when the frequency has moved appreciably
        let sigma_wanted = state.omega.max(0.0) + 0.1 * (1.0 + state.omega.abs());
        let refresh = match &precond {
            Some((s, _)) => (s - sigma_wanted).abs() > 0.05 * (1.0 + s.abs()),
            None => true,
        };
        if refresh {
            precond = Some(positive_preconditioner(form, sigma_wanted)?);
        }
        let (_, solver) = precond.as_ref().expect("preconditioner set");
        let mut dir = state.grad.clone();
        solver.solve_in_place(&mut dir);
        for d in dir.iter_mut() {
            *d = -*d;
        }

        let mut accepted = false;
        while tau > 1e-14 {
            let mut trial: Vec<f64> = f.iter().zip(&dir).map(|(x, d)| x + tau * d).collect();
            if !renormalize(&mut trial, w, target) {
                tau *= 0.5;
                continue;
            }
            let e_trial = energy_of(&trial);
            let slack = 1e-14 * (1.0 + energy.abs());
            let trial_state = gradient(form, &trial, mu);
            if e_trial < energy || (e_trial <= energy + slack && trial_state.residual < state.residual) {
                f = trial;
                energy = e_trial.min(energy);
                state = trial_state;
                accepted = true;
                tau = (tau * 1.5).min(4.0);
                break;
            }
            tau *= 0.5;
        }
        if !accepted {
            // stalled at roundoff level
            iterations = it + 1;
            break;
        }
        energy_history.push(energy_of(&f));
        h1_history.push(h1(&f)?);
        iterations = it + 1;
    }
    if status == Status::MaxIters && state.residual <= params.tol {
        status = Status::Converged;
    }

    let psi = to_function(&f)?;
    let runaway = runaway_indicator(&psi, radius)?;
    if status == Status::MaxIters && runaway.fraction > params.runaway_fraction {
        status = Status::Runaway;
    }
    Ok(GroundStateResult {
        energy: energy_of(&f),
        omega: state.omega,
        residual: state.residual,
        status,
        iterations,
        runaway_fraction: runaway.fraction,
        runaway_edge: runaway.edge,
        psi,
        energy_history,
        h1_history,
    })
}

struct FlowState {
    grad: Vec<f64>,
    omega: f64,
    residual: f64,
}

fn gradient(form: &LinearForm, f: &[f64], mu: f64) -> FlowState {
    let w = form.m();
    let af = form.a().matvec(f);
    let nf = nonlinear_term_real(f, w, mu);
    let m: f64 = f.iter().zip(w).map(|(v, wi)| wi * v * v).sum();
    let fa: f64 = f.iter().zip(&af).map(|(x, y)| x * y).sum();
    let fn_: f64 = f.iter().zip(&nf).map(|(x, y)| x * y).sum();
    let omega = (fn_ - fa) / m;
    let grad: Vec<f64> = af
        .iter()
        .zip(&nf)
        .zip(f.iter().zip(w))
        .map(|((a, n), (v, wi))| a - n + omega * wi * v)
        .collect();
    let residual = grad
        .iter()
        .zip(w)
        .map(|(g, wi)| g * g / wi)
        .sum::<f64>()
        .sqrt();
    FlowState {
        grad,
        omega,
        residual,
    }
}

fn positive_preconditioner(form: &LinearForm, sigma: f64) -> Result<(f64, Ldlt<f64>)> {
    let mut s = sigma;
    for _ in 0..60 {
        if let Ok(fact) = form.shifted(s).factor() {
            if fact.negative_pivots() == 0 {
                return Ok((s, fact));
            }
        }
        s = 2.0 * s.abs() + 1.0;
    }
    Err(Error::SingularMatrix(0))
}

fn renormalize(f: &mut [f64], w: &[f64], target: f64) -> bool {
    let m: f64 = f.iter().zip(w).map(|(v, wi)| wi * v * v).sum();
    if !(m > 0.0 && m.is_finite()) {
        return false;
    }
    let c = (target / m).sqrt();
    for v in f.iter_mut() {
        *v *= c;
    }
    true
}
