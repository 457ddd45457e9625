//! Bottom of the discrete spectrum of the linear Hamiltonian.
//!
//! Eigenvalues of the pencil `(A, M)` are bracketed by bisection on the
//! inertia of `A − σM` (Sylvester's law), starting from Gershgorin bounds.
//! Eigenvectors then come from shift-and-invert iteration with the shift
//! just below the bracketed eigenvalue; the second pair is obtained with the
//! ground state deflated out.

use std::sync::Arc;

use serde::Serialize;

use crate::assembly::LinearForm;
use crate::error::{Error, Result};
use crate::function::GraphFunction;
use crate::linalg::Ldlt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectralStatus {
    /// Isolated negative ground state energy, usable for continuation.
    Ok,
    /// The form has no negative eigenvalue, `E0 ≤ 0`.
    NoBoundState,
    /// First and second eigenvalues agree within ten times the tolerance.
    Degenerate,
}

#[derive(Debug, Clone)]
pub struct SpectralResult {
    /// `−inf σ(H)`: positive when the linear ground state is a bound state.
    pub e0: f64,
    /// Normalized so that `Φ₀* M Φ₀ = 1`, real and positive at its peak.
    pub phi0: GraphFunction,
    pub lambda2: f64,
    pub gap: f64,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub status: SpectralStatus,
}

impl SpectralResult {
    /// Whether continuation from this state is meaningful.
    pub fn usable(&self) -> bool {
        self.converged && self.status == SpectralStatus::Ok
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SpectralOptions {
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions {
            tol: 1e-9,
            max_iterations: 200,
        }
    }
}

pub fn linear_ground_state(form: &LinearForm, tol: f64) -> Result<SpectralResult> {
    linear_ground_state_with(
        form,
        SpectralOptions {
            tol,
            ..Default::default()
        },
    )
}

pub fn linear_ground_state_with(form: &LinearForm, opts: SpectralOptions) -> Result<SpectralResult> {
    let m = form.m();
    let (glo, ghi) = form.a().gershgorin_bounds(m);
    let span = (ghi - glo).abs().max(1.0);
    let below = glo - 1e-6 * span;

    let (lo1, hi1) = bracket(form, 1, below, ghi)?;
    let (lo2, _) = bracket(form, 2, lo1, ghi)?;

    let ones = vec![1.0; form.dim()];
    let shift1 = lo1 - 1e-9 * (1.0 + lo1.abs());
    let (v1, lam1, res1, it1) = inverse_iteration(form, shift1, &ones, None, opts)?;

    let seed: Vec<f64> = (0..form.dim())
        .map(|i| ((i * 7919 + 13) % 1009) as f64 / 1009.0 - 0.5)
        .collect();
    let shift2 = lo2 - 1e-9 * (1.0 + lo2.abs());
    let (_, lam2, res2, it2) = inverse_iteration(form, shift2, &seed, Some(&v1), opts)?;

    let converged = res1 <= opts.tol && res2 <= opts.tol && lam1 <= hi1 + opts.tol;
    let gap = lam2 - lam1;
    let e0 = -lam1;
    let status = if e0 <= 0.0 {
        SpectralStatus::NoBoundState
    } else if gap < 10.0 * opts.tol {
        SpectralStatus::Degenerate
    } else {
        SpectralStatus::Ok
    };

    let peak = v1
        .iter()
        .copied()
        .max_by(|a, b| a.abs().total_cmp(&b.abs()))
        .unwrap_or(1.0);
    let sign = if peak < 0.0 { -1.0 } else { 1.0 };
    let phi: Vec<f64> = v1.iter().map(|v| v * sign).collect();
    Ok(SpectralResult {
        e0,
        phi0: GraphFunction::from_real(Arc::clone(form.mesh()), &phi)?,
        lambda2: lam2,
        gap,
        residual: res1,
        iterations: it1 + it2,
        converged,
        status,
    })
}

/// `‖Φ₀‖_{2μ+2}^{2μ+2}`.
pub fn phi0_nonlinear_norm(res: &SpectralResult, mu: f64) -> f64 {
    res.phi0.lp_power(2.0 * mu + 2.0)
}

/// Number of eigenvalues of `(A, M)` strictly below `sigma`.
pub fn count_below(form: &LinearForm, sigma: f64) -> Result<usize> {
    let mut s = sigma;
    for _ in 0..8 {
        match form.shifted(-s).factor() {
            Ok(f) => return Ok(f.negative_pivots()),
            // exactly singular: nudge the shift
            Err(Error::SingularMatrix(_)) => s += 1e-12 * (1.0 + s.abs()),
            Err(e) => return Err(e),
        }
    }
    Err(Error::SingularMatrix(0))
}

/// Interval `(lo, hi)` with fewer than `k` eigenvalues below `lo` and at
/// least `k` below `hi`.
fn bracket(form: &LinearForm, k: usize, lo: f64, hi: f64) -> Result<(f64, f64)> {
    let (mut lo, mut hi) = (lo, hi);
    if count_below(form, hi)? < k {
        return Err(Error::InvalidArgument(format!(
            "problem has fewer than {k} eigenvalues"
        )));
    }
    for _ in 0..200 {
        if hi - lo <= 1e-12 * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if count_below(form, mid)? >= k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lo, hi))
}

type IterationResult = (Vec<f64>, f64, f64, usize);

fn inverse_iteration(
    form: &LinearForm,
    shift: f64,
    start: &[f64],
    deflate: Option<&[f64]>,
    opts: SpectralOptions,
) -> Result<IterationResult> {
    let m = form.m();
    let a = form.a();
    let solver: Ldlt<f64> = form.shifted(-shift).factor()?;
    let project = |x: &mut Vec<f64>| {
        if let Some(d) = deflate {
            let c: f64 = x.iter().zip(d).zip(m).map(|((a, b), w)| a * b * w).sum();
            for (xi, di) in x.iter_mut().zip(d) {
                *xi -= c * di;
            }
        }
        let norm = x.iter().zip(m).map(|(v, w)| v * v * w).sum::<f64>().sqrt();
        for v in x.iter_mut() {
            *v /= norm;
        }
    };
    let mut x = start.to_vec();
    project(&mut x);
    let mut lambda = a.quadratic_form_real(&x);
    let mut residual = f64::INFINITY;
    for it in 1..=opts.max_iterations {
        let mut y: Vec<f64> = x.iter().zip(m).map(|(v, w)| v * w).collect();
        solver.solve_in_place(&mut y);
        project(&mut y);
        x = y;
        let ax = a.matvec(&x);
        lambda = x.iter().zip(&ax).map(|(u, v)| u * v).sum();
        residual = ax
            .iter()
            .zip(&x)
            .zip(m)
            .map(|((av, xv), w)| {
                let r = av - lambda * w * xv;
                r * r / w
            })
            .sum::<f64>()
            .sqrt();
        if residual <= opts.tol {
            return Ok((x, lambda, residual, it));
        }
    }
    Ok((x, lambda, residual, opts.max_iterations))
}
