//! The branch of standing waves `Φ(ω)` bifurcating from the linear ground
//! state at `ω = E0`, its small-amplitude asymptotics, and the energy of the
//! escaping half-line soliton that any runaway sequence must beat.

use std::sync::Arc;

use serde::Serialize;

use crate::assembly::LinearForm;
use crate::error::{Error, Result};
use crate::function::GraphFunction;
use crate::linalg::Ldlt;
use crate::nls::{energy, stationary_residual};
use crate::spectral::{phi0_nonlinear_norm, SpectralResult};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchOptions {
    pub mu: f64,
    pub omega_max: f64,
    /// Number of grid points in `ω`.
    pub steps: usize,
    /// Smallest `ω − E0` on the grid; the grid is geometric in `ω − E0`.
    pub offset_min: f64,
    pub tol: f64,
    pub max_newton: usize,
}

impl BranchOptions {
    pub fn new(mu: f64, omega_max: f64, steps: usize) -> Self {
        BranchOptions {
            mu,
            omega_max,
            steps,
            offset_min: 1e-4,
            tol: 1e-10,
            max_newton: 40,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BranchPoint {
    pub omega: f64,
    pub phi: GraphFunction,
    pub mass: f64,
    pub energy: f64,
    pub residual: f64,
    /// `(Φ₀, Φ)`, nonnegative by the sign convention.
    pub amplitude: f64,
    pub newton_iterations: usize,
}

#[derive(Debug, Clone)]
pub struct Branch {
    pub mu: f64,
    pub points: Vec<BranchPoint>,
    pub source: SpectralResult,
    /// Set when Newton failed at some grid point and the branch was cut
    /// there.
    pub stopped: Option<String>,
}

impl Branch {
    pub fn masses(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.mass).collect()
    }
}

/// Grid of `steps` frequencies, geometric in `ω − E0` from `offset_min` to
/// `omega_max − E0`.
pub fn omega_grid(e0: f64, opts: &BranchOptions) -> Result<Vec<f64>> {
    let top = opts.omega_max - e0;
    if !(opts.offset_min > 0.0 && top >= opts.offset_min) {
        return Err(Error::InvalidArgument(format!(
            "omega_max = {} must exceed E0 + {} = {}",
            opts.omega_max,
            opts.offset_min,
            e0 + opts.offset_min
        )));
    }
    if opts.steps == 0 {
        return Err(Error::InvalidArgument("at least one continuation step required".into()));
    }
    if opts.steps == 1 {
        return Ok(vec![e0 + top]);
    }
    let ratio = (top / opts.offset_min).ln() / (opts.steps - 1) as f64;
    Ok((0..opts.steps)
        .map(|k| e0 + opts.offset_min * (ratio * k as f64).exp())
        .collect())
}

/// Leading-order amplitude `a_*(ω) = ((ω − E0)/‖Φ₀‖^{2μ+2}_{2μ+2})^{1/(2μ)}`.
pub fn predicted_amplitude(spec: &SpectralResult, mu: f64, omega: f64) -> f64 {
    let q = phi0_nonlinear_norm(spec, mu);
    ((omega - spec.e0).max(0.0) / q).powf(0.5 / mu)
}

pub fn continue_branch(form: &LinearForm, spec: &SpectralResult, opts: &BranchOptions) -> Result<Branch> {
    let mu = opts.mu;
    if !(mu > 0.0 && mu < 2.0) {
        return Err(Error::InvalidArgument(format!("μ must lie in (0, 2), got {mu}")));
    }
    if !spec.converged || spec.e0 <= 0.0 || spec.gap <= 0.0 {
        return Err(Error::SpectralAssumption(format!(
            "continuation needs an isolated bound state (E0 = {}, gap = {}, converged = {})",
            spec.e0, spec.gap, spec.converged
        )));
    }
    if !Arc::ptr_eq(spec.phi0.mesh(), form.mesh()) && **spec.phi0.mesh() != **form.mesh() {
        return Err(Error::MeshMismatch);
    }
    let grid = omega_grid(spec.e0, opts)?;
    let phi0: Vec<f64> = spec.phi0.real_parts();
    let w = form.m();
    let mesh = Arc::clone(form.mesh());

    let mut points: Vec<BranchPoint> = Vec::with_capacity(grid.len());
    let mut stopped = None;
    for &omega in &grid {
        let guess: Vec<f64> = match points.last() {
            Some(p) => p.phi.real_parts(),
            None => {
                let a = predicted_amplitude(spec, mu, omega);
                phi0.iter().map(|v| a * v).collect()
            }
        };
        match newton(form, mu, omega, guess, opts) {
            Ok((mut phi, iterations)) => {
                let mut amplitude: f64 = phi.iter().zip(&phi0).zip(w).map(|((a, b), wi)| wi * a * b).sum();
                if amplitude < 0.0 {
                    phi.iter_mut().for_each(|v| *v = -*v);
                    amplitude = -amplitude;
                }
                let f = GraphFunction::from_real(Arc::clone(&mesh), &phi)?;
                // a collapse onto the trivial solution is not a branch point
                if f.mass() <= 0.0 {
                    stopped = Some(format!("Newton collapsed to zero at ω = {omega}"));
                    break;
                }
                points.push(BranchPoint {
                    omega,
                    mass: f.mass(),
                    energy: energy(&f, form, mu),
                    residual: stationary_residual(&f, omega, form, mu),
                    amplitude,
                    newton_iterations: iterations,
                    phi: f,
                });
            }
            Err(e) => {
                if points.is_empty() {
                    return Err(e);
                }
                stopped = Some(format!("stopped at ω = {omega}: {e}"));
                break;
            }
        }
    }
    Ok(Branch {
        mu,
        points,
        source: spec.clone(),
        stopped,
    })
}

fn residual_vec(form: &LinearForm, mu: f64, omega: f64, phi: &[f64]) -> (Vec<f64>, f64) {
    let w = form.m();
    let ap = form.a().matvec(phi);
    let r: Vec<f64> = ap
        .iter()
        .zip(phi)
        .zip(w)
        .map(|((a, p), wi)| a + omega * wi * p - wi * p.abs().powf(2.0 * mu) * p)
        .collect();
    let norm = r.iter().zip(w).map(|(x, wi)| x * x / wi).sum::<f64>().sqrt();
    (r, norm)
}

fn newton(form: &LinearForm, mu: f64, omega: f64, mut phi: Vec<f64>, opts: &BranchOptions) -> Result<(Vec<f64>, usize)> {
    let w = form.m();
    let (mut r, mut norm) = residual_vec(form, mu, omega, &phi);
    for it in 0..opts.max_newton {
        if norm <= opts.tol {
            return Ok((phi, it));
        }
        let mut jac = form.shifted(omega);
        let d: Vec<f64> = phi
            .iter()
            .zip(w)
            .map(|(p, wi)| -(2.0 * mu + 1.0) * wi * p.abs().powf(2.0 * mu))
            .collect();
        jac.add_diagonal(&d);
        let lu = Ldlt::new(&jac)?;
        let mut step = r.clone();
        lu.solve_in_place(&mut step);

        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = phi.iter().zip(&step).map(|(p, s)| p - t * s).collect();
            let (tr, tn) = residual_vec(form, mu, omega, &trial);
            if tn.is_finite() && (tn < norm || t < 1e-3) {
                phi = trial;
                r = tr;
                norm = tn;
                break;
            }
            t *= 0.5;
        }
    }
    if norm <= opts.tol {
        return Ok((phi, opts.max_newton));
    }
    Err(Error::NoConvergence {
        what: "Newton continuation",
        iterations: opts.max_newton,
        residual: norm,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticFit {
    /// Exponent `p` in `m ≈ C (ω − E0)^p`.
    pub exponent: f64,
    pub prefactor: f64,
    /// `‖Φ₀‖^{2μ+2}_{2μ+2}` implied by the prefactor, `C^{−μ}`.
    pub phi0_norm: f64,
    /// `E0` recovered from the `m → 0` intercept of `E(m)/m`.
    pub e0: f64,
    /// Slope of `E(m)/m` against `m`.
    pub energy_slope: f64,
    pub points_used: usize,
}

/// Fits `log m = c0 + p log(ω − E0) + c2 (ω − E0)` and
/// `E/m = −E0 + s·m` by least squares over the branch.
///
/// The linear correction in the mass fit absorbs the first higher-order term
/// of the expansion, so the exponent and prefactor are not biased by the
/// points farther from the bifurcation.
pub fn fit_asymptotics(branch: &Branch) -> Result<AsymptoticFit> {
    const NEED: usize = 5;
    let e0 = branch.source.e0;
    let pts: Vec<&BranchPoint> = branch
        .points
        .iter()
        .filter(|p| p.omega > e0 && p.mass > 0.0)
        .collect();
    if pts.len() < NEED {
        return Err(Error::BranchTooShort(pts.len(), NEED));
    }
    let rows: Vec<[f64; 3]> = pts
        .iter()
        .map(|p| {
            let d = p.omega - e0;
            [1.0, d.ln(), d]
        })
        .collect();
    let rhs: Vec<f64> = pts.iter().map(|p| p.mass.ln()).collect();
    let c = least_squares(&rows, &rhs)?;
    let prefactor = c[0].exp();

    let rows: Vec<[f64; 2]> = pts.iter().map(|p| [1.0, p.mass]).collect();
    let rhs: Vec<f64> = pts.iter().map(|p| p.energy / p.mass).collect();
    let e = least_squares(&rows, &rhs)?;

    Ok(AsymptoticFit {
        exponent: c[1],
        prefactor,
        phi0_norm: prefactor.powf(-branch.mu),
        e0: -e[0],
        energy_slope: e[1],
        points_used: pts.len(),
    })
}

/// Least squares by Householder QR on a tall `rows × K` system.
#[allow(clippy::needless_range_loop)]
fn least_squares<const K: usize>(rows: &[[f64; K]], rhs: &[f64]) -> Result<[f64; K]> {
    let n = rows.len();
    let mut a: Vec<[f64; K]> = rows.to_vec();
    let mut b = rhs.to_vec();
    for k in 0..K {
        let norm = (k..n).map(|i| a[i][k] * a[i][k]).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidArgument("rank-deficient fit".into()));
        }
        let alpha = if a[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..n).map(|i| a[i][k]).collect();
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|x| x * x).sum();
        if vv == 0.0 {
            continue;
        }
        for j in k..K {
            let s: f64 = (k..n).map(|i| v[i - k] * a[i][j]).sum::<f64>() * 2.0 / vv;
            for i in k..n {
                a[i][j] -= s * v[i - k];
            }
        }
        let s: f64 = (k..n).map(|i| v[i - k] * b[i]).sum::<f64>() * 2.0 / vv;
        for i in k..n {
            b[i] -= s * v[i - k];
        }
    }
    let mut x = [0.0; K];
    for k in (0..K).rev() {
        let s: f64 = (k + 1..K).map(|j| a[k][j] * x[j]).sum();
        if a[k][k].abs() < 1e-300 {
            return Err(Error::InvalidArgument("rank-deficient fit".into()));
        }
        x[k] = (b[k] - s) / a[k][k];
    }
    Ok(x)
}

fn check_mu(mu: f64) -> Result<()> {
    if mu > 0.0 && mu < 2.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("μ must lie in (0, 2), got {mu}")))
    }
}

/// Half-line soliton `[(μ+1)ω]^{1/(2μ)} sech^{1/μ}(μ√ω x)`.
pub fn soliton_profile(mu: f64, omega: f64, x: f64) -> f64 {
    let s = 1.0 / (mu * omega.sqrt() * x).cosh();
    ((mu + 1.0) * omega).powf(0.5 / mu) * s.powf(1.0 / mu)
}

/// `∫₀¹ (1 − t²)^{1/μ − 1} dt`, computed as `∫₀^{π/2} cos^{2/μ − 1}(s) ds`
/// so that the integrand stays bounded for every `μ < 2`.
pub fn soliton_integral(mu: f64) -> Result<f64> {
    check_mu(mu)?;
    let p = 2.0 / mu - 1.0;
    Ok(adaptive_simpson(&|s: f64| s.cos().max(0.0).powf(p), 0.0, std::f64::consts::FRAC_PI_2, 1e-15))
}

fn soliton_constant(mu: f64) -> Result<f64> {
    Ok(2.0 * (mu + 1.0).powf(1.0 / mu) / mu * soliton_integral(mu)?)
}

/// Frequency `ω` of the line soliton with mass `m`.
pub fn soliton_frequency(mu: f64, m: f64) -> Result<f64> {
    if !(m > 0.0) {
        return Err(Error::InvalidArgument(format!("mass must be positive, got {m}")));
    }
    let k = 2.0 * mu / (2.0 - mu);
    Ok(soliton_constant(mu)?.powf(-k) * m.powf(k))
}

pub fn gamma(mu: f64) -> Result<f64> {
    let k = 2.0 * mu / (2.0 - mu);
    Ok((2.0 - mu) / (2.0 + mu) * soliton_constant(mu)?.powf(-k))
}

/// `−γ_μ m^{1+2μ/(2−μ)}`: the energy of the escaping soliton, below which a
/// runaway minimizing sequence cannot go.
pub fn runaway_threshold(mu: f64, m: f64) -> Result<f64> {
    if !(m > 0.0) {
        return Err(Error::InvalidArgument(format!("mass must be positive, got {m}")));
    }
    Ok(-gamma(mu)? * m.powf(1.0 + 2.0 * mu / (2.0 - mu)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    ExpectedExistence,
    ThresholdUndecided,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExistenceVerdict {
    pub verdict: Verdict,
    pub mass: f64,
    /// Branch energy at this mass, interpolated linearly in `m`.
    pub branch_energy: f64,
    pub threshold: f64,
}

pub fn existence_verdict(branch: &Branch, m: f64) -> Result<ExistenceVerdict> {
    let pts = &branch.points;
    let (lo, hi) = match (pts.first(), pts.last()) {
        (Some(a), Some(b)) => (a.mass, b.mass),
        _ => return Err(Error::BranchTooShort(0, 2)),
    };
    if !(m >= lo && m <= hi) {
        return Err(Error::MassOutOfRange { mass: m, min: lo, max: hi });
    }
    let k = pts
        .windows(2)
        .position(|p| m >= p[0].mass.min(p[1].mass) && m <= p[0].mass.max(p[1].mass))
        .unwrap_or(0);
    let branch_energy = if pts.len() == 1 {
        pts[0].energy
    } else {
        let (a, b) = (&pts[k], &pts[k + 1]);
        let t = if b.mass == a.mass { 0.0 } else { (m - a.mass) / (b.mass - a.mass) };
        a.energy + t * (b.energy - a.energy)
    };
    let threshold = runaway_threshold(branch.mu, m)?;
    let verdict = if branch_energy < threshold {
        Verdict::ExpectedExistence
    } else {
        Verdict::ThresholdUndecided
    };
    Ok(ExistenceVerdict {
        verdict,
        mass: m,
        branch_energy,
        threshold,
    })
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    recurse(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, 50)
}
