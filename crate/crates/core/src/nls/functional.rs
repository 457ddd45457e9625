use num_complex::Complex64;

use crate::assembly::LinearForm;
use crate::function::GraphFunction;

/// `M[f] = ‖f‖²`.
pub fn mass(f: &GraphFunction) -> f64 {
    f.mass()
}

/// `E[f] = E_lin[f] − ‖f‖_{2μ+2}^{2μ+2} / (μ+1)`.
pub fn energy(f: &GraphFunction, form: &LinearForm, mu: f64) -> f64 {
    form.energy_lin(f) - f.lp_power(2.0 * mu + 2.0) / (mu + 1.0)
}

/// Nodal nonlinearity `w_i |f_i|^{2μ} f_i`; half the gradient of the
/// nonlinear part of the energy.
pub fn nonlinear_term(values: &[Complex64], weights: &[f64], mu: f64) -> Vec<Complex64> {
    values
        .iter()
        .zip(weights)
        .map(|(v, w)| v * (w * v.norm().powf(2.0 * mu)))
        .collect()
}

pub(crate) fn nonlinear_term_real(values: &[f64], weights: &[f64], mu: f64) -> Vec<f64> {
    values
        .iter()
        .zip(weights)
        .map(|(v, w)| w * v.abs().powf(2.0 * mu) * v)
        .collect()
}

/// `‖Af − N(f) + ωMf‖_{M⁻¹}`: residual of the stationary equation
/// `HΦ − |Φ|^{2μ}Φ = −ωΦ`.
pub fn stationary_residual(f: &GraphFunction, omega: f64, form: &LinearForm, mu: f64) -> f64 {
    let af: Vec<Complex64> = form.a().matvec(f.values());
    let nf = nonlinear_term(f.values(), form.m(), mu);
    af.iter()
        .zip(&nf)
        .zip(f.values())
        .zip(form.m())
        .map(|(((a, n), v), w)| (a - n + v * (omega * w)).norm_sqr() / w)
        .sum::<f64>()
        .sqrt()
}

/// Exact discrete Lagrange multiplier `ω = (f*N(f) − f*Af) / f*Mf` of the
/// constrained critical point.
pub fn lagrange_frequency(f: &GraphFunction, form: &LinearForm, mu: f64) -> f64 {
    let m = form.mass(f);
    if m == 0.0 {
        return 0.0;
    }
    (f.lp_power(2.0 * mu + 2.0) - form.energy_lin(f)) / m
}
