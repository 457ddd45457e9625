//! Every example is compiled into this test and its returned values checked.

#[allow(dead_code)]
#[path = "../examples/spectrum.rs"]
mod spectrum;

#[allow(dead_code)]
#[path = "../examples/ground_state.rs"]
mod ground_state;

#[allow(dead_code)]
#[path = "../examples/bifurcation.rs"]
mod bifurcation;

#[allow(dead_code)]
#[path = "../examples/soliton_threshold.rs"]
mod soliton_threshold;

#[allow(dead_code)]
#[path = "../examples/dynamics.rs"]
mod dynamics;

#[allow(dead_code)]
#[path = "../examples/graph_spec.rs"]
mod graph_spec;


use graphnls::bifurcation::Verdict;
use graphnls::Status;

#[test]
fn spectrum_example() {
    let rows = spectrum::run_example().unwrap();
    assert_eq!(rows.len(), 8);
    for (n, h, e0, gap) in rows {
        let tol = if h > 0.03 { 2e-3 } else { 5e-4 };
        assert!((e0 - 1.0).abs() < tol, "N = {n}, h = {h}: E0 = {e0}");
        assert!(gap > 0.5, "N = {n}: gap = {gap}");
    }
}

#[test]
fn ground_state_example() {
    let out = ground_state::run_example().unwrap();
    assert_eq!(out.len(), 3);
    assert_eq!(out[0].status, Status::Converged);
    assert!((out[0].energy + 1.0 / 6.0).abs() < 1e-3, "{}", out[0].energy);
    assert_eq!(out[1].status, Status::Converged);
    assert!(out[1].omega > 1.0);
    assert_eq!(out[2].status, Status::Runaway);
}

#[test]
fn bifurcation_example() {
    let (fit, verdicts) = bifurcation::run_example().unwrap();
    assert!((fit.exponent - 1.0).abs() < 0.05, "{fit:?}");
    assert!((fit.prefactor - 3.0).abs() < 0.15, "{fit:?}");
    assert_eq!(verdicts.len(), 3);
    assert!(verdicts.iter().all(|v| v.verdict == Verdict::ExpectedExistence));
}

#[test]
fn soliton_threshold_example() {
    let rows = soliton_threshold::run_example().unwrap();
    let (_, g1) = rows.iter().find(|(mu, _)| *mu == 1.0).copied().unwrap();
    assert!((g1 - 1.0 / 48.0).abs() < 1e-12);
    assert!(rows.iter().all(|(_, g)| *g > 0.0));
}

#[test]
fn dynamics_example() {
    let out = dynamics::run_example().unwrap();
    assert_eq!(out.len(), 2);
    for s in out {
        // the phase of a standing wave advances at rate ω
        assert!((s.phase_velocity - s.omega).abs() < 1e-3 * s.omega, "{} vs {}", s.phase_velocity, s.omega);
        assert!(s.max_orbital_distance < 1e-2);
        assert!(s.mass_drift < 1e-9);
        assert!(s.energy_drift < 1e-6);
    }
}

#[test]
fn graph_spec_example() {
    let d = graph_spec::run_example().unwrap();
    assert_eq!(d, vec![1.5, 5.0, 1.0]);
}

#[test]
fn concentration_example() {
    let curve = concentration::run_example().unwrap();
    assert_eq!(curve[0], (0.0, 0.0));
    for w in curve.windows(2) {
        assert!(w[1].1 >= w[0].1);
    }
    let last = curve.last().unwrap().1;
    let first_bump = curve[3].1;
    assert!(first_bump < last);
}
