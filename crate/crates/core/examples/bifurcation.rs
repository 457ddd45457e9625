//! Continuation of the standing-wave branch from the linear ground state of
//! the δ-star, the fitted small-amplitude laws, and the comparison with the
//! energy of an escaping soliton.

use std::sync::Arc;

use graphnls::bifurcation::{continue_branch, existence_verdict, fit_asymptotics, AsymptoticFit, ExistenceVerdict};
use graphnls::graph::star;
use graphnls::spectral::{linear_ground_state, phi0_nonlinear_norm};
use graphnls::{assemble, BranchOptions, Mesh};

pub fn run_example() -> graphnls::Result<(AsymptoticFit, Vec<ExistenceVerdict>)> {
    let graph = star(3, -3.0)?.with_truncation(30.0);
    let form = assemble(Arc::new(Mesh::new(Arc::new(graph), 0.04)?))?;
    let spec = linear_ground_state(&form, 1e-10)?;
    let opts = BranchOptions {
        offset_min: 1e-3,
        ..BranchOptions::new(1.0, spec.e0 + 2.0, 24)
    };
    let branch = continue_branch(&form, &spec, &opts)?;
    println!("{:>10} {:>12} {:>12} {:>10}", "ω", "m(ω)", "E", "a");
    for p in branch.points.iter().step_by(3) {
        println!("{:>10.5} {:>12.6} {:>12.6} {:>10.5}", p.omega, p.mass, p.energy, p.amplitude);
    }

    let near = graphnls::bifurcation::Branch {
        points: branch.points.iter().filter(|p| p.omega - spec.e0 <= 0.1).cloned().collect(),
        ..branch.clone()
    };
    let fit = fit_asymptotics(&near)?;
    println!(
        "m ≈ {:.4}·(ω − E0)^{:.4}; expected exponent 1, prefactor 1/‖Φ₀‖₄⁴ = {:.4}",
        fit.prefactor,
        fit.exponent,
        1.0 / phi0_nonlinear_norm(&spec, 1.0)
    );
    println!("E(m)/m → {:.5} as m → 0 (−E0 = {:.5})", -fit.e0, -spec.e0);

    let mut verdicts = Vec::new();
    for m in [0.1, 1.0, 4.0] {
        let v = existence_verdict(&branch, m)?;
        println!(
            "m = {m:<4} branch energy {:+.5} vs soliton threshold {:+.5}: {:?}",
            v.branch_energy, v.threshold, v.verdict
        );
        verdicts.push(v);
    }
    Ok((fit, verdicts))
}

fn main() -> graphnls::Result<()> {
    run_example().map(|_| ())
}
