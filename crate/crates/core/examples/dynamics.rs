//! Time evolution: a standing wave of the δ-star rotates in phase at its
//! frequency and keeps its shape, while mass and energy stay constant.

use std::sync::Arc;

use graphnls::bifurcation::continue_branch;
use graphnls::dynamics::{conservation_report, evolve, orbital_distance, phase_track, EvolveOptions, Scheme};
use graphnls::graph::star;
use graphnls::spectral::linear_ground_state;
use graphnls::{assemble, BranchOptions, Mesh};

pub struct Summary {
    pub omega: f64,
    pub phase_velocity: f64,
    pub max_orbital_distance: f64,
    pub mass_drift: f64,
    pub energy_drift: f64,
}

pub fn run_example() -> graphnls::Result<Vec<Summary>> {
    let graph = star(3, -3.0)?.with_truncation(20.0);
    let form = assemble(Arc::new(Mesh::new(Arc::new(graph), 0.05)?))?;
    let spec = linear_ground_state(&form, 1e-10)?;
    let branch = continue_branch(
        &form,
        &spec,
        &BranchOptions {
            offset_min: 1e-2,
            ..BranchOptions::new(1.0, 1.5, 8)
        },
    )?;
    let wave = &branch.points.last().expect("branch has points");

    let mut out = Vec::new();
    for scheme in [Scheme::Strang, Scheme::Cn] {
        let opts = EvolveOptions {
            scheme,
            snapshot_stride: 50,
            ..EvolveOptions::new(1.0, 5.0, 0.01)
        };
        let traj = evolve(&wave.phi, &form, &opts)?;
        let report = conservation_report(&traj)?;
        let dist = orbital_distance(&traj, &wave.phi)?;
        let phases = phase_track(&traj, &wave.phi)?;
        let last = traj.snapshots.last().expect("snapshots");
        let summary = Summary {
            omega: wave.omega,
            phase_velocity: phases.last().unwrap() / last.t,
            max_orbital_distance: dist.iter().copied().fold(0.0, f64::max),
            mass_drift: report.mass_drift,
            energy_drift: report.energy_drift,
        };
        println!(
            "{scheme:?}: ω = {:.4}, phase velocity {:.6}, max orbital distance {:.2e}, mass drift {:.1e}, energy drift {:.1e}",
            summary.omega, summary.phase_velocity, summary.max_orbital_distance, summary.mass_drift, summary.energy_drift
        );
        out.push(summary);
    }
    Ok(out)
}

fn main() -> graphnls::Result<()> {
    run_example().map(|_| ())
}
