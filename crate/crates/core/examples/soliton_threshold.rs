//! The half-line soliton: profile, frequency fixed by the mass, and the
//! energy bound `−γ_μ m^{1+2μ/(2−μ)}` that any runaway sequence must respect.

use graphnls::bifurcation::{gamma, runaway_threshold, soliton_frequency, soliton_profile};

pub fn run_example() -> graphnls::Result<Vec<(f64, f64)>> {
    let mut gammas = Vec::new();
    println!("{:>5} {:>14} {:>14} {:>14}", "μ", "γ_μ", "ω(m=1)", "threshold(m=1)");
    for mu in [0.25, 0.5, 1.0, 1.5, 1.9] {
        let g = gamma(mu)?;
        println!(
            "{mu:>5} {g:>14.6e} {:>14.6e} {:>14.6e}",
            soliton_frequency(mu, 1.0)?,
            runaway_threshold(mu, 1.0)?
        );
        gammas.push((mu, g));
    }
    let omega = soliton_frequency(1.0, 2.0)?;
    println!("cubic soliton with m = 2: ω = {omega}, φ(0) = {:.6}", soliton_profile(1.0, omega, 0.0));
    Ok(gammas)
}

fn main() -> graphnls::Result<()> {
    run_example().map(|_| ())
}
