//! Concentration function and dichotomy splitting of a two-bump function on
//! the tadpole graph.

use std::sync::Arc;

use graphnls::nls::{concentration_function, dichotomy_split, Centers};
use graphnls::spec_file::parse_graph_spec;
use graphnls::{GraphFunction, GraphPoint, Mesh};

pub fn run_example() -> graphnls::Result<Vec<(f64, f64)>> {
    let graph = parse_graph_spec(include_str!("../data/tadpole_well.json"))?.with_truncation(30.0);
    let mesh = Arc::new(Mesh::new(Arc::new(graph), 0.05)?);
    // one bump on the loop, one far out on the half-line
    let f = GraphFunction::from_real_fn(Arc::clone(&mesh), |p| match p.edge {
        0 => (-(p.x - 1.5f64).powi(2) * 4.0).exp(),
        _ => 0.7 * (-(p.x - 15.0f64).powi(2)).exp(),
    });
    let total = f.mass();
    let mut curve = Vec::new();
    for t in [0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 20.0, 40.0] {
        let rho = concentration_function(&f, t, Centers::Subsample(4));
        println!("ρ(f, {t:>4}) = {rho:.6}   ({:.1}% of the mass)", 100.0 * rho / total);
        curve.push((t, rho));
    }
    let split = dichotomy_split(&f, &GraphPoint::new(0, 1.5), 8.0)?;
    println!(
        "dichotomy at radius 8: M[R] = {:.6}, M[S] = {:.6}, M[Z] = {:.2e}, M[f] = {total:.6}",
        split.inner.mass(),
        split.outer.mass(),
        split.rest.mass()
    );
    Ok(curve)
}

fn main() -> graphnls::Result<()> {
    run_example().map(|_| ())
}
