//! Bottom of the spectrum of δ-stars: `E0 = α²/N²` for `N` half-lines joined
//! at a vertex of strength `α < 0`, and the O(h²) approach to it.
//!
//! ```text
//! cargo run --example spectrum
//! ```

use std::sync::Arc;

use graphnls::graph::star;
use graphnls::spectral::linear_ground_state;
use graphnls::{assemble, Mesh};

pub fn run_example() -> graphnls::Result<Vec<(usize, f64, f64, f64)>> {
    let mut rows = Vec::new();
    for n in [2usize, 3, 4, 5] {
        let alpha = -(n as f64);
        for h in [0.04, 0.02] {
            let graph = star(n, alpha)?.with_truncation(20.0);
            let form = assemble(Arc::new(Mesh::new(Arc::new(graph), h)?))?;
            let res = linear_ground_state(&form, 1e-10)?;
            println!(
                "N = {n}  h = {h:<5}  E0 = {:.8}  (exact {:.1})  gap = {:.4}  status = {:?}",
                res.e0,
                alpha * alpha / (n * n) as f64,
                res.gap,
                res.status
            );
            rows.push((n, h, res.e0, res.gap));
        }
    }
    Ok(rows)
}

fn main() -> graphnls::Result<()> {
    run_example().map(|_| ())
}
