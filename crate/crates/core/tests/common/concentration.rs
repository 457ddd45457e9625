//! Concentration function and dichotomy checks for one function.

use graphnls::nls::{concentration_function, dichotomy_split, Centers};
use graphnls::{GraphFunction, GraphPoint};
use proptest::prelude::*;

/// `ρ(f, 0) = 0`, `ρ` nondecreasing in `t`, and `ρ(f, t) = M[f]` once the
/// ball covers the truncated graph.
pub fn rho_case(f: &GraphFunction) -> Result<(), TestCaseError> {
    let total = f.mass();
    let diameter = f.mesh().truncated_diameter();
    prop_assert_eq!(concentration_function(f, 0.0, Centers::AllNodes), 0.0);
    let radii = [0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, diameter + 1.0];
    let mut previous = 0.0;
    for t in radii {
        let rho = concentration_function(f, t, Centers::AllNodes);
        prop_assert!(rho >= previous, "ρ decreased at t = {t}: {rho} < {previous}");
        prop_assert!(rho <= total * (1.0 + 1e-12));
        previous = rho;
    }
    prop_assert!((previous - total).abs() <= 1e-12 * total, "ρ(∞) = {previous}, M = {total}");
    Ok(())
}

/// Disjoint supports and `|R| + |S| ≤ |f|` at every node, plus the mass
/// bookkeeping `M[f] − M[R] − M[S] ≤ M[f on B(y,t) ∖ B(y,t/2)]`.
pub fn dichotomy_case(f: &GraphFunction, y: &GraphPoint, t: f64) -> Result<(), TestCaseError> {
    let split = dichotomy_split(f, y, t).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let mesh = f.mesh();
    let field = mesh.graph().distance_field(y);
    let mut annulus = 0.0;
    for (k, p) in mesh.dof_points().iter().enumerate() {
        let (r, s, v) = (split.inner.values()[k], split.outer.values()[k], f.values()[k]);
        prop_assert!(r == 0.0.into() || s == 0.0.into(), "overlapping supports at node {k}");
        prop_assert!(r.norm() + s.norm() <= v.norm(), "|R| + |S| > |f| at node {k}");
        let d = field.at(p.edge, p.x);
        if d > 0.5 * t && d < t {
            annulus += mesh.weights()[k] * v.norm_sqr();
        }
    }
    let (mf, mr, ms) = (f.mass(), split.inner.mass(), split.outer.mass());
    prop_assert!(mr + ms <= mf * (1.0 + 1e-12));
    prop_assert!(mf - mr - ms <= annulus + 1e-12 * mf, "lost {} > annulus {annulus}", mf - mr - ms);
    Ok(())
}
