//! Concentration function, dichotomy cut-offs and runaway detection.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::function::GraphFunction;
use crate::graph::{EdgeId, GraphPoint};

/// Candidate centers for the supremum in the concentration function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Centers {
    AllNodes,
    /// Every vertex plus every `stride`-th unknown.
    Subsample(usize),
}

/// `ρ(f, t) = sup_y ‖f‖²_{B(y,t)}`, the supremum taken over the candidate
/// centers. Ball masses use the nodal quadrature of [`GraphFunction::mass`]
/// with the closed ball, and `ρ(f, 0) = 0`.
pub fn concentration_function(f: &GraphFunction, t: f64, centers: Centers) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let mesh = f.mesh();
    let graph = mesh.graph();
    let points = mesh.dof_points();
    let candidates: Vec<GraphPoint> = match centers {
        Centers::AllNodes => points.to_vec(),
        Centers::Subsample(stride) => (0..graph.num_vertices())
            .map(|v| graph.vertex_point(v))
            .chain(points.iter().step_by(stride.max(1)).copied())
            .collect(),
    };
    let density: Vec<f64> = f
        .values()
        .iter()
        .zip(mesh.weights())
        .map(|(v, w)| w * v.norm_sqr())
        .collect();
    candidates
        .iter()
        .map(|y| {
            let field = graph.distance_field(y);
            points
                .iter()
                .zip(&density)
                .filter(|(p, _)| field.at(p.edge, p.x) <= t)
                .map(|(_, d)| d)
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

/// Plateau cut-off: 1 on `[0, 1/2]`, 0 on `[3/4, ∞)`.
pub fn inner_cutoff(s: f64) -> f64 {
    1.0 - smoothstep((s - 0.5) / 0.25)
}

/// Plateau cut-off: 0 on `[0, 3/4]`, 1 on `[1, ∞)`.
pub fn outer_cutoff(s: f64) -> f64 {
    smoothstep((s - 0.75) / 0.25)
}

// C¹ monotone ramp from 0 (s ≤ 0) to 1 (s ≥ 1)
fn smoothstep(s: f64) -> f64 {
    let s = s.clamp(0.0, 1.0);
    s * s * (3.0 - 2.0 * s)
}

#[derive(Debug, Clone)]
pub struct Dichotomy {
    /// Part concentrated near the center.
    pub inner: GraphFunction,
    /// Part far from the center.
    pub outer: GraphFunction,
    /// Remainder `f − inner − outer`, supported on the annulus.
    pub rest: GraphFunction,
}

/// Splits `f` with the plateau cut-offs `θ(d(·,y)/t)` and `φ(d(·,y)/t)`.
pub fn dichotomy_split(f: &GraphFunction, y: &GraphPoint, t: f64) -> Result<Dichotomy> {
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!("dichotomy radius must be positive, got {t}")));
    }
    let mesh = Arc::clone(f.mesh());
    let field = mesh.graph().distance_field(y);
    let mut inner = Vec::with_capacity(f.values().len());
    let mut outer = Vec::with_capacity(f.values().len());
    let mut rest = Vec::with_capacity(f.values().len());
    for (p, &v) in mesh.dof_points().iter().zip(f.values()) {
        let s = field.at(p.edge, p.x) / t;
        let (th, ph) = (inner_cutoff(s), outer_cutoff(s));
        let r = v * th;
        let o = v * ph;
        inner.push(r);
        outer.push(o);
        rest.push(v - r - o);
    }
    Ok(Dichotomy {
        inner: GraphFunction::from_values(Arc::clone(&mesh), inner)?,
        outer: GraphFunction::from_values(Arc::clone(&mesh), outer)?,
        rest: GraphFunction::from_values(mesh, rest)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunawayReport {
    /// Largest fraction of the mass found beyond coordinate `R` on a single
    /// half-line.
    pub fraction: f64,
    pub edge: EdgeId,
}

/// Fraction of the mass sitting beyond coordinate `radius` on the half-line
/// that carries most of it.
pub fn runaway_indicator(f: &GraphFunction, radius: f64) -> Result<RunawayReport> {
    let mesh = f.mesh();
    let graph = mesh.graph();
    if !(radius >= 0.0 && radius < graph.truncation()) {
        return Err(Error::InvalidArgument(format!(
            "runaway radius {radius} must lie in [0, {})",
            graph.truncation()
        )));
    }
    let total = f.mass();
    let mut best = RunawayReport {
        fraction: 0.0,
        edge: graph.external_edges().next().unwrap_or(0),
    };
    if total == 0.0 {
        return Ok(best);
    }
    let weights = mesh.weights();
    for e in graph.external_edges() {
        let em = mesh.edge(e);
        let tail: f64 = em
            .dofs
            .iter()
            .enumerate()
            .filter(|(k, _)| em.x(*k) > radius)
            .filter_map(|(_, d)| *d)
            .map(|d| weights[d] * f.values()[d].norm_sqr())
            .sum();
        if tail / total > best.fraction {
            best = RunawayReport {
                fraction: tail / total,
                edge: e,
            };
        }
    }
    Ok(best)
}
