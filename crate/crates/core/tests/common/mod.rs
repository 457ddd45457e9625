//! Helpers shared by the integration tests.

#![allow(dead_code)]

use std::sync::Arc;

use graphnls::{assemble, GraphFunction, GraphPoint, LinearForm, Mesh, MetricGraph};
use num_complex::Complex64;
use proptest::prelude::*;

pub fn mesh_of(graph: MetricGraph, h: f64) -> Arc<Mesh> {
    Arc::new(Mesh::new(Arc::new(graph), h).unwrap())
}

pub fn form_of(graph: MetricGraph, h: f64) -> LinearForm {
    assemble(mesh_of(graph, h)).unwrap()
}

/// One radial bump `A e^{−d²/s²} e^{ikd}` around a graph point, where `d` is
/// the graph distance to the center.
#[derive(Debug, Clone, Copy)]
pub struct Bump {
    pub edge: usize,
    pub position: f64,
    pub amplitude: f64,
    pub width: f64,
    pub wavenumber: f64,
}

/// Up to four bumps centered within distance `reach` of the vertices. Edge
/// indices wrap around the number of edges of the graph.
pub fn bumps(edges: usize, reach: f64) -> impl Strategy<Value = Vec<Bump>> {
    prop::collection::vec(
        (0..edges, 0.0..1.0f64, -2.0..2.0f64, 0.3..4.0f64, -3.0..3.0f64).prop_map(
            move |(edge, s, amplitude, width, wavenumber)| Bump {
                edge,
                position: s * reach,
                amplitude,
                width,
                wavenumber,
            },
        ),
        1..5,
    )
}

pub fn bump_function(mesh: &Arc<Mesh>, bumps: &[Bump]) -> GraphFunction {
    let graph = Arc::clone(mesh.graph());
    let fields: Vec<_> = bumps
        .iter()
        .map(|b| {
            let edge = b.edge % graph.num_edges();
            let len = graph.edge(edge).length;
            graph.distance_field(&GraphPoint::new(edge, b.position.min(len)))
        })
        .collect();
    GraphFunction::from_fn(Arc::clone(mesh), |p| {
        bumps
            .iter()
            .zip(&fields)
            .map(|(b, field)| {
                let d = field.at(p.edge, p.x);
                Complex64::from_polar(b.amplitude * (-(d / b.width).powi(2)).exp(), b.wavenumber * d)
            })
            .sum()
    })
}

/// Loop of length 3 with a potential well, attached to a half-line.
pub fn tadpole() -> MetricGraph {
    graphnls::spec_file::parse_graph_spec(include_str!("../../data/tadpole_well.json"))
        .unwrap()
        .with_truncation(30.0)
}

pub mod dsl;
pub mod geometry;
pub mod concentration;
