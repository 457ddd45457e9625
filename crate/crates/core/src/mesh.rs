//! Uniform per-edge meshes with shared vertex unknowns.
//!
//! Unknowns are numbered edge by edge over interior nodes first, then one
//! unknown per vertex. The far ends of truncated half-lines carry a
//! homogeneous Dirichlet condition and have no unknown.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, GraphPoint, MetricGraph, VertexId};

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeMesh {
    pub intervals: usize,
    pub h: f64,
    /// Unknown index of node `k` (`x = k·h`), `None` at a Dirichlet end.
    pub dofs: Vec<Option<usize>>,
}

impl EdgeMesh {
    pub fn x(&self, k: usize) -> f64 {
        k as f64 * self.h
    }

    pub fn len(&self) -> f64 {
        self.intervals as f64 * self.h
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    graph: Arc<MetricGraph>,
    edges: Vec<EdgeMesh>,
    vertex_dofs: Vec<usize>,
    points: Vec<GraphPoint>,
    weights: Vec<f64>,
}

impl Mesh {
    /// Meshes every edge with `ceil(L_e / h_target)` intervals, half-lines
    /// at their truncation length.
    pub fn new(graph: Arc<MetricGraph>, h_target: f64) -> Result<Self> {
        let shortest = (0..graph.num_edges())
            .map(|e| graph.truncated_length(e))
            .fold(f64::INFINITY, f64::min);
        if !(h_target > 0.0 && h_target < shortest) {
            return Err(Error::MeshWidth {
                h: h_target,
                shortest,
            });
        }
        let mut next = 0;
        let mut edges = Vec::with_capacity(graph.num_edges());
        let mut interior: Vec<Vec<usize>> = Vec::with_capacity(graph.num_edges());
        for e in 0..graph.num_edges() {
            let len = graph.truncated_length(e);
            let n = ((len / h_target) - 1e-9).ceil().max(2.0) as usize;
            interior.push((next..next + n - 1).collect());
            next += n - 1;
            edges.push(EdgeMesh {
                intervals: n,
                h: len / n as f64,
                dofs: Vec::new(),
            });
        }
        let vertex_dofs: Vec<usize> = (next..next + graph.num_vertices()).collect();
        let n_dof = next + graph.num_vertices();
        let mut points = vec![GraphPoint::new(0, 0.0); n_dof];
        let mut weights = vec![0.0; n_dof];
        for (e, em) in edges.iter_mut().enumerate() {
            let edge = graph.edge(e);
            let mut dofs = Vec::with_capacity(em.intervals + 1);
            dofs.push(Some(vertex_dofs[edge.from]));
            dofs.extend(interior[e].iter().map(|&d| Some(d)));
            dofs.push(edge.to.map(|v| vertex_dofs[v]));
            for (k, d) in dofs.iter().enumerate() {
                if let Some(d) = *d {
                    let end = k == 0 || k == em.intervals;
                    weights[d] += if end { 0.5 * em.h } else { em.h };
                    if !end {
                        points[d] = GraphPoint::new(e, em.x(k));
                    }
                }
            }
            em.dofs = dofs;
        }
        for v in 0..graph.num_vertices() {
            points[vertex_dofs[v]] = graph.vertex_point(v);
        }
        Ok(Mesh {
            graph,
            edges,
            vertex_dofs,
            points,
            weights,
        })
    }

    pub fn graph(&self) -> &Arc<MetricGraph> {
        &self.graph
    }

    pub fn num_dofs(&self) -> usize {
        self.weights.len()
    }

    pub fn edge(&self, e: EdgeId) -> &EdgeMesh {
        &self.edges[e]
    }

    pub fn edges(&self) -> &[EdgeMesh] {
        &self.edges
    }

    pub fn vertex_dof(&self, v: VertexId) -> usize {
        self.vertex_dofs[v]
    }

    pub fn total_intervals(&self) -> usize {
        self.edges.iter().map(|e| e.intervals).sum()
    }

    /// A point of the graph carrying each unknown (vertices on one of their
    /// incident edges).
    pub fn dof_points(&self) -> &[GraphPoint] {
        &self.points
    }

    /// Trapezoid weights: `Σ w_i |f_i|^p` approximates `∫|f|^p`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn h_max(&self) -> f64 {
        self.edges.iter().map(|e| e.h).fold(0.0, f64::max)
    }

    /// Diameter of the truncated graph, sampled at the mesh nodes.
    pub fn truncated_diameter(&self) -> f64 {
        let mut best: f64 = 0.0;
        let ends: Vec<GraphPoint> = (0..self.graph.num_edges())
            .map(|e| GraphPoint::new(e, self.edges[e].len()))
            .chain((0..self.graph.num_vertices()).map(|v| self.graph.vertex_point(v)))
            .collect();
        for p in &ends {
            let field = self.graph.distance_field(p);
            for q in &self.points {
                best = best.max(field.at(q.edge, q.x));
            }
            for q in &ends {
                best = best.max(field.at(q.edge, q.x));
            }
        }
        best
    }
}
