//! Starlike metric graphs: a compact core of finite edges with finitely many
//! half-lines attached.
//!
//! Every edge carries a coordinate `x`. Internal edges run from `from`
//! (`x = 0`) to `to` (`x = L_e`); half-lines start at the vertex they are
//! attached to. For numerical work half-lines are cut at a truncation length,
//! but the geometry reported here (distance, ball volume) is that of the
//! untruncated graph.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use crate::error::{Error, Result};
use crate::potential::PotentialExpr;

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub name: String,
    /// Strength of the δ coupling; zero is the Kirchhoff condition.
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub from: VertexId,
    /// `None` for half-lines.
    pub to: Option<VertexId>,
    /// `f64::INFINITY` for half-lines.
    pub length: f64,
    pub potential: PotentialExpr,
}

impl Edge {
    pub fn is_external(&self) -> bool {
        self.to.is_none()
    }
}

/// A point `(e, x)` of the graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphPoint {
    pub edge: EdgeId,
    pub x: f64,
}

impl GraphPoint {
    pub fn new(edge: EdgeId, x: f64) -> Self {
        GraphPoint { edge, x }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    truncation: f64,
}

/// Incremental construction of a [`MetricGraph`]; validation happens in
/// [`GraphBuilder::build`].
#[derive(Debug, Default, Clone)]
pub struct GraphBuilder {
    vertices: Vec<Vertex>,
    edges: Vec<(VertexId, Option<VertexId>, f64, PotentialExpr)>,
    truncation: Option<f64>,
}

impl GraphBuilder {
    pub fn vertex(mut self, name: impl Into<String>, alpha: f64) -> Self {
        self.vertices.push(Vertex {
            name: name.into(),
            alpha,
        });
        self
    }

    pub fn edge(mut self, from: VertexId, to: VertexId, length: f64) -> Self {
        self.edges
            .push((from, Some(to), length, PotentialExpr::zero()));
        self
    }

    pub fn half_line(mut self, from: VertexId) -> Self {
        self.edges
            .push((from, None, f64::INFINITY, PotentialExpr::zero()));
        self
    }

    /// Sets the potential of the most recently added edge.
    pub fn with_potential(mut self, potential: PotentialExpr) -> Self {
        if let Some(last) = self.edges.last_mut() {
            last.3 = potential;
        }
        self
    }

    pub fn truncation(mut self, length: f64) -> Self {
        self.truncation = Some(length);
        self
    }

    pub fn build(self) -> Result<MetricGraph> {
        if self.vertices.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let nv = self.vertices.len();
        let mut edges = Vec::with_capacity(self.edges.len());
        for (i, (from, to, length, potential)) in self.edges.into_iter().enumerate() {
            for v in std::iter::once(from).chain(to) {
                if v >= nv {
                    return Err(Error::DanglingEndpoint {
                        edge: i,
                        vertex: v.to_string(),
                    });
                }
            }
            match to {
                Some(_) if !(length > 0.0 && length.is_finite()) => {
                    return Err(Error::NonPositiveLength { edge: i, length })
                }
                None if length != f64::INFINITY => {
                    return Err(Error::InvalidEdge {
                        edge: i,
                        reason: "a half-line must have infinite length".into(),
                    })
                }
                _ => {}
            }
            edges.push(Edge {
                from,
                to,
                length,
                potential,
            });
        }
        MetricGraph::new(self.vertices, edges, self.truncation)
    }
}

impl MetricGraph {
    pub fn builder() -> GraphBuilder {
        GraphBuilder::default()
    }

    /// Validates and assembles a graph. `truncation` defaults to 40 times the
    /// longest internal edge, and at least 40.
    pub fn new(vertices: Vec<Vertex>, edges: Vec<Edge>, truncation: Option<f64>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let mut names = HashSet::new();
        for v in &vertices {
            if !names.insert(v.name.as_str()) {
                return Err(Error::DuplicateVertex(v.name.clone()));
            }
        }
        for (i, e) in edges.iter().enumerate() {
            for v in std::iter::once(e.from).chain(e.to) {
                if v >= vertices.len() {
                    return Err(Error::DanglingEndpoint {
                        edge: i,
                        vertex: v.to_string(),
                    });
                }
            }
            if e.to.is_some() && !(e.length > 0.0 && e.length.is_finite()) {
                return Err(Error::NonPositiveLength {
                    edge: i,
                    length: e.length,
                });
            }
        }
        if !edges.iter().any(Edge::is_external) {
            return Err(Error::NoExternalEdge);
        }
        let longest_internal = edges
            .iter()
            .filter(|e| !e.is_external())
            .map(|e| e.length)
            .fold(0.0, f64::max);
        let truncation = truncation.unwrap_or((40.0 * longest_internal).max(40.0));
        if !(truncation > 0.0 && truncation.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "truncation length must be positive, got {truncation}"
            )));
        }
        let graph = MetricGraph {
            vertices,
            edges,
            truncation,
        };
        graph.check_connected()?;
        Ok(graph)
    }

    fn check_connected(&self) -> Result<()> {
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for e in &self.edges {
                if let Some(to) = e.to {
                    for (a, b) in [(e.from, to), (to, e.from)] {
                        if a == v && !seen[b] {
                            seen[b] = true;
                            stack.push(b);
                        }
                    }
                }
            }
        }
        match seen.iter().position(|s| !s) {
            Some(v) => Err(Error::Disconnected(self.vertices[v].name.clone())),
            None => Ok(()),
        }
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e]
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn truncation(&self) -> f64 {
        self.truncation
    }

    /// Same graph with a different truncation length for the half-lines.
    pub fn with_truncation(mut self, length: f64) -> Self {
        assert!(length > 0.0 && length.is_finite(), "truncation must be positive");
        self.truncation = length;
        self
    }

    pub fn external_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.is_external())
            .map(|(i, _)| i)
    }

    /// Length used for discretization: the true length for internal edges,
    /// the truncation length for half-lines.
    pub fn truncated_length(&self, e: EdgeId) -> f64 {
        let edge = &self.edges[e];
        if edge.is_external() {
            self.truncation
        } else {
            edge.length
        }
    }

    pub fn alphas(&self) -> Vec<f64> {
        self.vertices.iter().map(|v| v.alpha).collect()
    }

    pub fn vertex_index(&self, name: &str) -> Option<VertexId> {
        self.vertices.iter().position(|v| v.name == name)
    }

    pub fn check_point(&self, p: &GraphPoint) -> Result<()> {
        let edge = self
            .edges
            .get(p.edge)
            .ok_or_else(|| Error::InvalidPoint(format!("edge {} does not exist", p.edge)))?;
        if !(p.x >= 0.0 && p.x <= edge.length && p.x.is_finite()) {
            return Err(Error::InvalidPoint(format!(
                "coordinate {} outside [0, {}] on edge {}",
                p.x, edge.length, p.edge
            )));
        }
        Ok(())
    }

    /// Point at a vertex, expressed on one of its incident edges.
    pub fn vertex_point(&self, v: VertexId) -> GraphPoint {
        for (i, e) in self.edges.iter().enumerate() {
            if e.from == v {
                return GraphPoint::new(i, 0.0);
            }
            if e.to == Some(v) {
                return GraphPoint::new(i, e.length);
            }
        }
        unreachable!("connected graphs with an external edge have no isolated vertex")
    }

    /// Distances from `y` to every vertex: Dijkstra with `y` inserted as a
    /// temporary source node.
    pub fn distance_field(&self, y: &GraphPoint) -> DistanceField<'_> {
        let mut dist = vec![f64::INFINITY; self.vertices.len()];
        let mut heap = BinaryHeap::new();
        let edge = &self.edges[y.edge];
        let seed = |v: VertexId, d: f64, dist: &mut Vec<f64>, heap: &mut BinaryHeap<Entry>| {
            if d < dist[v] {
                dist[v] = d;
                heap.push(Entry(d, v));
            }
        };
        seed(edge.from, y.x, &mut dist, &mut heap);
        if let Some(to) = edge.to {
            seed(to, edge.length - y.x, &mut dist, &mut heap);
        }
        while let Some(Entry(d, v)) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            for e in &self.edges {
                let Some(to) = e.to else { continue };
                let other = if e.from == v {
                    to
                } else if to == v {
                    e.from
                } else {
                    continue;
                };
                seed(other, d + e.length, &mut dist, &mut heap);
            }
        }
        DistanceField {
            graph: self,
            center: *y,
            vertex_dist: dist,
        }
    }

    pub fn distance(&self, p: &GraphPoint, q: &GraphPoint) -> f64 {
        self.distance_field(p).at(q.edge, q.x)
    }

    /// Total length of the open ball `{x : d(x, y) < t}`.
    pub fn ball_volume(&self, y: &GraphPoint, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let field = self.distance_field(y);
        (0..self.edges.len())
            .map(|e| field.ball_length_on_edge(e, t))
            .sum()
    }
}

/// Distance to a fixed center, evaluable anywhere on the graph. On each edge
/// it is the minimum of at most three affine functions of `x`.
#[derive(Debug, Clone)]
pub struct DistanceField<'g> {
    graph: &'g MetricGraph,
    center: GraphPoint,
    vertex_dist: Vec<f64>,
}

impl DistanceField<'_> {
    pub fn center(&self) -> GraphPoint {
        self.center
    }

    pub fn to_vertex(&self, v: VertexId) -> f64 {
        self.vertex_dist[v]
    }

    pub fn at(&self, e: EdgeId, x: f64) -> f64 {
        let edge = &self.graph.edges[e];
        let mut d = self.vertex_dist[edge.from] + x;
        if let Some(to) = edge.to {
            d = d.min(self.vertex_dist[to] + edge.length - x);
        }
        if e == self.center.edge {
            d = d.min((x - self.center.x).abs());
        }
        d
    }

    fn ball_length_on_edge(&self, e: EdgeId, t: f64) -> f64 {
        let edge = &self.graph.edges[e];
        let len = edge.length;
        let mut pieces: Vec<(f64, f64)> = Vec::with_capacity(3);
        let from = self.vertex_dist[edge.from];
        if t > from {
            pieces.push((0.0, t - from));
        }
        if let Some(to) = edge.to {
            let d = self.vertex_dist[to];
            if t > d {
                pieces.push((len - (t - d), len));
            }
        }
        if e == self.center.edge {
            pieces.push((self.center.x - t, self.center.x + t));
        }
        let mut clipped: Vec<(f64, f64)> = pieces
            .into_iter()
            .map(|(a, b)| (a.max(0.0), b.min(len)))
            .filter(|(a, b)| b > a)
            .collect();
        clipped.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut total = 0.0;
        let mut current: Option<(f64, f64)> = None;
        for (a, b) in clipped {
            current = match current {
                Some((ca, cb)) if a <= cb => Some((ca, cb.max(b))),
                Some((ca, cb)) => {
                    total += cb - ca;
                    Some((a, b))
                }
                None => Some((a, b)),
            };
        }
        if let Some((a, b)) = current {
            total += b - a;
        }
        total
    }
}

#[derive(Debug, PartialEq)]
struct Entry(f64, VertexId);

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // min-heap on distance
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(self.1.cmp(&other.1))
    }
}

/// `n` half-lines glued at one vertex with δ strength `alpha`.
pub fn star(n: usize, alpha: f64) -> Result<MetricGraph> {
    let mut b = MetricGraph::builder().vertex("c", alpha);
    for _ in 0..n {
        b = b.half_line(0);
    }
    b.build()
}

/// The real line seen as a star with two half-lines.
pub fn line(alpha: f64) -> Result<MetricGraph> {
    star(2, alpha)
}
