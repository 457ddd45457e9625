//! Random starlike graphs with an all-pairs shortest path oracle and a
//! sampled indicator integral for ball volumes.

use graphnls::{GraphPoint, MetricGraph};
use proptest::prelude::*;

/// Random connected core (a spanning tree plus extra chords and loops) with
/// one to three half-lines.
#[derive(Debug, Clone)]
pub struct Layout {
    pub n: usize,
    pub internal: Vec<(usize, usize, f64)>,
    pub half_lines: Vec<usize>,
}

impl Layout {
    pub fn build(&self) -> MetricGraph {
        let mut b = MetricGraph::builder();
        for v in 0..self.n {
            b = b.vertex(format!("v{v}"), 0.0);
        }
        for &(u, v, l) in &self.internal {
            b = b.edge(u, v, l);
        }
        for &v in &self.half_lines {
            b = b.half_line(v);
        }
        b.truncation(40.0).build().unwrap()
    }
}

pub fn layout() -> impl Strategy<Value = Layout> {
    (1usize..6)
        .prop_flat_map(|n| {
            let tree = (1..n)
                .map(|v| (0..v, 0.2f64..5.0).prop_map(move |(u, l)| (u, v, l)))
                .collect::<Vec<_>>();
            let extra = prop::collection::vec((0..n, 0..n, 0.2f64..5.0), 0..4);
            let halves = prop::collection::vec(0..n, 1..4);
            (Just(n), tree, extra, halves)
        })
        .prop_map(|(n, mut internal, extra, half_lines)| {
            internal.extend(extra);
            Layout { n, internal, half_lines }
        })
}

pub fn point(g: &MetricGraph) -> impl Strategy<Value = GraphPoint> {
    let lengths: Vec<f64> = g.edges().iter().map(|e| e.length.min(15.0)).collect();
    (0..lengths.len(), 0.0f64..=1.0).prop_map(move |(e, s)| GraphPoint::new(e, s * lengths[e]))
}

pub fn with_points(k: usize) -> impl Strategy<Value = (MetricGraph, Vec<GraphPoint>)> {
    layout().prop_flat_map(move |l| {
        let g = l.build();
        let pts = prop::collection::vec(point(&g), k);
        (Just(g), pts)
    })
}

/// Floyd–Warshall over vertices, then the minimum over the endpoints of the
/// two edges, plus the direct segment when both points share an edge.
pub fn oracle_distance(g: &MetricGraph, p: &GraphPoint, q: &GraphPoint) -> f64 {
    let n = g.num_vertices();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = 0.0;
    }
    for e in g.edges() {
        if let Some(to) = e.to {
            let l = e.length.min(d[e.from][to]);
            d[e.from][to] = l;
            d[to][e.from] = l;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    let ends = |pt: &GraphPoint| {
        let e = g.edge(pt.edge);
        let mut out = vec![(e.from, pt.x)];
        if let Some(to) = e.to {
            out.push((to, e.length - pt.x));
        }
        out
    };
    let mut best = f64::INFINITY;
    for (u, du) in ends(p) {
        for &(v, dv) in &ends(q) {
            best = best.min(du + d[u][v] + dv);
        }
    }
    if p.edge == q.edge {
        best = best.min((p.x - q.x).abs());
    }
    best
}

/// Length of `{d(·, y) < t}` by midpoint sampling of the indicator.
pub fn sampled_volume(g: &MetricGraph, y: &GraphPoint, t: f64, step: f64) -> f64 {
    let field = g.distance_field(y);
    let mut total = 0.0;
    for (e, edge) in g.edges().iter().enumerate() {
        let len = if edge.is_external() { t + 20.0 } else { edge.length };
        let n = (len / step).ceil() as usize;
        let dx = len / n as f64;
        total += (0..n).filter(|&k| field.at(e, (k as f64 + 0.5) * dx) < t).count() as f64 * dx;
    }
    total
}

/// Symmetry, triangle inequality and agreement with the oracle for three
/// points.
pub fn metric_case(g: &MetricGraph, pts: &[GraphPoint]) -> Result<(), TestCaseError> {
    let (p, q, r) = (&pts[0], &pts[1], &pts[2]);
    let pq = g.distance(p, q);
    prop_assert!(pq >= 0.0);
    prop_assert!((pq - g.distance(q, p)).abs() <= 1e-12);
    prop_assert!(pq <= g.distance(p, r) + g.distance(r, q) + 1e-12);
    prop_assert!(g.distance(p, p).abs() <= 1e-12);
    let oracle = oracle_distance(g, p, q);
    prop_assert!((pq - oracle).abs() <= 1e-12, "{pq} vs {oracle}");
    Ok(())
}

/// Volume growth bounds for radii `s = frac·t < t`, plus agreement with the
/// sampled indicator integral.
pub fn ball_case(g: &MetricGraph, y: &GraphPoint, t: f64, frac: f64) -> Result<(), TestCaseError> {
    let edges = g.num_edges() as f64;
    let vt = g.ball_volume(y, t);
    prop_assert!(vt >= 0.0);
    prop_assert!(vt <= 2.0 * edges * t + 1e-12, "{vt} > 2|E|t = {}", 2.0 * edges * t);
    let s = frac * t;
    let vs = g.ball_volume(y, s);
    prop_assert!(vs <= vt + 1e-12);
    prop_assert!(vt - vs <= 2.0 * edges * (t - s) + 1e-12);
    let step = 1e-3;
    let sampled = sampled_volume(g, y, t, step);
    // each ball boundary point costs at most one sample cell
    prop_assert!((vt - sampled).abs() <= 6.0 * edges * step + 1e-9, "{vt} vs sampled {sampled}");
    Ok(())
}
