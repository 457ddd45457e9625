//! Reading a graph from its JSON description, then measuring it: distances
//! between points, ball volumes, and the potential on each edge.

use graphnls::spec_file::parse_graph_spec;
use graphnls::GraphPoint;

const TADPOLE: &str = include_str!("../data/tadpole_well.json");

pub fn run_example() -> graphnls::Result<Vec<f64>> {
    let graph = parse_graph_spec(TADPOLE)?;
    println!(
        "{} vertices, {} edges, half-lines truncated at {}",
        graph.num_vertices(),
        graph.num_edges(),
        graph.truncation()
    );
    for (e, edge) in graph.edges().iter().enumerate() {
        println!(
            "edge {e}: {} → {:?}, length {}, W(x) = {}",
            edge.from, edge.to, edge.length, edge.potential
        );
    }
    let on_loop = GraphPoint::new(0, 1.0);
    let mut distances = Vec::new();
    for q in [GraphPoint::new(0, 2.5), GraphPoint::new(1, 4.0), graph.vertex_point(0)] {
        let d = graph.distance(&on_loop, &q);
        println!("d((0, 1.0), ({}, {})) = {d}", q.edge, q.x);
        distances.push(d);
    }
    for t in [0.5, 1.5, 5.0] {
        println!("|B((0, 1.0), {t})| = {}", graph.ball_volume(&on_loop, t));
    }
    Ok(distances)
}

fn main() -> graphnls::Result<()> {
    run_example().map(|_| ())
}
