//! JSON graph description.
//!
//! ```json
//! {
//!   "vertices": [{"id": "o", "alpha": -3}],
//!   "edges": [
//!     {"from": "o", "to": null, "length": "inf"},
//!     {"from": "o", "to": null, "length": "inf", "potential": "-2*sech(x)^2"}
//!   ],
//!   "truncation": 40
//! }
//! ```
//!
//! Vertex ids may be strings or integers. `alpha`, `potential`, `to` and
//! `truncation` are optional. The JSON schema lives in
//! `docs/graph-spec.schema.json`.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, MetricGraph, Vertex};
use crate::potential::parse_optional;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VertexKey {
    Int(i64),
    Name(String),
}

impl std::fmt::Display for VertexKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VertexKey::Int(i) => write!(f, "{i}"),
            VertexKey::Name(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LengthSpec {
    Finite(f64),
    Keyword(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexSpec {
    pub id: VertexKey,
    #[serde(default)]
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub from: VertexKey,
    #[serde(default)]
    pub to: Option<VertexKey>,
    pub length: LengthSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub vertices: Vec<VertexSpec>,
    pub edges: Vec<EdgeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<f64>,
}

impl GraphSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            Error::Spec(format!("line {}, column {}: {e}", e.line(), e.column()))
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph spec serializes")
    }

    /// Description of an existing graph; vertex ids are the vertex names.
    pub fn from_graph(graph: &MetricGraph) -> Self {
        let key = |v: usize| VertexKey::Name(graph.vertices()[v].name.clone());
        GraphSpec {
            vertices: graph
                .vertices()
                .iter()
                .map(|v| VertexSpec {
                    id: VertexKey::Name(v.name.clone()),
                    alpha: v.alpha,
                })
                .collect(),
            edges: graph
                .edges()
                .iter()
                .map(|e| EdgeSpec {
                    from: key(e.from),
                    to: e.to.map(key),
                    length: if e.is_external() {
                        LengthSpec::Keyword("inf".into())
                    } else {
                        LengthSpec::Finite(e.length)
                    },
                    potential: (!e.potential.is_zero()).then(|| e.potential.to_string()),
                })
                .collect(),
            truncation: Some(graph.truncation()),
        }
    }

    pub fn build(&self) -> Result<MetricGraph> {
        let mut index: HashMap<&VertexKey, usize> = HashMap::new();
        let mut vertices = Vec::with_capacity(self.vertices.len());
        for (i, v) in self.vertices.iter().enumerate() {
            if index.insert(&v.id, i).is_some() {
                return Err(Error::DuplicateVertex(v.id.to_string()));
            }
            if !v.alpha.is_finite() {
                return Err(Error::Spec(format!("vertices[{i}].alpha must be finite")));
            }
            vertices.push(Vertex {
                name: v.id.to_string(),
                alpha: v.alpha,
            });
        }
        let lookup = |edge: usize, key: &VertexKey| -> Result<usize> {
            index.get(key).copied().ok_or_else(|| Error::DanglingEndpoint {
                edge,
                vertex: key.to_string(),
            })
        };
        let mut edges = Vec::with_capacity(self.edges.len());
        for (i, e) in self.edges.iter().enumerate() {
            let length = match &e.length {
                LengthSpec::Finite(x) => *x,
                LengthSpec::Keyword(s) if matches!(s.as_str(), "inf" | "infinity" | "Infinity") => f64::INFINITY,
                LengthSpec::Keyword(s) => {
                    return Err(Error::Spec(format!(
                        "edges[{i}].length: expected a number or \"inf\", got \"{s}\""
                    )))
                }
            };
            let potential = parse_optional(e.potential.as_deref())
                .map_err(|err| Error::Spec(format!("edges[{i}].potential: {err}")))?;
            let from = lookup(i, &e.from)?;
            let to = e.to.as_ref().map(|k| lookup(i, k)).transpose()?;
            match (to, length.is_infinite()) {
                (None, false) => {
                    return Err(Error::InvalidEdge {
                        edge: i,
                        reason: "an edge with \"to\": null is a half-line and needs length \"inf\"".into(),
                    })
                }
                (Some(_), true) => {
                    return Err(Error::InvalidEdge {
                        edge: i,
                        reason: "an internal edge needs a finite length".into(),
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
        MetricGraph::new(vertices, edges, self.truncation)
    }
}

pub fn parse_graph_spec(text: &str) -> Result<MetricGraph> {
    GraphSpec::from_json(text)?.build()
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<MetricGraph> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Spec(format!("cannot read {}: {e}", path.display())))?;
    parse_graph_spec(&text).map_err(|e| match e {
        Error::Spec(msg) => Error::Spec(format!("{}: {msg}", path.display())),
        other => other,
    })
}
