//! Network file schema: a strict JSON document describing a graph and its
//! ports. Unknown keys are rejected so a typo cannot silently change an
//! analysis. Vertex ids are 1-based, matching the report output.

use netgain::{Edge, Graph, GraphError, Port};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    pub n: usize,
    pub edges: Vec<EdgeSpec>,
    #[serde(default)]
    pub ports: Vec<PortSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PortSpec {
    #[serde(rename = "in")]
    pub inflow: usize,
    #[serde(rename = "out")]
    pub outflow: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

fn default_alpha() -> f64 {
    1.0
}

impl NetworkFile {
    pub fn parse(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("network file serialization")
    }

    pub fn graph(&self) -> Result<Graph, GraphError> {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge::new(e.u, e.v, e.w))
            .collect();
        Graph::new(self.n, edges)
    }

    pub fn ports(&self) -> Vec<Port> {
        self.ports
            .iter()
            .map(|p| Port::with_alpha(p.inflow, p.outflow, p.alpha))
            .collect()
    }
}
