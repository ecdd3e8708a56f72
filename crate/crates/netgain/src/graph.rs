//! Graph representation, incidence/Laplacian construction, connectivity,
//! and port validation.
//!
//! Vertices are labeled `1..=n` at the interface (files, errors, ports);
//! indices are zero-based internally. The edge list order is the column
//! order of the incidence matrix, so every matrix built here is
//! deterministic for a fixed input.

use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("vertex count must be positive")]
    EmptyGraph,
    #[error("edge {index} endpoint {vertex} is out of range 1..={n}")]
    VertexOutOfRange { index: usize, vertex: usize, n: usize },
    #[error("edge {index} is a self-loop at vertex {vertex}")]
    SelfLoop { index: usize, vertex: usize },
    #[error("edge {index} has non-finite weight")]
    NonFiniteWeight { index: usize },
    #[error("weight vector has length {got}, expected {expected}")]
    WeightLengthMismatch { got: usize, expected: usize },
    #[error("port {index} endpoint {vertex} is out of range 1..={n}")]
    PortOutOfRange { index: usize, vertex: usize, n: usize },
    #[error("port {index} has identical inflow and outflow vertex {vertex}")]
    PortLoop { index: usize, vertex: usize },
    #[error("port {index} magnitude must be positive and finite (got {alpha})")]
    PortBadAlpha { index: usize, alpha: f64 },
}

/// Oriented weighted edge `u -> v`. Weights may be negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

impl Edge {
    pub fn new(u: usize, v: usize, w: f64) -> Self {
        Self { u, v, w }
    }
}

/// Undirected weighted graph on vertices `1..=n` with an ordered edge list.
///
/// Parallel edges are permitted; zero-weight edges stay in the list (they
/// define topology for allocation) but are excluded by the positivity
/// filter in connectivity tests.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::EmptyGraph);
        }
        for (index, e) in edges.iter().enumerate() {
            for vertex in [e.u, e.v] {
                if vertex < 1 || vertex > n {
                    return Err(GraphError::VertexOutOfRange { index, vertex, n });
                }
            }
            if e.u == e.v {
                return Err(GraphError::SelfLoop { index, vertex: e.u });
            }
            if !e.w.is_finite() {
                return Err(GraphError::NonFiniteWeight { index });
            }
        }
        Ok(Self { n, edges })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn weights(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.w).collect()
    }

    /// Same topology with a replacement weight vector (edge order preserved).
    pub fn with_weights(&self, w: &[f64]) -> Result<Graph, GraphError> {
        if w.len() != self.edges.len() {
            return Err(GraphError::WeightLengthMismatch {
                got: w.len(),
                expected: self.edges.len(),
            });
        }
        let edges = self
            .edges
            .iter()
            .zip(w)
            .map(|(e, &w)| Edge::new(e.u, e.v, w))
            .collect();
        Graph::new(self.n, edges)
    }

    /// n x m incidence matrix: +1 at the tail, -1 at the head of each edge,
    /// columns in edge-list order.
    pub fn incidence_matrix(&self) -> DMatrix<f64> {
        let mut b = DMatrix::zeros(self.n, self.edges.len());
        for (j, e) in self.edges.iter().enumerate() {
            b[(e.u - 1, j)] = 1.0;
            b[(e.v - 1, j)] = -1.0;
        }
        b
    }

    /// Weighted Laplacian B W B^T, assembled entrywise so the result is
    /// exactly symmetric and has exactly zero row sums in the absence of
    /// cancellation error.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let mut l = DMatrix::zeros(self.n, self.n);
        for e in &self.edges {
            let (i, j) = (e.u - 1, e.v - 1);
            l[(i, i)] += e.w;
            l[(j, j)] += e.w;
            l[(i, j)] -= e.w;
            l[(j, i)] -= e.w;
        }
        l
    }

    /// Connected components over the subgraph of edges passing `filter`.
    pub fn connected_components<F: Fn(&Edge) -> bool>(&self, filter: F) -> ComponentMap {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for e in self.edges.iter().filter(|e| filter(e)) {
            let a = find(&mut parent, e.u - 1);
            let b = find(&mut parent, e.v - 1);
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        // Component id = smallest contained vertex (1-based).
        let labels = (0..self.n).map(|v| find(&mut parent, v) + 1).collect();
        ComponentMap { labels }
    }
}

/// Partition of `1..=n`; each vertex maps to the smallest vertex id in its
/// component.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentMap {
    labels: Vec<usize>,
}

impl ComponentMap {
    /// Component id (smallest member vertex, 1-based) of vertex `v` (1-based).
    pub fn label_of(&self, v: usize) -> usize {
        self.labels[v - 1]
    }

    pub fn same_component(&self, u: usize, v: usize) -> bool {
        self.label_of(u) == self.label_of(v)
    }

    pub fn count(&self) -> usize {
        let mut ids: Vec<usize> = self.labels.clone();
        ids.sort_unstable();
        ids.dedup();
        ids.len()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Components as sorted vertex lists, ordered by their smallest member.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        let mut ids: Vec<usize> = self.labels.clone();
        ids.sort_unstable();
        ids.dedup();
        ids.iter()
            .map(|&id| {
                (1..=self.labels.len())
                    .filter(|&v| self.label_of(v) == id)
                    .collect()
            })
            .collect()
    }
}

/// External in/outflow port: `alpha` enters at `inflow` and leaves at
/// `outflow`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Port {
    pub inflow: usize,
    pub outflow: usize,
    pub alpha: f64,
}

impl Port {
    pub fn new(inflow: usize, outflow: usize) -> Self {
        Self {
            inflow,
            outflow,
            alpha: 1.0,
        }
    }

    pub fn with_alpha(inflow: usize, outflow: usize, alpha: f64) -> Self {
        Self {
            inflow,
            outflow,
            alpha,
        }
    }
}

/// Dense n x k port matrix E: column i holds +alpha_i at the inflow vertex
/// and -alpha_i at the outflow vertex, so every column sums to zero exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct PortMatrix {
    matrix: DMatrix<f64>,
}

impl PortMatrix {
    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn vertex_count(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn port_count(&self) -> usize {
        self.matrix.ncols()
    }
}

/// Builds the port matrix for `n` vertices, columns in port order.
pub fn port_matrix(ports: &[Port], n: usize) -> Result<PortMatrix, GraphError> {
    let mut matrix = DMatrix::zeros(n, ports.len());
    for (index, p) in ports.iter().enumerate() {
        for vertex in [p.inflow, p.outflow] {
            if vertex < 1 || vertex > n {
                return Err(GraphError::PortOutOfRange { index, vertex, n });
            }
        }
        if p.inflow == p.outflow {
            return Err(GraphError::PortLoop {
                index,
                vertex: p.inflow,
            });
        }
        if !p.alpha.is_finite() || p.alpha <= 0.0 {
            return Err(GraphError::PortBadAlpha {
                index,
                alpha: p.alpha,
            });
        }
        matrix[(p.inflow - 1, index)] = p.alpha;
        matrix[(p.outflow - 1, index)] = -p.alpha;
    }
    Ok(PortMatrix { matrix })
}

/// Result of checking ports against the positive-weight subgraph.
#[derive(Debug, Clone, PartialEq)]
pub struct PortValidation {
    pub ok: bool,
    /// Indices of ports whose endpoints fall in different components.
    pub offending: Vec<usize>,
}

impl std::fmt::Display for PortValidation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.ok {
            write!(f, "all ports lie within one connected component")
        } else {
            write!(
                f,
                "ports {:?} span different components of the positive-weight subgraph",
                self.offending
            )
        }
    }
}

/// True iff every port's inflow and outflow vertices lie in the same
/// connected component of the positive-weight subgraph of `g`. Ports with
/// out-of-range endpoints are reported as offending rather than erroring.
pub fn validate_ports(g: &Graph, ports: &[Port]) -> PortValidation {
    let comp = g.connected_components(|e| e.w > 0.0);
    let n = g.vertex_count();
    let offending: Vec<usize> = ports
        .iter()
        .enumerate()
        .filter(|(_, p)| {
            let in_range = (1..=n).contains(&p.inflow) && (1..=n).contains(&p.outflow);
            !in_range || !comp.same_component(p.inflow, p.outflow)
        })
        .map(|(i, _)| i)
        .collect();
    PortValidation {
        ok: offending.is_empty(),
        offending,
    }
}
