//! Shared generators for the randomized test suites. Everything is driven
//! by seeded ChaCha streams so failures reproduce exactly.

// Each test binary uses its own subset of these helpers.
#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use netgain::{Edge, Graph, Port};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Connected graph on `n` vertices: a random spanning tree plus `extra`
/// additional edges with weights in `[wmin, wmax]`.
pub fn random_connected_graph(
    rng: &mut ChaCha8Rng,
    n: usize,
    extra: usize,
    wmin: f64,
    wmax: f64,
) -> Graph {
    let mut edges = Vec::new();
    for v in 2..=n {
        let u = rng.random_range(1..v);
        edges.push(Edge::new(u, v, rng.random_range(wmin..wmax)));
    }
    for _ in 0..extra {
        let u = rng.random_range(1..=n);
        let v = rng.random_range(1..=n);
        if u != v {
            edges.push(Edge::new(u, v, rng.random_range(wmin..wmax)));
        }
    }
    Graph::new(n, edges).expect("generated graph is valid")
}

/// `k` ports with distinct random endpoints.
pub fn random_ports(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<Port> {
    (0..k)
        .map(|_| loop {
            let a = rng.random_range(1..=n);
            let b = rng.random_range(1..=n);
            if a != b {
                return Port::with_alpha(a, b, rng.random_range(0.5..2.0));
            }
        })
        .collect()
}

/// Random symmetric PSD matrix `M M^T` with entries of `M` in `[-1, 1]`.
pub fn random_psd(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    let p = &m * m.transpose();
    0.5 * (&p + p.transpose())
}

/// The five-vertex, seven-edge benchmark topology used throughout the
/// suite, with the given edge weights.
pub fn bench_graph(weights: &[f64; 7]) -> Graph {
    let topo = [(1, 2), (2, 3), (3, 1), (1, 4), (4, 3), (1, 5), (5, 2)];
    let edges = topo
        .iter()
        .zip(weights)
        .map(|(&(u, v), &w)| Edge::new(u, v, w))
        .collect();
    Graph::new(5, edges).expect("benchmark graph")
}

/// Benchmark topology with unit positive weights plus two negative edges
/// on (3,5) and (4,5) of magnitudes `w8` and `w9`.
pub fn signed_bench_graph(w8: f64, w9: f64) -> Graph {
    let g = bench_graph(&[1.0; 7]);
    let mut edges = g.edges().to_vec();
    edges.push(Edge::new(3, 5, -w8));
    edges.push(Edge::new(4, 5, -w9));
    Graph::new(5, edges).expect("signed benchmark graph")
}

pub fn bench_ports() -> Vec<Port> {
    vec![Port::new(5, 4), Port::new(5, 3)]
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, &x| acc.max(x.abs()))
}
