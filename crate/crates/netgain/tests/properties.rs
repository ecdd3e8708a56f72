//! Cross-module invariants on randomized inputs: algebraic identities of
//! the graph matrices, Penrose identities of the pseudo-inverse, scaling
//! laws of the gain, resistance geometry, and solver sanity properties.

mod common;

use common::*;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::Rng;

use netgain::{
    critical_scale, effective_resistance, grid_oracle, hinf_network, lmi_feasible, objective,
    port_matrix, project_simplex, psd_check, pseudo_inverse, solve, split_signed, subgradient,
    sym_eig, AllocationProblem, Edge, Graph, NetworkSystem, Port, SolverOptions,
    TolerancePolicy,
};

fn tol() -> TolerancePolicy {
    TolerancePolicy::default()
}

// ---------------------------------------------------------------------------
// graph identities

prop_compose! {
    fn arb_graph()(n in 2usize..8)(
        n in Just(n),
        raw in prop::collection::vec((0usize..8, 0usize..7, -2.0f64..2.0), 0..12),
    ) -> Graph {
        let edges = raw.into_iter().map(|(a, b, w)| {
            let u = a % n;
            let b = b % (n - 1);
            let v = if b >= u { b + 1 } else { b };
            Edge::new(u + 1, v + 1, w)
        }).collect();
        Graph::new(n, edges).expect("constructed valid graph")
    }
}

proptest! {
    #[test]
    fn laplacian_factors_through_incidence(g in arb_graph()) {
        let b = g.incidence_matrix();
        let w = DMatrix::from_diagonal(&DVector::from_vec(g.weights()));
        let l = g.laplacian();
        prop_assert!(max_abs(&(&l - &b * w * b.transpose())) <= 1e-12);
        // exact symmetry and zero row sums
        prop_assert!(max_abs(&(&l - l.transpose())) == 0.0);
        for i in 0..g.vertex_count() {
            prop_assert!(l.row(i).sum().abs() <= 1e-12);
        }
    }

    #[test]
    fn relabeling_conjugates_laplacian(g in arb_graph(), seed in 0u64..1000) {
        let n = g.vertex_count();
        let mut perm: Vec<usize> = (1..=n).collect();
        // deterministic Fisher-Yates from the seed
        let mut r = rng(seed);
        for i in (1..n).rev() {
            let j = r.random_range(0..=i);
            perm.swap(i, j);
        }
        let relabeled = Graph::new(
            n,
            g.edges().iter().map(|e| Edge::new(perm[e.u - 1], perm[e.v - 1], e.w)).collect(),
        ).unwrap();
        let mut p = DMatrix::zeros(n, n);
        for (old, &new) in perm.iter().enumerate() {
            p[(new - 1, old)] = 1.0;
        }
        let conjugated = &p * g.laplacian() * p.transpose();
        prop_assert!(max_abs(&(relabeled.laplacian() - conjugated)) <= 1e-12);
    }

    #[test]
    fn projection_lands_on_simplex(v in prop::collection::vec(-5.0f64..5.0, 1..9), c in 0.1f64..10.0) {
        let w = project_simplex(&v, c);
        prop_assert!(w.iter().all(|&x| x >= 0.0));
        prop_assert!((w.sum() - c).abs() <= 1e-9);
        // projecting a feasible point is the identity
        let again = project_simplex(w.as_slice(), c);
        prop_assert!((&again - &w).abs().max() <= 1e-12);
    }
}

#[test]
fn port_matrix_columns_sum_to_zero_exactly() {
    let mut r = rng(11);
    for _ in 0..50 {
        let n = r.random_range(2..10);
        let k = r.random_range(1..4);
        let ports = random_ports(&mut r, n, k);
        let e = port_matrix(&ports, n).unwrap();
        for j in 0..e.port_count() {
            assert_eq!(e.as_matrix().column(j).sum(), 0.0);
        }
    }
}

// ---------------------------------------------------------------------------
// spectral identities

#[test]
fn penrose_identities_on_random_psd_matrices() {
    let mut r = rng(21);
    for _ in 0..200 {
        let n = r.random_range(1..=12);
        let s = random_psd(&mut r, n);
        let dec = sym_eig(&s).unwrap();
        let q = dec.eigenvectors();
        assert!(max_abs(&(q.transpose() * q - DMatrix::identity(n, n))) <= 1e-10);
        assert!(max_abs(&(dec.reconstruct() - &s)) <= 1e-9 * max_abs(&s).max(1.0));
        let trace: f64 = (0..n).map(|i| s[(i, i)]).sum();
        let sum: f64 = dec.eigenvalues().iter().sum();
        assert!((trace - sum).abs() <= 1e-9 * trace.abs().max(1.0));

        let p = pseudo_inverse(&s, &tol()).unwrap();
        let sps = &s * &p * &s;
        let psp = &p * &s * &p;
        assert!(max_abs(&(sps - &s)) <= 1e-8 * max_abs(&s).max(1e-12));
        assert!(max_abs(&(psp - &p)) <= 1e-8 * max_abs(&p).max(1e-12));
    }
}

#[test]
fn pseudo_inverse_annihilates_the_ones_vector() {
    let mut r = rng(22);
    for _ in 0..50 {
        let n = r.random_range(2..10);
        let g = random_connected_graph(&mut r, n, n, 0.2, 2.0);
        let p = pseudo_inverse(&g.laplacian(), &tol()).unwrap();
        let ones = DVector::from_element(n, 1.0);
        assert!((&p * ones).abs().max() <= 1e-9);
    }
}

// ---------------------------------------------------------------------------
// gain scaling and certification

#[test]
fn gain_scales_inversely_with_weights() {
    let mut r = rng(31);
    for _ in 0..20 {
        let n = r.random_range(3..9);
        let g = random_connected_graph(&mut r, n, n / 2, 0.3, 2.0);
        let k = r.random_range(1..4);
        let ports = random_ports(&mut r, n, k);
        let base = hinf_network(&NetworkSystem::new(g.clone(), &ports).unwrap(), &tol())
            .unwrap()
            .gamma;
        for alpha in [0.5, 2.0, 10.0] {
            let scaled: Vec<f64> = g.weights().iter().map(|w| alpha * w).collect();
            let gs = g.with_weights(&scaled).unwrap();
            let gamma = hinf_network(&NetworkSystem::new(gs, &ports).unwrap(), &tol())
                .unwrap()
                .gamma;
            assert!(
                (gamma - base / alpha).abs() <= 1e-9 * (base / alpha),
                "alpha = {alpha}: {gamma} vs {}",
                base / alpha
            );
        }
    }
}

// ---------------------------------------------------------------------------
// resistance geometry

fn all_pair_resistances(g: &Graph) -> DMatrix<f64> {
    let n = g.vertex_count();
    let mut pairs = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            pairs.push((i, j));
        }
    }
    let res = effective_resistance(g, &pairs, &tol()).unwrap();
    let mut r = DMatrix::zeros(n, n);
    for (idx, &(i, j)) in pairs.iter().enumerate() {
        r[(i - 1, j - 1)] = res.resistance(idx);
        r[(j - 1, i - 1)] = res.resistance(idx);
    }
    r
}

#[test]
fn effective_resistance_is_a_metric() {
    let mut rr = rng(41);
    for _ in 0..100 {
        let n = rr.random_range(3..8);
        let g = random_connected_graph(&mut rr, n, n, 0.3, 2.0);
        let r = all_pair_resistances(&g);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    assert!(r[(i, j)] <= r[(i, k)] + r[(k, j)] + 1e-12);
                }
            }
        }
    }
}

#[test]
fn adding_an_edge_never_increases_resistance() {
    let mut rr = rng(42);
    for _ in 0..50 {
        let n = rr.random_range(3..8);
        let g = random_connected_graph(&mut rr, n, 1, 0.3, 2.0);
        let before = all_pair_resistances(&g);
        let (u, v) = loop {
            let u = rr.random_range(1..=n);
            let v = rr.random_range(1..=n);
            if u != v {
                break (u, v);
            }
        };
        let mut edges = g.edges().to_vec();
        edges.push(Edge::new(u, v, rr.random_range(0.2..2.0)));
        let augmented = Graph::new(n, edges).unwrap();
        let after = all_pair_resistances(&augmented);
        for i in 0..n {
            for j in 0..n {
                assert!(after[(i, j)] <= before[(i, j)] + 1e-10);
            }
        }
    }
}

#[test]
fn critical_scale_sits_on_the_psd_boundary() {
    let mut rr = rng(43);
    for _ in 0..50 {
        let n = rr.random_range(3..8);
        let base = random_connected_graph(&mut rr, n, n, 0.4, 2.0);
        let mut edges = base.edges().to_vec();
        for _ in 0..rr.random_range(1..=2usize) {
            let (u, v) = loop {
                let u = rr.random_range(1..=n);
                let v = rr.random_range(1..=n);
                if u != v {
                    break (u, v);
                }
            };
            edges.push(Edge::new(u, v, -rr.random_range(0.05..1.0)));
        }
        let g = Graph::new(n, edges).unwrap();
        let rho = critical_scale(&g, &tol()).unwrap();
        assert!(rho.is_finite() && rho > 0.0);
        // rescale the negative magnitudes to the boundary
        let scaled: Vec<f64> = g
            .edges()
            .iter()
            .map(|e| if e.w < 0.0 { rho * e.w } else { e.w })
            .collect();
        let boundary = g.with_weights(&scaled).unwrap().laplacian();
        let dec = sym_eig(&boundary).unwrap();
        let slack = tol().psd_slack(dec.lambda_abs_max());
        assert!(dec.lambda_min() >= -slack && dec.lambda_min() <= slack);
        // a second direction beyond the all-ones kernel touches zero
        assert!(dec.eigenvalues()[1].abs() <= 1e-7 * dec.lambda_abs_max().max(1.0));
        // verdict flips just beyond the boundary
        let pushed: Vec<f64> = g
            .edges()
            .iter()
            .map(|e| if e.w < 0.0 { 1.01 * rho * e.w } else { e.w })
            .collect();
        let verdict = psd_check(&g.with_weights(&pushed).unwrap(), &tol()).unwrap();
        assert!(!verdict.overall);
    }
}

#[test]
fn split_reconstruction_on_random_graphs() {
    let mut rr = rng(44);
    for _ in 0..50 {
        let n = rr.random_range(2..9);
        let mut edges = Vec::new();
        for _ in 0..rr.random_range(1..10usize) {
            let u = rr.random_range(1..=n);
            let v = rr.random_range(1..=n);
            if u != v {
                edges.push(Edge::new(u, v, rr.random_range(-2.0..2.0)));
            }
        }
        let Ok(g) = Graph::new(n, edges) else { continue };
        let split = split_signed(&g);
        assert!(max_abs(&(split.reconstruct_laplacian() - g.laplacian())) <= 1e-12);
    }
}

// ---------------------------------------------------------------------------
// allocation solver properties

fn random_problem(rr: &mut rand_chacha::ChaCha8Rng, budget: f64) -> AllocationProblem {
    let n = rr.random_range(3..7);
    let g = random_connected_graph(rr, n, 2, 0.5, 1.5);
    let ports = random_ports(rr, n, 1);
    AllocationProblem::new(g, ports, budget).unwrap()
}

fn random_simplex_point(rr: &mut rand_chacha::ChaCha8Rng, m: usize, c: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..m)
        .map(|_| -(rr.random_range(1e-9..1.0f64)).ln())
        .collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|x| c * x / total).collect()
}

#[test]
fn objective_midpoints_respect_convexity() {
    let mut rr = rng(51);
    let mut tested = 0;
    while tested < 200 {
        let p = random_problem(&mut rr, 3.0);
        let m = p.topology().edge_count();
        let w1 = random_simplex_point(&mut rr, m, 3.0);
        let w2 = random_simplex_point(&mut rr, m, 3.0);
        let f1 = objective(&p, &w1, &tol());
        let f2 = objective(&p, &w2, &tol());
        if !f1.is_finite() || !f2.is_finite() {
            continue;
        }
        let mid: Vec<f64> = w1.iter().zip(&w2).map(|(a, b)| 0.5 * (a + b)).collect();
        let fm = objective(&p, &mid, &tol());
        assert!(fm <= 0.5 * (f1 + f2) + 1e-8, "{fm} vs {}", 0.5 * (f1 + f2));
        tested += 1;
    }
}

#[test]
fn solver_obeys_budget_scaling() {
    let mut rr = rng(52);
    for _ in 0..5 {
        let seed_problem = random_problem(&mut rr, 1.0);
        let g = seed_problem.topology().clone();
        let ports = seed_problem.ports().to_vec();
        let base = solve(
            &AllocationProblem::new(g.clone(), ports.clone(), 1.0).unwrap(),
            &SolverOptions::default(),
            &tol(),
        )
        .unwrap()
        .gamma;
        for alpha in [2.0, 4.0] {
            let scaled = solve(
                &AllocationProblem::new(g.clone(), ports.clone(), alpha).unwrap(),
                &SolverOptions::default(),
                &tol(),
            )
            .unwrap()
            .gamma;
            assert!(
                (scaled - base / alpha).abs() <= 1e-3 * (base / alpha),
                "alpha={alpha}: {scaled} vs {}",
                base / alpha
            );
        }
    }
}

#[test]
fn longer_runs_never_report_worse_objectives() {
    let mut rr = rng(53);
    for _ in 0..5 {
        let p = random_problem(&mut rr, 2.0);
        let short = solve(
            &p,
            &SolverOptions {
                max_iters: 150,
                ..SolverOptions::default()
            },
            &tol(),
        )
        .unwrap();
        let long = solve(&p, &SolverOptions::default(), &tol()).unwrap();
        assert!(long.gamma <= short.gamma + 1e-12);
        assert!(long.iterations >= short.iterations.min(150));
    }
}

#[test]
fn results_certify_themselves() {
    let mut rr = rng(54);
    for _ in 0..10 {
        let p = random_problem(&mut rr, 2.0);
        let res = solve(&p, &SolverOptions::default(), &tol()).unwrap();
        assert!((res.weights.sum() - 2.0).abs() <= 1e-9);
        assert!(res.weights.iter().all(|&w| w >= 0.0));
        let l = p
            .topology()
            .with_weights(res.weights.as_slice())
            .unwrap()
            .laplacian();
        let e = port_matrix(p.ports(), p.topology().vertex_count()).unwrap();
        let out = lmi_feasible(&l, e.as_matrix(), res.gamma * (1.0 + 1e-9), &tol()).unwrap();
        assert!(out.feasible, "margin {}", out.lambda_min);
        assert!(res.best_gap >= 0.0);
    }
}

#[test]
fn solver_is_equivariant_under_edge_relabeling() {
    // On the triangle every Laplacian entry is a one- or two-term sum, so
    // the permuted run reproduces the original trajectory exactly.
    let perm = [2usize, 0, 1]; // new order: edges (2,3), (3,1), (1,2)
    let base_edges = [
        Edge::new(1, 2, 1.0),
        Edge::new(2, 3, 1.0),
        Edge::new(3, 1, 1.0),
    ];
    let g1 = Graph::new(3, base_edges.to_vec()).unwrap();
    let g2 = Graph::new(3, perm.iter().map(|&i| base_edges[i]).collect()).unwrap();
    let p1 = AllocationProblem::new(g1, vec![Port::new(1, 2)], 3.0).unwrap();
    let p2 = AllocationProblem::new(g2, vec![Port::new(1, 2)], 3.0).unwrap();
    let r1 = solve(&p1, &SolverOptions::default(), &tol()).unwrap();
    let r2 = solve(&p2, &SolverOptions::default(), &tol()).unwrap();
    for (new_idx, &old_idx) in perm.iter().enumerate() {
        assert!(
            (r2.weights[new_idx] - r1.weights[old_idx]).abs() <= 1e-9,
            "edge {old_idx} -> {new_idx}: {} vs {}",
            r2.weights[new_idx],
            r1.weights[old_idx]
        );
    }
}

#[test]
fn subgradient_matches_finite_differences_along_simplex_tangents() {
    // independent oracle: central differences along d_i = e_i - 1/m
    let mut rr = rng(55);
    let h = 1e-6;
    for _ in 0..20 {
        let p = random_problem(&mut rr, 2.0);
        let m = p.topology().edge_count();
        let mut w = vec![2.0 / m as f64; m];
        for x in &mut w {
            *x *= rr.random_range(0.8..1.2);
        }
        let total: f64 = w.iter().sum();
        for x in &mut w {
            *x *= 2.0 / total;
        }
        if !objective(&p, &w, &tol()).is_finite() {
            continue;
        }
        let g = subgradient(&p, &w, &tol()).unwrap();
        for i in 0..m {
            let mut plus = w.clone();
            let mut minus = w.clone();
            for j in 0..m {
                let d = if j == i { 1.0 - 1.0 / m as f64 } else { -1.0 / m as f64 };
                plus[j] += h * d;
                minus[j] -= h * d;
            }
            let fd = (objective(&p, &plus, &tol()) - objective(&p, &minus, &tol())) / (2.0 * h);
            let directional = g[i] - g.sum() / m as f64;
            assert!(
                (directional - fd).abs() <= 5e-4,
                "direction {i}: analytic {directional} vs fd {fd}"
            );
        }
    }
}

#[test]
fn grid_oracle_agrees_with_closed_form_on_two_edges() {
    // port across two parallel edges: conductances add, split irrelevant
    let g = Graph::new(2, vec![Edge::new(1, 2, 1.0), Edge::new(1, 2, 1.0)]).unwrap();
    let p = AllocationProblem::new(g, vec![Port::new(1, 2)], 3.0).unwrap();
    let res = grid_oracle(&p, 61, &tol()).unwrap();
    assert!((res.gamma - 1.0 / 3.0).abs() <= 1e-12);
}
