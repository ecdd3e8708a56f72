//! Optimal edge-weight allocation: minimize the network gain over the
//! budget simplex `{ w >= 0, sum w = c }`.
//!
//! The objective `w -> lambda_max(E^T L_w^+ E)` is convex on the simplex
//! (it is a maximum of convex functions `1/x`-type modal gains). It is
//! minimized here by projected subgradient descent with Polyak-style steps
//! against a running linearization lower bound; the gain LMI at the
//! returned point serves as the certificate.

use nalgebra::DVector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{port_matrix, validate_ports, Graph, GraphError, Port};
use crate::hinf::{hinf_network, GainCertificate, HinfError, NetworkSystem};
use crate::spectral::{pseudo_inverse_from, sym_eig, symmetrize, TolerancePolicy};

#[derive(Debug, Error)]
pub enum AllocateError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Hinf(#[from] HinfError),
    #[error("budget must be positive and finite (got {0})")]
    BadBudget(f64),
    #[error("no feasible start: {0}")]
    Infeasible(String),
    #[error("objective is infinite at this point (a port is disconnected)")]
    InfiniteObjective,
    #[error("grid oracle supports at most 4 edges (got {0})")]
    TooManyEdges(usize),
    #[error("grid resolution must be at least 2 (got {0})")]
    BadResolution(usize),
}

/// Topology, ports, and budget. Stored weights of the topology are ignored
/// by the solver (the search starts from the uniform point); ports must be
/// connected when every edge of the topology is usable.
#[derive(Debug, Clone)]
pub struct AllocationProblem {
    topology: Graph,
    ports: Vec<Port>,
    budget: f64,
}

impl AllocationProblem {
    pub fn new(topology: Graph, ports: Vec<Port>, budget: f64) -> Result<Self, AllocateError> {
        if !budget.is_finite() || budget <= 0.0 {
            return Err(AllocateError::BadBudget(budget));
        }
        port_matrix(&ports, topology.vertex_count())?;
        let all_edges = topology.with_weights(&vec![1.0; topology.edge_count()])?;
        let validation = validate_ports(&all_edges, &ports);
        if !validation.ok {
            return Err(AllocateError::Infeasible(validation.to_string()));
        }
        Ok(Self {
            topology,
            ports,
            budget,
        })
    }

    pub fn topology(&self) -> &Graph {
        &self.topology
    }

    pub fn ports(&self) -> &[Port] {
        &self.ports
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }
}

/// Solver knobs. Defaults: 5000 iterations, 1e-6 relative objective
/// tolerance over a 100-iteration window, two seeded perturbation restarts
/// after stalls.
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub max_iters: usize,
    /// Scale factor of the diminishing fallback step `scale * c / sqrt(t)`.
    pub step_scale: f64,
    /// Relative objective tolerance of the stall test.
    pub obj_tol: f64,
    /// Length of the stall window, in iterations.
    pub window: usize,
    /// Perturbation restarts taken after a stall before giving up.
    pub restarts: usize,
    /// Seed of the restart perturbations.
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iters: 5000,
            step_scale: 1.0,
            obj_tol: 1e-6,
            window: 100,
            restarts: 2,
            seed: 0,
        }
    }
}

/// Best feasible point found, its gain, and the certificate at that point.
#[derive(Debug, Clone)]
pub struct AllocationResult {
    pub weights: DVector<f64>,
    pub gamma: f64,
    pub iterations: usize,
    /// Best objective minus the best linearization lower bound; diagnostic
    /// only.
    pub best_gap: f64,
    pub certificate: GainCertificate,
}

/// Network gain at the weight vector `w`, or `+inf` when some port is
/// disconnected in the `w > 0` subgraph.
pub fn objective(problem: &AllocationProblem, w: &[f64], tol: &TolerancePolicy) -> f64 {
    match evaluate(problem, w, tol) {
        Ok((gamma, _)) => gamma,
        Err(_) => f64::INFINITY,
    }
}

/// Subgradient of the gain at `w`: `g_i = -(b_i^T L^+ E v)^2` with `v` the
/// certificate witness and `b_i` the i-th incidence column.
pub fn subgradient(
    problem: &AllocationProblem,
    w: &[f64],
    tol: &TolerancePolicy,
) -> Result<DVector<f64>, AllocateError> {
    evaluate(problem, w, tol).map(|(_, g)| g)
}

fn evaluate(
    problem: &AllocationProblem,
    w: &[f64],
    tol: &TolerancePolicy,
) -> Result<(f64, DVector<f64>), AllocateError> {
    let graph = problem.topology.with_weights(w)?;
    if !validate_ports(&graph, &problem.ports).ok {
        return Err(AllocateError::InfiniteObjective);
    }
    let e = port_matrix(&problem.ports, graph.vertex_count())?;
    let e = e.as_matrix();
    let m_edges = graph.edge_count();
    let dec = sym_eig(&graph.laplacian()).map_err(HinfError::from)?;
    let ld = pseudo_inverse_from(&dec, tol).map_err(HinfError::from)?;
    if e.ncols() == 0 {
        return Ok((0.0, DVector::zeros(m_edges)));
    }
    let m = symmetrize(&(e.transpose() * &ld * e));
    let mdec = sym_eig(&m).map_err(HinfError::from)?;
    let gamma = mdec.lambda_max().max(0.0);
    let v = mdec.eigenvectors().column(e.ncols() - 1);
    let t = &ld * (e * v);
    let g = DVector::from_iterator(
        m_edges,
        graph.edges().iter().map(|edge| {
            let d = t[edge.u - 1] - t[edge.v - 1];
            -(d * d)
        }),
    );
    Ok((gamma, g))
}

/// Euclidean projection onto `{ w >= 0, sum w = c }` by the sorted
/// threshold method (exact).
pub fn project_simplex(v: &[f64], c: f64) -> DVector<f64> {
    assert!(!v.is_empty() && c > 0.0);
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cumulative += uj;
        let candidate = (cumulative - c) / (j + 1) as f64;
        if uj - candidate > 0.0 {
            theta = candidate;
        }
    }
    DVector::from_iterator(v.len(), v.iter().map(|&x| (x - theta).max(0.0)))
}

/// Projected subgradient descent from the uniform point with best-iterate
/// tracking. Steps are Polyak-sized against the running linearization lower
/// bound `max_t [ f(w_t) + c min_i g_i - g^T w_t ]`, falling back to a
/// diminishing `c/sqrt(t)` rule before a bound exists; iterates with an
/// infinite objective are rejected and the step halved.
pub fn solve(
    problem: &AllocationProblem,
    opts: &SolverOptions,
    tol: &TolerancePolicy,
) -> Result<AllocationResult, AllocateError> {
    let m = problem.topology.edge_count();
    let c = problem.budget;
    if m == 0 {
        return Err(AllocateError::Infeasible("topology has no edges".into()));
    }
    let mut w = DVector::from_element(m, c / m as f64);
    let (f0, mut g) = match evaluate(problem, w.as_slice(), tol) {
        Ok(pair) => pair,
        Err(_) => {
            return Err(AllocateError::Infeasible(
                "uniform start has infinite gain".into(),
            ))
        }
    };

    let mut best_w = w.clone();
    let mut best_f = f0;
    let mut lower_bound = f64::NEG_INFINITY;
    let mut best_history = vec![best_f];
    let mut total_iters = 1usize;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut f = f0;

    'phases: for phase in 0..=opts.restarts {
        loop {
            // Linearization of the convex objective lower-bounds the optimum
            // over the whole simplex.
            let lb_t = f + c * g.min() - g.dot(&w);
            lower_bound = lower_bound.max(lb_t);
            let gnorm2 = g.norm_squared();
            if gnorm2 <= 1e-30 {
                break 'phases;
            }
            let mut step = if lower_bound.is_finite() && f - lower_bound > 0.0 {
                (f - lower_bound) / gnorm2
            } else {
                opts.step_scale * c / ((total_iters as f64).sqrt() * gnorm2.sqrt())
            };

            let mut accepted = None;
            for _ in 0..60 {
                let candidate = project_simplex((&w - step * &g).as_slice(), c);
                if let Ok(pair) = evaluate(problem, candidate.as_slice(), tol) {
                    accepted = Some((candidate, pair));
                    break;
                }
                step *= 0.5;
            }
            let Some((next_w, (next_f, next_g))) = accepted else {
                break; // pinned against an infeasible face; restart or stop
            };
            w = next_w;
            f = next_f;
            g = next_g;
            total_iters += 1;
            if f < best_f {
                best_f = f;
                best_w = w.clone();
            }
            best_history.push(best_f);

            if total_iters >= opts.max_iters {
                break 'phases;
            }
            if best_history.len() > opts.window {
                let past = best_history[best_history.len() - 1 - opts.window];
                if past - best_f <= opts.obj_tol * best_f.abs().max(1.0) {
                    break; // stalled
                }
            }
        }

        if phase < opts.restarts {
            // Seeded perturbation restart around the incumbent; the radius
            // scales with the budget so solutions stay covariant under
            // budget rescaling.
            let mut radius = 0.05 * c;
            let mut restarted = false;
            for _ in 0..20 {
                let jitter = DVector::from_iterator(
                    m,
                    (0..m).map(|_| rng.random_range(-1.0..1.0) * radius),
                );
                let candidate = project_simplex((&best_w + jitter).as_slice(), c);
                if let Ok((cf, cg)) = evaluate(problem, candidate.as_slice(), tol) {
                    w = candidate;
                    f = cf;
                    g = cg;
                    restarted = true;
                    break;
                }
                radius *= 0.5;
            }
            if !restarted {
                break;
            }
            total_iters += 1;
            if f < best_f {
                best_f = f;
                best_w = w.clone();
            }
            best_history.push(best_f);
            if total_iters >= opts.max_iters {
                break;
            }
        }
    }

    // Snap weight dust to exact zero so the returned Laplacian carries
    // structural kernels instead of near-singular directions; keep the raw
    // iterate if cleaning disconnects a port or measurably worsens the gain.
    let snapped: Vec<f64> = best_w
        .iter()
        .map(|&x| if x <= 1e-7 * c { 0.0 } else { x })
        .collect();
    let snapped_sum: f64 = snapped.iter().sum();
    if snapped_sum > 0.0 && snapped.iter().zip(best_w.iter()).any(|(a, b)| a != b) {
        let rescaled = DVector::from_iterator(m, snapped.iter().map(|x| x * c / snapped_sum));
        if let Ok((f_clean, _)) = evaluate(problem, rescaled.as_slice(), tol) {
            if f_clean <= best_f * (1.0 + 1e-6) {
                best_w = rescaled;
            }
        }
    }

    let certificate = certificate_at(problem, &best_w, tol)?;
    Ok(AllocationResult {
        gamma: certificate.gamma,
        weights: best_w,
        iterations: total_iters,
        best_gap: (certificate.gamma - lower_bound).max(0.0),
        certificate,
    })
}

/// Exhaustive evaluation on the simplex lattice with `resolution` points
/// per dimension; ties resolve to the lexicographically smallest lattice
/// point. Restricted to at most 4 edges (cost grows as resolution^(m-1)).
pub fn grid_oracle(
    problem: &AllocationProblem,
    resolution: usize,
    tol: &TolerancePolicy,
) -> Result<AllocationResult, AllocateError> {
    let m = problem.topology.edge_count();
    if m == 0 || m > 4 {
        return Err(AllocateError::TooManyEdges(m));
    }
    if resolution < 2 {
        return Err(AllocateError::BadResolution(resolution));
    }
    let levels = (resolution - 1) as u32;
    let step = problem.budget / levels as f64;
    let lattice = compositions(levels, m);
    let evaluated = lattice
        .par_iter()
        .map(|point| {
            let w: Vec<f64> = point[..m].iter().map(|&k| k as f64 * step).collect();
            (objective(problem, &w, tol), *point)
        })
        .reduce(
            || (f64::INFINITY, [u32::MAX; 4]),
            |a, b| {
                if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            },
        );
    if !evaluated.0.is_finite() {
        return Err(AllocateError::Infeasible(
            "every lattice point has infinite gain".into(),
        ));
    }
    let weights = DVector::from_iterator(
        m,
        evaluated.1[..m].iter().map(|&k| k as f64 * step),
    );
    let certificate = certificate_at(problem, &weights, tol)?;
    Ok(AllocationResult {
        gamma: certificate.gamma,
        weights,
        iterations: lattice.len(),
        best_gap: 0.0,
        certificate,
    })
}

fn certificate_at(
    problem: &AllocationProblem,
    w: &DVector<f64>,
    tol: &TolerancePolicy,
) -> Result<GainCertificate, AllocateError> {
    let graph = problem.topology.with_weights(w.as_slice())?;
    let sys = NetworkSystem::new(graph, &problem.ports)?;
    Ok(hinf_network(&sys, tol)?)
}

/// All vectors of `m` nonnegative integers summing to `levels`, padded to
/// fixed width, in lexicographic order.
fn compositions(levels: u32, m: usize) -> Vec<[u32; 4]> {
    let mut out = Vec::new();
    let mut point = [0u32; 4];
    fn rec(out: &mut Vec<[u32; 4]>, point: &mut [u32; 4], pos: usize, m: usize, left: u32) {
        if pos + 1 == m {
            point[pos] = left;
            out.push(*point);
            return;
        }
        for k in 0..=left {
            point[pos] = k;
            rec(out, point, pos + 1, m, left - k);
        }
    }
    rec(&mut out, &mut point, 0, m, levels);
    out
}
