//! H-infinity analysis of the port-driven network system and of general
//! state-space symmetric systems.
//!
//! The network system is `xdot = -L_w x + E d`, `y = E^T x`. Its gain from
//! d to y is `lambda_max(E^T L_w^+ E)`, attained at zero frequency, and a
//! gain bound `gamma` is equivalent to feasibility of the block matrix
//! `[[L_w, E], [E^T, gamma I]] >= 0`. Both the spectral route and the block
//! route are implemented; tests hold them against each other.

use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{port_matrix, validate_ports, Graph, GraphError, Port, PortMatrix};
use crate::spectral::{
    is_psd, pseudo_inverse_from, sym_eig, symmetrize, SpectralError,
    TolerancePolicy,
};

/// Relative threshold used when testing whether a vector lies in the image
/// of a Laplacian (zero-mode projections of exact port columns are exact
/// zeros up to rounding).
const RANGE_TOL: f64 = 1e-7;

/// Seed for the sampled output-direction check; fixed so results reproduce.
const ARGMAX_SEED: u64 = 0x6172_676d_6178;

#[derive(Debug, Error)]
pub enum HinfError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("edge {index} has negative weight {w}")]
    NegativeWeight { index: usize, w: f64 },
    #[error("infinite gain: {0}")]
    PortsDisconnected(String),
    #[error("dimension mismatch: {0}")]
    ShapeMismatch(String),
    #[error("system matrix is not negative definite (lambda_max = {0:.6e})")]
    NotNegativeDefinite(f64),
    #[error("gamma must be positive and finite (got {0})")]
    InvalidGamma(f64),
    #[error("frequency grid must be nonempty")]
    EmptyGrid,
    #[error("graph is disconnected (lambda_2 at or below the rank cutoff)")]
    Disconnected,
    #[error("input and output vectors must sum to zero")]
    NotBalanced,
    #[error("spectrum violates lambda_2 = ... = lambda_n within 1e-9 relative")]
    SpectrumHypothesis,
}

/// Network system `xdot = -L_w x + E d`, `y = E^T x` with nonnegative edge
/// weights and every port inside one connected component of the
/// positive-weight subgraph. Both invariants are enforced here, so a
/// constructed system always has finite gain.
#[derive(Debug, Clone)]
pub struct NetworkSystem {
    graph: Graph,
    ports: Vec<Port>,
    port_matrix: PortMatrix,
}

impl NetworkSystem {
    pub fn new(graph: Graph, ports: &[Port]) -> Result<Self, HinfError> {
        if let Some((index, e)) = graph
            .edges()
            .iter()
            .enumerate()
            .find(|(_, e)| e.w < 0.0)
        {
            return Err(HinfError::NegativeWeight { index, w: e.w });
        }
        let pm = port_matrix(ports, graph.vertex_count())?;
        let validation = validate_ports(&graph, ports);
        if !validation.ok {
            return Err(HinfError::PortsDisconnected(validation.to_string()));
        }
        Ok(Self {
            graph,
            ports: ports.to_vec(),
            port_matrix: pm,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn ports(&self) -> &[Port] {
        &self.ports
    }

    pub fn port_matrix(&self) -> &PortMatrix {
        &self.port_matrix
    }
}

/// State-space symmetric system `xdot = Ax + Bu`, `y = B^T x` with
/// `A = A^T < 0` (strictly stable).
#[derive(Debug, Clone)]
pub struct SymmetricSystem {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
}

impl SymmetricSystem {
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>) -> Result<Self, HinfError> {
        let dec = sym_eig(&a)?;
        let cutoff = TolerancePolicy::default().rank_cutoff(dec.dim(), dec.lambda_abs_max());
        if dec.dim() == 0 || dec.lambda_max() > -cutoff {
            return Err(HinfError::NotNegativeDefinite(dec.lambda_max()));
        }
        if b.nrows() != a.nrows() {
            return Err(HinfError::ShapeMismatch(format!(
                "input matrix has {} rows, state dimension is {}",
                b.nrows(),
                a.nrows()
            )));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }
}

/// Achieved gain together with the evidence backing it: a unit top
/// eigenvector of `E^T L^+ E` and the minimum eigenvalue of the gain LMI
/// block evaluated at `gamma`. For port-free systems the witness is empty.
#[derive(Debug, Clone)]
pub struct GainCertificate {
    pub gamma: f64,
    pub witness: DVector<f64>,
    pub lmi_margin: f64,
}

/// H-infinity norm of the network system: `lambda_max(E^T L^+ E)`,
/// computed per connected component through the pseudo-inverse (which
/// deflates the all-ones direction of each component).
pub fn hinf_network(
    sys: &NetworkSystem,
    tol: &TolerancePolicy,
) -> Result<GainCertificate, HinfError> {
    let l = sys.graph.laplacian();
    let dec = sym_eig(&l)?;
    let ld = pseudo_inverse_from(&dec, tol)?;
    let e = sys.port_matrix.as_matrix();
    let k = e.ncols();
    let m = symmetrize(&(e.transpose() * &ld * e));
    let (gamma, witness) = if k == 0 {
        (0.0, DVector::zeros(0))
    } else {
        let mdec = sym_eig(&m)?;
        let gamma = mdec.lambda_max().max(0.0);
        (gamma, mdec.eigenvectors().column(k - 1).into_owned())
    };
    let lmi = lmi_feasible(&l, e, gamma, tol)?;
    Ok(GainCertificate {
        gamma,
        witness,
        lmi_margin: lmi.lambda_min,
    })
}

/// Feasibility verdict for the block matrix `[[L, E], [E^T, gamma I]]`.
#[derive(Debug, Clone, Copy)]
pub struct LmiOutcome {
    pub feasible: bool,
    pub lambda_min: f64,
}

/// Gain LMI via eigenvalues of the assembled (n+k) x (n+k) block matrix.
/// This is the oracle route; [`lmi_feasible_schur`] must agree with it.
pub fn lmi_feasible(
    l: &DMatrix<f64>,
    e: &DMatrix<f64>,
    gamma: f64,
    tol: &TolerancePolicy,
) -> Result<LmiOutcome, HinfError> {
    let (n, k) = check_network_shapes(l, e)?;
    let mut block = DMatrix::zeros(n + k, n + k);
    block.view_mut((0, 0), (n, n)).copy_from(l);
    block.view_mut((0, n), (n, k)).copy_from(e);
    block.view_mut((n, 0), (k, n)).copy_from(&e.transpose());
    for i in 0..k {
        block[(n + i, n + i)] = gamma;
    }
    let out = is_psd(&block, tol)?;
    Ok(LmiOutcome {
        feasible: out.psd,
        lambda_min: out.lambda_min,
    })
}

/// Scalar route for the same feasibility question: `L >= 0`,
/// `im E` contained in `im L`, and `gamma >= lambda_max(E^T L^+ E)`.
pub fn lmi_feasible_schur(
    l: &DMatrix<f64>,
    e: &DMatrix<f64>,
    gamma: f64,
    tol: &TolerancePolicy,
) -> Result<bool, HinfError> {
    check_network_shapes(l, e)?;
    let dec = sym_eig(l)?;
    let slack_l = tol.psd_slack(dec.lambda_abs_max());
    if dec.lambda_min() < -slack_l {
        return Ok(false);
    }
    let ld = pseudo_inverse_from(&dec, tol)?;
    if !in_range(l, &ld, e) {
        return Ok(false);
    }
    let gamma_star = if e.ncols() == 0 {
        0.0
    } else {
        let m = symmetrize(&(e.transpose() * &ld * e));
        sym_eig(&m)?.lambda_max().max(0.0)
    };
    let slack = tol.psd_slack(dec.lambda_abs_max().max(gamma.abs()).max(gamma_star));
    Ok(gamma >= -slack && gamma >= gamma_star - slack)
}

fn check_network_shapes(l: &DMatrix<f64>, e: &DMatrix<f64>) -> Result<(usize, usize), HinfError> {
    if l.nrows() != l.ncols() || e.nrows() != l.nrows() {
        return Err(HinfError::ShapeMismatch(format!(
            "Laplacian is {}x{}, ports are {}x{}",
            l.nrows(),
            l.ncols(),
            e.nrows(),
            e.ncols()
        )));
    }
    Ok((l.nrows(), e.ncols()))
}

fn in_range(l: &DMatrix<f64>, ld: &DMatrix<f64>, e: &DMatrix<f64>) -> bool {
    let residual = e - l * (ld * e);
    let e_scale = e.iter().fold(0.0_f64, |a, &x| a.max(x.abs())).max(1.0);
    residual.iter().all(|x| x.abs() <= RANGE_TOL * e_scale)
}

/// Residual of the Riccati inequality at the candidate `P = gamma I`:
/// `R = 2 (gamma A + B B^T)`, which must be negative semidefinite exactly
/// when the gain is at most `gamma`.
#[derive(Debug, Clone)]
pub struct RiccatiOutcome {
    pub residual: DMatrix<f64>,
    pub lambda_max: f64,
    pub holds: bool,
}

pub fn riccati_check(
    sys: &SymmetricSystem,
    gamma: f64,
    tol: &TolerancePolicy,
) -> Result<RiccatiOutcome, HinfError> {
    if !gamma.is_finite() || gamma <= 0.0 {
        return Err(HinfError::InvalidGamma(gamma));
    }
    let bbt = sys.b() * sys.b().transpose();
    let residual = symmetrize(&(2.0 * (gamma * sys.a() + bbt)));
    let dec = sym_eig(&residual)?;
    let slack = tol.psd_slack(dec.lambda_abs_max());
    Ok(RiccatiOutcome {
        lambda_max: dec.lambda_max(),
        holds: dec.lambda_max() <= slack,
        residual,
    })
}

/// H-infinity norm of a state-space symmetric system:
/// `lambda_max(-B^T A^{-1} B)`.
pub fn hinf_symmetric(sys: &SymmetricSystem) -> Result<f64, HinfError> {
    let dec = sym_eig(sys.a())?;
    // A < 0 is a construction invariant, so plain inversion is safe.
    let a_inv = dec.map_eigenvalues(|l| 1.0 / l);
    let m = symmetrize(&(-(sys.b().transpose() * a_inv * sys.b())));
    Ok(sym_eig(&m)?.lambda_max().max(0.0))
}

/// Network system restricted to the image of the Laplacian: diagonal state
/// matrix `-diag(lambda_i)` over the modes above the rank cutoff with input
/// matrix `Q^T E` restricted to those modes.
pub fn deflated_system(
    sys: &NetworkSystem,
    tol: &TolerancePolicy,
) -> Result<SymmetricSystem, HinfError> {
    let dec = sym_eig(&sys.graph.laplacian())?;
    let cutoff = tol.rank_cutoff(dec.dim(), dec.lambda_abs_max());
    let keep: Vec<usize> = (0..dec.dim())
        .filter(|&i| dec.eigenvalues()[i] > cutoff)
        .collect();
    let mut a = DMatrix::zeros(keep.len(), keep.len());
    for (row, &i) in keep.iter().enumerate() {
        a[(row, row)] = -dec.eigenvalues()[i];
    }
    let qe = dec.eigenvectors().transpose() * sys.port_matrix.as_matrix();
    let mut b = DMatrix::zeros(keep.len(), qe.ncols());
    for (row, &i) in keep.iter().enumerate() {
        b.row_mut(row).copy_from(&qe.row(i));
    }
    SymmetricSystem::new(a, b)
}

/// Transfer matrix sample `C (j omega I + L)^{-1} E` and its largest
/// singular value.
#[derive(Debug, Clone)]
pub struct FrequencyResponse {
    pub response: DMatrix<Complex<f64>>,
    pub sigma_max: f64,
}

/// Shared eigenbasis data for repeated frequency evaluations.
struct ResponseEvaluator {
    lambda: DVector<f64>,
    qe: DMatrix<f64>,
    cq: DMatrix<f64>,
    cutoff: f64,
    e_scale: f64,
}

impl ResponseEvaluator {
    fn new(
        l: &DMatrix<f64>,
        e: &DMatrix<f64>,
        c: &DMatrix<f64>,
        tol: &TolerancePolicy,
    ) -> Result<Self, HinfError> {
        check_network_shapes(l, e)?;
        if c.ncols() != l.nrows() {
            return Err(HinfError::ShapeMismatch(format!(
                "output matrix has {} columns, state dimension is {}",
                c.ncols(),
                l.nrows()
            )));
        }
        let dec = sym_eig(l)?;
        let slack = tol.psd_slack(dec.lambda_abs_max());
        if dec.dim() > 0 && dec.lambda_min() < -slack {
            return Err(SpectralError::NotPositiveSemidefinite(dec.lambda_min()).into());
        }
        let cutoff = tol.rank_cutoff(dec.dim(), dec.lambda_abs_max());
        let qe = dec.eigenvectors().transpose() * e;
        let cq = c * dec.eigenvectors();
        let e_scale = e.iter().fold(0.0_f64, |a, &x| a.max(x.abs())).max(1.0);
        Ok(Self {
            lambda: dec.eigenvalues().clone(),
            qe,
            cq,
            cutoff,
            e_scale,
        })
    }

    /// At omega = 0 the zero modes must carry no port signal; the response
    /// is then the pseudo-inverse limit `C L^+ E`.
    fn response(&self, omega: f64) -> Result<(DMatrix<f64>, DMatrix<f64>), HinfError> {
        let rows = self.cq.nrows();
        let cols = self.qe.ncols();
        let mut re = DMatrix::zeros(rows, cols);
        let mut im = DMatrix::zeros(rows, cols);
        for i in 0..self.lambda.len() {
            let lam = self.lambda[i];
            if omega == 0.0 && lam <= self.cutoff {
                let leak = self
                    .qe
                    .row(i)
                    .iter()
                    .fold(0.0_f64, |a, &x| a.max(x.abs()));
                if leak > RANGE_TOL * self.e_scale {
                    return Err(HinfError::PortsDisconnected(format!(
                        "a port excites the zero mode of eigenvalue index {i}"
                    )));
                }
                continue;
            }
            let denom = omega * omega + lam * lam;
            let gr = lam / denom;
            let gi = -omega / denom;
            for r in 0..rows {
                for c in 0..cols {
                    let outer = self.cq[(r, i)] * self.qe[(i, c)];
                    re[(r, c)] += gr * outer;
                    im[(r, c)] += gi * outer;
                }
            }
        }
        Ok((re, im))
    }

    fn sigma(&self, omega: f64) -> Result<f64, HinfError> {
        let (re, im) = self.response(omega)?;
        Ok(sigma_max_complex(&re, &im))
    }
}

/// Largest singular value of `X + jY` via the real block representation
/// `[[X, -Y], [Y, X]]`, whose singular values duplicate those of the
/// complex matrix.
fn sigma_max_complex(re: &DMatrix<f64>, im: &DMatrix<f64>) -> f64 {
    let (rows, cols) = re.shape();
    if rows == 0 || cols == 0 {
        return 0.0;
    }
    if rows == 1 && cols == 1 {
        return re[(0, 0)].hypot(im[(0, 0)]);
    }
    let mut block = DMatrix::zeros(2 * rows, 2 * cols);
    block.view_mut((0, 0), (rows, cols)).copy_from(re);
    block.view_mut((rows, cols), (rows, cols)).copy_from(re);
    block.view_mut((0, cols), (rows, cols)).copy_from(&(-im));
    block.view_mut((rows, 0), (rows, cols)).copy_from(im);
    let gram = symmetrize(&(block.transpose() * &block));
    // The Gram matrix of a finite real matrix is PSD by construction, so
    // eigensolving cannot fail except on non-finite input.
    let dec = sym_eig(&gram).expect("Gram matrix eigendecomposition");
    dec.lambda_max().max(0.0).sqrt()
}

pub fn freq_response(
    l: &DMatrix<f64>,
    e: &DMatrix<f64>,
    c: &DMatrix<f64>,
    omega: f64,
    tol: &TolerancePolicy,
) -> Result<FrequencyResponse, HinfError> {
    let ev = ResponseEvaluator::new(l, e, c, tol)?;
    let (re, im) = ev.response(omega)?;
    let sigma_max = sigma_max_complex(&re, &im);
    let response =
        DMatrix::from_fn(re.nrows(), re.ncols(), |i, j| Complex::new(re[(i, j)], im[(i, j)]));
    Ok(FrequencyResponse {
        response,
        sigma_max,
    })
}

/// Frequency sweep: per-sample largest singular values plus the peak.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub samples: Vec<(f64, f64)>,
    pub peak_sigma: f64,
    pub peak_omega: f64,
}

pub fn hinf_sweep(
    l: &DMatrix<f64>,
    e: &DMatrix<f64>,
    c: &DMatrix<f64>,
    grid: &[f64],
    tol: &TolerancePolicy,
) -> Result<SweepResult, HinfError> {
    if grid.is_empty() {
        return Err(HinfError::EmptyGrid);
    }
    let ev = ResponseEvaluator::new(l, e, c, tol)?;
    let mut samples = Vec::with_capacity(grid.len());
    let (mut peak_sigma, mut peak_omega) = (f64::NEG_INFINITY, grid[0]);
    for &omega in grid {
        let s = ev.sigma(omega)?;
        samples.push((omega, s));
        if s > peak_sigma {
            peak_sigma = s;
            peak_omega = omega;
        }
    }
    Ok(SweepResult {
        samples,
        peak_sigma,
        peak_omega,
    })
}

/// Default sweep grid: omega = 0 plus `points - 1` log-spaced frequencies
/// spanning `[1e-3 lambda_2, 1e3 lambda_n]` (upper end overridable), which
/// brackets all time constants of the system.
pub fn log_grid(
    l: &DMatrix<f64>,
    points: usize,
    omega_max: Option<f64>,
    tol: &TolerancePolicy,
) -> Result<Vec<f64>, HinfError> {
    if points == 0 {
        return Err(HinfError::EmptyGrid);
    }
    let dec = sym_eig(l)?;
    let cutoff = tol.rank_cutoff(dec.dim(), dec.lambda_abs_max());
    let positive: Vec<f64> = dec
        .eigenvalues()
        .iter()
        .copied()
        .filter(|&x| x > cutoff)
        .collect();
    let (mut lo, mut hi) = match (positive.first(), positive.last()) {
        (Some(&l2), Some(&ln)) => (1e-3 * l2, 1e3 * ln),
        _ => (1e-3, 1e3),
    };
    if let Some(wmax) = omega_max {
        hi = wmax;
        if lo >= hi {
            lo = hi / 1e6;
        }
    }
    let mut grid = vec![0.0];
    let m = points - 1;
    if m == 1 {
        grid.push(hi);
    } else if m > 1 {
        let (llo, lhi) = (lo.ln(), hi.ln());
        for i in 0..m {
            let t = i as f64 / (m - 1) as f64;
            grid.push((llo + t * (lhi - llo)).exp());
        }
    }
    Ok(grid)
}

/// Measured H-infinity norm for an arbitrary output matrix: default sweep
/// plus golden-section refinement around the grid argmax (tolerance 1e-8
/// in omega). For `C = E^T` the peak sits at omega = 0 and the sweep alone
/// is exact.
pub fn hinf_measured(
    l: &DMatrix<f64>,
    e: &DMatrix<f64>,
    c: &DMatrix<f64>,
    tol: &TolerancePolicy,
) -> Result<f64, HinfError> {
    let grid = log_grid(l, 401, None, tol)?;
    let ev = ResponseEvaluator::new(l, e, c, tol)?;
    let mut best = f64::NEG_INFINITY;
    let mut best_idx = 0;
    for (i, &omega) in grid.iter().enumerate() {
        let s = ev.sigma(omega)?;
        if s > best {
            best = s;
            best_idx = i;
        }
    }
    let (mut a, mut b) = if best_idx == 0 {
        (grid[0], grid[1])
    } else if best_idx + 1 == grid.len() {
        (grid[best_idx - 1], grid[best_idx])
    } else {
        (grid[best_idx - 1], grid[best_idx + 1])
    };
    const PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - PHI * (b - a);
    let mut x2 = a + PHI * (b - a);
    let mut f1 = ev.sigma(x1)?;
    let mut f2 = ev.sigma(x2)?;
    let mut iters = 0;
    while b - a > 1e-8 && iters < 200 {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - PHI * (b - a);
            f1 = ev.sigma(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + PHI * (b - a);
            f2 = ev.sigma(x2)?;
        }
        iters += 1;
    }
    Ok(best.max(f1).max(f2))
}

/// Gain upper bound `||C||_2 ||E||_2 / lambda_2` for a SISO system on a
/// connected graph with balanced input and output vectors.
pub fn corollary_bound(
    l: &DMatrix<f64>,
    e: &DMatrix<f64>,
    c: &DMatrix<f64>,
    tol: &TolerancePolicy,
) -> Result<f64, HinfError> {
    if e.ncols() != 1 || c.nrows() != 1 {
        return Err(HinfError::ShapeMismatch(
            "bound is defined for single-port systems (E n x 1, C 1 x n)".into(),
        ));
    }
    check_network_shapes(l, e)?;
    if c.ncols() != l.nrows() {
        return Err(HinfError::ShapeMismatch(
            "output vector length must match the vertex count".into(),
        ));
    }
    let balance_e = e.column(0).sum().abs();
    let balance_c = c.row(0).sum().abs();
    let scale = e.norm().max(c.norm()).max(1.0);
    if balance_e > 1e-9 * scale || balance_c > 1e-9 * scale {
        return Err(HinfError::NotBalanced);
    }
    let lambda2 = algebraic_connectivity(l, tol)?;
    Ok(c.norm() * e.norm() / lambda2)
}

/// Smallest positive Laplacian eigenvalue; errors when the graph is
/// disconnected (more than one zero mode).
fn algebraic_connectivity(l: &DMatrix<f64>, tol: &TolerancePolicy) -> Result<f64, HinfError> {
    let dec = sym_eig(l)?;
    let cutoff = tol.rank_cutoff(dec.dim(), dec.lambda_abs_max());
    let zeros = dec.eigenvalues().iter().filter(|&&x| x <= cutoff).count();
    if zeros != 1 {
        return Err(HinfError::Disconnected);
    }
    Ok(dec.eigenvalues()[1])
}

/// Samples `trials` random balanced output vectors with `||C|| = ||E||` and
/// verifies none of them beats the gain of `C = E^T`. Requires the
/// complete-graph-type spectrum `lambda_2 = ... = lambda_n`.
pub fn argmax_c_check(
    l: &DMatrix<f64>,
    e: &DMatrix<f64>,
    trials: usize,
    tol: &TolerancePolicy,
) -> Result<bool, HinfError> {
    if e.ncols() != 1 {
        return Err(HinfError::ShapeMismatch(
            "the sampled-output check is defined for single-port systems".into(),
        ));
    }
    let n = l.nrows();
    let dec = sym_eig(l)?;
    let cutoff = tol.rank_cutoff(n, dec.lambda_abs_max());
    let zeros = dec.eigenvalues().iter().filter(|&&x| x <= cutoff).count();
    if zeros != 1 {
        return Err(HinfError::Disconnected);
    }
    let (l2, ln) = (dec.eigenvalues()[1], dec.lambda_max());
    if ln - l2 > 1e-9 * ln.max(1.0) {
        return Err(HinfError::SpectrumHypothesis);
    }
    if e.column(0).sum().abs() > 1e-9 * e.norm().max(1.0) {
        return Err(HinfError::NotBalanced);
    }

    let baseline = hinf_measured(l, e, &e.transpose(), tol)?;
    let target = e.norm();
    let mut rng = ChaCha8Rng::seed_from_u64(ARGMAX_SEED);
    for _ in 0..trials {
        let mut c = DMatrix::zeros(1, n);
        loop {
            for j in 0..n {
                c[(0, j)] = rng.random_range(-1.0..1.0);
            }
            let mean = c.row(0).sum() / n as f64;
            for j in 0..n {
                c[(0, j)] -= mean;
            }
            let norm = c.norm();
            if norm > 1e-3 {
                c *= target / norm;
                break;
            }
        }
        if hinf_measured(l, e, &c, tol)? > baseline + 1e-9 {
            return Ok(false);
        }
    }
    Ok(true)
}
