//! Signed-Laplacian analysis: positive/negative edge split, effective
//! resistance, and the two-condition semidefiniteness criterion.
//!
//! A signed Laplacian `L = L_+ - B_- W_- B_-^T` is positive semidefinite
//! exactly when (1) every negative edge closes inside one connected
//! component of the positive subgraph and (2) the inverse magnitudes
//! dominate the resistance: `W_-^{-1} >= B_-^T L_+^+ B_-`. The criterion is
//! checked here against the direct eigenvalue verdict on every call site
//! that matters (tests and the acceptance suite).

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::graph::{Edge, Graph};
use crate::spectral::{sym_eig, symmetrize, pseudo_inverse, SpectralError, TolerancePolicy};

#[derive(Debug, Error)]
pub enum SignedError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("probe {index} endpoint {vertex} is out of range 1..={n}")]
    ProbeOutOfRange { index: usize, vertex: usize, n: usize },
    #[error("probe {index} has identical endpoints {vertex}")]
    ProbeLoop { index: usize, vertex: usize },
    #[error("probe {index} spans different components of the positive subgraph")]
    ProbeDisconnected { index: usize },
    #[error(
        "negative edges {0:?} span different components of the positive subgraph; \
         no scaling keeps the Laplacian positive semidefinite"
    )]
    NegativeEdgeAcrossComponents(Vec<usize>),
}

/// Edge partition by weight sign. Zero-weight edges contribute nothing to
/// the Laplacian and are kept separately.
#[derive(Debug, Clone)]
pub struct SignedSplit {
    n: usize,
    positive: Vec<Edge>,
    negative: Vec<Edge>,
    zero: Vec<Edge>,
}

impl SignedSplit {
    pub fn positive(&self) -> &[Edge] {
        &self.positive
    }

    pub fn negative(&self) -> &[Edge] {
        &self.negative
    }

    pub fn zero(&self) -> &[Edge] {
        &self.zero
    }

    /// Positive subgraph as its own graph on the same vertex set.
    pub fn positive_graph(&self) -> Graph {
        Graph::new(self.n, self.positive.clone()).expect("positive sublist of a valid graph")
    }

    pub fn positive_incidence(&self) -> DMatrix<f64> {
        incidence_of(self.n, &self.positive)
    }

    /// Diagonal of W_+ (the positive weights, in edge order).
    pub fn positive_weights(&self) -> DVector<f64> {
        DVector::from_iterator(self.positive.len(), self.positive.iter().map(|e| e.w))
    }

    pub fn negative_incidence(&self) -> DMatrix<f64> {
        incidence_of(self.n, &self.negative)
    }

    /// Diagonal of W_- (magnitudes of the negative weights, all positive).
    pub fn negative_magnitudes(&self) -> DVector<f64> {
        DVector::from_iterator(self.negative.len(), self.negative.iter().map(|e| -e.w))
    }

    /// Laplacian of the positive subgraph.
    pub fn positive_laplacian(&self) -> DMatrix<f64> {
        self.positive_graph().laplacian()
    }

    /// B_+ W_+ B_+^T - B_- W_- B_-^T; must reconstruct the full Laplacian.
    pub fn reconstruct_laplacian(&self) -> DMatrix<f64> {
        let bp = self.positive_incidence();
        let bm = self.negative_incidence();
        let wp = DMatrix::from_diagonal(&self.positive_weights());
        let wm = DMatrix::from_diagonal(&self.negative_magnitudes());
        &bp * wp * bp.transpose() - &bm * wm * bm.transpose()
    }
}

fn incidence_of(n: usize, edges: &[Edge]) -> DMatrix<f64> {
    let mut b = DMatrix::zeros(n, edges.len());
    for (j, e) in edges.iter().enumerate() {
        b[(e.u - 1, j)] = 1.0;
        b[(e.v - 1, j)] = -1.0;
    }
    b
}

/// Partitions the edge list by weight sign, preserving edge order within
/// each part.
pub fn split_signed(g: &Graph) -> SignedSplit {
    let mut positive = Vec::new();
    let mut negative = Vec::new();
    let mut zero = Vec::new();
    for e in g.edges() {
        if e.w > 0.0 {
            positive.push(*e);
        } else if e.w < 0.0 {
            negative.push(*e);
        } else {
            zero.push(*e);
        }
    }
    SignedSplit {
        n: g.vertex_count(),
        positive,
        negative,
        zero,
    }
}

/// Pairwise resistances over a chosen set of probe vertex pairs: the matrix
/// `P^T L_+^+ P` where `P` is the probe incidence. Diagonal entries are
/// effective resistances of the probed pairs.
#[derive(Debug, Clone)]
pub struct ResistanceMatrix {
    probes: Vec<(usize, usize)>,
    matrix: DMatrix<f64>,
}

impl ResistanceMatrix {
    pub fn probes(&self) -> &[(usize, usize)] {
        &self.probes
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Effective resistance of probe pair `i`.
    pub fn resistance(&self, i: usize) -> f64 {
        self.matrix[(i, i)]
    }
}

/// Effective resistance over the positive subgraph of `g` at the given
/// probe pairs. Every probe pair must close inside one component of the
/// positive subgraph.
pub fn effective_resistance(
    g: &Graph,
    probes: &[(usize, usize)],
    tol: &TolerancePolicy,
) -> Result<ResistanceMatrix, SignedError> {
    let n = g.vertex_count();
    let comp = g.connected_components(|e| e.w > 0.0);
    let mut p = DMatrix::zeros(n, probes.len());
    for (index, &(a, b)) in probes.iter().enumerate() {
        for vertex in [a, b] {
            if vertex < 1 || vertex > n {
                return Err(SignedError::ProbeOutOfRange { index, vertex, n });
            }
        }
        if a == b {
            return Err(SignedError::ProbeLoop { index, vertex: a });
        }
        if !comp.same_component(a, b) {
            return Err(SignedError::ProbeDisconnected { index });
        }
        p[(a - 1, index)] = 1.0;
        p[(b - 1, index)] = -1.0;
    }
    let lplus = split_signed(g).positive_laplacian();
    let ld = pseudo_inverse(&lplus, tol)?;
    let matrix = symmetrize(&(p.transpose() * ld * &p));
    Ok(ResistanceMatrix {
        probes: probes.to_vec(),
        matrix,
    })
}

/// Outcome of the two-condition semidefiniteness test.
///
/// `condition2` and the slack matrix are evaluated numerically even when
/// `condition1` fails (the pseudo-resistances remain defined); they are only
/// meaningful as a Laplacian criterion when `condition1` holds.
#[derive(Debug, Clone)]
pub struct PsdVerdict {
    /// Every negative edge closes inside one component of the positive
    /// subgraph.
    pub condition1: bool,
    /// `W_-^{-1} - B_-^T L_+^+ B_-` is positive semidefinite.
    pub condition2: bool,
    /// The slack matrix `W_-^{-1} - B_-^T L_+^+ B_-`.
    pub slack: DMatrix<f64>,
    pub slack_lambda_min: f64,
    /// `condition1 && condition2`; equals the direct eigenvalue verdict on
    /// the full signed Laplacian.
    pub overall: bool,
    /// Indices into the negative edge list that violate condition 1.
    pub offending_negative_edges: Vec<usize>,
}

pub fn psd_check(g: &Graph, tol: &TolerancePolicy) -> Result<PsdVerdict, SignedError> {
    let split = split_signed(g);
    let comp = g.connected_components(|e| e.w > 0.0);
    let offending: Vec<usize> = split
        .negative()
        .iter()
        .enumerate()
        .filter(|(_, e)| !comp.same_component(e.u, e.v))
        .map(|(i, _)| i)
        .collect();
    let condition1 = offending.is_empty();

    let p = split.negative().len();
    let (slack, slack_lambda_min, condition2) = if p == 0 {
        (DMatrix::zeros(0, 0), f64::INFINITY, true)
    } else {
        let ld = pseudo_inverse(&split.positive_laplacian(), tol)?;
        let bm = split.negative_incidence();
        let gamma = symmetrize(&(bm.transpose() * ld * &bm));
        let mags = split.negative_magnitudes();
        let mut slack = -gamma;
        for i in 0..p {
            slack[(i, i)] += 1.0 / mags[i];
        }
        let dec = sym_eig(&slack)?;
        let lam_min = dec.lambda_min();
        let ok = lam_min >= -tol.psd_slack(dec.lambda_abs_max());
        (slack, lam_min, ok)
    };

    Ok(PsdVerdict {
        condition1,
        condition2,
        slack,
        slack_lambda_min,
        overall: condition1 && condition2,
        offending_negative_edges: offending,
    })
}

/// Largest uniform multiplier of the negative magnitudes that preserves
/// positive semidefiniteness:
/// `rho* = 1 / lambda_max(sqrt(W_-) B_-^T L_+^+ B_- sqrt(W_-))`.
/// Infinite when the graph has no negative edges; errors when a negative
/// edge spans components (any positive scaling already breaks PSD).
pub fn critical_scale(g: &Graph, tol: &TolerancePolicy) -> Result<f64, SignedError> {
    let split = split_signed(g);
    if split.negative().is_empty() {
        return Ok(f64::INFINITY);
    }
    let comp = g.connected_components(|e| e.w > 0.0);
    let offending: Vec<usize> = split
        .negative()
        .iter()
        .enumerate()
        .filter(|(_, e)| !comp.same_component(e.u, e.v))
        .map(|(i, _)| i)
        .collect();
    if !offending.is_empty() {
        return Err(SignedError::NegativeEdgeAcrossComponents(offending));
    }
    let ld = pseudo_inverse(&split.positive_laplacian(), tol)?;
    let bm = split.negative_incidence();
    let gamma = symmetrize(&(bm.transpose() * ld * &bm));
    let sqrt_w = DMatrix::from_diagonal(&split.negative_magnitudes().map(f64::sqrt));
    let scaled = symmetrize(&(&sqrt_w * gamma * &sqrt_w));
    let lam_max = sym_eig(&scaled)?.lambda_max();
    // The diagonal holds weighted effective resistances, so lam_max > 0
    // whenever negative edges exist inside a component.
    Ok(1.0 / lam_max)
}
