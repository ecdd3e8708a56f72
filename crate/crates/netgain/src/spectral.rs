//! Dense symmetric eigensolver, pseudo-inverse, and PSD testing.
//!
//! Every other module routes its numerics through here so that rank and
//! semidefiniteness decisions follow one tolerance policy. The eigensolver
//! is a cyclic Jacobi iteration: deterministic for a fixed input, which
//! keeps every certificate derived from it reproducible.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Hard cap on Jacobi sweeps before the solver reports failure.
const MAX_SWEEPS: usize = 128;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric (relative asymmetry {0:.3e})")]
    NotSymmetric(f64),
    #[error("Jacobi eigensolver did not converge within {0} sweeps")]
    NoConvergence(usize),
    #[error("matrix is not positive semidefinite (lambda_min = {0:.6e})")]
    NotPositiveSemidefinite(f64),
    #[error("tolerance values must be nonnegative")]
    NegativeTolerance,
}

/// Rank and semidefiniteness thresholds shared across the crate.
///
/// Both knobs are optional absolute overrides. When unset, thresholds scale
/// with the spectrum of the matrix under test: the rank cutoff for
/// pseudo-inversion is `n * eps * |lambda|_max` and the PSD slack is
/// `1e-9 * max(1, |lambda|_max)`. Scale-relative defaults keep verdicts
/// stable when a problem is rescaled (e.g. by the allocation budget).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TolerancePolicy {
    rank_tol: Option<f64>,
    psd_tol: Option<f64>,
}

impl TolerancePolicy {
    pub fn new(rank_tol: Option<f64>, psd_tol: Option<f64>) -> Result<Self, SpectralError> {
        for t in [rank_tol, psd_tol].into_iter().flatten() {
            if !t.is_finite() || t < 0.0 {
                return Err(SpectralError::NegativeTolerance);
            }
        }
        Ok(Self { rank_tol, psd_tol })
    }

    pub fn rank_tol(&self) -> Option<f64> {
        self.rank_tol
    }

    pub fn psd_tol(&self) -> Option<f64> {
        self.psd_tol
    }

    /// Eigenvalues at or below this threshold are treated as zero when
    /// pseudo-inverting a matrix with the given size and spectral radius.
    pub fn rank_cutoff(&self, n: usize, lambda_abs_max: f64) -> f64 {
        self.rank_tol
            .unwrap_or(n as f64 * f64::EPSILON * lambda_abs_max)
    }

    /// Absolute slack granted to `lambda_min` in semidefiniteness verdicts.
    pub fn psd_slack(&self, lambda_abs_max: f64) -> f64 {
        self.psd_tol.unwrap_or(1e-9 * lambda_abs_max.max(1.0))
    }
}

/// Eigenvalues in ascending order paired with orthonormal eigenvectors
/// (column `i` of `eigenvectors` belongs to `eigenvalues[i]`).
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn lambda_min(&self) -> f64 {
        if self.dim() == 0 {
            f64::INFINITY
        } else {
            self.eigenvalues[0]
        }
    }

    pub fn lambda_max(&self) -> f64 {
        if self.dim() == 0 {
            f64::NEG_INFINITY
        } else {
            self.eigenvalues[self.dim() - 1]
        }
    }

    pub fn lambda_abs_max(&self) -> f64 {
        self.lambda_min().abs().max(self.lambda_max().abs())
    }

    /// Q Lambda Q^T.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let q = &self.eigenvectors;
        q * DMatrix::from_diagonal(&self.eigenvalues) * q.transpose()
    }

    /// Applies `f` to each eigenvalue and reassembles Q f(Lambda) Q^T,
    /// symmetrizing the result to remove rounding asymmetry.
    pub fn map_eigenvalues<F: Fn(f64) -> f64>(&self, f: F) -> DMatrix<f64> {
        let mapped = self.eigenvalues.map(f);
        let q = &self.eigenvectors;
        let m = q * DMatrix::from_diagonal(&mapped) * q.transpose();
        symmetrize(&m)
    }
}

/// Semidefiniteness verdict together with the margin that produced it.
#[derive(Debug, Clone, Copy)]
pub struct PsdOutcome {
    pub psd: bool,
    pub lambda_min: f64,
}

pub(crate) fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    0.5 * (m + m.transpose())
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, &x| acc.max(x.abs()))
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// The input must be symmetric within `1e-12` relative asymmetry; it is
/// symmetrized as `(S + S^T)/2` before iterating. Eigenvalues are returned
/// in ascending order. Fails with [`SpectralError::NoConvergence`] if the
/// off-diagonal mass has not collapsed after a fixed sweep budget.
pub fn sym_eig(s: &DMatrix<f64>) -> Result<SpectralDecomposition, SpectralError> {
    let n = s.nrows();
    if n != s.ncols() {
        return Err(SpectralError::NotSquare {
            rows: s.nrows(),
            cols: s.ncols(),
        });
    }
    let scale = max_abs(s);
    let asym = max_abs(&(s - s.transpose()));
    if asym > 1e-12 * scale.max(1.0) {
        return Err(SpectralError::NotSymmetric(asym / scale.max(1.0)));
    }

    let mut a = symmetrize(s);
    let mut q = DMatrix::<f64>::identity(n, n);

    if n > 1 {
        let fro = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        let target = 1e-14 * fro.max(f64::MIN_POSITIVE);
        let mut converged = fro == 0.0;
        for _sweep in 0..MAX_SWEEPS {
            let off = off_diagonal_norm(&a);
            if off <= target {
                converged = true;
                break;
            }
            for p in 0..n - 1 {
                for r in p + 1..n {
                    jacobi_rotate(&mut a, &mut q, p, r);
                }
            }
        }
        if !converged && off_diagonal_norm(&a) > target {
            return Err(SpectralError::NoConvergence(MAX_SWEEPS));
        }
    }

    // Sort ascending; the permutation is stable, so ties keep the
    // deterministic order produced by the sweep.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].partial_cmp(&a[(j, j)]).unwrap());
    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&i| a[(i, i)]));
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &q.column(src));
    }

    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut sum = 0.0;
    for p in 0..n {
        for r in p + 1..n {
            sum += 2.0 * a[(p, r)] * a[(p, r)];
        }
    }
    sum.sqrt()
}

fn jacobi_rotate(a: &mut DMatrix<f64>, q: &mut DMatrix<f64>, p: usize, r: usize) {
    let apr = a[(p, r)];
    if apr == 0.0 {
        return;
    }
    let app = a[(p, p)];
    let arr = a[(r, r)];
    let theta = (arr - app) / (2.0 * apr);
    let t = if theta >= 0.0 {
        1.0 / (theta + (1.0 + theta * theta).sqrt())
    } else {
        -1.0 / (-theta + (1.0 + theta * theta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let n = a.nrows();
    for i in 0..n {
        if i != p && i != r {
            let aip = a[(i, p)];
            let air = a[(i, r)];
            a[(i, p)] = c * aip - s * air;
            a[(p, i)] = a[(i, p)];
            a[(i, r)] = s * aip + c * air;
            a[(r, i)] = a[(i, r)];
        }
    }
    a[(p, p)] = app - t * apr;
    a[(r, r)] = arr + t * apr;
    a[(p, r)] = 0.0;
    a[(r, p)] = 0.0;

    for i in 0..n {
        let qip = q[(i, p)];
        let qir = q[(i, r)];
        q[(i, p)] = c * qip - s * qir;
        q[(i, r)] = s * qip + c * qir;
    }
}

/// Moore-Penrose pseudo-inverse of a symmetric PSD matrix.
///
/// Eigenvalues above the rank cutoff are inverted, the rest are zeroed.
/// Rejects matrices whose smallest eigenvalue falls below the PSD slack.
pub fn pseudo_inverse(
    s: &DMatrix<f64>,
    tol: &TolerancePolicy,
) -> Result<DMatrix<f64>, SpectralError> {
    let dec = sym_eig(s)?;
    pseudo_inverse_from(&dec, tol)
}

/// Same as [`pseudo_inverse`] when the decomposition is already available.
pub fn pseudo_inverse_from(
    dec: &SpectralDecomposition,
    tol: &TolerancePolicy,
) -> Result<DMatrix<f64>, SpectralError> {
    let lam_abs = dec.lambda_abs_max();
    let slack = tol.psd_slack(lam_abs);
    if dec.dim() > 0 && dec.lambda_min() < -slack {
        return Err(SpectralError::NotPositiveSemidefinite(dec.lambda_min()));
    }
    let cutoff = tol.rank_cutoff(dec.dim(), lam_abs);
    Ok(dec.map_eigenvalues(|l| if l > cutoff { 1.0 / l } else { 0.0 }))
}

/// Tests `lambda_min(S) >= -psd_slack` and reports the margin.
pub fn is_psd(s: &DMatrix<f64>, tol: &TolerancePolicy) -> Result<PsdOutcome, SpectralError> {
    let dec = sym_eig(s)?;
    let lambda_min = dec.lambda_min();
    let slack = tol.psd_slack(dec.lambda_abs_max());
    Ok(PsdOutcome {
        psd: lambda_min >= -slack,
        lambda_min,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: usize, cols: usize, data: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(rows, cols, data)
    }

    #[test]
    fn eig_of_k2_laplacian() {
        let s = mat(2, 2, &[2.0, -2.0, -2.0, 2.0]);
        let dec = sym_eig(&s).unwrap();
        assert!((dec.eigenvalues()[0] - 0.0).abs() < 1e-12);
        assert!((dec.eigenvalues()[1] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn eig_of_triangle_laplacian() {
        let s = mat(3, 3, &[2.0, -1.0, -1.0, -1.0, 2.0, -1.0, -1.0, -1.0, 2.0]);
        let dec = sym_eig(&s).unwrap();
        let expect = [0.0, 3.0, 3.0];
        for (got, want) in dec.eigenvalues().iter().zip(expect) {
            assert!((got - want).abs() < 1e-12, "got {got}, want {want}");
        }
        // product of nonzero eigenvalues = n * spanning trees = 3 * 3
        let prod: f64 = dec.eigenvalues().iter().skip(1).product();
        assert!((prod - 9.0).abs() < 1e-9);
    }

    #[test]
    fn decomposition_invariants_hold() {
        let s = mat(
            4,
            4,
            &[
                4.0, 1.0, -2.0, 0.5, 1.0, 3.0, 0.0, -1.0, -2.0, 0.0, 5.0, 2.0, 0.5, -1.0, 2.0, 1.0,
            ],
        );
        let dec = sym_eig(&s).unwrap();
        let q = dec.eigenvectors();
        let ortho = q.transpose() * q - DMatrix::identity(4, 4);
        assert!(max_abs(&ortho) <= 1e-10);
        let recon = dec.reconstruct() - &s;
        assert!(max_abs(&recon) <= 1e-9 * max_abs(&s).max(1.0));
        // eigenvalue sum equals trace
        let trace: f64 = (0..4).map(|i| s[(i, i)]).sum();
        let sum: f64 = dec.eigenvalues().iter().sum();
        assert!((trace - sum).abs() <= 1e-9 * trace.abs().max(1.0));
    }

    #[test]
    fn rejects_asymmetric_input() {
        let s = mat(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(matches!(sym_eig(&s), Err(SpectralError::NotSymmetric(_))));
    }

    #[test]
    fn rejects_non_square_input() {
        let s = DMatrix::<f64>::zeros(2, 3);
        assert!(matches!(sym_eig(&s), Err(SpectralError::NotSquare { .. })));
    }

    #[test]
    fn pseudo_inverse_of_k2() {
        let s = mat(2, 2, &[2.0, -2.0, -2.0, 2.0]);
        let pinv = pseudo_inverse(&s, &TolerancePolicy::default()).unwrap();
        let want = mat(2, 2, &[0.125, -0.125, -0.125, 0.125]);
        assert!(max_abs(&(pinv - want)) < 1e-12);
    }

    #[test]
    fn pseudo_inverse_of_identity() {
        let s = DMatrix::<f64>::identity(3, 3);
        let pinv = pseudo_inverse(&s, &TolerancePolicy::default()).unwrap();
        assert!(max_abs(&(pinv - DMatrix::identity(3, 3))) < 1e-12);
    }

    #[test]
    fn pseudo_inverse_of_triangle_matches_closed_form() {
        // K3 unit Laplacian pinv = (1/9)(3I - ones)
        let s = mat(3, 3, &[2.0, -1.0, -1.0, -1.0, 2.0, -1.0, -1.0, -1.0, 2.0]);
        let pinv = pseudo_inverse(&s, &TolerancePolicy::default()).unwrap();
        let ones = DMatrix::from_element(3, 3, 1.0);
        let want = (DMatrix::identity(3, 3) * 3.0 - ones) / 9.0;
        assert!(max_abs(&(pinv.clone() - want)) < 1e-12);
        // Penrose identities
        let sps = &s * &pinv * &s;
        let psp = &pinv * &s * &pinv;
        assert!(max_abs(&(sps - &s)) <= 1e-8 * max_abs(&s));
        assert!(max_abs(&(psp - &pinv)) <= 1e-8 * max_abs(&pinv));
    }

    #[test]
    fn pseudo_inverse_rejects_indefinite() {
        let s = mat(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(
            pseudo_inverse(&s, &TolerancePolicy::default()),
            Err(SpectralError::NotPositiveSemidefinite(_))
        ));
    }

    #[test]
    fn is_psd_on_zero_matrix() {
        let s = DMatrix::<f64>::zeros(3, 3);
        let out = is_psd(&s, &TolerancePolicy::default()).unwrap();
        assert!(out.psd);
        assert_eq!(out.lambda_min, 0.0);
    }

    #[test]
    fn tolerance_overrides_are_validated() {
        assert!(TolerancePolicy::new(Some(-1.0), None).is_err());
        assert!(TolerancePolicy::new(None, Some(f64::NAN)).is_err());
        let tol = TolerancePolicy::new(Some(1e-10), Some(1e-7)).unwrap();
        assert_eq!(tol.rank_cutoff(5, 100.0), 1e-10);
        assert_eq!(tol.psd_slack(100.0), 1e-7);
    }
}
