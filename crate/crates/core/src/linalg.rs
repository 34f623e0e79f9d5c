//! Dense symmetric matrix kernel.
//!
//! Everything here works on small (n ≤ 32) real symmetric matrices: the
//! eigendecomposition is delegated to `nalgebra`, and the remaining
//! functions are spectral calculus on top of it. Units follow the
//! convention where the vacuum has variance ½, so the quantumness bound of
//! a pair of identities is `n`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Eigenvalues in `[-PSD_TOLERANCE, 0)` are treated as rounding noise and
/// clipped to zero.
pub const PSD_TOLERANCE: f64 = 1e-10;

/// Smallest eigenvalue at which a matrix still counts as strictly positive
/// definite for gradient evaluation.
pub const PD_THRESHOLD: f64 = 1e-12;

const EIGEN_MAX_SWEEPS: usize = 10_000;

/// Real symmetric matrix.
///
/// Construction symmetrizes the input as `(A + Aᵀ)/2`, so `get(i, j) ==
/// get(j, i)` holds exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix(DMatrix<f64>);

impl SymMatrix {
    /// Build from row-major nested rows. Rows must form a square matrix of
    /// finite numbers.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        for row in rows {
            if row.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
        }
        Self::from_matrix(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                if !m[(i, j)].is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Self::symmetrized(m))
    }

    /// Symmetrizes without validation; callers guarantee finiteness.
    pub(crate) fn symmetrized(m: DMatrix<f64>) -> Self {
        let n = m.nrows();
        let mut out = m;
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = 0.5 * (out[(i, j)] + out[(j, i)]);
                out[(i, j)] = avg;
                out[(j, i)] = avg;
            }
        }
        SymMatrix(out)
    }

    pub fn zeros(n: usize) -> Self {
        SymMatrix(DMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        SymMatrix(DMatrix::identity(n, n))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        SymMatrix(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    /// Rank-one matrix `a aᵀ`.
    pub fn outer(a: &[f64]) -> Self {
        let n = a.len();
        SymMatrix(DMatrix::from_fn(n, n, |i, j| a[i] * a[j]))
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.0[(i, j)] = value;
        self.0[(j, i)] = value;
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n())
            .map(|i| (0..self.n()).map(|j| self.0[(i, j)]).collect())
            .collect()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        SymMatrix(&self.0 * factor)
    }

    /// `self + factor * other`
    pub fn add_scaled(&self, other: &SymMatrix, factor: f64) -> Self {
        SymMatrix(&self.0 + &other.0 * factor)
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    /// `tr(self · other)`, which for symmetric arguments is the Frobenius
    /// inner product.
    pub fn dot(&self, other: &SymMatrix) -> f64 {
        self.0.dot(&other.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(*eig_sym(self)?.values.last().unwrap_or(&0.0))
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        if self.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.n(),
            });
        }
        Ok(())
    }
}

impl Serialize for SymMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SymMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(deserializer)?;
        SymMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// Eigendecomposition of a symmetric matrix, eigenvalues descending.
#[derive(Clone, Debug)]
pub struct SymEigen {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, in the order of `values`.
    pub vectors: DMatrix<f64>,
}

impl SymEigen {
    /// `V diag(f(w)) Vᵀ`
    pub fn map(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (k, &w) in self.values.iter().enumerate() {
            let fw = f(w);
            for i in 0..n {
                scaled[(i, k)] *= fw;
            }
        }
        SymMatrix::symmetrized(&scaled * self.vectors.transpose())
    }

    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

pub fn eig_sym(a: &SymMatrix) -> Result<SymEigen> {
    let n = a.n();
    if n == 0 {
        return Ok(SymEigen {
            values: Vec::new(),
            vectors: DMatrix::zeros(0, 0),
        });
    }
    let eig = a
        .0
        .clone()
        .try_symmetric_eigen(f64::EPSILON, EIGEN_MAX_SWEEPS)
        .ok_or(Error::NonConvergence {
            n,
            norm: a.max_abs(),
        })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, k| eig.eigenvectors[(i, order[k])]);
    Ok(SymEigen { values, vectors })
}

fn check_psd(eig: &SymEigen) -> Result<()> {
    let min = eig.min();
    if min < -PSD_TOLERANCE {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
        });
    }
    Ok(())
}

/// Principal square root of a positive semidefinite matrix. Eigenvalues at
/// rounding level (below `n·ε·max|λ|`) are treated as exact zeros, so
/// singular inputs keep their null space.
pub fn sqrt_psd(a: &SymMatrix) -> Result<SymMatrix> {
    let eig = eig_sym(a)?;
    check_psd(&eig)?;
    let scale = eig.values.iter().fold(0.0f64, |m, w| m.max(w.abs()));
    let floor = a.n() as f64 * f64::EPSILON * scale;
    Ok(eig.map(|w| if w > floor { w.sqrt() } else { 0.0 }))
}

/// Quantumness bound `tr √(√X P √X)`: the minimum of `tr(X γxx) + tr(P γpp)`
/// over all physical covariance matrices.
pub fn quantum_bound(x: &SymMatrix, p: &SymMatrix) -> Result<f64> {
    p.check_dim(x.n())?;
    let sx = sqrt_psd(x)?;
    let sp = sqrt_psd(p)?;
    // tr √(√X P √X) is the sum of the singular values of √P √X.
    let product = sp.as_matrix() * sx.as_matrix();
    let norm = product.amax();
    let svd = product.try_svd(false, false, f64::EPSILON, EIGEN_MAX_SWEEPS).ok_or(Error::NonConvergence {
        n: x.n(),
        norm,
    })?;
    Ok(svd.singular_values.iter().sum())
}

/// Gradient of [`quantum_bound`] with respect to `X` and `P`, as symmetric
/// matrices `G` with `dB = tr(G_X dX) + tr(G_P dP)`.
///
/// Both arguments must be strictly positive definite. The pair returned is
/// also the covariance blocks `(γxx, γpp)` of the state attaining the bound.
pub fn quantum_bound_gradient(x: &SymMatrix, p: &SymMatrix) -> Result<(SymMatrix, SymMatrix)> {
    p.check_dim(x.n())?;
    let ex = eig_sym(x)?;
    let ep = eig_sym(p)?;
    for e in [&ex, &ep] {
        if e.min() <= PD_THRESHOLD {
            return Err(Error::SingularGradient {
                min_eigenvalue: e.min(),
            });
        }
    }
    let sx = ex.map(f64::sqrt);
    let sp = ep.map(f64::sqrt);
    // √P √X = U Σ Vᵀ gives (√X P √X)^{-1/2} = V Σ⁻¹ Vᵀ and
    // (√P X √P)^{-1/2} = U Σ⁻¹ Uᵀ without squaring the conditioning.
    let product = sp.as_matrix() * sx.as_matrix();
    let norm = product.norm();
    let svd = product
        .try_svd(true, true, f64::EPSILON, EIGEN_MAX_SWEEPS)
        .ok_or(Error::NonConvergence { n: x.n(), norm })?;
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(Error::NonConvergence { n: x.n(), norm }),
    };
    let smallest = svd.singular_values.min();
    if !(smallest > 0.0) {
        return Err(Error::SingularGradient {
            min_eigenvalue: smallest * smallest,
        });
    }
    let inv = DMatrix::from_diagonal(&svd.singular_values.map(|w| 0.5 / w));
    let dx = sp.as_matrix() * (&u * &inv * u.transpose()) * sp.as_matrix();
    let dp = sx.as_matrix() * (v_t.transpose() * &inv * &v_t) * sx.as_matrix();
    Ok((SymMatrix::symmetrized(dx), SymMatrix::symmetrized(dp)))
}

/// Symplectic eigenvalues, descending.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymplecticSpectrum {
    pub values: Vec<f64>,
}

impl SymplecticSpectrum {
    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(f64::INFINITY)
    }
}

/// Symplectic form `[[0, E], [-E, 0]]` for phase-space ordering
/// `(x₁ … xₙ, p₁ … pₙ)`.
pub fn symplectic_form(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = 1.0;
        j[(n + i, i)] = -1.0;
    }
    j
}

/// Symplectic spectrum of a PSD `2n × 2n` matrix: the moduli `λ` of the
/// eigenvalues `±iλ` of `J γ`.
///
/// `-(Jγ)²` has each `λ²` twice and is similar to the symmetric PSD matrix
/// `√γ Jᵀ γ J √γ`, so the spectrum comes out of a symmetric eigensolve.
pub fn symplectic_spectrum(gamma: &SymMatrix) -> Result<SymplecticSpectrum> {
    let dim = gamma.n();
    if !dim.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "phase-space matrix must have even dimension, got {dim}"
        )));
    }
    let j = symplectic_form(dim / 2);
    let root = sqrt_psd(gamma)?;
    let r = root.as_matrix();
    let squared = SymMatrix::symmetrized(r * j.transpose() * gamma.as_matrix() * &j * r);
    let eig = eig_sym(&squared)?;
    let values = eig
        .values
        .iter()
        .step_by(2)
        .map(|&w| w.max(0.0).sqrt())
        .collect();
    Ok(SymplecticSpectrum { values })
}

/// `tr √(√X P √X) − tr(√X √P)`; nonnegative for all PSD pairs.
pub fn alt_inequality_gap(x: &SymMatrix, p: &SymMatrix) -> Result<f64> {
    let bound = quantum_bound(x, p)?;
    let sx = sqrt_psd(x)?;
    let sp = sqrt_psd(p)?;
    Ok(bound - sx.dot(&sp))
}

/// Block-diagonal phase-space matrix `diag(a, b)`.
pub fn block_diag(a: &SymMatrix, b: &SymMatrix) -> SymMatrix {
    let n = a.n();
    let m = b.n();
    let mut out = DMatrix::zeros(n + m, n + m);
    out.view_mut((0, 0), (n, n)).copy_from(a.as_matrix());
    out.view_mut((n, n), (m, m)).copy_from(b.as_matrix());
    SymMatrix(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> SymMatrix {
        SymMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn assert_close(a: &SymMatrix, b: &SymMatrix, tol: f64) {
        let diff = a.add_scaled(b, -1.0).max_abs();
        assert!(diff < tol, "max |a - b| = {diff:e}\n{a:?}\n{b:?}");
    }

    #[test]
    fn construction_symmetrizes() {
        let a = m(&[&[1.0, 2.0], &[4.0, 1.0]]);
        assert_eq!(a.get(0, 1), 3.0);
        assert_eq!(a.get(1, 0), 3.0);
    }

    #[test]
    fn rejects_ragged_and_non_finite() {
        assert!(matches!(
            SymMatrix::from_rows(&[vec![1.0, 2.0], vec![1.0]]),
            Err(Error::NotSquare { .. })
        ));
        assert!(matches!(
            SymMatrix::from_rows(&[vec![1.0, f64::NAN], vec![0.0, 1.0]]),
            Err(Error::NonFinite { row: 0, col: 1 })
        ));
    }

    #[test]
    fn eig_identity_and_diagonal() {
        let e = eig_sym(&SymMatrix::identity(3)).unwrap();
        assert_eq!(e.values.len(), 3);
        for w in &e.values {
            assert!((w - 1.0).abs() < 1e-14);
        }
        let e = eig_sym(&SymMatrix::from_diagonal(&[1.0, 4.0])).unwrap();
        assert!((e.values[0] - 4.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
        assert!((e.vectors[(1, 0)].abs() - 1.0).abs() < 1e-14);
        assert!((e.vectors[(0, 1)].abs() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_two_by_two() {
        // char. polynomial (2 - λ)² - 1 = 0 → λ = 3, 1
        let a = m(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let e = eig_sym(&a).unwrap();
        assert!((e.values[0] - 3.0).abs() < 1e-13);
        assert!((e.values[1] - 1.0).abs() < 1e-13);
        let vtv = e.vectors.transpose() * &e.vectors;
        let err = (vtv - DMatrix::identity(2, 2)).abs().max();
        assert!(err < 1e-10);
        assert_close(&e.map(|w| w), &a, 1e-12);
    }

    #[test]
    fn sqrt_examples() {
        let r = sqrt_psd(&SymMatrix::from_diagonal(&[4.0, 9.0])).unwrap();
        assert_close(&r, &SymMatrix::from_diagonal(&[2.0, 3.0]), 1e-14);

        // √(aaᵀ) = aaᵀ/‖a‖
        let r = sqrt_psd(&SymMatrix::outer(&[1.0, 1.0])).unwrap();
        assert_close(&r, &SymMatrix::outer(&[1.0, 1.0]).scaled(1.0 / 2f64.sqrt()), 1e-8);

        // eigenvectors (1,1)/√2 and (1,-1)/√2 with roots √3 and 1
        let a = m(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let s3 = 3f64.sqrt();
        let expected = m(&[&[(s3 + 1.0) / 2.0, (s3 - 1.0) / 2.0], &[(s3 - 1.0) / 2.0, (s3 + 1.0) / 2.0]]);
        let r = sqrt_psd(&a).unwrap();
        assert_close(&r, &expected, 1e-12);
        let square = SymMatrix::symmetrized(r.as_matrix() * r.as_matrix());
        assert_close(&square, &a, 1e-8 * (1.0 + a.max_abs()));
    }

    #[test]
    fn sqrt_clips_rounding_noise_and_rejects_negative() {
        let r = sqrt_psd(&SymMatrix::from_diagonal(&[1.0, -5e-11])).unwrap();
        assert_eq!(r.get(1, 1), 0.0);
        match sqrt_psd(&SymMatrix::from_diagonal(&[1.0, -1e-6])) {
            Err(Error::NotPsd { min_eigenvalue }) => assert_eq!(min_eigenvalue, -1e-6),
            other => panic!("expected NotPsd, got {other:?}"),
        }
    }

    #[test]
    fn quantum_bound_examples() {
        for n in 1..6 {
            let b = quantum_bound(&SymMatrix::identity(n), &SymMatrix::identity(n)).unwrap();
            assert!((b - n as f64).abs() < 1e-12);
        }
        let h = [1.0, -2.0, 0.5];
        let g = [0.3, 0.7, 2.0];
        let inner: f64 = h.iter().zip(&g).map(|(a, b)| a * b).sum();
        let b = quantum_bound(&SymMatrix::outer(&h), &SymMatrix::outer(&g)).unwrap();
        assert!((b - inner.abs()).abs() < 1e-7, "{b} vs {inner}");
    }

    #[test]
    fn quantum_bound_rejects_indefinite() {
        let bad = SymMatrix::from_diagonal(&[1.0, -0.1]);
        assert!(matches!(
            quantum_bound(&SymMatrix::identity(2), &bad),
            Err(Error::NotPsd { .. })
        ));
        assert!(matches!(
            quantum_bound(&bad, &SymMatrix::identity(2)),
            Err(Error::NotPsd { .. })
        ));
        assert!(matches!(
            quantum_bound(&SymMatrix::identity(2), &SymMatrix::identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn gradient_examples() {
        let (dx, dp) = quantum_bound_gradient(&SymMatrix::identity(2), &SymMatrix::identity(2)).unwrap();
        assert_close(&dx, &SymMatrix::identity(2).scaled(0.5), 1e-14);
        assert_close(&dp, &SymMatrix::identity(2).scaled(0.5), 1e-14);

        // B = Σ √(xᵢ pᵢ) → ∂B/∂pᵢ = ½ √(xᵢ/pᵢ)
        let x = SymMatrix::from_diagonal(&[4.0, 1.0]);
        let p = SymMatrix::from_diagonal(&[1.0, 4.0]);
        let (dx, dp) = quantum_bound_gradient(&x, &p).unwrap();
        assert_close(&dp, &SymMatrix::from_diagonal(&[1.0, 0.25]), 1e-13);
        assert_close(&dx, &SymMatrix::from_diagonal(&[0.25, 1.0]), 1e-13);
    }

    #[test]
    fn gradient_requires_definite_arguments() {
        let singular = SymMatrix::outer(&[1.0, 1.0]);
        assert!(matches!(
            quantum_bound_gradient(&singular, &SymMatrix::identity(2)),
            Err(Error::SingularGradient { .. })
        ));
    }

    #[test]
    fn symplectic_spectrum_examples() {
        let vac = symplectic_spectrum(&SymMatrix::identity(6).scaled(0.5)).unwrap();
        assert_eq!(vac.values.len(), 3);
        for v in &vac.values {
            assert!((v - 0.5).abs() < 1e-12);
        }
        let (a, b) = (0.7, 2.3);
        let gamma = block_diag(&SymMatrix::identity(3).scaled(a), &SymMatrix::identity(3).scaled(b));
        for v in symplectic_spectrum(&gamma).unwrap().values {
            assert!((v - (a * b).sqrt()).abs() < 1e-12);
        }
        assert!(symplectic_spectrum(&SymMatrix::identity(3)).is_err());
    }

    #[test]
    fn symplectic_spectrum_matches_complex_eigenvalues() {
        // independent route: eigenvalues of the non-symmetric J·γ
        let gamma = m(&[
            &[1.2, 0.3, 0.1, 0.05],
            &[0.3, 0.9, -0.2, 0.0],
            &[0.1, -0.2, 1.5, 0.4],
            &[0.05, 0.0, 0.4, 0.8],
        ]);
        let j = symplectic_form(2);
        let mut moduli: Vec<f64> = (j * gamma.as_matrix())
            .complex_eigenvalues()
            .iter()
            .map(|z| z.norm())
            .collect();
        moduli.sort_by(|a, b| b.total_cmp(a));
        let spec = symplectic_spectrum(&gamma).unwrap();
        assert!((spec.values[0] - moduli[0]).abs() < 1e-10);
        assert!((spec.values[1] - moduli[2]).abs() < 1e-10);
    }

    #[test]
    fn alt_gap_vanishes_for_commuting_pairs() {
        let x = SymMatrix::from_diagonal(&[1.0, 2.0, 0.5]);
        let p = SymMatrix::from_diagonal(&[3.0, 0.1, 1.0]);
        assert!(alt_inequality_gap(&x, &p).unwrap().abs() < 1e-12);
        let a = m(&[&[2.0, 1.0], &[1.0, 2.0]]);
        assert!(alt_inequality_gap(&a, &a).unwrap().abs() < 1e-12);
    }

    #[test]
    fn serde_uses_nested_rows() {
        let a = m(&[&[1.0, 0.5], &[0.5, 2.0]]);
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, "[[1.0,0.5],[0.5,2.0]]");
        let back: SymMatrix = serde_json::from_str(&json).unwrap();
        assert_eq!(back, a);
    }
}
