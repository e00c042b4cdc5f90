//! Dense complex linear algebra kernel.
//!
//! Every operator in the crate (Dirac operators, gradings, projectors, the
//! unitary part of a real structure) is carried by [`ComplexMatrix`], a
//! square `nalgebra` matrix with finite entries. Hermitian spectra come from
//! [`eigh`]; functions of Hermitian matrices go through the spectrum in
//! [`matrix_function`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default absolute tolerance (max-norm) for Hermiticity and unitarity checks.
pub const DEFAULT_TOL: f64 = 1e-10;

const EIGH_MAX_SWEEPS: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not square: {entries} entries for dim {dim}")]
    NotSquare { dim: usize, entries: usize },
    #[error("matrix dimension must be positive")]
    EmptyMatrix,
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not Hermitian: residual {residual:.3e} exceeds {tol:.3e}")]
    NotHermitian { residual: f64, tol: f64 },
    #[error("matrix is not unitary: residual {residual:.3e} exceeds {tol:.3e}")]
    NotUnitary { residual: f64, tol: f64 },
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("eigenvalue iteration did not converge")]
    NoConvergence,
}

/// Dense square complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix{}", self.0)
    }
}

impl ComplexMatrix {
    /// Builds a matrix from `dim²` entries in row-major order.
    pub fn from_row_major(dim: usize, entries: Vec<Complex64>) -> Result<Self, LinalgError> {
        if dim == 0 {
            return Err(LinalgError::EmptyMatrix);
        }
        if entries.len() != dim * dim {
            return Err(LinalgError::NotSquare { dim, entries: entries.len() });
        }
        Self::from_dmatrix(DMatrix::from_row_slice(dim, dim, &entries))
    }

    /// Wraps an `nalgebra` matrix after checking shape and finiteness.
    pub fn from_dmatrix(m: DMatrix<Complex64>) -> Result<Self, LinalgError> {
        if m.nrows() == 0 {
            return Err(LinalgError::EmptyMatrix);
        }
        if m.nrows() != m.ncols() {
            return Err(LinalgError::NotSquare { dim: m.nrows(), entries: m.len() });
        }
        for col in 0..m.ncols() {
            for row in 0..m.nrows() {
                let z = m[(row, col)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(LinalgError::NonFinite { row, col });
                }
            }
        }
        Ok(Self(m))
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        Self(DMatrix::from_fn(dim, dim, f))
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_fn(dim, |_, _| Complex64::new(0.0, 0.0))
    }

    pub fn identity(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        Self(DMatrix::identity(dim, dim))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self::from_fn(diag.len(), |i, j| if i == j { Complex64::new(diag[i], 0.0) } else { Complex64::new(0.0, 0.0) })
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    /// Sets one entry. Panics on a non-finite value.
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        assert!(value.re.is_finite() && value.im.is_finite(), "non-finite matrix entry");
        self.0[(row, col)] = value;
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<Complex64> {
        self.0
    }

    /// Row-major copy of the entries.
    pub fn to_row_major(&self) -> Vec<Complex64> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.map(|z| z * s))
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        Self(self.0.map(|z| z * s))
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
    }

    /// Position and modulus of the largest entry.
    pub fn argmax_abs(&self) -> (usize, usize, f64) {
        let mut best = (0, 0, 0.0);
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let a = self.0[(i, j)].norm();
                if a > best.2 {
                    best = (i, j, a);
                }
            }
        }
        best
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `‖m − m†‖_max`.
    pub fn hermiticity_residual(&self) -> f64 {
        (self - &self.adjoint()).max_abs()
    }

    /// `‖m†m − 1‖_max`.
    pub fn unitarity_residual(&self) -> f64 {
        (&(&self.adjoint() * self) - &Self::identity(self.dim())).max_abs()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_residual() <= tol
    }

    /// `(m + m†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale(0.5)
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// `{self, other} = self·other + other·self`.
    pub fn anticommutator(&self, other: &Self) -> Self {
        &(self * other) + &(other * self)
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>, LinalgError> {
        if v.len() != self.dim() {
            return Err(LinalgError::DimensionMismatch { expected: self.dim(), found: v.len() });
        }
        let out = &self.0 * DVector::from_column_slice(v);
        Ok(out.as_slice().to_vec())
    }

    /// Rank-one matrix `|a⟩⟨b|`.
    pub fn outer(a: &[Complex64], b: &[Complex64]) -> Self {
        assert_eq!(a.len(), b.len(), "outer product of vectors of unequal length");
        Self::from_fn(a.len(), |i, j| a[i] * b[j].conj())
    }

    /// Principal submatrix on the given indices, in the given order.
    pub fn submatrix(&self, indices: &[usize]) -> Self {
        Self::from_fn(indices.len(), |i, j| self.0[(indices[i], indices[j])])
    }

    /// Direct sum `diag(self, other)`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let n = self.dim();
        let m = other.dim();
        Self::from_fn(n + m, |i, j| {
            if i < n && j < n {
                self.0[(i, j)]
            } else if i >= n && j >= n {
                other.0[(i - n, j - n)]
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}

/// Serialized matrix: explicit `dim` plus row-major `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixLiteral {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

impl TryFrom<MatrixLiteral> for ComplexMatrix {
    type Error = LinalgError;

    fn try_from(lit: MatrixLiteral) -> Result<Self, Self::Error> {
        let entries = lit.entries.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
        ComplexMatrix::from_row_major(lit.dim, entries)
    }
}

impl From<&ComplexMatrix> for MatrixLiteral {
    fn from(m: &ComplexMatrix) -> Self {
        MatrixLiteral { dim: m.dim(), entries: m.to_row_major().into_iter().map(|z| [z.re, z.im]).collect() }
    }
}

/// Spectral resolution of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in eigenvalue order.
    pub vectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// `V·diag(g(λ))·V†`.
    pub fn map(&self, mut g: impl FnMut(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let v = self.vectors.as_dmatrix();
        let scaled = DMatrix::from_fn(n, n, |i, k| v[(i, k)] * g(self.eigenvalues[k]));
        ComplexMatrix(scaled * v.adjoint())
    }

    /// `‖m − VΛV†‖_max`.
    pub fn reconstruction_residual(&self, m: &ComplexMatrix) -> f64 {
        (m - &self.map(|x| x)).max_abs()
    }

    /// Column `k` of the eigenvector matrix.
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.vectors.as_dmatrix().column(k).iter().copied().collect()
    }
}

/// Hermitian eigendecomposition with eigenvalues in ascending order.
///
/// The input must satisfy `‖m − m†‖_max ≤ tol`; the Hermitian part is
/// decomposed. Within a degenerate eigenspace the returned basis is only
/// fixed up to a unitary rotation.
pub fn eigh(m: &ComplexMatrix, tol: f64) -> Result<EigenDecomposition, LinalgError> {
    let residual = m.hermiticity_residual();
    if residual > tol {
        return Err(LinalgError::NotHermitian { residual, tol });
    }
    let sym = m.hermitian_part().into_dmatrix();
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, EIGH_MAX_SWEEPS).ok_or(LinalgError::NoConvergence)?;

    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, k| eig.eigenvectors[(i, order[k])]);
    Ok(EigenDecomposition { eigenvalues, vectors: ComplexMatrix(vectors) })
}

/// Eigenvalues only, ascending.
pub fn eigvalsh(m: &ComplexMatrix, tol: f64) -> Result<Vec<f64>, LinalgError> {
    Ok(eigh(m, tol)?.eigenvalues)
}

/// `f(m) = V·diag(f(λᵢ))·V†` for Hermitian `m`.
pub fn matrix_function(m: &ComplexMatrix, f: impl FnMut(f64) -> f64) -> Result<ComplexMatrix, LinalgError> {
    matrix_function_tol(m, f, DEFAULT_TOL)
}

pub fn matrix_function_tol(
    m: &ComplexMatrix,
    f: impl FnMut(f64) -> f64,
    tol: f64,
) -> Result<ComplexMatrix, LinalgError> {
    Ok(eigh(m, tol)?.map(f))
}

/// Antiunitary operator `v ↦ u·conj(v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AntiUnitaryOp {
    u: ComplexMatrix,
}

impl AntiUnitaryOp {
    pub fn new(u: ComplexMatrix) -> Result<Self, LinalgError> {
        Self::with_tol(u, DEFAULT_TOL)
    }

    pub fn with_tol(u: ComplexMatrix, tol: f64) -> Result<Self, LinalgError> {
        let residual = u.unitarity_residual();
        if residual > tol {
            return Err(LinalgError::NotUnitary { residual, tol });
        }
        Ok(Self { u })
    }

    /// Complex conjugation in the standard basis.
    pub fn conjugation(dim: usize) -> Self {
        Self { u: ComplexMatrix::identity(dim) }
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.u
    }

    pub fn dim(&self) -> usize {
        self.u.dim()
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>, LinalgError> {
        let conj: Vec<Complex64> = v.iter().map(|z| z.conj()).collect();
        self.u.apply(&conj)
    }

    /// Linear operator `J²`, equal to `u·conj(u)`.
    pub fn square(&self) -> ComplexMatrix {
        &self.u * &self.u.conj()
    }

    /// `J·a·J⁻¹ = u·conj(a)·u†`.
    pub fn conjugate_operator(&self, a: &ComplexMatrix) -> ComplexMatrix {
        &(&self.u * &a.conj()) * &self.u.adjoint()
    }
}

/// `v ↦ u·conj(v)`; free-function form of [`AntiUnitaryOp::apply`].
pub fn apply_antiunitary(j: &AntiUnitaryOp, v: &[Complex64]) -> Result<Vec<Complex64>, LinalgError> {
    j.apply(v)
}

/// Haar-distributed unitary via Gram–Schmidt on a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<Complex64> =
            (0..dim).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for q in &cols {
                let overlap: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= overlap * qi;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    ComplexMatrix::from_fn(dim, |i, j| cols[j][i])
}

/// Random Hermitian matrix `(G + G†)/2` with standard complex Gaussian `G`.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dim, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    g.hermitian_part()
}

/// Standard complex Gaussian vector.
pub fn random_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Complex64> {
    (0..dim).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect()
}

/// `⟨a|b⟩ = Σ conj(aᵢ)·bᵢ`.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}
