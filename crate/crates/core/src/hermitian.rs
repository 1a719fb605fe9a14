//! Dense complex-Hermitian linear algebra for small dimensions.
//!
//! Everything in the crate that touches a quantum state goes through
//! [`HermitianMatrix`]. Dimensions are capped at [`MAX_DIM`]; the spectral
//! routines are backed by `nalgebra`'s Hermitian eigensolver.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

/// Largest supported matrix dimension.
pub const MAX_DIM: usize = 8;

/// A square complex matrix equal to its own conjugate transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    m: DMatrix<Complex64>,
}

impl HermitianMatrix {
    /// Validates `m` against the Hermitian invariant and stores its exactly
    /// symmetrised part `(m + m†)/2`.
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        let d = m.nrows();
        if d == 0 || d != m.ncols() {
            return Err(Error::Validation(format!(
                "expected a non-empty square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if d > MAX_DIM {
            return Err(Error::Capability(format!("dimension {d} exceeds maximum {MAX_DIM}")));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Validation("matrix has non-finite entries".into()));
        }
        let tol = Tolerances::current().hermitian;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        if worst > tol {
            return Err(Error::Validation(format!(
                "matrix is not Hermitian (max asymmetry {worst:e} > {tol:e})"
            )));
        }
        Ok(Self::symmetrised(m))
    }

    /// `(m + m†)/2` without validation; used for results of closed operations.
    fn symmetrised(m: DMatrix<Complex64>) -> Self {
        let adj = m.adjoint();
        HermitianMatrix { m: (m + adj).scale(0.5) }
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::Validation("rows must form a square matrix".into()));
        }
        Self::new(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> =
            rows.iter().map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect()).collect();
        Self::from_rows(&rows)
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let d = values.len();
        Self::new(DMatrix::from_fn(d, d, |i, j| {
            if i == j {
                Complex64::new(values[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    pub fn identity(d: usize) -> Result<Self> {
        Self::diagonal(&vec![1.0; d])
    }

    /// Rank-one projector `|ψ⟩⟨ψ|` (unnormalised if `psi` is).
    pub fn outer(psi: &[Complex64]) -> Result<Self> {
        let d = psi.len();
        Self::new(DMatrix::from_fn(d, d, |i, j| psi[i] * psi[j].conj()))
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.m[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        self.m.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn scale(&self, a: f64) -> Self {
        HermitianMatrix { m: self.m.scale(a) }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(HermitianMatrix { m: &self.m + &other.m })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(HermitianMatrix { m: &self.m - &other.m })
    }

    /// `Tr(self · other)`, real for Hermitian arguments.
    pub fn trace_product(&self, other: &Self) -> Result<f64> {
        self.check_dim(other)?;
        let d = self.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                acc += self.m[(i, j)] * other.m[(j, i)];
            }
        }
        Ok(acc.re)
    }

    /// Frobenius norm of `self - other`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        self.check_dim(other)?;
        Ok((&self.m - &other.m).norm())
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::Validation(format!(
                "dimension mismatch: {} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(())
    }

    pub fn eig(&self) -> EigenSystem {
        eig(self)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(self)
    }

    pub fn power(&self, s: f64) -> Result<Self> {
        matrix_power(self, s)
    }
}

/// Spectral decomposition `V diag(λ) V†` with eigenvalues in nonincreasing order.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    values: Vec<f64>,
    vectors: DMatrix<Complex64>,
}

impl EigenSystem {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.values
    }

    /// Column `i` is the eigenvector for `eigenvalues()[i]`.
    pub fn eigenvectors(&self) -> &DMatrix<Complex64> {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Rebuilds `V diag(f(λ)) V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let d = self.dim();
        let mut scaled = self.vectors.clone();
        for (j, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            for i in 0..d {
                scaled[(i, j)] *= w;
            }
        }
        HermitianMatrix::symmetrised(scaled * self.vectors.adjoint())
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        self.map(|x| x)
    }

    /// Eigenvalue below which the spectrum is treated as exactly zero.
    pub fn support_threshold(&self) -> f64 {
        let top = self.values.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        Tolerances::current().eig_clamp * top
    }

    /// Fails if an eigenvalue is more negative than the PSD tolerance.
    pub fn check_psd(&self) -> Result<()> {
        let min = self.values.last().copied().unwrap_or(0.0);
        if min < -Tolerances::current().psd {
            return Err(Error::NotPsd(min));
        }
        Ok(())
    }

    /// Eigenvalues with the support clamp applied (tiny or slightly negative
    /// values become exactly zero).
    pub fn clamped_eigenvalues(&self) -> Vec<f64> {
        let cut = self.support_threshold();
        self.values.iter().map(|&l| if l <= cut { 0.0 } else { l }).collect()
    }

    /// `V diag(λ^s) V†` with the support convention `0^s = 0` for all `s`,
    /// including `s = 0`.
    pub fn power(&self, s: f64) -> Result<HermitianMatrix> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::Domain(format!("matrix power exponent {s} outside [0, 1]")));
        }
        self.check_psd()?;
        let cut = self.support_threshold();
        Ok(self.map(|l| if l <= cut { 0.0 } else { l.powf(s) }))
    }
}

/// Full spectral decomposition of a Hermitian matrix.
pub fn eig(m: &HermitianMatrix) -> EigenSystem {
    let se = m.m.clone().symmetric_eigen();
    let d = m.dim();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| se.eigenvalues[b].total_cmp(&se.eigenvalues[a]));
    let values = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(d, d, |i, j| se.eigenvectors[(i, order[j])]);
    EigenSystem { values, vectors }
}

/// `m^s` for positive semidefinite `m` and `s ∈ [0, 1]`.
pub fn matrix_power(m: &HermitianMatrix, s: f64) -> Result<HermitianMatrix> {
    eig(m).power(s)
}

pub fn min_eigenvalue(m: &HermitianMatrix) -> f64 {
    *eig(m).eigenvalues().last().expect("non-empty matrix")
}
