//! Dense complex helpers shared by every module.

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `⟨x, y⟩ = Σ xᵢ ȳᵢ`.
pub fn inner(x: &CVector, y: &CVector) -> Complex64 {
    y.dotc(x)
}

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn basis_vector(n: usize, k: usize) -> CVector {
    let mut v = CVector::zeros(n);
    v[k] = ONE;
    v
}

pub fn diag_real(values: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(values.len(), values.iter().map(|&v| c(v))))
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    m.clone().svd(false, false).singular_values.iter().copied().collect()
}

/// Operator 2-norm.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    singular_values(m).into_iter().fold(0.0, f64::max)
}

/// Ratio of extreme singular values; `inf` for singular input.
pub fn condition_number(m: &CMatrix) -> f64 {
    let sv = singular_values(m);
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// `(A + A*) / 2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * c(0.5)
}

pub fn invert(m: &CMatrix) -> Result<CMatrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "cannot invert {}x{} matrix",
            m.nrows(),
            m.ncols()
        )));
    }
    m.clone()
        .lu()
        .try_inverse()
        .ok_or_else(|| Error::Numeric("matrix is singular".into()))
}

/// Eigenvalues of a general complex matrix via the complex Schur form.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<Complex64>> {
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let triangular = (0..n).all(|j| (j + 1..n).all(|i| m[(i, j)] == ZERO));
    if triangular {
        return Ok((0..n).map(|i| m[(i, i)]).collect());
    }
    let max_iter = 100 * n.max(10);
    if let Some(schur) = Schur::try_new(m.clone(), f64::EPSILON, max_iter) {
        let (_, t) = schur.unpack();
        return Ok((0..n).map(|i| t[(i, i)]).collect());
    }
    // A cluster such as X ≈ c·I stalls deflation; removing the mean leaves
    // well-separated noise.
    let shift = m.trace() / n as f64;
    let shifted = m - CMatrix::identity(n, n) * shift;
    let schur = Schur::try_new(shifted, f64::EPSILON, max_iter).ok_or_else(|| {
        Error::Numeric(format!(
            "Schur iteration did not converge (dim {n}, cond {:.3e})",
            condition_number(m)
        ))
    })?;
    let (_, t) = schur.unpack();
    Ok((0..n).map(|i| t[(i, i)] + shift).collect())
}

/// Dense complex N×N operator with a short label.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    pub matrix: CMatrix,
    pub label: String,
}

impl Operator {
    pub fn new(label: impl Into<String>, matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "operator must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Numeric("operator has non-finite entries".into()));
        }
        Ok(Self {
            matrix,
            label: label.into(),
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: identity(n),
            label: "I".into(),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        &self.matrix * v
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
            label: format!("{}*", self.label),
        }
    }

    pub fn compose(&self, rhs: &Operator) -> Self {
        Self {
            matrix: &self.matrix * &rhs.matrix,
            label: format!("{}{}", self.label, rhs.label),
        }
    }

    pub fn norm(&self) -> f64 {
        spectral_norm(&self.matrix)
    }

    /// `‖A − A*‖ / max(1, ‖A‖)` in Frobenius norm.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = (&self.matrix - self.matrix.adjoint()).norm();
        d / self.matrix.norm().max(1.0)
    }

    pub fn check_dim(&self, v: &CVector) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against operator {} of dim {}",
                v.len(),
                self.label,
                self.dim()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inner_is_linear_in_first_slot() {
        let x = CVector::from_vec(vec![Complex64::new(1.0, 2.0), Complex64::new(0.0, -1.0)]);
        let y = CVector::from_vec(vec![Complex64::new(3.0, 0.5), Complex64::new(2.0, 1.0)]);
        let z = Complex64::new(0.3, -0.7);
        let lhs = inner(&(&x * z), &y);
        assert!((lhs - z * inner(&x, &y)).norm() < 1e-14);
        let rhs = inner(&x, &(&y * z));
        assert!((rhs - z.conj() * inner(&x, &y)).norm() < 1e-14);
        let manual = x[0] * y[0].conj() + x[1] * y[1].conj();
        assert!((inner(&x, &y) - manual).norm() < 1e-14);
    }

    #[test]
    fn eigenvalues_of_triangular_matrix_are_its_diagonal() {
        let mut m = CMatrix::zeros(3, 3);
        m[(0, 0)] = c(1.0);
        m[(1, 1)] = c(4.0);
        m[(2, 2)] = Complex64::new(-2.0, 1.0);
        m[(0, 2)] = c(5.0);
        let mut ev = eigenvalues(&m).unwrap();
        ev.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((ev[0] - Complex64::new(-2.0, 1.0)).norm() < 1e-12);
        assert!((ev[1] - c(1.0)).norm() < 1e-12);
        assert!((ev[2] - c(4.0)).norm() < 1e-12);
    }

    #[test]
    fn eigenvalues_of_dense_near_identity() {
        let n = 64;
        let a = CMatrix::from_fn(n, n, |i, j| {
            let x = ((i * 31 + j * 17) % 23) as f64 / 23.0;
            Complex64::new(if i == j { 4.0 } else { 0.0 } + x, 0.5 - x)
        });
        let m = &a * a.clone().try_inverse().unwrap();
        assert!(!(0..n).all(|j| (j + 1..n).all(|i| m[(i, j)] == ZERO)));
        for l in eigenvalues(&m).unwrap() {
            assert!((l - c(1.0)).norm() < 1e-10, "{l}");
        }
    }

    #[test]
    fn condition_number_of_diagonal() {
        assert!((condition_number(&diag_real(&[2.0, 0.5, 1.0])) - 4.0).abs() < 1e-12);
        assert!(condition_number(&diag_real(&[1.0, 0.0])).is_infinite());
    }
}
