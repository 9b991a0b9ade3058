//! Dense Hermitian and unitary operators, eigendecomposition and exact
//! propagation `exp(-i H t)` (hbar = 1, entries are angular frequencies).

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::space::HilbertSpace;
use crate::state::StateVector;

/// Entrywise hermiticity tolerance, relative to `max(1, max|H_ij|)`.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Max-abs tolerance on `U^dagger U - I`.
pub const UNITARY_TOL: f64 = 1e-10;

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    space: HilbertSpace,
    matrix: DMatrix<C64>,
}

impl HermitianOperator {
    pub fn new(space: HilbertSpace, matrix: DMatrix<C64>) -> Result<Self> {
        let d = space.dimension();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::InvalidParameter(format!(
                "{}x{} matrix does not act on {space}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let deviation = max_abs(&(&matrix - matrix.adjoint()));
        if deviation > HERMITIAN_TOL * max_abs(&matrix).max(1.0) {
            return Err(Error::NotHermitian { max_deviation: deviation });
        }
        Ok(Self { space, matrix })
    }

    pub fn zeros(space: HilbertSpace) -> Self {
        let d = space.dimension();
        Self { space, matrix: DMatrix::zeros(d, d) }
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.matrix[(row, col)]
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.norm()
    }

    pub fn apply(&self, psi: &StateVector) -> Result<DVector<C64>> {
        self.space.ensure_same(psi.space())?;
        Ok(&self.matrix * psi.amplitudes())
    }

    /// Principal submatrix on the given basis indices.
    pub fn block(&self, indices: &[usize]) -> DMatrix<C64> {
        DMatrix::from_fn(indices.len(), indices.len(), |r, c| self.matrix[(indices[r], indices[c])])
    }

    pub fn spectrum(&self) -> Spectrum {
        let (eigenvalues, eigenvectors) = eig_matrix(&self.matrix);
        Spectrum { space: self.space, eigenvalues, eigenvectors }
    }
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
///
/// Eigenvectors inside a degenerate cluster are whatever the solver returns;
/// compare subspaces, not entries.
pub fn eig_hermitian_matrix(m: &DMatrix<C64>) -> Result<(Vec<f64>, DMatrix<C64>)> {
    if !m.is_square() {
        return Err(Error::InvalidParameter("eigendecomposition needs a square matrix".into()));
    }
    let deviation = max_abs(&(m - m.adjoint()));
    if deviation > HERMITIAN_TOL * max_abs(m).max(1.0) {
        return Err(Error::NotHermitian { max_deviation: deviation });
    }
    Ok(eig_matrix(m))
}

fn eig_matrix(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    // symmetrize away rounding-level antihermitian parts before solving
    let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// `(eigenvalues ascending, orthonormal eigenvectors as columns)`.
pub fn eig_hermitian(h: &HermitianOperator) -> (Vec<f64>, DMatrix<C64>) {
    let s = h.spectrum();
    (s.eigenvalues, s.eigenvectors)
}

/// Cached eigendecomposition used to propagate one Hamiltonian to many times.
#[derive(Debug, Clone)]
pub struct Spectrum {
    space: HilbertSpace,
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<C64>,
}

impl Spectrum {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<C64> {
        &self.eigenvectors
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    /// `exp(-i H t) psi`. Negative `t` evolves backwards.
    pub fn evolve(&self, psi: &StateVector, t: f64) -> Result<StateVector> {
        self.space.ensure_same(psi.space())?;
        let mut coeffs = self.eigenvectors.ad_mul(psi.amplitudes());
        for (c, e) in coeffs.iter_mut().zip(&self.eigenvalues) {
            *c *= C64::from_polar(1.0, -e * t);
        }
        StateVector::from_amplitudes(self.space, &self.eigenvectors * coeffs)
    }

    pub fn unitary(&self, t: f64) -> UnitaryOperator {
        let phases = DVector::from_iterator(
            self.eigenvalues.len(),
            self.eigenvalues.iter().map(|e| C64::from_polar(1.0, -e * t)),
        );
        let mut scaled = self.eigenvectors.clone();
        for (mut col, p) in scaled.column_iter_mut().zip(phases.iter()) {
            col *= *p;
        }
        UnitaryOperator { space: self.space, matrix: scaled * self.eigenvectors.adjoint() }
    }
}

/// `exp(-i H t) psi` via full eigendecomposition.
pub fn propagate(h: &HermitianOperator, psi: &StateVector, t: f64) -> Result<StateVector> {
    h.space.ensure_same(psi.space())?;
    h.spectrum().evolve(psi, t)
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator {
    space: HilbertSpace,
    matrix: DMatrix<C64>,
}

impl UnitaryOperator {
    pub fn new(space: HilbertSpace, matrix: DMatrix<C64>) -> Result<Self> {
        let d = space.dimension();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::InvalidParameter(format!(
                "{}x{} matrix does not act on {space}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let deviation = unitarity_deviation(&matrix);
        if deviation > UNITARY_TOL {
            return Err(Error::NotUnitary { max_deviation: deviation });
        }
        Ok(Self { space, matrix })
    }

    pub fn identity(space: HilbertSpace) -> Self {
        let d = space.dimension();
        Self { space, matrix: DMatrix::identity(d, d) }
    }

    pub fn diagonal(space: HilbertSpace, phases: &[f64]) -> Result<Self> {
        if phases.len() != space.dimension() {
            return Err(Error::InvalidParameter("one phase per basis state required".into()));
        }
        let diag = DVector::from_iterator(phases.len(), phases.iter().map(|p| C64::from_polar(1.0, *p)));
        Ok(Self { space, matrix: DMatrix::from_diagonal(&diag) })
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        self.space.ensure_same(psi.space())?;
        StateVector::from_amplitudes(self.space, &self.matrix * psi.amplitudes())
    }

    /// `other` applied after `self`.
    pub fn then(&self, other: &UnitaryOperator) -> Result<UnitaryOperator> {
        self.space.ensure_same(&other.space)?;
        Ok(UnitaryOperator { space: self.space, matrix: &other.matrix * &self.matrix })
    }

    pub fn unitarity_deviation(&self) -> f64 {
        unitarity_deviation(&self.matrix)
    }
}

pub fn unitarity_deviation(m: &DMatrix<C64>) -> f64 {
    let d = m.ncols();
    max_abs(&(m.ad_mul(m) - DMatrix::<C64>::identity(d, d)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn diagonal_eigenvalues_sorted() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![c(1.0), c(3.0), c(2.0)]));
        let (vals, _) = eig_hermitian_matrix(&m).unwrap();
        assert_eq!(vals.len(), 3);
        for (v, e) in vals.iter().zip([1.0, 2.0, 3.0]) {
            assert!((v - e).abs() < 1e-14);
        }
    }

    #[test]
    fn pauli_x_eigenvalues() {
        let m = DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]);
        let (vals, vecs) = eig_hermitian_matrix(&m).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14);
        for (k, &e) in vals.iter().enumerate() {
            let v = vecs.column(k);
            let r = &m * v - v * c(e);
            assert!(r.norm() < 1e-12);
        }
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(2.0), c(0.0)]);
        assert!(matches!(eig_hermitian_matrix(&m), Err(Error::NotHermitian { .. })));
        let space = HilbertSpace::new(1, 0);
        assert!(matches!(HermitianOperator::new(space, m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn complex_hermitian_residual() {
        let m = DMatrix::from_row_slice(
            3,
            3,
            &[
                c(1.0),
                C64::new(0.5, 0.25),
                C64::new(0.0, -1.0),
                C64::new(0.5, -0.25),
                c(-2.0),
                C64::new(0.3, 0.1),
                C64::new(0.0, 1.0),
                C64::new(0.3, -0.1),
                c(0.7),
            ],
        );
        let (vals, vecs) = eig_hermitian_matrix(&m).unwrap();
        for (k, &e) in vals.iter().enumerate() {
            let v = vecs.column(k);
            assert!((&m * v - v * c(e)).norm() < 1e-12);
        }
        let gram = vecs.ad_mul(&vecs) - DMatrix::<C64>::identity(3, 3);
        assert!(gram.norm() < 1e-12);
    }

    #[test]
    fn propagate_zero_hamiltonian_is_identity() {
        let space = HilbertSpace::new(1, 2);
        let h = HermitianOperator::zeros(space);
        let psi = StateVector::from_vec(space, (0..6).map(|i| C64::new(i as f64, 1.0)).collect())
            .unwrap()
            .normalized()
            .unwrap();
        let out = propagate(&h, &psi, 3.7).unwrap();
        assert!(out.max_abs_diff(&psi).unwrap() < 1e-15);
    }

    #[test]
    fn propagate_diagonal_phase() {
        let space = HilbertSpace::new(1, 1);
        let e = 2.5;
        let mut m = DMatrix::zeros(4, 4);
        m[(2, 2)] = c(e);
        let h = HermitianOperator::new(space, m).unwrap();
        let t = 0.9;
        let out = propagate(&h, &StateVector::basis(space, 2), t).unwrap();
        assert!((out.amplitude(2) - C64::from_polar(1.0, -e * t)).norm() < 1e-14);
        // reverse evolution undoes it
        let back = propagate(&h, &out, -t).unwrap();
        assert!(back.max_abs_diff(&StateVector::basis(space, 2)).unwrap() < 1e-14);
    }

    #[test]
    fn unitary_from_spectrum() {
        let space = HilbertSpace::new(1, 0);
        let m = DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]);
        let h = HermitianOperator::new(space, m).unwrap();
        let u = h.spectrum().unitary(PI / 2.0);
        // exp(-i pi/2 X) = -i X
        assert!((u.matrix()[(0, 1)] - C64::new(0.0, -1.0)).norm() < 1e-14);
        assert!(u.unitarity_deviation() < 1e-14);
        assert!(UnitaryOperator::new(space, u.matrix().clone()).is_ok());
        assert!(UnitaryOperator::new(space, u.matrix() * c(1.1)).is_err());
    }
}
