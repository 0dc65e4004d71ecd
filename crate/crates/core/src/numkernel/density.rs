use num_complex::Complex64;

use super::eigen::eig_hermitian_min;
use super::matrix::CMatrix;
use crate::error::{Error, Result};
use crate::tolerances;

/// Reduced density matrix of the electronic subsystem.
///
/// Hermiticity and unit trace are checked by [`DensityMatrix::new`].
/// Positivity is deliberately not part of the type: the CM generator can
/// destroy it, and it is measured as a diagnostic instead.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() == 0 {
            return Err(Error::InvalidDimension(format!(
                "density matrix must be square and non-empty, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if !matrix.is_finite() {
            return Err(Error::InvalidParameter("density matrix has non-finite entries".into()));
        }
        let defect = matrix.hermitian_defect();
        if defect > tolerances::HERMITIAN {
            return Err(Error::NotHermitian { defect });
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > tolerances::TRACE || tr.im.abs() > tolerances::TRACE {
            return Err(Error::InvariantViolation(format!(
                "density matrix trace is {tr}, expected 1"
            )));
        }
        Ok(Self { matrix })
    }

    /// Wraps a propagated state without re-checking the invariants. Trace
    /// and Hermiticity are then tracked by the trajectory diagnostics.
    pub fn from_propagated(matrix: CMatrix) -> Self {
        debug_assert!(matrix.is_square());
        Self { matrix }
    }

    pub fn pure(state: &[Complex64]) -> Result<Self> {
        let norm: f64 = state.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidParameter("zero state vector".into()));
        }
        let n = state.len();
        let m = CMatrix::from_fn(n, n, |r, c| state[r] * state[c].conj() / (norm * norm));
        Self::new(m)
    }

    /// |k><k| in an n-level basis.
    pub fn basis_state(n: usize, k: usize) -> Result<Self> {
        if k >= n {
            return Err(Error::InvalidDimension(format!("level {k} out of range for n={n}")));
        }
        let mut m = CMatrix::zeros(n, n);
        m[(k, k)] = Complex64::new(1.0, 0.0);
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.matrix[(r, c)]
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn hermitian_defect(&self) -> f64 {
        self.matrix.hermitian_defect()
    }

    /// Smallest eigenvalue of the Hermitian part (rho + rho^dagger)/2.
    pub fn min_eigenvalue(&self) -> f64 {
        let h = CMatrix::from_fn(self.dim(), self.dim(), |r, c| {
            (self.matrix[(r, c)] + self.matrix[(c, r)].conj()) * 0.5
        });
        eig_hermitian_min(&h).unwrap_or(f64::NAN)
    }
}

/// Row-major vectorization of an n x n matrix.
///
/// With 1-based level labels the component index is
/// `i = (a1 - 1) * n + a2`; storage is 0-based, so `rho[a1][a2]` lives at
/// offset `a1 * n + a2` for 0-based `a1, a2`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorizedState {
    n: usize,
    components: Vec<Complex64>,
}

impl VectorizedState {
    pub fn from_components(components: Vec<Complex64>) -> Result<Self> {
        let len = components.len();
        let n = (len as f64).sqrt().round() as usize;
        if n * n != len || n == 0 {
            return Err(Error::InvalidDimension(format!(
                "vector of length {len} is not a non-empty perfect square"
            )));
        }
        Ok(Self { n, components })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> &[Complex64] {
        &self.components
    }

    pub fn into_components(self) -> Vec<Complex64> {
        self.components
    }

    /// 0-based offset of the pair (a1, a2).
    pub fn offset(n: usize, a1: usize, a2: usize) -> usize {
        a1 * n + a2
    }

    /// Sum of the diagonal components, i.e. the trace of the matrix.
    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|a| self.components[a * self.n + a]).sum()
    }
}

pub fn vectorize(rho: &DensityMatrix) -> VectorizedState {
    vectorize_matrix(rho.matrix())
}

pub fn vectorize_matrix(m: &CMatrix) -> VectorizedState {
    debug_assert!(m.is_square());
    VectorizedState {
        n: m.rows(),
        components: m.as_slice().to_vec(),
    }
}

/// Inverse of [`vectorize`]. The result is not re-validated as a state;
/// use [`DensityMatrix::new`] on the matrix when the invariants matter.
pub fn devectorize(v: &VectorizedState) -> DensityMatrix {
    DensityMatrix::from_propagated(devectorize_matrix(v))
}

pub fn devectorize_matrix(v: &VectorizedState) -> CMatrix {
    CMatrix::from_row_major(v.n, v.n, v.components.clone()).expect("n*n components")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn vectorize_two_level() {
        let (a, b, c, d) = (r(0.25), Complex64::new(0.1, 0.2), Complex64::new(0.1, -0.2), r(0.75));
        let rho = DensityMatrix::new(CMatrix::from_rows(&[vec![a, b], vec![c, d]]).unwrap()).unwrap();
        assert_eq!(vectorize(&rho).components(), &[a, b, c, d]);

        let half = DensityMatrix::new(CMatrix::diag(&[r(0.5), r(0.5)])).unwrap();
        assert_eq!(vectorize(&half).components(), &[r(0.5), r(0.0), r(0.0), r(0.5)]);
    }

    #[test]
    fn three_level_index_arithmetic() {
        let mut m = CMatrix::zeros(3, 3);
        // rho_{23} with 1-based labels -> component i = (2-1)*3 + 3 = 6, offset 5
        m[(1, 2)] = r(1.0);
        let v = vectorize_matrix(&m);
        for (i, z) in v.components().iter().enumerate() {
            assert_eq!(*z, if i + 1 == 6 { r(1.0) } else { r(0.0) });
        }
        assert_eq!(VectorizedState::offset(3, 1, 2), 5);
    }

    #[test]
    fn devectorize_examples() {
        let v = VectorizedState::from_components(vec![r(1.0), r(0.0), r(0.0), r(0.0)]).unwrap();
        assert_eq!(devectorize(&v).get(0, 0), r(1.0));
        let v = VectorizedState::from_components(vec![r(0.5), r(0.0), r(0.0), r(0.5)]).unwrap();
        assert_eq!(devectorize_matrix(&v), CMatrix::diag(&[r(0.5), r(0.5)]));
        assert!(matches!(
            VectorizedState::from_components(vec![r(0.0); 5]),
            Err(Error::InvalidDimension(_))
        ));
    }

    #[test]
    fn density_matrix_validation() {
        let bad_trace = CMatrix::diag(&[r(0.5), r(0.6)]);
        assert!(matches!(DensityMatrix::new(bad_trace), Err(Error::InvariantViolation(_))));
        let mut non_herm = CMatrix::diag(&[r(0.5), r(0.5)]);
        non_herm[(0, 1)] = r(0.1);
        assert!(matches!(DensityMatrix::new(non_herm), Err(Error::NotHermitian { .. })));
        // positivity is not enforced
        let mut indefinite = CMatrix::diag(&[r(0.5), r(0.5)]);
        indefinite[(0, 1)] = r(0.6);
        indefinite[(1, 0)] = r(0.6);
        let rho = DensityMatrix::new(indefinite).unwrap();
        assert!((rho.min_eigenvalue() + 0.1).abs() < 1e-12);
    }
}
