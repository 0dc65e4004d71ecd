//! Dense complex linear algebra for small generators (dimension <= 64).
//!
//! All values are immutable after construction and every function here is
//! pure, so everything can be shared freely across threads.

mod density;
mod eigen;
mod expm;
mod matrix;

pub use density::{devectorize, devectorize_matrix, vectorize, vectorize_matrix, DensityMatrix, VectorizedState};
pub use eigen::{eig_general, eig_hermitian, eig_hermitian_min, sort_spectrum, Spectrum, MAX_DIM};
pub use expm::{expm, Expm, PADE_ORDER};
pub use matrix::CMatrix;

use num_complex::Complex64;

/// Shorthand for a real-valued complex number.
pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Greedy nearest-neighbour matching of two eigenvalue lists; returns the
/// largest pairwise distance, or infinity if the lengths differ.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (k, d) = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, y)| (k, (x - y).norm()))
            .fold((usize::MAX, f64::INFINITY), |acc, v| if v.1 < acc.1 { v } else { acc });
        used[k] = true;
        worst = worst.max(d);
    }
    worst
}
