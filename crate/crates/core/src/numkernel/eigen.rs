//! Eigen-solvers.
//!
//! [`eig_general`] reduces to upper Hessenberg form with Householder
//! reflections and then runs shifted complex QR sweeps (Wilkinson shift,
//! exceptional shift every tenth iteration) until the Schur form is reached.
//! Eigenvectors come from back-substitution on the triangular factor.
//!
//! [`eig_hermitian_min`] embeds the Hermitian matrix into a real symmetric
//! matrix of twice the size and runs cyclic Jacobi rotations.

use num_complex::Complex64;

use super::matrix::CMatrix;
use crate::error::{Error, Result};
use crate::tolerances;

/// Largest dimension the general solver accepts.
pub const MAX_DIM: usize = 64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Eigenvalues (and eigenvectors, as columns) of a square matrix.
///
/// Eigenvalues are ordered by descending real part, ties broken by
/// descending imaginary part. Real parts closer than 1e-10 of the matrix
/// norm count as tied, so conjugate pairs always list +Im first.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<Complex64>,
    pub eigenvectors: Option<CMatrix>,
    /// max_k ||A v_k - lambda_k v_k|| with unit-norm v_k.
    pub residual: f64,
}

impl Spectrum {
    pub fn max_real_part(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Column `k` of the eigenvector matrix.
    pub fn eigenvector(&self, k: usize) -> Option<Vec<Complex64>> {
        let v = self.eigenvectors.as_ref()?;
        Some((0..v.rows()).map(|r| v[(r, k)]).collect())
    }
}

pub fn eig_general(a: &CMatrix) -> Result<Spectrum> {
    if !a.is_square() {
        return Err(Error::InvalidDimension(format!(
            "eigenproblem needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    if n > MAX_DIM {
        return Err(Error::InvalidDimension(format!("dimension {n} exceeds {MAX_DIM}")));
    }
    if !a.is_finite() {
        return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
    }
    if n == 0 {
        return Ok(Spectrum {
            eigenvalues: vec![],
            eigenvectors: Some(CMatrix::zeros(0, 0)),
            residual: 0.0,
        });
    }

    let (mut t, mut z) = hessenberg(a);
    schur_qr(&mut t, &mut z)?;
    let eigenvalues: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();
    let vectors = schur_eigenvectors(&t, &z);

    let residual = residual(a, &eigenvalues, &vectors);
    let scale = a.norm_1().max(f64::MIN_POSITIVE);
    if residual > tolerances::EIGEN_RESIDUAL * scale.max(1.0) {
        return Err(Error::NoConvergence {
            iterations: 0,
            best_residual: residual,
        });
    }

    let order = spectral_order(&eigenvalues, scale);
    let eigenvalues = order.iter().map(|&k| eigenvalues[k]).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |r, c| vectors[(r, order[c])]);
    Ok(Spectrum {
        eigenvalues,
        eigenvectors: Some(eigenvectors),
        residual,
    })
}

/// Permutation realizing the deterministic ordering rule.
fn spectral_order(values: &[Complex64], scale: f64) -> Vec<usize> {
    let quantum = tolerances::EIGEN_RESIDUAL * scale.max(1.0);
    let key = |z: &Complex64| (z.re / quantum).round() as i64;
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&i, &j| {
        key(&values[j])
            .cmp(&key(&values[i]))
            .then(values[j].im.total_cmp(&values[i].im))
            .then(i.cmp(&j))
    });
    idx
}

/// Sorts arbitrary eigenvalue lists with the same rule as [`Spectrum`].
pub fn sort_spectrum(values: &mut Vec<Complex64>, scale: f64) {
    let order = spectral_order(values, scale);
    *values = order.iter().map(|&k| values[k]).collect();
}

fn householder_vector(x: &[Complex64]) -> Option<(Vec<Complex64>, Complex64)> {
    let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return None;
    }
    let phase = if x[0].norm() == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        x[0] / x[0].norm()
    };
    let alpha = -phase * norm;
    let mut v = x.to_vec();
    v[0] -= alpha;
    let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if vnorm == 0.0 {
        return None;
    }
    for z in &mut v {
        *z /= vnorm;
    }
    Some((v, alpha))
}

/// Returns (H, Q) with A = Q H Q^dagger and H upper Hessenberg.
fn hessenberg(a: &CMatrix) -> (CMatrix, CMatrix) {
    let n = a.rows();
    let mut h = a.clone();
    let mut q = CMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let x: Vec<Complex64> = ((k + 1)..n).map(|r| h[(r, k)]).collect();
        let Some((v, _)) = householder_vector(&x) else { continue };
        // H <- P H, P = I - 2 v v^dagger acting on rows k+1..n
        for c in 0..n {
            let dot: Complex64 = v.iter().enumerate().map(|(i, vi)| vi.conj() * h[(k + 1 + i, c)]).sum();
            for (i, vi) in v.iter().enumerate() {
                h[(k + 1 + i, c)] -= *vi * dot * 2.0;
            }
        }
        // H <- H P, Q <- Q P
        for m in [&mut h, &mut q] {
            for r in 0..n {
                let dot: Complex64 = v.iter().enumerate().map(|(i, vi)| m[(r, k + 1 + i)] * vi).sum();
                for (i, vi) in v.iter().enumerate() {
                    m[(r, k + 1 + i)] -= dot * vi.conj() * 2.0;
                }
            }
        }
        for r in (k + 2)..n {
            h[(r, k)] = ZERO;
        }
    }
    (h, q)
}

/// Complex Givens rotation G = [[c, s], [-conj(s), c]] with G [a; b] = [r; 0].
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let an = a.norm();
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, ZERO);
    }
    if an == 0.0 {
        return (0.0, Complex64::new(1.0, 0.0));
    }
    let norm = an.hypot(bn);
    let phase = a / an;
    (an / norm, phase * b.conj() / norm)
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half_tr = (a + d) * 0.5;
    let disc = ((a - d) * 0.5 * ((a - d) * 0.5) + b * c).sqrt();
    let l1 = half_tr + disc;
    let l2 = half_tr - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Reduces the Hessenberg matrix `t` to upper triangular Schur form in
/// place, accumulating the unitary similarity into `z`.
fn schur_qr(t: &mut CMatrix, z: &mut CMatrix) -> Result<()> {
    let n = t.rows();
    let norm = t.norm_1().max(f64::MIN_POSITIVE);
    let max_iter = 100 * n.max(1);
    let mut total = 0usize;
    let mut its = 0usize;
    let mut hi = n - 1;
    while hi > 0 {
        let mut lo = hi;
        while lo > 0 {
            let s = t[(lo - 1, lo - 1)].norm() + t[(lo, lo)].norm();
            let s = if s == 0.0 { norm } else { s };
            if t[(lo, lo - 1)].norm() <= f64::EPSILON * s {
                t[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            its = 0;
            continue;
        }
        its += 1;
        total += 1;
        if total > max_iter {
            let best = (1..n).map(|i| t[(i, i - 1)].norm()).fold(0.0, f64::max);
            return Err(Error::NoConvergence {
                iterations: total,
                best_residual: best,
            });
        }
        let shift = if its % 10 == 0 {
            let sub = t[(hi, hi - 1)].re.abs() + if hi >= 2 { t[(hi - 1, hi - 2)].re.abs() } else { 0.0 };
            t[(hi, hi)] + Complex64::new(sub, 0.0)
        } else {
            wilkinson_shift(t[(hi - 1, hi - 1)], t[(hi - 1, hi)], t[(hi, hi - 1)], t[(hi, hi)])
        };

        let mut x = t[(lo, lo)] - shift;
        let mut y = t[(lo + 1, lo)];
        for k in lo..hi {
            let (c, s) = givens(x, y);
            let col_start = if k > lo { k - 1 } else { lo };
            for j in col_start..n {
                let u = t[(k, j)];
                let v = t[(k + 1, j)];
                t[(k, j)] = u * c + s * v;
                t[(k + 1, j)] = -s.conj() * u + v * c;
            }
            let row_end = (k + 2).min(hi);
            for i in 0..=row_end {
                let u = t[(i, k)];
                let v = t[(i, k + 1)];
                t[(i, k)] = u * c + v * s.conj();
                t[(i, k + 1)] = -u * s + v * c;
            }
            for i in 0..n {
                let u = z[(i, k)];
                let v = z[(i, k + 1)];
                z[(i, k)] = u * c + v * s.conj();
                z[(i, k + 1)] = -u * s + v * c;
            }
            if k + 1 < hi {
                x = t[(k + 1, k)];
                y = t[(k + 2, k)];
            }
        }
    }
    for r in 1..n {
        for c in 0..r {
            t[(r, c)] = ZERO;
        }
    }
    Ok(())
}

/// Eigenvectors of A = Z T Z^dagger, T upper triangular, as unit columns.
fn schur_eigenvectors(t: &CMatrix, z: &CMatrix) -> CMatrix {
    let n = t.rows();
    let smin = (f64::EPSILON * t.norm_1()).max(f64::MIN_POSITIVE * 1e10);
    let mut x_all = CMatrix::zeros(n, n);
    for k in 0..n {
        let lambda = t[(k, k)];
        let mut x = vec![ZERO; n];
        x[k] = Complex64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let s: Complex64 = ((i + 1)..=k).map(|j| t[(i, j)] * x[j]).sum();
            let mut d = t[(i, i)] - lambda;
            if d.norm() < smin {
                d = Complex64::new(smin, 0.0);
            }
            x[i] = -s / d;
            // rescale to keep the back-substitution finite
            let big = x.iter().map(|v| v.norm()).fold(0.0, f64::max);
            if big > 1e100 {
                for v in &mut x {
                    *v /= big;
                }
            }
        }
        let v = z.mul_vec(&x).expect("square");
        let nrm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        for (r, vr) in v.iter().enumerate() {
            x_all[(r, k)] = *vr / nrm;
        }
    }
    x_all
}

fn residual(a: &CMatrix, values: &[Complex64], vectors: &CMatrix) -> f64 {
    let n = a.rows();
    (0..n)
        .map(|k| {
            let v: Vec<Complex64> = (0..n).map(|r| vectors[(r, k)]).collect();
            let av = a.mul_vec(&v).expect("square");
            av.iter()
                .zip(&v)
                .map(|(x, y)| (x - values[k] * y).norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn eig_hermitian_min(a: &CMatrix) -> Result<f64> {
    Ok(eig_hermitian(a)?.into_iter().fold(f64::INFINITY, f64::min))
}

/// All eigenvalues of a Hermitian matrix, ascending.
pub fn eig_hermitian(a: &CMatrix) -> Result<Vec<f64>> {
    if !a.is_square() {
        return Err(Error::InvalidDimension("Hermitian eigenproblem needs a square matrix".into()));
    }
    let defect = a.hermitian_defect();
    if defect > tolerances::HERMITIAN * a.max_abs().max(1.0) {
        return Err(Error::NotHermitian { defect });
    }
    let n = a.rows();
    // [[Re, -Im], [Im, Re]] has every eigenvalue of A twice.
    let m = 2 * n;
    let mut s = vec![0.0; m * m];
    for r in 0..n {
        for c in 0..n {
            let z = (a[(r, c)] + a[(c, r)].conj()) * 0.5;
            s[r * m + c] = z.re;
            s[(r + n) * m + (c + n)] = z.re;
            s[r * m + (c + n)] = -z.im;
            s[(r + n) * m + c] = z.im;
        }
    }
    jacobi_symmetric(&mut s, m);
    let mut diag: Vec<f64> = (0..m).map(|i| s[i * m + i]).collect();
    diag.sort_by(f64::total_cmp);
    Ok(diag.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect())
}

fn jacobi_symmetric(s: &mut [f64], m: usize) {
    for _sweep in 0..100 {
        let off: f64 = (0..m)
            .flat_map(|r| (0..m).filter(move |&c| c != r).map(move |c| (r, c)))
            .map(|(r, c)| s[r * m + c] * s[r * m + c])
            .sum();
        let total: f64 = s.iter().map(|x| x * x).sum();
        if off <= 1e-32 * total || off == 0.0 {
            return;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                let apq = s[p * m + q];
                if apq == 0.0 {
                    continue;
                }
                let app = s[p * m + p];
                let aqq = s[q * m + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..m {
                    let akp = s[k * m + p];
                    let akq = s[k * m + q];
                    s[k * m + p] = c * akp - sn * akq;
                    s[k * m + q] = sn * akp + c * akq;
                }
                for k in 0..m {
                    let apk = s[p * m + k];
                    let aqk = s[q * m + k];
                    s[p * m + k] = c * apk - sn * aqk;
                    s[q * m + k] = sn * apk + c * aqk;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_spectrum_is_ordered() {
        let a = CMatrix::diag(&[c(1.0, 0.0), c(0.0, 2.0), c(-3.0, 0.0)]);
        let s = eig_general(&a).unwrap();
        assert_eq!(s.eigenvalues, vec![c(1.0, 0.0), c(0.0, 2.0), c(-3.0, 0.0)]);
        assert!(s.residual < 1e-14);
    }

    #[test]
    fn nilpotent_block() {
        let a = CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let s = eig_general(&a).unwrap();
        assert!(s.eigenvalues.iter().all(|z| z.norm() < 1e-14));
        assert!(s.residual <= 1e-10);
    }

    #[test]
    fn rotation_generator_has_conjugate_pair() {
        let a = CMatrix::from_real_rows(&[vec![-1.0, 2.0], vec![-2.0, -1.0]]).unwrap();
        let s = eig_general(&a).unwrap();
        assert!((s.eigenvalues[0] - c(-1.0, 2.0)).norm() < 1e-13);
        assert!((s.eigenvalues[1] - c(-1.0, -2.0)).norm() < 1e-13);
    }

    #[test]
    fn non_square_and_oversize_rejected() {
        assert!(matches!(eig_general(&CMatrix::zeros(2, 3)), Err(Error::InvalidDimension(_))));
        assert!(matches!(eig_general(&CMatrix::zeros(65, 65)), Err(Error::InvalidDimension(_))));
    }

    #[test]
    fn hermitian_min_examples() {
        let a = CMatrix::diag(&[c(0.3, 0.0), c(0.7, 0.0)]);
        assert!((eig_hermitian_min(&a).unwrap() - 0.3).abs() < 1e-12);
        let b = CMatrix::from_real_rows(&[vec![0.5, 0.6], vec![0.6, 0.5]]).unwrap();
        assert!((eig_hermitian_min(&b).unwrap() + 0.1).abs() < 1e-12);
        let h = CMatrix::from_rows(&[vec![c(1.0, 0.0), c(0.0, 1.0)], vec![c(0.0, -1.0), c(1.0, 0.0)]]).unwrap();
        assert!(eig_hermitian_min(&h).unwrap().abs() < 1e-12);
    }

    #[test]
    fn hermitian_min_rejects_non_hermitian() {
        let a = CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(eig_hermitian_min(&a), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn random_dense_matrix_residual() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in [1usize, 3, 8, 20, 64] {
            let a = CMatrix::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let s = eig_general(&a).unwrap();
            assert!(s.residual <= 1e-10 * a.norm_1(), "n={n} residual {}", s.residual);
            let tr: Complex64 = s.eigenvalues.iter().sum();
            assert!((tr - a.trace()).norm() < 1e-10 * n as f64);
        }
    }
}
