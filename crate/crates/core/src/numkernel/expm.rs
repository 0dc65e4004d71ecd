//! Matrix exponential by scaling and squaring with a fixed [13/13] Padé
//! approximant (Higham 2005). The argument is scaled by 2^-s so that its
//! 1-norm is at most theta_13, the approximant is evaluated, and the result
//! is squared s times.

use num_complex::Complex64;

use super::matrix::CMatrix;
use crate::error::{Error, Result};

/// Padé degree used for every evaluation.
pub const PADE_ORDER: usize = 13;

const THETA_13: f64 = 5.371_920_351_148_152;

const PADE_13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// exp(tA) plus a flag raised when the result left the representable range.
#[derive(Debug, Clone)]
pub struct Expm {
    pub matrix: CMatrix,
    pub overflow: bool,
}

/// Computes exp(t A). Overflow is reported on the result, not as an error.
pub fn expm(a: &CMatrix, t: f64) -> Result<Expm> {
    if !a.is_square() {
        return Err(Error::InvalidDimension("expm needs a square matrix".into()));
    }
    if !a.is_finite() || !t.is_finite() {
        return Err(Error::InvalidParameter("expm input must be finite".into()));
    }
    let n = a.rows();
    let at = a.scale_real(t);
    let norm = at.norm_1();
    if norm == 0.0 {
        return Ok(Expm {
            matrix: CMatrix::identity(n),
            overflow: false,
        });
    }
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let x = at.scale_real(2f64.powi(-s));

    let id = CMatrix::identity(n);
    let x2 = x.mul_unchecked(&x);
    let x4 = x2.mul_unchecked(&x2);
    let x6 = x4.mul_unchecked(&x2);
    let b = |k: usize| Complex64::new(PADE_13[k], 0.0);
    let lin = |terms: &[(&CMatrix, usize)]| {
        let mut acc = CMatrix::zeros(n, n);
        for (m, k) in terms {
            acc = &acc + &m.scale(b(*k));
        }
        acc
    };

    let u_inner = x6.mul_unchecked(&lin(&[(&x6, 13), (&x4, 11), (&x2, 9)]));
    let u_tail = lin(&[(&x6, 7), (&x4, 5), (&x2, 3), (&id, 1)]);
    let u = x.mul_unchecked(&(&u_inner + &u_tail));
    let v_inner = x6.mul_unchecked(&lin(&[(&x6, 12), (&x4, 10), (&x2, 8)]));
    let v = &v_inner + &lin(&[(&x6, 6), (&x4, 4), (&x2, 2), (&id, 0)]);

    let p = &v + &u;
    let q = &v - &u;
    let mut r = match q.solve(&p) {
        Ok(r) => r,
        Err(_) => {
            return Ok(Expm {
                matrix: CMatrix::from_fn(n, n, |_, _| Complex64::new(f64::NAN, f64::NAN)),
                overflow: true,
            })
        }
    };
    for _ in 0..s {
        r = r.mul_unchecked(&r);
        if !r.is_finite() {
            break;
        }
    }
    let overflow = !r.is_finite();
    Ok(Expm { matrix: r, overflow })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_matrix_gives_identity() {
        for t in [0.0, 1.0, -3.5, 1e6] {
            let e = expm(&CMatrix::zeros(3, 3), t).unwrap();
            assert_eq!(e.matrix, CMatrix::identity(3));
            assert!(!e.overflow);
        }
    }

    #[test]
    fn diagonal_exponential() {
        let a = CMatrix::diag(&[c(-1.0, 0.0), c(-2.0, 0.0)]);
        let e = expm(&a, 1.0).unwrap().matrix;
        assert!((e[(0, 0)].re - (-1f64).exp()).abs() < 1e-15);
        assert!((e[(1, 1)].re - (-2f64).exp()).abs() < 1e-15);
        assert_eq!(e[(0, 1)], c(0.0, 0.0));
    }

    #[test]
    fn rotation_and_large_norm() {
        // exp of [[0, w], [-w, 0]] is a rotation by w
        let w = 40.0;
        let a = CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap();
        let e = expm(&a, w).unwrap().matrix;
        assert!((e[(0, 0)].re - w.cos()).abs() < 1e-12);
        assert!((e[(0, 1)].re - w.sin()).abs() < 1e-12);
    }

    #[test]
    fn nilpotent_series_terminates() {
        let a = CMatrix::from_real_rows(&[vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![0.0, 0.0, 0.0]]).unwrap();
        let e = expm(&a, 2.0).unwrap().matrix;
        let want = CMatrix::from_real_rows(&[vec![1.0, 2.0, 2.0], vec![0.0, 1.0, 2.0], vec![0.0, 0.0, 1.0]]).unwrap();
        assert!(e.max_abs_diff(&want) < 1e-14);
    }

    #[test]
    fn overflow_is_flagged_not_fatal() {
        let a = CMatrix::diag(&[c(1.0, 0.0), c(0.0, 0.0)]);
        let e = expm(&a, 1000.0).unwrap();
        assert!(e.overflow);
    }
}
