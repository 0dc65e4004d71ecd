//! Bound-to-continuum two-level model driven by a single resonant phonon
//! mode.
//!
//! Level 1 is the bound state at frequency 0, level 2 the continuum state at
//! omega0, and the phonon frequency equals omega0. Couplings are fixed by
//! three dimensionless numbers: `eta = g12/g21`, `zeta = (g11 - g22)/g21`
//! and `sigma`, with `|g21|^2 = 2 omega0 sigma`. Everything here has a closed
//! form; [`liouvillian_from_rates`] rebuilds the same generators through the
//! generic rate machinery as an independent check.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numkernel::{CMatrix, DensityMatrix};
use crate::rates::{
    assemble_liouvillian, cm_rates, free_liouvillian, sym_rates, LineNorm, Liouvillian, ModeCoupling, Scheme,
    SystemBasis,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelParams {
    pub omega0: f64,
    pub eta: Complex64,
    pub zeta: Complex64,
    pub sigma: f64,
    pub n_tilde: f64,
}

impl TwoLevelParams {
    pub fn new(omega0: f64, eta: Complex64, zeta: Complex64, sigma: f64, n_tilde: f64) -> Result<Self> {
        if !(omega0 > 0.0) || !omega0.is_finite() {
            return Err(Error::InvalidParameter(format!("omega0 must be > 0, got {omega0}")));
        }
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidParameter(format!("sigma must be >= 0, got {sigma}")));
        }
        if !(n_tilde >= 0.0) || !n_tilde.is_finite() {
            return Err(Error::InvalidParameter(format!("N_tilde must be >= 0, got {n_tilde}")));
        }
        if !(eta.re.is_finite() && eta.im.is_finite() && zeta.re.is_finite() && zeta.im.is_finite()) {
            return Err(Error::InvalidParameter("eta and zeta must be finite".into()));
        }
        Ok(Self {
            omega0,
            eta,
            zeta,
            sigma,
            n_tilde,
        })
    }

    /// Real eta and zeta, omega0 = 1.
    pub fn dimensionless(eta: f64, zeta: f64, sigma: f64, n_tilde: f64) -> Result<Self> {
        Self::new(1.0, Complex64::new(eta, 0.0), Complex64::new(zeta, 0.0), sigma, n_tilde)
    }

    pub fn kappa(&self) -> f64 {
        2.0 * PI * (2.0 * self.n_tilde + 1.0) * self.sigma
    }

    pub fn kappa_prime(&self) -> f64 {
        self.eta.norm_sqr() * self.kappa()
    }

    pub fn with_sigma(&self, sigma: f64) -> Result<Self> {
        Self::new(self.omega0, self.eta, self.zeta, sigma, self.n_tilde)
    }

    pub fn with_n_tilde(&self, n_tilde: f64) -> Result<Self> {
        Self::new(self.omega0, self.eta, self.zeta, self.sigma, n_tilde)
    }

    fn echo(&self) -> Vec<(String, f64)> {
        vec![
            ("omega0".into(), self.omega0),
            ("eta_re".into(), self.eta.re),
            ("eta_im".into(), self.eta.im),
            ("zeta_re".into(), self.zeta.re),
            ("zeta_im".into(), self.zeta.im),
            ("sigma".into(), self.sigma),
            ("N_tilde".into(), self.n_tilde),
        ]
    }
}

pub fn basis(p: &TwoLevelParams) -> SystemBasis {
    SystemBasis::new(vec![0.0, p.omega0]).expect("two finite levels")
}

/// Coupling matrix with g21 real and positive, g22 = 0.
pub fn mode_coupling(p: &TwoLevelParams) -> ModeCoupling {
    let g21 = Complex64::new((2.0 * p.omega0 * p.sigma).sqrt(), 0.0);
    let g = CMatrix::from_rows(&[vec![p.zeta * g21, p.eta * g21], vec![g21, Complex64::new(0.0, 0.0)]])
        .expect("2x2");
    ModeCoupling::new("q0", p.omega0, p.n_tilde, g, LineNorm::Kronecker).expect("validated parameters")
}

fn from_real_and_coupling(p: &TwoLevelParams, scatt: CMatrix, scheme: Scheme) -> Liouvillian {
    let free = free_liouvillian(&basis(p));
    let total = free.matrix() + &scatt.scale_real(4.0 * PI * p.omega0 * p.sigma);
    Liouvillian::from_matrix(2, total, scheme)
        .expect("4x4")
        .with_params(p.echo())
}

/// Free part plus the CM scattering part, entry by entry.
pub fn liouvillian_cm(p: &TwoLevelParams) -> Liouvillian {
    let n = p.n_tilde;
    let z = Complex64::new(0.0, 0.0);
    let r = |x: f64| Complex64::new(x, 0.0);
    let half_sum = (2.0 * n + 1.0) / 2.0;
    let scatt = CMatrix::from_rows(&[
        vec![r(-n), z, z, r(n + 1.0)],
        vec![p.zeta * (n / 2.0), r(-half_sum), p.eta * half_sum, -p.zeta * ((n + 1.0) / 2.0)],
        vec![
            p.zeta.conj() * (n / 2.0),
            p.eta.conj() * half_sum,
            r(-half_sum),
            -p.zeta.conj() * ((n + 1.0) / 2.0),
        ],
        vec![r(n), z, z, r(-(n + 1.0))],
    ])
    .expect("4x4");
    from_real_and_coupling(p, scatt, Scheme::Cm)
}

/// Free part plus the symmetrized scattering part. Independent of eta and
/// zeta.
pub fn liouvillian_sym(p: &TwoLevelParams) -> Liouvillian {
    let n = p.n_tilde;
    let half_sum = (2.0 * n + 1.0) / 2.0;
    let scatt = CMatrix::from_real_rows(&[
        vec![-n, 0.0, 0.0, n + 1.0],
        vec![0.0, -half_sum, 0.0, 0.0],
        vec![0.0, 0.0, -half_sum, 0.0],
        vec![n, 0.0, 0.0, -(n + 1.0)],
    ])
    .expect("4x4");
    from_real_and_coupling(p, scatt, Scheme::Sym)
}

pub fn liouvillian(p: &TwoLevelParams, scheme: Scheme) -> Result<Liouvillian> {
    match scheme {
        Scheme::Cm => Ok(liouvillian_cm(p)),
        Scheme::Sym => Ok(liouvillian_sym(p)),
        _ => Err(Error::UnsupportedScheme("two-level generators exist for CM and SYM only")),
    }
}

/// Same generator as [`liouvillian_cm`] / [`liouvillian_sym`], built from
/// [`cm_rates`] (exact energy matching) or [`sym_rates`] with width
/// `omega_bar`. For `omega_bar` well below omega0 the SYM result coincides
/// with the closed form because every off-resonant Gaussian underflows.
pub fn liouvillian_from_rates(p: &TwoLevelParams, scheme: Scheme, omega_bar: f64) -> Result<Liouvillian> {
    let basis = basis(p);
    let mode = mode_coupling(p);
    let tensor = match scheme {
        Scheme::Cm => cm_rates(&basis, &mode, 0.0)?,
        Scheme::Sym => sym_rates(&basis, &mode, omega_bar * p.omega0)?,
        _ => return Err(Error::UnsupportedScheme("rates exist for CM and SYM only")),
    };
    let scatt = assemble_liouvillian(&tensor, scheme)?;
    let l = free_liouvillian(&basis).plus(&scatt)?;
    Ok(l.with_params(p.echo()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticSpectrum {
    pub mu: [Complex64; 4],
    pub scheme: Scheme,
}

/// Closed-form eigenvalues.
///
/// CM: `{0, -2 kappa w0, w0 (-kappa +- sqrt(kappa kappa' - 1))}` with the
/// principal square root, so for a negative radicand mu3 is the +Im member.
/// SYM: `{0, -w0 (kappa + i), -w0 (kappa - i), -2 kappa w0}`.
pub fn analytic_eigs(p: &TwoLevelParams, scheme: Scheme) -> Result<AnalyticSpectrum> {
    let w = p.omega0;
    let k = p.kappa();
    let mu = match scheme {
        Scheme::Cm => {
            let root = Complex64::new(k * p.kappa_prime() - 1.0, 0.0).sqrt();
            [
                Complex64::new(0.0, 0.0),
                Complex64::new(-2.0 * k * w, 0.0),
                (root - k) * w,
                (-root - k) * w,
            ]
        }
        Scheme::Sym => [
            Complex64::new(0.0, 0.0),
            Complex64::new(-k, -1.0) * w,
            Complex64::new(-k, 1.0) * w,
            Complex64::new(-2.0 * k * w, 0.0),
        ],
        _ => return Err(Error::UnsupportedScheme("closed-form spectra exist for CM and SYM only")),
    };
    Ok(AnalyticSpectrum { mu, scheme })
}

/// `diag(N + 1, N) / (2N + 1)`, shared by both schemes.
pub fn steady_state(n_tilde: f64) -> Result<DensityMatrix> {
    if !(n_tilde >= 0.0) || !n_tilde.is_finite() {
        return Err(Error::InvalidParameter(format!("N_tilde must be >= 0, got {n_tilde}")));
    }
    let s = 2.0 * n_tilde + 1.0;
    DensityMatrix::new(CMatrix::diag(&[
        Complex64::new((n_tilde + 1.0) / s, 0.0),
        Complex64::new(n_tilde / s, 0.0),
    ]))
}

/// The bound level occupied: `diag(1, 0)`.
pub fn ground_state() -> DensityMatrix {
    DensityMatrix::basis_state(2, 0).expect("n = 2")
}

/// True when the CM polarization mode mu3 grows: `kappa^2 (|eta|^2 - 1) > 1`.
pub fn divergence_predicate(p: &TwoLevelParams) -> bool {
    let k = p.kappa();
    k * k * (p.eta.norm_sqr() - 1.0) > 1.0
}

/// Exact SYM solution. Populations relax at 2 kappa w0 towards the steady
/// state; rho12 evolves as `rho12(0) exp(-(kappa - i) w0 t)`, the phase
/// fixed by the sign of the free part.
pub fn analytic_evolution(p: &TwoLevelParams, scheme: Scheme, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    if scheme != Scheme::Sym {
        return Err(Error::UnsupportedScheme(
            "closed-form evolution exists for SYM only; propagate numerically",
        ));
    }
    if rho0.dim() != 2 {
        return Err(Error::InvalidDimension("two-level evolution needs a 2x2 state".into()));
    }
    let k = p.kappa();
    let w = p.omega0;
    let steady = (p.n_tilde + 1.0) / (2.0 * p.n_tilde + 1.0);
    let decay = (-2.0 * k * w * t).exp();
    let excess = rho0.get(0, 0).re - steady;
    let rho11 = steady + excess * decay;
    let rho22 = 1.0 - steady - excess * decay;
    let phase = (Complex64::new(-k, 1.0) * (w * t)).exp();
    let rho12 = rho0.get(0, 1) * phase;
    let m = CMatrix::from_rows(&[
        vec![Complex64::new(rho11, 0.0), rho12],
        vec![rho12.conj(), Complex64::new(rho22, 0.0)],
    ])?;
    Ok(DensityMatrix::from_propagated(m))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RelaxationTimes {
    Finite { t1: f64, t2: f64 },
    Unbounded,
}

/// `T1 = 1/(2 kappa w0)`, `T2 = 2 T1`, in units of 1/omega0's time unit.
pub fn relaxation_times(p: &TwoLevelParams) -> RelaxationTimes {
    let k = p.kappa();
    if k == 0.0 {
        return RelaxationTimes::Unbounded;
    }
    let t1 = 1.0 / (2.0 * k * p.omega0);
    RelaxationTimes::Finite { t1, t2: 2.0 * t1 }
}
