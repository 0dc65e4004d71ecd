//! Quantum dot coupled to a longitudinal acoustic phonon through the
//! deformation potential.
//!
//! The bound state is the product of the lowest square-well state along z
//! (width `d`) and the in-plane oscillator ground state (inverse length
//! `a`); the continuum state is a plane wave. Phonon and electron wavevectors
//! both point along z. Lengths are in metres, masses in kg, densities in
//! kg/m^3 and energies in meV.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::tolerances::SINGULAR_GUARD;
use crate::twolevel::TwoLevelParams;
use crate::units::{ELECTRON_MASS, HBAR_SI, MEV_J};

/// Inverse oscillator length that puts sigma(11 meV) at 0.0092 with the
/// default material and well width.
pub const TUNED_INVERSE_LENGTH: f64 = 3.334212547232425e7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QdGeometry {
    /// Well width along z.
    pub d: f64,
    /// In-plane inverse oscillator length (m* w / 2 hbar)^(1/2).
    pub a: f64,
    pub e_loc_mev: f64,
    pub m_eff: f64,
}

impl QdGeometry {
    pub fn new(d: f64, a: f64, e_loc_mev: f64, m_eff: f64) -> Result<Self> {
        for (name, v) in [("d", d), ("a", a), ("E_loc", e_loc_mev), ("m_eff", m_eff)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be > 0, got {v}")));
            }
        }
        Ok(Self { d, a, e_loc_mev, m_eff })
    }
}

impl Default for QdGeometry {
    fn default() -> Self {
        Self {
            d: 5e-9,
            a: TUNED_INVERSE_LENGTH,
            e_loc_mev: 7.0,
            m_eff: 0.067 * ELECTRON_MASS,
        }
    }
}

/// GaAs-like by default. The normalization volume cancels out of sigma and
/// is kept only so that coupling constants can be reported per volume.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    pub eps_def_mev: f64,
    pub rho_mass: f64,
    pub c_s: f64,
    pub volume: f64,
}

impl Material {
    pub fn new(eps_def_mev: f64, rho_mass: f64, c_s: f64, volume: f64) -> Result<Self> {
        for (name, v) in [("eps_def", eps_def_mev), ("rho", rho_mass), ("c_s", c_s), ("V", volume)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be > 0, got {v}")));
            }
        }
        Ok(Self {
            eps_def_mev,
            rho_mass,
            c_s,
            volume,
        })
    }
}

impl Default for Material {
    fn default() -> Self {
        Self {
            eps_def_mev: 7000.0,
            rho_mass: 5300.0,
            c_s: 5000.0,
            volume: 1e-21,
        }
    }
}

/// The driven mode, resonant with the bound-to-continuum transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhononDrive {
    pub hbar_omega0_mev: f64,
    pub n_tilde: f64,
    pub q0: f64,
    pub k: f64,
}

impl PhononDrive {
    /// omega0 in rad/s.
    pub fn omega0(&self) -> f64 {
        self.hbar_omega0_mev * MEV_J / HBAR_SI
    }
}

/// Linear dispersion `q0 = omega0 / c_s` and the continuum wavevector from
/// `hbar omega0 = E_loc + hbar^2 k^2 / 2 m*`.
pub fn dispersion(material: &Material, geometry: &QdGeometry, hbar_omega0_mev: f64, n_tilde: f64) -> Result<PhononDrive> {
    if !(n_tilde >= 0.0) || !n_tilde.is_finite() {
        return Err(Error::InvalidParameter(format!("N_tilde must be >= 0, got {n_tilde}")));
    }
    if !(hbar_omega0_mev > geometry.e_loc_mev) {
        return Err(Error::BelowThreshold {
            hbar_omega0_mev,
            e_loc_mev: geometry.e_loc_mev,
        });
    }
    let omega0 = hbar_omega0_mev * MEV_J / HBAR_SI;
    let excess = (hbar_omega0_mev - geometry.e_loc_mev) * MEV_J;
    Ok(PhononDrive {
        hbar_omega0_mev,
        n_tilde,
        q0: omega0 / material.c_s,
        k: (2.0 * geometry.m_eff * excess).sqrt() / HBAR_SI,
    })
}

fn guard(value: f64, scale: f64, factor: &'static str) -> Result<f64> {
    if value.abs() <= SINGULAR_GUARD * scale {
        Err(Error::SingularGeometry { factor })
    } else {
        Ok(value)
    }
}

fn cos_minus(d: f64, k: f64, q0: f64) -> Result<f64> {
    guard((d * (k - q0) / 2.0).cos(), 1.0, "cos[d(k-q0)/2]")
}

/// `eta = cos[d(k+q0)/2]/cos[d(k-q0)/2] * (d^2(k-q0)^2 - pi^2)/(d^2(k+q0)^2 - pi^2)`.
pub fn eta_closed_form(d: f64, k: f64, q0: f64) -> Result<f64> {
    let pi2 = PI * PI;
    let c_minus = cos_minus(d, k, q0)?;
    let denom = guard(d * d * (k + q0).powi(2) - pi2, pi2, "d^2(k+q0)^2 - pi^2")?;
    Ok((d * (k + q0) / 2.0).cos() / c_minus * (d * d * (k - q0).powi(2) - pi2) / denom)
}

/// `zeta = a d^2 (pi^2 - d^2(k-q0)^2) q0 sec[d(k-q0)/2] sin[d q0/2]
///   / (2 pi^(3/2) (4 pi^2 - d^2 q0^2))`.
pub fn zeta_closed_form(a: f64, d: f64, k: f64, q0: f64) -> Result<f64> {
    let pi2 = PI * PI;
    let c_minus = cos_minus(d, k, q0)?;
    let denom = guard(4.0 * pi2 - d * d * q0 * q0, 4.0 * pi2, "4pi^2 - d^2 q0^2")?;
    let num = a * d * d * (pi2 - d * d * (k - q0).powi(2)) * q0 * (d * q0 / 2.0).sin() / c_minus;
    Ok(num / (2.0 * PI.powf(1.5) * denom))
}

/// `sigma = eps^2 q0^5 / (a^2 d^2 rho hbar w0^3) |cos[d(k-q0)/2] / (pi^2 - d^2(k-q0)^2)|^2`.
pub fn sigma_closed_form(material: &Material, geometry: &QdGeometry, drive: &PhononDrive) -> Result<f64> {
    let omega0 = drive.omega0();
    if !(omega0 > 0.0) {
        return Err(Error::InvalidParameter("omega0 must be > 0".into()));
    }
    let (d, k, q0) = (geometry.d, drive.k, drive.q0);
    let pi2 = PI * PI;
    let c_minus = (d * (k - q0) / 2.0).cos();
    let denom = guard(pi2 - d * d * (k - q0).powi(2), pi2, "pi^2 - d^2(k-q0)^2")?;
    let eps = material.eps_def_mev * MEV_J;
    let prefactor = eps * eps * q0.powi(5)
        / (geometry.a * geometry.a * d * d * material.rho_mass * HBAR_SI * omega0.powi(3));
    Ok(prefactor * (c_minus / denom).powi(2))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionlessParams {
    pub eta: Complex64,
    pub zeta: Complex64,
    pub sigma: f64,
    pub n_tilde: f64,
    pub kappa: f64,
    pub kappa_prime: f64,
}

impl DimensionlessParams {
    pub fn new(eta: Complex64, zeta: Complex64, sigma: f64, n_tilde: f64) -> Result<Self> {
        if !(sigma >= 0.0) || !(n_tilde >= 0.0) {
            return Err(Error::InvalidParameter("sigma and N_tilde must be >= 0".into()));
        }
        let (kappa, kappa_prime) = kappas(sigma, n_tilde, eta);
        Ok(Self {
            eta,
            zeta,
            sigma,
            n_tilde,
            kappa,
            kappa_prime,
        })
    }

    pub fn from_physical(material: &Material, geometry: &QdGeometry, drive: &PhononDrive) -> Result<Self> {
        let eta = eta_closed_form(geometry.d, drive.k, drive.q0)?;
        let zeta = zeta_closed_form(geometry.a, geometry.d, drive.k, drive.q0)?;
        let sigma = sigma_closed_form(material, geometry, drive)?;
        Self::new(Complex64::new(eta, 0.0), Complex64::new(zeta, 0.0), sigma, drive.n_tilde)
    }

    /// Two-level parameters with frequencies measured in units of omega0.
    pub fn two_level(&self) -> Result<TwoLevelParams> {
        TwoLevelParams::new(1.0, self.eta, self.zeta, self.sigma, self.n_tilde)
    }
}

/// `kappa = 2 pi (2N + 1) sigma`, `kappa' = |eta|^2 kappa`.
pub fn kappas(sigma: f64, n_tilde: f64, eta: Complex64) -> (f64, f64) {
    let kappa = 2.0 * PI * (2.0 * n_tilde + 1.0) * sigma;
    (kappa, eta.norm_sqr() * kappa)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    Finite(f64),
    Unbounded,
}

impl Threshold {
    pub fn finite(self) -> Option<f64> {
        match self {
            Threshold::Finite(x) => Some(x),
            Threshold::Unbounded => None,
        }
    }
}

/// Coupling strength above which CM diverges at fixed occupation.
pub fn sigma_crit(eta: Complex64, n_tilde: f64) -> Threshold {
    let excess = eta.norm_sqr() - 1.0;
    if excess <= 0.0 {
        return Threshold::Unbounded;
    }
    Threshold::Finite(1.0 / ((2.0 * n_tilde + 1.0) * 2.0 * PI * excess.sqrt()))
}

/// Occupation above which CM diverges at fixed coupling strength.
pub fn n_crit(eta: Complex64, sigma: f64) -> Threshold {
    let excess = eta.norm_sqr() - 1.0;
    if excess <= 0.0 || sigma <= 0.0 {
        return Threshold::Unbounded;
    }
    Threshold::Finite(0.5 * (1.0 / (sigma * 2.0 * PI * excess.sqrt()) - 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellLabel {
    Safe,
    Nonphysical,
    UnboundedSafe,
    Singular,
}

impl CellLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            CellLabel::Safe => "safe",
            CellLabel::Nonphysical => "nonphysical",
            CellLabel::UnboundedSafe => "unbounded-safe",
            CellLabel::Singular => "singular",
        }
    }
}

/// Label for one (eta, sigma, N) point.
pub fn classify(eta2: f64, sigma: f64, n_tilde: f64) -> CellLabel {
    if eta2 <= 1.0 {
        return CellLabel::UnboundedSafe;
    }
    match n_crit(Complex64::new(eta2.sqrt(), 0.0), sigma) {
        Threshold::Finite(n_bar) if n_tilde > n_bar => CellLabel::Nonphysical,
        _ => CellLabel::Safe,
    }
}

/// eta^2 and sigma at one phonon energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModePoint {
    pub hbar_omega0_mev: f64,
    pub eta2: f64,
    pub sigma: f64,
}

impl ModePoint {
    pub fn n_bar(&self) -> Threshold {
        n_crit(Complex64::new(self.eta2.sqrt(), 0.0), self.sigma)
    }
}

/// Evaluates the closed forms at one energy. A singular geometry is
/// returned as `Ok(None)`.
pub fn mode_point(material: &Material, geometry: &QdGeometry, hbar_omega0_mev: f64) -> Result<Option<ModePoint>> {
    let drive = dispersion(material, geometry, hbar_omega0_mev, 0.0)?;
    match DimensionlessParams::from_physical(material, geometry, &drive) {
        Ok(p) => Ok(Some(ModePoint {
            hbar_omega0_mev,
            eta2: p.eta.norm_sqr(),
            sigma: p.sigma,
        })),
        Err(Error::SingularGeometry { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionCell {
    pub n_tilde: f64,
    pub hbar_omega0_mev: f64,
    pub label: CellLabel,
}

/// Labels every (N, energy) pair. `points[j]` is `None` where the closed
/// forms are singular. Cells are ordered N-major.
pub fn partition_cells(n_grid: &[f64], energies: &[f64], points: &[Option<ModePoint>]) -> Vec<PartitionCell> {
    debug_assert_eq!(energies.len(), points.len());
    n_grid
        .iter()
        .flat_map(|&n| {
            energies.iter().zip(points).map(move |(&e, point)| PartitionCell {
                n_tilde: n,
                hbar_omega0_mev: e,
                label: match point {
                    Some(p) => classify(p.eta2, p.sigma, n),
                    None => CellLabel::Singular,
                },
            })
        })
        .collect()
}

/// Partition of the (N, hbar omega0) plane for a physical dot.
pub fn partition_map(
    n_grid: &[f64],
    energies_mev: &[f64],
    material: &Material,
    geometry: &QdGeometry,
) -> Result<(Vec<Option<ModePoint>>, Vec<PartitionCell>)> {
    if n_grid.is_empty() || energies_mev.is_empty() {
        return Err(Error::InvalidParameter("partition grid must be non-empty".into()));
    }
    if let Some(&n) = n_grid.iter().find(|n| !(**n >= 0.0)) {
        return Err(Error::InvalidParameter(format!("N_tilde must be >= 0, got {n}")));
    }
    let points = energies_mev
        .par_iter()
        .map(|&e| mode_point(material, geometry, e))
        .collect::<Result<Vec<_>>>()?;
    let cells = partition_cells(n_grid, energies_mev, &points);
    Ok((points, cells))
}
