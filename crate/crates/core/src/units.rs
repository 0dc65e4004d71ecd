//! Physical constants and unit conversions.
//!
//! Internally hbar = 1 and frequencies are measured in units of a reference
//! omega0. Physical inputs arrive in meV, nm, ps or SI and are converted here.

/// Reduced Planck constant in meV * ps.
pub const HBAR_MEV_PS: f64 = 0.658_211_956_9;
/// Reduced Planck constant in J * s.
pub const HBAR_SI: f64 = 1.054_571_817e-34;
/// One meV in joules.
pub const MEV_J: f64 = 1.602_176_634e-22;
/// Electron rest mass in kg.
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;

/// Angular frequency in rad/ps for a quantum of energy `e_mev`.
pub fn mev_to_rad_per_ps(e_mev: f64) -> f64 {
    e_mev / HBAR_MEV_PS
}

/// Angular frequency in rad/s for a quantum of energy `e_mev`.
pub fn mev_to_rad_per_s(e_mev: f64) -> f64 {
    e_mev * MEV_J / HBAR_SI
}

/// Converts a time in units of 1/omega0 into picoseconds.
pub fn omega0_time_to_ps(t: f64, hbar_omega0_mev: f64) -> f64 {
    t / mev_to_rad_per_ps(hbar_omega0_mev)
}

/// Converts picoseconds into units of 1/omega0.
pub fn ps_to_omega0_time(t_ps: f64, hbar_omega0_mev: f64) -> f64 {
    t_ps * mev_to_rad_per_ps(hbar_omega0_mev)
}
