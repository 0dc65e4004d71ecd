#![allow(dead_code)]

use lindblad_kit::twolevel::TwoLevelParams;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

/// sigma log-uniform in [1e-4, 0.1], N in [0, 100], |eta|^2 in [0.25, 4],
/// zeta in [-1, 1], omega0 = 1.
pub fn draw_params(rng: &mut impl Rng) -> TwoLevelParams {
    let sigma = log_uniform(rng, 1e-4, 0.1);
    let n = rng.gen_range(0.0..100.0);
    let eta2: f64 = rng.gen_range(0.25..4.0);
    let zeta = rng.gen_range(-1.0..1.0);
    TwoLevelParams::dimensionless(eta2.sqrt(), zeta, sigma, n).unwrap()
}

/// Same ranges with a complex eta of random phase and a complex zeta.
pub fn draw_complex_params(rng: &mut impl Rng) -> TwoLevelParams {
    let p = draw_params(rng);
    let phase = rng.gen_range(0.0..std::f64::consts::TAU);
    let eta = num_complex::Complex64::from_polar(p.eta.norm(), phase);
    let zeta = num_complex::Complex64::new(p.zeta.re, rng.gen_range(-1.0..1.0));
    TwoLevelParams::new(1.0, eta, zeta, p.sigma, p.n_tilde).unwrap()
}
