//! Time propagation of vectorized density matrices, trajectory diagnostics
//! and the semiclassical rate equation.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numkernel::{expm, vectorize, CMatrix, DensityMatrix};
use crate::rates::{Liouvillian, RateMatrix};
use crate::tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Expm,
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDiagnostics {
    pub trace_re: f64,
    pub trace_im: f64,
    /// Smallest eigenvalue of (rho + rho^dagger)/2.
    pub min_eig: f64,
    pub herm_defect: f64,
    pub overflow: bool,
}

impl StepDiagnostics {
    fn of(rho: &CMatrix, overflow: bool) -> Self {
        let tr = rho.trace();
        let min_eig = if rho.is_finite() {
            DensityMatrix::from_propagated(rho.clone()).min_eigenvalue()
        } else {
            f64::NAN
        };
        Self {
            trace_re: tr.re,
            trace_im: tr.im,
            min_eig,
            herm_defect: rho.hermitian_defect(),
            overflow,
        }
    }
}

/// States at the requested times. When a state overflows it is kept with
/// its flag set and the remaining times are dropped, so `times` may be
/// shorter than the grid that was asked for.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub diagnostics: Vec<StepDiagnostics>,
    pub requested: usize,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn overflowed(&self) -> bool {
        self.diagnostics.last().is_some_and(|d| d.overflow)
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidParameter("time grid is empty".into()));
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidParameter("time grid has non-finite entries".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("times must be strictly increasing".into()));
    }
    Ok(())
}

fn overflows(v: &[Complex64]) -> bool {
    v.iter()
        .any(|z| !(z.norm() <= tolerances::OVERFLOW_THRESHOLD))
}

/// Largest RK4 step allowed for a generator: 0.01 / ||L||_1. The 1-norm
/// bounds the spectral radius, so every mode gets at least 100 steps per
/// e-folding or radian.
pub fn rk4_step_cap(l: &Liouvillian) -> f64 {
    let norm = l.matrix().norm_1();
    if norm == 0.0 {
        f64::INFINITY
    } else {
        tolerances::RK4_STEP_FRACTION / norm
    }
}

fn rk4_advance(m: &CMatrix, v: &[Complex64], gap: f64, cap: f64) -> Vec<Complex64> {
    let steps = if cap.is_finite() { (gap / cap).ceil().max(1.0) as usize } else { 1 };
    let h = gap / steps as f64;
    let mut y = v.to_vec();
    let axpy = |y: &[Complex64], k: &[Complex64], s: f64| -> Vec<Complex64> {
        y.iter().zip(k).map(|(a, b)| a + b * s).collect()
    };
    for _ in 0..steps {
        let k1 = m.mul_vec(&y).expect("dimension checked");
        let k2 = m.mul_vec(&axpy(&y, &k1, h / 2.0)).expect("dimension checked");
        let k3 = m.mul_vec(&axpy(&y, &k2, h / 2.0)).expect("dimension checked");
        let k4 = m.mul_vec(&axpy(&y, &k3, h)).expect("dimension checked");
        for i in 0..y.len() {
            y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
        if overflows(&y) {
            break;
        }
    }
    y
}

/// Integrates `d vec(rho)/dt = L vec(rho)` from `rho0` at `times[0]`.
///
/// `Expm` computes one matrix exponential per distinct gap between
/// consecutive times and chains them. `Rk4` takes equal substeps no longer
/// than [`rk4_step_cap`] inside each gap.
pub fn propagate(l: &Liouvillian, rho0: &DensityMatrix, times: &[f64], method: Method) -> Result<Trajectory> {
    if rho0.dim() != l.n() {
        return Err(Error::InvalidDimension(format!(
            "state is {0}x{0} but the generator acts on {1}x{1}",
            rho0.dim(),
            l.n()
        )));
    }
    check_times(times)?;
    let n = l.n();
    let m = l.matrix();
    let cap = rk4_step_cap(l);
    let mut propagators: HashMap<u64, (CMatrix, bool)> = HashMap::new();

    let mut v = vectorize(rho0).into_components();
    let mut traj = Trajectory {
        times: vec![times[0]],
        states: vec![rho0.clone()],
        diagnostics: vec![StepDiagnostics::of(rho0.matrix(), false)],
        requested: times.len(),
    };
    for w in times.windows(2) {
        let gap = w[1] - w[0];
        let mut flagged = false;
        v = match method {
            Method::Expm => {
                if !propagators.contains_key(&gap.to_bits()) {
                    let e = expm(m, gap)?;
                    propagators.insert(gap.to_bits(), (e.matrix, e.overflow));
                }
                let (u, overflow) = &propagators[&gap.to_bits()];
                flagged |= *overflow;
                u.mul_vec(&v)?
            }
            Method::Rk4 => rk4_advance(m, &v, gap, cap),
        };
        flagged |= overflows(&v);
        let rho = CMatrix::from_row_major(n, n, v.clone())?;
        traj.diagnostics.push(StepDiagnostics::of(&rho, flagged));
        traj.states.push(DensityMatrix::from_propagated(rho));
        traj.times.push(w[1]);
        if flagged {
            break;
        }
    }
    Ok(traj)
}

/// Summary of a trajectory. Trace drift is measured against the initial
/// trace over the states that did not overflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticReport {
    pub max_trace_drift: f64,
    pub min_eig: f64,
    pub max_herm_defect: f64,
    /// First time with min_eig below -1e-9.
    pub first_positivity_violation: Option<f64>,
    pub first_overflow: Option<f64>,
}

pub fn diagnose(traj: &Trajectory) -> Result<DiagnosticReport> {
    let Some(first) = traj.diagnostics.first() else {
        return Err(Error::InvalidParameter("empty trajectory".into()));
    };
    let tr0 = Complex64::new(first.trace_re, first.trace_im);
    let mut report = DiagnosticReport {
        max_trace_drift: 0.0,
        min_eig: f64::INFINITY,
        max_herm_defect: 0.0,
        first_positivity_violation: None,
        first_overflow: None,
    };
    for (t, d) in traj.times.iter().zip(&traj.diagnostics) {
        if d.overflow {
            report.first_overflow.get_or_insert(*t);
            continue;
        }
        let drift = (Complex64::new(d.trace_re, d.trace_im) - tr0).norm();
        report.max_trace_drift = report.max_trace_drift.max(drift);
        report.min_eig = report.min_eig.min(d.min_eig);
        report.max_herm_defect = report.max_herm_defect.max(d.herm_defect);
        if d.min_eig < tolerances::POSITIVITY_VIOLATION {
            report.first_positivity_violation.get_or_insert(*t);
        }
    }
    Ok(report)
}

/// Semiclassical occupations f_l.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    pub f: Vec<f64>,
}

impl Distribution {
    pub fn new(f: Vec<f64>) -> Result<Self> {
        if f.is_empty() {
            return Err(Error::InvalidDimension("empty distribution".into()));
        }
        if f.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
            return Err(Error::InvalidParameter("occupations must be finite and >= 0".into()));
        }
        Ok(Self { f })
    }

    pub fn total(&self) -> f64 {
        self.f.iter().sum()
    }
}

/// Generator of `df_l/dt = sum_l' (P_{l l'} f_l' - P_{l' l} f_l)`.
pub fn boltzmann_generator(rates: &RateMatrix) -> CMatrix {
    let n = rates.n();
    CMatrix::from_fn(n, n, |l, lp| {
        if l == lp {
            let out: f64 = (0..n).filter(|&k| k != l).map(|k| rates.get(k, l)).sum();
            Complex64::new(-out, 0.0)
        } else {
            Complex64::new(rates.get(l, lp), 0.0)
        }
    })
}

/// Solves the rate equation exactly, `f(t) = exp(M (t - t0)) f0`, at every
/// requested time.
pub fn boltzmann_evolve(rates: &RateMatrix, f0: &Distribution, times: &[f64]) -> Result<Vec<Distribution>> {
    if rates.n() != f0.f.len() {
        return Err(Error::InvalidDimension(format!(
            "{} rates per row but {} occupations",
            rates.n(),
            f0.f.len()
        )));
    }
    if let Some(bad) = rates.as_slice().iter().find(|r| !(**r >= 0.0) || !r.is_finite()) {
        return Err(Error::InvalidParameter(format!("rates must be finite and >= 0, got {bad}")));
    }
    check_times(times)?;
    let m = boltzmann_generator(rates);
    let f0c: Vec<Complex64> = f0.f.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    times
        .iter()
        .map(|&t| {
            let e = expm(&m, t - times[0])?;
            if e.overflow {
                return Err(Error::InvariantViolation("rate propagator overflowed".into()));
            }
            let f = e.matrix.mul_vec(&f0c)?;
            Ok(Distribution {
                f: f.iter().map(|z| z.re).collect(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rates::Scheme;
    use crate::twolevel::{analytic_evolution, ground_state, liouvillian_cm, liouvillian_sym, TwoLevelParams};

    fn fig_params() -> TwoLevelParams {
        TwoLevelParams::dimensionless(1.31f64.sqrt(), 0.4, 0.0092, 20.0).unwrap()
    }

    fn grid(t_max: f64, points: usize) -> Vec<f64> {
        (0..points).map(|i| t_max * i as f64 / (points - 1) as f64).collect()
    }

    #[test]
    fn zero_generator_is_constant() {
        let l = Liouvillian::from_matrix(2, CMatrix::zeros(4, 4), Scheme::Free).unwrap();
        let rho = crate::twolevel::steady_state(3.0).unwrap();
        for method in [Method::Expm, Method::Rk4] {
            let traj = propagate(&l, &rho, &grid(5.0, 6), method).unwrap();
            assert!(traj.states.iter().all(|s| *s == rho));
            let report = diagnose(&traj).unwrap();
            assert_eq!(report.first_positivity_violation, None);
            assert_eq!(report.first_overflow, None);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let l = liouvillian_sym(&fig_params());
        let rho3 = DensityMatrix::basis_state(3, 0).unwrap();
        assert!(matches!(
            propagate(&l, &rho3, &[0.0, 1.0], Method::Expm),
            Err(Error::InvalidDimension(_))
        ));
        assert!(propagate(&l, &ground_state(), &[0.0, 0.0], Method::Expm).is_err());
    }

    #[test]
    fn sym_matches_closed_form_both_methods() {
        let p = fig_params();
        let l = liouvillian_sym(&p);
        let times = grid(2.0, 41);
        for method in [Method::Expm, Method::Rk4] {
            let traj = propagate(&l, &ground_state(), &times, method).unwrap();
            for (t, rho) in traj.times.iter().zip(&traj.states) {
                let exact = analytic_evolution(&p, Scheme::Sym, &ground_state(), *t).unwrap();
                assert!(rho.matrix().max_abs_diff(exact.matrix()) < 1e-8, "{method:?} t={t}");
                assert!(rho.get(0, 1).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn cm_supercritical_overflows_with_bounded_populations() {
        let l = liouvillian_cm(&fig_params());
        let traj = propagate(&l, &ground_state(), &grid(400.0, 4001), Method::Expm).unwrap();
        assert!(traj.overflowed());
        assert!(traj.len() < traj.requested);
        let report = diagnose(&traj).unwrap();
        assert!(report.max_trace_drift < 1e-6);
        assert!(report.first_positivity_violation.unwrap() < report.first_overflow.unwrap());
        let last_ok = &traj.states[traj.len() - 2];
        assert!(last_ok.get(0, 0).re.abs() <= 1.0 + 1e-9);
    }

    #[test]
    fn boltzmann_two_level_matches_populations() {
        let p = fig_params();
        let up = 4.0 * std::f64::consts::PI * p.sigma * p.n_tilde;
        let down = 4.0 * std::f64::consts::PI * p.sigma * (p.n_tilde + 1.0);
        let rates = RateMatrix::from_rows(&[vec![0.0, down], vec![up, 0.0]]).unwrap();
        let times = grid(3.0, 7);
        let f = boltzmann_evolve(&rates, &Distribution::new(vec![1.0, 0.0]).unwrap(), &times).unwrap();
        for (t, d) in times.iter().zip(&f) {
            let exact = analytic_evolution(&p, Scheme::Sym, &ground_state(), *t).unwrap();
            assert!((d.f[0] - exact.get(0, 0).re).abs() < 1e-12);
            assert!((d.f[1] - exact.get(1, 1).re).abs() < 1e-12);
        }
        let fixed = Distribution::new(vec![p.n_tilde + 1.0, p.n_tilde]).unwrap();
        let g = boltzmann_evolve(&rates, &fixed, &[0.0, 10.0]).unwrap();
        assert!((g[1].f[0] - fixed.f[0]).abs() < 1e-10);
    }

    #[test]
    fn boltzmann_rejects_negative_rates() {
        let rates = RateMatrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        let f0 = Distribution::new(vec![0.5, 0.5]).unwrap();
        assert!(matches!(
            boltzmann_evolve(&rates, &f0, &[0.0, 1.0]),
            Err(Error::InvalidParameter(_))
        ));
        let zero = RateMatrix::from_rows(&[vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let f = boltzmann_evolve(&zero, &f0, &[0.0, 1.0]).unwrap();
        assert_eq!(f[1], f0);
    }
}
