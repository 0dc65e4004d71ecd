//! Generalized scattering rates and the Liouvillians built from them.
//!
//! Conventions used throughout:
//!
//! - hbar = 1 and all frequencies are in units of a caller-chosen reference.
//! - A pair of levels (a1, a2) maps to the vector offset `a1 * n + a2`.
//! - The free part carries -i[H0, rho], i.e. the entry for (a1, a2) is
//!   -i(w_a1 - w_a2).
//! - The interaction with one bosonic mode is `sum g_{a1 a2} c+_a1 c_a2 b + h.c.`.
//!   Absorption (phonon destroyed) uses `g` with weight N; emission uses
//!   `g+ = g^dagger` with weight N + 1.
//! - Rate tensors enter the equation of motion as
//!   `drho/dt = 1/2 (P rho - Gamma rho) + h.c.` with
//!   `Gamma_{ac} = sum_e conj(P_{ee,ac})`, the total out-scattering, which
//!   keeps the generator trace-preserving for any tensor.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numkernel::{devectorize_matrix, vectorize_matrix, CMatrix, DensityMatrix};
use crate::tolerances;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Unperturbed electronic levels.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemBasis {
    omegas: Vec<f64>,
}

impl SystemBasis {
    pub fn new(omegas: Vec<f64>) -> Result<Self> {
        if omegas.is_empty() {
            return Err(Error::InvalidDimension("basis needs at least one level".into()));
        }
        if omegas.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidParameter("level frequencies must be finite".into()));
        }
        Ok(Self { omegas })
    }

    pub fn n(&self) -> usize {
        self.omegas.len()
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    /// w_a - w_b.
    pub fn transition(&self, a: usize, b: usize) -> f64 {
        self.omegas[a] - self.omegas[b]
    }

    fn max_gap(&self) -> f64 {
        let lo = self.omegas.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.omegas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        hi - lo
    }
}

/// Phonon absorption or emission.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Branch {
    Absorption,
    Emission,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::Absorption, Branch::Emission];

    /// Bath weight: N for absorption, N + 1 for emission.
    pub fn weight(self, occupation: f64) -> f64 {
        match self {
            Branch::Absorption => occupation,
            Branch::Emission => occupation + 1.0,
        }
    }

    /// Sign in front of the mode frequency in the energy balance.
    fn sign(self) -> f64 {
        match self {
            Branch::Absorption => -1.0,
            Branch::Emission => 1.0,
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Absorption => "absorption",
            Branch::Emission => "emission",
        })
    }
}

/// How an energy-conserving factor is normalized.
///
/// `Kronecker` is the single-mode convention: on shell the factor is 1 and
/// the density of final states is folded into |g|^2. `Dirac` treats the
/// factor as a normalized line shape (a density in frequency), which is what
/// a continuum golden-rule rate needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineNorm {
    Kronecker,
    Dirac,
}

/// Coupling of the electronic levels to one bosonic mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeCoupling {
    pub label: String,
    /// Mode frequency.
    pub omega: f64,
    /// Mean occupation N of the mode.
    pub occupation: f64,
    /// g_{a1 a2}: amplitude of c+_a1 c_a2 b.
    pub g: CMatrix,
    pub norm: LineNorm,
}

impl ModeCoupling {
    pub fn new(label: impl Into<String>, omega: f64, occupation: f64, g: CMatrix, norm: LineNorm) -> Result<Self> {
        if !(occupation >= 0.0) || !occupation.is_finite() {
            return Err(Error::InvalidParameter(format!("mode occupation must be >= 0, got {occupation}")));
        }
        if !omega.is_finite() {
            return Err(Error::InvalidParameter("mode frequency must be finite".into()));
        }
        if !g.is_square() || !g.is_finite() {
            return Err(Error::InvalidParameter("coupling matrix must be square and finite".into()));
        }
        Ok(Self {
            label: label.into(),
            omega,
            occupation,
            g,
            norm,
        })
    }

    /// g for absorption, g^dagger for emission.
    pub fn branch_coupling(&self, branch: Branch) -> CMatrix {
        match branch {
            Branch::Absorption => self.g.clone(),
            Branch::Emission => self.g.adjoint(),
        }
    }

    fn check_basis(&self, basis: &SystemBasis) -> Result<()> {
        if self.g.rows() != basis.n() {
            return Err(Error::InvalidDimension(format!(
                "coupling is {}x{} but the basis has {} levels",
                self.g.rows(),
                self.g.cols(),
                basis.n()
            )));
        }
        Ok(())
    }

    fn detuning_tolerance(&self, basis: &SystemBasis) -> f64 {
        tolerances::DETUNING_MATCH * self.omega.abs().max(basis.max_gap()).max(1.0)
    }
}

/// Four-index rates P_{l1 l2, l1' l2'}.
#[derive(Clone, PartialEq)]
pub struct RateTensor {
    n: usize,
    data: Vec<Complex64>,
}

impl RateTensor {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![ZERO; n.pow(4)],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn offset(&self, a: usize, b: usize, c: usize, d: usize) -> usize {
        ((a * self.n + b) * self.n + c) * self.n + d
    }

    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> Complex64 {
        self.data[self.offset(a, b, c, d)]
    }

    pub fn set(&mut self, a: usize, b: usize, c: usize, d: usize, z: Complex64) {
        let k = self.offset(a, b, c, d);
        self.data[k] = z;
    }

    pub fn try_add(&self, other: &RateTensor) -> Result<RateTensor> {
        if self.n != other.n {
            return Err(Error::InvalidDimension("rate tensors of different size".into()));
        }
        Ok(RateTensor {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    /// max |P_{ab,cd} - conj(P_{ba,dc})|.
    ///
    /// Zero (to rounding) for symmetrized rates. CM rates break it whenever
    /// the energy selection treats the two index pairs differently.
    pub fn pairing_defect(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        worst = worst.max((self.get(a, b, c, d) - self.get(b, a, d, c).conj()).norm());
                    }
                }
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl fmt::Debug for RateTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nonzero: Vec<_> = (0..self.data.len()).filter(|&k| self.data[k] != ZERO).collect();
        write!(f, "RateTensor(n={}, {} nonzero)", self.n, nonzero.len())
    }
}

/// Which construction produced a Liouvillian.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Cm,
    Sym,
    Free,
    LindbladDissipator,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Cm => "CM",
            Scheme::Sym => "SYM",
            Scheme::Free => "FREE",
            Scheme::LindbladDissipator => "LINDBLAD-DISSIPATOR",
        })
    }
}

/// n^2 x n^2 generator acting on the row-major vectorized density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Liouvillian {
    n: usize,
    matrix: CMatrix,
    pub scheme: Scheme,
    /// Parameters the generator was built from, for provenance in outputs.
    pub params: Vec<(String, f64)>,
}

impl Liouvillian {
    pub fn from_matrix(n: usize, matrix: CMatrix, scheme: Scheme) -> Result<Self> {
        if matrix.rows() != n * n || !matrix.is_square() {
            return Err(Error::InvalidDimension(format!(
                "Liouvillian for n={n} must be {0}x{0}",
                n * n
            )));
        }
        Ok(Self {
            n,
            matrix,
            scheme,
            params: Vec::new(),
        })
    }

    pub fn with_params(mut self, params: Vec<(String, f64)>) -> Self {
        self.params = params;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Sum of two generators; keeps the scheme tag of `self` unless `self`
    /// is the free part.
    pub fn plus(&self, other: &Liouvillian) -> Result<Liouvillian> {
        if self.n != other.n {
            return Err(Error::InvalidDimension("Liouvillians of different size".into()));
        }
        let scheme = if self.scheme == Scheme::Free { other.scheme } else { self.scheme };
        let mut params = self.params.clone();
        params.extend(other.params.iter().cloned());
        Ok(Liouvillian {
            n: self.n,
            matrix: self.matrix.try_add(&other.matrix)?,
            scheme,
            params,
        })
    }

    /// max over columns of |sum of the rows that map to diagonal pairs|.
    pub fn trace_defect(&self) -> f64 {
        let n = self.n;
        (0..n * n)
            .map(|j| (0..n).map(|a| self.matrix[(a * n + a, j)]).sum::<Complex64>().norm())
            .fold(0.0, f64::max)
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.trace_defect() <= tolerances::TRACE_PRESERVATION * self.matrix.max_abs().max(1.0)
    }

    /// devectorize(L vec(rho)).
    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        if rho.rows() != self.n || !rho.is_square() {
            return Err(Error::InvalidDimension("state does not match the generator".into()));
        }
        let v = vectorize_matrix(rho);
        let out = self.matrix.mul_vec(v.components())?;
        let out = crate::numkernel::VectorizedState::from_components(out)?;
        Ok(devectorize_matrix(&out))
    }

    pub fn apply_state(&self, rho: &DensityMatrix) -> Result<CMatrix> {
        self.apply(rho.matrix())
    }
}

fn line_factor(norm: LineNorm, x: f64, width: f64) -> f64 {
    let g = (-x * x / (2.0 * width * width)).exp();
    match norm {
        LineNorm::Kronecker => g,
        LineNorm::Dirac => g / ((2.0 * PI).sqrt() * width),
    }
}

/// Conventional Markov rates for one mode.
///
/// `P_{ab,cd} = 2 pi sum_branch w g_{ac} conj(g_{bd}) D(w_b - w_d -/+ w_q)`:
/// the energy selection involves only the second index pair. With
/// `delta_width == 0` D is exact matching (1 within the detuning tolerance,
/// else 0); otherwise D is a Gaussian of that width, normalized per
/// [`LineNorm`].
pub fn cm_rates(basis: &SystemBasis, mode: &ModeCoupling, delta_width: f64) -> Result<RateTensor> {
    if !(delta_width >= 0.0) || !delta_width.is_finite() {
        return Err(Error::InvalidParameter(format!("delta_width must be >= 0, got {delta_width}")));
    }
    mode.check_basis(basis)?;
    let n = basis.n();
    let tol = mode.detuning_tolerance(basis);
    let delta = |x: f64| {
        if delta_width == 0.0 {
            if x.abs() <= tol {
                1.0
            } else {
                0.0
            }
        } else {
            line_factor(mode.norm, x, delta_width)
        }
    };
    let mut p = RateTensor::zeros(n);
    for branch in Branch::BOTH {
        let w = branch.weight(mode.occupation);
        if w == 0.0 {
            continue;
        }
        let g = mode.branch_coupling(branch);
        for b in 0..n {
            for d in 0..n {
                let energy = delta(basis.transition(b, d) + branch.sign() * mode.omega);
                if energy == 0.0 || g[(b, d)] == ZERO {
                    continue;
                }
                let right = g[(b, d)].conj() * (2.0 * PI * w * energy);
                for a in 0..n {
                    for c in 0..n {
                        let k = p.offset(a, b, c, d);
                        p.data[k] += g[(a, c)] * right;
                    }
                }
            }
        }
    }
    Ok(p)
}

/// Temporally symmetrized (coarse-grained) rates for one mode.
///
/// `P_{ab,cd} = 2 pi exp(-(w_ac - w_bd)^2 / 8 wbar^2)
///   sum_branch w g_{ac} conj(g_{bd}) G((w_ac + w_bd)/2 -/+ w_q)`
/// where G is a Gaussian of width `omega_bar` (normalized per [`LineNorm`]).
pub fn sym_rates(basis: &SystemBasis, mode: &ModeCoupling, omega_bar: f64) -> Result<RateTensor> {
    if !(omega_bar > 0.0) || !omega_bar.is_finite() {
        return Err(Error::InvalidParameter(format!("omega_bar must be > 0, got {omega_bar}")));
    }
    mode.check_basis(basis)?;
    let n = basis.n();
    let mut p = RateTensor::zeros(n);
    for branch in Branch::BOTH {
        let w = branch.weight(mode.occupation);
        if w == 0.0 {
            continue;
        }
        let g = mode.branch_coupling(branch);
        for a in 0..n {
            for c in 0..n {
                if g[(a, c)] == ZERO {
                    continue;
                }
                let w_ac = basis.transition(a, c);
                for b in 0..n {
                    for d in 0..n {
                        if g[(b, d)] == ZERO {
                            continue;
                        }
                        let w_bd = basis.transition(b, d);
                        let diff = w_ac - w_bd;
                        let mean = 0.5 * (w_ac + w_bd) + branch.sign() * mode.omega;
                        let f = (-diff * diff / (8.0 * omega_bar * omega_bar)).exp()
                            * line_factor(mode.norm, mean, omega_bar);
                        if f == 0.0 {
                            continue;
                        }
                        let k = p.offset(a, b, c, d);
                        p.data[k] += g[(a, c)] * g[(b, d)].conj() * (2.0 * PI * w * f);
                    }
                }
            }
        }
    }
    Ok(p)
}

/// Scattering Liouvillian from a rate tensor.
///
/// `L_{(a,b),(c,d)} = 1/2 P_{ab,cd} + 1/2 conj(P_{ba,dc})
///   - 1/2 Gamma_{ac} delta_{bd} - 1/2 conj(Gamma_{bd}) delta_{ac}`.
pub fn assemble_liouvillian(p: &RateTensor, scheme: Scheme) -> Result<Liouvillian> {
    if !p.is_finite() {
        return Err(Error::InvalidParameter("rate tensor has non-finite entries".into()));
    }
    let n = p.n;
    let mut gamma = CMatrix::zeros(n, n);
    for a in 0..n {
        for c in 0..n {
            gamma[(a, c)] = (0..n).map(|e| p.get(e, e, a, c).conj()).sum();
        }
    }
    let nn = n * n;
    let mut l = CMatrix::zeros(nn, nn);
    for a in 0..n {
        for b in 0..n {
            let row = a * n + b;
            for c in 0..n {
                for d in 0..n {
                    let mut z = (p.get(a, b, c, d) + p.get(b, a, d, c).conj()) * 0.5;
                    if b == d {
                        z -= gamma[(a, c)] * 0.5;
                    }
                    if a == c {
                        z -= gamma[(b, d)].conj() * 0.5;
                    }
                    l[(row, c * n + d)] = z;
                }
            }
        }
    }
    Liouvillian::from_matrix(n, l, scheme)
}

/// -i[H0, rho] in vectorized form: diagonal with -i(w_a1 - w_a2).
pub fn free_liouvillian(basis: &SystemBasis) -> Liouvillian {
    let n = basis.n();
    let entries: Vec<Complex64> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .map(|(a, b)| Complex64::new(0.0, -basis.transition(a, b)))
        .collect();
    Liouvillian::from_matrix(n, CMatrix::diag(&entries), Scheme::Free).expect("n^2 diagonal")
}

/// Gaussian-filtered jump operator for one branch of one mode.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpOperator {
    pub branch: Branch,
    pub label: String,
    pub matrix: CMatrix,
}

/// Width of the Gaussian time window, 1/(2 omega_bar), that makes the
/// product of two jump-operator filters reproduce [`sym_rates`] exactly.
pub fn collision_time(omega_bar: f64) -> f64 {
    0.5 / omega_bar
}

/// Closed form of `(2 pi t^2)^(-1/4) int dt exp(-i delta t) exp(-t^2 / 4 t^2)`:
/// `2 sqrt(pi) t_bar (2 pi t_bar^2)^(-1/4) exp(-delta^2 t_bar^2)`.
pub fn gaussian_time_filter(delta: f64, t_bar: f64) -> f64 {
    2.0 * PI.sqrt() * t_bar * (2.0 * PI * t_bar * t_bar).powf(-0.25) * (-delta * delta * t_bar * t_bar).exp()
}

/// Jump operators L+- with entries g+-_{ac} times the Gaussian energy filter
/// evaluated at w_ac -/+ w_q.
///
/// For [`LineNorm::Dirac`] the filter is the time integral itself
/// ([`gaussian_time_filter`] with t = [`collision_time`]). For
/// [`LineNorm::Kronecker`] it is rescaled to sqrt(2 pi) on shell, matching the
/// peak-normalized rates.
pub fn jump_operators(basis: &SystemBasis, mode: &ModeCoupling, omega_bar: f64) -> Result<Vec<JumpOperator>> {
    if !(omega_bar > 0.0) || !omega_bar.is_finite() {
        return Err(Error::InvalidParameter(format!("omega_bar must be > 0, got {omega_bar}")));
    }
    mode.check_basis(basis)?;
    let n = basis.n();
    let t_bar = collision_time(omega_bar);
    let scale = match mode.norm {
        LineNorm::Dirac => 1.0,
        LineNorm::Kronecker => (2.0 * PI).sqrt() / gaussian_time_filter(0.0, t_bar),
    };
    Ok(Branch::BOTH
        .iter()
        .map(|&branch| {
            let g = mode.branch_coupling(branch);
            let matrix = CMatrix::from_fn(n, n, |a, c| {
                let detuning = basis.transition(a, c) + branch.sign() * mode.omega;
                g[(a, c)] * (scale * gaussian_time_filter(detuning, t_bar))
            });
            JumpOperator {
                branch,
                label: mode.label.clone(),
                matrix,
            }
        })
        .collect())
}

/// GKSL generator `sum w (L rho L^dagger - 1/2 {L^dagger L, rho})`, weights
/// N + 1/2 +- 1/2 looked up by mode label.
pub fn lindblad_dissipator(jumps: &[JumpOperator], occupations: &BTreeMap<String, f64>) -> Result<Liouvillian> {
    let Some(first) = jumps.first() else {
        return Err(Error::InvalidDimension(
            "no jump operators; use lindblad_dissipator_dim for an empty set".into(),
        ));
    };
    let n = first.matrix.rows();
    let mut total = lindblad_dissipator_dim(n);
    for jump in jumps {
        if jump.matrix.rows() != n || !jump.matrix.is_square() {
            return Err(Error::InvalidDimension("jump operators of different size".into()));
        }
        let occ = *occupations
            .get(&jump.label)
            .ok_or_else(|| Error::InvalidParameter(format!("no occupation for mode `{}`", jump.label)))?;
        let w = jump.branch.weight(occ);
        let term = single_dissipator(&jump.matrix, w);
        total.matrix = total.matrix.try_add(&term)?;
    }
    Ok(total)
}

/// The zero dissipator on an n-level system.
pub fn lindblad_dissipator_dim(n: usize) -> Liouvillian {
    Liouvillian::from_matrix(n, CMatrix::zeros(n * n, n * n), Scheme::LindbladDissipator).expect("square")
}

fn single_dissipator(jump: &CMatrix, weight: f64) -> CMatrix {
    let n = jump.rows();
    let ldl = jump.adjoint().mul_unchecked(jump);
    let mut out = CMatrix::zeros(n * n, n * n);
    for a in 0..n {
        for b in 0..n {
            let row = a * n + b;
            for c in 0..n {
                for d in 0..n {
                    let mut z = jump[(a, c)] * jump[(b, d)].conj();
                    if b == d {
                        z -= ldl[(a, c)] * 0.5;
                    }
                    if a == c {
                        z -= ldl[(d, b)] * 0.5;
                    }
                    out[(row, c * n + d)] = z * weight;
                }
            }
        }
    }
    out
}

/// Real n x n matrix of semiclassical rates; entry (l, l') is the rate
/// from l' into l.
#[derive(Debug, Clone, PartialEq)]
pub struct RateMatrix {
    n: usize,
    data: Vec<f64>,
}

impl RateMatrix {
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::InvalidDimension(format!("rate matrix needs {} entries", n * n)));
        }
        Ok(Self { n, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidDimension("rate matrix must be square".into()));
        }
        Self::new(n, rows.concat())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Rate from `from` into `to`.
    pub fn get(&self, to: usize, from: usize) -> f64 {
        self.data[to * self.n + from]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// Diagonal extraction `P_{l l'} = P_{ll, l'l'}`.
pub fn semiclassical_rates(p: &RateTensor) -> Result<RateMatrix> {
    let n = p.n;
    let scale = p.max_abs().max(1.0);
    let mut data = Vec::with_capacity(n * n);
    for l in 0..n {
        for lp in 0..n {
            let z = p.get(l, l, lp, lp);
            if z.im.abs() > tolerances::SEMICLASSICAL_RATE * scale || z.re < -tolerances::SEMICLASSICAL_RATE * scale {
                return Err(Error::InvariantViolation(format!(
                    "semiclassical rate ({l},{lp}) = {z} is not real and non-negative"
                )));
            }
            data.push(z.re.max(0.0));
        }
    }
    RateMatrix::new(n, data)
}
