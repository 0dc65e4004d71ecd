//! Named tolerances shared across modules.
//!
//! Every threshold that decides a pass/fail or an error path lives here so
//! the numeric contract can be read in one place.

/// Maximum |rho_ij - conj(rho_ji)| accepted for a density matrix.
pub const HERMITIAN: f64 = 1e-12;

/// Maximum |tr rho - 1| accepted when constructing a density matrix.
pub const TRACE: f64 = 1e-12;

/// Eigen-solver residual bound, relative to the matrix norm.
pub const EIGEN_RESIDUAL: f64 = 1e-10;

/// Column-sum defect allowed by the trace-preservation check.
pub const TRACE_PRESERVATION: f64 = 1e-12;

/// Hermitian-pairing defect allowed in a rate tensor.
pub const RATE_PAIRING: f64 = 1e-12;

/// Tolerance on extracted semiclassical rates (imaginary part, negativity).
pub const SEMICLASSICAL_RATE: f64 = 1e-12;

/// Exact (Kronecker) energy matching, relative to the reference frequency.
pub const DETUNING_MATCH: f64 = 1e-9;

/// Relative distance to a vanishing denominator in the dot form factors.
pub const SINGULAR_GUARD: f64 = 1e-9;

/// Any |entry| above this during propagation flags the trajectory as diverged.
pub const OVERFLOW_THRESHOLD: f64 = 1e12;

/// A smallest eigenvalue below this counts as a positivity violation.
pub const POSITIVITY_VIOLATION: f64 = -1e-9;

/// RK4 step cap: h * (spectral-radius estimate) never exceeds this.
pub const RK4_STEP_FRACTION: f64 = 0.01;

/// Neutral band around the CM criticality threshold.
pub const CRITICAL_BAND: f64 = 1e-9;
