//! Pinned numerical tolerances.
//!
//! Every threshold used by the library checks, the verification suite and the
//! acceptance tests lives here so that none is tuned after the fact.

/// Normalized transformed-ODE residual of the N = 200 Frobenius series.
pub const SERIES_RESIDUAL: f64 = 1e-9;

/// Default number of terms kept in a non-terminating series.
pub const DEFAULT_SERIES_TERMS: usize = 200;

/// Coefficients beyond this magnitude abort the recurrence.
pub const SERIES_OVERFLOW: f64 = 1e300;

/// Sample points for residuals stay this far from x = 0 and x = 1.
pub const RESIDUAL_EDGE: f64 = 1e-3;

/// Radial form versus rescaled transformed form.
pub const CHANGE_OF_VARIABLE: f64 = 1e-10;

/// Full 3D operator versus separated radial operator.
pub const SEPARATION: f64 = 1e-8;

/// |c_{n+1}(root)| relative to the largest retained coefficient.
pub const TRUNCATION_ROOT: f64 = 1e-10;

/// Absolute polynomial-value target for Newton polishing.
pub const ROOT_POLISH: f64 = 1e-12;

/// Relative agreement between the closed form and the truncation roots.
pub const CLOSED_FORM_AGREEMENT: f64 = 1e-8;

/// Closed-form c1 versus the recurrence seed at the same spectral value.
pub const WAVEFUNCTION_SEED: f64 = 1e-8;

/// Below this the termination defect counts as zero.
pub const TERMINATION_ZERO: f64 = 1e-12;

/// Flux-periodicity of energies.
pub const PERIODICITY: f64 = 1e-12;

/// Linear-fit residual of energies against the rotation speed.
pub const ROTATION_AFFINE: f64 = 1e-12;

/// Finite-difference eigenvalues versus the flat-space exact spectrum.
pub const ORACLE_FLAT_RELATIVE: f64 = 5e-4;

/// Bounds on the error ratio under grid doubling (second-order scheme).
pub const ORACLE_CONVERGENCE_RATIO: (f64, f64) = (3.5, 4.5);

/// Per-eigenpair residual of the back-substituted radial function.
pub const ORACLE_RESIDUAL: f64 = 1e-6;

/// Largest admissible h * local wavenumber on an oracle grid.
pub const ORACLE_RESOLUTION: f64 = 0.5;

/// Relative shift of the ground state when r_max grows by 25 %.
pub const ORACLE_BOUNDARY: f64 = 1e-6;

/// Default grid parameters for the oracle.
pub const ORACLE_EPSILON: f64 = 1e-6;
pub const ORACLE_POINTS: usize = 4000;
pub const ORACLE_EIGS: usize = 5;

/// Round-trip of the energy/spectral linear maps (relative).
pub const ROUND_TRIP: f64 = 1e-14;
