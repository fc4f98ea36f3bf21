//! Bound states of a charged particle in a rotating space-time with a screw
//! dislocation, under an Aharonov-Bohm flux and either an oscillator plus
//! inverse-square potential or a pure inverse-square potential.
//!
//! The radial equation is mapped to a Heun-type equation and solved by a
//! power series; quantization follows from truncating that series. A
//! finite-volume eigensolver on the original radial operator serves as an
//! independent check.

pub mod error;
pub mod model;
pub mod oracle;
pub mod output;
pub mod poly;
pub mod series;
pub mod spectrum;
pub mod sweep;
pub mod tolerances;
pub mod tridiag;
pub mod verify;

pub use error::{Error, Result};
pub use model::{
    energy_to_spectral, spectral_to_energy, DerivedParams, Model, ParamWarning, PhysicalParams,
    SpectralParameter,
};
pub use oracle::{flat_exact_spectrum, oracle_eigenvalues, GridMode, GridSpec, OracleResult};
pub use series::{
    changeofvar_consistency, first_coefficient, recurrence_triple, series_coefficients, series_residual,
    RecurrenceVariant, SeriesSolution,
};
pub use spectrum::{
    ab_periodicity_check, compare_closed_form_vs_truncation, ground_state_closed_form, ground_state_wavefunction,
    truncation_solve, Branch, EnergyLevel,
};
pub use sweep::{run_sweep, BranchSelect, LevelQuery, SweepParam, SweepSpec};
pub use verify::{run_verify, VerifyOptions, VerifyReport};
