//! Python module `dislocation_spectra`.

use dislocation_core::oracle::{oracle_eigenvalues, GridMode, GridSpec};
use dislocation_core::spectrum::{ground_state_closed_form, truncation_solve};
use dislocation_core::{
    energy_to_spectral, flat_exact_spectrum, run_verify, series_coefficients, spectral_to_energy, Branch, EnergyLevel,
    Error, Model, PhysicalParams, RecurrenceVariant, SpectralParameter, VerifyOptions,
};
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(dislocation_spectra, DislocationError, PyException);
create_exception!(dislocation_spectra, InvalidParameterError, DislocationError);
create_exception!(dislocation_spectra, NoRealLevelError, DislocationError);
create_exception!(dislocation_spectra, NumericalError, DislocationError);

fn to_py(e: Error) -> PyErr {
    let msg = e.to_string();
    match e {
        Error::InvalidParameter { .. } | Error::ModelMismatch { .. } | Error::InvalidGrid(_) => {
            InvalidParameterError::new_err(msg)
        }
        Error::NegativeDiscriminant { .. } | Error::LevelMissing(_) => NoRealLevelError::new_err(msg),
        _ => NumericalError::new_err(msg),
    }
}

fn parse_variant(name: &str) -> PyResult<RecurrenceVariant> {
    match name {
        "derived" => Ok(RecurrenceVariant::DERIVED),
        "printed" => Ok(RecurrenceVariant::PRINTED),
        "printed-omega" => Ok(RecurrenceVariant::PRINTED_OMEGA),
        other => Err(InvalidParameterError::new_err(format!(
            "unknown variant '{other}' (derived, printed, printed-omega)"
        ))),
    }
}

/// Physical parameters of one configuration.
#[pyclass(name = "Params", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyParams {
    inner: PhysicalParams,
}

#[pymethods]
impl PyParams {
    #[new]
    #[pyo3(signature = (model="oscillator", mass=1.0, omega0=None, gamma=0.0, delta=0.0, beta=0.5, rotation=0.0, flux=0.0, k=1.0, ell=0))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        model: &str,
        mass: f64,
        omega0: Option<f64>,
        gamma: f64,
        delta: f64,
        beta: f64,
        rotation: f64,
        flux: f64,
        k: f64,
        ell: i64,
    ) -> PyResult<Self> {
        let model = match model {
            "oscillator" => Model::OscillatorInverseSquare,
            "inverse-square" => Model::InverseSquareOnly,
            other => {
                return Err(InvalidParameterError::new_err(format!(
                    "unknown model '{other}' (oscillator, inverse-square)"
                )))
            }
        };
        let omega0 = omega0.unwrap_or(if model == Model::OscillatorInverseSquare { 1.0 } else { 0.0 });
        let inner = PhysicalParams {
            mass,
            omega0,
            gamma,
            delta,
            beta,
            rotation,
            flux,
            k,
            ell,
            model,
        };
        inner.validate().map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn model(&self) -> &'static str {
        match self.inner.model {
            Model::OscillatorInverseSquare => "oscillator",
            Model::InverseSquareOnly => "inverse-square",
        }
    }

    #[getter]
    fn iota(&self) -> f64 {
        self.inner.iota()
    }

    /// `dict` with iota, omega, omega_x, j and the Frobenius exponent.
    fn derive<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = self.inner.derive().map_err(to_py)?;
        let out = PyDict::new(py);
        out.set_item("iota", d.iota)?;
        out.set_item("omega", d.omega)?;
        out.set_item("omega_x", d.omega_x)?;
        out.set_item("j", d.j)?;
        out.set_item("exponent", d.exponent())?;
        Ok(out)
    }

    fn with_flux(&self, flux: f64) -> Self {
        Self {
            inner: self.inner.with_flux(flux),
        }
    }

    fn with_rotation(&self, rotation: f64) -> Self {
        Self {
            inner: self.inner.with_rotation(rotation),
        }
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

fn level_dict<'py>(py: Python<'py>, l: &EnergyLevel) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    out.set_item("n", l.n)?;
    out.set_item("ell", l.ell)?;
    out.set_item("branch", l.branch.to_string())?;
    out.set_item("energy", l.energy)?;
    out.set_item("spectral", l.spectral)?;
    out.set_item("discriminant", l.discriminant)?;
    out.set_item("termination_defect", l.termination_defect)?;
    out.set_item("c1_over_c0", l.c1_over_c0)?;
    Ok(out)
}

#[pyfunction]
#[pyo3(name = "spectral_to_energy")]
fn spectral_to_energy_py(p: &PyParams, s: f64) -> PyResult<f64> {
    spectral_to_energy(SpectralParameter::new(s, p.inner.model), &p.inner).map_err(to_py)
}

#[pyfunction]
#[pyo3(name = "energy_to_spectral")]
fn energy_to_spectral_py(p: &PyParams, energy: f64) -> PyResult<f64> {
    energy_to_spectral(energy, &p.inner).map(|s| s.value).map_err(to_py)
}

/// Frobenius coefficients c_0..c_n with c_0 = 1.
#[pyfunction]
#[pyo3(signature = (p, s, n=200, variant="derived"))]
fn series(p: &PyParams, s: f64, n: usize, variant: &str) -> PyResult<Vec<f64>> {
    let d = p.inner.derive().map_err(to_py)?;
    series_coefficients(&d, SpectralParameter::new(s, p.inner.model), n, parse_variant(variant)?)
        .map(|sol| sol.coeffs)
        .map_err(to_py)
}

/// Largest normalized ODE residual of the order-n series over `points`.
#[pyfunction]
#[pyo3(signature = (p, s, points, n=200, variant="derived"))]
fn series_residual(p: &PyParams, s: f64, points: Vec<f64>, n: usize, variant: &str) -> PyResult<f64> {
    let d = p.inner.derive().map_err(to_py)?;
    let sol = series_coefficients(&d, SpectralParameter::new(s, p.inner.model), n, parse_variant(variant)?)
        .map_err(to_py)?;
    sol.residual(&points).map(|r| r.max_residual).map_err(to_py)
}

/// Closed-form n = 1 level on branch "plus" or "minus".
#[pyfunction]
fn closed_form<'py>(py: Python<'py>, p: &PyParams, branch: &str) -> PyResult<Bound<'py, PyDict>> {
    let branch: Branch = branch.parse().map_err(to_py)?;
    let level = ground_state_closed_form(&p.inner, branch).map_err(to_py)?;
    level_dict(py, &level)
}

/// Real roots of the degree-n truncation condition, ascending in energy.
#[pyfunction]
#[pyo3(signature = (p, n, variant="derived"))]
fn truncation<'py>(py: Python<'py>, p: &PyParams, n: usize, variant: &str) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let levels = truncation_solve(&p.inner, n, parse_variant(variant)?).map_err(to_py)?;
    levels.iter().map(|l| level_dict(py, l)).collect()
}

/// Lowest `n_eigs` finite-volume eigenvalues on a "flat", "outer" or "core" grid.
#[pyfunction]
#[pyo3(signature = (p, mode="flat", n_points=None, n_eigs=5, r_min=None, r_max=None))]
fn oracle(
    p: &PyParams,
    mode: &str,
    n_points: Option<usize>,
    n_eigs: usize,
    r_min: Option<f64>,
    r_max: Option<f64>,
) -> PyResult<Vec<f64>> {
    let mode: GridMode = mode.parse().map_err(to_py)?;
    let mut grid = GridSpec::default_for(&p.inner, mode);
    if let Some(n) = n_points {
        grid.n_points = n;
    }
    if let Some(r) = r_min {
        grid.r_min = r;
    }
    if let Some(r) = r_max {
        grid.r_max = r;
    }
    oracle_eigenvalues(&p.inner, &grid, n_eigs).map(|r| r.eigenvalues).map_err(to_py)
}

/// Exact spectral value of the flat limit for radial mode `n_r`.
#[pyfunction]
fn flat_exact(p: &PyParams, n_r: usize) -> PyResult<f64> {
    flat_exact_spectrum(&p.inner, n_r).map_err(to_py)
}

/// Runs the verification suite; returns the report as a JSON string.
#[pyfunction]
#[pyo3(signature = (fast=false, seed=None))]
fn verify(py: Python<'_>, fast: bool, seed: Option<u64>) -> String {
    let mut opts = VerifyOptions {
        fast,
        ..VerifyOptions::default()
    };
    if let Some(seed) = seed {
        opts.seed = seed;
    }
    py.detach(|| run_verify(&opts).to_json())
}

#[pymodule]
fn dislocation_spectra(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add_class::<PyParams>()?;
    m.add("DislocationError", py.get_type::<DislocationError>())?;
    m.add("InvalidParameterError", py.get_type::<InvalidParameterError>())?;
    m.add("NoRealLevelError", py.get_type::<NoRealLevelError>())?;
    m.add("NumericalError", py.get_type::<NumericalError>())?;
    m.add_function(wrap_pyfunction!(spectral_to_energy_py, m)?)?;
    m.add_function(wrap_pyfunction!(energy_to_spectral_py, m)?)?;
    m.add_function(wrap_pyfunction!(series, m)?)?;
    m.add_function(wrap_pyfunction!(series_residual, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(truncation, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add_function(wrap_pyfunction!(flat_exact, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
