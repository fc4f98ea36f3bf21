//! Physical parameters, composite symbols and the energy/spectral maps.
//!
//! Natural units (hbar = c = 1). The flux enters only as the dimensionless
//! ratio `flux = Phi_AB / Phi_0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which radial problem is being solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Model {
    /// Harmonic oscillator plus `gamma / r^2 + delta`.
    OscillatorInverseSquare,
    /// Pure `gamma / r^2`, no oscillator and no offset.
    InverseSquareOnly,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::OscillatorInverseSquare => "oscillator",
            Model::InverseSquareOnly => "inverse-square",
        }
    }
}

/// Raw inputs of the problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub mass: f64,
    /// Oscillator frequency omega_0.
    pub omega0: f64,
    /// Inverse-square strength.
    pub gamma: f64,
    /// Constant potential offset.
    pub delta: f64,
    /// Screw-dislocation parameter, 0 < beta < 1.
    pub beta: f64,
    /// Angular speed Omega of the rotating frame.
    pub rotation: f64,
    /// Dimensionless flux ratio.
    pub flux: f64,
    /// Longitudinal wavenumber.
    pub k: f64,
    /// Angular quantum number.
    pub ell: i64,
    pub model: Model,
}

/// Non-fatal remarks about a parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamWarning {
    /// The flux ratio is negative; accepted, but outside the physically quoted range.
    NegativeFlux,
}

impl PhysicalParams {
    /// Oscillator-plus-inverse-square parameters with zero flux, rotation and offset.
    pub fn oscillator(mass: f64, omega0: f64, gamma: f64, beta: f64, k: f64, ell: i64) -> Self {
        Self {
            mass,
            omega0,
            gamma,
            delta: 0.0,
            beta,
            rotation: 0.0,
            flux: 0.0,
            k,
            ell,
            model: Model::OscillatorInverseSquare,
        }
    }

    /// Inverse-square-only parameters; `omega0` and `delta` are pinned to zero.
    pub fn inverse_square(mass: f64, gamma: f64, beta: f64, k: f64, ell: i64) -> Self {
        Self {
            mass,
            omega0: 0.0,
            gamma,
            delta: 0.0,
            beta,
            rotation: 0.0,
            flux: 0.0,
            k,
            ell,
            model: Model::InverseSquareOnly,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason: &str| {
            Err(Error::InvalidParameter {
                name,
                reason: reason.to_string(),
            })
        };
        let finite = [
            ("mass", self.mass),
            ("omega0", self.omega0),
            ("gamma", self.gamma),
            ("delta", self.delta),
            ("beta", self.beta),
            ("Omega", self.rotation),
            ("flux", self.flux),
            ("k", self.k),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return bad(name, "must be finite");
            }
        }
        if self.mass <= 0.0 {
            return bad("mass", "must be > 0");
        }
        if self.k <= 0.0 {
            return bad("k", "must be > 0");
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return bad("beta", "must lie in the open interval (0, 1)");
        }
        if self.gamma < 0.0 {
            return bad("gamma", "must be >= 0 (attractive inverse-square is not supported)");
        }
        match self.model {
            Model::OscillatorInverseSquare => {
                if self.omega0 <= 0.0 {
                    return bad("omega0", "oscillator model requires omega0 > 0");
                }
            }
            Model::InverseSquareOnly => {
                if self.omega0 != 0.0 {
                    return bad("omega0", "inverse-square model requires omega0 = 0");
                }
                if self.delta != 0.0 {
                    return bad("delta", "inverse-square model requires delta = 0");
                }
            }
        }
        Ok(())
    }

    pub fn warnings(&self) -> Vec<ParamWarning> {
        let mut w = Vec::new();
        if self.flux < 0.0 {
            w.push(ParamWarning::NegativeFlux);
        }
        w
    }

    /// Effective angular momentum `ell - flux - beta k`.
    pub fn iota(&self) -> f64 {
        self.ell as f64 - self.flux - self.beta * self.k
    }

    pub fn derive(&self) -> Result<DerivedParams> {
        self.validate()?;
        let omega = match self.model {
            Model::OscillatorInverseSquare => self.mass * self.omega0 * self.beta,
            Model::InverseSquareOnly => 0.0,
        };
        Ok(DerivedParams {
            iota: self.iota(),
            omega,
            omega_x: omega * self.beta,
            j: (2.0 * self.mass * self.gamma + 0.25).sqrt(),
            beta: self.beta,
            model: self.model,
        })
    }

    pub fn with_flux(mut self, flux: f64) -> Self {
        self.flux = flux;
        self
    }

    pub fn with_ell(mut self, ell: i64) -> Self {
        self.ell = ell;
        self
    }

    pub fn with_rotation(mut self, rotation: f64) -> Self {
        self.rotation = rotation;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }
}

/// Composite symbols of the radial problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    /// `ell - flux - beta k`.
    pub iota: f64,
    /// `M omega0 beta`, the Gaussian rate as printed alongside the x-equation.
    pub omega: f64,
    /// `M omega0 beta^2`, the oscillator rate that the substitution x = r^2 / beta^2
    /// actually produces.
    pub omega_x: f64,
    /// `sqrt(2 M gamma + 1/4)`.
    pub j: f64,
    pub beta: f64,
    pub model: Model,
}

impl DerivedParams {
    /// `2 M gamma`, recovered from `j`.
    pub fn two_m_gamma(&self) -> f64 {
        self.j * self.j - 0.25
    }

    /// Frobenius exponent `1/4 + j/2`.
    pub fn exponent(&self) -> f64 {
        0.25 + 0.5 * self.j
    }
}

/// Lambda (oscillator model) or Theta (inverse-square model), tagged by model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralParameter {
    pub value: f64,
    pub model: Model,
}

impl SpectralParameter {
    pub fn new(value: f64, model: Model) -> Self {
        Self { value, model }
    }

    pub fn expect_model(&self, model: Model) -> Result<()> {
        if self.model != model {
            return Err(Error::ModelMismatch {
                expected: model,
                found: self.model,
            });
        }
        if !self.value.is_finite() {
            return Err(Error::InvalidParameter {
                name: "spectral",
                reason: "must be finite".into(),
            });
        }
        Ok(())
    }
}

/// E = (s + k^2) / 2M + delta - Omega iota (delta = 0 for the inverse-square model).
pub fn spectral_to_energy(s: SpectralParameter, p: &PhysicalParams) -> Result<f64> {
    p.validate()?;
    s.expect_model(p.model)?;
    Ok((s.value + p.k * p.k) / (2.0 * p.mass) + p.delta - p.rotation * p.iota())
}

/// s = 2M (E + Omega iota - delta) - k^2.
pub fn energy_to_spectral(energy: f64, p: &PhysicalParams) -> Result<SpectralParameter> {
    p.validate()?;
    if !energy.is_finite() {
        return Err(Error::InvalidParameter {
            name: "energy",
            reason: "must be finite".into(),
        });
    }
    let value = 2.0 * p.mass * (energy + p.rotation * p.iota() - p.delta) - p.k * p.k;
    Ok(SpectralParameter::new(value, p.model))
}
