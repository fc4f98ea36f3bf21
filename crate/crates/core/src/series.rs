//! Frobenius series of the transformed radial equations.
//!
//! With x = r^2 / beta^2 the radial equation becomes
//!
//! ```text
//! 4x psi'' + (4x - 2)/(x - 1) psi' + [s beta^2 - w^2 x - 2M gamma / x - iota^2 / (x - 1)] psi = 0
//! ```
//!
//! where `s` is Lambda (w > 0) or Theta (w = 0). The ansatz
//! `psi = x^(1/4 + j/2) exp(-w x / 2) G(x)` with `G = sum c_i x^i` turns it into a
//! three-term recurrence for the `c_i`. Two printed details of that recurrence are
//! kept selectable through [`RecurrenceVariant`] so that the residual can decide
//! between them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DerivedParams, Model, PhysicalParams, SpectralParameter};
use crate::tolerances;

/// Leading denominator of the oscillator-model recurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Denominator {
    /// `(i + 2 + j)(i + 2)`, obtained by substituting the series into the ODE.
    Derived,
    /// `(i + (3 + 2j)/2)(i + 2)` as printed for the oscillator model.
    Printed,
}

/// Which oscillator rate multiplies `x` in the transformed equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OmegaScale {
    /// `M omega0 beta^2`, the image of `M^2 omega0^2 r^2` under x = r^2 / beta^2.
    ChangeOfVariable,
    /// `M omega0 beta` as printed.
    Printed,
}

/// Selects the recurrence conventions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RecurrenceVariant {
    pub denominator: Denominator,
    pub omega_scale: OmegaScale,
    /// Flips the sign of the `c_i` term. Mutation hook for the verification suite.
    pub negate_d2: bool,
}

impl Default for RecurrenceVariant {
    fn default() -> Self {
        Self::DERIVED
    }
}

impl RecurrenceVariant {
    pub const DERIVED: Self = Self {
        denominator: Denominator::Derived,
        omega_scale: OmegaScale::ChangeOfVariable,
        negate_d2: false,
    };

    pub const PRINTED: Self = Self {
        denominator: Denominator::Printed,
        omega_scale: OmegaScale::Printed,
        negate_d2: false,
    };

    /// Derived denominator with the printed oscillator rate; the convention in which
    /// the closed-form ground state is written.
    pub const PRINTED_OMEGA: Self = Self {
        denominator: Denominator::Derived,
        omega_scale: OmegaScale::Printed,
        negate_d2: false,
    };

    pub fn omega(&self, d: &DerivedParams) -> f64 {
        match self.omega_scale {
            OmegaScale::ChangeOfVariable => d.omega_x,
            OmegaScale::Printed => d.omega,
        }
    }
}

/// `c_{i+2} = (d1 c_{i+1} + d2 c_i) / d3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceTriple {
    pub index: usize,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

fn triple_at(i: f64, d: &DerivedParams, s: SpectralParameter, v: RecurrenceVariant) -> (f64, f64, f64) {
    let j = d.j;
    let iota2 = d.iota * d.iota;
    let sb = s.value * d.beta * d.beta;
    let (d1, d2, d3) = match d.model {
        Model::OscillatorInverseSquare => {
            let w = v.omega(d);
            let d1 = (i + w + 1.5 + j) * (i + 1.0)
                - (iota2 + sb - 0.5 - j - 2.0 * w * (1.0 + j)) / 4.0;
            let d2 = -w * i + (sb - w * (3.0 + 2.0 * j)) / 4.0;
            let d3 = match v.denominator {
                Denominator::Derived => (i + 2.0 + j) * (i + 2.0),
                Denominator::Printed => (i + (3.0 + 2.0 * j) / 2.0) * (i + 2.0),
            };
            (d1, d2, d3)
        }
        Model::InverseSquareOnly => {
            let h1 = (i + j + 1.5) * (i + 1.0) - (sb + iota2 - 0.5 - j) / 4.0;
            let h2 = sb / 4.0;
            let h3 = (i + 2.0 + j) * (i + 2.0);
            (h1, h2, h3)
        }
    };
    (d1, if v.negate_d2 { -d2 } else { d2 }, d3)
}

pub fn recurrence_triple(
    i: usize,
    d: &DerivedParams,
    s: SpectralParameter,
    variant: RecurrenceVariant,
) -> Result<RecurrenceTriple> {
    s.expect_model(d.model)?;
    let (d1, d2, d3) = triple_at(i as f64, d, s, variant);
    Ok(RecurrenceTriple { index: i, d1, d2, d3 })
}

/// Seed `c_1 / c_0` from its own closed expression.
pub fn first_coefficient(d: &DerivedParams, s: SpectralParameter, variant: RecurrenceVariant) -> Result<f64> {
    s.expect_model(d.model)?;
    let j = d.j;
    let iota2 = d.iota * d.iota;
    let sb = s.value * d.beta * d.beta;
    let num = match d.model {
        Model::OscillatorInverseSquare => {
            let w = variant.omega(d);
            2.0 * w * (1.0 + j) - iota2 - sb + 0.5 + j
        }
        Model::InverseSquareOnly => j + 0.5 - sb - iota2,
    };
    Ok(num / (4.0 * (1.0 + j)))
}

/// Seed obtained instead from the recurrence at i = -1 with c_{-1} = 0.
pub fn first_coefficient_from_recurrence(
    d: &DerivedParams,
    s: SpectralParameter,
    variant: RecurrenceVariant,
) -> Result<f64> {
    s.expect_model(d.model)?;
    let (d1, _, d3) = triple_at(-1.0, d, s, variant);
    Ok(d1 / d3)
}

/// Value and first two derivatives at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub const ZERO: Jet = Jet {
        value: 0.0,
        d1: 0.0,
        d2: 0.0,
    };
}

/// Value of a differential operator together with the sum of its term magnitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorValue {
    pub value: f64,
    pub scale: f64,
}

/// Left side of the transformed equation at `x` for oscillator rate `w`.
pub fn transformed_lhs(d: &DerivedParams, s: SpectralParameter, w: f64, x: f64, f: Jet) -> OperatorValue {
    let terms = [
        4.0 * x * f.d2,
        (4.0 * x - 2.0) / (x - 1.0) * f.d1,
        s.value * d.beta * d.beta * f.value,
        -w * w * x * f.value,
        -d.two_m_gamma() / x * f.value,
        -d.iota * d.iota / (x - 1.0) * f.value,
    ];
    OperatorValue {
        value: terms.iter().sum(),
        scale: terms.iter().map(|t| t.abs()).sum(),
    }
}

/// Left side of the untransformed radial equation at `r`.
pub fn radial_lhs(p: &PhysicalParams, s: SpectralParameter, r: f64, f: Jet) -> OperatorValue {
    let b2 = p.beta * p.beta;
    let g = r * r - b2;
    let iota = p.iota();
    let mw = p.mass * p.omega0;
    let terms = [
        f.d2,
        r / g * f.d1,
        s.value * f.value,
        -mw * mw * r * r * f.value,
        -2.0 * p.mass * p.gamma / (r * r) * f.value,
        -iota * iota / g * f.value,
    ];
    OperatorValue {
        value: terms.iter().sum(),
        scale: terms.iter().map(|t| t.abs()).sum(),
    }
}

/// A Frobenius solution `x^alpha exp(-gauss x) sum c_i x^i` at fixed spectral value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesSolution {
    pub coeffs: Vec<f64>,
    pub exponent: f64,
    pub gauss_factor: f64,
    pub spectral: SpectralParameter,
    pub derived: DerivedParams,
    pub variant: RecurrenceVariant,
    /// The coefficient list is an exact polynomial rather than a truncated tail.
    pub terminating: bool,
}

/// Normalized residuals of a series solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub sample_points: Vec<f64>,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
}

pub fn series_coefficients(
    d: &DerivedParams,
    s: SpectralParameter,
    n: usize,
    variant: RecurrenceVariant,
) -> Result<SeriesSolution> {
    if n < 1 {
        return Err(Error::InvalidParameter {
            name: "N",
            reason: "truncation order must be >= 1".into(),
        });
    }
    let mut coeffs = Vec::with_capacity(n + 1);
    coeffs.push(1.0);
    coeffs.push(first_coefficient(d, s, variant)?);
    for i in 0..n.saturating_sub(1) {
        let (d1, d2, d3) = triple_at(i as f64, d, s, variant);
        let next = (d1 * coeffs[i + 1] + d2 * coeffs[i]) / d3;
        if !next.is_finite() || next.abs() > tolerances::SERIES_OVERFLOW {
            return Err(Error::DivergingSeries { index: i + 2 });
        }
        coeffs.push(next);
    }
    if coeffs[1].abs() > tolerances::SERIES_OVERFLOW || !coeffs[1].is_finite() {
        return Err(Error::DivergingSeries { index: 1 });
    }
    Ok(SeriesSolution {
        coeffs,
        exponent: d.exponent(),
        gauss_factor: 0.5 * variant.omega(d),
        spectral: s,
        derived: *d,
        variant,
        terminating: false,
    })
}

impl SeriesSolution {
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Oscillator rate of the equation this solution belongs to.
    pub fn omega(&self) -> f64 {
        2.0 * self.gauss_factor
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= factor);
        out
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        if !(x > 0.0) {
            return Err(Error::Domain { x });
        }
        if !self.terminating && x >= 1.0 {
            return Err(Error::OutsideConvergence { x });
        }
        Ok(())
    }

    /// Polynomial part and its first two derivatives.
    fn poly_jet(&self, x: f64) -> Jet {
        let (mut g, mut g1, mut g2) = (0.0, 0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            g2 = g2 * x + 2.0 * g1;
            g1 = g1 * x + g;
            g = g * x + c;
        }
        Jet {
            value: g,
            d1: g1,
            d2: g2,
        }
    }

    /// psi and its analytic x-derivatives.
    pub fn eval(&self, x: f64) -> Result<Jet> {
        self.check_domain(x)?;
        let a = self.exponent;
        let f = x.powf(a) * (-self.gauss_factor * x).exp();
        let l = a / x - self.gauss_factor;
        let f1 = f * l;
        let f2 = f * (l * l - a / (x * x));
        let g = self.poly_jet(x);
        Ok(Jet {
            value: f * g.value,
            d1: f1 * g.value + f * g.d1,
            d2: f2 * g.value + 2.0 * f1 * g.d1 + f * g.d2,
        })
    }

    pub fn psi(&self, x: f64) -> Result<f64> {
        Ok(self.eval(x)?.value)
    }

    /// Unnormalized left side of the transformed ODE at `x`.
    pub fn raw_residual(&self, x: f64) -> Result<f64> {
        let jet = self.eval(x)?;
        Ok(transformed_lhs(&self.derived, self.spectral, self.omega(), x, jet).value)
    }

    pub fn residual(&self, points: &[f64]) -> Result<ResidualReport> {
        series_residual(self, points)
    }
}

pub fn series_residual(sol: &SeriesSolution, points: &[f64]) -> Result<ResidualReport> {
    let (lo, hi) = (tolerances::RESIDUAL_EDGE, 1.0 - tolerances::RESIDUAL_EDGE);
    let mut residuals = Vec::with_capacity(points.len());
    for &x in points {
        if !(lo..=hi).contains(&x) {
            return Err(Error::PointOutOfDomain { x, lo, hi });
        }
        let jet = sol.eval(x)?;
        let lhs = transformed_lhs(&sol.derived, sol.spectral, sol.omega(), x, jet);
        residuals.push(lhs.value.abs() / jet.value.abs().max(1.0));
    }
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    Ok(ResidualReport {
        sample_points: points.to_vec(),
        residuals,
        max_residual,
    })
}

/// Radial probe with analytic derivatives in `r`.
pub trait RadialProbe {
    fn jet(&self, r: f64) -> Jet;
}

impl<F: Fn(f64) -> Jet> RadialProbe for F {
    fn jet(&self, r: f64) -> Jet {
        self(r)
    }
}

/// `exp(-a r^2)`.
#[derive(Debug, Clone, Copy)]
pub struct GaussianProbe(pub f64);

impl RadialProbe for GaussianProbe {
    fn jet(&self, r: f64) -> Jet {
        let a = self.0;
        let f = (-a * r * r).exp();
        Jet {
            value: f,
            d1: -2.0 * a * r * f,
            d2: (4.0 * a * a * r * r - 2.0 * a) * f,
        }
    }
}

/// `r^m exp(-c r^2)`.
#[derive(Debug, Clone, Copy)]
pub struct PowerGaussianProbe {
    pub power: f64,
    pub width: f64,
}

impl RadialProbe for PowerGaussianProbe {
    fn jet(&self, r: f64) -> Jet {
        let (m, c) = (self.power, self.width);
        let f = r.powf(m) * (-c * r * r).exp();
        let g = m / r - 2.0 * c * r;
        let dg = -m / (r * r) - 2.0 * c;
        Jet {
            value: f,
            d1: g * f,
            d2: (g * g + dg) * f,
        }
    }
}

/// `sin(q r + phase)`.
#[derive(Debug, Clone, Copy)]
pub struct SineProbe {
    pub wavenumber: f64,
    pub phase: f64,
}

impl RadialProbe for SineProbe {
    fn jet(&self, r: f64) -> Jet {
        let q = self.wavenumber;
        let (s, c) = (q * r + self.phase).sin_cos();
        Jet {
            value: s,
            d1: q * c,
            d2: -q * q * s,
        }
    }
}

/// Compares the radial equation with the transformed one at x = r^2 / beta^2.
///
/// Returns `|radial - transformed / beta^2|` divided by the larger term scale
/// (at least 1). The two coincide exactly when the oscillator rate of the
/// transformed form is the change-of-variable value.
pub fn changeofvar_consistency<P: RadialProbe + ?Sized>(
    p: &PhysicalParams,
    s: SpectralParameter,
    r: f64,
    probe: &P,
    scale: OmegaScale,
) -> Result<f64> {
    let d = p.derive()?;
    s.expect_model(p.model)?;
    if !(r > 0.0) {
        return Err(Error::Domain { x: r });
    }
    let b2 = p.beta * p.beta;
    if (r * r - b2).abs() <= 1e-14 * b2 {
        return Err(Error::SingularPoint { r });
    }
    let f = probe.jet(r);
    let radial = radial_lhs(p, s, r, f);

    let x = r * r / b2;
    // d/dx = (beta^2 / 2r) d/dr
    let phi = Jet {
        value: f.value,
        d1: f.d1 * b2 / (2.0 * r),
        d2: b2 * b2 / (4.0 * r * r) * (f.d2 - f.d1 / r),
    };
    let w = match scale {
        OmegaScale::ChangeOfVariable => d.omega_x,
        OmegaScale::Printed => d.omega,
    };
    let transformed = transformed_lhs(&d, s, w, x, phi);
    let norm = radial.scale.max(transformed.scale / b2).max(1.0);
    Ok((radial.value - transformed.value / b2).abs() / norm)
}
