//! Finite-volume eigensolver for the untransformed radial equation, the exact
//! flat-space spectrum used to validate it, and a numerical separation check of
//! the three-dimensional operator.
//!
//! The radial equation
//!
//! ```text
//! psi'' + r/(r^2 - beta^2) psi' + [s - V(r)] psi = 0,
//! V(r) = M^2 omega0^2 r^2 + 2 M gamma / r^2 + iota^2 / (r^2 - beta^2)
//! ```
//!
//! is written in flux form `-(1/w)(w psi')' + V psi = s psi` with weight
//! `w = sqrt|r^2 - beta^2|` (`w = r` when beta is dropped) and discretized on
//! cell centres. Faces where the weight vanishes get the natural zero-flux
//! condition; the other end is Dirichlet.

use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{energy_to_spectral, Model, PhysicalParams};
use crate::series::RadialProbe;
use crate::spectrum::{ground_state_pair, truncation_solve, EnergyLevel};
use crate::series::RecurrenceVariant;
use crate::tolerances;
use crate::tridiag;

/// Radial domain relative to the metric-degenerate circle r = beta.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GridMode {
    /// (beta + eps, r_max).
    Outer,
    /// (eps, beta - eps).
    Core,
    /// beta dropped; (eps, r_max).
    Flat,
}

impl GridMode {
    pub fn name(self) -> &'static str {
        match self {
            GridMode::Outer => "outer",
            GridMode::Core => "core",
            GridMode::Flat => "flat",
        }
    }
}

impl std::str::FromStr for GridMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "outer" => Ok(GridMode::Outer),
            "core" => Ok(GridMode::Core),
            "flat" => Ok(GridMode::Flat),
            other => Err(Error::InvalidGrid(format!("unknown mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub n_points: usize,
    pub mode: GridMode,
}

impl GridSpec {
    /// Default grid for a mode.
    pub fn default_for(p: &PhysicalParams, mode: GridMode) -> Self {
        let eps = tolerances::ORACLE_EPSILON;
        let far = if p.model == Model::OscillatorInverseSquare && p.omega0 > 0.0 {
            (6.0 / (p.mass * p.omega0).sqrt()).max(10.0)
        } else {
            40.0
        };
        let (r_min, r_max) = match mode {
            GridMode::Outer => (p.beta + eps, far),
            GridMode::Core => (eps, p.beta - eps),
            GridMode::Flat => (eps, far),
        };
        Self {
            r_min,
            r_max,
            n_points: tolerances::ORACLE_POINTS,
            mode,
        }
    }

    pub fn with_points(mut self, n_points: usize) -> Self {
        self.n_points = n_points;
        self
    }

    pub fn with_r_max(mut self, r_max: f64) -> Self {
        self.r_max = r_max;
        self
    }

    pub fn validate(&self, beta: f64) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidGrid(m));
        if !(self.r_min.is_finite() && self.r_max.is_finite()) {
            return bad("non-finite bounds".into());
        }
        if self.r_min <= 0.0 {
            return bad(format!("r_min = {} must be positive", self.r_min));
        }
        if self.r_min >= self.r_max {
            return bad(format!("r_min = {} must be below r_max = {}", self.r_min, self.r_max));
        }
        if self.n_points < 100 {
            return bad(format!("n_points = {} is below 100", self.n_points));
        }
        match self.mode {
            GridMode::Outer if self.r_min <= beta => {
                bad(format!("outer mode needs r_min > beta = {beta}, got {}", self.r_min))
            }
            GridMode::Core if self.r_max >= beta => {
                bad(format!("core mode needs r_max < beta = {beta}, got {}", self.r_max))
            }
            _ => Ok(()),
        }
    }
}

/// How the radial operator is turned into a symmetric tridiagonal matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Discretization {
    /// Cell-centred flux form with natural conditions at vanishing weight.
    FluxForm,
    /// Vertex grid on `-u'' + U u` after the Liouville substitution, Dirichlet ends.
    Liouville,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub eigenvalues: Vec<f64>,
    pub grid: GridSpec,
    pub residual_norms: Vec<f64>,
    pub discretization: Discretization,
    #[serde(skip)]
    pub nodes: Vec<f64>,
    /// Eigenfunctions of the original radial equation at `nodes`.
    #[serde(skip)]
    pub eigenfunctions: Vec<Vec<f64>>,
}

/// Weight and potential, with beta dropped in flat mode.
struct RadialCoefficients {
    beta2: f64,
    iota2: f64,
    mw2: f64,
    two_m_gamma: f64,
    flat: bool,
}

impl RadialCoefficients {
    fn new(p: &PhysicalParams, mode: GridMode) -> Self {
        let flat = mode == GridMode::Flat;
        let iota = if flat { p.ell as f64 - p.flux } else { p.iota() };
        let mw = match p.model {
            Model::OscillatorInverseSquare => p.mass * p.omega0,
            Model::InverseSquareOnly => 0.0,
        };
        Self {
            beta2: if flat { 0.0 } else { p.beta * p.beta },
            iota2: iota * iota,
            mw2: mw * mw,
            two_m_gamma: 2.0 * p.mass * p.gamma,
            flat,
        }
    }

    fn weight(&self, r: f64) -> f64 {
        if self.flat {
            r
        } else {
            (r * r - self.beta2).abs().sqrt()
        }
    }

    fn potential(&self, r: f64) -> f64 {
        let r2 = r * r;
        self.mw2 * r2 + self.two_m_gamma / r2 + self.iota2 / (r2 - self.beta2)
    }

    fn liouville(&self, r: f64) -> f64 {
        let g = r * r - self.beta2;
        self.potential(r) - (r * r + 2.0 * self.beta2) / (4.0 * g * g)
    }
}

/// Potential of the symmetrized equation `-u'' + U u = s u`, u = |r^2 - beta^2|^(1/4) psi.
pub fn effective_potential(r: f64, p: &PhysicalParams) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain { x: r });
    }
    let b2 = p.beta * p.beta;
    if (r * r - b2).abs() <= 1e-14 * b2 {
        return Err(Error::SingularPoint { r });
    }
    let c = RadialCoefficients::new(p, GridMode::Outer);
    Ok(c.liouville(r))
}

/// Lowest `n_eigs` spectral values on a grid, flux-form discretization.
pub fn oracle_eigenvalues(p: &PhysicalParams, g: &GridSpec, n_eigs: usize) -> Result<OracleResult> {
    oracle_eigenvalues_with(p, g, n_eigs, Discretization::FluxForm)
}

pub fn oracle_eigenvalues_with(
    p: &PhysicalParams,
    g: &GridSpec,
    n_eigs: usize,
    method: Discretization,
) -> Result<OracleResult> {
    p.validate()?;
    g.validate(p.beta)?;
    if n_eigs == 0 || n_eigs > g.n_points {
        return Err(Error::InvalidParameter {
            name: "n_eigs",
            reason: format!("must lie in 1..={}", g.n_points),
        });
    }
    let c = RadialCoefficients::new(p, g.mode);
    let system = match method {
        Discretization::FluxForm => flux_form(&c, g),
        Discretization::Liouville => liouville_form(&c, g),
    };

    let eigenvalues = tridiag::lowest_eigenvalues(&system.diag, &system.off, n_eigs);
    if eigenvalues.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::GridTooCoarse(format!("eigenvalues not strictly ascending: {eigenvalues:?}")));
    }

    let mut residual_norms = Vec::with_capacity(n_eigs);
    let mut eigenfunctions = Vec::with_capacity(n_eigs);
    for (k, &lambda) in eigenvalues.iter().enumerate() {
        let local = system
            .potential
            .iter()
            .map(|&v| system.h * (lambda - v).max(0.0).sqrt())
            .fold(0.0f64, f64::max);
        if local > tolerances::ORACLE_RESOLUTION {
            return Err(Error::GridTooCoarse(format!(
                "eigenvalue {k}: h * local wavenumber = {local:.3} exceeds {}",
                tolerances::ORACLE_RESOLUTION
            )));
        }
        let v = tridiag::eigenvector(&system.diag, &system.off, lambda);
        let y: Vec<f64> = v.iter().zip(&system.b).map(|(x, b)| x / b.sqrt()).collect();
        let res = system.residual(&y, lambda);
        let psi: Vec<f64> = y.iter().zip(&system.back).map(|(x, b)| x * b).collect();
        if !(res <= tolerances::ORACLE_RESIDUAL) {
            return Err(Error::GridTooCoarse(format!(
                "eigenvalue {k}: residual {res:e} exceeds {}",
                tolerances::ORACLE_RESIDUAL
            )));
        }
        residual_norms.push(res);
        eigenfunctions.push(psi);
    }

    Ok(OracleResult {
        eigenvalues,
        grid: *g,
        residual_norms,
        discretization: method,
        nodes: system.nodes,
        eigenfunctions,
    })
}

/// `A psi = lambda B psi` with tridiagonal `A`, diagonal `B`, and its
/// symmetric reduction.
struct DiscreteSystem {
    h: f64,
    nodes: Vec<f64>,
    a_diag: Vec<f64>,
    a_off: Vec<f64>,
    b: Vec<f64>,
    diag: Vec<f64>,
    off: Vec<f64>,
    /// Maps a solution of the generalized problem to psi.
    back: Vec<f64>,
    /// Potential sampled at the nodes, for the resolution check.
    potential: Vec<f64>,
}

impl DiscreteSystem {
    fn from_generalized(h: f64, nodes: Vec<f64>, a_diag: Vec<f64>, a_off: Vec<f64>, b: Vec<f64>, back: Vec<f64>, potential: Vec<f64>) -> Self {
        let diag = a_diag.iter().zip(&b).map(|(a, w)| a / w).collect();
        let off = a_off
            .iter()
            .enumerate()
            .map(|(i, a)| a / (b[i] * b[i + 1]).sqrt())
            .collect();
        Self {
            h,
            nodes,
            a_diag,
            a_off,
            b,
            diag,
            off,
            back,
            potential,
        }
    }

    /// `|(A - lambda B) psi| / (|A psi| + |lambda| |B psi|)`.
    fn residual(&self, psi: &[f64], lambda: f64) -> f64 {
        let a_psi = tridiag::apply(&self.a_diag, &self.a_off, psi);
        let b_psi: Vec<f64> = psi.iter().zip(&self.b).map(|(x, w)| x * w).collect();
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let diff: Vec<f64> = a_psi.iter().zip(&b_psi).map(|(a, b)| a - lambda * b).collect();
        norm(&diff) / (norm(&a_psi) + lambda.abs() * norm(&b_psi))
    }
}

fn flux_form(c: &RadialCoefficients, g: &GridSpec) -> DiscreteSystem {
    let n = g.n_points;
    let h = (g.r_max - g.r_min) / n as f64;
    let faces: Vec<f64> = (0..=n).map(|i| c.weight(g.r_min + i as f64 * h)).collect();
    let nodes: Vec<f64> = (0..n).map(|i| g.r_min + (i as f64 + 0.5) * h).collect();
    let weights: Vec<f64> = nodes.iter().map(|&r| c.weight(r)).collect();
    let potential: Vec<f64> = nodes.iter().map(|&r| c.potential(r)).collect();
    let h2 = h * h;

    // natural condition where the weight vanishes, Dirichlet (ghost cell) elsewhere
    let (left_natural, right_natural) = match g.mode {
        GridMode::Outer | GridMode::Flat => (true, false),
        GridMode::Core => (false, true),
    };
    let left = if left_natural { 0.0 } else { 2.0 * faces[0] };
    let right = if right_natural { 0.0 } else { 2.0 * faces[n] };

    let a_diag: Vec<f64> = (0..n)
        .map(|i| {
            let lo = if i == 0 { left } else { faces[i] };
            let hi = if i + 1 == n { right } else { faces[i + 1] };
            (lo + hi) / h2 + weights[i] * potential[i]
        })
        .collect();
    let a_off: Vec<f64> = (1..n).map(|i| -faces[i] / h2).collect();
    DiscreteSystem::from_generalized(h, nodes, a_diag, a_off, weights, vec![1.0; n], potential)
}

fn liouville_form(c: &RadialCoefficients, g: &GridSpec) -> DiscreteSystem {
    let n = g.n_points;
    let h = (g.r_max - g.r_min) / (n as f64 + 1.0);
    let nodes: Vec<f64> = (1..=n).map(|i| g.r_min + i as f64 * h).collect();
    let potential: Vec<f64> = nodes.iter().map(|&r| c.liouville(r)).collect();
    let h2 = h * h;
    let a_diag = potential.iter().map(|u| 2.0 / h2 + u).collect();
    let a_off = vec![-1.0 / h2; n - 1];
    let back = nodes.iter().map(|&r| 1.0 / c.weight(r).sqrt()).collect();
    DiscreteSystem::from_generalized(h, nodes, a_diag, a_off, vec![1.0; n], back, potential)
}

/// `2 M omega0 (2 n_r + 1 + sqrt((ell - flux)^2 + 2 M gamma))`.
pub fn flat_exact_spectrum(p: &PhysicalParams, n_r: usize) -> Result<f64> {
    if p.model != Model::OscillatorInverseSquare || !(p.omega0 > 0.0) {
        return Err(Error::InvalidParameter {
            name: "omega0",
            reason: "the flat reference spectrum needs an oscillator with omega0 > 0".into(),
        });
    }
    let m = p.ell as f64 - p.flux;
    let s = (m * m + 2.0 * p.mass * p.gamma).sqrt();
    Ok(2.0 * p.mass * p.omega0 * (2.0 * n_r as f64 + 1.0 + s))
}

/// Which three-dimensional operator is compared with the radial equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeparationForm {
    /// Laplace-Beltrami operator built from the metric components.
    MetricLaplacian,
    /// The reduced operator with only the angular block written out; lacks the
    /// longitudinal second derivative and so misses `-k^2`.
    PrintedReduced,
}

/// `(E - H) Psi` times `2M`, divided by the phase, for `Psi = e^{i ell phi} e^{i k z} psi(r)`.
fn three_d_operator<P: RadialProbe + ?Sized>(
    p: &PhysicalParams,
    probe: &P,
    energy: f64,
    r: f64,
    phi: f64,
    z: f64,
    form: SeparationForm,
) -> (Complex64, f64) {
    let i = Complex64::i();
    let f = probe.jet(r);
    let phase = (i * (p.ell as f64 * phi + p.k * z)).exp();
    // gauge-covariant derivatives acting on the phase
    let d_phi = i * (p.ell as f64 - p.flux);
    let d_z = i * p.k;

    let mut terms: Vec<Complex64> = Vec::new();
    match form {
        SeparationForm::MetricLaplacian => {
            let b = p.beta;
            let metric = Matrix3::new(1.0, 0.0, 0.0, 0.0, r * r, b, 0.0, b, 1.0);
            let dmetric = Matrix3::new(0.0, 0.0, 0.0, 0.0, 2.0 * r, 0.0, 0.0, 0.0, 0.0);
            let inv = metric.try_inverse().expect("metric invertible off r = beta");
            let det = metric.determinant();
            // d ln sqrt|det| / dr = tr(g^-1 dg) / 2
            let dlog_sqrt = 0.5 * (inv * dmetric).trace();
            let grr = inv[(0, 0)];
            let dgrr = -(inv * dmetric * inv)[(0, 0)];
            debug_assert!(det != 0.0);
            terms.push(Complex64::from(grr * f.d2));
            terms.push(Complex64::from((dgrr + grr * dlog_sqrt) * f.d1));
            let ang = [d_phi, d_z];
            for a in 0..2 {
                for c in 0..2 {
                    terms.push(inv[(a + 1, c + 1)] * ang[a] * ang[c] * f.value);
                }
            }
        }
        SeparationForm::PrintedReduced => {
            let g = r * r - p.beta * p.beta;
            let cov = d_phi - p.beta * d_z;
            terms.push(Complex64::from(f.d2));
            terms.push(Complex64::from(r / g * f.d1));
            terms.push(cov * cov / g * f.value);
        }
    }
    let m = p.mass;
    // rotation term: -Omega L_z with L_z = -i (d_phi - i flux - beta d_z)
    let lz = -i * (d_phi - p.beta * d_z);
    terms.push(2.0 * m * p.rotation * lz * f.value);
    let potential = match p.model {
        Model::OscillatorInverseSquare => {
            0.5 * m * p.omega0 * p.omega0 * r * r + p.gamma / (r * r) + p.delta
        }
        Model::InverseSquareOnly => p.gamma / (r * r),
    };
    terms.push(Complex64::from(-2.0 * m * potential * f.value));
    terms.push(Complex64::from(2.0 * m * energy * f.value));

    let scale = terms.iter().map(|t| t.norm()).sum();
    let total: Complex64 = terms.iter().sum();
    (total * phase, scale)
}

/// Normalized `|3D operator on Psi - phase * radial operator on psi|`.
///
/// The spectral parameter of the radial side is obtained from `energy`
/// through the linear energy map, so any energy can be used.
#[allow(clippy::too_many_arguments)]
pub fn separation_residual<P: RadialProbe + ?Sized>(
    p: &PhysicalParams,
    probe: &P,
    energy: f64,
    r: f64,
    phi: f64,
    z: f64,
    form: SeparationForm,
) -> Result<f64> {
    p.validate()?;
    if !(r > 0.0) {
        return Err(Error::Domain { x: r });
    }
    let b2 = p.beta * p.beta;
    if (r * r - b2).abs() <= 1e-12 * b2 {
        return Err(Error::SingularPoint { r });
    }
    let s = energy_to_spectral(energy, p)?;
    let (full, full_scale) = three_d_operator(p, probe, energy, r, phi, z, form);
    let radial = crate::series::radial_lhs(p, s, r, probe.jet(r));
    let phase = (Complex64::i() * (p.ell as f64 * phi + p.k * z)).exp();
    let diff = full - phase * radial.value;
    Ok(diff.norm() / full_scale.max(radial.scale).max(1.0))
}

/// One spectral value paired with the closest oracle eigenvalue.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NearestMatch {
    pub source: String,
    pub spectral: f64,
    pub nearest_oracle: f64,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleSection {
    pub mode: GridMode,
    pub grid: GridSpec,
    pub eigenvalues: Vec<f64>,
    /// Exact flat-space values, present in flat mode only.
    pub exact: Option<Vec<f64>>,
    pub nearest: Vec<NearestMatch>,
}

/// Diagnostic juxtaposition of the n = 1 levels with oracle spectra. Carries no verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleComparison {
    pub closed_form: Vec<EnergyLevel>,
    pub closed_form_note: Option<String>,
    pub truncation: Vec<EnergyLevel>,
    pub sections: Vec<OracleSection>,
}

pub fn oracle_vs_closed_form_report(p: &PhysicalParams, n_points: usize, n_eigs: usize) -> Result<OracleComparison> {
    let (closed_form, closed_form_note) = match ground_state_pair(p) {
        Ok(pair) => (pair.to_vec(), None),
        Err(e @ Error::NegativeDiscriminant { .. }) => (Vec::new(), Some(e.to_string())),
        Err(e) => return Err(e),
    };
    let truncation = truncation_solve(p, 1, RecurrenceVariant::DERIVED)?;

    let mut modes = vec![GridMode::Core, GridMode::Outer];
    if p.model == Model::OscillatorInverseSquare {
        modes.push(GridMode::Flat);
    }
    let mut sections = Vec::new();
    for mode in modes {
        let grid = GridSpec::default_for(p, mode).with_points(n_points);
        let res = oracle_eigenvalues(p, &grid, n_eigs)?;
        let exact = (mode == GridMode::Flat)
            .then(|| (0..n_eigs).map(|n| flat_exact_spectrum(p, n)).collect::<Result<Vec<_>>>())
            .transpose()?;
        let labelled = closed_form
            .iter()
            .map(|l| (format!("closed-form {}", l.branch), l.spectral))
            .chain(truncation.iter().map(|l| (format!("truncation {}", l.branch), l.spectral)));
        let nearest = labelled
            .map(|(source, spectral)| {
                let nearest_oracle = res
                    .eigenvalues
                    .iter()
                    .copied()
                    .min_by(|a, b| (a - spectral).abs().total_cmp(&(b - spectral).abs()))
                    .unwrap_or(f64::NAN);
                NearestMatch {
                    source,
                    spectral,
                    nearest_oracle,
                    distance: (nearest_oracle - spectral).abs(),
                }
            })
            .collect();
        sections.push(OracleSection {
            mode,
            grid,
            eigenvalues: res.eigenvalues,
            exact,
            nearest,
        });
    }
    Ok(OracleComparison {
        closed_form,
        closed_form_note,
        truncation,
        sections,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{GaussianProbe, Jet, PowerGaussianProbe};

    fn flat(gamma: f64, m: i64) -> PhysicalParams {
        PhysicalParams::oscillator(1.0, 1.0, gamma, 0.5, 1.0, m)
    }

    #[test]
    fn potential_flat_limit_and_far_field() {
        // tiny beta approaches the 2D symmetrized form
        let mut p = PhysicalParams::oscillator(1.0, 1.0, 0.0, 1e-7, 1.0, 2);
        p.flux = 0.0;
        let iota = p.iota();
        for r in [0.3, 1.0, 2.5] {
            let u = effective_potential(r, &p).unwrap();
            let expect = r * r + (iota * iota - 0.25) / (r * r);
            assert!((u - expect).abs() < 1e-9 * expect.abs().max(1.0), "{u} vs {expect}");
        }
        let q = PhysicalParams::inverse_square(1.0, 0.0, 0.3, 1.0, 3);
        let r = 1e4;
        let u = effective_potential(r, &q).unwrap();
        // the symmetrization adds -1/4 to the far-field coefficient
        assert!((u * r * r - (q.iota().powi(2) - 0.25)).abs() < 1e-6);
        assert!(matches!(effective_potential(0.3, &q), Err(Error::SingularPoint { .. })));
    }

    #[test]
    fn liouville_correction_rederived() {
        // p = r/(r^2 - b^2); correction p^2/4 + p'/2 must equal -(r^2 + 2 b^2)/(4 (r^2 - b^2)^2)
        let b = 0.6f64;
        for r in [0.1, 0.4, 0.7, 1.3, 4.0] {
            let pf = |r: f64| r / (r * r - b * b);
            let h = 1e-5 * r;
            let dp = (pf(r + h) - pf(r - h)) / (2.0 * h);
            let from_p = pf(r).powi(2) / 4.0 + dp / 2.0;
            let printed = -(r * r + 2.0 * b * b) / (4.0 * (r * r - b * b).powi(2));
            // U = V + p^2/4 + p'/2
            assert!((from_p - printed).abs() < 1e-7 * printed.abs(), "r={r}");
        }
    }

    #[test]
    fn flat_exact_examples() {
        let p = flat(0.0, 0);
        assert_eq!(flat_exact_spectrum(&p, 0).unwrap(), 2.0);
        assert_eq!(flat_exact_spectrum(&flat(0.0, 2), 1).unwrap(), 10.0);
        let q = p.with_ell(3).with_flux(0.4);
        let r = q.with_ell(4).with_flux(1.4);
        assert_eq!(flat_exact_spectrum(&q, 2).unwrap(), flat_exact_spectrum(&r, 2).unwrap());
        let inv = PhysicalParams::inverse_square(1.0, 0.1, 0.5, 1.0, 0);
        assert!(flat_exact_spectrum(&inv, 0).is_err());
    }

    #[test]
    fn flat_ground_state() {
        let p = flat(0.0, 0);
        let g = GridSpec::default_for(&p, GridMode::Flat);
        let res = oracle_eigenvalues(&p, &g, 5).unwrap();
        assert!((res.eigenvalues[0] - 2.0).abs() / 2.0 < tolerances::ORACLE_FLAT_RELATIVE);
        assert!(res.residual_norms.iter().all(|&r| r <= tolerances::ORACLE_RESIDUAL));
        for (n, lam) in res.eigenvalues.iter().enumerate() {
            let exact = flat_exact_spectrum(&p, n).unwrap();
            assert!((lam - exact).abs() / exact < tolerances::ORACLE_FLAT_RELATIVE);
        }
    }

    #[test]
    fn flat_spectrum_even_in_angular_number() {
        let g = GridSpec::default_for(&flat(0.0, 2), GridMode::Flat).with_points(1000);
        let a = oracle_eigenvalues(&flat(0.0, 2), &g, 5).unwrap();
        let b = oracle_eigenvalues(&flat(0.0, -2), &g, 5).unwrap();
        assert_eq!(a.eigenvalues, b.eigenvalues);
    }

    #[test]
    fn second_order_convergence() {
        for (gamma, m) in [(0.0, 0), (0.5, 1)] {
            let p = flat(gamma, m);
            let g = GridSpec::default_for(&p, GridMode::Flat).with_points(2000);
            let coarse = oracle_eigenvalues(&p, &g, 3).unwrap();
            let fine = oracle_eigenvalues(&p, &g.with_points(4000), 3).unwrap();
            for n in 0..3 {
                let exact = flat_exact_spectrum(&p, n).unwrap();
                let ratio = (coarse.eigenvalues[n] - exact).abs() / (fine.eigenvalues[n] - exact).abs();
                let (lo, hi) = tolerances::ORACLE_CONVERGENCE_RATIO;
                assert!(ratio > lo && ratio < hi, "gamma={gamma} m={m} n={n}: ratio {ratio}");
            }
        }
    }

    #[test]
    fn liouville_agrees_away_from_zero_angular_number() {
        let p = flat(0.0, 2);
        let g = GridSpec::default_for(&p, GridMode::Flat);
        let res = oracle_eigenvalues_with(&p, &g, 3, Discretization::Liouville).unwrap();
        for (n, lam) in res.eigenvalues.iter().enumerate() {
            let exact = flat_exact_spectrum(&p, n).unwrap();
            assert!((lam - exact).abs() / exact < tolerances::ORACLE_FLAT_RELATIVE, "{lam} vs {exact}");
        }
    }

    #[test]
    fn monotone_in_gamma_outer() {
        let base = PhysicalParams::oscillator(1.0, 1.5, 0.0, 0.4, 0.7, 1).with_flux(0.2);
        let g = GridSpec::default_for(&base, GridMode::Outer).with_points(1500);
        let spectra: Vec<Vec<f64>> = [0.0, 0.25, 0.5]
            .iter()
            .map(|&gm| oracle_eigenvalues(&base.with_gamma(gm), &g, 5).unwrap().eigenvalues)
            .collect();
        for w in spectra.windows(2) {
            for (a, b) in w[0].iter().zip(&w[1]) {
                assert!(b >= a);
            }
        }
    }

    #[test]
    fn far_boundary_insensitive() {
        let p = PhysicalParams::oscillator(1.0, 1.0, 0.3, 0.5, 1.0, 1);
        let g = GridSpec::default_for(&p, GridMode::Outer);
        let a = oracle_eigenvalues(&p, &g, 1).unwrap().eigenvalues[0];
        let h = (g.r_max - g.r_min) / g.n_points as f64;
        let r_max = g.r_min + 1.25 * (g.r_max - g.r_min);
        let n = ((r_max - g.r_min) / h).round() as usize;
        let b = oracle_eigenvalues(&p, &g.with_r_max(r_max).with_points(n), 1).unwrap().eigenvalues[0];
        assert!((a - b).abs() / a.abs() <= tolerances::ORACLE_BOUNDARY);
    }

    #[test]
    fn core_mode_runs_and_grids_validate() {
        let p = PhysicalParams::oscillator(1.0, 1.0, 0.2, 0.5, 1.0, 1);
        let g = GridSpec {
            r_min: 1e-6,
            r_max: 0.49,
            n_points: 2000,
            mode: GridMode::Core,
        };
        let res = oracle_eigenvalues(&p, &g, 3).unwrap();
        assert_eq!(res.eigenvalues.len(), 3);
        let bad = GridSpec {
            r_min: 0.3,
            r_max: 5.0,
            n_points: 500,
            mode: GridMode::Outer,
        };
        assert!(matches!(oracle_eigenvalues(&p, &bad, 3), Err(Error::InvalidGrid(_))));
        let few = GridSpec::default_for(&p, GridMode::Flat).with_points(50);
        assert!(matches!(oracle_eigenvalues(&p, &few, 3), Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn eigenfunction_sign_convention() {
        let p = flat(0.0, 1);
        let g = GridSpec::default_for(&p, GridMode::Flat).with_points(800);
        let res = oracle_eigenvalues(&p, &g, 4).unwrap();
        for psi in &res.eigenfunctions {
            let max = psi.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            assert!(*psi.iter().find(|x| x.abs() > 1e-8 * max).unwrap() > 0.0);
        }
    }

    #[test]
    fn coarse_grid_is_reported() {
        let p = PhysicalParams::oscillator(1.0, 30.0, 0.0, 0.5, 1.0, 0);
        let g = GridSpec {
            r_min: 1e-6,
            r_max: 200.0,
            n_points: 100,
            mode: GridMode::Flat,
        };
        assert!(matches!(oracle_eigenvalues(&p, &g, 5), Err(Error::GridTooCoarse(_))));
    }

    #[test]
    fn separation_metric_form() {
        let mut p = PhysicalParams::oscillator(1.2, 0.9, 0.3, 0.45, 1.7, -2);
        p.flux = 0.35;
        p.rotation = 0.6;
        p.delta = 0.2;
        for r in [0.2, 1.3 * p.beta, 2.0] {
            for (phi, z) in [(0.0, 0.0), (1.1, -3.0), (4.0, 7.5)] {
                let res = separation_residual(&p, &GaussianProbe(1.0), 2.5, r, phi, z, SeparationForm::MetricLaplacian).unwrap();
                assert!(res <= tolerances::SEPARATION, "r={r}: {res}");
            }
        }
        let q = PhysicalParams::inverse_square(0.8, 0.5, 0.3, 0.9, 0);
        let probe = PowerGaussianProbe { power: 1.5, width: 0.7 };
        let res = separation_residual(&q, &probe, -1.0, 0.6, 0.3, 0.2, SeparationForm::MetricLaplacian).unwrap();
        assert!(res <= tolerances::SEPARATION);
    }

    #[test]
    fn separation_reduced_form_misses_longitudinal_term() {
        let p = PhysicalParams::oscillator(1.0, 1.0, 0.0, 0.5, 1.0, 1);
        let probe = |r: f64| Jet { value: 1.0 + r, d1: 1.0, d2: 0.0 };
        let res = separation_residual(&p, &probe, 1.0, 1.0, 0.0, 0.0, SeparationForm::PrintedReduced).unwrap();
        assert!(res > 1e-3);
        // the gap is exactly k^2 psi
        let metric = separation_residual(&p, &probe, 1.0, 1.0, 0.0, 0.0, SeparationForm::MetricLaplacian).unwrap();
        assert!(metric <= tolerances::SEPARATION);
        assert!(matches!(
            separation_residual(&p, &probe, 1.0, 0.5, 0.0, 0.0, SeparationForm::MetricLaplacian),
            Err(Error::SingularPoint { .. })
        ));
    }

    #[test]
    fn comparison_report_shape() {
        let mut p = PhysicalParams::oscillator(1.0, 2.0, 0.0, 0.5, 1.0, 1);
        p.flux = 0.25;
        let rep = oracle_vs_closed_form_report(&p, 1000, 3).unwrap();
        assert_eq!(rep.closed_form.len(), 2);
        assert_eq!(rep.sections.len(), 3);
        assert!(rep.sections.iter().all(|s| s.eigenvalues.len() >= 3));
        assert!(rep.sections.iter().any(|s| s.exact.is_some()));

        let mut q = p;
        q.omega0 = 1.0;
        let rep = oracle_vs_closed_form_report(&q, 1000, 3).unwrap();
        assert!(rep.closed_form.is_empty());
        assert!(rep.closed_form_note.is_some());
        assert!(rep.sections.iter().all(|s| s.eigenvalues.len() >= 3));
    }
}
