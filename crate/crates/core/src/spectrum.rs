//! Quantization by series truncation, the closed-form ground states and their audit.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::{spectral_to_energy, DerivedParams, Model, PhysicalParams, SpectralParameter};
use crate::poly::Polynomial;
use crate::series::{
    first_coefficient, series_coefficients, RecurrenceVariant, SeriesSolution,
};
use crate::tolerances;

/// Label of a quantized level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    /// Upper sign of the closed form; the larger of two truncation roots.
    Plus,
    /// Lower sign of the closed form; the smaller of two truncation roots.
    Minus,
    /// k-th real truncation root in ascending order, for n >= 2.
    Root(usize),
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Branch::Plus => f.write_str("plus"),
            Branch::Minus => f.write_str("minus"),
            Branch::Root(k) => write!(f, "root-{k}"),
        }
    }
}

impl Serialize for Branch {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl std::str::FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" => Ok(Branch::Plus),
            "minus" => Ok(Branch::Minus),
            other => other
                .strip_prefix("root-")
                .and_then(|k| k.parse().ok())
                .map(Branch::Root)
                .ok_or_else(|| Error::InvalidParameter {
                    name: "branch",
                    reason: format!("unknown branch `{other}`"),
                }),
        }
    }
}

/// A quantized state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyLevel {
    pub n: usize,
    pub ell: i64,
    pub branch: Branch,
    pub energy: f64,
    pub spectral: f64,
    /// Discriminant of the quadratic (n = 1) or printed radicand (closed form).
    pub discriminant: Option<f64>,
    /// |c_{n+2}| relative to the largest of c_0..c_{n+1}.
    pub termination_defect: f64,
    pub c1_over_c0: f64,
    /// |c_{n+1}| relative to the largest of c_0..c_n.
    #[serde(skip)]
    pub truncation_residual: f64,
}

/// Each `c_i` as a polynomial in the spectral parameter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaPolynomialTable {
    pub polys: Vec<Polynomial>,
    pub model: Model,
    pub derived: DerivedParams,
    pub variant: RecurrenceVariant,
}

/// `a + b s`.
#[derive(Debug, Clone, Copy)]
struct Affine {
    a: f64,
    b: f64,
}

/// Recurrence coefficients split into their constant and spectral parts.
///
/// Written independently of `series::recurrence_triple` so that the two can
/// check each other.
fn affine_triple(i: usize, d: &DerivedParams, v: RecurrenceVariant) -> (Affine, Affine, f64) {
    let i = i as f64;
    let j = d.j;
    let b2 = d.beta * d.beta;
    let iota2 = d.iota * d.iota;
    let w = v.omega(d);
    let slope = b2 / 4.0;
    let (c1, c2) = match d.model {
        Model::OscillatorInverseSquare => (
            (i + 1.0) * (i + w + j + 1.5) + (2.0 * w * (1.0 + j) + 0.5 + j - iota2) / 4.0,
            -w * (i + 0.75 + 0.5 * j),
        ),
        Model::InverseSquareOnly => ((i + 1.0) * (i + j + 1.5) + (0.5 + j - iota2) / 4.0, 0.0),
    };
    let denom = match (d.model, v.denominator) {
        (Model::OscillatorInverseSquare, crate::series::Denominator::Printed) => (i + 2.0) * (i + 1.5 + j),
        _ => (i + 2.0) * (i + 2.0 + j),
    };
    let sign = if v.negate_d2 { -1.0 } else { 1.0 };
    (
        Affine { a: c1, b: -slope },
        Affine {
            a: sign * c2,
            b: sign * slope,
        },
        denom,
    )
}

pub fn lambda_polynomials(d: &DerivedParams, n_max: usize, variant: RecurrenceVariant) -> Result<LambdaPolynomialTable> {
    if n_max < 1 {
        return Err(Error::InvalidParameter {
            name: "n_max",
            reason: "must be >= 1".into(),
        });
    }
    let j = d.j;
    let b2 = d.beta * d.beta;
    let iota2 = d.iota * d.iota;
    let seed_const = match d.model {
        Model::OscillatorInverseSquare => 2.0 * variant.omega(d) * (1.0 + j) - iota2 + 0.5 + j,
        Model::InverseSquareOnly => j + 0.5 - iota2,
    };
    let mut polys = vec![
        Polynomial::constant(1.0),
        Polynomial::new(vec![seed_const / (4.0 * (1.0 + j)), -b2 / (4.0 * (1.0 + j))]),
    ];
    for i in 0..n_max - 1 {
        let (t1, t2, t3) = affine_triple(i, d, variant);
        let next = polys[i + 1]
            .mul_affine(t1.a, t1.b)
            .add(&polys[i].mul_affine(t2.a, t2.b))
            .scale(1.0 / t3);
        polys.push(next);
    }
    Ok(LambdaPolynomialTable {
        polys,
        model: d.model,
        derived: *d,
        variant,
    })
}

/// Normalized |c_{n+1}| and |c_{n+2}| of the numeric series at `s`.
fn truncation_measures(d: &DerivedParams, s: SpectralParameter, n: usize, v: RecurrenceVariant) -> Result<(f64, f64, f64)> {
    let sol = series_coefficients(d, s, n + 2, v)?;
    let c = &sol.coeffs;
    let head = c[..=n].iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let head2 = head.max(c[n + 1].abs());
    Ok((c[n + 1].abs() / head, c[n + 2].abs() / head2, c[1]))
}

/// Discriminant of the quadratic c_2(s) = 0.
pub fn n1_quadratic_discriminant(p: &PhysicalParams, variant: RecurrenceVariant) -> Result<f64> {
    let d = p.derive()?;
    let c = lambda_polynomials(&d, 2, variant)?.polys[2].coeffs.clone();
    Ok(c[1] * c[1] - 4.0 * c[2] * c[0])
}

/// Solves c_{n+1}(s) = 0 for every real root s.
pub fn truncation_solve(p: &PhysicalParams, n: usize, variant: RecurrenceVariant) -> Result<Vec<EnergyLevel>> {
    if n < 1 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: "radial mode must be >= 1".into(),
        });
    }
    let d = p.derive()?;
    let table = lambda_polynomials(&d, n + 1, variant)?;
    let target = &table.polys[n + 1];
    let roots = target.real_roots()?;
    let discriminant = (n == 1).then(|| {
        let c = &target.coeffs;
        c[1] * c[1] - 4.0 * c[2] * c[0]
    });

    let mut levels = Vec::with_capacity(roots.len());
    for (k, &root) in roots.iter().enumerate() {
        let s = SpectralParameter::new(root, p.model);
        let (residual, defect, c1) = truncation_measures(&d, s, n, variant)?;
        if residual > tolerances::TRUNCATION_ROOT {
            return Err(Error::RootPolish(format!(
                "root {root} leaves |c_{}| = {residual:e} (normalized)",
                n + 1
            )));
        }
        let branch = match (n, roots.len()) {
            (1, 2) if k == 0 => Branch::Minus,
            (1, _) => Branch::Plus,
            _ => Branch::Root(k),
        };
        levels.push(EnergyLevel {
            n,
            ell: p.ell,
            branch,
            energy: spectral_to_energy(s, p)?,
            spectral: root,
            discriminant,
            termination_defect: defect,
            c1_over_c0: c1,
            truncation_residual: residual,
        });
    }
    Ok(levels)
}

/// Printed closed-form pieces: (discriminant, spectral value, c1 / c0).
fn closed_form_parts(p: &PhysicalParams, d: &DerivedParams, branch: Branch) -> Result<(f64, f64, f64)> {
    let sign = match branch {
        Branch::Plus => 1.0,
        Branch::Minus => -1.0,
        Branch::Root(_) => {
            return Err(Error::InvalidParameter {
                name: "branch",
                reason: "closed form has only plus and minus branches".into(),
            })
        }
    };
    let j = d.j;
    let iota2 = d.iota * d.iota;
    let b2 = p.beta * p.beta;
    match p.model {
        Model::OscillatorInverseSquare => {
            let mwb = p.mass * p.omega0 * p.beta;
            let disc = 16.0 * iota2 * (1.0 + j) + 16.0 * mwb * (2.0 + j) + 14.0 * mwb * mwb
                - 44.0 * j
                - 32.0 * p.mass * p.gamma
                - 8.0;
            if disc < 0.0 {
                return Err(Error::NegativeDiscriminant { discriminant: disc });
            }
            let root = disc.sqrt();
            let lambda = (3.0 - 2.0 * iota2 + 4.0 * mwb * (2.0 + j) + 2.0 * j + sign * root) / b2;
            let c1 = (iota2 - 2.0 * mwb * (j + 3.0) - j - 2.5 - sign * root) / (4.0 * (1.0 + j));
            Ok((disc, lambda, c1))
        }
        Model::InverseSquareOnly => {
            let disc = iota2 * (j + 0.25) - j * (j + 1.5) - 0.25;
            if disc < 0.0 {
                return Err(Error::NegativeDiscriminant { discriminant: disc });
            }
            let root = disc.sqrt();
            let theta = (j + 1.5 - iota2 + sign * root) / b2;
            let c1 = (-1.0 - sign * root) / (4.0 * (1.0 + j));
            Ok((disc, theta, c1))
        }
    }
}

/// The printed n = 1 energy for one branch.
pub fn ground_state_closed_form(p: &PhysicalParams, branch: Branch) -> Result<EnergyLevel> {
    let d = p.derive()?;
    let (disc, spectral, c1) = closed_form_parts(p, &d, branch)?;
    let iota = d.iota;
    let energy = match p.model {
        Model::OscillatorInverseSquare => {
            p.k * p.k / (2.0 * p.mass) + spectral / (2.0 * p.mass) + p.delta - p.rotation * iota
        }
        Model::InverseSquareOnly => p.k * p.k / (2.0 * p.mass) + spectral / (2.0 * p.mass) - p.rotation * iota,
    };
    let (residual, defect, _) =
        truncation_measures(&d, SpectralParameter::new(spectral, p.model), 1, RecurrenceVariant::PRINTED_OMEGA)?;
    Ok(EnergyLevel {
        n: 1,
        ell: p.ell,
        branch,
        energy,
        spectral,
        discriminant: Some(disc),
        termination_defect: defect,
        c1_over_c0: c1,
        truncation_residual: residual,
    })
}

/// Both closed-form branches, Minus first.
pub fn ground_state_pair(p: &PhysicalParams) -> Result<[EnergyLevel; 2]> {
    Ok([
        ground_state_closed_form(p, Branch::Minus)?,
        ground_state_closed_form(p, Branch::Plus)?,
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AuditVerdict {
    Agree,
    Discrepant,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchPairing {
    pub branch: Branch,
    pub closed_form: f64,
    pub truncation: f64,
    pub relative_difference: f64,
}

/// Closed-form n = 1 spectral values against the truncation roots.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedFormAudit {
    pub model: Model,
    pub iota: f64,
    /// Printed discriminant (or radicand).
    pub closed_form_discriminant: f64,
    /// Closed-form values, Minus then Plus; empty when the discriminant is negative.
    pub closed_form: Vec<(Branch, f64)>,
    /// Quadratic c_2(s) in ascending coefficients.
    pub quadratic: [f64; 3],
    pub quadratic_discriminant: f64,
    pub truncation_roots: Vec<f64>,
    pub pairings: Vec<BranchPairing>,
    pub sign_agreement: bool,
    pub verdict: AuditVerdict,
}

fn relative_difference(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Runs both routes for n = 1. The truncation uses the printed oscillator rate,
/// which is the convention the closed form is written in.
pub fn compare_closed_form_vs_truncation(p: &PhysicalParams) -> Result<ClosedFormAudit> {
    let d = p.derive()?;
    let variant = RecurrenceVariant::PRINTED_OMEGA;
    let table = lambda_polynomials(&d, 2, variant)?;
    let q = &table.polys[2].coeffs;
    let quadratic = [q[0], q[1], q[2]];
    let quadratic_discriminant = q[1] * q[1] - 4.0 * q[2] * q[0];
    let levels = truncation_solve(p, 1, variant)?;
    let truncation_roots: Vec<f64> = levels.iter().map(|l| l.spectral).collect();

    let mut closed_form = Vec::new();
    let closed_form_discriminant = match closed_form_parts(p, &d, Branch::Minus) {
        Ok((disc, minus, _)) => {
            let (_, plus, _) = closed_form_parts(p, &d, Branch::Plus)?;
            closed_form.push((Branch::Minus, minus));
            closed_form.push((Branch::Plus, plus));
            disc
        }
        Err(Error::NegativeDiscriminant { discriminant }) => discriminant,
        Err(e) => return Err(e),
    };

    // pair by branch order; with one root, pair it to the nearer closed-form value
    let mut pairings = Vec::new();
    match (closed_form.len(), truncation_roots.len()) {
        (2, 2) => {
            for (i, &(branch, value)) in closed_form.iter().enumerate() {
                let root = truncation_roots[i];
                pairings.push(BranchPairing {
                    branch,
                    closed_form: value,
                    truncation: root,
                    relative_difference: relative_difference(value, root),
                });
            }
        }
        (2, 1) => {
            let root = truncation_roots[0];
            let &(branch, value) = closed_form
                .iter()
                .min_by(|a, b| (a.1 - root).abs().partial_cmp(&(b.1 - root).abs()).unwrap())
                .unwrap();
            pairings.push(BranchPairing {
                branch,
                closed_form: value,
                truncation: root,
                relative_difference: relative_difference(value, root),
            });
        }
        _ => {}
    }
    let sign_agreement = (closed_form_discriminant >= 0.0) == (quadratic_discriminant >= 0.0);
    let agree = sign_agreement
        && pairings.len() == closed_form.len()
        && pairings.len() == truncation_roots.len()
        && pairings
            .iter()
            .all(|pr| pr.relative_difference <= tolerances::CLOSED_FORM_AGREEMENT);
    Ok(ClosedFormAudit {
        model: p.model,
        iota: d.iota,
        closed_form_discriminant,
        closed_form,
        quadratic,
        quadratic_discriminant,
        truncation_roots,
        pairings,
        sign_agreement,
        verdict: if agree { AuditVerdict::Agree } else { AuditVerdict::Discrepant },
    })
}

/// Flux-periodicity comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeriodicityCheck {
    pub nu: i64,
    pub lhs_energy: f64,
    pub rhs_energy: f64,
    pub abs_diff: f64,
}

/// Compares E_ell(flux + nu) with E_{ell - nu}(flux).
pub fn ab_periodicity_check<F>(p: &PhysicalParams, nu: i64, level_fn: F) -> Result<PeriodicityCheck>
where
    F: Fn(&PhysicalParams) -> Result<f64>,
{
    let shifted_flux = p.with_flux(p.flux + nu as f64);
    let shifted_ell = p.with_ell(p.ell - nu);
    let missing = |which: &str, e: Error| Error::LevelMissing(format!("{which}: {e}"));
    let lhs = level_fn(&shifted_flux).map_err(|e| missing("flux-shifted point", e))?;
    let rhs = level_fn(&shifted_ell).map_err(|e| missing("ell-shifted point", e))?;
    Ok(PeriodicityCheck {
        nu,
        lhs_energy: lhs,
        rhs_energy: rhs,
        abs_diff: (lhs - rhs).abs(),
    })
}

/// Closed-form ground state wavefunction with its seed cross-check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroundStateWavefunction {
    pub solution: SeriesSolution,
    /// c1 / c0 from the recurrence seed at the closed-form spectral value.
    pub seed_c1: f64,
    pub relative_difference: f64,
    pub verdict: AuditVerdict,
}

pub fn ground_state_wavefunction(p: &PhysicalParams, branch: Branch) -> Result<GroundStateWavefunction> {
    let d = p.derive()?;
    let level = ground_state_closed_form(p, branch)?;
    let s = SpectralParameter::new(level.spectral, p.model);
    let variant = RecurrenceVariant::PRINTED_OMEGA;
    let seed_c1 = first_coefficient(&d, s, variant)?;
    let c1 = level.c1_over_c0;
    let relative_difference = (c1 - seed_c1).abs() / seed_c1.abs().max(c1.abs()).max(1.0);
    let solution = SeriesSolution {
        coeffs: vec![1.0, c1],
        exponent: d.exponent(),
        gauss_factor: 0.5 * variant.omega(&d),
        spectral: s,
        derived: d,
        variant,
        terminating: true,
    };
    Ok(GroundStateWavefunction {
        solution,
        seed_c1,
        relative_difference,
        verdict: if relative_difference <= tolerances::WAVEFUNCTION_SEED {
            AuditVerdict::Agree
        } else {
            AuditVerdict::Discrepant
        },
    })
}

/// Series solution for a truncation level; an exact polynomial when the
/// termination defect vanishes.
pub fn truncation_wavefunction(p: &PhysicalParams, level: &EnergyLevel, variant: RecurrenceVariant) -> Result<SeriesSolution> {
    let d = p.derive()?;
    let s = SpectralParameter::new(level.spectral, p.model);
    let mut sol = series_coefficients(&d, s, tolerances::DEFAULT_SERIES_TERMS, variant)?;
    if level.termination_defect <= tolerances::TERMINATION_ZERO {
        sol.coeffs.truncate(level.n + 1);
        sol.terminating = true;
    }
    Ok(sol)
}

/// A point where both c_{n+1} and c_{n+2} vanish.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeunPolynomialPoint {
    /// Oscillator rate in the x-equation.
    pub omega: f64,
    /// omega0 reproducing that rate under the chosen scale.
    pub omega0: f64,
    pub spectral: f64,
    pub c_next: f64,
    pub c_after: f64,
}

/// Diagnostic: genuine polynomial solutions of degree n with the oscillator
/// frequency left free.
///
/// With c_{n+1} = 0 the next coefficient is proportional to the c_n term of the
/// recurrence at i = n, so both conditions hold when that term vanishes,
/// s beta^2 = w (4n + 3 + 2j), and c_{n+1}(s(w), w) = 0. The remaining
/// one-dimensional problem in w is scanned on (0, w_max] and bisected. The
/// inverse-square model has no free rate and yields nothing.
pub fn heun_polynomial_points(p: &PhysicalParams, n: usize, variant: RecurrenceVariant, w_max: f64) -> Result<Vec<HeunPolynomialPoint>> {
    let base = p.derive()?;
    if p.model == Model::InverseSquareOnly {
        return Ok(Vec::new());
    }
    let b2 = p.beta * p.beta;
    let at = |w: f64| -> Result<(f64, f64, f64)> {
        let mut d = base;
        d.omega = w;
        d.omega_x = w;
        let s = w * (4.0 * n as f64 + 3.0 + 2.0 * d.j) / b2;
        let sol = series_coefficients(&d, SpectralParameter::new(s, p.model), n + 2, variant)?;
        let head = sol.coeffs[..=n].iter().fold(0.0f64, |m, x| m.max(x.abs()));
        Ok((sol.coeffs[n + 1] / head, sol.coeffs[n + 2] / head, s))
    };
    let steps = 4000;
    let mut out = Vec::new();
    let mut prev_w = w_max / steps as f64;
    let mut prev = at(prev_w)?.0;
    for k in 2..=steps {
        let w = w_max * k as f64 / steps as f64;
        let cur = at(w)?.0;
        if prev == 0.0 || prev.signum() != cur.signum() {
            let (mut a, mut b, mut fa) = (prev_w, w, prev);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                let fm = at(m)?.0;
                if fm.signum() == fa.signum() && fm != 0.0 {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            let w0 = 0.5 * (a + b);
            let (c_next, c_after, s) = at(w0)?;
            let omega0 = match variant.omega_scale {
                crate::series::OmegaScale::ChangeOfVariable => w0 / (p.mass * b2),
                crate::series::OmegaScale::Printed => w0 / (p.mass * p.beta),
            };
            out.push(HeunPolynomialPoint {
                omega: w0,
                omega0,
                spectral: s,
                c_next: c_next.abs(),
                c_after: c_after.abs(),
            });
        }
        prev_w = w;
        prev = cur;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::quadratic_roots;
    use crate::series::recurrence_triple;

    fn osc() -> PhysicalParams {
        let mut p = PhysicalParams::oscillator(1.0, 2.0, 0.0, 0.5, 1.0, 1);
        p.flux = 0.5 - 0.5; // keeps iota = 1 - 0.5 = 0.5
        p
    }

    fn brute_quadratic(p: &PhysicalParams, v: RecurrenceVariant) -> Vec<f64> {
        // c2 = 0  <=>  d1(0) c1 + d2(0) = 0, each side affine in s: sample at 0, 1, 2
        let d = p.derive().unwrap();
        let f = |s: f64| {
            let sp = SpectralParameter::new(s, p.model);
            let t = recurrence_triple(0, &d, sp, v).unwrap();
            t.d1 * first_coefficient(&d, sp, v).unwrap() + t.d2
        };
        let (f0, f1, f2) = (f(0.0), f(1.0), f(2.0));
        let a = (f2 - 2.0 * f1 + f0) / 2.0;
        let b = f1 - f0 - a;
        quadratic_roots(a, b, f0)
    }

    #[test]
    fn table_entry_zero_and_one() {
        let p = PhysicalParams::inverse_square(1.0, 0.3, 0.6, 1.2, 2);
        let d = p.derive().unwrap();
        let t = lambda_polynomials(&d, 4, RecurrenceVariant::DERIVED).unwrap();
        assert_eq!(t.polys[0].coeffs, vec![1.0]);
        let c1 = &t.polys[1].coeffs;
        let expect_slope = -p.beta * p.beta / (4.0 * (1.0 + d.j));
        let expect_icpt = (d.j + 0.5 - d.iota * d.iota) / (4.0 * (1.0 + d.j));
        assert!((c1[1] - expect_slope).abs() < 1e-15);
        assert!((c1[0] - expect_icpt).abs() < 1e-15);
    }

    #[test]
    fn table_matches_numeric_recurrence() {
        for p in [osc(), PhysicalParams::inverse_square(0.9, 0.4, 0.35, 0.8, -1)] {
            let d = p.derive().unwrap();
            for v in [RecurrenceVariant::DERIVED, RecurrenceVariant::PRINTED] {
                let t = lambda_polynomials(&d, 12, v).unwrap();
                let sol = series_coefficients(&d, SpectralParameter::new(0.37, p.model), 12, v).unwrap();
                for i in 0..=12 {
                    let a = t.polys[i].eval(0.37);
                    let b = sol.coeffs[i];
                    assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-300), "i={i}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn degree_law() {
        let d = osc().derive().unwrap();
        let t = lambda_polynomials(&d, 12, RecurrenceVariant::DERIVED).unwrap();
        for (i, poly) in t.polys.iter().enumerate() {
            assert_eq!(poly.degree(), i);
            assert_eq!(poly.coeffs.len(), i + 1);
        }
    }

    #[test]
    fn n1_roots_match_brute_force_quadratic() {
        for p in [osc(), osc().with_gamma(0.7), PhysicalParams::inverse_square(1.0, 0.0, 0.5, 1.0, 3)] {
            let v = RecurrenceVariant::DERIVED;
            let levels = truncation_solve(&p, 1, v).unwrap();
            let brute = brute_quadratic(&p, v);
            assert_eq!(levels.len(), brute.len());
            for (l, b) in levels.iter().zip(&brute) {
                assert!((l.spectral - b).abs() <= 1e-10 * b.abs().max(1.0), "{} vs {b}", l.spectral);
            }
            if levels.len() == 2 {
                assert_eq!(levels[0].branch, Branch::Minus);
                assert_eq!(levels[1].branch, Branch::Plus);
            }
        }
    }

    #[test]
    fn inverse_square_n1_sign_boundary() {
        // j = 1/2: the quadratic discriminant is 6 iota^2 - 5 (times beta^4 / ...) in Theta beta^2
        for (iota, expect) in [(0.8, 0usize), (0.95, 2), (1.2, 2)] {
            let mut p = PhysicalParams::inverse_square(1.0, 0.0, 0.5, 1.0, 1);
            p.flux = 1.0 - 0.5 - iota; // iota = ell - flux - beta k
            assert!((p.iota() - iota).abs() < 1e-14);
            let levels = truncation_solve(&p, 1, RecurrenceVariant::DERIVED).unwrap();
            assert_eq!(levels.len(), expect, "iota = {iota}");
        }
    }

    #[test]
    fn roots_invariant_under_joint_shift() {
        let p = osc().with_flux(0.3);
        let q = p.with_ell(p.ell + 1).with_flux(p.flux + 1.0);
        for n in 1..=3 {
            let a = truncation_solve(&p, n, RecurrenceVariant::DERIVED).unwrap();
            let b = truncation_solve(&q, n, RecurrenceVariant::DERIVED).unwrap();
            assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(&b) {
                assert!((x.energy - y.energy).abs() <= 1e-12 * x.energy.abs().max(1.0));
            }
        }
    }

    #[test]
    fn truncation_roots_are_self_consistent() {
        for n in 1..=4 {
            for p in [osc(), osc().with_gamma(0.4), PhysicalParams::inverse_square(1.2, 0.3, 0.7, 0.5, 4)] {
                let levels = truncation_solve(&p, n, RecurrenceVariant::DERIVED).unwrap();
                assert!(levels.len() <= n + 1);
                for l in &levels {
                    assert!(l.truncation_residual <= tolerances::TRUNCATION_ROOT);
                }
            }
        }
    }

    #[test]
    fn closed_form_oscillator_discriminant_example() {
        // M = 1, omega0 = 2, beta = 0.5, gamma = 0, iota = 0.25
        let mut p = PhysicalParams::oscillator(1.0, 2.0, 0.0, 0.5, 1.0, 1);
        p.flux = 0.25;
        assert_eq!(p.iota(), 0.25);
        let plus = ground_state_closed_form(&p, Branch::Plus).unwrap();
        assert!((plus.discriminant.unwrap() - 25.5).abs() < 1e-12);
        let minus = ground_state_closed_form(&p, Branch::Minus).unwrap();
        assert!(plus.energy >= minus.energy);
        // lambda = 4 (3 - 0.125 + 10 + 1 +- sqrt(25.5))
        let expect = 4.0 * (3.0 - 2.0 * 0.0625 + 10.0 + 1.0 + 25.5f64.sqrt());
        assert!((plus.spectral - expect).abs() < 1e-12);
        assert!((plus.energy - (0.5 + expect / 2.0)).abs() < 1e-12);
    }

    #[test]
    fn closed_form_negative_discriminant_is_typed() {
        // M = omega0 = 1, beta = 0.5, iota = 0.25 gives -5
        let mut p = PhysicalParams::oscillator(1.0, 1.0, 0.0, 0.5, 1.0, 1);
        p.flux = 0.25;
        match ground_state_closed_form(&p, Branch::Plus) {
            Err(Error::NegativeDiscriminant { discriminant }) => assert!((discriminant + 5.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn closed_form_inverse_square_example() {
        // j = 1/2, iota = 1.8, beta = 0.5
        let mut p = PhysicalParams::inverse_square(1.0, 0.0, 0.5, 1.0, 2);
        p.flux = 2.0 - 0.5 - 1.8;
        assert!((p.iota() - 1.8).abs() < 1e-14);
        let plus = ground_state_closed_form(&p, Branch::Plus).unwrap();
        let minus = ground_state_closed_form(&p, Branch::Minus).unwrap();
        let rad = 0.75 * p.iota().powi(2) - 1.25;
        assert!((plus.discriminant.unwrap() - rad).abs() < 1e-12);
        assert!((rad - 1.18).abs() < 1e-12);
        let centre = 2.0 - p.iota().powi(2);
        assert!((plus.spectral - 4.0 * (centre + rad.sqrt())).abs() < 1e-12);
        assert!((minus.spectral - 4.0 * (centre - rad.sqrt())).abs() < 1e-12);
        assert!(plus.energy >= minus.energy);
        // minus branch pairs with +sqrt in c1
        assert!((minus.c1_over_c0 - (-1.0 + rad.sqrt()) / 6.0).abs() < 1e-14);
    }

    #[test]
    fn closed_form_inverse_square_small_iota_has_no_level() {
        let mut p = PhysicalParams::inverse_square(1.0, 0.0, 0.5, 1.0, 1);
        p.flux = 1.0 - 0.5 - 1.2; // iota^2 = 1.44 < 5/3
        assert!(matches!(
            ground_state_closed_form(&p, Branch::Minus),
            Err(Error::NegativeDiscriminant { .. })
        ));
    }

    #[test]
    fn closed_form_energy_uses_the_linear_map() {
        let mut p = PhysicalParams::oscillator(1.3, 1.7, 0.2, 0.6, 0.8, 3);
        p.delta = 0.4;
        p.rotation = 0.9;
        p.flux = 0.1;
        let l = ground_state_closed_form(&p, Branch::Plus).unwrap();
        let e = spectral_to_energy(SpectralParameter::new(l.spectral, p.model), &p).unwrap();
        assert!((l.energy - e).abs() <= 1e-12 * e.abs());
    }

    #[test]
    fn audit_records_full_quadratic() {
        let mut p = PhysicalParams::oscillator(1.0, 2.0, 0.0, 0.5, 1.0, 1);
        p.flux = 0.25;
        let a = compare_closed_form_vs_truncation(&p).unwrap();
        assert_eq!(a.closed_form.len(), 2);
        assert_eq!(a.truncation_roots.len(), 2);
        assert_eq!(a.pairings.len(), 2);
        assert!(a.pairings.iter().all(|x| x.relative_difference.is_finite()));
        // the quadratic printed in the audit reproduces the roots
        let roots = quadratic_roots(a.quadratic[2], a.quadratic[1], a.quadratic[0]);
        for (r, t) in roots.iter().zip(&a.truncation_roots) {
            assert!((r - t).abs() <= 1e-10 * r.abs().max(1.0));
        }
        // the printed closed form drops a factor of 1/2: it never agrees here
        assert_eq!(a.verdict, AuditVerdict::Discrepant);

        let g = p.with_gamma(0.0);
        assert_eq!(compare_closed_form_vs_truncation(&g).unwrap().closed_form.len(), 2);
    }

    #[test]
    fn audit_with_negative_closed_form_discriminant() {
        let mut p = PhysicalParams::oscillator(1.0, 1.0, 0.0, 0.5, 1.0, 1);
        p.flux = 0.25;
        let a = compare_closed_form_vs_truncation(&p).unwrap();
        assert!(a.closed_form.is_empty());
        assert!(a.closed_form_discriminant < 0.0);
        assert!(a.pairings.is_empty());
    }

    #[test]
    fn periodicity_examples() {
        let mut p = PhysicalParams::oscillator(1.0, 2.0, 0.3, 0.5, 1.0, 1);
        p.flux = 0.2;
        p.rotation = 0.7;
        let f = |q: &PhysicalParams| ground_state_closed_form(q, Branch::Plus).map(|l| l.energy);
        assert_eq!(ab_periodicity_check(&p, 0, f).unwrap().abs_diff, 0.0);
        for nu in 1..=3 {
            assert!(ab_periodicity_check(&p, nu, f).unwrap().abs_diff <= tolerances::PERIODICITY);
        }
        let mut q = PhysicalParams::inverse_square(1.0, 0.0, 0.5, 1.0, 3);
        q.rotation = -0.4;
        let g = |q: &PhysicalParams| ground_state_closed_form(q, Branch::Minus).map(|l| l.energy);
        assert!(ab_periodicity_check(&q, 1, g).unwrap().abs_diff <= tolerances::PERIODICITY);
        let missing = |_: &PhysicalParams| -> Result<f64> { Err(Error::LevelMissing("none".into())) };
        assert!(matches!(ab_periodicity_check(&q, 1, missing), Err(Error::LevelMissing(_))));
    }

    #[test]
    fn wavefunction_pairing_and_example() {
        let mut p = PhysicalParams::inverse_square(1.0, 0.0, 0.5, 1.0, 2);
        p.flux = 2.0 - 0.5 - 1.8;
        let w = ground_state_wavefunction(&p, Branch::Minus).unwrap();
        let rad: f64 = 0.75 * 1.8f64.powi(2) - 1.25;
        assert!((w.solution.coeffs[1] - (-1.0 + rad.sqrt()) / 6.0).abs() < 1e-14);
        assert_eq!(w.verdict, AuditVerdict::Agree);
        assert_eq!(w.solution.exponent, 0.5);
        assert!(w.solution.psi(1e-10).unwrap().abs() < 1e-4);

        let mut q = PhysicalParams::oscillator(1.0, 2.0, 0.0, 0.5, 1.0, 1);
        q.flux = 0.25;
        for b in [Branch::Plus, Branch::Minus] {
            let w = ground_state_wavefunction(&q, b).unwrap();
            assert_eq!(w.verdict, AuditVerdict::Agree, "{b}");
            assert!(w.solution.psi(3.0).is_ok());
        }
    }

    #[test]
    fn polynomial_points_satisfy_both_conditions() {
        let p = PhysicalParams::oscillator(1.0, 1.0, 0.2, 0.5, 1.0, 2);
        let pts = heun_polynomial_points(&p, 1, RecurrenceVariant::DERIVED, 20.0).unwrap();
        assert!(!pts.is_empty());
        for pt in &pts {
            assert!(pt.c_next < 1e-9, "{pt:?}");
            assert!(pt.c_after < 1e-9, "{pt:?}");
        }
        let q = PhysicalParams::inverse_square(1.0, 0.2, 0.5, 1.0, 2);
        assert!(heun_polynomial_points(&q, 1, RecurrenceVariant::DERIVED, 20.0).unwrap().is_empty());
    }

    #[test]
    fn branch_text_round_trip() {
        for b in [Branch::Plus, Branch::Minus, Branch::Root(3)] {
            assert_eq!(b.to_string().parse::<Branch>().unwrap(), b);
        }
        assert!("sideways".parse::<Branch>().is_err());
    }
}
