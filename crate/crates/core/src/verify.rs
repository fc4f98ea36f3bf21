//! The verification suite: randomized property checks, oracle checks and the
//! audit of the printed closed forms.
//!
//! Each `criterion_*` function is self-contained and seeds its own generator
//! from the suite seed, so checks can run alone or in any order.

use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Model, PhysicalParams, SpectralParameter};
use crate::oracle::{
    flat_exact_spectrum, oracle_eigenvalues, separation_residual, GridMode, GridSpec, SeparationForm,
};
use crate::series::{
    changeofvar_consistency, series_coefficients, GaussianProbe, OmegaScale, PowerGaussianProbe, RadialProbe,
    RecurrenceVariant, SineProbe,
};
use crate::spectrum::{
    ab_periodicity_check, compare_closed_form_vs_truncation, ground_state_closed_form, ground_state_wavefunction,
    truncation_solve, AuditVerdict, Branch,
};
use crate::sweep::{linear_fit, run_sweep, BranchSelect, LevelQuery, SweepParam, SweepSpec};
use crate::tolerances;

pub const DEFAULT_SEED: u64 = 20_240_917;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VerifyOptions {
    /// Fewer random draws.
    pub fast: bool,
    pub seed: u64,
    /// Mutation hook: flips the sign of the c_i term in the recurrence under test.
    pub tamper_d2_sign: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            fast: false,
            seed: DEFAULT_SEED,
            tamper_d2_sign: false,
        }
    }
}

impl VerifyOptions {
    fn draws(&self, full: usize, fast: usize) -> usize {
        if self.fast {
            fast
        } else {
            full
        }
    }

    fn rng(&self, criterion: u8) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ (0x9e37_79b9_7f4a_7c15u64.wrapping_mul(criterion as u64 + 1)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "DISCREPANT-DOCUMENTED")]
    DiscrepantDocumented,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::DiscrepantDocumented => "DISCREPANT-DOCUMENTED",
        }
    }

    fn contract(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    fn audit(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::DiscrepantDocumented
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub criterion: u8,
    pub status: Status,
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
    pub elapsed_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckRecord>,
    pub overall: Status,
    pub seed: u64,
    pub fast: bool,
    pub wall_time_s: f64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.overall == Status::Pass
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<3} {:<40} {:<22} {:>12} {:>10} {:>8}",
            "#", "check", "status", "measured", "tolerance", "time[s]"
        );
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{:<3} {:<40} {:<22} {:>12.3e} {:>10.1e} {:>8.3}",
                c.criterion,
                c.name,
                c.status.label(),
                c.measured,
                c.tolerance,
                c.elapsed_s
            );
            if let Some(first) = c.detail.lines().next() {
                let _ = writeln!(out, "      {first}");
            }
        }
        let _ = writeln!(
            out,
            "overall: {}  ({} checks, seed {}, {:.2} s{})",
            self.overall.label(),
            self.checks.len(),
            self.seed,
            self.wall_time_s,
            if self.fast { ", fast" } else { "" }
        );
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

struct Timer(Instant);

impl Timer {
    fn start() -> Self {
        Self(Instant::now())
    }

    fn record(&self, name: &str, criterion: u8, status: Status, measured: f64, tolerance: f64, detail: String) -> CheckRecord {
        CheckRecord {
            name: name.into(),
            criterion,
            status,
            measured,
            tolerance,
            detail,
            elapsed_s: self.0.elapsed().as_secs_f64(),
        }
    }
}

fn error_record(name: &str, criterion: u8, tolerance: f64, t: &Timer, e: &Error) -> CheckRecord {
    t.record(name, criterion, Status::Fail, f64::NAN, tolerance, format!("error: {e}"))
}

/// Random parameter set of the given model.
pub fn random_params(rng: &mut impl Rng, model: Model) -> PhysicalParams {
    let mass = rng.gen_range(0.5..2.0);
    let gamma = if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(0.0..1.0) };
    let beta = rng.gen_range(0.1..0.9);
    let k = rng.gen_range(0.1..2.0);
    let ell = rng.gen_range(-3i64..=3);
    let mut p = match model {
        Model::OscillatorInverseSquare => {
            let mut p = PhysicalParams::oscillator(mass, rng.gen_range(0.2..3.0), gamma, beta, k, ell);
            p.delta = rng.gen_range(-1.0..1.0);
            p
        }
        Model::InverseSquareOnly => PhysicalParams::inverse_square(mass, gamma, beta, k, ell),
    };
    p.flux = rng.gen_range(0.0..2.0);
    p.rotation = rng.gen_range(-1.0..1.0);
    p
}

const MODELS: [Model; 2] = [Model::OscillatorInverseSquare, Model::InverseSquareOnly];

/// Draws parameters until the printed closed form has real levels.
fn params_with_closed_form(rng: &mut impl Rng, model: Model) -> Result<PhysicalParams> {
    for _ in 0..10_000 {
        let mut p = random_params(rng, model);
        if model == Model::OscillatorInverseSquare {
            // larger rates make the printed discriminant positive more often
            p.omega0 = rng.gen_range(1.0..6.0);
        }
        match ground_state_closed_form(&p, Branch::Plus) {
            Ok(_) => return Ok(p),
            Err(Error::NegativeDiscriminant { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::LevelMissing("no closed-form level found in 10000 draws".into()))
}

fn random_probe(rng: &mut impl Rng) -> Box<dyn RadialProbe> {
    match rng.gen_range(0..3) {
        0 => Box::new(GaussianProbe(rng.gen_range(0.2..2.0))),
        1 => Box::new(PowerGaussianProbe {
            power: rng.gen_range(0.5..3.0),
            width: rng.gen_range(0.2..1.5),
        }),
        _ => Box::new(SineProbe {
            wavenumber: rng.gen_range(0.5..4.0),
            phase: rng.gen_range(0.0..std::f64::consts::TAU),
        }),
    }
}

/// Radius away from the origin and from r = beta.
fn random_radius(rng: &mut impl Rng, beta: f64) -> f64 {
    loop {
        let r = rng.gen_range(0.05..3.0);
        if (r - beta).abs() > 0.02 {
            return r;
        }
    }
}

fn series_residual_max(
    rng: &mut ChaCha8Rng,
    model: Model,
    draws: usize,
    variant: RecurrenceVariant,
) -> Result<(f64, String)> {
    let xs = [0.1, 0.3, 0.5];
    let mut worst = 0.0f64;
    let mut where_ = String::new();
    for _ in 0..draws {
        let p = random_params(rng, model);
        let d = p.derive()?;
        let s = SpectralParameter::new(rng.gen_range(-10.0..10.0), model);
        let sol = series_coefficients(&d, s, tolerances::DEFAULT_SERIES_TERMS, variant)?;
        let rep = sol.residual(&xs)?;
        if rep.max_residual > worst || where_.is_empty() {
            worst = worst.max(rep.max_residual);
            where_ = format!(
                "worst at beta={:.4}, iota={:.4}, j={:.4}, s={:.4}",
                p.beta, d.iota, d.j, s.value
            );
        }
    }
    Ok((worst, where_))
}

/// Series residual of the recurrence against the transformed equation.
pub fn criterion_1(opts: &VerifyOptions) -> Vec<CheckRecord> {
    let mut rng = opts.rng(1);
    let draws = opts.draws(50, 15);
    let tol = tolerances::SERIES_RESIDUAL;
    let mut variant = RecurrenceVariant::DERIVED;
    variant.negate_d2 = opts.tamper_d2_sign;
    let mut out = Vec::new();
    for model in MODELS {
        let name = format!("series-residual/{}", model.name());
        let t = Timer::start();
        out.push(match series_residual_max(&mut rng, model, draws, variant) {
            Ok((m, w)) => t.record(
                &name,
                1,
                Status::contract(m <= tol),
                m,
                tol,
                format!("{draws} draws, N = 200, x in {{0.1, 0.3, 0.5}}; {w}"),
            ),
            Err(e) => error_record(&name, 1, tol, &t, &e),
        });
    }
    let name = "series-residual/printed-denominator";
    let t = Timer::start();
    out.push(
        match series_residual_max(&mut rng, Model::OscillatorInverseSquare, draws, RecurrenceVariant::PRINTED) {
            Ok((m, w)) => t.record(
                name,
                1,
                Status::audit(m <= tol),
                m,
                tol,
                format!(
                    "oscillator recurrence with leading denominator (i + 3/2 + j)(i + 2); the substituted series gives (i + 2 + j)(i + 2); {w}"
                ),
            ),
            Err(Error::DivergingSeries { index }) => t.record(
                name,
                1,
                Status::DiscrepantDocumented,
                f64::INFINITY,
                tol,
                format!("printed denominator: series overflow at index {index}"),
            ),
            Err(e) => error_record(name, 1, tol, &t, &e),
        },
    );
    out
}

fn changeofvar_max(rng: &mut ChaCha8Rng, draws: usize, scale: OmegaScale) -> Result<f64> {
    let mut worst = 0.0f64;
    for i in 0..draws {
        let model = MODELS[i % 2];
        let p = random_params(rng, model);
        let s = SpectralParameter::new(rng.gen_range(-10.0..10.0), model);
        let probe = random_probe(rng);
        let r = random_radius(rng, p.beta);
        worst = worst.max(changeofvar_consistency(&p, s, r, probe.as_ref(), scale)?);
    }
    Ok(worst)
}

/// Radial form against the rescaled transformed form.
pub fn criterion_2(opts: &VerifyOptions) -> Vec<CheckRecord> {
    let draws = opts.draws(100, 30);
    let tol = tolerances::CHANGE_OF_VARIABLE;
    let mut out = Vec::new();
    for (name, scale) in [
        ("change-of-variable", OmegaScale::ChangeOfVariable),
        ("change-of-variable/printed-omega", OmegaScale::Printed),
    ] {
        let mut rng = opts.rng(2);
        let t = Timer::start();
        out.push(match changeofvar_max(&mut rng, draws, scale) {
            Ok(m) => {
                let (status, detail) = match scale {
                    OmegaScale::ChangeOfVariable => (
                        Status::contract(m <= tol),
                        format!("{draws} draws; oscillator rate M omega0 beta^2 in the x-equation"),
                    ),
                    OmegaScale::Printed => (
                        Status::audit(m <= tol),
                        format!(
                            "{draws} draws; rate M omega0 beta as printed; x = r^2/beta^2 maps M^2 omega0^2 r^2 to (M omega0 beta^2)^2 x / beta^2"
                        ),
                    ),
                };
                t.record(name, 2, status, m, tol, detail)
            }
            Err(e) => error_record(name, 2, tol, &t, &e),
        });
    }
    out
}

fn separation_max(rng: &mut ChaCha8Rng, draws: usize, form: SeparationForm) -> Result<f64> {
    let mut worst = 0.0f64;
    for i in 0..draws {
        let p = random_params(rng, MODELS[i % 2]);
        let probe = random_probe(rng);
        let r = random_radius(rng, p.beta);
        let phi = rng.gen_range(0.0..std::f64::consts::TAU);
        let z = rng.gen_range(-5.0..5.0);
        let energy = rng.gen_range(-5.0..5.0);
        worst = worst.max(separation_residual(&p, probe.as_ref(), energy, r, phi, z, form)?);
    }
    Ok(worst)
}

/// Three-dimensional operator against the separated radial operator.
pub fn criterion_3(opts: &VerifyOptions) -> Vec<CheckRecord> {
    let draws = opts.draws(30, 10);
    let tol = tolerances::SEPARATION;
    let mut out = Vec::new();
    for (name, form) in [
        ("separation/metric-laplacian", SeparationForm::MetricLaplacian),
        ("separation/printed-operator", SeparationForm::PrintedReduced),
    ] {
        let mut rng = opts.rng(3);
        let t = Timer::start();
        out.push(match separation_max(&mut rng, draws, form) {
            Ok(m) => {
                let (status, detail) = match form {
                    SeparationForm::MetricLaplacian => (
                        Status::contract(m <= tol),
                        format!("{draws} draws; Laplace-Beltrami operator of the dislocation metric, iota = ell - flux - beta k"),
                    ),
                    SeparationForm::PrintedReduced => (
                        Status::audit(m <= tol),
                        format!("{draws} draws; printed operator lacks g^zz d_z^2, which supplies the -k^2 in the spectral parameter"),
                    ),
                };
                t.record(name, 3, status, m, tol, detail)
            }
            Err(e) => error_record(name, 3, tol, &t, &e),
        });
    }
    out
}

/// Every truncation root zeroes c_{n+1}; at most n + 1 roots.
pub fn criterion_4(opts: &VerifyOptions) -> Vec<CheckRecord> {
    let mut rng = opts.rng(4);
    let draws = opts.draws(20, 6);
    let tol = tolerances::TRUNCATION_ROOT;
    let mut out = Vec::new();
    for model in MODELS {
        let name = format!("truncation-roots/{}", model.name());
        let t = Timer::start();
        let mut run = || -> Result<(f64, usize, usize, bool)> {
            let mut worst = 0.0f64;
            let mut roots = 0;
            let mut sets = 0;
            let mut count_ok = true;
            for _ in 0..draws {
                let p = random_params(&mut rng, model);
                for n in 1..=3 {
                    let levels = truncation_solve(&p, n, RecurrenceVariant::DERIVED)?;
                    count_ok &= levels.len() <= n + 1;
                    roots += levels.len();
                    sets += 1;
                    for l in &levels {
                        worst = worst.max(l.truncation_residual);
                    }
                }
            }
            Ok((worst, roots, sets, count_ok))
        };
        out.push(match run() {
            Ok((worst, roots, sets, count_ok)) => t.record(
                &name,
                4,
                Status::contract(worst <= tol && count_ok),
                worst,
                tol,
                format!("{roots} roots over {sets} (params, n) cases, n in 1..=3; root counts within n + 1: {count_ok}"),
            ),
            Err(e) => error_record(&name, 4, tol, &t, &e),
        });
    }
    out
}

/// Printed n = 1 closed forms against the truncation roots.
pub fn criterion_5(opts: &VerifyOptions) -> Vec<CheckRecord> {
    let mut rng = opts.rng(5);
    let draws = opts.draws(30, 10);
    let tol = tolerances::CLOSED_FORM_AGREEMENT;
    let mut out = Vec::new();
    for model in MODELS {
        let name = format!("closed-form-audit/{}", model.name());
        let t = Timer::start();
        let mut run = || -> Result<(f64, usize, usize, usize, String)> {
            let (mut agree, mut discrepant, mut sign_mismatch) = (0, 0, 0);
            let mut worst = 0.0f64;
            let mut lines = String::new();
            for _ in 0..draws {
                let p = params_with_closed_form(&mut rng, model)?;
                let a = compare_closed_form_vs_truncation(&p)?;
                match a.verdict {
                    AuditVerdict::Agree => agree += 1,
                    AuditVerdict::Discrepant => discrepant += 1,
                }
                if !a.sign_agreement {
                    sign_mismatch += 1;
                }
                let rel: Vec<f64> = a.pairings.iter().map(|x| x.relative_difference).collect();
                worst = rel.iter().copied().fold(worst, f64::max);
                let _ = writeln!(
                    lines,
                    "iota={:.6} quadratic(s)=[{:.10e}, {:.10e}, {:.10e}] disc={:.6e} printed_disc={:.6e} closed={:?} roots={:?} rel={:?}",
                    a.iota,
                    a.quadratic[0],
                    a.quadratic[1],
                    a.quadratic[2],
                    a.quadratic_discriminant,
                    a.closed_form_discriminant,
                    a.closed_form.iter().map(|x| x.1).collect::<Vec<_>>(),
                    a.truncation_roots,
                    rel
                );
            }
            Ok((worst, agree, discrepant, sign_mismatch, lines))
        };
        out.push(match run() {
            Ok((worst, agree, discrepant, sign_mismatch, lines)) => t.record(
                &name,
                5,
                Status::audit(discrepant == 0),
                worst,
                tol,
                format!(
                    "{agree} AGREE, {discrepant} DISCREPANT, {sign_mismatch} discriminant-sign mismatches over {draws} sets (coefficients of c_2 in ascending powers of the spectral parameter)\n{lines}"
                ),
            ),
            Err(e) => error_record(&name, 5, tol, &t, &e),
        });
    }

    // c1 of the printed wavefunction against the recurrence seed
    let name = "closed-form-wavefunction-seed";
    let t = Timer::start();
    let tol_w = tolerances::WAVEFUNCTION_SEED;
    let mut run = || -> Result<(f64, usize)> {
        let mut worst = 0.0f64;
        let mut n = 0;
        for model in MODELS {
            for _ in 0..opts.draws(10, 4) {
                let p = params_with_closed_form(&mut rng, model)?;
                for b in [Branch::Plus, Branch::Minus] {
                    worst = worst.max(ground_state_wavefunction(&p, b)?.relative_difference);
                    n += 1;
                }
            }
        }
        Ok((worst, n))
    };
    out.push(match run() {
        Ok((m, n)) => t.record(
            name,
            5,
            Status::audit(m <= tol_w),
            m,
            tol_w,
            format!("{n} states; upper sign of the closed form pairs with the lower sign of its c1 expression"),
        ),
        Err(e) => error_record(name, 5, tol_w, &t, &e),
    });
    out
}

/// E_ell(flux + nu) = E_{ell - nu}(flux).
pub fn criterion_6(opts: &VerifyOptions) -> Vec<CheckRecord> {
    let mut rng = opts.rng(6);
    let draws = opts.draws(20, 6);
    let tol = tolerances::PERIODICITY;
    let mut out = Vec::new();
    for model in MODELS {
        let name = format!("ab-periodicity/{}", model.name());
        let t = Timer::start();
        let mut run = || -> Result<(f64, usize)> {
            let mut worst = 0.0f64;
            let mut n = 0;
            for _ in 0..draws {
                // both sides of the relation sit at iota - nu, so the level must exist there
                let mut found = None;
                for _ in 0..1000 {
                    let p = params_with_closed_form(&mut rng, model)?;
                    if (1..=3).all(|nu| ground_state_closed_form(&p.with_flux(p.flux + nu as f64), Branch::Plus).is_ok()) {
                        found = Some(p);
                        break;
                    }
                }
                let p = found.ok_or_else(|| Error::LevelMissing("no baseline with levels at all shifts".into()))?;
                for branch in [Branch::Plus, Branch::Minus] {
                    for nu in 1..=3 {
                        let closed = ab_periodicity_check(&p, nu, |q| Ok(ground_state_closed_form(q, branch)?.energy))?;
                        worst = worst.max(closed.abs_diff);
                        n += 1;
                        let trunc = LevelQuery::truncation(1, BranchSelect::All);
                        match ab_periodicity_check(&p, nu, |q| trunc.energy(q, branch)) {
                            Ok(c) => {
                                worst = worst.max(c.abs_diff);
                                n += 1;
                            }
                            Err(Error::LevelMissing(_)) => {}
                            Err(e) => return Err(e),
                        }
                    }
                }
            }
            Ok((worst, n))
        };
        out.push(match run() {
            Ok((m, n)) => t.record(
                &name,
                6,
                Status::contract(m <= tol),
                m,
                tol,
                format!("{n} comparisons, nu in 1..=3, both branches, closed form and truncation"),
            ),
            Err(e) => error_record(&name, 6, tol, &t, &e),
        });
    }
    out
}

/// Flat-limit oracle against the exact spectrum, with grid-doubling ratio.
pub fn criterion_7(_opts: &VerifyOptions) -> Vec<CheckRecord> {
    let tol = tolerances::ORACLE_FLAT_RELATIVE;
    let (lo, hi) = tolerances::ORACLE_CONVERGENCE_RATIO;
    let t = Timer::start();
    let n_eigs = tolerances::ORACLE_EIGS;
    let mut worst_err = 0.0f64;
    let mut ratios: Vec<f64> = Vec::new();
    let mut worst_ratio = (f64::NAN, String::new());
    for gamma in [0.0, 0.5] {
        for m in 0..=2i64 {
            let p = PhysicalParams::oscillator(1.0, 1.0, gamma, 0.5, 1.0, m);
            let grid = GridSpec::default_for(&p, GridMode::Flat);
            let res = oracle_eigenvalues(&p, &grid, n_eigs)
                .and_then(|a| oracle_eigenvalues(&p, &grid.with_points(2 * grid.n_points), n_eigs).map(|b| (a, b)));
            let (a, b) = match res {
                Ok(x) => x,
                Err(e) => {
                    return vec![error_record("oracle-flat-limit", 7, tol, &t, &e)];
                }
            };
            for n in 0..n_eigs {
                let exact = flat_exact_spectrum(&p, n).expect("oscillator");
                let ea = (a.eigenvalues[n] - exact).abs();
                let eb = (b.eigenvalues[n] - exact).abs();
                worst_err = worst_err.max(ea / exact);
                let ratio = ea / eb;
                let off = if ratio < lo { lo - ratio } else { (ratio - hi).max(0.0) };
                let prev_off = match worst_ratio.0 {
                    r if r.is_nan() => -1.0,
                    r if r < lo => lo - r,
                    r => (r - hi).max(0.0),
                };
                if off > prev_off {
                    worst_ratio = (ratio, format!("gamma={gamma}, ell-flux={m}, level {n}"));
                }
                ratios.push(ratio);
            }
        }
    }
    let ratios_ok = ratios.iter().all(|r| *r >= lo && *r <= hi);
    let rmin = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let rmax = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    vec![
        t.record(
            "oracle-flat-limit",
            7,
            Status::contract(worst_err <= tol),
            worst_err,
            tol,
            format!("gamma in {{0, 0.5}}, ell - flux in {{0, 1, 2}}, lowest {n_eigs} levels, 4000 cells"),
        ),
        t.record(
            "oracle-convergence-ratio",
            7,
            Status::contract(ratios_ok),
            worst_ratio.0,
            hi,
            format!(
                "error ratio 4000 -> 8000 cells within [{lo}, {hi}]: observed range [{rmin:.3}, {rmax:.3}]; least favourable: {}",
                worst_ratio.1
            ),
        ),
    ]
}

/// Outer-mode eigenvalues do not decrease with gamma; far boundary is irrelevant.
pub fn criterion_8(opts: &VerifyOptions) -> Vec<CheckRecord> {
    let mut rng = opts.rng(8);
    let n_eigs = tolerances::ORACLE_EIGS;
    let mut out = Vec::new();

    let t = Timer::start();
    let mut base = random_params(&mut rng, Model::OscillatorInverseSquare);
    base.omega0 = rng.gen_range(0.5..2.0);
    let grid = GridSpec::default_for(&base, GridMode::Outer);
    let run = || -> Result<(f64, Vec<Vec<f64>>)> {
        let spectra = [0.0, 0.25, 0.5]
            .iter()
            .map(|&g| Ok(oracle_eigenvalues(&base.with_gamma(g), &grid, n_eigs)?.eigenvalues))
            .collect::<Result<Vec<_>>>()?;
        // largest decrease between consecutive gamma values (0 when monotone)
        let mut worst_drop = 0.0f64;
        for w in spectra.windows(2) {
            for (a, b) in w[0].iter().zip(&w[1]) {
                worst_drop = worst_drop.max(a - b);
            }
        }
        Ok((worst_drop, spectra))
    };
    out.push(match run() {
        Ok((drop, spectra)) => t.record(
            "oracle-monotone-gamma",
            8,
            Status::contract(drop <= 0.0),
            drop,
            0.0,
            format!(
                "outer mode, gamma in {{0, 0.25, 0.5}}, ground levels {:?}; measured = largest decrease",
                spectra.iter().map(|s| s[0]).collect::<Vec<_>>()
            ),
        ),
        Err(e) => error_record("oracle-monotone-gamma", 8, 0.0, &t, &e),
    });

    let t = Timer::start();
    let tol = tolerances::ORACLE_BOUNDARY;
    let run = || -> Result<f64> {
        let a = oracle_eigenvalues(&base, &grid, 1)?.eigenvalues[0];
        let h = (grid.r_max - grid.r_min) / grid.n_points as f64;
        let r_max = grid.r_min + 1.25 * (grid.r_max - grid.r_min);
        let n = ((r_max - grid.r_min) / h).round() as usize;
        let b = oracle_eigenvalues(&base, &grid.with_r_max(r_max).with_points(n), 1)?.eigenvalues[0];
        Ok((a - b).abs() / a.abs())
    };
    out.push(match run() {
        Ok(m) => t.record(
            "oracle-far-boundary",
            8,
            Status::contract(m <= tol),
            m,
            tol,
            "outer mode, r_max grown by 25 % at fixed spacing".into(),
        ),
        Err(e) => error_record("oracle-far-boundary", 8, tol, &t, &e),
    });
    out
}

/// Energies are affine in the rotation speed with slope -iota.
pub fn criterion_9(opts: &VerifyOptions) -> Vec<CheckRecord> {
    let mut rng = opts.rng(9);
    let tol = tolerances::ROTATION_AFFINE;
    let mut out = Vec::new();
    for model in MODELS {
        let name = format!("rotation-affine/{}", model.name());
        let t = Timer::start();
        let mut run = || -> Result<(f64, usize)> {
            let mut worst = 0.0f64;
            let mut fits = 0;
            for _ in 0..opts.draws(5, 2) {
                let p = params_with_closed_form(&mut rng, model)?;
                let spec = SweepSpec {
                    param: SweepParam::Omega,
                    from: -2.0,
                    to: 2.0,
                    steps: 41,
                    fixed: p,
                };
                for query in [LevelQuery::closed_form(BranchSelect::All), LevelQuery::truncation(1, BranchSelect::All)] {
                    let rows = run_sweep(&spec, &query, Some(1))?;
                    for slot in query.slots() {
                        let pts: Vec<(f64, f64)> = rows
                            .iter()
                            .filter(|r| r.branch == slot)
                            .filter_map(|r| r.energy.map(|e| (r.param_value, e)))
                            .collect();
                        if pts.len() < 3 {
                            continue;
                        }
                        let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
                        let (slope, _, res) = linear_fit(&x, &y);
                        worst = worst.max(res).max((slope + p.iota()).abs());
                        fits += 1;
                    }
                }
            }
            Ok((worst, fits))
        };
        out.push(match run() {
            Ok((m, fits)) => t.record(
                &name,
                9,
                Status::contract(m <= tol && fits > 0),
                m,
                tol,
                format!("{fits} fits over Omega in [-2, 2]; measured = max(fit residual, |slope + iota|)"),
            ),
            Err(e) => error_record(&name, 9, tol, &t, &e),
        });
    }
    out
}

/// Runs every criterion.
pub fn run_verify(opts: &VerifyOptions) -> VerifyReport {
    let start = Instant::now();
    let suites: [fn(&VerifyOptions) -> Vec<CheckRecord>; 9] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
    ];
    let checks: Vec<CheckRecord> = suites.iter().flat_map(|f| f(opts)).collect();
    let overall = if checks.iter().any(|c| c.status == Status::Fail) {
        Status::Fail
    } else {
        Status::Pass
    };
    VerifyReport {
        checks,
        overall,
        seed: opts.seed,
        fast: opts.fast,
        wall_time_s: start.elapsed().as_secs_f64(),
    }
}
