//! Level queries and one-parameter sweeps.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::PhysicalParams;
use crate::series::RecurrenceVariant;
use crate::spectrum::{ground_state_closed_form, truncation_solve, Branch, EnergyLevel};

/// How a level is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LevelMethod {
    /// Printed n = 1 formulas.
    ClosedForm,
    /// Roots of c_{n+1}.
    Truncation { n: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchSelect {
    Plus,
    Minus,
    All,
}

impl std::str::FromStr for BranchSelect {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" => Ok(BranchSelect::Plus),
            "minus" => Ok(BranchSelect::Minus),
            "all" => Ok(BranchSelect::All),
            other => Err(Error::InvalidParameter {
                name: "branch",
                reason: format!("expected plus, minus or all, got `{other}`"),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LevelQuery {
    pub method: LevelMethod,
    pub branch: BranchSelect,
    pub variant: RecurrenceVariant,
}

impl LevelQuery {
    pub fn closed_form(branch: BranchSelect) -> Self {
        Self {
            method: LevelMethod::ClosedForm,
            branch,
            variant: RecurrenceVariant::PRINTED_OMEGA,
        }
    }

    pub fn truncation(n: usize, branch: BranchSelect) -> Self {
        Self {
            method: LevelMethod::Truncation { n },
            branch,
            variant: RecurrenceVariant::DERIVED,
        }
    }

    /// Branch slots, in output order, that a sweep reports at every point.
    pub fn slots(&self) -> Vec<Branch> {
        let pair = match self.branch {
            BranchSelect::Plus => vec![Branch::Plus],
            BranchSelect::Minus => vec![Branch::Minus],
            BranchSelect::All => vec![Branch::Minus, Branch::Plus],
        };
        match self.method {
            LevelMethod::ClosedForm | LevelMethod::Truncation { n: 1 } => pair,
            LevelMethod::Truncation { n } => match self.branch {
                BranchSelect::All => (0..=n).map(Branch::Root).collect(),
                BranchSelect::Minus => vec![Branch::Root(0)],
                BranchSelect::Plus => vec![Branch::Root(n)],
            },
        }
    }

    /// Levels at one parameter point.
    ///
    /// A negative closed-form discriminant is reported as `NegativeDiscriminant`;
    /// the truncation route returns an empty list when there is no real root.
    pub fn levels(&self, p: &PhysicalParams) -> Result<Vec<EnergyLevel>> {
        match self.method {
            LevelMethod::ClosedForm => {
                let mut out = Vec::new();
                for b in self.slots() {
                    out.push(ground_state_closed_form(p, b)?);
                }
                Ok(out)
            }
            LevelMethod::Truncation { n } => {
                let all = truncation_solve(p, n, self.variant)?;
                let slots = self.slots();
                let mut out: Vec<EnergyLevel> = match (n, self.branch) {
                    (1, _) | (_, BranchSelect::All) => all.into_iter().filter(|l| slots.contains(&l.branch)).collect(),
                    (_, BranchSelect::Minus) => all.into_iter().take(1).collect(),
                    (_, BranchSelect::Plus) => all.into_iter().last().into_iter().collect(),
                };
                if n > 1 && self.branch != BranchSelect::All {
                    out.iter_mut().for_each(|l| l.branch = slots[0]);
                }
                Ok(out)
            }
        }
    }

    /// The level carrying `branch`, ignoring the query's own branch selection.
    pub fn level(&self, p: &PhysicalParams, branch: Branch) -> Result<EnergyLevel> {
        let q = Self {
            branch: match branch {
                Branch::Plus => BranchSelect::Plus,
                Branch::Minus => BranchSelect::Minus,
                Branch::Root(_) => BranchSelect::All,
            },
            ..*self
        };
        q.levels(p)?
            .into_iter()
            .find(|l| l.branch == branch)
            .ok_or_else(|| Error::LevelMissing(format!("no {branch} level")))
    }

    /// Single-branch energy, for periodicity and affinity checks.
    pub fn energy(&self, p: &PhysicalParams, branch: Branch) -> Result<f64> {
        Ok(self.level(p, branch)?.energy)
    }
}

/// Swept parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweepParam {
    Flux,
    Beta,
    /// Rotation speed.
    Omega,
    Gamma,
    Omega0,
    K,
    Ell,
}

impl std::str::FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "flux" => SweepParam::Flux,
            "beta" => SweepParam::Beta,
            "Omega" => SweepParam::Omega,
            "gamma" => SweepParam::Gamma,
            "omega0" => SweepParam::Omega0,
            "k" => SweepParam::K,
            "ell" => SweepParam::Ell,
            other => {
                return Err(Error::InvalidParameter {
                    name: "param",
                    reason: format!("cannot sweep `{other}`"),
                })
            }
        })
    }
}

impl SweepParam {
    pub fn apply(self, p: &PhysicalParams, value: f64) -> PhysicalParams {
        let mut q = *p;
        match self {
            SweepParam::Flux => q.flux = value,
            SweepParam::Beta => q.beta = value,
            SweepParam::Omega => q.rotation = value,
            SweepParam::Gamma => q.gamma = value,
            SweepParam::Omega0 => q.omega0 = value,
            SweepParam::K => q.k = value,
            SweepParam::Ell => q.ell = value.round() as i64,
        }
        q
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub fixed: PhysicalParams,
}

impl SweepSpec {
    pub fn values(&self) -> Vec<f64> {
        let span = self.to - self.from;
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.to
                } else {
                    self.from + span * i as f64 / last
                }
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |reason: String| Err(Error::InvalidParameter { name: "sweep", reason });
        if self.steps < 2 {
            return bad(format!("steps = {} must be at least 2", self.steps));
        }
        if !(self.from.is_finite() && self.to.is_finite()) {
            return bad("range bounds must be finite".into());
        }
        if self.param == SweepParam::Ell {
            let stride = (self.to - self.from) / (self.steps - 1) as f64;
            if self.from.fract() != 0.0 || stride.fract() != 0.0 {
                return bad("ell sweeps need an integer start and an integer stride".into());
            }
        }
        // every constraint is an interval, so the end points decide
        for v in [self.from, self.to] {
            self.param.apply(&self.fixed, v).validate()?;
        }
        Ok(())
    }
}

/// One output row; level fields are `None` where no level exists.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub param_value: f64,
    pub ell: i64,
    pub branch: Branch,
    pub energy: Option<f64>,
    pub spectral: Option<f64>,
    pub discriminant: Option<f64>,
    pub termination_defect: Option<f64>,
}

fn rows_at(spec: &SweepSpec, query: &LevelQuery, value: f64) -> Result<Vec<SweepRow>> {
    let p = spec.param.apply(&spec.fixed, value);
    let slots = query.slots();
    let (levels, discriminant) = match query.levels(&p) {
        Ok(levels) => (levels, None),
        Err(Error::NegativeDiscriminant { discriminant }) => (Vec::new(), Some(discriminant)),
        Err(e) => return Err(e),
    };
    let discriminant = discriminant.or_else(|| {
        if let LevelMethod::Truncation { n: 1 } = query.method {
            crate::spectrum::n1_quadratic_discriminant(&p, query.variant).ok()
        } else {
            None
        }
    });
    Ok(slots
        .into_iter()
        .map(|branch| match levels.iter().find(|l| l.branch == branch) {
            Some(l) => SweepRow {
                param_value: value,
                ell: p.ell,
                branch,
                energy: Some(l.energy),
                spectral: Some(l.spectral),
                discriminant: l.discriminant,
                termination_defect: Some(l.termination_defect),
            },
            None => SweepRow {
                param_value: value,
                ell: p.ell,
                branch,
                energy: None,
                spectral: None,
                discriminant,
                termination_defect: None,
            },
        })
        .collect())
}

/// Runs a sweep; rows come out in parameter order, then slot order, whatever
/// the worker count.
pub fn run_sweep(spec: &SweepSpec, query: &LevelQuery, jobs: Option<usize>) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let values = spec.values();
    let work = || -> Result<Vec<SweepRow>> {
        let chunks: Vec<Vec<SweepRow>> = values
            .par_iter()
            .map(|&v| rows_at(spec, query, v))
            .collect::<Result<_>>()?;
        Ok(chunks.into_iter().flatten().collect())
    };
    match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::InvalidParameter {
                name: "jobs",
                reason: e.to_string(),
            })?
            .install(work),
        None => work(),
    }
}

/// Least-squares line through `(x, y)`: (slope, intercept, max |residual|).
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_res = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - (intercept + slope * a)).abs())
        .fold(0.0, f64::max);
    (slope, intercept, max_res)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> PhysicalParams {
        PhysicalParams::oscillator(1.0, 2.0, 0.2, 0.5, 1.0, 1).with_flux(0.1)
    }

    #[test]
    fn flux_sweep_period() {
        let spec = SweepSpec {
            param: SweepParam::Flux,
            from: 0.0,
            to: 3.0,
            steps: 121,
            fixed: base(),
        };
        let q = LevelQuery::closed_form(BranchSelect::All);
        let rows = run_sweep(&spec, &q, Some(2)).unwrap();
        assert_eq!(rows.len(), 121 * 2);
        // flux phi and ell against flux phi + 1 and ell + 1
        let shifted = SweepSpec {
            fixed: base().with_ell(2),
            ..spec.clone()
        };
        let rows2 = run_sweep(&shifted, &q, None).unwrap();
        for i in 0..=80 {
            for b in 0..2 {
                let a = &rows[2 * i + b];
                let c = &rows2[2 * (i + 40) + b];
                match (a.energy, c.energy) {
                    (Some(x), Some(y)) => assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0)),
                    (None, None) => {}
                    other => panic!("{other:?}"),
                }
            }
        }
    }

    #[test]
    fn row_counts_and_order_do_not_depend_on_jobs() {
        let spec = SweepSpec {
            param: SweepParam::Beta,
            from: 0.2,
            to: 0.8,
            steps: 2,
            fixed: base(),
        };
        let q = LevelQuery::truncation(2, BranchSelect::All);
        let a = run_sweep(&spec, &q, Some(1)).unwrap();
        assert_eq!(a.len(), 2 * 3);
        let spec = SweepSpec { steps: 37, ..spec };
        let a = run_sweep(&spec, &q, Some(1)).unwrap();
        let b = run_sweep(&spec, &q, Some(4)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn missing_levels_keep_their_rows() {
        // M = omega0 = 1, beta = 0.5, gamma = 0: closed form has no real level near iota = 0.25
        let fixed = PhysicalParams::oscillator(1.0, 1.0, 0.0, 0.5, 1.0, 1);
        let spec = SweepSpec {
            param: SweepParam::Flux,
            from: 0.2,
            to: 0.3,
            steps: 3,
            fixed,
        };
        let rows = run_sweep(&spec, &LevelQuery::closed_form(BranchSelect::All), None).unwrap();
        assert_eq!(rows.len(), 6);
        assert!(rows.iter().all(|r| r.energy.is_none() && r.discriminant.unwrap() < 0.0));
    }

    #[test]
    fn rotation_affine() {
        let spec = SweepSpec {
            param: SweepParam::Omega,
            from: -2.0,
            to: 2.0,
            steps: 21,
            fixed: PhysicalParams { omega0: 8.0, ..base() },
        };
        let rows = run_sweep(&spec, &LevelQuery::truncation(1, BranchSelect::Plus), None).unwrap();
        let x: Vec<f64> = rows.iter().map(|r| r.param_value).collect();
        let y: Vec<f64> = rows.iter().map(|r| r.energy.unwrap()).collect();
        let (slope, _, res) = linear_fit(&x, &y);
        assert!((slope + base().iota()).abs() < 1e-12);
        assert!(res < 1e-12);
    }

    #[test]
    fn invalid_ranges() {
        let mk = |param, from, to, steps| SweepSpec {
            param,
            from,
            to,
            steps,
            fixed: base(),
        };
        assert!(mk(SweepParam::Beta, 0.5, 1.2, 5).validate().is_err());
        assert!(mk(SweepParam::K, -1.0, 1.0, 5).validate().is_err());
        assert!(mk(SweepParam::Flux, 0.0, 1.0, 1).validate().is_err());
        assert!(mk(SweepParam::Ell, 0.0, 3.0, 3).validate().is_err());
        assert!(mk(SweepParam::Ell, -2.0, 2.0, 5).validate().is_ok());
        assert_eq!(mk(SweepParam::Ell, -2.0, 2.0, 5).values(), vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
    }

    #[test]
    fn slot_layout() {
        assert_eq!(LevelQuery::truncation(3, BranchSelect::All).slots().len(), 4);
        assert_eq!(LevelQuery::truncation(3, BranchSelect::Plus).slots(), vec![Branch::Root(3)]);
        assert_eq!(LevelQuery::closed_form(BranchSelect::All).slots(), vec![Branch::Minus, Branch::Plus]);
    }
}
