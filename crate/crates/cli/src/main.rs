//! `dislocation`: energies, sweeps, oracle spectra, wavefunctions and the
//! verification suite from the command line.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dislocation_core::oracle::{oracle_eigenvalues_with, oracle_vs_closed_form_report, Discretization};
use dislocation_core::output::{self, fmt_f64};
use dislocation_core::spectrum::{ground_state_wavefunction, truncation_wavefunction};
use dislocation_core::verify::DEFAULT_SEED;
use dislocation_core::{
    run_sweep, run_verify, Branch, BranchSelect, EnergyLevel, Error, GridMode, GridSpec, LevelQuery, Model,
    ParamWarning, PhysicalParams, SweepParam, SweepSpec, VerifyOptions,
};
use serde_json::json;

#[derive(Parser)]
#[command(name = "dislocation", version, about = "Bound-state spectra in a rotating screw-dislocation background")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Quantized energies at one parameter point (JSON).
    Energy(EnergyArgs),
    /// Energies along one parameter (CSV).
    Sweep(SweepArgs),
    /// Finite-volume spectrum of the radial equation (CSV).
    Oracle(OracleArgs),
    /// Run the verification suite.
    Verify(VerifyArgs),
    /// Radial profile of one state on a uniform x grid (CSV).
    Wavefunction(WavefunctionArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Oscillator,
    InverseSquare,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    ClosedForm,
    Truncation,
}

#[derive(Clone, Copy, ValueEnum)]
enum BranchArg {
    Plus,
    Minus,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Outer,
    Core,
    Flat,
}

#[derive(Clone, Copy, ValueEnum)]
enum DiscretizationArg {
    Flux,
    Liouville,
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum, default_value = "oscillator")]
    model: ModelArg,
    #[arg(long, default_value_t = 1.0)]
    mass: f64,
    /// Oscillator frequency; defaults to 1 (oscillator) or 0 (inverse-square).
    #[arg(long)]
    omega0: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    #[arg(long, default_value_t = 0.5)]
    beta: f64,
    /// Angular speed of the rotating frame.
    #[arg(long = "Omega", default_value_t = 0.0)]
    omega: f64,
    #[arg(long, default_value_t = 0.0)]
    flux: f64,
    #[arg(long, default_value_t = 1.0)]
    k: f64,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    ell: i64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads for sweeps.
    #[arg(long)]
    jobs: Option<usize>,
    /// Output path, `-` for standard output.
    #[arg(long, default_value = "-")]
    out: String,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

impl Common {
    fn params(&self) -> PhysicalParams {
        let model = match self.model {
            ModelArg::Oscillator => Model::OscillatorInverseSquare,
            ModelArg::InverseSquare => Model::InverseSquareOnly,
        };
        let omega0 = self.omega0.unwrap_or(match model {
            Model::OscillatorInverseSquare => 1.0,
            Model::InverseSquareOnly => 0.0,
        });
        PhysicalParams {
            mass: self.mass,
            omega0,
            gamma: self.gamma,
            delta: self.delta,
            beta: self.beta,
            rotation: self.omega,
            flux: self.flux,
            k: self.k,
            ell: self.ell,
            model,
        }
    }

    fn sink(&self) -> io::Result<Box<dyn Write>> {
        Ok(if self.out == "-" {
            Box::new(BufWriter::new(io::stdout().lock()))
        } else {
            Box::new(BufWriter::new(File::create(&self.out)?))
        })
    }
}

#[derive(Args)]
struct LevelArgs {
    /// Radial mode (degree of the truncated series).
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, value_enum, default_value = "all")]
    branch: BranchArg,
    #[arg(long, value_enum, default_value = "closed-form")]
    method: Method,
}

impl LevelArgs {
    fn query(&self) -> Result<LevelQuery, Error> {
        let branch = match self.branch {
            BranchArg::Plus => BranchSelect::Plus,
            BranchArg::Minus => BranchSelect::Minus,
            BranchArg::All => BranchSelect::All,
        };
        match self.method {
            Method::ClosedForm if self.n != 1 => Err(Error::InvalidParameter {
                name: "n",
                reason: "the closed form exists for n = 1 only; use --method truncation".into(),
            }),
            Method::ClosedForm => Ok(LevelQuery::closed_form(branch)),
            Method::Truncation => Ok(LevelQuery::truncation(self.n, branch)),
        }
    }
}

#[derive(Args)]
struct EnergyArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    level: LevelArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    level: LevelArgs,
    /// flux, beta, Omega, gamma, omega0, k or ell.
    #[arg(long)]
    param: String,
    #[arg(long, allow_negative_numbers = true)]
    from: f64,
    #[arg(long, allow_negative_numbers = true)]
    to: f64,
    #[arg(long)]
    steps: usize,
    /// Also write a gnuplot script plotting energy against the swept value.
    #[arg(long)]
    gnuplot: Option<String>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value = "flat")]
    mode: ModeArg,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    rmin: Option<f64>,
    #[arg(long)]
    rmax: Option<f64>,
    #[arg(long, default_value_t = 5)]
    neigs: usize,
    #[arg(long, value_enum, default_value = "flux")]
    discretization: DiscretizationArg,
    /// Emit the n = 1 levels next to core, outer and flat spectra (JSON).
    #[arg(long)]
    compare: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    /// Fewer random draws.
    #[arg(long)]
    fast: bool,
    #[arg(long, hide = true)]
    tamper_d2_sign: bool,
}

#[derive(Args)]
struct WavefunctionArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// plus, minus or root-k.
    #[arg(long, default_value = "plus")]
    branch: String,
    #[arg(long, value_enum, default_value = "closed-form")]
    method: Method,
    #[arg(long, default_value_t = 0.9)]
    xmax: f64,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    /// Also write a gnuplot script plotting psi against r.
    #[arg(long)]
    gnuplot: Option<String>,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::NegativeDiscriminant { .. } => (2, "negative-discriminant"),
            Error::LevelMissing(_) => (2, "no-real-level"),
            Error::InvalidParameter { .. } | Error::ModelMismatch { .. } => (1, "invalid-input"),
            Error::InvalidGrid(_) => (1, "invalid-grid"),
            Error::Io(_) => (1, "io"),
            Error::Domain { .. } | Error::OutsideConvergence { .. } | Error::PointOutOfDomain { .. } => (1, "domain"),
            _ => (1, "numerical"),
        };
        Failure {
            code,
            kind,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Error::from(e).into()
    }
}

fn checked(p: PhysicalParams) -> Result<PhysicalParams, Failure> {
    p.validate()?;
    for w in p.warnings() {
        if w == ParamWarning::NegativeFlux {
            eprintln!("{}", json!({"warning": "negative-flux", "flux": p.flux}));
        }
    }
    Ok(p)
}

fn write_levels(common: &Common, levels: &[EnergyLevel]) -> Result<(), Failure> {
    let mut out = common.sink()?;
    match common.format.unwrap_or(Format::Json) {
        Format::Json => writeln!(out, "{}", output::levels_json(levels))?,
        Format::Csv => {
            writeln!(out, "n,ell,branch,energy,spectral,discriminant,termination_defect,c1_over_c0")?;
            for l in levels {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    l.n,
                    l.ell,
                    l.branch,
                    fmt_f64(l.energy),
                    fmt_f64(l.spectral),
                    l.discriminant.map(fmt_f64).unwrap_or_default(),
                    fmt_f64(l.termination_defect),
                    fmt_f64(l.c1_over_c0)
                )?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn cmd_energy(a: &EnergyArgs) -> Result<(), Failure> {
    let p = checked(a.common.params())?;
    let levels = a.level.query()?.levels(&p)?;
    if levels.is_empty() {
        return Err(Error::LevelMissing("the truncation condition has no real root".into()).into());
    }
    write_levels(&a.common, &levels)
}

fn cmd_sweep(a: &SweepArgs) -> Result<(), Failure> {
    let fixed = a.common.params();
    let spec = SweepSpec {
        param: a.param.parse::<SweepParam>()?,
        from: a.from,
        to: a.to,
        steps: a.steps,
        fixed,
    };
    let rows = run_sweep(&spec, &a.level.query()?, a.common.jobs)?;
    let mut out = a.common.sink()?;
    match a.common.format.unwrap_or(Format::Csv) {
        Format::Csv => output::write_sweep(&mut out, &rows)?,
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&rows).expect("rows serialize"))?,
    }
    out.flush()?;
    if let Some(path) = &a.gnuplot {
        let data = if a.common.out == "-" { "sweep.csv" } else { a.common.out.as_str() };
        std::fs::write(path, output::gnuplot_stub(data, 1, 4, &format!("energy vs {}", a.param)))?;
    }
    Ok(())
}

fn cmd_oracle(a: &OracleArgs) -> Result<(), Failure> {
    let p = checked(a.common.params())?;
    let mut out = a.common.sink()?;
    if a.compare {
        let rep = oracle_vs_closed_form_report(&p, a.points.unwrap_or(dislocation_core::tolerances::ORACLE_POINTS), a.neigs)?;
        writeln!(out, "{}", serde_json::to_string_pretty(&rep).expect("report serializes"))?;
        out.flush()?;
        return Ok(());
    }
    let mode = match a.mode {
        ModeArg::Outer => GridMode::Outer,
        ModeArg::Core => GridMode::Core,
        ModeArg::Flat => GridMode::Flat,
    };
    let mut grid = GridSpec::default_for(&p, mode);
    if let Some(n) = a.points {
        grid.n_points = n;
    }
    if let Some(r) = a.rmin {
        grid.r_min = r;
    }
    if let Some(r) = a.rmax {
        grid.r_max = r;
    }
    let method = match a.discretization {
        DiscretizationArg::Flux => Discretization::FluxForm,
        DiscretizationArg::Liouville => Discretization::Liouville,
    };
    let res = oracle_eigenvalues_with(&p, &grid, a.neigs, method)?;
    match a.common.format.unwrap_or(Format::Csv) {
        Format::Csv => output::write_oracle(&mut out, &res)?,
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&res).expect("result serializes"))?,
    }
    out.flush()?;
    Ok(())
}

fn cmd_verify(a: &VerifyArgs) -> Result<bool, Failure> {
    let opts = VerifyOptions {
        fast: a.fast,
        seed: a.common.seed,
        tamper_d2_sign: a.tamper_d2_sign,
    };
    let report = run_verify(&opts);
    let stdout = io::stdout();
    let mut table = stdout.lock();
    write!(table, "{}", report.table())?;
    if a.common.out == "-" {
        writeln!(table, "{}", report.to_json())?;
    } else {
        std::fs::write(&a.common.out, report.to_json() + "\n")?;
    }
    table.flush()?;
    Ok(report.passed())
}

fn cmd_wavefunction(a: &WavefunctionArgs) -> Result<(), Failure> {
    let p = checked(a.common.params())?;
    let branch: Branch = a.branch.parse()?;
    let sol = match a.method {
        Method::ClosedForm => {
            if a.n != 1 {
                return Err(Error::InvalidParameter {
                    name: "n",
                    reason: "the closed form exists for n = 1 only; use --method truncation".into(),
                }
                .into());
            }
            let w = ground_state_wavefunction(&p, branch)?;
            if w.relative_difference > dislocation_core::tolerances::WAVEFUNCTION_SEED {
                eprintln!(
                    "{}",
                    json!({"warning": "seed-mismatch", "c1": w.solution.coeffs[1], "seed_c1": w.seed_c1})
                );
            }
            w.solution
        }
        Method::Truncation => {
            let q = LevelQuery::truncation(a.n, BranchSelect::All);
            let level = q.level(&p, branch)?;
            truncation_wavefunction(&p, &level, q.variant)?
        }
    };
    let rows = output::wavefunction_samples(&sol, a.xmax, a.samples)?;
    let mut out = a.common.sink()?;
    match a.common.format.unwrap_or(Format::Csv) {
        Format::Csv => output::write_wavefunction(&mut out, &rows)?,
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&rows).expect("rows serialize"))?,
    }
    out.flush()?;
    if let Some(path) = &a.gnuplot {
        let data = if a.common.out == "-" { "wavefunction.csv" } else { a.common.out.as_str() };
        std::fs::write(path, output::gnuplot_stub(data, 2, 3, "psi vs r"))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let message = e.render().to_string();
            eprintln!("{}", json!({"error": "invalid-input", "message": message.trim()}));
            return ExitCode::from(1);
        }
    };
    let result = match &cli.command {
        Command::Energy(a) => cmd_energy(a).map(|_| true),
        Command::Sweep(a) => cmd_sweep(a).map(|_| true),
        Command::Oracle(a) => cmd_oracle(a).map(|_| true),
        Command::Verify(a) => cmd_verify(a),
        Command::Wavefunction(a) => cmd_wavefunction(a).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("{}", json!({"error": f.kind, "message": f.message}));
            ExitCode::from(f.code)
        }
    }
}
