//! Command-line front end.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::density::{kde_estimate, linspace, ConstantFieldLaw, DensityEstimate};
use crate::error::{Error, Result};
use crate::fbm::{FbmGenerator, FbmMethod, TimeGrid};
use crate::grey_sampler::sample_marginal_with;
use crate::harness::config::{ExperimentConfig, Suite};
use crate::harness::io::{paths_to_csv, rows_to_csv, write_reports, write_text};
use crate::harness::{checks, verify_suite};
use crate::report::{reports_from_json, reports_to_json, RunReport};
use crate::rng::{MonteCarlo, SEED_ENV};
use crate::sde::fields::{BuiltinField, VectorFieldSet};
use crate::sde::solver::GreySdeSolver;
use crate::specfun::{gamma, m_wright_cdf, m_wright_pdf, mittag_leffler, GreyParams};
use crate::young::young_integral_paths;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "greysim", version, about = "Generalized grey Brownian motion simulation and verification")]
pub struct Cli {
    /// Log level (error, warn, info, debug, trace).
    #[arg(long, global = true, default_value = "warn")]
    pub log: String,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a special function.
    Specfun(SpecfunArgs),
    /// Draw ggBm marginal samples B(t).
    Sample(SampleArgs),
    /// Generate fractional Brownian motion paths.
    Fbm(FbmArgs),
    /// Young integral of two CSV paths, or the built-in self test.
    Young(YoungArgs),
    /// Solve the grey-noise SDE for one of the built-in fields.
    Solve(SolveArgs),
    /// Density of X_t for constant fields, by quadrature or KDE.
    Density(DensityArgs),
    /// Run verification suites and emit JSON reports.
    Verify(VerifyArgs),
    /// Summarise a JSON report file.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpecfunName {
    Gamma,
    MittagLeffler,
    MWrightPdf,
    MWrightCdf,
}

#[derive(Debug, Args)]
pub struct SpecfunArgs {
    #[arg(value_enum)]
    pub function: SpecfunName,
    /// Point(s) of evaluation.
    #[arg(long, required = true, num_args = 1.., allow_negative_numbers = true)]
    pub x: Vec<f64>,
    /// Order β (not used by gamma).
    #[arg(long)]
    pub beta: Option<f64>,
}

#[derive(Debug, Args, Clone)]
pub struct ParamArgs {
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
}

impl ParamArgs {
    fn resolve(&self, fallback: Option<GreyParams>) -> Result<GreyParams> {
        match (self.alpha, self.beta, fallback) {
            (Some(a), Some(b), _) => GreyParams::new(a, b),
            (None, None, Some(p)) => Ok(p),
            (Some(a), None, Some(p)) => GreyParams::new(a, p.beta()),
            (None, Some(b), Some(p)) => GreyParams::new(p.alpha(), b),
            (None, _, None) => Err(Error::Config("missing --alpha".into())),
            (_, None, None) => Err(Error::Config("missing --beta".into())),
        }
    }
}

#[derive(Debug, Args, Clone)]
pub struct RunArgs {
    /// Seed; defaults to $GREYSIM_SEED, then 42.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub streams: Option<usize>,
}

impl RunArgs {
    fn seed(&self, fallback: Option<u64>) -> Result<u64> {
        if let Some(s) = self.seed {
            return Ok(s);
        }
        if let Some(s) = fallback {
            return Ok(s);
        }
        match std::env::var(SEED_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("{SEED_ENV}='{v}' is not an unsigned integer"))),
            Err(_) => Ok(42),
        }
    }

    fn monte_carlo(&self) -> Result<MonteCarlo> {
        Ok(MonteCarlo::new(self.seed(None)?, self.streams.unwrap_or(8)))
    }
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    #[arg(long, default_value_t = 10_000)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FbmArgs {
    #[arg(long)]
    pub hurst: f64,
    #[arg(long, default_value_t = 1.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 256)]
    pub steps: usize,
    #[arg(long, default_value_t = 1)]
    pub paths: usize,
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    #[arg(long, default_value = "circulant")]
    pub method: FbmMethod,
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct YoungArgs {
    /// `selftest`, or omit and pass --integrand/--integrator.
    pub mode: Option<String>,
    #[arg(long)]
    pub integrand: Option<PathBuf>,
    #[arg(long)]
    pub integrator: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FieldName {
    Constant,
    Geometric,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// TOML experiment file supplying params, grid, field and run settings.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, value_enum)]
    pub field: Option<FieldName>,
    /// Diffusion coefficient of the scalar constant field.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub drift: f64,
    /// Rate of the scalar geometric field.
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub a: f64,
    #[arg(long, num_args = 1.., allow_negative_numbers = true)]
    pub x0: Option<Vec<f64>>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub paths: usize,
    #[arg(long)]
    pub method: Option<FbmMethod>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DensityMethodArg {
    Mixture,
    Kde,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub drift: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub x0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    #[arg(long, default_value_t = -5.0, allow_negative_numbers = true)]
    pub zmin: f64,
    #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
    pub zmax: f64,
    #[arg(long, default_value_t = 201)]
    pub points: usize,
    #[arg(long, value_enum, default_value = "mixture")]
    pub method: DensityMethodArg,
    /// Sample count for KDE.
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long)]
    pub bandwidth: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Suites to run; repeatable, `all` for everything.
    #[arg(long, num_args = 1..)]
    pub suite: Vec<Suite>,
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub paths: Option<usize>,
    /// Report file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Zero the runtime field so repeated runs are byte-identical.
    #[arg(long)]
    pub deterministic: bool,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    pub file: PathBuf,
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_text(p, text),
        None => print_out(text),
    }
}

/// Writes to stdout; a closed reader (e.g. `| head`) is not an error.
fn print_out(text: &str) -> Result<()> {
    match std::io::stdout().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn emit_reports(out: Option<&PathBuf>, reports: &[RunReport]) -> Result<i32> {
    match out {
        Some(p) => write_reports(p, reports)?,
        None => print_out(&format!("{}\n", reports_to_json(reports)?))?,
    }
    Ok(if reports.iter().all(|r| r.pass) {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}

fn run_specfun(a: &SpecfunArgs) -> Result<i32> {
    let beta = || a.beta.ok_or_else(|| Error::Config("missing --beta".into()));
    for &x in &a.x {
        let v = match a.function {
            SpecfunName::Gamma => gamma(x)?,
            SpecfunName::MittagLeffler => mittag_leffler(beta()?, x)?,
            SpecfunName::MWrightPdf => m_wright_pdf(beta()?, x)?,
            SpecfunName::MWrightCdf => m_wright_cdf(beta()?, x)?,
        };
        print_out(&format!("{v:.17e}\n"))?;
    }
    Ok(EXIT_OK)
}

fn run_sample(a: &SampleArgs) -> Result<i32> {
    let params = a.params.resolve(None)?;
    if a.dim == 0 || !(a.t >= 0.0) {
        return Err(Error::Config("need --dim >= 1 and --t >= 0".into()));
    }
    let mc = a.run.monte_carlo()?;
    let rows: Vec<Vec<f64>> = mc.shards(a.n, |rng, n| {
        (0..n).map(|_| sample_marginal_with(&params, a.t, a.dim, rng)).collect()
    });
    let names: Vec<String> = (1..=a.dim).map(|j| format!("x{j}")).collect();
    emit(a.out.as_ref(), &rows_to_csv(&names, &rows))?;
    Ok(EXIT_OK)
}

fn run_fbm(a: &FbmArgs) -> Result<i32> {
    let grid = TimeGrid::new(a.horizon, a.steps)?;
    let gen = FbmGenerator::new(a.method, a.hurst, grid)?;
    let mc = a.run.monte_carlo()?;
    let paths = mc.shards(a.paths, |rng, n| (0..n).map(|_| gen.sample(a.dim, rng)).collect());
    emit(a.out.as_ref(), &paths_to_csv(&paths))?;
    Ok(EXIT_OK)
}

fn run_young(a: &YoungArgs) -> Result<i32> {
    match (a.mode.as_deref(), &a.integrand, &a.integrator) {
        (Some("selftest"), None, None) => {
            let mc = a.run.monte_carlo()?;
            let reports: Vec<_> = checks::young_reports(0.75, 20, &mc)?
                .into_iter()
                .map(|r| r.with_run(mc.seed, mc.streams))
                .collect();
            emit_reports(None, &reports)
        }
        (None, Some(f), Some(g)) => {
            let read = |p: &PathBuf| -> Result<_> {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?;
                crate::harness::io::path_from_csv(&text)
            };
            let r = young_integral_paths(&read(f)?, &read(g)?)?;
            print_out(&format!("{}\n", serde_json::to_string_pretty(&r)?))?;
            Ok(EXIT_OK)
        }
        _ => Err(Error::Config("use `young selftest` or --integrand A.csv --integrator B.csv".into())),
    }
}

fn run_solve(a: &SolveArgs) -> Result<i32> {
    let base = a.config.as_ref().map(|p| ExperimentConfig::load(p)).transpose()?;
    let params = a.params.resolve(base.as_ref().map(|c| c.params))?;
    let field = match (a.field, &base) {
        (Some(FieldName::Constant), _) => BuiltinField::constant_scalar(a.sigma, a.drift),
        (Some(FieldName::Geometric), _) => BuiltinField::Geometric { a: a.a, radius: 50.0 },
        (None, Some(c)) => c.field.clone(),
        (None, None) => return Err(Error::Config("missing --field".into())),
    };
    let fields = VectorFieldSet::new(field)?;
    let horizon = a.t.or(base.as_ref().map(|c| c.grid.horizon)).unwrap_or(1.0);
    let steps = a.steps.or(base.as_ref().map(|c| c.grid.steps)).unwrap_or(256);
    let method = a.method.or(base.as_ref().map(|c| c.run.method)).unwrap_or(FbmMethod::Circulant);
    let x0 = match (&a.x0, &base) {
        (Some(x), _) => x.clone(),
        (None, Some(c)) => c.x0()?,
        (None, None) => vec![0.0; fields.state_dim()],
    };
    let seed = a.run.seed(base.as_ref().map(|c| c.run.seed))?;
    let streams = a.run.streams.or(base.as_ref().map(|c| c.run.streams)).unwrap_or(8);
    let solver = GreySdeSolver::new(fields, x0, params, TimeGrid::new(horizon, steps)?, method)?;
    let mc = MonteCarlo::new(seed, streams);
    let solved: Vec<Result<_>> = mc.stream_shards(a.paths, |stream, n| {
        let mut mixing = stream.rng();
        let mut driver = stream.lane(crate::grey_sampler::DRIVER_LANE).rng();
        (0..n)
            .map(|_| solver.solve_with(&mut mixing, &mut driver).map(|s| s.path))
            .collect()
    });
    let paths = solved.into_iter().collect::<Result<Vec<_>>>()?;
    emit(a.out.as_ref(), &paths_to_csv(&paths))?;
    Ok(EXIT_OK)
}

fn run_density(a: &DensityArgs) -> Result<i32> {
    let params = a.params.resolve(None)?;
    if a.points < 2 || !(a.zmax > a.zmin) {
        return Err(Error::Config("need --points >= 2 and --zmax > --zmin".into()));
    }
    let zs = linspace(a.zmin, a.zmax, a.points);
    let grid: Vec<Vec<f64>> = zs.iter().map(|&z| vec![z]).collect();
    let law = ConstantFieldLaw::new(params, &[vec![a.sigma]], &[a.drift], &[a.x0], a.t)?;
    let est: DensityEstimate = match a.method {
        DensityMethodArg::Mixture => law.estimate(&grid)?,
        DensityMethodArg::Kde => {
            let fields = VectorFieldSet::new(BuiltinField::constant_scalar(a.sigma, a.drift))?;
            let mc = a.run.monte_carlo()?;
            let samples: Vec<Vec<f64>> = mc.shards(a.samples, |rng, n| {
                (0..n)
                    .map(|_| {
                        let b = sample_marginal_with(&params, a.t, 1, rng)[0];
                        vec![a.x0 + a.drift * a.t + a.sigma * b]
                    })
                    .collect()
            });
            let _ = fields;
            kde_estimate(&samples, &grid, a.bandwidth)?
        }
    };
    emit(a.out.as_ref(), &est.to_csv())?;
    Ok(EXIT_OK)
}

fn run_verify(a: &VerifyArgs) -> Result<i32> {
    let mut cfg = match &a.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::new(a.params.resolve(None)?),
    };
    cfg.params = a.params.resolve(Some(cfg.params))?;
    if !a.suite.is_empty() {
        cfg.checks.suites = a.suite.clone();
    }
    cfg.run.seed = a.run.seed(a.config.as_ref().map(|_| cfg.run.seed))?;
    if let Some(s) = a.run.streams {
        cfg.run.streams = s;
    }
    if let Some(n) = a.samples {
        cfg.run.samples = n;
    }
    if let Some(n) = a.paths {
        cfg.run.paths = n;
    }
    cfg.validate()?;
    let mut reports = verify_suite(&cfg);
    if a.deterministic {
        for r in &mut reports {
            r.runtime_ms = 0;
        }
    }
    let out = a.out.clone().or(cfg.output.reports.clone());
    emit_reports(out.as_ref(), &reports)
}

fn run_report(a: &ReportArgs) -> Result<i32> {
    let text = std::fs::read_to_string(&a.file)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", a.file.display())))?;
    let reports = reports_from_json(&text)?;
    let mut failed = 0;
    for r in &reports {
        let pass = r.recomputed_pass();
        if pass != r.pass {
            log::warn!("{}: stored pass flag disagrees with its numbers", r.check_id);
        }
        if !pass {
            failed += 1;
        }
        print_out(&format!("{r}\n"))?;
    }
    print_out(&format!("{} checks, {} passed, {} failed\n", reports.len(), reports.len() - failed, failed))?;
    Ok(if failed == 0 { EXIT_OK } else { EXIT_CHECK_FAILED })
}

pub fn execute(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Specfun(a) => run_specfun(a),
        Command::Sample(a) => run_sample(a),
        Command::Fbm(a) => run_fbm(a),
        Command::Young(a) => run_young(a),
        Command::Solve(a) => run_solve(a),
        Command::Density(a) => run_density(a),
        Command::Verify(a) => run_verify(a),
        Command::Report(a) => run_report(a),
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let _ = env_logger::Builder::new().parse_filters(&cli.log).try_init();
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
