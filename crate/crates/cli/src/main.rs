//! `saddle-bounds`: bound, sweep, generate and verify subcommands.
//!
//! Exit codes: 0 ok, 1 invariant violation or numerical failure, 2 input
//! error, 3 oracle size cap exceeded.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use saddle_bounds::bounds::{all_bounds, all_bounds_auto, SaddleProblem};
use saddle_bounds::error::ErrorCategory;
use saddle_bounds::harness::{
    certify_with, gamma_sweep, log_grid, oracle_with_cap, verify_problem, VerifyConfig, DEFAULT_GRID_MAX,
    DEFAULT_GRID_MIN, DEFAULT_GRID_POINTS, DEFAULT_SIZE_CAP,
};
use saddle_bounds::io::{
    bounds_csv, read_problem, write_matrix_market, write_report, GridSpec, OutputFormat, ProblemFileSet,
    ProblemInfo, ProblemSource, ReportEnvelope, RunConfig,
};
use saddle_bounds::problems::GeneratorSpec;
use saddle_bounds::{Error, Result};

#[derive(Parser)]
#[command(name = "saddle-bounds", version, about = "Certified lower bounds on the positive eigenvalues of saddle-point matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute every applicable bound and certify it against a dense eigensolve.
    Bound(BoundArgs),
    /// Evaluate min{1/gamma, mu_min(A_gamma)} on a log-spaced gamma grid.
    Sweep(SweepArgs),
    /// Write a generated problem as Matrix Market files plus its spec.
    Generate(GenerateArgs),
    /// Run the invariant suite; exits 1 on any violation.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct ProblemArgs {
    /// Leading block A (Matrix Market).
    #[arg(long = "A", value_name = "FILE", requires = "b", required_unless_present = "k")]
    a: Option<PathBuf>,
    /// Constraint block B (Matrix Market).
    #[arg(long = "B", value_name = "FILE", requires = "a")]
    b: Option<PathBuf>,
    /// Pre-assembled K, split after row and column n.
    #[arg(long = "K", value_name = "FILE", conflicts_with_all = ["a", "b"], requires = "n")]
    k: Option<PathBuf>,
    #[arg(long = "n", value_name = "INT")]
    n: Option<usize>,
    /// Relative rank tolerance; default (n + m) * eps.
    #[arg(long = "relTol", value_name = "FLOAT")]
    rel_tol: Option<f64>,
    /// Largest n + m handed to the dense oracle.
    #[arg(long = "size-cap", value_name = "INT", default_value_t = DEFAULT_SIZE_CAP)]
    size_cap: usize,
}

impl ProblemArgs {
    fn files(&self) -> ProblemFileSet {
        match (&self.a, &self.b, &self.k, self.n) {
            (Some(a), Some(b), _, _) => ProblemFileSet::Blocks {
                a: a.clone(),
                b: b.clone(),
            },
            (_, _, Some(k), Some(n)) => ProblemFileSet::Assembled { k: k.clone(), n },
            _ => unreachable!("clap enforces --A/--B or --K/--n"),
        }
    }

    fn config(&self, format: OutputFormat, grid: GridSpec) -> Result<RunConfig> {
        let cfg = RunConfig {
            rel_tol: self.rel_tol,
            format,
            grid,
            size_cap: self.size_cap,
            ..RunConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn load(&self, cfg: &RunConfig) -> Result<(ProblemFileSet, SaddleProblem)> {
        let files = self.files();
        let p = read_problem(&files, cfg.problem_options())?;
        Ok((files, p))
    }
}

#[derive(Args)]
struct BoundArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Weight for the W = gamma I augmentation bounds.
    #[arg(long, value_name = "FLOAT", conflicts_with = "auto_gamma")]
    gamma: Option<f64>,
    /// Use the optimal gamma (lowest-rank problems) or fall back to the
    /// general-rank bound.
    #[arg(long = "auto-gamma")]
    auto_gamma: bool,
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    #[arg(long)]
    csv: bool,
    /// Output directory; stdout when omitted.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long = "gamma-min", value_name = "FLOAT", default_value_t = DEFAULT_GRID_MIN)]
    gamma_min: f64,
    #[arg(long = "gamma-max", value_name = "FLOAT", default_value_t = DEFAULT_GRID_MAX)]
    gamma_max: f64,
    #[arg(long, value_name = "INT", default_value_t = DEFAULT_GRID_POINTS)]
    points: usize,
    /// Output directory for report.json and sweep.csv; CSV on stdout when
    /// omitted.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Toy,
    Remark,
    Angles,
    Ipm,
    Random,
}

impl FamilyArg {
    fn tag(self) -> &'static str {
        match self {
            FamilyArg::Toy => "toy-2x2",
            FamilyArg::Remark => "remark-3x3",
            FamilyArg::Angles => "prescribed-angles",
            FamilyArg::Ipm => "ipm-like",
            FamilyArg::Random => "random-lowest-rank",
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Family parameters as a JSON object, e.g. '{"b1":0.6,"b2":0.8}'.
    #[arg(long, value_name = "JSON", default_value = "{}")]
    params: String,
    #[arg(long, value_name = "INT", default_value_t = 0)]
    seed: u64,
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Check only this gamma instead of the default set.
    #[arg(long, value_name = "FLOAT")]
    gamma: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Bound(args) => run_bound(args),
        Command::Sweep(args) => run_sweep(args),
        Command::Generate(args) => run_generate(args),
        Command::Verify(args) => run_verify(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.category() {
                ErrorCategory::Input => 2,
                ErrorCategory::SizeCap => 3,
                ErrorCategory::Computation => 1,
            })
        }
    }
}

fn run_bound(args: &BoundArgs) -> Result<ExitCode> {
    let format = if args.csv { OutputFormat::Csv } else { OutputFormat::Json };
    let cfg = args.problem.config(format, GridSpec::default())?;
    let (files, p) = args.problem.load(&cfg)?;
    if let Some(g) = args.gamma {
        if !(g > 0.0 && g.is_finite()) {
            return Err(Error::ParameterOutOfRange(format!("--gamma must be positive, got {g}")));
        }
    }
    let bounds = if args.auto_gamma {
        all_bounds_auto(&p)?.1
    } else {
        all_bounds(&p, args.gamma)?
    };
    let certification = if p.n() + p.m() <= cfg.size_cap {
        let o = oracle_with_cap(&p, cfg.size_cap)?;
        Some(bounds.iter().map(|r| certify_with(r, &o, cfg.cert_slack)).collect::<Vec<_>>())
    } else {
        None
    };
    let envelope = ReportEnvelope {
        problem: ProblemInfo::new(ProblemSource::Files { files }, &p),
        config: cfg,
        bounds,
        certification,
        sweep: None,
    };
    match &args.out {
        Some(dir) => {
            write_report(dir, &envelope, format)?;
        }
        None if format == OutputFormat::Csv => {
            print!("{}", bounds_csv(&envelope.bounds, envelope.certification.as_deref()))
        }
        None => print!("{}", envelope.to_json()?),
    }
    Ok(ExitCode::SUCCESS)
}

fn run_sweep(args: &SweepArgs) -> Result<ExitCode> {
    let grid = GridSpec {
        min: args.gamma_min,
        max: args.gamma_max,
        points: args.points,
    };
    let cfg = args.problem.config(OutputFormat::Csv, grid)?;
    let (files, p) = args.problem.load(&cfg)?;
    if p.n() + p.m() > cfg.size_cap {
        return Err(Error::SizeCapExceeded {
            size: p.n() + p.m(),
            cap: cfg.size_cap,
        });
    }
    let sweep = gamma_sweep(&p, &log_grid(grid.min, grid.max, grid.points)?)?;
    match &args.out {
        Some(dir) => {
            let envelope = ReportEnvelope {
                problem: ProblemInfo::new(ProblemSource::Files { files }, &p),
                config: cfg,
                bounds: all_bounds(&p, None)?,
                certification: None,
                sweep: Some(sweep),
            };
            write_report(dir, &envelope, OutputFormat::Json)?;
        }
        None => print!("{}", sweep.to_csv()),
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_spec(args: &GenerateArgs) -> Result<GeneratorSpec> {
    let mut params: serde_json::Value = serde_json::from_str(&args.params)?;
    let Some(obj) = params.as_object_mut() else {
        return Err(Error::ParameterOutOfRange("--params must be a JSON object".into()));
    };
    obj.insert("family".into(), args.family.tag().into());
    obj.insert("seed".into(), args.seed.into());
    Ok(serde_json::from_value(params)?)
}

fn run_generate(args: &GenerateArgs) -> Result<ExitCode> {
    let spec = parse_spec(args)?;
    let p = spec.generate()?;
    let out: &Path = &args.out;
    fs::create_dir_all(out).map_err(|e| Error::Io {
        path: out.to_path_buf(),
        source: e,
    })?;
    write_matrix_market(&out.join("A.mtx"), p.a().as_matrix(), true)?;
    write_matrix_market(&out.join("B.mtx"), p.b().as_matrix(), false)?;
    let mut json = serde_json::to_string_pretty(&spec)?;
    json.push('\n');
    let path = out.join("spec.json");
    fs::write(&path, json).map_err(|e| Error::Io { path, source: e })?;
    Ok(ExitCode::SUCCESS)
}

fn run_verify(args: &VerifyArgs) -> Result<ExitCode> {
    let cfg = args.problem.config(OutputFormat::Json, GridSpec::default())?;
    let (_, p) = args.problem.load(&cfg)?;
    let vcfg = VerifyConfig {
        gamma: args.gamma,
        cert_slack: cfg.cert_slack,
        size_cap: cfg.size_cap,
        ..VerifyConfig::default()
    };
    let report = verify_problem(&p, &vcfg)?;
    for c in &report.checks {
        let tag = match (c.passed, c.skipped) {
            (_, true) => "SKIP",
            (true, false) => "PASS",
            (false, false) => "FAIL",
        };
        println!("{tag} {} ({})", c.name, c.detail);
    }
    if report.all_passed() {
        Ok(ExitCode::SUCCESS)
    } else {
        let failed: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
        eprintln!("invariant violated: {}", failed.join(", "));
        Ok(ExitCode::from(1))
    }
}
