use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use zlab::harness::{self, ModeSelection, Overrides, Report, RunConfig};
use zlab::hop::OffsetMode;

#[derive(Parser)]
#[command(name = "zlab", version, about = "Numerical laboratory for zeta-factorization formulas and their hybrids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print Z(t) and |zeta(1/2+it)|^2
    Z {
        #[arg(long)]
        t: f64,
    },
    /// Print J(T), phi1(T), phi1^-1(T) and Z~^2(T)
    Ladder {
        #[arg(long)]
        t: f64,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Apply H to one function and check both factorization modes
    Factorize(RunArgs),
    /// Crossbreed a family, print the kinship verdict and bind the certificate
    Crossbreed(RunArgs),
    /// Bind the hybrid certificate on every base and report residuals
    Verify(RunArgs),
    /// Like verify, over every order assignment up to k0, with plot data
    Scan(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML or JSON run configuration
    #[arg(long)]
    config: Option<PathBuf>,
    /// function in the DSL, e.g. "sin2" or "pow(0.4)+pow(0.3)"; repeatable
    #[arg(long = "f", alias = "family")]
    family: Vec<String>,
    /// base values, comma separated
    #[arg(long = "L", alias = "grid", value_delimiter = ',')]
    grid: Vec<f64>,
    #[arg(long = "U")]
    u: Option<f64>,
    /// orders k_m, comma separated
    #[arg(long, value_delimiter = ',')]
    k: Vec<usize>,
    #[arg(long)]
    k0: Option<usize>,
    #[arg(long)]
    mode: Option<ModeSelection>,
    #[arg(long)]
    offset: Option<OffsetMode>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    cache: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
}

fn nonempty<T>(v: Vec<T>) -> Option<Vec<T>> {
    if v.is_empty() {
        None
    } else {
        Some(v)
    }
}

impl RunArgs {
    fn config(self) -> zlab::Result<RunConfig> {
        let base = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        Ok(base.apply(Overrides {
            family: nonempty(self.family),
            grid: nonempty(self.grid),
            u: self.u,
            offset: self.offset,
            orders: nonempty(self.k),
            k0: self.k0,
            mode: self.mode,
            quadrature_tol: self.tol,
            cache: self.cache,
            report: self.report,
        }))
    }
}

fn emit(report: &Report, cfg: &RunConfig) -> zlab::Result<()> {
    match &cfg.report {
        Some(path) => {
            for p in report.write(path)? {
                eprintln!("wrote {}", p.display());
            }
        }
        None => {
            // a closed pipe (e.g. `| head`) is not an error worth reporting
            let _ = writeln!(std::io::stdout().lock(), "{}", serde_json::to_string_pretty(report)?);
        }
    }
    Ok(())
}

fn run(cli: Cli) -> zlab::Result<bool> {
    match cli.command {
        Command::Z { t } => {
            let (z, sq) = harness::cmd_z(t)?;
            println!("Z({t}) = {z:.12}");
            println!("|zeta(1/2+it)|^2 = {sq:.12}");
            Ok(true)
        }
        Command::Ladder { t, tol, cache } => {
            let cfg = RunConfig {
                quadrature_tol: tol.unwrap_or(1e-8),
                cache,
                ..RunConfig::default()
            };
            let ctx = harness::open_context(&cfg)?;
            let v = harness::cmd_ladder(t, &ctx)?;
            harness::save_cache(&cfg, &ctx)?;
            println!("J({t}) = {:.10}", v.j);
            println!("phi1({t}) = {:.10}", v.phi1);
            println!("phi1_inverse({t}) = {:.10}", v.phi1_inverse);
            println!("z_tilde_sq({t}) = {:.12}", v.z_tilde_sq);
            Ok(true)
        }
        Command::Crossbreed(args) => numeric(args, harness::run_crossbreed),
        Command::Factorize(args) => numeric(args, harness::run_factorize),
        Command::Verify(args) => numeric(args, harness::run_verify),
        Command::Scan(args) => numeric(args, harness::run_scan),
    }
}

fn numeric(args: RunArgs, f: fn(&RunConfig, &zlab::ladder::LadderContext) -> zlab::Result<Report>) -> zlab::Result<bool> {
    let cfg = args.config()?;
    cfg.validate()?;
    let ctx = harness::open_context(&cfg)?;
    let report = f(&cfg, &ctx)?;
    harness::save_cache(&cfg, &ctx)?;
    emit(&report, &cfg)?;
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
