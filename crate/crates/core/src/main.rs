use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cohort_scr::cli::{cmd_fit, cmd_oracle, cmd_price, cmd_scr, RiskKind, RunConfig};
use cohort_scr::riskengine::EtaMode;
use cohort_scr::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_SIMULATION: u8 = 3;

/// Solvency II demographic-risk engine for a cohort of equity-linked
/// endowment policies.
#[derive(Parser)]
#[command(name = "cohort-scr", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON configuration; omitted means built-in defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed, overriding the configured one.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory, overriding the configured one.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the mortality projection model and write it as JSON.
    Fit {
        #[command(flatten)]
        common: Common,
    },
    /// Solve the premium and build the hedging portfolio.
    Price {
        #[command(flatten)]
        common: Common,
        /// Cross-check the premium against the discounted-expectation oracle.
        #[arg(long)]
        verify: bool,
    },
    /// Simulate CDR distributions and extract the SCR.
    Scr {
        #[command(flatten)]
        common: Common,
        /// Which risk component to run.
        #[arg(long, value_enum, default_value_t = RiskKind::Both)]
        risk: RiskKind,
        /// Sum-at-risk driver, overriding the configured mode.
        #[arg(long, value_enum)]
        eta: Option<EtaArg>,
    },
    /// Run the brute-force verification suite.
    Oracle {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum EtaArg {
    Deterministic,
    Stochastic,
}

impl From<EtaArg> for EtaMode {
    fn from(v: EtaArg) -> EtaMode {
        match v {
            EtaArg::Deterministic => EtaMode::Deterministic,
            EtaArg::Stochastic => EtaMode::Stochastic,
        }
    }
}

fn load_config(common: &Common) -> Result<RunConfig, Error> {
    let mut config = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = common.seed {
        config.simulation.seed = seed;
    }
    if let Some(out) = &common.out {
        config.output.dir = out.clone();
    }
    Ok(config)
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::RefitFailureCap { .. } => EXIT_SIMULATION,
        _ => EXIT_CONFIG,
    }
}

fn run() -> Result<u8, Error> {
    let cli = Cli::parse();
    match cli.command {
        Command::Fit { common } => {
            let config = load_config(&common)?;
            let fit = cmd_fit(&config)?;
            println!(
                "fitted {} ages x {} years -> {}",
                fit.n_ages,
                fit.n_years,
                fit.model_path.display()
            );
            println!(
                "explained variance of first singular value: {:.6}%",
                100.0 * fit.explained_variance
            );
            println!(
                "sum(b) = {:.12}, sum(k) = {:.3e}, floored cells = {}",
                fit.sum_b, fit.sum_k, fit.floored_cells
            );
            Ok(0)
        }
        Command::Price { common, verify } => {
            let config = load_config(&common)?;
            let price = cmd_price(&config, verify)?;
            println!(
                "premium rate per unit sum insured: {:.12}",
                price.premium_rate
            );
            println!("total premium income: {:.2}", price.total_premium_income);
            if let Some(diff) = price.oracle_abs_diff {
                println!("oracle cross-check |diff| = {diff:.3e}");
            }
            println!("wrote {}", price.path.display());
            Ok(0)
        }
        Command::Scr { common, risk, eta } => {
            let mut config = load_config(&common)?;
            if let Some(eta) = eta {
                config.simulation.eta_mode = eta.into();
            }
            let artifacts = cmd_scr(&config, risk)?;
            for w in &artifacts.warnings {
                eprintln!("warning: {w}");
            }
            println!("t,risk,mean,sd,skewness,scr,factor");
            for row in &artifacts.rows {
                println!(
                    "{},{},{:.2},{:.2},{:.4},{:.2},{}",
                    row.t,
                    row.risk,
                    row.mean,
                    row.sd,
                    row.skewness,
                    row.scr,
                    row.factor
                        .map(|f| format!("{f:.4}"))
                        .unwrap_or_else(|| "-".into()),
                );
            }
            println!("wrote {}", artifacts.summary_path.display());
            Ok(0)
        }
        Command::Oracle { common } => {
            let config = load_config(&common)?;
            let outcomes = cmd_oracle(&config)?;
            let mut failures = 0;
            for o in &outcomes {
                let status = if o.pass { "PASS" } else { "FAIL" };
                println!("{status} {} ({})", o.name, o.detail);
                if !o.pass {
                    failures += 1;
                }
            }
            if failures > 0 {
                eprintln!("{failures} verification check(s) failed");
                Ok(EXIT_SIMULATION)
            } else {
                Ok(0)
            }
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
