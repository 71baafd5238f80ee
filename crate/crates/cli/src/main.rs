//! `ftpl`: run online caching policies over request traces and write CSV series.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ftpl_core::harness::{
    bound_check, emit_csv, write_csv, CapacitySpec, EtaChoice, Experiment, ExperimentConfig,
    MonteCarloResult, PolicyConfig, SeedPlan, TraceSource,
};
use ftpl_core::traces::HeaderMode;

#[derive(Parser)]
#[command(
    name = "ftpl",
    version,
    about = "Trace-driven online caching with Follow-the-Perturbed-Leader"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one policy and write its per-slot series as CSV.
    Run {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum, default_value_t = PolicyName::Ftpl)]
        policy: PolicyName,
        /// Output CSV path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run several policies on one trace, one CSV per policy.
    Compare {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(
            long,
            value_enum,
            value_delimiter = ',',
            default_value = "ftpl,ftpl-anytime,lru,lfu"
        )]
        policies: Vec<PolicyName>,
        /// Directory receiving `<policy>.csv`.
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Compare the Monte-Carlo mean regret of an FTPL policy with its bound.
    BoundCheck {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum, default_value_t = PolicyName::Ftpl)]
        policy: PolicyName,
    },
    /// Write a generated trace in the canonical text format.
    Gen {
        /// `zipf:N,T,EXP[,SEED]` or `rr:N,T`.
        spec: String,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// Request log, one token per line (or delimited, see --id-column).
    #[arg(long, conflicts_with = "gen", required_unless_present = "gen")]
    trace: Option<PathBuf>,
    /// Synthetic trace: `zipf:N,T,EXP[,SEED]` or `rr:N,T`.
    #[arg(long)]
    gen: Option<String>,
    /// Zero-based field holding the file id in delimited logs.
    #[arg(long, default_value_t = 0)]
    id_column: usize,
    /// Read at most this many requests from the log.
    #[arg(long)]
    limit: Option<usize>,
    #[arg(long, value_enum, default_value_t = HeaderArg::Auto)]
    header: HeaderArg,

    /// Cache capacity in files.
    #[arg(
        long,
        conflicts_with = "capacity_frac",
        required_unless_present = "capacity_frac"
    )]
    capacity: Option<usize>,
    /// Cache capacity as a fraction of the catalog.
    #[arg(long)]
    capacity_frac: Option<f64>,
    /// Cost of fetching one file.
    #[arg(long, default_value_t = 1.0)]
    switch_cost: f64,

    /// Constant learning rate for `ftpl`.
    #[arg(long, conflicts_with = "auto_eta")]
    eta: Option<f64>,
    /// Tune the constant rate to the horizon (default for `ftpl`).
    #[arg(long)]
    auto_eta: bool,
    /// Anytime rate multiplier, `eta_t = alpha * sqrt(t)`.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,

    /// Use only the first T requests.
    #[arg(long)]
    horizon: Option<usize>,
    /// First seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of seeds (seed, seed+1, ...).
    #[arg(long, default_value_t = 1)]
    seeds: usize,
    /// Emit every M-th slot plus the last one; 1 keeps every slot.
    #[arg(long, default_value_t = 100)]
    subsample: usize,
    /// Do not charge the slot-1 cache fill.
    #[arg(long)]
    free_initial_fill: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyName {
    Ftpl,
    FtplAnytime,
    Lru,
    Lfu,
    LfuAdmit,
    Fifo,
}

#[derive(Clone, Copy, ValueEnum)]
enum HeaderArg {
    Auto,
    Present,
    Absent,
}

impl CommonArgs {
    fn trace_source(&self) -> Result<TraceSource> {
        match (&self.trace, &self.gen) {
            (Some(path), None) => Ok(TraceSource::File {
                path: path.clone(),
                id_column: self.id_column,
                limit: self.limit,
                header: match self.header {
                    HeaderArg::Auto => HeaderMode::Auto,
                    HeaderArg::Present => HeaderMode::Present,
                    HeaderArg::Absent => HeaderMode::Absent,
                },
            }),
            (None, Some(spec)) => Ok(TraceSource::parse_generator(spec)?),
            _ => bail!("exactly one of --trace or --gen is required"),
        }
    }

    fn policy(&self, name: PolicyName) -> PolicyConfig {
        match name {
            PolicyName::Ftpl => PolicyConfig::Ftpl(match self.eta {
                Some(eta) => EtaChoice::Fixed(eta),
                None => EtaChoice::Auto,
            }),
            PolicyName::FtplAnytime => PolicyConfig::FtplAnytime { alpha: self.alpha },
            PolicyName::Lru => PolicyConfig::Lru,
            PolicyName::Lfu => PolicyConfig::Lfu,
            PolicyName::LfuAdmit => PolicyConfig::LfuAdmission,
            PolicyName::Fifo => PolicyConfig::Fifo,
        }
    }

    fn config(&self, name: PolicyName) -> Result<ExperimentConfig> {
        if self.seeds == 0 {
            bail!("--seeds must be at least 1");
        }
        let capacity = match (self.capacity, self.capacity_frac) {
            (Some(c), None) => CapacitySpec::Files(c),
            (None, Some(f)) => CapacitySpec::Fraction(f),
            _ => bail!("exactly one of --capacity or --capacity-frac is required"),
        };
        let mut config = ExperimentConfig::new(self.trace_source()?, capacity, self.policy(name));
        config.switch_cost = self.switch_cost;
        config.seeds = SeedPlan {
            base: self.seed,
            count: self.seeds,
        };
        config.horizon = self.horizon;
        config.free_initial_fill = self.free_initial_fill;
        Ok(config)
    }
}

fn summarize(mc: &MonteCarloResult, out: &mut impl Write) -> io::Result<()> {
    for s in &mc.per_seed {
        writeln!(
            out,
            "{} seed={} hits={} l1={} regret={} fetch_rate={}",
            mc.policy, s.seed, s.hits, s.total_l1, s.final_regret, s.final_fetch_rate
        )?;
    }
    writeln!(
        out,
        "{} mean_regret={} stderr={} invariant_violations={}",
        mc.policy,
        mc.mean_final_regret(),
        mc.final_regret_stderr(),
        mc.counters().total()
    )
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run {
            common,
            policy,
            out,
        } => {
            let exp = Experiment::prepare(&common.config(policy)?)?;
            let mc = exp.run_monte_carlo()?;
            match out {
                Some(path) => emit_csv(&mc.mean, &path, common.subsample)?,
                None => {
                    let stdout = io::stdout();
                    let mut lock = stdout.lock();
                    write_csv(&mc.mean, &mut lock, common.subsample)?;
                    lock.flush()?;
                }
            }
            summarize(&mc, &mut io::stderr())?;
        }
        Command::Compare {
            common,
            policies,
            out_dir,
        } => {
            fs::create_dir_all(&out_dir)
                .with_context(|| format!("creating {}", out_dir.display()))?;
            for name in policies {
                let exp = Experiment::prepare(&common.config(name)?)?;
                let mc = exp.run_monte_carlo()?;
                let path = out_dir.join(format!("{}.csv", mc.policy));
                emit_csv(&mc.mean, &path, common.subsample)?;
                summarize(&mc, &mut io::stdout())?;
            }
        }
        Command::BoundCheck { common, policy } => {
            let check = bound_check(&common.config(policy)?)?;
            println!(
                "T={} N={} C={} D={} seeds={}",
                check.horizon, check.num_files, check.capacity, check.switch_cost, check.seeds
            );
            if let Some(eta) = check.eta {
                println!("eta={eta}");
            }
            if let Some(r) = &check.anytime {
                println!(
                    "alpha={} theorem1_bound={} prop1_bound={} prop2_bound={} anytime_total_bound={}",
                    r.alpha, r.theorem1_bound, r.prop1_bound, r.prop2_bound, r.anytime_total_bound
                );
            }
            println!(
                "{}: mean_regret={} stderr={} bound={} {}",
                check.bound_name,
                check.mean_regret,
                check.stderr,
                check.bound,
                if check.pass { "PASS" } else { "FAIL" }
            );
            if !check.pass {
                return Ok(ExitCode::from(3));
            }
        }
        Command::Gen { spec, out } => {
            let trace = TraceSource::parse_generator(&spec)?.load()?;
            trace.write(&out)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
