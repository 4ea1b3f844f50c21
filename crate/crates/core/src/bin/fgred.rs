use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use fgred::harness::{self, GenOptions, ReduceOptions, Target};
use fgred::instance::{InstanceFile, Kind};
use fgred::protocol::Strategy;
use fgred::reduce::Metric;

#[derive(Parser)]
#[command(name = "fgred", version, about = "Merlin-Arthur protocol and gap-reduction harness")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random or planted instance.
    Gen {
        #[arg(long, default_value = "ip")]
        kind: Kind,
        #[arg(long, short = 'n', default_value_t = 8)]
        count: usize,
        #[arg(long, short = 'd', default_value_t = 16)]
        dim: usize,
        #[arg(long)]
        sigma: Option<u64>,
        #[arg(long)]
        planted: bool,
        #[arg(long)]
        metric: Option<Metric>,
    },
    /// Run the protocol on every pair of an IP instance.
    ProtocolRun {
        input: PathBuf,
        #[arg(long = "block-width", short = 'T', default_value_t = 2)]
        block_width: usize,
        /// One adversary strategy; all of them when absent.
        #[arg(long)]
        strategy: Option<Strategy>,
        /// Adversarial messages per strategy and pair.
        #[arg(long, default_value_t = 16)]
        count: usize,
        /// Append the per-point transcript of witness pairs.
        #[arg(long)]
        transcript: bool,
    },
    /// Apply one reduction step.
    Reduce {
        input: PathBuf,
        #[arg(long)]
        target: Target,
        #[arg(long = "block-width", short = 'T', default_value_t = 2)]
        block_width: usize,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// Merlin message strategy for maxip; honest when absent.
        #[arg(long)]
        strategy: Option<Strategy>,
        /// Run the brute-force checks and report them.
        #[arg(long)]
        verify: bool,
        /// Where to write the report; stderr when absent.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Brute-force solve an instance.
    Solve { input: PathBuf },
    /// Exhaustively check the encoding gadget for small parameters.
    VerifyGadget {
        #[arg(long = "max-t", default_value_t = 2)]
        max_t: u64,
        #[arg(long = "max-q", default_value_t = 2)]
        max_q: u64,
    },
    /// Tabulate planner outputs over (epsilon, c).
    Sweep {
        #[arg(long, value_delimiter = ',', default_value = "1")]
        epsilon: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16")]
        c: Vec<f64>,
        /// Set size N the planner targets.
        #[arg(long = "set-size", default_value_t = 1 << 20)]
        set_size: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
}

fn read_instance(path: &Path) -> Result<InstanceFile> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    InstanceFile::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    let out = cli.out.as_deref();
    match cli.command {
        Command::Gen {
            kind,
            count,
            dim,
            sigma,
            planted,
            metric,
        } => {
            if planted && kind != Kind::Ip {
                bail!("--planted only applies to ip instances");
            }
            let file = harness::gen(&GenOptions {
                kind,
                n: count,
                d: dim,
                sigma,
                planted,
                metric,
                seed: cli.seed,
            })?;
            emit(out, &file.to_string())?;
            Ok(true)
        }
        Command::ProtocolRun {
            input,
            block_width,
            strategy,
            count,
            transcript,
        } => {
            let file = read_instance(&input)?;
            let res = harness::protocol_run(&file, block_width, strategy, count, cli.seed, transcript)?;
            emit(out, &res.report)?;
            Ok(res.ok)
        }
        Command::Reduce {
            input,
            target,
            block_width,
            p,
            strategy,
            verify,
            report,
        } => {
            let file = read_instance(&input)?;
            let opts = ReduceOptions {
                block_width,
                p,
                strategy,
                seed: cli.seed,
                verify,
            };
            let (reduced, res) = harness::reduce(&file, target, &opts)?;
            emit(out, &reduced.to_string())?;
            match report {
                Some(path) => std::fs::write(&path, &res.report)
                    .with_context(|| format!("writing {}", path.display()))?,
                None => eprint!("{}", res.report),
            }
            Ok(res.ok)
        }
        Command::Solve { input } => {
            let file = read_instance(&input)?;
            emit(out, &harness::solve(&file)?)?;
            Ok(true)
        }
        Command::VerifyGadget { max_t, max_q } => {
            let res = harness::verify_gadget(max_t, max_q)?;
            emit(out, &res.report)?;
            Ok(res.ok)
        }
        Command::Sweep {
            epsilon,
            c,
            set_size,
            format: Format::Csv,
        } => {
            emit(out, &harness::sweep(&epsilon, &c, set_size)?)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
