use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fpa_core::auction::run_auction;
use fpa_core::regret::{example1_report, EXAMPLE1_FIRST_BEST, EXAMPLE1_HALF_VALUE};
use fpa_core::Error;
use fpa_lab::output::{write_bounds_csv, write_regret_csv, write_rounds_csv, write_summary_csv};
use fpa_lab::{run_sweep, ExperimentSpec, LabError, Result};

#[derive(Parser)]
#[command(
    name = "fpa-lab",
    version,
    about = "Budget-constrained first-price auction experiments"
)]
struct Cli {
    /// Output directory; overrides the experiment file.
    #[arg(long, global = true, env = "FPA_LAB_OUT")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one policy once and write the round-level CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Policy label from the experiment file; defaults to the first one.
        #[arg(long)]
        policy: Option<String>,
        /// Horizon; defaults to `auction.horizon`, then the first sweep horizon.
        #[arg(long)]
        horizon: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Replicated regret sweep; writes regret.csv and summary.csv.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        reps: Option<u64>,
        /// Worker threads; defaults to the number of CPUs.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Write the two full-feedback regret bound curves to bounds.csv.
    Bounds {
        #[arg(long, default_value_t = 0.9)]
        lambda: f64,
        #[arg(long, value_delimiter = ',', default_value = "512,1024,2048,4096,8192")]
        horizons: Vec<u64>,
    },
    /// Monte Carlo estimates of the two per-round benchmark utilities.
    Example1 {
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn out_dir(flag: Option<PathBuf>, spec: Option<&ExperimentSpec>) -> Result<PathBuf> {
    let dir = flag
        .or_else(|| spec.and_then(|s| s.sweep.out_dir.clone()))
        .unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            config,
            policy,
            horizon,
            seed,
        } => {
            let spec = ExperimentSpec::load(&config)?;
            let chosen = match &policy {
                Some(label) => spec
                    .policies
                    .iter()
                    .find(|p| p.label() == label)
                    .ok_or_else(|| {
                        LabError::Core(Error::Config(format!(
                            "no policy {label} in {}",
                            config.display()
                        )))
                    })?,
                None => &spec.policies[0],
            };
            let t = horizon
                .or(spec.auction.horizon)
                .unwrap_or(spec.sweep.horizons[0]);
            let cfg = spec
                .auction
                .auction_config(chosen, t, seed.unwrap_or(spec.sweep.seed));
            let mut bidder = chosen.build(&cfg, spec.auction.c1)?;
            let result = run_auction(&cfg, bidder.as_mut())?;
            let dir = out_dir(cli.out, Some(&spec))?;
            write_rounds_csv(create(&dir, "rounds.csv")?, &result)?;
            println!(
                "{}: T = {t}, stop time {}, utility {:.6}, discounted {:.6}, spent {:.6} of {:.6}",
                chosen.label(),
                result.stop_time,
                result.total_utility,
                result.discounted_utility,
                result.total_payment(),
                cfg.budget
            );
        }
        Command::Sweep {
            config,
            seed,
            reps,
            threads,
        } => {
            let mut spec = ExperimentSpec::load(&config)?;
            if let Some(s) = seed {
                spec.sweep.seed = s;
            }
            if let Some(r) = reps {
                spec.sweep.replications = r;
            }
            let threads = threads
                .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let out = run_sweep(&spec, threads)?;
            let dir = out_dir(cli.out, Some(&spec))?;
            write_regret_csv(create(&dir, "regret.csv")?, &out.rows)?;
            write_summary_csv(create(&dir, "summary.csv")?, &out.reports)?;
            for rep in &out.reports {
                let slope = rep.slope.map_or("n/a".to_string(), |s| {
                    format!("{:.3} [{:.3}, {:.3}]", s.slope, s.ci_low, s.ci_high)
                });
                println!("{}: slope {slope}", rep.policy);
                for h in &rep.horizons {
                    println!(
                        "  T = {:>6}  mean regret {:>10.4}  se {:>8.4}",
                        h.horizon,
                        h.mean,
                        h.std_error.unwrap_or(0.0)
                    );
                }
            }
            println!("wrote {}", dir.display());
        }
        Command::Bounds { lambda, horizons } => {
            let mut csv = Vec::new();
            write_bounds_csv(&mut csv, &horizons, lambda)?;
            let dir = out_dir(cli.out, None)?;
            fs::write(dir.join("bounds.csv"), csv)?;
            println!("wrote {}", dir.join("bounds.csv").display());
        }
        Command::Example1 { samples, seed } => {
            let r = example1_report(samples, seed)?;
            println!(
                "first_best_per_round {:.6} (closed form {:.6})",
                r.first_best_per_round, EXAMPLE1_FIRST_BEST
            );
            println!(
                "half_value_per_round {:.6} (closed form {:.6})",
                r.half_value_per_round, EXAMPLE1_HALF_VALUE
            );
            println!(
                "half_value_payment_per_round {:.6} (budget per round 0.5, slack {})",
                r.half_value_payment_per_round,
                if r.budget_slack() { "ok" } else { "violated" }
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
