//! Command-line front end for the Engel group experiment suite.
//!
//! Exit codes: 0 all expectation checks passed, 1 at least one scenario
//! failed, 2 configuration or reference errors.

use clap::{Args, Parser, Subcommand};
use engel::config::{load_config, SubmanifoldSet};
use engel::oracle::certify_group_law;
use engel::scenario::{
    builtin_suite, describe, list_text, run_suite, RunOptions, ToleranceOverrides,
};
use engel::HomGauge;
use std::path::PathBuf;
use std::process::ExitCode;

/// Environment variable holding the default output directory.
const OUT_DIR_ENV: &str = "ENGEL_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "engel",
    about = "Degrees, intrinsic measures, blow-ups and covering estimates \
             for curves and surfaces in the Engel group",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario configuration file (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Run the built-in scenario suite (default when no config is given).
    #[arg(long)]
    builtin: bool,
    /// Output directory for results.csv and summary.txt.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Seed for every Monte Carlo path.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Tolerance overrides, repeatable: slope=0.2 value=1e-5 dimension=0.4
    /// exponent=0.6
    #[arg(long = "tolerance-overrides", value_name = "KEY=VALUE")]
    tolerance_overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run scenarios and write CSV plus a pass/fail summary.
    Run(RunArgs),
    /// Print degree and stratification facts about a submanifold.
    Describe {
        /// Built-in id, tuple alias, or definition-file path.
        id: String,
    },
    /// List built-in submanifolds and scenarios.
    List,
    /// Re-certify the group law and the gauge on this platform.
    Certify {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Run(args) => run(args),
        Command::Describe { id } => {
            let set = SubmanifoldSet::default();
            match describe(&id, &set) {
                Ok(text) => {
                    print!("{text}");
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    Ok(ExitCode::from(2))
                }
            }
        }
        Command::List => {
            print!("{}", list_text());
            Ok(ExitCode::SUCCESS)
        }
        Command::Certify { samples, seed } => {
            let gauge = HomGauge::certify(100_000, seed);
            println!(
                "gauge: symmetrized box, quasi-triangle constant {:.6} (measured), \
                 box inclusion lambda {:.6} (measured; 1 for the raw gauge)",
                gauge.quasi_triangle_constant, gauge.box_inclusion_lambda
            );
            match certify_group_law(samples, seed) {
                Ok(report) => {
                    println!(
                        "group law certified on {} samples (seed {seed}):",
                        report.samples
                    );
                    println!("  associativity residual      {:.3e}", report.associativity);
                    println!("  inverse residual            {:.3e}", report.inverse);
                    println!(
                        "  dilation residual           {:.3e}",
                        report.dilation_automorphism
                    );
                    println!(
                        "  frame finite-diff residual  {:.3e}",
                        report.frame_invariance
                    );
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    eprintln!("certification FAILED: {e}");
                    Ok(ExitCode::FAILURE)
                }
            }
        }
    }
}

fn run(args: RunArgs) -> anyhow::Result<ExitCode> {
    if let Some(jobs) = args.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()?;
    }
    let overrides = match ToleranceOverrides::parse(&args.tolerance_overrides) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(ExitCode::from(2));
        }
    };

    let (set, scenarios, config_seed, config_out) = match &args.config {
        Some(path) => {
            let config = match load_config(path) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return Ok(ExitCode::from(2));
                }
            };
            let mut scenarios = config.scenarios;
            if args.builtin {
                let mut all = builtin_suite();
                all.append(&mut scenarios);
                scenarios = all;
            }
            (config.set, scenarios, config.seed, config.out_dir)
        }
        None => (
            SubmanifoldSet::default(),
            builtin_suite(),
            None,
            None,
        ),
    };

    let opts = RunOptions {
        seed: args.seed.or(config_seed).unwrap_or(0),
        overrides,
    };
    let result = run_suite(&scenarios, &set, &opts);

    let out_dir = args
        .out_dir
        .or(config_out.map(PathBuf::from))
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("engel-out"));
    result.write_outputs(&out_dir)?;
    print!("{}", result.summary_string());
    println!("outputs: {}", out_dir.display());

    Ok(if result.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}
