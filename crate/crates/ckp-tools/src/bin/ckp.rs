//! Command line for the colored knapsack toolkit: generate corpora, filter
//! trivial instances, export LP models, benchmark the solvers, and solve or
//! relax single instances. Machine-readable output (JSON, CSV) goes to
//! stdout; all errors are one-line diagnostics on stderr with nonzero exit.

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_traits::ToPrimitive;
use serde_json::json;

use ckp_core::dp1::{solve_dp1, Dp1Options, SolveStats};
use ckp_core::dp2::{solve_dp2, Dp2Options};
use ckp_core::lp::solve_ckp_lp;
use ckp_core::model::{construct_ordering, parse_instance, Instance, Solution};
use ckp_core::oracle::brute_force_ckp;
use ckp_tools::bench::{run_bench, Algo};
use ckp_tools::export::export_ilp;
use ckp_tools::gen::{generate, Family, GenConfig, DEFAULT_PROFIT_RANGE};
use ckp_tools::trivial::filter_trivial_dir;

#[derive(Parser)]
#[command(name = "ckp", version, about = "Colored knapsack toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded random instance file.
    Generate(GenerateArgs),
    /// Move instances solved by the plain knapsack into DIR/trivial/.
    FilterTrivial { dir: PathBuf },
    /// Write the 0/1 integer model in LP text format.
    ExportLp {
        file: PathBuf,
        /// Output file (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time solvers over a directory of instances and emit CSV.
    Bench {
        dir: PathBuf,
        /// Comma-separated list: dp1,dp2,oracle.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        algos: Vec<Algo>,
        /// Output file (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve one instance exactly; prints a JSON object.
    Solve(SolveArgs),
    /// Solve the LP relaxation exactly; prints a JSON object.
    LpRelax { file: PathBuf },
}

#[derive(Args)]
struct GenerateArgs {
    /// uniform or zipf (color distribution).
    #[arg(long)]
    family: Family,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    b: i64,
    #[arg(long)]
    m: u32,
    /// Lower weight bound as a fraction of b.
    #[arg(long)]
    wlo: f64,
    /// Upper weight bound as a fraction of b.
    #[arg(long)]
    whi: f64,
    #[arg(long, default_value_t = DEFAULT_PROFIT_RANGE.0, allow_negative_numbers = true)]
    plo: i64,
    #[arg(long, default_value_t = DEFAULT_PROFIT_RANGE.1, allow_negative_numbers = true)]
    phi: i64,
    #[arg(long = "zipf-exp", default_value_t = 1.0)]
    zipf_exp: f64,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    /// dp1, dp2, or oracle.
    #[arg(long)]
    algo: Algo,
    file: PathBuf,
    /// Disable dp1's boundary dominance.
    #[arg(long)]
    no_dominance1: bool,
    /// Disable dp1's feasibility-based state remapping.
    #[arg(long)]
    no_dominance2: bool,
    /// Disable dp1's bound fathoming.
    #[arg(long)]
    no_fathoming1: bool,
    /// Disable dp1's infeasibility fathoming.
    #[arg(long)]
    no_fathoming2: bool,
    /// Disable dp1's union fathoming.
    #[arg(long)]
    no_fathoming3: bool,
    /// Disable dp2's outer dominance.
    #[arg(long)]
    no_dominance: bool,
    /// Disable dp2's d-reset.
    #[arg(long)]
    no_d_reset: bool,
    /// Disable dp2's fathoming.
    #[arg(long)]
    no_fathoming: bool,
    /// Disable dp2's inner-table pruning.
    #[arg(long)]
    no_inner_pruning: bool,
}

fn read_instance(path: &PathBuf) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_instance(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
}

fn write_or_print(out: Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(&path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn stats_json(stats: &SolveStats) -> serde_json::Value {
    json!({
        "states_created": stats.states_created,
        "states_merged": stats.states_merged,
        "fathomed_bound": stats.fathomed_bound,
        "fathomed_infeasible": stats.fathomed_infeasible,
        "peak_live_states": stats.peak_live_states,
    })
}

fn solve(args: &SolveArgs) -> Result<()> {
    let dp1_flags = [
        (args.no_dominance1, "--no-dominance1"),
        (args.no_dominance2, "--no-dominance2"),
        (args.no_fathoming1, "--no-fathoming1"),
        (args.no_fathoming2, "--no-fathoming2"),
        (args.no_fathoming3, "--no-fathoming3"),
    ];
    let dp2_flags = [
        (args.no_dominance, "--no-dominance"),
        (args.no_d_reset, "--no-d-reset"),
        (args.no_fathoming, "--no-fathoming"),
        (args.no_inner_pruning, "--no-inner-pruning"),
    ];
    let foreign: Option<&str> = match args.algo {
        Algo::Dp1 => dp2_flags.iter().find(|(set, _)| *set).map(|&(_, name)| name),
        Algo::Dp2 => dp1_flags.iter().find(|(set, _)| *set).map(|&(_, name)| name),
        Algo::Oracle => dp1_flags
            .iter()
            .chain(&dp2_flags)
            .find(|(set, _)| *set)
            .map(|&(_, name)| name),
    };
    if let Some(flag) = foreign {
        bail!("{flag} does not apply to --algo {}", args.algo);
    }

    let instance = read_instance(&args.file)?;
    let start = Instant::now();
    let (solution, stats) = match args.algo {
        Algo::Dp1 => {
            let r = solve_dp1(
                &instance,
                &Dp1Options {
                    dominance1: !args.no_dominance1,
                    dominance2: !args.no_dominance2,
                    fathoming1: !args.no_fathoming1,
                    fathoming2: !args.no_fathoming2,
                    fathoming3: !args.no_fathoming3,
                    ..Dp1Options::default()
                },
            );
            (r.solution, Some(r.stats))
        }
        Algo::Dp2 => {
            let r = solve_dp2(
                &instance,
                &Dp2Options {
                    dominance: !args.no_dominance,
                    d_reset: !args.no_d_reset,
                    fathoming: !args.no_fathoming,
                    inner_pruning: !args.no_inner_pruning,
                    ..Dp2Options::default()
                },
            );
            (r.solution, Some(r.stats))
        }
        Algo::Oracle => {
            let r = brute_force_ckp(&instance)?;
            let sol = Solution::from_selected(&instance, r.witness.iter().copied());
            let ordering = construct_ordering(&sol, &instance).expect("oracle witness is feasible");
            (Solution { ordering: Some(ordering), ..sol }, None)
        }
    };
    let time_ms = start.elapsed().as_secs_f64() * 1e3;
    println!(
        "{}",
        json!({
            "algo": args.algo.to_string(),
            "objective": solution.profit,
            "selected": solution.selected,
            "ordering": solution.ordering,
            "weight": solution.weight,
            "time_ms": time_ms,
            "stats": stats.as_ref().map(stats_json),
        })
    );
    Ok(())
}

fn lp_relax(file: &PathBuf) -> Result<()> {
    let instance = read_instance(file)?;
    let lp = solve_ckp_lp(&instance);
    println!(
        "{}",
        json!({
            "value_rational": lp.value.to_string(),
            "value_decimal": lp.value.to_f64(),
            "fractional_support": lp.fractional_support,
            "tight_color": lp.tight_color,
        })
    );
    Ok(())
}

fn run() -> Result<()> {
    match Cli::parse().command {
        Command::Generate(args) => {
            let config = GenConfig {
                family: args.family,
                n: args.n,
                b: args.b,
                m: args.m,
                weight_interval: (args.wlo, args.whi),
                profit_range: (args.plo, args.phi),
                zipf_exponent: args.zipf_exp,
                seed: args.seed,
            };
            let instance = generate(&config)?;
            fs::write(&args.out, ckp_core::model::write_instance(&instance))
                .with_context(|| format!("writing {}", args.out.display()))
        }
        Command::FilterTrivial { dir } => {
            let summary = filter_trivial_dir(&dir)?;
            println!(
                "moved {} of {} instances to {}",
                summary.moved.len(),
                summary.examined,
                dir.join("trivial").display()
            );
            Ok(())
        }
        Command::ExportLp { file, out } => {
            let instance = read_instance(&file)?;
            write_or_print(out, &export_ilp(&instance))
        }
        Command::Bench { dir, algos, out } => {
            let report = run_bench(&dir, &algos)?;
            write_or_print(out, &report.to_csv())
        }
        Command::Solve(args) => solve(&args),
        Command::LpRelax { file } => lp_relax(&file),
    }
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
