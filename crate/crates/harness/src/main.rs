//! `skggp` — train and analyse scheduling heuristics for dynamic
//! multi-mode resource-constrained projects.

use clap::{Parser, Subcommand, ValueEnum};
use skggp_harness::config::FileConfig;
use skggp_harness::{context, plan, quality, report, HarnessError};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "skggp",
    about = "Surrogate-assisted genetic programming for dynamic multi-mode project scheduling",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AnalysisKind {
    /// Budget-saved curves and the timing table from completed runs.
    Convergence,
    /// Instrumented replay that fully evaluates all intermediate offspring.
    SurrogateQuality,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the plan's training and test instances as JSON files.
    Generate {
        #[arg(long)]
        config: PathBuf,
        /// Override the plan's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the plan's master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override how many training instances to write.
        #[arg(long)]
        count: Option<usize>,
    },
    /// Sample the frozen decision situations and write them as a JSON bundle.
    SampleSituations {
        #[arg(long)]
        config: PathBuf,
        /// Bundle file path (default: <output_dir>/situations.json).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run every (algorithm, repetition) of the plan; resumable.
    Evolve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Size of the worker pool (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Execute at most this many runs in this invocation.
        #[arg(long)]
        max_runs: Option<usize>,
    },
    /// Post-process completed runs into analysis CSVs.
    Analyze {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "convergence")]
        analysis: AnalysisKind,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Write and print the final comparison table with significance marks.
    Report {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn load_config(
    path: &std::path::Path,
    out: Option<PathBuf>,
    seed: Option<u64>,
) -> Result<FileConfig, HarnessError> {
    let mut cfg = FileConfig::load(path)?;
    if let Some(out) = out {
        cfg.plan.output_dir = out;
    }
    if let Some(seed) = seed {
        cfg.plan.master_seed = seed;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Generate {
            config,
            out,
            seed,
            count,
        } => {
            let mut cfg = load_config(&config, out, seed)?;
            if let Some(count) = count {
                cfg.scenario.instances_per_evaluation = count;
                cfg.validate()?;
            }
            let dir = cfg.plan.output_dir.join("instances");
            std::fs::create_dir_all(&dir)?;
            for (i, ctx) in context::train_instances(&cfg)?.iter().enumerate() {
                let path = dir.join(format!("train_{i:02}.json"));
                ctx.instance.save(&path)?;
                println!("wrote {} ({})", path.display(), ctx.instance.id);
            }
            for (i, ctx) in context::test_instances(&cfg)?.iter().enumerate() {
                let path = dir.join(format!("test_{i:02}.json"));
                ctx.instance.save(&path)?;
                println!("wrote {} ({})", path.display(), ctx.instance.id);
            }
            Ok(())
        }
        Command::SampleSituations { config, out, seed } => {
            let cfg = load_config(&config, None, seed)?;
            let train = context::train_instances(&cfg)?;
            let cap = cfg
                .algorithms
                .first()
                .map(|a| a.config.group_enumeration_cap)
                .unwrap_or(256);
            let set = context::rep_situations(&cfg, &train, context::rep_seed(&cfg, 0), cap)?;
            let path = out.unwrap_or_else(|| cfg.plan.output_dir.join("situations.json"));
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent)?;
            }
            set.save(&path)
                .map_err(|e| HarnessError::Other(e.to_string()))?;
            println!(
                "wrote {} ({} situations, min candidates {})",
                path.display(),
                set.situations.len(),
                set.effective_min_candidates
            );
            Ok(())
        }
        Command::Evolve {
            config,
            out,
            seed,
            threads,
            max_runs,
        } => {
            let cfg = load_config(&config, out, seed)?;
            let outcome = plan::run_plan(&cfg, max_runs, threads)?;
            println!(
                "executed {} runs, skipped {} already-completed",
                outcome.executed, outcome.skipped
            );
            Ok(())
        }
        Command::Analyze {
            config,
            out,
            analysis,
            threads,
            seed,
        } => {
            let cfg = load_config(&config, out, seed)?;
            let work = || -> Result<(), HarnessError> {
                match analysis {
                    AnalysisKind::Convergence => {
                        report::write_budget_saved(&cfg)?;
                        report::write_timing(&cfg)?;
                        println!(
                            "wrote {}/analysis/{{budget_saved,budget_saved_mean,timing}}.csv",
                            cfg.plan.output_dir.display()
                        );
                    }
                    AnalysisKind::SurrogateQuality => {
                        let q = cfg.quality.clone().unwrap_or_default();
                        let rows = quality::write_quality(&cfg, &q)?;
                        println!(
                            "wrote {}/analysis/surrogate_quality{{,_mean}}.csv ({} rows)",
                            cfg.plan.output_dir.display(),
                            rows.len()
                        );
                    }
                }
                Ok(())
            };
            match threads {
                Some(t) => rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build()
                    .map_err(|e| HarnessError::Other(e.to_string()))?
                    .install(work),
                None => work(),
            }
        }
        Command::Report { config, out, seed } => {
            let cfg = load_config(&config, out, seed)?;
            let table = report::write_comparison(&cfg)?;
            println!("algorithm,mean,std,versus_previous");
            for row in &table {
                println!(
                    "{},{:.4},{:.4},{}",
                    row.algorithm, row.mean, row.std, row.versus_previous
                );
            }
            Ok(())
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
