//! Resumable execution of an experiment plan: one engine run per
//! (algorithm, repetition), per-run CSV logs, a manifest for resume, and
//! deterministic per-algorithm aggregates.
//!
//! All files are written atomically (temp + rename). Aggregate files contain
//! no wallclock columns, so two executions of the same plan are
//! byte-identical regardless of thread count or interruption.

use crate::config::{AlgorithmEntry, FileConfig};
use crate::context::{build_context, rep_seed};
use crate::{HarnessError, Result};
use serde::{Deserialize, Serialize};
use skggp_core::gp::{Engine, GenerationRow};
use skggp_core::seeds::fnv1a;
use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub plan_hash: String,
    pub completed: BTreeSet<String>,
}

/// Hash over everything that defines the plan's results; the output
/// directory itself is excluded so a directory can be relocated.
pub fn plan_hash(cfg: &FileConfig) -> String {
    let mut plan = cfg.plan.clone();
    plan.output_dir = PathBuf::new();
    let canonical =
        serde_json::to_string(&(&cfg.scenario, &plan, &cfg.algorithms)).expect("config serializes");
    format!("{:016x}", fnv1a(canonical.as_bytes()))
}

pub fn run_key(label: &str, rep: usize) -> String {
    format!("{label}/rep{rep:03}")
}

pub fn run_path(out: &Path, label: &str, rep: usize) -> PathBuf {
    out.join("runs")
        .join(label)
        .join(format!("rep{rep:03}.csv"))
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write_rows(path: &Path, rows: &[GenerationRow]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| HarnessError::Other(e.to_string()))?;
    write_atomic(path, &bytes)
}

pub fn read_rows(path: &Path) -> Result<Vec<GenerationRow>> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| HarnessError::Other(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for record in reader.deserialize() {
        rows.push(record?);
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOutcome {
    pub executed: usize,
    pub skipped: usize,
}

/// Runs every (algorithm, repetition) not yet recorded in the manifest.
/// `max_runs` caps how many runs execute in this invocation (smoke tests,
/// manual resume batches); `threads` pins the rayon pool size.
pub fn run_plan(
    cfg: &FileConfig,
    max_runs: Option<usize>,
    threads: Option<usize>,
) -> Result<RunOutcome> {
    match threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| HarnessError::Other(e.to_string()))?;
            pool.install(|| run_plan_inner(cfg, max_runs))
        }
        None => run_plan_inner(cfg, max_runs),
    }
}

fn run_plan_inner(cfg: &FileConfig, max_runs: Option<usize>) -> Result<RunOutcome> {
    cfg.validate()?;
    let out = &cfg.plan.output_dir;
    fs::create_dir_all(out.join("runs"))?;
    let hash = plan_hash(cfg);
    let manifest_path = out.join("manifest.json");
    let mut manifest = if manifest_path.exists() {
        let manifest: Manifest = serde_json::from_str(&fs::read_to_string(&manifest_path)?)?;
        if manifest.plan_hash != hash {
            return Err(HarnessError::ResumeDivergence(format!(
                "{} holds runs for plan {} but the current plan hashes to {}",
                out.display(),
                manifest.plan_hash,
                hash
            )));
        }
        manifest
    } else {
        Manifest {
            plan_hash: hash,
            completed: BTreeSet::new(),
        }
    };

    let mut outcome = RunOutcome {
        executed: 0,
        skipped: 0,
    };
    for entry in &cfg.algorithms {
        for rep in 0..cfg.plan.repetitions {
            let key = run_key(&entry.label, rep);
            let path = run_path(out, &entry.label, rep);
            if manifest.completed.contains(&key) && path.exists() {
                outcome.skipped += 1;
                continue;
            }
            if let Some(cap) = max_runs {
                if outcome.executed >= cap {
                    continue;
                }
            }
            let rows = execute_run(cfg, entry, rep)?;
            write_rows(&path, &rows)?;
            manifest.completed.insert(key);
            write_atomic(
                &manifest_path,
                serde_json::to_string_pretty(&manifest)?.as_bytes(),
            )?;
            outcome.executed += 1;
        }
    }

    let total = cfg.algorithms.len() * cfg.plan.repetitions;
    let finals_path = out.join("aggregate").join("finals.csv");
    if manifest.completed.len() == total && (outcome.executed > 0 || !finals_path.exists()) {
        write_aggregates(cfg)?;
    }
    Ok(outcome)
}

/// One full engine run for (algorithm, rep). The rep seed is shared across
/// algorithms so paired comparisons face the same stochastic realizations.
pub fn execute_run(
    cfg: &FileConfig,
    entry: &AlgorithmEntry,
    rep: usize,
) -> Result<Vec<GenerationRow>> {
    let seed = rep_seed(cfg, rep);
    let needs_situations = entry.config.surrogate_enabled || entry.config.dedup_enabled;
    let ctx = build_context(
        cfg,
        seed,
        needs_situations,
        entry.config.group_enumeration_cap,
    )?;
    let mut algo = entry.config.clone();
    algo.master_seed = seed;
    let engine = Engine::new(algo, &ctx)?;
    Ok(engine.run().rows)
}

#[derive(Debug, Serialize, Deserialize)]
struct AggregateRow {
    gen: usize,
    full_evals_cumulative: u64,
    mean_best_test: f64,
    std_best_test: f64,
    mean_best_test_so_far: f64,
    std_best_test_so_far: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct FinalRow {
    pub algorithm: String,
    pub rep: usize,
    pub final_best_test_so_far: f64,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

pub fn load_label_rows(cfg: &FileConfig, label: &str) -> Result<Vec<Vec<GenerationRow>>> {
    (0..cfg.plan.repetitions)
        .map(|rep| read_rows(&run_path(&cfg.plan.output_dir, label, rep)))
        .collect()
}

/// Per-algorithm per-generation aggregates plus the finals table, all
/// recomputed from the run CSVs in a fixed order.
pub fn write_aggregates(cfg: &FileConfig) -> Result<()> {
    let out = &cfg.plan.output_dir;
    let mut finals: Vec<FinalRow> = Vec::new();
    for entry in &cfg.algorithms {
        let all_rows = load_label_rows(cfg, &entry.label)?;
        let gens = all_rows[0].len();
        for rows in &all_rows {
            if rows.len() != gens {
                return Err(HarnessError::Other(format!(
                    "run logs for {} disagree on generation count",
                    entry.label
                )));
            }
        }
        // running minima per rep
        let so_far: Vec<Vec<f64>> = all_rows
            .iter()
            .map(|rows| {
                let mut best = f64::INFINITY;
                rows.iter()
                    .map(|r| {
                        best = best.min(r.best_test_fitness);
                        best
                    })
                    .collect()
            })
            .collect();
        let mut writer = csv::Writer::from_writer(Vec::new());
        for g in 0..gens {
            let evals = all_rows[0][g].full_evals_cumulative;
            for rows in &all_rows {
                if rows[g].full_evals_cumulative != evals {
                    return Err(HarnessError::Other(format!(
                        "evaluation budgets diverge across reps of {}",
                        entry.label
                    )));
                }
            }
            let best: Vec<f64> = all_rows
                .iter()
                .map(|rows| rows[g].best_test_fitness)
                .collect();
            let best_so_far: Vec<f64> = so_far.iter().map(|s| s[g]).collect();
            writer.serialize(AggregateRow {
                gen: g,
                full_evals_cumulative: evals,
                mean_best_test: mean(&best),
                std_best_test: sample_std(&best),
                mean_best_test_so_far: mean(&best_so_far),
                std_best_test_so_far: sample_std(&best_so_far),
            })?;
        }
        let bytes = writer
            .into_inner()
            .map_err(|e| HarnessError::Other(e.to_string()))?;
        write_atomic(
            &out.join("aggregate").join(format!("{}.csv", entry.label)),
            &bytes,
        )?;

        for (rep, s) in so_far.iter().enumerate() {
            finals.push(FinalRow {
                algorithm: entry.label.clone(),
                rep,
                final_best_test_so_far: *s.last().expect("at least one generation"),
            });
        }
    }
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in &finals {
        writer.serialize(row)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| HarnessError::Other(e.to_string()))?;
    write_atomic(&out.join("aggregate").join("finals.csv"), &bytes)
}

pub fn read_finals(cfg: &FileConfig) -> Result<Vec<FinalRow>> {
    let path = cfg.plan.output_dir.join("aggregate").join("finals.csv");
    let mut reader = csv::Reader::from_path(&path)
        .map_err(|e| HarnessError::Other(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for record in reader.deserialize() {
        rows.push(record?);
    }
    Ok(rows)
}
