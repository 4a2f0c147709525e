//! Post-run analyses written as CSV artifacts: budget-saved curves, the
//! timing table and the final comparison with significance marks.

use crate::config::FileConfig;
use crate::curves::{budget_saved_ratio, ConvergenceCurve};
use crate::plan::{load_label_rows, read_finals, write_atomic};
use crate::stats::wilcoxon_signed_rank;
use crate::timing::timing_report;
use crate::{HarnessError, Result};
use serde::Serialize;

#[derive(Debug, Serialize)]
struct BudgetRow {
    algorithm: String,
    rep: usize,
    at_evals: u64,
    baseline_best: f64,
    /// Empty when the run never reaches the baseline's quality.
    ratio: Option<f64>,
}

#[derive(Debug, Serialize)]
struct BudgetMeanRow {
    algorithm: String,
    at_evals: u64,
    mean_ratio: Option<f64>,
    defined_reps: usize,
}

/// Budget saved per (algorithm, rep) against the first algorithm, evaluated
/// at every baseline generation checkpoint, plus per-checkpoint means over
/// the reps where the ratio is defined.
pub fn write_budget_saved(cfg: &FileConfig) -> Result<()> {
    let baseline_label = &cfg.algorithms[0].label;
    let baseline_runs = load_label_rows(cfg, baseline_label)?;
    let baseline_curves: Vec<ConvergenceCurve> = baseline_runs
        .iter()
        .map(|rows| ConvergenceCurve::from_rows(rows))
        .collect();

    let mut rows: Vec<BudgetRow> = Vec::new();
    let mut means: Vec<BudgetMeanRow> = Vec::new();
    for entry in cfg.algorithms.iter().skip(1) {
        let runs = load_label_rows(cfg, &entry.label)?;
        let curves: Vec<ConvergenceCurve> = runs
            .iter()
            .map(|rows| ConvergenceCurve::from_rows(rows))
            .collect();
        let checkpoints: Vec<u64> = baseline_runs[0]
            .iter()
            .map(|r| r.full_evals_cumulative)
            .collect();
        for &at in &checkpoints {
            let mut defined = Vec::new();
            for (rep, (bc, oc)) in baseline_curves.iter().zip(&curves).enumerate() {
                let ratio = budget_saved_ratio(bc, oc, at);
                rows.push(BudgetRow {
                    algorithm: entry.label.clone(),
                    rep,
                    at_evals: at,
                    baseline_best: bc.best_at(at).unwrap_or(f64::NAN),
                    ratio,
                });
                if let Some(r) = ratio {
                    defined.push(r);
                }
            }
            means.push(BudgetMeanRow {
                algorithm: entry.label.clone(),
                at_evals: at,
                mean_ratio: if defined.is_empty() {
                    None
                } else {
                    Some(defined.iter().sum::<f64>() / defined.len() as f64)
                },
                defined_reps: defined.len(),
            });
        }
    }

    let out = cfg.plan.output_dir.join("analysis");
    write_csv(&out.join("budget_saved.csv"), &rows)?;
    write_csv(&out.join("budget_saved_mean.csv"), &means)
}

pub fn write_timing(cfg: &FileConfig) -> Result<()> {
    let mut grouped = Vec::new();
    for entry in &cfg.algorithms {
        grouped.push((entry.label.clone(), load_label_rows(cfg, &entry.label)?));
    }
    let report = timing_report(&grouped);
    write_csv(
        &cfg.plan.output_dir.join("analysis").join("timing.csv"),
        &report,
    )
}

#[derive(Debug, Serialize)]
pub struct ComparisonRow {
    pub algorithm: String,
    pub mean: f64,
    pub std: f64,
    /// One mark per preceding algorithm, in plan order: `+` significantly
    /// better (lower fitness), `-` significantly worse, `=` indistinguishable
    /// at the 5% level, `?` when there are too few repetitions to test.
    pub versus_previous: String,
}

/// Final test-fitness comparison in the plan's algorithm order; every
/// algorithm is tested against each one listed above it. The signed-rank
/// test needs at least 6 pairs; below that the mark is `?`.
pub fn comparison_table(finals: &[(String, Vec<f64>)]) -> Vec<ComparisonRow> {
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    let std = |xs: &[f64]| {
        if xs.len() < 2 {
            return 0.0;
        }
        let m = mean(xs);
        (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
    };
    finals
        .iter()
        .enumerate()
        .map(|(i, (label, values))| {
            let marks: Vec<&str> = finals[..i]
                .iter()
                .map(|(_, prev)| {
                    if values.len() >= 6 {
                        wilcoxon_signed_rank(values, prev).flag.symbol()
                    } else {
                        "?"
                    }
                })
                .collect();
            ComparisonRow {
                algorithm: label.clone(),
                mean: mean(values),
                std: std(values),
                versus_previous: marks.join(" "),
            }
        })
        .collect()
}

pub fn write_comparison(cfg: &FileConfig) -> Result<Vec<ComparisonRow>> {
    let finals = read_finals(cfg)?;
    let mut grouped: Vec<(String, Vec<f64>)> = Vec::new();
    for entry in &cfg.algorithms {
        let values: Vec<f64> = finals
            .iter()
            .filter(|f| f.algorithm == entry.label)
            .map(|f| f.final_best_test_so_far)
            .collect();
        if values.len() != cfg.plan.repetitions {
            return Err(HarnessError::Other(format!(
                "finals table holds {} rows for {}, expected {}",
                values.len(),
                entry.label,
                cfg.plan.repetitions
            )));
        }
        grouped.push((entry.label.clone(), values));
    }
    let table = comparison_table(&grouped);
    write_csv(
        &cfg.plan.output_dir.join("analysis").join("comparison.csv"),
        &table,
    )?;
    Ok(table)
}

pub(crate) fn write_csv<T: Serialize>(path: &std::path::Path, rows: &[T]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| HarnessError::Other(e.to_string()))?;
    write_atomic(path, &bytes)
}
