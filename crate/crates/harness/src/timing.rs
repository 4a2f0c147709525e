//! Mean per-generation wall time for full evaluation and surrogate
//! estimation, per algorithm. Generation 0 (initialisation) is excluded.

use skggp_core::gp::GenerationRow;

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct TimingSummary {
    pub algorithm: String,
    pub mean_eval_s: f64,
    pub mean_surrogate_s: f64,
    /// surrogate over full-evaluation time
    pub ratio: f64,
}

pub fn timing_report(runs: &[(String, Vec<Vec<GenerationRow>>)]) -> Vec<TimingSummary> {
    runs.iter()
        .map(|(label, reps)| {
            let mut eval = 0.0;
            let mut surrogate = 0.0;
            let mut count = 0usize;
            for rows in reps {
                for row in rows.iter().filter(|r| r.gen > 0) {
                    eval += row.wallclock_eval_s;
                    surrogate += row.wallclock_surrogate_s;
                    count += 1;
                }
            }
            let n = count.max(1) as f64;
            let mean_eval = eval / n;
            let mean_surrogate = surrogate / n;
            TimingSummary {
                algorithm: label.clone(),
                mean_eval_s: mean_eval,
                mean_surrogate_s: mean_surrogate,
                ratio: if mean_eval > 0.0 {
                    mean_surrogate / mean_eval
                } else {
                    0.0
                },
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(gen: usize, eval_s: f64, surrogate_s: f64) -> GenerationRow {
        GenerationRow {
            gen,
            best_train_fitness: 0.0,
            best_test_fitness: 0.0,
            full_evals_cumulative: 0,
            wallclock_eval_s: eval_s,
            wallclock_surrogate_s: surrogate_s,
            unique_offspring: 0,
            filled_duplicates: 0,
        }
    }

    #[test]
    fn constant_timers_report_their_value() {
        let rows = vec![row(0, 7.0, 3.0), row(1, 100.0, 5.0), row(2, 100.0, 5.0)];
        let report = timing_report(&[("A".into(), vec![rows])]);
        assert_eq!(report[0].mean_eval_s, 100.0);
        assert_eq!(report[0].mean_surrogate_s, 5.0);
        assert!((report[0].ratio - 0.05).abs() < 1e-12);
    }

    #[test]
    fn means_span_repetitions() {
        let a = vec![row(0, 0.0, 0.0), row(1, 10.0, 1.0)];
        let b = vec![row(0, 0.0, 0.0), row(1, 30.0, 3.0)];
        let report = timing_report(&[("A".into(), vec![a, b])]);
        assert_eq!(report[0].mean_eval_s, 20.0);
        assert_eq!(report[0].mean_surrogate_s, 2.0);
    }
}
