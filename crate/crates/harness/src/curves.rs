//! Convergence curves on the evaluation axis and the budget-saved ratio.

use skggp_core::gp::GenerationRow;

/// Best-so-far test fitness as a step function of cumulative full
/// evaluations. Points are strictly increasing on the evaluation axis and
/// non-increasing on the fitness axis.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceCurve {
    points: Vec<(u64, f64)>,
}

impl ConvergenceCurve {
    pub fn new(points: Vec<(u64, f64)>) -> Result<Self, String> {
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(format!(
                    "evaluation counts must strictly increase ({} then {})",
                    w[0].0, w[1].0
                ));
            }
        }
        Ok(ConvergenceCurve { points })
    }

    /// Running minimum of the per-generation best test fitness.
    pub fn from_rows(rows: &[GenerationRow]) -> Self {
        let mut best = f64::INFINITY;
        let points = rows
            .iter()
            .map(|r| {
                best = best.min(r.best_test_fitness);
                (r.full_evals_cumulative, best)
            })
            .collect();
        ConvergenceCurve { points }
    }

    pub fn points(&self) -> &[(u64, f64)] {
        &self.points
    }

    /// Step-function lookup: best value at or before `evals`. None when the
    /// curve has no point at or below `evals`.
    pub fn best_at(&self, evals: u64) -> Option<f64> {
        self.points
            .iter()
            .take_while(|(e, _)| *e <= evals)
            .last()
            .map(|&(_, f)| f)
    }

    /// Earliest evaluation count at which the curve reaches `quality` or
    /// better (curve values never interpolate on the fitness axis).
    pub fn earliest_reaching(&self, quality: f64) -> Option<u64> {
        self.points
            .iter()
            .find(|(_, f)| *f <= quality)
            .map(|&(e, _)| e)
    }

    pub fn final_evals(&self) -> Option<u64> {
        self.points.last().map(|&(e, _)| e)
    }
}

/// Fraction of the baseline's budget another algorithm saves while matching
/// the baseline's best solution at `at` evaluations: `(at - e*) / at`,
/// where e* is the earliest evaluation at which `other` reaches equal or
/// better quality. Negative when `other` lags; None when it never reaches
/// the quality or when the baseline has no value at `at` yet.
pub fn budget_saved_ratio(
    baseline: &ConvergenceCurve,
    other: &ConvergenceCurve,
    at: u64,
) -> Option<f64> {
    let quality = baseline.best_at(at)?;
    let reached = other.earliest_reaching(quality)?;
    Some((at as i64 - reached as i64) as f64 / at as f64)
}
