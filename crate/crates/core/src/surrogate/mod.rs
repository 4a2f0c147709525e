//! 1-nearest-neighbour fitness estimation over characterisation vectors.
//!
//! The database is rebuilt from scratch every generation and holds only the
//! current population: per-generation evaluation seeds change what a fitness
//! value means, so entries from different generations are never mixed. A
//! plain linear scan is exact and fast enough at population scale.

use crate::phenotype::PcVector;
use crate::rules::RulePair;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SurrogateError {
    #[error("surrogate database cannot be empty")]
    Empty,
    #[error("characterisation vectors differ in length: {0} vs {1}")]
    LengthMismatch(usize, usize),
}

/// Manhattan distance between two characterisation vectors of equal length.
/// Unequal lengths are a programmer error and panic.
pub fn manhattan(a: &PcVector, b: &PcVector) -> u64 {
    assert_eq!(
        a.len(),
        b.len(),
        "characterisation vectors must have equal length"
    );
    a.ranks()
        .iter()
        .zip(b.ranks())
        .map(|(&x, &y)| (x as i64 - y as i64).unsigned_abs())
        .sum()
}

/// Current-generation (vector, fitness) pairs.
#[derive(Debug, Clone)]
pub struct SurrogateDatabase {
    entries: Vec<(PcVector, f64)>,
    generation_index: usize,
}

impl SurrogateDatabase {
    pub fn new(
        entries: Vec<(PcVector, f64)>,
        generation_index: usize,
    ) -> Result<Self, SurrogateError> {
        let first = entries.first().ok_or(SurrogateError::Empty)?.0.len();
        for (pc, _) in &entries {
            if pc.len() != first {
                return Err(SurrogateError::LengthMismatch(first, pc.len()));
            }
        }
        Ok(SurrogateDatabase {
            entries,
            generation_index,
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn generation_index(&self) -> usize {
        self.generation_index
    }

    pub fn entries(&self) -> &[(PcVector, f64)] {
        &self.entries
    }

    /// Debug dump: `index,fitness,pc0..pcN`, one row per entry.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        let len = self.entries.first().map(|(pc, _)| pc.len()).unwrap_or(0);
        write!(out, "index,fitness")?;
        for i in 0..len {
            write!(out, ",pc{i}")?;
        }
        writeln!(out)?;
        for (index, (pc, fitness)) in self.entries.iter().enumerate() {
            write!(out, "{index},{fitness:?}")?;
            for r in pc.ranks() {
                write!(out, ",{r}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    /// Fitness of the nearest entry by Manhattan distance; ties go to the
    /// lowest entry index, so a query identical to a stored vector returns
    /// exactly that stored fitness.
    pub fn estimate(&self, pc: &PcVector) -> f64 {
        let mut best_dist = u64::MAX;
        let mut best_fitness = f64::NAN;
        for (entry, fitness) in &self.entries {
            // abandon a row as soon as its partial sum loses
            let mut d = 0u64;
            for (&x, &y) in entry.ranks().iter().zip(pc.ranks()) {
                d += (x as i64 - y as i64).unsigned_abs();
                if d >= best_dist {
                    break;
                }
            }
            if d < best_dist {
                best_dist = d;
                best_fitness = *fitness;
                if d == 0 {
                    break;
                }
            }
        }
        best_fitness
    }
}

/// Indices of the `target` offspring with the smallest estimated fitness
/// (ties by generation order), returned in generation order. Everything is
/// kept when the batch is no larger than the target.
pub fn preselect_indices(db: &SurrogateDatabase, pcs: &[PcVector], target: usize) -> Vec<usize> {
    if pcs.len() <= target {
        return (0..pcs.len()).collect();
    }
    let estimates: Vec<f64> = pcs.iter().map(|pc| db.estimate(pc)).collect();
    let mut order: Vec<usize> = (0..pcs.len()).collect();
    order.sort_by(|&a, &b| estimates[a].total_cmp(&estimates[b]).then(a.cmp(&b)));
    order.truncate(target);
    order.sort_unstable();
    order
}

/// [`preselect_indices`] over whole individuals.
pub fn preselect(
    db: &SurrogateDatabase,
    offspring: &[(RulePair, PcVector)],
    target: usize,
) -> Vec<RulePair> {
    let pcs: Vec<PcVector> = offspring.iter().map(|(_, pc)| pc.clone()).collect();
    preselect_indices(db, &pcs, target)
        .into_iter()
        .map(|i| offspring[i].0.clone())
        .collect()
}

/// Fraction of the estimated top `cutoff` whose true fitness also ranks in
/// the top `cutoff`; rank ties resolve by stable index.
pub fn precision_at(estimates_and_truths: &[(f64, f64)], cutoff: usize) -> f64 {
    assert!(
        estimates_and_truths.len() >= cutoff && cutoff > 0,
        "need at least `cutoff` scored offspring"
    );
    let top = |key: fn(&(f64, f64)) -> f64| -> Vec<bool> {
        let mut order: Vec<usize> = (0..estimates_and_truths.len()).collect();
        order.sort_by(|&a, &b| {
            key(&estimates_and_truths[a])
                .total_cmp(&key(&estimates_and_truths[b]))
                .then(a.cmp(&b))
        });
        let mut selected = vec![false; estimates_and_truths.len()];
        for &i in order.iter().take(cutoff) {
            selected[i] = true;
        }
        selected
    };
    let by_estimate = top(|p| p.0);
    let by_truth = top(|p| p.1);
    let hits = by_estimate
        .iter()
        .zip(&by_truth)
        .filter(|(e, t)| **e && **t)
        .count();
    hits as f64 / cutoff as f64
}
