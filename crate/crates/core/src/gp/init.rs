//! Ramped half-and-half initialisation with optional duplicate removal by
//! characterisation vector.
//!
//! Duplicates are regenerated rather than dropped, so the population size
//! and with it the evaluation budget stay fixed; a slot that still collides
//! after the retry cap keeps its duplicate and is counted.

use super::{AlgorithmConfig, Individual};
use crate::phenotype::{characterise_pair, DecisionSituation, PcKey};
use crate::rules::{random_tree, GrowMethod, RulePair};
use rand::Rng;
use std::collections::HashSet;

const DEDUP_RETRIES: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct InitStats {
    /// Slots that kept a duplicate vector after exhausting retries.
    pub residual_duplicates: usize,
}

fn ramp(config: &AlgorithmConfig, slot: usize) -> (GrowMethod, usize) {
    let span = config.init_depth_max - config.init_depth_min + 1;
    let method = if slot.is_multiple_of(2) {
        GrowMethod::Grow
    } else {
        GrowMethod::Full
    };
    let depth = config.init_depth_min + (slot / 2) % span;
    (method, depth)
}

/// `population_size` fresh individuals. With `dedup_enabled` and a situation
/// set, slots whose vector collides with an earlier member are regenerated
/// up to the retry cap; individuals then carry their vector.
pub fn init_population<R: Rng + ?Sized>(
    config: &AlgorithmConfig,
    situations: Option<&[DecisionSituation]>,
    rng: &mut R,
) -> (Vec<Individual>, InitStats) {
    let mut members = Vec::with_capacity(config.population_size);
    let mut stats = InitStats::default();
    let dedup = config.dedup_enabled.then_some(()).and(situations);
    let mut seen: HashSet<PcKey> = HashSet::new();

    for slot in 0..config.population_size {
        let (method, depth) = ramp(config, slot);
        let fresh = |rng: &mut R| RulePair {
            ordering: random_tree(rng, method, depth),
            group: random_tree(rng, method, depth),
        };
        match dedup {
            None => members.push(Individual::unevaluated(fresh(rng))),
            Some(situations) => {
                let mut tries = 0;
                loop {
                    let rules = fresh(rng);
                    let pc = characterise_pair(&rules, situations);
                    let key = pc.dedup_key();
                    let duplicate = seen.contains(&key);
                    if !duplicate || tries >= DEDUP_RETRIES {
                        if duplicate {
                            stats.residual_duplicates += 1;
                        } else {
                            seen.insert(key);
                        }
                        members.push(Individual {
                            rules,
                            fitness: None,
                            pc: Some(pc),
                        });
                        break;
                    }
                    tries += 1;
                }
            }
        }
    }
    (members, stats)
}
