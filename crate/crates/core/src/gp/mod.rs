//! The evolutionary loop, runnable as the plain baseline or with
//! surrogate-assisted offspring preselection.

mod breed;
mod engine;
mod fitness;
mod init;

pub use breed::{breed, crossover, mutate, tournament};
pub use engine::{Engine, EngineError, GenerationRow, RunResult};
pub use fitness::{evaluate_members, fitness_from, full_fitness, test_fitness};
pub use init::{init_population, InitStats};

use crate::phenotype::{PcVector, SituationSet};
use crate::project::InstanceContext;
use crate::rules::RulePair;
use serde::{Deserialize, Serialize};

/// Knobs of one algorithm configuration. The baseline runs with both flags
/// off and `offspring_multiplier` 1; the surrogate-assisted variants switch
/// both flags on and raise the multiplier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AlgorithmConfig {
    pub population_size: usize,
    pub generations: usize,
    /// Intermediate offspring per generation = round(multiplier * |P|).
    pub offspring_multiplier: f64,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub tournament_size: usize,
    pub surrogate_enabled: bool,
    pub dedup_enabled: bool,
    pub elitism_count: usize,
    pub master_seed: u64,
    pub max_depth: usize,
    pub init_depth_min: usize,
    pub init_depth_max: usize,
    pub group_enumeration_cap: usize,
}

impl Default for AlgorithmConfig {
    fn default() -> Self {
        Self {
            population_size: 50,
            generations: 30,
            offspring_multiplier: 1.0,
            crossover_rate: 0.85,
            mutation_rate: 0.1,
            tournament_size: 7,
            surrogate_enabled: false,
            dedup_enabled: false,
            elitism_count: 1,
            master_seed: 0,
            max_depth: 8,
            init_depth_min: 2,
            init_depth_max: 6,
            group_enumeration_cap: 256,
        }
    }
}

impl AlgorithmConfig {
    pub fn intermediate_count(&self) -> usize {
        (self.offspring_multiplier * self.population_size as f64).round() as usize
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.population_size == 0 {
            return Err("population_size must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.crossover_rate)
            || !(0.0..=1.0).contains(&self.mutation_rate)
            || self.crossover_rate + self.mutation_rate > 1.0 + 1e-12
        {
            return Err(format!(
                "crossover_rate {} + mutation_rate {} must stay within [0, 1]",
                self.crossover_rate, self.mutation_rate
            ));
        }
        if self.intermediate_count() < self.population_size {
            return Err(format!(
                "offspring_multiplier {} yields {} intermediate offspring, below the \
                 population size {}",
                self.offspring_multiplier,
                self.intermediate_count(),
                self.population_size
            ));
        }
        if self.tournament_size == 0 {
            return Err("tournament_size must be positive".into());
        }
        if self.elitism_count >= self.population_size {
            return Err(format!(
                "elitism_count {} must be below population_size {}",
                self.elitism_count, self.population_size
            ));
        }
        if self.init_depth_min == 0
            || self.init_depth_min > self.init_depth_max
            || self.init_depth_max > self.max_depth
        {
            return Err(format!(
                "initial depth range {}..={} must sit within 1..={}",
                self.init_depth_min, self.init_depth_max, self.max_depth
            ));
        }
        if self.group_enumeration_cap == 0 {
            return Err("group_enumeration_cap must be positive".into());
        }
        Ok(())
    }
}

/// A population member; fitness is present exactly when the individual has
/// been fully evaluated under the current generation's seeds.
#[derive(Debug, Clone)]
pub struct Individual {
    pub rules: RulePair,
    pub fitness: Option<f64>,
    pub pc: Option<PcVector>,
}

impl Individual {
    pub fn unevaluated(rules: RulePair) -> Self {
        Individual {
            rules,
            fitness: None,
            pc: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Population {
    pub members: Vec<Individual>,
    pub generation_index: usize,
    /// Per-training-instance duration seeds of this generation.
    pub evaluation_seeds: Vec<u64>,
}

impl Population {
    /// Index of the best evaluated member (lowest fitness, ties by index).
    pub fn best_index(&self) -> usize {
        let mut best = 0;
        for (i, m) in self.members.iter().enumerate().skip(1) {
            let f = m.fitness.expect("population evaluated");
            if f < self.members[best].fitness.expect("population evaluated") {
                best = i;
            }
        }
        best
    }
}

/// Immutable per-run data shared by every evaluation: training and test
/// instances and, when characterisation is needed, the frozen situation set.
#[derive(Debug, Clone)]
pub struct TrainingContext {
    pub train: Vec<InstanceContext>,
    pub test: Vec<InstanceContext>,
    /// Fixed per-test-instance duration seeds; test fitness is deterministic.
    pub test_seeds: Vec<u64>,
    pub situations: Option<SituationSet>,
}
