//! Generation loop with budget accounting and per-generation logging.

use super::{
    breed, evaluate_members, init_population, test_fitness, AlgorithmConfig, Individual,
    Population, TrainingContext,
};
use crate::phenotype::{characterise, unique_by_pc, PcVector};
use crate::seeds::{self, tag};
use crate::surrogate::SurrogateDatabase;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid algorithm config: {0}")]
    InvalidConfig(String),
    #[error("surrogate or duplicate removal requires a sampled situation set")]
    MissingSituations,
    #[error("training context has no training instances")]
    EmptyTrainSet,
    #[error("training context has no test instances")]
    EmptyTestSet,
}

/// One row of the run log, written per generation including generation 0.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GenerationRow {
    pub gen: usize,
    pub best_train_fitness: f64,
    pub best_test_fitness: f64,
    pub full_evals_cumulative: u64,
    pub wallclock_eval_s: f64,
    pub wallclock_surrogate_s: f64,
    pub unique_offspring: usize,
    pub filled_duplicates: usize,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub rows: Vec<GenerationRow>,
    /// Best-on-train individual of the final generation.
    pub best: Individual,
    /// The final generation's members, in population order.
    pub population: Vec<Individual>,
    pub full_evaluations: u64,
}

pub struct Engine<'a> {
    config: AlgorithmConfig,
    ctx: &'a TrainingContext,
    pop: Population,
    full_evals: u64,
    rows: Vec<GenerationRow>,
}

impl<'a> Engine<'a> {
    pub fn new(config: AlgorithmConfig, ctx: &'a TrainingContext) -> Result<Self, EngineError> {
        config.validate().map_err(EngineError::InvalidConfig)?;
        if (config.surrogate_enabled || config.dedup_enabled) && ctx.situations.is_none() {
            return Err(EngineError::MissingSituations);
        }
        if ctx.train.is_empty() {
            return Err(EngineError::EmptyTrainSet);
        }
        if ctx.test.is_empty() || ctx.test.len() != ctx.test_seeds.len() {
            return Err(EngineError::EmptyTestSet);
        }
        Ok(Engine {
            config,
            ctx,
            pop: Population {
                members: Vec::new(),
                generation_index: 0,
                evaluation_seeds: Vec::new(),
            },
            full_evals: 0,
            rows: Vec::new(),
        })
    }

    /// Runs generation 0 through `config.generations` and returns the log.
    /// Deterministic in (config, master_seed), independent of thread count.
    pub fn run(mut self) -> RunResult {
        self.initialise();
        for gen in 1..=self.config.generations {
            self.step(gen);
        }
        let best = self.pop.members[self.pop.best_index()].clone();
        RunResult {
            rows: self.rows,
            best,
            population: self.pop.members,
            full_evaluations: self.full_evals,
        }
    }

    pub fn full_evaluations(&self) -> u64 {
        self.full_evals
    }

    fn situations(&self) -> &[crate::phenotype::DecisionSituation] {
        &self
            .ctx
            .situations
            .as_ref()
            .expect("checked at construction")
            .situations
    }

    fn eval_seeds(&self, gen: usize) -> Vec<u64> {
        (0..self.ctx.train.len())
            .map(|i| seeds::derive(self.config.master_seed, &[tag::EVAL, gen as u64, i as u64]))
            .collect()
    }

    fn initialise(&mut self) {
        let mut rng =
            ChaCha8Rng::seed_from_u64(seeds::derive(self.config.master_seed, &[tag::INIT]));
        let surrogate_timer = Instant::now();
        let situations = if self.config.dedup_enabled {
            Some(self.situations())
        } else {
            None
        };
        let (mut members, stats) = init_population(&self.config, situations, &mut rng);
        let surrogate_s = if self.config.dedup_enabled {
            surrogate_timer.elapsed().as_secs_f64()
        } else {
            0.0
        };

        let eval_seeds = self.eval_seeds(0);
        let eval_timer = Instant::now();
        self.full_evals += evaluate_members(
            &mut members,
            &self.ctx.train,
            &eval_seeds,
            self.config.group_enumeration_cap,
        );
        let eval_s = eval_timer.elapsed().as_secs_f64();

        self.pop = Population {
            members,
            generation_index: 0,
            evaluation_seeds: eval_seeds,
        };
        let unique = if self.config.dedup_enabled {
            self.config.population_size - stats.residual_duplicates
        } else {
            0
        };
        self.push_row(0, eval_s, surrogate_s, unique, stats.residual_duplicates);
    }

    fn step(&mut self, gen: usize) {
        let mut breed_rng = ChaCha8Rng::seed_from_u64(seeds::derive(
            self.config.master_seed,
            &[tag::BREED, gen as u64],
        ));
        let eval_seeds = self.eval_seeds(gen);
        let target = self.config.population_size;

        let (mut selected_members, surrogate_s, unique_count, filled) =
            if self.config.surrogate_enabled {
                let offspring = breed(
                    &self.pop,
                    self.config.intermediate_count(),
                    &self.config,
                    &mut breed_rng,
                );
                let timer = Instant::now();
                let situations = self.situations();
                let db_entries: Vec<(PcVector, f64)> = self
                    .pop
                    .members
                    .iter()
                    .map(|m| {
                        (
                            m.pc.clone().expect("surrogate populations carry vectors"),
                            m.fitness.expect("population evaluated"),
                        )
                    })
                    .collect();
                let db = SurrogateDatabase::new(db_entries, self.pop.generation_index)
                    .expect("population is never empty");
                // characterisation and estimation fused into one parallel pass
                let scored: Vec<(PcVector, f64)> = offspring
                    .par_iter()
                    .map(|rules| {
                        let pc = characterise(&rules.compile(), situations);
                        let estimate = db.estimate(&pc);
                        (pc, estimate)
                    })
                    .collect();
                let (pcs, estimates): (Vec<PcVector>, Vec<f64>) = scored.into_iter().unzip();
                let kept = unique_by_pc(&pcs);
                // top |P| unique offspring by (estimate, generation order)
                let mut ranked = kept.clone();
                ranked.sort_by(|&a, &b| estimates[a].total_cmp(&estimates[b]).then(a.cmp(&b)));
                ranked.truncate(target);
                ranked.sort_unstable();
                let mut selected = ranked;
                // Top up from first-seen duplicates, in generation order.
                let mut filled = 0usize;
                if selected.len() < target {
                    let keep_set: std::collections::HashSet<usize> = kept.iter().copied().collect();
                    for i in 0..offspring.len() {
                        if selected.len() == target {
                            break;
                        }
                        if !keep_set.contains(&i) {
                            selected.push(i);
                            filled += 1;
                        }
                    }
                    selected.sort_unstable();
                }
                let members: Vec<Individual> = selected
                    .iter()
                    .map(|&i| Individual {
                        rules: offspring[i].clone(),
                        fitness: None,
                        pc: Some(pcs[i].clone()),
                    })
                    .collect();
                (members, timer.elapsed().as_secs_f64(), kept.len(), filled)
            } else {
                let offspring = breed(&self.pop, target, &self.config, &mut breed_rng);
                let members = offspring.into_iter().map(Individual::unevaluated).collect();
                (members, 0.0, 0, 0)
            };

        // Full evaluation of the selected offspring plus the re-evaluated
        // elites, all under this generation's seeds.
        let eval_timer = Instant::now();
        self.full_evals += evaluate_members(
            &mut selected_members,
            &self.ctx.train,
            &eval_seeds,
            self.config.group_enumeration_cap,
        );
        let mut elites = self.take_elites();
        self.full_evals += evaluate_members(
            &mut elites,
            &self.ctx.train,
            &eval_seeds,
            self.config.group_enumeration_cap,
        );
        let eval_s = eval_timer.elapsed().as_secs_f64();

        replace_worst(&mut selected_members, elites);
        self.pop = Population {
            members: selected_members,
            generation_index: gen,
            evaluation_seeds: eval_seeds,
        };
        self.push_row(gen, eval_s, surrogate_s, unique_count, filled);
    }

    /// Clones of the `elitism_count` best members of the current population.
    fn take_elites(&self) -> Vec<Individual> {
        let mut order: Vec<usize> = (0..self.pop.members.len()).collect();
        order.sort_by(|&a, &b| {
            let fa = self.pop.members[a].fitness.expect("population evaluated");
            let fb = self.pop.members[b].fitness.expect("population evaluated");
            fa.total_cmp(&fb).then(a.cmp(&b))
        });
        order
            .into_iter()
            .take(self.config.elitism_count)
            .map(|i| self.pop.members[i].clone())
            .collect()
    }

    fn push_row(
        &mut self,
        gen: usize,
        eval_s: f64,
        surrogate_s: f64,
        unique_offspring: usize,
        filled_duplicates: usize,
    ) {
        let best = self.pop.best_index();
        let best_train = self.pop.members[best].fitness.expect("evaluated");
        let compiled = self.pop.members[best].rules.compile();
        let best_test = test_fitness(self.ctx, &compiled, self.config.group_enumeration_cap);
        self.rows.push(GenerationRow {
            gen,
            best_train_fitness: best_train,
            best_test_fitness: best_test,
            full_evals_cumulative: self.full_evals,
            wallclock_eval_s: eval_s,
            wallclock_surrogate_s: surrogate_s,
            unique_offspring,
            filled_duplicates,
        });
    }
}

/// Replaces the worst members (highest fitness, ties to the higher index)
/// with the elites, keeping the population size fixed.
fn replace_worst(members: &mut [Individual], elites: Vec<Individual>) {
    if elites.is_empty() {
        return;
    }
    let mut order: Vec<usize> = (0..members.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = members[a].fitness.expect("evaluated");
        let fb = members[b].fitness.expect("evaluated");
        fb.total_cmp(&fa).then(b.cmp(&a))
    });
    for (slot, elite) in order.into_iter().zip(elites) {
        members[slot] = elite;
    }
}
