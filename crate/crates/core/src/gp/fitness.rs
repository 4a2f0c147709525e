//! Full fitness evaluation: mean makespan over the training instances,
//! normalised by each instance's lower bound. Lower is better; values are
//! at least 1 whenever the bounds are valid.

use super::{Individual, TrainingContext};
use crate::project::InstanceContext;
use crate::rules::CompiledRules;
use crate::sim::{simulate, SimOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub fn fitness_from(makespans: &[u64], bounds: &[u64]) -> f64 {
    assert_eq!(makespans.len(), bounds.len());
    assert!(!makespans.is_empty());
    let sum: f64 = makespans
        .iter()
        .zip(bounds)
        .map(|(&m, &b)| m as f64 / b as f64)
        .sum();
    sum / makespans.len() as f64
}

/// One full evaluation: one simulation per instance under this generation's
/// seeds. The same seeds are shared by every individual of a generation, so
/// fitness values within a generation are comparable.
pub fn full_fitness(
    instances: &[InstanceContext],
    rules: &CompiledRules,
    seeds: &[u64],
    group_cap: usize,
) -> f64 {
    let options = SimOptions {
        group_cap,
        record_trace: false,
    };
    let mut makespans = Vec::with_capacity(instances.len());
    let mut bounds = Vec::with_capacity(instances.len());
    for (ctx, &seed) in instances.iter().zip(seeds) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let result = simulate(ctx, rules, &options, &mut rng);
        makespans.push(result.makespan);
        bounds.push(ctx.lower_bound);
    }
    fitness_from(&makespans, &bounds)
}

/// Evaluates every member in parallel and returns the evaluation count.
/// Results are written in member order, so thread scheduling cannot change
/// outcomes.
pub fn evaluate_members(
    members: &mut [Individual],
    instances: &[InstanceContext],
    seeds: &[u64],
    group_cap: usize,
) -> u64 {
    members.par_iter_mut().for_each(|member| {
        let compiled = member.rules.compile();
        member.fitness = Some(full_fitness(instances, &compiled, seeds, group_cap));
    });
    members.len() as u64
}

/// Held-out test fitness under the fixed test seeds; never counted against
/// the evaluation budget.
pub fn test_fitness(ctx: &TrainingContext, rules: &CompiledRules, group_cap: usize) -> f64 {
    full_fitness(&ctx.test, rules, &ctx.test_seeds, group_cap)
}
