//! Genetic operators: tournament selection, single-child subtree crossover
//! and subtree mutation. Each application touches one randomly chosen tree
//! of the pair.

use super::{AlgorithmConfig, Population};
use crate::rules::{random_tree, Attribute, Expr, GrowMethod, RulePair};
use rand::Rng;

const CROSSOVER_RETRIES: usize = 10;
const MUTATION_SUBTREE_DEPTH: usize = 4;

/// Index of the tournament winner: lowest fitness, ties to the lower index.
pub fn tournament<R: Rng + ?Sized>(pop: &Population, size: usize, rng: &mut R) -> usize {
    let n = pop.members.len();
    let fitness = |i: usize| pop.members[i].fitness.expect("parents evaluated");
    let mut best = rng.gen_range(0..n);
    for _ in 1..size {
        let c = rng.gen_range(0..n);
        if fitness(c) < fitness(best) || (fitness(c) == fitness(best) && c < best) {
            best = c;
        }
    }
    best
}

fn cross_tree<A: Attribute, R: Rng + ?Sized>(
    recipient: &Expr<A>,
    donor: &Expr<A>,
    max_depth: usize,
    rng: &mut R,
) -> Expr<A> {
    for _ in 0..CROSSOVER_RETRIES {
        let target = rng.gen_range(0..recipient.size());
        let source = rng.gen_range(0..donor.size());
        let child = recipient.with_replaced(target, donor.subtree(source).clone());
        if child.depth() <= max_depth {
            return child;
        }
    }
    recipient.clone()
}

/// Child of `a` with one subtree of one tree replaced by material from `b`.
pub fn crossover<R: Rng + ?Sized>(
    a: &RulePair,
    b: &RulePair,
    max_depth: usize,
    rng: &mut R,
) -> RulePair {
    let mut child = a.clone();
    if rng.gen_bool(0.5) {
        child.ordering = cross_tree(&a.ordering, &b.ordering, max_depth, rng);
    } else {
        child.group = cross_tree(&a.group, &b.group, max_depth, rng);
    }
    child
}

fn mutate_tree<A: Attribute, R: Rng + ?Sized>(
    tree: &Expr<A>,
    max_depth: usize,
    rng: &mut R,
) -> Expr<A> {
    let target = rng.gen_range(0..tree.size());
    // Budget the fresh subtree so the depth limit can never be exceeded.
    let level = tree.level_of(target);
    let budget = (max_depth + 1 - level).clamp(1, MUTATION_SUBTREE_DEPTH);
    tree.with_replaced(target, random_tree(rng, GrowMethod::Grow, budget))
}

/// Child of `parent` with one subtree of one tree regrown.
pub fn mutate<R: Rng + ?Sized>(parent: &RulePair, max_depth: usize, rng: &mut R) -> RulePair {
    let mut child = parent.clone();
    if rng.gen_bool(0.5) {
        child.ordering = mutate_tree(&parent.ordering, max_depth, rng);
    } else {
        child.group = mutate_tree(&parent.group, max_depth, rng);
    }
    child
}

/// `count` offspring by tournament selection and the configured operator
/// rates (crossover, mutation, remainder reproduction).
pub fn breed<R: Rng + ?Sized>(
    pop: &Population,
    count: usize,
    config: &AlgorithmConfig,
    rng: &mut R,
) -> Vec<RulePair> {
    (0..count)
        .map(|_| {
            let roll: f64 = rng.gen();
            if roll < config.crossover_rate {
                let a = tournament(pop, config.tournament_size, rng);
                let b = tournament(pop, config.tournament_size, rng);
                crossover(
                    &pop.members[a].rules,
                    &pop.members[b].rules,
                    config.max_depth,
                    rng,
                )
            } else if roll < config.crossover_rate + config.mutation_rate {
                let a = tournament(pop, config.tournament_size, rng);
                mutate(&pop.members[a].rules, config.max_depth, rng)
            } else {
                let a = tournament(pop, config.tournament_size, rng);
                pop.members[a].rules.clone()
            }
        })
        .collect()
}
