//! Instrumented surrogate-quality replay.
//!
//! A baseline run is replayed generation by generation; each generation
//! breeds offspring for the largest configured multiplier, fully evaluates
//! every one of them (that is the instrumentation cost), estimates them all
//! with the current population's surrogate, and scores precision and the
//! correctly/incorrectly-added extras for each multiplier's prefix. The
//! baseline then continues with the first |P| offspring.

use crate::config::{FileConfig, QualitySection};
use crate::context::{build_context, rep_seed as plan_rep_seed};
use crate::gain::extra_offspring_gain;
use crate::report::write_csv;
use crate::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use skggp_core::gp::{
    breed, evaluate_members, init_population, AlgorithmConfig, Individual, Population,
};
use skggp_core::phenotype::{characterise, PcVector};
use skggp_core::seeds::{self, tag};
use skggp_core::surrogate::{precision_at, SurrogateDatabase};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QualityRow {
    pub multiplier: f64,
    pub seed: usize,
    pub gen: usize,
    pub precision: f64,
    pub correctly_added: usize,
    pub incorrectly_added: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QualityMeanRow {
    pub multiplier: f64,
    pub mean_precision: f64,
    pub mean_correctly_added: f64,
    pub mean_incorrectly_added: f64,
}

pub fn run_quality(cfg: &FileConfig, quality: &QualitySection) -> Result<Vec<QualityRow>> {
    let base = &cfg.algorithms[0].config;
    let algo = AlgorithmConfig {
        population_size: quality.population_size,
        generations: quality.generations,
        offspring_multiplier: 1.0,
        surrogate_enabled: false,
        dedup_enabled: false,
        ..base.clone()
    };
    algo.validate().map_err(crate::HarnessError::Config)?;
    let k_max = quality.multipliers.iter().cloned().fold(1.0f64, f64::max);

    let mut rows = Vec::new();
    for seed_index in 0..quality.seeds {
        let rep_seed = seeds::derive(plan_rep_seed(cfg, seed_index), &[tag::QUALITY]);
        rows.extend(replay_one(
            cfg, quality, &algo, rep_seed, seed_index, k_max,
        )?);
    }
    Ok(rows)
}

fn replay_one(
    cfg: &FileConfig,
    quality: &QualitySection,
    algo: &AlgorithmConfig,
    rep_seed: u64,
    seed_index: usize,
    k_max: f64,
) -> Result<Vec<QualityRow>> {
    let ctx = build_context(cfg, rep_seed, true, algo.group_enumeration_cap)?;
    let situations = &ctx
        .situations
        .as_ref()
        .expect("context built with situations")
        .situations;
    let p = algo.population_size;
    let cap = algo.group_enumeration_cap;
    let eval_seeds = |gen: usize| -> Vec<u64> {
        (0..ctx.train.len())
            .map(|i| seeds::derive(rep_seed, &[tag::EVAL, gen as u64, i as u64]))
            .collect()
    };

    let mut init_rng = ChaCha8Rng::seed_from_u64(seeds::derive(rep_seed, &[tag::INIT]));
    let (mut members, _) = init_population(algo, None, &mut init_rng);
    evaluate_members(&mut members, &ctx.train, &eval_seeds(0), cap);
    let mut pop = Population {
        members,
        generation_index: 0,
        evaluation_seeds: eval_seeds(0),
    };

    let mut rows = Vec::new();
    for gen in 1..=quality.generations {
        let seeds_g = eval_seeds(gen);
        let n_max = (k_max * p as f64).round() as usize;
        let mut breed_rng =
            ChaCha8Rng::seed_from_u64(seeds::derive(rep_seed, &[tag::BREED, gen as u64]));
        let offspring = breed(&pop, n_max, algo, &mut breed_rng);

        // surrogate over the current population
        let pop_entries: Vec<(PcVector, f64)> = pop
            .members
            .par_iter()
            .map(|m| {
                (
                    characterise(&m.rules.compile(), situations),
                    m.fitness.expect("population evaluated"),
                )
            })
            .collect();
        let db = SurrogateDatabase::new(pop_entries, pop.generation_index)
            .expect("population non-empty");
        let estimates: Vec<f64> = offspring
            .par_iter()
            .map(|rules| db.estimate(&characterise(&rules.compile(), situations)))
            .collect();

        // instrumentation: true fitness for every intermediate offspring
        let mut scored_members: Vec<Individual> = offspring
            .iter()
            .cloned()
            .map(Individual::unevaluated)
            .collect();
        evaluate_members(&mut scored_members, &ctx.train, &seeds_g, cap);
        let truths: Vec<f64> = scored_members
            .iter()
            .map(|m| m.fitness.expect("just evaluated"))
            .collect();

        let scored: Vec<(f64, f64)> = if quality.perfect_oracle {
            truths.iter().map(|&t| (t, t)).collect()
        } else {
            estimates
                .iter()
                .cloned()
                .zip(truths.iter().cloned())
                .collect()
        };

        for &multiplier in &quality.multipliers {
            let m = ((multiplier * p as f64).round() as usize).min(scored.len());
            let slice = &scored[..m];
            let precision = precision_at(slice, p);
            let (correct, incorrect) = extra_offspring_gain(slice, p, p);
            rows.push(QualityRow {
                multiplier,
                seed: seed_index,
                gen,
                precision,
                correctly_added: correct,
                incorrectly_added: incorrect,
            });
        }

        // baseline continues with the first |P| offspring plus the elite
        let mut next: Vec<Individual> = scored_members[..p].to_vec();
        let mut elites = best_members(&pop, algo.elitism_count);
        evaluate_members(&mut elites, &ctx.train, &seeds_g, cap);
        replace_worst(&mut next, elites);
        pop = Population {
            members: next,
            generation_index: gen,
            evaluation_seeds: seeds_g,
        };
    }
    Ok(rows)
}

fn best_members(pop: &Population, count: usize) -> Vec<Individual> {
    let mut order: Vec<usize> = (0..pop.members.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = pop.members[a].fitness.expect("evaluated");
        let fb = pop.members[b].fitness.expect("evaluated");
        fa.total_cmp(&fb).then(a.cmp(&b))
    });
    order
        .into_iter()
        .take(count)
        .map(|i| pop.members[i].clone())
        .collect()
}

fn replace_worst(members: &mut [Individual], elites: Vec<Individual>) {
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

pub fn mean_rows(rows: &[QualityRow], multipliers: &[f64]) -> Vec<QualityMeanRow> {
    multipliers
        .iter()
        .map(|&k| {
            let subset: Vec<&QualityRow> = rows.iter().filter(|r| r.multiplier == k).collect();
            let n = subset.len().max(1) as f64;
            QualityMeanRow {
                multiplier: k,
                mean_precision: subset.iter().map(|r| r.precision).sum::<f64>() / n,
                mean_correctly_added: subset.iter().map(|r| r.correctly_added as f64).sum::<f64>()
                    / n,
                mean_incorrectly_added: subset
                    .iter()
                    .map(|r| r.incorrectly_added as f64)
                    .sum::<f64>()
                    / n,
            }
        })
        .collect()
}

pub fn write_quality(cfg: &FileConfig, quality: &QualitySection) -> Result<Vec<QualityRow>> {
    let rows = run_quality(cfg, quality)?;
    let out = cfg.plan.output_dir.join("analysis");
    write_csv(&out.join("surrogate_quality.csv"), &rows)?;
    write_csv(
        &out.join("surrogate_quality_mean.csv"),
        &mean_rows(&rows, &quality.multipliers),
    )?;
    Ok(rows)
}
