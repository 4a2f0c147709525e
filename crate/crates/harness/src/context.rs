//! Building a run's training context from the plan: instances, test seeds
//! and, when an algorithm needs characterisation, the sampled situations.

use crate::config::FileConfig;
use crate::{HarnessError, Result};
use skggp_core::gp::TrainingContext;
use skggp_core::phenotype::{sample_situations, SituationSet};
use skggp_core::project::{generate_instance, InstanceContext};
use skggp_core::rules::reference_rules;
use skggp_core::seeds::{self, tag};

pub fn train_instances(cfg: &FileConfig) -> Result<Vec<InstanceContext>> {
    (0..cfg.scenario.instances_per_evaluation)
        .map(|i| {
            let seed = seeds::derive(cfg.plan.master_seed, &[tag::TRAIN_INSTANCE, i as u64]);
            Ok(InstanceContext::new(generate_instance(
                &cfg.scenario,
                seed,
            )?)?)
        })
        .collect()
}

pub fn test_instances(cfg: &FileConfig) -> Result<Vec<InstanceContext>> {
    (0..cfg.plan.test_instances)
        .map(|i| {
            let seed = seeds::derive(cfg.plan.master_seed, &[tag::TEST_INSTANCE, i as u64]);
            Ok(InstanceContext::new(generate_instance(
                &cfg.scenario,
                seed,
            )?)?)
        })
        .collect()
}

/// Fixed duration seeds for test evaluation; identical for every rep and
/// algorithm so test fitness values are comparable plan-wide.
pub fn test_seeds(cfg: &FileConfig) -> Vec<u64> {
    (0..cfg.plan.test_instances)
        .map(|i| seeds::derive(cfg.plan.master_seed, &[tag::TEST_EVAL, i as u64]))
        .collect()
}

/// Reference-simulation realizations feeding situation sampling; several
/// stochastic replays of the one sampling instance keep the qualifying
/// decision-point pool comfortably larger than situations_per_kind.
pub const REFERENCE_REPLICATIONS: usize = 4;

/// Situations for one rep, sampled from the first training instance with
/// the fixed reference rules and frozen for the whole run.
pub fn rep_situations(
    cfg: &FileConfig,
    train: &[InstanceContext],
    rep_seed: u64,
    group_cap: usize,
) -> Result<SituationSet> {
    let first = train
        .first()
        .ok_or_else(|| HarnessError::Config("no training instances".into()))?;
    Ok(sample_situations(
        &[first],
        &reference_rules(),
        cfg.plan.situations_per_kind,
        cfg.plan.min_candidates,
        REFERENCE_REPLICATIONS,
        seeds::derive(rep_seed, &[tag::SITUATIONS]),
        group_cap,
    )?)
}

/// Full context for one (algorithm, rep) run. Training and test instances
/// derive from the plan seed (shared across reps); situations derive from
/// the rep seed.
pub fn build_context(
    cfg: &FileConfig,
    rep_seed: u64,
    needs_situations: bool,
    group_cap: usize,
) -> Result<TrainingContext> {
    let train = train_instances(cfg)?;
    let test = test_instances(cfg)?;
    for tr in &train {
        for te in &test {
            if tr.instance.id == te.instance.id {
                return Err(HarnessError::Config(format!(
                    "test set overlaps training set on instance {}",
                    tr.instance.id
                )));
            }
        }
    }
    let situations = if needs_situations {
        Some(rep_situations(cfg, &train, rep_seed, group_cap)?)
    } else {
        None
    };
    Ok(TrainingContext {
        train,
        test,
        test_seeds: test_seeds(cfg),
        situations,
    })
}

/// Per-rep master seed; shared by every algorithm of the rep so paired
/// comparisons face identical stochastic realizations.
pub fn rep_seed(cfg: &FileConfig, rep: usize) -> u64 {
    seeds::derive(cfg.plan.master_seed, &[tag::REP, rep as u64])
}
