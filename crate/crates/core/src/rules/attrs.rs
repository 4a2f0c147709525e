//! Attribute computation for activity-mode pairs and activity groups.
//!
//! Every attribute is finite for any valid state: capacities are positive,
//! statics are precomputed per instance, and demands never exceed capacity.

use super::{Attribute, GroupAttr, PairAttr};
use crate::project::InstanceContext;

pub const PAIR_ATTR_COUNT: usize = 11;
pub const GROUP_ATTR_COUNT: usize = 6;

/// The slice of project state the attribute set reads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateView<'a> {
    pub time: u64,
    pub available: &'a [u32],
    pub eligible_count: usize,
}

/// Attribute vector for one eligible (activity, mode) pair, indexed by
/// [`PairAttr::index`].
pub fn pair_attrs(
    ctx: &InstanceContext,
    view: &StateView,
    activity: usize,
    mode_index: usize,
) -> [f64; PAIR_ATTR_COUNT] {
    let mode = ctx.instance.mode(activity, mode_index);
    let caps = &ctx.capacities_f;
    let r = caps.len() as f64;
    let mut max_frac = 0.0f64;
    let mut sum_frac = 0.0f64;
    let mut used_frac = 0.0f64;
    for (k, cap) in caps.iter().enumerate() {
        let frac = mode.demand[k] as f64 / cap;
        max_frac = max_frac.max(frac);
        sum_frac += frac;
        used_frac += (cap - view.available[k] as f64) / cap;
    }
    let mut out = [0.0; PAIR_ATTR_COUNT];
    out[PairAttr::ExpectedDuration.index()] = mode.expected as f64;
    out[PairAttr::OptimisticDuration.index()] = mode.optimistic as f64;
    out[PairAttr::PessimisticDuration.index()] = mode.pessimistic as f64;
    out[PairAttr::MaxDemandFraction.index()] = max_frac;
    out[PairAttr::MeanDemandFraction.index()] = sum_frac / r;
    out[PairAttr::SuccessorCount.index()] = ctx.successor_count[activity];
    out[PairAttr::SuccessorWork.index()] = ctx.successor_work[activity];
    out[PairAttr::CriticalPathToEnd.index()] = ctx.critical_path_to_end[activity];
    out[PairAttr::EligibleCount.index()] = view.eligible_count as f64;
    out[PairAttr::ResourceUtilisation.index()] = used_frac / r;
    out[PairAttr::TimeNow.index()] = view.time as f64;
    out
}

/// Attribute vector for a feasible activity group, indexed by
/// [`GroupAttr::index`].
pub fn group_attrs<I>(
    ctx: &InstanceContext,
    view: &StateView,
    members: I,
) -> [f64; GROUP_ATTR_COUNT]
where
    I: IntoIterator<Item = (usize, usize)>,
{
    let caps = &ctx.capacities_f;
    let r = caps.len() as f64;
    let mut count = 0usize;
    let mut sum_exp = 0.0f64;
    let mut max_exp = 0.0f64;
    let mut sum_succ = 0.0f64;
    let mut demand = vec![0u32; caps.len()];
    for (activity, mode_index) in members {
        let mode = ctx.instance.mode(activity, mode_index);
        count += 1;
        sum_exp += mode.expected as f64;
        max_exp = max_exp.max(mode.expected as f64);
        sum_succ += ctx.successor_count[activity];
        for (k, d) in mode.demand.iter().enumerate() {
            demand[k] += d;
        }
    }
    let mut demand_frac = 0.0f64;
    let mut slack_frac = 0.0f64;
    for (k, cap) in caps.iter().enumerate() {
        demand_frac += demand[k] as f64 / cap;
        slack_frac += (view.available[k] as f64 - demand[k] as f64) / cap;
    }
    let mut out = [0.0; GROUP_ATTR_COUNT];
    out[GroupAttr::MemberCount.index()] = count as f64;
    out[GroupAttr::SumExpectedDuration.index()] = sum_exp;
    out[GroupAttr::MaxExpectedDuration.index()] = max_exp;
    out[GroupAttr::MeanDemandFraction.index()] = demand_frac / r;
    out[GroupAttr::SumSuccessorCount.index()] = sum_succ;
    out[GroupAttr::SlackCapacity.index()] = slack_frac / r;
    out
}
