//! Discrete-event execution of a project under a rule pair.
//!
//! At every decision time (t = 0 and each completion) the loop ranks
//! eligible activity-mode pairs with the ordering rule, keeps the knee
//! prefix, enumerates maximal feasible groups, lets the group rule pick one,
//! starts its members, and repeats at the same timestamp until nothing fits.
//! Simulation is a pure function of (instance, rules, rng stream).

mod groups;
mod knee;
mod trace;
mod validate;

pub use groups::enumerate_feasible_groups;
pub use knee::knee_prefix;
pub use trace::write_trace;
pub use validate::{validate_schedule, ValidationReport, Violation};

use crate::project::{sample_duration, InstanceContext};
use crate::rules::{group_attrs, pair_attrs, CompiledRules, StateView};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// An eligible (activity, mode) candidate. Serialized compactly as
/// `[activity, mode]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AmPair {
    pub activity: usize,
    pub mode: usize,
}

impl Serialize for AmPair {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        (self.activity, self.mode).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for AmPair {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let (activity, mode) = <(usize, usize)>::deserialize(deserializer)?;
        Ok(AmPair { activity, mode })
    }
}

/// A resource-feasible set of pairs with distinct activities, startable
/// simultaneously. Members are kept in ascending (activity, mode) order.
pub type ActivityGroup = Vec<AmPair>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunningActivity {
    pub activity: usize,
    pub mode: usize,
    pub finish: u64,
}

/// Mutable execution state, confined to one simulation.
#[derive(Debug, Clone)]
pub struct ProjectState {
    pub time: u64,
    pub finished: Vec<bool>,
    pub finished_count: usize,
    pub running: Vec<RunningActivity>,
    running_flag: Vec<bool>,
    pub available: Vec<u32>,
    /// realized duration per started (activity, mode); populated lazily at
    /// start and fixed thereafter
    pub realized: HashMap<(usize, usize), u32>,
}

impl ProjectState {
    pub fn new(ctx: &InstanceContext) -> Self {
        let n = ctx.instance.activity_count();
        ProjectState {
            time: 0,
            finished: vec![false; n],
            finished_count: 0,
            running: Vec::new(),
            running_flag: vec![false; n],
            available: ctx.instance.capacities.clone(),
            realized: HashMap::new(),
        }
    }

    pub fn is_running(&self, activity: usize) -> bool {
        self.running_flag[activity]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StartEvent {
    pub activity: usize,
    pub mode: usize,
    pub start: u64,
    pub duration: u32,
}

/// One decision point, recorded when tracing is enabled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionRecord {
    pub time: u64,
    pub available: Vec<u32>,
    pub eligible: Vec<AmPair>,
    pub priorities: Vec<f64>,
    pub knee_subset: Vec<AmPair>,
    pub groups: Vec<ActivityGroup>,
    pub group_priorities: Vec<f64>,
    pub chosen: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleResult {
    pub makespan: u64,
    pub start_log: Vec<StartEvent>,
    pub decision_trace: Option<Vec<DecisionRecord>>,
}

#[derive(Debug, Clone)]
pub struct SimOptions {
    /// Upper bound on enumerated groups per decision point.
    pub group_cap: usize,
    /// Record decision points; off in the fitness hot loop.
    pub record_trace: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            group_cap: 256,
            record_trace: false,
        }
    }
}

/// Exactly those (activity, mode) whose predecessors all finished, whose
/// activity is neither running nor finished, and whose demand fits the
/// currently available resources. Ascending (activity, mode) order.
pub fn eligible_pairs(ctx: &InstanceContext, state: &ProjectState) -> Vec<AmPair> {
    let mut out = Vec::new();
    for activity in &ctx.instance.activities {
        let i = activity.id;
        if state.finished[i] || state.is_running(i) {
            continue;
        }
        if !activity.predecessors.iter().all(|&p| state.finished[p]) {
            continue;
        }
        for (m, mode) in activity.modes.iter().enumerate() {
            let fits = mode
                .demand
                .iter()
                .zip(&state.available)
                .all(|(d, a)| d <= a);
            if fits {
                out.push(AmPair {
                    activity: i,
                    mode: m,
                });
            }
        }
    }
    out
}

/// Runs the project to completion and returns the realized schedule.
/// Rule evaluations yielding non-finite values are treated as +infinity
/// priorities; the run never aborts.
pub fn simulate<R: Rng + ?Sized>(
    ctx: &InstanceContext,
    rules: &CompiledRules,
    options: &SimOptions,
    rng: &mut R,
) -> ScheduleResult {
    assert!(options.group_cap >= 1, "group_cap must be at least 1");
    let n = ctx.instance.activity_count();
    let mut state = ProjectState::new(ctx);
    let mut start_log: Vec<StartEvent> = Vec::with_capacity(n);
    let mut trace: Option<Vec<DecisionRecord>> = options.record_trace.then(Vec::new);

    loop {
        // Repeat decisions at the current timestamp until nothing fits.
        loop {
            let eligible = eligible_pairs(ctx, &state);
            if eligible.is_empty() {
                break;
            }
            let view = StateView {
                time: state.time,
                available: &state.available,
                eligible_count: eligible.len(),
            };
            let priorities: Vec<f64> = eligible
                .iter()
                .map(|p| {
                    rules
                        .ordering
                        .priority(&pair_attrs(ctx, &view, p.activity, p.mode))
                })
                .collect();
            let knee: Vec<AmPair> = knee_prefix(&priorities)
                .into_iter()
                .map(|i| eligible[i])
                .collect();
            let groups = enumerate_feasible_groups(ctx, &knee, &state.available, options.group_cap);
            debug_assert!(
                !groups.is_empty(),
                "individually feasible pairs form groups"
            );
            let group_priorities: Vec<f64> = groups
                .iter()
                .map(|g| {
                    rules.group.priority(&group_attrs(
                        ctx,
                        &view,
                        g.iter().map(|p| (p.activity, p.mode)),
                    ))
                })
                .collect();
            let chosen = argmin(&group_priorities);
            if let Some(t) = trace.as_mut() {
                t.push(DecisionRecord {
                    time: state.time,
                    available: state.available.clone(),
                    eligible: eligible.clone(),
                    priorities: priorities.clone(),
                    knee_subset: knee.clone(),
                    groups: groups.clone(),
                    group_priorities: group_priorities.clone(),
                    chosen,
                });
            }
            for &pair in &groups[chosen] {
                start_activity(ctx, &mut state, pair, &mut start_log, rng);
            }
        }
        if state.finished_count == n {
            break;
        }
        advance_to_next_completion(ctx, &mut state);
    }

    ScheduleResult {
        makespan: state.time,
        start_log,
        decision_trace: trace,
    }
}

fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v < values[best] {
            best = i;
        }
    }
    best
}

fn start_activity<R: Rng + ?Sized>(
    ctx: &InstanceContext,
    state: &mut ProjectState,
    pair: AmPair,
    start_log: &mut Vec<StartEvent>,
    rng: &mut R,
) {
    let mode = ctx.instance.mode(pair.activity, pair.mode);
    let duration = sample_duration(mode, rng);
    state.realized.insert((pair.activity, pair.mode), duration);
    for (a, d) in state.available.iter_mut().zip(&mode.demand) {
        debug_assert!(*a >= *d);
        *a -= d;
    }
    state.running.push(RunningActivity {
        activity: pair.activity,
        mode: pair.mode,
        finish: state.time + duration as u64,
    });
    state.running_flag[pair.activity] = true;
    start_log.push(StartEvent {
        activity: pair.activity,
        mode: pair.mode,
        start: state.time,
        duration,
    });
}

fn advance_to_next_completion(ctx: &InstanceContext, state: &mut ProjectState) {
    let next = state
        .running
        .iter()
        .map(|r| r.finish)
        .min()
        .expect("unfinished project always has running activities");
    state.time = next;
    let mut i = 0;
    while i < state.running.len() {
        if state.running[i].finish == next {
            let done = state.running.swap_remove(i);
            state.finished[done.activity] = true;
            state.finished_count += 1;
            state.running_flag[done.activity] = false;
            let demand = &ctx.instance.mode(done.activity, done.mode).demand;
            for (a, d) in state.available.iter_mut().zip(demand) {
                *a += d;
            }
        } else {
            i += 1;
        }
    }
}
