//! Independent schedule checking against the realized durations.

use super::{ScheduleResult, StartEvent};
use crate::project::InstanceContext;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Violation {
    MissingActivity {
        activity: usize,
    },
    DuplicateActivity {
        activity: usize,
    },
    PrecedenceViolation {
        activity: usize,
        predecessor: usize,
        start: u64,
        predecessor_finish: u64,
    },
    ResourceViolation {
        resource: usize,
        time: u64,
        usage: u64,
        capacity: u32,
    },
    MakespanMismatch {
        stated: u64,
        computed: u64,
    },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::MissingActivity { activity } => {
                write!(f, "activity {activity} never started")
            }
            Violation::DuplicateActivity { activity } => {
                write!(f, "activity {activity} started more than once")
            }
            Violation::PrecedenceViolation {
                activity,
                predecessor,
                start,
                predecessor_finish,
            } => write!(
                f,
                "activity {activity} starts at {start} before predecessor {predecessor} \
                 finishes at {predecessor_finish}"
            ),
            Violation::ResourceViolation {
                resource,
                time,
                usage,
                capacity,
            } => write!(
                f,
                "resource {resource} over capacity at time {time}: usage {usage} > {capacity}"
            ),
            Violation::MakespanMismatch { stated, computed } => {
                write!(f, "stated makespan {stated} != computed {computed}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ValidationReport {
    Pass,
    Fail(Violation),
}

impl ValidationReport {
    pub fn is_pass(&self) -> bool {
        matches!(self, ValidationReport::Pass)
    }
}

/// Checks every schedule invariant: each activity appears exactly once,
/// precedence is respected, a sweep over event times keeps usage within
/// capacity component-wise, and the stated makespan matches the log.
/// Returns the first violation in that checking order.
pub fn validate_schedule(ctx: &InstanceContext, result: &ScheduleResult) -> ValidationReport {
    let n = ctx.instance.activity_count();
    let mut event_by_activity: Vec<Option<&StartEvent>> = vec![None; n];
    for ev in &result.start_log {
        if ev.activity >= n {
            return ValidationReport::Fail(Violation::MissingActivity {
                activity: ev.activity,
            });
        }
        if event_by_activity[ev.activity].is_some() {
            return ValidationReport::Fail(Violation::DuplicateActivity {
                activity: ev.activity,
            });
        }
        event_by_activity[ev.activity] = Some(ev);
    }
    for (i, slot) in event_by_activity.iter().enumerate() {
        if slot.is_none() {
            return ValidationReport::Fail(Violation::MissingActivity { activity: i });
        }
    }

    for (i, act) in ctx.instance.activities.iter().enumerate() {
        let ev = event_by_activity[i].expect("checked above");
        for &p in &act.predecessors {
            let pev = event_by_activity[p].expect("checked above");
            let pred_finish = pev.start + pev.duration as u64;
            if ev.start < pred_finish {
                return ValidationReport::Fail(Violation::PrecedenceViolation {
                    activity: i,
                    predecessor: p,
                    start: ev.start,
                    predecessor_finish: pred_finish,
                });
            }
        }
    }

    // Sweep: at each distinct time apply finishes before starts, then check.
    let mut times: Vec<u64> = result
        .start_log
        .iter()
        .flat_map(|ev| [ev.start, ev.start + ev.duration as u64])
        .collect();
    times.sort_unstable();
    times.dedup();
    let r = ctx.instance.resource_count();
    let mut usage = vec![0u64; r];
    for &t in &times {
        for ev in &result.start_log {
            if ev.start + ev.duration as u64 == t {
                let demand = &ctx.instance.mode(ev.activity, ev.mode).demand;
                for (u, d) in usage.iter_mut().zip(demand) {
                    *u -= *d as u64;
                }
            }
        }
        for ev in &result.start_log {
            if ev.start == t {
                let demand = &ctx.instance.mode(ev.activity, ev.mode).demand;
                for (u, d) in usage.iter_mut().zip(demand) {
                    *u += *d as u64;
                }
            }
        }
        for (k, &used) in usage.iter().enumerate() {
            if used > ctx.instance.capacities[k] as u64 {
                return ValidationReport::Fail(Violation::ResourceViolation {
                    resource: k,
                    time: t,
                    usage: used,
                    capacity: ctx.instance.capacities[k],
                });
            }
        }
    }

    let computed = result
        .start_log
        .iter()
        .map(|ev| ev.start + ev.duration as u64)
        .max()
        .unwrap_or(0);
    if computed != result.makespan {
        return ValidationReport::Fail(Violation::MakespanMismatch {
            stated: result.makespan,
            computed,
        });
    }
    ValidationReport::Pass
}
