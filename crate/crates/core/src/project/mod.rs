//! DMRCPSP instances: activities with multiple execution modes, a precedence
//! DAG and renewable resource capacities.
//!
//! Instances are immutable after construction and safe to share across
//! parallel fitness evaluations.

mod duration;
mod generate;
mod topology;

pub use duration::sample_duration;
pub use generate::{generate_instance, GenerateError, ScenarioConfig};
pub use topology::Topology;

use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

/// One execution option of an activity: a duration estimate triple plus a
/// per-resource demand vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mode {
    #[serde(rename = "opt")]
    pub optimistic: u32,
    #[serde(rename = "exp")]
    pub expected: u32,
    #[serde(rename = "pes")]
    pub pessimistic: u32,
    pub demand: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Activity {
    pub id: usize,
    pub predecessors: Vec<usize>,
    pub modes: Vec<Mode>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectInstance {
    pub id: String,
    pub capacities: Vec<u32>,
    pub activities: Vec<Activity>,
}

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
    #[error("precedence graph contains a cycle through activity {0}")]
    Cycle(usize),
    #[error("failed to parse instance: {0}")]
    Parse(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn invalid(path: String, message: String) -> InstanceError {
    InstanceError::Invalid { path, message }
}

impl ProjectInstance {
    pub fn activity_count(&self) -> usize {
        self.activities.len()
    }

    pub fn resource_count(&self) -> usize {
        self.capacities.len()
    }

    pub fn mode(&self, activity: usize, mode: usize) -> &Mode {
        &self.activities[activity].modes[mode]
    }

    /// Checks every structural invariant; errors carry the field path of the
    /// first violation found.
    pub fn validate(&self) -> Result<(), InstanceError> {
        let n = self.activities.len();
        let r = self.capacities.len();
        for (i, &cap) in self.capacities.iter().enumerate() {
            if cap == 0 {
                return Err(invalid(
                    format!("capacities[{i}]"),
                    "capacity must be positive".into(),
                ));
            }
        }
        let modes_per_activity = self
            .activities
            .first()
            .map(|a| a.modes.len())
            .unwrap_or_default();
        for (i, act) in self.activities.iter().enumerate() {
            let path = format!("activities[{i}]");
            if act.id != i {
                return Err(invalid(
                    format!("{path}.id"),
                    format!("expected id {i}, found {}", act.id),
                ));
            }
            if act.modes.is_empty() {
                return Err(invalid(format!("{path}.modes"), "no modes".into()));
            }
            if act.modes.len() != modes_per_activity {
                return Err(invalid(
                    format!("{path}.modes"),
                    format!(
                        "expected {modes_per_activity} modes (uniform per instance), found {}",
                        act.modes.len()
                    ),
                ));
            }
            for (m, mode) in act.modes.iter().enumerate() {
                let mpath = format!("{path}.modes[{m}]");
                if mode.optimistic == 0 {
                    return Err(invalid(
                        mpath,
                        "optimistic duration must be positive".into(),
                    ));
                }
                if !(mode.optimistic <= mode.expected && mode.expected <= mode.pessimistic) {
                    return Err(invalid(
                        mpath,
                        format!(
                            "duration triple not ordered: opt {} <= exp {} <= pes {} violated",
                            mode.optimistic, mode.expected, mode.pessimistic
                        ),
                    ));
                }
                if mode.demand.len() != r {
                    return Err(invalid(
                        format!("{mpath}.demand"),
                        format!("length {} != resource count {r}", mode.demand.len()),
                    ));
                }
                for (k, &d) in mode.demand.iter().enumerate() {
                    if d > self.capacities[k] {
                        return Err(invalid(
                            format!("{mpath}.demand[{k}]"),
                            format!("demand {d} exceeds capacity {}", self.capacities[k]),
                        ));
                    }
                }
            }
            for (p, &pred) in act.predecessors.iter().enumerate() {
                if pred >= n {
                    return Err(invalid(
                        format!("{path}.predecessors[{p}]"),
                        format!("unknown activity {pred}"),
                    ));
                }
                if pred == i {
                    return Err(invalid(
                        format!("{path}.predecessors[{p}]"),
                        "activity cannot precede itself".into(),
                    ));
                }
            }
        }
        // Acyclicity is the topology builder's job.
        Topology::new(&self.predecessor_lists())?;
        Ok(())
    }

    pub fn predecessor_lists(&self) -> Vec<Vec<usize>> {
        self.activities
            .iter()
            .map(|a| a.predecessors.clone())
            .collect()
    }

    /// Canonical JSON form; identical instances serialize byte-identically.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("instance serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, InstanceError> {
        let instance: ProjectInstance = serde_json::from_str(text)?;
        instance.validate()?;
        Ok(instance)
    }

    pub fn save(&self, path: &Path) -> Result<(), InstanceError> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, InstanceError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }
}

/// Order strength: transitive-closure arc count over n(n-1)/2. Zero for
/// instances with fewer than two activities.
pub fn compute_order_strength(instance: &ProjectInstance) -> f64 {
    let n = instance.activity_count();
    if n < 2 {
        return 0.0;
    }
    let topo = Topology::new(&instance.predecessor_lists()).expect("validated instance");
    topo.transitive_arc_count() as f64 / (n * (n - 1) / 2) as f64
}

/// Critical-path length on each activity's minimum optimistic duration,
/// ignoring resource constraints. A valid lower bound for every feasible
/// realized makespan.
pub fn lower_bound(instance: &ProjectInstance) -> u64 {
    let topo = Topology::new(&instance.predecessor_lists()).expect("validated instance");
    let durations: Vec<u64> = instance
        .activities
        .iter()
        .map(|a| {
            a.modes
                .iter()
                .map(|m| m.optimistic as u64)
                .min()
                .unwrap_or(0)
        })
        .collect();
    topo.longest_path(&durations)
}

/// A project instance packaged with the derived data the simulator and the
/// rule attributes need: topology, per-activity statics and the lower bound.
#[derive(Debug, Clone)]
pub struct InstanceContext {
    pub instance: ProjectInstance,
    pub topology: Topology,
    pub lower_bound: u64,
    /// min over modes of the expected duration, per activity
    pub min_expected: Vec<f64>,
    /// direct successor count, per activity
    pub successor_count: Vec<f64>,
    /// summed min-expected duration of all transitive successors
    pub successor_work: Vec<f64>,
    /// longest min-expected path from the activity (inclusive) to the end
    pub critical_path_to_end: Vec<f64>,
    pub capacities_f: Vec<f64>,
}

impl InstanceContext {
    pub fn new(instance: ProjectInstance) -> Result<Self, InstanceError> {
        instance.validate()?;
        let topology = Topology::new(&instance.predecessor_lists())?;
        let n = instance.activity_count();
        let min_expected: Vec<f64> = instance
            .activities
            .iter()
            .map(|a| a.modes.iter().map(|m| m.expected).min().unwrap_or(0) as f64)
            .collect();
        let successor_count: Vec<f64> = (0..n)
            .map(|i| topology.successors(i).len() as f64)
            .collect();
        let mut successor_work = vec![0.0; n];
        for (i, work) in successor_work.iter_mut().enumerate() {
            *work = topology
                .transitive_successors(i)
                .map(|j| min_expected[j])
                .sum();
        }
        // Longest path to the sink, processed in reverse topological order.
        let mut critical_path_to_end = vec![0.0; n];
        for &i in topology.topo_order().iter().rev() {
            let tail = topology
                .successors(i)
                .iter()
                .map(|&j| critical_path_to_end[j])
                .fold(0.0, f64::max);
            critical_path_to_end[i] = min_expected[i] + tail;
        }
        let lb = {
            let durations: Vec<u64> = instance
                .activities
                .iter()
                .map(|a| {
                    a.modes
                        .iter()
                        .map(|m| m.optimistic as u64)
                        .min()
                        .unwrap_or(0)
                })
                .collect();
            topology.longest_path(&durations)
        };
        let capacities_f = instance.capacities.iter().map(|&c| c as f64).collect();
        Ok(Self {
            instance,
            topology,
            lower_bound: lb,
            min_expected,
            successor_count,
            successor_work,
            critical_path_to_end,
            capacities_f,
        })
    }
}
