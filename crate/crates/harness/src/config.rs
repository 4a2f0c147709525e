//! One configuration file drives every CLI verb. TOML is the primary
//! format with a JSON mirror; the extension decides the parser.

use crate::{HarnessError, Result};
use serde::{Deserialize, Serialize};
use skggp_core::gp::AlgorithmConfig;
use skggp_core::project::ScenarioConfig;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FileConfig {
    pub scenario: ScenarioConfig,
    pub plan: PlanSection,
    /// Ordered list; the first entry is the baseline for budget-saved and
    /// comparison analyses.
    #[serde(rename = "algorithm")]
    pub algorithms: Vec<AlgorithmEntry>,
    #[serde(default)]
    pub quality: Option<QualitySection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgorithmEntry {
    pub label: String,
    #[serde(flatten)]
    pub config: AlgorithmConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct PlanSection {
    pub master_seed: u64,
    pub repetitions: usize,
    pub output_dir: PathBuf,
    /// Held-out test instances; their generation and duration seeds are
    /// derived from tags disjoint from the training ones.
    pub test_instances: usize,
    pub situations_per_kind: usize,
    pub min_candidates: usize,
}

impl Default for PlanSection {
    fn default() -> Self {
        Self {
            master_seed: 0,
            repetitions: 1,
            output_dir: PathBuf::from("out"),
            test_instances: 5,
            situations_per_kind: 10,
            min_candidates: 10,
        }
    }
}

/// Settings for the instrumented surrogate-quality replay, in which every
/// intermediate offspring is fully evaluated. Expensive by design; desk
/// scale only.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct QualitySection {
    pub multipliers: Vec<f64>,
    pub seeds: usize,
    pub generations: usize,
    pub population_size: usize,
    /// Replace surrogate estimates with the true fitness; precision must
    /// then be exactly 1.
    pub perfect_oracle: bool,
}

impl Default for QualitySection {
    fn default() -> Self {
        Self {
            multipliers: vec![1.5, 4.0],
            seeds: 5,
            generations: 10,
            population_size: 30,
            perfect_oracle: false,
        }
    }
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        let config: FileConfig = match path.extension().and_then(|e| e.to_str()) {
            Some("json") => serde_json::from_str(&text)
                .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?,
            _ => toml::from_str(&text)
                .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        if self.algorithms.is_empty() {
            return Err(HarnessError::Config("no [[algorithm]] entries".into()));
        }
        let mut labels = std::collections::HashSet::new();
        for entry in &self.algorithms {
            if entry.label.is_empty() || entry.label.contains(['/', '\\']) {
                return Err(HarnessError::Config(format!(
                    "algorithm label `{}` must be non-empty and path-safe",
                    entry.label
                )));
            }
            if !labels.insert(&entry.label) {
                return Err(HarnessError::Config(format!(
                    "duplicate algorithm label `{}`",
                    entry.label
                )));
            }
            entry
                .config
                .validate()
                .map_err(|e| HarnessError::Config(format!("algorithm `{}`: {e}", entry.label)))?;
        }
        if self.plan.repetitions == 0 {
            return Err(HarnessError::Config("repetitions must be positive".into()));
        }
        if self.plan.test_instances == 0 {
            return Err(HarnessError::Config(
                "test_instances must be positive".into(),
            ));
        }
        if self.plan.situations_per_kind == 0 {
            return Err(HarnessError::Config(
                "situations_per_kind must be positive".into(),
            ));
        }
        if self.plan.min_candidates < 2 {
            return Err(HarnessError::Config(
                "min_candidates must be at least 2".into(),
            ));
        }
        if let Some(q) = &self.quality {
            if q.multipliers.is_empty() || q.multipliers.iter().any(|&k| k < 1.0) {
                return Err(HarnessError::Config(
                    "quality.multipliers must be non-empty, each at least 1".into(),
                ));
            }
            if q.seeds == 0 || q.generations == 0 || q.population_size == 0 {
                return Err(HarnessError::Config(
                    "quality.seeds, generations and population_size must be positive".into(),
                ));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const SAMPLE: &str = r#"
[scenario]
activity_count = 20
modes_per_activity = 3
resource_type_count = 4
target_order_strength = 0.5
instances_per_evaluation = 3

[plan]
master_seed = 42
repetitions = 2
output_dir = "out"
test_instances = 2
situations_per_kind = 4
min_candidates = 4

[[algorithm]]
label = "KGGP"
population_size = 10
generations = 3

[[algorithm]]
label = "SKGGP-2"
population_size = 10
generations = 3
offspring_multiplier = 2.0
surrogate_enabled = true
dedup_enabled = true
"#;

    #[test]
    fn parses_toml_and_preserves_order() {
        let cfg: FileConfig = toml::from_str(SAMPLE).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.algorithms[0].label, "KGGP");
        assert_eq!(cfg.algorithms[1].label, "SKGGP-2");
        assert!(cfg.algorithms[1].config.surrogate_enabled);
        assert_eq!(cfg.algorithms[0].config.crossover_rate, 0.85);
        assert_eq!(cfg.plan.situations_per_kind, 4);
    }

    #[test]
    fn json_mirror_parses_identically() {
        let cfg: FileConfig = toml::from_str(SAMPLE).unwrap();
        let json = serde_json::to_string(&cfg).unwrap();
        let back: FileConfig = serde_json::from_str(&json).unwrap();
        back.validate().unwrap();
        assert_eq!(back.algorithms[1].label, cfg.algorithms[1].label);
        assert_eq!(back.scenario, cfg.scenario);
    }

    #[test]
    fn rejects_duplicate_labels_and_bad_rates() {
        let mut cfg: FileConfig = toml::from_str(SAMPLE).unwrap();
        cfg.algorithms[1].label = "KGGP".into();
        assert!(matches!(cfg.validate(), Err(HarnessError::Config(_))));

        let mut cfg: FileConfig = toml::from_str(SAMPLE).unwrap();
        cfg.algorithms[0].config.crossover_rate = 0.9;
        cfg.algorithms[0].config.mutation_rate = 0.3;
        assert!(matches!(cfg.validate(), Err(HarnessError::Config(_))));
    }
}
