use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::constructions::DEFAULT_BRUTE_FORCE_BUDGET;
use crate::fraction::Fraction;
use crate::recovery::Estimator;
use crate::sensing::ValueModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    SupportSweep,
    ApproxSweep,
    AdversaryAudit,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::SupportSweep => "support-sweep",
            Mode::ApproxSweep => "approx-sweep",
            Mode::AdversaryAudit => "adversary-audit",
        }
    }

    pub fn parse(s: &str) -> Option<Mode> {
        [Mode::SupportSweep, Mode::ApproxSweep, Mode::AdversaryAudit]
            .into_iter()
            .find(|m| m.as_str() == s)
    }
}

/// Parameter lists; the sweep runs over their cartesian product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub n: Vec<usize>,
    pub k: Vec<usize>,
    /// Fixed ground-set sizes. When empty, `c_m` multipliers size the ground set.
    #[serde(default)]
    pub m: Vec<usize>,
    #[serde(default = "default_c_m")]
    pub c_m: Vec<f64>,
    #[serde(default)]
    pub epsilon: Vec<f64>,
    #[serde(default)]
    pub m2: Vec<usize>,
}

fn default_c_m() -> Vec<f64> {
    vec![100.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructionSettings {
    #[serde(default = "default_alpha")]
    pub alpha: Fraction,
    #[serde(default = "default_c_d")]
    pub c_d: f64,
    /// Fixed set size; overrides `c_d`.
    #[serde(default)]
    pub d: Option<usize>,
    #[serde(default = "default_retries")]
    pub max_retries: u32,
    #[serde(default = "default_brute_budget")]
    pub brute_force_budget: f64,
}

fn default_alpha() -> Fraction {
    Fraction::HALF
}
fn default_c_d() -> f64 {
    10.0
}
fn default_retries() -> u32 {
    10
}
fn default_brute_budget() -> f64 {
    DEFAULT_BRUTE_FORCE_BUDGET
}

impl Default for ConstructionSettings {
    fn default() -> Self {
        Self {
            alpha: default_alpha(),
            c_d: default_c_d(),
            d: None,
            max_retries: default_retries(),
            brute_force_budget: default_brute_budget(),
        }
    }
}

/// Caps on a run. When one is hit the sweep stops before the next grid point
/// and leaves a `budget-exceeded` marker.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budget {
    #[serde(default)]
    pub max_trials: Option<u64>,
    #[serde(default)]
    pub max_seconds: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub grid: Grid,
    pub trials: usize,
    #[serde(default = "default_models")]
    pub value_models: Vec<ValueModel>,
    pub seed: u64,
    #[serde(default)]
    pub budget: Budget,
    #[serde(default)]
    pub construction: ConstructionSettings,
    #[serde(default = "default_estimator")]
    pub estimator: Estimator,
    /// Zero-perturbation size for the real-valued adversary.
    #[serde(default = "default_adversary_epsilon")]
    pub adversary_epsilon: f64,
}

fn default_models() -> Vec<ValueModel> {
    vec![
        ValueModel::UnitPositive,
        ValueModel::RandomSigns,
        ValueModel::AdversarialCancel,
        ValueModel::ConditionNumber(1e6),
    ]
}
fn default_estimator() -> Estimator {
    Estimator::Linear
}
fn default_adversary_epsilon() -> f64 {
    0.5
}

/// How the ground set of a grid point is sized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GroundSize {
    Fixed(usize),
    Multiplier(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub index: usize,
    pub n: usize,
    pub k: usize,
    pub ground: GroundSize,
    pub epsilon: Option<f64>,
    pub m2: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let config: Self = serde_json::from_str(text).map_err(|e| HarnessError::InvalidConfig(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: &str| Err(HarnessError::InvalidConfig(msg.to_string()));
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        if self.grid.n.is_empty() || self.grid.k.is_empty() {
            return bad("grid.n and grid.k must be non-empty");
        }
        if self.grid.k.contains(&0) {
            return bad("grid.k entries must be at least 1");
        }
        match self.mode {
            Mode::SupportSweep | Mode::ApproxSweep => {
                if self.value_models.is_empty() {
                    return bad("value_models must be non-empty");
                }
                if self.grid.m.is_empty() && self.grid.c_m.is_empty() {
                    return bad("grid needs m or c_m values");
                }
            }
            Mode::AdversaryAudit => {
                if self.grid.m.is_empty() {
                    return bad("adversary-audit needs grid.m");
                }
            }
        }
        if self.mode == Mode::ApproxSweep && self.grid.m2.is_empty() {
            return bad("approx-sweep needs grid.m2");
        }
        if self.grid.epsilon.iter().any(|&e| !(e > 0.0 && e < 2.0)) {
            return bad("grid.epsilon entries must lie in (0, 2)");
        }
        Ok(())
    }

    /// Grid points in a fixed order: n, k, ground size, epsilon, m2 (last varies fastest).
    pub fn grid_points(&self) -> Vec<GridPoint> {
        let grounds: Vec<GroundSize> = if !self.grid.m.is_empty() {
            self.grid.m.iter().map(|&m| GroundSize::Fixed(m)).collect()
        } else {
            self.grid.c_m.iter().map(|&c| GroundSize::Multiplier(c)).collect()
        };
        let epsilons: Vec<Option<f64>> = match self.mode {
            Mode::ApproxSweep if self.grid.epsilon.is_empty() => vec![Some(0.1)],
            Mode::ApproxSweep => self.grid.epsilon.iter().map(|&e| Some(e)).collect(),
            _ => vec![None],
        };
        let m2s: Vec<Option<usize>> = match self.mode {
            Mode::ApproxSweep => self.grid.m2.iter().map(|&m| Some(m)).collect(),
            _ => vec![None],
        };
        let mut points = Vec::new();
        for &n in &self.grid.n {
            for &k in &self.grid.k {
                for &ground in &grounds {
                    for &epsilon in &epsilons {
                        for &m2 in &m2s {
                            points.push(GridPoint {
                                index: points.len(),
                                n,
                                k,
                                ground,
                                epsilon,
                                m2,
                            });
                        }
                    }
                }
            }
        }
        points
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_config() {
        let config =
            ExperimentConfig::from_json(r#"{"mode":"support-sweep","grid":{"n":[20],"k":[2]},"trials":3,"seed":1}"#)
                .unwrap();
        assert_eq!(config.value_models.len(), 4);
        assert_eq!(config.construction.alpha, Fraction::HALF);
        let points = config.grid_points();
        assert_eq!(points.len(), 1);
        assert_eq!(points[0].ground, GroundSize::Multiplier(100.0));
    }

    #[test]
    fn rejects_zero_trials() {
        let err =
            ExperimentConfig::from_json(r#"{"mode":"support-sweep","grid":{"n":[20],"k":[2]},"trials":0,"seed":1}"#)
                .unwrap_err();
        assert!(matches!(err, HarnessError::InvalidConfig(_)));
    }

    #[test]
    fn approx_needs_m2() {
        assert!(ExperimentConfig::from_json(
            r#"{"mode":"approx-sweep","grid":{"n":[20],"k":[2]},"trials":1,"seed":1}"#
        )
        .is_err());
        let config = ExperimentConfig::from_json(
            r#"{"mode":"approx-sweep","grid":{"n":[20],"k":[2],"m2":[64,128],"epsilon":[0.1,0.2]},"trials":1,"seed":1,
               "value_models":["random-signs",{"condition-number":100.0}]}"#,
        )
        .unwrap();
        let points = config.grid_points();
        assert_eq!(points.len(), 4);
        assert_eq!((points[1].epsilon, points[1].m2), (Some(0.1), Some(128)));
        assert_eq!(points[2].epsilon, Some(0.2));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(ExperimentConfig::from_json(
            r#"{"mode":"support-sweep","grid":{"n":[20],"k":[2]},"trials":1,"seed":1,"bogus":1}"#
        )
        .is_err());
    }
}
