use std::fs;
use std::path::Path;

use polariscope_core::abm::{InitialCondition, SimConfig};
use polariscope_core::{DecisionLogic, EconomicParams, Group, Model, Strategy, UtilityShape};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::CliError;

/// Payoff preset that supplies defaults for the economic parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    #[default]
    MainText,
    Si,
}

/// What a sweep evaluates at each parameter value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepRun {
    #[default]
    Escape,
    Ensemble,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    /// Name of a real-valued key of [`RunSpec`].
    pub param: String,
    pub min: f64,
    pub max: f64,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default)]
    pub run: SweepRun,
}

fn default_steps() -> usize {
    11
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        let span = self.max - self.min;
        (0..self.steps)
            .map(|k| self.min + span * k as f64 / (self.steps - 1) as f64)
            .collect()
    }
}

/// Every parameter of a run, with the key names used in config files and
/// `--set` overrides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub profile: Profile,
    pub logic: DecisionLogic,
    #[serde(rename = "B_I")]
    pub benefit_in: f64,
    #[serde(rename = "B_O")]
    pub benefit_out: f64,
    #[serde(rename = "q_I")]
    pub success_in: f64,
    #[serde(rename = "q_O")]
    pub success_out: f64,
    pub theta: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub r: f64,
    pub theta0: f64,
    pub beta: f64,
    /// Group receiving the `2β` share: 1 or 2.
    pub scaled_group: u8,
    pub h: f64,
    pub a: f64,
    pub chi: f64,
    pub feedback: bool,
    pub p_resolution: usize,
    pub chi_resolution: usize,
    pub grid_n: usize,
    #[serde(rename = "N")]
    pub n_per_group: usize,
    pub sigma: f64,
    pub mu: f64,
    pub delta: f64,
    /// Initial strategy (the group component for two-dimensional logics).
    pub p0: f64,
    /// Initial party component for two-dimensional logics.
    pub p0_party: f64,
    /// Share of each class that starts at `minority_p` instead of `p0`.
    pub minority_fraction: f64,
    pub minority_p: f64,
    pub events: u64,
    pub replicates: usize,
    /// Replicate index used by the trajectory command.
    pub replicate: u64,
    pub seed: u64,
    pub sweep: Option<Sweep>,
}

impl RunSpec {
    pub fn preset(profile: Profile) -> Self {
        let econ = match profile {
            Profile::MainText => EconomicParams::main_text(),
            Profile::Si => EconomicParams::si(),
        };
        let shape = UtilityShape::default();
        let sim = SimConfig::default();
        Self {
            profile,
            logic: sim.logic,
            benefit_in: econ.benefit_in,
            benefit_out: econ.benefit_out,
            success_in: econ.success_in,
            success_out: econ.success_out,
            theta: econ.theta,
            alpha: econ.alpha,
            gamma: econ.gamma,
            r: econ.multiplier,
            theta0: econ.theta0,
            beta: econ.beta,
            scaled_group: 1,
            h: shape.h,
            a: shape.a,
            chi: sim.chi,
            feedback: sim.feedback,
            p_resolution: 25,
            chi_resolution: 25,
            grid_n: 512,
            n_per_group: sim.n_per_group,
            sigma: sim.selection,
            mu: sim.mutation_rate,
            delta: sim.mutation_size,
            p0: 0.0,
            p0_party: 0.5,
            minority_fraction: 0.0,
            minority_p: 0.0,
            events: sim.events,
            replicates: sim.replicates,
            replicate: 0,
            seed: sim.seed,
            sweep: None,
        }
    }

    /// Resolve a run from an optional JSON config file and `key=value`
    /// overrides, applied in order on top of the profile's defaults.
    pub fn load(config: Option<&Path>, overrides: &[String]) -> Result<Self, CliError> {
        let mut user = match config {
            None => Map::new(),
            Some(path) => {
                let text = fs::read_to_string(path).map_err(CliError::io(path))?;
                match serde_json::from_str(&text) {
                    Ok(Value::Object(map)) => map,
                    Ok(_) => return Err(CliError::Config(format!("{}: expected a JSON object", path.display()))),
                    Err(e) => return Err(CliError::Config(format!("{}: {e}", path.display()))),
                }
            }
        };
        for item in overrides {
            apply_override(&mut user, item)?;
        }
        Self::from_map(user)
    }

    /// Resolve from user-supplied keys on top of the selected profile.
    pub fn from_map(user: Map<String, Value>) -> Result<Self, CliError> {
        let profile: Profile = match user.get("profile") {
            None => Profile::default(),
            Some(v) => serde_json::from_value(v.clone()).map_err(|e| CliError::Config(format!("profile: {e}")))?,
        };
        let Value::Object(mut merged) = serde_json::to_value(Self::preset(profile)).expect("spec serializes")
        else {
            unreachable!("spec serializes to an object")
        };
        merged.extend(user);
        let spec: Self =
            serde_json::from_value(Value::Object(merged)).map_err(|e| CliError::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    /// Copy of this spec with the real-valued key `param` set to `value`.
    pub fn with_param(&self, param: &str, value: f64) -> Result<Self, CliError> {
        let Value::Object(mut map) = serde_json::to_value(self).expect("spec serializes") else {
            unreachable!("spec serializes to an object")
        };
        map.insert(param.to_owned(), Value::from(value));
        Self::from_map(map)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.econ()?.validate()?;
        self.shape().validate()?;
        Model::new(self.logic, self.econ()?, self.shape())?;
        if self.p_resolution < 2 || self.chi_resolution < 2 {
            return Err(CliError::Config("p_resolution and chi_resolution must be at least 2".into()));
        }
        if self.grid_n < 64 {
            return Err(CliError::Config(format!("grid_n must be at least 64, got {}", self.grid_n)));
        }
        self.sim_config()?.validate()?;
        if let Some(sweep) = &self.sweep {
            if sweep.steps < 2 {
                return Err(CliError::Config(format!("sweep.steps must be at least 2, got {}", sweep.steps)));
            }
            let map = serde_json::to_value(self).expect("spec serializes");
            if !map.get(&sweep.param).is_some_and(Value::is_f64) {
                return Err(CliError::Config(format!(
                    "sweep.param `{}` is not a real-valued parameter",
                    sweep.param
                )));
            }
        }
        Ok(())
    }

    pub fn econ(&self) -> Result<EconomicParams, CliError> {
        let scaled_group = match self.scaled_group {
            1 => Group::One,
            2 => Group::Two,
            g => return Err(CliError::Config(format!("scaled_group must be 1 or 2, got {g}"))),
        };
        Ok(EconomicParams {
            benefit_in: self.benefit_in,
            benefit_out: self.benefit_out,
            success_in: self.success_in,
            success_out: self.success_out,
            theta: self.theta,
            alpha: self.alpha,
            gamma: self.gamma,
            multiplier: self.r,
            theta0: self.theta0,
            beta: self.beta,
            scaled_group,
        })
    }

    pub fn shape(&self) -> UtilityShape {
        UtilityShape { h: self.h, a: self.a }
    }

    pub fn model(&self) -> Result<Model, CliError> {
        Ok(Model::new(self.logic, self.econ()?, self.shape())?.with_feedback(self.feedback))
    }

    fn strategy(&self, p: f64) -> Strategy {
        if self.logic.is_two_dimensional() {
            Strategy::TwoDim {
                group: p,
                party: self.p0_party,
            }
        } else {
            Strategy::Scalar(p)
        }
    }

    pub fn sim_config(&self) -> Result<SimConfig, CliError> {
        let initial = if self.minority_fraction > 0.0 {
            InitialCondition::Mixed {
                fraction: self.minority_fraction,
                minority: self.strategy(self.minority_p),
                majority: self.strategy(self.p0),
            }
        } else {
            InitialCondition::Uniform(self.strategy(self.p0))
        };
        Ok(SimConfig {
            n_per_group: self.n_per_group,
            logic: self.logic,
            econ: self.econ()?,
            shape: self.shape(),
            chi: self.chi,
            feedback: self.feedback,
            selection: self.sigma,
            mutation_rate: self.mu,
            mutation_size: self.delta,
            initial,
            events: self.events,
            seed: self.seed,
            replicates: self.replicates,
        })
    }
}

/// Apply one `key=value` override; `a.b=v` sets key `b` of object `a`.
/// Values are read as JSON when they parse, otherwise as strings.
pub fn apply_override(map: &mut Map<String, Value>, item: &str) -> Result<(), CliError> {
    let (key, raw) = item
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override `{item}` is not of the form key=value")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_owned()));
    let mut path: Vec<&str> = key.split('.').collect();
    let last = path.pop().expect("split yields at least one piece");
    if last.is_empty() || path.iter().any(|p| p.is_empty()) {
        return Err(CliError::Config(format!("override `{item}` has an empty key")));
    }
    let mut target = map;
    for part in path {
        let slot = target.entry(part).or_insert_with(|| Value::Object(Map::new()));
        if slot.is_null() {
            *slot = Value::Object(Map::new());
        }
        target = slot
            .as_object_mut()
            .ok_or_else(|| CliError::Config(format!("override `{item}`: `{part}` is not an object")))?;
    }
    target.insert(last.to_owned(), value);
    Ok(())
}
