use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::LearnerKind;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamKind {
    Continuous,
    Integer,
    Boolean,
}

/// A parameter value. `Unset` stands for a "None" default such as an
/// unbounded depth or "use every attribute".
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Bool(bool),
    Int(i64),
    Real(f64),
    Unset,
}

impl ParamValue {
    /// Numeric view; `None` for booleans and unset values.
    pub fn as_f64(self) -> Option<f64> {
        match self {
            ParamValue::Int(v) => Some(v as f64),
            ParamValue::Real(v) => Some(v),
            ParamValue::Bool(_) | ParamValue::Unset => None,
        }
    }

    pub fn as_bool(self) -> Option<bool> {
        match self {
            ParamValue::Bool(b) => Some(b),
            _ => None,
        }
    }
}

impl std::fmt::Display for ParamValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParamValue::Bool(b) => write!(f, "{b}"),
            ParamValue::Int(v) => write!(f, "{v}"),
            ParamValue::Real(v) => write!(f, "{v}"),
            ParamValue::Unset => f.write_str("none"),
        }
    }
}

/// One tunable parameter: its kind, legal range and default.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamSpec {
    pub name: &'static str,
    pub kind: ParamKind,
    pub low: f64,
    pub high: f64,
    pub default: ParamValue,
}

impl ParamSpec {
    const fn real(name: &'static str, low: f64, high: f64, default: ParamValue) -> Self {
        ParamSpec {
            name,
            kind: ParamKind::Continuous,
            low,
            high,
            default,
        }
    }

    const fn int(name: &'static str, low: f64, high: f64, default: ParamValue) -> Self {
        ParamSpec {
            name,
            kind: ParamKind::Integer,
            low,
            high,
            default,
        }
    }

    const fn boolean(name: &'static str, default: bool) -> Self {
        ParamSpec {
            name,
            kind: ParamKind::Boolean,
            low: 0.0,
            high: 1.0,
            default: ParamValue::Bool(default),
        }
    }

    /// Whether `value` is legal for this parameter. `Unset` is legal only
    /// where it is the default.
    pub fn accepts(&self, value: ParamValue) -> bool {
        match (self.kind, value) {
            (ParamKind::Boolean, ParamValue::Bool(_)) => true,
            (ParamKind::Integer, ParamValue::Int(v)) => {
                (self.low..=self.high).contains(&(v as f64))
            }
            (ParamKind::Continuous, ParamValue::Real(v)) => {
                v.is_finite() && (self.low..=self.high).contains(&v)
            }
            (ParamKind::Integer | ParamKind::Continuous, ParamValue::Unset) => {
                self.default == ParamValue::Unset
            }
            _ => false,
        }
    }

    /// Numeric value used for arithmetic on this parameter. An unset
    /// "no limit" value reads as the upper bound of the range.
    pub fn numeric(&self, value: ParamValue) -> f64 {
        value.as_f64().unwrap_or(self.high)
    }
}

use ParamValue::{Int, Real, Unset};

const WHERE_SPACE: [ParamSpec; 9] = [
    ParamSpec::real("threshold", 0.01, 1.0, Real(0.5)),
    ParamSpec::real("infoPrune", 0.01, 1.0, Real(0.33)),
    ParamSpec::int("min_sample_split", 1.0, 10.0, Int(4)),
    ParamSpec::real("min_Size", 0.01, 1.0, Real(0.5)),
    ParamSpec::real("wriggle", 0.01, 1.0, Real(0.2)),
    ParamSpec::int("depthMin", 1.0, 6.0, Int(2)),
    ParamSpec::int("depthMax", 1.0, 20.0, Int(10)),
    ParamSpec::boolean("wherePrune", false),
    ParamSpec::boolean("treePrune", true),
];

const CART_SPACE: [ParamSpec; 5] = [
    ParamSpec::real("threshold", 0.0, 1.0, Real(0.5)),
    ParamSpec::real("max_feature", 0.01, 1.0, Unset),
    ParamSpec::int("min_sample_split", 2.0, 20.0, Int(2)),
    ParamSpec::int("min_samples_leaf", 1.0, 20.0, Int(1)),
    ParamSpec::int("max_depth", 1.0, 50.0, Unset),
];

const FOREST_SPACE: [ParamSpec; 6] = [
    ParamSpec::real("threshold", 0.01, 1.0, Real(0.5)),
    ParamSpec::real("max_feature", 0.01, 1.0, Unset),
    ParamSpec::int("max_leaf_nodes", 1.0, 50.0, Unset),
    ParamSpec::int("min_sample_split", 2.0, 20.0, Int(2)),
    ParamSpec::int("min_samples_leaf", 1.0, 20.0, Int(1)),
    ParamSpec::int("n_estimators", 50.0, 150.0, Int(100)),
];

/// The tunable parameters of a learner; empty for logistic regression.
pub fn param_space(learner: LearnerKind) -> &'static [ParamSpec] {
    match learner {
        LearnerKind::Where => &WHERE_SPACE,
        LearnerKind::Cart => &CART_SPACE,
        LearnerKind::RandomForest => &FOREST_SPACE,
        LearnerKind::LogisticRegression => &[],
    }
}

/// Clamps a numeric value into the spec's range; integer kinds are then
/// rounded to the nearest integer.
pub fn trim(spec: &ParamSpec, value: f64) -> ParamValue {
    let clamped = if value.is_nan() {
        spec.low
    } else {
        value.clamp(spec.low, spec.high)
    };
    match spec.kind {
        ParamKind::Integer => Int(clamped.round() as i64),
        ParamKind::Continuous => Real(clamped),
        ParamKind::Boolean => ParamValue::Bool(clamped >= 0.5),
    }
}

/// Named parameter values.
pub type Params = BTreeMap<String, ParamValue>;

/// A concrete assignment of a learner's parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub learner: LearnerKind,
    pub values: Params,
}

impl Config {
    /// The off-the-shelf configuration.
    pub fn default_for(learner: LearnerKind) -> Self {
        Config {
            learner,
            values: param_space(learner)
                .iter()
                .map(|s| (s.name.to_string(), s.default))
                .collect(),
        }
    }

    pub fn new(learner: LearnerKind, values: Params) -> Result<Self> {
        let cfg = Config { learner, values };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Every parameter of the learner present, legal, and nothing extra.
    pub fn validate(&self) -> Result<()> {
        let space = param_space(self.learner);
        for spec in space {
            let value = self.values.get(spec.name).ok_or_else(|| {
                Error::InvalidConfig(format!("{}: missing `{}`", self.learner, spec.name))
            })?;
            if !spec.accepts(*value) {
                return Err(Error::InvalidConfig(format!(
                    "{}: `{}` = {value} outside {:?} [{}, {}]",
                    self.learner, spec.name, spec.kind, spec.low, spec.high
                )));
            }
        }
        if let Some(extra) = self.values.keys().find(|k| !space.iter().any(|s| s.name == *k)) {
            return Err(Error::InvalidConfig(format!(
                "{}: unknown parameter `{extra}`",
                self.learner
            )));
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<ParamValue> {
        self.values
            .get(name)
            .copied()
            .ok_or_else(|| Error::InvalidConfig(format!("{}: missing `{name}`", self.learner)))
    }

    pub fn real(&self, name: &str) -> Result<f64> {
        self.get(name)?
            .as_f64()
            .ok_or_else(|| Error::InvalidConfig(format!("`{name}` is not numeric")))
    }

    /// Integer parameter; `None` when unset.
    pub fn int(&self, name: &str) -> Result<Option<i64>> {
        match self.get(name)? {
            Int(v) => Ok(Some(v)),
            Unset => Ok(None),
            other => Err(Error::InvalidConfig(format!("`{name}` = {other} is not an integer"))),
        }
    }

    /// Real parameter; `None` when unset.
    pub fn optional_real(&self, name: &str) -> Result<Option<f64>> {
        match self.get(name)? {
            Unset => Ok(None),
            v => v
                .as_f64()
                .map(Some)
                .ok_or_else(|| Error::InvalidConfig(format!("`{name}` is not numeric"))),
        }
    }

    pub fn flag(&self, name: &str) -> Result<bool> {
        self.get(name)?
            .as_bool()
            .ok_or_else(|| Error::InvalidConfig(format!("`{name}` is not a boolean")))
    }
}
