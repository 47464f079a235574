//! The four defect predictors and their tunable parameter spaces.
//!
//! Every learner produces a numeric score in `[0, 1]` per instance (a leaf's
//! defective fraction, the forest mean of those, or the logistic output) and
//! predicts "defective" when that score reaches the configured `threshold`.

mod forest;
mod logistic;
mod params;
mod tree;
mod where_tree;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::{Attribute, Instance, Release};
use crate::error::{Error, Result};

pub use forest::RandomForest;
pub use logistic::{fit_logistic, LogisticFit, LogisticModel};
pub use params::{param_space, trim, Config, ParamKind, ParamSpec, ParamValue, Params};
pub use tree::{cart_split_score, FeatureSampling, RegressionTree, SplitChoice, TreeNode, TreeParams};
pub use where_tree::{
    info_gain_ranking, where_cluster_tree, where_decision_tree, ClusterTree, DecisionNode,
    DecisionTree, WhereModel, WhereParams,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerKind {
    Where,
    Cart,
    RandomForest,
    LogisticRegression,
}

impl LearnerKind {
    pub const ALL: [LearnerKind; 4] = [
        LearnerKind::Where,
        LearnerKind::Cart,
        LearnerKind::RandomForest,
        LearnerKind::LogisticRegression,
    ];

    /// Short name used on the command line and in report files.
    pub fn as_str(self) -> &'static str {
        match self {
            LearnerKind::Where => "where",
            LearnerKind::Cart => "cart",
            LearnerKind::RandomForest => "rf",
            LearnerKind::LogisticRegression => "lr",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            LearnerKind::Where => "WHERE",
            LearnerKind::Cart => "CART",
            LearnerKind::RandomForest => "Random Forest",
            LearnerKind::LogisticRegression => "Logistic Regression",
        }
    }

    pub fn is_tunable(self) -> bool {
        !param_space(self).is_empty()
    }
}

impl fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LearnerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "where" => Ok(LearnerKind::Where),
            "cart" => Ok(LearnerKind::Cart),
            "rf" | "random_forest" | "randomforest" => Ok(LearnerKind::RandomForest),
            "lr" | "logistic" | "logistic_regression" => Ok(LearnerKind::LogisticRegression),
            other => Err(Error::Unknown {
                kind: "learner",
                value: other.to_string(),
            }),
        }
    }
}

/// The fitted structure of a model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelBody {
    Cart { tree: RegressionTree },
    RandomForest { forest: RandomForest },
    Where { model: WhereModel },
    LogisticRegression { model: Box<LogisticModel> },
}

/// A trained predictor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub learner: LearnerKind,
    pub threshold: f64,
    pub body: ModelBody,
}

/// Coefficients at or below this magnitude do not count as "used" features.
pub const COEFFICIENT_EPSILON: f64 = 1e-6;

/// LR has no tunable threshold.
const LOGISTIC_THRESHOLD: f64 = 0.5;

impl Model {
    /// Numeric output in `[0, 1]` before thresholding.
    pub fn score(&self, instance: &Instance) -> f64 {
        match &self.body {
            ModelBody::Cart { tree } => tree.predict(instance),
            ModelBody::RandomForest { forest } => forest.predict(instance),
            ModelBody::Where { model } => model.predict(instance),
            ModelBody::LogisticRegression { model } => model.predict(instance),
        }
    }

    pub fn predict(&self, instance: &Instance) -> bool {
        self.score(instance) >= self.threshold
    }

    pub fn predict_all(&self, instances: &[Instance]) -> Vec<bool> {
        instances.iter().map(|i| self.predict(i)).collect()
    }

    /// Attributes appearing in a split, or with a non-negligible LR coefficient.
    pub fn features_used(&self) -> BTreeSet<Attribute> {
        match &self.body {
            ModelBody::Cart { tree } => tree.features_used(),
            ModelBody::RandomForest { forest } => forest.features_used(),
            ModelBody::Where { model } => model.features_used(),
            ModelBody::LogisticRegression { model } => model.features_used(COEFFICIENT_EPSILON),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Trains a learner on a release.
pub fn train(config: &Config, data: &Release, seed: u64) -> Result<Model> {
    train_on(config, data.instances(), seed)
}

/// Trains a learner on a slice of instances.
pub fn train_on(config: &Config, rows: &[Instance], seed: u64) -> Result<Model> {
    config.validate()?;
    if rows.is_empty() {
        return Err(Error::Empty("cannot train on zero instances".into()));
    }
    let (threshold, body) = match config.learner {
        LearnerKind::Cart => {
            let params = TreeParams::cart(config)?;
            let tree = RegressionTree::fit(rows, &params, seed);
            (config.real("threshold")?, ModelBody::Cart { tree })
        }
        LearnerKind::RandomForest => {
            let forest = RandomForest::fit(rows, config, seed)?;
            (config.real("threshold")?, ModelBody::RandomForest { forest })
        }
        LearnerKind::Where => {
            let params = WhereParams::from_config(config)?;
            let model = WhereModel::fit(rows, &params, seed);
            (params.threshold, ModelBody::Where { model })
        }
        LearnerKind::LogisticRegression => {
            let fit = fit_logistic(rows, logistic::MAX_ITERATIONS, logistic::GRADIENT_TOLERANCE);
            (LOGISTIC_THRESHOLD, ModelBody::LogisticRegression { model: Box::new(fit.model) })
        }
    };
    Ok(Model {
        learner: config.learner,
        threshold,
        body,
    })
}

/// `⌈fraction × count⌉`, clamped to `1..=count`, ignoring float noise at integers.
pub(crate) fn fraction_of(fraction: f64, count: usize) -> usize {
    let raw = (fraction * count as f64 - 1e-9).ceil();
    (raw.max(1.0) as usize).min(count)
}
