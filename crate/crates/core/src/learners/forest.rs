use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{FeatureSampling, RegressionTree, TreeParams};
use super::{fraction_of, Config};
use crate::dataset::{Attribute, Instance, NUM_ATTRIBUTES};
use crate::error::Result;
use crate::seed;

/// Bagged regression trees with per-split attribute sampling. The output is
/// the mean of the member trees' leaf fractions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    trees: Vec<RegressionTree>,
}

impl RandomForest {
    pub fn fit(data: &[Instance], config: &Config, seed: u64) -> Result<Self> {
        let n_trees = config.int("n_estimators")?.unwrap_or(100) as usize;
        let params = TreeParams {
            min_samples_split: config.int("min_sample_split")?.unwrap_or(2) as usize,
            min_samples_leaf: config.int("min_samples_leaf")?.unwrap_or(1) as usize,
            max_depth: None,
            max_leaf_nodes: config.int("max_leaf_nodes")?.map(|v| v as usize),
            features: FeatureSampling::PerSplit(
                config
                    .optional_real("max_feature")?
                    .map_or(NUM_ATTRIBUTES, |r| fraction_of(r, NUM_ATTRIBUTES)),
            ),
        };
        Ok(Self::fit_with(data, &params, n_trees, seed))
    }

    /// Tree `t` draws its bootstrap sample and attribute subsets from its own
    /// RNG seeded with `derive(seed, t)`, so the forest does not depend on
    /// how the trees are scheduled.
    pub fn fit_with(data: &[Instance], params: &TreeParams, n_trees: usize, seed: u64) -> Self {
        let trees = (0..n_trees)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(seed, t as u64));
                let rows: Vec<usize> = (0..data.len()).map(|_| rng.gen_range(0..data.len())).collect();
                RegressionTree::fit_rows(data, rows, params, &mut rng)
            })
            .collect();
        RandomForest { trees }
    }

    pub fn trees(&self) -> &[RegressionTree] {
        &self.trees
    }

    pub fn predict(&self, instance: &Instance) -> f64 {
        if self.trees.is_empty() {
            return 0.0;
        }
        self.trees.iter().map(|t| t.predict(instance)).sum::<f64>() / self.trees.len() as f64
    }

    pub fn features_used(&self) -> BTreeSet<Attribute> {
        self.trees.iter().flat_map(|t| t.features_used()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::{LearnerKind, ParamValue};

    fn data() -> Vec<Instance> {
        (0..60)
            .map(|i| {
                let mut m = [0.0; NUM_ATTRIBUTES];
                for (j, v) in m.iter_mut().enumerate() {
                    *v = ((i * (j + 3)) % 17) as f64;
                }
                Instance::new(m, (i % 4 == 0) as u32 * (i % 3) as u32).unwrap()
            })
            .collect()
    }

    #[test]
    fn tree_count_and_reproducibility() {
        let mut cfg = Config::default_for(LearnerKind::RandomForest);
        cfg.values.insert("n_estimators".into(), ParamValue::Int(50));
        let a = RandomForest::fit(&data(), &cfg, 9).unwrap();
        let b = RandomForest::fit(&data(), &cfg, 9).unwrap();
        assert_eq!(a.trees().len(), 50);
        assert_eq!(a, b);
        let c = RandomForest::fit(&data(), &cfg, 10).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn output_is_a_fraction() {
        let cfg = Config::default_for(LearnerKind::RandomForest);
        let rows = data();
        let f = RandomForest::fit(&rows, &cfg, 1).unwrap();
        for r in &rows {
            let o = f.predict(r);
            assert!((0.0..=1.0).contains(&o));
        }
    }

    #[test]
    fn leaf_cap_applies_to_every_tree() {
        let mut cfg = Config::default_for(LearnerKind::RandomForest);
        cfg.values.insert("max_leaf_nodes".into(), ParamValue::Int(3));
        cfg.values.insert("n_estimators".into(), ParamValue::Int(50));
        let f = RandomForest::fit(&data(), &cfg, 2).unwrap();
        assert!(f.trees().iter().all(|t| t.leaf_count() <= 3));
    }
}
