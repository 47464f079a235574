//! Regression tree over defect counts, shared by CART and the forest.
//!
//! A split `(attribute, cut)` sends rows with `value <= cut` left. Splits are
//! chosen to minimise the size-weighted sum of the two sides' standard
//! deviations of defect counts; leaves store the defective fraction of their
//! rows.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{fraction_of, Config};
use crate::dataset::{Attribute, Instance, NUM_ATTRIBUTES};
use crate::error::{Error, Result};

/// Scores within this distance count as ties.
pub(crate) const TIE_EPSILON: f64 = 1e-12;

/// Weighted standard-deviation score of splitting `rows` at `cut`:
/// `Σ_side sqrt(var(defect counts)) × n_side / n`.
pub fn cart_split_score(rows: &[Instance], attribute: Attribute, cut: f64) -> Result<f64> {
    let (left, right): (Vec<f64>, Vec<f64>) = {
        let mut l = Vec::new();
        let mut r = Vec::new();
        for row in rows {
            let y = f64::from(row.defect_count());
            if row.metric(attribute) <= cut {
                l.push(y);
            } else {
                r.push(y);
            }
        }
        (l, r)
    };
    if left.is_empty() || right.is_empty() {
        return Err(Error::DegenerateSplit(format!(
            "{attribute} <= {cut} leaves {} | {} rows",
            left.len(),
            right.len()
        )));
    }
    let n = rows.len() as f64;
    Ok([left, right]
        .iter()
        .map(|side| {
            let m = side.len() as f64;
            let mean = side.iter().sum::<f64>() / m;
            let var = side.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / m;
            var.sqrt() * m / n
        })
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureSampling {
    /// Every attribute is a split candidate.
    All,
    /// `k` attributes are drawn once per tree.
    PerTree(usize),
    /// `k` attributes are drawn afresh at every node.
    PerSplit(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeParams {
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    pub max_depth: Option<usize>,
    pub max_leaf_nodes: Option<usize>,
    pub features: FeatureSampling,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            min_samples_split: 2,
            min_samples_leaf: 1,
            max_depth: None,
            max_leaf_nodes: None,
            features: FeatureSampling::All,
        }
    }
}

impl TreeParams {
    pub fn cart(config: &Config) -> Result<Self> {
        Ok(TreeParams {
            min_samples_split: config.int("min_sample_split")?.unwrap_or(2) as usize,
            min_samples_leaf: config.int("min_samples_leaf")?.unwrap_or(1) as usize,
            max_depth: config.int("max_depth")?.map(|d| d as usize),
            max_leaf_nodes: None,
            features: match config.optional_real("max_feature")? {
                None => FeatureSampling::All,
                Some(r) => FeatureSampling::PerTree(fraction_of(r, NUM_ATTRIBUTES)),
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum TreeNode {
    Leaf {
        fraction: f64,
        samples: usize,
    },
    Split {
        attribute: Attribute,
        cut: f64,
        left: usize,
        right: usize,
    },
}

/// Best split found for one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitChoice {
    pub attribute: Attribute,
    pub cut: f64,
    pub score: f64,
    /// Number of rows going left (rows are sorted by the attribute).
    pub left_len: usize,
}

/// Binary tree stored as an arena; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    nodes: Vec<TreeNode>,
}

struct Pending {
    node: usize,
    rows: Vec<usize>,
    depth: usize,
    split: Option<SplitChoice>,
    gain: f64,
}

impl RegressionTree {
    pub fn leaf(fraction: f64, samples: usize) -> Self {
        RegressionTree {
            nodes: vec![TreeNode::Leaf { fraction, samples }],
        }
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, TreeNode::Leaf { .. }))
            .count()
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[TreeNode], i: usize) -> usize {
            match nodes[i] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + go(nodes, left).max(go(nodes, right)),
            }
        }
        go(&self.nodes, 0)
    }

    /// The root's split, if any.
    pub fn root_split(&self) -> Option<(Attribute, f64)> {
        match self.nodes[0] {
            TreeNode::Split { attribute, cut, .. } => Some((attribute, cut)),
            TreeNode::Leaf { .. } => None,
        }
    }

    pub fn predict(&self, instance: &Instance) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                TreeNode::Leaf { fraction, .. } => return fraction,
                TreeNode::Split {
                    attribute,
                    cut,
                    left,
                    right,
                } => i = if instance.metric(attribute) <= cut { left } else { right },
            }
        }
    }

    pub fn features_used(&self) -> BTreeSet<Attribute> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                TreeNode::Split { attribute, .. } => Some(*attribute),
                TreeNode::Leaf { .. } => None,
            })
            .collect()
    }

    /// Fits on every row of `data`.
    pub fn fit(data: &[Instance], params: &TreeParams, seed: u64) -> Self {
        let rows: Vec<usize> = (0..data.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::fit_rows(data, rows, params, &mut rng)
    }

    /// Fits on a multiset of row indices (a bootstrap sample may repeat rows).
    pub fn fit_rows<R: Rng>(
        data: &[Instance],
        rows: Vec<usize>,
        params: &TreeParams,
        rng: &mut R,
    ) -> Self {
        let tree_features: Option<Vec<Attribute>> = match params.features {
            FeatureSampling::PerTree(k) => Some(sample_attributes(rng, k)),
            _ => None,
        };
        let total = rows.len().max(1) as f64;
        let mut tree = RegressionTree { nodes: Vec::new() };
        let mut pending: Vec<Pending> = Vec::new();

        let open = |tree: &mut RegressionTree, rows: Vec<usize>, depth: usize, rng: &mut R| {
            let node = tree.nodes.len();
            tree.nodes.push(leaf_for(data, &rows));
            let can_split = rows.len() >= params.min_samples_split.max(2)
                && params.max_depth.is_none_or(|d| depth < d);
            let (split, gain) = if can_split {
                let var = count_variance(data, &rows);
                if var <= 0.0 {
                    (None, 0.0)
                } else {
                    let candidates = match (&tree_features, params.features) {
                        (Some(f), _) => f.clone(),
                        (None, FeatureSampling::PerSplit(k)) => sample_attributes(rng, k),
                        _ => Attribute::all().collect(),
                    };
                    let split = best_split(data, &rows, &candidates, params.min_samples_leaf);
                    let gain = split.map_or(0.0, |s| (var.sqrt() - s.score) * rows.len() as f64 / total);
                    (split, gain)
                }
            } else {
                (None, 0.0)
            };
            Pending {
                node,
                rows,
                depth,
                split,
                gain,
            }
        };

        let root = open(&mut tree, rows, 0, rng);
        pending.push(root);
        let mut leaves = 1usize;

        loop {
            if params.max_leaf_nodes.is_some_and(|cap| leaves >= cap) {
                break;
            }
            // Unlimited trees grow depth-first; leaf-capped trees grow
            // best-first by weighted score reduction.
            let pick = if params.max_leaf_nodes.is_some() {
                pending
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| p.split.is_some())
                    .fold(None::<(usize, f64)>, |best, (i, p)| match best {
                        Some((_, g)) if p.gain <= g + TIE_EPSILON => best,
                        _ => Some((i, p.gain)),
                    })
                    .map(|(i, _)| i)
            } else {
                pending.iter().rposition(|p| p.split.is_some())
            };
            let Some(idx) = pick else { break };
            let p = pending.swap_remove(idx);
            let split = p.split.expect("picked node has a split");

            let mut sorted = p.rows;
            sort_rows_by(data, &mut sorted, split.attribute);
            let right_rows = sorted.split_off(split.left_len);
            let left_rows = sorted;

            let l = open(&mut tree, left_rows, p.depth + 1, rng);
            let r = open(&mut tree, right_rows, p.depth + 1, rng);
            tree.nodes[p.node] = TreeNode::Split {
                attribute: split.attribute,
                cut: split.cut,
                left: l.node,
                right: r.node,
            };
            leaves += 1;
            pending.push(l);
            pending.push(r);
            if params.max_leaf_nodes.is_none() {
                // Keep depth-first order: the most recently opened nodes last.
                pending.retain(|q| q.split.is_some());
            }
        }
        tree
    }
}

fn sample_attributes<R: Rng>(rng: &mut R, k: usize) -> Vec<Attribute> {
    let k = k.clamp(1, NUM_ATTRIBUTES);
    if k == NUM_ATTRIBUTES {
        return Attribute::all().collect();
    }
    let mut picked: Vec<Attribute> = sample(rng, NUM_ATTRIBUTES, k)
        .into_iter()
        .filter_map(Attribute::new)
        .collect();
    picked.sort_unstable();
    picked
}

fn leaf_for(data: &[Instance], rows: &[usize]) -> TreeNode {
    let defective = rows.iter().filter(|&&r| data[r].is_defective()).count();
    TreeNode::Leaf {
        fraction: if rows.is_empty() {
            0.0
        } else {
            defective as f64 / rows.len() as f64
        },
        samples: rows.len(),
    }
}

fn count_variance(data: &[Instance], rows: &[usize]) -> f64 {
    let n = rows.len() as f64;
    let mean = rows
        .iter()
        .map(|&r| f64::from(data[r].defect_count()))
        .sum::<f64>()
        / n;
    let var = rows
        .iter()
        .map(|&r| (f64::from(data[r].defect_count()) - mean).powi(2))
        .sum::<f64>()
        / n;
    var
}

/// Sorts by attribute value, then by row index, so ties are deterministic.
fn sort_rows_by(data: &[Instance], rows: &mut [usize], attribute: Attribute) {
    rows.sort_by(|&a, &b| {
        data[a]
            .metric(attribute)
            .total_cmp(&data[b].metric(attribute))
            .then(a.cmp(&b))
    });
}

/// Midpoint between two distinct sorted values that still separates them.
pub(crate) fn cut_between(lo: f64, hi: f64) -> f64 {
    let mid = lo + (hi - lo) / 2.0;
    if mid >= hi {
        lo
    } else {
        mid
    }
}

/// Exhaustive search over candidate attributes and every cut between
/// distinct values. Ties go to the earlier attribute, then the lower cut.
pub(crate) fn best_split(
    data: &[Instance],
    rows: &[usize],
    candidates: &[Attribute],
    min_leaf: usize,
) -> Option<SplitChoice> {
    let n = rows.len();
    let min_leaf = min_leaf.max(1);
    if n < 2 * min_leaf {
        return None;
    }
    let mut best: Option<SplitChoice> = None;
    let mut sorted = rows.to_vec();
    let mut values = Vec::with_capacity(n);
    let mut prefix = Vec::with_capacity(n + 1);
    let mut prefix_sq = Vec::with_capacity(n + 1);

    for &attr in candidates {
        sort_rows_by(data, &mut sorted, attr);
        values.clear();
        values.extend(sorted.iter().map(|&r| data[r].metric(attr)));
        prefix.clear();
        prefix_sq.clear();
        prefix.push(0.0);
        prefix_sq.push(0.0);
        for &r in &sorted {
            let y = f64::from(data[r].defect_count());
            prefix.push(prefix.last().unwrap() + y);
            prefix_sq.push(prefix_sq.last().unwrap() + y * y);
        }
        let (sum, sum_sq) = (prefix[n], prefix_sq[n]);
        for i in min_leaf..=(n - min_leaf) {
            if values[i - 1] == values[i] {
                continue;
            }
            let (nl, nr) = (i as f64, (n - i) as f64);
            let var_l = (prefix_sq[i] / nl - (prefix[i] / nl).powi(2)).max(0.0);
            let var_r = ((sum_sq - prefix_sq[i]) / nr - ((sum - prefix[i]) / nr).powi(2)).max(0.0);
            let score = (var_l.sqrt() * nl + var_r.sqrt() * nr) / n as f64;
            if best.is_none_or(|b| score < b.score - TIE_EPSILON) {
                best = Some(SplitChoice {
                    attribute: attr,
                    cut: cut_between(values[i - 1], values[i]),
                    score,
                    left_len: i,
                });
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(points: &[(f64, u32)]) -> Vec<Instance> {
        points
            .iter()
            .map(|&(x, c)| {
                let mut m = [0.0; NUM_ATTRIBUTES];
                m[12] = x;
                Instance::new(m, c).unwrap()
            })
            .collect()
    }

    #[test]
    fn constant_counts_score_zero() {
        let data = rows(&[(1.0, 2), (2.0, 2), (3.0, 2), (4.0, 2)]);
        let loc = Attribute::from_name("loc").unwrap();
        for cut in [1.5, 2.5, 3.5] {
            assert_eq!(cart_split_score(&data, loc, cut).unwrap(), 0.0);
        }
    }

    #[test]
    fn gap_split_is_perfect() {
        let data = rows(&[(1.0, 0), (2.0, 0), (3.0, 0), (4.0, 4), (5.0, 4), (6.0, 4)]);
        let loc = Attribute::from_name("loc").unwrap();
        assert_eq!(cart_split_score(&data, loc, 3.5).unwrap(), 0.0);
        for cut in [1.5, 2.5, 4.5, 5.5] {
            assert!(cart_split_score(&data, loc, cut).unwrap() > 0.0);
        }
        let tree = RegressionTree::fit(&data, &TreeParams::default(), 0);
        assert_eq!(tree.root_split(), Some((loc, 3.5)));
        assert_eq!(tree.leaf_count(), 2);
        assert_eq!(tree.features_used().into_iter().collect::<Vec<_>>(), vec![loc]);
    }

    #[test]
    fn degenerate_cut_is_an_error() {
        let data = rows(&[(1.0, 0), (2.0, 1)]);
        let loc = Attribute::from_name("loc").unwrap();
        assert!(cart_split_score(&data, loc, 10.0).is_err());
        assert!(cart_split_score(&data, loc, 0.0).is_err());
    }

    #[test]
    fn limits_are_respected() {
        let data = rows(&(0..40).map(|i| (i as f64, (i * 7 % 5) as u32)).collect::<Vec<_>>());
        let params = TreeParams {
            max_depth: Some(2),
            ..TreeParams::default()
        };
        assert!(RegressionTree::fit(&data, &params, 0).depth() <= 2);

        let params = TreeParams {
            max_leaf_nodes: Some(5),
            ..TreeParams::default()
        };
        assert_eq!(RegressionTree::fit(&data, &params, 0).leaf_count(), 5);

        let params = TreeParams {
            max_leaf_nodes: Some(1),
            ..TreeParams::default()
        };
        assert_eq!(RegressionTree::fit(&data, &params, 0).leaf_count(), 1);

        let params = TreeParams {
            min_samples_leaf: 8,
            ..TreeParams::default()
        };
        let tree = RegressionTree::fit(&data, &params, 0);
        for n in tree.nodes() {
            if let TreeNode::Leaf { samples, .. } = n {
                assert!(*samples >= 8);
            }
        }
    }

    #[test]
    fn leaf_fraction_counts_labels() {
        let data = rows(&[(1.0, 0), (1.0, 3), (1.0, 0), (1.0, 1), (1.0, 2)]);
        // Constant attribute: no split possible, single leaf with 3/5 defective.
        let tree = RegressionTree::fit(&data, &TreeParams::default(), 0);
        assert_eq!(tree.nodes(), &[TreeNode::Leaf { fraction: 0.6, samples: 5 }]);
    }
}
