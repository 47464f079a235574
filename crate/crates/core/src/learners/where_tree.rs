//! WHERE: a clustering tree followed by a decision tree over its clusters.
//!
//! The clustering tree recursively projects a node's rows onto the line
//! between two far-apart pivot rows (East, West) and halves the rows at the
//! median projection. Its leaves are clusters. The decision tree then learns
//! to predict cluster membership from the top-ranked attributes, and a new
//! instance scores the defective fraction of the cluster it is routed to.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::tree::{cut_between, TIE_EPSILON};
use super::{fraction_of, Config};
use crate::dataset::{Attribute, Instance, NUM_ATTRIBUTES};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WhereParams {
    pub threshold: f64,
    pub info_prune: f64,
    pub min_sample_split: usize,
    pub min_size: f64,
    pub wriggle: f64,
    pub depth_min: usize,
    pub depth_max: usize,
    pub where_prune: bool,
    pub tree_prune: bool,
}

impl Default for WhereParams {
    fn default() -> Self {
        WhereParams {
            threshold: 0.5,
            info_prune: 0.33,
            min_sample_split: 4,
            min_size: 0.5,
            wriggle: 0.2,
            depth_min: 2,
            depth_max: 10,
            where_prune: false,
            tree_prune: true,
        }
    }
}

impl WhereParams {
    pub fn from_config(config: &Config) -> Result<Self> {
        let int = |name| -> Result<usize> { Ok(config.int(name)?.unwrap_or(0).max(0) as usize) };
        Ok(WhereParams {
            threshold: config.real("threshold")?,
            info_prune: config.real("infoPrune")?,
            min_sample_split: int("min_sample_split")?,
            min_size: config.real("min_Size")?,
            wriggle: config.real("wriggle")?,
            depth_min: int("depthMin")?,
            depth_max: int("depthMax")?,
            where_prune: config.flag("wherePrune")?,
            tree_prune: config.flag("treePrune")?,
        })
    }

    /// Largest cluster size that is not split further: `⌈n^min_size⌉`.
    pub fn min_leaf(&self, n: usize) -> usize {
        ((n as f64).powf(self.min_size) - 1e-9).ceil().max(1.0) as usize
    }

    /// Number of attributes the decision tree may use.
    pub fn eligible_attributes(&self) -> usize {
        fraction_of(self.info_prune, NUM_ATTRIBUTES)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ClusterNode {
    Leaf {
        cluster: usize,
        depth: usize,
    },
    Split {
        left: usize,
        right: usize,
        depth: usize,
        east: usize,
        west: usize,
    },
}

/// The clustering tree; `clusters()[k]` lists the row indices of cluster `k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterTree {
    nodes: Vec<ClusterNode>,
    clusters: Vec<Vec<usize>>,
    min_leaf: usize,
}

impl ClusterTree {
    pub fn nodes(&self) -> &[ClusterNode] {
        &self.nodes
    }

    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    pub fn min_leaf(&self) -> usize {
        self.min_leaf
    }

    /// Cluster id of every row.
    pub fn assignments(&self) -> Vec<usize> {
        let n = self.clusters.iter().map(Vec::len).sum();
        let mut out = vec![0; n];
        for (k, rows) in self.clusters.iter().enumerate() {
            for &r in rows {
                out[r] = k;
            }
        }
        out
    }
}

struct Bounds {
    lo: [f64; NUM_ATTRIBUTES],
    span: [f64; NUM_ATTRIBUTES],
}

impl Bounds {
    fn of(data: &[Instance], rows: &[usize]) -> Self {
        let mut lo = [f64::INFINITY; NUM_ATTRIBUTES];
        let mut hi = [f64::NEG_INFINITY; NUM_ATTRIBUTES];
        for &r in rows {
            for (j, &v) in data[r].metrics().iter().enumerate() {
                lo[j] = lo[j].min(v);
                hi[j] = hi[j].max(v);
            }
        }
        let mut span = [0.0; NUM_ATTRIBUTES];
        for j in 0..NUM_ATTRIBUTES {
            span[j] = hi[j] - lo[j];
        }
        Bounds { lo, span }
    }

    /// Euclidean distance over min-max normalised metrics; constant
    /// attributes contribute nothing.
    fn distance(&self, a: &Instance, b: &Instance) -> f64 {
        let mut sum = 0.0;
        for j in 0..NUM_ATTRIBUTES {
            if self.span[j] > 0.0 {
                let x = (a.metrics()[j] - self.lo[j]) / self.span[j];
                let y = (b.metrics()[j] - self.lo[j]) / self.span[j];
                sum += (x - y) * (x - y);
            }
        }
        sum.sqrt()
    }
}

fn defect_rate(data: &[Instance], rows: &[usize]) -> f64 {
    if rows.is_empty() {
        return 0.0;
    }
    rows.iter().filter(|&&r| data[r].is_defective()).count() as f64 / rows.len() as f64
}

fn farthest(bounds: &Bounds, data: &[Instance], rows: &[usize], from: usize) -> usize {
    let mut best = (rows[0], f64::NEG_INFINITY);
    for &r in rows {
        let d = bounds.distance(&data[from], &data[r]);
        if d > best.1 {
            best = (r, d);
        }
    }
    best.0
}

struct ClusterBuilder<'a> {
    data: &'a [Instance],
    params: &'a WhereParams,
    min_leaf: usize,
    rng: ChaCha8Rng,
    nodes: Vec<ClusterNode>,
    clusters: Vec<Vec<usize>>,
}

impl ClusterBuilder<'_> {
    fn leaf(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let cluster = self.clusters.len();
        self.clusters.push(rows);
        self.nodes.push(ClusterNode::Leaf { cluster, depth });
        self.nodes.len() - 1
    }

    fn grow(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        if rows.len() <= self.min_leaf || rows.len() < 2 || depth >= self.params.depth_max {
            return self.leaf(rows, depth);
        }
        let bounds = Bounds::of(self.data, &rows);
        let start = rows[self.rng.gen_range(0..rows.len())];
        let east = farthest(&bounds, self.data, &rows, start);
        let west = farthest(&bounds, self.data, &rows, east);
        let c = bounds.distance(&self.data[east], &self.data[west]);
        if c <= 0.0 {
            return self.leaf(rows, depth);
        }

        // Cosine-rule position along the East-West line.
        let mut projected: Vec<(f64, usize)> = rows
            .iter()
            .map(|&r| {
                let a = bounds.distance(&self.data[r], &self.data[east]);
                let b = bounds.distance(&self.data[r], &self.data[west]);
                ((a * a + c * c - b * b) / (2.0 * c), r)
            })
            .collect();
        projected.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        let half = projected.len() / 2;
        let left: Vec<usize> = projected[..half].iter().map(|p| p.1).collect();
        let right: Vec<usize> = projected[half..].iter().map(|p| p.1).collect();

        if self.params.where_prune && depth >= self.params.depth_min {
            let gap = (defect_rate(self.data, &left) - defect_rate(self.data, &right)).abs();
            if gap <= self.params.wriggle {
                return self.leaf(rows, depth);
            }
        }

        let idx = self.nodes.len();
        self.nodes.push(ClusterNode::Leaf { cluster: 0, depth });
        let l = self.grow(left, depth + 1);
        let r = self.grow(right, depth + 1);
        self.nodes[idx] = ClusterNode::Split {
            left: l,
            right: r,
            depth,
            east,
            west,
        };
        idx
    }
}

/// Builds the clustering tree.
///
/// Growth stops at nodes of at most `⌈n^min_size⌉` rows, at `depth_max`, or
/// when all rows coincide. With `where_prune`, a node at or below
/// `depth_min` stays a leaf unless its two halves' defect rates differ by
/// more than `wriggle`.
pub fn where_cluster_tree(data: &[Instance], params: &WhereParams, seed: u64) -> ClusterTree {
    let min_leaf = params.min_leaf(data.len());
    let mut b = ClusterBuilder {
        data,
        params,
        min_leaf,
        rng: ChaCha8Rng::seed_from_u64(seed),
        nodes: Vec::new(),
        clusters: Vec::new(),
    };
    b.grow((0..data.len()).collect(), 0);
    ClusterTree {
        nodes: b.nodes,
        clusters: b.clusters,
        min_leaf,
    }
}

fn plogp(c: usize) -> f64 {
    if c == 0 {
        0.0
    } else {
        let c = c as f64;
        c * c.log2()
    }
}

fn entropy_of(counts: &[usize], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    ((n as f64).log2() * n as f64 - counts.iter().map(|&c| plogp(c)).sum::<f64>()) / n as f64
}

#[derive(Debug, Clone, Copy)]
struct EntropyCut {
    gain: f64,
    cut: f64,
    left_len: usize,
}

/// Best binary cut of `rows` on `attr` by class-entropy reduction.
fn best_entropy_cut(
    data: &[Instance],
    labels: &[usize],
    classes: usize,
    rows: &mut [usize],
    attr: Attribute,
) -> Option<EntropyCut> {
    let n = rows.len();
    if n < 2 {
        return None;
    }
    rows.sort_by(|&a, &b| data[a].metric(attr).total_cmp(&data[b].metric(attr)).then(a.cmp(&b)));
    let mut right = vec![0usize; classes];
    for &r in rows.iter() {
        right[labels[r]] += 1;
    }
    let parent = entropy_of(&right, n);
    let mut left = vec![0usize; classes];
    let mut s_left = 0.0;
    let mut s_right: f64 = right.iter().map(|&c| plogp(c)).sum();
    let mut best: Option<EntropyCut> = None;
    for i in 1..n {
        let k = labels[rows[i - 1]];
        s_left += plogp(left[k] + 1) - plogp(left[k]);
        s_right += plogp(right[k] - 1) - plogp(right[k]);
        left[k] += 1;
        right[k] -= 1;
        let (lo, hi) = (data[rows[i - 1]].metric(attr), data[rows[i]].metric(attr));
        if lo == hi {
            continue;
        }
        let (nl, nr) = (i as f64, (n - i) as f64);
        let weighted = (nl * nl.log2() - s_left + nr * nr.log2() - s_right) / n as f64;
        let gain = parent - weighted;
        if best.is_none_or(|b| gain > b.gain + TIE_EPSILON) {
            best = Some(EntropyCut {
                gain,
                cut: cut_between(lo, hi),
                left_len: i,
            });
        }
    }
    best
}

/// Ranks every attribute by the information gain of its best binary
/// entropy cut against the class labels; highest gain first, ties in
/// attribute order. Attributes with no usable cut score 0.
pub fn info_gain_ranking(data: &[Instance], labels: &[usize]) -> Vec<(Attribute, f64)> {
    let classes = labels.iter().max().map_or(1, |m| m + 1);
    let mut rows: Vec<usize> = (0..data.len()).collect();
    let mut ranked: Vec<(Attribute, f64)> = Attribute::all()
        .map(|a| {
            let gain = best_entropy_cut(data, labels, classes, &mut rows, a)
                .map_or(0.0, |c| c.gain.max(0.0));
            (a, gain)
        })
        .collect();
    ranked.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));
    ranked
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum DecisionNode {
    Leaf {
        cluster: usize,
        samples: usize,
    },
    Split {
        attribute: Attribute,
        cut: f64,
        left: usize,
        right: usize,
        majority: usize,
        samples: usize,
    },
}

impl DecisionNode {
    pub fn majority(&self) -> usize {
        match *self {
            DecisionNode::Leaf { cluster, .. } => cluster,
            DecisionNode::Split { majority, .. } => majority,
        }
    }
}

/// Decision tree predicting cluster ids; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    eligible: Vec<Attribute>,
    nodes: Vec<DecisionNode>,
}

impl DecisionTree {
    pub fn nodes(&self) -> &[DecisionNode] {
        &self.nodes
    }

    /// Attributes the tree was allowed to split on.
    pub fn eligible(&self) -> &[Attribute] {
        &self.eligible
    }

    pub fn classify(&self, instance: &Instance) -> usize {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                DecisionNode::Leaf { cluster, .. } => return cluster,
                DecisionNode::Split {
                    attribute,
                    cut,
                    left,
                    right,
                    ..
                } => i = if instance.metric(attribute) <= cut { left } else { right },
            }
        }
    }

    pub fn features_used(&self) -> BTreeSet<Attribute> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                DecisionNode::Split { attribute, .. } => Some(*attribute),
                DecisionNode::Leaf { .. } => None,
            })
            .collect()
    }

    /// Children of `i`, if it is a split.
    pub fn children(&self, i: usize) -> Option<(usize, usize)> {
        match self.nodes[i] {
            DecisionNode::Split { left, right, .. } => Some((left, right)),
            DecisionNode::Leaf { .. } => None,
        }
    }
}

fn majority_of(labels: &[usize], rows: &[usize], classes: usize) -> (usize, bool) {
    let mut counts = vec![0usize; classes];
    for &r in rows {
        counts[labels[r]] += 1;
    }
    let mut best = 0;
    for k in 1..classes {
        if counts[k] > counts[best] {
            best = k;
        }
    }
    let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
    (best, pure)
}

struct DecisionBuilder<'a> {
    data: &'a [Instance],
    labels: &'a [usize],
    classes: usize,
    eligible: &'a [Attribute],
    min_sample_split: usize,
    nodes: Vec<DecisionNode>,
}

impl DecisionBuilder<'_> {
    fn build(&mut self, rows: Vec<usize>) -> usize {
        let (majority, pure) = majority_of(self.labels, &rows, self.classes);
        let leaf = DecisionNode::Leaf {
            cluster: majority,
            samples: rows.len(),
        };
        if pure || rows.len() <= self.min_sample_split {
            self.nodes.push(leaf);
            return self.nodes.len() - 1;
        }
        let mut best: Option<(Attribute, EntropyCut)> = None;
        let mut scratch = rows.clone();
        for &attr in self.eligible {
            if let Some(c) = best_entropy_cut(self.data, self.labels, self.classes, &mut scratch, attr)
            {
                if best.is_none_or(|(_, b)| c.gain > b.gain + TIE_EPSILON) {
                    best = Some((attr, c));
                }
            }
        }
        let Some((attribute, cut)) = best.filter(|(_, c)| c.gain > TIE_EPSILON) else {
            self.nodes.push(leaf);
            return self.nodes.len() - 1;
        };
        let mut sorted = rows;
        sorted.sort_by(|&a, &b| {
            self.data[a]
                .metric(attribute)
                .total_cmp(&self.data[b].metric(attribute))
                .then(a.cmp(&b))
        });
        let right_rows = sorted.split_off(cut.left_len);
        let samples = sorted.len() + right_rows.len();
        let idx = self.nodes.len();
        self.nodes.push(leaf);
        let left = self.build(sorted);
        let right = self.build(right_rows);
        self.nodes[idx] = DecisionNode::Split {
            attribute,
            cut: cut.cut,
            left,
            right,
            majority,
            samples,
        };
        idx
    }
}

/// Collapses every split child whose majority cluster equals its parent's,
/// bottom-up, then compacts the arena.
fn prune_same_majority(nodes: &mut [DecisionNode], i: usize) {
    if let DecisionNode::Split {
        left,
        right,
        majority,
        ..
    } = nodes[i]
    {
        prune_same_majority(nodes, left);
        prune_same_majority(nodes, right);
        for child in [left, right] {
            if let DecisionNode::Split {
                majority: m,
                samples,
                ..
            } = nodes[child]
            {
                if m == majority {
                    nodes[child] = DecisionNode::Leaf {
                        cluster: m,
                        samples,
                    };
                }
            }
        }
    }
}

fn compact(nodes: &[DecisionNode]) -> Vec<DecisionNode> {
    fn copy(src: &[DecisionNode], i: usize, out: &mut Vec<DecisionNode>) -> usize {
        let idx = out.len();
        out.push(src[i].clone());
        if let DecisionNode::Split { left, right, .. } = src[i] {
            let l = copy(src, left, out);
            let r = copy(src, right, out);
            if let DecisionNode::Split { left, right, .. } = &mut out[idx] {
                *left = l;
                *right = r;
            }
        }
        idx
    }
    let mut out = Vec::with_capacity(nodes.len());
    copy(nodes, 0, &mut out);
    out
}

/// Learns to predict each row's cluster id from the top
/// `⌈info_prune × 20⌉` attributes by information gain.
///
/// A node is split only when it holds more than `min_sample_split` rows and
/// some cut reduces class entropy. With `tree_prune`, subtrees that predict
/// the same majority cluster as their parent are collapsed.
pub fn where_decision_tree(
    clusters: &[usize],
    data: &[Instance],
    params: &WhereParams,
) -> DecisionTree {
    let ranking = info_gain_ranking(data, clusters);
    let eligible: Vec<Attribute> = ranking
        .iter()
        .take(params.eligible_attributes())
        .map(|(a, _)| *a)
        .collect();
    let classes = clusters.iter().max().map_or(1, |m| m + 1);
    let mut b = DecisionBuilder {
        data,
        labels: clusters,
        classes,
        eligible: &eligible,
        min_sample_split: params.min_sample_split,
        nodes: Vec::new(),
    };
    b.build((0..data.len()).collect());
    let mut nodes = b.nodes;
    if params.tree_prune {
        prune_same_majority(&mut nodes, 0);
        nodes = compact(&nodes);
    }
    DecisionTree { eligible, nodes }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterSummary {
    pub size: usize,
    pub defect_fraction: f64,
}

/// A fitted WHERE model: the decision tree plus each cluster's defect rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhereModel {
    pub clusters: Vec<ClusterSummary>,
    pub tree: DecisionTree,
}

impl WhereModel {
    pub fn fit(data: &[Instance], params: &WhereParams, seed: u64) -> Self {
        let cluster_tree = where_cluster_tree(data, params, seed);
        let assignments = cluster_tree.assignments();
        let tree = where_decision_tree(&assignments, data, params);
        let clusters = cluster_tree
            .clusters()
            .iter()
            .map(|rows| ClusterSummary {
                size: rows.len(),
                defect_fraction: defect_rate(data, rows),
            })
            .collect();
        WhereModel { clusters, tree }
    }

    pub fn predict(&self, instance: &Instance) -> f64 {
        self.clusters
            .get(self.tree.classify(instance))
            .map_or(0.0, |c| c.defect_fraction)
    }

    pub fn features_used(&self) -> BTreeSet<Attribute> {
        self.tree.features_used()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_rows(n: usize, seed: u64) -> Vec<Instance> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let mut m = [0.0; NUM_ATTRIBUTES];
                for v in m.iter_mut() {
                    *v = rng.gen_range(0.0..100.0);
                }
                let bug = if m[12] > 60.0 { rng.gen_range(0..4) } else { 0 };
                Instance::new(m, bug).unwrap()
            })
            .collect()
    }

    #[test]
    fn min_leaf_from_size() {
        let p = WhereParams::default();
        assert_eq!(p.min_leaf(100), 10);
        let p = WhereParams {
            min_size: 0.01,
            ..p
        };
        assert_eq!(p.min_leaf(100), 2);
    }

    #[test]
    fn eligible_counts() {
        let p = WhereParams {
            info_prune: 0.01,
            ..WhereParams::default()
        };
        assert_eq!(p.eligible_attributes(), 1);
        assert_eq!(WhereParams::default().eligible_attributes(), 7);
    }

    #[test]
    fn identical_points_form_one_cluster() {
        let row = Instance::new([3.0; NUM_ATTRIBUTES], 1).unwrap();
        let data = vec![row.clone(), row];
        let t = where_cluster_tree(&data, &WhereParams::default(), 0);
        assert_eq!(t.clusters().len(), 1);

        let many = vec![Instance::new([1.0; NUM_ATTRIBUTES], 0).unwrap(); 10];
        let p = WhereParams {
            min_size: 0.01,
            ..WhereParams::default()
        };
        assert_eq!(where_cluster_tree(&many, &p, 0).clusters().len(), 1);
    }

    #[test]
    fn leaves_partition_and_halves_balance() {
        for seed in 0..5 {
            let data = random_rows(137, seed);
            let p = WhereParams {
                min_size: 0.3,
                ..WhereParams::default()
            };
            let t = where_cluster_tree(&data, &p, seed);
            let mut all: Vec<usize> = t.clusters().iter().flatten().copied().collect();
            all.sort_unstable();
            assert_eq!(all, (0..137).collect::<Vec<_>>());
            assert!(t.clusters().len() > 1);
            // Sizes of sibling subtrees differ by at most one.
            fn size(t: &ClusterTree, i: usize) -> usize {
                match t.nodes()[i] {
                    ClusterNode::Leaf { cluster, .. } => t.clusters()[cluster].len(),
                    ClusterNode::Split { left, right, .. } => size(t, left) + size(t, right),
                }
            }
            for n in t.nodes() {
                if let ClusterNode::Split { left, right, .. } = *n {
                    assert!(size(&t, left).abs_diff(size(&t, right)) <= 1);
                }
            }
        }
    }

    #[test]
    fn depth_max_caps_the_cluster_tree() {
        let data = random_rows(200, 4);
        let p = WhereParams {
            min_size: 0.01,
            depth_max: 3,
            ..WhereParams::default()
        };
        let t = where_cluster_tree(&data, &p, 4);
        assert!(t.clusters().len() <= 8);
        for n in t.nodes() {
            if let ClusterNode::Leaf { depth, .. } = n {
                assert!(*depth <= 3);
            }
        }
    }

    #[test]
    fn constant_attribute_ranks_last() {
        let mut data = random_rows(80, 1);
        for inst in &mut data {
            let mut m = *inst.metrics();
            m[0] = 5.0;
            *inst = Instance::new(m, inst.defect_count()).unwrap();
        }
        let labels: Vec<usize> = data.iter().map(|i| (i.metrics()[12] > 50.0) as usize).collect();
        let ranking = info_gain_ranking(&data, &labels);
        assert_eq!(ranking.last().unwrap(), &(Attribute::new(0).unwrap(), 0.0));
        assert_eq!(ranking[0].0.name(), "loc");
    }

    #[test]
    fn single_cluster_gives_single_leaf() {
        let data = random_rows(30, 2);
        let tree = where_decision_tree(&vec![0; 30], &data, &WhereParams::default());
        assert_eq!(tree.nodes().len(), 1);
        assert!(tree.features_used().is_empty());
    }

    #[test]
    fn tree_prune_leaves_no_same_majority_child() {
        for seed in 0..6 {
            let data = random_rows(160, seed);
            let p = WhereParams {
                min_size: 0.25,
                min_sample_split: 1,
                info_prune: 1.0,
                ..WhereParams::default()
            };
            let clusters = where_cluster_tree(&data, &p, seed).assignments();
            let tree = where_decision_tree(&clusters, &data, &p);
            for i in 0..tree.nodes().len() {
                if let Some((l, r)) = tree.children(i) {
                    for c in [l, r] {
                        if tree.children(c).is_some() {
                            assert_ne!(tree.nodes()[c].majority(), tree.nodes()[i].majority());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn features_bounded_by_info_prune() {
        let data = random_rows(200, 3);
        for ip in [0.01, 0.1, 0.33, 0.7] {
            let p = WhereParams {
                info_prune: ip,
                min_size: 0.2,
                min_sample_split: 1,
                ..WhereParams::default()
            };
            let m = WhereModel::fit(&data, &p, 3);
            assert!(m.features_used().len() <= p.eligible_attributes());
            assert!(m.features_used().iter().all(|a| m.tree.eligible().contains(a)));
        }
    }
}
