//! Single regression trees.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rng;

/// Relative floor a split's gain must clear, as a fraction of the node variance.
const MIN_RELATIVE_GAIN: f64 = 1e-12;

/// Stream index for the bootstrap draw of a tree; node streams use the node id.
pub(crate) const BOOTSTRAP_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Extremely randomized trees: full data, one random cut per candidate feature.
    Extra,
    /// Random forest: bootstrap resample, best midpoint per candidate feature.
    Forest,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Extra => "extra",
            Method::Forest => "forest",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        match s.to_ascii_lowercase().as_str() {
            "extra" | "et" | "extra-trees" => Some(Method::Extra),
            "forest" | "rf" | "random-forest" => Some(Method::Forest),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Internal {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
        n_samples: usize,
        /// Variance reduction of the split, summed over targets.
        gain: f64,
    },
    Leaf {
        n_samples: usize,
        /// Offset of this leaf's target means in [`Tree::leaf_values`].
        value_start: usize,
    },
}

impl TreeNode {
    pub fn n_samples(&self) -> usize {
        match *self {
            TreeNode::Internal { n_samples, .. } | TreeNode::Leaf { n_samples, .. } => n_samples,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, TreeNode::Leaf { .. })
    }
}

/// Nodes are stored depth-first with the root at index 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    n_targets: usize,
    nodes: Vec<TreeNode>,
    leaf_values: Vec<f64>,
}

impl Tree {
    pub(crate) fn from_parts(n_targets: usize, nodes: Vec<TreeNode>, leaf_values: Vec<f64>) -> Result<Tree, String> {
        if nodes.is_empty() || n_targets == 0 {
            return Err("tree without nodes or targets".into());
        }
        for (i, n) in nodes.iter().enumerate() {
            match *n {
                TreeNode::Internal { left, right, threshold, .. } => {
                    if left <= i || right <= i || left >= nodes.len() || right >= nodes.len() || !threshold.is_finite() {
                        return Err(format!("node {i}: bad children or threshold"));
                    }
                }
                TreeNode::Leaf { value_start, .. } => {
                    if value_start + n_targets > leaf_values.len() {
                        return Err(format!("node {i}: leaf values out of range"));
                    }
                }
            }
        }
        Ok(Tree { n_targets, nodes, leaf_values })
    }

    pub fn n_targets(&self) -> usize {
        self.n_targets
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn leaf_values(&self) -> &[f64] {
        &self.leaf_values
    }

    /// Target means stored at a leaf node.
    pub fn leaf(&self, node: usize) -> Option<&[f64]> {
        match self.nodes[node] {
            TreeNode::Leaf { value_start, .. } => Some(&self.leaf_values[value_start..value_start + self.n_targets]),
            TreeNode::Internal { .. } => None,
        }
    }

    /// Index of the leaf `x` is routed to (`x_f ≤ threshold` goes left).
    pub fn route(&self, x: &[f64]) -> usize {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                TreeNode::Internal { feature, threshold, left, right, .. } => {
                    i = if x[feature] <= threshold { left } else { right };
                }
                TreeNode::Leaf { .. } => return i,
            }
        }
    }

    pub fn predict(&self, x: &[f64]) -> &[f64] {
        self.leaf(self.route(x)).expect("route ends at a leaf")
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_leaf()).count()
    }

    pub fn depth(&self) -> usize {
        let mut depth = vec![0usize; self.nodes.len()];
        let mut max = 0;
        for (i, n) in self.nodes.iter().enumerate() {
            max = max.max(depth[i]);
            if let TreeNode::Internal { left, right, .. } = *n {
                depth[left] = depth[i] + 1;
                depth[right] = depth[i] + 1;
            }
        }
        max
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowParams {
    pub min_split_samples: usize,
    pub method: Method,
    pub k_features: usize,
}

/// Column-major training view: `x[f][row]`, `y[t][row]`.
pub(crate) struct TrainView<'a> {
    pub x: &'a [Vec<f64>],
    pub y: Vec<&'a [f64]>,
}

/// Gains within this relative band of the incumbent count as ties, which go
/// to the earlier candidate regardless of summation rounding.
const TIE_TOL: f64 = 1e-12;

#[inline]
fn beats(gain: f64, incumbent: f64) -> bool {
    gain > incumbent + TIE_TOL * incumbent.abs()
}

struct Candidate {
    gain: f64,
    feature: usize,
    threshold: f64,
}

struct Grower<'a> {
    data: &'a TrainView<'a>,
    params: GrowParams,
    seed: u64,
    nodes: Vec<TreeNode>,
    leaf_values: Vec<f64>,
    features: Vec<usize>,
    sorted: Vec<(f64, usize)>,
    mean: Vec<f64>,
    acc: Vec<f64>,
}

impl Grower<'_> {
    fn leaf(&mut self, id: usize, n: usize) {
        let value_start = self.leaf_values.len();
        self.leaf_values.extend_from_slice(&self.mean);
        self.nodes[id] = TreeNode::Leaf { n_samples: n, value_start };
    }

    /// Fills `self.mean` and returns the summed target variance, or `None`
    /// when every target is constant on the node.
    fn node_moments(&mut self, rows: &[usize]) -> Option<f64> {
        let n = rows.len() as f64;
        let mut total_var = 0.0;
        let mut constant = true;
        for (t, y) in self.data.y.iter().enumerate() {
            let first = y[rows[0]];
            let mut sum = 0.0;
            let mut same = true;
            for &r in rows {
                sum += y[r];
                same &= y[r] == first;
            }
            constant &= same;
            let m = if same { first } else { sum / n };
            self.mean[t] = m;
            total_var += rows.iter().map(|&r| (y[r] - m) * (y[r] - m)).sum::<f64>() / n;
        }
        (!constant).then_some(total_var)
    }

    fn cut_gain(&mut self, rows: &[usize], col: &[f64], cut: f64) -> f64 {
        self.acc.iter_mut().for_each(|a| *a = 0.0);
        let mut n_left = 0usize;
        for &r in rows {
            if col[r] <= cut {
                n_left += 1;
                for (t, y) in self.data.y.iter().enumerate() {
                    self.acc[t] += y[r] - self.mean[t];
                }
            }
        }
        let n_right = rows.len() - n_left;
        if n_left == 0 || n_right == 0 {
            return 0.0;
        }
        let denom = n_left as f64 * n_right as f64;
        self.acc.iter().map(|s| s * s / denom).sum()
    }

    fn best_midpoint(&mut self, rows: &[usize], col: &[f64]) -> Option<(f64, f64)> {
        self.sorted.clear();
        self.sorted.extend(rows.iter().map(|&r| (col[r], r)));
        self.sorted.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        let n = self.sorted.len();
        if self.sorted[0].0 == self.sorted[n - 1].0 {
            return None;
        }
        self.acc.iter_mut().for_each(|a| *a = 0.0);
        let mut best: Option<(f64, f64)> = None;
        for i in 0..n - 1 {
            let (xi, r) = self.sorted[i];
            for (t, y) in self.data.y.iter().enumerate() {
                self.acc[t] += y[r] - self.mean[t];
            }
            let xn = self.sorted[i + 1].0;
            if xi < xn {
                let n_left = (i + 1) as f64;
                let denom = n_left * (n as f64 - n_left);
                let gain: f64 = self.acc.iter().map(|s| s * s / denom).sum();
                if best.is_none_or(|(g, _)| beats(gain, g)) {
                    let mid = xi + (xn - xi) / 2.0;
                    best = Some((gain, if mid < xn { mid } else { xi }));
                }
            }
        }
        best
    }

    fn find_split(&mut self, id: usize, rows: &[usize]) -> Option<Candidate> {
        let mut rng = rng::stream(self.seed, &[id as u64]);
        let p = self.features.len();
        self.features.iter_mut().enumerate().for_each(|(i, f)| *f = i);
        let mut best: Option<Candidate> = None;
        let mut evaluated = 0;
        let mut i = 0;
        while evaluated < self.params.k_features && i < p {
            let j = rng.random_range(i..p);
            self.features.swap(i, j);
            let f = self.features[i];
            i += 1;
            let col = &self.data.x[f];
            let found = match self.params.method {
                Method::Extra => {
                    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                    for &r in rows {
                        lo = lo.min(col[r]);
                        hi = hi.max(col[r]);
                    }
                    if !(hi > lo) {
                        None
                    } else {
                        let u: f64 = rng.random();
                        let mut cut = lo + (hi - lo) * u;
                        if cut >= hi {
                            cut = lo;
                        }
                        Some((self.cut_gain(rows, col, cut), cut))
                    }
                }
                Method::Forest => self.best_midpoint(rows, col),
            };
            let Some((gain, threshold)) = found else { continue };
            evaluated += 1;
            if best.as_ref().is_none_or(|b| beats(gain, b.gain)) {
                best = Some(Candidate { gain, feature: f, threshold });
            }
        }
        best
    }

    fn grow(mut self, mut rows: Vec<usize>) -> Tree {
        self.nodes.push(TreeNode::Leaf { n_samples: 0, value_start: 0 });
        let mut stack = vec![(0usize, 0usize, rows.len())];
        while let Some((id, start, end)) = stack.pop() {
            let n = end - start;
            let node_rows = &rows[start..end];
            let total_var = self.node_moments(node_rows);
            let split = match total_var {
                Some(var) if n >= self.params.min_split_samples => self
                    .find_split(id, node_rows)
                    .filter(|c| c.gain > 0.0 && c.gain > MIN_RELATIVE_GAIN * var),
                _ => None,
            };
            let Some(c) = split else {
                self.leaf(id, n);
                continue;
            };
            let col = &self.data.x[c.feature];
            let mut mid = start;
            for k in start..end {
                if col[rows[k]] <= c.threshold {
                    rows.swap(mid, k);
                    mid += 1;
                }
            }
            let left = self.nodes.len();
            let right = left + 1;
            self.nodes.push(TreeNode::Leaf { n_samples: 0, value_start: 0 });
            self.nodes.push(TreeNode::Leaf { n_samples: 0, value_start: 0 });
            self.nodes[id] = TreeNode::Internal {
                feature: c.feature,
                threshold: c.threshold,
                left,
                right,
                n_samples: n,
                gain: c.gain,
            };
            stack.push((right, mid, end));
            stack.push((left, start, mid));
        }
        Tree { n_targets: self.mean.len(), nodes: self.nodes, leaf_values: self.leaf_values }
    }
}

/// Grows one tree on `rows` (which may repeat for bootstrap samples).
/// Node `i` draws from the stream `(seed, i)`.
pub(crate) fn grow_tree(data: &TrainView<'_>, rows: Vec<usize>, params: GrowParams, seed: u64) -> Tree {
    assert!(!rows.is_empty(), "tree needs at least one row");
    let t = data.y.len();
    Grower {
        data,
        params,
        seed,
        nodes: Vec::new(),
        leaf_values: Vec::new(),
        features: (0..data.x.len()).collect(),
        sorted: Vec::new(),
        mean: vec![0.0; t],
        acc: vec![0.0; t],
    }
    .grow(rows)
}

/// `n` draws with replacement from `0..n`.
pub(crate) fn bootstrap_rows(n: usize, tree_seed: u64) -> Vec<usize> {
    let mut rng = rng::stream(tree_seed, &[BOOTSTRAP_STREAM]);
    (0..n).map(|_| rng.random_range(0..n)).collect()
}
