//! Bagged CART ensembles for regression and classification.
//!
//! Each tree is grown on a bootstrap sample with `mtry` candidate features per
//! split. Regression splits maximize the reduction in squared error,
//! classification splits the decrease in Gini impurity. Every tree draws from
//! its own generator derived from the forest seed and the tree index, so a
//! forest is identical whether its trees are grown serially or in parallel.

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng;
use crate::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForestKind {
    Regression,
    Classification,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForestParams {
    pub n_trees: usize,
    /// Candidate features per split; `None` means `floor(sqrt(q))`, at least 1.
    pub mtry: Option<usize>,
    /// Nodes with at most this many rows are not split; `None` means 5 for
    /// regression and 1 for classification.
    pub min_node_size: Option<usize>,
    pub max_depth: Option<usize>,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            mtry: None,
            min_node_size: None,
            max_depth: None,
            seed: 0,
        }
    }
}

impl ForestParams {
    pub fn resolved_mtry(&self, q: usize) -> usize {
        self.mtry
            .unwrap_or_else(|| ((q as f64).sqrt().floor() as usize).max(1))
    }

    pub fn resolved_min_node_size(&self, kind: ForestKind) -> usize {
        self.min_node_size.unwrap_or(match kind {
            ForestKind::Regression => 5,
            ForestKind::Classification => 1,
        })
    }
}

/// Training response, or a vector of predictions.
#[derive(Debug, Clone, PartialEq)]
pub enum Response {
    Regression(Vec<f64>),
    Classification { labels: Vec<u32>, n_classes: usize },
}

impl Response {
    pub fn len(&self) -> usize {
        match self {
            Response::Regression(y) => y.len(),
            Response::Classification { labels, .. } => labels.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> ForestKind {
        match self {
            Response::Regression(_) => ForestKind::Regression,
            Response::Classification { .. } => ForestKind::Classification,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Leaf {
    Mean(f64),
    /// Class counts of the bootstrap rows that reached the leaf.
    Counts(Vec<u32>),
}

impl Leaf {
    pub fn class(&self) -> Option<u32> {
        match self {
            Leaf::Counts(counts) => Some(argmax_lowest(counts)),
            Leaf::Mean(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf(Leaf),
}

/// Binary tree stored as a node arena rooted at index 0. Rows with
/// `x[feature] <= threshold` go left.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    nodes: Vec<Node>,
    kind: ForestKind,
}

impl DecisionTree {
    pub fn from_nodes(nodes: Vec<Node>, kind: ForestKind) -> Result<Self> {
        let tree = DecisionTree { nodes, kind };
        tree.validate()?;
        Ok(tree)
    }

    fn validate(&self) -> Result<()> {
        if self.nodes.is_empty() {
            return Err(Error::invalid("a tree needs at least one node"));
        }
        for node in &self.nodes {
            match node {
                Node::Split { left, right, .. } => {
                    if *left >= self.nodes.len() || *right >= self.nodes.len() {
                        return Err(Error::invalid("split references a missing child"));
                    }
                }
                Node::Leaf(Leaf::Mean(v)) if !v.is_finite() => {
                    return Err(Error::invalid("non-finite leaf value"));
                }
                Node::Leaf(Leaf::Mean(_)) if self.kind != ForestKind::Regression => {
                    return Err(Error::invalid("mean leaf in a classification tree"));
                }
                Node::Leaf(Leaf::Counts(_)) if self.kind != ForestKind::Classification => {
                    return Err(Error::invalid("count leaf in a regression tree"));
                }
                Node::Leaf(_) => {}
            }
        }
        Ok(())
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn kind(&self) -> ForestKind {
        self.kind
    }

    pub fn leaf_for(&self, x: &Matrix, row: usize) -> &Leaf {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf(leaf) => return leaf,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if x[(row, *feature)] <= *threshold {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf(_) => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, *left).max(go(nodes, *right)),
            }
        }
        go(&self.nodes, 0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForestModel {
    trees: Vec<DecisionTree>,
    kind: ForestKind,
    /// Sorted out-of-bag rows of each tree.
    oob_indices: Vec<Vec<usize>>,
    feature_count: usize,
    n_classes: usize,
}

impl ForestModel {
    /// Assemble a model from existing trees. `oob_indices` may be empty.
    pub fn from_trees(
        trees: Vec<DecisionTree>,
        feature_count: usize,
        n_classes: usize,
        oob_indices: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let kind = trees
            .first()
            .map(DecisionTree::kind)
            .ok_or_else(|| Error::invalid("a forest needs at least one tree"))?;
        if trees.iter().any(|t| t.kind != kind) {
            return Err(Error::invalid("trees disagree on their kind"));
        }
        let oob_indices = if oob_indices.is_empty() {
            vec![Vec::new(); trees.len()]
        } else {
            oob_indices
        };
        if oob_indices.len() != trees.len() {
            return Err(Error::mismatch(trees.len(), oob_indices.len()));
        }
        Ok(ForestModel {
            trees,
            kind,
            oob_indices,
            feature_count,
            n_classes,
        })
    }

    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }

    pub fn kind(&self) -> ForestKind {
        self.kind
    }

    pub fn feature_count(&self) -> usize {
        self.feature_count
    }

    pub fn oob_indices(&self) -> &[Vec<usize>] {
        &self.oob_indices
    }
}

fn argmax_lowest(counts: &[u32]) -> u32 {
    let mut best = 0;
    for (k, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = k;
        }
    }
    best as u32
}

struct Grower<'a> {
    x: &'a Matrix,
    response: &'a Response,
    mtry: usize,
    min_node_size: usize,
    max_depth: Option<usize>,
    n_classes: usize,
}

struct Split {
    feature: usize,
    threshold: f64,
    gain: f64,
}

impl Grower<'_> {
    fn leaf(&self, rows: &[usize]) -> Leaf {
        match self.response {
            Response::Regression(y) => {
                let sum: f64 = rows.iter().map(|&r| y[r]).sum();
                Leaf::Mean(sum / rows.len() as f64)
            }
            Response::Classification { labels, .. } => {
                let mut counts = vec![0u32; self.n_classes];
                for &r in rows {
                    counts[labels[r] as usize] += 1;
                }
                Leaf::Counts(counts)
            }
        }
    }

    fn is_pure(&self, rows: &[usize]) -> bool {
        match self.response {
            Response::Regression(y) => rows.iter().all(|&r| y[r] == y[rows[0]]),
            Response::Classification { labels, .. } => {
                rows.iter().all(|&r| labels[r] == labels[rows[0]])
            }
        }
    }

    fn grow<R: Rng>(&self, rows: Vec<usize>, rng: &mut R) -> DecisionTree {
        let mut nodes: Vec<Node> = Vec::new();
        // (slot to fill, rows, depth)
        let mut stack = vec![(0usize, rows, 0usize)];
        nodes.push(Node::Leaf(Leaf::Mean(0.0)));
        while let Some((slot, rows, depth)) = stack.pop() {
            let stop = rows.len() <= self.min_node_size
                || rows.len() < 2
                || self.max_depth.is_some_and(|d| depth >= d)
                || self.is_pure(&rows);
            let split = if stop { None } else { self.best_split(&rows, rng) };
            match split {
                None => nodes[slot] = Node::Leaf(self.leaf(&rows)),
                Some(split) => {
                    let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
                        .iter()
                        .partition(|&&r| self.x[(r, split.feature)] <= split.threshold);
                    let left = nodes.len();
                    let right = left + 1;
                    nodes.push(Node::Leaf(Leaf::Mean(0.0)));
                    nodes.push(Node::Leaf(Leaf::Mean(0.0)));
                    nodes[slot] = Node::Split {
                        feature: split.feature,
                        threshold: split.threshold,
                        left,
                        right,
                    };
                    stack.push((right, right_rows, depth + 1));
                    stack.push((left, left_rows, depth + 1));
                }
            }
        }
        DecisionTree {
            nodes,
            kind: self.response.kind(),
        }
    }

    fn best_split<R: Rng>(&self, rows: &[usize], rng: &mut R) -> Option<Split> {
        let q = self.x.ncols();
        let mut features = index::sample(rng, q, self.mtry).into_vec();
        features.sort_unstable();
        let mut best: Option<Split> = None;
        let mut pairs: Vec<(f64, usize)> = Vec::with_capacity(rows.len());
        for &f in &features {
            pairs.clear();
            pairs.extend(rows.iter().map(|&r| (self.x[(r, f)], r)));
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            if pairs[0].0 == pairs[pairs.len() - 1].0 {
                continue;
            }
            let candidate = match self.response {
                Response::Regression(y) => scan_regression(&pairs, y),
                Response::Classification { labels, .. } => {
                    scan_classification(&pairs, labels, self.n_classes)
                }
            };
            if let Some((threshold, gain)) = candidate {
                // Features are visited in ascending order, so strict comparison
                // keeps the lowest index on ties.
                if best.as_ref().is_none_or(|b| gain > b.gain) {
                    best = Some(Split {
                        feature: f,
                        threshold,
                        gain,
                    });
                }
            }
        }
        best
    }
}

fn midpoint(lo: f64, hi: f64) -> f64 {
    let mid = lo + (hi - lo) / 2.0;
    if mid >= hi || mid < lo {
        lo
    } else {
        mid
    }
}

/// Best threshold by squared-error reduction over `pairs` sorted by value.
fn scan_regression(pairs: &[(f64, usize)], y: &[f64]) -> Option<(f64, f64)> {
    let n = pairs.len() as f64;
    let total: f64 = pairs.iter().map(|&(_, r)| y[r]).sum();
    let sse: f64 = {
        let mean = total / n;
        pairs.iter().map(|&(_, r)| (y[r] - mean).powi(2)).sum()
    };
    let base = total * total / n;
    let mut left_sum = 0.0;
    let mut best: Option<(f64, f64)> = None;
    for k in 1..pairs.len() {
        left_sum += y[pairs[k - 1].1];
        if pairs[k - 1].0 == pairs[k].0 {
            continue;
        }
        let nl = k as f64;
        let nr = n - nl;
        let right_sum = total - left_sum;
        let gain = left_sum * left_sum / nl + right_sum * right_sum / nr - base;
        if best.is_none_or(|(_, g)| gain > g) {
            best = Some((midpoint(pairs[k - 1].0, pairs[k].0), gain));
        }
    }
    best.filter(|&(_, g)| g > 1e-12 * sse.max(f64::MIN_POSITIVE))
}

/// Best threshold by Gini decrease (scaled by node size).
fn scan_classification(pairs: &[(f64, usize)], labels: &[u32], k: usize) -> Option<(f64, f64)> {
    let n = pairs.len();
    let mut total = vec![0u64; k];
    for &(_, r) in pairs {
        total[labels[r] as usize] += 1;
    }
    let total_sq: u64 = total.iter().map(|c| c * c).sum();
    let mut left = vec![0u64; k];
    let mut left_sq: u64 = 0;
    let mut right_sq: u64 = total_sq;
    let base = total_sq as f64 / n as f64;
    let mut best: Option<(f64, f64)> = None;
    for i in 1..n {
        let c = labels[pairs[i - 1].1] as usize;
        // update sums of squared counts incrementally
        left_sq += 2 * left[c] + 1;
        let right_c = total[c] - left[c];
        right_sq -= 2 * right_c - 1;
        left[c] += 1;
        if pairs[i - 1].0 == pairs[i].0 {
            continue;
        }
        let gain = left_sq as f64 / i as f64 + right_sq as f64 / (n - i) as f64 - base;
        if best.is_none_or(|(_, g)| gain > g) {
            best = Some((midpoint(pairs[i - 1].0, pairs[i].0), gain));
        }
    }
    best.filter(|&(_, g)| g > 1e-12)
}

fn check_inputs(x: &Matrix, response: &Response) -> Result<()> {
    let n = x.nrows();
    if n == 0 || x.ncols() == 0 {
        return Err(Error::invalid("cannot fit a forest on empty data"));
    }
    if response.len() != n {
        return Err(Error::mismatch(format!("{n} responses"), response.len()));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("predictors must be finite"));
    }
    match response {
        Response::Regression(y) => {
            if y.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid("regression response must be finite"));
            }
        }
        Response::Classification { labels, n_classes } => {
            if *n_classes == 0 {
                return Err(Error::invalid("classification needs at least one class"));
            }
            if let Some(bad) = labels.iter().find(|&&l| l as usize >= *n_classes) {
                return Err(Error::invalid(format!(
                    "class index {bad} out of range for {n_classes} classes"
                )));
            }
        }
    }
    Ok(())
}

pub fn fit_forest(x: &Matrix, response: &Response, params: &ForestParams) -> Result<ForestModel> {
    check_inputs(x, response)?;
    if params.n_trees == 0 {
        return Err(Error::invalid("n_trees must be at least 1"));
    }
    let q = x.ncols();
    let n = x.nrows();
    let mtry = params.resolved_mtry(q);
    if mtry == 0 || mtry > q {
        return Err(Error::invalid(format!("mtry {mtry} must lie in 1..={q}")));
    }
    let min_node_size = params.resolved_min_node_size(response.kind());
    if min_node_size == 0 {
        return Err(Error::invalid("min_node_size must be at least 1"));
    }
    let n_classes = match response {
        Response::Classification { n_classes, .. } => *n_classes,
        Response::Regression(_) => 0,
    };
    let grower = Grower {
        x,
        response,
        mtry,
        min_node_size,
        max_depth: params.max_depth,
        n_classes,
    };

    let grown: Vec<(DecisionTree, Vec<usize>)> = (0..params.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng::child_rng(params.seed, &[t as u64]);
            let mut in_bag = vec![false; n];
            let rows: Vec<usize> = (0..n)
                .map(|_| {
                    let r = rng.random_range(0..n);
                    in_bag[r] = true;
                    r
                })
                .collect();
            let oob = (0..n).filter(|&r| !in_bag[r]).collect();
            (grower.grow(rows, &mut rng), oob)
        })
        .collect();

    let (trees, oob_indices) = grown.into_iter().unzip();
    Ok(ForestModel {
        trees,
        kind: response.kind(),
        oob_indices,
        feature_count: q,
        n_classes,
    })
}

fn vote(classes: impl Iterator<Item = u32>, n_classes: usize) -> u32 {
    let mut counts = vec![0u32; n_classes.max(1)];
    for c in classes {
        let c = c as usize;
        if c >= counts.len() {
            counts.resize(c + 1, 0);
        }
        counts[c] += 1;
    }
    argmax_lowest(&counts)
}

/// Mean of tree predictions (regression) or majority vote with ties to the
/// lowest class index (classification).
pub fn predict(model: &ForestModel, x: &Matrix) -> Result<Response> {
    if x.ncols() != model.feature_count {
        return Err(Error::mismatch(
            format!("{} features", model.feature_count),
            x.ncols(),
        ));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("predictors must be finite"));
    }
    let m = x.nrows();
    Ok(match model.kind {
        ForestKind::Regression => {
            let t = model.trees.len() as f64;
            let values = (0..m)
                .map(|i| {
                    let sum: f64 = model
                        .trees
                        .iter()
                        .map(|tree| match tree.leaf_for(x, i) {
                            Leaf::Mean(v) => *v,
                            Leaf::Counts(_) => unreachable!("kind checked at construction"),
                        })
                        .sum();
                    sum / t
                })
                .collect();
            Response::Regression(values)
        }
        ForestKind::Classification => {
            let labels = (0..m)
                .map(|i| {
                    vote(
                        model
                            .trees
                            .iter()
                            .filter_map(|tree| tree.leaf_for(x, i).class()),
                        model.n_classes,
                    )
                })
                .collect();
            Response::Classification {
                labels,
                n_classes: model.n_classes,
            }
        }
    })
}

/// Out-of-bag error: mean squared error (regression) or misclassification
/// rate (classification) over rows that were out of bag for at least one
/// tree. `None` when no row ever was.
pub fn oob_error(model: &ForestModel, x: &Matrix, response: &Response) -> Result<Option<f64>> {
    if x.ncols() != model.feature_count || response.len() != x.nrows() {
        return Err(Error::mismatch(
            format!("{}x{}", response.len(), model.feature_count),
            format!("{}x{}", x.nrows(), x.ncols()),
        ));
    }
    let n = x.nrows();
    let mut trees_for_row: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (t, oob) in model.oob_indices.iter().enumerate() {
        for &r in oob {
            if r < n {
                trees_for_row[r].push(t);
            }
        }
    }
    let mut total = 0.0;
    let mut counted = 0usize;
    for (r, trees) in trees_for_row.iter().enumerate() {
        if trees.is_empty() {
            continue;
        }
        counted += 1;
        match response {
            Response::Regression(y) => {
                let sum: f64 = trees
                    .iter()
                    .map(|&t| match model.trees[t].leaf_for(x, r) {
                        Leaf::Mean(v) => *v,
                        Leaf::Counts(_) => unreachable!("kind checked at construction"),
                    })
                    .sum();
                total += (sum / trees.len() as f64 - y[r]).powi(2);
            }
            Response::Classification { labels, .. } => {
                let predicted = vote(
                    trees
                        .iter()
                        .filter_map(|&t| model.trees[t].leaf_for(x, r).class()),
                    model.n_classes,
                );
                if predicted != labels[r] {
                    total += 1.0;
                }
            }
        }
    }
    Ok((counted > 0).then(|| total / counted as f64))
}
