//! Random instances and brute-force references shared by the integration
//! tests. Nothing here goes through the crate's box or verifier code.

#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use treecert::model::{Ensemble, Label, LeafPayload, Mode, Node, NodeId, NodeKind, Tree};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Either a tenth on [0, 1] (so thresholds and points collide often) or a
/// uniform draw on [-0.2, 1.2].
pub fn coordinate(rng: &mut ChaCha8Rng) -> f64 {
    if rng.gen_bool(0.5) {
        rng.gen_range(0..=10) as f64 / 10.0
    } else {
        rng.gen_range(-0.2..1.2)
    }
}

pub fn point(rng: &mut ChaCha8Rng, dims: usize) -> Vec<f64> {
    (0..dims).map(|_| coordinate(rng)).collect()
}

fn grow(
    rng: &mut ChaCha8Rng,
    nodes: &mut Vec<Node>,
    dims: usize,
    depth: usize,
    max_depth: usize,
    leaf: &mut dyn FnMut(&mut ChaCha8Rng, u32) -> Node,
) -> u32 {
    let id = nodes.len() as u32;
    if depth < max_depth && rng.gen_bool(0.8) {
        nodes.push(Node::label(id, 0));
        let feature = rng.gen_range(0..dims);
        let threshold = coordinate(rng);
        let left = grow(rng, nodes, dims, depth + 1, max_depth, leaf);
        let right = grow(rng, nodes, dims, depth + 1, max_depth, leaf);
        nodes[id as usize] = Node::split(id, feature, threshold, left, right);
    } else {
        nodes.push(leaf(rng, id));
    }
    id
}

/// Classifier tree with 0/1 leaves; sibling leaves may share a label.
pub fn classifier_tree(rng: &mut ChaCha8Rng, dims: usize, max_depth: usize) -> Tree {
    let mut nodes = Vec::new();
    grow(rng, &mut nodes, dims, 0, max_depth, &mut |r, id| Node::label(id, r.gen_range(0..2)));
    Tree::new(nodes, NodeId(0), Mode::Classifier).expect("valid random tree")
}

/// Additive tree with leaf values on a quarter grid in [-1, 1].
pub fn additive_tree(rng: &mut ChaCha8Rng, dims: usize, max_depth: usize) -> Tree {
    let mut nodes = Vec::new();
    grow(rng, &mut nodes, dims, 0, max_depth, &mut |r, id| {
        Node::value(id, r.gen_range(-4..=4) as f64 / 4.0)
    });
    Tree::new(nodes, NodeId(0), Mode::Additive).expect("valid random tree")
}

pub fn additive_ensemble(rng: &mut ChaCha8Rng, dims: usize, n_trees: usize, max_depth: usize) -> Ensemble {
    let trees = (0..n_trees).map(|_| additive_tree(rng, dims, max_depth)).collect();
    let base = rng.gen_range(-2..=2) as f64 / 4.0;
    Ensemble::new(Mode::Additive, dims, base, trees).expect("valid random ensemble")
}

/// Walks from the root following `x[f] <= threshold` to the left.
pub fn route(tree: &Tree, x: &[f64]) -> NodeId {
    let mut id = tree.root();
    loop {
        match &tree.node(id).kind {
            NodeKind::Leaf(_) => return id,
            NodeKind::Split {
                feature,
                threshold,
                left,
                right,
            } => id = if x[*feature] <= *threshold { *left } else { *right },
        }
    }
}

/// Per-dimension `(lo, hi]` bounds of every leaf, collected from the path
/// conditions. Leaves whose conditions contradict are left out.
pub fn path_regions(tree: &Tree, dims: usize) -> Vec<(NodeId, Vec<(f64, f64)>, LeafPayload)> {
    let mut out = Vec::new();
    let mut stack = vec![(tree.root(), vec![(f64::NEG_INFINITY, f64::INFINITY); dims])];
    while let Some((id, bounds)) = stack.pop() {
        match &tree.node(id).kind {
            NodeKind::Leaf(p) => {
                if bounds.iter().all(|(lo, hi)| lo < hi) {
                    out.push((id, bounds, *p));
                }
            }
            NodeKind::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                let mut l = bounds.clone();
                l[*feature].1 = l[*feature].1.min(*threshold);
                let mut r = bounds;
                r[*feature].0 = r[*feature].0.max(*threshold);
                stack.push((*left, l));
                stack.push((*right, r));
            }
        }
    }
    out
}

/// Infimum of `||z - x||_inf` over `z` in the product of `(lo, hi]`.
pub fn region_distance(x: &[f64], region: &[(f64, f64)]) -> f64 {
    let mut worst: f64 = 0.0;
    for (t, &(lo, hi)) in region.iter().enumerate() {
        let d = if x[t] > hi {
            x[t] - hi
        } else if x[t] <= lo {
            lo - x[t]
        } else {
            0.0
        };
        worst = worst.max(d);
    }
    worst
}

/// Exact minimal adversarial radius of a classifier tree by path enumeration.
pub fn tree_rstar(tree: &Tree, x: &[f64], y0: Label) -> f64 {
    let dims = x.len();
    if tree.leaf_payload(route(tree, x)) != Some(LeafPayload::Label(y0)) {
        return 0.0;
    }
    path_regions(tree, dims)
        .iter()
        .filter(|(_, _, p)| *p != LeafPayload::Label(y0))
        .map(|(_, r, _)| region_distance(x, r))
        .fold(f64::INFINITY, f64::min)
}

/// Every nonempty cross-tree leaf combination as `(distance, signed margin)`.
pub fn tuple_margins(ensemble: &Ensemble, x: &[f64], y0: Label) -> Vec<(f64, f64)> {
    let dims = ensemble.n_features();
    let per_tree: Vec<_> = ensemble.trees().iter().map(|t| path_regions(t, dims)).collect();
    let sign = if y0 == 1 { 1.0 } else { -1.0 };
    let mut out = Vec::new();
    let start = vec![(f64::NEG_INFINITY, f64::INFINITY); dims];
    let mut stack = vec![(0usize, start, ensemble.base_score())];
    while let Some((depth, region, acc)) = stack.pop() {
        if depth == per_tree.len() {
            out.push((region_distance(x, &region), sign * acc));
            continue;
        }
        for (_, leaf_region, payload) in &per_tree[depth] {
            let merged: Vec<(f64, f64)> = region
                .iter()
                .zip(leaf_region)
                .map(|(a, b)| (a.0.max(b.0), a.1.min(b.1)))
                .collect();
            if merged.iter().any(|(lo, hi)| lo >= hi) {
                continue;
            }
            let LeafPayload::Value(v) = payload else {
                unreachable!("additive ensemble")
            };
            stack.push((depth + 1, merged, acc + v));
        }
    }
    out
}

/// Smallest signed margin among combinations within `eps`.
pub fn min_margin_within(tuples: &[(f64, f64)], eps: f64) -> f64 {
    tuples
        .iter()
        .filter(|(d, _)| *d <= eps)
        .map(|(_, m)| *m)
        .fold(f64::INFINITY, f64::min)
}

/// Temporary directory holding a copy of the named fixture files.
pub fn fixture_dir(files: &[&str]) -> tempfile::TempDir {
    let dir = tempfile::tempdir().expect("tempdir");
    for f in files {
        let src = fixture(f);
        let name = std::path::Path::new(f).file_name().expect("file name");
        std::fs::copy(&src, dir.path().join(name)).expect("copy fixture");
    }
    dir
}

pub fn fixture(rel: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(rel)
}
