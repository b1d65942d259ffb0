//! Decision trees, additive ensembles, prediction and leaf-box geometry.

mod boxes;
pub mod fixtures;
mod geometry;
mod io;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use boxes::{compute_leaf_boxes, LeafBoxes};
pub use geometry::{box_intersect, coord, AxisBox, Interval};
pub use io::{dump_ensemble, load_ensemble};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("model parse error at {path}: {message}")]
    Parse { path: String, message: String },
    #[error("structural error in tree {tree}: {message}")]
    Structure { tree: usize, message: String },
    #[error("mode error in tree {tree}: {message}")]
    Mode { tree: usize, message: String },
    #[error("box dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Class id carried by classifier leaves and dataset examples.
pub type Label = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Classifier,
    Additive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LeafPayload {
    Label(Label),
    Value(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NodeKind {
    Split {
        feature: usize,
        threshold: f64,
        left: NodeId,
        right: NodeId,
    },
    Leaf(LeafPayload),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: NodeId,
    pub kind: NodeKind,
}

impl Node {
    pub fn split(id: u32, feature: usize, threshold: f64, left: u32, right: u32) -> Self {
        Node {
            id: NodeId(id),
            kind: NodeKind::Split {
                feature,
                threshold,
                left: NodeId(left),
                right: NodeId(right),
            },
        }
    }

    pub fn label(id: u32, label: Label) -> Self {
        Node {
            id: NodeId(id),
            kind: NodeKind::Leaf(LeafPayload::Label(label)),
        }
    }

    pub fn value(id: u32, value: f64) -> Self {
        Node {
            id: NodeId(id),
            kind: NodeKind::Leaf(LeafPayload::Value(value)),
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self.kind, NodeKind::Leaf(_))
    }
}

/// A validated binary decision tree.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    nodes: BTreeMap<NodeId, Node>,
    root: NodeId,
    mode: Mode,
}

impl Tree {
    /// Builds a tree and checks that it is a proper binary tree rooted at
    /// `root` whose leaves all match `mode`.
    pub fn new(nodes: Vec<Node>, root: NodeId, mode: Mode) -> Result<Self, ModelError> {
        Self::build(nodes, root, mode, 0)
    }

    pub(crate) fn build(
        nodes: Vec<Node>,
        root: NodeId,
        mode: Mode,
        index: usize,
    ) -> Result<Self, ModelError> {
        let structure = |message: String| ModelError::Structure {
            tree: index,
            message,
        };
        let mut map = BTreeMap::new();
        for node in nodes {
            let id = node.id;
            if map.insert(id, node).is_some() {
                return Err(structure(format!("duplicate node id {id}")));
            }
        }
        if !map.contains_key(&root) {
            return Err(structure(format!("root {root} does not exist")));
        }

        let mut seen = BTreeSet::new();
        let mut stack = vec![root];
        while let Some(id) = stack.pop() {
            if !seen.insert(id) {
                return Err(structure(format!("node {id} is reachable twice (cycle or shared child)")));
            }
            let node = map
                .get(&id)
                .ok_or_else(|| structure(format!("child id {id} refers to a missing node")))?;
            match node.kind {
                NodeKind::Split {
                    threshold,
                    left,
                    right,
                    ..
                } => {
                    if left == right {
                        return Err(structure(format!("node {id} has identical children")));
                    }
                    if !threshold.is_finite() {
                        return Err(structure(format!("node {id} has a non-finite threshold")));
                    }
                    stack.push(right);
                    stack.push(left);
                }
                NodeKind::Leaf(payload) => {
                    let ok = matches!(
                        (mode, payload),
                        (Mode::Classifier, LeafPayload::Label(_)) | (Mode::Additive, LeafPayload::Value(_))
                    );
                    if !ok {
                        return Err(ModelError::Mode {
                            tree: index,
                            message: format!("leaf {id} does not match {mode:?} mode"),
                        });
                    }
                    if let LeafPayload::Value(v) = payload {
                        if !v.is_finite() {
                            return Err(structure(format!("leaf {id} has a non-finite value")));
                        }
                    }
                }
            }
        }
        if seen.len() != map.len() {
            let orphan = map.keys().find(|k| !seen.contains(k)).copied();
            return Err(structure(format!(
                "node {} is not reachable from the root",
                orphan.map(|o| o.to_string()).unwrap_or_default()
            )));
        }
        Ok(Tree {
            nodes: map,
            root,
            mode,
        })
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[&id]
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.values()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn leaves(&self) -> impl Iterator<Item = &Node> {
        self.nodes.values().filter(|n| n.is_leaf())
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves().count()
    }

    /// Number of features the tree reads: one past its largest split index.
    pub fn required_features(&self) -> usize {
        self.nodes
            .values()
            .filter_map(|n| match n.kind {
                NodeKind::Split { feature, .. } => Some(feature + 1),
                NodeKind::Leaf(_) => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// Depth of the deepest leaf; a single leaf has depth 0.
    pub fn depth(&self) -> usize {
        let mut best = 0;
        let mut stack = vec![(self.root, 0usize)];
        while let Some((id, d)) = stack.pop() {
            match self.node(id).kind {
                NodeKind::Split { left, right, .. } => {
                    stack.push((left, d + 1));
                    stack.push((right, d + 1));
                }
                NodeKind::Leaf(_) => best = best.max(d),
            }
        }
        best
    }

    /// Walks from the root, going left iff `x[feature] <= threshold`.
    pub fn traverse(&self, x: &[f64]) -> NodeId {
        let mut id = self.root;
        loop {
            match self.node(id).kind {
                NodeKind::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    id = if coord(x, feature) <= threshold { left } else { right };
                }
                NodeKind::Leaf(_) => return id,
            }
        }
    }

    pub fn leaf_payload(&self, id: NodeId) -> Option<LeafPayload> {
        match self.nodes.get(&id)?.kind {
            NodeKind::Leaf(p) => Some(p),
            NodeKind::Split { .. } => None,
        }
    }
}

/// Result of evaluating a model on one input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub label: Label,
    pub score: f64,
}

/// An ordered list of trees over a shared `n_features`-dimensional space.
///
/// Additive ensembles predict class 1 iff `base_score + sum(leaf values) >= 0`.
/// A single classifier tree is an ensemble of length one in classifier mode.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    mode: Mode,
    n_features: usize,
    base_score: f64,
    trees: Vec<Tree>,
}

impl Ensemble {
    pub fn new(
        mode: Mode,
        n_features: usize,
        base_score: f64,
        trees: Vec<Tree>,
    ) -> Result<Self, ModelError> {
        if !base_score.is_finite() {
            return Err(ModelError::Parse {
                path: "base_score".into(),
                message: "must be finite".into(),
            });
        }
        for (i, tree) in trees.iter().enumerate() {
            if tree.mode != mode {
                return Err(ModelError::Mode {
                    tree: i,
                    message: format!("tree is {:?} but ensemble is {:?}", tree.mode, mode),
                });
            }
            if tree.required_features() > n_features {
                return Err(ModelError::Structure {
                    tree: i,
                    message: format!(
                        "splits on feature {} but n_features is {n_features}",
                        tree.required_features() - 1
                    ),
                });
            }
        }
        Ok(Ensemble {
            mode,
            n_features,
            base_score,
            trees,
        })
    }

    /// Wraps one classifier tree.
    pub fn from_classifier(tree: Tree, n_features: usize) -> Result<Self, ModelError> {
        Self::new(Mode::Classifier, n_features, 0.0, vec![tree])
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn base_score(&self) -> f64 {
        self.base_score
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    /// The lone tree of a classifier-mode ensemble.
    pub fn classifier_tree(&self) -> Result<&Tree, ModelError> {
        match (self.mode, self.trees.as_slice()) {
            (Mode::Classifier, [tree]) => Ok(tree),
            (Mode::Classifier, trees) => Err(ModelError::Unsupported(format!(
                "classifier mode needs exactly one tree, found {}",
                trees.len()
            ))),
            (Mode::Additive, _) => Err(ModelError::Unsupported(
                "additive ensemble used where a classifier tree is required".into(),
            )),
        }
    }

    /// Raw additive score; for classifier mode the leaf label as a real.
    pub fn score(&self, x: &[f64]) -> Result<f64, ModelError> {
        self.predict(x).map(|p| p.score)
    }

    pub fn predict(&self, x: &[f64]) -> Result<Prediction, ModelError> {
        match self.mode {
            Mode::Classifier => {
                let tree = self.classifier_tree()?;
                let label = match tree.leaf_payload(tree.traverse(x)) {
                    Some(LeafPayload::Label(l)) => l,
                    _ => unreachable!("validated classifier leaf"),
                };
                Ok(Prediction {
                    label,
                    score: label as f64,
                })
            }
            Mode::Additive => {
                let mut score = self.base_score;
                for tree in &self.trees {
                    if let Some(LeafPayload::Value(v)) = tree.leaf_payload(tree.traverse(x)) {
                        score += v;
                    }
                }
                Ok(Prediction {
                    label: u32::from(score >= 0.0),
                    score,
                })
            }
        }
    }
}

/// Leaf id reached by `x`.
pub fn traverse(tree: &Tree, x: &[f64]) -> NodeId {
    tree.traverse(x)
}

pub fn predict(ensemble: &Ensemble, x: &[f64]) -> Result<Prediction, ModelError> {
    ensemble.predict(x)
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn tree_b_traversal() {
        let tree = tree_b();
        assert_eq!(tree.traverse(&[0.3, 0.1]), TREE_B_L1);
        assert_eq!(tree.traverse(&[0.5, 0.3]), TREE_B_L1);
        assert_eq!(tree.traverse(&[0.6, 0.9]), TREE_B_L3);
        assert_eq!(tree.traverse(&[0.2, 0.31]), TREE_B_L2);
    }

    #[test]
    fn stump_pair_score() {
        let e = stump_pair();
        let p = e.predict(&[0.6]).unwrap();
        assert!((p.score - 0.7).abs() < 1e-12);
        assert_eq!(p.label, 1);
    }

    #[test]
    fn classifier_prediction() {
        let e = Ensemble::from_classifier(tree_b(), 2).unwrap();
        assert_eq!(e.predict(&[0.3, 0.1]).unwrap().label, 0);
        assert_eq!(e.predict(&[0.9, 0.0]).unwrap().label, 1);
    }

    #[test]
    fn multi_tree_classifier_is_unsupported() {
        let e = Ensemble::new(Mode::Classifier, 2, 0.0, vec![tree_b(), tree_b()]).unwrap();
        assert!(matches!(e.predict(&[0.0, 0.0]), Err(ModelError::Unsupported(_))));
    }

    #[test]
    fn structural_errors() {
        let dangling = Tree::new(
            vec![Node::split(0, 0, 0.5, 1, 2), Node::label(1, 0)],
            NodeId(0),
            Mode::Classifier,
        );
        assert!(matches!(dangling, Err(ModelError::Structure { .. })));

        let cyclic = Tree::new(
            vec![
                Node::split(0, 0, 0.5, 1, 2),
                Node::split(1, 0, 0.2, 0, 2),
                Node::label(2, 1),
            ],
            NodeId(0),
            Mode::Classifier,
        );
        assert!(matches!(cyclic, Err(ModelError::Structure { .. })));

        let orphan = Tree::new(
            vec![Node::label(0, 1), Node::label(7, 0)],
            NodeId(0),
            Mode::Classifier,
        );
        assert!(matches!(orphan, Err(ModelError::Structure { .. })));

        let mixed = Tree::new(
            vec![Node::split(0, 0, 0.5, 1, 2), Node::label(1, 0), Node::value(2, 1.0)],
            NodeId(0),
            Mode::Classifier,
        );
        assert!(matches!(mixed, Err(ModelError::Mode { .. })));
    }

    #[test]
    fn leaf_count_is_internal_plus_one() {
        let t = tree_b();
        let internal = t.len() - t.leaf_count();
        assert_eq!(t.leaf_count(), internal + 1);
        assert_eq!(t.depth(), 2);
        assert_eq!(t.required_features(), 2);
    }
}
