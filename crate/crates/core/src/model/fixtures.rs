//! Small hand-built models used in tests and documentation.

use super::{Ensemble, Mode, Node, NodeId, Tree};

pub const TREE_B_L1: NodeId = NodeId(3);
pub const TREE_B_L2: NodeId = NodeId(4);
pub const TREE_B_L3: NodeId = NodeId(2);

/// TREE-A: classifier stump on feature 0 at 0.5, labels 0 | 1.
pub fn tree_a() -> Tree {
    Tree::new(
        vec![Node::split(0, 0, 0.5, 1, 2), Node::label(1, 0), Node::label(2, 1)],
        NodeId(0),
        Mode::Classifier,
    )
    .expect("valid fixture")
}

/// TREE-B: root `f0 <= 0.5`; its left child splits `f1 <= 0.3` into
/// L1 (label 0) and L2 (label 1); the right child is L3 (label 1).
pub fn tree_b() -> Tree {
    Tree::new(
        vec![
            Node::split(0, 0, 0.5, 1, 2),
            Node::split(1, 1, 0.3, 3, 4),
            Node::label(2, 1),
            Node::label(3, 0),
            Node::label(4, 1),
        ],
        NodeId(0),
        Mode::Classifier,
    )
    .expect("valid fixture")
}

/// Additive stump `x[feature] <= threshold ? left : right`.
pub fn stump(feature: usize, threshold: f64, left: f64, right: f64) -> Tree {
    Tree::new(
        vec![
            Node::split(0, feature, threshold, 1, 2),
            Node::value(1, left),
            Node::value(2, right),
        ],
        NodeId(0),
        Mode::Additive,
    )
    .expect("valid fixture")
}

/// S1 (`f0 @ 0.5`: -0.5 / +1.0) and S2 (`f0 @ 0.7`: -0.3 / +0.8).
pub fn stump_pair() -> Ensemble {
    Ensemble::new(
        Mode::Additive,
        1,
        0.0,
        vec![stump(0, 0.5, -0.5, 1.0), stump(0, 0.7, -0.3, 0.8)],
    )
    .expect("valid fixture")
}

/// Three unit stumps: S1 on f0, S2 on f1, S3 on f0 with flipped signs.
/// S1 and S3 cancel wherever both are consistent.
pub fn three_stumps() -> Ensemble {
    Ensemble::new(
        Mode::Additive,
        2,
        0.0,
        vec![
            stump(0, 0.5, -1.0, 1.0),
            stump(1, 0.5, -1.0, 1.0),
            stump(0, 0.5, 1.0, -1.0),
        ],
    )
    .expect("valid fixture")
}
