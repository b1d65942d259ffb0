use std::collections::BTreeMap;

use log::warn;

use super::{AxisBox, NodeId, NodeKind, Tree};

/// Per-leaf regions of a tree.
///
/// Leaves behind a split whose threshold lies outside the parent interval
/// get an empty box and are listed in `unreachable`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeafBoxes {
    pub boxes: BTreeMap<NodeId, AxisBox>,
    pub unreachable: Vec<NodeId>,
}

impl LeafBoxes {
    /// Leaves with nonempty boxes, in id order.
    pub fn reachable(&self) -> impl Iterator<Item = (NodeId, &AxisBox)> {
        self.boxes
            .iter()
            .filter(|(_, b)| !b.is_empty())
            .map(|(id, b)| (*id, b))
    }
}

/// Propagates boxes from the root: the left child clips the split dimension
/// to `(lo, min(hi, threshold)]`, the right child to `(max(lo, threshold), hi]`.
pub fn compute_leaf_boxes(tree: &Tree, n_features: usize) -> LeafBoxes {
    let dims = n_features.max(tree.required_features());
    let mut boxes = BTreeMap::new();
    let mut stack = vec![(tree.root(), AxisBox::unbounded(dims))];
    while let Some((id, region)) = stack.pop() {
        match tree.node(id).kind {
            NodeKind::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                let iv = region.interval(feature);
                stack.push((right, region.with_interval(feature, iv.clip_right(threshold))));
                stack.push((left, region.with_interval(feature, iv.clip_left(threshold))));
            }
            NodeKind::Leaf(_) => {
                boxes.insert(id, region);
            }
        }
    }
    let unreachable: Vec<NodeId> = boxes
        .iter()
        .filter(|(_, b)| b.is_empty())
        .map(|(id, _)| *id)
        .collect();
    if !unreachable.is_empty() {
        warn!("tree has unreachable leaves: {unreachable:?}");
    }
    LeafBoxes { boxes, unreachable }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::*;
    use crate::model::{Interval, Mode, Node};

    const INF: f64 = f64::INFINITY;
    const NINF: f64 = f64::NEG_INFINITY;

    #[test]
    fn single_leaf_gets_whole_space() {
        let t = Tree::new(vec![Node::label(0, 1)], NodeId(0), Mode::Classifier).unwrap();
        let lb = compute_leaf_boxes(&t, 3);
        assert_eq!(lb.boxes[&NodeId(0)], AxisBox::unbounded(3));
        assert!(lb.unreachable.is_empty());
    }

    #[test]
    fn redundant_nested_split_clamps_and_empties() {
        let t = Tree::new(
            vec![
                Node::split(0, 0, 0.5, 1, 2),
                Node::split(1, 0, 0.9, 3, 4),
                Node::label(2, 1),
                Node::label(3, 0),
                Node::label(4, 1),
            ],
            NodeId(0),
            Mode::Classifier,
        )
        .unwrap();
        let lb = compute_leaf_boxes(&t, 1);
        assert_eq!(lb.boxes[&NodeId(3)].interval(0), Interval::new(NINF, 0.5));
        assert!(lb.boxes[&NodeId(4)].is_empty());
        assert_eq!(lb.unreachable, vec![NodeId(4)]);
        assert_eq!(lb.reachable().count(), 2);
    }

    #[test]
    fn tree_b_boxes() {
        let lb = compute_leaf_boxes(&tree_b(), 2);
        let expect = |lo0, hi0, lo1, hi1| {
            AxisBox::from_intervals(vec![Interval::new(lo0, hi0), Interval::new(lo1, hi1)])
        };
        assert_eq!(lb.boxes[&TREE_B_L1], expect(NINF, 0.5, NINF, 0.3));
        assert_eq!(lb.boxes[&TREE_B_L2], expect(NINF, 0.5, 0.3, INF));
        assert_eq!(lb.boxes[&TREE_B_L3], expect(0.5, INF, NINF, INF));
    }
}
