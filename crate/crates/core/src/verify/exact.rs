use super::{linf_distance, VerifyError};
use crate::model::{compute_leaf_boxes, Label, LeafPayload, ModelError, Mode, Tree};

/// Exact minimal L-infinity perturbation that changes a classifier tree's
/// label away from `y0`: the smallest distance to any differently-labelled
/// leaf box.
///
/// Returns 0 when the tree already disagrees with `y0` and `+inf` when no
/// leaf carries another label.
pub fn verify_tree_exact(tree: &Tree, x: &[f64], y0: Label) -> Result<f64, VerifyError> {
    if tree.mode() != Mode::Classifier {
        return Err(ModelError::Unsupported("exact verification needs a classifier tree".into()).into());
    }
    if tree.leaf_payload(tree.traverse(x)) != Some(LeafPayload::Label(y0)) {
        return Ok(0.0);
    }
    let boxes = compute_leaf_boxes(tree, x.len());
    Ok(boxes
        .reachable()
        .filter(|(id, _)| tree.leaf_payload(*id) != Some(LeafPayload::Label(y0)))
        .map(|(_, b)| linf_distance(x, b))
        .fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::*;
    use crate::model::{Node, NodeId};

    #[test]
    fn tree_b_inside_l1() {
        let r = verify_tree_exact(&tree_b(), &[0.3, 0.1], 0).unwrap();
        // L2 needs 0.3 - 0.1 on f1, L3 needs 0.5 - 0.3 on f0.
        assert_eq!(r, (0.3f64 - 0.1).min(0.5 - 0.3));
        assert!((r - 0.2).abs() < 1e-12);
    }

    #[test]
    fn tree_b_inside_l3() {
        let r = verify_tree_exact(&tree_b(), &[0.6, 0.9], 1).unwrap();
        assert_eq!(r, 0.9 - 0.3);
    }

    #[test]
    fn constant_tree_is_unfalsifiable() {
        let t = Tree::new(vec![Node::label(0, 1)], NodeId(0), Mode::Classifier).unwrap();
        assert_eq!(verify_tree_exact(&t, &[1.0], 1).unwrap(), f64::INFINITY);
    }

    #[test]
    fn wrong_label_gives_zero() {
        assert_eq!(verify_tree_exact(&tree_b(), &[0.3, 0.1], 1).unwrap(), 0.0);
    }

    #[test]
    fn additive_tree_rejected() {
        assert!(verify_tree_exact(&stump(0, 0.5, -1.0, 1.0), &[0.0], 1).is_err());
    }
}
