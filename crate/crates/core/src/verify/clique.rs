//! Lower bounds on the worst-case margin inside an L-infinity ball.
//!
//! Level 0 has one part per tree holding that tree's reachable leaves. Each
//! merging round splits the current parts into consecutive groups of
//! `max_clique` and replaces every group by the set of its cliques: one node
//! per part, boxes pairwise intersecting and meeting the ball. A clique
//! carries the summed value and the intersected box. The bound is then the
//! sum of per-part minima, or a chain dynamic program that only links nodes
//! of consecutive parts whose boxes intersect.
//!
//! Every real input in the ball picks one leaf per tree; those leaves form a
//! clique at every level and a valid chain, so both aggregates are at most
//! the true minimum margin.

use super::{linf_distance, VerifyError, VerifyParams};
use crate::model::{compute_leaf_boxes, AxisBox, Ensemble, Label, LeafPayload, Mode, NodeId, Tree};

/// A merged group of leaves from distinct trees.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoNode {
    /// Sum of the members' signed values.
    pub value: f64,
    /// Intersection of the members' boxes.
    pub region: AxisBox,
    /// `(tree index, leaf id)` of every member.
    pub members: Vec<(usize, NodeId)>,
}

/// An ensemble with its nonempty leaf boxes precomputed.
#[derive(Debug, Clone)]
pub struct Verifier<'a> {
    ensemble: &'a Ensemble,
    leaves: Vec<Vec<(NodeId, AxisBox, LeafPayload)>>,
}

impl<'a> Verifier<'a> {
    pub fn new(ensemble: &'a Ensemble) -> Self {
        let leaves = ensemble
            .trees()
            .iter()
            .map(|tree| {
                compute_leaf_boxes(tree, ensemble.n_features())
                    .reachable()
                    .map(|(id, b)| (id, b.clone(), tree.leaf_payload(id).expect("leaf")))
                    .collect()
            })
            .collect();
        Verifier { ensemble, leaves }
    }

    pub fn ensemble(&self) -> &Ensemble {
        self.ensemble
    }

    fn orientation(&self, y0: Label) -> Result<f64, VerifyError> {
        match (self.ensemble.mode(), y0) {
            (Mode::Classifier, _) => {
                self.ensemble.classifier_tree()?;
                Ok(1.0)
            }
            (Mode::Additive, 0) => Ok(-1.0),
            (Mode::Additive, 1) => Ok(1.0),
            (Mode::Additive, other) => Err(VerifyError::NonBinaryLabel(other)),
        }
    }

    fn signed(payload: LeafPayload, y0: Label, sign: f64) -> f64 {
        match payload {
            LeafPayload::Label(l) => {
                if l == y0 {
                    1.0
                } else {
                    -1.0
                }
            }
            LeafPayload::Value(v) => sign * v,
        }
    }

    /// Signed base score for the margin.
    fn base(&self, sign: f64) -> f64 {
        match self.ensemble.mode() {
            Mode::Classifier => 0.0,
            Mode::Additive => sign * self.ensemble.base_score(),
        }
    }

    /// Leaves of tree `tree` whose boxes meet the closed ball of radius
    /// `eps` around `x`, with signed values.
    pub fn reachable_leaves(
        &self,
        tree: usize,
        x: &[f64],
        y0: Label,
        eps: f64,
    ) -> Result<Vec<(NodeId, f64)>, VerifyError> {
        let sign = self.orientation(y0)?;
        Ok(self.leaves[tree]
            .iter()
            .filter(|(_, b, _)| linf_distance(x, b) <= eps)
            .map(|(id, _, p)| (*id, Self::signed(*p, y0, sign)))
            .collect())
    }

    fn level_zero(&self, x: &[f64], y0: Label, eps: f64) -> Result<Vec<Vec<PseudoNode>>, VerifyError> {
        let sign = self.orientation(y0)?;
        self.leaves
            .iter()
            .enumerate()
            .map(|(ti, leaves)| {
                let part: Vec<PseudoNode> = leaves
                    .iter()
                    .filter(|(_, b, _)| linf_distance(x, b) <= eps)
                    .map(|(id, b, p)| PseudoNode {
                        value: Self::signed(*p, y0, sign),
                        region: b.clone(),
                        members: vec![(ti, *id)],
                    })
                    .collect();
                if part.is_empty() {
                    Err(VerifyError::NoReachableLeaf(ti))
                } else {
                    Ok(part)
                }
            })
            .collect()
    }

    /// Sound lower bound on the signed margin over `||delta||_inf <= eps`.
    pub fn margin_bound(
        &self,
        x: &[f64],
        y0: Label,
        eps: f64,
        params: &VerifyParams,
    ) -> Result<f64, VerifyError> {
        params.validate()?;
        let sign = self.orientation(y0)?;
        let mut parts = self.level_zero(x, y0, eps)?;
        for _ in 0..params.max_level {
            if parts.len() <= 1 {
                break;
            }
            parts = parts
                .chunks(params.max_clique)
                .map(|group| merge_group(group, x, eps))
                .collect();
        }
        let total = if params.dp {
            chain_minimum(&parts)
        } else {
            parts
                .iter()
                .map(|p| p.iter().map(|n| n.value).fold(f64::INFINITY, f64::min))
                .sum()
        };
        Ok(self.base(sign) + total)
    }

    /// Robust iff the margin bound is strictly positive.
    pub fn verify_at(&self, x: &[f64], y0: Label, eps: f64, params: &VerifyParams) -> Result<bool, VerifyError> {
        Ok(self.margin_bound(x, y0, eps, params)? > 0.0)
    }
}

/// All cliques across the parts of one group, found depth-first with the
/// running intersection pruned as soon as it empties or leaves the ball.
fn merge_group(group: &[Vec<PseudoNode>], x: &[f64], eps: f64) -> Vec<PseudoNode> {
    if let [single] = group {
        return single.clone();
    }
    let mut out = Vec::new();
    for first in &group[0] {
        extend_clique(first.clone(), &group[1..], x, eps, &mut out);
    }
    out
}

fn extend_clique(current: PseudoNode, rest: &[Vec<PseudoNode>], x: &[f64], eps: f64, out: &mut Vec<PseudoNode>) {
    let Some((part, tail)) = rest.split_first() else {
        out.push(current);
        return;
    };
    for node in part {
        let Some(region) = current.region.intersect_same_dims(&node.region) else {
            continue;
        };
        if linf_distance(x, &region) > eps {
            continue;
        }
        let mut members = current.members.clone();
        members.extend_from_slice(&node.members);
        let next = PseudoNode {
            value: current.value + node.value,
            region,
            members,
        };
        extend_clique(next, tail, x, eps, out);
    }
}

/// Minimum summed value over sequences with one node per part where each
/// node's box intersects the previous node's box.
fn chain_minimum(parts: &[Vec<PseudoNode>]) -> f64 {
    let mut prev: Vec<f64> = parts[0].iter().map(|n| n.value).collect();
    for i in 1..parts.len() {
        let cur: Vec<f64> = parts[i]
            .iter()
            .map(|n| {
                let best = parts[i - 1]
                    .iter()
                    .zip(&prev)
                    .filter(|(m, _)| m.region.intersects(&n.region))
                    .map(|(_, &v)| v)
                    .fold(f64::INFINITY, f64::min);
                n.value + best
            })
            .collect();
        prev = cur;
    }
    prev.into_iter().fold(f64::INFINITY, f64::min)
}

/// Leaves of a standalone tree reachable within `eps` of `x`, with values
/// oriented toward `y0` as in [`Verifier::reachable_leaves`].
pub fn reachable_leaves(tree: &Tree, x: &[f64], y0: Label, eps: f64) -> Result<Vec<(NodeId, f64)>, VerifyError> {
    let n_features = tree.required_features().max(x.len());
    let ensemble = match tree.mode() {
        Mode::Classifier => Ensemble::from_classifier(tree.clone(), n_features)?,
        Mode::Additive => Ensemble::new(Mode::Additive, n_features, 0.0, vec![tree.clone()])?,
    };
    Verifier::new(&ensemble).reachable_leaves(0, x, y0, eps)
}

pub fn ensemble_margin_bound(
    ensemble: &Ensemble,
    x: &[f64],
    y0: Label,
    eps: f64,
    params: &VerifyParams,
) -> Result<f64, VerifyError> {
    Verifier::new(ensemble).margin_bound(x, y0, eps, params)
}

pub fn verify_at(
    ensemble: &Ensemble,
    x: &[f64],
    y0: Label,
    eps: f64,
    params: &VerifyParams,
) -> Result<bool, VerifyError> {
    Verifier::new(ensemble).verify_at(x, y0, eps, params)
}
