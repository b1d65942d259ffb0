//! Exhaustive enumeration over cross-tree leaf tuples.
//!
//! Exponential in the number of trees; meant for checking the bounds on
//! small instances.

use super::{linf_distance, VerifyError};
use crate::model::{compute_leaf_boxes, AxisBox, Ensemble, Label, LeafPayload, Mode};

/// Largest tuple count the oracle accepts by default.
pub const DEFAULT_TUPLE_CAP: u128 = 1_000_000;

/// One leaf per tree with a nonempty common box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TupleOutcome {
    /// Infimum L-infinity distance from the input to the common box.
    pub distance: f64,
    /// Margin oriented toward `y0` (see the module docs of `verify`).
    pub margin: f64,
    /// Whether the model's label on the common box differs from `y0`.
    pub misclassified: bool,
}

/// Enumerates every feasible leaf tuple.
pub fn feasible_tuples(
    ensemble: &Ensemble,
    x: &[f64],
    y0: Label,
    cap: u128,
) -> Result<Vec<TupleOutcome>, VerifyError> {
    let per_tree: Vec<Vec<(AxisBox, LeafPayload)>> = ensemble
        .trees()
        .iter()
        .map(|t| {
            compute_leaf_boxes(t, ensemble.n_features())
                .reachable()
                .map(|(id, b)| (b.clone(), t.leaf_payload(id).expect("leaf")))
                .collect()
        })
        .collect();
    let tuples: u128 = per_tree.iter().map(|l| l.len() as u128).product();
    if tuples > cap {
        return Err(VerifyError::OracleCap { tuples, cap });
    }
    if ensemble.mode() == Mode::Classifier {
        ensemble.classifier_tree()?;
    }
    let mut out = Vec::new();
    let start = AxisBox::unbounded(ensemble.n_features());
    walk(ensemble, &per_tree, x, y0, start, ensemble.base_score(), &mut out);
    Ok(out)
}

fn walk(
    ensemble: &Ensemble,
    rest: &[Vec<(AxisBox, LeafPayload)>],
    x: &[f64],
    y0: Label,
    region: AxisBox,
    acc: f64,
    out: &mut Vec<TupleOutcome>,
) {
    let Some((leaves, tail)) = rest.split_first() else {
        let (margin, misclassified) = match ensemble.mode() {
            Mode::Classifier => {
                let label = acc as Label;
                (if label == y0 { 1.0 } else { -1.0 }, label != y0)
            }
            Mode::Additive => {
                let label = u32::from(acc >= 0.0);
                (if y0 == 1 { acc } else { -acc }, label != y0)
            }
        };
        out.push(TupleOutcome {
            distance: linf_distance(x, &region),
            margin,
            misclassified,
        });
        return;
    };
    for (b, payload) in leaves {
        let Ok(Some(next)) = region.intersect(b) else {
            continue;
        };
        let acc = match payload {
            LeafPayload::Label(l) => *l as f64,
            LeafPayload::Value(v) => acc + v,
        };
        walk(ensemble, tail, x, y0, next, acc, out);
    }
}

/// Exact minimum margin over the closed ball of radius `eps`.
pub fn exact_min_margin(outcomes: &[TupleOutcome], eps: f64) -> f64 {
    outcomes
        .iter()
        .filter(|o| o.distance <= eps)
        .map(|o| o.margin)
        .fold(f64::INFINITY, f64::min)
}

/// Exact minimal adversarial L-infinity perturbation by enumeration.
///
/// 0 when the clean prediction already differs from `y0`; `+inf` when no
/// tuple changes the label.
pub fn brute_force_rstar(ensemble: &Ensemble, x: &[f64], y0: Label) -> Result<f64, VerifyError> {
    brute_force_rstar_capped(ensemble, x, y0, DEFAULT_TUPLE_CAP)
}

pub fn brute_force_rstar_capped(
    ensemble: &Ensemble,
    x: &[f64],
    y0: Label,
    cap: u128,
) -> Result<f64, VerifyError> {
    if ensemble.predict(x)?.label != y0 {
        return Ok(0.0);
    }
    Ok(feasible_tuples(ensemble, x, y0, cap)?
        .iter()
        .filter(|o| o.misclassified)
        .map(|o| o.distance)
        .fold(f64::INFINITY, f64::min))
}
