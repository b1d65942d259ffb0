//! Second-order boosting of regression trees under the logistic loss.
//!
//! Each round fits a tree to per-sample gradients `g = p - y` and hessians
//! `h = p (1 - p)` of the current raw scores. A split's gain is
//! `(G_L^2/(H_L+l) + G_R^2/(H_R+l) - G^2/(H+l)) / 2` and a leaf's weight is
//! `-G/(H+l)` scaled by the learning rate.

use super::splits::{best_split, SplitStats};
use super::{check_binary, TrainError, TrainParams};
use crate::data::Dataset;
use crate::model::{Ensemble, Mode, Node, NodeId, Tree};

#[derive(Clone)]
struct GradSums<'a> {
    grad: &'a [f64],
    hess: &'a [f64],
    g: f64,
    h: f64,
}

impl<'a> GradSums<'a> {
    fn of(grad: &'a [f64], hess: &'a [f64], rows: &[usize]) -> Self {
        let mut s = GradSums { grad, hess, g: 0.0, h: 0.0 };
        for &r in rows {
            s.add(r);
        }
        s
    }

    fn score(&self, lambda: f64) -> f64 {
        let den = self.h + lambda;
        if den > 0.0 {
            self.g * self.g / den
        } else {
            0.0
        }
    }

    fn weight(&self, lambda: f64) -> f64 {
        let den = self.h + lambda;
        if den > 0.0 {
            -self.g / den
        } else {
            0.0
        }
    }
}

impl SplitStats for GradSums<'_> {
    fn add(&mut self, row: usize) {
        self.g += self.grad[row];
        self.h += self.hess[row];
    }
    fn remove(&mut self, row: usize) {
        self.g -= self.grad[row];
        self.h -= self.hess[row];
    }
}

struct RoundBuilder<'a> {
    x: &'a [Vec<f64>],
    grad: &'a [f64],
    hess: &'a [f64],
    n_features: usize,
    params: TrainParams,
    nodes: Vec<Node>,
}

impl RoundBuilder<'_> {
    fn grow(&mut self, rows: &[usize], depth: usize) -> u32 {
        let id = self.nodes.len() as u32;
        let lambda = self.params.l2_reg;
        let sums = GradSums::of(self.grad, self.hess, rows);
        let split = if depth >= self.params.max_depth || rows.len() < self.params.min_samples_split {
            None
        } else {
            let parent = sums.score(lambda);
            let empty = GradSums::of(self.grad, self.hess, &[]);
            best_split(self.x, rows, self.n_features, &empty, &sums, |l, r| {
                0.5 * (l.score(lambda) + r.score(lambda) - parent)
            })
        };
        match split {
            None => {
                let w = sums.weight(lambda) * self.params.learning_rate;
                self.nodes.push(Node::value(id, w));
            }
            Some(s) => {
                self.nodes.push(Node::value(id, 0.0));
                let left = self.grow(&s.left, depth + 1);
                let right = self.grow(&s.right, depth + 1);
                self.nodes[id as usize] = Node::split(id, s.feature, s.threshold, left, right);
            }
        }
        id
    }
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Trains `n_rounds` additive trees with base score 0; the ensemble predicts
/// class 1 iff its raw score is non-negative.
pub fn train_boosted(train: &Dataset, params: &TrainParams) -> Result<Ensemble, TrainError> {
    params.validate()?;
    if train.is_empty() {
        return Err(TrainError::Empty);
    }
    let (x, labels) = train.dense();
    check_binary(&labels)?;
    let n = x.len();
    let rows: Vec<usize> = (0..n).collect();
    let mut raw = vec![0.0; n];
    let mut trees = Vec::with_capacity(params.n_rounds);
    for _ in 0..params.n_rounds {
        let (grad, hess): (Vec<f64>, Vec<f64>) = raw
            .iter()
            .zip(&labels)
            .map(|(&z, &y)| {
                let p = sigmoid(z);
                (p - y as f64, p * (1.0 - p))
            })
            .unzip();
        let mut b = RoundBuilder {
            x: &x,
            grad: &grad,
            hess: &hess,
            n_features: train.n_features,
            params: *params,
            nodes: Vec::new(),
        };
        b.grow(&rows, 0);
        let tree = Tree::new(b.nodes, NodeId(0), Mode::Additive)?;
        for (z, xi) in raw.iter_mut().zip(&x) {
            if let Some(crate::model::LeafPayload::Value(v)) = tree.leaf_payload(tree.traverse(xi)) {
                *z += v;
            }
        }
        trees.push(tree);
    }
    Ok(Ensemble::new(Mode::Additive, train.n_features, 0.0, trees)?)
}
