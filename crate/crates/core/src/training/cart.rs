use super::splits::{best_split, SplitStats};
use super::{check_binary, TrainError, TrainParams};
use crate::data::Dataset;
use crate::model::{Mode, Node, NodeId, Tree};

#[derive(Clone)]
struct ClassCounts<'a> {
    labels: &'a [u32],
    counts: [usize; 2],
}

impl<'a> ClassCounts<'a> {
    fn of(labels: &'a [u32], rows: &[usize]) -> Self {
        let mut c = ClassCounts {
            labels,
            counts: [0, 0],
        };
        for &r in rows {
            c.add(r);
        }
        c
    }

    fn n(&self) -> usize {
        self.counts[0] + self.counts[1]
    }

    fn gini(&self) -> f64 {
        let n = self.n() as f64;
        if n == 0.0 {
            return 0.0;
        }
        let p0 = self.counts[0] as f64 / n;
        let p1 = self.counts[1] as f64 / n;
        1.0 - p0 * p0 - p1 * p1
    }

    /// Majority label, ties to class 0.
    fn majority(&self) -> u32 {
        u32::from(self.counts[1] > self.counts[0])
    }
}

impl SplitStats for ClassCounts<'_> {
    fn add(&mut self, row: usize) {
        self.counts[self.labels[row] as usize] += 1;
    }
    fn remove(&mut self, row: usize) {
        self.counts[self.labels[row] as usize] -= 1;
    }
}

struct Builder<'a> {
    x: &'a [Vec<f64>],
    labels: &'a [u32],
    n_features: usize,
    params: TrainParams,
    nodes: Vec<Node>,
}

impl Builder<'_> {
    fn grow(&mut self, rows: &[usize], depth: usize) -> u32 {
        let id = self.nodes.len() as u32;
        let counts = ClassCounts::of(self.labels, rows);
        let pure = counts.counts.contains(&0);
        let stop = depth >= self.params.max_depth || rows.len() < self.params.min_samples_split || pure;
        let split = if stop {
            None
        } else {
            let parent = counts.gini();
            let n = rows.len() as f64;
            let empty = ClassCounts::of(self.labels, &[]);
            best_split(self.x, rows, self.n_features, &empty, &counts, |l, r| {
                parent - (l.n() as f64 / n) * l.gini() - (r.n() as f64 / n) * r.gini()
            })
        };
        match split {
            None => {
                self.nodes.push(Node::label(id, counts.majority()));
            }
            Some(s) => {
                // Reserve the slot so ids come out in preorder.
                self.nodes.push(Node::label(id, 0));
                let left = self.grow(&s.left, depth + 1);
                let right = self.grow(&s.right, depth + 1);
                self.nodes[id as usize] = Node::split(id, s.feature, s.threshold, left, right);
            }
        }
        id
    }
}

/// Greedy Gini CART. A node becomes a leaf at `max_depth`, below
/// `min_samples_split` samples, when pure, or when no split has positive gain.
pub fn train_cart(train: &Dataset, params: &TrainParams) -> Result<Tree, TrainError> {
    params.validate()?;
    if train.is_empty() {
        return Err(TrainError::Empty);
    }
    let (x, labels) = train.dense();
    check_binary(&labels)?;
    let rows: Vec<usize> = (0..x.len()).collect();
    let mut b = Builder {
        x: &x,
        labels: &labels,
        n_features: train.n_features,
        params: *params,
        nodes: Vec::new(),
    };
    b.grow(&rows, 0);
    Ok(Tree::new(b.nodes, NodeId(0), Mode::Classifier)?)
}
