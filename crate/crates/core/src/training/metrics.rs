use serde::{Deserialize, Serialize};

use super::TrainError;
use crate::data::Dataset;
use crate::model::Ensemble;

/// Binary confusion counts with class 1 as the positive (severe) class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl Confusion {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn record(&mut self, truth: u32, predicted: u32) {
        match (truth == 1, predicted == 1) {
            (true, true) => self.tp += 1,
            (false, true) => self.fp += 1,
            (true, false) => self.fn_ += 1,
            (false, false) => self.tn += 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub confusion: Confusion,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Harmonic mean of precision and recall, 0 when both are 0.
pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

impl Metrics {
    pub fn from_confusion(c: Confusion) -> Self {
        let precision = ratio(c.tp, c.tp + c.fp);
        let recall = ratio(c.tp, c.tp + c.fn_);
        Metrics {
            accuracy: ratio(c.tp + c.tn, c.total()),
            precision,
            recall,
            f1: f1_score(precision, recall),
            confusion: c,
        }
    }
}

pub fn evaluate(model: &Ensemble, test: &Dataset) -> Result<Metrics, TrainError> {
    if test.is_empty() {
        return Err(TrainError::Empty);
    }
    let dims = model.n_features().max(test.n_features);
    let mut c = Confusion::default();
    for ex in &test.examples {
        let p = model.predict(&ex.dense(dims))?;
        c.record(ex.label, p.label);
    }
    Ok(Metrics::from_confusion(c))
}
