//! CART and Newton-boosted tree training, evaluation metrics and grid search.

mod boost;
mod cart;
mod grid;
mod metrics;
mod splits;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::ModelError;

pub use boost::train_boosted;
pub use cart::train_cart;
pub use grid::{grid_search, select_best, GridCell, GridResult, Learner, DEFAULT_DEPTHS, DEFAULT_MIN_SAMPLES};
pub use metrics::{evaluate, f1_score, Confusion, Metrics};

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("training or evaluation set is empty")]
    Empty,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("label {0} is not binary (expected 0 or 1)")]
    NonBinary(u32),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("grid cell max_depth={max_depth} min_samples_split={min_samples_split}: {source}")]
    Cell {
        max_depth: usize,
        min_samples_split: usize,
        #[source]
        source: Box<TrainError>,
    },
    #[error("grid is empty")]
    EmptyGrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainParams {
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub n_rounds: usize,
    pub learning_rate: f64,
    pub l2_reg: f64,
}

impl Default for TrainParams {
    fn default() -> Self {
        TrainParams {
            max_depth: 3,
            min_samples_split: 2,
            n_rounds: 20,
            learning_rate: 0.3,
            l2_reg: 1.0,
        }
    }
}

impl TrainParams {
    pub fn tree(max_depth: usize, min_samples_split: usize) -> Self {
        TrainParams {
            max_depth,
            min_samples_split,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), TrainError> {
        let bad = |m: &str| Err(TrainError::InvalidParams(m.into()));
        if self.max_depth < 1 {
            return bad("max_depth must be at least 1");
        }
        if self.min_samples_split < 2 {
            return bad("min_samples_split must be at least 2");
        }
        if self.n_rounds < 1 {
            return bad("n_rounds must be at least 1");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return bad("learning_rate must lie in (0, 1]");
        }
        if !(self.l2_reg >= 0.0) {
            return bad("l2_reg must be non-negative");
        }
        Ok(())
    }
}

fn check_binary(labels: &[u32]) -> Result<(), TrainError> {
    match labels.iter().find(|&&l| l > 1) {
        Some(&l) => Err(TrainError::NonBinary(l)),
        None => Ok(()),
    }
}
