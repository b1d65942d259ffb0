use rayon::prelude::*;
use serde::Serialize;

use super::{evaluate, train_boosted, train_cart, Metrics, TrainError, TrainParams};
use crate::data::Dataset;
use crate::model::Ensemble;

pub const DEFAULT_DEPTHS: [usize; 3] = [3, 4, 5];
pub const DEFAULT_MIN_SAMPLES: [usize; 4] = [2, 10, 20, 50];

/// Which model family a grid trains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Learner {
    Cart,
    /// Boosted ensembles; `max_depth` and `min_samples_split` come from the grid.
    Boosted(TrainParams),
}

impl Learner {
    pub fn train(&self, train: &Dataset, params: &TrainParams) -> Result<Ensemble, TrainError> {
        match self {
            Learner::Cart => Ok(Ensemble::from_classifier(
                train_cart(train, params)?,
                train.n_features,
            )?),
            Learner::Boosted(_) => train_boosted(train, params),
        }
    }

    fn params(&self, max_depth: usize, min_samples_split: usize) -> TrainParams {
        match self {
            Learner::Cart => TrainParams::tree(max_depth, min_samples_split),
            Learner::Boosted(base) => TrainParams {
                max_depth,
                min_samples_split,
                ..*base
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GridCell {
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub metrics: Metrics,
}

#[derive(Debug, Clone)]
pub struct GridResult {
    pub best_model: Ensemble,
    pub best_params: TrainParams,
    pub best_metrics: Metrics,
    pub cells: Vec<GridCell>,
}

/// Index of the winning cell: highest F1, then lower depth, then smaller
/// `min_samples_split`. Earlier cells win remaining exact ties.
pub fn select_best(cells: &[GridCell]) -> Option<usize> {
    let key = |c: &GridCell| (c.max_depth, c.min_samples_split);
    let mut best: Option<usize> = None;
    for (i, c) in cells.iter().enumerate() {
        best = match best {
            None => Some(i),
            Some(b) => {
                let cur = &cells[b];
                let better = c.metrics.f1 > cur.metrics.f1
                    || (c.metrics.f1 == cur.metrics.f1 && key(c) < key(cur));
                Some(if better { i } else { b })
            }
        };
    }
    best
}

/// Trains every `(depth, min_samples)` cell, scores it on `test` and keeps
/// the best by [`select_best`].
pub fn grid_search(
    train: &Dataset,
    test: &Dataset,
    depths: &[usize],
    min_samples: &[usize],
    learner: Learner,
) -> Result<GridResult, TrainError> {
    if depths.is_empty() || min_samples.is_empty() {
        return Err(TrainError::EmptyGrid);
    }
    let grid: Vec<(usize, usize)> = depths
        .iter()
        .flat_map(|&d| min_samples.iter().map(move |&m| (d, m)))
        .collect();
    let trained: Vec<(Ensemble, GridCell)> = grid
        .par_iter()
        .map(|&(max_depth, min_samples_split)| {
            let wrap = |e: TrainError| TrainError::Cell {
                max_depth,
                min_samples_split,
                source: Box::new(e),
            };
            let params = learner.params(max_depth, min_samples_split);
            let model = learner.train(train, &params).map_err(wrap)?;
            let metrics = evaluate(&model, test).map_err(wrap)?;
            Ok((
                model,
                GridCell {
                    max_depth,
                    min_samples_split,
                    metrics,
                },
            ))
        })
        .collect::<Result<_, TrainError>>()?;
    let cells: Vec<GridCell> = trained.iter().map(|(_, c)| c.clone()).collect();
    let best = select_best(&cells).expect("nonempty grid");
    let (model, cell) = trained.into_iter().nth(best).expect("index in range");
    Ok(GridResult {
        best_params: learner.params(cell.max_depth, cell.min_samples_split),
        best_metrics: cell.metrics,
        best_model: model,
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::training::Confusion;

    fn cell(depth: usize, min: usize, f1: f64) -> GridCell {
        GridCell {
            max_depth: depth,
            min_samples_split: min,
            metrics: Metrics {
                f1,
                accuracy: 0.0,
                precision: 0.0,
                recall: 0.0,
                confusion: Confusion::default(),
            },
        }
    }

    #[test]
    fn f1_tie_prefers_lower_depth() {
        let cells = [cell(5, 2, 0.5), cell(3, 2, 0.5)];
        assert_eq!(select_best(&cells), Some(1));
    }

    #[test]
    fn strict_max_wins() {
        let cells = [cell(3, 2, 0.4), cell(4, 2, 0.6)];
        assert_eq!(select_best(&cells), Some(1));
    }

    #[test]
    fn secondary_tie_on_min_samples() {
        let cells = [cell(3, 20, 0.5), cell(3, 10, 0.5), cell(4, 2, 0.5)];
        assert_eq!(select_best(&cells), Some(1));
    }

    #[test]
    fn single_cell() {
        assert_eq!(select_best(&[cell(4, 50, 0.1)]), Some(0));
        assert_eq!(select_best(&[]), None);
    }
}
