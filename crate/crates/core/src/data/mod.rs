//! Datasets: LIBSVM files, crash-record unification and encoding.

mod encode;
mod libsvm;
mod unify;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::Label;

pub use encode::{encode_dataset, split_train_test, LabelRule, DEFAULT_TRAIN_FRACTION};
pub use libsvm::{export_libsvm, parse_libsvm};
pub use unify::{
    bundled_arizona_collision, bundled_maryland_collision, load_unification_maps, normalize_category,
    read_raw_records, unify_record, AuditEntry, Cell, RawRecord, UnificationMap, UnifiedRecord,
    Unification,
};

#[derive(Debug, Error)]
pub enum DataError {
    #[error("libsvm line {line}: {message}")]
    Libsvm { line: usize, message: String },
    #[error("mapping spec: {0}")]
    Mapping(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("unknown column `{column}` (record {row})")]
    UnknownColumn { column: String, row: usize },
    #[error("record {row}, column `{column}`: `{value}` is not numeric")]
    NotNumeric {
        row: usize,
        column: String,
        value: String,
    },
    #[error("dataset is empty")]
    Empty,
    #[error("train fraction {0} must lie strictly between 0 and 1")]
    BadFraction(f64),
}

/// One sparse sample. Absent indices read as zero.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Example {
    pub features: BTreeMap<usize, f64>,
    pub label: Label,
}

impl Example {
    pub fn new(label: Label, features: impl IntoIterator<Item = (usize, f64)>) -> Self {
        Example {
            features: features.into_iter().collect(),
            label,
        }
    }

    pub fn value(&self, index: usize) -> f64 {
        self.features.get(&index).copied().unwrap_or(0.0)
    }

    /// Dense copy of length `dims`; indices at or past `dims` are dropped.
    pub fn dense(&self, dims: usize) -> Vec<f64> {
        let mut out = vec![0.0; dims];
        for (&i, &v) in &self.features {
            if i < dims {
                out[i] = v;
            }
        }
        out
    }

    /// One past the largest stored index.
    pub fn width(&self) -> usize {
        self.features.keys().next_back().map_or(0, |i| i + 1)
    }
}

/// Ordered examples over `n_features` dimensions.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub examples: Vec<Example>,
    pub n_features: usize,
    pub schema: Option<Vec<String>>,
}

impl Dataset {
    pub fn new(examples: Vec<Example>, n_features: usize) -> Self {
        let width = examples.iter().map(Example::width).max().unwrap_or(0);
        Dataset {
            examples,
            n_features: n_features.max(width),
            schema: None,
        }
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    /// Row-major dense matrix and label vector.
    pub fn dense(&self) -> (Vec<Vec<f64>>, Vec<Label>) {
        self.examples
            .iter()
            .map(|e| (e.dense(self.n_features), e.label))
            .unzip()
    }

    pub(crate) fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            examples: indices.iter().map(|&i| self.examples[i].clone()).collect(),
            n_features: self.n_features,
            schema: self.schema.clone(),
        }
    }
}
