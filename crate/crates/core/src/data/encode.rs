use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::unify::{normalize_category, Cell, UnifiedRecord};
use super::{DataError, Dataset, Example};

/// Fraction of rows used for training unless configured otherwise.
pub const DEFAULT_TRAIN_FRACTION: f64 = 0.2;

/// Binary severity label: 1 iff the column's value is one of `positive`
/// (compared after category normalization).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelRule {
    pub column: String,
    pub positive: Vec<String>,
}

impl LabelRule {
    fn holds(&self, value: &str) -> bool {
        let v = normalize_category(value);
        self.positive.iter().any(|p| normalize_category(p) == v)
    }
}

/// Lays unified records out as examples in `feature_order`.
///
/// Coded columns contribute their code; pass-through columns must be numeric.
pub fn encode_dataset(
    records: &[UnifiedRecord],
    feature_order: &[String],
    label_rule: &LabelRule,
) -> Result<Dataset, DataError> {
    let mut examples = Vec::with_capacity(records.len());
    for (row, rec) in records.iter().enumerate() {
        let mut ex = Example::default();
        for (i, col) in feature_order.iter().enumerate() {
            let cell = rec.get(col).ok_or_else(|| DataError::UnknownColumn {
                column: col.clone(),
                row,
            })?;
            let v = match cell {
                Cell::Code(c) => *c as f64,
                Cell::Raw(s) => {
                    let t = s.trim();
                    let parsed = if t.is_empty() { Ok(0.0) } else { t.parse::<f64>() };
                    match parsed {
                        Ok(v) if v.is_finite() => v,
                        _ => {
                            return Err(DataError::NotNumeric {
                                row,
                                column: col.clone(),
                                value: s.clone(),
                            })
                        }
                    }
                }
            };
            if v != 0.0 {
                ex.features.insert(i, v);
            }
        }
        let label_cell = rec.get(&label_rule.column).ok_or_else(|| DataError::UnknownColumn {
            column: label_rule.column.clone(),
            row,
        })?;
        ex.label = match label_cell {
            Cell::Raw(s) => u32::from(label_rule.holds(s)),
            Cell::Code(c) => u32::from(label_rule.holds(&c.to_string())),
        };
        examples.push(ex);
    }
    let mut ds = Dataset::new(examples, feature_order.len());
    ds.schema = Some(feature_order.to_vec());
    Ok(ds)
}

/// Seeded shuffle split into `floor(n * train_fraction)` training rows and
/// the rest for testing. Each side keeps source order.
pub fn split_train_test(
    dataset: &Dataset,
    train_fraction: f64,
    seed: u64,
) -> Result<(Dataset, Dataset), DataError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(DataError::BadFraction(train_fraction));
    }
    if dataset.is_empty() {
        return Err(DataError::Empty);
    }
    let n = dataset.len();
    let n_train = (n as f64 * train_fraction).floor() as usize;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (train, test) = order.split_at_mut(n_train);
    train.sort_unstable();
    test.sort_unstable();
    Ok((dataset.subset(train), dataset.subset(test)))
}
