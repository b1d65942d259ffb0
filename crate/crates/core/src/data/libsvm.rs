//! `label idx:val idx:val ...` with 1-based, strictly ascending indices.

use std::fmt::Write;

use super::{DataError, Dataset, Example};
use crate::model::Label;

fn parse_label(token: &str, line: usize) -> Result<Label, DataError> {
    let bad = || DataError::Libsvm {
        line,
        message: format!("bad label `{token}`"),
    };
    let v: f64 = token.parse().map_err(|_| bad())?;
    if v.fract() != 0.0 {
        return Err(bad());
    }
    // Binary LIBSVM files often use -1/+1.
    if v == -1.0 {
        return Ok(0);
    }
    if v < 0.0 || v > u32::MAX as f64 {
        return Err(bad());
    }
    Ok(v as Label)
}

/// Parses LIBSVM text into a dataset with 0-based feature indices.
///
/// `n_features` overrides the width inferred from the largest index when
/// it is larger. Blank lines and `#` comments are skipped.
pub fn parse_libsvm(text: &str, n_features: Option<usize>) -> Result<Dataset, DataError> {
    let mut examples = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let label = parse_label(tokens.next().expect("nonempty line"), line)?;
        let mut example = Example {
            label,
            ..Default::default()
        };
        let mut last: Option<usize> = None;
        for tok in tokens {
            let err = |message: String| DataError::Libsvm { line, message };
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| err(format!("expected idx:val, got `{tok}`")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| err(format!("bad index `{idx}`")))?;
            if idx == 0 {
                return Err(err("indices are 1-based".into()));
            }
            let val: f64 = val
                .parse()
                .map_err(|_| err(format!("bad value `{val}`")))?;
            if !val.is_finite() {
                return Err(err(format!("non-finite value `{val}`")));
            }
            if let Some(prev) = last {
                if idx <= prev {
                    return Err(err(format!(
                        "index {idx} after {prev}: indices must be strictly ascending"
                    )));
                }
            }
            last = Some(idx);
            example.features.insert(idx - 1, val);
        }
        examples.push(example);
    }
    Ok(Dataset::new(examples, n_features.unwrap_or(0)))
}

/// Writes a dataset back out; zero values are omitted.
pub fn export_libsvm(dataset: &Dataset) -> String {
    let mut out = String::new();
    for ex in &dataset.examples {
        write!(out, "{}", ex.label).unwrap();
        for (&i, &v) in &ex.features {
            if v != 0.0 {
                write!(out, " {}:{}", i + 1, v).unwrap();
            }
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basic_line() {
        let ds = parse_libsvm("1 1:0.5 3:2.0", None).unwrap();
        assert_eq!(ds.examples, vec![Example::new(1, [(0, 0.5), (2, 2.0)])]);
        assert_eq!(ds.n_features, 3);
    }

    #[test]
    fn label_only_line() {
        let ds = parse_libsvm("0\n", None).unwrap();
        assert_eq!(ds.examples, vec![Example::new(0, [])]);
    }

    #[test]
    fn descending_index_rejected() {
        match parse_libsvm("0 1:1\n1 2:1 1:1", None) {
            Err(DataError::Libsvm { line: 2, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_libsvm("1 2:1 2:3", None).is_err());
        assert!(parse_libsvm("1 a:1", None).is_err());
        assert!(parse_libsvm("x 1:1", None).is_err());
        assert!(parse_libsvm("1 1:nan", None).is_err());
    }

    #[test]
    fn width_override_and_signed_labels() {
        let ds = parse_libsvm("-1 2:1\n+1 1:3", Some(10)).unwrap();
        assert_eq!(ds.n_features, 10);
        assert_eq!(ds.examples[0].label, 0);
        assert_eq!(ds.examples[1].label, 1);
    }

    #[test]
    fn export_drops_zeros() {
        let ds = Dataset::new(vec![Example::new(1, [(0, 0.0), (4, 1.5)])], 5);
        assert_eq!(export_libsvm(&ds), "1 5:1.5\n");
        assert_eq!(export_libsvm(&Dataset::default()), "");
        let back = parse_libsvm("1 1:0.5 3:2.0", None).unwrap();
        assert_eq!(parse_libsvm(&export_libsvm(&back), None).unwrap(), back);
    }

    fn arb_example() -> impl Strategy<Value = Example> {
        (
            0u32..3,
            proptest::collection::btree_map(0usize..40, -1e6f64..1e6, 0..8),
        )
            .prop_map(|(label, mut features)| {
                features.retain(|_, v| *v != 0.0);
                Example { features, label }
            })
    }

    proptest! {
        #[test]
        fn round_trip(examples in proptest::collection::vec(arb_example(), 0..20)) {
            let ds = Dataset::new(examples, 40);
            let back = parse_libsvm(&export_libsvm(&ds), Some(40)).unwrap();
            prop_assert_eq!(back, ds);
        }
    }
}
