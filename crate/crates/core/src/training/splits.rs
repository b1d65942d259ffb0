//! Exhaustive axis-aligned split search shared by both learners.

/// Sufficient statistics of a set of rows, updatable one row at a time.
pub(crate) trait SplitStats: Clone {
    fn add(&mut self, row: usize);
    fn remove(&mut self, row: usize);
}

pub(crate) struct Split {
    pub feature: usize,
    pub threshold: f64,
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

/// Midpoint of two consecutive distinct sorted values, kept in `[lo, hi)`
/// so that `lo` routes left and `hi` routes right.
pub(crate) fn midpoint(lo: f64, hi: f64) -> f64 {
    let mid = (lo + hi) / 2.0;
    if lo <= mid && mid < hi {
        mid
    } else {
        lo
    }
}

/// Best split of `rows` by `gain(left, right)`, considering thresholds at
/// midpoints between consecutive distinct values. Only strictly positive
/// gains qualify; exact ties keep the lowest feature, then the lowest
/// threshold.
pub(crate) fn best_split<S: SplitStats>(
    x: &[Vec<f64>],
    rows: &[usize],
    n_features: usize,
    empty: &S,
    total: &S,
    gain: impl Fn(&S, &S) -> f64,
) -> Option<Split> {
    let mut best: Option<(usize, f64, f64)> = None;
    let mut sorted = rows.to_vec();
    for f in 0..n_features {
        sorted.sort_by(|&a, &b| x[a][f].total_cmp(&x[b][f]));
        let mut left = empty.clone();
        let mut right = total.clone();
        for k in 0..sorted.len().saturating_sub(1) {
            let row = sorted[k];
            left.add(row);
            right.remove(row);
            let (lo, hi) = (x[row][f], x[sorted[k + 1]][f]);
            if lo == hi {
                continue;
            }
            let g = gain(&left, &right);
            if g > best.map_or(0.0, |b| b.2) {
                best = Some((f, midpoint(lo, hi), g));
            }
        }
    }
    let (feature, threshold, _) = best?;
    let (left, right) = rows.iter().partition(|&&r| x[r][feature] <= threshold);
    Some(Split {
        feature,
        threshold,
        left,
        right,
    })
}
