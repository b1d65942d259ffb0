use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Verifier, VerifyError, VerifyParams};
use crate::data::Dataset;
use crate::model::{Ensemble, Label};

pub const DEFAULT_NUM_POINTS: usize = 1000;

/// Certified radius for one example.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub index: usize,
    /// Clean prediction equals the label.
    pub correct: bool,
    /// Largest radius verified; 0 when none was.
    pub lower_bound: f64,
    pub verified_at_eps_init: bool,
    #[serde(skip)]
    pub searches_used: usize,
}

/// Searches for the largest radius at which [`Verifier::verify_at`] holds,
/// spending at most `max_search` checks.
///
/// The first check is at `eps_init`. From there the radius doubles while
/// robust (or halves while not) until the outcome flips, and the bracket is
/// then bisected with whatever budget is left.
pub fn certify_example(
    verifier: &Verifier<'_>,
    index: usize,
    x: &[f64],
    y0: Label,
    params: &VerifyParams,
) -> Result<Certificate, VerifyError> {
    params.validate()?;
    if verifier.ensemble().predict(x)?.label != y0 {
        return Ok(Certificate {
            index,
            correct: false,
            lower_bound: 0.0,
            verified_at_eps_init: false,
            searches_used: 0,
        });
    }
    let mut used = 0;
    let mut check = |eps: f64| -> Result<bool, VerifyError> {
        used += 1;
        verifier.verify_at(x, y0, eps, params)
    };

    let at_init = check(params.eps_init)?;
    let budget = params.max_search;
    let mut calls = 1;
    // `lo` is the largest verified radius, `hi` the smallest refuted one.
    let (mut lo, mut hi) = if at_init {
        (Some(params.eps_init), None)
    } else {
        (None, Some(params.eps_init))
    };
    while calls < budget {
        let eps = match (lo, hi) {
            (Some(l), None) => 2.0 * l,
            (None, Some(h)) => h / 2.0,
            (Some(l), Some(h)) => l + (h - l) / 2.0,
            (None, None) => unreachable!(),
        };
        calls += 1;
        if check(eps)? {
            lo = Some(eps);
        } else {
            hi = Some(eps);
        }
    }
    Ok(Certificate {
        index,
        correct: true,
        lower_bound: lo.unwrap_or(0.0),
        verified_at_eps_init: at_init,
        searches_used: used,
    })
}

/// Dataset-level verification summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub params: VerifyParams,
    pub num_points: usize,
    /// Mean certified radius.
    pub average_bound: f64,
    /// Share of points misclassified or not verified at `eps_init`.
    pub verified_error: f64,
    pub certificates: Vec<Certificate>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn summary(&self) -> String {
        format!(
            "avg bound = {:.4}, verified error = {:.4}",
            self.average_bound, self.verified_error
        )
    }
}

/// Certifies the first `num_points` examples in file order.
pub fn run_verification(
    ensemble: &Ensemble,
    dataset: &Dataset,
    params: &VerifyParams,
    num_points: usize,
) -> Result<Report, VerifyError> {
    params.validate()?;
    if dataset.is_empty() {
        return Err(VerifyError::EmptyDataset);
    }
    if num_points == 0 {
        return Err(VerifyError::InvalidParams("num_points must be at least 1".into()));
    }
    let n = num_points.min(dataset.len());
    let dims = ensemble.n_features().max(dataset.n_features);
    let verifier = Verifier::new(ensemble);
    let certificates: Vec<Certificate> = dataset.examples[..n]
        .par_iter()
        .enumerate()
        .map(|(i, ex)| certify_example(&verifier, i, &ex.dense(dims), ex.label, params))
        .collect::<Result<_, _>>()?;
    let total: f64 = certificates.iter().map(|c| c.lower_bound).sum();
    let failures = certificates
        .iter()
        .filter(|c| !c.correct || !c.verified_at_eps_init)
        .count();
    Ok(Report {
        params: *params,
        num_points: n,
        average_bound: total / n as f64,
        verified_error: failures as f64 / n as f64,
        certificates,
    })
}
