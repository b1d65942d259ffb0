//! Certified L-infinity robustness for trees and tree ensembles.
//!
//! For a single classifier tree the minimal adversarial perturbation is exact:
//! it is the smallest distance from the input to the box of any leaf with a
//! different label. For additive ensembles the problem is hard, so
//! [`ensemble_margin_bound`] computes a sound lower bound on the worst-case
//! margin inside a ball by merging reachable leaves of neighbouring trees into
//! cliques of pairwise-consistent boxes, and [`certify_example`] searches
//! for the largest radius at which that bound stays positive.
//!
//! Margins are oriented so that positive means "still predicts `y0`":
//! the raw score when `y0 = 1`, its negation when `y0 = 0`. Classifier
//! leaves count +1 when they carry `y0` and -1 otherwise.

mod clique;
mod exact;
pub mod oracle;
mod perturbation;
mod search;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::model::ModelError;

pub use clique::{ensemble_margin_bound, reachable_leaves, verify_at, PseudoNode, Verifier};
pub use exact::verify_tree_exact;
pub use oracle::brute_force_rstar;
pub use perturbation::{leaf_perturbation, linf_distance};
pub use search::{certify_example, run_verification, Certificate, Report, DEFAULT_NUM_POINTS};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("cannot compute a perturbation to an empty box")]
    EmptyBox,
    #[error("tree {0} has no leaf within the perturbation ball")]
    NoReachableLeaf(usize),
    #[error("ensemble margins need a binary label, got {0}")]
    NonBinaryLabel(u32),
    #[error("invalid verification parameters: {0}")]
    InvalidParams(String),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("oracle refuses {tuples} leaf tuples (cap {cap})")]
    OracleCap { tuples: u128, cap: u128 },
}

/// Knobs of the bound and of the radius search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyParams {
    /// First radius probed; also the radius behind the verified error.
    pub eps_init: f64,
    /// Budget of robustness checks per example, including the first probe.
    pub max_search: usize,
    /// Number of clique-merging rounds.
    pub max_level: usize,
    /// Parts merged per group in each round.
    pub max_clique: usize,
    /// Chain dynamic program instead of independent per-part minima.
    #[serde(serialize_with = "flag_as_int", deserialize_with = "flag_from_int")]
    pub dp: bool,
}

impl Default for VerifyParams {
    fn default() -> Self {
        VerifyParams {
            eps_init: 0.3,
            max_search: 10,
            max_level: 1,
            max_clique: 2,
            dp: false,
        }
    }
}

impl VerifyParams {
    pub fn validate(&self) -> Result<(), VerifyError> {
        let bad = |m: &str| Err(VerifyError::InvalidParams(m.into()));
        if !(self.eps_init > 0.0 && self.eps_init.is_finite()) {
            return bad("eps_init must be a positive finite number");
        }
        if self.max_search < 1 {
            return bad("max_search must be at least 1");
        }
        if self.max_level < 1 {
            return bad("max_level must be at least 1");
        }
        if self.max_clique < 2 {
            return bad("max_clique must be at least 2");
        }
        Ok(())
    }
}

pub(crate) fn flag_as_int<S: Serializer>(flag: &bool, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_u8(u8::from(*flag))
}

pub(crate) fn flag_from_int<'de, D: Deserializer<'de>>(d: D) -> Result<bool, D::Error> {
    match u8::deserialize(d)? {
        0 => Ok(false),
        1 => Ok(true),
        other => Err(serde::de::Error::custom(format!("dp must be 0 or 1, got {other}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_validation() {
        let p = VerifyParams::default();
        assert_eq!((p.eps_init, p.max_search, p.max_level, p.max_clique, p.dp), (0.3, 10, 1, 2, false));
        assert!(p.validate().is_ok());
        for bad in [
            VerifyParams { eps_init: 0.0, ..p },
            VerifyParams { eps_init: f64::INFINITY, ..p },
            VerifyParams { max_search: 0, ..p },
            VerifyParams { max_level: 0, ..p },
            VerifyParams { max_clique: 1, ..p },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn dp_flag_is_an_integer_on_the_wire() {
        let json = serde_json::to_string(&VerifyParams { dp: true, ..Default::default() }).unwrap();
        assert!(json.contains("\"dp\":1"));
        let back: VerifyParams = serde_json::from_str(&json).unwrap();
        assert!(back.dp);
        assert!(serde_json::from_str::<VerifyParams>(&json.replace("\"dp\":1", "\"dp\":2")).is_err());
    }
}
