//! Certified robustness bounds for decision trees and tree ensembles.
//!
//! The crate covers the full pipeline: crash-record unification into LIBSVM
//! datasets ([`data`]), CART and boosted-tree training with grid search
//! ([`training`]), rule extraction from classifier trees ([`rules`]), and
//! L-infinity robustness certification ([`verify`]).

pub mod model;
pub mod data;
pub mod training;
pub mod verify;
pub mod rules;
pub mod config;
pub mod cli;
