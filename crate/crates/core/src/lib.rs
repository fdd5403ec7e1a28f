//! Symbol-error-rate analysis of multi-relay decode-and-forward networks with
//! square M-QAM over Nakagami-q (Hoyt) fading.
//!
//! Two independent routes are provided: exact expressions built on the
//! Lauricella `F_D` function ([`analytic`]) and a link-level Monte Carlo
//! simulator ([`mcsim`]). Both sit behind the [`evaluator::SerEvaluator`]
//! trait and can be selected by name from an [`evaluator::EvaluatorRegistry`].

pub mod analytic;
pub mod channel;
pub mod error;
pub mod evaluator;
pub mod mcsim;
pub mod specfun;
pub mod validate;

pub use error::{Error, Result};
