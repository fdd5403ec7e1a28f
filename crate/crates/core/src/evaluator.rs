//! Named SER evaluation strategies.
//!
//! Every way of producing a network SER (closed forms, quadrature, simulation)
//! implements [`SerEvaluator`]. An [`EvaluatorRegistry`] maps names to boxed
//! evaluators so front ends can pick one from configuration at run time.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::analytic::{total_ser_with, ErrorIntegrals, IidLauricella, Lauricella, NetworkScenario, ThetaQuadrature};
use crate::error::{Error, Result};
use crate::mcsim::{simulate, Fading};

/// Inputs that only stochastic evaluators consume.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalContext {
    pub trials: u64,
    pub seed: u64,
}

impl Default for EvalContext {
    fn default() -> Self {
        EvalContext {
            trials: 1_000_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub ser: f64,
    /// Binomial standard error; `None` for deterministic evaluators.
    pub std_error: Option<f64>,
    pub trials: Option<u64>,
}

pub trait SerEvaluator: Send + Sync {
    fn name(&self) -> &str;
    fn evaluate(&self, scenario: &NetworkScenario, ctx: &EvalContext) -> Result<Evaluation>;
    /// Whether the result depends on `ctx.seed`.
    fn is_stochastic(&self) -> bool {
        false
    }
}

/// Exact state enumeration with a given route for the error integrals.
pub struct StateSum<I> {
    integrals: I,
}

impl<I: ErrorIntegrals> StateSum<I> {
    pub fn new(integrals: I) -> Self {
        StateSum { integrals }
    }
}

impl<I: ErrorIntegrals> SerEvaluator for StateSum<I> {
    fn name(&self) -> &str {
        self.integrals.name()
    }
    fn evaluate(&self, scenario: &NetworkScenario, _ctx: &EvalContext) -> Result<Evaluation> {
        let b = total_ser_with(&self.integrals, scenario)?;
        Ok(Evaluation {
            ser: b.total,
            std_error: None,
            trials: None,
        })
    }
}

/// Link-level simulation under Hoyt fading.
#[derive(Debug, Clone, Copy, Default)]
pub struct MonteCarlo;

impl SerEvaluator for MonteCarlo {
    fn name(&self) -> &str {
        "monte-carlo"
    }
    fn evaluate(&self, scenario: &NetworkScenario, ctx: &EvalContext) -> Result<Evaluation> {
        let e = simulate(scenario, ctx.trials, ctx.seed, Fading::Hoyt)?.estimate();
        Ok(Evaluation {
            ser: e.ser,
            std_error: Some(e.std_error),
            trials: Some(e.trials),
        })
    }
    fn is_stochastic(&self) -> bool {
        true
    }
}

#[derive(Clone, Default)]
pub struct EvaluatorRegistry {
    entries: BTreeMap<String, Arc<dyn SerEvaluator>>,
}

impl std::fmt::Debug for EvaluatorRegistry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.entries.keys()).finish()
    }
}

impl EvaluatorRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// `lauricella`, `lauricella-iid`, `quadrature` and `monte-carlo`.
    pub fn with_defaults() -> Self {
        let mut r = Self::new();
        r.register(Arc::new(StateSum::new(Lauricella)));
        r.register(Arc::new(StateSum::new(IidLauricella)));
        r.register(Arc::new(StateSum::new(ThetaQuadrature)));
        r.register(Arc::new(MonteCarlo));
        r
    }

    /// Adds `evaluator` under its own name, returning any evaluator it displaced.
    pub fn register(&mut self, evaluator: Arc<dyn SerEvaluator>) -> Option<Arc<dyn SerEvaluator>> {
        self.entries.insert(evaluator.name().to_owned(), evaluator)
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn SerEvaluator>> {
        self.entries.get(name).cloned().ok_or_else(|| {
            Error::domain(format!(
                "unknown evaluator `{name}` (available: {})",
                self.names().join(", ")
            ))
        })
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.keys().map(String::as_str).collect()
    }
}
