//! Gradient-ascent and best-response learning on the single-chain contest.
//!
//! Both rules update all miners synchronously from the pre-step state. The
//! raw update formulas can drive allocations negative, so every step clamps
//! at zero: allocations are physical resources. A fully collapsed state
//! (everyone at zero) is absorbing inside a simulation run.

mod bifurcation;

pub use bifurcation::{
    bifurcation_scan, BifurcationScan, ScanAxis, ScanSummary, DISTINCT_RESOLUTION,
};

use crate::game::{AllocationVector, GameError, MiningGame};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DynamicsError {
    #[error("gradient step undefined at zero aggregate allocation")]
    ZeroAggregate,
    #[error("learning rate of miner {index} must be strictly positive, got {value}")]
    NonPositiveLearningRate { index: usize, value: f64 },
    #[error("expected {expected} learning rates, got {got}")]
    LearningRateCount { expected: usize, got: usize },
    #[error("initial allocation has length {got}, expected {expected}")]
    InitLength { expected: usize, got: usize },
    #[error("scan grid needs at least 2 monotone parameter values")]
    BadGrid,
    #[error(transparent)]
    Game(#[from] GameError),
}

/// Which update rule a simulation runs.
#[derive(Debug, Clone, PartialEq)]
pub enum UpdateRule {
    /// `x_i <- x_i + theta_i * dPi_i/dx_i`, clamped at zero.
    GradientAscent { learning_rates: Vec<f64> },
    /// `x_i <- max(0, sqrt(v X_-i / c_i) - X_-i)`.
    BestResponse,
}

/// A complete simulation request: rule, game, start, length and the burn-in
/// used by scans built on top of it.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicsConfig {
    pub rule: UpdateRule,
    pub game: MiningGame,
    pub init: AllocationVector,
    /// Recorded steps; a trace has `steps + 1` states including the start.
    pub steps: usize,
    /// Steps discarded before sampling in bifurcation scans.
    pub burn_in: usize,
}

impl DynamicsConfig {
    pub fn new(
        rule: UpdateRule,
        game: MiningGame,
        init: AllocationVector,
        steps: usize,
        burn_in: usize,
    ) -> Result<Self, DynamicsError> {
        if init.len() != game.n() {
            return Err(DynamicsError::InitLength {
                expected: game.n(),
                got: init.len(),
            });
        }
        if let UpdateRule::GradientAscent { learning_rates } = &rule {
            if learning_rates.len() != game.n() {
                return Err(DynamicsError::LearningRateCount {
                    expected: game.n(),
                    got: learning_rates.len(),
                });
            }
            for (index, &theta) in learning_rates.iter().enumerate() {
                if !(theta.is_finite() && theta > 0.0) {
                    return Err(DynamicsError::NonPositiveLearningRate {
                        index,
                        value: theta,
                    });
                }
            }
        }
        Ok(Self {
            rule,
            game,
            init,
            steps,
            burn_in,
        })
    }

    /// Default interior start away from the fixed points: `0.1 / c_i`.
    pub fn default_init(game: &MiningGame) -> AllocationVector {
        AllocationVector::new(game.costs().iter().map(|c| 0.1 / c).collect())
            .expect("positive costs give positive start")
    }
}

/// One recorded trajectory: every state plus the aggregate path.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub states: Vec<AllocationVector>,
    pub aggregates: Vec<f64>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Plot-ready export with header `t,x_1,..,x_n,X`.
    pub fn to_csv(&self) -> String {
        let n = self.states.first().map_or(0, |s| s.len());
        let mut out = String::from("t");
        for i in 1..=n {
            out.push_str(&format!(",x_{i}"));
        }
        out.push_str(",X\n");
        for (t, state) in self.states.iter().enumerate() {
            out.push_str(&t.to_string());
            for &x in state.values() {
                out.push_str(&format!(",{x}"));
            }
            out.push_str(&format!(",{}\n", self.aggregates[t]));
        }
        out
    }
}

/// One synchronous gradient-ascent step, clamped at zero.
///
/// All gradients are evaluated at the pre-step state; fails when the
/// aggregate allocation is zero (the share gradient is undefined there).
pub fn ga_step(
    game: &MiningGame,
    x: &AllocationVector,
    learning_rates: &[f64],
) -> Result<AllocationVector, DynamicsError> {
    game.check_alloc(x)?;
    if learning_rates.len() != game.n() {
        return Err(DynamicsError::LearningRateCount {
            expected: game.n(),
            got: learning_rates.len(),
        });
    }
    if x.total() == 0.0 {
        return Err(DynamicsError::ZeroAggregate);
    }
    let next = (0..game.n())
        .map(|i| (x.get(i) + learning_rates[i] * game.utility_gradient(x, i)).max(0.0))
        .collect();
    Ok(AllocationVector::new(next)?)
}

/// One synchronous best-response step, clamped at zero.
pub fn br_step(game: &MiningGame, x: &AllocationVector) -> Result<AllocationVector, DynamicsError> {
    game.check_alloc(x)?;
    let v = game.reward();
    let next = (0..game.n())
        .map(|i| {
            let others = x.total() - x.get(i);
            ((v * others / game.cost(i)).sqrt() - others).max(0.0)
        })
        .collect();
    Ok(AllocationVector::new(next)?)
}

/// Runs the configured rule for `steps` iterations and records every state.
///
/// Deterministic: identical configs yield bit-identical traces. Once the
/// aggregate hits zero the collapsed state repeats for the rest of the trace
/// instead of erroring, so scans over aggressive parameters stay total.
pub fn simulate(config: &DynamicsConfig) -> Result<Trace, DynamicsError> {
    let mut states = Vec::with_capacity(config.steps + 1);
    let mut aggregates = Vec::with_capacity(config.steps + 1);
    let mut current = config.init.clone();
    states.push(current.clone());
    aggregates.push(current.total());
    for _ in 0..config.steps {
        let next = if current.total() == 0.0 {
            current.clone()
        } else {
            match &config.rule {
                UpdateRule::GradientAscent { learning_rates } => {
                    ga_step(&config.game, &current, learning_rates)?
                }
                UpdateRule::BestResponse => br_step(&config.game, &current)?,
            }
        };
        states.push(next.clone());
        aggregates.push(next.total());
        current = next;
    }
    Ok(Trace { states, aggregates })
}
