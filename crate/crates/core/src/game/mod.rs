//! Strategic mining contest on a single chain.
//!
//! Miners simultaneously commit resources `x_i >= 0` at per-unit cost `c_i`
//! and split a total reward `v` in proportion to their share of the aggregate.
//! This module provides the closed-form Nash allocation together with the
//! griefing-factor analysis built on top of it: who can harm whom by
//! over-committing resources, at what cost, and which allocation profile is
//! immune to that attack.

mod analysis;
mod griefing;

pub use analysis::{CostVarianceCheck, DeviationLimits, ExpenditureReport};
pub use griefing::{
    DeviationGrid, GriefabilityScan, GriefingReport, GriefingWitness, DEGENERATE_OWN_LOSS_TOL,
};

use thiserror::Error;

/// Errors raised by the strategic-game operations.
#[derive(Debug, Error, PartialEq)]
pub enum GameError {
    #[error("a mining game needs at least 2 miners, got {0}")]
    TooFewMiners(usize),
    #[error("cost of miner {index} must be strictly positive, got {value}")]
    NonPositiveCost { index: usize, value: f64 },
    #[error("total reward must be strictly positive, got {0}")]
    NonPositiveReward(f64),
    #[error("allocation vector has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("miner index {index} out of range for {n} miners")]
    MinerOutOfRange { index: usize, n: usize },
    #[error("allocation of miner {index} must be non-negative, got {value}")]
    NegativeAllocation { index: usize, value: f64 },
    #[error("participation constraint c_i < c* violated by miners {0:?}")]
    ParticipationViolated(Vec<usize>),
    #[error("auto-drop left fewer than 2 active miners")]
    NoActiveGame,
    #[error("deviation magnitude must be strictly positive, got {0}")]
    NonPositiveDelta(f64),
    #[error(
        "deviation changes the deviator's utility by only {own_loss:e}; griefing factor undefined"
    )]
    DegenerateDeviation { own_loss: f64 },
    #[error("deviation grid must contain at least one point per miner")]
    EmptyGrid,
}

/// How [`MiningGame::nash_allocation_with`] treats miners whose cost violates
/// the participation constraint `c_i < c*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParticipationMode {
    /// Fail with [`GameError::ParticipationViolated`] naming the offenders.
    Strict,
    /// Iteratively drop the costliest violating miner, recompute `c*` over
    /// the survivors and repeat. Dropped miners end up with allocation 0.
    AutoDrop,
}

/// A single-chain mining contest: per-unit costs and a total reward.
///
/// Costs are expressed in reward units per resource unit; the reward defaults
/// to 1 in the normalized presentation and all closed forms rescale with it.
#[derive(Debug, Clone, PartialEq)]
pub struct MiningGame {
    costs: Vec<f64>,
    reward: f64,
}

impl MiningGame {
    /// Builds a game with reward 1 (the normalized convention).
    pub fn normalized(costs: Vec<f64>) -> Result<Self, GameError> {
        Self::new(costs, 1.0)
    }

    pub fn new(costs: Vec<f64>, reward: f64) -> Result<Self, GameError> {
        if costs.len() < 2 {
            return Err(GameError::TooFewMiners(costs.len()));
        }
        if let Some((index, &value)) = costs
            .iter()
            .enumerate()
            .find(|(_, c)| !(c.is_finite() && **c > 0.0))
        {
            return Err(GameError::NonPositiveCost { index, value });
        }
        if !(reward.is_finite() && reward > 0.0) {
            return Err(GameError::NonPositiveReward(reward));
        }
        Ok(Self { costs, reward })
    }

    pub fn n(&self) -> usize {
        self.costs.len()
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn cost(&self, i: usize) -> f64 {
        self.costs[i]
    }

    pub fn reward(&self) -> f64 {
        self.reward
    }

    /// The participation threshold `c* = (1/(n-1)) * sum c_i`.
    ///
    /// Miner `i` is active at equilibrium exactly when `c_i < c*`.
    pub fn c_star(&self) -> f64 {
        let n = self.n();
        self.costs.iter().sum::<f64>() / (n as f64 - 1.0)
    }

    /// Payoff of miner `i`: proportional share of the reward minus linear cost.
    ///
    /// Equal to `(x_i / X) * v - c_i * x_i`; the all-zero profile is assigned
    /// utility 0 (share convention 0/0 := 0).
    pub fn utility(&self, alloc: &AllocationVector, i: usize) -> Result<f64, GameError> {
        self.check_alloc(alloc)?;
        self.check_miner(i)?;
        let x_i = alloc.get(i);
        let total = alloc.total();
        if total == 0.0 {
            return Ok(0.0);
        }
        Ok(x_i / total * self.reward - self.cost(i) * x_i)
    }

    /// Marginal payoff of miner `i` in `x_i`, used by the learning dynamics.
    pub(crate) fn utility_gradient(&self, alloc: &AllocationVector, i: usize) -> f64 {
        let total = alloc.total();
        let others = total - alloc.get(i);
        self.reward * others / (total * total) - self.cost(i)
    }

    /// Indices of miners whose cost violates the participation constraint.
    pub fn participation_violations(&self) -> Vec<usize> {
        let c_star = self.c_star();
        (0..self.n()).filter(|&i| self.cost(i) >= c_star).collect()
    }

    /// The unique pure-strategy Nash allocation `x*_i = v (1 - c_i/c*) / c*`.
    ///
    /// Requires the participation constraint to hold strictly for every miner;
    /// use [`Self::nash_allocation_with`] to auto-drop violators instead.
    pub fn nash_allocation(&self) -> Result<AllocationVector, GameError> {
        self.nash_allocation_with(ParticipationMode::Strict)
    }

    pub fn nash_allocation_with(
        &self,
        mode: ParticipationMode,
    ) -> Result<AllocationVector, GameError> {
        let active = self.active_set(mode)?;
        let c_star = active_c_star(&self.costs, &active);
        let x = (0..self.n())
            .map(|i| {
                if active[i] {
                    self.reward * (1.0 - self.cost(i) / c_star) / c_star
                } else {
                    0.0
                }
            })
            .collect();
        AllocationVector::new(x)
    }

    /// The scaled profile `y_i = n/(n-1) x*_i`, the unique solution of the
    /// aggregated no-griefing stationarity conditions.
    ///
    /// For homogeneous costs it coincides with the evolutionary stable
    /// allocation `v/(n c)` per miner and no individual griefing factor
    /// exceeds one; the same immunity holds in any two-miner game. With
    /// three or more miners of unequal cost, a below-average-cost miner can
    /// still push a rival's individual factor slightly above one here.
    pub fn non_griefable_allocation(&self) -> Result<AllocationVector, GameError> {
        let nash = self.nash_allocation()?;
        let n = self.n() as f64;
        let scale = n / (n - 1.0);
        AllocationVector::new(nash.values().iter().map(|x| scale * x).collect())
    }

    fn active_set(&self, mode: ParticipationMode) -> Result<Vec<bool>, GameError> {
        let violations = self.participation_violations();
        if violations.is_empty() {
            return Ok(vec![true; self.n()]);
        }
        match mode {
            ParticipationMode::Strict => Err(GameError::ParticipationViolated(violations)),
            ParticipationMode::AutoDrop => {
                let mut active = vec![true; self.n()];
                loop {
                    let violators: Vec<usize> = self.active_violators(&active);
                    if violators.is_empty() {
                        return Ok(active);
                    }
                    // The costliest violator is the costliest active miner.
                    let worst = violators
                        .into_iter()
                        .max_by(|&a, &b| self.cost(a).total_cmp(&self.cost(b)))
                        .expect("non-empty");
                    active[worst] = false;
                    if active.iter().filter(|a| **a).count() < 2 {
                        return Err(GameError::NoActiveGame);
                    }
                }
            }
        }
    }

    fn active_violators(&self, active: &[bool]) -> Vec<usize> {
        let c_star = active_c_star(&self.costs, active);
        (0..self.n())
            .filter(|&i| active[i] && self.cost(i) >= c_star)
            .collect()
    }

    pub(crate) fn check_alloc(&self, alloc: &AllocationVector) -> Result<(), GameError> {
        if alloc.len() != self.n() {
            return Err(GameError::DimensionMismatch {
                expected: self.n(),
                got: alloc.len(),
            });
        }
        Ok(())
    }

    pub(crate) fn check_miner(&self, i: usize) -> Result<(), GameError> {
        if i >= self.n() {
            return Err(GameError::MinerOutOfRange {
                index: i,
                n: self.n(),
            });
        }
        Ok(())
    }
}

fn active_c_star(costs: &[f64], active: &[bool]) -> f64 {
    let n_active = active.iter().filter(|a| **a).count();
    let sum: f64 = costs
        .iter()
        .zip(active)
        .filter(|(_, a)| **a)
        .map(|(c, _)| *c)
        .sum();
    sum / (n_active as f64 - 1.0)
}

/// A per-miner resource profile with its cached aggregate.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationVector {
    x: Vec<f64>,
    total: f64,
}

impl AllocationVector {
    pub fn new(x: Vec<f64>) -> Result<Self, GameError> {
        if let Some((index, &value)) = x
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(GameError::NegativeAllocation { index, value });
        }
        let total = x.iter().sum();
        Ok(Self { x, total })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.x[i]
    }

    pub fn values(&self) -> &[f64] {
        &self.x
    }

    /// Sum of all entries, computed left to right at construction.
    pub fn total(&self) -> f64 {
        self.total
    }

    /// Returns a copy with entry `i` replaced by `value`.
    pub fn with_entry(&self, i: usize, value: f64) -> Result<Self, GameError> {
        let mut x = self.x.clone();
        x[i] = value;
        Self::new(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn rejects_degenerate_games() {
        assert_eq!(
            MiningGame::normalized(vec![1.0]).unwrap_err(),
            GameError::TooFewMiners(1)
        );
        assert!(matches!(
            MiningGame::normalized(vec![1.0, 0.0]).unwrap_err(),
            GameError::NonPositiveCost { index: 1, .. }
        ));
        assert!(matches!(
            MiningGame::new(vec![1.0, 1.0], -2.0).unwrap_err(),
            GameError::NonPositiveReward(_)
        ));
    }

    #[test]
    fn utility_matches_hand_expression() {
        let game = MiningGame::normalized(vec![1.0, 1.0]).unwrap();
        let alloc = AllocationVector::new(vec![0.25, 0.25]).unwrap();
        // Independent spelling of the same payoff.
        let expected = 0.25 / (0.25 + 0.25) * 1.0 - 1.0 * 0.25;
        assert_eq!(game.utility(&alloc, 0).unwrap(), expected);
        assert_eq!(expected, 0.25);
    }

    #[test]
    fn utility_zero_conventions() {
        let game = MiningGame::normalized(vec![1.0, 1.0]).unwrap();
        let zeros = AllocationVector::new(vec![0.0, 0.0]).unwrap();
        assert_eq!(game.utility(&zeros, 0).unwrap(), 0.0);

        let game = MiningGame::normalized(vec![2.0, 1.0]).unwrap();
        let alloc = AllocationVector::new(vec![0.0, 0.5]).unwrap();
        assert_eq!(game.utility(&alloc, 0).unwrap(), 0.0);
    }

    #[test]
    fn utility_dimension_error() {
        let game = MiningGame::normalized(vec![1.0, 1.0]).unwrap();
        let alloc = AllocationVector::new(vec![0.1, 0.1, 0.1]).unwrap();
        assert_eq!(
            game.utility(&alloc, 0).unwrap_err(),
            GameError::DimensionMismatch {
                expected: 2,
                got: 3
            }
        );
    }

    #[test]
    fn c_star_values() {
        let game = MiningGame::normalized(vec![1.0, 1.0]).unwrap();
        assert_eq!(game.c_star(), 2.0);
        let game = MiningGame::normalized(vec![1.0, 1.0, 1.5]).unwrap();
        assert_eq!(game.c_star(), 1.75);
        // Homogeneous: n c / (n - 1).
        let game = MiningGame::normalized(vec![0.3; 5]).unwrap();
        assert!(close(game.c_star(), 5.0 * 0.3 / 4.0, 1e-15));
    }

    #[test]
    fn nash_symmetric_two_miners() {
        let game = MiningGame::normalized(vec![1.0, 1.0]).unwrap();
        let nash = game.nash_allocation().unwrap();
        assert!(close(nash.get(0), 0.25, 1e-15));
        assert!(close(nash.get(1), 0.25, 1e-15));
        assert!(close(nash.total(), 0.5, 1e-15));
    }

    #[test]
    fn nash_symmetric_matches_closed_form_n3() {
        // Symmetric game: x* = (n-1)/(n^2 c) per miner.
        let game = MiningGame::normalized(vec![1.0, 1.0, 1.0]).unwrap();
        let nash = game.nash_allocation().unwrap();
        for i in 0..3 {
            assert!(close(nash.get(i), 2.0 / 9.0, 1e-15));
        }
    }

    #[test]
    fn nash_asymmetric_frozen_values() {
        // Confirmed against the damped best-response oracle in tests/acceptance.rs.
        let game = MiningGame::normalized(vec![1.0, 1.0, 1.5]).unwrap();
        let nash = game.nash_allocation().unwrap();
        assert!(close(nash.get(0), 0.24489795918367346, 1e-12));
        assert!(close(nash.get(1), 0.24489795918367346, 1e-12));
        assert!(close(nash.get(2), 0.08163265306122448, 1e-12));
        assert!(close(nash.total(), 0.5714285714285714, 1e-12));
    }

    #[test]
    fn nash_first_order_stationarity() {
        let game = MiningGame::new(vec![0.8, 1.1, 0.9, 1.0], 2.5).unwrap();
        let nash = game.nash_allocation().unwrap();
        let h = 1e-6;
        for i in 0..4 {
            let up = game
                .utility(&nash.with_entry(i, nash.get(i) + h).unwrap(), i)
                .unwrap();
            let down = game
                .utility(&nash.with_entry(i, nash.get(i) - h).unwrap(), i)
                .unwrap();
            assert!(((up - down) / (2.0 * h)).abs() < 1e-8);
        }
    }

    #[test]
    fn nash_strict_names_violators() {
        // c* = (1 + 1 + 4)/2 = 3, so miner 2 with cost 4 is out.
        let game = MiningGame::normalized(vec![1.0, 1.0, 4.0]).unwrap();
        assert_eq!(
            game.nash_allocation().unwrap_err(),
            GameError::ParticipationViolated(vec![2])
        );
    }

    #[test]
    fn nash_auto_drop_reduces_to_active_subgame() {
        let game = MiningGame::normalized(vec![1.0, 1.0, 4.0]).unwrap();
        let nash = game
            .nash_allocation_with(ParticipationMode::AutoDrop)
            .unwrap();
        assert_eq!(nash.get(2), 0.0);
        // Survivors play the 2-miner symmetric game.
        assert!(close(nash.get(0), 0.25, 1e-15));
        assert!(close(nash.get(1), 0.25, 1e-15));
    }

    #[test]
    fn auto_drop_is_iterative() {
        // Dropping the worst violator can expose the next one.
        let game = MiningGame::normalized(vec![1.0, 1.0, 2.9, 10.0]).unwrap();
        let nash = game
            .nash_allocation_with(ParticipationMode::AutoDrop)
            .unwrap();
        assert_eq!(nash.get(3), 0.0);
        // After dropping miner 3, c* over {1, 1, 2.9} = 4.9/2 = 2.45 < 2.9.
        assert_eq!(nash.get(2), 0.0);
        assert!(nash.get(0) > 0.0 && nash.get(1) > 0.0);
    }

    #[test]
    fn nash_scales_with_reward() {
        let unit = MiningGame::normalized(vec![0.7, 1.0, 0.8]).unwrap();
        let scaled = MiningGame::new(vec![0.7, 1.0, 0.8], 3.0).unwrap();
        let base = unit.nash_allocation().unwrap();
        let big = scaled.nash_allocation().unwrap();
        for i in 0..3 {
            assert!(close(big.get(i), 3.0 * base.get(i), 1e-12));
        }
    }

    #[test]
    fn non_griefable_allocation_values() {
        let game = MiningGame::normalized(vec![1.0, 1.0]).unwrap();
        let y = game.non_griefable_allocation().unwrap();
        assert!(close(y.get(0), 0.5, 1e-15));
        assert!(close(y.get(1), 0.5, 1e-15));

        let game = MiningGame::normalized(vec![1.0, 1.0, 1.5]).unwrap();
        let y = game.non_griefable_allocation().unwrap();
        let nash = game.nash_allocation().unwrap();
        for i in 0..3 {
            assert!(close(y.get(i), 1.5 * nash.get(i), 1e-15));
        }
        assert!(close(y.get(0), 0.36734693877551017, 1e-12));
        assert!(close(y.get(2), 0.12244897959183673, 1e-12));
    }

    #[test]
    fn allocation_rejects_negative_entries() {
        assert!(matches!(
            AllocationVector::new(vec![0.1, -0.2]).unwrap_err(),
            GameError::NegativeAllocation { index: 1, .. }
        ));
        assert!(AllocationVector::new(vec![0.1, f64::NAN]).is_err());
    }
}
