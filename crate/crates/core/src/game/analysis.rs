//! Deviation limits, expenditure identities and the cost-variance bound.

use super::{GameError, MiningGame};

/// How far a miner can over-commit before mining at a loss, and the maximal
/// damage they can inflict while staying solvent.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationLimits {
    /// Break-even increase `delta_i = v (1/c_i - 1/c*)`.
    pub breakeven_delta: f64,
    /// Network loss at the break-even point, `L(delta_i) = c_i x*_i`.
    pub max_network_loss: f64,
}

/// Aggregate spending at the Nash and non-griefable allocations.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpenditureReport {
    pub e_nash: f64,
    pub e_nongriefable: f64,
    /// `e_nash / e_nongriefable`, equal to `(n-1)/n`.
    pub ratio: f64,
}

/// Sample variance of the active miners' normalized costs against the bound
/// implied by the participation constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct CostVarianceCheck {
    pub variance: f64,
    pub bound: f64,
    pub satisfied: bool,
}

impl MiningGame {
    /// Break-even analysis for miner `i` deviating upward from Nash.
    ///
    /// The network loss `L(delta) = v delta c_i / (v + c* delta)` is strictly
    /// increasing, so the worst damage a solvent miner `i` can do is reached
    /// exactly at the break-even deviation.
    pub fn breakeven_analysis(&self, i: usize) -> Result<DeviationLimits, GameError> {
        self.check_miner(i)?;
        let nash = self.nash_allocation()?;
        let c_star = self.c_star();
        let breakeven_delta = self.reward() * (1.0 / self.cost(i) - 1.0 / c_star);
        let max_network_loss = self.cost(i) * nash.get(i);
        Ok(DeviationLimits {
            breakeven_delta,
            max_network_loss,
        })
    }

    /// Network utility loss when miner `i` deviates to `x*_i + delta`.
    pub fn network_loss(&self, i: usize, delta: f64) -> Result<f64, GameError> {
        self.check_miner(i)?;
        if !delta.is_finite() || delta <= 0.0 {
            return Err(GameError::NonPositiveDelta(delta));
        }
        // Participation must hold for the closed form to apply.
        self.nash_allocation()?;
        let v = self.reward();
        Ok(v * delta * self.cost(i) / (v + self.c_star() * delta))
    }

    /// Total spending `sum c_i x_i` at the Nash allocation and at the
    /// non-griefable allocation, with their fixed `(n-1)/n` ratio.
    ///
    /// The non-griefable expenditure never exceeds the reward, with equality
    /// exactly for homogeneous costs.
    pub fn expenditure_report(&self) -> Result<ExpenditureReport, GameError> {
        let nash = self.nash_allocation()?;
        let y = self.non_griefable_allocation()?;
        let e_nash: f64 = self
            .costs()
            .iter()
            .zip(nash.values())
            .map(|(c, x)| c * x)
            .sum();
        let e_nongriefable: f64 = self
            .costs()
            .iter()
            .zip(y.values())
            .map(|(c, x)| c * x)
            .sum();
        Ok(ExpenditureReport {
            e_nash,
            e_nongriefable,
            ratio: e_nash / e_nongriefable,
        })
    }

    /// Checks the variance of the reward-normalized costs against the bound
    /// `c_max (n/(n-1) - c_max)` that participation forces on active miners.
    ///
    /// The bound's derivation assumes normalized costs below 1 (cost per
    /// resource unit below the whole reward), which holds in any real market.
    pub fn cost_variance_bound(&self) -> Result<CostVarianceCheck, GameError> {
        let violations = self.participation_violations();
        if !violations.is_empty() {
            return Err(GameError::ParticipationViolated(violations));
        }
        let n = self.n() as f64;
        let normalized: Vec<f64> = self.costs().iter().map(|c| c / self.reward()).collect();
        let mean = normalized.iter().sum::<f64>() / n;
        let variance = normalized.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let c_max = normalized.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let bound = c_max * (n / (n - 1.0) - c_max);
        Ok(CostVarianceCheck {
            variance,
            bound,
            satisfied: variance < bound,
        })
    }
}
