//! Griefing factors: how much damage a unilateral deviation inflicts on the
//! rest of the network per unit of the deviator's own utility loss.

use super::{AllocationVector, GameError, MiningGame};

/// Own-loss magnitudes below this make the griefing ratio numerically
/// meaningless; the direct computation reports an error instead.
pub const DEGENERATE_OWN_LOSS_TOL: f64 = 1e-12;

/// Outcome of one concrete deviation from a base allocation.
#[derive(Debug, Clone, PartialEq)]
pub struct GriefingReport {
    /// Index of the deviating miner.
    pub deviator: usize,
    /// Signed change of the deviator's allocation.
    pub delta: f64,
    /// Utility lost by the deviator (positive when the move is costly).
    pub own_loss: f64,
    /// Utility lost by each miner; the deviator's own slot is 0.
    pub victim_losses: Vec<f64>,
    /// Per-victim griefing factors `GF_ij`; the deviator's own slot is 0.
    pub gf_individual: Vec<f64>,
    /// Network griefing factor; equals the sum of `gf_individual`.
    pub gf_total: f64,
}

/// Finite deviation grid scanned by [`MiningGame::is_individually_griefable`].
///
/// Scanning is restricted to resource increases `x_i + delta`. The true
/// supremum over deviations is unbounded at a Nash point as `delta -> 0`, so
/// the grid starts at `min_delta_factor` times the aggregate allocation and
/// runs up to `max_delta_factor * v / c*`.
#[derive(Debug, Clone)]
pub struct DeviationGrid {
    pub points_per_miner: usize,
    pub min_delta_factor: f64,
    pub max_delta_factor: f64,
    /// Witness threshold: a deviation counts once `GF_ij > 1 + gf_tolerance`.
    pub gf_tolerance: f64,
}

impl Default for DeviationGrid {
    fn default() -> Self {
        Self {
            points_per_miner: 200,
            min_delta_factor: 1e-4,
            max_delta_factor: 4.0,
            gf_tolerance: 1e-6,
        }
    }
}

/// A concrete `GF_ij > 1` witness found by the grid scan.
#[derive(Debug, Clone, PartialEq)]
pub struct GriefingWitness {
    pub deviator: usize,
    pub victim: usize,
    pub new_allocation: f64,
    pub gf: f64,
}

/// Result of scanning an allocation for individual griefability.
#[derive(Debug, Clone, PartialEq)]
pub struct GriefabilityScan {
    pub griefable: bool,
    pub witness: Option<GriefingWitness>,
    /// Largest individual griefing factor seen over the grid.
    pub sup_gf: f64,
}

impl MiningGame {
    /// Evaluates a single deviation of miner `deviator` to `new_x_i` against
    /// `base` and reports all losses and griefing factors.
    ///
    /// Fails with [`GameError::DegenerateDeviation`] when the deviator's own
    /// utility change is below [`DEGENERATE_OWN_LOSS_TOL`] in magnitude.
    pub fn griefing_factor_direct(
        &self,
        base: &AllocationVector,
        deviator: usize,
        new_x_i: f64,
    ) -> Result<GriefingReport, GameError> {
        self.griefing_factor_direct_with_tol(base, deviator, new_x_i, DEGENERATE_OWN_LOSS_TOL)
    }

    pub fn griefing_factor_direct_with_tol(
        &self,
        base: &AllocationVector,
        deviator: usize,
        new_x_i: f64,
        own_loss_tol: f64,
    ) -> Result<GriefingReport, GameError> {
        self.check_alloc(base)?;
        self.check_miner(deviator)?;
        if !new_x_i.is_finite() || new_x_i < 0.0 {
            return Err(GameError::NegativeAllocation {
                index: deviator,
                value: new_x_i,
            });
        }
        let deviated = base.with_entry(deviator, new_x_i)?;
        let own_loss = self.utility(base, deviator)? - self.utility(&deviated, deviator)?;
        if own_loss.abs() < own_loss_tol {
            return Err(GameError::DegenerateDeviation { own_loss });
        }
        let n = self.n();
        let mut victim_losses = vec![0.0; n];
        let mut gf_individual = vec![0.0; n];
        for j in (0..n).filter(|&j| j != deviator) {
            let loss = self.utility(base, j)? - self.utility(&deviated, j)?;
            victim_losses[j] = loss;
            gf_individual[j] = loss / own_loss;
        }
        let gf_total = gf_individual.iter().sum();
        Ok(GriefingReport {
            deviator,
            delta: new_x_i - base.get(deviator),
            own_loss,
            victim_losses,
            gf_individual,
            gf_total,
        })
    }

    /// Closed-form network griefing factor for a deviation `x*_i + delta`
    /// from the Nash allocation: `GF = v (n-1) / (delta * sum c_j) = v/(c* delta)`.
    ///
    /// Independent of the deviator's identity. The normalized statement
    /// assumes `v = 1`; the reward factor rescales `delta` into normalized
    /// units for arbitrary rewards.
    pub fn griefing_factor_closed(&self, delta: f64) -> Result<f64, GameError> {
        if !delta.is_finite() || delta <= 0.0 {
            return Err(GameError::NonPositiveDelta(delta));
        }
        Ok(self.reward() / (self.c_star() * delta))
    }

    /// Scans resource-increase deviations over `grid` and reports whether any
    /// individual griefing factor exceeds `1 + gf_tolerance`.
    ///
    /// A grid point only counts as griefing when the deviation is actually
    /// costly to the deviator (own loss above [`DEGENERATE_OWN_LOSS_TOL`]);
    /// deviations that profit the deviator improve everyone here and are not
    /// attacks.
    pub fn is_individually_griefable(
        &self,
        alloc: &AllocationVector,
        grid: &DeviationGrid,
    ) -> Result<GriefabilityScan, GameError> {
        self.check_alloc(alloc)?;
        if grid.points_per_miner == 0 {
            return Err(GameError::EmptyGrid);
        }
        let delta_min = grid.min_delta_factor * alloc.total().max(f64::MIN_POSITIVE);
        let delta_max = grid.max_delta_factor * self.reward() / self.c_star();
        let points = grid.points_per_miner;
        let mut sup_gf = f64::NEG_INFINITY;
        let mut witness = None;
        for i in 0..self.n() {
            for t in 0..points {
                let frac = if points == 1 {
                    0.0
                } else {
                    t as f64 / (points as f64 - 1.0)
                };
                let delta = delta_min + frac * (delta_max - delta_min);
                let report = match self.griefing_factor_direct(alloc, i, alloc.get(i) + delta) {
                    Ok(r) if r.own_loss > 0.0 => r,
                    // Costless or profitable move: not a griefing attack.
                    _ => continue,
                };
                for j in (0..self.n()).filter(|&j| j != i) {
                    let gf = report.gf_individual[j];
                    if gf > sup_gf {
                        sup_gf = gf;
                    }
                    if gf > 1.0 + grid.gf_tolerance && witness.is_none() {
                        witness = Some(GriefingWitness {
                            deviator: i,
                            victim: j,
                            new_allocation: alloc.get(i) + delta,
                            gf,
                        });
                    }
                }
            }
        }
        Ok(GriefabilityScan {
            griefable: witness.is_some(),
            witness,
            sup_gf,
        })
    }
}
