//! Seeded generators for randomized verification suites.
//!
//! Games are drawn with costs in a narrow band around a base level so that
//! the participation constraint holds for every draw; economies are drawn
//! with moderate parameter ranges so equilibria stay well scaled. All
//! generators take an explicit RNG: callers own the seed.

use crate::game::MiningGame;
use crate::market::{Economy, SpendingMatrix};
use rand::Rng;

/// A game with `n` miners and normalized costs around `base_cost`.
///
/// Costs are drawn uniformly within 5% of the base, which keeps
/// `max c_i < c*` for every population size up to 10.
pub fn random_participating_game<R: Rng>(rng: &mut R, n: usize, base_cost: f64) -> MiningGame {
    let costs = (0..n)
        .map(|_| base_cost * rng.random_range(0.95..1.05))
        .collect();
    let game = MiningGame::normalized(costs).expect("valid sampled game");
    debug_assert!(game.participation_violations().is_empty());
    game
}

/// An economy with `n` miners, `m` chains and substitution parameters drawn
/// from `rho_range`.
pub fn random_economy<R: Rng>(rng: &mut R, n: usize, m: usize, rho_range: (f64, f64)) -> Economy {
    let revenues = (0..m).map(|_| rng.random_range(0.5..5.0)).collect();
    let unit_costs = (0..n)
        .map(|_| (0..m).map(|_| rng.random_range(0.5..2.0)).collect())
        .collect();
    let capacities = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
    let rho = (0..n)
        .map(|_| rng.random_range(rho_range.0..=rho_range.1))
        .collect();
    Economy::new(revenues, unit_costs, capacities, rho).expect("valid sampled economy")
}

/// A strictly interior feasible spending for `economy`: random positive
/// entries filling at most ~90% of each budget.
pub fn random_interior_spending<R: Rng>(rng: &mut R, economy: &Economy) -> SpendingMatrix {
    let m = economy.chains();
    let rows: Vec<Vec<f64>> = (0..economy.miners())
        .map(|i| {
            let cap = economy.capacity(i);
            let budget = cap * rng.random_range(0.3..0.9);
            let weights: Vec<f64> = (0..m).map(|_| rng.random_range(0.05..1.0)).collect();
            let total: f64 = weights.iter().sum();
            weights.iter().map(|w| budget * w / total).collect()
        })
        .collect();
    SpendingMatrix::from_rows(&rows, economy.capacities()).expect("interior sample is feasible")
}
