//! Shared oracles for the integration suites.
//!
//! The best-response oracle is deliberately independent of the closed-form
//! equilibrium it is used to check: it only knows the utility's first-order
//! condition and iterates a damped simultaneous best response to a fixed
//! point.

// Not every suite uses every helper.
#![allow(dead_code)]

use mineq::game::MiningGame;
use std::path::PathBuf;

/// Damped simultaneous best-response iteration from a uniform interior start.
///
/// Returns the fixed point once no coordinate moves by more than `tol`, or
/// `None` if the budget of iterations runs out.
pub fn best_response_fixed_point(game: &MiningGame, tol: f64, max_iter: usize) -> Option<Vec<f64>> {
    let n = game.n();
    let v = game.reward();
    // Damping keeps the synchronous iteration contractive for large n.
    let damping = (2.0 / n as f64).min(0.5);
    let mut x: Vec<f64> = game
        .costs()
        .iter()
        .map(|c| v / (2.0 * n as f64 * c))
        .collect();
    for _ in 0..max_iter {
        let total: f64 = x.iter().sum();
        let mut max_change: f64 = 0.0;
        let next: Vec<f64> = (0..n)
            .map(|i| {
                let others = total - x[i];
                let br = ((v * others / game.cost(i)).sqrt() - others).max(0.0);
                (1.0 - damping) * x[i] + damping * br
            })
            .collect();
        for i in 0..n {
            max_change = max_change.max((next[i] - x[i]).abs());
        }
        x = next;
        if max_change < tol {
            return Some(x);
        }
    }
    None
}

/// Central finite-difference of miner `i`'s utility in its own allocation.
pub fn utility_gradient_fd(game: &MiningGame, x: &[f64], i: usize, step: f64) -> f64 {
    let eval = |xi: f64| -> f64 {
        let mut alloc = x.to_vec();
        alloc[i] = xi;
        let alloc = mineq::game::AllocationVector::new(alloc).expect("non-negative");
        game.utility(&alloc, i).expect("well-formed")
    };
    (eval(x[i] + step) - eval(x[i] - step)) / (2.0 * step)
}

/// Absolute path of a file in the repository's `fixtures/` directory.
pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn read_fixture(name: &str) -> String {
    let path = fixture_path(name);
    std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("cannot read fixture {}: {e}", path.display()))
}
