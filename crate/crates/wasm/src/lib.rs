//! Browser bindings for the interactive demo page.
//!
//! Three explorable views over the core library: bifurcation scans of the
//! learning dynamics, proportional-response convergence against the
//! profitability targets, and the griefing-factor curve of the single-chain
//! contest. All exports return flat `Float64Array` buffers that the page
//! renders onto canvases; shapes are documented per function.

use mineq::dynamics::{bifurcation_scan, DynamicsConfig, ScanAxis, UpdateRule};
use mineq::game::MiningGame;
use mineq::market::{Economy, EffectiveRates, RateMode, SpendingMatrix};
use wasm_bindgen::prelude::*;

fn grid(from: f64, to: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|t| from + t as f64 * (to - from) / (points as f64 - 1.0))
        .collect()
}

fn scan_to_pairs(
    game: MiningGame,
    rule: UpdateRule,
    axis: ScanAxis,
    grid: &[f64],
    samples: usize,
    burn_in: usize,
) -> Result<Vec<f64>, JsError> {
    let base = DynamicsConfig::new(
        rule,
        game.clone(),
        DynamicsConfig::default_init(&game),
        samples,
        burn_in,
    )
    .map_err(|e| JsError::new(&e.to_string()))?;
    let scan = bifurcation_scan(&base, axis, grid).map_err(|e| JsError::new(&e.to_string()))?;
    let mut pairs = Vec::with_capacity(2 * grid.len() * samples);
    for (param, row) in scan.params.iter().zip(&scan.samples) {
        for value in row {
            pairs.push(*param);
            pairs.push(*value);
        }
    }
    Ok(pairs)
}

/// Gradient-ascent attractor scan over the learning rate for `n` equal-cost
/// miners. Returns `(theta, aggregate)` pairs, flattened.
#[wasm_bindgen]
pub fn ga_bifurcation(
    n: usize,
    theta_min: f64,
    theta_max: f64,
    grid_points: usize,
    samples: usize,
    burn_in: usize,
) -> Result<Vec<f64>, JsError> {
    let game =
        MiningGame::normalized(vec![1.0; n.max(2)]).map_err(|e| JsError::new(&e.to_string()))?;
    scan_to_pairs(
        game,
        UpdateRule::GradientAscent {
            learning_rates: vec![theta_min; n.max(2)],
        },
        ScanAxis::LearningRate,
        &grid(theta_min, theta_max, grid_points.max(2)),
        samples,
        burn_in,
    )
}

/// Best-response attractor scan over the cost asymmetry of one representative
/// miner against `n - 1` unit-cost rivals. Returns `(ratio, aggregate)` pairs.
#[wasm_bindgen]
pub fn br_asymmetry_bifurcation(
    n: usize,
    ratio_min: f64,
    ratio_max: f64,
    grid_points: usize,
    samples: usize,
    burn_in: usize,
) -> Result<Vec<f64>, JsError> {
    let game =
        MiningGame::normalized(vec![1.0; n.max(2)]).map_err(|e| JsError::new(&e.to_string()))?;
    scan_to_pairs(
        game,
        UpdateRule::BestResponse,
        ScanAxis::CostAsymmetry,
        &grid(ratio_min, ratio_max, grid_points.max(2)),
        samples,
        burn_in,
    )
}

/// Proportional-response share trajectory of one miner with budget 1 against
/// fixed per-chain rates. Returns `iterations + 1` rows of `rates.len()`
/// spending shares, flattened row-major (row 0 is the uniform start).
#[wasm_bindgen]
pub fn pr_share_trace(rates: Vec<f64>, rho: f64, iterations: usize) -> Result<Vec<f64>, JsError> {
    let m = rates.len();
    if m == 0 {
        return Err(JsError::new("need at least one chain"));
    }
    let economy = Economy::new(vec![1.0; m], vec![vec![1.0; m]], vec![1.0], vec![rho])
        .map_err(|e| JsError::new(&e.to_string()))?;
    let mode = RateMode::Exogenous(
        EffectiveRates::from_rows(&[rates]).map_err(|e| JsError::new(&e.to_string()))?,
    );
    let mut spending = economy.uniform_half_spending();
    let mut out = Vec::with_capacity((iterations + 1) * m);
    out.extend(spending.row(0).iter().copied());
    for _ in 0..iterations {
        spending = economy
            .pr_step(&spending, &mode)
            .map_err(|e| JsError::new(&e.to_string()))?;
        out.extend(spending.row(0).iter().copied());
    }
    Ok(out)
}

/// Normalized profitability of the given per-chain rates (the share targets
/// of a square-root-utility miner).
#[wasm_bindgen]
pub fn normalized_rates(rates: Vec<f64>) -> Vec<f64> {
    let total: f64 = rates.iter().sum();
    rates.iter().map(|r| r / total).collect()
}

/// Griefing factors of upward deviations from the Nash allocation of an
/// equal-cost contest. Returns `(delta, gf)` pairs over a grid of deviation
/// sizes expressed as fractions of the equilibrium aggregate.
#[wasm_bindgen]
pub fn griefing_curve(
    n: usize,
    cost: f64,
    delta_min_frac: f64,
    delta_max_frac: f64,
    points: usize,
) -> Result<Vec<f64>, JsError> {
    let game =
        MiningGame::normalized(vec![cost; n.max(2)]).map_err(|e| JsError::new(&e.to_string()))?;
    let nash = game
        .nash_allocation()
        .map_err(|e| JsError::new(&e.to_string()))?;
    let mut pairs = Vec::with_capacity(2 * points);
    for delta_frac in grid(delta_min_frac, delta_max_frac, points.max(2)) {
        let delta = delta_frac * nash.total();
        let gf = game
            .griefing_factor_closed(delta)
            .map_err(|e| JsError::new(&e.to_string()))?;
        pairs.push(delta_frac);
        pairs.push(gf);
    }
    Ok(pairs)
}

/// Break-even deviation of miner 0 as a fraction of the equilibrium
/// aggregate, for marking on the griefing curve.
#[wasm_bindgen]
pub fn breakeven_delta_frac(n: usize, cost: f64) -> Result<f64, JsError> {
    let game =
        MiningGame::normalized(vec![cost; n.max(2)]).map_err(|e| JsError::new(&e.to_string()))?;
    let limits = game
        .breakeven_analysis(0)
        .map_err(|e| JsError::new(&e.to_string()))?;
    let nash = game
        .nash_allocation()
        .map_err(|e| JsError::new(&e.to_string()))?;
    Ok(limits.breakeven_delta / nash.total())
}

/// Final equilibrium shares for the rate explorer, solved to tolerance
/// rather than a fixed iteration count.
#[wasm_bindgen]
pub fn pr_equilibrium_shares(rates: Vec<f64>, rho: f64) -> Result<Vec<f64>, JsError> {
    let m = rates.len();
    if m == 0 {
        return Err(JsError::new("need at least one chain"));
    }
    let economy = Economy::new(vec![1.0; m], vec![vec![1.0; m]], vec![1.0], vec![rho])
        .map_err(|e| JsError::new(&e.to_string()))?;
    let mode = RateMode::Exogenous(
        EffectiveRates::from_rows(&[rates]).map_err(|e| JsError::new(&e.to_string()))?,
    );
    let (solution, _) = economy
        .solve_equilibrium(
            &economy.uniform_half_spending(),
            &mineq::market::SolveOptions {
                mode,
                ..Default::default()
            },
        )
        .map_err(|e| JsError::new(&e.to_string()))?;
    Ok(shares_of(&solution, m))
}

fn shares_of(solution: &SpendingMatrix, m: usize) -> Vec<f64> {
    (0..m).map(|k| solution.get(0, k)).collect()
}
