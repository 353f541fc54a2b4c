//! Bifurcation scans: sweep a parameter, sample the post-burn-in attractor.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use super::{simulate, DynamicsConfig, DynamicsError, UpdateRule};
use crate::game::MiningGame;

/// Resolution at which two aggregate values count as the same attractor point.
pub const DISTINCT_RESOLUTION: f64 = 1e-6;

/// Which knob the scan sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanAxis {
    /// A common gradient-ascent learning rate for all miners.
    LearningRate,
    /// Cost asymmetry: miner 0 pays `r * c` while everyone else pays `c`,
    /// with `c` taken from the base game's first cost.
    CostAsymmetry,
}

/// Attractor statistics for one parameter value.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanSummary {
    /// Spread of the sampled aggregates, `max - min`.
    pub diameter: f64,
    /// Number of distinct sampled aggregates at [`DISTINCT_RESOLUTION`].
    pub distinct: usize,
}

/// Post-burn-in aggregate samples per parameter value.
#[derive(Debug, Clone, PartialEq)]
pub struct BifurcationScan {
    pub axis: ScanAxis,
    pub params: Vec<f64>,
    /// One row of sampled aggregates per parameter value.
    pub samples: Vec<Vec<f64>>,
    pub summaries: Vec<ScanSummary>,
}

impl BifurcationScan {
    /// Smallest scanned parameter whose attractor diameter exceeds `threshold`.
    pub fn first_crossing(&self, threshold: f64) -> Option<f64> {
        self.params
            .iter()
            .zip(&self.summaries)
            .find(|(_, s)| s.diameter > threshold)
            .map(|(p, _)| *p)
    }

    /// Plot-ready export with header `param,sample_index,aggregate_X`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("param,sample_index,aggregate_X\n");
        for (param, row) in self.params.iter().zip(&self.samples) {
            for (index, value) in row.iter().enumerate() {
                out.push_str(&format!("{param},{index},{value}\n"));
            }
        }
        out
    }
}

/// Sweeps `grid` along `axis`, simulating `base.burn_in + base.steps`
/// iterations per point and keeping the last `base.steps` aggregates.
///
/// Grid points are independent; results do not depend on evaluation order.
pub fn bifurcation_scan(
    base: &DynamicsConfig,
    axis: ScanAxis,
    grid: &[f64],
) -> Result<BifurcationScan, DynamicsError> {
    if grid.len() < 2 || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(DynamicsError::BadGrid);
    }
    let run_one = |&param: &f64| -> Result<Vec<f64>, DynamicsError> {
        let config = apply_axis(base, axis, param)?;
        let trace = simulate(&config)?;
        Ok(trace.aggregates[config.burn_in + 1..].to_vec())
    };
    #[cfg(feature = "parallel")]
    let rows: Result<Vec<Vec<f64>>, DynamicsError> = grid.par_iter().map(run_one).collect();
    #[cfg(not(feature = "parallel"))]
    let rows: Result<Vec<Vec<f64>>, DynamicsError> = grid.iter().map(run_one).collect();
    let samples = rows?;
    let summaries = samples.iter().map(|row| summarize(row)).collect();
    Ok(BifurcationScan {
        axis,
        params: grid.to_vec(),
        samples,
        summaries,
    })
}

fn apply_axis(
    base: &DynamicsConfig,
    axis: ScanAxis,
    param: f64,
) -> Result<DynamicsConfig, DynamicsError> {
    let mut config = base.clone();
    // Keep burn-in out of the recorded window: simulate both, slice later.
    config.steps = base.burn_in + base.steps;
    match axis {
        ScanAxis::LearningRate => {
            config.rule = UpdateRule::GradientAscent {
                learning_rates: vec![param; base.game.n()],
            };
        }
        ScanAxis::CostAsymmetry => {
            let c = base.game.cost(0);
            let mut costs = vec![c; base.game.n()];
            costs[0] = param * c;
            config.game = MiningGame::new(costs, base.game.reward())?;
            config.init = DynamicsConfig::default_init(&config.game);
        }
    }
    DynamicsConfig::new(
        config.rule,
        config.game,
        config.init,
        config.steps,
        base.burn_in,
    )
}

fn summarize(samples: &[f64]) -> ScanSummary {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut distinct = std::collections::BTreeSet::new();
    for &x in samples {
        min = min.min(x);
        max = max.max(x);
        distinct.insert((x / DISTINCT_RESOLUTION).round() as i64);
    }
    ScanSummary {
        diameter: if samples.is_empty() { 0.0 } else { max - min },
        distinct: distinct.len(),
    }
}
