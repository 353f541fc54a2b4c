//! Profitability ratios and per-day representative-miner equilibria.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use super::{
    unit_cost, CaseStudyError, CoinDaily, DailyReport, EnergySchedule, MarketSeries, RigCatalog,
};
use crate::market::{Economy, RateMode, SolveOptions, SpendingMatrix};
use chrono::{Datelike, NaiveDate};
use std::collections::BTreeMap;

/// Per-coin profitability for one day.
#[derive(Debug, Clone, PartialEq)]
pub struct Profitability {
    /// Revenue over network spending, `PFR_k = v_k / b_k`.
    pub pfr: Vec<f64>,
    /// Normalized ratios summing to one.
    pub ppr: Vec<f64>,
}

/// `PFR_k = v_k / b_k` and its normalization across coins.
pub fn profitability(revenues: &[f64], spendings: &[f64]) -> Result<Profitability, CaseStudyError> {
    if revenues.len() != spendings.len() {
        return Err(CaseStudyError::LengthMismatch {
            revenues: revenues.len(),
            spendings: spendings.len(),
        });
    }
    let mut pfr = Vec::with_capacity(revenues.len());
    for (k, (&v, &b)) in revenues.iter().zip(spendings).enumerate() {
        if !b.is_finite() || b <= 0.0 {
            return Err(CaseStudyError::DegenerateCoin {
                coin: format!("#{k}"),
            });
        }
        pfr.push(v / b);
    }
    let total: f64 = pfr.iter().sum();
    let ppr = pfr.iter().map(|r| r / total).collect();
    Ok(Profitability { pfr, ppr })
}

/// The representative miner whose equilibrium the pipeline computes.
#[derive(Debug, Clone, PartialEq)]
pub struct MinerProfile {
    /// Monetary capacity in USD, assumed small against per-coin spending.
    pub capacity: f64,
    /// Substitution parameter in (0, 1].
    pub rho: f64,
    /// Unit cost relative to the modeled network average,
    /// `c_ik = cost_factor * cbar_k`.
    pub cost_factor: f64,
}

impl MinerProfile {
    pub fn new(capacity: f64, rho: f64, cost_factor: f64) -> Result<Self, CaseStudyError> {
        if !(capacity.is_finite() && capacity > 0.0) {
            return Err(CaseStudyError::BadMinerProfile { field: "capacity" });
        }
        if !(rho.is_finite() && rho > 0.0 && rho <= 1.0) {
            return Err(CaseStudyError::BadMinerProfile { field: "rho" });
        }
        if !(cost_factor.is_finite() && cost_factor > 0.0) {
            return Err(CaseStudyError::BadMinerProfile {
                field: "cost_factor",
            });
        }
        Ok(Self {
            capacity,
            rho,
            cost_factor,
        })
    }
}

/// Knobs of [`daily_equilibrium`].
#[derive(Debug, Clone)]
pub struct PipelineOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Seed each day's solve with the previous day's solution. Off by
    /// default: days are independent equilibria. Must not move results by
    /// more than solver tolerance either way.
    pub warm_start: bool,
    /// Externally supplied per-coin network-average costs, overriding the
    /// rig/energy model.
    pub cbar_override: BTreeMap<String, f64>,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 100_000,
            warm_start: false,
            cbar_override: BTreeMap::new(),
        }
    }
}

/// A full pipeline run: per-day reports plus skipped dates and warnings.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseStudyRun {
    pub reports: Vec<DailyReport>,
    /// Dates dropped because some coin had no observation, with the coin name.
    pub skipped: Vec<(NaiveDate, String)>,
    pub warnings: Vec<String>,
}

impl CaseStudyRun {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(DailyReport::CSV_HEADER);
        out.push('\n');
        for report in &self.reports {
            out.push_str(&report.csv_rows());
        }
        out
    }
}

/// Solves one independent equilibrium per day for the representative miner.
///
/// Each day builds a single-miner economy against the observed aggregates:
/// the network-average cost comes from the rig in service that calendar year
/// at the energy price covering the date (or the override), and the miner's
/// per-dollar rates are frozen at the observed per-coin profitability scaled
/// by the miner's cost factor. Dates missing an observation for any coin are
/// skipped and recorded.
pub fn daily_equilibrium(
    series: &MarketSeries,
    rigs: &RigCatalog,
    schedule: &EnergySchedule,
    miner: &MinerProfile,
    options: &PipelineOptions,
) -> Result<CaseStudyRun, CaseStudyError> {
    if series.is_empty() {
        return Err(CaseStudyError::EmptySeries);
    }
    let coins: Vec<String> = series.coins().map(str::to_string).collect();
    let mut skipped = Vec::new();
    let mut solvable = Vec::new();
    for date in series.dates() {
        match coins
            .iter()
            .find(|coin| series.observation_on(coin, date).is_none())
        {
            Some(coin) => skipped.push((date, coin.clone())),
            None => solvable.push(date),
        }
    }

    // Per-day inputs are resolved up front so the solve loop is independent
    // per day (and can run in parallel when warm starts are off).
    let mut day_inputs = Vec::with_capacity(solvable.len());
    for &date in &solvable {
        let mut revenues = Vec::with_capacity(coins.len());
        let mut aggregates = Vec::with_capacity(coins.len());
        let mut cbars = Vec::with_capacity(coins.len());
        for coin in &coins {
            let obs = series
                .observation_on(coin, date)
                .expect("solvable dates have every coin");
            let cbar = match options.cbar_override.get(coin) {
                Some(&c) => c,
                None => {
                    let rig = rigs.lookup(coin, date.year())?;
                    unit_cost(rig, schedule.price_on(date)?)
                }
            };
            revenues.push(obs.revenue);
            aggregates.push(obs.hashrate);
            cbars.push(cbar);
        }
        day_inputs.push((date, revenues, aggregates, cbars));
    }

    let solve_day = |input: &(NaiveDate, Vec<f64>, Vec<f64>, Vec<f64>),
                     warm: Option<&SpendingMatrix>|
     -> Result<(DailyReport, Option<String>, SpendingMatrix), CaseStudyError> {
        let (date, revenues, aggregates, cbars) = input;
        let spendings: Vec<f64> = cbars.iter().zip(aggregates).map(|(c, x)| c * x).collect();
        for (k, &b) in spendings.iter().enumerate() {
            if !b.is_finite() || b <= 0.0 {
                return Err(CaseStudyError::DegenerateCoin {
                    coin: coins[k].clone(),
                });
            }
        }
        let ratios = profitability(revenues, &spendings)?;
        let miner_costs: Vec<f64> = cbars.iter().map(|c| miner.cost_factor * c).collect();
        let economy = Economy::new(
            revenues.clone(),
            vec![miner_costs],
            vec![miner.capacity],
            vec![miner.rho],
        )?;
        let rates = economy.effective_rates_exogenous(aggregates)?;
        let solve_options = SolveOptions {
            tol: options.tol,
            max_iter: options.max_iter,
            mode: RateMode::Exogenous(rates),
            kkt_every_iter: false,
        };
        let start = match warm {
            Some(previous) => previous.clone(),
            None => economy.uniform_half_spending(),
        };
        let (solution, _cert) = economy.solve_equilibrium(&start, &solve_options)?;
        let shares: Vec<f64> = (0..coins.len())
            .map(|k| solution.get(0, k) / miner.capacity)
            .collect();
        let min_spending = spendings.iter().cloned().fold(f64::INFINITY, f64::min);
        let warning = (miner.capacity > 0.01 * min_spending).then(|| {
            format!(
                "{date}: capacity {} exceeds 1% of the smallest network spending {min_spending}; \
                 the large-market reading is strained",
                miner.capacity
            )
        });
        let report = DailyReport {
            date: *date,
            coins: coins
                .iter()
                .enumerate()
                .map(|(k, coin)| CoinDaily {
                    coin: coin.clone(),
                    unit_cost: cbars[k],
                    pfr: ratios.pfr[k],
                    ppr: ratios.ppr[k],
                    share: shares[k],
                })
                .collect(),
        };
        Ok((report, warning, solution))
    };

    let mut reports = Vec::with_capacity(day_inputs.len());
    let mut warnings = Vec::new();
    if options.warm_start {
        let mut previous: Option<SpendingMatrix> = None;
        for input in &day_inputs {
            let (report, warning, solution) = solve_day(input, previous.as_ref())?;
            reports.push(report);
            warnings.extend(warning);
            previous = Some(solution);
        }
    } else {
        #[cfg(feature = "parallel")]
        let solved: Result<Vec<_>, CaseStudyError> = day_inputs
            .par_iter()
            .map(|input| solve_day(input, None))
            .collect();
        #[cfg(not(feature = "parallel"))]
        let solved: Result<Vec<_>, CaseStudyError> = day_inputs
            .iter()
            .map(|input| solve_day(input, None))
            .collect();
        for (report, warning, _) in solved? {
            reports.push(report);
            warnings.extend(warning);
        }
    }
    Ok(CaseStudyRun {
        reports,
        skipped,
        warnings,
    })
}
