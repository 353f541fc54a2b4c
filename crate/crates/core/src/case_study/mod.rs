//! Empirical pipeline: hardware cost model, market-data ingestion,
//! profitability ratios and per-day representative-miner equilibria.
//!
//! Inputs are three delimiter-separated files (per-day market observations,
//! a mining-rig catalog and an energy price schedule); the output is one row
//! per day and coin with the modeled unit cost, the profitability ratios and
//! the equilibrium spending share of a configurable representative miner.

mod cost;
mod ingest;
mod pipeline;

pub use cost::unit_cost;
pub use ingest::{parse_energy_csv, parse_market_csv, parse_rigs_csv, HashrateUnit};
pub use pipeline::{
    daily_equilibrium, profitability, CaseStudyRun, MinerProfile, PipelineOptions, Profitability,
};

use chrono::NaiveDate;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CaseStudyError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: hashrate must be strictly positive, got {value}")]
    NonPositiveHashrate { line: usize, value: f64 },
    #[error("line {line}: revenue must be non-negative, got {value}")]
    NegativeRevenue { line: usize, value: f64 },
    #[error("line {line}: dates for coin {coin} must be strictly increasing")]
    NonMonotoneDates { line: usize, coin: String },
    #[error("energy intervals overlap around {date}")]
    OverlappingEnergyIntervals { date: NaiveDate },
    #[error("energy interval ends {end} before it starts {start}")]
    InvalidEnergyInterval { start: NaiveDate, end: NaiveDate },
    #[error("no rig listed for coin {coin} in year {year}")]
    MissingRig { coin: String, year: i32 },
    #[error("no energy price covers {date}")]
    MissingEnergyPrice { date: NaiveDate },
    #[error("rig parameters must be strictly positive: {field}")]
    NonPositiveRigField { field: &'static str },
    #[error("network spending on coin {coin} is zero; profitability undefined")]
    DegenerateCoin { coin: String },
    #[error(
        "profitability needs matching revenue/spending lengths, got {revenues} vs {spendings}"
    )]
    LengthMismatch { revenues: usize, spendings: usize },
    #[error("miner profile: {field} must be strictly positive")]
    BadMinerProfile { field: &'static str },
    #[error("market series is empty")]
    EmptySeries,
    #[error(transparent)]
    Market(#[from] crate::market::MarketError),
}

/// One mining rig: acquisition price, sustained hashrate, power draw and
/// useful lifespan.
#[derive(Debug, Clone, PartialEq)]
pub struct RigSpec {
    pub coin: String,
    pub year: i32,
    pub model: String,
    /// Acquisition price in USD.
    pub price: f64,
    /// Sustained hashrate in TH/s.
    pub hashrate: f64,
    /// Power draw in watts.
    pub power: f64,
    /// Useful lifespan in years.
    pub lifespan: f64,
}

impl RigSpec {
    pub fn new(
        coin: impl Into<String>,
        year: i32,
        model: impl Into<String>,
        price: f64,
        hashrate: f64,
        power: f64,
        lifespan: f64,
    ) -> Result<Self, CaseStudyError> {
        for (value, field) in [
            (price, "price"),
            (hashrate, "hashrate"),
            (power, "power"),
            (lifespan, "lifespan"),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(CaseStudyError::NonPositiveRigField { field });
            }
        }
        Ok(Self {
            coin: coin.into(),
            year,
            model: model.into(),
            price,
            hashrate,
            power,
            lifespan,
        })
    }
}

/// Rig catalog keyed by coin and calendar year.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RigCatalog {
    rigs: Vec<RigSpec>,
}

impl RigCatalog {
    pub fn new(rigs: Vec<RigSpec>) -> Self {
        Self { rigs }
    }

    pub fn rigs(&self) -> &[RigSpec] {
        &self.rigs
    }

    /// The rig in service for `coin` during `year`.
    pub fn lookup(&self, coin: &str, year: i32) -> Result<&RigSpec, CaseStudyError> {
        self.rigs
            .iter()
            .find(|r| r.coin == coin && r.year == year)
            .ok_or_else(|| CaseStudyError::MissingRig {
                coin: coin.to_string(),
                year,
            })
    }
}

/// Dated electricity price intervals (inclusive on both ends).
#[derive(Debug, Clone, PartialEq)]
pub struct EnergySchedule {
    intervals: Vec<(NaiveDate, NaiveDate, f64)>,
}

impl EnergySchedule {
    /// Builds a schedule, rejecting malformed or overlapping intervals.
    pub fn new(mut intervals: Vec<(NaiveDate, NaiveDate, f64)>) -> Result<Self, CaseStudyError> {
        intervals.sort_by_key(|(start, _, _)| *start);
        for (start, end, _) in &intervals {
            if end < start {
                return Err(CaseStudyError::InvalidEnergyInterval {
                    start: *start,
                    end: *end,
                });
            }
        }
        for pair in intervals.windows(2) {
            if pair[1].0 <= pair[0].1 {
                return Err(CaseStudyError::OverlappingEnergyIntervals { date: pair[1].0 });
            }
        }
        Ok(Self { intervals })
    }

    /// USD per kWh on `date`.
    pub fn price_on(&self, date: NaiveDate) -> Result<f64, CaseStudyError> {
        self.intervals
            .iter()
            .find(|(start, end, _)| *start <= date && date <= *end)
            .map(|(_, _, price)| *price)
            .ok_or(CaseStudyError::MissingEnergyPrice { date })
    }
}

/// One dated observation for one coin.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub date: NaiveDate,
    /// Network hashrate sustained over the day, TH/s.
    pub hashrate: f64,
    /// Aggregate miner revenue over the day, USD.
    pub revenue: f64,
}

/// Dated per-coin hashrate and revenue series, sorted by coin then date.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MarketSeries {
    by_coin: BTreeMap<String, Vec<Observation>>,
}

impl MarketSeries {
    pub fn coins(&self) -> impl Iterator<Item = &str> {
        self.by_coin.keys().map(|s| s.as_str())
    }

    pub fn coin_count(&self) -> usize {
        self.by_coin.len()
    }

    pub fn observations(&self, coin: &str) -> Option<&[Observation]> {
        self.by_coin.get(coin).map(|v| v.as_slice())
    }

    pub fn len(&self) -> usize {
        self.by_coin.values().map(|v| v.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.by_coin.is_empty()
    }

    /// All dates present for at least one coin, ascending.
    pub fn dates(&self) -> Vec<NaiveDate> {
        let mut dates: Vec<NaiveDate> = self
            .by_coin
            .values()
            .flat_map(|obs| obs.iter().map(|o| o.date))
            .collect();
        dates.sort();
        dates.dedup();
        dates
    }

    pub fn observation_on(&self, coin: &str, date: NaiveDate) -> Option<&Observation> {
        self.by_coin
            .get(coin)?
            .binary_search_by_key(&date, |o| o.date)
            .ok()
            .map(|idx| &self.by_coin[coin][idx])
    }

    pub(crate) fn insert(
        &mut self,
        coin: String,
        observation: Observation,
        line: usize,
    ) -> Result<(), CaseStudyError> {
        let entry = self.by_coin.entry(coin.clone()).or_default();
        if let Some(last) = entry.last() {
            if observation.date <= last.date {
                return Err(CaseStudyError::NonMonotoneDates { line, coin });
            }
        }
        entry.push(observation);
        Ok(())
    }
}

/// Per-coin figures inside a [`DailyReport`].
#[derive(Debug, Clone, PartialEq)]
pub struct CoinDaily {
    pub coin: String,
    /// Modeled network-average cost of one TH/s for the day, USD.
    pub unit_cost: f64,
    pub pfr: f64,
    pub ppr: f64,
    /// Equilibrium spending share `b_k / K` of the representative miner.
    pub share: f64,
}

/// Equilibrium allocations and profitability for one day.
#[derive(Debug, Clone, PartialEq)]
pub struct DailyReport {
    pub date: NaiveDate,
    pub coins: Vec<CoinDaily>,
}

impl DailyReport {
    pub const CSV_HEADER: &'static str = "date,coin,unit_cost,pfr,ppr,share";

    pub fn csv_rows(&self) -> String {
        let mut out = String::new();
        for coin in &self.coins {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                self.date, coin.coin, coin.unit_cost, coin.pfr, coin.ppr, coin.share
            ));
        }
        out
    }
}
