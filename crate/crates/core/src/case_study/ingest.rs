//! Loaders for the three delimiter-separated input files.
//!
//! All parsers take the file contents as a string, enforce the documented
//! header exactly and report violations with 1-based line numbers. Fields are
//! plain comma-separated values without quoting.

use super::{CaseStudyError, EnergySchedule, MarketSeries, Observation, RigCatalog, RigSpec};
use chrono::NaiveDate;

const MARKET_HEADER: &str = "date,coin,hashrate_ths,revenue_usd";
const RIG_HEADER: &str = "coin,year,model,price_usd,hashrate_ths,power_w,lifespan_years";
const ENERGY_HEADER: &str = "start_date,end_date,usd_per_kwh";

/// Unit of the hashrate column in a market file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HashrateUnit {
    /// The documented schema: TH/s sustained over the day.
    #[default]
    ThPerSecond,
    /// TH per day, converted on ingestion by 1/86400.
    ThPerDay,
}

impl HashrateUnit {
    fn to_th_per_second(self, value: f64) -> f64 {
        match self {
            HashrateUnit::ThPerSecond => value,
            HashrateUnit::ThPerDay => value / 86_400.0,
        }
    }
}

fn parse_error(line: usize, message: impl Into<String>) -> CaseStudyError {
    CaseStudyError::Parse {
        line,
        message: message.into(),
    }
}

fn expect_header(text: &str, expected: &str) -> Result<(), CaseStudyError> {
    match text.lines().next() {
        Some(header) if header.trim_end() == expected => Ok(()),
        Some(header) => Err(parse_error(
            1,
            format!("expected header `{expected}`, got `{header}`"),
        )),
        None => Err(parse_error(1, "empty file")),
    }
}

fn split_columns(line: &str, count: usize, line_no: usize) -> Result<Vec<&str>, CaseStudyError> {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    if fields.len() != count {
        return Err(parse_error(
            line_no,
            format!("expected {count} columns, got {}", fields.len()),
        ));
    }
    Ok(fields)
}

fn parse_f64(field: &str, name: &str, line: usize) -> Result<f64, CaseStudyError> {
    field
        .parse::<f64>()
        .map_err(|_| parse_error(line, format!("invalid {name} `{field}`")))
}

fn parse_date(field: &str, name: &str, line: usize) -> Result<NaiveDate, CaseStudyError> {
    NaiveDate::parse_from_str(field, "%Y-%m-%d").map_err(|_| {
        parse_error(
            line,
            format!("invalid {name} `{field}` (expected YYYY-MM-DD)"),
        )
    })
}

/// Parses a market file with header `date,coin,hashrate_ths,revenue_usd`.
pub fn parse_market_csv(text: &str, unit: HashrateUnit) -> Result<MarketSeries, CaseStudyError> {
    expect_header(text, MARKET_HEADER)?;
    let mut series = MarketSeries::default();
    for (index, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let line_no = index + 1;
        let fields = split_columns(line, 4, line_no)?;
        let date = parse_date(fields[0], "date", line_no)?;
        let coin = fields[1].to_string();
        if coin.is_empty() {
            return Err(parse_error(line_no, "empty coin id"));
        }
        let hashrate = unit.to_th_per_second(parse_f64(fields[2], "hashrate", line_no)?);
        if !hashrate.is_finite() || hashrate <= 0.0 {
            return Err(CaseStudyError::NonPositiveHashrate {
                line: line_no,
                value: hashrate,
            });
        }
        let revenue = parse_f64(fields[3], "revenue", line_no)?;
        if !revenue.is_finite() || revenue < 0.0 {
            return Err(CaseStudyError::NegativeRevenue {
                line: line_no,
                value: revenue,
            });
        }
        series.insert(
            coin,
            Observation {
                date,
                hashrate,
                revenue,
            },
            line_no,
        )?;
    }
    if series.is_empty() {
        return Err(CaseStudyError::EmptySeries);
    }
    Ok(series)
}

/// Parses a rig catalog with header
/// `coin,year,model,price_usd,hashrate_ths,power_w,lifespan_years`.
pub fn parse_rigs_csv(text: &str) -> Result<RigCatalog, CaseStudyError> {
    expect_header(text, RIG_HEADER)?;
    let mut rigs = Vec::new();
    for (index, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let line_no = index + 1;
        let fields = split_columns(line, 7, line_no)?;
        let year = fields[1]
            .parse::<i32>()
            .map_err(|_| parse_error(line_no, format!("invalid year `{}`", fields[1])))?;
        rigs.push(
            RigSpec::new(
                fields[0],
                year,
                fields[2],
                parse_f64(fields[3], "price", line_no)?,
                parse_f64(fields[4], "hashrate", line_no)?,
                parse_f64(fields[5], "power", line_no)?,
                parse_f64(fields[6], "lifespan", line_no)?,
            )
            .map_err(|e| parse_error(line_no, e.to_string()))?,
        );
    }
    Ok(RigCatalog::new(rigs))
}

/// Parses an energy schedule with header `start_date,end_date,usd_per_kwh`.
pub fn parse_energy_csv(text: &str) -> Result<EnergySchedule, CaseStudyError> {
    expect_header(text, ENERGY_HEADER)?;
    let mut intervals = Vec::new();
    for (index, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let line_no = index + 1;
        let fields = split_columns(line, 3, line_no)?;
        intervals.push((
            parse_date(fields[0], "start date", line_no)?,
            parse_date(fields[1], "end date", line_no)?,
            parse_f64(fields[2], "price", line_no)?,
        ));
    }
    EnergySchedule::new(intervals)
}
