//! TOML definition files for games and economies.
//!
//! A game file holds `reward` (optional, default 1.0) and `costs`:
//!
//! ```toml
//! reward = 1.0
//! costs = [1.0, 1.0, 1.5]
//! ```
//!
//! An economy file holds `revenues`, `capacities`, `rho` and `unit_costs`
//! as one row per miner:
//!
//! ```toml
//! revenues = [10.0, 8.0]
//! capacities = [1.0, 2.0]
//! rho = [0.5, 1.0]
//! unit_costs = [[1.0, 2.0], [1.5, 1.0]]
//! ```

use crate::game::{GameError, MiningGame};
use crate::market::{Economy, MarketError};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("malformed definition file: {0}")]
    Syntax(String),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Market(#[from] MarketError),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GameFile {
    #[serde(default = "default_reward")]
    reward: f64,
    costs: Vec<f64>,
}

fn default_reward() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EconomyFile {
    revenues: Vec<f64>,
    capacities: Vec<f64>,
    rho: Vec<f64>,
    unit_costs: Vec<Vec<f64>>,
}

/// Parses a game definition from TOML text.
pub fn parse_game(text: &str) -> Result<MiningGame, ConfigError> {
    let file: GameFile = toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    Ok(MiningGame::new(file.costs, file.reward)?)
}

/// Parses an economy definition from TOML text.
pub fn parse_economy(text: &str) -> Result<Economy, ConfigError> {
    let file: EconomyFile = toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    Ok(Economy::new(
        file.revenues,
        file.unit_costs,
        file.capacities,
        file.rho,
    )?)
}
