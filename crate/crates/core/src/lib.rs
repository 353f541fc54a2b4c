//! Equilibrium analysis of blockchain mining economies.
//!
//! The crate is organised around four models that share a common cast of
//! characters (miners with per-unit costs, chains paying out revenue):
//!
//! * [`game`] — the strategic contest on a single chain: closed-form Nash
//!   allocations, griefing factors, non-griefable allocations, break-even
//!   deviations and expenditure identities.
//! * [`market`] — the multi-chain spending economy with quasi-CES utilities:
//!   the proportional-response solver plus the convex-program machinery
//!   (Shmyrev objective, KKT residuals, Bregman/KL bounds) used to certify
//!   its fixed points.
//! * [`dynamics`] — gradient-ascent and best-response learning on the
//!   single-chain game, with bifurcation scans over step size and cost
//!   asymmetry.
//! * [`case_study`] — an empirical pipeline that turns mining-rig specs,
//!   energy prices and per-coin hashrate/revenue series into daily unit
//!   costs, profitability ratios and equilibrium spending shares.
//!
//! Everything is a pure function of its inputs; values are immutable after
//! construction and safe to share across threads. File formats accepted and
//! emitted by the toolkit live in [`config`] (TOML definitions) and in the
//! `to_csv`/`parse` helpers of the individual modules.
//!
//! ```
//! use mineq::MiningGame;
//!
//! // Two equal-cost miners splitting a unit reward.
//! let game = MiningGame::normalized(vec![1.0, 1.0])?;
//! let nash = game.nash_allocation()?;
//! assert_eq!(nash.values(), &[0.25, 0.25]);
//!
//! // Committing 0.1 extra resources at equilibrium costs the deviator one
//! // unit of utility for every five it destroys elsewhere.
//! let gf = game.griefing_factor_closed(0.1)?;
//! assert_eq!(gf, 5.0);
//! # Ok::<(), mineq::game::GameError>(())
//! ```

pub mod case_study;
pub mod config;
pub mod dynamics;
pub mod game;
pub mod market;
pub mod sampling;

pub use game::{AllocationVector, MiningGame, ParticipationMode};
pub use market::{Economy, EffectiveRates, RateMode, SpendingMatrix};
