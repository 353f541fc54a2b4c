//! `mineq` — equilibrium analyses of mining economies from the command line.
//!
//! Every subcommand reads definition files, runs one analysis and emits a
//! delimiter-separated table (or line-delimited JSON records with
//! `--format records`). Outputs carry no timestamps: identical invocations
//! over identical inputs are byte-identical.

mod output;

use anyhow::{anyhow, bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use mineq::case_study::{
    daily_equilibrium, parse_energy_csv, parse_market_csv, parse_rigs_csv, HashrateUnit,
    MinerProfile, PipelineOptions,
};
use mineq::config::{parse_economy, parse_game};
use mineq::dynamics::{bifurcation_scan, simulate, DynamicsConfig, ScanAxis, Trace, UpdateRule};
use mineq::game::{AllocationVector, DeviationGrid, MiningGame, ParticipationMode};
use mineq::market::{Economy, RateMode, SolveOptions};
use mineq::sampling::random_interior_spending;
use output::{emit, OutputFormat};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_VALIDATION: u8 = 1;
const EXIT_NON_CONVERGENCE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "mineq",
    version,
    about = "Equilibria of blockchain mining economies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonOutput {
    /// Write the report here instead of standard output.
    #[arg(long, short = 'o')]
    output: Option<PathBuf>,
    /// Table format: delimiter-separated text or line-delimited JSON records.
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
}

#[derive(Subcommand)]
enum Command {
    /// Nash allocation of a single-chain mining game.
    Nash {
        /// Game definition file (TOML with `reward` and `costs`).
        #[arg(long, short = 'c')]
        config: PathBuf,
        /// How to treat miners violating the participation constraint.
        #[arg(long, value_enum, default_value_t = ParticipationFlag::Strict)]
        participation: ParticipationFlag,
        #[command(flatten)]
        out: CommonOutput,
    },
    /// Griefing-factor table over a grid of deviation sizes.
    Grief {
        #[arg(long, short = 'c')]
        config: PathBuf,
        /// Index of the deviating miner.
        #[arg(long, default_value_t = 0)]
        deviator: usize,
        /// Smallest deviation, as a fraction of the equilibrium aggregate.
        #[arg(long, default_value_t = 1e-3)]
        delta_min_frac: f64,
        /// Largest deviation, as a fraction of the equilibrium aggregate.
        #[arg(long, default_value_t = 2.0)]
        delta_max_frac: f64,
        #[arg(long, default_value_t = 50)]
        points: usize,
        #[command(flatten)]
        out: CommonOutput,
    },
    /// Non-griefable allocation with a grid check of its griefing factors.
    Esa {
        #[arg(long, short = 'c')]
        config: PathBuf,
        /// Deviation grid points per miner for the immunity check.
        #[arg(long, default_value_t = 200)]
        grid_points: usize,
        #[command(flatten)]
        out: CommonOutput,
    },
    /// Proportional-response equilibrium of a multi-chain economy.
    PrSolve {
        /// Economy definition file (TOML).
        #[arg(long, short = 'c')]
        config: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 100_000)]
        max_iter: usize,
        /// Fix per-chain aggregates at these values instead of recomputing
        /// them from the miners' own spending (comma-separated, one per chain).
        #[arg(long, value_delimiter = ',')]
        aggregates: Option<Vec<f64>>,
        /// Also write the per-iteration solver trace to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        out: CommonOutput,
    },
    /// Simulate gradient-ascent or best-response learning.
    Dynamics {
        #[arg(long, short = 'c')]
        config: PathBuf,
        #[arg(long, value_enum)]
        rule: RuleFlag,
        /// Learning rates for gradient ascent: one value for all miners or
        /// a comma-separated list.
        #[arg(long, value_delimiter = ',')]
        theta: Option<Vec<f64>>,
        #[arg(long, default_value_t = 400)]
        steps: usize,
        /// Initial allocations (comma-separated); defaults to 0.1 / c_i.
        #[arg(long, value_delimiter = ',')]
        init: Option<Vec<f64>>,
        #[command(flatten)]
        out: CommonOutput,
    },
    /// Attractor scan over a learning-rate or cost-asymmetry grid.
    Bifurcate {
        #[arg(long, short = 'c')]
        config: PathBuf,
        #[arg(long, value_enum)]
        axis: AxisFlag,
        /// Update rule for the asymmetry axis (the theta axis implies
        /// gradient ascent).
        #[arg(long, value_enum, default_value_t = RuleFlag::Br)]
        rule: RuleFlag,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 60)]
        points: usize,
        /// Post-burn-in samples recorded per grid point.
        #[arg(long, default_value_t = 400)]
        samples: usize,
        #[arg(long, default_value_t = 50)]
        burn_in: usize,
        #[command(flatten)]
        out: CommonOutput,
    },
    /// Per-day equilibrium allocations from market, rig and energy data.
    CaseStudy {
        /// Market observations (`date,coin,hashrate_ths,revenue_usd`).
        #[arg(long)]
        market: PathBuf,
        /// Rig catalog (`coin,year,model,price_usd,hashrate_ths,power_w,lifespan_years`).
        #[arg(long)]
        rigs: PathBuf,
        /// Energy schedule (`start_date,end_date,usd_per_kwh`).
        #[arg(long)]
        energy: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        rho: f64,
        /// Miner budget in USD.
        #[arg(long, default_value_t = 1000.0)]
        capacity: f64,
        /// Miner unit cost relative to the modeled network average.
        #[arg(long, default_value_t = 1.0)]
        cost_factor: f64,
        #[arg(long, value_enum, default_value_t = HashrateUnitFlag::Ths)]
        hashrate_unit: HashrateUnitFlag,
        /// Seed each day's solve with the previous day's solution.
        #[arg(long)]
        warm_start: bool,
        /// Override the modeled network-average cost for a coin
        /// (`coin=value`, repeatable).
        #[arg(long, value_parser = parse_cbar_override)]
        cbar: Vec<(String, f64)>,
        #[command(flatten)]
        out: CommonOutput,
    },
    /// Run the verification oracles against an economy and report per check.
    Verify {
        #[arg(long, short = 'c')]
        config: PathBuf,
        /// Seed for the randomized checks.
        #[arg(long, default_value_t = 17)]
        seed: u64,
        /// Random pairs per randomized check.
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[command(flatten)]
        out: CommonOutput,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ParticipationFlag {
    Strict,
    AutoDrop,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleFlag {
    Ga,
    Br,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisFlag {
    Theta,
    Asymmetry,
}

#[derive(Clone, Copy, ValueEnum)]
enum HashrateUnitFlag {
    /// TH/s sustained over the day (the documented schema).
    Ths,
    /// TH per day; divided by 86400 on ingestion.
    Thday,
}

fn parse_cbar_override(raw: &str) -> Result<(String, f64), String> {
    let (coin, value) = raw
        .split_once('=')
        .ok_or_else(|| format!("expected coin=value, got `{raw}`"))?;
    let value: f64 = value
        .parse()
        .map_err(|_| format!("invalid override value `{value}`"))?;
    Ok((coin.to_string(), value))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_VALIDATION,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(EXIT_VALIDATION)
        }
    }
}

fn load_game(path: &Path) -> Result<MiningGame> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read game file {}", path.display()))?;
    parse_game(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn load_economy(path: &Path) -> Result<Economy> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read economy file {}", path.display()))?;
    parse_economy(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Nash {
            config,
            participation,
            out,
        } => {
            let game = load_game(&config)?;
            let mode = match participation {
                ParticipationFlag::Strict => ParticipationMode::Strict,
                ParticipationFlag::AutoDrop => ParticipationMode::AutoDrop,
            };
            let nash = game.nash_allocation_with(mode)?;
            let mut csv = String::from("miner,cost,nash_allocation,utility_at_nash\n");
            for i in 0..game.n() {
                csv.push_str(&format!(
                    "{i},{},{},{}\n",
                    game.cost(i),
                    nash.get(i),
                    game.utility(&nash, i)?
                ));
            }
            emit(&out.output, out.format, &csv)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Grief {
            config,
            deviator,
            delta_min_frac,
            delta_max_frac,
            points,
            out,
        } => {
            let game = load_game(&config)?;
            if points < 2 {
                bail!("--points must be at least 2");
            }
            let nash = game.nash_allocation()?;
            let aggregate = nash.total();
            let mut csv = String::from("delta,deviator,own_loss,network_loss,gf_total,gf_closed\n");
            for t in 0..points {
                let frac = t as f64 / (points as f64 - 1.0);
                let delta = (delta_min_frac + frac * (delta_max_frac - delta_min_frac)) * aggregate;
                let report =
                    game.griefing_factor_direct(&nash, deviator, nash.get(deviator) + delta)?;
                let network_loss: f64 = report.victim_losses.iter().sum();
                csv.push_str(&format!(
                    "{delta},{deviator},{},{network_loss},{},{}\n",
                    report.own_loss,
                    report.gf_total,
                    game.griefing_factor_closed(delta)?
                ));
            }
            emit(&out.output, out.format, &csv)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Esa {
            config,
            grid_points,
            out,
        } => {
            let game = load_game(&config)?;
            let nash = game.nash_allocation()?;
            let y = game.non_griefable_allocation()?;
            let grid = DeviationGrid {
                points_per_miner: grid_points,
                ..DeviationGrid::default()
            };
            let scan = game.is_individually_griefable(&y, &grid)?;
            let mut csv = String::from(
                "miner,cost,nash_allocation,nongriefable_allocation,grid_sup_gf,griefable\n",
            );
            for i in 0..game.n() {
                csv.push_str(&format!(
                    "{i},{},{},{},{},{}\n",
                    game.cost(i),
                    nash.get(i),
                    y.get(i),
                    scan.sup_gf,
                    scan.griefable
                ));
            }
            emit(&out.output, out.format, &csv)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::PrSolve {
            config,
            tol,
            max_iter,
            aggregates,
            trace,
            out,
        } => {
            let economy = load_economy(&config)?;
            let mode = match aggregates {
                Some(values) => RateMode::Exogenous(economy.effective_rates_exogenous(&values)?),
                None => RateMode::Endogenous,
            };
            let options = SolveOptions {
                tol,
                max_iter,
                mode,
                kkt_every_iter: trace.is_some(),
            };
            let (solution, cert) =
                economy.solve_equilibrium(&economy.uniform_half_spending(), &options)?;
            let mut csv = String::from("miner,chain,spending,share\n");
            for i in 0..economy.miners() {
                for k in 0..economy.chains() {
                    csv.push_str(&format!(
                        "{i},{k},{},{}\n",
                        solution.get(i, k),
                        solution.get(i, k) / economy.capacity(i)
                    ));
                }
            }
            emit(&out.output, out.format, &csv)?;
            if let Some(path) = trace {
                std::fs::write(&path, cert.trace_to_csv())
                    .with_context(|| format!("cannot write trace {}", path.display()))?;
            }
            eprintln!(
                "iterations: {}, kkt residual: {:e}, complementarity: {:e}, objective: {}",
                cert.iterations,
                cert.kkt_residual,
                cert.complementarity_residual,
                cert.objective_value
            );
            if cert.converged {
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("solver did not converge within {max_iter} iterations");
                Ok(ExitCode::from(EXIT_NON_CONVERGENCE))
            }
        }
        Command::Dynamics {
            config,
            rule,
            theta,
            steps,
            init,
            out,
        } => {
            let game = load_game(&config)?;
            let trace = run_dynamics(&game, rule, theta, steps, init)?;
            emit(&out.output, out.format, &trace.to_csv())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Bifurcate {
            config,
            axis,
            rule,
            from,
            to,
            points,
            samples,
            burn_in,
            out,
        } => {
            let game = load_game(&config)?;
            if points < 2 {
                bail!("--points must be at least 2");
            }
            let (axis, base_rule) = match axis {
                AxisFlag::Theta => (
                    ScanAxis::LearningRate,
                    UpdateRule::GradientAscent {
                        learning_rates: vec![from.max(1e-6); game.n()],
                    },
                ),
                AxisFlag::Asymmetry => (
                    ScanAxis::CostAsymmetry,
                    match rule {
                        RuleFlag::Br => UpdateRule::BestResponse,
                        RuleFlag::Ga => UpdateRule::GradientAscent {
                            learning_rates: vec![0.05; game.n()],
                        },
                    },
                ),
            };
            let base = DynamicsConfig::new(
                base_rule,
                game.clone(),
                DynamicsConfig::default_init(&game),
                samples,
                burn_in,
            )?;
            let grid: Vec<f64> = (0..points)
                .map(|t| from + t as f64 * (to - from) / (points as f64 - 1.0))
                .collect();
            let scan = bifurcation_scan(&base, axis, &grid)?;
            emit(&out.output, out.format, &scan.to_csv())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::CaseStudy {
            market,
            rigs,
            energy,
            rho,
            capacity,
            cost_factor,
            hashrate_unit,
            warm_start,
            cbar,
            out,
        } => {
            let unit = match hashrate_unit {
                HashrateUnitFlag::Ths => HashrateUnit::ThPerSecond,
                HashrateUnitFlag::Thday => HashrateUnit::ThPerDay,
            };
            let market_text = std::fs::read_to_string(&market)
                .with_context(|| format!("cannot read market file {}", market.display()))?;
            let series = parse_market_csv(&market_text, unit)?;
            let rigs_text = std::fs::read_to_string(&rigs)
                .with_context(|| format!("cannot read rig file {}", rigs.display()))?;
            let catalog = parse_rigs_csv(&rigs_text)?;
            let energy_text = std::fs::read_to_string(&energy)
                .with_context(|| format!("cannot read energy file {}", energy.display()))?;
            let schedule = parse_energy_csv(&energy_text)?;
            let miner = MinerProfile::new(capacity, rho, cost_factor)?;
            let mut options = PipelineOptions {
                warm_start,
                ..Default::default()
            };
            options.cbar_override.extend(cbar);
            let run = daily_equilibrium(&series, &catalog, &schedule, &miner, &options)?;
            for (date, coin) in &run.skipped {
                eprintln!("skipped {date}: no observation for {coin}");
            }
            for warning in &run.warnings {
                eprintln!("warning: {warning}");
            }
            emit(&out.output, out.format, &run.to_csv())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            config,
            seed,
            trials,
            out,
        } => {
            let economy = load_economy(&config)?;
            let (csv, all_passed) = verify_economy(&economy, seed, trials)?;
            emit(&out.output, out.format, &csv)?;
            if all_passed {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(EXIT_VALIDATION))
            }
        }
    }
}

fn run_dynamics(
    game: &MiningGame,
    rule: RuleFlag,
    theta: Option<Vec<f64>>,
    steps: usize,
    init: Option<Vec<f64>>,
) -> Result<Trace> {
    let rule = match rule {
        RuleFlag::Br => UpdateRule::BestResponse,
        RuleFlag::Ga => {
            let rates = match theta {
                None => bail!("--rule ga requires --theta"),
                Some(values) if values.len() == 1 => vec![values[0]; game.n()],
                Some(values) => values,
            };
            UpdateRule::GradientAscent {
                learning_rates: rates,
            }
        }
    };
    let init = match init {
        Some(values) => AllocationVector::new(values)?,
        None => DynamicsConfig::default_init(game),
    };
    let config = DynamicsConfig::new(rule, game.clone(), init, steps, 0)?;
    Ok(simulate(&config)?)
}

/// Runs the oracle suite: KKT at the solved point, objective descent along
/// the trajectory, the Bregman/KL sandwich and refinement inequalities on
/// random pairs, and the mirror-descent rate bound.
fn verify_economy(economy: &Economy, seed: u64, trials: usize) -> Result<(String, bool)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows: Vec<(&str, bool, String)> = Vec::new();

    let b0 = economy.uniform_half_spending();
    let (_, cert) = economy.solve_equilibrium(&b0, &SolveOptions::default())?;
    rows.push((
        "solver_converged",
        cert.converged,
        format!("iterations {}", cert.iterations),
    ));
    rows.push((
        "kkt_residual",
        cert.kkt_residual < 1e-6,
        format!("{:e}", cert.kkt_residual),
    ));
    rows.push((
        "complementarity",
        cert.complementarity_residual < 1e-6,
        format!("{:e}", cert.complementarity_residual),
    ));
    let descent = cert
        .trace
        .windows(2)
        .all(|pair| pair[1].objective <= pair[0].objective + 1e-10);
    rows.push((
        "objective_descent",
        descent,
        format!("{} iterations traced", cert.trace.len()),
    ));

    let mut sandwich_ok = true;
    let mut worst_gap = 0.0f64;
    for _ in 0..trials {
        let old = random_interior_spending(&mut rng, economy);
        let new = random_interior_spending(&mut rng, economy);
        let gap = economy.bregman_gap(&new, &old, &RateMode::Endogenous)?;
        let bound = economy.scaled_kl(&new, &old)?;
        if gap < -1e-10 || gap > bound * (1.0 + 1e-10) + 1e-10 {
            sandwich_ok = false;
        }
        worst_gap = worst_gap.max(gap - bound);
    }
    rows.push((
        "bregman_sandwich",
        sandwich_ok,
        format!("{trials} pairs, worst slack {worst_gap:e}"),
    ));

    let mut refinement_ok = true;
    for _ in 0..trials {
        let n = economy.miners().max(2);
        let old = random_interior_spending(&mut rng, economy);
        let new = random_interior_spending(&mut rng, economy);
        let coarse_old: Vec<f64> = (0..n).map(|i| old.row(i).iter().sum()).collect();
        let coarse_new: Vec<f64> = (0..n).map(|i| new.row(i).iter().sum()).collect();
        let coarse = mineq::market::kl_divergence(&coarse_new, &coarse_old)?;
        let fine = mineq::market::kl_divergence(new.flat(), old.flat())?;
        if coarse > fine + 1e-12 {
            refinement_ok = false;
        }
    }
    rows.push((
        "kl_refinement",
        refinement_ok,
        format!("{trials} refinements"),
    ));

    let rate = economy.md_rate_check(&b0, 10, &RateMode::Endogenous, None)?;
    rows.push((
        "md_rate_bound",
        rate.holds(),
        format!("gap {:e} vs bound {:e}", rate.gap, rate.bound),
    ));

    let mut csv = String::from("check,status,detail\n");
    let mut all_passed = true;
    for (check, ok, detail) in &rows {
        all_passed &= ok;
        csv.push_str(&format!(
            "{check},{},{detail}\n",
            if *ok { "pass" } else { "fail" }
        ));
    }
    Ok((csv, all_passed))
}
