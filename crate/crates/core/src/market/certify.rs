//! Convex-program verification of proportional-response fixed points.
//!
//! The spending economy is the minimizer of a Shmyrev-type convex objective;
//! this module evaluates that objective, the equal-marginal-return (KKT)
//! conditions of its optimum, and the Bregman/KL machinery behind the
//! mirror-descent convergence rate. Everything here is an independent check
//! on the solver, not part of the iteration itself.

use super::{Economy, MarketError, RateMode, SpendingMatrix};

/// KKT residuals of a candidate equilibrium.
#[derive(Debug, Clone, PartialEq)]
pub struct KktReport {
    /// Largest per-miner relative spread of the marginal returns `z_ik`.
    pub residual: f64,
    /// Largest relative violation of the unspent-budget branch conditions.
    pub complementarity: f64,
}

/// Mirror-descent rate check: objective gap after `T` steps against the
/// divergence-over-T bound.
#[derive(Debug, Clone, PartialEq)]
pub struct MdRateReport {
    pub gap: f64,
    pub bound: f64,
}

impl MdRateReport {
    /// Multiplicative slack for the inequality itself plus an absolute floor
    /// for starts at the optimum, where both sides are pure rounding noise.
    pub fn holds(&self) -> bool {
        self.gap <= self.bound * (1.0 + 1e-6) + 1e-12
    }
}

/// `KL(new || old) = sum new_j ln(new_j/old_j) - sum new_j + sum old_j`.
///
/// The reference must be strictly positive; zero entries of `new` contribute
/// `0 ln 0 := 0`.
pub fn kl_divergence(new: &[f64], old: &[f64]) -> Result<f64, MarketError> {
    if new.len() != old.len() {
        return Err(MarketError::RatesShape {
            n: 1,
            m: old.len(),
            got_n: 1,
            got_m: new.len(),
        });
    }
    let mut sum = 0.0;
    for (index, (&b_new, &b_old)) in new.iter().zip(old).enumerate() {
        if !b_old.is_finite() || b_old <= 0.0 {
            return Err(MarketError::NonPositiveReference {
                index,
                value: b_old,
            });
        }
        if b_new > 0.0 {
            sum += b_new * (b_new / b_old).ln();
        }
        sum += b_old - b_new;
    }
    Ok(sum)
}

impl Economy {
    /// Coefficient on `b_ik` inside the convex objective: the constant
    /// per-dollar value of chain `k` to miner `i` under the given rate mode.
    fn objective_coefficient(&self, mode: &RateMode, i: usize, k: usize) -> f64 {
        match mode {
            RateMode::Endogenous => self.revenue(k) / self.unit_cost(i, k),
            RateMode::Exogenous(rates) => rates.get(i, k),
        }
    }

    /// Marginal return `z_ik = u_ik / b_ik` of miner `i` on chain `k`, with
    /// the per-miner spread and branch conditions of the optimum.
    ///
    /// At an interior equilibrium the `z_ik` are identical across chains for
    /// each miner and match `(K_i - w_i)^(rho_i - 1)` when budget is left
    /// unspent (or dominate it when the budget is exhausted). A zero spending
    /// entry against a positive rate makes the residual infinite: interior
    /// spending is part of the equilibrium characterisation.
    pub fn kkt_residual(
        &self,
        spending: &SpendingMatrix,
        mode: &RateMode,
    ) -> Result<KktReport, MarketError> {
        self.check_shape(spending)?;
        let rates = match mode {
            RateMode::Endogenous => self.effective_rates_from_spending(spending)?,
            RateMode::Exogenous(rates) => rates.clone(),
        };
        let mut residual: f64 = 0.0;
        let mut complementarity: f64 = 0.0;
        for i in 0..self.miners() {
            let rho = self.rho(i);
            let mut z_min = f64::INFINITY;
            let mut z_max = f64::NEG_INFINITY;
            let mut z_sum = 0.0;
            for k in 0..self.chains() {
                let b = spending.get(i, k);
                if !b.is_finite() || b <= 0.0 {
                    return Ok(KktReport {
                        residual: f64::INFINITY,
                        complementarity: f64::INFINITY,
                    });
                }
                let z = (rates.get(i, k) * b).powf(rho) / b;
                z_min = z_min.min(z);
                z_max = z_max.max(z);
                z_sum += z;
            }
            let z_mean = z_sum / self.chains() as f64;
            residual = residual.max((z_max - z_min) / z_mean);

            let cap = self.capacity(i);
            let w = spending.unspent(i);
            let committed = spending.spent(i);
            let threshold = if rho == 1.0 {
                1.0
            } else {
                committed.powf(rho - 1.0)
            };
            let violation = if w > (1.0 - 1e-9) * cap {
                // Exited miner: returns must not beat keeping the budget.
                ((z_mean - threshold) / threshold).max(0.0)
            } else if w > 1e-9 * cap {
                // Interior unspent budget: marginal return must equal the
                // outside option exactly.
                (z_mean - threshold).abs() / threshold
            } else {
                // Exhausted budget: marginal return must dominate it.
                ((threshold - z_mean) / threshold).max(0.0)
            };
            complementarity = complementarity.max(violation);
        }
        Ok(KktReport {
            residual,
            complementarity,
        })
    }

    /// Value of the Shmyrev-type convex objective at `spending`.
    ///
    /// In endogenous mode this is the market program: it includes the
    /// `p_k ln p_k` coupling through the chain totals and the unspent-budget
    /// credit `w_i`. In exogenous mode both drop: the decoupled per-miner
    /// potential of the budget-constrained response keeps only the spending
    /// and committed-budget entropy terms. (The `w_i` credit is linear, so it
    /// leaves every Bregman divergence untouched, but it does shift the
    /// mirror map — only this split reproduces the proportional-response
    /// update in each mode.) Both versions are non-increasing along the
    /// corresponding trajectories.
    pub fn shmyrev_objective(
        &self,
        spending: &SpendingMatrix,
        mode: &RateMode,
    ) -> Result<f64, MarketError> {
        self.check_shape(spending)?;
        let mut value = 0.0;
        for i in 0..self.miners() {
            let rho = self.rho(i);
            let weight = (rho - 1.0) / rho;
            for k in 0..self.chains() {
                let b = spending.get(i, k);
                if !b.is_finite() || b <= 0.0 {
                    return Err(MarketError::EvaluationDomain {
                        term: "spending log",
                        miner: i,
                        chain: k,
                    });
                }
                value -= b * (self.objective_coefficient(mode, i, k).ln() + weight * b.ln());
            }
            let committed = spending.spent(i);
            if matches!(mode, RateMode::Endogenous) {
                value += spending.unspent(i);
            }
            if rho != 1.0 {
                if !committed.is_finite() || committed <= 0.0 {
                    return Err(MarketError::EvaluationDomain {
                        term: "committed budget log",
                        miner: i,
                        chain: 0,
                    });
                }
                value += weight * committed * committed.ln();
            }
        }
        if matches!(mode, RateMode::Endogenous) {
            for (k, &p) in spending.chain_totals().iter().enumerate() {
                if !p.is_finite() || p <= 0.0 {
                    return Err(MarketError::EvaluationDomain {
                        term: "chain total log",
                        miner: 0,
                        chain: k,
                    });
                }
                value += p * p.ln();
            }
        }
        Ok(value)
    }

    /// Gradient of the objective in the spending coordinates, with unspent
    /// budgets and chain totals eliminated through the feasibility constraints.
    fn objective_gradient(
        &self,
        spending: &SpendingMatrix,
        mode: &RateMode,
    ) -> Result<Vec<f64>, MarketError> {
        self.check_shape(spending)?;
        let (n, m) = (self.miners(), self.chains());
        let mut grad = vec![0.0; n * m];
        for i in 0..n {
            let rho = self.rho(i);
            let weight = (rho - 1.0) / rho;
            let committed = spending.spent(i);
            if !committed.is_finite() || committed <= 0.0 {
                return Err(MarketError::EvaluationDomain {
                    term: "committed budget log",
                    miner: i,
                    chain: 0,
                });
            }
            let committed_term = weight * committed.ln();
            for k in 0..m {
                let b = spending.get(i, k);
                if !b.is_finite() || b <= 0.0 {
                    return Err(MarketError::EvaluationDomain {
                        term: "spending log",
                        miner: i,
                        chain: k,
                    });
                }
                let mut g =
                    -self.objective_coefficient(mode, i, k).ln() - weight * b.ln() + committed_term;
                if matches!(mode, RateMode::Endogenous) {
                    g += spending.chain_totals()[k].ln();
                }
                grad[i * m + k] = g;
            }
        }
        Ok(grad)
    }

    /// Bregman divergence of the convex objective between two interior
    /// spendings: `F(new) - F(old) - <grad F(old), new - old>`.
    ///
    /// Sandwiched between 0 and the `1/rho`-scaled KL divergence, which is
    /// exactly the 1-Bregman-convexity the mirror-descent rate rests on.
    pub fn bregman_gap(
        &self,
        new: &SpendingMatrix,
        old: &SpendingMatrix,
        mode: &RateMode,
    ) -> Result<f64, MarketError> {
        let f_new = self.shmyrev_objective(new, mode)?;
        let f_old = self.shmyrev_objective(old, mode)?;
        let grad = self.objective_gradient(old, mode)?;
        let mut inner = 0.0;
        for (idx, g) in grad.iter().enumerate() {
            inner += g * (new.flat()[idx] - old.flat()[idx]);
        }
        Ok(f_new - f_old - inner)
    }

    /// Capacity-weighted divergence `sum_i (1/rho_i) KL(new_i || old_i)`, the
    /// Bregman regularizer the proportional response descends against.
    pub fn scaled_kl(
        &self,
        new: &SpendingMatrix,
        old: &SpendingMatrix,
    ) -> Result<f64, MarketError> {
        self.check_shape(new)?;
        self.check_shape(old)?;
        let mut total = 0.0;
        for i in 0..self.miners() {
            total += kl_divergence(new.row(i), old.row(i))? / self.rho(i);
        }
        Ok(total)
    }

    /// Checks the mirror-descent convergence rate: the objective gap after
    /// `t_steps` iterations from `b0` must sit below the scaled divergence
    /// from the optimum divided by `t_steps`.
    ///
    /// The reference optimum is taken from a longer run of `reference_iters`
    /// (default ten times `t_steps`) from the same start.
    pub fn md_rate_check(
        &self,
        b0: &SpendingMatrix,
        t_steps: usize,
        mode: &RateMode,
        reference_iters: Option<usize>,
    ) -> Result<MdRateReport, MarketError> {
        let reference_iters = reference_iters.unwrap_or(10 * t_steps);
        let mut current = b0.clone();
        for _ in 0..t_steps {
            current = self.pr_step(&current, mode)?;
        }
        let mut reference = b0.clone();
        for _ in 0..reference_iters {
            reference = self.pr_step(&reference, mode)?;
        }
        let gap =
            self.shmyrev_objective(&current, mode)? - self.shmyrev_objective(&reference, mode)?;
        let bound = self.scaled_kl(&reference, b0)? / t_steps as f64;
        Ok(MdRateReport { gap, bound })
    }
}
