//! Multi-chain mining economy with quasi-CES utilities.
//!
//! Miners hold monetary budgets and spend them across chains; each chain pays
//! out its revenue in proportion to spending. Under the large-market reading
//! each miner takes the per-chain aggregate as given, which turns the system
//! into a Fisher-market style spending economy. The proportional-response
//! iteration ([`Economy::pr_step`], [`Economy::solve_equilibrium`]) computes
//! its equilibria; the convex-program machinery ([`Economy::kkt_residual`],
//! [`Economy::shmyrev_objective`], [`Economy::bregman_gap`]) verifies them.

mod certify;
mod solver;

pub use certify::{kl_divergence, KktReport, MdRateReport};
pub use solver::{EquilibriumCertificate, SolveOptions, TracePoint};

use thiserror::Error;

/// Spendings below this fraction of a miner's capacity are floored before
/// exponentiation so that underflow cannot extinguish a chain the dynamics
/// keep interior.
pub const SPENDING_FLOOR_FRACTION: f64 = 1e-300;

#[derive(Debug, Error, PartialEq)]
pub enum MarketError {
    #[error("economy needs at least one miner and one chain, got {miners} x {chains}")]
    EmptyEconomy { miners: usize, chains: usize },
    #[error("revenue of chain {chain} must be strictly positive, got {value}")]
    NonPositiveRevenue { chain: usize, value: f64 },
    #[error("unit cost of miner {miner} on chain {chain} must be strictly positive, got {value}")]
    NonPositiveUnitCost {
        miner: usize,
        chain: usize,
        value: f64,
    },
    #[error("capacity of miner {miner} must be strictly positive, got {value}")]
    NonPositiveCapacity { miner: usize, value: f64 },
    #[error("substitution parameter of miner {miner} must lie in (0, 1], got {value}")]
    RhoOutOfRange { miner: usize, value: f64 },
    #[error("cost matrix row {row} has {got} entries, expected {expected}")]
    RaggedCostMatrix {
        row: usize,
        expected: usize,
        got: usize,
    },
    #[error("spending matrix is {got_n} x {got_m}, economy is {n} x {m}")]
    SpendingShape {
        n: usize,
        m: usize,
        got_n: usize,
        got_m: usize,
    },
    #[error("spending of miner {miner} on chain {chain} must be non-negative, got {value}")]
    NegativeSpending {
        miner: usize,
        chain: usize,
        value: f64,
    },
    #[error("spending of miner {miner} exceeds capacity {capacity} by more than slack: {spent}")]
    OverCapacity {
        miner: usize,
        capacity: f64,
        spent: f64,
    },
    #[error("proportional response requires strictly positive spending; miner {miner} chain {chain} is {value}")]
    NonPositiveSpending {
        miner: usize,
        chain: usize,
        value: f64,
    },
    #[error("chain {chain} has zero aggregate; effective rates are undefined")]
    DegenerateChain { chain: usize },
    #[error("exogenous aggregate for chain {chain} must be strictly positive, got {value}")]
    NonPositiveAggregate { chain: usize, value: f64 },
    #[error("{term} is outside the objective's domain at miner {miner}, chain {chain}")]
    EvaluationDomain {
        term: &'static str,
        miner: usize,
        chain: usize,
    },
    #[error("KL divergence needs a strictly positive reference; entry {index} is {value}")]
    NonPositiveReference { index: usize, value: f64 },
    #[error("rates matrix is {got_n} x {got_m}, economy is {n} x {m}")]
    RatesShape {
        n: usize,
        m: usize,
        got_n: usize,
        got_m: usize,
    },
}

/// A multi-chain mining economy: per-chain revenues, per-miner-per-chain unit
/// costs, monetary capacities and substitution parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Economy {
    revenues: Vec<f64>,
    unit_costs: Vec<f64>, // row-major n x m
    capacities: Vec<f64>,
    rho: Vec<f64>,
}

impl Economy {
    /// Builds an economy from per-miner cost rows.
    pub fn new(
        revenues: Vec<f64>,
        unit_costs: Vec<Vec<f64>>,
        capacities: Vec<f64>,
        rho: Vec<f64>,
    ) -> Result<Self, MarketError> {
        let n = capacities.len();
        let m = revenues.len();
        if n == 0 || m == 0 || unit_costs.len() != n || rho.len() != n {
            return Err(MarketError::EmptyEconomy {
                miners: n.min(unit_costs.len()).min(rho.len()),
                chains: m,
            });
        }
        for (k, &v) in revenues.iter().enumerate() {
            if !(v.is_finite() && v > 0.0) {
                return Err(MarketError::NonPositiveRevenue { chain: k, value: v });
            }
        }
        let mut flat = Vec::with_capacity(n * m);
        for (i, row) in unit_costs.iter().enumerate() {
            if row.len() != m {
                return Err(MarketError::RaggedCostMatrix {
                    row: i,
                    expected: m,
                    got: row.len(),
                });
            }
            for (k, &c) in row.iter().enumerate() {
                if !(c.is_finite() && c > 0.0) {
                    return Err(MarketError::NonPositiveUnitCost {
                        miner: i,
                        chain: k,
                        value: c,
                    });
                }
                flat.push(c);
            }
        }
        for (i, &k) in capacities.iter().enumerate() {
            if !(k.is_finite() && k > 0.0) {
                return Err(MarketError::NonPositiveCapacity { miner: i, value: k });
            }
        }
        for (i, &r) in rho.iter().enumerate() {
            if !(r.is_finite() && r > 0.0 && r <= 1.0) {
                // Negative or zero substitution parameters fall outside the
                // convex-program framework and are rejected at construction.
                return Err(MarketError::RhoOutOfRange { miner: i, value: r });
            }
        }
        Ok(Self {
            revenues,
            unit_costs: flat,
            capacities,
            rho,
        })
    }

    pub fn miners(&self) -> usize {
        self.capacities.len()
    }

    pub fn chains(&self) -> usize {
        self.revenues.len()
    }

    pub fn revenue(&self, k: usize) -> f64 {
        self.revenues[k]
    }

    pub fn revenues(&self) -> &[f64] {
        &self.revenues
    }

    pub fn unit_cost(&self, i: usize, k: usize) -> f64 {
        self.unit_costs[i * self.chains() + k]
    }

    pub fn capacity(&self, i: usize) -> f64 {
        self.capacities[i]
    }

    pub fn capacities(&self) -> &[f64] {
        &self.capacities
    }

    pub fn rho(&self, i: usize) -> f64 {
        self.rho[i]
    }

    pub fn rhos(&self) -> &[f64] {
        &self.rho
    }

    /// Per-dollar return coefficients `v_ik = v_k / (X_k c_ik)` where the
    /// aggregate `X_k` is the current total spending on chain `k`.
    pub fn effective_rates_from_spending(
        &self,
        spending: &SpendingMatrix,
    ) -> Result<EffectiveRates, MarketError> {
        self.check_shape(spending)?;
        for (k, &total) in spending.chain_totals().iter().enumerate() {
            if !total.is_finite() || total <= 0.0 {
                return Err(MarketError::DegenerateChain { chain: k });
            }
        }
        self.rates_from_aggregates(spending.chain_totals())
    }

    /// Per-dollar return coefficients against fixed, observed aggregates.
    ///
    /// Under the large-market flag the per-chain totals are exogenous inputs
    /// and are not recomputed from the miners' own spending.
    pub fn effective_rates_exogenous(
        &self,
        aggregates: &[f64],
    ) -> Result<EffectiveRates, MarketError> {
        if aggregates.len() != self.chains() {
            return Err(MarketError::RatesShape {
                n: self.miners(),
                m: self.chains(),
                got_n: self.miners(),
                got_m: aggregates.len(),
            });
        }
        for (k, &x) in aggregates.iter().enumerate() {
            if !(x.is_finite() && x > 0.0) {
                return Err(MarketError::NonPositiveAggregate { chain: k, value: x });
            }
        }
        self.rates_from_aggregates(aggregates)
    }

    fn rates_from_aggregates(&self, aggregates: &[f64]) -> Result<EffectiveRates, MarketError> {
        let (n, m) = (self.miners(), self.chains());
        let mut v = Vec::with_capacity(n * m);
        for i in 0..n {
            for (k, &aggregate) in aggregates.iter().enumerate().take(m) {
                v.push(self.revenue(k) / (aggregate * self.unit_cost(i, k)));
            }
        }
        Ok(EffectiveRates { n, m, v })
    }

    /// Quasi-CES payoff of miner `i` for per-chain spending `b_i` at the given
    /// rates: `(sum_k (v_ik b_ik)^rho)^(1/rho) - sum_k b_ik`.
    ///
    /// With `rho = 1` this reduces exactly to the quasi-linear form.
    pub fn quasi_ces_utility(
        &self,
        i: usize,
        b_i: &[f64],
        rates: &EffectiveRates,
    ) -> Result<f64, MarketError> {
        let m = self.chains();
        if b_i.len() != m || rates.n != self.miners() || rates.m != m {
            return Err(MarketError::RatesShape {
                n: self.miners(),
                m,
                got_n: rates.n,
                got_m: b_i.len(),
            });
        }
        let rho = self.rho(i);
        let spent: f64 = b_i.iter().sum();
        if rho == 1.0 {
            let revenue: f64 = (0..m).map(|k| rates.get(i, k) * b_i[k]).sum();
            return Ok(revenue - spent);
        }
        let aggregate: f64 = (0..m).map(|k| (rates.get(i, k) * b_i[k]).powf(rho)).sum();
        Ok(aggregate.powf(1.0 / rho) - spent)
    }

    /// Pre-cost chain utilities, their sum and the cautious-spending
    /// threshold, evaluated at the given spending and rates.
    pub fn pr_state(&self, spending: &SpendingMatrix, rates: &EffectiveRates) -> PrState {
        let (n, m) = (self.miners(), self.chains());
        let mut u = vec![0.0; n * m];
        let mut u_totals = vec![0.0; n];
        let mut k_tilde = vec![0.0; n];
        for i in 0..n {
            let rho = self.rho(i);
            let cap = self.capacity(i);
            let floor = SPENDING_FLOOR_FRACTION * cap;
            for k in 0..m {
                let b = spending.get(i, k).max(floor);
                let scaled = rates.get(i, k) * b;
                // Exact in the quasi-linear limit.
                let value = if rho == 1.0 { scaled } else { scaled.powf(rho) };
                u[i * m + k] = value;
                u_totals[i] += value;
            }
            let committed = spending.spent(i);
            k_tilde[i] = if rho == 1.0 {
                // q^0 := 1 even at zero committed budget (quasi-linear limit).
                cap
            } else {
                cap * committed.powf(rho - 1.0)
            };
        }
        PrState {
            m,
            u,
            u_totals,
            k_tilde,
        }
    }

    pub(crate) fn check_shape(&self, spending: &SpendingMatrix) -> Result<(), MarketError> {
        if spending.n != self.miners() || spending.m != self.chains() {
            return Err(MarketError::SpendingShape {
                n: self.miners(),
                m: self.chains(),
                got_n: spending.n,
                got_m: spending.m,
            });
        }
        Ok(())
    }

    /// Validates non-negativity and per-miner budget feasibility
    /// (`1e-12`-relative slack on the capacity).
    pub fn check_feasible(&self, spending: &SpendingMatrix) -> Result<(), MarketError> {
        self.check_shape(spending)?;
        for i in 0..self.miners() {
            for k in 0..self.chains() {
                let b = spending.get(i, k);
                if !b.is_finite() || b < 0.0 {
                    return Err(MarketError::NegativeSpending {
                        miner: i,
                        chain: k,
                        value: b,
                    });
                }
            }
            let cap = self.capacity(i);
            let spent = spending.spent(i);
            if spent > cap * (1.0 + 1e-12) {
                return Err(MarketError::OverCapacity {
                    miner: i,
                    capacity: cap,
                    spent,
                });
            }
        }
        Ok(())
    }

    /// Default interior start: half the budget spread uniformly, `K_i/(2m)`
    /// per chain.
    pub fn uniform_half_spending(&self) -> SpendingMatrix {
        let m = self.chains();
        let rows: Vec<Vec<f64>> = self
            .capacities
            .iter()
            .map(|cap| vec![cap / (2.0 * m as f64); m])
            .collect();
        SpendingMatrix::from_rows(&rows, &self.capacities).expect("uniform start is feasible")
    }
}

/// Per-miner-per-chain spending together with its exact aggregates.
#[derive(Debug, Clone, PartialEq)]
pub struct SpendingMatrix {
    n: usize,
    m: usize,
    b: Vec<f64>,
    chain_totals: Vec<f64>,
    spent: Vec<f64>,
    unspent: Vec<f64>,
}

impl SpendingMatrix {
    /// Builds a spending matrix and caches chain totals and unspent budgets.
    pub fn from_rows(rows: &[Vec<f64>], capacities: &[f64]) -> Result<Self, MarketError> {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        if n == 0 || m == 0 || capacities.len() != n {
            return Err(MarketError::SpendingShape {
                n: capacities.len(),
                m,
                got_n: n,
                got_m: m,
            });
        }
        let mut b = Vec::with_capacity(n * m);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(MarketError::SpendingShape {
                    n,
                    m,
                    got_n: n,
                    got_m: row.len(),
                });
            }
            for (k, &value) in row.iter().enumerate() {
                if !value.is_finite() || value < 0.0 {
                    return Err(MarketError::NegativeSpending {
                        miner: i,
                        chain: k,
                        value,
                    });
                }
                b.push(value);
            }
        }
        Ok(Self::from_flat(n, m, b, capacities))
    }

    pub(crate) fn from_flat(n: usize, m: usize, b: Vec<f64>, capacities: &[f64]) -> Self {
        let mut chain_totals = vec![0.0; m];
        let mut spent = Vec::with_capacity(n);
        let mut unspent = Vec::with_capacity(n);
        for i in 0..n {
            let mut row_total = 0.0;
            for k in 0..m {
                let value = b[i * m + k];
                chain_totals[k] += value;
                row_total += value;
            }
            spent.push(row_total);
            unspent.push(capacities[i] - row_total);
        }
        Self {
            n,
            m,
            b,
            chain_totals,
            spent,
            unspent,
        }
    }

    pub fn miners(&self) -> usize {
        self.n
    }

    pub fn chains(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.b[i * self.m + k]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.b[i * self.m..(i + 1) * self.m]
    }

    pub fn flat(&self) -> &[f64] {
        &self.b
    }

    /// Aggregate spending per chain, `p_k = sum_i b_ik`.
    pub fn chain_totals(&self) -> &[f64] {
        &self.chain_totals
    }

    /// Committed budget of miner `i`, `sum_k b_ik`, summed directly so it
    /// stays meaningful when spending is many orders below the capacity.
    pub fn spent(&self, i: usize) -> f64 {
        self.spent[i]
    }

    /// Unspent budget of miner `i`, `w_i = K_i - sum_k b_ik`.
    pub fn unspent(&self, i: usize) -> f64 {
        self.unspent[i]
    }

    pub fn unspent_all(&self) -> &[f64] {
        &self.unspent
    }

    /// Largest coordinate move relative to each miner's capacity.
    pub fn max_step_from(&self, previous: &Self, capacities: &[f64]) -> f64 {
        let mut max_step: f64 = 0.0;
        for (i, &cap) in capacities.iter().enumerate().take(self.n) {
            for k in 0..self.m {
                let step = (self.get(i, k) - previous.get(i, k)).abs() / cap;
                max_step = max_step.max(step);
            }
        }
        max_step
    }
}

/// Per-dollar return for every miner-chain pair.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveRates {
    n: usize,
    m: usize,
    v: Vec<f64>,
}

impl EffectiveRates {
    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.v[i * self.m + k]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.v[i * self.m..(i + 1) * self.m]
    }

    /// Builds a rate matrix directly; rows are per-miner returns per dollar.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, MarketError> {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        let mut v = Vec::with_capacity(n * m);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(MarketError::RatesShape {
                    n,
                    m,
                    got_n: i,
                    got_m: row.len(),
                });
            }
            v.extend_from_slice(row);
        }
        Ok(Self { n, m, v })
    }
}

/// Where the solver takes per-chain aggregates from.
#[derive(Debug, Clone, PartialEq)]
pub enum RateMode {
    /// Aggregates are recomputed from the miners' own spending every round
    /// (the self-consistent multi-miner protocol).
    Endogenous,
    /// Aggregates are fixed observed data; rates never change. This is the
    /// single representative miner of the empirical pipeline.
    Exogenous(EffectiveRates),
}

impl RateMode {
    pub(crate) fn resolve(
        &self,
        economy: &Economy,
        spending: &SpendingMatrix,
    ) -> Result<EffectiveRates, MarketError> {
        match self {
            RateMode::Endogenous => economy.effective_rates_from_spending(spending),
            RateMode::Exogenous(rates) => {
                if rates.n != economy.miners() || rates.m != economy.chains() {
                    return Err(MarketError::RatesShape {
                        n: economy.miners(),
                        m: economy.chains(),
                        got_n: rates.n,
                        got_m: rates.m,
                    });
                }
                Ok(rates.clone())
            }
        }
    }
}

/// Pre-cost utilities and the cautious-spending threshold for one round.
#[derive(Debug, Clone, PartialEq)]
pub struct PrState {
    m: usize,
    u: Vec<f64>,
    u_totals: Vec<f64>,
    k_tilde: Vec<f64>,
}

impl PrState {
    /// `u_ik = (v_ik b_ik)^rho_i`.
    pub fn chain_utility(&self, i: usize, k: usize) -> f64 {
        self.u[i * self.m + k]
    }

    /// `u_i = sum_k u_ik`.
    pub fn utility_total(&self, i: usize) -> f64 {
        self.u_totals[i]
    }

    /// `K~_i = K_i (K_i - w_i)^(rho_i - 1)`.
    pub fn k_tilde(&self, i: usize) -> f64 {
        self.k_tilde[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_miner(revenues: Vec<f64>, rho: f64, capacity: f64) -> Economy {
        let m = revenues.len();
        Economy::new(revenues, vec![vec![1.0; m]], vec![capacity], vec![rho]).unwrap()
    }

    #[test]
    fn construction_validates_parameters() {
        assert!(matches!(
            Economy::new(vec![1.0], vec![vec![1.0]], vec![1.0], vec![0.0]).unwrap_err(),
            MarketError::RhoOutOfRange { miner: 0, .. }
        ));
        assert!(matches!(
            Economy::new(vec![1.0], vec![vec![1.0]], vec![1.0], vec![-0.5]).unwrap_err(),
            MarketError::RhoOutOfRange { .. }
        ));
        assert!(matches!(
            Economy::new(vec![1.0], vec![vec![1.0]], vec![1.0], vec![1.2]).unwrap_err(),
            MarketError::RhoOutOfRange { .. }
        ));
        assert!(matches!(
            Economy::new(vec![-1.0], vec![vec![1.0]], vec![1.0], vec![0.5]).unwrap_err(),
            MarketError::NonPositiveRevenue { .. }
        ));
        assert!(matches!(
            Economy::new(vec![1.0, 2.0], vec![vec![1.0]], vec![1.0], vec![0.5]).unwrap_err(),
            MarketError::RaggedCostMatrix { .. }
        ));
    }

    #[test]
    fn effective_rates_identity_and_hand_value() {
        let economy = single_miner(vec![1.0], 0.5, 1.0);
        let rates = economy.effective_rates_exogenous(&[1.0]).unwrap();
        assert_eq!(rates.get(0, 0), 1.0);

        let economy = Economy::new(vec![10.0], vec![vec![0.5]], vec![1.0], vec![0.5]).unwrap();
        let rates = economy.effective_rates_exogenous(&[4.0]).unwrap();
        assert_eq!(rates.get(0, 0), 5.0);
    }

    #[test]
    fn halving_costs_doubles_rates() {
        let base = Economy::new(
            vec![3.0, 7.0],
            vec![vec![0.4, 1.2], vec![0.8, 0.6]],
            vec![1.0, 1.0],
            vec![0.5, 1.0],
        )
        .unwrap();
        let halved = Economy::new(
            vec![3.0, 7.0],
            vec![vec![0.2, 0.6], vec![0.4, 0.3]],
            vec![1.0, 1.0],
            vec![0.5, 1.0],
        )
        .unwrap();
        let aggregates = [2.0, 5.0];
        let r0 = base.effective_rates_exogenous(&aggregates).unwrap();
        let r1 = halved.effective_rates_exogenous(&aggregates).unwrap();
        for i in 0..2 {
            for k in 0..2 {
                assert!((r1.get(i, k) - 2.0 * r0.get(i, k)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_chain_total_is_degenerate() {
        let economy =
            Economy::new(vec![1.0, 1.0], vec![vec![1.0, 1.0]], vec![1.0], vec![0.5]).unwrap();
        let spending = SpendingMatrix::from_rows(&[vec![0.5, 0.0]], economy.capacities()).unwrap();
        assert_eq!(
            economy
                .effective_rates_from_spending(&spending)
                .unwrap_err(),
            MarketError::DegenerateChain { chain: 1 }
        );
    }

    #[test]
    fn quasi_ces_examples() {
        // Quasi-linear reduction.
        let economy = single_miner(vec![1.0, 1.0], 1.0, 1.0);
        let rates = EffectiveRates::from_rows(&[vec![2.0, 1.0]]).unwrap();
        let value = economy.quasi_ces_utility(0, &[1.0, 0.0], &rates).unwrap();
        assert!((value - 1.0).abs() < 1e-15);

        // Hand evaluation at rho = 0.5.
        let economy = single_miner(vec![1.0, 1.0], 0.5, 1.0);
        let rates = EffectiveRates::from_rows(&[vec![1.0, 1.0]]).unwrap();
        let value = economy.quasi_ces_utility(0, &[0.5, 0.5], &rates).unwrap();
        assert!((value - 1.0).abs() < 1e-12);

        // Empty spend is worth nothing.
        let value = economy.quasi_ces_utility(0, &[0.0, 0.0], &rates).unwrap();
        assert_eq!(value, 0.0);
    }

    #[test]
    fn spending_matrix_aggregates_are_exact() {
        let caps = [1.0, 2.0];
        let s = SpendingMatrix::from_rows(&[vec![0.25, 0.25], vec![0.5, 1.0]], &caps).unwrap();
        assert_eq!(s.chain_totals(), &[0.75, 1.25]);
        assert_eq!(s.unspent(0), 0.5);
        assert_eq!(s.unspent(1), 0.5);
    }

    #[test]
    fn pr_state_hand_values() {
        let economy = single_miner(vec![1.0, 1.0], 0.5, 1.0);
        let rates = EffectiveRates::from_rows(&[vec![1.0, 1.0]]).unwrap();
        let s = SpendingMatrix::from_rows(&[vec![0.5, 0.5]], economy.capacities()).unwrap();
        let state = economy.pr_state(&s, &rates);
        assert!((state.chain_utility(0, 0) - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((state.utility_total(0) - 2.0f64.sqrt()).abs() < 1e-15);
        assert!((state.k_tilde(0) - 1.0).abs() < 1e-15);
    }
}
