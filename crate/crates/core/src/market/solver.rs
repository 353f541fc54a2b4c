//! Proportional-response iteration and the equilibrium solver built on it.

use super::{Economy, MarketError, RateMode, SpendingMatrix};

/// Options for [`Economy::solve_equilibrium`].
#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Convergence threshold on the largest coordinate move relative to the
    /// miner's capacity.
    pub tol: f64,
    pub max_iter: usize,
    pub mode: RateMode,
    /// Record the KKT residual at every iteration (for trace exports); the
    /// final residual is always computed.
    pub kkt_every_iter: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 100_000,
            mode: RateMode::Endogenous,
            kkt_every_iter: false,
        }
    }
}

/// One recorded solver iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct TracePoint {
    pub iter: usize,
    pub objective: f64,
    pub max_step: f64,
    pub kkt_residual: Option<f64>,
}

/// Verification data attached to a solver result.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumCertificate {
    /// Relative spread of the per-chain marginal returns, maximised over miners.
    pub kkt_residual: f64,
    /// Violation of the unspent-budget branch conditions.
    pub complementarity_residual: f64,
    /// Convex objective value at the final iterate.
    pub objective_value: f64,
    pub iterations: usize,
    /// Whether the coordinate-step criterion was met within the budget.
    pub converged: bool,
    /// Per-iteration objective values (non-increasing along the trajectory).
    pub trace: Vec<TracePoint>,
}

impl EquilibriumCertificate {
    /// Plot-ready trace with the documented header
    /// `iter,objective,kkt_residual,max_step`.
    pub fn trace_to_csv(&self) -> String {
        let mut out = String::from("iter,objective,kkt_residual,max_step\n");
        for point in &self.trace {
            let kkt = point
                .kkt_residual
                .map(|r| r.to_string())
                .unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{}\n",
                point.iter, point.objective, kkt, point.max_step
            ));
        }
        out
    }
}

impl Economy {
    /// One synchronous proportional-response round.
    ///
    /// Every miner reads the same frozen aggregates, computes its chain
    /// utilities `u_ik`, total `u_i` and threshold `K~_i`, then re-spends
    /// `b_ik <- K_i u_ik / max(u_i, K~_i)`. Aggregates are refreshed only
    /// after all miners have moved, so the result does not depend on the
    /// order miners are evaluated in.
    pub fn pr_step(
        &self,
        state: &SpendingMatrix,
        mode: &RateMode,
    ) -> Result<SpendingMatrix, MarketError> {
        self.check_shape(state)?;
        for i in 0..self.miners() {
            for k in 0..self.chains() {
                let b = state.get(i, k);
                if !b.is_finite() || b <= 0.0 {
                    return Err(MarketError::NonPositiveSpending {
                        miner: i,
                        chain: k,
                        value: b,
                    });
                }
            }
        }
        let rates = mode.resolve(self, state)?;
        let pr = self.pr_state(state, &rates);
        let m = self.chains();
        let mut next = Vec::with_capacity(self.miners() * m);
        for i in 0..self.miners() {
            let denom = pr.utility_total(i).max(pr.k_tilde(i));
            let cap = self.capacity(i);
            // The same floor that guards the exponentiation keeps the output
            // representable when a miner's spending collapses toward zero
            // (an exiting miner would otherwise underflow to literal zeros).
            let floor = super::SPENDING_FLOOR_FRACTION * cap;
            for k in 0..m {
                next.push((cap * pr.chain_utility(i, k) / denom).max(floor));
            }
        }
        Ok(SpendingMatrix::from_flat(
            self.miners(),
            m,
            next,
            self.capacities(),
        ))
    }

    /// Iterates [`Self::pr_step`] from `b0` until the largest capacity-relative
    /// coordinate move drops below `options.tol` or the iteration budget runs
    /// out, and certifies the final iterate.
    ///
    /// The capacity-relative step alone can go quiet while a near-zero
    /// coordinate is still drifting multiplicatively, so once it fires the
    /// solver keeps going until the KKT residual also drops below
    /// `10 * tol` (or a bounded grace budget runs out, which happens at
    /// boundary equilibria of quasi-linear miners where the interior
    /// residual cannot vanish).
    ///
    /// Non-convergence is not an error: the best iterate comes back with
    /// `converged = false` in the certificate.
    pub fn solve_equilibrium(
        &self,
        b0: &SpendingMatrix,
        options: &SolveOptions,
    ) -> Result<(SpendingMatrix, EquilibriumCertificate), MarketError> {
        const KKT_GRACE_ITERS: usize = 20_000;
        let kkt_target = (10.0 * options.tol).max(1e-12);
        let mut current = b0.clone();
        let mut trace = Vec::new();
        trace.push(TracePoint {
            iter: 0,
            objective: self.shmyrev_objective(&current, &options.mode)?,
            max_step: 0.0,
            kkt_residual: if options.kkt_every_iter {
                Some(self.kkt_residual(&current, &options.mode)?.residual)
            } else {
                None
            },
        });
        let mut converged = false;
        let mut iterations = 0;
        let mut grace_left: Option<usize> = None;
        for iter in 1..=options.max_iter {
            let next = self.pr_step(&current, &options.mode)?;
            let max_step = next.max_step_from(&current, self.capacities());
            current = next;
            iterations = iter;
            trace.push(TracePoint {
                iter,
                objective: self.shmyrev_objective(&current, &options.mode)?,
                max_step,
                kkt_residual: if options.kkt_every_iter {
                    Some(self.kkt_residual(&current, &options.mode)?.residual)
                } else {
                    None
                },
            });
            if max_step < options.tol {
                if self.kkt_residual(&current, &options.mode)?.residual < kkt_target {
                    converged = true;
                    break;
                }
                match grace_left.as_mut() {
                    None => grace_left = Some(KKT_GRACE_ITERS),
                    Some(0) => {
                        converged = true;
                        break;
                    }
                    Some(left) => *left -= 1,
                }
            }
        }
        let kkt = self.kkt_residual(&current, &options.mode)?;
        let certificate = EquilibriumCertificate {
            kkt_residual: kkt.residual,
            complementarity_residual: kkt.complementarity,
            objective_value: trace.last().map(|p| p.objective).unwrap_or(f64::NAN),
            iterations,
            converged,
            trace,
        };
        Ok((current, certificate))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::EffectiveRates;

    fn exogenous_single(revenue_rates: Vec<f64>, rho: f64, capacity: f64) -> (Economy, RateMode) {
        let m = revenue_rates.len();
        let economy =
            Economy::new(vec![1.0; m], vec![vec![1.0; m]], vec![capacity], vec![rho]).unwrap();
        let rates = EffectiveRates::from_rows(&[revenue_rates]).unwrap();
        (economy, RateMode::Exogenous(rates))
    }

    #[test]
    fn pr_step_requires_positive_spending() {
        let (economy, mode) = exogenous_single(vec![1.0, 1.0], 0.5, 1.0);
        let s = SpendingMatrix::from_rows(&[vec![0.5, 0.0]], economy.capacities()).unwrap();
        assert!(matches!(
            economy.pr_step(&s, &mode).unwrap_err(),
            MarketError::NonPositiveSpending {
                miner: 0,
                chain: 1,
                ..
            }
        ));
    }

    #[test]
    fn corner_fixed_point_single_chain_quasilinear() {
        // One chain, rho = 1, rate above the threshold: full spend is fixed.
        let (economy, mode) = exogenous_single(vec![3.0], 1.0, 1.0);
        let s = SpendingMatrix::from_rows(&[vec![0.4]], economy.capacities()).unwrap();
        let next = economy.pr_step(&s, &mode).unwrap();
        assert!((next.get(0, 0) - 1.0).abs() < 1e-15);
        let again = economy.pr_step(&next, &mode).unwrap();
        assert!((again.get(0, 0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn symmetric_interior_point_is_fixed() {
        // rho = 0.5, equal rates: u_i = sqrt(2) exceeds K~ = 1, shares stay 1/2.
        let (economy, mode) = exogenous_single(vec![1.0, 1.0], 0.5, 1.0);
        let s = SpendingMatrix::from_rows(&[vec![0.5, 0.5]], economy.capacities()).unwrap();
        let next = economy.pr_step(&s, &mode).unwrap();
        assert!((next.get(0, 0) - 0.5).abs() < 1e-15);
        assert!((next.get(0, 1) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rate_proportional_fixed_point() {
        // rho = 0.5, rates (4, 1): the full-spend fixed point is b = (0.8, 0.2).
        let (economy, mode) = exogenous_single(vec![4.0, 1.0], 0.5, 1.0);
        let b0 = economy.uniform_half_spending();
        let (solution, cert) = economy
            .solve_equilibrium(
                &b0,
                &SolveOptions {
                    mode,
                    ..Default::default()
                },
            )
            .unwrap();
        assert!(cert.converged);
        assert!((solution.get(0, 0) - 0.8).abs() < 1e-10);
        assert!((solution.get(0, 1) - 0.2).abs() < 1e-10);
    }

    #[test]
    fn quasilinear_concentrates_on_best_rate() {
        let (economy, mode) = exogenous_single(vec![1.1, 1.5, 1.3], 1.0, 2.0);
        let b0 = economy.uniform_half_spending();
        let (solution, cert) = economy
            .solve_equilibrium(
                &b0,
                &SolveOptions {
                    mode,
                    ..Default::default()
                },
            )
            .unwrap();
        assert!(cert.converged);
        assert!((solution.get(0, 1) - 2.0).abs() < 1e-8);
        assert!(solution.get(0, 0) < 1e-8);
        assert!(solution.get(0, 2) < 1e-8);
    }

    #[test]
    fn symmetric_economy_equalizes_spending() {
        // Identical miners and chains split budgets evenly at the fixed point.
        let economy = Economy::new(
            vec![10.0; 4],
            vec![vec![1.0; 4]; 3],
            vec![1.0; 3],
            vec![0.7; 3],
        )
        .unwrap();
        let b0 = economy.uniform_half_spending();
        let (solution, cert) = economy
            .solve_equilibrium(&b0, &SolveOptions::default())
            .unwrap();
        assert!(cert.converged);
        for i in 0..3 {
            for k in 0..4 {
                assert!(
                    (solution.get(i, k) - 0.25).abs() < 1e-10,
                    "miner {i} chain {k}: {}",
                    solution.get(i, k)
                );
            }
        }
    }

    #[test]
    fn budget_feasibility_and_positivity_after_steps() {
        let economy = Economy::new(
            vec![5.0, 2.0, 8.0],
            vec![vec![1.0, 2.0, 0.5], vec![1.5, 1.0, 1.0]],
            vec![1.0, 3.0],
            vec![0.4, 1.0],
        )
        .unwrap();
        let mut s = economy.uniform_half_spending();
        for _ in 0..50 {
            s = economy.pr_step(&s, &RateMode::Endogenous).unwrap();
            economy.check_feasible(&s).unwrap();
            for i in 0..2 {
                for k in 0..3 {
                    assert!(s.get(i, k) > 0.0);
                }
            }
        }
    }

    #[test]
    fn full_spend_branch_matches_threshold_comparison() {
        // The budget is fully spent after a step exactly when u_i >= K~_i before it.
        let economy = Economy::new(
            vec![0.4, 0.6],
            vec![vec![1.0, 1.3], vec![0.9, 1.1]],
            vec![2.0, 2.0],
            vec![0.6, 0.3],
        )
        .unwrap();
        let mut s = economy.uniform_half_spending();
        for _ in 0..30 {
            let rates = economy.effective_rates_from_spending(&s).unwrap();
            let pr = economy.pr_state(&s, &rates);
            let next = economy.pr_step(&s, &RateMode::Endogenous).unwrap();
            for i in 0..2 {
                let full_spend = pr.utility_total(i) >= pr.k_tilde(i);
                let w = next.unspent(i);
                if full_spend {
                    assert!(w.abs() < 1e-12 * economy.capacity(i));
                } else {
                    assert!(w > 0.0);
                }
            }
            s = next;
        }
    }

    #[test]
    fn permuting_chains_permutes_the_equilibrium() {
        let economy = Economy::new(
            vec![3.0, 1.0, 2.0],
            vec![vec![1.0, 0.7, 1.2], vec![0.8, 1.1, 0.9]],
            vec![1.0, 1.5],
            vec![0.5, 0.8],
        )
        .unwrap();
        let permuted = Economy::new(
            vec![2.0, 3.0, 1.0],
            vec![vec![1.2, 1.0, 0.7], vec![0.9, 0.8, 1.1]],
            vec![1.0, 1.5],
            vec![0.5, 0.8],
        )
        .unwrap();
        // perm maps original chain k to position perm[k] in the permuted economy.
        let perm = [1, 2, 0];
        let (base, _) = economy
            .solve_equilibrium(&economy.uniform_half_spending(), &SolveOptions::default())
            .unwrap();
        let (other, _) = permuted
            .solve_equilibrium(&permuted.uniform_half_spending(), &SolveOptions::default())
            .unwrap();
        for i in 0..2 {
            for (k, &target) in perm.iter().enumerate() {
                assert!((base.get(i, k) - other.get(i, target)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn non_convergence_is_flagged_not_fatal() {
        let economy = Economy::new(
            vec![5.0, 2.0],
            vec![vec![1.0, 2.0], vec![1.5, 1.0]],
            vec![1.0, 1.0],
            vec![0.5, 0.9],
        )
        .unwrap();
        let (_, cert) = economy
            .solve_equilibrium(
                &economy.uniform_half_spending(),
                &SolveOptions {
                    max_iter: 1,
                    ..Default::default()
                },
            )
            .unwrap();
        assert!(!cert.converged);
        assert_eq!(cert.iterations, 1);
    }

    #[test]
    fn trace_csv_has_documented_header() {
        let (economy, mode) = exogenous_single(vec![2.0, 1.0], 0.5, 1.0);
        let (_, cert) = economy
            .solve_equilibrium(
                &economy.uniform_half_spending(),
                &SolveOptions {
                    mode,
                    kkt_every_iter: true,
                    max_iter: 10,
                    ..Default::default()
                },
            )
            .unwrap();
        let csv = cert.trace_to_csv();
        assert!(csv.starts_with("iter,objective,kkt_residual,max_step\n"));
        assert_eq!(csv.lines().count(), cert.trace.len() + 1);
    }
}
