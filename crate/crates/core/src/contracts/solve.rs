use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::numerics::{
    compute_p_n, compute_rho_n, erfc, find_root_bracketed, integral_erfc_pow, largest_root,
    smallest_root, RootFindConfig, SpecialFnConfig,
};

use super::{BonusScheme, Branch, ContractSolution, CostFunction, EnvParams, Regime};

/// Numerical settings shared by the four solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Solver {
    pub special: SpecialFnConfig,
    pub roots: RootFindConfig,
    /// Grid points used to locate the largest root of a binding equation.
    pub scan_points: usize,
}

impl Default for Solver {
    fn default() -> Self {
        Self { special: SpecialFnConfig::default(), roots: RootFindConfig::default(), scan_points: 512 }
    }
}

pub fn solve_observable_benchmark(p: &EnvParams, c: &CostFunction) -> Result<ContractSolution> {
    Solver::default().solve_observable_benchmark(p, c)
}

pub fn solve_equal_bonus(p: &EnvParams, c: &CostFunction) -> Result<ContractSolution> {
    Solver::default().solve_equal_bonus(p, c)
}

pub fn solve_integrated(p: &EnvParams, c: &CostFunction) -> Result<ContractSolution> {
    Solver::default().solve_integrated(p, c)
}

pub fn solve_separate(p: &EnvParams, c: &CostFunction) -> Result<ContractSolution> {
    Solver::default().solve_separate(p, c)
}

impl Solver {
    /// Root-finding and quadrature tolerances both set to `tol`.
    pub fn with_tol(tol: f64) -> Self {
        let mut s = Self::default();
        s.roots.abs_tol = tol;
        s.special.quadrature_abs_tol = tol;
        s
    }

    pub fn validate(&self) -> Result<()> {
        self.special.validate()?;
        self.roots.validate()?;
        if self.scan_points < 8 {
            return Err(crate::Error::InvalidArgument("scan_points must be at least 8".into()));
        }
        Ok(())
    }

    pub fn solve(&self, regime: Regime, p: &EnvParams, c: &CostFunction) -> Result<ContractSolution> {
        match regime {
            Regime::ObservableBenchmark => self.solve_observable_benchmark(p, c),
            Regime::EqualBonus => self.solve_equal_bonus(p, c),
            Regime::IntegratedManager => self.solve_integrated(p, c),
            Regime::SeparateManager => self.solve_separate(p, c),
        }
    }

    fn check(&self, p: &EnvParams, c: &CostFunction) -> Result<()> {
        self.validate()?;
        p.validate()?;
        c.validate()
    }

    // Largest strictly positive root of `f` on (0, hi].
    fn largest_positive_root<F: Fn(f64) -> f64>(&self, f: F, hi: f64) -> Result<Option<f64>> {
        let r = largest_root(f, 0.0, hi, self.scan_points, &self.roots)?;
        Ok(r.filter(|&e| e > 10.0 * self.roots.abs_tol))
    }

    /// Largest effort with `K c'(e) <= (δ/(1-δ)) (e - c(e) - ū - extra)`,
    /// or first best when that already satisfies it.
    fn self_enforcing_effort(
        &self,
        p: &EnvParams,
        c: &CostFunction,
        k: f64,
        extra: f64,
    ) -> Result<Option<(f64, Branch)>> {
        let rho = p.patience();
        let g = |e: f64| rho * (e - c.c(e) - p.u_bar - extra) - k * c.c1(e);
        let e_fb = c.first_best();
        if g(e_fb) >= 0.0 {
            return Ok(Some((e_fb, Branch::FirstBest)));
        }
        Ok(self.largest_positive_root(g, e_fb)?.map(|e| (e, Branch::SubconstraintBinding)))
    }

    pub fn solve_observable_benchmark(&self, p: &EnvParams, c: &CostFunction) -> Result<ContractSolution> {
        self.check(p, c)?;
        let mut sol = ContractSolution::blank(Regime::ObservableBenchmark, *p, *c);
        let nf = p.nf();
        let p_n = compute_p_n(p.n, &self.special)?;

        let Some((e, branch)) = self.self_enforcing_effort(p, c, p.sigma / (nf * p_n), 0.0)? else {
            sol.branch = Branch::SubconstraintBinding;
            return Ok(sol.infeasible("no positive effort satisfies the owner's no-reneging bound"));
        };
        let prize = p.sigma * c.c1(e) / p_n;
        sol.branch = branch;
        sol.effort = e;
        sol.scheme = BonusScheme::TournamentWithThreshold { threshold: e, prize };
        sol.alpha_i = p.u_bar + c.c(e) - prize * (1.0 - 0.5f64.powi(p.n as i32)) / nf;
        sol.surplus = nf * (e - c.c(e) - p.u_bar);
        sol.owner_profit = sol.surplus;
        Ok(finish(sol))
    }

    pub fn solve_equal_bonus(&self, p: &EnvParams, c: &CostFunction) -> Result<ContractSolution> {
        self.check(p, c)?;
        let mut sol = ContractSolution::blank(Regime::EqualBonus, *p, *c);
        let nf = p.nf();
        let team = (2.0 * PI * nf).sqrt();

        let Some((e, branch)) = self.self_enforcing_effort(p, c, p.sigma * team, 0.0)? else {
            sol.branch = Branch::SubconstraintBinding;
            return Ok(sol.infeasible("no positive effort satisfies the owner's no-reneging bound"));
        };
        // Smallest bonus that makes e incentive compatible; equals the
        // no-reneging bound when that binds.
        let bonus = p.sigma * team * c.c1(e);
        sol.branch = branch;
        sol.effort = e;
        sol.scheme = BonusScheme::EqualSplit { per_worker_bonus: bonus, team_trigger: nf * e };
        sol.alpha_i = p.u_bar + c.c(e) - 0.5 * bonus;
        sol.surplus = nf * (e - c.c(e) - p.u_bar);
        sol.owner_profit = sol.surplus;
        Ok(finish(sol))
    }

    pub fn solve_integrated(&self, p: &EnvParams, c: &CostFunction) -> Result<ContractSolution> {
        self.check(p, c)?;
        let mut sol = ContractSolution::blank(Regime::IntegratedManager, *p, *c);
        let nf = p.nf();
        let e_fb = c.first_best();
        let rho = p.patience();

        let (e, branch, p_n) = if p.sigma == 0.0 {
            (e_fb, Branch::FirstBest, None)
        } else {
            let p_n = compute_p_n(p.n, &self.special)?;
            let s = p.sigma / (rho * nf * p_n);
            let interior = |e: f64| 1.0 - c.c1(e) - s * c.c2(e);
            // With no interior root the owner's objective falls in effort.
            let e_int = self.largest_positive_root(interior, e_fb)?.unwrap_or(0.0);

            let k = p.sigma * ((2.0 * PI / nf).sqrt() + 1.0 / (nf * p_n));
            let sub = |e: f64| rho * (e - c.c(e) - p.u_bar - p.u0_bar / nf) - k * c.c1(e);
            if e_int > 0.0 && sub(e_int) >= 0.0 {
                (e_int, Branch::Interior, Some(p_n))
            } else {
                // Owner-optimal point of the feasible set: nearest to e_int from below,
                // else from above.
                let below = if e_int > 0.0 { self.largest_positive_root(sub, e_int)? } else { None };
                let root = match below {
                    Some(e) => Some(e),
                    None => smallest_root(sub, e_int, e_fb, self.scan_points, &self.roots)?
                        .filter(|&e| e > 10.0 * self.roots.abs_tol),
                };
                let Some(e) = root else {
                    sol.branch = Branch::SubconstraintBinding;
                    return Ok(sol.infeasible("no positive effort satisfies the owner's no-reneging bound"));
                };
                (e, Branch::SubconstraintBinding, Some(p_n))
            }
        };

        let (k0, prize, b0) = match p_n {
            None => (0.0, 0.0, 0.0),
            Some(p_n) => {
                let k0 = c.c1(e) * p.sigma / (rho * p_n);
                (k0, rho * k0, p.sigma * (2.0 * PI * nf).sqrt() * c.c1(e))
            }
        };
        sol.branch = branch;
        sol.effort = e;
        sol.scheme = BonusScheme::TournamentWithThreshold { threshold: e, prize };
        sol.alpha_i = p.u_bar + c.c(e) - prize * (1.0 - 0.5f64.powi(p.n as i32)) / nf;
        sol.k0 = Some(k0);
        sol.owner_prize_b0 = Some(b0);
        sol.alpha_0 = Some(k0 + nf * c.c(e) + p.u0_bar + nf * p.u_bar - 0.5 * b0);
        sol.surplus = nf * (e - c.c(e) - p.u_bar) - p.u0_bar;
        sol.manager_profit = k0;
        sol.owner_profit = sol.surplus - k0;
        Ok(finish(sol))
    }

    /// Threshold depth η (in standard deviations below effort) of the
    /// separate-bonus tournament; `+∞` when the manager cannot collude.
    pub fn separate_eta(&self, p: &EnvParams) -> Result<f64> {
        p.validate()?;
        if p.phi == 0.0 {
            return Ok(f64::INFINITY);
        }
        let p_n = compute_p_n(p.n, &self.special)?;
        let nf = p.nf();
        let leak = p.phi / p.patience();
        let scale = 0.5f64.powi(p.n as i32);
        // Both sides divided by 2^n.
        let gap = |eta: f64| -> f64 {
            match integral_erfc_pow(p.n, eta, &self.special) {
                Ok(area) => nf * p_n - eta * leak - area * scale,
                Err(_) => f64::NAN,
            }
        };
        let hi = nf * p_n / leak;
        find_root_bracketed(gap, 0.0, hi, &self.roots)
    }

    pub fn solve_separate(&self, p: &EnvParams, c: &CostFunction) -> Result<ContractSolution> {
        self.check(p, c)?;
        let mut sol = ContractSolution::blank(Regime::SeparateManager, *p, *c);
        let nf = p.nf();
        let e_fb = c.first_best();

        let eta = self.separate_eta(p)?;
        sol.eta = Some(eta);
        let (e, branch) = if p.sigma == 0.0 {
            (e_fb, Branch::FirstBest)
        } else if eta.is_infinite() {
            (e_fb, Branch::ThresholdMinusInfinity)
        } else {
            let ratio = p.sigma / eta;
            let foc = |e: f64| 1.0 - c.c1(e) - ratio * c.c2(e);
            match self.largest_positive_root(foc, e_fb)? {
                Some(e) => (e, Branch::Interior),
                None => {
                    sol.branch = Branch::Interior;
                    return Ok(sol.infeasible("no positive effort solves the optimality equation"));
                }
            }
        };

        let b_t = if p.sigma == 0.0 {
            0.0
        } else {
            let p_n = compute_p_n(p.n, &self.special)?;
            let rho_n = compute_rho_n(p.n, eta, &self.special)?;
            p.sigma * c.c1(e) / (p_n + rho_n)
        };
        // Probability that nobody clears the threshold.
        let all_miss = if eta.is_infinite() { 0.0 } else { (0.5 * erfc(eta / SQRT_2)).powi(p.n as i32) };
        let manager = p.phi * b_t / p.patience();
        let alpha_t = nf * c.c(e) + nf * p.u_bar - b_t * (1.0 - all_miss);

        sol.branch = branch;
        sol.effort = e;
        sol.scheme = BonusScheme::TournamentWithThreshold { threshold: e - p.sigma * eta, prize: b_t };
        sol.alpha_i = alpha_t / nf;
        sol.b_t = Some(b_t);
        sol.alpha_t = Some(alpha_t);
        sol.alpha_m = Some(p.u0_bar + manager);
        sol.destroyed_surplus = b_t * all_miss;
        sol.manager_profit = manager;
        sol.surplus = nf * (e - c.c(e) - p.u_bar) - p.u0_bar;
        sol.owner_profit = sol.surplus - sol.destroyed_surplus - manager;
        Ok(finish(sol))
    }
}

fn finish(mut sol: ContractSolution) -> ContractSolution {
    sol.worker_profit = 0.0;
    if sol.owner_profit >= 0.0 {
        sol.feasible = true;
        sol.infeasibility = None;
        sol
    } else {
        let msg = format!("owner profit {} is negative", sol.owner_profit);
        sol.infeasible(msg)
    }
}
