use serde::{Deserialize, Serialize};

use crate::contracts::{BonusScheme, ContractSolution, Regime};
use crate::error::{Error, Result};

/// Tolerance below zero still counted as honoured.
pub const SLACK_TOL: f64 = 1e-8;

/// Continuation value weighted by `δ/(1-δ)` minus the largest bonus the
/// paying party could withhold. `manager_slack` is `+∞` when no manager pays
/// anything that can be withheld.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RenegingReport {
    #[serde(with = "crate::serde_inf::f64")]
    pub owner_slack: f64,
    #[serde(with = "crate::serde_inf::f64")]
    pub manager_slack: f64,
    pub owner_ok: bool,
    pub manager_ok: bool,
}

/// Re-derives every party's continuation value from salaries and bonus rules
/// and checks the one-shot temptation to renege.
pub fn check_no_reneging(sol: &ContractSolution) -> Result<RenegingReport> {
    if !sol.feasible {
        return Err(Error::Infeasible(format!("{} solution has no contract to check", sol.regime)));
    }
    let p = &sol.params;
    let rho = p.patience();
    let nf = p.nf();
    let e = sol.effort;
    let worker_bonus = sol.scheme.expected_bonus(p.n, e, p.sigma);
    let missing = |what: &str| Error::InvalidArgument(format!("{} solution lacks {what}", sol.regime));

    let (owner_slack, manager_slack) = match sol.regime {
        Regime::ObservableBenchmark | Regime::EqualBonus => {
            let owner = nf * (e - sol.alpha_i - worker_bonus);
            let max_payout = match sol.scheme {
                BonusScheme::TournamentWithThreshold { prize, .. } => prize,
                BonusScheme::EqualSplit { per_worker_bonus, .. } => nf * per_worker_bonus,
            };
            (rho * owner - max_payout, f64::INFINITY)
        }
        Regime::IntegratedManager => {
            let alpha_0 = sol.alpha_0.ok_or_else(|| missing("alpha_0"))?;
            let b0 = sol.owner_prize_b0.ok_or_else(|| missing("owner bonus"))?;
            let prize = match sol.scheme {
                BonusScheme::TournamentWithThreshold { prize, .. } => prize,
                BonusScheme::EqualSplit { .. } => return Err(missing("a tournament scheme")),
            };
            // owner-to-manager bonus is paid with probability one half
            let owner = nf * e - alpha_0 - 0.5 * b0;
            let manager = alpha_0 + 0.5 * b0 - nf * (sol.alpha_i + worker_bonus) - p.u0_bar;
            (rho * owner - b0, rho * manager - prize)
        }
        Regime::SeparateManager => {
            let alpha_t = sol.alpha_t.ok_or_else(|| missing("alpha_t"))?;
            let alpha_m = sol.alpha_m.ok_or_else(|| missing("alpha_m"))?;
            let b_t = sol.b_t.ok_or_else(|| missing("b_t"))?;
            // the manager draws no bonus, so the owner has nothing to withhold
            let owner = rho * (nf * e - alpha_m - alpha_t - b_t);
            let manager = if p.phi == 0.0 {
                f64::INFINITY
            } else {
                let worker = sol.alpha_i + worker_bonus - sol.cost.c(e) - p.u_bar;
                rho * (alpha_m - p.u0_bar + worker) - p.phi * b_t
            };
            (owner, manager)
        }
    };
    Ok(RenegingReport {
        owner_slack,
        manager_slack,
        owner_ok: owner_slack >= -SLACK_TOL,
        manager_ok: manager_slack >= -SLACK_TOL,
    })
}
