//! Optimal contracts for the four management structures.
//!
//! All quantities are per period. Profits are firm totals; divide by `n` for
//! the per-worker figures the sweeps report.

mod cost;
mod solve;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::normal_cdf;

pub use cost::CostFunction;
pub use solve::{
    solve_equal_bonus, solve_integrated, solve_observable_benchmark, solve_separate, Solver,
};

/// The economic environment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvParams {
    pub n: u32,
    pub sigma: f64,
    pub delta: f64,
    pub u_bar: f64,
    /// Manager's outside income plus the cost of running the managing system.
    #[serde(alias = "u0")]
    pub u0_bar: f64,
    /// Share of the team bonus a colluding manager-worker pair can capture.
    pub phi: f64,
}

impl Default for EnvParams {
    fn default() -> Self {
        Self { n: 2, sigma: 0.0, delta: 0.7, u_bar: 0.1, u0_bar: 0.0, phi: 1.0 }
    }
}

impl EnvParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.n < 2 {
            return bad(format!("n must be at least 2, got {}", self.n));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return bad(format!("sigma must be finite and non-negative, got {}", self.sigma));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad(format!("delta must lie in (0, 1), got {}", self.delta));
        }
        if !(self.u_bar >= 0.0 && self.u_bar.is_finite()) {
            return bad(format!("u_bar must be finite and non-negative, got {}", self.u_bar));
        }
        if !(self.u0_bar >= 0.0 && self.u0_bar.is_finite()) {
            return bad(format!("u0_bar must be finite and non-negative, got {}", self.u0_bar));
        }
        if !(0.0..=1.0).contains(&self.phi) {
            return bad(format!("phi must lie in [0, 1], got {}", self.phi));
        }
        Ok(())
    }

    /// `δ / (1 - δ)`: the weight on the continuation stream.
    pub fn patience(&self) -> f64 {
        self.delta / (1.0 - self.delta)
    }

    pub fn nf(&self) -> f64 {
        self.n as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    ObservableBenchmark,
    EqualBonus,
    IntegratedManager,
    SeparateManager,
}

impl Regime {
    pub const ALL: [Regime; 4] = [
        Regime::ObservableBenchmark,
        Regime::EqualBonus,
        Regime::IntegratedManager,
        Regime::SeparateManager,
    ];

    /// The structures available when individual effort is unobservable, in
    /// tie-break order.
    pub const UNOBSERVABLE: [Regime; 3] =
        [Regime::EqualBonus, Regime::IntegratedManager, Regime::SeparateManager];

    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::ObservableBenchmark => "observable",
            Regime::EqualBonus => "equal",
            Regime::IntegratedManager => "integrated",
            Regime::SeparateManager => "separate",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "observable" | "observable_benchmark" | "benchmark" => Ok(Regime::ObservableBenchmark),
            "equal" | "equal_bonus" => Ok(Regime::EqualBonus),
            "integrated" | "integrated_manager" => Ok(Regime::IntegratedManager),
            "separate" | "separate_manager" => Ok(Regime::SeparateManager),
            other => Err(Error::InvalidArgument(format!("unknown regime {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    FirstBest,
    Interior,
    SubconstraintBinding,
    ThresholdMinusInfinity,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::FirstBest => "first_best",
            Branch::Interior => "interior",
            Branch::SubconstraintBinding => "subconstraint_binding",
            Branch::ThresholdMinusInfinity => "threshold_minus_infinity",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BonusScheme {
    /// The best performer gets `prize` provided that performance clears `threshold`.
    TournamentWithThreshold {
        #[serde(with = "crate::serde_inf::f64")]
        threshold: f64,
        prize: f64,
    },
    /// Every worker gets `per_worker_bonus` if total output reaches `team_trigger`.
    EqualSplit { per_worker_bonus: f64, team_trigger: f64 },
}

impl BonusScheme {
    pub fn none() -> Self {
        BonusScheme::TournamentWithThreshold { threshold: 0.0, prize: 0.0 }
    }

    /// Expected bonus of one worker when all `n` exert `effort`.
    pub fn expected_bonus(&self, n: u32, effort: f64, sigma: f64) -> f64 {
        let nf = n as f64;
        match *self {
            BonusScheme::TournamentWithThreshold { threshold, prize } => {
                if prize == 0.0 {
                    return 0.0;
                }
                let below = if sigma > 0.0 {
                    normal_cdf((threshold - effort) / sigma)
                } else if threshold <= effort {
                    0.0
                } else {
                    1.0
                };
                prize * (1.0 - below.powi(n as i32)) / nf
            }
            BonusScheme::EqualSplit { per_worker_bonus, team_trigger } => {
                if per_worker_bonus == 0.0 {
                    return 0.0;
                }
                let hit = if sigma > 0.0 {
                    1.0 - normal_cdf((team_trigger - nf * effort) / (sigma * nf.sqrt()))
                } else if team_trigger <= nf * effort {
                    1.0
                } else {
                    0.0
                };
                per_worker_bonus * hit
            }
        }
    }
}

/// Full solution of one structure at one environment.
///
/// Regime-specific fields are `None` where they have no meaning. An
/// infeasible solution keeps whatever was computed before feasibility failed
/// and names the reason in `infeasibility`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractSolution {
    pub regime: Regime,
    pub branch: Branch,
    pub params: EnvParams,
    pub cost: CostFunction,
    pub effort: f64,
    pub scheme: BonusScheme,
    /// Salary of each worker.
    pub alpha_i: f64,
    #[serde(default, with = "crate::serde_inf::option")]
    pub eta: Option<f64>,
    #[serde(default)]
    pub b_t: Option<f64>,
    #[serde(default)]
    pub alpha_t: Option<f64>,
    #[serde(default)]
    pub alpha_m: Option<f64>,
    #[serde(default)]
    pub alpha_0: Option<f64>,
    #[serde(default)]
    pub k0: Option<f64>,
    /// Owner-to-manager bonus paid when total output reaches `n e*`.
    #[serde(default)]
    pub owner_prize_b0: Option<f64>,
    pub manager_profit: f64,
    pub owner_profit: f64,
    pub worker_profit: f64,
    pub surplus: f64,
    pub destroyed_surplus: f64,
    pub feasible: bool,
    #[serde(default)]
    pub infeasibility: Option<String>,
}

impl ContractSolution {
    pub(crate) fn blank(regime: Regime, params: EnvParams, cost: CostFunction) -> Self {
        Self {
            regime,
            branch: Branch::FirstBest,
            params,
            cost,
            effort: 0.0,
            scheme: BonusScheme::none(),
            alpha_i: 0.0,
            eta: None,
            b_t: None,
            alpha_t: None,
            alpha_m: None,
            alpha_0: None,
            k0: None,
            owner_prize_b0: None,
            manager_profit: 0.0,
            owner_profit: 0.0,
            worker_profit: 0.0,
            surplus: 0.0,
            destroyed_surplus: 0.0,
            feasible: false,
            infeasibility: None,
        }
    }

    pub(crate) fn infeasible(mut self, reason: impl Into<String>) -> Self {
        self.feasible = false;
        self.infeasibility = Some(reason.into());
        self
    }

    /// Worker's per-period gain over the outside option, recomputed from
    /// salary and bonus rule rather than read from `worker_profit`.
    pub fn worker_participation_slack(&self) -> f64 {
        let p = &self.params;
        let bonus = self.scheme.expected_bonus(p.n, self.effort, p.sigma);
        self.alpha_i + bonus - self.cost.c(self.effort) - p.u_bar
    }

    fn require_feasible(&self) -> Result<()> {
        if self.feasible {
            Ok(())
        } else {
            Err(Error::Infeasible(
                self.infeasibility.clone().unwrap_or_else(|| format!("{} solution", self.regime)),
            ))
        }
    }
}

pub fn owner_profit_of(sol: &ContractSolution) -> Result<f64> {
    sol.require_feasible()?;
    Ok(sol.owner_profit)
}

pub fn manager_profit_of(sol: &ContractSolution) -> Result<f64> {
    sol.require_feasible()?;
    Ok(sol.manager_profit)
}

pub fn surplus_of(sol: &ContractSolution) -> Result<f64> {
    sol.require_feasible()?;
    Ok(sol.surplus)
}
