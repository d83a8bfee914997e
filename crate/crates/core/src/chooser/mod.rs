//! Parameter sweeps, best-structure maps and crossover points.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contracts::{Branch, ContractSolution, CostFunction, EnvParams, Regime, Solver};
use crate::error::{Error, Result};
use crate::numerics::{bisect, golden_section_min, RootFindConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Sigma,
    Delta,
    Phi,
    U0Bar,
    N,
}

impl SweepParam {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepParam::Sigma => "sigma",
            SweepParam::Delta => "delta",
            SweepParam::Phi => "phi",
            SweepParam::U0Bar => "u0_bar",
            SweepParam::N => "n",
        }
    }

    pub fn get(&self, p: &EnvParams) -> f64 {
        match self {
            SweepParam::Sigma => p.sigma,
            SweepParam::Delta => p.delta,
            SweepParam::Phi => p.phi,
            SweepParam::U0Bar => p.u0_bar,
            SweepParam::N => p.n as f64,
        }
    }

    /// `base` with this parameter set to `value` (`n` is rounded).
    pub fn apply(&self, base: &EnvParams, value: f64) -> EnvParams {
        let mut p = *base;
        match self {
            SweepParam::Sigma => p.sigma = value,
            SweepParam::Delta => p.delta = value,
            SweepParam::Phi => p.phi = value,
            SweepParam::U0Bar => p.u0_bar = value,
            SweepParam::N => p.n = value.round().max(0.0) as u32,
        }
        p
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sigma" => Ok(SweepParam::Sigma),
            "delta" => Ok(SweepParam::Delta),
            "phi" => Ok(SweepParam::Phi),
            "u0" | "u0_bar" | "u0bar" => Ok(SweepParam::U0Bar),
            "n" => Ok(SweepParam::N),
            other => Err(Error::InvalidArgument(format!(
                "cannot vary {other:?}; choose sigma, delta, phi, u0_bar or n"
            ))),
        }
    }
}

/// `steps` evenly spaced values from `from` to `to` inclusive.
pub fn linspace(from: f64, to: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![from];
    }
    (0..steps)
        .map(|k| if k + 1 == steps { to } else { from + (to - from) * k as f64 / (steps - 1) as f64 })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub base: EnvParams,
    pub cost: CostFunction,
    pub vary: SweepParam,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub regimes: Vec<Regime>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.from < self.to) {
            return Err(Error::InvalidArgument(format!("sweep needs from < to, got {} and {}", self.from, self.to)));
        }
        if self.steps < 2 {
            return Err(Error::InvalidArgument("sweep needs at least 2 steps".into()));
        }
        if self.regimes.is_empty() {
            return Err(Error::InvalidArgument("sweep needs at least one regime".into()));
        }
        self.cost.validate()?;
        self.vary.apply(&self.base, self.from).validate()?;
        self.vary.apply(&self.base, self.to).validate()
    }

    pub fn values(&self) -> Vec<f64> {
        linspace(self.from, self.to, self.steps)
    }
}

/// One sweep row; profits and surplus are per worker.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub regime: Regime,
    pub vary_name: SweepParam,
    pub vary_value: f64,
    pub branch: Branch,
    pub effort: f64,
    pub surplus_pw: f64,
    pub owner_pw: f64,
    pub manager_pw: f64,
    pub feasible: bool,
}

impl SweepRow {
    pub fn new(sol: &ContractSolution, vary: SweepParam, value: f64) -> Self {
        let nf = sol.params.nf();
        Self {
            regime: sol.regime,
            vary_name: vary,
            vary_value: value,
            branch: sol.branch,
            effort: sol.effort,
            surplus_pw: sol.surplus / nf,
            owner_pw: sol.owner_profit / nf,
            manager_pw: sol.manager_profit / nf,
            feasible: sol.feasible,
        }
    }
}

// A numerical failure in one cell becomes an infeasible solution so sweeps and
// maps always complete.
fn solve_or_flag(solver: &Solver, regime: Regime, p: &EnvParams, c: &CostFunction) -> ContractSolution {
    solver.solve(regime, p, c).unwrap_or_else(|err| {
        ContractSolution::blank(regime, *p, *c).infeasible(format!("solver failed: {err}"))
    })
}

/// Solutions ordered by grid point, then by the order of `spec.regimes`.
pub fn sweep_solutions(spec: &SweepSpec, solver: &Solver) -> Result<Vec<ContractSolution>> {
    spec.validate()?;
    let values = spec.values();
    let cells: Vec<(f64, Regime)> =
        values.iter().flat_map(|&v| spec.regimes.iter().map(move |&r| (v, r))).collect();
    Ok(cells
        .par_iter()
        .map(|&(v, r)| solve_or_flag(solver, r, &spec.vary.apply(&spec.base, v), &spec.cost))
        .collect())
}

pub fn sweep(spec: &SweepSpec, solver: &Solver) -> Result<Vec<SweepRow>> {
    let values = spec.values();
    let per_point = spec.regimes.len();
    let sols = sweep_solutions(spec, solver)?;
    Ok(sols
        .iter()
        .enumerate()
        .map(|(i, s)| SweepRow::new(s, spec.vary, values[i / per_point]))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[repr(u8)]
pub enum RegimeCode {
    Infeasible = 0,
    EqualBonus = 1,
    IntegratedManager = 2,
    SeparateManager = 3,
}

impl RegimeCode {
    pub fn code(&self) -> u8 {
        *self as u8
    }

    pub fn of(regime: Regime) -> Self {
        match regime {
            Regime::EqualBonus => RegimeCode::EqualBonus,
            Regime::IntegratedManager => RegimeCode::IntegratedManager,
            Regime::SeparateManager => RegimeCode::SeparateManager,
            Regime::ObservableBenchmark => RegimeCode::Infeasible,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Choice {
    pub code: RegimeCode,
    pub best: Option<ContractSolution>,
    /// Every competing solution, in tie-break order.
    pub candidates: Vec<ContractSolution>,
}

/// Owner-optimal structure among those available without observing effort.
/// Exact ties go to the earlier of equal bonus, integrated, separate.
pub fn choose_best(p: &EnvParams, c: &CostFunction, solver: &Solver) -> Choice {
    let candidates: Vec<ContractSolution> =
        Regime::UNOBSERVABLE.iter().map(|&r| solve_or_flag(solver, r, p, c)).collect();
    let mut best: Option<&ContractSolution> = None;
    for s in candidates.iter().filter(|s| s.feasible) {
        if best.map_or(true, |b| s.owner_profit > b.owner_profit) {
            best = Some(s);
        }
    }
    Choice {
        code: best.map_or(RegimeCode::Infeasible, |s| RegimeCode::of(s.regime)),
        best: best.cloned(),
        candidates,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn new(param: SweepParam, from: f64, to: f64, steps: usize) -> Result<Self> {
        if !(from <= to) || steps < 1 || (steps > 1 && from == to) {
            return Err(Error::InvalidArgument(format!("bad axis {param}:{from}:{to}:{steps}")));
        }
        Ok(Self { param, values: linspace(from, to, steps) })
    }
}

/// `param:from:to:steps`
impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [param, from, to, steps] = parts.as_slice() else {
            return Err(Error::InvalidArgument(format!("axis {s:?} is not param:from:to:steps")));
        };
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| Error::InvalidArgument(format!("bad number {t:?} in axis {s:?}")));
        let steps = steps
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::InvalidArgument(format!("bad step count in axis {s:?}")))?;
        Axis::new(param.parse()?, num(from)?, num(to)?, steps)
    }
}

/// Best structure on a grid. `codes[i][j]` and `owner_profit[i][j]` belong to
/// `axis1.values[i]`, `axis2.values[j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionMap {
    pub axis1: Axis,
    pub axis2: Axis,
    pub codes: Vec<Vec<RegimeCode>>,
    pub owner_profit: Vec<Vec<Option<f64>>>,
}

pub fn region_map(
    axis1: &Axis,
    axis2: &Axis,
    base: &EnvParams,
    c: &CostFunction,
    solver: &Solver,
) -> Result<RegionMap> {
    if axis1.param == axis2.param {
        return Err(Error::InvalidArgument("map axes must vary different parameters".into()));
    }
    c.validate()?;
    let at = |i: usize, j: usize| axis2.param.apply(&axis1.param.apply(base, axis1.values[i]), axis2.values[j]);
    for (i, j) in [(0, 0), (axis1.values.len() - 1, axis2.values.len() - 1)] {
        at(i, j).validate()?;
    }
    let cols = axis2.values.len();
    let cells: Vec<(RegimeCode, Option<f64>)> = (0..axis1.values.len() * cols)
        .into_par_iter()
        .map(|k| {
            let choice = choose_best(&at(k / cols, k % cols), c, solver);
            (choice.code, choice.best.map(|s| s.owner_profit))
        })
        .collect();
    let (codes, owner_profit) = cells
        .chunks(cols)
        .map(|row| (row.iter().map(|c| c.0).collect(), row.iter().map(|c| c.1).collect()))
        .unzip();
    Ok(RegionMap { axis1: axis1.clone(), axis2: axis2.clone(), codes, owner_profit })
}

/// Point in `bracket` where the owner becomes indifferent between `a` and `b`.
/// An infeasible structure counts as profit `-∞`, so a sign change caused by
/// feasibility alone is reported as [`Error::NotACrossing`].
pub fn crossover(
    vary: SweepParam,
    a: Regime,
    b: Regime,
    base: &EnvParams,
    c: &CostFunction,
    bracket: (f64, f64),
    solver: &Solver,
) -> Result<f64> {
    if a == b {
        return Err(Error::InvalidArgument(format!("crossover needs two different regimes, got {a} twice")));
    }
    let profit = |r: Regime, x: f64| -> ContractSolution { solve_or_flag(solver, r, &vary.apply(base, x), c) };
    let value = |s: &ContractSolution| if s.feasible { s.owner_profit } else { f64::NEG_INFINITY };
    let diff = |x: f64| {
        let (sa, sb) = (profit(a, x), profit(b, x));
        match (sa.feasible, sb.feasible) {
            (false, false) => f64::NAN,
            _ => value(&sa) - value(&sb),
        }
    };
    let (lo, hi) = (bracket.0.min(bracket.1), bracket.0.max(bracket.1));
    vary.apply(base, lo).validate()?;
    vary.apply(base, hi).validate()?;
    let cfg = RootFindConfig { abs_tol: 1e-6, max_iter: 200 };
    let x = bisect(diff, lo, hi, &cfg)?;

    let (sa, sb) = (profit(a, x), profit(b, x));
    if !(sa.feasible && sb.feasible) {
        return Err(Error::NotACrossing {
            at: x,
            detail: format!("{a} feasible: {}, {b} feasible: {}", sa.feasible, sb.feasible),
        });
    }
    let gap = (sa.owner_profit - sb.owner_profit).abs();
    if gap > 1e-5 {
        return Err(Error::NotACrossing { at: x, detail: format!("owner profits differ by {gap}") });
    }
    Ok(x)
}

fn first_best_margin(u_bar: f64, c: &CostFunction) -> f64 {
    let e = c.first_best();
    e - c.c(e) - u_bar
}

/// Largest noise level at which the equal-bonus contract is feasible.
pub fn sigma_star_equal(n: u32, delta: f64, u_bar: f64, c: &CostFunction) -> Result<f64> {
    EnvParams { n, delta, u_bar, ..EnvParams::default() }.validate()?;
    c.validate()?;
    let margin = first_best_margin(u_bar, c);
    if margin < 0.0 {
        return Err(Error::InfeasibleEnvironment(format!(
            "outside option {u_bar} exceeds first-best surplus per worker {}",
            margin + u_bar
        )));
    }
    if margin == 0.0 {
        return Ok(0.0);
    }
    let k = (1.0 - delta) * (2.0 * PI * n as f64).sqrt() / delta;
    let ratio = |e: f64| (e - c.c(e) - u_bar) / (k * c.c1(e));
    let e_fb = c.first_best();
    let points = 2000;
    let (best_k, _) = (1..=points)
        .map(|i| (i, ratio(e_fb * i as f64 / points as f64)))
        .fold((points, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    let lo = e_fb * (best_k - 1) as f64 / points as f64;
    let hi = e_fb * ((best_k + 1).min(points)) as f64 / points as f64;
    let (_, neg) = golden_section_min(|e| -ratio(e), lo.max(f64::MIN_POSITIVE), hi, 1e-12 * e_fb);
    Ok((-neg).max(ratio(e_fb)).max(0.0))
}

/// Separate-structure owner profit at the equal-bonus feasibility edge,
/// without the manager's outside income.
pub fn compute_u_n(phi: f64, n: u32, delta: f64, u_bar: f64, c: &CostFunction, solver: &Solver) -> Result<f64> {
    let sigma = sigma_star_equal(n, delta, u_bar, c)?;
    let p = EnvParams { n, sigma, delta, u_bar, u0_bar: 0.0, phi };
    Ok(solver.solve_separate(&p, c)?.owner_profit)
}
