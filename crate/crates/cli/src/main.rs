mod args;
mod config;
mod output;

use std::fmt::Write as _;
use std::fs;
use std::process::ExitCode;

use clap::Parser;
use serde::{Deserialize, Serialize};

use relcontract::chooser::{
    compute_u_n, crossover, region_map, sigma_star_equal, sweep, Axis, SweepParam, SweepSpec,
};
use relcontract::contracts::{ContractSolution, Regime, Solver};
use relcontract::oracle::{check_no_reneging, mc_best_response, McConfig, McReport, McStatus, RenegingReport};

use args::{Cli, Command, Common, Format};
use config::Settings;
use output::{csv_head, emit};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    fn from_core_usage(e: relcontract::Error) -> Self {
        CliError::Usage(e.to_string())
    }

    fn io(e: std::io::Error) -> Self {
        CliError::Runtime(format!("i/o error: {e}"))
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

// Invalid parameters are the caller's fault; anything else is a runtime failure.
impl From<relcontract::Error> for CliError {
    fn from(e: relcontract::Error) -> Self {
        match e {
            relcontract::Error::InvalidArgument(_) | relcontract::Error::InfeasibleEnvironment(_) => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Runtime(other.to_string()),
        }
    }
}

const EXIT_INFEASIBLE: u8 = 3;
const EXIT_VERIFY_FAILED: u8 = 1;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("relcontract: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn parse_regime(s: &str) -> Result<Regime, CliError> {
    s.parse().map_err(CliError::from_core_usage)
}

fn solver_for(s: &Settings) -> Result<Solver, CliError> {
    let solver = Solver::with_tol(s.tol);
    solver.validate()?;
    Ok(solver)
}

fn json<T: Serialize>(v: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::Runtime(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn finish(common: &Common, default: Format, json_text: impl FnOnce() -> Result<String, CliError>, csv_text: impl FnOnce() -> String) -> Result<(), CliError> {
    let text = match common.format.unwrap_or(default) {
        Format::Json => json_text()?,
        Format::Csv => csv_text(),
    };
    emit(common.output.as_deref(), &text)
}

fn run(cmd: &Command) -> Result<u8, CliError> {
    let common = cmd.common();
    match cmd {
        Command::Solve { regime, from_json, .. } => {
            let mut settings = Settings::default();
            if let Some(path) = &common.config {
                settings.apply_file(path)?;
            }
            let mut chosen = regime.as_deref().map(parse_regime).transpose()?;
            if let Some(path) = from_json {
                let prior = read_solution(path)?;
                settings.params = prior.params;
                settings.cost = prior.cost;
                chosen = chosen.or(Some(prior.regime));
            }
            settings.apply_flags(common)?;
            let Some(regime) = chosen else {
                return Err(CliError::Usage("solve needs --regime or --from-json".into()));
            };
            let sol = solver_for(&settings)?.solve(regime, &settings.params, &settings.cost)?;
            finish(common, Format::Json, || json(&sol), || solve_csv(&sol))?;
            if !sol.feasible {
                eprintln!(
                    "relcontract: {} is infeasible: {}",
                    regime,
                    sol.infeasibility.as_deref().unwrap_or("unknown reason")
                );
                return Ok(EXIT_INFEASIBLE);
            }
            Ok(0)
        }
        Command::Sweep { vary, from, to, steps, regimes, .. } => {
            let settings = Settings::resolve(common)?;
            let regimes = if regimes.is_empty() {
                Regime::ALL.to_vec()
            } else {
                regimes.iter().map(|r| parse_regime(r)).collect::<Result<_, _>>()?
            };
            let spec = SweepSpec {
                base: settings.params,
                cost: settings.cost,
                vary: vary.parse().map_err(CliError::from_core_usage)?,
                from: *from,
                to: *to,
                steps: *steps,
                regimes,
            };
            spec.validate()?;
            let rows = sweep(&spec, &solver_for(&settings)?)?;
            finish(common, Format::Csv, || json(&rows), || {
                let mut s = csv_head(
                    "sweep",
                    "",
                    &["regime", "vary_name", "vary_value", "branch", "effort", "surplus_pw", "owner_pw", "manager_pw", "feasible"],
                );
                for r in &rows {
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{},{},{},{},{}",
                        r.regime, r.vary_name, r.vary_value, r.branch, r.effort, r.surplus_pw, r.owner_pw, r.manager_pw, r.feasible
                    );
                }
                s
            })?;
            Ok(0)
        }
        Command::Map { axis1, axis2, .. } => {
            let settings = Settings::resolve(common)?;
            let a1: Axis = axis1.parse().map_err(CliError::from_core_usage)?;
            let a2: Axis = axis2.parse().map_err(CliError::from_core_usage)?;
            let map = region_map(&a1, &a2, &settings.params, &settings.cost, &solver_for(&settings)?)?;
            finish(common, Format::Csv, || json(&map), || {
                let extra = format!("axis1={} axis2={}", map.axis1.param, map.axis2.param);
                let mut s = csv_head("map", &extra, &["axis1", "axis2", "regime_code", "owner_profit"]);
                for (i, x) in map.axis1.values.iter().enumerate() {
                    for (j, y) in map.axis2.values.iter().enumerate() {
                        let profit = map.owner_profit[i][j].map(|v| v.to_string()).unwrap_or_default();
                        let _ = writeln!(s, "{x},{y},{},{profit}", map.codes[i][j].code());
                    }
                }
                s
            })?;
            Ok(0)
        }
        Command::Crossover { vary, regime_a, regime_b, lo, hi, .. } => {
            let settings = Settings::resolve(common)?;
            let vary: SweepParam = vary.parse().map_err(CliError::from_core_usage)?;
            let (a, b) = (parse_regime(regime_a)?, parse_regime(regime_b)?);
            let value = crossover(vary, a, b, &settings.params, &settings.cost, (*lo, *hi), &solver_for(&settings)?)?;
            #[derive(Serialize)]
            struct Out {
                vary: SweepParam,
                regime_a: Regime,
                regime_b: Regime,
                value: f64,
            }
            let out = Out { vary, regime_a: a, regime_b: b, value };
            finish(common, Format::Json, || json(&out), || {
                format!("{}{vary},{a},{b},{value}\n", csv_head("crossover", "", &["vary", "regime_a", "regime_b", "value"]))
            })?;
            Ok(0)
        }
        Command::Verify { regime, draws, grid_step, grid_half_width, .. } => {
            let settings = Settings::resolve(common)?;
            let regime = parse_regime(regime)?;
            let sol = solver_for(&settings)?.solve(regime, &settings.params, &settings.cost)?;
            if !sol.feasible {
                finish(common, Format::Json, || json(&sol), || solve_csv(&sol))?;
                eprintln!("relcontract: {regime} is infeasible; nothing to verify");
                return Ok(EXIT_INFEASIBLE);
            }
            let report = verify(&sol, &settings, *draws, *grid_step, *grid_half_width)?;
            finish(common, Format::Json, || json(&report), || {
                let mut s = csv_head("verify", "", &["check", "value", "ok"]);
                let r = &report.reneging;
                let _ = writeln!(s, "owner_slack,{},{}", r.owner_slack, r.owner_ok);
                let _ = writeln!(s, "manager_slack,{},{}", r.manager_slack, r.manager_ok);
                let _ = writeln!(s, "participation_slack,{},{}", report.participation_slack, report.participation_ok);
                if let Some(mc) = &report.mc {
                    let _ = writeln!(s, "mc_argmax_effort,{},{}", mc.argmax_effort, mc.status != McStatus::Rejected);
                }
                s
            })?;
            Ok(if report.passed { 0 } else { EXIT_VERIFY_FAILED })
        }
        Command::UnTable { n_values, phi_values, .. } => {
            let settings = Settings::resolve(common)?;
            let solver = solver_for(&settings)?;
            let p = &settings.params;
            #[derive(Serialize)]
            struct Row {
                n: u32,
                phi: f64,
                sigma_star: f64,
                u_n: f64,
            }
            let mut rows = Vec::new();
            for &n in n_values {
                let sigma_star = sigma_star_equal(n, p.delta, p.u_bar, &settings.cost)?;
                for &phi in phi_values {
                    let u_n = compute_u_n(phi, n, p.delta, p.u_bar, &settings.cost, &solver)?;
                    rows.push(Row { n, phi, sigma_star, u_n });
                }
            }
            finish(common, Format::Csv, || json(&rows), || {
                let mut s = csv_head("un-table", "", &["n", "phi", "sigma_star", "u_n"]);
                for r in &rows {
                    let _ = writeln!(s, "{},{},{},{}", r.n, r.phi, r.sigma_star, r.u_n);
                }
                s
            })?;
            Ok(0)
        }
    }
}

fn read_solution(path: &std::path::Path) -> Result<ContractSolution, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{} is not a solve output: {e}", path.display())))
}

fn solve_csv(sol: &ContractSolution) -> String {
    let mut s = csv_head(
        "solve",
        "",
        &["regime", "branch", "effort", "surplus", "owner_profit", "manager_profit", "destroyed_surplus", "feasible"],
    );
    let _ = writeln!(
        s,
        "{},{},{},{},{},{},{},{}",
        sol.regime, sol.branch, sol.effort, sol.surplus, sol.owner_profit, sol.manager_profit, sol.destroyed_surplus, sol.feasible
    );
    s
}

#[derive(Debug, Serialize, Deserialize)]
struct VerifyReport {
    solution: ContractSolution,
    reneging: RenegingReport,
    participation_slack: f64,
    participation_ok: bool,
    mc: Option<McReport>,
    passed: bool,
}

fn verify(sol: &ContractSolution, s: &Settings, draws: usize, step: f64, half: f64) -> Result<VerifyReport, CliError> {
    if !(step > 0.0 && half >= step) {
        return Err(CliError::Usage("grid-step must be positive and no larger than grid-half-width".into()));
    }
    let reneging = check_no_reneging(sol)?;
    let participation_slack = sol.worker_participation_slack();
    let participation_ok = participation_slack.abs() <= 1e-8;
    let mc = if s.params.sigma > 0.0 {
        let cfg = McConfig::around(sol.effort, half, step, draws, s.seed);
        Some(mc_best_response(&sol.scheme, sol.effort, &sol.params, &sol.cost, &cfg)?)
    } else {
        None
    };
    let passed = reneging.owner_ok
        && reneging.manager_ok
        && participation_ok
        && mc.as_ref().map_or(true, |m| m.status != McStatus::Rejected);
    Ok(VerifyReport { solution: sol.clone(), reneging, participation_slack, participation_ok, mc, passed })
}
