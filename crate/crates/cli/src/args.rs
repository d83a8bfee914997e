use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "relcontract", version, about = "Optimal relational contracts with and without a monitoring manager")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Environment, numerics and output flags shared by every subcommand. Unset
/// flags fall back to the config file, then to built-in defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Number of workers (>= 2)
    #[arg(long)]
    pub n: Option<u32>,
    /// Standard deviation of individual performance
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Discount factor in (0, 1) [default: 0.7]
    #[arg(long)]
    pub delta: Option<f64>,
    /// Worker outside income per period [default: 0.1]
    #[arg(long = "u-bar")]
    pub u_bar: Option<f64>,
    /// Manager outside income plus managing cost per period [default: 0]
    #[arg(long = "u0", alias = "u0-bar")]
    pub u0_bar: Option<f64>,
    /// Share of the team bonus a colluding pair captures, in [0, 1] [default: 1]
    #[arg(long)]
    pub phi: Option<f64>,
    /// Cost function: quadratic[:a] or power:q[:a] [default: quadratic:1]
    #[arg(long)]
    pub cost: Option<String>,
    /// Root-finding and quadrature tolerance [default: 1e-10]
    #[arg(long)]
    pub tol: Option<f64>,
    /// Seed for Monte-Carlo checks [default: 1]
    #[arg(long)]
    pub seed: Option<u64>,
    /// key=value file supplying defaults for the flags above
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file; relative paths resolve against $RELCONTRACT_OUTPUT_DIR when set
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one management structure
    Solve {
        /// observable, equal, integrated or separate
        #[arg(long)]
        regime: Option<String>,
        /// Take parameters, cost and regime from a previous JSON solve output
        #[arg(long = "from-json")]
        from_json: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Solve structures over a grid of one parameter
    Sweep {
        /// sigma, delta, phi, u0_bar or n
        #[arg(long)]
        vary: String,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        /// Comma-separated structures [default: all four]
        #[arg(long, value_delimiter = ',')]
        regimes: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Owner's best structure over a two-parameter grid
    Map {
        /// param:from:to:steps
        #[arg(long)]
        axis1: String,
        /// param:from:to:steps
        #[arg(long)]
        axis2: String,
        #[command(flatten)]
        common: Common,
    },
    /// Parameter value where the owner is indifferent between two structures
    Crossover {
        #[arg(long)]
        vary: String,
        #[arg(long = "regime-a")]
        regime_a: String,
        #[arg(long = "regime-b")]
        regime_b: String,
        #[arg(long)]
        lo: f64,
        #[arg(long)]
        hi: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Solve, then check incentive compatibility by simulation and the no-reneging bounds
    Verify {
        #[arg(long)]
        regime: String,
        #[arg(long, default_value_t = 1_000_000)]
        draws: usize,
        #[arg(long = "grid-step", default_value_t = 0.02)]
        grid_step: f64,
        #[arg(long = "grid-half-width", default_value_t = 0.2)]
        grid_half_width: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Equal-bonus feasibility edge and the separate-structure profit there
    UnTable {
        /// Comma-separated worker counts
        #[arg(long = "n-values", value_delimiter = ',', default_value = "2,3,4,5,6,7,8,9,10")]
        n_values: Vec<u32>,
        /// Comma-separated collusion shares
        #[arg(long = "phi-values", value_delimiter = ',', default_value = "0,0.25,0.5,0.75,1")]
        phi_values: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Solve { common, .. }
            | Command::Sweep { common, .. }
            | Command::Map { common, .. }
            | Command::Crossover { common, .. }
            | Command::Verify { common, .. }
            | Command::UnTable { common, .. } => common,
        }
    }
}
