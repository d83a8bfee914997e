//! Independent checks of the solver output: general location-family
//! quadrature for the tournament integrals, Monte-Carlo best responses and
//! no-reneging slacks.

mod family;
mod mc;
mod reneging;

pub use family::{
    check_shift_invariance_sep, team_marginal, tournament_marginal, win_probability, BaseDensity,
    LocationFamily,
};
pub use mc::{mc_best_response, mc_destruction_frequency, McConfig, McFrequency, McReport, McStatus};
pub use reneging::{check_no_reneging, RenegingReport, SLACK_TOL};
