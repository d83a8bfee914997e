use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{integrate, normal_cdf, normal_pdf, SpecialFnConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseDensity {
    StandardNormal,
    /// Standard logistic; variance π²/3 at unit scale.
    Logistic,
}

/// Performance density `f(x; e) = g((x - e)/s) / s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocationFamily {
    pub base: BaseDensity,
    pub scale: f64,
}

impl LocationFamily {
    pub fn normal(sigma: f64) -> Self {
        Self { base: BaseDensity::StandardNormal, scale: sigma }
    }

    pub fn logistic(scale: f64) -> Self {
        Self { base: BaseDensity::Logistic, scale }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::InvalidArgument(format!("family scale must be positive, got {}", self.scale)));
        }
        Ok(())
    }

    fn g(&self, u: f64) -> f64 {
        match self.base {
            BaseDensity::StandardNormal => normal_pdf(u),
            BaseDensity::Logistic => {
                let t = (-u.abs()).exp();
                t / ((1.0 + t) * (1.0 + t))
            }
        }
    }

    fn big_g(&self, u: f64) -> f64 {
        match self.base {
            BaseDensity::StandardNormal => normal_cdf(u),
            BaseDensity::Logistic => {
                if u >= 0.0 {
                    1.0 / (1.0 + (-u).exp())
                } else {
                    let t = u.exp();
                    t / (1.0 + t)
                }
            }
        }
    }

    fn g_prime(&self, u: f64) -> f64 {
        match self.base {
            BaseDensity::StandardNormal => -u * normal_pdf(u),
            BaseDensity::Logistic => -self.g(u) * (2.0 * self.big_g(u) - 1.0),
        }
    }

    /// Standardised point beyond which both tails are negligible.
    fn tail(&self, cfg: &SpecialFnConfig) -> f64 {
        match self.base {
            BaseDensity::StandardNormal => cfg.tail_truncation,
            // e^{-45} ≈ 3e-20
            BaseDensity::Logistic => 45.0_f64.max(cfg.tail_truncation),
        }
    }

    pub fn density(&self, x: f64, e: f64) -> f64 {
        self.g((x - e) / self.scale) / self.scale
    }

    pub fn cdf(&self, x: f64, e: f64) -> f64 {
        self.big_g((x - e) / self.scale)
    }

    /// `∂f/∂e`; equals `f (x - e)/σ²` for the normal member.
    pub fn density_effort_derivative(&self, x: f64, e: f64) -> f64 {
        -self.g_prime((x - e) / self.scale) / (self.scale * self.scale)
    }

    /// The point where `∂f/∂e` changes sign.
    pub fn likelihood_switch(&self, e: f64) -> f64 {
        e
    }

    // ∫_κ^∞ h(u) du over the standardised variable, clamped to the tails.
    fn standardised_tail_integral<H: Fn(f64) -> f64>(
        &self,
        h: H,
        e: f64,
        kappa: f64,
        cfg: &SpecialFnConfig,
    ) -> Result<f64> {
        let w = self.tail(cfg);
        let lo = ((kappa - e) / self.scale).max(-w);
        if lo >= w {
            return Ok(0.0);
        }
        integrate(h, lo, w, cfg)
    }
}

/// `∫_κ^∞ F(x;e)^{n-1} f_e(x;e) dx`: the marginal winning probability of one
/// worker in an `n`-player tournament with threshold `κ`.
pub fn tournament_marginal(
    n: u32,
    e: f64,
    kappa: f64,
    fam: &LocationFamily,
    cfg: &SpecialFnConfig,
) -> Result<f64> {
    check(n, fam)?;
    let m = (n - 1) as i32;
    let v = fam.standardised_tail_integral(|u| fam.big_g(u).powi(m) * -fam.g_prime(u), e, kappa, cfg)?;
    Ok(v / fam.scale)
}

/// `∫_κ^∞ F(x;e)^{n-1} f(x;e) dx`: one worker's probability of winning.
pub fn win_probability(
    n: u32,
    e: f64,
    kappa: f64,
    fam: &LocationFamily,
    cfg: &SpecialFnConfig,
) -> Result<f64> {
    check(n, fam)?;
    let m = (n - 1) as i32;
    fam.standardised_tail_integral(|u| fam.big_g(u).powi(m) * fam.g(u), e, kappa, cfg)
}

/// Marginal probability, with respect to one worker's effort, that total
/// output of `n` normal workers at effort `e` reaches `trigger`.
pub fn team_marginal(n: u32, e: f64, trigger: f64, sigma: f64, cfg: &SpecialFnConfig) -> Result<f64> {
    if n < 1 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    LocationFamily::normal(sigma).validate()?;
    let sd = sigma * (n as f64).sqrt();
    let lo = ((trigger - n as f64 * e) / sd).max(-cfg.tail_truncation);
    if lo >= cfg.tail_truncation {
        return Ok(0.0);
    }
    Ok(integrate(|z| normal_pdf(z) * z, lo, cfg.tail_truncation, cfg)? / sd)
}

/// Whether the separate-bonus tournament (threshold `σ η` below effort) has
/// the same winning probability and marginal at effort `e` as at effort 0.
pub fn check_shift_invariance_sep(n: u32, e: f64, eta: f64, fam: &LocationFamily) -> bool {
    let cfg = SpecialFnConfig::default();
    let shift = fam.scale * eta;
    let pair = |e: f64| -> Result<(f64, f64)> {
        Ok((
            win_probability(n, e, e - shift, fam, &cfg)?,
            tournament_marginal(n, e, e - shift, fam, &cfg)?,
        ))
    };
    match (pair(e), pair(0.0)) {
        (Ok((w1, m1)), Ok((w0, m0))) => (w1 - w0).abs() <= 1e-9 && (m1 - m0).abs() <= 1e-9,
        _ => false,
    }
}

fn check(n: u32, fam: &LocationFamily) -> Result<()> {
    if n < 1 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    fam.validate()
}
