//! Normal-distribution special functions and the tournament constants
//! `p_n` and `rho_n(eta)`.
//!
//! For `n` workers with standard normal noise,
//!
//! ```text
//! p_n        = ∫_0^∞  Φ(z)^(n-1) φ(z) z dz
//! rho_n(eta) = ∫_-eta^0 Φ(z)^(n-1) φ(z) z dz   (≤ 0)
//! ```
//!
//! so `(p_n + rho_n(eta)) / σ` is the marginal winning probability of a
//! tournament whose threshold sits `eta` standard deviations below effort.
//! The closed forms in terms of `erfc` are the integrated-by-parts versions
//! of the same integrals.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use crate::error::{Error, Result};

use super::{integrate, SpecialFnConfig};

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

/// Complementary error function `(2/√π) ∫_x^∞ e^{-t²} dt`.
#[inline]
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

#[inline]
pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

#[inline]
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z * FRAC_1_SQRT_2)
}

/// Standard normal quantile (Acklam's rational approximation, relative error
/// below 1.2e-9). Used as the starting point for [`inv_erfc`].
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("normal quantile needs 0 < p < 1, got {p}")));
    }
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.02425;

    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    let x = if p < P_LOW {
        tail((-2.0 * p.ln()).sqrt())
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -tail((-2.0 * (1.0 - p).ln()).sqrt())
    };
    Ok(x)
}

/// Functional inverse of [`erfc`] on `(0, 2)`.
pub fn inv_erfc(y: f64) -> Result<f64> {
    if !(y > 0.0 && y < 2.0) {
        return Err(Error::Domain(format!("inv_erfc needs 0 < y < 2, got {y}")));
    }
    if y == 1.0 {
        return Ok(0.0);
    }
    if y > 1.0 {
        return inv_erfc(2.0 - y).map(|x| -x);
    }
    // erfc(x) = 2 Φ(-x√2)
    let mut x = -normal_quantile(0.5 * y)? * FRAC_1_SQRT_2;
    for _ in 0..8 {
        let f = erfc(x) - y;
        let df = -FRAC_2_SQRT_PI * (-x * x).exp();
        // Halley step, using f'' = -2x f'
        let step = f / (df + x * f);
        x -= step;
        if step.abs() <= 4.0 * f64::EPSILON * x.abs().max(1e-300) {
            break;
        }
    }
    Ok(x)
}

fn check_n(n: u32) -> Result<()> {
    if n < 1 {
        return Err(Error::InvalidArgument("number of workers must be at least 1".into()));
    }
    Ok(())
}

/// `p_n` by the change-of-variables integral `∫_0^W Φ^{n-1} φ z dz`.
pub fn compute_p_n(n: u32, cfg: &SpecialFnConfig) -> Result<f64> {
    check_n(n)?;
    let m = (n - 1) as i32;
    integrate(|z| normal_cdf(z).powi(m) * normal_pdf(z) * z, 0.0, cfg.tail_truncation, cfg)
}

/// `p_n` by its defining limit,
/// `(1/(n 2^n)) (erfc(-W/√2)^n W - ∫_0^W erfc(-w/√2)^n dw)`, truncated at
/// `W = tail_truncation`. Both terms are carried in the `Φ^n = (erfc/2)^n`
/// scaling so the cancellation costs only `log10(W)` digits.
pub fn p_n_definitional(n: u32, cfg: &SpecialFnConfig) -> Result<f64> {
    check_n(n)?;
    let w = cfg.tail_truncation;
    let k = n as i32;
    let boundary = (0.5 * erfc(-w / SQRT_2)).powi(k) * w;
    let area = integrate(|t| (0.5 * erfc(-t / SQRT_2)).powi(k), 0.0, w, cfg)?;
    Ok((boundary - area) / n as f64)
}

/// `∫_0^eta erfc(w/√2)^n dw`. The integrand is below 1e-32 past the tail
/// truncation, so the upper limit is clamped there.
pub fn integral_erfc_pow(n: u32, eta: f64, cfg: &SpecialFnConfig) -> Result<f64> {
    check_n(n)?;
    if !(eta >= 0.0) {
        return Err(Error::InvalidArgument(format!("eta must be non-negative, got {eta}")));
    }
    let upper = eta.min(cfg.tail_truncation);
    let k = n as i32;
    integrate(|w| erfc(w / SQRT_2).powi(k), 0.0, upper, cfg)
}

/// `rho_n(eta)`; `eta = +∞` gives the limit `∫_-∞^0 Φ^{n-1} φ z dz`.
pub fn compute_rho_n(n: u32, eta: f64, cfg: &SpecialFnConfig) -> Result<f64> {
    check_n(n)?;
    if !(eta >= 0.0) {
        return Err(Error::InvalidArgument(format!("eta must be non-negative, got {eta}")));
    }
    if eta == 0.0 {
        return Ok(0.0);
    }
    if eta.is_infinite() {
        let m = (n - 1) as i32;
        return integrate(
            |z| normal_cdf(z).powi(m) * normal_pdf(z) * z,
            -cfg.tail_truncation,
            0.0,
            cfg,
        );
    }
    // Scaled by 2^-n throughout: (erfc/2)^n stays in [0, 1].
    let k = n as i32;
    let boundary = eta * (0.5 * erfc(eta / SQRT_2)).powi(k);
    let area = integral_erfc_pow(n, eta, cfg)? / 2f64.powi(k);
    // Round-off can push the difference a hair above zero for tiny eta.
    Ok(((boundary - area) / n as f64).min(0.0))
}

/// `p_n + rho_n(eta)`: σ times the marginal winning probability at threshold
/// `e - σ eta`.
pub fn tournament_constant(n: u32, eta: f64, cfg: &SpecialFnConfig) -> Result<f64> {
    Ok(compute_p_n(n, cfg)? + compute_rho_n(n, eta, cfg)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cfg() -> SpecialFnConfig {
        SpecialFnConfig::default()
    }

    #[test]
    fn erfc_anchors() {
        assert_eq!(erfc(0.0), 1.0);
        assert_abs_diff_eq!(erfc(0.7), 2.0 - erfc(-0.7), epsilon = 1e-15);
    }

    #[test]
    fn erfc_matches_defining_integral() {
        // (2/√π) ∫_1^∞ e^{-t²} dt; the integrand is < 1e-60 beyond t = 12
        let v = integrate(|t| FRAC_2_SQRT_PI * (-t * t).exp(), 1.0, 12.0, &cfg()).unwrap();
        assert_abs_diff_eq!(erfc(1.0), v, epsilon = 1e-12);
    }

    #[test]
    fn inv_erfc_anchors() {
        assert_eq!(inv_erfc(1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(inv_erfc(erfc(0.5)).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn inv_erfc_matches_bisection() {
        let cfg = crate::numerics::RootFindConfig { abs_tol: 1e-14, max_iter: 200 };
        let oracle = crate::numerics::bisect(|x| erfc(x) - 0.1, 0.0, 5.0, &cfg).unwrap();
        assert_abs_diff_eq!(inv_erfc(0.1).unwrap(), oracle, epsilon = 1e-12);
    }

    #[test]
    fn inv_erfc_round_trips_across_range() {
        for &y in &[1e-300, 1e-100, 1e-20, 1e-5, 0.01, 0.3, 0.999, 1.001, 1.5, 1.99, 2.0 - 1e-12] {
            let x = inv_erfc(y).unwrap();
            let back = erfc(x);
            assert!((back - y).abs() <= 1e-10 * y.clamp(1e-300, 1.0), "y = {y}, back = {back}");
        }
    }

    #[test]
    fn inv_erfc_domain() {
        for &y in &[0.0, 2.0, -1.0, 3.0, f64::NAN] {
            assert!(matches!(inv_erfc(y), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn p_one_is_pdf_at_zero() {
        let expected = 1.0 / (2.0 * PI).sqrt();
        assert_abs_diff_eq!(compute_p_n(1, &cfg()).unwrap(), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(p_n_definitional(1, &cfg()).unwrap(), expected, epsilon = 1e-10);
    }

    #[test]
    fn p_n_rejects_zero_workers() {
        assert!(compute_p_n(0, &cfg()).is_err());
        assert!(p_n_definitional(0, &cfg()).is_err());
    }

    #[test]
    fn p_two_closed_form() {
        // ∫_0^∞ Φ φ z dz = 1/(2√(2π)) + 1/(4√π)
        let expected = 1.0 / (2.0 * (2.0 * PI).sqrt()) + 1.0 / (4.0 * PI.sqrt());
        assert_abs_diff_eq!(compute_p_n(2, &cfg()).unwrap(), expected, epsilon = 1e-12);
    }

    #[test]
    fn rho_zero_and_sign() {
        for n in 1..=6 {
            assert_eq!(compute_rho_n(n, 0.0, &cfg()).unwrap(), 0.0);
            assert!(compute_rho_n(n, 1.3, &cfg()).unwrap() < 0.0);
            assert!(compute_rho_n(n, f64::INFINITY, &cfg()).unwrap() < 0.0);
        }
        assert!(compute_rho_n(3, -0.1, &cfg()).is_err());
    }

    #[test]
    fn rho_approaches_its_limit() {
        let far = compute_rho_n(4, 11.0, &cfg()).unwrap();
        let limit = compute_rho_n(4, f64::INFINITY, &cfg()).unwrap();
        assert_abs_diff_eq!(far, limit, epsilon = 1e-10);
    }

    #[test]
    fn rho_one_at_infinity_is_minus_pdf_at_zero() {
        let v = compute_rho_n(1, f64::INFINITY, &cfg()).unwrap();
        assert_abs_diff_eq!(v, -1.0 / (2.0 * PI).sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn integral_erfc_pow_edges() {
        assert_eq!(integral_erfc_pow(3, 0.0, &cfg()).unwrap(), 0.0);
        assert!(integral_erfc_pow(4, 2.0, &cfg()).unwrap() < 2.0);
        assert!(integral_erfc_pow(4, -1.0, &cfg()).is_err());
    }

    #[test]
    fn integral_erfc_pow_n1_closed_form() {
        // ∫_0^η erfc(w/√2) dw = η erfc(η/√2) - √(2/π)(e^{-η²/2} - 1)
        for &eta in &[0.1, 0.5, 1.0, 2.5, 6.0] {
            let closed =
                eta * erfc(eta / SQRT_2) - (2.0 / PI).sqrt() * ((-0.5 * eta * eta).exp() - 1.0);
            assert_abs_diff_eq!(integral_erfc_pow(1, eta, &cfg()).unwrap(), closed, epsilon = 1e-10);
        }
    }

    #[test]
    fn quantile_is_inverse_cdf() {
        for &p in &[1e-10, 0.01, 0.2, 0.5, 0.8, 0.99] {
            let z = normal_quantile(p).unwrap();
            assert!((normal_cdf(z) - p).abs() < 2e-9 * p.max(1e-3));
        }
        assert!(normal_quantile(0.0).is_err());
    }
}
