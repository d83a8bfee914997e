//! Bracketed scalar root finding.
//!
//! [`find_root_bracketed`] is Brent's method (inverse quadratic interpolation
//! guarded by bisection); [`bisect`] is plain bisection. Both stop once the
//! sign-change bracket is no wider than `abs_tol`.

use crate::error::{Error, Result};

use super::RootFindConfig;

fn check_bracket(lo: f64, hi: f64, f_lo: f64, f_hi: f64) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::InvalidArgument(format!("bracket [{lo}, {hi}] must be finite")));
    }
    if f_lo.is_nan() || f_hi.is_nan() || f_lo * f_hi > 0.0 {
        return Err(Error::NoSignChange { lo, hi, f_lo, f_hi });
    }
    Ok(())
}

/// Brent's method on `[lo, hi]`; `f(lo)` and `f(hi)` must not share a sign.
pub fn find_root_bracketed<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    cfg: &RootFindConfig,
) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    check_bracket(lo, hi, fa, fb)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }

    let (mut c, mut fc) = (b, fb);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..cfg.max_iter {
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.25 * cfg.abs_tol;
        let xm = 0.5 * (c - b);
        if (c - b).abs() <= cfg.abs_tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
        if fb.is_nan() {
            return Err(Error::Domain(format!("function returned NaN at {b}")));
        }
    }
    Err(Error::NoConvergence { iterations: cfg.max_iter, width: (c - b).abs() })
}

/// Plain bisection on `[lo, hi]`; returns the midpoint of the final bracket.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, cfg: &RootFindConfig) -> Result<f64> {
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let (mut fa, fb) = (f(a), f(b));
    check_bracket(a, b, fa, fb)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    for _ in 0..cfg.max_iter {
        let mid = 0.5 * (a + b);
        if b - a <= cfg.abs_tol || mid <= a || mid >= b {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm.is_nan() {
            return Err(Error::Domain(format!("function returned NaN at {mid}")));
        }
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    if b - a <= cfg.abs_tol {
        return Ok(0.5 * (a + b));
    }
    Err(Error::NoConvergence { iterations: cfg.max_iter, width: b - a })
}

/// Golden-section minimisation of a unimodal function on `[lo, hi]`.
pub fn golden_section_min<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, abs_tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while (b - a).abs() > abs_tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 { (x1, f1) } else { (x2, f2) }
}

/// Largest root of `f` on `[lo, hi]`, located by a downward grid scan and
/// refined with Brent's method.
///
/// A narrow dip that crosses zero between two grid points is caught by
/// minimising around the grid point closest to a sign change. Returns
/// `Ok(None)` when no root is found.
pub fn largest_root<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    scan_points: usize,
    cfg: &RootFindConfig,
) -> Result<Option<f64>> {
    if !(lo < hi) {
        return Err(Error::InvalidArgument(format!("empty scan interval [{lo}, {hi}]")));
    }
    let n = scan_points.max(2);
    let xs: Vec<f64> = (0..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect();
    let fs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();

    if fs[n] == 0.0 {
        return Ok(Some(xs[n]));
    }
    for k in (0..n).rev() {
        if fs[k] == 0.0 {
            return Ok(Some(xs[k]));
        }
        if (fs[k] > 0.0) != (fs[k + 1] > 0.0) {
            return find_root_bracketed(&f, xs[k], xs[k + 1], cfg).map(Some);
        }
    }

    // No sign change on the grid: look for a dip below the grid resolution.
    let sign = fs[n].signum();
    let k_min = (0..=n)
        .min_by(|&i, &j| (sign * fs[i]).total_cmp(&(sign * fs[j])))
        .expect("grid is non-empty");
    let a = xs[k_min.saturating_sub(1)];
    let b = xs[(k_min + 1).min(n)];
    let (x_min, v_min) = golden_section_min(|x| sign * f(x), a, b, cfg.abs_tol.max(1e-14));
    if v_min <= 0.0 && x_min < b {
        return find_root_bracketed(&f, x_min, b, cfg).map(Some);
    }
    Ok(None)
}

/// Smallest root of `f` on `[lo, hi]`; the mirror image of [`largest_root`].
pub fn smallest_root<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    scan_points: usize,
    cfg: &RootFindConfig,
) -> Result<Option<f64>> {
    let mirrored = largest_root(|x| f(lo + hi - x), lo, hi, scan_points, cfg)?;
    Ok(mirrored.map(|x| lo + hi - x))
}
