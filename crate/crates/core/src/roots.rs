//! Bracketing root finders used throughout the crate.

use crate::error::{Error, Result};

/// Bisection on `[lo, hi]` where `f(lo)` and `f(hi)` have opposite signs.
///
/// Stops when the bracket is narrower than `xtol` or cannot shrink further in
/// floating point. Returns the final bracket.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, xtol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    let flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok((lo, lo));
    }
    if fhi == 0.0 {
        return Ok((hi, hi));
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return Err(Error::Bracket(format!(
            "no sign change on [{lo}, {hi}]: f = ({flo}, {fhi})"
        )));
    }
    let lo_sign = flo.signum();
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= xtol || mid == lo || mid == hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok((mid, mid));
        }
        if fm.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

/// Bisection on a monotone predicate: `pred(lo)` is false, `pred(hi)` is true.
/// Returns the final `(lo, hi)` with the same property.
pub fn bisect_predicate<P>(mut pred: P, mut lo: f64, mut hi: f64, xtol: f64) -> (f64, f64)
where
    P: FnMut(f64) -> bool,
{
    while hi - lo > xtol {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

/// Bisection followed by secant/Newton polishing kept inside the bracket.
///
/// The returned abscissa minimises `|f|` among the evaluated candidates.
pub fn bracketed_root<F>(mut f: F, lo: f64, hi: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (a, b) = bisect(&mut f, lo, hi, 0.0)?;
    let (fa, fb) = (f(a), f(b));
    let mut best = if fa.abs() <= fb.abs() {
        (a, fa)
    } else {
        (b, fb)
    };
    if a != b && fa != fb {
        let x = a - fa * (b - a) / (fb - fa);
        if x > a.min(b) && x < a.max(b) {
            let fx = f(x);
            if fx.abs() < best.1.abs() {
                best = (x, fx);
            }
        }
    }
    Ok(best.0)
}

/// Golden-section search for the extremum of `f` on `[lo, hi]`.
///
/// `maximize` selects the direction. Returns `(x, f(x))`.
pub fn golden_extremum<F>(mut f: F, mut lo: f64, mut hi: f64, maximize: bool) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let sign = if maximize { -1.0 } else { 1.0 };
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = hi - ratio * (hi - lo);
    let mut d = lo + ratio * (hi - lo);
    let mut fc = sign * f(c);
    let mut fd = sign * f(d);
    for _ in 0..200 {
        if (hi - lo).abs() <= 4.0 * f64::EPSILON * (lo.abs() + hi.abs()) {
            break;
        }
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - ratio * (hi - lo);
            fc = sign * f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + ratio * (hi - lo);
            fd = sign * f(d);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisection_finds_sqrt2() {
        let (a, b) = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((0.5 * (a + b) - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn bisection_rejects_missing_bracket() {
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn bracketed_root_is_tight() {
        let x = bracketed_root(|x| x.cos() - x, 0.0, 1.0).unwrap();
        assert!((x.cos() - x).abs() < 1e-15);
    }

    #[test]
    fn predicate_bisection() {
        let (lo, hi) = bisect_predicate(|x| x > 0.3, 0.0, 1.0, 1e-12);
        assert!(lo <= 0.3 && hi > 0.3 && hi - lo <= 1e-12);
    }

    #[test]
    fn golden_section_locates_extremum() {
        let (x, fx) = golden_extremum(|x| -(x - 0.7).powi(2) + 3.0, 0.0, 2.0, true);
        assert!((x - 0.7).abs() < 1e-7);
        assert!((fx - 3.0).abs() < 1e-14);
    }
}
