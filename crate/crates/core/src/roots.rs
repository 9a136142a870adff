//! Bracketed root finding for increasing functions.

use crate::error::{Error, Result};

/// Solves `value(x) = target` for an increasing function on `[lo, hi]`
/// using Newton steps safeguarded by bisection. `eval` returns the value and
/// the derivative. Iteration stops once the bracket or the step falls below
/// `xtol`.
pub fn solve_increasing<F>(mut eval: F, mut lo: f64, mut hi: f64, target: f64, start: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    let (vlo, _) = eval(lo)?;
    let (vhi, _) = eval(hi)?;
    if vlo > target || vhi < target {
        return Err(Error::BracketFailure { target, lo, hi });
    }
    if vlo == target {
        return Ok(lo);
    }
    if vhi == target {
        return Ok(hi);
    }
    let mut x = if start > lo && start < hi { start } else { 0.5 * (lo + hi) };
    let mut last_step = hi - lo;
    for _ in 0..200 {
        let (v, d) = eval(x)?;
        let g = v - target;
        if g == 0.0 {
            return Ok(x);
        }
        if g < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = if d > 0.0 { x - g / d } else { f64::NAN };
        let next = if newton > lo && newton < hi && (newton - x).abs() < 0.5 * last_step {
            newton
        } else {
            0.5 * (lo + hi)
        };
        last_step = (next - x).abs();
        x = next;
        if last_step <= xtol || hi - lo <= xtol {
            return Ok(x);
        }
    }
    Ok(x)
}

/// Plain bisection on a sign change of `g` between `a` and `b`; returns the
/// midpoint of the final bracket of width at most `width`.
pub fn bisect<G>(mut g: G, mut a: f64, mut b: f64, mut ga: f64, width: f64) -> Result<f64>
where
    G: FnMut(f64) -> Result<f64>,
{
    while b - a > width {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let gm = g(m)?;
        if gm == 0.0 {
            return Ok(m);
        }
        if (gm < 0.0) == (ga < 0.0) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}
