//! Safeguarded Newton iteration on a bracketed increasing function.

use crate::error::{Error, Result};

pub(crate) const MAX_ITERATIONS: usize = 200;

/// Finds `y` in `[lo, hi]` with `f(y) = 0`, where `f` is increasing and
/// returns `(value, derivative)`.
///
/// Newton steps are taken from `start`; a step that leaves the current
/// bracket, or any non-finite evaluation, is replaced by bisection. The
/// bracket shrinks on every iteration, so convergence is guaranteed for a
/// valid bracket.
pub(crate) fn solve_increasing<F>(f: F, mut lo: f64, mut hi: f64, start: f64) -> Result<f64>
where
    F: Fn(f64) -> (f64, f64),
{
    let tol = |y: f64| 4.0 * f64::EPSILON * y.abs().max(1.0);
    let mut y = start.clamp(lo, hi);
    for _ in 0..MAX_ITERATIONS {
        let (g, dg) = f(y);
        if g == 0.0 {
            return Ok(y);
        }
        if g < 0.0 {
            lo = y;
        } else if g > 0.0 {
            hi = y;
        }
        let newton = y - g / dg;
        let is_newton = g.is_finite() && newton.is_finite() && newton > lo && newton < hi;
        let next = if is_newton { newton } else { 0.5 * (lo + hi) };
        let step = (next - y).abs();
        y = next;
        if step <= tol(y) || hi - lo <= tol(y) {
            return Ok(y);
        }
        // quadratic convergence: one more step would be below rounding
        if is_newton && step <= 1e-9 * y.abs().max(1.0) {
            let (g, dg) = f(y);
            let last = y - g / dg;
            if last.is_finite() && last >= lo && last <= hi {
                return Ok(last);
            }
            return Ok(y);
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITERATIONS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_cube_root() {
        let y = solve_increasing(|y| (y * y * y - 2.0, 3.0 * y * y), 0.0, 2.0, 0.0).unwrap();
        assert!((y - 2f64.cbrt()).abs() < 1e-15);
    }

    #[test]
    fn survives_bad_derivative() {
        // derivative lies, bisection must carry it
        let y = solve_increasing(|y| (y - 0.3, f64::NAN), -1.0, 1.0, 0.9).unwrap();
        assert!((y - 0.3).abs() < 1e-15);
        let y = solve_increasing(|y| (y.atan() - 0.5, 1e-30), -10.0, 10.0, 0.0).unwrap();
        assert!((y - 0.5f64.tan()).abs() < 1e-14);
    }

    #[test]
    fn non_finite_values_bisect() {
        let f = |y: f64| {
            if y < -5.0 {
                (f64::NEG_INFINITY, f64::NAN)
            } else {
                (y - 1.0, 1.0)
            }
        };
        let y = solve_increasing(f, -100.0, 100.0, -50.0).unwrap();
        assert!((y - 1.0).abs() < 1e-15);
    }

    #[test]
    fn step_function_hits_cap_or_bracket() {
        // no root inside: converges onto the jump
        let y = solve_increasing(|y| (if y < 0.25 { -1.0 } else { 1.0 }, 0.0), 0.0, 1.0, 0.5)
            .unwrap();
        assert!((y - 0.25).abs() < 1e-14);
    }
}
