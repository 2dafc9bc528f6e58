//! One-dimensional quadrature.

use libm::fabs;

use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 48;
const MAX_EVALUATIONS: usize = 1 << 22;

/// Adaptive Simpson with Richardson correction; `tol` is absolute over the whole interval.
/// Gives up after about four million evaluations, which a noisy integrand with a
/// tolerance below its noise floor would otherwise exceed.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let fa = f(a)?;
    let fb = f(b)?;
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut state = State {
        worst: 0.0,
        evaluations: 3,
    };
    let value = recurse(&f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH, &mut state)?;
    let worst = state.worst;
    if worst > tol {
        return Err(Error::QuadratureNoConvergence { estimate: worst });
    }
    Ok(value)
}

struct State {
    worst: f64,
    evaluations: usize,
}

#[allow(clippy::too_many_arguments)]
fn recurse<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    state: &mut State,
) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    state.evaluations += 2;
    if state.evaluations > MAX_EVALUATIONS {
        return Err(Error::QuadratureNoConvergence { estimate: fabs(whole) });
    }
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if !delta.is_finite() {
        return Err(Error::QuadratureNoConvergence { estimate: delta });
    }
    if fabs(delta) <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        state.worst = state.worst.max(fabs(delta) / 15.0);
        return Ok(left + right + delta / 15.0);
    }
    Ok(recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1, state)?
        + recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1, state)?)
}

/// Composite Simpson, doubling the panel count until two successive estimates agree
/// to `rel_tol` (absolute when the integral is below one).
pub fn simpson_doubling<F>(f: F, a: f64, b: f64, rel_tol: f64, max_panels: usize) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if a == b {
        return Ok(0.0);
    }
    let mut panels = 2usize;
    let mut previous = simpson(&f, a, b, panels)?;
    loop {
        panels *= 2;
        let current = simpson(&f, a, b, panels)?;
        let change = fabs(current - previous);
        if change <= rel_tol * fabs(current).max(1.0) {
            return Ok(current);
        }
        if panels >= max_panels {
            return Err(Error::QuadratureNoConvergence { estimate: change });
        }
        previous = current;
    }
}

fn simpson<F>(f: &F, a: f64, b: f64, panels: usize) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let h = (b - a) / panels as f64;
    let mut acc = f(a)? + f(b)?;
    for i in 1..panels {
        let weight = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += weight * f(a + h * i as f64)?;
    }
    Ok(acc * h / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn simpson_integrates_sine() {
        let v = adaptive_simpson(|x| Ok(x.sin()), 0.0, core::f64::consts::PI, 1e-12).unwrap();
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-11);
        let w = simpson_doubling(|x| Ok(x.exp()), 0.0, 1.0, 1e-12, 1 << 20).unwrap();
        assert_abs_diff_eq!(w, 1f64.exp() - 1.0, epsilon = 1e-11);
    }

    #[test]
    fn errors_propagate() {
        let r = adaptive_simpson(|x| if x > 0.5 { Err(Error::Domain("x")) } else { Ok(x) }, 0.0, 1.0, 1e-9);
        assert_eq!(r, Err(Error::Domain("x")));
        let r = adaptive_simpson(|x| Ok(1.0 / (x - 0.5)), 0.0, 1.0, 1e-9);
        assert!(matches!(r, Err(Error::QuadratureNoConvergence { .. })));
    }

    #[test]
    fn noise_below_tolerance_gives_up() {
        // deterministic jitter of 1e-6 can never meet 1e-12
        let noisy = |x: f64| Ok(1.0 + 1e-6 * ((x.to_bits() % 997) as f64 / 997.0));
        let r = adaptive_simpson(noisy, 0.0, 1.0, 1e-12);
        assert!(matches!(r, Err(Error::QuadratureNoConvergence { .. })), "{r:?}");
    }
}
