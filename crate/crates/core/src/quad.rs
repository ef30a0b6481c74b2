//! One-dimensional quadrature used by the oracle and the singularity crossing.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("adaptive Simpson did not converge within depth {0}")]
    ConvergenceFailure(usize),
    #[error("integrand not finite at {0}")]
    NonFinite(f64),
}

/// Adaptive Simpson with the usual Richardson correction. Integrates over
/// `[a, b]` for either ordering of the limits.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: usize,
) -> Result<f64, QuadError> {
    let eval = |x: f64| {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(QuadError::NonFinite(x))
        }
    };
    let (fa, fb) = (eval(a)?, eval(b)?);
    let m = 0.5 * (a + b);
    let fm = eval(m)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);

    #[allow(clippy::too_many_arguments)]
    fn recurse<G: Fn(f64) -> Result<f64, QuadError>>(
        f: &G,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: usize,
        max_depth: usize,
    ) -> Result<f64, QuadError> {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm)?, f(rm)?);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol {
            return Ok(left + right + delta / 15.0);
        }
        if depth >= max_depth {
            return Err(QuadError::ConvergenceFailure(max_depth));
        }
        Ok(
            recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, max_depth)?
                + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, max_depth)?,
        )
    }

    recurse(&eval, a, b, fa, fm, fb, whole, tol, 0, max_depth)
}

/// Tanh-sinh (double exponential) rule on `[a, b]` with a fixed node set.
/// Nodes are strictly interior, so integrable endpoint singularities are
/// handled without evaluating at the endpoint. The integrand may be partial:
/// the first `Err` from `f` is returned.
pub fn tanh_sinh<E, F: FnMut(f64) -> Result<f64, E>>(
    mut f: F,
    a: f64,
    b: f64,
    level: u32,
) -> Result<f64, E> {
    use std::f64::consts::FRAC_PI_2;
    let half = 0.5 * (b - a);
    let step = 2f64.powi(-(level as i32));
    let kmax = (4.0 / step) as i64;
    let mut sum = 0.0;
    for k in -kmax..=kmax {
        let t = k as f64 * step;
        let u = FRAC_PI_2 * t.sinh();
        let (ch, sh) = (u.cosh(), u.sinh());
        // x = tanh(u); 1 - |x| computed without cancellation
        let one_minus = 1.0 / (ch * (ch + sh.abs()));
        let x = sh / ch;
        let w = FRAC_PI_2 * t.cosh() / (ch * ch);
        if w < 1e-300 || one_minus == 0.0 {
            continue;
        }
        let node = if x >= 0.0 {
            b - half * one_minus
        } else {
            a + half * one_minus
        };
        if node <= a.min(b) || node >= a.max(b) {
            continue;
        }
        sum += w * f(node)?;
    }
    Ok(sum * half * step)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_polynomial_and_exp() {
        let v = adaptive_simpson(|x| x * x, 0.0, 3.0, 1e-12, 50).unwrap();
        assert!((v - 9.0).abs() < 1e-12);
        let v = adaptive_simpson(|x| (-x).exp(), 2.0, 0.5, 1e-12, 50).unwrap();
        assert!((v - ((-2.0f64).exp() - (-0.5f64).exp())).abs() < 1e-11);
    }

    #[test]
    fn simpson_depth_limit() {
        let r = adaptive_simpson(|x: f64| x.abs().sqrt().recip(), -1.0, 1.0, 1e-14, 8);
        assert!(r.is_err());
    }

    #[test]
    fn tanh_sinh_endpoint_singularity() {
        let v: f64 = tanh_sinh::<(), _>(|x: f64| Ok(x.sqrt().recip()), 0.0, 1e-8, 6).unwrap();
        assert!((v - 2e-4).abs() < 1e-9, "{v}");
        let v: f64 = tanh_sinh::<(), _>(|x: f64| Ok(x.exp()), 0.0, 1.0, 6).unwrap();
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn tanh_sinh_reversed_limits() {
        let v: f64 = tanh_sinh::<(), _>(|x: f64| Ok(x), 1.0, 0.0, 5).unwrap();
        assert!((v + 0.5).abs() < 1e-13);
    }
}
