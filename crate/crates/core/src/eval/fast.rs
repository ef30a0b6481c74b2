//! Closed forms for library functions.

use super::{MnCombine, SemanticsConfig, UndefReason, Undefined};
use crate::stdlib::StdName;

fn positive(name: StdName, x: f64) -> Result<f64, Undefined> {
    if x > 0.0 {
        Ok(x)
    } else {
        Err(Undefined::with(UndefReason::OutOfDomain, format!("{name} needs x > 0, got {x}")))
    }
}

/// Nearest integer, halves rounding up.
pub(crate) fn round_half_up(x: f64) -> f64 {
    (x + 0.5).floor()
}

/// Base-`b` digit at position `i` of `x`; needs `b > 0`.
pub(crate) fn digit(x: f64, b: f64, i: f64) -> f64 {
    let lo = round_half_up(x * b.powf(-i) - 0.5);
    let hi = round_half_up(x * b.powf(-(i + 1.0)) - 0.5);
    lo - b * hi
}

/// `None` when `name` has no closed form under `cfg`.
pub(super) fn eval(name: StdName, x: &[f64], cfg: &SemanticsConfig) -> Option<Result<Vec<f64>, Undefined>> {
    use StdName::*;
    let helpers = cfg.mn_combine == MnCombine::EitherSuffices;
    let one = |v: f64| Ok(vec![v]);
    let r = match name {
        Const0(_) => one(0.0),
        Const1(_) => one(1.0),
        ConstM1(_) => one(-1.0),
        Add => one(x[0] + x[1]),
        Mul => one(x[0] * x[1]),
        Invp => positive(name, x[0]).map(|v| vec![1.0 / v]),
        Sqrtp => positive(name, x[0]).map(|v| vec![v.sqrt()]),
        Ln => positive(name, x[0]).map(|v| vec![v.ln()]),
        Exp => one(x[0].exp()),
        Sin => one(x[0].sin()),
        Cos => one(x[0].cos()),
        Trig => Ok(vec![x[0].sin(), x[0].cos()]),
        Arctan => one(x[0].atan()),
        Pi => one(std::f64::consts::PI),
        ZeroQ if helpers => one(if x[0] == 0.0 { 0.0 } else { 1.0 }),
        IntegerQ if helpers => one(if x[0].fract() == 0.0 { 0.0 } else { 1.0 }),
        Round if helpers => one(round_half_up(x[0])),
        InvBar if helpers => one(if x[0] == 0.0 { 0.0 } else { 1.0 / x[0] }),
        Digit if helpers => positive(name, x[1]).map(|b| vec![digit(x[0], b, x[2])]),
        Clk if helpers => one(digit(x[0], 2.0, -1.0)),
        _ => return None,
    };
    Some(r.and_then(|v| {
        if v.iter().all(|y| y.is_finite()) {
            Ok(v)
        } else {
            Err(Undefined::with(UndefReason::Diverged, format!("{name} overflowed")))
        }
    }))
}
