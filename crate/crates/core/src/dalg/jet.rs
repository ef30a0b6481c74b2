//! Taylor jets of terms along one input coordinate.
//!
//! Library functions with a known series use it directly; everything else is
//! pushed through the term structure. A recursion node `h(v, t)` is handled
//! by rescaling time: with `W(u) = h(v, t u)` the state obeys
//! `W' = t g(v, t u, W)` on `[0, 1]`, and that system is integrated with
//! series-valued state, so both parameter and time directions are covered.

use serde::Serialize;

use super::series::{self as ser, Series};
use super::DalgError;
use crate::eval::{rk, EvalOutcome, Evaluator, UndefReason};
use crate::stdlib::StdName;
use crate::term::{Node, PrVariant, Term};

pub const MAX_ORDER: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Jet {
    pub point: Vec<f64>,
    pub direction: usize,
    /// Taylor coefficients of order `0..=N`.
    pub coeffs: Vec<f64>,
}

impl Jet {
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `D^k f = k! c_k`.
    pub fn derivative(&self, k: usize) -> f64 {
        self.coeffs[k] * factorial(k)
    }

    pub fn derivatives(&self) -> Vec<f64> {
        (0..self.coeffs.len()).map(|k| self.derivative(k)).collect()
    }
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Jet of a single-output term.
pub fn jet(ev: &Evaluator, t: &Term, p: &[f64], direction: usize, order: usize) -> Result<Jet, DalgError> {
    let outputs = t.arity().outputs;
    if outputs != 1 {
        return Err(DalgError::NotScalar(outputs));
    }
    Ok(jets(ev, t, p, direction, order)?.remove(0))
}

/// Jets of every output of `t`.
pub fn jets(ev: &Evaluator, t: &Term, p: &[f64], direction: usize, order: usize) -> Result<Vec<Jet>, DalgError> {
    let inputs = t.arity().inputs;
    if order > MAX_ORDER {
        return Err(DalgError::OrderTooLarge(order));
    }
    if p.len() != inputs {
        return Err(DalgError::BadPoint { got: p.len(), want: inputs });
    }
    if direction >= inputs {
        return Err(DalgError::BadDirection { direction, inputs });
    }
    if let EvalOutcome::Undefined(u) = ev.eval(t, p) {
        return Err(DalgError::Undefined(u.reason));
    }
    let x: Vec<Series> = p
        .iter()
        .enumerate()
        .map(|(j, &c)| {
            let mut s = ser::constant(c, order + 1);
            if j == direction && order > 0 {
                s[1] = 1.0;
            }
            s
        })
        .collect();
    let out = propagate(ev, t, &x, order + 1)?;
    Ok(out
        .into_iter()
        .map(|coeffs| Jet {
            point: p.to_vec(),
            direction,
            coeffs,
        })
        .collect())
}

/// Series of the outputs of `t` given input series `x`, all of length `len`.
pub(crate) fn propagate(ev: &Evaluator, t: &Term, x: &[Series], len: usize) -> Result<Vec<Series>, DalgError> {
    match t.node() {
        Node::Const(c) => Ok(vec![ser::constant(c.value(), len)]),
        Node::Proj { index, .. } => Ok(vec![x[*index].clone()]),
        Node::Jx { children, .. } => children
            .iter()
            .map(|c| propagate(ev, c, x, len).map(|mut v| v.remove(0)))
            .collect(),
        Node::Cm { outer, inner } => {
            let y = propagate(ev, inner, x, len)?;
            propagate(ev, outer, &y, len)
        }
        Node::Pr { init, step, variant } => {
            if *variant == PrVariant::Campagnolo || ev.config().pr_default == PrVariant::Campagnolo {
                return Err(DalgError::NonAnalyticNode("relaxed recursion"));
            }
            recursion(ev, init, step, x, len)
        }
        Node::Mn { .. } => Err(DalgError::NonAnalyticNode("minimization")),
        Node::Named { name, body } => match closed(*name, x, len) {
            Some(r) => r,
            None => propagate(ev, body, x, len),
        },
    }
}

fn out_of_domain() -> DalgError {
    DalgError::Undefined(UndefReason::OutOfDomain)
}

fn closed(name: StdName, x: &[Series], len: usize) -> Option<Result<Vec<Series>, DalgError>> {
    use StdName::*;
    let positive = |a: &Series, f: fn(&[f64]) -> Series| {
        if a[0] > 0.0 {
            Ok(vec![f(a)])
        } else {
            Err(out_of_domain())
        }
    };
    Some(match name {
        Const0(_) => Ok(vec![ser::constant(0.0, len)]),
        Const1(_) => Ok(vec![ser::constant(1.0, len)]),
        ConstM1(_) => Ok(vec![ser::constant(-1.0, len)]),
        Add => Ok(vec![ser::add(&x[0], &x[1])]),
        Mul => Ok(vec![ser::mul(&x[0], &x[1])]),
        Invp => positive(&x[0], ser::recip),
        Sqrtp => positive(&x[0], ser::sqrt),
        Ln => positive(&x[0], ser::ln),
        Exp => Ok(vec![ser::exp(&x[0])]),
        Sin => Ok(vec![ser::sin_cos(&x[0]).0]),
        Cos => Ok(vec![ser::sin_cos(&x[0]).1]),
        Trig => {
            let (s, c) = ser::sin_cos(&x[0]);
            Ok(vec![s, c])
        }
        Arctan => Ok(vec![ser::atan(&x[0])]),
        Pi => Ok(vec![ser::constant(std::f64::consts::PI, len)]),
        GammaCheck | ZeroQ | IntegerQ | Round | InvBar | Digit | Clk | Zigzag => return None,
    })
}

const MAX_STEPS: usize = 100_000;

fn recursion(ev: &Evaluator, init: &Term, step: &Term, x: &[Series], len: usize) -> Result<Vec<Series>, DalgError> {
    let k = x.len() - 1;
    let (v, time) = x.split_at(k);
    let time = &time[0];
    let w0 = propagate(ev, init, v, len)?;
    let m = w0.len();
    let y0: Vec<f64> = w0.concat();

    let rhs = |u: f64, y: &Vec<f64>| -> Result<Vec<f64>, DalgError> {
        let mut args: Vec<Series> = v.to_vec();
        args.push(ser::scale(time, u));
        args.extend(y.chunks(len).map(<[f64]>::to_vec));
        let g = propagate(ev, step, &args, len)?;
        let mut out = Vec::with_capacity(m * len);
        for gi in &g {
            out.extend(ser::mul(time, gi));
        }
        if out.iter().all(|z| z.is_finite()) {
            Ok(out)
        } else {
            Err(DalgError::Undefined(UndefReason::Diverged))
        }
    };

    let tol = &ev.config().tol;
    let (mut u, mut h, mut y) = (0.0f64, 0.05f64, y0);
    for _ in 0..MAX_STEPS {
        if u >= 1.0 {
            return Ok(y.chunks(len).map(<[f64]>::to_vec).collect());
        }
        h = h.min(1.0 - u);
        match rk::attempt(rhs, &y, h, |c| u + c * h, tol.rel_tol, tol.abs_tol) {
            Ok(a) if a.err <= 1.0 => {
                u = if h >= 1.0 - u { 1.0 } else { u + h };
                y = a.y1;
                h *= rk::factor(a.err);
            }
            Ok(a) => h *= rk::factor(a.err),
            // a trial stage left the domain; the base point is known to be
            // inside it, so shrink
            Err(DalgError::Undefined(_)) => h *= 0.25,
            Err(e) => return Err(e),
        }
        if h < 1e-12 {
            break;
        }
    }
    Err(DalgError::Undefined(UndefReason::NumericalFailure))
}
