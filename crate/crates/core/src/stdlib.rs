//! Library functions built from the three constants with JX, CM, PR and MN.
//!
//! Every builder produces an ordinary composite term wrapped in a
//! [`Node::Named`](crate::term::Node::Named) label, so the evaluator can
//! optionally substitute a closed form while `is_rpr` and the ODE-defined
//! evaluation see the full construction.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use thiserror::Error;

use crate::quad;
use crate::term::build::{apply, cm, jx, mn, pr, proj};
use crate::term::{Term, TermError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StdName {
    Const0(usize),
    Const1(usize),
    ConstM1(usize),
    Add,
    Mul,
    Invp,
    Sqrtp,
    Ln,
    Exp,
    Sin,
    Cos,
    Trig,
    Arctan,
    Pi,
    GammaCheck,
    ZeroQ,
    IntegerQ,
    Round,
    InvBar,
    Digit,
    Clk,
    Zigzag,
}

impl StdName {
    /// Surface-syntax spelling (without arguments for the constant families).
    pub fn keyword(self) -> &'static str {
        match self {
            StdName::Const0(_) => "const0",
            StdName::Const1(_) => "const1",
            StdName::ConstM1(_) => "constm1",
            StdName::Add => "add",
            StdName::Mul => "mul",
            StdName::Invp => "invp",
            StdName::Sqrtp => "sqrtp",
            StdName::Ln => "ln",
            StdName::Exp => "exp",
            StdName::Sin => "sin",
            StdName::Cos => "cos",
            StdName::Trig => "trig",
            StdName::Arctan => "arctan",
            StdName::Pi => "pi",
            StdName::GammaCheck => "gamma_check",
            StdName::ZeroQ => "zeroq",
            StdName::IntegerQ => "integerq",
            StdName::Round => "round",
            StdName::InvBar => "invbar",
            StdName::Digit => "digit",
            StdName::Clk => "clk",
            StdName::Zigzag => "zigzag",
        }
    }

    /// Looks up a keyword that takes no arguments.
    pub fn from_keyword(s: &str) -> Option<StdName> {
        Self::catalogue()
            .into_iter()
            .filter(|n| !matches!(n, StdName::Const0(_) | StdName::Const1(_) | StdName::ConstM1(_)))
            .find(|n| n.keyword() == s)
    }

    /// Every argument-free name plus a sample of each constant family.
    pub fn catalogue() -> Vec<StdName> {
        use StdName::*;
        vec![
            Const0(0),
            Const1(2),
            ConstM1(3),
            Add,
            Mul,
            Invp,
            Sqrtp,
            Ln,
            Exp,
            Sin,
            Cos,
            Trig,
            Arctan,
            Pi,
            GammaCheck,
            ZeroQ,
            IntegerQ,
            Round,
            InvBar,
            Digit,
            Clk,
            Zigzag,
        ]
    }

    /// Whether the construction uses minimization.
    pub fn uses_mn(self) -> bool {
        matches!(
            self,
            StdName::ZeroQ
                | StdName::IntegerQ
                | StdName::Round
                | StdName::InvBar
                | StdName::Digit
                | StdName::Clk
                | StdName::Zigzag
        )
    }
}

impl fmt::Display for StdName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StdName::Const0(n) | StdName::Const1(n) | StdName::ConstM1(n) => {
                write!(f, "{}({n})", self.keyword())
            }
            _ => f.write_str(self.keyword()),
        }
    }
}

fn cache() -> &'static Mutex<HashMap<StdName, Term>> {
    static CACHE: OnceLock<Mutex<HashMap<StdName, Term>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Builds (or fetches the shared copy of) a library function.
pub fn build(name: StdName) -> Term {
    if let Some(t) = cache().lock().expect("stdlib cache").get(&name) {
        return t.clone();
    }
    let t = Term::named(name, construct(name));
    cache()
        .lock()
        .expect("stdlib cache")
        .entry(name)
        .or_insert(t)
        .clone()
}

/// Checked projection, the one library function with a failure mode.
pub fn build_proj(index: usize, arity: usize) -> Result<Term, TermError> {
    Term::proj(index, arity)
}

/// Projection derived by differential recursion only:
/// `Proj i (i+1) = PR(0^{i->1}, 1^{i+2->1})` and
/// `Proj i (n+1) = PR(Proj i n, 0^{n+2->1})`.
pub fn proj_core(index: usize, arity: usize) -> Term {
    assert!(index < arity, "projection index in range");
    let konst = |c: Term, n: usize| cm(c, jx(n, vec![]));
    let mut t = pr(konst(Term::zero(), index), konst(Term::one(), index + 2));
    for n in index + 1..arity {
        t = pr(t, konst(Term::zero(), n + 2));
    }
    t
}

fn c0(n: usize) -> Term {
    build(StdName::Const0(n))
}

fn c1(n: usize) -> Term {
    build(StdName::Const1(n))
}

fn cm1(n: usize) -> Term {
    build(StdName::ConstM1(n))
}

/// A nullary term lifted to `n` inputs.
pub fn lift(c: Term, n: usize) -> Term {
    cm(c, jx(n, vec![]))
}

pub(crate) fn add2(a: Term, b: Term) -> Term {
    let m = a.arity().inputs;
    apply(build(StdName::Add), m, vec![a, b])
}

pub(crate) fn mul2(a: Term, b: Term) -> Term {
    let m = a.arity().inputs;
    apply(build(StdName::Mul), m, vec![a, b])
}

pub(crate) fn neg(a: Term) -> Term {
    let m = a.arity().inputs;
    mul2(cm1(m), a)
}

pub(crate) fn sub(a: Term, b: Term) -> Term {
    add2(a, neg(b))
}

pub(crate) fn call(f: StdName, arg: Term) -> Term {
    cm(build(f), arg)
}

fn construct(name: StdName) -> Term {
    use StdName::*;
    match name {
        Const0(n) => lift(Term::zero(), n),
        Const1(n) => lift(Term::one(), n),
        ConstM1(n) => lift(Term::neg_one(), n),
        Add => pr(proj(0, 1), c1(3)),
        Mul => pr(c0(1), proj(0, 3)),
        Invp => {
            // f t = 1 - ∫ f², inv+ x = f (x - 1)
            let square = mul2(proj(0, 1), proj(0, 1));
            let step = cm(mul2(cm1(1), square), proj(1, 2));
            let f = pr(Term::one(), step);
            cm(f, add2(proj(0, 1), cm1(1)))
        }
        Sqrtp => {
            // f t = 1 + ∫ inv+(2 f), sqrt+ x = f (x - 1)
            let two = add2(c1(2), c1(2));
            let step = call(Invp, mul2(two, proj(1, 2)));
            let f = pr(Term::one(), step);
            cm(f, add2(proj(0, 1), cm1(1)))
        }
        Ln => {
            let step = call(Invp, add2(proj(0, 2), c1(2)));
            let f = pr(Term::zero(), step);
            cm(f, add2(proj(0, 1), cm1(1)))
        }
        Exp => pr(Term::one(), proj(1, 2)),
        Trig => pr(
            jx(0, vec![Term::zero(), Term::one()]),
            jx(3, vec![proj(2, 3), mul2(cm1(3), proj(1, 3))]),
        ),
        Sin => cm(proj(0, 2), build(Trig)),
        Cos => cm(proj(1, 2), build(Trig)),
        Arctan => {
            let step = call(Invp, add2(mul2(proj(0, 2), proj(0, 2)), c1(2)));
            pr(Term::zero(), step)
        }
        Pi => {
            let quarter = cm(build(Arctan), jx(0, vec![Term::one()]));
            let half = add2(quarter.clone(), quarter);
            add2(half.clone(), half)
        }
        GammaCheck => gamma_check_body(),
        ZeroQ => {
            // μy. (x² + y²)(1 - y)
            let (x, y) = (proj(0, 2), proj(1, 2));
            let norm = add2(mul2(x.clone(), x), mul2(y.clone(), y.clone()));
            mn(mul2(norm, sub(c1(2), y)))
        }
        IntegerQ => {
            let pi_x = mul2(lift(build(Pi), 1), proj(0, 1));
            call(ZeroQ, call(Sin, pi_x))
        }
        Round => {
            let body = call(IntegerQ, sub(proj(0, 2), proj(1, 2)));
            sub(proj(0, 1), mn(body))
        }
        InvBar => {
            let (x, t) = (proj(0, 2), proj(1, 2));
            mn(mul2(x.clone(), sub(mul2(x, t), c1(2))))
        }
        Digit => {
            let (x, b, i) = (proj(0, 3), proj(1, 3), proj(2, 3));
            let ln_b = call(Ln, b.clone());
            // b^-i and b^-(i+1), via exp(i ln b)
            let inv_pow = |e: Term| call(Exp, neg(mul2(e, ln_b.clone())));
            let half = lift(lit(1, 2).expect("nonzero denominator"), 3);
            let lo = call(Round, sub(mul2(x.clone(), inv_pow(i.clone())), half.clone()));
            let hi = call(Round, sub(mul2(x, inv_pow(add2(i, c1(3)))), half));
            sub(lo, mul2(b, hi))
        }
        Clk => {
            let two = lift(lit(2, 1).expect("integer"), 1);
            apply(build(Digit), 1, vec![proj(0, 1), two, cm1(1)])
        }
        Zigzag => {
            let two = lift(lit(2, 1).expect("integer"), 2);
            let four = lift(lit(4, 1).expect("integer"), 2);
            let step = sub(two, mul2(four, call(Clk, proj(0, 2))));
            pr(Term::zero(), step)
        }
    }
}

/// `Γ̌(R, x) = H(x, R - 1) - H(x, 1/R - 1)` where
/// `H(x, s) = ∫_0^s exp((x-1) ln(1+σ) - (1+σ)) dσ`.
fn gamma_check_body() -> Term {
    let (x, sigma) = (proj(0, 3), proj(1, 3));
    let t = add2(sigma, c1(3));
    let exponent = add2(
        mul2(add2(x, cm1(3)), call(StdName::Ln, t.clone())),
        neg(t),
    );
    let integrand = call(StdName::Exp, exponent);
    let partial = pr(c0(1), integrand);
    let at = |upper: Term| apply(partial.clone(), 2, vec![proj(1, 2), add2(upper, cm1(2))]);
    let upper = at(proj(0, 2));
    let lower = at(call(StdName::Invp, proj(0, 2)));
    sub(upper, lower)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LitError {
    #[error("zero denominator")]
    ZeroDenominator,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn natural(n: u64) -> Term {
    match n {
        0 => Term::zero(),
        1 => Term::one(),
        _ => {
            let two = add2(Term::one(), Term::one());
            let bits = 64 - n.leading_zeros();
            let mut acc = Term::one();
            for k in (0..bits - 1).rev() {
                acc = mul2(two.clone(), acc);
                if n >> k & 1 == 1 {
                    acc = add2(acc, Term::one());
                }
            }
            acc
        }
    }
}

/// Nullary term denoting the rational `num / den`, built by binary expansion
/// over the constants with `add`, `mul` and `invp`.
pub fn lit(num: i64, den: u64) -> Result<Term, LitError> {
    if den == 0 {
        return Err(LitError::ZeroDenominator);
    }
    let g = gcd(num.unsigned_abs(), den).max(1);
    let (p, q) = (num.unsigned_abs() / g, den / g);
    let mut t = natural(p);
    if q != 1 {
        t = mul2(t, call(StdName::Invp, natural(q)));
    }
    if num < 0 {
        t = neg(t);
    }
    Ok(t)
}

/// Independent check of Γ̌: adaptive Simpson over `[1/R, R]` of
/// `exp((x - 1) ln t - t)`.
pub fn quadrature_oracle(r: f64, x: f64) -> Result<f64, quad::QuadError> {
    let integrand = |t: f64| ((x - 1.0) * t.ln() - t).exp();
    let (lo, hi) = (1.0 / r, r);
    if lo == hi {
        return Ok(0.0);
    }
    quad::adaptive_simpson(integrand, lo, hi, 1e-10, 60)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{eval, SemanticsConfig};

    fn val(t: &Term, p: &[f64]) -> f64 {
        eval(t, p, &SemanticsConfig::default()).value().unwrap()
    }

    #[test]
    fn names_roundtrip_keywords() {
        for n in StdName::catalogue() {
            if !matches!(n, StdName::Const0(_) | StdName::Const1(_) | StdName::ConstM1(_)) {
                assert_eq!(StdName::from_keyword(n.keyword()), Some(n));
            }
        }
    }

    #[test]
    fn build_is_shared() {
        assert_eq!(build(StdName::Sin).id(), build(StdName::Sin).id());
    }

    #[test]
    fn library_is_rpr_except_minimization() {
        for n in StdName::catalogue() {
            assert_eq!(build(n).is_rpr(), !n.uses_mn(), "{n}");
        }
    }

    #[test]
    fn mul_and_ln() {
        assert!((val(&build(StdName::Mul), &[3.0, 4.0]) - 12.0).abs() < 1e-9);
        let e = std::f64::consts::E;
        assert!((val(&build(StdName::Ln), &[e]) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn trig_at_half_pi() {
        let out = eval(
            &build(StdName::Trig),
            &[std::f64::consts::FRAC_PI_2],
            &SemanticsConfig::default(),
        );
        let v = out.values().unwrap();
        assert!((v[0] - 1.0).abs() < 1e-8 && v[1].abs() < 1e-8, "{v:?}");
    }

    #[test]
    fn literals() {
        for (p, q) in [(3, 1), (-7, 2), (13, 8), (0, 5), (1, 3)] {
            let t = lit(p, q).unwrap();
            assert_eq!(t.arity().inputs, 0);
            assert!((val(&t, &[]) - p as f64 / q as f64).abs() < 1e-9, "{p}/{q}");
        }
        assert_eq!(lit(1, 0).unwrap_err(), LitError::ZeroDenominator);
        // binary expansion keeps terms logarithmic in the value
        assert!(lit(1_000_000, 1).unwrap().size() < 200);
    }

    #[test]
    fn proj_core_matches_primitive() {
        for (i, n) in [(0, 1), (0, 3), (2, 3), (1, 4)] {
            let t = proj_core(i, n);
            assert_eq!(t.arity(), crate::term::Arity::new(n, 1));
            let p: Vec<f64> = (0..n).map(|k| 1.5 * k as f64 - 2.0).collect();
            assert!((val(&t, &p) - p[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn gamma_check_closed_forms() {
        let g = build(StdName::GammaCheck);
        let expect = (-0.5f64).exp() - (-2.0f64).exp();
        assert!((val(&g, &[2.0, 1.0]) - expect).abs() < 1e-6);
        assert!(val(&g, &[1.0, 1.0]).abs() < 1e-12);
    }

    #[test]
    fn oracle_values() {
        let expect = (-0.5f64).exp() - (-2.0f64).exp();
        assert!((quadrature_oracle(2.0, 1.0).unwrap() - expect).abs() < 1e-10);
        // antiderivative of t^2 e^-t is -e^-t (t^2 + 2t + 2)
        let anti = |t: f64| -(-t).exp() * (t * t + 2.0 * t + 2.0);
        assert!((quadrature_oracle(5.0, 3.0).unwrap() - (anti(5.0) - anti(0.2))).abs() < 1e-9);
        assert_eq!(quadrature_oracle(1.0, 2.7).unwrap(), 0.0);
    }
}
