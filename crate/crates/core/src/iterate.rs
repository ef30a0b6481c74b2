//! Iterating a function with a recursion.
//!
//! For `f: m -> m` the compiled term has arity `(m+1) -> m` and satisfies
//! `F(v, k - 1/2) = f^k(v)` for positive integers `k` with `v` in the domain
//! of `f^k`. Two coupled states `g, h` start at `v`. On `[j, j + 1/2)` the
//! clock is 0, `h` is frozen and `g` moves linearly to `f(h)`; on
//! `[j + 1/2, j + 1)` the clock is 1, `g` is frozen and `h` relaxes onto `g`.

use crate::eval::{EvalOutcome, Evaluator, SemanticsConfig};
use crate::stdlib::{self, add2, lift, mul2, sub, StdName};
use crate::term::build::{cm, jx, pr, proj};
use crate::term::{Term, TermError};

#[derive(Clone, Debug)]
pub struct IterationBundle {
    pub zero_q: Term,
    pub integer_q: Term,
    pub round: Term,
    pub inv_bar: Term,
    pub digit: Term,
    pub clk: Term,
    pub zigzag: Term,
    /// The coupled system `(v, t) -> (g, h)`.
    pub gh: Term,
    /// First half of `gh`; the iteration itself.
    pub g: Term,
}

/// The `f`-independent helpers, as `(zero?, integer?, round, inv-bar, digit,
/// clk, zigzag)`.
pub fn build_helpers() -> [Term; 7] {
    use StdName::*;
    [ZeroQ, IntegerQ, Round, InvBar, Digit, Clk, Zigzag].map(stdlib::build)
}

pub fn build_iteration(f: &Term) -> Result<IterationBundle, TermError> {
    build(f, true)
}

/// The same system with the inner argument `h - clk * (h - v)` replaced by
/// `h`, so `f` is also sampled while `h` travels between iterates.
pub fn build_iteration_unguarded(f: &Term) -> Result<IterationBundle, TermError> {
    build(f, false)
}

fn build(f: &Term, guarded: bool) -> Result<IterationBundle, TermError> {
    let a = f.arity();
    if a.inputs != a.outputs || a.inputs == 0 {
        return Err(TermError::ArityMismatch {
            op: "iterate",
            detail: format!("f must be m->m with m >= 1, found {a}"),
        });
    }
    let m = a.inputs;
    let [zero_q, integer_q, round, inv_bar, digit, clk, zigzag] = build_helpers();

    // step arguments: v (m), tau, g (m), h (m)
    let n = 3 * m + 1;
    let v = |i: usize| proj(i, n);
    let tau = proj(m, n);
    let g = |i: usize| proj(m + 1 + i, n);
    let h = |i: usize| proj(2 * m + 1 + i, n);
    let clk_t = cm(clk.clone(), tau.clone());
    let one_minus_clk = sub(lift(Term::one(), n), clk_t.clone());
    let two = |t: Term| add2(t.clone(), t);

    let inner: Vec<Term> = (0..m)
        .map(|i| {
            if guarded {
                sub(h(i), mul2(clk_t.clone(), sub(h(i), v(i))))
            } else {
                h(i)
            }
        })
        .collect();
    let f_inner = cm(f.clone(), jx(n, inner));
    let inv_zz = cm(inv_bar.clone(), cm(zigzag.clone(), tau));

    let mut rates = Vec::with_capacity(2 * m);
    for i in 0..m {
        let fi = cm(proj(i, m), f_inner.clone());
        rates.push(two(mul2(one_minus_clk.clone(), sub(fi, h(i)))));
    }
    for i in 0..m {
        rates.push(two(mul2(mul2(clk_t.clone(), sub(g(i), h(i))), inv_zz.clone())));
    }
    let init = jx(m, (0..2 * m).map(|i| proj(i % m, m)).collect());
    let gh = pr(init, jx(n, rates));
    let g_only = cm(jx(2 * m, (0..m).map(|i| proj(i, 2 * m)).collect()), gh.clone());
    Ok(IterationBundle {
        zero_q,
        integer_q,
        round,
        inv_bar,
        digit,
        clk,
        zigzag,
        gh,
        g: g_only,
    })
}

/// Configuration the iteration is evaluated under: closed-form library
/// functions, tight tolerances and steps aligned to half-integers, where the
/// clock switches.
pub fn iteration_config() -> SemanticsConfig {
    let mut cfg = SemanticsConfig::default().with_fast_path(true);
    cfg.tol.rel_tol = 1e-12;
    cfg.tol.abs_tol = 1e-14;
    cfg.tol.event_grid = Some(0.5);
    cfg
}

/// `F(v, k - 1/2)`.
pub fn eval_iteration(bundle: &IterationBundle, v: &[f64], k: u32, ev: &Evaluator) -> EvalOutcome {
    let mut p = v.to_vec();
    p.push(k as f64 - 0.5);
    ev.eval(&bundle.g, &p)
}

/// Literal `k`-fold application of a partial map.
pub fn iteration_oracle(f: impl Fn(&[f64]) -> Option<Vec<f64>>, v: &[f64], k: u32) -> Option<Vec<f64>> {
    let mut x = v.to_vec();
    for _ in 0..k {
        x = f(&x)?;
    }
    Some(x)
}

/// `x -> A x + b` as a term, with the entries written as rationals `p/q`.
pub fn affine_term(a: &[Vec<(i64, u64)>], b: &[(i64, u64)]) -> Result<Term, TermError> {
    let m = b.len();
    let lit = |(p, q): (i64, u64)| {
        stdlib::lit(p, q).map_err(|e| TermError::ArityMismatch {
            op: "lit",
            detail: e.to_string(),
        })
    };
    let mut rows = Vec::with_capacity(m);
    for (i, row) in a.iter().enumerate() {
        if row.len() != m {
            return Err(TermError::ArityMismatch {
                op: "affine",
                detail: format!("row {i} has {} entries, expected {m}", row.len()),
            });
        }
        let mut acc = lift(lit(b[i])?, m);
        for (j, c) in row.iter().enumerate() {
            acc = add2(acc, mul2(lift(lit(*c)?, m), proj(j, m)));
        }
        rows.push(acc);
    }
    Term::jx(m, rows)
}
