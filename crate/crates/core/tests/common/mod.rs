//! Shared generators and oracles for the integration tests.
#![allow(dead_code)]

use rand::Rng;

/// Unary library functions, total and partial.
pub const UNARY: &[&str] = &["exp", "sin", "cos", "invp", "ln", "sqrtp", "arctan"];

/// Pure-Rust value of a unary library function, `None` outside its domain.
pub fn unary_oracle(name: &str, x: f64) -> Option<f64> {
    match name {
        "exp" => Some(x.exp()),
        "sin" => Some(x.sin()),
        "cos" => Some(x.cos()),
        "arctan" => Some(x.atan()),
        "invp" => (x > 0.0).then(|| 1.0 / x),
        "ln" => (x > 0.0).then(|| x.ln()),
        "sqrtp" => (x > 0.0).then(|| x.sqrt()),
        _ => panic!("no oracle for {name}"),
    }
}

/// `c` as a constant function of `n` inputs, `c = p/q`.
pub fn konst(p: i64, q: u64, n: usize) -> String {
    format!("cm(lit({p}/{q}), jx[{n}]())")
}

/// `x + c` on one input.
pub fn shift(p: i64, q: u64) -> String {
    format!("cm(add, jx[1](proj(0,1), {}))", konst(p, q, 1))
}

/// A random `1 -> 1` term of nesting depth at most `depth`.
pub fn unary_term<R: Rng>(rng: &mut R, depth: u32) -> String {
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..4) {
            0 | 1 => UNARY[rng.gen_range(0..UNARY.len())].to_string(),
            2 => shift(rng.gen_range(-3..=3), rng.gen_range(1..=2)),
            _ => ["proj(0,1)", "const1(1)", "const0(1)", "constm1(1)"][rng.gen_range(0..4)].to_string(),
        };
    }
    let a = unary_term(rng, depth - 1);
    match rng.gen_range(0..3) {
        0 => format!("cm({}, {a})", unary_term(rng, depth - 1)),
        1 => format!("cm(add, jx[1]({a}, {}))", unary_term(rng, depth - 1)),
        _ => format!("cm(mul, jx[1]({a}, {}))", unary_term(rng, depth - 1)),
    }
}

/// A random recursion `pr(init; step)` with one parameter: `init` is a unary
/// term and `step` a function of `(v, t, h)`, possibly partial.
pub fn recursion_term<R: Rng>(rng: &mut R) -> String {
    let init = unary_term(rng, 1);
    let args = ["proj(0,3)", "proj(1,3)", "proj(2,3)"];
    let pick = |rng: &mut R| args[rng.gen_range(0..3)];
    let lin = |rng: &mut R| {
        format!(
            "cm(add, jx[3](cm(mul, jx[3]({}, {})), {}))",
            konst(rng.gen_range(-2..=2), rng.gen_range(1..=2), 3),
            pick(rng),
            konst(rng.gen_range(-2..=2), rng.gen_range(1..=2), 3)
        )
    };
    let step = match rng.gen_range(0..5) {
        0 => lin(rng),
        1 => format!("cm({}, {})", UNARY[rng.gen_range(0..UNARY.len())], lin(rng)),
        2 => format!("cm(mul, jx[3]({}, {}))", pick(rng), pick(rng)),
        3 => "cm(add, jx[3](const1(3), cm(mul, jx[3](proj(2,3), proj(2,3)))))".to_string(),
        _ => format!("cm(add, jx[3]({}, cm({}, {})))", pick(rng), UNARY[rng.gen_range(0..UNARY.len())], pick(rng)),
    };
    format!("pr({init}; {step})")
}

/// The unique integer in `(x - 1/2, x + 1/2]`, by search.
pub fn round_oracle(x: f64) -> f64 {
    let base = x.floor() as i64;
    (base - 1..=base + 2)
        .map(|n| n as f64)
        .find(|&n| x - 0.5 < n && n <= x + 0.5)
        .expect("an integer lies in any half-open unit interval")
}

/// Digit `i` of `x` in base `b`: `floor(x / b^i) mod b`.
pub fn digit_oracle(x: f64, b: u32, i: i32) -> f64 {
    let scaled = (x / (b as f64).powi(i)).floor() as i64;
    scaled.rem_euclid(b as i64) as f64
}

/// Triangle wave rising with slope 2 on `[n, n + 1/2)` and falling after.
pub fn zigzag_oracle(t: f64) -> f64 {
    let f = t - t.floor();
    if f < 0.5 {
        2.0 * f
    } else {
        2.0 * (1.0 - f)
    }
}

/// `k(t) = -2 + ∫_0^t |s - 1|^(-1/2) ds`.
pub fn k_oracle(t: f64) -> f64 {
    if t <= 1.0 {
        -2.0 * (1.0 - t).sqrt()
    } else {
        2.0 * (t - 1.0).sqrt()
    }
}

/// `k` as a recursion with the given constructor (`pr` or `prc`).
pub fn k_term(ctor: &str) -> String {
    let d = "cm(add, jx[2](proj(0,2), constm1(2)))";
    format!("{ctor}(lit(-2); cm(invp, cm(sqrtp, cm(sqrtp, cm(mul, jx[2]({d}, {d}))))))")
}

/// Square root as the relaxed recursion `f' = 1 / (2 f)`, `f(0) = 1`,
/// evaluated at `x - 1`.
pub const SQRT_RELAXED: &str =
    "cm(prc(one; cm(invp, cm(mul, jx[2](cm(lit(2), jx[2]()), proj(1,2))))), cm(add, jx[1](proj(0,1), constm1(1))))";

/// `-x`, defined only for `|x| >= 1/2`.
pub const HOLED_NEGATION: &str = "cm(add, jx[1](cm(mul, jx[1](constm1(1), proj(0,1))), \
    cm(mul, jx[1](const0(1), cm(sqrtp, cm(add, jx[1](cm(mul, jx[1](proj(0,1), proj(0,1))), cm(lit(-1/4), jx[1]()))))))))";

/// A random rational `p/q` with `|p/q| <= max`.
pub fn rational<R: Rng>(rng: &mut R, max: f64) -> (i64, u64) {
    let q: u64 = rng.gen_range(1..=4);
    let bound = (max * q as f64).floor() as i64;
    (rng.gen_range(-bound..=bound), q)
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}
