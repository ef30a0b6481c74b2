//! Truncated power series `a_0 + a_1 s + … + a_N s^N`. All operands of one
//! operation have the same length.

pub(crate) type Series = Vec<f64>;

pub(crate) fn constant(c: f64, len: usize) -> Series {
    let mut s = vec![0.0; len];
    s[0] = c;
    s
}

pub(crate) fn add(a: &[f64], b: &[f64]) -> Series {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub(crate) fn scale(a: &[f64], c: f64) -> Series {
    a.iter().map(|x| c * x).collect()
}

pub(crate) fn mul(a: &[f64], b: &[f64]) -> Series {
    let n = a.len();
    (0..n).map(|k| (0..=k).map(|j| a[j] * b[k - j]).sum()).collect()
}

/// `1 / a`; the caller checks `a_0 != 0`.
pub(crate) fn recip(a: &[f64]) -> Series {
    let n = a.len();
    let mut b = vec![0.0; n];
    b[0] = 1.0 / a[0];
    for k in 1..n {
        let acc: f64 = (1..=k).map(|j| a[j] * b[k - j]).sum();
        b[k] = -acc / a[0];
    }
    b
}

pub(crate) fn exp(a: &[f64]) -> Series {
    let n = a.len();
    let mut e = vec![0.0; n];
    e[0] = a[0].exp();
    for k in 1..n {
        let acc: f64 = (1..=k).map(|j| j as f64 * a[j] * e[k - j]).sum();
        e[k] = acc / k as f64;
    }
    e
}

/// Requires `a_0 > 0`.
pub(crate) fn ln(a: &[f64]) -> Series {
    let n = a.len();
    let mut l = vec![0.0; n];
    l[0] = a[0].ln();
    for k in 1..n {
        let acc: f64 = (1..k).map(|j| j as f64 * l[j] * a[k - j]).sum();
        l[k] = (a[k] - acc / k as f64) / a[0];
    }
    l
}

/// Requires `a_0 > 0`.
pub(crate) fn sqrt(a: &[f64]) -> Series {
    let n = a.len();
    let mut s = vec![0.0; n];
    s[0] = a[0].sqrt();
    for k in 1..n {
        let acc: f64 = (1..k).map(|j| s[j] * s[k - j]).sum();
        s[k] = (a[k] - acc) / (2.0 * s[0]);
    }
    s
}

pub(crate) fn sin_cos(a: &[f64]) -> (Series, Series) {
    let n = a.len();
    let (mut s, mut c) = (vec![0.0; n], vec![0.0; n]);
    s[0] = a[0].sin();
    c[0] = a[0].cos();
    for k in 1..n {
        let mut ds = 0.0;
        let mut dc = 0.0;
        for j in 1..=k {
            ds += j as f64 * a[j] * c[k - j];
            dc += j as f64 * a[j] * s[k - j];
        }
        s[k] = ds / k as f64;
        c[k] = -dc / k as f64;
    }
    (s, c)
}

pub(crate) fn atan(a: &[f64]) -> Series {
    let n = a.len();
    let q = mul(&derivative(a), &recip(&add(&constant(1.0, n), &mul(a, a))));
    let mut t = vec![0.0; n];
    t[0] = a[0].atan();
    for k in 1..n {
        t[k] = q[k - 1] / k as f64;
    }
    t
}

/// Formal derivative, padded with a trailing zero (the lost coefficient is
/// beyond the truncation order).
pub(crate) fn derivative(a: &[f64]) -> Series {
    let n = a.len();
    (0..n).map(|k| if k + 1 < n { (k + 1) as f64 * a[k + 1] } else { 0.0 }).collect()
}
