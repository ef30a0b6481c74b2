//! Searching for a polynomial `P` with `P(f, Df, …, D^N f) = 0` on samples.

use nalgebra::DMatrix;
use serde::Serialize;

use super::jet::{factorial, jet};
use super::series as ser;
use super::DalgError;
use crate::eval::Evaluator;
use crate::stdlib::{self, StdName};
use crate::term::Term;

/// Exponent vectors of all monomials of total degree `<= degree` in `vars`
/// variables, by degree and then lexicographically descending.
pub fn monomials(vars: usize, degree: u32) -> Vec<Vec<u32>> {
    fn rec(vars: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == vars {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=left).rev() {
            prefix.push(e);
            rec(vars, left - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for total in 0..=degree {
        rec(vars, total, &mut Vec::new(), &mut out);
    }
    out
}

pub(crate) fn monomial_value(e: &[u32], y: &[f64]) -> f64 {
    e.iter().zip(y).map(|(&k, &v)| v.powi(k as i32)).product()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnnihilatorCandidate {
    pub order: usize,
    pub degree: u32,
    pub monomials: Vec<Vec<u32>>,
    /// Unit Euclidean norm.
    pub coeffs: Vec<f64>,
    /// Max `|P|` over the validation points.
    pub residual: f64,
    pub sigma_min: f64,
}

impl AnnihilatorCandidate {
    /// `P(y_0, …, y_N)`.
    pub fn apply(&self, y: &[f64]) -> f64 {
        self.monomials.iter().zip(&self.coeffs).map(|(e, a)| a * monomial_value(e, y)).sum()
    }

    /// Highest derivative that appears with a coefficient above `1e-6` of
    /// the largest one.
    pub fn effective_order(&self) -> usize {
        let big = self.coeffs.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        self.monomials
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, a)| a.abs() > 1e-6 * big)
            .flat_map(|(e, _)| e.iter().enumerate().filter(|(_, &k)| k > 0).map(|(i, _)| i))
            .max()
            .unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome")]
pub enum Annihilator {
    Found(AnnihilatorCandidate),
    NotFound { sigma_min: f64 },
}

impl Annihilator {
    pub fn sigma_min(&self) -> f64 {
        match self {
            Annihilator::Found(c) => c.sigma_min,
            Annihilator::NotFound { sigma_min } => *sigma_min,
        }
    }

    pub fn candidate(&self) -> Option<&AnnihilatorCandidate> {
        match self {
            Annihilator::Found(c) => Some(c),
            Annihilator::NotFound { .. } => None,
        }
    }
}

/// Smallest singular value of `rows` after scaling every column to unit max
/// norm, with the matching null direction mapped back to unscaled
/// coefficients (unit norm).
pub fn null_direction(rows: &[Vec<f64>]) -> (f64, Vec<f64>) {
    let (r, c) = (rows.len(), rows[0].len());
    let scale: Vec<f64> = (0..c)
        .map(|j| {
            let m = rows.iter().fold(0.0f64, |m, row| m.max(row[j].abs()));
            if m > 0.0 {
                m
            } else {
                1.0
            }
        })
        .collect();
    let mat = DMatrix::from_fn(r, c, |i, j| rows[i][j] / scale[j]);
    let svd = mat.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let (idx, sigma) = svd
        .singular_values
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, s)| if s < best.1 { (i, s) } else { best });
    // more columns than rows leaves an exact null space the thin SVD omits
    let sigma = if r < c { 0.0 } else { sigma };
    let mut a: Vec<f64> = (0..c).map(|j| v_t[(idx, j)] / scale[j]).collect();
    let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    a.iter_mut().for_each(|x| *x /= norm);
    (sigma, a)
}

/// Derivative vectors `(f, Df, …, D^N f)` at each point.
pub fn derivative_samples(
    ev: &Evaluator,
    t: &Term,
    points: &[Vec<f64>],
    direction: usize,
    order: usize,
) -> Result<Vec<Vec<f64>>, DalgError> {
    points
        .iter()
        .map(|p| jet(ev, t, p, direction, order).map(|j| j.derivatives()))
        .collect()
}

/// Samples the monomials of `(f, …, D^N f)` at `points`, takes the smallest
/// singular direction, and validates it at the midpoints of consecutive
/// points.
pub fn find_annihilator(
    ev: &Evaluator,
    t: &Term,
    points: &[Vec<f64>],
    direction: usize,
    order: usize,
    degree: u32,
    eps: f64,
) -> Result<Annihilator, DalgError> {
    let mons = monomials(order + 1, degree);
    let need = 2 * mons.len();
    if points.len() < need {
        return Err(DalgError::InsufficientPoints { have: points.len(), need });
    }
    let ys = derivative_samples(ev, t, points, direction, order)?;
    let rows: Vec<Vec<f64>> = ys.iter().map(|y| mons.iter().map(|e| monomial_value(e, y)).collect()).collect();
    let (sigma_min, coeffs) = null_direction(&rows);
    if sigma_min >= eps {
        return Ok(Annihilator::NotFound { sigma_min });
    }
    let fresh: Vec<Vec<f64>> = points
        .windows(2)
        .map(|w| w[0].iter().zip(&w[1]).map(|(a, b)| 0.5 * (a + b)).collect())
        .collect();
    let mut cand = AnnihilatorCandidate {
        order,
        degree,
        monomials: mons,
        coeffs,
        residual: 0.0,
        sigma_min,
    };
    for y in derivative_samples(ev, t, &fresh, direction, order)? {
        cand.residual = cand.residual.max(cand.apply(&y).abs());
    }
    Ok(Annihilator::Found(cand))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Prediction {
    pub order: usize,
    pub predicted: f64,
    pub actual: f64,
}

/// Predicts the next two Taylor coefficients of `f` at a point from the lower
/// ones by differentiating `P(f, …, D^n f) = 0`, with `n` the candidate's
/// effective order. `coeffs` must reach order `n + 2`; the last two entries
/// are reported as the actual values.
pub fn predict_higher(cand: &AnnihilatorCandidate, coeffs: &[f64]) -> Result<Vec<Prediction>, DalgError> {
    let n = cand.effective_order();
    if coeffs.len() < n + 3 {
        return Err(DalgError::OrderTooLarge(n + 2));
    }
    let mut c = coeffs[..=n].to_vec();
    c.extend([0.0, 0.0]);
    // `[P(s)]_k` for the series `D^j f (x + s)`, truncated at `s^2`
    let coefficient = |c: &[f64], k: usize| {
        let ys: Vec<Vec<f64>> = (0..=cand.order)
            .map(|j| {
                (0..3)
                    .map(|i| c.get(j + i).map_or(0.0, |v| v * factorial(j + i) / factorial(i)))
                    .collect()
            })
            .collect();
        let mut total = vec![0.0; 3];
        for (e, a) in cand.monomials.iter().zip(&cand.coeffs) {
            let mut m = ser::constant(*a, 3);
            for (j, &p) in e.iter().enumerate() {
                for _ in 0..p {
                    m = ser::mul(&m, &ys[j]);
                }
            }
            total = ser::add(&total, &m);
        }
        total[k]
    };
    let mut out = Vec::new();
    for k in 1..=2 {
        let slot = n + k;
        c[slot] = 0.0;
        let r0 = coefficient(&c, k);
        c[slot] = 1.0;
        let r1 = coefficient(&c, k);
        let slope = r1 - r0;
        if slope.abs() <= 1e-12 * (r0.abs() + r1.abs()).max(f64::MIN_POSITIVE) {
            return Err(DalgError::NotPredictable(slot));
        }
        c[slot] = -r0 / slope;
        out.push(Prediction {
            order: slot,
            predicted: c[slot],
            actual: coeffs[slot],
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ControlRow {
    pub name: String,
    pub found: bool,
    pub sigma_min: f64,
    pub residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointDiag {
    pub point: Vec<f64>,
    pub derivatives: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeReport {
    pub rs: Vec<f64>,
    pub xs: Vec<f64>,
    pub order: usize,
    pub degree: u32,
    pub eps: f64,
    pub found: bool,
    pub sigma_min: f64,
    pub residual: Option<f64>,
    pub controls: Vec<ControlRow>,
    pub points: Vec<PointDiag>,
}

/// One annihilator search in `x` over every `(R, x)` pair at once, with
/// `exp` and `sin` searched at the same `xs` under the same budget as
/// controls.
pub fn gamma_check_probe(
    ev: &Evaluator,
    rs: &[f64],
    xs: &[f64],
    order: usize,
    degree: u32,
    eps: f64,
) -> Result<ProbeReport, DalgError> {
    let g = stdlib::build(StdName::GammaCheck);
    let points: Vec<Vec<f64>> = rs.iter().flat_map(|&r| xs.iter().map(move |&x| vec![r, x])).collect();
    let result = find_annihilator(ev, &g, &points, 1, order, degree, eps)?;
    let diags = derivative_samples(ev, &g, &points, 1, order)?
        .into_iter()
        .zip(&points)
        .map(|(derivatives, p)| PointDiag {
            point: p.clone(),
            derivatives,
        })
        .collect();
    // the controls need as many points as the main search
    let mons = monomials(order + 1, degree).len();
    let cpoints: Vec<Vec<f64>> = spread(xs, 2 * mons).into_iter().map(|x| vec![x]).collect();
    let mut controls = Vec::new();
    for name in [StdName::Exp, StdName::Sin] {
        let r = find_annihilator(ev, &stdlib::build(name), &cpoints, 0, order, degree, eps)?;
        controls.push(ControlRow {
            name: name.keyword().to_string(),
            found: r.candidate().is_some(),
            sigma_min: r.sigma_min(),
            residual: r.candidate().map(|c| c.residual),
        });
    }
    Ok(ProbeReport {
        rs: rs.to_vec(),
        xs: xs.to_vec(),
        order,
        degree,
        eps,
        found: result.candidate().is_some(),
        sigma_min: result.sigma_min(),
        residual: result.candidate().map(|c| c.residual),
        controls,
        points: diags,
    })
}

/// At least `n` points evenly spread over the range of `xs`.
fn spread(xs: &[f64], n: usize) -> Vec<f64> {
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let n = n.max(xs.len()).max(2);
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}
