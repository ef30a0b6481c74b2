//! Wronskians of the functions an annihilator combines. A vanishing
//! determinant along the samples is the linear-dependence certificate that
//! turns a real relation into one with integer coefficients; here it is only
//! reported.

use nalgebra::DMatrix;
use serde::Serialize;

use super::annihilator::AnnihilatorCandidate;
use super::jet::{factorial, jet};
use super::series as ser;
use super::DalgError;
use crate::eval::Evaluator;
use crate::term::Term;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WronskianReport {
    /// Exponent vectors of the monomials kept (nonzero coefficient).
    pub functions: Vec<Vec<u32>>,
    pub determinants: Vec<f64>,
    pub max_abs: f64,
    /// `|det|` divided by the product of the row norms, in `[0, 1]`.
    pub max_normalized: f64,
}

fn report(functions: Vec<Vec<u32>>, mats: Vec<DMatrix<f64>>) -> WronskianReport {
    let mut determinants = Vec::new();
    let mut max_normalized = 0.0f64;
    for w in mats {
        let det = w.determinant();
        let rows: f64 = w.row_iter().map(|r| r.norm()).product();
        if rows > 0.0 {
            max_normalized = max_normalized.max(det.abs() / rows);
        }
        determinants.push(det);
    }
    let max_abs = determinants.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    WronskianReport {
        functions,
        determinants,
        max_abs,
        max_normalized,
    }
}

/// Wronskian of the candidate's monomials with coefficients above `1e-8` of
/// the largest, at each point.
pub fn wronskian_reduce(
    ev: &Evaluator,
    t: &Term,
    cand: &AnnihilatorCandidate,
    points: &[Vec<f64>],
    direction: usize,
) -> Result<WronskianReport, DalgError> {
    let big = cand.coeffs.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let kept: Vec<Vec<u32>> = cand
        .monomials
        .iter()
        .zip(&cand.coeffs)
        .filter(|(_, a)| a.abs() > 1e-8 * big)
        .map(|(e, _)| e.clone())
        .collect();
    let k = kept.len();
    let mut mats = Vec::new();
    for p in points {
        let j = jet(ev, t, p, direction, cand.order + k - 1)?;
        // series of D^i f (x + s) up to s^(k-1)
        let ys: Vec<Vec<f64>> = (0..=cand.order)
            .map(|i| (0..k).map(|r| j.coeffs[i + r] * factorial(i + r) / factorial(r)).collect())
            .collect();
        let w = DMatrix::from_fn(k, k, |row, col| {
            let mut m = ser::constant(1.0, k);
            for (i, &e) in kept[row].iter().enumerate() {
                for _ in 0..e {
                    m = ser::mul(&m, &ys[i]);
                }
            }
            m[col] * factorial(col)
        });
        mats.push(w);
    }
    Ok(report(kept, mats))
}

/// Wronskian of arbitrary single-output terms at each point.
pub fn wronskian_of(ev: &Evaluator, fs: &[Term], points: &[Vec<f64>], direction: usize) -> Result<WronskianReport, DalgError> {
    let k = fs.len();
    let mut mats = Vec::new();
    for p in points {
        let jets = fs
            .iter()
            .map(|f| jet(ev, f, p, direction, k.saturating_sub(1)))
            .collect::<Result<Vec<_>, _>>()?;
        mats.push(DMatrix::from_fn(k, k, |row, col| jets[row].derivative(col)));
    }
    Ok(report(Vec::new(), mats))
}
