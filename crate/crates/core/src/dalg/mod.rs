//! Differential-algebraicity probes: Taylor jets of terms, annihilating
//! polynomial search by smallest singular value, and Wronskian reports.
//!
//! A `Found` result is numerical evidence of a relation at the sampled
//! points; `NotFound` only says none exists within the order and degree
//! budget at the given threshold.

mod annihilator;
mod jet;
mod series;
mod wronskian;

use thiserror::Error;

use crate::eval::UndefReason;

pub use annihilator::{
    derivative_samples, find_annihilator, gamma_check_probe, monomials, null_direction, predict_higher, Annihilator,
    AnnihilatorCandidate, ControlRow, PointDiag, Prediction, ProbeReport,
};
pub use jet::{jet, jets, Jet, MAX_ORDER};
pub use wronskian::{wronskian_of, wronskian_reduce, WronskianReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DalgError {
    #[error("undefined at the base point: {0}")]
    Undefined(UndefReason),
    #[error("{0} has no power series")]
    NonAnalyticNode(&'static str),
    #[error("order {0} exceeds the supported maximum")]
    OrderTooLarge(usize),
    #[error("point has {got} coordinates, the term takes {want}")]
    BadPoint { got: usize, want: usize },
    #[error("direction {direction} out of range for {inputs} inputs")]
    BadDirection { direction: usize, inputs: usize },
    #[error("term has {0} outputs, expected one")]
    NotScalar(usize),
    #[error("{have} points given, at least {need} required")]
    InsufficientPoints { have: usize, need: usize },
    #[error("the relation does not determine coefficient {0}")]
    NotPredictable(usize),
}
