//! Evaluation with domain tracking.
//!
//! Every subexpression must be defined for an expression to be defined: an
//! undefined inner value makes the whole composite undefined, even when the
//! outer function ignores its argument.

mod fast;
mod mn;
pub(crate) mod rk;
mod trajectory;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::term::{Node, PrVariant, Term};
use trajectory::Trajectory;

/// How the two one-sided searches of a minimization combine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MnCombine {
    /// Defined only when both `t+` and `t-` are.
    BothRequired,
    /// Defined when either side is; the tie rule applies only when both are.
    EitherSuffices,
}

/// Where the body must be defined for a one-sided root to count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MnDomain {
    /// On the whole line (checked up to the search horizon).
    AllReals,
    /// On `[-t, t]`.
    Symmetric,
    /// On `[0, t]` (resp. `[t, 0]`).
    Forward,
    /// Only at the root itself.
    ZeroOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverTolerances {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Smallest step before the integrator gives up.
    pub h_min: f64,
    /// Solutions with a component above this magnitude count as blown up.
    pub blowup: f64,
    /// Minimization search horizon.
    pub horizon: f64,
    /// `|f|` threshold for accepting a refined root.
    pub root_eps: f64,
    /// Minimization scan step.
    pub grid_delta: f64,
    /// Clearance used when probing a singularity of a Campagnolo recursion.
    pub sing_probe: f64,
    /// When set, integration steps never straddle a multiple of this spacing.
    pub event_grid: Option<f64>,
}

impl Default for SolverTolerances {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            h_min: 1e-14,
            blowup: 1e12,
            horizon: 1e4,
            root_eps: 1e-10,
            grid_delta: 1e-2,
            sing_probe: 1e-8,
            event_grid: None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("tolerance {0} must be positive and finite")]
    NotPositive(&'static str),
    #[error("need h_min < grid_delta < horizon")]
    Ordering,
    #[error("isolated exceptions do not apply to the zero-only domain rule")]
    IsolatedWithZeroOnly,
}

impl SolverTolerances {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let fields = [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("h_min", self.h_min),
            ("blowup", self.blowup),
            ("horizon", self.horizon),
            ("root_eps", self.root_eps),
            ("grid_delta", self.grid_delta),
            ("sing_probe", self.sing_probe),
            ("event_grid", self.event_grid.unwrap_or(1.0)),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(ConfigError::NotPositive(name));
            }
        }
        if !(self.h_min < self.grid_delta && self.grid_delta < self.horizon) {
            return Err(ConfigError::Ordering);
        }
        Ok(())
    }

    /// Same tolerances with the integrator tolerances halved.
    pub fn halved(&self) -> Self {
        Self {
            rel_tol: self.rel_tol * 0.5,
            abs_tol: self.abs_tol * 0.5,
            ..*self
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SemanticsConfig {
    /// `Campagnolo` evaluates every recursion node with the relaxed clause;
    /// `Strict` leaves each node's own variant in force.
    pub pr_default: PrVariant,
    pub mn_combine: MnCombine,
    pub mn_domain: MnDomain,
    /// Tolerate isolated undefined points in the domain rule.
    pub mn_isolated_exceptions: bool,
    pub tol: SolverTolerances,
    /// Substitute closed forms for library functions.
    pub fast_path: bool,
    /// Cache recursion trajectories per parameter tuple.
    pub memoize: bool,
}

impl Default for SemanticsConfig {
    fn default() -> Self {
        Self {
            pr_default: PrVariant::Strict,
            mn_combine: MnCombine::EitherSuffices,
            mn_domain: MnDomain::ZeroOnly,
            mn_isolated_exceptions: false,
            tol: SolverTolerances::default(),
            fast_path: false,
            memoize: true,
        }
    }
}

impl SemanticsConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.tol.validate()?;
        if self.mn_isolated_exceptions && self.mn_domain == MnDomain::ZeroOnly {
            return Err(ConfigError::IsolatedWithZeroOnly);
        }
        Ok(())
    }

    pub fn with_fast_path(mut self, on: bool) -> Self {
        self.fast_path = on;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum UndefReason {
    /// A library function was applied outside its domain.
    OutOfDomain,
    /// The recursion solution blew up before reaching the requested time.
    Diverged,
    /// The integrand left its domain at `t_star`.
    DomainBoundary { t_star: f64 },
    /// A Campagnolo crossing was attempted and rejected.
    SingularNotIntegrable,
    /// No admissible root exists inside the search horizon.
    RootNotFound,
    /// The search reached the horizon without finding a root.
    HorizonExceeded,
    /// Both sides were required and one had no root.
    BothSidesTie,
    /// The integrator could not meet its tolerance.
    NumericalFailure,
}

impl UndefReason {
    pub fn name(&self) -> &'static str {
        match self {
            UndefReason::OutOfDomain => "OutOfDomain",
            UndefReason::Diverged => "Diverged",
            UndefReason::DomainBoundary { .. } => "DomainBoundary",
            UndefReason::SingularNotIntegrable => "SingularNotIntegrable",
            UndefReason::RootNotFound => "RootNotFound",
            UndefReason::HorizonExceeded => "HorizonExceeded",
            UndefReason::BothSidesTie => "BothSidesTie",
            UndefReason::NumericalFailure => "NumericalFailure",
        }
    }
}

impl fmt::Display for UndefReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UndefReason::DomainBoundary { t_star } => write!(f, "DomainBoundary({t_star})"),
            _ => f.write_str(self.name()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Undefined {
    pub reason: UndefReason,
    pub witness: Option<String>,
}

impl Undefined {
    pub fn new(reason: UndefReason) -> Self {
        Self {
            reason,
            witness: None,
        }
    }

    pub fn with(reason: UndefReason, witness: impl Into<String>) -> Self {
        Self {
            reason,
            witness: Some(witness.into()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum EvalOutcome {
    Defined(Vec<f64>),
    Undefined(Undefined),
}

impl EvalOutcome {
    pub fn is_defined(&self) -> bool {
        matches!(self, EvalOutcome::Defined(_))
    }

    pub fn values(&self) -> Option<&[f64]> {
        match self {
            EvalOutcome::Defined(v) => Some(v),
            EvalOutcome::Undefined(_) => None,
        }
    }

    /// The single value of a scalar-valued outcome.
    pub fn value(&self) -> Option<f64> {
        self.values().and_then(|v| v.first().copied())
    }

    pub fn reason(&self) -> Option<UndefReason> {
        match self {
            EvalOutcome::Undefined(u) => Some(u.reason),
            EvalOutcome::Defined(_) => None,
        }
    }

    /// `{"defined": .., "values": [..], "reason": .., "witness": ..}`.
    pub fn to_json(&self, notes: &[String]) -> serde_json::Value {
        use serde_json::json;
        match self {
            EvalOutcome::Defined(v) => json!({
                "defined": true,
                "values": v,
                "reason": null,
                "witness": if notes.is_empty() { serde_json::Value::Null } else { notes.join("; ").into() },
            }),
            EvalOutcome::Undefined(u) => json!({
                "defined": false,
                "values": [],
                "reason": u.reason.name(),
                "witness": match (&u.reason, &u.witness) {
                    (UndefReason::DomainBoundary { t_star }, Some(w)) => format!("t*={t_star}: {w}"),
                    (UndefReason::DomainBoundary { t_star }, None) => format!("t*={t_star}"),
                    (_, w) => w.clone().unwrap_or_default(),
                },
            }),
        }
    }
}

impl From<Result<Vec<f64>, Undefined>> for EvalOutcome {
    fn from(r: Result<Vec<f64>, Undefined>) -> Self {
        match r {
            Ok(v) => EvalOutcome::Defined(v),
            Err(u) => EvalOutcome::Undefined(u),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct TrajKey {
    node: usize,
    params: Vec<u64>,
    variant: PrVariant,
}

struct MemoEntry {
    // keeps the node alive so its address cannot be reused while cached
    _node: Term,
    traj: Arc<Mutex<Trajectory>>,
}

const MEMO_CAPACITY: usize = 1 << 17;

/// An evaluation context: configuration plus the trajectory cache.
///
/// Trajectories are stepped the same way regardless of which time was asked
/// for first, so results do not depend on evaluation history or on whether
/// the cache is enabled.
pub struct Evaluator {
    cfg: SemanticsConfig,
    memo: Mutex<HashMap<TrajKey, MemoEntry>>,
    notes: Mutex<Vec<String>>,
}

impl Evaluator {
    pub fn new(cfg: SemanticsConfig) -> Self {
        Self {
            cfg,
            memo: Mutex::new(HashMap::new()),
            notes: Mutex::new(Vec::new()),
        }
    }

    pub fn config(&self) -> &SemanticsConfig {
        &self.cfg
    }

    /// Evaluates `t` at `p`. A point of the wrong length or with non-finite
    /// coordinates yields `OutOfDomain`.
    pub fn eval(&self, t: &Term, p: &[f64]) -> EvalOutcome {
        let want = t.arity().inputs;
        if p.len() != want {
            return EvalOutcome::Undefined(Undefined::with(
                UndefReason::OutOfDomain,
                format!("point has {} coordinates, term expects {want}", p.len()),
            ));
        }
        if let Some(bad) = p.iter().find(|x| !x.is_finite()) {
            return EvalOutcome::Undefined(Undefined::with(
                UndefReason::OutOfDomain,
                format!("non-finite coordinate {bad}"),
            ));
        }
        self.eval_node(t, p).into()
    }

    /// Observations recorded while evaluating (non-unique crossings,
    /// approximate domain checks), deduplicated, in order of first occurrence.
    pub fn notes(&self) -> Vec<String> {
        self.notes.lock().expect("notes").clone()
    }

    pub fn clear_notes(&self) {
        self.notes.lock().expect("notes").clear();
    }

    pub(crate) fn note(&self, s: String) {
        let mut notes = self.notes.lock().expect("notes");
        if !notes.contains(&s) {
            notes.push(s);
        }
    }

    pub(crate) fn eval_node(&self, t: &Term, x: &[f64]) -> Result<Vec<f64>, Undefined> {
        match t.node() {
            Node::Const(c) => Ok(vec![c.value()]),
            Node::Proj { index, .. } => Ok(vec![x[*index]]),
            Node::Jx { children, .. } => children
                .iter()
                .map(|c| self.eval_node(c, x).map(|v| v[0]))
                .collect(),
            Node::Cm { outer, inner } => {
                let y = self.eval_node(inner, x)?;
                self.eval_node(outer, &y)
            }
            Node::Pr { variant, .. } => {
                let variant = match self.cfg.pr_default {
                    PrVariant::Campagnolo => PrVariant::Campagnolo,
                    PrVariant::Strict => *variant,
                };
                let (v, time) = x.split_at(x.len() - 1);
                self.solve_pr(t, v, time[0], variant)
            }
            Node::Mn { body } => mn::solve(self, body, x),
            Node::Named { name, body } => {
                if self.cfg.fast_path {
                    if let Some(r) = fast::eval(*name, x, &self.cfg) {
                        return r;
                    }
                }
                self.eval_node(body, x)
            }
        }
    }

    /// Value of a recursion node `t = PR(f, g)` at parameters `v`, time `time`.
    pub(crate) fn solve_pr(
        &self,
        t: &Term,
        v: &[f64],
        time: f64,
        variant: PrVariant,
    ) -> Result<Vec<f64>, Undefined> {
        let Node::Pr { init, step, .. } = t.node() else {
            unreachable!("solve_pr on a non-recursion node")
        };
        if !self.cfg.memoize {
            let mut traj = Trajectory::start(self, init, step, v, variant);
            return traj.value_at(self, step, v, time);
        }
        let key = TrajKey {
            node: t.id(),
            params: v.iter().map(|x| (x + 0.0).to_bits()).collect(),
            variant,
        };
        let cached = {
            let memo = self.memo.lock().expect("memo");
            memo.get(&key).map(|e| e.traj.clone())
        };
        let traj = match cached {
            Some(tr) => tr,
            None => {
                // built outside the lock: starting evaluates `init`, which may
                // itself need the cache
                let fresh = Arc::new(Mutex::new(Trajectory::start(self, init, step, v, variant)));
                let mut memo = self.memo.lock().expect("memo");
                if memo.len() >= MEMO_CAPACITY {
                    memo.clear();
                }
                memo.entry(key)
                    .or_insert(MemoEntry {
                        _node: t.clone(),
                        traj: fresh,
                    })
                    .traj
                    .clone()
            }
        };
        let mut guard = traj.lock().expect("trajectory");
        guard.value_at(self, step, v, time)
    }

    /// Number of cached trajectories.
    pub fn memo_len(&self) -> usize {
        self.memo.lock().expect("memo").len()
    }
}

/// One-shot evaluation in a fresh context.
pub fn eval(t: &Term, p: &[f64], cfg: &SemanticsConfig) -> EvalOutcome {
    Evaluator::new(*cfg).eval(t, p)
}

/// `n` equally spaced evaluations of `t` along coordinate `axis` over
/// `[lo, hi]`, other coordinates taken from `fixed`. One context is shared by
/// all points so trajectories are reused.
pub fn eval_grid(
    t: &Term,
    axis: usize,
    lo: f64,
    hi: f64,
    n: usize,
    fixed: &[f64],
    cfg: &SemanticsConfig,
) -> Result<Vec<(f64, EvalOutcome)>, GridError> {
    if n < 2 || lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
        return Err(GridError::BadRange);
    }
    if axis >= t.arity().inputs || fixed.len() != t.arity().inputs {
        return Err(GridError::BadAxis);
    }
    let ev = Evaluator::new(*cfg);
    Ok((0..n)
        .map(|k| {
            let x = lo + (hi - lo) * k as f64 / (n - 1) as f64;
            let mut p = fixed.to_vec();
            p[axis] = x;
            (x, ev.eval(t, &p))
        })
        .collect())
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GridError {
    #[error("grid needs n >= 2 and lo < hi")]
    BadRange,
    #[error("axis out of range or fixed point of the wrong length")]
    BadAxis,
}

/// CSV with columns `coord,defined,value|reason`. Multi-output values are
/// separated by `;`.
pub fn grid_to_csv(rows: &[(f64, EvalOutcome)]) -> String {
    let mut out = String::from("coord,defined,value\n");
    for (x, o) in rows {
        match o {
            EvalOutcome::Defined(v) => {
                let vals: Vec<String> = v.iter().map(|y| format!("{y:.12e}")).collect();
                out.push_str(&format!("{x:.12e},true,{}\n", vals.join(";")));
            }
            EvalOutcome::Undefined(u) => {
                out.push_str(&format!("{x:.12e},false,{}\n", u.reason.name()));
            }
        }
    }
    out
}

/// Two-column plot data; an undefined point becomes a blank line so plotting
/// tools draw a gap.
pub fn plot_data(rows: &[(f64, EvalOutcome)]) -> String {
    let mut out = String::new();
    let mut in_gap = false;
    for (x, o) in rows {
        match o.value() {
            Some(y) => {
                out.push_str(&format!("{x:.12e} {y:.12e}\n"));
                in_gap = false;
            }
            None if !in_gap => {
                out.push('\n');
                in_gap = true;
            }
            None => {}
        }
    }
    out
}
