//! Arity-typed terms of the real recursive function language.
//!
//! A [`Term`] is an immutable, reference-counted tree. Every constructor checks
//! arities, so an ill-typed term cannot be built. Structural equality (and
//! hashing) is by content.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::stdlib::StdName;

/// Input and output dimension of a term, `m -> n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Arity {
    pub inputs: usize,
    pub outputs: usize,
}

impl Arity {
    pub const fn new(inputs: usize, outputs: usize) -> Self {
        Self { inputs, outputs }
    }
}

impl fmt::Display for Arity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.inputs, self.outputs)
    }
}

/// Which integrand-definedness clause a differential recursion node uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrVariant {
    /// The integrand must be defined at every point of the solution domain.
    Strict,
    /// Isolated undefined points of the integrand are tolerated.
    Campagnolo,
}

/// The three nullary constants every term is ultimately built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Constant {
    Zero,
    One,
    MinusOne,
}

impl Constant {
    pub fn value(self) -> f64 {
        match self {
            Constant::Zero => 0.0,
            Constant::One => 1.0,
            Constant::MinusOne => -1.0,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("arity mismatch in {op}: {detail}")]
    ArityMismatch { op: &'static str, detail: String },
    #[error("bad projection index {index} for arity {arity}")]
    BadIndex { index: usize, arity: usize },
}

fn mismatch(op: &'static str, detail: impl Into<String>) -> TermError {
    TermError::ArityMismatch {
        op,
        detail: detail.into(),
    }
}

#[derive(Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Const(Constant),
    /// `Proj i n`. Derivable with differential recursion (see
    /// [`crate::stdlib::proj_core`]) but kept primitive for speed.
    Proj { index: usize, arity: usize },
    /// Juxtaposition of scalar-valued children sharing `inputs`.
    Jx { inputs: usize, children: Vec<Term> },
    /// `outer ∘ inner`.
    Cm { outer: Term, inner: Term },
    /// Differential recursion.
    Pr {
        init: Term,
        step: Term,
        variant: PrVariant,
    },
    /// Minimization.
    Mn { body: Term },
    /// A library function: `body` is its full construction, `name` lets the
    /// evaluator and printer recognize it.
    Named { name: StdName, body: Term },
}

#[derive(Debug, PartialEq, Eq, Hash)]
struct Inner {
    node: Node,
    arity: Arity,
}

/// An immutable, arity-checked term.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Term(Arc<Inner>);

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Term({} : {})", crate::parser::print(self), self.arity())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parser::print(self))
    }
}

impl Term {
    fn from_node(node: Node, arity: Arity) -> Self {
        Term(Arc::new(Inner { node, arity }))
    }

    pub fn node(&self) -> &Node {
        &self.0.node
    }

    pub fn arity(&self) -> Arity {
        self.0.arity
    }

    /// Address of the shared node; stable for the lifetime of the term.
    pub fn id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn constant(c: Constant) -> Self {
        Self::from_node(Node::Const(c), Arity::new(0, 1))
    }

    pub fn zero() -> Self {
        Self::constant(Constant::Zero)
    }

    pub fn one() -> Self {
        Self::constant(Constant::One)
    }

    pub fn neg_one() -> Self {
        Self::constant(Constant::MinusOne)
    }

    pub fn proj(index: usize, arity: usize) -> Result<Self, TermError> {
        if index >= arity {
            return Err(TermError::BadIndex { index, arity });
        }
        Ok(Self::from_node(
            Node::Proj { index, arity },
            Arity::new(arity, 1),
        ))
    }

    /// Juxtaposition. `inputs` is explicit so that `JX()` has a well-defined
    /// arity `inputs -> 0`.
    pub fn jx(inputs: usize, children: Vec<Term>) -> Result<Self, TermError> {
        for (k, c) in children.iter().enumerate() {
            let a = c.arity();
            if a.outputs != 1 {
                return Err(mismatch(
                    "jx",
                    format!("child {k} has {} outputs, expected 1", a.outputs),
                ));
            }
            if a.inputs != inputs {
                return Err(mismatch(
                    "jx",
                    format!("child {k} has {} inputs, expected {inputs}", a.inputs),
                ));
            }
        }
        let outputs = children.len();
        Ok(Self::from_node(
            Node::Jx { inputs, children },
            Arity::new(inputs, outputs),
        ))
    }

    /// Juxtaposition taking the input arity from the first child.
    pub fn jx_of(children: Vec<Term>) -> Result<Self, TermError> {
        let inputs = children
            .first()
            .map(|c| c.arity().inputs)
            .ok_or_else(|| mismatch("jx", "empty juxtaposition needs an explicit input arity"))?;
        Self::jx(inputs, children)
    }

    pub fn cm(outer: Term, inner: Term) -> Result<Self, TermError> {
        let (fa, ga) = (outer.arity(), inner.arity());
        if ga.outputs != fa.inputs {
            return Err(mismatch(
                "cm",
                format!("inner is {ga}, outer is {fa}"),
            ));
        }
        Ok(Self::from_node(
            Node::Cm { outer, inner },
            Arity::new(ga.inputs, fa.outputs),
        ))
    }

    pub fn pr(init: Term, step: Term, variant: PrVariant) -> Result<Self, TermError> {
        let (fa, ga) = (init.arity(), step.arity());
        let (m, n) = (fa.inputs, fa.outputs);
        if ga != Arity::new(m + 1 + n, n) {
            return Err(mismatch(
                "pr",
                format!(
                    "init is {fa}, so step must be {}, found {ga}",
                    Arity::new(m + 1 + n, n)
                ),
            ));
        }
        Ok(Self::from_node(
            Node::Pr {
                init,
                step,
                variant,
            },
            Arity::new(m + 1, n),
        ))
    }

    pub fn mn(body: Term) -> Result<Self, TermError> {
        let a = body.arity();
        if a.outputs != 1 || a.inputs == 0 {
            return Err(mismatch(
                "mn",
                format!("body must be (m+1)->1, found {a}"),
            ));
        }
        Ok(Self::from_node(Node::Mn { body }, Arity::new(a.inputs - 1, 1)))
    }

    pub(crate) fn named(name: StdName, body: Term) -> Self {
        let arity = body.arity();
        Self::from_node(Node::Named { name, body }, arity)
    }

    /// Recomputes the arity bottom-up without trusting any cached value.
    pub fn recompute_arity(&self) -> Arity {
        match self.node() {
            Node::Const(_) => Arity::new(0, 1),
            Node::Proj { arity, .. } => Arity::new(*arity, 1),
            Node::Jx { inputs, children } => {
                for c in children {
                    let a = c.recompute_arity();
                    debug_assert_eq!(a, Arity::new(*inputs, 1));
                }
                Arity::new(*inputs, children.len())
            }
            Node::Cm { outer, inner } => {
                let (fa, ga) = (outer.recompute_arity(), inner.recompute_arity());
                debug_assert_eq!(ga.outputs, fa.inputs);
                Arity::new(ga.inputs, fa.outputs)
            }
            Node::Pr { init, step, .. } => {
                let fa = init.recompute_arity();
                let _ = step.recompute_arity();
                Arity::new(fa.inputs + 1, fa.outputs)
            }
            Node::Mn { body } => {
                let a = body.recompute_arity();
                Arity::new(a.inputs - 1, 1)
            }
            Node::Named { body, .. } => body.recompute_arity(),
        }
    }

    /// True when the term lies in the real primitive recursive class: no
    /// minimization and no Campagnolo-style recursion anywhere inside.
    pub fn is_rpr(&self) -> bool {
        match self.node() {
            Node::Const(_) | Node::Proj { .. } => true,
            Node::Jx { children, .. } => children.iter().all(Term::is_rpr),
            Node::Cm { outer, inner } => outer.is_rpr() && inner.is_rpr(),
            Node::Pr {
                init,
                step,
                variant,
            } => *variant == PrVariant::Strict && init.is_rpr() && step.is_rpr(),
            Node::Mn { .. } => false,
            Node::Named { body, .. } => body.is_rpr(),
        }
    }

    /// Replaces every library name by its construction.
    pub fn erase_names(&self) -> Term {
        self.rebuild(&|t| match t.node() {
            Node::Named { body, .. } => Some(body.erase_names()),
            _ => None,
        })
    }

    /// Pure core form: names erased and primitive projections replaced by
    /// their differential-recursion derivation.
    pub fn to_core(&self) -> Term {
        self.rebuild(&|t| match t.node() {
            Node::Named { body, .. } => Some(body.to_core()),
            Node::Proj { index, arity } => Some(crate::stdlib::proj_core(*index, *arity)),
            _ => None,
        })
    }

    fn rebuild(&self, leaf: &dyn Fn(&Term) -> Option<Term>) -> Term {
        if let Some(t) = leaf(self) {
            return t;
        }
        let ok = "rebuilding preserves arities";
        match self.node() {
            Node::Const(_) | Node::Proj { .. } | Node::Named { .. } => self.clone(),
            Node::Jx { inputs, children } => Term::jx(
                *inputs,
                children.iter().map(|c| c.rebuild(leaf)).collect(),
            )
            .expect(ok),
            Node::Cm { outer, inner } => {
                Term::cm(outer.rebuild(leaf), inner.rebuild(leaf)).expect(ok)
            }
            Node::Pr {
                init,
                step,
                variant,
            } => Term::pr(init.rebuild(leaf), step.rebuild(leaf), *variant).expect(ok),
            Node::Mn { body } => Term::mn(body.rebuild(leaf)).expect(ok),
        }
    }

    /// Number of nodes, counting each library construction once.
    pub fn size(&self) -> usize {
        1 + match self.node() {
            Node::Const(_) | Node::Proj { .. } | Node::Named { .. } => 0,
            Node::Jx { children, .. } => children.iter().map(Term::size).sum(),
            Node::Cm { outer, inner } => outer.size() + inner.size(),
            Node::Pr { init, step, .. } => init.size() + step.size(),
            Node::Mn { body } => body.size(),
        }
    }

    /// Same term with every recursion node set to `variant`, including inside
    /// library constructions (which lose their names).
    pub fn with_variant(&self, variant: PrVariant) -> Term {
        self.rebuild(&|t| match t.node() {
            Node::Named { body, .. } if body.contains_pr() => Some(body.with_variant(variant)),
            Node::Pr { init, step, .. } => Some(
                Term::pr(init.with_variant(variant), step.with_variant(variant), variant)
                    .expect("same arities"),
            ),
            _ => None,
        })
    }

    fn contains_pr(&self) -> bool {
        match self.node() {
            Node::Const(_) | Node::Proj { .. } => false,
            Node::Jx { children, .. } => children.iter().any(Term::contains_pr),
            Node::Cm { outer, inner } => outer.contains_pr() || inner.contains_pr(),
            Node::Pr { .. } => true,
            Node::Mn { body } => body.contains_pr(),
            Node::Named { body, .. } => body.contains_pr(),
        }
    }
}

/// Shorthand constructors used throughout the library builders. They panic on
/// arity errors and are only used where arities are statically known.
pub mod build {
    use super::*;

    pub fn proj(i: usize, n: usize) -> Term {
        Term::proj(i, n).expect("projection index in range")
    }

    pub fn jx(inputs: usize, children: Vec<Term>) -> Term {
        Term::jx(inputs, children).expect("jx arity")
    }

    pub fn cm(outer: Term, inner: Term) -> Term {
        Term::cm(outer, inner).expect("cm arity")
    }

    pub fn pr(init: Term, step: Term) -> Term {
        Term::pr(init, step, PrVariant::Strict).expect("pr arity")
    }

    pub fn mn(body: Term) -> Term {
        Term::mn(body).expect("mn arity")
    }

    /// `outer ∘ JX(args)` with the input arity taken from the arguments.
    pub fn apply(outer: Term, inputs: usize, args: Vec<Term>) -> Term {
        cm(outer, jx(inputs, args))
    }
}
