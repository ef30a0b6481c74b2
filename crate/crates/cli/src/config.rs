//! Semantics configuration from a TOML file and command-line flags.
//!
//! File keys (all optional; flags given on the command line win):
//!
//! ```text
//! # which integrand clause recursion nodes use: strict | campagnolo
//! pr = "strict"
//! # minimization: must both one-sided searches succeed? both | either
//! mn_combine = "either"
//! # where the body must be defined: all | sym | fwd | zero
//! mn_domain = "zero"
//! # tolerate isolated undefined points in the domain rule
//! mn_isolated = false
//! # closed forms for library functions
//! fast_path = false
//! memoize = true
//! rel_tol = 1e-10
//! abs_tol = 1e-12
//! h_min = 1e-14
//! blowup = 1e12
//! horizon = 1e4
//! root_eps = 1e-10
//! grid_delta = 1e-2
//! sing_probe = 1e-8
//! event_grid = 0.5
//! ```

use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use realrec::{MnCombine, MnDomain, PrVariant, SemanticsConfig};
use serde::Deserialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrArg {
    Strict,
    Campagnolo,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CombineArg {
    Both,
    Either,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainArg {
    All,
    Sym,
    Fwd,
    Zero,
}

/// Overrides shared by the file and the flags.
#[derive(Clone, Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    /// Recursion clause applied to every node
    #[arg(long, value_enum, global = true)]
    pub pr: Option<PrArg>,
    /// How the two minimization searches combine
    #[arg(long, value_enum, global = true)]
    pub mn_combine: Option<CombineArg>,
    /// Where a minimization body must be defined
    #[arg(long, value_enum, global = true)]
    pub mn_domain: Option<DomainArg>,
    /// Tolerate isolated undefined points in the domain rule
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    pub mn_isolated: Option<bool>,
    /// Use closed forms for library functions
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    pub fast_path: Option<bool>,
    /// Cache recursion trajectories
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    pub memoize: Option<bool>,
    /// Relative error per solver step
    #[arg(long = "tol-rel", global = true)]
    pub rel_tol: Option<f64>,
    /// Absolute error per solver step
    #[arg(long = "tol-abs", global = true)]
    pub abs_tol: Option<f64>,
    /// Smallest step before a recursion gives up
    #[arg(long = "tol-h-min", global = true)]
    pub h_min: Option<f64>,
    /// Magnitude treated as blow-up
    #[arg(long = "tol-blowup", global = true)]
    pub blowup: Option<f64>,
    /// How far minimization searches for a root
    #[arg(long = "tol-horizon", global = true)]
    pub horizon: Option<f64>,
    /// Largest |f| accepted at a refined root
    #[arg(long = "tol-root-eps", global = true)]
    pub root_eps: Option<f64>,
    /// Scan spacing of the minimization search
    #[arg(long = "tol-grid-delta", global = true)]
    pub grid_delta: Option<f64>,
    /// Clearance when probing a singularity of a relaxed recursion
    #[arg(long = "tol-sing-probe", global = true)]
    pub sing_probe: Option<f64>,
    /// Spacing of forced step breakpoints
    #[arg(long = "tol-event-grid", global = true)]
    pub event_grid: Option<f64>,
}

impl Overrides {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Applies every field that is set.
    pub fn apply(&self, cfg: &mut SemanticsConfig) {
        if let Some(p) = self.pr {
            cfg.pr_default = match p {
                PrArg::Strict => PrVariant::Strict,
                PrArg::Campagnolo => PrVariant::Campagnolo,
            };
        }
        if let Some(c) = self.mn_combine {
            cfg.mn_combine = match c {
                CombineArg::Both => MnCombine::BothRequired,
                CombineArg::Either => MnCombine::EitherSuffices,
            };
        }
        if let Some(d) = self.mn_domain {
            cfg.mn_domain = match d {
                DomainArg::All => MnDomain::AllReals,
                DomainArg::Sym => MnDomain::Symmetric,
                DomainArg::Fwd => MnDomain::Forward,
                DomainArg::Zero => MnDomain::ZeroOnly,
            };
        }
        let set_bool = |dst: &mut bool, v: Option<bool>| {
            if let Some(v) = v {
                *dst = v;
            }
        };
        set_bool(&mut cfg.mn_isolated_exceptions, self.mn_isolated);
        set_bool(&mut cfg.fast_path, self.fast_path);
        set_bool(&mut cfg.memoize, self.memoize);
        let t = &mut cfg.tol;
        for (dst, v) in [
            (&mut t.rel_tol, self.rel_tol),
            (&mut t.abs_tol, self.abs_tol),
            (&mut t.h_min, self.h_min),
            (&mut t.blowup, self.blowup),
            (&mut t.horizon, self.horizon),
            (&mut t.root_eps, self.root_eps),
            (&mut t.grid_delta, self.grid_delta),
            (&mut t.sing_probe, self.sing_probe),
        ] {
            if let Some(v) = v {
                *dst = v;
            }
        }
        if self.event_grid.is_some() {
            t.event_grid = self.event_grid;
        }
    }
}

/// `base`, then the file, then the flags; validated.
pub fn resolve(base: SemanticsConfig, file: Option<&Path>, flags: &Overrides) -> Result<SemanticsConfig> {
    let mut cfg = base;
    if let Some(path) = file {
        Overrides::from_file(path)?.apply(&mut cfg);
    }
    flags.apply(&mut cfg);
    if let Err(e) = cfg.validate() {
        bail!("invalid configuration: {e}");
    }
    Ok(cfg)
}
