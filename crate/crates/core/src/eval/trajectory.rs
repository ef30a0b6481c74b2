//! Solutions of recursion nodes, stepped outward from time 0 on each side.

use super::rk;
use super::{Evaluator, UndefReason, Undefined};
use crate::quad::tanh_sinh;
use crate::term::{PrVariant, Term};

const MAX_CROSSINGS: usize = 64;
const MAX_STEPS: usize = 2_000_000;
/// Queries this close beyond a closed end still get the end value.
const CLOSE_TOL: f64 = 1e-10;
/// Integrand growth (relative to its size at time 0) that counts as a
/// singularity when the step size collapses.
const GROWTH: f64 = 1e4;
const QUAD_LEVEL: u32 = 6;
/// Width (relative to `rel_tol`) of the band beyond a query that is checked
/// for a boundary when the integrand is large there; a boundary inside the
/// band cannot be told apart from one at the query itself.
const BAND: f64 = 1e4;

enum Piece {
    Rk { t0: f64, h: f64, r: [Vec<f64>; 5], kmax: f64 },
    Gap { t0: f64, t1: f64, y0: Vec<f64>, y1: Vec<f64> },
}

impl Piece {
    fn end(&self) -> f64 {
        match self {
            Piece::Rk { t0, h, .. } => t0 + h,
            Piece::Gap { t1, .. } => *t1,
        }
    }

    fn at(&self, t: f64) -> Vec<f64> {
        match self {
            Piece::Rk { t0, h, r, .. } => rk::interpolate(r, ((t - t0) / h).clamp(0.0, 1.0)),
            Piece::Gap { t0, t1, y0, y1 } => {
                let s = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
                y0.iter().zip(y1).map(|(a, b)| a + s * (b - a)).collect()
            }
        }
    }
}

struct End {
    undef: Undefined,
    t_star: f64,
    closed: Option<Vec<f64>>,
}

struct Branch {
    dir: f64,
    t: f64,
    y: Vec<f64>,
    h: f64,
    pieces: Vec<Piece>,
    end: Option<End>,
    crossings: usize,
    steps: usize,
    /// Integrand size at the start of the latest trial step.
    knorm: f64,
    /// Why the latest trial steps failed, since the last accepted step.
    evidence: Option<Undefined>,
}

struct Ctx<'a> {
    ev: &'a Evaluator,
    step: &'a Term,
    v: &'a [f64],
    variant: PrVariant,
    g0: f64,
}

impl Ctx<'_> {
    fn rhs(&self, tau: f64, y: &[f64]) -> Result<Vec<f64>, Undefined> {
        if y.iter().any(|x| !x.is_finite()) {
            return Err(Undefined::with(UndefReason::NumericalFailure, "non-finite state"));
        }
        let mut args = Vec::with_capacity(self.v.len() + 1 + y.len());
        args.extend_from_slice(self.v);
        args.push(tau);
        args.extend_from_slice(y);
        let k = self.ev.eval_node(self.step, &args)?;
        if k.iter().any(|x| !x.is_finite()) {
            return Err(Undefined::with(UndefReason::Diverged, format!("integrand not finite at t={tau}")));
        }
        Ok(k)
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Successive magnitudes (for halving offsets) shrink like an integrable
/// singularity would, or are all negligible.
fn shrinking(ds: &[f64], scale: f64) -> bool {
    if ds.len() < 2 || ds.iter().all(|d| *d <= 1e-12 * (1.0 + scale)) {
        return true;
    }
    let ratio = 2f64.powf(0.25);
    ds.windows(2).all(|w| w[0] >= ratio * w[1])
}

fn next_breakpoint(t: f64, dir: f64, spacing: f64) -> f64 {
    let k = t / spacing;
    let next = if dir > 0.0 {
        (k + 1e-12).floor() + 1.0
    } else {
        (k - 1e-12).ceil() - 1.0
    };
    next * spacing
}

impl Branch {
    fn new(dir: f64, y0: &[f64]) -> Self {
        Self {
            dir,
            t: 0.0,
            y: y0.to_vec(),
            h: 0.0,
            pieces: Vec::new(),
            end: None,
            crossings: 0,
            steps: 0,
            knorm: 0.0,
            evidence: None,
        }
    }

    fn covers(&self, t: f64) -> bool {
        self.dir * t <= self.dir * self.t
    }

    fn piece(&self, t: f64) -> Option<&Piece> {
        let k = self.pieces.partition_point(|p| self.dir * p.end() < self.dir * t);
        self.pieces.get(k).or(self.pieces.last())
    }

    fn lookup(&self, t: f64, y0: &[f64]) -> Vec<f64> {
        self.piece(t).map_or_else(|| y0.to_vec(), |p| p.at(t))
    }

    fn finish(&mut self, reason: UndefReason, witness: String) {
        self.end = Some(End {
            undef: Undefined::with(reason, witness),
            t_star: self.t,
            closed: None,
        });
    }

    fn close(&mut self, cause: Undefined) {
        let t = self.t;
        self.end = Some(End {
            undef: Undefined::with(
                UndefReason::DomainBoundary { t_star: t },
                format!("integrand undefined past t*={t} ({})", cause.reason),
            ),
            t_star: t,
            closed: Some(self.y.clone()),
        });
    }

    fn initial_step(&self, ctx: &Ctx) -> f64 {
        let tol = &ctx.ev.cfg.tol;
        let Ok(k0) = ctx.rhs(self.t, &self.y) else {
            return 1e-6;
        };
        let sk: Vec<f64> = self.y.iter().map(|y| tol.abs_tol + tol.rel_tol * y.abs()).collect();
        let rms = |v: &[f64]| {
            (v.iter().zip(&sk).map(|(x, s)| (x / s).powi(2)).sum::<f64>() / v.len() as f64).sqrt()
        };
        let (d0, d1) = (rms(&self.y), rms(&k0));
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let y1: Vec<f64> = self.y.iter().zip(&k0).map(|(y, k)| y + self.dir * h0 * k).collect();
        let Ok(k1) = ctx.rhs(self.t + self.dir * h0, &y1) else {
            return h0;
        };
        let diff: Vec<f64> = k1.iter().zip(&k0).map(|(a, b)| a - b).collect();
        let d2 = rms(&diff) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).clamp(1e-6, 1e3)
    }

    /// Accepts one step, or ends the branch, or crosses a singular point.
    fn advance(&mut self, ctx: &Ctx) {
        let tol = ctx.ev.cfg.tol;
        self.steps += 1;
        if self.steps > MAX_STEPS {
            self.finish(UndefReason::NumericalFailure, format!("step budget exhausted at t={}", self.t));
            return;
        }
        if self.h == 0.0 {
            self.h = self.initial_step(ctx);
        }
        loop {
            let mut h = self.h;
            let mut bp_hit = None;
            if let Some(s) = tol.event_grid {
                let next = next_breakpoint(self.t, self.dir, s);
                if h >= (next - self.t).abs() {
                    h = (next - self.t).abs();
                    bp_hit = Some(next);
                }
            }
            if h < tol.h_min {
                self.singular(ctx, self.evidence.clone(), self.knorm);
                return;
            }
            let (t0, hs) = (self.t, self.dir * h);
            let stage_t = |c: f64| {
                if bp_hit.is_some() && c == 1.0 {
                    t0 + hs * (1.0 - 1e-9)
                } else {
                    t0 + c * hs
                }
            };
            match rk::attempt(|s, y: &Vec<f64>| ctx.rhs(s, y), &self.y, hs, stage_t, tol.rel_tol, tol.abs_tol) {
                Err(u) => {
                    self.evidence = Some(u);
                    self.h = h * 0.5;
                }
                Ok(a) => {
                    self.knorm = inf_norm(&a.ks[0]);
                    if a.err > 1.0 {
                        self.h = h * rk::factor(a.err);
                        continue;
                    }
                    if a.y1.iter().any(|x| !x.is_finite() || x.abs() > tol.blowup) {
                        self.finish(UndefReason::Diverged, format!("|y| exceeds {} after t={t0}", tol.blowup));
                        return;
                    }
                    let r = rk::dense(&self.y, &a.y1, hs, &a.ks);
                    let kmax = a.ks.iter().map(|k| inf_norm(k)).fold(0.0, f64::max);
                    self.pieces.push(Piece::Rk { t0, h: hs, r, kmax });
                    self.t = bp_hit.unwrap_or(t0 + hs);
                    self.y = a.y1;
                    self.evidence = None;
                    if bp_hit.is_none() {
                        self.h = h * rk::factor(a.err);
                    }
                    return;
                }
            }
        }
    }

    fn singular(&mut self, ctx: &Ctx, evidence: Option<Undefined>, knorm: f64) {
        let tol = ctx.ev.cfg.tol;
        let t = self.t;
        let growing = knorm >= GROWTH * ctx.g0.max(1.0);
        let y_start = self.pieces.first().map_or(0.0, |p| inf_norm(&p.at(0.0)));
        let y_large = inf_norm(&self.y) >= (GROWTH * y_start.max(1.0)).min(tol.blowup.sqrt());
        if y_large && (growing || evidence.is_some()) {
            self.finish(UndefReason::Diverged, format!("solution unbounded near t={t}"));
            return;
        }
        if evidence.is_none() && !growing {
            self.finish(
                UndefReason::NumericalFailure,
                format!("step size underflow at t={t} with a defined, bounded integrand"),
            );
            return;
        }
        let why = match &evidence {
            Some(u) => format!("integrand undefined just past t*={t} ({})", u.reason),
            None => format!("integrand grows without bound near t*={t}"),
        };
        match ctx.variant {
            PrVariant::Strict => self.finish(UndefReason::DomainBoundary { t_star: t }, why),
            PrVariant::Campagnolo => self.cross(ctx),
        }
    }

    fn cross(&mut self, ctx: &Ctx) {
        let tol = ctx.ev.cfg.tol;
        let (t, dir, p) = (self.t, self.dir, tol.sing_probe);
        if self.crossings >= MAX_CROSSINGS {
            self.finish(UndefReason::NumericalFailure, format!("more than {MAX_CROSSINGS} singular crossings"));
            return;
        }
        let scale = inf_norm(&self.y);
        let y0 = self.pieces.first().map_or_else(|| self.y.clone(), |p| p.at(0.0));
        let approach: Vec<f64> = [4.0, 2.0, 1.0]
            .iter()
            .filter(|k| t.abs() >= *k * p)
            .map(|k| dist(&self.y, &self.lookup(t - dir * k * p, &y0)))
            .collect();
        if !shrinking(&approach, scale) {
            self.finish(
                UndefReason::SingularNotIntegrable,
                format!("approach to t*={t} is not integrable: increments {approach:?}"),
            );
            return;
        }
        let mut incs = Vec::with_capacity(3);
        for k in [4.0, 2.0, 1.0] {
            match self.far_increment(ctx, t, k * p) {
                Ok(i) => incs.push(i),
                Err(u) => {
                    self.close(u);
                    return;
                }
            }
        }
        let norms: Vec<f64> = incs.iter().map(|i| inf_norm(i)).collect();
        if !shrinking(&norms, scale) {
            self.finish(
                UndefReason::SingularNotIntegrable,
                format!("far side of t*={t} is not integrable: increments {norms:?}"),
            );
            return;
        }
        let t_far = t + dir * p;
        let y_far: Vec<f64> = self.y.iter().zip(&incs[2]).map(|(a, b)| a + b).collect();
        if let Err(u) = ctx.rhs(t_far, &y_far) {
            self.close(u);
            return;
        }
        self.pieces.push(Piece::Gap {
            t0: t,
            t1: t_far,
            y0: self.y.clone(),
            y1: y_far.clone(),
        });
        self.t = t_far;
        self.y = y_far;
        self.h = p;
        self.evidence = None;
        self.crossings += 1;
        ctx.ev.note(format!("continued through singular point t*={t}; the continuation need not be unique"));
    }

    /// Integral of the integrand with the state frozen at the singular value.
    fn far_increment(&self, ctx: &Ctx, t: f64, d: f64) -> Result<Vec<f64>, Undefined> {
        let n = self.y.len();
        let mut out = vec![0.0; n];
        for (i, o) in out.iter_mut().enumerate() {
            *o = tanh_sinh(|s| ctx.rhs(s, &self.y).map(|k| k[i]), t, t + self.dir * d, QUAD_LEVEL)?;
        }
        Ok(out)
    }
}

pub(crate) struct Trajectory {
    y0: Result<Vec<f64>, Undefined>,
    variant: PrVariant,
    g0: f64,
    fwd: Branch,
    bwd: Branch,
}

impl Trajectory {
    pub(crate) fn start(ev: &Evaluator, init: &Term, step: &Term, v: &[f64], variant: PrVariant) -> Self {
        let y0 = ev.eval_node(init, v);
        let ys = y0.clone().unwrap_or_default();
        let mut traj = Self {
            y0,
            variant,
            g0: 1.0,
            fwd: Branch::new(1.0, &ys),
            bwd: Branch::new(-1.0, &ys),
        };
        if traj.y0.is_ok() {
            let ctx = Ctx {
                ev,
                step,
                v,
                variant,
                g0: 1.0,
            };
            match ctx.rhs(0.0, &ys) {
                Ok(k) => traj.g0 = inf_norm(&k),
                Err(u) if variant == PrVariant::Strict => {
                    traj.y0 = Err(Undefined::with(
                        UndefReason::DomainBoundary { t_star: 0.0 },
                        format!("integrand undefined at t=0 ({})", u.reason),
                    ));
                }
                Err(_) => {}
            }
        }
        traj
    }

    pub(crate) fn value_at(&mut self, ev: &Evaluator, step: &Term, v: &[f64], t: f64) -> Result<Vec<f64>, Undefined> {
        let y0 = match &self.y0 {
            Ok(y) => y.clone(),
            Err(u) => return Err(u.clone()),
        };
        if t == 0.0 {
            return Ok(y0);
        }
        let ctx = Ctx {
            ev,
            step,
            v,
            variant: self.variant,
            g0: self.g0,
        };
        let branch = if t > 0.0 { &mut self.fwd } else { &mut self.bwd };
        while branch.end.is_none() && !branch.covers(t) {
            branch.advance(&ctx);
        }
        if branch.covers(t) {
            let steep = matches!(branch.piece(t), Some(Piece::Rk { kmax, .. }) if *kmax >= GROWTH * self.g0.max(1.0));
            if steep {
                let band = BAND * ev.cfg.tol.rel_tol * t.abs().max(1.0);
                let ahead = t + branch.dir * band;
                while branch.end.is_none() && !branch.covers(ahead) {
                    branch.advance(&ctx);
                }
                if let Some(end) = &branch.end {
                    if branch.dir * end.t_star < branch.dir * ahead {
                        return match &end.closed {
                            Some(c) => Ok(c.clone()),
                            None => Err(end.undef.clone()),
                        };
                    }
                }
            }
            return Ok(branch.lookup(t, &y0));
        }
        let end = branch.end.as_ref().expect("branch ended");
        match &end.closed {
            Some(c) if (t - end.t_star).abs() <= CLOSE_TOL => Ok(c.clone()),
            _ => Err(end.undef.clone()),
        }
    }
}
