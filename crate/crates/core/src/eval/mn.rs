//! Minimization: the root of `f(v, .)` nearest to 0, found by an outward scan.

use super::{Evaluator, MnCombine, MnDomain, UndefReason, Undefined};
use crate::term::Term;

const MAX_EXCEPTIONS: usize = 64;
const BISECT_ITERS: usize = 200;
const GOLDEN_ITERS: usize = 120;

#[derive(Clone, Copy)]
struct Sample {
    tau: f64,
    f: Option<f64>,
}

struct Side {
    sign: f64,
    prev2: Option<Sample>,
    prev: Sample,
    root: Option<f64>,
    dead: Option<Undefined>,
    exceptions: usize,
}

impl Side {
    fn active(&self) -> bool {
        self.root.is_none() && self.dead.is_none()
    }
}

struct Scan<'a> {
    ev: &'a Evaluator,
    body: &'a Term,
    x: &'a [f64],
}

impl Scan<'_> {
    fn f(&self, tau: f64) -> Option<f64> {
        let mut a = Vec::with_capacity(self.x.len() + 1);
        a.extend_from_slice(self.x);
        a.push(tau);
        self.ev
            .eval_node(self.body, &a)
            .ok()
            .map(|v| v[0])
            .filter(|y| y.is_finite())
    }

    fn bisect(&self, mut a: f64, mut fa: f64, mut b: f64, mut fb: f64, eps: f64) -> Option<f64> {
        let slope = fa.abs().max(fb.abs()) / (b - a).abs();
        for _ in 0..BISECT_ITERS {
            let m = 0.5 * (a + b);
            if m == a || m == b {
                break;
            }
            let fm = self.f(m)?;
            if fm == 0.0 {
                return Some(m);
            }
            if fa.signum() == fm.signum() {
                a = m;
                fa = fm;
            } else {
                b = m;
                fb = fm;
            }
        }
        // a jump through zero also brackets a sign change; only a small
        // residual counts as a root
        if fa.abs().min(fb.abs()) >= eps * slope.max(1.0) {
            return None;
        }
        Some(if fa.abs() <= fb.abs() { a } else { b })
    }

    fn golden(&self, mut a: f64, mut b: f64, eps: f64) -> Option<f64> {
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let mut c = b - g * (b - a);
        let mut d = a + g * (b - a);
        let (mut fc, mut fd) = (self.f(c)?.abs(), self.f(d)?.abs());
        for _ in 0..GOLDEN_ITERS {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = self.f(c)?.abs();
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = self.f(d)?.abs();
            }
            if (b - a).abs() <= 1e-15 * a.abs().max(b.abs()).max(1e-300) {
                break;
            }
        }
        let (m, fm) = if fc < fd { (c, fc) } else { (d, fd) };
        (fm < eps).then_some(m)
    }

    /// Root candidate produced by the newest sample, if any.
    fn candidate(&self, side: &Side, cur: Sample, eps: f64) -> Option<f64> {
        let (Some(fp), Some(fc)) = (side.prev.f, cur.f) else {
            return None;
        };
        if let Some(Sample { tau: t2, f: Some(f2) }) = side.prev2 {
            if fp.abs() < f2.abs() && fp.abs() <= fc.abs() && fp.signum() * fc.signum() >= 0.0 {
                if let Some(r) = self.golden(t2, cur.tau, eps) {
                    return Some(r);
                }
            }
        }
        if fp * fc < 0.0 {
            return self.bisect(side.prev.tau, fp, cur.tau, fc, eps);
        }
        if fc.abs() < eps {
            return Some(cur.tau);
        }
        None
    }
}

pub(super) fn solve(ev: &Evaluator, body: &Term, x: &[f64]) -> Result<Vec<f64>, Undefined> {
    let cfg = *ev.config();
    let tol = cfg.tol;
    let (delta, eps) = (tol.grid_delta, tol.root_eps);
    let scan = Scan { ev, body, x };
    let f0 = scan.f(0.0);
    if let Some(v) = f0 {
        if v.abs() < eps {
            return Ok(vec![0.0]);
        }
    }
    let origin = Sample { tau: 0.0, f: f0 };
    let mut sides = [1.0, -1.0].map(|sign| Side {
        sign,
        prev2: None,
        prev: origin,
        root: None,
        dead: None,
        exceptions: 0,
    });
    let tolerated = |s: &Scan, tau: f64, used: usize| {
        cfg.mn_isolated_exceptions
            && used < MAX_EXCEPTIONS
            && s.f(tau - 0.25 * delta).is_some()
            && s.f(tau + 0.25 * delta).is_some()
    };
    if f0.is_none() && cfg.mn_domain != MnDomain::ZeroOnly {
        if tolerated(&scan, 0.0, 0) {
            for s in &mut sides {
                s.exceptions = 1;
            }
        } else {
            return Err(Undefined::with(UndefReason::RootNotFound, "body undefined at 0"));
        }
    }
    let kmax = (tol.horizon / delta).ceil() as usize;
    // radius of the first intolerable undefined sample, for the symmetric rule
    let mut sym_limit = f64::INFINITY;
    let mut k = 0usize;
    while k < kmax {
        k += 1;
        let radius = k as f64 * delta;
        let found = sides.iter().filter_map(|s| s.root.map(f64::abs)).fold(f64::INFINITY, f64::min);
        if cfg.mn_combine == MnCombine::EitherSuffices && radius > found + delta {
            break;
        }
        if cfg.mn_combine == MnCombine::BothRequired && sides.iter().any(|s| s.dead.is_some()) {
            break;
        }
        if radius >= sym_limit || sides.iter().all(|s| !s.active()) {
            break;
        }
        for side in sides.iter_mut() {
            let keep_sampling = side.active() || (cfg.mn_domain == MnDomain::Symmetric && side.dead.is_none());
            if !keep_sampling {
                continue;
            }
            let tau = side.sign * radius;
            let cur = Sample { tau, f: scan.f(tau) };
            if cur.f.is_none() && cfg.mn_domain != MnDomain::ZeroOnly {
                if tolerated(&scan, tau, side.exceptions) {
                    side.exceptions += 1;
                } else {
                    match cfg.mn_domain {
                        MnDomain::AllReals => {
                            return Err(Undefined::with(
                                UndefReason::RootNotFound,
                                format!("body undefined at {tau}; whole-line definedness required"),
                            ))
                        }
                        MnDomain::Symmetric => sym_limit = sym_limit.min(radius),
                        MnDomain::Forward | MnDomain::ZeroOnly => {}
                    }
                    if side.root.is_none() {
                        side.dead = Some(Undefined::with(
                            UndefReason::RootNotFound,
                            format!("body undefined at {tau} before any root"),
                        ));
                    }
                    continue;
                }
            }
            if side.active() {
                if let Some(r) = scan.candidate(side, cur, eps) {
                    side.root = Some(r);
                }
            }
            side.prev2 = Some(side.prev);
            side.prev = cur;
        }
    }
    if cfg.mn_domain == MnDomain::Symmetric {
        for side in sides.iter_mut() {
            if side.root.is_some_and(|r| r.abs() >= sym_limit) {
                side.root = None;
                side.dead = Some(Undefined::with(
                    UndefReason::RootNotFound,
                    format!("body undefined at radius {sym_limit} inside the root radius"),
                ));
            }
        }
    }
    if cfg.mn_domain == MnDomain::AllReals && sides.iter().any(|s| s.root.is_some()) {
        check_all_reals(&scan, k, kmax, delta)?;
        ev.note("whole-line definedness checked on scan samples within the horizon only".into());
    }
    let reason_of = |s: &Side| -> Undefined {
        match &s.dead {
            Some(u) => u.clone(),
            None => Undefined::with(
                UndefReason::HorizonExceeded,
                format!("no root within |t| <= {}", tol.horizon),
            ),
        }
    };
    let (plus, minus) = (&sides[0], &sides[1]);
    let pick = |p: f64, m: f64| if p < -m { p } else { m };
    match (cfg.mn_combine, plus.root, minus.root) {
        (_, Some(p), Some(m)) => Ok(vec![pick(p, m)]),
        (MnCombine::EitherSuffices, Some(r), None) | (MnCombine::EitherSuffices, None, Some(r)) => Ok(vec![r]),
        (MnCombine::EitherSuffices, None, None) => {
            let (up, um) = (reason_of(plus), reason_of(minus));
            // the positive side's reason unless only the negative side saw the body
            let both_ran_out = up.reason == UndefReason::HorizonExceeded && um.reason == UndefReason::HorizonExceeded;
            if both_ran_out || up.reason == UndefReason::RootNotFound {
                Err(up)
            } else {
                Err(um)
            }
        }
        (MnCombine::BothRequired, p, m) => {
            let why = |r: Option<f64>, s: &Side| match r {
                Some(r) => format!("root {r}"),
                None => reason_of(s).reason.name().to_string(),
            };
            Err(Undefined::with(
                UndefReason::BothSidesTie,
                format!("t+: {}, t-: {}", why(p, plus), why(m, minus)),
            ))
        }
    }
}

fn check_all_reals(scan: &Scan, from: usize, kmax: usize, delta: f64) -> Result<(), Undefined> {
    for k in from..=kmax {
        for sign in [1.0, -1.0] {
            let tau = sign * k as f64 * delta;
            if scan.f(tau).is_none() {
                return Err(Undefined::with(
                    UndefReason::RootNotFound,
                    format!("body undefined at {tau}; whole-line definedness required"),
                ));
            }
        }
    }
    Ok(())
}
