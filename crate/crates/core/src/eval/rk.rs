//! Dormand–Prince 5(4) step with dense output, generic over the state type.

pub(crate) const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];

pub(crate) const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];

/// Difference between the fifth- and fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// State vectors the stepper can combine.
pub(crate) trait State: Clone {
    /// `base + h * sum(c_i * k_i)` over the nonzero `c_i`.
    fn combine(base: &Self, h: f64, cs: &[f64], ks: &[Self]) -> Self;
    fn zeros_like(&self) -> Self;
    /// RMS of `err` scaled by `atol + rtol * max(|y0|, |y1|)`.
    fn error_norm(err: &Self, y0: &Self, y1: &Self, rtol: f64, atol: f64) -> f64;
}

impl State for Vec<f64> {
    fn combine(base: &Self, h: f64, cs: &[f64], ks: &[Self]) -> Self {
        let mut out = base.clone();
        for (c, k) in cs.iter().zip(ks) {
            if *c != 0.0 {
                for (o, ki) in out.iter_mut().zip(k) {
                    *o += h * c * ki;
                }
            }
        }
        out
    }

    fn zeros_like(&self) -> Self {
        vec![0.0; self.len()]
    }

    fn error_norm(err: &Self, y0: &Self, y1: &Self, rtol: f64, atol: f64) -> f64 {
        if err.is_empty() {
            return 0.0;
        }
        let acc: f64 = (0..err.len())
            .map(|i| (err[i] / (atol + rtol * y0[i].abs().max(y1[i].abs()))).powi(2))
            .sum();
        (acc / err.len() as f64).sqrt()
    }
}

pub(crate) struct Attempt<S> {
    pub y1: S,
    /// Scaled error norm; accept when `<= 1`.
    pub err: f64,
    pub ks: Vec<S>,
}

/// One trial step from `(t, y)` with signed step `h`. `stage_t` maps a node
/// fraction to the time at which that stage is evaluated.
pub(crate) fn attempt<S: State, E2>(
    mut f: impl FnMut(f64, &S) -> Result<S, E2>,
    y: &S,
    h: f64,
    stage_t: impl Fn(f64) -> f64,
    rtol: f64,
    atol: f64,
) -> Result<Attempt<S>, E2> {
    let mut ks: Vec<S> = Vec::with_capacity(7);
    ks.push(f(stage_t(0.0), y)?);
    for i in 1..7 {
        let yi = S::combine(y, h, &A[i][..i], &ks[..i]);
        ks.push(f(stage_t(C[i]), &yi)?);
    }
    let y1 = S::combine(y, h, &A[6][..6], &ks[..6]);
    let errv = S::combine(&y.zeros_like(), h, &E, &ks);
    let err = S::error_norm(&errv, y, &y1, rtol, atol);
    Ok(Attempt { y1, err, ks })
}

/// Interpolation coefficients for an accepted `Vec<f64>` step.
pub(crate) fn dense(y0: &[f64], y1: &[f64], h: f64, ks: &[Vec<f64>]) -> [Vec<f64>; 5] {
    let n = y0.len();
    let mut r = [
        y0.to_vec(),
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
        vec![0.0; n],
    ];
    for i in 0..n {
        let dy = y1[i] - y0[i];
        let bspl = h * ks[0][i] - dy;
        r[1][i] = dy;
        r[2][i] = bspl;
        r[3][i] = dy - h * ks[6][i] - bspl;
        r[4][i] = h * (0..7).map(|j| D[j] * ks[j][i]).sum::<f64>();
    }
    r
}

/// Evaluates the dense output at fraction `theta` of the step.
pub(crate) fn interpolate(r: &[Vec<f64>; 5], theta: f64) -> Vec<f64> {
    let t1 = 1.0 - theta;
    (0..r[0].len())
        .map(|i| r[0][i] + theta * (r[1][i] + t1 * (r[2][i] + theta * (r[3][i] + t1 * r[4][i]))))
        .collect()
}

/// Step-size factor for a trial with scaled error `err`.
pub(crate) fn factor(err: f64) -> f64 {
    if err == 0.0 {
        5.0
    } else {
        (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
    }
}
