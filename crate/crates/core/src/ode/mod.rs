//! Adaptive explicit Runge–Kutta integration of small complex systems.
//!
//! The stepper is Dormand–Prince 8(5,3) with step-size control on the
//! combined 5th/3rd order error estimate and an optional order-7 continuous
//! extension, so that a whole solution can be kept and sampled anywhere on
//! its interval. Integration may run in either direction.

mod tableau;

use num_complex::Complex64;

use crate::error::{Error, Result};
use tableau::{A, B, BHH, C, D, E};

/// State vector of `N` complex components.
pub type State<const N: usize> = [Complex64; N];

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Upper bound on |h|; `None` means the whole interval.
    pub h_max: Option<f64>,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            h_max: None,
            max_steps: 200_000,
        }
    }
}

const SAFE: f64 = 0.9;
const FAC1: f64 = 0.333;
const FAC2: f64 = 6.0;
const EXPO: f64 = 1.0 / 8.0;

/// Continuous extension over one accepted step.
#[derive(Debug, Clone)]
struct DenseStep<const N: usize> {
    x0: f64,
    h: f64,
    r: [State<N>; 8],
}

impl<const N: usize> DenseStep<N> {
    fn eval(&self, x: f64) -> State<N> {
        let t = (x - self.x0) / self.h;
        let t1 = 1.0 - t;
        let r = &self.r;
        let mut out = [Complex64::new(0.0, 0.0); N];
        for i in 0..N {
            out[i] = r[0][i]
                + (r[1][i]
                    + (r[2][i]
                        + (r[3][i] + (r[4][i] + (r[5][i] + (r[6][i] + r[7][i] * t) * t1) * t) * t1)
                            * t)
                        * t1)
                    * t;
        }
        out
    }
}

/// A solution kept over its whole integration interval.
#[derive(Debug, Clone)]
pub struct DenseSolution<const N: usize> {
    x_start: f64,
    x_end: f64,
    y_start: State<N>,
    y_end: State<N>,
    steps: Vec<DenseStep<N>>,
}

impl<const N: usize> DenseSolution<N> {
    pub fn x_start(&self) -> f64 {
        self.x_start
    }

    pub fn x_end(&self) -> f64 {
        self.x_end
    }

    pub fn end_state(&self) -> State<N> {
        self.y_end
    }

    pub fn start_state(&self) -> State<N> {
        self.y_start
    }

    pub fn num_steps(&self) -> usize {
        self.steps.len()
    }

    pub fn lower(&self) -> f64 {
        self.x_start.min(self.x_end)
    }

    pub fn upper(&self) -> f64 {
        self.x_start.max(self.x_end)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lower() && x <= self.upper()
    }

    /// Value of the continuous extension at `x`, or `None` outside the
    /// integrated interval.
    pub fn eval(&self, x: f64) -> Option<State<N>> {
        if !self.contains(x) {
            return None;
        }
        if x == self.x_start {
            return Some(self.y_start);
        }
        if x == self.x_end {
            return Some(self.y_end);
        }
        let forward = self.x_end > self.x_start;
        // Steps are stored in integration order; find the last step whose
        // start has been passed.
        let idx = self.steps.partition_point(|s| {
            if forward {
                s.x0 <= x
            } else {
                s.x0 >= x
            }
        });
        let step = &self.steps[idx.saturating_sub(1)];
        Some(step.eval(x))
    }
}

/// `y + h * sum(coefs[j] * ks[j])`
fn axpy<const N: usize>(y: &State<N>, h: f64, coefs: &[f64], ks: &[State<N>]) -> State<N> {
    let mut out = *y;
    for (&coef, k) in coefs.iter().zip(ks) {
        if coef == 0.0 {
            continue;
        }
        let c = h * coef;
        for i in 0..N {
            out[i] += k[i] * c;
        }
    }
    out
}

fn finite<const N: usize>(s: &State<N>) -> bool {
    s.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

fn initial_step<const N: usize, F>(f: &F, x0: f64, y0: &State<N>, f0: &State<N>, dir: f64, h_max: f64, opts: &OdeOptions) -> f64
where
    F: Fn(f64, &State<N>) -> State<N>,
{
    let mut dnf = 0.0;
    let mut dny = 0.0;
    for i in 0..N {
        let sk = opts.atol + opts.rtol * y0[i].norm();
        dnf += (f0[i].norm() / sk).powi(2);
        dny += (y0[i].norm() / sk).powi(2);
    }
    let mut h = if dnf <= 1e-10 || dny <= 1e-10 {
        1e-6
    } else {
        (dny / dnf).sqrt() * 0.01
    };
    h = h.min(h_max);
    let y1 = axpy(y0, h * dir, &[1.0], std::slice::from_ref(f0));
    let f1 = f(x0 + h * dir, &y1);
    let mut der2 = 0.0;
    for i in 0..N {
        let sk = opts.atol + opts.rtol * y0[i].norm();
        der2 += ((f1[i] - f0[i]).norm() / sk).powi(2);
    }
    let der2 = der2.sqrt() / h;
    let der12 = der2.abs().max(dnf.sqrt());
    let h1 = if !der12.is_finite() {
        h * 1e-3
    } else if der12 <= 1e-15 {
        (h * 1e-3).max(1e-6)
    } else {
        (0.01 / der12).powf(EXPO)
    };
    (100.0 * h).min(h1).min(h_max)
}

/// Integrates `y' = f(x, y)` from `(x0, y0)` to `x_end`.
///
/// With `dense` set the continuous extension of every step is retained; the
/// returned solution can then be sampled anywhere in the interval. Without it
/// only the endpoints are available.
pub fn solve<const N: usize, F>(f: F, x0: f64, y0: State<N>, x_end: f64, opts: &OdeOptions, dense: bool) -> Result<DenseSolution<N>>
where
    F: Fn(f64, &State<N>) -> State<N>,
{
    if !(x0.is_finite() && x_end.is_finite()) {
        return Err(Error::domain("non-finite integration bounds"));
    }
    if !finite(&y0) {
        return Err(Error::domain(format!("non-finite initial state at x = {x0}")));
    }
    let mut sol = DenseSolution {
        x_start: x0,
        x_end,
        y_start: y0,
        y_end: y0,
        steps: Vec::new(),
    };
    if x0 == x_end {
        return Ok(sol);
    }
    let dir = (x_end - x0).signum();
    let span = (x_end - x0).abs();
    let h_max = opts.h_max.unwrap_or(span).min(span);

    let mut x = x0;
    let mut y = y0;
    let mut k: [State<N>; 16] = [[Complex64::new(0.0, 0.0); N]; 16];
    k[0] = f(x, &y);
    if !finite(&k[0]) {
        return Err(Error::StepUnderflow { x });
    }
    let mut h = initial_step(&f, x, &y, &k[0], dir, h_max, opts) * dir;
    let mut rejected = false;
    let mut n_steps = 0usize;
    let mut last = false;

    loop {
        if n_steps >= opts.max_steps {
            return Err(Error::TooManySteps { x, steps: n_steps });
        }
        if h.abs() <= 1e-14 * x.abs().max(1.0) {
            return Err(Error::StepUnderflow { x });
        }
        if (x + 1.01 * h - x_end) * dir > 0.0 {
            h = x_end - x;
            last = true;
        }
        n_steps += 1;

        for s in 1..12 {
            let ys = axpy(&y, h, A[s - 1], &k);
            k[s] = f(x + C[s] * h, &ys);
        }
        let y_new = axpy(&y, h, &B, &k);

        let mut err = 0.0;
        let mut err2 = 0.0;
        let mut ok = finite(&y_new);
        if ok {
            for i in 0..N {
                let sc = opts.atol + opts.rtol * y[i].norm().max(y_new[i].norm());
                let mut e = Complex64::new(0.0, 0.0);
                let mut bsum = Complex64::new(0.0, 0.0);
                for j in 0..12 {
                    e += k[j][i] * E[j];
                    bsum += k[j][i] * B[j];
                }
                let bh = bsum - k[0][i] * BHH[0] - k[8][i] * BHH[1] - k[11][i] * BHH[2];
                err += (e.norm() / sc).powi(2);
                err2 += (bh.norm() / sc).powi(2);
            }
            ok = err.is_finite() && err2.is_finite();
        }
        if !ok {
            // Typically a pole or overflow inside the step: retreat.
            h *= 0.25;
            last = false;
            rejected = true;
            continue;
        }
        let mut deno = err + 0.01 * err2;
        if deno <= 0.0 {
            deno = 1.0;
        }
        let err = h.abs() * err * (1.0 / (deno * N as f64)).sqrt();

        let fac11 = err.powf(EXPO);
        let fac = (1.0 / FAC2).max((1.0 / FAC1).min(fac11 / SAFE));
        let mut h_new = h / fac;

        if err <= 1.0 {
            k[12] = f(x + h, &y_new);
            if !finite(&k[12]) {
                h *= 0.25;
                last = false;
                rejected = true;
                continue;
            }
            if dense {
                let mut r: [State<N>; 8] = [[Complex64::new(0.0, 0.0); N]; 8];
                let ydiff: State<N> = std::array::from_fn(|i| y_new[i] - y[i]);
                let bspl: State<N> = std::array::from_fn(|i| k[0][i] * h - ydiff[i]);
                r[0] = y;
                r[1] = ydiff;
                r[2] = bspl;
                r[3] = std::array::from_fn(|i| ydiff[i] - k[12][i] * h - bspl[i]);

                let y14 = axpy(&y, h, A[12], &k);
                k[13] = f(x + C[13] * h, &y14);
                let y15 = axpy(&y, h, A[13], &k);
                k[14] = f(x + C[14] * h, &y15);
                let y16 = axpy(&y, h, A[14], &k);
                k[15] = f(x + C[15] * h, &y16);

                for (row, d) in D.iter().enumerate() {
                    let mut acc = [Complex64::new(0.0, 0.0); N];
                    for (j, &dj) in d.iter().enumerate() {
                        if dj != 0.0 {
                            for i in 0..N {
                                acc[i] += k[j][i] * dj;
                            }
                        }
                    }
                    for v in acc.iter_mut() {
                        *v *= h;
                    }
                    r[4 + row] = acc;
                }
                if !r.iter().all(finite) {
                    h *= 0.25;
                    last = false;
                    rejected = true;
                    continue;
                }
                sol.steps.push(DenseStep { x0: x, h, r });
            }

            k[0] = k[12];
            y = y_new;
            x += h;
            if last {
                x = x_end;
                break;
            }
            if h_new.abs() > h_max {
                h_new = dir * h_max;
            }
            if rejected {
                h_new = dir * h_new.abs().min(h.abs());
            }
            rejected = false;
        } else {
            h_new = h / (1.0 / FAC1).min(fac11 / SAFE);
            rejected = true;
            last = false;
        }
        h = h_new;
    }
    sol.y_end = y;
    sol.x_end = x;
    Ok(sol)
}
