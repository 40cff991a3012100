//! Zeros of the Jost function: spectral singularities on the real axis and
//! bound states in the upper half-plane.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::parse::Rect;
use crate::potentials::Potential;
use crate::schrodinger::{jost_function_with, SolverOptions};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointKind {
    BoundState,
    SpectralSingularity,
}

/// A located zero of `A(s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    pub s: Complex64,
    #[serde(rename = "E")]
    pub e: Complex64,
    pub kind: PointKind,
    /// `|A(s)|` at the returned point.
    pub residual: f64,
    pub newton_steps: usize,
}

/// Locator settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralOptions {
    pub solver: SolverOptions,
    /// `|A|` below which a scan minimum becomes a candidate.
    pub candidate_threshold: f64,
    /// Newton stops once `|A|` drops below this.
    pub residual_tol: f64,
    pub max_newton: usize,
    /// Zeros closer than this to `s = 0` are rejected.
    pub exclusion_radius: f64,
    /// Contour samples with `|A|` below this abort the count.
    pub boundary_min: f64,
    /// `|Im s|` below which a zero counts as real.
    pub real_tol: f64,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions {
            solver: SolverOptions::default(),
            candidate_threshold: 0.1,
            residual_tol: 1e-8,
            max_newton: 50,
            exclusion_radius: 0.02,
            boundary_min: 1e-4,
            real_tol: 1e-6,
        }
    }
}

fn jost(pot: &Potential, s: Complex64, o: &SpectralOptions) -> Result<Complex64> {
    Ok(jost_function_with(pot, s, &o.solver)?.a)
}

fn fd_step(s: Complex64) -> f64 {
    1e-5 * s.norm().max(1.0)
}

/// `A'(s)` by central difference along the real direction.
fn jost_slope(pot: &Potential, s: Complex64, o: &SpectralOptions) -> Result<Complex64> {
    let h = fd_step(s);
    Ok((jost(pot, s + h, o)? - jost(pot, s - h, o)?) / (2.0 * h))
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanSample {
    pub k: f64,
    #[serde(rename = "A")]
    pub a: Option<Complex64>,
    pub error: Option<String>,
}

/// `|A(k)|` sampled on both half-axes.
#[derive(Debug, Clone, Serialize)]
pub struct ScanTable {
    /// Negative half first, in increasing `k`, then the positive half.
    pub samples: Vec<ScanSample>,
    /// Indices of strict local minima of `|A|` below the candidate threshold.
    pub flagged: Vec<usize>,
    pub threshold: f64,
}

impl ScanTable {
    pub fn candidates(&self) -> Vec<f64> {
        self.flagged.iter().map(|&i| self.samples[i].k).collect()
    }

    pub fn min_modulus(&self) -> Option<(f64, f64)> {
        self.samples
            .iter()
            .filter_map(|s| s.a.map(|a| (a.norm(), s.k)))
            .min_by(|a, b| a.0.total_cmp(&b.0))
    }
}

pub fn scan_real_axis(pot: &Potential, k_min: f64, k_max: f64, n: usize) -> Result<ScanTable> {
    scan_real_axis_with(pot, k_min, k_max, n, &SpectralOptions::default())
}

pub fn scan_real_axis_with(pot: &Potential, k_min: f64, k_max: f64, n: usize, o: &SpectralOptions) -> Result<ScanTable> {
    if !(k_min > 0.0 && k_max > k_min && k_max.is_finite()) || n < 3 {
        return Err(Error::domain(format!("scan needs 0 < k_min < k_max and n >= 3, got [{k_min}, {k_max}], n = {n}")));
    }
    let half: Vec<f64> = (0..n).map(|i| k_min + (k_max - k_min) * i as f64 / (n - 1) as f64).collect();
    let ks: Vec<f64> = half.iter().rev().map(|k| -k).chain(half.iter().copied()).collect();
    let samples: Vec<ScanSample> = ks
        .par_iter()
        .map(|&k| match jost(pot, Complex64::new(k, 0.0), o) {
            Ok(a) => ScanSample { k, a: Some(a), error: None },
            Err(e) => ScanSample { k, a: None, error: Some(e.to_string()) },
        })
        .collect();
    let mut flagged = Vec::new();
    for h in [0..n, n..2 * n] {
        let (lo, hi) = (h.start, h.end);
        for i in lo + 1..hi - 1 {
            let m = |j: usize| samples[j].a.map(|a| a.norm());
            if let (Some(l), Some(c), Some(r)) = (m(i - 1), m(i), m(i + 1)) {
                if c < l && c < r && c < o.candidate_threshold {
                    flagged.push(i);
                }
            }
        }
    }
    Ok(ScanTable { samples, flagged, threshold: o.candidate_threshold })
}

/// Gauss-Newton on `|A(k)|^2` along the real axis.
pub fn refine_real_zero(pot: &Potential, k_guess: f64) -> Result<SpectralPoint> {
    refine_real_zero_with(pot, k_guess, &SpectralOptions::default())
}

pub fn refine_real_zero_with(pot: &Potential, k_guess: f64, o: &SpectralOptions) -> Result<SpectralPoint> {
    let mut k = k_guess;
    for step in 0..=o.max_newton {
        let s = Complex64::new(k, 0.0);
        let a = jost(pot, s, o)?;
        if a.norm() < o.residual_tol {
            if k.abs() < o.exclusion_radius {
                return Err(Error::domain(format!("real zero at k = {k:.3e} is inside the exclusion radius around 0")));
            }
            return Ok(SpectralPoint { s, e: s * s, kind: PointKind::SpectralSingularity, residual: a.norm(), newton_steps: step });
        }
        if step == o.max_newton {
            break;
        }
        let d = jost_slope(pot, s, o)?;
        let dn = d.norm_sqr();
        if dn == 0.0 {
            break;
        }
        let delta = -(d.conj() * a).re / dn;
        let cap = 0.5 * k.abs().max(0.1);
        k += delta.clamp(-cap, cap);
        if !k.is_finite() {
            break;
        }
    }
    Err(Error::NonConvergence(format!("no real zero of A near k = {k_guess}")))
}

fn phase_step(a: Complex64, b: Complex64) -> f64 {
    (b / a).arg()
}

fn edge_winding(pot: &Potential, p: Complex64, q: Complex64, o: &SpectralOptions) -> Result<f64> {
    let eval = |s: Complex64| -> Result<Complex64> {
        let a = jost(pot, s, o)?;
        if a.norm() < o.boundary_min {
            return Err(Error::Precondition(format!(
                "A(s) nearly vanishes on the contour at s = {s:.6} (|A| = {:.2e})",
                a.norm()
            )));
        }
        Ok(a)
    };
    fn seg<F: Fn(Complex64) -> Result<Complex64> + Sync>(
        eval: &F,
        s0: Complex64,
        a0: Complex64,
        s1: Complex64,
        a1: Complex64,
        depth: u32,
    ) -> Result<f64> {
        let d = phase_step(a0, a1);
        if d.abs() <= 0.5 * PI {
            return Ok(d);
        }
        if depth == 0 {
            return Err(Error::NonConvergence(format!("phase of A still jumps by {d:.2} between {s0:.6} and {s1:.6}")));
        }
        let sm = 0.5 * (s0 + s1);
        let am = eval(sm)?;
        let (l, r) = rayon::join(|| seg(eval, s0, a0, sm, am, depth - 1), || seg(eval, sm, am, s1, a1, depth - 1));
        Ok(l? + r?)
    }
    let n = 24;
    let pts: Vec<Complex64> = (0..=n).map(|i| p + (q - p) * (i as f64 / n as f64)).collect();
    let vals = pts.par_iter().map(|&s| eval(s)).collect::<Result<Vec<_>>>()?;
    (0..n)
        .into_par_iter()
        .map(|i| seg(&eval, pts[i], vals[i], pts[i + 1], vals[i + 1], 24))
        .sum::<Result<f64>>()
}

/// Number of zeros of `A` inside `rect` by the argument principle.
pub fn count_zeros(pot: &Potential, rect: &Rect) -> Result<i64> {
    count_zeros_with(pot, rect, &SpectralOptions::default())
}

pub fn count_zeros_with(pot: &Potential, rect: &Rect, o: &SpectralOptions) -> Result<i64> {
    let c = |re, im| Complex64::new(re, im);
    let corners = [c(rect.re0, rect.im0), c(rect.re1, rect.im0), c(rect.re1, rect.im1), c(rect.re0, rect.im1)];
    let total: f64 = (0..4)
        .into_par_iter()
        .map(|i| edge_winding(pot, corners[i], corners[(i + 1) % 4], o))
        .sum::<Result<f64>>()?;
    let w = total / (2.0 * PI);
    let r = w.round();
    if (w - r).abs() > 0.05 {
        return Err(Error::NonConvergence(format!("winding {w:.4} is not close to an integer")));
    }
    Ok(r as i64)
}

fn classify(s: Complex64, residual: f64, steps: usize, o: &SpectralOptions) -> SpectralPoint {
    let kind = if s.im.abs() <= o.real_tol { PointKind::SpectralSingularity } else { PointKind::BoundState };
    SpectralPoint { s, e: s * s, kind, residual, newton_steps: steps }
}

fn newton_in(pot: &Potential, rect: &Rect, o: &SpectralOptions) -> Result<Option<SpectralPoint>> {
    let mut s = rect.center();
    for step in 0..=o.max_newton {
        let a = match jost(pot, s, o) {
            Ok(a) => a,
            Err(Error::Domain(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        if a.norm() < o.residual_tol {
            return Ok(rect.contains(s).then(|| classify(s, a.norm(), step, o)));
        }
        if step == o.max_newton {
            break;
        }
        let d = match jost_slope(pot, s, o) {
            Ok(d) => d,
            Err(Error::Domain(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        if d.norm() == 0.0 {
            break;
        }
        s -= a / d;
        // Leaving the rectangle by more than its size, or dropping toward the
        // real axis, means another basin.
        let slack = rect.diameter();
        let im0 = (rect.im0 - slack).max(0.5 * rect.im0);
        let wide = Rect { re0: rect.re0 - slack, re1: rect.re1 + slack, im0, im1: rect.im1 + slack };
        if !wide.contains(s) || !s.re.is_finite() || !s.im.is_finite() {
            return Ok(None);
        }
    }
    Ok(None)
}

const SPLITS: [(f64, f64); 3] = [(0.4871, 0.4623), (0.5317, 0.5389), (0.4412, 0.5711)];

fn quads(rect: &Rect, fx: f64, fy: f64) -> [Rect; 4] {
    let xm = rect.re0 + fx * (rect.re1 - rect.re0);
    let ym = rect.im0 + fy * (rect.im1 - rect.im0);
    [
        Rect { re0: rect.re0, re1: xm, im0: rect.im0, im1: ym },
        Rect { re0: xm, re1: rect.re1, im0: rect.im0, im1: ym },
        Rect { re0: rect.re0, re1: xm, im0: ym, im1: rect.im1 },
        Rect { re0: xm, re1: rect.re1, im0: ym, im1: rect.im1 },
    ]
}

fn search(pot: &Potential, rect: Rect, count: i64, depth: u32, o: &SpectralOptions) -> Result<Vec<SpectralPoint>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    if count == 1 {
        if let Some(p) = newton_in(pot, &rect, o)? {
            return Ok(vec![p]);
        }
    }
    if depth == 0 || rect.diameter() < 1e-7 {
        return Err(Error::Inconsistent(format!(
            "{count} zero(s) in {rect:?} could not be isolated and polished"
        )));
    }
    let mut last_err = None;
    for &(fx, fy) in &SPLITS {
        let kids = quads(&rect, fx, fy);
        let counts: Result<Vec<i64>> = kids.par_iter().map(|r| count_zeros_with(pot, r, o)).collect();
        let counts = match counts {
            Ok(c) => c,
            Err(e @ Error::Precondition(_)) => {
                last_err = Some(e);
                continue;
            }
            Err(e) => return Err(e),
        };
        let sum: i64 = counts.iter().sum();
        if sum != count {
            return Err(Error::Inconsistent(format!(
                "sub-rectangles of {rect:?} hold {sum} zeros, parent holds {count}"
            )));
        }
        let found = kids
            .par_iter()
            .zip(counts.par_iter())
            .map(|(r, &n)| search(pot, *r, n, depth - 1, o))
            .collect::<Result<Vec<_>>>()?;
        return Ok(found.into_iter().flatten().collect());
    }
    Err(last_err.unwrap_or_else(|| Error::NonConvergence("subdivision failed".into())))
}

/// All zeros of `A` inside `rect`, polished by Newton's method.
pub fn find_bound_states(pot: &Potential, rect: &Rect) -> Result<Vec<SpectralPoint>> {
    find_bound_states_with(pot, rect, &SpectralOptions::default())
}

pub fn find_bound_states_with(pot: &Potential, rect: &Rect, o: &SpectralOptions) -> Result<Vec<SpectralPoint>> {
    let n = count_zeros_with(pot, rect, o)?;
    let mut pts = search(pot, *rect, n, 40, o)?;
    pts.sort_by(|a, b| a.s.im.total_cmp(&b.s.im).then(a.s.re.total_cmp(&b.s.re)));
    if pts.len() as i64 != n {
        return Err(Error::Inconsistent(format!("winding count {n} but {} zeros polished", pts.len())));
    }
    Ok(pts)
}

/// A failure in one phase of [`classify_spectrum`].
#[derive(Debug, Clone, Serialize)]
pub struct PhaseError {
    pub phase: String,
    pub message: String,
    #[serde(skip)]
    pub error: Error,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub bound_states: Vec<SpectralPoint>,
    pub singularities: Vec<SpectralPoint>,
    pub contour: Rect,
    #[serde(rename = "winding")]
    pub winding_total: Option<i64>,
    pub k_range: (f64, f64),
    /// Winding equals the zeros found inside the contour.
    pub consistent: bool,
    pub errors: Vec<PhaseError>,
}

impl SpectrumReport {
    pub fn has_singularity_near(&self, k: f64, tol: f64) -> bool {
        self.singularities.iter().any(|p| (p.s.re - k).abs() < tol)
    }
}

/// Scan plus refinement on `[k_min, k_max]` (both signs) and a contour search
/// in `rect`. Phase failures are collected in the report.
pub fn classify_spectrum(pot: &Potential, k_range: (f64, f64), n_scan: usize, rect: &Rect) -> SpectrumReport {
    classify_spectrum_with(pot, k_range, n_scan, rect, &SpectralOptions::default())
}

pub fn classify_spectrum_with(
    pot: &Potential,
    k_range: (f64, f64),
    n_scan: usize,
    rect: &Rect,
    o: &SpectralOptions,
) -> SpectrumReport {
    let mut errors = Vec::new();
    let mut push = |phase: &str, e: Error| errors.push(PhaseError { phase: phase.into(), message: e.to_string(), error: e });

    let (scan, contour) = rayon::join(
        || scan_real_axis_with(pot, k_range.0, k_range.1, n_scan, o),
        || find_bound_states_with(pot, rect, o).map(|p| (p.len() as i64, p)),
    );
    let mut singularities: Vec<SpectralPoint> = Vec::new();
    match scan {
        Ok(table) => {
            for s in table.samples.iter().filter(|s| s.error.is_some()) {
                push("scan", Error::NonConvergence(format!("k = {}: {}", s.k, s.error.as_deref().unwrap_or(""))));
            }
            let refined: Vec<_> = table.candidates().par_iter().map(|&k| (k, refine_real_zero_with(pot, k, o))).collect();
            for (k, r) in refined {
                match r {
                    Ok(p) => {
                        if !singularities.iter().any(|q| (q.s.re - p.s.re).abs() < 1e-6) {
                            singularities.push(p);
                        }
                    }
                    // A shallow minimum that is not a zero is not a failure.
                    Err(Error::NonConvergence(_)) => {}
                    Err(e) => push("refine", Error::NonConvergence(format!("k = {k}: {e}"))),
                }
            }
        }
        Err(e) => push("scan", e),
    }
    singularities.sort_by(|a, b| a.s.re.total_cmp(&b.s.re));

    let (mut bound_states, mut winding_total, mut consistent) = (Vec::new(), None, false);
    match contour {
        Ok((n, pts)) => {
            winding_total = Some(n);
            for p in pts {
                match p.kind {
                    PointKind::BoundState => bound_states.push(p),
                    PointKind::SpectralSingularity => {
                        if !singularities.iter().any(|q| (q.s.re - p.s.re).abs() < 1e-6) {
                            singularities.push(p);
                        }
                    }
                }
            }
            let inside = bound_states.len() + singularities.iter().filter(|p| rect.contains(p.s)).count();
            consistent = inside as i64 == n;
            if !consistent {
                push("contour", Error::Inconsistent(format!("winding {n} but {inside} zeros inside the contour")));
            }
        }
        Err(e) => push("contour", e),
    }
    SpectrumReport { bound_states, singularities, contour: *rect, winding_total, k_range, consistent, errors }
}

/// A contour that should hold every bound state: `Re s` within `+-R`,
/// `Im s` in `[im0, R]`, with `R^2` above the deepest value of `-Re V`.
pub fn default_contour(pot: &Potential) -> Result<Rect> {
    let scale = pot.scale();
    // A repulsive core says nothing about binding depth.
    let lo = if pot.is_singular() { 0.5 / scale } else { 0.0 };
    let hi = (30.0 / pot.decay_rate()).min(pot.coverage());
    let mut depth: f64 = 0.0;
    for i in 0..=400 {
        let x = lo + (hi - lo) * i as f64 / 400.0;
        depth = depth.max(pot.eval(x)?.norm());
    }
    let r = depth.sqrt() + scale;
    // Off-round edges keep the contour away from zeros at simple positions.
    Rect::new(-1.013 * r, 0.987 * r, 0.0517 * scale, 1.021 * r)
}
