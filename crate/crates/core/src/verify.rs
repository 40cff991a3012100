//! Executable checks of the worked examples against their closed forms.

use num_complex::Complex64;
use serde::Serialize;

use crate::darboux::{self, inverse_steps, TransformStep};
use crate::parse::Rect;
use crate::potentials::{Potential, PotentialSpec};
use crate::schrodinger::{self, closed_form_jost, uniform_grid, SolutionTrace};
use crate::spectral::{self, SpectrumReport};
use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// One named comparison with its tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    fn measured(name: impl Into<String>, dev: f64, tol: f64) -> Check {
        Check { name: name.into(), max_deviation: dev, tolerance: tol, pass: dev <= tol, detail: None }
    }

    fn failed(name: impl Into<String>, tol: f64, e: &Error) -> Check {
        Check { name: name.into(), max_deviation: f64::INFINITY, tolerance: tol, pass: false, detail: Some(e.to_string()) }
    }

    fn with_detail(mut self, d: impl Into<String>) -> Check {
        self.detail = Some(d.into());
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExampleReport {
    pub example_id: String,
    pub checks: Vec<Check>,
    pub overall: bool,
}

impl ExampleReport {
    fn new(id: impl Into<String>, checks: Vec<Check>) -> Self {
        let overall = !checks.is_empty() && checks.iter().all(|c| c.pass);
        ExampleReport { example_id: id.into(), checks, overall }
    }

    pub fn check(&self, prefix: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name.starts_with(prefix))
    }
}

/// Tolerances and grids; all explicit so callers can tighten them.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct VerifyConfig {
    pub x_max: f64,
    pub points: usize,
    /// Potential comparisons, relative to `max |V|` on the grid.
    pub potential_tol: f64,
    pub jost_tol: f64,
    pub position_tol: f64,
    pub wronskian_tol: f64,
    pub k_range: (f64, f64),
    pub n_scan: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            x_max: 25.0,
            points: 2000,
            potential_tol: 1e-7,
            jost_tol: 1e-7,
            position_tol: 1e-6,
            wronskian_tol: 1e-6,
            k_range: (0.1, 5.0),
            n_scan: 200,
        }
    }
}

impl VerifyConfig {
    fn grid(&self) -> Vec<f64> {
        uniform_grid(0.0, self.x_max, self.points)
    }
}

/// Largest `|V_a - V_b|` on the grid and where it occurs.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GridComparison {
    pub max_deviation: f64,
    pub location: f64,
    /// `max |V_b|` on the grid, for relative statements.
    pub reference_max: f64,
}

pub fn compare_on_grid(a: &Potential, b: &Potential, grid: &[f64]) -> Result<GridComparison> {
    let mut out = GridComparison { max_deviation: 0.0, location: f64::NAN, reference_max: 0.0 };
    for &x in grid {
        let vb = b.eval(x)?;
        let d = (a.eval(x)? - vb).norm();
        out.reference_max = out.reference_max.max(vb.norm());
        if d > out.max_deviation || d.is_nan() {
            out.max_deviation = d;
            out.location = x;
        }
    }
    Ok(out)
}

fn potential_check(name: &str, got: Result<Potential>, want: Result<Potential>, grid: &[f64], tol: f64) -> Check {
    let cmp = got.and_then(|g| want.and_then(|w| compare_on_grid(&g, &w, grid)));
    match cmp {
        Ok(c) => {
            let rel = c.max_deviation / c.reference_max.max(1e-300);
            Check::measured(name, rel, tol).with_detail(format!("max |dV| = {:.3e} at x = {}", c.max_deviation, c.location))
        }
        Err(e) => Check::failed(name, tol, &e),
    }
}

/// Sample points for Jost-function comparisons: the real axis in
/// `[0.1, 5]` plus strip points away from the imaginary axis.
pub fn jost_sample_points() -> Vec<Complex64> {
    let mut pts: Vec<Complex64> = (0..30).map(|i| Complex64::new(0.1 + 4.9 * i as f64 / 29.0, 0.0)).collect();
    for &im in &[0.25, 0.5, 1.5, 2.5] {
        for &re in &[-2.2, -0.5, 0.7, 1.3, 3.1] {
            pts.push(Complex64::new(re, im));
        }
    }
    pts
}

/// Largest relative mismatch between numeric and closed-form `A` at `pts`.
pub fn jost_deviation(spec: &PotentialSpec, pts: &[Complex64]) -> Result<f64> {
    let pot = Potential::new(spec)?;
    let mut worst: f64 = 0.0;
    for &s in pts {
        let want = closed_form_jost(spec, s)?;
        let got = schrodinger::jost_function(&pot, s)?.a;
        worst = worst.max((got - want).norm() / want.norm());
    }
    Ok(worst)
}

fn energy_check(name: &str, found: Option<Complex64>, want: f64, tol: f64) -> Check {
    match found {
        Some(e) => Check::measured(name, (e - want).norm(), tol).with_detail(format!("E = {e:.10}")),
        None => Check { name: name.into(), max_deviation: f64::INFINITY, tolerance: tol, pass: false, detail: Some("not found".into()) },
    }
}

fn spectrum_checks(report: &SpectrumReport, bound: &[f64], sing_e: &[f64], tol: f64) -> Vec<Check> {
    let mut out = Vec::new();
    for e in &report.errors {
        out.push(Check::failed(format!("spectrum phase {}", e.phase), 0.0, &e.error));
    }
    for &b in bound {
        let f = report.bound_states.iter().map(|p| p.e).min_by(|x, y| (x - b).norm().total_cmp(&(y - b).norm()));
        out.push(energy_check(&format!("bound state E = {b}"), f, b, tol));
    }
    for &e in sing_e {
        let f = report.singularities.iter().map(|p| p.e).min_by(|x, y| (x - e).norm().total_cmp(&(y - e).norm()));
        out.push(energy_check(&format!("singularity E = {e}"), f, e, tol));
    }
    let extra = report.bound_states.len().saturating_sub(bound.len()) + report.singularities.len().saturating_sub(sing_e.len());
    let missing = bound.len().saturating_sub(report.bound_states.len()) + sing_e.len().saturating_sub(report.singularities.len());
    out.push(
        Check::measured("no other spectral points", (extra + missing) as f64, 0.0).with_detail(format!(
            "{} bound states, {} singularities",
            report.bound_states.len(),
            report.singularities.len()
        )),
    );
    out
}

fn classify(pot: &Potential, cfg: &VerifyConfig, rect: Option<Rect>) -> Result<SpectrumReport> {
    let rect = match rect {
        Some(r) => r,
        None => spectral::default_contour(pot)?,
    };
    Ok(spectral::classify_spectrum(pot, cfg.k_range, cfg.n_scan, &rect))
}

/// Zero potential, `u1 = sinh(a1 x)` at `alpha1 = -a1^2`, `u2 = exp(-i k0 x)`.
///
/// The construction equals the closed form `ClosedForm2Susy(a1, -k0)`, the
/// shifted soliton with `b = i atan(k0 / a1)`, and has its singularity at
/// `k = k0`. The mirror seed `exp(i k0 x)` gives `ClosedForm2Susy(a1, k0)`.
pub fn run_example_1(a1: Complex64, k0: f64) -> ExampleReport {
    run_example_1_with(a1, k0, &VerifyConfig::default())
}

pub fn run_example_1_with(a1: Complex64, k0: f64, cfg: &VerifyConfig) -> ExampleReport {
    let grid = cfg.grid();
    let alpha1 = -a1 * a1;
    let build = |sign: f64| {
        darboux::susy2_potential(&PotentialSpec::zero(), &TransformStep::regular(alpha1), &TransformStep::jost(Complex64::new(sign * k0, 0.0)))
    };
    let spec = match build(-1.0) {
        Ok(s) => s,
        Err(e) => return ExampleReport::new("1", vec![Check::failed("construction", 0.0, &e)]),
    };
    let mut checks = Vec::new();
    let prep = |s: &PotentialSpec| Potential::new(s);
    if a1.im == 0.0 && a1.re > 0.0 {
        let a = a1.re;
        let closed = |k: f64| PotentialSpec::closed_form_2susy(a, k).and_then(|s| prep(&s));
        checks.push(potential_check("(a) exp(-i k0 x) seed vs closed form at -k0", prep(&spec), closed(-k0), &grid, cfg.potential_tol));
        checks.push(potential_check(
            "(a') exp(+i k0 x) seed vs closed form at k0",
            build(1.0).and_then(|s| prep(&s)),
            closed(k0),
            &grid,
            cfg.potential_tol,
        ));
        let b = I * (k0 / a).atan();
        checks.push(potential_check(
            "(b) shifted soliton with b = i atan(k0/a1)",
            prep(&spec),
            PotentialSpec::shifted_one_soliton(a, b).and_then(|s| prep(&s)),
            &grid,
            cfg.potential_tol,
        ));
    }
    match prep(&spec).and_then(|p| classify(&p, cfg, None)) {
        Ok(r) => {
            checks.extend(spectrum_checks(&r, &[], &[k0 * k0], cfg.position_tol));
            let at = r.singularities.iter().find(|p| (p.e - k0 * k0).norm() < cfg.position_tol).map(|p| p.s.re);
            if let Some(k) = at {
                checks.push(Check::measured("singularity sits at k = +k0", (k - k0).abs(), cfg.position_tol));
            }
        }
        Err(e) => checks.push(Check::failed("spectrum", cfg.position_tol, &e)),
    }
    ExampleReport::new("1", checks)
}

/// Nodes of a seed on `(0, x_max]`. A seed that is real up to a constant
/// phase is checked for sign changes, otherwise the smallest interior local
/// minimum of the relative modulus is reported. Returns `(measure, x)`,
/// where a measure of zero means a node was found.
fn seed_minimum(trace: &SolutionTrace, kappa: f64) -> (f64, f64) {
    let st = &trace.states;
    let peak = st.iter().map(|s| s.y).fold(Complex64::new(0.0, 0.0), |a, y| if y.norm() > a.norm() { y } else { a });
    let phase = if peak.norm() > 0.0 { peak.conj() / peak.norm() } else { Complex64::new(1.0, 0.0) };
    let real = st.iter().all(|s| (s.y * phase).im.abs() <= 1e-8 * peak.norm());
    if real {
        for w in st.windows(2) {
            if w[0].x > 0.0 && (w[0].y * phase).re * (w[1].y * phase).re < 0.0 {
                return (0.0, w[1].x);
            }
        }
    }
    let rho: Vec<f64> = st.iter().map(|s| s.y.norm() / s.y.norm().hypot(s.dy.norm() / kappa)).collect();
    let mut best = (f64::INFINITY, f64::NAN);
    for i in 1..rho.len() {
        let left = rho[i] <= rho[i - 1];
        let right = i + 1 == rho.len() || rho[i] <= rho[i + 1];
        if left && right && rho[i] < best.0 {
            best = (rho[i], st[i].x);
        }
    }
    best
}

fn seed_nodeless_check(pot: &Potential, step: &TransformStep, cfg: &VerifyConfig) -> Check {
    let grid = uniform_grid(0.0, cfg.x_max, 20 * cfg.points);
    match darboux::build_transformation_function(pot, step, &grid) {
        Ok(tr) => {
            let (m, x) = seed_minimum(&tr, step.alpha.norm().sqrt().max(1.0));
            Check { name: "u1 nodeless on (0, x_max]".into(), max_deviation: -m, tolerance: -1e-6, pass: m > 1e-6, detail: Some(format!("min relative modulus {m:.3e} at x = {x}")) }
        }
        Err(e) => Check::failed("u1 nodeless on (0, x_max]", 0.0, &e),
    }
}

/// `-6 sech^2 x` with `u1` (default: the ground state) and `u2 = e(x, k0)`.
pub fn run_example_2(k0: f64, u1: Option<TransformStep>) -> ExampleReport {
    run_example_2_with(k0, u1, &VerifyConfig::default())
}

pub fn run_example_2_with(k0: f64, u1: Option<TransformStep>, cfg: &VerifyConfig) -> ExampleReport {
    let base = PotentialSpec::sech_well(2, 1.0).expect("valid catalog entry");
    let u1 = u1.unwrap_or_else(|| TransformStep::jost(I));
    let grid = cfg.grid();
    let mut checks = vec![match jost_deviation(&base, &jost_sample_points()) {
        Ok(d) => Check::measured("(a) Jost function vs closed form", d, cfg.jost_tol),
        Err(e) => Check::failed("(a) Jost function vs closed form", cfg.jost_tol, &e),
    }];
    let base_pot = Potential::new(&base).expect("catalog potential");
    checks.push(seed_nodeless_check(&base_pot, &u1, cfg));
    let spec = darboux::susy2_potential(&base, &u1, &TransformStep::jost(Complex64::new(k0, 0.0)));
    let pot = spec.and_then(|s| Potential::new(&s));
    let pot = match pot {
        Ok(p) => p,
        Err(e) => {
            checks.push(Check::failed("(b) construction", 0.0, &e));
            return ExampleReport::new("2", checks);
        }
    };
    checks.push(potential_check(
        "(b) 2-SUSY vs closed form at a1 = 2",
        Ok(pot.clone()),
        PotentialSpec::closed_form_2susy(2.0, k0).and_then(|s| Potential::new(&s)),
        &grid,
        cfg.potential_tol,
    ));
    match classify(&pot, cfg, None) {
        Ok(r) => checks.extend(spectrum_checks(&r, &[], &[k0 * k0], cfg.position_tol)),
        Err(e) => checks.push(Check::failed("(c) spectrum", cfg.position_tol, &e)),
    }
    ExampleReport::new("2", checks)
}

/// `w0(x)` from the closed-form Wronskian of the `-20 sech^2 x` example.
pub fn example3_w0(k0: f64, x: f64) -> Complex64 {
    let k2 = k0 * k0;
    let a1 = 4.0 * (16.0 + k2);
    let a2 = 7.0 * k2 - 8.0;
    let b1 = -2.0 * I * k0 * (16.0 + k2);
    let b2 = -I * k0 * (k2 - 14.0);
    let c = -3.0 * (k2 + 16.0);
    a1 * (2.0 * x).cosh() + a2 * (4.0 * x).cosh() + b1 * (2.0 * x).sinh() + b2 * (4.0 * x).sinh() + c
}

/// Largest relative deviation of `W(u1, u2)` from `C w0 sech^7 e^{i k0 x}`
/// on `[x0, x1]`, with `C` fitted at the midpoint.
pub fn example3_wronskian_deviation(k0: f64, x0: f64, x1: f64, n: usize) -> Result<f64> {
    let base = Potential::new(&PotentialSpec::sech_well(4, 1.0)?)?;
    let grid = uniform_grid(x0, x1, n);
    let u1 = darboux::build_transformation_function(&base, &TransformStep::jost(3.0 * I), &grid)?;
    let u2 = darboux::build_transformation_function(&base, &TransformStep::jost(Complex64::new(k0, 0.0)), &grid)?;
    let prof = darboux::wronskian_profile(&u1, &u2, Complex64::new(-9.0, 0.0), Complex64::new(k0 * k0, 0.0))?;
    let reference = |x: f64| example3_w0(k0, x) * (1.0 / x.cosh()).powi(7) * (I * k0 * x).exp();
    let mid = n / 2;
    let c = prof.values[mid] / reference(grid[mid]);
    Ok(grid
        .iter()
        .zip(&prof.values)
        .map(|(&x, w)| {
            let r = c * reference(x);
            (w - r).norm() / r.norm()
        })
        .fold(0.0, f64::max))
}

/// `-20 sech^2 x` with `u1 = psi_0` at `E = -9` and `u2 = e(x, k0)`.
pub fn run_example_3(k0: f64, rect: Option<Rect>) -> ExampleReport {
    run_example_3_with(k0, rect, &VerifyConfig::default())
}

pub fn run_example_3_with(k0: f64, rect: Option<Rect>, cfg: &VerifyConfig) -> ExampleReport {
    let base = PotentialSpec::sech_well(4, 1.0).expect("valid catalog entry");
    let mut checks = vec![match jost_deviation(&base, &jost_sample_points()) {
        Ok(d) => Check::measured("(a) Jost function vs closed form", d, cfg.jost_tol),
        Err(e) => Check::failed("(a) Jost function vs closed form", cfg.jost_tol, &e),
    }];
    checks.push(match example3_wronskian_deviation(k0, 0.5, 15.0, cfg.points) {
        Ok(d) => Check::measured("(b) Wronskian proportional to w0 sech^7 e^{i k0 x} on [0.5, 15]", d, cfg.wronskian_tol),
        Err(e) => Check::failed("(b) Wronskian proportional to w0 sech^7 e^{i k0 x} on [0.5, 15]", cfg.wronskian_tol, &e),
    });
    let spec = darboux::susy2_potential(&base, &TransformStep::jost(3.0 * I), &TransformStep::jost(Complex64::new(k0, 0.0)));
    match spec.and_then(|s| Potential::new(&s)).and_then(|p| classify(&p, cfg, rect)) {
        Ok(r) => checks.extend(spectrum_checks(&r, &[-1.0], &[k0 * k0], cfg.position_tol)),
        Err(e) => checks.push(Check::failed("(c) spectrum", cfg.position_tol, &e)),
    }
    ExampleReport::new("3", checks)
}

/// Removes the singularity at `k0`, checks it is gone, then undoes the step.
/// When `expected` is given the removed potential is compared with it on
/// `[0.05, x_max]`.
pub fn verify_removal_roundtrip(spec: &PotentialSpec, k0: f64, expected: Option<&PotentialSpec>) -> ExampleReport {
    verify_removal_roundtrip_with(spec, k0, expected, &VerifyConfig::default())
}

pub fn verify_removal_roundtrip_with(spec: &PotentialSpec, k0: f64, expected: Option<&PotentialSpec>, cfg: &VerifyConfig) -> ExampleReport {
    let id = "removal";
    let pot = match Potential::new(spec) {
        Ok(p) => p,
        Err(e) => return ExampleReport::new(id, vec![Check::failed("prepare", 0.0, &e)]),
    };
    let removal = match darboux::remove_spectral_singularity(&pot, k0) {
        Ok(r) => r,
        Err(e) => return ExampleReport::new(id, vec![Check::failed("remove singularity", 0.0, &e)]),
    };
    let mut checks = vec![Check::measured("zero is simple (|A'(k0)| > 1e-4)", -removal.jost_slope, -1e-4)
        .with_detail(format!("|A'(k0)| = {:.3e}", removal.jost_slope))];
    let grid = uniform_grid(0.05, cfg.x_max, cfg.points);
    let removed = match Potential::new(&removal.spec) {
        Ok(p) => p,
        Err(e) => {
            checks.push(Check::failed("prepare removed potential", 0.0, &e));
            return ExampleReport::new(id, checks);
        }
    };
    if let Some(exp) = expected {
        let want = Potential::new(exp);
        checks.push(match want.and_then(|w| compare_on_grid(&removed, &w, &grid)) {
            Ok(c) => Check::measured("removed potential vs expected on [0.05, x_max]", c.max_deviation, cfg.potential_tol)
                .with_detail(format!("at x = {}", c.location)),
            Err(e) => Check::failed("removed potential vs expected on [0.05, x_max]", cfg.potential_tol, &e),
        });
    }
    checks.push(match darboux::estimate_strength(&removed) {
        Ok(nu) => Check::measured("origin strength 1", (nu - 1.0).abs(), 1e-3).with_detail(format!("nu = {nu:.6}")),
        Err(e) => Check::failed("origin strength 1", 1e-3, &e),
    });
    match spectral::scan_real_axis(&removed, cfg.k_range.0, cfg.k_range.1, cfg.n_scan) {
        Ok(t) => {
            let (m, k) = t.min_modulus().unwrap_or((0.0, f64::NAN));
            checks.push(Check::measured("no real zero: min |A(k)| above 1e-4", -m, -1e-4).with_detail(format!("min |A| = {m:.3e} at k = {k}")));
        }
        Err(e) => checks.push(Check::failed("no real zero: min |A(k)| above 1e-4", 1e-4, &e)),
    }
    let r = spectral::classify_spectrum(&removed, cfg.k_range, cfg.n_scan, &spectral::default_contour(&removed).unwrap_or(Rect { re0: -3.0, re1: 3.0, im0: 0.05, im1: 3.0 }));
    checks.push(Check::measured("no singularity reported", r.singularities.len() as f64, 0.0));
    let chain = vec![TransformStep::jost(Complex64::new(k0, 0.0))];
    let mut full = chain.clone();
    full.extend(inverse_steps(&chain));
    let back = PotentialSpec::transformed(spec.clone(), full).and_then(|s| Potential::new(&s));
    checks.push(match back.and_then(|b| compare_on_grid(&b, &pot, &grid)) {
        Ok(c) => Check::measured("inverse step recovers the input", c.max_deviation, cfg.potential_tol).with_detail(format!("at x = {}", c.location)),
        Err(e) => Check::failed("inverse step recovers the input", cfg.potential_tol, &e),
    });
    ExampleReport::new(id, checks)
}

/// Reports for the three examples at their default parameters.
pub fn run_all() -> Vec<ExampleReport> {
    let (r1, (r2, r3)) = rayon::join(
        || run_example_1(Complex64::new(1.0, 0.0), 1.0),
        || rayon::join(|| run_example_2(1.0, None), || run_example_3(1.0, None)),
    );
    vec![r1, r2, r3]
}
