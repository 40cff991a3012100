//! Potential descriptions, evaluation and admissibility checks.

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::darboux::{Chain, PrepareOptions, Seed, TransformStep};
use crate::{Error, Result};

/// Closed-form catalog entries and Darboux-transformed potentials.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialKind {
    Zero,
    /// `-lambda(lambda+1) a^2 sech^2(a x)`
    SechWell { lambda: u32, a: f64 },
    /// `-2 a^2 sech^2(a x + b)`
    ShiftedOneSoliton { a: f64, b: Complex64 },
    /// `2 a^2 / sinh^2(a x)`
    SinhBarrier { a: f64 },
    /// `-2 a1^2 (a1^2 + k0^2) / [a1 cosh(a1 x) - i k0 sinh(a1 x)]^2`
    ClosedForm2Susy { a1: f64, k0: f64 },
    Transformed { base: Box<PotentialSpec>, chain: Vec<TransformStep> },
}

/// Declarative description of a potential on the half-line.
///
/// Specs are plain data. Call [`Potential::new`] to get something that can be
/// evaluated; for transformed kinds that step integrates the seed solutions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct PotentialSpec {
    pub kind: PotentialKind,
    /// Claimed exponential decay rate of `|V|`.
    pub decay_rate: f64,
    /// Strength `nu` of a `nu(nu+1)/x^2` singularity at the origin.
    pub origin_strength: Option<f64>,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be positive and finite, got {v}")))
    }
}

impl PotentialSpec {
    pub fn zero() -> Self {
        PotentialSpec { kind: PotentialKind::Zero, decay_rate: 10.0, origin_strength: None }
    }

    pub fn sech_well(lambda: u32, a: f64) -> Result<Self> {
        Self::catalog(PotentialKind::SechWell { lambda, a })
    }

    pub fn shifted_one_soliton(a: f64, b: Complex64) -> Result<Self> {
        Self::catalog(PotentialKind::ShiftedOneSoliton { a, b })
    }

    pub fn sinh_barrier(a: f64) -> Result<Self> {
        Self::catalog(PotentialKind::SinhBarrier { a })
    }

    pub fn closed_form_2susy(a1: f64, k0: f64) -> Result<Self> {
        Self::catalog(PotentialKind::ClosedForm2Susy { a1, k0 })
    }

    /// A base potential followed by Darboux steps. The decay rate is inherited
    /// from the base.
    pub fn transformed(base: PotentialSpec, chain: Vec<TransformStep>) -> Result<Self> {
        let decay_rate = base.decay_rate;
        let spec = PotentialSpec {
            kind: PotentialKind::Transformed { base: Box::new(base), chain },
            decay_rate,
            origin_strength: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn catalog(kind: PotentialKind) -> Result<Self> {
        let decay_rate = match &kind {
            PotentialKind::SechWell { a, .. }
            | PotentialKind::ShiftedOneSoliton { a, .. }
            | PotentialKind::SinhBarrier { a } => 2.0 * a,
            PotentialKind::ClosedForm2Susy { a1, .. } => 2.0 * a1,
            _ => 10.0,
        };
        let origin_strength = matches!(kind, PotentialKind::SinhBarrier { .. }).then_some(1.0);
        let spec = PotentialSpec { kind, decay_rate, origin_strength };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_decay_rate(mut self, eps: f64) -> Result<Self> {
        self.decay_rate = eps;
        self.validate()?;
        Ok(self)
    }

    /// Checks parameter domains and chain bookkeeping.
    pub fn validate(&self) -> Result<()> {
        positive("decay_rate", self.decay_rate)?;
        if let Some(nu) = self.origin_strength {
            if !(nu.is_finite() && nu >= 0.0) {
                return Err(Error::domain(format!("origin_strength must be non-negative, got {nu}")));
            }
        }
        match &self.kind {
            PotentialKind::Zero => {}
            PotentialKind::SechWell { lambda, a } => {
                positive("a", *a)?;
                if *lambda < 1 {
                    return Err(Error::domain("lambda must be at least 1"));
                }
            }
            PotentialKind::ShiftedOneSoliton { a, b } => {
                positive("a", *a)?;
                if !(b.re.is_finite() && b.im.is_finite()) || b.im.abs() >= FRAC_PI_2 {
                    return Err(Error::domain(format!(
                        "|Im b| must be below pi/2 so that cosh(ax+b) has no zero on the half-line, got b = {b}"
                    )));
                }
            }
            PotentialKind::SinhBarrier { a } => positive("a", *a)?,
            PotentialKind::ClosedForm2Susy { a1, k0 } => {
                positive("a1", *a1)?;
                if !k0.is_finite() || *k0 == 0.0 {
                    return Err(Error::domain("k0 must be real and nonzero"));
                }
            }
            PotentialKind::Transformed { base, chain } => {
                base.validate()?;
                validate_chain(chain)?;
            }
        }
        Ok(())
    }

    pub fn is_catalog(&self) -> bool {
        !matches!(self.kind, PotentialKind::Transformed { .. })
    }

    /// Characteristic inverse length, used to place origin windows and grids.
    pub fn scale(&self) -> f64 {
        match &self.kind {
            PotentialKind::Zero => 1.0,
            PotentialKind::SechWell { a, .. }
            | PotentialKind::ShiftedOneSoliton { a, .. }
            | PotentialKind::SinhBarrier { a } => *a,
            PotentialKind::ClosedForm2Susy { a1, .. } => *a1,
            PotentialKind::Transformed { base, .. } => base.scale(),
        }
    }

    /// Canonical JSON text.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// SHA-256 of the canonical JSON, hex encoded.
    pub fn digest(&self) -> String {
        Sha256::digest(self.to_json().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn validate_chain(chain: &[TransformStep]) -> Result<()> {
    for (i, step) in chain.iter().enumerate() {
        let a = step.alpha;
        if !(a.re.is_finite() && a.im.is_finite()) {
            return Err(Error::domain(format!("step {i}: alpha is not finite")));
        }
        let tol = 1e-9 * a.norm().max(1.0);
        match &step.seed {
            Seed::Jost { s } => {
                if (s * s - a).norm() > tol {
                    return Err(Error::domain(format!("step {i}: Jost seed s = {s} needs alpha = s^2, got {a}")));
                }
            }
            Seed::Regular => {}
            Seed::Custom { x0, y0, dy0 } => {
                if !(x0.is_finite() && *x0 >= 0.0) {
                    return Err(Error::domain(format!("step {i}: custom seed needs x0 >= 0")));
                }
                if y0.norm() == 0.0 && dy0.norm() == 0.0 || !(y0.norm().is_finite() && dy0.norm().is_finite()) {
                    return Err(Error::domain(format!("step {i}: custom seed data must be finite and nonzero")));
                }
            }
            Seed::Reciprocal { of } => {
                if *of >= i {
                    return Err(Error::domain(format!("step {i}: reciprocal seed must refer to an earlier step, got {of}")));
                }
                if (chain[*of].alpha - a).norm() > tol {
                    return Err(Error::domain(format!(
                        "step {i}: reciprocal of step {of} lives at alpha = {}, got {a}",
                        chain[*of].alpha
                    )));
                }
            }
        }
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    kind: String,
    #[serde(default)]
    params: Map<String, Value>,
    #[serde(default)]
    decay_rate: Option<f64>,
    #[serde(default)]
    origin_strength: Option<f64>,
    #[serde(default)]
    chain: Vec<TransformStep>,
}

fn param<T: serde::de::DeserializeOwned>(params: &Map<String, Value>, key: &str) -> Result<T> {
    let v = params.get(key).ok_or_else(|| Error::Parse(format!("missing parameter {key:?}")))?;
    serde_json::from_value(v.clone()).map_err(|e| Error::Parse(format!("parameter {key:?}: {e}")))
}

impl TryFrom<RawSpec> for PotentialSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        let p = &raw.params;
        let allowed: &[&str] = match raw.kind.as_str() {
            "zero" => &[],
            "sech_well" => &["lambda", "a"],
            "shifted_one_soliton" => &["a", "b"],
            "sinh_barrier" => &["a"],
            "closed_form_2susy" => &["a1", "k0"],
            "transformed" => &["base"],
            other => return Err(Error::Parse(format!("unknown potential kind {other:?}"))),
        };
        if let Some(k) = p.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::Parse(format!("unexpected parameter {k:?} for kind {:?}", raw.kind)));
        }
        if raw.kind != "transformed" && !raw.chain.is_empty() {
            return Err(Error::Parse("only transformed potentials carry a chain".into()));
        }
        let mut spec = match raw.kind.as_str() {
            "zero" => PotentialSpec::zero(),
            "sech_well" => PotentialSpec::sech_well(param(p, "lambda")?, param(p, "a")?)?,
            "shifted_one_soliton" => PotentialSpec::shifted_one_soliton(param(p, "a")?, param(p, "b")?)?,
            "sinh_barrier" => PotentialSpec::sinh_barrier(param(p, "a")?)?,
            "closed_form_2susy" => PotentialSpec::closed_form_2susy(param(p, "a1")?, param(p, "k0")?)?,
            _ => PotentialSpec::transformed(param(p, "base")?, raw.chain)?,
        };
        if let Some(eps) = raw.decay_rate {
            spec.decay_rate = eps;
        }
        if raw.origin_strength.is_some() {
            spec.origin_strength = raw.origin_strength;
        }
        spec.validate()?;
        Ok(spec)
    }
}

impl From<PotentialSpec> for RawSpec {
    fn from(spec: PotentialSpec) -> Self {
        let mut params = Map::new();
        let mut put = |k: &str, v: Value| {
            params.insert(k.to_string(), v);
        };
        let c = |z: Complex64| serde_json::json!([z.re, z.im]);
        let (kind, chain) = match spec.kind {
            PotentialKind::Zero => ("zero", vec![]),
            PotentialKind::SechWell { lambda, a } => {
                put("lambda", lambda.into());
                put("a", a.into());
                ("sech_well", vec![])
            }
            PotentialKind::ShiftedOneSoliton { a, b } => {
                put("a", a.into());
                put("b", c(b));
                ("shifted_one_soliton", vec![])
            }
            PotentialKind::SinhBarrier { a } => {
                put("a", a.into());
                ("sinh_barrier", vec![])
            }
            PotentialKind::ClosedForm2Susy { a1, k0 } => {
                put("a1", a1.into());
                put("k0", k0.into());
                ("closed_form_2susy", vec![])
            }
            PotentialKind::Transformed { base, chain } => {
                put("base", serde_json::to_value(*base).expect("spec serialization cannot fail"));
                ("transformed", chain)
            }
        };
        RawSpec {
            kind: kind.to_string(),
            params,
            decay_rate: Some(spec.decay_rate),
            origin_strength: spec.origin_strength,
            chain,
        }
    }
}

// Overflow-free hyperbolic pieces: sech(z) and tanh(z) for complex z.
pub(crate) fn sech_tanh(z: Complex64) -> (Complex64, Complex64) {
    let flip = z.re < 0.0;
    let w = if flip { -z } else { z };
    let q = (-2.0 * w).exp();
    let d = 1.0 + q;
    let sech = 2.0 * (-w).exp() / d;
    let tanh = (1.0 - q) / d;
    if flip {
        (sech, -tanh)
    } else {
        (sech, tanh)
    }
}

/// `[V, V', V'']` for a catalog kind at `x`.
fn catalog_jet(kind: &PotentialKind, x: f64) -> [Complex64; 3] {
    let zero = Complex64::new(0.0, 0.0);
    let sech2_jet = |c: f64, a: f64, z: Complex64| {
        let (sh, th) = sech_tanh(z);
        let v = c * sh * sh;
        [v, v * (-2.0 * a * th), v * (a * a * (4.0 * th * th - 2.0 * sh * sh))]
    };
    match *kind {
        PotentialKind::Zero => [zero; 3],
        PotentialKind::SechWell { lambda, a } => {
            let l = f64::from(lambda);
            sech2_jet(-l * (l + 1.0) * a * a, a, Complex64::new(a * x, 0.0))
        }
        PotentialKind::ShiftedOneSoliton { a, b } => sech2_jet(-2.0 * a * a, a, a * x + b),
        PotentialKind::SinhBarrier { a } => {
            let t = a * x;
            // csch^2 t = 4 e^{-2t} / (1 - e^{-2t})^2 stays finite for large t.
            let em = (-2.0 * t).exp_m1();
            let csch2 = 4.0 * (-2.0 * t).exp() / (em * em);
            let coth = -(2.0 + em) / em;
            let v = 2.0 * a * a * csch2;
            [v, v * (-2.0 * a * coth), v * (a * a * (4.0 * coth * coth + 2.0 * csch2))].map(|r| Complex64::new(r, 0.0))
        }
        PotentialKind::ClosedForm2Susy { a1: a, k0: k } => {
            let q = (-2.0 * a * x).exp();
            let am = Complex64::new(a, -k);
            let ap = Complex64::new(a, k);
            let p = am + ap * q;
            let dd = a * (am - ap * q) / p;
            let v = -8.0 * a * a * (a * a + k * k) * q / (p * p);
            [v, v * (-2.0 * dd), v * (6.0 * dd * dd - 2.0 * a * a)]
        }
        PotentialKind::Transformed { .. } => unreachable!("catalog_jet on a transformed kind"),
    }
}

#[derive(Debug)]
enum Inner {
    Catalog,
    Transformed(Box<Chain>),
}

/// A spec made ready for evaluation.
///
/// Cloning is cheap and the value can be shared across threads.
#[derive(Debug, Clone)]
pub struct Potential {
    spec: PotentialSpec,
    inner: Arc<Inner>,
    decay_rate: f64,
    origin_strength: f64,
}

impl Potential {
    pub fn new(spec: &PotentialSpec) -> Result<Self> {
        Self::with_options(spec, &PrepareOptions::default())
    }

    pub fn with_options(spec: &PotentialSpec, opts: &PrepareOptions) -> Result<Self> {
        spec.validate()?;
        match &spec.kind {
            PotentialKind::Transformed { base, chain } => {
                let base = Potential::with_options(base, opts)?;
                let prepared = Chain::prepare(base, chain, opts)?;
                let decay_rate = prepared.decay_rate().min(spec.decay_rate);
                let mut pot = Potential {
                    spec: spec.clone(),
                    inner: Arc::new(Inner::Transformed(Box::new(prepared))),
                    decay_rate,
                    origin_strength: spec.origin_strength.unwrap_or(0.0),
                };
                if spec.origin_strength.is_none() {
                    let nu = estimate_origin_strength(&pot, None)?;
                    pot.origin_strength = if (nu - nu.round()).abs() < 1e-3 { nu.round() } else { nu };
                }
                Ok(pot)
            }
            _ => Ok(Potential {
                spec: spec.clone(),
                inner: Arc::new(Inner::Catalog),
                decay_rate: spec.decay_rate,
                origin_strength: spec.origin_strength.unwrap_or(0.0),
            }),
        }
    }

    pub fn spec(&self) -> &PotentialSpec {
        &self.spec
    }

    /// Decay rate used for Jost cutoffs. For transformed potentials this can be
    /// below the inherited rate when a seed grows slower than the base decays.
    pub fn decay_rate(&self) -> f64 {
        self.decay_rate
    }

    /// Origin singularity strength; 0 for potentials finite at the origin.
    pub fn origin_strength(&self) -> f64 {
        self.origin_strength
    }

    pub fn is_singular(&self) -> bool {
        self.origin_strength > 0.0
    }

    pub fn scale(&self) -> f64 {
        self.spec.scale()
    }

    /// Largest abscissa where a transformed potential is known from its seeds.
    /// Catalog potentials are known everywhere.
    pub fn coverage(&self) -> f64 {
        match &*self.inner {
            Inner::Catalog => f64::INFINITY,
            Inner::Transformed(c) => c.coverage(),
        }
    }

    pub(crate) fn chain(&self) -> Option<&Chain> {
        match &*self.inner {
            Inner::Catalog => None,
            Inner::Transformed(c) => Some(c),
        }
    }

    /// V(x).
    pub fn eval(&self, x: f64) -> Result<Complex64> {
        if !(x >= 0.0 && x.is_finite()) {
            return Err(Error::domain(format!("potential evaluated at x = {x}")));
        }
        if x == 0.0 && self.is_singular() {
            return Err(Error::domain("potential is singular at the origin"));
        }
        match &*self.inner {
            Inner::Catalog => Ok(catalog_jet(&self.spec.kind, x)[0]),
            Inner::Transformed(c) => c.eval(x),
        }
    }

    /// Analytic first or second derivative. Catalog kinds only.
    pub fn derivative(&self, x: f64, order: u8) -> Result<Complex64> {
        eval_potential_derivative(&self.spec, x, order)
    }
}

/// One-off evaluation of V(x). Prefer [`Potential`] for repeated calls.
pub fn eval_potential(spec: &PotentialSpec, x: f64) -> Result<Complex64> {
    if spec.is_catalog() {
        Potential {
            spec: spec.clone(),
            inner: Arc::new(Inner::Catalog),
            decay_rate: spec.decay_rate,
            origin_strength: spec.origin_strength.unwrap_or(0.0),
        }
        .eval(x)
    } else {
        Potential::new(spec)?.eval(x)
    }
}

/// Exact derivative of a catalog potential.
pub fn eval_potential_derivative(spec: &PotentialSpec, x: f64, order: u8) -> Result<Complex64> {
    if !spec.is_catalog() {
        return Err(Error::Unsupported("analytic derivatives exist for catalog potentials only".into()));
    }
    if !(order == 1 || order == 2) {
        return Err(Error::domain(format!("derivative order must be 1 or 2, got {order}")));
    }
    if !(x >= 0.0 && x.is_finite()) || (x == 0.0 && spec.origin_strength.unwrap_or(0.0) > 0.0) {
        return Err(Error::domain(format!("derivative evaluated at x = {x}")));
    }
    Ok(catalog_jet(&spec.kind, x)[order as usize])
}

/// Outcome of [`check_exponential_decay`].
#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    pub eps: f64,
    pub x_min: f64,
    pub x_max: f64,
    /// Truncated integral of `e^{eps x} |V(x)|`.
    pub integral: f64,
    pub error_estimate: f64,
    /// Set when the weighted integrand is still increasing near `x_max`.
    pub tail_growing: bool,
}

/// Weighted integral test for exponential decay.
///
/// Potentials singular at the origin are integrated from `x_min`
/// (default `1e-3 / scale`).
pub fn check_exponential_decay(pot: &Potential, eps: f64, x_max: f64, x_min: Option<f64>) -> Result<DecayReport> {
    positive("eps", eps)?;
    positive("x_max", x_max)?;
    let x_min = match x_min {
        Some(v) => v,
        None if pot.is_singular() => 1e-3 / pot.scale(),
        None => 0.0,
    };
    if !(x_min >= 0.0 && x_min < x_max) {
        return Err(Error::domain(format!("x_min = {x_min} must lie in [0, x_max)")));
    }
    let g = |x: f64| pot.eval(x).map(|v| (eps * x).exp() * v.norm());
    // Probe once so that evaluation errors surface instead of becoming NaN.
    g(0.5 * (x_min + x_max))?;
    let (integral, error_estimate) =
        crate::quad::integrate(|x| g(x).unwrap_or(f64::NAN), x_min, x_max, 1e-9);
    if !integral.is_finite() {
        return Err(Error::NonConvergence("decay integral is not finite".into()));
    }
    let window_mean = |lo: f64, hi: f64| -> Result<f64> {
        let n = 16;
        let mut acc = 0.0;
        for i in 0..n {
            acc += g(lo + (hi - lo) * (i as f64 + 0.5) / n as f64)?;
        }
        Ok(acc / n as f64)
    };
    let span = x_max - x_min;
    let early = window_mean(x_max - 0.25 * span, x_max - 0.125 * span)?;
    let late = window_mean(x_max - 0.125 * span, x_max)?;
    Ok(DecayReport {
        eps,
        x_min,
        x_max,
        integral,
        error_estimate,
        tail_growing: late > early * (1.0 + 1e-3) && late > 1e-300,
    })
}

/// Estimates `nu` from `V(x) ~ nu(nu+1)/x^2` over `window`
/// (default `[1e-4, 1e-2] / scale`).
pub fn estimate_origin_strength(pot: &Potential, window: Option<(f64, f64)>) -> Result<f64> {
    let (lo, hi) = window.unwrap_or((1e-4 / pot.scale(), 1e-2 / pot.scale()));
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::domain(format!("bad fit window [{lo}, {hi}]")));
    }
    let n = 41;
    let mut m = Vec::with_capacity(n);
    for i in 0..n {
        let x = lo * (hi / lo).powf(i as f64 / (n - 1) as f64);
        m.push(x * x * pot.eval(x)?.re);
    }
    m.sort_by(f64::total_cmp);
    let med = m[n / 2];
    if med.abs() < 1e-3 {
        return Ok(0.0);
    }
    let spread = m[n - 1] - m[0];
    if spread > 0.05 * med.abs() {
        return Err(Error::InconclusiveFit(format!(
            "x^2 V(x) varies by {spread:.3e} around {med:.3e}; not a 1/x^2 singularity"
        )));
    }
    if med < -0.25 {
        return Err(Error::InconclusiveFit(format!("x^2 V(x) -> {med:.4} is below -1/4")));
    }
    Ok(0.5 * (-1.0 + (1.0 + 4.0 * med).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const I: Complex64 = Complex64::new(0.0, 1.0);

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn catalog_point_values() {
        assert_eq!(eval_potential(&PotentialSpec::zero(), 1.0).unwrap(), c(0.0, 0.0));
        let v = eval_potential(&PotentialSpec::shifted_one_soliton(1.0, c(0.0, 0.0)).unwrap(), 0.0).unwrap();
        assert!((v - c(-2.0, 0.0)).norm() < 1e-15);
        let v = eval_potential(&PotentialSpec::closed_form_2susy(1.0, 1.0).unwrap(), 0.0).unwrap();
        assert!((v - c(-4.0, 0.0)).norm() < 1e-14);
        let v = eval_potential(&PotentialSpec::sech_well(2, 1.0).unwrap(), 0.0).unwrap();
        assert!((v - c(-6.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn closed_form_2susy_matches_direct_formula() {
        for &(a, k) in &[(1.0, 1.0), (2.0, 0.5), (1.0, -3.0)] {
            let spec = PotentialSpec::closed_form_2susy(a, k).unwrap();
            for i in 0..50 {
                let x = 0.2 * i as f64;
                let d = a * (a * x).cosh() - I * k * (a * x).sinh();
                let direct = -2.0 * a * a * (a * a + k * k) / (d * d);
                let v = eval_potential(&spec, x).unwrap();
                assert!((v - direct).norm() <= 1e-13 * direct.norm().max(1e-300), "{x}");
            }
        }
    }

    #[test]
    fn derivatives_match_closed_forms() {
        let spec = PotentialSpec::shifted_one_soliton(1.0, c(0.0, 0.0)).unwrap();
        for &x in &[0.0, 0.3, 1.7, 5.0] {
            let want = 4.0 * f64::sinh(x) / f64::cosh(x).powi(3);
            assert!((eval_potential_derivative(&spec, x, 1).unwrap() - want).norm() < 1e-13);
        }
        let spec = PotentialSpec::sech_well(1, 1.0).unwrap();
        assert!(eval_potential_derivative(&spec, 0.0, 1).unwrap().norm() < 1e-15);
        assert_eq!(eval_potential_derivative(&PotentialSpec::zero(), 2.0, 1).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn singular_origin_is_a_domain_error() {
        let spec = PotentialSpec::sinh_barrier(1.0).unwrap();
        assert!(matches!(eval_potential(&spec, 0.0), Err(Error::Domain(_))));
        assert!((eval_potential(&spec, 1.0).unwrap().re - 2.0 / 1f64.sinh().powi(2)).abs() < 1e-14);
    }

    #[test]
    fn construction_rejects_bad_parameters() {
        assert!(PotentialSpec::sech_well(0, 1.0).is_err());
        assert!(PotentialSpec::sech_well(1, -1.0).is_err());
        assert!(PotentialSpec::closed_form_2susy(1.0, 0.0).is_err());
        assert!(PotentialSpec::shifted_one_soliton(1.0, c(0.0, 1.6)).is_err());
        assert!(PotentialSpec::sinh_barrier(f64::NAN).is_err());
    }

    #[test]
    fn json_shape() {
        let spec = PotentialSpec::shifted_one_soliton(1.0, c(0.0, 0.5)).unwrap();
        let v: Value = serde_json::from_str(&spec.to_json()).unwrap();
        assert_eq!(v["kind"], "shifted_one_soliton");
        assert_eq!(v["params"]["b"], serde_json::json!([0.0, 0.5]));
        assert_eq!(v["decay_rate"], 2.0);
        assert!(v["origin_strength"].is_null());
        let back = PotentialSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn json_rejects_unknowns() {
        assert!(PotentialSpec::from_json(r#"{"kind":"square"}"#).is_err());
        assert!(PotentialSpec::from_json(r#"{"kind":"zero","params":{"a":1}}"#).is_err());
        assert!(PotentialSpec::from_json(r#"{"kind":"sech_well","params":{"a":1}}"#).is_err());
        assert!(PotentialSpec::from_json(r#"{"kind":"zero","extra":1}"#).is_err());
        assert!(PotentialSpec::from_json(r#"{"kind":"zero","decay_rate":-1}"#).is_err());
    }

    #[test]
    fn decay_check() {
        let pot = Potential::new(&PotentialSpec::shifted_one_soliton(1.0, c(0.0, 0.0)).unwrap()).unwrap();
        let r = check_exponential_decay(&pot, 1.0, 40.0, None).unwrap();
        assert!(r.integral.is_finite() && !r.tail_growing);
        let r = check_exponential_decay(&pot, 3.0, 40.0, None).unwrap();
        assert!(r.tail_growing);
        let zero = Potential::new(&PotentialSpec::zero()).unwrap();
        let r = check_exponential_decay(&zero, 5.0, 7.0, None).unwrap();
        assert_eq!(r.integral, 0.0);
        assert!(!r.tail_growing);
    }

    #[test]
    fn origin_strength_estimates() {
        let pot = |s: PotentialSpec| Potential::new(&s).unwrap();
        let nu = estimate_origin_strength(&pot(PotentialSpec::sinh_barrier(1.0).unwrap()), None).unwrap();
        assert!((nu - 1.0).abs() < 1e-3, "{nu}");
        assert_eq!(estimate_origin_strength(&pot(PotentialSpec::zero()), None).unwrap(), 0.0);
        assert_eq!(estimate_origin_strength(&pot(PotentialSpec::sech_well(2, 1.0).unwrap()), None).unwrap(), 0.0);
    }
}
