//! First- and second-order Darboux (SUSY) transformations.
//!
//! A transformed potential is a base potential plus an ordered list of steps.
//! Each step names a transformation function: a solution of the base
//! equation (Jost, regular or custom data) or the backward function of an
//! earlier step. Base solutions are mapped through every earlier block before
//! they are used, so all derivatives come from the Schrödinger equation and
//! nothing is differentiated numerically.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::potentials::{Potential, PotentialSpec};
use crate::schrodinger::{
    self, origin_cut, Solution, SolutionState, SolutionTrace, SolverOptions, SpectralParameter, TraceKind,
};
use crate::{Error, Result};

type Pair = (Complex64, Complex64);

/// Where a step's transformation function comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum Seed {
    /// `e(x, s)` of the base potential.
    Jost { s: Complex64 },
    /// The base solution with `u(0) = 0, u'(0) = 1`.
    Regular,
    /// The base solution through `(x0, y0, dy0)`.
    Custom { x0: f64, y0: Complex64, dy0: Complex64 },
    /// The backward function of an earlier step, which undoes it.
    Reciprocal { of: usize },
}

/// One Darboux step: a transformation function and its factorization energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformStep {
    pub alpha: Complex64,
    pub seed: Seed,
}

impl TransformStep {
    pub fn jost(s: Complex64) -> Self {
        TransformStep { alpha: s * s, seed: Seed::Jost { s } }
    }

    pub fn regular(alpha: Complex64) -> Self {
        TransformStep { alpha, seed: Seed::Regular }
    }

    pub fn custom(alpha: Complex64, x0: f64, y0: Complex64, dy0: Complex64) -> Self {
        TransformStep { alpha, seed: Seed::Custom { x0, y0, dy0 } }
    }

    pub fn reciprocal(of: usize, alpha: Complex64) -> Self {
        TransformStep { alpha, seed: Seed::Reciprocal { of } }
    }
}

/// Steps that undo `chain` when appended to it.
pub fn inverse_steps(chain: &[TransformStep]) -> Vec<TransformStep> {
    (0..chain.len()).rev().map(|j| TransformStep::reciprocal(j, chain[j].alpha)).collect()
}

/// Parses a JSON array of steps and checks the chain is well formed.
pub fn steps_from_json(text: &str) -> Result<Vec<TransformStep>> {
    let steps: Vec<TransformStep> = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if steps.is_empty() {
        return Err(Error::Parse("empty step list".into()));
    }
    PotentialSpec::transformed(PotentialSpec::zero(), steps.clone())?;
    Ok(steps)
}

/// How consecutive steps are grouped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pairing {
    /// Two consecutive steps with distinct energies whose functions are both
    /// available form one second-order block.
    Greedy,
    /// Every step is a first-order block.
    Sequential,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrepareOptions {
    pub solver: SolverOptions,
    /// Lower bound on `|u| / sqrt(|u|^2 + |u'|^2 / kappa^2)` away from the origin.
    pub nodeless_threshold: f64,
    pub pairing: Pairing,
    /// Seeds are integrated out to `coverage_factor / decay_rate`.
    pub coverage_factor: f64,
    /// Seeds are solved with the solver tolerances divided by this factor.
    pub seed_tightening: f64,
}

impl Default for PrepareOptions {
    fn default() -> Self {
        PrepareOptions {
            solver: SolverOptions::default(),
            nodeless_threshold: 1e-6,
            pairing: Pairing::Greedy,
            coverage_factor: 60.0,
            seed_tightening: 100.0,
        }
    }
}

// Closed formulas shared by the chain evaluator and the trace-level maps.

fn one_potential(v: Complex64, alpha: Complex64, u: Pair) -> Complex64 {
    let w = u.1 / u.0;
    v - 2.0 * ((v - alpha) - w * w)
}

fn one_map(e: Complex64, alpha: Complex64, u: Pair, psi: Pair) -> Pair {
    let w = u.1 / u.0;
    (-psi.1 + w * psi.0, (e - alpha - w * w) * psi.0 + w * psi.1)
}

fn reciprocal(u: Pair) -> Pair {
    (1.0 / u.0, -u.1 / (u.0 * u.0))
}

fn wr(f: Pair, g: Pair) -> Complex64 {
    f.0 * g.1 - f.1 * g.0
}

/// `W`, `W'`, `W''` for two solutions at energies `a1`, `a2`.
fn w_jet(a1: Complex64, u1: Pair, a2: Complex64, u2: Pair) -> [Complex64; 3] {
    let d = a1 - a2;
    [wr(u1, u2), d * u1.0 * u2.0, d * (u1.1 * u2.0 + u1.0 * u2.1)]
}

fn two_potential(v: Complex64, a1: Complex64, u1: Pair, a2: Complex64, u2: Pair) -> Complex64 {
    let [w, w1, w2] = w_jet(a1, u1, a2, u2);
    let l = w1 / w;
    v - 2.0 * (w2 / w - l * l)
}

fn two_map_fi1(e: Complex64, a1: Complex64, u1: Pair, a2: Complex64, u2: Pair, psi: Pair) -> Pair {
    let [w, w1, _] = w_jet(a1, u1, a2, u2);
    let q = wr(u2, psi);
    let r = q / w;
    let dr = ((a2 - e) * u2.0 * psi.0 * w - q * w1) / (w * w);
    let d = a1 - a2;
    ((e - a2) * psi.0 + d * r * u1.0, (e - a2) * psi.1 + d * (dr * u1.0 + r * u1.1))
}

fn two_map_fi2(e: Complex64, a1: Complex64, u1: Pair, a2: Complex64, u2: Pair, psi: Pair) -> Pair {
    let [w, w1, _] = w_jet(a1, u1, a2, u2);
    let q = wr(u1, psi);
    let r = q / w;
    let dr = ((a1 - e) * u1.0 * psi.0 * w - q * w1) / (w * w);
    let d = a1 - a2;
    ((e - a1) * psi.0 + d * r * u2.0, (e - a1) * psi.1 + d * (dr * u2.0 + r * u2.1))
}

/// Backward functions `(phi_a1, phi_a2) = (u2 / W, u1 / W)`.
fn two_reciprocals(a1: Complex64, u1: Pair, a2: Complex64, u2: Pair) -> (Pair, Pair) {
    let [w, w1, _] = w_jet(a1, u1, a2, u2);
    let q = |u: Pair| (u.0 / w, (u.1 * w - u.0 * w1) / (w * w));
    (q(u2), q(u1))
}

fn rho(y: Complex64, dy: Complex64, kappa: f64) -> f64 {
    let a = y.norm();
    let b = dy.norm() / kappa;
    let r = a / a.hypot(b);
    if r.is_finite() {
        r
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Block {
    One(usize),
    Two(usize, usize),
}

/// Smallest local-modulus measure of one block's denominator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockMinimum {
    pub first_step: usize,
    pub order: usize,
    pub value: f64,
    pub x: f64,
}

/// A validated, evaluable chain.
#[derive(Debug)]
pub(crate) struct Chain {
    base: Potential,
    steps: Vec<TransformStep>,
    seeds: Vec<Option<Solution>>,
    blocks: Vec<Block>,
    born: Vec<usize>,
    kappa: Vec<f64>,
    coverage: f64,
    decay_rate: f64,
    minima: Vec<BlockMinimum>,
}

fn stage(i: usize, e: Error) -> Error {
    match e {
        Error::Stage { .. } => e,
        other => Error::Stage { stage: i, source: Box::new(other) },
    }
}

impl Chain {
    pub(crate) fn prepare(base: Potential, steps: &[TransformStep], opts: &PrepareOptions) -> Result<Chain> {
        let mut eps = base.decay_rate();
        for st in steps {
            let r = (-st.alpha).sqrt().re;
            if r > 0.0 {
                eps = eps.min(2.0 * r);
            }
        }
        let coverage = (opts.coverage_factor / eps).min(base.coverage());
        let scale = base.scale();
        let lower = if base.is_singular() { 1e-5 / scale } else { 0.0 };
        // Seeds are computed once; near a vanishing seed w^2 magnifies their
        // absolute error, so they get tighter tolerances than a single solve.
        let seed_opts = opts.solver.tightened(opts.seed_tightening);
        let seeds = steps
            .par_iter()
            .enumerate()
            .map(|(i, st)| seed_solution(&base, st, lower, coverage, &seed_opts).map_err(|e| stage(i, e)))
            .collect::<Result<Vec<_>>>()?;

        let mut blocks = Vec::new();
        let mut born = vec![0usize; steps.len()];
        let mut block_of = vec![0usize; steps.len()];
        let mut i = 0;
        while i < steps.len() {
            for j in [i, i + 1] {
                if let Some(Seed::Reciprocal { of }) = steps.get(j).map(|s| &s.seed) {
                    if *of < i {
                        born[j] = block_of[*of] + 1;
                    } else {
                        born[j] = usize::MAX;
                    }
                }
            }
            let done = blocks.len();
            let pair = opts.pairing == Pairing::Greedy
                && i + 1 < steps.len()
                && born[i + 1] <= done
                && (steps[i].alpha - steps[i + 1].alpha).norm() > 1e-12 * steps[i].alpha.norm().max(1.0);
            if pair {
                block_of[i] = done;
                block_of[i + 1] = done;
                blocks.push(Block::Two(i, i + 1));
                i += 2;
            } else {
                block_of[i] = done;
                blocks.push(Block::One(i));
                i += 1;
            }
        }
        let kappa = steps.iter().map(|s| s.alpha.norm().sqrt().max(scale)).collect();
        let mut chain = Chain {
            base,
            steps: steps.to_vec(),
            seeds,
            blocks,
            born,
            kappa,
            coverage,
            decay_rate: eps,
            minima: Vec::new(),
        };
        chain.minima = chain.validate(opts)?;
        Ok(chain)
    }

    pub(crate) fn decay_rate(&self) -> f64 {
        self.decay_rate
    }

    pub(crate) fn coverage(&self) -> f64 {
        self.coverage
    }

    pub(crate) fn minima(&self) -> &[BlockMinimum] {
        &self.minima
    }

    pub(crate) fn eval(&self, x: f64) -> Result<Complex64> {
        if x > self.coverage {
            // The corrections decay at least as fast as the base beyond here.
            return self.base.eval(x);
        }
        Ok(self.eval_full(x, None)?.0)
    }

    /// V at `x`, and optionally the local modulus measure of every block.
    #[allow(clippy::needless_range_loop)]
    fn eval_full(&self, x: f64, mut rho_out: Option<&mut Vec<f64>>) -> Result<(Complex64, Vec<Pair>)> {
        let n = self.steps.len();
        let mut v = self.base.eval(x)?;
        let mut funcs: Vec<Option<Pair>> = Vec::with_capacity(n);
        for seed in &self.seeds {
            funcs.push(match seed {
                Some(sol) => {
                    let st = sol.state(x)?;
                    Some((st.y, st.dy))
                }
                None => None,
            });
        }
        let alpha = |j: usize| self.steps[j].alpha;
        for (b, block) in self.blocks.iter().enumerate() {
            let missing = |j: usize| Error::Inconsistent(format!("step {j} has no transformation function at block {b}"));
            match *block {
                Block::One(i) => {
                    let u = funcs[i].take().ok_or_else(|| missing(i))?;
                    if let Some(r) = rho_out.as_deref_mut() {
                        r.push(rho(u.0, u.1, self.kappa[i]));
                    }
                    let a = alpha(i);
                    for j in i + 1..n {
                        if let Some(psi) = funcs[j] {
                            funcs[j] = Some(one_map(alpha(j), a, u, psi));
                        }
                    }
                    v = one_potential(v, a, u);
                    for j in i + 1..n {
                        if self.born[j] == b + 1 && funcs[j].is_none() {
                            funcs[j] = Some(reciprocal(u));
                        }
                    }
                }
                Block::Two(i, k) => {
                    let u1 = funcs[i].take().ok_or_else(|| missing(i))?;
                    let u2 = funcs[k].take().ok_or_else(|| missing(k))?;
                    let (a1, a2) = (alpha(i), alpha(k));
                    if let Some(r) = rho_out.as_deref_mut() {
                        let [w, w1, _] = w_jet(a1, u1, a2, u2);
                        r.push(rho(w, w1, self.kappa[i].max(self.kappa[k])));
                    }
                    for j in k + 1..n {
                        if let Some(psi) = funcs[j] {
                            funcs[j] = Some(two_map_fi1(alpha(j), a1, u1, a2, u2, psi));
                        }
                    }
                    v = two_potential(v, a1, u1, a2, u2);
                    let (p1, p2) = two_reciprocals(a1, u1, a2, u2);
                    for j in k + 1..n {
                        if self.born[j] == b + 1 && funcs[j].is_none() {
                            if let Seed::Reciprocal { of } = self.steps[j].seed {
                                funcs[j] = Some(if of == i { p1 } else { p2 });
                            }
                        }
                    }
                }
            }
        }
        Ok((v, funcs.into_iter().flatten().collect()))
    }

    fn rhos(&self, x: f64) -> Result<Vec<f64>> {
        let mut r = Vec::with_capacity(self.blocks.len());
        self.eval_full(x, Some(&mut r))?;
        Ok(r)
    }

    fn validate(&self, opts: &PrepareOptions) -> Result<Vec<BlockMinimum>> {
        if self.blocks.is_empty() {
            return Ok(Vec::new());
        }
        let x_lo = if self.base.is_singular() { origin_cut(&self.base) } else { 0.0 };
        let kmax = self.kappa.iter().copied().fold(0.0, f64::max);
        let n = ((self.coverage * kmax * 20.0) as usize).clamp(4000, 200_000);
        let grid = schrodinger::uniform_grid(x_lo, self.coverage, n);
        let table = grid.par_iter().map(|&x| self.rhos(x)).collect::<Result<Vec<_>>>()?;
        let mut minima = Vec::new();
        for (b, block) in self.blocks.iter().enumerate() {
            let (first, order) = match *block {
                Block::One(i) => (i, 1),
                Block::Two(i, _) => (i, 2),
            };
            let col: Vec<f64> = table.iter().map(|r| r[b]).collect();
            let mut best = BlockMinimum { first_step: first, order, value: f64::INFINITY, x: f64::NAN };
            for i in 1..n {
                let local = col[i] <= col[i - 1] && (i == n - 1 || col[i] <= col[i + 1]);
                if !local {
                    continue;
                }
                let (x, r) = if i == n - 1 {
                    (grid[i], col[i])
                } else {
                    golden_min(|x| self.rhos(x).map(|r| r[b]).unwrap_or(0.0), grid[i - 1], grid[i + 1])
                };
                if r < best.value {
                    best = BlockMinimum { first_step: first, order, value: r, x };
                }
            }
            if best.value < opts.nodeless_threshold {
                let what = if order == 1 { "transformation function" } else { "Wronskian" };
                return Err(stage(
                    first,
                    Error::degenerate(best.x, format!("{what} of block {b} nearly vanishes (relative modulus {:.2e})", best.value)),
                ));
            }
            minima.push(best);
        }
        Ok(minima)
    }
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..60 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
        if (b - a) < 1e-13 * b.abs().max(1.0) {
            break;
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

fn seed_solution(base: &Potential, step: &TransformStep, lower: f64, upper: f64, opts: &SolverOptions) -> Result<Option<Solution>> {
    Ok(match &step.seed {
        Seed::Jost { s } => Some(schrodinger::jost(base, *s, lower, opts)?),
        Seed::Regular => Some(schrodinger::regular(base, step.alpha, upper, opts)?),
        Seed::Custom { x0, y0, dy0 } => {
            let from = SolutionState { x: *x0, y: *y0, dy: *dy0 };
            let lo = if base.is_singular() { origin_cut(base) } else { 0.0 };
            Some(schrodinger::custom(base, step.alpha, from, lo.min(*x0), upper.max(*x0), opts)?)
        }
        Seed::Reciprocal { .. } => None,
    })
}

/// The transformation function of `step` as a solution of the untransformed
/// equation, sampled on `grid`. Solved with the same tightened tolerances a
/// chain uses for its seeds.
pub fn build_transformation_function(pot: &Potential, step: &TransformStep, grid: &[f64]) -> Result<SolutionTrace> {
    build_transformation_function_with(pot, step, grid, &PrepareOptions::default())
}

pub fn build_transformation_function_with(
    pot: &Potential,
    step: &TransformStep,
    grid: &[f64],
    opts: &PrepareOptions,
) -> Result<SolutionTrace> {
    let lower = grid.iter().copied().fold(f64::INFINITY, f64::min);
    let upper = grid.iter().copied().fold(0.0, f64::max);
    let kind = match &step.seed {
        Seed::Jost { .. } => TraceKind::JostPlus,
        Seed::Regular => TraceKind::Regular,
        Seed::Custom { x0, y0, dy0 } => TraceKind::Custom { x0: *x0, y0: *y0, dy0: *dy0 },
        Seed::Reciprocal { .. } => {
            return Err(Error::Unsupported("a reciprocal seed exists only inside a chain".into()));
        }
    };
    let solver = opts.solver.tightened(opts.seed_tightening);
    let sol = seed_solution(pot, step, lower, upper, &solver)?.expect("non-reciprocal seed");
    let parameter = match step.seed {
        Seed::Jost { s } => SpectralParameter::new(s),
        _ => SpectralParameter::from_energy(step.alpha),
    };
    Ok(SolutionTrace { parameter, kind, states: sol.sample(grid)? })
}

/// Applies `steps` to `spec` and checks that every denominator is nodeless.
/// Failures carry the index of the first step of the offending block.
pub fn chain_transform(spec: &PotentialSpec, steps: &[TransformStep]) -> Result<PotentialSpec> {
    chain_transform_with(spec, steps, &PrepareOptions::default())
}

pub fn chain_transform_with(spec: &PotentialSpec, steps: &[TransformStep], opts: &PrepareOptions) -> Result<PotentialSpec> {
    if steps.is_empty() {
        return Ok(spec.clone());
    }
    let out = PotentialSpec::transformed(spec.clone(), steps.to_vec())?;
    Potential::with_options(&out, opts)?;
    Ok(out)
}

/// `V1 = V0 - 2 (log u)''`.
pub fn susy1_potential(spec: &PotentialSpec, step: &TransformStep) -> Result<PotentialSpec> {
    if matches!(step.seed, Seed::Reciprocal { .. }) {
        return Err(Error::domain("a first-order step on its own cannot use a reciprocal seed"));
    }
    chain_transform(spec, std::slice::from_ref(step))
}

/// `V2 = V0 - 2 (log W(u1, u2))''`.
pub fn susy2_potential(spec: &PotentialSpec, step1: &TransformStep, step2: &TransformStep) -> Result<PotentialSpec> {
    if (step1.alpha - step2.alpha).norm() <= 1e-12 * step1.alpha.norm().max(1.0) {
        return Err(Error::domain("second-order step needs distinct factorization energies"));
    }
    if matches!(step1.seed, Seed::Reciprocal { .. }) || matches!(step2.seed, Seed::Reciprocal { .. }) {
        return Err(Error::domain("a second-order step on its own cannot use reciprocal seeds"));
    }
    chain_transform(spec, &[step1.clone(), step2.clone()])
}

fn same_grid(a: &SolutionTrace, b: &SolutionTrace) -> Result<()> {
    if a.states.len() != b.states.len() || a.states.iter().zip(&b.states).any(|(p, q)| p.x != q.x) {
        return Err(Error::domain("traces are sampled on different grids"));
    }
    Ok(())
}

fn pair(s: &SolutionState) -> Pair {
    (s.y, s.dy)
}

fn mapped(parameter: SpectralParameter, grid: &[SolutionState], f: impl Fn(usize) -> Pair) -> SolutionTrace {
    let states = grid
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let (y, dy) = f(i);
            SolutionState { x: s.x, y, dy }
        })
        .collect();
    SolutionTrace { parameter, kind: TraceKind::Mapped, states }
}

fn check_finite(t: SolutionTrace, what: &str) -> Result<SolutionTrace> {
    match t.states.iter().find(|s| !(s.y.norm().is_finite() && s.dy.norm().is_finite())) {
        Some(s) => Err(Error::degenerate(s.x, format!("{what} vanishes on the grid"))),
        None => Ok(t),
    }
}

/// Maps a solution at energy `E` through the first-order step built on `u`.
/// When `E = alpha` the backward function `1/u` is returned instead.
pub fn susy1_map(psi: &SolutionTrace, u: &SolutionTrace, alpha: Complex64) -> Result<SolutionTrace> {
    same_grid(psi, u)?;
    let e = psi.energy();
    let out = if (e - alpha).norm() <= 1e-12 * alpha.norm().max(1.0) {
        mapped(psi.parameter, &u.states, |i| reciprocal(pair(&u.states[i])))
    } else {
        mapped(psi.parameter, &psi.states, |i| one_map(e, alpha, pair(&u.states[i]), pair(&psi.states[i])))
    };
    check_finite(out, "transformation function")
}

/// Which second-order map to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MapForm {
    Fi1,
    Fi2,
    /// Backward function at `alpha1`, `u2 / W`.
    Alpha1,
    /// Backward function at `alpha2`, `u1 / W`.
    Alpha2,
}

/// Maps through the second-order step built on `(u1, alpha1)`, `(u2, alpha2)`.
/// For `Alpha1` / `Alpha2` the input `psi` only supplies the grid.
pub fn susy2_map(
    psi: &SolutionTrace,
    u1: &SolutionTrace,
    alpha1: Complex64,
    u2: &SolutionTrace,
    alpha2: Complex64,
    form: MapForm,
) -> Result<SolutionTrace> {
    same_grid(psi, u1)?;
    same_grid(psi, u2)?;
    let e = psi.energy();
    let near = |a: Complex64| (e - a).norm() <= 1e-12 * a.norm().max(1.0);
    let (p1, p2) = (|i: usize| pair(&u1.states[i]), |i: usize| pair(&u2.states[i]));
    let out = match form {
        MapForm::Fi1 | MapForm::Fi2 => {
            if near(alpha1) || near(alpha2) {
                return Err(Error::domain("energy equals a factorization energy; use the Alpha1/Alpha2 forms"));
            }
            let f = if form == MapForm::Fi1 { two_map_fi1 } else { two_map_fi2 };
            mapped(psi.parameter, &psi.states, |i| f(e, alpha1, p1(i), alpha2, p2(i), pair(&psi.states[i])))
        }
        MapForm::Alpha1 => mapped(SpectralParameter::from_energy(alpha1), &psi.states, |i| {
            two_reciprocals(alpha1, p1(i), alpha2, p2(i)).0
        }),
        MapForm::Alpha2 => mapped(SpectralParameter::from_energy(alpha2), &psi.states, |i| {
            two_reciprocals(alpha1, p1(i), alpha2, p2(i)).1
        }),
    };
    check_finite(out, "Wronskian")
}

/// `W(u1, u2)` along a grid with its nodeless verdict.
#[derive(Debug, Clone, Serialize)]
pub struct WronskianProfile {
    pub grid: Vec<f64>,
    pub values: Vec<Complex64>,
    /// Smallest `|W|` over grid points with `x > 0`.
    pub min_modulus: f64,
    pub min_location: f64,
    /// Smallest `|W| / sqrt(|W|^2 + |W'|^2 / kappa^2)` over `x > 0`.
    pub min_relative: f64,
    /// `W` at the first grid point.
    pub boundary_value: Complex64,
    /// Largest relative mismatch between a difference quotient of `W` and
    /// `(alpha1 - alpha2) u1 u2` over interior points.
    pub derivative_identity_residual: f64,
    pub validated: bool,
}

pub fn wronskian_profile(u1: &SolutionTrace, u2: &SolutionTrace, alpha1: Complex64, alpha2: Complex64) -> Result<WronskianProfile> {
    wronskian_profile_with(u1, u2, alpha1, alpha2, 1e-6)
}

pub fn wronskian_profile_with(
    u1: &SolutionTrace,
    u2: &SolutionTrace,
    alpha1: Complex64,
    alpha2: Complex64,
    threshold: f64,
) -> Result<WronskianProfile> {
    same_grid(u1, u2)?;
    let n = u1.states.len();
    if n < 3 {
        return Err(Error::domain("Wronskian profile needs at least three grid points"));
    }
    let grid = u1.grid();
    let jets: Vec<[Complex64; 3]> =
        (0..n).map(|i| w_jet(alpha1, pair(&u1.states[i]), alpha2, pair(&u2.states[i]))).collect();
    let values: Vec<Complex64> = jets.iter().map(|j| j[0]).collect();
    let kappa = alpha1.norm().sqrt().max(alpha2.norm().sqrt()).max(1.0);
    let (mut min_modulus, mut min_location, mut min_relative) = (f64::INFINITY, f64::NAN, f64::INFINITY);
    for (i, j) in jets.iter().enumerate() {
        if grid[i] <= 0.0 {
            continue;
        }
        if j[0].norm() < min_modulus {
            min_modulus = j[0].norm();
            min_location = grid[i];
        }
        min_relative = min_relative.min(rho(j[0], j[1], kappa));
    }
    let mut resid: f64 = 0.0;
    for i in 1..n - 1 {
        let h = grid[i + 1] - grid[i];
        let even = |j: usize| (grid[j + 1] - grid[j] - h).abs() <= 1e-9 * h;
        let v = |j: usize| values[j];
        let fd = if i >= 2 && i + 2 < n && (i - 2..i + 2).all(even) {
            (v(i - 2) - 8.0 * v(i - 1) + 8.0 * v(i + 1) - v(i + 2)) / (12.0 * h)
        } else if i == 1 && n >= 5 && (0..4).all(even) {
            (-3.0 * v(0) - 10.0 * v(1) + 18.0 * v(2) - 6.0 * v(3) + v(4)) / (12.0 * h)
        } else if i + 2 == n && n >= 5 && (n - 5..n - 1).all(even) {
            (3.0 * v(n - 1) + 10.0 * v(n - 2) - 18.0 * v(n - 3) + 6.0 * v(n - 4) - v(n - 5)) / (12.0 * h)
        } else {
            (values[i + 1] - values[i - 1]) / (grid[i + 1] - grid[i - 1])
        };
        let scale = jets[i][1].norm().max(1e-6 * values[i].norm()).max(1e-300);
        resid = resid.max((fd - jets[i][1]).norm() / scale);
    }
    Ok(WronskianProfile {
        boundary_value: values[0],
        validated: min_relative > threshold && min_modulus > 0.0,
        grid,
        values,
        min_modulus,
        min_location,
        min_relative,
        derivative_identity_residual: resid,
    })
}

/// Outcome of [`remove_spectral_singularity`].
#[derive(Debug, Clone, Serialize)]
pub struct Removal {
    pub spec: PotentialSpec,
    pub k0: f64,
    /// `A(k0)` of the input potential.
    pub jost_at_k0: Complex64,
    /// `|A'(k0)|`, by central difference.
    pub jost_slope: f64,
    /// False when the slope is too small to call the zero simple.
    pub simple: bool,
}

/// Removes the spectral singularity at real `k0` with a first-order step
/// built on the Jost solution `e(x, k0)`, which vanishes at the origin.
pub fn remove_spectral_singularity(pot: &Potential, k0: f64) -> Result<Removal> {
    remove_spectral_singularity_with(pot, k0, &PrepareOptions::default())
}

pub fn remove_spectral_singularity_with(pot: &Potential, k0: f64, opts: &PrepareOptions) -> Result<Removal> {
    if !(k0.is_finite() && k0 != 0.0) {
        return Err(Error::domain("k0 must be real and nonzero"));
    }
    let s = Complex64::new(k0, 0.0);
    let a = schrodinger::jost_function_with(pot, s, &opts.solver)?.a;
    if a.norm() >= 1e-6 {
        return Err(Error::Precondition(format!("no spectral singularity at k = {k0}: |A| = {:.3e}", a.norm())));
    }
    let h = 1e-5 * k0.abs().max(1.0);
    let ap = schrodinger::jost_function_with(pot, s + h, &opts.solver)?.a;
    let am = schrodinger::jost_function_with(pot, s - h, &opts.solver)?.a;
    let slope = ((ap - am) / (2.0 * h)).norm();
    let spec = chain_transform_with(pot.spec(), &[TransformStep::jost(s)], opts).map_err(|e| match e.root() {
        Error::Degenerate { x, reason } => {
            Error::degenerate(*x, format!("singularity eigenfunction has a node, cannot remove: {reason}"))
        }
        _ => e,
    })?;
    Ok(Removal { spec, k0, jost_at_k0: a, jost_slope: slope, simple: slope > 1e-4 })
}

/// Determinant Wronskian of up to four base solutions, rows ordered by
/// derivative. Higher derivatives come from `u'' = (V - alpha) u` expanded
/// with the analytic derivatives of a catalog potential.
pub fn crum_wronskian_oracle(spec: &PotentialSpec, seeds: &[TransformStep], grid: &[f64]) -> Result<Vec<Complex64>> {
    if !spec.is_catalog() {
        return Err(Error::Unsupported("the Crum oracle needs analytic potential derivatives".into()));
    }
    if seeds.is_empty() || seeds.len() > 4 {
        return Err(Error::domain(format!("the Crum oracle takes 1 to 4 seeds, got {}", seeds.len())));
    }
    let pot = Potential::new(spec)?;
    let traces = seeds
        .iter()
        .map(|st| build_transformation_function(&pot, st, grid))
        .collect::<Result<Vec<_>>>()?;
    let n = seeds.len();
    grid.iter()
        .enumerate()
        .map(|(g, &x)| {
            let v = pot.eval(x)?;
            let (v1, v2) = if n > 3 {
                (pot.derivative(x, 1)?, pot.derivative(x, 2)?)
            } else if n > 2 {
                (pot.derivative(x, 1)?, Complex64::new(0.0, 0.0))
            } else {
                Default::default()
            };
            let mut m = vec![vec![Complex64::new(0.0, 0.0); n]; n];
            for (c, (tr, st)) in traces.iter().zip(seeds).enumerate() {
                let (u, du) = (tr.states[g].y, tr.states[g].dy);
                let q = v - st.alpha;
                let d = [u, du, q * u, v1 * u + q * du];
                // u'''' = V'' u + 2 V' u' + (V - alpha)^2 u
                let d4 = v2 * u + 2.0 * v1 * du + q * q * u;
                for (r, row) in m.iter_mut().enumerate() {
                    row[c] = if r < 4 { d[r] } else { d4 };
                }
            }
            Ok(det(m))
        })
        .collect()
}

#[allow(clippy::needless_range_loop)]
fn det(mut m: Vec<Vec<Complex64>>) -> Complex64 {
    let n = m.len();
    let mut acc = Complex64::new(1.0, 0.0);
    for c in 0..n {
        let p = (c..n).max_by(|&a, &b| m[a][c].norm().total_cmp(&m[b][c].norm())).unwrap();
        if m[p][c].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if p != c {
            m.swap(p, c);
            acc = -acc;
        }
        acc *= m[c][c];
        for r in c + 1..n {
            let f = m[r][c] / m[c][c];
            for k in c..n {
                let t = m[c][k];
                m[r][k] -= f * t;
            }
        }
    }
    acc
}

/// Origin strength of a prepared potential, as used for its Jost function.
pub fn estimate_strength(pot: &Potential) -> Result<f64> {
    crate::potentials::estimate_origin_strength(pot, None)
}

/// Per-block denominators' smallest relative modulus found during
/// validation, for a prepared transformed potential.
pub fn block_minima(pot: &Potential) -> Vec<BlockMinimum> {
    pot.chain().map(|c| c.minima().to_vec()).unwrap_or_default()
}
