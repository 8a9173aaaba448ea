//! Periodic quadrature, grids, `L^p` norms and the modulus of smoothness.
//!
//! All averages use the normalized measure `dt / 2π` on `[-π, π)`.

mod signal;

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase::PhaseParam;

pub use signal::{unwarp_signal, warp_signal, Signal, Smoothness};

const TWO_PI: f64 = 2.0 * PI;

/// Uniform periodic grid `t_j = -π + offset + 2πj/N`, `j = 0..N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    points: usize,
    offset: f64,
}

impl GridSpec {
    pub const MIN_POINTS: usize = 16;
    pub const DEFAULT_POINTS: usize = 4096;
    pub const MAX_POINTS: usize = 1 << 20;

    pub fn new(points: usize) -> Result<Self> {
        if points < Self::MIN_POINTS {
            return Err(Error::GridTooSmall {
                points,
                min: Self::MIN_POINTS,
            });
        }
        Ok(Self { points, offset: 0.0 })
    }

    /// Grid of `points` nodes rounded up to a power of two.
    pub fn pow2(points: usize) -> Self {
        Self {
            points: points.max(Self::MIN_POINTS).next_power_of_two(),
            offset: 0.0,
        }
    }

    pub fn with_offset(mut self, offset: f64) -> Self {
        self.offset = offset;
        self
    }

    /// Shift the grid so that `t` is a node.
    pub fn aligned_to(self, t: f64) -> Self {
        let h = self.spacing();
        let rel = t + PI;
        let offset = rel - h * (rel / h).floor();
        self.with_offset(offset)
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn spacing(&self) -> f64 {
        TWO_PI / self.points as f64
    }

    pub fn start(&self) -> f64 {
        -PI + self.offset
    }

    pub fn node(&self, j: usize) -> f64 {
        self.start() + TWO_PI * j as f64 / self.points as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(move |j| self.node(j))
    }

    pub fn is_pow2(&self) -> bool {
        self.points.is_power_of_two()
    }

    /// Same offset, twice the points.
    pub fn refined(&self) -> Self {
        Self {
            points: self.points * 2,
            offset: self.offset,
        }
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            points: Self::DEFAULT_POINTS,
            offset: 0.0,
        }
    }
}

/// Neumaier-compensated complex accumulator.
#[derive(Default, Clone, Copy)]
pub(crate) struct Accumulator {
    sum: Complex64,
    comp: Complex64,
}

impl Accumulator {
    pub fn add(&mut self, v: Complex64) {
        self.sum.re = neumaier(self.sum.re, v.re, &mut self.comp.re);
        self.sum.im = neumaier(self.sum.im, v.im, &mut self.comp.im);
    }

    pub fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

fn neumaier(sum: f64, v: f64, comp: &mut f64) -> f64 {
    let t = sum + v;
    if sum.abs() >= v.abs() {
        *comp += (sum - t) + v;
    } else {
        *comp += (v - t) + sum;
    }
    t
}

/// `(1/N) Σ_j f(t_j) ≈ (1/2π) ∫_{-π}^{π} f` by the periodic trapezoid rule.
pub fn quad_periodic<F>(f: F, grid: &GridSpec) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let mut acc = Accumulator::default();
    for (index, t) in grid.nodes().enumerate() {
        let v = f(t);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite { index, t });
        }
        acc.add(v);
    }
    Ok(acc.value() / grid.points() as f64)
}

/// Real-valued convenience wrapper around [`quad_periodic`].
pub fn quad_periodic_real<F>(f: F, grid: &GridSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    quad_periodic(|t| Complex64::new(f(t), 0.0), grid).map(|z| z.re)
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    Ok(())
}

/// Sup-norm estimate: grid maximum refined by a local golden-section search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupEstimate {
    pub value: f64,
    pub argmax: f64,
    /// Gain of the local polish over the raw grid maximum.
    pub tolerance: f64,
}

/// Maximize `f` on `[lo, hi]` by golden-section search.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, iters: usize) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc >= fd {
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
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// `sup |f|` from samples on `grid` plus golden-section polish around the grid argmax.
pub fn sup_norm_with<F>(f: F, grid: &GridSpec) -> Result<SupEstimate>
where
    F: Fn(f64) -> Complex64,
{
    let h = grid.spacing();
    let mut best = (0usize, f64::NEG_INFINITY);
    for (index, t) in grid.nodes().enumerate() {
        let v = f(t).norm();
        if !v.is_finite() {
            return Err(Error::NonFinite { index, t });
        }
        if v > best.1 {
            best = (index, v);
        }
    }
    let center = grid.node(best.0);
    let (x, fx) = golden_max(|t| f(t).norm(), center - h, center + h, 60);
    if fx > best.1 {
        Ok(SupEstimate {
            value: fx,
            argmax: x,
            tolerance: fx - best.1,
        })
    } else {
        Ok(SupEstimate {
            value: best.1,
            argmax: center,
            tolerance: 0.0,
        })
    }
}

/// `‖f‖_p = ((1/2π)∫|f|^p)^{1/p}` for a rule `f`; `p = ∞` gives the polished sup.
pub fn lp_norm_with<F>(f: F, p: f64, grid: &GridSpec) -> Result<f64>
where
    F: Fn(f64) -> Complex64,
{
    check_exponent(p)?;
    if p.is_infinite() {
        return sup_norm_with(f, grid).map(|s| s.value);
    }
    let mean = quad_periodic_real(|t| f(t).norm().powf(p), grid)?;
    Ok(mean.powf(p.recip()))
}

/// `L^p` norm of a signal (`p = f64::INFINITY` for the essential sup).
pub fn lp_norm(f: &Signal, p: f64, grid: &GridSpec) -> Result<f64> {
    if p.is_infinite() {
        check_exponent(p)?;
        return sup_norm_with(|t| f.eval(t), grid).map(|s| s.value);
    }
    lp_norm_with(|t| f.eval_node(t), p, grid)
}

/// Sup-norm of a signal with its tolerance estimate.
pub fn sup_norm(f: &Signal, grid: &GridSpec) -> Result<SupEstimate> {
    sup_norm_with(|t| f.eval(t), grid)
}

/// Default number of shifts used by [`modulus_smoothness`].
pub const DEFAULT_SHIFTS: usize = 256;

/// `ω(f, t)_p = sup_{0 ≤ h ≤ t} ‖f(· + h) - f‖_p`, estimated over `shifts`
/// equally spaced `h ∈ (0, t]`. The result is a lower bound of the true sup.
pub fn modulus_smoothness(
    f: &Signal,
    t: f64,
    p: f64,
    grid: &GridSpec,
    shifts: usize,
) -> Result<f64> {
    modulus_smoothness_with(|x| f.eval(x), t, p, grid, shifts)
}

pub fn modulus_smoothness_with<F>(
    f: F,
    t: f64,
    p: f64,
    grid: &GridSpec,
    shifts: usize,
) -> Result<f64>
where
    F: Fn(f64) -> Complex64,
{
    check_exponent(p)?;
    if !(t > 0.0 && t <= TWO_PI) {
        return Err(Error::OutOfRange(format!("modulus step t = {t} not in (0, 2π]")));
    }
    if shifts == 0 {
        return Err(Error::OutOfRange("shifts must be positive".into()));
    }
    let base: Vec<Complex64> = grid.nodes().map(&f).collect();
    let n = grid.points();
    let mut best = 0.0f64;
    let mut best_at = (0.0, 0usize);
    for i in 1..=shifts {
        let h = t * i as f64 / shifts as f64;
        if p.is_infinite() {
            for (j, x) in grid.nodes().enumerate() {
                let d = (f(x + h) - base[j]).norm();
                if d > best {
                    best = d;
                    best_at = (h, j);
                }
            }
        } else {
            let s: f64 = grid
                .nodes()
                .enumerate()
                .map(|(j, x)| (f(x + h) - base[j]).norm().powf(p))
                .sum();
            best = best.max((s / n as f64).powf(p.recip()));
        }
    }
    if p.is_infinite() && best > 0.0 {
        let (h, j) = best_at;
        let x0 = grid.node(j);
        let sp = grid.spacing();
        let (_, polished) = golden_max(|x| (f(x + h) - f(x)).norm(), x0 - sp, x0 + sp, 50);
        best = best.max(polished);
    }
    Ok(best)
}

/// Doubling schedule for self-validating computations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Refinement {
    pub start: usize,
    pub tol: f64,
    pub max: usize,
}

impl Default for Refinement {
    fn default() -> Self {
        Self {
            start: GridSpec::DEFAULT_POINTS,
            tol: 1e-9,
            max: GridSpec::MAX_POINTS,
        }
    }
}

/// Outcome of [`refine`].
#[derive(Debug, Clone)]
pub struct Refined<T> {
    pub value: T,
    pub grid: GridSpec,
    pub converged: bool,
}

/// Double the grid until two successive results are within `cfg.tol`.
pub fn refine<T, C, D>(cfg: Refinement, offset: f64, mut compute: C, distance: D) -> Result<Refined<T>>
where
    C: FnMut(&GridSpec) -> Result<T>,
    D: Fn(&T, &T) -> f64,
{
    let mut grid = GridSpec::pow2(cfg.start).with_offset(offset);
    let mut prev = compute(&grid)?;
    while grid.points() < cfg.max {
        let next_grid = grid.refined();
        let next = compute(&next_grid)?;
        let d = distance(&prev, &next);
        grid = next_grid;
        prev = next;
        if d <= cfg.tol {
            return Ok(Refined {
                value: prev,
                grid,
                converged: true,
            });
        }
    }
    Ok(Refined {
        value: prev,
        grid,
        converged: false,
    })
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(m, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(m: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

type PlanCache = (FftPlanner<f64>, HashMap<(usize, bool), Arc<dyn Fft<f64>>>);

thread_local! {
    static PLANS: RefCell<PlanCache> =
        RefCell::new((FftPlanner::new(), HashMap::new()));
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|cell| {
        let mut guard = cell.borrow_mut();
        let (planner, cache) = &mut *guard;
        cache
            .entry((n, inverse))
            .or_insert_with(|| {
                if inverse {
                    planner.plan_fft_inverse(n)
                } else {
                    planner.plan_fft_forward(n)
                }
            })
            .clone()
    })
}

/// In-place unnormalized forward DFT `X_k = Σ_j x_j e^{-2πijk/N}`.
pub(crate) fn fft_forward(buf: &mut [Complex64]) {
    plan(buf.len(), false).process(buf);
}

/// In-place unnormalized inverse DFT `x_j = Σ_k X_k e^{+2πijk/N}`.
pub(crate) fn fft_inverse(buf: &mut [Complex64]) {
    plan(buf.len(), true).process(buf);
}

/// Signed frequency of DFT bin `i` for length `n`: `(-n/2, n/2]`.
pub fn signed_frequency(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// DFT bin of signed frequency `k`.
pub fn bin_of(k: i64, n: usize) -> usize {
    k.rem_euclid(n as i64) as usize
}

/// Trapezoid Fourier coefficients `ĉ_k = (1/N) Σ_j v_j e^{-ik t_j}` in DFT order.
pub fn fourier_coefficients(samples: &[Complex64], grid: &GridSpec) -> Vec<Complex64> {
    let n = samples.len();
    debug_assert_eq!(n, grid.points());
    let mut buf = samples.to_vec();
    fft_forward(&mut buf);
    let t0 = grid.start();
    let scale = (n as f64).recip();
    for (i, c) in buf.iter_mut().enumerate() {
        let k = signed_frequency(i, n) as f64;
        *c *= Complex64::from_polar(scale, -k * t0);
    }
    buf
}

/// Values on `grid` of `Σ_k ĉ_k e^{ikt}` for coefficients given in DFT order.
pub fn synthesize_on_grid(coeffs: &[Complex64], grid: &GridSpec) -> Vec<Complex64> {
    let n = coeffs.len();
    let t0 = grid.start();
    let mut buf: Vec<Complex64> = coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| c * Complex64::from_polar(1.0, signed_frequency(i, n) as f64 * t0))
        .collect();
    fft_inverse(&mut buf);
    buf
}

/// Resolution needed to resolve the Poisson weight of `a` to round-off.
pub fn weight_bandwidth(a: &PhaseParam) -> usize {
    let r = a.modulus();
    if r == 0.0 {
        0
    } else {
        (1e-17f64.ln() / r.ln()).ceil() as usize
    }
}
