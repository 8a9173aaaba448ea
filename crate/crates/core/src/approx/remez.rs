//! Remez exchange for best uniform approximation by trigonometric
//! polynomials of degree `n` on the circle.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{bin_of, fourier_coefficients, golden_max, synthesize_on_grid, GridSpec};

const TWO_PI: f64 = 2.0 * PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RemezOptions {
    pub max_iter: usize,
    /// Relative gap between upper and lower bound accepted as converged.
    pub rel_tol: f64,
    /// Absolute gap, as a fraction of `max |F|`.
    pub abs_tol: f64,
    /// Stop after this many iterations without improvement.
    pub stagnation: usize,
}

impl Default for RemezOptions {
    fn default() -> Self {
        Self {
            max_iter: 60,
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            stagnation: 8,
        }
    }
}

/// Outcome of a Remez run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemezResult {
    /// `c_{-n}, …, c_n` of the best iterate.
    pub coeffs: Vec<Complex64>,
    /// `sup |F - T|` of the best iterate.
    pub upper: f64,
    /// de la Vallée Poussin lower bound for `E_n(F)_∞`.
    pub lower: f64,
    pub certified: bool,
    pub iterations: usize,
}

/// Real trigonometric polynomial `α_0 + Σ α_k cos ku + β_k sin ku`.
#[derive(Debug, Clone)]
struct RealTrig {
    alpha: Vec<f64>,
    beta: Vec<f64>,
}

impl RealTrig {
    fn eval(&self, u: f64) -> f64 {
        let (s1, c1) = u.sin_cos();
        let (mut c, mut s) = (1.0, 0.0);
        let mut acc = self.alpha[0];
        for k in 1..self.alpha.len() {
            let cn = c * c1 - s * s1;
            s = s * c1 + c * s1;
            c = cn;
            acc += self.alpha[k] * c + self.beta[k] * s;
        }
        acc
    }

    fn complex_coeffs(&self) -> Vec<Complex64> {
        let n = self.alpha.len() - 1;
        let mut out = vec![Complex64::new(0.0, 0.0); 2 * n + 1];
        out[n] = Complex64::new(self.alpha[0], 0.0);
        for k in 1..=n {
            out[n + k] = Complex64::new(0.5 * self.alpha[k], -0.5 * self.beta[k]);
            out[n - k] = Complex64::new(0.5 * self.alpha[k], 0.5 * self.beta[k]);
        }
        out
    }

    fn on_grid(&self, grid: &GridSpec) -> Vec<f64> {
        let n = self.alpha.len() - 1;
        let len = grid.points();
        let mut spec = vec![Complex64::new(0.0, 0.0); len];
        for (j, c) in self.complex_coeffs().into_iter().enumerate() {
            spec[bin_of(j as i64 - n as i64, len)] += c;
        }
        synthesize_on_grid(&spec, grid).into_iter().map(|v| v.re).collect()
    }
}

/// Reference point with its error value.
#[derive(Debug, Clone, Copy)]
struct Point {
    u: f64,
    e: f64,
}

fn solve_reference(f: &dyn Fn(f64) -> f64, reference: &[f64], n: usize) -> Result<(RealTrig, f64)> {
    let m = 2 * n + 2;
    debug_assert_eq!(reference.len(), m);
    let mut a = DMatrix::<f64>::zeros(m, m);
    let mut b = DVector::<f64>::zeros(m);
    for (i, &u) in reference.iter().enumerate() {
        a[(i, 0)] = 1.0;
        for k in 1..=n {
            let (s, c) = (k as f64 * u).sin_cos();
            a[(i, k)] = c;
            a[(i, n + k)] = s;
        }
        a[(i, m - 1)] = if i % 2 == 0 { 1.0 } else { -1.0 };
        b[i] = f(u);
    }
    let x = a.lu().solve(&b).ok_or(Error::Singular)?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular);
    }
    let mut alpha = vec![0.0; n + 1];
    let mut beta = vec![0.0; n + 1];
    alpha[0] = x[0];
    for k in 1..=n {
        alpha[k] = x[k];
        beta[k] = x[n + k];
    }
    Ok((RealTrig { alpha, beta }, x[m - 1]))
}

/// One point per cyclic sign run of `err`, at the run's largest `|e|`,
/// polished by golden section.
fn run_extrema(
    err: &[f64],
    grid: &GridSpec,
    e_at: &dyn Fn(f64) -> f64,
) -> Vec<Point> {
    let len = err.len();
    let h = grid.spacing();
    let scale = err.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let sign = |v: f64| if v > 0.0 { 1 } else if v < 0.0 { -1 } else { 0 };
    // start right after a sign change so runs do not wrap
    let Some(first) = (0..len).find(|&j| sign(err[j]) != 0) else {
        return Vec::new();
    };
    let s0 = sign(err[first]);
    let start = (1..=len)
        .map(|d| (first + d) % len)
        .find(|&j| {
            let s = sign(err[j]);
            s != 0 && s != s0
        });
    let Some(start) = start else {
        // single sign: one run
        let j = (0..len).max_by(|&x, &y| err[x].abs().total_cmp(&err[y].abs())).unwrap();
        return vec![Point { u: grid.node(j), e: err[j] }];
    };
    let mut runs: Vec<(i32, usize)> = Vec::new();
    for d in 0..len {
        let j = (start + d) % len;
        let s = sign(err[j]);
        if s == 0 || err[j].abs() <= 1e-15 * scale {
            continue;
        }
        match runs.last_mut() {
            Some((rs, best)) if *rs == s => {
                if err[j].abs() > err[*best].abs() {
                    *best = j;
                }
            }
            _ => runs.push((s, j)),
        }
    }
    if runs.len() > 1 && runs[0].0 == runs[runs.len() - 1].0 {
        let (_, jl) = runs.pop().unwrap();
        if err[jl].abs() > err[runs[0].1].abs() {
            runs[0].1 = jl;
        }
    }
    let mut pts: Vec<Point> = runs
        .into_iter()
        .map(|(s, j)| {
            let u0 = grid.node(j);
            let sf = s as f64;
            let (u, v) = golden_max(|u| sf * e_at(u), u0 - h, u0 + h, 40);
            if v > sf * err[j] {
                Point { u, e: sf * v }
            } else {
                Point { u: u0, e: err[j] }
            }
        })
        .collect();
    pts.sort_by(|a, b| a.u.total_cmp(&b.u));
    pts
}

/// Drop the smallest `|e|` and merge its neighbours until `target` points remain.
fn reduce(mut pts: Vec<Point>, target: usize) -> Vec<Point> {
    while pts.len() > target {
        let len = pts.len();
        let i = (0..len)
            .min_by(|&x, &y| pts[x].e.abs().total_cmp(&pts[y].e.abs()))
            .unwrap();
        let (l, r) = ((i + len - 1) % len, (i + 1) % len);
        let drop_other = if pts[l].e.abs() >= pts[r].e.abs() { r } else { l };
        let (hi, lo) = if i > drop_other { (i, drop_other) } else { (drop_other, i) };
        pts.remove(hi);
        pts.remove(lo);
    }
    pts
}

/// Replace one reference point by `new`, keeping alternation.
fn single_exchange(reference: &[Point], new: Point) -> Vec<Point> {
    let len = reference.len();
    let mut out = reference.to_vec();
    let pos = reference.iter().position(|p| p.u > new.u).unwrap_or(len);
    let (before, after) = ((pos + len - 1) % len, pos % len);
    let same = |p: &Point| p.e.signum() == new.e.signum();
    if same(&reference[before]) {
        out[before] = new;
    } else if same(&reference[after]) {
        out[after] = new;
    } else {
        return out;
    }
    out.sort_by(|a, b| a.u.total_cmp(&b.u));
    out
}

fn alternates(pts: &[Point]) -> bool {
    let len = pts.len();
    (0..len).all(|i| pts[i].e * pts[(i + 1) % len].e < 0.0)
}

/// Best uniform approximation of real `f` by trigonometric polynomials of
/// degree `n`. `samples` are `f` at the nodes of `grid`; `start` is an
/// optional initial approximant (complex coefficients, degree `n`).
pub fn remez_real(
    f: &dyn Fn(f64) -> f64,
    samples: &[f64],
    grid: &GridSpec,
    n: usize,
    start: Option<&[Complex64]>,
    opts: &RemezOptions,
) -> Result<RemezResult> {
    let m = 2 * n + 2;
    if grid.points() < 4 * m {
        return Err(Error::Undersampled {
            points: grid.points(),
            required: 4 * m,
        });
    }
    let scale = samples.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    let tol_for = |upper: f64| (opts.rel_tol * upper).max(opts.abs_tol * scale).max(1e-300);

    // default start: truncated Fourier series of the samples
    let truncated: Vec<Complex64>;
    let start = match start {
        Some(c) => c,
        None => {
            let spec: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            let spec = fourier_coefficients(&spec, grid);
            let len = grid.points();
            truncated = (-(n as i64)..=n as i64).map(|k| spec[bin_of(k, len)]).collect();
            &truncated
        }
    };
    let initial = match Some(start) {
        Some(c) => {
            let mut alpha = vec![0.0; n + 1];
            let mut beta = vec![0.0; n + 1];
            alpha[0] = c[n].re;
            for k in 1..=n {
                alpha[k] = (c[n + k] + c[n - k]).re;
                beta[k] = (Complex64::new(0.0, 1.0) * (c[n + k] - c[n - k])).re;
            }
            RealTrig { alpha, beta }
        }
        None => RealTrig {
            alpha: vec![0.0; n + 1],
            beta: vec![0.0; n + 1],
        },
    };

    let residual = |t: &RealTrig| -> Vec<f64> {
        samples.iter().zip(t.on_grid(grid)).map(|(s, v)| s - v).collect()
    };

    let mut best_t = initial.clone();
    let err0 = residual(&initial);
    let mut best_upper = err0.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    let mut lower = 0.0f64;

    // equispaced reference, jittered so that symmetric signals do not
    // produce a degenerate system
    let equispaced = |attempt: usize| -> Vec<Point> {
        let golden = 0.618_033_988_749_895;
        (0..m)
            .map(|i| {
                let jitter = if attempt == 0 {
                    0.0
                } else {
                    0.4 * (((i + 7 * attempt) as f64 * golden).fract() - 0.5)
                };
                let u = grid.start() + TWO_PI * (i as f64 + 0.5 + jitter) / m as f64;
                Point { u, e: if i % 2 == 0 { 1.0 } else { -1.0 } }
            })
            .collect()
    };

    let mut reference = {
        let t = initial.clone();
        let pts = run_extrema(&err0, grid, &|u| f(u) - t.eval(u));
        if pts.len() >= m && alternates(&pts) {
            reduce(pts, m)
        } else {
            equispaced(1)
        }
    };
    let mut restarts = 1;

    if best_upper <= opts.abs_tol * scale {
        return Ok(RemezResult {
            coeffs: initial.complex_coeffs(),
            upper: best_upper,
            lower: 0.0,
            certified: true,
            iterations: 0,
        });
    }

    let mut since_improved = 0;
    let mut iterations = 0;
    for it in 1..=opts.max_iter {
        iterations = it;
        let us: Vec<f64> = reference.iter().map(|p| p.u).collect();
        let (t, level) = match solve_reference(f, &us, n) {
            Ok(v) => v,
            Err(e) => {
                log::debug!("remez: reference solve failed at iteration {it}: {e}");
                break;
            }
        };
        lower = lower.max(level.abs());
        let err = residual(&t);
        let e_at = |u: f64| f(u) - t.eval(u);
        let pts = run_extrema(&err, grid, &e_at);
        let grid_max = err.iter().fold(0.0f64, |s, v| s.max(v.abs()));
        let upper = pts.iter().fold(grid_max, |s, p| s.max(p.e.abs()));

        if upper < best_upper * (1.0 - 1e-13) {
            best_upper = upper;
            best_t = t.clone();
            since_improved = 0;
        } else {
            since_improved += 1;
        }

        let next = if pts.len() >= m && alternates(&pts) {
            let r = reduce(pts, m);
            // de la Vallée Poussin bound from the alternating extrema
            lower = lower.max(r.iter().fold(f64::INFINITY, |s, p| s.min(p.e.abs())));
            r
        } else {
            let cur: Vec<Point> = reference
                .iter()
                .map(|p| Point { u: p.u, e: e_at(p.u) })
                .collect();
            match pts.iter().max_by(|a, b| a.e.abs().total_cmp(&b.e.abs())) {
                Some(&peak) if alternates(&cur) && level.abs() > opts.abs_tol * scale => {
                    single_exchange(&cur, peak)
                }
                _ => {
                    restarts += 1;
                    equispaced(restarts)
                }
            }
        };

        if best_upper - lower <= tol_for(best_upper) {
            return Ok(RemezResult {
                coeffs: best_t.complex_coeffs(),
                upper: best_upper,
                lower: lower.min(best_upper),
                certified: true,
                iterations,
            });
        }
        if since_improved >= opts.stagnation {
            break;
        }
        reference = next;
    }
    log::debug!(
        "remez: not certified after {iterations} iterations (upper {best_upper:e}, lower {lower:e})"
    );
    Ok(RemezResult {
        coeffs: best_t.complex_coeffs(),
        upper: best_upper,
        lower: lower.min(best_upper),
        certified: false,
        iterations,
    })
}

/// Remez for complex `F`: real and imaginary parts separately.
///
/// The upper bound is the sup of the combined residual and the lower bound
/// the larger of the two real lower bounds.
pub fn remez_complex(
    f: &dyn Fn(f64) -> Complex64,
    samples: &[Complex64],
    grid: &GridSpec,
    n: usize,
    start: Option<&[Complex64]>,
    opts: &RemezOptions,
) -> Result<RemezResult> {
    let is_real = samples.iter().all(|v| v.im == 0.0);
    let re_start: Option<Vec<Complex64>> = start.map(|c| real_part_coeffs(c, false));
    let re_samples: Vec<f64> = samples.iter().map(|v| v.re).collect();
    let re = remez_real(&|u| f(u).re, &re_samples, grid, n, re_start.as_deref(), opts)?;
    if is_real {
        return Ok(re);
    }
    let im_start: Option<Vec<Complex64>> = start.map(|c| real_part_coeffs(c, true));
    let im_samples: Vec<f64> = samples.iter().map(|v| v.im).collect();
    let im = remez_real(&|u| f(u).im, &im_samples, grid, n, im_start.as_deref(), opts)?;
    let i = Complex64::new(0.0, 1.0);
    let coeffs: Vec<Complex64> = re.coeffs.iter().zip(&im.coeffs).map(|(r, m)| r + i * m).collect();
    let horner = |u: f64| {
        let w = Complex64::from_polar(1.0, u);
        let mut acc = Complex64::new(0.0, 0.0);
        for c in coeffs.iter().rev() {
            acc = acc * w + c;
        }
        acc * w.conj().powu(n as u32)
    };
    let h = grid.spacing();
    let mut upper = 0.0f64;
    let mut at = grid.start();
    for (j, u) in grid.nodes().enumerate() {
        let d = (samples[j] - horner(u)).norm();
        if d > upper {
            upper = d;
            at = u;
        }
    }
    let (_, polished) = golden_max(|u| (f(u) - horner(u)).norm(), at - h, at + h, 50);
    upper = upper.max(polished);
    let lower = re.lower.max(im.lower).min(upper);
    Ok(RemezResult {
        coeffs,
        upper,
        lower,
        certified: re.certified && im.certified,
        iterations: re.iterations + im.iterations,
    })
}

/// Coefficients of `Re T` (or `Im T` when `imag`) for `T = Σ c_k e^{iku}`.
fn real_part_coeffs(c: &[Complex64], imag: bool) -> Vec<Complex64> {
    let len = c.len();
    (0..len)
        .map(|j| {
            let mirror = c[len - 1 - j].conj();
            if imag {
                (c[j] - mirror) / Complex64::new(0.0, 2.0)
            } else {
                (c[j] + mirror) * 0.5
            }
        })
        .collect()
}
