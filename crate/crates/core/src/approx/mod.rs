//! Best approximation, convergence diagnostics and inequality verifiers.

pub mod remez;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels;
use crate::numerics::{
    bin_of, check_exponent, fourier_coefficients, gauss_legendre, golden_max,
    modulus_smoothness, synthesize_on_grid, warp_signal, GridSpec, Signal, SupEstimate,
    DEFAULT_SHIFTS,
};
use crate::phase::{wrap_angle, PhaseParam};
use crate::transform::{
    required_points, CoeffVector, NlPolynomial, Operator, WarpedAnalysis,
};

pub use remez::{remez_complex, remez_real, RemezOptions, RemezResult};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Serialize exponents with `p = ∞` as the string `"inf"`.
pub mod exponent_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(p: &f64, s: S) -> Result<S::Ok, S::Error> {
        if p.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*p)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => super::parse_exponent(&t).map_err(serde::de::Error::custom),
        }
    }
}

/// Parse `1`, `2.5`, `inf` or `∞`.
pub fn parse_exponent(s: &str) -> Result<f64> {
    let t = s.trim().to_ascii_lowercase();
    let p = match t.as_str() {
        "inf" | "infinity" | "∞" => f64::INFINITY,
        _ => t
            .parse::<f64>()
            .map_err(|_| Error::OutOfRange(format!("cannot parse exponent '{s}'")))?,
    };
    check_exponent(p)?;
    Ok(p)
}

/// Display an exponent the way reports print it.
pub fn format_exponent(p: f64) -> String {
    if p.is_infinite() {
        "inf".into()
    } else {
        p.to_string()
    }
}

/// Where a check was run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportContext {
    pub modulus: f64,
    pub angle: f64,
    pub n: usize,
    #[serde(with = "exponent_serde")]
    pub p: f64,
    pub signal: String,
    pub grid: usize,
}

impl ReportContext {
    pub fn new(a: &PhaseParam, n: usize, p: f64, signal: &str, grid: usize) -> Self {
        Self {
            modulus: a.modulus(),
            angle: a.angle(),
            n,
            p,
            signal: signal.to_string(),
            grid,
        }
    }
}

/// Outcome of one inequality check: `pass ⇔ lhs ≤ rhs + tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub theorem_id: String,
    pub lhs: f64,
    pub rhs: f64,
    pub constant_used: f64,
    pub margin: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub context: ReportContext,
    #[serde(default)]
    pub details: BTreeMap<String, f64>,
}

impl VerifyReport {
    pub fn new(
        theorem: Theorem,
        lhs: f64,
        rhs: f64,
        constant_used: f64,
        tolerance: f64,
        context: ReportContext,
    ) -> Self {
        Self {
            theorem_id: theorem.id().to_string(),
            lhs,
            rhs,
            constant_used,
            margin: rhs - lhs,
            tolerance,
            pass: lhs <= rhs + tolerance,
            context,
            details: BTreeMap::new(),
        }
    }

    pub fn with_detail(mut self, key: &str, value: f64) -> Self {
        self.details.insert(key.to_string(), value);
        self
    }
}

/// Checks run by the verifier sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    /// `E_n^a(f)_∞ ≤ 24/(1-|a|) ω(f, 1/n)_∞`.
    Jackson,
    /// `((1-|a|)/2) ω(f,t)_∞ ≤ ω(F,t)_∞`.
    SandwichLower,
    /// `ω(F,t)_∞ ≤ (2/(1-|a|)) ω(f,t)_∞`.
    SandwichUpper,
    /// `∥S_n^a f∥_∞ ≤ Λ_n ∥f∥_∞`.
    Lebesgue,
    /// `∥S_n^a f∥_p ≤ ((1+|a|)/(1-|a|))^{2/p} Λ_n ∥f∥_p`.
    LebesgueLp,
    /// `∥f - S_n^a f∥_∞ ≤ (1 + Λ_n) E_n^a(f)_∞`.
    NearBest,
    /// `∥σ_n^a f∥_∞ ≤ ∥f∥_∞`.
    Fejer,
    /// `∥σ_n^a f∥_p ≤ ((1+|a|)/(1-|a|))^{2/p} ∥f∥_p`.
    FejerLp,
    /// `∥t'∥_p ≤ 2n ((1+|a|)/(1-|a|))^{2+1/p} ∥t∥_p`.
    Bernstein,
}

impl Theorem {
    pub const ALL: [Theorem; 9] = [
        Theorem::Jackson,
        Theorem::SandwichLower,
        Theorem::SandwichUpper,
        Theorem::Lebesgue,
        Theorem::LebesgueLp,
        Theorem::NearBest,
        Theorem::Fejer,
        Theorem::FejerLp,
        Theorem::Bernstein,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Theorem::Jackson => "jackson",
            Theorem::SandwichLower => "sandwich_lower",
            Theorem::SandwichUpper => "sandwich_upper",
            Theorem::Lebesgue => "lebesgue",
            Theorem::LebesgueLp => "lebesgue_lp",
            Theorem::NearBest => "near_best",
            Theorem::Fejer => "fejer",
            Theorem::FejerLp => "fejer_lp",
            Theorem::Bernstein => "bernstein",
        }
    }

    /// Needs a continuous signal.
    pub fn needs_continuity(self) -> bool {
        matches!(self, Theorem::Jackson | Theorem::NearBest)
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Parse a theorem selector. Group names expand to several checks:
/// `sandwich`, `lebesgue` (sup and `L^p`), `fejer` (sup and `L^p`), `all`.
pub fn parse_theorems(s: &str) -> Result<Vec<Theorem>> {
    let t = s.trim().to_ascii_lowercase().replace('-', "_");
    let out = match t.as_str() {
        "all" => Theorem::ALL.to_vec(),
        "sandwich" | "modulus" | "modulus_sandwich" => {
            vec![Theorem::SandwichLower, Theorem::SandwichUpper]
        }
        "lebesgue" => vec![Theorem::Lebesgue, Theorem::LebesgueLp],
        "fejer" | "cesaro" => vec![Theorem::Fejer, Theorem::FejerLp],
        other => match Theorem::ALL.iter().find(|th| th.id() == other) {
            Some(th) => vec![*th],
            None => {
                return Err(Error::OutOfRange(format!(
                    "unknown theorem '{s}' (expected all, jackson, sandwich, lebesgue, lebesgue_lp, near_best, fejer, fejer_lp or bernstein)"
                )))
            }
        },
    };
    Ok(out)
}

impl FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let v = parse_theorems(s)?;
        if v.len() == 1 {
            Ok(v[0])
        } else {
            Err(Error::OutOfRange(format!("'{s}' names several checks")))
        }
    }
}

/// Errors along a sequence of degrees with a fitted log-log slope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayCurve {
    pub ns: Vec<usize>,
    pub values: Vec<f64>,
    /// Least-squares slope of `log value` against `log n` (positive entries).
    pub fitted_rate: Option<f64>,
    /// Last error below half the first, or negligible.
    pub converging: bool,
}

impl DecayCurve {
    pub fn new(ns: Vec<usize>, values: Vec<f64>) -> Self {
        let pts: Vec<(f64, f64)> = ns
            .iter()
            .zip(&values)
            .filter(|(n, v)| **n > 0 && **v > 1e-300)
            .map(|(n, v)| ((*n as f64).ln(), v.ln()))
            .collect();
        let fitted_rate = if pts.len() >= 2 {
            let m = pts.len() as f64;
            let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
            let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
            let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
            let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
            (sxx > 0.0).then(|| sxy / sxx)
        } else {
            None
        };
        let converging = match (values.first(), values.last()) {
            (Some(&f), Some(&l)) => l <= 0.5 * f || l < 1e-12,
            _ => false,
        };
        Self {
            ns,
            values,
            fitted_rate,
            converging,
        }
    }

    /// `value(n_from) / value(n_to)`.
    pub fn reduction(&self, n_from: usize, n_to: usize) -> Option<f64> {
        let at = |n| self.ns.iter().position(|&m| m == n).map(|i| self.values[i]);
        Some(at(n_from)? / at(n_to)?)
    }
}

/// How a best-approximation value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApproxMethod {
    LeastSquares,
    Remez,
    Irls,
}

/// `E_n^a(f)_p` with a witness from `τ_n^a`.
#[derive(Debug, Clone, Serialize)]
pub struct BestApprox {
    /// `∥f - witness∥_p`, an upper bound for `E_n^a(f)_p`.
    pub error: f64,
    /// A proven lower bound (zero when none is available).
    pub lower: f64,
    pub witness: NlPolynomial,
    pub certified: bool,
    pub method: ApproxMethod,
    pub iterations: usize,
}

/// `f` sampled on the warped axis, shared by the verifiers.
#[derive(Debug, Clone)]
pub struct Prepared {
    f: Signal,
    big: Signal,
    wa: WarpedAnalysis,
}

impl Prepared {
    pub fn new(f: &Signal, a: &PhaseParam, grid: &GridSpec) -> Result<Self> {
        Ok(Self {
            f: f.clone(),
            big: warp_signal(f, a),
            wa: WarpedAnalysis::new(f, a, grid)?,
        })
    }

    pub fn signal(&self) -> &Signal {
        &self.f
    }

    pub fn warped(&self) -> &Signal {
        &self.big
    }

    pub fn analysis(&self) -> &WarpedAnalysis {
        &self.wa
    }

    pub fn a(&self) -> PhaseParam {
        self.wa.a()
    }

    pub fn grid(&self) -> GridSpec {
        self.wa.grid()
    }

    fn context(&self, n: usize, p: f64) -> ReportContext {
        ReportContext::new(&self.a(), n, p, self.f.name(), self.grid().points())
    }

    /// `∥f∥_p` (sup over the warped samples with polish for `p = ∞`).
    pub fn norm(&self, p: f64) -> Result<f64> {
        if p.is_infinite() {
            let big = &self.big;
            return Ok(polished_sup(self.wa.samples(), &self.grid(), |u| big.eval(u), 4).value);
        }
        self.wa.x_norm(self.wa.samples(), p)
    }

    /// `op_n^a f` as a polynomial in `τ_n^a`.
    pub fn operator_poly(&self, op: Operator, n: usize) -> Result<NlPolynomial> {
        let c = self.wa.coefficients(n)?;
        Ok(NlPolynomial::new(match op {
            Operator::PartialSum => c,
            Operator::Cesaro => c.fejer_weighted(n),
        }))
    }

    fn operator_samples(&self, op: Operator, n: usize) -> Vec<Complex64> {
        match op {
            Operator::PartialSum => self.wa.partial_sum_samples(n),
            Operator::Cesaro => self.wa.cesaro_samples(n),
        }
    }

    /// `∥op_n^a f∥_p`.
    pub fn operator_norm(&self, op: Operator, n: usize, p: f64) -> Result<f64> {
        let vals = self.operator_samples(op, n);
        if p.is_infinite() {
            let poly = self.operator_poly(op, n)?;
            return Ok(polished_sup(&vals, &self.grid(), |u| poly.eval_warped(u), 4).value);
        }
        self.wa.x_norm(&vals, p)
    }

    /// `∥f - op_n^a f∥_p`.
    pub fn operator_error(&self, op: Operator, n: usize, p: f64) -> Result<f64> {
        let vals = self.operator_samples(op, n);
        let resid: Vec<Complex64> = self.wa.samples().iter().zip(&vals).map(|(f, s)| f - s).collect();
        if p.is_infinite() {
            let poly = self.operator_poly(op, n)?;
            let big = &self.big;
            return Ok(polished_sup(&resid, &self.grid(), |u| big.eval(u) - poly.eval_warped(u), 8).value);
        }
        self.wa.x_norm(&resid, p)
    }
}

/// Grid maximum of `|values|` polished by golden section around the `top`
/// largest local maxima.
pub fn polished_sup<F: Fn(f64) -> Complex64>(
    values: &[Complex64],
    grid: &GridSpec,
    eval: F,
    top: usize,
) -> SupEstimate {
    let len = values.len();
    let mags: Vec<f64> = values.iter().map(|v| v.norm()).collect();
    let mut peaks: Vec<usize> = (0..len)
        .filter(|&j| {
            let (l, r) = (mags[(j + len - 1) % len], mags[(j + 1) % len]);
            mags[j] >= l && mags[j] >= r
        })
        .collect();
    peaks.sort_by(|&x, &y| mags[y].total_cmp(&mags[x]));
    peaks.truncate(top.max(1));
    let grid_max = mags.iter().copied().fold(0.0, f64::max);
    let mut best = SupEstimate {
        value: grid_max,
        argmax: peaks.first().map(|&j| grid.node(j)).unwrap_or(grid.start()),
        tolerance: 0.0,
    };
    let h = grid.spacing();
    for j in peaks {
        let c = grid.node(j);
        let (x, v) = golden_max(|u| eval(u).norm(), c - h, c + h, 50);
        if v > best.value {
            best = SupEstimate {
                value: v,
                argmax: x,
                tolerance: v - grid_max,
            };
        }
    }
    best
}

/// Grid used by the verifiers for modulus `r`.
pub fn sweep_grid(a: &PhaseParam) -> GridSpec {
    let peak = 8.0 * 64.0 / (1.0 - a.modulus());
    GridSpec::pow2((peak as usize).max(GridSpec::DEFAULT_POINTS))
}

/// Weighted least squares on the warped grid:
/// minimize `Σ_j v_j |F_j - T(u_j)|²` over `T` of degree `n`.
fn weighted_ls(
    samples: &[Complex64],
    weights: &[f64],
    grid: &GridSpec,
    n: usize,
) -> Result<Vec<Complex64>> {
    let len = samples.len();
    if 4 * n >= len {
        return Err(Error::Undersampled {
            points: len,
            required: 4 * n + 1,
        });
    }
    let wc: Vec<Complex64> = weights.iter().map(|&w| Complex64::new(w, 0.0)).collect();
    let w_hat = fourier_coefficients(&wc, grid);
    let wf: Vec<Complex64> = samples.iter().zip(weights).map(|(f, w)| f * *w).collect();
    let b_hat = fourier_coefficients(&wf, grid);
    let m = 2 * n + 1;
    let ni = n as i64;
    let gram = DMatrix::from_fn(m, m, |r, c| {
        let (k, l) = (r as i64 - ni, c as i64 - ni);
        w_hat[bin_of(k - l, len)]
    });
    let rhs = DVector::from_fn(m, |r, _| b_hat[bin_of(r as i64 - ni, len)]);
    let sol = match gram.clone().cholesky() {
        Some(ch) => ch.solve(&rhs),
        None => gram.lu().solve(&rhs).ok_or(Error::Singular)?,
    };
    Ok(sol.iter().copied().collect())
}

fn poly_on_grid(coeffs: &[Complex64], grid: &GridSpec) -> Vec<Complex64> {
    let len = grid.points();
    let n = (coeffs.len() / 2) as i64;
    let mut spec = vec![ZERO; len];
    for (j, c) in coeffs.iter().enumerate() {
        spec[bin_of(j as i64 - n, len)] += c;
    }
    synthesize_on_grid(&spec, grid)
}

fn weighted_error(samples: &[Complex64], t: &[Complex64], w: &[f64], p: f64) -> f64 {
    let s: f64 = samples
        .iter()
        .zip(t)
        .zip(w)
        .map(|((f, v), w)| (f - v).norm().powf(p) * w)
        .sum();
    (s / samples.len() as f64).powf(1.0 / p)
}

/// `E_n^a(f)_p = inf_{T ∈ τ_n^a} ∥f - T∥_p`.
///
/// `p = 2` solves the least-squares problem in `L²(dx)` exactly
/// (the Gram matrix of `e^{ikθ_a}` under `dx` is Toeplitz in the Fourier
/// coefficients of `p_{-a}`); `p = ∞` runs Remez on `F`; other `p` use
/// iteratively reweighted least squares.
pub fn best_approx_error(
    f: &Signal,
    a: &PhaseParam,
    n: usize,
    p: f64,
    grid: &GridSpec,
) -> Result<BestApprox> {
    best_approx_prepared(&Prepared::new(f, a, grid)?, n, p, &RemezOptions::default())
}

pub fn best_approx_prepared(prep: &Prepared, n: usize, p: f64, opts: &RemezOptions) -> Result<BestApprox> {
    check_exponent(p)?;
    let a = prep.a();
    let grid = prep.grid();
    let samples = prep.wa.samples();
    let w: Vec<f64> = grid.nodes().map(|u| a.inverse_weight(u)).collect();
    let make = |coeffs: Vec<Complex64>| -> Result<NlPolynomial> {
        Ok(NlPolynomial::new(CoeffVector::new(a, coeffs)?))
    };

    if p.is_infinite() {
        let start = prep.wa.coefficients(n)?;
        let big = &prep.big;
        let r = remez_complex(
            &|u| big.eval(u),
            samples,
            &grid,
            n,
            Some(start.as_slice()),
            opts,
        )?;
        return Ok(BestApprox {
            error: r.upper,
            lower: r.lower,
            witness: make(r.coeffs)?,
            certified: r.certified,
            method: ApproxMethod::Remez,
            iterations: r.iterations,
        });
    }

    let c2 = weighted_ls(samples, &w, &grid, n)?;
    let t2 = poly_on_grid(&c2, &grid);
    let e2 = weighted_error(samples, &t2, &w, 2.0);
    if p == 2.0 {
        return Ok(BestApprox {
            error: e2,
            lower: e2,
            witness: make(c2)?,
            certified: true,
            method: ApproxMethod::LeastSquares,
            iterations: 1,
        });
    }

    // IRLS: 40 damped steps from the p = 2 solution
    let mut c = c2.clone();
    let mut best = (weighted_error(samples, &t2, &w, p), c2);
    let mut iterations = 0;
    for it in 1..=40 {
        iterations = it;
        let t = poly_on_grid(&c, &grid);
        let r: Vec<f64> = samples.iter().zip(&t).map(|(f, v)| (f - v).norm()).collect();
        let rmax = r.iter().copied().fold(0.0, f64::max);
        if rmax == 0.0 {
            break;
        }
        let floor = 1e-9 * rmax;
        let v: Vec<f64> = r
            .iter()
            .zip(&w)
            .map(|(r, w)| w * r.max(floor).powf(p - 2.0))
            .collect();
        let c_new = weighted_ls(samples, &v, &grid, n)?;
        c = c.iter().zip(&c_new).map(|(o, nw)| 0.5 * o + 0.5 * nw).collect();
        let err = weighted_error(samples, &poly_on_grid(&c, &grid), &w, p);
        if err < best.0 {
            best = (err, c.clone());
        }
    }
    // ∥g∥_2 ≤ ∥g∥_p for p ≥ 2 under the normalized measure
    let lower = if p >= 2.0 { e2.min(best.0) } else { 0.0 };
    Ok(BestApprox {
        error: best.0,
        lower,
        witness: make(best.1)?,
        certified: false,
        method: ApproxMethod::Irls,
        iterations,
    })
}

/// Estimator settings shared by the verifiers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Grid for the moduli of smoothness.
    pub modulus_grid: GridSpec,
    pub shifts: usize,
    pub remez: RemezOptions,
    /// Relative slack granted to every inequality.
    pub rel_tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            modulus_grid: GridSpec::default(),
            shifts: DEFAULT_SHIFTS,
            remez: RemezOptions::default(),
            rel_tol: 1e-9,
        }
    }
}

fn distortion(a: &PhaseParam) -> f64 {
    a.distortion()
}

/// `E_n^a(f)_∞ ≤ (24/(1-|a|)) ω(f, 1/n)_∞`.
pub fn verify_jackson(prep: &Prepared, n: usize, opts: &VerifyOptions) -> Result<VerifyReport> {
    if n == 0 {
        return Err(Error::OutOfRange("Jackson check needs n ≥ 1".into()));
    }
    let a = prep.a();
    let best = best_approx_prepared(prep, n, f64::INFINITY, &opts.remez)?;
    let omega = modulus_smoothness(&prep.f, 1.0 / n as f64, f64::INFINITY, &opts.modulus_grid, opts.shifts)?;
    let constant = 24.0 / (1.0 - a.modulus());
    let rhs = constant * omega;
    Ok(VerifyReport::new(
        Theorem::Jackson,
        best.error,
        rhs,
        constant,
        opts.rel_tol * (1.0 + rhs),
        prep.context(n, f64::INFINITY),
    )
    .with_detail("best_lower", best.lower)
    .with_detail("certified", best.certified as u8 as f64)
    .with_detail("omega", omega))
}

/// Both sides of `((1-|a|)/2) ω(f,t)_∞ ≤ ω(F,t)_∞ ≤ (2/(1-|a|)) ω(f,t)_∞`.
pub fn verify_modulus_sandwich(
    f: &Signal,
    a: &PhaseParam,
    t: f64,
    opts: &VerifyOptions,
) -> Result<[VerifyReport; 2]> {
    if !(t > 0.0 && t <= PI) {
        return Err(Error::OutOfRange(format!("sandwich step t = {t} not in (0, π]")));
    }
    let big = warp_signal(f, a);
    let g = &opts.modulus_grid;
    let wf = modulus_smoothness(f, t, f64::INFINITY, g, opts.shifts)?;
    let wb = modulus_smoothness(&big, t, f64::INFINITY, g, opts.shifts)?;
    let r = a.modulus();
    let ctx = ReportContext::new(a, 0, f64::INFINITY, f.name(), g.points());
    let lo_c = (1.0 - r) / 2.0;
    let hi_c = 2.0 / (1.0 - r);
    let lower = VerifyReport::new(
        Theorem::SandwichLower,
        lo_c * wf,
        wb,
        lo_c,
        opts.rel_tol * (1.0 + wb),
        ctx.clone(),
    )
    .with_detail("t", t);
    let upper = VerifyReport::new(
        Theorem::SandwichUpper,
        wb,
        hi_c * wf,
        hi_c,
        opts.rel_tol * (1.0 + hi_c * wf),
        ctx,
    )
    .with_detail("t", t);
    Ok([lower, upper])
}

/// `∥S_n^a f∥_∞ ≤ Λ_n ∥f∥_∞`.
pub fn verify_lebesgue_bound(prep: &Prepared, n: usize, opts: &VerifyOptions) -> Result<VerifyReport> {
    let lhs = prep.operator_norm(Operator::PartialSum, n, f64::INFINITY)?;
    let lambda = kernels::lebesgue(n);
    let rhs = lambda * prep.norm(f64::INFINITY)?;
    Ok(VerifyReport::new(
        Theorem::Lebesgue,
        lhs,
        rhs,
        lambda,
        opts.rel_tol * (1.0 + rhs),
        prep.context(n, f64::INFINITY),
    ))
}

/// `∥S_n^a f∥_p ≤ ((1+|a|)/(1-|a|))^{2/p} Λ_n ∥f∥_p`, `1 ≤ p < ∞`.
pub fn verify_lebesgue_lp_bound(prep: &Prepared, n: usize, p: f64, opts: &VerifyOptions) -> Result<VerifyReport> {
    finite_exponent(p)?;
    let c = distortion(&prep.a());
    let lambda = kernels::lebesgue(n);
    let fp = prep.norm(p)?;
    let lhs = prep.operator_norm(Operator::PartialSum, n, p)?;
    let constant = c.powf(2.0 / p) * lambda;
    let rhs = constant * fp;
    let ratio = if fp > 0.0 { lhs / fp } else { 0.0 };
    Ok(VerifyReport::new(
        Theorem::LebesgueLp,
        lhs,
        rhs,
        constant,
        opts.rel_tol * (1.0 + rhs),
        prep.context(n, p),
    )
    .with_detail("measured_ratio", ratio)
    .with_detail("lambda_n", lambda))
}

/// `∥f - S_n^a f∥_∞ ≤ (1 + Λ_n) E_n^a(f)_∞`, using the Remez lower bound.
pub fn verify_near_best(prep: &Prepared, n: usize, opts: &VerifyOptions) -> Result<VerifyReport> {
    let lhs = prep.operator_error(Operator::PartialSum, n, f64::INFINITY)?;
    let best = best_approx_prepared(prep, n, f64::INFINITY, &opts.remez)?;
    let constant = 1.0 + kernels::lebesgue(n);
    let rhs = constant * best.lower;
    Ok(VerifyReport::new(
        Theorem::NearBest,
        lhs,
        rhs,
        constant,
        opts.rel_tol * (1.0 + rhs),
        prep.context(n, f64::INFINITY),
    )
    .with_detail("best_upper", best.error)
    .with_detail("best_lower", best.lower)
    .with_detail("certified", best.certified as u8 as f64))
}

/// `∥σ_n^a f∥_∞ ≤ ∥f∥_∞`, or for finite `p`
/// `∥σ_n^a f∥_p ≤ ((1+|a|)/(1-|a|))^{2/p} ∥f∥_p` (the measured ratio and the
/// `1/p` comparison are attached as details).
pub fn verify_fejer_contraction(prep: &Prepared, n: usize, p: f64, opts: &VerifyOptions) -> Result<VerifyReport> {
    check_exponent(p)?;
    let fp = prep.norm(p)?;
    let lhs = prep.operator_norm(Operator::Cesaro, n, p)?;
    let ratio = if fp > 0.0 { lhs / fp } else { 0.0 };
    if p.is_infinite() {
        return Ok(VerifyReport::new(
            Theorem::Fejer,
            lhs,
            fp,
            1.0,
            opts.rel_tol * fp.max(f64::MIN_POSITIVE),
            prep.context(n, p),
        )
        .with_detail("measured_ratio", ratio));
    }
    let c = distortion(&prep.a());
    let constant = c.powf(2.0 / p);
    let rhs = constant * fp;
    let one_over_p = c.powf(1.0 / p);
    Ok(VerifyReport::new(
        Theorem::FejerLp,
        lhs,
        rhs,
        constant,
        opts.rel_tol * (1.0 + rhs),
        prep.context(n, p),
    )
    .with_detail("measured_ratio", ratio)
    .with_detail("constant_1_over_p", one_over_p)
    .with_detail("within_1_over_p", (ratio <= one_over_p * (1.0 + opts.rel_tol)) as u8 as f64))
}

fn finite_exponent(p: f64) -> Result<()> {
    check_exponent(p)?;
    if p.is_infinite() {
        return Err(Error::InvalidExponent(p));
    }
    Ok(())
}

/// `∥f - op_n^a f∥_p` along `ns`.
pub fn convergence_curve(
    f: &Signal,
    a: &PhaseParam,
    op: Operator,
    p: f64,
    ns: &[usize],
    grid: &GridSpec,
) -> Result<DecayCurve> {
    check_exponent(p)?;
    if ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::OutOfRange("degrees must be strictly increasing".into()));
    }
    let prep = Prepared::new(f, a, grid)?;
    convergence_curve_prepared(&prep, op, p, ns)
}

pub fn convergence_curve_prepared(prep: &Prepared, op: Operator, p: f64, ns: &[usize]) -> Result<DecayCurve> {
    let values = ns
        .iter()
        .map(|&n| prep.operator_error(op, n, p))
        .collect::<Result<Vec<f64>>>()?;
    Ok(DecayCurve::new(ns.to_vec(), values))
}

/// Pointwise hypothesis to test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointwiseCriterion {
    Dini,
    /// `|F(u) - F(v)| ≤ constant |u - v|^alpha` near the point.
    Holder { alpha: f64, constant: f64 },
}

/// `∫_ε^π |φ(t)/t| dt` for `ε = 2^{-j}`, `j = 4..14`, with
/// `φ(t) = F(θ_a(x)+t) + F(θ_a(x)-t) - 2f(x)`.
#[derive(Debug, Clone, Serialize)]
pub struct DiniEstimate {
    pub eps: Vec<f64>,
    pub integrals: Vec<f64>,
    /// Ratios of successive increments.
    pub ratios: Vec<f64>,
    pub finite: bool,
    /// Extrapolated value when classified finite.
    pub estimate: Option<f64>,
}

/// Evaluate the Dini integral at `u = θ_a(x)` against the value `fx`.
pub fn dini_integral(big: &Signal, u: f64, fx: Complex64) -> DiniEstimate {
    let phi = |t: f64| (big.eval(u + t) + big.eval(u - t) - 2.0 * fx).norm() / t;
    let breaks: Vec<f64> = big
        .jumps()
        .iter()
        .map(|&j| wrap_angle(j - u).abs())
        .filter(|t| *t > 0.0 && *t < PI)
        .collect();
    let (gx, gw) = gauss_legendre(24);
    let panel = |lo: f64, hi: f64| -> f64 {
        let mut cuts = vec![lo];
        cuts.extend(breaks.iter().copied().filter(|b| *b > lo && *b < hi));
        cuts.push(hi);
        cuts.sort_by(f64::total_cmp);
        cuts.windows(2)
            .map(|w| {
                let (c, h) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
                gx.iter().zip(&gw).map(|(x, wt)| wt * phi(c + h * x)).sum::<f64>() * h
            })
            .sum()
    };
    let js: Vec<i32> = (4..=14).collect();
    let eps: Vec<f64> = js.iter().map(|&j| 2f64.powi(-j)).collect();
    // base: [2^-4, π] in 32 equal panels
    let lo = eps[0];
    let base: f64 = (0..32)
        .map(|i| {
            let a = lo + (PI - lo) * i as f64 / 32.0;
            let b = lo + (PI - lo) * (i + 1) as f64 / 32.0;
            panel(a, b)
        })
        .sum();
    let mut integrals = vec![base];
    let mut increments = Vec::new();
    for w in eps.windows(2) {
        let d = panel(w[1], w[0]);
        increments.push(d);
        integrals.push(integrals.last().unwrap() + d);
    }
    let ratios: Vec<f64> = increments
        .windows(2)
        .map(|w| if w[0] > 0.0 { w[1] / w[0] } else { 0.0 })
        .collect();
    let total = *integrals.last().unwrap();
    let tail = &increments[increments.len() - 4..];
    let negligible = tail.iter().all(|d| *d <= 1e-12 * (1.0 + total));
    let last_ratios = &ratios[ratios.len() - 4..];
    let geometric = last_ratios.iter().all(|r| *r < 0.9);
    let finite = negligible || geometric;
    let estimate = finite.then(|| {
        if negligible {
            total
        } else {
            let rho = last_ratios.iter().copied().fold(0.0, f64::max);
            total + increments.last().unwrap() * rho / (1.0 - rho)
        }
    });
    DiniEstimate {
        eps,
        integrals,
        ratios,
        finite,
        estimate,
    }
}

/// Pointwise behaviour of `S_n^a f(x)`.
#[derive(Debug, Clone, Serialize)]
pub struct PointwiseReport {
    pub x: f64,
    pub u: f64,
    pub value: Complex64,
    pub dini: DiniEstimate,
    /// Largest `|F(u±t) - F(u)| / t^α` seen, for the Hölder criterion.
    pub holder_observed: Option<f64>,
    /// Whether the selected criterion holds numerically.
    pub criterion_holds: bool,
    pub ns: Vec<usize>,
    pub partial_sums: Vec<Complex64>,
    pub errors: Vec<f64>,
    /// Mean of the one-sided limits when `x` is a jump.
    pub midpoint: Option<Complex64>,
    pub midpoint_errors: Option<Vec<f64>>,
    pub errors_trend_to_zero: bool,
}

pub fn pointwise_convergence_check(
    f: &Signal,
    a: &PhaseParam,
    x: f64,
    criterion: PointwiseCriterion,
    ns: &[usize],
    grid: &GridSpec,
) -> Result<PointwiseReport> {
    let u = a.theta(x);
    let n_max = ns.iter().copied().max().unwrap_or(0);
    let points = grid.points().max(GridSpec::pow2(4 * n_max + 4).points());
    let g = GridSpec::pow2(points).aligned_to(u);
    let wa = WarpedAnalysis::new(f, a, &g)?;
    let big = warp_signal(f, a);
    let value = f.eval(x);
    let dini = dini_integral(&big, u, value);

    let (holder_observed, criterion_holds) = match criterion {
        PointwiseCriterion::Dini => (None, dini.finite),
        PointwiseCriterion::Holder { alpha, constant } => {
            let worst = (0..40)
                .flat_map(|j| {
                    let t = PI * 2f64.powf(-(j as f64) / 2.0);
                    [t, -t]
                })
                .map(|t| (big.eval(u + t) - big.eval(u)).norm() / t.abs().powf(alpha))
                .fold(0.0, f64::max);
            (Some(worst), worst <= constant * (1.0 + 1e-9))
        }
    };

    let mut partial_sums = Vec::with_capacity(ns.len());
    for &n in ns {
        let poly = NlPolynomial::new(wa.coefficients(n)?);
        partial_sums.push(poly.eval_warped(u));
    }
    let errors: Vec<f64> = partial_sums.iter().map(|s| (s - value).norm()).collect();
    let on_jump = f.jumps().iter().any(|j| wrap_angle(x - j).abs() < 1e-12);
    let midpoint = on_jump.then(|| 0.5 * (f.eval(x - 1e-10) + f.eval(x + 1e-10)));
    let midpoint_errors = midpoint.map(|m| partial_sums.iter().map(|s| (s - m).norm()).collect());
    let errors_trend_to_zero = match (errors.first(), errors.last()) {
        (Some(&e0), Some(&e1)) => e1 < 1e-10 || e1 <= 0.5 * e0,
        _ => false,
    };
    Ok(PointwiseReport {
        x,
        u,
        value,
        dini,
        holder_observed,
        criterion_holds,
        ns: ns.to_vec(),
        partial_sums,
        errors,
        midpoint,
        midpoint_errors,
        errors_trend_to_zero,
    })
}

/// Overshoot of `S_n^a f` next to a jump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GibbsMeasurement {
    pub jump_at: f64,
    /// Larger one-sided limit.
    pub upper: f64,
    /// `|f(x+) - f(x-)|`.
    pub jump: f64,
    pub peak: f64,
    pub peak_at: f64,
    /// `(peak - upper) / jump`.
    pub overshoot: f64,
}

/// Gibbs overshoot of the real part of `S_n^a f` at the jump `x`,
/// normalized by the full jump height.
pub fn gibbs_overshoot(
    f: &Signal,
    a: &PhaseParam,
    n: usize,
    x: f64,
    grid: &GridSpec,
) -> Result<GibbsMeasurement> {
    let u0 = a.theta(x);
    let g = GridSpec::pow2(grid.points().max(required_points(a, n)).max(8 * n + 8)).aligned_to(u0);
    let poly = NlPolynomial::new(WarpedAnalysis::new(f, a, &g)?.coefficients(n)?);
    let (left, right) = (f.eval(x - 1e-10).re, f.eval(x + 1e-10).re);
    let upper = left.max(right);
    let jump = (right - left).abs();
    if jump == 0.0 {
        return Err(Error::OutOfRange(format!("no jump at x = {x}")));
    }
    let width = 6.0 * PI / (n as f64 + 1.0);
    let samples = 4000;
    let s = |u: f64| poly.eval_warped(u).re;
    let (mut best_u, mut best) = (u0, f64::NEG_INFINITY);
    for i in 0..=samples {
        let uu = u0 - width + 2.0 * width * i as f64 / samples as f64;
        let v = s(uu);
        if v > best {
            best = v;
            best_u = uu;
        }
    }
    let step = 2.0 * width / samples as f64;
    let (pu, pv) = golden_max(s, best_u - step, best_u + step, 60);
    if pv > best {
        best = pv;
        best_u = pu;
    }
    Ok(GibbsMeasurement {
        jump_at: x,
        upper,
        jump,
        peak: best,
        peak_at: a.theta_inv(best_u),
        overshoot: (best - upper) / jump,
    })
}

/// Parameter box for [`verify_signal`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxConfig {
    pub ns: Vec<usize>,
    #[serde(with = "exponent_list")]
    pub ps: Vec<f64>,
    pub theorems: Vec<Theorem>,
    pub options: VerifyOptions,
}

mod exponent_list {
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(ps: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(ps.len()))?;
        for p in ps {
            seq.serialize_element(&super::format_exponent(*p))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        let v: Vec<String> = Vec::deserialize(d)?;
        v.iter()
            .map(|s| super::parse_exponent(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

impl Default for BoxConfig {
    fn default() -> Self {
        Self {
            ns: vec![2, 4, 8, 16, 32, 64, 128],
            ps: vec![1.0, 2.0, 4.0, f64::INFINITY],
            theorems: Theorem::ALL
                .iter()
                .copied()
                .filter(|t| *t != Theorem::Bernstein)
                .collect(),
            options: VerifyOptions::default(),
        }
    }
}

/// Run every selected approximation check for one `(f, a)` over the box.
/// Continuity-dependent checks are skipped for signals with jumps; the
/// Bernstein check is handled by [`crate::bernstein`].
pub fn verify_signal(f: &Signal, a: &PhaseParam, cfg: &BoxConfig) -> Result<Vec<VerifyReport>> {
    let prep = Prepared::new(f, a, &sweep_grid(a))?;
    let continuous = f.jumps().is_empty();
    let has = |t: Theorem| cfg.theorems.contains(&t);
    let opts = &cfg.options;
    let mut out = Vec::new();
    for &n in &cfg.ns {
        if has(Theorem::Jackson) && continuous && n >= 1 {
            out.push(verify_jackson(&prep, n, opts)?);
        }
        if (has(Theorem::SandwichLower) || has(Theorem::SandwichUpper)) && n >= 1 {
            let t = (1.0 / n as f64).min(PI);
            let [lo, hi] = verify_modulus_sandwich(f, a, t, opts)?;
            let ctx_n = |mut r: VerifyReport| {
                r.context.n = n;
                r
            };
            if has(Theorem::SandwichLower) {
                out.push(ctx_n(lo));
            }
            if has(Theorem::SandwichUpper) {
                out.push(ctx_n(hi));
            }
        }
        if has(Theorem::NearBest) && continuous {
            out.push(verify_near_best(&prep, n, opts)?);
        }
        for &p in &cfg.ps {
            if p.is_infinite() {
                if has(Theorem::Lebesgue) {
                    out.push(verify_lebesgue_bound(&prep, n, opts)?);
                }
                if has(Theorem::Fejer) {
                    out.push(verify_fejer_contraction(&prep, n, p, opts)?);
                }
            } else {
                if has(Theorem::LebesgueLp) {
                    out.push(verify_lebesgue_lp_bound(&prep, n, p, opts)?);
                }
                if has(Theorem::FejerLp) {
                    out.push(verify_fejer_contraction(&prep, n, p, opts)?);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Smoothness;
    use crate::transform::{analyze, partial_sum, Representation};

    fn p(r: f64, ang: f64) -> PhaseParam {
        PhaseParam::new(r, ang).unwrap()
    }

    fn abs_sin() -> Signal {
        Signal::real("abs-sin", Smoothness::Lipschitz { alpha: 1.0, constant: 1.0 }, |t| t.sin().abs())
    }

    fn square() -> Signal {
        Signal::real(
            "square",
            Smoothness::Piecewise { jumps: vec![-PI, 0.0] },
            |t| if wrap_angle(t) >= 0.0 { 1.0 } else { -1.0 },
        )
    }

    #[test]
    fn polynomial_has_zero_error() {
        let a = p(0.6, 0.4);
        let mut c = CoeffVector::zeros(a, 3);
        c.set(2, Complex64::new(0.3, -0.1));
        c.set(-1, Complex64::new(1.0, 0.5));
        let f = NlPolynomial::new(c.clone()).to_signal();
        let g = GridSpec::new(4096).unwrap();
        for q in [1.0, 2.0, 3.0, f64::INFINITY] {
            let b = best_approx_error(&f, &a, 3, q, &g).unwrap();
            assert!(b.error < 1e-10, "p={q} {}", b.error);
            assert!(b.witness.coeffs().max_abs_diff(&c) < 1e-8);
        }
    }

    #[test]
    fn next_basis_element_l2() {
        let n = 4;
        let g = GridSpec::new(4096).unwrap();
        let z = PhaseParam::zero();
        let f = Signal::real("c", Smoothness::Analytic, move |t| ((n + 1) as f64 * t).cos());
        let b = best_approx_error(&f, &z, n, 2.0, &g).unwrap();
        assert!((b.error - 0.5f64.sqrt()).abs() < 1e-12);
        // with a ≠ 0 the dx-minimizer does at least as well as projection
        let a = p(0.5, 0.0);
        let f = Signal::real("cw", Smoothness::Analytic, move |t| ((n + 1) as f64 * a.theta(t)).cos());
        let b = best_approx_error(&f, &a, n, 2.0, &g).unwrap();
        let prep = Prepared::new(&f, &a, &g).unwrap();
        let proj = prep.operator_error(Operator::PartialSum, n, 2.0).unwrap();
        assert!(b.error <= proj + 1e-12);
        let unweighted = Prepared::new(&f, &z, &g).unwrap();
        assert!(unweighted.norm(2.0).unwrap() > 0.0);
    }

    #[test]
    fn projection_and_remez_ordering() {
        let g = GridSpec::new(4096).unwrap();
        let z = PhaseParam::zero();
        for n in [2usize, 4, 8] {
            let e2 = best_approx_error(&abs_sin(), &z, n, 2.0, &g).unwrap();
            let ei = best_approx_error(&abs_sin(), &z, n, f64::INFINITY, &g).unwrap();
            assert!(ei.certified);
            assert!(ei.lower >= e2.error - 1e-12, "n={n}");
        }
    }

    #[test]
    fn best_error_monotone_in_n() {
        let g = GridSpec::new(4096).unwrap();
        let a = p(0.3, 1.0);
        for q in [1.0, 2.0, f64::INFINITY] {
            let errs: Vec<f64> = [1usize, 2, 4, 8]
                .iter()
                .map(|&n| best_approx_error(&abs_sin(), &a, n, q, &g).unwrap().error)
                .collect();
            for w in errs.windows(2) {
                assert!(w[1] <= w[0] * (1.0 + 1e-6), "p={q} {errs:?}");
            }
        }
    }

    #[test]
    fn irls_improves_on_least_squares() {
        let g = GridSpec::new(4096).unwrap();
        let a = p(0.4, 0.0);
        let f = abs_sin();
        let prep = Prepared::new(&f, &a, &g).unwrap();
        let b = best_approx_prepared(&prep, 4, 1.0, &RemezOptions::default()).unwrap();
        let ls = best_approx_prepared(&prep, 4, 2.0, &RemezOptions::default()).unwrap();
        let w: Vec<f64> = g.nodes().map(|u| a.inverse_weight(u)).collect();
        let t = poly_on_grid(ls.witness.coeffs().as_slice(), &g);
        let ls_l1 = weighted_error(prep.analysis().samples(), &t, &w, 1.0);
        assert!(b.error <= ls_l1 + 1e-15);
        assert_eq!(b.method, ApproxMethod::Irls);
    }

    #[test]
    fn warp_invariance_of_sup_approximation() {
        let g = GridSpec::new(4096).unwrap();
        let a = p(0.5, 0.3);
        let f = abs_sin();
        let warped = best_approx_error(&f, &a, 6, f64::INFINITY, &g).unwrap();
        let big = warp_signal(&f, &a);
        let classical = best_approx_error(&big, &PhaseParam::zero(), 6, f64::INFINITY, &g).unwrap();
        assert!((warped.error - classical.error).abs() < 1e-8 * classical.error);
    }

    #[test]
    fn verifiers_pass_on_examples() {
        let opts = VerifyOptions::default();
        let c = Signal::constant(1.5);
        let a = p(0.5, 0.0);
        let prep = Prepared::new(&c, &a, &sweep_grid(&a)).unwrap();
        let j = verify_jackson(&prep, 3, &opts).unwrap();
        assert!(j.pass && j.lhs < 1e-12);
        let fe = verify_fejer_contraction(&prep, 5, f64::INFINITY, &opts).unwrap();
        assert!(fe.pass && (fe.lhs - 1.5).abs() < 1e-12);

        let cos = Signal::real("cos", Smoothness::Analytic, f64::cos);
        let prep = Prepared::new(&cos, &a, &sweep_grid(&a)).unwrap();
        for n in [4usize, 8, 16, 32, 64] {
            assert!(verify_jackson(&prep, n, &opts).unwrap().pass);
        }
        let z = PhaseParam::zero();
        let sq = Prepared::new(&square(), &z, &sweep_grid(&z)).unwrap();
        let l = verify_lebesgue_bound(&sq, 16, &opts).unwrap();
        assert!(l.pass);
        assert!((l.lhs - 1.18).abs() < 0.01, "{}", l.lhs);
        let l1 = verify_lebesgue_lp_bound(&sq, 8, 1.0, &opts).unwrap();
        assert!(l1.pass);
        for n in [4usize, 8, 16] {
            let abs = Prepared::new(&abs_sin(), &z, &sweep_grid(&z)).unwrap();
            let r = verify_near_best(&abs, n, &opts).unwrap();
            assert!(r.pass, "{r:?}");
        }
        let [lo, hi] = verify_modulus_sandwich(&cos, &p(0.7, 0.0), 0.5, &opts).unwrap();
        assert!(lo.pass && hi.pass);
        let [lo, hi] = verify_modulus_sandwich(&square(), &p(0.95, 0.0), 2.0, &opts).unwrap();
        assert!(lo.pass && hi.pass);
        assert!((hi.lhs - 2.0).abs() < 1e-9);
    }

    #[test]
    fn gibbs_matches_classical_sum() {
        let g = GridSpec::new(1 << 16).unwrap();
        let m = gibbs_overshoot(&square(), &PhaseParam::zero(), 64, 0.0, &g).unwrap();
        // classical partial sum Σ_{k odd ≤ n} 4 sin(kx)/(πk), peak near π/(n+1)
        let classical = |x: f64| (1..=64).step_by(2).map(|k| 4.0 * (k as f64 * x).sin() / (PI * k as f64)).sum::<f64>();
        let (_, peak) = golden_max(classical, 0.0, 2.0 * PI / 65.0, 80);
        assert!((m.peak - peak).abs() < 1e-6, "{} {peak}", m.peak);
        assert!((m.overshoot - 0.0895).abs() < 0.01 * 0.0895);
    }

    #[test]
    fn dini_classification() {
        let a = p(0.3, 0.0);
        let cos = Signal::real("cos", Smoothness::Analytic, f64::cos);
        let big = warp_signal(&cos, &a);
        let d = dini_integral(&big, a.theta(0.4), cos.eval(0.4));
        assert!(d.finite && d.estimate.is_some());
        let sq = square();
        let z = PhaseParam::zero();
        let d = dini_integral(&warp_signal(&sq, &z), 0.0, sq.eval(0.0));
        assert!(!d.finite);
    }

    #[test]
    fn pointwise_at_jump_tends_to_midpoint() {
        let g = GridSpec::new(4096).unwrap();
        let z = PhaseParam::zero();
        let r = pointwise_convergence_check(&square(), &z, 0.0, PointwiseCriterion::Dini, &[16, 64, 256], &g).unwrap();
        assert!(!r.criterion_holds);
        let me = r.midpoint_errors.unwrap();
        assert!(me.iter().all(|e| *e < 1e-12));
        assert!(r.errors.iter().all(|e| (e - 1.0).abs() < 1e-12));
        let smooth = pointwise_convergence_check(
            &abs_sin(),
            &p(0.5, 0.0),
            1.0,
            PointwiseCriterion::Holder { alpha: 1.0, constant: 10.0 },
            &[8, 32, 128],
            &g,
        )
        .unwrap();
        assert!(smooth.criterion_holds && smooth.errors_trend_to_zero);
    }

    #[test]
    fn curves_and_exponents() {
        let g = GridSpec::new(4096).unwrap();
        let a = p(0.3, 0.0);
        let f = abs_sin();
        let c = convergence_curve(&f, &a, Operator::Cesaro, f64::INFINITY, &[4, 8, 16, 32], &g).unwrap();
        assert!(c.converging && c.fitted_rate.unwrap() < -0.5);
        assert!(convergence_curve(&f, &a, Operator::Cesaro, 2.0, &[8, 4], &g).is_err());
        assert_eq!(parse_exponent("inf").unwrap(), f64::INFINITY);
        assert!(parse_exponent("0.5").is_err());
        assert_eq!(format_exponent(f64::INFINITY), "inf");
        let ctx = ReportContext::new(&a, 2, f64::INFINITY, "x", 16);
        let r = VerifyReport::new(Theorem::Fejer, 1.0, 2.0, 1.0, 0.0, ctx);
        assert!(r.pass && r.margin == 1.0);
        assert_eq!(parse_theorems("lebesgue").unwrap().len(), 2);
    }

    #[test]
    fn operator_norms_match_signal_norms() {
        let g = GridSpec::new(4096).unwrap();
        let a = p(0.6, 0.2);
        let f = Signal::real("ec", Smoothness::Analytic, |t| t.cos().exp());
        let prep = Prepared::new(&f, &a, &g).unwrap();
        let s = partial_sum(&f, &a, 6, Representation::Coefficient, &g).unwrap();
        let direct = crate::numerics::lp_norm(&s, 2.0, &g).unwrap();
        let via = prep.operator_norm(Operator::PartialSum, 6, 2.0).unwrap();
        assert!((direct - via).abs() < 1e-9, "{direct} {via}");
        let c = analyze(&f, &a, 6, &g).unwrap();
        assert!(c.max_abs_diff(&prep.analysis().coefficients(6).unwrap()) < 1e-9);
        assert!((prep.norm(f64::INFINITY).unwrap() - std::f64::consts::E).abs() < 1e-12);
    }
}
