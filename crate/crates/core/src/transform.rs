//! Nonlinear Fourier analysis and synthesis in the basis `e^{ikθ_a}`.
//!
//! All operators act on `f` through the warped function `F = f ∘ θ_a^{-1}`:
//! `c_k(f)` are the ordinary Fourier coefficients of `F`, and
//! `S_n^a f = (S_n F) ∘ θ_a`.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels;
use crate::numerics::{
    check_exponent, fourier_coefficients, refine, signed_frequency, synthesize_on_grid,
    unwarp_signal, warp_signal, Accumulator, GridSpec, Refined, Refinement, Signal, Smoothness,
};
use crate::phase::PhaseParam;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Coefficients `c_{-n}, …, c_n` with respect to `e^{ikθ_a}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffVector {
    a: PhaseParam,
    degree: usize,
    coeffs: Vec<Complex64>,
}

impl CoeffVector {
    /// `coeffs[j]` is `c_{j-n}`; the length must be odd.
    pub fn new(a: PhaseParam, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len().is_multiple_of(2) {
            return Err(Error::BadCoefficientLength(coeffs.len()));
        }
        Ok(Self {
            a,
            degree: coeffs.len() / 2,
            coeffs,
        })
    }

    pub fn zeros(a: PhaseParam, n: usize) -> Self {
        Self {
            a,
            degree: n,
            coeffs: vec![ZERO; 2 * n + 1],
        }
    }

    pub fn from_fn<F: FnMut(i64) -> Complex64>(a: PhaseParam, n: usize, mut f: F) -> Self {
        let n_i = n as i64;
        Self {
            a,
            degree: n,
            coeffs: (-n_i..=n_i).map(&mut f).collect(),
        }
    }

    pub fn a(&self) -> PhaseParam {
        self.a
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `c_k`, zero beyond the stored degree.
    pub fn get(&self, k: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.degree {
            ZERO
        } else {
            self.coeffs[(k + self.degree as i64) as usize]
        }
    }

    /// Panics if `|k|` exceeds the degree.
    pub fn set(&mut self, k: i64, v: Complex64) {
        assert!(k.unsigned_abs() as usize <= self.degree, "index {k} out of range");
        let idx = (k + self.degree as i64) as usize;
        self.coeffs[idx] = v;
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let n = self.degree as i64;
        self.coeffs.iter().enumerate().map(move |(j, c)| (j as i64 - n, *c))
    }

    /// `(a_k, b_k)` with `a_k = c_k + c_{-k}` and `b_k = (c_k - c_{-k})/i`.
    pub fn real_form(&self, k: usize) -> (Complex64, Complex64) {
        let k = k as i64;
        let (p, m) = (self.get(k), self.get(-k));
        (p + m, (p - m) / I)
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest `|c_k - d_k|` over the union of both index ranges.
    pub fn max_abs_diff(&self, other: &CoeffVector) -> f64 {
        let n = self.degree.max(other.degree) as i64;
        (-n..=n)
            .map(|k| (self.get(k) - other.get(k)).norm())
            .fold(0.0, f64::max)
    }

    /// `max_k |c_{-k} - conj(c_k)|`; zero for real sources.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let n = self.degree as i64;
        (0..=n)
            .map(|k| (self.get(-k) - self.get(k).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Restrict (or zero-pad) to degree `m`.
    pub fn truncated(&self, m: usize) -> Self {
        Self::from_fn(self.a, m, |k| self.get(k))
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self::from_fn(self.a, self.degree, |k| s * self.get(k))
    }

    /// Coefficientwise sum; the phase of `self` is kept.
    pub fn added(&self, other: &CoeffVector) -> Self {
        Self::from_fn(self.a, self.degree.max(other.degree), |k| {
            self.get(k) + other.get(k)
        })
    }

    /// Triangular weights `(1 - |k|/(n+1)) c_k`, `|k| ≤ n`.
    pub fn fejer_weighted(&self, n: usize) -> Self {
        let m = (n + 1) as f64;
        Self::from_fn(self.a, n, |k| {
            (1.0 - k.unsigned_abs() as f64 / m) * self.get(k)
        })
    }

    /// `k,re,im` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::Csv(e.to_string());
        w.write_record(["k", "re", "im"]).map_err(csv_err)?;
        for (k, c) in self.iter() {
            w.write_record([k.to_string(), c.re.to_string(), c.im.to_string()])
                .map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::Csv(e.to_string()))
    }

    /// Parse `k,re,im` rows as written by [`CoeffVector::write_csv`].
    pub fn read_csv<R: std::io::Read>(a: PhaseParam, input: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(input);
        let mut rows: Vec<(i64, Complex64)> = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::Csv(e.to_string()))?;
            let field = |i: usize| rec.get(i).ok_or_else(|| Error::Csv(format!("short row {rec:?}")));
            let bad = |e: &dyn fmt::Display| Error::Csv(format!("{e} in row {rec:?}"));
            let k: i64 = field(0)?.parse().map_err(|e| bad(&e))?;
            let re: f64 = field(1)?.parse().map_err(|e| bad(&e))?;
            let im: f64 = field(2)?.parse().map_err(|e| bad(&e))?;
            rows.push((k, Complex64::new(re, im)));
        }
        let n = rows.iter().map(|(k, _)| k.unsigned_abs() as usize).max().unwrap_or(0);
        let mut cv = Self::zeros(a, n);
        for (k, c) in rows {
            cv.set(k, c);
        }
        Ok(cv)
    }
}

/// Element of `τ_n^a`: `t ↦ Σ c_k e^{ikθ_a(t)}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NlPolynomial {
    coeffs: CoeffVector,
}

impl NlPolynomial {
    pub fn new(coeffs: CoeffVector) -> Self {
        Self { coeffs }
    }

    pub fn a(&self) -> PhaseParam {
        self.coeffs.a
    }

    pub fn degree(&self) -> usize {
        self.coeffs.degree
    }

    pub fn coeffs(&self) -> &CoeffVector {
        &self.coeffs
    }

    /// `Σ c_k w^k` for `|w| = 1`, by Horner's rule.
    pub fn eval_unit(&self, w: Complex64) -> Complex64 {
        horner(&self.coeffs.coeffs, w, self.coeffs.degree)
    }

    /// The classical polynomial `T(u) = Σ c_k e^{iku}` on the warped axis.
    pub fn eval_warped(&self, u: f64) -> Complex64 {
        self.eval_unit(Complex64::from_polar(1.0, u))
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        self.eval_warped(self.a().theta(t))
    }

    /// `T'(u) = Σ ik c_k e^{iku}`.
    pub fn derivative_warped(&self, u: f64) -> Complex64 {
        let n = self.coeffs.degree as i64;
        let d: Vec<Complex64> = self
            .coeffs
            .iter()
            .map(|(k, c)| I * k as f64 * c)
            .collect();
        debug_assert_eq!(d.len() as i64, 2 * n + 1);
        horner(&d, Complex64::from_polar(1.0, u), self.coeffs.degree)
    }

    /// `p_a(t) · Σ ik c_k e^{ikθ_a(t)}`.
    pub fn derivative_at(&self, t: f64) -> Complex64 {
        let a = self.a();
        self.derivative_warped(a.theta(t)) * a.poisson_weight(t)
    }

    pub fn to_signal(&self) -> Signal {
        let (p, dp) = (self.clone(), self.clone());
        let real = self.coeffs.conjugate_symmetry_defect() == 0.0;
        Signal::generator(
            format!("nlpoly(n={})", self.degree()),
            Smoothness::Analytic,
            move |t| p.eval(t),
        )
        .with_derivative(move |t| dp.derivative_at(t))
        .with_real_flag(real)
    }
}

fn horner(c: &[Complex64], w: Complex64, n: usize) -> Complex64 {
    let mut acc = ZERO;
    for v in c.iter().rev() {
        acc = acc * w + v;
    }
    // acc = Σ c_{j-n} w^j
    acc * w.conj().powu(n as u32)
}

/// Evaluate `p` at `t`.
pub fn synthesize(p: &NlPolynomial, t: f64) -> Complex64 {
    p.eval(t)
}

/// Minimum grid size [`analyze`] accepts for degree `n`.
pub fn required_points(a: &PhaseParam, n: usize) -> usize {
    let peak = (64.0 / (1.0 - a.modulus()) - 1e-9).ceil() as usize;
    (8 * n).max(peak).max(GridSpec::MIN_POINTS)
}

fn check_resolution(a: &PhaseParam, n: usize, grid: &GridSpec) -> Result<()> {
    let required = required_points(a, n);
    if grid.points() < required {
        return Err(Error::Undersampled {
            points: grid.points(),
            required,
        });
    }
    Ok(())
}

/// `c_k = (1/2π) ∫ f(t) e^{-ikθ_a(t)} p_a(t) dt`, `|k| ≤ n`, by the
/// trapezoid rule in `t`.
pub fn analyze(f: &Signal, a: &PhaseParam, n: usize, grid: &GridSpec) -> Result<CoeffVector> {
    check_resolution(a, n, grid)?;
    let mut acc = vec![Accumulator::default(); 2 * n + 1];
    for (j, t) in grid.nodes().enumerate() {
        let v = f.eval_node(t) * a.poisson_weight(t);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite { index: j, t });
        }
        let w = Complex64::from_polar(1.0, -a.theta(t));
        acc[n].add(v);
        let (mut plus, mut minus) = (v, v);
        for k in 1..=n {
            plus *= w;
            minus *= w.conj();
            acc[n + k].add(plus);
            acc[n - k].add(minus);
        }
    }
    let scale = (grid.points() as f64).recip();
    Ok(CoeffVector {
        a: *a,
        degree: n,
        coeffs: acc.iter().map(|c| c.value() * scale).collect(),
    })
}

/// [`analyze`] on doubling grids until successive results agree to `1e-9`.
pub fn analyze_auto(f: &Signal, a: &PhaseParam, n: usize) -> Result<Refined<CoeffVector>> {
    let cfg = Refinement {
        start: required_points(a, n).max(GridSpec::DEFAULT_POINTS),
        ..Refinement::default()
    };
    refine(cfg, 0.0, |g| analyze(f, a, n, g), |x, y| x.max_abs_diff(y))
}

/// Samples of `F = f ∘ θ_a^{-1}` on a uniform `u`-grid and their FFT.
///
/// By the substitution `u = θ_a(t)` these are the nonlinear coefficients of
/// `f` for every `|k| < N/2` at once.
#[derive(Debug, Clone)]
pub struct WarpedAnalysis {
    a: PhaseParam,
    grid: GridSpec,
    samples: Vec<Complex64>,
    spectrum: Vec<Complex64>,
}

impl WarpedAnalysis {
    pub fn new(f: &Signal, a: &PhaseParam, grid: &GridSpec) -> Result<Self> {
        if !grid.is_pow2() {
            return Err(Error::NotPowerOfTwo(grid.points()));
        }
        let big = warp_signal(f, a);
        let mut samples = Vec::with_capacity(grid.points());
        for (j, u) in grid.nodes().enumerate() {
            let v = big.eval_node(u);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFinite { index: j, t: u });
            }
            samples.push(v);
        }
        let spectrum = fourier_coefficients(&samples, grid);
        Ok(Self {
            a: *a,
            grid: *grid,
            samples,
            spectrum,
        })
    }

    pub fn a(&self) -> PhaseParam {
        self.a
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    /// `F(u_j)` at the grid nodes.
    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    /// Highest degree resolved by the grid.
    pub fn max_degree(&self) -> usize {
        self.grid.points() / 2 - 1
    }

    pub fn coefficient(&self, k: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.max_degree() {
            ZERO
        } else {
            self.spectrum[k.rem_euclid(self.grid.points() as i64) as usize]
        }
    }

    pub fn coefficients(&self, n: usize) -> Result<CoeffVector> {
        if n > self.max_degree() {
            return Err(Error::Undersampled {
                points: self.grid.points(),
                required: 2 * n + 2,
            });
        }
        Ok(CoeffVector::from_fn(self.a, n, |k| self.coefficient(k)))
    }

    /// `Σ_k w(k) c_k e^{iku_j}` at the nodes, over `|k| < N/2`.
    pub fn filtered_samples<W: Fn(i64) -> f64>(&self, weight: W) -> Vec<Complex64> {
        let n = self.grid.points();
        let spec: Vec<Complex64> = self
            .spectrum
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if i == n / 2 {
                    ZERO
                } else {
                    c * weight(signed_frequency(i, n))
                }
            })
            .collect();
        synthesize_on_grid(&spec, &self.grid)
    }

    /// `(S_n F)(u_j)`, i.e. `S_n^a f` at `x_j = θ_a^{-1}(u_j)`.
    pub fn partial_sum_samples(&self, n: usize) -> Vec<Complex64> {
        self.filtered_samples(|k| Operator::PartialSum.weight(n, k))
    }

    /// `(σ_n F)(u_j)`.
    pub fn cesaro_samples(&self, n: usize) -> Vec<Complex64> {
        self.filtered_samples(|k| Operator::Cesaro.weight(n, k))
    }

    /// `∥g∥_p` in `x` for `g ∘ θ_a^{-1}` given at the `u`-nodes.
    pub fn x_norm(&self, values: &[Complex64], p: f64) -> Result<f64> {
        warped_lp_norm(values, &self.a, p, &self.grid)
    }
}

/// `∥g∥_{L^p(dx)}` from `G = g ∘ θ_a^{-1}` sampled on `grid`:
/// `(1/2π)∫|g|^p dx = (1/2π)∫|G(u)|^p p_{-a}(u) du`.
pub fn warped_lp_norm(values: &[Complex64], a: &PhaseParam, p: f64, grid: &GridSpec) -> Result<f64> {
    check_exponent(p)?;
    if p.is_infinite() {
        return Ok(values.iter().map(|v| v.norm()).fold(0.0, f64::max));
    }
    let mut acc = Accumulator::default();
    for (v, u) in values.iter().zip(grid.nodes()) {
        acc.add(Complex64::new(v.norm().powf(p) * a.inverse_weight(u), 0.0));
    }
    Ok((acc.value().re / values.len() as f64).powf(1.0 / p))
}

/// Coefficients by FFT of the warped samples.
pub fn analyze_warped(f: &Signal, a: &PhaseParam, n: usize, grid: &GridSpec) -> Result<CoeffVector> {
    WarpedAnalysis::new(f, a, grid)?.coefficients(n)
}

/// Summation operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operator {
    /// `S_n^a`, Dirichlet kernel.
    PartialSum,
    /// `σ_n^a`, Fejér kernel.
    Cesaro,
}

impl Operator {
    pub fn kernel(self, n: usize, t: f64) -> f64 {
        match self {
            Operator::PartialSum => kernels::dirichlet(n, t),
            Operator::Cesaro => kernels::fejer(n, t),
        }
    }

    /// Multiplier applied to `c_k`.
    pub fn weight(self, n: usize, k: i64) -> f64 {
        let m = k.unsigned_abs() as usize;
        if m > n {
            return 0.0;
        }
        match self {
            Operator::PartialSum => 1.0,
            Operator::Cesaro => 1.0 - m as f64 / (n + 1) as f64,
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Operator::PartialSum => "partial_sum",
            Operator::Cesaro => "cesaro",
        })
    }
}

impl FromStr for Operator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "partial_sum" | "s" | "dirichlet" => Ok(Operator::PartialSum),
            "cesaro" | "fejer" | "sigma" => Ok(Operator::Cesaro),
            other => Err(Error::OutOfRange(format!(
                "unknown operator '{other}' (expected partial_sum or cesaro)"
            ))),
        }
    }
}

/// How an operator is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    /// Synthesis from coefficients; for `σ_n^a` the literal average of
    /// `S_0^a, …, S_n^a`.
    Coefficient,
    /// `(1/π) ∫ f(t) K(θ_a(x) - θ_a(t)) p_a(t) dt`.
    KernelWarped,
    /// `(1/π) ∫ F(θ_a(x) + t) K(t) dt`.
    KernelDirect,
    /// `(1/π) ∫_0^π {F(θ_a(x) - t) + F(θ_a(x) + t)} K(t) dt`.
    KernelHalfRange,
}

impl Representation {
    pub const ALL: [Representation; 4] = [
        Representation::Coefficient,
        Representation::KernelWarped,
        Representation::KernelDirect,
        Representation::KernelHalfRange,
    ];
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Representation::Coefficient => "coeff",
            Representation::KernelWarped => "kernel_warped",
            Representation::KernelDirect => "kernel_direct",
            Representation::KernelHalfRange => "kernel_half_range",
        })
    }
}

impl FromStr for Representation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "coeff" | "coefficient" | "average" => Ok(Representation::Coefficient),
            "kernel_warped" => Ok(Representation::KernelWarped),
            "kernel_direct" => Ok(Representation::KernelDirect),
            "kernel_half_range" | "kernel_half" => Ok(Representation::KernelHalfRange),
            other => Err(Error::OutOfRange(format!(
                "unknown method '{other}' (expected coeff, average, kernel_warped, kernel_direct or kernel_half_range)"
            ))),
        }
    }
}

/// Quadrature data shared by the kernel representations of `f`.
#[derive(Clone)]
pub struct KernelQuadrature {
    a: PhaseParam,
    grid: GridSpec,
    shifts: GridSpec,
    warped: Signal,
    weighted: Vec<Complex64>,
    phases: Vec<f64>,
}

impl fmt::Debug for KernelQuadrature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KernelQuadrature")
            .field("a", &self.a)
            .field("grid", &self.grid)
            .field("signal", &self.warped.name())
            .finish()
    }
}

impl KernelQuadrature {
    pub fn new(f: &Signal, a: &PhaseParam, grid: &GridSpec) -> Result<Self> {
        if !grid.points().is_multiple_of(2) {
            return Err(Error::OutOfRange(format!(
                "kernel quadrature needs an even grid, got {}",
                grid.points()
            )));
        }
        let mut weighted = Vec::with_capacity(grid.points());
        let mut phases = Vec::with_capacity(grid.points());
        for (j, t) in grid.nodes().enumerate() {
            let v = f.eval_node(t) * a.poisson_weight(t);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFinite { index: j, t });
            }
            weighted.push(v);
            phases.push(a.theta(t));
        }
        Ok(Self {
            a: *a,
            grid: *grid,
            shifts: GridSpec::new(grid.points())?,
            warped: warp_signal(f, a),
            weighted,
            phases,
        })
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    /// `(1/π) ∫ f(t) K(θ_a(x) - θ_a(t)) p_a(t) dt`.
    pub fn warped_kernel(&self, op: Operator, n: usize, x: f64) -> Complex64 {
        let tx = self.a.theta(x);
        let mut acc = Accumulator::default();
        for (v, th) in self.weighted.iter().zip(&self.phases) {
            acc.add(v * op.kernel(n, tx - th));
        }
        acc.value() * (2.0 / self.grid.points() as f64)
    }

    /// `F(θ_a(x) + s_j)` for the shift nodes `s_j = -π + 2πj/N`.
    pub fn shifted_samples(&self, x: f64) -> Vec<Complex64> {
        let u = self.a.theta(x);
        self.shifts.nodes().map(|s| self.warped.eval_node(u + s)).collect()
    }

    /// `(1/π) ∫ F(θ_a(x) + t) K(t) dt` from [`Self::shifted_samples`].
    pub fn direct_from(&self, shifted: &[Complex64], op: Operator, n: usize) -> Complex64 {
        let mut acc = Accumulator::default();
        for (v, s) in shifted.iter().zip(self.shifts.nodes()) {
            acc.add(v * op.kernel(n, s));
        }
        acc.value() * (2.0 / shifted.len() as f64)
    }

    /// `(1/π) ∫_0^π {F(θ_a(x) - t) + F(θ_a(x) + t)} K(t) dt` by the
    /// trapezoid rule on `[0, π]` from [`Self::shifted_samples`].
    pub fn half_range_from(&self, shifted: &[Complex64], op: Operator, n: usize) -> Complex64 {
        let len = shifted.len();
        let m = len / 2;
        let h = 2.0 * PI / len as f64;
        // node m is s = 0, node 0 is s = -π ≡ π
        let pair = |i: usize| {
            if i == m {
                shifted[0] + shifted[0]
            } else {
                shifted[m - i] + shifted[m + i]
            }
        };
        let mut acc = Accumulator::default();
        acc.add(0.5 * pair(0) * op.kernel(n, 0.0));
        for i in 1..m {
            acc.add(pair(i) * op.kernel(n, i as f64 * h));
        }
        acc.add(0.5 * pair(m) * op.kernel(n, PI));
        acc.value() * (h / PI)
    }

    pub fn direct(&self, op: Operator, n: usize, x: f64) -> Complex64 {
        self.direct_from(&self.shifted_samples(x), op, n)
    }

    pub fn half_range(&self, op: Operator, n: usize, x: f64) -> Complex64 {
        self.half_range_from(&self.shifted_samples(x), op, n)
    }

    /// Kernel representation `rep` at `x`. `Coefficient` is not a kernel
    /// form and is rejected.
    pub fn evaluate(&self, op: Operator, rep: Representation, n: usize, x: f64) -> Result<Complex64> {
        match rep {
            Representation::KernelWarped => Ok(self.warped_kernel(op, n, x)),
            Representation::KernelDirect => Ok(self.direct(op, n, x)),
            Representation::KernelHalfRange => Ok(self.half_range(op, n, x)),
            Representation::Coefficient => Err(Error::OutOfRange(
                "coefficient representation has no kernel form".into(),
            )),
        }
    }
}

/// `(1/(n+1)) Σ_{m=0}^n S_m` on coefficient vectors, summed literally.
pub fn average_partial_sums(c: &CoeffVector, n: usize) -> CoeffVector {
    let mut acc = CoeffVector::zeros(c.a, n);
    for m in 0..=n {
        acc = acc.added(&c.truncated(m));
    }
    acc.scaled(Complex64::new(1.0 / (n + 1) as f64, 0.0))
}

/// `S_n^a f` or `σ_n^a f` as a signal evaluated through `rep`.
pub fn apply_operator(
    f: &Signal,
    a: &PhaseParam,
    n: usize,
    op: Operator,
    rep: Representation,
    grid: &GridSpec,
) -> Result<Signal> {
    let name = format!("{op}[{rep},n={n}]({})", f.name());
    match rep {
        Representation::Coefficient => {
            let c = analyze(f, a, n, grid)?;
            let c = match op {
                Operator::PartialSum => c,
                Operator::Cesaro => average_partial_sums(&c, n),
            };
            Ok(NlPolynomial::new(c).to_signal().renamed(name).with_real_flag(f.is_real()))
        }
        _ => {
            let q = Arc::new(KernelQuadrature::new(f, a, grid)?);
            Ok(Signal::generator(name, Smoothness::Analytic, move |x| {
                q.evaluate(op, rep, n, x).unwrap_or(ZERO)
            })
            .with_real_flag(f.is_real()))
        }
    }
}

/// `S_n^a f`.
pub fn partial_sum(
    f: &Signal,
    a: &PhaseParam,
    n: usize,
    rep: Representation,
    grid: &GridSpec,
) -> Result<Signal> {
    apply_operator(f, a, n, Operator::PartialSum, rep, grid)
}

/// `σ_n^a f = (1/(n+1)) Σ_{k=0}^n S_k^a f`.
pub fn cesaro_mean(
    f: &Signal,
    a: &PhaseParam,
    n: usize,
    rep: Representation,
    grid: &GridSpec,
) -> Result<Signal> {
    apply_operator(f, a, n, Operator::Cesaro, rep, grid)
}

/// Warped convolution `(F ∗ G) ∘ θ_a` with `F ∗ G = (1/2π) ∫ F(· - s) G(s) ds`;
/// its coefficients are `c_k(f) c_k(g)`.
pub fn a_convolution(f: &Signal, g: &Signal, a: &PhaseParam, grid: &GridSpec) -> Result<Signal> {
    let grid = GridSpec::new(grid.points())?;
    let wf = WarpedAnalysis::new(f, a, &grid)?;
    let wg = WarpedAnalysis::new(g, a, &grid)?;
    let n = grid.points();
    let prod: Vec<Complex64> = (0..n)
        .map(|i| {
            if i == n / 2 {
                ZERO
            } else {
                wf.spectrum[i] * wg.spectrum[i]
            }
        })
        .collect();
    let samples = synthesize_on_grid(&prod, &grid);
    let h = Signal::from_samples(format!("warp({}*{})", f.name(), g.name()), samples)?;
    let real = f.is_real() && g.is_real();
    Ok(unwarp_signal(&h, a)
        .renamed(format!("conv[a]({},{})", f.name(), g.name()))
        .with_real_flag(real)
        .with_smoothness(Smoothness::Analytic))
}

/// Coefficients of `f'` together with the measured ratios
/// `c_k(f') / (ik c_k(f))`.
#[derive(Debug, Clone, Serialize)]
pub struct DerivativeCoefficients {
    pub coeffs: CoeffVector,
    /// `None` where `ik c_k(f)` is negligible.
    pub ratios: Vec<(i64, Option<Complex64>)>,
    /// The constant `(1+|a|)/(1-|a|)` a diagonal rule would predict.
    pub predicted_factor: f64,
}

pub fn derivative_coeffs(
    f: &Signal,
    a: &PhaseParam,
    n: usize,
    grid: &GridSpec,
) -> Result<DerivativeCoefficients> {
    if !f.has_derivative() {
        return Err(Error::NotDifferentiable(f.name().to_string()));
    }
    let src = f.clone();
    let df = Signal::generator(format!("d/dx {}", f.name()), Smoothness::Unknown, move |t| {
        src.derivative_at(t).unwrap_or(ZERO)
    });
    let dc = analyze(&df, a, n, grid)?;
    let c = analyze(f, a, n, grid)?;
    let floor = 1e-12 * c.iter().map(|(k, v)| k.unsigned_abs() as f64 * v.norm()).fold(0.0, f64::max);
    let ratios = c
        .iter()
        .map(|(k, v)| {
            let base = I * k as f64 * v;
            let r = if base.norm() > floor && base.norm() > 0.0 {
                Some(dc.get(k) / base)
            } else {
                None
            };
            (k, r)
        })
        .collect();
    Ok(DerivativeCoefficients {
        coeffs: dc,
        ratios,
        predicted_factor: a.distortion(),
    })
}

/// Maximum `|c_k|` over `lo ≤ |k| ≤ hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Band {
    pub lo: usize,
    pub hi: usize,
    pub max: f64,
}

/// Coefficient magnitudes up to `n_max` with dyadic band maxima.
#[derive(Debug, Clone, Serialize)]
pub struct DecayProfile {
    pub magnitudes: Vec<(i64, f64)>,
    /// `max_{n_max/2 < |k| ≤ n_max} |c_k|`.
    pub tail_max: f64,
    /// Bands `[1,1], [2,3], [4,7], …` capped at `n_max`.
    pub bands: Vec<Band>,
}

impl DecayProfile {
    /// Band maxima never increase by more than `tol`.
    pub fn bands_nonincreasing(&self, tol: f64) -> bool {
        self.bands.windows(2).all(|w| w[1].max <= w[0].max + tol)
    }
}

pub fn riemann_lebesgue_profile(
    f: &Signal,
    a: &PhaseParam,
    n_max: usize,
    grid: &GridSpec,
) -> Result<DecayProfile> {
    let c = analyze_warped(f, a, n_max, grid)?;
    let magnitudes: Vec<(i64, f64)> = c.iter().map(|(k, v)| (k, v.norm())).collect();
    let band_max = |lo: usize, hi: usize| {
        magnitudes
            .iter()
            .filter(|(k, _)| {
                let m = k.unsigned_abs() as usize;
                m >= lo && m <= hi
            })
            .map(|(_, v)| *v)
            .fold(0.0, f64::max)
    };
    let tail_max = band_max(n_max / 2 + 1, n_max);
    let mut bands = Vec::new();
    let mut lo = 1;
    while lo <= n_max {
        let hi = (2 * lo - 1).min(n_max);
        bands.push(Band {
            lo,
            hi,
            max: band_max(lo, hi),
        });
        lo *= 2;
    }
    Ok(DecayProfile {
        magnitudes,
        tail_max,
        bands,
    })
}
