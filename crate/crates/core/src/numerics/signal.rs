//! Periodic signals: analytic generators or uniform samples with
//! trigonometric interpolation.

use std::f64::consts::PI;
use std::fmt;
use std::io::Read;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{fourier_coefficients, signed_frequency, GridSpec};
use crate::error::{Error, Result};
use crate::phase::{wrap_angle, PhaseParam};

type EvalFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// Declared regularity of a signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Smoothness {
    Analytic,
    /// `|f(x) - f(y)| ≤ constant · |x - y|^alpha`.
    Lipschitz { alpha: f64, constant: f64 },
    /// Smooth between the listed jump points (angles in `[-π, π)`).
    Piecewise { jumps: Vec<f64> },
    Unknown,
}

impl Smoothness {
    pub fn is_continuous(&self) -> bool {
        matches!(self, Smoothness::Analytic | Smoothness::Lipschitz { .. })
    }
}

#[derive(Clone)]
enum Repr {
    Generator(EvalFn),
    Samples(Arc<TrigInterp>),
}

/// A `2π`-periodic function `T → C`.
#[derive(Clone)]
pub struct Signal {
    name: String,
    smoothness: Smoothness,
    real: bool,
    repr: Repr,
    derivative: Option<EvalFn>,
}

impl fmt::Debug for Signal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.repr {
            Repr::Generator(_) => "generator".to_string(),
            Repr::Samples(s) => format!("samples[{}]", s.grid.points()),
        };
        f.debug_struct("Signal")
            .field("name", &self.name)
            .field("kind", &kind)
            .field("smoothness", &self.smoothness)
            .field("real", &self.real)
            .field("differentiable", &self.derivative.is_some())
            .finish()
    }
}

impl Signal {
    /// Complex-valued generator. The rule must be `2π`-periodic.
    pub fn generator<F>(name: impl Into<String>, smoothness: Smoothness, f: F) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            smoothness,
            real: false,
            repr: Repr::Generator(Arc::new(f)),
            derivative: None,
        }
    }

    /// Real-valued generator.
    pub fn real<F>(name: impl Into<String>, smoothness: Smoothness, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let mut s = Self::generator(name, smoothness, move |t| Complex64::new(f(t), 0.0));
        s.real = true;
        s
    }

    pub fn constant(c: f64) -> Self {
        Self::real(format!("constant:{c}"), Smoothness::Analytic, move |_| c)
            .with_real_derivative(|_| 0.0)
    }

    pub fn with_derivative<F>(mut self, df: F) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        self.derivative = Some(Arc::new(df));
        self
    }

    pub fn with_real_derivative<F>(self, df: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.with_derivative(move |t| Complex64::new(df(t), 0.0))
    }

    pub(crate) fn with_real_flag(mut self, real: bool) -> Self {
        self.real = real;
        self
    }

    pub(crate) fn with_smoothness(mut self, smoothness: Smoothness) -> Self {
        self.smoothness = smoothness;
        self
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Samples on `t_j = -π + 2πj/N`; `N` must be a power of two `≥ 16`.
    pub fn from_samples(name: impl Into<String>, values: Vec<Complex64>) -> Result<Self> {
        let n = values.len();
        if n < GridSpec::MIN_POINTS {
            return Err(Error::GridTooSmall {
                points: n,
                min: GridSpec::MIN_POINTS,
            });
        }
        if !n.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(n));
        }
        if let Some(index) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite {
                index,
                t: GridSpec::pow2(n).node(index),
            });
        }
        let real = values.iter().all(|v| v.im == 0.0);
        let interp = TrigInterp::new(&values, GridSpec::pow2(n));
        Ok(Self {
            name: name.into(),
            smoothness: Smoothness::Unknown,
            real,
            repr: Repr::Samples(Arc::new(interp)),
            derivative: None,
        })
    }

    /// Read `t,value[,imag]` rows (header optional) and resample onto a
    /// power-of-two grid.
    pub fn from_csv_reader<R: Read>(name: impl Into<String>, reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut rows: Vec<(f64, Complex64)> = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Csv(e.to_string()))?;
            if rec.len() < 2 || rec.len() > 3 {
                return Err(Error::Csv(format!(
                    "row {}: expected 2 or 3 columns, got {}",
                    i + 1,
                    rec.len()
                )));
            }
            let parsed: std::result::Result<Vec<f64>, _> =
                rec.iter().map(|s| s.parse::<f64>()).collect();
            match parsed {
                Ok(v) => {
                    let im = v.get(2).copied().unwrap_or(0.0);
                    rows.push((v[0], Complex64::new(v[1], im)));
                }
                Err(_) if i == 0 => continue,
                Err(e) => return Err(Error::Csv(format!("row {}: {e}", i + 1))),
            }
        }
        Self::from_scattered(name, rows)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path)
            .map_err(|e| Error::Csv(format!("{}: {e}", path.display())))?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "csv".into());
        Self::from_csv_reader(name, file)
    }

    /// Resample `(t, value)` pairs onto the grid `-π + 2πj/N`,
    /// `N = max(16, next_pow2(len))`, by periodic linear interpolation.
    /// Data already on that grid is taken verbatim.
    pub fn from_scattered(name: impl Into<String>, rows: Vec<(f64, Complex64)>) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::Csv(format!("need at least 2 samples, got {}", rows.len())));
        }
        if let Some(index) = rows.iter().position(|(t, v)| !(t.is_finite() && v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite { index, t: rows[index].0 });
        }
        let grid = GridSpec::pow2(rows.len());
        let n = grid.points();
        let mut pts: Vec<(f64, Complex64)> =
            rows.into_iter().map(|(t, v)| (wrap_angle(t), v)).collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        pts.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-14);

        let on_grid = pts.len() == n
            && pts
                .iter()
                .enumerate()
                .all(|(j, (t, _))| (t - grid.node(j)).abs() < 1e-9);
        let values: Vec<Complex64> = if on_grid {
            pts.iter().map(|p| p.1).collect()
        } else {
            grid.nodes().map(|t| periodic_linear(&pts, t)).collect()
        };
        Self::from_samples(name, values)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn smoothness(&self) -> &Smoothness {
        &self.smoothness
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn is_sampled(&self) -> bool {
        matches!(self.repr, Repr::Samples(_))
    }

    pub fn has_derivative(&self) -> bool {
        self.derivative.is_some()
    }

    /// Jump points in `[-π, π)` (empty unless piecewise).
    pub fn jumps(&self) -> &[f64] {
        match &self.smoothness {
            Smoothness::Piecewise { jumps } => jumps,
            _ => &[],
        }
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        match &self.repr {
            Repr::Generator(f) => f(t),
            Repr::Samples(s) => s.eval(t),
        }
    }

    /// Value used at quadrature nodes: the mean of one-sided limits at a jump.
    pub fn eval_node(&self, t: f64) -> Complex64 {
        if self.jumps().iter().any(|j| wrap_angle(t - j).abs() < 1e-12) {
            let d = 1e-10;
            return 0.5 * (self.eval(t - d) + self.eval(t + d));
        }
        self.eval(t)
    }

    pub fn derivative_at(&self, t: f64) -> Option<Complex64> {
        self.derivative.as_ref().map(|d| d(t))
    }

    /// Values at the nodes of `grid`.
    pub fn sample(&self, grid: &GridSpec) -> Vec<Complex64> {
        grid.nodes().map(|t| self.eval_node(t)).collect()
    }

    /// `A f + B g`.
    pub fn linear_combination(wa: Complex64, f: &Signal, wb: Complex64, g: &Signal) -> Signal {
        let (f1, g1) = (f.clone(), g.clone());
        let mut jumps: Vec<f64> = f.jumps().iter().chain(g.jumps()).copied().collect();
        jumps.sort_by(f64::total_cmp);
        let smoothness = if !jumps.is_empty() {
            Smoothness::Piecewise { jumps }
        } else if f.smoothness == Smoothness::Analytic && g.smoothness == Smoothness::Analytic {
            Smoothness::Analytic
        } else {
            Smoothness::Unknown
        };
        let mut out = Signal::generator(
            format!("({wa})*{} + ({wb})*{}", f.name, g.name),
            smoothness,
            move |t| wa * f1.eval(t) + wb * g1.eval(t),
        );
        out.real = f.real && g.real && wa.im == 0.0 && wb.im == 0.0;
        if f.has_derivative() && g.has_derivative() {
            let (f2, g2) = (f.clone(), g.clone());
            out = out.with_derivative(move |t| {
                wa * f2.derivative_at(t).unwrap() + wb * g2.derivative_at(t).unwrap()
            });
        }
        out
    }
}

fn periodic_linear(pts: &[(f64, Complex64)], t: f64) -> Complex64 {
    let n = pts.len();
    let idx = pts.partition_point(|p| p.0 <= t);
    let (lo, hi) = if idx == 0 {
        (pts[n - 1], (pts[0].0, pts[0].1))
    } else if idx == n {
        (pts[n - 1], pts[0])
    } else {
        (pts[idx - 1], pts[idx])
    };
    let (mut t0, mut t1) = (lo.0, hi.0);
    let mut tt = t;
    if t1 <= t0 {
        // wrap segment
        t1 += 2.0 * PI;
        if tt < t0 {
            tt += 2.0 * PI;
        }
    }
    if t1 - t0 <= 0.0 {
        return lo.1;
    }
    if tt < t0 {
        t0 -= 2.0 * PI;
        t1 -= 2.0 * PI;
    }
    let w = ((tt - t0) / (t1 - t0)).clamp(0.0, 1.0);
    lo.1 * (1.0 - w) + hi.1 * w
}

/// Trigonometric interpolant of uniform samples.
struct TrigInterp {
    grid: GridSpec,
    /// Classical coefficients `ĉ_k`, `|k| < N/2`, in DFT order.
    coeffs: Vec<Complex64>,
    /// Raw DFT Nyquist coefficient, contributes `d · cos(N(t - t_0)/2)`.
    nyquist: Complex64,
}

impl TrigInterp {
    fn new(values: &[Complex64], grid: GridSpec) -> Self {
        let n = values.len();
        let mut coeffs = fourier_coefficients(values, &grid);
        let half = n / 2;
        // undo the phase applied to the Nyquist bin
        let nyquist = coeffs[half] * Complex64::from_polar(1.0, half as f64 * grid.start());
        coeffs[half] = Complex64::new(0.0, 0.0);
        Self {
            grid,
            coeffs,
            nyquist,
        }
    }

    fn eval(&self, t: f64) -> Complex64 {
        let n = self.coeffs.len();
        let w = Complex64::from_polar(1.0, t);
        let mut pos = Complex64::new(1.0, 0.0);
        let mut acc = self.coeffs[0];
        for k in 1..n / 2 {
            pos *= w;
            acc += self.coeffs[k] * pos + self.coeffs[n - k] * pos.conj();
        }
        debug_assert_eq!(signed_frequency(n / 2, n), (n / 2) as i64);
        acc + self.nyquist * ((n as f64 / 2.0) * (t - self.grid.start())).cos()
    }
}

/// `F = f ∘ θ_a^{-1}`: the signal expressed on the warped axis.
pub fn warp_signal(f: &Signal, a: &PhaseParam) -> Signal {
    if a.is_zero() {
        return f.clone();
    }
    let a = *a;
    let smoothness = match &f.smoothness {
        Smoothness::Piecewise { jumps } => {
            let mut j: Vec<f64> = jumps.iter().map(|&x| wrap_angle(a.theta(x))).collect();
            j.sort_by(f64::total_cmp);
            Smoothness::Piecewise { jumps: j }
        }
        Smoothness::Lipschitz { alpha, constant } => Smoothness::Lipschitz {
            alpha: *alpha,
            constant: constant * a.distortion().powf(*alpha),
        },
        other => other.clone(),
    };
    let inner = f.clone();
    let mut out = Signal::generator(format!("warp({})", f.name), smoothness, move |s| {
        inner.eval(a.theta_inv(s))
    });
    out.real = f.real;
    if f.has_derivative() {
        let inner = f.clone();
        out = out.with_derivative(move |s| {
            inner.derivative_at(a.theta_inv(s)).unwrap() * a.inverse_weight(s)
        });
    }
    out
}

/// `f = F ∘ θ_a`, the inverse of [`warp_signal`].
pub fn unwarp_signal(big_f: &Signal, a: &PhaseParam) -> Signal {
    if a.is_zero() {
        return big_f.clone();
    }
    let a = *a;
    let smoothness = match &big_f.smoothness {
        Smoothness::Piecewise { jumps } => {
            let mut j: Vec<f64> = jumps.iter().map(|&u| wrap_angle(a.theta_inv(u))).collect();
            j.sort_by(f64::total_cmp);
            Smoothness::Piecewise { jumps: j }
        }
        Smoothness::Lipschitz { alpha, constant } => Smoothness::Lipschitz {
            alpha: *alpha,
            constant: constant * a.distortion().powf(*alpha),
        },
        other => other.clone(),
    };
    let inner = big_f.clone();
    let mut out = Signal::generator(format!("unwarp({})", big_f.name), smoothness, move |x| {
        inner.eval(a.theta(x))
    });
    out.real = big_f.real;
    if big_f.has_derivative() {
        let inner = big_f.clone();
        out = out.with_derivative(move |x| {
            inner.derivative_at(a.theta(x)).unwrap() * a.poisson_weight(x)
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{lp_norm, modulus_smoothness};

    fn cos_signal() -> Signal {
        Signal::real("cos", Smoothness::Analytic, f64::cos).with_real_derivative(|t| -t.sin())
    }

    #[test]
    fn sampled_interpolation_is_exact_for_trig_polynomials() {
        let f = |t: f64| Complex64::new((3.0 * t).cos() + 0.5 * (7.0 * t).sin(), (2.0 * t).cos());
        let g = GridSpec::pow2(32);
        let s = Signal::from_samples("s", g.nodes().map(f).collect()).unwrap();
        assert!(!s.is_real());
        for i in 0..50 {
            let t = -4.0 + 0.17 * i as f64;
            assert!((s.eval(t) - f(t)).norm() < 1e-13);
        }
    }

    #[test]
    fn sampled_rejects_bad_sizes() {
        assert!(matches!(
            Signal::from_samples("x", vec![Complex64::new(0.0, 0.0); 24]),
            Err(Error::NotPowerOfTwo(24))
        ));
        assert!(Signal::from_samples("x", vec![Complex64::new(0.0, 0.0); 8]).is_err());
    }

    #[test]
    fn csv_ingestion_on_grid() {
        let g = GridSpec::pow2(64);
        let mut text = String::from("t,value\n");
        for t in g.nodes() {
            text.push_str(&format!("{t},{}\n", (2.0 * t).sin()));
        }
        let s = Signal::from_csv_reader("csv", text.as_bytes()).unwrap();
        assert!(s.is_real());
        assert!((s.eval(0.4) - Complex64::new(0.8f64.sin(), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn csv_ingestion_complex_and_resampled() {
        let text = "0,1,2\n1.5,3,0\n3.0,1,1\n";
        let s = Signal::from_csv_reader("c", text.as_bytes()).unwrap();
        assert!(s.is_sampled());
        assert!(!s.is_real());
        let bad = "0,1\nfoo,2\n";
        assert!(Signal::from_csv_reader("c", bad.as_bytes()).is_err());
        let short = "0\n";
        assert!(Signal::from_csv_reader("c", short.as_bytes()).is_err());
    }

    #[test]
    fn warp_identity_and_composition() {
        let f = cos_signal();
        let z = warp_signal(&f, &PhaseParam::zero());
        assert_eq!(z.eval(0.3), f.eval(0.3));

        let a = PhaseParam::new(0.6, 0.9).unwrap();
        let cos_theta = Signal::real("cos-warped", Smoothness::Analytic, move |t| a.theta(t).cos());
        let big = warp_signal(&cos_theta, &a);
        for i in 0..40 {
            let s = -3.0 + 0.15 * i as f64;
            assert!((big.eval(s).re - s.cos()).abs() < 1e-12);
        }
        let back = unwarp_signal(&warp_signal(&f, &a), &a);
        for i in 0..40 {
            let t = -3.0 + 0.15 * i as f64;
            assert!((back.eval(t) - f.eval(t)).norm() < 1e-10);
        }
    }

    #[test]
    fn warp_derivative_chain_rule() {
        let a = PhaseParam::new(0.5, -0.3).unwrap();
        let big = warp_signal(&cos_signal(), &a);
        let h = 1e-5;
        for i in 0..20 {
            let s = -3.0 + 0.3 * i as f64;
            let fd = (big.eval(s + h) - big.eval(s - h)) / (2.0 * h);
            assert!((fd - big.derivative_at(s).unwrap()).norm() < 1e-7);
        }
    }

    #[test]
    fn warp_preserves_sup_and_bounds_lp() {
        let g = GridSpec::new(8192).unwrap();
        let f = Signal::real("mix", Smoothness::Analytic, |t| (t.sin() + 0.3).exp() - 1.2 * (2.0 * t).cos());
        for &r in &[0.3, 0.7, 0.95] {
            let a = PhaseParam::new(r, 1.3).unwrap();
            let big = warp_signal(&f, &a);
            let sf = lp_norm(&f, f64::INFINITY, &g).unwrap();
            let sb = lp_norm(&big, f64::INFINITY, &g).unwrap();
            assert!((sf - sb).abs() < 1e-10, "r={r} {sf} {sb}");
            for &p in &[1.0, 2.0, 3.0] {
                let nf = lp_norm(&f, p, &g).unwrap();
                let nb = lp_norm(&big, p, &g).unwrap();
                assert!(nb <= a.distortion().powf(1.0 / p) * nf * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn piecewise_node_uses_midpoint() {
        let sq = Signal::real(
            "square",
            Smoothness::Piecewise { jumps: vec![-PI, 0.0] },
            |t| if wrap_angle(t) >= 0.0 { 1.0 } else { -1.0 },
        );
        assert_eq!(sq.eval(0.0).re, 1.0);
        assert!(sq.eval_node(0.0).re.abs() < 1e-15);
        assert!(sq.eval_node(PI).re.abs() < 1e-15);
        assert_eq!(sq.eval_node(1.0).re, 1.0);
    }

    #[test]
    fn modulus_is_monotone_and_subadditive() {
        let g = GridSpec::new(512).unwrap();
        let f = Signal::real("abs", Smoothness::Unknown, |t| wrap_angle(t).abs() + 0.3 * (3.0 * t).sin());
        let ts = [0.05, 0.1, 0.2, 0.4, 0.8];
        let w: Vec<f64> = ts
            .iter()
            .map(|&t| modulus_smoothness(&f, t, f64::INFINITY, &g, 64).unwrap())
            .collect();
        for pair in w.windows(2) {
            assert!(pair[1] >= pair[0] - 1e-9);
        }
        let w3 = modulus_smoothness(&f, 0.3, f64::INFINITY, &g, 64).unwrap();
        assert!(w3 <= w[1] + w[2] + 1e-6);
    }
}
