//! Derivatives of nonlinear trigonometric polynomials and the Bernstein
//! inequality `∥t'∥_p ≤ 2n ((1+|a|)/(1-|a|))^{2+1/p} ∥t∥_p`.

use std::io::Write;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::approx::exponent_serde;
use crate::error::{Error, Result};
use crate::numerics::{bin_of, check_exponent, synthesize_on_grid, GridSpec, Signal};
use crate::phase::PhaseParam;
use crate::transform::{required_points, CoeffVector, NlPolynomial};

/// Relative slack on the inequality.
pub const TOLERANCE: f64 = 1e-9;

/// `t'` as a signal: `p_a(x) Σ ik c_k e^{ikθ_a(x)}`.
pub fn differentiate(t: &NlPolynomial) -> Signal {
    let t = t.clone();
    let name = format!("d/dx poly(n={})", t.degree());
    Signal::generator(&name, crate::numerics::Smoothness::Analytic, move |x| t.derivative_at(x))
}

/// `2n ((1+|a|)/(1-|a|))^{2+1/p}`.
pub fn bernstein_constant(a: &PhaseParam, n: usize, p: f64) -> f64 {
    2.0 * n as f64 * a.distortion().powf(2.0 + 1.0 / p)
}

/// Outcome of one Bernstein check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BernsteinReport {
    pub modulus: f64,
    pub angle: f64,
    pub n: usize,
    #[serde(with = "exponent_serde")]
    pub p: f64,
    /// `∥t'∥_p`.
    pub lhs: f64,
    /// `∥t∥_p`.
    pub norm: f64,
    /// `2n ((1+|a|)/(1-|a|))^{2+1/p}`.
    pub rhs_constant: f64,
    /// `∥t'∥_p / (n ∥t∥_p)`.
    pub ratio: f64,
    /// Smallest `e` with `∥t'∥_p ≤ 2n ((1+|a|)/(1-|a|))^e ∥t∥_p`
    /// (`None` when `a = 0` or the ratio is already below 2).
    pub exponent_needed: Option<f64>,
    /// Bound holds with exponent `2 + 1/p`.
    pub within_exponent_2_plus_1_over_p: bool,
    /// Bound holds with exponent `2 + 2/p`.
    pub within_exponent_2_plus_2_over_p: bool,
    pub tolerance: f64,
    pub pass: bool,
}

impl BernsteinReport {
    fn new(a: &PhaseParam, n: usize, p: f64, lhs: f64, norm: f64) -> Self {
        let rhs_constant = bernstein_constant(a, n, p);
        let ratio = if norm > 0.0 { lhs / (n as f64 * norm) } else { 0.0 };
        let c = a.distortion();
        let slack = |e: f64| lhs <= 2.0 * n as f64 * c.powf(e) * norm * (1.0 + TOLERANCE) + f64::MIN_POSITIVE;
        let exponent_needed = (c > 1.0 && ratio > 2.0).then(|| (ratio / 2.0).ln() / c.ln());
        Self {
            modulus: a.modulus(),
            angle: a.angle(),
            n,
            p,
            lhs,
            norm,
            rhs_constant,
            ratio,
            exponent_needed,
            within_exponent_2_plus_1_over_p: slack(2.0 + 1.0 / p),
            within_exponent_2_plus_2_over_p: slack(2.0 + 2.0 / p),
            tolerance: TOLERANCE * rhs_constant * norm,
            pass: lhs <= rhs_constant * norm * (1.0 + TOLERANCE),
        }
    }
}

/// Samples of `T` and `T'` on the warped grid, and the weights `p_{-a}(u_j)`.
struct WarpedSamples {
    values: Vec<Complex64>,
    derivs: Vec<Complex64>,
    weights: Vec<f64>,
}

impl WarpedSamples {
    fn new(t: &NlPolynomial, grid: &GridSpec) -> Self {
        let len = grid.points();
        let a = t.a();
        let mut spec = vec![Complex64::new(0.0, 0.0); len];
        let mut dspec = spec.clone();
        for (k, c) in t.coeffs().iter() {
            let b = bin_of(k, len);
            spec[b] += c;
            dspec[b] += Complex64::new(0.0, k as f64) * c;
        }
        Self {
            values: synthesize_on_grid(&spec, grid),
            derivs: synthesize_on_grid(&dspec, grid),
            weights: grid.nodes().map(|u| a.inverse_weight(u)).collect(),
        }
    }

    /// `(∥t'∥_p, ∥t∥_p)` using `dx = p_{-a}(u) du` and `t'(x) = T'(u) / p_{-a}(u)`.
    fn norms(&self, p: f64) -> (f64, f64) {
        let len = self.values.len() as f64;
        let (mut d, mut v) = (0.0, 0.0);
        for ((t, dt), w) in self.values.iter().zip(&self.derivs).zip(&self.weights) {
            v += t.norm().powf(p) * w;
            d += dt.norm().powf(p) * w.powf(1.0 - p);
        }
        ((d / len).powf(1.0 / p), (v / len).powf(1.0 / p))
    }
}

/// Grid used for a degree-`n` check at parameter `a`.
pub fn bernstein_grid(a: &PhaseParam, n: usize) -> GridSpec {
    GridSpec::pow2(required_points(a, n).max(32 * (n + 1)).max(1024))
}

fn finite_p(p: f64) -> Result<()> {
    check_exponent(p)?;
    if p.is_infinite() {
        return Err(Error::InvalidExponent(p));
    }
    Ok(())
}

/// Check `∥t'∥_p ≤ 2n ((1+|a|)/(1-|a|))^{2+1/p} ∥t∥_p` for `1 ≤ p < ∞`.
pub fn verify_bernstein(t: &NlPolynomial, p: f64, grid: &GridSpec) -> Result<BernsteinReport> {
    finite_p(p)?;
    let n = t.degree();
    if n == 0 {
        return Err(Error::OutOfRange("Bernstein check needs degree n ≥ 1".into()));
    }
    if grid.points() < 4 * n + 4 {
        return Err(Error::Undersampled {
            points: grid.points(),
            required: 4 * n + 4,
        });
    }
    let s = WarpedSamples::new(t, grid);
    let (lhs, norm) = s.norms(p);
    Ok(BernsteinReport::new(&t.a(), n, p, lhs, norm))
}

/// Random polynomial with i.i.d. complex Gaussian coefficients scaled by
/// `1/√(2n+1)`.
pub fn random_polynomial<R: rand::Rng>(a: PhaseParam, n: usize, rng: &mut R) -> NlPolynomial {
    let s = 1.0 / ((2 * n + 1) as f64).sqrt();
    let c = CoeffVector::from_fn(a, n, |_| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re * s, im * s)
    });
    NlPolynomial::new(c)
}

/// Worst case over the random trials of one `(n, |a|, p)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BernsteinCell {
    pub n: usize,
    pub modulus: f64,
    #[serde(with = "exponent_serde")]
    pub p: f64,
    pub trials: usize,
    pub max_ratio: f64,
    /// Bound on `ratio`: `2 ((1+|a|)/(1-|a|))^{2+1/p}`.
    pub bound_constant: f64,
    pub violations: usize,
    pub pass: bool,
    pub worst: BernsteinReport,
}

/// Seeded sweep over degrees × moduli × exponents. Each `(n, |a|)` pair
/// draws from its own ChaCha stream; the same polynomials are used for
/// every `p`. The angle of `a` is irrelevant (it rotates `x`), so `a` is real.
pub fn bernstein_sweep(
    degrees: &[usize],
    moduli: &[f64],
    ps: &[f64],
    trials: usize,
    seed: u64,
) -> Result<Vec<BernsteinCell>> {
    for &p in ps {
        finite_p(p)?;
    }
    if trials == 0 {
        return Err(Error::OutOfRange("trials must be positive".into()));
    }
    let mut cells = Vec::new();
    for (i, &n) in degrees.iter().enumerate() {
        if n == 0 {
            return Err(Error::OutOfRange("Bernstein sweep needs degrees ≥ 1".into()));
        }
        for (j, &r) in moduli.iter().enumerate() {
            let a = PhaseParam::real(r)?;
            let grid = bernstein_grid(&a, n);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream((i * moduli.len() + j) as u64);
            let mut worst: Vec<Option<BernsteinReport>> = vec![None; ps.len()];
            let mut violations = vec![0usize; ps.len()];
            for _ in 0..trials {
                let t = random_polynomial(a, n, &mut rng);
                let s = WarpedSamples::new(&t, &grid);
                for (q, &p) in ps.iter().enumerate() {
                    let (lhs, norm) = s.norms(p);
                    let rep = BernsteinReport::new(&a, n, p, lhs, norm);
                    if !rep.pass {
                        violations[q] += 1;
                    }
                    if worst[q].as_ref().is_none_or(|w| rep.ratio > w.ratio) {
                        worst[q] = Some(rep);
                    }
                }
            }
            for (q, &p) in ps.iter().enumerate() {
                let w = worst[q].take().expect("trials > 0");
                log::debug!("bernstein n={n} |a|={r} p={p}: max ratio {}", w.ratio);
                cells.push(BernsteinCell {
                    n,
                    modulus: r,
                    p,
                    trials,
                    max_ratio: w.ratio,
                    bound_constant: 2.0 * a.distortion().powf(2.0 + 1.0 / p),
                    violations: violations[q],
                    pass: violations[q] == 0,
                    worst: w,
                });
            }
        }
    }
    Ok(cells)
}

/// Sharpness table `n,|a|,p,max_ratio,bound_constant,pass`.
pub fn write_sharpness_csv<W: Write>(cells: &[BernsteinCell], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Csv(e.to_string());
    w.write_record(["n", "|a|", "p", "max_ratio", "bound_constant", "pass"])
        .map_err(csv_err)?;
    for c in cells {
        w.write_record([
            c.n.to_string(),
            c.modulus.to_string(),
            crate::approx::format_exponent(c.p),
            c.max_ratio.to_string(),
            c.bound_constant.to_string(),
            c.pass.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Csv(e.to_string()))?;
    Ok(())
}
