//! Built-in test signals and the corpus sweep.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::approx::{verify_signal, BoxConfig, VerifyReport};
use crate::error::{Error, Result};
use crate::numerics::{Signal, Smoothness};
use crate::phase::{wrap_angle, PhaseParam};

/// Default seed for the random members of the corpus.
pub const DEFAULT_SEED: u64 = 20_240_601;

/// Angle of `a` used by the corpus sweep.
pub const CORPUS_ANGLE: f64 = PI / 4.0;

/// Moduli of the corpus sweep.
pub const CORPUS_MODULI: [f64; 4] = [0.0, 0.3, 0.7, 0.95];

/// `1` on `[0, π)`, `-1` on `[-π, 0)`.
pub fn square() -> Signal {
    Signal::real(
        "square",
        Smoothness::Piecewise { jumps: vec![-PI, 0.0] },
        |t| if wrap_angle(t) >= 0.0 { 1.0 } else { -1.0 },
    )
}

/// Triangle wave `1 - 2|t|/π`, Lipschitz with constant `2/π`.
pub fn sawtooth() -> Signal {
    Signal::real(
        "sawtooth",
        Smoothness::Lipschitz { alpha: 1.0, constant: 2.0 / PI },
        |t| 1.0 - 2.0 * wrap_angle(t).abs() / PI,
    )
    .with_real_derivative(|t| {
        let w = wrap_angle(t);
        if w > 0.0 {
            -2.0 / PI
        } else if w < 0.0 {
            2.0 / PI
        } else {
            0.0
        }
    })
}

pub fn abs_sin() -> Signal {
    Signal::real(
        "abs-sin",
        Smoothness::Lipschitz { alpha: 1.0, constant: 1.0 },
        |t| t.sin().abs(),
    )
    .with_real_derivative(|t| {
        let s = t.sin();
        if s == 0.0 {
            0.0
        } else {
            t.cos() * s.signum()
        }
    })
}

/// `cos(k θ_a(t))`, an element of `τ_k^a`.
pub fn cos_warped(k: u32, a: PhaseParam) -> Signal {
    let kf = k as f64;
    Signal::real(format!("cos-warped:k={k}"), Smoothness::Analytic, move |t| {
        (kf * a.theta(t)).cos()
    })
    .with_real_derivative(move |t| -kf * (kf * a.theta(t)).sin() * a.poisson_weight(t))
}

/// `|sin(t/2)|^α`, Hölder of order `α` with constant 1 (cusp at 0).
pub fn holder(alpha: f64) -> Result<Signal> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::OutOfRange(format!("holder exponent {alpha} not in (0, 1]")));
    }
    Ok(Signal::real(
        format!("holder:alpha={alpha}"),
        Smoothness::Lipschitz { alpha, constant: 1.0 },
        move |t| (0.5 * t).sin().abs().powf(alpha),
    ))
}

pub fn analytic_exp_cos() -> Signal {
    Signal::real("analytic-exp-cos", Smoothness::Analytic, |t| t.cos().exp())
        .with_real_derivative(|t| -t.sin() * t.cos().exp())
}

/// Real trigonometric polynomial of degree `deg` with i.i.d. Gaussian
/// coefficients scaled by `1/√(2 deg + 1)`; the stream depends on `(seed, deg)`.
pub fn random_trig(deg: usize, seed: u64) -> Signal {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(deg as u64);
    let s = 1.0 / ((2 * deg + 1) as f64).sqrt();
    let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
    let c0 = draw() * s;
    let ab: Vec<(f64, f64)> = (1..=deg).map(|_| (draw() * s, draw() * s)).collect();
    let ab2 = ab.clone();
    Signal::real(format!("random-trig:deg={deg}"), Smoothness::Analytic, move |t| {
        c0 + ab
            .iter()
            .enumerate()
            .map(|(i, (a, b))| {
                let k = (i + 1) as f64;
                a * (k * t).cos() + b * (k * t).sin()
            })
            .sum::<f64>()
    })
    .with_real_derivative(move |t| {
        ab2.iter()
            .enumerate()
            .map(|(i, (a, b))| {
                let k = (i + 1) as f64;
                k * (b * (k * t).cos() - a * (k * t).sin())
            })
            .sum()
    })
}

fn param<T: std::str::FromStr>(spec: &str, rest: &str, key: &str) -> Result<T> {
    let bad = || {
        Error::UnknownSignal(format!(
            "'{spec}': expected parameter '{key}=<value>'"
        ))
    };
    let (k, v) = rest.split_once('=').ok_or_else(bad)?;
    if k.trim() != key {
        return Err(bad());
    }
    v.trim().parse::<T>().map_err(|_| bad())
}

/// Parse a built-in signal name: `square`, `sawtooth` (alias `lipschitz`),
/// `abs-sin`, `cos-warped:k=K`, `holder:alpha=A`, `analytic-exp-cos`,
/// `random-trig:deg=D`. `a` enters `cos-warped`, `seed` enters `random-trig`.
pub fn builtin(spec: &str, a: PhaseParam, seed: u64) -> Result<Signal> {
    let s = spec.trim();
    let (name, rest) = match s.split_once(':') {
        Some((n, r)) => (n.trim(), Some(r)),
        None => (s, None),
    };
    let no_params = |sig: Signal| match rest {
        None => Ok(sig),
        Some(_) => Err(Error::UnknownSignal(format!("'{spec}' takes no parameters"))),
    };
    let need = || rest.ok_or_else(|| Error::UnknownSignal(format!("'{spec}' needs a parameter")));
    match name {
        "square" => no_params(square()),
        "sawtooth" | "lipschitz" => no_params(sawtooth()),
        "abs-sin" => no_params(abs_sin()),
        "analytic-exp-cos" => no_params(analytic_exp_cos()),
        "cos-warped" => Ok(cos_warped(param(spec, need()?, "k")?, a)),
        "holder" => holder(param(spec, need()?, "alpha")?),
        "random-trig" => {
            let deg: usize = param(spec, need()?, "deg")?;
            Ok(random_trig(deg, seed))
        }
        _ => Err(Error::UnknownSignal(format!(
            "'{spec}' (expected square, sawtooth, lipschitz, abs-sin, cos-warped:k=K, holder:alpha=A, analytic-exp-cos or random-trig:deg=D)"
        ))),
    }
}

/// Names of the 16 corpus signals.
pub const CORPUS_NAMES: [&str; 16] = [
    "square",
    "sawtooth",
    "abs-sin",
    "cos-warped:k=1",
    "cos-warped:k=2",
    "cos-warped:k=3",
    "cos-warped:k=5",
    "holder:alpha=0.75",
    "holder:alpha=0.9",
    "analytic-exp-cos",
    "random-trig:deg=1",
    "random-trig:deg=2",
    "random-trig:deg=3",
    "random-trig:deg=5",
    "random-trig:deg=8",
    "random-trig:deg=13",
];

/// The 16-signal corpus for parameter `a`.
pub fn corpus(a: PhaseParam, seed: u64) -> Vec<Signal> {
    CORPUS_NAMES
        .iter()
        .map(|n| builtin(n, a, seed).expect("corpus names parse"))
        .collect()
}

/// Corpus members without jumps.
pub fn continuous_corpus(a: PhaseParam, seed: u64) -> Vec<Signal> {
    corpus(a, seed)
        .into_iter()
        .filter(|s| s.smoothness().is_continuous())
        .collect()
}

/// Run [`verify_signal`] on every corpus signal at every modulus.
pub fn verify_corpus(moduli: &[f64], angle: f64, cfg: &BoxConfig, seed: u64) -> Result<Vec<VerifyReport>> {
    let mut out = Vec::new();
    for &r in moduli {
        let a = PhaseParam::new(r, angle)?;
        for f in corpus(a, seed) {
            log::info!("verifying {} at |a| = {r}", f.name());
            out.extend(verify_signal(&f, &a, cfg)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{modulus_smoothness, GridSpec};

    #[test]
    fn parses_every_name() {
        let a = PhaseParam::new(0.3, 0.2).unwrap();
        let c = corpus(a, 1);
        assert_eq!(c.len(), 16);
        for (s, n) in c.iter().zip(CORPUS_NAMES) {
            assert_eq!(s.name(), n);
            assert!(s.is_real());
        }
        assert_eq!(builtin("lipschitz", a, 1).unwrap().name(), "sawtooth");
        for bad in ["nope", "square:k=1", "cos-warped", "cos-warped:j=2", "holder:alpha=1.5", "random-trig:deg=x"] {
            assert!(matches!(builtin(bad, a, 1), Err(Error::UnknownSignal(_)) | Err(Error::OutOfRange(_))), "{bad}");
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let a = PhaseParam::new(0.6, 0.5).unwrap();
        let h = 1e-6;
        for f in corpus(a, 3).into_iter().filter(|f| f.has_derivative()) {
            for j in 0..40 {
                let x = -3.0 + 0.15 * j as f64 + 0.01;
                let fd = (f.eval(x + h) - f.eval(x - h)).re / (2.0 * h);
                let d = f.derivative_at(x).unwrap().re;
                assert!((fd - d).abs() < 1e-5 * (1.0 + d.abs()), "{} x={x}: {fd} {d}", f.name());
            }
        }
    }

    #[test]
    fn random_trig_is_seeded() {
        let a = random_trig(5, 9);
        let b = random_trig(5, 9);
        let c = random_trig(5, 10);
        assert_eq!(a.eval(0.3), b.eval(0.3));
        assert_ne!(a.eval(0.3), c.eval(0.3));
    }

    #[test]
    fn holder_constant_is_respected() {
        let g = GridSpec::new(2048).unwrap();
        for alpha in [0.5, 0.75, 0.9] {
            let f = holder(alpha).unwrap();
            for t in [0.01, 0.1, 1.0] {
                let w = modulus_smoothness(&f, t, f64::INFINITY, &g, 64).unwrap();
                assert!(w <= t.powf(alpha) + 1e-12);
            }
        }
    }

    #[test]
    fn square_values() {
        let s = square();
        assert_eq!(s.eval(0.5).re, 1.0);
        assert_eq!(s.eval(-0.5).re, -1.0);
        assert_eq!(s.jumps(), &[-PI, 0.0]);
    }
}
