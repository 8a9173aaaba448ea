//! Möbius phase function, its inverse and the Poisson weight.
//!
//! For `a = |a| e^{i t_a}` with `|a| < 1` the phase `θ_a` is the continuous lift
//! of `arg((e^{it} - a) / (1 - ā e^{it}))`. Writing `z = 1 - ā e^{it}` one has
//! `e^{i(θ_a(t) - t)} = conj(z) / z`, and `Re z > 0`, so
//!
//! ```text
//! θ_a(t) = t + 2 atan2(|a| sin(t - t_a), 1 - |a| cos(t - t_a))
//! ```
//!
//! which is continuous, satisfies `θ_a(t) - t ∈ (-π, π)` and reduces to the
//! identity at `a = 0`. The inverse map is the phase of `-a`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const TWO_PI: f64 = 2.0 * PI;

/// Largest accepted modulus.
pub const MAX_MODULUS: f64 = 1.0 - 1e-6;

/// Modulus above which quadrature resolution becomes expensive.
pub const WARN_MODULUS: f64 = 0.99;

/// Reduce `t` to `[-π, π)` and return the number of whole turns removed.
pub fn reduce_angle(t: f64) -> (f64, f64) {
    let turns = ((t + PI) / TWO_PI).floor();
    let mut r = t - turns * TWO_PI;
    // guard the half-open interval against rounding at the edges
    if r >= PI {
        return (r - TWO_PI, turns + 1.0);
    }
    if r < -PI {
        r += TWO_PI;
        return (r, turns - 1.0);
    }
    (r, turns)
}

/// Wrap an angle into `[-π, π)`.
pub fn wrap_angle(t: f64) -> f64 {
    reduce_angle(t).0
}

/// The Möbius parameter `a = |a| e^{i t_a}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseParam {
    modulus: f64,
    angle: f64,
}

impl PhaseParam {
    /// Build from polar form. The angle is normalized to `(-π, π]`.
    pub fn new(modulus: f64, angle: f64) -> Result<Self> {
        if !modulus.is_finite() {
            return Err(Error::NonFiniteParameter(modulus));
        }
        if !angle.is_finite() {
            return Err(Error::NonFiniteParameter(angle));
        }
        if !(0.0..=MAX_MODULUS).contains(&modulus) {
            return Err(Error::InvalidModulus(modulus));
        }
        if modulus > WARN_MODULUS {
            log::warn!(
                "phase modulus {modulus} > {WARN_MODULUS}: Poisson weight peaks near {:.3e}, \
                 quadrature grids must grow accordingly",
                (1.0 + modulus) / (1.0 - modulus)
            );
        }
        let mut angle = wrap_angle(angle);
        if angle == -PI {
            angle = PI;
        }
        if modulus == 0.0 {
            angle = 0.0;
        }
        Ok(Self { modulus, angle })
    }

    /// Real parameter `a = modulus` (angle zero).
    pub fn real(modulus: f64) -> Result<Self> {
        Self::new(modulus, 0.0)
    }

    pub fn from_complex(a: Complex64) -> Result<Self> {
        Self::new(a.norm(), a.arg())
    }

    /// The classical case `a = 0`.
    pub fn zero() -> Self {
        Self {
            modulus: 0.0,
            angle: 0.0,
        }
    }

    pub fn modulus(&self) -> f64 {
        self.modulus
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn value(&self) -> Complex64 {
        Complex64::from_polar(self.modulus, self.angle)
    }

    pub fn is_zero(&self) -> bool {
        self.modulus == 0.0
    }

    /// `(1 + |a|) / (1 - |a|)`, the upper bound of the Poisson weight.
    pub fn distortion(&self) -> f64 {
        (1.0 + self.modulus) / (1.0 - self.modulus)
    }

    /// The parameter `-a`, whose phase is the inverse of this one.
    pub fn negated(&self) -> Self {
        if self.is_zero() {
            return *self;
        }
        let mut angle = self.angle - PI;
        if angle <= -PI {
            angle += TWO_PI;
        }
        Self {
            modulus: self.modulus,
            angle,
        }
    }

    /// `θ_a(t)`.
    pub fn theta(&self, t: f64) -> f64 {
        if self.is_zero() {
            return t;
        }
        let (t0, turns) = reduce_angle(t);
        let phi = t0 - self.angle;
        let r = self.modulus;
        let shift = 2.0 * (r * phi.sin()).atan2(1.0 - r * phi.cos());
        t0 + shift + turns * TWO_PI
    }

    /// `e^{iθ_a(t)} = (e^{it} - a) / (1 - ā e^{it})`, evaluated by the Möbius map.
    pub fn mobius_boundary(&self, t: f64) -> Complex64 {
        let z = Complex64::from_polar(1.0, t);
        let a = self.value();
        (z - a) / (Complex64::new(1.0, 0.0) - a.conj() * z)
    }

    /// `θ_a^{-1}(s)`, the unique `t` with `θ_a(t) = s`.
    pub fn theta_inv(&self, s: f64) -> f64 {
        if self.is_zero() {
            return s;
        }
        let t = self.negated().theta(s);
        let residual = self.theta(t) - s;
        if residual.abs() <= 1e-13 * (1.0 + s.abs()) {
            return t;
        }
        // Newton polish; θ_a is smooth with θ_a' >= (1-|a|)/(1+|a|) > 0
        let mut t = t;
        for _ in 0..4 {
            let r = self.theta(t) - s;
            if r.abs() <= 1e-14 * (1.0 + s.abs()) {
                return t;
            }
            t -= r / self.poisson_weight(t);
        }
        if (self.theta(t) - s).abs() <= 1e-11 * (1.0 + s.abs()) {
            t
        } else {
            self.theta_inv_bisection(s)
        }
    }

    /// Inverse phase by bisection on the monotone lift. Slow but unconditional.
    pub fn theta_inv_bisection(&self, s: f64) -> f64 {
        // θ_a(t) - t ∈ (-π, π) brackets the root in [s - π, s + π]
        let mut lo = s - PI;
        let mut hi = s + PI;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.theta(mid) < s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// `p_a(t) = θ_a'(t) = (1 - |a|²) / (1 - 2|a| cos(t - t_a) + |a|²)`.
    pub fn poisson_weight(&self, t: f64) -> f64 {
        if self.is_zero() {
            return 1.0;
        }
        let r = self.modulus;
        (1.0 - r * r) / (1.0 - 2.0 * r * (t - self.angle).cos() + r * r)
    }

    /// Weight of the substitution `u = θ_a(t)`: `1 / p_a(θ_a^{-1}(u)) = p_{-a}(u)`.
    pub fn inverse_weight(&self, u: f64) -> f64 {
        self.negated().poisson_weight(u)
    }

    /// Riesz bounds `(sqrt((1-|a|)/(1+|a|)), sqrt((1+|a|)/(1-|a|)))` of the basis `e^{ikθ_a}`.
    pub fn riesz_bounds(&self) -> (f64, f64) {
        let d = self.distortion();
        (d.recip().sqrt(), d.sqrt())
    }

    /// Bounds of the Poisson weight, `((1-|a|)/(1+|a|), (1+|a|)/(1-|a|))`.
    pub fn weight_bounds(&self) -> (f64, f64) {
        let d = self.distortion();
        (d.recip(), d)
    }
}

impl Default for PhaseParam {
    fn default() -> Self {
        Self::zero()
    }
}

impl std::fmt::Display for PhaseParam {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}∠{}", self.modulus, self.angle)
    }
}

pub fn theta(a: &PhaseParam, t: f64) -> f64 {
    a.theta(t)
}

pub fn theta_inv(a: &PhaseParam, s: f64) -> f64 {
    a.theta_inv(s)
}

pub fn poisson_weight(a: &PhaseParam, t: f64) -> f64 {
    a.poisson_weight(t)
}

pub fn riesz_bounds(a: &PhaseParam) -> (f64, f64) {
    a.riesz_bounds()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn real(r: f64) -> PhaseParam {
        PhaseParam::real(r).unwrap()
    }

    // independent route: principal argument of the Möbius image, unwrapped
    // against the identity branch
    fn arg_oracle(a: &PhaseParam, t: f64) -> f64 {
        let w = a.mobius_boundary(t);
        let mut d = w.arg() - t;
        while d > PI {
            d -= TWO_PI;
        }
        while d <= -PI {
            d += TWO_PI;
        }
        t + d
    }

    #[test]
    fn identity_at_zero() {
        let a = PhaseParam::zero();
        assert_eq!(a.theta(1.3), 1.3);
        assert_eq!(a.theta_inv(2.0), 2.0);
        assert_eq!(a.poisson_weight(0.7), 1.0);
        assert_eq!(a.riesz_bounds(), (1.0, 1.0));
    }

    #[test]
    fn rejects_bad_modulus() {
        assert!(matches!(PhaseParam::real(1.0), Err(Error::InvalidModulus(_))));
        assert!(matches!(PhaseParam::real(-0.1), Err(Error::InvalidModulus(_))));
        assert!(PhaseParam::real(MAX_MODULUS).is_ok());
        assert!(PhaseParam::new(0.5, f64::NAN).is_err());
    }

    #[test]
    fn theta_matches_complex_oracle() {
        let a = real(0.5);
        assert!(a.theta(0.0).abs() < 1e-15);
        let expected = PI - 0.75f64.atan(); // arg(-1 + 0.75i)
        assert!((a.theta(PI / 2.0) - expected).abs() < 1e-14);
        assert!((arg_oracle(&a, PI / 2.0) - expected).abs() < 1e-14);

        let b = PhaseParam::new(0.83, -2.1).unwrap();
        for i in 0..400 {
            let t = -PI + 2.0 * PI * (i as f64 + 0.3) / 400.0;
            assert!((b.theta(t) - arg_oracle(&b, t)).abs() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn periodic_lift() {
        let a = PhaseParam::new(0.7, 1.1).unwrap();
        for &t in &[-3.0, -0.4, 0.0, 1.7, 3.1] {
            for k in -3..=3 {
                let shifted = a.theta(t + TWO_PI * k as f64);
                assert!((shifted - a.theta(t) - TWO_PI * k as f64).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn branch_offset_bounded() {
        let a = PhaseParam::new(0.95, 0.3).unwrap();
        for i in 0..2000 {
            let t = -10.0 + 20.0 * i as f64 / 2000.0;
            let d = a.theta(t) - t;
            assert!(d > -PI && d <= PI);
        }
    }

    #[test]
    fn inverse_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &r in &[0.0, 0.3, 0.7, 0.95] {
            let a = PhaseParam::new(r, 0.4).unwrap();
            for _ in 0..1000 {
                let t: f64 = rng.random_range(-8.0..8.0);
                let back = a.theta_inv(a.theta(t));
                assert!((back - t).abs() < 1e-12, "r={r} t={t} back={back}");
            }
        }
        let a = real(0.5);
        assert!(a.theta_inv(0.0).abs() < 1e-15);
        assert!(a.theta_inv_bisection(0.0).abs() < 1e-14);
    }

    #[test]
    fn inverse_agrees_with_bisection() {
        let a = PhaseParam::new(0.9, -1.0).unwrap();
        for i in 0..100 {
            let s = -PI + 0.0628 * i as f64;
            assert!((a.theta_inv(s) - a.theta_inv_bisection(s)).abs() < 1e-12);
        }
    }

    #[test]
    fn poisson_extremes() {
        let a = real(0.5);
        assert!((a.poisson_weight(0.0) - 3.0).abs() < 1e-15);
        assert!((a.poisson_weight(PI) - 1.0 / 3.0).abs() < 1e-15);
        let (lo, hi) = a.riesz_bounds();
        assert!((lo - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((hi - 3.0f64.sqrt()).abs() < 1e-15);
        let (lo, hi) = real(0.9).riesz_bounds();
        assert!((lo - (1.0f64 / 19.0).sqrt()).abs() < 1e-14);
        assert!((hi - 19.0f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn weight_is_derivative_of_theta() {
        let a = PhaseParam::new(0.6, 2.0).unwrap();
        for &h in &[1e-2, 5e-3] {
            for i in 0..64 {
                let t = -PI + 2.0 * PI * i as f64 / 64.0;
                let fd = (a.theta(t + h) - a.theta(t - h)) / (2.0 * h);
                // p_a''' is bounded by ~ (1+r)/(1-r)^3 here, so C = 30
                assert!((fd - a.poisson_weight(t)).abs() <= 30.0 * h * h);
            }
        }
    }

    #[test]
    fn weight_bounds_attained_on_grid() {
        for &(r, ta) in &[(0.3, 0.0), (0.7, 1.0), (0.95, -2.5)] {
            let a = PhaseParam::new(r, ta).unwrap();
            let (lo, hi) = a.weight_bounds();
            let n = 1 << 16;
            let mut mx = f64::MIN;
            let mut mn = f64::MAX;
            for j in 0..n {
                let t = a.angle() - PI + 2.0 * PI * j as f64 / n as f64;
                let w = a.poisson_weight(t);
                mx = mx.max(w);
                mn = mn.min(w);
                assert!(w >= lo * (1.0 - 1e-14) && w <= hi * (1.0 + 1e-14));
            }
            assert!((mx - hi).abs() < 1e-10 * hi);
            assert!((mn - lo).abs() < 1e-10);
            assert!((a.poisson_weight(a.angle()) - hi).abs() < 1e-10 * hi);
            assert!((a.poisson_weight(a.angle() + PI) - lo).abs() < 1e-10);
        }
    }

    #[test]
    fn negation_inverts_phase() {
        let a = PhaseParam::new(0.4, PI).unwrap();
        assert_eq!(a.angle(), PI);
        let b = a.negated();
        assert!(b.angle().abs() < 1e-15);
        assert!((a.negated().negated().angle() - PI).abs() < 1e-15);
        for i in 0..50 {
            let t = -3.0 + 0.12 * i as f64;
            let s = a.theta(t);
            assert!((a.poisson_weight(t) * a.inverse_weight(s) - 1.0).abs() < 1e-13);
        }
    }
}
