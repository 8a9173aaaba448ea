//! Dirichlet and Fejér kernels and the Lebesgue constant.
//!
//! Kernels are the raw trigonometric sums `D_n(t) = 1/2 + Σ_{k=1}^n cos kt` and
//! `K_n = (D_0 + … + D_n) / (n + 1)`. Operators apply their own prefactor
//! (`1/π` over a full period), so `(1/π)∫_{-π}^{π} D_n = (1/π)∫_{-π}^{π} K_n = 1`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::gauss_legendre;

/// Below this `|sin(t/2)|` the closed forms are replaced by direct sums.
const SINGULAR_GUARD: f64 = 1e-8;

/// Order `n ≥ 0` of a summation kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct KernelOrder(pub usize);

impl KernelOrder {
    pub fn n(self) -> usize {
        self.0
    }

    pub fn dirichlet(self, t: f64) -> f64 {
        dirichlet(self.0, t)
    }

    pub fn fejer(self, t: f64) -> f64 {
        fejer(self.0, t)
    }

    pub fn lebesgue_constant(self, quad_points: usize) -> Result<f64> {
        lebesgue_constant(self.0, quad_points)
    }
}

impl From<usize> for KernelOrder {
    fn from(n: usize) -> Self {
        Self(n)
    }
}

/// `1/2 + Σ_{k=1}^n cos(kt)` by direct summation.
pub fn dirichlet_sum(n: usize, t: f64) -> f64 {
    0.5 + (1..=n).map(|k| (k as f64 * t).cos()).sum::<f64>()
}

/// Dirichlet kernel of order `n`.
pub fn dirichlet(n: usize, t: f64) -> f64 {
    let s = (0.5 * t).sin();
    if s.abs() > SINGULAR_GUARD {
        ((n as f64 + 0.5) * t).sin() / (2.0 * s)
    } else {
        dirichlet_sum(n, t)
    }
}

/// Fejér kernel of order `n`, the mean of `D_0, …, D_n`.
pub fn fejer(n: usize, t: f64) -> f64 {
    let s = (0.5 * t).sin();
    let m = (n + 1) as f64;
    if s.abs() > SINGULAR_GUARD {
        let q = (0.5 * m * t).sin() / s;
        q * q / (2.0 * m)
    } else {
        fejer_sum(n, t)
    }
}

/// `(1/(n+1)) Σ_{m=0}^n D_m(t)` evaluated literally.
pub fn fejer_sum(n: usize, t: f64) -> f64 {
    // equivalently 1/2 + Σ (1 - k/(n+1)) cos kt
    let m = (n + 1) as f64;
    0.5 + (1..=n)
        .map(|k| (1.0 - k as f64 / m) * (k as f64 * t).cos())
        .sum::<f64>()
}

/// Minimum number of quadrature points accepted by [`lebesgue_constant`].
pub fn lebesgue_min_points(n: usize) -> usize {
    64 * (n + 1)
}

/// Lebesgue constant `Λ_n = (1/π) ∫_{-π}^{π} |D_n(t)| dt`, so that `Λ_0 = 1`.
///
/// `D_n` is even and vanishes on `(0, π)` exactly at `t_j = 2πj/(2n+1)`,
/// `j = 1..=n`. Each of the `n+1` sign-definite panels between consecutive
/// zeros gets a Gauss–Legendre rule with `quad_points / (n+1)` nodes.
pub fn lebesgue_constant(n: usize, quad_points: usize) -> Result<f64> {
    let required = lebesgue_min_points(n);
    if quad_points < required {
        return Err(Error::Undersampled {
            points: quad_points,
            required,
        });
    }
    let per_panel = quad_points / (n + 1);
    let (nodes, weights) = gauss_legendre(per_panel);
    let step = 2.0 * PI / (2 * n + 1) as f64;
    let mut total = 0.0;
    for j in 0..=n {
        let lo = j as f64 * step;
        let hi = if j == n { PI } else { (j + 1) as f64 * step };
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let panel: f64 = nodes
            .iter()
            .zip(&weights)
            .map(|(x, w)| w * dirichlet(n, mid + half * x))
            .sum();
        total += (panel * half).abs();
    }
    Ok(2.0 * total / PI)
}

/// Lebesgue constant with the minimum admissible resolution.
pub fn lebesgue(n: usize) -> f64 {
    lebesgue_constant(n, lebesgue_min_points(n)).expect("minimum resolution is admissible")
}
