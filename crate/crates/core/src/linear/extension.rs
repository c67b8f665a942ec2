use serde::{Deserialize, Serialize};

use crate::numerics::stencil_weights;
use crate::scalar::Real;

/// How half-line data is continued to `x < 0` before whole-line operators act on it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExtensionRule {
    Zero,
    /// `u(x) = e^{-x²/2w²} Q(x)` for `x < 0`, where `Q` is the degree-`order` Taylor polynomial
    /// of `u e^{x²/2w²}` at 0, with derivatives from one-sided stencils of the given accuracy.
    Taylor { order: usize, accuracy: usize, width: f64 },
    /// Reflection `u(-y) = χ(y) Σ_k a_k u(k y)`, exact for polynomials of degree `order`,
    /// with `χ` falling from 1 at `inner` to 0 at `outer`.
    Reflect { order: usize, inner: f64, outer: f64 },
}

/// Reflection weights `a_1..a_{m+1}` with `Σ a_k (-k)^j = 1` for `j ≤ m`.
pub fn reflection_coefficients(order: usize) -> Vec<f64> {
    let nodes: Vec<f64> = (1..=order + 1).map(|k| -(k as f64)).collect();
    (0..nodes.len())
        .map(|k| {
            nodes
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .fold(1.0, |acc, (_, &xj)| acc * (1.0 - xj) / (nodes[k] - xj))
        })
        .collect()
}

impl Default for ExtensionRule {
    fn default() -> Self {
        ExtensionRule::Taylor { order: 3, accuracy: 4, width: 0.7 }
    }
}

/// `C^∞` step: 1 for `s ≤ 0`, 0 for `s ≥ 1`.
pub fn smooth_step_down<T: Real>(s: T) -> T {
    if s <= T::zero() {
        return T::one();
    }
    if s >= T::one() {
        return T::zero();
    }
    let f = |z: T| if z > T::zero() { (-T::one() / z).exp() } else { T::zero() };
    let a = f(T::one() - s);
    a / (a + f(s))
}

/// Cutoff `ρ`: 0 on `(-∞, -1]`, 1 on `[0, ∞)`, smooth in between.
pub fn rho<T: Real>(z: T) -> T {
    smooth_step_down(-z)
}

impl ExtensionRule {
    /// Whole-grid samples (`2n` nodes, `x = 0` at index `n`) from `n` half-line samples.
    pub fn extend<T: Real>(&self, half: &[T], dx: T) -> Vec<T> {
        let n = half.len();
        let mut out = vec![T::zero(); 2 * n];
        out[n..].copy_from_slice(half);
        if let ExtensionRule::Reflect { order, inner, outer } = *self {
            let a: Vec<T> = reflection_coefficients(order).into_iter().map(T::lit).collect();
            let (inner, outer) = (T::lit(inner), T::lit(outer));
            for j in 1..=n {
                let y = dx * T::from_usize_lossy(j);
                let chi = smooth_step_down((y - inner) / (outer - inner));
                if chi == T::zero() {
                    break;
                }
                let s = a.iter().enumerate().fold(T::zero(), |acc, (k, &ak)| {
                    let idx = (k + 1) * j;
                    if idx < n {
                        acc + ak * half[idx]
                    } else {
                        acc
                    }
                });
                out[n - j] = chi * s;
            }
        }
        if let ExtensionRule::Taylor { order, accuracy, width } = *self {
            let q = self.window_taylor(half, dx, order, accuracy, width);
            let two_w2 = T::lit(2.0 * width * width);
            for j in 1..=n {
                let x = -dx * T::from_usize_lossy(j);
                let g = (-(x * x) / two_w2).exp();
                if g < T::lit(1e-30) {
                    break;
                }
                let poly = q.iter().rev().fold(T::zero(), |acc, &c| acc * x + c);
                out[n - j] = g * poly;
            }
        }
        out
    }

    /// Taylor coefficients at 0 of `u(x) e^{x²/2w²}` up to degree `order`.
    fn window_taylor<T: Real>(&self, half: &[T], dx: T, order: usize, accuracy: usize, width: f64) -> Vec<T> {
        let nodes = (order + accuracy).min(half.len());
        let xs: Vec<f64> = (0..nodes).map(|k| k as f64).collect();
        let mut taylor = Vec::with_capacity(order + 1);
        let mut fact = 1.0f64;
        for j in 0..=order.min(nodes.saturating_sub(1)) {
            if j > 0 {
                fact *= j as f64;
            }
            let w = stencil_weights(0.0, &xs, j);
            let d = w.iter().zip(half).fold(T::zero(), |acc, (&wk, &u)| acc + T::lit(wk) * u) / dx.powi(j as i32);
            taylor.push(d / T::lit(fact));
        }
        let inv = 1.0 / (2.0 * width * width);
        (0..taylor.len())
            .map(|k| {
                let mut acc = T::zero();
                let mut i = 0;
                let mut coef = 1.0f64;
                while 2 * i <= k {
                    acc = acc + taylor[k - 2 * i] * T::lit(coef);
                    i += 1;
                    coef *= inv / i as f64;
                }
                acc
            })
            .collect()
    }
}
