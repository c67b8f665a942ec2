use crate::error::{check_len, Error, Result};
use crate::scalar::Real;

use super::grid::Grid1D;

/// Composite rules on a uniform grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QuadRule {
    /// Order 2.
    Trapezoid,
    /// Order 4; an odd number of intervals closes with a 3/8 panel.
    #[default]
    Simpson,
}

/// Weights of `rule` for `n` uniformly spaced samples with spacing `h`.
pub fn quadrature_weights<T: Real>(n: usize, h: T, rule: QuadRule) -> Vec<T> {
    let mut w = vec![T::zero(); n];
    if n < 2 {
        return w;
    }
    let intervals = n - 1;
    match rule {
        QuadRule::Trapezoid => {
            w.iter_mut().for_each(|v| *v = h);
            w[0] = h * T::lit(0.5);
            w[n - 1] = h * T::lit(0.5);
        }
        QuadRule::Simpson if intervals < 2 => return quadrature_weights(n, h, QuadRule::Trapezoid),
        QuadRule::Simpson => {
            let simpson_end = if intervals % 2 == 0 { intervals } else { intervals - 3 };
            let third = h / T::lit(3.0);
            for k in (0..simpson_end).step_by(2) {
                w[k] = w[k] + third;
                w[k + 1] = w[k + 1] + T::lit(4.0) * third;
                w[k + 2] = w[k + 2] + third;
            }
            if simpson_end < intervals {
                let e = T::lit(3.0) * h / T::lit(8.0);
                let k = simpson_end;
                w[k] = w[k] + e;
                w[k + 1] = w[k + 1] + T::lit(3.0) * e;
                w[k + 2] = w[k + 2] + T::lit(3.0) * e;
                w[k + 3] = w[k + 3] + e;
            }
        }
    }
    w
}

/// Integrates samples over the grid with composite Simpson.
pub fn quadrature<T: Real>(samples: &[T], grid: &Grid1D<T>) -> Result<T> {
    quadrature_with(samples, grid, QuadRule::Simpson)
}

pub fn quadrature_with<T: Real>(samples: &[T], grid: &Grid1D<T>, rule: QuadRule) -> Result<T> {
    check_len(grid.len(), samples.len())?;
    let w = quadrature_weights(grid.len(), grid.spacing(), rule);
    Ok(w.iter().zip(samples).fold(T::zero(), |acc, (&w, &f)| acc + w * f))
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre<T: Real>(n: usize) -> Result<(Vec<T>, Vec<T>)> {
    if n == 0 {
        return Err(Error::Precondition("Gauss-Legendre rule needs at least one node".into()));
    }
    let mut nodes = vec![0.0f64; n];
    let mut weights = vec![0.0f64; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Ok((
        nodes.into_iter().map(T::lit).collect(),
        weights.into_iter().map(T::lit).collect(),
    ))
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss-Legendre panels: nodes and weights covering `[a, b]` split at `breaks`.
pub fn panel_rule<T: Real>(breaks: &[T], per_panel: usize) -> Result<(Vec<T>, Vec<T>)> {
    let (gx, gw) = gauss_legendre::<T>(per_panel)?;
    let mut xs = Vec::with_capacity(breaks.len() * per_panel);
    let mut ws = Vec::with_capacity(breaks.len() * per_panel);
    let half = T::lit(0.5);
    for pair in breaks.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let (mid, rad) = ((a + b) * half, (b - a) * half);
        for (&x, &w) in gx.iter().zip(&gw) {
            xs.push(mid + rad * x);
            ws.push(rad * w);
        }
    }
    Ok((xs, ws))
}
