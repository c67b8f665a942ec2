use crate::error::{check_len, Error, Result};
use crate::scalar::Real;

use super::grid::Grid1D;

/// Fornberg weights for derivative `m` at `z` from nodes `x`, in units of the node spacing.
pub fn stencil_weights(z: f64, x: &[f64], m: usize) -> Vec<f64> {
    let n = x.len();
    let mut c = vec![vec![0.0f64; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// One-sided weights at node 0 for derivative `order` (second-order accurate, `order + 2` nodes).
pub fn trace_weights<T: Real>(order: usize, h: T) -> Vec<T> {
    let width = if order == 0 { 1 } else { order + 2 };
    let nodes: Vec<f64> = (0..width).map(|k| k as f64).collect();
    let scale = h.powi(order as i32);
    stencil_weights(0.0, &nodes, order).into_iter().map(|w| T::lit(w) / scale).collect()
}

/// Derivative of `order` 1, 2 or 3: centered stencils inside, one-sided near the ends.
pub fn finite_diff<T: Real>(values: &[T], grid: &Grid1D<T>, order: usize) -> Result<Vec<T>> {
    check_len(grid.len(), values.len())?;
    if !(1..=3).contains(&order) {
        return Err(Error::Precondition(format!("derivative order must be 1, 2 or 3, got {order}")));
    }
    let n = values.len();
    if n < order + 2 {
        return Err(Error::Precondition(format!(
            "order {order} needs at least {} points, got {n}",
            order + 2
        )));
    }
    let half = if order == 3 { 2 } else { 1 };
    let one_sided = order + 2;
    let scale = grid.spacing().powi(order as i32);
    let centered = weights_for(half, half, half, order);
    let mut cache: Vec<(usize, usize, Vec<T>)> = Vec::new();
    let mut out = vec![T::zero(); n];
    for i in 0..n {
        let (start, w) = if i >= half && i + half < n {
            (i - half, &centered)
        } else {
            let start = if i < half { 0 } else { n - one_sided };
            let pos = cache.iter().position(|(s, p, _)| *s == start && *p == i);
            let idx = match pos {
                Some(p) => p,
                None => {
                    cache.push((start, i, weights_for(i - start, i - start, start + one_sided - 1 - i, order)));
                    cache.len() - 1
                }
            };
            (start, &cache[idx].2)
        };
        let acc = w.iter().enumerate().fold(T::zero(), |acc, (k, &wk)| acc + wk * values[start + k]);
        out[i] = acc / scale;
    }
    Ok(out)
}

fn weights_for<T: Real>(center: usize, left: usize, right: usize, order: usize) -> Vec<T> {
    let nodes: Vec<f64> = (0..=left + right).map(|k| k as f64).collect();
    stencil_weights(center as f64, &nodes, order).into_iter().map(T::lit).collect()
}
