use ndarray::Array2;
use serde::Serialize;

use super::symbolic::Poly;
use super::weight::{CarlemanWeight, Expansion, ExpansionVariant};
use crate::error::{Error, Result};
use crate::numerics::{stencil_weights, Grid1D};
use crate::scalar::Real;

#[derive(Debug, Clone, Serialize)]
pub struct FdCheck {
    /// Worst relative error over every derivative entering `D` and `E`.
    pub max_rel_err: f64,
    pub worst: String,
    pub per_term: Vec<(String, f64)>,
}

#[derive(Debug, Clone)]
pub struct CoefficientField<T> {
    pub xs: Vec<T>,
    pub ts: Vec<T>,
    pub a: Array2<T>,
    pub b: Array2<T>,
    pub c: Array2<T>,
    pub d: Array2<T>,
    pub e: Array2<T>,
    pub f: Array2<T>,
    pub fd_check: FdCheck,
}

impl<T: Real> CoefficientField<T> {
    pub fn min_def(&self) -> (T, T, T) {
        let min = |a: &Array2<T>| a.iter().fold(T::infinity(), |m, &v| m.min(v));
        (min(&self.d), min(&self.e), min(&self.f))
    }
}

pub fn coefficients_def<T: Real>(
    w: &CarlemanWeight<T>,
    xs: &Grid1D<T>,
    ts: &Grid1D<T>,
    epsilon: T,
) -> Result<CoefficientField<T>> {
    if !(epsilon > T::zero()) {
        return Err(Error::Precondition(format!("epsilon must be positive, got {epsilon}")));
    }
    w.check_time(ts.x_min())?;
    w.check_time(ts.x_max())?;
    let ex = w.expansion(epsilon);
    let fd_check = fd_cross_check(&ex, w.s.as_f64(), w.l.as_f64());
    let (nx, nt) = (xs.len(), ts.len());
    let mut out: Vec<Array2<T>> = (0..6).map(|_| Array2::zeros((nx, nt))).collect();
    for (i, x) in xs.nodes().into_iter().enumerate() {
        for (j, t) in ts.nodes().into_iter().enumerate() {
            for (k, p) in [&ex.a, &ex.b, &ex.c, &ex.d, &ex.e, &ex.f].into_iter().enumerate() {
                out[k][[i, j]] = ex.eval(p, w.s, x, t);
            }
        }
    }
    if out.iter().any(|a| a.iter().any(|v| !v.is_finite())) {
        return Err(Error::Numerical("non-finite coefficient on the interior grid".into()));
    }
    let mut it = out.into_iter();
    let mut next = || it.next().unwrap();
    Ok(CoefficientField {
        xs: xs.nodes(),
        ts: ts.nodes(),
        a: next(),
        b: next(),
        c: next(),
        d: next(),
        e: next(),
        f: next(),
        fd_check,
    })
}

fn central(order: usize) -> Vec<f64> {
    let nodes: Vec<f64> = (-4..=4).map(|k| k as f64).collect();
    stencil_weights(0.0, &nodes, order)
}

/// Compares every closed-form derivative entering `D` and `E` with 9-point central differences
/// of the closed-form `A`, `B`, `C`.
pub fn fd_cross_check(ex: &Expansion, s: f64, l: f64) -> FdCheck {
    let horizon = ex.horizon;
    let hx = 0.05 * l;
    let ht = 1e-3 * horizon;
    let w1 = central(1);
    let w3 = central(3);
    let cx = ex.c.dx();
    let ab = ex.a.mul(&ex.b);
    let cxa = cx.mul(&ex.a);
    let cxc = cx.mul(&ex.c);
    let bc = ex.b.mul(&ex.c);
    type Item<'a> = (&'static str, &'a Poly, bool, usize);
    let items: Vec<Item> = vec![
        ("A_t", &ex.a, true, 1),
        ("A_xxx", &ex.a, false, 3),
        ("(AB)_x", &ab, false, 1),
        ("(C_x A)_x", &cxa, false, 1),
        ("C_t", &ex.c, true, 1),
        ("C_x", &ex.c, false, 1),
        ("(C_x C)_x", &cxc, false, 1),
        ("C_xxx", &ex.c, false, 3),
        ("(BC)_x", &bc, false, 1),
    ];
    let xs: Vec<f64> = (0..5).map(|i| -0.8 * l + 0.4 * l * i as f64).collect();
    let ts: Vec<f64> = (0..5).map(|j| horizon * (0.1 + 0.2 * j as f64)).collect();
    let mut per_term = Vec::new();
    for (name, p, in_time, order) in items {
        let exact = if in_time { p.dt() } else { p.dx_n(order) };
        let (mut err, mut scale, mut base) = (0.0f64, 0.0f64, 0.0f64);
        for &x in &xs {
            for &t in &ts {
                let w = if order == 1 { &w1 } else { &w3 };
                let h = if in_time { ht } else { hx };
                let fd = w.iter().enumerate().fold(0.0, |acc, (k, &c)| {
                    let off = (k as f64 - 4.0) * h;
                    let v = if in_time { p.eval(s, x, t + off, horizon) } else { p.eval(s, x + off, t, horizon) };
                    acc + c * v
                }) / h.powi(order as i32);
                let e = exact.eval(s, x, t, horizon);
                err = err.max((fd - e).abs());
                scale = scale.max(e.abs());
                base = base.max(p.eval(s, x, t, horizon).abs());
            }
        }
        per_term.push((name.to_string(), err / scale.max(1e-3 * base).max(f64::MIN_POSITIVE)));
    }
    let (worst, max_rel_err) =
        per_term.iter().fold((String::new(), 0.0f64), |(n, m), (k, v)| if *v > m { (k.clone(), *v) } else { (n, m) });
    FdCheck { max_rel_err, worst, per_term }
}

/// Sampling of the closed interior `[-L, L] × [δT, (1-δ)T]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarginGrid {
    pub nx: usize,
    pub nt: usize,
    pub margin: f64,
}

impl Default for MarginGrid {
    fn default() -> Self {
        Self { nx: 81, nt: 81, margin: 0.025 }
    }
}

impl MarginGrid {
    pub fn grids<T: Real>(&self, l: T, horizon: T) -> Result<(Grid1D<T>, Grid1D<T>)> {
        if !(self.margin > 0.0 && self.margin < 0.5) {
            return Err(Error::Precondition(format!("time margin must lie in (0, 1/2), got {}", self.margin)));
        }
        let d = T::lit(self.margin) * horizon;
        Ok((Grid1D::new(-l, l, self.nx)?, Grid1D::new(d, horizon - d, self.nt)?))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanRung {
    pub s: f64,
    pub min_d: f64,
    pub min_e: f64,
    pub min_f: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PositivityScan {
    pub s0: f64,
    pub rungs: Vec<ScanRung>,
}

/// `s_k = 2^{k/4}` for `k = -40..=96`.
pub fn default_ladder() -> Vec<f64> {
    (-40..=96).map(|k| 2f64.powf(k as f64 / 4.0)).collect()
}

/// Smallest `s` on the ladder with `D`, `E`, `F` strictly positive on the margin grid.
pub fn positivity_scan(
    l: f64,
    horizon: f64,
    variant: ExpansionVariant,
    epsilon: f64,
    ladder: &[f64],
    grid: MarginGrid,
) -> Result<PositivityScan> {
    if ladder.is_empty() || ladder.windows(2).any(|p| p[1] <= p[0]) || ladder[0] <= 0.0 {
        return Err(Error::Precondition("s ladder must be positive and strictly increasing".into()));
    }
    CarlemanWeight::new(l, horizon, 1.0)?;
    let ex = Expansion::new(l, horizon, variant, epsilon);
    let (xs, ts) = grid.grids(l, horizon)?;
    let (xs, ts) = (xs.nodes(), ts.nodes());
    let mut rungs = Vec::new();
    for &s in ladder {
        let mut m = [f64::INFINITY; 3];
        for &x in &xs {
            for &t in &ts {
                for (k, p) in [&ex.d, &ex.e, &ex.f].into_iter().enumerate() {
                    m[k] = m[k].min(p.eval(s, x, t, horizon));
                }
            }
        }
        rungs.push(ScanRung { s, min_d: m[0], min_e: m[1], min_f: m[2] });
        if m.iter().all(|&v| v > 0.0) {
            return Ok(PositivityScan { s0: s, rungs });
        }
    }
    let last = rungs.last().unwrap();
    Err(Error::Numerical(format!(
        "positivity not reached by s = {}: min D = {:.3e}, min E = {:.3e}, min F = {:.3e}",
        last.s, last.min_d, last.min_e, last.min_f
    )))
}
