use ndarray::Array2;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{panel_rule, Grid1D};
use crate::scalar::Real;

use super::extension::{rho, smooth_step_down};
use super::roots::{characteristic_roots, DEAD_BAND};
use super::state::{BoundaryData, HalfLineState};

/// Controls the frequency quadrature behind `W_D` and `W_N`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BoundaryQuadrature {
    pub nodes_per_panel: usize,
    /// Spectrum is cut where the data transform drops below this fraction of its peak.
    pub tail_tol: f64,
    /// Number of dyadic panels between the first full panel and `σ = 0`.
    pub grading_levels: usize,
    /// Length of the tapered continuation past `T`, as a fraction of `T`.
    pub extension_fraction: f64,
    pub extrapolation_points: usize,
    pub max_panel_width: f64,
    /// Phase budget per panel, in radians.
    pub phase_per_panel: f64,
}

impl Default for BoundaryQuadrature {
    fn default() -> Self {
        Self {
            nodes_per_panel: 12,
            tail_tol: 1e-13,
            grading_levels: 36,
            extension_fraction: 0.3,
            extrapolation_points: 4,
            max_panel_width: 1.0,
            phase_per_panel: 8.0,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct BoundaryReport {
    pub cutoff: f64,
    pub nyquist: f64,
    pub sigma_nodes: usize,
    pub extended_samples: usize,
    pub warnings: Vec<String>,
}

/// Dirichlet and Neumann kernels at `τ = iσ` built from the decaying pair `(r1, r2)`.
pub fn boundary_kernels<T: Real>(x: T, r1: Complex<T>, r2: Complex<T>) -> (Complex<T>, Complex<T>) {
    let e = |r: Complex<T>| {
        let v = (r * x).exp();
        if x < T::zero() {
            v * rho(-r.re * x)
        } else {
            v
        }
    };
    let (e1, e2) = (e(r1), e(r2));
    let den = r2 - r1;
    ((r2 * e1 - r1 * e2) / den, (e2 - e1) / den)
}

/// Decaying pair at `τ = iσ`, nudging `σ` off the degenerate point when needed.
pub fn decaying_pair_at<T: Real>(sigma: T) -> (T, Complex<T>, Complex<T>, bool) {
    let mut s = sigma;
    for attempt in 0..8 {
        let triple = characteristic_roots(Complex::new(T::zero(), s));
        if !triple.degenerate {
            if let Some((r1, r2)) = triple.decaying_pair() {
                return (s, r1, r2, attempt > 0);
            }
        }
        let shift = T::lit(DEAD_BAND).sqrt() * T::lit(10f64.powi(attempt)) * (T::one() + s.abs());
        s = if sigma >= T::zero() { sigma + shift } else { sigma - shift };
    }
    let triple = characteristic_roots(Complex::new(T::zero(), s));
    let mut rs = triple.roots;
    rs.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap_or(std::cmp::Ordering::Equal));
    (s, rs[0], rs[1], true)
}

/// `W_D(t)h` on `eval × time_grid`, using `data.h` and ignoring `data.g`.
pub fn boundary_dirichlet<T: Real>(data: &BoundaryData<T>, eval: &Grid1D<T>) -> Result<HalfLineState<T>> {
    let d = BoundaryData::dirichlet_only(data.time_grid, data.h.clone())?;
    Ok(boundary_operator(&d, eval, &BoundaryQuadrature::default())?.0)
}

/// `W_N(t)g` on `eval × time_grid`, using `data.g` and ignoring `data.h`.
pub fn boundary_neumann<T: Real>(data: &BoundaryData<T>, eval: &Grid1D<T>) -> Result<HalfLineState<T>> {
    let d = BoundaryData::neumann_only(data.time_grid, data.g.clone())?;
    Ok(boundary_operator(&d, eval, &BoundaryQuadrature::default())?.0)
}

/// `W_D(t)h + W_N(t)g` evaluated by one frequency quadrature shared by both terms.
pub fn boundary_operator<T: Real>(
    data: &BoundaryData<T>,
    eval: &Grid1D<T>,
    opts: &BoundaryQuadrature,
) -> Result<(HalfLineState<T>, BoundaryReport)> {
    let tg = data.time_grid;
    let nt = tg.len();
    let dt = tg.spacing();
    let mut report = BoundaryReport::default();
    if data.h.iter().chain(&data.g).all(|v| *v == T::zero()) {
        return Ok((HalfLineState::zeros(*eval, tg), report));
    }
    if data.h.iter().chain(&data.g).any(|v| !v.is_finite()) {
        return Err(Error::Numerical("boundary data contains non-finite values".into()));
    }
    let tol_start = T::lit(1e-8) * data.h.iter().chain(&data.g).fold(T::zero(), |m, v| m.max(v.abs()));
    if data.h[0].abs() > tol_start || data.g[0].abs() > tol_start {
        report.warnings.push("boundary data does not vanish at t = 0; expect Gibbs ringing near the corner".into());
    }

    let n_ext = ((opts.extension_fraction * (nt - 1) as f64).ceil() as usize).max(16);
    let he = continue_tapered(&data.h, n_ext, opts.extrapolation_points);
    let ge = continue_tapered(&data.g, n_ext, opts.extrapolation_points);
    let n_total = he.len();
    let t_span = dt * T::from_usize_lossy(n_total - 1);
    let nyquist = T::PI() / dt;
    report.nyquist = nyquist.as_f64();
    report.extended_samples = n_total;

    let transform = |sigma: T| -> (Complex<T>, Complex<T>) {
        let step = Complex::new(T::zero(), -sigma * dt).exp();
        let mut rot = Complex::new(T::one(), T::zero());
        let (mut a, mut b) = (Complex::new(T::zero(), T::zero()), Complex::new(T::zero(), T::zero()));
        for j in 0..n_total {
            if j % 64 == 0 {
                rot = Complex::new(T::zero(), -sigma * dt * T::from_usize_lossy(j)).exp();
            }
            a = a + rot * he[j];
            b = b + rot * ge[j];
            rot = rot * step;
        }
        (a * dt, b * dt)
    };

    let probe_step = T::PI() / (T::lit(2.0) * t_span);
    let n_probe = (nyquist / probe_step).to_usize().unwrap_or(0).max(2);
    let mags: Vec<T> = (0..=n_probe)
        .map(|k| {
            let (a, b) = transform(probe_step * T::from_usize_lossy(k));
            a.norm() + b.norm()
        })
        .collect();
    let peak = mags.iter().fold(T::zero(), |m, &v| m.max(v));
    let thresh = T::lit(opts.tail_tol) * peak;
    let last = mags.iter().rposition(|&v| v > thresh).unwrap_or(0);
    let cutoff = (probe_step * T::from_usize_lossy(last + 4)).min(nyquist);
    report.cutoff = cutoff.as_f64();

    let x_far = eval.x_max().abs().max(eval.x_min().abs());
    let width = T::lit(opts.max_panel_width).min(T::lit(opts.phase_per_panel) / (t_span + T::lit(0.3) * x_far));
    let mut breaks = vec![T::zero()];
    let top = width.min(cutoff);
    for level in (1..=opts.grading_levels).rev() {
        breaks.push(top / T::lit(2f64.powi(level as i32)));
    }
    breaks.push(top);
    let mut b = top;
    while b < cutoff {
        b = (b + width).min(cutoff);
        breaks.push(b);
    }
    let (sigmas, weights) = panel_rule(&breaks, opts.nodes_per_panel)?;
    report.sigma_nodes = sigmas.len();

    let xs = eval.nodes();
    let ts = tg.nodes();
    let nx = xs.len();
    let mut out = Array2::<T>::zeros((nx, nt));
    let chunk = 512usize;
    let inv_pi = T::one() / T::PI();
    let mut perturbed = 0usize;
    for start in (0..sigmas.len()).step_by(chunk) {
        let end = (start + chunk).min(sigmas.len());
        let m = end - start;
        let mut ar = Array2::<T>::zeros((nx, m));
        let mut ai = Array2::<T>::zeros((nx, m));
        let mut br = Array2::<T>::zeros((m, nt));
        let mut bi = Array2::<T>::zeros((m, nt));
        for (c, k) in (start..end).enumerate() {
            let (sigma, r1, r2, shifted) = decaying_pair_at(sigmas[k]);
            perturbed += shifted as usize;
            let (hh, gh) = transform(sigma);
            let w = weights[k] * inv_pi;
            for (i, &x) in xs.iter().enumerate() {
                let (kd, kn) = boundary_kernels(x, r1, r2);
                let v = (kd * hh + kn * gh) * w;
                ar[[i, c]] = v.re;
                ai[[i, c]] = v.im;
            }
            for (j, &t) in ts.iter().enumerate() {
                let (sn, cs) = (sigma * t).sin_cos();
                br[[c, j]] = cs;
                bi[[c, j]] = sn;
            }
        }
        out = out + ar.dot(&br) - ai.dot(&bi);
    }
    if perturbed > 0 {
        report.warnings.push(format!("{perturbed} frequency nodes shifted off the degenerate root"));
    }
    Ok((HalfLineState::new(*eval, tg, out)?, report))
}

/// Samples continued past the end by local extrapolation times a smooth taper to zero.
fn continue_tapered<T: Real>(y: &[T], n_ext: usize, points: usize) -> Vec<T> {
    let n = y.len();
    let q = points.min(n).max(1);
    let base = &y[n - q..];
    let mut out = y.to_vec();
    out.reserve(n_ext);
    for s in 1..=n_ext {
        let at = T::from_usize_lossy(q - 1 + s);
        let mut p = T::zero();
        for i in 0..q {
            let xi = T::from_usize_lossy(i);
            let mut l = T::one();
            for j in 0..q {
                if j != i {
                    let xj = T::from_usize_lossy(j);
                    l = l * (at - xj) / (xi - xj);
                }
            }
            p = p + l * base[i];
        }
        let taper = smooth_step_down(T::from_usize_lossy(s) / T::from_usize_lossy(n_ext));
        out.push(p * taper);
    }
    out
}

/// `max_x |K_N(x, iσ)|` over `xs`, used to check the `⟨σ⟩^{-1/3}` kernel bound.
pub fn neumann_kernel_sup<T: Real>(sigma: T, xs: &[T]) -> T {
    let (_, r1, r2, _) = decaying_pair_at(sigma);
    xs.iter().fold(T::zero(), |m, &x| m.max(boundary_kernels(x, r1, r2).1.norm()))
}
