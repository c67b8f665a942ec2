use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::weight::CarlemanWeight;
use crate::error::{Error, Result};
use crate::numerics::panel_rule;
use crate::scalar::Real;

/// Value and first three derivatives.
type Jet<T> = [T; 4];

fn jet_mul<T: Real>(f: Jet<T>, g: Jet<T>) -> Jet<T> {
    let three = T::lit(3.0);
    [
        f[0] * g[0],
        f[1] * g[0] + f[0] * g[1],
        f[2] * g[0] + T::lit(2.0) * f[1] * g[1] + f[0] * g[2],
        f[3] * g[0] + three * f[2] * g[1] + three * f[1] * g[2] + f[0] * g[3],
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Profile<T> {
    One,
    Gauss { center: T, width: T },
    /// `sin³(ωz)`.
    SinCubed { omega: T },
}

impl<T: Real> Profile<T> {
    fn jet(&self, z: T) -> Jet<T> {
        match *self {
            Profile::One => [T::one(), T::zero(), T::zero(), T::zero()],
            Profile::Gauss { center, width } => {
                let y = (z - center) / width;
                let g = (-y * y).exp();
                let u1 = -T::lit(2.0) * y / width;
                let u2 = -T::lit(2.0) / (width * width);
                [g, g * u1, g * (u2 + u1 * u1), g * (T::lit(3.0) * u1 * u2 + u1 * u1 * u1)]
            }
            Profile::SinCubed { omega } => {
                let (s, c) = (omega * z).sin_cos();
                let w = omega;
                let three = T::lit(3.0);
                [
                    s * s * s,
                    three * w * s * s * c,
                    three * w * w * (T::lit(2.0) * s * c * c - s * s * s),
                    three * w * w * w * (T::lit(2.0) * c * c * c - T::lit(7.0) * s * s * c),
                ]
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bump<T> {
    pub amp: T,
    pub x: Profile<T>,
    pub t: Profile<T>,
}

/// `q(x,t) = (L² - x²)^m Σ_j a_j X_j(x) T_j(t)`; `m ≥ 3` makes `q, q_x, q_xx` vanish at `x = ±L`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibleTest<T> {
    pub l: T,
    pub envelope_power: u32,
    pub bumps: Vec<Bump<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QSample<T> {
    pub q: T,
    pub q_x: T,
    pub q_xx: T,
    pub q_xxx: T,
    pub q_t: T,
}

impl<T: Real> AdmissibleTest<T> {
    pub fn new(l: T, envelope_power: u32, bumps: Vec<Bump<T>>) -> Result<Self> {
        if !(l > T::zero()) {
            return Err(Error::Precondition(format!("L must be positive, got {l}")));
        }
        if envelope_power < 3 {
            return Err(Error::Precondition(format!(
                "envelope power {envelope_power} leaves q_xx nonzero at x = ±L; need at least 3"
            )));
        }
        if bumps.iter().any(|b| !b.amp.is_finite()) {
            return Err(Error::Numerical("bump amplitudes must be finite".into()));
        }
        Ok(Self { l, envelope_power, bumps })
    }

    pub fn zero(l: T) -> Result<Self> {
        Self::new(l, 3, Vec::new())
    }

    /// `(L² - x²)³ sin³(πt/T)`.
    pub fn sin_cubed(l: T, horizon: T) -> Result<Self> {
        Self::new(l, 3, vec![Bump { amp: T::one(), x: Profile::One, t: Profile::SinCubed { omega: T::PI() / horizon } }])
    }

    /// Sum of `n_bumps` Gaussian products with random centers, widths and amplitudes.
    pub fn random(l: T, horizon: T, n_bumps: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (lf, hf) = (l.as_f64(), horizon.as_f64());
        let bumps = (0..n_bumps)
            .map(|_| {
                let amp: f64 = StandardNormal.sample(&mut rng);
                Bump {
                    amp: T::lit(amp),
                    x: Profile::Gauss { center: T::lit(rng.random_range(-lf..lf)), width: T::lit(rng.random_range(0.2 * lf..lf)) },
                    t: Profile::Gauss { center: T::lit(rng.random_range(0.0..hf)), width: T::lit(rng.random_range(0.1 * hf..0.5 * hf)) },
                }
            })
            .collect();
        Self::new(l, 3, bumps)
    }

    pub fn scaled(&self, a: T) -> Self {
        let mut out = self.clone();
        for b in &mut out.bumps {
            b.amp = b.amp * a;
        }
        out
    }

    fn envelope(&self, x: T) -> Jet<T> {
        let p = [self.l * self.l - x * x, -T::lit(2.0) * x, -T::lit(2.0), T::zero()];
        (0..self.envelope_power).fold([T::one(), T::zero(), T::zero(), T::zero()], |acc, _| jet_mul(acc, p))
    }

    /// Spatial jets of `envelope · X_j` for every bump.
    fn x_jets(&self, x: T) -> Vec<Jet<T>> {
        let env = self.envelope(x);
        self.bumps.iter().map(|b| jet_mul(env, b.x.jet(x))).collect()
    }

    fn combine(&self, xj: &[Jet<T>], t: T) -> QSample<T> {
        let mut out = QSample { q: T::zero(), q_x: T::zero(), q_xx: T::zero(), q_xxx: T::zero(), q_t: T::zero() };
        for (b, xj) in self.bumps.iter().zip(xj) {
            let tj = b.t.jet(t);
            out.q = out.q + b.amp * xj[0] * tj[0];
            out.q_x = out.q_x + b.amp * xj[1] * tj[0];
            out.q_xx = out.q_xx + b.amp * xj[2] * tj[0];
            out.q_xxx = out.q_xxx + b.amp * xj[3] * tj[0];
            out.q_t = out.q_t + b.amp * xj[0] * tj[1];
        }
        out
    }

    pub fn eval(&self, x: T, t: T) -> QSample<T> {
        self.combine(&self.x_jets(x), t)
    }

    /// Largest `|q|`, `|q_x|`, `|q_xx|` at `x = ±L` over `nt` times in `[0, T]`.
    pub fn boundary_defect(&self, horizon: T, nt: usize) -> T {
        let mut m = T::zero();
        for x in [-self.l, self.l] {
            let xj = self.x_jets(x);
            for j in 0..nt {
                let t = horizon * T::from_usize_lossy(j) / T::from_usize_lossy(nt.max(2) - 1);
                let s = self.combine(&xj, t);
                m = m.max(s.q.abs()).max(s.q_x.abs()).max(s.q_xx.abs());
            }
        }
        m
    }
}

/// Gauss-Legendre panels for the weighted space-time integrals.
///
/// Panels are geometrically graded toward `x = ±L` and both ends of the time margin, where
/// `e^{-2sψ}` concentrates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CarlemanQuadrature {
    pub per_panel: usize,
    pub uniform_panels: usize,
    pub grading_ratio: f64,
    pub grading_levels: usize,
    pub margin: f64,
    /// Number of times every panel is bisected.
    pub refinement: u32,
}

impl Default for CarlemanQuadrature {
    fn default() -> Self {
        Self { per_panel: 8, uniform_panels: 8, grading_ratio: 0.5, grading_levels: 40, margin: 0.025, refinement: 0 }
    }
}

impl CarlemanQuadrature {
    pub fn refined(self) -> Self {
        Self { refinement: self.refinement + 1, ..self }
    }

    fn breaks(&self, a: f64, b: f64) -> Vec<f64> {
        let w = (b - a) / self.uniform_panels as f64;
        let mut br: Vec<f64> = (0..=self.uniform_panels).map(|k| a + w * k as f64).collect();
        let mut d = w;
        for _ in 0..self.grading_levels {
            d *= self.grading_ratio;
            br.push(a + d);
            br.push(b - d);
        }
        br.sort_by(|p, q| p.partial_cmp(q).unwrap());
        br.dedup();
        for _ in 0..self.refinement {
            let mut finer = Vec::with_capacity(2 * br.len());
            for p in br.windows(2) {
                finer.push(p[0]);
                finer.push(0.5 * (p[0] + p[1]));
            }
            finer.push(*br.last().unwrap());
            br = finer;
        }
        br
    }

    pub fn rules<T: Real>(&self, l: T, horizon: T) -> Result<((Vec<T>, Vec<T>), (Vec<T>, Vec<T>))> {
        if !(self.margin > 0.0 && self.margin < 0.5) {
            return Err(Error::Precondition(format!("time margin must lie in (0, 1/2), got {}", self.margin)));
        }
        let (lf, hf) = (l.as_f64(), horizon.as_f64());
        let to_t = |v: Vec<f64>| v.into_iter().map(T::lit).collect::<Vec<T>>();
        let x = panel_rule(&to_t(self.breaks(-lf, lf)), self.per_panel)?;
        let t = panel_rule(&to_t(self.breaks(self.margin * hf, (1.0 - self.margin) * hf)), self.per_panel)?;
        Ok((x, t))
    }
}

/// Both sides of the weighted inequality, stored as `value · e^{-log_scale}` to stay finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InequalityReport<T> {
    pub lhs: T,
    pub rhs_raw: T,
    /// `lhs / rhs_raw`; `NaN` stands for `0/0`.
    pub ratio: T,
    pub log_scale: T,
}

/// Left side `∫∫ (s⁵θ⁻⁵q² + s³θ⁻³q_x² + sθ⁻¹q_xx²) e^{-2sψ}`, right side `∫∫ (Pq)² e^{-2sψ}`.
///
/// Callers are expected to pass `s` at or above the positivity threshold.
pub fn verify_inequality<T: Real>(
    w: &CarlemanWeight<T>,
    q: &AdmissibleTest<T>,
    quad: &CarlemanQuadrature,
) -> Result<InequalityReport<T>> {
    if (q.l - w.l).abs() > T::lit(1e-12) * w.l {
        return Err(Error::Precondition(format!("test function lives on (-{}, {}) but the weight on (-{}, {})", q.l, q.l, w.l, w.l)));
    }
    let defect = q.boundary_defect(w.horizon, 33);
    let scale = q.bumps.iter().fold(T::zero(), |m, b| m + b.amp.abs()) * (w.l * w.l).powi(q.envelope_power as i32);
    if defect > T::lit(1e-12) * scale.max(T::one()) {
        return Err(Error::Precondition(format!("test function does not vanish at x = ±L (defect {defect:e})")));
    }
    let ((xs, wx), (ts, wt)) = quad.rules(w.l, w.horizon)?;
    let two_s = T::lit(2.0) * w.s;
    let thetas: Vec<T> = ts.iter().map(|&t| t * (w.horizon - t)).collect();
    let phis: Vec<T> = xs.iter().map(|&x| w.phi(x)).collect();
    let log_scale = phis
        .iter()
        .flat_map(|&p| thetas.iter().map(move |&th| -two_s * p / th))
        .fold(T::neg_infinity(), T::max);
    let (mut lhs, mut rhs) = (T::zero(), T::zero());
    for (i, &x) in xs.iter().enumerate() {
        let xj = q.x_jets(x);
        for (j, &t) in ts.iter().enumerate() {
            let e = (-two_s * phis[i] / thetas[j] - log_scale).exp();
            if e == T::zero() {
                continue;
            }
            let v = q.combine(&xj, t);
            let r = w.s / thetas[j];
            let l = r.powi(5) * v.q * v.q + r.powi(3) * v.q_x * v.q_x + r * v.q_xx * v.q_xx;
            let pq = v.q_t - v.q_xx - v.q_xxx;
            let wgt = wx[i] * wt[j] * e;
            lhs = lhs + wgt * l;
            rhs = rhs + wgt * pq * pq;
        }
    }
    let ratio = if lhs == T::zero() && rhs == T::zero() { T::nan() } else { lhs / rhs };
    Ok(InequalityReport { lhs, rhs_raw: rhs, ratio, log_scale })
}
