//! Exact eigen-decomposition of the periodic operator on `(-L, L)` and observability ratios.

use ndarray::Array2;
use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{quadrature_weights, QuadRule};
use crate::scalar::Real;

/// `λ_n = -i(nπ/L)³ - (nπ/L)²` for `|n| ≤ n_max`, stored from `n = -n_max` upward.
#[derive(Debug, Clone, Serialize)]
pub struct PeriodicSpectrum<T> {
    pub l: T,
    pub n_max: usize,
    pub eigenvalues: Vec<Complex<T>>,
    pub gap: T,
}

impl<T: Real> PeriodicSpectrum<T> {
    pub fn modes(&self) -> impl Iterator<Item = i64> {
        let m = self.n_max as i64;
        -m..=m
    }

    pub fn lambda(&self, n: i64) -> Complex<T> {
        self.eigenvalues[(n + self.n_max as i64) as usize]
    }

    /// Dispersive parts `α_n = (nπ/L)³` in increasing order.
    pub fn alphas(&self) -> Vec<T> {
        self.eigenvalues.iter().map(|l| -l.im).collect()
    }

    /// Smallest `α_{n+1} - α_n` over the stored modes.
    pub fn min_gap(&self) -> T {
        self.alphas().windows(2).fold(T::infinity(), |m, p| m.min(p[1] - p[0]))
    }

    /// Smallest `α_{n+1} - α_n` over pairs that avoid `n ∈ {-1, 0}`.
    pub fn min_gap_off_origin(&self) -> T {
        let a = self.alphas();
        let m = self.n_max as i64;
        a.windows(2)
            .enumerate()
            .filter(|(k, _)| {
                let n = *k as i64 - m;
                n != -1 && n != 0
            })
            .fold(T::infinity(), |acc, (_, p)| acc.min(p[1] - p[0]))
    }
}

pub fn spectrum<T: Real>(l: T, n_max: usize) -> Result<PeriodicSpectrum<T>> {
    if !(l > T::zero()) {
        return Err(Error::Precondition(format!("half-period L must be positive, got {l}")));
    }
    let m = n_max as i64;
    let eigenvalues = (-m..=m)
        .map(|n| {
            let k = T::from_i64(n).unwrap() * T::PI() / l;
            Complex::new(-k * k, -k * k * k)
        })
        .collect();
    Ok(PeriodicSpectrum { l, n_max, eigenvalues, gap: ingham_params(l)?.0 })
}

/// `γ = 2π³/L³` and the smallest admissible horizon `π/γ = L³/(2π²)`.
pub fn ingham_params<T: Real>(l: T) -> Result<(T, T)> {
    if !(l > T::zero()) {
        return Err(Error::Precondition(format!("half-period L must be positive, got {l}")));
    }
    let pi = T::PI();
    let gamma = T::lit(2.0) * pi * pi * pi / (l * l * l);
    Ok((gamma, pi / gamma))
}

/// Coefficients `c_n`, `|n| ≤ n_max`, against `e_n(x) = (2L)^{-1/2} e^{inπx/L}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeCoeffs<T> {
    pub n_max: usize,
    pub c: Vec<Complex<T>>,
}

impl<T: Real> ModeCoeffs<T> {
    pub fn new(c: Vec<Complex<T>>) -> Result<Self> {
        if c.len() % 2 == 0 {
            return Err(Error::Precondition("coefficient vector must have odd length 2 n_max + 1".into()));
        }
        if c.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Numerical("coefficients must be finite".into()));
        }
        Ok(Self { n_max: c.len() / 2, c })
    }

    pub fn single(n_max: usize, n: i64) -> Self {
        let mut c = vec![Complex::new(T::zero(), T::zero()); 2 * n_max + 1];
        c[(n + n_max as i64) as usize] = Complex::new(T::one(), T::zero());
        Self { n_max, c }
    }

    pub fn get(&self, n: i64) -> Complex<T> {
        self.c[(n + self.n_max as i64) as usize]
    }

    pub fn norm_sqr(&self) -> T {
        self.c.iter().fold(T::zero(), |a, z| a + z.norm_sqr())
    }

    pub fn scaled(&self, a: T) -> Self {
        Self { n_max: self.n_max, c: self.c.iter().map(|&z| z * a).collect() }
    }

    /// Complex Gaussian draw with standard deviation `⟨n⟩^{-decay}`.
    ///
    /// Modes are drawn in the order `0, 1, -1, 2, -2, …`, so a larger `n_max` with the same
    /// seed extends a smaller draw instead of replacing it.
    pub fn random(n_max: usize, decay: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c = vec![Complex::new(T::zero(), T::zero()); 2 * n_max + 1];
        let mut order = vec![0i64];
        for n in 1..=n_max as i64 {
            order.push(n);
            order.push(-n);
        }
        for n in order {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            let w = (1.0 + (n * n) as f64).powf(-decay / 2.0);
            c[(n + n_max as i64) as usize] = Complex::new(T::lit(re * w), T::lit(im * w));
        }
        Self { n_max, c }
    }
}

fn check_sizes<T: Real>(c: &ModeCoeffs<T>, spec: &PeriodicSpectrum<T>) -> Result<()> {
    if c.n_max != spec.n_max {
        return Err(Error::LengthMismatch { expected: 2 * spec.n_max + 1, got: c.c.len() });
    }
    Ok(())
}

/// `c_n ↦ e^{λ_n t} c_n`.
pub fn propagate_periodic<T: Real>(c: &ModeCoeffs<T>, spec: &PeriodicSpectrum<T>, t: T) -> Result<ModeCoeffs<T>> {
    check_sizes(c, spec)?;
    if t < T::zero() {
        return Err(Error::Precondition(format!("propagation time must be nonnegative, got {t}")));
    }
    Ok(ModeCoeffs {
        n_max: c.n_max,
        c: c.c.iter().zip(&spec.eigenvalues).map(|(&z, &l)| z * (l * t).exp()).collect(),
    })
}

/// `Σ c_n e^{λ_n t} e_n(x)`.
pub fn evaluate<T: Real>(c: &ModeCoeffs<T>, spec: &PeriodicSpectrum<T>, x: T, t: T) -> Complex<T> {
    let norm = T::one() / (T::lit(2.0) * spec.l).sqrt();
    spec.modes().zip(&c.c).fold(Complex::new(T::zero(), T::zero()), |acc, (n, &z)| {
        let k = T::from_i64(n).unwrap() * T::PI() / spec.l;
        acc + z * (spec.lambda(n) * t + Complex::new(T::zero(), k * x)).exp() * norm
    })
}

fn validate_window<T: Real>(l: T, sub: T, horizon: T) -> Result<()> {
    if !(sub > T::zero() && sub < l) {
        return Err(Error::Precondition(format!("need 0 < l < L, got l = {sub}, L = {l}")));
    }
    if !(horizon > T::zero()) {
        return Err(Error::Precondition(format!("horizon must be positive, got {horizon}")));
    }
    Ok(())
}

/// `‖u_0‖²_{L²(-L,L)} / ‖u‖²_{L²((-l,l)×(0,T))}` with the denominator summed from exact cross terms.
pub fn observability_ratio<T: Real>(c: &ModeCoeffs<T>, l: T, sub: T, horizon: T) -> Result<T> {
    validate_window(l, sub, horizon)?;
    let spec = spectrum(l, c.n_max)?;
    let num = c.norm_sqr();
    if num == T::zero() {
        return Err(Error::Precondition("zero initial data has no observability ratio".into()));
    }
    let modes: Vec<i64> = spec.modes().collect();
    let mut den = Complex::new(T::zero(), T::zero());
    for (a, &m) in modes.iter().enumerate() {
        for (b, &n) in modes.iter().enumerate() {
            let w = c.c[a] * c.c[b].conj();
            if w == Complex::new(T::zero(), T::zero()) {
                continue;
            }
            let z = spec.lambda(m) + spec.lambda(n).conj();
            let it = if z.norm() == T::zero() { Complex::new(horizon, T::zero()) } else { ((z * horizon).exp() - T::one()) / z };
            let k = T::from_i64(m - n).unwrap() * T::PI() / l;
            let ix = if m == n { sub / l } else { (k * sub).sin() / (k * l) };
            den = den + w * it * ix;
        }
    }
    Ok(num / den.re)
}

/// Same ratio with the denominator integrated by composite Simpson on an `nx × nt` grid.
pub fn observability_ratio_quadrature<T: Real>(
    c: &ModeCoeffs<T>,
    l: T,
    sub: T,
    horizon: T,
    nx: usize,
    nt: usize,
) -> Result<T> {
    validate_window(l, sub, horizon)?;
    if nx < 4 || nt < 4 {
        return Err(Error::Precondition("quadrature grids need at least 4 points".into()));
    }
    let spec = spectrum(l, c.n_max)?;
    let num = c.norm_sqr();
    if num == T::zero() {
        return Err(Error::Precondition("zero initial data has no observability ratio".into()));
    }
    let modes: Vec<i64> = spec.modes().collect();
    let dx = T::lit(2.0) * sub / T::from_usize_lossy(nx - 1);
    let dt = horizon / T::from_usize_lossy(nt - 1);
    let norm = T::one() / (T::lit(2.0) * l).sqrt();
    let nm = modes.len();
    let (mut exr, mut exi) = (Array2::<T>::zeros((nx, nm)), Array2::<T>::zeros((nx, nm)));
    for i in 0..nx {
        let x = -sub + dx * T::from_usize_lossy(i);
        for (a, &n) in modes.iter().enumerate() {
            let k = T::from_i64(n).unwrap() * T::PI() / l;
            let (s, co) = (k * x).sin_cos();
            exr[[i, a]] = co * norm;
            exi[[i, a]] = s * norm;
        }
    }
    let (mut etr, mut eti) = (Array2::<T>::zeros((nm, nt)), Array2::<T>::zeros((nm, nt)));
    for j in 0..nt {
        let t = dt * T::from_usize_lossy(j);
        for (a, &n) in modes.iter().enumerate() {
            let v = c.c[a] * (spec.lambda(n) * t).exp();
            etr[[a, j]] = v.re;
            eti[[a, j]] = v.im;
        }
    }
    let ur = exr.dot(&etr) - exi.dot(&eti);
    let ui = exr.dot(&eti) + exi.dot(&etr);
    let wx = quadrature_weights(nx, dx, QuadRule::Simpson);
    let wt = quadrature_weights(nt, dt, QuadRule::Simpson);
    let mut den = T::zero();
    for i in 0..nx {
        for j in 0..nt {
            den = den + wx[i] * wt[j] * (ur[[i, j]] * ur[[i, j]] + ui[[i, j]] * ui[[i, j]]);
        }
    }
    Ok(num / den)
}

/// Closed form of the ratio for the single mode `n`.
pub fn single_mode_ratio<T: Real>(n: i64, l: T, sub: T, horizon: T) -> T {
    let k = T::from_i64(n).unwrap() * T::PI() / l;
    let time = if n == 0 { horizon } else { (T::one() - (-T::lit(2.0) * k * k * horizon).exp()) / (T::lit(2.0) * k * k) };
    T::one() / (sub / l * time)
}

/// How the denominator of the ratio is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum RatioRoute {
    Analytic,
    Quadrature { nx: usize, nt: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct EnsembleReport {
    pub max_ratio: f64,
    pub argmax_seed: u64,
    pub ratios: Vec<f64>,
    pub seeds: Vec<u64>,
}

/// Ratios over `draws` random coefficient vectors seeded `seed, seed + 1, …`.
#[allow(clippy::too_many_arguments)]
pub fn ensemble_ratios<T: Real>(
    l: T,
    sub: T,
    horizon: T,
    n_max: usize,
    draws: usize,
    seed: u64,
    decay: f64,
    route: RatioRoute,
) -> Result<EnsembleReport> {
    let mut ratios = Vec::with_capacity(draws);
    let mut seeds = Vec::with_capacity(draws);
    for d in 0..draws as u64 {
        let c = ModeCoeffs::<T>::random(n_max, decay, seed + d);
        let r = match route {
            RatioRoute::Analytic => observability_ratio(&c, l, sub, horizon)?,
            RatioRoute::Quadrature { nx, nt } => observability_ratio_quadrature(&c, l, sub, horizon, nx, nt)?,
        };
        ratios.push(r.as_f64());
        seeds.push(seed + d);
    }
    let (k, max_ratio) = ratios
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bk, bm), (k, &r)| if r > bm { (k, r) } else { (bk, bm) });
    Ok(EnsembleReport { max_ratio, argmax_seed: seeds.get(k).copied().unwrap_or(seed), ratios, seeds })
}
