use num_complex::Complex;
use serde::Serialize;

use crate::numerics::cubic_roots;
use crate::scalar::Real;

/// Real parts closer to zero than this are treated as neither growing nor decaying.
pub const DEAD_BAND: f64 = 1e-9;

/// Roots of `τ - r³ - r² = 0` with the decaying ones marked.
#[derive(Debug, Clone, Serialize)]
pub struct CubicRootTriple<T> {
    pub tau: Complex<T>,
    pub roots: [Complex<T>; 3],
    pub decaying: Vec<usize>,
    pub degenerate: bool,
}

impl<T: Real> CubicRootTriple<T> {
    /// Largest `|τ - r³ - r²|` over the three roots.
    pub fn residual(&self) -> T {
        self.roots
            .iter()
            .fold(T::zero(), |m, &r| m.max((self.tau - r * r * r - r * r).norm()))
    }

    /// The two decaying roots, if the classification found exactly two.
    pub fn decaying_pair(&self) -> Option<(Complex<T>, Complex<T>)> {
        match self.decaying.as_slice() {
            [a, b] => Some((self.roots[*a], self.roots[*b])),
            _ => None,
        }
    }
}

pub fn characteristic_roots<T: Real>(tau: Complex<T>) -> CubicRootTriple<T> {
    let zero = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let cr = cubic_roots(one, zero, -tau);
    let band = T::lit(DEAD_BAND);
    let decaying = (0..3).filter(|&j| cr.roots[j].re < -band).collect();
    let degenerate = cr.roots.iter().any(|r| r.re.abs() < band);
    CubicRootTriple { tau, roots: cr.roots, decaying, degenerate }
}

/// Decaying roots written as `r_j(iλ³) = iλ + μ_j(λ)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RootSplit<T> {
    pub lambda: T,
    pub mu1: Complex<T>,
    pub mu2: Complex<T>,
}

pub fn root_split<T: Real>(lambda: T) -> Option<RootSplit<T>> {
    let tau = Complex::new(T::zero(), lambda * lambda * lambda);
    let (r1, r2) = characteristic_roots(tau).decaying_pair()?;
    let shift = Complex::new(T::zero(), lambda);
    Some(RootSplit { lambda, mu1: r1 - shift, mu2: r2 - shift })
}
