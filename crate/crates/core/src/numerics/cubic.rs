use num_complex::Complex;

use crate::scalar::Real;

/// Roots of `z³ + c2 z² + c1 z + c0` with their multiplicities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicRoots<T> {
    pub roots: [Complex<T>; 3],
    /// Number of returned roots (itself included) that coincide with each root.
    pub multiplicity: [u8; 3],
}

impl<T: Real> CubicRoots<T> {
    /// Largest `|p(z)| / (1 + |z|³)` over the roots.
    pub fn max_scaled_residual(&self, c2: Complex<T>, c1: Complex<T>, c0: Complex<T>) -> T {
        self.roots.iter().fold(T::zero(), |m, &z| {
            let r = eval(c2, c1, c0, z).norm() / (T::one() + z.norm().powi(3));
            m.max(r)
        })
    }
}

fn eval<T: Real>(c2: Complex<T>, c1: Complex<T>, c0: Complex<T>, z: Complex<T>) -> Complex<T> {
    ((z + c2) * z + c1) * z + c0
}

fn deriv<T: Real>(c2: Complex<T>, c1: Complex<T>, z: Complex<T>) -> Complex<T> {
    (z * T::lit(3.0) + c2 * T::lit(2.0)) * z + c1
}

/// Cardano's formula followed by Newton polishing of each root.
pub fn cubic_roots<T: Real>(c2: Complex<T>, c1: Complex<T>, c0: Complex<T>) -> CubicRoots<T> {
    let three = T::lit(3.0);
    let shift = c2 / three;
    let p = c1 - c2 * c2 / three;
    let q = c2 * c2 * c2 * T::lit(2.0 / 27.0) - c2 * c1 / three + c0;
    let disc = (q * q / T::lit(4.0) + p * p * p / T::lit(27.0)).sqrt();
    let half_q = -q / T::lit(2.0);
    let cand = if (half_q + disc).norm() >= (half_q - disc).norm() { half_q + disc } else { half_q - disc };
    let u = cand.cbrt();
    let omega = Complex::new(T::lit(-0.5), T::lit(3.0f64.sqrt() / 2.0));
    let mut roots = [Complex::new(T::zero(), T::zero()); 3];
    let mut rot = Complex::new(T::one(), T::zero());
    for root in roots.iter_mut() {
        let uk = u * rot;
        let y = if uk.norm() > T::zero() { uk - p / (uk * three) } else { uk };
        *root = y - shift;
        rot = rot * omega;
    }
    for root in roots.iter_mut() {
        *root = polish(c2, c1, c0, *root);
    }
    let scale = roots.iter().fold(T::one(), |m, z| m.max(z.norm()));
    let tol = T::lit(1e-6) * scale;
    let mut multiplicity = [1u8; 3];
    for i in 0..3 {
        for j in 0..3 {
            if i != j && (roots[i] - roots[j]).norm() <= tol {
                multiplicity[i] += 1;
            }
        }
    }
    CubicRoots { roots, multiplicity }
}

fn polish<T: Real>(c2: Complex<T>, c1: Complex<T>, c0: Complex<T>, mut z: Complex<T>) -> Complex<T> {
    let mut res = eval(c2, c1, c0, z).norm();
    for _ in 0..8 {
        let d = deriv(c2, c1, z);
        if d.norm() == T::zero() || res == T::zero() {
            break;
        }
        let cand = z - eval(c2, c1, c0, z) / d;
        let cres = eval(c2, c1, c0, cand).norm();
        if !(cres < res) {
            break;
        }
        z = cand;
        res = cres;
    }
    z
}
