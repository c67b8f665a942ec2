//! Polynomials in `s`, `x`, `θ^{-1}` and `(2t - T)`, where `θ = t(T - t)`.
//!
//! The weight and all coefficient fields live in this ring, which is closed under `∂x` and
//! `∂t` because `∂t θ = -(2t - T)` and `∂t (2t - T) = 2`.

use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Powers {
    pub s: u8,
    pub x: u8,
    /// Power of `θ^{-1}`.
    pub inv_theta: u8,
    /// Power of `(2t - T)`.
    pub odd: u8,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Poly {
    terms: BTreeMap<Powers, f64>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self::monomial(c, Powers { s: 0, x: 0, inv_theta: 0, odd: 0 })
    }

    pub fn monomial(c: f64, p: Powers) -> Self {
        let mut out = Self::zero();
        out.push(c, p);
        out
    }

    fn push(&mut self, c: f64, p: Powers) {
        if c == 0.0 {
            return;
        }
        let e = self.terms.entry(p).or_insert(0.0);
        *e += c;
        if *e == 0.0 {
            self.terms.remove(&p);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Powers, &f64)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (p, c) in &other.terms {
            out.push(*c, *p);
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, a: f64) -> Poly {
        let mut out = Poly::zero();
        for (p, c) in &self.terms {
            out.push(c * a, *p);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (p, c) in &self.terms {
            for (q, d) in &other.terms {
                let r = Powers { s: p.s + q.s, x: p.x + q.x, inv_theta: p.inv_theta + q.inv_theta, odd: p.odd + q.odd };
                out.push(c * d, r);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Poly {
        (0..k).fold(Poly::constant(1.0), |acc, _| acc.mul(self))
    }

    /// Multiplies by `s^k`.
    pub fn times_s(&self, k: u8) -> Poly {
        let mut out = Poly::zero();
        for (p, c) in &self.terms {
            out.push(*c, Powers { s: p.s + k, ..*p });
        }
        out
    }

    pub fn dx(&self) -> Poly {
        let mut out = Poly::zero();
        for (p, c) in &self.terms {
            if p.x > 0 {
                out.push(c * p.x as f64, Powers { x: p.x - 1, ..*p });
            }
        }
        out
    }

    pub fn dt(&self) -> Poly {
        let mut out = Poly::zero();
        for (p, c) in &self.terms {
            if p.inv_theta > 0 {
                out.push(c * p.inv_theta as f64, Powers { inv_theta: p.inv_theta + 1, odd: p.odd + 1, ..*p });
            }
            if p.odd > 0 {
                out.push(c * 2.0 * p.odd as f64, Powers { odd: p.odd - 1, ..*p });
            }
        }
        out
    }

    pub fn dx_n(&self, n: usize) -> Poly {
        (0..n).fold(self.clone(), |acc, _| acc.dx())
    }

    /// Terms carrying exactly `s^k`, with `s` removed.
    pub fn s_part(&self, k: u8) -> Poly {
        let mut out = Poly::zero();
        for (p, c) in &self.terms {
            if p.s == k {
                out.push(*c, Powers { s: 0, ..*p });
            }
        }
        out
    }

    pub fn s_degree(&self) -> Option<u8> {
        self.terms.keys().map(|p| p.s).max()
    }

    pub fn eval(&self, s: f64, x: f64, t: f64, horizon: f64) -> f64 {
        let inv_theta = 1.0 / (t * (horizon - t));
        let odd = 2.0 * t - horizon;
        self.terms.iter().fold(0.0, |acc, (p, c)| {
            acc + c * s.powi(p.s as i32) * x.powi(p.x as i32) * inv_theta.powi(p.inv_theta as i32) * odd.powi(p.odd as i32)
        })
    }
}
