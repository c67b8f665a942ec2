use serde::Serialize;

use super::symbolic::{Powers, Poly};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Which `s³` bracket of the conjugated operator to use.
///
/// `Derived` is the bracket obtained by expanding `e^{sψ} P e^{-sψ}` directly and is what
/// every other routine uses. `Printed` carries an extra `3ψ_xψ_xx` term in the `s³` bracket
/// and is kept only for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum ExpansionVariant {
    #[default]
    Derived,
    Printed,
}

/// `ψ = φ(x)/(t(T - t))` with `φ(x) = -x² - (2L + 3T/2)x` and large parameter `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CarlemanWeight<T> {
    pub l: T,
    pub horizon: T,
    pub s: T,
    pub variant: ExpansionVariant,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightPartials<T> {
    pub psi: T,
    pub psi_x: T,
    pub psi_xx: T,
    pub psi_xxx: T,
    pub psi_t: T,
}

impl<T: Real> CarlemanWeight<T> {
    pub fn new(l: T, horizon: T, s: T) -> Result<Self> {
        for (name, v) in [("L", l), ("T", horizon), ("s", s)] {
            if !(v > T::zero() && v.is_finite()) {
                return Err(Error::Precondition(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(Self { l, horizon, s, variant: ExpansionVariant::Derived })
    }

    pub fn with_variant(mut self, variant: ExpansionVariant) -> Self {
        self.variant = variant;
        self
    }

    pub fn with_s(mut self, s: T) -> Self {
        self.s = s;
        self
    }

    /// Linear coefficient `2L + 3T/2`.
    pub fn beta(&self) -> T {
        T::lit(2.0) * self.l + T::lit(1.5) * self.horizon
    }

    pub fn phi(&self, x: T) -> T {
        -x * x - self.beta() * x
    }

    pub fn phi_x(&self, x: T) -> T {
        -T::lit(2.0) * x - self.beta()
    }

    pub fn check_time(&self, t: T) -> Result<()> {
        if !(t > T::zero() && t < self.horizon) {
            return Err(Error::Precondition(format!(
                "weight is singular outside the open interval (0, {}), got t = {t}",
                self.horizon
            )));
        }
        Ok(())
    }

    pub fn expansion(&self, epsilon: T) -> Expansion {
        Expansion::new(self.l.as_f64(), self.horizon.as_f64(), self.variant, epsilon.as_f64())
    }
}

pub fn weight_eval<T: Real>(w: &CarlemanWeight<T>, x: T, t: T) -> Result<WeightPartials<T>> {
    w.check_time(t)?;
    let theta = t * (w.horizon - t);
    let phi = w.phi(x);
    Ok(WeightPartials {
        psi: phi / theta,
        psi_x: w.phi_x(x) / theta,
        psi_xx: -T::lit(2.0) / theta,
        psi_xxx: T::zero(),
        psi_t: phi * (T::lit(2.0) * t - w.horizon) / (theta * theta),
    })
}

/// `A`–`F` as polynomials in `s`, `x`, `1/θ`, `(2t - T)`.
#[derive(Debug, Clone)]
pub struct Expansion {
    pub horizon: f64,
    pub psi: Poly,
    pub a: Poly,
    pub b: Poly,
    pub c: Poly,
    pub d: Poly,
    pub e: Poly,
    pub f: Poly,
}

impl Expansion {
    pub fn new(l: f64, horizon: f64, variant: ExpansionVariant, epsilon: f64) -> Self {
        let beta = 2.0 * l + 1.5 * horizon;
        let mono = |c: f64, x: u8, inv_theta: u8| Poly::monomial(c, Powers { s: 0, x, inv_theta, odd: 0 });
        let psi = mono(-1.0, 2, 1).add(&mono(-beta, 1, 1));
        let (px, pxx, pxxx, pt) = (psi.dx(), psi.dx_n(2), psi.dx_n(3), psi.dt());
        let px_pxx = px.mul(&pxx);

        let s1 = pt.sub(&pxx).sub(&pxxx).times_s(1);
        let s2 = px.pow(2).add(&px_pxx.scale(3.0)).times_s(2);
        let s3 = match variant {
            ExpansionVariant::Derived => px.pow(3),
            ExpansionVariant::Printed => px.pow(3).add(&px_pxx.scale(3.0)),
        }
        .times_s(3);
        let a = s1.sub(&s2).sub(&s3);
        let b = px.scale(2.0).add(&pxx.scale(3.0)).times_s(1).scale(-1.0).sub(&px.pow(2).times_s(2).scale(3.0));
        let c = Poly::constant(-1.0).sub(&px.times_s(1).scale(3.0));

        let cx = c.dx();
        let d = a
            .dt()
            .scale(-1.0)
            .add(&a.dx_n(3))
            .sub(&a.mul(&b).dx())
            .sub(&cx.mul(&a).dx());
        let e = c
            .dt()
            .add(&cx.mul(&b).scale(2.0))
            .sub(&cx.mul(&c).dx())
            .sub(&c.dx_n(3))
            .sub(&b.mul(&c).dx())
            .sub(&cx.mul(&cx).scale(epsilon));
        let f = cx.scale(3.0);
        Self { horizon, psi, a, b, c, d, e, f }
    }

    pub fn eval<T: Real>(&self, p: &Poly, s: T, x: T, t: T) -> T {
        T::lit(p.eval(s.as_f64(), x.as_f64(), t.as_f64(), self.horizon))
    }
}

pub fn coefficients_abc<T: Real>(w: &CarlemanWeight<T>, x: T, t: T) -> Result<(T, T, T)> {
    w.check_time(t)?;
    let ex = w.expansion(T::lit(0.1));
    Ok((ex.eval(&ex.a, w.s, x, t), ex.eval(&ex.b, w.s, x, t), ex.eval(&ex.c, w.s, x, t)))
}
