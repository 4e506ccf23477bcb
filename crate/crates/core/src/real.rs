//! Scalar abstraction shared by the pointwise kernels.
//!
//! The curvature kernel is written once over [`Real`] and instantiated with
//! `f64` for evaluation and with [`Dual`] for exact directional derivatives of
//! the Euler–Lagrange coefficients (second slot derivatives).

use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

pub trait Real:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    fn cst(v: f64) -> Self;
    fn value(self) -> f64;
    fn sqrt(self) -> Self;
    /// `self^e` for a real exponent; `e == 0` and `e == 1` are exact.
    fn powf(self, e: f64) -> Self;

    #[inline]
    fn zero() -> Self {
        Self::cst(0.0)
    }
    #[inline]
    fn scale(self, s: f64) -> Self {
        self * Self::cst(s)
    }
}

impl Real for f64 {
    #[inline]
    fn cst(v: f64) -> Self {
        v
    }
    #[inline]
    fn value(self) -> f64 {
        self
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn powf(self, e: f64) -> Self {
        if e == 0.0 {
            1.0
        } else if e == 1.0 {
            self
        } else {
            f64::powf(self, e)
        }
    }
}

/// Forward-mode dual number `v + d·ε`, ε² = 0.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dual {
    pub v: f64,
    pub d: f64,
}

impl Dual {
    pub fn new(v: f64, d: f64) -> Self {
        Dual { v, d }
    }
}

impl Add for Dual {
    type Output = Dual;
    #[inline]
    fn add(self, o: Dual) -> Dual {
        Dual::new(self.v + o.v, self.d + o.d)
    }
}
impl Sub for Dual {
    type Output = Dual;
    #[inline]
    fn sub(self, o: Dual) -> Dual {
        Dual::new(self.v - o.v, self.d - o.d)
    }
}
impl Mul for Dual {
    type Output = Dual;
    #[inline]
    fn mul(self, o: Dual) -> Dual {
        Dual::new(self.v * o.v, self.d * o.v + self.v * o.d)
    }
}
impl Div for Dual {
    type Output = Dual;
    #[inline]
    fn div(self, o: Dual) -> Dual {
        let inv = 1.0 / o.v;
        Dual::new(self.v * inv, (self.d * o.v - self.v * o.d) * inv * inv)
    }
}
impl Neg for Dual {
    type Output = Dual;
    #[inline]
    fn neg(self) -> Dual {
        Dual::new(-self.v, -self.d)
    }
}
impl AddAssign for Dual {
    #[inline]
    fn add_assign(&mut self, o: Dual) {
        *self = *self + o;
    }
}
impl SubAssign for Dual {
    #[inline]
    fn sub_assign(&mut self, o: Dual) {
        *self = *self - o;
    }
}
impl MulAssign for Dual {
    #[inline]
    fn mul_assign(&mut self, o: Dual) {
        *self = *self * o;
    }
}

impl Real for Dual {
    #[inline]
    fn cst(v: f64) -> Self {
        Dual::new(v, 0.0)
    }
    #[inline]
    fn value(self) -> f64 {
        self.v
    }
    #[inline]
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        Dual::new(s, 0.5 * self.d / s)
    }
    #[inline]
    fn powf(self, e: f64) -> Self {
        if e == 0.0 {
            Dual::cst(1.0)
        } else if e == 1.0 {
            self
        } else {
            let pv = self.v.powf(e);
            Dual::new(pv, e * self.v.powf(e - 1.0) * self.d)
        }
    }
}

/// Second-order Taylor jet `(f, f', f'')` along one parameter.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Taylor2 {
    pub v: f64,
    pub d: f64,
    pub dd: f64,
}

impl Taylor2 {
    pub fn new(v: f64, d: f64, dd: f64) -> Self {
        Taylor2 { v, d, dd }
    }
}

impl Add for Taylor2 {
    type Output = Taylor2;
    #[inline]
    fn add(self, o: Taylor2) -> Taylor2 {
        Taylor2::new(self.v + o.v, self.d + o.d, self.dd + o.dd)
    }
}
impl Sub for Taylor2 {
    type Output = Taylor2;
    #[inline]
    fn sub(self, o: Taylor2) -> Taylor2 {
        Taylor2::new(self.v - o.v, self.d - o.d, self.dd - o.dd)
    }
}
impl Mul for Taylor2 {
    type Output = Taylor2;
    #[inline]
    fn mul(self, o: Taylor2) -> Taylor2 {
        Taylor2::new(self.v * o.v, self.d * o.v + self.v * o.d, self.dd * o.v + 2.0 * self.d * o.d + self.v * o.dd)
    }
}
impl Div for Taylor2 {
    type Output = Taylor2;
    #[inline]
    fn div(self, o: Taylor2) -> Taylor2 {
        let q = self.v / o.v;
        let qd = (self.d - q * o.d) / o.v;
        let qdd = (self.dd - 2.0 * qd * o.d - q * o.dd) / o.v;
        Taylor2::new(q, qd, qdd)
    }
}
impl Neg for Taylor2 {
    type Output = Taylor2;
    #[inline]
    fn neg(self) -> Taylor2 {
        Taylor2::new(-self.v, -self.d, -self.dd)
    }
}
impl AddAssign for Taylor2 {
    #[inline]
    fn add_assign(&mut self, o: Taylor2) {
        *self = *self + o;
    }
}
impl SubAssign for Taylor2 {
    #[inline]
    fn sub_assign(&mut self, o: Taylor2) {
        *self = *self - o;
    }
}
impl MulAssign for Taylor2 {
    #[inline]
    fn mul_assign(&mut self, o: Taylor2) {
        *self = *self * o;
    }
}

impl Real for Taylor2 {
    #[inline]
    fn cst(v: f64) -> Self {
        Taylor2::new(v, 0.0, 0.0)
    }
    #[inline]
    fn value(self) -> f64 {
        self.v
    }
    #[inline]
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        let sd = 0.5 * self.d / s;
        Taylor2::new(s, sd, (self.dd - 2.0 * sd * sd) / (2.0 * s))
    }
    #[inline]
    fn powf(self, e: f64) -> Self {
        if e == 0.0 {
            Taylor2::cst(1.0)
        } else if e == 1.0 {
            self
        } else {
            let y1 = e * self.v.powf(e - 1.0);
            let y2 = e * (e - 1.0) * self.v.powf(e - 2.0);
            Taylor2::new(self.v.powf(e), y1 * self.d, y1 * self.dd + y2 * self.d * self.d)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dual_chain_rule_matches_calculus() {
        // d/dx [ sqrt(x) * x^1.5 / (1 + x) ] at x = 2
        let x = Dual::new(2.0, 1.0);
        let y = x.sqrt() * x.powf(1.5) / (Dual::cst(1.0) + x);
        let f = |x: f64| x.sqrt() * x.powf(1.5) / (1.0 + x);
        let h = 1e-6;
        let fd = (f(2.0 + h) - f(2.0 - h)) / (2.0 * h);
        assert!((y.v - f(2.0)).abs() < 1e-14);
        assert!((y.d - fd).abs() < 1e-8);
    }

    #[test]
    fn taylor_matches_closed_form() {
        // g(t) = sqrt(1 + t²)^{2.5} / (2 + t) at t = 0.7
        let t = Taylor2::new(0.7, 1.0, 0.0);
        let y = (Taylor2::cst(1.0) + t * t).sqrt().powf(2.5) / (Taylor2::cst(2.0) + t);
        let g = |t: f64| (1.0 + t * t).powf(1.25) / (2.0 + t);
        let h = 1e-4;
        let d1 = (g(0.7 + h) - g(0.7 - h)) / (2.0 * h);
        let d2 = (g(0.7 + h) - 2.0 * g(0.7) + g(0.7 - h)) / (h * h);
        assert!((y.v - g(0.7)).abs() < 1e-14);
        assert!((y.d - d1).abs() < 1e-7);
        assert!((y.dd - d2).abs() < 1e-6);
    }

    #[test]
    fn integer_exponents_are_exact() {
        assert_eq!(Real::powf(3.7_f64, 0.0), 1.0);
        assert_eq!(Real::powf(3.7_f64, 1.0), 3.7);
    }
}
