//! Double-double arithmetic (about 106 significant bits).
//!
//! Used only on the guarded path of floor computations, where a value of `h`
//! or `φ` lands within rounding distance of an integer.

use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

const LN2: DoubleDouble = DoubleDouble {
    hi: 6.931471805599452862e-01,
    lo: 2.319046813846299558e-17,
};

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };

    pub fn new(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    fn renorm(hi: f64, lo: f64) -> Self {
        let (hi, lo) = quick_two_sum(hi, lo);
        Self { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        Self::renorm(p, e + self.lo * b)
    }

    pub fn ldexp(self, k: i32) -> Self {
        let s = 2f64.powi(k);
        Self { hi: self.hi * s, lo: self.lo * s }
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn floor(self) -> Self {
        let fh = self.hi.floor();
        if fh == self.hi {
            Self::renorm(fh, self.lo.floor())
        } else {
            Self { hi: fh, lo: 0.0 }
        }
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.0 {
            return Self::new(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Self::ZERO;
        }
        let k = (self.hi / LN2.hi).round();
        let r = self - LN2.mul_f64(k);
        // expm1 of r/2^9 by Taylor series, then undo the scaling by repeated
        // doubling: expm1(2y) = expm1(y) * (expm1(y) + 2).
        let r = r.ldexp(-9);
        let mut term = r;
        let mut sum = r;
        for i in 2..=14 {
            term = term * r;
            term = term / Self::new(i as f64);
            sum = sum + term;
            if term.hi.abs() < 1e-36 {
                break;
            }
        }
        for _ in 0..9 {
            sum = sum * (sum + Self::new(2.0));
        }
        (sum + Self::ONE).ldexp(k as i32)
    }

    pub fn ln(self) -> Self {
        if self.hi <= 0.0 {
            return Self::new(f64::NAN);
        }
        let mut y = Self::new(self.hi.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp() - Self::ONE;
        }
        y
    }

    pub fn powf(self, c: Self) -> Self {
        (c * self.ln()).exp()
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        Self::new(x)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        Self::renorm(s, e + f)
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        Self::renorm(p, e + (self.hi * b.lo + self.lo * b.hi))
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (q1, q2) = quick_two_sum(q1, q2);
        Self { hi: q1, lo: q2 } + Self::new(q3)
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const E: DoubleDouble = DoubleDouble {
        hi: 2.718281828459045091e+00,
        lo: 1.445646891729250158e-16,
    };

    fn close(a: DoubleDouble, b: DoubleDouble, tol: f64) -> bool {
        (a - b).abs().to_f64() <= tol * b.abs().to_f64().max(1e-300)
    }

    #[test]
    fn exp_one_matches_e() {
        assert!(close(DoubleDouble::ONE.exp(), E, 1e-30));
    }

    #[test]
    fn ln_inverts_exp() {
        for &x in &[0.3, 1.0, 7.5, 123.456, -20.0] {
            let y = DoubleDouble::new(x).exp().ln();
            assert!(close(y, DoubleDouble::new(x), 1e-29), "x={x}");
        }
    }

    #[test]
    fn exact_powers_land_on_integers() {
        let eight = DoubleDouble::new(4.0).powf(DoubleDouble::new(1.5));
        assert!((eight - DoubleDouble::new(8.0)).abs().to_f64() < 1e-28);
        let two = DoubleDouble::new(2.0).powf(DoubleDouble::new(0.5));
        assert!(((two * two) - DoubleDouble::new(2.0)).abs().to_f64() < 1e-30);
    }

    #[test]
    fn division_round_trips() {
        let a = DoubleDouble::new(1.0) / DoubleDouble::new(3.0);
        assert!(close(a.mul_f64(3.0), DoubleDouble::ONE, 1e-31));
    }
}
