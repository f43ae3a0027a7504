//! Small numeric helpers: compensated accumulation, phases, integer utilities
//! and least-squares slope fitting.

use num_complex::Complex64;
use std::f64::consts::TAU;

/// Neumaier-compensated running sum. Deterministic for a fixed input order.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Compensated sum of complex values (real and imaginary parts tracked separately).
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

impl FromIterator<Complex64> for ComplexSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut s = ComplexSum::new();
        for z in iter {
            s.add(z);
        }
        s
    }
}

pub fn csum<I: IntoIterator<Item = Complex64>>(iter: I) -> Complex64 {
    iter.into_iter().collect::<ComplexSum>().value()
}

pub fn fsum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

/// Fractional part in `[0, 1)`.
#[inline]
pub fn frac(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// Distance to the nearest integer, `‖x‖`.
#[inline]
pub fn dist_to_int(x: f64) -> f64 {
    let f = frac(x);
    f.min(1.0 - f)
}

/// `e(x) = exp(2πix)`, reducing the argument modulo 1 first.
#[inline]
pub fn e(x: f64) -> Complex64 {
    Complex64::cis(TAU * frac(x))
}

/// `e(a + b)` where `a` and `b` are reduced separately, which keeps the phase
/// accurate when both terms are large.
#[inline]
pub fn e2(a: f64, b: f64) -> Complex64 {
    e(frac(a) + frac(b))
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Least-squares slope of `log y` against `log x`. Pairs with a non-positive
/// coordinate are skipped; returns `None` with fewer than two usable points.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    linear_slope(&pts)
}

pub fn linear_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = fsum(pts.iter().map(|p| p.0)) / n;
    let my = fsum(pts.iter().map(|p| p.1)) / n;
    let sxy = fsum(pts.iter().map(|p| (p.0 - mx) * (p.1 - my)));
    let sxx = fsum(pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)));
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

/// Relative difference `|a - b| / max(|b|, floor)`.
pub fn rel_diff(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / b.abs().max(floor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_cancellation() {
        let xs = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(fsum(xs), 2.0);
    }

    #[test]
    fn distance_to_integer() {
        assert_eq!(dist_to_int(2.25), 0.25);
        assert_eq!(dist_to_int(-0.75), 0.25);
        assert_eq!(dist_to_int(3.0), 0.0);
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = (1..8).map(|k| (2f64.powi(k), 3.0 * 2f64.powi(k).powf(0.7))).collect();
        assert!((loglog_slope(&pts).unwrap() - 0.7).abs() < 1e-12);
        assert!(loglog_slope(&pts[..1]).is_none());
    }

    #[test]
    fn gcd_basics() {
        assert_eq!(gcd(0, 1), 1);
        assert_eq!(gcd(12, 18), 6);
        assert_eq!(gcd(7, 0), 7);
    }
}
