//! Fourier analysis on `Z_N`: transforms with the convention
//! `F[f](ξ) = Σ_x f(x) e(−ξx/N)`, convolution, and the trilinear form
//! `Λ_3(f, g, h) = Σ_{x,d} f(x) g(x+d) h(x+2d)`.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{arg, Result};
use crate::numeric::{csum, ComplexSum};

/// A function `Z_N → C`, stored as its `N` values.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicFunction {
    values: Vec<Complex64>,
}

/// Coefficients `F[f](ξ)` for `ξ ∈ Z_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicTransform {
    coefficients: Vec<Complex64>,
}

impl CyclicFunction {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return arg("a function on Z_N needs N >= 1 values");
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return arg("function values must be finite");
        }
        Ok(Self { values })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// `1_A` on `Z_N`.
    pub fn indicator(n: usize, set: &[usize]) -> Result<Self> {
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        for &x in set {
            if x >= n {
                return arg(format!("element {x} lies outside Z_{n}"));
            }
            v[x] = Complex64::new(1.0, 0.0);
        }
        Self::new(v)
    }

    pub fn modulus(&self) -> usize {
        self.values.len()
    }
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }
}

impl CyclicTransform {
    pub fn from_coefficients(coefficients: Vec<Complex64>) -> Self {
        Self { coefficients }
    }
    pub fn modulus(&self) -> usize {
        self.coefficients.len()
    }
    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }
    /// `F(ξ)` for any integer `ξ`, reduced mod `N`.
    pub fn at(&self, xi: i64) -> Complex64 {
        let n = self.coefficients.len() as i64;
        self.coefficients[xi.rem_euclid(n) as usize]
    }
}

fn transform(buf: &mut [Complex64], inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let fft = if inverse {
        planner.plan_fft_inverse(buf.len())
    } else {
        planner.plan_fft_forward(buf.len())
    };
    fft.process(buf);
}

/// `F[f](ξ) = Σ_x f(x) e^{−2πiξx/N}`.
pub fn dft(f: &CyclicFunction) -> CyclicTransform {
    let mut buf = f.values.clone();
    transform(&mut buf, false);
    CyclicTransform { coefficients: buf }
}

/// `F^{-1}[F](x) = Σ_ξ F(ξ) e^{2πiξx/N}`; unnormalized, so `F^{-1}[F[f]] = N f`.
pub fn inverse_dft(t: &CyclicTransform) -> CyclicFunction {
    let mut buf = t.coefficients.clone();
    transform(&mut buf, true);
    CyclicFunction { values: buf }
}

fn same_modulus(a: usize, b: usize) -> Result<()> {
    if a != b {
        return arg(format!("moduli differ: {a} vs {b}"));
    }
    Ok(())
}

/// `(f * g)(x) = Σ_y f(x − y) g(y)`.
pub fn convolve(f: &CyclicFunction, g: &CyclicFunction) -> Result<CyclicFunction> {
    same_modulus(f.modulus(), g.modulus())?;
    let n = f.modulus();
    let ff = dft(f);
    let gg = dft(g);
    let prod = CyclicTransform {
        coefficients: ff.coefficients.iter().zip(&gg.coefficients).map(|(a, b)| a * b).collect(),
    };
    let mut out = inverse_dft(&prod);
    let scale = 1.0 / n as f64;
    out.values.iter_mut().for_each(|z| *z *= scale);
    Ok(out)
}

/// `N^{-1} Σ_ξ F[f](ξ) F[g](−2ξ) F[h](ξ)`, valid for odd `N`.
pub fn trilinear_fft(f: &CyclicFunction, g: &CyclicFunction, h: &CyclicFunction) -> Result<Complex64> {
    same_modulus(f.modulus(), g.modulus())?;
    same_modulus(f.modulus(), h.modulus())?;
    let n = f.modulus();
    if n % 2 == 0 {
        return arg(format!("the Fourier form of Λ_3 needs odd N, got {n}"));
    }
    Ok(trilinear_from_transforms(&dft(f), &dft(g), &dft(h)))
}

/// The Fourier-side sum of [`trilinear_fft`] from precomputed transforms.
pub fn trilinear_from_transforms(ff: &CyclicTransform, gg: &CyclicTransform, hh: &CyclicTransform) -> Complex64 {
    let n = ff.modulus();
    let s = csum((0..n).map(|xi| ff.coefficients[xi] * gg.at(-2 * xi as i64) * hh.coefficients[xi]));
    s / n as f64
}

/// `Σ_{x,d ∈ Z_N} f(x) g(x+d) h(x+2d)` by the double sum.
pub fn trilinear_direct(f: &CyclicFunction, g: &CyclicFunction, h: &CyclicFunction) -> Result<Complex64> {
    same_modulus(f.modulus(), g.modulus())?;
    same_modulus(f.modulus(), h.modulus())?;
    let n = f.modulus();
    let (fv, gv, hv) = (&f.values, &g.values, &h.values);
    let rows: Vec<Complex64> = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut acc = ComplexSum::new();
            for d in 0..n {
                acc.add(fv[x] * gv[(x + d) % n] * hv[(x + 2 * d) % n]);
            }
            acc.value()
        })
        .collect();
    Ok(csum(rows))
}

/// `F_Z[f](j/G) = Σ_n f(n) e^{2πi jn/G}` for `j = 0..G−1`, where `f` is
/// supported on `start, start+1, …`. The sequence is folded modulo `G` first,
/// which is exact for any support length.
pub fn fourier_on_grid(start: i64, values: &[Complex64], grid: usize) -> Result<Vec<Complex64>> {
    if grid == 0 {
        return arg("grid size must be at least 1");
    }
    let mut folded = vec![ComplexSum::new(); grid];
    for (i, &v) in values.iter().enumerate() {
        let r = (start + i as i64).rem_euclid(grid as i64) as usize;
        folded[r].add(v);
    }
    let mut buf: Vec<Complex64> = folded.iter().map(|s| s.value()).collect();
    transform(&mut buf, true);
    Ok(buf)
}

/// Real-valued convenience form of [`fourier_on_grid`].
pub fn fourier_on_grid_real(start: i64, values: &[f64], grid: usize) -> Result<Vec<Complex64>> {
    let v: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fourier_on_grid(start, &v, grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn delta_and_constant() {
        let delta = CyclicFunction::indicator(7, &[0]).unwrap();
        assert!(dft(&delta).coefficients().iter().all(|z| (z - c(1.0)).norm() < 1e-15));
        let ones = CyclicFunction::from_real(&[1.0; 7]).unwrap();
        let t = dft(&ones);
        assert!((t.coefficients()[0] - c(7.0)).norm() < 1e-14);
        assert!(t.coefficients()[1..].iter().all(|z| z.norm() < 1e-14));
        assert!(CyclicFunction::new(vec![]).is_err());
    }

    #[test]
    fn trilinear_small_cases() {
        let d = CyclicFunction::indicator(5, &[0]).unwrap();
        assert!((trilinear_fft(&d, &d, &d).unwrap() - c(1.0)).norm() < 1e-14);
        let ones = CyclicFunction::from_real(&[1.0; 5]).unwrap();
        assert!((trilinear_fft(&ones, &ones, &ones).unwrap() - c(25.0)).norm() < 1e-12);
        let a = CyclicFunction::indicator(5, &[0, 1, 2]).unwrap();
        assert!((trilinear_fft(&a, &a, &a).unwrap() - c(5.0)).norm() < 1e-12);
        assert!((trilinear_direct(&a, &a, &a).unwrap() - c(5.0)).norm() < 1e-12);
        let even = CyclicFunction::from_real(&[1.0; 4]).unwrap();
        assert!(trilinear_fft(&even, &even, &even).is_err());
    }

    #[test]
    fn grid_transform_of_pair() {
        let g = fourier_on_grid_real(0, &[1.0, 1.0], 64).unwrap();
        for (j, z) in g.iter().enumerate() {
            let xi = j as f64 / 64.0;
            let expect = 2.0 + 2.0 * (std::f64::consts::TAU * xi).cos();
            assert!((z.norm_sqr() - expect).abs() < 1e-12);
        }
        let folded = fourier_on_grid_real(-3, &[1.0, 2.0, 3.0, 4.0, 5.0], 2).unwrap();
        assert!((folded[0] - c(15.0)).norm() < 1e-12);
        assert!((folded[1] - c(-1.0 + 2.0 - 3.0 + 4.0 - 5.0)).norm() < 1e-12);
    }
}
