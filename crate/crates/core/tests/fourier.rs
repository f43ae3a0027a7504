mod common;

use common::{convolve_direct, dft_direct};
use num_complex::Complex64;
use psroth::zn_fourier::{
    convolve, dft, fourier_on_grid, fourier_on_grid_real, inverse_dft, trilinear_direct, trilinear_fft, CyclicFunction,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[test]
fn dft_matches_direct_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in [7, 64, 101, 1009] {
        let f = random(&mut rng, n);
        let fast = dft(&CyclicFunction::new(f.clone()).unwrap());
        assert!(max_diff(fast.coefficients(), &dft_direct(&f)) < 1e-9 * n as f64, "N={n}");
    }
}

#[test]
fn inversion_at_101() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let f = random(&mut rng, 101);
    let back = inverse_dft(&dft(&CyclicFunction::new(f.clone()).unwrap()));
    let nf: Vec<Complex64> = f.iter().map(|z| z * 101.0).collect();
    let scale = nf.iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!(max_diff(back.values(), &nf) <= 1e-9 * scale);
}

#[test]
fn convolution_at_64_matches_double_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let f = random(&mut rng, 64);
    let g = random(&mut rng, 64);
    let fast = convolve(&CyclicFunction::new(f.clone()).unwrap(), &CyclicFunction::new(g.clone()).unwrap()).unwrap();
    assert!(max_diff(fast.values(), &convolve_direct(&f, &g)) <= 1e-9);
}

#[test]
fn trilinear_small_cases() {
    let a = CyclicFunction::indicator(5, &[0, 1, 2]).unwrap();
    assert!((trilinear_fft(&a, &a, &a).unwrap() - 5.0).norm() < 1e-12);
    assert!((trilinear_direct(&a, &a, &a).unwrap() - 5.0).norm() < 1e-12);
    let ones = CyclicFunction::from_real(&[1.0; 5]).unwrap();
    assert!((trilinear_fft(&ones, &ones, &ones).unwrap() - 25.0).norm() < 1e-12);
    let delta = CyclicFunction::indicator(5, &[0]).unwrap();
    assert!((trilinear_fft(&delta, &delta, &delta).unwrap() - 1.0).norm() < 1e-12);
    let even = CyclicFunction::from_real(&[1.0; 6]).unwrap();
    assert!(trilinear_fft(&even, &even, &even).is_err());
}

#[test]
fn grid_transform_uses_positive_sign() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let f = random(&mut rng, 50);
    let grid = fourier_on_grid(0, &f, 50).unwrap();
    let conj: Vec<Complex64> = f.iter().map(|z| z.conj()).collect();
    let want: Vec<Complex64> = dft_direct(&conj).iter().map(|z| z.conj()).collect();
    assert!(max_diff(&grid, &want) < 1e-10);
}

#[test]
fn grid_transform_of_two_point_indicator() {
    let g = 97;
    let f = fourier_on_grid_real(0, &[1.0, 1.0], g).unwrap();
    for (j, z) in f.iter().enumerate() {
        let closed = 2.0 + 2.0 * (2.0 * std::f64::consts::PI * j as f64 / g as f64).cos();
        assert!((z.norm_sqr() - closed).abs() < 1e-12);
    }
    let d = fourier_on_grid_real(0, &[1.0], 16).unwrap();
    assert!(d.iter().all(|z| (z - 1.0).norm() < 1e-15));
}

#[test]
fn grid_transform_folds_long_support() {
    // support longer than the grid, shifted start
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let f = random(&mut rng, 300);
    let start = 17i64;
    let g = 64;
    let got = fourier_on_grid(start, &f, g).unwrap();
    for j in [0usize, 1, 5, 63] {
        let want: Complex64 = f
            .iter()
            .enumerate()
            .map(|(i, v)| v * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (j as f64) * (start + i as i64) as f64 / g as f64))
            .sum();
        assert!((got[j] - want).norm() < 1e-9, "j={j}");
    }
}
