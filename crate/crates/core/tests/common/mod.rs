//! Slow, obviously-correct reference implementations used as oracles.
#![allow(dead_code)]

use num_complex::Complex64;
use psroth::{FunctionSpec, InverseSpec};

pub fn is_prime_trial(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Plain Eratosthenes over a `Vec<bool>`.
pub fn eratosthenes(limit: usize) -> Vec<bool> {
    let mut p = vec![true; limit + 1];
    p[0] = false;
    if limit >= 1 {
        p[1] = false;
    }
    let mut i = 2;
    while i * i <= limit {
        if p[i] {
            for j in (i * i..=limit).step_by(i) {
                p[j] = false;
            }
        }
        i += 1;
    }
    p
}

pub fn mangoldt_trial(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let p = (2..=n).find(|d| n % d == 0).unwrap();
    let mut m = n;
    while m % p == 0 {
        m /= p;
    }
    if m == 1 {
        (p as f64).ln()
    } else {
        0.0
    }
}

pub fn mobius_trial(mut n: u64) -> i8 {
    let mut sign = 1;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            n /= d;
            if n % d == 0 {
                return 0;
            }
            sign = -sign;
        }
        d += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

/// `Σ_x f(x) e^{−2πiξx/N}` by the O(N²) double loop.
pub fn dft_direct(f: &[Complex64]) -> Vec<Complex64> {
    let n = f.len();
    (0..n)
        .map(|xi| {
            f.iter()
                .enumerate()
                .map(|(x, v)| v * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * ((xi * x) % n) as f64 / n as f64))
                .sum()
        })
        .collect()
}

pub fn convolve_direct(f: &[Complex64], g: &[Complex64]) -> Vec<Complex64> {
    let n = f.len();
    (0..n).map(|x| (0..n).map(|y| f[(x + n - y) % n] * g[y]).sum()).collect()
}

/// Nontrivial ordered 3APs `(x, d)`, `d ≠ 0`, inside `{0, …, N−1}` (no wrap).
pub fn brute_3aps_integer(set: &[u64], n: u64) -> u64 {
    let inside: Vec<bool> = (0..n).map(|x| set.contains(&x)).collect();
    let mut c = 0;
    for x in 0..n as i64 {
        for d in -(n as i64)..=(n as i64) {
            if d == 0 {
                continue;
            }
            let (y, z) = (x + d, x + 2 * d);
            if y < 0 || z < 0 || y >= n as i64 || z >= n as i64 {
                continue;
            }
            if inside[x as usize] && inside[y as usize] && inside[z as usize] {
                c += 1;
            }
        }
    }
    c
}

/// Solves `h(x) = y` by bisection on `[x0, y]`.
pub fn phi_bisect(h: &FunctionSpec, y: f64) -> f64 {
    let (mut lo, mut hi) = (h.x0(), y.max(h.x0() + 1.0));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h.eval_h(mid).unwrap() < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn power(c: f64) -> InverseSpec {
    InverseSpec::new(FunctionSpec::pure_power(c).unwrap()).unwrap()
}

/// `{⌊h(n)⌋ : n ≥ 1} ∩ primes ∩ [2, limit]` by direct enumeration.
pub fn ps_by_enumeration(h: &FunctionSpec, limit: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut n = h.x0().ceil() as u64;
    loop {
        let v = h.eval_h(n as f64).unwrap().floor() as u64;
        if v > limit {
            break;
        }
        if is_prime_trial(v) && out.last() != Some(&v) {
            out.push(v);
        }
        n += 1;
    }
    out
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
