use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;

use psroth::expsums::{vaughan_decompose, PhaseParams};
use psroth::sieve::enumerate_ps_primes;
use psroth::zn_fourier::{dft, trilinear_direct, trilinear_fft, CyclicFunction};
use psroth::{FunctionSpec, InverseSpec, PrimeTable};

fn signal(n: usize) -> CyclicFunction {
    let v = (0..n).map(|i| Complex64::new(((i * 7919) % 101) as f64, ((i * 31) % 17) as f64)).collect();
    CyclicFunction::new(v).unwrap()
}

fn sieve(c: &mut Criterion) {
    let mut g = c.benchmark_group("sieve");
    g.sample_size(10);
    for &limit in &[1_000_000u64, 10_000_000] {
        g.bench_with_input(BenchmarkId::from_parameter(limit), &limit, |b, &l| b.iter(|| PrimeTable::sieve(black_box(l)).unwrap()));
    }
    let t = PrimeTable::sieve(1_000_001).unwrap();
    let inv = InverseSpec::new(FunctionSpec::pure_power(1.0 / 0.95).unwrap()).unwrap();
    g.bench_function("ps_primes 1e6", |b| b.iter(|| enumerate_ps_primes(&inv, 1_000_000, &t).unwrap()));
    g.finish();
}

fn fft(c: &mut Criterion) {
    let mut g = c.benchmark_group("dft");
    // a power of two, a prime, and a length with a large prime factor
    for &n in &[1usize << 16, 65_537, 2 * 32_771] {
        let f = signal(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &f, |b, f| b.iter(|| dft(black_box(f))));
    }
    g.finish();
}

fn trilinear(c: &mut Criterion) {
    let mut g = c.benchmark_group("trilinear");
    let f = signal(1009);
    g.bench_function("fft 1009", |b| b.iter(|| trilinear_fft(&f, &f, &f).unwrap()));
    g.sample_size(10);
    g.bench_function("direct 1009", |b| b.iter(|| trilinear_direct(&f, &f, &f).unwrap()));
    g.finish();
}

fn vaughan(c: &mut Criterion) {
    let t = PrimeTable::sieve(20_001).unwrap();
    let inv = InverseSpec::new(FunctionSpec::pure_power(1.0 / 0.95).unwrap()).unwrap();
    let mut g = c.benchmark_group("vaughan");
    g.sample_size(10);
    for &p in &[1000u64, 10_000] {
        let pp = PhaseParams::new(0.3, 2, 0, 1, p, 2 * p).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(p), &pp, |b, pp| b.iter(|| vaughan_decompose(&inv, pp, &t, None).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, sieve, fft, trilinear, vaughan);
criterion_main!(benches);
