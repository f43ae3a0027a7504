mod common;

use common::{eratosthenes, is_prime_trial, mangoldt_trial, mobius_trial, power, ps_by_enumeration};
use psroth::sieve::{count_in_class, enumerate_ps_primes, ps_member, vaughan_coefficients, PrimeSource, Weight};
use psroth::{FunctionSpec, InverseSpec, Kind, PrimeTable};

#[test]
fn prime_count_to_a_million_agrees_with_second_sieve() {
    let t = PrimeTable::sieve(1_000_000).unwrap();
    let oracle = eratosthenes(1_000_000).iter().filter(|&&b| b).count() as u64;
    assert_eq!(oracle, 78498);
    assert_eq!(t.prime_pi(1_000_000), oracle);
    assert_eq!(t.primes_in(2, 10).collect::<Vec<_>>(), vec![2, 3, 5, 7]);
    assert_eq!(PrimeTable::sieve(2).unwrap().primes().collect::<Vec<_>>(), vec![2]);
}

#[test]
fn is_prime_matches_trial_division() {
    let t = PrimeTable::sieve(10_000).unwrap();
    for n in 0..=10_000 {
        assert_eq!(t.is_prime(n), is_prime_trial(n), "n={n}");
    }
}

#[test]
fn segmented_blocks_agree_with_trial_division_past_a_segment() {
    let t = PrimeTable::sieve(3_000_000).unwrap();
    let lo = (1 << 21) - 500;
    let got: Vec<u64> = t.primes_in(lo, lo + 1000).collect();
    let want: Vec<u64> = (lo..=lo + 1000).filter(|&n| is_prime_trial(n)).collect();
    assert_eq!(got, want);
}

#[test]
fn arithmetic_functions() {
    let t = PrimeTable::sieve(10_000).unwrap();
    assert_eq!(t.mangoldt(8).unwrap(), 2f64.ln());
    assert_eq!(t.mangoldt(6).unwrap(), 0.0);
    assert_eq!(t.mangoldt(1).unwrap(), 0.0);
    assert_eq!([t.mobius(1).unwrap(), t.mobius(6).unwrap(), t.mobius(12).unwrap()], [1, 1, 0]);
    assert_eq!(t.euler_phi(30).unwrap(), 8);
    assert!(t.mangoldt(0).is_err());
    for n in 1..=2000u64 {
        assert!((t.mangoldt(n).unwrap() - mangoldt_trial(n)).abs() < 1e-12);
        assert_eq!(t.mobius(n).unwrap(), mobius_trial(n));
    }
}

#[test]
fn chebyshev_and_mobius_divisor_sums() {
    let t = PrimeTable::sieve(10_000).unwrap();
    let lam = t.mangoldt_table(10_000).unwrap();
    let mu = t.mobius_table(10_000).unwrap();
    for n in 1..=10_000usize {
        let divs = (1..=n).filter(|d| n % d == 0);
        let s: f64 = divs.clone().map(|d| lam[d]).sum();
        assert!((s - (n as f64).ln()).abs() < 1e-9, "n={n}");
        let m: i64 = divs.map(|d| mu[d] as i64).sum();
        assert_eq!(m, (n == 1) as i64);
    }
}

#[test]
fn ps_membership_examples() {
    let inv = power(1.5);
    assert!(ps_member(&inv, 11).unwrap());
    assert!(!ps_member(&inv, 7).unwrap());
    let id = power(1.0);
    let t = PrimeTable::sieve(1000).unwrap();
    for p in t.primes() {
        assert!(ps_member(&id, p).unwrap());
    }
}

#[test]
fn ps_set_small_cases() {
    let inv = power(1.5);
    let t = PrimeTable::sieve(101).unwrap();
    let s = enumerate_ps_primes(&inv, 100, &t).unwrap();
    assert_eq!(s.primes().collect::<Vec<_>>(), vec![2, 5, 11, 31, 41, 89]);
    assert!(enumerate_ps_primes(&inv, 1, &t).unwrap().is_empty());
    let id = enumerate_ps_primes(&power(1.0), 10, &t).unwrap();
    assert_eq!(id.primes().collect::<Vec<_>>(), vec![2, 3, 5, 7]);
}

#[test]
fn ps_set_equals_direct_floor_enumeration() {
    let t = PrimeTable::sieve(200_001).unwrap();
    let specs = [
        FunctionSpec::pure_power(1.0 / 0.95).unwrap(),
        FunctionSpec::pure_power(1.0 / 0.99).unwrap(),
        FunctionSpec::pure_power(1.5).unwrap(),
        FunctionSpec::new(Kind::PowerLog { a: 2.0 }, 1.05, 1.0, 3.0).unwrap(),
    ];
    for h in specs {
        let inv = InverseSpec::new(h.clone()).unwrap();
        let got: Vec<u64> = enumerate_ps_primes(&inv, 200_000, &t).unwrap().primes().collect();
        assert_eq!(got, ps_by_enumeration(&h, 200_000), "{:?} c={}", h.kind(), h.c());
        assert!(got.windows(2).all(|w| w[0] < w[1]));
    }
}

#[test]
fn witnesses_map_to_their_primes() {
    let h = FunctionSpec::pure_power(1.0 / 0.95).unwrap();
    let inv = InverseSpec::new(h.clone()).unwrap();
    let t = PrimeTable::sieve(100_001).unwrap();
    let s = enumerate_ps_primes(&inv, 100_000, &t).unwrap();
    for &(n, p) in s.members().iter().step_by(37) {
        assert_eq!(h.eval_h(n as f64).unwrap().floor() as u64, p);
    }
}

#[test]
fn residue_class_counts() {
    let t = PrimeTable::sieve(101).unwrap();
    let by_scan = (2..=100u64).filter(|&p| is_prime_trial(p) && p % 4 == 1).count() as f64;
    assert_eq!(by_scan, 11.0);
    assert_eq!(count_in_class(PrimeSource::Table(&t), 100, 4, 1, Weight::Unit, None).unwrap(), by_scan);
    let inv = power(1.5);
    let s = enumerate_ps_primes(&inv, 100, &t).unwrap();
    assert_eq!(count_in_class(PrimeSource::Ps(&s), 100, 1, 0, Weight::Unit, None).unwrap(), 6.0);
    let logs = count_in_class(PrimeSource::Table(&t), 10, 1, 0, Weight::Log, None).unwrap();
    assert!((logs - 210f64.ln()).abs() < 1e-12);
    assert!(count_in_class(PrimeSource::Table(&t), 100, 4, 2, Weight::Unit, None).is_err());
}

#[test]
fn vaughan_coefficient_examples() {
    let t = PrimeTable::sieve(1000).unwrap();
    let (pi, xi) = vaughan_coefficients(10.0, 10.0, 100, &t).unwrap();
    assert_eq!(pi[1], 0.0);
    assert_eq!(xi[1], 0);
    assert!((pi[6] + 6f64.ln()).abs() < 1e-12);
    let (pi, _) = vaughan_coefficients(50.0, 50.0, 1000, &t).unwrap();
    for (l, v) in pi.iter().enumerate().skip(2) {
        assert!(v.abs() <= (l as f64).ln() + 1e-12, "l={l}");
    }
}
