mod common;

use common::{is_prime_trial, power};
use psroth::measures::{
    bohr_set, build_lambda, build_lambda_h, restrict, smooth, spectrum_and_bohr, w_trick, SequenceTag, WTrickParams,
    WeightedSequence,
};
use psroth::sieve::enumerate_ps_primes;
use psroth::PrimeTable;

#[test]
fn w_trick_products() {
    let t = PrimeTable::sieve(100).unwrap();
    assert_eq!(w_trick(1000, &t, Some(2)).unwrap().m, 2);
    assert_eq!(w_trick(1000, &t, Some(3)).unwrap().m, 6);
    assert_eq!(w_trick(1000, &t, Some(5)).unwrap().m, 30);
    let auto = w_trick(100_000_000, &t, None).unwrap();
    assert_eq!((auto.w, auto.m, auto.b), (1, 1, 0));
    assert!(w_trick(10, &t, None).is_err());
    assert!(WTrickParams::new(3, Some(3)).is_err());
    assert_eq!(WTrickParams::new(5, None).unwrap().phi_m(), 8);
}

#[test]
fn lambda_on_odd_progression() {
    let t = PrimeTable::sieve(100).unwrap();
    let p = WTrickParams::new(2, Some(1)).unwrap();
    let lam = build_lambda(10, &p, &t).unwrap();
    let want: Vec<usize> = (0..10).filter(|&n| is_prime_trial(2 * n as u64 + 1)).collect();
    assert_eq!(want, vec![1, 2, 3, 5, 6, 8, 9]);
    assert_eq!(lam.support(), want);
    assert!((lam.weights()[1] - 3f64.ln() / 20.0).abs() < 1e-15);
}

#[test]
fn lambda_mass_near_one() {
    let t = PrimeTable::sieve(1_000_000).unwrap();
    let p = WTrickParams::new(1, None).unwrap();
    let mass = build_lambda(1_000_000, &p, &t).unwrap().mass();
    assert!((0.9..=1.1).contains(&mass), "{mass}");
}

#[test]
fn lambda_h_for_identity_is_lambda() {
    let t = PrimeTable::sieve(20_001).unwrap();
    let inv = power(1.0);
    let ps = enumerate_ps_primes(&inv, 20_000, &t).unwrap();
    let p = WTrickParams::new(2, None).unwrap();
    let a = build_lambda(10_000, &p, &t).unwrap();
    let b = build_lambda_h(10_000, &p, &inv, &ps).unwrap();
    assert_eq!(a.weights(), b.weights());
}

#[test]
fn lambda_h_weight_for_three_halves() {
    let t = PrimeTable::sieve(101).unwrap();
    let inv = power(1.5);
    let ps = enumerate_ps_primes(&inv, 100, &t).unwrap();
    let p = WTrickParams::new(1, None).unwrap();
    let lh = build_lambda_h(100, &p, &inv, &ps).unwrap();
    assert_eq!(lh.support(), vec![2, 5, 11, 31, 41, 89]);
    let phi_prime = (2.0 / 3.0) * 11f64.powf(-1.0 / 3.0);
    let want = 11f64.ln() / (100.0 * phi_prime);
    assert!((lh.weights()[11] - want).abs() < 1e-12 * want);
}

#[test]
fn restriction_edge_cases() {
    let t = PrimeTable::sieve(200).unwrap();
    let lam = build_lambda(100, &WTrickParams::new(1, None).unwrap(), &t).unwrap();
    let all: Vec<usize> = (0..100).collect();
    assert_eq!(restrict(&all, &lam).unwrap().weights(), lam.weights());
    assert_eq!(restrict(&lam.support(), &lam).unwrap().weights(), lam.weights());
    assert_eq!(restrict(&[], &lam).unwrap().mass(), 0.0);
    assert!(restrict(&[100], &lam).is_err());
}

#[test]
fn bohr_set_examples() {
    assert_eq!(bohr_set(&[1], 0.1, 10), vec![0, 1, 9]);
    assert_eq!(bohr_set(&[], 0.1, 10).len(), 10);
}

#[test]
fn smoothing_by_full_group_averages() {
    // mass below δ puts every frequency outside the spectrum, so B = Z_N
    let w: Vec<f64> = (0..101).map(|i| if i % 7 == 0 { 0.02 } else { 0.0 }).collect();
    let a = WeightedSequence::new(w, SequenceTag::Restricted).unwrap();
    let rep = spectrum_and_bohr(&a, 0.5, 0.1).unwrap();
    assert_eq!(rep.k(), 0);
    assert_eq!(rep.bohr_size, 101);
    let a1 = smooth(&a, &rep).unwrap();
    let avg = a.mass() / 101.0;
    assert!(a1.weights().iter().all(|&x| (x - avg).abs() < 1e-15));
}

#[test]
fn smoothing_by_trivial_bohr_set_is_identity() {
    let mut w = vec![0.0; 101];
    w[0] = 0.9;
    let a = WeightedSequence::new(w, SequenceTag::Restricted).unwrap();
    let rep = spectrum_and_bohr(&a, 0.5, 0.005).unwrap();
    assert_eq!(rep.k(), 101);
    assert_eq!(rep.bohr, vec![0]);
    assert!(rep.bohr_bound_holds());
    let a1 = smooth(&a, &rep).unwrap();
    assert!(a1.weights().iter().zip(a.weights()).all(|(x, y)| (x - y).abs() < 1e-14));
}

#[test]
fn smoothing_preserves_mass_on_lambda_h() {
    let t = PrimeTable::sieve(2000).unwrap();
    let inv = power(1.0 / 0.95);
    let ps = enumerate_ps_primes(&inv, 1009, &t).unwrap();
    let lh = build_lambda_h(1009, &WTrickParams::new(1, None).unwrap(), &inv, &ps).unwrap();
    let rep = spectrum_and_bohr(&lh, 0.3, 0.2).unwrap();
    assert!(rep.bohr_bound_holds());
    assert!(rep.spectrum_consistent());
    let a1 = smooth(&lh, &rep).unwrap();
    assert!((a1.mass() - lh.mass()).abs() <= 1e-9 * lh.mass());
    assert!(rep.to_json().unwrap().contains("bohr_size"));
}
