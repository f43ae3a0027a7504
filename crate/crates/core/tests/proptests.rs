mod common;

use common::{brute_3aps_integer, convolve_direct};
use num_complex::Complex64;
use proptest::prelude::*;
use psroth::measures::{smooth, spectrum_and_bohr, SequenceTag, WeightedSequence};
use psroth::roth_harness::{count_3aps, varnavides_count, ApMode};
use psroth::sieve::ps_member;
use psroth::zn_fourier::{convolve, dft, trilinear_direct, trilinear_fft, CyclicFunction};
use psroth::{FunctionSpec, InverseSpec, Kind};

fn complex_vec(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| Complex64::new(a, b)), n)
}

fn sized(max: usize) -> impl Strategy<Value = (Vec<Complex64>, Vec<Complex64>)> {
    (1..max).prop_flat_map(|n| (complex_vec(n), complex_vec(n)))
}

fn odd_triple() -> impl Strategy<Value = (Vec<Complex64>, Vec<Complex64>, Vec<Complex64>)> {
    (0..40usize).prop_flat_map(|k| {
        let n = 2 * k + 1;
        (complex_vec(n), complex_vec(n), complex_vec(n))
    })
}

fn spec() -> impl Strategy<Value = FunctionSpec> {
    prop_oneof![
        (1.0..1.9f64).prop_map(|c| FunctionSpec::pure_power(c).unwrap()),
        (1.0..1.3f64, 0.0..3.0f64).prop_map(|(c, a)| FunctionSpec::new(Kind::PowerLog { a }, c, 1.0, 3.0).unwrap()),
        (1.0..1.3f64, 0.1..1.0f64, 0.1..0.9f64)
            .prop_map(|(c, a, b)| FunctionSpec::new(Kind::PowerExpLog { a, b }, c, 1.0, 3.0).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn convolution_matches_direct((f, g) in sized(48)) {
        let fast = convolve(&CyclicFunction::new(f.clone()).unwrap(), &CyclicFunction::new(g.clone()).unwrap()).unwrap();
        for (a, b) in fast.values().iter().zip(convolve_direct(&f, &g)) {
            prop_assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn parseval((f, _) in sized(200)) {
        let n = f.len() as f64;
        let lhs: f64 = f.iter().map(|z| z.norm_sqr()).sum();
        let rhs: f64 = dft(&CyclicFunction::new(f).unwrap()).coefficients().iter().map(|z| z.norm_sqr()).sum::<f64>() / n;
        prop_assert!((lhs - rhs).abs() <= 1e-9 * lhs.max(1e-12));
    }

    #[test]
    fn trilinear_fft_matches_direct((f, g, h) in odd_triple()) {
        let (f, g, h) = (CyclicFunction::new(f).unwrap(), CyclicFunction::new(g).unwrap(), CyclicFunction::new(h).unwrap());
        let a = trilinear_fft(&f, &g, &h).unwrap();
        let b = trilinear_direct(&f, &g, &h).unwrap();
        prop_assert!((a - b).norm() <= 1e-9 * b.norm().max(1.0));
    }

    #[test]
    fn three_ap_count_matches_brute(set in prop::collection::btree_set(0u64..60, 0..30)) {
        let set: Vec<u64> = set.into_iter().collect();
        let r = count_3aps(&set, 60, ApMode::Integer).unwrap();
        prop_assert_eq!(r.nontrivial, brute_3aps_integer(&set, 60));
        prop_assert_eq!(r.nontrivial, r.nontrivial_fft);
        let c = count_3aps(&set, 61, ApMode::Cyclic).unwrap();
        prop_assert_eq!(c.trilinear, c.nontrivial + c.size);
        prop_assert!(c.trilinear >= c.size);
    }

    #[test]
    fn varnavides_identity(set in prop::collection::btree_set(0u64..101, 0..101), d in 1u64..101, m in 3u64..40) {
        let set: Vec<u64> = set.into_iter().collect();
        let rep = varnavides_count(&set, 101, m, &[d], 0.5, 2.0).unwrap();
        prop_assert!(rep.identities_hold());
        prop_assert_eq!(rep.rows[0].total, m * set.len() as u64);
    }

    #[test]
    fn phi_inverts_h(h in spec(), lx in 1.1..30.0f64) {
        let inv = InverseSpec::new(h.clone()).unwrap();
        let x = lx.exp();
        let back = inv.eval_phi(h.eval_h(x).unwrap()).unwrap();
        prop_assert!((back - x).abs() <= 1e-10 * x);
    }

    #[test]
    fn ceil_phi_brackets_h(h in spec(), ly in 3.0..40.0f64) {
        let inv = InverseSpec::new(h.clone()).unwrap();
        let y = ly.exp();
        let k = inv.ceil_phi(y).unwrap();
        prop_assert!(k as f64 >= h.x0());
        prop_assert!(h.eval_h(k as f64).unwrap() >= y * (1.0 - 1e-15));
        if (k - 1) as f64 >= h.x0() {
            prop_assert!(h.eval_h((k - 1) as f64).unwrap() < y * (1.0 + 1e-15));
        }
    }

    #[test]
    fn ps_member_matches_floor_enumeration(c in 1.0..1.9f64, p in 10u64..20_000) {
        let h = FunctionSpec::pure_power(c).unwrap();
        let inv = InverseSpec::new(h.clone()).unwrap();
        let hit = (1u64..).map(|n| h.eval_h(n as f64).unwrap().floor() as u64).take_while(|&v| v <= p).any(|v| v == p);
        prop_assert_eq!(ps_member(&inv, p).unwrap(), hit);
    }

    #[test]
    fn smoothing_preserves_mass(w in prop::collection::vec(0.0..1.0f64, 31), delta in 0.05..0.9f64, eps in 0.05..0.45f64) {
        let total: f64 = w.iter().sum();
        prop_assume!(total > 0.0);
        let a = WeightedSequence::new(w.iter().map(|x| x / total).collect(), SequenceTag::Restricted).unwrap();
        let rep = spectrum_and_bohr(&a, delta, eps).unwrap();
        prop_assert!(rep.bohr_bound_holds());
        let a1 = smooth(&a, &rep).unwrap();
        prop_assert!((a1.mass() - 1.0).abs() <= 1e-9);
    }
}
