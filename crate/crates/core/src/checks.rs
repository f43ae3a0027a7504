//! Suites of exact invariants, shared by the `check` subcommand and the
//! acceptance target.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::expsums::{bilinear_check, vaughan_decompose, BilinearInput, PhaseParams};
use crate::hfun::{FunctionSpec, InverseSpec, Kind};
use crate::measures::{smooth, spectrum_and_bohr, SequenceTag, WeightedSequence};
use crate::numeric::gcd;
use crate::roth_harness::{count_3aps, random_subset, smoothing_chain, varnavides_count, ApMode};
use crate::sieve::PrimeTable;
use crate::zn_fourier::{dft, inverse_dft, trilinear_direct, trilinear_fft, CyclicFunction};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self { name: name.to_string(), passed, detail }
    }
}

pub fn all_passed(results: &[CheckResult]) -> bool {
    results.iter().all(|r| r.passed)
}

fn random_function(rng: &mut ChaCha8Rng, n: usize) -> CyclicFunction {
    let v = (0..n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    CyclicFunction::new(v).expect("finite values")
}

fn rel_err(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

/// FFT vs direct trilinear form, Fourier inversion, Parseval, the Bohr size
/// bound, the Varnavides counting identity, `Λ_3 = |A| + nontrivial`, the
/// Vaughan split, the smoothing chain and the bilinear chain.
pub fn exact_identity_suite(seed: u64) -> Result<Vec<CheckResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();

    let mut worst: f64 = 0.0;
    for &n in &[5usize, 101, 1009] {
        for _ in 0..50 {
            let (f, g, h) = (random_function(&mut rng, n), random_function(&mut rng, n), random_function(&mut rng, n));
            worst = worst.max(rel_err(trilinear_fft(&f, &g, &h)?, trilinear_direct(&f, &g, &h)?));
        }
    }
    out.push(CheckResult::new("trilinear FFT vs direct", worst <= 1e-9, format!("max relative error {worst:.3e}")));

    let (mut inv_err, mut pars_err): (f64, f64) = (0.0, 0.0);
    for &n in &[7usize, 64, 101, 1009] {
        let f = random_function(&mut rng, n);
        let t = dft(&f);
        let back = inverse_dft(&t);
        for (x, y) in back.values().iter().zip(f.values()) {
            inv_err = inv_err.max((x - y * n as f64).norm() / n as f64);
        }
        let lhs: f64 = t.coefficients().iter().map(|z| z.norm_sqr()).sum();
        let rhs: f64 = n as f64 * f.values().iter().map(|z| z.norm_sqr()).sum::<f64>();
        pars_err = pars_err.max((lhs - rhs).abs() / rhs);
    }
    out.push(CheckResult::new("inverse transform scales by N", inv_err <= 1e-9, format!("max error {inv_err:.3e}")));
    out.push(CheckResult::new("Parseval", pars_err <= 1e-9, format!("max relative error {pars_err:.3e}")));

    let mut bohr_ok = true;
    let mut detail = String::new();
    for &(delta, eps) in &[(0.1, 0.25), (0.11, 0.3), (0.12, 0.2)] {
        let set = random_subset(&mut rng, 1009, 0.3);
        let mut w = vec![0.0; 1009];
        for &x in &set {
            w[x as usize] = 1.0 / set.len() as f64;
        }
        let a = WeightedSequence::new(w, SequenceTag::Restricted)?;
        let rep = spectrum_and_bohr(&a, delta, eps)?;
        bohr_ok &= rep.bohr_bound_holds();
        detail.push_str(&format!("k={} |B|={}; ", rep.k(), rep.bohr_size));
    }
    out.push(CheckResult::new("Bohr set size bound", bohr_ok, detail));

    let mut var_ok = true;
    for &(n, m, size) in &[(101u64, 5u64, 30usize), (1009, 17, 200)] {
        let mut set: Vec<u64> = (0..n).collect();
        for i in 0..size {
            let j = rng.random_range(i..n as usize);
            set.swap(i, j);
        }
        set.truncate(size);
        let ds: Vec<u64> = (1..n).collect();
        var_ok &= varnavides_count(&set, n, m, &ds, 0.5, 2.0)?.identities_hold();
    }
    out.push(CheckResult::new("Varnavides counting identity", var_ok, "all nonzero d at N=101, 1009".into()));

    let mut ap_ok = true;
    let mut fft_ok = true;
    for &n in &[101u64, 1009] {
        for _ in 0..200 {
            let density = rng.random_range(0.02..0.4);
            let set = random_subset(&mut rng, n, density);
            let rep = count_3aps(&set, n, ApMode::Cyclic)?;
            ap_ok &= rep.trilinear == rep.size + rep.nontrivial;
            fft_ok &= rep.nontrivial == rep.nontrivial_fft;
            let int = count_3aps(&set, n, ApMode::Integer)?;
            fft_ok &= int.nontrivial == int.nontrivial_fft;
        }
    }
    out.push(CheckResult::new("Λ_3 = |A| + nontrivial count", ap_ok, "200 sets at N=101, 1009".into()));
    out.push(CheckResult::new("3AP count FFT vs brute force", fft_ok, "cyclic and integer modes".into()));

    let table = PrimeTable::sieve(2000)?;
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let gamma = rng.random_range(0.9..0.99);
        let inv = InverseSpec::new(FunctionSpec::pure_power(1.0 / gamma)?)?;
        let q = [1u64, 3, 4, 5][rng.random_range(0..4)];
        let a = loop {
            let a = rng.random_range(0..q);
            if gcd(a, q) == 1 {
                break a;
            }
        };
        let m = rng.random_range(1..6i64);
        let pp = PhaseParams::new(rng.random_range(0.0..1.0), m, a, q, 1000, 2000)?;
        let split = vaughan_decompose(&inv, &pp, &table, None)?;
        worst = worst.max(split.residual / (1.0 + split.direct.norm()));
    }
    out.push(CheckResult::new("Vaughan split residual at P=1000", worst <= 1e-6, format!("max scaled residual {worst:.3e}")));

    let mut chain_ok = true;
    let mut slack = f64::INFINITY;
    for _ in 0..3 {
        let set = random_subset(&mut rng, 101, 0.3);
        let mut w = vec![0.0; 101];
        for &x in &set {
            w[x as usize] = rng.random_range(0.5..1.5) / 101.0;
        }
        let a = WeightedSequence::new(w, SequenceTag::Restricted)?;
        let rep = spectrum_and_bohr(&a, 0.25, 0.1)?;
        let a1 = smooth(&a, &rep)?;
        let step = smoothing_chain(&a, &a1, &rep)?;
        chain_ok &= step.holds;
        slack = slack.min(step.slack);
    }
    out.push(CheckResult::new("smoothing upper-bound chain", chain_ok, format!("min slack {slack:.3e}")));

    let inv = InverseSpec::new(FunctionSpec::pure_power(1.0 / 0.95)?)?;
    let (k, l) = (24u64, 40u64);
    let d1 = (0..l).map(|_| crate::numeric::e(rng.random::<f64>())).collect();
    let d2 = (0..k).map(|_| crate::numeric::e(rng.random::<f64>())).collect();
    let input = BilinearInput { k, l, m: 1, alpha: 0.25, r: None, d1, d2, p: k * l, p1: 4 * k * l };
    let rep = bilinear_check(&inv, &input)?;
    out.push(CheckResult::new(
        "bilinear Cauchy-Schwarz / van der Corput chain",
        rep.chain_holds(),
        format!("R={:?}, ratio to bound {:.3e}", rep.r_used, rep.ratio_bilinear.unwrap_or(f64::NAN)),
    ));
    Ok(out)
}

/// The five example functions: `x^c log^A x`, `x^c e^{A log^B x}`,
/// `x log^C x`, `x e^{C log^B x}` and `x log log x`.
pub fn example_functions() -> Result<Vec<(&'static str, FunctionSpec)>> {
    Ok(vec![
        ("x^c log^A x", FunctionSpec::new(Kind::PowerLog { a: 2.0 }, 1.05, 1.0, 3.0)?),
        ("x^c exp(A log^B x)", FunctionSpec::new(Kind::PowerExpLog { a: 0.5, b: 0.5 }, 1.05, 1.0, 3.0)?),
        ("x log^C x", FunctionSpec::new(Kind::PowerLog { a: 2.0 }, 1.0, 1.0, 3.0)?),
        ("x exp(C log^B x)", FunctionSpec::new(Kind::PowerExpLog { a: 1.0, b: 0.5 }, 1.0, 1.0, 3.0)?),
        ("x l_2(x)", FunctionSpec::new(Kind::IteratedLog { m: 2 }, 1.0, 1.0, 3.0)?),
    ])
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Largest relative discrepancy per identity over the dyadic grid
/// `x = 16·x0·2^k`, `k < 36`, for one function.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunctionIdentityReport {
    pub name: String,
    /// `x h^{(i)} = h^{(i−1)} (α_i + θ_i)` for `i = 1, 2, 3`.
    pub derivative_identity: f64,
    /// `y φ' = φ (γ + θ)`.
    pub phi_first: f64,
    /// `y φ'' = φ' σ τ`.
    pub phi_second: f64,
    /// Central differences with step `x·1e-5` against `h', h'', h'''` and `φ'`.
    pub finite_difference: f64,
}

pub fn function_identities(name: &str, h: &FunctionSpec) -> Result<FunctionIdentityReport> {
    let inv = InverseSpec::new(h.clone())?;
    let (mut di, mut p1, mut p2, mut fd): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for k in 0..36 {
        let x = 16.0 * h.x0() * 2f64.powi(k);
        let d = [h.eval_h(x)?, h.eval_h_deriv(x, 1)?, h.eval_h_deriv(x, 2)?, h.eval_h_deriv(x, 3)?];
        for i in 1..=3u32 {
            let alpha = h.c() - i as f64 + 1.0;
            di = di.max(rel(x * d[i as usize], d[i as usize - 1] * (alpha + h.theta(i, x)?)));
        }
        let step = x * 1e-5;
        let central = |f: &dyn Fn(f64) -> Result<f64>| -> Result<f64> { Ok((f(x + step)? - f(x - step)?) / (2.0 * step)) };
        fd = fd.max(rel(central(&|t| h.eval_h(t))?, d[1]));
        for i in 1..=2u32 {
            fd = fd.max(rel(central(&|t| h.eval_h_deriv(t, i))?, d[i as usize + 1]));
        }

        let y = d[0];
        let phi = inv.eval_phi(y)?;
        let [f1, f2, _] = inv.phi_derivs_at(phi)?;
        p1 = p1.max(rel(y * f1, phi * (inv.gamma() + inv.theta(y)?)));
        let (sigma, tau) = inv.sigma_tau(y)?;
        p2 = p2.max(rel(y * f2, f1 * sigma * tau));
        let ystep = y * 1e-5;
        fd = fd.max(rel((inv.eval_phi(y + ystep)? - inv.eval_phi(y - ystep)?) / (2.0 * ystep), f1));
    }
    Ok(FunctionIdentityReport { name: name.to_string(), derivative_identity: di, phi_first: p1, phi_second: p2, finite_difference: fd })
}

pub fn function_identity_suite() -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for (name, h) in example_functions()? {
        let r = function_identities(name, &h)?;
        let ok = r.derivative_identity <= 1e-9 && r.phi_first <= 1e-9 && r.phi_second <= 1e-9 && r.finite_difference <= 1e-6;
        out.push(CheckResult::new(
            &format!("function identities for {name}"),
            ok,
            format!(
                "h^(i): {:.1e}, yφ': {:.1e}, yφ'': {:.1e}, FD: {:.1e}",
                r.derivative_identity, r.phi_first, r.phi_second, r.finite_difference
            ),
        ));
    }
    Ok(out)
}
