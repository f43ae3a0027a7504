//! Exponential sums `Σ Λ_{a,q}(k) e(ξk + mφ(k))`: direct evaluation, the
//! Vaughan split `S_1 − S_21 − S_22 + S_3`, Van der Corput bound formulas, the
//! bilinear inequality chain, and the error term between the `h`-weighted and
//! plain prime exponential sums.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{arg, Error, Result};
use crate::hfun::InverseSpec;
use crate::numeric::{csum, dist_to_int, e, frac, fsum, gcd, ComplexSum, CompensatedSum};
use crate::quad;
use crate::sieve::{ps_hits, vaughan_coefficients, PrimeTable, PsPrimeSet};
use crate::zn_fourier::fourier_on_grid_real;

/// `Φ(t) = {t} − 1/2`.
pub fn sawtooth_phi(t: f64) -> f64 {
    frac(t) - 0.5
}

/// Truncated expansion `Σ_{0<|m|≤M} e(−mt)/(2πim) = −Σ_{m=1}^{M} sin(2πmt)/(πm)`
/// and its absolute error against `Φ(t)`.
pub fn sawtooth_expansion(t: f64, big_m: u64) -> Result<(f64, f64)> {
    if big_m == 0 {
        return arg("truncation M must be at least 1");
    }
    let x = frac(t);
    let approx = -fsum((1..=big_m).map(|m| {
        let m = m as f64;
        (std::f64::consts::TAU * frac(m * x)).sin() / (std::f64::consts::PI * m)
    }));
    Ok((approx, (sawtooth_phi(t) - approx).abs()))
}

/// `min{1, 1/(M‖t‖)}`.
pub fn sawtooth_envelope(t: f64, big_m: u64) -> f64 {
    let d = dist_to_int(t);
    if d == 0.0 {
        1.0
    } else {
        (1.0 / (big_m as f64 * d)).min(1.0)
    }
}

/// `min{log M / M, 1/|m|, M/m²}`; `m = 0` takes the `log M / M` branch.
pub fn b_coefficient_bound(mm: i64, big_m: u64) -> Result<f64> {
    if big_m < 2 {
        return arg("M must be at least 2");
    }
    let bm = big_m as f64;
    let first = bm.ln() / bm;
    if mm == 0 {
        return Ok(first);
    }
    let a = mm.unsigned_abs() as f64;
    Ok(first.min(1.0 / a).min(bm / (a * a)))
}

/// `r|I|η^{1/2} + η^{−1/2}`.
pub fn vdc_single_bound(eta: f64, r: f64, interval_len: f64) -> Result<f64> {
    if !(eta > 0.0) {
        return arg(format!("η must be positive, got {eta}"));
    }
    if !(r >= 1.0) {
        return arg(format!("r must be at least 1, got {r}"));
    }
    Ok(r * interval_len * eta.sqrt() + 1.0 / eta.sqrt())
}

/// Largest `χ` with `16(1−γ) + 28χ < 1`, less a `1e-3` margin.
pub fn default_chi(gamma: f64) -> f64 {
    (1.0 - 16.0 * (1.0 - gamma)) / 28.0 - 1e-3
}

pub fn default_epsilon(chi: f64) -> f64 {
    chi / 128.0
}

/// `M = P^{1+χ+ε} / φ(P)`, capped at `10^6`.
pub fn default_truncation(inv: &InverseSpec, p: f64, chi: f64, eps: f64) -> Result<u64> {
    let m = p.powf(1.0 + chi + eps) / inv.eval_phi(p)?;
    Ok(m.ceil().clamp(1.0, 1e6) as u64)
}

/// Parameters of `Σ_{P<k≤P_1, k≡a (q)} Λ(k) e(ξk + mφ(k))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseParams {
    pub xi: f64,
    pub m: i64,
    pub a: u64,
    pub q: u64,
    pub p: u64,
    pub p1: u64,
}

impl PhaseParams {
    /// Checked constructor: `m ≠ 0`, `gcd(a, q) = 1`, `0 ≤ ξ ≤ 1`, `P < P_1 ≤ 2P`.
    pub fn new(xi: f64, m: i64, a: u64, q: u64, p: u64, p1: u64) -> Result<Self> {
        if m == 0 {
            return arg("m must be nonzero");
        }
        let pp = Self::any_residue(xi, m, a, q, p, p1)?;
        if gcd(a, q) != 1 {
            return arg(format!("gcd(a, q) = gcd({a}, {q}) must be 1"));
        }
        Ok(pp)
    }

    /// Like [`PhaseParams::new`] but allows any residue class and `m = 0`.
    pub fn any_residue(xi: f64, m: i64, a: u64, q: u64, p: u64, p1: u64) -> Result<Self> {
        if q == 0 || a >= q {
            return arg(format!("need 0 <= a < q, got a={a}, q={q}"));
        }
        if !(0.0..=1.0).contains(&xi) {
            return arg(format!("ξ={xi} must lie in [0, 1]"));
        }
        if !(p < p1 && p1 <= 2 * p) {
            return arg(format!("need P < P1 <= 2P, got P={p}, P1={p1}"));
        }
        Ok(Self { xi, m, a, q, p, p1 })
    }

    fn in_class(&self, k: u64) -> bool {
        k % self.q == self.a
    }
}

/// `e(ξn + mφ(n))` for `P < n ≤ P_1` in the residue class, zero elsewhere.
/// Index `i` holds `n = P + 1 + i`.
fn phases(inv: &InverseSpec, pp: &PhaseParams) -> Result<Vec<Complex64>> {
    (pp.p + 1..=pp.p1)
        .into_par_iter()
        .map(|n| {
            if !pp.in_class(n) {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let phi = inv.eval_phi(n as f64)?;
            Ok(e(frac(pp.xi * n as f64) + frac(pp.m as f64 * phi)))
        })
        .collect()
}

fn check_limit(t: &PrimeTable, top: u64) -> Result<()> {
    if top > t.limit() {
        return Err(Error::Resource(format!("need primes up to {top}, table covers {}", t.limit())));
    }
    Ok(())
}

pub fn exp_sum_direct(inv: &InverseSpec, pp: &PhaseParams, t: &PrimeTable) -> Result<Complex64> {
    check_limit(t, pp.p1)?;
    let ph = phases(inv, pp)?;
    let mut s = ComplexSum::new();
    for (i, z) in ph.iter().enumerate() {
        let n = pp.p + 1 + i as u64;
        let lam = t.mangoldt(n)?;
        if lam != 0.0 {
            s.add(*z * lam);
        }
    }
    Ok(s.value())
}

/// The four Vaughan components and the directly evaluated sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VaughanSplit {
    pub v: f64,
    pub s1: Complex64,
    pub s21: Complex64,
    pub s22: Complex64,
    pub s3: Complex64,
    pub direct: Complex64,
    pub residual: f64,
}

impl VaughanSplit {
    pub fn recombined(&self) -> Complex64 {
        self.s1 - self.s21 - self.s22 + self.s3
    }
    /// `residual ≤ 1e-6 (1 + |direct|)`.
    pub fn is_exact(&self) -> bool {
        self.residual <= 1e-6 * (1.0 + self.direct.norm())
    }
}

/// `v = w = φ(P_1) P_1^{−5/8}`.
pub fn default_vaughan_cutoff(inv: &InverseSpec, p1: u64) -> Result<f64> {
    Ok(inv.eval_phi(p1 as f64)? * (p1 as f64).powf(-5.0 / 8.0))
}

/// Splits the sum by Vaughan's identity with `v = w`:
/// `S_1 = Σ_{l≤v} μ(l) Σ_k log k E(kl)`, `S_21 = Σ_{l≤v} Π_v(l) Σ_k E(kl)`,
/// `S_22 = Σ_{v<l≤v²} Π_v(l) Σ_k E(kl)`, `S_3 = Σ_{v<l} Ξ_v(l) Σ_{k>v} Λ(k) E(kl)`,
/// where `k` runs over `P/l < k ≤ P_1/l`. The identity is exact once `P ≥ v`.
pub fn vaughan_decompose(inv: &InverseSpec, pp: &PhaseParams, t: &PrimeTable, v: Option<f64>) -> Result<VaughanSplit> {
    if pp.m == 0 {
        return arg("m = 0 is not an exponential sum with a φ phase");
    }
    check_limit(t, pp.p1)?;
    let v = match v {
        Some(v) => v,
        None => default_vaughan_cutoff(inv, pp.p1)?,
    };
    if !(v > 1.0) {
        return arg(format!("Vaughan cutoff v={v} must exceed 1"));
    }
    let ph = phases(inv, pp)?;
    let direct = {
        let mut s = ComplexSum::new();
        for (i, z) in ph.iter().enumerate() {
            let lam = t.mangoldt(pp.p + 1 + i as u64)?;
            if lam != 0.0 {
                s.add(*z * lam);
            }
        }
        s.value()
    };
    let p1 = pp.p1;
    let (pi, xi) = vaughan_coefficients(v, v, p1, t)?;
    let mu = t.mobius_table(p1)?;
    let lam = t.mangoldt_table(p1)?;
    let at = |n: u64| ph[(n - pp.p - 1) as usize];
    let vf = v.floor() as u64;
    let v2 = (v * v).floor() as u64;
    let inner = |l: u64, coef: &dyn Fn(u64) -> f64, k_min_excl: u64| -> Complex64 {
        let lo = (pp.p / l).max(k_min_excl) + 1;
        let hi = p1 / l;
        let mut s = ComplexSum::new();
        for k in lo..=hi {
            if k * l > pp.p {
                let c = coef(k);
                if c != 0.0 {
                    s.add(at(k * l) * c);
                }
            }
        }
        s.value()
    };
    let log_k = |k: u64| (k as f64).ln();
    let one = |_k: u64| 1.0;
    let lam_k = |k: u64| lam[k as usize];
    let terms = |range: std::ops::RangeInclusive<u64>, weight: &(dyn Fn(u64) -> f64 + Sync), coef: &(dyn Fn(u64) -> f64 + Sync), kmin: u64| {
        let parts: Vec<Complex64> = range
            .into_par_iter()
            .map(|l| {
                let w = weight(l);
                if w == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    inner(l, coef, kmin) * w
                }
            })
            .collect();
        csum(parts)
    };
    let mu_l = |l: u64| mu[l as usize] as f64;
    let pi_l = |l: u64| pi[l as usize];
    let xi_l = |l: u64| xi[l as usize] as f64;
    let s1 = terms(1..=vf.min(p1), &mu_l, &log_k, 0);
    let s21 = terms(1..=vf.min(p1), &pi_l, &one, 0);
    let s22 = terms((vf + 1)..=v2.min(p1), &pi_l, &one, 0);
    let s3_top = (p1 as f64 / v).floor() as u64;
    let s3 = terms((vf + 1)..=s3_top.min(p1), &xi_l, &lam_k, vf);
    let recombined = s1 - s21 - s22 + s3;
    Ok(VaughanSplit { v, s1, s21, s22, s3, direct, residual: (recombined - direct).norm() })
}

/// Where the pointwise identity `Λ(n) = Σ log k μ(l) − Σ Π_v(l) + Σ Λ(k) Ξ_v(l)`
/// (with `v = w`) holds for `1 ≤ n ≤ n_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VaughanScan {
    pub v: f64,
    pub n_max: u64,
    /// Integers at which the identity fails (to `1e-9`).
    pub failures: Vec<u64>,
    /// Smallest `n0` such that the identity holds for all `n0 ≤ n ≤ n_max`.
    pub valid_from: u64,
}

pub fn vaughan_identity_scan(v: f64, n_max: u64, t: &PrimeTable) -> Result<VaughanScan> {
    check_limit(t, n_max)?;
    let (pi, xi) = vaughan_coefficients(v, v, n_max, t)?;
    let mu = t.mobius_table(n_max)?;
    let lam = t.mangoldt_table(n_max)?;
    let len = n_max as usize;
    let vf = v.floor() as usize;
    let mut rhs = vec![CompensatedSum::new(); len + 1];
    for l in 1..=len {
        for (j, n) in (l..=len).step_by(l).enumerate() {
            let k = j + 1;
            let mut term = 0.0;
            if l <= vf && mu[l] != 0 {
                term += (k as f64).ln() * mu[l] as f64;
            }
            if pi[l] != 0.0 {
                term -= pi[l];
            }
            if l > vf && k > vf && xi[l] != 0 && lam[k] != 0.0 {
                term += lam[k] * xi[l] as f64;
            }
            if term != 0.0 {
                rhs[n].add(term);
            }
        }
    }
    let failures: Vec<u64> = (1..=len)
        .filter(|&n| (rhs[n].value() - lam[n]).abs() > 1e-9)
        .map(|n| n as u64)
        .collect();
    let valid_from = failures.last().map_or(1, |&n| n + 1);
    Ok(VaughanScan { v, n_max, failures, valid_from })
}

/// One inequality `lhs ≤ rhs` of a bound chain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainStep {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
}

impl ChainStep {
    pub fn new(name: &str, lhs: f64, rhs: f64) -> Self {
        let holds = lhs <= rhs * (1.0 + 1e-12) + 1e-9;
        Self { name: name.to_string(), lhs, rhs, slack: rhs - lhs, holds }
    }
}

/// Measured size of a sum next to the bound formulas it is compared with.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub measured: f64,
    pub bound_type_i: Option<f64>,
    pub bound_bilinear: Option<f64>,
    pub ratio_type_i: Option<f64>,
    pub ratio_bilinear: Option<f64>,
    /// Exact inequality steps checked along the way (bilinear check only).
    pub chain: Vec<ChainStep>,
    /// The `R` used in the Weyl–Van der Corput step (bilinear check only).
    pub r_used: Option<u64>,
}

impl BoundReport {
    pub fn chain_holds(&self) -> bool {
        self.chain.iter().all(|s| s.holds)
    }
}

/// `σ(y) φ(y)`.
fn sigma_phi(inv: &InverseSpec, y: f64) -> Result<f64> {
    Ok(inv.sigma(y)? * inv.eval_phi(y)?)
}

/// `|m|^{1/2} log(lX) · lX · (σ(lX) φ(lX))^{−1/2}`.
pub fn type_i_bound(inv: &InverseSpec, l: u64, x: f64, mm: i64) -> Result<f64> {
    let y = l as f64 * x;
    Ok((mm.unsigned_abs() as f64).sqrt() * y.ln() * y / sigma_phi(inv, y)?.sqrt())
}

/// Measures `|Σ_{k≤X} e(αjkl + mφ(kl))|`, summed over dyadic blocks
/// `(Y, 2Y]`, against [`type_i_bound`]. Terms with `kl < h(x0)` (outside the
/// domain of `φ`) are skipped.
pub fn type_i_bound_check(inv: &InverseSpec, l: u64, j: u32, x: f64, mm: i64, alpha: f64) -> Result<BoundReport> {
    if !(x >= 2.0) || l == 0 || mm == 0 || j > 1 {
        return arg("type-I check needs X >= 2, l >= 1, m != 0 and j in {0, 1}");
    }
    let kmax = x.floor() as u64;
    let kmin = ((inv.y0() / l as f64).ceil() as u64).max(1);
    let term = |k: u64| -> Result<Complex64> {
        let n = (k * l) as f64;
        Ok(e(frac(alpha * j as f64 * n) + frac(mm as f64 * inv.eval_phi(n)?)))
    };
    let mut blocks = Vec::new();
    let mut lo = 0u64;
    let mut hi = 1u64;
    while lo < kmax {
        let top = hi.min(kmax);
        blocks.push((lo + 1, top));
        lo = top;
        hi *= 2;
    }
    let sums: Vec<Complex64> = blocks
        .par_iter()
        .map(|&(a, b)| {
            let mut s = ComplexSum::new();
            for k in a.max(kmin)..=b {
                s.add(term(k)?);
            }
            Ok(s.value())
        })
        .collect::<Result<Vec<_>>>()?;
    let measured = csum(sums).norm();
    let bound = type_i_bound(inv, l, x, mm)?;
    Ok(BoundReport {
        measured,
        bound_type_i: Some(bound),
        bound_bilinear: None,
        ratio_type_i: Some(measured / bound),
        ratio_bilinear: None,
        chain: Vec::new(),
        r_used: None,
    })
}

/// Input of [`bilinear_check`]: `Σ_{L<l≤2L} Σ_{K<k≤2K, P<kl≤P_1} Δ_1(l) Δ_2(k) e(αkl + mφ(kl))`.
#[derive(Debug, Clone)]
pub struct BilinearInput {
    pub k: u64,
    pub l: u64,
    pub m: i64,
    pub alpha: f64,
    pub r: Option<u64>,
    /// `Δ_1(l)` for `l = L+1..=2L`.
    pub d1: Vec<Complex64>,
    /// `Δ_2(k)` for `k = K+1..=2K`.
    pub d2: Vec<Complex64>,
    pub p: u64,
    pub p1: u64,
}

/// `|m|^{1/6} log²L log²K (σφ(KL))^{−1/6} min{K,L}^{1/6} KL`.
pub fn bilinear_bound(inv: &InverseSpec, k: u64, l: u64, mm: i64) -> Result<f64> {
    let (kf, lf) = (k as f64, l as f64);
    let sp = sigma_phi(inv, kf * lf)?;
    Ok((mm.unsigned_abs() as f64).powf(1.0 / 6.0)
        * lf.ln().powi(2)
        * kf.ln().powi(2)
        * sp.powf(-1.0 / 6.0)
        * kf.min(lf).powf(1.0 / 6.0)
        * kf
        * lf)
}

/// Evaluates the bilinear sum directly and checks each exact step of the
/// Cauchy–Schwarz / Weyl–Van der Corput chain, then compares with
/// [`bilinear_bound`]. Hypothesis failures are returned together.
pub fn bilinear_check(inv: &InverseSpec, input: &BilinearInput) -> Result<BoundReport> {
    let mut bi = input.clone();
    if bi.d1.len() as u64 != bi.l || bi.d2.len() as u64 != bi.k {
        return arg("coefficient arrays must have lengths L and K");
    }
    if bi.m == 0 || bi.k == 0 || bi.l == 0 {
        return arg("need m != 0 and K, L >= 1");
    }
    // the chain runs Weyl differencing over the shorter variable
    if bi.k > bi.l {
        std::mem::swap(&mut bi.k, &mut bi.l);
        std::mem::swap(&mut bi.d1, &mut bi.d2);
    }
    let (kk, ll) = (bi.k, bi.l);
    let kl = (kk * ll) as f64;
    let sp = sigma_phi(inv, kl)?;
    let mabs = bi.m.unsigned_abs() as f64;
    let min_kl = kk.min(ll) as f64;
    let mut failed = Vec::new();
    if mabs * min_kl > sp {
        failed.push(format!("|m| min{{K,L}} = {} exceeds σ(KL)φ(KL) = {sp}", mabs * min_kl));
    }
    let phi_kl = inv.eval_phi(kl)?;
    if phi_kl > min_kl.powi(4) {
        failed.push(format!("φ(KL) = {phi_kl} exceeds min{{K,L}}^4 = {}", min_kl.powi(4)));
    }
    let r = match bi.r {
        Some(r) => r,
        None => (mabs.powf(-1.0 / 3.0) * (kk as f64).powf(-1.0 / 3.0) * sp.powf(1.0 / 3.0))
            .ceil()
            .clamp(1.0, kk as f64) as u64,
    };
    if r == 0 || r > kk {
        failed.push(format!("R = {r} must lie in [1, K = {kk}]"));
    }
    if !failed.is_empty() {
        return Err(Error::Precondition(failed));
    }
    if inv.y0() > (kk * ll) as f64 {
        return arg("KL lies below the domain of φ");
    }

    // z[li][ki] = Δ_2(k) e(αkl + mφ(kl)) 1[P < kl ≤ P_1]
    let phase = |k: u64, l: u64| -> Result<Complex64> {
        let n = k * l;
        Ok(e(frac(bi.alpha * n as f64) + frac(bi.m as f64 * inv.eval_phi(n as f64)?)))
    };
    let in_range = |k: u64, l: u64| k * l > bi.p && k * l <= bi.p1;
    let raw: Vec<Vec<Complex64>> = (0..ll)
        .into_par_iter()
        .map(|li| {
            let l = ll + 1 + li;
            (0..kk)
                .map(|ki| {
                    let k = kk + 1 + ki;
                    if in_range(k, l) {
                        phase(k, l)
                    } else {
                        Ok(Complex64::new(0.0, 0.0))
                    }
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let z: Vec<Vec<Complex64>> = raw
        .iter()
        .map(|row| row.iter().zip(&bi.d2).map(|(p, d)| p * d).collect())
        .collect();
    let t_l: Vec<Complex64> = z.iter().map(|row| csum(row.iter().copied())).collect();
    let total = csum(t_l.iter().zip(&bi.d1).map(|(t, d)| t * d));
    let measured = total.norm();

    let d1_sq = fsum(bi.d1.iter().map(|d| d.norm_sqr()));
    let d2_sq = fsum(bi.d2.iter().map(|d| d.norm_sqr()));
    let t_sq = fsum(t_l.iter().map(|t| t.norm_sqr()));
    let e_r = |r: i64| -> Complex64 {
        csum(z.iter().map(|row| {
            csum((0..kk as i64).filter_map(|ki| {
                let kj = ki + r;
                (kj >= 0 && kj < kk as i64).then(|| row[ki as usize] * row[kj as usize].conj())
            }))
        }))
    };
    let rr = r as i64;
    let e_vals: Vec<(i64, Complex64)> = (-rr..=rr).into_par_iter().map(|r| (r, e_r(r))).collect();
    let e0 = e_vals.iter().find(|(r, _)| *r == 0).map(|x| x.1).unwrap_or_default();
    let fejer = fsum(e_vals.iter().map(|(r, v)| (1.0 - r.unsigned_abs() as f64 / r_f(rr)) * v.re));
    let wvdc_factor = (kk as f64 + r as f64) / r as f64;
    let sum_abs_er = fsum(e_vals.iter().filter(|(r, _)| *r != 0).map(|(_, v)| v.norm()));

    // Σ_k |Δ_2(k)|² Σ_{1≤|r|≤R} |S̃(k, r)| 1[k + r ∈ (K, 2K]]
    let s_tilde = |ki: i64, r: i64| -> Complex64 {
        let k = kk + 1 + ki as u64;
        let k2 = (kk as i64 + 1 + ki + r) as u64;
        csum((0..ll).filter_map(|li| {
            let l = ll + 1 + li;
            (in_range(k, l) && in_range(k2, l))
                .then(|| raw[li as usize][ki as usize] * raw[li as usize][(ki + r) as usize].conj())
        }))
    };
    let step_d_rhs = fsum((0..kk as i64).into_par_iter().map(|ki| {
        let inner = fsum((-rr..=rr).filter(|&r| r != 0 && ki + r >= 0 && ki + r < kk as i64).map(|r| s_tilde(ki, r).norm()));
        bi.d2[ki as usize].norm_sqr() * inner
    }).collect::<Vec<_>>());

    let chain = vec![
        ChainStep::new("|E_0| <= L sum|D2|^2", e0.norm(), ll as f64 * d2_sq),
        ChainStep::new("|B|^2 <= sum|D1|^2 * sum_l|T_l|^2", measured * measured, d1_sq * t_sq),
        ChainStep::new("sum_l|T_l|^2 <= (K+R)/R * sum_r (1-|r|/R) E_r", t_sq, wvdc_factor * fejer),
        ChainStep::new("sum_{r!=0}|E_r| <= sum_k|D2(k)|^2 sum_r|S(k,r)|", sum_abs_er, step_d_rhs),
    ];
    let bound = bilinear_bound(inv, kk, ll, bi.m)?;
    Ok(BoundReport {
        measured,
        bound_type_i: None,
        bound_bilinear: Some(bound),
        ratio_type_i: None,
        ratio_bilinear: Some(measured / bound),
        chain,
        r_used: Some(r),
    })
}

fn r_f(r: i64) -> f64 {
    r as f64
}

/// Difference between the `h`-weighted and the plain prime exponential sums
/// on the grid `ξ = j/grid`, and the sawtooth ("middle") form of the same
/// difference.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorTermProfile {
    pub n: u64,
    pub grid: usize,
    /// `max_j |D(j/grid)|`, a lower bound for the sup over `[0, 1)`.
    pub sup_diff: f64,
    pub per_xi: Vec<f64>,
    /// `max_j |M(j/grid)|` for the sawtooth form `M`.
    pub middle_sup: f64,
    /// `max_j |D(j/grid) − M(j/grid)|`.
    pub route_gap: f64,
    /// `N^{3/2−γ} log N`, the scale of the prime-power and Taylor corrections.
    pub route_envelope: f64,
}

/// `D(ξ) = Σ_{p∈P_h, p≤N, p≡a} φ'(p)^{−1} log p e(ξp) − Σ_{p≤N, p≡a} log p e(ξp)`
/// and `M(ξ) = Σ_{k≤N} φ'(k)^{−1} (Φ(−φ(k+1)) − Φ(−φ(k))) Λ_{a,q}(k) e(ξk)`.
pub fn error_term_sup(
    inv: &InverseSpec,
    ps: &PsPrimeSet,
    n: u64,
    q: u64,
    a: u64,
    t: &PrimeTable,
    grid: usize,
) -> Result<ErrorTermProfile> {
    check_limit(t, n + 1)?;
    if ps.limit() < n {
        return Err(Error::Resource(format!("prime set covers {}, need {n}", ps.limit())));
    }
    if grid == 0 {
        return arg("grid must be at least 1");
    }
    if q == 0 || a >= q || gcd(a, q) != 1 {
        return arg(format!("need 0 <= a < q with gcd(a, q) = 1, got a={a}, q={q}"));
    }
    let identity = inv.parent().is_identity_like() && inv.parent().c_h() == 1.0;
    let primes: Vec<u64> = t.primes_in(2, n).filter(|p| p % q == a).collect();
    let diff_w: Vec<(u64, f64)> = primes
        .par_iter()
        .map(|&p| {
            let lp = (p as f64).ln();
            if identity {
                return Ok((p, 0.0));
            }
            if ps.contains(p) {
                Ok((p, lp / inv.eval_phi_deriv(p as f64, 1)? - lp))
            } else {
                Ok((p, -lp))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mut seq = vec![0.0; n as usize + 1];
    for (p, w) in diff_w {
        seq[p as usize] = w;
    }
    let d = fourier_on_grid_real(0, &seq, grid)?;

    let y0 = inv.y0();
    let mid: Vec<(usize, f64)> = (1..=n)
        .into_par_iter()
        .filter(|&k| k % q == a && k as f64 >= y0)
        .map(|k| {
            let lam = t.mangoldt(k)?;
            if lam == 0.0 || identity {
                return Ok((k as usize, 0.0));
            }
            let f0 = inv.eval_phi(k as f64)?;
            let f1 = inv.eval_phi(k as f64 + 1.0)?;
            let d1 = inv.eval_phi_deriv(k as f64, 1)?;
            Ok((k as usize, (sawtooth_phi(-f1) - sawtooth_phi(-f0)) * lam / d1))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut mseq = vec![0.0; n as usize + 1];
    for (k, w) in mid {
        mseq[k] = w;
    }
    let mm = fourier_on_grid_real(0, &mseq, grid)?;
    let per_xi: Vec<f64> = d.iter().map(|z| z.norm()).collect();
    let sup_diff = per_xi.iter().copied().fold(0.0, f64::max);
    let middle_sup = mm.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let route_gap = d.iter().zip(&mm).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    let nf = n as f64;
    let route_envelope = nf.powf(1.5 - inv.gamma()) * nf.ln().max(1.0);
    Ok(ErrorTermProfile { n, grid, sup_diff, per_xi, middle_sup, route_gap, route_envelope })
}

/// Number of integers `n` with `⌊h(n)⌋ = p` minus `φ'(p)`, the quantity whose
/// sawtooth part drives the error term.
pub fn floor_count_excess(inv: &InverseSpec, p: u64) -> Result<f64> {
    Ok(ps_hits(inv, p)? as f64 - inv.eval_phi_deriv(p as f64, 1)?)
}

/// Both sides of summation by parts for `Σ_{1<n≤N} Λ(n)/n`: the direct sum
/// and `U(N)g(N) − ∫_1^N U(t) g'(t) dt` with `U(t) = Σ_{1<n≤t} Λ(n)`, the
/// integral taken by quadrature on each unit interval.
pub fn summation_by_parts_check(t: &PrimeTable, n: u64) -> Result<(f64, f64)> {
    check_limit(t, n)?;
    let lam = t.mangoldt_table(n)?;
    let direct = fsum((2..=n as usize).map(|k| lam[k] / k as f64));
    let mut u = CompensatedSum::new();
    let mut integral = CompensatedSum::new();
    for k in 1..n {
        u.add(lam[k as usize]);
        let uk = u.value();
        let (piece, _) = quad::integrate(|x: f64| -uk / (x * x), k as f64, k as f64 + 1.0, 1e-15)?;
        integral.add(piece);
    }
    u.add(lam[n as usize]);
    let by_parts = u.value() / n as f64 - integral.value();
    Ok((direct, by_parts))
}
