//! Green-type measures on `{0, …, N−1}`: the W-trick, `λ_{b,m,N}`,
//! `λ^h_{b,m,N}`, restriction to a set, large spectra with their Bohr sets,
//! and the smoothed measure `a_1 = a * β * β`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};
use crate::hfun::InverseSpec;
use crate::numeric::{fsum, gcd};
use crate::sieve::{PrimeTable, PsPrimeSet};
use crate::zn_fourier::{dft, inverse_dft, CyclicFunction, CyclicTransform};

/// `W`, `m = Π_{p ≤ W} p` and a residue `b` coprime to `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WTrickParams {
    pub w: u64,
    pub m: u64,
    pub b: u64,
}

fn primorial(w: u64) -> Result<u64> {
    let mut m: u64 = 1;
    for p in 2..=w {
        if (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0) {
            m = m
                .checked_mul(p)
                .ok_or_else(|| Error::Argument(format!("product of primes up to W={w} overflows")))?;
        }
    }
    Ok(m)
}

impl WTrickParams {
    /// `m = Π_{p ≤ w} p`; `b` defaults to 1 when `m > 1` and to 0 when `m = 1`.
    pub fn new(w: u64, b: Option<u64>) -> Result<Self> {
        let m = primorial(w)?;
        let b = b.unwrap_or(if m > 1 { 1 } else { 0 });
        if m == 1 {
            if b != 0 {
                return arg(format!("with m = 1 the residue must be b = 0, got {b}"));
            }
        } else if b >= m || gcd(b, m) != 1 {
            return arg(format!("b={b} must be a unit modulo m={m}"));
        }
        Ok(Self { w, m, b })
    }

    pub fn with_b(self, b: u64) -> Result<Self> {
        Self::new(self.w, Some(b))
    }

    /// Euler `φ(m)`; `m` is squarefree so this is `Π (p − 1)`.
    pub fn phi_m(&self) -> u64 {
        let mut out = 1;
        let mut m = self.m;
        let mut p = 2;
        while m > 1 {
            if m % p == 0 {
                out *= p - 1;
                m /= p;
            }
            p += 1;
        }
        out
    }

    /// The units modulo `m` (just `[0]` when `m = 1`).
    pub fn residues(&self) -> Vec<u64> {
        if self.m == 1 {
            vec![0]
        } else {
            (1..self.m).filter(|&b| gcd(b, self.m) == 1).collect()
        }
    }
}

/// `W = override` or `max(1, ⌊¼ log log N⌋)`.
pub fn w_trick(n: u64, t: &PrimeTable, override_w: Option<u64>) -> Result<WTrickParams> {
    let w = match override_w {
        Some(w) => w,
        None => {
            if n < 16 {
                return arg(format!("automatic W needs N >= 16, got {n}"));
            }
            ((0.25 * (n as f64).ln().ln()).floor() as u64).max(1)
        }
    };
    let params = WTrickParams::new(w, None)?;
    debug_assert!(w > t.limit() || params.m == t.primes_in(2, w).product::<u64>());
    Ok(params)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceTag {
    Lambda,
    LambdaH,
    Restricted,
    Smoothed,
    BohrNormalized,
}

/// A nonnegative weight on `{0, …, N−1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSequence {
    weights: Vec<f64>,
    pub tag: SequenceTag,
}

impl WeightedSequence {
    pub fn new(weights: Vec<f64>, tag: SequenceTag) -> Result<Self> {
        if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !(w.is_finite() && **w >= 0.0)) {
            return arg(format!("weight at {i} is {w}; weights must be finite and nonnegative"));
        }
        Ok(Self { weights, tag })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }
    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
    pub fn mass(&self) -> f64 {
        fsum(self.weights.iter().copied())
    }
    pub fn max(&self) -> f64 {
        self.weights.iter().copied().fold(0.0, f64::max)
    }
    pub fn support(&self) -> Vec<usize> {
        (0..self.weights.len()).filter(|&i| self.weights[i] > 0.0).collect()
    }
    pub fn to_cyclic(&self) -> CyclicFunction {
        CyclicFunction::from_real(&self.weights).expect("weights are finite and nonempty")
    }

    /// Writes `index,weight` rows.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["index", "weight"])?;
        for (i, x) in self.weights.iter().enumerate() {
            wr.write_record([i.to_string(), format!("{x:e}")])?;
        }
        wr.flush()?;
        Ok(())
    }
}

fn check_table(n: u64, params: &WTrickParams, limit: u64) -> Result<u64> {
    if n == 0 {
        return arg("N must be at least 1");
    }
    let top = params.m * (n - 1) + params.b;
    if top > limit {
        return Err(Error::Resource(format!(
            "need primes up to m(N−1)+b = {top}, table covers {limit}"
        )));
    }
    Ok(top)
}

/// `λ_{b,m,N}(n) = φ(m) log(mn+b) / (mN)` when `mn + b` is prime, for `0 ≤ n < N`.
pub fn build_lambda(n: u64, params: &WTrickParams, t: &PrimeTable) -> Result<WeightedSequence> {
    check_table(n, params, t.limit())?;
    let scale = params.phi_m() as f64 / (params.m as f64 * n as f64);
    let weights = (0..n)
        .into_par_iter()
        .map(|i| {
            let k = params.m * i + params.b;
            if t.is_prime(k) {
                scale * (k as f64).ln()
            } else {
                0.0
            }
        })
        .collect();
    WeightedSequence::new(weights, SequenceTag::Lambda)
}

/// `λ^h_{b,m,N}(n) = φ(m) log(mn+b) / (mN φ'(mn+b))` when `mn + b ∈ P_h`.
pub fn build_lambda_h(n: u64, params: &WTrickParams, inv: &InverseSpec, ps: &PsPrimeSet) -> Result<WeightedSequence> {
    check_table(n, params, ps.limit())?;
    let scale = params.phi_m() as f64 / (params.m as f64 * n as f64);
    let weights = (0..n)
        .into_par_iter()
        .map(|i| {
            let k = params.m * i + params.b;
            if ps.contains(k) {
                Ok(scale * (k as f64).ln() / inv.eval_phi_deriv(k as f64, 1)?)
            } else {
                Ok(0.0)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    WeightedSequence::new(weights, SequenceTag::LambdaH)
}

/// `1_A · λ`.
pub fn restrict(set: &[usize], lam: &WeightedSequence) -> Result<WeightedSequence> {
    let mut w = vec![0.0; lam.len()];
    for &x in set {
        if x >= lam.len() {
            return arg(format!("element {x} lies outside 0..{}", lam.len()));
        }
        w[x] = lam.weights[x];
    }
    WeightedSequence::new(w, SequenceTag::Restricted)
}

/// Large spectrum `R = {ξ : |F[a](ξ)| ≥ δ}` and Bohr set
/// `B(R, ε) = {x : ‖xξ/N‖ ≤ ε for all ξ ∈ R}`.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub n: usize,
    pub delta: f64,
    pub epsilon: f64,
    #[serde(rename = "R")]
    pub spectrum: Vec<usize>,
    #[serde(skip)]
    pub bohr: Vec<usize>,
    pub bohr_size: usize,
    #[serde(skip)]
    pub transform: CyclicTransform,
}

/// `‖xξ/N‖ · N`, the distance of `xξ` to the nearest multiple of `N`.
pub fn cyclic_distance(x: usize, xi: usize, n: usize) -> usize {
    let r = ((x as u128 * xi as u128) % n as u128) as usize;
    r.min(n - r)
}

/// Bohr set of a frequency list at radius `ε`, by exhaustive scan.
pub fn bohr_set(spectrum: &[usize], epsilon: f64, n: usize) -> Vec<usize> {
    let nf = n as f64;
    (0..n)
        .into_par_iter()
        .filter(|&x| spectrum.iter().all(|&xi| cyclic_distance(x, xi, n) as f64 / nf <= epsilon))
        .collect()
}

impl SpectrumReport {
    pub fn k(&self) -> usize {
        self.spectrum.len()
    }

    /// `|B| ≥ ε^k N`, compared in logarithms.
    pub fn bohr_bound_holds(&self) -> bool {
        let lhs = (self.bohr.len() as f64).ln();
        let rhs = self.k() as f64 * self.epsilon.ln() + (self.n as f64).ln();
        lhs >= rhs - 1e-12
    }

    /// Every stored frequency meets the threshold against the stored transform.
    pub fn spectrum_consistent(&self) -> bool {
        self.spectrum.iter().all(|&xi| self.transform.coefficients()[xi].norm() >= self.delta)
    }

    /// `β = |B|^{-1} 1_B`.
    pub fn beta(&self) -> WeightedSequence {
        let mut w = vec![0.0; self.n];
        let v = 1.0 / self.bohr.len() as f64;
        for &x in &self.bohr {
            w[x] = v;
        }
        WeightedSequence { weights: w, tag: SequenceTag::BohrNormalized }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

pub fn spectrum_and_bohr(a: &WeightedSequence, delta: f64, epsilon: f64) -> Result<SpectrumReport> {
    if !(delta > 0.0 && delta < 1.0) {
        return arg(format!("delta={delta} must lie in (0, 1)"));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return arg(format!("epsilon={epsilon} must lie in (0, 1)"));
    }
    if a.is_empty() {
        return arg("empty sequence");
    }
    let n = a.len();
    let transform = dft(&a.to_cyclic());
    let spectrum: Vec<usize> = (0..n).filter(|&xi| transform.coefficients()[xi].norm() >= delta).collect();
    let bohr = bohr_set(&spectrum, epsilon, n);
    Ok(SpectrumReport { n, delta, epsilon, bohr_size: bohr.len(), spectrum, bohr, transform })
}

/// `a_1 = a * β * β` with `β = |B|^{-1} 1_B`.
pub fn smooth(a: &WeightedSequence, report: &SpectrumReport) -> Result<WeightedSequence> {
    if a.len() != report.n {
        return arg(format!("sequence length {} differs from the report's N={}", a.len(), report.n));
    }
    let fa = dft(&a.to_cyclic());
    let fb = dft(&report.beta().to_cyclic());
    let prod: Vec<Complex64> = fa.coefficients().iter().zip(fb.coefficients()).map(|(x, y)| x * y * y).collect();
    let back = inverse_dft(&CyclicTransform::from_coefficients(prod));
    let n = a.len() as f64;
    let peak = a.max();
    let weights = back
        .values()
        .iter()
        .map(|z| {
            let v = z.re / n;
            // FFT roundoff can leave values of order 1e-17 below zero
            if v < 0.0 && v > -1e-12 * peak.max(f64::MIN_POSITIVE) {
                0.0
            } else {
                v
            }
        })
        .collect();
    WeightedSequence::new(weights, SequenceTag::Smoothed)
}

/// `max(λ^h) · φ(N) / log² N`.
pub fn peak_ratio(lambda_h: &WeightedSequence, inv: &InverseSpec, n: u64) -> Result<f64> {
    let l = (n as f64).ln();
    Ok(lambda_h.max() * inv.eval_phi(n as f64)? / (l * l))
}
