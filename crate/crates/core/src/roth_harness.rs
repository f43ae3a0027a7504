//! Three-term progressions: counting, the transference of a subset of `P_h`
//! to `Z_N`, Varnavides counting, restriction ratios, Fourier sup decay and
//! the smoothing upper-bound chain.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{arg, Error, Result};
use crate::expsums::ChainStep;
use crate::hfun::InverseSpec;
use crate::measures::{build_lambda, build_lambda_h, w_trick, SpectrumReport, WTrickParams, WeightedSequence};
use crate::numeric::{e, fsum, gcd};
use crate::sieve::{PrimeTable, PsPrimeSet};
use crate::zn_fourier::{dft, fourier_on_grid, trilinear_direct, trilinear_fft, trilinear_from_transforms, CyclicFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ApMode {
    /// Pairs `(x, d)`, `d ≢ 0`, with `x, x+d, x+2d ∈ A` modulo `N`.
    Cyclic,
    /// Progressions inside `{0, …, N−1}` that do not wrap.
    Integer,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApReport {
    pub n: u64,
    pub mode: ApMode,
    pub size: u64,
    /// `Λ_3(1_A, 1_A, 1_A)` over `Z_N`.
    pub trilinear: u64,
    /// Ordered nontrivial progressions in the chosen mode.
    pub nontrivial: u64,
    /// The same count obtained from an FFT evaluation of `Λ_3`.
    pub nontrivial_fft: u64,
    pub witness: Option<(u64, u64, u64)>,
}

fn membership(set: &[u64], n: u64) -> Result<Vec<bool>> {
    let mut inside = vec![false; n as usize];
    for &x in set {
        if x >= n {
            return arg(format!("element {x} lies outside 0..{n}"));
        }
        inside[x as usize] = true;
    }
    Ok(inside)
}

/// `Λ_3(1_A, 1_A, 1_A)` by FFT, rounded to the nearest integer.
fn trilinear_count_fft(inside: &[bool]) -> Result<u64> {
    let f = CyclicFunction::new(inside.iter().map(|&b| Complex64::new(b as u8 as f64, 0.0)).collect())?;
    let v = if inside.len() % 2 == 1 {
        trilinear_fft(&f, &f, &f)?
    } else {
        let t = dft(&f);
        trilinear_from_transforms(&t, &t, &t)
    };
    Ok(v.re.round().max(0.0) as u64)
}

/// Counts nontrivial 3APs in `A ⊆ {0, …, N−1}` over all ordered pairs of
/// distinct elements, and cross-checks against `Λ_3` computed by FFT (on
/// `Z_{2N+1}` in integer mode, where no progression can wrap).
pub fn count_3aps(set: &[u64], n: u64, mode: ApMode) -> Result<ApReport> {
    if n == 0 {
        return arg("N must be at least 1");
    }
    let inside = membership(set, n)?;
    let mut elems: Vec<u64> = set.to_vec();
    elems.sort_unstable();
    elems.dedup();
    let size = elems.len() as u64;
    let third = |x: u64, y: u64| -> Option<u64> {
        match mode {
            ApMode::Cyclic => Some((2 * y + n - x % n) % n),
            ApMode::Integer => (2 * y).checked_sub(x).filter(|&z| z < n),
        }
    };
    let per_x: Vec<(u64, Option<(u64, u64, u64)>)> = elems
        .par_iter()
        .map(|&x| {
            let mut count = 0;
            let mut witness = None;
            for &y in &elems {
                if y == x {
                    continue;
                }
                if let Some(z) = third(x, y) {
                    if inside[z as usize] {
                        count += 1;
                        if witness.is_none() && (y > x || mode == ApMode::Cyclic) {
                            witness = Some((x, y, z));
                        }
                    }
                }
            }
            (count, witness)
        })
        .collect();
    let nontrivial = per_x.iter().map(|p| p.0).sum();
    let witness = per_x.iter().find_map(|p| p.1);
    let trilinear = trilinear_count_fft(&inside)?;
    let nontrivial_fft = match mode {
        ApMode::Cyclic => trilinear.saturating_sub(size),
        ApMode::Integer => {
            let mut wide = inside.clone();
            wide.resize(2 * n as usize + 1, false);
            trilinear_count_fft(&wide)?.saturating_sub(size)
        }
    };
    Ok(ApReport { n, mode, size, trilinear, nontrivial, nontrivial_fft, witness })
}

/// Output of [`transference_build`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Transference {
    pub params: WTrickParams,
    /// The prime modulus, the smallest prime `≥ 2n/m`.
    pub n_prime: u64,
    /// `A = (A_0 ∩ (n/2, n] ∩ (b mod m) − b) / m`, sorted.
    pub set: Vec<u64>,
    /// `λ^h_{b,m,N}(A)`.
    pub mass: f64,
    /// `λ_{b,m,N}` summed over `x` with `mx + b ∈ (n/2, n]`.
    pub window_mass: f64,
    /// `Σ_{k ∈ A_0, k ≡ b} log k / φ'(k)` for every unit `b`.
    pub residue_weights: Vec<(u64, f64)>,
}

/// Rescales `A_0 ⊆ P_h` (default `P_h ∩ (n/2, n]`) into `{1, …, ⌊N/2⌋}` via
/// the residue class `b mod m` carrying the largest weighted count.
pub fn transference_build(
    inv: &InverseSpec,
    ps: &PsPrimeSet,
    t: &PrimeTable,
    n: u64,
    override_w: Option<u64>,
    a0: Option<&[u64]>,
) -> Result<Transference> {
    if ps.limit() < n || t.limit() < n {
        return Err(Error::Resource(format!("prime tables must cover n = {n}")));
    }
    let lo = n / 2;
    let a0: Vec<u64> = match a0 {
        Some(s) => {
            if let Some(&bad) = s.iter().find(|&&k| !ps.contains(k)) {
                return arg(format!("{bad} is not in P_h"));
            }
            s.iter().copied().filter(|&k| k > lo && k <= n).collect()
        }
        None => ps.primes().filter(|&k| k > lo && k <= n).collect(),
    };
    if a0.is_empty() {
        return arg("A_0 has no elements in (n/2, n]");
    }
    let base = w_trick(n, t, override_w)?;
    if 4 * base.m > n {
        return arg(format!("m = {} is too large for n = {n}", base.m));
    }
    let weights: Vec<(u64, f64)> = a0
        .par_iter()
        .map(|&k| Ok((k, (k as f64).ln() / inv.eval_phi_deriv(k as f64, 1)?)))
        .collect::<Result<Vec<_>>>()?;
    let residue_weights: Vec<(u64, f64)> = base
        .residues()
        .into_iter()
        .map(|b| (b, fsum(weights.iter().filter(|(k, _)| k % base.m == b).map(|p| p.1))))
        .collect();
    let (b, _) = residue_weights
        .iter()
        .copied()
        .fold((u64::MAX, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
    let params = base.with_b(b)?;
    let m = params.m;

    let start = (2 * n).div_ceil(m);
    let n_prime = (start..).find(|&x| is_prime_u64(x)).expect("Bertrand");
    if n_prime > 4 * n / m {
        return Err(Error::Numerical { message: "no prime in [2n/m, 4n/m]".into(), lo: start as f64, hi: (4 * n / m) as f64 });
    }
    let scale = params.phi_m() as f64 / (m as f64 * n_prime as f64);
    let mut set = Vec::new();
    let mut mass = Vec::new();
    for &(k, w) in &weights {
        if k % m == b {
            set.push((k - b) / m);
            mass.push(scale * w);
        }
    }
    set.sort_unstable();
    debug_assert!(set.iter().all(|&x| x >= 1 && x <= n_prime / 2));
    let window_mass = fsum(t.primes_in(lo + 1, n).filter(|p| p % m == b).map(|p| scale * (p as f64).ln()));
    Ok(Transference { params, n_prime, set, mass: fsum(mass), window_mass, residue_weights })
}

fn is_prime_u64(x: u64) -> bool {
    if x < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= x {
        if x % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarnavidesRow {
    pub d: u64,
    /// `Σ_a |A' ∩ P_{a,d}|`.
    pub total: u64,
    /// `M |A'|`.
    pub expected: u64,
    /// `#{a : |A' ∩ P_{a,d}| ≥ threshold}`.
    pub good: u64,
    /// `Σ_{good a} |A' ∩ P_{a,d}|`.
    pub good_total: u64,
}

impl VarnavidesRow {
    pub fn identity_holds(&self) -> bool {
        self.total == self.expected
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarnavidesReport {
    pub n: u64,
    pub m: u64,
    pub set_size: u64,
    pub threshold: f64,
    pub rows: Vec<VarnavidesRow>,
    pub good_pairs: u64,
    /// `α N² / (4 C_φ M²)`.
    pub z_lower: f64,
}

impl VarnavidesReport {
    pub fn identities_hold(&self) -> bool {
        self.rows.iter().all(VarnavidesRow::identity_holds)
    }
}

/// Counts `|A' ∩ P_{a,d}|` for `P_{a,d} = {a, a+d, …, a+(M−1)d} ⊆ Z_N` by a
/// sliding window along the orbit of `d`. `threshold = α M / (4 C_φ)`.
pub fn varnavides_count(
    aprime: &[u64],
    n: u64,
    big_m: u64,
    ds: &[u64],
    alpha: f64,
    c_phi: f64,
) -> Result<VarnavidesReport> {
    if big_m > n {
        return arg(format!("M = {big_m} exceeds N = {n}"));
    }
    if big_m < 3 {
        return arg(format!("M = {big_m} must be at least 3"));
    }
    let inside = membership(aprime, n)?;
    let set_size = inside.iter().filter(|&&b| b).count() as u64;
    let threshold = alpha * big_m as f64 / (4.0 * c_phi);
    let rows = ds
        .par_iter()
        .map(|&d| {
            if d % n == 0 || gcd(d % n, n) != 1 {
                return arg(format!("d = {d} must be a unit modulo N = {n}"));
            }
            let d = d % n;
            let at = |k: u64| inside[((k % n) * d % n) as usize] as u64;
            // position k on the orbit is the residue k·d
            let mut window: u64 = (0..big_m).map(at).sum();
            let (mut total, mut good, mut good_total) = (0, 0, 0);
            for k in 0..n {
                total += window;
                if window as f64 >= threshold {
                    good += 1;
                    good_total += window;
                }
                window = window + at(k + big_m) - at(k);
            }
            Ok(VarnavidesRow { d, total, expected: big_m * set_size, good, good_total })
        })
        .collect::<Result<Vec<_>>>()?;
    let good_pairs = rows.iter().map(|r| r.good).sum();
    let nf = n as f64;
    let z_lower = alpha * nf * nf / (4.0 * c_phi * (big_m as f64).powi(2));
    Ok(VarnavidesReport { n, m: big_m, set_size, threshold, rows, good_pairs, z_lower })
}

/// `(26 − 24γ) / (16γ − 15)`, the exponent above which the majorant estimate
/// is proved.
pub fn admissible_r_threshold(gamma: f64) -> f64 {
    (26.0 - 24.0 * gamma) / (16.0 * gamma - 15.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestrictionReport {
    pub n: u64,
    pub r: f64,
    pub grid: usize,
    pub seed: u64,
    pub primes: usize,
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
    /// The ratio for `a_p ≡ 1`.
    pub control_ratio: f64,
    /// Relative change of the unweighted norm when the grid is doubled.
    pub refinement_change: f64,
    pub admissible_threshold: f64,
    pub admissible: bool,
}

fn lr_norm(values: &[Complex64], r: f64) -> f64 {
    let g = values.len() as f64;
    (fsum(values.iter().map(|z| z.norm().powf(r))) / g).powf(1.0 / r)
}

/// The smallest power of two `≥ 8N`.
pub fn default_restriction_grid(n: u64) -> usize {
    (8 * n as usize).next_power_of_two()
}

/// `‖Σ_{p ∈ P_{h,N}} a_p e(pξ)‖_r / ‖Σ_{p ∈ P_{h,N}} e(pξ)‖_r` for `a_p`
/// uniform on the unit circle, norms by Riemann sums on `grid` points.
/// Trial `i` draws from ChaCha8 stream `i` under `seed`.
pub fn restriction_ratio(
    ps: &PsPrimeSet,
    n: u64,
    r: f64,
    trials: usize,
    seed: u64,
    grid: Option<usize>,
) -> Result<RestrictionReport> {
    if !(r > 2.0) {
        return arg(format!("r = {r} must exceed 2"));
    }
    if trials == 0 {
        return arg("need at least one trial");
    }
    if ps.limit() < n {
        return Err(Error::Resource(format!("prime set covers {}, need {n}", ps.limit())));
    }
    let grid = grid.unwrap_or_else(|| default_restriction_grid(n));
    if (grid as u64) < 4 * n {
        return arg(format!("grid {grid} is under 4N = {}", 4 * n));
    }
    let primes: Vec<u64> = ps.primes().filter(|&p| p <= n).collect();
    let series = |coef: &dyn Fn(usize) -> Complex64, g: usize| -> Result<Vec<Complex64>> {
        let mut v = vec![Complex64::new(0.0, 0.0); n as usize + 1];
        for (i, &p) in primes.iter().enumerate() {
            v[p as usize] = coef(i);
        }
        fourier_on_grid(0, &v, g)
    };
    let one = |_: usize| Complex64::new(1.0, 0.0);
    let rhs = lr_norm(&series(&one, grid)?, r);
    let rhs_fine = lr_norm(&series(&one, 2 * grid)?, r);
    let refinement_change = if rhs > 0.0 { (rhs_fine - rhs).abs() / rhs } else { 0.0 };
    let control_ratio = lr_norm(&series(&one, grid)?, r) / rhs;
    let ratios = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let coefs: Vec<Complex64> = (0..primes.len()).map(|_| e(rng.random::<f64>())).collect();
            let lhs = lr_norm(&series(&|j| coefs[j], grid)?, r);
            Ok(lhs / rhs)
        })
        .collect::<Result<Vec<_>>>()?;
    let max_ratio = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let admissible_threshold = admissible_r_threshold(ps.inverse().gamma());
    Ok(RestrictionReport {
        n,
        r,
        grid,
        seed,
        primes: primes.len(),
        ratios,
        max_ratio,
        control_ratio,
        refinement_change,
        admissible_threshold,
        admissible: r > admissible_threshold,
    })
}

/// Ratio of the two norms for explicit coefficients, used for the
/// translation and all-ones checks.
pub fn restriction_ratio_for(ps: &PsPrimeSet, n: u64, r: f64, grid: usize, coef: &dyn Fn(u64) -> Complex64) -> Result<f64> {
    let mut lhs = vec![Complex64::new(0.0, 0.0); n as usize + 1];
    let mut rhs = lhs.clone();
    for p in ps.primes().filter(|&p| p <= n) {
        lhs[p as usize] = coef(p);
        rhs[p as usize] = Complex64::new(1.0, 0.0);
    }
    Ok(lr_norm(&fourier_on_grid(0, &lhs, grid)?, r) / lr_norm(&fourier_on_grid(0, &rhs, grid)?, r))
}

/// `max_{j ≠ 0} |F[λ^h_{b,m,N} − λ_{b,m,N}](j/grid)|` for each `N`.
pub fn fourier_sup_decay(
    inv: &InverseSpec,
    ps: &PsPrimeSet,
    t: &PrimeTable,
    n_list: &[u64],
    params: &WTrickParams,
    grid: usize,
) -> Result<Vec<(u64, f64)>> {
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return arg("N list must be strictly ascending");
    }
    if grid < 2 {
        return arg("grid must have at least two points");
    }
    n_list
        .iter()
        .map(|&n| {
            let lh = build_lambda_h(n, params, inv, ps)?;
            let l = build_lambda(n, params, t)?;
            let diff: Vec<Complex64> =
                lh.weights().iter().zip(l.weights()).map(|(a, b)| Complex64::new(a - b, 0.0)).collect();
            let f = fourier_on_grid(0, &diff, grid)?;
            Ok((n, f[1..].iter().map(|z| z.norm()).fold(0.0, f64::max)))
        })
        .collect()
}

/// `|Λ_3(a_1) − Λ_3(a)| ≤ N^{−1} Σ_ξ |F[a](ξ)|² |F[a](−2ξ)| |F[β](ξ)⁴ F[β](−2ξ)² − 1|`
/// with `a_1 = a * β * β`; both trilinear values by the direct double sum.
pub fn smoothing_chain(a: &WeightedSequence, a1: &WeightedSequence, report: &SpectrumReport) -> Result<ChainStep> {
    let n = a.len();
    if a1.len() != n || report.n != n {
        return arg("a, a_1 and the spectrum report must share N");
    }
    let fa = a.to_cyclic();
    let fa1 = a1.to_cyclic();
    let l_a = trilinear_direct(&fa, &fa, &fa)?;
    let l_a1 = trilinear_direct(&fa1, &fa1, &fa1)?;
    let ta = dft(&fa);
    let tb = dft(&report.beta().to_cyclic());
    let rhs = fsum((0..n as i64).map(|xi| {
        let b = tb.at(xi).powi(4) * tb.at(-2 * xi).powi(2) - 1.0;
        ta.at(xi).norm_sqr() * ta.at(-2 * xi).norm() * b.norm()
    })) / n as f64;
    Ok(ChainStep::new("|L3(a1) - L3(a)| <= smoothing defect", (l_a1 - l_a).norm(), rhs))
}

/// Uniform random subset of `{0, …, n−1}` with each element kept with
/// probability `density`.
pub fn random_subset(rng: &mut ChaCha8Rng, n: u64, density: f64) -> Vec<u64> {
    (0..n).filter(|_| rng.random::<f64>() < density).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_progressions() {
        let r = count_3aps(&[1, 2, 3], 10, ApMode::Integer).unwrap();
        assert_eq!(r.nontrivial, 2);
        assert_eq!(r.nontrivial_fft, 2);
        assert_eq!(r.witness, Some((1, 2, 3)));
        assert_eq!(count_3aps(&[1, 2, 4, 5], 10, ApMode::Integer).unwrap().nontrivial, 0);
        let c = count_3aps(&[0, 1, 2], 5, ApMode::Cyclic).unwrap();
        assert_eq!((c.trilinear, c.size, c.nontrivial, c.nontrivial_fft), (5, 3, 2, 2));
    }

    #[test]
    fn varnavides_full_and_empty() {
        let all: Vec<u64> = (0..11).collect();
        let r = varnavides_count(&all, 11, 4, &[1, 3], 0.5, 2.0).unwrap();
        assert!(r.identities_hold());
        assert_eq!(r.rows[0].total, 44);
        let r = varnavides_count(&[], 11, 4, &[5], 0.5, 2.0).unwrap();
        assert_eq!(r.rows[0].total, 0);
        assert!(varnavides_count(&[], 11, 12, &[5], 0.5, 2.0).is_err());
    }
}
