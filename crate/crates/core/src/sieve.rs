//! Prime sieving, the arithmetic functions Λ, μ, Euler φ, Vaughan coefficient
//! arrays, and Piatetski-Shapiro-type prime sets `{p prime : p = ⌊h(n)⌋}`.

use rayon::prelude::*;
use serde::Serialize;

use crate::dd::DoubleDouble;
use crate::error::{arg, domain, Error, Result};
use crate::hfun::{floor_guard_width, InverseSpec};
use crate::numeric::{gcd, CompensatedSum};

/// Numbers per sieve segment.
pub const SEGMENT: u64 = 1 << 20;
/// Above this limit no smallest-prime-factor table is kept.
pub const SPF_LIMIT: u64 = 1 << 27;
/// Largest sieve limit accepted (the bitset alone takes `limit/8` bytes).
pub const MAX_LIMIT: u64 = 1 << 33;

const WORDS_PER_BLOCK: usize = 512;

/// Primality bitset over `[0, limit]`, plus a smallest-prime-factor table when
/// `limit ≤ SPF_LIMIT`.
#[derive(Debug, Clone)]
pub struct PrimeTable {
    limit: u64,
    bits: Vec<u64>,
    block_counts: Vec<u64>,
    spf: Option<Vec<u32>>,
    small_primes: Vec<u64>,
}

fn simple_sieve(n: u64) -> Vec<u64> {
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn sieve_segment(lo: u64, hi: u64, base: &[u64]) -> Vec<u64> {
    // hi exclusive, lo a multiple of 64
    let len = (hi - lo) as usize;
    let mut words = vec![!0u64; len.div_ceil(64)];
    for &p in base {
        if p * p >= hi {
            break;
        }
        let mut j = (p * p).max(lo.div_ceil(p) * p);
        while j < hi {
            let off = (j - lo) as usize;
            words[off >> 6] &= !(1u64 << (off & 63));
            j += p;
        }
    }
    words
}

impl PrimeTable {
    /// Sieves `[2, limit]`. Segments of [`SEGMENT`] numbers run in parallel.
    pub fn sieve(limit: u64) -> Result<Self> {
        if limit < 2 {
            return arg(format!("sieve limit must be at least 2, got {limit}"));
        }
        if limit > MAX_LIMIT {
            return Err(Error::Resource(format!(
                "sieve limit {limit} exceeds the memory budget ({MAX_LIMIT})"
            )));
        }
        let root = isqrt(limit);
        let base = simple_sieve(root);
        let total = limit + 1;
        let segments = total.div_ceil(SEGMENT);
        let parts: Vec<Vec<u64>> = (0..segments)
            .into_par_iter()
            .map(|s| {
                let lo = s * SEGMENT;
                let hi = (lo + SEGMENT).min(total);
                sieve_segment(lo, hi, &base)
            })
            .collect();
        let mut bits: Vec<u64> = parts.into_iter().flatten().collect();
        bits[0] &= !0b11;
        let tail = (total % 64) as u32;
        if tail != 0 {
            let last = bits.len() - 1;
            bits[last] &= (1u64 << tail) - 1;
        }
        let block_counts = bits
            .chunks(WORDS_PER_BLOCK)
            .scan(0u64, |acc, c| {
                let before = *acc;
                *acc += c.iter().map(|w| w.count_ones() as u64).sum::<u64>();
                Some(before)
            })
            .collect();
        let spf = (limit <= SPF_LIMIT).then(|| build_spf(limit as usize, &base));
        Ok(Self { limit, bits, block_counts, spf, small_primes: base })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn has_spf_table(&self) -> bool {
        self.spf.is_some()
    }

    #[inline]
    pub fn is_prime(&self, n: u64) -> bool {
        n <= self.limit && (self.bits[(n >> 6) as usize] >> (n & 63)) & 1 == 1
    }

    /// `π(x)` for `x ≤ limit`.
    pub fn prime_pi(&self, x: u64) -> u64 {
        let x = x.min(self.limit);
        let word = (x >> 6) as usize;
        let block = word / WORDS_PER_BLOCK;
        let mut count = self.block_counts[block];
        for w in &self.bits[block * WORDS_PER_BLOCK..word] {
            count += w.count_ones() as u64;
        }
        let keep = (x & 63) + 1;
        let mask = if keep == 64 { !0 } else { (1u64 << keep) - 1 };
        count + (self.bits[word] & mask).count_ones() as u64
    }

    pub fn prime_count(&self) -> u64 {
        self.prime_pi(self.limit)
    }

    /// Ascending primes in `[lo, hi]` (clamped to the table).
    pub fn primes_in(&self, lo: u64, hi: u64) -> impl Iterator<Item = u64> + '_ {
        let hi = hi.min(self.limit);
        let first_word = (lo >> 6) as usize;
        let last_word = if lo > hi { 0 } else { (hi >> 6) as usize + 1 };
        (first_word..last_word.max(first_word)).flat_map(move |wi| {
            let mut w = self.bits[wi];
            std::iter::from_fn(move || {
                while w != 0 {
                    let b = w.trailing_zeros() as u64;
                    w &= w - 1;
                    let n = ((wi as u64) << 6) + b;
                    if n >= lo && n <= hi {
                        return Some(n);
                    }
                    if n > hi {
                        return None;
                    }
                }
                None
            })
        })
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.primes_in(2, self.limit)
    }

    fn check_index(&self, n: u64) -> Result<()> {
        if n == 0 {
            return arg("arithmetic functions are defined for n >= 1");
        }
        if n > self.limit {
            return Err(Error::Resource(format!("n={n} exceeds the sieve limit {}", self.limit)));
        }
        Ok(())
    }

    /// Smallest prime factor of `2 ≤ n ≤ limit`.
    pub fn smallest_factor(&self, n: u64) -> u64 {
        if let Some(spf) = &self.spf {
            return spf[n as usize] as u64;
        }
        if self.is_prime(n) {
            return n;
        }
        for &p in &self.small_primes {
            if n % p == 0 {
                return p;
            }
        }
        n
    }

    /// Prime factorization as `(p, exponent)` pairs in ascending order.
    pub fn factorize(&self, n: u64) -> Result<Vec<(u64, u32)>> {
        self.check_index(n)?;
        let mut out = Vec::new();
        let mut m = n;
        while m > 1 {
            let p = self.smallest_factor(m);
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
        Ok(out)
    }

    /// von Mangoldt `Λ(n)`.
    pub fn mangoldt(&self, n: u64) -> Result<f64> {
        self.check_index(n)?;
        if n == 1 {
            return Ok(0.0);
        }
        let p = self.smallest_factor(n);
        let mut m = n;
        while m % p == 0 {
            m /= p;
        }
        Ok(if m == 1 { (p as f64).ln() } else { 0.0 })
    }

    /// Möbius `μ(n)`.
    pub fn mobius(&self, n: u64) -> Result<i8> {
        let f = self.factorize(n)?;
        if f.iter().any(|&(_, e)| e > 1) {
            Ok(0)
        } else if f.len() % 2 == 0 {
            Ok(1)
        } else {
            Ok(-1)
        }
    }

    /// Euler totient `φ(n)`.
    pub fn euler_phi(&self, n: u64) -> Result<u64> {
        Ok(self
            .factorize(n)?
            .into_iter()
            .fold(1, |acc, (p, e)| acc * (p - 1) * p.pow(e - 1)))
    }

    /// `Λ(0..=len)` with `Λ(0) = 0`.
    pub fn mangoldt_table(&self, len: u64) -> Result<Vec<f64>> {
        if len > self.limit {
            return Err(Error::Resource(format!("table length {len} exceeds the sieve limit {}", self.limit)));
        }
        Ok((0..=len)
            .into_par_iter()
            .map(|n| if n == 0 { 0.0 } else { self.mangoldt(n).unwrap_or(0.0) })
            .collect())
    }

    /// `μ(0..=len)` with `μ(0) = 0`.
    pub fn mobius_table(&self, len: u64) -> Result<Vec<i8>> {
        if len > self.limit {
            return Err(Error::Resource(format!("table length {len} exceeds the sieve limit {}", self.limit)));
        }
        Ok((0..=len)
            .into_par_iter()
            .map(|n| if n == 0 { 0 } else { self.mobius(n).unwrap_or(0) })
            .collect())
    }
}

fn build_spf(limit: usize, base: &[u64]) -> Vec<u32> {
    let mut spf = vec![0u32; limit + 1];
    for &p in base {
        let p = p as usize;
        let mut j = p * p;
        while j <= limit {
            if spf[j] == 0 {
                spf[j] = p as u32;
            }
            j += p;
        }
    }
    spf.par_iter_mut().enumerate().for_each(|(i, s)| {
        if *s == 0 {
            *s = i as u32;
        }
    });
    spf
}

/// Convenience wrapper matching the operation name.
pub fn sieve_primes(limit: u64) -> Result<PrimeTable> {
    PrimeTable::sieve(limit)
}

/// `⌊h(n)⌋` with a double-double recomputation when `h(n)` is within rounding
/// distance of an integer.
pub fn floor_h(inv: &InverseSpec, n: u64) -> Result<u64> {
    let h = inv.parent();
    let v = h.eval_h(n as f64)?;
    let k = v.round();
    if (v - k).abs() > floor_guard_width(v) {
        return Ok(v.floor() as u64);
    }
    match h.eval_h_extended(n as f64) {
        Some(ext) => {
            let diff = (ext - DoubleDouble::new(k)).to_f64();
            Ok(if diff >= -1e-25 * k.max(1.0) { k as u64 } else { k as u64 - 1 })
        }
        None => Ok(v.floor() as u64),
    }
}

/// Whether `⌊−φ(p)⌋ − ⌊−φ(p+1)⌋ = 1`, i.e. exactly one integer `n` satisfies
/// `p ≤ h(n) < p + 1`.
pub fn ps_member(inv: &InverseSpec, p: u64) -> Result<bool> {
    Ok(ps_hits(inv, p)? == 1)
}

/// `⌈φ(p+1)⌉ − ⌈φ(p)⌉`, the number of integers `n` with `⌊h(n)⌋ = p`.
pub fn ps_hits(inv: &InverseSpec, p: u64) -> Result<i64> {
    let y0 = inv.y0();
    if (p as f64) < y0.ceil() {
        return domain(format!("p={p} lies below ⌈h(x0)⌉ = {}", y0.ceil()));
    }
    Ok(inv.ceil_phi(p as f64 + 1.0)? - inv.ceil_phi(p as f64)?)
}

/// First integer `p ≥ ⌈h(x0)⌉` with `φ(p+1) − φ(p) < 1/2`, if any below 2^52.
pub fn default_p_min(inv: &InverseSpec) -> Result<Option<u64>> {
    let start = inv.y0().ceil() as u64;
    let gap = |p: u64| -> Result<f64> { Ok(inv.eval_phi(p as f64 + 1.0)? - inv.eval_phi(p as f64)?) };
    if gap(start)? < 0.5 {
        return Ok(Some(start));
    }
    let mut lo = start;
    let mut hi = start.max(2) * 2;
    while gap(hi)? >= 0.5 {
        lo = hi;
        hi *= 2;
        if hi > 1 << 52 {
            return Ok(None);
        }
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if gap(mid)? < 0.5 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

/// Outcome of comparing the floor identity with direct enumeration.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PsValidation {
    pub p_min: Option<u64>,
    /// Primes tested against the identity.
    pub checked: u64,
    /// Primes below `p_min` where the identity and enumeration disagree (logged, expected).
    pub small_p_disagreements: Vec<u64>,
    /// Primes at or above `p_min` where they disagree (should never happen).
    pub mismatches: Vec<u64>,
}

/// Members of `P_h` up to a limit, each with a witness `n`, `p = ⌊h(n)⌋`.
#[derive(Debug, Clone)]
pub struct PsPrimeSet {
    inverse: InverseSpec,
    limit: u64,
    members: Vec<(u64, u64)>,
    pub validation: PsValidation,
}

impl PsPrimeSet {
    pub fn inverse(&self) -> &InverseSpec {
        &self.inverse
    }
    pub fn limit(&self) -> u64 {
        self.limit
    }
    /// `(witness n, p)` pairs, ascending in `p`.
    pub fn members(&self) -> &[(u64, u64)] {
        &self.members
    }
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.members.iter().map(|&(_, p)| p)
    }
    pub fn len(&self) -> usize {
        self.members.len()
    }
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
    pub fn contains(&self, p: u64) -> bool {
        self.members.binary_search_by_key(&p, |&(_, q)| q).is_ok()
    }
    /// `π_h(x)` for `x ≤ limit`.
    pub fn count_up_to(&self, x: u64) -> usize {
        self.members.partition_point(|&(_, p)| p <= x)
    }

    /// Writes `n_witness,p` rows.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["n_witness", "p"])?;
        for &(n, p) in &self.members {
            wr.write_record([n.to_string(), p.to_string()])?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Enumerates `⌊h(n)⌋ ≤ limit` for integers `n ≥ x0`, keeps the prime floors,
/// then checks every prime in range against the floor identity.
pub fn enumerate_ps_primes(inv: &InverseSpec, limit: u64, t: &PrimeTable) -> Result<PsPrimeSet> {
    if t.limit() < limit {
        return Err(Error::Resource(format!(
            "prime table limit {} is below the requested {limit}",
            t.limit()
        )));
    }
    let h = inv.parent();
    let n_start = h.x0().ceil() as u64;
    let y0 = inv.y0();
    let mut members = Vec::new();
    let mut validation = PsValidation::default();
    if (limit as f64) >= y0 {
        let n_end = inv.eval_phi(limit as f64 + 1.0)?.ceil() as u64 + 1;
        let floors: Vec<(u64, u64)> = (n_start..=n_end)
            .into_par_iter()
            .map(|n| floor_h(inv, n).map(|p| (n, p)))
            .collect::<Result<Vec<_>>>()?;
        for (n, p) in floors {
            if p > limit {
                break;
            }
            if t.is_prime(p) && members.last().map_or(true, |&(_, q)| q != p) {
                members.push((n, p));
            }
        }
        validation = validate(inv, limit, t, &members)?;
        for &p in &validation.small_p_disagreements {
            log::debug!("floor identity disagrees with enumeration below p_min at p={p}");
        }
        if !validation.mismatches.is_empty() {
            log::warn!(
                "floor identity disagrees with enumeration above p_min at {} primes",
                validation.mismatches.len()
            );
        }
    }
    Ok(PsPrimeSet { inverse: inv.clone(), limit, members, validation })
}

fn validate(inv: &InverseSpec, limit: u64, t: &PrimeTable, members: &[(u64, u64)]) -> Result<PsValidation> {
    let p_min = default_p_min(inv)?;
    let lo = inv.y0().ceil() as u64;
    let primes: Vec<u64> = t.primes_in(lo, limit).collect();
    let verdicts: Vec<(u64, bool)> = primes
        .par_iter()
        .map(|&p| ps_member(inv, p).map(|m| (p, m)))
        .collect::<Result<Vec<_>>>()?;
    let mut v = PsValidation { p_min, checked: verdicts.len() as u64, ..Default::default() };
    for (p, by_identity) in verdicts {
        let by_enumeration = members.binary_search_by_key(&p, |&(_, q)| q).is_ok();
        if by_identity != by_enumeration {
            if p_min.is_some_and(|m| p >= m) {
                v.mismatches.push(p);
            } else {
                v.small_p_disagreements.push(p);
            }
        }
    }
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Weight {
    Unit,
    Log,
    /// `log p / φ'(p)`.
    LogOverPhiPrime,
}

/// Prime sources accepted by [`count_in_class`].
#[derive(Clone, Copy)]
pub enum PrimeSource<'a> {
    Table(&'a PrimeTable),
    Ps(&'a PsPrimeSet),
}

/// `Σ_{p ≤ N, p ≡ a (q)} w(p)` over the chosen set. The `LogOverPhiPrime`
/// weight on a plain table needs `inv`.
pub fn count_in_class(
    source: PrimeSource<'_>,
    n: u64,
    q: u64,
    a: u64,
    weight: Weight,
    inv: Option<&InverseSpec>,
) -> Result<f64> {
    if q == 0 || a >= q {
        return arg(format!("residue class needs 0 <= a < q, got a={a}, q={q}"));
    }
    if gcd(a, q) != 1 {
        return arg(format!("gcd(a, q) = gcd({a}, {q}) must be 1"));
    }
    let primes: Vec<u64> = match source {
        PrimeSource::Table(t) => {
            if n > t.limit() {
                return Err(Error::Resource(format!("N={n} exceeds the sieve limit {}", t.limit())));
            }
            t.primes_in(2, n).filter(|p| p % q == a).collect()
        }
        PrimeSource::Ps(s) => s.primes().take_while(|&p| p <= n).filter(|p| p % q == a).collect(),
    };
    let inv = match (source, inv) {
        (_, Some(i)) => Some(i),
        (PrimeSource::Ps(s), None) => Some(s.inverse()),
        _ => None,
    };
    let weights: Vec<f64> = match weight {
        Weight::Unit => return Ok(primes.len() as f64),
        Weight::Log => primes.iter().map(|&p| (p as f64).ln()).collect(),
        Weight::LogOverPhiPrime => {
            let inv = inv.ok_or_else(|| Error::Argument("log/φ' weight needs an inverse function".into()))?;
            primes
                .par_iter()
                .map(|&p| Ok((p as f64).ln() / inv.eval_phi_deriv(p as f64, 1)?))
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(weights.into_iter().collect::<CompensatedSum>().value())
}

/// `Π_{v,w}(l) = Σ_{rs=l, r≤v, s≤w} Λ(r)μ(s)` and `Ξ_w(l) = Σ_{d|l, d>w} μ(d)`
/// for `0 ≤ l ≤ len` (index 0 unused).
pub fn vaughan_coefficients(v: f64, w: f64, len: u64, t: &PrimeTable) -> Result<(Vec<f64>, Vec<i64>)> {
    let lam = t.mangoldt_table(len)?;
    let mu = t.mobius_table(len)?;
    let len = len as usize;
    let mut pi = vec![0.0; len + 1];
    let mut xi = vec![0i64; len + 1];
    let r_max = (v.floor().max(0.0) as usize).min(len);
    let s_max = (w.floor().max(0.0) as usize).min(len);
    for r in 1..=r_max {
        if lam[r] == 0.0 {
            continue;
        }
        for s in 1..=s_max.min(len / r) {
            if mu[s] != 0 {
                pi[r * s] += lam[r] * mu[s] as f64;
            }
        }
    }
    for d in (s_max + 1)..=len {
        if mu[d] == 0 {
            continue;
        }
        let mut l = d;
        while l <= len {
            xi[l] += mu[d] as i64;
            l += d;
        }
    }
    Ok((pi, xi))
}
