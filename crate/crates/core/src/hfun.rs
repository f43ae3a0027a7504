//! Regularly varying functions `h(x) = C_h x^c ℓ_h(x)` with `ℓ_h = exp ∫ ϑ(t)/t dt`,
//! their inverses `φ`, and the correction functions `θ_i`, `σ`, `τ`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dd::DoubleDouble;
use crate::error::{arg, domain, Error, Result};
use crate::quad;

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A user supplied perturbation `ϑ` with its first two derivatives.
#[derive(Clone)]
pub struct CustomPerturbation {
    pub vtheta: RealFn,
    pub vtheta_d1: RealFn,
    pub vtheta_d2: RealFn,
}

#[derive(Clone)]
pub enum Kind {
    /// `ϑ ≡ 0`, so `h = C_h x^c`.
    PurePower,
    /// `h = C_h x^c log^A x`, `ϑ = A / log x`.
    PowerLog { a: f64 },
    /// `h = C_h x^c exp(A log^B x)`, `ϑ = A B log^{B-1} x`.
    PowerExpLog { a: f64, b: f64 },
    /// `h = C_h x l_m(x)` with `l_1 = log`, `l_{k+1} = log l_k`.
    IteratedLog { m: u32 },
    /// `ℓ_h` obtained by quadrature of `ϑ(t)/t` from `x0`.
    Custom(CustomPerturbation),
}

impl Kind {
    pub fn tag(&self) -> &'static str {
        match self {
            Kind::PurePower => "pure_power",
            Kind::PowerLog { .. } => "power_log",
            Kind::PowerExpLog { .. } => "power_explog",
            Kind::IteratedLog { .. } => "iterated_log",
            Kind::Custom(_) => "custom",
        }
    }
}

impl fmt::Debug for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::PurePower => write!(f, "PurePower"),
            Kind::PowerLog { a } => write!(f, "PowerLog {{ a: {a} }}"),
            Kind::PowerExpLog { a, b } => write!(f, "PowerExpLog {{ a: {a}, b: {b} }}"),
            Kind::IteratedLog { m } => write!(f, "IteratedLog {{ m: {m} }}"),
            Kind::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// Parameters of the config record. Which ones are read depends on `kind`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KindParams {
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
}

/// Serializable description of a built-in function: `{kind, c, C_h, x0, params}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionRecord {
    pub kind: String,
    pub c: f64,
    #[serde(rename = "C_h", default = "one")]
    pub c_h: f64,
    #[serde(default = "default_x0")]
    pub x0: f64,
    #[serde(default)]
    pub params: KindParams,
}

fn one() -> f64 {
    1.0
}

pub const DEFAULT_X0: f64 = 3.0;

fn default_x0() -> f64 {
    DEFAULT_X0
}

/// A member of the family `F_c`.
#[derive(Clone, Debug)]
pub struct FunctionSpec {
    c: f64,
    c_h: f64,
    x0: f64,
    kind: Kind,
}

fn iterated_logs(x: f64, m: u32) -> Vec<f64> {
    let mut out = Vec::with_capacity(m as usize);
    let mut v = x;
    for _ in 0..m {
        v = v.ln();
        out.push(v);
    }
    out
}

impl FunctionSpec {
    pub fn new(kind: Kind, c: f64, c_h: f64, x0: f64) -> Result<Self> {
        if !(1.0..2.0).contains(&c) {
            return arg(format!("exponent c={c} must lie in [1, 2)"));
        }
        if !(c_h > 0.0 && c_h.is_finite()) {
            return arg(format!("C_h={c_h} must be positive"));
        }
        if !(x0 >= 1.0 && x0.is_finite()) {
            return arg(format!("x0={x0} must be at least 1"));
        }
        match &kind {
            Kind::PowerLog { a } | Kind::PowerExpLog { a, .. } if !a.is_finite() => {
                return arg("parameter A must be finite");
            }
            Kind::PowerLog { .. } if x0 <= 1.0 => {
                return arg("power_log needs x0 > 1 so that log x0 > 0");
            }
            Kind::PowerExpLog { b, .. } if !(*b > 0.0 && *b < 1.0) => {
                return arg(format!("power_explog needs B in (0, 1), got {b}"));
            }
            Kind::PowerExpLog { .. } if x0 <= 1.0 => {
                return arg("power_explog needs x0 > 1");
            }
            Kind::IteratedLog { m } => {
                if *m == 0 {
                    return arg("iterated_log needs m >= 1");
                }
                if c != 1.0 {
                    return arg("iterated_log is defined for c = 1 only");
                }
                let logs = iterated_logs(x0, *m);
                if !(logs.last().copied().unwrap_or(0.0) > 0.0) {
                    return arg(format!("l_{m}(x0) must be positive; raise x0 above {x0}"));
                }
            }
            _ => {}
        }
        Ok(Self { c, c_h, x0, kind })
    }

    /// `h(x) = C_h x^c`.
    pub fn pure_power(c: f64) -> Result<Self> {
        Self::new(Kind::PurePower, c, 1.0, 1.0)
    }

    pub fn from_record(rec: &FunctionRecord) -> Result<Self> {
        let p = &rec.params;
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| Error::Argument(format!("kind {} needs parameter {name}", rec.kind)))
        };
        let kind = match rec.kind.as_str() {
            "pure_power" => Kind::PurePower,
            "power_log" => Kind::PowerLog { a: need(p.a.or(p.c), "A (or C)")? },
            "power_explog" => Kind::PowerExpLog {
                a: need(p.a.or(p.c), "A (or C)")?,
                b: need(p.b, "B")?,
            },
            "iterated_log" => Kind::IteratedLog {
                m: p.m.ok_or_else(|| Error::Argument("kind iterated_log needs parameter m".into()))?,
            },
            other => return arg(format!("unknown function kind {other:?}")),
        };
        Self::new(kind, rec.c, rec.c_h, rec.x0)
    }

    /// The config record for a built-in kind; `None` for custom perturbations.
    pub fn to_record(&self) -> Option<FunctionRecord> {
        let params = match self.kind {
            Kind::PurePower => KindParams::default(),
            Kind::PowerLog { a } => KindParams { a: Some(a), ..Default::default() },
            Kind::PowerExpLog { a, b } => KindParams { a: Some(a), b: Some(b), ..Default::default() },
            Kind::IteratedLog { m } => KindParams { m: Some(m), ..Default::default() },
            Kind::Custom(_) => return None,
        };
        Some(FunctionRecord {
            kind: self.kind.tag().to_string(),
            c: self.c,
            c_h: self.c_h,
            x0: self.x0,
            params,
        })
    }

    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn gamma(&self) -> f64 {
        1.0 / self.c
    }
    pub fn c_h(&self) -> f64 {
        self.c_h
    }
    pub fn x0(&self) -> f64 {
        self.x0
    }
    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    /// True for `h(x) = C_h x`, where `φ` is linear and every integer is hit.
    pub fn is_identity_like(&self) -> bool {
        self.c == 1.0 && matches!(self.kind, Kind::PurePower)
    }

    pub fn vtheta(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::PurePower => 0.0,
            Kind::PowerLog { a } => a / x.ln(),
            Kind::PowerExpLog { a, b } => a * b * x.ln().powf(b - 1.0),
            Kind::IteratedLog { m } => 1.0 / iterated_logs(x, *m).iter().product::<f64>(),
            Kind::Custom(p) => (p.vtheta)(x),
        }
    }

    pub fn vtheta_d1(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::PurePower => 0.0,
            Kind::PowerLog { a } => {
                let u = x.ln();
                -a / (x * u * u)
            }
            Kind::PowerExpLog { a, b } => a * b * (b - 1.0) * x.ln().powf(b - 2.0) / x,
            Kind::IteratedLog { m } => {
                let logs = iterated_logs(x, *m);
                let (vt, s) = iterated_parts(&logs);
                -vt * s / x
            }
            Kind::Custom(p) => (p.vtheta_d1)(x),
        }
    }

    pub fn vtheta_d2(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::PurePower => 0.0,
            Kind::PowerLog { a } => {
                let u = x.ln();
                a * (u + 2.0) / (x * x * u * u * u)
            }
            Kind::PowerExpLog { a, b } => {
                let u = x.ln();
                a * b * (b - 1.0) * ((b - 2.0) * u.powf(b - 3.0) - u.powf(b - 2.0)) / (x * x)
            }
            Kind::IteratedLog { m } => {
                let logs = iterated_logs(x, *m);
                let (vt, s) = iterated_parts(&logs);
                // S' = -(1/x) Σ_k (1/P_k) Σ_{j≤k} 1/P_j with P_k = l_1⋯l_k
                let mut prod = 1.0;
                let mut inner = 0.0;
                let mut ds = 0.0;
                for l in &logs {
                    prod *= l;
                    inner += 1.0 / prod;
                    ds += inner / prod;
                }
                let ds = -ds / x;
                let vt1 = -vt * s / x;
                -(vt1 * s + vt * ds) / x + vt * s / (x * x)
            }
            Kind::Custom(p) => (p.vtheta_d2)(x),
        }
    }

    /// `log ℓ_h(x)`; closed form for built-in kinds (natural normalization,
    /// e.g. `ℓ_h = log^A x`), quadrature from `x0` otherwise.
    pub fn log_ell(&self, x: f64) -> Result<f64> {
        Ok(match &self.kind {
            Kind::PurePower => 0.0,
            Kind::PowerLog { a } => a * x.ln().ln(),
            Kind::PowerExpLog { a, b } => a * x.ln().powf(*b),
            Kind::IteratedLog { m } => iterated_logs(x, *m).last().copied().unwrap_or(x).ln(),
            Kind::Custom(p) => {
                let f = p.vtheta.clone();
                quad::integrate(move |u: f64| f(u.exp()), self.x0.ln(), x.ln(), 1e-12)?.0
            }
        })
    }

    /// `exp ∫_{x0}^{x} ϑ(t)/t dt` by adaptive quadrature, for any kind.
    pub fn log_ell_quadrature(&self, x: f64) -> Result<f64> {
        quad::integrate(|u: f64| self.vtheta(u.exp()), self.x0.ln(), x.ln(), 1e-12).map(|r| r.0)
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        if x >= self.x0 {
            Ok(())
        } else {
            domain(format!("x={x} lies below x0={}", self.x0))
        }
    }

    pub fn eval_h(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        self.h_unchecked(x)
    }

    fn h_unchecked(&self, x: f64) -> Result<f64> {
        let base = self.c_h * x.powf(self.c);
        Ok(match &self.kind {
            Kind::PurePower => base,
            Kind::PowerLog { a } => base * x.ln().powf(*a),
            Kind::PowerExpLog { a, b } => base * (a * x.ln().powf(*b)).exp(),
            Kind::IteratedLog { m } => base * iterated_logs(x, *m).last().copied().unwrap_or(1.0),
            Kind::Custom(_) => base * self.log_ell(x)?.exp(),
        })
    }

    /// `h(x)` in double-double precision; `None` for custom kinds.
    pub fn eval_h_extended(&self, x: f64) -> Option<DoubleDouble> {
        let xd = DoubleDouble::new(x);
        let lx = xd.ln();
        let base = (DoubleDouble::new(self.c) * lx).exp().mul_f64(self.c_h);
        let ell = match &self.kind {
            Kind::PurePower => {
                if self.c == 1.0 {
                    return Some(xd.mul_f64(self.c_h));
                }
                DoubleDouble::ONE
            }
            Kind::PowerLog { a } => (lx.ln().mul_f64(*a)).exp(),
            Kind::PowerExpLog { a, b } => ((lx.ln().mul_f64(*b)).exp().mul_f64(*a)).exp(),
            Kind::IteratedLog { m } => {
                let mut v = lx;
                for _ in 1..*m {
                    v = v.ln();
                }
                v
            }
            Kind::Custom(_) => return None,
        };
        Some(base * ell)
    }

    /// `θ_i(x)` for `i ∈ {1,2,3}` with `θ_1 = ϑ` and
    /// `θ_i = θ_{i−1} + x θ'_{i−1} / (α_{i−1} + θ_{i−1})`, `α_i = c − i + 1`.
    pub fn theta(&self, i: u32, x: f64) -> Result<f64> {
        let t = self.thetas(x);
        match i {
            1 => Ok(t.t1),
            2 => Ok(t.t2),
            3 => Ok(t.t2 + x * t.t2_d1 / (self.c - 1.0 + t.t2)),
            _ => arg(format!("θ_i is available for i in {{1,2,3}}, got {i}")),
        }
    }

    fn thetas(&self, x: f64) -> Thetas {
        let t1 = self.vtheta(x);
        let t1_d1 = self.vtheta_d1(x);
        let t1_d2 = self.vtheta_d2(x);
        let d = self.c + t1;
        let t2 = t1 + x * t1_d1 / d;
        let t2_d1 = t1_d1 + ((t1_d1 + x * t1_d2) * d - x * t1_d1 * t1_d1) / (d * d);
        Thetas { t1, t2, t2_d1 }
    }

    /// `h^{(i)}(x)` for `i ∈ {1,2,3}` via `x h^{(i)} = h^{(i−1)} (α_i + θ_i)`.
    ///
    /// The third derivative is assembled as
    /// `h''' = (h''(α_3 + θ_2) + h' θ_2') / x`, which avoids dividing by
    /// `α_2 + θ_2` (close to zero when `c = 1`).
    pub fn eval_h_deriv(&self, x: f64, i: u32) -> Result<f64> {
        if !(1..=3).contains(&i) {
            return arg(format!("derivative order must be 1, 2 or 3, got {i}"));
        }
        self.check_domain(x)?;
        let h = self.h_unchecked(x)?;
        let d = self.derivs_from(h, x);
        Ok(d[i as usize - 1])
    }

    /// `[h', h'', h''']` at `x`.
    pub fn derivatives(&self, x: f64) -> Result<[f64; 3]> {
        self.check_domain(x)?;
        let h = self.h_unchecked(x)?;
        Ok(self.derivs_from(h, x))
    }

    fn derivs_from(&self, h: f64, x: f64) -> [f64; 3] {
        let t = self.thetas(x);
        let c = self.c;
        let h1 = h * (c + t.t1) / x;
        let h2 = h1 * (c - 1.0 + t.t2) / x;
        let h3 = (h2 * (c - 2.0 + t.t2) + h1 * t.t2_d1) / x;
        [h1, h2, h3]
    }

    /// Samples the defining properties of `F_c` on the grid `x0·2^k`, `k < 48`.
    pub fn check_family(&self) -> FamilyReport {
        let mut violations = Vec::new();
        let grid: Vec<f64> = (0..48).map(|k| self.x0 * 2f64.powi(k)).collect();
        for &x in &grid {
            match self.derivatives(x) {
                Ok([d1, d2, _]) => {
                    if !(d1 > 0.0) {
                        violations.push(format!("h'({x:e}) = {d1:e} is not positive"));
                    }
                    if !(d2 > 0.0) {
                        violations.push(format!("h''({x:e}) = {d2:e} is not positive"));
                    }
                }
                Err(e) => violations.push(format!("derivatives at {x:e}: {e}")),
            }
        }
        let tail: Vec<f64> = grid.iter().rev().take(4).copied().collect();
        let head = grid[grid.len() / 2];
        let tail_sizes = |f: &dyn Fn(f64) -> f64| -> (f64, f64) {
            (f(head).abs(), tail.iter().map(|&x| f(x).abs()).fold(0.0, f64::max))
        };
        if self.c > 1.0 {
            let checks: [(&str, Box<dyn Fn(f64) -> f64 + '_>); 3] = [
                ("ϑ", Box::new(|x| self.vtheta(x))),
                ("xϑ'", Box::new(|x| x * self.vtheta_d1(x))),
                ("x²ϑ''", Box::new(|x| x * x * self.vtheta_d2(x))),
            ];
            for (name, f) in checks.iter() {
                let (mid, end) = tail_sizes(f.as_ref());
                if end > mid && end > 1e-12 {
                    violations.push(format!("{name} does not decay along the doubling grid"));
                }
            }
        } else {
            let mut prev = f64::INFINITY;
            let mut prev_ratio = f64::INFINITY;
            for &x in &grid {
                let v = self.vtheta(x);
                if !(v > 0.0) {
                    violations.push(format!("ϑ({x:e}) = {v:e} is not positive"));
                    break;
                }
                if v > prev {
                    violations.push(format!("ϑ increases at {x:e}"));
                    break;
                }
                prev = v;
                let ratio = x / self.h_unchecked(x).unwrap_or(f64::NAN);
                if !(ratio < prev_ratio) {
                    violations.push(format!("x/h(x) does not decrease at {x:e}"));
                    break;
                }
                prev_ratio = ratio;
            }
        }
        FamilyReport { violations }
    }
}

struct Thetas {
    t1: f64,
    t2: f64,
    t2_d1: f64,
}

/// `ϑ = 1/(l_1⋯l_m)` and `S = Σ_k 1/(l_1⋯l_k)`, so that `ϑ' = −ϑS/x`.
fn iterated_parts(logs: &[f64]) -> (f64, f64) {
    let mut prod = 1.0;
    let mut s = 0.0;
    for l in logs {
        prod *= l;
        s += 1.0 / prod;
    }
    (1.0 / prod, s)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyReport {
    pub violations: Vec<String>,
}

impl FamilyReport {
    pub fn is_member(&self) -> bool {
        self.violations.is_empty()
    }
}

/// The inverse `φ : [h(x0), ∞) → [x0, ∞)` of a [`FunctionSpec`].
#[derive(Clone, Debug)]
pub struct InverseSpec {
    parent: FunctionSpec,
    y0: f64,
    pub newton_tol: f64,
    pub max_iter: u32,
}

/// Width of the band around an integer inside which `⌈φ(y)⌉` is decided in
/// double-double precision.
pub fn floor_guard_width(phi: f64) -> f64 {
    (1e3 * f64::EPSILON * phi.abs()).max(1e-9)
}

impl InverseSpec {
    pub fn new(parent: FunctionSpec) -> Result<Self> {
        let y0 = parent.eval_h(parent.x0)?;
        Ok(Self { parent, y0, newton_tol: 1e-12, max_iter: 200 })
    }

    pub fn parent(&self) -> &FunctionSpec {
        &self.parent
    }
    pub fn y0(&self) -> f64 {
        self.y0
    }
    pub fn gamma(&self) -> f64 {
        self.parent.gamma()
    }

    /// `φ(y)` by safeguarded Newton iteration inside a bracket found by doubling.
    pub fn eval_phi(&self, y: f64) -> Result<f64> {
        if !(y >= self.y0) {
            return domain(format!("y={y} lies below y0=h(x0)={}", self.y0));
        }
        let h = &self.parent;
        if h.is_identity_like() {
            return Ok((y / h.c_h).max(h.x0));
        }
        let x0 = h.x0;
        // Bracket around the pure-power guess, widened by doubling/halving.
        let guess = (y / h.c_h).powf(1.0 / h.c).max(x0);
        let hv = |x: f64| h.h_unchecked(x);
        let mut lo = guess;
        let mut hi = guess;
        let mut guard = 0;
        while hv(lo)? > y {
            hi = lo;
            lo = (lo * 0.5).max(x0);
            guard += 1;
            if lo == x0 || guard > 2100 {
                break;
            }
        }
        guard = 0;
        while hv(hi)? < y {
            lo = hi;
            hi *= 2.0;
            guard += 1;
            if guard > 2100 || !hi.is_finite() {
                return Err(Error::Numerical { message: format!("could not bracket φ({y})"), lo, hi });
            }
        }
        let mut x = guess.clamp(lo, hi);
        let mut stalled = 0;
        let mut last_resid = f64::INFINITY;
        for _ in 0..self.max_iter {
            let fx = hv(x)? - y;
            if fx == 0.0 {
                return Ok(x);
            }
            if fx < 0.0 {
                lo = lo.max(x);
            } else {
                hi = hi.min(x);
            }
            let resid = fx.abs();
            if resid <= self.newton_tol * y * 1e-3 || hi - lo <= 4.0 * f64::EPSILON * x {
                return Ok(x);
            }
            if resid > 0.5 * last_resid {
                stalled += 1;
            }
            last_resid = resid;
            let d1 = h.derivs_from(fx + y, x)[0];
            let newton = x - fx / d1;
            if (newton - x).abs() <= 2.0 * f64::EPSILON * x && newton >= lo && newton <= hi {
                return Ok(newton);
            }
            x = if stalled < 50 && newton > lo && newton < hi && newton.is_finite() {
                newton
            } else {
                0.5 * (lo + hi)
            };
        }
        let fx = hv(x)? - y;
        if fx.abs() <= self.newton_tol * y {
            return Ok(x);
        }
        Err(Error::Numerical {
            message: format!("φ({y}) did not converge in {} iterations", self.max_iter),
            lo,
            hi,
        })
    }

    /// `φ^{(i)}(y)` for `i ∈ {1,2,3}` by the inverse function rule.
    pub fn eval_phi_deriv(&self, y: f64, i: u32) -> Result<f64> {
        if !(1..=3).contains(&i) {
            return arg(format!("derivative order must be 1, 2 or 3, got {i}"));
        }
        let x = self.eval_phi(y)?;
        Ok(self.phi_derivs_at(x)?[i as usize - 1])
    }

    /// `[φ'(y), φ''(y), φ'''(y)]` given `x = φ(y)`.
    pub fn phi_derivs_at(&self, x: f64) -> Result<[f64; 3]> {
        let [h1, h2, h3] = self.parent.derivatives(x)?;
        let p1 = 1.0 / h1;
        let p2 = -h2 * p1 * p1 * p1;
        let p3 = -h3 * p1.powi(4) + 3.0 * h2 * h2 * p1.powi(5);
        Ok([p1, p2, p3])
    }

    /// `θ(y) = 1/(c + ϑ(φ(y))) − γ`, so that `yφ'(y) = φ(y)(γ + θ(y))`.
    pub fn theta(&self, y: f64) -> Result<f64> {
        let x = self.eval_phi(y)?;
        Ok(1.0 / (self.parent.c + self.parent.vtheta(x)) - self.gamma())
    }

    /// `θ_2(y) = θ(y) − ϑ'(φ)φ / (c + ϑ(φ))²`, so that `yφ'' = φ'(γ − 1 + θ_2)`.
    pub fn theta2(&self, y: f64) -> Result<f64> {
        let x = self.eval_phi(y)?;
        Ok(self.theta2_at(x))
    }

    fn theta2_at(&self, x: f64) -> f64 {
        let h = &self.parent;
        let d = h.c + h.vtheta(x);
        1.0 / d - h.gamma() - h.vtheta_d1(x) * x / (d * d)
    }

    /// `(σ(y), τ(y))` with `yφ''(y) = φ'(y) σ(y) τ(y)`. For `c > 1`, `σ ≡ 1`.
    pub fn sigma_tau(&self, y: f64) -> Result<(f64, f64)> {
        let x = self.eval_phi(y)?;
        let h = &self.parent;
        if h.c > 1.0 {
            return Ok((1.0, self.theta2_at(x) + h.gamma() - 1.0));
        }
        let v = h.vtheta(x);
        let tau = -(1.0 / (1.0 + v) + h.vtheta_d1(x) * x / (v * (1.0 + v) * (1.0 + v)));
        Ok((v, tau))
    }

    /// `σ(y)`: `ϑ(φ(y))` when `c = 1`, else `1`.
    pub fn sigma(&self, y: f64) -> Result<f64> {
        if self.parent.c > 1.0 {
            Ok(1.0)
        } else {
            Ok(self.parent.vtheta(self.eval_phi(y)?))
        }
    }

    /// `⌈φ(y)⌉`, deciding near-integer cases by evaluating `h` in double-double
    /// at the candidate integer: `⌈φ(y)⌉ ≤ k` iff `h(k) ≥ y`.
    pub fn ceil_phi(&self, y: f64) -> Result<i64> {
        let x = self.eval_phi(y)?;
        let k = x.round();
        if (x - k).abs() > floor_guard_width(x) {
            return Ok(x.ceil() as i64);
        }
        if k < self.parent.x0 {
            return Ok(k as i64 + 1);
        }
        let hk_ge_y = match self.parent.eval_h_extended(k) {
            Some(hk) => {
                let diff = (hk - DoubleDouble::new(y)).to_f64();
                diff >= -1e-25 * y
            }
            None => self.parent.h_unchecked(k)? >= y,
        };
        Ok(if hk_ge_y { k as i64 } else { k as i64 + 1 })
    }

    /// Largest `K` with `φ(2y) ≤ K φ(y)` over `y = y0·2^j`, `j < samples`.
    pub fn doubling_constant(&self, samples: u32) -> Result<f64> {
        let mut k: f64 = 0.0;
        for j in 0..samples {
            let y = self.y0 * 2f64.powi(j as i32);
            k = k.max(self.eval_phi(2.0 * y)? / self.eval_phi(y)?);
        }
        Ok(k)
    }

    /// Whether `y ↦ y φ(y)^{−δ}` increases along an ascending grid.
    pub fn is_y_phi_delta_increasing(&self, delta: f64, grid: &[f64]) -> Result<bool> {
        let mut prev = f64::NEG_INFINITY;
        for &y in grid {
            let v = y.ln() - delta * self.eval_phi(y)?.ln();
            if !(v > prev) {
                return Ok(false);
            }
            prev = v;
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn pure_power_values() {
        let h = FunctionSpec::pure_power(1.5).unwrap();
        assert!(rel(h.eval_h(4.0).unwrap(), 8.0) < 1e-15);
        assert!(rel(h.eval_h_deriv(4.0, 1).unwrap(), 3.0) < 1e-15);
        assert!(rel(h.eval_h_deriv(4.0, 2).unwrap(), 0.375) < 1e-15);
        assert!(rel(h.eval_h_deriv(4.0, 3).unwrap(), -0.375 / 8.0) < 1e-14);
        assert!(matches!(h.eval_h_deriv(4.0, 4), Err(Error::Argument(_))));
        assert!(matches!(h.eval_h(0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn x_log_x_at_e() {
        let h = FunctionSpec::new(Kind::PowerLog { a: 1.0 }, 1.0, 1.0, 2.0).unwrap();
        let e = std::f64::consts::E;
        assert!(rel(h.eval_h(e).unwrap(), e) < 1e-15);
    }

    #[test]
    fn inverse_of_pure_power() {
        let inv = InverseSpec::new(FunctionSpec::pure_power(1.5).unwrap()).unwrap();
        assert!(rel(inv.eval_phi(8.0).unwrap(), 4.0) < 1e-14);
        assert!(rel(inv.eval_phi(10.0).unwrap(), 4.641588833612779) < 1e-12);
        assert!(rel(inv.eval_phi_deriv(8.0, 1).unwrap(), 1.0 / 3.0) < 1e-14);
        let ratio = 8.0 * inv.eval_phi_deriv(8.0, 1).unwrap() / inv.eval_phi(8.0).unwrap();
        assert!(rel(ratio, 2.0 / 3.0) < 1e-14);
        assert_eq!(inv.sigma_tau(8.0).unwrap().0, 1.0);
        assert!(matches!(inv.eval_phi(0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn ceil_phi_on_exact_hits() {
        let inv = InverseSpec::new(FunctionSpec::pure_power(1.5).unwrap()).unwrap();
        assert_eq!(inv.ceil_phi(8.0).unwrap(), 4);
        assert_eq!(inv.ceil_phi(27.0).unwrap(), 9);
        assert_eq!(inv.ceil_phi(28.0).unwrap(), 10);
        assert_eq!(inv.ceil_phi(1_000_000.0).unwrap(), 10_000);
        assert_eq!(inv.ceil_phi(1_000_001.0).unwrap(), 10_001);
    }

    #[test]
    fn record_round_trip() {
        let rec = FunctionRecord {
            kind: "power_explog".into(),
            c: 1.05,
            c_h: 2.0,
            x0: 3.0,
            params: KindParams { a: Some(0.5), b: Some(0.5), ..Default::default() },
        };
        let spec = FunctionSpec::from_record(&rec).unwrap();
        assert_eq!(spec.to_record().unwrap(), rec);
        let bad = FunctionRecord { kind: "nope".into(), ..rec };
        assert!(FunctionSpec::from_record(&bad).is_err());
    }

    #[test]
    fn constructor_rejects_bad_parameters() {
        assert!(FunctionSpec::new(Kind::PurePower, 2.0, 1.0, 1.0).is_err());
        assert!(FunctionSpec::new(Kind::PurePower, 1.5, -1.0, 1.0).is_err());
        assert!(FunctionSpec::new(Kind::PowerLog { a: 1.0 }, 1.5, 1.0, 1.0).is_err());
        assert!(FunctionSpec::new(Kind::IteratedLog { m: 3 }, 1.0, 1.0, 3.0).is_err());
        assert!(FunctionSpec::new(Kind::IteratedLog { m: 2 }, 1.0, 1.0, 3.0).is_ok());
    }
}
