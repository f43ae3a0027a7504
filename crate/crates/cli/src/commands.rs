use log::info;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use psroth::checks::{all_passed, exact_identity_suite, function_identity_suite};
use psroth::expsums::{error_term_sup, vaughan_decompose, PhaseParams};
use psroth::numeric::{gcd, loglog_slope};
use psroth::roth_harness::{count_3aps, restriction_ratio, transference_build, varnavides_count, ApMode, ApReport, VarnavidesReport};
use psroth::sieve::{count_in_class, enumerate_ps_primes, PrimeSource, Weight};
use psroth::{PrimeTable, PsPrimeSet};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::Run;

fn tables(cfg: &ExperimentConfig, limit: u64) -> Result<(PrimeTable, PsPrimeSet), CliError> {
    let inv = cfg.inverse()?;
    let t = PrimeTable::sieve(limit.max(2) + 1)?;
    let ps = enumerate_ps_primes(&inv, limit, &t)?;
    info!("{} primes of the form floor(h(n)) up to {limit}", ps.len());
    Ok((t, ps))
}

fn sweep_points(cfg: &ExperimentConfig, default: impl FnOnce() -> Vec<u64>) -> Result<Vec<u64>, CliError> {
    let pts = if cfg.n_list.is_empty() { default() } else { cfg.n_list.clone() };
    if pts.is_empty() {
        return Err(CliError::Config("no sweep points".into()));
    }
    Ok(pts)
}

pub fn psgen(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let points = sweep_points(cfg, || {
        let mut v: Vec<u64> = (1..).map(|k| 10u64.pow(k)).take_while(|&x| x < cfg.n).collect();
        v.push(cfg.n);
        v
    })?;
    let top = *points.iter().max().unwrap_or(&cfg.n);
    let limit = top.max(cfg.n);
    let inv = cfg.inverse()?;
    let (_, ps) = tables(cfg, limit)?;
    let mut run = Run::start(cfg, "psgen", "Piatetski-Shapiro prime enumeration and density")?;
    let file = std::fs::File::create(run.path("psprimes.csv"))?;
    ps.write_csv(file)?;

    let mut w = run.csv("density.csv")?;
    w.write_record(["N", "pi_h", "phi_over_log", "ratio"])?;
    for &n in points.iter().filter(|&&n| n >= 2) {
        let count = ps.count_up_to(n);
        let scale = inv.eval_phi(n as f64)? / (n as f64).ln();
        w.serialize((n, count, scale, count as f64 / scale))?;
    }
    w.flush()?;

    if cfg.q > 1 {
        let mut w = run.csv("classes.csv")?;
        w.write_record(["q", "a", "N", "pi_h_in_class"])?;
        for a in (0..cfg.q).filter(|&a| gcd(a, cfg.q) == 1) {
            let c = count_in_class(PrimeSource::Ps(&ps), limit, cfg.q, a, Weight::Unit, Some(&inv))?;
            w.serialize((cfg.q, a, limit, c as u64))?;
        }
        w.flush()?;
    }
    run.finish(cfg)?;
    Ok(())
}

pub fn errsweep(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let points = sweep_points(cfg, || (10..).map(|k| 1u64 << k).take_while(|&x| x <= cfg.n.max(1024)).collect())?;
    let top = *points.last().expect("nonempty");
    let grid = cfg.grid.unwrap_or(4096);
    let inv = cfg.inverse()?;
    let (t, ps) = tables(cfg, top + 1)?;
    let mut run = Run::start(cfg, "errsweep", "weighted vs plain prime exponential sum error sweep")?;
    let mut w = run.csv("errsweep.csv")?;
    w.write_record(["N", "sup_diff", "sup_diff_over_N", "middle_sup", "route_gap", "route_envelope"])?;
    let mut dat = String::from("# N sup_diff sup_diff_over_N\n");
    let mut pts = Vec::new();
    for &n in &points {
        let p = error_term_sup(&inv, &ps, n, cfg.q, cfg.a, &t, grid)?;
        info!("N={n}: sup |difference| = {}", p.sup_diff);
        let normalized = p.sup_diff / n as f64;
        w.serialize((n, p.sup_diff, normalized, p.middle_sup, p.route_gap, p.route_envelope))?;
        dat.push_str(&format!("{n} {} {normalized}\n", p.sup_diff));
        pts.push((n as f64, p.sup_diff));
    }
    w.flush()?;
    run.text("errsweep.dat", &dat)?;
    #[derive(Serialize)]
    struct Fit {
        loglog_slope: Option<f64>,
        grid: usize,
    }
    let slope = if pts.iter().all(|p| p.1 > 0.0) { loglog_slope(&pts) } else { None };
    run.json("fit.json", &Fit { loglog_slope: slope, grid })?;
    run.finish(cfg)?;
    Ok(())
}

pub fn vaughan(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let inv = cfg.inverse()?;
    let p1 = 2 * cfg.p;
    let t = PrimeTable::sieve(p1 + 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut run = Run::start(cfg, "vaughan", "Vaughan decomposition sweep")?;
    let mut w = run.csv("vaughan.csv")?;
    w.write_record([
        "m", "xi", "v", "abs_s1", "abs_s21", "abs_s22", "abs_s3", "direct_re", "direct_im", "residual",
    ])?;
    for m in 1..=cfg.m_max {
        for _ in 0..cfg.trials {
            let xi: f64 = rng.random();
            let pp = PhaseParams::new(xi, m, cfg.a, cfg.q, cfg.p, p1)?;
            let s = vaughan_decompose(&inv, &pp, &t, None)?;
            w.serialize((m, xi, s.v, s.s1.norm(), s.s21.norm(), s.s22.norm(), s.s3.norm(), s.direct.re, s.direct.im, s.residual))?;
        }
    }
    w.flush()?;
    run.finish(cfg)?;
    Ok(())
}

pub fn restrict(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let points = sweep_points(cfg, || vec![cfg.n])?;
    let top = *points.last().expect("nonempty");
    let (_, ps) = tables(cfg, top)?;
    let mut run = Run::start(cfg, "restrict", "restriction ratio ensemble")?;
    let mut w = run.csv("restrict.csv")?;
    w.write_record(["N", "trial", "ratio"])?;
    let mut summary = Vec::new();
    for &n in &points {
        let rep = restriction_ratio(&ps, n, cfg.r, cfg.trials, cfg.seed, cfg.grid)?;
        info!("N={n}: max ratio {}", rep.max_ratio);
        for (i, r) in rep.ratios.iter().enumerate() {
            w.serialize((n, i, r))?;
        }
        summary.push(rep);
    }
    w.flush()?;
    let mut s = run.csv("restrict_summary.csv")?;
    s.write_record([
        "N", "r", "grid", "primes", "max_ratio", "control_ratio", "refinement_change", "admissible_threshold", "admissible",
    ])?;
    for rep in &summary {
        s.serialize((
            rep.n,
            rep.r,
            rep.grid,
            rep.primes,
            rep.max_ratio,
            rep.control_ratio,
            rep.refinement_change,
            rep.admissible_threshold,
            rep.admissible,
        ))?;
    }
    s.flush()?;
    run.finish(cfg)?;
    Ok(())
}

#[derive(Serialize)]
struct TransferenceSummary {
    n: u64,
    m: u64,
    b: u64,
    n_prime: u64,
    set_size: usize,
    mass: f64,
    window_mass: f64,
}

#[derive(Serialize)]
struct RothReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    transference: Option<TransferenceSummary>,
    progressions: ApReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    varnavides: Option<VarnavidesReport>,
}

pub fn roth(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let mut run = Run::start(cfg, "roth", "transference, 3AP count and Varnavides counting")?;
    let report = match &cfg.set {
        Some(set) => {
            let n = cfg.n.max(set.iter().max().map_or(1, |&x| x + 1));
            RothReport { transference: None, progressions: count_3aps(set, n, ApMode::Integer)?, varnavides: None }
        }
        None => {
            let inv = cfg.inverse()?;
            let (t, ps) = tables(cfg, cfg.n)?;
            let tr = transference_build(&inv, &ps, &t, cfg.n, cfg.w, None)?;
            let n_prime = tr.n_prime;
            let progressions = count_3aps(&tr.set, n_prime, ApMode::Integer)?;
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let ds: Vec<u64> = (0..16).map(|_| rng.random_range(1..n_prime)).collect();
            let big_m = cfg.progression_len.clamp(3, n_prime);
            // C_φ = 2 and α chosen so that |A'| = α N / (2 C_φ)
            let c_phi = 2.0;
            let alpha = 2.0 * c_phi * tr.set.len() as f64 / n_prime as f64;
            let varnavides = varnavides_count(&tr.set, n_prime, big_m, &ds, alpha, c_phi)?;
            let mut w = run.csv("transferred_set.csv")?;
            w.write_record(["x"])?;
            for x in &tr.set {
                w.serialize([x])?;
            }
            w.flush()?;
            RothReport {
                transference: Some(TransferenceSummary {
                    n: cfg.n,
                    m: tr.params.m,
                    b: tr.params.b,
                    n_prime,
                    set_size: tr.set.len(),
                    mass: tr.mass,
                    window_mass: tr.window_mass,
                }),
                progressions,
                varnavides: Some(varnavides),
            }
        }
    };
    let mut w = run.csv("roth.csv")?;
    w.write_record(["quantity", "value"])?;
    let ap = &report.progressions;
    w.serialize(("modulus", ap.n.to_string()))?;
    w.serialize(("set_size", ap.size.to_string()))?;
    w.serialize(("nontrivial_3aps", ap.nontrivial.to_string()))?;
    w.serialize(("nontrivial_3aps_fft", ap.nontrivial_fft.to_string()))?;
    let witness = ap.witness.map_or(String::new(), |(x, y, z)| format!("{x} {y} {z}"));
    w.serialize(("witness", witness))?;
    if let Some(v) = &report.varnavides {
        w.serialize(("good_pairs", v.good_pairs.to_string()))?;
        w.serialize(("z_lower", v.z_lower.to_string()))?;
        w.serialize(("counting_identity", v.identities_hold().to_string()))?;
    }
    w.flush()?;
    run.json("roth.json", &report)?;
    run.finish(cfg)?;
    Ok(())
}

pub fn check(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let mut results = exact_identity_suite(cfg.seed)?;
    results.extend(function_identity_suite()?);
    let mut run = Run::start(cfg, "check", "exact invariant suite")?;
    let mut w = run.csv("check.csv")?;
    w.write_record(["name", "passed", "detail"])?;
    for r in &results {
        println!("{} {}: {}", if r.passed { "ok  " } else { "FAIL" }, r.name, r.detail);
        w.serialize((&r.name, r.passed, &r.detail))?;
    }
    w.flush()?;
    run.finish(cfg)?;
    if all_passed(&results) {
        Ok(())
    } else {
        let failed: Vec<_> = results.iter().filter(|r| !r.passed).map(|r| r.name.as_str()).collect();
        Err(CliError::ChecksFailed(failed.join(", ")))
    }
}
