//! The acceptance suite as a library routine, so the command-line `selftest`
//! and the integration tests share one definition of each criterion.

use std::collections::HashMap;
use std::time::Instant;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{kronecker, primes_up_to, CoeffRing};
use crate::characters::DirichletCharacter;
use crate::criteria::{
    applicable_mode, hasse_density, prime_scan, ramanujan_check, required_scan_precision, weight_conditions, ScanMode,
    MIN_CHECKED,
};
use crate::hecke::{atkin_lehner_sign, epsilon_2_sign, epsilon_3_sign, t_p2_half, FormContext};
use crate::multiplier::random_suite;
use crate::qexp::{eta_expansion, eta_quotient_expansion, partition_numbers, EtaQuotient, GradedSeries};
use crate::shimura::{check_equivariance, shimura_lift};
use crate::sl2::{
    diagonal_generators, enumerate_gl2, enumerate_sl2, find_sigma, is_conjugate, product_surjectivity,
    random_product_generators, MatFl, RepTuple, SearchMode,
};

pub const CRITERIA: [(u8, &str, f64); 10] = [
    (1, "ramanujan congruences", 5.0),
    (2, "partition oracle agreement", 10.0),
    (3, "atkin-lehner sign prediction", 30.0),
    (4, "hecke equivariance of the lift", 120.0),
    (5, "conditional soundness of prime scans", 600.0),
    (6, "hasse density", 60.0),
    (7, "suitability shortcut", 5.0),
    (8, "eta multiplier automorphy", 10.0),
    (9, "sl2 simulation", 300.0),
    (10, "operator identities", 30.0),
];

pub const DEFAULT_SEED: u64 = 20240601;

#[derive(Clone, Debug, Serialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: &'static str,
    /// Every check passed and the wall-clock time stayed under the limit.
    pub passed: bool,
    pub checks_passed: bool,
    pub seconds: f64,
    pub limit_seconds: f64,
    pub detail: String,
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {:>2} {:<38} {:>8.2}s / {:>5.0}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds,
            self.limit_seconds,
            self.detail
        )
    }
}

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn exact() -> CoeffRing {
    CoeffRing::exact()
}

fn eta_power(r: i64, prec: i64, ring: &CoeffRing) -> Result<GradedSeries, String> {
    eta_quotient_expansion(&EtaQuotient::eta_power(r), prec, ring, false).map_err(err)
}

fn ramanujan() -> Check {
    let mut parts = Vec::new();
    for ell in [5u64, 7, 11] {
        let rep = ramanujan_check(ell, 10_000);
        ensure(rep.violations.is_empty() && rep.checked > 0, || {
            format!("ell = {ell}: violations at {:?}", rep.violations)
        })?;
        parts.push(format!("ell={ell}: {} args", rep.checked));
    }
    Ok(parts.join(", "))
}

fn partition_oracle() -> Check {
    let n_max = 20_000usize;
    let inv = EtaQuotient::new(&[(1, -1)], 1).map_err(err)?;
    let f = eta_quotient_expansion(&inv, 24 * n_max as i64 - 1, &exact(), true).map_err(err)?;
    let p = partition_numbers(n_max, None);
    for (n, pn) in p.iter().enumerate() {
        let c = f.coeff(24 * n as i64 - 1).map_err(err)?;
        ensure(&c.coords[0] == pn, || format!("mismatch at n = {n}"))?;
    }
    Ok(format!("n <= {n_max}"))
}

fn atkin_lehner() -> Check {
    let trivial = DirichletCharacter::trivial(1);
    let mut parts = Vec::new();
    for r in [5i64, 7, 11, 13] {
        let ctx = FormContext::eta_power(r, 101, 1).map_err(err)?;
        let f = eta_power(r, r * 16 + 24, &exact())?;
        let lift = shimura_lift(&f, &ctx, r as u64, 4).map_err(err)?;
        let k = ctx.lift_weight();
        let s2 = atkin_lehner_sign(&lift, 2, k).map_err(err)?;
        let s3 = atkin_lehner_sign(&lift, 3, k).map_err(err)?;
        let e2 = epsilon_2_sign(r, &trivial).map_err(err)?;
        let e3 = epsilon_3_sign(r, &trivial).map_err(err)?;
        ensure(s2 == e2 && s3 == e3, || {
            format!("r = {r}: observed ({s2}, {s3}), predicted ({e2}, {e3})")
        })?;
        parts.push(format!("r={r}:({s2},{s3})"));
    }
    Ok(parts.join(" "))
}

fn equivariance() -> Check {
    let primes = [5u64, 7, 11, 13];
    let prec = 20i64;
    let mut count = 0;
    for r in [5i64, 7, 11] {
        let ctx = FormContext::eta_power(r, 101, 1).map_err(err)?;
        let t_top = (r + 24) as u64;
        let full = eta_power(r, t_top as i64 * 169 * prec * prec + 24, &exact())?;
        for t in [r as u64, t_top] {
            for &p in &primes {
                let needed = t as i64 * (p * p) as i64 * prec * prec + 24;
                let f = full.truncate(needed);
                let rep = check_equivariance(&f, &ctx, t, p, prec).map_err(err)?;
                ensure(rep.holds, || format!("r = {r}, t = {t}, p = {p}: first mismatch {:?}", rep.first_mismatch))?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} (r, t, p) cases on n <= {prec}"))
}

fn scans() -> Check {
    let mut parts = Vec::new();
    for (r, ell, forced) in [(5i64, 11u64, Some(ScanMode::Thm2)), (7, 5, Some(ScanMode::Thm2)), (11, 13, None)] {
        let ctx = FormContext::eta_power(r, ell, 1).map_err(err)?;
        let mode = match forced {
            Some(m) => m,
            None => applicable_mode(&ctx).map_err(err)?.ok_or("no applicable mode")?,
        };
        let prec = required_scan_precision(&ctx, mode, 500);
        let ring = ctx.residue_ring().map_err(err)?;
        let f = eta_power(r, prec, &ring)?;
        let out = prime_scan(&f, &ctx, mode, 500).map_err(err)?;
        let bad = out.soundness_violations();
        ensure(bad.is_empty(), || {
            format!("eta^{r} mod {ell}: eigen-congruence without vanishing at {:?}", bad.iter().map(|r| r.p).collect::<Vec<_>>())
        })?;
        ensure(out.reports.iter().filter(|r| r.eigen_ok).all(|r| r.n_checked >= MIN_CHECKED), || {
            "too few indices checked".into()
        })?;
        parts.push(format!("eta^{r}/{ell} {mode:?}: passing {:?}", out.passing()));
    }
    Ok(parts.join("; "))
}

fn density() -> Check {
    let d = hasse_density(1_000_000).map_err(err)?;
    let gap = (d.density - 17.0 / 24.0).abs();
    ensure(gap < 0.01, || format!("density {} is {gap} from 17/24", d.density))?;
    Ok(format!("density {:.5} over {} primes", d.density, d.primes))
}

fn shortcut() -> Check {
    let mut cases = 0;
    for k in (2u64..=20).step_by(2) {
        for ell in primes_up_to(1000).into_iter().filter(|&l| l >= 5 && l + 4 > 5 * k) {
            let (c3, c5, c6) = weight_conditions(k, ell);
            ensure(c3 && c5 && c6, || format!("k = {k}, ell = {ell}: ({c3}, {c5}, {c6})"))?;
            cases += 1;
        }
    }
    Ok(format!("{cases} (k, ell) pairs"))
}

fn automorphy(seed: u64) -> Check {
    let z = Complex64::new(0.1, 1.3);
    let suite = random_suite(200, 50, z, seed).map_err(err)?;
    let worst = suite.iter().map(|(_, c)| c.residual).fold(0.0f64, f64::max);
    ensure(worst < 1e-8, || format!("worst residual {worst:e}"))?;
    Ok(format!("200 matrices, worst residual {worst:.2e}"))
}

/// Conjugacy-class label of every element of `GL₂(F_ℓ)` by orbit enumeration.
fn orbit_labels(ell: u64) -> HashMap<MatFl, usize> {
    let group = enumerate_gl2(ell);
    let mut label = HashMap::new();
    let mut next = 0;
    for x in &group {
        if label.contains_key(x) {
            continue;
        }
        for g in &group {
            label.insert(x.conjugate_by(g), next);
        }
        next += 1;
    }
    label
}

fn sl2_simulation(seed: u64) -> Check {
    let ell = 5;
    let labels = orbit_labels(ell);
    let group = enumerate_gl2(ell);
    let mut pairs = 0u64;
    for x in &group {
        for y in &group {
            ensure(is_conjugate(x, y) == (labels[x] == labels[y]), || format!("{x:?} vs {y:?}"))?;
            pairs += 1;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..100 {
        let gens = random_product_generators(ell, &mut rng).map_err(err)?;
        ensure(product_surjectivity(&gens, ell).map_err(err)?, || format!("random sample {i} not surjective"))?;
    }
    ensure(!product_surjectivity(&diagonal_generators(ell), ell).map_err(err)?, || "diagonal surjective".into())?;

    let c = MatFl::new(ell, 2, 1, 1, 1).map_err(err)?;
    let id = MatFl::identity(ell);
    let twisted = RepTuple::twisted(ell, &[id, c]).map_err(err)?;
    let independent = RepTuple::independent(ell, &[id, c], &[false, true]).map_err(err)?;
    let gammas = enumerate_sl2(ell);
    for reps in [&twisted, &independent] {
        for g in &gammas {
            let w = find_sigma(reps, g, SearchMode::Exhaustive).map_err(|e| format!("{g:?}: {e}"))?;
            let g2 = g.square();
            ensure(w.squares_conjugate && w.components.iter().all(|m| is_conjugate(&m.square(), &g2)), || {
                format!("{g:?}: witness squares outside the class of gamma^2")
            })?;
        }
    }
    Ok(format!(
        "{pairs} conjugacy pairs, 100 surjective samples, {} gammas x 2 families",
        gammas.len()
    ))
}

fn operator_identities() -> Check {
    let ring = exact();
    let top = 24 * 10_000i64;
    let eta_u = eta_expansion(5 * top + 24, &ring).map_err(err)?.apply_u(5).map_err(err)?.truncate(top);
    let sign = kronecker(12, 5) as i64;
    let eta_v = eta_expansion(top / 5 + 24, &ring)
        .map_err(err)?
        .apply_v(5)
        .map_err(err)?
        .truncate(top)
        .scale(&ring.from_i64(sign));
    ensure(eta_u.prec() == top && eta_v.prec() == top, || "precision bookkeeping".into())?;
    ensure(eta_u.first_mismatch(&eta_v).is_none(), || {
        format!("eta|U5 differs at {:?}", eta_u.first_mismatch(&eta_v))
    })?;

    let ctx = FormContext::eta_power(5, 101, 1).map_err(err)?;
    let f = eta_power(5, 25 * 49 * 24 * 60, &ring)?;
    let ab = t_p2_half(&t_p2_half(&f, 5, &ctx).map_err(err)?, 7, &ctx).map_err(err)?;
    let ba = t_p2_half(&t_p2_half(&f, 7, &ctx).map_err(err)?, 5, &ctx).map_err(err)?;
    let shared = ab.prec().min(ba.prec());
    let (ab, ba) = (ab.truncate(shared), ba.truncate(shared));
    ensure(!ab.is_zero() && ab.first_mismatch(&ba).is_none(), || "T25 and T49 do not commute".into())?;

    for m in [5u64, 7, 11, 13] {
        let g = f.truncate(24 * 200);
        let back = g.apply_v(m).map_err(err)?.apply_u(m).map_err(err)?;
        ensure(back.prec() == g.prec() && back.first_mismatch(&g).is_none(), || format!("(F|V{m})|U{m} != F"))?;
    }
    Ok(format!("U5/V5 to index {top}, T25T49 to {shared}, VU for m in 5,7,11,13"))
}

fn run_check(id: u8, seed: u64) -> Check {
    match id {
        1 => ramanujan(),
        2 => partition_oracle(),
        3 => atkin_lehner(),
        4 => equivariance(),
        5 => scans(),
        6 => density(),
        7 => shortcut(),
        8 => automorphy(seed),
        9 => sl2_simulation(seed),
        10 => operator_identities(),
        _ => Err(format!("no criterion {id}")),
    }
}

/// Runs one criterion and times it.
pub fn run_criterion(id: u8, seed: u64) -> CriterionOutcome {
    let (name, limit) = CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .map(|c| (c.1, c.2))
        .unwrap_or(("unknown", 0.0));
    let start = Instant::now();
    let result = run_check(id, seed);
    let seconds = start.elapsed().as_secs_f64();
    let checks_passed = result.is_ok();
    let mut detail = result.unwrap_or_else(|e| e);
    if checks_passed && seconds >= limit {
        detail = format!("over time limit; {detail}");
    }
    CriterionOutcome {
        id,
        name,
        passed: checks_passed && seconds < limit,
        checks_passed,
        seconds,
        limit_seconds: limit,
        detail,
    }
}

pub fn run_all(seed: u64) -> Vec<CriterionOutcome> {
    CRITERIA.iter().map(|c| run_criterion(c.0, seed)).collect()
}
