use std::io::{self, Write};

use num_complex::Complex64;
use quadcong::arith::CoeffRing;
use quadcong::characters::DirichletCharacter;
use quadcong::criteria::{
    applicable_mode, atkin_search, hasse_density, hasse_exponent, prime_scan, ramanujan_check, required_scan_precision,
    suitability_check, ScanMode,
};
use quadcong::hecke::t_p2_half;
use quadcong::multiplier::{certify_automorphy, eta_multiplier, UnimodularMatrix};
use quadcong::qexp::{eta_quotient_expansion, EtaQuotient, GradedSeries};
use quadcong::selftest::{run_criterion, CRITERIA};
use quadcong::shimura::shimura_lift;
use quadcong::sl2::{enumerate_gl2, find_sigma, MatFl, RepTuple, SearchMode, Sl2Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::descriptor::{default_ell, Form, FormDescriptor, PrecisionPolicy};
use crate::{Cli, CliError, Command, FamilyArg, FormArgs, ModeArg};

type Res = Result<(), CliError>;

fn input<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

fn emit(v: &impl Serialize) -> Res {
    let mut out = io::stdout().lock();
    serde_json::to_writer(&mut out, v).map_err(input)?;
    writeln!(out).map_err(input)
}

fn say(text: &str) -> Res {
    writeln!(io::stdout().lock(), "{text}").map_err(input)
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str, len: usize) -> Result<Vec<T>, CliError> {
    let v: Vec<T> = s
        .split(',')
        .map(|x| x.trim().parse::<T>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("cannot parse {what} from '{s}'")))?;
    if v.len() != len {
        return Err(CliError::Usage(format!("{what} needs {len} comma-separated values")));
    }
    Ok(v)
}

fn parse_factors(s: &str) -> Result<Vec<(u64, i64)>, CliError> {
    s.split(',')
        .map(|f| {
            let (d, r) = f
                .split_once(':')
                .ok_or_else(|| CliError::Usage(format!("factor '{f}' is not of the form d:r")))?;
            let d = d.trim().parse().map_err(|_| CliError::Usage(format!("bad d in '{f}'")))?;
            let r = r.trim().parse().map_err(|_| CliError::Usage(format!("bad r in '{f}'")))?;
            Ok((d, r))
        })
        .collect()
}

fn load_form(args: &FormArgs) -> Result<Form, CliError> {
    let desc = match (&args.form, args.eta_power) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            serde_json::from_str::<FormDescriptor>(&text).map_err(|e| CliError::Input(format!("descriptor: {e}")))?
        }
        (None, Some(r)) => {
            let mut d = FormDescriptor::eta_power(r, args.ell.unwrap_or_else(|| default_ell(1)), args.m);
            d.theta_attested = args.theta_attested;
            d
        }
        (None, None) => return Err(CliError::Usage("give --form FILE or --eta-power R".into())),
    };
    desc.load()
}

fn expand(form: &Form, auto_prec: i64, ring: &CoeffRing) -> Result<GradedSeries, CliError> {
    let prec = match form.precision {
        PrecisionPolicy::Auto => auto_prec,
        PrecisionPolicy::Fixed { value } => value,
    };
    eta_quotient_expansion(&form.eta, prec, ring, false).map_err(input)
}

fn show(v: &quadcong::arith::RingElement) -> String {
    if v.coords.len() == 1 {
        v.coords[0].to_string()
    } else {
        let c: Vec<String> = v.coords.iter().map(|x| x.to_string()).collect();
        format!("[{}]", c.join(","))
    }
}

fn entries(m: &MatFl) -> [u64; 4] {
    [m.a, m.b, m.c, m.d]
}

pub fn dispatch(cli: &Cli) -> Res {
    let summary = cli.summary;
    match &cli.command {
        Command::EtaExpand {
            factors,
            level,
            prec,
            ell,
            m,
            allow_poles,
        } => {
            let e = EtaQuotient::new(&parse_factors(factors)?, *level).map_err(input)?;
            let ring = match ell {
                Some(l) => CoeffRing::mod_prime_power(*l, *m, 1).map_err(input)?,
                None => CoeffRing::exact(),
            };
            let f = eta_quotient_expansion(&e, *prec, &ring, *allow_poles).map_err(input)?;
            if summary {
                let terms: Vec<String> = f.terms().iter().take(12).map(|(n, v)| format!("{n}:{}", show(v))).collect();
                say(&format!(
                    "ring {ring}, residue {} mod 24, prec {}, {} nonzero terms; first: {}",
                    f.residue(),
                    f.prec(),
                    f.nnz(),
                    terms.join(" ")
                ))
            } else {
                emit(&f.to_json())
            }
        }
        Command::EtaMultiplier { gamma, z } => {
            let g = parse_list::<i64>(gamma, "gamma", 4)?;
            let g = UnimodularMatrix::new(g[0], g[1], g[2], g[3]).map_err(input)?;
            let zz = parse_list::<f64>(z, "z", 2)?;
            let zc = Complex64::new(zz[0], zz[1]);
            let v = eta_multiplier(&g);
            let check = certify_automorphy(&g, zc).map_err(input)?;
            let c = v.to_complex();
            let ok = check.residual < 1e-8;
            if summary {
                say(&format!(
                    "nu_eta = e({}/24); automorphy residual {:.3e} at z = {}{:+}i ({})",
                    v.exponent,
                    check.residual,
                    zz[0],
                    zz[1],
                    if ok { "ok" } else { "FAILED" }
                ))?;
            } else {
                emit(&json!({
                    "gamma": [g.a, g.b, g.c, g.d],
                    "exponent": v.exponent,
                    "value": [c.re, c.im],
                    "automorphy": check,
                }))?;
            }
            if ok {
                Ok(())
            } else {
                Err(CliError::Verification(format!("automorphy residual {}", check.residual)))
            }
        }
        Command::HeckeApply { form, p, prec, reduce } => {
            let form = load_form(form)?;
            let ring = if *reduce {
                form.ctx.residue_ring().map_err(input)?
            } else {
                form.ctx.exact_ring().map_err(input)?
            };
            let f = expand(&form, prec.saturating_mul((p * p) as i64), &ring)?;
            let g = t_p2_half(&f, *p, &form.ctx).map_err(input)?;
            if summary {
                let terms: Vec<String> = g.terms().iter().take(10).map(|(n, v)| format!("{n}:{}", show(v))).collect();
                say(&format!("T_{{{p}^2}}: prec {}, residue {}; first: {}", g.prec(), g.residue(), terms.join(" ")))
            } else {
                emit(&g.to_json())
            }
        }
        Command::ShimuraLift { form, t, n } => {
            let form = load_form(form)?;
            let ring = form.ctx.exact_ring().map_err(input)?;
            let f = expand(&form, (*t as i64).saturating_mul(n * n).max(form.eta.leading()), &ring)?;
            let lift = shimura_lift(&f, &form.ctx, *t, *n).map_err(input)?;
            if summary {
                let cs: Vec<String> = (1..=*n).map(|k| lift.coeff(k).map(|c| show(&c)).unwrap_or_default()).collect();
                say(&format!("S_{t}: b(1..{n}) = {}", cs.join(" ")))
            } else {
                emit(&lift.to_json())
            }
        }
        Command::Suitability { k, ell, level, psi } => {
            let psi = match psi {
                Some(s) => serde_json::from_str::<DirichletCharacter>(s).map_err(|e| CliError::Input(format!("psi: {e}")))?,
                None => DirichletCharacter::trivial(*level),
            };
            let rep = suitability_check(*k, *ell, *level, &psi).map_err(input)?;
            if summary {
                say(&format!(
                    "k = {k}, ell = {ell}, N = {level}: {} (failing conditions {:?}; shortcut {})",
                    if rep.verdict { "suitable" } else { "not suitable" },
                    rep.conditions.failing(),
                    if rep.shortcut_applies { "applies" } else { "does not apply" }
                ))
            } else {
                emit(&json!({ "report": rep, "failing": rep.conditions.failing() }))
            }
        }
        Command::Hasse { ell } => {
            let a = hasse_exponent(*ell).map_err(input)?;
            if summary {
                match a {
                    Some(a) => say(&format!("2^{a} = -2 mod {ell}")),
                    None => say(&format!("-2 is not a power of 2 mod {ell}")),
                }
            } else {
                emit(&json!({ "ell": ell, "holds": a.is_some(), "exponent": a }))
            }
        }
        Command::HasseDensity { x } => {
            let d = hasse_density(*x).map_err(input)?;
            if summary {
                say(&format!(
                    "{} of {} primes 5 <= ell <= {x}: density {:.6} (17/24 = {:.6})",
                    d.satisfying,
                    d.primes,
                    d.density,
                    17.0 / 24.0
                ))
            } else {
                emit(&d)
            }
        }
        Command::ScanCongruences { form, mode, p_max } => scan(form, *mode, *p_max, summary),
        Command::PartitionCheck { ell, nmax } => {
            if ![5u64, 7, 11].contains(ell) {
                return Err(CliError::Input(format!("ell = {ell}: Ramanujan congruences exist only for 5, 7, 11")));
            }
            let rep = ramanujan_check(*ell, *nmax);
            if summary {
                say(&format!("ell = {ell}: {} arguments checked, {} violations", rep.checked, rep.violations.len()))?;
            } else {
                emit(&json!({ "report": rep, "violation_count": rep.violations.len() }))?;
            }
            if rep.violations.is_empty() {
                Ok(())
            } else {
                Err(CliError::Verification(format!("{} violations", rep.violations.len())))
            }
        }
        Command::AtkinSearch {
            ell,
            q_max,
            n_max,
            partition_limit,
        } => {
            let s = atkin_search(*ell, *q_max, *n_max, *partition_limit).map_err(input)?;
            if summary {
                say(&format!("{} candidate triples (Q, beta, eps) for ell = {ell}", s.triples.len()))?;
                for t in &s.triples {
                    say(&format!(
                        "  Q = {:>3}, beta = {:>2}, eps = {}: {} confirmations, {} beyond table",
                        t.q, t.beta, t.epsilon, t.confirmations, t.beyond_limit
                    ))?;
                }
                Ok(())
            } else {
                emit(&s)
            }
        }
        Command::Sl2Sim {
            ell,
            s,
            gamma,
            exhaustive,
            family,
            samples,
        } => sl2_sim(*ell, *s, gamma, *exhaustive, *family, *samples, cli.seed, summary),
        Command::Selftest { only } => {
            let ids: Vec<u8> = match only {
                Some(list) => list
                    .split(',')
                    .map(|x| x.trim().parse::<u8>().map_err(|_| CliError::Usage(format!("bad criterion '{x}'"))))
                    .collect::<Result<_, _>>()?,
                None => CRITERIA.iter().map(|c| c.0).collect(),
            };
            if let Some(bad) = ids.iter().find(|i| !CRITERIA.iter().any(|c| c.0 == **i)) {
                return Err(CliError::Usage(format!("no criterion {bad}")));
            }
            let mut failed = Vec::new();
            for id in ids {
                let o = run_criterion(id, cli.seed);
                if summary {
                    say(&o.line())?;
                } else {
                    emit(&json!({
                        "id": o.id,
                        "name": o.name,
                        "passed": o.passed,
                        "checks_passed": o.checks_passed,
                        "limit_seconds": o.limit_seconds,
                        "detail": o.detail,
                    }))?;
                }
                if !o.passed {
                    failed.push(id);
                }
            }
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::Verification(format!("failing criteria {failed:?}")))
            }
        }
    }
}

fn scan(args: &FormArgs, mode: ModeArg, p_max: u64, summary: bool) -> Res {
    let form = load_form(args)?;
    let ctx = &form.ctx;
    let mode = match mode {
        ModeArg::Thm1 => ScanMode::Thm1,
        ModeArg::Thm2 => ScanMode::Thm2,
        ModeArg::Auto => applicable_mode(ctx)
            .map_err(input)?
            .ok_or_else(|| CliError::Input("neither the suitability nor the Hasse condition holds".into()))?,
    };
    let ring = ctx.residue_ring().map_err(input)?;
    let f = expand(&form, required_scan_precision(ctx, mode, p_max), &ring)?;
    let out = prime_scan(&f, ctx, mode, p_max).map_err(input)?;
    let violations: Vec<u64> = out.soundness_violations().iter().map(|r| r.p).collect();
    if summary {
        say(&format!(
            "{mode:?} scan modulo {}^{} up to p = {p_max} at precision {}",
            out.ell, out.m, out.precision
        ))?;
        for r in &out.reports {
            say(&format!(
                "  p = {:>4}: eigen {:<5} alpha {:>2} (predicted {}) vanishing {:<5} on {} indices{}",
                r.p,
                r.eigen_ok,
                r.alpha_p.map(|a| a.to_string()).unwrap_or_else(|| "-".into()),
                r.predicted_alpha,
                r.vanishing_ok,
                r.n_checked,
                if r.sign_disagreement { " [sign differs from prediction]" } else { "" }
            ))?;
        }
        say(&format!(
            "passing {:?}; indeterminate {:?}; soundness violations {:?}",
            out.passing(),
            out.indeterminate,
            violations
        ))?;
    } else {
        for r in &out.reports {
            emit(r)?;
        }
        emit(&json!({ "summary": {
            "mode": out.mode,
            "ell": out.ell,
            "m": out.m,
            "p_max": out.p_max,
            "precision": out.precision,
            "primes_tested": out.primes_tested,
            "indeterminate": out.indeterminate,
            "passing": out.passing(),
            "soundness_violations": violations,
        }}))?;
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(format!("eigen-congruence without vanishing at {violations:?}")))
    }
}

#[allow(clippy::too_many_arguments)]
fn sl2_sim(ell: u64, s: usize, gamma: &str, exhaustive: bool, family: FamilyArg, samples: u64, seed: u64, summary: bool) -> Res {
    let g = parse_list::<i64>(gamma, "gamma", 4)?;
    let gamma = MatFl::new(ell, g[0], g[1], g[2], g[3]).map_err(input)?;
    if !gamma.is_sl2() {
        return Err(CliError::Input("gamma must have determinant 1".into()));
    }
    if s == 0 {
        return Err(CliError::Usage("s must be positive".into()));
    }
    let reps = if s == 1 {
        RepTuple::full_gl2(ell, vec![1]).map_err(input)?
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pool = enumerate_gl2(ell);
        let mut conj = vec![MatFl::identity(ell)];
        conj.extend((1..s).map(|_| pool[rng.gen_range(0..pool.len())]));
        match family {
            FamilyArg::Twisted => RepTuple::twisted(ell, &conj),
            FamilyArg::Independent => {
                let twists: Vec<bool> = (0..s).map(|i| i % 2 == 1).collect();
                RepTuple::independent(ell, &conj, &twists)
            }
        }
        .map_err(input)?
    };
    let mode = if exhaustive {
        SearchMode::Exhaustive
    } else {
        SearchMode::Random { samples, seed }
    };
    let result = find_sigma(&reps, &gamma, mode);
    let (found, witness) = match &result {
        Ok(w) => (true, Some(w)),
        Err(Sl2Error::NotFound) => (false, None),
        Err(e) => return Err(input(e)),
    };
    let family_name = if s == 1 {
        "full_gl2"
    } else {
        match family {
            FamilyArg::Twisted => "twisted",
            FamilyArg::Independent => "independent",
        }
    };
    if summary {
        match witness {
            Some(w) => {
                let comps: Vec<String> = w
                    .components
                    .iter()
                    .zip(&w.signs)
                    .map(|(m, sg)| format!("{:?} ~ {}gamma", entries(m), if *sg == 1 { "+" } else { "-" }))
                    .collect();
                say(&format!(
                    "witness after {} elements: {}; squares ~ gamma^2: {}",
                    w.examined,
                    comps.join(", "),
                    w.squares_conjugate
                ))?;
            }
            None => say("no witness found")?,
        }
    } else {
        let w: Value = match witness {
            Some(w) => json!({
                "components": w.components.iter().map(entries).collect::<Vec<_>>(),
                "signs": w.signs,
                "squares_conjugate": w.squares_conjugate,
                "examined": w.examined,
            }),
            None => Value::Null,
        };
        emit(&json!({
            "ell": ell,
            "s": s,
            "family": family_name,
            "mode": if exhaustive { "exhaustive" } else { "random" },
            "seed": seed,
            "gamma": entries(&gamma),
            "found": found,
            "witness": w,
        }))?;
    }
    match witness {
        Some(w) if w.squares_conjugate => Ok(()),
        Some(_) => Err(CliError::Verification("witness squares outside the class of gamma^2".into())),
        None => Err(CliError::Verification("no element with all components conjugate to ±gamma".into())),
    }
}
