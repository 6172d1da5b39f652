//! The Shimura lift `S_t` as a coefficient convolution, its Hecke
//! equivariance, and a search for a lift that is nonzero modulo `ℓ`.

use serde::Serialize;
use thiserror::Error;

use crate::arith::{divisors, is_squarefree, kronecker, CoeffRing, Int, RingElement};
use crate::hecke::{chi_r, t_p2_half, t_p_integer, FormContext, HeckeError};
use crate::par;
use crate::qexp::{GradedSeries, IntegerSeries, QexpError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShimuraError {
    #[error("t = {0} is not a positive squarefree integer")]
    NonSquarefreeT(u64),
    #[error("lift to precision {prec_out} needs input index {needed}, have {available}")]
    InsufficientPrecision { prec_out: i64, needed: i64, available: i64 },
    #[error("weight 3/2 inputs need an explicit theta-orthogonality attestation")]
    AttestationRequired,
    #[error(transparent)]
    Hecke(#[from] HeckeError),
    #[error(transparent)]
    Qexp(#[from] QexpError),
}

impl From<crate::arith::ArithError> for ShimuraError {
    fn from(e: crate::arith::ArithError) -> Self {
        ShimuraError::Hecke(e.into())
    }
}

fn check_request(f: &GradedSeries, ctx: &FormContext, t: u64, prec_out: i64) -> Result<(), ShimuraError> {
    if t == 0 || !is_squarefree(t) {
        return Err(ShimuraError::NonSquarefreeT(t));
    }
    if ctx.lambda == 1 && !ctx.theta_attested {
        return Err(ShimuraError::AttestationRequired);
    }
    let needed = (t as i64).saturating_mul(prec_out.saturating_mul(prec_out));
    if needed > f.prec() {
        return Err(ShimuraError::InsufficientPrecision {
            prec_out,
            needed,
            available: f.prec(),
        });
    }
    Ok(())
}

/// `S_t(F) = Σ b(n) qⁿ` for `n ≤ prec_out`, where
/// `b(n) = Σ_{d|n} ψ(d)(d/t)d^{λ−1}(12/(n/d)) a(t(n/d)²)`.
pub fn shimura_lift(f: &GradedSeries, ctx: &FormContext, t: u64, prec_out: i64) -> Result<IntegerSeries, ShimuraError> {
    check_request(f, ctx, t, prec_out)?;
    let ring = f.ring();
    let ti = t as i64;
    // Per-divisor weights ψ(d)(d/t)d^{λ−1}, shared across all n.
    let weights: Vec<RingElement> = (0..=prec_out.max(0))
        .map(|d| {
            if d == 0 {
                return Ok(ring.zero());
            }
            let s = kronecker(d, ti);
            if s == 0 {
                return Ok(ring.zero());
            }
            let w = ring.mul(&ctx.psi.eval_in(ring, d)?, &ring.from_int(&Int::pow(d, ctx.lambda - 1)));
            Ok(ring.scale(&w, &Int::from(s as i64)))
        })
        .collect::<Result<_, crate::arith::ArithError>>()?;
    let coeffs = par::map_range(0..(prec_out.max(-1) + 1) as usize, |n| -> Result<RingElement, ShimuraError> {
        let n = n as i64;
        if n == 0 {
            return Ok(ring.zero());
        }
        let mut acc = ring.zero();
        for d in divisors(n as u64) {
            let d = d as i64;
            let e = n / d;
            let s = kronecker(12, e);
            if s == 0 || weights[d as usize].is_zero() {
                continue;
            }
            let a = f.coeff(ti * e * e)?;
            if a.is_zero() {
                continue;
            }
            acc = ring.add(&acc, &ring.scale(&ring.mul(&weights[d as usize], &a), &Int::from(s as i64)));
        }
        Ok(acc)
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    Ok(IntegerSeries::from_coeffs(ring, coeffs)?)
}

/// Both sides of `S_t(F | T_{p²}) = χ^(r)(p) · S_t(F) | T_p` on `[0, prec]`.
pub fn equivariance_sides(
    f: &GradedSeries,
    ctx: &FormContext,
    t: u64,
    p: u64,
    prec: i64,
) -> Result<(IntegerSeries, IntegerSeries), ShimuraError> {
    let pi = p as i64;
    let lhs = shimura_lift(&t_p2_half(f, p, ctx)?, ctx, t, prec)?;
    let lifted = shimura_lift(f, ctx, t, pi * prec)?;
    let psi2 = ctx.psi.square();
    let rhs = t_p_integer(&lifted, p, ctx.lift_weight(), &psi2)?;
    let chi = chi_r(ctx.r, pi) as i64;
    let rhs = rhs.truncate(prec).scale(&f.ring().from_i64(chi));
    Ok((lhs, rhs))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivarianceReport {
    pub t: u64,
    pub p: u64,
    pub prec: i64,
    pub holds: bool,
    pub first_mismatch: Option<i64>,
    pub theta_attested: bool,
}

pub fn compare_sides(lhs: &IntegerSeries, rhs: &IntegerSeries) -> Option<i64> {
    lhs.first_mismatch(rhs)
}

pub fn check_equivariance(
    f: &GradedSeries,
    ctx: &FormContext,
    t: u64,
    p: u64,
    prec: i64,
) -> Result<EquivarianceReport, ShimuraError> {
    let (lhs, rhs) = equivariance_sides(f, ctx, t, p, prec)?;
    let first_mismatch = compare_sides(&lhs, &rhs);
    Ok(EquivarianceReport {
        t,
        p,
        prec,
        holds: first_mismatch.is_none(),
        first_mismatch,
        theta_attested: ctx.theta_attested,
    })
}

fn divisible_by(ring: &CoeffRing, v: &RingElement, ell: u64) -> bool {
    debug_assert!(ring.modulus().is_none_or(|q| q % ell == 0));
    v.coords.iter().all(|c| c.rem_euclid_u64(ell) == 0)
}

/// Some squarefree `t ≤ t_max` and `n ≤ prec` with `b(n) ≢ 0 (mod ℓ)` in
/// `S_t(F)`, searching `t` in increasing order. Each lift is truncated to what
/// the input precision supports.
pub fn nonvanishing_witness(
    f: &GradedSeries,
    ctx: &FormContext,
    t_max: u64,
    prec: i64,
) -> Result<Option<(u64, i64)>, ShimuraError> {
    let ring = f.ring();
    for t in 1..=t_max {
        if !is_squarefree(t) {
            continue;
        }
        let fits = ((f.prec() / t as i64) as f64).sqrt() as i64;
        let mut n_top = prec.min(fits);
        while (t as i64) * (n_top + 1) * (n_top + 1) <= f.prec() && n_top < prec {
            n_top += 1;
        }
        while n_top > 0 && (t as i64) * n_top * n_top > f.prec() {
            n_top -= 1;
        }
        if n_top < 1 {
            continue;
        }
        let lift = shimura_lift(f, ctx, t, n_top)?;
        for n in 1..=n_top {
            if !divisible_by(ring, &lift.coeff(n)?, ctx.ell) {
                return Ok(Some((t, n)));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qexp::{eta_quotient_expansion, EtaQuotient};

    fn eta(r: i64, prec: i64) -> GradedSeries {
        eta_quotient_expansion(&EtaQuotient::eta_power(r), prec, &CoeffRing::exact(), false).unwrap()
    }

    #[test]
    fn eta5_lift_values() {
        let ctx = FormContext::eta_power(5, 11, 1).unwrap();
        let f = eta(5, 5 * 400);
        let b = shimura_lift(&f, &ctx, 5, 20).unwrap();
        assert_eq!(b.coeff(1).unwrap(), f.coeff(5).unwrap());
        assert_eq!(b.coeff(2).unwrap(), CoeffRing::exact().from_i64(-2));
        assert!(shimura_lift(&f, &ctx, 1, 40).unwrap().is_zero());
    }

    #[test]
    fn request_validation() {
        let ctx = FormContext::eta_power(5, 11, 1).unwrap();
        let f = eta(5, 500);
        assert!(matches!(shimura_lift(&f, &ctx, 4, 3), Err(ShimuraError::NonSquarefreeT(4))));
        assert!(matches!(
            shimura_lift(&f, &ctx, 5, 20),
            Err(ShimuraError::InsufficientPrecision { .. })
        ));
        let ctx3 = FormContext::eta_power(3, 11, 1).unwrap();
        let g = eta(3, 500);
        assert!(matches!(shimura_lift(&g, &ctx3, 3, 5), Err(ShimuraError::AttestationRequired)));
        assert!(shimura_lift(&g, &ctx3.with_theta_attestation(), 3, 5).is_ok());
    }

    #[test]
    fn equivariance_eta5() {
        let ctx = FormContext::eta_power(5, 11, 1).unwrap();
        let f = eta(5, 49 * 5 * 400 + 24);
        let rep = check_equivariance(&f, &ctx, 5, 7, 20).unwrap();
        assert!(rep.holds, "{rep:?}");
        let (mut lhs, rhs) = equivariance_sides(&f, &ctx, 5, 7, 20).unwrap();
        let ring = CoeffRing::exact();
        let bumped = ring.add(&lhs.coeff(2).unwrap(), &ring.one());
        lhs.set_coeff(2, &bumped).unwrap();
        assert_eq!(compare_sides(&lhs, &rhs), Some(2));
        let zero = GradedSeries::zero(&ring, 5, 49 * 5 * 400 + 24);
        assert!(check_equivariance(&zero, &ctx, 5, 7, 20).unwrap().holds);
    }

    #[test]
    fn witnesses() {
        let ctx = FormContext::eta_power(5, 11, 1).unwrap();
        let f = eta(5, 2000);
        assert_eq!(nonvanishing_witness(&f, &ctx, 10, 10).unwrap(), Some((5, 1)));
        let g = f.scale_int(&Int::from(11i64));
        assert_eq!(nonvanishing_witness(&g, &ctx, 10, 10).unwrap(), None);
        let ctx7 = FormContext::eta_power(7, 13, 1).unwrap();
        let h = eta(7, 4000);
        assert_eq!(nonvanishing_witness(&h, &ctx7, 31, 10).unwrap(), Some((7, 1)));
    }
}
