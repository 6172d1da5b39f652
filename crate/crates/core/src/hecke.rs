//! Hecke operators `T_p` (integral weight) and `T_{p²}` (weight `λ + 1/2`
//! with multiplier `ψν_η^r`), Atkin–Lehner signs read off coefficients, and
//! the constants `ε_{2,r,ψ}`, `ε_{3,r,ψ}`, `χ^(r)`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{is_prime, is_squarefree, kronecker, ArithError, CoeffRing, Int, RingElement};
use crate::characters::{CharValue, CharacterError, DirichletCharacter};
use crate::qexp::{GradedSeries, IntegerSeries, QexpError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HeckeError {
    #[error("invalid form context: {0}")]
    InvalidContext(String),
    #[error("p = {p} must be a prime not dividing {forbidden}")]
    BadPrime { p: u64, forbidden: u64 },
    #[error("series is not normalized: a(1) = {0}")]
    NotNormalized(String),
    #[error("p^(1-k/2)·a(p) = {0} is not ±1; the form is not new at p")]
    NotUnitEigenvalue(String),
    #[error("sign extraction needs exact integer coefficients")]
    NotExact,
    #[error("value e({exponent}/{order}) is not a sign")]
    NotReal { order: u64, exponent: u64 },
    #[error("psi vanishes at {0}")]
    CharacterVanishes(u64),
    #[error(transparent)]
    Qexp(#[from] QexpError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Character(#[from] CharacterError),
}

/// A value in `{−1, +1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Sign(i8);

impl Sign {
    pub const PLUS: Sign = Sign(1);
    pub const MINUS: Sign = Sign(-1);

    pub fn new(s: i64) -> Option<Sign> {
        match s {
            1 => Some(Sign::PLUS),
            -1 => Some(Sign::MINUS),
            _ => None,
        }
    }

    pub fn value(self) -> i8 {
        self.0
    }

    pub fn mul(self, o: Sign) -> Sign {
        Sign(self.0 * o.0)
    }

    /// `self · s` for a symbol value `s ∈ {−1, 1}`.
    pub fn times(self, s: i8) -> Option<Sign> {
        Sign::new((self.0 * s) as i64)
    }

    pub fn pow(self, e: u64) -> Sign {
        if e % 2 == 0 {
            Sign::PLUS
        } else {
            self
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.0 > 0 { "+1" } else { "-1" })
    }
}

impl Serialize for Sign {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i8(self.0)
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = i64::deserialize(d)?;
        Sign::new(v).ok_or_else(|| serde::de::Error::custom("sign must be 1 or -1"))
    }
}

/// `e(exponent/order)`, normalized to lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Phase {
    pub order: u64,
    pub exponent: u64,
}

impl Phase {
    pub fn new(order: u64, exponent: u64) -> Phase {
        let e = exponent % order;
        let g = num_integer::gcd(order, e).max(1);
        let g = if e == 0 { order } else { g };
        Phase {
            order: order / g,
            exponent: e / g,
        }
    }

    pub fn from_sign(s: Sign) -> Phase {
        if s == Sign::PLUS {
            Phase::new(1, 0)
        } else {
            Phase::new(2, 1)
        }
    }

    pub fn mul(self, o: Phase) -> Phase {
        let n = num_integer::lcm(self.order, o.order);
        Phase::new(n, self.exponent * (n / self.order) + o.exponent * (n / o.order))
    }

    pub fn as_sign(self) -> Option<Sign> {
        match (self.order, self.exponent) {
            (1, 0) => Some(Sign::PLUS),
            (2, 1) => Some(Sign::MINUS),
            _ => None,
        }
    }
}

/// Hypotheses attached to `F ∈ S_{λ+1/2}(N, ψν_η^r)` studied modulo `ℓ^m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawContext")]
pub struct FormContext {
    pub lambda: u32,
    pub r: i64,
    pub level: u64,
    pub psi: DirichletCharacter,
    pub ell: u64,
    pub m: u32,
    /// Caller's statement that a weight-3/2 input is orthogonal to the
    /// relevant theta series; truncated expansions cannot decide it.
    #[serde(default)]
    pub theta_attested: bool,
}

#[derive(Deserialize)]
struct RawContext {
    lambda: u32,
    r: i64,
    level: u64,
    psi: Option<DirichletCharacter>,
    ell: u64,
    m: u32,
    #[serde(default)]
    theta_attested: bool,
}

impl TryFrom<RawContext> for FormContext {
    type Error = HeckeError;
    fn try_from(raw: RawContext) -> Result<Self, HeckeError> {
        let psi = raw.psi.unwrap_or_else(|| DirichletCharacter::trivial(raw.level));
        let mut ctx = FormContext::new(raw.lambda, raw.r, raw.level, psi, raw.ell, raw.m)?;
        ctx.theta_attested = raw.theta_attested;
        Ok(ctx)
    }
}

impl FormContext {
    pub fn new(lambda: u32, r: i64, level: u64, psi: DirichletCharacter, ell: u64, m: u32) -> Result<Self, HeckeError> {
        let bad = |s: &str| Err(HeckeError::InvalidContext(s.to_string()));
        if lambda == 0 {
            return bad("lambda must be positive");
        }
        if r % 2 == 0 {
            return bad("r must be odd");
        }
        if level == 0 || level % 2 == 0 || !is_squarefree(level) {
            return bad("level must be odd and squarefree");
        }
        if psi.modulus() != level {
            return bad("psi must be a character modulo the level");
        }
        if r % 3 != 0 && level % 3 == 0 {
            return bad("3 may divide the level only when 3 divides r");
        }
        if ell < 5 || !is_prime(ell) {
            return bad("ell must be a prime >= 5");
        }
        if level % ell == 0 {
            return bad("ell must not divide the level");
        }
        if m == 0 {
            return bad("m must be positive");
        }
        Ok(FormContext {
            lambda,
            r,
            level,
            psi,
            ell,
            m,
            theta_attested: false,
        })
    }

    pub fn with_theta_attestation(mut self) -> Self {
        self.theta_attested = true;
        self
    }

    /// Context of `η^r` (level 1, trivial `ψ`, `λ = (r−1)/2`).
    pub fn eta_power(r: i64, ell: u64, m: u32) -> Result<Self, HeckeError> {
        if r < 3 {
            return Err(HeckeError::InvalidContext("eta power needs r >= 3".into()));
        }
        FormContext::new(((r - 1) / 2) as u32, r, 1, DirichletCharacter::trivial(1), ell, m)
    }

    /// The weight `k = 2λ` of the Shimura lift.
    pub fn lift_weight(&self) -> u32 {
        2 * self.lambda
    }

    /// `ℓ^m`.
    pub fn modulus(&self) -> u64 {
        self.ell.pow(self.m)
    }

    /// `Z/ℓ^m` with enough roots of unity for `ψ` (and `ψ²`).
    pub fn residue_ring(&self) -> Result<CoeffRing, HeckeError> {
        Ok(CoeffRing::mod_prime_power(self.ell, self.m, self.psi.order().max(1))?)
    }

    /// Exact coefficients with enough roots of unity for `ψ`.
    pub fn exact_ring(&self) -> Result<CoeffRing, HeckeError> {
        Ok(CoeffRing::exact_cyclotomic(self.psi.order().max(1))?)
    }
}

/// `χ^(r)(p)`: `(−4/p)` if `3 | r`, else `(12/p)`.
pub fn chi_r(r: i64, p: i64) -> i8 {
    if r % 3 == 0 {
        kronecker(-4, p)
    } else {
        kronecker(12, p)
    }
}

fn char_phase(psi: &DirichletCharacter, p: u64) -> Result<Phase, HeckeError> {
    match psi.eval(p as i64) {
        CharValue::Zero => Err(HeckeError::CharacterVanishes(p)),
        CharValue::Root(e) => Ok(Phase::new(psi.order().max(1), e)),
    }
}

/// `ε_{2,r,ψ} = −ψ(2)·(8 / (r/(r,3)))` as a root of unity.
pub fn epsilon_2(r: i64, psi: &DirichletCharacter) -> Result<Phase, HeckeError> {
    let g = num_integer::gcd(r, 3);
    let s = Sign::new(-(kronecker(8, r / g) as i64)).ok_or(HeckeError::InvalidContext("r must be odd".into()))?;
    Ok(Phase::from_sign(s).mul(char_phase(psi, 2)?))
}

/// `ε_{3,r,ψ} = −ψ(3)·(12/r)` as a root of unity.
pub fn epsilon_3(r: i64, psi: &DirichletCharacter) -> Result<Phase, HeckeError> {
    let s = Sign::new(-(kronecker(12, r) as i64)).ok_or(HeckeError::InvalidContext("r must be prime to 6".into()))?;
    Ok(Phase::from_sign(s).mul(char_phase(psi, 3)?))
}

fn phase_sign(ph: Phase) -> Result<Sign, HeckeError> {
    ph.as_sign().ok_or(HeckeError::NotReal {
        order: ph.order,
        exponent: ph.exponent,
    })
}

pub fn epsilon_2_sign(r: i64, psi: &DirichletCharacter) -> Result<Sign, HeckeError> {
    phase_sign(epsilon_2(r, psi)?)
}

pub fn epsilon_3_sign(r: i64, psi: &DirichletCharacter) -> Result<Sign, HeckeError> {
    phase_sign(epsilon_3(r, psi)?)
}

/// `p^e` in `ring`.
fn prime_power(ring: &CoeffRing, p: u64, e: u32) -> RingElement {
    ring.from_int(&Int::pow(p as i64, e))
}

/// `f | T_p = Σ (b(pn) + ψ(p)p^{k−1} b(n/p)) qⁿ` with precision `⌊P/p⌋`.
pub fn t_p_integer(f: &IntegerSeries, p: u64, k: u32, psi: &DirichletCharacter) -> Result<IntegerSeries, HeckeError> {
    if !is_prime(p) {
        return Err(HeckeError::BadPrime { p, forbidden: 1 });
    }
    let ring = f.ring();
    let out_prec = f.prec().div_euclid(p as i64);
    if out_prec < 1 {
        return Err(QexpError::PrecisionUnderflow {
            needed: p as i64,
            available: f.prec(),
        }
        .into());
    }
    let c = ring.mul(&psi.eval_in(ring, p as i64)?, &prime_power(ring, p, k - 1));
    let pi = p as i64;
    let coeffs = (0..=out_prec)
        .map(|n| {
            let mut v = f.coeff(pi * n)?;
            if n % pi == 0 && !c.is_zero() {
                v = ring.add(&v, &ring.mul(&c, &f.coeff(n / pi)?));
            }
            Ok(v)
        })
        .collect::<Result<Vec<_>, HeckeError>>()?;
    Ok(IntegerSeries::from_coeffs(ring, coeffs)?)
}

/// The half-integral weight operator `T_{p²}` on `Σ a(n) q^{n/24}`; the
/// output has precision `⌊P/p²⌋` and the same residue class.
pub fn t_p2_half(f: &GradedSeries, p: u64, ctx: &FormContext) -> Result<GradedSeries, HeckeError> {
    let forbidden = 6 * ctx.level;
    if p < 5 || !is_prime(p) || forbidden % p == 0 {
        return Err(HeckeError::BadPrime { p, forbidden });
    }
    let ring = f.ring();
    let pi = p as i64;
    let p2 = pi * pi;
    let out_prec = f.prec().div_euclid(p2);
    if out_prec < 24 {
        return Err(QexpError::PrecisionUnderflow {
            needed: 24 * p2,
            available: f.prec(),
        }
        .into());
    }
    let psi_p = ctx.psi.eval_in(ring, pi)?;
    let sym = kronecker(-1, pi).pow((((ctx.r - 1) / 2).rem_euclid(2)) as u32) as i64;
    let c1 = ring.scale(&ring.mul(&psi_p, &prime_power(ring, p, ctx.lambda - 1)), &Int::from(sym));
    let c2 = ring.mul(&ring.mul(&psi_p, &psi_p), &prime_power(ring, p, 2 * ctx.lambda - 1));
    let residue = f.residue();
    let first = f.start().min(crate::qexp::canonical_start(residue));
    let mut terms = Vec::new();
    let mut n = first;
    while n <= out_prec {
        let mut v = f.coeff(p2 * n)?;
        let k = kronecker((12 * n).rem_euclid(pi), pi);
        if k != 0 {
            let a = f.coeff(n)?;
            if !a.is_zero() {
                v = ring.add(&v, &ring.scale(&ring.mul(&c1, &a), &Int::from(k as i64)));
            }
        }
        if n % p2 == 0 {
            let a = f.coeff(n / p2)?;
            if !a.is_zero() {
                v = ring.add(&v, &ring.mul(&c2, &a));
            }
        }
        if !v.is_zero() {
            terms.push((n, v));
        }
        n += 24;
    }
    Ok(GradedSeries::from_terms(ring, residue, out_prec, terms)?)
}

/// `ε_p = −p^{1−k/2} a(p)` for a normalized newform at `p ∈ {2, 3}`, in exact arithmetic.
pub fn atkin_lehner_sign(f: &IntegerSeries, p: u64, k: u32) -> Result<Sign, HeckeError> {
    if p != 2 && p != 3 {
        return Err(HeckeError::BadPrime { p, forbidden: 0 });
    }
    if !f.ring().is_exact() {
        return Err(HeckeError::NotExact);
    }
    let int_at = |n: i64| -> Result<Int, HeckeError> {
        let c = f.coeff(n)?;
        if c.coords[1..].iter().any(|x| !x.is_zero()) {
            return Err(HeckeError::NotExact);
        }
        Ok(c.coords[0].clone())
    };
    let a1 = int_at(1)?;
    if a1 != Int::from(1i64) {
        return Err(HeckeError::NotNormalized(a1.to_string()));
    }
    let ap = int_at(p as i64)?;
    // p^{1−k/2}·a(p) = ±1 exactly iff a(p) = ±p^{k/2−1}.
    let unit = Int::pow(p as i64, (k / 2).saturating_sub(1));
    if k % 2 != 0 || k < 2 {
        return Err(HeckeError::InvalidContext("k must be an even integer >= 2".into()));
    }
    if ap == unit {
        Ok(Sign::MINUS)
    } else if ap == -&unit {
        Ok(Sign::PLUS)
    } else {
        Err(HeckeError::NotUnitEigenvalue(format!("{ap}/{unit}")))
    }
}
