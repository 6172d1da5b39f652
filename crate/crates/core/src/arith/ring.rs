//! Coefficient rings: `Z[ζ_u]` exactly, or modulo a prime power `ℓ^m`.
//!
//! Elements are coordinate vectors over the power basis `1, ζ, …, ζ^{d−1}`
//! reduced modulo the cyclotomic polynomial `Φ_u`. When `u | ℓ − 1` the
//! residue ring uses the scalar representation instead: `Z/ℓ^m` with ζ sent
//! to a fixed element of exact order `u`, which is a ring homomorphism from
//! `Z[ζ_u]` because `ℓ ∤ u`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{is_prime, pow_mod, primitive_root, ArithError, Int};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RingMode {
    ExactCyclotomic { u: u64 },
    ModPrimePower { ell: u64, m: u32, u: u64 },
}

/// Coordinates of an element of a [`CoeffRing`]; length equals the ring degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct RingElement {
    pub coords: Vec<Int>,
}

impl RingElement {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Int::is_zero)
    }

    /// The rational-integer value, if every non-constant coordinate vanishes.
    pub fn as_integer(&self) -> Option<&Int> {
        if self.coords[1..].iter().all(Int::is_zero) {
            Some(&self.coords[0])
        } else {
            None
        }
    }
}

#[derive(Debug)]
struct Inner {
    mode: RingMode,
    modulus: Option<u64>,
    /// Monic `Φ_u` (low to high, leading 1 included) in cyclotomic representation.
    phi: Option<Vec<Int>>,
    zeta: RingElement,
}

#[derive(Clone, Debug)]
pub struct CoeffRing {
    inner: Arc<Inner>,
}

impl PartialEq for CoeffRing {
    fn eq(&self, other: &Self) -> bool {
        self.inner.mode == other.inner.mode && self.degree() == other.degree()
    }
}

impl Eq for CoeffRing {}

impl fmt::Display for CoeffRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.inner.mode {
            RingMode::ExactCyclotomic { u: 1 } => write!(f, "Z"),
            RingMode::ExactCyclotomic { u } => write!(f, "Z[zeta_{u}]"),
            RingMode::ModPrimePower { ell, m, u } => {
                if self.degree() == 1 && u > 1 {
                    write!(f, "Z/{ell}^{m} (zeta_{u} scalar)")
                } else if u > 1 {
                    write!(f, "Z/{ell}^{m}[zeta_{u}]")
                } else {
                    write!(f, "Z/{ell}^{m}")
                }
            }
        }
    }
}

/// Integer coefficients of `Φ_n`, low to high.
pub(crate) fn cyclotomic_poly(n: u64) -> Vec<i64> {
    // x^n − 1 divided by Φ_d for every proper divisor d.
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in super::divisors(n) {
        if d == n {
            continue;
        }
        let den = cyclotomic_poly(d);
        num = poly_div_exact(&num, &den);
    }
    num
}

fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let qd = num.len() - 1 - dd;
    let mut q = vec![0i64; qd + 1];
    for i in (0..=qd).rev() {
        let c = rem[i + dd];
        q[i] = c;
        for j in 0..=dd {
            rem[i + j] -= c * den[j];
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0));
    q
}

impl CoeffRing {
    /// The integers, `Z = Z[ζ_1]`.
    pub fn exact() -> Self {
        Self::exact_cyclotomic(1).expect("u = 1 is always valid")
    }

    pub fn exact_cyclotomic(u: u64) -> Result<Self, ArithError> {
        Self::new(RingMode::ExactCyclotomic { u })
    }

    /// `Z/ℓ^m`, extended by a `u`-th root of unity (scalar representation when
    /// `u | ℓ − 1`, cyclotomic quotient otherwise).
    pub fn mod_prime_power(ell: u64, m: u32, u: u64) -> Result<Self, ArithError> {
        Self::new(RingMode::ModPrimePower { ell, m, u })
    }

    /// Scalar-only `Z/ℓ^m`; fails when no element of order `u` with `ℓ ∤ u`
    /// exists in `(Z/ℓ^m)^×`.
    pub fn mod_prime_power_scalar(ell: u64, m: u32, u: u64) -> Result<Self, ArithError> {
        let ring = Self::new(RingMode::ModPrimePower { ell, m, u })?;
        if ring.degree() != 1 && u > 1 {
            return Err(ArithError::NoSuchRoot {
                u,
                ring: format!("Z/{ell}^{m}"),
            });
        }
        Ok(ring)
    }

    pub fn new(mode: RingMode) -> Result<Self, ArithError> {
        let (u, modulus) = match mode {
            RingMode::ExactCyclotomic { u } => (u, None),
            RingMode::ModPrimePower { ell, m, u } => {
                if ell < 5 || !is_prime(ell) {
                    return Err(ArithError::InvalidRing(format!("ell = {ell} must be a prime >= 5")));
                }
                if m == 0 {
                    return Err(ArithError::InvalidRing("m must be positive".into()));
                }
                let modulus = ell
                    .checked_pow(m)
                    .filter(|&q| q < (1u64 << 62))
                    .ok_or_else(|| ArithError::InvalidRing(format!("{ell}^{m} exceeds 2^62")))?;
                (u, Some(modulus))
            }
        };
        if u == 0 {
            return Err(ArithError::InvalidRing("root order u must be positive".into()));
        }
        let scalar = match mode {
            RingMode::ExactCyclotomic { u } => u <= 2,
            RingMode::ModPrimePower { ell, .. } => (ell - 1) % u == 0,
        };
        let inner = if scalar {
            let zeta = match (mode, modulus) {
                (RingMode::ExactCyclotomic { u }, _) => Int::from(if u == 1 { 1i64 } else { -1 }),
                (RingMode::ModPrimePower { ell, m, u }, Some(q)) => {
                    let g = primitive_root(q)?;
                    let group = ell.pow(m - 1) * (ell - 1);
                    Int::from(pow_mod(g, group / u, q))
                }
                _ => unreachable!(),
            };
            Inner {
                mode,
                modulus,
                phi: None,
                zeta: RingElement { coords: vec![zeta] },
            }
        } else {
            let phi: Vec<Int> = cyclotomic_poly(u)
                .into_iter()
                .map(|c| match modulus {
                    Some(q) => Int::from(Int::from(c).rem_euclid_u64(q)),
                    None => Int::from(c),
                })
                .collect();
            let d = phi.len() - 1;
            let mut coords = vec![Int::ZERO; d];
            coords[1] = Int::ONE;
            Inner {
                mode,
                modulus,
                phi: Some(phi),
                zeta: RingElement { coords },
            }
        };
        Ok(CoeffRing {
            inner: Arc::new(inner),
        })
    }

    pub fn mode(&self) -> RingMode {
        self.inner.mode
    }

    /// Order of the distinguished root of unity ζ.
    pub fn root_order(&self) -> u64 {
        match self.inner.mode {
            RingMode::ExactCyclotomic { u } | RingMode::ModPrimePower { u, .. } => u,
        }
    }

    pub fn degree(&self) -> usize {
        self.inner.zeta.coords.len()
    }

    /// `ℓ^m` in residue mode, `None` for exact rings.
    pub fn modulus(&self) -> Option<u64> {
        self.inner.modulus
    }

    pub fn is_exact(&self) -> bool {
        self.inner.modulus.is_none()
    }

    pub fn ell(&self) -> Option<u64> {
        match self.inner.mode {
            RingMode::ModPrimePower { ell, .. } => Some(ell),
            _ => None,
        }
    }

    /// Same representation with a different root order is a different ring;
    /// this rebuilds the ring for root order `u` in the same base.
    pub fn with_root_order(&self, u: u64) -> Result<Self, ArithError> {
        match self.inner.mode {
            RingMode::ExactCyclotomic { .. } => Self::exact_cyclotomic(u),
            RingMode::ModPrimePower { ell, m, .. } => Self::mod_prime_power(ell, m, u),
        }
    }

    #[inline]
    pub fn reduce_int(&self, x: &Int) -> Int {
        match self.inner.modulus {
            Some(q) => match x {
                Int::Small(s) if *s >= 0 && (*s as u64) < q => x.clone(),
                _ => Int::Small(x.rem_euclid_u64(q) as i64),
            },
            None => x.clone(),
        }
    }

    pub fn zero(&self) -> RingElement {
        RingElement {
            coords: vec![Int::ZERO; self.degree()],
        }
    }

    pub fn one(&self) -> RingElement {
        self.from_int(&Int::ONE)
    }

    pub fn from_int(&self, x: &Int) -> RingElement {
        let mut coords = vec![Int::ZERO; self.degree()];
        coords[0] = self.reduce_int(x);
        RingElement { coords }
    }

    pub fn from_i64(&self, x: i64) -> RingElement {
        self.from_int(&Int::from(x))
    }

    pub fn add(&self, a: &RingElement, b: &RingElement) -> RingElement {
        RingElement {
            coords: a
                .coords
                .iter()
                .zip(&b.coords)
                .map(|(x, y)| self.reduce_int(&(x + y)))
                .collect(),
        }
    }

    pub fn sub(&self, a: &RingElement, b: &RingElement) -> RingElement {
        RingElement {
            coords: a
                .coords
                .iter()
                .zip(&b.coords)
                .map(|(x, y)| self.reduce_int(&(x - y)))
                .collect(),
        }
    }

    pub fn neg(&self, a: &RingElement) -> RingElement {
        RingElement {
            coords: a.coords.iter().map(|x| self.reduce_int(&-x)).collect(),
        }
    }

    pub fn scale(&self, a: &RingElement, k: &Int) -> RingElement {
        RingElement {
            coords: a.coords.iter().map(|x| self.reduce_int(&(x * k))).collect(),
        }
    }

    pub fn mul(&self, a: &RingElement, b: &RingElement) -> RingElement {
        let d = self.degree();
        if d == 1 {
            return RingElement {
                coords: vec![self.reduce_int(&(&a.coords[0] * &b.coords[0]))],
            };
        }
        let mut prod = vec![Int::ZERO; 2 * d - 1];
        for (i, x) in a.coords.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coords.iter().enumerate() {
                prod[i + j].add_mul(x, y);
            }
        }
        self.reduce_poly(prod)
    }

    /// Reduce a coefficient vector of arbitrary length modulo `Φ_u` (and `ℓ^m`).
    pub(crate) fn reduce_poly(&self, mut poly: Vec<Int>) -> RingElement {
        let d = self.degree();
        if let Some(phi) = &self.inner.phi {
            for top in (d..poly.len()).rev() {
                let c = std::mem::take(&mut poly[top]);
                if c.is_zero() {
                    continue;
                }
                for j in 0..d {
                    let t = &c * &phi[j];
                    poly[top - d + j] = &poly[top - d + j] - &t;
                }
            }
        } else if poly.len() > 1 {
            // Scalar representation: evaluate at ζ.
            let z = &self.inner.zeta.coords[0];
            let mut acc = Int::ZERO;
            for c in poly.iter().rev() {
                acc = self.reduce_int(&(&(&acc * z) + c));
            }
            poly = vec![acc];
        }
        poly.resize(d, Int::ZERO);
        RingElement {
            coords: poly.iter().map(|x| self.reduce_int(x)).collect(),
        }
    }

    pub fn pow(&self, a: &RingElement, mut e: u64) -> RingElement {
        let mut result = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(&result, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        result
    }

    /// The distinguished root ζ (order [`root_order`](Self::root_order)).
    pub fn zeta(&self) -> &RingElement {
        &self.inner.zeta
    }

    /// `ζ^j` for the distinguished root.
    pub fn zeta_pow(&self, j: u64) -> RingElement {
        let u = self.root_order();
        let j = j % u;
        if self.degree() == 1 {
            return self.pow(&self.inner.zeta, j);
        }
        let mut poly = vec![Int::ZERO; j as usize + 1];
        poly[j as usize] = Int::ONE;
        self.reduce_poly(poly)
    }

    /// An element of exact multiplicative order `u`, deterministic: `ζ^{U/u}`.
    pub fn embed_unity(&self, u: u64) -> Result<RingElement, ArithError> {
        if u == 0 || self.root_order() % u != 0 {
            return Err(ArithError::NoSuchRoot {
                u,
                ring: self.to_string(),
            });
        }
        Ok(self.zeta_pow(self.root_order() / u))
    }

    /// Image of `x ∈ src` under the reduction map `src → self`, sending the
    /// root `ζ_{u_src}` to `ζ^{U/u_src}`.
    pub fn map_from(&self, src: &CoeffRing, x: &RingElement) -> Result<RingElement, ArithError> {
        if src == self {
            return Ok(x.clone());
        }
        if let Some(q) = src.modulus() {
            if self.modulus() != Some(q) || src.degree() != 1 {
                return Err(ArithError::InvalidRing(format!("no reduction map {src} -> {self}")));
            }
        }
        if src.degree() == 1 {
            return Ok(self.from_int(&x.coords[0]));
        }
        let z = self.embed_unity(src.root_order())?;
        let mut acc = self.zero();
        for c in x.coords.iter().rev() {
            acc = self.add(&self.mul(&acc, &z), &self.from_int(c));
        }
        Ok(acc)
    }
}
