//! Exact integers with an inline fast path.
//!
//! Values that fit in an `i64` are stored inline; anything larger spills to a
//! boxed [`BigInt`]. The invariant `Big(x)` ⇒ `x ∉ i64` is maintained by every
//! constructor, so structural equality is numeric equality.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Int {
    Small(i64),
    Big(Box<BigInt>),
}

impl Default for Int {
    fn default() -> Self {
        Int::Small(0)
    }
}

impl Int {
    pub const ZERO: Int = Int::Small(0);
    pub const ONE: Int = Int::Small(1);

    #[inline]
    pub fn from_i128(v: i128) -> Int {
        match i64::try_from(v) {
            Ok(s) => Int::Small(s),
            Err(_) => Int::Big(Box::new(BigInt::from(v))),
        }
    }

    pub fn from_big(v: BigInt) -> Int {
        match v.to_i64() {
            Some(s) => Int::Small(s),
            None => Int::Big(Box::new(v)),
        }
    }

    pub fn to_big(&self) -> BigInt {
        match self {
            Int::Small(s) => BigInt::from(*s),
            Int::Big(b) => (**b).clone(),
        }
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        matches!(self, Int::Small(0))
    }

    #[inline]
    pub fn as_i64(&self) -> Option<i64> {
        match self {
            Int::Small(s) => Some(*s),
            Int::Big(_) => None,
        }
    }

    pub fn as_i128(&self) -> Option<i128> {
        match self {
            Int::Small(s) => Some(*s as i128),
            Int::Big(b) => b.to_i128(),
        }
    }

    pub fn signum(&self) -> i32 {
        match self {
            Int::Small(s) => s.signum() as i32,
            Int::Big(b) => {
                if b.is_negative() {
                    -1
                } else {
                    1
                }
            }
        }
    }

    pub fn abs(&self) -> Int {
        match self {
            Int::Small(s) => match s.checked_abs() {
                Some(a) => Int::Small(a),
                None => Int::from_i128((*s as i128).abs()),
            },
            Int::Big(b) => Int::from_big(b.abs()),
        }
    }

    /// Number of bits in |self|.
    pub fn bits(&self) -> u64 {
        match self {
            Int::Small(s) => 64 - s.unsigned_abs().leading_zeros() as u64,
            Int::Big(b) => b.bits(),
        }
    }

    /// Canonical residue in `[0, m)`.
    #[inline]
    pub fn rem_euclid_u64(&self, m: u64) -> u64 {
        match self {
            Int::Small(s) => (*s as i128).rem_euclid(m as i128) as u64,
            Int::Big(b) => b.mod_floor(&BigInt::from(m)).to_u64().unwrap_or(0),
        }
    }

    #[inline]
    pub fn mul_i64(&self, k: i64) -> Int {
        match self {
            Int::Small(s) => Int::from_i128(*s as i128 * k as i128),
            Int::Big(b) => Int::from_big(&**b * k),
        }
    }

    /// `self += a * b`, the inner step of every convolution.
    #[inline]
    pub fn add_mul(&mut self, a: &Int, b: &Int) {
        if let (Int::Small(x), Int::Small(y), Int::Small(z)) = (&*self, a, b) {
            let prod = *y as i128 * *z as i128;
            if let Some(v) = (*x as i128).checked_add(prod) {
                *self = Int::from_i128(v);
                return;
            }
        }
        let v = self.to_big() + a.to_big() * b.to_big();
        *self = Int::from_big(v);
    }

    /// Exact division; panics in debug builds if the remainder is nonzero.
    pub fn div_exact(&self, d: i64) -> Int {
        match self {
            Int::Small(s) => {
                debug_assert_eq!(s % d, 0);
                Int::from_i128(*s as i128 / d as i128)
            }
            Int::Big(b) => {
                let (q, r) = b.div_rem(&BigInt::from(d));
                debug_assert!(r.is_zero());
                Int::from_big(q)
            }
        }
    }

    pub fn pow(base: i64, exp: u32) -> Int {
        Int::from_big(num_traits::pow(BigInt::from(base), exp as usize))
    }
}

impl From<i64> for Int {
    fn from(v: i64) -> Self {
        Int::Small(v)
    }
}

impl From<i32> for Int {
    fn from(v: i32) -> Self {
        Int::Small(v as i64)
    }
}

impl From<u64> for Int {
    fn from(v: u64) -> Self {
        Int::from_i128(v as i128)
    }
}

impl From<BigInt> for Int {
    fn from(v: BigInt) -> Self {
        Int::from_big(v)
    }
}

impl<'a> Add<&'a Int> for &'a Int {
    type Output = Int;
    #[inline]
    fn add(self, rhs: &Int) -> Int {
        if let (Int::Small(a), Int::Small(b)) = (self, rhs) {
            return Int::from_i128(*a as i128 + *b as i128);
        }
        Int::from_big(self.to_big() + rhs.to_big())
    }
}

impl<'a> Sub<&'a Int> for &'a Int {
    type Output = Int;
    #[inline]
    fn sub(self, rhs: &Int) -> Int {
        if let (Int::Small(a), Int::Small(b)) = (self, rhs) {
            return Int::from_i128(*a as i128 - *b as i128);
        }
        Int::from_big(self.to_big() - rhs.to_big())
    }
}

impl<'a> Mul<&'a Int> for &'a Int {
    type Output = Int;
    #[inline]
    fn mul(self, rhs: &Int) -> Int {
        if let (Int::Small(a), Int::Small(b)) = (self, rhs) {
            return Int::from_i128(*a as i128 * *b as i128);
        }
        Int::from_big(self.to_big() * rhs.to_big())
    }
}

impl Neg for &Int {
    type Output = Int;
    fn neg(self) -> Int {
        match self {
            Int::Small(s) => Int::from_i128(-(*s as i128)),
            Int::Big(b) => Int::from_big(-(**b).clone()),
        }
    }
}

impl Add for Int {
    type Output = Int;
    fn add(self, rhs: Int) -> Int {
        &self + &rhs
    }
}

impl Sub for Int {
    type Output = Int;
    fn sub(self, rhs: Int) -> Int {
        &self - &rhs
    }
}

impl Mul for Int {
    type Output = Int;
    fn mul(self, rhs: Int) -> Int {
        &self * &rhs
    }
}

impl Neg for Int {
    type Output = Int;
    fn neg(self) -> Int {
        -&self
    }
}

impl PartialOrd for Int {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Int {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Int::Small(a), Int::Small(b)) => a.cmp(b),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl fmt::Display for Int {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Int::Small(s) => write!(f, "{s}"),
            Int::Big(b) => write!(f, "{b}"),
        }
    }
}

/// JSON numbers for values in `i64`, decimal strings beyond (exactness over
/// convenience).
impl Serialize for Int {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Int::Small(v) => s.serialize_i64(*v),
            Int::Big(b) => s.serialize_str(&b.to_string()),
        }
    }
}
