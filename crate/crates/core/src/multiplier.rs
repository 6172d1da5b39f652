//! The Dedekind eta multiplier `ν_η` on `SL₂(Z)` and a floating-point check
//! of `η(γz) = ν_η(γ)(cz+d)^{1/2}η(z)` with the principal square root.

use num_complex::Complex64;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::arith::kronecker;
use crate::par;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MultiplierError {
    #[error("matrix ({0} {1}; {2} {3}) does not have determinant 1")]
    NotUnimodular(i64, i64, i64, i64),
    #[error("sample point must lie in the upper half plane")]
    NotInUpperHalfPlane,
    #[error("truncation bound {bound:e} exceeds 1e-10 with {terms} terms")]
    ConvergenceTooSlow { bound: f64, terms: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct UnimodularMatrix {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl UnimodularMatrix {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self, MultiplierError> {
        if a as i128 * d as i128 - b as i128 * c as i128 != 1 {
            return Err(MultiplierError::NotUnimodular(a, b, c, d));
        }
        Ok(UnimodularMatrix { a, b, c, d })
    }

    pub const T: UnimodularMatrix = UnimodularMatrix { a: 1, b: 1, c: 0, d: 1 };
    pub const S: UnimodularMatrix = UnimodularMatrix { a: 0, b: -1, c: 1, d: 0 };

    pub fn neg(&self) -> Self {
        UnimodularMatrix {
            a: -self.a,
            b: -self.b,
            c: -self.c,
            d: -self.d,
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        UnimodularMatrix {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn act(&self, z: Complex64) -> Complex64 {
        (z * self.a as f64 + self.b as f64) / (z * self.c as f64 + self.d as f64)
    }
}

/// `e(exponent/24)`, a 24th root of unity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct MultiplierValue {
    pub exponent: u8,
}

impl MultiplierValue {
    fn from_exponent(e: i128) -> Self {
        MultiplierValue {
            exponent: e.rem_euclid(24) as u8,
        }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::from_polar(1.0, std::f64::consts::TAU * self.exponent as f64 / 24.0)
    }

    pub fn pow(self, k: u64) -> Self {
        Self::from_exponent(self.exponent as i128 * (k % 24) as i128)
    }
}

fn sym_exponent(s: i8) -> i128 {
    if s == -1 {
        12
    } else {
        0
    }
}

/// `ν_η(γ)` as an exponent of `e(1/24)`.
///
/// For `c > 0` the classical two-case formula is applied. Translations give
/// exponent `b`. For `c < 0`, `ν_η(γ) = i·ν_η(−γ)`. The remaining case
/// `γ = (−1 b; 0 −1)` sits on the branch cut of the square root: there
/// `(cz+d)^{1/2} = i` and the transformation law forces exponent `−b − 6`.
pub fn eta_multiplier(g: &UnimodularMatrix) -> MultiplierValue {
    let (a, b, c, d) = (g.a as i128, g.b as i128, g.c as i128, g.d as i128);
    if c > 0 {
        let base = (a + d) * c - b * d * (c * c - 1);
        let e = if c % 2 != 0 {
            sym_exponent(kronecker(g.d, g.c)) + base - 3 * c
        } else {
            sym_exponent(kronecker(g.c, g.d)) + base + 3 * d - 3 - 3 * c * d
        };
        MultiplierValue::from_exponent(e)
    } else if c < 0 {
        let inner = eta_multiplier(&g.neg());
        MultiplierValue::from_exponent(inner.exponent as i128 + 6)
    } else if d == 1 {
        MultiplierValue::from_exponent(b)
    } else {
        MultiplierValue::from_exponent(-b - 6)
    }
}

/// Number of terms of `Σ (12/m) e(m² z/24)` after which the tail is below `tol`.
pub fn terms_needed(y: f64, tol: f64) -> usize {
    let k = std::f64::consts::TAU * y / 24.0;
    let mut m = 1usize;
    while tail_bound(k, m) > tol {
        m = (m * 2).max(m + 1);
        if m > 1 << 24 {
            break;
        }
    }
    // Refine downward by bisection.
    let (mut lo, mut hi) = (m / 2, m);
    while lo + 1 < hi {
        let mid = (lo + hi) / 2;
        if tail_bound(k, mid) > tol {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Bound on `Σ_{m > M} e^{−k m²}`: geometric domination from the first omitted term.
fn tail_bound(k: f64, terms: usize) -> f64 {
    let m = terms as f64 + 1.0;
    let first = (-k * m * m).exp();
    let ratio = (-k * (2.0 * m + 1.0)).exp();
    if ratio >= 1.0 {
        f64::INFINITY
    } else {
        first / (1.0 - ratio)
    }
}

/// `frac(m2 · x)` with the product's rounding error recovered by FMA.
fn frac_product(m2: f64, x: f64) -> f64 {
    let hi = m2 * x;
    let lo = m2.mul_add(x, -hi);
    let f = hi - hi.floor() + lo;
    f - f.floor()
}

/// `η(z)` from the first `terms` summands, with the truncation bound.
pub fn eta_value(z: Complex64, terms: usize) -> (Complex64, f64) {
    let k = std::f64::consts::TAU * z.im / 24.0;
    let x24 = z.re / 24.0;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut comp = Complex64::new(0.0, 0.0);
    for m in 1..=terms as i64 {
        let chi = kronecker(12, m);
        if chi == 0 {
            continue;
        }
        let m2 = (m * m) as f64;
        let mag = (-k * m2).exp();
        if mag == 0.0 {
            break;
        }
        let phase = std::f64::consts::TAU * frac_product(m2, x24);
        let t = Complex64::from_polar(mag * chi as f64, phase);
        // Kahan summation on both parts.
        let y = t - comp;
        let s = acc + y;
        comp = (s - acc) - y;
        acc = s;
    }
    (acc, tail_bound(k, terms))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct AutomorphyCheck {
    pub exponent: u8,
    pub residual: f64,
    pub truncation_bound: f64,
    pub terms: usize,
}

/// `|η(γz) − ν_η(γ)(cz+d)^{1/2}η(z)|` with `terms` summands for each eta value.
pub fn verify_automorphy(g: &UnimodularMatrix, z: Complex64, terms: usize) -> Result<AutomorphyCheck, MultiplierError> {
    if z.im <= 0.0 {
        return Err(MultiplierError::NotInUpperHalfPlane);
    }
    let gz = g.act(z);
    let j = z * g.c as f64 + g.d as f64;
    let sj = j.sqrt();
    let (lhs, b1) = eta_value(gz, terms);
    let (ez, b2) = eta_value(z, terms);
    let bound = b1 + sj.norm() * b2;
    if !(bound <= 1e-10) {
        return Err(MultiplierError::ConvergenceTooSlow { bound, terms });
    }
    let nu = eta_multiplier(g);
    let rhs = nu.to_complex() * sj * ez;
    Ok(AutomorphyCheck {
        exponent: nu.exponent,
        residual: (lhs - rhs).norm(),
        truncation_bound: bound,
        terms,
    })
}

/// [`verify_automorphy`] with the term count chosen for a `1e-14` tail.
pub fn certify_automorphy(g: &UnimodularMatrix, z: Complex64) -> Result<AutomorphyCheck, MultiplierError> {
    if z.im <= 0.0 {
        return Err(MultiplierError::NotInUpperHalfPlane);
    }
    let y = g.act(z).im.min(z.im);
    verify_automorphy(g, z, terms_needed(y, 1e-14).max(8))
}

/// A uniformly drawn unimodular matrix with all entries in `[−bound, bound]`.
pub fn random_unimodular(rng: &mut impl Rng, bound: i64) -> UnimodularMatrix {
    loop {
        let c = rng.gen_range(-bound..=bound);
        let d = rng.gen_range(-bound..=bound);
        let e = c.extended_gcd(&d);
        if e.gcd != 1 {
            continue;
        }
        // a·d − b·c = 1 with (a, b) = (x0, −y0) + k(c, d).
        let (a0, b0) = (e.y, -e.x);
        let ks: Vec<i64> = (-2 * bound..=2 * bound)
            .filter(|k| (a0 + k * c).abs() <= bound && (b0 + k * d).abs() <= bound)
            .collect();
        if ks.is_empty() {
            continue;
        }
        let k = ks[rng.gen_range(0..ks.len())];
        return UnimodularMatrix::new(a0 + k * c, b0 + k * d, c, d).expect("constructed with det 1");
    }
}

/// Automorphy residuals for `count` seeded random matrices.
pub fn random_suite(count: usize, bound: i64, z: Complex64, seed: u64) -> Result<Vec<(UnimodularMatrix, AutomorphyCheck)>, MultiplierError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mats: Vec<UnimodularMatrix> = (0..count).map(|_| random_unimodular(&mut rng, bound)).collect();
    par::map_slice(&mats, |g| certify_automorphy(g, z).map(|c| (*g, c)))
        .into_iter()
        .collect()
}
