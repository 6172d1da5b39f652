//! Truncated power-series kernels over a scalar base (`Z` or `Z/M`).
//!
//! A series here is a plain coefficient vector `c[0..len]` in the variable
//! `x` (callers decide what `x` means: `q`, or `q` restricted to one residue
//! class). Sparse operands are `(exponent, value)` lists sorted by exponent.

use crate::arith::{inv_mod, Int};
use crate::par;

use super::ntt;

/// The `i`-th term of a pentagonal or Jacobi-cube expansion fits in `i64`.
pub(crate) type Sparse<E> = Vec<(usize, E)>;

pub(crate) trait Base: Sync + Send {
    type E: Clone + Send + Sync + PartialEq + std::fmt::Debug;
    fn zero(&self) -> Self::E;
    fn from_i64(&self, x: i64) -> Self::E;
    fn from_int(&self, x: &Int) -> Self::E;
    fn to_int(&self, x: &Self::E) -> Int;
    fn is_zero(&self, x: &Self::E) -> bool;
    fn add_mul(&self, acc: &mut Self::E, a: &Self::E, b: &Self::E);
    fn sub_mul(&self, acc: &mut Self::E, a: &Self::E, b: &Self::E);
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    /// Multiplicative inverse, when it exists in the base.
    fn inverse(&self, a: &Self::E) -> Option<Self::E>;
    /// Dense product through a transform, when the exactness bound allows it.
    fn dense_transform(&self, a: &[Self::E], b: &[Self::E], out_len: usize) -> Option<Vec<Self::E>>;
    /// Rough number of primes the transform would use (for cost estimates).
    fn transform_primes(&self, a: &[Self::E], b: &[Self::E]) -> Option<usize>;
}

/// Residues modulo `m < 2^62`, canonical in `[0, m)`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct ModBase {
    pub m: u64,
}

impl Base for ModBase {
    type E = u64;

    fn zero(&self) -> u64 {
        0
    }

    fn from_i64(&self, x: i64) -> u64 {
        (x as i128).rem_euclid(self.m as i128) as u64
    }

    fn from_int(&self, x: &Int) -> u64 {
        x.rem_euclid_u64(self.m)
    }

    fn to_int(&self, x: &u64) -> Int {
        Int::from(*x)
    }

    fn is_zero(&self, x: &u64) -> bool {
        *x == 0
    }

    #[inline]
    fn add_mul(&self, acc: &mut u64, a: &u64, b: &u64) {
        *acc = ((*acc as u128 + *a as u128 * *b as u128) % self.m as u128) as u64;
    }

    #[inline]
    fn sub_mul(&self, acc: &mut u64, a: &u64, b: &u64) {
        let t = (*a as u128 * *b as u128 % self.m as u128) as u64;
        *acc = if *acc >= t { *acc - t } else { *acc + self.m - t };
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        (*a as u128 * *b as u128 % self.m as u128) as u64
    }

    fn inverse(&self, a: &u64) -> Option<u64> {
        inv_mod(*a as i64, self.m)
    }

    fn dense_transform(&self, a: &[u64], b: &[u64], out_len: usize) -> Option<Vec<u64>> {
        let m = self.m as u128;
        if let Some(v) = ntt::convolve_nonneg(a, b, out_len) {
            return Some(v.into_iter().map(|x| (x % m) as u64).collect());
        }
        // Split coefficients into halves so each partial product fits.
        let bits = 64 - (self.m - 1).leading_zeros();
        if bits < 8 || !ntt::supported_len(a.len() + b.len()) {
            return None;
        }
        let s = bits.div_ceil(2);
        let mask = (1u64 << s) - 1;
        let (a0, a1): (Vec<u64>, Vec<u64>) = a.iter().map(|&x| (x & mask, x >> s)).unzip();
        let (b0, b1): (Vec<u64>, Vec<u64>) = b.iter().map(|&x| (x & mask, x >> s)).unzip();
        let p00 = self.dense_transform_split(&a0, &b0, out_len)?;
        let p11 = self.dense_transform_split(&a1, &b1, out_len)?;
        let p01 = self.dense_transform_split(&a0, &b1, out_len)?;
        let p10 = self.dense_transform_split(&a1, &b0, out_len)?;
        let shift = (1u128 << s) % m;
        let shift2 = shift * shift % m;
        Some(
            (0..p00.len())
                .map(|i| {
                    let mid = (p01[i] + p10[i]) % m;
                    ((p00[i] + mid * shift + p11[i] * shift2) % m) as u64
                })
                .collect(),
        )
    }

    fn transform_primes(&self, a: &[u64], b: &[u64]) -> Option<usize> {
        let bound = (self.m as u128 - 1).pow(2) * a.len().min(b.len()) as u128;
        ntt::primes_needed(bound).or(Some(12))
    }
}

impl ModBase {
    fn dense_transform_split(&self, a: &[u64], b: &[u64], out_len: usize) -> Option<Vec<u128>> {
        let m = self.m as u128;
        ntt::convolve_nonneg(a, b, out_len).map(|v| v.into_iter().map(|x| x % m).collect())
    }
}

/// Exact integers.
#[derive(Clone, Copy, Debug)]
pub(crate) struct ExactBase;

impl Base for ExactBase {
    type E = Int;

    fn zero(&self) -> Int {
        Int::ZERO
    }

    fn from_i64(&self, x: i64) -> Int {
        Int::from(x)
    }

    fn from_int(&self, x: &Int) -> Int {
        x.clone()
    }

    fn to_int(&self, x: &Int) -> Int {
        x.clone()
    }

    fn is_zero(&self, x: &Int) -> bool {
        x.is_zero()
    }

    #[inline]
    fn add_mul(&self, acc: &mut Int, a: &Int, b: &Int) {
        acc.add_mul(a, b);
    }

    #[inline]
    fn sub_mul(&self, acc: &mut Int, a: &Int, b: &Int) {
        let neg = -b;
        acc.add_mul(a, &neg);
    }

    fn mul(&self, a: &Int, b: &Int) -> Int {
        a * b
    }

    fn inverse(&self, a: &Int) -> Option<Int> {
        match a.as_i64() {
            Some(1) => Some(Int::ONE),
            Some(-1) => Some(Int::from(-1i64)),
            _ => None,
        }
    }

    fn dense_transform(&self, a: &[Int], b: &[Int], out_len: usize) -> Option<Vec<Int>> {
        let ai: Option<Vec<i64>> = a.iter().map(Int::as_i64).collect();
        let bi: Option<Vec<i64>> = b.iter().map(Int::as_i64).collect();
        let v = ntt::convolve_signed(&ai?, &bi?, out_len)?;
        Some(v.into_iter().map(Int::from_i128).collect())
    }

    fn transform_primes(&self, a: &[Int], b: &[Int]) -> Option<usize> {
        let ma = a.iter().map(Int::bits).max().unwrap_or(0);
        let mb = b.iter().map(Int::bits).max().unwrap_or(0);
        let lb = 64 - (a.len().min(b.len()) as u64).leading_zeros() as u64;
        if ma > 63 || mb > 63 || ma + mb + lb + 1 > 127 {
            return None;
        }
        ntt::primes_needed(1u128 << (ma + mb + lb + 1))
    }
}

pub(crate) fn trim<B: Base>(base: &B, v: &[B::E]) -> Sparse<B::E> {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !base.is_zero(x))
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

pub(crate) fn densify<B: Base>(base: &B, s: &Sparse<B::E>, len: usize) -> Vec<B::E> {
    let mut out = vec![base.zero(); len];
    for (i, x) in s {
        if *i < len {
            out[*i] = x.clone();
        }
    }
    out
}

pub(crate) fn mul_sparse_sparse<B: Base>(base: &B, a: &Sparse<B::E>, b: &Sparse<B::E>, len: usize) -> Vec<B::E> {
    let mut out = vec![base.zero(); len];
    for (i, x) in a {
        if *i >= len {
            break;
        }
        for (j, y) in b {
            let k = i + j;
            if k >= len {
                break;
            }
            base.add_mul(&mut out[k], x, y);
        }
    }
    out
}

const BLOCK: usize = 1 << 13;

/// `a · s` truncated to `len`, blocked over the output for parallelism.
pub(crate) fn mul_dense_sparse<B: Base>(base: &B, a: &[B::E], s: &Sparse<B::E>, len: usize) -> Vec<B::E> {
    let mut out = vec![base.zero(); len];
    par::for_each_chunk_mut(&mut out, BLOCK, |bi, chunk| {
        let lo = bi * BLOCK;
        for (j, y) in s {
            if *j >= lo + chunk.len() {
                break;
            }
            // Output k in [lo, lo + chunk.len()) gets a[k − j]·y.
            let start = lo.saturating_sub(*j);
            let end = (lo + chunk.len() - j).min(a.len());
            if start >= end {
                continue;
            }
            for (i, x) in a[start..end].iter().enumerate() {
                let k = start + i + j - lo;
                base.add_mul(&mut chunk[k], x, y);
            }
        }
    });
    out
}

pub(crate) fn mul_dense_schoolbook<B: Base>(base: &B, a: &[B::E], b: &[B::E], len: usize) -> Vec<B::E> {
    let sa = trim(base, a);
    mul_dense_sparse(base, b, &sa, len)
}

/// Dense product with the cheapest exact method available.
pub(crate) fn mul_dense_dense<B: Base>(base: &B, a: &[B::E], b: &[B::E], len: usize) -> Vec<B::E> {
    if a.is_empty() || b.is_empty() || len == 0 {
        return vec![base.zero(); len];
    }
    let a = &a[..a.len().min(len)];
    let b = &b[..b.len().min(len)];
    let small = a.len().min(b.len()) <= 64;
    if !small {
        if let Some(mut v) = base.dense_transform(a, b, len) {
            v.resize(len, base.zero());
            return v;
        }
    }
    mul_dense_schoolbook(base, a, b, len)
}

/// Quotient `h / f` truncated to `len`; `f[0]` must be a unit.
pub(crate) fn div_by_sparse<B: Base>(base: &B, h: &[B::E], f: &Sparse<B::E>, len: usize) -> Option<Vec<B::E>> {
    let (e0, f0) = f.first()?;
    if *e0 != 0 {
        return None;
    }
    let inv = base.inverse(f0)?;
    let mut g: Vec<B::E> = Vec::with_capacity(len);
    for n in 0..len {
        let mut acc = h.get(n).cloned().unwrap_or_else(|| base.zero());
        for (k, fk) in &f[1..] {
            if *k > n {
                break;
            }
            base.sub_mul(&mut acc, fk, &g[n - k]);
        }
        g.push(base.mul(&acc, &inv));
    }
    Some(g)
}

/// Estimated cost (in multiply-adds) of `dense · sparse` versus a transform.
pub(crate) fn prefer_transform<B: Base>(base: &B, dense: &[B::E], other: &[B::E], sparse_nnz: usize, len: usize) -> bool {
    let direct = (len as f64) * sparse_nnz as f64;
    match base.transform_primes(dense, other) {
        Some(k) if ntt::supported_len(2 * len) => {
            let n = (2 * len).next_power_of_two() as f64;
            let transform = k as f64 * 3.0 * n * n.log2() * 1.5;
            transform < direct
        }
        _ => false,
    }
}
