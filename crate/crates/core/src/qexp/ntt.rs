//! Number-theoretic transform convolution over word-size primes with CRT.
//!
//! Three NTT-friendly primes below 2^31 are used with Montgomery
//! multiplication. A product of nonnegative (or balanced signed) integers is
//! recovered exactly whenever its magnitude bound is below the product of the
//! primes used; the caller picks how many primes it needs.

use crate::par;

pub(crate) const PRIMES: [u32; 3] = [2_013_265_921, 1_811_939_329, 469_762_049];

/// Largest supported transform length over all three primes.
pub(crate) const MAX_LOG: u32 = 26;

#[derive(Clone, Copy, Debug)]
struct Mont {
    p: u32,
    /// `−p^{-1} mod 2^32`.
    np: u32,
    /// `2^64 mod p`.
    r2: u32,
}

impl Mont {
    fn new(p: u32) -> Self {
        let mut inv = 1u32;
        for _ in 0..5 {
            inv = inv.wrapping_mul(2u32.wrapping_sub(p.wrapping_mul(inv)));
        }
        let r = ((1u128 << 64) % p as u128) as u32;
        Mont {
            p,
            np: inv.wrapping_neg(),
            r2: r,
        }
    }

    #[inline(always)]
    fn reduce(&self, t: u64) -> u32 {
        let m = (t as u32).wrapping_mul(self.np);
        let u = ((t + m as u64 * self.p as u64) >> 32) as u32;
        if u >= self.p {
            u - self.p
        } else {
            u
        }
    }

    /// `a·b·2^{-32} mod p`.
    #[inline(always)]
    fn mul(&self, a: u32, b: u32) -> u32 {
        self.reduce(a as u64 * b as u64)
    }

    fn to_mont(&self, a: u32) -> u32 {
        self.mul(a, self.r2)
    }
}

fn pow_mod32(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn primitive_root(p: u32) -> u64 {
    let factors = crate::arith::factorize(p as u64 - 1);
    (2..)
        .find(|&g| factors.iter().all(|&(q, _)| pow_mod32(g, (p as u64 - 1) / q, p as u64) != 1))
        .expect("prime has a primitive root")
}

struct Plan {
    mont: Mont,
    n: usize,
    /// Forward twiddles in Montgomery form; `w[len + j] = ω_{2len}^j`.
    w: Vec<u32>,
    iw: Vec<u32>,
}

impl Plan {
    fn new(p: u32, log: u32) -> Self {
        let mont = Mont::new(p);
        let n = 1usize << log;
        let g = primitive_root(p);
        let pm = p as u64;
        let mut w = vec![0u32; n.max(2)];
        let mut iw = vec![0u32; n.max(2)];
        let mut len = 1usize;
        while len < n {
            let root = pow_mod32(g, (pm - 1) / (2 * len as u64), pm);
            let iroot = pow_mod32(root, pm - 2, pm);
            let (mut x, mut y) = (1u64, 1u64);
            for j in 0..len {
                w[len + j] = mont.to_mont(x as u32);
                iw[len + j] = mont.to_mont(y as u32);
                x = x * root % pm;
                y = y * iroot % pm;
            }
            len <<= 1;
        }
        Plan { mont, n, w, iw }
    }

    /// Decimation in frequency: natural order in, bit-reversed out.
    fn forward(&self, a: &mut [u32]) {
        let m = self.mont;
        let p = m.p;
        let mut len = self.n >> 1;
        while len >= 1 {
            let tw = &self.w[len..2 * len];
            par::for_each_chunk_mut(a, (2 * len).max(1 << 14), |_, block| {
                for s in block.chunks_mut(2 * len) {
                    let (lo, hi) = s.split_at_mut(len);
                    for j in 0..len {
                        let u = lo[j];
                        let v = hi[j];
                        let sum = u + v;
                        lo[j] = if sum >= p { sum - p } else { sum };
                        hi[j] = m.mul(u + p - v, tw[j]);
                    }
                }
            });
            len >>= 1;
        }
    }

    /// Decimation in time: bit-reversed in, natural order out, unscaled.
    fn inverse(&self, a: &mut [u32]) {
        let m = self.mont;
        let p = m.p;
        let mut len = 1usize;
        while len < self.n {
            let tw = &self.iw[len..2 * len];
            par::for_each_chunk_mut(a, (2 * len).max(1 << 14), |_, block| {
                for s in block.chunks_mut(2 * len) {
                    let (lo, hi) = s.split_at_mut(len);
                    for j in 0..len {
                        let u = lo[j];
                        let v = m.mul(hi[j], tw[j]);
                        let sum = u + v;
                        lo[j] = if sum >= p { sum - p } else { sum };
                        hi[j] = if u >= v { u - v } else { u + p - v };
                    }
                }
            });
            len <<= 1;
        }
    }
}

/// Cyclic-free convolution of `a` and `b` modulo `PRIMES[idx]`, first `out_len` terms.
/// Inputs must already be reduced modulo the prime.
fn convolve_one(a: &[u32], b: &[u32], out_len: usize, idx: usize) -> Vec<u32> {
    let p = PRIMES[idx];
    let need = (a.len() + b.len() - 1).min(out_len.max(1));
    let full = a.len() + b.len() - 1;
    let log = (full.max(2) as u64).next_power_of_two().trailing_zeros();
    assert!(log <= MAX_LOG, "transform length 2^{log} exceeds supported size");
    let plan = Plan::new(p, log);
    let n = plan.n;
    let mut fa = vec![0u32; n];
    fa[..a.len()].copy_from_slice(a);
    let mut fb = vec![0u32; n];
    fb[..b.len()].copy_from_slice(b);
    plan.forward(&mut fa);
    plan.forward(&mut fb);
    let m = plan.mont;
    // Pointwise product loses one factor 2^32; the final scale restores it.
    let n_inv = pow_mod32(n as u64, p as u64 - 2, p as u64);
    let r = (1u64 << 32) % p as u64;
    let scale = (n_inv * r % p as u64 * r % p as u64) as u32;
    par::for_each_chunk_pair_mut(&mut fa, &mut fb, 1 << 16, |_, x, y| {
        for (u, v) in x.iter_mut().zip(y.iter()) {
            *u = m.mul(*u, *v);
        }
    });
    drop(fb);
    plan.inverse(&mut fa);
    fa.truncate(need);
    par::for_each_chunk_mut(&mut fa, 1 << 16, |_, x| {
        for u in x.iter_mut() {
            *u = m.mul(*u, scale);
        }
    });
    fa
}

/// Number of primes whose product exceeds `bound` (None if even three do not).
pub(crate) fn primes_needed(bound: u128) -> Option<usize> {
    let mut prod = 1u128;
    for (i, &p) in PRIMES.iter().enumerate() {
        prod *= p as u128;
        if prod > bound {
            return Some(i + 1);
        }
    }
    None
}

pub(crate) fn supported_len(len: usize) -> bool {
    (len.max(2) as u64).next_power_of_two().trailing_zeros() <= MAX_LOG
}

/// Per-prime residues and Garner reconstruction to values in `[0, Π)`.
fn convolve_crt<F>(a_len: usize, b_len: usize, out_len: usize, k: usize, mut encode: F) -> Vec<u128>
where
    F: FnMut(usize) -> (Vec<u32>, Vec<u32>),
{
    let need = (a_len + b_len - 1).min(out_len);
    let mut res: Vec<Vec<u32>> = Vec::with_capacity(k);
    for idx in 0..k {
        let (ea, eb) = encode(idx);
        res.push(convolve_one(&ea, &eb, out_len, idx));
    }
    let p: Vec<u128> = PRIMES.iter().map(|&x| x as u128).collect();
    let inv01 = pow_mod32(p[0] as u64, p[1] as u64 - 2, p[1] as u64) as u128;
    let p01 = p[0] * p[1];
    let inv012 = pow_mod32((p01 % p[2]) as u64, p[2] as u64 - 2, p[2] as u64) as u128;
    (0..need)
        .map(|i| {
            let r0 = res[0][i] as u128;
            if k == 1 {
                return r0;
            }
            let r1 = res[1][i] as u128;
            let v1 = (r1 + p[1] - r0 % p[1]) % p[1] * inv01 % p[1];
            let x01 = r0 + v1 * p[0];
            if k == 2 {
                return x01;
            }
            let r2 = res[2][i] as u128;
            let v2 = (r2 + p[2] - x01 % p[2]) % p[2] * inv012 % p[2];
            x01 + v2 * p01
        })
        .collect()
}

/// Exact truncated convolution of nonnegative inputs with `max(a)·max(b)·min(len)`
/// below the product of the primes used; `None` when no prime set suffices.
pub(crate) fn convolve_nonneg(a: &[u64], b: &[u64], out_len: usize) -> Option<Vec<u128>> {
    if a.is_empty() || b.is_empty() || out_len == 0 {
        return Some(vec![]);
    }
    let ma = *a.iter().max().unwrap() as u128;
    let mb = *b.iter().max().unwrap() as u128;
    let terms = a.len().min(b.len()) as u128;
    let bound = ma.checked_mul(mb)?.checked_mul(terms)?;
    let k = primes_needed(bound)?;
    if !supported_len(a.len() + b.len() - 1) {
        return None;
    }
    Some(convolve_crt(a.len(), b.len(), out_len, k, |idx| {
        let p = PRIMES[idx] as u64;
        (
            a.iter().map(|&x| (x % p) as u32).collect(),
            b.iter().map(|&x| (x % p) as u32).collect(),
        )
    }))
}

/// Exact truncated convolution of signed inputs, balanced reconstruction.
pub(crate) fn convolve_signed(a: &[i64], b: &[i64], out_len: usize) -> Option<Vec<i128>> {
    if a.is_empty() || b.is_empty() || out_len == 0 {
        return Some(vec![]);
    }
    let ma = a.iter().map(|x| x.unsigned_abs()).max().unwrap() as u128;
    let mb = b.iter().map(|x| x.unsigned_abs()).max().unwrap() as u128;
    let terms = a.len().min(b.len()) as u128;
    let bound = ma.checked_mul(mb)?.checked_mul(terms)?.checked_mul(2)?;
    let k = primes_needed(bound)?;
    if !supported_len(a.len() + b.len() - 1) {
        return None;
    }
    let modulus: u128 = PRIMES[..k].iter().map(|&p| p as u128).product();
    let enc = |x: i64, p: u64| -> u32 { (x as i128).rem_euclid(p as i128) as u32 };
    let raw = convolve_crt(a.len(), b.len(), out_len, k, |idx| {
        let p = PRIMES[idx] as u64;
        (
            a.iter().map(|&x| enc(x, p)).collect(),
            b.iter().map(|&x| enc(x, p)).collect(),
        )
    });
    Some(
        raw.into_iter()
            .map(|x| {
                if x > modulus / 2 {
                    -((modulus - x) as i128)
                } else {
                    x as i128
                }
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn naive(a: &[i64], b: &[i64], n: usize) -> Vec<i128> {
        let mut out = vec![0i128; (a.len() + b.len() - 1).min(n)];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                if i + j < out.len() {
                    out[i + j] += x as i128 * y as i128;
                }
            }
        }
        out
    }

    #[test]
    fn montgomery_roundtrip() {
        for &p in &PRIMES {
            let m = Mont::new(p);
            let x = 123_456_789 % p;
            let y = 987_654_321 % p;
            let got = m.mul(m.to_mont(x), y);
            assert_eq!(got as u64, x as u64 * y as u64 % p as u64);
        }
    }

    #[test]
    fn signed_matches_naive_at_each_prime_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &(mag, len) in &[(10i64, 300usize), (1 << 30, 200), (1 << 40, 257)] {
            let a: Vec<i64> = (0..len).map(|_| rng.gen_range(-mag..=mag)).collect();
            let b: Vec<i64> = (0..len + 13).map(|_| rng.gen_range(-mag..=mag)).collect();
            assert_eq!(convolve_signed(&a, &b, 400).unwrap(), naive(&a, &b, 400));
        }
    }

    #[test]
    fn nonneg_matches_naive() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a: Vec<u64> = (0..1000).map(|_| rng.gen_range(0..13)).collect();
        let b: Vec<u64> = (0..777).map(|_| rng.gen_range(0..13)).collect();
        let got = convolve_nonneg(&a, &b, 5000).unwrap();
        let ai: Vec<i64> = a.iter().map(|&x| x as i64).collect();
        let bi: Vec<i64> = b.iter().map(|&x| x as i64).collect();
        let want: Vec<u128> = naive(&ai, &bi, 5000).into_iter().map(|x| x as u128).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn oversized_bound_is_refused() {
        let a = vec![i64::MAX; 4];
        assert!(convolve_signed(&a, &a, 8).is_none());
    }
}
