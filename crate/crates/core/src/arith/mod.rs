//! Integer and residue-ring primitives.
//!
//! Kronecker symbol, deterministic primality below 2^64, factorization,
//! Euler phi, multiplicative orders, primitive roots, and the coefficient
//! rings ([`CoeffRing`]) every series computation runs over.

mod int;
mod ring;

pub use int::Int;
pub use ring::{CoeffRing, RingElement, RingMode};

use num_integer::Integer;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("{a} is not a unit modulo {n}")]
    NotCoprime { a: i64, n: u64 },
    #[error("no element of multiplicative order {u} in {ring}")]
    NoSuchRoot { u: u64, ring: String },
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("modulus {0} has no primitive root")]
    NoPrimitiveRoot(u64),
}

/// The Kronecker symbol (a/b).
///
/// Conventions: (a/1) = 1, (a/0) = 1 iff a = ±1, (a/−1) = −1 iff a < 0, and
/// (a/2) = 0 for even a, otherwise +1 for a ≡ ±1 (mod 8) and −1 for a ≡ ±3.
pub fn kronecker(a: i64, b: i64) -> i8 {
    if b == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut result: i8 = 1;
    let mut b = b as i128;
    let a = a as i128;
    if b < 0 {
        b = -b;
        if a < 0 {
            result = -result;
        }
    }
    let v = b.trailing_zeros();
    if v > 0 {
        if a % 2 == 0 {
            return 0;
        }
        b >>= v;
        if v % 2 == 1 {
            let r = a.rem_euclid(8);
            if r == 3 || r == 5 {
                result = -result;
            }
        }
    }
    result * jacobi(a.rem_euclid(b), b)
}

/// Jacobi symbol (a/b) for odd b > 0 and 0 ≤ a.
fn jacobi(mut a: i128, mut b: i128) -> i8 {
    debug_assert!(b > 0 && b % 2 == 1 && a >= 0);
    let mut result = 1i8;
    a %= b;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = b % 8;
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut b);
        if a % 4 == 3 && b % 4 == 3 {
            result = -result;
        }
        a %= b;
    }
    if b == 1 {
        result
    } else {
        0
    }
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut result = 1u64;
    let mut b = base % m;
    while exp > 0 {
        if exp & 1 == 1 {
            result = mul_mod(result, b, m);
        }
        b = mul_mod(b, b, m);
        exp >>= 1;
    }
    result
}

/// Modular inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: i64, m: u64) -> Option<u64> {
    let m_i = m as i128;
    let e = (a as i128).extended_gcd(&m_i);
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m_i) as u64)
}

/// Deterministic Miller–Rabin, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    // Sinclair's bases: a complete witness set below 2^64.
    'witness: for a in [2u64, 325, 9375, 28178, 450775, 9780504, 1795265022] {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_brent(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

/// Prime factorization as sorted `(prime, exponent)` pairs; `factorize(1)` is empty.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut primes = Vec::new();
    for p in 2u64..1000 {
        if p * p > n {
            break;
        }
        while n % p == 0 {
            primes.push(p);
            n /= p;
        }
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime(m) {
            primes.push(m);
            continue;
        }
        let d = pollard_brent(m);
        stack.push(d);
        stack.push(m / d);
    }
    primes.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    assert!(n >= 1, "euler_phi is defined for n >= 1");
    factorize(n)
        .into_iter()
        .map(|(p, e)| (p - 1) * p.pow(e - 1))
        .product()
}

pub fn is_squarefree(n: u64) -> bool {
    n >= 1 && factorize(n).iter().all(|&(_, e)| e == 1)
}

/// Positive divisors of `n` in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut divs = vec![1u64];
    for (p, e) in factorize(n) {
        let len = divs.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.sort_unstable();
    divs
}

/// Least `e ≥ 1` with `a^e ≡ 1 (mod n)`.
pub fn mult_order(a: i64, n: u64) -> Result<u64, ArithError> {
    if n == 0 {
        return Err(ArithError::NotCoprime { a, n });
    }
    let a_red = (a as i128).rem_euclid(n as i128) as u64;
    if a_red.gcd(&n) != 1 {
        return Err(ArithError::NotCoprime { a, n });
    }
    if n == 1 {
        return Ok(1);
    }
    Ok(order_dividing(a_red, euler_phi(n), n))
}

/// Order of `a` modulo `n`, given a known multiple `m` of it.
pub(crate) fn order_dividing(a: u64, m: u64, n: u64) -> u64 {
    let mut order = m;
    for (p, _) in factorize(m) {
        while order % p == 0 && pow_mod(a, order / p, n) == 1 {
            order /= p;
        }
    }
    order
}

/// Smallest positive generator of the cyclic group `(Z/n)^×`.
pub fn primitive_root(n: u64) -> Result<u64, ArithError> {
    if n == 1 || n == 2 {
        return Ok(1);
    }
    if n == 4 {
        return Ok(3);
    }
    let f = factorize(n);
    let odd_prime_power = f.len() == 1 && f[0].0 != 2;
    let twice_odd = f.len() == 2 && f[0] == (2, 1);
    if !(odd_prime_power || twice_odd) {
        return Err(ArithError::NoPrimitiveRoot(n));
    }
    let phi = euler_phi(n);
    let qs: Vec<u64> = factorize(phi).into_iter().map(|(q, _)| q).collect();
    (2..n)
        .find(|&g| g.gcd(&n) == 1 && qs.iter().all(|&q| pow_mod(g, phi / q, n) != 1))
        .ok_or(ArithError::NoPrimitiveRoot(n))
}

/// All primes `≤ n` (sieve of Eratosthenes).
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(i, &p)| p.then_some(i as u64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(12, 1), 1);
        assert_eq!(kronecker(12, 5), -1);
        assert_eq!(kronecker(8, 5), -1);
        assert_eq!(kronecker(-1, 13), 1);
    }

    #[test]
    fn kronecker_nonpositive_conventions() {
        assert_eq!(kronecker(1, 0), 1);
        assert_eq!(kronecker(-1, 0), 1);
        assert_eq!(kronecker(2, 0), 0);
        assert_eq!(kronecker(-3, -1), -1);
        assert_eq!(kronecker(3, -1), 1);
        assert_eq!(kronecker(4, 2), 0);
        assert_eq!(kronecker(7, 2), 1);
        assert_eq!(kronecker(3, 2), -1);
    }

    #[test]
    fn kronecker_multiplicative_exhaustive() {
        for a in -200i64..=200 {
            // (a/0) is a convention outside the multiplicative extension.
            for b in (-200i64..=200).filter(|&b| b != 0) {
                for c in [-7i64, -2, -1, 1, 2, 3, 5, 8, 12, 97, 150, 200] {
                    assert_eq!(
                        kronecker(a, b * c),
                        kronecker(a, b) * kronecker(a, c),
                        "a={a} b={b} c={c}"
                    );
                }
            }
        }
    }

    #[test]
    fn kronecker_matches_euler_criterion() {
        for q in primes_up_to(97).into_iter().filter(|&q| q > 2) {
            for a in 0..q {
                let e = pow_mod(a, (q - 1) / 2, q);
                let expect = if e == 0 { 0 } else if e == 1 { 1 } else { -1 };
                assert_eq!(kronecker(a as i64, q as i64), expect, "({a}/{q})");
            }
        }
    }

    #[test]
    fn phi_examples() {
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(15), 8);
        assert_eq!(euler_phi(7), 6);
        let brute = |n: u64| (1..=n).filter(|k| k.gcd(&n) == 1).count() as u64;
        for n in 1..300 {
            assert_eq!(euler_phi(n), brute(n));
        }
    }

    #[test]
    fn phi_multiplicative() {
        for a in 1u64..=1000 {
            for b in (1u64..=1000).step_by(37) {
                if a.gcd(&b) == 1 {
                    assert_eq!(euler_phi(a * b), euler_phi(a) * euler_phi(b));
                }
            }
        }
    }

    #[test]
    fn order_examples() {
        assert_eq!(mult_order(2, 7), Ok(3));
        assert_eq!(mult_order(1, 5), Ok(1));
        assert_eq!(mult_order(2, 11), Ok(10));
        assert_eq!(mult_order(-1, 11), Ok(2));
        assert!(matches!(mult_order(3, 15), Err(ArithError::NotCoprime { .. })));
    }

    #[test]
    fn primality_against_sieve() {
        let sieve = primes_up_to(20_000);
        let from_test: Vec<u64> = (0..=20_000).filter(|&n| is_prime(n)).collect();
        assert_eq!(sieve, from_test);
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(3_215_031_751));
        assert!(!is_prime(18_446_744_073_709_551_615));
    }

    #[test]
    fn factorize_roundtrip() {
        for n in [1u64, 2, 360, 1_000_000_007 * 998_244_353, 600_851_475_143] {
            let back: u64 = factorize(n).iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(back, n);
        }
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(primitive_root(7), Ok(3));
        assert_eq!(primitive_root(25), Ok(2));
        assert_eq!(primitive_root(11), Ok(2));
        assert!(primitive_root(15).is_err());
    }
}
