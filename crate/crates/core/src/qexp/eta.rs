//! Eta quotients `Π η(dz)^{r_d}` and partition numbers.
//!
//! `η(z) = q^{1/24} E(q)` with `E(q) = Π (1 − qⁿ)`. Positive powers are
//! assembled from the two sparse expansions
//!
//! * `E(q) = Σ_k (−1)^k q^{k(3k−1)/2}` (pentagonal numbers, `k ∈ Z`),
//! * `E(q)³ = Σ_{k≥0} (−1)^k (2k+1) q^{k(k+1)/2}`,
//!
//! paired into dense blocks and combined by transform products. Negative
//! powers are sparse divisions by the same expansions.

use serde::{Deserialize, Deserializer, Serialize};

use crate::arith::{CoeffRing, Int};

use super::kernel::{self, Base, ExactBase, ModBase, Sparse};
use super::series::GradedSeries;
use super::QexpError;

/// The formal product `Π η(d·z)^{r_d}` on level `N` (every `d | N`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EtaQuotient {
    eta: Vec<(u64, i64)>,
    level: u64,
}

impl<'de> Deserialize<'de> for EtaQuotient {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            eta: Vec<(u64, i64)>,
            level: u64,
        }
        let raw = Raw::deserialize(d)?;
        EtaQuotient::new(&raw.eta, raw.level).map_err(serde::de::Error::custom)
    }
}

impl EtaQuotient {
    /// Combine repeated `d`, drop zero exponents, check `d | N`.
    pub fn new(factors: &[(u64, i64)], level: u64) -> Result<Self, QexpError> {
        if level == 0 {
            return Err(QexpError::InvalidEta("level must be positive".into()));
        }
        let mut eta: Vec<(u64, i64)> = Vec::new();
        for &(d, r) in factors {
            if d == 0 || level % d != 0 {
                return Err(QexpError::InvalidEta(format!("{d} does not divide the level {level}")));
            }
            match eta.iter_mut().find(|(e, _)| *e == d) {
                Some(entry) => entry.1 += r,
                None => eta.push((d, r)),
            }
        }
        eta.retain(|&(_, r)| r != 0);
        eta.sort_unstable();
        Ok(EtaQuotient { eta, level })
    }

    /// `η(z)^r` on level 1.
    pub fn eta_power(r: i64) -> Self {
        Self::new(&[(1, r)], 1).expect("level 1 accepts d = 1")
    }

    pub fn factors(&self) -> &[(u64, i64)] {
        &self.eta
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    /// Twice the weight, `Σ r_d`.
    pub fn weight_twice(&self) -> i64 {
        self.eta.iter().map(|&(_, r)| r).sum()
    }

    /// Leading 24-scaled exponent `Σ d·r_d`.
    pub fn leading(&self) -> i64 {
        self.eta.iter().map(|&(d, r)| d as i64 * r).sum()
    }

    /// The support class `Σ d·r_d mod 24`.
    pub fn residue(&self) -> i64 {
        self.leading().rem_euclid(24)
    }
}

/// `E(q^d)` as a sparse series of length `len`.
fn pentagonal(d: usize, len: usize) -> Sparse<i64> {
    let mut out = vec![(0usize, 1i64)];
    for k in 1usize.. {
        let g1 = d * k * (3 * k - 1) / 2;
        if g1 >= len {
            break;
        }
        let sign = if k % 2 == 1 { -1 } else { 1 };
        out.push((g1, sign));
        let g2 = d * k * (3 * k + 1) / 2;
        if g2 < len {
            out.push((g2, sign));
        }
    }
    out
}

/// `E(q^d)³` as a sparse series of length `len`.
fn jacobi_cube(d: usize, len: usize) -> Sparse<i64> {
    (0usize..)
        .map(|k| (d * k * (k + 1) / 2, k))
        .take_while(|&(e, _)| e < len)
        .map(|(e, k)| (e, if k % 2 == 0 { 2 * k as i64 + 1 } else { -(2 * k as i64 + 1) }))
        .collect()
}

enum Factor<E> {
    Dense(Vec<E>),
    Sparse(Sparse<E>),
}

impl<E> Factor<E> {
    fn nnz(&self) -> usize {
        match self {
            Factor::Dense(v) => v.len(),
            Factor::Sparse(s) => s.len(),
        }
    }
}

fn settle<B: Base>(base: &B, v: Vec<B::E>) -> Factor<B::E> {
    let nnz = v.iter().filter(|x| !base.is_zero(x)).count();
    if nnz * super::SPARSE_RATIO < v.len() {
        Factor::Sparse(kernel::trim(base, &v))
    } else {
        Factor::Dense(v)
    }
}

fn lift<B: Base>(base: &B, s: &Sparse<i64>) -> Sparse<B::E> {
    s.iter().map(|&(e, c)| (e, base.from_i64(c))).collect()
}

/// `Π E(q^d)^{r_d}` truncated to `len` terms.
fn expand_integral<B: Base>(base: &B, factors: &[(u64, i64)], len: usize) -> Vec<B::E> {
    let mut pos: Vec<Factor<B::E>> = Vec::new();
    let mut divisors: Vec<Sparse<B::E>> = Vec::new();
    for &(d, r) in factors {
        let d = d as usize;
        let (cubes, singles) = (r.unsigned_abs() / 3, r.unsigned_abs() % 3);
        let cube = lift(base, &jacobi_cube(d, len));
        let single = lift(base, &pentagonal(d, len));
        for _ in 0..cubes {
            if r > 0 {
                pos.push(Factor::Sparse(cube.clone()));
            } else {
                divisors.push(cube.clone());
            }
        }
        for _ in 0..singles {
            if r > 0 {
                pos.push(Factor::Sparse(single.clone()));
            } else {
                divisors.push(single.clone());
            }
        }
    }
    if pos.is_empty() {
        pos.push(Factor::Sparse(vec![(0, base.from_i64(1))]));
    }
    while pos.len() > 1 {
        let mut sparse: Vec<usize> = (0..pos.len()).filter(|&i| matches!(pos[i], Factor::Sparse(_))).collect();
        sparse.sort_by_key(|&i| pos[i].nnz());
        let next = if sparse.len() >= 2 {
            let (i, j) = (sparse[0].max(sparse[1]), sparse[0].min(sparse[1]));
            let (Factor::Sparse(a), Factor::Sparse(b)) = (pos.swap_remove(i), pos.swap_remove(j)) else {
                unreachable!()
            };
            settle(base, kernel::mul_sparse_sparse(base, &a, &b, len))
        } else if sparse.len() == 1 {
            let Factor::Sparse(s) = pos.swap_remove(sparse[0]) else { unreachable!() };
            let Factor::Dense(d) = pos.swap_remove(0) else { unreachable!() };
            let sd = kernel::densify(base, &s, len);
            if kernel::prefer_transform(base, &d, &sd, s.len(), len) {
                Factor::Dense(kernel::mul_dense_dense(base, &d, &sd, len))
            } else {
                Factor::Dense(kernel::mul_dense_sparse(base, &d, &s, len))
            }
        } else {
            let Factor::Dense(a) = pos.swap_remove(1) else { unreachable!() };
            let Factor::Dense(b) = pos.swap_remove(0) else { unreachable!() };
            Factor::Dense(kernel::mul_dense_dense(base, &a, &b, len))
        };
        pos.push(next);
    }
    let mut cur = match pos.pop().expect("one factor remains") {
        Factor::Dense(v) => v,
        Factor::Sparse(s) => kernel::densify(base, &s, len),
    };
    for f in &divisors {
        cur = kernel::div_by_sparse(base, &cur, f, len).expect("constant term 1 is a unit");
    }
    cur
}

/// Integer coefficients of `Π E(q^d)^{r_d}` in `ring`'s scalar base.
fn expand_in_ring(ring: &CoeffRing, factors: &[(u64, i64)], len: usize) -> Vec<Int> {
    match ring.modulus() {
        Some(m) => {
            let b = ModBase { m };
            expand_integral(&b, factors, len).iter().map(|x| b.to_int(x)).collect()
        }
        None => expand_integral(&ExactBase, factors, len),
    }
}

/// `η(z)` truncated at index `P` (class 1 mod 24, sparse).
pub fn eta_expansion(prec: i64, ring: &CoeffRing) -> Result<GradedSeries, QexpError> {
    eta_quotient_expansion(&EtaQuotient::eta_power(1), prec, ring, false)
}

/// Expansion of an eta quotient up to 24-scaled index `prec`.
pub fn eta_quotient_expansion(
    e: &EtaQuotient,
    prec: i64,
    ring: &CoeffRing,
    allow_poles: bool,
) -> Result<GradedSeries, QexpError> {
    let lead = e.leading();
    if lead <= 0 && !allow_poles {
        return Err(QexpError::PoleAtInfinity { leading: lead });
    }
    if prec < lead {
        return Err(QexpError::PrecisionUnderflow {
            needed: lead,
            available: prec,
        });
    }
    let len = ((prec - lead) / 24 + 1) as usize;
    let scalars = expand_in_ring(ring, e.factors(), len);
    let d = ring.degree();
    let coords = if d == 1 {
        scalars
    } else {
        let mut v = vec![Int::ZERO; len * d];
        for (j, x) in scalars.into_iter().enumerate() {
            v[j * d] = x;
        }
        v
    };
    Ok(GradedSeries::from_dense(ring.clone(), lead, prec, coords))
}

fn partitions_in<B: Base>(base: &B, n_max: usize) -> Vec<B::E> {
    let one = base.from_i64(1);
    let minus = base.from_i64(-1);
    let mut p: Vec<B::E> = Vec::with_capacity(n_max + 1);
    p.push(one.clone());
    for n in 1..=n_max {
        let mut acc = base.zero();
        for k in 1usize.. {
            let g1 = k * (3 * k - 1) / 2;
            if g1 > n {
                break;
            }
            let s = if k % 2 == 1 { &one } else { &minus };
            base.add_mul(&mut acc, s, &p[n - g1]);
            let g2 = k * (3 * k + 1) / 2;
            if g2 <= n {
                base.add_mul(&mut acc, s, &p[n - g2]);
            }
        }
        p.push(acc);
    }
    p
}

/// `p(0), …, p(n_max)` by the pentagonal recurrence, exactly (`None`, or an
/// exact ring) or reduced into a residue ring.
pub fn partition_numbers(n_max: usize, ring: Option<&CoeffRing>) -> Vec<Int> {
    match ring.and_then(CoeffRing::modulus) {
        Some(m) => {
            let b = ModBase { m };
            partitions_in(&b, n_max).iter().map(|x| b.to_int(x)).collect()
        }
        None => partitions_in(&ExactBase, n_max),
    }
}
