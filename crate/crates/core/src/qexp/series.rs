//! Truncated q-series: [`GradedSeries`] on the 1/24-grading and
//! [`IntegerSeries`] in integral powers of `q`.

use serde::Serialize;

use crate::arith::{CoeffRing, Int, RingElement};

use super::kernel::{self, Base, ExactBase, ModBase, Sparse};
use super::QexpError;

/// Storage switches to sparse when fewer than one slot in this many is nonzero.
pub const SPARSE_RATIO: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Store {
    /// `slots × degree` coordinates, row-major.
    Dense(Vec<Int>),
    /// Nonzero slots in increasing order with their coordinates.
    Sparse(Vec<(usize, Vec<Int>)>),
}

fn next_in_class(n: i64, residue: i64) -> i64 {
    n + (residue - n).rem_euclid(24)
}

/// Lowest positive index in the class `residue (mod 24)`.
pub fn canonical_start(residue: i64) -> i64 {
    next_in_class(1, residue)
}

/// `Σ a(n) q^{n/24}` over one residue class of `n` modulo 24, known for all
/// `n ≤ prec`; coefficients with `n < start` are zero.
#[derive(Clone, Debug)]
pub struct GradedSeries {
    ring: CoeffRing,
    start: i64,
    prec: i64,
    store: Store,
}

impl PartialEq for GradedSeries {
    /// Same ring, class and precision with identical coefficients.
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring
            && self.residue() == other.residue()
            && self.prec == other.prec
            && self.first_mismatch(other).is_none()
    }
}

/// `Σ b(n) qⁿ` known for `0 ≤ n ≤ prec`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerSeries {
    ring: CoeffRing,
    prec: i64,
    /// `(prec + 1) × degree` coordinates.
    data: Vec<Int>,
}

#[derive(Serialize)]
struct TermJson {
    n: i64,
    value: RingElement,
}

/// JSON-friendly view: nonzero terms only.
#[derive(Serialize)]
pub struct SeriesJson {
    ring: String,
    residue: Option<i64>,
    prec: i64,
    terms: Vec<TermJson>,
}

impl GradedSeries {
    pub(crate) fn from_dense(ring: CoeffRing, start: i64, prec: i64, mut coords: Vec<Int>) -> Self {
        let d = ring.degree();
        let slots = slot_count(start, prec);
        coords.resize(slots * d, Int::ZERO);
        let mut s = GradedSeries {
            ring,
            start,
            prec,
            store: Store::Dense(coords),
        };
        s.normalize();
        s
    }

    fn from_sparse(ring: CoeffRing, start: i64, prec: i64, mut terms: Vec<(usize, Vec<Int>)>) -> Self {
        let slots = slot_count(start, prec);
        terms.retain(|(j, v)| *j < slots && v.iter().any(|x| !x.is_zero()));
        let mut s = GradedSeries {
            ring,
            start,
            prec,
            store: Store::Sparse(terms),
        };
        s.normalize();
        s
    }

    /// Pick the storage by density.
    fn normalize(&mut self) {
        let slots = self.slots();
        let d = self.ring.degree();
        let nnz = self.nnz();
        let want_sparse = nnz * SPARSE_RATIO < slots;
        match (&mut self.store, want_sparse) {
            (Store::Dense(v), true) => {
                let terms = v
                    .chunks(d)
                    .enumerate()
                    .filter(|(_, c)| c.iter().any(|x| !x.is_zero()))
                    .map(|(j, c)| (j, c.to_vec()))
                    .collect();
                self.store = Store::Sparse(terms);
            }
            (Store::Sparse(t), false) => {
                let mut v = vec![Int::ZERO; slots * d];
                for (j, c) in t.iter() {
                    v[j * d..(j + 1) * d].clone_from_slice(c);
                }
                self.store = Store::Dense(v);
            }
            _ => {}
        }
    }

    pub fn zero(ring: &CoeffRing, residue: i64, prec: i64) -> Self {
        Self::from_sparse(ring.clone(), canonical_start(residue), prec, vec![])
    }

    /// Build from `(n, value)` terms; every `n` must lie in the class and not exceed `prec`.
    pub fn from_terms(
        ring: &CoeffRing,
        residue: i64,
        prec: i64,
        terms: impl IntoIterator<Item = (i64, RingElement)>,
    ) -> Result<Self, QexpError> {
        let residue = residue.rem_euclid(24);
        let terms: Vec<(i64, RingElement)> = terms.into_iter().collect();
        let mut start = canonical_start(residue);
        for (n, v) in &terms {
            if n.rem_euclid(24) != residue {
                return Err(QexpError::OffClass { n: *n, residue });
            }
            if *n > prec {
                return Err(QexpError::BeyondPrecision { n: *n, prec });
            }
            if v.coords.len() != ring.degree() {
                return Err(QexpError::RingMismatch);
            }
            start = start.min(*n);
        }
        let mut slots: Vec<(usize, Vec<Int>)> = terms
            .into_iter()
            .map(|(n, v)| (((n - start) / 24) as usize, ring.reduce_poly(v.coords).coords))
            .collect();
        slots.sort_by_key(|(j, _)| *j);
        slots.dedup_by(|b, a| {
            if a.0 == b.0 {
                let sum = ring.add(&RingElement { coords: a.1.clone() }, &RingElement { coords: b.1.clone() });
                a.1 = sum.coords;
                true
            } else {
                false
            }
        });
        Ok(Self::from_sparse(ring.clone(), start, prec, slots))
    }

    /// Integer coefficients `(n, a(n))` mapped into `ring`.
    pub fn from_integers(ring: &CoeffRing, residue: i64, prec: i64, terms: &[(i64, i64)]) -> Result<Self, QexpError> {
        Self::from_terms(ring, residue, prec, terms.iter().map(|&(n, a)| (n, ring.from_i64(a))))
    }

    pub fn ring(&self) -> &CoeffRing {
        &self.ring
    }

    /// The class `r̄ ∈ [0, 24)` carrying the support.
    pub fn residue(&self) -> i64 {
        self.start.rem_euclid(24)
    }

    /// Index of storage slot 0; every coefficient below it is zero.
    pub fn start(&self) -> i64 {
        self.start
    }

    /// Largest index with a guaranteed-correct coefficient.
    pub fn prec(&self) -> i64 {
        self.prec
    }

    fn slots(&self) -> usize {
        slot_count(self.start, self.prec)
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.store, Store::Sparse(_))
    }

    pub fn nnz(&self) -> usize {
        let d = self.ring.degree();
        match &self.store {
            Store::Dense(v) => v.chunks(d).filter(|c| c.iter().any(|x| !x.is_zero())).count(),
            Store::Sparse(t) => t.len(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.nnz() == 0
    }

    fn slot_of(&self, n: i64) -> Option<usize> {
        if n < self.start || n > self.prec || (n - self.start) % 24 != 0 {
            None
        } else {
            Some(((n - self.start) / 24) as usize)
        }
    }

    /// Coordinates of `a(n)`, or `None` when the coefficient is zero. Indices
    /// beyond the precision are an error, not zero.
    pub fn coeff_coords(&self, n: i64) -> Result<Option<&[Int]>, QexpError> {
        if n > self.prec {
            return Err(QexpError::BeyondPrecision { n, prec: self.prec });
        }
        let Some(j) = self.slot_of(n) else {
            return Ok(None);
        };
        let d = self.ring.degree();
        Ok(match &self.store {
            Store::Dense(v) => {
                let c = &v[j * d..(j + 1) * d];
                c.iter().any(|x| !x.is_zero()).then_some(c)
            }
            Store::Sparse(t) => t.binary_search_by_key(&j, |(i, _)| *i).ok().map(|i| t[i].1.as_slice()),
        })
    }

    /// `a(n)` for `n ≤ prec` (zero off the class).
    pub fn coeff(&self, n: i64) -> Result<RingElement, QexpError> {
        Ok(match self.coeff_coords(n)? {
            Some(c) => RingElement { coords: c.to_vec() },
            None => self.ring.zero(),
        })
    }

    /// Nonzero terms in increasing index order.
    pub fn terms(&self) -> Vec<(i64, RingElement)> {
        let d = self.ring.degree();
        match &self.store {
            Store::Dense(v) => v
                .chunks(d)
                .enumerate()
                .filter(|(_, c)| c.iter().any(|x| !x.is_zero()))
                .map(|(j, c)| (self.start + 24 * j as i64, RingElement { coords: c.to_vec() }))
                .collect(),
            Store::Sparse(t) => t
                .iter()
                .map(|(j, c)| (self.start + 24 * *j as i64, RingElement { coords: c.clone() }))
                .collect(),
        }
    }

    /// Lowest index with a nonzero coefficient.
    pub fn valuation(&self) -> Option<i64> {
        let d = self.ring.degree();
        let j = match &self.store {
            Store::Dense(v) => v.chunks(d).position(|c| c.iter().any(|x| !x.is_zero())),
            Store::Sparse(t) => t.first().map(|(j, _)| *j),
        }?;
        Some(self.start + 24 * j as i64)
    }

    /// Lowest index whose coefficient is not known to be zero.
    fn known_zero_below(&self) -> i64 {
        self.valuation().unwrap_or(self.start + 24 * self.slots() as i64)
    }

    /// Row-major coordinates of all slots.
    pub(crate) fn dense_coords(&self) -> Vec<Int> {
        let d = self.ring.degree();
        match &self.store {
            Store::Dense(v) => v.clone(),
            Store::Sparse(t) => {
                let mut v = vec![Int::ZERO; self.slots() * d];
                for (j, c) in t {
                    v[j * d..(j + 1) * d].clone_from_slice(c);
                }
                v
            }
        }
    }

    /// Same coefficients with a lower storage start (must be in the class).
    fn rebased(&self, new_start: i64) -> Vec<Int> {
        debug_assert!(new_start <= self.start && (self.start - new_start) % 24 == 0);
        let shift = ((self.start - new_start) / 24) as usize;
        let d = self.ring.degree();
        let mut v = vec![Int::ZERO; shift * d];
        v.extend(self.dense_coords());
        v
    }

    pub fn truncate(&self, prec: i64) -> Self {
        let prec = prec.min(self.prec);
        let d = self.ring.degree();
        match &self.store {
            Store::Dense(v) => {
                let keep = slot_count(self.start, prec) * d;
                Self::from_dense(self.ring.clone(), self.start, prec, v[..keep.min(v.len())].to_vec())
            }
            Store::Sparse(t) => Self::from_sparse(self.ring.clone(), self.start, prec, t.clone()),
        }
    }

    fn binary(&self, other: &Self, sub: bool) -> Result<Self, QexpError> {
        if self.ring != other.ring {
            return Err(QexpError::RingMismatch);
        }
        if self.residue() != other.residue() {
            return Err(QexpError::ResidueMismatch(self.residue(), other.residue()));
        }
        let start = self.start.min(other.start);
        let prec = self.prec.min(other.prec);
        let a = self.truncate(prec).rebased(start);
        let b = other.truncate(prec).rebased(start);
        let len = slot_count(start, prec) * self.ring.degree();
        let ring = &self.ring;
        let out: Vec<Int> = (0..len)
            .map(|i| {
                let x = a.get(i).unwrap_or(&Int::ZERO);
                let y = b.get(i).unwrap_or(&Int::ZERO);
                ring.reduce_int(&if sub { x - y } else { x + y })
            })
            .collect();
        Ok(Self::from_dense(ring.clone(), start, prec, out))
    }

    pub fn add(&self, other: &Self) -> Result<Self, QexpError> {
        self.binary(other, false)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, QexpError> {
        self.binary(other, true)
    }

    fn map_coeffs(&self, f: impl Fn(&RingElement) -> RingElement) -> Self {
        let d = self.ring.degree();
        let terms = self
            .terms()
            .into_iter()
            .map(|(n, v)| (((n - self.start) / 24) as usize, f(&v).coords))
            .collect::<Vec<_>>();
        debug_assert!(terms.iter().all(|(_, c)| c.len() == d));
        Self::from_sparse(self.ring.clone(), self.start, self.prec, terms)
    }

    pub fn scale(&self, c: &RingElement) -> Self {
        if self.ring.degree() == 1 {
            let k = &c.coords[0];
            let ring = &self.ring;
            return match &self.store {
                Store::Dense(v) => {
                    let w = v.iter().map(|x| ring.reduce_int(&(x * k))).collect();
                    Self::from_dense(ring.clone(), self.start, self.prec, w)
                }
                Store::Sparse(_) => self.map_coeffs(|x| ring.scale(x, k)),
            };
        }
        self.map_coeffs(|x| self.ring.mul(x, c))
    }

    pub fn scale_int(&self, k: &Int) -> Self {
        self.scale(&self.ring.from_int(k))
    }

    pub fn neg(&self) -> Self {
        self.scale_int(&Int::from(-1i64))
    }

    /// Image under the reduction map into `target`.
    pub fn reduce_into(&self, target: &CoeffRing) -> Result<Self, QexpError> {
        let terms = self
            .terms()
            .into_iter()
            .map(|(n, v)| Ok((((n - self.start) / 24) as usize, target.map_from(&self.ring, &v)?.coords)))
            .collect::<Result<Vec<_>, QexpError>>()?;
        Ok(Self::from_sparse(target.clone(), self.start, self.prec, terms))
    }

    /// First index `n ≤ min(prec)` where the two series differ.
    pub fn first_mismatch(&self, other: &Self) -> Option<i64> {
        let prec = self.prec.min(other.prec);
        if self.residue() != other.residue() {
            let a = self.truncate(prec).valuation();
            let b = other.truncate(prec).valuation();
            return match (a, b) {
                (None, None) => None,
                (Some(x), None) | (None, Some(x)) => Some(x),
                (Some(x), Some(y)) => Some(x.min(y)),
            };
        }
        let (ta, tb) = (self.truncate(prec).terms(), other.truncate(prec).terms());
        let (mut i, mut j) = (0, 0);
        let zero = self.ring.zero();
        while i < ta.len() || j < tb.len() {
            let na = ta.get(i).map_or(i64::MAX, |t| t.0);
            let nb = tb.get(j).map_or(i64::MAX, |t| t.0);
            let n = na.min(nb);
            let va = if na == n { &ta[i].1 } else { &zero };
            let vb = if nb == n { &tb[j].1 } else { &zero };
            if va != vb {
                return Some(n);
            }
            if na == n {
                i += 1;
            }
            if nb == n {
                j += 1;
            }
        }
        None
    }

    /// `F | U_m`: `a(mn)` at index `n`, precision `⌊P/m⌋`.
    pub fn apply_u(&self, m: u64) -> Result<Self, QexpError> {
        if m == 0 || m % 2 == 0 || m % 3 == 0 {
            return Err(QexpError::NotCoprimeTo24(m));
        }
        let m = m as i64;
        // m² ≡ 1 (mod 24), so m is its own inverse.
        let residue = (m * self.residue()).rem_euclid(24);
        let prec = self.prec.div_euclid(m);
        let start = next_in_class(ceil_div(self.start, m), residue);
        let d = self.ring.degree();
        let slots = slot_count(start, prec);
        let terms: Vec<(usize, Vec<Int>)> = (0..slots)
            .filter_map(|j| {
                let n = start + 24 * j as i64;
                self.coeff_coords(m * n)
                    .ok()
                    .flatten()
                    .map(|c| (j, c.to_vec()))
            })
            .collect();
        debug_assert!(terms.iter().all(|(_, c)| c.len() == d));
        Ok(Self::from_sparse(self.ring.clone(), start, prec, terms))
    }

    /// `F | V_m`: index dilation `n ↦ mn`, precision `mP`.
    pub fn apply_v(&self, m: u64) -> Result<Self, QexpError> {
        if m == 0 {
            return Err(QexpError::InvalidOperator("V_0".into()));
        }
        let m = m as i64;
        let start = m * self.start;
        let prec = m * self.prec;
        let terms = self
            .terms()
            .into_iter()
            .map(|(n, v)| (((m * n - start) / 24) as usize, v.coords))
            .collect();
        Ok(Self::from_sparse(self.ring.clone(), start, prec, terms))
    }

    /// Cauchy product; residues add, precision is the exact truncation bound.
    pub fn mul(&self, other: &Self) -> Result<Self, QexpError> {
        if self.ring != other.ring {
            return Err(QexpError::RingMismatch);
        }
        let start = self.start + other.start;
        let prec = (self.prec + other.known_zero_below()).min(other.prec + self.known_zero_below());
        let slots = slot_count(start, prec);
        let coords = multiply_columns(&self.ring, &Operand::of_graded(self), &Operand::of_graded(other), slots);
        Ok(Self::from_dense(self.ring.clone(), start, prec, coords))
    }

    /// Structural invariants: storage matches the declared class and horizon.
    pub fn check_invariants(&self) -> bool {
        let d = self.ring.degree();
        let slots = self.slots();
        let ok_store = match &self.store {
            Store::Dense(v) => v.len() == slots * d,
            Store::Sparse(t) => {
                t.windows(2).all(|w| w[0].0 < w[1].0) && t.iter().all(|(j, c)| *j < slots && c.len() == d)
            }
        };
        let ok_terms = self.terms().iter().all(|(n, _)| n.rem_euclid(24) == self.residue() && *n <= self.prec);
        ok_store && ok_terms
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            ring: self.ring.to_string(),
            residue: Some(self.residue()),
            prec: self.prec,
            terms: self.terms().into_iter().map(|(n, value)| TermJson { n, value }).collect(),
        }
    }
}

fn ceil_div(a: i64, b: i64) -> i64 {
    -((-a).div_euclid(b))
}

pub(crate) fn slot_count(start: i64, prec: i64) -> usize {
    if prec < start {
        0
    } else {
        ((prec - start) / 24 + 1) as usize
    }
}

impl IntegerSeries {
    pub fn zero(ring: &CoeffRing, prec: i64) -> Self {
        IntegerSeries {
            ring: ring.clone(),
            prec,
            data: vec![Int::ZERO; (prec.max(-1) + 1) as usize * ring.degree()],
        }
    }

    /// Coefficients `b(0), b(1), …, b(prec)`.
    pub fn from_coeffs(ring: &CoeffRing, coeffs: Vec<RingElement>) -> Result<Self, QexpError> {
        let prec = coeffs.len() as i64 - 1;
        let mut data = Vec::with_capacity(coeffs.len() * ring.degree());
        for c in coeffs {
            if c.coords.len() != ring.degree() {
                return Err(QexpError::RingMismatch);
            }
            data.extend(ring.reduce_poly(c.coords).coords);
        }
        Ok(IntegerSeries {
            ring: ring.clone(),
            prec,
            data,
        })
    }

    pub fn from_integers(ring: &CoeffRing, coeffs: &[i64]) -> Self {
        Self::from_coeffs(ring, coeffs.iter().map(|&c| ring.from_i64(c)).collect()).expect("scalars fit the ring")
    }

    pub(crate) fn from_flat(ring: CoeffRing, prec: i64, mut data: Vec<Int>) -> Self {
        data.resize((prec.max(-1) + 1) as usize * ring.degree(), Int::ZERO);
        IntegerSeries { ring, prec, data }
    }

    pub fn ring(&self) -> &CoeffRing {
        &self.ring
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    pub fn coeff_coords(&self, n: i64) -> Result<&[Int], QexpError> {
        if n < 0 || n > self.prec {
            return Err(QexpError::BeyondPrecision { n, prec: self.prec });
        }
        let d = self.ring.degree();
        Ok(&self.data[n as usize * d..(n as usize + 1) * d])
    }

    pub fn coeff(&self, n: i64) -> Result<RingElement, QexpError> {
        Ok(RingElement {
            coords: self.coeff_coords(n)?.to_vec(),
        })
    }

    pub fn coeffs(&self) -> Vec<RingElement> {
        self.data
            .chunks(self.ring.degree())
            .map(|c| RingElement { coords: c.to_vec() })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Int::is_zero)
    }

    pub fn valuation(&self) -> Option<i64> {
        let d = self.ring.degree();
        self.data
            .chunks(d)
            .position(|c| c.iter().any(|x| !x.is_zero()))
            .map(|j| j as i64)
    }

    pub fn truncate(&self, prec: i64) -> Self {
        let prec = prec.min(self.prec);
        let keep = (prec.max(-1) + 1) as usize * self.ring.degree();
        IntegerSeries {
            ring: self.ring.clone(),
            prec,
            data: self.data[..keep].to_vec(),
        }
    }

    fn binary(&self, other: &Self, sub: bool) -> Result<Self, QexpError> {
        if self.ring != other.ring {
            return Err(QexpError::RingMismatch);
        }
        let prec = self.prec.min(other.prec);
        let keep = (prec.max(-1) + 1) as usize * self.ring.degree();
        let data = self.data[..keep]
            .iter()
            .zip(&other.data[..keep])
            .map(|(x, y)| self.ring.reduce_int(&if sub { x - y } else { x + y }))
            .collect();
        Ok(IntegerSeries {
            ring: self.ring.clone(),
            prec,
            data,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self, QexpError> {
        self.binary(other, false)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, QexpError> {
        self.binary(other, true)
    }

    pub fn scale(&self, c: &RingElement) -> Self {
        let coeffs = self.coeffs().iter().map(|x| self.ring.mul(x, c)).collect();
        Self::from_coeffs(&self.ring, coeffs).expect("same ring")
    }

    /// Set `b(n)` (used to build perturbed inputs in diagnostics).
    pub fn set_coeff(&mut self, n: i64, v: &RingElement) -> Result<(), QexpError> {
        if n < 0 || n > self.prec {
            return Err(QexpError::BeyondPrecision { n, prec: self.prec });
        }
        let d = self.ring.degree();
        let v = self.ring.reduce_poly(v.coords.clone());
        self.data[n as usize * d..(n as usize + 1) * d].clone_from_slice(&v.coords);
        Ok(())
    }

    pub fn first_mismatch(&self, other: &Self) -> Option<i64> {
        let prec = self.prec.min(other.prec);
        (0..=prec).find(|&n| self.coeff_coords(n).ok() != other.coeff_coords(n).ok())
    }

    pub fn reduce_into(&self, target: &CoeffRing) -> Result<Self, QexpError> {
        let coeffs = self
            .coeffs()
            .iter()
            .map(|c| target.map_from(&self.ring, c))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_coeffs(target, coeffs)
    }

    /// `f | U_m`: `b(mn)`, precision `⌊P/m⌋`.
    pub fn apply_u(&self, m: u64) -> Result<Self, QexpError> {
        if m == 0 {
            return Err(QexpError::InvalidOperator("U_0".into()));
        }
        let m = m as i64;
        let prec = self.prec.div_euclid(m);
        let d = self.ring.degree();
        let mut data = Vec::with_capacity((prec + 1) as usize * d);
        for n in 0..=prec {
            data.extend_from_slice(self.coeff_coords(m * n)?);
        }
        Ok(IntegerSeries {
            ring: self.ring.clone(),
            prec,
            data,
        })
    }

    /// `f | V_m`: `b(n/m)` when `m | n`, precision `mP`.
    pub fn apply_v(&self, m: u64) -> Result<Self, QexpError> {
        if m == 0 {
            return Err(QexpError::InvalidOperator("V_0".into()));
        }
        let m = m as i64;
        let prec = m * self.prec;
        let d = self.ring.degree();
        let mut data = vec![Int::ZERO; (prec + 1) as usize * d];
        for n in 0..=self.prec {
            let src = self.coeff_coords(n)?;
            let k = (m * n) as usize * d;
            data[k..k + d].clone_from_slice(src);
        }
        Ok(IntegerSeries {
            ring: self.ring.clone(),
            prec,
            data,
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self, QexpError> {
        if self.ring != other.ring {
            return Err(QexpError::RingMismatch);
        }
        let va = self.valuation().unwrap_or(self.prec + 1);
        let vb = other.valuation().unwrap_or(other.prec + 1);
        let prec = (self.prec + vb).min(other.prec + va);
        let len = (prec.max(-1) + 1) as usize;
        let a = Operand::Dense(self.data.clone());
        let b = Operand::Dense(other.data.clone());
        let coords = multiply_columns(&self.ring, &a, &b, len);
        Ok(IntegerSeries::from_flat(self.ring.clone(), prec, coords))
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            ring: self.ring.to_string(),
            residue: None,
            prec: self.prec,
            terms: self
                .coeffs()
                .into_iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(n, value)| TermJson { n: n as i64, value })
                .collect(),
        }
    }
}

/// A row-major coordinate table in either storage.
pub(crate) enum Operand {
    Dense(Vec<Int>),
    Sparse(Vec<(usize, Vec<Int>)>),
}

impl Operand {
    fn of_graded(s: &GradedSeries) -> Self {
        match &s.store {
            Store::Dense(v) => Operand::Dense(v.clone()),
            Store::Sparse(t) => Operand::Sparse(t.clone()),
        }
    }

    fn column<B: Base>(&self, base: &B, c: usize, d: usize) -> Column<B::E> {
        match self {
            Operand::Dense(v) => Column::Dense(v.iter().skip(c).step_by(d).map(|x| base.from_int(x)).collect()),
            Operand::Sparse(t) => Column::Sparse(
                t.iter()
                    .filter(|(_, x)| !x[c].is_zero())
                    .map(|(j, x)| (*j, base.from_int(&x[c])))
                    .collect(),
            ),
        }
    }
}

pub(crate) enum Column<E> {
    Dense(Vec<E>),
    Sparse(Sparse<E>),
}

pub(crate) fn mul_columns<B: Base>(base: &B, a: &Column<B::E>, b: &Column<B::E>, len: usize) -> Vec<B::E> {
    match (a, b) {
        (Column::Sparse(x), Column::Sparse(y)) => kernel::mul_sparse_sparse(base, x, y, len),
        (Column::Dense(x), Column::Sparse(s)) | (Column::Sparse(s), Column::Dense(x)) => {
            let sd = kernel::densify(base, s, x.len().min(len));
            if kernel::prefer_transform(base, x, &sd, s.len(), len) {
                kernel::mul_dense_dense(base, x, &sd, len)
            } else {
                kernel::mul_dense_sparse(base, x, s, len)
            }
        }
        (Column::Dense(x), Column::Dense(y)) => kernel::mul_dense_dense(base, x, y, len),
    }
}

fn multiply_columns(ring: &CoeffRing, a: &Operand, b: &Operand, len: usize) -> Vec<Int> {
    match ring.modulus() {
        Some(m) => multiply_in(ring, &ModBase { m }, a, b, len),
        None => multiply_in(ring, &ExactBase, a, b, len),
    }
}

fn multiply_in<B: Base>(ring: &CoeffRing, base: &B, a: &Operand, b: &Operand, len: usize) -> Vec<Int> {
    let d = ring.degree();
    let cols_a: Vec<Column<B::E>> = (0..d).map(|c| a.column(base, c, d)).collect();
    let cols_b: Vec<Column<B::E>> = (0..d).map(|c| b.column(base, c, d)).collect();
    if d == 1 {
        let v = mul_columns(base, &cols_a[0], &cols_b[0], len);
        return v.iter().map(|x| base.to_int(x)).collect();
    }
    // Polynomial coordinate i + j collects column products, then reduce mod Φ.
    let mut poly: Vec<Vec<Int>> = vec![vec![Int::ZERO; 2 * d - 1]; len];
    for (i, ca) in cols_a.iter().enumerate() {
        for (j, cb) in cols_b.iter().enumerate() {
            let v = mul_columns(base, ca, cb, len);
            for (slot, x) in v.iter().enumerate() {
                if !base.is_zero(x) {
                    let t = &poly[slot][i + j] + &base.to_int(x);
                    poly[slot][i + j] = t;
                }
            }
        }
    }
    poly.into_iter().flat_map(|p| ring.reduce_poly(p).coords).collect()
}
