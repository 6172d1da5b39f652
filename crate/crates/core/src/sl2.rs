//! Finite-group model of the `SL₂(F_ℓ)` facts behind the Galois-image
//! argument: 2×2 matrices over `F_ℓ`, conjugacy, subgroup closure, product
//! surjectivity and the search for an element whose components are all
//! conjugate to `±γ`.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{inv_mod, is_prime, primitive_root};
use crate::par;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Sl2Error {
    #[error("ell = {0} must be a prime >= 5")]
    BadField(u64),
    #[error("matrix is singular")]
    Singular,
    #[error("matrices over different fields")]
    FieldMismatch,
    #[error("exhaustive search is limited to ell <= 7 and s <= 3 (got ell = {ell}, s = {s})")]
    FeasibilityBound { ell: u64, s: usize },
    #[error("invalid representation tuple: {0}")]
    InvalidTuple(String),
    #[error("no element with every component conjugate to ±gamma")]
    NotFound,
}

/// An invertible 2×2 matrix `(a b; c d)` over `F_ℓ`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct MatFl {
    pub ell: u64,
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

impl fmt::Debug for MatFl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {}; {} {}) mod {}", self.a, self.b, self.c, self.d, self.ell)
    }
}

fn red(x: i64, ell: u64) -> u64 {
    x.rem_euclid(ell as i64) as u64
}

fn check_field(ell: u64) -> Result<(), Sl2Error> {
    if ell < 5 || !is_prime(ell) {
        return Err(Sl2Error::BadField(ell));
    }
    Ok(())
}

impl MatFl {
    pub fn new(ell: u64, a: i64, b: i64, c: i64, d: i64) -> Result<MatFl, Sl2Error> {
        check_field(ell)?;
        let m = MatFl {
            ell,
            a: red(a, ell),
            b: red(b, ell),
            c: red(c, ell),
            d: red(d, ell),
        };
        if m.det() == 0 {
            return Err(Sl2Error::Singular);
        }
        Ok(m)
    }

    fn raw(ell: u64, a: u64, b: u64, c: u64, d: u64) -> MatFl {
        MatFl { ell, a, b, c, d }
    }

    pub fn identity(ell: u64) -> MatFl {
        MatFl::raw(ell, 1, 0, 0, 1)
    }

    pub fn scalar(ell: u64, x: i64) -> MatFl {
        let x = red(x, ell);
        MatFl::raw(ell, x, 0, 0, x)
    }

    /// Companion matrix `(0 −det; 1 tr)` of `x² − tr·x + det`.
    pub fn companion(ell: u64, cp: CharPoly) -> MatFl {
        MatFl::raw(ell, 0, (ell - cp.det % ell) % ell, 1, cp.trace % ell)
    }

    /// `γ₀ = (1 1; −1 0)`, of order 6 with `γ₀³ = −I`.
    pub fn gamma0(ell: u64) -> MatFl {
        MatFl::raw(ell, 1, 1, ell - 1, 0)
    }

    pub fn det(&self) -> u64 {
        let l = self.ell as u128;
        ((self.a as u128 * self.d as u128 + l * l - (self.b as u128 * self.c as u128) % l) % l) as u64
    }

    pub fn trace(&self) -> u64 {
        (self.a + self.d) % self.ell
    }

    pub fn is_sl2(&self) -> bool {
        self.det() == 1
    }

    pub fn is_scalar(&self) -> bool {
        self.b == 0 && self.c == 0 && self.a == self.d
    }

    pub fn mul(&self, o: &MatFl) -> MatFl {
        let l = self.ell;
        let m = |x: u64, y: u64, z: u64, w: u64| (x * y + z * w) % l;
        MatFl::raw(
            l,
            m(self.a, o.a, self.b, o.c),
            m(self.a, o.b, self.b, o.d),
            m(self.c, o.a, self.d, o.c),
            m(self.c, o.b, self.d, o.d),
        )
    }

    pub fn neg(&self) -> MatFl {
        let l = self.ell;
        MatFl::raw(l, (l - self.a) % l, (l - self.b) % l, (l - self.c) % l, (l - self.d) % l)
    }

    pub fn inverse(&self) -> MatFl {
        let l = self.ell;
        let di = inv_mod(self.det() as i64, l).expect("invertible");
        let s = |x: u64| x * di % l;
        MatFl::raw(l, s(self.d), s((l - self.b) % l), s((l - self.c) % l), s(self.a))
    }

    pub fn pow(&self, mut e: u64) -> MatFl {
        let mut base = *self;
        let mut acc = MatFl::identity(self.ell);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn square(&self) -> MatFl {
        self.mul(self)
    }

    pub fn conjugate_by(&self, g: &MatFl) -> MatFl {
        g.mul(self).mul(&g.inverse())
    }

    pub fn order(&self) -> u64 {
        let id = MatFl::identity(self.ell);
        let mut x = *self;
        let mut k = 1;
        while x != id {
            x = x.mul(self);
            k += 1;
        }
        k
    }

    pub fn char_poly(&self) -> CharPoly {
        char_poly(self)
    }

    /// Position in `0..ℓ⁴`.
    fn index(&self) -> u64 {
        let l = self.ell;
        self.a + l * (self.b + l * (self.c + l * self.d))
    }
}

/// `x² − trace·x + det` over `F_ℓ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CharPoly {
    pub trace: u64,
    pub det: u64,
}

impl fmt::Display for CharPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x^2 - {}x + {}", self.trace, self.det)
    }
}

pub fn char_poly(m: &MatFl) -> CharPoly {
    CharPoly {
        trace: m.trace(),
        det: m.det(),
    }
}

/// `GL₂(F_ℓ)`-conjugacy: scalars are conjugate only to themselves, and a
/// non-scalar matrix is conjugate to the companion matrix of its
/// characteristic polynomial, so two non-scalars are conjugate iff their
/// characteristic polynomials agree.
pub fn is_conjugate(x: &MatFl, y: &MatFl) -> bool {
    if x.ell != y.ell {
        return false;
    }
    match (x.is_scalar(), y.is_scalar()) {
        (true, true) => x == y,
        (false, false) => char_poly(x) == char_poly(y),
        _ => false,
    }
}

/// Search over all `g ∈ GL₂(F_ℓ)` for `g x g⁻¹ = y`.
pub fn is_conjugate_brute(x: &MatFl, y: &MatFl) -> bool {
    x.ell == y.ell && enumerate_gl2(x.ell).iter().any(|g| &x.conjugate_by(g) == y)
}

pub fn enumerate_gl2(ell: u64) -> Vec<MatFl> {
    let mut out = Vec::new();
    for a in 0..ell {
        for b in 0..ell {
            for c in 0..ell {
                for d in 0..ell {
                    let m = MatFl::raw(ell, a, b, c, d);
                    if m.det() != 0 {
                        out.push(m);
                    }
                }
            }
        }
    }
    out
}

pub fn enumerate_sl2(ell: u64) -> Vec<MatFl> {
    enumerate_gl2(ell).into_iter().filter(MatFl::is_sl2).collect()
}

pub fn sl2_order(ell: u64) -> u64 {
    ell * (ell * ell - 1)
}

/// `S = (0 −1; 1 0)` and `T = (1 1; 0 1)`, which generate `SL₂(F_ℓ)`.
pub fn sl2_generators(ell: u64) -> [MatFl; 2] {
    [MatFl::raw(ell, 0, ell - 1, 1, 0), MatFl::raw(ell, 1, 1, 0, 1)]
}

/// `SL₂` generators plus `diag(g, 1)` for a primitive root `g`.
pub fn gl2_generators(ell: u64) -> Vec<MatFl> {
    let g = primitive_root(ell).expect("prime modulus");
    let [s, t] = sl2_generators(ell);
    vec![s, t, MatFl::raw(ell, g, 0, 0, 1)]
}

/// Representatives of the conjugacy classes of `SL₂(F_ℓ)` under `SL₂`-conjugation.
pub fn sl2_class_representatives(ell: u64) -> Vec<MatFl> {
    let group = enumerate_sl2(ell);
    let mut seen: HashSet<MatFl> = HashSet::new();
    let mut reps = Vec::new();
    for g in &group {
        if seen.contains(g) {
            continue;
        }
        reps.push(*g);
        for h in &group {
            seen.insert(g.conjugate_by(h));
        }
    }
    reps
}

/// Breadth-first closure of the monoid (hence group) generated by `gens` in
/// `GL₂(F_ℓ)^s`, calling `visit` on each new element; stops early when it
/// returns `true`. Returns the number of elements visited and whether it stopped.
fn closure_walk(
    ell: u64,
    gens: &[Vec<MatFl>],
    limit: usize,
    mut visit: impl FnMut(&[MatFl]) -> bool,
) -> Result<(usize, bool), Sl2Error> {
    let s = gens.first().map_or(0, Vec::len);
    let key = |t: &[MatFl]| -> u128 {
        let l4 = (ell as u128).pow(4);
        t.iter().fold(0u128, |acc, m| acc * l4 + m.index() as u128)
    };
    let id: Vec<MatFl> = vec![MatFl::identity(ell); s];
    let mut seen: HashSet<u128> = HashSet::new();
    seen.insert(key(&id));
    let mut queue: VecDeque<Vec<MatFl>> = VecDeque::from([id.clone()]);
    if visit(&id) {
        return Ok((1, true));
    }
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y: Vec<MatFl> = x.iter().zip(g).map(|(u, v)| u.mul(v)).collect();
            if seen.insert(key(&y)) {
                if visit(&y) {
                    return Ok((seen.len(), true));
                }
                if seen.len() > limit {
                    return Err(Sl2Error::FeasibilityBound { ell, s });
                }
                queue.push_back(y);
            }
        }
    }
    Ok((seen.len(), false))
}

fn closure_size(ell: u64, gens: &[Vec<MatFl>], limit: usize) -> Result<usize, Sl2Error> {
    closure_walk(ell, gens, limit, |_| false).map(|(n, _)| n)
}

const CLOSURE_LIMIT: usize = 40_000_000;

/// Whether the given matrices generate all of `SL₂(F_ℓ)` (inputs must lie in `SL₂`).
pub fn generates_sl2(ell: u64, gens: &[MatFl]) -> Result<bool, Sl2Error> {
    check_field(ell)?;
    if gens.iter().any(|g| g.ell != ell) {
        return Err(Sl2Error::FieldMismatch);
    }
    if gens.iter().any(|g| !g.is_sl2()) {
        return Err(Sl2Error::InvalidTuple("generator outside SL2".into()));
    }
    let tuples: Vec<Vec<MatFl>> = gens.iter().map(|g| vec![*g]).collect();
    Ok(closure_size(ell, &tuples, CLOSURE_LIMIT)? as u64 == sl2_order(ell))
}

/// Whether the generator tuples (each of length `s`, entries in `SL₂(F_ℓ)`)
/// generate all of `SL₂(F_ℓ)^s`.
pub fn product_surjectivity(gens: &[Vec<MatFl>], ell: u64) -> Result<bool, Sl2Error> {
    check_field(ell)?;
    let s = gens.first().map_or(0, Vec::len);
    if ell > 7 || s > 3 || s == 0 {
        return Err(Sl2Error::FeasibilityBound { ell, s });
    }
    for t in gens {
        if t.len() != s {
            return Err(Sl2Error::InvalidTuple("tuples of unequal length".into()));
        }
        if t.iter().any(|m| m.ell != ell) {
            return Err(Sl2Error::FieldMismatch);
        }
        if t.iter().any(|m| !m.is_sl2()) {
            return Err(Sl2Error::InvalidTuple("generator outside SL2".into()));
        }
    }
    let full = sl2_order(ell).pow(s as u32) as usize;
    Ok(closure_size(ell, gens, full + 1)? == full)
}

/// Whether some `c ∈ GL₂(F_ℓ)` and signs make the second coordinate of every
/// generator pair equal to `±c·(first)·c⁻¹`. Such pairs generate a twisted
/// diagonal, never the full product.
pub fn twist_related(pairs: &[(MatFl, MatFl)]) -> bool {
    let Some(first) = pairs.first() else {
        return true;
    };
    enumerate_gl2(first.0.ell).iter().any(|c| {
        pairs.iter().all(|(x, y)| {
            let z = x.conjugate_by(c);
            &z == y || &z.neg() == y
        })
    })
}

/// A random pair of generator tuples for `SL₂(F_ℓ)²` whose projections each
/// generate `SL₂(F_ℓ)` and which are not twist-related.
pub fn random_product_generators(ell: u64, rng: &mut impl Rng) -> Result<Vec<Vec<MatFl>>, Sl2Error> {
    check_field(ell)?;
    let group = enumerate_sl2(ell);
    loop {
        let pick = |rng: &mut dyn rand::RngCore| group[rng.gen_range(0..group.len())];
        let (g1, g2, h1, h2) = (pick(rng), pick(rng), pick(rng), pick(rng));
        if !generates_sl2(ell, &[g1, g2])? || !generates_sl2(ell, &[h1, h2])? {
            continue;
        }
        if twist_related(&[(g1, h1), (g2, h2)]) {
            continue;
        }
        return Ok(vec![vec![g1, h1], vec![g2, h2]]);
    }
}

/// The diagonal `{(g, g)}` generated from the standard generators.
pub fn diagonal_generators(ell: u64) -> Vec<Vec<MatFl>> {
    sl2_generators(ell).iter().map(|g| vec![*g, *g]).collect()
}

/// The group-level data of a family of `s` mod-`ℓ` representations: the
/// realizable set is the subgroup of `GL₂(F_ℓ)^s` generated by `generators`,
/// restricted to tuples whose component determinants all lie in `det_coset`.
#[derive(Clone, Debug, Serialize)]
pub struct RepTuple {
    pub ell: u64,
    pub s: usize,
    pub generators: Vec<Vec<MatFl>>,
    pub det_coset: Vec<u64>,
}

impl RepTuple {
    /// Validates that each projection of the generated group contains `SL₂(F_ℓ)`.
    pub fn new(ell: u64, generators: Vec<Vec<MatFl>>, det_coset: Vec<u64>) -> Result<RepTuple, Sl2Error> {
        check_field(ell)?;
        let s = generators.first().map_or(0, Vec::len);
        if s == 0 || generators.iter().any(|t| t.len() != s) {
            return Err(Sl2Error::InvalidTuple("generator tuples must share a positive length".into()));
        }
        if generators.iter().flatten().any(|m| m.ell != ell) {
            return Err(Sl2Error::FieldMismatch);
        }
        if det_coset.is_empty() || det_coset.iter().any(|&d| d == 0 || d >= ell) {
            return Err(Sl2Error::InvalidTuple("determinant constraint must be nonzero residues".into()));
        }
        for i in 0..s {
            let proj: Vec<Vec<MatFl>> = generators.iter().map(|t| vec![t[i]]).collect();
            let mut in_sl2 = 0u64;
            closure_walk(ell, &proj, CLOSURE_LIMIT, |x| {
                if x[0].is_sl2() {
                    in_sl2 += 1;
                }
                false
            })?;
            if in_sl2 != sl2_order(ell) {
                return Err(Sl2Error::InvalidTuple(format!("component {i} does not contain SL2")));
            }
        }
        Ok(RepTuple {
            ell,
            s,
            generators,
            det_coset,
        })
    }

    /// `s = 1`, `H = GL₂(F_ℓ)`, determinants restricted to `det_coset`.
    pub fn full_gl2(ell: u64, det_coset: Vec<u64>) -> Result<RepTuple, Sl2Error> {
        check_field(ell)?;
        RepTuple::new(ell, gl2_generators(ell).into_iter().map(|g| vec![g]).collect(), det_coset)
    }

    /// Conjugates `c_i SL₂ c_i⁻¹` varying independently, with an extra
    /// quadratic twist `(±I)` generator on the components flagged in `twists`.
    pub fn independent(ell: u64, conjugators: &[MatFl], twists: &[bool]) -> Result<RepTuple, Sl2Error> {
        check_field(ell)?;
        let s = conjugators.len();
        let id = MatFl::identity(ell);
        let mut gens = Vec::new();
        for (i, c) in conjugators.iter().enumerate() {
            for g in sl2_generators(ell) {
                let mut t = vec![id; s];
                t[i] = g.conjugate_by(c);
                gens.push(t);
            }
        }
        let twist: Vec<MatFl> = (0..s)
            .map(|i| if twists.get(i).copied().unwrap_or(false) { id.neg() } else { id })
            .collect();
        if twist.iter().any(|m| *m != id) {
            gens.push(twist);
        }
        RepTuple::new(ell, gens, vec![1])
    }

    /// Each component a conjugate of the first up to a quadratic sign twist:
    /// realizable tuples are `(g, ±c₂gc₂⁻¹, …)`.
    pub fn twisted(ell: u64, conjugators: &[MatFl]) -> Result<RepTuple, Sl2Error> {
        check_field(ell)?;
        let id = MatFl::identity(ell);
        let mut gens: Vec<Vec<MatFl>> = sl2_generators(ell)
            .iter()
            .map(|g| conjugators.iter().map(|c| g.conjugate_by(c)).collect())
            .collect();
        for i in 1..conjugators.len() {
            let mut t = vec![id; conjugators.len()];
            t[i] = id.neg();
            gens.push(t);
        }
        RepTuple::new(ell, gens, vec![1])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SearchMode {
    Exhaustive,
    Random { samples: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SigmaWitness {
    pub gamma: MatFl,
    pub components: Vec<MatFl>,
    /// `+1` where the component is conjugate to `γ`, `−1` where to `−γ`.
    pub signs: Vec<i8>,
    /// Every component squared is conjugate to `γ²`.
    pub squares_conjugate: bool,
    /// Elements examined before the witness was found.
    pub examined: u64,
}

fn matches_gamma(t: &[MatFl], reps: &RepTuple, gamma: &MatFl) -> Option<Vec<i8>> {
    let neg = gamma.neg();
    t.iter()
        .map(|m| {
            if !reps.det_coset.contains(&m.det()) {
                None
            } else if is_conjugate(m, gamma) {
                Some(1)
            } else if is_conjugate(m, &neg) {
                Some(-1)
            } else {
                None
            }
        })
        .collect()
}

fn witness(gamma: &MatFl, t: &[MatFl], signs: Vec<i8>, examined: u64) -> SigmaWitness {
    let g2 = gamma.square();
    SigmaWitness {
        gamma: *gamma,
        components: t.to_vec(),
        signs,
        squares_conjugate: t.iter().all(|m| is_conjugate(&m.square(), &g2)),
        examined: examined.max(1),
    }
}

/// An element of the realizable set each of whose components is conjugate to
/// `γ` or `−γ`.
pub fn find_sigma(reps: &RepTuple, gamma: &MatFl, mode: SearchMode) -> Result<SigmaWitness, Sl2Error> {
    if gamma.ell != reps.ell {
        return Err(Sl2Error::FieldMismatch);
    }
    if !gamma.is_sl2() {
        return Err(Sl2Error::InvalidTuple("gamma must lie in SL2".into()));
    }
    match mode {
        SearchMode::Exhaustive => {
            if reps.ell > 7 || reps.s > 3 {
                return Err(Sl2Error::FeasibilityBound { ell: reps.ell, s: reps.s });
            }
            let mut found = None;
            let mut examined = 0u64;
            closure_walk(reps.ell, &reps.generators, CLOSURE_LIMIT, |t| {
                examined += 1;
                if let Some(signs) = matches_gamma(t, reps, gamma) {
                    found = Some(witness(gamma, t, signs, examined));
                    true
                } else {
                    false
                }
            })?;
            found.ok_or(Sl2Error::NotFound)
        }
        SearchMode::Random { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut x: Vec<MatFl> = vec![MatFl::identity(reps.ell); reps.s];
            for k in 0..samples {
                if let Some(signs) = matches_gamma(&x, reps, gamma) {
                    return Ok(witness(gamma, &x, signs, k + 1));
                }
                let g = &reps.generators[rng.gen_range(0..reps.generators.len())];
                x = x.iter().zip(g).map(|(u, v)| u.mul(v)).collect();
            }
            Err(Sl2Error::NotFound)
        }
    }
}

/// [`find_sigma`] for every `γ` in a list, in parallel, preserving order.
pub fn find_sigma_all(reps: &RepTuple, gammas: &[MatFl], mode: SearchMode) -> Vec<Result<SigmaWitness, Sl2Error>> {
    par::map_slice(gammas, |g| find_sigma(reps, g, mode))
}
