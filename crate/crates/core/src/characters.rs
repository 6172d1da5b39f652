//! Dirichlet characters modulo `N`, described by their values on canonical
//! generators of each prime-power unit group.
//!
//! For odd `q^e ∥ N` the generator is the smallest primitive root `g` modulo
//! `q^e` and a component is an exponent `k` with `ψ(g) = ζ_{φ(q^e)}^k`. The
//! 2-part `2^e` (`e ≥ 3`) uses the pair of generators `−1` and `5`; its JSON
//! entry carries both exponents, `[2^e, a, b]`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_integer::Integer;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::arith::{self, factorize, inv_mod, mul_mod, pow_mod, ArithError, CoeffRing, RingElement};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CharacterError {
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("invalid character data: {0}")]
    Invalid(String),
    #[error("{0} is not a multiple of {1}")]
    NotAMultiple(u64, u64),
    #[error("this entry point requires an odd squarefree modulus, got {0}")]
    NotOddSquarefree(u64),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// A character value: zero off the units, else `ζ_u^j` for the character order `u`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CharValue {
    Zero,
    Root(u64),
}

impl CharValue {
    pub fn exponent(self) -> Option<u64> {
        match self {
            CharValue::Zero => None,
            CharValue::Root(j) => Some(j),
        }
    }
}

const TABLE_LIMIT: u64 = 1 << 20;

#[derive(Clone, Debug)]
struct Component {
    p: u64,
    e: u32,
    q: u64,
    /// Odd prime power: `[k]` with `k mod φ(q)`. Power of two: `[a, b]` with
    /// `a mod 2` on `−1` and `b mod 2^{e−2}` on `5` (only `a` for `e = 2`; none for `e = 1`).
    exps: Vec<u64>,
    g: u64,
    logs: Arc<OnceLock<Vec<u32>>>,
}

impl PartialEq for Component {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q && self.exps == other.exps
    }
}
impl Eq for Component {}

impl std::hash::Hash for Component {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        self.q.hash(h);
        self.exps.hash(h);
    }
}

impl Component {
    fn new(p: u64, e: u32, exps: Vec<u64>) -> Result<Self, CharacterError> {
        let q = p.pow(e);
        let g = if p == 2 { 5 } else { arith::primitive_root(q)? };
        let mut c = Component {
            p,
            e,
            q,
            exps,
            g,
            logs: Arc::new(OnceLock::new()),
        };
        let moduli = c.exponent_moduli();
        if c.exps.len() != moduli.len() {
            return Err(CharacterError::Invalid(format!(
                "component {q} expects {} exponent(s)",
                moduli.len()
            )));
        }
        for (x, m) in c.exps.iter_mut().zip(&moduli) {
            *x %= m;
        }
        Ok(c)
    }

    fn trivial(p: u64, e: u32) -> Result<Self, CharacterError> {
        let n = if p != 2 {
            1
        } else {
            match e {
                1 => 0,
                2 => 1,
                _ => 2,
            }
        };
        Component::new(p, e, vec![0; n])
    }

    fn phi(&self) -> u64 {
        (self.p - 1) * self.p.pow(self.e - 1)
    }

    /// Orders of the generators whose exponents are stored.
    fn exponent_moduli(&self) -> Vec<u64> {
        if self.p != 2 {
            vec![self.phi()]
        } else {
            match self.e {
                1 => vec![],
                2 => vec![2],
                e => vec![2, 1u64 << (e - 2)],
            }
        }
    }

    fn order(&self) -> u64 {
        self.exps
            .iter()
            .zip(self.exponent_moduli())
            .map(|(&k, m)| m / k.gcd(&m))
            .fold(1, |acc, o| acc.lcm(&o))
    }

    /// Discrete logarithms of `n` with respect to the stored generators.
    fn logs_of(&self, n: u64) -> Vec<u64> {
        let n = n % self.q;
        if self.p == 2 {
            return match self.e {
                1 => vec![],
                2 => vec![if n % 4 == 1 { 0 } else { 1 }],
                e => {
                    let (a, m) = if n % 4 == 1 { (0, n) } else { (1, self.q - n) };
                    vec![a, dlog_pow2(m, e)]
                }
            };
        }
        if self.q <= TABLE_LIMIT {
            let table = self.logs.get_or_init(|| {
                let mut t = vec![u32::MAX; self.q as usize];
                let mut x = 1u64;
                for i in 0..self.phi() {
                    t[x as usize] = i as u32;
                    x = x * self.g % self.q;
                }
                t
            });
            vec![table[n as usize] as u64]
        } else {
            vec![bsgs(self.g, n, self.q, self.phi())]
        }
    }

    /// Exponent of `ψ_q(n)` as a power of `ζ_u`, where the overall order `u` is
    /// a multiple of this component's order.
    fn value(&self, n: u64, u: u64) -> u64 {
        let mut acc = 0u64;
        for ((k, m), l) in self.exps.iter().zip(self.exponent_moduli()).zip(self.logs_of(n)) {
            // ζ_m^{k l} = ζ_u^{k l u / m}; k u / m is integral.
            let o = m / k.gcd(&m);
            let scale = (k / k.gcd(&m)) * (u / o) % u;
            acc = (acc + mul_mod(scale, l % u, u)) % u;
        }
        acc
    }

    fn conductor(&self) -> u64 {
        if self.p != 2 {
            let o = self.order();
            if o == 1 {
                return 1;
            }
            let mut s = 0u32;
            let mut t = o;
            while t % self.p == 0 {
                t /= self.p;
                s += 1;
            }
            self.p.pow(s + 1)
        } else {
            match self.e {
                1 => 1,
                2 => {
                    if self.exps[0] == 1 {
                        4
                    } else {
                        1
                    }
                }
                e => {
                    let m = 1u64 << (e - 2);
                    let o = m / self.exps[1].gcd(&m);
                    if o > 1 {
                        4 * o
                    } else if self.exps[0] == 1 {
                        4
                    } else {
                        1
                    }
                }
            }
        }
    }

    /// The same character viewed on the group modulo `p^f` (`ψ` must factor
    /// through it when `f < e`).
    fn rebase(&self, f: u32) -> Result<Component, CharacterError> {
        if f == self.e {
            return Ok(self.clone());
        }
        if self.p == 2 {
            let a = self.exps.first().copied().unwrap_or(0);
            let b = self.exps.get(1).copied().unwrap_or(0);
            let exps = match f {
                1 => vec![],
                2 => vec![a],
                _ => {
                    let b_new = if f > self.e {
                        b << (f - self.e)
                    } else {
                        b >> (self.e - f)
                    };
                    vec![a, b_new]
                }
            };
            return Component::new(2, f, exps);
        }
        let target = Component::trivial(self.p, f)?;
        let (phi_s, phi_t) = (self.phi() as u128, target.phi() as u128);
        let k = self.exps[0] as u128;
        // ψ(g_target) computed through the source description.
        let l = self.logs_of(target.g % self.q)[0] as u128;
        let num = k * l % phi_s * phi_t;
        debug_assert_eq!(num % phi_s, 0);
        let k_new = ((num / phi_s) % phi_t) as u64;
        Component::new(self.p, f, vec![k_new])
    }
}

fn dlog_pow2(n: u64, e: u32) -> u64 {
    // n ≡ 1 (mod 4); lift bit by bit: 5^j ≡ n (mod 2^e).
    let q = 1u64 << e;
    let mut j = 0u64;
    for bit in 0..e.saturating_sub(2) {
        let cur = pow_mod(5, j, q);
        let check = 1u64 << (bit + 3);
        if cur % check != n % check {
            j |= 1 << bit;
        }
    }
    j
}

fn bsgs(g: u64, n: u64, q: u64, order: u64) -> u64 {
    let m = (order as f64).sqrt().ceil() as u64 + 1;
    let mut baby = HashMap::with_capacity(m as usize);
    let mut x = 1u64;
    for j in 0..m {
        baby.entry(x).or_insert(j);
        x = mul_mod(x, g, q);
    }
    let ginv_m = pow_mod(inv_mod(g as i64, q).expect("generator is a unit"), m, q);
    let mut y = n;
    for i in 0..=m {
        if let Some(&j) = baby.get(&y) {
            return (i * m + j) % order;
        }
        y = mul_mod(y, ginv_m, q);
    }
    unreachable!("discrete log exists for units")
}

/// A Dirichlet character.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DirichletCharacter {
    modulus: u64,
    comps: Vec<Component>,
    order: u64,
}

impl fmt::Display for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "chi mod {} of order {}", self.modulus, self.order)
    }
}

impl DirichletCharacter {
    pub fn trivial(modulus: u64) -> Self {
        Self::build(modulus, Vec::new()).expect("trivial data is valid")
    }

    /// Build from `(q^e, exponents)` entries; prime powers of the modulus not
    /// listed get the trivial component.
    pub fn from_components(modulus: u64, entries: &[(u64, Vec<u64>)]) -> Result<Self, CharacterError> {
        Self::build(modulus, entries.to_vec())
    }

    /// The Legendre symbol `(•/p)` as a character mod `p`.
    pub fn legendre(p: u64) -> Result<Self, CharacterError> {
        if p < 3 || !arith::is_prime(p) {
            return Err(CharacterError::Invalid(format!("{p} is not an odd prime")));
        }
        Self::build(p, vec![(p, vec![(p - 1) / 2])])
    }

    /// The character `g ↦ ζ_{φ(p^e)}^k` modulo an odd prime power.
    pub fn on_prime_power(p: u64, e: u32, k: u64) -> Result<Self, CharacterError> {
        let q = p.pow(e);
        Self::build(q, vec![(q, vec![k])])
    }

    fn build(modulus: u64, entries: Vec<(u64, Vec<u64>)>) -> Result<Self, CharacterError> {
        if modulus == 0 {
            return Err(CharacterError::Invalid("modulus must be positive".into()));
        }
        let mut comps = Vec::new();
        let mut used = vec![false; entries.len()];
        for (p, e) in factorize(modulus) {
            let q = p.pow(e);
            let hit = entries.iter().position(|(qq, _)| *qq == q);
            let comp = match hit {
                Some(i) => {
                    used[i] = true;
                    Component::new(p, e, entries[i].1.clone())?
                }
                None => Component::trivial(p, e)?,
            };
            comps.push(comp);
        }
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(CharacterError::Invalid(format!(
                "{} is not a maximal prime power dividing {modulus}",
                entries[i].0
            )));
        }
        let order = comps.iter().map(Component::order).fold(1, |a, o: u64| a.lcm(&o));
        Ok(DirichletCharacter { modulus, comps, order })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Order `u` of the character (lcm of component orders).
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    pub fn is_real(&self) -> bool {
        self.order <= 2
    }

    /// `(q^e, exponents)` for every prime power factor, in increasing prime order.
    pub fn components(&self) -> Vec<(u64, Vec<u64>)> {
        self.comps.iter().map(|c| (c.q, c.exps.clone())).collect()
    }

    pub fn eval(&self, n: i64) -> CharValue {
        let r = n.rem_euclid(self.modulus as i64) as u64;
        if r.gcd(&self.modulus) != 1 {
            return CharValue::Zero;
        }
        let u = self.order;
        let j = self.comps.iter().fold(0u64, |acc, c| (acc + c.value(r, u)) % u);
        CharValue::Root(j)
    }

    /// `ψ(n)` as an integer when the value is real (`0` or `±1`).
    pub fn eval_real(&self, n: i64) -> Option<i8> {
        match self.eval(n) {
            CharValue::Zero => Some(0),
            CharValue::Root(0) => Some(1),
            CharValue::Root(j) if 2 * j == self.order => Some(-1),
            CharValue::Root(_) => None,
        }
    }

    /// `ψ(n)` inside a coefficient ring whose root order is a multiple of `u`.
    pub fn eval_in(&self, ring: &CoeffRing, n: i64) -> Result<RingElement, ArithError> {
        let zeta = ring.embed_unity(self.order)?;
        Ok(match self.eval(n) {
            CharValue::Zero => ring.zero(),
            CharValue::Root(j) => ring.pow(&zeta, j),
        })
    }

    pub fn conductor(&self) -> u64 {
        self.comps.iter().map(Component::conductor).product()
    }

    /// The primitive character inducing this one.
    pub fn primitive(&self) -> Self {
        let f = self.conductor();
        let mut comps = Vec::new();
        for c in &self.comps {
            let cf = c.conductor();
            if cf == 1 {
                continue;
            }
            let exp = cf.trailing_zeros().max(if c.p == 2 { 0 } else { 1 });
            let fexp = if c.p == 2 { exp } else { ilog(cf, c.p) };
            comps.push(c.rebase(fexp).expect("character factors through its conductor"));
        }
        let order = comps.iter().map(Component::order).fold(1, |a, o: u64| a.lcm(&o));
        DirichletCharacter {
            modulus: f,
            comps,
            order,
        }
    }

    /// The character induced on a multiple `M` of the modulus.
    pub fn extend_to(&self, m: u64) -> Result<Self, CharacterError> {
        if m == 0 || m % self.modulus != 0 {
            return Err(CharacterError::NotAMultiple(m, self.modulus));
        }
        let mut comps = Vec::new();
        for (p, e) in factorize(m) {
            let c = match self.comps.iter().find(|c| c.p == p) {
                Some(c) => c.rebase(e)?,
                None => Component::trivial(p, e)?,
            };
            comps.push(c);
        }
        let order = comps.iter().map(Component::order).fold(1, |a, o: u64| a.lcm(&o));
        Ok(DirichletCharacter {
            modulus: m,
            comps,
            order,
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self, CharacterError> {
        if self.modulus != other.modulus {
            return Err(CharacterError::ModulusMismatch(self.modulus, other.modulus));
        }
        let entries = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| {
                let exps = a.exps.iter().zip(&b.exps).map(|(x, y)| x + y).collect();
                (a.q, exps)
            })
            .collect();
        Self::build(self.modulus, entries)
    }

    pub fn pow(&self, k: u64) -> Self {
        let entries = self
            .comps
            .iter()
            .map(|c| {
                let exps = c
                    .exps
                    .iter()
                    .zip(c.exponent_moduli())
                    .map(|(&x, m)| mul_mod(x, k % m, m))
                    .collect();
                (c.q, exps)
            })
            .collect();
        Self::build(self.modulus, entries).expect("powers of valid data are valid")
    }

    pub fn square(&self) -> Self {
        self.pow(2)
    }

    /// Whether `−1` is never a value. Exhaustive over the units for moduli up
    /// to `10⁶`; beyond that, by parity of the order (the image is cyclic of
    /// order `u`).
    pub fn never_minus_one(&self) -> bool {
        if self.modulus <= 1_000_000 {
            if self.order % 2 == 1 {
                return true;
            }
            let half = self.order / 2;
            !(1..self.modulus as i64).any(|n| self.eval(n) == CharValue::Root(half))
        } else {
            self.order % 2 == 1
        }
    }

    /// Guard for entry points that assume an odd squarefree modulus.
    pub fn require_odd_squarefree(&self) -> Result<(), CharacterError> {
        if self.modulus % 2 == 0 || !arith::is_squarefree(self.modulus) {
            Err(CharacterError::NotOddSquarefree(self.modulus))
        } else {
            Ok(())
        }
    }
}

fn ilog(n: u64, p: u64) -> u32 {
    let mut e = 0;
    let mut x = n;
    while x % p == 0 {
        x /= p;
        e += 1;
    }
    e
}

#[derive(Serialize, Deserialize)]
struct CharacterJson {
    modulus: u64,
    components: Vec<Vec<u64>>,
}

impl Serialize for DirichletCharacter {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CharacterJson {
            modulus: self.modulus,
            components: self
                .comps
                .iter()
                .map(|c| std::iter::once(c.q).chain(c.exps.iter().copied()).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DirichletCharacter {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = CharacterJson::deserialize(d)?;
        let mut entries = Vec::new();
        for c in raw.components {
            let (q, exps) = c
                .split_first()
                .ok_or_else(|| D::Error::custom("empty component entry"))?;
            entries.push((*q, exps.to_vec()));
        }
        DirichletCharacter::from_components(raw.modulus, &entries).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{is_prime, kronecker};

    #[test]
    fn evaluation_examples() {
        assert_eq!(DirichletCharacter::trivial(1).eval(7), CharValue::Root(0));
        let chi5 = DirichletCharacter::legendre(5).unwrap();
        assert_eq!(chi5.eval_real(2), Some(-1));
        let any15 = DirichletCharacter::from_components(15, &[(3, vec![1]), (5, vec![1])]).unwrap();
        assert_eq!(any15.eval(3), CharValue::Zero);
        assert_eq!(any15.eval(1), CharValue::Root(0));
    }

    #[test]
    fn legendre_matches_kronecker() {
        for p in [3u64, 5, 7, 11, 13, 101] {
            let chi = DirichletCharacter::legendre(p).unwrap();
            for n in -50..50i64 {
                assert_eq!(chi.eval_real(n), Some(kronecker(n, p as i64)), "p={p} n={n}");
            }
        }
    }

    #[test]
    fn conductors() {
        assert_eq!(DirichletCharacter::trivial(15).conductor(), 1);
        let chi = DirichletCharacter::legendre(5).unwrap().extend_to(35).unwrap();
        assert_eq!(chi.conductor(), 5);
        let prim7 = DirichletCharacter::on_prime_power(7, 1, 1).unwrap();
        assert_eq!(prim7.order(), 6);
        assert_eq!(prim7.conductor(), 7);
        // Order 3 character mod 9 factors through... nothing: order 3 = 3^1 needs 9.
        let c9 = DirichletCharacter::on_prime_power(3, 2, 2).unwrap();
        assert_eq!(c9.order(), 3);
        assert_eq!(c9.conductor(), 9);
        // Quadratic character mod 9 comes from mod 3.
        let q9 = DirichletCharacter::on_prime_power(3, 2, 3).unwrap();
        assert_eq!(q9.conductor(), 3);
    }

    #[test]
    fn primitive_agrees_pointwise() {
        let chars = [
            DirichletCharacter::on_prime_power(3, 2, 3).unwrap(),
            DirichletCharacter::on_prime_power(5, 2, 5).unwrap(),
            DirichletCharacter::legendre(5).unwrap().extend_to(35).unwrap(),
            DirichletCharacter::from_components(16, &[(16, vec![1, 2])]).unwrap(),
            DirichletCharacter::from_components(40, &[(8, vec![1, 0]), (5, vec![2])]).unwrap(),
        ];
        for chi in chars {
            let prim = chi.primitive();
            assert_eq!(chi.modulus() % prim.modulus(), 0);
            assert_eq!(prim.conductor(), prim.modulus());
            for n in 0..(3 * chi.modulus() as i64) {
                if n.gcd(&(chi.modulus() as i64)) != 1 {
                    continue;
                }
                let (a, b) = (chi.eval(n), prim.eval(n));
                // Compare as points on the unit circle (orders may differ in representation).
                let ua = a.exponent().unwrap() as f64 / chi.order() as f64;
                let ub = b.exponent().unwrap() as f64 / prim.order() as f64;
                assert!((ua - ub).abs() < 1e-12, "{chi} at {n}");
            }
        }
    }

    #[test]
    fn squares_and_products() {
        let chi5 = DirichletCharacter::legendre(5).unwrap();
        assert!(chi5.square().is_trivial());
        let c7 = DirichletCharacter::on_prime_power(7, 1, 1).unwrap();
        assert_eq!(c7.square().order(), 3);
        assert_eq!(c7.mul(&DirichletCharacter::trivial(7)).unwrap(), c7);
        assert!(matches!(
            c7.mul(&chi5),
            Err(CharacterError::ModulusMismatch(7, 5))
        ));
    }

    #[test]
    fn never_minus_one_examples() {
        assert!(DirichletCharacter::trivial(35).never_minus_one());
        assert!(!DirichletCharacter::legendre(5).unwrap().never_minus_one());
        assert!(DirichletCharacter::on_prime_power(7, 1, 2).unwrap().never_minus_one());
    }

    #[test]
    fn nontrivial_real_characters_hit_minus_one() {
        for n in 1..=1000u64 {
            let base = DirichletCharacter::trivial(n);
            // Every real character is a product of quadratic components.
            let comps = base.components();
            let choices: Vec<Vec<Vec<u64>>> = comps
                .iter()
                .map(|(q, ex)| {
                    if q % 2 == 1 {
                        let phi = crate::arith::euler_phi(*q);
                        vec![vec![0], vec![phi / 2]]
                    } else if ex.is_empty() {
                        vec![vec![]]
                    } else if ex.len() == 1 {
                        vec![vec![0], vec![1]]
                    } else {
                        let h = q / 8;
                        vec![vec![0, 0], vec![1, 0], vec![0, h], vec![1, h]]
                    }
                })
                .collect();
            let mut idx = vec![0usize; comps.len()];
            loop {
                let entries: Vec<(u64, Vec<u64>)> = comps
                    .iter()
                    .enumerate()
                    .map(|(i, (q, _))| (*q, choices[i][idx[i]].clone()))
                    .collect();
                let chi = DirichletCharacter::from_components(n, &entries).unwrap();
                assert!(chi.is_real());
                assert_eq!(chi.never_minus_one(), chi.is_trivial(), "{entries:?}");
                let mut i = 0;
                while i < idx.len() {
                    idx[i] += 1;
                    if idx[i] < choices[i].len() {
                        break;
                    }
                    idx[i] = 0;
                    i += 1;
                }
                if i == idx.len() {
                    break;
                }
            }
        }
    }

    #[test]
    fn large_modulus_uses_bsgs() {
        let p = 1_000_003u64;
        assert!(is_prime(p));
        let chi = DirichletCharacter::legendre(p).unwrap();
        for n in [2i64, 3, 5, 999_999, 123_456] {
            assert_eq!(chi.eval_real(n), Some(kronecker(n, p as i64)));
        }
    }

    #[test]
    fn json_round_trip() {
        let chi = DirichletCharacter::from_components(40, &[(8, vec![1, 1]), (5, vec![3])]).unwrap();
        let s = serde_json::to_string(&chi).unwrap();
        assert_eq!(s, r#"{"modulus":40,"components":[[8,1,1],[5,3]]}"#);
        let back: DirichletCharacter = serde_json::from_str(&s).unwrap();
        assert_eq!(back, chi);
        assert!(serde_json::from_str::<DirichletCharacter>(r#"{"modulus":15,"components":[[9,1]]}"#).is_err());
    }

    #[test]
    fn two_power_logs() {
        let chi = DirichletCharacter::from_components(32, &[(32, vec![0, 1])]).unwrap();
        assert_eq!(chi.order(), 8);
        assert_eq!(chi.eval(5), CharValue::Root(1));
        assert_eq!(chi.eval(25), CharValue::Root(2));
        assert_eq!(chi.eval(31), CharValue::Root(0));
        assert_eq!(chi.eval(27), CharValue::Root(1)); // 27 = −5 mod 32
    }
}
