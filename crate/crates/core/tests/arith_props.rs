use proptest::prelude::*;
use quadcong::arith::{divisors, euler_phi, is_prime, kronecker, pow_mod, CoeffRing, RingElement};

fn rings() -> Vec<CoeffRing> {
    vec![
        CoeffRing::exact(),
        CoeffRing::exact_cyclotomic(3).unwrap(),
        CoeffRing::exact_cyclotomic(4).unwrap(),
        CoeffRing::mod_prime_power(11, 2, 1).unwrap(),
        CoeffRing::mod_prime_power(11, 1, 5).unwrap(),
        CoeffRing::mod_prime_power(7, 2, 4).unwrap(),
    ]
}

fn element(ring: &CoeffRing, cs: &[i64]) -> RingElement {
    cs.iter().enumerate().fold(ring.zero(), |acc, (j, &c)| {
        ring.add(&acc, &ring.mul(&ring.from_i64(c), &ring.zeta_pow(j as u64)))
    })
}

#[test]
fn kronecker_multiplicative_in_denominator() {
    for a in -200i64..=200 {
        for b in (-200i64..=200).filter(|&b| b != 0) {
            let kb = kronecker(a, b);
            for c in (-200i64..=200).filter(|&c| c != 0) {
                assert_eq!(kronecker(a, b * c), kb * kronecker(a, c), "a={a} b={b} c={c}");
            }
        }
    }
}

#[test]
fn kronecker_matches_euler_criterion() {
    for q in (3u64..=97).filter(|&q| is_prime(q)) {
        for a in 0..q {
            let e = pow_mod(a, (q - 1) / 2, q);
            let expected = match e {
                0 => 0,
                1 => 1,
                _ => -1,
            };
            assert_eq!(kronecker(a as i64, q as i64) as i64, expected, "({a}/{q})");
        }
    }
}

#[test]
fn euler_phi_multiplicative() {
    for a in 1u64..=1000 {
        for b in (1u64..=1000).step_by(7) {
            if num_integer::gcd(a, b) == 1 {
                assert_eq!(euler_phi(a * b), euler_phi(a) * euler_phi(b));
            }
        }
    }
}

#[test]
fn roots_have_exact_order() {
    for ring in rings() {
        let big_u = ring.root_order();
        for u in divisors(big_u) {
            let z = ring.embed_unity(u).unwrap();
            assert_eq!(ring.pow(&z, u), ring.one(), "{ring} u={u}");
            for d in divisors(u).into_iter().filter(|&d| d < u) {
                assert_ne!(ring.pow(&z, d), ring.one(), "{ring} u={u} d={d}");
            }
        }
    }
}

proptest! {
    #[test]
    fn ring_axioms(which in 0usize..6, a in prop::collection::vec(-50i64..50, 4),
                   b in prop::collection::vec(-50i64..50, 4), c in prop::collection::vec(-50i64..50, 4)) {
        let ring = &rings()[which];
        let (x, y, z) = (element(ring, &a), element(ring, &b), element(ring, &c));
        prop_assert_eq!(ring.add(&x, &y), ring.add(&y, &x));
        prop_assert_eq!(ring.mul(&x, &y), ring.mul(&y, &x));
        prop_assert_eq!(ring.mul(&ring.mul(&x, &y), &z), ring.mul(&x, &ring.mul(&y, &z)));
        prop_assert_eq!(ring.mul(&x, &ring.add(&y, &z)), ring.add(&ring.mul(&x, &y), &ring.mul(&x, &z)));
        prop_assert_eq!(ring.add(&x, &ring.neg(&x)), ring.zero());
        prop_assert_eq!(ring.mul(&x, &ring.one()), x.clone());
        prop_assert_eq!(ring.sub(&x, &y), ring.add(&x, &ring.neg(&y)));
    }

    #[test]
    fn exact_pow_matches_repeated_multiplication(a in -20i64..20, e in 0u64..12) {
        let ring = CoeffRing::exact_cyclotomic(3).unwrap();
        let x = ring.add(&ring.from_i64(a), &ring.zeta_pow(1));
        let mut acc = ring.one();
        for _ in 0..e { acc = ring.mul(&acc, &x); }
        prop_assert_eq!(ring.pow(&x, e), acc);
    }
}
