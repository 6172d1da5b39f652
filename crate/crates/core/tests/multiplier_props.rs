use num_complex::Complex64;
use proptest::prelude::*;
use quadcong::multiplier::{eta_multiplier, random_suite, random_unimodular, verify_automorphy, MultiplierError, UnimodularMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// η(z) as a truncated product, written independently of the library.
fn eta_product(z: Complex64) -> Complex64 {
    let q = (Complex64::i() * 2.0 * PI * z).exp();
    let mut acc = (Complex64::i() * 2.0 * PI * z / 24.0).exp();
    let mut qn = q;
    for _ in 0..200_000 {
        acc *= Complex64::new(1.0, 0.0) - qn;
        qn *= q;
        if qn.norm() < 1e-18 {
            break;
        }
    }
    acc
}

/// Exponent j (mod 24) with ν(γ) = e(j/24), read off numerically.
fn numeric_exponent(g: &UnimodularMatrix, z: Complex64) -> u8 {
    let w = g.act(z);
    let j = Complex64::new(g.c as f64, 0.0) * z + g.d as f64;
    let ratio = eta_product(w) / (j.sqrt() * eta_product(z));
    let turns = ratio.arg() / (2.0 * PI) * 24.0;
    assert!((ratio.norm() - 1.0).abs() < 1e-6, "{g:?}: |ratio| = {}", ratio.norm());
    (turns.round() as i64).rem_euclid(24) as u8
}

#[test]
fn multiplier_matches_numeric_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut mats: Vec<UnimodularMatrix> = (0..150).map(|_| random_unimodular(&mut rng, 10)).collect();
    mats.extend([UnimodularMatrix::T, UnimodularMatrix::S, UnimodularMatrix::S.neg(), UnimodularMatrix::T.neg()]);
    for g in mats {
        let z = Complex64::new(0.1, 1.3);
        assert_eq!(eta_multiplier(&g).exponent, numeric_exponent(&g, z), "{g:?}");
    }
}

#[test]
fn suite_residuals() {
    let suite = random_suite(200, 50, Complex64::new(0.1, 1.3), 1).unwrap();
    assert_eq!(suite.len(), 200);
    for (g, c) in &suite {
        assert!(c.residual < 1e-8, "{g:?}: {}", c.residual);
        assert!(c.truncation_bound < 1e-10);
    }
}

#[test]
fn rejects_bad_input() {
    assert!(matches!(UnimodularMatrix::new(2, 0, 0, 1), Err(MultiplierError::NotUnimodular(..))));
    let g = UnimodularMatrix::new(1, 0, 1, 1).unwrap();
    assert!(verify_automorphy(&g, Complex64::new(0.0, -1.0), 100).is_err());
}

proptest! {
    #[test]
    fn order_divides_24(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_unimodular(&mut rng, 60);
        let v = eta_multiplier(&g);
        prop_assert!(v.exponent < 24);
        prop_assert_eq!(v.pow(24).exponent, 0);
        let z = v.pow(24).to_complex();
        prop_assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn left_translation_shifts_exponent(seed in any::<u64>(), k in -100i64..100) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_unimodular(&mut rng, 60);
        let tk = UnimodularMatrix::new(1, k, 0, 1).unwrap();
        let lhs = eta_multiplier(&tk.mul(&g)).exponent as i64;
        prop_assert_eq!(lhs, (k + eta_multiplier(&g).exponent as i64).rem_euclid(24));
    }

    #[test]
    fn negation_rule(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_unimodular(&mut rng, 60);
        prop_assume!(g.c != 0);
        let g = if g.c > 0 { g } else { g.neg() };
        let a = eta_multiplier(&g).exponent as i64;
        let b = eta_multiplier(&g.neg()).exponent as i64;
        prop_assert_eq!((b - a).rem_euclid(24), 6);
    }
}
