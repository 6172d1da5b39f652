use proptest::prelude::*;
use quadcong::sl2::{
    char_poly, diagonal_generators, enumerate_gl2, enumerate_sl2, find_sigma, find_sigma_all, is_conjugate,
    is_conjugate_brute, product_surjectivity, random_product_generators, sl2_class_representatives, sl2_generators,
    twist_related, CharPoly, MatFl, RepTuple, SearchMode, Sl2Error,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn mat(ell: u64) -> impl Strategy<Value = MatFl> {
    (0..ell, 0..ell, 0..ell, 0..ell)
        .prop_filter_map("singular", move |(a, b, c, d)| MatFl::new(ell, a as i64, b as i64, c as i64, d as i64).ok())
}

fn field_and_mats() -> impl Strategy<Value = (MatFl, MatFl, MatFl, MatFl)> {
    prop::sample::select(vec![5u64, 7, 11, 13]).prop_flat_map(|ell| (mat(ell), mat(ell), mat(ell), mat(ell)))
}

#[test]
fn char_poly_examples() {
    let g = MatFl::gamma0(5);
    assert_eq!(char_poly(&g), CharPoly { trace: 1, det: 1 });
    assert_eq!(char_poly(&g.square()), CharPoly { trace: 4, det: 1 });
    assert_eq!(char_poly(&MatFl::identity(7)), CharPoly { trace: 2, det: 1 });
}

#[test]
fn is_conjugate_matches_brute_force_on_gl2_f5() {
    let g = enumerate_gl2(5);
    assert_eq!(g.len(), 480);
    for x in g.iter().step_by(5) {
        for y in g.iter().step_by(3) {
            assert_eq!(is_conjugate(x, y), is_conjugate_brute(x, y), "{x:?} {y:?}");
        }
    }
}

#[test]
fn class_counts() {
    // SL2(F_q) has q + 4 conjugacy classes for odd q.
    for ell in [5u64, 7] {
        assert_eq!(sl2_class_representatives(ell).len() as u64, ell + 4);
        assert_eq!(enumerate_sl2(ell).len() as u64, ell * (ell * ell - 1));
    }
}

#[test]
fn gamma0_has_order_six() {
    for ell in [5u64, 7, 11, 13, 17] {
        let g = MatFl::gamma0(ell);
        assert_eq!(g.order(), 6);
        assert_eq!(g.pow(3), MatFl::scalar(ell, -1));
    }
}

#[test]
fn surjectivity() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let gens = random_product_generators(5, &mut rng).unwrap();
        assert!(product_surjectivity(&gens, 5).unwrap());
    }
    assert!(!product_surjectivity(&diagonal_generators(5), 5).unwrap());
    // A sign-twisted copy of the diagonal is still proper.
    let [s, t] = sl2_generators(5);
    let twisted = vec![vec![s, s.neg()], vec![t, t]];
    assert!(twist_related(&[(s, s.neg()), (t, t)]));
    assert!(!product_surjectivity(&twisted, 5).unwrap());
    let single: Vec<Vec<MatFl>> = vec![vec![s], vec![t]];
    assert!(product_surjectivity(&single, 5).unwrap());
    assert!(!product_surjectivity(&[vec![t]], 5).unwrap());
    assert!(matches!(product_surjectivity(&[vec![t; 4]], 5), Err(Sl2Error::FeasibilityBound { .. })));
}

#[test]
fn sigma_search() {
    let ell = 5;
    let id = MatFl::identity(ell);
    let c = MatFl::new(ell, 1, 3, 2, 2).unwrap();
    let reps = RepTuple::twisted(ell, &[id, c]).unwrap();
    let all = find_sigma_all(&reps, &enumerate_sl2(ell), SearchMode::Exhaustive);
    assert_eq!(all.len(), 120);
    for (g, w) in enumerate_sl2(ell).iter().zip(&all) {
        let w = w.as_ref().unwrap();
        for (m, s) in w.components.iter().zip(&w.signs) {
            let target = if *s == 1 { *g } else { g.neg() };
            assert!(is_conjugate(m, &target));
            assert!(is_conjugate(&m.square(), &g.square()));
        }
    }
    let minus = MatFl::scalar(ell, -1);
    let w = find_sigma(&reps, &minus, SearchMode::Exhaustive).unwrap();
    assert!(w.components.iter().all(|m| m.is_scalar() && m.square() == id));
    let full = RepTuple::full_gl2(7, vec![1]).unwrap();
    let g = MatFl::new(7, 2, 3, 1, 2).unwrap();
    let w = find_sigma(&full, &g, SearchMode::Random { samples: 100_000, seed: 1 }).unwrap();
    assert!(w.squares_conjugate);
    let big = RepTuple::independent(11, &[id_of(11), id_of(11)], &[true, false]).unwrap();
    assert!(matches!(find_sigma(&big, &MatFl::gamma0(11), SearchMode::Exhaustive), Err(Sl2Error::FeasibilityBound { .. })));
    let w = find_sigma(&big, &MatFl::gamma0(11), SearchMode::Random { samples: 2_000_000, seed: 9 }).unwrap();
    assert!(w.squares_conjugate);
}

fn id_of(ell: u64) -> MatFl {
    MatFl::identity(ell)
}

proptest! {
    #[test]
    fn conjugacy_is_an_equivalence((a, b, c, g) in field_and_mats()) {
        prop_assert!(is_conjugate(&a, &a));
        prop_assert_eq!(is_conjugate(&a, &b), is_conjugate(&b, &a));
        if is_conjugate(&a, &b) && is_conjugate(&b, &c) {
            prop_assert!(is_conjugate(&a, &c));
        }
        let b2 = a.conjugate_by(&g);
        prop_assert!(is_conjugate(&a, &b2));
        prop_assert!(is_conjugate(&b2.conjugate_by(&c), &a));
    }

    #[test]
    fn conjugacy_respects_squares((a, b, _, g) in field_and_mats()) {
        if is_conjugate(&a, &b) {
            prop_assert!(is_conjugate(&a.square(), &b.square()));
        }
        let c = a.conjugate_by(&g);
        prop_assert!(is_conjugate(&a.square(), &c.square()));
        prop_assert_eq!(a.neg().square(), a.square());
    }

    #[test]
    fn group_laws((a, b, _, _) in field_and_mats()) {
        let ell = a.ell;
        prop_assert_eq!(a.mul(&a.inverse()), MatFl::identity(ell));
        prop_assert_eq!(a.mul(&b).det(), a.det() * b.det() % ell);
        prop_assert_eq!(a.pow(a.order()), MatFl::identity(ell));
        prop_assert_eq!(a.mul(&b).trace(), b.mul(&a).trace());
    }
}
