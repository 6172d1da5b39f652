use proptest::prelude::*;
use quadcong::arith::{CoeffRing, Int};
use quadcong::qexp::{eta_expansion, eta_quotient_expansion, partition_numbers, EtaQuotient, GradedSeries, QexpError};

/// Coefficients of Π_{n≥1} (1 − qⁿ)^r to q^{len−1} by repeated multiplication.
fn naive_product(r: i64, len: usize) -> Vec<i128> {
    let mut c = vec![0i128; len];
    c[0] = 1;
    for n in 1..len {
        for _ in 0..r.abs() {
            if r > 0 {
                for i in (n..len).rev() {
                    c[i] -= c[i - n];
                }
            } else {
                for i in n..len {
                    c[i] += c[i - n];
                }
            }
        }
    }
    c
}

fn eta_pow(r: i64, prec: i64, ring: &CoeffRing) -> GradedSeries {
    eta_quotient_expansion(&EtaQuotient::eta_power(r), prec, ring, false).unwrap()
}

fn int(x: i128) -> Int {
    Int::from_i128(x)
}

#[test]
fn eta_first_terms() {
    let ring = CoeffRing::exact();
    let e = eta_expansion(30, &ring).unwrap();
    assert_eq!(e.terms().iter().map(|(n, v)| (*n, v.coords[0].clone())).collect::<Vec<_>>(),
        vec![(1, Int::from(1i64)), (25, Int::from(-1i64))]);
    let one = eta_expansion(1, &ring).unwrap();
    assert_eq!(one.terms().len(), 1);
    assert!(e.coeff(2).unwrap().is_zero());
    let e5 = eta_pow(5, 200, &ring);
    assert_eq!(e5.coeff(5).unwrap(), ring.from_i64(1));
    assert_eq!(e5.coeff(29).unwrap(), ring.from_i64(-5));
    assert_eq!(eta_pow(1, 5000, &ring).first_mismatch(&eta_expansion(5000, &ring).unwrap()), None);
    assert!(matches!(
        eta_quotient_expansion(&EtaQuotient::new(&[(1, -1)], 1).unwrap(), 100, &ring, false),
        Err(QexpError::PoleAtInfinity { .. })
    ));
}

#[test]
fn eta_powers_match_naive_products() {
    let ring = CoeffRing::exact();
    for r in [-3i64, -1, 1, 2, 3, 5, 7, 11, 13, 24] {
        let len = 300;
        let lead = r;
        let f = eta_quotient_expansion(&EtaQuotient::eta_power(r), lead + 24 * (len as i64 - 1), &ring, true).unwrap();
        let naive = naive_product(r, len);
        for (j, c) in naive.iter().enumerate() {
            assert_eq!(f.coeff(lead + 24 * j as i64).unwrap().coords[0], int(*c), "r={r} j={j}");
        }
    }
}

#[test]
fn eta_quotient_with_levels() {
    let ring = CoeffRing::exact();
    let e = EtaQuotient::new(&[(1, 2), (2, -1)], 2).unwrap();
    let f = eta_quotient_expansion(&e, 24 * 200, &ring, true).unwrap();
    assert_eq!(f.residue(), 0);
    // η(z)²/η(2z) = Σ (−1)ⁿ q^{n²}.
    for j in 0..200i64 {
        let k = (j as f64).sqrt() as i64;
        let expected = if k * k == j { if j == 0 { 1 } else { 2 * if k % 2 == 0 { 1 } else { -1 } } } else { 0 };
        assert_eq!(f.coeff(24 * j).unwrap(), ring.from_i64(expected), "q^{j}");
    }
}

#[test]
fn partitions_known_values() {
    let p = partition_numbers(100, None);
    assert_eq!(p[0], Int::from(1i64));
    assert_eq!(p[4], Int::from(5i64));
    assert_eq!(p[100], Int::from_i128(190_569_292));
    let ring = CoeffRing::mod_prime_power(5, 1, 1).unwrap();
    assert_eq!(partition_numbers(4, Some(&ring))[4], Int::from(0i64));
    let inv = eta_quotient_expansion(&EtaQuotient::new(&[(1, -1)], 1).unwrap(), 24 * 1000 - 1, &CoeffRing::exact(), true).unwrap();
    let big = partition_numbers(1000, None);
    for n in 0..=1000 {
        assert_eq!(inv.coeff(24 * n as i64 - 1).unwrap().coords[0], big[n]);
    }
}

#[test]
fn u_and_v_operators() {
    let ring = CoeffRing::exact();
    let e = eta_expansion(5 * 2400, &ring).unwrap();
    let u = e.apply_u(5).unwrap();
    let v = eta_expansion(480, &ring).unwrap().apply_v(5).unwrap().scale(&ring.from_i64(-1));
    assert_eq!(u.prec(), 2400);
    assert_eq!(u.first_mismatch(&v), None);
    assert!(GradedSeries::zero(&ring, 7, 1000).apply_u(7).unwrap().is_zero());
    let v2 = e.apply_v(2).unwrap();
    assert_eq!(v2.residue(), 2);
    assert_eq!(v2.valuation(), Some(2));
    assert_eq!(e.apply_v(1).unwrap().first_mismatch(&e), None);
    assert!(matches!(e.apply_u(4), Err(QexpError::NotCoprimeTo24(4))));
}

#[test]
fn product_paths_agree() {
    let ring = CoeffRing::exact();
    let prod = eta_expansion(5000, &ring).unwrap().mul(&eta_pow(4, 5000, &ring)).unwrap();
    let direct = eta_pow(5, prod.prec(), &ring);
    assert_eq!(prod.residue(), 5);
    assert_eq!(prod.first_mismatch(&direct), None);
    let zero = GradedSeries::zero(&ring, 3, 3000);
    assert!(eta_pow(5, 3000, &ring).mul(&zero).unwrap().is_zero());
    let m = CoeffRing::mod_prime_power(13, 1, 1).unwrap();
    assert!(matches!(prod.mul(&eta_pow(1, 100, &m)), Err(QexpError::RingMismatch)));
}

fn series_strategy(residue: i64, prec: i64) -> impl Strategy<Value = Vec<(i64, i64)>> {
    let slots = (prec - canonical(residue)) / 24 + 1;
    prop::collection::vec((0..slots, -1000i64..1000), 0..12)
        .prop_map(move |v| v.into_iter().map(|(j, a)| (canonical(residue) + 24 * j, a)).collect())
}

fn canonical(residue: i64) -> i64 {
    quadcong::qexp::canonical_start(residue)
}

proptest! {
    #[test]
    fn multiplication_commutes(a in series_strategy(5, 2000), b in series_strategy(7, 2000)) {
        let ring = CoeffRing::exact();
        let x = GradedSeries::from_integers(&ring, 5, 2000, &a).unwrap();
        let y = GradedSeries::from_integers(&ring, 7, 2000, &b).unwrap();
        let xy = x.mul(&y).unwrap();
        let yx = y.mul(&x).unwrap();
        prop_assert!(xy.check_invariants());
        prop_assert_eq!(xy.residue(), 12);
        prop_assert_eq!(xy.prec(), yx.prec());
        prop_assert_eq!(xy.first_mismatch(&yx), None);
    }

    #[test]
    fn support_invariant_after_operations(a in series_strategy(11, 3000), m in prop::sample::select(vec![5u64, 7, 11, 13])) {
        let ring = CoeffRing::exact();
        let x = GradedSeries::from_integers(&ring, 11, 3000, &a).unwrap();
        for s in [x.apply_u(m).unwrap(), x.apply_v(m).unwrap(), x.add(&x).unwrap(), x.neg(), x.truncate(1000),
                  x.mul(&eta_expansion(3000, &ring).unwrap()).unwrap()] {
            prop_assert!(s.check_invariants());
        }
        prop_assert_eq!(x.apply_v(m).unwrap().apply_u(m).unwrap().first_mismatch(&x), None);
    }

    #[test]
    fn v_composes(a in series_strategy(1, 500), m1 in 1u64..6, m2 in 1u64..6) {
        let ring = CoeffRing::exact();
        let x = GradedSeries::from_integers(&ring, 1, 500, &a).unwrap();
        let lhs = x.apply_v(m1).unwrap().apply_v(m2).unwrap();
        let rhs = x.apply_v(m1 * m2).unwrap();
        prop_assert_eq!(lhs.prec(), rhs.prec());
        prop_assert_eq!(lhs.first_mismatch(&rhs), None);
    }

    #[test]
    fn precision_soundness(r in prop::sample::select(vec![1i64, 3, 5, 7, 11, 13, 23]), p in 100i64..3000, extra in 1i64..3000) {
        let ring = CoeffRing::mod_prime_power(13, 2, 1).unwrap();
        let low = eta_pow(r, p.max(r), &ring);
        let high = eta_pow(r, p.max(r) + extra, &ring).truncate(low.prec());
        prop_assert_eq!(low.first_mismatch(&high), None);
        let lu = low.apply_u(5).unwrap();
        let hu = eta_pow(r, p.max(r) + extra, &ring).apply_u(5).unwrap().truncate(lu.prec());
        prop_assert_eq!(lu.first_mismatch(&hu), None);
    }

    #[test]
    fn reduction_commutes_with_expansion(r in prop::sample::select(vec![1i64, 5, 7, 11]), p in 24i64..5000) {
        let exact = eta_pow(r, p.max(r), &CoeffRing::exact());
        let ring = CoeffRing::mod_prime_power(7, 3, 1).unwrap();
        prop_assert_eq!(exact.reduce_into(&ring).unwrap().first_mismatch(&eta_pow(r, p.max(r), &ring)), None);
    }
}
