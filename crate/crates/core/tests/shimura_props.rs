use proptest::prelude::*;
use quadcong::arith::{is_squarefree, CoeffRing};
use quadcong::hecke::FormContext;
use quadcong::qexp::{eta_quotient_expansion, EtaQuotient, GradedSeries};
use quadcong::shimura::{check_equivariance, nonvanishing_witness, shimura_lift, ShimuraError};

fn eta(r: i64, prec: i64) -> GradedSeries {
    eta_quotient_expansion(&EtaQuotient::eta_power(r), prec, &CoeffRing::exact(), false).unwrap()
}

#[test]
fn lift_vanishes_off_the_class() {
    for r in [5i64, 7, 11, 13] {
        let ctx = FormContext::eta_power(r, 101, 1).unwrap();
        let f = eta(r, 30 * 400 + 24);
        for t in (1u64..=30).filter(|&t| is_squarefree(t)) {
            let lift = shimura_lift(&f, &ctx, t, 20).unwrap();
            let on_class = (t as i64 - r).rem_euclid(24) == 0;
            if !on_class {
                assert!(lift.is_zero(), "r = {r}, t = {t}");
            } else {
                assert!(!lift.is_zero(), "r = {r}, t = {t}");
            }
        }
    }
}

/// Multiplicativity on coprime indices is expected for eigenforms; report failures
/// instead of asserting, since eigenness is not guaranteed for general input.
#[test]
fn lift_multiplicativity_report() {
    let mut failures = Vec::new();
    let mut checked = 0;
    for r in [5i64, 7, 11, 13] {
        let ctx = FormContext::eta_power(r, 101, 1).unwrap();
        let lift = shimura_lift(&eta(r, r * 40 * 40 + 24), &ctx, r as u64, 40).unwrap();
        let ring = lift.ring().clone();
        for n1 in 2i64..=40 {
            for n2 in 2i64..=40 / n1 {
                if num_integer::gcd(n1, n2) == 1 && n1 * n2 <= 40 {
                    checked += 1;
                    let prod = ring.mul(&lift.coeff(n1).unwrap(), &lift.coeff(n2).unwrap());
                    if prod != lift.coeff(n1 * n2).unwrap() {
                        failures.push((r, n1, n2));
                    }
                }
            }
        }
    }
    println!("multiplicativity: {checked} pairs checked, failures {failures:?}");
}

#[test]
fn weight_three_halves_needs_attestation() {
    let ctx = FormContext::eta_power(3, 101, 1).unwrap();
    let f = eta(3, 3 * 100 + 24);
    assert!(matches!(shimura_lift(&f, &ctx, 3, 10), Err(ShimuraError::AttestationRequired)));
    let lift = shimura_lift(&f, &ctx.with_theta_attestation(), 3, 10).unwrap();
    assert_eq!(lift.coeff(1).unwrap(), f.coeff(3).unwrap());
}

#[test]
fn equivariance_reports() {
    let ctx = FormContext::eta_power(7, 101, 1).unwrap();
    let f = eta(7, 31 * 121 * 100 + 24);
    for p in [5u64, 11] {
        for t in [7u64, 31] {
            let rep = check_equivariance(&f, &ctx, t, p, 10).unwrap();
            assert!(rep.holds && rep.first_mismatch.is_none() && !rep.theta_attested, "{rep:?}");
        }
    }
}

#[test]
fn witness_search() {
    let ctx = FormContext::eta_power(11, 13, 1).unwrap();
    let f = eta(11, 24 * 500);
    assert_eq!(nonvanishing_witness(&f, &ctx, 40, 10).unwrap(), Some((11, 1)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn first_coefficient_is_a_of_t(r in prop::sample::select(vec![5i64, 7, 11, 13, 17, 19, 23]), k in 0u64..3) {
        let t = r as u64 + 24 * k;
        prop_assume!(is_squarefree(t));
        let ctx = FormContext::eta_power(r, 101, 1).unwrap();
        let f = eta(r, t as i64 * 25 + 24);
        let lift = shimura_lift(&f, &ctx, t, 5).unwrap();
        prop_assert_eq!(lift.coeff(1).unwrap(), f.coeff(t as i64).unwrap());
        prop_assert!(lift.coeff(0).unwrap().is_zero());
    }

    #[test]
    fn lift_is_linear(r in prop::sample::select(vec![5i64, 7, 11]), c in -50i64..50) {
        let ctx = FormContext::eta_power(r, 101, 1).unwrap();
        let f = eta(r, r * 400 + 24);
        let ring = CoeffRing::exact();
        let a = shimura_lift(&f.scale(&ring.from_i64(c)), &ctx, r as u64, 20).unwrap();
        let b = shimura_lift(&f, &ctx, r as u64, 20).unwrap().scale(&ring.from_i64(c));
        prop_assert_eq!(a.first_mismatch(&b), None);
    }
}
