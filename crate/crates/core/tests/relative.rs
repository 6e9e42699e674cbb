use csrg::cycint::CycInt;
use csrg::relgauss::{conjugate_exponent_check, relative_gauss, root_order_bound_check, yamamoto_identity_check, yamamoto_sum, Classification};
use num_bigint::BigInt;

#[test]
fn theta_is_one_for_odd_conductors() {
    for (p, k, p1) in [(2u64, 3u64, 3u64), (2, 5, 5), (2, 7, 7)] {
        let r = relative_gauss(p, k, p1, 1).unwrap();
        assert_eq!(r.classification, Classification::PlusOne, "({p},{k},{p1})");
        assert_eq!(r.matches_prediction(), Some(true));
        assert!(root_order_bound_check(&r));
    }
}

#[test]
fn yamamoto_over_f_2_21() {
    assert!(yamamoto_identity_check(2, 3, 21, 49, 1).unwrap());
    let theta = relative_gauss(2, 7, 7, 1).unwrap().theta;
    assert_eq!(yamamoto_sum(2, 3, 21, 49, 1).unwrap(), theta.scale(&BigInt::from(512)));
    assert_eq!(theta, CycInt::one(1));
}

#[test]
fn conjugate_exponents_over_f_2_21() {
    assert!(conjugate_exponent_check(2, 7, 7, 2).unwrap());
    assert!(conjugate_exponent_check(2, 7, 7, 3).unwrap());
}
