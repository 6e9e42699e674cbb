//! Relative Gauss sums θ = G_{f'}(χ') / (p^{(f'−f)/2} G_f(χ)) for k' = k·p₁,
//! where χ is the restriction of χ' to the subfield, plus the subset-sum
//! identity over coset representatives and the predicted signs.

use crate::cycint::CycInt;
use crate::error::{Error, Result};
use crate::gauss::{build_trace_counts_limited, gauss_sum_exact};
use crate::gf::{build_field, checked_field_size, FieldSpec, SubfieldEmbedding, VERIFY_LIMIT};
use crate::residue::{check_index_stability, euler_phi, gcd, index_of, is_prime, prime_factors, valuation};
use num_bigint::BigInt;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classification {
    PlusOne,
    MinusOne,
    RootOfUnity { order: u64, exponent: u64 },
    Other,
}

impl Classification {
    pub fn of(x: &CycInt) -> Classification {
        if *x == CycInt::one(1) {
            return Classification::PlusOne;
        }
        if *x == CycInt::from_int(1, -1) {
            return Classification::MinusOne;
        }
        match x.classify_root_of_unity() {
            Some((order, exponent)) => Classification::RootOfUnity { order, exponent },
            None => Classification::Other,
        }
    }

    pub fn sign(&self) -> Option<i8> {
        match self {
            Classification::PlusOne => Some(1),
            Classification::MinusOne => Some(-1),
            _ => None,
        }
    }
}

/// Data of the standing setting: p₁ | k odd prime, k' = k·p₁, common index e.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelativeSetting {
    pub p: u64,
    pub k: u64,
    pub p1: u64,
    pub k_prime: u64,
    /// 2-part of k times the distinct odd primes of k.
    pub h: u64,
    pub e: u64,
    pub f: u32,
    pub f_prime: u32,
}

pub fn relative_setting(p: u64, k: u64, p1: u64) -> Result<RelativeSetting> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p1 == 2 || !is_prime(p1) || k % p1 != 0 {
        return Err(Error::BadParameters(format!("p1 = {p1} must be an odd prime dividing k = {k}")));
    }
    if gcd(p, k) != 1 {
        return Err(Error::NotCoprime(p, k));
    }
    let k_prime = k * p1;
    let h = (1u64 << valuation(k, 2)) * prime_factors(k).into_iter().filter(|&q| q != 2).product::<u64>();
    if !check_index_stability(p, h, k_prime)? {
        return Err(Error::IndexUnstable { p, k, k_prime });
    }
    let e = index_of(p, h)?;
    let f = euler_phi(k) / e;
    let f_prime = euler_phi(k_prime) / e;
    if index_of(p, k)? != e || index_of(p, k_prime)? != e {
        return Err(Error::IndexUnstable { p, k, k_prime });
    }
    Ok(RelativeSetting { p, k, p1, k_prime, h, e, f: f as u32, f_prime: f_prime as u32 })
}

#[derive(Debug, Clone, Serialize)]
pub struct SignPrediction {
    /// ±1, or None when neither statement applies.
    pub epsilon: Option<i8>,
    pub rule: &'static str,
    /// Exponent of −1 with h the distinct odd primes of k'.
    pub exponent_odd_h: Option<u64>,
    /// Exponent of −1 with h carrying the 2-part of k.
    pub exponent_full_h: Option<u64>,
    pub readings_agree: bool,
}

impl SignPrediction {
    fn not_applicable(rule: &'static str) -> Self {
        SignPrediction { epsilon: None, rule, exponent_odd_h: None, exponent_full_h: None, readings_agree: true }
    }
}

/// ε = 1 when k' is odd with gcd(k', p−1) = 1; ε = (−1)^{(p−1)(p₁−1)φ(h)/4e}
/// when 2 ‖ k and gcd(k'/2, p−1) = gcd(k/2, p−1) = 1.
pub fn predicted_sign(p: u64, k: u64, p1: u64) -> SignPrediction {
    let Ok(s) = relative_setting(p, k, p1) else {
        return SignPrediction::not_applicable("standing hypotheses fail");
    };
    let kp = s.k_prime;
    if kp % 2 == 1 {
        if gcd(kp, p - 1) == 1 {
            return SignPrediction { epsilon: Some(1), rule: "odd", exponent_odd_h: Some(0), exponent_full_h: Some(0), readings_agree: true };
        }
        return SignPrediction::not_applicable("k' odd but gcd(k', p-1) > 1");
    }
    if valuation(k, 2) != 1 || gcd(kp / 2, p - 1) != 1 || gcd(k / 2, p - 1) != 1 {
        return SignPrediction::not_applicable("neither sign statement applies");
    }
    let odd_h: u64 = prime_factors(kp).into_iter().filter(|&q| q != 2).product();
    let exponent = |h: u64| -> Option<u64> {
        let num = (p - 1) * (p1 - 1) * euler_phi(h);
        (num % (4 * s.e) == 0).then(|| num / (4 * s.e))
    };
    let a = exponent(odd_h);
    let b = exponent(s.h);
    let agree = match (a, b) {
        (Some(x), Some(y)) => x % 2 == y % 2,
        _ => false,
    };
    let epsilon = match (a, agree) {
        (Some(x), true) => Some(if x % 2 == 0 { 1 } else { -1 }),
        _ => None,
    };
    SignPrediction { epsilon, rule: "two_exactly_divides", exponent_odd_h: a, exponent_full_h: b, readings_agree: agree }
}

#[derive(Debug, Clone, Serialize)]
pub struct RelativeGaussResult {
    #[serde(flatten)]
    pub setting: RelativeSetting,
    /// Exponent of χ' (order k') and of its restriction χ (order k).
    pub u_prime: u64,
    pub u: u64,
    #[serde(rename = "cyclotomic")]
    pub theta: CycInt,
    pub classification: Classification,
    pub predicted: SignPrediction,
}

impl RelativeGaussResult {
    pub fn matches_prediction(&self) -> Option<bool> {
        Some(self.classification.sign()? == self.predicted.epsilon?)
    }
}

/// Exponent of the restriction of χ'^{u'} (χ' of order k' on F_{q'}) to
/// F_q, as a pair (order k'/g, exponent), with c = (q'−1)/(q−1).
pub fn restrict_character(k_prime: u64, u_prime: u64, c: u128) -> (u64, u64) {
    let cm = (c % k_prime as u128) as u64;
    let uc = (u_prime as u128 * cm as u128 % k_prime as u128) as u64;
    let g = gcd(k_prime, cm);
    let k = k_prime / g;
    (k, (uc / g) % k)
}

fn cofactor(p: u64, f: u32, f_prime: u32) -> Result<u128> {
    let qp = crate::gf::field_size_u128(p, f_prime).ok_or_else(|| Error::TooLarge { size: format!("{p}^{f_prime}"), limit: u64::MAX })?;
    let q = crate::gf::field_size_u128(p, f).expect("smaller than q'");
    Ok((qp - 1) / (q - 1))
}

pub fn relative_gauss(p: u64, k: u64, p1: u64, u_prime: u64) -> Result<RelativeGaussResult> {
    relative_gauss_limited(p, k, p1, u_prime, VERIFY_LIMIT)
}

pub fn relative_gauss_limited(p: u64, k: u64, p1: u64, u_prime: u64, limit: u64) -> Result<RelativeGaussResult> {
    let setting = relative_setting(p, k, p1)?;
    let RelativeSetting { f, f_prime, k_prime, .. } = setting;
    if (f_prime - f) % 2 == 1 {
        return Err(Error::BadParameters(format!("f' − f = {} is odd", f_prime - f)));
    }
    checked_field_size(p, f_prime, limit)?;
    let big = build_field(p, f_prime)?;
    let emb = big.subfield_embed(f)?;
    let c = cofactor(p, f, f_prime)?;
    let (k_res, u_res) = restrict_character(k_prime, u_prime % k_prime, c);
    if k % k_res != 0 {
        return Err(Error::IncompatibleCharacters(format!("restriction has order {k_res}, not dividing {k}")));
    }
    let u = u_res * (k / k_res);
    if u % k == 0 {
        return Err(Error::DegenerateCharacter(format!("restriction of χ'^{u_prime} is trivial")));
    }
    let (big_table, small_table) = rayon::join(
        || build_trace_counts_limited(&big, k_prime, limit),
        || build_trace_counts_limited(&emb.sub, k, limit),
    );
    let gp = gauss_sum_exact(&big_table?, u_prime as i64).value;
    let g = gauss_sum_exact(&small_table?, u as i64).value;
    let denom = BigInt::from(p).pow(f + (f_prime - f) / 2);
    let theta = gp.checked_mul(&g.conj())?.div_exact(&denom)?;
    let theta = theta.descend(k_prime).unwrap_or(theta);
    let classification = Classification::of(&theta);
    Ok(RelativeGaussResult { setting, u_prime: u_prime % k_prime, u, theta, classification, predicted: predicted_sign(p, k, p1) })
}

/// θ^d = 1 with d = 2·gcd(k', p−1) for odd k' and gcd(k', p−1) otherwise.
pub fn root_order_bound_check(result: &RelativeGaussResult) -> bool {
    let s = &result.setting;
    let g = gcd(s.k_prime, s.p - 1);
    let d = if s.k_prime % 2 == 1 { 2 * g } else { g };
    result.theta.pow(d) == CycInt::one(1)
}

/// θ(χ'^t, χ^t) = 1 for odd k' with gcd(k', p−1) = 1 and p₁^s ∤ t, where
/// p₁^s ‖ k.
pub fn conjugate_exponent_check(p: u64, k: u64, p1: u64, t: u64) -> Result<bool> {
    let k_prime = k * p1;
    if k_prime % 2 == 0 || gcd(k_prime, p - 1) != 1 {
        return Err(Error::HypothesisFailed("needs odd k' and gcd(k', p-1) = 1".into()));
    }
    let s = valuation(k, p1);
    if t % p1.pow(s) == 0 {
        return Err(Error::HypothesisFailed(format!("{p1}^{s} divides t = {t}")));
    }
    let r = relative_gauss(p, k, p1, t)?;
    Ok(r.classification == Classification::PlusOne)
}

/// Σ χ'^{u'}(x) over the trace-1 representatives of F_{q'}^*/F_q^*: the coset
/// of γ'^b contributes χ'(γ'^b / Tr_{q'/q}(γ'^b)) when the trace is nonzero.
pub fn yamamoto_sum(p: u64, f: u32, f_prime: u32, k_prime: u64, u_prime: u64) -> Result<CycInt> {
    let big = build_field(p, f_prime)?;
    checked_field_size(p, f_prime, VERIFY_LIMIT)?;
    let emb = big.subfield_embed(f)?;
    yamamoto_sum_in(&big, &emb, k_prime, u_prime)
}

fn yamamoto_sum_in(big: &FieldSpec, emb: &SubfieldEmbedding, k_prime: u64, u_prime: u64) -> Result<CycInt> {
    if k_prime == 0 || (big.q - 1) % k_prime != 0 {
        return Err(Error::NotADivisor(k_prime, format!("{}^{} - 1", big.p, big.f)));
    }
    let c = (big.q - 1) / (emb.sub.q - 1);
    if (u_prime as u128 * c as u128) % k_prime as u128 == 0 {
        return Err(Error::TrivialRestriction);
    }
    // log of subfield elements: γ'^{c·j} ↦ j
    let q = emb.sub.q;
    let step = big.mul_map(&big.pow(&big.gamma, c));
    let mut log = std::collections::HashMap::with_capacity(q as usize);
    let mut y = big.one();
    for j in 0..q - 1 {
        log.insert(big.index_of(&y), j);
        y.coeffs = step.apply(&y.coeffs);
    }
    let tr = emb.trace_matrix();
    let mut image = big.zero();
    let mut raw = vec![0i128; k_prime as usize];
    let um = u_prime % k_prime;
    for (b, x) in big.enumerate_powers(0, c)? {
        tr.apply_into(&x.coeffs, &mut image.coeffs);
        if image.is_zero() {
            continue;
        }
        let j = log[&big.index_of(&image)];
        let e = (um as u128 * ((b as u128 + (q - 1 - j) as u128 * c as u128) % k_prime as u128)) % k_prime as u128;
        raw[e as usize] += 1;
    }
    Ok(CycInt::from_raw_i128(k_prime, raw))
}

/// Checks Σ·G_f(χ) = G_{f'}(χ') where χ is the restriction of χ'^{u'}.
pub fn yamamoto_identity_check(p: u64, f: u32, f_prime: u32, k_prime: u64, u_prime: u64) -> Result<bool> {
    if f == 0 || f_prime % f != 0 {
        return Err(Error::NotADivisor(f as u64, f_prime.to_string()));
    }
    let big = build_field(p, f_prime)?;
    checked_field_size(p, f_prime, VERIFY_LIMIT)?;
    let emb = big.subfield_embed(f)?;
    let sum = yamamoto_sum_in(&big, &emb, k_prime, u_prime)?;
    let c = (big.q - 1) / (emb.sub.q - 1);
    let (k, u) = restrict_character(k_prime, u_prime % k_prime, c as u128);
    let gp = gauss_sum_exact(&build_trace_counts_limited(&big, k_prime, VERIFY_LIMIT)?, u_prime as i64).value;
    let g = gauss_sum_exact(&build_trace_counts_limited(&emb.sub, k, VERIFY_LIMIT)?, u as i64).value;
    let n = gp.conductor();
    Ok(sum.lift(n)?.checked_mul(&g.lift(n)?)? == gp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn settings() {
        let s = relative_setting(2, 7, 7).unwrap();
        assert_eq!((s.k_prime, s.h, s.e, s.f, s.f_prime), (49, 7, 2, 3, 21));
        let s = relative_setting(2, 3, 3).unwrap();
        assert_eq!((s.e, s.f, s.f_prime), (1, 2, 6));
        let s = relative_setting(5, 6, 3).unwrap();
        assert_eq!((s.h, s.e, s.f, s.f_prime), (6, 1, 2, 6));
        assert!(matches!(relative_setting(2, 7, 3), Err(Error::BadParameters(_))));
        // ord_121(3) = 5 breaks the index between 11 and 121
        assert_eq!(relative_setting(3, 11, 11).unwrap_err(), Error::IndexUnstable { p: 3, k: 11, k_prime: 121 });
    }

    #[test]
    fn restriction_of_compatible_characters() {
        // (q'−1)/k' ≡ (q−1)/k (mod q−1): χ'^u restricts to χ^u
        for (p, k, p1) in [(2u64, 3u64, 3u64), (2, 7, 7), (2, 5, 5), (5, 6, 3)] {
            let s = relative_setting(p, k, p1).unwrap();
            let c = cofactor(p, s.f, s.f_prime).unwrap();
            for u in 1..s.k_prime {
                let (kr, ur) = restrict_character(s.k_prime, u, c);
                assert_eq!(ur * (k / kr) % k, u % k, "p={p} k={k} u={u}");
            }
        }
    }

    #[test]
    fn embedding_sends_gamma_to_norm_generator() {
        let big = build_field(2, 12).unwrap();
        for d in [2u32, 3, 4, 6] {
            let emb = big.subfield_embed(d).unwrap();
            let c = (big.q - 1) / (emb.sub.q - 1);
            for a in (0..emb.sub.q - 1).step_by(((emb.sub.q - 1) / 100).max(1) as usize) {
                let x = emb.sub.pow(&emb.sub.gamma, a);
                assert_eq!(emb.embed(&x), big.pow(&big.gamma, c * a));
            }
        }
    }

    #[test]
    fn theta_small_cases() {
        let r = relative_gauss(2, 3, 3, 1).unwrap();
        assert_eq!(r.classification, Classification::PlusOne);
        assert_eq!(r.predicted.epsilon, Some(1));
        assert!(root_order_bound_check(&r));
        let r = relative_gauss(5, 6, 3, 1).unwrap();
        assert_eq!(&r.theta.conj() * &r.theta, CycInt::one(1));
        assert!(root_order_bound_check(&r));
        assert_eq!(r.predicted.epsilon, Some(1));
        assert_eq!(r.classification.sign(), Some(1));
        assert!(r.predicted.readings_agree);
    }

    #[test]
    fn predicted_signs() {
        assert_eq!(predicted_sign(2, 7, 7).epsilon, Some(1));
        let s = predicted_sign(5, 6, 3);
        assert_eq!((s.epsilon, s.exponent_odd_h), (Some(1), Some(4)));
        let s = predicted_sign(11, 6, 3);
        assert_eq!((s.epsilon, s.exponent_odd_h), (Some(1), Some(10)));
        assert_eq!(predicted_sign(3, 11, 11).epsilon, None);
        // k' odd with gcd(k', p−1) > 1
        assert_eq!(predicted_sign(7, 3, 3).epsilon, None);
    }

    #[test]
    fn galois_stability_of_classification() {
        let base = relative_gauss(2, 3, 3, 1).unwrap().classification;
        for a in [2u64, 4, 5, 7, 8] {
            assert_eq!(relative_gauss(2, 3, 3, a).unwrap().classification, base);
        }
        let base = relative_gauss(5, 6, 3, 1).unwrap().classification;
        for a in [5u64, 7, 11, 13, 17] {
            assert_eq!(relative_gauss(5, 6, 3, a).unwrap().classification, base);
        }
    }

    #[test]
    fn conjugate_exponents() {
        assert!(conjugate_exponent_check(2, 3, 3, 2).unwrap());
        assert!(conjugate_exponent_check(2, 5, 5, 3).unwrap());
        assert!(matches!(conjugate_exponent_check(2, 3, 3, 3), Err(Error::HypothesisFailed(_))));
        assert!(matches!(conjugate_exponent_check(5, 6, 3, 1), Err(Error::HypothesisFailed(_))));
    }

    #[test]
    fn yamamoto_small() {
        assert!(yamamoto_identity_check(2, 2, 4, 15, 1).unwrap());
        assert!(yamamoto_identity_check(3, 1, 2, 8, 1).unwrap());
        assert!(yamamoto_identity_check(2, 2, 6, 9, 1).unwrap());
        assert_eq!(yamamoto_sum(2, 3, 3, 7, 1).unwrap(), CycInt::one(1));
        assert_eq!(yamamoto_sum(2, 2, 4, 15, 3), Err(Error::TrivialRestriction));
        // Σ = p^{(f'−f)/2}·θ
        let r = relative_gauss(2, 3, 3, 1).unwrap();
        let s = yamamoto_sum(2, 2, 6, 9, 1).unwrap();
        assert_eq!(s, r.theta.scale(&BigInt::from(4)));
    }
}
