//! Explicit finite fields F_{p^f} = F_p[x]/(m(x)) with a fixed primitive
//! element, absolute and relative traces, and subfield embeddings.
//!
//! The modulus is the lexicographically smallest monic irreducible of degree
//! f, comparing coefficient vectors from the constant term upward. The
//! primitive element γ is the smallest primitive coefficient vector in the
//! same order.

mod linalg;
mod poly;

pub use linalg::LinearMap;

use crate::error::{Error, Result};
use crate::residue::{factorize, is_prime, mul_mod, pow_mod};

/// Largest field the builder accepts.
pub const BUILD_LIMIT: u64 = 1 << 40;
/// Default cap on fields that get fully enumerated.
pub const VERIFY_LIMIT: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    pub coeffs: Vec<u64>,
}

impl FieldElement {
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

#[derive(Debug, Clone)]
pub struct FieldSpec {
    pub p: u64,
    pub f: u32,
    pub q: u64,
    /// Monic, low degree first, length f + 1.
    pub modulus: Vec<u64>,
    pub gamma: FieldElement,
    trace_basis: Vec<u64>,
    recurrence: Vec<u64>,
    order_primes: Vec<u64>,
}

/// p^f if it does not exceed `limit`.
pub fn checked_field_size(p: u64, f: u32, limit: u64) -> Result<u64> {
    match p.checked_pow(f) {
        Some(q) if q <= limit => Ok(q),
        _ => Err(Error::TooLarge { size: format!("{p}^{f}"), limit }),
    }
}

pub fn build_field(p: u64, f: u32) -> Result<FieldSpec> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if f == 0 {
        return Err(Error::BadDegree("extension degree must be at least 1".into()));
    }
    let q = checked_field_size(p, f, BUILD_LIMIT)?;
    let fu = f as usize;
    let modulus = if fu == 1 {
        vec![0, 1]
    } else {
        // c0 is the most significant digit of the search order; c0 = 0 is
        // always reducible, so start at c0 = 1.
        let span = q / p;
        (span..q)
            .map(|code| {
                let mut m = digits_msd_first(code, p, fu);
                m.push(1);
                m
            })
            .find(|m| poly::is_irreducible(m, p))
            .expect("irreducible polynomials exist in every degree")
    };
    let mut field = FieldSpec {
        p,
        f,
        q,
        modulus,
        gamma: FieldElement { coeffs: vec![0; fu] },
        trace_basis: Vec::new(),
        recurrence: Vec::new(),
        order_primes: factorize(q - 1).into_iter().map(|(r, _)| r).collect(),
    };
    field.trace_basis = (0..fu)
        .map(|i| {
            let mut c = vec![0; fu];
            c[i] = 1;
            field.trace_naive(&FieldElement { coeffs: c })
        })
        .collect();
    let gamma = (1..q)
        .map(|code| FieldElement { coeffs: digits_msd_first(code, p, fu) })
        .find(|g| field.is_primitive(g))
        .expect("F_q^* is cyclic");
    field.set_gamma(gamma)?;
    Ok(field)
}

/// Base-p digits of `code`, most significant first, as a length-n vector.
fn digits_msd_first(mut code: u64, p: u64, n: usize) -> Vec<u64> {
    let mut out = vec![0; n];
    for i in (0..n).rev() {
        out[i] = code % p;
        code /= p;
    }
    out
}

impl FieldSpec {
    /// Replaces γ by another primitive element and refreshes derived data.
    pub fn with_gamma(&self, gamma: FieldElement) -> Result<FieldSpec> {
        let mut out = self.clone();
        out.set_gamma(gamma)?;
        Ok(out)
    }

    fn set_gamma(&mut self, gamma: FieldElement) -> Result<()> {
        if !self.is_primitive(&gamma) {
            return Err(Error::BadParameters("generator is not primitive".into()));
        }
        let fu = self.f as usize;
        let mut cols = Vec::with_capacity(fu);
        let mut cur = self.one();
        for _ in 0..fu {
            cols.push(cur.coeffs.clone());
            cur = self.mul(&cur, &gamma);
        }
        self.recurrence = linalg::solve_columns(&cols, &cur.coeffs, self.p)
            .expect("powers of a primitive element below its degree are independent");
        self.gamma = gamma;
        Ok(())
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { coeffs: vec![0; self.f as usize] }
    }

    pub fn one(&self) -> FieldElement {
        self.from_int(1)
    }

    /// The prime-field element c·1.
    pub fn from_int(&self, c: u64) -> FieldElement {
        let mut x = self.zero();
        x.coeffs[0] = c % self.p;
        x
    }

    pub fn element(&self, coeffs: &[u64]) -> Result<FieldElement> {
        if coeffs.len() != self.f as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::BadParameters("coefficients out of range".into()));
        }
        Ok(FieldElement { coeffs: coeffs.to_vec() })
    }

    /// Little-endian base-p encoding: Σ c_i p^i.
    pub fn index_of(&self, x: &FieldElement) -> u64 {
        x.coeffs.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    pub fn element_at(&self, mut idx: u64) -> FieldElement {
        let mut x = self.zero();
        for c in x.coeffs.iter_mut() {
            *c = idx % self.p;
            idx /= self.p;
        }
        x
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(&x, &y)| (x + y) % self.p).collect();
        FieldElement { coeffs }
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let p = self.p;
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(&x, &y)| (x + p - y) % p).collect();
        FieldElement { coeffs }
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        self.sub(&self.zero(), a)
    }

    pub fn scale(&self, c: u64, a: &FieldElement) -> FieldElement {
        let coeffs = a.coeffs.iter().map(|&x| mul_mod(x, c % self.p, self.p)).collect();
        FieldElement { coeffs }
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let p = self.p;
        let fu = self.f as usize;
        let mut prod = vec![0u64; 2 * fu - 1];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                prod[i + j] = (prod[i + j] + mul_mod(x, y, p)) % p;
            }
        }
        for i in (fu..2 * fu - 1).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            for j in 0..fu {
                let m = self.modulus[j];
                if m != 0 {
                    prod[i - fu + j] = (prod[i - fu + j] + mul_mod(c, p - m, p)) % p;
                }
            }
        }
        prod.truncate(fu);
        FieldElement { coeffs: prod }
    }

    pub fn pow(&self, a: &FieldElement, mut e: u64) -> FieldElement {
        let mut acc = self.one();
        let mut b = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.q - 2))
    }

    pub fn frobenius(&self, a: &FieldElement) -> FieldElement {
        self.pow(a, self.p)
    }

    pub fn is_primitive(&self, x: &FieldElement) -> bool {
        if x.is_zero() {
            return false;
        }
        let one = self.one();
        if self.q == 2 {
            return *x == one;
        }
        self.order_primes.iter().all(|&r| self.pow(x, (self.q - 1) / r) != one)
    }

    /// Σ_{i<f} x^{p^i}, read off as a prime-field value.
    fn trace_naive(&self, x: &FieldElement) -> u64 {
        let mut acc = self.zero();
        let mut cur = x.clone();
        for _ in 0..self.f {
            acc = self.add(&acc, &cur);
            cur = self.frobenius(&cur);
        }
        debug_assert!(acc.coeffs[1..].iter().all(|&c| c == 0));
        acc.coeffs[0]
    }

    /// Tr_{q/p}(x), evaluated as a linear functional.
    pub fn trace_abs(&self, x: &FieldElement) -> u64 {
        let p = self.p;
        x.coeffs
            .iter()
            .zip(&self.trace_basis)
            .fold(0, |acc, (&c, &t)| (acc + mul_mod(c, t, p)) % p)
    }

    /// Tr(x^i) for the power basis.
    pub fn trace_basis(&self) -> &[u64] {
        &self.trace_basis
    }

    /// Coefficients c_i with γ^f = Σ_{i<f} c_i γ^i; every F_p-linear image of
    /// the sequence γ^a obeys the same recurrence.
    pub fn recurrence(&self) -> &[u64] {
        &self.recurrence
    }

    /// Matrix of x ↦ c·x on the power basis.
    pub fn mul_map(&self, c: &FieldElement) -> LinearMap {
        let fu = self.f as usize;
        let cols = (0..fu)
            .map(|i| {
                let mut e = vec![0; fu];
                e[i] = 1;
                self.mul(&FieldElement { coeffs: e }, c).coeffs
            })
            .collect();
        LinearMap { p: self.p, cols }
    }

    pub fn enumerate_powers(&self, start: u64, count: u64) -> Result<PowerIter<'_>> {
        match start.checked_add(count) {
            Some(end) if end < self.q => {}
            _ => {
                return Err(Error::RangeError(format!(
                    "powers [{start}, {start}+{count}) exceed the period {}",
                    self.q - 1
                )))
            }
        }
        Ok(PowerIter {
            _field: std::marker::PhantomData,
            step: self.mul_map(&self.gamma),
            next: start,
            end: start + count,
            current: self.pow(&self.gamma, start),
        })
    }

    /// Discrete log base γ of a nonzero prime-field element c·1.
    pub fn log_prime_field(&self, c: u64) -> Option<u64> {
        let c = c % self.p;
        if c == 0 {
            return None;
        }
        let step = (self.q - 1) / (self.p - 1);
        // g0 = γ^step generates F_p^*; its value is a constant.
        let g0 = self.pow(&self.gamma, step).coeffs[0];
        let mut cur = 1u64;
        for j in 0..self.p - 1 {
            if cur == c {
                return Some(j * step);
            }
            cur = mul_mod(cur, g0, self.p);
        }
        None
    }

    /// Embeds F_{p^d} into this field so that the subfield generator maps to
    /// γ^{(q−1)/(p^d−1)}.
    pub fn subfield_embed(&self, d: u32) -> Result<SubfieldEmbedding> {
        if d == 0 || self.f % d != 0 {
            return Err(Error::NotADivisor(d as u64, self.f.to_string()));
        }
        let du = d as usize;
        if d == self.f {
            let images = (0..du)
                .map(|i| {
                    let mut e = vec![0; du];
                    e[i] = 1;
                    FieldElement { coeffs: e }
                })
                .collect();
            return Ok(SubfieldEmbedding::new(self.clone(), images, true, self));
        }
        let q0 = self.p.pow(d);
        let beta = self.pow(&self.gamma, (self.q - 1) / (q0 - 1));
        let canon = build_field(self.p, d)?;
        if d == 1 {
            let images = vec![self.one()];
            let b = beta.coeffs[0];
            if canon.gamma.coeffs[0] == b {
                return Ok(SubfieldEmbedding::new(canon, images, true, self));
            }
            let sub = canon.with_gamma(FieldElement { coeffs: vec![b] })?;
            return Ok(SubfieldEmbedding::new(sub, images, false, self));
        }
        let step = self.mul_map(&beta);
        let mut roots = Vec::with_capacity(du);
        let mut cur = self.one();
        for _ in 0..q0 - 1 {
            if self.eval_sub_poly(&canon.modulus, &cur).is_zero() {
                roots.push(cur.clone());
                if roots.len() == du {
                    break;
                }
            }
            cur = FieldElement { coeffs: step.apply(&cur.coeffs) };
        }
        debug_assert_eq!(roots.len(), du);
        let powers_of = |r: &FieldElement| -> Vec<FieldElement> {
            let mut v = Vec::with_capacity(du);
            let mut c = self.one();
            for _ in 0..du {
                v.push(c.clone());
                c = self.mul(&c, r);
            }
            v
        };
        for r in &roots {
            let emb = SubfieldEmbedding::new(canon.clone(), powers_of(r), true, self);
            if emb.embed(&canon.gamma) == beta {
                return Ok(emb);
            }
        }
        // No root sends the canonical generator to β: keep the first root and
        // move the subfield generator to the preimage of β instead.
        let emb = SubfieldEmbedding::new(canon.clone(), powers_of(&roots[0]), false, self);
        let pre = emb.restrict(&beta).expect("β lies in the subfield");
        let sub = canon.with_gamma(pre)?;
        Ok(SubfieldEmbedding::new(sub, emb.images, false, self))
    }

    fn eval_sub_poly(&self, poly: &[u64], x: &FieldElement) -> FieldElement {
        poly.iter().rev().fold(self.zero(), |acc, &c| {
            let t = self.mul(&acc, x);
            self.add(&t, &self.from_int(c))
        })
    }

    /// Tr_{q/p^d}(x) in the coordinates of the embedded subfield.
    pub fn trace_rel(&self, x: &FieldElement, d: u32) -> Result<FieldElement> {
        let emb = self.subfield_embed(d)?;
        Ok(emb.relative_trace(x))
    }
}

pub struct PowerIter<'a> {
    _field: std::marker::PhantomData<&'a FieldSpec>,
    step: LinearMap,
    next: u64,
    end: u64,
    current: FieldElement,
}

impl Iterator for PowerIter<'_> {
    type Item = (u64, FieldElement);

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.end {
            return None;
        }
        let out = (self.next, self.current.clone());
        self.next += 1;
        if self.next < self.end {
            self.current = FieldElement { coeffs: self.step.apply(&self.current.coeffs) };
        }
        Some(out)
    }
}

/// An injective homomorphism F_{p^d} → F_{p^f}, given by the images of the
/// subfield power basis.
#[derive(Debug, Clone)]
pub struct SubfieldEmbedding {
    pub sub: FieldSpec,
    images: Vec<FieldElement>,
    /// Whether `sub` kept the canonical generator of `build_field(p, d)`.
    pub canonical_gamma: bool,
    big_f: u32,
    /// Matrix of Tr_{q/q0} on the big power basis.
    trace_map: LinearMap,
}

impl SubfieldEmbedding {
    fn new(sub: FieldSpec, images: Vec<FieldElement>, canonical_gamma: bool, big: &FieldSpec) -> Self {
        let fu = big.f as usize;
        let reps = big.f / sub.f;
        let q0 = sub.q;
        let cols = (0..fu)
            .map(|i| {
                let mut e = vec![0; fu];
                e[i] = 1;
                let mut cur = FieldElement { coeffs: e };
                let mut acc = big.zero();
                for _ in 0..reps {
                    acc = big.add(&acc, &cur);
                    cur = big.pow(&cur, q0);
                }
                acc.coeffs
            })
            .collect();
        SubfieldEmbedding {
            sub,
            images,
            canonical_gamma,
            big_f: big.f,
            trace_map: LinearMap { p: big.p, cols },
        }
    }

    pub fn embed(&self, x: &FieldElement) -> FieldElement {
        let p = self.sub.p;
        let mut out = vec![0u64; self.big_f as usize];
        for (&c, img) in x.coeffs.iter().zip(&self.images) {
            for (o, &v) in out.iter_mut().zip(&img.coeffs) {
                *o = (*o + mul_mod(c, v, p)) % p;
            }
        }
        FieldElement { coeffs: out }
    }

    /// The preimage of `y`, if `y` lies in the image.
    pub fn restrict(&self, y: &FieldElement) -> Option<FieldElement> {
        let cols: Vec<Vec<u64>> = self.images.iter().map(|e| e.coeffs.clone()).collect();
        linalg::solve_columns(&cols, &y.coeffs, self.sub.p).map(|coeffs| FieldElement { coeffs })
    }

    /// Tr_{q/q0}(y) as a big-field vector.
    pub fn relative_trace_big(&self, y: &FieldElement) -> FieldElement {
        FieldElement { coeffs: self.trace_map.apply(&y.coeffs) }
    }

    pub fn trace_matrix(&self) -> &LinearMap {
        &self.trace_map
    }

    /// Tr_{q/q0}(y) in subfield coordinates.
    pub fn relative_trace(&self, y: &FieldElement) -> FieldElement {
        self.restrict(&self.relative_trace_big(y)).expect("relative trace lands in the subfield")
    }
}

/// Exponentiation helper for field sizes: p^f as u128, or None on overflow.
pub fn field_size_u128(p: u64, f: u32) -> Option<u128> {
    (p as u128).checked_pow(f)
}

/// True when p^f ≡ 1 (mod k), i.e. k | p^f − 1, without forming p^f.
pub fn divides_field_order(p: u64, f: u64, k: u64) -> bool {
    k >= 1 && pow_mod(p, f, k) == 1 % k
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_f2() {
        let f = build_field(2, 1).unwrap();
        assert_eq!(f.gamma.coeffs, vec![1]);
        assert_eq!(f.modulus, vec![0, 1]);
    }

    #[test]
    fn f5_gamma_is_two() {
        let f = build_field(5, 1).unwrap();
        assert_eq!(f.gamma.coeffs, vec![2]);
        let got: Vec<(u64, u64)> = f.enumerate_powers(0, 4).unwrap().map(|(a, x)| (a, x.coeffs[0])).collect();
        assert_eq!(got, vec![(0, 1), (1, 2), (2, 4), (3, 3)]);
        assert_eq!(f.enumerate_powers(0, 1).unwrap().count(), 1);
        assert!(f.enumerate_powers(2, 3).is_err());
    }

    #[test]
    fn f4_arithmetic() {
        let f = build_field(2, 2).unwrap();
        assert_eq!(f.modulus, vec![1, 1, 1]);
        let g = f.gamma.clone();
        assert_eq!(g.coeffs, vec![0, 1]);
        assert_eq!(f.mul(&g, &g), f.add(&g, &f.one()));
        assert_eq!(f.trace_abs(&g), 1);
    }

    #[test]
    fn builder_errors() {
        assert_eq!(build_field(4, 1).unwrap_err(), Error::NotPrime(4));
        assert!(matches!(build_field(2, 41), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn f243_generator_order() {
        let f = build_field(3, 5).unwrap();
        assert_eq!(f.q, 243);
        let one = f.one();
        assert_eq!(f.pow(&f.gamma, 242), one);
        for d in [1u64, 2, 11, 22, 121] {
            assert_ne!(f.pow(&f.gamma, d), one);
        }
    }

    #[test]
    fn modulus_is_lexicographically_smallest() {
        for (p, deg) in [(2u64, 3u32), (3, 2), (3, 3), (5, 2), (2, 4), (7, 2)] {
            let field = build_field(p, deg).unwrap();
            let q = p.pow(deg);
            let first = (q / p..q)
                .map(|code| {
                    let mut m = digits_msd_first(code, p, deg as usize);
                    m.push(1);
                    m
                })
                .find(|m| brute_irreducible(m, p))
                .unwrap();
            assert_eq!(field.modulus, first);
        }
    }

    fn brute_irreducible(m: &[u64], p: u64) -> bool {
        // No root and no monic factor of degree ≤ deg/2, by trial division.
        let deg = m.len() - 1;
        for d in 1..=deg / 2 {
            for code in 0..p.pow(d as u32) {
                let mut g: Vec<u64> = (0..d).map(|i| code / p.pow(i as u32) % p).collect();
                g.push(1);
                if poly::rem(m, &g, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn trace_matches_definition_and_is_equidistributed() {
        for (p, deg) in [(2u64, 4u32), (3, 3), (5, 2), (7, 1), (2, 1)] {
            let f = build_field(p, deg).unwrap();
            let mut hist = vec![0u64; p as usize];
            for idx in 0..f.q {
                let x = f.element_at(idx);
                let t = f.trace_abs(&x);
                assert_eq!(t, f.trace_naive(&x));
                hist[t as usize] += 1;
            }
            assert!(hist.iter().all(|&h| h == f.q / p));
            assert_eq!(f.trace_abs(&f.one()), deg as u64 % p);
        }
    }

    #[test]
    fn recurrence_reproduces_trace_sequence() {
        for (p, deg) in [(2u64, 5u32), (3, 4), (5, 3), (13, 1)] {
            let f = build_field(p, deg).unwrap();
            let s: Vec<u64> = f.enumerate_powers(0, f.q - 1).unwrap().map(|(_, x)| f.trace_abs(&x)).collect();
            let c = f.recurrence();
            let fu = deg as usize;
            for a in 0..s.len() - fu {
                let pred = (0..fu).fold(0, |acc, i| (acc + c[i] * s[a + i]) % p);
                assert_eq!(pred, s[a + fu]);
            }
        }
    }

    #[test]
    fn inverse_and_division_by_zero() {
        let f = build_field(3, 3).unwrap();
        for idx in 1..f.q {
            let x = f.element_at(idx);
            assert_eq!(f.mul(&x, &f.inv(&x).unwrap()), f.one());
        }
        assert_eq!(f.inv(&f.zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn f4_in_f16() {
        let big = build_field(2, 4).unwrap();
        let emb = big.subfield_embed(2).unwrap();
        let g = &big.gamma;
        let image: Vec<FieldElement> = (0..3).map(|j| emb.embed(&emb.sub.pow(&emb.sub.gamma, j))).collect();
        let expected: Vec<FieldElement> = [0u64, 5, 10].iter().map(|&e| big.pow(g, e)).collect();
        assert_eq!(image, expected);
        for idx in 0..big.q {
            let x = big.element_at(idx);
            let t = emb.relative_trace(&x);
            assert_eq!(emb.embed(&t), big.add(&x, &big.pow(&x, 4)));
            let y = emb.embed(&t);
            assert_eq!(big.pow(&y, 4), y);
        }
    }

    #[test]
    fn embedding_identity_and_prime_subfield() {
        let big = build_field(3, 4).unwrap();
        let id = big.subfield_embed(4).unwrap();
        assert_eq!(id.embed(&big.gamma), big.gamma);
        assert_eq!(big.trace_rel(&big.gamma, 4).unwrap(), big.gamma);
        assert_eq!(big.trace_rel(&big.zero(), 2).unwrap().coeffs, vec![0, 0]);
        let prime = big.subfield_embed(1).unwrap();
        let beta = big.pow(&big.gamma, 40);
        assert_eq!(prime.embed(&prime.sub.gamma), beta);
        assert!(big.subfield_embed(3).is_err());
    }

    #[test]
    fn embeddings_send_generator_to_beta_and_are_homomorphisms() {
        for (p, f, d) in [(2u64, 6u32, 3u32), (2, 6, 2), (3, 4, 2), (2, 8, 4), (5, 4, 2), (2, 12, 4)] {
            let big = build_field(p, f).unwrap();
            let emb = big.subfield_embed(d).unwrap();
            let q0 = p.pow(d);
            let beta = big.pow(&big.gamma, (big.q - 1) / (q0 - 1));
            assert_eq!(emb.embed(&emb.sub.gamma), beta, "p={p} f={f} d={d}");
            for a in 0..q0 {
                for b in [1u64, 2, q0 - 1] {
                    let x = emb.sub.element_at(a);
                    let y = emb.sub.element_at(b.min(q0 - 1));
                    assert_eq!(emb.embed(&emb.sub.mul(&x, &y)), big.mul(&emb.embed(&x), &emb.embed(&y)));
                    assert_eq!(emb.embed(&emb.sub.add(&x, &y)), big.add(&emb.embed(&x), &emb.embed(&y)));
                }
            }
        }
    }

    #[test]
    fn trace_transitivity() {
        let big = build_field(2, 6).unwrap();
        for d in [1u32, 2, 3] {
            let emb = big.subfield_embed(d).unwrap();
            for idx in 0..big.q {
                let x = big.element_at(idx);
                let t = emb.relative_trace(&x);
                assert_eq!(emb.sub.trace_abs(&t), big.trace_abs(&x));
            }
        }
    }

    #[test]
    fn frobenius_fixes_prime_field() {
        let f = build_field(7, 3).unwrap();
        for c in 0..7 {
            let x = f.from_int(c);
            assert_eq!(f.frobenius(&x), x);
        }
    }

    #[test]
    fn prime_field_logs() {
        let f = build_field(3, 4).unwrap();
        for c in 1..3 {
            let e = f.log_prime_field(c).unwrap();
            assert_eq!(f.pow(&f.gamma, e), f.from_int(c));
        }
        assert_eq!(f.log_prime_field(0), None);
    }

    #[test]
    fn big_field_builds() {
        let f = build_field(2, 21).unwrap();
        assert_eq!(f.q, 2_097_152);
        let one = f.one();
        assert_eq!(f.pow(&f.gamma, f.q - 1), one);
        for (r, _) in factorize(f.q - 1) {
            assert_ne!(f.pow(&f.gamma, (f.q - 1) / r), one);
        }
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        fn small_field() -> impl Strategy<Value = (u64, u32)> {
            prop::sample::select(vec![(2u64, 3u32), (2, 5), (3, 2), (3, 4), (5, 2), (7, 2), (11, 1), (2, 8)])
        }

        proptest! {
            #[test]
            fn ring_axioms((p, deg) in small_field(), a in 0u64..1 << 20, b in 0u64..1 << 20, c in 0u64..1 << 20) {
                let f = build_field(p, deg).unwrap();
                let (x, y, z) = (f.element_at(a % f.q), f.element_at(b % f.q), f.element_at(c % f.q));
                prop_assert_eq!(f.mul(&x, &y), f.mul(&y, &x));
                prop_assert_eq!(f.mul(&f.mul(&x, &y), &z), f.mul(&x, &f.mul(&y, &z)));
                prop_assert_eq!(f.mul(&x, &f.add(&y, &z)), f.add(&f.mul(&x, &y), &f.mul(&x, &z)));
                prop_assert_eq!(f.add(&x, &f.zero()), x.clone());
                prop_assert_eq!(f.trace_abs(&f.add(&x, &y)), (f.trace_abs(&x) + f.trace_abs(&y)) % p);
                prop_assert_eq!(f.trace_abs(&f.scale(c, &x)), (c % p) * f.trace_abs(&x) % p);
            }

            #[test]
            fn chunked_enumeration_concatenates((p, deg) in small_field(), split in 0u64..1000) {
                let f = build_field(p, deg).unwrap();
                let n = split % (f.q - 1);
                let whole: Vec<_> = f.enumerate_powers(0, f.q - 1).unwrap().collect();
                let mut parts: Vec<_> = f.enumerate_powers(0, n).unwrap().collect();
                parts.extend(f.enumerate_powers(n, f.q - 1 - n).unwrap());
                prop_assert_eq!(&whole, &parts);
                let mut idx: Vec<u64> = whole.iter().map(|(_, x)| f.index_of(x)).collect();
                idx.sort_unstable();
                prop_assert_eq!(idx, (1..f.q).collect::<Vec<_>>());
            }
        }
    }
}
