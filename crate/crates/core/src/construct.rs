//! Connection sets D = ∪_{i∈I} C_i^{(k,q)} for the known cyclotomic
//! constructions, and the index-set lift that extends them to infinite
//! families.

use crate::cycint::CycInt;
use crate::error::{Error, Result};
use crate::gf::{field_size_u128, FieldElement, FieldSpec, VERIFY_LIMIT};
use crate::residue::{
    check_index_stability, euler_phi, gcd, index_of, is_prime, multiplicative_order, pow_mod,
    semiprimitive_exponent, valuation,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::BTreeMap;

pub const SCHEMA: &str = "csrg/1";

fn schema_tag() -> String {
    SCHEMA.to_string()
}

fn one() -> u64 {
    1
}

fn is_one(x: &u64) -> bool {
    *x == 1
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub source: String,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// "srg", "skew_hadamard" or "paley_pds" when the construction predicts one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicted: Option<String>,
}

impl Meta {
    pub fn new(source: &str) -> Meta {
        Meta { source: source.to_string(), ..Meta::default() }
    }

    fn param(mut self, key: &str, v: impl Into<Value>) -> Meta {
        self.params.insert(key.to_string(), v.into());
        self
    }

    fn note(mut self, s: impl Into<String>) -> Meta {
        self.notes.push(s.into());
        self
    }

    fn predict(mut self, kind: &str) -> Meta {
        self.predicted = Some(kind.to_string());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectionSpec {
    #[serde(default = "schema_tag")]
    pub schema: String,
    pub p: u64,
    pub f: u32,
    pub k: u64,
    #[serde(rename = "I")]
    pub classes: Vec<u64>,
    /// Classes are cosets of powers of γ^generator rather than γ.
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub generator: u64,
    pub meta: Meta,
    pub symbolic: bool,
}

impl ConnectionSpec {
    /// Validates and sorts. Fields above the verification limit are marked
    /// symbolic.
    pub fn new(p: u64, f: u32, k: u64, classes: Vec<u64>, meta: Meta) -> Result<ConnectionSpec> {
        let mut spec = ConnectionSpec {
            schema: schema_tag(),
            p,
            f,
            k,
            classes,
            generator: 1,
            meta,
            symbolic: !matches!(field_size_u128(p, f), Some(q) if q <= VERIFY_LIMIT as u128),
        };
        spec.classes.sort_unstable();
        spec.validate()?;
        Ok(spec)
    }

    /// Checks the invariants of a spec, e.g. one read from JSON.
    pub fn validate(&self) -> Result<()> {
        if !is_prime(self.p) {
            return Err(Error::NotPrime(self.p));
        }
        if self.f == 0 {
            return Err(Error::BadDegree("extension degree must be at least 1".into()));
        }
        if self.k == 0 || pow_mod(self.p % self.k, self.f as u64, self.k) != 1 % self.k {
            return Err(Error::NotADivisor(self.k, format!("{}^{} - 1", self.p, self.f)));
        }
        if self.classes.is_empty() {
            return Err(Error::BadParameters("empty index set".into()));
        }
        if let Some(&i) = self.classes.iter().find(|&&i| i >= self.k) {
            return Err(Error::BadParameters(format!("class index {i} not below k = {}", self.k)));
        }
        if self.classes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::BadParameters("index set must be strictly increasing".into()));
        }
        if self.generator == 0 || gcd(self.generator, self.k) != 1 {
            return Err(Error::BadParameters(format!("generator exponent {} is not a unit mod k", self.generator)));
        }
        if let Some(q) = self.q() {
            if gcd(self.generator, q - 1) != 1 {
                return Err(Error::BadParameters(format!("gamma^{} is not primitive", self.generator)));
            }
        }
        Ok(())
    }

    /// The same set with classes taken relative to γ^t.
    pub fn with_generator(&self, t: u64) -> Result<ConnectionSpec> {
        let spec = ConnectionSpec { generator: t, ..self.clone() };
        spec.validate()?;
        Ok(spec)
    }

    /// Relabels to the field's own γ: C_i for γ^t is C_{ti mod k} for γ.
    pub fn canonical(&self) -> ConnectionSpec {
        if self.generator == 1 {
            return self.clone();
        }
        let mut classes: Vec<u64> =
            self.classes.iter().map(|&i| (i as u128 * self.generator as u128 % self.k as u128) as u64).collect();
        classes.sort_unstable();
        ConnectionSpec { classes, generator: 1, ..self.clone() }
    }

    /// q when it fits in 64 bits.
    pub fn q(&self) -> Option<u64> {
        self.p.checked_pow(self.f)
    }

    /// |D| = |I|·(q−1)/k.
    pub fn size(&self) -> Option<u128> {
        let q = field_size_u128(self.p, self.f)?;
        Some(self.classes.len() as u128 * ((q - 1) / self.k as u128))
    }

    /// Class index j0 of −1, so that −C_i = C_{i+j0}.
    pub fn minus_one_shift(&self) -> u64 {
        if self.p == 2 {
            return 0;
        }
        // (q−1)/2 mod k without forming q: (q−1)/2 = ((q−1) mod 2k)/2.
        let m = 2 * self.k as u128;
        let mut acc = 1u128;
        for _ in 0..self.f {
            acc = acc * self.p as u128 % m;
        }
        let qm1 = (acc + m - 1) % m;
        (qm1 / 2 % self.k as u128) as u64
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }
}

/// True iff x ∈ γ^i⟨γ^k⟩, tested as (x·γ^{−i})^{(q−1)/k} = 1.
pub fn cyclotomic_class_membership(field: &FieldSpec, k: u64, i: u64, x: &FieldElement) -> Result<bool> {
    let q = field.q;
    if k == 0 || (q - 1) % k != 0 {
        return Err(Error::NotADivisor(k, format!("{}^{} - 1", field.p, field.f)));
    }
    if x.is_zero() {
        return Err(Error::ZeroElement);
    }
    let shift = field.pow(&field.gamma, (q - 1 - i % (q - 1)) % (q - 1));
    let y = field.mul(x, &shift);
    Ok(field.pow(&y, (q - 1) / k) == field.one())
}

const TABLE1: [(u64, u64, u32, u64); 11] = [
    (11, 3, 5, 2),
    (19, 5, 9, 2),
    (35, 3, 12, 2),
    (37, 7, 9, 4),
    (43, 11, 7, 6),
    (67, 17, 33, 2),
    (107, 3, 53, 2),
    (133, 5, 18, 6),
    (163, 41, 81, 2),
    (323, 3, 144, 2),
    (499, 5, 249, 2),
];

/// Row `no` (1-based) as (k, p, f, e).
pub fn table1_row(no: usize) -> Result<(u64, u64, u32, u64)> {
    (1..=TABLE1.len())
        .contains(&no)
        .then(|| TABLE1[no - 1])
        .ok_or_else(|| Error::BadParameters(format!("table row {no} outside 1..=11")))
}

pub fn build_table1(no: usize) -> Result<ConnectionSpec> {
    let (k, p, f, e) = table1_row(no)?;
    let meta = Meta::new("table1").param("no", no).param("e", e).predict("srg");
    let mut spec = ConnectionSpec::new(p, f, k, vec![0], meta)?;
    if no == 5 {
        // 11^7 exceeds the default limit but is enumerable with a raised one.
        spec.symbolic = false;
        spec.meta.notes.push("numeric above the default limit; verify with a raised size cap".into());
    }
    Ok(spec)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Thm13Variant {
    I,
    Ii,
    Iii,
}

const THM13_I: [(u64, u64); 6] = [(2, 7), (3, 107), (5, 19), (5, 499), (17, 67), (41, 163)];
const THM13_II: [(u64, u64); 2] = [(3, 13), (7, 37)];
const THM13_III: [(u64, u64, u64); 3] = [(2, 3, 5), (3, 5, 7), (3, 17, 19)];

fn checked_pow(b: u64, e: u32) -> Result<u64> {
    b.checked_pow(e).ok_or_else(|| Error::BadParameters(format!("{b}^{e} overflows")))
}

fn to_degree(f: u64) -> Result<u32> {
    u32::try_from(f).map_err(|_| Error::BadParameters(format!("degree {f} too large")))
}

fn odd_prime(x: u64, name: &str) -> Result<()> {
    if x == 2 || !is_prime(x) {
        return Err(Error::BadParameters(format!("{name} = {x} is not an odd prime")));
    }
    Ok(())
}

fn with_divisibility(p: u64, f: u32, k: u64, classes: Vec<u64>, meta: Meta) -> Result<ConnectionSpec> {
    ConnectionSpec::new(p, f, k, classes, meta).map_err(|e| match e {
        Error::NotADivisor(..) => Error::BadParameters(format!("{k} does not divide {p}^{f} - 1")),
        other => other,
    })
}

pub fn build_thm13(
    variant: Thm13Variant,
    p: u64,
    p1: u64,
    p2: Option<u64>,
    m: u32,
    n: Option<u32>,
) -> Result<ConnectionSpec> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    odd_prime(p1, "p1")?;
    if m == 0 {
        return Err(Error::BadParameters("m must be at least 1".into()));
    }
    let a = checked_pow(p1, m - 1)?;
    let mut meta = Meta::new(match variant {
        Thm13Variant::I => "thm13i",
        Thm13Variant::Ii => "thm13ii",
        Thm13Variant::Iii => "thm13iii",
    })
    .param("p", p)
    .param("p1", p1)
    .param("m", m)
    .predict("srg");
    match variant {
        Thm13Variant::I | Thm13Variant::Ii => {
            let (listed, div) = match variant {
                Thm13Variant::I => (THM13_I.contains(&(p, p1)), 2),
                _ => (THM13_II.contains(&(p, p1)), 4),
            };
            if (p1 - 1) % div != 0 {
                return Err(Error::BadParameters(format!("{div} does not divide p1 - 1")));
            }
            if !listed {
                meta = meta.note("parameters outside the listed cases");
            }
            let k = a * p1;
            let f = to_degree(a * (p1 - 1) / div)?;
            with_divisibility(p, f, k, (0..a).collect(), meta)
        }
        Thm13Variant::Iii => {
            let p2 = p2.ok_or_else(|| Error::BadParameters("variant iii needs p2".into()))?;
            let n = n.unwrap_or(1);
            odd_prime(p2, "p2")?;
            if n == 0 || p2 == p1 {
                return Err(Error::BadParameters("need n >= 1 and p1 != p2".into()));
            }
            if !THM13_III.contains(&(p, p1, p2)) {
                meta = meta.note("parameters outside the listed cases");
            }
            meta = meta.param("p2", p2).param("n", n);
            let b = checked_pow(p2, n - 1)?;
            let (pm, pn) = (a * p1, b * p2);
            let k = pm.checked_mul(pn).ok_or_else(|| Error::BadParameters("k overflows".into()))?;
            let f = to_degree(a * (p1 - 1) * b * (p2 - 1) / 2)?;
            let classes = (0..a).flat_map(|i| (0..b).map(move |j| (pn * i + pm * j) % k)).collect();
            with_divisibility(p, f, k, classes, meta)
        }
    }
}

/// An index set H ⊆ Z_k attached to an odd prime p1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HSet {
    pub k: u64,
    #[serde(rename = "H")]
    pub elements: Vec<u64>,
    pub p1: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HMode {
    ResidueCover,
    VanishingSum,
}

impl HSet {
    pub fn new(k: u64, p1: u64, mut elements: Vec<u64>) -> Result<HSet> {
        elements.sort_unstable();
        if elements.iter().any(|&x| x >= k) {
            return Err(Error::InvalidH(format!("elements must lie in [0, {k})")));
        }
        if elements.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidH("repeated element".into()));
        }
        if elements.is_empty() {
            return Err(Error::InvalidH("empty".into()));
        }
        Ok(HSet { k, elements, p1 })
    }

    /// Q ∪ 2Q ∪ {extra} in Z_{2p1}, Q the squares of (Z/2p1Z)^*.
    pub fn q_2q_union(p1: u64, extra: u64) -> Result<HSet> {
        odd_prime(p1, "p1")?;
        let h = 2 * p1;
        let q: Vec<u64> = (1..h).filter(|&x| gcd(x, h) == 1).map(|x| x * x % h).collect();
        let mut all: Vec<u64> = q.iter().flat_map(|&x| [x, 2 * x % h]).chain([extra]).collect();
        all.sort_unstable();
        all.dedup();
        HSet::new(h, p1, all)
    }
}

/// Residue-cover: H mod p1^{v_{p1}(k)} hits every class exactly once.
/// Vanishing-sum: Σ_{i∈H} ζ_{p1}^i = 0 in Z[ζ_{p1}].
pub fn validate_h(h: &HSet, mode: HMode) -> bool {
    let p1 = h.p1;
    match mode {
        HMode::ResidueCover => {
            let m = p1.pow(valuation(h.k, p1));
            if m == 1 || h.elements.len() as u64 != m {
                return false;
            }
            let mut seen = vec![false; m as usize];
            h.elements.iter().all(|&i| !std::mem::replace(&mut seen[(i % m) as usize], true))
        }
        HMode::VanishingSum => {
            let mut raw = vec![0i128; p1 as usize];
            for &i in &h.elements {
                raw[(i % p1) as usize] += 1;
            }
            CycInt::from_raw_i128(p1, raw).is_zero()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Thm14Variant {
    I,
    Ii,
}

const THM14_II_SKEW: [(u64, u64); 1] = [(3, 107)];
const THM14_II_PALEY: [(u64, u64); 4] = [(5, 19), (17, 67), (41, 163), (5, 499)];

fn half_size_kind(p: u64, f: u32) -> &'static str {
    if p % 4 == 3 && f % 2 == 1 {
        "skew_hadamard"
    } else {
        "paley_pds"
    }
}

/// I = {2j + i·k/h : 0 ≤ j < p1^{e1−1}, i ∈ H} for h = 2p1, k = 2p1^{e1}.
fn shd_index_set(h: &HSet, e1: u32) -> Result<Vec<u64>> {
    let a = checked_pow(h.p1, e1 - 1)?;
    let k = 2 * a * h.p1;
    let mut classes: Vec<u64> =
        (0..a).flat_map(|j| h.elements.iter().map(move |&i| (2 * j + i * a) % k)).collect();
    let n = classes.len();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() != n {
        return Err(Error::DuplicateIndices);
    }
    Ok(classes)
}

const INCLUSIVE_BOUND_NOTE: &str =
    "union over j uses p1^(m-1) terms; the inclusive upper index would break |D| = (q-1)/2";

pub fn build_thm14(
    variant: Thm14Variant,
    p: u64,
    p1: u64,
    m: u32,
    s: Option<u64>,
    h: Option<&HSet>,
) -> Result<ConnectionSpec> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    odd_prime(p1, "p1")?;
    if m == 0 {
        return Err(Error::BadParameters("m must be at least 1".into()));
    }
    let pm = checked_pow(p1, m)?;
    let k = 2 * pm;
    match variant {
        Thm14Variant::I => {
            if p1 % 8 != 7 {
                return Err(Error::BadParameters(format!("p1 = {p1} is not 7 mod 8")));
            }
            let s = s.unwrap_or(1);
            if s % 2 == 0 {
                return Err(Error::BadParameters(format!("s = {s} is not odd")));
            }
            if gcd(p, k) != 1 {
                return Err(Error::BadParameters(format!("p = {p} divides k = {k}")));
            }
            let ord = multiplicative_order(p, k)?;
            if ord != euler_phi(k) / 2 {
                return Err(Error::BadParameters(format!("ord_{k}({p}) = {ord}, not phi(k)/2")));
            }
            let default_h;
            let h = match h {
                Some(h) => h,
                None => {
                    default_h = HSet::new(k, p1, (0..pm).collect())?;
                    &default_h
                }
            };
            if h.k != k || h.p1 != p1 || !validate_h(h, HMode::ResidueCover) {
                return Err(Error::InvalidH(format!("H must cover Z_{pm} exactly once inside Z_{k}")));
            }
            let f = to_degree(ord * s)?;
            let kind = if p % 4 == 3 { "skew_hadamard" } else { "paley_pds" };
            let meta = Meta::new("thm14i")
                .param("p", p)
                .param("p1", p1)
                .param("m", m)
                .param("s", s)
                .param("H", h.elements.clone())
                .predict(kind);
            with_divisibility(p, f, k, h.elements.clone(), meta)
        }
        Thm14Variant::Ii => {
            let listed = THM14_II_SKEW.contains(&(p, p1)) || THM14_II_PALEY.contains(&(p, p1));
            let h = HSet::q_2q_union(p1, 0)?;
            let f = to_degree(pm / p1 * (p1 - 1) / 2)?;
            let mut meta = Meta::new("thm14ii")
                .param("p", p)
                .param("p1", p1)
                .param("m", m)
                .param("H", h.elements.clone())
                .note(INCLUSIVE_BOUND_NOTE)
                .predict(half_size_kind(p, f));
            if !listed {
                meta = meta.note("parameters outside the listed cases");
            }
            with_divisibility(p, f, k, shd_index_set(&h, m)?, meta)
        }
    }
}

/// The sumset family over k = Π p_i^{e_i} with base modulus h = Π p_i.
pub fn build_srg_family(p: u64, primes: &[(u64, u32)], e: u64) -> Result<ConnectionSpec> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if primes.is_empty() {
        return Err(Error::BadParameters("need at least one prime".into()));
    }
    for (j, &(pi, ei)) in primes.iter().enumerate() {
        odd_prime(pi, "p_i")?;
        if ei == 0 || primes[..j].iter().any(|&(q, _)| q == pi) {
            return Err(Error::BadParameters("primes must be distinct with exponents >= 1".into()));
        }
    }
    let h: u64 = primes.iter().map(|&(pi, _)| pi).product();
    let powers: Vec<u64> = primes.iter().map(|&(pi, ei)| checked_pow(pi, ei)).collect::<Result<_>>()?;
    let k = powers.iter().try_fold(1u64, |a, &b| a.checked_mul(b));
    let k = k.ok_or_else(|| Error::BadParameters("k overflows".into()))?;
    if p % h == 0 || gcd(p, h) != 1 {
        return Err(Error::HypothesisFailed(format!("p = {p} divides h = {h}")));
    }
    let eh = index_of(p, h)?;
    if eh != e {
        return Err(Error::HypothesisFailed(format!("index of <{p}> mod h = {h} is {eh}, not {e}")));
    }
    let ek = index_of(p, k)?;
    if ek != e || !check_index_stability(p, h, k)? {
        return Err(Error::HypothesisFailed(format!("index of <{p}> is not stable from h = {h} to k = {k}")));
    }
    if gcd(k, p - 1) != 1 {
        return Err(Error::HypothesisFailed(format!("gcd(k = {k}, p - 1) != 1")));
    }
    if primes.len() > 1 {
        for &(pj, ej) in primes {
            let hj = h / pj;
            if ej > 1 && semiprimitive_exponent(p, hj)?.is_none() {
                return Err(Error::HypothesisFailed(format!("no s with {p}^s = -1 mod h_j = {hj}")));
            }
        }
    }
    let f = to_degree(euler_phi(k) / e)?;
    let mut classes = vec![0u64];
    for (&(pj, _), &pw) in primes.iter().zip(&powers) {
        let nj = k / pw;
        let range = pw / pj;
        classes = classes.iter().flat_map(|&c| (0..range).map(move |i| (c + i * nj) % k)).collect();
    }
    let meta = Meta::new("srg_family")
        .param("p", p)
        .param("primes", primes.iter().map(|&(a, b)| json!([a, b])).collect::<Vec<_>>())
        .param("e", e)
        .param("h", h)
        .predict("srg");
    ConnectionSpec::new(p, f, k, classes, meta)
}

/// Family over k = 2p1^{e1} lifted from h = 2p1 with a vanishing-sum H.
pub fn build_shd_family(p: u64, p1: u64, e1: u32, e: u64, h: &HSet) -> Result<ConnectionSpec> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    odd_prime(p1, "p1")?;
    if e1 == 0 {
        return Err(Error::BadParameters("e1 must be at least 1".into()));
    }
    let hm = 2 * p1;
    if h.k != hm || h.p1 != p1 {
        return Err(Error::InvalidH(format!("H must be a subset of Z_{hm}")));
    }
    if !validate_h(h, HMode::VanishingSum) {
        return Err(Error::InvalidH(format!("sum of zeta_{p1}^i over H is not zero")));
    }
    let k = 2 * checked_pow(p1, e1)?;
    if gcd(p, hm) != 1 {
        return Err(Error::HypothesisFailed(format!("p = {p} divides h = {hm}")));
    }
    let eh = index_of(p, hm)?;
    if eh != e {
        return Err(Error::HypothesisFailed(format!("index of <{p}> mod h = {hm} is {eh}, not {e}")));
    }
    if index_of(p, k)? != e || !check_index_stability(p, hm, k)? {
        return Err(Error::HypothesisFailed(format!("index of <{p}> is not stable from h = {hm} to k = {k}")));
    }
    if gcd(k / 2, p - 1) != 1 {
        return Err(Error::HypothesisFailed(format!("gcd(k/2 = {}, p - 1) != 1", k / 2)));
    }
    let f = to_degree(euler_phi(k) / e)?;
    let meta = Meta::new("shd_family")
        .param("p", p)
        .param("p1", p1)
        .param("e1", e1)
        .param("e", e)
        .param("H", h.elements.clone())
        .note(INCLUSIVE_BOUND_NOTE)
        .predict(half_size_kind(p, f));
    ConnectionSpec::new(p, f, k, shd_index_set(h, e1)?, meta)
}

/// I′ = {i·p1 + j·k/p1^{e1} mod kp1 : i ∈ I, 0 ≤ j < p1} over F_{p^{f′}}.
pub fn lift_index_set(spec: &ConnectionSpec, p1: u64, e1: u32) -> Result<ConnectionSpec> {
    odd_prime(p1, "p1")?;
    let (p, k) = (spec.p, spec.k);
    if e1 == 0 || valuation(k, p1) != e1 {
        return Err(Error::HypothesisFailed(format!("{p1}^{e1} does not exactly divide k = {k}")));
    }
    let k2 = k.checked_mul(p1).ok_or_else(|| Error::BadParameters("k overflows".into()))?;
    let e = index_of(p, k)?;
    if euler_phi(k) / e != spec.f as u64 {
        return Err(Error::HypothesisFailed(format!("f = {} is not phi(k)/e = {}", spec.f, euler_phi(k) / e)));
    }
    if index_of(p, k2)? != e {
        return Err(Error::IndexUnstable { p, k, k_prime: k2 });
    }
    let step = k / checked_pow(p1, e1)?;
    let mut classes: Vec<u64> =
        spec.classes.iter().flat_map(|&i| (0..p1).map(move |j| (i * p1 + j * step) % k2)).collect();
    let n = classes.len();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() != n {
        return Err(Error::DuplicateIndices);
    }
    let mut meta = spec.meta.clone();
    let depth = meta.params.get("lift_depth").and_then(Value::as_u64).unwrap_or(0) + 1;
    if depth == 1 {
        meta.params.insert("base".into(), json!({"p": p, "f": spec.f, "k": k, "source": meta.source}));
    }
    meta.source = "lift".into();
    meta.params.insert("lift_depth".into(), json!(depth));
    meta.params.insert("lift_prime".into(), json!(p1));
    meta.params.insert("e".into(), json!(e));
    ConnectionSpec::new(p, to_degree(euler_phi(k2) / e)?, k2, classes, meta)
}

/// Known skew Hadamard parameters (p1, p, f, e) with h = 2·p1, f = φ(p1)/e.
pub const SHD_ONE_PRIME_ROWS: [(u64, u64, u32, u64); 10] = [
    (7, 2, 3, 2),
    (13, 3, 3, 4),
    (31, 2, 5, 6),
    (31, 5, 3, 10),
    (73, 2, 9, 8),
    (127, 2, 7, 18),
    (307, 17, 3, 102),
    (757, 3, 9, 84),
    (1093, 3, 7, 156),
    (1723, 41, 3, 574),
];

/// Known skew Hadamard parameters (p1, p2, p, f, e) with two primes.
pub const SHD_TWO_PRIME_ROWS: [(u64, u64, u64, u32, u64); 4] =
    [(3, 5, 2, 4, 2), (5, 17, 2, 8, 8), (31, 11, 2, 10, 30), (127, 43, 2, 14, 378)];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::build_field;

    fn range(n: u64) -> Vec<u64> {
        (0..n).collect()
    }

    #[test]
    fn class_membership() {
        let f5 = build_field(5, 1).unwrap();
        assert_eq!(f5.gamma, f5.from_int(2));
        assert!(cyclotomic_class_membership(&f5, 2, 0, &f5.from_int(4)).unwrap());
        assert!(cyclotomic_class_membership(&f5, 2, 1, &f5.from_int(2)).unwrap());
        assert!(!cyclotomic_class_membership(&f5, 2, 0, &f5.from_int(2)).unwrap());
        assert_eq!(cyclotomic_class_membership(&f5, 2, 0, &f5.zero()), Err(Error::ZeroElement));
        let f = build_field(3, 4).unwrap();
        for a in 0..80u64 {
            let x = f.pow(&f.gamma, a);
            for i in 0..16 {
                assert_eq!(cyclotomic_class_membership(&f, 16, i, &x).unwrap(), a % 16 == i);
            }
        }
    }

    #[test]
    fn table1_rows() {
        let s = build_table1(1).unwrap();
        assert_eq!((s.p, s.f, s.k, s.classes.clone(), s.symbolic), (3, 5, 11, vec![0], false));
        let s = build_table1(3).unwrap();
        assert_eq!((s.p, s.f, s.k, s.symbolic), (3, 12, 35, false));
        let s = build_table1(2).unwrap();
        assert_eq!((s.p, s.f, s.k, s.symbolic), (5, 9, 19, false));
        let s = build_table1(5).unwrap();
        assert_eq!((s.p, s.f, s.k, s.symbolic), (11, 7, 43, false));
        for no in [4, 6, 7, 8, 9, 10, 11] {
            assert!(build_table1(no).unwrap().symbolic, "row {no}");
        }
        assert!(build_table1(0).is_err() && build_table1(12).is_err());
        // Every row: k | p^f − 1 and the tabulated index is ⟨p⟩'s index mod k.
        for no in 1..=11 {
            let (k, p, f, e) = table1_row(no).unwrap();
            assert_eq!(index_of(p, k).unwrap(), e);
            assert_eq!(multiplicative_order(p, k).unwrap(), f as u64);
        }
    }

    #[test]
    fn thm13_examples() {
        let s = build_thm13(Thm13Variant::I, 2, 7, None, 2, None).unwrap();
        assert_eq!((s.p, s.f, s.k, s.classes.clone()), (2, 21, 49, range(7)));
        assert!(s.meta.notes.is_empty());
        let s = build_thm13(Thm13Variant::Ii, 3, 13, None, 1, None).unwrap();
        assert_eq!((s.p, s.f, s.k, s.classes.clone()), (3, 3, 13, vec![0]));
        let s = build_thm13(Thm13Variant::Iii, 2, 3, Some(5), 1, Some(1)).unwrap();
        assert_eq!((s.p, s.f, s.k, s.classes.clone()), (2, 4, 15, vec![0]));
        let s = build_thm13(Thm13Variant::Iii, 2, 3, Some(5), 2, Some(1)).unwrap();
        assert_eq!((s.k, s.f, s.classes.clone()), (45, 12, vec![0, 5, 10]));
        let s = build_thm13(Thm13Variant::I, 41, 163, None, 2, None).unwrap();
        assert!(s.symbolic && s.f == 163 * 81);
        // Unlisted but valid pair carries a note; invalid divisibility errors.
        let s = build_thm13(Thm13Variant::I, 2, 23, None, 1, None).unwrap();
        assert_eq!(s.meta.notes.len(), 1);
        assert!(matches!(build_thm13(Thm13Variant::I, 3, 7, None, 1, None), Err(Error::BadParameters(_))));
    }

    #[test]
    fn h_sets() {
        let h = HSet::new(14, 7, range(7)).unwrap();
        assert!(validate_h(&h, HMode::ResidueCover));
        let h13 = HSet::q_2q_union(13, 13).unwrap();
        assert_eq!(h13.elements.len(), 13);
        assert!(validate_h(&h13, HMode::VanishingSum));
        assert!(!validate_h(&HSet::new(6, 3, vec![0, 1]).unwrap(), HMode::VanishingSum));
        // The exact test agrees with equal residue counts.
        for mask in 0u64..1 << 6 {
            let els: Vec<u64> = (0..6).filter(|b| mask >> b & 1 == 1).collect();
            if els.is_empty() {
                continue;
            }
            let h = HSet::new(6, 3, els.clone()).unwrap();
            let mut c = [0; 3];
            els.iter().for_each(|&x| c[(x % 3) as usize] += 1);
            assert_eq!(validate_h(&h, HMode::VanishingSum), c[0] == c[1] && c[1] == c[2]);
        }
        assert!(HSet::new(6, 3, vec![1, 1]).is_err());
    }

    #[test]
    fn thm14_examples() {
        let s = build_thm14(Thm14Variant::I, 11, 7, 1, Some(1), None).unwrap();
        assert_eq!((s.p, s.f, s.k, s.classes.clone()), (11, 3, 14, range(7)));
        assert_eq!(s.meta.predicted.as_deref(), Some("skew_hadamard"));
        let s = build_thm14(Thm14Variant::I, 53, 7, 1, Some(1), None).unwrap();
        assert_eq!(s.meta.predicted.as_deref(), Some("paley_pds"));
        let s = build_thm14(Thm14Variant::Ii, 5, 19, 1, None, None).unwrap();
        assert_eq!((s.p, s.f, s.k), (5, 9, 38));
        assert_eq!(s.classes, HSet::q_2q_union(19, 0).unwrap().elements);
        assert_eq!(s.classes.len(), 19);
        let bad = HSet::new(14, 7, vec![0, 1, 2, 3, 4, 5, 7]).unwrap();
        assert!(matches!(build_thm14(Thm14Variant::I, 11, 7, 1, None, Some(&bad)), Err(Error::InvalidH(_))));
        assert!(build_thm14(Thm14Variant::I, 11, 5, 1, None, None).is_err());
    }

    #[test]
    fn srg_family_examples() {
        let s = build_srg_family(2, &[(7, 2)], 2).unwrap();
        assert_eq!((s.p, s.f, s.k, s.classes.clone()), (2, 21, 49, range(7)));
        let s = build_srg_family(2, &[(3, 2), (5, 1)], 2).unwrap();
        assert_eq!((s.p, s.f, s.k, s.classes.clone()), (2, 12, 45, vec![0, 5, 10]));
        let s = build_srg_family(3, &[(13, 1)], 4).unwrap();
        assert_eq!((s.p, s.f, s.k, s.classes.clone()), (3, 3, 13, vec![0]));
        // 3 is not index-2 stable from 11 to 121.
        assert!(matches!(build_srg_family(3, &[(11, 2)], 2), Err(Error::HypothesisFailed(_))));
        // 2 is not semi-primitive mod 7 = h_1 for the pair (3^2, 7).
        assert!(matches!(build_srg_family(2, &[(3, 2), (7, 1)], 2), Err(Error::HypothesisFailed(_))));
    }

    #[test]
    fn table4_and_table6_rows_are_stable_bases() {
        for &(p1, p, f, e) in &SHD_ONE_PRIME_ROWS {
            assert_eq!(index_of(p, p1).unwrap(), e);
            assert_eq!(euler_phi(p1) / e, f as u64);
            // Subfield shape: p1 = (p^f − 1)/(p^t − 1) for some t | f.
            let q = (p as u128).pow(f);
            assert!((1..f).filter(|t| f % t == 0).any(|t| (q - 1) / ((p as u128).pow(t) - 1) == p1 as u128
                && (q - 1) % ((p as u128).pow(t) - 1) == 0));
            let s = build_srg_family(p, &[(p1, 1)], e).unwrap();
            assert_eq!((s.f, s.k), (f, p1));
        }
        for &(p1, p2, p, f, e) in &SHD_TWO_PRIME_ROWS {
            assert_eq!(index_of(p, p1 * p2).unwrap(), e);
            assert_eq!(euler_phi(p1 * p2) / e, f as u64);
        }
    }

    #[test]
    fn shd_examples() {
        let h = HSet::q_2q_union(13, 13).unwrap();
        let base = build_shd_family(3, 13, 1, 4, &h).unwrap();
        assert_eq!((base.p, base.f, base.k, base.classes.clone()), (3, 3, 26, h.elements.clone()));
        assert_eq!(base.meta.predicted.as_deref(), Some("skew_hadamard"));
        let h29 = HSet::q_2q_union(29, 0).unwrap();
        let s = build_shd_family(7, 29, 1, 4, &h29).unwrap();
        assert_eq!((s.p, s.f, s.k, s.classes.clone(), s.symbolic), (7, 7, 58, h29.elements.clone(), false));
        let s2 = build_shd_family(3, 13, 2, 4, &h).unwrap();
        assert!(s2.symbolic);
        assert_eq!((s2.f, s2.k, s2.classes.len()), (39, 338, 169));
        // The family member equals the single-step lift of the base.
        assert_eq!(lift_index_set(&base, 13, 1).unwrap().classes, s2.classes);
    }

    #[test]
    fn half_size_sets() {
        let h13 = HSet::q_2q_union(13, 13).unwrap();
        let specs = [
            build_thm14(Thm14Variant::I, 11, 7, 1, None, None).unwrap(),
            build_thm14(Thm14Variant::I, 53, 7, 2, None, None).unwrap(),
            build_thm14(Thm14Variant::Ii, 5, 19, 2, None, None).unwrap(),
            build_shd_family(3, 13, 1, 4, &h13).unwrap(),
            build_shd_family(3, 13, 3, 4, &h13).unwrap(),
        ];
        for s in &specs {
            assert_eq!(s.classes.len() as u64 * 2, s.k, "{}", s.meta.source);
        }
    }

    #[test]
    fn lifts() {
        let base = build_thm13(Thm13Variant::I, 2, 7, None, 1, None).unwrap();
        assert_eq!((base.f, base.k), (3, 7));
        let l = lift_index_set(&base, 7, 1).unwrap();
        assert_eq!((l.p, l.f, l.k, l.classes.clone()), (2, 21, 49, range(7)));
        let b3 = ConnectionSpec::new(3, 3, 13, vec![0], Meta::new("manual")).unwrap();
        let l3 = lift_index_set(&b3, 13, 1).unwrap();
        assert_eq!((l3.f, l3.k, l3.classes.clone(), l3.symbolic), (39, 169, range(13), true));
        assert!(matches!(lift_index_set(&b3, 13, 2), Err(Error::HypothesisFailed(_))));
        let t1 = build_table1(1).unwrap();
        assert!(matches!(lift_index_set(&t1, 11, 1), Err(Error::IndexUnstable { .. })));
    }

    #[test]
    fn lift_composition_matches_family() {
        for (p, p1) in [(2u64, 7u64), (5, 19), (3, 107)] {
            let mut s = build_thm13(Thm13Variant::I, p, p1, None, 1, None).unwrap();
            for m in 1..4u32 {
                s = lift_index_set(&s, p1, m).unwrap();
                let direct = build_thm13(Thm13Variant::I, p, p1, None, m + 1, None).unwrap();
                assert_eq!((s.f, s.k, &s.classes), (direct.f, direct.k, &direct.classes));
            }
        }
        let h = HSet::q_2q_union(13, 13).unwrap();
        let mut s = build_shd_family(3, 13, 1, 4, &h).unwrap();
        for e1 in 1..3u32 {
            s = lift_index_set(&s, 13, e1).unwrap();
            let direct = build_shd_family(3, 13, e1 + 1, 4, &h).unwrap();
            assert_eq!((s.f, s.k, &s.classes), (direct.f, direct.k, &direct.classes));
        }
    }

    #[test]
    fn minus_one_shift() {
        let s = ConnectionSpec::new(3, 3, 26, vec![0], Meta::new("t")).unwrap();
        assert_eq!(s.minus_one_shift(), 13);
        let s = ConnectionSpec::new(5, 1, 2, vec![0], Meta::new("t")).unwrap();
        assert_eq!(s.minus_one_shift(), 0);
        let s = build_table1(11).unwrap();
        assert_eq!(s.minus_one_shift(), 0);
        let s = ConnectionSpec::new(2, 4, 5, vec![0], Meta::new("t")).unwrap();
        assert_eq!(s.minus_one_shift(), 0);
    }

    #[test]
    fn json_shape() {
        let s = build_table1(5).unwrap();
        let v: Value = serde_json::from_str(&s.to_json()).unwrap();
        assert_eq!(v["schema"], "csrg/1");
        assert_eq!(v["I"], json!([0]));
        assert_eq!(v["meta"]["source"], "table1");
        assert_eq!(v["symbolic"], false);
        let back: ConnectionSpec = serde_json::from_str(&s.to_json()).unwrap();
        assert_eq!(back, s);
        let g = s.with_generator(3).unwrap();
        assert!(g.to_json().contains(r#""generator":3"#));
        assert!(s.with_generator(2).is_err());
        let h = HSet::q_2q_union(13, 13).unwrap();
        let s27 = build_shd_family(3, 13, 1, 4, &h).unwrap();
        let c = s27.with_generator(5).unwrap().canonical();
        assert_eq!(c.classes, HSet::q_2q_union(13, 13).unwrap().elements.iter().map(|&i| i * 5 % 26).collect::<std::collections::BTreeSet<_>>().into_iter().collect::<Vec<_>>());
        let bad = r#"{"p":3,"f":5,"k":12,"I":[0],"meta":{"source":"x"},"symbolic":false}"#;
        let parsed: ConnectionSpec = serde_json::from_str(bad).unwrap();
        assert!(parsed.validate().is_err());
    }
}
