//! Strong regularity, skew-Hadamard and Paley-type checks for cyclotomic
//! connection sets, by character profiles and by brute force.
//!
//! ψ(γ^a D) only depends on a mod k, so a profile is k values
//! profile[a] = Σ_{i∈I} Σ_t counts[(i+a) mod k][t] ζ_p^t.

use crate::construct::ConnectionSpec;
use crate::cycint::{descend_raw, CycInt};
use crate::error::{Error, Result};
use crate::gauss::{gauss_conductor, gauss_sum_raw, load_or_build, quadratic_gauss_period, TraceCountTable};
use crate::gf::{build_field, checked_field_size, FieldSpec, VERIFY_LIMIT};
use crate::residue::euler_phi;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use std::path::PathBuf;
use std::time::Instant;

/// Largest q for which the brute-force checks run by default.
pub const BRUTE_FORCE_LIMIT: u64 = 4096;

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub limit: u64,
    pub cache_dir: Option<PathBuf>,
    pub brute_limit: u64,
    pub cross_check: bool,
    pub timing: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { limit: VERIFY_LIMIT, cache_dir: None, brute_limit: BRUTE_FORCE_LIMIT, cross_check: true, timing: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CharProfile {
    pub q: u64,
    pub size: u64,
    pub values: Vec<CycInt>,
}

impl CharProfile {
    /// Distinct values in order of first appearance.
    pub fn distinct(&self) -> Vec<CycInt> {
        let mut out: Vec<CycInt> = Vec::new();
        for v in &self.values {
            if !out.contains(v) {
                out.push(v.clone());
            }
        }
        out
    }

    /// Σ_a profile[a] = −|I|.
    pub fn sum_invariant_holds(&self, classes: usize) -> bool {
        let mut acc = CycInt::zero(1);
        for v in &self.values {
            acc = &acc + v;
        }
        acc.detect_rational() == Some(BigInt::from(-(classes as i64)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SrgParams {
    pub v: u64,
    pub k: u64,
    pub lambda: u64,
    pub mu: u64,
    /// Restricted eigenvalues r > s when they are rational integers.
    pub r: Option<i64>,
    pub s: Option<i64>,
}

impl SrgParams {
    pub fn tuple(&self) -> (u64, u64, u64, u64) {
        (self.v, self.k, self.lambda, self.mu)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    Srg,
    SkewHadamard,
    PaleyPds,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Charsum,
    Brute,
    Both,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub params: Option<SrgParams>,
    pub profile: Vec<CycInt>,
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl Verdict {
    pub fn is_positive(&self) -> bool {
        self.kind != VerdictKind::None
    }
}

/// The trace-count table of a numeric spec, honoring the size cap and cache.
pub fn profile_table(spec: &ConnectionSpec, opts: &VerifyOptions) -> Result<TraceCountTable> {
    spec.validate()?;
    if spec.symbolic && !matches!(spec.q(), Some(q) if q <= opts.limit) {
        return Err(Error::Symbolic(format!("{}^{}", spec.p, spec.f)));
    }
    checked_field_size(spec.p, spec.f, opts.limit)?;
    let field = build_field(spec.p, spec.f)?;
    let (table, _) = load_or_build(opts.cache_dir.as_deref(), &field, spec.k, opts.limit)?;
    if !table.is_consistent() {
        return Err(Error::CrossCheckMismatch("trace table fails the class-size check".into()));
    }
    Ok(table)
}

pub fn char_profile_from_table(table: &TraceCountTable, classes: &[u64]) -> CharProfile {
    let (p, k) = (table.p, table.k);
    let values = (0..k)
        .map(|a| {
            let mut raw = vec![0i128; p as usize];
            for &i in classes {
                for (r, &c) in raw.iter_mut().zip(table.row((i + a) % k)) {
                    *r += c as i128;
                }
            }
            CycInt::from_raw_i128(p, raw)
        })
        .collect();
    let q = table.q();
    CharProfile { q, size: classes.len() as u64 * ((q - 1) / k), values }
}

/// The same profile through ψ(γ^a D) = (1/k) Σ_u G(χ^{−u}) Σ_{i∈I} ζ_k^{u(a+i)}.
pub fn char_profile_via_gauss_from_table(table: &TraceCountTable, classes: &[u64]) -> Result<CharProfile> {
    let (p, k) = (table.p, table.k);
    let n = gauss_conductor(p, k);
    let step = n / k;
    let nu = n as usize;
    let weighted: Vec<Vec<i128>> = (0..k)
        .into_par_iter()
        .map(|u| {
            let g = gauss_sum_raw(table, -(u as i64));
            let mut w = vec![0i128; nu];
            for &i in classes {
                let shift = (u * i % k * step) as usize;
                for (x, &c) in g.iter().enumerate() {
                    if c != 0 {
                        w[(x + shift) % nu] += c;
                    }
                }
            }
            w
        })
        .collect();
    let kb = BigInt::from(k);
    let values = (0..k)
        .into_par_iter()
        .map(|a| {
            let mut acc = vec![0i128; nu];
            for (u, w) in weighted.iter().enumerate() {
                let shift = (u as u64 * a % k * step) as usize;
                for (x, &c) in w.iter().enumerate() {
                    acc[(x + shift) % nu] += c;
                }
            }
            let outside = || Error::CrossCheckMismatch(format!("profile value {a} is not in Q(zeta_{p})"));
            if p == 2 {
                let v = CycInt::from_raw_i128(n, acc).div_exact(&kb)?;
                return v.descend(p).ok_or_else(outside);
            }
            let y = descend_raw(n, p, &acc).ok_or_else(outside)?;
            CycInt::from_raw_i128(p, y).div_exact(&kb)
        })
        .collect::<Result<Vec<_>>>()?;
    let q = table.q();
    Ok(CharProfile { q, size: classes.len() as u64 * ((q - 1) / k), values })
}

pub fn char_profile(spec: &ConnectionSpec, opts: &VerifyOptions) -> Result<CharProfile> {
    let spec = spec.canonical();
    Ok(char_profile_from_table(&profile_table(&spec, opts)?, &spec.classes))
}

pub fn char_profile_via_gauss(spec: &ConnectionSpec, opts: &VerifyOptions) -> Result<CharProfile> {
    let spec = spec.canonical();
    char_profile_via_gauss_from_table(&profile_table(&spec, opts)?, &spec.classes)
}

fn shifted(spec: &ConnectionSpec) -> Vec<u64> {
    let j0 = spec.minus_one_shift();
    let mut s: Vec<u64> = spec.classes.iter().map(|&i| (i + j0) % spec.k).collect();
    s.sort_unstable();
    s
}

fn is_symmetric(spec: &ConnectionSpec) -> bool {
    shifted(spec) == spec.classes
}

fn is_skew(spec: &ConnectionSpec) -> bool {
    2 * spec.classes.len() as u64 == spec.k && shifted(spec).iter().all(|i| spec.classes.binary_search(i).is_err())
}

struct Profiled {
    profile: CharProfile,
    started: Instant,
}

fn profiled(spec: &ConnectionSpec, opts: &VerifyOptions) -> Result<Profiled> {
    let started = Instant::now();
    let table = profile_table(spec, opts)?;
    let profile = char_profile_from_table(&table, &spec.classes);
    if !profile.sum_invariant_holds(spec.classes.len()) {
        return Err(Error::CrossCheckMismatch("profile does not sum to -|I|".into()));
    }
    if opts.cross_check && char_profile_via_gauss_from_table(&table, &spec.classes)? != profile {
        return Err(Error::CrossCheckMismatch("Gauss-sum expansion disagrees with the direct profile".into()));
    }
    Ok(Profiled { profile, started })
}

fn finish(
    kind: VerdictKind,
    params: Option<SrgParams>,
    pr: Profiled,
    method: Method,
    reason: Option<String>,
    opts: &VerifyOptions,
) -> Verdict {
    Verdict {
        kind,
        params,
        profile: pr.profile.values,
        method,
        reason,
        elapsed_ms: opts.timing.then(|| pr.started.elapsed().as_millis() as u64),
    }
}

fn negative(pr: Profiled, reason: String, opts: &VerifyOptions) -> Verdict {
    finish(VerdictKind::None, None, pr, Method::Charsum, Some(reason), opts)
}

fn small_int(x: &BigInt) -> Option<i64> {
    x.to_i64()
}

/// λ and μ from two restricted eigenvalues with rational sum and product.
fn srg_from_values(q: u64, degree: u64, r: &CycInt, s: &CycInt) -> Option<SrgParams> {
    let sum = (r + s).detect_rational()?;
    let prod = (r * s).detect_rational()?;
    let d = BigInt::from(degree);
    let lambda = (&d + &sum + &prod).to_u64()?;
    let mu = (&d + &prod).to_u64()?;
    let (mut ri, mut si) = (r.detect_rational().and_then(|x| small_int(&x)), s.detect_rational().and_then(|x| small_int(&x)));
    if let (Some(a), Some(b)) = (ri, si) {
        if a < b {
            (ri, si) = (Some(b), Some(a));
        }
    }
    Some(SrgParams { v: q, k: degree, lambda, mu, r: ri, s: si })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BruteForce {
    Srg(SrgParams),
    NotSrg(String),
}

/// D as element indices (little-endian base-p encoding).
fn materialize(spec: &ConnectionSpec, limit: u64) -> Result<(FieldSpec, Vec<bool>)> {
    spec.validate()?;
    let spec = &spec.canonical();
    let q = checked_field_size(spec.p, spec.f, limit)?;
    let field = build_field(spec.p, spec.f)?;
    let mut member = vec![false; q as usize];
    let mut in_i = vec![false; spec.k as usize];
    spec.classes.iter().for_each(|&i| in_i[i as usize] = true);
    for (a, x) in field.enumerate_powers(0, q - 1)? {
        if in_i[(a % spec.k) as usize] {
            member[field.index_of(&x) as usize] = true;
        }
    }
    Ok((field, member))
}

struct Digits {
    p: u64,
    pows: Vec<u64>,
}

impl Digits {
    fn new(p: u64, f: u32) -> Digits {
        Digits { p, pows: (0..f).map(|i| p.pow(i)).collect() }
    }

    fn sub(&self, a: u64, b: u64) -> u64 {
        let p = self.p;
        self.pows.iter().map(|&w| (a / w % p + p - b / w % p) % p * w).sum()
    }
}

/// Counts common neighbors of 0 and z for every z ≠ 0 in Cay(F_q, D).
pub fn brute_force_adjacency(spec: &ConnectionSpec) -> Result<BruteForce> {
    brute_force_adjacency_limited(spec, BRUTE_FORCE_LIMIT)
}

pub fn brute_force_adjacency_limited(spec: &ConnectionSpec, limit: u64) -> Result<BruteForce> {
    let (field, member) = materialize(spec, limit)?;
    let q = field.q;
    let dg = Digits::new(field.p, field.f);
    let d: Vec<u64> = (0..q).filter(|&x| member[x as usize]).collect();
    if d.iter().any(|&x| !member[dg.sub(0, x) as usize]) {
        return Ok(BruteForce::NotSrg("D is not symmetric".into()));
    }
    if d.len() as u64 == q - 1 {
        return Ok(BruteForce::NotSrg("complete graph".into()));
    }
    let counts: Vec<(bool, u64)> = (1..q)
        .into_par_iter()
        .map(|z| (member[z as usize], d.iter().filter(|&&x| member[dg.sub(x, z) as usize]).count() as u64))
        .collect();
    let uniform = |adj: bool| -> Option<u64> {
        let mut it = counts.iter().filter(|c| c.0 == adj).map(|c| c.1);
        let first = it.next()?;
        it.all(|c| c == first).then_some(first)
    };
    match (uniform(true), uniform(false)) {
        (Some(lambda), Some(mu)) => {
            Ok(BruteForce::Srg(SrgParams { v: q, k: d.len() as u64, lambda, mu, r: None, s: None }))
        }
        _ => Ok(BruteForce::NotSrg("common-neighbor counts are not constant".into())),
    }
}

/// Every nonzero element is a difference of two elements of D exactly
/// (q−3)/4 times.
pub fn brute_force_difference_counts(spec: &ConnectionSpec, limit: u64) -> Result<bool> {
    let (field, member) = materialize(spec, limit)?;
    let q = field.q;
    if q % 4 != 3 {
        return Ok(false);
    }
    let dg = Digits::new(field.p, field.f);
    let d: Vec<u64> = (0..q).filter(|&x| member[x as usize]).collect();
    let counts = d
        .par_iter()
        .fold(
            || vec![0u64; q as usize],
            |mut acc, &x| {
                for &y in &d {
                    acc[dg.sub(x, y) as usize] += 1;
                }
                acc
            },
        )
        .reduce(|| vec![0u64; q as usize], |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect());
    Ok(counts[1..].iter().all(|&c| c == (q - 3) / 4))
}

fn check_brute(spec: &ConnectionSpec, opts: &VerifyOptions, params: Option<&SrgParams>) -> Result<bool> {
    if !matches!(spec.q(), Some(q) if q <= opts.brute_limit) {
        return Ok(false);
    }
    let brute = brute_force_adjacency_limited(spec, opts.brute_limit)?;
    let agree = match (&brute, params) {
        (BruteForce::Srg(b), Some(c)) => b.tuple() == c.tuple(),
        (BruteForce::NotSrg(_), None) => true,
        _ => false,
    };
    if !agree {
        return Err(Error::CrossCheckMismatch(format!("brute force gives {brute:?}, character sums give {params:?}")));
    }
    Ok(true)
}

pub fn verify_srg(spec: &ConnectionSpec, opts: &VerifyOptions) -> Result<Verdict> {
    let spec = &spec.canonical();
    let pr = profiled(spec, opts)?;
    if !is_symmetric(spec) {
        return Ok(negative(pr, "not symmetric: -D != D".into(), opts));
    }
    if spec.classes.len() as u64 == spec.k {
        return Ok(negative(pr, "complete graph".into(), opts));
    }
    let distinct = pr.profile.distinct();
    let (kind, params, reason) = if distinct.len() != 2 {
        (VerdictKind::None, None, Some(format!("{} distinct restricted eigenvalues", distinct.len())))
    } else {
        match srg_from_values(pr.profile.q, pr.profile.size, &distinct[0], &distinct[1]) {
            Some(sp) if sp.r.is_some() => (VerdictKind::Srg, Some(sp), None),
            // Irrational pair: a conference graph, reported as Paley type.
            Some(sp) => (VerdictKind::PaleyPds, Some(sp), None),
            None => (VerdictKind::None, None, Some("eigenvalues give no valid parameters".into())),
        }
    };
    let method = if check_brute(spec, opts, params.as_ref())? { Method::Both } else { Method::Charsum };
    Ok(finish(kind, params, pr, method, reason, opts))
}

/// √(±q) = g^f with g the quadratic period, squared to (p*)^f.
fn sqrt_signed_q(p: u64, f: u32) -> CycInt {
    quadratic_gauss_period(p).pow(f as u64)
}

fn values_are_half_shifted(profile: &CharProfile, root: &CycInt) -> bool {
    let neg = -root;
    profile.values.iter().all(|v| {
        let w = &(v + v) + &CycInt::one(1);
        &w == root || w == neg
    })
}

pub fn verify_skew_hadamard(spec: &ConnectionSpec, opts: &VerifyOptions) -> Result<Verdict> {
    let spec = &spec.canonical();
    if spec.p == 2 {
        return Err(Error::EvenField);
    }
    let pr = profiled(spec, opts)?;
    let q = pr.profile.q;
    if q % 4 != 3 {
        return Ok(negative(pr, format!("q = {q} is not 3 mod 4"), opts));
    }
    if !is_skew(spec) {
        return Ok(negative(pr, "D, -D and {0} do not partition F_q".into(), opts));
    }
    let root = sqrt_signed_q(spec.p, spec.f);
    debug_assert_eq!((&root * &root).detect_rational(), Some(BigInt::from(-(q as i64))));
    let ok = values_are_half_shifted(&pr.profile, &root);
    let mut method = Method::Charsum;
    if matches!(spec.q(), Some(q) if q <= opts.brute_limit) {
        if brute_force_difference_counts(spec, opts.brute_limit)? != ok {
            return Err(Error::CrossCheckMismatch("difference counts disagree with the character condition".into()));
        }
        method = Method::Both;
    }
    if !ok {
        return Ok(finish(VerdictKind::None, None, pr, method, Some("character values are not (-1 ± sqrt(-q))/2".into()), opts));
    }
    Ok(finish(VerdictKind::SkewHadamard, None, pr, method, None, opts))
}

pub fn verify_paley_pds(spec: &ConnectionSpec, opts: &VerifyOptions) -> Result<Verdict> {
    let spec = &spec.canonical();
    let q = spec.q().ok_or_else(|| Error::Symbolic(format!("{}^{}", spec.p, spec.f)))?;
    if q % 4 != 1 {
        return Err(Error::BadResidue(q));
    }
    let pr = profiled(spec, opts)?;
    if !is_symmetric(spec) || 2 * spec.classes.len() as u64 != spec.k {
        return Ok(negative(pr, "need -D = D and |D| = (q-1)/2".into(), opts));
    }
    let root = sqrt_signed_q(spec.p, spec.f);
    debug_assert_eq!((&root * &root).detect_rational(), Some(BigInt::from(q)));
    let ok = values_are_half_shifted(&pr.profile, &root);
    let rs = root.detect_rational().map(|x| {
        let x = x.abs().to_i64().expect("sqrt q fits");
        ((x - 1) / 2, (-1 - x) / 2)
    });
    let params = ok.then(|| SrgParams {
        v: q,
        k: (q - 1) / 2,
        lambda: (q - 5) / 4,
        mu: (q - 1) / 4,
        r: rs.map(|t| t.0),
        s: rs.map(|t| t.1),
    });
    let method = if check_brute(spec, opts, params.as_ref())? { Method::Both } else { Method::Charsum };
    if !ok {
        return Ok(finish(VerdictKind::None, None, pr, method, Some("character values are not (-1 ± sqrt(q))/2".into()), opts));
    }
    Ok(finish(VerdictKind::PaleyPds, params, pr, method, None, opts))
}

/// ε P s + |I|(ε P − 1)/k with P = p^{φ(k)(p1−1)/(2e)}, for each base value s.
pub fn predict_lifted_profile(
    values: &[CycInt],
    classes: u64,
    k: u64,
    p: u64,
    p1: u64,
    e: u64,
    eps: i8,
) -> Result<Vec<CycInt>> {
    if values.len() != 2 {
        return Err(Error::BadParameters(format!("need two base values, got {}", values.len())));
    }
    if eps != 1 && eps != -1 {
        return Err(Error::BadParameters("epsilon must be 1 or -1".into()));
    }
    let num = euler_phi(k) as u128 * (p1 as u128 - 1);
    if e == 0 || num % (2 * e as u128) != 0 {
        return Err(Error::NonIntegralPrediction(format!("phi({k})({p1}-1)/(2·{e}) is not an integer")));
    }
    let exp = u32::try_from(num / (2 * e as u128))
        .map_err(|_| Error::NonIntegralPrediction("exponent too large".into()))?;
    let big_p = BigInt::from(eps) * BigInt::from(p).pow(exp);
    let shift: BigInt = BigInt::from(classes) * (&big_p - BigInt::from(1));
    if !(&shift % BigInt::from(k)).is_zero() {
        return Err(Error::NonIntegralPrediction(format!("{shift} is not divisible by {k}")));
    }
    let shift = shift / k;
    Ok(values.iter().map(|v| &v.scale(&big_p) + &CycInt::from_int(v.conductor(), shift.clone())).collect())
}
