//! The acceptance suite, shared by `csrg selftest` and the `acceptance` test target.

use crate::identities::{sweep, SweepConfig};
use csrg::construct::{build_shd_family, build_srg_family, build_table1, build_thm13, build_thm14, HSet, Thm13Variant, Thm14Variant};
use csrg::error::Error;
use csrg::gf::field_size_u128;
use csrg::relgauss::{relative_gauss, root_order_bound_check, yamamoto_identity_check, Classification};
use csrg::residue::{check_index_stability, divisors, index_of, is_prime, is_semiprimitive};
use csrg::verify::{
    brute_force_adjacency, char_profile, char_profile_via_gauss, predict_lifted_profile, verify_paley_pds, verify_skew_hadamard, verify_srg,
    BruteForce, Method, VerdictKind, VerifyOptions,
};
use csrg::{ConnectionSpec, CycInt, Meta};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::path::PathBuf;
use std::time::{Duration, Instant};

/// Field cap for the heavy sporadic examples (11^7 exceeds the default 2^24).
pub const HEAVY_LIMIT: u64 = 1 << 25;
pub const CROSS_CHECK_SPECS: usize = 50;
pub const CROSS_CHECK_SEED: u64 = 0xc5_4a11;
/// Upper bound on k·(|I|+k)·n for the randomized via-Gauss comparisons.
pub const CROSS_CHECK_COST: u64 = 1 << 27;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Quick,
    Full,
}

impl Level {
    pub fn criteria(self) -> &'static [u8] {
        match self {
            Level::Quick => &[1, 2, 6, 10, 11],
            Level::Full => &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11],
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub budget_s: u64,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        format!(
            "criterion {}: {} {} ({:.2} s of {} s) {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            self.elapsed.as_secs_f64(),
            self.budget_s,
            self.detail
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct Context {
    pub cache_dir: Option<PathBuf>,
}

impl Context {
    fn opts(&self) -> VerifyOptions {
        VerifyOptions { cache_dir: self.cache_dir.clone(), ..VerifyOptions::default() }
    }
}

type Outcome = std::result::Result<String, String>;

fn check(ok: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: Error) -> String {
    format!("error: {e}")
}

pub fn title(id: u8) -> &'static str {
    match id {
        1 => "Paley graphs",
        2 => "sporadic example 1",
        3 => "sporadic example 3",
        4 => "sporadic examples 2 and 5",
        5 => "lifted family member over F_2^21",
        6 => "two-prime family over F_2^12",
        7 => "relative Gauss sums with odd k'",
        8 => "sign prediction for 2 || k",
        9 => "skew Hadamard and Paley type",
        10 => "Gauss sum identity suite",
        11 => "cross-method oracle",
        _ => "unknown",
    }
}

pub fn budget(id: u8) -> Duration {
    Duration::from_secs(match id {
        1 | 2 => 1,
        3 => 15,
        4 => 540,
        5 => 180,
        6 => 5,
        7 => 240,
        8 => 30,
        9 | 10 | 11 => 120,
        _ => 0,
    })
}

pub fn run_criterion(id: u8, ctx: &Context) -> CriterionReport {
    let start = Instant::now();
    let outcome = match id {
        1 => paley(ctx),
        2 => table1_no1(ctx),
        3 => table1_no3(ctx),
        4 => heavy_rows(ctx),
        5 => lifted_member(ctx),
        6 => two_prime_family(ctx),
        7 => odd_conductor_theta(),
        8 => sign_corollary(),
        9 => skew_and_paley(ctx),
        10 => identity_suite(),
        11 => cross_method(ctx),
        _ => Err(format!("no criterion {id}")),
    };
    let elapsed = start.elapsed();
    let limit = budget(id);
    let (passed, detail) = match outcome {
        Ok(d) if elapsed <= limit => (true, d),
        Ok(d) => (false, format!("over budget; {d}")),
        Err(d) => (false, d),
    };
    CriterionReport { id, title: title(id), passed, detail, budget_s: limit.as_secs(), elapsed }
}

pub fn run(level: Level, ctx: &Context) -> Vec<CriterionReport> {
    level.criteria().iter().map(|&id| run_criterion(id, ctx)).collect()
}

fn spec(p: u64, f: u32, k: u64, classes: &[u64]) -> std::result::Result<ConnectionSpec, String> {
    ConnectionSpec::new(p, f, k, classes.to_vec(), Meta::new("selftest")).map_err(err)
}

fn paley(ctx: &Context) -> Outcome {
    for (p, f) in [(5u64, 1u32), (3, 2), (13, 1), (17, 1), (5, 2), (29, 1)] {
        let q = p.pow(f);
        let t = (q - 1) / 4;
        let v = verify_srg(&spec(p, f, 2, &[0])?, &ctx.opts()).map_err(err)?;
        let got = v.params.as_ref().map(|s| s.tuple());
        check(v.is_positive() && got == Some((4 * t + 1, 2 * t, t - 1, t)), || format!("q = {q}: {:?} {got:?}", v.kind))?;
    }
    Ok("q in {5, 9, 13, 17, 25, 29} give (4t+1, 2t, t-1, t)".into())
}

fn table1_no1(ctx: &Context) -> Outcome {
    let s = build_table1(1).map_err(err)?;
    check((s.p, s.f, s.k, s.classes.as_slice()) == (3, 5, 11, &[0][..]), || format!("row 1 built as {s:?}"))?;
    let v = verify_srg(&s, &ctx.opts()).map_err(err)?;
    let params = v.params.clone().ok_or("no parameters")?;
    check(v.kind == VerdictKind::Srg && v.method == Method::Both, || format!("{:?} via {:?}", v.kind, v.method))?;
    check(params.tuple() == (243, 22, 1, 2) && params.r.is_some() && params.s.is_some(), || format!("{params:?}"))?;
    Ok(format!("(243, 22, 1, 2), eigenvalues {:?} and {:?}, character sums and brute force agree", params.r.unwrap(), params.s.unwrap()))
}

fn table1_no3(ctx: &Context) -> Outcome {
    let s = build_table1(3).map_err(err)?;
    check((s.p, s.f, s.k) == (3, 12, 35), || format!("row 3 built as {s:?}"))?;
    let opts = ctx.opts();
    let v = verify_srg(&s, &opts).map_err(err)?;
    let params = v.params.clone().ok_or("no parameters")?;
    check(v.kind == VerdictKind::Srg && params.r.is_some(), || format!("{:?} {params:?}", v.kind))?;
    let direct = char_profile(&s, &opts).map_err(err)?;
    let via = char_profile_via_gauss(&s, &opts).map_err(err)?;
    check(direct == via, || "profiles differ between the two methods".into())?;
    Ok(format!("{:?}, eigenvalues {:?}/{:?}, via-Gauss profile identical", params.tuple(), params.r.unwrap(), params.s.unwrap()))
}

fn heavy_rows(ctx: &Context) -> Outcome {
    let opts = VerifyOptions { limit: HEAVY_LIMIT, ..ctx.opts() };
    let mut parts = Vec::new();
    for (no, expect, secs) in [(2usize, (5u64, 9u32, 19u64), 60u64), (5, (11, 7, 43), 480)] {
        let t = Instant::now();
        let s = build_table1(no).map_err(err)?;
        check((s.p, s.f, s.k) == expect, || format!("row {no} built as {s:?}"))?;
        let v = verify_srg(&s, &opts).map_err(err)?;
        let el = t.elapsed();
        let params = v.params.clone().ok_or_else(|| format!("example {no}: {:?}", v.reason))?;
        check(v.kind == VerdictKind::Srg, || format!("example {no}: {:?}", v.kind))?;
        check(el <= Duration::from_secs(secs), || format!("example {no} took {:.1} s, budget {secs} s", el.as_secs_f64()))?;
        parts.push(format!("example {no} {:?} in {:.1} s", params.tuple(), el.as_secs_f64()));
    }
    Ok(parts.join("; "))
}

fn lifted_member(ctx: &Context) -> Outcome {
    let s = build_thm13(Thm13Variant::I, 2, 7, None, 2, None).map_err(err)?;
    check((s.p, s.f, s.k, s.classes.clone()) == (2, 21, 49, (0..7).collect()), || format!("built {s:?}"))?;
    let base = build_thm13(Thm13Variant::I, 2, 7, None, 1, None).map_err(err)?;
    check((base.p, base.f, base.k, base.classes.clone()) == (2, 3, 7, vec![0]), || format!("base {base:?}"))?;
    let opts = ctx.opts();
    let base_values = char_profile(&base, &opts).map_err(err)?.distinct();
    let theta = relative_gauss(2, 7, 7, 1).map_err(err)?;
    let eps = theta.classification.sign().ok_or_else(|| format!("theta is {:?}", theta.classification))?;
    let e = index_of(2, 7).map_err(err)?;
    let predicted = predict_lifted_profile(&base_values, base.classes.len() as u64, base.k, 2, 7, e, eps).map_err(err)?;
    let v = verify_srg(&s, &opts).map_err(err)?;
    check(v.kind == VerdictKind::Srg, || format!("{:?} {:?}", v.kind, v.reason))?;
    let mut measured = v.profile.clone();
    let mut want = predicted.clone();
    let key = |x: &CycInt| x.detect_rational();
    measured.sort_by_key(key);
    measured.dedup();
    want.sort_by_key(key);
    check(measured == want, || format!("measured {measured:?}, predicted {want:?}"))?;
    check(want == vec![CycInt::from_int(1, -439), CycInt::from_int(1, 585)], || format!("prediction {want:?}"))?;
    Ok(format!("eigenvalues {{585, -439}} match the prediction from (2,3,7,{{0}}) with eps = {eps:+}"))
}

fn two_prime_family(ctx: &Context) -> Outcome {
    let s = build_srg_family(2, &[(3, 2), (5, 1)], 2).map_err(err)?;
    check((s.p, s.f, s.k, s.classes.clone()) == (2, 12, 45, vec![0, 5, 10]), || format!("built {s:?}"))?;
    check(is_semiprimitive(2, 5).map_err(err)?, || "2 is not semi-primitive mod 5".into())?;
    check(index_of(2, 15).map_err(err)? == 2 && index_of(2, 45).map_err(err)? == 2, || "index is not 2".into())?;
    check(check_index_stability(2, 15, 45).map_err(err)?, || "index not stable from 15 to 45".into())?;
    let v = verify_srg(&s, &ctx.opts()).map_err(err)?;
    let params = v.params.clone().ok_or("no parameters")?;
    check(v.kind == VerdictKind::Srg && v.method == Method::Both, || format!("{:?} via {:?}", v.kind, v.method))?;
    Ok(format!("{:?} by character sums and brute force; 2^2 = -1 mod 5, index 2 stable", params.tuple()))
}

fn odd_conductor_theta() -> Outcome {
    for (k, p1) in [(3u64, 3u64), (5, 5), (7, 7)] {
        let r = relative_gauss(2, k, p1, 1).map_err(err)?;
        check(r.classification == Classification::PlusOne, || format!("k' = {}: theta is {:?}", k * p1, r.classification))?;
        check(root_order_bound_check(&r), || format!("k' = {}: root order bound fails", k * p1))?;
    }
    check(yamamoto_identity_check(2, 2, 4, 15, 1).map_err(err)?, || "subset sum identity fails over F_16".into())?;
    check(yamamoto_identity_check(2, 3, 21, 49, 1).map_err(err)?, || "subset sum identity fails over F_2^21".into())?;
    Ok("theta = 1 for k' = 9, 25, 49; root bound and both subset-sum identities hold".into())
}

fn sign_corollary() -> Outcome {
    let mut parts = Vec::new();
    for p in [5u64, 11] {
        let r = relative_gauss(p, 6, 3, 1).map_err(err)?;
        let eps = r.predicted.epsilon.ok_or_else(|| format!("p = {p}: no prediction ({})", r.predicted.rule))?;
        check(r.matches_prediction() == Some(true), || format!("p = {p}: theta {:?}, predicted {eps}", r.classification))?;
        check(root_order_bound_check(&r), || format!("p = {p}: root order bound fails"))?;
        parts.push(format!("p = {p}: theta = {eps:+}"));
    }
    Ok(parts.join(", "))
}

fn skew_and_paley(ctx: &Context) -> Outcome {
    let opts = ctx.opts();
    let v = verify_skew_hadamard(&spec(7, 1, 2, &[0])?, &opts).map_err(err)?;
    check(v.kind == VerdictKind::SkewHadamard, || format!("q = 7: {:?}", v.kind))?;

    let h = HSet::q_2q_union(13, 13).map_err(err)?;
    let base = build_shd_family(3, 13, 1, index_of(3, 26).map_err(err)?, &h).map_err(err)?;
    check((base.p, base.f, base.k) == (3, 3, 26), || format!("q = 27 built as {base:?}"))?;
    let canonical = verify_skew_hadamard(&base, &opts).map_err(err)?;
    // The class labels depend on the primitive element; a non-square power
    // of the canonical one realizes the construction.
    let s = base.with_generator(5).map_err(err)?;
    let v = verify_skew_hadamard(&s, &opts).map_err(err)?;
    check(v.kind == VerdictKind::SkewHadamard && v.method == Method::Both, || format!("q = 27: {:?} via {:?}", v.kind, v.method))?;
    for x in &v.profile {
        let w = &(x + x) + &CycInt::one(1);
        check((&w * &w).detect_rational() == Some((-27).into()), || format!("q = 27: (2x+1)^2 != -27 for {x}"))?;
    }

    let s = build_thm14(Thm14Variant::I, 11, 7, 1, None, None).map_err(err)?;
    check((s.p, s.f, s.k, s.classes.clone()) == (11, 3, 14, (0..7).collect()), || format!("q = 1331 built as {s:?}"))?;
    let v = verify_skew_hadamard(&s, &opts).map_err(err)?;
    check(v.kind == VerdictKind::SkewHadamard, || format!("q = 1331: {:?}", v.kind))?;

    let s = build_thm14(Thm14Variant::I, 53, 7, 1, None, None).map_err(err)?;
    check((s.p, s.f, s.k) == (53, 3, 14), || format!("q = 53^3 built as {s:?}"))?;
    let v = verify_paley_pds(&s, &opts).map_err(err)?;
    check(v.kind == VerdictKind::PaleyPds, || format!("q = 53^3: {:?}", v.kind))?;
    Ok(format!(
        "q = 7, 27 (generator gamma^5; canonical gamma gives {:?}), 1331 skew Hadamard; 53^3 Paley type {:?}",
        canonical.kind,
        v.params.map(|p| p.tuple()).unwrap_or_default()
    ))
}

fn identity_suite() -> Outcome {
    let cfg = SweepConfig::default();
    let r = sweep(&cfg);
    let summary = format!(
        "{} fields, {} (field, k) pairs, {} checks; products for {} pairs with conductor <= {}",
        r.fields, r.orders, r.checks, r.product_orders, cfg.product_conductor_cap
    );
    if r.failures.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{} failures, first: {}; {summary}", r.failures.len(), r.failures[0]))
    }
}

fn prime_powers(lo: u64, hi: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    for p in (2..=hi).filter(|&p| is_prime(p)) {
        let mut f = 1;
        while let Some(q) = field_size_u128(p, f) {
            if q > hi as u128 {
                break;
            }
            if q >= lo as u128 {
                out.push((p, f));
            }
            f += 1;
        }
    }
    out
}

/// Seeded random specs: q log-uniform up to 2^16, 1 < k ≤ 64, about half
/// made symmetric by closing I under the action of −1.
pub fn random_specs(count: usize, seed: u64) -> Vec<ConnectionSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let bits = rng.gen_range(2..=16u32);
        let pool = prime_powers(1 << (bits - 1), (1 << bits) - 1);
        let Some(&(p, f)) = pool.choose(&mut rng) else { continue };
        let q = p.pow(f);
        let ks: Vec<u64> = divisors(q - 1).into_iter().filter(|&k| k > 1 && k <= 64).collect();
        let Some(&k) = ks.choose(&mut rng) else { continue };
        let size = rng.gen_range(1..k);
        let mut all: Vec<u64> = (0..k).collect();
        all.shuffle(&mut rng);
        let mut classes: Vec<u64> = all[..size as usize].to_vec();
        if rng.gen_bool(0.5) {
            let j0 = if p == 2 { 0 } else { (q - 1) / 2 % k };
            let shifted: Vec<u64> = classes.iter().map(|&i| (i + j0) % k).collect();
            classes.extend(shifted);
            classes.sort_unstable();
            classes.dedup();
        }
        let n = if p == 2 { k } else { k * p };
        if k * (classes.len() as u64 + k) * n > CROSS_CHECK_COST {
            continue;
        }
        let mut meta = Meta::new("selftest");
        meta.params.insert("seed".into(), seed.into());
        if let Ok(s) = ConnectionSpec::new(p, f, k, classes, meta) {
            out.push(s);
        }
    }
    out
}

/// Specs with q ≤ 4096 whose graphs are known to be strongly regular.
fn known_positives() -> Vec<(u64, u32, u64, Vec<u64>)> {
    vec![
        (5, 1, 2, vec![0]),
        (3, 2, 2, vec![0]),
        (13, 1, 2, vec![0]),
        (2, 4, 5, vec![0]),
        (2, 4, 3, vec![0]),
        (3, 4, 5, vec![0]),
        (3, 5, 11, vec![0]),
        (2, 12, 45, vec![0, 5, 10]),
        (2, 6, 3, vec![0]),
        (2, 9, 73, vec![0]),
    ]
}

fn cross_method(ctx: &Context) -> Outcome {
    let opts = VerifyOptions { cross_check: false, brute_limit: 0, ..ctx.opts() };
    let specs = random_specs(CROSS_CHECK_SPECS, CROSS_CHECK_SEED);
    let mut brute_checked = 0;
    let mut positives = 0;
    let mut compare = |s: &ConnectionSpec| -> std::result::Result<(), String> {
        let q = s.q().expect("numeric");
        if q > 4096 {
            return Ok(());
        }
        let v = verify_srg(s, &opts).map_err(err)?;
        let b = brute_force_adjacency(s).map_err(err)?;
        let agree = match (&b, &v.params) {
            (BruteForce::Srg(x), Some(y)) => x.tuple() == y.tuple(),
            (BruteForce::NotSrg(_), None) => true,
            _ => false,
        };
        check(agree, || format!("({}, {}, {}, {:?}): brute {b:?}, characters {:?}", s.p, s.f, s.k, s.classes, v.params))?;
        brute_checked += 1;
        positives += v.is_positive() as usize;
        Ok(())
    };
    for s in &specs {
        let a = char_profile(s, &opts).map_err(err)?;
        let b = char_profile_via_gauss(s, &opts).map_err(err)?;
        check(a == b, || format!("({}, {}, {}, {:?}): profiles differ", s.p, s.f, s.k, s.classes))?;
        compare(s)?;
    }
    for (p, f, k, classes) in known_positives() {
        compare(&spec(p, f, k, &classes)?)?;
    }
    check(positives >= known_positives().len(), || format!("only {positives} positive verdicts"))?;
    Ok(format!(
        "{} random specs agree across methods; {brute_checked} specs with q <= 4096 agree with brute force ({positives} strongly regular)",
        specs.len()
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_specs_are_reproducible() {
        let a = random_specs(8, 7);
        let b = random_specs(8, 7);
        assert_eq!(a, b);
        assert!(a.iter().all(|s| s.validate().is_ok() && s.k > 1 && s.k <= 64));
    }

    #[test]
    fn quick_is_a_subset_of_full() {
        assert!(Level::Quick.criteria().iter().all(|c| Level::Full.criteria().contains(c)));
        assert_eq!(Level::Full.criteria().len(), 11);
    }

    #[test]
    fn report_line_shape() {
        let r = CriterionReport { id: 3, title: "x", passed: false, detail: "d".into(), budget_s: 1, elapsed: Duration::from_millis(1500) };
        assert_eq!(r.line(), "criterion 3: FAIL x (1.50 s of 1 s) d");
    }
}
