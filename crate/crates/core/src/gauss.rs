//! Gauss sums G_f(χ^u) = Σ χ^u(x) ζ_p^{Tr x} computed exactly from trace
//! counts, with the classical closed forms and identities they satisfy.
//!
//! The character of order k is normalized by χ(γ^a) = ζ_k^a for the field's
//! fixed primitive element γ. Values live in conductor kp (odd p) or k
//! (p = 2, where ζ_2 = −1 becomes a sign).

use crate::cycint::CycInt;
use crate::error::{Error, Result};
use crate::gf::{FieldSpec, VERIFY_LIMIT};
use crate::residue::{gcd, lcm, mul_mod, pow_mod, semiprimitive_exponent};
use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;
use std::path::{Path, PathBuf};

/// counts[i][t] = #{a ∈ [0, q−1) : a ≡ i (mod k), Tr(γ^a) = t}, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceCountTable {
    pub p: u64,
    pub f: u32,
    pub k: u64,
    counts: Vec<u64>,
}

impl TraceCountTable {
    pub fn q(&self) -> u64 {
        self.p.pow(self.f)
    }

    pub fn get(&self, i: u64, t: u64) -> u64 {
        self.counts[(i * self.p + t) as usize]
    }

    pub fn row(&self, i: u64) -> &[u64] {
        let p = self.p as usize;
        &self.counts[i as usize * p..(i as usize + 1) * p]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// The table for a divisor d of k.
    pub fn coarsen(&self, d: u64) -> Result<TraceCountTable> {
        if d == 0 || self.k % d != 0 {
            return Err(Error::NotADivisor(d, self.k.to_string()));
        }
        let p = self.p as usize;
        let mut counts = vec![0u64; d as usize * p];
        for i in 0..self.k {
            let dst = (i % d) as usize * p;
            for (o, &c) in counts[dst..dst + p].iter_mut().zip(self.row(i)) {
                *o += c;
            }
        }
        Ok(TraceCountTable { p: self.p, f: self.f, k: d, counts })
    }

    /// Row sums all (q−1)/k and total q−1.
    pub fn is_consistent(&self) -> bool {
        let q = self.q();
        if self.counts.len() as u64 != self.k * self.p || (q - 1) % self.k != 0 {
            return false;
        }
        let size = (q - 1) / self.k;
        (0..self.k).all(|i| self.row(i).iter().sum::<u64>() == size)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(5 + 24 + 8 * self.counts.len());
        out.extend_from_slice(CACHE_MAGIC);
        out.push(CACHE_VERSION);
        for v in [self.p, self.f as u64, self.k].into_iter().chain(self.counts.iter().copied()) {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<TraceCountTable> {
        let bad = |m: &str| Error::Cache(m.to_string());
        if bytes.len() < 5 + 24 || &bytes[..4] != CACHE_MAGIC {
            return Err(bad("missing header"));
        }
        if bytes[4] != CACHE_VERSION {
            return Err(bad("unsupported version"));
        }
        let words: Vec<u64> = bytes[5..]
            .chunks(8)
            .map(|c| c.try_into().map(u64::from_le_bytes).map_err(|_| bad("truncated word")))
            .collect::<Result<_>>()?;
        let (p, f, k) = (words[0], words[1], words[2]);
        if f == 0 || f > 64 || p < 2 || k == 0 || p.checked_pow(f as u32).is_none() {
            return Err(bad("bad parameters"));
        }
        if (words.len() - 3) as u64 != k.saturating_mul(p) {
            return Err(bad("wrong number of counts"));
        }
        let table = TraceCountTable { p, f: f as u32, k, counts: words[3..].to_vec() };
        if !table.is_consistent() {
            return Err(bad("counts fail the class-size check"));
        }
        Ok(table)
    }
}

const CACHE_MAGIC: &[u8; 4] = b"CSRG";
const CACHE_VERSION: u8 = 1;

pub fn build_trace_counts(field: &FieldSpec, k: u64) -> Result<TraceCountTable> {
    build_trace_counts_limited(field, k, VERIFY_LIMIT)
}

/// One pass over γ^0 … γ^{q−2}. Traces follow the linear recurrence of γ, so
/// each chunk only needs f field multiplications to seed.
pub fn build_trace_counts_limited(field: &FieldSpec, k: u64, limit: u64) -> Result<TraceCountTable> {
    let q = field.q;
    if q > limit {
        return Err(Error::TooLarge { size: format!("{}^{}", field.p, field.f), limit });
    }
    if k == 0 || (q - 1) % k != 0 {
        return Err(Error::NotADivisor(k, format!("{}^{} - 1", field.p, field.f)));
    }
    let n = q - 1;
    let p = field.p;
    let cells = (k * p) as usize;
    // Partial tables cost k·p each to zero and merge; keep chunks at least
    // that long so the merge stays linear in q.
    let chunk = (n / (rayon::current_num_threads() as u64 * 4)).clamp(1 << 14, 1 << 20).max(cells as u64);
    let starts: Vec<u64> = (0..n).step_by(chunk as usize).collect();
    let partials: Vec<Vec<u64>> = starts
        .into_par_iter()
        .map(|s| {
            let e = (s + chunk).min(n);
            let traces = trace_run(field, s, e - s);
            let mut counts = vec![0u64; cells];
            let mut i = s % k;
            for t in traces {
                counts[(i * p + t) as usize] += 1;
                i += 1;
                if i == k {
                    i = 0;
                }
            }
            counts
        })
        .collect();
    let mut counts = vec![0u64; cells];
    for part in partials {
        for (o, c) in counts.iter_mut().zip(part) {
            *o += c;
        }
    }
    Ok(TraceCountTable { p, f: field.f, k, counts })
}

/// Tr(γ^a) for a in [start, start + len).
pub fn trace_run(field: &FieldSpec, start: u64, len: u64) -> Vec<u64> {
    let f = field.f as usize;
    let p = field.p;
    let rec = field.recurrence();
    let mut x = field.pow(&field.gamma, start);
    let mut seq = Vec::with_capacity(len as usize + f);
    for _ in 0..f {
        seq.push(field.trace_abs(&x));
        x = field.mul(&x, &field.gamma);
    }
    if p == 2 {
        let mask: u64 = rec.iter().enumerate().filter(|(_, &c)| c == 1).map(|(i, _)| 1u64 << i).sum();
        let mut window: u64 = seq.iter().enumerate().map(|(i, &t)| t << i).sum();
        seq.truncate(0);
        for _ in 0..len {
            seq.push(window & 1);
            let next = ((window & mask).count_ones() & 1) as u64;
            window = (window >> 1) | (next << (f - 1));
        }
        return seq;
    }
    let lazy = (p - 1).checked_mul(p - 1).and_then(|sq| sq.checked_mul(f as u64)).is_some();
    for a in 0..len.saturating_sub(f as u64) as usize {
        let window = &seq[a..a + f];
        let next = if lazy {
            window.iter().zip(rec).map(|(&t, &c)| t * c).sum::<u64>() % p
        } else {
            window.iter().zip(rec).fold(0, |acc, (&t, &c)| (acc + mul_mod(t, c, p)) % p)
        };
        seq.push(next);
    }
    seq.truncate(len as usize);
    seq
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheStatus {
    Hit,
    Built,
    Rebuilt,
    Disabled,
}

pub fn cache_path(dir: &Path, p: u64, f: u32, k: u64) -> PathBuf {
    dir.join(format!("trace_{p}_{f}_{k}.bin"))
}

/// Reads the table from `dir` when a valid matching file exists, otherwise
/// builds it and writes it back.
pub fn load_or_build(dir: Option<&Path>, field: &FieldSpec, k: u64, limit: u64) -> Result<(TraceCountTable, CacheStatus)> {
    let Some(dir) = dir else {
        return Ok((build_trace_counts_limited(field, k, limit)?, CacheStatus::Disabled));
    };
    let path = cache_path(dir, field.p, field.f, k);
    let mut status = CacheStatus::Built;
    if let Ok(bytes) = std::fs::read(&path) {
        match TraceCountTable::from_bytes(&bytes) {
            Ok(t) if t.p == field.p && t.f == field.f && t.k == k => return Ok((t, CacheStatus::Hit)),
            _ => status = CacheStatus::Rebuilt,
        }
    }
    let table = build_trace_counts_limited(field, k, limit)?;
    std::fs::create_dir_all(dir).map_err(|e| Error::Cache(e.to_string()))?;
    std::fs::write(&path, table.to_bytes()).map_err(|e| Error::Cache(e.to_string()))?;
    Ok((table, status))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GaussSumValue {
    #[serde(rename = "cyclotomic")]
    pub value: CycInt,
    pub p: u64,
    pub f: u32,
    pub k: u64,
    pub u: u64,
}

/// Conductor holding G(χ^u) for characters of order k over characteristic p.
pub fn gauss_conductor(p: u64, k: u64) -> u64 {
    if p == 2 {
        k
    } else {
        k * p
    }
}

/// G(χ^u) as a raw vector over ζ_n, n = gauss_conductor(p, k).
pub fn gauss_sum_raw(table: &TraceCountTable, u: i64) -> Vec<i128> {
    let (p, k) = (table.p, table.k);
    let um = u.rem_euclid(k as i64) as u64;
    let n = gauss_conductor(p, k);
    let mut raw = vec![0i128; n as usize];
    for i in 0..k {
        let row = table.row(i);
        let zi = mul_mod(um, i, k);
        if p == 2 {
            raw[zi as usize] += row[0] as i128 - row[1] as i128;
        } else {
            for (t, &c) in row.iter().enumerate() {
                if c != 0 {
                    raw[((zi * p + t as u64 * k) % n) as usize] += c as i128;
                }
            }
        }
    }
    raw
}

pub fn gauss_sum_exact(table: &TraceCountTable, u: i64) -> GaussSumValue {
    let (p, k) = (table.p, table.k);
    let value = CycInt::from_raw_i128(gauss_conductor(p, k), gauss_sum_raw(table, u));
    GaussSumValue { value, p, f: table.f, k, u: u.rem_euclid(k as i64) as u64 }
}

/// Σ_{x=1}^{p−1} (x|p) ζ_p^x.
pub fn quadratic_gauss_period(p: u64) -> CycInt {
    let mut raw = vec![-1i128; p as usize];
    raw[0] = 0;
    for x in 1..=p / 2 {
        raw[mul_mod(x, x, p) as usize] = 1;
    }
    CycInt::from_raw_i128(p, raw)
}

/// (−1)^{f−1} (√((−1)^{(p−1)/2} p))^f with the root realized by the period.
pub fn quadratic_gauss_closed(p: u64, f: u32) -> Result<CycInt> {
    if p == 2 {
        return Err(Error::EvenField);
    }
    let v = quadratic_gauss_period(p).pow(f as u64);
    Ok(if f % 2 == 0 { -v } else { v })
}

/// The rational value of G_f(χ) for χ of order k > 2 with p semi-primitive
/// modulo k.
pub fn semiprimitive_gauss_closed(p: u64, k: u64, f: u32) -> Result<BigInt> {
    if k <= 2 {
        return Err(Error::BadParameters("semi-primitive evaluation needs k > 2".into()));
    }
    let s = semiprimitive_exponent(p, k)?.ok_or(Error::NotSemiprimitive { p, k })?;
    if f as u64 % (2 * s) != 0 {
        return Err(Error::BadDegree(format!("2·{s} does not divide {f}")));
    }
    let t = f as u64 / (2 * s);
    let mut sign_exp = t - 1;
    if p != 2 {
        let ps1 = pow_mod(p, s, u64::MAX) as u128 + 1;
        let tot = ps1 * t as u128 / k as u128;
        sign_exp += (tot % 2) as u64;
    }
    let mag = BigInt::from(p).pow(f / 2);
    Ok(if sign_exp % 2 == 0 { mag } else { -mag })
}

/// G_{fs}(χ∘N) = (−1)^{s−1} G_f(χ)^s, with χ of order k and exponent u.
pub fn dh_lift_check(p: u64, f: u32, k: u64, u: i64, s: u32) -> Result<bool> {
    let big = crate::gf::build_field(p, f * s)?;
    crate::gf::checked_field_size(p, f * s, VERIFY_LIMIT)?;
    let emb = big.subfield_embed(f)?;
    let small = build_trace_counts(&emb.sub, k)?;
    let lifted = build_trace_counts(&big, k)?;
    Ok(dh_lift_check_with(&small, &lifted, u, s))
}

/// Lifting check from two tables of the same order k over F_{p^f} and
/// F_{p^{fs}}, the small field's generator being the norm of the big one.
pub fn dh_lift_check_with(small: &TraceCountTable, big: &TraceCountTable, u: i64, s: u32) -> bool {
    let g = gauss_sum_exact(small, u).value.pow(s as u64);
    let rhs = if s % 2 == 0 { -g } else { g };
    gauss_sum_exact(big, u).value == rhs
}

/// Π_{0≤i<ℓ} G(χη^i) = χ^{−ℓ}(ℓ)·G(χ^ℓ)·Π_{0<i<ℓ} G(η^i) over F_{p^r}, with
/// χ of order k and exponent u, η of order ℓ. Checked after multiplying
/// through by χ^ℓ(ℓ), so no division is needed.
pub fn dh_product_check(p: u64, r: u32, k: u64, ell: u64, u: i64) -> Result<bool> {
    let field = crate::gf::build_field(p, r)?;
    if ell < 2 {
        return Err(Error::BadParameters("ℓ must exceed 1".into()));
    }
    let table = build_trace_counts(&field, lcm(k, ell))?;
    dh_product_check_with(&table, &field, k, ell, u)
}

/// As `dh_product_check`, from a table of order lcm(k, ℓ) over `field`.
pub fn dh_product_check_with(table: &TraceCountTable, field: &FieldSpec, k: u64, ell: u64, u: i64) -> Result<bool> {
    let p = field.p;
    let order = table.k;
    if ell < 2 || order % k != 0 || order % ell != 0 {
        return Err(Error::BadParameters(format!("table order {order} is not a multiple of {k} and {ell}")));
    }
    let cu = u.rem_euclid(k as i64) as u64 * (order / k);
    if cu % order == 0 {
        return Err(Error::DegenerateCharacter(format!("χ^{u} is trivial")));
    }
    let eta = order / ell;
    let g = |e: u64| gauss_sum_exact(table, (e % order) as i64).value;
    let log_ell = field.log_prime_field(ell % p).ok_or(Error::DivisionByZero)?;
    let n = gauss_conductor(p, order);
    // χ^ℓ(ℓ) = ζ_order^{cu·ℓ·log ℓ}
    let chi_ell = CycInt::zeta_pow(order, mul_mod(cu * ell % order, log_ell % order, order) as i64).lift(n)?;
    let mut lhs = g(cu).checked_mul(&chi_ell)?;
    let mut rhs = g(cu * ell);
    for i in 1..ell {
        lhs = lhs.checked_mul(&g(cu + i * eta))?;
        rhs = rhs.checked_mul(&g(i * eta))?;
    }
    Ok(lhs == rhs)
}

/// Sum of the base-p digits of a.
pub fn digit_sum(mut a: u64, p: u64) -> u64 {
    let mut s = 0;
    while a > 0 {
        s += a % p;
        a /= p;
    }
    s
}

/// s_p(a) = (p−1) Σ_{i<f} ⟨p^i a/(q−1)⟩, compared after clearing the
/// denominator q−1.
pub fn digit_sum_identity_check(a: u64, p: u64, f: u32) -> Result<bool> {
    let q1 = (p as u128).checked_pow(f).ok_or_else(|| Error::RangeError(format!("{p}^{f} overflows")))? - 1;
    if a as u128 >= q1 {
        return Err(Error::RangeError(format!("a = {a} must be below {p}^{f} − 1")));
    }
    let mut num: u128 = 0;
    let mut pi: u128 = 1;
    for _ in 0..f {
        num += (pi * a as u128) % q1;
        pi = pi * p as u128 % q1;
    }
    Ok((p as u128 - 1) * num == digit_sum(a, p) as u128 * q1)
}

/// χ^u(−1) for χ of order k on F_q.
pub fn chi_minus_one(p: u64, f: u32, k: u64, u: i64) -> CycInt {
    let n = gauss_conductor(p, k);
    if p == 2 {
        return CycInt::one(n);
    }
    let q1_half = (pow_mod(p, f as u64, 2 * k) + 2 * k - 1) % (2 * k) / 2;
    let e = mul_mod(u.rem_euclid(k as i64) as u64, q1_half % k, k);
    CycInt::zeta_pow(k, e as i64).lift(n).expect("k divides the conductor")
}

/// σ with ζ_k ↦ ζ_k^t and ζ_p ↦ ζ_p^t, for t coprime to kp.
pub fn galois_gauss_check(table: &TraceCountTable, u: i64, t: u64, field: &FieldSpec) -> Result<bool> {
    let (p, k) = (table.p, table.k);
    let n = gauss_conductor(p, k);
    if gcd(t, n) != 1 || (p == 2 && t % 2 == 0) {
        return Err(Error::NotCoprime(t, n));
    }
    let lhs = gauss_sum_exact(table, u).value.galois_apply(t as i64)?;
    let tu = (u.rem_euclid(k as i64) as u64 * (t % k)) % k;
    let log_t = field.log_prime_field(t % p).ok_or(Error::DivisionByZero)?;
    let twist = CycInt::zeta_pow(k, -((mul_mod(tu, log_t % k, k)) as i64));
    let rhs = gauss_sum_exact(table, tu as i64).value.checked_mul(&twist)?;
    Ok(lhs == rhs)
}
