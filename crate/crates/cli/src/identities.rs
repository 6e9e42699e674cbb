//! Exhaustive Gauss-sum identity sweep over small fields.

use csrg::error::Result;
use csrg::gauss::{
    build_trace_counts, digit_sum_identity_check, dh_lift_check_with, dh_product_check_with,
    gauss_conductor, gauss_sum_raw, quadratic_gauss_closed, semiprimitive_gauss_closed,
};
use csrg::gf::build_field;
use csrg::residue::{divisors, gcd, is_prime, lcm, mul_mod, semiprimitive_exponent};
use csrg::cycint::raw_is_zero;
use csrg::CycInt;
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy)]
pub struct SweepConfig {
    pub max_q: u64,
    pub max_k: u64,
    /// Identities needing products in Z[ζ_n] run only for n up to this.
    pub product_conductor_cap: u64,
    /// Per-character comparisons of raw sums when k·n is at most this;
    /// larger orders use the trace-table symmetries instead.
    pub direct_cap: u64,
    /// Prime fields with k·p above this skip the dense trace table and work
    /// from the discrete-log classes directly.
    pub dense_cells: u64,
    pub digit_samples: usize,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { max_q: 1 << 16, max_k: 64, product_conductor_cap: 1200, direct_cap: 1 << 14, dense_cells: 1 << 12, digit_samples: 1000, seed: 0x5eed }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SweepReport {
    pub fields: usize,
    pub orders: usize,
    pub checks: u64,
    pub direct_orders: usize,
    pub sparse_orders: usize,
    pub table_orders: usize,
    pub product_orders: usize,
    pub skipped_product_orders: usize,
    pub failures: Vec<String>,
}

impl SweepReport {
    fn merge(mut self, o: SweepReport) -> SweepReport {
        self.fields += o.fields;
        self.orders += o.orders;
        self.checks += o.checks;
        self.direct_orders += o.direct_orders;
        self.sparse_orders += o.sparse_orders;
        self.table_orders += o.table_orders;
        self.product_orders += o.product_orders;
        self.skipped_product_orders += o.skipped_product_orders;
        self.failures.extend(o.failures);
        self
    }
}

/// All (p, f) with p^f ≤ max_q.
pub fn small_fields(max_q: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    for p in (2..=max_q).filter(|&p| is_prime(p)) {
        let mut q = p;
        let mut f = 1;
        while q <= max_q {
            out.push((p, f));
            f += 1;
            q = match q.checked_mul(p) {
                Some(x) => x,
                None => break,
            };
        }
    }
    out
}

pub fn sweep(cfg: &SweepConfig) -> SweepReport {
    small_fields(cfg.max_q)
        .into_par_iter()
        .map(|(p, f)| match sweep_field(p, f, cfg) {
            Ok(r) => r,
            Err(e) => SweepReport { fields: 1, failures: vec![format!("{p}^{f}: {e}")], ..Default::default() },
        })
        .reduce(SweepReport::default, SweepReport::merge)
}

fn sweep_field(p: u64, f: u32, cfg: &SweepConfig) -> Result<SweepReport> {
    let field = build_field(p, f)?;
    let q = field.q;
    let mut rep = SweepReport { fields: 1, ..Default::default() };
    let fail = |rep: &mut SweepReport, ok: bool, what: String| {
        rep.checks += 1;
        if !ok {
            rep.failures.push(format!("{p}^{f}: {what}"));
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (p << 8) ^ f as u64);
    if q > 2 {
        for _ in 0..cfg.digit_samples {
            let a = rng.gen_range(0..q - 1);
            fail(&mut rep, digit_sum_identity_check(a, p, f)?, format!("digit sum a={a}"));
        }
    }
    let mut log: Vec<u32> = Vec::new();
    for k in divisors(q - 1).into_iter().filter(|&k| k <= cfg.max_k) {
        rep.orders += 1;
        if f == 1 && k * p > cfg.dense_cells {
            if log.is_empty() {
                log = prime_field_logs(p, field.gamma.coeffs[0]);
            }
            sparse_prime_order(p, k, &log, &mut rep)?;
            rep.skipped_product_orders += 1;
            continue;
        }
        let table = build_trace_counts(&field, k)?;
        let n = gauss_conductor(p, k);
        let minus = |mut v: Vec<i128>, c: i128| {
            v[0] -= c;
            v
        };
        // (iv) trivial character
        fail(&mut rep, raw_is_zero(n, &minus(gauss_sum_raw(&table, 0), -1)), format!("k={k} G(1) != -1"));
        let half = (q - 1) / 2 % k;
        if k * n <= cfg.direct_cap {
            rep.direct_orders += 1;
            let raw: Vec<Vec<i128>> = (0..k as i64).map(|u| gauss_sum_raw(&table, u)).collect();
            let same = |a: &[i128], b: &[i128]| a == b || raw_is_zero(n, &a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<_>>());
            for u in 0..k {
                // (ii) G(χ^p) = G(χ)
                let up = u * (p % k) % k;
                fail(&mut rep, same(&raw[up as usize], &raw[u as usize]), format!("k={k} u={u} G(chi^p)"));
                // (iii) G(χ^{-u}) = χ^u(−1)·conj(G(χ^u)); χ^u(−1) = ζ_k^{u(q−1)/2}
                let shift = if p == 2 { 0 } else { (u * half % k) * (n / k) };
                let mut rhs = vec![0i128; n as usize];
                for (i, &c) in raw[u as usize].iter().enumerate() {
                    rhs[(((n - i as u64) % n + shift) % n) as usize] = c;
                }
                fail(&mut rep, same(&raw[((k - u) % k) as usize], &rhs), format!("k={k} u={u} G(chi^-1)"));
            }
        } else {
            // x ↦ x^p and x ↦ −x permute the classes and fix (resp. negate)
            // the trace; these table symmetries give (ii) and (iii) for all u.
            rep.table_orders += 1;
            let j0 = if p == 2 { 0 } else { half };
            let mut frob = true;
            let mut neg = true;
            for i in 0..k {
                let row = table.row(i);
                frob &= table.row(i * (p % k) % k) == row;
                let nrow = table.row((i + j0) % k);
                neg &= (0..p as usize).all(|t| nrow[(p as usize - t) % p as usize] == row[t]);
            }
            for u in 0..k {
                fail(&mut rep, frob, format!("k={k} u={u} G(chi^p) via table"));
                fail(&mut rep, neg, format!("k={k} u={u} G(chi^-1) via table"));
            }
        }
        if k == 2 && p != 2 {
            let v = CycInt::from_raw_i128(n, gauss_sum_raw(&table, 1));
            fail(&mut rep, v == quadratic_gauss_closed(p, f)?, "quadratic closed form".into());
        }
        if k > 2 {
            if let Some(s) = semiprimitive_exponent(p, k)? {
                if f as u64 % (2 * s) == 0 {
                    let c = semiprimitive_gauss_closed(p, k, f)?;
                    let c: i128 = c.try_into().expect("closed form fits i128 for q below 2^64");
                    for u in (1..k).filter(|&u| gcd(u, k) == 1) {
                        let ok = raw_is_zero(n, &minus(gauss_sum_raw(&table, u as i64), c));
                        fail(&mut rep, ok, format!("k={k} u={u} semi-primitive closed form"));
                    }
                }
            }
        }
        if n > cfg.product_conductor_cap {
            rep.skipped_product_orders += 1;
            continue;
        }
        rep.product_orders += 1;
        let g: Vec<CycInt> = (0..k as i64).map(|u| CycInt::from_raw_i128(n, gauss_sum_raw(&table, u))).collect();
        let qb = BigInt::from(q);
        for u in 1..k {
            // (i) G(χ)·conj(G(χ)) = q
            let norm = g[u as usize].checked_mul(&g[u as usize].conj())?;
            fail(&mut rep, norm.detect_rational() == Some(qb.clone()), format!("k={k} u={u} |G|^2"));
        }
        for s in [2u32, 3] {
            if (q as u128).pow(s) > cfg.max_q as u128 {
                continue;
            }
            let big = build_field(p, f * s)?;
            let emb = big.subfield_embed(f)?;
            let small = build_trace_counts(&emb.sub, k)?;
            let lifted = build_trace_counts(&big, k)?;
            for u in 0..k as i64 {
                fail(&mut rep, dh_lift_check_with(&small, &lifted, u, s), format!("k={k} u={u} DH lift s={s}"));
            }
        }
        for ell in [2u64, 3] {
            let order = lcm(k, ell);
            if ell == p || (q - 1) % ell != 0 || gauss_conductor(p, order) > cfg.product_conductor_cap {
                continue;
            }
            let t = build_trace_counts(&field, order)?;
            for u in 1..k as i64 {
                fail(&mut rep, dh_product_check_with(&t, &field, k, ell, u)?, format!("k={k} u={u} DH product l={ell}"));
            }
        }
    }
    Ok(rep)
}

/// log[x] with γ^{log[x]} = x for x in F_p^*.
fn prime_field_logs(p: u64, g: u64) -> Vec<u32> {
    let mut log = vec![0u32; p as usize];
    let mut x = 1u64;
    for a in 0..p - 1 {
        log[x as usize] = a as u32;
        x = mul_mod(x, g, p);
    }
    log
}

/// Over F_p the sum G(χ^u) has one term u·log(t) mod k per trace t ≠ 0.
fn sparse_prime_order(p: u64, k: u64, log: &[u32], rep: &mut SweepReport) -> Result<()> {
    rep.sparse_orders += 1;
    let k32 = k as u32;
    let cls = |t: u64| (log[t as usize] % k32) as u64;
    let mut record = |ok: bool, what: String| {
        rep.checks += 1;
        if !ok {
            rep.failures.push(format!("{p}^1: {what}"));
        }
    };
    // (iv) and (ii): the trivial character hits every nonzero trace once, and
    // p ≡ 1 (mod k) makes χ^p = χ.
    record(log.iter().skip(1).all(|&a| (a as u64) < p - 1), format!("k={k} G(1) != -1"));
    record(p % k == 1 % k, format!("k={k} G(chi^p)"));
    // (iii): χ(−x) = χ^{(p−1)/2}(−1)χ(x) for every x
    let j0 = (p - 1) / 2 % k;
    // symmetric in t ↔ p − t since 2·j0 ≡ 0 (mod k)
    let neg = (1..=p / 2).all(|t| cls(p - t) == (cls(t) + j0) % k);
    for u in 0..k {
        record(neg, format!("k={k} u={u} G(chi^-1)"));
    }
    if k == 2 {
        let mut raw = vec![0i128; p as usize];
        for t in 1..p {
            raw[t as usize] = if cls(t) == 0 { 1 } else { -1 };
        }
        record(CycInt::from_raw_i128(p, raw) == quadratic_gauss_closed(p, 1)?, "quadratic closed form".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_list() {
        let fs = small_fields(32);
        assert_eq!(fs, vec![(2, 1), (2, 2), (2, 3), (2, 4), (2, 5), (3, 1), (3, 2), (3, 3), (5, 1), (5, 2), (7, 1), (11, 1), (13, 1), (17, 1), (19, 1), (23, 1), (29, 1), (31, 1)]);
    }

    #[test]
    fn sparse_classes_match_dense_table() {
        for p in [101u64, 257, 1009] {
            let field = build_field(p, 1).unwrap();
            let log = prime_field_logs(p, field.gamma.coeffs[0]);
            for k in divisors(p - 1).into_iter().filter(|&k| k <= 64) {
                let table = build_trace_counts(&field, k).unwrap();
                for t in 1..p {
                    assert_eq!(table.get(log[t as usize] as u64 % k, t), 1);
                }
            }
        }
    }

    #[test]
    fn sparse_and_dense_paths_agree() {
        let dense = SweepConfig { max_q: 600, digit_samples: 5, ..Default::default() };
        let sparse = SweepConfig { dense_cells: 0, ..dense };
        let (a, b) = (sweep(&dense), sweep(&sparse));
        assert!(a.failures.is_empty() && b.failures.is_empty());
        assert_eq!(a.orders, b.orders);
        assert!(b.sparse_orders > 0);
    }

    #[test]
    fn small_sweep_is_clean() {
        let cfg = SweepConfig { max_q: 256, digit_samples: 20, ..Default::default() };
        let r = sweep(&cfg);
        assert!(r.failures.is_empty(), "{:?}", r.failures);
        assert!(r.checks > 1000);
    }
}
