//! Dense polynomials over F_p, low degree first, used for the modulus search.

use crate::residue::{inv_mod, mul_mod};

pub(crate) fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub(crate) fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(out)
}

/// Remainder of `a` modulo `m` (m nonzero).
pub(crate) fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = trim(a.to_vec());
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p).expect("nonzero leading coefficient");
    while r.len() > dm {
        let dr = r.len() - 1;
        let c = mul_mod(r[dr], lead_inv, p);
        if c != 0 {
            for (j, &mj) in m.iter().enumerate() {
                let idx = dr - dm + j;
                r[idx] = (r[idx] + p - mul_mod(c, mj, p)) % p;
            }
        }
        r = trim(r);
    }
    r
}

pub(crate) fn mul_rem(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + mul_mod(x, y, p)) % p;
        }
    }
    rem(&prod, m, p)
}

pub(crate) fn pow_rem(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_rem(&acc, &b, m, p);
        }
        b = mul_rem(&b, &b, m, p);
        e >>= 1;
    }
    rem(&acc, m, p)
}

pub(crate) fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

/// Rabin's irreducibility test for a monic `m` of degree f ≥ 1.
pub(crate) fn is_irreducible(m: &[u64], p: u64) -> bool {
    let f = m.len() - 1;
    if f == 1 {
        return true;
    }
    let x = vec![0u64, 1];
    // frob[i] = x^{p^i} mod m
    let mut frob = vec![rem(&x, m, p)];
    for i in 1..=f {
        let next = pow_rem(&frob[i - 1], p, m, p);
        frob.push(next);
    }
    if trim(sub(&frob[f], &x, p)) != Vec::<u64>::new() {
        return false;
    }
    for r in crate::residue::prime_factors(f as u64) {
        let g = gcd(m, &sub(&frob[f / r as usize], &x, p), p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}
