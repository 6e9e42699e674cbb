//! The unit group (Z/nZ)^*: orders, indices of ⟨p⟩, coset representatives,
//! semi-primitivity and index stability under prime-power growth.

use crate::error::{Error, Result};
use num_integer::Integer;

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut b = base % m;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let e = (a as i128).extended_gcd(&(m as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m as i128) as u64)
}

/// Prime factorization by trial division, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn prime_factors(n: u64) -> Vec<u64> {
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// All positive divisors, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut ds = vec![1u64];
    for (p, e) in factorize(n) {
        let len = ds.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                ds.push(ds[i] * pk);
            }
        }
    }
    ds.sort_unstable();
    ds
}

/// Exponent of the prime `p` in `n`.
pub fn valuation(mut n: u64, p: u64) -> u32 {
    let mut v = 0;
    while n > 0 && n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Deterministic Miller–Rabin for 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Order of `p` in (Z/nZ)^*. For n = 1 the order is 1.
pub fn multiplicative_order(p: u64, n: u64) -> Result<u64> {
    if n == 1 {
        return Ok(1);
    }
    if gcd(p % n, n) != 1 {
        return Err(Error::NotCoprime(p, n));
    }
    let phi = euler_phi(n);
    let mut ord = phi;
    for (r, _) in factorize(phi) {
        while ord % r == 0 && pow_mod(p, ord / r, n) == 1 {
            ord /= r;
        }
    }
    Ok(ord)
}

/// Index of ⟨p⟩ in (Z/nZ)^*.
pub fn index_of(p: u64, n: u64) -> Result<u64> {
    Ok(euler_phi(n) / multiplicative_order(p, n)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupProfile {
    pub n: u64,
    pub p: u64,
    pub order_f: u64,
    pub index_e: u64,
    pub coset_reps: Vec<u64>,
    pub semiprimitive: bool,
}

pub fn subgroup_profile(p: u64, n: u64) -> Result<SubgroupProfile> {
    if n < 2 {
        return Err(Error::RangeError(format!("modulus {n} < 2")));
    }
    let order_f = multiplicative_order(p, n)?;
    let index_e = euler_phi(n) / order_f;
    let mut seen = vec![false; n as usize];
    let mut coset_reps = Vec::with_capacity(index_e as usize);
    let pm = p % n;
    for x in 1..n {
        if seen[x as usize] || gcd(x, n) != 1 {
            continue;
        }
        coset_reps.push(x);
        let mut y = x;
        loop {
            seen[y as usize] = true;
            y = mul_mod(y, pm, n);
            if y == x {
                break;
            }
        }
    }
    Ok(SubgroupProfile {
        n,
        p,
        order_f,
        index_e,
        coset_reps,
        semiprimitive: is_semiprimitive(p, n)?,
    })
}

/// Smallest s > 0 with p^s ≡ −1 (mod n), if any.
pub fn semiprimitive_exponent(p: u64, n: u64) -> Result<Option<u64>> {
    let ord = multiplicative_order(p, n)?;
    if n <= 2 {
        return Ok(Some(1));
    }
    // −1 is the unique involution of a cyclic subgroup containing it.
    if ord % 2 == 0 && pow_mod(p, ord / 2, n) == n - 1 {
        Ok(Some(ord / 2))
    } else {
        Ok(None)
    }
}

pub fn is_semiprimitive(p: u64, n: u64) -> Result<bool> {
    Ok(semiprimitive_exponent(p, n)?.is_some())
}

/// Compares the index of ⟨p⟩ modulo every divisor d of h with its index
/// modulo the divisor d' of k obtained by raising each odd prime of d to any
/// exponent allowed by k.
pub fn check_index_stability(p: u64, h: u64, k: u64) -> Result<bool> {
    if gcd(p % k.max(1), k) != 1 || gcd(p % h.max(1), h) != 1 {
        return Err(Error::NotCoprime(p, k));
    }
    let odd = |n: u64| -> Vec<(u64, u32)> {
        factorize(n).into_iter().filter(|&(q, _)| q != 2).collect()
    };
    let hf = odd(h);
    let kf = odd(k);
    let same_support = hf.len() == kf.len() && hf.iter().zip(&kf).all(|(a, b)| a.0 == b.0);
    if !same_support || valuation(h, 2) != valuation(k, 2) || hf.iter().any(|&(_, e)| e > 1) {
        return Err(Error::BadSupport(h, k));
    }
    let t = valuation(h, 2);
    for s in 0..=t {
        for mask in 0u32..(1 << kf.len()) {
            let chosen: Vec<(u64, u32)> = kf
                .iter()
                .enumerate()
                .filter(|(j, _)| mask >> j & 1 == 1)
                .map(|(_, &pe)| pe)
                .collect();
            let base = (1u64 << s) * chosen.iter().map(|&(q, _)| q).product::<u64>();
            let e_base = index_of(p, base)?;
            let mut exps = vec![1u32; chosen.len()];
            loop {
                let d = (1u64 << s)
                    * chosen
                        .iter()
                        .zip(&exps)
                        .map(|(&(q, _), &x)| q.pow(x))
                        .product::<u64>();
                if index_of(p, d)? != e_base {
                    return Ok(false);
                }
                let mut j = 0;
                while j < exps.len() {
                    if exps[j] < chosen[j].1 {
                        exps[j] += 1;
                        break;
                    }
                    exps[j] = 1;
                    j += 1;
                }
                if j == exps.len() {
                    break;
                }
            }
        }
    }
    Ok(true)
}
