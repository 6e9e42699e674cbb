//! Exact elements of Z[ζ_n] in the reduced power basis {1, ζ, …, ζ^{φ(n)−1}}.
//!
//! Conductors are kept canonical: n ≡ 2 (mod 4) is rewritten over n/2 using
//! ζ_n = −ζ_{n/2}^{(n/2+1)/2}, so equal values in equal conductors have equal
//! coefficient vectors. Values are usually built from a raw group-ring vector
//! (coefficient of ζ_n^i for i = 0..n−1) and reduced once.

use crate::error::{Error, Result};
use crate::residue::{euler_phi, gcd, lcm};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

/// Φ_n, low degree first.
pub fn cyclotomic_polynomial(n: u64) -> Arc<Vec<i64>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<i64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().unwrap().get(&n) {
        return hit.clone();
    }
    let poly = Arc::new(compute_cyclotomic(n));
    cache.lock().unwrap().insert(n, poly.clone());
    poly
}

/// Φ_n = Π_{d | n} (x^d − 1)^{μ(n/d)}, evaluated as a truncated power series
/// on the squarefree kernel and then inflated.
fn compute_cyclotomic(n: u64) -> Vec<i64> {
    assert!(n >= 1);
    let primes = crate::residue::prime_factors(n);
    let rad: u64 = primes.iter().product();
    let deg = euler_phi(rad) as usize;
    let mut series = vec![0i64; deg + 1];
    series[0] = 1;
    for mask in 0u32..(1 << primes.len()) {
        // d = rad / (product of chosen primes); μ(rad/d) = (−1)^{#chosen}
        let chosen = mask.count_ones();
        let div: u64 = primes.iter().enumerate().filter(|(j, _)| mask >> j & 1 == 1).map(|(_, &q)| q).product();
        let d = (rad / div) as usize;
        if chosen % 2 == 0 {
            // multiply by (x^d − 1) = −(1 − x^d)
            for i in (0..=deg).rev() {
                let shifted = if i >= d { series[i - d] } else { 0 };
                series[i] = shifted - series[i];
            }
        } else {
            // divide by (x^d − 1): multiply by −(1 + x^d + x^{2d} + …)
            for i in 0..=deg {
                if i >= d {
                    series[i] += series[i - d];
                }
            }
            for c in series.iter_mut() {
                *c = -*c;
            }
        }
    }
    let stretch = (n / rad) as usize;
    if stretch == 1 {
        return series;
    }
    let mut out = vec![0i64; deg * stretch + 1];
    for (i, c) in series.into_iter().enumerate() {
        out[i * stretch] = c;
    }
    out
}

/// n with the factor 2 removed when n ≡ 2 (mod 4).
pub fn canonical_conductor(n: u64) -> u64 {
    if n % 4 == 2 {
        n / 2
    } else {
        n
    }
}

/// Whether the raw group-ring vector (entry i = coefficient of ζ_n^i) is zero
/// in Z[ζ_n], without reducing modulo Φ_n. Splits ζ_n = ζ_m^α ζ_P^β for a
/// prime power P = ℓ^a ‖ n; the kernel over Z[ζ_m] is spanned by the fibre
/// sums Σ_j ζ_P^{ρ + j ℓ^{a−1}}, so the vector vanishes iff every fibre is
/// constant in Z[ζ_m].
pub fn raw_is_zero(n: u64, raw: &[i128]) -> bool {
    assert_eq!(raw.len() as u64, n, "raw vector length must equal the conductor");
    if raw.iter().all(|&c| c == 0) {
        return true;
    }
    if n == 1 {
        return false;
    }
    let (l, a) = crate::residue::factorize(n)[0];
    let big_p = l.pow(a);
    let m = n / big_p;
    let r = big_p / l;
    let inv_p = if m == 1 { 0 } else { crate::residue::inv_mod(big_p % m, m).expect("coprime") };
    let inv_m = crate::residue::inv_mod(m % big_p, big_p).expect("coprime");
    let mut w = vec![vec![0i128; m as usize]; big_p as usize];
    for (i, &c) in raw.iter().enumerate() {
        if c != 0 {
            let i = i as u64;
            let alpha = if m == 1 { 0 } else { (i % m) * inv_p % m };
            let beta = (i % big_p) * inv_m % big_p;
            w[beta as usize][alpha as usize] = c;
        }
    }
    for rho in 0..r as usize {
        for j in 1..l as usize {
            let other = &w[rho + j * r as usize];
            let diff: Vec<i128> = other.iter().zip(&w[rho]).map(|(x, y)| x - y).collect();
            if !raw_is_zero(m, &diff) {
                return false;
            }
        }
    }
    true
}

/// For n = m·r with gcd(m, r) = 1: the raw vector over ζ_m of an element of
/// Z[ζ_n] lying in Z[ζ_m], or None when it does not lie there. Reduces only in
/// the ζ_r direction, with coefficients in Z[C_m].
pub fn descend_raw(n: u64, m: u64, raw: &[i128]) -> Option<Vec<i128>> {
    assert_eq!(raw.len() as u64, n, "raw vector length must equal the conductor");
    assert!(n % m == 0 && gcd(m, n / m) == 1, "need n = m·r with gcd(m, r) = 1");
    let r = n / m;
    let inv = |a: u64, md: u64| if md == 1 { 0 } else { crate::residue::inv_mod(a % md, md).expect("coprime") };
    let (inv_r, inv_m) = (inv(r, m), inv(m, r));
    // ζ_n^i = ζ_m^α ζ_r^β with i ≡ α r + β m (mod n)
    let mut y = vec![vec![0i128; m as usize]; r as usize];
    for (i, &c) in raw.iter().enumerate() {
        if c != 0 {
            let i = i as u64;
            let alpha = (i % m) * inv_r % m.max(1);
            let beta = (i % r) * inv_m % r.max(1);
            y[beta as usize][alpha as usize] += c;
        }
    }
    let phi = cyclotomic_polynomial(r);
    let deg = phi.len() - 1;
    for b in (deg..r as usize).rev() {
        let top = std::mem::take(&mut y[b]);
        for (j, &pj) in phi[..deg].iter().enumerate() {
            if pj != 0 {
                for (dst, &c) in y[b - deg + j].iter_mut().zip(&top) {
                    *dst -= pj as i128 * c;
                }
            }
        }
    }
    if (1..deg).any(|b| !raw_is_zero(m, &y[b])) {
        return None;
    }
    Some(std::mem::take(&mut y[0]))
}

#[derive(Clone, Debug)]
pub struct CycInt {
    conductor: u64,
    coeffs: Vec<BigInt>,
}

trait Coeff: Clone + Sized {
    fn nil() -> Self;
    fn is_nil(&self) -> bool;
    fn neg(self) -> Option<Self>;
    fn add_assign(&mut self, rhs: &Self) -> Option<()>;
    /// self -= c · k
    fn sub_scaled(&mut self, c: &Self, k: i64) -> Option<()>;
}

impl Coeff for i128 {
    fn nil() -> Self {
        0
    }
    fn is_nil(&self) -> bool {
        *self == 0
    }
    fn neg(self) -> Option<Self> {
        self.checked_neg()
    }
    fn add_assign(&mut self, rhs: &Self) -> Option<()> {
        *self = self.checked_add(*rhs)?;
        Some(())
    }
    fn sub_scaled(&mut self, c: &Self, k: i64) -> Option<()> {
        *self = self.checked_sub(c.checked_mul(k as i128)?)?;
        Some(())
    }
}

impl Coeff for BigInt {
    fn nil() -> Self {
        Zero::zero()
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn neg(self) -> Option<Self> {
        Some(-self)
    }
    fn add_assign(&mut self, rhs: &Self) -> Option<()> {
        *self += rhs;
        Some(())
    }
    fn sub_scaled(&mut self, c: &Self, k: i64) -> Option<()> {
        *self -= c * k;
        Some(())
    }
}

/// Reduces a raw vector of coefficients of ζ_n^i (any length) into the
/// reduced basis of the canonical conductor. Returns the canonical conductor
/// and φ of it coefficients, or None on overflow.
fn reduce_raw<C: Coeff>(n: u64, raw: Vec<C>) -> Option<(u64, Vec<C>)> {
    let nu = n as usize;
    let mut v = if raw.len() == nu {
        raw
    } else {
        let mut folded = vec![C::nil(); nu];
        for (i, c) in raw.into_iter().enumerate() {
            if !c.is_nil() {
                folded[i % nu].add_assign(&c)?;
            }
        }
        folded
    };
    let mut m = n;
    if n % 4 == 2 {
        m = n / 2;
        let mu = m as usize;
        let half = (mu + 1) / 2;
        let mut out = vec![C::nil(); mu];
        for (i, c) in v.into_iter().enumerate() {
            if c.is_nil() {
                continue;
            }
            let j = (i * half) % mu;
            if i % 2 == 1 {
                out[j].add_assign(&c.neg()?)?;
            } else {
                out[j].add_assign(&c)?;
            }
        }
        v = out;
    }
    let phi = cyclotomic_polynomial(m);
    let deg = phi.len() - 1;
    let terms: Vec<(usize, i64)> = phi[..deg].iter().enumerate().filter(|(_, &c)| c != 0).map(|(j, &c)| (j, c)).collect();
    for i in (deg..v.len()).rev() {
        if v[i].is_nil() {
            continue;
        }
        let c = std::mem::replace(&mut v[i], C::nil());
        let base = i - deg;
        for &(j, pj) in &terms {
            v[base + j].sub_scaled(&c, pj)?;
        }
    }
    v.truncate(deg);
    Some((m, v))
}

fn fits_bits(x: &BigInt) -> u64 {
    x.bits()
}

impl CycInt {
    pub fn zero(n: u64) -> CycInt {
        let m = canonical_conductor(n);
        CycInt { conductor: m, coeffs: vec![BigInt::zero(); euler_phi(m) as usize] }
    }

    pub fn from_int(n: u64, value: impl Into<BigInt>) -> CycInt {
        let mut z = CycInt::zero(n);
        z.coeffs[0] = value.into();
        z
    }

    pub fn one(n: u64) -> CycInt {
        CycInt::from_int(n, 1)
    }

    /// ζ_n^e.
    pub fn zeta_pow(n: u64, e: i64) -> CycInt {
        let mut raw = vec![0i128; n as usize];
        raw[e.rem_euclid(n as i64) as usize] = 1;
        CycInt::from_raw_i128(n, raw)
    }

    pub fn zeta(n: u64) -> CycInt {
        CycInt::zeta_pow(n, 1)
    }

    /// Builds Σ raw[i] ζ_n^i; `raw` may be longer than n.
    pub fn from_raw_i128(n: u64, raw: Vec<i128>) -> CycInt {
        match reduce_raw(n, raw.clone()) {
            Some((m, v)) => CycInt { conductor: m, coeffs: v.into_iter().map(BigInt::from).collect() },
            None => CycInt::from_raw(n, raw.into_iter().map(BigInt::from).collect()),
        }
    }

    pub fn from_raw(n: u64, raw: Vec<BigInt>) -> CycInt {
        let (m, v) = reduce_raw(n, raw).expect("big integers do not overflow");
        CycInt { conductor: m, coeffs: v }
    }

    /// From coefficients in the reduced basis of conductor n.
    pub fn from_coeffs(n: u64, coeffs: Vec<BigInt>) -> Result<CycInt> {
        let phi = euler_phi(n) as usize;
        if coeffs.len() != phi {
            return Err(Error::RangeError(format!("expected {phi} coefficients for conductor {n}")));
        }
        if n % 4 == 2 {
            // The power basis of Q(ζ_n) is a different basis; re-reduce.
            return Ok(CycInt::from_raw(n, coeffs));
        }
        Ok(CycInt { conductor: n, coeffs })
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn detect_rational(&self) -> Option<BigInt> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// The same value viewed in conductor m (n | m).
    pub fn lift(&self, m: u64) -> Result<CycInt> {
        let m = canonical_conductor(m);
        if m % self.conductor != 0 {
            return Err(Error::ConductorMismatch(self.conductor, m));
        }
        if m == self.conductor {
            return Ok(self.clone());
        }
        let step = (m / self.conductor) as usize;
        let mut raw = vec![BigInt::zero(); m as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            raw[i * step] = c.clone();
        }
        Ok(CycInt::from_raw(m, raw))
    }

    /// The same value in conductor m if it lies in Q(ζ_m).
    pub fn descend(&self, m: u64) -> Option<CycInt> {
        let m = canonical_conductor(m);
        let n = self.conductor;
        if n % m != 0 {
            return None;
        }
        if n == m {
            return Some(self.clone());
        }
        // n = big · s with rad(big) ⊆ rad(m) and gcd(s, big) = 1.
        let mut big = 1u64;
        let mut s = n;
        for p in crate::residue::prime_factors(m) {
            while s % p == 0 {
                s /= p;
                big *= p;
            }
        }
        // Split Z[ζ_n] = Z[ζ_big] ⊗ Z[ζ_s]; only the ζ_s^0 row may survive.
        let part = if s > 1 { self.tensor_row_zero(big, s)? } else { self.clone() };
        // Inside Z[ζ_big], Φ_big(x) = Φ_m(x^{big/m}): support must sit on
        // multiples of big/m.
        let r = (part.conductor / m) as usize;
        if r == 1 {
            return Some(part);
        }
        let mut coeffs = Vec::with_capacity(euler_phi(m) as usize);
        for (i, c) in part.coeffs.iter().enumerate() {
            if i % r == 0 {
                coeffs.push(c.clone());
            } else if !c.is_zero() {
                return None;
            }
        }
        Some(CycInt { conductor: m, coeffs })
    }

    /// For n = a·b with gcd(a, b) = 1, writes self = Σ_j y_j ζ_b^j with
    /// y_j ∈ Z[ζ_a] and returns y_0 if every other y_j vanishes.
    fn tensor_row_zero(&self, a: u64, b: u64) -> Option<CycInt> {
        let n = self.conductor;
        debug_assert_eq!(a * b, n);
        // ζ_n = ζ_a^α ζ_b^β with α = b^{-1} mod a, β = a^{-1} mod b.
        let alpha = crate::residue::inv_mod(b % a.max(1), a).unwrap_or(0);
        let beta = crate::residue::inv_mod(a % b, b).unwrap_or(0);
        let (au, bu) = (a as usize, b as usize);
        let mut grid = vec![vec![BigInt::zero(); au]; bu];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let ia = (i as u64 * alpha % a.max(1)) as usize;
            let ib = (i as u64 * beta % b) as usize;
            grid[ib][ia] += c;
        }
        // Reduce along ζ_b: rows j ≥ φ(b) fold back through Φ_b.
        let phib = cyclotomic_polynomial(b);
        let degb = phib.len() - 1;
        for j in (degb..bu).rev() {
            let row = std::mem::replace(&mut grid[j], vec![BigInt::zero(); au]);
            if row.iter().all(Zero::is_zero) {
                continue;
            }
            for (t, &pt) in phib[..degb].iter().enumerate() {
                if pt == 0 {
                    continue;
                }
                for (x, y) in grid[j - degb + t].iter_mut().zip(&row) {
                    *x -= y * pt;
                }
            }
        }
        let rows: Vec<CycInt> = grid.into_iter().take(degb).map(|row| CycInt::from_raw(a, row)).collect();
        if rows[1..].iter().all(CycInt::is_zero) {
            Some(rows.into_iter().next().unwrap())
        } else {
            None
        }
    }

    /// Brings two operands to a common conductor: equal, rational, or one
    /// dividing the other.
    pub fn unify(a: &CycInt, b: &CycInt) -> Result<(CycInt, CycInt)> {
        if a.conductor == b.conductor {
            return Ok((a.clone(), b.clone()));
        }
        if let Some(v) = a.detect_rational() {
            return Ok((CycInt::from_int(b.conductor, v), b.clone()));
        }
        if let Some(v) = b.detect_rational() {
            return Ok((a.clone(), CycInt::from_int(a.conductor, v)));
        }
        if b.conductor % a.conductor == 0 {
            return Ok((a.lift(b.conductor)?, b.clone()));
        }
        if a.conductor % b.conductor == 0 {
            return Ok((a.clone(), b.lift(a.conductor)?));
        }
        Err(Error::ConductorMismatch(a.conductor, b.conductor))
    }

    pub fn checked_add(&self, other: &CycInt) -> Result<CycInt> {
        let (a, b) = CycInt::unify(self, other)?;
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect();
        Ok(CycInt { conductor: a.conductor, coeffs })
    }

    pub fn checked_sub(&self, other: &CycInt) -> Result<CycInt> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &CycInt) -> Result<CycInt> {
        let (a, b) = CycInt::unify(self, other)?;
        Ok(a.mul_same(&b))
    }

    fn mul_same(&self, other: &CycInt) -> CycInt {
        let n = self.conductor;
        if self.is_zero() || other.is_zero() {
            return CycInt::zero(n);
        }
        let la = self.coeffs.len();
        let lb = other.coeffs.len();
        let bits_a = self.coeffs.iter().map(fits_bits).max().unwrap_or(0);
        let bits_b = other.coeffs.iter().map(fits_bits).max().unwrap_or(0);
        let len_bits = 64 - (la.min(lb) as u64).leading_zeros() as u64;
        if bits_a <= 62 && bits_b <= 62 && bits_a + bits_b + len_bits <= 110 {
            let a: Vec<i128> = self.coeffs.iter().map(|c| c.to_i128().unwrap()).collect();
            let b: Vec<(usize, i128)> = other
                .coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(j, c)| (j, c.to_i128().unwrap()))
                .collect();
            let mut prod = vec![0i128; la + lb - 1];
            for (i, &x) in a.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                for &(j, y) in &b {
                    prod[i + j] += x * y;
                }
            }
            if let Some((m, v)) = reduce_raw(n, prod) {
                return CycInt { conductor: m, coeffs: v.into_iter().map(BigInt::from).collect() };
            }
        }
        let mut prod = vec![BigInt::zero(); la + lb - 1];
        for (i, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in other.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        CycInt::from_raw(n, prod)
    }

    pub fn pow(&self, mut e: u64) -> CycInt {
        let mut acc: Option<CycInt> = None;
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    Some(a) => a.mul_same(&b),
                    None => b.clone(),
                });
            }
            e >>= 1;
            if e > 0 {
                b = b.mul_same(&b);
            }
        }
        acc.unwrap_or_else(|| CycInt::one(self.conductor))
    }

    pub fn scale(&self, k: &BigInt) -> CycInt {
        CycInt { conductor: self.conductor, coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    /// Coefficientwise exact division by an integer.
    pub fn div_exact(&self, d: &BigInt) -> Result<CycInt> {
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            let (q, r) = c.div_rem(d);
            if !r.is_zero() {
                return Err(Error::NonIntegralDivision(format!("coefficient {c} not divisible by {d}")));
            }
            coeffs.push(q);
        }
        Ok(CycInt { conductor: self.conductor, coeffs })
    }

    /// Multiplies by ζ_n^e.
    pub fn mul_zeta_pow(&self, e: i64) -> CycInt {
        let n = self.conductor;
        let shift = e.rem_euclid(n as i64) as usize;
        let mut raw = vec![BigInt::zero(); n as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            raw[(i + shift) % n as usize] = c.clone();
        }
        CycInt::from_raw(n, raw)
    }

    /// Raw group-ring vector of length n (entry i = coefficient of ζ_n^i).
    pub fn to_raw(&self) -> Vec<BigInt> {
        let mut raw = self.coeffs.clone();
        raw.resize(self.conductor as usize, BigInt::zero());
        raw
    }

    /// The automorphism ζ_n ↦ ζ_n^t.
    pub fn galois_apply(&self, t: i64) -> Result<CycInt> {
        let n = self.conductor;
        let tm = t.rem_euclid(n as i64) as u64;
        if gcd(tm, n) != 1 {
            return Err(Error::NotCoprime(t.unsigned_abs(), n));
        }
        let mut raw = vec![BigInt::zero(); n as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                raw[(i as u64 * tm % n) as usize] = c.clone();
            }
        }
        Ok(CycInt::from_raw(n, raw))
    }

    pub fn conj(&self) -> CycInt {
        if self.conductor <= 2 {
            return self.clone();
        }
        self.galois_apply(self.conductor as i64 - 1).expect("n − 1 is a unit")
    }

    /// Returns (m, j) with self = ζ_m^j, j < m, gcd(j, m) = 1 (or (1, 0)).
    pub fn classify_root_of_unity(&self) -> Option<(u64, u64)> {
        let n = self.conductor;
        if self.is_zero() || self.mul_same(&self.conj()) != CycInt::one(n) {
            return None;
        }
        let neg = -self;
        let mut z = CycInt::one(n);
        for i in 0..n {
            let e = if z == *self {
                Some(2 * i)
            } else if z == neg {
                Some(n + 2 * i)
            } else {
                None
            };
            if let Some(e) = e {
                // self = ζ_{2n}^e
                let e = e % (2 * n);
                let g = gcd(e, 2 * n);
                return Some((2 * n / g, e / g));
            }
            z = z.times_zeta();
        }
        None
    }

    /// Multiplication by ζ_n, one basis shift plus one reduction step.
    fn times_zeta(&self) -> CycInt {
        let phi = cyclotomic_polynomial(self.conductor);
        let deg = phi.len() - 1;
        let mut v = Vec::with_capacity(deg + 1);
        v.push(BigInt::zero());
        v.extend(self.coeffs.iter().cloned());
        let top = v.pop().unwrap();
        if !top.is_zero() {
            for (j, &pj) in phi[..deg].iter().enumerate() {
                if pj != 0 {
                    v[j] -= &top * pj;
                }
            }
        }
        CycInt { conductor: self.conductor, coeffs: v }
    }

    /// Complex value under ζ_n ↦ exp(2πi t/n).
    pub fn evaluate(&self, t: u64) -> (f64, f64) {
        let n = self.conductor as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let v = c.to_f64().unwrap_or(f64::NAN);
            let ang = 2.0 * std::f64::consts::PI * ((i as u64 * t) % self.conductor) as f64 / n;
            re += v * ang.cos();
            im += v * ang.sin();
        }
        (re, im)
    }

    /// Polynomial text "c0 + c1*z^1 + …" without the conductor.
    pub fn format_terms(&self) -> String {
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let body = if i == 0 {
                mag.to_string()
            } else if mag.is_one() {
                format!("z^{i}")
            } else {
                format!("{mag}*z^{i}")
            };
            if out.is_empty() {
                if c.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(if c.is_negative() { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

impl PartialEq for CycInt {
    fn eq(&self, other: &CycInt) -> bool {
        if self.conductor == other.conductor {
            return self.coeffs == other.coeffs;
        }
        let m = lcm(self.conductor, other.conductor);
        match (self.lift(m), other.lift(m)) {
            (Ok(a), Ok(b)) => a.coeffs == b.coeffs,
            _ => false,
        }
    }
}

impl Eq for CycInt {}

impl fmt::Display for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (conductor {})", self.format_terms(), self.conductor)
    }
}

impl std::ops::Neg for &CycInt {
    type Output = CycInt;
    fn neg(self) -> CycInt {
        CycInt { conductor: self.conductor, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl std::ops::Neg for CycInt {
    type Output = CycInt;
    fn neg(self) -> CycInt {
        -&self
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl std::ops::$trait<&CycInt> for &CycInt {
            type Output = CycInt;
            /// Panics on incompatible conductors; use the checked form to
            /// handle that case.
            fn $method(self, rhs: &CycInt) -> CycInt {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl std::ops::$trait<CycInt> for CycInt {
            type Output = CycInt;
            fn $method(self, rhs: CycInt) -> CycInt {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

#[derive(Serialize, Deserialize)]
struct CycIntRepr {
    conductor: u64,
    coeffs: Vec<serde_json::Value>,
}

impl Serialize for CycInt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| match c.to_i64() {
                Some(v) => serde_json::Value::from(v),
                None => serde_json::Value::from(c.to_string()),
            })
            .collect();
        CycIntRepr { conductor: self.conductor, coeffs }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycInt {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = CycIntRepr::deserialize(d)?;
        let coeffs = repr
            .coeffs
            .iter()
            .map(|v| match v {
                serde_json::Value::Number(n) => n.as_i64().map(BigInt::from).ok_or_else(|| D::Error::custom("bad integer")),
                serde_json::Value::String(s) => s.parse::<BigInt>().map_err(D::Error::custom),
                _ => Err(D::Error::custom("coefficient must be a number or string")),
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        CycInt::from_coeffs(repr.conductor, coeffs).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: u64, e: i64) -> CycInt {
        CycInt::zeta_pow(n, e)
    }

    fn int(n: u64, v: i64) -> CycInt {
        CycInt::from_int(n, v)
    }

    /// Φ_n by exact division of x^n − 1 by Φ_d for proper divisors d.
    fn phi_by_division(n: u64) -> Vec<i64> {
        let mut num = vec![0i64; n as usize + 1];
        num[0] = -1;
        num[n as usize] = 1;
        for d in crate::residue::divisors(n) {
            if d == n {
                continue;
            }
            let den = phi_by_division(d);
            // exact division by a monic polynomial
            let dd = den.len() - 1;
            let mut q = vec![0i64; num.len() - dd];
            for i in (0..q.len()).rev() {
                let c = num[i + dd];
                q[i] = c;
                for (j, &dj) in den.iter().enumerate() {
                    num[i + j] -= c * dj;
                }
            }
            assert!(num.iter().all(|&c| c == 0));
            num = q;
        }
        num
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(*cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_polynomial(4), vec![1, 0, 1]);
        let p33 = cyclotomic_polynomial(33);
        assert_eq!(p33.len() - 1, 20);
        assert_eq!(p33.iter().sum::<i64>(), 1);
        for n in 1..=120 {
            assert_eq!(*cyclotomic_polynomial(n), phi_by_division(n), "n={n}");
        }
        // first coefficient of height 2
        assert!(cyclotomic_polynomial(105).iter().any(|&c| c == -2));
    }

    #[test]
    fn ring_examples() {
        assert_eq!(z(3, 1) + z(3, 2), int(3, -1));
        assert_eq!(z(4, 1) * z(4, 1), int(4, -1));
        let g = z(3, 1) - z(3, 2);
        assert_eq!(&g * &g, int(3, -3));
        assert_eq!(g.conj() * g.clone(), int(3, 3));
        assert_eq!((&g * &g + int(3, 3)).detect_rational(), Some(BigInt::zero()));
        assert_eq!((z(3, 1) + z(3, 2) + int(3, 1)).detect_rational(), Some(BigInt::zero()));
        assert_eq!(z(5, 1).detect_rational(), None);
    }

    #[test]
    fn galois_examples() {
        assert_eq!(z(5, 1).galois_apply(1).unwrap(), z(5, 1));
        assert_eq!(z(5, 1).galois_apply(2).unwrap(), z(5, 2));
        let g = z(3, 1) - z(3, 2);
        assert_eq!(g.galois_apply(2).unwrap(), -&g);
        assert_eq!(z(8, 1).conj(), z(8, 7));
        assert_eq!(int(7, 5).conj(), int(7, 5));
        assert_eq!(z(9, 1).galois_apply(3), Err(Error::NotCoprime(3, 9)));
    }

    #[test]
    fn roots_of_unity() {
        assert_eq!(int(5, 1).classify_root_of_unity(), Some((1, 0)));
        assert_eq!(int(1, -1).classify_root_of_unity(), Some((2, 1)));
        assert_eq!((-z(9, 2)).classify_root_of_unity(), Some((18, 13)));
        assert_eq!(z(9, 2).classify_root_of_unity(), Some((9, 2)));
        assert_eq!(z(12, 5).classify_root_of_unity(), Some((12, 5)));
        assert_eq!(int(9, 2).classify_root_of_unity(), None);
        assert_eq!((z(7, 1) + z(7, 2)).classify_root_of_unity(), None);
    }

    #[test]
    fn canonical_conductor_rewrites() {
        // ζ_6 = −ζ_3^2
        assert_eq!(z(6, 1), -z(3, 2));
        assert_eq!(z(6, 1).conductor(), 3);
        assert_eq!(z(2, 1), int(1, -1));
        assert_eq!(z(10, 3), -z(5, 4));
        assert_eq!(z(6, 1).pow(6), int(3, 1));
    }

    #[test]
    fn lift_and_descend() {
        let a = z(3, 1) - z(3, 2);
        let b = a.lift(12).unwrap();
        assert_eq!(b.conductor(), 12);
        assert_eq!(b.descend(3).unwrap(), a);
        assert_eq!(b, a);
        let c = z(5, 1) * z(7, 1).lift(35).unwrap();
        assert_eq!(c, z(35, 12));
        assert!(c.descend(5).is_none());
        let d = z(5, 2).lift(105).unwrap();
        assert_eq!(d.descend(5).unwrap(), z(5, 2));
        let e = z(9, 3).lift(45).unwrap();
        assert_eq!(e.descend(3).unwrap(), z(3, 1));
        assert!(z(9, 1).lift(45).unwrap().descend(3).is_none());
        assert!(z(4, 1).lift(12).unwrap().descend(3).is_none());
        assert_eq!(int(15, 7).descend(1).unwrap(), int(1, 7));
    }

    #[test]
    fn mixed_conductors_coerce() {
        assert_eq!(int(1, 3).checked_add(&z(5, 1)).unwrap(), z(5, 1) + int(5, 3));
        assert_eq!(z(3, 1).checked_mul(&z(9, 1)).unwrap(), z(9, 4));
        assert_eq!(z(3, 1).checked_add(&z(5, 1)), Err(Error::ConductorMismatch(3, 5)));
    }

    #[test]
    fn formatting_and_serde() {
        assert_eq!((z(3, 1) - z(3, 2)).to_string(), "1 + 2*z^1 (conductor 3)");
        assert_eq!(int(5, 4).format_terms(), "4");
        assert_eq!((int(7, 0) - z(7, 1) + z(7, 3) * int(7, 2)).format_terms(), "-z^1 + 2*z^3");
        assert_eq!(CycInt::zero(9).format_terms(), "0");
        let v = z(9, 2) * int(9, -3) + int(9, 1);
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"{"conductor":9,"coeffs":[1,0,-3,0,0,0]}"#);
        let back: CycInt = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
        let huge = CycInt::from_int(3, BigInt::from(10).pow(30));
        let back: CycInt = serde_json::from_str(&serde_json::to_string(&huge).unwrap()).unwrap();
        assert_eq!(back, huge);
    }

    #[test]
    fn exact_division() {
        let v = int(5, 6) + z(5, 2) * int(5, 9);
        assert_eq!(v.div_exact(&BigInt::from(3)).unwrap(), int(5, 2) + z(5, 2) * int(5, 3));
        assert!(matches!(v.div_exact(&BigInt::from(2)), Err(Error::NonIntegralDivision(_))));
    }

    #[test]
    fn big_coefficient_path() {
        let big = CycInt::from_int(7, BigInt::from(3).pow(60)) + z(7, 3);
        let sq = &big * &big;
        let expect = CycInt::from_int(7, BigInt::from(3).pow(120)) + z(7, 3) * CycInt::from_int(7, BigInt::from(3).pow(60) * 2) + z(7, 6);
        assert_eq!(sq, expect);
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        fn conductor() -> impl Strategy<Value = u64> {
            prop::sample::select(vec![1u64, 3, 4, 5, 7, 8, 9, 12, 15, 16, 20, 21, 24, 33, 45, 63])
        }

        fn element(n: u64) -> impl Strategy<Value = CycInt> {
            prop::collection::vec(-20i128..20, n as usize).prop_map(move |raw| CycInt::from_raw_i128(n, raw))
        }

        fn pair() -> impl Strategy<Value = (CycInt, CycInt, CycInt)> {
            conductor().prop_flat_map(|n| (element(n), element(n), element(n)))
        }

        proptest! {
            #[test]
            fn ring_axioms((a, b, c) in pair()) {
                prop_assert_eq!(&a * &b, &b * &a);
                prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
                prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
                prop_assert_eq!(&a - &a, CycInt::zero(a.conductor()));
            }

            #[test]
            fn galois_composition((a, _b, _c) in pair(), s in 1i64..200, t in 1i64..200) {
                let n = a.conductor() as i64;
                prop_assume!(gcd(s as u64, n as u64) == 1 && gcd(t as u64, n as u64) == 1);
                let lhs = a.galois_apply(t).unwrap().galois_apply(s).unwrap();
                prop_assert_eq!(lhs, a.galois_apply(s * t % n.max(1)).unwrap());
            }

            #[test]
            fn galois_is_ring_hom((a, b, _c) in pair(), t in 1i64..200) {
                let n = a.conductor();
                prop_assume!(gcd(t as u64, n) == 1);
                prop_assert_eq!((&a * &b).galois_apply(t).unwrap(), &a.galois_apply(t).unwrap() * &b.galois_apply(t).unwrap());
            }

            #[test]
            fn norm_embeddings_nonnegative((a, _b, _c) in pair()) {
                let nrm = &a.conj() * &a;
                let n = a.conductor();
                for t in (1..=n).filter(|&t| gcd(t, n) == 1) {
                    let (re, im) = nrm.evaluate(t);
                    prop_assert!(im.abs() < 1e-6 * (1.0 + re.abs()));
                    prop_assert!(re > -1e-6);
                }
            }

            #[test]
            fn raw_round_trip((a, _b, _c) in pair(), shift in 0u64..5) {
                // Re-expanding through a larger raw vector and reducing is idempotent.
                let n = a.conductor();
                let mut raw = a.to_raw();
                raw.resize((n * (shift + 1)) as usize, BigInt::zero());
                raw.rotate_right((n * shift) as usize);
                prop_assert_eq!(CycInt::from_raw(n, raw), a.clone());
                prop_assert_eq!(CycInt::from_raw(n, a.to_raw()), a);
            }

            #[test]
            fn raw_zero_test_matches_reduction(n in conductor(), raw in prop::collection::vec(-3i128..3, 64), fibre in 0usize..3) {
                let n = n * [1, 2, 10][fibre];
                let mut v: Vec<i128> = raw.into_iter().cycle().take(n as usize).collect();
                prop_assert_eq!(raw_is_zero(n, &v), CycInt::from_raw_i128(n, v.clone()).is_zero());
                // add a multiple of a vanishing sum and subtract the original
                let orig = v.clone();
                let l = crate::residue::factorize(n.max(2))[0].0;
                if n > 1 {
                    for j in 0..l {
                        v[(j * (n / l)) as usize] += 5;
                    }
                    let d: Vec<i128> = v.iter().zip(&orig).map(|(x, y)| x - y).collect();
                    prop_assert!(raw_is_zero(n, &d));
                }
            }

            #[test]
            fn raw_descent_matches_reduction(
                (m, r) in prop::sample::select(vec![(1u64, 4u64), (3, 4), (5, 3), (7, 4), (3, 8), (9, 4), (5, 12), (4, 9), (11, 6)]),
                raw in prop::collection::vec(-3i128..3, 132),
                inside in any::<bool>(),
            ) {
                let n = m * r;
                let mut v: Vec<i128> = raw.into_iter().take(n as usize).collect();
                if inside {
                    // an element of Z[ζ_m] written over ζ_n, plus a vanishing sum
                    let base: Vec<i128> = v[..m as usize].to_vec();
                    v = vec![0; n as usize];
                    for (a, &c) in base.iter().enumerate() {
                        v[a * r as usize] += c;
                    }
                    let l = crate::residue::factorize(r)[0].0;
                    for j in 0..l {
                        v[((1 + j * (n / l)) % n) as usize] += 2;
                    }
                }
                let full = CycInt::from_raw_i128(n, v.clone());
                match descend_raw(n, m, &v) {
                    Some(y) => prop_assert_eq!(CycInt::from_raw_i128(m, y), full),
                    None => prop_assert!(full.descend(m).is_none()),
                }
                if inside {
                    prop_assert!(descend_raw(n, m, &v).is_some());
                }
            }

            #[test]
            fn lift_then_descend((a, _b, _c) in pair(), mult in prop::sample::select(vec![2u64, 3, 4, 5, 7])) {
                let n = a.conductor();
                let m = canonical_conductor(n * mult);
                let up = a.lift(m).unwrap();
                prop_assert_eq!(up.descend(n).unwrap(), a.clone());
                prop_assert_eq!(up, a);
            }
        }
    }
}
