//! Primality testing, integer factorization, and modular square roots.
//!
//! Everything here works on arbitrary-precision integers with a fast `u64`
//! path; inputs are desk scale (discriminants and group orders of CLI-sized
//! sweeps), so trial division plus Pollard–Brent rho is plenty.

use num_bigint::{BigInt, BigUint, ToBigInt};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

use crate::error::{Error, Result};

/// Witness set making Miller–Rabin deterministic for all n < 2^64
/// (Sinclair's set, verified exhaustively in the literature).
const WITNESSES_U64: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Fixed witness set used above 2^64. Probabilistic with error < 4^-25;
/// documented so runs are reproducible.
const WITNESSES_BIG: [u64; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97,
];

/// A checked prime. Construction verifies primality: deterministic
/// Miller–Rabin below 2^64, the fixed witness set above.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeP(BigUint);

impl PrimeP {
    pub fn new(n: BigUint) -> Result<Self> {
        if is_prime(&n) {
            Ok(PrimeP(n))
        } else {
            Err(Error::NotPrime(n))
        }
    }

    pub fn from_u64(n: u64) -> Result<Self> {
        Self::new(BigUint::from(n))
    }

    pub fn get(&self) -> &BigUint {
        &self.0
    }

    pub fn to_bigint(&self) -> BigInt {
        self.0.to_bigint().expect("nonnegative")
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }

    pub fn is_two(&self) -> bool {
        self.0 == BigUint::from(2u8)
    }

    /// True iff this prime divides `n`.
    pub fn divides(&self, n: &BigInt) -> bool {
        !n.is_zero() && (n.magnitude() % &self.0).is_zero()
    }
}

impl fmt::Display for PrimeP {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn mulmod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod_u64(acc, base, m);
        }
        base = mulmod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'witness: for &a in &WITNESSES_U64 {
        let mut x = powmod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn is_prime(n: &BigUint) -> bool {
    if let Some(u) = n.to_u64() {
        return is_prime_u64(u);
    }
    let one = BigUint::one();
    let two = BigUint::from(2u8);
    if (n % &two).is_zero() {
        return false;
    }
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for &a in &WITNESSES_BIG {
        let a = BigUint::from(a);
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// All primes < bound, by sieve of Eratosthenes.
pub fn primes_below(bound: u64) -> Vec<u64> {
    if bound <= 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut sieve = vec![true; n];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2usize;
    while i * i < n {
        if sieve[i] {
            let mut j = i * i;
            while j < n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (2..n).filter(|&k| sieve[k]).map(|k| k as u64).collect()
}

fn pollard_brent_u64(n: u64) -> u64 {
    // n odd composite, not a prime power of a small prime.
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mulmod_u64(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = Vec::new();
    let push = |out: &mut Vec<(u64, u32)>, p: u64, e: u32| {
        if let Some(last) = out.iter_mut().find(|(q, _)| *q == p) {
            last.1 += e;
        } else {
            out.push((p, e));
        }
    };
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            push(&mut out, p, e);
        }
    }
    let mut d = 49u64;
    while d * d <= n && d < 1 << 16 {
        let mut e = 0;
        while n % d == 0 {
            n /= d;
            e += 1;
        }
        if e > 0 {
            push(&mut out, d, e);
        }
        d += 2;
    }
    // Remaining cofactor: prime, or split recursively with rho.
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime_u64(m) {
            push(&mut out, m, 1);
            continue;
        }
        let f = pollard_brent_u64(m);
        stack.push(f);
        stack.push(m / f);
    }
    out.sort_unstable();
    out
}

/// Factor a positive integer. Fast path for u64; big inputs fall back to
/// trial division plus a BigUint Pollard rho (desk-scale inputs only).
pub fn factor(n: &BigUint) -> Vec<(BigUint, u32)> {
    assert!(!n.is_zero(), "factor(0)");
    if let Some(u) = n.to_u64() {
        return factor_u64(u)
            .into_iter()
            .map(|(p, e)| (BigUint::from(p), e))
            .collect();
    }
    let mut n = n.clone();
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    for p in primes_below(100_000) {
        let pb = BigUint::from(p);
        let mut e = 0;
        while (&n % &pb).is_zero() {
            n /= &pb;
            e += 1;
        }
        if e > 0 {
            out.push((pb, e));
        }
        if n.is_one() {
            break;
        }
        if let Some(u) = n.to_u64() {
            for (q, eq) in factor_u64(u) {
                out.push((BigUint::from(q), eq));
            }
            n = BigUint::one();
            break;
        }
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_prime(&m) {
            merge(&mut out, m, 1);
            continue;
        }
        let f = pollard_rho_big(&m);
        stack.push(&m / &f);
        stack.push(f);
    }
    out.sort();
    out
}

fn merge(out: &mut Vec<(BigUint, u32)>, p: BigUint, e: u32) {
    if let Some(slot) = out.iter_mut().find(|(q, _)| *q == p) {
        slot.1 += e;
    } else {
        out.push((p, e));
    }
}

fn pollard_rho_big(n: &BigUint) -> BigUint {
    let one = BigUint::one();
    let mut c = BigUint::one();
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut x = BigUint::from(2u8);
        let mut y = x.clone();
        let mut d = BigUint::one();
        while d == one {
            x = f(&x);
            y = f(&f(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            if diff.is_zero() {
                break;
            }
            d = diff.gcd(n);
        }
        if d != one && &d != n {
            return d;
        }
        c += 1u8;
    }
}

/// Write d = m * a^2 with m squarefree (m carries the sign of d). d != 0.
pub fn squarefree_decomp(d: &BigInt) -> (BigInt, BigUint) {
    assert!(!d.is_zero());
    let mut m = BigInt::one();
    let mut a = BigUint::one();
    for (p, e) in factor(d.magnitude()) {
        if e % 2 == 1 {
            m *= p.to_bigint().expect("positive");
        }
        let half: BigUint = p.pow(e / 2);
        a *= half;
    }
    if d.is_negative() {
        m = -m;
    }
    (m, a)
}

/// Legendre symbol (a/p) for odd prime p, via Euler's criterion.
pub fn legendre(a: &BigInt, p: &PrimeP) -> i32 {
    debug_assert!(!p.is_two());
    let pb = p.get();
    let a_mod = a.mod_floor(&p.to_bigint()).magnitude().clone();
    if a_mod.is_zero() {
        return 0;
    }
    let exp = (pb - BigUint::one()) >> 1;
    let r = a_mod.modpow(&exp, pb);
    if r.is_one() {
        1
    } else {
        -1
    }
}

/// Square root of a mod p (odd prime), by Tonelli–Shanks.
/// Returns None when a is a non-residue.
pub fn sqrt_mod(a: &BigUint, p: &PrimeP) -> Option<BigUint> {
    let pb = p.get();
    let a = a % pb;
    if a.is_zero() {
        return Some(BigUint::zero());
    }
    let one = BigUint::one();
    let two = BigUint::from(2u8);
    if legendre(&a.to_bigint().unwrap(), p) != 1 {
        return None;
    }
    // p ≡ 3 (mod 4): direct exponentiation.
    if (pb % 4u8) == BigUint::from(3u8) {
        let exp = (pb + &one) >> 2;
        return Some(a.modpow(&exp, pb));
    }
    // Tonelli–Shanks. Write p - 1 = q * 2^s with q odd.
    let p_minus_1 = pb - &one;
    let s = p_minus_1.trailing_zeros().unwrap();
    let q = &p_minus_1 >> s;
    // Find a non-residue z.
    let mut z = BigUint::from(2u8);
    while legendre(&z.to_bigint().unwrap(), p) != -1 {
        z += 1u8;
    }
    let mut m = s;
    let mut c = z.modpow(&q, pb);
    let mut t = a.modpow(&q, pb);
    let mut r = a.modpow(&((&q + &one) >> 1), pb);
    while !t.is_one() {
        let mut i = 0u64;
        let mut t2 = t.clone();
        while !t2.is_one() {
            t2 = t2.modpow(&two, pb);
            i += 1;
        }
        let b = c.modpow(&(BigUint::one() << (m - i - 1)), pb);
        m = i;
        c = (&b * &b) % pb;
        t = (&t * &c) % pb;
        r = (&r * &b) % pb;
    }
    Some(r)
}

/// Inverse of a mod m (m > 1), when gcd(a, m) = 1.
pub fn inv_mod(a: &BigUint, m: &BigUint) -> Result<BigUint> {
    let a = BigInt::from(a % m);
    let mb = m.to_bigint().unwrap();
    let ext = a.extended_gcd(&mb);
    if !ext.gcd.is_one() {
        return Err(Error::NotInvertible);
    }
    Ok(ext.x.mod_floor(&mb).magnitude().clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_small_and_carmichael() {
        assert!(is_prime_u64(2));
        assert!(is_prime_u64(1_000_003));
        assert!(!is_prime_u64(561)); // Carmichael
        assert!(!is_prime_u64(1));
        assert!(is_prime(&BigUint::from(u64::MAX - 58))); // 2^64 - 59 is prime
    }

    #[test]
    fn prime_p_rejects_composites() {
        assert!(PrimeP::from_u64(91).is_err());
        assert_eq!(PrimeP::from_u64(97).unwrap().to_u64(), Some(97));
    }

    #[test]
    fn factor_roundtrip() {
        for n in [2u64, 72, 125, 1944, 600, 46368, 9_999_991 * 2] {
            let fs = factor_u64(n);
            let back: u64 = fs.iter().map(|(p, e)| p.pow(*e)).product();
            assert_eq!(back, n);
            assert!(fs.iter().all(|(p, _)| is_prime_u64(*p)));
        }
    }

    #[test]
    fn squarefree_parts() {
        let (m, a) = squarefree_decomp(&BigInt::from(72));
        assert_eq!((m, a), (BigInt::from(2), BigUint::from(6u8)));
        let (m, a) = squarefree_decomp(&BigInt::from(-75));
        assert_eq!((m, a), (BigInt::from(-3), BigUint::from(5u8)));
        let (m, a) = squarefree_decomp(&BigInt::from(121));
        assert_eq!((m, a), (BigInt::from(1), BigUint::from(11u8)));
    }

    #[test]
    fn sqrt_mod_agrees_with_squaring() {
        let p = PrimeP::from_u64(10_007).unwrap();
        let mut found = 0;
        for a in 1u64..200 {
            if let Some(r) = sqrt_mod(&BigUint::from(a), &p) {
                assert_eq!((&r * &r) % p.get(), BigUint::from(a));
                found += 1;
            }
        }
        assert!(found > 50);
    }

    #[test]
    fn modular_inverse() {
        let m = BigUint::from(997u32);
        for a in 1u32..50 {
            let inv = inv_mod(&BigUint::from(a), &m).unwrap();
            assert!(((BigUint::from(a) * inv) % &m).is_one());
        }
    }
}
