//! Exact rationals and p-adic valuations of rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::prime::PrimeP;
use crate::error::{Error, Result};

/// Arbitrary-precision rational. `BigRational` keeps gcd(|num|, den) = 1 and
/// den >= 1 by construction, which is exactly the invariant we need.
pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_of(n: &BigInt) -> Rat {
    Rat::from_integer(n.clone())
}

/// Exponent of p in a nonzero integer.
pub fn vp_int(n: &BigInt, p: &PrimeP) -> Result<i64> {
    if n.is_zero() {
        return Err(Error::ValuationOfZero);
    }
    let pb = p.to_bigint();
    let mut n = n.clone();
    let mut v = 0i64;
    loop {
        let (q, r) = num_integer::Integer::div_rem(&n, &pb);
        if !r.is_zero() {
            return Ok(v);
        }
        n = q;
        v += 1;
    }
}

/// Exponent of p in a nonzero rational: vp(num) - vp(den).
/// Additive on products; errors on zero.
pub fn vp_rat(q: &Rat, p: &PrimeP) -> Result<i64> {
    if q.is_zero() {
        return Err(Error::ValuationOfZero);
    }
    let vn = if q.numer().is_zero() {
        0
    } else {
        vp_int(q.numer(), p)?
    };
    let vd = vp_int(q.denom(), p)?;
    Ok(vn - vd)
}

/// True iff q is the square of a rational.
pub fn is_square_rat(q: &Rat) -> bool {
    if q.is_negative() {
        return false;
    }
    if q.is_zero() {
        return true;
    }
    let n = q.numer().magnitude();
    let d = q.denom().magnitude();
    let sn = n.sqrt();
    let sd = d.sqrt();
    &sn * &sn == *n && &sd * &sd == *d
}

/// True iff n is a perfect square (n >= 0 required to succeed).
pub fn is_square_int(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let s = n.magnitude().sqrt();
    &s * &s == *n.magnitude()
}

/// Natural log of |n| for a nonzero big integer, stable for any size.
pub fn ln_abs_big(n: &BigInt) -> f64 {
    debug_assert!(!n.is_zero());
    let mag = n.magnitude();
    let bits = mag.bits();
    if bits <= 1000 {
        return num_traits::ToPrimitive::to_f64(mag).expect("fits f64").ln();
    }
    let shift = bits - 64;
    let top: num_bigint::BigUint = mag >> shift;
    let top = num_traits::ToPrimitive::to_f64(&top).expect("64 bits");
    top.ln() + (shift as f64) * std::f64::consts::LN_2
}

/// Natural log of |q| for a nonzero rational.
pub fn ln_abs_rat(q: &Rat) -> f64 {
    ln_abs_big(q.numer()) - ln_abs_big(q.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u64) -> PrimeP {
        PrimeP::from_u64(n).unwrap()
    }

    #[test]
    fn vp_examples() {
        // 12 = 2^2 * 3
        assert_eq!(vp_rat(&(rat(12) / rat(5)), &p(2)).unwrap(), 2);
        assert_eq!(vp_rat(&rat(1), &p(7)).unwrap(), 0);
        assert_eq!(vp_rat(&(rat(50) / rat(49)), &p(7)).unwrap(), -2);
        assert_eq!(vp_rat(&rat(0), &p(2)), Err(Error::ValuationOfZero));
    }

    #[test]
    fn vp_additive_on_products() {
        let p2 = p(2);
        let xs = [rat(12) / rat(5), rat(-7) / rat(8), rat(3), rat(1) / rat(6)];
        for a in &xs {
            for b in &xs {
                assert_eq!(
                    vp_rat(&(a * b), &p2).unwrap(),
                    vp_rat(a, &p2).unwrap() + vp_rat(b, &p2).unwrap()
                );
            }
        }
    }

    #[test]
    fn square_detection() {
        assert!(is_square_rat(&(rat(49) / rat(64))));
        assert!(!is_square_rat(&(rat(50) / rat(64))));
        assert!(!is_square_rat(&rat(-4)));
    }

    #[test]
    fn big_logs() {
        let n = BigInt::from(10).pow(500);
        let l = ln_abs_big(&n);
        assert!((l - 500.0 * std::f64::consts::LN_10).abs() < 1e-6 * l);
    }
}
