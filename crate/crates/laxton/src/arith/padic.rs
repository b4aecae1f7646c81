//! Splitting behavior of primes in quadratic fields and exact valuations
//! above p, computed through Hensel-lifted square roots with precision that
//! doubles on demand.

use num_bigint::{BigInt, BigUint, ToBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::prime::{inv_mod, legendre, sqrt_mod, PrimeP};
use super::quad::QuadElem;
use super::rat::{is_square_int, vp_int, vp_rat, Rat};
use crate::error::{Error, Result};

/// How a prime behaves in the quadratic algebra attached to a recurrence.
/// `RationalField` marks the degenerate case where the discriminant is a
/// perfect square and the algebra is Q x Q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SplittingType {
    Inert,
    Split,
    Ramified,
    RationalField,
}

impl SplittingType {
    pub fn as_str(&self) -> &'static str {
        match self {
            SplittingType::Inert => "inert",
            SplittingType::Split => "split",
            SplittingType::Ramified => "ramified",
            SplittingType::RationalField => "rational",
        }
    }
}

impl std::fmt::Display for SplittingType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Behavior of p in Q(sqrt(m)), for squarefree m != 0, 1. Uses the field
/// discriminant: m itself when m ≡ 1 (mod 4), else 4m.
pub fn splitting_in_field(m: &BigInt, prime: &PrimeP) -> SplittingType {
    debug_assert!(!m.is_zero() && !m.is_one());
    if prime.is_two() {
        // disc = m when m ≡ 1 (mod 4): split iff m ≡ 1 (mod 8).
        let m8 = m.mod_floor(&BigInt::from(8));
        return match m8.to_i64() {
            Some(1) => SplittingType::Split,
            Some(5) => SplittingType::Inert,
            _ => SplittingType::Ramified,
        };
    }
    if prime.divides(m) {
        return SplittingType::Ramified;
    }
    match legendre(m, prime) {
        1 => SplittingType::Split,
        -1 => SplittingType::Inert,
        _ => unreachable!("p does not divide m"),
    }
}

/// Splitting type read off a discriminant d != 0: RationalField when d is a
/// perfect square, otherwise the behavior of p in Q(sqrt(m)) for d = m a^2.
pub fn splitting_of_disc(d: &BigInt, prime: &PrimeP) -> Result<SplittingType> {
    if d.is_zero() {
        return Err(Error::DegenerateDiscriminant);
    }
    if is_square_int(d) {
        return Ok(SplittingType::RationalField);
    }
    let (m, _) = super::prime::squarefree_decomp(d);
    Ok(splitting_in_field(&m, prime))
}

/// A Hensel-lifted square root: root^2 ≡ radicand (mod p^precision), with
/// v_p(radicand) = 0. Raising precision keeps the chosen branch, so any
/// valuation already returned never changes.
///
/// Branch convention: for odd p the base residue lies in [0, p/2]; for p = 2
/// (radicand ≡ 1 mod 8) the root is ≡ 1 (mod 4).
#[derive(Debug, Clone)]
pub struct PadicCtx {
    prime: PrimeP,
    precision: u32,
    root: BigUint,
    radicand: BigInt,
}

impl PadicCtx {
    /// Start a context at precision k (the crate uses k = 8 and doubles).
    /// Fails when radicand is not a unit square mod p (non-residue or
    /// v_p != 0).
    pub fn lift(radicand: &BigInt, prime: &PrimeP, precision: u32) -> Result<Self> {
        assert!(precision >= 1);
        if radicand.is_zero() || vp_int(radicand, prime)? != 0 {
            return Err(Error::Internal(format!(
                "padic lift wants a unit radicand, got {radicand} at p = {prime}"
            )));
        }
        let mut ctx = if prime.is_two() {
            let r8 = radicand.mod_floor(&BigInt::from(8));
            if r8 != BigInt::from(1) {
                return Err(Error::Internal(format!(
                    "no 2-adic square root of {radicand}"
                )));
            }
            PadicCtx {
                prime: prime.clone(),
                precision: 3,
                root: BigUint::one(),
                radicand: radicand.clone(),
            }
        } else {
            let pb = prime.to_bigint();
            let target = radicand.mod_floor(&pb).magnitude().clone();
            let r0 = sqrt_mod(&target, prime).ok_or_else(|| {
                Error::Internal(format!("{radicand} is a non-residue mod {prime}"))
            })?;
            let half = prime.get() >> 1;
            let r0 = if r0 <= half { r0 } else { prime.get() - r0 };
            PadicCtx {
                prime: prime.clone(),
                precision: 1,
                root: r0,
                radicand: radicand.clone(),
            }
        };
        while ctx.precision < precision {
            ctx.step_up()?;
        }
        debug_assert!(ctx.check());
        Ok(ctx)
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn root(&self) -> &BigUint {
        &self.root
    }

    pub fn modulus(&self) -> BigUint {
        self.prime.get().pow(self.precision)
    }

    /// New context at precision >= `target`, same branch.
    pub fn raised(&self, target: u32) -> Result<Self> {
        let mut ctx = self.clone();
        while ctx.precision < target {
            ctx.step_up()?;
        }
        debug_assert!(ctx.check());
        Ok(ctx)
    }

    fn check(&self) -> bool {
        let md = self.modulus().to_bigint().unwrap();
        let r = self.root.to_bigint().unwrap();
        (&r * &r - &self.radicand).mod_floor(&md).is_zero()
    }

    fn step_up(&mut self) -> Result<()> {
        if self.prime.is_two() {
            // From 2^k to 2^(k+1): keep r or add 2^(k-1); stays ≡ 1 mod 4.
            let k = self.precision;
            let next = BigUint::from(2u8).pow(k + 1);
            let r = self.root.to_bigint().unwrap();
            let ok = (&r * &r - &self.radicand)
                .mod_floor(&next.to_bigint().unwrap())
                .is_zero();
            if !ok {
                self.root += BigUint::from(2u8).pow(k - 1);
            }
            self.precision = k + 1;
        } else {
            // Newton doubling: r <- r - (r^2 - a) / (2r) mod p^(2k).
            let k2 = self.precision * 2;
            let md = self.prime.get().pow(k2);
            let mdi = md.to_bigint().unwrap();
            let r = self.root.to_bigint().unwrap();
            let num = (&r * &r - &self.radicand).mod_floor(&mdi);
            let two_r = (BigInt::from(2) * &r).mod_floor(&mdi).magnitude().clone();
            let inv = inv_mod(&two_r, &md)?;
            let corr = (num * inv.to_bigint().unwrap()).mod_floor(&mdi);
            let newr = (r - corr).mod_floor(&mdi);
            self.root = newr.magnitude().clone();
            self.precision = k2;
        }
        Ok(())
    }
}

/// Valuations of a nonzero element at the places above p, tagged by the
/// splitting of p. For Split, the order is (v_p1, v_p1_conj) where p1 is the
/// prime singled out by the lifted-root branch of sqrt(m). Normalization:
/// Ramified has v(p) = 2, the others v(p) = 1 per coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valuations {
    Split(i64, i64),
    Inert(i64),
    Ramified(i64),
    Rational(i64, i64),
}

impl Valuations {
    /// Sum weighted by residue degree: equals v_p(norm).
    pub fn norm_valuation(&self) -> i64 {
        match *self {
            Valuations::Split(a, b) => a + b,
            Valuations::Inert(v) => 2 * v,
            Valuations::Ramified(v) => v,
            Valuations::Rational(a, b) => a + b,
        }
    }

    /// The difference map v_p1 - v_p1_conj where defined (Split/Rational);
    /// zero for Inert/Ramified, where conjugation fixes the place.
    pub fn asymmetry(&self) -> i64 {
        match *self {
            Valuations::Split(a, b) | Valuations::Rational(a, b) => a - b,
            _ => 0,
        }
    }
}

/// Exact valuations of alpha != 0 at the places above p.
///
/// Precision is raised internally until every digit of the answer is
/// certain; raising precision never changes a previously returned value.
pub fn valuations_above(alpha: &QuadElem, prime: &PrimeP) -> Result<Valuations> {
    if alpha.is_zero() {
        return Err(Error::ValuationOfZero);
    }
    match alpha {
        QuadElem::Split { a, b } => {
            if a.is_zero() || b.is_zero() {
                return Err(Error::ValuationOfZero);
            }
            Ok(Valuations::Rational(
                vp_rat(a, prime)?,
                vp_rat(b, prime)?,
            ))
        }
        QuadElem::Quad { x, y, m } => match splitting_in_field(m, prime) {
            SplittingType::Inert => {
                let vn = vp_rat(&alpha.norm(), prime)?;
                debug_assert!(vn % 2 == 0, "inert norm valuation must be even");
                Ok(Valuations::Inert(vn / 2))
            }
            SplittingType::Ramified => {
                // v(p) = 2 and conjugation fixes the place, so
                // v(alpha) = v_p(norm) on the nose.
                Ok(Valuations::Ramified(vp_rat(&alpha.norm(), prime)?))
            }
            SplittingType::Split => {
                if y.is_zero() {
                    let v = vp_rat(x, prime)?;
                    return Ok(Valuations::Split(v, v));
                }
                if x.is_zero() {
                    let v = vp_rat(y, prime)?;
                    return Ok(Valuations::Split(v, v));
                }
                let vy = vp_rat(y, prime)?;
                let vn = vp_rat(&alpha.norm(), prime)?;
                // The lifted branch agrees with the true root mod p^k for
                // odd p, but only mod 2^(k-1) at p = 2.
                let slack: i64 = if prime.is_two() { 1 } else { 0 };
                let mut k = 8u32;
                loop {
                    let ctx = PadicCtx::lift(m, prime, k)?;
                    let r = Rat::from_integer(ctx.root().to_bigint().unwrap());
                    let plus = x + y * &r;
                    // x + y*root is exact to p-adic error >= vy + k - slack.
                    if !plus.is_zero() {
                        let v1 = vp_rat(&plus, prime)?;
                        if v1 < vy + k as i64 - slack {
                            let v2 = vn - v1;
                            return Ok(Valuations::Split(v1, v2));
                        }
                    }
                    k *= 2;
                    if k > 1 << 20 {
                        return Err(Error::Internal(
                            "split valuation did not stabilize".into(),
                        ));
                    }
                }
            }
            SplittingType::RationalField => unreachable!("m is never a square here"),
        },
    }
}
