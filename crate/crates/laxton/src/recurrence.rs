//! The recurrence datatype and the multiplicative group of seed vectors:
//! term evaluation by exact matrix powering, Lucas sequences, the norm form,
//! the induced product, and Laxton's original product as a differential
//! cross-check.

use num_bigint::{BigInt, BigUint, ToBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use std::fmt;

use crate::arith::prime::PrimeP;
use crate::arith::quad::QuadElem;
use crate::arith::rat::{rat_of, vp_rat, Rat};
use crate::arith::{splitting_of_disc, squarefree_decomp, SplittingType};
use crate::error::{Error, Result};

/// Coefficients (P, Q) of f(t) = t^2 - P t + Q, driving
/// w_{n+2} = P w_{n+1} - Q w_n. Q != 0 and D = P^2 - 4Q != 0.
///
/// The squarefree decomposition D = m a^2 is fixed at construction; the
/// local decomposition D = p^s D0 is computed per prime on demand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecurrenceParams {
    p: BigInt,
    q: BigInt,
    d: BigInt,
    m: BigInt,
    a: BigUint,
}

impl RecurrenceParams {
    pub fn new(p: BigInt, q: BigInt) -> Result<Self> {
        if q.is_zero() {
            return Err(Error::ZeroQ);
        }
        let d = &p * &p - BigInt::from(4) * &q;
        if d.is_zero() {
            return Err(Error::DegenerateDiscriminant);
        }
        let (m, a) = squarefree_decomp(&d);
        Ok(RecurrenceParams { p, q, d, m, a })
    }

    pub fn from_i64(p: i64, q: i64) -> Result<Self> {
        Self::new(BigInt::from(p), BigInt::from(q))
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    /// Discriminant D = P^2 - 4Q.
    pub fn disc(&self) -> &BigInt {
        &self.d
    }

    /// Squarefree part m of D = m a^2 (m carries the sign of D).
    pub fn m(&self) -> &BigInt {
        &self.m
    }

    /// The a of D = m a^2, a > 0.
    pub fn a(&self) -> &BigUint {
        &self.a
    }

    /// f irreducible over Q iff D is not a perfect square iff m != 1.
    pub fn is_irreducible(&self) -> bool {
        !self.m.is_one()
    }

    /// D = p^s D0 with p not dividing D0.
    pub fn local_decomp(&self, prime: &PrimeP) -> (u32, BigInt) {
        let pb = prime.to_bigint();
        let mut d0 = self.d.clone();
        let mut s = 0u32;
        loop {
            let (q, r) = d0.div_rem(&pb);
            if !r.is_zero() {
                return (s, d0);
            }
            d0 = q;
            s += 1;
        }
    }

    pub fn splitting_type(&self, prime: &PrimeP) -> Result<SplittingType> {
        splitting_of_disc(&self.d, prime)
    }

    /// The fixed root theta_1 = (P + sqrt(D))/2 as a quadratic-algebra
    /// element: sqrt(D) is the positive real root for D > 0 and the root
    /// with positive imaginary part for D < 0. In the split algebra this is
    /// the image of t, the pair (theta_1, theta_2) with theta_1 the larger
    /// rational root.
    pub fn theta1(&self) -> QuadElem {
        let half = Rat::new(BigInt::one(), BigInt::from(2));
        let p_half = rat_of(&self.p) * &half;
        if self.is_irreducible() {
            let y = rat_of(&self.a.to_bigint().unwrap()) * &half;
            QuadElem::quadratic(p_half, y, self.m.clone()).expect("m squarefree")
        } else {
            let a = rat_of(&self.a.to_bigint().unwrap());
            QuadElem::split(&p_half + &a * &half, &p_half - &a * &half)
        }
    }

    /// theta_2 = conj(theta_1).
    pub fn theta2(&self) -> QuadElem {
        self.theta1().conj()
    }

    /// Rational roots (theta_1, theta_2), theta_1 > theta_2, when f is
    /// reducible over Q. D = a^2 forces a ≡ P (mod 2), so both are integers.
    pub fn rational_roots(&self) -> Option<(BigInt, BigInt)> {
        if self.is_irreducible() {
            return None;
        }
        let a = self.a.to_bigint().unwrap();
        let t1 = (&self.p + &a) / BigInt::from(2);
        let t2 = (&self.p - &a) / BigInt::from(2);
        Some((t1, t2))
    }
}

impl fmt::Display for RecurrenceParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(P = {}, Q = {}, D = {})", self.p, self.q, self.d)
    }
}

/// The coefficient ring: Q, the p-localized integers Z_(p), or the prime
/// field F_p. The localized and finite contexts require p not dividing Q so
/// that Q stays a unit; that check happens where params meet the context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RingCtx {
    Rationals,
    Localized(PrimeP),
    PrimeField(PrimeP),
}

impl RingCtx {
    pub fn name(&self) -> &'static str {
        match self {
            RingCtx::Rationals => "Q",
            RingCtx::Localized(_) => "Z_(p)",
            RingCtx::PrimeField(_) => "F_p",
        }
    }

    pub fn prime(&self) -> Option<&PrimeP> {
        match self {
            RingCtx::Rationals => None,
            RingCtx::Localized(p) | RingCtx::PrimeField(p) => Some(p),
        }
    }

    /// Check the standing hypothesis p ∤ Q for this context.
    pub fn check_params(&self, params: &RecurrenceParams) -> Result<()> {
        if let Some(p) = self.prime() {
            if p.divides(params.q()) {
                return Err(Error::QNotUnit { p: p.get().clone() });
            }
        }
        Ok(())
    }

    fn from_rat(&self, r: Rat) -> Result<Scalar> {
        match self {
            RingCtx::Rationals => Ok(Scalar::Rat(r)),
            RingCtx::Localized(p) => {
                if !r.is_zero() && vp_rat(&r, p)? < 0 {
                    return Err(Error::NonIntegralScalar);
                }
                Ok(Scalar::Rat(r))
            }
            RingCtx::PrimeField(p) => {
                let pb = p.to_bigint();
                let den = r.denom().mod_floor(&pb);
                if den.is_zero() {
                    return Err(Error::NonIntegralScalar);
                }
                let dinv = crate::arith::prime::inv_mod(den.magnitude(), p.get())?;
                let num = r.numer().mod_floor(&pb).magnitude() * dinv % p.get();
                Ok(Scalar::Res(num))
            }
        }
    }

    pub fn from_int(&self, n: &BigInt) -> Scalar {
        match self {
            RingCtx::Rationals | RingCtx::Localized(_) => Scalar::Rat(rat_of(n)),
            RingCtx::PrimeField(p) => {
                Scalar::Res(n.mod_floor(&p.to_bigint()).magnitude().clone())
            }
        }
    }

    pub fn zero(&self) -> Scalar {
        self.from_int(&BigInt::zero())
    }

    pub fn one(&self) -> Scalar {
        self.from_int(&BigInt::one())
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (RingCtx::PrimeField(p), Scalar::Res(x), Scalar::Res(y)) => {
                Scalar::Res((x + y) % p.get())
            }
            (_, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x + y),
            _ => panic!("scalar/context mismatch"),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.add(a, &self.neg(b))
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match (self, a) {
            (RingCtx::PrimeField(p), Scalar::Res(x)) => {
                if x.is_zero() {
                    Scalar::Res(BigUint::zero())
                } else {
                    Scalar::Res(p.get() - x)
                }
            }
            (_, Scalar::Rat(x)) => Scalar::Rat(-x.clone()),
            _ => panic!("scalar/context mismatch"),
        }
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (RingCtx::PrimeField(p), Scalar::Res(x), Scalar::Res(y)) => {
                Scalar::Res((x * y) % p.get())
            }
            (_, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x * y),
            _ => panic!("scalar/context mismatch"),
        }
    }

    pub fn is_zero(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Rat(x) => x.is_zero(),
            Scalar::Res(x) => x.is_zero(),
        }
    }

    /// Unit test for this ring: nonzero over Q and F_p, p-adic unit over
    /// Z_(p).
    pub fn is_unit(&self, a: &Scalar) -> bool {
        match (self, a) {
            (RingCtx::Rationals, Scalar::Rat(x)) => !x.is_zero(),
            (RingCtx::Localized(p), Scalar::Rat(x)) => {
                !x.is_zero() && vp_rat(x, p).map(|v| v == 0).unwrap_or(false)
            }
            (RingCtx::PrimeField(_), Scalar::Res(x)) => !x.is_zero(),
            _ => panic!("scalar/context mismatch"),
        }
    }

    pub fn inv(&self, a: &Scalar) -> Result<Scalar> {
        if !self.is_unit(a) {
            return Err(Error::NotInvertible);
        }
        match (self, a) {
            (RingCtx::PrimeField(p), Scalar::Res(x)) => {
                Ok(Scalar::Res(crate::arith::prime::inv_mod(x, p.get())?))
            }
            (_, Scalar::Rat(x)) => Ok(Scalar::Rat(x.recip())),
            _ => panic!("scalar/context mismatch"),
        }
    }
}

/// A ring scalar: an exact rational (Q and Z_(p) contexts) or a canonical
/// residue in [0, p) (F_p context).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scalar {
    Rat(Rat),
    Res(BigUint),
}

impl Scalar {
    pub fn as_rat(&self) -> Option<&Rat> {
        match self {
            Scalar::Rat(r) => Some(r),
            Scalar::Res(_) => None,
        }
    }

    pub fn as_res(&self) -> Option<&BigUint> {
        match self {
            Scalar::Res(r) => Some(r),
            Scalar::Rat(_) => None,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}", r)
                }
            }
            Scalar::Res(r) => write!(f, "{}", r),
        }
    }
}

/// A seed vector (w1, w0) of a recurrence sequence over a ring context.
/// Membership in the unit group V_f(R)^x means the norm form is a unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassVector {
    pub w1: Scalar,
    pub w0: Scalar,
    params: RecurrenceParams,
    ctx: RingCtx,
}

/// A finite window of a sequence, with its base index. Every consecutive
/// triple satisfies the recurrence (tested invariant).
#[derive(Debug, Clone)]
pub struct SeqWindow {
    pub base_index: i64,
    pub terms: Vec<Scalar>,
}

impl ClassVector {
    pub fn new(w1: Scalar, w0: Scalar, params: RecurrenceParams, ctx: RingCtx) -> Result<Self> {
        ctx.check_params(&params)?;
        // Re-canonicalize via the context so residues are always in [0, p)
        // and localized scalars are checked p-integral.
        let w1 = match w1 {
            Scalar::Rat(r) => ctx.from_rat(r)?,
            Scalar::Res(r) => match &ctx {
                RingCtx::PrimeField(p) => Scalar::Res(r % p.get()),
                _ => return Err(Error::ContextMismatch),
            },
        };
        let w0 = match w0 {
            Scalar::Rat(r) => ctx.from_rat(r)?,
            Scalar::Res(r) => match &ctx {
                RingCtx::PrimeField(p) => Scalar::Res(r % p.get()),
                _ => return Err(Error::ContextMismatch),
            },
        };
        Ok(ClassVector { w1, w0, params, ctx })
    }

    pub fn from_rats(w1: Rat, w0: Rat, params: RecurrenceParams, ctx: RingCtx) -> Result<Self> {
        ctx.check_params(&params)?;
        Ok(ClassVector {
            w1: ctx.from_rat(w1)?,
            w0: ctx.from_rat(w0)?,
            params,
            ctx,
        })
    }

    pub fn from_ints(w1: i64, w0: i64, params: &RecurrenceParams, ctx: &RingCtx) -> Result<Self> {
        ctx.check_params(params)?;
        Ok(ClassVector {
            w1: ctx.from_int(&BigInt::from(w1)),
            w0: ctx.from_int(&BigInt::from(w0)),
            params: params.clone(),
            ctx: ctx.clone(),
        })
    }

    pub fn from_bigints(
        w1: &BigInt,
        w0: &BigInt,
        params: &RecurrenceParams,
        ctx: &RingCtx,
    ) -> Result<Self> {
        ctx.check_params(params)?;
        Ok(ClassVector {
            w1: ctx.from_int(w1),
            w0: ctx.from_int(w0),
            params: params.clone(),
            ctx: ctx.clone(),
        })
    }

    pub fn params(&self) -> &RecurrenceParams {
        &self.params
    }

    pub fn ctx(&self) -> &RingCtx {
        &self.ctx
    }

    fn same_world(&self, other: &Self) -> Result<()> {
        if self.params != other.params || self.ctx != other.ctx {
            return Err(Error::ContextMismatch);
        }
        Ok(())
    }

    /// The norm form Λ(w1, w0) = w1^2 - P w0 w1 + Q w0^2. Multiplicative
    /// under the group law.
    pub fn lambda(&self) -> Scalar {
        let c = &self.ctx;
        let pp = c.from_int(self.params.p());
        let qq = c.from_int(self.params.q());
        let t1 = c.mul(&self.w1, &self.w1);
        let t2 = c.mul(&pp, &c.mul(&self.w0, &self.w1));
        let t3 = c.mul(&qq, &c.mul(&self.w0, &self.w0));
        c.add(&c.sub(&t1, &t2), &t3)
    }

    /// Membership in V_f(R)^x: Λ is a unit of the context ring.
    pub fn is_unit_class(&self) -> bool {
        self.ctx.is_unit(&self.lambda())
    }

    /// The induced product from R[t]/(f(t)):
    /// (a1 b1 - Q a0 b0, a0 b1 + a1 b0 - P a0 b0).
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_world(other)?;
        let c = &self.ctx;
        let pp = c.from_int(self.params.p());
        let qq = c.from_int(self.params.q());
        let a1b1 = c.mul(&self.w1, &other.w1);
        let a0b0 = c.mul(&self.w0, &other.w0);
        let u1 = c.sub(&a1b1, &c.mul(&qq, &a0b0));
        let cross = c.add(&c.mul(&self.w0, &other.w1), &c.mul(&self.w1, &other.w0));
        let u0 = c.sub(&cross, &c.mul(&pp, &a0b0));
        Ok(ClassVector {
            w1: u1,
            w0: u0,
            params: self.params.clone(),
            ctx: self.ctx.clone(),
        })
    }

    /// Laxton's product computed from his closed forms
    /// u1 = w1 v1 - Q v0 w0, u0 = w0 v1 + w1 v0 - P v0 w0.
    /// Must agree with `mul` exactly on every input (differential check).
    pub fn laxton_mul(&self, other: &Self) -> Result<Self> {
        self.same_world(other)?;
        let c = &self.ctx;
        let (w1, w0) = (&self.w1, &self.w0);
        let (v1, v0) = (&other.w1, &other.w0);
        let pp = c.from_int(self.params.p());
        let qq = c.from_int(self.params.q());
        let v0w0 = c.mul(v0, w0);
        let u1 = c.sub(&c.mul(w1, v1), &c.mul(&qq, &v0w0));
        let u0 = c.sub(
            &c.add(&c.mul(w0, v1), &c.mul(w1, v0)),
            &c.mul(&pp, &v0w0),
        );
        Ok(ClassVector {
            w1: u1,
            w0: u0,
            params: self.params.clone(),
            ctx: self.ctx.clone(),
        })
    }

    /// Inverse: Λ^{-1} (w1 - P w0, -w0). Errors when Λ is not a unit.
    pub fn inv(&self) -> Result<Self> {
        let c = &self.ctx;
        let lam_inv = c.inv(&self.lambda())?;
        let pp = c.from_int(self.params.p());
        let a = c.sub(&self.w1, &c.mul(&pp, &self.w0));
        Ok(ClassVector {
            w1: c.mul(&lam_inv, &a),
            w0: c.mul(&lam_inv, &c.neg(&self.w0)),
            params: self.params.clone(),
            ctx: self.ctx.clone(),
        })
    }

    pub fn identity(params: &RecurrenceParams, ctx: &RingCtx) -> Result<Self> {
        Self::from_ints(1, 0, params, ctx)
    }

    /// Group power by square-and-multiply (negative exponents through inv).
    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut exp = e.unsigned_abs();
        let mut acc = Self::identity(&self.params, &self.ctx)?;
        let mut sq = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&sq)?;
            }
            sq = sq.mul(&sq)?;
            exp >>= 1;
        }
        Ok(acc)
    }

    /// Scale both coordinates by a ring element.
    pub fn scale(&self, c: &Scalar) -> Self {
        ClassVector {
            w1: self.ctx.mul(&self.w1, c),
            w0: self.ctx.mul(&self.w0, c),
            params: self.params.clone(),
            ctx: self.ctx.clone(),
        }
    }

    /// Apply the companion-matrix action nu times: shifts the underlying
    /// sequence by nu. Equals multiplication by the nu-th power of (P, 1).
    pub fn shift(&self, nu: i64) -> Result<Self> {
        let (m11, m10, m01, m00) = companion_power(&self.params, &self.ctx, nu)?;
        let c = &self.ctx;
        Ok(ClassVector {
            w1: c.add(&c.mul(&m11, &self.w1), &c.mul(&m10, &self.w0)),
            w0: c.add(&c.mul(&m01, &self.w1), &c.mul(&m00, &self.w0)),
            params: self.params.clone(),
            ctx: self.ctx.clone(),
        })
    }

    /// Term w_n of the sequence seeded by this vector, any n in Z.
    pub fn term(&self, n: i64) -> Result<Scalar> {
        Ok(self.shift(n - 1)?.w1)
    }

    /// Terms w_from ..= w_to as a window.
    pub fn window(&self, from: i64, to: i64) -> Result<SeqWindow> {
        assert!(from <= to);
        let mut shifted = self.shift(from)?;
        let mut terms = vec![shifted.w0.clone()];
        let c = &self.ctx;
        let pp = c.from_int(self.params.p());
        let qq = c.from_int(self.params.q());
        for _ in from..to {
            // step: (w1, w0) -> (P w1 - Q w0, w1)
            let next = c.sub(&c.mul(&pp, &shifted.w1), &c.mul(&qq, &shifted.w0));
            terms.push(shifted.w1.clone());
            shifted = ClassVector {
                w1: next,
                w0: shifted.w1,
                params: shifted.params,
                ctx: shifted.ctx,
            };
        }
        Ok(SeqWindow {
            base_index: from,
            terms,
        })
    }
}

impl fmt::Display for ClassVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.w1, self.w0)
    }
}

/// Powers of the companion matrix [[P, -Q], [1, 0]], returned row-major as
/// (m11, m10, m01, m00). Negative powers need Q to be a unit, which the
/// context guarantees.
fn companion_power(
    params: &RecurrenceParams,
    ctx: &RingCtx,
    nu: i64,
) -> Result<(Scalar, Scalar, Scalar, Scalar)> {
    let one = ctx.one();
    let zero = ctx.zero();
    if nu == 0 {
        return Ok((one, zero.clone(), zero, ctx.one()));
    }
    let pp = ctx.from_int(params.p());
    let qq = ctx.from_int(params.q());
    let base = if nu > 0 {
        (pp, ctx.neg(&qq), one.clone(), zero.clone())
    } else {
        // B^{-1} = Q^{-1} [[0, Q], [-1, P]].
        let qinv = ctx.inv(&qq).map_err(|_| Error::NotInvertible)?;
        (
            zero.clone(),
            one.clone(),
            ctx.neg(&qinv),
            ctx.mul(&pp, &qinv),
        )
    };
    let mut exp = nu.unsigned_abs();
    let mut acc = (one, zero.clone(), zero, ctx.one());
    let mut sq = base;
    let mat_mul = |a: &(Scalar, Scalar, Scalar, Scalar), b: &(Scalar, Scalar, Scalar, Scalar)| {
        (
            ctx.add(&ctx.mul(&a.0, &b.0), &ctx.mul(&a.1, &b.2)),
            ctx.add(&ctx.mul(&a.0, &b.1), &ctx.mul(&a.1, &b.3)),
            ctx.add(&ctx.mul(&a.2, &b.0), &ctx.mul(&a.3, &b.2)),
            ctx.add(&ctx.mul(&a.2, &b.1), &ctx.mul(&a.3, &b.3)),
        )
    };
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mat_mul(&acc, &sq);
        }
        sq = mat_mul(&sq, &sq);
        exp >>= 1;
    }
    Ok(acc)
}

/// The Lucas pair: F seeded (w1, w0) = (1, 0) and its companion L seeded
/// (P, 2). F is the identity of the group law.
pub fn lucas_pair(params: &RecurrenceParams, ctx: &RingCtx) -> Result<(ClassVector, ClassVector)> {
    let f = ClassVector::identity(params, ctx)?;
    let l = ClassVector::from_bigints(params.p(), &BigInt::from(2), params, ctx)?;
    Ok((f, l))
}

impl SeqWindow {
    /// Check every consecutive triple against the recurrence.
    pub fn satisfies(&self, params: &RecurrenceParams, ctx: &RingCtx) -> bool {
        let pp = ctx.from_int(params.p());
        let qq = ctx.from_int(params.q());
        self.terms.windows(3).all(|w| {
            let expect = ctx.sub(&ctx.mul(&pp, &w[1]), &ctx.mul(&qq, &w[0]));
            expect == w[2]
        })
    }

    pub fn get(&self, n: i64) -> Option<&Scalar> {
        let off = n.checked_sub(self.base_index)?;
        if off < 0 {
            return None;
        }
        self.terms.get(off.to_usize()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat::rat;

    fn fib() -> RecurrenceParams {
        RecurrenceParams::from_i64(1, -1).unwrap()
    }

    fn qv(w1: i64, w0: i64) -> ClassVector {
        ClassVector::from_ints(w1, w0, &fib(), &RingCtx::Rationals).unwrap()
    }

    #[test]
    fn params_invariants() {
        assert!(RecurrenceParams::from_i64(1, 0).is_err());
        assert!(RecurrenceParams::from_i64(2, 1).is_err()); // D = 0
        let p = RecurrenceParams::from_i64(2, -17).unwrap();
        assert_eq!(p.disc(), &BigInt::from(72));
        assert_eq!(p.m(), &BigInt::from(2));
        assert_eq!(p.a(), &BigUint::from(6u8));
        let (s, d0) = p.local_decomp(&PrimeP::from_u64(3).unwrap());
        assert_eq!((s, d0), (2, BigInt::from(8)));
    }

    #[test]
    fn term_examples() {
        let f = qv(1, 0);
        assert_eq!(f.term(10).unwrap(), Scalar::Rat(rat(55)));
        assert_eq!(f.term(0).unwrap(), f.w0);
        assert_eq!(f.term(-1).unwrap(), Scalar::Rat(rat(1)));
        assert_eq!(f.term(-6).unwrap(), Scalar::Rat(rat(-8)));
    }

    #[test]
    fn lucas_pair_seeds_and_terms() {
        let (f, l) = lucas_pair(&fib(), &RingCtx::Rationals).unwrap();
        assert_eq!((f.w1, f.w0), (Scalar::Rat(rat(1)), Scalar::Rat(rat(0))));
        assert_eq!((l.w1.clone(), l.w0.clone()), (Scalar::Rat(rat(1)), Scalar::Rat(rat(2))));
        // 2, 1, 3, 4, 7 ...
        assert_eq!(l.term(3).unwrap(), Scalar::Rat(rat(4)));
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(qv(0, 1).lambda(), Scalar::Rat(rat(-1))); // Λ(0,1) = Q
        assert_eq!(qv(1, 0).lambda(), Scalar::Rat(rat(1)));
        assert_eq!(qv(2, 1).lambda(), Scalar::Rat(rat(1)));
    }

    #[test]
    fn mul_inv_examples() {
        let prod = qv(2, 1).mul(&qv(1, 1)).unwrap();
        assert_eq!(prod, qv(3, 2));
        assert_eq!(qv(3, 2).mul(&qv(1, 0)).unwrap(), qv(3, 2));
        assert_eq!(qv(0, 1).mul(&qv(1, 1)).unwrap(), qv(1, 0));
        assert_eq!(qv(0, 1).inv().unwrap(), qv(1, 1));
        assert_eq!(qv(1, 0).inv().unwrap(), qv(1, 0));
    }

    #[test]
    fn inv_mod_3() {
        let ctx = RingCtx::PrimeField(PrimeP::from_u64(3).unwrap());
        let v = ClassVector::from_ints(1, 1, &fib(), &ctx).unwrap();
        let i = v.inv().unwrap();
        assert_eq!(
            (i.w1.as_res().unwrap().to_u64(), i.w0.as_res().unwrap().to_u64()),
            (Some(0), Some(1))
        );
    }

    #[test]
    fn shift_examples() {
        let v = qv(1, 1);
        assert_eq!(v.shift(0).unwrap(), v);
        assert_eq!(v.shift(1).unwrap(), qv(2, 1));
        assert_eq!(v.shift(5).unwrap().shift(-5).unwrap(), v);
        // Shift equals multiplication by the power of (P, 1).
        let p1 = qv(1, 1); // (P, 1) for P = 1
        assert_eq!(v.shift(3).unwrap(), v.mul(&p1.pow(3).unwrap()).unwrap());
    }

    #[test]
    fn laxton_equals_induced() {
        for (a1, a0, b1, b0) in [(2i64, 1i64, 1i64, 1i64), (3, -2, 5, 7), (0, 1, 0, 1)] {
            let a = qv(a1, a0);
            let b = qv(b1, b0);
            assert_eq!(a.laxton_mul(&b).unwrap(), a.mul(&b).unwrap());
        }
        let a = qv(2, 1);
        assert_eq!(a.laxton_mul(&qv(1, 0)).unwrap(), a);
    }

    #[test]
    fn lambda_shift_law() {
        // Λ(B^n v) = Q^n Λ(v)
        let v = qv(3, 2);
        let lam = v.lambda().as_rat().unwrap().clone();
        for n in -6i64..=6 {
            let shifted = v.shift(n).unwrap();
            // Q = -1 here, so Q^n alternates sign.
            let expect = if n % 2 == 0 { lam.clone() } else { -lam.clone() };
            assert_eq!(shifted.lambda().as_rat().unwrap(), &expect);
        }
    }

    #[test]
    fn window_satisfies_recurrence() {
        let v = qv(3, -4);
        let w = v.window(-5, 9).unwrap();
        assert!(w.satisfies(&fib(), &RingCtx::Rationals));
        assert_eq!(w.get(0), Some(&Scalar::Rat(rat(-4))));
        assert_eq!(w.get(1), Some(&Scalar::Rat(rat(3))));
    }

    #[test]
    fn localized_rejects_bad_inputs() {
        let p2 = PrimeP::from_u64(2).unwrap();
        let ctx = RingCtx::Localized(p2.clone());
        // 1/2 is not 2-integral.
        assert!(ClassVector::from_rats(
            Rat::new(BigInt::one(), BigInt::from(2)),
            rat(1),
            fib(),
            ctx.clone()
        )
        .is_err());
        // p | Q rejected.
        let params = RecurrenceParams::from_i64(1, -2).unwrap();
        assert_eq!(
            ClassVector::from_ints(1, 0, &params, &ctx),
            Err(Error::QNotUnit { p: p2.get().clone() })
        );
    }

    #[test]
    fn mismatched_contexts_error() {
        let a = qv(1, 1);
        let other = RecurrenceParams::from_i64(3, 1).unwrap();
        let b = ClassVector::from_ints(1, 1, &other, &RingCtx::Rationals).unwrap();
        assert_eq!(a.mul(&b), Err(Error::ContextMismatch));
    }
}
