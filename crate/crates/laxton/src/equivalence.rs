//! Equivalence of sequences up to unit scaling (~) and up to unit scaling
//! plus index shift (~*): canonical representatives, decision procedures,
//! class products, and the field-side maps used as verification oracles.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

use crate::arith::prime::{factor, PrimeP};
use crate::arith::quad::QuadElem;
use crate::arith::rat::{is_square_rat, rat_of, Rat};
use crate::arith::{valuations_above, splitting_in_field, SplittingType};
use crate::error::{Error, Result};
use crate::recurrence::{ClassVector, RecurrenceParams, RingCtx, Scalar};

/// A class of the unit-scaling quotient, held by its canonical
/// representative:
/// over Q (and Z_(p)) coprime integer coordinates with w1 > 0, or w1 = 0 and
/// w0 > 0; over F_p the first nonzero coordinate is scaled to 1.
///
/// Over Z_(p) the normal form only determines the class up to a rational
/// scalar; use [`decide_equiv`] for class equality there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GClass {
    rep: ClassVector,
}

impl GClass {
    pub fn rep(&self) -> &ClassVector {
        &self.rep
    }

    /// Coprime integer coordinates of the representative (Rat contexts).
    pub fn int_coords(&self) -> Option<(BigInt, BigInt)> {
        match (&self.rep.w1, &self.rep.w0) {
            (Scalar::Rat(a), Scalar::Rat(b)) if a.is_integer() && b.is_integer() => {
                Some((a.numer().clone(), b.numer().clone()))
            }
            _ => None,
        }
    }
}

impl fmt::Display for GClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.rep.w1, self.rep.w0)
    }
}

/// Scale a rational pair to coprime integers, sign-normalized so the first
/// nonzero entry is positive.
fn coprime_int_pair(a: &Rat, b: &Rat) -> (BigInt, BigInt) {
    assert!(!a.is_zero() || !b.is_zero());
    let l = a.denom().lcm(b.denom());
    let mut x = (a * rat_of(&l)).numer().clone();
    let mut y = (b * rat_of(&l)).numer().clone();
    let g = x.gcd(&y);
    if !g.is_zero() && !g.is_one() {
        x /= &g;
        y /= &g;
    }
    let flip = x.is_negative() || (x.is_zero() && y.is_negative());
    if flip {
        x = -x;
        y = -y;
    }
    (x, y)
}

/// Canonical representative of the unit-scaling class of v.
/// Constant on orbits: normalize(λ v) = normalize(v) for every unit λ
/// (over Z_(p), for every rational λ). Errors when v is not a unit class.
pub fn normalize(v: &ClassVector) -> Result<GClass> {
    if !v.is_unit_class() {
        return Err(Error::NotUnitClass);
    }
    let rep = match v.ctx() {
        RingCtx::Rationals | RingCtx::Localized(_) => {
            let (a, b) = match (&v.w1, &v.w0) {
                (Scalar::Rat(a), Scalar::Rat(b)) => (a, b),
                _ => return Err(Error::ContextMismatch),
            };
            let (x, y) = coprime_int_pair(a, b);
            ClassVector::from_bigints(&x, &y, v.params(), v.ctx())?
        }
        RingCtx::PrimeField(_) => {
            let c = v.ctx();
            let scale = if !c.is_zero(&v.w1) {
                c.inv(&v.w1)?
            } else {
                c.inv(&v.w0)?
            };
            v.scale(&scale)
        }
    };
    Ok(GClass { rep })
}

/// Is a = λ b for some unit λ of the context ring?
/// Over Q and F_p this coincides with equality of normal forms; over Z_(p)
/// the scalar must additionally be a p-adic unit.
pub fn decide_equiv(a: &ClassVector, b: &ClassVector) -> Result<bool> {
    match proportionality(a, b)? {
        Some(lambda) => Ok(a.ctx().is_unit(&lambda)),
        None => Ok(false),
    }
}

/// The scalar λ with a = λ b, when the vectors are proportional.
/// Errors on context mismatch or zero vectors.
pub fn proportionality(a: &ClassVector, b: &ClassVector) -> Result<Option<Scalar>> {
    if a.params() != b.params() || a.ctx() != b.ctx() {
        return Err(Error::ContextMismatch);
    }
    let c = a.ctx();
    let a_zero = c.is_zero(&a.w1) && c.is_zero(&a.w0);
    let b_zero = c.is_zero(&b.w1) && c.is_zero(&b.w0);
    if a_zero || b_zero {
        return Err(Error::NotUnitClass);
    }
    let cross1 = c.mul(&a.w1, &b.w0);
    let cross2 = c.mul(&a.w0, &b.w1);
    if cross1 != cross2 {
        return Ok(None);
    }
    let lambda = if !c.is_zero(&b.w1) {
        c.mul(&a.w1, &c.inv(&b.w1).map_err(|_| Error::NotInvertible)?)
    } else {
        c.mul(&a.w0, &c.inv(&b.w0).map_err(|_| Error::NotInvertible)?)
    };
    // Cross-products equal and one coordinate ratio fixed pins the other
    // unless b has a zero coordinate; check both explicitly.
    if a.w1 != c.mul(&lambda, &b.w1) || a.w0 != c.mul(&lambda, &b.w0) {
        return Ok(None);
    }
    Ok(Some(lambda))
}

/// Product of unit-scaling classes: normalize(rep(a) * rep(b)).
pub fn class_mul(a: &GClass, b: &GClass) -> Result<GClass> {
    normalize(&a.rep.mul(&b.rep)?)
}

/// Outcome of the shift-equivalence decision. `Equivalent` carries a shift
/// and scalar with a = λ B^ν b, verified exactly before being returned.
#[derive(Debug, Clone, PartialEq)]
pub enum StarDecision {
    Equivalent { nu: i64, lambda: Scalar },
    NotEquivalent(StarObstruction),
}

impl StarDecision {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, StarDecision::Equivalent { .. })
    }
}

/// Why two classes are provably inequivalent under ~*.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StarObstruction {
    /// Λ(a)/Λ(b) is not of the form λ^2 Q^ν.
    NormForm,
    /// The valuation equations at a split prime of Q force a non-integral ν.
    Valuation,
    /// The complete candidate shift set was checked and none matches.
    ShiftExhausted,
}

/// Order of θ1/θ2 as a root of unity, when it is one. The trace
/// (P^2 - 2Q)/Q pins it: -2, -1, 0, 1 give orders 2, 3, 4, 6.
fn theta_ratio_torsion(params: &RecurrenceParams) -> Option<u32> {
    let p2 = params.p() * params.p();
    let two_q = BigInt::from(2) * params.q();
    let num = &p2 - &two_q;
    let (tr, rem) = num.div_rem(params.q());
    if !rem.is_zero() {
        return None;
    }
    match i64::try_from(&tr).ok()? {
        -2 => Some(2),
        -1 => Some(3),
        0 => Some(4),
        1 => Some(6),
        _ => None,
    }
}

/// The image w1 - w0 θ1 of a seed vector in the quadratic algebra
/// (unnormalized). Rat-scalar contexts only.
pub fn psi_image(v: &ClassVector) -> Result<QuadElem> {
    let (w1, w0) = match (&v.w1, &v.w0) {
        (Scalar::Rat(a), Scalar::Rat(b)) => (a, b),
        _ => {
            return Err(Error::WrongContext {
                expected: "Q or Z_(p)",
                got: "F_p",
            })
        }
    };
    let params = v.params();
    let half = Rat::new(BigInt::one(), BigInt::from(2));
    if params.is_irreducible() {
        let x = w1 - w0 * rat_of(params.p()) * &half;
        let y = -w0 * rat_of(&BigInt::from(params.a().clone())) * &half;
        QuadElem::quadratic(x, y, params.m().clone())
    } else {
        let (t1, t2) = params.rational_roots().expect("reducible");
        Ok(QuadElem::split(w1 - w0 * rat_of(&t1), w1 - w0 * rat_of(&t2)))
    }
}

/// Ψ: the class of w1 - w0 θ1 modulo Q^x, as a normalized algebra element
/// (coprime integer coordinates, leading sign positive). For reducible f
/// the image is the normalized pair (w1 - w0 θ1, w1 - w0 θ2); its coordinate
/// ratio is the scalar the structure theory uses.
pub fn psi_map(a: &GClass) -> Result<QuadElem> {
    let raw = psi_image(a.rep())?;
    Ok(normalize_mod_rational(&raw))
}

/// Scale an algebra element by a rational so the coordinates become coprime
/// integers with positive leading entry. This is the mod-Q^x normal form.
pub fn normalize_mod_rational(e: &QuadElem) -> QuadElem {
    match e {
        QuadElem::Quad { x, y, m } => {
            let (u, v) = coprime_int_pair(x, y);
            QuadElem::Quad {
                x: rat_of(&u),
                y: rat_of(&v),
                m: m.clone(),
            }
        }
        QuadElem::Split { a, b } => {
            let (u, v) = coprime_int_pair(a, b);
            QuadElem::Split {
                a: rat_of(&u),
                b: rat_of(&v),
            }
        }
    }
}

/// Decide a ~* b: is a = λ B^ν b for a unit λ and a shift ν?
///
/// Over F_p the B-orbit is finite and scanned directly. Over Q the decision
/// runs through the algebra image γ = ψ(a)/ψ(b):
/// - θ1/θ2 a root of unity of order u: every solution is congruent to one
///   of ν = 0..2u-1, each checked exactly;
/// - D > 0 (distinct absolute values): the real embedding pins a single
///   candidate via logarithms, swept ±2 and checked exactly;
/// - D < 0: some prime ℓ | Q splits with an asymmetric θ1-valuation, which
///   pins the unique candidate; a non-integral solution is a proof of
///   inequivalence.
///
/// Every returned `Equivalent` was verified by exact proportionality, so
/// floating-point only ever proposes candidates.
pub fn decide_star_equiv(a: &ClassVector, b: &ClassVector) -> Result<StarDecision> {
    if a.params() != b.params() || a.ctx() != b.ctx() {
        return Err(Error::ContextMismatch);
    }
    if !a.is_unit_class() || !b.is_unit_class() {
        return Err(Error::NotUnitClass);
    }
    match a.ctx() {
        RingCtx::PrimeField(prime) => decide_star_fp(a, b, prime),
        RingCtx::Rationals => decide_star_rational(a, b),
        RingCtx::Localized(_) => Err(Error::WrongContext {
            expected: "Q or F_p",
            got: "Z_(p)",
        }),
    }
}

fn decide_star_fp(a: &ClassVector, b: &ClassVector, prime: &PrimeP) -> Result<StarDecision> {
    // The B-orbit of a class is finite with length dividing |G_{F_p}|;
    // p + 2 steps always close the cycle.
    let bound = prime
        .to_u64()
        .ok_or_else(|| Error::EnumerationTooLarge {
            what: "orbit scan prime",
            size: u128::MAX,
            limit: u64::MAX as u128,
        })?
        + 2;
    let mut c = b.clone();
    for j in 0..=bound {
        if let Some(lambda) = proportionality(a, &c)? {
            return Ok(StarDecision::Equivalent {
                nu: j as i64,
                lambda,
            });
        }
        c = c.shift(1)?;
        if j > 0 && proportionality(b, &c)?.is_some() {
            break; // orbit closed
        }
    }
    Ok(StarDecision::NotEquivalent(StarObstruction::ShiftExhausted))
}

fn verify_candidates(a: &ClassVector, b: &ClassVector, candidates: &[i64]) -> Result<Option<(i64, Scalar)>> {
    for &nu in candidates {
        let shifted = b.shift(nu)?;
        if let Some(lambda) = proportionality(a, &shifted)? {
            if a.ctx().is_unit(&lambda) {
                return Ok(Some((nu, lambda)));
            }
        }
    }
    Ok(None)
}

fn decide_star_rational(a: &ClassVector, b: &ClassVector) -> Result<StarDecision> {
    let params = a.params();
    // Norm obstruction: a = λ B^ν b forces Λ(a) = λ^2 Q^ν Λ(b), so
    // Λ(a)/Λ(b) must be a square or Q times a square.
    let la = a.lambda().as_rat().unwrap().clone();
    let lb = b.lambda().as_rat().unwrap().clone();
    let rho = la / lb;
    let q_rat = rat_of(params.q());
    if !is_square_rat(&rho) && !is_square_rat(&(&rho * &q_rat)) {
        return Ok(StarDecision::NotEquivalent(StarObstruction::NormForm));
    }

    if let Some(u) = torsion_window(params) {
        let candidates: Vec<i64> = (0..u as i64).collect();
        return match verify_candidates(a, b, &candidates)? {
            Some((nu, lambda)) => Ok(StarDecision::Equivalent { nu, lambda }),
            None => Ok(StarDecision::NotEquivalent(StarObstruction::ShiftExhausted)),
        };
    }

    if params.disc().is_positive() {
        decide_star_archimedean(a, b)
    } else {
        decide_star_nonarchimedean(a, b)
    }
}

/// Window of shifts covering all solutions when the root ratio has finite
/// order: solutions are periodic mod the order of θ1 in F^x/Q^x, which
/// divides 2u (irreducible) resp. 2 (reducible, ratio -1).
fn torsion_window(params: &RecurrenceParams) -> Option<u32> {
    if params.is_irreducible() {
        theta_ratio_torsion(params).map(|u| 2 * u)
    } else {
        let (t1, t2) = params.rational_roots().expect("reducible");
        // θ1/θ2 = ±1 only when the roots sum to zero (ratio -1); D != 0
        // rules out ratio 1.
        if t1 == -t2.clone() {
            Some(2)
        } else {
            None
        }
    }
}

fn decide_star_archimedean(a: &ClassVector, b: &ClassVector) -> Result<StarDecision> {
    // D > 0, |θ1| != |θ2|. From ψ(a) = λ θ2^ν ψ(b):
    // ln|γ/γ^σ| = -ν ln|θ1/θ2|.
    let params = a.params();
    let psi_a = psi_image(a)?;
    let psi_b = psi_image(b)?;
    let s_a = psi_a.ln_abs()? - psi_a.conj().ln_abs()?;
    let s_b = psi_b.ln_abs()? - psi_b.conj().ln_abs()?;
    let theta = params.theta1();
    let s_theta = theta.ln_abs()? - theta.conj().ln_abs()?;
    debug_assert!(s_theta.abs() > 1e-300, "torsion ratios handled earlier");
    let guess = (-(s_a - s_b) / s_theta).round() as i64;
    let candidates = [guess, guess - 1, guess + 1, guess - 2, guess + 2];
    match verify_candidates(a, b, &candidates)? {
        Some((nu, lambda)) => Ok(StarDecision::Equivalent { nu, lambda }),
        None => Ok(StarDecision::NotEquivalent(StarObstruction::ShiftExhausted)),
    }
}

fn decide_star_nonarchimedean(a: &ClassVector, b: &ClassVector) -> Result<StarDecision> {
    // D < 0 and θ1/θ2 of infinite order. Then some prime ℓ | Q splits in
    // Q(sqrt(m)) with v_l(θ1) != v_l^σ(θ1) (otherwise (θ1) would be
    // σ-stable, making θ1/θ2 a unit of absolute value 1, i.e. torsion).
    // At such ℓ, a = λ B^ν b forces
    //   V_l(γ) = -ν V_l(θ1),  V_l := v_l - v_{l^σ},
    // pinning the unique candidate.
    let params = a.params();
    let theta = params.theta1();
    let psi_a = psi_image(a)?;
    let psi_b = psi_image(b)?;
    for (ell, _) in factor(params.q().magnitude()) {
        let ell = PrimeP::new(ell).expect("factor returns primes");
        if splitting_in_field(params.m(), &ell) != SplittingType::Split {
            continue;
        }
        let w_theta = valuations_above(&theta, &ell)?.asymmetry();
        if w_theta == 0 {
            continue;
        }
        let w_gamma =
            valuations_above(&psi_a, &ell)?.asymmetry() - valuations_above(&psi_b, &ell)?.asymmetry();
        if w_gamma % w_theta != 0 {
            return Ok(StarDecision::NotEquivalent(StarObstruction::Valuation));
        }
        let nu = -(w_gamma / w_theta);
        return match verify_candidates(a, b, &[nu])? {
            Some((nu, lambda)) => Ok(StarDecision::Equivalent { nu, lambda }),
            None => Ok(StarDecision::NotEquivalent(StarObstruction::ShiftExhausted)),
        };
    }
    Err(Error::Internal(
        "imaginary quadratic with non-torsion root ratio must have a pinning prime".into(),
    ))
}

/// A ~*-class. Over F_p the representative is the lexicographically least
/// normalized vector in the finite B-orbit; over Q and Z_(p) it is just the
/// stored normalized representative (equality goes through
/// [`decide_star_equiv`], no canonical form is claimed).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GStarClass {
    orbit_rep: GClass,
}

impl GStarClass {
    pub fn new(v: &ClassVector) -> Result<Self> {
        let g = normalize(v)?;
        match v.ctx() {
            RingCtx::PrimeField(prime) => {
                let mut best = g.clone();
                let mut cur = g.rep.clone();
                let bound = prime.to_u64().unwrap_or(u64::MAX) + 2;
                for _ in 0..=bound {
                    cur = cur.shift(1)?;
                    let cand = normalize(&cur)?;
                    if cand == g {
                        break; // orbit closed
                    }
                    if lex_key(&cand) < lex_key(&best) {
                        best = cand;
                    }
                }
                Ok(GStarClass { orbit_rep: best })
            }
            _ => Ok(GStarClass { orbit_rep: g }),
        }
    }

    pub fn orbit_rep(&self) -> &GClass {
        &self.orbit_rep
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let prod = self.orbit_rep.rep().mul(other.orbit_rep.rep())?;
        GStarClass::new(&prod)
    }
}

fn lex_key(g: &GClass) -> (num_bigint::BigUint, num_bigint::BigUint) {
    match (&g.rep.w1, &g.rep.w0) {
        (Scalar::Res(a), Scalar::Res(b)) => (a.clone(), b.clone()),
        _ => unreachable!("lex keys are used over F_p only"),
    }
}
