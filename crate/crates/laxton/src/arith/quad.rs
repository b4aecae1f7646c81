//! Elements of the quadratic etale algebra attached to a recurrence:
//! either x + y*sqrt(m) in the field Q(sqrt(m)) with m squarefree, or an
//! ordered pair in Q x Q when the discriminant is a perfect square.

use num_traits::{One, Signed, Zero};
use std::fmt;

use super::prime::squarefree_decomp;
use super::rat::{is_square_rat, ln_abs_rat, Rat};
use crate::error::{Error, Result};
use num_bigint::BigInt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuadElem {
    /// x + y*sqrt(m), m squarefree and not 0 or 1.
    Quad { x: Rat, y: Rat, m: BigInt },
    /// Element (a, b) of the split algebra Q x Q.
    Split { a: Rat, b: Rat },
}

impl QuadElem {
    pub fn quadratic(x: Rat, y: Rat, m: BigInt) -> Result<Self> {
        if m.is_zero() || m.is_one() {
            return Err(Error::NotSquarefree(m));
        }
        let (sf, _) = squarefree_decomp(&m);
        if sf != m {
            return Err(Error::NotSquarefree(m));
        }
        Ok(QuadElem::Quad { x, y, m })
    }

    pub fn split(a: Rat, b: Rat) -> Self {
        QuadElem::Split { a, b }
    }

    pub fn rational_in(q: Rat, m: &BigInt) -> Self {
        if m.is_one() {
            QuadElem::Split { a: q.clone(), b: q }
        } else {
            QuadElem::Quad {
                x: q,
                y: Rat::zero(),
                m: m.clone(),
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            QuadElem::Quad { x, y, .. } => x.is_zero() && y.is_zero(),
            QuadElem::Split { a, b } => a.is_zero() && b.is_zero(),
        }
    }

    /// Galois conjugate: sqrt(m) -> -sqrt(m), or coordinate swap.
    pub fn conj(&self) -> Self {
        match self {
            QuadElem::Quad { x, y, m } => QuadElem::Quad {
                x: x.clone(),
                y: -y.clone(),
                m: m.clone(),
            },
            QuadElem::Split { a, b } => QuadElem::Split {
                a: b.clone(),
                b: a.clone(),
            },
        }
    }

    /// Multiplicative norm to Q: self * conj(self).
    pub fn norm(&self) -> Rat {
        match self {
            QuadElem::Quad { x, y, m } => x * x - y * y * Rat::from_integer(m.clone()),
            QuadElem::Split { a, b } => a * b,
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (QuadElem::Quad { x, y, m }, QuadElem::Quad { x: u, y: v, m: n }) => {
                if m != n {
                    return Err(Error::ContextMismatch);
                }
                let mr = Rat::from_integer(m.clone());
                Ok(QuadElem::Quad {
                    x: x * u + y * v * &mr,
                    y: x * v + y * u,
                    m: m.clone(),
                })
            }
            (QuadElem::Split { a, b }, QuadElem::Split { a: c, b: d }) => Ok(QuadElem::Split {
                a: a * c,
                b: b * d,
            }),
            _ => Err(Error::ContextMismatch),
        }
    }

    pub fn inv(&self) -> Result<Self> {
        match self {
            QuadElem::Quad { .. } => {
                let n = self.norm();
                if n.is_zero() {
                    return Err(Error::NotInvertible);
                }
                let c = self.conj();
                Ok(c.scale(&n.recip()))
            }
            QuadElem::Split { a, b } => {
                if a.is_zero() || b.is_zero() {
                    return Err(Error::NotInvertible);
                }
                Ok(QuadElem::Split {
                    a: a.recip(),
                    b: b.recip(),
                })
            }
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.inv()?)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        match self {
            QuadElem::Quad { x, y, m } => QuadElem::Quad {
                x: x * c,
                y: y * c,
                m: m.clone(),
            },
            QuadElem::Split { a, b } => QuadElem::Split { a: a * c, b: b * c },
        }
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut exp = e.unsigned_abs();
        let mut acc = match &base {
            QuadElem::Quad { m, .. } => QuadElem::rational_in(Rat::one(), m),
            QuadElem::Split { .. } => QuadElem::Split {
                a: Rat::one(),
                b: Rat::one(),
            },
        };
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

    /// Some(q) when the element lies in the rational subalgebra
    /// (y = 0, resp. equal coordinates).
    pub fn as_rational(&self) -> Option<Rat> {
        match self {
            QuadElem::Quad { x, y, .. } if y.is_zero() => Some(x.clone()),
            QuadElem::Split { a, b } if a == b => Some(a.clone()),
            _ => None,
        }
    }

    /// ln|self| under the real embedding sending sqrt(m) to the positive
    /// root. Requires m > 0 (or the split form). Cancellation-safe: when the
    /// two terms have opposite signs we rationalize through the norm.
    pub fn ln_abs(&self) -> Result<f64> {
        if self.is_zero() {
            return Err(Error::ValuationOfZero);
        }
        match self {
            QuadElem::Split { a, b: _ } => {
                // Principal coordinate (theta_1 choice puts it first).
                if a.is_zero() {
                    return Err(Error::ValuationOfZero);
                }
                Ok(ln_abs_rat(a))
            }
            QuadElem::Quad { x, y, m } => {
                assert!(m.is_positive(), "real embedding needs m > 0");
                if y.is_zero() {
                    return Ok(ln_abs_rat(x));
                }
                if x.is_zero() {
                    return Ok(ln_abs_rat(y) + 0.5 * super::rat::ln_abs_big(m));
                }
                let half_ln_m = 0.5 * super::rat::ln_abs_big(m);
                if x.is_positive() == y.is_positive() {
                    // |x| + |y| sqrt(m): no cancellation.
                    let lx = ln_abs_rat(x);
                    let lt = ln_abs_rat(y) + half_ln_m - lx;
                    Ok(lx + ln_1p_exp(lt))
                } else {
                    // Opposite signs: |x + y sqrt m| = |norm| / |x - y sqrt m|
                    // and the denominator has matching signs.
                    let n = self.norm();
                    let c = self.conj();
                    Ok(ln_abs_rat(&n) - c.ln_abs()?)
                }
            }
        }
    }
}

/// ln(1 + e^t), stable for large |t|.
fn ln_1p_exp(t: f64) -> f64 {
    if t > 40.0 {
        t
    } else {
        t.exp().ln_1p()
    }
}

impl fmt::Display for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuadElem::Quad { x, y, m } => write!(f, "{} + {}*sqrt({})", x, y, m),
            QuadElem::Split { a, b } => write!(f, "({}, {})", a, b),
        }
    }
}

/// True iff q = c^2 for some rational c (used for norm obstructions).
pub fn norm_is_square(q: &Rat) -> bool {
    is_square_rat(q)
}
