//! Brute-force finite structure: full enumeration of the class groups over
//! F_p, the rank of apparition, abelian invariant factors, and the unit
//! quotient ((O_F/p^k)^x)/((Z/p^k)^x) that realizes the closed-form lemmas
//! as checkable data.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::arith::prime::{factor_u64, legendre, PrimeP};
use crate::error::{Error, Result};
use crate::recurrence::RecurrenceParams;

/// Largest prime we will densely enumerate a group table for.
const TABLE_LIMIT: u64 = 1_000_000;
/// Residue budget for the unit-quotient enumerator: p^(2k) <= this.
const UNIT_QUOTIENT_LIMIT: u128 = 100_000_000;

/// A point of P^1(F_p) in normalized coordinates: (1, w0) or (0, 1).
pub type FpPoint = (u64, u64);

fn powmod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = (acc as u128 * b as u128 % p as u128) as u64;
        }
        b = (b as u128 * b as u128 % p as u128) as u64;
        e >>= 1;
    }
    acc
}

fn inv_mod_p(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    powmod(a, p - 2, p)
}

/// Projective normalization in P^1(F_p): (1, w0/w1) or (0, 1).
pub fn normalize_point(w1: u64, w0: u64, p: u64) -> FpPoint {
    let (w1, w0) = (w1 % p, w0 % p);
    if w1 != 0 {
        (1, (w0 as u128 * inv_mod_p(w1, p) as u128 % p as u128) as u64)
    } else {
        assert!(w0 != 0, "(0,0) is not a projective point");
        (0, 1)
    }
}

/// Invariant factors of a direct sum, given invariant factors (or any
/// cyclic decompositions) of the summands.
pub fn direct_sum_invariants(parts: &[Vec<u64>]) -> Vec<u64> {
    let mut partitions: HashMap<u64, Vec<u32>> = HashMap::new();
    for list in parts {
        for &d in list {
            for (q, e) in factor_u64(d) {
                partitions.entry(q).or_default().push(e);
            }
        }
    }
    let mut primes: Vec<(u64, Vec<u32>)> = partitions.into_iter().collect();
    primes.sort();
    for (_, v) in &mut primes {
        v.sort_unstable_by(|a, b| b.cmp(a));
    }
    let k = primes.iter().map(|(_, v)| v.len()).max().unwrap_or(0);
    let mut chain = vec![1u64; k];
    for (q, v) in &primes {
        for (j, e) in v.iter().enumerate() {
            chain[j] *= q.pow(*e);
        }
    }
    chain.reverse();
    chain.retain(|&d| d > 1);
    chain
}

/// Reduced parameters for direct mod-p arithmetic.
#[derive(Debug, Clone, Copy)]
struct FpParams {
    p: u64,
    pp: u64,
    qq: u64,
}

impl FpParams {
    fn new(params: &RecurrenceParams, prime: &PrimeP) -> Result<Self> {
        if prime.divides(params.q()) {
            return Err(Error::QNotUnit {
                p: prime.get().clone(),
            });
        }
        let p = prime.to_u64().ok_or(Error::EnumerationTooLarge {
            what: "prime",
            size: u128::MAX,
            limit: TABLE_LIMIT as u128,
        })?;
        let pb = BigInt::from(p);
        let pp = params.p().mod_floor(&pb).to_u64().unwrap();
        let qq = params.q().mod_floor(&pb).to_u64().unwrap();
        Ok(FpParams { p, pp, qq })
    }

    fn lambda(&self, pt: FpPoint) -> u64 {
        // w1^2 - P w0 w1 + Q w0^2 mod p
        let p = self.p as u128;
        let (w1, w0) = (pt.0 as u128, pt.1 as u128);
        let t1 = w1 * w1 % p;
        let t2 = self.pp as u128 * w0 % p * w1 % p;
        let t3 = self.qq as u128 * w0 % p * w0 % p;
        ((t1 + p - t2 + t3) % p) as u64
    }

    fn mul(&self, a: FpPoint, b: FpPoint) -> FpPoint {
        let p = self.p as u128;
        let (a1, a0, b1, b0) = (a.0 as u128, a.1 as u128, b.0 as u128, b.1 as u128);
        let a0b0 = a0 * b0 % p;
        let u1 = (a1 * b1 % p + p - self.qq as u128 * a0b0 % p) % p;
        let u0 = ((a0 * b1 + a1 * b0) % p + p - self.pp as u128 * a0b0 % p) % p;
        normalize_point(u1 as u64, u0 as u64, self.p)
    }

}

/// A fully enumerated finite class group: either G_{F_p}(f) on the points
/// of P^1(F_p) with unit norm form, or its quotient G*_{F_p}(f) by the
/// cyclic subgroup generated by [0,1]. Elements are stored normalized
/// (star tables store the lexicographically least vector of each coset).
#[derive(Debug, Clone)]
pub struct FiniteGroupTable {
    fp: FpParams,
    star: bool,
    elements: Vec<FpPoint>,
    index: HashMap<FpPoint, usize>,
    /// For star tables: every G-point to its coset representative.
    to_rep: Option<HashMap<FpPoint, FpPoint>>,
}

impl FiniteGroupTable {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[FpPoint] {
        &self.elements
    }

    pub fn prime(&self) -> u64 {
        self.fp.p
    }

    pub fn is_star(&self) -> bool {
        self.star
    }

    pub fn contains(&self, pt: FpPoint) -> bool {
        self.index.contains_key(&pt)
    }

    pub fn index_of(&self, pt: FpPoint) -> Option<usize> {
        self.index.get(&pt).copied()
    }

    /// Norm form of a point mod p.
    pub fn lambda(&self, pt: FpPoint) -> u64 {
        self.fp.lambda(pt)
    }

    pub fn identity(&self) -> FpPoint {
        match &self.to_rep {
            Some(map) => map[&(1, 0)],
            None => (1, 0),
        }
    }

    /// Map a G-point into this table's element set (coset representative
    /// for star tables, identity map otherwise).
    pub fn project(&self, pt: FpPoint) -> Option<FpPoint> {
        match &self.to_rep {
            Some(map) => map.get(&pt).copied(),
            None => self.index.contains_key(&pt).then_some(pt),
        }
    }

    pub fn mul(&self, a: FpPoint, b: FpPoint) -> FpPoint {
        let raw = self.fp.mul(a, b);
        match &self.to_rep {
            Some(map) => map[&raw],
            None => raw,
        }
    }

    pub fn pow(&self, a: FpPoint, mut e: u64) -> FpPoint {
        let mut acc = self.identity();
        let mut sq = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, sq);
            }
            sq = self.mul(sq, sq);
            e >>= 1;
        }
        acc
    }

    pub fn element_order(&self, a: FpPoint) -> u64 {
        let n = self.order() as u64;
        let mut o = n;
        for (q, _) in factor_u64(n) {
            while o % q == 0 && self.pow(a, o / q) == self.identity() {
                o /= q;
            }
        }
        o
    }

    /// Invariant factor decomposition d_1 | d_2 | ... (ascending).
    pub fn invariant_factors(&self) -> Result<Vec<u64>> {
        invariant_factors_from(&self.elements, &self.identity(), |a, b| self.mul(*a, *b))
    }
}

/// Enumerate G_{F_p}(f): all points of P^1(F_p) with nonzero norm form,
/// under the induced product. Requires p not dividing Q.
pub fn enumerate_g(params: &RecurrenceParams, prime: &PrimeP) -> Result<FiniteGroupTable> {
    let fp = FpParams::new(params, prime)?;
    if fp.p > TABLE_LIMIT {
        return Err(Error::EnumerationTooLarge {
            what: "group table prime",
            size: fp.p as u128,
            limit: TABLE_LIMIT as u128,
        });
    }
    let mut elements = Vec::with_capacity(fp.p as usize + 1);
    if fp.lambda((0, 1)) != 0 {
        elements.push((0, 1)); // always: lambda(0,1) = Q, a unit mod p
    }
    for t in 0..fp.p {
        if fp.lambda((1, t)) != 0 {
            elements.push((1, t));
        }
    }
    let index = elements
        .iter()
        .enumerate()
        .map(|(i, &e)| (e, i))
        .collect();
    Ok(FiniteGroupTable {
        fp,
        star: false,
        elements,
        index,
        to_rep: None,
    })
}

/// Enumerate G*_{F_p}(f) = G_{F_p}(f) / <[0,1]> as a coset table.
pub fn enumerate_g_star(params: &RecurrenceParams, prime: &PrimeP) -> Result<FiniteGroupTable> {
    let g = enumerate_g(params, prime)?;
    let fp = g.fp;
    // The subgroup generated by [0,1].
    let mut sub = vec![(1u64, 0u64)];
    let mut cur = (0u64, 1u64);
    while cur != (1, 0) {
        sub.push(cur);
        cur = fp.mul(cur, (0, 1));
        if sub.len() > g.order() {
            return Err(Error::Internal("subgroup scan exceeded group order".into()));
        }
    }
    let mut to_rep: HashMap<FpPoint, FpPoint> = HashMap::with_capacity(g.order());
    let mut reps: Vec<FpPoint> = Vec::new();
    for &x in g.elements() {
        if to_rep.contains_key(&x) {
            continue;
        }
        let coset: Vec<FpPoint> = sub.iter().map(|&h| fp.mul(x, h)).collect();
        let rep = *coset.iter().min().expect("nonempty coset");
        for pt in coset {
            to_rep.insert(pt, rep);
        }
        reps.push(rep);
    }
    reps.sort_unstable();
    if reps.len() * sub.len() != g.order() {
        return Err(Error::Internal("coset partition has wrong size".into()));
    }
    let index = reps.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    Ok(FiniteGroupTable {
        fp,
        star: true,
        elements: reps,
        index,
        to_rep: Some(to_rep),
    })
}

/// The trichotomy target |G_{F_p}(f)| = p - (D/p) for odd p not dividing Q.
/// None at p = 2, where only direct enumeration applies.
pub fn expected_g_order(params: &RecurrenceParams, prime: &PrimeP) -> Option<u64> {
    if prime.is_two() {
        return None;
    }
    let p = prime.to_u64()?;
    Some(match legendre(params.disc(), prime) {
        0 => p,
        1 => p - 1,
        _ => p + 1,
    })
}

/// Rank of apparition r(p): least n > 0 with p dividing the Lucas term F_n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankResult {
    pub prime: PrimeP,
    pub r: u64,
    /// Index of the first vanishing term found by iterating the recurrence
    /// (always equal to r; kept as the independent witness).
    pub witness: u64,
}

/// Compute r(p) two ways: iterate F_n mod p until it vanishes, and take the
/// order of [0,1] under the group law. The two must agree (that equality is
/// one of the theorems this crate verifies); disagreement is an internal
/// error.
pub fn rank(params: &RecurrenceParams, prime: &PrimeP) -> Result<RankResult> {
    let fp = FpParams::new(params, prime)?;
    let p = fp.p as u128;
    let bound = 4 * fp.p + 16;
    // Route 1: the recurrence itself, F_0 = 0, F_1 = 1.
    let mut prev = 0u128;
    let mut cur = 1u128;
    let mut witness = None;
    for n in 1..=bound {
        if cur == 0 {
            witness = Some(n);
            break;
        }
        let next = (fp.pp as u128 * cur % p + p - fp.qq as u128 * prev % p) % p;
        prev = cur;
        cur = next;
    }
    let witness = witness.ok_or_else(|| {
        Error::Internal(format!("no vanishing Lucas term below {bound} at p = {}", fp.p))
    })?;
    // Route 2: order of [0,1] under the group law.
    let mut ord = 1u64;
    let mut acc = (0u64, 1u64);
    while acc != (1, 0) {
        acc = fp.mul(acc, (0, 1));
        ord += 1;
        if ord > bound {
            return Err(Error::Internal("order scan diverged".into()));
        }
    }
    if ord != witness {
        return Err(Error::Internal(format!(
            "rank {witness} disagrees with order of [0,1] = {ord} at p = {}",
            fp.p
        )));
    }
    Ok(RankResult {
        prime: prime.clone(),
        r: witness,
        witness,
    })
}

/// Invariant factors of a finite abelian group given by an element list and
/// multiplication closure. Orders are computed per element; the Sylow
/// partition at each prime is read off the counts of elements of order
/// dividing q^i, which determines the group uniquely in the abelian case.
pub(crate) fn invariant_factors_from<T, F>(elements: &[T], identity: &T, mul: F) -> Result<Vec<u64>>
where
    T: Clone + Eq,
    F: Fn(&T, &T) -> T,
{
    let n = elements.len() as u64;
    if n <= 1 {
        return Ok(Vec::new());
    }
    let nf = factor_u64(n);
    let pow = |x: &T, mut e: u64| -> T {
        let mut acc = identity.clone();
        let mut sq = x.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(&acc, &sq);
            }
            sq = mul(&sq, &sq);
            e >>= 1;
        }
        acc
    };
    let mut orders = Vec::with_capacity(elements.len());
    for x in elements {
        let mut o = n;
        for (q, _) in &nf {
            while o % q == 0 && pow(x, o / q) == *identity {
                o /= q;
            }
        }
        orders.push(o);
    }
    let mut partitions: Vec<(u64, Vec<u32>)> = Vec::new();
    for (q, e) in &nf {
        // s_i = log_q #{x : ord(x) | q^i}
        let mut s = vec![0u32];
        for i in 1..=*e {
            let qi = q.pow(i);
            let count = orders
                .iter()
                .filter(|&&o| qi % o == 0) // ord | q^i (orders dividing n)
                .count() as u64;
            let mut c = count;
            let mut si = 0u32;
            while c % q == 0 {
                c /= q;
                si += 1;
            }
            if c != 1 {
                return Err(Error::Internal(format!(
                    "order-count {count} is not a power of {q}: group not abelian?"
                )));
            }
            s.push(si);
        }
        if s[*e as usize] != *e {
            return Err(Error::Internal("Sylow subgroup size mismatch".into()));
        }
        // #parts >= i is s_i - s_{i-1}; recover the descending partition.
        let m: Vec<u32> = (1..s.len()).map(|i| s[i] - s[i - 1]).collect();
        let num_parts = m[0];
        let mut parts = Vec::with_capacity(num_parts as usize);
        for j in 1..=num_parts {
            let lam = m.iter().filter(|&&mi| mi >= j).count() as u32;
            parts.push(lam);
        }
        partitions.push((*q, parts));
    }
    let k = partitions.iter().map(|(_, p)| p.len()).max().unwrap_or(0);
    // Align largest Sylow parts into the largest invariant factor.
    let mut chain = vec![1u64; k];
    for (q, parts) in &partitions {
        for (j, lam) in parts.iter().enumerate() {
            chain[j] *= q.pow(*lam);
        }
    }
    chain.reverse(); // ascending d_1 | d_2 | ... | d_k
    Ok(chain)
}

/// Invariant factors of the table group; spec-level entry point.
pub fn abelian_invariants(table: &FiniteGroupTable) -> Result<Vec<u64>> {
    table.invariant_factors()
}

/// Invariant factors of (Z/p^k Z)^x by direct enumeration. This is the
/// reducible-case analogue of [`unit_quotient`] (the torsion of G/K when
/// the characteristic polynomial splits over Q).
pub fn rational_unit_group(prime: &PrimeP, k: u32) -> Result<Vec<u64>> {
    let p = prime.to_u64().ok_or(Error::EnumerationTooLarge {
        what: "prime",
        size: u128::MAX,
        limit: TABLE_LIMIT as u128,
    })?;
    let md = (p as u128).checked_pow(k).filter(|&m| m <= UNIT_QUOTIENT_LIMIT as u128);
    let md = md.ok_or(Error::EnumerationTooLarge {
        what: "p^k",
        size: u128::MAX,
        limit: UNIT_QUOTIENT_LIMIT,
    })? as u64;
    let units: Vec<u64> = (1..md).filter(|x| x % p != 0).collect();
    invariant_factors_from(&units, &1u64, |a, b| {
        (*a as u128 * *b as u128 % md as u128) as u64
    })
}

/// Invariant factors of ((O_F/(p^k))^x) / ((Z/p^k Z)^x) for the maximal
/// order O_F of F = Q(sqrt(m)), by enumeration. Requires f irreducible
/// over Q; runs for every prime including p = 2 (closed forms in the
/// literature mostly exclude 2 — here the enumeration is the data).
///
/// `plain_root_basis` forces the Z[sqrt(m)] basis even when m ≡ 1 (mod 4);
/// for odd p the local rings agree, so results must match (tested
/// invariant). The default picks the honest integral basis.
pub fn unit_quotient(params: &RecurrenceParams, prime: &PrimeP, k: u32) -> Result<Vec<u64>> {
    unit_quotient_in_basis(params, prime, k, false)
}

pub fn unit_quotient_in_basis(
    params: &RecurrenceParams,
    prime: &PrimeP,
    k: u32,
    plain_root_basis: bool,
) -> Result<Vec<u64>> {
    if !params.is_irreducible() {
        return Err(Error::ReducibleParams);
    }
    assert!(k >= 1);
    let p = prime.to_u64().ok_or(Error::EnumerationTooLarge {
        what: "prime",
        size: u128::MAX,
        limit: TABLE_LIMIT as u128,
    })?;
    let budget = (p as u128).checked_pow(2 * k);
    if budget.is_none() || budget.unwrap() > UNIT_QUOTIENT_LIMIT {
        return Err(Error::EnumerationTooLarge {
            what: "p^(2k)",
            size: budget.unwrap_or(u128::MAX),
            limit: UNIT_QUOTIENT_LIMIT,
        });
    }
    let md = (p as u64).pow(k);
    let m = params.m();
    // omega is the integral basis generator: (1+sqrt(m))/2 when m ≡ 1 mod 4
    // (omega^2 = omega + (m-1)/4), else sqrt(m) (omega^2 = m).
    let m_mod4 = m.mod_floor(&BigInt::from(4)).to_i64().unwrap();
    let half_basis = m_mod4 == 1 && !plain_root_basis;
    let mdi = BigInt::from(md);
    let (tau, eta) = if half_basis {
        let eta = (m - BigInt::from(1)) / BigInt::from(4);
        (1u64, eta.mod_floor(&mdi).to_u64().unwrap())
    } else {
        (0u64, m.mod_floor(&mdi).to_u64().unwrap())
    };
    let quo = UnitQuotient { p, md, tau, eta };

    // Canonical coset representatives under scalar scaling: (t, 1) when the
    // omega-coordinate is a unit, else (1, u) with p | u (the 1-coordinate
    // must then be a unit). Scaling is free, so this hits each coset once.
    let mut elements: Vec<(u64, u64)> = Vec::new();
    for t in 0..md {
        if quo.norm(t, 1) % p != 0 {
            elements.push((t, 1));
        }
    }
    let mut u = 0u64;
    while u < md {
        elements.push((1, u)); // norm ≡ 1 mod p here
        u += p;
    }
    invariant_factors_from(&elements, &(1, 0), |a, b| quo.mul(*a, *b))
}

struct UnitQuotient {
    p: u64,
    md: u64,
    tau: u64,
    eta: u64,
}

impl UnitQuotient {
    /// Norm of x + y*omega: x^2 + tau*x*y - eta*y^2 (mod md).
    fn norm(&self, x: u64, y: u64) -> u64 {
        let md = self.md as u128;
        let (x, y) = (x as u128, y as u128);
        let t1 = x * x % md;
        let t2 = self.tau as u128 * x % md * y % md;
        let t3 = self.eta as u128 * y % md * y % md;
        ((t1 + t2 + md - t3) % md) as u64
    }

    fn canonical(&self, x: u64, y: u64) -> (u64, u64) {
        if y % self.p != 0 {
            let yi = inv_mod_prime_power(y, self.p, self.md);
            ((x as u128 * yi as u128 % self.md as u128) as u64, 1)
        } else {
            debug_assert!(x % self.p != 0, "non-unit slipped into the quotient");
            let xi = inv_mod_prime_power(x, self.p, self.md);
            (1, (y as u128 * xi as u128 % self.md as u128) as u64)
        }
    }

    /// (x1 + y1 w)(x2 + y2 w) with w^2 = tau*w + eta, re-canonicalized.
    fn mul(&self, a: (u64, u64), b: (u64, u64)) -> (u64, u64) {
        let md = self.md as u128;
        let (x1, y1, x2, y2) = (a.0 as u128, a.1 as u128, b.0 as u128, b.1 as u128);
        let y1y2 = y1 * y2 % md;
        let x = (x1 * x2 % md + self.eta as u128 * y1y2 % md) % md;
        let y = ((x1 * y2 + y1 * x2) % md + self.tau as u128 * y1y2 % md) % md;
        self.canonical(x as u64, y as u64)
    }
}

/// Inverse of a unit mod p^k via Euler: a^(phi(p^k) - 1).
fn inv_mod_prime_power(a: u64, p: u64, md: u64) -> u64 {
    if md == 1 {
        return 0;
    }
    let phi = md / p * (p - 1);
    powmod(a, phi - 1, md)
}
