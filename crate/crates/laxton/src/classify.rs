//! The reduction map to P^1(F_p), membership in the subgroup chain
//! G(f,p) <= K(f,p) <= H(f,p), exact-sequence verification, and the
//! structure-theorem predictor/cross-checker.

use num_bigint::{BigInt, ToBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::padic::PadicCtx;
use crate::arith::prime::PrimeP;
use crate::arith::{valuations_above, SplittingType, Valuations};
use crate::equivalence::{normalize, psi_image, GClass};
use crate::error::{Error, Result};
use crate::finite::{
    direct_sum_invariants, enumerate_g, enumerate_g_star, rank, rational_unit_group,
    unit_quotient, FpPoint,
};
use crate::recurrence::{ClassVector, RecurrenceParams, RingCtx};

/// Reduce a rational class to its point of P^1(F_p) (coordinatewise on the
/// coprime-integer representative, then projective normalization).
pub fn reduce_p(a: &GClass, prime: &PrimeP) -> Result<FpPoint> {
    let (w1, w0) = a
        .int_coords()
        .ok_or(Error::WrongContext {
            expected: "Q or Z_(p)",
            got: "F_p",
        })?;
    let pb = prime.to_bigint();
    let r1 = w1.mod_floor(&pb).to_u64().ok_or(Error::EnumerationTooLarge {
        what: "prime",
        size: u128::MAX,
        limit: u64::MAX as u128,
    })?;
    let r0 = w0.mod_floor(&pb).to_u64().unwrap();
    // Coprime coordinates cannot both vanish mod p.
    Ok(crate::finite::normalize_point(r1, r0, prime.to_u64().unwrap()))
}

/// Decision data for one class at one prime.
#[derive(Debug, Clone)]
pub struct MembershipReport {
    pub class: GClass,
    pub splitting: SplittingType,
    pub reduced: FpPoint,
    pub in_g: bool,
    pub in_k: bool,
    pub in_h: bool,
    /// Valuations of the algebra image w1 - w0 θ1 at the places above p.
    pub valuations: Valuations,
    /// The difference map V = v_p1 - v_p1^σ (zero where conjugation fixes
    /// the place); in_h is V = 0 in the split/rational cases.
    pub asymmetry: i64,
}

/// Class membership in G(f,p), K(f,p), H(f,p).
///
/// in_K is the unit test on the norm form mod p; in_G additionally asks the
/// reduction to be the identity point; in_H is decided by valuations (no
/// power search): the quotient G_Q(f)/K(f,p) has free part exactly the
/// V-map image in the split and rational cases and is torsion otherwise.
/// For small p an independent power-search oracle re-checks in_H on in_K
/// classes.
pub fn membership(a: &GClass, prime: &PrimeP) -> Result<MembershipReport> {
    let params = a.rep().params().clone();
    if prime.divides(params.q()) {
        return Err(Error::QNotUnit {
            p: prime.get().clone(),
        });
    }
    let splitting = params.splitting_type(prime)?;
    let reduced = reduce_p(a, prime)?;
    let lam = a.rep().lambda();
    let lam_int = lam
        .as_rat()
        .expect("rational context")
        .numer()
        .clone();
    let in_k = !prime.divides(&lam_int);
    let in_g = in_k && reduced == (1, 0);
    let psi = psi_image(a.rep())?;
    let valuations = valuations_above(&psi, prime)?;
    let asymmetry = valuations.asymmetry();
    let in_h = match splitting {
        SplittingType::Inert | SplittingType::Ramified => true,
        SplittingType::Split | SplittingType::RationalField => asymmetry == 0,
    };
    // Power-search oracle: an in_K class always has red(a^n) = [1,0] for
    // some n <= |G_{F_p}| (the reduction has finite order), so in_H must
    // hold. Run it where the group is small enough to matter.
    if in_k && prime.to_u64().map(|p| p <= 200).unwrap_or(false) {
        let bound = prime.to_u64().unwrap() + 1;
        let mut cur = a.clone();
        let mut hit = false;
        for _ in 1..=bound {
            cur = crate::equivalence::class_mul(&cur, a)?;
            if reduce_p(&cur, prime)? == (1, 0) {
                hit = true;
                break;
            }
        }
        if hit != in_h {
            return Err(Error::Internal(format!(
                "power-search oracle disagrees with valuation decision at p = {prime}"
            )));
        }
    }
    Ok(MembershipReport {
        class: a.clone(),
        splitting,
        reduced,
        in_g,
        in_k,
        in_h,
        valuations,
        asymmetry,
    })
}

/// Deterministic grid of coprime seed pairs with |w| <= bound, unit norm
/// form over Q, in a reproducible order.
pub fn sample_classes(
    params: &RecurrenceParams,
    bound: i64,
    limit: usize,
) -> Result<Vec<GClass>> {
    let mut out = Vec::new();
    'outer: for w1 in -bound..=bound {
        for w0 in -bound..=bound {
            if w1 == 0 && w0 == 0 {
                continue;
            }
            if BigInt::from(w1).gcd(&BigInt::from(w0)) != BigInt::one() {
                continue;
            }
            let v = ClassVector::from_ints(w1, w0, params, &RingCtx::Rationals)?;
            if !v.is_unit_class() {
                continue;
            }
            let c = normalize(&v)?;
            if !out.contains(&c) {
                out.push(c);
                if out.len() >= limit {
                    break 'outer;
                }
            }
        }
    }
    Ok(out)
}

/// Result of checking the reduction exact sequence
/// 1 -> G(f,p) -> K(f,p) -> G_{F_p}(f) -> 1 and its starred version.
#[derive(Debug, Clone, Serialize)]
pub struct ExactSequenceReport {
    pub g_order: u64,
    pub gstar_order: u64,
    pub rank: u64,
    /// Every finite-group element got an integer lift that is in K and
    /// reduces back to it.
    pub surjective: bool,
    /// red(a*b) = red(a)*red(b) along the lifted generator sweep and on
    /// sample pairs.
    pub homomorphism_ok: bool,
    /// red of the lifted generator power is the identity exactly at
    /// multiples of |G| (kernel = G(f,p) along the sweep).
    pub kernel_ok: bool,
    /// Distinct K*/G*-cosets visited by the lifted generator sweep.
    pub star_coset_count: u64,
    /// star_coset_count == |G*_{F_p}| == |G_{F_p}| / r(p).
    pub star_exact: bool,
    pub failures: Vec<String>,
}

impl ExactSequenceReport {
    pub fn all_ok(&self) -> bool {
        self.surjective && self.homomorphism_ok && self.kernel_ok && self.star_exact
    }
}

/// The cheap membership pair (reduction point, in-K flag) without the
/// valuation evidence or power oracle; what tight sweep loops need.
fn reduce_and_in_k(a: &GClass, prime: &PrimeP) -> Result<(FpPoint, bool)> {
    let reduced = reduce_p(a, prime)?;
    let lam = a.rep().lambda().as_rat().expect("rational").numer().clone();
    Ok((reduced, !prime.divides(&lam)))
}

/// Verify the exact sequence at one instance by lifting the finite group
/// into G_Q(f) and re-reducing: surjectivity by coordinate lifts, the
/// homomorphism and kernel along a lifted cyclic generator (exact rational
/// arithmetic upstairs, table arithmetic downstairs), and the starred coset
/// count against |G*_{F_p}|. A few full membership reports (with the power
/// oracle) run on sampled lifts at the end.
pub fn verify_exact_sequence(
    params: &RecurrenceParams,
    prime: &PrimeP,
) -> Result<ExactSequenceReport> {
    let g = enumerate_g(params, prime)?;
    let gs = enumerate_g_star(params, prime)?;
    let rk = rank(params, prime)?;
    let mut failures = Vec::new();

    // (i) Surjectivity: every table element lifts to an in-K class that
    // reduces back onto it.
    let mut surjective = true;
    for &pt in g.elements() {
        let lift = ClassVector::from_ints(pt.0 as i64, pt.1 as i64, params, &RingCtx::Rationals)?;
        let cls = normalize(&lift)?;
        let (red, in_k) = reduce_and_in_k(&cls, prime)?;
        if !in_k || red != pt {
            surjective = false;
            failures.push(format!("lift of {pt:?} failed to round-trip"));
        }
    }

    // (ii) Cyclic sweep: lift a generator, walk its powers with exact
    // arithmetic, compare reductions with table powers.
    let generator = g
        .elements()
        .iter()
        .copied()
        .find(|&e| g.element_order(e) == g.order() as u64)
        .ok_or_else(|| Error::Internal("finite class group should be cyclic".into()))?;
    let gen_lift = normalize(&ClassVector::from_ints(
        generator.0 as i64,
        generator.1 as i64,
        params,
        &RingCtx::Rationals,
    )?)?;
    let mut homomorphism_ok = true;
    let mut kernel_ok = true;
    let mut cosets: Vec<FpPoint> = Vec::new();
    // Raw integer vectors upstairs (coordinates grow, but the norm form of
    // every power is a p-unit, so reducing raw coordinates is a valid
    // projective point and agrees with the class reduction).
    let gen_vec = gen_lift.rep().clone();
    let mut cur = ClassVector::identity(params, &RingCtx::Rationals)?;
    let p64 = prime.to_u64().ok_or(Error::EnumerationTooLarge {
        what: "prime",
        size: u128::MAX,
        limit: u64::MAX as u128,
    })?;
    let pb = prime.to_bigint();
    for j in 0..=g.order() as u64 {
        let w1 = cur.w1.as_rat().expect("integer coords").numer().mod_floor(&pb);
        let w0 = cur.w0.as_rat().expect("integer coords").numer().mod_floor(&pb);
        let red = crate::finite::normalize_point(
            w1.to_u64().expect("residue"),
            w0.to_u64().expect("residue"),
            p64,
        );
        if red != g.pow(generator, j) {
            homomorphism_ok = false;
            failures.push(format!("red(g^{j}) != red(g)^{j}"));
        }
        let is_id = red == (1, 0);
        if is_id != (j % g.order() as u64 == 0) {
            kernel_ok = false;
            failures.push(format!("kernel violated at power {j}"));
        }
        let coset = gs
            .project(red)
            .ok_or_else(|| Error::Internal("reduction left the finite group".into()))?;
        if j < g.order() as u64 && !cosets.contains(&coset) {
            cosets.push(coset);
        }
        if j < g.order() as u64 {
            cur = cur.mul(&gen_vec)?;
        }
    }
    // `cur` is now the lifted generator to the power |G|: a kernel element
    // with large coordinates. Full membership (with the power oracle) on
    // its class.
    let kernel_sample = membership(&normalize(&cur)?, prime)?;
    if !kernel_sample.in_g {
        kernel_ok = false;
        failures.push("lifted g^|G| is not in G(f,p)".into());
    }
    // Homomorphism spot-checks on sample pairs (not just generator powers).
    let samples = sample_classes(params, 2, 6)?;
    for a in &samples {
        for b in &samples {
            let (ra, ka) = reduce_and_in_k(a, prime)?;
            let (rb, kb) = reduce_and_in_k(b, prime)?;
            if !ka || !kb {
                continue;
            }
            let prod = crate::equivalence::class_mul(a, b)?;
            if reduce_p(&prod, prime)? != g.mul(ra, rb) {
                homomorphism_ok = false;
                failures.push(format!("red({a} * {b}) mismatch"));
            }
        }
    }

    let star_coset_count = cosets.len() as u64;
    let star_exact = star_coset_count == gs.order() as u64
        && gs.order() as u64 * rk.r == g.order() as u64;
    if !star_exact {
        failures.push(format!(
            "star sequence: cosets {} vs |G*| {} vs |G|/r {}",
            star_coset_count,
            gs.order(),
            g.order() as u64 / rk.r
        ));
    }
    Ok(ExactSequenceReport {
        g_order: g.order() as u64,
        gstar_order: gs.order() as u64,
        rank: rk.r,
        surjective,
        homomorphism_ok,
        kernel_ok,
        star_coset_count,
        star_exact,
        failures,
    })
}

/// Closed-form predictions for one (P, Q, p): the K*/G* invariants, the
/// finite part and free rank of G/K, and the collapse flags of the chain.
/// `torsion_options` lists the candidate invariant-factor lists where the
/// literature gives a disjunction (p = 3, ramified, odd s >= 3) and is None
/// where no closed form is asserted (p = 2 with s >= 1).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructurePrediction {
    pub case: String,
    pub kstar_over_gstar: Vec<u64>,
    pub torsion_options: Option<Vec<Vec<u64>>>,
    pub free_rank: u8,
    pub h_equals_k: bool,
    pub g_equals_h: bool,
    pub in_formula_range: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exclusion: Option<String>,
}

fn cyclic(n: u64) -> Vec<u64> {
    if n <= 1 {
        vec![]
    } else {
        vec![n]
    }
}

/// Predict the quotient structure from the closed forms.
pub fn predict_structure(params: &RecurrenceParams, prime: &PrimeP) -> Result<StructurePrediction> {
    if prime.divides(params.q()) {
        return Err(Error::QNotUnit {
            p: prime.get().clone(),
        });
    }
    let (s, _) = params.local_decomp(prime);
    let splitting = params.splitting_type(prime)?;
    let p64 = prime.to_u64().ok_or(Error::EnumerationTooLarge {
        what: "prime",
        size: u128::MAX,
        limit: u64::MAX as u128,
    })?;
    let two = prime.is_two();
    let k = s / 2;

    let pred = match (s, splitting) {
        (0, SplittingType::Inert) => {
            let r = rank(params, prime)?.r;
            StructurePrediction {
                case: "inert, p coprime to D".into(),
                kstar_over_gstar: cyclic((p64 + 1) / r),
                torsion_options: Some(vec![vec![]]),
                free_rank: 0,
                h_equals_k: true,
                g_equals_h: true,
                in_formula_range: true,
                exclusion: None,
            }
        }
        (0, SplittingType::Split | SplittingType::RationalField) => {
            let r = rank(params, prime)?.r;
            StructurePrediction {
                case: "split or rational, p coprime to D".into(),
                kstar_over_gstar: cyclic((p64 - 1) / r),
                torsion_options: Some(vec![vec![]]),
                free_rank: 1,
                h_equals_k: true,
                g_equals_h: false,
                in_formula_range: true,
                exclusion: None,
            }
        }
        (0, SplittingType::Ramified) => {
            return Err(Error::Internal("ramified forces p | D".into()))
        }
        (1, _) => StructurePrediction {
            case: "ramified, p exactly divides D".into(),
            kstar_over_gstar: vec![],
            torsion_options: Some(vec![vec![2]]),
            free_rank: 0,
            h_equals_k: false,
            g_equals_h: true,
            in_formula_range: true,
            exclusion: None,
        },
        (_, SplittingType::Ramified) => {
            // s odd >= 3.
            if two {
                StructurePrediction {
                    case: format!("ramified, s = {s}"),
                    kstar_over_gstar: vec![],
                    torsion_options: None,
                    free_rank: 0,
                    h_equals_k: false,
                    g_equals_h: true,
                    in_formula_range: false,
                    exclusion: Some("p = 2: no closed form for s >= 2".into()),
                }
            } else if p64 == 3 {
                let opt1 = direct_sum_invariants(&[vec![2], vec![3u64.pow(k)]]);
                let opt2 = direct_sum_invariants(&[vec![2], vec![3], vec![3u64.pow(k - 1)]]);
                StructurePrediction {
                    case: format!("ramified, s = {s}, p = 3 (two-option)"),
                    kstar_over_gstar: vec![],
                    torsion_options: Some(vec![opt1, opt2]),
                    free_rank: 0,
                    h_equals_k: false,
                    g_equals_h: true,
                    in_formula_range: false,
                    exclusion: Some(
                        "p = 3 ramified with odd s >= 3: the closed form is a disjunction".into(),
                    ),
                }
            } else {
                StructurePrediction {
                    case: format!("ramified, s = {s}"),
                    kstar_over_gstar: vec![],
                    torsion_options: Some(vec![cyclic(2 * p64.pow(k))]),
                    free_rank: 0,
                    h_equals_k: false,
                    g_equals_h: true,
                    in_formula_range: true,
                    exclusion: None,
                }
            }
        }
        (_, SplittingType::Inert) => {
            // s even >= 2.
            if two {
                StructurePrediction {
                    case: format!("inert, s = {s}"),
                    kstar_over_gstar: vec![],
                    torsion_options: None,
                    free_rank: 0,
                    h_equals_k: false,
                    g_equals_h: true,
                    in_formula_range: false,
                    exclusion: Some("p = 2: no closed form for s >= 2".into()),
                }
            } else {
                StructurePrediction {
                    case: format!("inert, s = {s}"),
                    kstar_over_gstar: vec![],
                    torsion_options: Some(vec![cyclic((p64 + 1) * p64.pow(k - 1))]),
                    free_rank: 0,
                    h_equals_k: false,
                    g_equals_h: true,
                    in_formula_range: true,
                    exclusion: None,
                }
            }
        }
        (_, SplittingType::Split | SplittingType::RationalField) => {
            // s even >= 2.
            if two {
                StructurePrediction {
                    case: format!("split or rational, s = {s}"),
                    kstar_over_gstar: vec![],
                    torsion_options: None,
                    free_rank: 1,
                    h_equals_k: false,
                    g_equals_h: false,
                    in_formula_range: false,
                    exclusion: Some("p = 2: no closed form for s >= 2".into()),
                }
            } else {
                StructurePrediction {
                    case: format!("split or rational, s = {s}"),
                    kstar_over_gstar: vec![],
                    torsion_options: Some(vec![cyclic((p64 - 1) * p64.pow(k - 1))]),
                    free_rank: 1,
                    h_equals_k: false,
                    g_equals_h: false,
                    in_formula_range: true,
                    exclusion: None,
                }
            }
        }
    };
    Ok(pred)
}

/// Verdict of a predicted-vs-computed comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Match,
    Mismatch,
    OutOfFormulaRange,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Match => "match",
            Verdict::Mismatch => "mismatch",
            Verdict::OutOfFormulaRange => "out-of-formula-range",
        })
    }
}

/// Predicted vs computed invariants for one (P, Q, p) instance.
#[derive(Debug, Clone)]
pub struct StructureReport {
    pub params: RecurrenceParams,
    pub prime: PrimeP,
    pub splitting: SplittingType,
    pub s: u32,
    pub d0: BigInt,
    pub rank: u64,
    pub g_order: u64,
    pub gstar_order: u64,
    /// Invariant factors of K*/G* read off the enumerated G*_{F_p}.
    pub computed_kstar_gstar: Vec<u64>,
    /// Finite part of G/K from the unit-quotient enumerators (None when
    /// there is nothing independent to enumerate, i.e. s = 0 or s = 1).
    pub computed_torsion: Option<Vec<u64>>,
    /// Which torsion option matched, when the prediction lists several.
    pub matched_option: Option<usize>,
    /// A class with nonzero V-map value, proving infinite order mod K
    /// (split/rational cases).
    pub free_rank_witness: Option<(BigInt, BigInt, i64)>,
    /// All sampled classes had their e-th power in K, for e the exponent of
    /// the predicted finite part (inert/ramified cases).
    pub torsion_witness: Option<bool>,
    pub prediction: StructurePrediction,
    pub verdict: Verdict,
}

/// Exponent (largest invariant factor) of a finite abelian group.
fn exponent_of(invariants: &[u64]) -> u64 {
    invariants.last().copied().unwrap_or(1)
}

/// Compute the independently-enumerable side of the structure theorems and
/// compare with the closed-form predictions.
///
/// Computed data: K*/G* ≅ G*_{F_p}(f) by the exact sequence, so its
/// invariant factors come from the enumerated quotient table; for s >= 2
/// the finite part of G/K comes from the unit-quotient enumerator (with the
/// extra order-2 ramified factor), or from (Z/p^{s/2})^x in the rational
/// case. Free-rank claims are settled by explicit witnesses.
pub fn crosscheck_structure(params: &RecurrenceParams, prime: &PrimeP) -> Result<StructureReport> {
    let prediction = predict_structure(params, prime)?;
    let (s, d0) = params.local_decomp(prime);
    let splitting = params.splitting_type(prime)?;
    let g = enumerate_g(params, prime)?;
    let gs = enumerate_g_star(params, prime)?;
    let rk = rank(params, prime)?;
    let computed_kstar_gstar = gs.invariant_factors()?;
    let k = s / 2;

    // Independent enumeration of the finite part of G/K where one exists.
    let computed_torsion = if s >= 2 {
        if params.is_irreducible() {
            let uq = unit_quotient(params, prime, k.max(1))?;
            Some(match splitting {
                SplittingType::Ramified => direct_sum_invariants(&[vec![2], uq]),
                _ => uq,
            })
        } else {
            Some(rational_unit_group(prime, k)?)
        }
    } else {
        None
    };

    // Witnesses.
    let free_rank_witness = if prediction.free_rank == 1 {
        Some(free_rank_witness(params, prime, s)?)
    } else {
        None
    };
    let torsion_witness = if prediction.free_rank == 0 && !prime.is_two() {
        let e = match (&prediction.torsion_options, &computed_torsion) {
            (Some(opts), _) if opts.len() == 1 => exponent_of(&opts[0]),
            (_, Some(ct)) => exponent_of(ct),
            _ => 1,
        };
        Some(torsion_exponent_holds(params, prime, e)?)
    } else {
        None
    };

    // Verdict.
    let kstar_match = computed_kstar_gstar == prediction.kstar_over_gstar;
    let (torsion_match, matched_option) = match (&prediction.torsion_options, &computed_torsion) {
        (Some(opts), Some(ct)) => {
            let hit = opts.iter().position(|o| o == ct);
            (hit.is_some(), hit)
        }
        (Some(opts), None) => {
            // Nothing enumerated (s <= 1): the only asserted finite parts
            // are trivial (s = 0) or Z/2 (s = 1), both settled by the
            // witnesses below rather than enumeration.
            (opts.len() == 1, Some(0))
        }
        (None, _) => (true, None),
    };
    let witnesses_ok = free_rank_witness.as_ref().map(|w| w.2 != 0).unwrap_or(true)
        && torsion_witness.unwrap_or(true);

    let verdict = if !kstar_match || !torsion_match || !witnesses_ok {
        Verdict::Mismatch
    } else if prediction.in_formula_range {
        Verdict::Match
    } else {
        Verdict::OutOfFormulaRange
    };

    Ok(StructureReport {
        params: params.clone(),
        prime: prime.clone(),
        splitting,
        s,
        d0,
        rank: rk.r,
        g_order: g.order() as u64,
        gstar_order: gs.order() as u64,
        computed_kstar_gstar,
        computed_torsion,
        matched_option,
        free_rank_witness,
        torsion_witness,
        prediction,
        verdict,
    })
}

/// Build a class with nonzero V-map value: proof that G/K has an element of
/// infinite order in the split and rational-field cases. Returns the
/// witness coordinates and its V value.
fn free_rank_witness(
    params: &RecurrenceParams,
    prime: &PrimeP,
    s: u32,
) -> Result<(BigInt, BigInt, i64)> {
    let pb = prime.to_bigint();
    let w1 = if params.is_irreducible() {
        // Split: w1 = (P + r)/2 for a deep enough lifted root r of D.
        let (_, d0) = params.local_decomp(prime);
        let ctx = PadicCtx::lift(&d0, prime, s + 8)?;
        let mut r = ctx.root().to_bigint().unwrap() * pb.pow(s / 2);
        if (params.p() + &r).is_odd() {
            r += pb.pow(s + 8 + s / 2);
        }
        (params.p() + r) / BigInt::from(2)
    } else {
        // Rational: w1 = θ1 + p^(max(s,1)).
        let (t1, _) = params.rational_roots().expect("reducible");
        t1 + pb.pow(s.max(1))
    };
    let v = ClassVector::from_bigints(&w1, &BigInt::one(), params, &RingCtx::Rationals)?;
    let cls = normalize(&v)?;
    let vals = valuations_above(&psi_image(cls.rep())?, prime)?;
    let (c1, c0) = cls.int_coords().expect("rational class");
    Ok((c1, c0, vals.asymmetry()))
}

/// Check a^e ∈ K for every sampled class a (grid plus targeted non-K
/// classes): the witness that G/K has exponent dividing e.
fn torsion_exponent_holds(params: &RecurrenceParams, prime: &PrimeP, e: u64) -> Result<bool> {
    let mut samples = sample_classes(params, 2, 8)?;
    // Targeted: a class reducing to a norm-form zero (not in K).
    let pb = prime.to_bigint();
    for t in 0..prime.to_u64().unwrap_or(0).min(1000) {
        let v = ClassVector::from_bigints(&BigInt::from(t), &BigInt::one(), params, &RingCtx::Rationals)?;
        let lam = v.lambda().as_rat().unwrap().numer().mod_floor(&pb);
        if lam.is_zero() {
            samples.push(normalize(&v)?);
            break;
        }
    }
    for cls in samples {
        let mut cur = normalize(&ClassVector::identity(params, &RingCtx::Rationals)?)?;
        for _ in 0..e {
            cur = crate::equivalence::class_mul(&cur, &cls)?;
        }
        let lam = cur.rep().lambda().as_rat().unwrap().numer().clone();
        if prime.divides(&lam) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The two routes of the Laxton-subgroup membership test for a rational
/// class at p: (a) some window term of the coprime-integer representative
/// vanishes mod p (window of r(p)+1 terms suffices), and (b) the class is
/// in K and its reduction lies in the cyclic subgroup generated by [0,1].
/// The two answers must always agree (tested invariant).
pub fn star_divisor_membership(a: &GClass, prime: &PrimeP) -> Result<(bool, bool)> {
    let params = a.rep().params().clone();
    let rk = rank(&params, prime)?;
    // Route A: slide a window of r(p) + 1 terms.
    let window = a.rep().window(0, rk.r as i64)?;
    let mut route_a = false;
    for (off, t) in window.terms.iter().enumerate() {
        let t = t.as_rat().expect("rational context");
        if t.is_zero() || prime.divides(t.numer()) {
            // Adjacent term must be a p-unit for a coprime representative.
            if let Some(adj) = window.terms.get(off + 1).or(window.terms.get(off.wrapping_sub(1)))
            {
                let adj = adj.as_rat().unwrap();
                if adj.is_zero() || prime.divides(adj.numer()) {
                    return Err(Error::Internal(
                        "two adjacent window terms divisible by p for a coprime seed".into(),
                    ));
                }
            }
            route_a = true;
            break;
        }
    }
    // Route B: reduce, then test membership in <[0,1]>.
    let rep = membership(a, prime)?;
    let route_b = if !rep.in_k {
        false
    } else {
        let g = enumerate_g(&params, prime)?;
        let mut cur = (1u64, 0u64);
        let mut found = rep.reduced == cur;
        for _ in 0..rk.r {
            cur = g.mul(cur, (0, 1));
            if cur == rep.reduced {
                found = true;
                break;
            }
        }
        found
    };
    Ok((route_a, route_b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(p: i64, q: i64) -> RecurrenceParams {
        RecurrenceParams::from_i64(p, q).unwrap()
    }

    fn prime(p: u64) -> PrimeP {
        PrimeP::from_u64(p).unwrap()
    }

    fn class(w1: i64, w0: i64, pr: &RecurrenceParams) -> GClass {
        normalize(&ClassVector::from_ints(w1, w0, pr, &RingCtx::Rationals).unwrap()).unwrap()
    }

    #[test]
    fn reduce_examples() {
        let pr = params(1, -1);
        assert_eq!(reduce_p(&class(3, 2, &pr), &prime(3)).unwrap(), (0, 1));
        assert_eq!(reduce_p(&class(1, 0, &pr), &prime(3)).unwrap(), (1, 0));
        // Non-coprime input is normalized upstream.
        assert_eq!(reduce_p(&class(5, 10, &pr), &prime(5)).unwrap(), (1, 2));
    }

    #[test]
    fn membership_identity() {
        let pr = params(1, -1);
        let rep = membership(&class(1, 0, &pr), &prime(7)).unwrap();
        assert!(rep.in_g && rep.in_k && rep.in_h);
    }

    #[test]
    fn membership_companion_at_split_prime() {
        // Fibonacci companion class [1,2] at p = 11 (split): in K and H,
        // not in G.
        let pr = params(1, -1);
        let rep = membership(&class(1, 2, &pr), &prime(11)).unwrap();
        assert!(rep.in_k);
        assert!(rep.in_h);
        assert!(!rep.in_g);
        assert_eq!(rep.reduced, reduce_p(&class(1, 2, &pr), &prime(11)).unwrap());
    }

    #[test]
    fn membership_rational_double_root() {
        // (1,-2) at p = 3: rational field, Λ(1,1) = -2 is a 3-unit.
        let pr = params(1, -2);
        let rep = membership(&class(1, 1, &pr), &prime(3)).unwrap();
        assert!(rep.in_k);
        assert!(rep.in_h);
        assert_eq!(rep.splitting, SplittingType::RationalField);
        assert_eq!(rep.asymmetry, 0);
    }

    #[test]
    fn membership_chain_invariant() {
        let pr = params(1, -1);
        for p in [2u64, 3, 5, 7, 11, 13] {
            for cls in sample_classes(&pr, 3, 24).unwrap() {
                let rep = membership(&cls, &prime(p)).unwrap();
                if rep.in_g {
                    assert!(rep.in_k);
                }
                if rep.in_k {
                    assert!(rep.in_h);
                }
            }
        }
    }

    #[test]
    fn exact_sequence_fibonacci() {
        for p in [3u64, 7, 11, 23] {
            let rep = verify_exact_sequence(&params(1, -1), &prime(p)).unwrap();
            assert!(rep.all_ok(), "p = {p}: {:?}", rep.failures);
        }
        // p = 11: r = 10 = p - 1, so K* = G* and one coset.
        let rep = verify_exact_sequence(&params(1, -1), &prime(11)).unwrap();
        assert_eq!(rep.star_coset_count, 1);
    }

    #[test]
    fn predict_examples() {
        // (1,-1,3): inert s=0, (p+1)/r = 4/4 = 1.
        let pred = predict_structure(&params(1, -1), &prime(3)).unwrap();
        assert_eq!(pred.kstar_over_gstar, Vec::<u64>::new());
        assert!(pred.h_equals_k && pred.g_equals_h);
        // (1,-2,3): rational, s=2: free rank 1, torsion (p-1)p^(s/2-1) = 2.
        let pred = predict_structure(&params(1, -2), &prime(3)).unwrap();
        assert_eq!(pred.free_rank, 1);
        assert_eq!(pred.torsion_options, Some(vec![vec![2]]));
        // (2,-17,3): inert s=2: torsion (p+1)p^(s/2-1) = 4.
        let pred = predict_structure(&params(2, -17), &prime(3)).unwrap();
        assert_eq!(pred.torsion_options, Some(vec![vec![4]]));
        assert_eq!(pred.free_rank, 0);
        // (1,-1,29): split s=0: (p-1)/r = 28/14 = 2.
        let pred = predict_structure(&params(1, -1), &prime(29)).unwrap();
        assert_eq!(pred.kstar_over_gstar, vec![2]);
    }

    #[test]
    fn crosscheck_examples() {
        for p in [3u64, 7, 23, 29] {
            let rep = crosscheck_structure(&params(1, -1), &prime(p)).unwrap();
            assert_eq!(rep.verdict, Verdict::Match, "p = {p}");
        }
        let rep = crosscheck_structure(&params(1, -2), &prime(3)).unwrap();
        assert_eq!(rep.verdict, Verdict::Match);
        assert_eq!(rep.gstar_order, 1);
        let w = rep.free_rank_witness.unwrap();
        assert_ne!(w.2, 0);
        // Inert s = 2 with unit-quotient confirmation.
        let rep = crosscheck_structure(&params(2, -17), &prime(3)).unwrap();
        assert_eq!(rep.verdict, Verdict::Match);
        assert_eq!(rep.computed_torsion, Some(vec![4]));
    }

    #[test]
    fn crosscheck_ramified_s3_p3_is_out_of_formula() {
        // (10,-2): D = 108 = 2^2 * 3^3, ramified at 3 with s = 3.
        let rep = crosscheck_structure(&params(10, -2), &prime(3)).unwrap();
        assert_eq!(rep.verdict, Verdict::OutOfFormulaRange);
        assert!(rep.matched_option.is_some());
        assert_eq!(rep.s, 3);
    }

    #[test]
    fn crosscheck_p2_high_s_is_out_of_formula() {
        // (2,-1): D = 8, ramified at 2 with s = 3.
        let rep = crosscheck_structure(&params(2, -1), &prime(2)).unwrap();
        assert_eq!(rep.verdict, Verdict::OutOfFormulaRange);
    }

    #[test]
    fn star_membership_routes_agree() {
        let pr = params(1, -1);
        for p in [2u64, 3, 5, 7, 11] {
            for cls in sample_classes(&pr, 3, 20).unwrap() {
                let (a, b) = star_divisor_membership(&cls, &prime(p)).unwrap();
                assert_eq!(a, b, "p = {p}, class {cls}");
            }
        }
    }

    #[test]
    fn split_coprimality_lemma() {
        // For coprime seeds and p^2 not dividing D, min valuation above a
        // split or rational p is 0.
        for (pp, qq, p) in [(1i64, -1i64, 11u64), (1, -1, 19), (1, -2, 5), (3, 1, 5)] {
            let pr = params(pp, qq);
            let prm = prime(p);
            for cls in sample_classes(&pr, 3, 16).unwrap() {
                let vals = valuations_above(&psi_image(cls.rep()).unwrap(), &prm).unwrap();
                match vals {
                    Valuations::Split(a, b) | Valuations::Rational(a, b) => {
                        assert_eq!(a.min(b), 0, "({pp},{qq},{p}) class {cls}")
                    }
                    _ => {}
                }
            }
        }
    }
}
