//! Acceptance suite: one test per verification target, exact equality
//! throughout, each with its runtime budget. Every test prints a single
//! PASS line (visible with --nocapture) and the test name doubles as the
//! criterion label.

use std::time::{Duration, Instant};

use laxton::arith::rat::{is_square_rat, rat, rat_of};
use laxton::equivalence::{decide_star_equiv, normalize};
use laxton::{
    crosscheck_structure, enumerate_g, enumerate_g_star, rank, unit_quotient,
    verify_exact_sequence, ClassVector, PrimeP, RecurrenceParams, RingCtx, Scalar, SplittingType,
    StarDecision, Verdict,
};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(name: &str, started: Instant, budget: Duration) {
    let elapsed = started.elapsed();
    println!("{name}: PASS in {elapsed:?} (budget {budget:?})");
    assert!(
        elapsed < budget,
        "{name} exceeded its runtime budget: {elapsed:?} > {budget:?}"
    );
}

fn random_params(rng: &mut ChaCha8Rng) -> RecurrenceParams {
    loop {
        let p = rng.gen_range(-50i64..=50);
        let q = rng.gen_range(-50i64..=50);
        if q == 0 || p * p == 4 * q {
            continue;
        }
        return RecurrenceParams::from_i64(p, q).unwrap();
    }
}

fn prime_avoiding(q: &BigInt, rng: &mut ChaCha8Rng) -> PrimeP {
    let pool = [2u64, 3, 5, 7, 11, 13, 17, 19, 23];
    loop {
        let p = PrimeP::from_u64(pool[rng.gen_range(0..pool.len())]).unwrap();
        if !p.divides(q) {
            return p;
        }
    }
}

/// The sweep box of criteria 4-6: |P|, |Q| <= 10, Q != 0, D != 0,
/// p < 100 prime, p not dividing Q.
fn sweep_box() -> Vec<(RecurrenceParams, PrimeP)> {
    let primes: Vec<PrimeP> = laxton::arith::primes_below(100)
        .into_iter()
        .map(|p| PrimeP::from_u64(p).unwrap())
        .collect();
    let mut out = Vec::new();
    for p in -10i64..=10 {
        for q in -10i64..=10 {
            if q == 0 || p * p == 4 * q {
                continue;
            }
            let params = RecurrenceParams::from_i64(p, q).unwrap();
            for prime in &primes {
                if prime.divides(params.q()) {
                    continue;
                }
                out.push((params.clone(), prime.clone()));
            }
        }
    }
    out
}

#[test]
fn criterion_1_laxton_product_equals_induced_product() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xA1);
    let params: Vec<RecurrenceParams> = (0..20).map(|_| random_params(&mut rng)).collect();
    let pairs_per_ctx_per_params = 10_000 / params.len();
    let mut checked = 0u64;
    for pr in &params {
        let prime = prime_avoiding(pr.q(), &mut rng);
        let contexts = [
            RingCtx::Rationals,
            RingCtx::Localized(prime.clone()),
            RingCtx::PrimeField(prime.clone()),
        ];
        for ctx in contexts {
            for _ in 0..pairs_per_ctx_per_params {
                let a = random_vector(pr, &ctx, &mut rng);
                let b = random_vector(pr, &ctx, &mut rng);
                assert_eq!(
                    a.laxton_mul(&b).unwrap(),
                    a.mul(&b).unwrap(),
                    "differential failure at {pr} over {}",
                    ctx.name()
                );
                checked += 1;
            }
        }
    }
    assert!(checked >= 30_000);
    report(
        "criterion 1 (Laxton product = quotient-ring product, bitwise)",
        started,
        Duration::from_secs(5),
    );
}

fn random_vector(pr: &RecurrenceParams, ctx: &RingCtx, rng: &mut ChaCha8Rng) -> ClassVector {
    loop {
        let v = match ctx {
            RingCtx::Rationals => ClassVector::from_rats(
                rat(rng.gen_range(-999i64..=999)) / rat(rng.gen_range(1i64..=99)),
                rat(rng.gen_range(-999i64..=999)) / rat(rng.gen_range(1i64..=99)),
                pr.clone(),
                ctx.clone(),
            ),
            _ => ClassVector::from_ints(
                rng.gen_range(-999i64..=999),
                rng.gen_range(-999i64..=999),
                pr,
                ctx,
            ),
        }
        .unwrap();
        if v.is_unit_class() {
            return v;
        }
    }
}

#[test]
fn criterion_2_norm_homomorphism_and_shift_law() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xA2);
    for _ in 0..1000 {
        let pr = random_params(&mut rng);
        let ctx = RingCtx::Rationals;
        let a = random_vector(&pr, &ctx, &mut rng);
        let b = random_vector(&pr, &ctx, &mut rng);
        assert_eq!(
            a.mul(&b).unwrap().lambda(),
            ctx.mul(&a.lambda(), &b.lambda())
        );
        let n = rng.gen_range(-20i64..=20);
        let q = rat_of(pr.q());
        let qn = if n >= 0 {
            num_traits::pow::Pow::pow(&q, n as u64)
        } else {
            num_traits::pow::Pow::pow(&q.recip(), (-n) as u64)
        };
        let lhs = a.shift(n).unwrap().lambda().as_rat().unwrap().clone();
        assert_eq!(lhs, qn * a.lambda().as_rat().unwrap());
    }
    report(
        "criterion 2 (norm homomorphism and shift law, exact)",
        started,
        Duration::from_secs(2),
    );
}

#[test]
fn criterion_3_rank_law_below_1000() {
    let started = Instant::now();
    let pr = RecurrenceParams::from_i64(1, -1).unwrap();
    let mut count = 0;
    for p in laxton::arith::primes_below(1000) {
        let prime = PrimeP::from_u64(p).unwrap();
        let rk = rank(&pr, &prime).unwrap();
        // Lemma check with the independent table-order route.
        let g = enumerate_g(&pr, &prime).unwrap();
        assert_eq!(rk.r, g.element_order((0, 1)), "p = {p}");
        // Divisibility r(p) | p - (D/p) for p coprime to 2QD (D = 5).
        if p != 2 && p != 5 {
            let leg = laxton::arith::prime::legendre(pr.disc(), &prime);
            let target = (p as i64 - leg as i64) as u64;
            assert_eq!(target % rk.r, 0, "p = {p}: r = {} vs {target}", rk.r);
        }
        if p == 2 {
            assert_eq!(rk.r, 3, "P = 1 is odd so r(2) = 3");
        }
        count += 1;
    }
    assert_eq!(count, 168);
    report(
        "criterion 3 (rank = order of [0,1], divisibility, parity rule)",
        started,
        Duration::from_secs(10),
    );
}

#[test]
fn criterion_4_group_order_trichotomy() {
    let started = Instant::now();
    let mut instances = 0u64;
    for (params, prime) in sweep_box() {
        let g = enumerate_g(&params, &prime).unwrap();
        let p = prime.to_u64().unwrap();
        // The trichotomy follows the factorization of f mod p: p | D means
        // a double root (order p) regardless of how p behaves in the field;
        // otherwise inert means irreducible mod p (order p+1) and
        // split/rational mean two distinct roots (order p-1).
        let expected = if prime.divides(params.disc()) {
            p
        } else {
            match params.splitting_type(&prime).unwrap() {
                SplittingType::Inert => p + 1,
                SplittingType::Split | SplittingType::RationalField => p - 1,
                SplittingType::Ramified => unreachable!("ramified forces p | D"),
            }
        };
        assert_eq!(
            g.order() as u64,
            expected,
            "trichotomy failed at ({}, {})",
            params,
            p
        );
        if let Some(e) = laxton::expected_g_order(&params, &prime) {
            assert_eq!(e, expected);
        }
        instances += 1;
    }
    assert!(instances > 9000, "box unexpectedly small: {instances}");
    report(
        "criterion 4 (group-order trichotomy, zero exceptions)",
        started,
        Duration::from_secs(60),
    );
}

#[test]
fn criterion_5_exact_sequence_on_box() {
    let started = Instant::now();
    for (params, prime) in sweep_box() {
        let rep = verify_exact_sequence(&params, &prime).unwrap();
        assert!(
            rep.all_ok(),
            "exact sequence failed at ({params}, {prime}): {:?}",
            rep.failures
        );
        assert_eq!(rep.gstar_order * rep.rank, rep.g_order);
        assert_eq!(rep.star_coset_count, rep.gstar_order);
    }
    report(
        "criterion 5 (exact sequence: |K*/G*| = |G*| = |G|/r, kernel + surjectivity)",
        started,
        Duration::from_secs(60),
    );
}

#[test]
fn criterion_6_structure_crosscheck_on_box() {
    let started = Instant::now();
    let mut matches = 0u64;
    let mut s2_match = 0u64;
    for (params, prime) in sweep_box() {
        let rep = crosscheck_structure(&params, &prime).unwrap();
        let p = prime.to_u64().unwrap();
        let documented_exclusion = (p == 2 && rep.s >= 2)
            || (p == 3 && rep.splitting == SplittingType::Ramified && rep.s % 2 == 1 && rep.s >= 3);
        match rep.verdict {
            Verdict::Mismatch => panic!(
                "mismatch at ({params}, {p}): computed {:?} vs predicted {:?}",
                rep.computed_kstar_gstar, rep.prediction
            ),
            Verdict::Match => {
                assert!(
                    !documented_exclusion,
                    "({params}, {p}) should be out of formula range"
                );
                matches += 1;
                if rep.s >= 2 {
                    s2_match += 1;
                }
            }
            Verdict::OutOfFormulaRange => {
                assert!(
                    documented_exclusion,
                    "unexpected out-of-range at ({params}, {p}), s = {}, {}",
                    rep.s, rep.splitting
                );
            }
        }
    }
    assert!(matches > 8000);
    // The box contains s >= 2 instances in formula range (inert order
    // (p+1)p^(s/2-1) and rational order (p-1)p^(s/2-1) cases).
    assert!(s2_match >= 10, "expected s >= 2 coverage, got {s2_match}");
    report(
        "criterion 6 (closed-form predictions match enumeration on the box)",
        started,
        Duration::from_secs(120),
    );
}

#[test]
fn criterion_7_unit_quotient_closed_forms() {
    let started = Instant::now();
    // Handpicked instances with s >= 2, five or more per splitting type.
    // Expected values are the closed forms: inert p^(s/2-1)(p+1),
    // split p^(s/2-1)(p-1), ramified (p != 2,3) p^[s/2].
    let inert: [(i64, i64, u64, u32, &[u64]); 5] = [
        (2, -17, 3, 2, &[4]),
        (4, -14, 3, 2, &[4]),
        (8, -2, 3, 2, &[4]),
        (2, -49, 5, 2, &[6]),
        (1, -101, 3, 4, &[12]),
    ];
    let split: [(i64, i64, u64, u32, &[u64]); 5] = [
        (1, -29, 3, 2, &[2]),
        (2, -62, 3, 2, &[2]),
        (2, -149, 5, 2, &[4]),
        (4, -271, 5, 2, &[4]),
        (1, -263, 3, 4, &[6]),
    ];
    let ramified: [(i64, i64, u64, u32, &[u64]); 3] = [
        (1, -31, 5, 3, &[5]),
        (2, -342, 7, 3, &[7]),
        (1, -781, 5, 5, &[25]),
    ];
    let check = |list: &[(i64, i64, u64, u32, &[u64])], ty: SplittingType| {
        for &(pc, qc, p, s, expect) in list {
            let params = RecurrenceParams::from_i64(pc, qc).unwrap();
            let prime = PrimeP::from_u64(p).unwrap();
            assert_eq!(params.splitting_type(&prime).unwrap(), ty, "({pc},{qc},{p})");
            let (s_got, _) = params.local_decomp(&prime);
            assert_eq!(s_got, s, "({pc},{qc},{p})");
            let uq = unit_quotient(&params, &prime, s / 2).unwrap();
            assert_eq!(uq, expect.to_vec(), "({pc},{qc},{p})");
        }
    };
    check(&inert, SplittingType::Inert);
    check(&split, SplittingType::Split);
    check(&ramified, SplittingType::Ramified);

    // Ramified p = 3 with odd s >= 3: the disjunction. Every instance must
    // report one of the two listed groups; both branches occur.
    let p3: [(i64, i64, u32); 5] = [
        (2, -26, 3),
        (4, -23, 3),
        (10, -2, 3),
        (2, -242, 5),
        (2, -485, 5),
    ];
    let three = PrimeP::from_u64(3).unwrap();
    let mut branches = [0u64; 2];
    for &(pc, qc, s) in &p3 {
        let params = RecurrenceParams::from_i64(pc, qc).unwrap();
        assert_eq!(
            params.splitting_type(&three).unwrap(),
            SplittingType::Ramified
        );
        let (s_got, _) = params.local_decomp(&three);
        assert_eq!(s_got, s, "({pc},{qc})");
        let k = s / 2;
        let uq = unit_quotient(&params, &three, k).unwrap();
        let opt_a: Vec<u64> = vec![3u64.pow(k)];
        let opt_b: Vec<u64> = if k >= 2 { vec![3, 3u64.pow(k - 1)] } else { vec![3] };
        if uq == opt_a {
            branches[0] += 1;
        } else if uq == opt_b {
            branches[1] += 1;
        } else {
            panic!("({pc},{qc},3): {uq:?} is neither listed option");
        }
    }
    assert!(branches[0] > 0 && branches[1] > 0, "both branches should occur: {branches:?}");

    // Full structure crosscheck on the non-excluded ramified instances:
    // exercises the 2p^[s/2] composite order.
    for (pc, qc, p) in [(1i64, -31i64, 5u64), (2, -342, 7), (1, -781, 5)] {
        let rep = crosscheck_structure(
            &RecurrenceParams::from_i64(pc, qc).unwrap(),
            &PrimeP::from_u64(p).unwrap(),
        )
        .unwrap();
        assert_eq!(rep.verdict, Verdict::Match, "({pc},{qc},{p})");
    }
    report(
        "criterion 7 (unit-quotient enumeration matches the closed forms)",
        started,
        Duration::from_secs(30),
    );
}

#[test]
fn criterion_8_star_equivalence_soundness() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xA8);
    let ctx = RingCtx::Rationals;

    // 500 genuinely equivalent pairs: the decision must say so and the
    // returned (nu, lambda) must reproduce the relation exactly.
    let mut checked = 0;
    while checked < 500 {
        let pr = random_params(&mut rng);
        let b = random_vector_small(&pr, &mut rng);
        let nu = rng.gen_range(-10i64..=10);
        let lam = loop {
            let n = rng.gen_range(-9i64..=9);
            if n != 0 {
                break rat(n) / rat(rng.gen_range(1i64..=9));
            }
        };
        let a = b.shift(nu).unwrap().scale(&Scalar::Rat(lam.clone()));
        match decide_star_equiv(&a, &b).unwrap() {
            StarDecision::Equivalent { nu: got_nu, lambda } => {
                let re = b
                    .shift(got_nu)
                    .unwrap()
                    .scale(&lambda);
                assert_eq!(re, a, "returned relation must reproduce a exactly");
                if !ratio_is_torsion(&pr) {
                    assert_eq!(got_nu, nu, "unique shift must be recovered at {pr}");
                }
            }
            other => panic!("expected equivalence at {pr}, nu = {nu}: {other:?}"),
        }
        checked += 1;
    }

    // 500 pairs carrying the norm-form obstruction: the decision must
    // refuse them.
    let mut refused = 0;
    while refused < 500 {
        let pr = random_params(&mut rng);
        let a = random_vector_small(&pr, &mut rng);
        let b = random_vector_small(&pr, &mut rng);
        let rho = a.lambda().as_rat().unwrap() / b.lambda().as_rat().unwrap();
        let q = rat_of(pr.q());
        if is_square_rat(&rho) || is_square_rat(&(&rho * &q)) {
            continue; // no obstruction; skip
        }
        assert!(
            !decide_star_equiv(&a, &b).unwrap().is_equivalent(),
            "obstructed pair declared equivalent at {pr}"
        );
        refused += 1;
    }
    report(
        "criterion 8 (star-equivalence decision: 500 sound + 500 complete)",
        started,
        Duration::from_secs(30),
    );
}

fn random_vector_small(pr: &RecurrenceParams, rng: &mut ChaCha8Rng) -> ClassVector {
    loop {
        let v = ClassVector::from_ints(
            rng.gen_range(-20i64..=20),
            rng.gen_range(-20i64..=20),
            pr,
            &RingCtx::Rationals,
        )
        .unwrap();
        if v.is_unit_class() {
            return v;
        }
    }
}

/// Is θ1/θ2 a root of unity (shift recovery is then only unique modulo its
/// order)? Detected from the trace (P^2 - 2Q)/Q for irreducible f, and from
/// θ1 = -θ2 in the reducible case.
fn ratio_is_torsion(pr: &RecurrenceParams) -> bool {
    if pr.is_irreducible() {
        let num = pr.p() * pr.p() - BigInt::from(2) * pr.q();
        let (tr, rem) = num_integer::Integer::div_rem(&num, pr.q());
        rem.is_zero() && tr >= BigInt::from(-2) && tr <= BigInt::from(1)
    } else {
        pr.p().is_zero()
    }
}

// The identity class stays fixed under the whole machinery: a smoke test
// that ties several layers together.
#[test]
fn identity_class_is_inert_everywhere() {
    let pr = RecurrenceParams::from_i64(1, -1).unwrap();
    let id = normalize(&ClassVector::identity(&pr, &RingCtx::Rationals).unwrap()).unwrap();
    for p in [2u64, 3, 5, 7, 11] {
        let prime = PrimeP::from_u64(p).unwrap();
        let rep = laxton::membership(&id, &prime).unwrap();
        assert!(rep.in_g && rep.in_k && rep.in_h);
        let gs = enumerate_g_star(&pr, &prime).unwrap();
        assert!(gs.order() >= 1);
    }
}
