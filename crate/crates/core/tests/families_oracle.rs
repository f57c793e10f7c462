mod common;

use std::collections::HashSet;

use common::{q, Pair, Q};
use hypcert_core::compact::{build_w_compact, check_separation_compact, compute_step, make_explicit, validate_rho};
use hypcert_core::noncompact::{build_w_noncompact, check_separation, decompose, ratio_bound_holds};
use hypcert_core::three_squares::{three_squares_decompose, verify_three_squares, DEFAULT_BUDGET};
use hypcert_core::tracering::{factor_principal_ideal, prime_kind};
use hypcert_core::{Field, PrimeKind, QuadElem, TraceRingBound};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use proptest::prelude::*;

/// Minimal `b` by scanning upward from 1, with no square roots involved.
fn brute_decompose(r: u64) -> (u64, u64) {
    (1u64..)
        .find_map(|b| {
            let t = (b * b).checked_sub(r + 1)?;
            (t % 2 == 0 && t / 2 <= 2 * b).then_some((b, t / 2))
        })
        .unwrap()
}

#[test]
fn decompose_matches_scan_up_to_1e5() {
    for r in 1..=100_000u64 {
        let d = decompose(&BigInt::from(r)).unwrap();
        let (b, c) = brute_decompose(r);
        assert_eq!((d.b.to_u64().unwrap(), d.c.to_u64().unwrap()), (b, c), "r={r}");
    }
    assert!(decompose(&BigInt::zero()).is_err());
    assert!(decompose(&BigInt::from(-4)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn noncompact_vector_hits_target(r in 1u64..1_000_000_000_000, ni in 0usize..3) {
        let n = [3, 4, 7][ni];
        let r = BigInt::from(r);
        let dec = decompose(&r).unwrap();
        prop_assert!(dec.check().is_ok());
        let w = build_w_noncompact(&dec, n).unwrap();
        prop_assert_eq!(w.components().len(), n + 1);
        // f(w) recomputed by hand: -w0² + Σ wi²
        let c = w.components();
        let mut sum = -c[0].square();
        for x in &c[1..] {
            sum = &sum + &x.square();
        }
        prop_assert_eq!(&sum, &QuadElem::from_int(Field::Rational, r.clone()));
        prop_assert_eq!(w.norm(), &sum);
        let sep = check_separation(&w).unwrap();
        prop_assert!(sep.holds());
        prop_assert!(ratio_bound_holds(sep.ratio.a(), &r));
    }
}

#[test]
fn ratio_bound_is_tight_enough_to_fail() {
    // ratio - 1 equal to the bound passes, anything larger fails
    let r = BigInt::from(31);
    let bound = Q::new(BigInt::from(4 * 6 + 6), r.clone());
    assert!(ratio_bound_holds(&(Q::one() + &bound), &r));
    assert!(!ratio_bound_holds(&(Q::one() + &bound + q(1, 1000)), &r));
}

/// `ρ^k`, `α`, `β`, `ε` for `ρ = 6 + √5` from integer recurrences only.
struct Hand {
    u: BigInt,
    v: BigInt,
    m: BigInt,
    y: BigInt,
    s: BigInt,
    eps: (BigInt, BigInt),
}

fn hand_steps(kmax: u32) -> Vec<Hand> {
    let (mut u, mut v) = (BigInt::one(), BigInt::zero());
    let mut out = Vec::new();
    for _ in 0..kmax {
        (u, v) = (&u * 6 + &v * 5, &u + &v * 6);
        // ⌈x⌉: least m with m² + v ≥ u/√5, i.e. m² + v ≥ 0 and 5(m² + v)² ≥ u²
        let ok = |m: &BigInt| {
            let t: BigInt = m * m + &v;
            !t.is_negative() && &t * &t * 5 >= &u * &u
        };
        let t: BigInt = &u * &u / 5;
        let mut m = (t.sqrt() - &v).max(BigInt::zero()).sqrt();
        while m.is_positive() && ok(&(&m - 1)) {
            m -= 1;
        }
        while !ok(&m) {
            m += 1;
        }
        let tenth: BigInt = &u / 10;
        let mut y = tenth.sqrt();
        while BigInt::from(10) * (&y + 1) * (&y + 1) <= u {
            y += 1;
        }
        let y5: BigInt = &y * &y * 5;
        let s = y5.sqrt();
        let a = &u + &m * 10 - &s * &s - &y * &y * 5;
        let b = &v + &m * &m + 5 - &s * &y * 2;
        out.push(Hand { u: u.clone(), v: v.clone(), m, y, s, eps: (a, b) });
    }
    out
}

fn pair(a: &BigInt, b: &BigInt) -> Pair {
    Pair::new(Q::from_integer(a.clone()), Q::from_integer(b.clone()), 5)
}

#[test]
fn compact_steps_match_integer_recurrences() {
    let f = Field::sqrt5();
    let rho = validate_rho(&QuadElem::from_ints(f, 6, 1)).unwrap();
    assert!(rho.validated);
    let hands = hand_steps(60);
    let mut sep = Vec::new();
    for (i, h) in hands.iter().enumerate() {
        let k = i as u32 + 1;
        let st = compute_step(&rho, k).unwrap();
        assert_eq!((&st.u, &st.v), (&h.u, &h.v), "k={k}");
        assert_eq!(st.alpha, QuadElem::from_ints(f, h.m.clone(), 1), "k={k}");
        assert_eq!(st.y, h.y);
        assert_eq!(st.beta, QuadElem::from_ints(f, h.s.clone(), h.y.clone()));
        assert_eq!(st.epsilon, QuadElem::from_ints(f, h.eps.0.clone(), h.eps.1.clone()), "k={k}");
        let e = pair(&h.eps.0, &h.eps.1);
        assert_eq!(st.epsilon_totally_positive, e.sign() > 0 && e.sign_conj() > 0);
        // w₁² = β² against f(w) = ρ^k
        let beta_sq = pair(&h.s, &h.y).mul(&pair(&h.s, &h.y));
        let holds = beta_sq.sub(&pair(&h.u, &h.v)).sign() > 0;
        assert_eq!(check_separation_compact(&st).unwrap().holds(), holds, "k={k}");
        sep.push(holds);
    }
    let failing: Vec<usize> = sep.iter().enumerate().filter(|(_, h)| !**h).map(|(i, _)| i + 1).collect();
    assert_eq!(failing, [1, 3, 4, 5, 6, 8]);
}

#[test]
fn compact_explicit_vectors() {
    let f = Field::sqrt5();
    let rho = validate_rho(&QuadElem::from_ints(f, 6, 1)).unwrap();
    for k in 1..=8 {
        let st = make_explicit(&compute_step(&rho, k).unwrap(), DEFAULT_BUDGET).unwrap();
        for n in [4, 6] {
            let w = build_w_compact(&st, n).unwrap();
            assert_eq!(w.norm(), &st.rho_k(), "k={k} n={n}");
            assert!(w.components().iter().all(QuadElem::is_algebraic_integer));
        }
        assert!(build_w_compact(&st, 3).is_err());
    }
    // σ(ρ)² > ρ fails for 2 + √5, and ℤ[√5] membership is required
    assert!(!validate_rho(&QuadElem::from_ints(f, 2, 1)).unwrap().validated);
    assert!(validate_rho(&QuadElem::new(f, q(13, 2), q(1, 2)).unwrap()).is_err());
}

/// Pairs `(P, Q)` standing for `(P + Q√5)/2`.
type Half = (i64, i64);

fn square(g: Half) -> Half {
    ((g.0 * g.0 + 5 * g.1 * g.1) / 2, g.0 * g.1)
}

fn brute_three_squares_exists(eps: Half, candidates: &[Half]) -> bool {
    let sq: Vec<Half> = candidates.iter().map(|&g| square(g)).collect();
    let two: HashSet<Half> = sq.iter().flat_map(|a| sq.iter().map(move |b| (a.0 + b.0, a.1 + b.1))).collect();
    sq.iter().any(|s| two.contains(&(eps.0 - s.0, eps.1 - s.1)))
}

#[test]
fn three_squares_against_exhaustive_search() {
    const BOUND: i64 = 30;
    let f = Field::sqrt5();
    // every γ with both embeddings of γ² at most BOUND
    let mut cands = Vec::new();
    for p in -12i64..=12 {
        for qq in -6i64..=6 {
            if (p - qq) % 2 != 0 {
                continue;
            }
            let (a, b) = square((p, qq));
            if a <= 2 * BOUND && (2 * BOUND - a) * (2 * BOUND - a) >= 5 * b * b {
                cands.push((p, qq));
            }
        }
    }
    let mut tested = 0;
    for p in 1..=2 * BOUND {
        for qq in -2 * BOUND..=2 * BOUND {
            let totally_positive = p * p > 5 * qq * qq;
            let small = 2 * BOUND - p >= 0 && (2 * BOUND - p) * (2 * BOUND - p) >= 5 * qq * qq;
            if (p - qq) % 2 != 0 || !totally_positive || !small {
                continue;
            }
            let eps = QuadElem::new(f, q(p, 2), q(qq, 2)).unwrap();
            assert!(brute_three_squares_exists((p, qq), &cands), "{eps}");
            let g = three_squares_decompose(&eps, DEFAULT_BUDGET).unwrap();
            assert!(verify_three_squares(&eps, &g), "{eps}");
            tested += 1;
        }
    }
    assert!(tested > 100);
    // 7 has no representation as three rational integer squares
    let seven = QuadElem::from_int(Field::Rational, 7);
    assert!(three_squares_decompose(&seven, DEFAULT_BUDGET).is_err());
    assert!(!brute_rational(7) && brute_rational(6));
}

fn brute_rational(n: i64) -> bool {
    (0..=n).any(|a| (a..=n).any(|b| (b..=n).any(|c| a * a + b * b + c * c == n)))
}

/// `d` is a square mod odd `p`, by listing all squares.
fn is_square_mod(d: u64, p: u64) -> bool {
    (0..p).any(|x| x * x % p == d % p)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn principal_ideal_factors(di in 0usize..5, a in -300i64..300, b in -300i64..300, half in any::<bool>()) {
        let d = [2u64, 3, 5, 13, 17][di];
        let f = Field::quadratic(d).unwrap();
        let (an, bn, den) = if half && d % 4 == 1 { (2 * a + 1, 2 * b + 1, 2) } else { (a, b, 1) };
        let rho = QuadElem::new(f, q(an, den), q(bn, den)).unwrap();
        prop_assume!(!rho.norm().is_zero());
        let factors = factor_principal_ideal(&rho).unwrap();
        let norm: BigUint = factors.iter().fold(BigUint::one(), |acc, p| acc * BigUint::from(p.residue_norm()).pow(p.exponent));
        prop_assert_eq!(BigInt::from(norm), rho.norm().abs().to_integer());
        for fac in &factors {
            let expected = if fac.p == 2 {
                prime_kind(d, 2)
            } else if d.is_multiple_of(fac.p) {
                PrimeKind::Ramified
            } else if is_square_mod(d, fac.p) {
                PrimeKind::Split
            } else {
                PrimeKind::Inert
            };
            prop_assert_eq!(fac.kind, expected);
            if fac.kind == PrimeKind::Split && fac.p != 2 {
                // ρ maps to 0 under √d ↦ branch (mod p)
                let r = fac.branch.unwrap() as i64;
                let p = fac.p as i64;
                let inv2 = if den == 2 { (p + 1) / 2 } else { 1 };
                let residue = (an.rem_euclid(p) + bn.rem_euclid(p) * r % p) % p * inv2 % p;
                prop_assert_eq!(residue, 0, "{} not in ideal ({}, sqrt{}-{})", rho, p, d, r);
            }
        }
        let bound = TraceRingBound::principal(&rho).unwrap();
        prop_assert_eq!(bound.subring_lattice().len(), 1 << bound.inverted().len());
    }
}

#[test]
fn lattices() {
    let z30 = TraceRingBound::rational(&BigUint::from(30u32)).unwrap();
    assert_eq!(z30.to_string(), "Z[1/30]");
    let lat = z30.subring_lattice();
    assert_eq!(lat.len(), 8);
    let names: HashSet<String> = lat.iter().map(|b| b.to_string()).collect();
    assert!(names.contains("Z") && names.contains("Z[1/15]") && names.contains("Z[1/30]"));

    let f = Field::sqrt5();
    let rho = QuadElem::from_ints(f, 6, 1);
    let facs = factor_principal_ideal(&rho).unwrap();
    assert_eq!(facs.len(), 1);
    assert_eq!((facs[0].p, facs[0].kind, facs[0].exponent, facs[0].residue_norm()), (31, PrimeKind::Split, 1, 31));
    assert_eq!(TraceRingBound::principal(&rho).unwrap().subring_lattice().len(), 2);
    // ρ^k has the same radical
    let b1 = TraceRingBound::principal(&rho).unwrap();
    for k in 2..6 {
        assert_eq!(TraceRingBound::principal(&rho.pow(k).unwrap()).unwrap(), b1);
    }
}
