//! Noncompact families over the standard form `−x₀² + x₁² + ⋯ + xₙ²`.
//!
//! A target `r` is written as `b² − 2c − 1`, and `w = (c+1, b, c, 0, …, 0)`
//! then has `f(w) = r`. The hyperplane `w^⊥` is compared against
//! `R₀ = e₁^⊥`, for which `cosh² d = w₁² / f(w)`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certificate::{Case, Construction, FamilyCertificate, Flag, Mode, Smoothness, Target, SCHEMA_VERSION};
use crate::error::{Error, Result};
use crate::geometry::{LorentzForm, NormalVector};
use crate::interval::distance_interval;
use crate::isqrt::isqrt_floor;
use crate::quad::{Field, QuadElem, Sign};
use crate::rational::{serde_bigint, Rational};
use crate::smooth::{factorize, is_prime_u64, is_t_smooth, smooth_targets};
use crate::tracering::TraceRingBound;

/// `r = b² − 2c − 1` with `0 ≤ c ≤ 2b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Decomposition {
    #[serde(with = "serde_bigint")]
    pub r: BigInt,
    #[serde(with = "serde_bigint")]
    pub b: BigInt,
    #[serde(with = "serde_bigint")]
    pub c: BigInt,
}

impl Decomposition {
    /// Checks the identity and the range of `c`; `Err` carries a witness.
    pub fn check(&self) -> std::result::Result<(), String> {
        let lhs: BigInt = &self.b * &self.b - &self.c * 2 - 1;
        if lhs != self.r {
            return Err(format!("{}^2 - 2*{} - 1 = {} != {}", self.b, self.c, lhs, self.r));
        }
        if !self.b.is_positive() {
            return Err(format!("b = {} is not positive", self.b));
        }
        if self.c.is_negative() || self.c > &self.b * 2 {
            return Err(format!("c = {} is outside [0, 2b] = [0, {}]", self.c, &self.b * 2));
        }
        Ok(())
    }
}

/// Smallest `b ≥ ⌈√(r+1)⌉` with `b² − r − 1` even, and `c = (b² − r − 1)/2`.
pub fn decompose(r: &BigInt) -> Result<Decomposition> {
    if !r.is_positive() {
        return Err(Error::InvalidParameter(format!("target r = {r} must be positive")));
    }
    let r1: BigInt = r + 1;
    let mut b = BigInt::from(isqrt_floor(r1.magnitude()));
    if &b * &b < r1 {
        b += 1;
    }
    if (&b * &b - &r1).is_odd() {
        b += 1;
    }
    let c = (&b * &b - &r1) / 2;
    let dec = Decomposition { r: r.clone(), b, c };
    debug_assert!(dec.check().is_ok());
    Ok(dec)
}

/// `(c+1, b, c, 0, …, 0)` as a normal vector of the standard form in dimension `n`.
pub fn build_w_noncompact(dec: &Decomposition, n: usize) -> Result<NormalVector> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("dimension n = {n} must be at least 3")));
    }
    dec.check().map_err(Error::InvalidParameter)?;
    let form = LorentzForm::standard(n)?;
    let f = Field::Rational;
    let mut comps = vec![
        QuadElem::from_int(f, &dec.c + 1),
        QuadElem::from_int(f, dec.b.clone()),
        QuadElem::from_int(f, dec.c.clone()),
    ];
    comps.resize(n + 1, QuadElem::zero(f));
    NormalVector::new(form, comps)
}

/// Exact signs behind `w₁² > f(w) > 0` and the ratio `w₁² / f(w)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SeparationReport {
    pub ultraparallel_holds: bool,
    pub positivity_holds: bool,
    pub ratio: QuadElem,
    pub ratio_minus_one_sign: Sign,
}

impl SeparationReport {
    pub fn holds(&self) -> bool {
        self.ultraparallel_holds && self.positivity_holds
    }
}

/// Builds the report from `w₁²` and `f(w)`.
pub fn separation_from_parts(w1_sq: &QuadElem, fw: &QuadElem) -> Result<SeparationReport> {
    if fw.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let ratio = w1_sq.checked_div(fw)?;
    let one = QuadElem::one(ratio.field());
    Ok(SeparationReport {
        ultraparallel_holds: w1_sq.checked_sub(fw)?.sign_identity() == Sign::Positive,
        positivity_holds: fw.sign_identity() == Sign::Positive,
        ratio_minus_one_sign: ratio.checked_sub(&one)?.sign_identity(),
        ratio,
    })
}

/// Separation data for `w` against `R₀ = e₁^⊥`.
pub fn check_separation(w: &NormalVector) -> Result<SeparationReport> {
    let w1 = w
        .components()
        .get(1)
        .ok_or(Error::DimensionMismatch { expected: 2, got: w.components().len() })?;
    separation_from_parts(&w1.square(), w.norm())
}

/// `ratio − 1 ≤ (4⌈√(r+1)⌉ + 6)/r`, compared exactly.
pub fn ratio_bound_holds(ratio: &Rational, r: &BigInt) -> bool {
    let r1: BigInt = r + 1;
    let mut s = BigInt::from(isqrt_floor(r1.magnitude()));
    if &s * &s < r1 {
        s += 1;
    }
    let bound = Rational::new(s * 4 + 6, r.clone());
    ratio - Rational::one() <= bound
}

/// Certificate for a single target `r`, smoothness recorded against `t`.
pub fn noncompact_certificate(
    r: &BigInt,
    k: u32,
    prime: Option<u64>,
    t: u64,
    n: usize,
    width: &Rational,
) -> Result<FamilyCertificate> {
    let dec = decompose(r)?;
    let w = build_w_noncompact(&dec, n)?;
    let separation = check_separation(&w)?;
    let fw = r.to_biguint().expect("positive target");
    let factorization = factorize(&fw)?;
    let verdict = factorization.primes().all(|p| p < t);
    let trace_ring_bound = TraceRingBound::rational(&fw)?;
    let cosh_sq = separation.ratio.clone();
    let mut flags = Vec::new();
    let distance = if separation.ratio_minus_one_sign == Sign::Negative {
        flags.push(Flag::NotUltraparallel);
        None
    } else {
        Some(distance_interval(&cosh_sq, width)?)
    };
    if !separation.holds() {
        flags.push(Flag::SeparationFailed);
    }
    if !verdict {
        flags.push(Flag::NotSmooth);
    }
    flags.sort();
    let form = w.form().clone();
    Ok(FamilyCertificate {
        schema_version: SCHEMA_VERSION,
        case: Case::Noncompact,
        ambient_group_key: form.ambient_group_key(),
        k,
        target: Target::Integer { r: r.clone(), prime },
        w: Some(w.components().to_vec()),
        construction: Construction::Decomposition(dec),
        separation,
        cosh_sq,
        systole_upper_bound: distance.as_ref().map(|d| d.scaled(2)),
        distance,
        width: width.clone(),
        smoothness: Some(Smoothness { t, verdict, factorization }),
        trace_ring_bound,
        diagnostics: None,
        mode: Mode::Explicit,
        flags,
        form,
    })
}

/// Family with targets `r_k = p^k` for `k = 1..=kmax`, smoothness bound `T = p+1`.
pub fn gen_noncompact_family(p: u64, kmax: u32, n: usize, width: &Rational) -> Result<Vec<FamilyCertificate>> {
    if kmax == 0 {
        return Err(Error::InvalidParameter("kmax must be at least 1".into()));
    }
    if !is_prime_u64(p) {
        return Err(Error::NotPrime(p.to_string()));
    }
    if n < 3 {
        return Err(Error::InvalidParameter(format!("dimension n = {n} must be at least 3")));
    }
    if !width.is_positive() {
        return Err(Error::InvalidWidth);
    }
    let targets = smooth_targets(p, kmax)?;
    targets
        .par_iter()
        .enumerate()
        .map(|(i, r)| noncompact_certificate(&BigInt::from(r.clone()), i as u32 + 1, Some(p), p + 1, n, width))
        .collect()
}

/// Family over an arbitrary list of targets, each of which must be `t`-smooth.
pub fn gen_noncompact_from_targets(
    targets: &[BigUint],
    t: u64,
    n: usize,
    width: &Rational,
) -> Result<Vec<FamilyCertificate>> {
    if targets.is_empty() {
        return Err(Error::EmptyInput);
    }
    if t < 2 {
        return Err(Error::InvalidParameter(format!("smoothness bound T = {t} must exceed 1")));
    }
    if !width.is_positive() {
        return Err(Error::InvalidWidth);
    }
    for r in targets {
        if r.is_zero() {
            return Err(Error::InvalidParameter("targets must be positive".into()));
        }
        if !is_t_smooth(r, t)? {
            return Err(Error::InvalidParameter(format!("target {r} is not {t}-smooth")));
        }
    }
    targets
        .par_iter()
        .enumerate()
        .map(|(i, r)| noncompact_certificate(&BigInt::from(r.clone()), i as u32 + 1, None, t, n, width))
        .collect()
}

/// First index from which the ratios decrease strictly to the end, if any.
pub fn strict_decrease_onset(ratios: &[QuadElem]) -> Option<usize> {
    if ratios.is_empty() {
        return None;
    }
    let mut onset = ratios.len() - 1;
    while onset > 0 && ratios[onset - 1].cmp_identity(&ratios[onset]) == std::cmp::Ordering::Greater {
        onset -= 1;
    }
    Some(onset)
}
