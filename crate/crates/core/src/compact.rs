//! Compact families over `−√5 x₀² + x₁² + ⋯ + xₙ²` on ℚ(√5).
//!
//! For `ρ^k = u + v√5`, put `x = √(σ(ρ^k)/√5)`, `α = ⌈x⌉ + √5`,
//! `y = ⌊√(u/10)⌋`, `β = ⌊√5 y⌋ + √5 y` and `ε = ρ^k + √5 α² − β²`.
//! Writing `ε = γ₁² + γ₂² + γ₃²` gives `w = (α, β, γ₁, γ₂, γ₃, 0, …)`
//! with `f(w) = ρ^k`.

use num_bigint::BigInt;
use num_traits::{pow, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certificate::{Case, Construction, FamilyCertificate, Flag, Mode, Target, SCHEMA_VERSION};
use crate::error::{Error, Result};
use crate::geometry::{LorentzForm, NormalVector};
use crate::interval::distance_interval;
use crate::isqrt::isqrt_floor;
use crate::noncompact::{separation_from_parts, SeparationReport};
use crate::quad::{Field, IntegralityClass, QuadElem, Sign};
use crate::rational::{serde_bigint, Rational};
use crate::three_squares::three_squares_decompose;
use crate::tracering::TraceRingBound;

/// Digits used for decimal annotations.
pub const DECIMAL_DIGITS: usize = 12;

/// A candidate `ρ ∈ ℤ[√5]` together with the outcome of `σ(ρ)² > ρ > σ(ρ) > 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RhoParameter {
    pub rho: QuadElem,
    pub validated: bool,
}

impl RhoParameter {
    pub fn sigma(&self) -> QuadElem {
        self.rho.conjugate()
    }
}

pub fn validate_rho(rho: &QuadElem) -> Result<RhoParameter> {
    if rho.field() != Field::sqrt5() {
        return Err(Error::InvalidParameter(format!("rho = {rho} must lie in Q(sqrt5)")));
    }
    if !matches!(rho.integrality(), IntegralityClass::Z | IntegralityClass::ZSqrtD) {
        return Err(Error::NonIntegral(rho.to_string()));
    }
    let s = rho.conjugate();
    let one = QuadElem::one(rho.field());
    let positive = |x: QuadElem| x.sign_identity() == Sign::Positive;
    let validated = positive(&s.square() - rho) && positive(rho - &s) && positive(&s - &one);
    Ok(RhoParameter { rho: rho.clone(), validated })
}

/// Exact data of one index `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct CompactStep {
    pub k: u32,
    #[serde(with = "serde_bigint")]
    pub u: BigInt,
    #[serde(with = "serde_bigint")]
    pub v: BigInt,
    pub alpha: QuadElem,
    #[serde(with = "serde_bigint")]
    pub y: BigInt,
    pub beta: QuadElem,
    pub epsilon: QuadElem,
    pub epsilon_totally_positive: bool,
    pub gammas: Option<[QuadElem; 3]>,
    pub mode: Mode,
}

impl CompactStep {
    /// `ρ^k = u + v√5`.
    pub fn rho_k(&self) -> QuadElem {
        QuadElem::from_ints(Field::sqrt5(), self.u.clone(), self.v.clone())
    }
}

/// `⌈x⌉` for `x² = σ(ρ^k)/√5 = −v + (u/5)√5`.
pub fn x_ceil(u: &BigInt, v: &BigInt) -> Result<BigInt> {
    let x_sq = QuadElem::new(Field::sqrt5(), Rational::from_integer(-v), Rational::new(u.clone(), 5.into()))?;
    x_sq.sqrt_ceil_identity()
}

/// Largest `y` with `10 y² ≤ u`.
pub fn y_of(u: &BigInt) -> BigInt {
    if !u.is_positive() {
        return BigInt::zero();
    }
    let q: BigInt = u / 10;
    BigInt::from(isqrt_floor(&q.to_biguint().expect("nonnegative")))
}

/// `(α, β)` from `u, v`.
pub fn alpha_beta(u: &BigInt, v: &BigInt) -> Result<(QuadElem, BigInt, QuadElem)> {
    let f = Field::sqrt5();
    let alpha = QuadElem::from_ints(f, x_ceil(u, v)?, 1);
    let y = y_of(u);
    let five_y_sq: BigInt = &y * &y * 5;
    let floor_sqrt5y = BigInt::from(isqrt_floor(&five_y_sq.to_biguint().expect("square")));
    let beta = QuadElem::from_ints(f, floor_sqrt5y, y.clone());
    Ok((alpha, y, beta))
}

/// `ε = ρ^k + √5 α² − β²`.
pub fn epsilon_of(rho_k: &QuadElem, alpha: &QuadElem, beta: &QuadElem) -> Result<QuadElem> {
    let sqrt5 = QuadElem::sqrt_d(Field::sqrt5())?;
    Ok(&(rho_k + &(&sqrt5 * &alpha.square())) - &beta.square())
}

/// Analytic step: everything except the three squares.
pub fn compute_step(rho: &RhoParameter, k: u32) -> Result<CompactStep> {
    if k < 1 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if !rho.validated {
        return Err(Error::InvalidRho(rho.rho.to_string()));
    }
    let rho_k = rho.rho.pow(u64::from(k))?;
    let u = rho_k.a().to_integer();
    let v = rho_k.b().to_integer();
    let (alpha, y, beta) = alpha_beta(&u, &v)?;
    let epsilon = epsilon_of(&rho_k, &alpha, &beta)?;
    Ok(CompactStep {
        k,
        u,
        v,
        alpha,
        y,
        beta,
        epsilon_totally_positive: epsilon.is_totally_positive(),
        epsilon,
        gammas: None,
        mode: Mode::Analytic,
    })
}

/// Attaches a three-squares decomposition of `ε`.
pub fn make_explicit(step: &CompactStep, budget: u64) -> Result<CompactStep> {
    let gammas = three_squares_decompose(&step.epsilon, budget)?;
    Ok(CompactStep { gammas: Some(gammas), mode: Mode::Explicit, ..step.clone() })
}

/// `(α, β, γ₁, γ₂, γ₃, 0, …, 0)` for the form in dimension `n`.
pub fn build_w_compact(step: &CompactStep, n: usize) -> Result<NormalVector> {
    let gammas = step
        .gammas
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("step has no three-squares decomposition".into()))?;
    if n < 4 {
        return Err(Error::InvalidParameter(format!("dimension n = {n} must be at least 4")));
    }
    let f = Field::sqrt5();
    let mut comps = vec![step.alpha.clone(), step.beta.clone()];
    comps.extend(gammas.iter().cloned());
    comps.resize(n + 1, QuadElem::zero(f));
    NormalVector::new(LorentzForm::sqrt5(n)?, comps)
}

/// Separation test for `w₁ = β` and `f(w) = ρ^k`.
pub fn check_separation_compact(step: &CompactStep) -> Result<SeparationReport> {
    separation_from_parts(&step.beta.square(), &step.rho_k())
}

/// Exact convergence data with decimal annotations.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ConvergenceDiagnostics {
    /// `(√5 v / u)² = 5v²/u²`.
    #[serde(with = "crate::rational::serde_canonical")]
    pub sqrt5vk_over_uk_squared: Rational,
    /// Decimal enclosure `[lo, hi]` of `√5 v / u`.
    pub sqrt5vk_over_uk_decimal: [String; 2],
    pub alpha_sq_over_beta_sq: Option<QuadElem>,
    pub alpha_sq_over_beta_sq_decimal: Option<String>,
    /// `σ(ρ)^{2k} / u`.
    pub sigma_rho2k_over_uk: QuadElem,
    pub sigma_rho2k_over_uk_decimal: String,
    /// `ε / β`, absent when `β = 0`.
    pub epsilon_over_beta: Option<QuadElem>,
    pub epsilon_over_beta_decimal: Option<String>,
}

/// Decimal enclosure of `√q` for a rational `q ≥ 0`, truncated to `digits`.
pub fn sqrt_decimal_enclosure(q: &Rational, digits: usize) -> [String; 2] {
    let scale = pow(BigInt::from(10), 2 * digits);
    let scaled = (q * Rational::from_integer(scale)).floor().to_integer();
    let lo = isqrt_floor(&scaled.to_biguint().expect("nonnegative"));
    let exact = &lo * &lo == scaled.to_biguint().expect("nonnegative")
        && (q * Rational::from_integer(pow(BigInt::from(10), 2 * digits))).is_integer();
    let hi = if exact { lo.clone() } else { &lo + 1u32 };
    let render = |n: num_bigint::BigUint| crate::rational::render_scaled(false, &BigInt::from(n), digits);
    [render(lo), render(hi)]
}

pub fn diagnostics_of(step: &CompactStep) -> Result<ConvergenceDiagnostics> {
    let f = Field::sqrt5();
    if step.u.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let sq = Rational::new(&step.v * &step.v * 5, &step.u * &step.u);
    let alpha_sq_over_beta_sq = if step.beta.is_zero() {
        None
    } else {
        Some(step.alpha.square().checked_div(&step.beta.square())?)
    };
    let sigma_sq = step.rho_k().conjugate().square();
    let sigma_rho2k_over_uk = sigma_sq.checked_div(&QuadElem::from_int(f, step.u.clone()))?;
    let epsilon_over_beta =
        if step.beta.is_zero() { None } else { Some(step.epsilon.checked_div(&step.beta)?) };
    Ok(ConvergenceDiagnostics {
        sqrt5vk_over_uk_decimal: sqrt_decimal_enclosure(&sq, DECIMAL_DIGITS),
        sqrt5vk_over_uk_squared: sq,
        alpha_sq_over_beta_sq_decimal: alpha_sq_over_beta_sq.as_ref().map(|x| x.decimal(DECIMAL_DIGITS)),
        alpha_sq_over_beta_sq,
        sigma_rho2k_over_uk_decimal: sigma_rho2k_over_uk.decimal(DECIMAL_DIGITS),
        sigma_rho2k_over_uk,
        epsilon_over_beta_decimal: epsilon_over_beta.as_ref().map(|x| x.decimal(DECIMAL_DIGITS)),
        epsilon_over_beta,
    })
}

pub fn convergence_diagnostics(rho: &RhoParameter, k: u32) -> Result<ConvergenceDiagnostics> {
    diagnostics_of(&compute_step(rho, k)?)
}

/// Certificate for a single index.
pub fn compact_certificate(
    rho: &RhoParameter,
    k: u32,
    n: usize,
    mode: Mode,
    budget: u64,
    width: &Rational,
) -> Result<FamilyCertificate> {
    if n < 4 {
        return Err(Error::InvalidParameter(format!("dimension n = {n} must be at least 4")));
    }
    let analytic = compute_step(rho, k)?;
    let mut flags = Vec::new();
    let step = match mode {
        Mode::Analytic => analytic,
        Mode::Explicit => match make_explicit(&analytic, budget) {
            Ok(s) => s,
            Err(Error::NotFoundWithinBudget(_)) => {
                flags.push(Flag::ThreeSquaresBudgetExhausted);
                analytic
            }
            Err(e) => return Err(e),
        },
    };
    if !step.epsilon_totally_positive {
        flags.push(Flag::EpsilonNotTotallyPositive);
    }
    let form = LorentzForm::sqrt5(n)?;
    let w = if step.gammas.is_some() { Some(build_w_compact(&step, n)?.components().to_vec()) } else { None };
    let separation = check_separation_compact(&step)?;
    let cosh_sq = separation.ratio.clone();
    let distance = if separation.ratio_minus_one_sign == Sign::Negative {
        flags.push(Flag::NotUltraparallel);
        None
    } else {
        Some(distance_interval(&cosh_sq, width)?)
    };
    if !separation.holds() {
        flags.push(Flag::SeparationFailed);
    }
    flags.sort();
    Ok(FamilyCertificate {
        schema_version: SCHEMA_VERSION,
        case: Case::Compact,
        ambient_group_key: form.ambient_group_key(),
        k,
        target: Target::Quadratic { rho: rho.rho.clone(), rho_k: step.rho_k() },
        w,
        separation,
        cosh_sq,
        systole_upper_bound: distance.as_ref().map(|d| d.scaled(2)),
        distance,
        width: width.clone(),
        smoothness: None,
        trace_ring_bound: TraceRingBound::principal(&rho.rho)?,
        diagnostics: Some(diagnostics_of(&step)?),
        mode: step.mode,
        construction: Construction::CompactStep(step),
        flags,
        form,
    })
}

/// Certificates for `k = kmin..=kmax`.
pub fn gen_compact_family(
    rho: &QuadElem,
    kmin: u32,
    kmax: u32,
    n: usize,
    mode: Mode,
    budget: u64,
    width: &Rational,
) -> Result<Vec<FamilyCertificate>> {
    let param = validate_rho(rho)?;
    if !param.validated {
        return Err(Error::InvalidRho(rho.to_string()));
    }
    if kmin < 1 || kmax < kmin {
        return Err(Error::InvalidParameter(format!("need 1 <= kmin <= kmax, got [{kmin}, {kmax}]")));
    }
    if !width.is_positive() {
        return Err(Error::InvalidWidth);
    }
    (kmin..=kmax)
        .into_par_iter()
        .map(|k| compact_certificate(&param, k, n, mode, budget, width))
        .collect()
}

/// Smallest index from which every entry holds.
pub fn eventual_onset(holds: &[bool]) -> Option<usize> {
    let first_fail_from_end = holds.iter().rposition(|h| !h);
    match first_fail_from_end {
        None if holds.is_empty() => None,
        None => Some(0),
        Some(i) if i + 1 < holds.len() => Some(i + 1),
        Some(_) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k5(s: &str) -> QuadElem {
        QuadElem::parse(s, Field::sqrt5()).unwrap()
    }

    fn rho() -> RhoParameter {
        validate_rho(&k5("6+sqrt5")).unwrap()
    }

    #[test]
    fn rho_validation() {
        assert!(rho().validated);
        assert!(!validate_rho(&k5("1+sqrt5")).unwrap().validated);
        assert!(!validate_rho(&k5("9")).unwrap().validated);
        assert!(validate_rho(&k5("(1+sqrt5)/2")).is_err());
    }

    #[test]
    fn hand_steps() {
        let s1 = compute_step(&rho(), 1).unwrap();
        assert_eq!((s1.alpha.clone(), s1.beta.clone(), s1.epsilon.clone()), (k5("2+sqrt5"), k5("0"), k5("26+10sqrt5")));
        assert!(s1.epsilon_totally_positive);
        let s2 = compute_step(&rho(), 2).unwrap();
        assert_eq!((s2.u.clone(), s2.v.clone(), s2.y.clone()), (41.into(), 12.into(), 2.into()));
        assert_eq!((s2.alpha.clone(), s2.beta.clone(), s2.epsilon.clone()), (k5("3+sqrt5"), k5("4+2sqrt5"), k5("35+10sqrt5")));
        let s4 = compute_step(&rho(), 4).unwrap();
        assert_eq!((s4.u.clone(), s4.v.clone(), s4.y.clone()), (2401.into(), 984.into(), 15.into()));
        assert_eq!((s4.alpha.clone(), s4.beta.clone(), s4.epsilon.clone()), (k5("10+sqrt5"), k5("33+15sqrt5"), k5("287+99sqrt5")));
    }

    #[test]
    fn separation_cases() {
        assert!(!check_separation_compact(&compute_step(&rho(), 1).unwrap()).unwrap().holds());
        let e2 = check_separation_compact(&compute_step(&rho(), 2).unwrap()).unwrap();
        assert!(e2.holds());
        assert_eq!(e2.ratio, k5("36+16sqrt5").checked_div(&k5("41+12sqrt5")).unwrap());
        let s3 = compute_step(&rho(), 3).unwrap();
        assert_eq!(&s3.beta.square() - &s3.rho_k(), k5("-60-3sqrt5"));
        assert!(!check_separation_compact(&s3).unwrap().ultraparallel_holds);
    }

    #[test]
    fn explicit_vectors() {
        let s1 = make_explicit(&compute_step(&rho(), 1).unwrap(), 1_000_000).unwrap();
        let w = build_w_compact(&s1, 4).unwrap();
        assert_eq!(w.norm(), &k5("6+sqrt5"));
        let manual = CompactStep { gammas: Some([k5("3+sqrt5"), k5("1+sqrt5"), k5("1+sqrt5")]), ..s1.clone() };
        let w = build_w_compact(&manual, 4).unwrap();
        assert_eq!(w.components()[..2], [k5("2+sqrt5"), k5("0")]);
        assert_eq!(w.norm(), &k5("6+sqrt5"));
        assert!(build_w_compact(&s1, 3).is_err());
        let s2 = make_explicit(&compute_step(&rho(), 2).unwrap(), 1_000_000).unwrap();
        assert_eq!(build_w_compact(&s2, 4).unwrap().norm(), &k5("41+12sqrt5"));
    }

    #[test]
    fn diagnostic_values() {
        let d1 = convergence_diagnostics(&rho(), 1).unwrap();
        assert!(d1.sqrt5vk_over_uk_decimal[0].starts_with("0.3726"));
        let d5 = convergence_diagnostics(&rho(), 5).unwrap();
        assert!(d5.sqrt5vk_over_uk_decimal[0].starts_with("0.9609"));
        let d2 = convergence_diagnostics(&rho(), 2).unwrap();
        assert_eq!(d2.alpha_sq_over_beta_sq, Some(k5("14+6sqrt5").checked_div(&k5("36+16sqrt5")).unwrap()));
        assert!(d1.alpha_sq_over_beta_sq.is_none());
    }

    #[test]
    fn families() {
        let w = crate::interval::default_width();
        let fam = gen_compact_family(&k5("6+sqrt5"), 2, 2, 4, Mode::Explicit, 1_000_000, &w).unwrap();
        assert_eq!(fam.len(), 1);
        assert_eq!(fam[0].trace_ring_bound.to_string(), "O_K[1/(31,sqrt5-25)]");
        let fam = gen_compact_family(&k5("6+sqrt5"), 1, 1, 4, Mode::Analytic, 0, &w).unwrap();
        assert!(fam[0].flags.contains(&Flag::SeparationFailed));
        assert!(gen_compact_family(&k5("1+sqrt5"), 1, 2, 4, Mode::Analytic, 0, &w).is_err());
        assert!(gen_compact_family(&k5("6+sqrt5"), 0, 2, 4, Mode::Analytic, 0, &w).is_err());
    }

    #[test]
    fn onset_helper() {
        assert_eq!(eventual_onset(&[false, true, false, true, true]), Some(3));
        assert_eq!(eventual_onset(&[true, true]), Some(0));
        assert_eq!(eventual_onset(&[true, false]), None);
    }
}
