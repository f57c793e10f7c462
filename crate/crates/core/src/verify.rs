//! Independent re-verification of certificates.
//!
//! Every stated value is recomputed from the certificate body with exact
//! arithmetic and compared for equality. Nothing produced during generation
//! is consulted.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{pow, Signed};
use serde::Serialize;

use crate::certificate::{Case, Construction, FamilyCertificate, Flag, Mode, Target, SCHEMA_VERSION};
use crate::compact::{alpha_beta, diagnostics_of, epsilon_of, validate_rho, CompactStep};
use crate::error::Result;
use crate::geometry::{cosh_sq_formula, LorentzForm, NormalVector};
use crate::interval::{certify_bracket, distance_interval};
use crate::noncompact::{separation_from_parts, Decomposition, SeparationReport};
use crate::quad::{Field, QuadElem, Sign, MAX_EXPONENT};
use crate::smooth::{is_prime_u64, Factorization};
use crate::three_squares::verify_three_squares;
use crate::tracering::{InvertedPrime, TraceRingBound};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub status: Status,
    pub witness: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VerificationReport {
    pub k: u32,
    pub per_check: Vec<CheckResult>,
    pub overall: bool,
}

impl VerificationReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.per_check.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn skipped(&self) -> impl Iterator<Item = &CheckResult> {
        self.per_check.iter().filter(|c| c.status == Status::Skipped)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.per_check.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.per_check {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skipped => "SKIP",
            };
            write!(f, "k={} {tag} {}", self.k, c.name)?;
            if !c.witness.is_empty() {
                write!(f, ": {}", c.witness)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

type Outcome = std::result::Result<Status, String>;
type Check = (&'static str, fn(&Context) -> Outcome);

fn ensure(cond: bool, witness: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(witness())
    }
}

fn lift<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

/// Values recomputed once and shared by several checks.
struct Context<'a> {
    cert: &'a FamilyCertificate,
    /// Target `f(w)` as an element of the form's field.
    target: Option<QuadElem>,
    /// `w₁²` and `f(w)` as used for the separation test.
    parts: Option<(QuadElem, QuadElem)>,
}

fn canonical_form(cert: &FamilyCertificate) -> Result<LorentzForm> {
    match cert.case {
        Case::Noncompact => LorentzForm::standard(cert.form.n()),
        Case::Compact => LorentzForm::sqrt5(cert.form.n()),
    }
}

fn target_value(cert: &FamilyCertificate) -> Option<QuadElem> {
    match (&cert.target, cert.case) {
        (Target::Integer { r, .. }, Case::Noncompact) => Some(QuadElem::from_int(Field::Rational, r.clone())),
        (Target::Quadratic { rho_k, .. }, Case::Compact) => Some(rho_k.clone()),
        _ => None,
    }
}

fn step(cert: &FamilyCertificate) -> Option<&CompactStep> {
    match &cert.construction {
        Construction::CompactStep(s) => Some(s),
        _ => None,
    }
}

fn decomposition(cert: &FamilyCertificate) -> Option<&Decomposition> {
    match &cert.construction {
        Construction::Decomposition(d) => Some(d),
        _ => None,
    }
}

/// Every field element in the certificate, for the field consistency check.
fn elements(c: &FamilyCertificate) -> Vec<&QuadElem> {
    let mut out: Vec<&QuadElem> = c.form.coefficients().iter().collect();
    out.extend([&c.cosh_sq, &c.separation.ratio]);
    if let Some(w) = &c.w {
        out.extend(w);
    }
    if let Target::Quadratic { rho, rho_k } = &c.target {
        out.extend([rho, rho_k]);
    }
    if let Some(s) = step(c) {
        out.extend([&s.alpha, &s.beta, &s.epsilon]);
        if let Some(g) = &s.gammas {
            out.extend(g);
        }
    }
    if let Some(d) = &c.diagnostics {
        out.push(&d.sigma_rho2k_over_uk);
        out.extend(d.alpha_sq_over_beta_sq.iter().chain(&d.epsilon_over_beta));
    }
    out
}

fn case_field(case: Case) -> Field {
    match case {
        Case::Noncompact => Field::Rational,
        Case::Compact => Field::sqrt5(),
    }
}

fn check_fields(cx: &Context) -> Outcome {
    let c = cx.cert;
    let expected = case_field(c.case);
    ensure(c.trace_ring_bound.field() == expected, || {
        format!("trace-ring bound over {} but the case needs {expected}", c.trace_ring_bound.field())
    })?;
    if let Some(x) = elements(c).into_iter().find(|x| x.field() != expected) {
        return Err(format!("{x} lies in {} but the case needs {expected}", x.field()));
    }
    Ok(Status::Pass)
}

fn check_schema(cx: &Context) -> Outcome {
    ensure(cx.cert.schema_version == SCHEMA_VERSION, || format!("schemaVersion {}", cx.cert.schema_version))?;
    Ok(Status::Pass)
}

fn check_form(cx: &Context) -> Outcome {
    let c = cx.cert;
    let expected = lift(canonical_form(c))?;
    ensure(c.form == expected, || format!("form {} is not the {:?} form {}", c.form.ambient_group_key(), c.case, expected.ambient_group_key()))?;
    let min_n = if c.case == Case::Noncompact { 3 } else { 4 };
    ensure(c.form.n() >= min_n, || format!("n = {} < {min_n}", c.form.n()))?;
    let key = c.form.ambient_group_key();
    ensure(key == c.ambient_group_key, || format!("stated key {} but form gives {key}", c.ambient_group_key))?;
    Ok(Status::Pass)
}

fn check_target(cx: &Context) -> Outcome {
    let c = cx.cert;
    ensure(c.k >= 1, || "k = 0".into())?;
    match (&c.target, c.case) {
        (Target::Integer { r, prime }, Case::Noncompact) => {
            ensure(r.is_positive(), || format!("r = {r} is not positive"))?;
            if let Some(p) = prime {
                ensure(is_prime_u64(*p), || format!("{p} is not prime"))?;
                ensure(u64::from(c.k) <= MAX_EXPONENT, || format!("k = {} exceeds {MAX_EXPONENT}", c.k))?;
                let pk = pow(BigInt::from(*p), c.k as usize);
                ensure(&pk == r, || format!("{p}^{} = {pk} != {r}", c.k))?;
            }
        }
        (Target::Quadratic { rho, rho_k }, Case::Compact) => {
            let param = lift(validate_rho(rho))?;
            ensure(param.validated, || format!("rho = {rho} fails sigma(rho)^2 > rho > sigma(rho) > 1"))?;
            let pk = lift(rho.pow(u64::from(c.k)))?;
            ensure(&pk == rho_k, || format!("({rho})^{} = {pk} != {rho_k}", c.k))?;
        }
        _ => return Err(format!("target kind does not match case {:?}", c.case)),
    }
    Ok(Status::Pass)
}

fn check_vector(cx: &Context) -> Outcome {
    let c = cx.cert;
    let Some(w) = &c.w else {
        ensure(c.case == Case::Compact && c.mode == Mode::Analytic, || "vector w missing outside analytic mode".into())?;
        return Ok(Status::Skipped);
    };
    ensure(c.mode == Mode::Explicit, || "analytic certificate carries a vector".into())?;
    let target = cx.target.as_ref().ok_or("target does not match case")?;
    let fw = lift(c.form.eval(w))?;
    ensure(&fw == target, || format!("f(w) = {fw} != {target}"))?;
    ensure(w.iter().all(QuadElem::is_algebraic_integer), || "w has non-integral entries".into())?;
    Ok(Status::Pass)
}

fn ints(xs: &[BigInt]) -> Vec<QuadElem> {
    xs.iter().map(|x| QuadElem::from_int(Field::Rational, x.clone())).collect()
}

fn check_decomposition(cx: &Context) -> Outcome {
    let c = cx.cert;
    let d = decomposition(c).ok_or("noncompact certificate without a decomposition")?;
    let Target::Integer { r, .. } = &c.target else { return Err("target is not an integer".into()) };
    ensure(&d.r == r, || format!("decomposition r = {} != target {r}", d.r))?;
    d.check()?;
    let w = c.w.as_ref().ok_or("vector w missing")?;
    let mut expected = ints(&[&d.c + 1, d.b.clone(), d.c.clone()]);
    expected.resize(c.form.n() + 1, QuadElem::zero(Field::Rational));
    ensure(w == &expected, || format!("w is not (c+1, b, c, 0, ...) for b = {}, c = {}", d.b, d.c))?;
    Ok(Status::Pass)
}

fn check_compact_step(cx: &Context) -> Outcome {
    let c = cx.cert;
    let s = step(c).ok_or("compact certificate without a step")?;
    ensure(s.k == c.k, || format!("step k = {} != {}", s.k, c.k))?;
    ensure(s.mode == c.mode, || format!("step mode {:?} != certificate mode {:?}", s.mode, c.mode))?;
    let target = cx.target.as_ref().ok_or("target does not match case")?;
    ensure(&s.rho_k() == target, || format!("u + v sqrt5 = {} != {target}", s.rho_k()))?;
    let (alpha, y, beta) = lift(alpha_beta(&s.u, &s.v))?;
    ensure(alpha == s.alpha, || format!("alpha: stated {} recomputed {alpha}", s.alpha))?;
    ensure(y == s.y, || format!("y: stated {} recomputed {y}", s.y))?;
    ensure(beta == s.beta, || format!("beta: stated {} recomputed {beta}", s.beta))?;
    let sqrt5 = lift(QuadElem::sqrt_d(Field::sqrt5()))?;
    let lhs = &(&(-&sqrt5) * &s.alpha.square()) + &(&s.beta.square() + &s.epsilon);
    ensure(&lhs == target, || format!("-sqrt5 alpha^2 + beta^2 + eps = {lhs} != {target}"))?;
    let eps = lift(epsilon_of(target, &s.alpha, &s.beta))?;
    ensure(eps == s.epsilon, || format!("epsilon: stated {} recomputed {eps}", s.epsilon))?;
    let tp = s.epsilon.is_totally_positive();
    ensure(tp == s.epsilon_totally_positive, || format!("epsilon totally positive is {tp}"))?;
    if let (Some(w), Some(g)) = (&c.w, &s.gammas) {
        let mut expected = vec![s.alpha.clone(), s.beta.clone()];
        expected.extend(g.iter().cloned());
        expected.resize(c.form.n() + 1, QuadElem::zero(Field::sqrt5()));
        ensure(w == &expected, || "w is not (alpha, beta, gamma1, gamma2, gamma3, 0, ...)".into())?;
    }
    Ok(Status::Pass)
}

fn check_three_squares(cx: &Context) -> Outcome {
    let s = step(cx.cert).ok_or("compact certificate without a step")?;
    match (s.mode, &s.gammas) {
        (Mode::Analytic, None) => Ok(Status::Skipped),
        (Mode::Explicit, Some(g)) => {
            ensure(verify_three_squares(&s.epsilon, g), || {
                let sum = g.iter().fold(QuadElem::zero(Field::sqrt5()), |acc, x| &acc + &x.square());
                format!("sum of gamma^2 = {sum} != epsilon = {}", s.epsilon)
            })?;
            Ok(Status::Pass)
        }
        (m, _) => Err(format!("gammas presence does not match mode {m:?}")),
    }
}

fn check_separation(cx: &Context) -> Outcome {
    let (w1_sq, fw) = cx.parts.as_ref().ok_or("no data for the separation test")?;
    let expected: SeparationReport = lift(separation_from_parts(w1_sq, fw))?;
    ensure(expected == cx.cert.separation, || {
        format!(
            "stated ultraparallel={} positivity={} ratio={} sign={}; recomputed {} {} {} {}",
            cx.cert.separation.ultraparallel_holds,
            cx.cert.separation.positivity_holds,
            cx.cert.separation.ratio,
            cx.cert.separation.ratio_minus_one_sign.to_i8(),
            expected.ultraparallel_holds,
            expected.positivity_holds,
            expected.ratio,
            expected.ratio_minus_one_sign.to_i8()
        )
    })?;
    Ok(Status::Pass)
}

fn check_cosh_sq(cx: &Context) -> Outcome {
    let c = cx.cert;
    let value = match &c.w {
        Some(w) => {
            let r0 = lift(NormalVector::axis(&c.form, 1))?;
            let v = lift(NormalVector::new(c.form.clone(), w.clone()))?;
            lift(cosh_sq_formula(&r0, &v))?
        }
        None => {
            let (w1_sq, fw) = cx.parts.as_ref().ok_or("no data for cosh^2")?;
            lift(w1_sq.checked_div(fw))?
        }
    };
    ensure(value == c.cosh_sq, || format!("coshSq stated {} recomputed {value}", c.cosh_sq))?;
    ensure(value == c.separation.ratio, || "coshSq differs from the separation ratio".into())?;
    Ok(Status::Pass)
}

fn check_distance(cx: &Context) -> Outcome {
    let c = cx.cert;
    ensure(c.width.is_positive(), || format!("width {} is not positive", c.width))?;
    let below_one = (&c.cosh_sq - &QuadElem::one(c.cosh_sq.field())).sign_identity() == Sign::Negative;
    match &c.distance {
        None => {
            ensure(below_one, || "distance missing although coshSq >= 1".into())?;
            Ok(Status::Pass)
        }
        Some(d) => {
            ensure(!below_one, || "distance given although coshSq < 1".into())?;
            ensure(d.lo <= d.hi && !d.lo.is_negative(), || format!("[{}, {}] is not a valid interval", d.lo, d.hi))?;
            ensure(d.width() <= c.width, || format!("interval width {} exceeds {}", d.width(), c.width))?;
            ensure(certify_bracket(&c.cosh_sq, d), || {
                format!("cosh^2 of [{}, {}] does not bracket {}", d.lo, d.hi, c.cosh_sq)
            })?;
            let again = lift(distance_interval(&c.cosh_sq, &c.width))?;
            ensure(&again == d, || format!("recomputed interval [{}, {}] differs", again.lo, again.hi))?;
            Ok(Status::Pass)
        }
    }
}

fn check_systole(cx: &Context) -> Outcome {
    let c = cx.cert;
    let expected = c.distance.as_ref().map(|d| d.scaled(2));
    ensure(expected == c.systole_upper_bound, || "systole bound is not twice the distance interval".into())?;
    Ok(Status::Pass)
}

fn check_factorization(f: &Factorization, r: &BigInt) -> std::result::Result<(), String> {
    ensure(BigInt::from(f.value.clone()) == *r, || format!("factorization value {} != r = {r}", f.value))?;
    ensure(f.factors.windows(2).all(|w| w[0].p < w[1].p), || "primes not strictly increasing".into())?;
    ensure(f.factors.iter().all(|pp| pp.e >= 1), || "zero exponent".into())?;
    if let Some(pp) = f.factors.iter().find(|pp| !is_prime_u64(pp.p)) {
        return Err(format!("{} is not prime", pp.p));
    }
    let prod = f.product();
    ensure(prod == f.value, || format!("product of prime powers {prod} != {}", f.value))
}

fn check_smoothness(cx: &Context) -> Outcome {
    let c = cx.cert;
    let Target::Integer { r, prime } = &c.target else { return Err("target is not an integer".into()) };
    let s = c.smoothness.as_ref().ok_or("smoothness record missing")?;
    check_factorization(&s.factorization, r)?;
    ensure(s.t >= 2, || format!("T = {} must exceed 1", s.t))?;
    if let Some(p) = prime {
        ensure(Some(s.t) == p.checked_add(1), || format!("T = {} but p + 1 = {}", s.t, p.saturating_add(1)))?;
    }
    let verdict = s.factorization.primes().all(|p| p < s.t);
    ensure(verdict == s.verdict, || format!("stated verdict {} but T-smoothness is {verdict}", s.verdict))?;
    Ok(Status::Pass)
}

fn check_trace_ring(cx: &Context) -> Outcome {
    let c = cx.cert;
    let expected = match &c.target {
        Target::Integer { r, .. } => {
            let fact = c.smoothness.as_ref().map(|s| &s.factorization);
            match fact {
                Some(f) if BigInt::from(f.product()) == *r && f.value == f.product() => {
                    let inverted = f.primes().map(|p| InvertedPrime { p, kind: None, branch: None }).collect();
                    lift(TraceRingBound::new(Field::Rational, inverted))?
                }
                _ => lift(TraceRingBound::rational(&r.to_biguint().ok_or("negative target")?))?,
            }
        }
        Target::Quadratic { rho, .. } => lift(TraceRingBound::principal(rho))?,
    };
    ensure(expected == c.trace_ring_bound, || format!("stated {} recomputed {expected}", c.trace_ring_bound))?;
    Ok(Status::Pass)
}

fn check_diagnostics(cx: &Context) -> Outcome {
    let s = step(cx.cert).ok_or("compact certificate without a step")?;
    let d = cx.cert.diagnostics.as_ref().ok_or("diagnostics missing")?;
    let expected = lift(diagnostics_of(s))?;
    ensure(&expected == d, || "diagnostic values differ from recomputation".into())?;
    Ok(Status::Pass)
}

fn check_flags(cx: &Context) -> Outcome {
    let c = cx.cert;
    let mut expected = Vec::new();
    if !c.separation.ultraparallel_holds || !c.separation.positivity_holds {
        expected.push(Flag::SeparationFailed);
    }
    if c.separation.ratio_minus_one_sign == Sign::Negative {
        expected.push(Flag::NotUltraparallel);
    }
    if let Some(s) = &c.smoothness {
        if !s.verdict {
            expected.push(Flag::NotSmooth);
        }
    }
    if let Some(s) = step(c) {
        if !s.epsilon_totally_positive {
            expected.push(Flag::EpsilonNotTotallyPositive);
        }
    }
    // only a generator can know that its search ran out; allowed for analytic steps
    if c.flags.contains(&Flag::ThreeSquaresBudgetExhausted) {
        ensure(c.case == Case::Compact && c.mode == Mode::Analytic, || "budget flag on a non-analytic certificate".into())?;
        expected.push(Flag::ThreeSquaresBudgetExhausted);
    }
    expected.sort();
    ensure(expected == c.flags, || format!("flags {:?} expected {:?}", c.flags, expected))?;
    Ok(Status::Pass)
}

fn check_absent(cx: &Context) -> Outcome {
    let c = cx.cert;
    match c.case {
        Case::Noncompact => {
            ensure(c.diagnostics.is_none(), || "noncompact certificate carries diagnostics".into())?;
            ensure(c.mode == Mode::Explicit, || "noncompact certificates are explicit".into())?;
        }
        Case::Compact => ensure(c.smoothness.is_none(), || "compact certificate carries a smoothness record".into())?,
    }
    Ok(Status::Pass)
}

fn build_context(cert: &FamilyCertificate) -> Context<'_> {
    let target = target_value(cert);
    let parts = match (cert.case, &cert.w, step(cert), &target) {
        (_, Some(w), _, _) if w.len() == cert.form.n() + 1 => cert.form.eval(w).ok().map(|fw| (w[1].square(), fw)),
        (Case::Compact, None, Some(s), Some(t)) => Some((s.beta.square(), t.clone())),
        _ => None,
    };
    Context { cert, target, parts }
}

fn run_check(name: &'static str, f: fn(&Context) -> Outcome, cx: &Context) -> CheckResult {
    // a panic is a verifier defect, never a pass
    let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| f(cx)))
        .unwrap_or_else(|_| Err(format!("internal error while running {name}")));
    let (status, witness) = match outcome {
        Ok(s) => {
            let why = if s == Status::Skipped { "analytic mode, no explicit vector".to_string() } else { String::new() };
            (s, why)
        }
        Err(w) => (Status::Fail, w),
    };
    CheckResult { name, status, witness }
}

/// Runs every check on one certificate.
pub fn verify(cert: &FamilyCertificate) -> VerificationReport {
    // arithmetic across fields is undefined, so nothing else runs on a mismatch
    let fields = run_check("fields", check_fields, &Context { cert, target: None, parts: None });
    if fields.status == Status::Fail {
        return VerificationReport { k: cert.k, per_check: vec![fields], overall: false };
    }
    let cx = build_context(cert);
    let mut checks: Vec<Check> = vec![
        ("schema", check_schema),
        ("form", check_form),
        ("target", check_target),
        ("vector", check_vector),
    ];
    match cert.case {
        Case::Noncompact => {
            checks.push(("decomposition", check_decomposition));
            checks.push(("smoothness", check_smoothness));
        }
        Case::Compact => {
            checks.push(("compact_step", check_compact_step));
            checks.push(("three_squares", check_three_squares));
            checks.push(("diagnostics", check_diagnostics));
        }
    }
    checks.extend([
        ("separation", check_separation as fn(&Context) -> Outcome),
        ("cosh_sq", check_cosh_sq),
        ("distance", check_distance),
        ("systole", check_systole),
        ("trace_ring", check_trace_ring),
        ("flags", check_flags),
        ("case_fields", check_absent),
    ]);
    let per_check: Vec<CheckResult> =
        std::iter::once(fields).chain(checks.into_iter().map(|(name, f)| run_check(name, f, &cx))).collect();
    let overall = per_check.iter().all(|c| c.status != Status::Fail);
    VerificationReport { k: cert.k, per_check, overall }
}

/// Verifies a list in parallel, keeping input order.
pub fn verify_all(certs: &[FamilyCertificate]) -> Vec<VerificationReport> {
    use rayon::prelude::*;
    certs.par_iter().map(verify).collect()
}
