//! Diagonal Lorentzian forms and hyperplanes of the hyperboloid model.
//!
//! A hyperplane is `v^⊥` for a vector with `f(v) > 0`. Two hyperplanes are
//! classified by the sign of `⟨v₁,v₂⟩² − f(v₁)f(v₂)`: positive means
//! ultraparallel, zero asymptotically parallel, negative incident.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{Embedding, Field, QuadElem, Sign};

/// Diagonal quadratic form `Σ aᵢ xᵢ²` of signature (n,1) at the identity embedding.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LorentzForm {
    field: Field,
    n: usize,
    coefficients: Vec<QuadElem>,
}

impl LorentzForm {
    pub fn new(field: Field, coefficients: Vec<QuadElem>) -> Result<Self> {
        if coefficients.len() < 3 {
            return Err(Error::InvalidForm(format!(
                "need at least 3 coefficients (n >= 2), got {}",
                coefficients.len()
            )));
        }
        if let Some(c) = coefficients.iter().find(|c| c.field() != field) {
            return Err(Error::MixedFields(field, c.field()));
        }
        let negatives = coefficients.iter().filter(|c| c.sign_identity() == Sign::Negative).count();
        let positives = coefficients.iter().filter(|c| c.sign_identity() == Sign::Positive).count();
        if negatives != 1 || positives != coefficients.len() - 1 {
            return Err(Error::InvalidForm(format!(
                "signature must be (n,1); found {positives} positive and {negatives} negative coefficients"
            )));
        }
        Ok(LorentzForm { field, n: coefficients.len() - 1, coefficients })
    }

    /// `−x₀² + x₁² + ⋯ + xₙ²` over ℚ.
    pub fn standard(n: usize) -> Result<Self> {
        Self::with_time_coefficient(QuadElem::from_int(Field::Rational, -1), n)
    }

    /// `−√5 x₀² + x₁² + ⋯ + xₙ²` over ℚ(√5).
    pub fn sqrt5(n: usize) -> Result<Self> {
        Self::with_time_coefficient(-QuadElem::sqrt_d(Field::sqrt5())?, n)
    }

    /// `c x₀² + x₁² + ⋯ + xₙ²` with `c` negative at the identity.
    pub fn with_time_coefficient(c: QuadElem, n: usize) -> Result<Self> {
        let field = c.field();
        let mut coefficients = vec![c];
        coefficients.extend(std::iter::repeat_n(QuadElem::one(field), n));
        Self::new(field, coefficients)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// Hyperbolic dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coefficients(&self) -> &[QuadElem] {
        &self.coefficients
    }

    fn check_vector(&self, v: &[QuadElem]) -> Result<()> {
        if v.len() != self.n + 1 {
            return Err(Error::DimensionMismatch { expected: self.n + 1, got: v.len() });
        }
        if let Some(c) = v.iter().find(|c| c.field() != self.field) {
            return Err(Error::MixedFields(self.field, c.field()));
        }
        Ok(())
    }

    /// `f(v) = Σ aᵢ vᵢ²`.
    pub fn eval(&self, v: &[QuadElem]) -> Result<QuadElem> {
        self.inner_product(v, v)
    }

    /// Polarization `⟨v,w⟩ = Σ aᵢ vᵢ wᵢ`.
    pub fn inner_product(&self, v: &[QuadElem], w: &[QuadElem]) -> Result<QuadElem> {
        self.check_vector(v)?;
        self.check_vector(w)?;
        Ok(self
            .coefficients
            .iter()
            .zip(v.iter().zip(w))
            .fold(QuadElem::zero(self.field), |acc, (a, (x, y))| &acc + &(&(a * x) * y)))
    }

    /// Canonical `field|n|coefficients` key identifying the ambient group PO_f.
    pub fn ambient_group_key(&self) -> String {
        let coeffs: Vec<String> = self.coefficients.iter().map(|c| c.to_string()).collect();
        format!("{}|{}|{}", self.field, self.n, coeffs.join(","))
    }

    /// Decide compactness of arithmetic quotients for this form.
    ///
    /// Over a quadratic field the conjugate form being positive definite
    /// forces anisotropy over K. Otherwise integer vectors with entries in
    /// `[-box_bound, box_bound]` are searched for an isotropic one.
    pub fn classify_compactness(&self, box_bound: u32) -> Compactness {
        if self.field != Field::Rational
            && self.coefficients.iter().all(|c| c.sign(Embedding::Conjugate) == Sign::Positive)
        {
            return Compactness::CompactByDefiniteness;
        }
        match self.find_isotropic(box_bound as i64) {
            Some(v) => Compactness::NoncompactWitness(v),
            None => Compactness::Unknown,
        }
    }

    fn find_isotropic(&self, bound: i64) -> Option<Vec<QuadElem>> {
        // Values ordered 0, 1, -1, 2, -2, ...; the last coordinate varies slowest,
        // so witnesses supported on the leading coordinates are found first.
        let order: Vec<i64> = std::iter::once(0)
            .chain((1..=bound).flat_map(|k| [k, -k]))
            .collect();
        let len = self.n + 1;
        for radius in 1..=bound {
            let mut idx = vec![0usize; len];
            loop {
                let vals: Vec<i64> = idx.iter().map(|&i| order[i]).collect();
                let max = vals.iter().map(|v| v.abs()).max().unwrap_or(0);
                let first_nonzero = vals.iter().find(|&&v| v != 0);
                if max == radius && first_nonzero.is_some_and(|&v| v > 0) {
                    let v: Vec<QuadElem> =
                        vals.iter().map(|&x| QuadElem::from_int(self.field, x)).collect();
                    if self.eval(&v).map(|x| x.is_zero()).unwrap_or(false) {
                        return Some(v);
                    }
                }
                let mut pos = 0;
                loop {
                    if pos == len {
                        break;
                    }
                    idx[pos] += 1;
                    if idx[pos] < order.len() {
                        break;
                    }
                    idx[pos] = 0;
                    pos += 1;
                }
                if pos == len {
                    break;
                }
            }
        }
        None
    }
}

impl<'de> Deserialize<'de> for LorentzForm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Repr {
            field: Field,
            n: usize,
            coefficients: Vec<QuadElem>,
        }
        let r = Repr::deserialize(d)?;
        let form = LorentzForm::new(r.field, r.coefficients).map_err(serde::de::Error::custom)?;
        if form.n != r.n {
            return Err(serde::de::Error::custom(format!(
                "form declares n = {} but has {} coefficients",
                r.n,
                form.n + 1
            )));
        }
        Ok(form)
    }
}

/// Outcome of [`LorentzForm::classify_compactness`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Compactness {
    NoncompactWitness(Vec<QuadElem>),
    CompactByDefiniteness,
    Unknown,
}

/// A vector with `f(v) > 0`, standing for the hyperplane `v^⊥`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalVector {
    form: LorentzForm,
    components: Vec<QuadElem>,
    norm: QuadElem,
}

impl NormalVector {
    pub fn new(form: LorentzForm, components: Vec<QuadElem>) -> Result<Self> {
        let norm = form.eval(&components)?;
        if components.iter().all(QuadElem::is_zero) {
            return Err(Error::InvalidNormalVector("zero vector".into()));
        }
        if norm.sign_identity() != Sign::Positive {
            return Err(Error::InvalidNormalVector(format!("f(v) = {norm} is not positive")));
        }
        Ok(NormalVector { form, components, norm })
    }

    /// `(0, 1, 0, …, 0)`, whose hyperplane is `{x₁ = 0}` when `a₁ = 1`.
    pub fn axis(form: &LorentzForm, i: usize) -> Result<Self> {
        let field = form.field();
        let comps = (0..=form.n())
            .map(|j| QuadElem::from_int(field, i64::from(j == i)))
            .collect();
        Self::new(form.clone(), comps)
    }

    pub fn form(&self) -> &LorentzForm {
        &self.form
    }

    pub fn components(&self) -> &[QuadElem] {
        &self.components
    }

    /// `f(v)`.
    pub fn norm(&self) -> &QuadElem {
        &self.norm
    }
}

/// Relative position of two hyperplanes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PairClass {
    Incident,
    AsymptoticallyParallel,
    Ultraparallel,
}

impl fmt::Display for PairClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PairClass::Incident => "incident",
            PairClass::AsymptoticallyParallel => "asymptotically parallel",
            PairClass::Ultraparallel => "ultraparallel",
        })
    }
}

fn same_form(v1: &NormalVector, v2: &NormalVector) -> Result<()> {
    if v1.form != v2.form {
        return Err(Error::InvalidParameter("normal vectors belong to different forms".into()));
    }
    Ok(())
}

/// `⟨v₁,v₂⟩² − f(v₁)f(v₂)`.
pub fn separation(v1: &NormalVector, v2: &NormalVector) -> Result<QuadElem> {
    same_form(v1, v2)?;
    let ip = v1.form.inner_product(&v1.components, &v2.components)?;
    Ok(&ip.square() - &(&v1.norm * &v2.norm))
}

pub fn classify_pair(v1: &NormalVector, v2: &NormalVector) -> Result<PairClass> {
    Ok(match separation(v1, v2)?.sign_identity() {
        Sign::Positive => PairClass::Ultraparallel,
        Sign::Zero => PairClass::AsymptoticallyParallel,
        Sign::Negative => PairClass::Incident,
    })
}

/// Exact `cosh² d(v₁^⊥, v₂^⊥) = ⟨v₁,v₂⟩² / (f(v₁) f(v₂))` for ultraparallel pairs.
pub fn cosh_sq_distance(v1: &NormalVector, v2: &NormalVector) -> Result<QuadElem> {
    let class = classify_pair(v1, v2)?;
    if class != PairClass::Ultraparallel {
        return Err(Error::NotUltraparallel(class));
    }
    cosh_sq_formula(v1, v2)
}

/// The formula value without the ultraparallel gate (equals 1 on asymptotic pairs).
pub fn cosh_sq_formula(v1: &NormalVector, v2: &NormalVector) -> Result<QuadElem> {
    same_form(v1, v2)?;
    let ip = v1.form.inner_product(&v1.components, &v2.components)?;
    ip.square().checked_div(&(&v1.norm * &v2.norm))
}
