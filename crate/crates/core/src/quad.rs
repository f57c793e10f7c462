//! Exact arithmetic in ℚ and real quadratic fields ℚ(√d).
//!
//! Every element is stored as `a + b√d` with reduced rational coordinates,
//! so equality is structural. Signs at the two real embeddings are decided
//! by integer comparisons only; floating point never enters.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::isqrt::isqrt_floor;
use crate::rational::{self, rat_int, Rational};

/// Largest exponent accepted by [`QuadElem::pow`].
pub const MAX_EXPONENT: u64 = 10_000;

/// The base field: ℚ itself or ℚ(√d) with `d` squarefree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Rational,
    Quadratic(u64),
}

impl Field {
    pub fn quadratic(d: u64) -> Result<Self> {
        if d < 2 || !is_squarefree(d) {
            return Err(Error::InvalidField(d));
        }
        Ok(Field::Quadratic(d))
    }

    /// ℚ(√5).
    pub fn sqrt5() -> Self {
        Field::Quadratic(5)
    }

    pub fn d(&self) -> Option<u64> {
        match self {
            Field::Rational => None,
            Field::Quadratic(d) => Some(*d),
        }
    }
}

fn is_squarefree(d: u64) -> bool {
    let mut p = 2u64;
    while p.saturating_mul(p) <= d {
        if d.is_multiple_of(p * p) {
            return false;
        }
        p += 1;
    }
    true
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::Quadratic(d) => write!(f, "Q(sqrt{d})"),
        }
    }
}

impl Serialize for Field {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Field::Rational => s.serialize_str("rational"),
            Field::Quadratic(d) => s.serialize_u64(*d),
        }
    }
}

impl<'de> Deserialize<'de> for Field {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            D(u64),
            Name(String),
        }
        match Repr::deserialize(d)? {
            Repr::D(v) => Field::quadratic(v).map_err(serde::de::Error::custom),
            Repr::Name(s) if s == "rational" => Ok(Field::Rational),
            Repr::Name(s) => Err(serde::de::Error::custom(format!("unknown field {s:?}"))),
        }
    }
}

/// The two real embeddings of a real quadratic field.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Embedding {
    /// `a + b√d ↦ a + b√d` with the positive square root.
    Identity,
    /// `a + b√d ↦ a − b√d`.
    Conjugate,
}

/// Sign of a real number, serialized as -1, 0 or 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn to_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    pub fn from_i8(v: i8) -> Option<Self> {
        match v {
            -1 => Some(Sign::Negative),
            0 => Some(Sign::Zero),
            1 => Some(Sign::Positive),
            _ => None,
        }
    }

    fn of<T: Signed>(x: &T) -> Self {
        if x.is_positive() {
            Sign::Positive
        } else if x.is_negative() {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i8(self.to_i8())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = i8::deserialize(d)?;
        Sign::from_i8(v).ok_or_else(|| serde::de::Error::custom(format!("invalid sign {v}")))
    }
}

/// Which subring of the field an element belongs to, ordered by inclusion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IntegralityClass {
    /// Rational integer.
    Z,
    /// `ℤ[√d]`.
    ZSqrtD,
    /// Ring of integers when it is strictly larger than `ℤ[√d]` (d ≡ 1 mod 4).
    OK,
    /// Not an algebraic integer.
    None,
}

/// An element `a + b√d` of ℚ or ℚ(√d).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadElem {
    field: Field,
    a: Rational,
    b: Rational,
}

/// Binary operation selector for [`arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Field arithmetic with explicit error reporting for mixed fields and zero divisors.
pub fn arith(x: &QuadElem, y: &QuadElem, op: ArithOp) -> Result<QuadElem> {
    x.same_field(y)?;
    Ok(match op {
        ArithOp::Add => x.add_unchecked(y),
        ArithOp::Sub => x.sub_unchecked(y),
        ArithOp::Mul => x.mul_unchecked(y),
        ArithOp::Div => return x.checked_div(y),
    })
}

impl QuadElem {
    pub fn new(field: Field, a: Rational, b: Rational) -> Result<Self> {
        if field == Field::Rational && !b.is_zero() {
            return Err(Error::InvalidParameter(
                "rational field element with nonzero sqrt coordinate".into(),
            ));
        }
        Ok(QuadElem { field, a, b })
    }

    pub fn from_rational(field: Field, a: Rational) -> Self {
        QuadElem { field, a, b: Rational::zero() }
    }

    pub fn from_int<T: Into<BigInt>>(field: Field, a: T) -> Self {
        Self::from_rational(field, rat_int(a))
    }

    /// `a + b√d` with integer coordinates; panics on the rational field when `b != 0`.
    pub fn from_ints<A: Into<BigInt>, B: Into<BigInt>>(field: Field, a: A, b: B) -> Self {
        Self::new(field, rat_int(a), rat_int(b)).expect("sqrt coordinate on the rational field")
    }

    pub fn zero(field: Field) -> Self {
        Self::from_int(field, 0)
    }

    pub fn one(field: Field) -> Self {
        Self::from_int(field, 1)
    }

    /// The generator `√d`.
    pub fn sqrt_d(field: Field) -> Result<Self> {
        match field {
            Field::Rational => Err(Error::InvalidParameter("Q has no sqrt generator".into())),
            Field::Quadratic(_) => Ok(QuadElem { field, a: Rational::zero(), b: Rational::one() }),
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// Rational coordinate.
    pub fn a(&self) -> &Rational {
        &self.a
    }

    /// Coefficient of `√d`.
    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    fn d_int(&self) -> BigInt {
        BigInt::from(self.field.d().unwrap_or(0))
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::MixedFields(self.field, other.field))
        }
    }

    fn add_unchecked(&self, y: &Self) -> Self {
        QuadElem { field: self.field, a: &self.a + &y.a, b: &self.b + &y.b }
    }

    fn sub_unchecked(&self, y: &Self) -> Self {
        QuadElem { field: self.field, a: &self.a - &y.a, b: &self.b - &y.b }
    }

    fn mul_unchecked(&self, y: &Self) -> Self {
        let d = rat_int(self.d_int());
        QuadElem {
            field: self.field,
            a: &self.a * &y.a + &self.b * &y.b * d,
            b: &self.a * &y.b + &self.b * &y.a,
        }
    }

    pub fn checked_add(&self, y: &Self) -> Result<Self> {
        self.same_field(y)?;
        Ok(self.add_unchecked(y))
    }

    pub fn checked_sub(&self, y: &Self) -> Result<Self> {
        self.same_field(y)?;
        Ok(self.sub_unchecked(y))
    }

    pub fn checked_mul(&self, y: &Self) -> Result<Self> {
        self.same_field(y)?;
        Ok(self.mul_unchecked(y))
    }

    pub fn checked_div(&self, y: &Self) -> Result<Self> {
        self.same_field(y)?;
        let inv = y.inverse()?;
        Ok(self.mul_unchecked(&inv))
    }

    /// `1/x = σ(x) / N(x)`.
    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm();
        Ok(QuadElem { field: self.field, a: &self.a / &n, b: -&self.b / &n })
    }

    /// Galois conjugate `a − b√d`; the identity on ℚ.
    pub fn conjugate(&self) -> Self {
        QuadElem { field: self.field, a: self.a.clone(), b: -&self.b }
    }

    /// Field norm `x·σ(x) = a² − d b²`.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - &self.b * &self.b * rat_int(self.d_int())
    }

    /// Trace `x + σ(x) = 2a`.
    pub fn trace(&self) -> Rational {
        &self.a * rat_int(2)
    }

    /// Exact power by square-and-multiply; exponents above [`MAX_EXPONENT`] are refused.
    pub fn pow(&self, k: u64) -> Result<Self> {
        if k > MAX_EXPONENT {
            return Err(Error::ExponentTooLarge(k));
        }
        let mut result = Self::one(self.field);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul_unchecked(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        Ok(result)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        QuadElem { field: self.field, a: &self.a * r, b: &self.b * r }
    }

    pub fn square(&self) -> Self {
        self.mul_unchecked(self)
    }

    /// Exact sign of the real number obtained at `emb`.
    pub fn sign(&self, emb: Embedding) -> Sign {
        let b = match emb {
            Embedding::Identity => self.b.clone(),
            Embedding::Conjugate => -&self.b,
        };
        let sa = Sign::of(&self.a);
        let sb = Sign::of(&b);
        if sb == Sign::Zero || sa == sb {
            return sa;
        }
        if sa == Sign::Zero {
            return sb;
        }
        let lhs = &self.a * &self.a;
        let rhs = &b * &b * rat_int(self.d_int());
        match lhs.cmp(&rhs) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => Sign::Zero,
        }
    }

    pub fn sign_identity(&self) -> Sign {
        self.sign(Embedding::Identity)
    }

    /// Compare the identity embeddings of two elements.
    pub fn cmp_identity(&self, other: &Self) -> Ordering {
        match self.sub_unchecked(other).sign_identity() {
            Sign::Negative => Ordering::Less,
            Sign::Zero => Ordering::Equal,
            Sign::Positive => Ordering::Greater,
        }
    }

    pub fn is_totally_positive(&self) -> bool {
        self.sign(Embedding::Identity) == Sign::Positive
            && self.sign(Embedding::Conjugate) == Sign::Positive
    }

    /// Totally nonnegative: sign ≥ 0 at both embeddings.
    pub fn is_totally_nonnegative(&self) -> bool {
        self.sign(Embedding::Identity) != Sign::Negative
            && self.sign(Embedding::Conjugate) != Sign::Negative
    }

    /// `⌊ι(x)⌋`, decided exactly.
    pub fn floor_identity(&self) -> BigInt {
        if self.b.is_zero() {
            return self.a.floor().to_integer();
        }
        // x = (P + Q√d) / D
        let den = self.a.denom().lcm(self.b.denom());
        let p = self.a.numer() * (&den / self.a.denom());
        let q = self.b.numer() * (&den / self.b.denom());
        let root = BigInt::from(isqrt_floor((&q * &q * self.d_int()).magnitude()));
        let approx = if q.is_negative() { p - root } else { p + root };
        let mut m = approx.div_floor(&den);
        loop {
            let next: BigInt = &m + 1;
            if self.sub_unchecked(&Self::from_int(self.field, next.clone())).sign_identity()
                != Sign::Negative
            {
                m = next;
                continue;
            }
            if self.sub_unchecked(&Self::from_int(self.field, m.clone())).sign_identity()
                == Sign::Negative
            {
                m -= 1;
                continue;
            }
            return m;
        }
    }

    /// `⌈ι(x)⌉`.
    pub fn ceil_identity(&self) -> BigInt {
        -self.neg_ref().floor_identity()
    }

    /// Smallest integer `m >= 0` with `m² >= ι(x)`.
    pub fn sqrt_ceil_identity(&self) -> Result<BigInt> {
        if self.sign_identity() == Sign::Negative {
            return Err(Error::NegativeAtIdentity(self.to_string()));
        }
        let fl = self.floor_identity();
        let s = BigInt::from(isqrt_floor(fl.magnitude()));
        let sq = Self::from_int(self.field, &s * &s);
        if sq.sub_unchecked(self).sign_identity() != Sign::Negative {
            Ok(s)
        } else {
            Ok(s + 1)
        }
    }

    /// Largest integer `m >= 0` with `m² <= ι(x)`.
    pub fn sqrt_floor_identity(&self) -> Result<BigInt> {
        if self.sign_identity() == Sign::Negative {
            return Err(Error::NegativeAtIdentity(self.to_string()));
        }
        Ok(BigInt::from(isqrt_floor(self.floor_identity().magnitude())))
    }

    /// Truncated decimal rendering of `ι(x)` with `digits` fractional digits.
    pub fn decimal(&self, digits: usize) -> String {
        let scale = rat_int(num_traits::pow(BigInt::from(10), digits));
        let negative = self.sign_identity() == Sign::Negative;
        let abs = if negative { self.neg_ref() } else { self.clone() };
        let scaled = abs.scale(&scale).floor_identity();
        rational::render_scaled(negative, &scaled, digits)
    }

    pub fn integrality(&self) -> IntegralityClass {
        let a_int = self.a.is_integer();
        let b_int = self.b.is_integer();
        if a_int && b_int {
            return if self.b.is_zero() { IntegralityClass::Z } else { IntegralityClass::ZSqrtD };
        }
        if let Field::Quadratic(d) = self.field {
            if d % 4 == 1 {
                let two = rat_int(2);
                let a2 = &self.a * &two;
                let b2 = &self.b * &two;
                if a2.is_integer() && b2.is_integer() {
                    let pa = a2.to_integer().is_odd();
                    let pb = b2.to_integer().is_odd();
                    if pa == pb {
                        return IntegralityClass::OK;
                    }
                }
            }
        }
        IntegralityClass::None
    }

    /// True when the element lies in the ring of integers of its field.
    pub fn is_algebraic_integer(&self) -> bool {
        self.integrality() != IntegralityClass::None
    }

    fn neg_ref(&self) -> Self {
        QuadElem { field: self.field, a: -&self.a, b: -&self.b }
    }

    /// Parse `A+Bsqrtd` style input. `default_field` is used when no `sqrt`
    /// term is present. Accepts an optional `(expr)/den` wrapper.
    pub fn parse(s: &str, default_field: Field) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty element".into()));
        }
        if let Some(rest) = s.strip_prefix('(') {
            let (inner, tail) = rest
                .rsplit_once(')')
                .ok_or_else(|| Error::Parse(format!("unbalanced parentheses in {s:?}")))?;
            let x = Self::parse(inner, default_field)?;
            if tail.is_empty() {
                return Ok(x);
            }
            let den = tail
                .strip_prefix('/')
                .ok_or_else(|| Error::Parse(format!("unexpected {tail:?} after parentheses")))?;
            let den = rational::parse_lenient(den)?;
            if den.is_zero() {
                return Err(Error::DivisionByZero);
            }
            return Ok(x.scale(&den.recip()));
        }
        let mut terms = Vec::new();
        let mut start = 0;
        for (i, c) in s.char_indices() {
            if (c == '+' || c == '-') && i > start && !s[..i].ends_with(['e', 'E']) {
                terms.push(&s[start..i]);
                start = i;
            }
        }
        terms.push(&s[start..]);
        let mut field = None;
        let mut a = Rational::zero();
        let mut b = Rational::zero();
        for term in terms {
            if let Some(pos) = term.find("sqrt") {
                let d: u64 = term[pos + 4..]
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad radicand in {term:?}")))?;
                let f = Field::quadratic(d)?;
                if field.is_some_and(|g| g != f) {
                    return Err(Error::Parse(format!("two different radicands in {s:?}")));
                }
                field = Some(f);
                let coeff = match &term[..pos] {
                    "" | "+" => Rational::one(),
                    "-" => -Rational::one(),
                    c => rational::parse_lenient(c.trim_end_matches('*'))?,
                };
                b += coeff;
            } else {
                a += rational::parse_lenient(term)?;
            }
        }
        match field {
            Some(f) => {
                if default_field != Field::Rational && default_field != f {
                    return Err(Error::MixedFields(default_field, f));
                }
                Self::new(f, a, b)
            }
            None => Ok(Self::from_rational(default_field, a)),
        }
    }
}

impl fmt::Display for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn rat_str(r: &Rational) -> String {
            if r.is_integer() {
                r.numer().to_string()
            } else {
                format!("{}/{}", r.numer(), r.denom())
            }
        }
        let d = match self.field {
            Field::Rational => return write!(f, "{}", rat_str(&self.a)),
            Field::Quadratic(d) => d,
        };
        if self.b.is_zero() {
            return write!(f, "{}", rat_str(&self.a));
        }
        let mut out = String::new();
        if !self.a.is_zero() {
            out.push_str(&rat_str(&self.a));
            if self.b.is_positive() {
                out.push('+');
            }
        }
        if self.b == -Rational::one() {
            out.push('-');
        } else if !self.b.is_one() {
            out.push_str(&rat_str(&self.b));
        }
        write!(f, "{out}sqrt{d}")
    }
}

impl Add for &QuadElem {
    type Output = QuadElem;
    /// Panics if the fields differ; use [`QuadElem::checked_add`] for fallible input.
    fn add(self, rhs: &QuadElem) -> QuadElem {
        self.checked_add(rhs).expect("field mismatch in QuadElem addition")
    }
}

impl Sub for &QuadElem {
    type Output = QuadElem;
    fn sub(self, rhs: &QuadElem) -> QuadElem {
        self.checked_sub(rhs).expect("field mismatch in QuadElem subtraction")
    }
}

impl Mul for &QuadElem {
    type Output = QuadElem;
    fn mul(self, rhs: &QuadElem) -> QuadElem {
        self.checked_mul(rhs).expect("field mismatch in QuadElem multiplication")
    }
}

impl Neg for &QuadElem {
    type Output = QuadElem;
    fn neg(self) -> QuadElem {
        self.neg_ref()
    }
}

impl Neg for QuadElem {
    type Output = QuadElem;
    fn neg(self) -> QuadElem {
        self.neg_ref()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuadElemRepr {
    d: Field,
    #[serde(with = "rational::serde_canonical")]
    a: Rational,
    #[serde(with = "rational::serde_canonical")]
    b: Rational,
}

impl Serialize for QuadElem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        QuadElemRepr { d: self.field, a: self.a.clone(), b: self.b.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuadElem {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = QuadElemRepr::deserialize(d)?;
        QuadElem::new(r.d, r.a, r.b).map_err(serde::de::Error::custom)
    }
}
