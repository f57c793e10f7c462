//! Rigorous enclosures of `d = arccosh(√c)` for an exact `c = cosh² d ≥ 1`.
//!
//! Candidates `t` are dyadic rationals. For each one, `cosh t` is bounded
//! above and below by a fixed-point exponential series with directed
//! rounding, and the squared bounds are compared exactly against `c`.
//! Bisection keeps `cosh²(lo) ≤ c ≤ cosh²(hi)` certified at every step.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{QuadElem, Sign};
use crate::rational::{self, rat_int, Rational};

/// Default enclosure width, 10⁻¹².
pub fn default_width() -> Rational {
    Rational::new(BigInt::one(), num_traits::pow(BigInt::from(10), 12))
}

/// Closed interval `[lo, hi]` of hyperbolic lengths.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistanceInterval {
    #[serde(with = "rational::serde_canonical")]
    pub lo: Rational,
    #[serde(with = "rational::serde_canonical")]
    pub hi: Rational,
}

impl DistanceInterval {
    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / rat_int(2)
    }

    pub fn scaled(&self, k: i64) -> DistanceInterval {
        DistanceInterval { lo: &self.lo * rat_int(k), hi: &self.hi * rat_int(k) }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_ceil(b)
}

/// Fixed-point bounds `(L, U)` with `L/2^w ≤ eᵗ ≤ U/2^w` for `t ≥ 0`.
fn exp_bounds_fixed(t: &Rational, w: u64) -> (BigInt, BigInt) {
    let one = BigInt::one() << w;
    // reduce so that u = t / 2^s ≤ 1/4
    let mut s = 0u64;
    while t / rat_int(BigInt::one() << s) > Rational::new(1.into(), 4.into()) {
        s += 1;
    }
    let scaled = t * rat_int(BigInt::one() << w) / rat_int(BigInt::one() << s);
    let u_lo = scaled.floor().to_integer();
    let u_hi = scaled.ceil().to_integer();

    let mut lower = one.clone();
    let mut term = one.clone();
    let mut j = 1u64;
    loop {
        term = (&term * &u_lo).div_floor(&(&one * j));
        if term.is_zero() {
            break;
        }
        lower += &term;
        j += 1;
    }

    let mut upper = one.clone();
    let mut term = one.clone();
    let mut j = 1u64;
    loop {
        term = ceil_div(&(&term * &u_hi), &(&one * j));
        upper += &term;
        if term <= BigInt::one() {
            // tail after this term is at most term · u/(1−u) ≤ term
            upper += &term;
            break;
        }
        j += 1;
    }

    for _ in 0..s {
        lower = (&lower * &lower) >> w;
        upper = ceil_div(&(&upper * &upper), &one);
    }
    (lower, upper)
}

/// Rational bounds `lo ≤ cosh t ≤ hi` for `t ≥ 0` at `w` fractional bits.
pub fn cosh_bounds(t: &Rational, w: u64) -> (Rational, Rational) {
    if t.is_zero() {
        return (Rational::one(), Rational::one());
    }
    let t = t.abs();
    let (l, u) = exp_bounds_fixed(&t, w);
    let one_sq = BigInt::one() << (2 * w);
    let inv_lo = one_sq.div_floor(&u);
    let inv_hi = ceil_div(&one_sq, &l);
    let den = rat_int(BigInt::one() << (w + 1));
    (rat_int(l + inv_lo) / &den, rat_int(u + inv_hi) / den)
}

/// Compare `cosh²(t)` with `ι(c)`; `None` when the bounds at `w` bits straddle `c`.
fn compare_at(t: &Rational, c: &QuadElem, w: u64) -> Option<Ordering> {
    if t.is_zero() {
        let one = QuadElem::one(c.field());
        return Some(one.cmp_identity(c));
    }
    let (lo, hi) = cosh_bounds(t, w);
    let hi_sq = QuadElem::from_rational(c.field(), &hi * &hi);
    if hi_sq.cmp_identity(c) == Ordering::Less {
        return Some(Ordering::Less);
    }
    let lo_sq = QuadElem::from_rational(c.field(), &lo * &lo);
    if lo_sq.cmp_identity(c) == Ordering::Greater {
        return Some(Ordering::Greater);
    }
    None
}

fn bits_for(x: &Rational) -> u64 {
    x.abs().ceil().to_integer().bits()
}

/// Adaptive comparison: retries at doubled precision a few times.
pub fn compare_cosh_sq(t: &Rational, c: &QuadElem, base_bits: u64) -> Option<Ordering> {
    let mut w = base_bits + 2 * bits_for(t) + 16;
    for _ in 0..5 {
        if let Some(o) = compare_at(t, c, w) {
            return Some(o);
        }
        w *= 2;
    }
    None
}

fn base_bits(width: &Rational) -> u64 {
    // log2(1/width) rounded up, plus guard bits
    let inv = width.recip().ceil().to_integer();
    inv.bits() + 64
}

/// Enclose `arccosh(√ι(c))` in an interval of width at most `width`.
pub fn distance_interval(cosh_sq: &QuadElem, width: &Rational) -> Result<DistanceInterval> {
    if !width.is_positive() {
        return Err(Error::InvalidWidth);
    }
    let excess = cosh_sq - &QuadElem::one(cosh_sq.field());
    match excess.sign_identity() {
        Sign::Negative => return Err(Error::CoshBelowOne(cosh_sq.to_string())),
        Sign::Zero => return Ok(DistanceInterval { lo: Rational::zero(), hi: Rational::zero() }),
        Sign::Positive => {}
    }
    let bits = base_bits(width) + bits_for(&cosh_sq.a().abs()) + bits_for(&cosh_sq.b().abs());
    let decide = |t: &Rational| compare_cosh_sq(t, cosh_sq, bits);

    let mut lo = Rational::zero();
    let mut hi = Rational::one();
    loop {
        match decide(&hi) {
            Some(Ordering::Greater) | Some(Ordering::Equal) => break,
            Some(Ordering::Less) => {
                lo = hi.clone();
                hi *= rat_int(2);
            }
            // hi is indistinguishable from d; 2·hi is safely above
            None => hi *= rat_int(2),
        }
    }
    let two = rat_int(2);
    while &hi - &lo > *width {
        let gap = &hi - &lo;
        let mid = (&lo + &hi) / &two;
        match decide(&mid) {
            Some(Ordering::Less) => lo = mid,
            Some(Ordering::Greater) | Some(Ordering::Equal) => hi = mid,
            None => {
                // mid is within rounding noise of d; its neighbours a gap/8 away are not
                let below = &mid - &gap / rat_int(8);
                let above = &mid + &gap / rat_int(8);
                if decide(&below) == Some(Ordering::Less) {
                    lo = below;
                }
                if decide(&above) == Some(Ordering::Greater) {
                    hi = above;
                }
                if &hi - &lo == gap {
                    return Err(Error::InvalidParameter(format!(
                        "could not separate cosh^2 = {cosh_sq} from candidate {mid}"
                    )));
                }
            }
        }
    }
    Ok(DistanceInterval { lo, hi })
}

/// Independent check that `cosh²(lo) ≤ ι(c) ≤ cosh²(hi)` with `0 ≤ lo ≤ hi`.
pub fn certify_bracket(cosh_sq: &QuadElem, interval: &DistanceInterval) -> bool {
    if interval.lo.is_negative() || interval.lo > interval.hi {
        return false;
    }
    let bits = 64
        + bits_for(&cosh_sq.a().abs())
        + bits_for(&cosh_sq.b().abs())
        + interval.hi.denom().bits()
        + interval.lo.denom().bits();
    let lo_ok = matches!(
        compare_cosh_sq(&interval.lo, cosh_sq, bits),
        Some(Ordering::Less) | Some(Ordering::Equal)
    );
    let hi_ok = matches!(
        compare_cosh_sq(&interval.hi, cosh_sq, bits),
        Some(Ordering::Greater) | Some(Ordering::Equal)
    );
    lo_ok && hi_ok
}
