//! Reference arithmetic for Q(sqrt d) on plain rational pairs, kept apart
//! from the library so tests compare two separate implementations.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

/// `a + b√d` as a pair.
#[derive(Clone, Debug, PartialEq)]
pub struct Pair {
    pub a: Q,
    pub b: Q,
    pub d: u64,
}

impl Pair {
    pub fn new(a: Q, b: Q, d: u64) -> Self {
        Pair { a, b, d }
    }

    pub fn add(&self, o: &Pair) -> Pair {
        Pair::new(&self.a + &o.a, &self.b + &o.b, self.d)
    }

    pub fn sub(&self, o: &Pair) -> Pair {
        Pair::new(&self.a - &o.a, &self.b - &o.b, self.d)
    }

    pub fn mul(&self, o: &Pair) -> Pair {
        let d = Q::from_integer(self.d.into());
        Pair::new(&self.a * &o.a + d * &self.b * &o.b, &self.a * &o.b + &self.b * &o.a, self.d)
    }

    pub fn conj(&self) -> Pair {
        Pair::new(self.a.clone(), -&self.b, self.d)
    }

    /// Sign at the positive square root, by bracketing `|b|√d` between consecutive integers.
    pub fn sign(&self) -> i8 {
        let l = self.a.denom().lcm(self.b.denom());
        let a = (&self.a * Q::from_integer(l.clone())).to_integer();
        let b = (&self.b * Q::from_integer(l)).to_integer();
        if b.is_zero() {
            return sign_int(&a);
        }
        // s < |b|√d < s + 1 since d is not a square
        let s = (b.abs().pow(2u32) * BigInt::from(self.d)).sqrt();
        if b.is_positive() {
            if &a + &s >= BigInt::zero() { 1 } else { -1 }
        } else if a <= s {
            -1
        } else {
            1
        }
    }

    pub fn sign_conj(&self) -> i8 {
        self.conj().sign()
    }
}

pub fn sign_int(x: &BigInt) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

pub fn sign_q(x: &Q) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// `ln(y)` truncated to `scale` decimal digits via `2·atanh((y−1)/(y+1))`,
/// with `y` given as a fixed-point integer at the same scale.
pub fn ln_fixed(y: &BigInt, scale: u32) -> BigInt {
    let one = BigInt::from(10).pow(scale);
    let z = (y - &one) * &one / (y + &one);
    let z2 = &z * &z / &one;
    let mut term = z.clone();
    let mut sum = BigInt::zero();
    let mut n = 1u64;
    while !term.is_zero() {
        sum += &term / BigInt::from(n);
        term = &term * &z2 / &one;
        n += 2;
    }
    sum * 2
}

/// `arccosh(√c)` for rational `c > 1` as a fixed-point integer at `scale` digits,
/// accurate to a few units in the last place.
pub fn arccosh_sqrt_fixed(c: &Q, scale: u32) -> BigInt {
    let one = BigInt::from(10).pow(scale);
    let sq = |x: &Q| -> BigInt {
        let v = x * Q::from_integer(&one * &one);
        v.to_integer().sqrt()
    };
    let y = sq(c) + sq(&(c - Q::one()));
    ln_fixed(&y, scale)
}
