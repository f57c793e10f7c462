//! Sums of three squares in the ring of integers of ℚ(√d).
//!
//! Elements are handled as `(P + Q√d)/2` with integer `P, Q` (both even
//! unless d ≡ 1 mod 4, where only `P ≡ Q mod 2` is needed). A square has
//! doubled coordinates `((P² + dQ²)/2, PQ)`, so the last square is found by
//! solving for `P², Q²` from the remainder and its norm.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::quad::{Field, QuadElem};
use crate::rational::{rat, Rational};

/// Default number of `(γ₁, γ₂)` pairs examined before giving up.
pub const DEFAULT_BUDGET: u64 = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Half {
    p: i128,
    q: i128,
}

/// Doubled coordinates `(X, Y)` of `(X + Y√d)/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Doubled {
    x: i128,
    y: i128,
}

fn isqrt_i128(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let mut r = (n as f64).sqrt() as i128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    Some(r)
}

fn exact_sqrt_i128(n: i128) -> Option<i128> {
    isqrt_i128(n).filter(|r| r * r == n)
}

/// Sign of `a + b√d`.
fn sign_sqrt(a: i128, b: i128, d: i128) -> Ordering {
    let (sa, sb) = (a.cmp(&0), b.cmp(&0));
    if sb == Ordering::Equal || sa == sb {
        return sa;
    }
    if sa == Ordering::Equal {
        return sb;
    }
    match (a * a).cmp(&(d * b * b)) {
        Ordering::Greater => sa,
        Ordering::Less => sb,
        Ordering::Equal => Ordering::Equal,
    }
}

fn totally_nonneg(v: Doubled, d: i128) -> bool {
    v.x >= 0 && v.x * v.x >= d * v.y * v.y
}

struct Searcher {
    d: i128,
    half_allowed: bool,
    rational: bool,
}

impl Searcher {
    fn square(&self, g: Half) -> Doubled {
        Doubled { x: (g.p * g.p + self.d * g.q * g.q) / 2, y: g.p * g.q }
    }

    fn valid(&self, g: Half) -> bool {
        if self.rational {
            g.q == 0 && g.p % 2 == 0
        } else if self.half_allowed {
            (g.p - g.q) % 2 == 0
        } else {
            g.p % 2 == 0 && g.q % 2 == 0
        }
    }

    /// `γ` with `γ² = v` and `ι(γ) ≥ 0`, if one exists in the ring.
    fn sqrt(&self, v: Doubled) -> Option<Half> {
        let s = exact_sqrt_i128(v.x * v.x - self.d * v.y * v.y)?;
        for (pp, dq) in [(v.x + s, v.x - s), (v.x - s, v.x + s)] {
            if dq % self.d != 0 {
                continue;
            }
            let (Some(p), Some(q)) = (exact_sqrt_i128(pp), exact_sqrt_i128(dq / self.d)) else {
                continue;
            };
            let q = if v.y < 0 { -q } else { q };
            let g = Half { p, q };
            if p * q == v.y && self.valid(g) {
                return Some(g);
            }
        }
        None
    }

    /// All `γ ≠ 0` with `ι(γ) > 0` and `ε − γ²` totally nonnegative, by decreasing `ι(γ)`.
    fn candidates(&self, eps: Doubled, iota: f64, sigma: f64) -> Vec<Half> {
        let (ri, rs) = (iota.max(0.0).sqrt(), sigma.max(0.0).sqrt());
        let pbound = (ri + rs).ceil() as i128 + 2;
        let qbound = ((ri + rs) / (self.d as f64).sqrt()).ceil() as i128 + 2;
        let mut out = Vec::new();
        for p in -pbound..=pbound {
            for q in -qbound..=qbound {
                let g = Half { p, q };
                if !self.valid(g) || sign_sqrt(p, q, self.d) != Ordering::Greater {
                    continue;
                }
                let sq = self.square(g);
                if totally_nonneg(Doubled { x: eps.x - sq.x, y: eps.y - sq.y }, self.d) {
                    out.push(g);
                }
            }
        }
        let d = self.d;
        out.sort_by(|a, b| sign_sqrt(b.p - a.p, b.q - a.q, d));
        out
    }
}

fn to_doubled(eps: &QuadElem) -> Option<Doubled> {
    let two = Rational::from_integer(BigInt::from(2));
    let x = eps.a() * &two;
    let y = eps.b() * &two;
    if !x.is_integer() || !y.is_integer() {
        return None;
    }
    Some(Doubled { x: x.to_integer().to_i128()?, y: y.to_integer().to_i128()? })
}

fn to_elem(field: Field, g: Half) -> QuadElem {
    let a = rat(g.p as i64, 2);
    let b = rat(g.q as i64, 2);
    QuadElem::new(field, a, b).expect("field matches")
}

/// Finds `γ₁, γ₂, γ₃ ∈ O_K` with `γ₁² + γ₂² + γ₃² = ε`.
///
/// Pairs `(γ₁, γ₂)` are tried with `ι(γ₁)` decreasing and `ι(γ₂) ≤ ι(γ₁)`;
/// the first pair whose remainder is a square wins. `budget` caps the number
/// of pairs examined.
pub fn three_squares_decompose(eps: &QuadElem, budget: u64) -> Result<[QuadElem; 3]> {
    let field = eps.field();
    let d = match field {
        Field::Rational => 1,
        Field::Quadratic(d) => d,
    };
    if !eps.is_algebraic_integer() {
        return Err(Error::NonIntegral(eps.to_string()));
    }
    if !eps.is_totally_nonnegative() {
        return Err(Error::InvalidParameter(format!("{eps} is not totally nonnegative")));
    }
    let e = to_doubled(eps)
        .filter(|e| e.x.unsigned_abs() < 1 << 60 && e.y.unsigned_abs() < 1 << 60)
        .ok_or_else(|| Error::InvalidParameter(format!("{eps} is too large for the search")))?;
    let s = Searcher { d: d as i128, half_allowed: d % 4 == 1, rational: field == Field::Rational };
    let sqrt_d = (d as f64).sqrt();
    let iota = (e.x as f64 + e.y as f64 * sqrt_d) / 2.0;
    let sigma = (e.x as f64 - e.y as f64 * sqrt_d) / 2.0;
    let zero = Half { p: 0, q: 0 };
    let finish = |gs: [Half; 3]| gs.map(|g| to_elem(field, g));

    if e.x == 0 && e.y == 0 {
        return Ok(finish([zero; 3]));
    }
    let mut cands = s.candidates(e, iota * (1.0 + 1e-9) + 1.0, sigma * (1.0 + 1e-9) + 1.0);
    // γ₂ = 0 last, so sums of fewer squares are covered
    cands.push(zero);
    let mut spent = 0u64;
    for (i, &g1) in cands.iter().enumerate() {
        let s1 = s.square(g1);
        let r1 = Doubled { x: e.x - s1.x, y: e.y - s1.y };
        for &g2 in &cands[i..] {
            spent += 1;
            if spent > budget {
                return Err(Error::NotFoundWithinBudget(budget));
            }
            let s2 = s.square(g2);
            let r2 = Doubled { x: r1.x - s2.x, y: r1.y - s2.y };
            if !totally_nonneg(r2, s.d) {
                continue;
            }
            if let Some(g3) = s.sqrt(r2) {
                return Ok(finish([g1, g2, g3]));
            }
        }
    }
    Err(Error::NotFoundWithinBudget(spent))
}

/// `Σ γᵢ² = ε` with every `γᵢ` integral.
pub fn verify_three_squares(eps: &QuadElem, gammas: &[QuadElem]) -> bool {
    gammas.len() == 3
        && gammas.iter().all(|g| g.field() == eps.field() && g.is_algebraic_integer())
        && gammas.iter().fold(QuadElem::zero(eps.field()), |acc, g| &acc + &g.square()) == *eps
}
