//! Integer factorization and T-smoothness.
//!
//! Trial division strips small primes; once the cofactor fits in a `u64`
//! it is finished with deterministic Miller–Rabin and Brent's variant of
//! Pollard rho. A cofactor above 64 bits that trial division cannot reduce
//! is reported as a failure instead of being guessed at.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Trial division limit for cofactors too large for the 64-bit path.
pub const TRIAL_BOUND: u64 = 1_000_000;

/// Trial division limit before switching a 64-bit cofactor to rho.
const SMALL_TRIAL_BOUND: u64 = 4096;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimePower {
    pub p: u64,
    pub e: u32,
}

/// Complete factorization of a positive integer, primes ascending.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Factorization {
    #[serde(with = "serde_biguint")]
    pub value: BigUint,
    pub factors: Vec<PrimePower>,
}

impl Factorization {
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|f| f.p)
    }

    /// Product of all prime powers.
    pub fn product(&self) -> BigUint {
        self.factors
            .iter()
            .fold(BigUint::one(), |acc, f| acc * num_traits::pow(BigUint::from(f.p), f.e as usize))
    }

    /// Smallest `T` for which the value is T-smooth.
    pub fn minimal_smoothness_bound(&self) -> u64 {
        self.factors.last().map_or(2, |f| f.p + 1)
    }
}

pub(crate) mod serde_biguint {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&n.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        let n = crate::rational::parse_int(&s).map_err(serde::de::Error::custom)?;
        n.to_biguint()
            .ok_or_else(|| serde::de::Error::custom(format!("{s} is negative")))
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub(crate) fn pow_mod_u64(base: u64, exp: u64, m: u64) -> u64 {
    pow_mod(base, exp, m)
}

/// Deterministic Miller–Rabin for all 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primality of an arbitrary-precision integer, where certifiable.
pub fn is_prime(n: &BigUint) -> Result<bool> {
    match n.to_u64() {
        Some(v) => Ok(is_prime_u64(v)),
        None => {
            let f = factorize(n)?;
            Ok(f.factors.len() == 1 && f.factors[0].e == 1)
        }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Brent's cycle-finding rho; returns a nontrivial factor of an odd composite.
fn pollard_brent(n: u64) -> u64 {
    // fixed seed schedule keeps the output deterministic
    for c in 1..n {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut y, m) = (2u64, 128u64);
        let (mut g, mut r, mut q) = (1u64, 1u64, 1u64);
        let mut x = y;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..m.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += m;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!("rho failed on composite {n}")
}

fn factor_u64_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime_u64(n) {
        out.push(n);
        return;
    }
    for p in [2u64, 3, 5] {
        if n.is_multiple_of(p) {
            out.push(p);
            factor_u64_into(n / p, out);
            return;
        }
    }
    let d = pollard_brent(n);
    factor_u64_into(d, out);
    factor_u64_into(n / d, out);
}

fn collect(value: BigUint, mut primes: Vec<u64>) -> Factorization {
    primes.sort_unstable();
    let mut factors: Vec<PrimePower> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some(last) if last.p == p => last.e += 1,
            _ => factors.push(PrimePower { p, e: 1 }),
        }
    }
    Factorization { value, factors }
}

/// Complete factorization of `n ≥ 1`.
pub fn factorize(n: &BigUint) -> Result<Factorization> {
    if n.is_zero() {
        return Err(Error::InvalidParameter("cannot factor 0".into()));
    }
    let mut primes = Vec::new();
    let mut rest = n.clone();
    let mut d = 2u64;
    loop {
        if let Some(small) = rest.to_u64() {
            return Ok(collect(n.clone(), factor_small(small, d, primes)));
        }
        if d > TRIAL_BOUND {
            break;
        }
        while (&rest % d).is_zero() {
            rest /= d;
            primes.push(d);
        }
        d = if d == 2 { 3 } else { d + 2 };
    }
    // rest > 2^64 without factors up to the trial bound
    Err(Error::FactorizationFailed(format!(
        "{n} (cofactor {rest} exceeds the 64-bit certification range)"
    )))
}

/// Finish a 64-bit cofactor whose primes below `from` are already removed.
fn factor_small(mut m: u64, from: u64, mut primes: Vec<u64>) -> Vec<u64> {
    let mut d = from;
    while d <= SMALL_TRIAL_BOUND && d.saturating_mul(d) <= m {
        while m.is_multiple_of(d) {
            m /= d;
            primes.push(d);
        }
        d = if d == 2 { 3 } else { d + 2 };
    }
    if m > 1 {
        if d.saturating_mul(d) > m {
            primes.push(m);
        } else {
            factor_u64_into(m, &mut primes);
        }
    }
    primes
}

/// True when every prime factor of `n` is strictly less than `t`.
pub fn is_t_smooth(n: &BigUint, t: u64) -> Result<bool> {
    if t <= 1 {
        return Err(Error::InvalidParameter(format!("smoothness bound {t} must exceed 1")));
    }
    if n.is_zero() {
        return Err(Error::InvalidParameter("0 has no smoothness".into()));
    }
    if t <= TRIAL_BOUND {
        // trial division by everything below t never needs a certificate
        if let Some(mut m) = n.to_u64() {
            let mut d = 2;
            while d < t && m > 1 {
                if d.saturating_mul(d) > m {
                    return Ok(m < t);
                }
                while m % d == 0 {
                    m /= d;
                }
                d += 1;
            }
            return Ok(m == 1);
        }
        let mut rest = n.clone();
        for d in (2..t).filter(|&d| d == 2 || d % 2 == 1) {
            if rest.is_one() {
                break;
            }
            while (&rest % d).is_zero() {
                rest /= d;
            }
        }
        return Ok(rest.is_one());
    }
    Ok(factorize(n)?.primes().all(|p| p < t))
}

/// `[p, p², …, p^kmax]`.
pub fn smooth_targets(p: u64, kmax: u32) -> Result<Vec<BigUint>> {
    if !is_prime_u64(p) {
        return Err(Error::NotPrime(p.to_string()));
    }
    if kmax == 0 {
        return Err(Error::InvalidParameter("kmax must be at least 1".into()));
    }
    let mut out = Vec::with_capacity(kmax as usize);
    let mut acc = BigUint::one();
    for _ in 0..kmax {
        acc *= p;
        out.push(acc.clone());
    }
    Ok(out)
}

/// Render a factorization as `2^3 * 5`.
pub fn format_factorization(f: &Factorization) -> String {
    if f.factors.is_empty() {
        return "1".into();
    }
    f.factors
        .iter()
        .map(|pp| if pp.e == 1 { pp.p.to_string() } else { format!("{}^{}", pp.p, pp.e) })
        .collect::<Vec<_>>()
        .join(" * ")
}
