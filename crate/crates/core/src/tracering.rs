//! Upper bounds for trace rings as localizations of ℤ or O_K.
//!
//! A bound is determined by the set of primes (or prime ideals) inverted,
//! so exponents are dropped: ℤ[1/p^e] = ℤ[1/p] and O_K[1/ρ^k] = O_K[1/ρ].

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{Field, QuadElem};
use crate::rational::{rat_int, Rational};
use crate::smooth::{factorize, pow_mod_u64};

/// Decomposition type of a rational prime in a quadratic field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrimeKind {
    Split,
    Inert,
    Ramified,
}

/// One prime ideal in the factorization of a principal ideal `(ρ)`.
///
/// For an odd split prime the branch `r` satisfies `r² ≡ d (mod p)` and names
/// the ideal `(p, √d − r)`. For `p = 2` split (d ≡ 1 mod 8) the branch is the
/// residue of `(1+√d)/2` modulo the ideal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimeIdealFactor {
    pub p: u64,
    pub kind: PrimeKind,
    pub branch: Option<u64>,
    pub exponent: u32,
}

impl PrimeIdealFactor {
    /// Absolute norm of the prime ideal: `p` unless inert, then `p²`.
    pub fn residue_norm(&self) -> u64 {
        match self.kind {
            PrimeKind::Inert => self.p * self.p,
            _ => self.p,
        }
    }
}

/// Legendre–Kronecker style splitting of `p` in ℚ(√d).
pub fn prime_kind(d: u64, p: u64) -> PrimeKind {
    if p == 2 {
        return match d % 8 {
            1 => PrimeKind::Split,
            5 => PrimeKind::Inert,
            _ => PrimeKind::Ramified,
        };
    }
    match legendre(d % p, p) {
        0 => PrimeKind::Ramified,
        1 => PrimeKind::Split,
        _ => PrimeKind::Inert,
    }
}

/// Legendre symbol `(a|p)` for an odd prime `p`, by Euler's criterion.
pub fn legendre(a: u64, p: u64) -> i8 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    if pow_mod_u64(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Tonelli–Shanks square root of a quadratic residue modulo an odd prime.
pub fn sqrt_mod(n: u64, p: u64) -> Option<u64> {
    let n = n % p;
    if n == 0 {
        return Some(0);
    }
    if legendre(n, p) != 1 {
        return None;
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % p as u128) as u64;
    let (mut q, mut s) = (p - 1, 0u32);
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let z = (2..p).find(|&z| legendre(z, p) == -1)?;
    let mut m = s;
    let mut c = pow_mod_u64(z, q, p);
    let mut t = pow_mod_u64(n, q, p);
    let mut r = pow_mod_u64(n, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul(t2, t2);
            i += 1;
        }
        let b = pow_mod_u64(c, 1 << (m - i - 1), p);
        m = i;
        c = mul(b, b);
        t = mul(t, c);
        r = mul(r, b);
    }
    Some(r.min(p - r))
}

fn rational_mod(r: &Rational, p: u64) -> Option<u64> {
    let m = num_bigint::BigInt::from(p);
    let den = (r.denom() % &m).to_u64()?;
    if den == 0 {
        return None;
    }
    let num = ((r.numer() % &m + &m) % &m).to_u64()?;
    let inv = pow_mod_u64(den, p - 2, p);
    Some(((num as u128 * inv as u128) % p as u128) as u64)
}

/// Whether `x ∈ O_K` lies in the split prime above `p` with the given branch.
fn in_branch(x: &QuadElem, d: u64, p: u64, branch: u64) -> bool {
    if p == 2 {
        // x = (a − b) + 2b·ω with ω = (1+√d)/2
        let u = x.a() - x.b();
        let v = x.b() * rat_int(2);
        let uu = (u.numer() % 2i32).abs().to_u64().unwrap_or(0);
        let vv = (v.numer() % 2i32).abs().to_u64().unwrap_or(0);
        return (uu + vv * branch).is_multiple_of(2);
    }
    let _ = d;
    match (rational_mod(x.a(), p), rational_mod(x.b(), p)) {
        (Some(a), Some(b)) => (a as u128 + b as u128 * branch as u128).is_multiple_of(p as u128),
        _ => false,
    }
}

/// Prime-ideal factorization of `(ρ)` for `ρ` a nonzero integer of ℚ(√d).
pub fn factor_principal_ideal(rho: &QuadElem) -> Result<Vec<PrimeIdealFactor>> {
    let d = match rho.field() {
        Field::Quadratic(d) => d,
        Field::Rational => {
            return Err(Error::InvalidParameter("principal ideal factorization needs a quadratic field".into()))
        }
    };
    if !rho.is_algebraic_integer() {
        return Err(Error::NonIntegral(rho.to_string()));
    }
    if rho.is_zero() {
        return Err(Error::InvalidParameter("the zero ideal has no factorization".into()));
    }
    let norm = rho.norm().abs().to_integer();
    let norm = norm.to_biguint().expect("absolute value");
    let mut out = Vec::new();
    for pp in factorize(&norm)?.factors {
        let p = pp.p;
        match prime_kind(d, p) {
            PrimeKind::Ramified => out.push(PrimeIdealFactor { p, kind: PrimeKind::Ramified, branch: None, exponent: pp.e }),
            PrimeKind::Inert => out.push(PrimeIdealFactor { p, kind: PrimeKind::Inert, branch: None, exponent: pp.e / 2 }),
            PrimeKind::Split => {
                // m = largest power of p dividing ρ in O_K; both branches share it
                let mut m = 0u32;
                let mut rest = rho.clone();
                let inv_p = Rational::new(1.into(), p.into());
                loop {
                    let next = rest.scale(&inv_p);
                    if !next.is_algebraic_integer() {
                        break;
                    }
                    rest = next;
                    m += 1;
                }
                let (r1, r2) = if p == 2 {
                    (0, 1)
                } else {
                    let r = sqrt_mod(d % p, p).expect("split prime has a square root");
                    (r, p - r)
                };
                let extra = pp.e - 2 * m;
                let (e1, e2) = if extra == 0 {
                    (m, m)
                } else if in_branch(&rest, d, p, r1) {
                    (m + extra, m)
                } else {
                    (m, m + extra)
                };
                let mut pair = vec![(r1, e1), (r2, e2)];
                pair.sort();
                for (branch, exponent) in pair {
                    if exponent > 0 {
                        out.push(PrimeIdealFactor { p, kind: PrimeKind::Split, branch: Some(branch), exponent });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// One inverted prime of a [`TraceRingBound`]; `kind` is absent over ℚ.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvertedPrime {
    pub p: u64,
    pub kind: Option<PrimeKind>,
    pub branch: Option<u64>,
}

/// `ℤ[1/p₁,…,1/p_r]` or `O_K[1/𝔭₁,…,1/𝔭_r]`, stored radical-only and sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TraceRingBound {
    field: Field,
    inverted: Vec<InvertedPrime>,
}

impl TraceRingBound {
    pub fn new(field: Field, mut inverted: Vec<InvertedPrime>) -> Result<Self> {
        for ip in &inverted {
            match (field, ip.kind) {
                (Field::Rational, None) if ip.branch.is_none() => {}
                (Field::Quadratic(d), Some(kind)) => {
                    if prime_kind(d, ip.p) != kind {
                        return Err(Error::InvalidParameter(format!(
                            "prime {} is not {kind:?} in {field}",
                            ip.p
                        )));
                    }
                    if (kind == PrimeKind::Split) != ip.branch.is_some() {
                        return Err(Error::InvalidParameter(format!("branch mismatch for prime {}", ip.p)));
                    }
                }
                _ => {
                    return Err(Error::InvalidParameter(format!("inverted prime {} does not match {field}", ip.p)))
                }
            }
            if !crate::smooth::is_prime_u64(ip.p) {
                return Err(Error::NotPrime(ip.p.to_string()));
            }
        }
        inverted.sort();
        inverted.dedup();
        Ok(TraceRingBound { field, inverted })
    }

    /// The base ring itself (nothing inverted).
    pub fn base(field: Field) -> Self {
        TraceRingBound { field, inverted: Vec::new() }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn inverted(&self) -> &[InvertedPrime] {
        &self.inverted
    }

    /// `ℤ[1/f(w)]` for a positive integer `f(w)`.
    pub fn rational(fw: &BigUint) -> Result<Self> {
        if fw.is_zero() {
            return Err(Error::InvalidParameter("f(w) must be positive".into()));
        }
        let inverted = factorize(fw)?
            .primes()
            .map(|p| InvertedPrime { p, kind: None, branch: None })
            .collect();
        Self::new(Field::Rational, inverted)
    }

    /// `O_K[1/ρ]`, from the prime ideals dividing `(ρ)`.
    pub fn principal(rho: &QuadElem) -> Result<Self> {
        let factors = factor_principal_ideal(rho)?;
        Self::from_ideals(rho.field(), &factors)
    }

    pub fn from_ideals(field: Field, factors: &[PrimeIdealFactor]) -> Result<Self> {
        let inverted = factors
            .iter()
            .map(|f| InvertedPrime { p: f.p, kind: Some(f.kind), branch: f.branch })
            .collect();
        Self::new(field, inverted)
    }

    /// All bounds obtained from subsets of the inverted primes (2^r of them).
    pub fn subring_lattice(&self) -> Vec<TraceRingBound> {
        let r = self.inverted.len();
        (0u64..1 << r)
            .map(|mask| TraceRingBound {
                field: self.field,
                inverted: (0..r)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| self.inverted[i].clone())
                    .collect(),
            })
            .collect()
    }
}

impl<'de> Deserialize<'de> for TraceRingBound {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Repr {
            field: Field,
            inverted: Vec<InvertedPrime>,
        }
        let r = Repr::deserialize(d)?;
        let bound = TraceRingBound::new(r.field, r.inverted.clone()).map_err(serde::de::Error::custom)?;
        if bound.inverted != r.inverted {
            return Err(serde::de::Error::custom("inverted primes are not in canonical order"));
        }
        Ok(bound)
    }
}

impl fmt::Display for TraceRingBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.field {
            Field::Rational => {
                if self.inverted.is_empty() {
                    return write!(f, "Z");
                }
                let radical = self.inverted.iter().fold(BigUint::one(), |acc, ip| acc * ip.p);
                write!(f, "Z[1/{radical}]")
            }
            Field::Quadratic(d) => {
                if self.inverted.is_empty() {
                    return write!(f, "O_K");
                }
                let ideals: Vec<String> = self
                    .inverted
                    .iter()
                    .map(|ip| match (ip.kind, ip.branch) {
                        (Some(PrimeKind::Split), Some(r)) if ip.p == 2 => {
                            format!("(2,(1+sqrt{d})/2-{r})")
                        }
                        (Some(PrimeKind::Split), Some(r)) => format!("({},sqrt{d}-{r})", ip.p),
                        (Some(PrimeKind::Ramified), _) if ip.p == 2 && d % 2 == 1 => {
                            format!("(2,1+sqrt{d})")
                        }
                        (Some(PrimeKind::Ramified), _) => format!("({},sqrt{d})", ip.p),
                        _ => format!("({})", ip.p),
                    })
                    .collect();
                write!(f, "O_K[1/{}]", ideals.join(""))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k5(a: i64, b: i64) -> QuadElem {
        QuadElem::from_ints(Field::sqrt5(), a, b)
    }

    /// Brute-force membership of `x` in `(p, √d − r)`: x ≡ 0 after substituting √d ↦ r.
    fn brute_in_ideal(x: &QuadElem, p: u64, r: u64) -> bool {
        let a = x.a().to_integer();
        let b = x.b().to_integer();
        let v = (a + b * num_bigint::BigInt::from(r)) % num_bigint::BigInt::from(p);
        v.is_zero()
    }

    #[test]
    fn legendre_and_kinds() {
        assert_eq!(prime_kind(5, 31), PrimeKind::Split);
        assert_eq!(prime_kind(5, 5), PrimeKind::Ramified);
        assert_eq!(prime_kind(5, 2), PrimeKind::Inert);
        assert_eq!(prime_kind(5, 3), PrimeKind::Inert);
        assert_eq!(prime_kind(5, 11), PrimeKind::Split);
        assert_eq!(prime_kind(3, 2), PrimeKind::Ramified);
        assert_eq!(prime_kind(17, 2), PrimeKind::Split);
        for p in [3u64, 7, 11, 13, 31, 1009] {
            for a in 1..p.min(60) {
                let brute = (1..p).any(|x| x * x % p == a);
                assert_eq!(legendre(a, p) == 1, brute, "a={a} p={p}");
                if brute {
                    let r = sqrt_mod(a, p).unwrap();
                    assert_eq!(r * r % p, a);
                }
            }
        }
    }

    #[test]
    fn factor_rho() {
        let f = factor_principal_ideal(&k5(6, 1)).unwrap();
        assert_eq!(f, vec![PrimeIdealFactor { p: 31, kind: PrimeKind::Split, branch: Some(25), exponent: 1 }]);
        assert_eq!(25 * 25 % 31, 5);
        assert!(brute_in_ideal(&k5(6, 1), 31, 25));
        assert!(!brute_in_ideal(&k5(6, 1), 31, 6));

        let f = factor_principal_ideal(&k5(0, 1)).unwrap();
        assert_eq!(f, vec![PrimeIdealFactor { p: 5, kind: PrimeKind::Ramified, branch: None, exponent: 1 }]);
        let f = factor_principal_ideal(&k5(2, 0)).unwrap();
        assert_eq!(f, vec![PrimeIdealFactor { p: 2, kind: PrimeKind::Inert, branch: None, exponent: 1 }]);
    }

    #[test]
    fn factor_powers_and_products() {
        let rho = k5(6, 1);
        let f = factor_principal_ideal(&rho.pow(7).unwrap()).unwrap();
        assert_eq!(f, vec![PrimeIdealFactor { p: 31, kind: PrimeKind::Split, branch: Some(25), exponent: 7 }]);
        // ρσ(ρ) = 31: both branches
        let f = factor_principal_ideal(&k5(31, 0)).unwrap();
        assert_eq!(f.len(), 2);
        assert!(f.iter().all(|x| x.exponent == 1));
        // 31·ρ
        let f = factor_principal_ideal(&k5(186, 31)).unwrap();
        assert_eq!(f.iter().map(|x| (x.branch, x.exponent)).collect::<Vec<_>>(), vec![(Some(6), 1), (Some(25), 2)]);
        // half-integral element: φ has norm -1
        let phi = QuadElem::parse("(1+sqrt5)/2", Field::sqrt5()).unwrap();
        assert!(factor_principal_ideal(&phi).unwrap().is_empty());
        assert!(matches!(factor_principal_ideal(&QuadElem::parse("1/3sqrt5", Field::sqrt5()).unwrap()), Err(Error::NonIntegral(_))));
    }

    #[test]
    fn norms_multiply_back() {
        for a in -20i64..=20 {
            for b in -20i64..=20 {
                let x = k5(a, b);
                if x.is_zero() {
                    continue;
                }
                let f = factor_principal_ideal(&x).unwrap();
                let prod: u64 = f.iter().map(|pf| pf.residue_norm().pow(pf.exponent)).product();
                assert_eq!(Rational::from_integer(prod.into()), x.norm().abs(), "x = {x}");
                for pf in f.iter().filter(|pf| pf.kind == PrimeKind::Split && pf.p != 2) {
                    assert!(brute_in_ideal(&x, pf.p, pf.branch.unwrap()), "x = {x} p = {}", pf.p);
                }
            }
        }
    }

    #[test]
    fn rational_bounds() {
        assert_eq!(TraceRingBound::rational(&BigUint::from(31u32)).unwrap().to_string(), "Z[1/31]");
        assert_eq!(TraceRingBound::rational(&(BigUint::one() << 40)).unwrap().to_string(), "Z[1/2]");
        assert_eq!(TraceRingBound::rational(&BigUint::one()).unwrap().to_string(), "Z");
        assert_eq!(TraceRingBound::rational(&BigUint::from(12u32)).unwrap(), TraceRingBound::rational(&BigUint::from(6u32)).unwrap());
    }

    #[test]
    fn lattice_sizes() {
        let b = TraceRingBound::rational(&BigUint::from(30u32)).unwrap();
        let lattice = b.subring_lattice();
        assert_eq!(lattice.len(), 8);
        let mut names: Vec<String> = lattice.iter().map(|x| x.to_string()).collect();
        names.sort();
        assert_eq!(names, ["Z", "Z[1/10]", "Z[1/15]", "Z[1/2]", "Z[1/30]", "Z[1/3]", "Z[1/5]", "Z[1/6]"]);
        assert_eq!(TraceRingBound::base(Field::Rational).subring_lattice().len(), 1);
        let c = TraceRingBound::principal(&k5(6, 1)).unwrap();
        assert_eq!(c.to_string(), "O_K[1/(31,sqrt5-25)]");
        assert_eq!(c.subring_lattice().len(), 2);
        let big = TraceRingBound::rational(&BigUint::from(2u64 * 3 * 5 * 7 * 11 * 13)).unwrap();
        assert_eq!(big.subring_lattice().len(), 64);
    }

    #[test]
    fn json_round_trip() {
        let c = TraceRingBound::principal(&k5(6, 1)).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(s, r#"{"field":5,"inverted":[{"p":31,"kind":"split","branch":25}]}"#);
        assert_eq!(serde_json::from_str::<TraceRingBound>(&s).unwrap(), c);
        let r = TraceRingBound::rational(&BigUint::from(6u32)).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, r#"{"field":"rational","inverted":[{"p":2,"kind":null,"branch":null},{"p":3,"kind":null,"branch":null}]}"#);
        assert_eq!(serde_json::from_str::<TraceRingBound>(&s).unwrap(), r);
        assert!(serde_json::from_str::<TraceRingBound>(&s.replace("\"p\":3", "\"p\":4")).is_err());
        assert!(serde_json::from_str::<TraceRingBound>(r#"{"field":5,"inverted":[{"p":31,"kind":"inert","branch":null}]}"#).is_err());
    }
}
