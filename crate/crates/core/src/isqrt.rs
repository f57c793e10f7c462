//! Integer square roots over arbitrary-precision integers.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Zero};

/// Largest `m` with `m² <= n`, by Newton iteration from above.
pub fn isqrt_floor(n: &BigUint) -> BigUint {
    if n.is_zero() {
        return BigUint::zero();
    }
    // 2^ceil(bits/2) >= sqrt(n), so the iteration decreases monotonically.
    let mut x = BigUint::one() << n.bits().div_ceil(2);
    loop {
        let y = (&x + n / &x) >> 1u32;
        if y >= x {
            return x;
        }
        x = y;
    }
}

/// Signed convenience wrapper; `None` for negative input.
pub fn integer_sqrt_floor(n: &BigInt) -> Option<BigInt> {
    match n.sign() {
        Sign::Minus => None,
        _ => Some(BigInt::from(isqrt_floor(n.magnitude()))),
    }
}

/// Exact square root if `n` is a perfect square.
pub fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    let s = integer_sqrt_floor(n)?;
    (&s * &s == *n).then_some(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn isq(n: u64) -> u64 {
        isqrt_floor(&BigUint::from(n)).try_into().unwrap()
    }

    #[test]
    fn small_values() {
        assert_eq!(isq(0), 0);
        assert_eq!(isq(1), 1);
        assert_eq!(isq(3), 1);
        assert_eq!(isq(4), 2);
        assert_eq!(isq(500), 22);
        assert_eq!(isq(1125), 33);
        assert_eq!(isq(u64::MAX), 4_294_967_295);
    }

    #[test]
    fn exact_sqrt_detects_squares() {
        assert_eq!(exact_sqrt(&BigInt::from(961)), Some(BigInt::from(31)));
        assert_eq!(exact_sqrt(&BigInt::from(962)), None);
        assert_eq!(exact_sqrt(&BigInt::from(-4)), None);
    }

    proptest! {
        #[test]
        fn floor_sqrt_brackets(bytes in proptest::collection::vec(any::<u8>(), 1..64)) {
            let n = BigUint::from_bytes_le(&bytes);
            let m = isqrt_floor(&n);
            prop_assert!(&m * &m <= n);
            let m1 = &m + 1u32;
            prop_assert!(&m1 * &m1 > n);
            prop_assert_eq!(m, num_integer::Roots::sqrt(&n));
        }
    }
}
