//! Small exact integer helpers shared across the crate.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Deterministic Miller-Rabin for `u64` (the small witness set is exact below 3.3e24).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = mod_pow_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn mod_pow_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Floor of the square root of a non-negative integer.
pub fn isqrt(n: &BigUint) -> BigUint {
    n.sqrt()
}

/// p-adic valuation of a nonzero integer; `None` for zero.
pub fn int_valuation(x: &BigInt, p: &BigInt) -> Option<u64> {
    if x.is_zero() {
        return None;
    }
    let mut v = 0u64;
    let mut cur = x.abs();
    loop {
        let (q, r) = cur.div_rem(p);
        if !r.is_zero() {
            return Some(v);
        }
        v += 1;
        cur = q;
    }
}

/// p-adic valuation of a nonzero rational; `None` for zero.
pub fn rat_valuation(x: &BigRational, p: &BigInt) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let vn = int_valuation(x.numer(), p).unwrap() as i64;
    let vd = int_valuation(x.denom(), p).unwrap() as i64;
    Some(vn - vd)
}

/// Euler's totient for small arguments.
pub fn euler_phi(mut n: u64) -> u64 {
    let mut phi = 1u64;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut pk = 1u64;
            while n % p == 0 {
                n /= p;
                pk *= p;
            }
            phi *= pk - pk / p;
        }
        p += 1;
    }
    if n > 1 {
        phi *= n - 1;
    }
    phi
}

/// Multiplicative order of `a` modulo `m` (gcd(a, m) must be 1).
pub fn mult_order(a: u64, m: u64) -> u64 {
    assert!(m > 0 && num_integer::gcd(a, m) == 1);
    if m == 1 {
        return 1;
    }
    let mut x = a % m;
    let mut k = 1u64;
    while x != 1 {
        x = mul_mod_u64(x, a, m);
        k += 1;
    }
    k
}

pub fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `base^exp` for rational base and signed integer exponent.
pub fn rat_pow(base: &BigRational, exp: i64) -> BigRational {
    if exp >= 0 {
        num_traits::Pow::pow(base.clone(), exp as u64)
    } else {
        num_traits::Pow::pow(base.clone(), (-exp) as u64)
            .recip()
    }
}

pub fn is_integer(x: &BigRational) -> bool {
    x.denom().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_small() {
        assert!(is_prime_u64(2));
        assert!(is_prime_u64(3));
        assert!(is_prime_u64(5));
        assert!(is_prime_u64(97));
        assert!(is_prime_u64(1_000_000_007));
        assert!(!is_prime_u64(1));
        assert!(!is_prime_u64(0));
        assert!(!is_prime_u64(91));
        assert!(!is_prime_u64(561)); // Carmichael
    }

    #[test]
    fn valuations() {
        assert_eq!(int_valuation(&big(40), &big(2)), Some(3));
        assert_eq!(int_valuation(&big(-40), &big(5)), Some(1));
        assert_eq!(int_valuation(&big(0), &big(5)), None);
        assert_eq!(rat_valuation(&rat(3, 50), &big(5)), Some(-2));
    }

    #[test]
    fn orders_and_phi() {
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(12), 4);
        assert_eq!(mult_order(5, 3), 2);
        assert_eq!(mult_order(2, 7), 3);
    }
}
