//! Big-integer binomial coefficients and small number-theoretic helpers.

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// `C(n, k)` as an exact big integer, with the usual convention that
/// out-of-range arguments give 0.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut result = BigUint::one();
    for i in 0..k {
        // The running value is C(n, i+1) at each step, so the division is exact.
        result = result * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    result
}

/// `C(n, k)` if it does not exceed `cap`, otherwise `None`.
///
/// After the symmetric reduction `k <= n/2` the partial values `C(n, i)` are
/// nondecreasing in `i`, so the computation can abort on the first overflow
/// without materializing an astronomically large integer.
pub fn binomial_capped(n: u64, k: u64, cap: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let cap_big = BigUint::from(cap);
    let mut result = BigUint::one();
    for i in 0..k {
        result = result * BigUint::from(n - i) / BigUint::from(i + 1);
        if result > cap_big {
            return None;
        }
    }
    result.try_into().ok()
}

/// Euler's totient by trial-division factorization.
pub fn totient(mut n: u64) -> u64 {
    assert!(n >= 1, "totient is defined for n >= 1");
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// All divisors of `n` in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    assert!(n >= 1);
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d != n / d {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

/// Deterministic primality test by trial division; ample for sweep ranges.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// `gcd(n, l)` with the convention `gcd(n, 0) = n`.
pub fn gcd(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_small_values() {
        assert_eq!(binomial(4, 2), BigUint::from(6u32));
        assert_eq!(binomial(6, 3), BigUint::from(20u32));
        assert_eq!(binomial(5, 0), BigUint::one());
        assert_eq!(binomial(5, 5), BigUint::one());
        assert_eq!(binomial(5, 6), BigUint::zero());
    }

    #[test]
    fn binomial_large_value() {
        let b = binomial(100, 50);
        assert_eq!(
            b.to_string(),
            "100891344545564193334812497256"
        );
    }

    #[test]
    fn binomial_capped_aborts() {
        assert_eq!(binomial_capped(13, 6, 10_000_000), Some(1716));
        assert_eq!(binomial_capped(100, 50, 10_000_000), None);
        assert_eq!(binomial_capped(5, 9, 10), Some(0));
        // Boundary: exactly at the cap is allowed.
        assert_eq!(binomial_capped(6, 3, 20), Some(20));
        assert_eq!(binomial_capped(6, 3, 19), None);
    }

    #[test]
    fn totient_values() {
        let expected = [1u64, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4];
        for (i, e) in expected.iter().enumerate() {
            assert_eq!(totient(i as u64 + 1), *e, "totient({})", i + 1);
        }
    }

    #[test]
    fn divisors_sorted() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(divisors(13), vec![1, 13]);
    }

    #[test]
    fn primality() {
        let primes: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn gcd_zero_convention() {
        assert_eq!(gcd(6, 0), 6);
        assert_eq!(gcd(6, 4), 2);
    }
}
