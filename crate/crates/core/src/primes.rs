//! Deterministic primality testing and prime search.

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::Int;

/// An integer verified prime at construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Prime(Int);

impl Prime {
    pub fn new(p: Int) -> Result<Self> {
        if is_prime(&p) {
            Ok(Prime(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn value(&self) -> &Int {
        &self.0
    }
}

impl std::fmt::Display for Prime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

const SMALL_PRIMES: [u32; 40] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
    101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173,
];

/// Below this bound the first 13 prime bases make Miller–Rabin exact.
fn deterministic_limit() -> Int {
    "3317044064679887385961981".parse().expect("literal")
}

fn strong_probable_prime(n: &Int, d: &Int, s: u32, a: &Int) -> bool {
    let n1 = n - 1u32;
    let mut x = a.modpow(d, n);
    if x.is_one() || x == n1 {
        return true;
    }
    for _ in 1..s {
        x = &x * &x % n;
        if x == n1 {
            return true;
        }
    }
    false
}

/// Miller–Rabin with fixed prime bases: exact below ~3.3·10²⁴, forty bases above.
pub fn is_prime(n: &Int) -> bool {
    if n < &Int::from(2) {
        return false;
    }
    for &p in &SMALL_PRIMES {
        let p = Int::from(p);
        if n == &p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let mut d: Int = n - 1u32;
    let mut s = 0;
    while d.is_even() {
        d >>= 1;
        s += 1;
    }
    let bases = if n < &deterministic_limit() { 13 } else { SMALL_PRIMES.len() };
    SMALL_PRIMES[..bases]
        .iter()
        .all(|&a| strong_probable_prime(n, &d, s, &Int::from(a)))
}

/// Smallest prime strictly greater than `x`.
pub fn next_prime_above(x: &Int) -> Prime {
    Prime(next_prime_int(x))
}

fn next_prime_int(x: &Int) -> Int {
    let mut c: Int = x + 1u32;
    if c <= Int::from(2) {
        return Int::from(2);
    }
    if c.is_even() {
        c += 1u32;
    }
    while !is_prime(&c) {
        c += 2u32;
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn trial_division(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
    }

    #[test]
    fn agrees_with_trial_division() {
        for n in 0..5000u64 {
            assert_eq!(is_prime(&Int::from(n)), trial_division(n), "n = {n}");
        }
    }

    #[test]
    fn strong_pseudoprimes_are_rejected() {
        // strong pseudoprimes to several small bases
        for n in ["3215031751", "3825123056546413051", "318665857834031151167461"] {
            assert!(!is_prime(&n.parse().unwrap()), "{n}");
        }
        let mersenne_61 = (Int::one() << 61) - 1u32;
        let mersenne_89 = (Int::one() << 89) - 1u32;
        assert!(is_prime(&mersenne_61));
        assert!(is_prime(&mersenne_89));
        assert!(!is_prime(&(&mersenne_61 * &mersenne_89)));
    }

    #[test]
    fn next_prime() {
        assert_eq!(next_prime_above(&int(8)).value(), &int(11));
        assert_eq!(next_prime_above(&int(0)).value(), &int(2));
        assert_eq!(next_prime_above(&int(2)).value(), &int(3));
        assert_eq!(next_prime_above(&int(348)).value(), &int(349));
        assert_eq!(next_prime_above(&int(1 << 20)).value(), &int(1048583));
        assert!(Prime::new(int(349)).is_ok());
        assert_eq!(Prime::new(int(351)), Err(Error::NotPrime(int(351))));
    }
}
