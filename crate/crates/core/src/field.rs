//! Prime-field arithmetic with moduli below `2^61`.

use crate::error::{Error, Result};

/// Exclusive upper bound on supported moduli.
pub const MAX_MODULUS: u64 = 1 << 61;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    q: u64,
}

impl PrimeField {
    pub fn new(q: u64) -> Result<Self> {
        if !(2..MAX_MODULUS).contains(&q) {
            return Err(Error::OutOfRange(format!("field size {q} outside [2, 2^61)")));
        }
        if !is_prime(q) {
            return Err(Error::InvalidParams(format!("field size {q} is not prime")));
        }
        Ok(PrimeField { q })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.q
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        mul_mod(a, b, self.q)
    }

    pub fn pow(&self, a: u64, e: u64) -> u64 {
        pow_mod(a, e, self.q)
    }

    /// Multiplicative inverse; `a` must be nonzero.
    pub fn inv(&self, a: u64) -> u64 {
        debug_assert!(a % self.q != 0);
        self.pow(a, self.q - 2)
    }
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin; the first twelve prime bases are exact for all
/// 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for p in BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in BASES {
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

/// The least prime `q ≥ b`.
pub fn smallest_prime_at_least(b: u64) -> Result<PrimeField> {
    if !(2..MAX_MODULUS).contains(&b) {
        return Err(Error::OutOfRange(format!("lower bound {b} outside [2, 2^61)")));
    }
    (b..MAX_MODULUS)
        .find(|&q| is_prime(q))
        .map(|q| PrimeField { q })
        .ok_or_else(|| Error::OutOfRange(format!("no prime in [{b}, 2^61)")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sieve(limit: usize) -> Vec<bool> {
        let mut p = vec![true; limit];
        p[0] = false;
        p[1] = false;
        for i in 2..limit {
            if p[i] {
                for j in (i * i..limit).step_by(i) {
                    p[j] = false;
                }
            }
        }
        p
    }

    #[test]
    fn primality_matches_sieve() {
        let s = sieve(20_000);
        for (n, &p) in s.iter().enumerate() {
            assert_eq!(is_prime(n as u64), p, "n = {n}");
        }
    }

    #[test]
    fn known_large_values() {
        assert!(is_prime((1 << 61) - 1));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2, 3, 5, 7
        assert!(is_prime(1_073_741_827));
    }

    #[test]
    fn smallest_primes() {
        assert_eq!(smallest_prime_at_least(2).unwrap().modulus(), 2);
        assert_eq!(smallest_prime_at_least(100).unwrap().modulus(), 101);
        assert_eq!(smallest_prime_at_least(1 << 16).unwrap().modulus(), 65537);
        assert!(smallest_prime_at_least(1).is_err());
        assert!(smallest_prime_at_least(MAX_MODULUS).is_err());
    }

    #[test]
    fn arithmetic() {
        let f = PrimeField::new(7).unwrap();
        assert_eq!(f.add(5, 4), 2);
        assert_eq!(f.sub(2, 5), 4);
        assert_eq!(f.mul(3, 5), 1);
        assert_eq!(f.inv(3), 5);
        assert_eq!(f.neg(0), 0);
        let big = PrimeField::new((1 << 61) - 1).unwrap();
        let a = (1 << 60) + 12345;
        assert_eq!(big.mul(a, big.inv(a)), 1);
        assert!(PrimeField::new(9).is_err());
        assert!(PrimeField::new(1 << 61).is_err());
    }
}
