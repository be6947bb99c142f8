use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest modulus accepted for prime-field coefficients.
pub const MAX_PRIME: u32 = 13;

/// Arithmetic in F_p for a small prime p. Elements are canonical
/// representatives in `0..p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self> {
        if !is_prime(p) || p > MAX_PRIME {
            return Err(Error::Parse(format!(
                "modulus {p} is not a prime <= {MAX_PRIME}"
            )));
        }
        Ok(PrimeField { p })
    }

    #[inline]
    pub fn modulus(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn reduce_i64(&self, a: i64) -> u32 {
        a.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        a * b % self.p
    }

    pub fn inv(&self, a: u32) -> Result<u32> {
        if a % self.p == 0 {
            return Err(Error::DivisionByZero { modulus: self.p });
        }
        // Fermat; p <= 13 so the loop is tiny.
        let mut acc = 1u32;
        for _ in 0..self.p - 2 {
            acc = self.mul(acc, a);
        }
        Ok(acc)
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        let mut acc = 1u32;
        for _ in 0..e {
            acc = self.mul(acc, a);
        }
        acc
    }

    /// A fixed generator of the unit group.
    pub fn unit_generator(&self) -> u32 {
        'cand: for g in 2..self.p {
            let mut x = g;
            for _ in 0..self.p - 2 {
                if x == 1 {
                    continue 'cand;
                }
                x = self.mul(x, g);
            }
            return g;
        }
        1 // p = 2
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.p
    }
}

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..p).all(|d| p % d != 0)
}

/// The coefficient ring of a homology computation: exact rationals or a
/// prime field with small modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Coeff {
    Rational,
    Prime(u32),
}

impl Coeff {
    pub fn prime(p: u32) -> Result<Self> {
        PrimeField::new(p)?;
        Ok(Coeff::Prime(p))
    }

    pub fn characteristic(&self) -> u32 {
        match self {
            Coeff::Rational => 0,
            Coeff::Prime(p) => *p,
        }
    }

    /// Short name used in cache keys, CSV rows and reports (`rat`, `p2`, ...).
    pub fn tag(&self) -> String {
        match self {
            Coeff::Rational => "rat".to_string(),
            Coeff::Prime(p) => format!("p{p}"),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        if s == "rat" || s == "q" || s == "0" {
            return Ok(Coeff::Rational);
        }
        let body = s.strip_prefix('p').unwrap_or(s);
        let p: u32 = body
            .parse()
            .map_err(|_| Error::Parse(format!("bad coefficient field `{s}`")))?;
        Coeff::prime(p)
    }
}

impl std::fmt::Display for Coeff {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Coeff::Rational => write!(f, "Q"),
            Coeff::Prime(p) => write!(f, "F{p}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_in_f3() {
        let f = PrimeField::new(3).unwrap();
        assert_eq!(f.inv(2).unwrap(), 2); // 2*2 = 4 = 1 mod 3
        assert!(f.inv(0).is_err());
    }

    #[test]
    fn addition_in_f5() {
        let f = PrimeField::new(5).unwrap();
        assert_eq!(f.add(3, 4), 2);
    }

    #[test]
    fn rejects_non_primes() {
        assert!(PrimeField::new(4).is_err());
        assert!(PrimeField::new(1).is_err());
        assert!(PrimeField::new(17).is_err()); // above the supported range
        assert!(PrimeField::new(13).is_ok());
    }

    #[test]
    fn unit_generators() {
        for p in [2u32, 3, 5, 7, 11, 13] {
            let f = PrimeField::new(p).unwrap();
            let g = f.unit_generator();
            let mut seen = std::collections::HashSet::new();
            let mut x = 1u32;
            for _ in 0..p - 1 {
                seen.insert(x);
                x = f.mul(x, g);
            }
            assert_eq!(seen.len() as u32, p - 1);
        }
    }

    #[test]
    fn coeff_tags_roundtrip() {
        for c in [Coeff::Rational, Coeff::Prime(2), Coeff::Prime(13)] {
            assert_eq!(Coeff::parse(&c.tag()).unwrap(), c);
        }
        assert!(Coeff::parse("p4").is_err());
    }
}
