//! Finite fields F_p and F_{p^2}.
//!
//! F_{p^2} is F_p[X]/(f) with a fixed modulus:
//! `f = X^2 + X + 1` for p = 2 and `f = X^2 - r` for odd p, where r is the
//! smallest quadratic non-residue mod p.
//! An element `c0 + c1 X` is coded as the integer `c0 + p*c1`.

use super::local::is_prime;
use super::{FiniteRing, Ring};
use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct GaloisField {
    p: u64,
    k: u32,
    /// `f = X^2 + f1 X + f0`, unused when k = 1.
    f0: u64,
    f1: u64,
}

fn smallest_non_residue(p: u64) -> u64 {
    (2..p)
        .find(|&r| (1..p).all(|x| (x * x) % p != r))
        .expect("odd primes have non-residues")
}

impl GaloisField {
    pub fn new(p: u64, k: u32) -> Result<Self> {
        if !is_prime(p) || p > 1 << 20 {
            return Err(Error::InvalidModulus(format!("{p} is not a small prime")));
        }
        match k {
            1 => Ok(GaloisField { p, k, f0: 0, f1: 0 }),
            2 if p == 2 => Ok(GaloisField { p, k, f0: 1, f1: 1 }),
            2 => {
                let r = smallest_non_residue(p);
                Ok(GaloisField { p, k, f0: p - r, f1: 0 })
            }
            _ => Err(Error::InvalidModulus(format!("degree {k} not supported"))),
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    /// Coefficients `(f0, f1)` of the modulus `X^2 + f1 X + f0`.
    pub fn modulus_poly(&self) -> (u64, u64) {
        (self.f0, self.f1)
    }

    fn split(&self, a: u64) -> (u64, u64) {
        (a % self.p, a / self.p)
    }

    fn join(&self, c0: u64, c1: u64) -> u64 {
        c0 + self.p * c1
    }

    /// The generator `X` (only meaningful for k = 2).
    pub fn generator(&self) -> u64 {
        self.join(0, 1)
    }

    /// Embeds an element of the prime field.
    pub fn from_prime_field(&self, c: u64) -> u64 {
        c % self.p
    }
}

impl Ring for GaloisField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1
    }

    fn add(&self, a: u64, b: u64) -> u64 {
        let (a0, a1) = self.split(a);
        let (b0, b1) = self.split(b);
        self.join((a0 + b0) % self.p, (a1 + b1) % self.p)
    }

    fn neg(&self, a: u64) -> u64 {
        let (a0, a1) = self.split(a);
        self.join((self.p - a0) % self.p, (self.p - a1) % self.p)
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        let p = self.p;
        let (a0, a1) = self.split(a);
        let (b0, b1) = self.split(b);
        let c0 = a0 * b0 % p;
        let c1 = (a0 * b1 + a1 * b0) % p;
        let c2 = a1 * b1 % p;
        // X^2 = -f1 X - f0
        let r0 = (c0 + c2 * (p - self.f0)) % p;
        let r1 = (c1 + c2 * ((p - self.f1) % p)) % p;
        self.join(r0, r1)
    }

    fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }

    fn is_unit(&self, a: u64) -> bool {
        a != 0
    }

    fn inverse(&self, a: u64) -> Option<u64> {
        if a == 0 {
            None
        } else {
            Some(self.pow(a, self.cardinality() - 2))
        }
    }

    fn residue_characteristic(&self) -> u64 {
        self.p
    }
}

impl FiniteRing for GaloisField {
    fn cardinality(&self) -> u64 {
        self.p.pow(self.k)
    }

    fn element(&self, index: u64) -> u64 {
        index
    }

    fn index_of(&self, a: u64) -> u64 {
        a
    }
}
