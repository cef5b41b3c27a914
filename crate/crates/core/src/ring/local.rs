//! The ring Z/p^m.

use super::{FiniteRing, Ring};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Canonical residue in `[0, p^m)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Residue(pub(crate) u64);

impl Residue {
    pub fn value(self) -> u64 {
        self.0
    }
}

/// Z/p^m with eagerly reduced residues.
///
/// Products are formed in `u128`, so the modulus is limited to 32 bits.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct LocalRing {
    p: u64,
    m: u32,
    modulus: u64,
}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl LocalRing {
    pub fn new(p: u64, m: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidModulus(format!("{p} is not prime")));
        }
        if m == 0 {
            return Err(Error::InvalidModulus("precision m must be at least 1".into()));
        }
        let mut modulus: u64 = 1;
        for _ in 0..m {
            modulus = modulus
                .checked_mul(p)
                .filter(|&q| q <= u32::MAX as u64)
                .ok_or_else(|| Error::InvalidModulus(format!("{p}^{m} exceeds 32 bits")))?;
        }
        Ok(LocalRing { p, m, modulus })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// `Q = p^m`.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn elem(&self, v: u64) -> Residue {
        Residue(v % self.modulus)
    }

    pub fn elem_i64(&self, v: i64) -> Residue {
        Residue(v.rem_euclid(self.modulus as i64) as u64)
    }

    /// Signed representative in `(-Q/2, Q/2]`.
    pub fn signed(&self, a: Residue) -> i64 {
        let v = a.0 as i64;
        if 2 * a.0 > self.modulus {
            v - self.modulus as i64
        } else {
            v
        }
    }

    pub fn unit_inverse(&self, x: Residue) -> Result<Residue> {
        if x.0 % self.p == 0 {
            return Err(Error::NonUnit);
        }
        let (mut r0, mut r1) = (self.modulus as i128, x.0 as i128);
        let (mut s0, mut s1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        debug_assert_eq!(r0, 1);
        Ok(Residue(s0.rem_euclid(self.modulus as i128) as u64))
    }

    /// Largest `k <= m` with `p^k | x`; `m` for zero.
    pub fn valuation(&self, x: Residue) -> u32 {
        if x.0 == 0 {
            return self.m;
        }
        let mut v = x.0;
        let mut k = 0;
        while v % self.p == 0 {
            v /= self.p;
            k += 1;
        }
        k
    }

    /// The image in Z/p^k for `k <= m`.
    pub fn reduce_to(&self, x: Residue, k: u32) -> Residue {
        Residue(x.0 % self.p.pow(k))
    }

    /// `p^k` as an element (zero once `k >= m`).
    pub fn p_power(&self, k: u32) -> Residue {
        if k >= self.m {
            Residue(0)
        } else {
            Residue(self.p.pow(k))
        }
    }
}

impl Ring for LocalRing {
    type Elem = Residue;

    fn zero(&self) -> Residue {
        Residue(0)
    }

    fn one(&self) -> Residue {
        Residue(1 % self.modulus)
    }

    fn add(&self, a: Residue, b: Residue) -> Residue {
        let s = a.0 + b.0;
        Residue(if s >= self.modulus { s - self.modulus } else { s })
    }

    fn neg(&self, a: Residue) -> Residue {
        Residue(if a.0 == 0 { 0 } else { self.modulus - a.0 })
    }

    fn sub(&self, a: Residue, b: Residue) -> Residue {
        Residue(if a.0 >= b.0 { a.0 - b.0 } else { a.0 + self.modulus - b.0 })
    }

    fn mul(&self, a: Residue, b: Residue) -> Residue {
        Residue(((a.0 as u128 * b.0 as u128) % self.modulus as u128) as u64)
    }

    fn from_i64(&self, v: i64) -> Residue {
        self.elem_i64(v)
    }

    fn is_unit(&self, a: Residue) -> bool {
        a.0 % self.p != 0
    }

    fn inverse(&self, a: Residue) -> Option<Residue> {
        self.unit_inverse(a).ok()
    }

    fn residue_characteristic(&self) -> u64 {
        self.p
    }
}

impl FiniteRing for LocalRing {
    fn cardinality(&self) -> u64 {
        self.modulus
    }

    fn element(&self, index: u64) -> Residue {
        Residue(index)
    }

    fn index_of(&self, a: Residue) -> u64 {
        a.0
    }
}
