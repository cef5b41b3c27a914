//! Binary fields F_{2^k} for k ≤ 8, as F_2[X]/(f) with bit-packed elements.
//!
//! Moduli: `X^2+X+1`, `X^3+X+1`, `X^4+X+1`, `X^5+X^2+1`, `X^6+X+1`,
//! `X^7+X+1`, `X^8+X^4+X^3+X+1`. Bit i of an element is the coefficient of `X^i`.

use super::{FiniteRing, Ring};
use crate::error::{Error, Result};

const MODULI: [u16; 9] = [0, 0b11, 0b111, 0b1011, 0b10011, 0b100101, 0b1000011, 0b10000011, 0b100011011];

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct BinaryField {
    k: u32,
    modulus: u16,
}

impl BinaryField {
    pub fn new(k: u32) -> Result<Self> {
        if !(1..=8).contains(&k) {
            return Err(Error::InvalidModulus(format!("F_2^{k} not supported")));
        }
        Ok(BinaryField { k, modulus: MODULI[k as usize] })
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn modulus_poly(&self) -> u16 {
        self.modulus
    }
}

impl Ring for BinaryField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1
    }

    fn add(&self, a: u64, b: u64) -> u64 {
        a ^ b
    }

    fn neg(&self, a: u64) -> u64 {
        a
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        let mut prod = 0u64;
        for i in 0..self.k {
            if b >> i & 1 == 1 {
                prod ^= a << i;
            }
        }
        for i in (self.k..2 * self.k).rev() {
            if prod >> i & 1 == 1 {
                prod ^= (self.modulus as u64) << (i - self.k);
            }
        }
        prod
    }

    fn from_i64(&self, v: i64) -> u64 {
        (v & 1) as u64
    }

    fn is_unit(&self, a: u64) -> bool {
        a != 0
    }

    fn inverse(&self, a: u64) -> Option<u64> {
        (a != 0).then(|| self.pow(a, self.cardinality() - 2))
    }

    fn residue_characteristic(&self) -> u64 {
        2
    }
}

impl FiniteRing for BinaryField {
    fn cardinality(&self) -> u64 {
        1 << self.k
    }

    fn element(&self, index: u64) -> u64 {
        index
    }

    fn index_of(&self, a: u64) -> u64 {
        a
    }
}
