//! Commutative rings in context style: a ring value carries the parameters,
//! elements are small `Copy` values, and all arithmetic goes through the ring.

mod binary;
mod dual;
mod gf;
mod local;

pub use binary::BinaryField;
pub use dual::{BiDual, BiDualRing, Dual, DualRing};
pub use gf::GaloisField;
pub use local::{LocalRing, Residue};

use std::fmt::Debug;
use std::hash::Hash;

/// A finite commutative local ring.
///
/// Every implementor is local, which is what makes unit tests on a single
/// element meaningful (a sum of a unit and a non-unit is a unit, etc.).
pub trait Ring: Clone + Debug + Send + Sync {
    type Elem: Copy + Eq + Hash + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn neg(&self, a: Self::Elem) -> Self::Elem;
    fn mul(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn is_unit(&self, a: Self::Elem) -> bool;
    /// Inverse of a unit, `None` otherwise.
    fn inverse(&self, a: Self::Elem) -> Option<Self::Elem>;
    /// Characteristic of the residue field.
    fn residue_characteristic(&self) -> u64;

    fn sub(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem {
        self.add(a, self.neg(b))
    }

    fn is_zero(&self, a: Self::Elem) -> bool {
        a == self.zero()
    }

    fn is_one(&self, a: Self::Elem) -> bool {
        a == self.one()
    }

    fn pow(&self, a: Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `a + b*c`.
    fn mul_add(&self, a: Self::Elem, b: Self::Elem, c: Self::Elem) -> Self::Elem {
        self.add(a, self.mul(b, c))
    }
}

/// A ring whose elements can be listed and coded by integers in `0..cardinality`.
pub trait FiniteRing: Ring {
    fn cardinality(&self) -> u64;
    fn element(&self, index: u64) -> Self::Elem;
    fn index_of(&self, a: Self::Elem) -> u64;

    fn elements(&self) -> Vec<Self::Elem> {
        (0..self.cardinality()).map(|i| self.element(i)).collect()
    }

    fn random_element<G: rand::Rng + ?Sized>(&self, rng: &mut G) -> Self::Elem {
        self.element(rng.gen_range(0..self.cardinality()))
    }

    fn random_unit<G: rand::Rng + ?Sized>(&self, rng: &mut G) -> Self::Elem {
        loop {
            let x = self.random_element(rng);
            if self.is_unit(x) {
                return x;
            }
        }
    }
}

/// Rings with a lift from a base ring (the `ε ↦ 0` section) and the matching truncation.
pub trait Extension<B: Ring>: Ring {
    fn base(&self) -> &B;
    fn lift(&self, x: B::Elem) -> Self::Elem;
    fn truncate(&self, x: Self::Elem) -> B::Elem;
}
