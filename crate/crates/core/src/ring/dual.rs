//! First- and second-order dual numbers over a base ring:
//! `R[ε]/(ε²)` and `R[ε₁,ε₂]/(ε₁², ε₂²)`.

use super::{Extension, FiniteRing, Ring};

/// `re + eps·ε`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Dual<E> {
    pub re: E,
    pub eps: E,
}

/// `a0 + a1·ε₁ + a2·ε₂ + a12·ε₁ε₂`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct BiDual<E> {
    pub a0: E,
    pub a1: E,
    pub a2: E,
    pub a12: E,
}

#[derive(Clone, Debug)]
pub struct DualRing<R> {
    base: R,
}

#[derive(Clone, Debug)]
pub struct BiDualRing<R> {
    base: R,
}

impl<R: Ring> DualRing<R> {
    pub fn new(base: R) -> Self {
        DualRing { base }
    }

    pub fn eps(&self) -> Dual<R::Elem> {
        Dual { re: self.base.zero(), eps: self.base.one() }
    }

    pub fn make(&self, re: R::Elem, eps: R::Elem) -> Dual<R::Elem> {
        Dual { re, eps }
    }
}

impl<R: Ring> BiDualRing<R> {
    pub fn new(base: R) -> Self {
        BiDualRing { base }
    }

    pub fn make(&self, a0: R::Elem, a1: R::Elem, a2: R::Elem, a12: R::Elem) -> BiDual<R::Elem> {
        BiDual { a0, a1, a2, a12 }
    }

    pub fn eps1(&self) -> BiDual<R::Elem> {
        let (z, o) = (self.base.zero(), self.base.one());
        self.make(z, o, z, z)
    }

    pub fn eps2(&self) -> BiDual<R::Elem> {
        let (z, o) = (self.base.zero(), self.base.one());
        self.make(z, z, o, z)
    }
}

impl<R: Ring> Ring for DualRing<R> {
    type Elem = Dual<R::Elem>;

    fn zero(&self) -> Self::Elem {
        self.lift(self.base.zero())
    }

    fn one(&self) -> Self::Elem {
        self.lift(self.base.one())
    }

    fn add(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem {
        let r = &self.base;
        Dual { re: r.add(a.re, b.re), eps: r.add(a.eps, b.eps) }
    }

    fn neg(&self, a: Self::Elem) -> Self::Elem {
        let r = &self.base;
        Dual { re: r.neg(a.re), eps: r.neg(a.eps) }
    }

    fn mul(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem {
        let r = &self.base;
        Dual {
            re: r.mul(a.re, b.re),
            eps: r.add(r.mul(a.re, b.eps), r.mul(a.eps, b.re)),
        }
    }

    fn from_i64(&self, v: i64) -> Self::Elem {
        self.lift(self.base.from_i64(v))
    }

    fn is_unit(&self, a: Self::Elem) -> bool {
        self.base.is_unit(a.re)
    }

    fn inverse(&self, a: Self::Elem) -> Option<Self::Elem> {
        let r = &self.base;
        let i = r.inverse(a.re)?;
        Some(Dual { re: i, eps: r.neg(r.mul(r.mul(i, i), a.eps)) })
    }

    fn residue_characteristic(&self) -> u64 {
        self.base.residue_characteristic()
    }
}

impl<R: Ring> Extension<R> for DualRing<R> {
    fn base(&self) -> &R {
        &self.base
    }

    fn lift(&self, x: R::Elem) -> Self::Elem {
        Dual { re: x, eps: self.base.zero() }
    }

    fn truncate(&self, x: Self::Elem) -> R::Elem {
        x.re
    }
}

impl<R: FiniteRing> FiniteRing for DualRing<R> {
    fn cardinality(&self) -> u64 {
        self.base.cardinality().pow(2)
    }

    fn element(&self, index: u64) -> Self::Elem {
        let c = self.base.cardinality();
        Dual { re: self.base.element(index % c), eps: self.base.element(index / c) }
    }

    fn index_of(&self, a: Self::Elem) -> u64 {
        self.base.index_of(a.re) + self.base.cardinality() * self.base.index_of(a.eps)
    }
}

impl<R: Ring> Ring for BiDualRing<R> {
    type Elem = BiDual<R::Elem>;

    fn zero(&self) -> Self::Elem {
        self.lift(self.base.zero())
    }

    fn one(&self) -> Self::Elem {
        self.lift(self.base.one())
    }

    fn add(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem {
        let r = &self.base;
        BiDual {
            a0: r.add(a.a0, b.a0),
            a1: r.add(a.a1, b.a1),
            a2: r.add(a.a2, b.a2),
            a12: r.add(a.a12, b.a12),
        }
    }

    fn neg(&self, a: Self::Elem) -> Self::Elem {
        let r = &self.base;
        BiDual { a0: r.neg(a.a0), a1: r.neg(a.a1), a2: r.neg(a.a2), a12: r.neg(a.a12) }
    }

    fn mul(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem {
        let r = &self.base;
        let cross = r.add(r.mul(a.a1, b.a2), r.mul(a.a2, b.a1));
        BiDual {
            a0: r.mul(a.a0, b.a0),
            a1: r.add(r.mul(a.a0, b.a1), r.mul(a.a1, b.a0)),
            a2: r.add(r.mul(a.a0, b.a2), r.mul(a.a2, b.a0)),
            a12: r.add(r.add(r.mul(a.a0, b.a12), r.mul(a.a12, b.a0)), cross),
        }
    }

    fn from_i64(&self, v: i64) -> Self::Elem {
        self.lift(self.base.from_i64(v))
    }

    fn is_unit(&self, a: Self::Elem) -> bool {
        self.base.is_unit(a.a0)
    }

    fn inverse(&self, a: Self::Elem) -> Option<Self::Elem> {
        let r = &self.base;
        let i = r.inverse(a.a0)?;
        let i2 = r.mul(i, i);
        let i3 = r.mul(i2, i);
        let two_a1a2 = r.mul(r.from_i64(2), r.mul(a.a1, a.a2));
        Some(BiDual {
            a0: i,
            a1: r.neg(r.mul(i2, a.a1)),
            a2: r.neg(r.mul(i2, a.a2)),
            a12: r.sub(r.mul(i3, two_a1a2), r.mul(i2, a.a12)),
        })
    }

    fn residue_characteristic(&self) -> u64 {
        self.base.residue_characteristic()
    }
}

impl<R: Ring> Extension<R> for BiDualRing<R> {
    fn base(&self) -> &R {
        &self.base
    }

    fn lift(&self, x: R::Elem) -> Self::Elem {
        let z = self.base.zero();
        BiDual { a0: x, a1: z, a2: z, a12: z }
    }

    fn truncate(&self, x: Self::Elem) -> R::Elem {
        x.a0
    }
}

impl<R: FiniteRing> FiniteRing for BiDualRing<R> {
    fn cardinality(&self) -> u64 {
        self.base.cardinality().pow(4)
    }

    fn element(&self, index: u64) -> Self::Elem {
        let c = self.base.cardinality();
        let e = |k: u32| self.base.element((index / c.pow(k)) % c);
        BiDual { a0: e(0), a1: e(1), a2: e(2), a12: e(3) }
    }

    fn index_of(&self, a: Self::Elem) -> u64 {
        let c = self.base.cardinality();
        [a.a0, a.a1, a.a2, a.a12]
            .iter()
            .rev()
            .fold(0, |acc, &x| acc * c + self.base.index_of(x))
    }
}
