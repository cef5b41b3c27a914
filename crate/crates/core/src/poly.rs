//! Monic univariate polynomials.

use crate::matrix::{MatOps, Matrix};
use crate::ring::{FiniteRing, Ring};

/// `X^d + c_{d-1} X^{d-1} + … + c_0`, stored as `[c_0, …, c_{d-1}]`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MonicPoly<E> {
    coeffs: Vec<E>,
}

impl<E: Copy> MonicPoly<E> {
    pub fn new(coeffs: Vec<E>) -> Self {
        MonicPoly { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// Non-leading coefficients, constant term first.
    pub fn coeffs(&self) -> &[E] {
        &self.coeffs
    }

    pub fn map<F: Copy>(&self, f: impl Fn(E) -> F) -> MonicPoly<F> {
        MonicPoly { coeffs: self.coeffs.iter().map(|&c| f(c)).collect() }
    }
}

pub trait PolyOps: Ring {
    fn poly_one(&self) -> MonicPoly<Self::Elem> {
        MonicPoly::new(vec![])
    }

    /// `X - r`.
    fn linear(&self, r: Self::Elem) -> MonicPoly<Self::Elem> {
        MonicPoly::new(vec![self.neg(r)])
    }

    /// All coefficients including the leading 1, constant term first.
    fn full_coeffs(&self, p: &MonicPoly<Self::Elem>) -> Vec<Self::Elem> {
        let mut v = p.coeffs().to_vec();
        v.push(self.one());
        v
    }

    fn poly_mul(&self, p: &MonicPoly<Self::Elem>, q: &MonicPoly<Self::Elem>) -> MonicPoly<Self::Elem> {
        let (a, b) = (self.full_coeffs(p), self.full_coeffs(q));
        let mut out = vec![self.zero(); a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = self.mul_add(out[i + j], x, y);
            }
        }
        out.pop();
        MonicPoly::new(out)
    }

    fn poly_product(&self, ps: &[MonicPoly<Self::Elem>]) -> MonicPoly<Self::Elem> {
        ps.iter().fold(self.poly_one(), |acc, p| self.poly_mul(&acc, p))
    }

    fn from_roots(&self, roots: &[Self::Elem]) -> MonicPoly<Self::Elem> {
        let ls: Vec<_> = roots.iter().map(|&r| self.linear(r)).collect();
        self.poly_product(&ls)
    }

    fn poly_eval(&self, p: &MonicPoly<Self::Elem>, x: Self::Elem) -> Self::Elem {
        p.coeffs().iter().rev().fold(self.one(), |acc, &c| self.add(self.mul(acc, x), c))
    }

    /// Companion matrix: ones on the subdiagonal, last column `-c_0, …, -c_{d-1}`.
    fn companion(&self, p: &MonicPoly<Self::Elem>) -> Matrix<Self::Elem> {
        let d = p.degree();
        Matrix::from_fn(d, |i, j| {
            if j == d - 1 {
                self.neg(p.coeffs()[i])
            } else if i == j + 1 {
                self.one()
            } else {
                self.zero()
            }
        })
    }

    /// Resultant via the Sylvester determinant.
    fn resultant(&self, p: &MonicPoly<Self::Elem>, q: &MonicPoly<Self::Elem>) -> Self::Elem {
        let (d, e) = (p.degree(), q.degree());
        if d == 0 || e == 0 {
            return self.one();
        }
        let (a, b) = (self.full_coeffs(p), self.full_coeffs(q));
        let n = d + e;
        let s = Matrix::from_fn(n, |i, j| {
            // rows 0..e hold shifts of p, rows e..n shifts of q (highest degree first)
            let (coeffs, deg, shift) = if i < e { (&a, d, i) } else { (&b, e, i - e) };
            if j >= shift && j - shift <= deg {
                coeffs[deg - (j - shift)]
            } else {
                self.zero()
            }
        });
        self.det(&s)
    }

    /// Whether `(P, Q)` is the unit ideal of `R[X]`.
    ///
    /// For monic P, Q over a local ring this holds iff the reductions to the
    /// residue field are coprime, iff the resultant is a unit.
    fn monic_coprime(&self, p: &MonicPoly<Self::Elem>, q: &MonicPoly<Self::Elem>) -> bool {
        self.is_unit(self.resultant(p, q))
    }
}

impl<R: Ring> PolyOps for R {}

pub trait PolyEnum: FiniteRing + PolyOps {
    fn monic_count(&self, d: usize) -> u64 {
        self.cardinality().pow(d as u32)
    }

    fn monic_from_index(&self, d: usize, mut index: u64) -> MonicPoly<Self::Elem> {
        let c = self.cardinality();
        MonicPoly::new(
            (0..d)
                .map(|_| {
                    let e = self.element(index % c);
                    index /= c;
                    e
                })
                .collect(),
        )
    }

    fn monics(&self, d: usize) -> Vec<MonicPoly<Self::Elem>> {
        (0..self.monic_count(d)).map(|i| self.monic_from_index(d, i)).collect()
    }

    fn random_monic<G: rand::Rng + ?Sized>(&self, d: usize, rng: &mut G) -> MonicPoly<Self::Elem> {
        MonicPoly::new((0..d).map(|_| self.random_element(rng)).collect())
    }

    fn poly_codes(&self, p: &MonicPoly<Self::Elem>) -> Vec<u64> {
        p.coeffs().iter().map(|&c| self.index_of(c)).collect()
    }
}

impl<R: FiniteRing> PolyEnum for R {}
