//! Dense square matrices over a [`Ring`], with division-free determinants.

use crate::error::{Error, Result};
use crate::poly::MonicPoly;
use crate::ring::{Extension, FiniteRing, Ring};

/// Largest dimension accepted by the checked entry points.
pub const MAX_DIM: usize = 8;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Matrix<E> {
    n: usize,
    data: Vec<E>,
}

impl<E: Copy> Matrix<E> {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Matrix { n, data }
    }

    pub fn from_rows(rows: &[Vec<E>]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix rows must be square");
        Matrix { n, data: rows.concat() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> E {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: E) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<E> {
        self.data[i * self.n..(i + 1) * self.n].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<E> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    pub fn rows(&self) -> Vec<Vec<E>> {
        (0..self.n).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.n, |i, j| self.get(j, i))
    }

    pub fn map<F: Copy>(&self, f: impl Fn(E) -> F) -> Matrix<F> {
        Matrix { n: self.n, data: self.data.iter().map(|&x| f(x)).collect() }
    }

    pub fn entries(&self) -> &[E] {
        &self.data
    }
}

/// Matrix and vector arithmetic available on every ring.
pub trait MatOps: Ring {
    fn identity(&self, n: usize) -> Matrix<Self::Elem> {
        self.scalar_matrix(n, self.one())
    }

    fn zero_matrix(&self, n: usize) -> Matrix<Self::Elem> {
        Matrix::from_fn(n, |_, _| self.zero())
    }

    fn scalar_matrix(&self, n: usize, c: Self::Elem) -> Matrix<Self::Elem> {
        Matrix::from_fn(n, |i, j| if i == j { c } else { self.zero() })
    }

    fn diagonal(&self, d: &[Self::Elem]) -> Matrix<Self::Elem> {
        Matrix::from_fn(d.len(), |i, j| if i == j { d[i] } else { self.zero() })
    }

    fn matrix_from_i64(&self, rows: &[&[i64]]) -> Matrix<Self::Elem> {
        Matrix::from_fn(rows.len(), |i, j| self.from_i64(rows[i][j]))
    }

    fn mat_add(&self, a: &Matrix<Self::Elem>, b: &Matrix<Self::Elem>) -> Matrix<Self::Elem> {
        Matrix::from_fn(a.n, |i, j| self.add(a.get(i, j), b.get(i, j)))
    }

    fn mat_sub(&self, a: &Matrix<Self::Elem>, b: &Matrix<Self::Elem>) -> Matrix<Self::Elem> {
        Matrix::from_fn(a.n, |i, j| self.sub(a.get(i, j), b.get(i, j)))
    }

    fn mat_scale(&self, c: Self::Elem, a: &Matrix<Self::Elem>) -> Matrix<Self::Elem> {
        a.map(|x| self.mul(c, x))
    }

    fn mat_mul(&self, a: &Matrix<Self::Elem>, b: &Matrix<Self::Elem>) -> Matrix<Self::Elem> {
        let n = a.n;
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut s = self.zero();
                for k in 0..n {
                    s = self.mul_add(s, a.data[i * n + k], b.data[k * n + j]);
                }
                out.push(s);
            }
        }
        Matrix { n, data: out }
    }

    fn mat_pow(&self, a: &Matrix<Self::Elem>, e: usize) -> Matrix<Self::Elem> {
        (0..e).fold(self.identity(a.n), |acc, _| self.mat_mul(&acc, a))
    }

    fn mat_vec(&self, a: &Matrix<Self::Elem>, v: &[Self::Elem]) -> Vec<Self::Elem> {
        (0..a.n).map(|i| self.dot(&a.data[i * a.n..(i + 1) * a.n], v)).collect()
    }

    fn vec_mat(&self, v: &[Self::Elem], a: &Matrix<Self::Elem>) -> Vec<Self::Elem> {
        (0..a.n)
            .map(|j| {
                let mut s = self.zero();
                for (i, &x) in v.iter().enumerate() {
                    s = self.mul_add(s, x, a.get(i, j));
                }
                s
            })
            .collect()
    }

    fn dot(&self, u: &[Self::Elem], v: &[Self::Elem]) -> Self::Elem {
        u.iter().zip(v).fold(self.zero(), |s, (&x, &y)| self.mul_add(s, x, y))
    }

    fn trace(&self, a: &Matrix<Self::Elem>) -> Self::Elem {
        (0..a.n).fold(self.zero(), |s, i| self.add(s, a.get(i, i)))
    }

    fn commutator(&self, a: &Matrix<Self::Elem>, b: &Matrix<Self::Elem>) -> Matrix<Self::Elem> {
        self.mat_sub(&self.mat_mul(a, b), &self.mat_mul(b, a))
    }

    fn commutes(&self, a: &Matrix<Self::Elem>, b: &Matrix<Self::Elem>) -> bool {
        self.mat_mul(a, b) == self.mat_mul(b, a)
    }

    fn is_scalar_matrix(&self, a: &Matrix<Self::Elem>) -> bool {
        let c = a.get(0, 0);
        *a == self.scalar_matrix(a.n, c)
    }

    /// Coefficients of `det(X - A)`, highest degree first (leading 1 included).
    /// Berkowitz's algorithm: no divisions, valid over any commutative ring.
    fn berkowitz(&self, a: &Matrix<Self::Elem>) -> Vec<Self::Elem> {
        let n = a.n;
        let mut v = vec![self.one()];
        if n == 0 {
            return v;
        }
        v.push(self.neg(a.get(0, 0)));
        for k in 1..n {
            let mut t = Vec::with_capacity(k + 2);
            t.push(self.one());
            t.push(self.neg(a.get(k, k)));
            let mut w: Vec<Self::Elem> = (0..k).map(|i| a.get(i, k)).collect();
            for _ in 0..k {
                let rw = (0..k).fold(self.zero(), |s, j| self.mul_add(s, a.get(k, j), w[j]));
                t.push(self.neg(rw));
                w = (0..k)
                    .map(|i| (0..k).fold(self.zero(), |s, j| self.mul_add(s, a.get(i, j), w[j])))
                    .collect();
            }
            let next: Vec<Self::Elem> = (0..k + 2)
                .map(|i| {
                    (0..=i.min(k)).fold(self.zero(), |s, j| self.mul_add(s, t[i - j], v[j]))
                })
                .collect();
            v = next;
        }
        v
    }

    fn det(&self, a: &Matrix<Self::Elem>) -> Self::Elem {
        let v = self.berkowitz(a);
        let c0 = v[a.n];
        if a.n % 2 == 0 {
            c0
        } else {
            self.neg(c0)
        }
    }

    /// Adjugate via Cayley–Hamilton: `adj A = (-1)^{n-1} (A^{n-1} + c_{n-1} A^{n-2} + … + c_1)`.
    fn adjugate(&self, a: &Matrix<Self::Elem>) -> Matrix<Self::Elem> {
        let n = a.n;
        let v = self.berkowitz(a);
        let mut b = self.identity(n);
        for &c in v.iter().take(n).skip(1) {
            b = self.mat_mul(&b, a);
            for i in 0..n {
                let d = b.get(i, i);
                b.set(i, i, self.add(d, c));
            }
        }
        if n % 2 == 0 {
            b.map(|x| self.neg(x))
        } else {
            b
        }
    }

    /// Checked `(det A, adj A)`, verifying `A·adj A = det(A)·I`.
    fn determinant_and_adjugate(
        &self,
        a: &Matrix<Self::Elem>,
    ) -> Result<(Self::Elem, Matrix<Self::Elem>)> {
        if a.n > MAX_DIM {
            return Err(Error::DimensionTooLarge { n: a.n, max: MAX_DIM });
        }
        let d = self.det(a);
        let adj = self.adjugate(a);
        debug_assert_eq!(self.mat_mul(a, &adj), self.scalar_matrix(a.n, d));
        Ok((d, adj))
    }

    fn charpoly(&self, a: &Matrix<Self::Elem>) -> Result<MonicPoly<Self::Elem>> {
        if a.n > MAX_DIM {
            return Err(Error::DimensionTooLarge { n: a.n, max: MAX_DIM });
        }
        Ok(self.charpoly_unchecked(a))
    }

    fn charpoly_unchecked(&self, a: &Matrix<Self::Elem>) -> MonicPoly<Self::Elem> {
        let mut v = self.berkowitz(a);
        v.remove(0);
        v.reverse();
        MonicPoly::new(v)
    }

    fn is_invertible(&self, a: &Matrix<Self::Elem>) -> bool {
        self.is_unit(self.det(a))
    }

    /// `adj(A)·det(A)⁻¹`.
    fn mat_inverse(&self, a: &Matrix<Self::Elem>) -> Result<Matrix<Self::Elem>> {
        let d = Ring::inverse(self, self.det(a)).ok_or(Error::SingularOverRing)?;
        Ok(self.mat_scale(d, &self.adjugate(a)))
    }

    /// The unique `x` with `A x = b`, for invertible `A`.
    fn solve(&self, a: &Matrix<Self::Elem>, b: &[Self::Elem]) -> Result<Vec<Self::Elem>> {
        let d = Ring::inverse(self, self.det(a)).ok_or(Error::SingularOverRing)?;
        let x = self.mat_vec(&self.adjugate(a), b);
        Ok(x.into_iter().map(|v| self.mul(d, v)).collect())
    }

    /// Rank of the reduction to the residue field of the matrix with the given
    /// rows, by elimination with unit pivots only.
    fn residue_rank(&self, rows: &[Vec<Self::Elem>]) -> usize {
        let mut m: Vec<Vec<Self::Elem>> = rows.to_vec();
        let ncols = m.first().map_or(0, |r| r.len());
        let mut rank = 0;
        for col in 0..ncols {
            let Some(piv) = (rank..m.len()).find(|&i| self.is_unit(m[i][col])) else {
                continue;
            };
            m.swap(rank, piv);
            let inv = Ring::inverse(self, m[rank][col]).expect("unit pivot");
            for i in rank + 1..m.len() {
                let f = self.mul(m[i][col], inv);
                if self.is_zero(f) {
                    continue;
                }
                for j in col..ncols {
                    let v = self.sub(m[i][j], self.mul(f, m[rank][j]));
                    m[i][j] = v;
                }
            }
            rank += 1;
        }
        rank
    }

    /// Evaluates a monic polynomial at a matrix (Horner).
    fn poly_at_matrix(&self, p: &MonicPoly<Self::Elem>, a: &Matrix<Self::Elem>) -> Matrix<Self::Elem> {
        let n = a.n;
        let mut acc = self.identity(n);
        for &c in p.coeffs().iter().rev() {
            acc = self.mat_mul(&acc, a);
            for i in 0..n {
                let d = acc.get(i, i);
                acc.set(i, i, self.add(d, c));
            }
        }
        acc
    }

    /// `Σ c_j A^j`.
    fn combination(&self, coeffs: &[Self::Elem], basis: &[Matrix<Self::Elem>]) -> Matrix<Self::Elem> {
        let n = basis[0].n;
        let mut data = vec![self.zero(); n * n];
        for (&c, m) in coeffs.iter().zip(basis) {
            if self.is_zero(c) {
                continue;
            }
            for (d, &x) in data.iter_mut().zip(&m.data) {
                *d = self.mul_add(*d, c, x);
            }
        }
        Matrix { n, data }
    }

    fn lift_matrix<B: Ring>(&self, a: &Matrix<B::Elem>) -> Matrix<Self::Elem>
    where
        Self: Extension<B>,
    {
        a.map(|x| self.lift(x))
    }

    fn truncate_matrix<B: Ring>(&self, a: &Matrix<Self::Elem>) -> Matrix<B::Elem>
    where
        Self: Extension<B>,
    {
        a.map(|x| self.truncate(x))
    }
}

impl<R: Ring> MatOps for R {}

/// Enumeration and sampling of matrices over finite rings.
pub trait MatEnum: FiniteRing + MatOps {
    /// The matrix with base-`|R|` digit expansion `index` (row-major, least significant first).
    fn matrix_from_index(&self, n: usize, mut index: u128) -> Matrix<Self::Elem> {
        let c = self.cardinality() as u128;
        Matrix::from_fn(n, |_, _| {
            let e = self.element((index % c) as u64);
            index /= c;
            e
        })
    }

    fn matrix_count(&self, n: usize) -> u128 {
        (self.cardinality() as u128).pow((n * n) as u32)
    }

    fn random_matrix<G: rand::Rng + ?Sized>(&self, n: usize, rng: &mut G) -> Matrix<Self::Elem> {
        Matrix::from_fn(n, |_, _| self.random_element(rng))
    }

    fn random_invertible<G: rand::Rng + ?Sized>(&self, n: usize, rng: &mut G) -> Matrix<Self::Elem> {
        loop {
            let a = self.random_matrix(n, rng);
            if self.is_invertible(&a) {
                return a;
            }
        }
    }

    /// All invertible `n×n` matrices, in index order.
    fn general_linear_group(&self, n: usize) -> Vec<Matrix<Self::Elem>> {
        (0..self.matrix_count(n))
            .map(|i| self.matrix_from_index(n, i))
            .filter(|a| self.is_invertible(a))
            .collect()
    }

    fn matrix_codes(&self, a: &Matrix<Self::Elem>) -> Vec<Vec<u64>> {
        (0..a.n)
            .map(|i| (0..a.n).map(|j| self.index_of(a.get(i, j))).collect())
            .collect()
    }
}

impl<R: FiniteRing> MatEnum for R {}
