//! The pair H = GL(n) ⊂ G = GL(n+1) in fixed coordinates.
//!
//! `e` is the last standard basis vector and `e*` the last coordinate
//! functional, so `H` is the block subgroup `(A 0; 0 1)` and `1_H = 1 - e e*`.

use crate::error::{Error, Result};
use crate::matrix::{MatEnum, MatOps, Matrix};
use crate::poly::{MonicPoly, PolyEnum, PolyOps};
use crate::ring::{Extension, FiniteRing, Ring};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

pub fn e_vec<R: Ring>(r: &R, dim: usize) -> Vec<R::Elem> {
    (0..dim).map(|i| if i + 1 == dim { r.one() } else { r.zero() }).collect()
}

pub fn one_h<R: Ring>(r: &R, dim: usize) -> Matrix<R::Elem> {
    r.diagonal(&e_vec(r, dim).iter().map(|&x| r.sub(r.one(), x)).collect::<Vec<_>>())
}

/// `e e*`.
pub fn e_e_star<R: Ring>(r: &R, dim: usize) -> Matrix<R::Elem> {
    r.diagonal(&e_vec(r, dim))
}

/// `(A 0; 0 1)`.
pub fn embed_h<R: Ring>(r: &R, a: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    let n = a.dim();
    Matrix::from_fn(n + 1, |i, j| match (i < n, j < n) {
        (true, true) => a.get(i, j),
        (false, false) => r.one(),
        _ => r.zero(),
    })
}

/// The upper-left `n×n` block.
pub fn h_block<E: Copy>(g: &Matrix<E>) -> Matrix<E> {
    Matrix::from_fn(g.dim() - 1, |i, j| g.get(i, j))
}

pub fn is_in_h<R: Ring>(r: &R, g: &Matrix<R::Elem>) -> bool {
    let n = g.dim() - 1;
    (0..n).all(|i| r.is_zero(g.get(i, n)) && r.is_zero(g.get(n, i))) && r.is_one(g.get(n, n))
}

/// Whether `a = h z` with `h ∈ H` and `z` a central unit.
pub fn is_in_hz<R: Ring>(r: &R, a: &Matrix<R::Elem>) -> bool {
    let n = a.dim() - 1;
    let z = a.get(n, n);
    r.is_unit(z)
        && (0..n).all(|i| r.is_zero(a.get(i, n)) && r.is_zero(a.get(n, i)))
        && r.is_invertible(a)
}

/// `τ_H = 1_H τ 1_H`.
pub fn tau_sub_h<R: Ring>(r: &R, tau: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    let n = tau.dim() - 1;
    Matrix::from_fn(n + 1, |i, j| if i < n && j < n { tau.get(i, j) } else { r.zero() })
}

/// `[v, τv, …, τ^n v]` as columns.
pub fn krylov_matrix<R: Ring>(r: &R, tau: &Matrix<R::Elem>, v: &[R::Elem]) -> Matrix<R::Elem> {
    let dim = tau.dim();
    let mut cols = Vec::with_capacity(dim);
    let mut w = v.to_vec();
    for _ in 0..dim {
        let next = r.mat_vec(tau, &w);
        cols.push(w);
        w = next;
    }
    Matrix::from_fn(dim, |i, j| cols[j][i])
}

/// `[w; wτ; …; wτ^n]` as rows.
pub fn dual_krylov_matrix<R: Ring>(r: &R, tau: &Matrix<R::Elem>, w: &[R::Elem]) -> Matrix<R::Elem> {
    let dim = tau.dim();
    let mut rows = Vec::with_capacity(dim);
    let mut x = w.to_vec();
    for _ in 0..dim {
        let next = r.vec_mat(&x, tau);
        rows.push(x);
        x = next;
    }
    Matrix::from_rows(&rows)
}

pub fn krylov_is_cyclic<R: Ring>(r: &R, tau: &Matrix<R::Elem>, v: &[R::Elem]) -> bool {
    r.is_invertible(&krylov_matrix(r, tau, v))
}

/// `Δ(τ) = det(e*, e*τ, …, e*τ^n)·det(e, τe, …, τ^n e)`.
pub fn stability_delta<R: Ring>(r: &R, tau: &Matrix<R::Elem>) -> R::Elem {
    let e = e_vec(r, tau.dim());
    r.mul(r.det(&dual_krylov_matrix(r, tau, &e)), r.det(&krylov_matrix(r, tau, &e)))
}

pub fn is_stable<R: Ring>(r: &R, tau: &Matrix<R::Elem>) -> bool {
    r.is_unit(stability_delta(r, tau))
}

/// Whether `1, τ, …, τ^n` stay independent over the residue field.
pub fn is_cyclic<R: Ring>(r: &R, tau: &Matrix<R::Elem>) -> bool {
    let dim = tau.dim();
    let mut pows = Vec::with_capacity(dim);
    let mut x = r.identity(dim);
    for _ in 0..dim {
        pows.push(x.entries().to_vec());
        x = r.mat_mul(&x, tau);
    }
    r.residue_rank(&pows) == dim
}

/// The power basis `1, τ, …, τ^n` of the commutant of a cyclic `τ`.
pub fn centralizer_basis<R: Ring>(r: &R, tau: &Matrix<R::Elem>) -> Result<Vec<Matrix<R::Elem>>> {
    if !is_cyclic(r, tau) {
        return Err(Error::NotCyclic);
    }
    let dim = tau.dim();
    let mut out = vec![r.identity(dim)];
    for j in 1..dim {
        out.push(r.mat_mul(&out[j - 1], tau));
    }
    Ok(out)
}

/// Coordinates of `x ∈ R[τ]` in the power basis, read from `x v` through the
/// Krylov matrix of a cyclic vector `v`.
pub fn power_basis_coefficients<R: Ring>(
    r: &R,
    tau: &Matrix<R::Elem>,
    v: &[R::Elem],
    x: &Matrix<R::Elem>,
) -> Result<Vec<R::Elem>> {
    r.solve(&krylov_matrix(r, tau, v), &r.mat_vec(x, v))
}

/// `τ` with `P_τ = p` and `P_{τ_H} = p_h`, in the shape
/// `(a₁ 1 0; a₂ 0 1; b₂ b₁ b₀)`: the `a` column is read off `p_h` and the
/// `b` row is solved from the affine dependence of `P_τ` on it.
pub fn construct_tau<R: Ring>(
    r: &R,
    p: &MonicPoly<R::Elem>,
    p_h: &MonicPoly<R::Elem>,
) -> Result<Matrix<R::Elem>> {
    let n = p_h.degree();
    if p.degree() != n + 1 || n == 0 {
        return Err(Error::PreconditionFailed(format!(
            "degrees {} and {} do not match a rank n+1, n pair",
            p.degree(),
            n
        )));
    }
    let dim = n + 1;
    let with_b = |b: &[R::Elem]| {
        Matrix::from_fn(dim, |i, j| {
            if i == n {
                b[n - j]
            } else if j == 0 {
                r.neg(p_h.coeffs()[n - 1 - i])
            } else if j == i + 1 {
                r.one()
            } else {
                r.zero()
            }
        })
    };
    let zero_b = vec![r.zero(); dim];
    let base = r.charpoly_unchecked(&with_b(&zero_b));
    // column k of the system: the change of P_τ when b_k moves from 0 to 1
    let columns: Vec<Vec<R::Elem>> = (0..dim)
        .map(|k| {
            let mut b = zero_b.clone();
            b[k] = r.one();
            let pk = r.charpoly_unchecked(&with_b(&b));
            pk.coeffs().iter().zip(base.coeffs()).map(|(&x, &y)| r.sub(x, y)).collect()
        })
        .collect();
    let system = Matrix::from_fn(dim, |i, k| columns[k][i]);
    let rhs: Vec<R::Elem> = p.coeffs().iter().zip(base.coeffs()).map(|(&x, &y)| r.sub(x, y)).collect();
    let b = r.solve(&system, &rhs)?;
    let tau = with_b(&b);
    debug_assert_eq!(&r.charpoly_unchecked(&tau), p);
    Ok(tau)
}

/// Block-upper-triangular cyclic matrix with companion diagonal blocks.
///
/// The first basis vector of block `i` is linked into the last column of
/// block `i+1`; the first basis vector of the last block is a cyclic vector.
pub fn construct_flag_cyclic<R: Ring>(r: &R, blocks: &[MonicPoly<R::Elem>]) -> Matrix<R::Elem> {
    let dim: usize = blocks.iter().map(|b| b.degree()).sum();
    let mut tau = r.zero_matrix(dim);
    let mut starts = Vec::new();
    let mut off = 0;
    for b in blocks {
        let c = r.companion(b);
        for i in 0..b.degree() {
            for j in 0..b.degree() {
                tau.set(off + i, off + j, c.get(i, j));
            }
        }
        starts.push(off);
        off += b.degree();
    }
    for i in 0..blocks.len().saturating_sub(1) {
        let end_next = starts[i + 1] + blocks[i + 1].degree() - 1;
        tau.set(starts[i], end_next, r.one());
    }
    tau
}

/// A stable `τ` together with the data needed to invert `x ↦ x e` and `x ↦ e* x` on `R[τ]`.
#[derive(Clone, Debug)]
pub struct StableTau<R: Ring> {
    ring: R,
    tau: Matrix<R::Elem>,
    powers: Vec<Matrix<R::Elem>>,
    kcol_inv: Matrix<R::Elem>,
    krow_inv: Matrix<R::Elem>,
    h_basis: Vec<Matrix<R::Elem>>,
}

impl<R: Ring> StableTau<R> {
    pub fn new(ring: R, tau: Matrix<R::Elem>) -> Result<Self> {
        let dim = tau.dim();
        if !(2..=crate::matrix::MAX_DIM).contains(&dim) {
            return Err(Error::DimensionTooLarge { n: dim, max: crate::matrix::MAX_DIM });
        }
        let r = &ring;
        let e = e_vec(r, dim);
        let kcol_inv = r.mat_inverse(&krylov_matrix(r, &tau, &e))?;
        let krow_inv = r.mat_inverse(&dual_krylov_matrix(r, &tau, &e))?;
        let mut powers = vec![r.identity(dim)];
        for j in 1..dim {
            powers.push(r.mat_mul(&powers[j - 1], &tau));
        }
        let th = tau_sub_h(r, &tau);
        let mut h_basis = vec![one_h(r, dim)];
        for j in 1..dim - 1 {
            h_basis.push(r.mat_mul(&h_basis[j - 1], &th));
        }
        Ok(StableTau { ring, tau, powers, kcol_inv, krow_inv, h_basis })
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn tau(&self) -> &Matrix<R::Elem> {
        &self.tau
    }

    pub fn dim(&self) -> usize {
        self.tau.dim()
    }

    /// `n`, the rank of `H`.
    pub fn n(&self) -> usize {
        self.tau.dim() - 1
    }

    pub fn tau_h(&self) -> Matrix<R::Elem> {
        tau_sub_h(&self.ring, &self.tau)
    }

    /// `1, τ, …, τ^n`.
    pub fn powers(&self) -> &[Matrix<R::Elem>] {
        &self.powers
    }

    /// `1_H, τ_H, …, τ_H^{n-1}` (with the convention `τ_H^0 = 1_H`).
    pub fn h_basis(&self) -> &[Matrix<R::Elem>] {
        &self.h_basis
    }

    pub fn from_coeffs(&self, c: &[R::Elem]) -> Matrix<R::Elem> {
        self.ring.combination(c, &self.powers)
    }

    /// Coordinates of the `x ∈ R[τ]` with `x e = v`.
    pub fn col_coeffs(&self, v: &[R::Elem]) -> Vec<R::Elem> {
        self.ring.mat_vec(&self.kcol_inv, v)
    }

    /// Coordinates of the `x ∈ R[τ]` with `e* x = w`.
    pub fn row_coeffs(&self, w: &[R::Elem]) -> Vec<R::Elem> {
        self.ring.vec_mat(w, &self.krow_inv)
    }

    /// `[•e]⁻¹(v)`.
    pub fn solve_in_centralizer(&self, v: &[R::Elem]) -> Matrix<R::Elem> {
        self.from_coeffs(&self.col_coeffs(v))
    }

    /// `[e*•]⁻¹(w)`.
    pub fn solve_in_centralizer_dual(&self, w: &[R::Elem]) -> Matrix<R::Elem> {
        self.from_coeffs(&self.row_coeffs(w))
    }

    /// `y = Σ c_j τ_H^j + e e*`.
    pub fn h_element(&self, c: &[R::Elem]) -> Matrix<R::Elem> {
        let r = &self.ring;
        r.mat_add(&r.combination(c, &self.h_basis), &e_e_star(r, self.dim()))
    }

    /// The same data over an extension ring (all matrices lifted).
    pub fn lift_to<S: Extension<R>>(&self, s: &S) -> StableTau<S> {
        let l = |m: &Matrix<R::Elem>| m.map(|x| s.lift(x));
        StableTau {
            ring: s.clone(),
            tau: l(&self.tau),
            powers: self.powers.iter().map(l).collect(),
            kcol_inv: l(&self.kcol_inv),
            krow_inv: l(&self.krow_inv),
            h_basis: self.h_basis.iter().map(l).collect(),
        }
    }
}

impl<R: FiniteRing> StableTau<R> {
    /// Every `y ∈ H_{τ_H}(R)`, in coefficient-index order.
    pub fn centralizer_units(&self, budget: u64) -> Result<Vec<Matrix<R::Elem>>> {
        enumerate_h_units(&self.ring, &self.h_basis, budget)
    }
}

fn enumerate_h_units<R: FiniteRing>(
    r: &R,
    h_basis: &[Matrix<R::Elem>],
    budget: u64,
) -> Result<Vec<Matrix<R::Elem>>> {
    let n = h_basis.len();
    let c = r.cardinality() as u128;
    let needed = c.pow(n as u32);
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let dim = n + 1;
    let ee = e_e_star(r, dim);
    let mut out = Vec::new();
    let mut coeffs = vec![r.zero(); n];
    for idx in 0..needed as u64 {
        let mut k = idx;
        for cj in coeffs.iter_mut() {
            *cj = r.element(k % c as u64);
            k /= c as u64;
        }
        let y = r.mat_add(&r.combination(&coeffs, h_basis), &ee);
        if r.is_invertible(&y) {
            out.push(y);
        }
    }
    Ok(out)
}

/// Units of `R[τ_H]` (restricted to the H-block, corner entry 1).
pub fn enumerate_centralizer_units<R: FiniteRing>(
    r: &R,
    tau_h: &Matrix<R::Elem>,
    budget: u64,
) -> Result<Vec<Matrix<R::Elem>>> {
    let dim = tau_h.dim();
    let th = tau_sub_h(r, tau_h);
    let mut basis = vec![one_h(r, dim)];
    for j in 1..dim - 1 {
        basis.push(r.mat_mul(&basis[j - 1], &th));
    }
    enumerate_h_units(r, &basis, budget)
}

/// All units of `R[τ]` (the group `G_τ(R)` for cyclic `τ`).
pub fn centralizer_group<R: FiniteRing>(
    r: &R,
    tau: &Matrix<R::Elem>,
    budget: u64,
) -> Result<Vec<Matrix<R::Elem>>> {
    let basis = centralizer_basis(r, tau)?;
    let c = r.cardinality() as u128;
    let needed = c.pow(basis.len() as u32);
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let mut out = Vec::new();
    let mut coeffs = vec![r.zero(); basis.len()];
    for idx in 0..needed as u64 {
        let mut k = idx;
        for cj in coeffs.iter_mut() {
            *cj = r.element(k % c as u64);
            k /= c as u64;
        }
        let x = r.combination(&coeffs, &basis);
        if r.is_invertible(&x) {
            out.push(x);
        }
    }
    Ok(out)
}

/// Pairs `(P, P_H)` of monic polynomials of degrees `n+1`, `n` generating the unit ideal.
pub fn coprime_pairs<R: FiniteRing>(
    r: &R,
    n: usize,
    budget: u64,
) -> Result<Vec<(MonicPoly<R::Elem>, MonicPoly<R::Elem>)>> {
    let needed = (r.monic_count(n + 1) as u128) * (r.monic_count(n) as u128);
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let mut out = Vec::new();
    for p in r.monics(n + 1) {
        for q in r.monics(n) {
            if r.monic_coprime(&p, &q) {
                out.push((p.clone(), q));
            }
        }
    }
    Ok(out)
}

pub fn random_coprime_pair<R: FiniteRing, G: rand::Rng + ?Sized>(
    r: &R,
    n: usize,
    rng: &mut G,
) -> (MonicPoly<R::Elem>, MonicPoly<R::Elem>) {
    loop {
        let p = r.random_monic(n + 1, rng);
        let q = r.random_monic(n, rng);
        if r.monic_coprime(&p, &q) {
            return (p, q);
        }
    }
}

/// Representatives of `H\G/Z`.
///
/// The coset `H a Z` is determined by the pair `(e* a, a⁻¹ e)` up to the
/// scaling `(z r, z⁻¹ w)`; rows are normalised so their first unit entry is 1.
/// The representative maps `e_j - r_j e_{i0}` (`j ≠ i0`) to the first basis
/// vectors and `w` to `e`.
pub fn h_coset_representatives<R: FiniteRing>(
    r: &R,
    dim: usize,
    budget: u64,
) -> Result<Vec<Matrix<R::Elem>>> {
    let c = r.cardinality() as u128;
    let needed = c.pow(2 * dim as u32);
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let vecs: Vec<Vec<R::Elem>> = (0..c.pow(dim as u32) as u64)
        .map(|mut k| {
            (0..dim)
                .map(|_| {
                    let x = r.element(k % c as u64);
                    k /= c as u64;
                    x
                })
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    for row in &vecs {
        let Some(i0) = row.iter().position(|&x| r.is_unit(x)) else { continue };
        if !r.is_one(row[i0]) {
            continue;
        }
        for w in &vecs {
            if !r.is_one(r.dot(row, w)) {
                continue;
            }
            let mut cols: Vec<Vec<R::Elem>> = (0..dim)
                .filter(|&j| j != i0)
                .map(|j| {
                    let mut v = vec![r.zero(); dim];
                    v[j] = r.one();
                    v[i0] = r.neg(row[j]);
                    v
                })
                .collect();
            cols.push(w.clone());
            let b = Matrix::from_fn(dim, |i, j| cols[j][i]);
            out.push(r.mat_inverse(&b)?);
        }
    }
    Ok(out)
}

/// Every matrix of `M_{n+1}(R)` that is stable, in index order.
pub fn all_stable<R: FiniteRing>(r: &R, dim: usize, budget: u64) -> Result<Vec<Matrix<R::Elem>>> {
    let needed = r.matrix_count(dim);
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    Ok((0..needed)
        .map(|i| r.matrix_from_index(dim, i))
        .filter(|t| is_stable(r, t))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{DualRing, GaloisField, LocalRing};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f(p: u64) -> LocalRing {
        LocalRing::new(p, 1).unwrap()
    }

    #[test]
    fn tau_sub_h_examples() {
        let r = f(5);
        assert_eq!(tau_sub_h(&r, &r.identity(3)), one_h(&r, 3));
        let t = r.matrix_from_i64(&[&[1, 2, 3], &[4, 0, 1], &[2, 2, 2]]);
        assert_eq!(tau_sub_h(&r, &t), r.matrix_from_i64(&[&[1, 2, 0], &[4, 0, 0], &[0, 0, 0]]));
        let th = tau_sub_h(&r, &t);
        assert_eq!(tau_sub_h(&r, &th), th);
    }

    #[test]
    fn cyclicity_examples() {
        let r = f(3);
        let j = r.matrix_from_i64(&[&[1, 1, 0], &[0, 1, 1], &[0, 0, 1]]);
        assert!(krylov_is_cyclic(&r, &j, &[r.zero(), r.zero(), r.one()]));
        let d = r.diagonal(&[r.zero(), r.one()]);
        assert!(krylov_is_cyclic(&r, &d, &[r.one(), r.one()]));
        assert!(!krylov_is_cyclic(&r, &d, &[r.one(), r.zero()]));
        let dr = DualRing::new(r);
        let dl = dr.lift_matrix(&d);
        assert!(krylov_is_cyclic(&dr, &dl, &[dr.one(), dr.one()]));
    }

    #[test]
    fn stability_example() {
        let r = f(5);
        let t = r.matrix_from_i64(&[&[0, 1, 0], &[1, 0, 1], &[2, 4, 0]]);
        let e = e_vec(&r, 3);
        assert_eq!(r.det(&krylov_matrix(&r, &t, &e)), r.elem_i64(-1));
        assert_eq!(r.det(&dual_krylov_matrix(&r, &t, &e)), r.elem(3));
        assert_eq!(stability_delta(&r, &t), r.elem(2));
        let eig = r.matrix_from_i64(&[&[1, 2, 0], &[3, 1, 0], &[1, 1, 2]]);
        assert_eq!(stability_delta(&r, &eig), r.zero());
    }

    #[test]
    fn stability_lifts_from_residue_field() {
        let z9 = LocalRing::new(3, 2).unwrap();
        let f3 = f(3);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..400 {
            let t = z9.random_matrix(3, &mut rng);
            let tb = t.map(|x| f3.elem(x.value()));
            assert_eq!(is_stable(&z9, &t), is_stable(&f3, &tb));
        }
    }

    #[test]
    fn construct_tau_examples() {
        let r = f(5);
        let p = MonicPoly::new(vec![r.elem_i64(-2), r.zero(), r.zero()]);
        let ph = MonicPoly::new(vec![r.elem_i64(-1), r.zero()]);
        let t = construct_tau(&r, &p, &ph).unwrap();
        assert_eq!(t, r.matrix_from_i64(&[&[0, 1, 0], &[1, 0, 1], &[2, 4, 0]]));
        for n in 1..5 {
            let p = MonicPoly::new(vec![r.zero(); n + 1]);
            let ph = MonicPoly::new(vec![r.zero(); n]);
            let t = construct_tau(&r, &p, &ph).unwrap();
            assert_eq!(r.charpoly(&t).unwrap(), p);
            assert_eq!(r.charpoly(&h_block(&t)).unwrap(), ph);
            assert_eq!(r.mat_pow(&t, n + 1), r.zero_matrix(n + 1));
        }
    }

    #[test]
    fn construct_tau_round_trip_z9() {
        let r = LocalRing::new(3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for i in 0..200 {
            let n = 1 + i % 4;
            let (p, ph) = random_coprime_pair(&r, n, &mut rng);
            let t = construct_tau(&r, &p, &ph).unwrap();
            assert_eq!(r.charpoly(&t).unwrap(), p);
            assert_eq!(r.charpoly(&h_block(&t)).unwrap(), ph);
            assert!(is_stable(&r, &t));
        }
    }

    #[test]
    fn stable_orbits_are_charpoly_pairs() {
        // H acts freely on stable elements, one orbit per coprime pair
        let r = f(3);
        let stable = all_stable(&r, 3, DEFAULT_BUDGET).unwrap();
        let pairs = coprime_pairs(&r, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(stable.len(), 48 * pairs.len());
        let f2 = GaloisField::new(2, 1).unwrap();
        let stable = all_stable(&f2, 3, DEFAULT_BUDGET).unwrap();
        let pairs = coprime_pairs(&f2, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(stable.len(), 6 * pairs.len());
    }

    /// Brute-force search for a nonzero proper τ-invariant subspace inside
    /// `V_H` or a nonzero τ-invariant subspace of `V*` killing `e`.
    fn has_invariant_piece(r: &LocalRing, t: &Matrix<crate::ring::Residue>) -> bool {
        let p = r.p();
        let vecs: Vec<Vec<crate::ring::Residue>> = (1..p * p)
            .map(|k| vec![r.elem(k % p), r.elem(k / p), r.zero()])
            .collect();
        // subspaces of V_H of dimension 1 and 2 (the whole V_H)
        let spans_in_h = |v: &Vec<crate::ring::Residue>, dual: bool| {
            let tv = if dual { r.vec_mat(v, t) } else { r.mat_vec(t, v) };
            tv[2] == r.zero() && {
                // tv proportional to v
                (0..p).any(|c| tv.iter().zip(v).all(|(&x, &y)| x == r.mul(r.elem(c), y)))
            }
        };
        let whole = |dual: bool| {
            (0..2).all(|i| {
                let mut v = vec![r.zero(); 3];
                v[i] = r.one();
                let tv = if dual { r.vec_mat(&v, t) } else { r.mat_vec(t, &v) };
                tv[2] == r.zero()
            })
        };
        vecs.iter().any(|v| spans_in_h(v, false) || spans_in_h(v, true)) || whole(false) || whole(true)
    }

    #[test]
    fn stability_equivalences_exhaustive_f3() {
        let r = f(3);
        for i in 0..r.matrix_count(3) {
            let t = r.matrix_from_index(3, i);
            let coprime = r.monic_coprime(&r.charpoly(&t).unwrap(), &r.charpoly(&h_block(&t)).unwrap());
            let stable = is_stable(&r, &t);
            assert_eq!(coprime, stable);
            assert_eq!(!has_invariant_piece(&r, &t), stable, "{t:?}");
        }
    }

    #[test]
    fn h_meets_centralizer_trivially() {
        let r = f(3);
        let h: Vec<_> = r.general_linear_group(2).iter().map(|a| embed_h(&r, a)).collect();
        for t in all_stable(&r, 3, DEFAULT_BUDGET).unwrap().iter().step_by(3) {
            let fixed = h.iter().filter(|g| r.commutes(g, t)).count();
            assert_eq!(fixed, 1);
        }
    }

    #[test]
    fn cyclic_conjugacy_by_basis_matching() {
        let r = LocalRing::new(5, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let p = r.random_monic(3, &mut rng);
            let g = r.random_invertible(3, &mut rng);
            let t1 = r.companion(&p);
            let t2 = r.mat_mul(&r.mat_mul(&g, &t1), &r.mat_inverse(&g).unwrap());
            // match the Krylov bases of cyclic vectors e_1 and g e_1
            let v1 = vec![r.one(), r.zero(), r.zero()];
            let v2 = r.mat_vec(&g, &v1);
            let k1 = krylov_matrix(&r, &t1, &v1);
            let k2 = krylov_matrix(&r, &t2, &v2);
            let h = r.mat_mul(&k2, &r.mat_inverse(&k1).unwrap());
            assert_eq!(r.mat_mul(&h, &t1), r.mat_mul(&t2, &h));
        }
    }

    #[test]
    fn centralizer_basis_spans_commutant() {
        let r = f(3);
        let p = MonicPoly::new(vec![r.elem_i64(-1), r.zero(), r.zero()]);
        let t = r.companion(&p);
        let basis = centralizer_basis(&r, &t).unwrap();
        let v = vec![r.one(), r.zero(), r.zero()];
        let mut commutant = 0;
        for i in 0..r.matrix_count(3) {
            let x = r.matrix_from_index(3, i);
            if r.commutes(&x, &t) {
                commutant += 1;
                let c = power_basis_coefficients(&r, &t, &v, &x).unwrap();
                assert_eq!(r.combination(&c, &basis), x);
            }
        }
        assert_eq!(commutant, 27);
        assert_eq!(centralizer_basis(&r, &r.identity(3)), Err(Error::NotCyclic));
        let r5 = f(5);
        let t5 = r5.companion(&MonicPoly::new(vec![r5.elem_i64(-1), r5.zero(), r5.zero()]));
        assert_eq!(centralizer_basis(&r5, &t5).unwrap().len(), 3);
    }

    #[test]
    fn solve_in_centralizer_contract() {
        let r = LocalRing::new(3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..50 {
            let (p, ph) = random_coprime_pair(&r, 2, &mut rng);
            let st = StableTau::new(r, construct_tau(&r, &p, &ph).unwrap()).unwrap();
            let e = e_vec(&r, 3);
            assert_eq!(st.solve_in_centralizer(&e), r.identity(3));
            assert_eq!(st.solve_in_centralizer(&r.mat_vec(st.tau(), &e)), *st.tau());
            assert_eq!(st.solve_in_centralizer_dual(&e), r.identity(3));
            let v: Vec<_> = (0..3).map(|_| r.random_element(&mut rng)).collect();
            let x = st.solve_in_centralizer(&v);
            assert_eq!(r.mat_vec(&x, &e), v);
            assert!(r.commutes(&x, st.tau()));
            let y = st.solve_in_centralizer_dual(&v);
            assert_eq!(r.vec_mat(&e, &y), v);
            // equivariance under G_τ
            let a = st.from_coeffs(&[r.one(), r.elem(3), r.random_element(&mut rng)]);
            assert_eq!(st.solve_in_centralizer(&r.mat_vec(&a, &v)), r.mat_mul(&a, &x));
        }
    }

    #[test]
    fn centralizer_unit_counts() {
        let r = f(3);
        // τ_H with irreducible charpoly X^2 + 1
        let irr = construct_tau(&r, &r.from_roots(&[r.zero(), r.one(), r.elem(2)]), &MonicPoly::new(vec![r.one(), r.zero()])).unwrap();
        assert_eq!(enumerate_centralizer_units(&r, &tau_sub_h(&r, &irr), 100).unwrap().len(), 8);
        let split = construct_tau(&r, &r.from_roots(&[r.elem(2), r.elem(2), r.elem(2)]), &r.from_roots(&[r.zero(), r.one()])).unwrap();
        assert_eq!(enumerate_centralizer_units(&r, &tau_sub_h(&r, &split), 100).unwrap().len(), 4);
        assert!(matches!(
            enumerate_centralizer_units(&r, &tau_sub_h(&r, &split), 5),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn centralizer_unit_lower_bound() {
        for (p, m) in [(3, 1), (3, 2), (5, 1)] {
            let r = LocalRing::new(p, m).unwrap();
            let q = r.modulus() as f64;
            let mut rng = ChaCha8Rng::seed_from_u64(15);
            for _ in 0..30 {
                let (pp, ph) = random_coprime_pair(&r, 2, &mut rng);
                let st = StableTau::new(r, construct_tau(&r, &pp, &ph).unwrap()).unwrap();
                let count = st.centralizer_units(DEFAULT_BUDGET).unwrap().len() as u64;
                // (1 - 1/p)^2 Q^2 = (p-1)^2 p^{2m-2}
                let lower = (p - 1).pow(2) * p.pow(2 * m - 2);
                assert!(count >= lower, "{count} < {lower} at Q = {q}");
            }
        }
    }

    #[test]
    fn flag_cyclic_examples() {
        let r = f(5);
        let b = vec![r.linear(r.one()), r.linear(r.elem(2))];
        let t = construct_flag_cyclic(&r, &b);
        assert_eq!(t, r.matrix_from_i64(&[&[1, 1], &[0, 2]]));
        assert!(krylov_is_cyclic(&r, &t, &[r.zero(), r.one()]));
        let single = r.from_roots(&[r.one(), r.elem(3), r.elem(3)]);
        assert_eq!(construct_flag_cyclic(&r, &[single.clone()]), r.companion(&single));
        let blocks = vec![r.linear(r.one()), single.clone(), r.linear(r.one())];
        let t = construct_flag_cyclic(&r, &blocks);
        let mut v = vec![r.zero(); 5];
        v[4] = r.one();
        assert!(krylov_is_cyclic(&r, &t, &v));
        assert_eq!(r.charpoly(&Matrix::from_fn(3, |i, j| t.get(1 + i, 1 + j))).unwrap(), single);
        assert_eq!(t.get(3, 0), r.zero());
    }

    #[test]
    fn coset_representatives_cover_h_g_z() {
        let r = f(3);
        let reps = h_coset_representatives(&r, 3, DEFAULT_BUDGET).unwrap();
        assert_eq!(reps.len(), 117);
        assert_eq!(reps.iter().filter(|a| is_in_hz(&r, a)).count(), 1);
        let f4 = GaloisField::new(2, 2).unwrap();
        assert_eq!(h_coset_representatives(&f4, 3, DEFAULT_BUDGET).unwrap().len(), 336);
        // every element of GL_3(F_3) lies in H·rep·Z for exactly one rep
        let key = |a: &Matrix<crate::ring::Residue>| {
            let row = a.row(2);
            let w = r.mat_vec(&r.mat_inverse(a).unwrap(), &e_vec(&r, 3));
            let i0 = row.iter().position(|&x| r.is_unit(x)).unwrap();
            let z = r.inverse(row[i0]).unwrap();
            let zr: Vec<_> = row.iter().map(|&x| r.mul(z, x)).collect();
            let zw: Vec<_> = w.iter().map(|&x| r.mul(row[i0], x)).collect();
            (zr, zw)
        };
        let keys: std::collections::HashSet<_> = reps.iter().map(key).collect();
        assert_eq!(keys.len(), 117);
        for g in r.general_linear_group(3).iter().step_by(7) {
            assert!(keys.contains(&key(g)));
        }
    }
}
