//! The scheme `X_{τ,a} = { y ∈ H_{τ_H} : a y ∈ H G_τ }` and its tangency analysis.
//!
//! Membership uses `f(y) = [e*•]⁻¹(e* a y) · [•e]⁻¹((a y)⁻¹ e)`, which equals 1
//! exactly on `X_{τ,a}`. Tangency is probed with dual numbers: first order by
//! `y(1 + εu)` and second order by `y(1 + ε₁u)(1 + ε₂v)`.

use crate::error::{Error, Result};
use crate::ggp::{self, e_vec, is_in_h, is_in_hz, StableTau};
use crate::matrix::{MatEnum, MatOps, Matrix};
use crate::poly::{MonicPoly, PolyEnum};
use crate::ring::{BiDualRing, DualRing, Extension, FiniteRing, GaloisField, LocalRing, Ring};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HGtauDecomposition<E> {
    pub h: Matrix<E>,
    pub b: Matrix<E>,
}

/// Whether `g ∈ H(R) G_τ(R)`.
pub fn in_h_gtau<R: Ring>(st: &StableTau<R>, g: &Matrix<R::Elem>) -> Result<bool> {
    let r = st.ring();
    let dim = st.dim();
    let e = e_vec(r, dim);
    // f = x1 x2 with x2 e = g⁻¹e, and x ↦ x e is injective on R[τ]
    let w = r.solve(g, &e)?;
    let x1 = st.solve_in_centralizer_dual(&g.row(dim - 1));
    Ok(r.mat_vec(&x1, &w) == e)
}

/// The unique `g = h b` with `h ∈ H`, `b ∈ G_τ`.
pub fn decompose_h_gtau<R: Ring>(st: &StableTau<R>, g: &Matrix<R::Elem>) -> Result<HGtauDecomposition<R::Elem>> {
    let r = st.ring();
    let b = st.solve_in_centralizer_dual(&g.row(st.dim() - 1));
    let b_inv = r.mat_inverse(&b).map_err(|_| Error::NotInProduct)?;
    let h = r.mat_mul(g, &b_inv);
    if !is_in_h(r, &h) {
        return Err(Error::NotInProduct);
    }
    debug_assert_eq!(&r.mat_mul(&h, &b), g);
    Ok(HGtauDecomposition { h, b })
}

/// A stable `τ` with a group element `a`.
#[derive(Clone, Debug)]
pub struct XScheme<R: Ring> {
    st: StableTau<R>,
    a: Matrix<R::Elem>,
    a_inv: Matrix<R::Elem>,
}

impl<R: Ring> XScheme<R> {
    pub fn new(st: StableTau<R>, a: Matrix<R::Elem>) -> Result<Self> {
        let a_inv = st.ring().mat_inverse(&a)?;
        Ok(XScheme { st, a, a_inv })
    }

    pub fn stable(&self) -> &StableTau<R> {
        &self.st
    }

    pub fn a(&self) -> &Matrix<R::Elem> {
        &self.a
    }

    pub fn a_inv(&self) -> &Matrix<R::Elem> {
        &self.a_inv
    }

    fn ring(&self) -> &R {
        self.st.ring()
    }

    /// `f(y)`.
    pub fn f(&self, y: &Matrix<R::Elem>) -> Result<Matrix<R::Elem>> {
        let r = self.ring();
        let dim = self.st.dim();
        let g = r.mat_mul(&self.a, y);
        let x1 = self.st.solve_in_centralizer_dual(&g.row(dim - 1));
        let w = r.solve(&g, &e_vec(r, dim))?;
        Ok(r.mat_mul(&x1, &self.st.solve_in_centralizer(&w)))
    }

    /// The polynomial form `[e*•]⁻¹(e* a y)·[•e]⁻¹(y^adj a⁻¹ e)`, which equals
    /// `det(y)` exactly on the scheme; defined for every `y`, invertible or not.
    pub fn cramer(&self, y: &Matrix<R::Elem>) -> (Matrix<R::Elem>, R::Elem) {
        let r = self.ring();
        let dim = self.st.dim();
        let x1 = self.st.solve_in_centralizer_dual(&r.mat_mul(&self.a, y).row(dim - 1));
        let v = r.mat_vec(&r.adjugate(y), &self.a_inv.col(dim - 1));
        (r.mat_mul(&x1, &self.st.solve_in_centralizer(&v)), r.det(y))
    }

    /// `cramer(y) - det(y)·1`, which vanishes identically iff `X_{τ,a} = H_{τ_H}` as schemes.
    pub fn cramer_defect(&self, y: &Matrix<R::Elem>) -> Matrix<R::Elem> {
        let r = self.ring();
        let (lhs, d) = self.cramer(y);
        r.mat_sub(&lhs, &r.scalar_matrix(y.dim(), d))
    }

    pub fn contains(&self, y: &Matrix<R::Elem>) -> Result<bool> {
        in_h_gtau(&self.st, &self.ring().mat_mul(&self.a, y))
    }

    pub fn lift_to<S: Extension<R>>(&self, s: &S) -> XScheme<S> {
        XScheme {
            st: self.st.lift_to(s),
            a: s.lift_matrix(&self.a),
            a_inv: s.lift_matrix(&self.a_inv),
        }
    }

    /// `(μ(u), ν(u))` with `μ(u) = [e*•]⁻¹(e* a u a⁻¹)` and `ν(u) = [•e]⁻¹(a u a⁻¹ e)`.
    pub fn mu_nu(&self, u: &Matrix<R::Elem>) -> (Matrix<R::Elem>, Matrix<R::Elem>) {
        let r = self.ring();
        let n = self.st.n();
        let c = r.mat_mul(&r.mat_mul(&self.a, u), &self.a_inv);
        (self.st.solve_in_centralizer_dual(&c.row(n)), self.st.solve_in_centralizer(&c.col(n)))
    }

    /// `(A_0..A_jmax, B_0..B_jmax)` with `A_j = e* a τ^j e`, `B_j = e* a⁻¹ τ^j e`.
    pub fn ab_invariants(&self, jmax: usize) -> (Vec<R::Elem>, Vec<R::Elem>) {
        let r = self.ring();
        let n = self.st.n();
        let mut t = r.identity(n + 1);
        let (mut av, mut bv) = (Vec::new(), Vec::new());
        for _ in 0..=jmax {
            av.push(r.mat_mul(&self.a, &t).get(n, n));
            bv.push(r.mat_mul(&self.a_inv, &t).get(n, n));
            t = r.mat_mul(&t, self.st.tau());
        }
        (av, bv)
    }

    /// `2(μ(u₁u₂) - μ(u₁)μ(u₂))`.
    pub fn homomorphism_defect(&self, u1: &Matrix<R::Elem>, u2: &Matrix<R::Elem>) -> Matrix<R::Elem> {
        let r = self.ring();
        let (m12, _) = self.mu_nu(&r.mat_mul(u1, u2));
        let (m1, _) = self.mu_nu(u1);
        let (m2, _) = self.mu_nu(u2);
        let d = r.mat_sub(&m12, &r.mat_mul(&m1, &m2));
        r.mat_add(&d, &d)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TangencyWitness {
    /// Index of a power-basis direction `u_k` with `f(y(1+εu_k)) ≠ 1`.
    Direction(usize),
    /// Ordered pair `(i, j)` with `f(y(1+ε₁u_i)(1+ε₂u_j)) ≠ 1`.
    Pair(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TangencyReport<E> {
    pub point: Matrix<E>,
    pub tangential: bool,
    pub doubly_tangential: bool,
    pub witness: Option<TangencyWitness>,
}

/// The scheme together with its lifts to `R[ε]` and `R[ε₁, ε₂]`.
#[derive(Clone, Debug)]
pub struct TangencyProbe<R: Ring> {
    base: XScheme<R>,
    dual_ring: DualRing<R>,
    dual: XScheme<DualRing<R>>,
    bidual_ring: BiDualRing<R>,
    bidual: XScheme<BiDualRing<R>>,
}

impl<R: Ring> TangencyProbe<R> {
    pub fn new(base: XScheme<R>) -> Self {
        let dual_ring = DualRing::new(base.ring().clone());
        let bidual_ring = BiDualRing::new(base.ring().clone());
        let dual = base.lift_to(&dual_ring);
        let bidual = base.lift_to(&bidual_ring);
        TangencyProbe { base, dual_ring, dual, bidual_ring, bidual }
    }

    pub fn scheme(&self) -> &XScheme<R> {
        &self.base
    }

    /// First failing power-basis direction at `y`, if any.
    pub fn first_order_failure(&self, y: &Matrix<R::Elem>) -> Result<Option<usize>> {
        let r = self.base.ring();
        let d = &self.dual_ring;
        let one = d.identity(y.dim());
        for (k, u) in self.base.st.h_basis().iter().enumerate() {
            let yu = r.mat_mul(y, u);
            let lifted = Matrix::from_fn(y.dim(), |i, j| d.make(y.get(i, j), yu.get(i, j)));
            if self.dual.f(&lifted)? != one {
                return Ok(Some(k));
            }
        }
        Ok(None)
    }

    /// First failing ordered pair at `y`, assuming first-order tangency.
    pub fn second_order_failure(&self, y: &Matrix<R::Elem>) -> Result<Option<(usize, usize)>> {
        let r = self.base.ring();
        let b = &self.bidual_ring;
        let one = b.identity(y.dim());
        let basis = self.base.st.h_basis();
        let yu: Vec<_> = basis.iter().map(|u| r.mat_mul(y, u)).collect();
        for i in 0..basis.len() {
            for j in 0..basis.len() {
                let yuu = r.mat_mul(&yu[i], &basis[j]);
                let lifted = Matrix::from_fn(y.dim(), |s, t| {
                    b.make(y.get(s, t), yu[i].get(s, t), yu[j].get(s, t), yuu.get(s, t))
                });
                if self.bidual.f(&lifted)? != one {
                    return Ok(Some((i, j)));
                }
            }
        }
        Ok(None)
    }

    pub fn report(&self, y: &Matrix<R::Elem>) -> Result<TangencyReport<R::Elem>> {
        if let Some(k) = self.first_order_failure(y)? {
            return Ok(TangencyReport {
                point: y.clone(),
                tangential: false,
                doubly_tangential: false,
                witness: Some(TangencyWitness::Direction(k)),
            });
        }
        let second = self.second_order_failure(y)?;
        Ok(TangencyReport {
            point: y.clone(),
            tangential: true,
            doubly_tangential: second.is_none(),
            witness: second.map(|(i, j)| TangencyWitness::Pair(i, j)),
        })
    }

    pub fn tangential(&self, y: &Matrix<R::Elem>) -> Result<bool> {
        Ok(self.first_order_failure(y)?.is_none())
    }

    pub fn doubly_tangential(&self, y: &Matrix<R::Elem>) -> Result<bool> {
        Ok(self.first_order_failure(y)?.is_none() && self.second_order_failure(y)?.is_none())
    }

    /// Replays a witness and confirms it still fails.
    pub fn replay(&self, y: &Matrix<R::Elem>, w: TangencyWitness) -> Result<bool> {
        let r = self.base.ring();
        let basis = self.base.st.h_basis();
        match w {
            TangencyWitness::Direction(k) => {
                let d = &self.dual_ring;
                let yu = r.mat_mul(y, &basis[k]);
                let lifted = Matrix::from_fn(y.dim(), |i, j| d.make(y.get(i, j), yu.get(i, j)));
                Ok(self.dual.f(&lifted)? != d.identity(y.dim()))
            }
            TangencyWitness::Pair(i, j) => {
                let b = &self.bidual_ring;
                let (yi, yj) = (r.mat_mul(y, &basis[i]), r.mat_mul(y, &basis[j]));
                let yij = r.mat_mul(&yi, &basis[j]);
                let lifted = Matrix::from_fn(y.dim(), |s, t| {
                    b.make(y.get(s, t), yi.get(s, t), yj.get(s, t), yij.get(s, t))
                });
                Ok(self.bidual.f(&lifted)? != b.identity(y.dim()))
            }
        }
    }
}

pub fn tangency_test<R: Ring>(x: &XScheme<R>, y: &Matrix<R::Elem>) -> Result<bool> {
    TangencyProbe::new(x.clone()).tangential(y)
}

pub fn double_tangency_test<R: Ring>(x: &XScheme<R>, y: &Matrix<R::Elem>) -> Result<bool> {
    TangencyProbe::new(x.clone()).doubly_tangential(y)
}

/// Points of `X_{τ,a}(R)` and `|H_{τ_H}(R)|`.
pub fn enumerate_x_points<R: FiniteRing>(x: &XScheme<R>, budget: u64) -> Result<(Vec<Matrix<R::Elem>>, usize)> {
    let units = x.stable().centralizer_units(budget)?;
    let total = units.len();
    let mut pts = Vec::new();
    for y in units {
        if x.contains(&y)? {
            pts.push(y);
        }
    }
    Ok((pts, total))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample<E> {
    pub p_tau: MonicPoly<E>,
    pub p_tau_h: MonicPoly<E>,
    pub tau: Matrix<E>,
    pub a: Matrix<E>,
    /// `|X_{τ,a}(R)|`.
    pub x_count: usize,
    /// `|H_{τ_H}(R)|`.
    pub h_count: usize,
}

impl<E> Counterexample<E> {
    /// Whether `X_{τ,a}(R) = H_{τ_H}(R)`.
    pub fn is_full(&self) -> bool {
        self.x_count == self.h_count
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    pub budget: u64,
    /// Range `a` over all of `G(R)` instead of `G_τ(R)/Z(R)`.
    pub full_enumeration: bool,
    /// Only report pairs with `X_{τ,a}(R) = H_{τ_H}(R)`.
    pub require_full: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { budget: ggp::DEFAULT_BUDGET, full_enumeration: false, require_full: false }
    }
}

/// `X_{τ,a}(R)` if `a ∉ HZ`, the point set is nonempty and `X_{τ,a}` is
/// doubly tangential at each point; `None` otherwise.
pub fn doubly_tangential_points<R: Ring>(
    probe: &TangencyProbe<R>,
    units: &[Matrix<R::Elem>],
    require_full: bool,
) -> Result<Option<Vec<Matrix<R::Elem>>>> {
    let x = probe.scheme();
    if is_in_hz(x.stable().ring(), x.a()) {
        return Ok(None);
    }
    let mut pts = Vec::new();
    for y in units {
        if x.contains(y)? {
            pts.push(y.clone());
        } else if require_full {
            return Ok(None);
        }
    }
    if pts.is_empty() {
        return Ok(None);
    }
    for y in &pts {
        if !probe.doubly_tangential(y)? {
            return Ok(None);
        }
    }
    Ok(Some(pts))
}

/// Whether `a ∉ HZ` and `X_{τ,a}(R) = H_{τ_H}(R)` with double tangency at every point.
pub fn is_counterexample<R: Ring>(probe: &TangencyProbe<R>, units: &[Matrix<R::Elem>]) -> Result<bool> {
    Ok(doubly_tangential_points(probe, units, true)?.is_some())
}

/// One element of `G_τ(R)` per class in `G_τ(R)/Z(R)`: the first unit
/// power-basis coordinate is normalized to 1.
pub fn g_tau_mod_center<R: FiniteRing>(st: &StableTau<R>, budget: u64) -> Result<Vec<Matrix<R::Elem>>> {
    let r = st.ring();
    let q = r.cardinality() as u128;
    let dim = st.dim();
    let needed = q.checked_pow(dim as u32).unwrap_or(u128::MAX);
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let mut out = Vec::new();
    let mut c = vec![r.zero(); dim];
    for idx in 0..needed as u64 {
        let mut k = idx;
        for x in c.iter_mut() {
            *x = r.element(k % q as u64);
            k /= q as u64;
        }
        if !c.iter().find(|x| r.is_unit(**x)).is_some_and(|x| r.is_one(*x)) {
            continue;
        }
        let a = st.from_coeffs(&c);
        if r.is_invertible(&a) {
            out.push(a);
        }
    }
    Ok(out)
}

fn search_one_tau<R: FiniteRing>(
    st: &StableTau<R>,
    candidates: &[Matrix<R::Elem>],
    opts: &SearchOptions,
) -> Result<Vec<(Matrix<R::Elem>, usize, usize)>> {
    let r = st.ring();
    let units = st.centralizer_units(opts.budget)?;
    let mut hits = Vec::new();
    for a in candidates {
        if is_in_hz(r, a) {
            continue;
        }
        let x = XScheme::new(st.clone(), a.clone())?;
        if opts.require_full {
            // cheap point test before building the dual-number lifts
            let mut all_in = true;
            for y in &units {
                if !x.contains(y)? {
                    all_in = false;
                    break;
                }
            }
            if !all_in {
                continue;
            }
        }
        if let Some(pts) = doubly_tangential_points(&TangencyProbe::new(x), &units, opts.require_full)? {
            hits.push((a.clone(), pts.len(), units.len()));
        }
    }
    Ok(hits)
}

/// Pairs `(τ, a)` with `a ∉ HZ` such that `X_{τ,a}(R)` is nonempty and
/// `X_{τ,a}` is doubly tangential at each of its points (and, with
/// `require_full`, `X_{τ,a}(R) = H_{τ_H}(R)`).
///
/// `τ` ranges over one representative per coprime charpoly pair. If
/// `a y = h b` then `X_{τ,a} = y X_{τ,b}` and `a ∈ HZ ⇔ b ∈ Z`, so it suffices
/// to let `a` range over `G_τ/Z`; `full_enumeration` ranges over all of `G`.
pub fn counterexample_search<R: FiniteRing>(
    r: &R,
    rank: usize,
    opts: SearchOptions,
) -> Result<Vec<Counterexample<R::Elem>>> {
    if rank < 2 {
        return Err(Error::PreconditionFailed("rank must be at least 2".into()));
    }
    let pairs = ggp::coprime_pairs(r, rank - 1, opts.budget)?;
    let full = if opts.full_enumeration {
        let needed = r.matrix_count(rank).saturating_mul(pairs.len() as u128);
        if needed > opts.budget as u128 {
            return Err(Error::BudgetExceeded { needed, budget: opts.budget });
        }
        Some(r.general_linear_group(rank))
    } else {
        let needed = (pairs.len() as u128).saturating_mul((r.cardinality() as u128).pow(rank as u32));
        if needed > opts.budget as u128 {
            return Err(Error::BudgetExceeded { needed, budget: opts.budget });
        }
        None
    };
    let per_pair: Vec<Result<Vec<Counterexample<R::Elem>>>> = pairs
        .par_iter()
        .map(|(p, ph)| {
            let tau = ggp::construct_tau(r, p, ph)?;
            let st = StableTau::new(r.clone(), tau.clone())?;
            let candidates = match &full {
                Some(g) => g.clone(),
                None => g_tau_mod_center(&st, opts.budget)?,
            };
            Ok(search_one_tau(&st, &candidates, &opts)?
                .into_iter()
                .map(|(a, x_count, h_count)| Counterexample {
                    p_tau: p.clone(),
                    p_tau_h: ph.clone(),
                    tau: tau.clone(),
                    a,
                    x_count,
                    h_count,
                })
                .collect())
        })
        .collect();
    let mut out = Vec::new();
    for h in per_pair {
        out.extend(h?);
    }
    Ok(out)
}

/// Re-runs the point and tangency checks on a reported pair.
pub fn replay_counterexample<R: FiniteRing>(r: &R, hit: &Counterexample<R::Elem>, budget: u64) -> Result<bool> {
    let st = StableTau::new(r.clone(), hit.tau.clone())?;
    let units = st.centralizer_units(budget)?;
    let probe = TangencyProbe::new(XScheme::new(st, hit.a.clone())?);
    Ok(match doubly_tangential_points(&probe, &units, hit.is_full())? {
        Some(pts) => pts.len() == hit.x_count && units.len() == hit.h_count,
        None => false,
    })
}

/// Evaluates the Cramer defect on the full grid `R^n` of centralizer
/// coordinates. When `|R| > n+1` this decides scheme equality, since the
/// defect has degree at most `n+1` in each coordinate.
pub fn cramer_defect_vanishes_on_grid<R: FiniteRing>(x: &XScheme<R>) -> bool {
    let r = x.stable().ring();
    let n = x.stable().n();
    let q = r.cardinality();
    let zero = r.zero_matrix(n + 1);
    let mut coeffs = vec![r.zero(); n];
    (0..q.pow(n as u32)).all(|idx| {
        let mut k = idx;
        for c in coeffs.iter_mut() {
            *c = r.element(k % q);
            k /= q;
        }
        x.cramer_defect(&x.stable().h_element(&coeffs)) == zero
    })
}

/// Certifies `X_{τ,a} = H_{τ_H}` as schemes over a finite field.
///
/// The Cramer defect has degree at most `n+1` in each centralizer coordinate,
/// so it vanishes identically iff it vanishes on a grid `S^n` with `|S| > n+1`.
/// Fields that are too small are replaced by their quadratic extension.
pub fn certify_scheme_equality(field: &GaloisField, tau: &Matrix<u64>, a: &Matrix<u64>) -> Result<bool> {
    let n = tau.dim() - 1;
    let (big, embed): (GaloisField, fn(u64) -> u64) = if field.cardinality() > (n + 1) as u64 {
        (*field, |x| x)
    } else if field.degree() == 1 && field.p().pow(2) > (n + 1) as u64 {
        // the prime field sits inside F_{p^2} as the codes 0..p
        (GaloisField::new(field.p(), 2)?, |x| x)
    } else {
        return Err(Error::PreconditionFailed("no field large enough for a grid certificate".into()));
    };
    let st = StableTau::new(big, tau.map(embed))?;
    Ok(cramer_defect_vanishes_on_grid(&XScheme::new(st, a.map(embed))?))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Gl6Report {
    pub p: u64,
    pub alpha: u64,
    pub a0: u64,
    pub b0: u64,
    pub a1: u64,
    pub a0_b0_vanish: bool,
    pub a1_is_minus_alpha: bool,
    pub mu_one_h_is_one: bool,
    pub mu_tau_h_diagonal: bool,
    pub mu_tau_h_annihilated: bool,
    pub center_in_x: bool,
    /// Centralizer coordinates of a point of `H_{τ_H}` outside `X_{τ,a}`.
    pub outside_point: Option<Vec<u64>>,
}

impl Gl6Report {
    pub fn all_hold(&self) -> bool {
        self.a0_b0_vanish
            && self.a1_is_minus_alpha
            && self.mu_one_h_is_one
            && self.mu_tau_h_diagonal
            && self.mu_tau_h_annihilated
            && self.center_in_x
            && self.outside_point.is_some()
    }
}

/// The rank-6 example `τ = diag(0,1,2,2α,1+2α,2+2α)`, `a = diag(1,1,1,-1,-1,-1)`,
/// `e* = (1,…,1)`, `e = (1/6)(1,…,1)` over `F_p` with `α² = 2`, moved into the
/// standard frame by `g` with rows `e_i - e_6` (i < 6) and `(1,…,1)`.
pub fn gl6_witness(p: u64, alpha: u64) -> Result<Gl6Report> {
    let r = LocalRing::new(p, 1)?;
    let al = r.elem(alpha);
    if r.mul(al, al) != r.elem(2) || !r.is_unit(r.elem(6)) || !r.is_unit(al) {
        return Err(Error::PreconditionFailed(format!("{alpha} is not an invertible square root of 2 mod {p}")));
    }
    let two_al = r.add(al, al);
    let diag: Vec<_> = [0, 1, 2].iter().map(|&k| r.elem(k)).chain([0, 1, 2].iter().map(|&k| r.add(two_al, r.elem(k)))).collect();
    let tau_remark = r.diagonal(&diag);
    let a_remark = r.diagonal(&[1, 1, 1, -1, -1, -1].map(|k| r.elem_i64(k)));
    let g = Matrix::from_fn(6, |i, j| {
        if i == 5 || i == j {
            r.one()
        } else if j == 5 {
            r.elem_i64(-1)
        } else {
            r.zero()
        }
    });
    let g_inv = r.mat_inverse(&g)?;
    let conj = |m: &Matrix<_>| r.mat_mul(&r.mat_mul(&g, m), &g_inv);
    let tau = conj(&tau_remark);
    let a = conj(&a_remark);
    let st = StableTau::new(r, tau)?;
    let x = XScheme::new(st.clone(), a)?;
    let (av, bv) = x.ab_invariants(1);
    let one = r.identity(6);
    let tau_h = st.tau_h();
    let (mu_one_h, _) = x.mu_nu(&ggp::one_h(&r, 6));
    let (mu_tau_h, _) = x.mu_nu(&tau_h);
    let expected: Vec<_> = (0..6).map(|i| r.add(al, r.elem((i % 3) as u64))).collect();
    let p_tau_h = r.charpoly(&ggp::h_block(st.tau()))?;
    let center_in_x = (1..p).all(|z| {
        let y = st.h_element(&[r.elem(z), r.zero(), r.zero(), r.zero(), r.zero()]);
        x.contains(&y).unwrap_or(false)
    });
    let mut outside_point = None;
    let mut coeffs = vec![r.zero(); 5];
    for idx in 0..p.pow(5) {
        let mut k = idx;
        for c in coeffs.iter_mut() {
            *c = r.elem(k % p);
            k /= p;
        }
        let y = st.h_element(&coeffs);
        if r.is_invertible(&y) && !x.contains(&y)? {
            outside_point = Some(coeffs.iter().map(|c| c.value()).collect());
            break;
        }
    }
    Ok(Gl6Report {
        p,
        alpha,
        a0: av[0].value(),
        b0: bv[0].value(),
        a1: av[1].value(),
        a0_b0_vanish: r.is_zero(av[0]) && r.is_zero(bv[0]),
        a1_is_minus_alpha: av[1] == r.neg(al),
        mu_one_h_is_one: mu_one_h == one,
        mu_tau_h_diagonal: mu_tau_h == conj(&r.diagonal(&expected)),
        mu_tau_h_annihilated: r.poly_at_matrix(&p_tau_h, &mu_tau_h) == r.zero_matrix(6),
        center_in_x,
        outside_point,
    })
}

/// Tangency of `X_{τ,a}` at the identity for `a ∈ G_τ`, against centrality of `a²` and `a`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TangentialRecord {
    pub id: u64,
    pub p: u64,
    pub m: u32,
    pub seed: Option<u64>,
    pub p_tau: Vec<u64>,
    pub p_tau_h: Vec<u64>,
    pub a: Vec<u64>,
    pub tangential: bool,
    pub a_sq_central: bool,
    pub doubly_tangential: bool,
    pub a_central: bool,
}

impl TangentialRecord {
    pub fn agrees(&self) -> bool {
        self.tangential == self.a_sq_central && self.doubly_tangential == self.a_central
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TangentialMode {
    /// Every charpoly pair and every `a ∈ G_τ`.
    Exhaustive,
    /// Random pairs; `a` is drawn uniformly from `G_τ`, from `{a : a² ∈ Z}`
    /// or from `{a : a ≡ z mod p}` in rotation.
    Seeded { samples: usize, seed: u64 },
}

fn tangential_record(
    st: &StableTau<LocalRing>,
    a: &Matrix<crate::ring::Residue>,
    id: u64,
    seed: Option<u64>,
) -> Result<TangentialRecord> {
    let r = st.ring();
    let probe = TangencyProbe::new(XScheme::new(st.clone(), a.clone())?);
    let one = r.identity(st.dim());
    let tangential = probe.tangential(&one)?;
    Ok(TangentialRecord {
        id,
        p: r.p(),
        m: r.m(),
        seed,
        p_tau: r.poly_codes(&r.charpoly(st.tau())?),
        p_tau_h: r.poly_codes(&r.charpoly(&ggp::h_block(st.tau()))?),
        a: r.matrix_codes(a).concat(),
        tangential,
        a_sq_central: r.is_scalar_matrix(&r.mat_mul(a, a)),
        doubly_tangential: tangential && probe.doubly_tangential(&one)?,
        a_central: r.is_scalar_matrix(a),
    })
}

/// Tangency at `1` for `a ∈ G_τ`, which should hold iff `a²` is central, and
/// double tangency, which should hold iff `a` is central.
pub fn tangential_sweep(r: &LocalRing, rank: usize, mode: TangentialMode, budget: u64) -> Result<Vec<TangentialRecord>> {
    if r.p() == 2 {
        return Err(Error::CharacteristicTwo);
    }
    let n = rank - 1;
    let mut out = match mode {
        TangentialMode::Exhaustive => {
            let pairs = ggp::coprime_pairs(r, n, budget)?;
            let per: Vec<Result<Vec<TangentialRecord>>> = pairs
                .par_iter()
                .enumerate()
                .map(|(i, (p, ph))| {
                    let st = StableTau::new(r.clone(), ggp::construct_tau(r, p, ph)?)?;
                    let g = ggp::centralizer_group(r, st.tau(), budget)?;
                    let base = (i as u64) << 32;
                    g.iter().enumerate().map(|(j, a)| tangential_record(&st, a, base + j as u64, None)).collect()
                })
                .collect();
            let mut out = Vec::new();
            for v in per {
                out.extend(v?);
            }
            out
        }
        TangentialMode::Seeded { samples, seed } => (0..samples)
            .into_par_iter()
            .map(|i| {
                let s = seed.wrapping_add(i as u64);
                let mut rng = ChaCha8Rng::seed_from_u64(s);
                let (p, ph) = ggp::random_coprime_pair(r, n, &mut rng);
                let st = StableTau::new(r.clone(), ggp::construct_tau(r, &p, &ph)?)?;
                let g = ggp::centralizer_group(r, st.tau(), budget)?;
                let residue = LocalRing::new(r.p(), 1)?;
                let pool: Vec<&Matrix<_>> = match i % 3 {
                    0 => g.iter().collect(),
                    1 => g.iter().filter(|a| r.is_scalar_matrix(&r.mat_mul(a, a))).collect(),
                    _ => g
                        .iter()
                        .filter(|a| residue.is_scalar_matrix(&a.map(|x| residue.elem(x.value()))))
                        .collect(),
                };
                let a = pool[rng.gen_range(0..pool.len())];
                tangential_record(&st, a, i as u64, Some(s))
            })
            .collect::<Result<Vec<_>>>()?,
    };
    out.sort_by_key(|t| t.id);
    Ok(out)
}

/// One `(τ, a)` instance of the transversality check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransversalityRecord {
    pub id: u64,
    pub p_tau: Vec<u64>,
    pub p_tau_h: Vec<u64>,
    pub a: Vec<u64>,
    pub x_count: usize,
    pub h_count: usize,
    /// Every point of `X_{τ,a}(R)` is doubly tangential.
    pub doubly_tangential_everywhere: bool,
}

impl TransversalityRecord {
    /// `X_{τ,a}(R) = H_{τ_H}(R)` with double tangency at every point.
    pub fn is_exception(&self) -> bool {
        self.x_count == self.h_count && self.doubly_tangential_everywhere
    }
}

/// For every charpoly pair and every `a` in a set of representatives of the
/// non-trivial classes of `H\G/Z`, the size of `X_{τ,a}(R)` and whether it
/// is doubly tangential at each point.
pub fn transversality_sweep(r: &LocalRing, rank: usize, budget: u64) -> Result<Vec<TransversalityRecord>> {
    let pairs = ggp::coprime_pairs(r, rank - 1, budget)?;
    let reps: Vec<_> = ggp::h_coset_representatives(r, rank, budget)?.into_iter().filter(|a| !is_in_hz(r, a)).collect();
    let per: Vec<Result<Vec<TransversalityRecord>>> = pairs
        .par_iter()
        .enumerate()
        .map(|(i, (p, ph))| {
            let st = StableTau::new(r.clone(), ggp::construct_tau(r, p, ph)?)?;
            let units = st.centralizer_units(budget)?;
            reps.iter()
                .enumerate()
                .map(|(j, a)| {
                    let probe = TangencyProbe::new(XScheme::new(st.clone(), a.clone())?);
                    let mut pts = Vec::new();
                    for y in &units {
                        if probe.scheme().contains(y)? {
                            pts.push(y);
                        }
                    }
                    let mut all = true;
                    for y in &pts {
                        if !probe.doubly_tangential(y)? {
                            all = false;
                            break;
                        }
                    }
                    Ok(TransversalityRecord {
                        id: (i * reps.len() + j) as u64,
                        p_tau: r.poly_codes(p),
                        p_tau_h: r.poly_codes(ph),
                        a: r.matrix_codes(a).concat(),
                        x_count: pts.len(),
                        h_count: units.len(),
                        doubly_tangential_everywhere: all,
                    })
                })
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    for v in per {
        out.extend(v?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ggp::{all_stable, coprime_pairs, construct_tau, embed_h, random_coprime_pair, DEFAULT_BUDGET};
    use crate::poly::PolyOps;
    use crate::ring::Residue;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f(p: u64) -> LocalRing {
        LocalRing::new(p, 1).unwrap()
    }

    fn stable_from_pair(r: &LocalRing, seed: u64) -> StableTau<LocalRing> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, ph) = random_coprime_pair(r, 2, &mut rng);
        StableTau::new(*r, construct_tau(r, &p, &ph).unwrap()).unwrap()
    }

    #[test]
    fn membership_examples() {
        let r = LocalRing::new(3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        for s in 0..20 {
            let st = stable_from_pair(&r, s);
            let h = embed_h(&r, &r.random_invertible(2, &mut rng));
            let z = r.scalar_matrix(3, r.random_unit(&mut rng));
            assert!(in_h_gtau(&st, &r.mat_mul(&h, &z)).unwrap());
            let b = loop {
                let b = st.from_coeffs(&[r.random_unit(&mut rng), r.elem(3), r.random_element(&mut rng)]);
                if r.is_invertible(&b) {
                    break b;
                }
            };
            assert!(in_h_gtau(&st, &b).unwrap());
            assert_eq!(decompose_h_gtau(&st, &r.identity(3)).unwrap(), HGtauDecomposition { h: r.identity(3), b: r.identity(3) });
            let d = decompose_h_gtau(&st, &z).unwrap();
            assert_eq!((d.h, d.b), (r.identity(3), z.clone()));
            let d = decompose_h_gtau(&st, &r.mat_mul(&h, &b)).unwrap();
            assert_eq!((d.h, d.b), (h, b));
        }
    }

    fn brute_force_factorizations(st: &StableTau<LocalRing>, g: &Matrix<Residue>, h_all: &[Matrix<Residue>], gt: &[Matrix<Residue>]) -> usize {
        let r = st.ring();
        h_all.iter().map(|h| gt.iter().filter(|b| r.mat_mul(h, b) == *g).count()).sum()
    }

    #[test]
    fn membership_matches_brute_force_f3() {
        let r = f(3);
        let h_all: Vec<_> = r.general_linear_group(2).iter().map(|a| embed_h(&r, a)).collect();
        let gl3 = r.general_linear_group(3);
        for s in 0..4 {
            let st = stable_from_pair(&r, 100 + s);
            let gt = ggp::centralizer_group(&r, st.tau(), DEFAULT_BUDGET).unwrap();
            for g in gl3.iter().step_by(37) {
                let count = brute_force_factorizations(&st, g, &h_all, &gt);
                assert!(count <= 1);
                assert_eq!(in_h_gtau(&st, g).unwrap(), count == 1);
            }
        }
    }

    #[test]
    fn decomposition_unique_over_z9() {
        let r = LocalRing::new(3, 2).unwrap();
        let f3 = f(3);
        let h_all: Vec<_> = f3.general_linear_group(2).iter().map(|a| embed_h(&f3, a)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for s in 0..200 {
            let st = stable_from_pair(&r, 200 + s);
            let h = embed_h(&r, &r.random_invertible(2, &mut rng));
            let b = loop {
                let b = st.from_coeffs(&[r.random_unit(&mut rng), r.random_element(&mut rng), r.random_element(&mut rng)]);
                if r.is_invertible(&b) {
                    break b;
                }
            };
            let g = r.mat_mul(&h, &b);
            let d = decompose_h_gtau(&st, &g).unwrap();
            assert_eq!(r.mat_mul(&d.h, &d.b), g);
            if s % 20 == 0 {
                // uniqueness at the residue field by exhaustion
                let red = |m: &Matrix<Residue>| m.map(|x| f3.elem(x.value()));
                let st3 = StableTau::new(f3, red(st.tau())).unwrap();
                let gt = ggp::centralizer_group(&f3, st3.tau(), DEFAULT_BUDGET).unwrap();
                assert_eq!(brute_force_factorizations(&st3, &red(&g), &h_all, &gt), 1);
            }
        }
    }

    #[test]
    fn scheme_equation_examples() {
        let r = LocalRing::new(5, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for s in 0..20 {
            let st = stable_from_pair(&r, 300 + s);
            let units = st.centralizer_units(DEFAULT_BUDGET).unwrap();
            let z = r.scalar_matrix(3, r.random_unit(&mut rng));
            let xz = XScheme::new(st.clone(), z).unwrap();
            for y in units.iter().step_by(5) {
                assert_eq!(xz.f(y).unwrap(), r.identity(3));
            }
            let a = st.from_coeffs(&[r.random_unit(&mut rng), r.random_element(&mut rng), r.random_element(&mut rng)]);
            if r.is_invertible(&a) {
                let xa = XScheme::new(st.clone(), a.clone()).unwrap();
                assert_eq!(xa.f(&r.identity(3)).unwrap(), r.identity(3));
            }
            // Cramer form agrees with f·det
            let a = r.random_invertible(3, &mut rng);
            let x = XScheme::new(st.clone(), a).unwrap();
            for y in &units {
                let (lhs, d) = x.cramer(y);
                assert_eq!(lhs, r.mat_scale(d, &x.f(y).unwrap()));
                assert_eq!(x.contains(y).unwrap(), x.f(y).unwrap() == r.identity(3));
                // f(y) = μ(y) ν(y⁻¹) when a ∈ G_τ is not needed here; checked below
            }
        }
    }

    #[test]
    fn f_factors_through_mu_nu() {
        let r = LocalRing::new(5, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for s in 0..20 {
            let st = stable_from_pair(&r, 400 + s);
            let a = loop {
                let a = st.from_coeffs(&[r.random_element(&mut rng), r.random_element(&mut rng), r.random_element(&mut rng)]);
                if r.is_invertible(&a) {
                    break a;
                }
            };
            let x = XScheme::new(st.clone(), a).unwrap();
            for y in st.centralizer_units(DEFAULT_BUDGET).unwrap().iter().step_by(3) {
                let (mu, _) = x.mu_nu(y);
                let (_, nu) = x.mu_nu(&r.mat_inverse(y).unwrap());
                assert_eq!(x.f(y).unwrap(), r.mat_mul(&mu, &nu));
            }
        }
    }

    /// Finite differences along random lines bound the degree of the Cramer defect.
    fn max_degree_along_lines(x: &XScheme<LocalRing>, rng: &mut ChaCha8Rng) -> usize {
        let r = x.stable().ring();
        let p = r.modulus() as usize;
        let mut best = 0;
        for _ in 0..20 {
            let u: Vec<_> = (0..2).map(|_| r.random_element(rng)).collect();
            let v: Vec<_> = (0..2).map(|_| r.random_element(rng)).collect();
            let vals: Vec<Matrix<Residue>> = (0..p)
                .map(|t| {
                    let c: Vec<_> = (0..2).map(|i| r.add(u[i], r.mul(r.elem(t as u64), v[i]))).collect();
                    x.cramer_defect(&x.stable().h_element(&c))
                })
                .collect();
            // degree = largest k with nonzero k-th difference
            let mut diffs = vals;
            for k in 0..p {
                if diffs.iter().any(|m| *m != r.zero_matrix(3)) {
                    best = best.max(k);
                }
                diffs = diffs.windows(2).map(|w| r.mat_sub(&w[1], &w[0])).collect();
                if diffs.is_empty() {
                    break;
                }
            }
        }
        best
    }

    #[test]
    fn cramer_defect_degree() {
        let r = LocalRing::new(7, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let mut saw_top = false;
        for s in 0..30 {
            let st = stable_from_pair(&r, 500 + s);
            let a = r.random_invertible(3, &mut rng);
            let x = XScheme::new(st, a).unwrap();
            let deg = max_degree_along_lines(&x, &mut rng);
            let (_, bv) = x.ab_invariants(0);
            assert!(deg <= 3);
            if r.is_zero(bv[0]) {
                assert!(deg <= 2);
            }
            saw_top |= deg == 3;
        }
        assert!(saw_top);
    }

    #[test]
    fn x_counts_match_triple_loop_f3() {
        let r = f(3);
        let h_all: Vec<_> = r.general_linear_group(2).iter().map(|a| embed_h(&r, a)).collect();
        let reps = ggp::h_coset_representatives(&r, 3, DEFAULT_BUDGET).unwrap();
        for s in 0..3 {
            let st = stable_from_pair(&r, 600 + s);
            let gt = ggp::centralizer_group(&r, st.tau(), DEFAULT_BUDGET).unwrap();
            for a in reps.iter().step_by(11) {
                let x = XScheme::new(st.clone(), a.clone()).unwrap();
                let (pts, total) = enumerate_x_points(&x, DEFAULT_BUDGET).unwrap();
                let units = st.centralizer_units(DEFAULT_BUDGET).unwrap();
                assert_eq!(total, units.len());
                let brute = units
                    .iter()
                    .filter(|y| brute_force_factorizations(&st, &r.mat_mul(a, y), &h_all, &gt) > 0)
                    .count();
                assert_eq!(pts.len(), brute);
                if is_in_hz(&r, a) {
                    assert_eq!(pts.len(), total);
                } else {
                    assert!(pts.len() < total);
                }
            }
        }
    }

    #[test]
    fn x_is_invariant_under_h_and_z() {
        let r = f(3);
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        for s in 0..10 {
            let st = stable_from_pair(&r, 700 + s);
            let a = r.random_invertible(3, &mut rng);
            let h = embed_h(&r, &r.random_invertible(2, &mut rng));
            let z = r.scalar_matrix(3, r.elem(2));
            let haz = r.mat_mul(&r.mat_mul(&h, &a), &z);
            let p1 = enumerate_x_points(&XScheme::new(st.clone(), a).unwrap(), DEFAULT_BUDGET).unwrap().0;
            let p2 = enumerate_x_points(&XScheme::new(st.clone(), haz).unwrap(), DEFAULT_BUDGET).unwrap().0;
            assert_eq!(p1, p2);
        }
    }

    fn a_in_g_tau(st: &StableTau<LocalRing>) -> Vec<Matrix<Residue>> {
        ggp::centralizer_group(st.ring(), st.tau(), DEFAULT_BUDGET).unwrap()
    }

    #[test]
    fn four_way_equivalence() {
        for p in [3, 5] {
            let r = f(p);
            let pairs = coprime_pairs(&r, 2, DEFAULT_BUDGET).unwrap();
            let step = if p == 3 { 1 } else { 41 };
            for (pp, ph) in pairs.iter().step_by(step) {
                let st = StableTau::new(r, construct_tau(&r, pp, ph).unwrap()).unwrap();
                for a in a_in_g_tau(&st) {
                    let x = XScheme::new(st.clone(), a.clone()).unwrap();
                    let a_inv = x.a_inv().clone();
                    let tangential = tangency_test(&x, &r.identity(3)).unwrap();
                    let mu_eq_nu = st.h_basis().iter().all(|u| {
                        let (m, n) = x.mu_nu(u);
                        m == n
                    });
                    let (av, bv) = x.ab_invariants(2);
                    let ab = (0..=2).all(|j| r.mat_scale(av[j], &a_inv) == r.mat_scale(bv[j], &a));
                    let sq = r.is_scalar_matrix(&r.mat_mul(&a, &a));
                    assert_eq!(tangential, sq);
                    assert_eq!(mu_eq_nu, sq);
                    assert_eq!(ab, sq);
                }
            }
        }
    }

    #[test]
    fn mu_nu_identities() {
        let r = LocalRing::new(5, 1).unwrap();
        for s in 0..15 {
            let st = stable_from_pair(&r, 800 + s);
            let one_h = ggp::one_h(&r, 3);
            for a in a_in_g_tau(&st).iter().step_by(9) {
                let x = XScheme::new(st.clone(), a.clone()).unwrap();
                let (av, bv) = x.ab_invariants(2);
                let (mu1, _) = x.mu_nu(&one_h);
                assert_eq!(mu1, r.mat_sub(&r.identity(3), &r.mat_scale(av[0], x.a_inv())));
                let (_, nu1) = x.mu_nu(&one_h);
                assert_eq!(nu1, r.mat_sub(&r.identity(3), &r.mat_scale(bv[0], a)));
                // μ(τ_H^j) - ν(τ_H^j) = Σ_{i≤j} c_ij (B_i a - A_i a⁻¹) with c_jj = 1
                let d: Vec<_> = (0..2).map(|i| r.mat_sub(&r.mat_scale(bv[i], a), &r.mat_scale(av[i], x.a_inv()))).collect();
                for (j, u) in st.h_basis().iter().enumerate() {
                    let (m, n) = x.mu_nu(u);
                    let lhs = r.mat_sub(&m, &n);
                    // c_ij range over M_τ
                    let found = if j == 0 {
                        lhs == d[0]
                    } else {
                        (0..125u64).any(|k| {
                            let c = st.from_coeffs(&[r.elem(k % 5), r.elem(k / 5 % 5), r.elem(k / 25)]);
                            r.mat_add(&r.mat_mul(&c, &d[0]), &d[1]) == lhs
                        })
                    };
                    assert!(found, "j = {j}");
                }
            }
            let x = XScheme::new(st.clone(), r.identity(3)).unwrap();
            for u in st.h_basis() {
                let (m, n) = x.mu_nu(u);
                assert_eq!(m, n);
            }
        }
    }

    #[test]
    fn tangency_basis_check_is_complete_f3() {
        // compare against all first-order lifts y + ε w, w ∈ M_{H,τ_H}
        let r = f(3);
        let d = DualRing::new(r);
        let reps = ggp::h_coset_representatives(&r, 3, DEFAULT_BUDGET).unwrap();
        for s in 0..3 {
            let st = stable_from_pair(&r, 900 + s);
            for a in reps.iter().step_by(5) {
                let x = XScheme::new(st.clone(), a.clone()).unwrap();
                let probe = TangencyProbe::new(x.clone());
                let xd = x.lift_to(&d);
                for y in enumerate_x_points(&x, DEFAULT_BUDGET).unwrap().0 {
                    let mut all = true;
                    for c0 in 0..3 {
                        for c1 in 0..3 {
                            let w = r.combination(&[r.elem(c0), r.elem(c1)], st.h_basis());
                            let lifted = Matrix::from_fn(3, |i, j| d.make(y.get(i, j), w.get(i, j)));
                            all &= xd.f(&lifted).unwrap() == d.identity(3);
                        }
                    }
                    assert_eq!(all, probe.tangential(&y).unwrap());
                }
            }
        }
    }

    #[test]
    fn tangency_at_general_points() {
        // tangential at y iff b² central, where a y = h b
        let r = f(3);
        let reps = ggp::h_coset_representatives(&r, 3, DEFAULT_BUDGET).unwrap();
        let pairs = coprime_pairs(&r, 2, DEFAULT_BUDGET).unwrap();
        for (pp, ph) in pairs.iter().step_by(13) {
            let st = StableTau::new(r, construct_tau(&r, pp, ph).unwrap()).unwrap();
            for a in &reps {
                let x = XScheme::new(st.clone(), a.clone()).unwrap();
                let probe = TangencyProbe::new(x.clone());
                for y in enumerate_x_points(&x, DEFAULT_BUDGET).unwrap().0 {
                    let dec = decompose_h_gtau(&st, &r.mat_mul(a, &y)).unwrap();
                    let sq = r.is_scalar_matrix(&r.mat_mul(&dec.b, &dec.b));
                    let report = probe.report(&y).unwrap();
                    assert_eq!(report.tangential, sq);
                    assert!(!report.doubly_tangential || report.tangential);
                    if let Some(w) = report.witness {
                        assert!(probe.replay(&y, w).unwrap());
                    }
                    // translation covariance: X_{τ,a} = y X_{τ,b}
                    if y == st.centralizer_units(DEFAULT_BUDGET).unwrap()[0] {
                        continue;
                    }
                }
            }
        }
    }

    #[test]
    fn translation_covariance() {
        let r = f(3);
        let reps = ggp::h_coset_representatives(&r, 3, DEFAULT_BUDGET).unwrap();
        for s in 0..4 {
            let st = stable_from_pair(&r, 1000 + s);
            for a in reps.iter().step_by(3) {
                let x = XScheme::new(st.clone(), a.clone()).unwrap();
                let pts = enumerate_x_points(&x, DEFAULT_BUDGET).unwrap().0;
                let Some(y) = pts.first() else { continue };
                let b = decompose_h_gtau(&st, &r.mat_mul(a, y)).unwrap().b;
                let xb = XScheme::new(st.clone(), b).unwrap();
                let mut shifted: Vec<_> = enumerate_x_points(&xb, DEFAULT_BUDGET).unwrap().0.iter().map(|z| r.mat_mul(y, z)).collect();
                let mut orig = pts.clone();
                shifted.sort_by_key(|m| r.matrix_codes(m));
                orig.sort_by_key(|m| r.matrix_codes(m));
                assert_eq!(shifted, orig);
            }
        }
    }

    #[test]
    fn double_tangency_at_one() {
        for p in [3, 5] {
            let r = f(p);
            let pairs = coprime_pairs(&r, 2, DEFAULT_BUDGET).unwrap();
            let step = if p == 3 { 3 } else { 97 };
            for (pp, ph) in pairs.iter().step_by(step) {
                let st = StableTau::new(r, construct_tau(&r, pp, ph).unwrap()).unwrap();
                for a in a_in_g_tau(&st) {
                    let x = XScheme::new(st.clone(), a.clone()).unwrap();
                    assert_eq!(double_tangency_test(&x, &r.identity(3)).unwrap(), r.is_scalar_matrix(&a));
                }
            }
        }
    }

    #[test]
    fn homomorphism_defect_identities() {
        let r = LocalRing::new(3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        for s in 0..20 {
            let st = stable_from_pair(&r, 1100 + s);
            let z = r.scalar_matrix(3, r.random_unit(&mut rng));
            let x = XScheme::new(st.clone(), z).unwrap();
            for u1 in st.h_basis() {
                for u2 in st.h_basis() {
                    assert_eq!(x.homomorphism_defect(u1, u2), r.zero_matrix(3));
                }
            }
            let a = loop {
                let a = st.from_coeffs(&[r.random_element(&mut rng), r.random_element(&mut rng), r.random_element(&mut rng)]);
                if r.is_invertible(&a) {
                    break a;
                }
            };
            let x = XScheme::new(st.clone(), a.clone()).unwrap();
            let (av, _) = x.ab_invariants(0);
            let one_h = ggp::one_h(&r, 3);
            let (mu, _) = x.mu_nu(&one_h);
            let lhs = r.mat_scale(av[0], &r.mat_sub(&a, &r.scalar_matrix(3, av[0])));
            let a2 = r.mat_mul(&a, &a);
            let rhs = r.mat_mul(&a2, &r.mat_sub(&mu, &r.mat_mul(&mu, &mu)));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn commutator_with_one_h_escapes() {
        // [x, 1_H] ∉ M_H + M_τ for x ∈ M_τ - R
        for p in [3, 5] {
            let r = f(p);
            let step = if p == 3 { 5 } else { 211 };
            let stable = all_stable(&r, 3, DEFAULT_BUDGET).unwrap();
            for t in stable.iter().step_by(step) {
                let basis = ggp::centralizer_basis(&r, t).unwrap();
                let mut span: Vec<Vec<Residue>> = basis.iter().map(|m| m.entries().to_vec()).collect();
                for i in 0..2 {
                    for j in 0..2 {
                        let mut m = r.zero_matrix(3);
                        m.set(i, j, r.one());
                        span.push(m.entries().to_vec());
                    }
                }
                let base_rank = r.residue_rank(&span);
                let one_h = ggp::one_h(&r, 3);
                for c1 in 0..p {
                    for c2 in 0..p {
                        if c1 == 0 && c2 == 0 {
                            continue;
                        }
                        let x = r.combination(&[r.zero(), r.elem(c1), r.elem(c2)], &basis);
                        let mut ext = span.clone();
                        ext.push(r.commutator(&x, &one_h).entries().to_vec());
                        assert_eq!(r.residue_rank(&ext), base_rank + 1);
                    }
                }
            }
        }
    }

    #[test]
    fn rank_two_antidiagonal() {
        let r = f(5);
        let t = r.matrix_from_i64(&[&[0, 1], &[1, 0]]);
        let st = StableTau::new(r, t.clone()).unwrap();
        let x = XScheme::new(st.clone(), t.clone()).unwrap();
        let (pts, total) = enumerate_x_points(&x, DEFAULT_BUDGET).unwrap();
        assert_eq!(pts.len(), total);
        assert_eq!(total, 4);
        for y in &pts {
            let y1 = y.get(0, 0);
            let d = decompose_h_gtau(&st, &r.mat_mul(&t, y)).unwrap();
            assert_eq!(d.h, r.diagonal(&[r.inverse(y1).unwrap(), r.one()]));
            assert_eq!(d.b, Matrix::from_fn(2, |i, j| if i != j { y1 } else { r.zero() }));
        }
        let probe = TangencyProbe::new(x);
        assert!(is_counterexample(&probe, &pts).unwrap());
    }

    #[test]
    fn search_is_empty_for_f3_rank3() {
        let f3 = GaloisField::new(3, 1).unwrap();
        assert!(counterexample_search(&f3, 3, SearchOptions::default()).unwrap().is_empty());
    }

    #[test]
    fn search_rank2_f5_contains_antidiagonal_class() {
        let f5 = GaloisField::new(5, 1).unwrap();
        let hits = counterexample_search(&f5, 2, SearchOptions::default()).unwrap();
        assert!(!hits.is_empty());
        // full enumeration over G finds the same charpoly pairs
        let full = counterexample_search(&f5, 2, SearchOptions { full_enumeration: true, ..Default::default() }).unwrap();
        let key = |h: &Counterexample<u64>| (h.p_tau.clone(), h.p_tau_h.clone());
        let a: std::collections::BTreeSet<_> = hits.iter().map(|h| format!("{:?}", key(h))).collect();
        let b: std::collections::BTreeSet<_> = full.iter().map(|h| format!("{:?}", key(h))).collect();
        assert_eq!(a, b);
        // X²-1 with P_H = X is the antidiagonal class
        let anti = (f5.from_roots(&[1, 4]), MonicPoly::new(vec![0]));
        assert!(hits.iter().any(|h| key(h) == anti && h.is_full()));
        assert!(hits.iter().all(|h| replay_counterexample(&f5, h, DEFAULT_BUDGET).unwrap()));
    }

    #[test]
    fn gl6_witness_holds() {
        let rep = gl6_witness(17, 6).unwrap();
        assert_eq!((rep.a0, rep.b0), (0, 0));
        assert_eq!(rep.a1, 17 - 6);
        assert!(rep.all_hold(), "{rep:?}");
        assert!(gl6_witness(17, 5).is_err());
    }
}
