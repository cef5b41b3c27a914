//! Depth-`q²` characters `χ_τ`, the groups `J_τ`, principal-series descriptors
//! and Mackey counts.
//!
//! Character values are additive exponents in `Z/p^k`: the exponent `t`
//! stands for `ψ₀^t` with `ψ₀` a fixed primitive `p^k`-th root of unity.

use crate::error::{Error, Result};
use crate::ggp::{self, embed_h, StableTau};
use crate::matrix::{MatEnum, MatOps, Matrix};
use crate::poly::{MonicPoly, PolyEnum, PolyOps};
use crate::ring::{FiniteRing, LocalRing, Residue, Ring};
use crate::volume::{flat_codes, ser_ratio, Rational};
use num_rational::Ratio;
use num_traits::One;
use serde::Serialize;
use std::collections::{HashMap, HashSet};

/// `o/q² = Z/p^{2k}` together with `o/q = Z/p^k` and the exponent map of `ψ`.
#[derive(Clone, Debug)]
pub struct DepthFrame {
    ring: LocalRing,
    residue: LocalRing,
    k: u32,
}

impl DepthFrame {
    pub fn new(p: u64, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::PreconditionFailed("depth exponent k must be at least 1".into()));
        }
        let frame = DepthFrame { ring: LocalRing::new(p, 2 * k)?, residue: LocalRing::new(p, k)?, k };
        debug_assert!(frame.psi_is_primitive());
        Ok(frame)
    }

    /// `o/q²`.
    pub fn ring(&self) -> &LocalRing {
        &self.ring
    }

    /// `o/q`.
    pub fn residue(&self) -> &LocalRing {
        &self.residue
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn p(&self) -> u64 {
        self.ring.p()
    }

    fn q(&self) -> u64 {
        self.ring.p().pow(self.k)
    }

    /// Exponent of `ψ(x)` for `x ∈ q/q²`, i.e. `x / p^k mod p^k`.
    pub fn psi_exponent(&self, x: Residue) -> Result<Residue> {
        if x.value() % self.q() != 0 {
            return Err(Error::NotInCongruenceSubgroup);
        }
        Ok(self.residue.elem(x.value() / self.q()))
    }

    /// `ψ` is nontrivial on `p^{-1}q²/q²`.
    pub fn psi_is_primitive(&self) -> bool {
        let x = self.ring.p_power(2 * self.k - 1);
        self.psi_exponent(x).map(|e| !self.residue.is_zero(e)).unwrap_or(false)
    }

    /// Entrywise lift from `o/q` to `o/q²` by the standard representatives.
    pub fn lift(&self, x: &Matrix<Residue>) -> Matrix<Residue> {
        x.map(|v| self.ring.elem(v.value()))
    }

    pub fn reduce(&self, g: &Matrix<Residue>) -> Matrix<Residue> {
        g.map(|v| self.residue.elem(v.value()))
    }

    /// `1 + p^k x` for `x ∈ M(o/q)`.
    pub fn congruence_element(&self, x: &Matrix<Residue>) -> Matrix<Residue> {
        let r = &self.ring;
        let one = r.identity(x.dim());
        r.mat_add(&one, &r.mat_scale(r.p_power(self.k), &self.lift(x)))
    }

    /// The `x ∈ M(o/q)` with `g = 1 + p^k x`.
    pub fn congruence_log(&self, g: &Matrix<Residue>) -> Result<Matrix<Residue>> {
        let r = &self.ring;
        let x = r.mat_sub(g, &r.identity(g.dim()));
        if x.entries().iter().any(|v| v.value() % self.q() != 0) {
            return Err(Error::NotInCongruenceSubgroup);
        }
        Ok(x.map(|v| self.residue.elem(v.value() / self.q())))
    }

    /// All of `K(q)/K(q²)` in rank `dim`, in index order of `x`.
    pub fn congruence_quotient(&self, dim: usize, budget: u64) -> Result<Vec<Matrix<Residue>>> {
        let needed = self.residue.matrix_count(dim);
        if needed > budget as u128 {
            return Err(Error::BudgetExceeded { needed, budget });
        }
        Ok((0..needed)
            .map(|i| self.congruence_element(&self.residue.matrix_from_index(dim, i)))
            .collect())
    }

    /// The exponent of `χ_τ(g) = ψ(trace((g - 1)τ))`.
    pub fn chi_tau_exponent(&self, tau: &Matrix<Residue>, g: &Matrix<Residue>) -> Result<Residue> {
        if tau.dim() != g.dim() {
            return Err(Error::DimensionMismatch { expected: tau.dim(), got: g.dim() });
        }
        let x = self.congruence_log(g)?;
        Ok(self.residue.trace(&self.residue.mat_mul(&x, tau)))
    }
}

/// `|GL_d(Z/p^k)|`.
pub fn gl_order(p: u64, k: u32, d: usize) -> u128 {
    let p = p as u128;
    let pd = p.pow(d as u32);
    let field: u128 = (0..d as u32).map(|i| pd - p.pow(i)).product();
    field * p.pow((k - 1) * (d * d) as u32)
}

/// Data attached to one block of a standard parabolic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BlockDatum {
    /// A character of `o^×` with `χ(1 + y) = ψ(y ξ)` for `y ∈ q`.
    Character { xi: Residue },
    /// A block with a cyclic regular parameter, taken with multiplicity one.
    Regular { tau: Matrix<Residue>, charpoly: MonicPoly<Residue> },
}

impl BlockDatum {
    pub fn size(&self) -> usize {
        match self {
            BlockDatum::Character { .. } => 1,
            BlockDatum::Regular { tau, .. } => tau.dim(),
        }
    }

    pub fn polynomial(&self, r: &LocalRing) -> MonicPoly<Residue> {
        match self {
            BlockDatum::Character { xi } => r.linear(*xi),
            BlockDatum::Regular { charpoly, .. } => charpoly.clone(),
        }
    }

    /// Dimension of the `σ`-eigenspace of this block.
    fn eigenspace_dimension(&self, r: &LocalRing, sigma: &Matrix<Residue>) -> u64 {
        match self {
            BlockDatum::Character { xi } => u64::from(sigma.get(0, 0) == *xi),
            BlockDatum::Regular { charpoly, .. } => {
                u64::from(ggp::is_cyclic(r, sigma) && r.charpoly_unchecked(sigma) == *charpoly)
            }
        }
    }
}

/// A parabolically induced representation described by its blocks.
#[derive(Clone, Debug)]
pub struct InductionDatum {
    ring: LocalRing,
    blocks: Vec<BlockDatum>,
}

impl InductionDatum {
    pub fn new(ring: LocalRing, blocks: Vec<BlockDatum>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::PreconditionFailed("an induction datum needs at least one block".into()));
        }
        for b in &blocks {
            if let BlockDatum::Regular { tau, charpoly } = b {
                if charpoly.degree() != tau.dim() {
                    return Err(Error::DimensionMismatch { expected: tau.dim(), got: charpoly.degree() });
                }
                if !ggp::is_cyclic(&ring, tau) {
                    return Err(Error::NotCyclic);
                }
                if ring.charpoly(tau)? != *charpoly {
                    return Err(Error::PreconditionFailed("block charpoly does not match its parameter".into()));
                }
            }
        }
        Ok(InductionDatum { ring, blocks })
    }

    /// The principal series with parameters `ξ_i`.
    pub fn principal_series(ring: LocalRing, xis: &[u64]) -> Result<Self> {
        let blocks = xis.iter().map(|&x| BlockDatum::Character { xi: ring.elem(x) }).collect();
        InductionDatum::new(ring, blocks)
    }

    /// A single block with regular parameter `τ`.
    pub fn regular(ring: LocalRing, tau: Matrix<Residue>) -> Result<Self> {
        let charpoly = ring.charpoly(&tau)?;
        InductionDatum::new(ring, vec![BlockDatum::Regular { tau, charpoly }])
    }

    pub fn ring(&self) -> &LocalRing {
        &self.ring
    }

    pub fn blocks(&self) -> &[BlockDatum] {
        &self.blocks
    }

    pub fn rank(&self) -> usize {
        self.blocks.iter().map(BlockDatum::size).sum()
    }

    pub fn partition(&self) -> Vec<usize> {
        self.blocks.iter().map(BlockDatum::size).collect()
    }

    /// The product of the block polynomials.
    pub fn polynomial(&self) -> MonicPoly<Residue> {
        let parts: Vec<_> = self.blocks.iter().map(|b| b.polynomial(&self.ring)).collect();
        self.ring.poly_product(&parts)
    }

    /// The `ξ_i` when every block is a character.
    pub fn parameters(&self) -> Option<Vec<Residue>> {
        self.blocks
            .iter()
            .map(|b| match b {
                BlockDatum::Character { xi } => Some(*xi),
                BlockDatum::Regular { .. } => None,
            })
            .collect()
    }
}

fn same_ring(a: &LocalRing, b: &LocalRing) -> Result<()> {
    if a.p() != b.p() || a.m() != b.m() {
        return Err(Error::PreconditionFailed("data live over different rings".into()));
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct StablePairReport {
    pub stable: bool,
    pub p_pi: Vec<u64>,
    pub p_sigma: Vec<u64>,
}

/// Whether the depth-`q²` polynomials of `π` and `σ` generate the unit ideal.
pub fn stable_pair_check(pi: &InductionDatum, sigma: &InductionDatum) -> Result<StablePairReport> {
    same_ring(&pi.ring, &sigma.ring)?;
    let r = &pi.ring;
    let (pp, ps) = (pi.polynomial(), sigma.polynomial());
    Ok(StablePairReport { stable: r.monic_coprime(&pp, &ps), p_pi: r.poly_codes(&pp), p_sigma: r.poly_codes(&ps) })
}

/// Both sides of `Π_{i,j} [o : c(χ_i/η_j)] = [o : q²]^{n(n+1)}` as powers of `p`.
#[derive(Clone, Debug, Serialize)]
pub struct ConductorReport {
    pub lhs_exponent: u64,
    pub rhs_exponent: u64,
    pub all_differences_units: bool,
}

impl ConductorReport {
    pub fn identity_holds(&self) -> bool {
        self.lhs_exponent == self.rhs_exponent
    }
}

/// Conductor exponents of `χ_i/η_j` for principal series at depth `q²`.
///
/// The character `χ_i/η_j` has parameter `ξ_i - η_j` on `1 + q`, and its
/// conductor exponent is `2k - v(ξ_i - η_j)`.
pub fn conductor_identity(pi: &InductionDatum, sigma: &InductionDatum) -> Result<ConductorReport> {
    same_ring(&pi.ring, &sigma.ring)?;
    let r = &pi.ring;
    let (Some(xs), Some(es)) = (pi.parameters(), sigma.parameters()) else {
        return Err(Error::PreconditionFailed("conductor identity needs principal series data".into()));
    };
    if xs.len() != es.len() + 1 {
        return Err(Error::PreconditionFailed("ranks must be n+1 and n".into()));
    }
    let k = r.m() as u64;
    let n = es.len() as u64;
    let mut lhs = 0;
    let mut units = true;
    for &x in &xs {
        for &e in &es {
            let d = r.sub(x, e);
            units &= r.is_unit(d);
            lhs += 2 * k - r.valuation(d) as u64;
        }
    }
    Ok(ConductorReport { lhs_exponent: lhs, rhs_exponent: 2 * k * n * (n + 1), all_differences_units: units })
}

/// A stable `τ` with `P_τ = P_π` and `P_{τ_H} = P_σ`.
pub fn regular_parameter_for_pair(pi: &InductionDatum, sigma: &InductionDatum) -> Result<StableTau<LocalRing>> {
    if pi.rank() != sigma.rank() + 1 {
        return Err(Error::PreconditionFailed(format!("ranks {} and {} are not n+1, n", pi.rank(), sigma.rank())));
    }
    if !stable_pair_check(pi, sigma)?.stable {
        return Err(Error::NotStablePair);
    }
    let r = pi.ring.clone();
    let tau = ggp::construct_tau(&r, &pi.polynomial(), &sigma.polynomial())?;
    StableTau::new(r, tau)
}

#[derive(Clone, Debug, Serialize)]
pub struct SupportReport {
    pub p: u64,
    pub m: u32,
    pub rank: usize,
    pub tau: Vec<u64>,
    pub group_order: u64,
    /// Number of `h ∈ H(o/q)` with `Ad(h)τ = τ`.
    pub fixed: u64,
}

impl SupportReport {
    pub fn holds(&self) -> bool {
        self.fixed == 1
    }
}

/// Counts the `h ∈ H(o/q)` fixing `τ` under conjugation.
pub fn coefficient_support_check(r: &LocalRing, tau: &Matrix<Residue>, budget: u64) -> Result<SupportReport> {
    let dim = tau.dim();
    let n = dim - 1;
    let needed = r.matrix_count(n);
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let h = r.general_linear_group(n);
    let fixed = h.iter().filter(|x| r.commutes(&embed_h(r, x), tau)).count() as u64;
    Ok(SupportReport {
        p: r.p(),
        m: r.m(),
        rank: dim,
        tau: flat_codes(r, tau),
        group_order: h.len() as u64,
        fixed,
    })
}

/// `u = 1 + p^shift E_ij ∈ K(q²) ∩ a K(q) a⁻¹` with `χ_τ(a⁻¹ u a) ≠ 1`,
/// for `a = diag(ϖ^{c_1}, …, ϖ^{c_n}, 1)`.
#[derive(Clone, Debug, Serialize)]
pub struct NoncompactWitness {
    pub exponents: Vec<i32>,
    pub i: usize,
    pub j: usize,
    pub shift: u32,
    /// Precision `p^precision` at which `u` is recorded.
    pub precision: u32,
    pub u: Vec<u64>,
    /// `a⁻¹ u a` modulo `q²`.
    pub conjugate: Vec<u64>,
    pub chi_exponent: u64,
    pub u_in_k_q2: bool,
    pub conjugate_in_k_q: bool,
}

impl NoncompactWitness {
    pub fn holds(&self) -> bool {
        self.u_in_k_q2 && self.conjugate_in_k_q && self.chi_exponent != 0
    }
}

/// `a⁻¹ x a` for diagonal `a` with exponents `c`, or `None` if not integral.
///
/// Entry `(r, t)` is scaled by `p^{c_t - c_r}`; the result is exact modulo
/// `p^{2k}` provided `precision` leaves that much room after division.
fn conjugate_by_diagonal(big: &LocalRing, x: &Matrix<Residue>, c: &[i32], out: &LocalRing) -> Option<Matrix<Residue>> {
    let p = big.p();
    let dim = x.dim();
    let mut res = out.zero_matrix(dim);
    for r in 0..dim {
        for t in 0..dim {
            let v = x.get(r, t);
            if v.value() == 0 {
                continue;
            }
            let shift = c[t] - c[r];
            let scaled = if shift >= 0 {
                big.mul(v, big.p_power(shift as u32)).value()
            } else {
                let d = (-shift) as u32;
                if big.valuation(v) < d {
                    return None;
                }
                v.value() / p.pow(d)
            };
            res.set(r, t, out.elem(scaled));
        }
    }
    Some(res)
}

/// Follows the weight-space argument: a pair `c_i > c_j` with `τ_ji` a unit
/// gives `a⁻¹ u a = 1 + ϖ^{2k-1} E_ij`, on which `χ_τ` is `ψ(ϖ^{2k-1} τ_ji)`.
pub fn noncompact_support_witness(
    frame: &DepthFrame,
    tau: &Matrix<Residue>,
    exponents: &[i32],
) -> Result<NoncompactWitness> {
    let rq = frame.residue();
    let dim = tau.dim();
    if exponents.len() + 1 != dim {
        return Err(Error::DimensionMismatch { expected: dim - 1, got: exponents.len() });
    }
    if exponents.iter().all(|&c| c == 0) {
        return Err(Error::PreconditionFailed("a lies in K_H".into()));
    }
    let mut c = exponents.to_vec();
    c.push(0);
    let k = frame.k();
    let (i, j) = (0..dim)
        .flat_map(|i| (0..dim).map(move |j| (i, j)))
        .filter(|&(i, j)| c[i] > c[j] && rq.is_unit(tau.get(j, i)))
        .max_by_key(|&(i, j)| (c[i] - c[j], std::cmp::Reverse((i, j))))
        .ok_or(Error::WitnessSearchFailed)?;
    let shift = 2 * k - 1 + (c[i] - c[j]) as u32;
    let precision = shift + 1;
    let big = LocalRing::new(frame.p(), precision)?;
    let mut u = big.identity(dim);
    u.set(i, j, big.p_power(shift));

    let q2 = frame.ring();
    let u_minus = big.mat_sub(&u, &big.identity(dim));
    let u_in_k_q2 = u_minus.entries().iter().all(|&v| big.valuation(v) >= 2 * k);
    let (conjugate, conjugate_in_k_q, chi) = match conjugate_by_diagonal(&big, &u, &c, q2) {
        Some(m) => match frame.chi_tau_exponent(tau, &m) {
            Ok(e) => (m, true, e.value()),
            Err(_) => (m, false, 0),
        },
        None => (q2.zero_matrix(dim), false, 0),
    };
    Ok(NoncompactWitness {
        exponents: exponents.to_vec(),
        i,
        j,
        shift,
        precision,
        u: flat_codes(&big, &u),
        conjugate: flat_codes(q2, &conjugate),
        chi_exponent: chi,
        u_in_k_q2,
        conjugate_in_k_q,
    })
}

/// Reduced row echelon form over a residue field.
fn rref(r: &LocalRing, rows: &[Vec<Residue>]) -> Vec<Vec<Residue>> {
    let mut m: Vec<Vec<Residue>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut lead = 0;
    for col in 0..cols {
        let Some(piv) = (lead..m.len()).find(|&i| r.is_unit(m[i][col])) else { continue };
        m.swap(lead, piv);
        let inv = r.inverse(m[lead][col]).expect("pivot is a unit");
        for x in m[lead].iter_mut() {
            *x = r.mul(*x, inv);
        }
        for i in 0..m.len() {
            if i != lead && !r.is_zero(m[i][col]) {
                let f = m[i][col];
                for t in 0..cols {
                    m[i][t] = r.sub(m[i][t], r.mul(f, m[lead][t]));
                }
            }
        }
        lead += 1;
    }
    m.truncate(lead);
    m
}

fn block_offsets(partition: &[usize]) -> Vec<usize> {
    let mut off = vec![0];
    for &s in partition {
        off.push(off.last().unwrap() + s);
    }
    off
}

/// Representatives of `P(o/q)\G(o/q)` for the standard parabolic of `partition`.
///
/// The coset `Pg` is determined by the row spaces of the trailing row blocks of `g`.
pub fn parabolic_cosets(r: &LocalRing, partition: &[usize], budget: u64) -> Result<Vec<Matrix<Residue>>> {
    if r.m() != 1 {
        return Err(Error::PreconditionFailed("coset enumeration needs a residue field".into()));
    }
    let dim: usize = partition.iter().sum();
    let needed = r.matrix_count(dim);
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let off = block_offsets(partition);
    let mut seen = HashSet::new();
    let mut reps = Vec::new();
    for g in r.general_linear_group(dim) {
        let rows = g.rows();
        let key: Vec<Vec<Vec<u64>>> = off[1..partition.len()]
            .iter()
            .map(|&s| rref(r, &rows[s..]).iter().map(|row| row.iter().map(|x| x.value()).collect()).collect())
            .collect();
        if seen.insert(key) {
            reps.push(g);
        }
    }
    Ok(reps)
}

#[derive(Clone, Debug, Serialize)]
pub struct MackeyReport {
    pub p: u64,
    pub partition: Vec<usize>,
    pub tau: Vec<u64>,
    pub cosets: u64,
    /// Cosets with `Ad(g)τ` preserving the flag.
    pub flag_preserving: u64,
    pub dimension: u64,
}

/// `dim π^τ` from `π^τ = ⊕_g ⊗_i π_i^{(Ad(g)τ)_ii}`.
pub fn mackey_dimension(datum: &InductionDatum, tau: &Matrix<Residue>, budget: u64) -> Result<MackeyReport> {
    let r = datum.ring();
    if tau.dim() != datum.rank() {
        return Err(Error::DimensionMismatch { expected: datum.rank(), got: tau.dim() });
    }
    let partition = datum.partition();
    let off = block_offsets(&partition);
    let cosets = parabolic_cosets(r, &partition, budget)?;
    let mut flag_preserving = 0;
    let mut dimension = 0;
    for g in &cosets {
        let m = r.mat_mul(&r.mat_mul(g, tau), &r.mat_inverse(g)?);
        let preserves = (0..partition.len()).all(|bi| {
            (0..bi).all(|bj| {
                (off[bi]..off[bi + 1]).all(|i| (off[bj]..off[bj + 1]).all(|j| r.is_zero(m.get(i, j))))
            })
        });
        if !preserves {
            continue;
        }
        flag_preserving += 1;
        dimension += datum
            .blocks()
            .iter()
            .enumerate()
            .map(|(b, blk)| {
                let s = off[b];
                let sub = Matrix::from_fn(blk.size(), |i, j| m.get(s + i, s + j));
                blk.eigenspace_dimension(r, &sub)
            })
            .product::<u64>();
    }
    Ok(MackeyReport {
        p: r.p(),
        partition,
        tau: flat_codes(r, tau),
        cosets: cosets.len() as u64,
        flag_preserving,
        dimension,
    })
}

/// Exponent of `χ(u)` for the character of `(Z/p²)^×` trivial on the
/// Teichmüller roots with `χ(1 + p y) = ψ(p y ξ)`.
fn unit_character_exponent(q2: &LocalRing, xi: u64, u: Residue) -> u64 {
    let p = q2.p();
    let t = q2.pow(u, p);
    let w = q2.mul(u, q2.inverse(t).expect("Teichmüller part is a unit"));
    let y = (w.value() - 1) / p;
    (y * xi) % p
}

/// `dim π^τ` computed in the induced model of a rank-2 principal series at
/// `k = 1`: functions on `B(o/q²)\G(o/q²)`, with the dimension read off as
/// the trace of the `χ_τ`-projector, evaluated in `Z[ζ_p]`.
pub fn induced_model_dimension(datum: &InductionDatum, tau: &Matrix<Residue>) -> Result<u64> {
    let r = datum.ring();
    let xs = datum
        .parameters()
        .filter(|x| x.len() == 2 && r.m() == 1 && tau.dim() == 2)
        .ok_or_else(|| Error::PreconditionFailed("oracle covers rank-2 principal series at k = 1".into()))?;
    let frame = DepthFrame::new(r.p(), 1)?;
    let q2 = frame.ring();
    let p = r.p();
    // coset representatives indexed by the bottom row up to units
    let mut reps = Vec::new();
    for c in 0..p * p {
        reps.push(Matrix::from_rows(&[vec![q2.one(), q2.zero()], vec![q2.elem(c), q2.one()]]));
    }
    for d in 0..p {
        reps.push(Matrix::from_rows(&[vec![q2.zero(), q2.one()], vec![q2.one(), q2.elem(p * d)]]));
    }
    let inverses: Vec<_> = reps.iter().map(|g| q2.mat_inverse(g)).collect::<Result<_>>()?;
    let mut hist = vec![0i64; p as usize];
    for x in (0..r.matrix_count(2)).map(|i| r.matrix_from_index(2, i)) {
        let k = frame.congruence_element(&x);
        let chi = frame.chi_tau_exponent(tau, &k)?.value();
        for (g, gi) in reps.iter().zip(&inverses) {
            let b = q2.mat_mul(&q2.mat_mul(g, &k), gi);
            if !q2.is_zero(b.get(1, 0)) {
                continue;
            }
            let e = unit_character_exponent(q2, xs[0].value(), b.get(0, 0))
                + unit_character_exponent(q2, xs[1].value(), b.get(1, 1));
            hist[((e + p - chi) % p) as usize] += 1;
        }
    }
    // Σ h_j ζ^j is rational iff h_1 = … = h_{p-1}, and then equals h_0 - h_{p-1}
    let tail = hist[p as usize - 1];
    if hist[1..].iter().any(|&h| h != tail) {
        return Err(Error::PreconditionFailed("projector trace is not rational".into()));
    }
    let total = hist[0] - tail;
    let order = (p as i64).pow(4);
    if total < 0 || total % order != 0 {
        return Err(Error::PreconditionFailed("projector trace is not a dimension".into()));
    }
    Ok((total / order) as u64)
}

/// Units of the commutant of `τ` in `M(o/q)`.
fn centralizer_units(r: &LocalRing, tau: &Matrix<Residue>, budget: u64) -> Result<Vec<Matrix<Residue>>> {
    if ggp::is_cyclic(r, tau) {
        return ggp::centralizer_group(r, tau, budget);
    }
    let needed = r.matrix_count(tau.dim());
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    Ok(r.general_linear_group(tau.dim()).into_iter().filter(|g| r.commutes(g, tau)).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct JTauVolume {
    pub p: u64,
    pub k: u32,
    pub rank: usize,
    pub g_order: u128,
    pub g_tau_order: u128,
    pub h_order: u128,
    /// `[G(o/q) : G_τ(o/q)] / |H(o/q)|`.
    #[serde(serialize_with = "ser_ratio")]
    pub ratio: Rational,
    /// `ratio / Q^n`.
    #[serde(serialize_with = "ser_ratio")]
    pub normalized: Rational,
    #[serde(serialize_with = "ser_ratio")]
    pub lower: Rational,
    #[serde(serialize_with = "ser_ratio")]
    pub upper: Rational,
    /// `|G_τ(o/q) ∩ H(o/q)|`, the number of `K_H(q)`-cosets in `J_τ ∩ K_H`.
    pub jh_cosets: u64,
}

impl JTauVolume {
    pub fn in_window(&self) -> bool {
        self.lower <= self.normalized && self.normalized <= self.upper
    }
}

/// Exact group orders behind `[K : J_τ]/[K_H : K_H(q)] ≍ Q^n`.
pub fn j_tau_volume_ratio(r: &LocalRing, tau: &Matrix<Residue>, budget: u64) -> Result<JTauVolume> {
    let dim = tau.dim();
    let n = dim - 1;
    let (p, k) = (r.p(), r.m());
    let g_order = gl_order(p, k, dim);
    let h_order = gl_order(p, k, n);
    let g_tau_order = centralizer_units(r, tau, budget)?.len() as u128;
    let ratio = Rational::new(g_order as i128, (g_tau_order * h_order) as i128);
    let big_q = Rational::from_integer(r.modulus() as i128);
    let normalized = ratio / num_traits::pow(big_q, n);
    let base = Rational::one() - Rational::new(1, p as i128);
    let lower = num_traits::pow(base, dim);
    let upper = lower.recip();
    let jh_cosets = coefficient_support_check(r, tau, budget)?.fixed;
    Ok(JTauVolume { p, k, rank: dim, g_order, g_tau_order, h_order, ratio, normalized, lower, upper, jh_cosets })
}

/// One value of an extended character, keyed by `x̄ ∈ G_τ(o/q)` and the
/// `χ_τ`-exponent `e` of the `K(q)`-part.
#[derive(Clone, Debug, Serialize)]
pub struct ChiValue {
    pub x: Vec<u64>,
    pub e: u64,
    /// Value in `Q/Z`.
    #[serde(serialize_with = "ser_ratio64")]
    pub value: Ratio<i64>,
}

fn ser_ratio64<S: serde::Serializer>(r: &Ratio<i64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// An extension `χ̃_τ` of `χ_τ` to `J_τ`, tabulated on `J_τ/ker χ_τ`.
///
/// Every `j ∈ J_τ` is `s(x̄)·y` with `s` the standard lift and `y ∈ K(q)`;
/// its class is `(x̄, χ_τ(y))`.
#[derive(Clone, Debug, Serialize)]
pub struct ChiExtension {
    pub p: u64,
    pub k: u32,
    pub tau: Vec<u64>,
    pub g_tau_order: u64,
    pub image_order: u64,
    /// `|J_τ/K(q²)|`.
    pub j_order: u128,
    pub kernel_normal: bool,
    pub quotient_abelian: bool,
    pub commutators_in_kernel: bool,
    pub restriction_ok: bool,
    pub homomorphism_ok: bool,
    pub table: Vec<ChiValue>,
    #[serde(skip)]
    lookup: HashMap<(Vec<u64>, u64), Ratio<i64>>,
    #[serde(skip)]
    tau_matrix: Matrix<Residue>,
}

impl ChiExtension {
    pub fn holds(&self) -> bool {
        self.kernel_normal && self.commutators_in_kernel && self.restriction_ok && self.homomorphism_ok
    }

    /// `χ̃_τ(j)` in `Q/Z`, or an error if `j ∉ J_τ`.
    pub fn value(&self, frame: &DepthFrame, j: &Matrix<Residue>) -> Result<Ratio<i64>> {
        let x = frame.reduce(j);
        let s = frame.lift(&x);
        let y = frame.ring().mat_mul(&frame.ring().mat_inverse(&s)?, j);
        let e = frame.chi_tau_exponent(&self.tau_matrix, &y)?;
        self.lookup
            .get(&(x.entries().iter().map(|v| v.value()).collect(), e.value()))
            .copied()
            .ok_or(Error::NotInCongruenceSubgroup)
    }
}

fn frac(x: Ratio<i64>) -> Ratio<i64> {
    x - x.floor()
}

/// Builds `χ̃_τ` by extending through the finite abelian group `J_τ/ker χ_τ`
/// one cyclic step at a time.
pub fn extend_chi_tau(frame: &DepthFrame, tau: &Matrix<Residue>, budget: u64) -> Result<ChiExtension> {
    let rq = frame.residue();
    let q2 = frame.ring();
    let dim = tau.dim();
    let pk = rq.modulus();
    let gtau = centralizer_units(rq, tau, budget)?;
    let codes = |m: &Matrix<Residue>| -> Vec<u64> { m.entries().iter().map(|v| v.value()).collect() };
    let index: HashMap<Vec<u64>, usize> = gtau.iter().enumerate().map(|(i, g)| (codes(g), i)).collect();
    let lifts: Vec<Matrix<Residue>> = gtau.iter().map(|g| frame.lift(g)).collect();
    let lift_inv: Vec<Matrix<Residue>> = lifts.iter().map(|g| q2.mat_inverse(g)).collect::<Result<_>>()?;
    let chi = |g: &Matrix<Residue>| frame.chi_tau_exponent(tau, g).map(|e| e.value());

    let basis: Vec<Matrix<Residue>> = (0..dim * dim)
        .map(|t| {
            let mut x = rq.zero_matrix(dim);
            x.set(t / dim, t % dim, rq.one());
            frame.congruence_element(&x)
        })
        .collect();

    let mut kernel_normal = true;
    for (s, si) in lifts.iter().zip(&lift_inv) {
        for y in &basis {
            kernel_normal &= chi(&q2.mat_mul(&q2.mat_mul(si, y), s))? == chi(y)?;
        }
    }

    // cocycle c(x1, x2) = s(x1 x2)⁻¹ s(x1) s(x2) ∈ K(q)
    let ng = gtau.len();
    let mut prod = vec![0usize; ng * ng];
    let mut cocycle = vec![0u64; ng * ng];
    for a in 0..ng {
        for b in 0..ng {
            let xy = rq.mat_mul(&gtau[a], &gtau[b]);
            let ab = index[&codes(&xy)];
            prod[a * ng + b] = ab;
            let c = q2.mat_mul(&lift_inv[ab], &q2.mat_mul(&lifts[a], &lifts[b]));
            cocycle[a * ng + b] = chi(&c)?;
        }
    }
    let quotient_abelian =
        (0..ng).all(|a| (0..ng).all(|b| prod[a * ng + b] == prod[b * ng + a] && cocycle[a * ng + b] == cocycle[b * ng + a]));

    let mut commutators_in_kernel = true;
    let tl = frame.lift(tau);
    let powers: Vec<Matrix<Residue>> =
        std::iter::successors(Some(q2.identity(dim)), |m| Some(q2.mat_mul(m, &tl))).take(dim).collect();
    let nc = rq.cardinality().pow(dim as u32);
    for idx in 0..nc {
        let mut t = idx;
        let coeffs: Vec<Residue> = (0..dim)
            .map(|_| {
                let c = q2.elem(t % rq.cardinality());
                t /= rq.cardinality();
                c
            })
            .collect();
        let a1 = q2.combination(&coeffs, &powers);
        let Ok(a1_inv) = q2.mat_inverse(&a1) else { continue };
        for b in &basis {
            let b_inv = q2.mat_inverse(b)?;
            let comm = q2.mat_mul(&q2.mat_mul(&a1, b), &q2.mat_mul(&a1_inv, &b_inv));
            commutators_in_kernel &= chi(&comm)? == 0;
        }
    }

    // image of χ_τ on K(q)/K(q²): the ideal generated by the entries of τ
    let v = tau.entries().iter().map(|&x| rq.valuation(x)).min().unwrap_or(rq.m());
    let step = frame.p().pow(v);
    let image_order = pk / step;

    let id = index[&codes(&rq.identity(dim))];
    let mul = |(a, e1): (usize, u64), (b, e2): (usize, u64)| -> (usize, u64) {
        (prod[a * ng + b], (e1 + e2 + cocycle[a * ng + b]) % pk)
    };
    let mut known: HashMap<(usize, u64), Ratio<i64>> =
        (0..image_order).map(|t| ((id, t * step), Ratio::new((t * step) as i64, pk as i64))).collect();
    for g in 0..ng {
        if known.contains_key(&(g, 0)) {
            continue;
        }
        let gen = (g, 0);
        let mut pw = gen;
        let mut t = 1i64;
        while !known.contains_key(&pw) {
            pw = mul(pw, gen);
            t += 1;
        }
        let root = frac(known[&pw] / t);
        let snapshot: Vec<((usize, u64), Ratio<i64>)> = known.iter().map(|(k, v)| (*k, *v)).collect();
        let mut gi = gen;
        for i in 1..t {
            for &(b, vb) in &snapshot {
                known.insert(mul(gi, b), frac(vb + root * i));
            }
            gi = mul(gi, gen);
        }
    }
    if known.len() as u64 != ng as u64 * image_order {
        return Err(Error::ExtensionFailed(format!("table has {} of {} entries", known.len(), ng as u64 * image_order)));
    }

    let elems: Vec<(usize, u64)> = known.keys().copied().collect();
    let homomorphism_ok = elems.iter().all(|&a| {
        elems.iter().all(|&b| known.get(&mul(a, b)).is_some_and(|&v| v == frac(known[&a] + known[&b])))
    });
    if !homomorphism_ok {
        return Err(Error::ExtensionFailed("extended table is not a character".into()));
    }

    let restriction_ok = frame
        .congruence_quotient(dim, budget)
        .map(|ys| {
            ys.iter().all(|y| {
                let e = chi(y).unwrap_or(u64::MAX);
                known.get(&(id, e)).is_some_and(|&v| v == Ratio::new(e as i64, pk as i64))
            })
        })
        .unwrap_or_else(|_| {
            basis.iter().all(|y| {
                let e = chi(y).unwrap_or(u64::MAX);
                known.get(&(id, e)).is_some_and(|&v| v == Ratio::new(e as i64, pk as i64))
            })
        });

    let mut table: Vec<ChiValue> =
        known.iter().map(|(&(g, e), &value)| ChiValue { x: codes(&gtau[g]), e, value }).collect();
    table.sort_by(|a, b| (&a.x, a.e).cmp(&(&b.x, b.e)));
    let lookup = known.iter().map(|(&(g, e), &v)| ((codes(&gtau[g]), e), v)).collect();
    Ok(ChiExtension {
        p: frame.p(),
        k: frame.k(),
        tau: codes(tau),
        g_tau_order: ng as u64,
        image_order,
        j_order: ng as u128 * rq.matrix_count(dim),
        kernel_normal,
        quotient_abelian,
        commutators_in_kernel,
        restriction_ok,
        homomorphism_ok,
        table,
        lookup,
        tau_matrix: tau.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ggp::DEFAULT_BUDGET;
    use num_traits::Zero;

    fn f3() -> LocalRing {
        LocalRing::new(3, 1).unwrap()
    }

    #[test]
    fn psi_is_primitive_for_small_depths() {
        for (p, k) in [(3, 1), (3, 2), (5, 1), (2, 2)] {
            assert!(DepthFrame::new(p, k).unwrap().psi_is_primitive());
        }
    }

    #[test]
    fn zero_tau_gives_trivial_character() {
        let frame = DepthFrame::new(3, 1).unwrap();
        let zero = frame.residue().zero_matrix(2);
        for g in frame.congruence_quotient(2, DEFAULT_BUDGET).unwrap() {
            assert_eq!(frame.chi_tau_exponent(&zero, &g).unwrap().value(), 0);
        }
    }

    #[test]
    fn chi_is_multiplicative_exhaustively() {
        let frame = DepthFrame::new(3, 1).unwrap();
        let rq = frame.residue();
        let q2 = frame.ring();
        let ks = frame.congruence_quotient(2, DEFAULT_BUDGET).unwrap();
        for t in [0u128, 5, 17, 40, 80] {
            let tau = rq.matrix_from_index(2, t);
            for g1 in &ks {
                for g2 in &ks {
                    let lhs = frame.chi_tau_exponent(&tau, &q2.mat_mul(g1, g2)).unwrap();
                    let rhs = rq.add(frame.chi_tau_exponent(&tau, g1).unwrap(), frame.chi_tau_exponent(&tau, g2).unwrap());
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn non_congruent_element_is_rejected() {
        let frame = DepthFrame::new(3, 1).unwrap();
        let g = frame.ring().diagonal(&[frame.ring().elem(2), frame.ring().one()]);
        let tau = frame.residue().identity(2);
        assert_eq!(frame.chi_tau_exponent(&tau, &g), Err(Error::NotInCongruenceSubgroup));
    }

    #[test]
    fn gl_order_matches_enumeration() {
        assert_eq!(gl_order(3, 1, 2), 48);
        assert_eq!(f3().general_linear_group(2).len(), 48);
        let z9 = LocalRing::new(3, 2).unwrap();
        assert_eq!(z9.general_linear_group(2).len() as u128, gl_order(3, 2, 2));
        assert_eq!(gl_order(3, 1, 3), 11232);
    }

    #[test]
    fn stable_pair_examples() {
        let r = f3();
        let a = InductionDatum::principal_series(r.clone(), &[0]).unwrap();
        let b = InductionDatum::principal_series(r.clone(), &[1]).unwrap();
        assert!(stable_pair_check(&a, &b).unwrap().stable);
        let pi = InductionDatum::principal_series(r.clone(), &[0, 1]).unwrap();
        let bad = InductionDatum::principal_series(r.clone(), &[1]).unwrap();
        assert!(!stable_pair_check(&pi, &bad).unwrap().stable);
        assert_eq!(regular_parameter_for_pair(&pi, &bad).unwrap_err(), Error::NotStablePair);
    }

    #[test]
    fn conductor_identity_iff_stable() {
        let r = LocalRing::new(3, 2).unwrap();
        for xs in [[0u64, 1], [1, 4], [2, 5], [0, 3]] {
            for eta in 0..9u64 {
                let pi = InductionDatum::principal_series(r.clone(), &xs).unwrap();
                let sigma = InductionDatum::principal_series(r.clone(), &[eta]).unwrap();
                let c = conductor_identity(&pi, &sigma).unwrap();
                assert_eq!(c.identity_holds(), c.all_differences_units);
                assert_eq!(c.identity_holds(), stable_pair_check(&pi, &sigma).unwrap().stable);
            }
        }
    }

    #[test]
    fn regular_parameter_has_requested_charpolys() {
        let r = LocalRing::new(5, 1).unwrap();
        let pi = InductionDatum::principal_series(r.clone(), &[1, 2]).unwrap();
        let sigma = InductionDatum::principal_series(r.clone(), &[4]).unwrap();
        let st = regular_parameter_for_pair(&pi, &sigma).unwrap();
        assert_eq!(r.charpoly(st.tau()).unwrap(), r.from_roots(&[r.elem(1), r.elem(2)]));
        assert_eq!(r.charpoly(&ggp::h_block(st.tau())).unwrap(), r.from_roots(&[r.elem(4)]));
        let e = ggp::e_vec(&r, 2);
        assert!(ggp::krylov_is_cyclic(&r, st.tau(), &e));
        assert!(ggp::krylov_is_cyclic(&r, &st.tau().transpose(), &e));
    }

    #[test]
    fn support_check_detects_non_stable() {
        let r = f3();
        let tau = r.diagonal(&[r.elem(1), r.elem(1), r.elem(2)]);
        let rep = coefficient_support_check(&r, &tau, DEFAULT_BUDGET).unwrap();
        assert!(!rep.holds());
        assert_eq!(rep.fixed, 48);
    }

    #[test]
    fn witness_for_stable_rank_three() {
        let frame = DepthFrame::new(3, 1).unwrap();
        let r = frame.residue();
        let tau = r.matrix_from_i64(&[&[0, 1, 0], &[0, 0, 1], &[1, 1, 0]]);
        assert!(ggp::is_stable(r, &tau));
        for exps in [[-1, 0], [1, 0], [0, 2], [1, -1], [2, 2]] {
            let w = noncompact_support_witness(&frame, &tau, &exps).unwrap();
            assert!(w.holds(), "{exps:?}: {w:?}");
        }
    }

    #[test]
    fn cosets_have_expected_counts() {
        let r = f3();
        assert_eq!(parabolic_cosets(&r, &[1, 1], DEFAULT_BUDGET).unwrap().len(), 4);
        assert_eq!(parabolic_cosets(&r, &[2, 1], DEFAULT_BUDGET).unwrap().len(), 13);
        assert_eq!(parabolic_cosets(&r, &[1, 1, 1], DEFAULT_BUDGET).unwrap().len(), 52);
    }

    #[test]
    fn mackey_matches_induced_model_on_all_tau() {
        let r = f3();
        for (x1, x2) in [(0, 1), (1, 2), (0, 0), (2, 0)] {
            let d = InductionDatum::principal_series(r.clone(), &[x1, x2]).unwrap();
            for t in 0..r.matrix_count(2) {
                let tau = r.matrix_from_index(2, t);
                let m = mackey_dimension(&d, &tau, DEFAULT_BUDGET).unwrap().dimension;
                assert_eq!(m, induced_model_dimension(&d, &tau).unwrap(), "{x1} {x2} {tau:?}");
            }
        }
    }

    #[test]
    fn j_tau_ratio_window_rank_three() {
        let r = f3();
        let tau = r.matrix_from_i64(&[&[0, 1, 0], &[0, 0, 1], &[1, 1, 0]]);
        let v = j_tau_volume_ratio(&r, &tau, DEFAULT_BUDGET).unwrap();
        assert!(v.in_window(), "{v:?}");
        assert_eq!(v.jh_cosets, 1);
    }

    #[test]
    fn extension_of_zero_tau_is_trivial() {
        let frame = DepthFrame::new(3, 1).unwrap();
        let zero = frame.residue().zero_matrix(2);
        let ext = extend_chi_tau(&frame, &zero, DEFAULT_BUDGET).unwrap();
        assert!(ext.holds());
        assert!(ext.table.iter().all(|v| v.value.is_zero()));
    }

    #[test]
    fn extension_is_a_character_on_j_tau_rank_two() {
        let frame = DepthFrame::new(3, 1).unwrap();
        let rq = frame.residue();
        let q2 = frame.ring();
        let tau = rq.diagonal(&[rq.elem(0), rq.elem(1)]);
        let ext = extend_chi_tau(&frame, &tau, DEFAULT_BUDGET).unwrap();
        assert!(ext.holds() && ext.quotient_abelian);
        assert_eq!(ext.g_tau_order, 4);
        assert_eq!(ext.j_order, 4 * 81);
        let ks = frame.congruence_quotient(2, DEFAULT_BUDGET).unwrap();
        let j: Vec<Matrix<Residue>> = ggp::centralizer_group(rq, &tau, DEFAULT_BUDGET)
            .unwrap()
            .iter()
            .flat_map(|x| ks.iter().map(move |y| (x, y)))
            .map(|(x, y)| q2.mat_mul(&frame.lift(x), y))
            .collect();
        assert_eq!(j.len(), 324);
        for a in j.iter().step_by(7) {
            for b in &j {
                let ab = ext.value(&frame, &q2.mat_mul(a, b)).unwrap();
                assert_eq!(ab, frac(ext.value(&frame, a).unwrap() + ext.value(&frame, b).unwrap()));
                let comm = q2.mat_mul(&q2.mat_mul(a, b), &q2.mat_inverse(&q2.mat_mul(b, a)).unwrap());
                assert_eq!(frame.chi_tau_exponent(&tau, &comm).unwrap().value(), 0);
            }
        }
    }
}
