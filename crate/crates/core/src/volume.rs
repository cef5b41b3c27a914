//! The distance `d_H`, polynomial congruence counts, and the volume and
//! bilinear-form bounds.

use crate::error::{Error, Result};
use crate::ggp::{self, embed_h, is_in_hz, StableTau};
use crate::matrix::{MatEnum, MatOps, Matrix};
use crate::poly::PolyEnum;
use crate::ring::{FiniteRing, LocalRing, Residue, Ring};
use crate::transversality::{decompose_h_gtau, XScheme};
use num_rational::Ratio;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use std::collections::HashMap;

pub type Rational = Ratio<i128>;

pub(crate) fn ser_ratio<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// `d_H = q^{-ell}`, with `ell = m` standing for `d_H = 0` at precision `p^m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DistanceValue {
    pub ell: u32,
    pub at_infinity: bool,
    #[serde(skip)]
    pub m: u32,
}

impl DistanceValue {
    pub fn is_zero(&self) -> bool {
        self.ell >= self.m
    }

    /// `d_H` as an exact rational.
    pub fn value(&self, q: u64) -> Rational {
        if self.is_zero() {
            Rational::zero()
        } else {
            Rational::new(1, (q as i128).pow(self.ell))
        }
    }

    /// `Q · d_H` with `Q = q^m`.
    pub fn q_times(&self, q: u64) -> Rational {
        if self.is_zero() {
            Rational::zero()
        } else {
            Rational::from_integer((q as i128).pow(self.m - self.ell))
        }
    }
}

/// `d_H(g)` for `g ∈ G(Z/p^m)`, read off the blocks of `g` and `g⁻¹`.
pub fn distance_d_h(r: &LocalRing, g: &Matrix<Residue>) -> Result<DistanceValue> {
    let gi = r.mat_inverse(g)?;
    let n = g.dim() - 1;
    let m = r.m();
    let (d, dp) = (g.get(n, n), gi.get(n, n));
    if !r.is_unit(d) || !r.is_unit(dp) {
        return Ok(DistanceValue { ell: 0, at_infinity: true, m });
    }
    let mut ell = m;
    for h in [g, &gi] {
        for i in 0..n {
            ell = ell.min(r.valuation(h.get(i, n))).min(r.valuation(h.get(n, i)));
        }
    }
    Ok(DistanceValue { ell, at_infinity: ell == 0, m })
}

/// `Q* = q^{⌈m/2⌉}`.
pub fn q_star(q: u64, m: u32) -> u64 {
    q.pow(m.div_ceil(2))
}

/// `1/(1 + Q d_H) + d_H^∞/Q*`.
pub fn bound_factor(q: u64, d: &DistanceValue) -> Rational {
    let mut b = Rational::one() / (Rational::one() + d.q_times(q));
    if d.at_infinity {
        b += Rational::new(1, q_star(q, d.m) as i128);
    }
    b
}

/// A polynomial in `nvars` variables over `Z/p^m`, as a list of (exponents, coefficient).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    nvars: usize,
    terms: Vec<(Vec<u32>, Residue)>,
}

fn binomial_mod(r: &LocalRing, n: u32, k: u32) -> Residue {
    if k > n {
        return r.zero();
    }
    // exact in u128 for the small degrees used here
    let mut c: u128 = 1;
    for i in 0..k as u128 {
        c = c * (n as u128 - i) / (i + 1);
    }
    r.elem((c % r.modulus() as u128) as u64)
}

impl MultiPoly {
    pub fn new(r: &LocalRing, nvars: usize, terms: &[(Vec<u32>, i64)]) -> Self {
        let mut merged: Vec<(Vec<u32>, Residue)> = Vec::new();
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            match merged.iter_mut().find(|(f, _)| f == e) {
                Some((_, acc)) => *acc = r.add(*acc, r.elem_i64(*c)),
                None => merged.push((e.clone(), r.elem_i64(*c))),
            }
        }
        merged.retain(|(_, c)| !r.is_zero(*c));
        MultiPoly { nvars, terms: merged }
    }

    pub fn variable(r: &LocalRing, nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        MultiPoly::new(r, nvars, &[(e, 1)])
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Vec<u32>, Residue)] {
        &self.terms
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(e, _)| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn eval(&self, r: &LocalRing, y: &[Residue]) -> Residue {
        self.terms.iter().fold(r.zero(), |acc, (e, c)| {
            let mono = e.iter().zip(y).fold(*c, |m, (&k, &v)| r.mul(m, r.pow(v, k as u64)));
            r.add(acc, mono)
        })
    }

    /// Coefficient of `t^β` in `P(y + t)`.
    pub fn taylor(&self, r: &LocalRing, y: &[Residue], beta: &[u32]) -> Residue {
        self.terms.iter().fold(r.zero(), |acc, (e, c)| {
            if e.iter().zip(beta).any(|(a, b)| b > a) {
                return acc;
            }
            let mut t = *c;
            for i in 0..self.nvars {
                t = r.mul(t, binomial_mod(r, e[i], beta[i]));
                t = r.mul(t, r.pow(y[i], (e[i] - beta[i]) as u64));
            }
            r.add(acc, t)
        })
    }

    pub fn linear_taylor(&self, r: &LocalRing, y: &[Residue]) -> Vec<Residue> {
        (0..self.nvars)
            .map(|i| {
                let mut b = vec![0; self.nvars];
                b[i] = 1;
                self.taylor(r, y, &b)
            })
            .collect()
    }

    pub fn quadratic_taylor(&self, r: &LocalRing, y: &[Residue]) -> Vec<Residue> {
        let mut out = Vec::new();
        for i in 0..self.nvars {
            for j in i..self.nvars {
                let mut b = vec![0; self.nvars];
                b[i] += 1;
                b[j] += 1;
                out.push(self.taylor(r, y, &b));
            }
        }
        out
    }

    /// Random polynomial of total degree at most `d` with every monomial present with probability 1/2.
    pub fn random<G: Rng + ?Sized>(r: &LocalRing, nvars: usize, d: u32, rng: &mut G) -> Self {
        let mut terms = Vec::new();
        for e in monomials(nvars, d) {
            if rng.gen_bool(0.5) {
                terms.push((e, rng.gen_range(0..r.modulus()) as i64));
            }
        }
        MultiPoly::new(r, nvars, &terms)
    }
}

/// Exponent vectors of total degree at most `d`.
pub fn monomials(nvars: usize, d: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..nvars {
        out = out
            .into_iter()
            .flat_map(|e: Vec<u32>| {
                let used: u32 = e.iter().sum();
                (0..=d - used).map(move |k| {
                    let mut f = e.clone();
                    f.push(k);
                    f
                })
            })
            .collect();
    }
    out
}

fn for_each_point(r: &LocalRing, n: usize, mut f: impl FnMut(&[Residue])) {
    let q = r.modulus();
    let mut y = vec![r.zero(); n];
    for idx in 0..q.pow(n as u32) {
        let mut k = idx;
        for v in y.iter_mut() {
            *v = r.elem(k % q);
            k /= q;
        }
        f(&y);
    }
}

fn point_budget(r: &LocalRing, n: usize, budget: u64) -> Result<()> {
    let needed = (r.modulus() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    Ok(())
}

/// `#{y ∈ (Z/p^m)^n : P(y) ≡ 0}` by full enumeration.
pub fn congruence_count_oracle(r: &LocalRing, poly: &MultiPoly, budget: u64) -> Result<u64> {
    point_budget(r, poly.nvars, budget)?;
    let mut count = 0;
    for_each_point(r, poly.nvars, |y| {
        if r.is_zero(poly.eval(r, y)) {
            count += 1;
        }
    });
    Ok(count)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TaylorRegime {
    /// Some linear Taylor coefficient is a unit.
    Linear,
    /// Some linear or quadratic Taylor coefficient is a unit.
    LinearOrQuadratic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CongruenceCheck {
    pub regime: TaylorRegime,
    pub p: u64,
    pub m: u32,
    pub n: usize,
    pub degree: u32,
    /// Residue points where the Taylor hypothesis holds.
    pub domain: u64,
    /// Solutions in the preimage of the domain.
    pub count: u64,
    /// `q^{mn-m}` or `q^{mn-⌈m/2⌉}`.
    pub scale: u128,
    /// `d` or `d^{⌈m/2⌉}`.
    pub constant: u128,
}

impl CongruenceCheck {
    pub fn holds(&self) -> bool {
        (self.count as u128) <= self.constant * self.scale
    }
}

/// The constant for which the congruence bound is proved here: `d` in the
/// linear regime and `d^{⌈m/2⌉}` in the quadratic one, with `d ≥ 1`.
pub fn congruence_constant(regime: TaylorRegime, degree: u32, m: u32) -> u128 {
    let d = degree.max(1) as u128;
    match regime {
        TaylorRegime::Linear => d,
        TaylorRegime::LinearOrQuadratic => d.pow(m.div_ceil(2)),
    }
}

/// Counts solutions of `P ≡ 0 mod p^m` over the preimage of the residue points
/// where the Taylor hypothesis of `regime` holds.
pub fn congruence_lemma_check(r: &LocalRing, poly: &MultiPoly, regime: TaylorRegime, budget: u64) -> Result<CongruenceCheck> {
    let n = poly.nvars;
    point_budget(r, n, budget)?;
    let (p, m) = (r.p(), r.m());
    let residue = LocalRing::new(p, 1)?;
    let lift = |v: Residue| r.elem(v.value());
    let mut domain = Vec::new();
    for_each_point(&residue, n, |ybar| {
        let y: Vec<_> = ybar.iter().map(|&v| lift(v)).collect();
        let mut ok = poly.linear_taylor(r, &y).iter().any(|&c| r.is_unit(c));
        if regime == TaylorRegime::LinearOrQuadratic {
            ok |= poly.quadratic_taylor(r, &y).iter().any(|&c| r.is_unit(c));
        }
        if ok {
            domain.push(y);
        }
    });
    let fiber = LocalRing::new(p, m.saturating_sub(1).max(1))?;
    let fiber_size = if m == 1 { 1 } else { fiber.modulus().pow(n as u32) };
    let mut count = 0;
    for y0 in &domain {
        for idx in 0..fiber_size {
            let mut k = idx;
            let y: Vec<_> = y0
                .iter()
                .map(|&v| {
                    let t = if m == 1 { 0 } else { k % fiber.modulus() };
                    if m > 1 {
                        k /= fiber.modulus();
                    }
                    r.add(v, r.elem(p * t))
                })
                .collect();
            if r.is_zero(poly.eval(r, &y)) {
                count += 1;
            }
        }
    }
    let q = p as u128;
    let mn = m as u128 * n as u128;
    let loss = match regime {
        TaylorRegime::Linear => m as u128,
        TaylorRegime::LinearOrQuadratic => m.div_ceil(2) as u128,
    };
    Ok(CongruenceCheck {
        regime,
        p,
        m,
        n,
        degree: poly.degree(),
        domain: domain.len() as u64,
        count,
        scale: q.pow((mn - loss) as u32),
        constant: congruence_constant(regime, poly.degree(), m),
    })
}

/// Hypersurface bound over `F_p`: `#{P = 0} ≤ d q^{n-1}` for nonzero `P` of degree `d`.
pub fn hypersurface_bound_holds(r: &LocalRing, poly: &MultiPoly, budget: u64) -> Result<bool> {
    if r.m() != 1 {
        return Err(Error::PreconditionFailed("hypersurface bound needs a prime field".into()));
    }
    if poly.terms.is_empty() {
        return Err(Error::PreconditionFailed("zero polynomial".into()));
    }
    let count = congruence_count_oracle(r, poly, budget)? as u128;
    Ok(count <= poly.degree().max(1) as u128 * (r.p() as u128).pow(poly.nvars as u32 - 1))
}

#[derive(Clone, Debug, Serialize)]
pub struct VolumeReport {
    pub id: u64,
    pub p: u64,
    pub m: u32,
    pub rank: usize,
    pub seed: Option<u64>,
    pub p_tau: Vec<u64>,
    pub p_tau_h: Vec<u64>,
    pub a: Vec<u64>,
    pub count: u64,
    pub centralizer_size: u64,
    pub d_h: DistanceValue,
    #[serde(serialize_with = "ser_ratio")]
    pub bound: Rational,
    #[serde(serialize_with = "ser_ratio")]
    pub ratio: Rational,
    pub degenerate: bool,
}

/// Row-major element codes.
pub fn flat_codes(r: &LocalRing, m: &Matrix<Residue>) -> Vec<u64> {
    r.matrix_codes(m).concat()
}

/// The volume report for `(τ, a)`, flagged degenerate when `a ∈ HZ`.
pub fn volume_report(st: &StableTau<LocalRing>, a: &Matrix<Residue>, budget: u64) -> Result<VolumeReport> {
    let r = st.ring();
    if r.p() == 2 {
        return Err(Error::CharacteristicTwo);
    }
    let x = XScheme::new(st.clone(), a.clone())?;
    let units = st.centralizer_units(budget)?;
    let mut count = 0u64;
    for y in &units {
        if x.contains(y)? {
            count += 1;
        }
    }
    let d = distance_d_h(r, a)?;
    let size = units.len() as i128;
    let bound = bound_factor(r.p(), &d) * Rational::from_integer(size);
    let p_tau = r.charpoly(st.tau())?;
    let p_tau_h = r.charpoly(&ggp::h_block(st.tau()))?;
    Ok(VolumeReport {
        id: 0,
        p: r.p(),
        m: r.m(),
        rank: st.dim(),
        seed: None,
        p_tau: r.poly_codes(&p_tau),
        p_tau_h: r.poly_codes(&p_tau_h),
        a: flat_codes(r, a),
        count,
        centralizer_size: units.len() as u64,
        d_h: d,
        ratio: Rational::from_integer(count as i128) / bound,
        bound,
        degenerate: is_in_hz(r, a),
    })
}

/// Like [`volume_report`], but rejects `a ∈ HZ`.
pub fn verify_volume_bound(st: &StableTau<LocalRing>, a: &Matrix<Residue>, budget: u64) -> Result<VolumeReport> {
    if is_in_hz(st.ring(), a) {
        return Err(Error::DegenerateInstance);
    }
    volume_report(st, a, budget)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub enum SweepMode {
    /// Every charpoly pair against every class in `H\G/Z`.
    Exhaustive,
    /// Random `(τ, a)`; with `m ≥ 2`, half the `a` are congruent to `HZ` mod `p`.
    Seeded { samples: usize, seed: u64 },
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SweepConfig {
    pub p: u64,
    pub m: u32,
    pub rank: usize,
    pub mode: SweepMode,
    pub budget: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepSummary {
    pub p: u64,
    pub m: u32,
    pub rank: usize,
    pub instances: usize,
    pub degenerate: usize,
    /// Largest `count / bound` over non-degenerate instances.
    #[serde(serialize_with = "ser_ratio")]
    pub c_emp: Rational,
    /// Largest ratio over instances with `d_H < 1`.
    #[serde(serialize_with = "ser_ratio")]
    pub c_emp_near: Rational,
    /// Largest ratio over instances with `d_H = 1`.
    #[serde(serialize_with = "ser_ratio")]
    pub c_emp_far: Rational,
}

pub fn summarize(cfg: &SweepConfig, reports: &[VolumeReport]) -> SweepSummary {
    let live = || reports.iter().filter(|r| !r.degenerate);
    let max = |it: &mut dyn Iterator<Item = &VolumeReport>| it.map(|r| r.ratio).max().unwrap_or_else(Rational::zero);
    SweepSummary {
        p: cfg.p,
        m: cfg.m,
        rank: cfg.rank,
        instances: reports.len(),
        degenerate: reports.iter().filter(|r| r.degenerate).count(),
        c_emp: max(&mut live()),
        c_emp_near: max(&mut live().filter(|r| !r.d_h.at_infinity)),
        c_emp_far: max(&mut live().filter(|r| r.d_h.at_infinity)),
    }
}

/// A random `a ∉ HZ`; with `near`, `a ≡ h z mod p`.
pub fn random_non_hz<G: Rng + ?Sized>(r: &LocalRing, dim: usize, near: bool, rng: &mut G) -> Matrix<Residue> {
    loop {
        let a = if near && r.m() >= 2 {
            let h = embed_h(r, &r.random_invertible(dim - 1, rng));
            let z = r.random_unit(rng);
            let x = Matrix::from_fn(dim, |_, _| r.mul(r.elem(r.p()), r.random_element(rng)));
            r.mat_scale(z, &r.mat_mul(&h, &r.mat_add(&r.identity(dim), &x)))
        } else {
            r.random_invertible(dim, rng)
        };
        if !is_in_hz(r, &a) {
            return a;
        }
    }
}

/// Volume reports for a sweep, sorted by instance id.
pub fn volume_sweep(cfg: &SweepConfig) -> Result<Vec<VolumeReport>> {
    if cfg.p == 2 {
        return Err(Error::CharacteristicTwo);
    }
    let r = LocalRing::new(cfg.p, cfg.m)?;
    let n = cfg.rank - 1;
    let mut reports: Vec<VolumeReport> = match cfg.mode {
        SweepMode::Exhaustive => {
            let pairs = ggp::coprime_pairs(&r, n, cfg.budget)?;
            let reps = ggp::h_coset_representatives(&r, cfg.rank, cfg.budget)?;
            let reps: Vec<_> = reps.into_iter().filter(|a| !is_in_hz(&r, a)).collect();
            let per: Vec<Result<Vec<VolumeReport>>> = pairs
                .par_iter()
                .enumerate()
                .map(|(i, (p, ph))| {
                    let st = StableTau::new(r, ggp::construct_tau(&r, p, ph)?)?;
                    reps.iter()
                        .enumerate()
                        .map(|(j, a)| {
                            let mut rep = volume_report(&st, a, cfg.budget)?;
                            rep.id = (i * reps.len() + j) as u64;
                            Ok(rep)
                        })
                        .collect()
                })
                .collect();
            let mut out = Vec::new();
            for v in per {
                out.extend(v?);
            }
            out
        }
        SweepMode::Seeded { samples, seed } => (0..samples)
            .into_par_iter()
            .map(|i| {
                let s = seed.wrapping_add(i as u64);
                let mut rng = ChaCha8Rng::seed_from_u64(s);
                let (p, ph) = ggp::random_coprime_pair(&r, n, &mut rng);
                let st = StableTau::new(r, ggp::construct_tau(&r, &p, &ph)?)?;
                let a = random_non_hz(&r, cfg.rank, i % 2 == 1, &mut rng);
                let mut rep = volume_report(&st, &a, cfg.budget)?;
                rep.id = i as u64;
                rep.seed = Some(s);
                Ok(rep)
            })
            .collect::<Result<Vec<_>>>()?,
    };
    reports.sort_by_key(|r| r.id);
    Ok(reports)
}

/// Checks: if `a mod p` is central and `a²` is central, then `a` is central.
pub fn also_central_square_lemma(r: &LocalRing, a: &Matrix<Residue>) -> Result<bool> {
    if r.p() == 2 {
        return Err(Error::CharacteristicTwo);
    }
    let residue = LocalRing::new(r.p(), 1)?;
    let abar = a.map(|x| residue.elem(x.value()));
    let hyp = residue.is_scalar_matrix(&abar) && r.is_scalar_matrix(&r.mat_mul(a, a));
    Ok(!hyp || r.is_scalar_matrix(a))
}

/// A function on `H(R)` stored by matrix codes.
#[derive(Clone, Debug, Default)]
pub struct HFunction {
    values: HashMap<Vec<u64>, Rational>,
}

impl HFunction {
    pub fn constant(r: &LocalRing, h: &[Matrix<Residue>], c: Rational) -> Self {
        HFunction { values: h.iter().map(|x| (flat_codes(r, x), c)).collect() }
    }

    /// Random values in `0..=max`, constant on right `H_{τ_H}`-cosets.
    pub fn random_invariant<G: Rng + ?Sized>(
        r: &LocalRing,
        h: &[Matrix<Residue>],
        units: &[Matrix<Residue>],
        max: i128,
        rng: &mut G,
    ) -> Self {
        let mut values = HashMap::new();
        for x in h {
            let key = flat_codes(r, x);
            if values.contains_key(&key) {
                continue;
            }
            let v = Rational::from_integer(rng.gen_range(0..=max));
            for u in units {
                values.insert(flat_codes(r, &r.mat_mul(x, u)), v);
            }
        }
        HFunction { values }
    }

    pub fn get(&self, r: &LocalRing, x: &Matrix<Residue>) -> Rational {
        self.values.get(&flat_codes(r, x)).copied().unwrap_or_else(Rational::zero)
    }

    /// `‖u‖²` for the probability measure on `H`.
    pub fn norm_sq(&self) -> Rational {
        let s: Rational = self.values.values().map(|v| v * v).sum();
        s / Rational::from_integer(self.values.len().max(1) as i128)
    }

    pub fn is_right_invariant(&self, r: &LocalRing, units: &[Matrix<Residue>]) -> bool {
        self.values.iter().all(|(k, v)| {
            let x = Matrix::from_fn(units[0].dim(), |i, j| r.elem(k[i * units[0].dim() + j]));
            units.iter().all(|u| self.get(r, &r.mat_mul(&x, u)) == *v)
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BilinearReport {
    #[serde(serialize_with = "ser_ratio")]
    pub i: Rational,
    /// `(1/|H|²) ‖u₁‖² ‖u₂‖²`, the square of the trivial bound.
    #[serde(serialize_with = "ser_ratio")]
    pub trivial_bound_sq: Rational,
    /// Square of the refined bound for the given `C`, when `γ ∉ HZ`.
    #[serde(serialize_with = "ser_ratio_opt")]
    pub refined_bound_sq: Option<Rational>,
}

fn ser_ratio_opt<S: Serializer>(r: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_none(),
    }
}

impl BilinearReport {
    pub fn trivial_holds(&self) -> bool {
        self.i * self.i <= self.trivial_bound_sq
    }

    pub fn refined_holds(&self) -> bool {
        self.refined_bound_sq.map_or(true, |b| self.i * self.i <= b)
    }
}

/// `I = (1/|H|²) Σ_{x⁻¹γy ∈ G_τ} u₁(x)u₂(y)` with both bounds.
///
/// For each `x` there is at most one `y`, read off the decomposition of `γ⁻¹x`.
pub fn bilinear_form_check(
    st: &StableTau<LocalRing>,
    h: &[Matrix<Residue>],
    gamma: &Matrix<Residue>,
    u1: &HFunction,
    u2: &HFunction,
    c: Rational,
) -> Result<BilinearReport> {
    let r = st.ring();
    let g_inv = r.mat_inverse(gamma)?;
    let mut sum = Rational::zero();
    for x in h {
        if let Ok(dec) = decompose_h_gtau(st, &r.mat_mul(&g_inv, x)) {
            sum += u1.get(r, x) * u2.get(r, &dec.h);
        }
    }
    let hs = Rational::from_integer(h.len() as i128);
    let i = sum / (hs * hs);
    let base = u1.norm_sq() * u2.norm_sq() / (hs * hs);
    let refined_bound_sq = if is_in_hz(r, gamma) {
        None
    } else {
        let f = c * bound_factor(r.p(), &distance_d_h(r, gamma)?);
        Some(f * f * base)
    };
    Ok(BilinearReport { i, trivial_bound_sq: base, refined_bound_sq })
}

/// `H(R)` as embedded matrices.
pub fn h_group(r: &LocalRing, dim: usize) -> Vec<Matrix<Residue>> {
    r.general_linear_group(dim - 1).iter().map(|a| embed_h(r, a)).collect()
}
