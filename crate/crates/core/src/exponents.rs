//! Exact bookkeeping of the subconvexity exponent as a function of `(n, ϑ)`.
//!
//! All exponents are powers of `T`, with `L = T^α`.

use crate::error::{Error, Result};
use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::Serialize;

pub type Q = Ratio<i64>;

fn ser_q<S: serde::Serializer>(r: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ExponentParams {
    pub n: u32,
    #[serde(serialize_with = "ser_q")]
    pub theta: Q,
    #[serde(serialize_with = "ser_q")]
    pub alpha: Q,
}

impl ExponentParams {
    pub fn new(n: u32, theta: Q, alpha: Q) -> Result<Self> {
        validate(n, theta)?;
        if alpha <= Q::zero() {
            return Err(Error::PreconditionFailed(format!("alpha = {alpha} must be positive")));
        }
        Ok(ExponentParams { n, theta, alpha })
    }
}

fn validate(n: u32, theta: Q) -> Result<()> {
    if n == 0 {
        return Err(Error::PreconditionFailed("n must be at least 1".into()));
    }
    if theta < Q::zero() || theta >= Q::new(1, 2) {
        return Err(Error::PreconditionFailed(format!("theta = {theta} must lie in [0, 1/2)")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TermOrigin {
    /// `L^{-(1-2ϑ)j}`.
    Decay,
    /// `L^{(2(n+1)²-n)j} · L^j / T^{1/2}`.
    DeltaMain,
    /// `L^{(2(n+1)²-n)j} / R`.
    DeltaFloor,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ExponentTerm {
    pub origin: TermOrigin,
    pub j: u32,
    #[serde(serialize_with = "ser_q")]
    pub exponent: Q,
}

/// How the `1/R` term is converted to a power of `T`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RExponent {
    /// `R ≥ T^{1/4}`.
    Floor,
    /// `T = q^{2m}`, `R = q^{⌈m/2⌉}`.
    Exact { m: u32 },
}

impl RExponent {
    fn value(self) -> Q {
        match self {
            RExponent::Floor => Q::new(-1, 4),
            RExponent::Exact { m } => Q::new(-(m.div_ceil(2) as i64), 2 * m as i64),
        }
    }
}

/// `A = (2(n+1)² - n)(n+1)`.
pub fn a_constant(n: u32) -> i64 {
    let n = n as i64;
    (2 * (n + 1) * (n + 1) - n) * (n + 1)
}

/// The weight `2(n+1)² - n` carried by `Δ_j`.
fn weight(n: u32) -> i64 {
    let n = n as i64;
    2 * (n + 1) * (n + 1) - n
}

/// `(1 - 2ϑ)/(4n(n+1)(A + 1 - 2ϑ))`, the supremum of admissible `δ_n`.
pub fn delta_bound(n: u32, theta: Q) -> Result<Q> {
    validate(n, theta)?;
    let one = Q::one();
    let nn = n as i64;
    let a = Q::from_integer(a_constant(n));
    Ok((one - theta * 2) / (Q::from_integer(4 * nn * (nn + 1)) * (a + one - theta * 2)))
}

/// Exponents of `Δ_j ≪ L^j/T^{1/2} + 1/R`.
pub fn delta_j_exponents(j: u32, alpha: Q, r: RExponent) -> [ExponentTerm; 2] {
    [
        ExponentTerm { origin: TermOrigin::DeltaMain, j, exponent: alpha * j as i64 - Q::new(1, 2) },
        ExponentTerm { origin: TermOrigin::DeltaFloor, j, exponent: r.value() },
    ]
}

/// The three terms of `L^{-(1-2ϑ)} + L^A (L^{n+1}/T^{1/2} + 1/T^{1/4})`.
pub fn final_display_terms(params: &ExponentParams) -> [ExponentTerm; 3] {
    let j = params.n + 1;
    let carried = params.alpha * weight(params.n) * j as i64;
    let [main, floor] = delta_j_exponents(j, params.alpha, RExponent::Floor);
    [
        ExponentTerm {
            origin: TermOrigin::Decay,
            j: 1,
            exponent: -(Q::one() - params.theta * 2) * params.alpha,
        },
        ExponentTerm { exponent: carried + main.exponent, ..main },
        ExponentTerm { exponent: carried + floor.exponent, ..floor },
    ]
}

#[derive(Clone, Debug, Serialize)]
pub struct Optimum {
    pub n: u32,
    #[serde(serialize_with = "ser_q")]
    pub theta: Q,
    pub a: i64,
    #[serde(serialize_with = "ser_q")]
    pub alpha_star: Q,
    /// Saving in `L/T^{n(n+1)/2+ε} ≪ T^{-δ}`.
    #[serde(serialize_with = "ser_q")]
    pub delta: Q,
    /// The stated supremum for `δ_n` in `T^{2n(n+1)(1/4-δ_n)}`.
    #[serde(serialize_with = "ser_q")]
    pub delta_bound: Q,
    /// `δ_n` obtained by rewriting `T^{n(n+1)/2-δ}` as `T^{2n(n+1)(1/4-δ_n)}`.
    #[serde(serialize_with = "ser_q")]
    pub delta_n_from_saving: Q,
    /// `delta_bound / delta_n_from_saving`.
    #[serde(serialize_with = "ser_q")]
    pub normalization_ratio: Q,
    pub terms: [ExponentTerm; 3],
    pub first_equals_third: bool,
    pub rank_alpha_at_most_quarter: bool,
    pub second_dominated: bool,
    pub delta_is_rank_multiple_of_bound: bool,
}

impl Optimum {
    pub fn consistent(&self) -> bool {
        self.first_equals_third
            && self.rank_alpha_at_most_quarter
            && self.second_dominated
            && self.delta_is_rank_multiple_of_bound
            && self.terms[0].exponent == -self.delta
    }
}

/// `α* = 1/(4(A + 1 - 2ϑ))` balancing the first and third terms, and `δ`.
pub fn optimize_alpha(n: u32, theta: Q) -> Result<Optimum> {
    validate(n, theta)?;
    let a = a_constant(n);
    let one = Q::one();
    let denom = (Q::from_integer(a) + one - theta * 2) * 4;
    let alpha_star = one / denom;
    let delta = (one - theta * 2) / denom;
    let params = ExponentParams::new(n, theta, alpha_star)?;
    let terms = final_display_terms(&params);
    let nn = n as i64;
    let rank_pairs = nn * (nn + 1);
    let bound = delta_bound(n, theta)?;
    let delta_n_from_saving = delta / (2 * rank_pairs);
    Ok(Optimum {
        n,
        theta,
        a,
        alpha_star,
        delta,
        delta_bound: bound,
        delta_n_from_saving,
        normalization_ratio: if delta_n_from_saving.is_zero() { Q::zero() } else { bound / delta_n_from_saving },
        terms,
        first_equals_third: terms[0].exponent == terms[2].exponent,
        rank_alpha_at_most_quarter: alpha_star * (nn + 1) <= Q::new(1, 4),
        second_dominated: terms[1].exponent <= terms[2].exponent,
        delta_is_rank_multiple_of_bound: delta == bound * rank_pairs,
    })
}

/// `n(n+1)/2 + ε - δ`, the total exponent of `T` in the final bound.
pub fn final_exponent(n: u32, theta: Q, epsilon: Q) -> Result<Q> {
    let opt = optimize_alpha(n, theta)?;
    let nn = n as i64;
    Ok(Q::new(nn * (nn + 1), 2) + epsilon - opt.delta)
}
