use crate::emit::Emitter;
use crate::{CliError, ModeArg, PairArgs, RingArgs, SweepArgs};
use ggp_algebra::exponents::{self, Q};
use ggp_algebra::ggp::{self, StableTau};
use ggp_algebra::matrix::{MatEnum, MatOps, Matrix};
use ggp_algebra::microlocal::{self, DepthFrame, InductionDatum};
use ggp_algebra::poly::{PolyEnum, PolyOps};
use ggp_algebra::ring::{BinaryField, FiniteRing, GaloisField, LocalRing, Residue};
use ggp_algebra::transversality::{self as tv, SearchOptions, TangencyProbe, TangentialMode, XScheme};
use ggp_algebra::volume::{self, HFunction, Rational, SweepConfig, SweepMode};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

type Outcome = Result<bool, CliError>;

fn ring(args: &RingArgs) -> Result<LocalRing, CliError> {
    if args.m == 0 {
        return Err(CliError::Config("m must be positive".into()));
    }
    LocalRing::new(args.p, args.m).map_err(|e| CliError::Config(e.to_string()))
}

/// Parses `"a,b;c,d"` as a square matrix of integers reduced into `r`.
pub fn parse_matrix(r: &LocalRing, s: &str) -> Result<Matrix<Residue>, CliError> {
    let rows: Vec<Vec<i64>> = s
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|x| x.trim().parse::<i64>().map_err(|e| CliError::Config(format!("bad entry {x:?}: {e}"))))
                .collect()
        })
        .collect::<Result<_, _>>()?;
    let n = rows.len();
    if n < 2 || rows.iter().any(|row| row.len() != n) {
        return Err(CliError::Config(format!("{s:?} is not a square matrix of size at least 2")));
    }
    if n > ggp_algebra::matrix::MAX_DIM {
        return Err(CliError::Config(format!("size {n} exceeds {}", ggp_algebra::matrix::MAX_DIM)));
    }
    Ok(Matrix::from_fn(n, |i, j| r.elem_i64(rows[i][j])))
}

fn stable(r: &LocalRing, tau: Matrix<Residue>) -> Result<StableTau<LocalRing>, CliError> {
    if !ggp::is_stable(r, &tau) {
        return Err(CliError::Config("tau is not stable".into()));
    }
    Ok(StableTau::new(*r, tau)?)
}

fn pair(args: &PairArgs) -> Result<(LocalRing, StableTau<LocalRing>, Matrix<Residue>), CliError> {
    let r = ring(&args.ring)?;
    let tau = parse_matrix(&r, &args.tau)?;
    let a = parse_matrix(&r, &args.a)?;
    if a.dim() != tau.dim() {
        return Err(CliError::Config("tau and a have different sizes".into()));
    }
    if !r.is_invertible(&a) {
        return Err(CliError::Config("a is not invertible".into()));
    }
    let st = stable(&r, tau)?;
    Ok((r, st, a))
}

fn codes<R: FiniteRing>(r: &R, m: &Matrix<R::Elem>) -> Vec<u64> {
    r.matrix_codes(m).concat()
}

fn check_rank(rank: usize) -> Result<(), CliError> {
    if !(2..=ggp_algebra::matrix::MAX_DIM).contains(&rank) {
        return Err(CliError::Config(format!("rank {rank} outside 2..={}", ggp_algebra::matrix::MAX_DIM)));
    }
    Ok(())
}

#[derive(Serialize)]
struct StabilityRecord {
    p: u64,
    m: u32,
    tau: Vec<u64>,
    p_tau: Vec<u64>,
    p_tau_h: Vec<u64>,
    delta: u64,
    e_cyclic: bool,
    e_star_cyclic: bool,
    charpolys_coprime: bool,
    stable: bool,
}

pub fn stability_check(out: &mut Emitter, args: &RingArgs, tau: &str) -> Outcome {
    let r = ring(args)?;
    let tau = parse_matrix(&r, tau)?;
    let dim = tau.dim();
    let e = ggp::e_vec(&r, dim);
    let p_tau = r.charpoly(&tau)?;
    let p_tau_h = r.charpoly(&ggp::h_block(&tau))?;
    out.record(
        "stability",
        &StabilityRecord {
            p: r.p(),
            m: r.m(),
            tau: codes(&r, &tau),
            p_tau: r.poly_codes(&p_tau),
            p_tau_h: r.poly_codes(&p_tau_h),
            delta: ggp::stability_delta(&r, &tau).value(),
            e_cyclic: ggp::krylov_is_cyclic(&r, &tau, &e),
            e_star_cyclic: r.is_invertible(&ggp::dual_krylov_matrix(&r, &tau, &e)),
            charpolys_coprime: r.monic_coprime(&p_tau, &p_tau_h),
            stable: ggp::is_stable(&r, &tau),
        },
    )?;
    Ok(true)
}

#[derive(Serialize)]
struct PointRecord {
    point: Vec<u64>,
}

#[derive(Serialize)]
struct XSummary {
    p: u64,
    m: u32,
    tau: Vec<u64>,
    a: Vec<u64>,
    in_hz: bool,
    x_count: usize,
    h_count: usize,
}

pub fn xscheme_enumerate(out: &mut Emitter, args: &PairArgs, budget: u64) -> Outcome {
    let (r, st, a) = pair(args)?;
    let x = XScheme::new(st.clone(), a.clone())?;
    let (pts, total) = tv::enumerate_x_points(&x, budget)?;
    for y in &pts {
        out.record("point", &PointRecord { point: codes(&r, y) })?;
    }
    out.record(
        "summary",
        &XSummary {
            p: r.p(),
            m: r.m(),
            tau: codes(&r, st.tau()),
            a: codes(&r, &a),
            in_hz: ggp::is_in_hz(&r, &a),
            x_count: pts.len(),
            h_count: total,
        },
    )?;
    Ok(true)
}

#[derive(Serialize)]
struct TangencyRecord {
    point: Vec<u64>,
    tangential: bool,
    doubly_tangential: bool,
    witness: Option<String>,
}

#[derive(Serialize)]
struct TangencySummary {
    x_count: usize,
    h_count: usize,
    tangential_everywhere: bool,
    doubly_tangential_everywhere: bool,
}

pub fn xscheme_tangency(out: &mut Emitter, args: &PairArgs, budget: u64) -> Outcome {
    let (r, st, a) = pair(args)?;
    let probe = TangencyProbe::new(XScheme::new(st, a)?);
    let (pts, total) = tv::enumerate_x_points(probe.scheme(), budget)?;
    let (mut all1, mut all2) = (true, true);
    for y in &pts {
        let rep = probe.report(y)?;
        all1 &= rep.tangential;
        all2 &= rep.doubly_tangential;
        out.record(
            "tangency",
            &TangencyRecord {
                point: codes(&r, y),
                tangential: rep.tangential,
                doubly_tangential: rep.doubly_tangential,
                witness: rep.witness.map(|w| format!("{w:?}")),
            },
        )?;
    }
    out.record(
        "summary",
        &TangencySummary {
            x_count: pts.len(),
            h_count: total,
            tangential_everywhere: all1,
            doubly_tangential_everywhere: all2,
        },
    )?;
    Ok(true)
}

fn parse_rational(s: &str) -> Result<Rational, CliError> {
    s.trim().parse::<Rational>().map_err(|e| CliError::Config(format!("bad rational {s:?}: {e}")))
}

pub fn volume_verify(out: &mut Emitter, args: &PairArgs, max_ratio: Option<&str>, budget: u64) -> Outcome {
    let (_, st, a) = pair(args)?;
    let limit = max_ratio.map(parse_rational).transpose()?;
    let rep = volume::verify_volume_bound(&st, &a, budget).map_err(|e| match e {
        ggp_algebra::Error::DegenerateInstance => CliError::Config(e.to_string()),
        other => other.into(),
    })?;
    out.record("volume", &rep)?;
    Ok(limit.map_or(true, |l| rep.ratio <= l))
}

fn sweep_mode(args: &SweepArgs, seed: u64) -> Result<SweepMode, CliError> {
    Ok(match args.mode {
        ModeArg::Exhaustive => SweepMode::Exhaustive,
        ModeArg::Seeded if args.samples == 0 => return Err(CliError::Config("samples must be positive".into())),
        ModeArg::Seeded => SweepMode::Seeded { samples: args.samples, seed },
    })
}

#[derive(Serialize)]
struct UniformitySummary {
    baseline_p: u64,
    #[serde(serialize_with = "ser_rational")]
    baseline_c_emp: Rational,
    #[serde(serialize_with = "ser_rational")]
    max_c_emp: Rational,
    /// Every `C_emp` is at most twice the baseline.
    uniform: bool,
    failures: usize,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

pub fn volume_sweep(out: &mut Emitter, args: &SweepArgs, ps: &[u64], ms: &[u32], seed: u64, budget: u64) -> Outcome {
    check_rank(args.rank)?;
    let mode = sweep_mode(args, seed)?;
    let mut configs = Vec::new();
    for &p in ps {
        for &m in ms {
            if p == 2 || m == 0 {
                return Err(CliError::Config(format!("(p, m) = ({p}, {m}) is not supported")));
            }
            LocalRing::new(p, m).map_err(|e| CliError::Config(e.to_string()))?;
            configs.push(SweepConfig { p, m, rank: args.rank, mode, budget });
        }
    }
    let mut by_p: BTreeMap<u64, Rational> = BTreeMap::new();
    for cfg in &configs {
        let reports = volume::volume_sweep(cfg)?;
        for rep in &reports {
            out.record("instance", rep)?;
        }
        let s = volume::summarize(cfg, &reports);
        let e = by_p.entry(cfg.p).or_insert(s.c_emp);
        *e = (*e).max(s.c_emp);
        out.record("summary", &s)?;
    }
    let (&baseline_p, &baseline) = by_p.iter().next().expect("at least one prime");
    let max = by_p.values().copied().max().expect("at least one prime");
    let failures = by_p.values().filter(|&&c| c > baseline * 2).count();
    out.record(
        "uniformity",
        &UniformitySummary { baseline_p, baseline_c_emp: baseline, max_c_emp: max, uniform: failures == 0, failures },
    )?;
    Ok(failures == 0)
}

#[derive(Serialize)]
struct TangentialSummary {
    p: u64,
    m: u32,
    rank: usize,
    instances: usize,
    tangential: usize,
    doubly_tangential: usize,
    failures: usize,
}

pub fn verify_tangential(out: &mut Emitter, args: &SweepArgs, ring_args: &RingArgs, seed: u64, budget: u64) -> Outcome {
    check_rank(args.rank)?;
    let r = ring(ring_args)?;
    if r.p() == 2 {
        return Err(CliError::Config("tangential sweep needs p odd".into()));
    }
    let mode = match sweep_mode(args, seed)? {
        SweepMode::Exhaustive => TangentialMode::Exhaustive,
        SweepMode::Seeded { samples, seed } => TangentialMode::Seeded { samples, seed },
    };
    let recs = tv::tangential_sweep(&r, args.rank, mode, budget)?;
    for t in &recs {
        out.record("instance", t)?;
    }
    let failures = recs.iter().filter(|t| !t.agrees()).count();
    out.record(
        "summary",
        &TangentialSummary {
            p: r.p(),
            m: r.m(),
            rank: args.rank,
            instances: recs.len(),
            tangential: recs.iter().filter(|t| t.tangential).count(),
            doubly_tangential: recs.iter().filter(|t| t.doubly_tangential).count(),
            failures,
        },
    )?;
    Ok(failures == 0)
}

#[derive(Serialize)]
struct TransversalitySummary {
    p: u64,
    m: u32,
    rank: usize,
    instances: usize,
    full: usize,
    exceptions: usize,
}

pub fn verify_transversality(out: &mut Emitter, rank: usize, ring_args: &RingArgs, budget: u64) -> Outcome {
    check_rank(rank)?;
    let r = ring(ring_args)?;
    let recs = tv::transversality_sweep(&r, rank, budget)?;
    for t in &recs {
        out.record("instance", t)?;
    }
    let exceptions = recs.iter().filter(|t| t.is_exception()).count();
    out.record(
        "summary",
        &TransversalitySummary {
            p: r.p(),
            m: r.m(),
            rank,
            instances: recs.len(),
            full: recs.iter().filter(|t| t.x_count == t.h_count).count(),
            exceptions,
        },
    )?;
    Ok(r.p() == 2 || rank < 3 || exceptions == 0)
}

#[derive(Serialize)]
struct BilinearRecord {
    id: u64,
    seed: u64,
    p_tau: Vec<u64>,
    p_tau_h: Vec<u64>,
    gamma: Vec<u64>,
    #[serde(flatten)]
    report: volume::BilinearReport,
    trivial_holds: bool,
    refined_holds: bool,
}

#[derive(Serialize)]
struct SaturationRecord {
    p_tau: Vec<u64>,
    p_tau_h: Vec<u64>,
    #[serde(serialize_with = "ser_rational")]
    i: Rational,
    h_order: usize,
    saturated: bool,
}

#[derive(Serialize)]
struct BilinearSummary {
    p: u64,
    m: u32,
    rank: usize,
    #[serde(serialize_with = "ser_rational")]
    constant: Rational,
    instances: usize,
    trivial_failures: usize,
    refined_failures: usize,
    saturated: bool,
}

pub fn bilinear_check(
    out: &mut Emitter,
    rank: usize,
    ring_args: &RingArgs,
    constant: &str,
    samples: usize,
    seed: u64,
    budget: u64,
) -> Outcome {
    check_rank(rank)?;
    let c = parse_rational(constant)?;
    let r = ring(ring_args)?;
    if r.p() == 2 {
        return Err(CliError::Config("bilinear check needs p odd".into()));
    }
    let h = volume::h_group(&r, rank);
    let pairs = ggp::coprime_pairs(&r, rank - 1, budget)?;
    let gammas: Vec<_> =
        ggp::h_coset_representatives(&r, rank, budget)?.into_iter().filter(|g| !ggp::is_in_hz(&r, g)).collect();
    let (p0, ph0) = &pairs[0];
    let st0 = StableTau::new(r, ggp::construct_tau(&r, p0, ph0)?)?;
    let one = HFunction::constant(&r, &h, Rational::from_integer(1));
    let sat = volume::bilinear_form_check(&st0, &h, &r.identity(rank), &one, &one, c)?;
    let saturated = sat.i == Rational::new(1, h.len() as i128) && sat.i * sat.i == sat.trivial_bound_sq;
    out.record(
        "saturation",
        &SaturationRecord { p_tau: r.poly_codes(p0), p_tau_h: r.poly_codes(ph0), i: sat.i, h_order: h.len(), saturated },
    )?;
    let per: Vec<Result<Vec<BilinearRecord>, ggp_algebra::Error>> = pairs
        .par_iter()
        .enumerate()
        .map(|(i, (p, ph))| {
            let st = StableTau::new(r, ggp::construct_tau(&r, p, ph)?)?;
            let units = st.centralizer_units(budget)?;
            let mut recs = Vec::new();
            for (j, g) in gammas.iter().enumerate() {
                for s in 0..samples {
                    let id = ((i * gammas.len() + j) * samples + s) as u64;
                    let inst_seed = seed.wrapping_add(id);
                    let mut rng = ChaCha8Rng::seed_from_u64(inst_seed);
                    let u1 = HFunction::random_invariant(&r, &h, &units, 4, &mut rng);
                    let u2 = HFunction::random_invariant(&r, &h, &units, 4, &mut rng);
                    let report = volume::bilinear_form_check(&st, &h, g, &u1, &u2, c)?;
                    recs.push(BilinearRecord {
                        id,
                        seed: inst_seed,
                        p_tau: r.poly_codes(p),
                        p_tau_h: r.poly_codes(ph),
                        gamma: codes(&r, g),
                        trivial_holds: report.trivial_holds(),
                        refined_holds: report.refined_holds(),
                        report,
                    });
                }
            }
            Ok(recs)
        })
        .collect();
    let (mut instances, mut trivial_failures, mut refined_failures) = (0, 0, 0);
    for recs in per {
        for rec in recs? {
            instances += 1;
            trivial_failures += usize::from(!rec.trivial_holds);
            refined_failures += usize::from(!rec.refined_holds);
            out.record("instance", &rec)?;
        }
    }
    out.record(
        "summary",
        &BilinearSummary {
            p: r.p(),
            m: r.m(),
            rank,
            constant: c,
            instances,
            trivial_failures,
            refined_failures,
            saturated,
        },
    )?;
    Ok(saturated && trivial_failures == 0 && refined_failures == 0)
}

#[derive(Serialize)]
struct HitRecord {
    field: String,
    p_tau: Vec<u64>,
    p_tau_h: Vec<u64>,
    tau: Vec<u64>,
    a: Vec<u64>,
    x_count: usize,
    h_count: usize,
    full: bool,
    replay: bool,
}

#[derive(Serialize)]
struct FieldSummary {
    field: String,
    characteristic: u64,
    hits: usize,
    full_hits: usize,
    replay_failures: usize,
}

#[derive(Serialize)]
struct SearchSummary {
    rank: usize,
    hits: usize,
    full_hits: usize,
    replay_failures: usize,
    /// Hits in odd characteristic, which contradict transversality from rank 3 on.
    odd_characteristic_hits: usize,
}

fn search_field<R: FiniteRing>(
    out: &mut Emitter,
    label: &str,
    characteristic: u64,
    r: &R,
    rank: usize,
    opts: SearchOptions,
) -> Result<FieldSummary, CliError> {
    let hits = tv::counterexample_search(r, rank, opts)?;
    let replays: Vec<bool> = hits
        .par_iter()
        .map(|h| tv::replay_counterexample(r, h, opts.budget))
        .collect::<Result<_, _>>()?;
    for (h, &replay) in hits.iter().zip(&replays) {
        out.record(
            "hit",
            &HitRecord {
                field: label.to_string(),
                p_tau: r.poly_codes(&h.p_tau),
                p_tau_h: r.poly_codes(&h.p_tau_h),
                tau: codes(r, &h.tau),
                a: codes(r, &h.a),
                x_count: h.x_count,
                h_count: h.h_count,
                full: h.is_full(),
                replay,
            },
        )?;
    }
    let summary = FieldSummary {
        field: label.to_string(),
        characteristic,
        hits: hits.len(),
        full_hits: hits.iter().filter(|h| h.is_full()).count(),
        replay_failures: replays.iter().filter(|&&b| !b).count(),
    };
    out.record("field", &summary)?;
    Ok(summary)
}

enum FieldSpec {
    Binary(u32),
    Prime(u64),
    PrimeSquare(u64),
}

fn parse_field(s: &str) -> Result<FieldSpec, CliError> {
    let bad = || CliError::Config(format!("unsupported field {s:?}; expected F<q>"));
    let q: u64 = s.trim().strip_prefix('F').ok_or_else(bad)?.parse().map_err(|_| bad())?;
    if q >= 2 && q.is_power_of_two() {
        let k = q.trailing_zeros();
        return if k <= 8 { Ok(FieldSpec::Binary(k)) } else { Err(bad()) };
    }
    if GaloisField::new(q, 1).is_ok() {
        return Ok(FieldSpec::Prime(q));
    }
    let p = (q as f64).sqrt().round() as u64;
    if p * p == q && GaloisField::new(p, 2).is_ok() {
        return Ok(FieldSpec::PrimeSquare(p));
    }
    Err(bad())
}

pub fn search_counterexample(
    out: &mut Emitter,
    rank: usize,
    fields: &[String],
    require_full: bool,
    full_enumeration: bool,
    budget: u64,
) -> Outcome {
    check_rank(rank)?;
    let specs: Vec<(String, FieldSpec)> =
        fields.iter().map(|f| parse_field(f).map(|s| (f.trim().to_string(), s))).collect::<Result<_, _>>()?;
    let opts = SearchOptions { budget, full_enumeration, require_full };
    let mut sums = Vec::new();
    for (label, spec) in &specs {
        let s = match *spec {
            FieldSpec::Binary(k) => search_field(out, label, 2, &BinaryField::new(k)?, rank, opts)?,
            FieldSpec::Prime(p) => search_field(out, label, p, &LocalRing::new(p, 1)?, rank, opts)?,
            FieldSpec::PrimeSquare(p) => search_field(out, label, p, &GaloisField::new(p, 2)?, rank, opts)?,
        };
        sums.push(s);
    }
    let summary = SearchSummary {
        rank,
        hits: sums.iter().map(|s| s.hits).sum(),
        full_hits: sums.iter().map(|s| s.full_hits).sum(),
        replay_failures: sums.iter().map(|s| s.replay_failures).sum(),
        odd_characteristic_hits: sums.iter().filter(|s| s.characteristic != 2).map(|s| s.hits).sum(),
    };
    out.record("summary", &summary)?;
    Ok(summary.replay_failures == 0 && (rank < 3 || summary.odd_characteristic_hits == 0))
}

pub fn witness_gl6(out: &mut Emitter, p: u64, alpha: u64) -> Outcome {
    let rep = tv::gl6_witness(p, alpha).map_err(|e| match e {
        ggp_algebra::Error::PreconditionFailed(s) | ggp_algebra::Error::InvalidModulus(s) => CliError::Config(s),
        other => other.into(),
    })?;
    let ok = rep.all_hold();
    out.record("gl6", &rep)?;
    Ok(ok)
}

#[derive(Serialize)]
struct MackeyRecord {
    polynomial: Vec<u64>,
    #[serde(flatten)]
    report: microlocal::MackeyReport,
    oracle: Option<u64>,
    expected: Option<u64>,
    ok: bool,
}

#[derive(Serialize)]
struct MackeySummary {
    p: u64,
    xi: Vec<u64>,
    instances: usize,
    nonzero: usize,
    oracle_checked: usize,
    failures: usize,
}

pub fn microlocal_mackey(out: &mut Emitter, p: u64, xi: &[u64], tau: Option<&str>, budget: u64) -> Outcome {
    let r = LocalRing::new(p, 1).map_err(|e| CliError::Config(e.to_string()))?;
    if p == 2 {
        return Err(CliError::Config("p must be odd".into()));
    }
    let datum = InductionDatum::principal_series(r, xi).map_err(|e| CliError::Config(e.to_string()))?;
    let rank = datum.rank();
    check_rank(rank)?;
    let target = datum.polynomial();
    let taus: Vec<Matrix<Residue>> = match tau {
        Some(s) => {
            let t = parse_matrix(&r, s)?;
            if t.dim() != rank {
                return Err(CliError::Config(format!("tau must have size {rank}")));
            }
            vec![t]
        }
        None => r.monics(rank).iter().map(|f| r.companion(f)).collect(),
    };
    let single = tau.is_some();
    let recs: Vec<MackeyRecord> = taus
        .par_iter()
        .map(|t| {
            let report = microlocal::mackey_dimension(&datum, t, budget)?;
            let f = r.charpoly(t)?;
            let oracle = if rank == 2 { Some(microlocal::induced_model_dimension(&datum, t)?) } else { None };
            let expected = (!single).then(|| u64::from(f == target));
            let ok = oracle.map_or(true, |o| o == report.dimension) && expected.map_or(true, |e| e == report.dimension);
            Ok(MackeyRecord { polynomial: r.poly_codes(&f), report, oracle, expected, ok })
        })
        .collect::<Result<_, ggp_algebra::Error>>()?;
    for rec in &recs {
        out.record("instance", rec)?;
    }
    let failures = recs.iter().filter(|r| !r.ok).count();
    out.record(
        "summary",
        &MackeySummary {
            p,
            xi: xi.to_vec(),
            instances: recs.len(),
            nonzero: recs.iter().filter(|r| r.report.dimension > 0).count(),
            oracle_checked: recs.iter().filter(|r| r.oracle.is_some()).count(),
            failures,
        },
    )?;
    Ok(failures == 0)
}

#[derive(Serialize)]
struct SupportRecord {
    id: u64,
    tau: Vec<u64>,
    support_fixed: u64,
    support_holds: bool,
    #[serde(flatten)]
    volume: microlocal::JTauVolume,
    in_window: bool,
    witnesses: usize,
    witness_failures: usize,
}

#[derive(Serialize)]
struct SupportSummary {
    p: u64,
    rank: usize,
    instances: usize,
    support_failures: usize,
    window_failures: usize,
    witnesses: usize,
    witness_failures: usize,
}

fn exponent_vectors(n: usize) -> Vec<Vec<i32>> {
    let mut out = Vec::new();
    for idx in 0..3usize.pow(n as u32) {
        let mut k = idx;
        let v: Vec<i32> = (0..n)
            .map(|_| {
                let c = (k % 3) as i32 - 1;
                k /= 3;
                c
            })
            .collect();
        if v.iter().any(|&c| c != 0) {
            out.push(v);
        }
    }
    out
}

pub fn microlocal_support(out: &mut Emitter, p: u64, rank: usize, budget: u64) -> Outcome {
    check_rank(rank)?;
    if p == 2 {
        return Err(CliError::Config("p must be odd".into()));
    }
    let frame = DepthFrame::new(p, 1).map_err(|e| CliError::Config(e.to_string()))?;
    let r = *frame.residue();
    let taus = ggp::all_stable(&r, rank, budget)?;
    let exps = exponent_vectors(rank - 1);
    let recs: Vec<SupportRecord> = taus
        .par_iter()
        .enumerate()
        .map(|(i, t)| {
            let support = microlocal::coefficient_support_check(&r, t, budget)?;
            let volume = microlocal::j_tau_volume_ratio(&r, t, budget)?;
            let mut witness_failures = 0;
            for c in &exps {
                if !microlocal::noncompact_support_witness(&frame, t, c).map(|w| w.holds()).unwrap_or(false) {
                    witness_failures += 1;
                }
            }
            Ok(SupportRecord {
                id: i as u64,
                tau: codes(&r, t),
                support_fixed: support.fixed,
                support_holds: support.holds(),
                in_window: volume.in_window(),
                volume,
                witnesses: exps.len(),
                witness_failures,
            })
        })
        .collect::<Result<_, ggp_algebra::Error>>()?;
    for rec in &recs {
        out.record("instance", rec)?;
    }
    let summary = SupportSummary {
        p,
        rank,
        instances: recs.len(),
        support_failures: recs.iter().filter(|r| !r.support_holds).count(),
        window_failures: recs.iter().filter(|r| !r.in_window).count(),
        witnesses: recs.iter().map(|r| r.witnesses).sum(),
        witness_failures: recs.iter().map(|r| r.witness_failures).sum(),
    };
    out.record("summary", &summary)?;
    Ok(summary.support_failures == 0 && summary.window_failures == 0 && summary.witness_failures == 0)
}

#[derive(Serialize)]
struct ExponentRow {
    #[serde(flatten)]
    optimum: exponents::Optimum,
    #[serde(serialize_with = "ser_q")]
    final_exponent: Q,
    consistent: bool,
}

fn ser_q<S: serde::Serializer>(r: &Q, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

pub fn exponent_table(out: &mut Emitter, ns: &[u32], thetas: &[String]) -> Outcome {
    let thetas: Vec<Q> = thetas
        .iter()
        .map(|t| t.trim().parse::<Q>().map_err(|e| CliError::Config(format!("bad theta {t:?}: {e}"))))
        .collect::<Result<_, _>>()?;
    let mut ok = true;
    for &n in ns {
        for &theta in &thetas {
            let to_config = |e: ggp_algebra::Error| match e {
                ggp_algebra::Error::PreconditionFailed(s) => CliError::Config(s),
                other => other.into(),
            };
            let optimum = exponents::optimize_alpha(n, theta).map_err(to_config)?;
            let final_exponent = exponents::final_exponent(n, theta, Q::from_integer(0)).map_err(to_config)?;
            let consistent = optimum.consistent();
            ok &= consistent;
            out.record("row", &ExponentRow { optimum, final_exponent, consistent })?;
        }
    }
    Ok(ok)
}
