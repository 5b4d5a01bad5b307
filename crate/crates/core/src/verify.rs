//! Rank experiments: compare computed `h0`/`h1` of double-point schemes
//! with their expected values, and exercise hyperplane decompositions.
//!
//! Random points can only lose rank, so one full-rank trial settles an
//! instance while agreement on a smaller rank is evidence, not proof.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{ArithError, Field};
use crate::combinatorics::{ab_split, expected_h0, expected_h1, h0_forms};
use crate::conditions::{build_matrix, ConditionError};
use crate::scheme::{
    build_ynd, eject, push_doubles, push_partial_double, push_simples, push_transverse_jets, random_doubles,
    random_point_off, random_point_on, specialize_into_h, trace_residual, Component, Hyperplane, SchemeConfig,
    SchemeError,
};

/// Minimum number of agreeing trials before a rank drop is called a defect.
pub const MIN_DEFECT_TRIALS: usize = 3;

pub const RANDOM_SCOPE: &str =
    "ranks at pseudo-random points; a full-rank trial certifies this instance, lower ranks only bound it";
pub const FIXED_SCOPE: &str = "exact rank of this particular scheme";

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Condition(#[from] ConditionError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("constraint {clause} violated: {detail}")]
    Constraint { clause: &'static str, detail: String },
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("{0}")]
    Usage(String),
    #[error("thread pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Status {
    MaximalRank,
    Adjusted,
    Defective,
    Inconclusive,
}

/// One line of output. Field order is the serialization order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub kind: String,
    pub n: u32,
    pub d: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<u64>,
    pub scheme_summary: BTreeMap<String, usize>,
    pub conditions: u64,
    pub forms: u64,
    pub expected_h0: u64,
    pub expected_h1: u64,
    pub computed_h0: u64,
    pub computed_h1: u64,
    pub defect: i64,
    pub status: Status,
    pub ranks: Vec<usize>,
    /// base seed the trial seeds are derived from
    pub seed: u64,
    pub seeds: Vec<u64>,
    pub prime: u64,
    pub trials: usize,
    pub scope: &'static str,
}

impl VerificationReport {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of one trial of one cell, independent of scheduling.
pub fn derive_seed(base: u64, cell: &[u64], trial: u64) -> u64 {
    cell.iter()
        .chain(std::iter::once(&trial))
        .fold(splitmix(base), |h, &k| splitmix(h ^ k))
}

pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

struct Trials {
    census: BTreeMap<String, usize>,
    rows: u64,
    cols: u64,
    ranks: Vec<usize>,
    base: u64,
    seeds: Vec<u64>,
    prime: u64,
    requested: usize,
}

impl Trials {
    fn full(&self) -> usize {
        self.rows.min(self.cols) as usize
    }

    fn best(&self) -> usize {
        self.ranks.iter().copied().max().unwrap_or(0)
    }
}

/// Builds and eliminates a fresh random scheme per trial, stopping at the
/// first full-rank one.
fn run_trials<F, B>(
    field: &F,
    d: u32,
    trials: usize,
    seed: u64,
    cell: &[u64],
    mut build: B,
) -> Result<Trials, VerifyError>
where
    F: Field,
    B: FnMut(&mut ChaCha8Rng) -> Result<SchemeConfig<F::Elem>, VerifyError>,
{
    if trials == 0 {
        return Err(VerifyError::Usage("at least one trial is needed".into()));
    }
    let mut out: Option<Trials> = None;
    for trial in 0..trials as u64 {
        let s = derive_seed(seed, cell, trial);
        let y = build(&mut rng_for(s))?;
        let m = build_matrix(field, &y, d)?;
        let rank = m.matrix.rank();
        let t = out.get_or_insert_with(|| Trials {
            census: y.census(),
            rows: m.matrix.rows() as u64,
            cols: m.matrix.cols() as u64,
            ranks: Vec::new(),
            base: seed,
            seeds: Vec::new(),
            prime: field.characteristic(),
            requested: trials,
        });
        t.ranks.push(rank);
        t.seeds.push(s);
        if rank == t.full() {
            break;
        }
    }
    Ok(out.expect("trials >= 1"))
}

fn status_of(t: &Trials, full_status: Status) -> Status {
    if t.best() == t.full() {
        full_status
    } else if t.ranks.len() >= MIN_DEFECT_TRIALS && t.ranks.iter().all(|&r| r == t.ranks[0]) {
        Status::Defective
    } else {
        Status::Inconclusive
    }
}

fn report(
    kind: &str,
    n: u32,
    d: u32,
    r: Option<u64>,
    t: Trials,
    status: Status,
    scope: &'static str,
) -> VerificationReport {
    let rank = t.best() as u64;
    let exp_h0 = t.cols.saturating_sub(t.rows);
    let computed_h0 = t.cols - rank;
    VerificationReport {
        kind: kind.into(),
        n,
        d,
        r,
        scheme_summary: t.census,
        conditions: t.rows,
        forms: t.cols,
        expected_h0: exp_h0,
        expected_h1: t.rows.saturating_sub(t.cols),
        computed_h0,
        computed_h1: t.rows - rank,
        defect: computed_h0 as i64 - exp_h0 as i64,
        status,
        ranks: t.ranks,
        seed: t.base,
        seeds: t.seeds,
        prime: t.prime,
        trials: t.requested,
        scope,
    }
}

/// `r` general double points in `P^n` against degree-`d` forms.
pub fn verify_generic<F: Field>(
    field: &F,
    n: u32,
    d: u32,
    r: u64,
    trials: usize,
    seed: u64,
) -> Result<VerificationReport, VerifyError> {
    if n == 0 {
        return Err(VerifyError::Usage("n must be at least 1".into()));
    }
    let t = run_trials(field, d, trials, seed, &[n as u64, d as u64, r], |rng| {
        Ok(random_doubles(field, n, r as usize, rng)?)
    })?;
    let status = status_of(&t, Status::MaximalRank);
    let rep = report("generic", n, d, Some(r), t, status, RANDOM_SCOPE);
    debug_assert_eq!(rep.expected_h0, expected_h0(n, d, r));
    debug_assert_eq!(rep.expected_h1, expected_h1(n, d, r));
    Ok(rep)
}

/// The square model scheme `Y_{n,d}`; `Adjusted` iff some trial is nonsingular.
pub fn verify_ynd_adjusted<F: Field>(
    field: &F,
    n: u32,
    d: u32,
    trials: usize,
    seed: u64,
) -> Result<VerificationReport, VerifyError> {
    if n == 0 {
        return Err(VerifyError::Usage("n must be at least 1".into()));
    }
    let t = run_trials(field, d, trials, seed, &[n as u64, d as u64, u64::MAX], |rng| {
        Ok(build_ynd(field, n, d, rng)?)
    })?;
    let status = status_of(&t, Status::Adjusted);
    Ok(report("ynd", n, d, None, t, status, RANDOM_SCOPE))
}

/// Report for one given scheme, without re-drawing anything.
pub fn verify_scheme<F: Field>(
    field: &F,
    kind: &str,
    y: &SchemeConfig<F::Elem>,
    d: u32,
    seed: u64,
) -> Result<VerificationReport, VerifyError> {
    let m = build_matrix(field, y, d)?;
    let t = Trials {
        census: y.census(),
        rows: m.matrix.rows() as u64,
        cols: m.matrix.cols() as u64,
        ranks: vec![m.matrix.rank()],
        base: seed,
        seeds: vec![seed],
        prime: field.characteristic(),
        requested: 1,
    };
    let status = if t.best() < t.full() {
        Status::Defective
    } else if t.rows == t.cols {
        Status::Adjusted
    } else {
        Status::MaximalRank
    };
    Ok(report(kind, y.n, d, None, t, status, FIXED_SCOPE))
}

/// Degree sandwich for `r` double points: injectivity in degree `delta` and
/// surjectivity in degree `delta + 1` give maximal rank in every degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SandwichReport {
    pub n: u32,
    pub r: u64,
    pub delta: u32,
    pub injective: bool,
    pub surjective: bool,
    pub maximal_rank_all_degrees: bool,
    pub lower: VerificationReport,
    pub upper: VerificationReport,
}

/// The `delta` with `C(n+delta, delta) <= r(n+1) < C(n+delta+1, delta+1)`.
pub fn sandwich_degree(n: u32, r: u64) -> u32 {
    let total = r * (n as u64 + 1);
    let mut delta = 0;
    while h0_forms(n, delta + 1) <= total {
        delta += 1;
    }
    delta
}

pub fn maximal_rank_sandwich<F: Field>(
    field: &F,
    n: u32,
    r: u64,
    trials: usize,
    seed: u64,
) -> Result<SandwichReport, VerifyError> {
    if r == 0 {
        return Err(VerifyError::Usage("r must be at least 1".into()));
    }
    let delta = sandwich_degree(n, r);
    let lower = verify_generic(field, n, delta, r, trials, seed)?;
    let upper = verify_generic(field, n, delta + 1, r, trials, seed)?;
    let injective = lower.computed_h0 == 0;
    let surjective = upper.computed_h1 == 0;
    Ok(SandwichReport {
        n,
        r,
        delta,
        injective,
        surjective,
        maximal_rank_all_degrees: injective && surjective,
        lower,
        upper,
    })
}

/// A scheme, its trace on a hyperplane in degree `d` and its residual in
/// degree `d - 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HoraceCheck {
    pub original: VerificationReport,
    pub trace: VerificationReport,
    pub residual: VerificationReport,
    pub chi_original: i64,
    pub chi_trace: i64,
    pub chi_residual: i64,
    pub chi_additive: bool,
    /// trace and residual adjusted imply the original adjusted
    pub lemma31_consistent: bool,
}

pub fn horace_check<F: Field>(
    field: &F,
    y: &SchemeConfig<F::Elem>,
    h: &Hyperplane<F::Elem>,
    d: u32,
    seed: u64,
) -> Result<HoraceCheck, VerifyError> {
    if d == 0 {
        return Err(VerifyError::Usage("degree must be at least 1".into()));
    }
    let pair = trace_residual(field, y, h)?;
    let n = y.n;
    let chi = |forms: u64, count: u64| forms as i64 - count as i64;
    let chi_original = chi(h0_forms(n, d), y.condition_count(d));
    let chi_trace = chi(h0_forms(n - 1, d), pair.trace.condition_count(d));
    let chi_residual = chi(h0_forms(n, d - 1), pair.residual.condition_count(d - 1));
    let original = verify_scheme(field, "original", y, d, seed)?;
    let trace = verify_scheme(field, "trace", &pair.trace, d, seed)?;
    let residual = verify_scheme(field, "residual", &pair.residual, d - 1, seed)?;
    let adjusted = |r: &VerificationReport| r.status == Status::Adjusted;
    let lemma31_consistent = !(adjusted(&trace) && adjusted(&residual)) || adjusted(&original);
    Ok(HoraceCheck {
        chi_additive: chi_original == chi_trace + chi_residual,
        original,
        trace,
        residual,
        chi_original,
        chi_trace,
        chi_residual,
        lemma31_consistent,
    })
}

/// A scheme together with the hyperplane it is split along.
pub type SchemeWithHyperplane<E> = (SchemeConfig<E>, Hyperplane<E>);

/// `Y_{n,d}` with its first `A_{n-1,d}` double points moved into `x_n = 0`.
/// When `B_{n-1,d} = 0` the trace is a copy of `Y_{n-1,d}` without its
/// remainder.
pub fn build_s_nd<F: Field, R: rand::Rng + ?Sized>(
    field: &F,
    n: u32,
    d: u32,
    rng: &mut R,
) -> Result<SchemeWithHyperplane<F::Elem>, VerifyError> {
    if n < 2 {
        return Err(VerifyError::Usage("S_{n,d} needs n >= 2".into()));
    }
    let h = Hyperplane::coordinate(field, n);
    let y = build_ynd(field, n, d, rng)?;
    let k = ab_split(n - 1, d).a as usize;
    let doubles: Vec<usize> = (0..y.components.len()).take(k).collect();
    if doubles.len() < k {
        return Err(VerifyError::NotApplicable(format!(
            "Y_{{{n},{d}}} has fewer than A_{{{},{d}}} = {k} double points",
            n - 1
        )));
    }
    Ok((specialize_into_h(field, &y, &doubles, &h, rng)?, h))
}

/// The plane sextic instance: five double points and a point off a line
/// `H`, three points of `H` and a double point of `H`, after ejecting one of
/// the points of `H` with one of the double points. Checked in degree 5.
pub fn build_plane_ejection<F: Field, R: rand::Rng + ?Sized>(
    field: &F,
    rng: &mut R,
) -> Result<SchemeWithHyperplane<F::Elem>, VerifyError> {
    let h = Hyperplane::coordinate(field, 2);
    let mut y = SchemeConfig::empty(2);
    push_doubles(field, &mut y, 4, None, rng)?;
    push_simples(field, &mut y, 1, None, rng)?;
    push_simples(field, &mut y, 2, Some(&h), rng)?;
    push_partial_double(field, &mut y, 2, Some(&h), Some(&h), rng)?;
    let at = fresh_point_on(field, &y, &h, rng)?;
    let direction = random_point_off(field, &h, rng)?.coords().to_vec();
    y.components
        .push(eject(field, &Component::Simple { at }, &h, &direction)?);
    y.hyperplane = Some(h.clone());
    Ok((y, h))
}

fn fresh_point_on<F: Field, R: rand::Rng + ?Sized>(
    field: &F,
    y: &SchemeConfig<F::Elem>,
    h: &Hyperplane<F::Elem>,
    rng: &mut R,
) -> Result<crate::scheme::Point<F::Elem>, VerifyError> {
    for _ in 0..crate::scheme::MAX_RETRIES {
        let p = random_point_on(field, h, rng)?;
        if !y.components.iter().any(|c| c.support() == Some(&p)) {
            return Ok(p);
        }
    }
    Err(SchemeError::Degenerate("coincident supports").into())
}

/// Degree bookkeeping of the differential step, when `B_{n-1,d} > 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegueReport {
    pub n: u32,
    pub d: u32,
    pub b_hyperplane: u64,
    pub degree_in_h: u64,
    pub degree_off_h: u64,
    pub chi: i64,
    pub numerically_adjusted: bool,
    pub report: VerificationReport,
}

/// Builds `G_{n,d}` (the residual after specializing `A_{n-1,d} + 1` double
/// points into `H` and removing one of them) together with a double point
/// of degree `n + 1 - B_{n-1,d}` supported in `H`, and checks it in degree
/// `d - 1`.
pub fn degue_bookkeeping<F: Field>(
    field: &F,
    n: u32,
    d: u32,
    trials: usize,
    seed: u64,
) -> Result<DegueReport, VerifyError> {
    if n < 2 || d < 2 {
        return Err(VerifyError::Usage("need n >= 2 and d >= 2".into()));
    }
    let prev = ab_split(n - 1, d);
    if prev.b == 0 {
        return Err(VerifyError::NotApplicable(format!("B_{{{},{d}}} = 0", n - 1)));
    }
    let split = ab_split(n, d);
    let off = split
        .a
        .checked_sub(prev.a + 1)
        .ok_or_else(|| VerifyError::NotApplicable(format!("A_{{{n},{d}}} < A_{{{},{d}}} + 1", n - 1)))?;
    let degree_in_h = prev.b;
    let degree_off_h = n as u64 + 1 - degree_in_h;
    let h = Hyperplane::coordinate(field, n);
    let build = |rng: &mut ChaCha8Rng| -> Result<SchemeConfig<F::Elem>, VerifyError> {
        let mut y = SchemeConfig::empty(n);
        push_doubles(field, &mut y, off as usize, None, rng)?;
        push_partial_double(field, &mut y, split.b as usize, None, None, rng)?;
        push_simples(field, &mut y, prev.a as usize, Some(&h), rng)?;
        push_partial_double(field, &mut y, degree_off_h as usize, Some(&h), None, rng)?;
        Ok(y)
    };
    let t = run_trials(field, d - 1, trials, seed, &[n as u64, d as u64, u64::MAX - 1], build)?;
    let chi = t.cols as i64 - t.rows as i64;
    let status = status_of(&t, Status::Adjusted);
    Ok(DegueReport {
        n,
        d,
        b_hyperplane: prev.b,
        degree_in_h,
        degree_off_h,
        chi,
        numerically_adjusted: chi == 0,
        report: report("degue", n, d - 1, None, t, status, RANDOM_SCOPE),
    })
}

/// The three degree-3 configurations allowed below the `n(n-1)/2` bound,
/// as `(n, a, b, v)`.
pub const PROP61_CUBIC_CASES: [(u32, u64, u64, u64); 3] = [(4, 5, 0, 0), (5, 8, 0, 1), (6, 14, 0, 0)];

/// Clauses (i)-(iv) and numerical adjustment for `u` double points, `a`
/// points of `H`, `b` transverse jets on `H` and `v` double points on `H`.
pub fn check_prop61(n: u32, d: u32, u: u64, a: u64, b: u64, v: u64) -> Result<(), VerifyError> {
    let fail = |clause: &'static str, detail: String| Err(VerifyError::Constraint { clause, detail });
    let ni = n as u64;
    if n < 2 || d < 3 {
        return fail("range", format!("need n >= 2 and d >= 3, got n={n}, d={d}"));
    }
    if v > 1 {
        return fail("v <= 1", format!("v = {v}"));
    }
    let special = d == 3 && PROP61_CUBIC_CASES.contains(&(n, a, b, v));
    if a + 1 < ni && !special {
        return fail("(i)", format!("a = {a} < n - 1 = {}", ni - 1));
    }
    let upper2 = 2 * crate::combinatorics::choose(ni + d as u64, d as u64 + 1) + ni * (ni - 1);
    if 2 * ni * (a + b) > upper2 {
        return fail("(ii)", format!("a + b = {} exceeds C(n+d,d+1)/n + (n-1)/2", a + b));
    }
    if 2 * (a + b) < ni * (ni - 1) && !special {
        return fail("(ii)", format!("a + b = {} < n(n-1)/2 = {}", a + b, ni * (ni - 1) / 2));
    }
    if b >= ni {
        return fail("(iii)", format!("b = {b} >= n = {n}"));
    }
    if n == 2 && d == 3 && v != 0 {
        return fail("(iv)", "n = 2 and d = 3 force v = 0".into());
    }
    let degree = (ni + 1) * (u + v) + a + 2 * b;
    if degree != h0_forms(n, d) {
        return fail(
            "numerically adjusted",
            format!("degree {degree} != C(n+d,d) = {}", h0_forms(n, d)),
        );
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn verify_prop61_instance<F: Field>(
    field: &F,
    n: u32,
    d: u32,
    u: u64,
    a: u64,
    b: u64,
    v: u64,
    trials: usize,
    seed: u64,
) -> Result<VerificationReport, VerifyError> {
    check_prop61(n, d, u, a, b, v)?;
    let h = Hyperplane::coordinate(field, n);
    let build = |rng: &mut ChaCha8Rng| -> Result<SchemeConfig<F::Elem>, VerifyError> {
        let mut y = SchemeConfig::empty(n);
        for _ in 0..u {
            let at = random_point_off(field, &h, rng)?;
            if y.components.iter().any(|c| c.support() == Some(&at)) {
                return Err(SchemeError::Degenerate("coincident supports").into());
            }
            y.components.push(Component::Double { at });
        }
        push_simples(field, &mut y, a as usize, Some(&h), rng)?;
        push_transverse_jets(field, &mut y, b as usize, &h, rng)?;
        push_doubles(field, &mut y, v as usize, Some(&h), rng)?;
        y.hyperplane = Some(h.clone());
        Ok(y)
    };
    let cell = [n as u64, d as u64, u, a, b, v];
    let t = run_trials(field, d, trials, seed, &cell, build)?;
    let status = status_of(&t, Status::Adjusted);
    Ok(report("prop61", n, d, None, t, status, RANDOM_SCOPE))
}

/// Every `(n, d, r)` with `n` and `d` in the given ranges and
/// `1 <= r <= A_{n,d} + 1`.
pub fn sweep_cells(ns: std::ops::RangeInclusive<u32>, ds: std::ops::RangeInclusive<u32>) -> Vec<(u32, u32, u64)> {
    let mut cells = Vec::new();
    for n in ns {
        for d in ds.clone() {
            for r in 1..=ab_split(n, d).a + 1 {
                cells.push((n, d, r));
            }
        }
    }
    cells
}

/// Runs [`verify_generic`] on every cell with at most `jobs` threads.
/// Output order follows `cells`.
pub fn sweep_generic<F: Field>(
    field: &F,
    cells: &[(u32, u32, u64)],
    trials: usize,
    seed: u64,
    jobs: usize,
) -> Result<Vec<VerificationReport>, VerifyError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| VerifyError::Pool(e.to_string()))?;
    pool.install(|| {
        cells
            .par_iter()
            .map(|&(n, d, r)| verify_generic(field, n, d, r, trials, seed))
            .collect()
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepSummary {
    pub cells: usize,
    pub maximal_rank: usize,
    pub defective: Vec<(u32, u32, u64, i64)>,
    pub inconclusive: Vec<(u32, u32, u64)>,
}

pub fn summarize(reports: &[VerificationReport]) -> SweepSummary {
    let mut s = SweepSummary {
        cells: reports.len(),
        maximal_rank: 0,
        defective: Vec::new(),
        inconclusive: Vec::new(),
    };
    for rep in reports {
        let r = rep.r.unwrap_or(0);
        match rep.status {
            Status::MaximalRank | Status::Adjusted => s.maximal_rank += 1,
            Status::Defective => s.defective.push((rep.n, rep.d, r, rep.defect)),
            Status::Inconclusive => s.inconclusive.push((rep.n, rep.d, r)),
        }
    }
    s
}
