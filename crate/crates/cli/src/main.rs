//! `fatpoints`: prediction, verification, sweeps, interpolation and Horace
//! checks for double-point conditions in projective space.

mod render;

use std::fs;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fatpoints::arith::{Field, PrimeField, Rationals, DEFAULT_PRIME};
use fatpoints::combinatorics::{exception_lookup, expected_h0, expected_h1, h0_forms};
use fatpoints::conditions::build_matrix;
use fatpoints::rank::{solve_interpolant, Solution};
use fatpoints::scheme::{build_ynd, random_doubles, Hyperplane, SchemeConfig, SchemeJson};
use fatpoints::verify::{
    build_plane_ejection, build_s_nd, horace_check, maximal_rank_sandwich, rng_for, summarize, sweep_generic,
    verify_generic, verify_scheme, verify_ynd_adjusted, HoraceCheck, Status, VerificationReport,
};
use serde::Serialize;

/// Exit code when a verification produced an inconclusive cell.
const EXIT_INCONCLUSIVE: u8 = 3;

#[derive(Parser)]
#[command(name = "fatpoints", version, about = "Exact interpolation with double points in P^n")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expected dimension of forms singular at r general points, with the
    /// exception catalog
    Predict {
        #[arg(short)]
        n: u32,
        #[arg(short)]
        d: u32,
        #[arg(short)]
        r: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Rank check of one configuration
    Verify(VerifyArgs),
    /// Generic verification over a grid of (n, d, r)
    Sweep(SweepArgs),
    /// Interpolant or kernel basis for a scheme read from JSON
    Solve(SolveArgs),
    /// Trace/residual decomposition with respect to a hyperplane
    Horace(HoraceArgs),
}

#[derive(Args)]
struct Common {
    /// Characteristic of the prime field
    #[arg(long, default_value_t = DEFAULT_PRIME)]
    prime: u64,
    /// Base seed; 0 draws one from entropy and echoes it
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random trials per cell
    #[arg(long, default_value_t = 3)]
    trials: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write output here instead of stdout
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(short)]
    n: Option<u32>,
    #[arg(short)]
    d: Option<u32>,
    #[arg(short)]
    r: Option<u64>,
    /// Check the square model scheme Y_{n,d} instead of r double points
    #[arg(long, conflicts_with_all = ["sandwich", "input"])]
    ynd: bool,
    /// Certify maximal rank in every degree from two neighbouring degrees
    #[arg(long, conflicts_with = "input")]
    sandwich: bool,
    /// Scheme JSON to check exactly, without random draws
    #[arg(short, long)]
    input: Option<PathBuf>,
    /// Write the condition matrix of the best trial here
    #[arg(long)]
    dump_matrix: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SweepArgs {
    /// Dimension or inclusive range, e.g. `3` or `2..4`
    #[arg(short)]
    n: String,
    /// Degree or inclusive range
    #[arg(short)]
    d: String,
    /// Restrict r to this value or range (default 1..=A_{n,d}+1)
    #[arg(short)]
    r: Option<String>,
    /// Worker threads
    #[arg(long)]
    jobs: Option<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SolveArgs {
    /// Scheme JSON; optional `values` give the right-hand side
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short)]
    d: u32,
    /// Work over the rationals instead of GF(p)
    #[arg(long)]
    rational: bool,
    #[arg(long)]
    dump_matrix: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct HoraceArgs {
    #[arg(short)]
    n: Option<u32>,
    #[arg(short)]
    d: Option<u32>,
    /// Scheme JSON; its hyperplane (default x_n = 0) is used for the split
    #[arg(short, long, conflicts_with = "ejection")]
    input: Option<PathBuf>,
    /// The plane instance with one ejected point, in degree 5
    #[arg(long)]
    ejection: bool,
    #[command(flatten)]
    common: Common,
}

/// A flag combination that parses but cannot run; exits like a parse error.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: String) -> anyhow::Error {
    UsageError(msg).into()
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<UsageError>() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Predict { n, d, r, common } => predict(n, d, r, &common),
        Command::Verify(a) => verify(&a),
        Command::Sweep(a) => sweep(&a),
        Command::Solve(a) => solve(&a),
        Command::Horace(a) => horace(&a),
    }
}

impl Common {
    fn field(&self) -> Result<PrimeField> {
        PrimeField::new(self.prime).with_context(|| format!("--prime {}", self.prime))
    }

    fn seed(&self) -> u64 {
        if self.seed != 0 {
            return self.seed;
        }
        let s = loop {
            let s: u64 = rand::random();
            if s != 0 {
                break s;
            }
        };
        eprintln!("seed: {s}");
        s
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.output {
            Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())?;
                Ok(out.flush()?)
            }
        }
    }
}

fn json_line<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string(v).expect("plain data serializes");
    s.push('\n');
    s
}

fn read_scheme(path: &Path) -> Result<SchemeJson> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    SchemeJson::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn need<T>(v: Option<T>, flag: &str, what: &str) -> Result<T> {
    v.ok_or_else(|| usage(format!("{what} needs {flag}")))
}

fn exit_for(statuses: impl IntoIterator<Item = Status>) -> ExitCode {
    if statuses.into_iter().any(|s| s == Status::Inconclusive) {
        ExitCode::from(EXIT_INCONCLUSIVE)
    } else {
        ExitCode::SUCCESS
    }
}

#[derive(Serialize)]
struct Prediction {
    n: u32,
    d: u32,
    r: u64,
    forms: u64,
    conditions: u64,
    expected_h0: u64,
    expected_h1: u64,
    exceptional: bool,
    defect: Option<u64>,
    predicted_h0: u64,
    source: &'static str,
    /// defect found by the rank oracle for catalog entries
    oracle_defect: Option<i64>,
    seed: Option<u64>,
}

fn predict(n: u32, d: u32, r: u64, common: &Common) -> Result<ExitCode> {
    if n == 0 {
        return Err(usage("-n must be at least 1".into()));
    }
    let expected = expected_h0(n, d, r);
    let entry = exception_lookup(n, d, r);
    let mut p = Prediction {
        n,
        d,
        r,
        forms: h0_forms(n, d),
        conditions: r * (n as u64 + 1),
        expected_h0: expected,
        expected_h1: expected_h1(n, d, r),
        exceptional: entry.is_some(),
        defect: entry.map(|e| e.defect),
        predicted_h0: expected + entry.map_or(0, |e| e.defect),
        source: "expected dimension",
        oracle_defect: None,
        seed: None,
    };
    if let Some(e) = entry {
        let seed = common.seed();
        let rep = verify_generic(&common.field()?, n, d, r, common.trials.max(3), seed)?;
        if rep.status != Status::Defective || rep.defect != e.defect as i64 {
            bail!(
                "catalog entry ({n},{d},{r}) with defect {} not confirmed: oracle says {:?}, defect {}",
                e.defect,
                rep.status,
                rep.defect
            );
        }
        p.source = "catalog (oracle-confirmed)";
        p.oracle_defect = Some(rep.defect);
        p.seed = Some(seed);
    }
    let text = match common.format {
        Format::Json => json_line(&p),
        Format::Table => render::prediction(&p),
    };
    common.emit(&text)?;
    Ok(ExitCode::SUCCESS)
}

/// Index of the trial that reached the reported rank.
fn best_trial(rep: &VerificationReport) -> usize {
    let best = rep.ranks.iter().copied().max().unwrap_or(0);
    rep.ranks.iter().position(|&r| r == best).unwrap_or(0)
}

fn dump<F: Field>(field: &F, y: &SchemeConfig<F::Elem>, d: u32, path: &Path) -> Result<()> {
    let m = build_matrix(field, y, d)?;
    fs::write(path, m.dump()).with_context(|| format!("writing {}", path.display()))
}

fn verify(a: &VerifyArgs) -> Result<ExitCode> {
    let c = &a.common;
    let f = c.field()?;
    if let Some(path) = &a.input {
        let d = need(a.d, "-d", "verify -i")?;
        let (y, _) = read_scheme(path)?.to_config(&f)?;
        let rep = verify_scheme(&f, "scheme", &y, d, 0)?;
        if let Some(out) = &a.dump_matrix {
            dump(&f, &y, d, out)?;
        }
        return emit_reports(c, &[rep]);
    }
    let n = need(a.n, "-n", "verify")?;
    if a.sandwich {
        let r = need(a.r, "-r", "verify --sandwich")?;
        let rep = maximal_rank_sandwich(&f, n, r, c.trials, c.seed())?;
        let text = match c.format {
            Format::Json => json_line(&rep),
            Format::Table => render::sandwich(&rep),
        };
        c.emit(&text)?;
        return Ok(exit_for([rep.lower.status, rep.upper.status]));
    }
    let d = need(a.d, "-d", "verify")?;
    let r = if a.ynd { None } else { Some(need(a.r, "-r", "verify")?) };
    let seed = c.seed();
    let rep = match r {
        None => verify_ynd_adjusted(&f, n, d, c.trials, seed)?,
        Some(r) => verify_generic(&f, n, d, r, c.trials, seed)?,
    };
    if let Some(out) = &a.dump_matrix {
        let mut rng = rng_for(rep.seeds[best_trial(&rep)]);
        let y = if a.ynd {
            build_ynd(&f, n, d, &mut rng)?
        } else {
            random_doubles(&f, n, rep.r.unwrap_or(0) as usize, &mut rng)?
        };
        dump(&f, &y, d, out)?;
    }
    emit_reports(c, &[rep])
}

fn emit_reports(c: &Common, reports: &[VerificationReport]) -> Result<ExitCode> {
    let text = match c.format {
        Format::Json => reports.iter().map(|r| r.to_json_line() + "\n").collect(),
        Format::Table => render::reports(reports),
    };
    c.emit(&text)?;
    Ok(exit_for(reports.iter().map(|r| r.status)))
}

fn parse_range<T>(s: &str, flag: &str) -> Result<RangeInclusive<T>>
where
    T: std::str::FromStr + PartialOrd + Copy,
{
    let num = |t: &str| {
        t.trim()
            .parse::<T>()
            .map_err(|_| usage(format!("{flag}: cannot read `{t}` as a number")))
    };
    let (lo, hi) = match s.split_once("..") {
        Some((lo, hi)) => (num(lo)?, num(hi.strip_prefix('=').unwrap_or(hi))?),
        None => {
            let v = num(s)?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(usage(format!("{flag}: empty range `{s}`")));
    }
    Ok(lo..=hi)
}

fn sweep(a: &SweepArgs) -> Result<ExitCode> {
    let c = &a.common;
    let f = c.field()?;
    let ns = parse_range::<u32>(&a.n, "-n")?;
    let ds = parse_range::<u32>(&a.d, "-d")?;
    if *ns.start() == 0 {
        return Err(usage("-n must be at least 1".into()));
    }
    let rs = a.r.as_deref().map(|s| parse_range::<u64>(s, "-r")).transpose()?;
    let cells: Vec<_> = fatpoints::verify::sweep_cells(ns, ds)
        .into_iter()
        .filter(|&(_, _, r)| rs.as_ref().is_none_or(|rs| rs.contains(&r)))
        .collect();
    let jobs = a
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1);
    let seed = c.seed();
    let reports = sweep_generic(&f, &cells, c.trials, seed, jobs)?;
    let summary = summarize(&reports);
    match c.format {
        Format::Json => {
            let text: String = reports.iter().map(|r| r.to_json_line() + "\n").collect();
            c.emit(&text)?;
            // the report stream stays pure; the summary goes to stderr
            eprint!("{}", render::summary(&summary));
        }
        Format::Table => c.emit(&(render::reports(&reports) + &render::summary(&summary)))?,
    }
    Ok(exit_for(reports.iter().map(|r| r.status)))
}

#[derive(Serialize)]
struct SolveOutput {
    n: u32,
    d: u32,
    field: String,
    rows: usize,
    cols: usize,
    rank: usize,
    consistent: bool,
    monomials: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    particular: Option<Vec<String>>,
    kernel: Vec<Vec<String>>,
    /// kernel forms written out, or the particular solution when values
    /// were given
    rendered: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<Vec<String>>,
}

fn solve(a: &SolveArgs) -> Result<ExitCode> {
    let scheme = read_scheme(&a.input)?;
    let out = if a.rational {
        solve_in(&Rationals, "Q".into(), &scheme, a)?
    } else {
        let f = a.common.field()?;
        solve_in(&f, format!("GF({})", f.modulus()), &scheme, a)?
    };
    let text = match a.common.format {
        Format::Json => json_line(&out),
        Format::Table => render::solution(&out),
    };
    a.common.emit(&text)?;
    Ok(ExitCode::SUCCESS)
}

fn solve_in<F: Field>(f: &F, name: String, scheme: &SchemeJson, a: &SolveArgs) -> Result<SolveOutput> {
    let (y, values) = scheme.to_config(f)?;
    let cm = build_matrix(f, &y, a.d)?;
    if let Some(out) = &a.dump_matrix {
        fs::write(out, cm.dump()).with_context(|| format!("writing {}", out.display()))?;
    }
    let m = &cm.matrix;
    let homogeneous = values.is_none();
    let rhs = values.unwrap_or_else(|| vec![f.zero(); m.rows()]);
    if rhs.len() != m.rows() {
        bail!(
            "`values` has {} entries but the scheme imposes {} conditions in degree {}",
            rhs.len(),
            m.rows(),
            a.d
        );
    }
    let strings = |v: &[F::Elem]| v.iter().map(ToString::to_string).collect::<Vec<_>>();
    let mut out = SolveOutput {
        n: y.n,
        d: a.d,
        field: name,
        rows: m.rows(),
        cols: m.cols(),
        rank: m.rank(),
        consistent: true,
        monomials: (0..cm.basis.len()).map(|i| cm.basis.render(i)).collect(),
        particular: None,
        kernel: Vec::new(),
        rendered: Vec::new(),
        certificate: None,
    };
    match solve_interpolant(m, &rhs)? {
        Solution::Consistent {
            particular,
            kernel_basis,
        } => {
            out.kernel = kernel_basis.iter().map(|k| strings(k)).collect();
            out.rendered = if homogeneous {
                kernel_basis.iter().map(|k| render::form(f, &cm.basis, k)).collect()
            } else {
                vec![render::form(f, &cm.basis, &particular)]
            };
            if !homogeneous {
                out.particular = Some(strings(&particular));
            }
        }
        Solution::Inconsistent { certificate } => {
            out.consistent = false;
            out.certificate = Some(strings(&certificate));
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct HoraceOutput {
    n: u32,
    d: u32,
    seed: u64,
    scheme: SchemeJson,
    hyperplane: Vec<String>,
    check: HoraceCheck,
}

fn horace(a: &HoraceArgs) -> Result<ExitCode> {
    let c = &a.common;
    let f = c.field()?;
    let (y, h, d, seed) = if a.ejection {
        let seed = c.seed();
        let (y, h) = build_plane_ejection(&f, &mut rng_for(seed))?;
        (y, h, 5, seed)
    } else if let Some(path) = &a.input {
        let d = need(a.d, "-d", "horace -i")?;
        let (y, _) = read_scheme(path)?.to_config(&f)?;
        let h = y.hyperplane.clone().unwrap_or_else(|| Hyperplane::coordinate(&f, y.n));
        (y, h, d, c.seed)
    } else {
        let n = need(a.n, "-n", "horace")?;
        let d = need(a.d, "-d", "horace")?;
        let seed = c.seed();
        let (y, h) = build_s_nd(&f, n, d, &mut rng_for(seed))?;
        (y, h, d, seed)
    };
    let check = horace_check(&f, &y, &h, d, seed)?;
    let out = HoraceOutput {
        n: y.n,
        d,
        seed,
        scheme: SchemeJson::from_config(&y),
        hyperplane: h.coeffs().iter().map(ToString::to_string).collect(),
        check,
    };
    let text = match c.format {
        Format::Json => json_line(&out),
        Format::Table => render::horace(&out.check, seed),
    };
    c.emit(&text)?;
    Ok(ExitCode::SUCCESS)
}
