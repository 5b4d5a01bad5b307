//! Human-readable output for `--format table`.

use std::fmt::Write;

use fatpoints::arith::Field;
use fatpoints::combinatorics::MonomialBasis;
use fatpoints::verify::{HoraceCheck, SandwichReport, SweepSummary, VerificationReport};

use crate::{Prediction, SolveOutput};

/// A form as `c*x0^2 + x1*x2`, skipping zero coefficients.
pub fn form<F: Field>(f: &F, basis: &MonomialBasis, coeffs: &[F::Elem]) -> String {
    let terms: Vec<String> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| !f.is_zero(c))
        .map(|(i, c)| {
            let m = basis.render(i);
            if *c == f.one() {
                m
            } else if m == "1" {
                c.to_string()
            } else {
                format!("{c}*{m}")
            }
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

pub fn prediction(p: &Prediction) -> String {
    let mut s = format!(
        "n={} d={} r={}\nforms {}  conditions {}\nexpected h0 {}  expected h1 {}\n",
        p.n, p.d, p.r, p.forms, p.conditions, p.expected_h0, p.expected_h1
    );
    match p.defect {
        Some(defect) => {
            let _ = writeln!(s, "exception: yes, defect {defect}, h0 {}", p.predicted_h0);
            let _ = writeln!(s, "source: {} (seed {})", p.source, p.seed.unwrap_or(0));
        }
        None => {
            let _ = writeln!(s, "exception: no");
            let _ = writeln!(s, "source: {}", p.source);
        }
    }
    s
}

const HEADER: &str =
    "kind       n   d     r  status        rows  cols  exp_h0  h0  exp_h1  h1  defect  ranks         seed\n";

fn row(r: &VerificationReport) -> String {
    let ranks: Vec<String> = r.ranks.iter().map(usize::to_string).collect();
    format!(
        "{:<9} {:>2} {:>3} {:>5}  {:<12} {:>5} {:>5} {:>7} {:>3} {:>7} {:>3} {:>7}  {:<12}  {}\n",
        r.kind,
        r.n,
        r.d,
        r.r.map_or("-".into(), |r| r.to_string()),
        format!("{:?}", r.status),
        r.conditions,
        r.forms,
        r.expected_h0,
        r.computed_h0,
        r.expected_h1,
        r.computed_h1,
        r.defect,
        ranks.join(","),
        r.seed
    )
}

pub fn reports(rs: &[VerificationReport]) -> String {
    let mut s = HEADER.to_string();
    for r in rs {
        s.push_str(&row(r));
    }
    s
}

pub fn sandwich(rep: &SandwichReport) -> String {
    let mut s = format!("n={} r={} delta={}\n", rep.n, rep.r, rep.delta);
    s.push_str(&reports(&[rep.lower.clone(), rep.upper.clone()]));
    let _ = writeln!(
        s,
        "injective in degree {}: {}\nsurjective in degree {}: {}\nmaximal rank in every degree: {}",
        rep.delta,
        rep.injective,
        rep.delta + 1,
        rep.surjective,
        rep.maximal_rank_all_degrees
    );
    s
}

pub fn summary(sum: &SweepSummary) -> String {
    let mut s = format!(
        "cells {}  maximal rank {}  defective {}  inconclusive {}\n",
        sum.cells,
        sum.maximal_rank,
        sum.defective.len(),
        sum.inconclusive.len()
    );
    if !sum.defective.is_empty() {
        s.push_str("defects:\n   n   d     r  defect\n");
        for (n, d, r, defect) in &sum.defective {
            let _ = writeln!(s, "  {n:>2} {d:>3} {r:>5} {defect:>7}");
        }
    }
    for (n, d, r) in &sum.inconclusive {
        let _ = writeln!(s, "inconclusive: n={n} d={d} r={r}");
    }
    s
}

pub fn solution(out: &SolveOutput) -> String {
    let mut s = format!(
        "n={} d={} over {}: {} conditions, {} forms, rank {}\n",
        out.n, out.d, out.field, out.rows, out.cols, out.rank
    );
    if !out.consistent {
        s.push_str("no form takes the prescribed values\n");
        return s;
    }
    if out.particular.is_some() {
        let _ = writeln!(s, "interpolant: {}", out.rendered[0]);
        let _ = writeln!(s, "kernel dimension: {}", out.kernel.len());
    } else if out.kernel.is_empty() {
        s.push_str("kernel: 0\n");
    } else {
        let _ = writeln!(s, "kernel basis ({}):", out.kernel.len());
        for f in &out.rendered {
            let _ = writeln!(s, "  {f}");
        }
    }
    s
}

pub fn horace(c: &HoraceCheck, seed: u64) -> String {
    let mut s = reports(&[c.original.clone(), c.trace.clone(), c.residual.clone()]);
    let _ = writeln!(
        s,
        "chi: original {} = trace {} + residual {} ({})",
        c.chi_original,
        c.chi_trace,
        c.chi_residual,
        if c.chi_additive { "additive" } else { "NOT additive" }
    );
    let _ = writeln!(
        s,
        "trace and residual adjusted => original adjusted: {}",
        c.lemma31_consistent
    );
    let _ = writeln!(s, "seed {seed}");
    s
}
