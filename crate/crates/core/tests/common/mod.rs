//! Generators and independent checks shared by the integration tests.
#![allow(dead_code)]

use fatpoints::arith::{Field, PrimeField, Rationals};
use fatpoints::combinatorics::{h0_forms, MonomialBasis};
use fatpoints::conditions::build_matrix;
use fatpoints::rank::rank_kernel;
use fatpoints::scheme::{
    eject, lines_joining, make_complex, push_doubles, push_partial_double, push_simples, push_transverse_jets,
    random_point_off, random_point_on, random_vector, trace_residual, Component, Hyperplane, SchemeConfig,
};
use fatpoints::verify::rng_for;
use num_rational::BigRational;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn gf() -> PrimeField {
    PrimeField::default()
}

/// A random hyperplane, the coordinate one a third of the time.
pub fn random_hyperplane(f: &PrimeField, n: u32, rng: &mut ChaCha8Rng) -> Hyperplane<fatpoints::Fp> {
    if rng.gen_range(0..3) == 0 {
        return Hyperplane::coordinate(f, n);
    }
    loop {
        if let Ok(h) = Hyperplane::new(f, random_vector(f, n as usize + 1, rng)) {
            return h;
        }
    }
}

/// A random mixture of every component kind, placed on, off or across `h`.
/// Lines are included only when `lines` is set.
pub fn random_config(
    f: &PrimeField,
    n: u32,
    h: &Hyperplane<fatpoints::Fp>,
    lines: bool,
    rng: &mut ChaCha8Rng,
) -> SchemeConfig<fatpoints::Fp> {
    let mut y = SchemeConfig::empty(n);
    let pieces = rng.gen_range(0..7);
    for _ in 0..pieces {
        // on the line, h is a single point and holds at most one support
        let room = n >= 2
            || !y
                .components
                .iter()
                .filter_map(|c| c.support())
                .any(|p| h.contains(f, p.coords()));
        let on = (room && rng.gen_bool(0.5)).then_some(h);
        match rng.gen_range(0..9) {
            0 => push_doubles(f, &mut y, 1, on, rng).unwrap(),
            1 => push_simples(f, &mut y, 1, on, rng).unwrap(),
            2 if room => push_transverse_jets(f, &mut y, 1, h, rng).unwrap(),
            3 if n >= 2 || on.is_none() => {
                // jet tangent to h, or a jet off h
                let at = match on {
                    Some(h) => random_point_on(f, h, rng).unwrap(),
                    None => random_point_off(f, h, rng).unwrap(),
                };
                let raw = random_vector(f, n as usize + 1, rng);
                let direction = if on.is_some() { h.project(f, &raw) } else { raw };
                if fatpoints::scheme::rank_of(f, &[at.coords(), &direction]) == 2 {
                    y.components.push(Component::Jet2 { at, direction });
                }
            }
            4 => {
                let cap = if on.is_some() && rng.gen_bool(0.5) { n } else { n + 1 };
                if cap >= 2 {
                    let degree = rng.gen_range(2..=cap) as usize;
                    let within = (on.is_some() && cap == n).then_some(h);
                    push_partial_double(f, &mut y, degree, on, within, rng).unwrap();
                }
            }
            5 if n >= 2 => {
                let s = rng.gen_range(0..n as i64);
                y.components.push(make_complex(f, n, s, h, rng).unwrap().unwrap());
            }
            6 if n >= 2 => {
                let x = if rng.gen_bool(0.5) || n < 3 {
                    Component::Simple {
                        at: random_point_on(f, h, rng).unwrap(),
                    }
                } else {
                    let mut tmp = SchemeConfig::empty(n);
                    let degree = rng.gen_range(2..=n) as usize;
                    push_partial_double(f, &mut tmp, degree, Some(h), Some(h), rng).unwrap();
                    tmp.components.pop().unwrap()
                };
                let direction = random_point_off(f, h, rng).unwrap().coords().to_vec();
                y.components.push(eject(f, &x, h, &direction).unwrap());
            }
            7 if lines => {
                let p = fatpoints::scheme::random_point(f, n, rng).unwrap();
                let q = fatpoints::scheme::random_point(f, n, rng).unwrap();
                y.components.extend(lines_joining(&[p, q]));
            }
            8 if lines && n >= 2 => {
                let p = random_point_on(f, h, rng).unwrap();
                let q = random_point_on(f, h, rng).unwrap();
                if p != q {
                    y.components.extend(lines_joining(&[p, q]));
                }
            }
            _ => push_simples(f, &mut y, 1, None, rng).unwrap(),
        }
    }
    y
}

/// Euler characteristic additivity of one trace/residual split.
pub fn chi_additivity_case(seed: u64) -> Result<(), String> {
    let f = gf();
    let mut rng = rng_for(seed);
    let n = rng.gen_range(1..=5u32);
    let d = rng.gen_range(1..=7u32);
    let h = random_hyperplane(&f, n, &mut rng);
    let y = random_config(&f, n, &h, true, &mut rng);
    let pair = trace_residual(&f, &y, &h).map_err(|e| e.to_string())?;
    let chi = |forms: u64, count: u64| forms as i64 - count as i64;
    let lhs = chi(h0_forms(n, d), y.condition_count(d));
    let rhs = chi(h0_forms(n - 1, d), pair.trace.condition_count(d))
        + chi(h0_forms(n, d - 1), pair.residual.condition_count(d - 1));
    if lhs != rhs {
        return Err(format!("seed {seed}: chi {lhs} != {rhs} for n={n}, d={d}: {y:?}"));
    }
    let no_lines = y.components.iter().all(|c| !matches!(c, Component::Line { .. }));
    if no_lines {
        let (dy, dt, dr) = (y.degree(), pair.trace.degree(), pair.residual.degree());
        if dy.unwrap() != dt.unwrap() + dr.unwrap() {
            return Err(format!("seed {seed}: degree {dy:?} != {dt:?} + {dr:?}"));
        }
    }
    // the matrices themselves have the counted number of rows
    let rows = build_matrix(&f, &pair.trace, d)
        .map_err(|e| e.to_string())?
        .matrix
        .rows();
    if rows as u64 != pair.trace.condition_count(d) {
        return Err(format!("seed {seed}: trace rows {rows}"));
    }
    Ok(())
}

/// Ejection keeps `deg X + (n + 1)`, and only points and partial double
/// points inside `h` can be ejected.
pub fn eject_case(seed: u64) -> Result<(), String> {
    let f = gf();
    let mut rng = rng_for(seed);
    let n = rng.gen_range(2..=5u32);
    let h = random_hyperplane(&f, n, &mut rng);
    let direction = random_point_off(&f, &h, &mut rng).unwrap().coords().to_vec();
    let mut y = SchemeConfig::empty(n);
    push_simples(&f, &mut y, 1, Some(&h), &mut rng).unwrap();
    for degree in 2..=n as usize {
        push_partial_double(&f, &mut y, degree, Some(&h), Some(&h), &mut rng).unwrap();
    }
    for x in &y.components {
        let e = eject(&f, x, &h, &direction).map_err(|e| e.to_string())?;
        let before = x.degree(n).unwrap() + n as u64 + 1;
        if e.degree(n) != Some(before) {
            return Err(format!("seed {seed}: degree {:?} != {before}", e.degree(n)));
        }
        let single = SchemeConfig {
            n,
            components: vec![e],
            hyperplane: None,
        };
        let pair = trace_residual(&f, &single, &h).map_err(|e| e.to_string())?;
        if pair.trace.degree() != Some(n as u64) || pair.residual.degree() != Some(before - n as u64) {
            return Err(format!(
                "seed {seed}: split {:?}/{:?}",
                pair.trace.degree(),
                pair.residual.degree()
            ));
        }
    }
    // everything else is refused
    let mut others = SchemeConfig::empty(n);
    push_doubles(&f, &mut others, 1, Some(&h), &mut rng).unwrap();
    push_transverse_jets(&f, &mut others, 1, &h, &mut rng).unwrap();
    push_simples(&f, &mut others, 1, None, &mut rng).unwrap();
    push_partial_double(&f, &mut others, 2, Some(&h), None, &mut rng).unwrap();
    others
        .components
        .push(make_complex(&f, n, 0, &h, &mut rng).unwrap().unwrap());
    let p = random_point_on(&f, &h, &mut rng).unwrap();
    let q = random_point_on(&f, &h, &mut rng).unwrap();
    others.components.extend(lines_joining(&[p, q]));
    for x in &others.components {
        if eject(&f, x, &h, &direction).is_ok() {
            return Err(format!("seed {seed}: ejected a {}", x.kind()));
        }
    }
    let inside = random_point_on(&f, &h, &mut rng).unwrap().coords().to_vec();
    if eject(&f, &y.components[0], &h, &inside).is_ok() {
        return Err(format!("seed {seed}: ejected along a direction of h"));
    }
    Ok(())
}

/// `h0` of a general configuration never exceeds that of the same census
/// with some supports moved into a hyperplane.
pub fn semicontinuity_case(seed: u64) -> Result<(), String> {
    let f = gf();
    let mut rng = rng_for(seed);
    let n = rng.gen_range(1..=4u32);
    let d = rng.gen_range(1..=6u32);
    let r = rng.gen_range(1..=h0_forms(n, d) / (n as u64 + 1) + 2) as usize;
    let simples = rng.gen_range(0..3);
    let h = Hyperplane::coordinate(&f, n);
    let draw = |rng: &mut ChaCha8Rng| {
        let mut y = SchemeConfig::empty(n);
        push_doubles(&f, &mut y, r, None, rng).unwrap();
        push_simples(&f, &mut y, simples, None, rng).unwrap();
        y
    };
    let generic = draw(&mut rng);
    let mut moved: Vec<usize> = (0..generic.components.len()).filter(|_| rng.gen_bool(0.6)).collect();
    if n == 1 {
        moved.truncate(1);
    }
    let special = fatpoints::scheme::specialize_into_h(&f, &draw(&mut rng), &moved, &h, &mut rng).unwrap();
    assert_eq!(generic.census(), special.census());
    let h0 = |y: &SchemeConfig<fatpoints::Fp>| {
        let m = build_matrix(&f, y, d).unwrap().matrix;
        m.cols() - m.rank()
    };
    let (g, s) = (h0(&generic), h0(&special));
    if s < g {
        return Err(format!(
            "seed {seed}: special h0 {s} < generic h0 {g} (n={n}, d={d}, r={r})"
        ));
    }
    Ok(())
}

/// Coefficients in `t` of `f(p + t v)`, by expanding products of linear
/// polynomials.
pub fn restrict<F: Field>(
    f: &F,
    basis: &MonomialBasis,
    coeffs: &[F::Elem],
    p: &[F::Elem],
    v: &[F::Elem],
) -> Vec<F::Elem> {
    let mut out = vec![f.zero(); basis.d() as usize + 1];
    for (alpha, c) in basis.monomials().iter().zip(coeffs) {
        let mut poly = vec![f.one()];
        for (i, &a) in alpha.iter().enumerate() {
            for _ in 0..a {
                let mut next = vec![f.zero(); poly.len() + 1];
                for (k, x) in poly.iter().enumerate() {
                    next[k] = f.add(&next[k], &f.mul(x, &p[i]));
                    next[k + 1] = f.add(&next[k + 1], &f.mul(x, &v[i]));
                }
                poly = next;
            }
        }
        for (k, x) in poly.iter().enumerate() {
            out[k] = f.add(&out[k], &f.mul(c, x));
        }
    }
    out
}

/// Every kernel vector vanishes on the scheme: checked through the matrix
/// and, independently, by restricting to lines through each support.
pub fn kernel_vanishing_case(seed: u64) -> Result<(), String> {
    let f = gf();
    let mut rng = rng_for(seed);
    let n = rng.gen_range(1..=3u32);
    let d = rng.gen_range(2..=5u32);
    let h = Hyperplane::coordinate(&f, n);
    let mut y = SchemeConfig::empty(n);
    let r = rng.gen_range(1..=h0_forms(n, d) / (n as u64 + 1) + 1) as usize;
    push_doubles(&f, &mut y, r, None, &mut rng).unwrap();
    push_simples(&f, &mut y, rng.gen_range(0..3), None, &mut rng).unwrap();
    if n >= 2 {
        push_transverse_jets(&f, &mut y, rng.gen_range(0..2), &h, &mut rng).unwrap();
    }
    let cm = build_matrix(&f, &y, d).unwrap();
    let basis = MonomialBasis::new(n, d);
    let res = rank_kernel(&cm.matrix);
    if res.rank + res.kernel_basis.len() != cm.matrix.cols() {
        return Err(format!("seed {seed}: rank-nullity"));
    }
    for k in &res.kernel_basis {
        if !cm.is_satisfied_by(k) {
            return Err(format!("seed {seed}: kernel vector fails its conditions"));
        }
        for c in &y.components {
            let at = c.support().unwrap().coords();
            let dirs: Vec<Vec<fatpoints::Fp>> = match c {
                Component::Double { .. } => (0..3).map(|_| random_vector(&f, n as usize + 1, &mut rng)).collect(),
                Component::Jet2 { direction, .. } => vec![direction.clone()],
                _ => vec![random_vector(&f, n as usize + 1, &mut rng)],
            };
            let order = if matches!(c, Component::Simple { .. }) { 1 } else { 2 };
            for v in dirs {
                let along = restrict(&f, &basis, k, at, &v);
                if along.iter().take(order).any(|x| !f.is_zero(x)) {
                    return Err(format!(
                        "seed {seed}: form does not vanish to order {order} at a {}",
                        c.kind()
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Coefficients of the Lagrange interpolant, lowest power of `t` first.
pub fn lagrange(ts: &[BigRational], values: &[BigRational]) -> Vec<BigRational> {
    let q = Rationals;
    let mut out = vec![q.zero(); ts.len()];
    for (i, ti) in ts.iter().enumerate() {
        let mut basis = vec![q.one()];
        let mut denom = q.one();
        for (j, tj) in ts.iter().enumerate() {
            if i == j {
                continue;
            }
            let mut next = vec![q.zero(); basis.len() + 1];
            for (k, c) in basis.iter().enumerate() {
                next[k + 1] = q.add(&next[k + 1], c);
                next[k] = q.sub(&next[k], &q.mul(c, tj));
            }
            basis = next;
            denom = q.mul(&denom, &q.sub(ti, tj));
        }
        let scale = q.div(&values[i], &denom).unwrap();
        for (k, c) in basis.iter().enumerate() {
            out[k] = q.add(&out[k], &q.mul(c, &scale));
        }
    }
    out
}
