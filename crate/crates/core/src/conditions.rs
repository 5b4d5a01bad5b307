//! Condition matrices: the linear map from coefficient vectors of degree-`d`
//! forms to the values (and derivative values) a scheme prescribes.
//!
//! Columns follow [`MonomialBasis`] order. Derivative rows are the
//! unnormalized `sum_i v_i df/dx_i`; second derivatives likewise.

use serde::Serialize;
use thiserror::Error;

use crate::arith::Field;
use crate::combinatorics::MonomialBasis;
use crate::rank::Matrix;
use crate::scheme::{rank_of, Component, SchemeConfig};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConditionError {
    #[error("component {index}: {reason}")]
    Degenerate { index: usize, reason: String },
    #[error("component {index}: a line needs {needed} distinct parameters but the characteristic is {p}")]
    Characteristic { index: usize, needed: u32, p: u64 },
    #[error("component {index}: vector of length {got} in P^{n}")]
    Arity { index: usize, got: usize, n: u32 },
}

/// What a row of the condition matrix asks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum Condition {
    Value,
    /// first derivative along the `direction`-th vector of the component
    Derivative {
        direction: usize,
    },
    /// second derivative along the transverse direction and the
    /// `direction`-th vector (`None` for the pure transverse one)
    Second {
        direction: Option<usize>,
    },
    /// value at `P + t Q` on a line
    LineSample {
        t: u32,
    },
    /// value at the `point`-th point of a complex
    ComplexPoint {
        point: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RowLabel {
    pub component: usize,
    #[serde(flatten)]
    pub condition: Condition,
}

#[derive(Debug, Clone)]
pub struct ConditionMatrix<F: Field> {
    pub matrix: Matrix<F>,
    pub labels: Vec<RowLabel>,
    pub basis: MonomialBasis,
}

impl<F: Field> ConditionMatrix<F> {
    /// `header "n d rows cols p"` then one line per row.
    pub fn dump(&self) -> String {
        let m = &self.matrix;
        let mut out = format!(
            "{} {} {} {} {}\n",
            self.basis.n(),
            self.basis.d(),
            m.rows(),
            m.cols(),
            m.field().characteristic()
        );
        for i in 0..m.rows() {
            let line: Vec<String> = m.row(i).iter().map(ToString::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    /// Whether the form with these coefficients satisfies every condition.
    pub fn is_satisfied_by(&self, coeffs: &[F::Elem]) -> bool {
        let f = self.matrix.field();
        self.matrix.mul_vec(coeffs).iter().all(|x| f.is_zero(x))
    }
}

/// Evaluates monomials and their first and second partial derivatives at
/// one point, using a table of coordinate powers.
struct Evaluator<'a, F: Field> {
    field: &'a F,
    basis: &'a MonomialBasis,
    powers: Vec<Vec<F::Elem>>,
}

impl<'a, F: Field> Evaluator<'a, F> {
    fn new(field: &'a F, basis: &'a MonomialBasis, at: &[F::Elem]) -> Self {
        let d = basis.d() as usize;
        let powers = at
            .iter()
            .map(|x| {
                let mut row = Vec::with_capacity(d + 1);
                row.push(field.one());
                for k in 1..=d {
                    row.push(field.mul(&row[k - 1], x));
                }
                row
            })
            .collect();
        Self { field, basis, powers }
    }

    /// `x^(alpha - lowered)` at the point; zero when an exponent goes
    /// negative.
    fn monomial(&self, alpha: &[u32], lowered: &[usize]) -> F::Elem {
        let f = self.field;
        let mut acc = f.one();
        for (i, &a) in alpha.iter().enumerate() {
            let drop = lowered.iter().filter(|&&j| j == i).count() as u32;
            if drop > a {
                return f.zero();
            }
            acc = f.mul(&acc, &self.powers[i][(a - drop) as usize]);
        }
        acc
    }

    fn value_row(&self) -> Vec<F::Elem> {
        self.basis
            .monomials()
            .iter()
            .map(|alpha| self.monomial(alpha, &[]))
            .collect()
    }

    fn derivative_row(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        let f = self.field;
        self.basis
            .monomials()
            .iter()
            .map(|alpha| {
                let mut acc = f.zero();
                for (i, vi) in v.iter().enumerate() {
                    if alpha[i] == 0 || f.is_zero(vi) {
                        continue;
                    }
                    let term = f.mul(&f.from_i64(alpha[i] as i64), &self.monomial(alpha, &[i]));
                    f.mul_add_assign(&mut acc, vi, &term);
                }
                acc
            })
            .collect()
    }

    fn second_row(&self, u: &[F::Elem], v: &[F::Elem]) -> Vec<F::Elem> {
        let f = self.field;
        self.basis
            .monomials()
            .iter()
            .map(|alpha| {
                let mut acc = f.zero();
                for (i, ui) in u.iter().enumerate() {
                    if alpha[i] == 0 || f.is_zero(ui) {
                        continue;
                    }
                    for (j, vj) in v.iter().enumerate() {
                        let mult = alpha[i] as i64 * (alpha[j] as i64 - (i == j) as i64);
                        if mult <= 0 || f.is_zero(vj) {
                            continue;
                        }
                        let term = f.mul(&f.from_i64(mult), &self.monomial(alpha, &[i, j]));
                        f.mul_add_assign(&mut acc, &f.mul(ui, vj), &term);
                    }
                }
                acc
            })
            .collect()
    }
}

fn unit<F: Field>(field: &F, len: usize, i: usize) -> Vec<F::Elem> {
    let mut e = vec![field.zero(); len];
    e[i] = field.one();
    e
}

/// Labelled condition rows.
pub type Rows<E> = Vec<(Condition, Vec<E>)>;

/// The rows one component imposes on forms of degree `basis.d()`.
pub fn rows_for_component<F: Field>(
    field: &F,
    c: &Component<F::Elem>,
    basis: &MonomialBasis,
    index: usize,
) -> Result<Rows<F::Elem>, ConditionError> {
    let n = basis.n();
    let width = n as usize + 1;
    let check_len = |v: &[F::Elem]| {
        if v.len() == width {
            Ok(())
        } else {
            Err(ConditionError::Arity { index, got: v.len(), n })
        }
    };
    let independent = |at: &[F::Elem], dirs: &[&[F::Elem]]| {
        let mut all = vec![at];
        all.extend_from_slice(dirs);
        if rank_of(field, &all) == all.len() {
            Ok(())
        } else {
            Err(ConditionError::Degenerate {
                index,
                reason: "direction vectors are zero or dependent on the support".into(),
            })
        }
    };
    if let Some(at) = c.support() {
        check_len(at.coords())?;
    }
    let mut rows = Vec::new();
    match c {
        Component::Simple { at } => {
            rows.push((Condition::Value, Evaluator::new(field, basis, at.coords()).value_row()));
        }
        Component::Double { at } => {
            let ev = Evaluator::new(field, basis, at.coords());
            rows.push((Condition::Value, ev.value_row()));
            let pivot = at
                .coords()
                .iter()
                .position(|x| !field.is_zero(x))
                .expect("points are nonzero");
            for (k, i) in (0..width).filter(|&i| i != pivot).enumerate() {
                rows.push((
                    Condition::Derivative { direction: k },
                    ev.derivative_row(&unit(field, width, i)),
                ));
            }
        }
        Component::DoubleInSubspace { at, directions } => {
            directions.iter().try_for_each(|v| check_len(v))?;
            let refs: Vec<&[F::Elem]> = directions.iter().map(Vec::as_slice).collect();
            independent(at.coords(), &refs)?;
            let ev = Evaluator::new(field, basis, at.coords());
            rows.push((Condition::Value, ev.value_row()));
            for (k, v) in directions.iter().enumerate() {
                rows.push((Condition::Derivative { direction: k }, ev.derivative_row(v)));
            }
        }
        Component::Jet2 { at, direction } => {
            check_len(direction)?;
            independent(at.coords(), &[direction])?;
            let ev = Evaluator::new(field, basis, at.coords());
            rows.push((Condition::Value, ev.value_row()));
            rows.push((Condition::Derivative { direction: 0 }, ev.derivative_row(direction)));
        }
        Component::Line { at, through } => {
            check_len(through.coords())?;
            independent(at.coords(), &[through.coords()])?;
            let d = basis.d();
            let p = field.characteristic();
            if p != 0 && p <= d as u64 {
                return Err(ConditionError::Characteristic {
                    index,
                    needed: d + 1,
                    p,
                });
            }
            for t in 0..=d {
                let tt = field.from_i64(t as i64);
                let x: Vec<F::Elem> = at
                    .coords()
                    .iter()
                    .zip(through.coords())
                    .map(|(a, b)| field.add(a, &field.mul(&tt, b)))
                    .collect();
                rows.push((
                    Condition::LineSample { t },
                    Evaluator::new(field, basis, &x).value_row(),
                ));
            }
        }
        Component::Complex { points, .. } => {
            for (j, p) in points.iter().enumerate() {
                check_len(p.coords())?;
                rows.push((
                    Condition::ComplexPoint { point: j },
                    Evaluator::new(field, basis, p.coords()).value_row(),
                ));
            }
        }
        Component::Ejected {
            at,
            plane,
            directions,
            transverse,
        } => {
            plane.iter().chain(directions).try_for_each(|v| check_len(v))?;
            check_len(transverse)?;
            let mut span: Vec<&[F::Elem]> = plane.iter().map(Vec::as_slice).collect();
            span.push(transverse);
            independent(at.coords(), &span)?;
            let ev = Evaluator::new(field, basis, at.coords());
            rows.push((Condition::Value, ev.value_row()));
            for (k, v) in plane.iter().enumerate() {
                rows.push((Condition::Derivative { direction: k }, ev.derivative_row(v)));
            }
            rows.push((
                Condition::Derivative { direction: plane.len() },
                ev.derivative_row(transverse),
            ));
            for (k, v) in directions.iter().enumerate() {
                rows.push((Condition::Second { direction: Some(k) }, ev.second_row(transverse, v)));
            }
            rows.push((
                Condition::Second { direction: None },
                ev.second_row(transverse, transverse),
            ));
        }
    }
    Ok(rows)
}

/// Stacks the rows of every component, in component order.
pub fn build_matrix<F: Field>(
    field: &F,
    y: &SchemeConfig<F::Elem>,
    d: u32,
) -> Result<ConditionMatrix<F>, ConditionError> {
    let basis = MonomialBasis::new(y.n, d);
    let mut data = Vec::new();
    let mut labels = Vec::new();
    for (index, c) in y.components.iter().enumerate() {
        for (condition, row) in rows_for_component(field, c, &basis, index)? {
            labels.push(RowLabel {
                component: index,
                condition,
            });
            data.push(row);
        }
    }
    let matrix = Matrix::from_rows(field.clone(), basis.len(), data).expect("rows have basis length");
    Ok(ConditionMatrix { matrix, labels, basis })
}

/// Evaluates a form given by its coefficients at a point.
pub fn evaluate_form<F: Field>(field: &F, basis: &MonomialBasis, coeffs: &[F::Elem], at: &[F::Elem]) -> F::Elem {
    field.dot(&Evaluator::new(field, basis, at).value_row(), coeffs)
}
