//! Exact dense Gaussian elimination: rank, kernel, and inhomogeneous solve.
//!
//! Pivoting is deterministic: columns are scanned left to right and the
//! first row at or below the current pivot row with a nonzero entry is
//! taken.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith::{Field, Rationals};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RankError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("fraction-free elimination limited to {limit} columns, matrix has {cols}")]
    TooLarge { cols: usize, limit: usize },
}

/// Dense row-major matrix over a field.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<F: Field> {
    field: F,
    rows: usize,
    cols: usize,
    data: Vec<F::Elem>,
}

impl<F: Field> Matrix<F> {
    pub fn zeros(field: F, rows: usize, cols: usize) -> Self {
        let data = vec![field.zero(); rows * cols];
        Self {
            field,
            rows,
            cols,
            data,
        }
    }

    pub fn identity(field: F, size: usize) -> Self {
        let mut m = Self::zeros(field, size, size);
        for i in 0..size {
            m.data[i * size + i] = m.field.one();
        }
        m
    }

    pub fn from_rows(field: F, cols: usize, rows: Vec<Vec<F::Elem>>) -> Result<Self, RankError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let n_rows = rows.len();
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(RankError::Dimension(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        Ok(Self {
            field,
            rows: n_rows,
            cols,
            data,
        })
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[F::Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> &F::Elem {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F::Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn push_row(&mut self, row: Vec<F::Elem>) -> Result<(), RankError> {
        if row.len() != self.cols {
            return Err(RankError::Dimension(format!(
                "pushed row has {} entries, expected {}",
                row.len(),
                self.cols
            )));
        }
        self.data.extend(row);
        self.rows += 1;
        Ok(())
    }

    pub fn mul_vec(&self, x: &[F::Elem]) -> Vec<F::Elem> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| self.field.dot(self.row(i), x)).collect()
    }

    /// `y^T M`
    pub fn vec_mul(&self, y: &[F::Elem]) -> Vec<F::Elem> {
        assert_eq!(y.len(), self.rows);
        let mut out = vec![self.field.zero(); self.cols];
        for (i, yi) in y.iter().enumerate() {
            if self.field.is_zero(yi) {
                continue;
            }
            for (o, m) in out.iter_mut().zip(self.row(i)) {
                self.field.mul_add_assign(o, yi, m);
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        let mut work = self.data.clone();
        reduce(&self.field, &mut work, self.rows, self.cols, self.cols, false).len()
    }
}

/// Result of a full reduction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EliminationResult<E> {
    pub rank: usize,
    pub pivot_columns: Vec<usize>,
    pub kernel_basis: Vec<Vec<E>>,
}

/// Reduces `data` (row-major, `width` columns) in place, choosing pivots
/// only among the first `limit` columns. With `full` the pivot rows are
/// normalized and cleared above as well (reduced row echelon form).
/// Returns the pivot columns; pivot `k` sits in row `k`.
fn reduce<F: Field>(
    field: &F,
    data: &mut [F::Elem],
    rows: usize,
    width: usize,
    limit: usize,
    full: bool,
) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..limit {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !field.is_zero(&data[i * width + col])) else {
            continue;
        };
        if p != r {
            for j in 0..width {
                data.swap(p * width + j, r * width + j);
            }
        }
        let inv = field.inv(&data[r * width + col]).expect("pivot is nonzero");
        for x in &mut data[r * width..(r + 1) * width] {
            *x = field.mul(x, &inv);
        }
        let (head, tail) = data.split_at_mut(r * width);
        let (pivot_row, below) = tail.split_at_mut(width);
        for chunk in below.chunks_mut(width).take(rows - r - 1) {
            let factor = chunk[col].clone();
            if !field.is_zero(&factor) {
                field.sub_scaled(&mut chunk[col..], &factor, &pivot_row[col..]);
            }
        }
        if full {
            for chunk in head.chunks_mut(width) {
                let factor = chunk[col].clone();
                if !field.is_zero(&factor) {
                    field.sub_scaled(&mut chunk[col..], &factor, &pivot_row[col..]);
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    pivots
}

/// Kernel vectors read off a reduced row echelon form: one per free column,
/// with a 1 there and zeros in the other free columns.
fn kernel_from_rref<F: Field>(
    field: &F,
    rref: &[F::Elem],
    width: usize,
    cols: usize,
    pivots: &[usize],
) -> Vec<Vec<F::Elem>> {
    let mut is_pivot = vec![false; cols];
    for &p in pivots {
        is_pivot[p] = true;
    }
    (0..cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![field.zero(); cols];
            v[free] = field.one();
            for (k, &p) in pivots.iter().enumerate() {
                v[p] = field.neg(&rref[k * width + free]);
            }
            v
        })
        .collect()
}

/// Rank, pivot columns and a kernel basis.
pub fn rank_kernel<F: Field>(m: &Matrix<F>) -> EliminationResult<F::Elem> {
    let mut work = m.data.clone();
    let pivots = reduce(&m.field, &mut work, m.rows, m.cols, m.cols, true);
    let kernel_basis = kernel_from_rref(&m.field, &work, m.cols, m.cols, &pivots);
    EliminationResult {
        rank: pivots.len(),
        pivot_columns: pivots,
        kernel_basis,
    }
}

/// Outcome of [`solve_interpolant`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution<E> {
    /// A particular solution and a basis of the homogeneous solutions.
    Consistent {
        particular: Vec<E>,
        kernel_basis: Vec<Vec<E>>,
    },
    /// `certificate^T M = 0` while `certificate . rhs != 0`.
    Inconsistent { certificate: Vec<E> },
}

/// Solves `M x = rhs` exactly.
pub fn solve_interpolant<F: Field>(m: &Matrix<F>, rhs: &[F::Elem]) -> Result<Solution<F::Elem>, RankError> {
    if rhs.len() != m.rows {
        return Err(RankError::Dimension(format!(
            "rhs has {} entries, matrix has {} rows",
            rhs.len(),
            m.rows
        )));
    }
    let f = &m.field;
    // [M | rhs | I] so the row operations are recorded in the identity block
    let width = m.cols + 1 + m.rows;
    let mut work = Vec::with_capacity(m.rows * width);
    for (i, b) in rhs.iter().enumerate() {
        work.extend_from_slice(m.row(i));
        work.push(b.clone());
        work.extend((0..m.rows).map(|j| if i == j { f.one() } else { f.zero() }));
    }
    let pivots = reduce(f, &mut work, m.rows, width, m.cols, true);
    for k in pivots.len()..m.rows {
        if !f.is_zero(&work[k * width + m.cols]) {
            let certificate = work[k * width + m.cols + 1..(k + 1) * width].to_vec();
            return Ok(Solution::Inconsistent { certificate });
        }
    }
    let mut particular = vec![f.zero(); m.cols];
    for (k, &p) in pivots.iter().enumerate() {
        particular[p] = work[k * width + m.cols].clone();
    }
    let kernel_basis = kernel_from_rref(f, &work, width, m.cols, &pivots);
    Ok(Solution::Consistent {
        particular,
        kernel_basis,
    })
}

/// Default column cap for [`fraction_free_rank_kernel`].
pub const FRACTION_FREE_COLUMN_LIMIT: usize = 60;

/// Rank and kernel over the rationals by Bareiss elimination on the
/// integer matrix obtained by clearing each row's denominators. The kernel
/// is recovered by back substitution and coincides with the basis returned
/// by [`rank_kernel`].
pub fn fraction_free_rank_kernel(
    m: &Matrix<Rationals>,
    column_limit: usize,
) -> Result<EliminationResult<BigRational>, RankError> {
    if m.cols > column_limit {
        return Err(RankError::TooLarge {
            cols: m.cols,
            limit: column_limit,
        });
    }
    let (rows, cols) = (m.rows, m.cols);
    let mut a: Vec<Vec<BigInt>> = (0..rows)
        .map(|i| {
            let row = m.row(i);
            let lcm = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
            row.iter().map(|q| q.numer() * (&lcm / q.denom())).collect()
        })
        .collect();

    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for col in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(p, r);
        for i in r + 1..rows {
            for j in col + 1..cols {
                let v = (&a[r][col] * &a[i][j] - &a[i][col] * &a[r][j]) / &prev;
                a[i][j] = v;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[r][col].clone();
        pivots.push(col);
        r += 1;
    }

    let mut is_pivot = vec![false; cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let kernel_basis = (0..cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut x = vec![BigRational::zero(); cols];
            x[free] = BigRational::one();
            for (k, &p) in pivots.iter().enumerate().rev() {
                let mut acc = BigRational::zero();
                for j in p + 1..cols {
                    if !x[j].is_zero() && !a[k][j].is_zero() {
                        acc += BigRational::from_integer(a[k][j].clone()) * &x[j];
                    }
                }
                x[p] = -acc / BigRational::from_integer(a[k][p].clone());
            }
            x
        })
        .collect();
    debug_assert!(pivots.iter().all(|&p| p < cols));
    Ok(EliminationResult {
        rank: pivots.len(),
        pivot_columns: pivots,
        kernel_basis,
    })
}
