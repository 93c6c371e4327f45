//! Dense exact linear algebra over the rationals.
//!
//! Every routine here is deterministic: elimination always pivots on the
//! leftmost nonzero column and, within it, the topmost nonzero entry at or
//! below the current row. No magnitude-based pivoting is needed (or wanted)
//! in exact arithmetic, and the fixed rule makes kernels, images and
//! preimages reproducible bit-for-bit.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num::{BigInt, BigRational, One, Signed, Zero};
use thiserror::Error;

/// Exact rational scalar, always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Shorthand for an integer-valued rational.
pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Shorthand for `num / den`. Panics if `den == 0`.
pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Raises `value` to `(-1)^exponent_parity`: itself for even parity, its inverse for odd.
pub fn signed_power(value: &Rational, odd: bool) -> Rational {
    if odd {
        value.recip()
    } else {
        value.clone()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("right-hand side is not in the column space")]
    NoSolution,
    #[error("column families span different subspaces")]
    SpansDiffer,
    #[error("column family is linearly dependent")]
    Dependent,
}

/// Dense row-major matrix of rationals. Zero-sized shapes (`0 x k`, `k x 0`) are legal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    /// Builds a matrix from row-major data; `data.len()` must equal `rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Rational>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Builds a matrix from rows. All rows must have equal length; `cols` is
    /// only consulted when `rows` is empty.
    pub fn from_rows(rows: Vec<Vec<Rational>>, cols: usize) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(cols, Vec::len);
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(LinalgError::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        Ok(Matrix {
            rows: n,
            cols,
            data,
        })
    }

    /// Integer convenience constructor, mostly for tests and fixtures.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let data = rows
            .iter()
            .flat_map(|r| {
                assert_eq!(r.len(), cols, "ragged integer matrix");
                r.iter().map(|&v| int(v))
            })
            .collect();
        Matrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    /// A single column from its entries.
    pub fn column(entries: Vec<Rational>) -> Self {
        Matrix {
            rows: entries.len(),
            cols: 1,
            data: entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Rational] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    /// Column `j` as an `rows x 1` matrix.
    pub fn col(&self, j: usize) -> Matrix {
        Matrix::column((0..self.rows).map(|i| self[(i, j)].clone()).collect())
    }

    pub fn columns(&self) -> impl Iterator<Item = Matrix> + '_ {
        (0..self.cols).map(move |j| self.col(j))
    }

    pub fn select_columns(&self, idx: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(self.rows, idx.len());
        for (k, &j) in idx.iter().enumerate() {
            for i in 0..self.rows {
                m[(i, k)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(idx.len(), self.cols);
        for (k, &i) in idx.iter().enumerate() {
            for j in 0..self.cols {
                m[(k, j)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        self.select_rows(rows).select_columns(cols)
    }

    /// Horizontal concatenation. `rows` fixes the height when `blocks` is empty.
    pub fn hcat(rows: usize, blocks: &[&Matrix]) -> Result<Matrix, LinalgError> {
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Matrix::zeros(rows, cols);
        let mut offset = 0;
        for b in blocks {
            if b.rows != rows {
                return Err(LinalgError::DimensionMismatch(format!(
                    "hcat of {}-row block into {rows} rows",
                    b.rows
                )));
            }
            for i in 0..rows {
                for j in 0..b.cols {
                    m[(i, offset + j)] = b[(i, j)].clone();
                }
            }
            offset += b.cols;
        }
        Ok(m)
    }

    /// Vertical concatenation. `cols` fixes the width when `blocks` is empty.
    pub fn vcat(cols: usize, blocks: &[&Matrix]) -> Result<Matrix, LinalgError> {
        let t: Vec<Matrix> = blocks.iter().map(|b| b.transpose()).collect();
        let refs: Vec<&Matrix> = t.iter().collect();
        Ok(Matrix::hcat(cols, &refs)?.transpose())
    }

    /// Block-diagonal matrix `diag(a, b)`.
    pub fn block_diag(a: &Matrix, b: &Matrix) -> Matrix {
        let mut m = Matrix::zeros(a.rows + b.rows, a.cols + b.cols);
        for i in 0..a.rows {
            for j in 0..a.cols {
                m[(i, j)] = a[(i, j)].clone();
            }
        }
        for i in 0..b.rows {
            for j in 0..b.cols {
                m[(a.rows + i, a.cols + j)] = b[(i, j)].clone();
            }
        }
        m
    }

    pub fn scale(&self, s: &Rational) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    /// Fallible product, for call sites that cannot guarantee shapes.
    pub fn try_mul(&self, rhs: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != rhs.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Swaps columns `a` and `b` in place.
    pub fn swap_columns(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        rref_decompose(self).pivots.len()
    }

    /// `true` iff the columns are linearly independent.
    pub fn has_independent_columns(&self) -> bool {
        self.rank() == self.cols
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.try_mul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix sum shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix difference shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| -a).collect(),
        }
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ";")?;
            }
            for j in 0..self.cols {
                write!(f, " {}", self[(i, j)])?;
            }
        }
        write!(f, " ]")
    }
}

/// Output of [`rref_decompose`]: `transform * m == rref`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub rref: Matrix,
    pub pivots: Vec<usize>,
    pub transform: Matrix,
}

/// Gauss-Jordan elimination tracking the accumulated row operations.
pub fn rref_decompose(m: &Matrix) -> Rref {
    let mut a = m.clone();
    let mut t = Matrix::identity(m.rows);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..a.cols {
        if row == a.rows {
            break;
        }
        let Some(p) = (row..a.rows).find(|&i| !a[(i, col)].is_zero()) else {
            continue;
        };
        a.swap_rows(row, p);
        t.swap_rows(row, p);
        let inv = a[(row, col)].recip();
        for j in 0..a.cols {
            a[(row, j)] *= &inv;
        }
        for j in 0..t.cols {
            t[(row, j)] *= &inv;
        }
        for i in 0..a.rows {
            if i == row || a[(i, col)].is_zero() {
                continue;
            }
            let factor = a[(i, col)].clone();
            for j in col..a.cols {
                let delta = &factor * &a[(row, j)];
                a[(i, j)] -= delta;
            }
            for j in 0..t.cols {
                let delta = &factor * &t[(row, j)];
                t[(i, j)] -= delta;
            }
        }
        pivots.push(col);
        row += 1;
    }
    Rref {
        rref: a,
        pivots,
        transform: t,
    }
}

/// Exact determinant by fraction-exact elimination. `det` of a `0 x 0` matrix is 1.
pub fn determinant(m: &Matrix) -> Result<Rational, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let n = m.rows;
    let mut a = m.clone();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&i| !a[(i, col)].is_zero()) else {
            return Ok(Rational::zero());
        };
        if p != col {
            a.swap_rows(p, col);
            det = -det;
        }
        let pivot = a[(col, col)].clone();
        det *= &pivot;
        for i in col + 1..n {
            if a[(i, col)].is_zero() {
                continue;
            }
            let factor = &a[(i, col)] / &pivot;
            for j in col..n {
                let delta = &factor * &a[(col, j)];
                a[(i, j)] -= delta;
            }
        }
    }
    Ok(det)
}

/// Columns form a basis of `ker m`, one per free column of the rref, in column order.
pub fn kernel_basis(m: &Matrix) -> Matrix {
    let r = rref_decompose(m);
    let free: Vec<usize> = (0..m.cols).filter(|j| !r.pivots.contains(j)).collect();
    let mut k = Matrix::zeros(m.cols, free.len());
    for (c, &f) in free.iter().enumerate() {
        k[(f, c)] = Rational::one();
        for (i, &p) in r.pivots.iter().enumerate() {
            k[(p, c)] = -r.rref[(i, f)].clone();
        }
    }
    k
}

/// The pivot columns of `m` itself: a basis of `im m` drawn from its own columns.
pub fn column_space_basis(m: &Matrix) -> Matrix {
    let r = rref_decompose(m);
    m.select_columns(&r.pivots)
}

/// Solves `m x = b` column by column. Free variables are set to zero, so the
/// returned solution is canonical for the given input.
pub fn solve_linear(m: &Matrix, b: &Matrix) -> Result<Matrix, LinalgError> {
    if b.rows != m.rows {
        return Err(LinalgError::DimensionMismatch(format!(
            "right-hand side has {} rows, matrix has {}",
            b.rows, m.rows
        )));
    }
    let aug = Matrix::hcat(m.rows, &[m, b])?;
    let r = rref_decompose(&aug);
    if r.pivots.iter().any(|&p| p >= m.cols) {
        return Err(LinalgError::NoSolution);
    }
    let mut x = Matrix::zeros(m.cols, b.cols);
    for (i, &p) in r.pivots.iter().enumerate() {
        for j in 0..b.cols {
            x[(p, j)] = r.rref[(i, m.cols + j)].clone();
        }
    }
    Ok(x)
}

/// `true` iff every column of `v` lies in the column span of `span`.
pub fn in_column_span(span: &Matrix, v: &Matrix) -> bool {
    solve_linear(span, v).is_ok()
}

/// `[new, old]` in the sense `new = old * T`, returning `det T`.
///
/// Both families must be bases of the same subspace, given in ambient coordinates.
pub fn change_of_basis_det(new_basis: &Matrix, old_basis: &Matrix) -> Result<Rational, LinalgError> {
    if new_basis.shape() != old_basis.shape() {
        return Err(LinalgError::DimensionMismatch(format!(
            "bases of shapes {:?} and {:?}",
            new_basis.shape(),
            old_basis.shape()
        )));
    }
    if !old_basis.has_independent_columns() {
        return Err(LinalgError::Dependent);
    }
    let t = solve_linear(old_basis, new_basis).map_err(|e| match e {
        LinalgError::NoSolution => LinalgError::SpansDiffer,
        other => other,
    })?;
    let d = determinant(&t)?;
    if d.is_zero() {
        // new lies inside span(old) but is dependent, so the spans differ
        return Err(LinalgError::SpansDiffer);
    }
    Ok(d)
}

pub fn inverse(m: &Matrix) -> Result<Matrix, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let r = rref_decompose(m);
    if r.pivots.len() < m.rows {
        return Err(LinalgError::Singular);
    }
    Ok(r.transform)
}

/// `true` iff `a` is skew-symmetric (`a^T = -a`, zero diagonal).
pub fn is_skew_symmetric(a: &Matrix) -> bool {
    a.is_square() && a.transpose() == -a
}

pub fn abs(x: &Rational) -> Rational {
    x.abs()
}
