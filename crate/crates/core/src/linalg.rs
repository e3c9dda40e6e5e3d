//! Dense matrices and exact rank computation.
//!
//! Rank over a field uses Gaussian elimination with the first nonzero entry
//! of each column as pivot (lowest row index wins). Rational matrices are
//! ranked fraction-free: each row is scaled to integers, then Bareiss
//! elimination runs over `BigInt`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Field, Rational, Scalar};

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Builds a matrix from equal-length rows. `cols` is needed for the
    /// zero-row case.
    pub fn from_rows<R: AsRef<[T]>>(cols: usize, rows: &[R]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::Dimension(format!("row of length {} in a {cols}-column matrix", r.len())));
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix { rows: rows.len(), cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[T]> {
        // chunks_exact panics on zero width
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn set_column(&mut self, j: usize, col: &[T]) {
        for (i, v) in col.iter().enumerate() {
            self[(i, j)] = v.clone();
        }
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn matmul(&self, rhs: &Matrix<T>) -> Result<Matrix<T>> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out: Matrix<T> = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = &self[(i, l)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j].mul_add_assign(a, &rhs[(l, j)]);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!("{}-column matrix times length-{} vector", self.cols, v.len())));
        }
        Ok(self
            .row_iter()
            .map(|r| {
                let mut acc = T::zero();
                for (a, b) in r.iter().zip(v) {
                    acc.mul_add_assign(a, b);
                }
                acc
            })
            .collect())
    }

    /// Kronecker product, block `(i, j)` equal to `self[i][j] * rhs`.
    pub fn kron(&self, rhs: &Matrix<T>) -> Matrix<T> {
        let (r, c) = (self.rows * rhs.rows, self.cols * rhs.cols);
        Matrix::from_fn(r, c, |i, j| {
            self[(i / rhs.rows, j / rhs.cols)].clone() * rhs[(i % rhs.rows, j % rhs.cols)].clone()
        })
    }

    /// Vertical concatenation.
    pub fn vstack(blocks: &[&Matrix<T>]) -> Result<Matrix<T>> {
        let cols = blocks.first().map_or(0, |b| b.cols);
        let mut data = Vec::new();
        let mut rows = 0;
        for b in blocks {
            if b.cols != cols {
                return Err(Error::Dimension("vstack of blocks with different widths".into()));
            }
            data.extend_from_slice(&b.data);
            rows += b.rows;
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn scale(&self, c: &T) -> Matrix<T> {
        self.map(|v| v.clone() * c.clone())
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Rank over a field by Gaussian elimination.
pub fn rank<T: Field>(m: &Matrix<T>) -> usize {
    let mut a = m.clone();
    let (rows, cols) = (a.rows, a.cols);
    let mut pivot_row = 0;
    for c in 0..cols {
        if pivot_row == rows {
            break;
        }
        let Some(p) = (pivot_row..rows).find(|&r| !a[(r, c)].is_zero()) else {
            continue;
        };
        if p != pivot_row {
            for j in 0..cols {
                a.data.swap(p * cols + j, pivot_row * cols + j);
            }
        }
        let inv = a[(pivot_row, c)].inv().expect("pivot is nonzero");
        for r in pivot_row + 1..rows {
            if a[(r, c)].is_zero() {
                continue;
            }
            let factor = a[(r, c)].clone() * inv.clone();
            for j in c..cols {
                let v = a[(r, j)].clone() - factor.clone() * a[(pivot_row, j)].clone();
                a[(r, j)] = v;
            }
        }
        pivot_row += 1;
    }
    pivot_row
}

/// Rank of a rational matrix by fraction-free Bareiss elimination.
pub fn rank_bareiss(m: &Matrix<Rational>) -> usize {
    let (rows, cols) = (m.rows, m.cols);
    // Scaling a row by a nonzero integer leaves the rank unchanged.
    let mut a: Vec<Vec<BigInt>> = m
        .row_iter()
        .map(|r| {
            let l = r.iter().fold(BigInt::one(), |acc, q| acc.lcm(&q.denom()));
            r.iter().map(|q| q.numer() * (&l / q.denom())).collect()
        })
        .collect();
    let mut prev = BigInt::one();
    let mut k = 0;
    for c in 0..cols {
        if k == rows {
            break;
        }
        let Some(p) = (k..rows).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(k, p);
        for i in k + 1..rows {
            for j in c + 1..cols {
                let v = (&a[i][j] * &a[k][c] - &a[i][c] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[k][c].clone();
        k += 1;
    }
    k
}

/// Row-echelon basis that grows one row at a time.
///
/// Every stored row has a leading one at its pivot and zeros at the pivots
/// of all rows stored before it, so reducing a candidate against the rows
/// in insertion order clears every pivot column.
#[derive(Clone, Debug)]
pub struct EchelonBasis<T> {
    width: usize,
    rows: Vec<(usize, Vec<T>)>,
}

impl<T: Field> EchelonBasis<T> {
    pub fn new(width: usize) -> Self {
        EchelonBasis { width, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Adds `row` if it is independent of the basis; returns whether it was.
    pub fn insert(&mut self, row: &[T]) -> bool {
        assert_eq!(row.len(), self.width, "row width");
        if self.rows.len() == self.width {
            return false;
        }
        let mut v = row.to_vec();
        for (p, b) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let f = v[*p].clone();
            for j in *p..self.width {
                if !b[j].is_zero() {
                    v[j] = v[j].clone() - f.clone() * b[j].clone();
                }
            }
        }
        let Some(p) = v.iter().position(|e| !e.is_zero()) else {
            return false;
        };
        let inv = v[p].inv().expect("nonzero");
        for e in v.iter_mut().skip(p) {
            *e = e.clone() * inv.clone();
        }
        self.rows.push((p, v));
        true
    }

    /// Inserts every row of `m`, returning how many raised the rank.
    pub fn extend(&mut self, m: &Matrix<T>) -> usize {
        m.row_iter().filter(|r| self.insert(r)).count()
    }

    /// Rank increase `m` would bring, without modifying `self`.
    pub fn gain(&self, m: &Matrix<T>) -> usize {
        self.clone().extend(m)
    }
}
