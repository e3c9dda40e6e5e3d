//! Kronecker products, Kronecker powers, the `ivec` index map and mode
//! unfoldings of sparse tensors.
//!
//! Vectors are plain slices with 0-based storage. Tensor multi-indices,
//! as accepted by [`ivec`] and [`SparseTensor`], are 1-based.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Default cap on the number of scalar slots any materialized Kronecker
/// power may occupy.
pub const DEFAULT_SIZE_CAP: usize = 100_000_000;

/// `u ⊗ v`, ordered `(u1 v1, ..., u1 vm, ..., un v1, ..., un vm)`.
pub fn kron<T: Scalar>(u: &[T], v: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(u.len() * v.len());
    for a in u {
        for b in v {
            out.push(a.clone() * b.clone());
        }
    }
    out
}

/// `v_1 ⊗ ... ⊗ v_m`; the empty product is `(1)`.
pub fn kron_all<T: Scalar, V: AsRef<[T]>>(factors: &[V]) -> Vec<T> {
    factors.iter().fold(vec![T::one()], |acc, f| kron(&acc, f.as_ref()))
}

/// `n^e`, or `None` on overflow.
pub fn checked_pow(n: usize, e: usize) -> Option<usize> {
    (0..e).try_fold(1usize, |acc, _| acc.checked_mul(n))
}

fn check_cap(n: usize, e: usize, cap: usize) -> Result<usize> {
    match checked_pow(n, e) {
        Some(len) if len <= cap => Ok(len),
        _ => Err(Error::Resource(format!(
            "Kronecker power of length {n}^{e} exceeds the cap of {cap} slots"
        ))),
    }
}

/// `x^[i]`, the `i`-fold Kronecker power. `x^[0] = (1)`.
pub fn kron_power<T: Scalar>(x: &[T], i: usize, cap: usize) -> Result<Vec<T>> {
    check_cap(x.len(), i, cap)?;
    let mut out = vec![T::one()];
    for _ in 0..i {
        out = kron(&out, x);
    }
    Ok(out)
}

/// Mode sizes `(J_1, ..., J_m)` of a tensor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModeShape(Vec<usize>);

impl ModeShape {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.iter().any(|&s| s == 0) {
            return Err(Error::Domain(format!("mode sizes must be positive, got {sizes:?}")));
        }
        Ok(ModeShape(sizes))
    }

    pub fn cubical(n: usize, order: usize) -> Result<Self> {
        Self::new(vec![n; order])
    }

    pub fn sizes(&self) -> &[usize] {
        &self.0
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    /// Product of all mode sizes.
    pub fn volume(&self) -> Option<usize> {
        self.0.iter().try_fold(1usize, |acc, &s| acc.checked_mul(s))
    }

    /// Shape with mode `mode` (1-based) removed.
    pub fn without(&self, mode: usize) -> ModeShape {
        let mut s = self.0.clone();
        s.remove(mode - 1);
        ModeShape(s)
    }
}

/// Linear index `j_1 + Σ_{k≥2} (j_k - 1) Π_{l<k} J_l` of the 1-based
/// multi-index `j` (so the result is 1-based too).
pub fn ivec(j: &[usize], shape: &ModeShape) -> Result<usize> {
    if j.len() != shape.order() {
        return Err(Error::Dimension(format!(
            "multi-index of length {} for an order-{} shape",
            j.len(),
            shape.order()
        )));
    }
    let mut idx = 0usize;
    let mut stride = 1usize;
    for (m, (&jm, &size)) in j.iter().zip(shape.sizes()).enumerate() {
        if jm == 0 || jm > size {
            return Err(Error::Index(format!("component {} of {j:?} is outside 1..={size}", m + 1)));
        }
        idx += (jm - 1) * stride;
        stride = stride.saturating_mul(size);
    }
    Ok(idx + 1)
}

/// Sparse matrix in compressed-row form. Indices are 0-based; no explicit
/// zeros and no duplicate positions are stored.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix<T> {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<T>,
}

impl<T: Scalar> SparseMatrix<T> {
    /// Builds from `(row, col, value)` triplets. Zero values are dropped;
    /// repeated positions are rejected.
    pub fn from_triplets(rows: usize, cols: usize, mut triplets: Vec<(usize, usize, T)>) -> Result<Self> {
        triplets.retain(|t| !t.2.is_zero());
        triplets.sort_by_key(|t| (t.0, t.1));
        let mut row_ptr = vec![0usize; rows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(Error::Index(format!("entry ({r}, {c}) outside a {rows}x{cols} matrix")));
            }
            if last == Some((r, c)) {
                return Err(Error::Domain(format!("duplicate entry at ({r}, {c})")));
            }
            last = Some((r, c));
            row_ptr[r + 1] += 1;
            col_idx.push(c);
            values.push(v);
        }
        for r in 0..rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        Ok(SparseMatrix { rows, cols, row_ptr, col_idx, values })
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, n, (0..n).map(|i| (i, i, T::one())).collect()).expect("valid identity")
    }

    pub fn from_dense(m: &Matrix<T>) -> Self {
        let mut t = Vec::new();
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                t.push((i, j, m[(i, j)].clone()));
            }
        }
        Self::from_triplets(m.rows(), m.cols(), t).expect("dense entries are unique")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Nonzeros of row `r` as `(col, value)`.
    pub fn row_entries(&self, r: usize) -> impl Iterator<Item = (usize, &T)> {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[span.clone()].iter().copied().zip(&self.values[span])
    }

    /// All nonzeros as `(row, col, value)`, row-major.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        (0..self.rows).flat_map(move |r| self.row_entries(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        self.row_entries(r).find(|&(cc, _)| cc == c).map_or_else(T::zero, |(_, v)| v.clone())
    }

    pub fn to_dense(&self) -> Matrix<T> {
        let mut m = Matrix::zeros(self.rows, self.cols);
        for (r, c, v) in self.triplets() {
            m[(r, c)] = v.clone();
        }
        m
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> SparseMatrix<U> {
        SparseMatrix {
            rows: self.rows,
            cols: self.cols,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            values: self.values.iter().map(f).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "{}x{} sparse matrix times length-{} vector",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|r| {
                let mut acc = T::zero();
                for (c, a) in self.row_entries(r) {
                    acc.mul_add_assign(a, &v[c]);
                }
                acc
            })
            .collect())
    }

    /// Sparse Kronecker product.
    pub fn kron(&self, rhs: &SparseMatrix<T>) -> SparseMatrix<T> {
        let mut t = Vec::with_capacity(self.nnz() * rhs.nnz());
        for (r1, c1, a) in self.triplets() {
            for (r2, c2, b) in rhs.triplets() {
                t.push((r1 * rhs.rows + r2, c1 * rhs.cols + c2, a.clone() * b.clone()));
            }
        }
        Self::from_triplets(self.rows * rhs.rows, self.cols * rhs.cols, t).expect("kron positions are distinct")
    }

    /// Entrywise sum.
    pub fn add(&self, rhs: &SparseMatrix<T>) -> Result<SparseMatrix<T>> {
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return Err(Error::Dimension("sparse sum of different shapes".into()));
        }
        let mut acc: BTreeMap<(usize, usize), T> = BTreeMap::new();
        for (r, c, v) in self.triplets().chain(rhs.triplets()) {
            let e = acc.entry((r, c)).or_insert_with(T::zero);
            *e = e.clone() + v.clone();
        }
        Self::from_triplets(self.rows, self.cols, acc.into_iter().map(|((r, c), v)| (r, c, v)).collect())
    }

    /// `A · (v_1 ⊗ ... ⊗ v_m)` where `A` has `Π len(v_t)` columns, without
    /// materializing the Kronecker product: each stored column index is
    /// decoded into one digit per factor.
    pub fn apply_kron(&self, factors: &[&[T]]) -> Result<Vec<T>> {
        let width = factors.iter().try_fold(1usize, |acc, f| acc.checked_mul(f.len()));
        if width != Some(self.cols) {
            return Err(Error::Dimension(format!(
                "{} columns against a Kronecker operand of width {width:?}",
                self.cols
            )));
        }
        let mut out = vec![T::zero(); self.rows];
        for (r, slot) in out.iter_mut().enumerate() {
            for (c, a) in self.row_entries(r) {
                let mut rest = c;
                let mut term = a.clone();
                // last factor varies fastest
                for f in factors.iter().rev() {
                    let d = rest % f.len();
                    rest /= f.len();
                    term = term * f[d].clone();
                }
                *slot = slot.clone() + term;
            }
        }
        Ok(out)
    }
}

/// `A · x^[k-1]` by sparse row accumulation, the homogeneous polynomial map
/// of the tensor whose unfolding is `A`.
pub fn tensor_apply<T: Scalar>(a: &SparseMatrix<T>, x: &[T], k: usize) -> Result<Vec<T>> {
    if k < 1 {
        return Err(Error::Domain("uniformity must be at least 1".into()));
    }
    let n = x.len();
    if a.rows() != n || checked_pow(n, k - 1) != Some(a.cols()) {
        return Err(Error::Dimension(format!(
            "unfolding is {}x{}, expected {n}x{n}^{}",
            a.rows(),
            a.cols(),
            k - 1
        )));
    }
    let factors = vec![x; k - 1];
    a.apply_kron(&factors)
}

/// Sparse tensor keyed by 1-based multi-index.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseTensor<T> {
    shape: ModeShape,
    entries: BTreeMap<Vec<usize>, T>,
}

impl<T: Scalar> SparseTensor<T> {
    pub fn new(shape: ModeShape) -> Self {
        SparseTensor { shape, entries: BTreeMap::new() }
    }

    pub fn shape(&self) -> &ModeShape {
        &self.shape
    }

    pub fn insert(&mut self, index: Vec<usize>, value: T) -> Result<()> {
        ivec(&index, &self.shape)?;
        if value.is_zero() {
            self.entries.remove(&index);
        } else {
            self.entries.insert(index, value);
        }
        Ok(())
    }

    pub fn get(&self, index: &[usize]) -> T {
        self.entries.get(index).cloned().unwrap_or_else(T::zero)
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &T)> {
        self.entries.iter()
    }

    /// Cubical order-`order` tensor holding `value` at every permutation of
    /// each given index tuple.
    pub fn supersymmetric(n: usize, order: usize, generators: &[(Vec<usize>, T)]) -> Result<Self> {
        let mut t = SparseTensor::new(ModeShape::cubical(n, order)?);
        for (idx, v) in generators {
            if idx.len() != order {
                return Err(Error::Dimension(format!("index {idx:?} for an order-{order} tensor")));
            }
            for p in distinct_permutations(idx) {
                t.insert(p, v.clone())?;
            }
        }
        Ok(t)
    }

    pub fn is_supersymmetric(&self) -> bool {
        let n = self.shape.sizes().first().copied().unwrap_or(0);
        self.shape.sizes().iter().all(|&s| s == n)
            && self
                .entries
                .iter()
                .all(|(idx, v)| distinct_permutations(idx).iter().all(|p| &self.get(p) == v))
    }

    /// Mode-`mode` unfolding (1-based): a `J_mode × Π_{l≠mode} J_l` matrix
    /// whose column for the remaining indices is their `ivec`.
    pub fn unfold(&self, mode: usize) -> Result<SparseMatrix<T>> {
        let order = self.shape.order();
        if mode == 0 || mode > order {
            return Err(Error::Index(format!("mode {mode} of an order-{order} tensor")));
        }
        let rest = self.shape.without(mode);
        let cols = rest
            .volume()
            .ok_or_else(|| Error::Resource("unfolding width overflows".into()))?;
        let mut t = Vec::with_capacity(self.entries.len());
        for (idx, v) in &self.entries {
            let mut other = idx.clone();
            let row = other.remove(mode - 1);
            t.push((row - 1, ivec(&other, &rest)? - 1, v.clone()));
        }
        SparseMatrix::from_triplets(self.shape.sizes()[mode - 1], cols, t)
    }
}

/// All distinct orderings of `idx`, in lexicographic order.
pub fn distinct_permutations(idx: &[usize]) -> Vec<Vec<usize>> {
    let mut cur = idx.to_vec();
    cur.sort_unstable();
    let mut out = vec![cur.clone()];
    // next_permutation over the sorted sequence
    loop {
        let Some(i) = (1..cur.len()).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..cur.len()).rev().find(|&j| cur[j] > cur[i - 1]).expect("successor exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
}

/// One term `I^{⊗left} ⊗ A ⊗ I^{⊗right}` of a Kronecker sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KronTerm {
    pub left: usize,
    pub right: usize,
}

/// `Σ_i I ⊗ ... ⊗ A ⊗ ... ⊗ I` over `width` factor positions, with `A`
/// of shape `n × n^(k-1)` and identities of size `n`.
#[derive(Clone, Debug)]
pub struct KroneckerSum<'a, T> {
    a: &'a SparseMatrix<T>,
    n: usize,
    k: usize,
    terms: Vec<KronTerm>,
}

impl<'a, T: Scalar> KroneckerSum<'a, T> {
    /// The sum with `A` in each of the `width` positions.
    pub fn with_width(a: &'a SparseMatrix<T>, k: usize, width: usize) -> Self {
        let n = a.rows();
        let terms = (0..width).map(|i| KronTerm { left: i, right: width - 1 - i }).collect();
        KroneckerSum { a, n, k, terms }
    }

    pub fn terms(&self) -> &[KronTerm] {
        &self.terms
    }

    fn width(&self) -> usize {
        self.terms.len()
    }

    /// `(rows, cols)` as powers of `n`.
    pub fn shape_exponents(&self) -> (usize, usize) {
        (self.width(), self.width() + self.k - 2)
    }

    /// Applies the sum to a dense vector of length `n^cols_exponent`.
    pub fn apply(&self, v: &[T]) -> Result<Vec<T>> {
        let (re, ce) = self.shape_exponents();
        let n = self.n;
        if checked_pow(n, ce) != Some(v.len()) {
            return Err(Error::Dimension(format!("operand of length {} for width n^{ce}", v.len())));
        }
        let out_len = checked_pow(n, re).expect("output no larger than input");
        let a_cols = self.a.cols();
        let mut out = vec![T::zero(); out_len];
        for term in &self.terms {
            let right = checked_pow(n, term.right).expect("fits");
            let left = checked_pow(n, term.left).expect("fits");
            for alpha in 0..left {
                for r in 0..n {
                    for (c, a) in self.a.row_entries(r) {
                        let in_base = (alpha * a_cols + c) * right;
                        let out_base = (alpha * n + r) * right;
                        for g in 0..right {
                            out[out_base + g].mul_add_assign(a, &v[in_base + g]);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// The sum as one explicit sparse matrix.
    pub fn materialize(&self) -> Result<SparseMatrix<T>> {
        let (re, ce) = self.shape_exponents();
        let rows = checked_pow(self.n, re).ok_or_else(|| Error::Resource("rows overflow".into()))?;
        let cols = checked_pow(self.n, ce).ok_or_else(|| Error::Resource("cols overflow".into()))?;
        let mut acc = SparseMatrix::from_triplets(rows, cols, Vec::new())?;
        for term in &self.terms {
            let left = SparseMatrix::identity(checked_pow(self.n, term.left).expect("fits"));
            let right = SparseMatrix::identity(checked_pow(self.n, term.right).expect("fits"));
            acc = acc.add(&left.kron(self.a).kron(&right))?;
        }
        Ok(acc)
    }
}
