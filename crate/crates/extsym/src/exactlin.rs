//! Exact rational linear algebra.
//!
//! Everything algebraic in the crate is computed over `Q` with arbitrary
//! precision rationals. Elimination is done on sparse rows because most of the
//! systems that show up (derivation conditions, Jacobi defects) are large but
//! have only a handful of nonzero coefficients per row.
//!
//! [`to_float`] is the single place where a rational becomes an `f64`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{dim_err, Error, Result};

/// Exact rational number, always kept in lowest terms.
pub type Scalar = BigRational;
/// Dense exact vector.
pub type Vector = Vec<Scalar>;
/// Sparse row: strictly increasing column indices, no stored zeros.
pub type SparseRow = Vec<(usize, Scalar)>;

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Scalar {
    Scalar::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Scalar {
    Scalar::zero()
}

pub fn one() -> Scalar {
    Scalar::one()
}

pub fn zeros(n: usize) -> Vector {
    vec![Scalar::zero(); n]
}

pub fn unit(n: usize, i: usize) -> Vector {
    let mut v = zeros(n);
    v[i] = one();
    v
}

/// Parse `"p"`, `"-p"` or `"p/q"`.
pub fn parse_scalar(s: &str) -> Result<Scalar> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Scalar::new(p, q))
        }
        None => {
            let p: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Scalar::from_integer(p))
        }
    }
}

/// `"p"` for integers, `"p/q"` otherwise.
pub fn fmt_scalar(x: &Scalar) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Nearest double to `x`; fails when `x` is outside the finite range.
pub fn to_float(x: &Scalar, label: &str) -> Result<f64> {
    match x.to_f64() {
        Some(v) if v.is_finite() => Ok(v),
        _ => Err(Error::NumericRange { label: label.to_string() }),
    }
}

pub fn vec_to_float(v: &[Scalar], label: &str) -> Result<Vec<f64>> {
    v.iter().map(|x| to_float(x, label)).collect()
}

pub fn vec_is_zero(v: &[Scalar]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn vec_add(a: &[Scalar], b: &[Scalar]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_sub(a: &[Scalar], b: &[Scalar]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_scale(a: &[Scalar], c: &Scalar) -> Vector {
    a.iter().map(|x| x * c).collect()
}

/// `a += c * b`
pub fn axpy(a: &mut [Scalar], c: &Scalar, b: &[Scalar]) {
    if c.is_zero() {
        return;
    }
    for (x, y) in a.iter_mut().zip(b) {
        if !y.is_zero() {
            *x += c * y;
        }
    }
}

pub fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    let mut s = Scalar::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            s += x * y;
        }
    }
    s
}

pub fn to_sparse(v: &[Scalar]) -> SparseRow {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

pub fn from_sparse(r: &[(usize, Scalar)], n: usize) -> Vector {
    let mut v = zeros(n);
    for (i, x) in r {
        v[*i] = x.clone();
    }
    v
}

/// Dense row-major rational matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Index<(usize, usize)> for Mat {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| fmt_scalar(&self[(i, j)])).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vector>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return dim_err("ragged rows");
        }
        Ok(Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Integer matrix literal; panics on ragged input.
    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Mat::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect())
            .expect("ragged integer literal")
    }

    pub fn from_cols(cols: &[Vector], nrows: usize) -> Self {
        let mut m = Mat::zeros(nrows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn diag(entries: &[Scalar]) -> Self {
        let mut m = Mat::zeros(entries.len(), entries.len());
        for (i, x) in entries.iter().enumerate() {
            m[(i, i)] = x.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> Vector {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vector> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn col_vecs(&self) -> Vec<Vector> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn try_mul(&self, other: &Mat) -> Result<Mat> {
        if self.cols != other.rows {
            return dim_err(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            ));
        }
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Matrix product; panics on shape mismatch (internal use).
    pub fn mul(&self, other: &Mat) -> Mat {
        self.try_mul(other).expect("matrix shapes")
    }

    pub fn try_mul_vec(&self, v: &[Scalar]) -> Result<Vector> {
        if v.len() != self.cols {
            return dim_err(format!("{}x{} times vector of length {}", self.rows, self.cols, v.len()));
        }
        Ok((0..self.rows).map(|i| dot(&self.data[i * self.cols..(i + 1) * self.cols], v)).collect())
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vector {
        self.try_mul_vec(v).expect("matrix-vector shapes")
    }

    fn zip_with(&self, other: &Mat, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "matrix shapes");
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn add(&self, other: &Mat) -> Mat {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: &Scalar) -> Mat {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * c).collect() }
    }

    pub fn neg(&self) -> Mat {
        self.scale(&int(-1))
    }

    /// `self * other - other * self`
    pub fn commutator(&self, other: &Mat) -> Mat {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn anticommutator(&self, other: &Mat) -> Mat {
        self.mul(other).add(&other.mul(self))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Mat::identity(self.rows)
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.transpose()
    }

    pub fn trace(&self) -> Scalar {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].clone()).sum()
    }

    pub fn block_diag(blocks: &[&Mat]) -> Mat {
        let r: usize = blocks.iter().map(|b| b.rows).sum();
        let c: usize = blocks.iter().map(|b| b.cols).sum();
        let mut m = Mat::zeros(r, c);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            m.set_block(r0, c0, b);
            r0 += b.rows;
            c0 += b.cols;
        }
        m
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Mat) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)].clone();
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Mat {
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = self[(r0 + i, c0 + j)].clone();
            }
        }
        m
    }

    /// Bilinear form `u^T M v`.
    pub fn bilinear(&self, u: &[Scalar], v: &[Scalar]) -> Scalar {
        dot(u, &self.mul_vec(v))
    }

    /// Entries as flat row-major vector (used when matrices are unknowns).
    pub fn flatten(&self) -> Vector {
        self.data.clone()
    }

    pub fn from_flat(rows: usize, cols: usize, data: Vector) -> Mat {
        assert_eq!(data.len(), rows * cols);
        Mat { rows, cols, data }
    }

    pub fn to_float(&self, label: &str) -> Result<Vec<Vec<f64>>> {
        (0..self.rows).map(|i| vec_to_float(&self.row(i), label)).collect()
    }

    /// Inverse, `None` when singular.
    pub fn inverse(&self) -> Result<Option<Mat>> {
        if !self.is_square() {
            return dim_err("inverse of a non-square matrix");
        }
        let n = self.rows;
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            match solve(self, &unit(n, j))? {
                Some(x) => cols.push(x),
                None => return Ok(None),
            }
        }
        if rank(self) < n {
            return Ok(None);
        }
        Ok(Some(Mat::from_cols(&cols, n)))
    }
}

fn sub_scaled(row: &SparseRow, c: &Scalar, piv: &SparseRow) -> SparseRow {
    // row - c * piv, merging sorted index lists
    let mut out = Vec::with_capacity(row.len() + piv.len());
    let (mut i, mut j) = (0, 0);
    while i < row.len() || j < piv.len() {
        let take_row = j >= piv.len() || (i < row.len() && row[i].0 < piv[j].0);
        let take_piv = i >= row.len() || (j < piv.len() && piv[j].0 < row[i].0);
        if take_row {
            out.push(row[i].clone());
            i += 1;
        } else if take_piv {
            out.push((piv[j].0, -(c * &piv[j].1)));
            j += 1;
        } else {
            let v = &row[i].1 - c * &piv[j].1;
            if !v.is_zero() {
                out.push((row[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Incremental row echelon form over sparse rows.
#[derive(Clone, Debug)]
pub struct Echelon {
    ncols: usize,
    pivots: BTreeMap<usize, SparseRow>,
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon { ncols, pivots: BTreeMap::new() }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_cols(&self) -> Vec<usize> {
        self.pivots.keys().copied().collect()
    }

    /// Remainder of `row` after eliminating every pivot it hits.
    pub fn reduce(&self, mut row: SparseRow) -> SparseRow {
        let mut k = 0;
        while k < row.len() {
            let col = row[k].0;
            match self.pivots.get(&col) {
                Some(p) => {
                    let c = row[k].1.clone();
                    let (head, tail) = row.split_at(k);
                    let mut rest = sub_scaled(&tail.to_vec(), &c, p);
                    let mut merged = head.to_vec();
                    merged.append(&mut rest);
                    row = merged;
                }
                None => k += 1,
            }
        }
        row
    }

    /// Add a row; returns true when it increased the rank.
    pub fn insert(&mut self, row: SparseRow) -> bool {
        debug_assert!(row.iter().all(|(i, _)| *i < self.ncols));
        let row = self.reduce(row);
        if row.is_empty() {
            return false;
        }
        // only the leading entry needs to be a fresh pivot column
        let lead = row[0].1.clone();
        let inv = lead.recip();
        let row: SparseRow = row.into_iter().map(|(i, x)| (i, x * &inv)).collect();
        self.pivots.insert(row[0].0, row);
        true
    }

    pub fn insert_dense(&mut self, row: &[Scalar]) -> bool {
        self.insert(to_sparse(row))
    }

    pub fn contains(&self, row: &[Scalar]) -> bool {
        self.reduce(to_sparse(row)).is_empty()
    }

    /// Fully reduced rows keyed by pivot column.
    pub fn rref(&self) -> BTreeMap<usize, SparseRow> {
        let mut done: BTreeMap<usize, SparseRow> = BTreeMap::new();
        for (&c, row) in self.pivots.iter().rev() {
            let mut r = row.clone();
            let mut k = 1;
            while k < r.len() {
                let col = r[k].0;
                if let Some(p) = done.get(&col) {
                    let coef = r[k].1.clone();
                    r = sub_scaled(&r, &coef, p);
                } else {
                    k += 1;
                }
            }
            done.insert(c, r);
        }
        done
    }

    /// Basis of `{x : row . x = 0 for every inserted row}`.
    pub fn nullspace(&self) -> Vec<Vector> {
        let rref = self.rref();
        let free: Vec<usize> = (0..self.ncols).filter(|c| !rref.contains_key(c)).collect();
        let mut pos = vec![usize::MAX; self.ncols];
        for (k, f) in free.iter().enumerate() {
            pos[*f] = k;
        }
        let mut basis: Vec<Vector> = free.iter().map(|&f| unit(self.ncols, f)).collect();
        for (&c, row) in &rref {
            for (j, x) in row.iter().skip(1) {
                let k = pos[*j];
                debug_assert!(k != usize::MAX);
                basis[k][c] = -x.clone();
            }
        }
        basis
    }

    /// Basis vectors of the row space (dense, echelon form).
    pub fn basis(&self) -> Vec<Vector> {
        self.pivots.values().map(|r| from_sparse(r, self.ncols)).collect()
    }
}

fn echelon_of(m: &Mat) -> Echelon {
    let mut e = Echelon::new(m.cols());
    for i in 0..m.rows() {
        e.insert_dense(&m.row(i));
    }
    e
}

/// Solve `m x = b`. `Ok(None)` when inconsistent; for an underdetermined
/// consistent system the free variables are set to zero.
pub fn solve(m: &Mat, b: &[Scalar]) -> Result<Option<Vector>> {
    if b.len() != m.rows() {
        return dim_err(format!("system has {} rows, right-hand side {}", m.rows(), b.len()));
    }
    let n = m.cols();
    let mut e = Echelon::new(n + 1);
    for i in 0..m.rows() {
        let mut r = m.row(i);
        r.push(b[i].clone());
        e.insert_dense(&r);
    }
    let rref = e.rref();
    if rref.contains_key(&n) {
        return Ok(None);
    }
    let mut x = zeros(n);
    for (&c, row) in &rref {
        if let Some((_, v)) = row.iter().find(|(j, _)| *j == n) {
            x[c] = v.clone();
        }
    }
    Ok(Some(x))
}

/// Linear relations among sparse vectors of length `ncols`: a basis of
/// `{c : sum_k c_k v_k = 0}`.
pub fn dependencies(vs: &[SparseRow], ncols: usize) -> Vec<Vector> {
    let k = vs.len();
    let mut e = Echelon::new(ncols + k);
    let mut out = Vec::new();
    for (t, v) in vs.iter().enumerate() {
        // tag column ncols + t records which combination produced a row
        let mut row = v.clone();
        row.push((ncols + t, one()));
        let red = e.reduce(row);
        match red.first() {
            Some((c, _)) if *c >= ncols => {
                let mut dep = zeros(k);
                for (c, x) in red {
                    dep[c - ncols] = x;
                }
                out.push(dep);
            }
            _ => {
                e.insert(red);
            }
        }
    }
    out
}

pub fn nullspace(m: &Mat) -> Vec<Vector> {
    echelon_of(m).nullspace()
}

pub fn rank(m: &Mat) -> usize {
    echelon_of(m).rank()
}

/// Rank of the span of a family of vectors of common length.
pub fn span_rank(vs: &[Vector]) -> usize {
    let Some(n) = vs.first().map(Vec::len) else { return 0 };
    let mut e = Echelon::new(n);
    for v in vs {
        e.insert_dense(v);
    }
    e.rank()
}

/// Echelon basis of the span of `vs` in `Q^n`.
pub fn span_basis(vs: &[Vector], n: usize) -> Vec<Vector> {
    let mut e = Echelon::new(n);
    for v in vs {
        e.insert_dense(v);
    }
    e.basis()
}

/// Sub-family of `vs` that is linearly independent and spans the same space.
pub fn independent_subset(vs: &[Vector], n: usize) -> Vec<Vector> {
    let mut e = Echelon::new(n);
    vs.iter().filter(|v| e.insert_dense(v)).cloned().collect()
}

/// Does `span(big)` contain every vector of `small`?
pub fn span_contains(big: &[Vector], small: &[Vector], n: usize) -> bool {
    let mut e = Echelon::new(n);
    for v in big {
        e.insert_dense(v);
    }
    small.iter().all(|v| e.contains(v))
}

pub fn span_eq(a: &[Vector], b: &[Vector], n: usize) -> bool {
    span_contains(a, b, n) && span_contains(b, a, n)
}

/// Intersection of two subspaces given by spanning families.
pub fn intersection(a: &[Vector], b: &[Vector], n: usize) -> Vec<Vector> {
    let a = independent_subset(a, n);
    let b = independent_subset(b, n);
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    // x = sum s_i a_i = sum t_j b_j
    let k = a.len() + b.len();
    let mut m = Mat::zeros(n, k);
    for (j, v) in a.iter().enumerate() {
        for i in 0..n {
            m[(i, j)] = v[i].clone();
        }
    }
    for (j, v) in b.iter().enumerate() {
        for i in 0..n {
            m[(i, a.len() + j)] = -v[i].clone();
        }
    }
    let out: Vec<Vector> = nullspace(&m)
        .into_iter()
        .map(|c| {
            let mut x = zeros(n);
            for (j, v) in a.iter().enumerate() {
                axpy(&mut x, &c[j], v);
            }
            x
        })
        .collect();
    independent_subset(&out, n)
}

/// Independent columns spanning the image of `m`.
pub fn column_space(m: &Mat) -> Vec<Vector> {
    independent_subset(&m.col_vecs(), m.rows())
}

/// Coordinates of `v` in the (independent) family `basis`, if `v` lies in its span.
pub fn coordinates(basis: &[Vector], v: &[Scalar]) -> Option<Vector> {
    let n = v.len();
    let m = Mat::from_cols(basis, n);
    solve(&m, v).ok().flatten()
}

/// Orthogonal complement of `span(vs)` with respect to the bilinear form `g`.
pub fn orthogonal_complement(vs: &[Vector], g: &Mat) -> Vec<Vector> {
    let rows: Vec<Vector> = vs.iter().map(|v| g.transpose().mul_vec(v)).collect();
    if rows.is_empty() {
        return (0..g.rows()).map(|i| unit(g.rows(), i)).collect();
    }
    nullspace(&Mat::from_rows(rows).expect("uniform rows"))
}

/// Gram matrix of `g` restricted to the family `vs`.
pub fn restricted_gram(vs: &[Vector], g: &Mat) -> Mat {
    let k = vs.len();
    let mut m = Mat::zeros(k, k);
    for i in 0..k {
        let gv = g.mul_vec(&vs[i]);
        for j in 0..k {
            m[(j, i)] = dot(&vs[j], &gv);
        }
    }
    m
}

pub fn is_nondegenerate_on(vs: &[Vector], g: &Mat) -> bool {
    let b = independent_subset(vs, g.rows());
    rank(&restricted_gram(&b, g)) == b.len()
}


/// Inertia `(negative, zero, positive)` of a symmetric matrix, by exact
/// congruence diagonalization.
pub fn inertia(m: &Mat) -> (usize, usize, usize) {
    assert!(m.is_square() && m.is_symmetric(), "inertia needs a symmetric matrix");
    let mut a = m.clone();
    let n = a.rows();
    let (mut neg, mut pos) = (0, 0);
    let mut active: Vec<usize> = (0..n).collect();
    while !active.is_empty() {
        let piv = active.iter().copied().find(|&i| !a[(i, i)].is_zero());
        let p = match piv {
            Some(p) => p,
            None => {
                // all diagonal entries zero: look for an off-diagonal entry
                let pair = active.iter().flat_map(|&i| active.iter().map(move |&j| (i, j)))
                    .find(|&(i, j)| i != j && !a[(i, j)].is_zero());
                let Some((i, j)) = pair else { break };
                // e_i <- e_i + e_j makes the (i,i) entry 2 a_ij
                for k in 0..n {
                    let v = a[(j, k)].clone();
                    a[(i, k)] += v;
                }
                for k in 0..n {
                    let v = a[(k, j)].clone();
                    a[(k, i)] += v;
                }
                i
            }
        };
        let d = a[(p, p)].clone();
        if d.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        active.retain(|&i| i != p);
        for &i in &active {
            let f = &a[(i, p)] / &d;
            if f.is_zero() {
                continue;
            }
            for &k in &active {
                let v = &f * &a[(p, k)];
                a[(i, k)] -= v;
            }
        }
        for &i in &active {
            a[(i, p)] = zero();
            a[(p, i)] = zero();
        }
    }
    (neg, n - neg - pos, pos)
}

pub fn abs(x: &Scalar) -> Scalar {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_identity_and_singular_systems() {
        let x = solve(&Mat::identity(2), &[int(3), int(5)]).unwrap().unwrap();
        assert_eq!(x, vec![int(3), int(5)]);
        let s = Mat::from_ints(&[&[1, 1], &[2, 2]]);
        assert_eq!(solve(&s, &[int(1), int(3)]).unwrap(), None);
        let a = Mat::from_ints(&[&[1, 2], &[3, 4]]);
        let x = solve(&a, &[int(5), int(6)]).unwrap().unwrap();
        assert_eq!(x, vec![int(-4), frac(9, 2)]);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = Mat::identity(2);
        assert!(matches!(solve(&a, &[int(1)]), Err(Error::Dimension(_))));
        assert!(a.try_mul(&Mat::zeros(3, 1)).is_err());
    }

    #[test]
    fn dependencies_match_nullspace() {
        let vs = vec![vec![int(1), int(2), int(0)], vec![int(2), int(4), int(0)], vec![int(0), int(1), int(1)], vec![int(1), int(3), int(1)]];
        let sparse: Vec<SparseRow> = vs.iter().map(|v| to_sparse(v)).collect();
        let deps = dependencies(&sparse, 3);
        assert_eq!(deps.len(), 2);
        let m = Mat::from_cols(&vs, 3);
        for d in &deps {
            assert!(vec_is_zero(&m.mul_vec(d)));
        }
        assert_eq!(span_rank(&deps), 2);
    }

    #[test]
    fn nullspaces() {
        assert!(nullspace(&Mat::identity(3)).is_empty());
        assert_eq!(nullspace(&Mat::zeros(2, 2)).len(), 2);
        let n = nullspace(&Mat::from_ints(&[&[1, 2], &[2, 4]]));
        assert_eq!(n.len(), 1);
        // proportional to (2, -1)
        assert_eq!(&n[0][0] * int(-1), &n[0][1] * int(2));
        assert!(!n[0][0].is_zero());
    }

    #[test]
    fn floats_at_the_boundary() {
        assert_eq!(to_float(&frac(1, 3), "x").unwrap(), 0.3333333333333333);
        assert_eq!(to_float(&frac(-7, 4), "x").unwrap(), -1.75);
        let huge = Scalar::from_integer(BigInt::from(10).pow(400));
        assert!(matches!(to_float(&huge, "huge"), Err(Error::NumericRange { .. })));
    }

    #[test]
    fn parse_and_print_rationals() {
        assert_eq!(parse_scalar("6/4").unwrap(), frac(3, 2));
        assert_eq!(parse_scalar("-2").unwrap(), int(-2));
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("x").is_err());
        assert_eq!(fmt_scalar(&frac(-3, 6)), "-1/2");
        assert_eq!(fmt_scalar(&int(4)), "4");
    }

    #[test]
    fn inverse_round_trip() {
        let a = Mat::from_ints(&[&[2, 1, 0], &[0, 1, 3], &[1, 0, 1]]);
        let inv = a.inverse().unwrap().unwrap();
        assert!(a.mul(&inv).is_identity());
        assert!(Mat::from_ints(&[&[1, 2], &[2, 4]]).inverse().unwrap().is_none());
    }

    #[test]
    fn inertia_counts() {
        let h = Mat::from_ints(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 0]]);
        assert_eq!(inertia(&h), (1, 1, 1));
        let g = Mat::from_ints(&[&[2, 1], &[1, 2]]);
        assert_eq!(inertia(&g), (0, 0, 2));
        assert_eq!(inertia(&Mat::diag(&[int(-1), int(-3)])), (2, 0, 0));
    }

    #[test]
    fn subspace_operations() {
        let a = vec![unit(3, 0), unit(3, 1)];
        let b = vec![unit(3, 1), unit(3, 2)];
        let i = intersection(&a, &b, 3);
        assert_eq!(i.len(), 1);
        assert!(span_eq(&i, &[unit(3, 1)], 3));
        assert!(span_contains(&a, &[vec_add(&unit(3, 0), &unit(3, 1))], 3));
        let g = Mat::diag(&[int(1), int(-1), int(1)]);
        let c = orthogonal_complement(&a, &g);
        assert!(span_eq(&c, &[unit(3, 2)], 3));
    }
    mod props {
        use super::*;
        use proptest::prelude::*;

        fn ints(rows: usize, cols: usize) -> impl Strategy<Value = Mat> {
            prop::collection::vec(-3i64..=3, rows * cols).prop_map(move |v| {
                Mat::from_rows(v.chunks(cols).map(|r| r.iter().map(|&x| int(x)).collect()).collect()).unwrap()
            })
        }

        /// Products of two random factors, so rank deficiency is common.
        fn low_rank() -> impl Strategy<Value = Mat> {
            (1usize..=5, 1usize..=4, 1usize..=5).prop_flat_map(|(r, k, c)| (ints(r, k), ints(k, c))).prop_map(|(p, q)| p.mul(&q))
        }

        proptest! {
            #[test]
            fn solve_is_exact(a in low_rank(), seed in prop::collection::vec(-4i64..=4, 5)) {
                let y: Vector = (0..a.cols()).map(|i| frac(seed[i], 1 + i as i64)).collect();
                let b = a.mul_vec(&y);
                let x = solve(&a, &b).unwrap().expect("consistent by construction");
                prop_assert_eq!(a.mul_vec(&x), b);
            }

            #[test]
            fn nullspace_is_an_independent_kernel_basis(a in low_rank()) {
                let ns = nullspace(&a);
                for v in &ns {
                    prop_assert!(vec_is_zero(&a.mul_vec(v)));
                }
                prop_assert_eq!(span_rank(&ns), ns.len());
                prop_assert_eq!(rank(&a) + ns.len(), a.cols());
            }
        }
    }
}
