//! Exact linear algebra over the rationals.
//!
//! Dense matrices ([`RatMatrix`], [`IntMatrix`]) for small systems and a sparse,
//! fully reduced row echelon accumulator ([`Echelon`]) for the large, very sparse
//! systems that show up when working with path spaces and tensor products.
//! Nothing in here ever touches floating point.

use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qfrac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `p`, `-p` or `p/q`.
pub fn parse_rational(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Other(format!("bad rational literal `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => Ok(Q::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn format_rational(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// A sparse rational vector, entries sorted by index, no stored zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SparseVec {
    entries: Vec<(usize, Q)>,
}

impl SparseVec {
    pub fn zero() -> Self {
        Self { entries: Vec::new() }
    }

    pub fn unit(i: usize) -> Self {
        Self { entries: vec![(i, Q::one())] }
    }

    pub fn single(i: usize, c: Q) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Self { entries: vec![(i, c)] }
        }
    }

    /// Builds from arbitrary (index, coefficient) pairs, merging duplicates.
    pub fn from_pairs<I: IntoIterator<Item = (usize, Q)>>(pairs: I) -> Self {
        let mut map: BTreeMap<usize, Q> = BTreeMap::new();
        for (i, c) in pairs {
            *map.entry(i).or_insert_with(Q::zero) += c;
        }
        Self { entries: map.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }

    pub fn from_dense(v: &[Q]) -> Self {
        Self {
            entries: v
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (i, c.clone()))
                .collect(),
        }
    }

    pub fn to_dense(&self, n: usize) -> Vec<Q> {
        let mut out = vec![Q::zero(); n];
        for (i, c) in &self.entries {
            out[*i] = c.clone();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Q)> + '_ {
        self.entries.iter().map(|(i, c)| (*i, c))
    }

    pub fn get(&self, i: usize) -> Q {
        match self.entries.binary_search_by_key(&i, |(j, _)| *j) {
            Ok(pos) => self.entries[pos].1.clone(),
            Err(_) => Q::zero(),
        }
    }

    pub fn leading(&self) -> Option<(usize, &Q)> {
        self.entries.first().map(|(i, c)| (*i, c))
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|(i, _)| *i)
    }

    pub fn scaled(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { entries: self.entries.iter().map(|(i, x)| (*i, x * c)).collect() }
    }

    pub fn neg(&self) -> Self {
        Self { entries: self.entries.iter().map(|(i, x)| (*i, -x)).collect() }
    }

    /// `self += c * other`
    pub fn add_scaled(&mut self, other: &SparseVec, c: &Q) {
        if c.is_zero() || other.is_zero() {
            return;
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let mut a = std::mem::take(&mut self.entries).into_iter().peekable();
        let mut b = other.entries.iter().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (Some((i, _)), Some((j, _))) => {
                    if i < j {
                        out.push(a.next().unwrap());
                    } else if j < i {
                        let (j, y) = b.next().unwrap();
                        out.push((*j, y * c));
                    } else {
                        let (i, x) = a.next().unwrap();
                        let (_, y) = b.next().unwrap();
                        let s = x + y * c;
                        if !s.is_zero() {
                            out.push((i, s));
                        }
                    }
                }
                (Some(_), None) => out.push(a.next().unwrap()),
                (None, Some(_)) => {
                    let (j, y) = b.next().unwrap();
                    out.push((*j, y * c));
                }
                (None, None) => break,
            }
        }
        self.entries = out;
    }

    pub fn add(&self, other: &SparseVec) -> Self {
        let mut s = self.clone();
        s.add_scaled(other, &Q::one());
        s
    }

    pub fn sub(&self, other: &SparseVec) -> Self {
        let mut s = self.clone();
        s.add_scaled(other, &-Q::one());
        s
    }

    /// Reindexes every entry through `f`; entries mapped to `None` are dropped.
    pub fn remap(&self, f: impl Fn(usize) -> Option<usize>) -> Self {
        Self::from_pairs(self.entries.iter().filter_map(|(i, c)| f(*i).map(|j| (j, c.clone()))))
    }

    pub fn dot(&self, dense: &[Q]) -> Q {
        self.entries.iter().fold(Q::zero(), |acc, (i, c)| acc + c * &dense[*i])
    }
}

/// Incrementally built, fully reduced row echelon basis of a subspace.
///
/// Pivots are the smallest column index of each inserted remainder, so callers
/// control which coordinates end up as pivots by choosing the column order.
/// Every stored row has a one in its pivot column and zeros in every other
/// pivot column.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: Vec<SparseVec>,
    pivot_row: BTreeMap<usize, usize>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_vectors<'a, I: IntoIterator<Item = &'a SparseVec>>(vs: I) -> Self {
        let mut e = Self::new();
        for v in vs {
            e.insert(v.clone());
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.pivot_row.keys().copied().collect()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.pivot_row.contains_key(&col)
    }

    /// Rows in pivot order.
    pub fn rows(&self) -> Vec<&SparseVec> {
        self.pivot_row.values().map(|&r| &self.rows[r]).collect()
    }

    pub fn row_for_pivot(&self, col: usize) -> Option<&SparseVec> {
        self.pivot_row.get(&col).map(|&r| &self.rows[r])
    }

    /// Normal form of `v` modulo the span: zero in every pivot column.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut r = v.clone();
        let hits: Vec<(usize, Q)> = v
            .iter()
            .filter(|(i, _)| self.pivot_row.contains_key(i))
            .map(|(i, c)| (i, c.clone()))
            .collect();
        for (col, c) in hits {
            let row = &self.rows[self.pivot_row[&col]];
            r.add_scaled(row, &-c);
        }
        r
    }

    /// Coordinates of `v` in terms of the pivot rows, if `v` lies in the span.
    pub fn coordinates(&self, v: &SparseVec) -> Option<BTreeMap<usize, Q>> {
        if !self.reduce(v).is_zero() {
            return None;
        }
        Some(
            v.iter()
                .filter(|(i, _)| self.pivot_row.contains_key(i))
                .map(|(i, c)| (i, c.clone()))
                .collect(),
        )
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Inserts `v`; returns `true` if it enlarged the span.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        let mut r = self.reduce(&v);
        let Some((p, lead)) = r.leading() else {
            return false;
        };
        let inv = lead.recip();
        r = r.scaled(&inv);
        for row in self.rows.iter_mut() {
            let c = row.get(p);
            if !c.is_zero() {
                row.add_scaled(&r, &-c);
            }
        }
        self.pivot_row.insert(p, self.rows.len());
        self.rows.push(r);
        true
    }
}

/// Dense rational matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Q::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect())
            .expect("rectangular literal")
    }

    /// Matrix whose columns are the given dense vectors of length `n`.
    pub fn from_columns(n: usize, cols: &[Vec<Q>]) -> Self {
        let mut m = Self::zeros(n, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), n);
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn from_sparse_columns(n: usize, cols: &[SparseVec]) -> Self {
        let mut m = Self::zeros(n, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, x) in c.iter() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Q] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Q> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn sparse_column(&self, j: usize) -> SparseVec {
        SparseVec::from_dense(&self.column(j))
    }

    pub fn columns(&self) -> Vec<Vec<Q>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &RatMatrix) -> Result<RatMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(Q::zero(), |acc, (a, b)| acc + a * b))
            .collect()
    }

    pub fn hstack(&self, other: &RatMatrix) -> Result<RatMatrix> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch("hstack row counts differ".into()));
        }
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                out[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        Ok(out)
    }

    pub fn select_columns(&self, idx: &[usize]) -> RatMatrix {
        let cols: Vec<Vec<Q>> = idx.iter().map(|&j| self.column(j)).collect();
        Self::from_columns(self.rows, &cols)
    }

    pub fn rank(&self) -> usize {
        rref(self).2
    }
}

impl std::ops::Index<(usize, usize)> for RatMatrix {
    type Output = Q;
    fn index(&self, (i, j): (usize, usize)) -> &Q {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Q {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", format_rational(&self[(i, j)]))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Reduced row echelon form: (matrix, pivot columns, rank).
pub fn rref(m: &RatMatrix) -> (RatMatrix, Vec<usize>, usize) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let Some(p) = (r..a.rows).find(|&i| !a[(i, c)].is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..a.cols {
                a.data.swap(p * a.cols + j, r * a.cols + j);
            }
        }
        let inv = a[(r, c)].recip();
        for j in c..a.cols {
            let x = &a[(r, j)] * &inv;
            a[(r, j)] = x;
        }
        for i in 0..a.rows {
            if i == r || a[(i, c)].is_zero() {
                continue;
            }
            let factor = a[(i, c)].clone();
            for j in c..a.cols {
                let sub = &a[(r, j)] * &factor;
                if !sub.is_zero() {
                    a[(i, j)] -= sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots, r)
}

/// Columns spanning the right kernel of `m`.
pub fn kernel_basis(m: &RatMatrix) -> RatMatrix {
    let (red, pivots, _) = rref(m);
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    let mut k = RatMatrix::zeros(m.cols, free.len());
    for (j, &f) in free.iter().enumerate() {
        k[(f, j)] = Q::one();
        for (r, &p) in pivots.iter().enumerate() {
            k[(p, j)] = -red[(r, f)].clone();
        }
    }
    k
}

/// Canonical basis (as columns) of the column span of `m`: the nonzero rows of
/// the RREF of the transpose. Two matrices span the same subspace iff their
/// canonical forms are equal.
pub fn column_span_canonical(m: &RatMatrix) -> RatMatrix {
    let (red, _, rank) = rref(&m.transpose());
    let cols: Vec<Vec<Q>> = (0..rank).map(|i| red.row(i).to_vec()).collect();
    RatMatrix::from_columns(m.rows, &cols)
}

/// Basis (columns) of the intersection of the column spans of `u` and `w`.
pub fn subspace_intersection(u: &RatMatrix, w: &RatMatrix) -> Result<RatMatrix> {
    if u.rows != w.rows {
        return Err(Error::DimensionMismatch(format!(
            "ambient dimensions {} and {}",
            u.rows, w.rows
        )));
    }
    let mut neg_w = w.clone();
    for x in neg_w.data.iter_mut() {
        *x = -x.clone();
    }
    let k = kernel_basis(&u.hstack(&neg_w)?);
    let mut vecs = Vec::new();
    for j in 0..k.cols {
        let x: Vec<Q> = (0..u.cols).map(|i| k[(i, j)].clone()).collect();
        vecs.push(u.mul_vec(&x));
    }
    let span = RatMatrix::from_columns(u.rows, &vecs);
    Ok(column_span_canonical(&span))
}

/// Dense arbitrary-precision integer matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
            .expect("rectangular literal")
    }

    /// `I + lambda * E_ij` (0-based indices).
    pub fn transvection(n: usize, i: usize, j: usize, lambda: &BigInt) -> Self {
        let mut m = Self::identity(n);
        m[(i, j)] += lambda;
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

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn max_abs(&self) -> BigInt {
        self.data.iter().map(|x| x.abs()).max().unwrap_or_default()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn to_rational(&self) -> RatMatrix {
        RatMatrix::from_rows(
            (0..self.rows)
                .map(|i| self.row(i).iter().map(|x| Q::from_integer(x.clone())).collect())
                .collect(),
        )
        .expect("rectangular")
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Result<BigInt> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a[(i, k)].is_zero()) else {
                    return Ok(BigInt::zero());
                };
                for j in 0..n {
                    a.data.swap(p * n + j, k * n + j);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                    a[(i, j)] = v;
                }
            }
            prev = a[(k, k)].clone();
        }
        Ok(sign * a[(n - 1, n - 1)].clone())
    }

    /// Exact inverse of a unimodular matrix.
    pub fn inverse_unimodular(&self) -> Result<IntMatrix> {
        let d = self.det()?;
        if d.abs() != BigInt::one() {
            return Err(Error::NotUnimodular(d.to_string()));
        }
        let n = self.rows;
        let aug = self.to_rational().hstack(&RatMatrix::identity(n))?;
        let (red, _, _) = rref(&aug);
        let mut inv = IntMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let x = &red[(i, n + j)];
                debug_assert!(x.is_integer());
                inv[(i, j)] = x.to_integer();
            }
        }
        Ok(inv)
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Basis of the kernel of the linear map whose column images are `cols`
/// (all of length `target_dim` or less), by sparse elimination.
pub fn sparse_kernel(cols: &[SparseVec], target_dim: usize) -> Vec<SparseVec> {
    let mut ech = Echelon::new();
    for (i, c) in cols.iter().enumerate() {
        let mut v = c.clone();
        v.add_scaled(&SparseVec::unit(target_dim + i), &Q::one());
        ech.insert(v);
    }
    ech.rows()
        .into_iter()
        .filter(|r| r.leading().is_some_and(|(p, _)| p >= target_dim))
        .map(|r| r.remap(|k| k.checked_sub(target_dim)))
        .collect()
}

/// Coordinates with respect to an arbitrary (independent) list of vectors.
#[derive(Clone, Debug, Default)]
pub struct BasisCoords {
    ech: Echelon,
    offset: usize,
    len: usize,
}

impl BasisCoords {
    /// `offset` must exceed every index used by the vectors.
    pub fn new(basis: &[SparseVec], offset: usize) -> Result<Self> {
        let mut ech = Echelon::new();
        let mut plain = Echelon::new();
        for (k, b) in basis.iter().enumerate() {
            if !plain.insert(b.clone()) {
                return Err(Error::Other("basis vectors are linearly dependent".into()));
            }
            let mut v = b.clone();
            v.add_scaled(&SparseVec::unit(offset + k), &Q::one());
            ech.insert(v);
        }
        Ok(Self { ech, offset, len: basis.len() })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Coefficients of `w` in the basis, or `None` if `w` is outside the span.
    pub fn coords(&self, w: &SparseVec) -> Option<SparseVec> {
        let r = self.ech.reduce(w);
        if r.iter().any(|(i, _)| i < self.offset) {
            return None;
        }
        Some(r.remap(|i| i.checked_sub(self.offset)).neg())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_i64_rows(rows)
    }

    #[test]
    fn sparse_kernel_matches_dense() {
        let m = RatMatrix::from_i64_rows(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        let cols: Vec<SparseVec> = (0..3).map(|j| m.sparse_column(j)).collect();
        let k = sparse_kernel(&cols, 3);
        assert_eq!(k.len(), kernel_basis(&m).cols());
        for v in &k {
            assert!(m.mul_vec(&v.to_dense(3)).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn basis_coords_round_trip() {
        let b = vec![SparseVec::from_pairs([(0, q(1)), (1, q(1))]), SparseVec::from_pairs([(1, q(2))])];
        let bc = BasisCoords::new(&b, 10).unwrap();
        let w = SparseVec::from_pairs([(0, q(3)), (1, q(7))]);
        assert_eq!(bc.coords(&w).unwrap(), SparseVec::from_pairs([(0, q(3)), (1, q(2))]));
        assert!(bc.coords(&SparseVec::unit(2)).is_none());
        assert!(BasisCoords::new(&[b[0].clone(), b[0].scaled(&q(2))], 10).is_err());
    }

    #[test]
    fn rref_identity() {
        let (r, p, rank) = rref(&RatMatrix::identity(3));
        assert_eq!(r, RatMatrix::identity(3));
        assert_eq!(p, vec![0, 1, 2]);
        assert_eq!(rank, 3);
    }

    #[test]
    fn rref_zero() {
        let (r, p, rank) = rref(&RatMatrix::zeros(2, 4));
        assert!(r.is_zero());
        assert!(p.is_empty());
        assert_eq!(rank, 0);
    }

    #[test]
    fn rref_rank_one() {
        let (r, p, rank) = rref(&m(&[&[1, 2], &[2, 4]]));
        assert_eq!(rank, 1);
        assert_eq!(p, vec![0]);
        assert_eq!(r, m(&[&[1, 2], &[0, 0]]));
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_basis(&RatMatrix::identity(3)).cols(), 0);
        assert_eq!(kernel_basis(&RatMatrix::zeros(3, 3)).cols(), 3);
        let k = kernel_basis(&m(&[&[1, 1]]));
        assert_eq!(k.cols(), 1);
        assert_eq!(column_span_canonical(&k), column_span_canonical(&m(&[&[1], &[-1]])));
    }

    #[test]
    fn intersections() {
        let u = m(&[&[1, 0], &[0, 1], &[0, 0]]);
        assert_eq!(subspace_intersection(&u, &u).unwrap().cols(), 2);
        let a = m(&[&[1], &[0]]);
        let b = m(&[&[1], &[1]]);
        assert_eq!(subspace_intersection(&a, &b).unwrap().cols(), 0);
        // x + y + z = 0 against z = 0: the line spanned by (1,-1,0)
        let p1 = m(&[&[1, 0], &[-1, 1], &[0, -1]]);
        let p2 = m(&[&[1, 0], &[0, 1], &[0, 0]]);
        let i = subspace_intersection(&p1, &p2).unwrap();
        assert_eq!(i, column_span_canonical(&m(&[&[1], &[-1], &[0]])));
        assert!(subspace_intersection(&a, &p1).is_err());
    }

    #[test]
    fn echelon_reduces_and_reports_coordinates() {
        let mut e = Echelon::new();
        assert!(e.insert(SparseVec::from_dense(&[q(1), q(2), q(0)])));
        assert!(e.insert(SparseVec::from_dense(&[q(0), q(1), q(1)])));
        assert!(!e.insert(SparseVec::from_dense(&[q(1), q(3), q(1)])));
        assert_eq!(e.rank(), 2);
        assert_eq!(e.pivots(), vec![0, 1]);
        let v = SparseVec::from_dense(&[q(2), q(5), q(1)]);
        assert!(e.contains(&v));
        let off = SparseVec::unit(2);
        assert_eq!(e.reduce(&off), off.clone());
    }

    #[test]
    fn parse_and_format_rationals() {
        assert_eq!(parse_rational("-3/6").unwrap(), qfrac(-1, 2));
        assert_eq!(format_rational(&qfrac(4, 2)), "2");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn int_det_and_inverse() {
        let a = IntMatrix::from_i64(&[&[2, 3], &[1, 2]]);
        assert_eq!(a.det().unwrap(), BigInt::from(1));
        let inv = a.inverse_unimodular().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), IntMatrix::identity(2));
        let b = IntMatrix::from_i64(&[&[2, 0], &[0, 1]]);
        assert!(b.inverse_unimodular().is_err());
        let c = IntMatrix::from_i64(&[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]]);
        assert_eq!(c.det().unwrap(), BigInt::from(1));
    }

    fn small_matrix() -> impl Strategy<Value = RatMatrix> {
        (1usize..5, 1usize..6).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-3i64..4, r * c).prop_map(move |v| {
                let rows: Vec<&[i64]> = v.chunks(c).collect();
                RatMatrix::from_i64_rows(&rows)
            })
        })
    }

    proptest! {
        #[test]
        fn kernel_is_annihilated(mat in small_matrix()) {
            let k = kernel_basis(&mat);
            prop_assert!(mat.mul(&k).unwrap().is_zero());
            prop_assert_eq!(k.rank(), k.cols());
            prop_assert_eq!(mat.rank() + k.cols(), mat.cols());
        }

        #[test]
        fn intersection_dimension_formula(a in small_matrix(), b in small_matrix()) {
            prop_assume!(a.rows() == b.rows());
            let i = subspace_intersection(&a, &b).unwrap();
            let sum = a.hstack(&b).unwrap().rank();
            prop_assert_eq!(i.cols(), a.rank() + b.rank() - sum);
            let j = subspace_intersection(&b, &a).unwrap();
            prop_assert_eq!(i, j);
        }
    }
}
