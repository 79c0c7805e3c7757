//! Exact sparse integer matrices and rational linear spans.

use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    /// Row-major; zero entries are never stored.
    data: Vec<BTreeMap<usize, i64>>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, data: vec![BTreeMap::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i].insert(i, 1);
        }
        m
    }

    /// Diagonal 0/1 matrix with ones on `support`.
    pub fn diagonal_projection(n: usize, support: impl IntoIterator<Item = usize>) -> Self {
        let mut m = Self::zeros(n, n);
        for i in support {
            m.data[i].insert(i, 1);
        }
        m
    }

    /// Matrix sending basis vector `col` to basis vector `row` for each pair.
    pub fn partial_permutation(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut m = Self::zeros(n, n);
        for (row, col) in pairs {
            m.set(row, col, 1);
        }
        m
    }

    pub fn from_triples(rows: usize, cols: usize, triples: impl IntoIterator<Item = (usize, usize, i64)>) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (r, c, v) in triples {
            let cur = m.get(r, c);
            m.set(r, c, cur + v);
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

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.data[r].get(&c).copied().unwrap_or(0)
    }

    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        assert!(r < self.rows && c < self.cols, "index ({r}, {c}) out of bounds");
        if v == 0 {
            self.data[r].remove(&c);
        } else {
            self.data[r].insert(c, v);
        }
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(BTreeMap::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(BTreeMap::is_empty)
    }

    /// Nonzero entries in row-major order.
    pub fn triples(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        self.data.iter().enumerate().flat_map(|(r, row)| row.iter().map(move |(&c, &v)| (r, c, v)))
    }

    /// Conjugate transpose; entries are real so this is the transpose.
    pub fn adjoint(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for (r, c, v) in self.triples() {
            t.data[c].insert(r, v);
        }
        t
    }

    pub fn is_diagonal(&self) -> bool {
        self.triples().all(|(r, c, _)| r == c)
    }

    /// Entrywise 0/1 with at most one nonzero per row and per column.
    pub fn is_partial_permutation(&self) -> bool {
        let mut col_used = vec![false; self.cols];
        for row in &self.data {
            if row.len() > 1 {
                return false;
            }
            for (&c, &v) in row {
                if v != 1 || col_used[c] {
                    return false;
                }
                col_used[c] = true;
            }
        }
        true
    }

    /// Trace of a square matrix.
    pub fn trace(&self) -> i64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// Exact rank over the rationals.
    pub fn rank(&self) -> usize {
        let mut span = RationalSpan::new();
        for row in &self.data {
            span.insert(row.iter().map(|(&c, &v)| (c, v)));
        }
        span.dim()
    }

    /// Entries flattened row-major, for span computations over matrices.
    pub fn flat_entries(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        let cols = self.cols;
        self.triples().map(move |(r, c, v)| (r * cols + c, v))
    }

    fn checked_combine(&self, other: &Self, sign: i64) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        let mut out = self.clone();
        for (r, c, v) in other.triples() {
            let cur = out.get(r, c);
            out.set(r, c, cur + sign * v);
        }
        out
    }
}

impl Add for &SparseMatrix {
    type Output = SparseMatrix;

    fn add(self, rhs: &SparseMatrix) -> SparseMatrix {
        self.checked_combine(rhs, 1)
    }
}

impl Sub for &SparseMatrix {
    type Output = SparseMatrix;

    fn sub(self, rhs: &SparseMatrix) -> SparseMatrix {
        self.checked_combine(rhs, -1)
    }
}

impl Mul for &SparseMatrix {
    type Output = SparseMatrix;

    fn mul(self, rhs: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in product");
        let mut out = SparseMatrix::zeros(self.rows, rhs.cols);
        for (r, row) in self.data.iter().enumerate() {
            let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
            for (&k, &a) in row {
                for (&c, &b) in &rhs.data[k] {
                    *acc.entry(c).or_insert(0) += a * b;
                }
            }
            acc.retain(|_, v| *v != 0);
            out.data[r] = acc;
        }
        out
    }
}

/// A subspace of `Q^∞` kept in reduced echelon form keyed by leading index.
#[derive(Debug, Default, Clone)]
pub struct RationalSpan {
    pivots: HashMap<usize, BTreeMap<usize, BigRational>>,
}

impl RationalSpan {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    fn reduce(&self, entries: impl IntoIterator<Item = (usize, i64)>) -> BTreeMap<usize, BigRational> {
        let mut v: BTreeMap<usize, BigRational> = BTreeMap::new();
        for (i, x) in entries {
            let e = v.entry(i).or_insert_with(BigRational::zero);
            *e += BigRational::from_integer(BigInt::from(x));
        }
        v.retain(|_, x| !x.is_zero());
        // eliminate leading terms that already have pivots, leaving the
        // lowest un-pivoted index as the new leading term
        let mut cursor = 0usize;
        loop {
            let Some((&lead, coef)) = v.range(cursor..).find(|(i, _)| self.pivots.contains_key(i)) else {
                return v;
            };
            let coef = coef.clone();
            for (&j, pv) in &self.pivots[&lead] {
                let e = v.entry(j).or_insert_with(BigRational::zero);
                *e -= &coef * pv;
                if e.is_zero() {
                    v.remove(&j);
                }
            }
            cursor = lead + 1;
        }
    }

    /// Adds a vector; returns whether it was independent of the span.
    pub fn insert(&mut self, entries: impl IntoIterator<Item = (usize, i64)>) -> bool {
        let v = self.reduce(entries);
        let Some((&lead, _)) = v.iter().next() else {
            return false;
        };
        // pivot rows only carry indices at or after their leading index
        let inv = BigRational::one() / v[&lead].clone();
        let normalized: BTreeMap<usize, BigRational> = v.into_iter().map(|(i, x)| (i, x * &inv)).collect();
        self.pivots.insert(lead, normalized);
        true
    }

    pub fn contains(&self, entries: impl IntoIterator<Item = (usize, i64)>) -> bool {
        self.reduce(entries).is_empty()
    }
}
