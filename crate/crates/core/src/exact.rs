//! Sparse square matrices over exact rationals.
//!
//! Rows are kept sorted by column with explicit zeros dropped, so
//! structural equality is exact matrix equality.

use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::{BigRational, Rational64};
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = Rational64;

pub fn q(numer: i64, denom: i64) -> Q {
    Q::new(numer, denom)
}

pub fn q_to_f64(x: &Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<Q> {
    let bad = || Error::MalformedRational(s.to_string());
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: i64 = n.parse().map_err(|_| bad())?;
    let d: i64 = d.parse().map_err(|_| bad())?;
    if d == 0 {
        return Err(bad());
    }
    Ok(Q::new(n, d))
}

/// A square operator with sparse rational entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactOperator {
    dim: usize,
    rows: Vec<Vec<(usize, Q)>>,
}

impl ExactOperator {
    pub fn zeros(dim: usize) -> Self {
        ExactOperator { dim, rows: vec![Vec::new(); dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal((0..dim).map(|_| Q::from_integer(1)).collect())
    }

    pub fn diagonal(values: Vec<Q>) -> Self {
        let dim = values.len();
        let rows = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| if v.is_zero() { Vec::new() } else { vec![(i, v)] })
            .collect();
        ExactOperator { dim, rows }
    }

    /// Permutation matrix with `P e_i = e_{perm[i]}`.
    pub fn permutation(perm: &[usize]) -> Self {
        Self::from_triplets(perm.len(), perm.iter().enumerate().map(|(i, &p)| (p, i, Q::from_integer(1))))
    }

    /// Builds from `(row, col, value)`, summing duplicates.
    pub fn from_triplets(dim: usize, triplets: impl IntoIterator<Item = (usize, usize, Q)>) -> Self {
        let mut rows: Vec<Vec<(usize, Q)>> = vec![Vec::new(); dim];
        for (r, c, v) in triplets {
            assert!(r < dim && c < dim, "entry ({r}, {c}) outside dimension {dim}");
            rows[r].push((c, v));
        }
        for row in rows.iter_mut() {
            row.sort_by_key(|e| e.0);
            let mut merged: Vec<(usize, Q)> = Vec::with_capacity(row.len());
            for (c, v) in row.drain(..) {
                match merged.last_mut() {
                    Some(last) if last.0 == c => last.1 += v,
                    _ => merged.push((c, v)),
                }
            }
            merged.retain(|e| !e.1.is_zero());
            *row = merged;
        }
        ExactOperator { dim, rows }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn row(&self, r: usize) -> &[(usize, Q)] {
        &self.rows[r]
    }

    pub fn get(&self, r: usize, c: usize) -> Q {
        self.rows[r]
            .binary_search_by_key(&c, |e| e.0)
            .map(|i| self.rows[r][i].1)
            .unwrap_or_else(|_| Q::zero())
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Q)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |&(c, v)| (r, c, v)))
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(Vec::is_empty)
    }

    /// Largest absolute entry; zero for the zero operator.
    pub fn max_abs(&self) -> Q {
        self.triplets().map(|(_, _, v)| v.abs()).max().unwrap_or_else(Q::zero)
    }

    pub fn trace(&self) -> Q {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.dim, self.triplets().map(|(r, c, v)| (c, r, v)))
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.transpose()
    }

    pub fn scale(&self, s: Q) -> Self {
        if s.is_zero() {
            return Self::zeros(self.dim);
        }
        let rows = self
            .rows
            .iter()
            .map(|row| row.iter().map(|&(c, v)| (c, v * s)).collect())
            .collect();
        ExactOperator { dim: self.dim, rows }
    }

    /// `self - s * Id`.
    pub fn shift(&self, s: Q) -> Self {
        self - &Self::identity(self.dim).scale(s)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// Finds `s` with `self == s * other` if one exists (both nonzero).
    pub fn proportionality(&self, other: &Self) -> Option<Q> {
        let (r, c, v) = other.triplets().next()?;
        let s = self.get(r, c) / v;
        (*self == other.scale(s)).then_some(s)
    }

    pub fn apply(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(v.len(), self.dim);
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(c, a)| a * v[c]).sum())
            .collect()
    }

    pub fn apply_complex(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        self.rows
            .iter()
            .map(|row| row.iter().map(|(c, a)| v[*c] * q_to_f64(a)).sum())
            .collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.triplets() {
            m[(r, c)] = q_to_f64(&v);
        }
        m
    }

    /// Principal submatrix on the given indices, in that order.
    pub fn restrict(&self, indices: &[usize]) -> Self {
        let mut position = vec![usize::MAX; self.dim];
        for (new, &old) in indices.iter().enumerate() {
            position[old] = new;
        }
        let triplets = indices.iter().enumerate().flat_map(|(new_r, &old_r)| {
            let position = &position;
            self.rows[old_r]
                .iter()
                .filter(move |(c, _)| position[*c] != usize::MAX)
                .map(move |&(c, v)| (new_r, position[c], v))
        });
        Self::from_triplets(indices.len(), triplets.collect::<Vec<_>>())
    }

    /// Coordinate-list text: one `row col num/den` line per nonzero,
    /// sorted by `(row, col)`.
    pub fn to_coo_text(&self) -> String {
        let mut out = String::new();
        for (r, c, v) in self.triplets() {
            writeln!(out, "{} {} {}/{}", r, c, v.numer(), v.denom()).unwrap();
        }
        out
    }

    pub fn from_coo_text(dim: usize, text: &str) -> Result<Self> {
        let mut triplets = Vec::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(Error::MalformedRational(line.to_string()));
            }
            let r: usize = parts[0].parse().map_err(|_| Error::MalformedRational(line.to_string()))?;
            let c: usize = parts[1].parse().map_err(|_| Error::MalformedRational(line.to_string()))?;
            if r >= dim || c >= dim {
                return Err(Error::DimensionMismatch(r.max(c), dim));
            }
            triplets.push((r, c, parse_rational(parts[2])?));
        }
        Ok(Self::from_triplets(dim, triplets))
    }

    fn combine(&self, other: &Self, sign: i64) -> Self {
        assert_eq!(self.dim, other.dim, "operator dimension mismatch");
        let s = Q::from_integer(sign);
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| {
                let mut out = Vec::with_capacity(a.len() + b.len());
                let (mut i, mut j) = (0, 0);
                while i < a.len() || j < b.len() {
                    let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
                    let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
                    if take_a {
                        out.push(a[i]);
                        i += 1;
                    } else if take_b {
                        out.push((b[j].0, b[j].1 * s));
                        j += 1;
                    } else {
                        let v = a[i].1 + b[j].1 * s;
                        if !v.is_zero() {
                            out.push((a[i].0, v));
                        }
                        i += 1;
                        j += 1;
                    }
                }
                out
            })
            .collect();
        ExactOperator { dim: self.dim, rows }
    }

    fn product(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "operator dimension mismatch");
        let mut acc = vec![Q::zero(); self.dim];
        let mut touched = Vec::new();
        let mut mark = vec![false; self.dim];
        let rows = self
            .rows
            .iter()
            .map(|row| {
                for &(k, a) in row {
                    for &(c, b) in &other.rows[k] {
                        if !mark[c] {
                            mark[c] = true;
                            touched.push(c);
                        }
                        acc[c] += a * b;
                    }
                }
                touched.sort_unstable();
                let out: Vec<(usize, Q)> = touched
                    .iter()
                    .filter_map(|&c| {
                        let v = std::mem::replace(&mut acc[c], Q::zero());
                        mark[c] = false;
                        (!v.is_zero()).then_some((c, v))
                    })
                    .collect();
                touched.clear();
                out
            })
            .collect();
        ExactOperator { dim: self.dim, rows }
    }
}

impl Add for &ExactOperator {
    type Output = ExactOperator;
    fn add(self, rhs: Self) -> ExactOperator {
        self.combine(rhs, 1)
    }
}

impl Sub for &ExactOperator {
    type Output = ExactOperator;
    fn sub(self, rhs: Self) -> ExactOperator {
        self.combine(rhs, -1)
    }
}

impl Mul for &ExactOperator {
    type Output = ExactOperator;
    fn mul(self, rhs: Self) -> ExactOperator {
        self.product(rhs)
    }
}

impl Neg for &ExactOperator {
    type Output = ExactOperator;
    fn neg(self) -> ExactOperator {
        self.scale(Q::from_integer(-1))
    }
}

/// Rank of a set of rational vectors by exact Gaussian elimination.
pub fn exact_rank(vectors: &[Vec<Q>]) -> usize {
    let mut rows: Vec<Vec<BigRational>> = vectors
        .iter()
        .map(|v| {
            v.iter()
                .map(|x| BigRational::new(BigInt::from(*x.numer()), BigInt::from(*x.denom())))
                .collect()
        })
        .collect();
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pivot_row = rows[rank].clone();
        for row in rows.iter_mut().skip(rank + 1) {
            if row[col].is_zero() {
                continue;
            }
            let factor = &row[col] / &pivot_row[col];
            for (x, p) in row.iter_mut().zip(&pivot_row).skip(col) {
                if !p.is_zero() {
                    *x -= &factor * p;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

pub fn q_abs_f64(x: &Q) -> f64 {
    x.abs().to_f64().unwrap_or(f64::NAN)
}
