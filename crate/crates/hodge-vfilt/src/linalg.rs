//! Dense matrices over the rationals.
//!
//! Row reduction is the workhorse of the whole crate, so it avoids naive
//! rational elimination: each row is scaled to integers, forward elimination
//! runs the Bareiss fraction-free recurrence (intermediate entries are
//! minors of the integer matrix, so coefficient growth stays polynomial),
//! and only the final back substitution returns to rational arithmetic.
//! All derived bases (kernel, image, solve) are reduced echelon and hence
//! canonical for the subspace they span.
//!
//! Matrices act on column vectors. Shape mismatches are programming errors
//! and panic; fallible operations (inversion, solving) return `Option`.

use crate::rat::Rat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use std::fmt;
use std::ops::{Add, Mul, Sub};

#[derive(Clone, PartialEq, Eq)]
pub struct QMat {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl fmt::Debug for QMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "QMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| crate::rat::format_rat(self.get(i, j)))
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl QMat {
    pub fn zero(rows: usize, cols: usize) -> QMat {
        QMat { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> QMat {
        let mut m = QMat::zero(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    /// Builds from row vectors; all rows must share a length.
    pub fn from_rows(rows: Vec<Vec<Rat>>) -> QMat {
        let ncols = rows.first().map_or(0, Vec::len);
        QMat::from_rows_with_cols(rows, ncols)
    }

    /// Like `from_rows`, but keeps the column count when there are no rows.
    pub fn from_rows_with_cols(rows: Vec<Vec<Rat>>, cols: usize) -> QMat {
        let nrows = rows.len();
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        QMat { rows: nrows, cols, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rat) -> QMat {
        let mut m = QMat::zero(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        assert!(i < self.rows && j < self.cols, "index out of range");
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        assert!(i < self.rows && j < self.cols, "index out of range");
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        assert!(i < self.rows);
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows_vec(&self) -> Vec<Vec<Rat>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Rat::is_zero)
    }

    pub fn transpose(&self) -> QMat {
        QMat::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Applies the matrix to a column vector.
    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(Rat::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn scale(&self, c: &Rat) -> QMat {
        QMat::from_fn(self.rows, self.cols, |i, j| self.get(i, j) * c)
    }

    /// `self` to the `e`-th power; the matrix must be square.
    pub fn pow(&self, e: u32) -> QMat {
        assert_eq!(self.rows, self.cols, "pow of non-square matrix");
        let mut acc = QMat::identity(self.rows);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Kronecker product, used to tensor block actions with multiplicity.
    pub fn kron(&self, other: &QMat) -> QMat {
        QMat::from_fn(
            self.rows * other.rows,
            self.cols * other.cols,
            |i, j| {
                let (a, b) = (i / other.rows, i % other.rows);
                let (c, d) = (j / other.cols, j % other.cols);
                self.get(a, c) * other.get(b, d)
            },
        )
    }

    pub fn rank(&self) -> usize {
        rref(&self.rows_vec(), self.cols).pivots.len()
    }

    /// Canonical reduced-echelon basis of `{x : Ax = 0}`.
    pub fn kernel(&self) -> Vec<Vec<Rat>> {
        let red = rref(&self.rows_vec(), self.cols);
        let mut basis = Vec::new();
        let mut pivot_iter = red.pivots.iter().copied().peekable();
        let mut free_cols = Vec::new();
        for c in 0..self.cols {
            if pivot_iter.peek() == Some(&c) {
                pivot_iter.next();
            } else {
                free_cols.push(c);
            }
        }
        for &f in &free_cols {
            let mut v = vec![Rat::zero(); self.cols];
            v[f] = Rat::one();
            for (i, &c) in red.pivots.iter().enumerate() {
                v[c] = -red.mat[i][f].clone();
            }
            basis.push(v);
        }
        rref(&basis, self.cols).mat
    }

    /// Canonical reduced-echelon basis of the column space.
    pub fn image(&self) -> Vec<Vec<Rat>> {
        rref(&self.transpose().rows_vec(), self.rows).mat
    }

    /// One solution of `Ax = b`, with free coordinates set to zero.
    pub fn solve(&self, b: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(b.len(), self.rows, "rhs length mismatch");
        let mut aug = self.rows_vec();
        for (row, rhs) in aug.iter_mut().zip(b) {
            row.push(rhs.clone());
        }
        let red = rref(&aug, self.cols + 1);
        if red.pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![Rat::zero(); self.cols];
        for (i, &c) in red.pivots.iter().enumerate() {
            x[c] = red.mat[i][self.cols].clone();
        }
        Some(x)
    }

    /// Inverse of a square matrix, if it exists.
    pub fn inverse(&self) -> Option<QMat> {
        assert_eq!(self.rows, self.cols, "inverse of non-square matrix");
        let n = self.rows;
        let mut aug = self.rows_vec();
        for (i, row) in aug.iter_mut().enumerate() {
            for j in 0..n {
                row.push(if i == j { Rat::one() } else { Rat::zero() });
            }
        }
        let red = rref(&aug, 2 * n);
        if red.pivots.len() < n || red.pivots[n - 1] >= n {
            return None;
        }
        Some(QMat::from_fn(n, n, |i, j| red.mat[i][n + j].clone()))
    }
}

impl Add for &QMat {
    type Output = QMat;
    fn add(self, other: &QMat) -> QMat {
        assert!(self.rows == other.rows && self.cols == other.cols, "shape mismatch in add");
        QMat::from_fn(self.rows, self.cols, |i, j| self.get(i, j) + other.get(i, j))
    }
}

impl Sub for &QMat {
    type Output = QMat;
    fn sub(self, other: &QMat) -> QMat {
        assert!(self.rows == other.rows && self.cols == other.cols, "shape mismatch in sub");
        QMat::from_fn(self.rows, self.cols, |i, j| self.get(i, j) - other.get(i, j))
    }
}

impl Mul for &QMat {
    type Output = QMat;
    fn mul(self, other: &QMat) -> QMat {
        assert_eq!(self.cols, other.rows, "shape mismatch in mul");
        let mut m = QMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = m.get(i, j) + a * other.get(k, j);
                    m.set(i, j, v);
                }
            }
        }
        m
    }
}

/// Reduced row echelon form: `mat` holds the nonzero rows, `pivots` their
/// pivot columns in increasing order.
pub struct Rref {
    pub mat: Vec<Vec<Rat>>,
    pub pivots: Vec<usize>,
}

/// Reduced row echelon form of the given rows.
///
/// Forward elimination is fraction-free: rows are cleared to integers and
/// the Bareiss two-by-two determinant step divides exactly by the previous
/// pivot. Row swaps pick the first nonzero candidate, which keeps the
/// computation deterministic. The reduced form itself is unique, so the
/// output does not depend on these choices.
pub fn rref(rows: &[Vec<Rat>], cols: usize) -> Rref {
    assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| {
            let mut lcm = BigInt::one();
            for x in r {
                lcm = lcm.lcm(x.denom());
            }
            r.iter().map(|x| x.numer() * (&lcm / x.denom())).collect()
        })
        .collect();
    let nrows = m.len();
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == nrows {
            break;
        }
        let Some(p) = (row..nrows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        for i in row + 1..nrows {
            let head = std::mem::replace(&mut m[i][col], BigInt::zero());
            for j in col + 1..cols {
                let num = &m[row][col] * &m[i][j] - &head * &m[row][j];
                let (q, r) = num.div_rem(&prev);
                assert!(r.is_zero(), "inexact Bareiss division");
                m[i][j] = q;
            }
        }
        prev = m[row][col].clone();
        pivots.push(col);
        row += 1;
    }
    let rank = pivots.len();
    let mut q: Vec<Vec<Rat>> = m[..rank]
        .iter()
        .map(|r| r.iter().map(|z| Rat::from_integer(z.clone())).collect())
        .collect();
    for i in (0..rank).rev() {
        let c = pivots[i];
        let lead = q[i][c].clone();
        for x in &mut q[i][c..] {
            *x = &*x / &lead;
        }
        for k in 0..i {
            let f = q[k][c].clone();
            if f.is_zero() {
                continue;
            }
            let (upper, lower) = q.split_at_mut(i);
            for (x, y) in upper[k][c..].iter_mut().zip(&lower[0][c..]) {
                *x = &*x - &f * y;
            }
        }
    }
    Rref { mat: q, pivots }
}
