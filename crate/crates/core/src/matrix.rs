//! Dense matrices over exact rationals.
//!
//! Matrices are stored row-major. The `vec` operator stacks columns, so
//! `vec(A)[j * rows + i] == A[(i, j)]` with zero-based indices, and the
//! identity `vec(X A Y) = kron(Yᵀ, X) vec(A)` holds for every conforming
//! `X`, `A`, `Y`. Every module in this crate relies on that convention.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num::integer::Integer;
use num::{BigInt, BigRational, One, Signed, Zero};

use crate::error::{dims, Error, Result};

pub type Rational = BigRational;

/// Shorthand for an integer-valued rational.
pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Shorthand for `num / den`. Panics when `den == 0`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `p` or `p/q` with `q > 0`.
pub fn parse_rational(token: &str) -> std::result::Result<Rational, String> {
    let parse_int = |s: &str| -> std::result::Result<BigInt, String> {
        let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("`{token}` is not a rational literal"));
        }
        s.parse::<BigInt>().map_err(|e| format!("`{token}`: {e}"))
    };
    match token.split_once('/') {
        None => Ok(Rational::from_integer(parse_int(token)?)),
        Some((p, q)) => {
            let num = parse_int(p)?;
            if q.starts_with(['-', '+']) {
                return Err(format!("`{token}`: denominator must be a positive integer"));
            }
            let den = parse_int(q)?;
            if den.is_zero() {
                return Err(format!("`{token}`: zero denominator"));
            }
            Ok(Rational::new(num, den))
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Rational>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(dims("matrices need at least one row and one column"));
        }
        if data.len() != rows * cols {
            return Err(dims(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        Self {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { Rational::one() } else { Rational::zero() })
    }

    /// The all-ones matrix.
    pub fn ones(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| Rational::one())
    }

    /// The matrix unit with a single one at `(i, j)`.
    pub fn unit(rows: usize, cols: usize, i: usize, j: usize) -> Self {
        let mut e = Self::zeros(rows, cols);
        e[(i, j)] = Rational::one();
        e
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from integer rows. Panics on ragged input.
    pub fn from_i64<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        assert!(rows.iter().all(|r| r.as_ref().len() == cols), "ragged rows");
        Self::from_fn(rows.len(), cols, |i, j| int(rows[i].as_ref()[j]))
    }

    /// A column vector.
    pub fn column(entries: Vec<Rational>) -> Self {
        let n = entries.len();
        Self::new(n, 1, entries).expect("column vector must be nonempty")
    }

    pub fn column_i64(entries: &[i64]) -> Self {
        Self::column(entries.iter().map(|&v| int(v)).collect())
    }

    pub fn diagonal(entries: &[Rational]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { entries[i].clone() } else { Rational::zero() })
    }

    pub fn from_columns(columns: &[Vec<Rational>]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map(Vec::len).unwrap_or(0);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(dims("columns of unequal length"));
        }
        if rows == 0 || cols == 0 {
            return Err(dims("matrices need at least one row and one column"));
        }
        Ok(Self::from_fn(rows, cols, |i, j| columns[j][i].clone()))
    }

    pub fn from_rows(rows: &[Vec<Rational>]) -> Result<Self> {
        let cols = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(dims("rows of unequal length"));
        }
        Self::new(rows.len(), cols, rows.iter().flatten().cloned().collect())
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

    pub fn col(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn column_vectors(&self) -> Vec<Vec<Rational>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(dims(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
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

    /// Matrix-vector product with a plain slice.
    pub fn mul_vec(&self, x: &[Rational]) -> Vec<Rational> {
        assert_eq!(x.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|v| !v.is_negative())
    }

    pub fn is_positive(&self) -> bool {
        self.data.iter().all(Signed::is_positive)
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self::from_fn(rows.len(), self.cols, |i, j| self[(rows[i], j)].clone())
    }

    pub fn select_cols(&self, cols: &[usize]) -> Self {
        Self::from_fn(self.rows, cols.len(), |i, j| self[(i, cols[j])].clone())
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone())
    }

    pub fn hstack(&self, rhs: &Self) -> Result<Self> {
        if self.rows != rhs.rows {
            return Err(dims("hstack needs equal row counts"));
        }
        Ok(Self::from_fn(self.rows, self.cols + rhs.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                rhs[(i, j - self.cols)].clone()
            }
        }))
    }

    pub fn vstack(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.cols {
            return Err(dims("vstack needs equal column counts"));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&rhs.data);
        Self::new(self.rows + rhs.rows, self.cols, data)
    }

    /// Each row multiplied by the lcm of its denominators.
    fn integer_rows(&self) -> (Vec<Vec<BigInt>>, Vec<BigInt>) {
        let mut scales = Vec::with_capacity(self.rows);
        let rows = (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let l = row.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
                let ints = row.iter().map(|v| v.numer() * (&l / v.denom())).collect();
                scales.push(l);
                ints
            })
            .collect();
        (rows, scales)
    }

    /// Exact rank by fraction-free (Bareiss) elimination.
    pub fn rank(&self) -> usize {
        let (mut a, _) = self.integer_rows();
        let (rows, cols) = (self.rows, self.cols);
        let mut prev = BigInt::one();
        let mut rank = 0;
        for col in 0..cols {
            if rank == rows {
                break;
            }
            let Some(p) = (rank..rows).find(|&r| !a[r][col].is_zero()) else {
                continue;
            };
            a.swap(rank, p);
            for i in rank + 1..rows {
                for j in col + 1..cols {
                    let v = (&a[i][j] * &a[rank][col] - &a[i][col] * &a[rank][j]) / &prev;
                    a[i][j] = v;
                }
                a[i][col] = BigInt::zero();
            }
            prev = a[rank][col].clone();
            rank += 1;
        }
        rank
    }

    pub fn determinant(&self) -> Result<Rational> {
        if !self.is_square() {
            return Err(dims("determinant of a non-square matrix"));
        }
        let n = self.rows;
        let (mut a, scales) = self.integer_rows();
        let mut prev = BigInt::one();
        let mut negate = false;
        for k in 0..n {
            let Some(p) = (k..n).find(|&r| !a[r][k].is_zero()) else {
                return Ok(Rational::zero());
            };
            if p != k {
                a.swap(k, p);
                negate = !negate;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                    a[i][j] = v;
                }
                a[i][k] = BigInt::zero();
            }
            prev = a[k][k].clone();
        }
        let scale = scales.iter().fold(BigInt::one(), |acc, s| acc * s);
        let det = Rational::new(prev, scale);
        Ok(if negate { -det } else { det })
    }

    /// Exact inverse. Forward elimination is fraction-free on the integer
    /// row-scaled matrix; back substitution is over the rationals.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(dims("inverse of a non-square matrix"));
        }
        let n = self.rows;
        let (a, scales) = self.integer_rows();
        // [D A | D]: solving it yields A⁻¹ directly.
        let mut aug: Vec<Vec<BigInt>> = a
            .into_iter()
            .enumerate()
            .map(|(i, mut row)| {
                row.extend((0..n).map(|j| if i == j { scales[i].clone() } else { BigInt::zero() }));
                row
            })
            .collect();
        let width = 2 * n;
        let mut prev = BigInt::one();
        for k in 0..n {
            let p = (k..n).find(|&r| !aug[r][k].is_zero()).ok_or(Error::Singular)?;
            aug.swap(k, p);
            for i in k + 1..n {
                for j in k + 1..width {
                    let v = (&aug[i][j] * &aug[k][k] - &aug[i][k] * &aug[k][j]) / &prev;
                    aug[i][j] = v;
                }
                aug[i][k] = BigInt::zero();
            }
            prev = aug[k][k].clone();
        }
        let mut x = Self::zeros(n, n);
        for i in (0..n).rev() {
            let pivot = Rational::from_integer(aug[i][i].clone());
            for c in 0..n {
                let mut acc = Rational::from_integer(aug[i][n + c].clone());
                for j in i + 1..n {
                    if !aug[i][j].is_zero() {
                        acc -= Rational::from_integer(aug[i][j].clone()) * &x[(j, c)];
                    }
                }
                x[(i, c)] = acc / &pivot;
            }
        }
        Ok(x)
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// Kronecker product: block `(i, j)` equals `self[(i, j)] * rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (r, s) = rhs.shape();
        Self::from_fn(self.rows * r, self.cols * s, |i, j| {
            let a = &self[(i / r, j / s)];
            if a.is_zero() {
                Rational::zero()
            } else {
                a * &rhs[(i % r, j % s)]
            }
        })
    }

    /// Column-stacking vectorization as an `(rows * cols) x 1` matrix.
    pub fn vec(&self) -> Self {
        Self::column(self.vec_entries())
    }

    pub fn vec_entries(&self) -> Vec<Rational> {
        let mut out = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                out.push(self[(i, j)].clone());
            }
        }
        out
    }

    /// Inverse of [`RMatrix::vec`].
    pub fn unvec(v: &[Rational], rows: usize, cols: usize) -> Result<Self> {
        if v.len() != rows * cols {
            return Err(dims(format!(
                "vector of length {} cannot be reshaped to {rows}x{cols}",
                v.len()
            )));
        }
        if rows == 0 || cols == 0 {
            return Err(dims("matrices need at least one row and one column"));
        }
        Ok(Self::from_fn(rows, cols, |i, j| v[j * rows + i].clone()))
    }

    /// Scales the matrix by a positive factor so its entries are coprime
    /// integers. The zero matrix is returned unchanged.
    pub fn primitive(&self) -> Self {
        let l = self.data.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let g = self
            .data
            .iter()
            .fold(BigInt::zero(), |acc, v| acc.gcd(&(v.numer() * (&l / v.denom()))));
        if g.is_zero() {
            return self.clone();
        }
        self.scale(&Rational::new(l, g))
    }

    /// Parses the whitespace-separated text format: one row per line,
    /// entries `p` or `p/q`, `#` lines are comments.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rows: Vec<Vec<Rational>> = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row = line
                .split_whitespace()
                .map(parse_rational)
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|message| Error::Parse { line: no + 1, message })?;
            if let Some(first) = rows.first() {
                if first.len() != row.len() {
                    return Err(Error::Parse {
                        line: no + 1,
                        message: format!("expected {} entries, found {}", first.len(), row.len()),
                    });
                }
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::Parse { line: 0, message: "no matrix rows".into() });
        }
        Self::from_rows(&rows)
    }

    /// Entries rendered as `p` or `p/q`, row by row.
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(ToString::to_string).collect())
            .collect()
    }
}

impl Index<(usize, usize)> for RMatrix {
    type Output = Rational;

    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &RMatrix {
    type Output = RMatrix;

    fn mul(self, rhs: &RMatrix) -> RMatrix {
        self.checked_mul(rhs).expect("shape mismatch in matrix product")
    }
}

impl Add for &RMatrix {
    type Output = RMatrix;

    fn add(self, rhs: &RMatrix) -> RMatrix {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in matrix sum");
        RMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &RMatrix {
    type Output = RMatrix;

    fn sub(self, rhs: &RMatrix) -> RMatrix {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in matrix difference");
        RMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &RMatrix {
    type Output = RMatrix;

    fn neg(self) -> RMatrix {
        RMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| -v).collect(),
        }
    }
}

impl fmt::Display for RMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for RMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RMatrix{:?}", self.to_strings())
    }
}

/// Dot product of two equal-length slices.
pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    assert_eq!(a.len(), b.len(), "dot product of unequal lengths");
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Divides by the absolute value of the first nonzero entry, so the
/// direction (and sign) of the ray is kept. Returns `None` for zero.
pub fn normalize_ray(v: &[Rational]) -> Option<Vec<Rational>> {
    let lead = v.iter().find(|x| !x.is_zero())?.abs();
    Some(v.iter().map(|x| x / &lead).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> RMatrix {
        RMatrix::from_i64(rows)
    }

    #[test]
    fn rank_examples() {
        assert_eq!(RMatrix::identity(3).rank(), 3);
        assert_eq!(m(&[&[1, 2], &[2, 4]]).rank(), 1);
        // det = 1*4 - 2*3 = -2
        assert_eq!(m(&[&[1, 2], &[3, 4]]).rank(), 2);
        assert_eq!(m(&[&[0, 0], &[0, 0]]).rank(), 0);
        assert_eq!(m(&[&[0, 1, 2], &[0, 2, 4], &[1, 0, 0]]).rank(), 2);
    }

    #[test]
    fn rank_with_fractions() {
        let a = RMatrix::parse("1/2 1/3\n3 2").unwrap();
        assert_eq!(a.rank(), 1);
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(RMatrix::identity(3).inverse().unwrap(), RMatrix::identity(3));
        assert_eq!(
            m(&[&[1, -1], &[0, 1]]).inverse().unwrap(),
            m(&[&[1, 1], &[0, 1]])
        );
        assert_eq!(m(&[&[1, 2], &[2, 4]]).inverse(), Err(Error::Singular));
        let a = RMatrix::parse("0 2 1/3\n1 0 -1\n4 1/2 0").unwrap();
        let inv = a.inverse().unwrap();
        assert_eq!(&a * &inv, RMatrix::identity(3));
        assert_eq!(&inv * &a, RMatrix::identity(3));
    }

    #[test]
    fn determinant_matches_hand_expansion() {
        assert_eq!(m(&[&[1, 2], &[3, 4]]).determinant().unwrap(), int(-2));
        assert_eq!(m(&[&[0, 1], &[1, 0]]).determinant().unwrap(), int(-1));
        let a = RMatrix::parse("1/2 0\n0 1/3").unwrap();
        assert_eq!(a.determinant().unwrap(), ratio(1, 6));
    }

    #[test]
    fn kron_examples() {
        assert_eq!(RMatrix::identity(2).kron(&RMatrix::identity(2)), RMatrix::identity(4));
        let b = m(&[&[1, 2], &[3, 4]]);
        assert_eq!(m(&[&[2]]).kron(&b), b.scale(&int(2)));
        let swap = m(&[&[0, 1], &[1, 0]]);
        let expected = m(&[&[0, 1, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, 1], &[0, 0, 1, 0]]);
        assert_eq!(RMatrix::identity(2).kron(&swap), expected);
    }

    #[test]
    fn vec_is_column_stacking() {
        let a = m(&[&[1, 2], &[3, 4]]);
        assert_eq!(a.vec(), RMatrix::column_i64(&[1, 3, 2, 4]));
        let b = m(&[&[1, 2], &[3, 4], &[5, 6]]);
        assert_eq!(RMatrix::unvec(&b.vec_entries(), 3, 2).unwrap(), b);
        assert!(RMatrix::unvec(&b.vec_entries(), 2, 2).is_err());
    }

    #[test]
    fn vec_of_product_is_kron_times_vec() {
        let x = RMatrix::parse("1 -2\n3 1/2").unwrap();
        let a = RMatrix::parse("0 5\n-1 2").unwrap();
        let y = RMatrix::parse("2 1\n-3 4").unwrap();
        let lhs = (&(&x * &a) * &y).vec();
        let rhs = &y.transpose().kron(&x) * &a.vec();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert!(matches!(RMatrix::parse("1 2\n3"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(RMatrix::parse("1/0"), Err(Error::Parse { .. })));
        assert!(matches!(RMatrix::parse("1/-2"), Err(Error::Parse { .. })));
        assert!(matches!(RMatrix::parse("1.5"), Err(Error::Parse { .. })));
        assert!(matches!(RMatrix::parse("# only a comment\n"), Err(Error::Parse { .. })));
        let a = RMatrix::parse("# header\n 1  -2/4\n\n3 +4\n").unwrap();
        assert_eq!(a[(0, 1)], ratio(-1, 2));
        assert_eq!(a[(1, 1)], int(4));
    }

    #[test]
    fn display_round_trips() {
        let a = RMatrix::parse("1 -1/2\n0 7/3").unwrap();
        assert_eq!(RMatrix::parse(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn primitive_scaling() {
        let a = RMatrix::parse("1/2 1/3\n0 -1").unwrap();
        assert_eq!(a.primitive(), m(&[&[3, 2], &[0, -6]]));
    }
}
