//! Seeded generators for rational test instances.

use num::BigInt;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::matrix::{RMatrix, Rational};

/// Deterministic generator for one `(seed, stream)` pair.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `p/q` with `|p| <= bound`, `1 <= q <= bound`.
pub fn rational<R: Rng + ?Sized>(rng: &mut R, bound: i64) -> Rational {
    let p = rng.random_range(-bound..=bound);
    let q = rng.random_range(1..=bound);
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// `p/q` with `1 <= p, q <= bound`.
pub fn positive_rational<R: Rng + ?Sized>(rng: &mut R, bound: i64) -> Rational {
    let p = rng.random_range(1..=bound);
    let q = rng.random_range(1..=bound);
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn integer<R: Rng + ?Sized>(rng: &mut R, lo: i64, hi: i64) -> Rational {
    Rational::from_integer(BigInt::from(rng.random_range(lo..=hi)))
}

pub fn matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, bound: i64) -> RMatrix {
    RMatrix::from_fn(rows, cols, |_, _| rational(rng, bound))
}

pub fn integer_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, lo: i64, hi: i64) -> RMatrix {
    RMatrix::from_fn(rows, cols, |_, _| integer(rng, lo, hi))
}

pub fn positive_vector<R: Rng + ?Sized>(rng: &mut R, len: usize, bound: i64) -> Vec<Rational> {
    (0..len).map(|_| positive_rational(rng, bound)).collect()
}

/// An invertible integer matrix with entries in `[lo, hi]`.
pub fn invertible_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize, lo: i64, hi: i64) -> RMatrix {
    loop {
        let t = integer_matrix(rng, n, n, lo, hi);
        if t.is_invertible() {
            return t;
        }
    }
}

/// A random permutation matrix scaled by positive integers on its support.
pub fn monomial<R: Rng + ?Sized>(rng: &mut R, n: usize) -> RMatrix {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.random_range(0..=i));
    }
    let mut out = RMatrix::zeros(n, n);
    for (i, &j) in perm.iter().enumerate() {
        out[(i, j)] = integer(rng, 1, 4);
    }
    out
}

/// A nonsingular M-matrix `sI - B` with `B ≥ 0` and `s` above every row
/// sum of `B`, so the matrix is strictly diagonally dominant.
pub fn m_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> RMatrix {
    let b = integer_matrix(rng, n, n, 0, 3);
    let max_row = (0..n)
        .map(|i| b.row(i).iter().fold(Rational::from_integer(0.into()), |acc, v| acc + v))
        .max()
        .expect("n > 0");
    let s = max_row + positive_rational(rng, 4);
    RMatrix::from_fn(n, n, |i, j| if i == j { &s - &b[(i, j)] } else { -&b[(i, j)] })
}

/// Nonnegative matrix with a nonzero entry in every row.
pub fn row_positive<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> RMatrix {
    let mut x = integer_matrix(rng, rows, cols, -2, 3);
    for i in 0..rows {
        for j in 0..cols {
            if x[(i, j)] < Rational::from_integer(0.into()) {
                x[(i, j)] = Rational::from_integer(0.into());
            }
        }
        if x.row(i).iter().all(|v| *v == Rational::from_integer(0.into())) {
            let j = rng.random_range(0..cols);
            x[(i, j)] = integer(rng, 1, 3);
        }
    }
    x
}
