//! Test-side oracles and instance generators, written independently of the
//! library routes they check.

#![allow(dead_code)]

use num::{One, Signed, Zero};
use rand::Rng;
use semipos::lp::{LinearProgram, LpOutcome, Relation};
use semipos::matrix::{int, RMatrix, Rational};
use semipos::random;
use semipos::{PolyCone, SpVerdict};

/// Exact check of an orthant semipositivity verdict from its definition.
pub fn orthant_verdict_holds(a: &RMatrix, v: &SpVerdict) -> bool {
    match v {
        SpVerdict::Semipositive { witness } => {
            witness.iter().all(Signed::is_positive) && a.mul_vec(witness).iter().all(Signed::is_positive)
        }
        SpVerdict::NotSemipositive { certificate } => {
            certificate.iter().all(|v| !v.is_negative())
                && certificate.iter().any(|v| !v.is_zero())
                && a.transpose().mul_vec(certificate).iter().all(|v| !v.is_positive())
        }
    }
}

/// Left semipositivity straight from its inequalities: maximize `t` over
/// `G2ᵀx ≥ 0`, `G1ᵀAᵀx ≥ t·1`, `1ᵀG2ᵀx ≤ 1`, `t ≤ 1` with `x` free.
pub fn left_sp_direct(a: &RMatrix, k1: &PolyCone, k2: &PolyCone) -> bool {
    let m = a.rows();
    let g1 = k1.generators();
    let g2 = k2.generators();
    let t = m;
    let mut lp = LinearProgram::new(m + 1);
    for v in 0..=m {
        lp.set_free(v);
    }
    let mut obj = vec![Rational::zero(); m + 1];
    obj[t] = -Rational::one();
    lp.minimize(obj);
    let g2t = g2.transpose();
    for r in 0..g2t.rows() {
        let mut row = g2t.row(r).to_vec();
        row.push(Rational::zero());
        lp.constrain(row, Relation::Ge, Rational::zero());
    }
    let b = &g1.transpose() * &a.transpose();
    for r in 0..b.rows() {
        let mut row = b.row(r).to_vec();
        row.push(-Rational::one());
        lp.constrain(row, Relation::Ge, Rational::zero());
    }
    let mut sum = vec![Rational::zero(); m + 1];
    for r in 0..g2t.rows() {
        for (c, v) in g2t.row(r).iter().enumerate() {
            sum[c] += v;
        }
    }
    lp.constrain(sum, Relation::Le, Rational::one());
    let mut cap = vec![Rational::zero(); m + 1];
    cap[t] = Rational::one();
    lp.constrain(cap, Relation::Le, Rational::one());
    match lp.solve() {
        LpOutcome::Optimal(sol) => sol.x[t].is_positive(),
        other => panic!("direct left-SP program should be bounded and feasible, got {other:?}"),
    }
}

/// Irreducibility by definition: no permutation similarity brings `a` to
/// block upper-triangular form with square diagonal blocks.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        let n = used.len();
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Reducible by definition: some ordering puts a zero block in the lower
/// left corner. A 1×1 matrix counts as reducible when it is zero.
pub fn reducible_by_definition(a: &RMatrix) -> bool {
    let n = a.rows();
    if n == 1 {
        return a[(0, 0)].is_zero();
    }
    // A nonempty proper subset S with no edge from S to its complement.
    (1u32..(1 << n) - 1).any(|mask| {
        (0..n).filter(|i| mask & (1 << i) != 0).all(|i| {
            (0..n).filter(|j| mask & (1 << j) == 0).all(|j| a[(i, j)].is_zero())
        })
    })
}

/// Fully indecomposable by definition: `PA` irreducible for every `P`.
pub fn fully_indecomposable_by_definition(a: &RMatrix, perms: &[Vec<usize>]) -> bool {
    perms.iter().all(|p| !reducible_by_definition(&a.select_rows(p)))
}

/// A random proper cone in `R^dim` with `dim..=dim+2` generators.
pub fn random_proper_cone<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> PolyCone {
    loop {
        let extra = rng.random_range(0..=2);
        let g = random::integer_matrix(rng, dim, dim + extra, -2, 3);
        if let Ok(k) = PolyCone::from_generators(&g) {
            if k.is_proper() {
                return k;
            }
        }
    }
}

/// A random simplicial cone with its invertible generator matrix.
pub fn random_simplicial<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> (PolyCone, RMatrix) {
    let t = random::invertible_matrix(rng, dim, -2, 3);
    let k = PolyCone::simplicial(&t).expect("invertible");
    (k, t)
}

/// Square orthant-MSP matrix: the inverse of an invertible nonnegative one.
pub fn random_square_msp<R: Rng + ?Sized>(rng: &mut R, n: usize) -> RMatrix {
    loop {
        let b = random::row_positive(rng, n, n);
        if let Ok(inv) = b.inverse() {
            return inv;
        }
    }
}

/// Orthant-MSP `m×n` matrix: a square MSP block over a row-positive block,
/// rows shuffled.
pub fn random_msp<R: Rng + ?Sized>(rng: &mut R, m: usize, n: usize) -> RMatrix {
    let c = random_square_msp(rng, n);
    let stacked = if m == n { c } else { c.vstack(&random::row_positive(rng, m - n, n)).unwrap() };
    let mut order: Vec<usize> = (0..m).collect();
    for i in (1..m).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    stacked.select_rows(&order)
}

pub fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| int(x)).collect()
}
