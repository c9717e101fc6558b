//! Semipositivity, minimal semipositivity and left semipositivity over
//! proper polyhedral cones, with certificates for every verdict.

use itertools::Itertools;
use num::{Signed, Zero};
use rand::Rng;

use crate::cone::{is_nonneg_map, maps_interior_to_interior, PolyCone};
use crate::error::{dims, Error, Result};
use crate::lp::{nonneg_solution, strict_feasibility, Feasibility, LinearProgram, LpOutcome, Relation};
use crate::matrix::{dot, int, ratio, RMatrix, Rational};
use crate::random;

/// Largest number of row subsets examined by [`sp_via_row_submatrices`].
pub const MAX_ROW_SUBSETS: usize = 5000;

/// Outcome of the semipositivity test, carrying its proof.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpVerdict {
    /// `x ∈ int K1` with `Ax ∈ int K2`.
    Semipositive { witness: Vec<Rational> },
    /// Nonzero `y ∈ K2*` with `-Aᵀy ∈ K1*`.
    NotSemipositive { certificate: Vec<Rational> },
}

impl SpVerdict {
    pub fn is_semipositive(&self) -> bool {
        matches!(self, SpVerdict::Semipositive { .. })
    }

    /// Re-checks the carried proof exactly.
    pub fn verify(&self, a: &RMatrix, k1: &PolyCone, k2: &PolyCone) -> Result<bool> {
        check_shapes(a, k1, k2)?;
        match self {
            SpVerdict::Semipositive { witness } => {
                Ok(k1.contains_interior(witness)? && k2.contains_interior(&a.mul_vec(witness))?)
            }
            SpVerdict::NotSemipositive { certificate: y } => {
                if y.len() != a.rows() || y.iter().all(Zero::is_zero) {
                    return Ok(false);
                }
                let in_dual_k2 = k2.generators().transpose().mul_vec(y).iter().all(|v| !v.is_negative());
                let back: Vec<Rational> = a.transpose().mul_vec(y).iter().map(|v| -v).collect();
                let in_dual_k1 = k1.generators().transpose().mul_vec(&back).iter().all(|v| !v.is_negative());
                Ok(in_dual_k2 && in_dual_k1)
            }
        }
    }
}

fn check_shapes(a: &RMatrix, k1: &PolyCone, k2: &PolyCone) -> Result<()> {
    if a.cols() != k1.dim() || a.rows() != k2.dim() {
        return Err(dims(format!(
            "matrix is {}x{} but cones live in R^{} and R^{}",
            a.rows(),
            a.cols(),
            k1.dim(),
            k2.dim()
        )));
    }
    k1.require_proper()?;
    k2.require_proper()
}

/// Decides whether `A` is `(K1, K2)`-semipositive.
///
/// Reduces to strict feasibility of `M = F2·A·G1`: a strict solution `λ`
/// gives the witness `G1λ`, and an alternative `y'` gives the
/// certificate `F2ᵀy'`.
pub fn classify_sp(a: &RMatrix, k1: &PolyCone, k2: &PolyCone) -> Result<SpVerdict> {
    check_shapes(a, k1, k2)?;
    let g1 = k1.generators();
    let f2 = k2.facets()?;
    let m = f2 * &(a * g1);
    let verdict = match strict_feasibility(&m) {
        Feasibility::Strict(w) => SpVerdict::Semipositive { witness: primitive(g1.mul_vec(&w.lambda)) },
        Feasibility::Infeasible(c) => {
            SpVerdict::NotSemipositive { certificate: primitive(f2.transpose().mul_vec(&c.y)) }
        }
    };
    if !verdict.verify(a, k1, k2)? {
        return Err(Error::Verification("semipositivity proof did not check".into()));
    }
    Ok(verdict)
}

/// Orthant case of [`classify_sp`].
pub fn classify_sp_orthant(a: &RMatrix) -> Result<SpVerdict> {
    classify_sp(a, &PolyCone::orthant(a.cols()), &PolyCone::orthant(a.rows()))
}

fn primitive(v: Vec<Rational>) -> Vec<Rational> {
    RMatrix::column(v).primitive().col(0)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MspVerdict {
    /// Carries `B` with `BA = I` and `B(K2) ⊆ K1`.
    Minimal { left_inverse: RMatrix },
    Redundant { witness: Vec<Rational> },
    NotSemipositive { certificate: Vec<Rational> },
}

impl MspVerdict {
    pub fn is_minimal(&self) -> bool {
        matches!(self, MspVerdict::Minimal { .. })
    }
}

/// Decides minimal semipositivity by searching for a `(K2, K1)`-nonnegative
/// left inverse. Requires `m ≥ n`.
pub fn classify_msp(a: &RMatrix, k1: &PolyCone, k2: &PolyCone) -> Result<MspVerdict> {
    check_shapes(a, k1, k2)?;
    if a.rows() < a.cols() {
        return Err(Error::InvalidInput(format!(
            "minimal semipositivity needs at least as many rows as columns, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let witness = match classify_sp(a, k1, k2)? {
        SpVerdict::Semipositive { witness } => witness,
        SpVerdict::NotSemipositive { certificate } => return Ok(MspVerdict::NotSemipositive { certificate }),
    };
    match nonnegative_left_inverse(a, k1, k2)? {
        Some(b) => Ok(MspVerdict::Minimal { left_inverse: b }),
        None => Ok(MspVerdict::Redundant { witness }),
    }
}

/// Finds `B` with `BA = I` and `B(K2) ⊆ K1`, if one exists.
pub fn nonnegative_left_inverse(a: &RMatrix, k1: &PolyCone, k2: &PolyCone) -> Result<Option<RMatrix>> {
    check_shapes(a, k1, k2)?;
    let (m, n) = a.shape();
    let b = if k1.is_orthant() && k2.is_orthant() {
        nonneg_solution(&a.transpose(), &RMatrix::identity(n)).map(|bt| bt.transpose())
    } else {
        // Search B = G1·Z·F2 with Z ≥ 0 first, then the full cone of
        // (K2, K1)-nonnegative matrices.
        let g1 = k1.generators();
        let f2 = k2.facets()?;
        let e = (f2 * a).transpose().kron(g1);
        nonneg_solution(&e, &RMatrix::identity(n).vec())
            .map(|z| g1 * &(&RMatrix::unvec(&z.col(0), g1.cols(), f2.rows()).expect("shape") * f2))
            .or_else(|| left_inverse_lp(a, k1, k2))
    };
    if let Some(b) = &b {
        let ok = b * a == RMatrix::identity(n) && is_nonneg_map(b, k2, k1)?;
        if !ok {
            return Err(Error::Verification("left inverse did not check".into()));
        }
        debug_assert_eq!(b.shape(), (n, m));
    }
    Ok(b)
}

fn left_inverse_lp(a: &RMatrix, k1: &PolyCone, k2: &PolyCone) -> Option<RMatrix> {
    let (m, n) = a.shape();
    let f1 = k1.facets().ok()?;
    let g2 = k2.generators();
    let var = |i: usize, j: usize| i * m + j;
    let mut lp = LinearProgram::new(n * m);
    for v in 0..n * m {
        lp.set_free(v);
    }
    for i in 0..n {
        for k in 0..n {
            let mut row = vec![Rational::zero(); n * m];
            for j in 0..m {
                row[var(i, j)] = a[(j, k)].clone();
            }
            lp.constrain(row, Relation::Eq, if i == k { int(1) } else { int(0) });
        }
    }
    for r in 0..f1.rows() {
        for c in 0..g2.cols() {
            let mut row = vec![Rational::zero(); n * m];
            for i in 0..n {
                for j in 0..m {
                    row[var(i, j)] = &f1[(r, i)] * &g2[(j, c)];
                }
            }
            lp.constrain(row, Relation::Ge, int(0));
        }
    }
    match lp.solve() {
        LpOutcome::Optimal(sol) => Some(RMatrix::new(n, m, sol.x).expect("shape")),
        _ => None,
    }
}

/// Orthant minimal semipositivity by column deletion: `A` is SP and no
/// matrix obtained by deleting one column is SP.
pub fn cross_check_msp_by_deletion(a: &RMatrix) -> Result<bool> {
    let n = a.cols();
    if n > 6 {
        return Err(Error::Capacity(format!("deletion check supports up to 6 columns, got {n}")));
    }
    if !classify_sp_orthant(a)?.is_semipositive() {
        return Ok(false);
    }
    if n == 1 {
        return Ok(true);
    }
    for drop in 0..n {
        let keep: Vec<usize> = (0..n).filter(|&j| j != drop).collect();
        if classify_sp_orthant(&a.select_cols(&keep))?.is_semipositive() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Left semipositivity: some `x ∈ int K2*` has `Aᵀx ∈ int K1*`.
///
/// For polyhedral cones the interior and closed-cone variants coincide,
/// so no strictness flag is exposed.
pub fn classify_left_sp(a: &RMatrix, k1: &PolyCone, k2: &PolyCone) -> Result<SpVerdict> {
    check_shapes(a, k1, k2)?;
    classify_sp(&a.transpose(), &k2.dual()?, &k1.dual()?)
}

pub fn is_left_sp(a: &RMatrix, k1: &PolyCone, k2: &PolyCone) -> Result<bool> {
    Ok(classify_left_sp(a, k1, k2)?.is_semipositive())
}

/// Closed-form orthant semipositivity test for 2×2 matrices: a positive
/// column, or a sign pattern `[[a,-b],[-c,d]]` or `[[-b,a],[d,-c]]` with
/// `a, d > 0`, `b, c ≥ 0` and `ad - bc > 0`.
pub fn sp_2x2_closed_form(a: &RMatrix) -> Result<bool> {
    if a.shape() != (2, 2) {
        return Err(dims(format!("expected a 2x2 matrix, got {}x{}", a.rows(), a.cols())));
    }
    let positive_column = (0..2).any(|j| a[(0, j)].is_positive() && a[(1, j)].is_positive());
    let pattern = |p: &Rational, b: &Rational, c: &Rational, d: &Rational| {
        p.is_positive() && d.is_positive() && !b.is_negative() && !c.is_negative() && p * d - b * c > Rational::zero()
    };
    let direct = pattern(&a[(0, 0)], &-&a[(0, 1)], &-&a[(1, 0)], &a[(1, 1)]);
    let swapped = pattern(&a[(0, 1)], &-&a[(0, 0)], &-&a[(1, 1)], &a[(1, 0)]);
    Ok(positive_column || direct || swapped)
}

/// Orthant semipositivity as "every n×n row submatrix is SP". Each subset
/// of `n` rows has a common positive direction, and by Helly's theorem on
/// the projectivized orthant that forces one common to all rows.
pub fn sp_via_row_submatrices(a: &RMatrix) -> Result<bool> {
    let (m, n) = a.shape();
    if m < n {
        return Err(Error::InvalidInput(format!("need m >= n, got {m}x{n}")));
    }
    let subsets = binomial(m, n);
    if subsets > MAX_ROW_SUBSETS as u128 {
        return Err(Error::Capacity(format!("{subsets} row subsets exceed {MAX_ROW_SUBSETS}")));
    }
    for rows in (0..m).combinations(n) {
        if !classify_sp_orthant(&a.select_rows(&rows))?.is_semipositive() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn binomial(m: usize, n: usize) -> u128 {
    let k = n.min(m - n) as u128;
    (0..k).fold(1u128, |acc, i| acc * (m as u128 - i) / (i + 1))
}

/// Carries an orthant-SP matrix `B` to the `(K1, K2)` matrix `S1·B·S2⁻¹`,
/// with `S1` sending the open orthant into `int K2` and `S2` invertible
/// with `S2(R^n_+) ⊆ K1`.
pub fn conjugate_sp(b: &RMatrix, s1: &RMatrix, s2: &RMatrix, k1: &PolyCone, k2: &PolyCone) -> Result<RMatrix> {
    let (m, n) = b.shape();
    if s1.shape() != (m, m) || s2.shape() != (n, n) || k1.dim() != n || k2.dim() != m {
        return Err(dims("conjugating matrices do not match the cones"));
    }
    if !maps_interior_to_interior(s1, &PolyCone::orthant(m), k2)? {
        return Err(Error::Hypothesis("S1 must map the open orthant into int K2".into()));
    }
    if !s2.is_invertible() || !is_nonneg_map(s2, &PolyCone::orthant(n), k1)? {
        return Err(Error::Hypothesis("S2 must be invertible and map the orthant into K1".into()));
    }
    Ok(&(s1 * b) * &s2.inverse()?)
}

/// Carries a `(K1, K2)`-SP matrix `A` back to the orthant matrix
/// `Q1·A·Q2⁻¹`, with `Q1` sending `int K2` into the open orthant and `Q2`
/// invertible with `Q2(K1) ⊆ R^n_+`.
pub fn conjugate_back(a: &RMatrix, q1: &RMatrix, q2: &RMatrix, k1: &PolyCone, k2: &PolyCone) -> Result<RMatrix> {
    check_shapes(a, k1, k2)?;
    let (m, n) = a.shape();
    if q1.shape() != (m, m) || q2.shape() != (n, n) {
        return Err(dims("conjugating matrices do not match the cones"));
    }
    if !maps_interior_to_interior(q1, k2, &PolyCone::orthant(m))? {
        return Err(Error::Hypothesis("Q1 must map int K2 into the open orthant".into()));
    }
    if !q2.is_invertible() || !is_nonneg_map(q2, k1, &PolyCone::orthant(n))? {
        return Err(Error::Hypothesis("Q2 must be invertible and map K1 into the orthant".into()));
    }
    Ok(&(q1 * a) * &q2.inverse()?)
}

/// Invertible matrix whose columns are rays of `k`, so it maps the
/// orthant into `k` and the open orthant into `int k`.
fn frame(k: &PolyCone) -> Result<RMatrix> {
    if k.is_orthant() {
        return Ok(RMatrix::identity(k.dim()));
    }
    k.extend_to_simplicial(&k.interior_point())
}

fn check_basis(elements: &[RMatrix], m: usize, n: usize) -> Result<()> {
    let stacked = RMatrix::from_columns(&elements.iter().map(RMatrix::vec_entries).collect::<Vec<_>>())?;
    if elements.len() != m * n || stacked.rank() != m * n {
        return Err(Error::Verification("basis elements are not linearly independent".into()));
    }
    Ok(())
}

/// A basis of `M_{m,n}` made of `(K1, K2)`-semipositive matrices.
pub fn sp_basis(m: usize, n: usize, k1: &PolyCone, k2: &PolyCone) -> Result<Vec<RMatrix>> {
    if k1.dim() != n || k2.dim() != m {
        return Err(dims(format!("cones must live in R^{n} and R^{m}")));
    }
    k1.require_proper()?;
    k2.require_proper()?;
    let t = frame(k2)?;
    let s = frame(k1)?;
    let plain = k1.is_orthant() && k2.is_orthant();
    let mut out = Vec::with_capacity(m * n);
    for i in 0..m {
        for j in 0..n {
            let e = &RMatrix::ones(m, n) + &RMatrix::unit(m, n, i, j);
            let b = if plain { e } else { conjugate_sp(&e, &t, &s, k1, k2)? };
            if !classify_sp(&b, k1, k2)?.is_semipositive() {
                return Err(Error::Verification("basis element is not semipositive".into()));
            }
            out.push(b);
        }
    }
    check_basis(&out, m, n)?;
    Ok(out)
}

/// Orthant MSP basis: `I ± E_ij/2` when square; stacked on top of a fixed
/// positive block when `m > n`.
fn orthant_msp_basis(m: usize, n: usize) -> Vec<RMatrix> {
    let half = ratio(1, 2);
    let id = RMatrix::identity(n);
    let mut square = Vec::with_capacity(n * n);
    for i in 0..n {
        square.push(&id + &RMatrix::unit(n, n, i, i).scale(&half));
    }
    for i in 0..n {
        for j in 0..n {
            if i != j {
                square.push(&id - &RMatrix::unit(n, n, i, j).scale(&half));
            }
        }
    }
    if m == n {
        return square;
    }
    let extra = m - n;
    let d0 = RMatrix::from_fn(extra, n, |_, j| if j == 0 { int(1) } else { int(0) });
    let mut out: Vec<RMatrix> = square.iter().map(|c| c.vstack(&d0).expect("same width")).collect();
    for i in 0..extra {
        for j in 0..n {
            out.push(id.vstack(&(&d0 + &RMatrix::unit(extra, n, i, j))).expect("same width"));
        }
    }
    out
}

/// Transport pair for MSP matrices: orthant `B` becomes `L·B·R`.
/// `m > n` needs a simplicial `K2`, whose generator matrix maps the
/// orthant onto it; `m = n` uses the inverse transpose of a frame of `K2*`.
fn msp_transport(m: usize, n: usize, k1: &PolyCone, k2: &PolyCone) -> Result<(RMatrix, RMatrix)> {
    if m < n {
        return Err(Error::InvalidInput(format!("need m >= n, got {m}x{n}")));
    }
    let right = frame(k1)?.inverse()?;
    let left = if m > n {
        if !k2.is_simplicial()? {
            return Err(Error::Hypothesis("K2 must be simplicial when m > n".into()));
        }
        k2.generators().clone()
    } else {
        frame(&k2.dual()?)?.transpose().inverse()?
    };
    Ok((left, right))
}

/// A basis of `M_{m,n}` made of `(K1, K2)`-minimally semipositive matrices.
pub fn msp_basis(m: usize, n: usize, k1: &PolyCone, k2: &PolyCone) -> Result<Vec<RMatrix>> {
    if k1.dim() != n || k2.dim() != m {
        return Err(dims(format!("cones must live in R^{n} and R^{m}")));
    }
    k1.require_proper()?;
    k2.require_proper()?;
    let (left, right) = msp_transport(m, n, k1, k2)?;
    let plain = k1.is_orthant() && k2.is_orthant();
    let mut out = Vec::with_capacity(m * n);
    for c in orthant_msp_basis(m, n) {
        let b = if plain { c } else { &(&left * &c) * &right };
        if !classify_msp(&b, k1, k2)?.is_minimal() {
            return Err(Error::Verification("basis element is not minimally semipositive".into()));
        }
        out.push(b);
    }
    check_basis(&out, m, n)?;
    Ok(out)
}

/// Writes `A = B + C` with both summands `(K1, K2)`-semipositive.
/// Needs `n ≥ 2`.
pub fn decompose_sum_sp(a: &RMatrix, k1: &PolyCone, k2: &PolyCone) -> Result<(RMatrix, RMatrix)> {
    check_shapes(a, k1, k2)?;
    let (m, n) = a.shape();
    if n < 2 {
        return Err(Error::InvalidInput("sum decomposition needs at least two columns".into()));
    }
    let t_frame = frame(k2)?;
    let s_frame = frame(k1)?;
    // Orthant instance A' = T⁻¹·A·S, mapped back by B ↦ T·B·S⁻¹.
    let plain = &(&t_frame.inverse()? * a) * &s_frame;
    let back = |x: &RMatrix| -> Result<RMatrix> { Ok(&(&t_frame * x) * &s_frame.inverse()?) };

    let min_first = (0..m).map(|i| plain[(i, 0)].clone()).min().expect("m > 0");
    let mut t = int(1) + if min_first.is_negative() { -min_first } else { int(0) };
    for _ in 0..32 {
        // C' = 1·(e2 - t·e1)ᵀ is SP with witness t·e1 + 2·e2 + Σ e_k.
        let c_plain = RMatrix::from_fn(m, n, |_, j| match j {
            0 => -&t,
            1 => int(1),
            _ => int(0),
        });
        let b_plain = &plain - &c_plain;
        let (b, c) = (back(&b_plain)?, back(&c_plain)?);
        if classify_sp(&b, k1, k2)?.is_semipositive() && classify_sp(&c, k1, k2)?.is_semipositive() {
            debug_assert_eq!(&(&b + &c), a);
            return Ok((b, c));
        }
        t *= int(2);
    }
    Err(Error::Verification("no semipositive splitting found".into()))
}

/// Writes `A = C1 - C2` with both parts `(K1, K2)`-minimally semipositive.
pub fn decompose_diff_msp(a: &RMatrix, k1: &PolyCone, k2: &PolyCone) -> Result<(RMatrix, RMatrix)> {
    check_shapes(a, k1, k2)?;
    let (m, n) = a.shape();
    let (left, right) = msp_transport(m, n, k1, k2)?;
    let plain = &(&left.inverse()? * a) * &right.inverse()?;
    let back = |x: &RMatrix| &(&left * x) * &right;

    let w = (&RMatrix::identity(n) + &RMatrix::ones(n, n)).inverse()?;
    let scaffold = if m == n { w } else { w.vstack(&RMatrix::ones(m - n, n))? };
    let mut t = int(1);
    for _ in 0..256 {
        let c2_plain = scaffold.scale(&t);
        let c1_plain = &plain + &c2_plain;
        let (c1, c2) = (back(&c1_plain), back(&c2_plain));
        if classify_msp(&c1, k1, k2)?.is_minimal() && classify_msp(&c2, k1, k2)?.is_minimal() {
            debug_assert_eq!(&(&c1 - &c2), a);
            return Ok((c1, c2));
        }
        t *= int(2);
    }
    Err(Error::Verification("no minimally semipositive difference found".into()))
}

/// A random `(K1, K2)`-SP matrix together with its witness.
///
/// Picks interior points `x ∈ int K1` and `y ∈ int K2`, draws random rows
/// and shifts each along `xᵀ` until `Ax = y`.
pub fn sample_sp_with_witness<R: Rng + ?Sized>(
    rng: &mut R,
    m: usize,
    n: usize,
    k1: &PolyCone,
    k2: &PolyCone,
) -> Result<(RMatrix, Vec<Rational>)> {
    if k1.dim() != n || k2.dim() != m {
        return Err(dims(format!("cones must live in R^{n} and R^{m}")));
    }
    k1.require_proper()?;
    k2.require_proper()?;
    let x = k1.generators().mul_vec(&random::positive_vector(rng, k1.num_rays(), 9));
    let y = k2.generators().mul_vec(&random::positive_vector(rng, k2.num_rays(), 9));
    let xx = dot(&x, &x);
    let mut rows = Vec::with_capacity(m);
    for yi in &y {
        let r: Vec<Rational> = (0..n).map(|_| random::rational(rng, 9)).collect();
        let shift = (dot(&r, &x) - yi) / &xx;
        rows.push(r.iter().zip(&x).map(|(ri, xi)| ri - &shift * xi).collect());
    }
    let a = RMatrix::from_rows(&rows)?;
    let ok = k1.contains_interior(&x)? && k2.contains_interior(&a.mul_vec(&x))?;
    if !ok {
        return Err(Error::Verification("sampled matrix lost its witness".into()));
    }
    Ok((a, x))
}

/// Seeded random `(K1, K2)`-SP matrix.
pub fn sample_sp(m: usize, n: usize, k1: &PolyCone, k2: &PolyCone, seed: u64) -> Result<RMatrix> {
    let mut rng = random::rng_for(seed, 0);
    Ok(sample_sp_with_witness(&mut rng, m, n, k1, k2)?.0)
}
