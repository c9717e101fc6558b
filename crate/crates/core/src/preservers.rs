//! Linear maps on `M_{m,n}` and the question of which of them carry
//! semipositive matrices to semipositive matrices.
//!
//! A map is stored as the `mn×mn` matrix acting on column-stacked
//! coordinates, so `XAY` has matrix `kron(Yᵀ, X)`.

use num::{Signed, Zero};
use rand::Rng;
use rayon::prelude::*;

use crate::cone::{is_automorphism, is_k_inverse_nonnegative, is_nonneg_map, maps_interior_to_interior, PolyCone};
use crate::error::{dims, Error, Result};
use crate::matrix::{int, RMatrix, Rational};
use crate::patterns::{is_monomial, is_row_positive};
use crate::random;
use crate::semipos::{classify_sp, sample_sp_with_witness, SpVerdict};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearMap {
    m: usize,
    n: usize,
    mat: RMatrix,
}

impl LinearMap {
    pub fn new(m: usize, n: usize, mat: RMatrix) -> Result<Self> {
        if m == 0 || n == 0 || mat.shape() != (m * n, m * n) {
            return Err(dims(format!("a map on {m}x{n} matrices needs a {0}x{0} matrix", m * n)));
        }
        Ok(LinearMap { m, n, mat })
    }

    pub fn identity(m: usize, n: usize) -> Self {
        LinearMap { m, n, mat: RMatrix::identity(m * n) }
    }

    /// `A ↦ Aᵀ` on `M_n`.
    pub fn transpose_map(n: usize) -> Self {
        let mut mat = RMatrix::zeros(n * n, n * n);
        for i in 0..n {
            for j in 0..n {
                mat[(j * n + i, i * n + j)] = int(1);
            }
        }
        LinearMap { m: n, n, mat }
    }

    /// `A ↦ XAY`.
    pub fn from_xay(x: &RMatrix, y: &RMatrix) -> Result<Self> {
        if !x.is_square() || !y.is_square() {
            return Err(dims("X and Y must be square"));
        }
        Ok(LinearMap { m: x.rows(), n: y.rows(), mat: y.transpose().kron(x) })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &RMatrix {
        &self.mat
    }

    pub fn apply(&self, a: &RMatrix) -> Result<RMatrix> {
        if a.shape() != (self.m, self.n) {
            return Err(dims(format!(
                "map acts on {}x{} matrices, got {}x{}",
                self.m,
                self.n,
                a.rows(),
                a.cols()
            )));
        }
        RMatrix::unvec(&self.mat.mul_vec(&a.vec_entries()), self.m, self.n)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinearMap) -> Result<LinearMap> {
        if (self.m, self.n) != (other.m, other.n) {
            return Err(dims("maps act on different spaces"));
        }
        Ok(LinearMap { m: self.m, n: self.n, mat: &self.mat * &other.mat })
    }

    pub fn is_invertible(&self) -> bool {
        self.mat.is_invertible()
    }

    pub fn inverse(&self) -> Result<LinearMap> {
        Ok(LinearMap { m: self.m, n: self.n, mat: self.mat.inverse()? })
    }

    pub fn negate(&self) -> LinearMap {
        LinearMap { m: self.m, n: self.n, mat: -&self.mat }
    }

    /// Reads `shape m n` followed by the `mn` rows of the map matrix.
    pub fn parse(text: &str) -> Result<Self> {
        let (no, header) = text
            .lines()
            .enumerate()
            .find(|(_, l)| !l.trim().is_empty() && !l.trim().starts_with('#'))
            .ok_or(Error::Parse { line: 0, message: "empty map file".into() })?;
        let bad_header = || Error::Parse { line: no + 1, message: "expected `shape m n` header".into() };
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 || fields[0] != "shape" {
            return Err(bad_header());
        }
        let m: usize = fields[1].parse().map_err(|_| bad_header())?;
        let n: usize = fields[2].parse().map_err(|_| bad_header())?;
        // Blank out the header so matrix parse errors keep file line numbers.
        let body: String = text
            .lines()
            .enumerate()
            .map(|(i, l)| if i == no { "#" } else { l })
            .collect::<Vec<_>>()
            .join("\n");
        let mat = RMatrix::parse(&body)?;
        Self::new(m, n, mat).map_err(|e| Error::Parse { line: no + 1, message: e.to_string() })
    }

    pub fn to_text(&self) -> String {
        format!("shape {} {}\n{}", self.m, self.n, self.mat)
    }
}

/// Factors `X`, `Y` with `L(A) = sign·X·A·Y`. The first nonzero entry of
/// `vec(X)` is 1 and the first nonzero entry of `vec(Y)` is positive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KroneckerFactors {
    pub x: RMatrix,
    pub y: RMatrix,
    pub sign: i8,
}

impl KroneckerFactors {
    /// `sign·Y`, so that `L(A) = X·A·signed_y()`.
    pub fn signed_y(&self) -> RMatrix {
        if self.sign < 0 {
            -&self.y
        } else {
            self.y.clone()
        }
    }

    pub fn to_map(&self) -> LinearMap {
        LinearMap::from_xay(&self.x, &self.signed_y()).expect("square factors")
    }

    fn normalized(x: RMatrix, y: RMatrix) -> Option<Self> {
        let vx = x.vec_entries();
        let cx = vx.iter().find(|v| !v.is_zero())?.clone();
        let x = x.scale(&cx.recip());
        let y = y.scale(&cx);
        let cy = y.vec_entries().into_iter().find(|v| !v.is_zero())?;
        let (y, sign) = if cy.is_negative() { (-&y, -1) } else { (y, 1) };
        Some(KroneckerFactors { x, y, sign })
    }
}

/// The `m²×n²` rearrangement `R[(r + m·s), (t + n·j)] = coefficient of
/// A[s, t] in L(A)[r, j]`. For `L(A) = XAY` it equals `vec(X)·vec(Y)ᵀ`.
pub fn rearrangement(l: &LinearMap) -> RMatrix {
    let (m, n) = (l.m, l.n);
    RMatrix::from_fn(m * m, n * n, |row, col| {
        let (r, s) = (row % m, row / m);
        let (t, j) = (col % n, col / n);
        l.mat[(r + m * j, s + m * t)].clone()
    })
}

/// Factors `L` as `A ↦ sign·X·A·Y` exactly when the rearrangement has
/// rank one.
pub fn kronecker_factor(l: &LinearMap) -> Option<KroneckerFactors> {
    let r = rearrangement(l);
    if r.rank() != 1 {
        return None;
    }
    let p = (0..r.rows()).find(|&i| r.row(i).iter().any(|v| !v.is_zero()))?;
    let q = r.row(p).iter().position(|v| !v.is_zero())?;
    let pivot = r[(p, q)].clone();
    let x_vec: Vec<Rational> = r.col(q).iter().map(|v| v / &pivot).collect();
    let y_vec = r.row(p).to_vec();
    let x = RMatrix::unvec(&x_vec, l.m, l.m).ok()?;
    let y = RMatrix::unvec(&y_vec, l.n, l.n).ok()?;
    let f = KroneckerFactors::normalized(x, y)?;
    debug_assert_eq!(f.to_map().mat, l.mat);
    Some(f)
}

/// Recovers `X`, `Y` from images of matrix units: with an anchor column
/// `c` of `A` and column `d` of `L(A)`, `X[r, s] ∝ L(E_{s,c})[r, d]`, and
/// with a pivot `(r*, s*)`, `Y[t, j] ∝ L(E_{s*,t})[r*, j]`. Anchors are
/// scanned from `(0, 0)` until `X` is nonzero; the result must reproduce
/// the map exactly.
pub fn recover_xy(l: &LinearMap) -> Option<KroneckerFactors> {
    let (m, n) = (l.m, l.n);
    // L(E_{s,t})[r, j] is the entry of the map matrix at (r + m·j, s + m·t).
    let coeff = |r: usize, j: usize, s: usize, t: usize| &l.mat[(r + m * j, s + m * t)];
    for c in 0..n {
        for d in 0..n {
            let x = RMatrix::from_fn(m, m, |r, s| coeff(r, d, s, c).clone());
            let Some(pivot) = (0..m * m).map(|k| (k % m, k / m)).find(|&(r, s)| !x[(r, s)].is_zero()) else {
                continue;
            };
            let (rs, ss) = pivot;
            let scale = x[(rs, ss)].clone();
            let y = RMatrix::from_fn(n, n, |t, j| coeff(rs, j, ss, t) / &scale);
            if y.transpose().kron(&x) != l.mat {
                return None;
            }
            return KroneckerFactors::normalized(x, y);
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorKind {
    /// `A ↦ X·A·Y`.
    Standard,
    /// `A ↦ X·Aᵀ·Y`, square case only.
    Transposed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub kind: FactorKind,
    pub factors: KroneckerFactors,
}

/// Standard form first, then the transpose-composed form when `m = n`.
pub fn factor_map(l: &LinearMap) -> Option<Factorization> {
    if let Some(factors) = kronecker_factor(l) {
        return Some(Factorization { kind: FactorKind::Standard, factors });
    }
    if l.m == l.n {
        let composed = l.compose(&LinearMap::transpose_map(l.n)).ok()?;
        if let Some(factors) = kronecker_factor(&composed) {
            return Some(Factorization { kind: FactorKind::Transposed, factors });
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RankOneOutcome {
    Pass,
    /// `a = x·e_iᵀ` whose image does not have rank one.
    Fail { a: RMatrix, image: RMatrix, image_rank: usize },
}

/// Checks that every `A_i = x·e_iᵀ`, with `x = 1` and `samples` random
/// positive `x`, has a rank-one image, and likewise `samples` random
/// rank-one semipositive `u·vᵀ` (`u > 0`, `v` with a positive entry).
/// Orthant cones only.
pub fn rank_one_image_test(
    l: &LinearMap,
    k1: &PolyCone,
    k2: &PolyCone,
    samples: usize,
    seed: u64,
) -> Result<RankOneOutcome> {
    if !k1.is_orthant() || !k2.is_orthant() || k1.dim() != l.n || k2.dim() != l.m {
        return Err(Error::Hypothesis("rank-one image test is defined for orthant cones".into()));
    }
    let (m, n) = (l.m, l.n);
    let mut rng = random::rng_for(seed, 0);
    let mut points = vec![vec![int(1); m]];
    points.extend((0..samples).map(|_| random::positive_vector(&mut rng, m, 9)));
    let mut family: Vec<RMatrix> = Vec::new();
    for x in &points {
        for i in 0..n {
            family.push(RMatrix::from_fn(m, n, |r, j| if j == i { x[r].clone() } else { int(0) }));
        }
    }
    for _ in 0..samples {
        let u = RMatrix::column(random::positive_vector(&mut rng, m, 9));
        let mut v: Vec<Rational> = (0..n).map(|_| random::rational(&mut rng, 9)).collect();
        let k = rng.random_range(0..n);
        v[k] = random::positive_rational(&mut rng, 9);
        family.push(&u * &RMatrix::column(v).transpose());
    }
    for a in family {
        let image = l.apply(&a)?;
        let image_rank = image.rank();
        if image_rank != 1 {
            return Ok(RankOneOutcome::Fail { a, image, image_rank });
        }
    }
    Ok(RankOneOutcome::Pass)
}

fn check_factor_shapes(x: &RMatrix, y: &RMatrix, k1: &PolyCone, k2: &PolyCone) -> Result<()> {
    if x.shape() != (k2.dim(), k2.dim()) || y.shape() != (k1.dim(), k1.dim()) {
        return Err(dims("X must act on the space of K2 and Y on the space of K1"));
    }
    k1.require_proper()?;
    k2.require_proper()
}

fn either_sign(x: &RMatrix, y: &RMatrix, test: impl Fn(&RMatrix, &RMatrix) -> Result<bool>) -> Result<bool> {
    Ok(test(x, y)? || test(&-x, &-y)?)
}

fn self_test(holds: bool, expected: impl FnOnce() -> Result<bool>, what: &str) -> Result<bool> {
    if holds != expected()? {
        return Err(Error::Verification(format!("{what} disagrees with its orthant form")));
    }
    Ok(holds)
}

fn inverse_nonnegative(y: &RMatrix) -> bool {
    y.inverse().is_ok_and(|inv| inv.is_nonnegative())
}

/// Whether `A ↦ XAY` maps `(K1, K2)`-SP matrices into themselves:
/// `X` sends `int K2` into itself and `Y` is `K1`-inverse nonnegative, or
/// the same for `-X`, `-Y`.
pub fn check_into_xay(x: &RMatrix, y: &RMatrix, k1: &PolyCone, k2: &PolyCone) -> Result<bool> {
    check_factor_shapes(x, y, k1, k2)?;
    let holds = either_sign(x, y, |x, y| {
        Ok(maps_interior_to_interior(x, k2, k2)? && is_k_inverse_nonnegative(y, k1)?)
    })?;
    if k1.is_orthant() && k2.is_orthant() {
        let orthant_form = |x: &RMatrix, y: &RMatrix| is_row_positive(x) && inverse_nonnegative(y);
        return self_test(holds, || Ok(orthant_form(x, y) || orthant_form(&-x, &-y)), "into check");
    }
    Ok(holds)
}

/// Whether `A ↦ XAY` maps the `(K1, K2)`-SP matrices onto themselves:
/// both factors, or both negatives, are cone automorphisms.
pub fn check_onto_xay(x: &RMatrix, y: &RMatrix, k1: &PolyCone, k2: &PolyCone) -> Result<bool> {
    check_factor_shapes(x, y, k1, k2)?;
    let holds = either_sign(x, y, |x, y| Ok(is_automorphism(x, k2)? && is_automorphism(y, k1)?))?;
    if k1.is_orthant() && k2.is_orthant() {
        let orthant_form = |x: &RMatrix, y: &RMatrix| -> Result<bool> { Ok(is_monomial(x)? && is_monomial(y)?) };
        return self_test(holds, || Ok(orthant_form(x, y)? || orthant_form(&-x, &-y)?), "onto check");
    }
    Ok(holds)
}

fn msp_shape_case(k1: &PolyCone, k2: &PolyCone) -> Result<bool> {
    let (m, n) = (k2.dim(), k1.dim());
    if m < n {
        return Err(Error::Hypothesis(format!("minimal semipositivity needs m >= n, got m = {m}, n = {n}")));
    }
    if m > n && !k2.is_simplicial()? {
        return Err(Error::Hypothesis("K2 must be simplicial when m > n".into()));
    }
    Ok(m > n)
}

/// Into preservers of the minimally semipositive matrices. For `m > n`
/// (with `K2` simplicial): `X(K2) = K2` and `Y` is `K1`-inverse
/// nonnegative. For `m = n`: both factors are inverse nonnegative for
/// their cones. Either way up to a common sign.
pub fn check_msp_into_xay(x: &RMatrix, y: &RMatrix, k1: &PolyCone, k2: &PolyCone) -> Result<bool> {
    check_factor_shapes(x, y, k1, k2)?;
    let tall = msp_shape_case(k1, k2)?;
    let holds = either_sign(x, y, |x, y| {
        let left = if tall { is_automorphism(x, k2)? } else { is_k_inverse_nonnegative(x, k2)? };
        Ok(left && is_k_inverse_nonnegative(y, k1)?)
    })?;
    if k1.is_orthant() && k2.is_orthant() {
        let orthant_form = |x: &RMatrix, y: &RMatrix| -> Result<bool> {
            let left = if tall { is_monomial(x)? } else { inverse_nonnegative(x) };
            Ok(left && inverse_nonnegative(y))
        };
        return self_test(holds, || Ok(orthant_form(x, y)? || orthant_form(&-x, &-y)?), "msp into check");
    }
    Ok(holds)
}

/// Onto preservers of the minimally semipositive matrices: both factors,
/// or both negatives, are cone automorphisms.
pub fn check_msp_onto_xay(x: &RMatrix, y: &RMatrix, k1: &PolyCone, k2: &PolyCone) -> Result<bool> {
    check_factor_shapes(x, y, k1, k2)?;
    msp_shape_case(k1, k2)?;
    either_sign(x, y, |x, y| Ok(is_automorphism(x, k2)? && is_automorphism(y, k1)?))
}

/// Transforms for [`conjugate_preserver`]: the new map is
/// `A ↦ Q1·L(S1·A·S2⁻¹)·Q2⁻¹`.
#[derive(Debug, Clone)]
pub struct Conjugation {
    pub q1: RMatrix,
    pub q2: RMatrix,
    pub s1: RMatrix,
    pub s2: RMatrix,
}

/// Moves a `(K1, K2)` preserver to the orthants. `S1` must send the open
/// orthant into `int K2`, `Q1` must send `int K2` into the open orthant,
/// and `S2`, `Q2` must be invertible with `S2(R^n_+) ⊆ K1`,
/// `Q2(K1) ⊆ R^n_+`.
pub fn conjugate_preserver(l: &LinearMap, t: &Conjugation, k1: &PolyCone, k2: &PolyCone) -> Result<LinearMap> {
    let (m, n) = (l.m, l.n);
    if k1.dim() != n || k2.dim() != m {
        return Err(dims(format!("cones must live in R^{n} and R^{m}")));
    }
    if t.q1.shape() != (m, m) || t.s1.shape() != (m, m) || t.q2.shape() != (n, n) || t.s2.shape() != (n, n) {
        return Err(dims("transform shapes do not match the map"));
    }
    let om = PolyCone::orthant(m);
    let on = PolyCone::orthant(n);
    if !maps_interior_to_interior(&t.s1, &om, k2)? {
        return Err(Error::Hypothesis("S1 must map the open orthant into int K2".into()));
    }
    if !maps_interior_to_interior(&t.q1, k2, &om)? {
        return Err(Error::Hypothesis("Q1 must map int K2 into the open orthant".into()));
    }
    if !t.s2.is_invertible() || !is_nonneg_map(&t.s2, &on, k1)? {
        return Err(Error::Hypothesis("S2 must be invertible and map the orthant into K1".into()));
    }
    if !t.q2.is_invertible() || !is_nonneg_map(&t.q2, k1, &on)? {
        return Err(Error::Hypothesis("Q2 must be invertible and map K1 into the orthant".into()));
    }
    let outer = t.q2.inverse()?.transpose().kron(&t.q1);
    let inner = t.s2.inverse()?.transpose().kron(&t.s1);
    LinearMap::new(m, n, &(&outer * &l.mat) * &inner)
}

/// A semipositive `a` (with `witness`) whose image is not semipositive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub trial: u64,
    pub a: RMatrix,
    pub witness: Vec<Rational>,
    pub image: RMatrix,
    pub certificate: Vec<Rational>,
}

impl Counterexample {
    /// Re-checks both halves of the proof exactly.
    pub fn verify(&self, l: &LinearMap, k1: &PolyCone, k2: &PolyCone) -> Result<bool> {
        let sp = SpVerdict::Semipositive { witness: self.witness.clone() };
        let not_sp = SpVerdict::NotSemipositive { certificate: self.certificate.clone() };
        Ok(l.apply(&self.a)? == self.image && sp.verify(&self.a, k1, k2)? && not_sp.verify(&self.image, k1, k2)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FalsifyOutcome {
    NoCounterexampleFound { trials: u64 },
    Counterexample(Counterexample),
}

/// Samples semipositive matrices and looks for one whose image is not
/// semipositive. Trial `k` draws from stream `k` of the seed, trials run
/// in parallel, and the lowest failing trial is reported.
pub fn falsify_preserver(l: &LinearMap, k1: &PolyCone, k2: &PolyCone, trials: u64, seed: u64) -> Result<FalsifyOutcome> {
    if k1.dim() != l.n || k2.dim() != l.m {
        return Err(dims(format!("cones must live in R^{} and R^{}", l.n, l.m)));
    }
    k1.require_proper()?;
    k2.require_proper()?;
    let run = |trial: u64| -> Result<Option<Counterexample>> {
        let mut rng = random::rng_for(seed, trial);
        let (a, witness) = sample_sp_with_witness(&mut rng, l.m, l.n, k1, k2)?;
        let image = l.apply(&a)?;
        Ok(match classify_sp(&image, k1, k2)? {
            SpVerdict::Semipositive { .. } => None,
            SpVerdict::NotSemipositive { certificate } => {
                Some(Counterexample { trial, a, witness, image, certificate })
            }
        })
    };
    let found = (0..trials).into_par_iter().map(run).find_first(|r| !matches!(r, Ok(None)));
    match found {
        None => Ok(FalsifyOutcome::NoCounterexampleFound { trials }),
        Some(Err(e)) => Err(e),
        Some(Ok(c)) => Ok(FalsifyOutcome::Counterexample(c.expect("filtered"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalysisBudget {
    pub trials: u64,
    pub seed: u64,
    pub rank_one_samples: usize,
}

impl Default for AnalysisBudget {
    fn default() -> Self {
        AnalysisBudget { trials: 200, seed: 0, rank_one_samples: 4 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RankOneCheck {
    Ran(RankOneOutcome),
    /// The sampled family is only defined for orthants.
    NotApplicable,
}

/// Results of the theorem checks on the recovered factors; the minimal
/// semipositivity flags are absent when their hypotheses fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TheoremFlags {
    pub sp: bool,
    pub msp: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Counterexample,
    StandardForm,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreserverReport {
    pub invertible: bool,
    pub counterexample: Option<Counterexample>,
    pub trials: u64,
    pub rank_one: RankOneCheck,
    pub factorization: Option<Factorization>,
    pub into_flags: Option<TheoremFlags>,
    pub onto_flags: Option<TheoremFlags>,
    pub verdict: Verdict,
}

/// Runs the evidence pipeline: invertibility, falsification, the rank-one
/// image test, factorization and the into/onto theorem checks. Reports a
/// counterexample when one is found, a standard form only when every step
/// affirms, and otherwise nothing conclusive.
pub fn analyze_preserver(l: &LinearMap, k1: &PolyCone, k2: &PolyCone, budget: AnalysisBudget) -> Result<PreserverReport> {
    let invertible = l.is_invertible();
    let counterexample = match falsify_preserver(l, k1, k2, budget.trials, budget.seed)? {
        FalsifyOutcome::Counterexample(c) => Some(c),
        FalsifyOutcome::NoCounterexampleFound { .. } => None,
    };
    let rank_one = if k1.is_orthant() && k2.is_orthant() {
        RankOneCheck::Ran(rank_one_image_test(l, k1, k2, budget.rank_one_samples, budget.seed)?)
    } else {
        RankOneCheck::NotApplicable
    };
    let factorization = factor_map(l);
    if let Some(f) = factorization.as_ref().filter(|f| f.kind == FactorKind::Standard) {
        let recovered = recover_xy(l);
        if recovered.as_ref() != Some(&f.factors) {
            return Err(Error::Verification("factor recovery routes disagree".into()));
        }
    }
    let (into_flags, onto_flags) = match factorization.as_ref().filter(|f| f.kind == FactorKind::Standard) {
        Some(f) => {
            let (x, y) = (&f.factors.x, &f.factors.signed_y());
            let into = TheoremFlags {
                sp: check_into_xay(x, y, k1, k2)?,
                msp: hypothesis_gated(check_msp_into_xay(x, y, k1, k2))?,
            };
            let onto = TheoremFlags {
                sp: check_onto_xay(x, y, k1, k2)?,
                msp: hypothesis_gated(check_msp_onto_xay(x, y, k1, k2))?,
            };
            (Some(into), Some(onto))
        }
        None => (None, None),
    };
    let rank_one_ok = !matches!(rank_one, RankOneCheck::Ran(RankOneOutcome::Fail { .. }));
    let verdict = if counterexample.is_some() {
        Verdict::Counterexample
    } else if invertible && rank_one_ok && into_flags.is_some_and(|f| f.sp) {
        Verdict::StandardForm
    } else {
        Verdict::Inconclusive
    };
    Ok(PreserverReport {
        invertible,
        counterexample,
        trials: budget.trials,
        rank_one,
        factorization,
        into_flags,
        onto_flags,
        verdict,
    })
}

fn hypothesis_gated(r: Result<bool>) -> Result<Option<bool>> {
    match r {
        Ok(b) => Ok(Some(b)),
        Err(Error::Hypothesis(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> RMatrix {
        RMatrix::from_i64(rows)
    }

    fn orth(n: usize) -> PolyCone {
        PolyCone::orthant(n)
    }

    #[test]
    fn from_xay_matches_products() {
        let x = m(&[&[1, 2], &[3, 4]]);
        let y = m(&[&[0, 1, -1], &[2, 1, 0], &[1, 1, 1]]);
        let a = m(&[&[1, -2, 3], &[4, 0, -1]]);
        let l = LinearMap::from_xay(&x, &y).unwrap();
        assert_eq!(l.apply(&a).unwrap(), &(&x * &a) * &y);
        assert_eq!(LinearMap::from_xay(&RMatrix::identity(2), &RMatrix::identity(3)).unwrap(), LinearMap::identity(2, 3));
        let twice = LinearMap::from_xay(&RMatrix::identity(2).scale(&int(2)), &RMatrix::identity(2)).unwrap();
        assert_eq!(twice.matrix(), &RMatrix::identity(4).scale(&int(2)));
    }

    #[test]
    fn transpose_map_applies() {
        let t = LinearMap::transpose_map(2);
        assert_eq!(t.apply(&RMatrix::unit(2, 2, 0, 1)).unwrap(), RMatrix::unit(2, 2, 1, 0));
        assert!(t.apply(&RMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn rearrangement_convention() {
        // For XAY the rearrangement is vec(X)·vec(Y)ᵀ.
        let x = m(&[&[1, 2], &[3, 4]]);
        let y = m(&[&[5, 6], &[7, 8]]);
        let l = LinearMap::from_xay(&x, &y).unwrap();
        let expected = &x.vec() * &y.vec().transpose();
        assert_eq!(rearrangement(&l), expected);
    }

    #[test]
    fn factor_examples() {
        let x = m(&[&[0, 2], &[4, 6]]);
        let y = m(&[&[1, -1], &[3, 5]]);
        let f = kronecker_factor(&LinearMap::from_xay(&x, &y).unwrap()).unwrap();
        // c = 4, the first nonzero of vec(X).
        assert_eq!(f.x, x.scale(&crate::matrix::ratio(1, 4)));
        assert_eq!(f.signed_y(), y.scale(&int(4)));
        assert_eq!(f.sign, 1);

        let id = kronecker_factor(&LinearMap::identity(2, 2)).unwrap();
        assert_eq!((id.x, id.y, id.sign), (RMatrix::identity(2), RMatrix::identity(2), 1));
        assert!(kronecker_factor(&LinearMap::transpose_map(2)).is_none());

        let neg = kronecker_factor(&LinearMap::identity(2, 2).negate()).unwrap();
        assert_eq!((neg.x, neg.y, neg.sign), (RMatrix::identity(2), RMatrix::identity(2), -1));
    }

    #[test]
    fn recover_examples() {
        let x = m(&[&[0, 2], &[4, 6]]);
        let y = m(&[&[0, 0], &[3, 5]]);
        let l = LinearMap::from_xay(&x, &y).unwrap();
        assert_eq!(recover_xy(&l), kronecker_factor(&l));
        assert!(recover_xy(&LinearMap::transpose_map(2)).is_none());
        let id = recover_xy(&LinearMap::identity(3, 2)).unwrap();
        assert_eq!((id.x, id.y), (RMatrix::identity(3), RMatrix::identity(2)));
    }

    #[test]
    fn transposed_kind_detected() {
        let f = factor_map(&LinearMap::transpose_map(3)).unwrap();
        assert_eq!(f.kind, FactorKind::Transposed);
        assert_eq!(factor_map(&LinearMap::identity(2, 2)).unwrap().kind, FactorKind::Standard);
    }

    #[test]
    fn rank_one_examples() {
        let l = LinearMap::from_xay(&m(&[&[1, 2], &[0, 1]]), &m(&[&[2, 1], &[1, 1]])).unwrap();
        assert_eq!(rank_one_image_test(&l, &orth(2), &orth(2), 5, 1).unwrap(), RankOneOutcome::Pass);
        assert_eq!(
            rank_one_image_test(&LinearMap::transpose_map(2), &orth(2), &orth(2), 5, 1).unwrap(),
            RankOneOutcome::Pass
        );
        // Zeroing the (0,0) coordinate makes 1·e1ᵀ map to a rank-one
        // matrix, but sending it to I gives rank two.
        let mut mat = RMatrix::identity(4);
        mat[(3, 0)] = int(1);
        mat[(1, 1)] = int(0);
        let odd = LinearMap::new(2, 2, mat).unwrap();
        assert!(matches!(
            rank_one_image_test(&odd, &orth(2), &orth(2), 0, 0).unwrap(),
            RankOneOutcome::Fail { image_rank: 2, .. }
        ));
    }

    #[test]
    fn into_and_onto_examples() {
        let (o2, i2) = (orth(2), RMatrix::identity(2));
        assert!(check_into_xay(&i2, &i2, &o2, &o2).unwrap());
        assert!(check_into_xay(&m(&[&[1, 0], &[1, 1]]), &m(&[&[1, -1], &[0, 1]]), &o2, &o2).unwrap());
        assert!(check_into_xay(&-&i2, &-&i2, &o2, &o2).unwrap());
        assert!(!check_into_xay(&i2, &-&i2, &o2, &o2).unwrap());

        assert!(check_onto_xay(&m(&[&[0, 2], &[1, 0]]), &m(&[&[3, 0], &[0, 1]]), &o2, &o2).unwrap());
        assert!(!check_onto_xay(&m(&[&[1, 1], &[0, 1]]), &i2, &o2, &o2).unwrap());
        assert!(check_onto_xay(&m(&[&[0, -2], &[-1, 0]]), &-&i2, &o2, &o2).unwrap());
    }

    #[test]
    fn msp_preserver_examples() {
        let o2 = orth(2);
        let mm = m(&[&[2, -1], &[-1, 2]]);
        assert!(check_msp_into_xay(&mm, &mm, &o2, &o2).unwrap());
        let mono = m(&[&[0, 1, 0], &[0, 0, 2], &[1, 0, 0]]);
        assert!(check_msp_into_xay(&mono, &mm, &o2, &orth(3)).unwrap());
        assert!(!check_msp_into_xay(&m(&[&[1, 1, 0], &[0, 1, 0], &[0, 0, 1]]), &mm, &o2, &orth(3)).unwrap());
        assert!(!check_msp_onto_xay(&mm, &mm, &o2, &o2).unwrap());
        assert!(check_msp_onto_xay(&mono, &RMatrix::identity(2), &o2, &orth(3)).unwrap());
        let sq = PolyCone::from_generators(&m(&[&[1, 1, -1, -1], &[1, -1, 1, -1], &[1, 1, 1, 1]])).unwrap();
        assert!(matches!(
            check_msp_into_xay(&RMatrix::identity(3), &RMatrix::identity(2), &o2, &sq),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn conjugation_of_xay() {
        let w = PolyCone::from_generators(&m(&[&[1, 1], &[0, 1]])).unwrap();
        let g = w.generators().clone();
        let ginv = g.inverse().unwrap();
        let t = Conjugation { q1: ginv.clone(), q2: ginv.clone(), s1: g.clone(), s2: g.clone() };
        let x = m(&[&[2, 1], &[0, 1]]);
        let y = m(&[&[1, 0], &[1, 1]]);
        let l = LinearMap::from_xay(&x, &y).unwrap();
        let c = conjugate_preserver(&l, &t, &w, &w).unwrap();
        let expected = LinearMap::from_xay(&(&(&ginv * &x) * &g), &(&(&ginv * &y) * &g)).unwrap();
        assert_eq!(c, expected);

        let id = Conjugation {
            q1: RMatrix::identity(2),
            q2: RMatrix::identity(2),
            s1: RMatrix::identity(2),
            s2: RMatrix::identity(2),
        };
        assert_eq!(conjugate_preserver(&l, &id, &orth(2), &orth(2)).unwrap(), l);
        assert!(matches!(conjugate_preserver(&l, &id, &w, &w), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn falsify_examples() {
        let o2 = orth(2);
        let t = LinearMap::transpose_map(2);
        match falsify_preserver(&t, &o2, &o2, 1000, 0).unwrap() {
            FalsifyOutcome::Counterexample(c) => assert!(c.verify(&t, &o2, &o2).unwrap()),
            other => panic!("expected a counterexample, got {other:?}"),
        }
        let good = LinearMap::from_xay(&m(&[&[1, 0], &[1, 1]]), &m(&[&[2, -1], &[-1, 2]])).unwrap();
        assert_eq!(
            falsify_preserver(&good, &o2, &o2, 200, 3).unwrap(),
            FalsifyOutcome::NoCounterexampleFound { trials: 200 }
        );
    }

    #[test]
    fn falsify_is_deterministic() {
        let o3 = orth(3);
        let t = LinearMap::transpose_map(3);
        assert_eq!(falsify_preserver(&t, &o3, &o3, 500, 9).unwrap(), falsify_preserver(&t, &o3, &o3, 500, 9).unwrap());
    }

    #[test]
    fn analysis_verdicts() {
        let o2 = orth(2);
        let budget = AnalysisBudget { trials: 100, seed: 0, rank_one_samples: 3 };
        let good = LinearMap::from_xay(&m(&[&[1, 0], &[1, 1]]), &m(&[&[1, -1], &[0, 1]])).unwrap();
        let r = analyze_preserver(&good, &o2, &o2, budget).unwrap();
        assert_eq!(r.verdict, Verdict::StandardForm);

        let r = analyze_preserver(&LinearMap::transpose_map(2), &o2, &o2, budget).unwrap();
        assert_eq!(r.verdict, Verdict::Counterexample);

        let squash = LinearMap::from_xay(&RMatrix::ones(2, 2), &RMatrix::identity(2)).unwrap();
        let r = analyze_preserver(&squash, &o2, &o2, budget).unwrap();
        assert!(!r.invertible);
        assert!(r.counterexample.is_none());
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn map_file_round_trip() {
        let l = LinearMap::from_xay(&m(&[&[1, 2], &[3, 4]]), &RMatrix::identity(1)).unwrap();
        let text = l.to_text();
        assert!(text.starts_with("shape 2 1\n"));
        assert_eq!(LinearMap::parse(&text).unwrap(), l);
        assert!(matches!(LinearMap::parse("shape 2\n1 0\n0 1\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(LinearMap::parse("shape 1 1\n1 0\n0 1\n"), Err(Error::Parse { .. })));
    }
}
