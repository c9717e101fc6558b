//! Polyhedral cones in generator (V) and facet (H) form.
//!
//! Generators are kept as normalized extreme rays (first nonzero coordinate
//! scaled to ±1) in descending lexicographic order, so `e₁` precedes `e₂`.
//! Facet normals use the same normalization and ordering.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use num::{Signed, Zero};

use crate::error::{dims, Error, Result};
use crate::lp::{in_conic_hull, nonneg_solution};
use crate::matrix::{dot, normalize_ray, parse_rational, RMatrix, Rational};

pub const MAX_FACET_DIM: usize = 8;
pub const MAX_FACET_GENERATORS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Properness {
    pub pointed: bool,
    pub full_dimensional: bool,
}

impl Properness {
    pub fn is_proper(&self) -> bool {
        self.pointed && self.full_dimensional
    }

    pub fn reason(&self) -> Option<&'static str> {
        match (self.pointed, self.full_dimensional) {
            (true, true) => None,
            (false, true) => Some("cone contains a line (not pointed)"),
            (true, false) => Some("cone has empty interior (not full-dimensional)"),
            (false, false) => Some("cone is neither pointed nor full-dimensional"),
        }
    }
}

#[derive(Debug)]
pub struct PolyCone {
    dim: usize,
    generators: RMatrix,
    facets: OnceLock<Result<RMatrix>>,
    properness: Properness,
}

impl Clone for PolyCone {
    fn clone(&self) -> Self {
        let facets = OnceLock::new();
        if let Some(f) = self.facets.get() {
            let _ = facets.set(f.clone());
        }
        Self {
            dim: self.dim,
            generators: self.generators.clone(),
            facets,
            properness: self.properness,
        }
    }
}

impl PartialEq for PolyCone {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.generators == other.generators
    }
}

fn sorted_rays(mut rays: Vec<Vec<Rational>>) -> Vec<Vec<Rational>> {
    rays.sort_by(|a, b| b.cmp(a));
    rays.dedup();
    rays
}

impl PolyCone {
    /// The cone `{G·λ : λ ≥ 0}` reduced to its extreme rays.
    pub fn from_generators(g: &RMatrix) -> Result<Self> {
        let mut rays = Vec::with_capacity(g.cols());
        for (j, col) in g.column_vectors().into_iter().enumerate() {
            let ray = normalize_ray(&col)
                .ok_or_else(|| Error::InvalidInput(format!("generator {} is the zero vector", j + 1)))?;
            rays.push(ray);
        }
        let rays = sorted_rays(rays);
        let mut keep = vec![true; rays.len()];
        for i in 0..rays.len() {
            let others: Vec<Vec<Rational>> = (0..rays.len())
                .filter(|&k| k != i && keep[k])
                .map(|k| rays[k].clone())
                .collect();
            if others.is_empty() {
                continue;
            }
            let hull = RMatrix::from_columns(&others)?;
            if in_conic_hull(&hull, &rays[i]) {
                keep[i] = false;
            }
        }
        let rays: Vec<_> = rays.into_iter().zip(keep).filter(|(_, k)| *k).map(|(r, _)| r).collect();
        let generators = RMatrix::from_columns(&rays)?;
        let dim = generators.rows();
        let full_dimensional = generators.rank() == dim;
        // Pointed iff no nonzero λ ≥ 0 has Gλ = 0.
        let mut system = RMatrix::zeros(dim + 1, generators.cols());
        for i in 0..dim {
            for j in 0..generators.cols() {
                system[(i, j)] = generators[(i, j)].clone();
            }
        }
        for j in 0..generators.cols() {
            system[(dim, j)] = Rational::from_integer(1.into());
        }
        let mut rhs = RMatrix::zeros(dim + 1, 1);
        rhs[(dim, 0)] = Rational::from_integer(1.into());
        let pointed = nonneg_solution(&system, &rhs).is_none();
        Ok(Self {
            dim,
            generators,
            facets: OnceLock::new(),
            properness: Properness { pointed, full_dimensional },
        })
    }

    /// The nonnegative orthant `ℝⁿ₊`.
    pub fn orthant(n: usize) -> Self {
        let id = RMatrix::identity(n);
        let facets = OnceLock::new();
        let _ = facets.set(Ok(id.clone()));
        Self {
            dim: n,
            generators: id,
            facets,
            properness: Properness { pointed: true, full_dimensional: true },
        }
    }

    /// Cone generated by the columns of an invertible `t`.
    pub fn simplicial(t: &RMatrix) -> Result<Self> {
        if !t.is_invertible() {
            return Err(Error::InvalidInput("simplicial cone needs an invertible generator matrix".into()));
        }
        Self::from_generators(t)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Extreme rays as columns.
    pub fn generators(&self) -> &RMatrix {
        &self.generators
    }

    pub fn num_rays(&self) -> usize {
        self.generators.cols()
    }

    pub fn properness(&self) -> Properness {
        self.properness
    }

    pub fn is_proper(&self) -> bool {
        self.properness.is_proper()
    }

    pub fn is_orthant(&self) -> bool {
        self.generators == RMatrix::identity(self.dim)
    }

    pub(crate) fn require_proper(&self) -> Result<()> {
        match self.properness.reason() {
            None => Ok(()),
            Some(r) => Err(Error::NotProper(r.into())),
        }
    }

    /// Inner facet normals as rows: `K = {x : F·x ≥ 0}`.
    pub fn facets(&self) -> Result<&RMatrix> {
        self.facets
            .get_or_init(|| {
                self.require_proper()?;
                enumerate_facets(&self.generators)
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn dual(&self) -> Result<PolyCone> {
        let facets = self.facets()?.clone();
        let dual_facets = OnceLock::new();
        let _ = dual_facets.set(Ok(self.generators.transpose()));
        Ok(PolyCone {
            dim: self.dim,
            generators: facets.transpose(),
            facets: dual_facets,
            properness: self.properness,
        })
    }

    fn check_dim(&self, x: &[Rational]) -> Result<()> {
        if x.len() != self.dim {
            return Err(dims(format!("vector of length {} for a cone in dimension {}", x.len(), self.dim)));
        }
        Ok(())
    }

    pub fn contains(&self, x: &[Rational]) -> Result<bool> {
        self.check_dim(x)?;
        if self.is_proper() {
            Ok(self.facets()?.mul_vec(x).iter().all(|v| !v.is_negative()))
        } else {
            Ok(in_conic_hull(&self.generators, x))
        }
    }

    pub fn contains_interior(&self, x: &[Rational]) -> Result<bool> {
        self.check_dim(x)?;
        self.require_proper()?;
        Ok(self.facets()?.mul_vec(x).iter().all(Signed::is_positive))
    }

    pub fn is_simplicial(&self) -> Result<bool> {
        self.require_proper()?;
        Ok(self.num_rays() == self.dim)
    }

    /// Sum of the extreme rays; interior for proper cones.
    pub fn interior_point(&self) -> Vec<Rational> {
        (0..self.dim)
            .map(|i| self.generators.row(i).iter().fold(Rational::zero(), |acc, v| acc + v))
            .collect()
    }

    /// An invertible matrix whose columns lie in the cone and whose first
    /// column is `v`. Remaining columns are the first extreme rays (in
    /// canonical order) that enlarge the span.
    pub fn extend_to_simplicial(&self, v: &[Rational]) -> Result<RMatrix> {
        self.check_dim(v)?;
        if v.iter().all(Zero::is_zero) {
            return Err(Error::InvalidInput("cannot extend the zero vector".into()));
        }
        if !self.contains(v)? {
            return Err(Error::InvalidInput("vector is not in the cone".into()));
        }
        if !self.properness.full_dimensional {
            return Err(Error::NotProper("cone has empty interior (not full-dimensional)".into()));
        }
        let mut columns = vec![v.to_vec()];
        for g in self.generators.column_vectors() {
            if columns.len() == self.dim {
                break;
            }
            let mut trial = columns.clone();
            trial.push(g);
            if RMatrix::from_columns(&trial)?.rank() == trial.len() {
                columns = trial;
            }
        }
        RMatrix::from_columns(&columns)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(no, l)| (no + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (no, header) = lines.next().ok_or(Error::Parse { line: 0, message: "empty cone file".into() })?;
        let dim = header
            .strip_prefix("dim")
            .map(str::trim)
            .and_then(|d| d.parse::<usize>().ok())
            .filter(|&d| d > 0)
            .ok_or_else(|| Error::Parse { line: no, message: "expected `dim n` header".into() })?;
        let mut columns = Vec::new();
        for (no, line) in lines {
            let ray = line
                .split_whitespace()
                .map(parse_rational)
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|message| Error::Parse { line: no, message })?;
            if ray.len() != dim {
                return Err(Error::Parse {
                    line: no,
                    message: format!("generator has {} entries, expected {dim}", ray.len()),
                });
            }
            columns.push(ray);
        }
        if columns.is_empty() {
            return Err(Error::Parse { line: no, message: "cone has no generators".into() });
        }
        Self::from_generators(&RMatrix::from_columns(&columns)?)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("dim {}\n", self.dim);
        for g in self.generators.column_vectors() {
            let row: Vec<String> = g.iter().map(ToString::to_string).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Extreme rays of `{y : Gᵀy ≥ 0}` by incremental double description.
/// Zero sets are bitmasks over generator indices.
fn enumerate_facets(g: &RMatrix) -> Result<RMatrix> {
    let (n, p) = g.shape();
    if n > MAX_FACET_DIM || p > MAX_FACET_GENERATORS {
        return Err(Error::Capacity(format!(
            "facet enumeration supports dimension <= {MAX_FACET_DIM} and <= {MAX_FACET_GENERATORS} generators, got {n} and {p}"
        )));
    }
    let cols = g.column_vectors();
    let mut basis: Vec<usize> = Vec::with_capacity(n);
    for j in 0..p {
        let mut trial: Vec<Vec<Rational>> = basis.iter().map(|&b| cols[b].clone()).collect();
        trial.push(cols[j].clone());
        if RMatrix::from_columns(&trial)?.rank() == trial.len() {
            basis.push(j);
        }
        if basis.len() == n {
            break;
        }
    }
    if basis.len() < n {
        return Err(Error::NotProper("cone has empty interior (not full-dimensional)".into()));
    }
    let rows: Vec<Vec<Rational>> = basis.iter().map(|&b| cols[b].clone()).collect();
    let inv = RMatrix::from_rows(&rows)?.inverse()?;
    let all_basis: u32 = basis.iter().fold(0, |acc, &b| acc | (1 << b));
    let mut rays: Vec<(Vec<Rational>, u32)> = (0..n)
        .map(|j| (inv.col(j), all_basis & !(1 << basis[j])))
        .collect();

    for k in (0..p).filter(|k| !basis.contains(k)) {
        let values: Vec<Rational> = rays.iter().map(|(r, _)| dot(&cols[k], r)).collect();
        let mut next = Vec::with_capacity(rays.len());
        for (idx, (r, z)) in rays.iter().enumerate() {
            if values[idx].is_positive() {
                next.push((r.clone(), *z));
            } else if values[idx].is_zero() {
                next.push((r.clone(), *z | (1 << k)));
            }
        }
        for (ip, (rp, zp)) in rays.iter().enumerate() {
            if !values[ip].is_positive() {
                continue;
            }
            for (iq, (rq, zq)) in rays.iter().enumerate() {
                if !values[iq].is_negative() {
                    continue;
                }
                let common = zp & zq;
                if (common.count_ones() as usize) + 2 < n {
                    continue;
                }
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(ir, (_, zr))| ir == ip || ir == iq || zr & common != common);
                if !adjacent {
                    continue;
                }
                let combo: Vec<Rational> = rq
                    .iter()
                    .zip(rp)
                    .map(|(a, b)| &values[ip] * a - &values[iq] * b)
                    .collect();
                next.push((combo, common | (1 << k)));
            }
        }
        rays = next;
    }
    let normals: Vec<Vec<Rational>> = rays
        .into_iter()
        .map(|(r, _)| normalize_ray(&r).expect("double description produced a zero ray"))
        .collect();
    let normals = sorted_rays(normals);
    let f = RMatrix::from_rows(&normals)?;
    debug_assert!((&f * g).is_nonnegative());
    Ok(f)
}

fn check_map_shape(a: &RMatrix, k1: &PolyCone, k2: &PolyCone) -> Result<()> {
    if a.cols() != k1.dim() || a.rows() != k2.dim() {
        return Err(dims(format!(
            "{}x{} matrix between cones of dimension {} and {}",
            a.rows(),
            a.cols(),
            k1.dim(),
            k2.dim()
        )));
    }
    Ok(())
}

/// `F₂·A·G₁`: the image of every extreme ray of `K1` in facet coordinates of `K2`.
pub fn ray_facet_product(a: &RMatrix, k1: &PolyCone, k2: &PolyCone) -> Result<RMatrix> {
    check_map_shape(a, k1, k2)?;
    Ok(&(k2.facets()? * a) * k1.generators())
}

/// `A(K1) ⊆ K2`.
pub fn is_nonneg_map(a: &RMatrix, k1: &PolyCone, k2: &PolyCone) -> Result<bool> {
    Ok(ray_facet_product(a, k1, k2)?.is_nonnegative())
}

/// `A(K1°) ⊆ K2°`: nonnegative and no facet of `K2` annihilates `A(K1)`.
pub fn maps_interior_to_interior(a: &RMatrix, k1: &PolyCone, k2: &PolyCone) -> Result<bool> {
    k1.require_proper()?;
    k2.require_proper()?;
    let p = ray_facet_product(a, k1, k2)?;
    Ok(p.is_nonnegative() && (0..p.rows()).all(|i| p.row(i).iter().any(Signed::is_positive)))
}

pub fn is_k_inverse_nonnegative(y: &RMatrix, k: &PolyCone) -> Result<bool> {
    check_map_shape(y, k, k)?;
    match y.inverse() {
        Ok(inv) => is_nonneg_map(&inv, k, k),
        Err(Error::Singular) => Ok(false),
        Err(e) => Err(e),
    }
}

/// `X(K) = K`: `X` is invertible and permutes the extreme rays up to
/// positive scaling.
pub fn is_automorphism(x: &RMatrix, k: &PolyCone) -> Result<bool> {
    check_map_shape(x, k, k)?;
    if !x.is_invertible() {
        return Ok(false);
    }
    let index: BTreeMap<Vec<Rational>, usize> = k
        .generators()
        .column_vectors()
        .into_iter()
        .enumerate()
        .map(|(i, g)| (g, i))
        .collect();
    let mut hit = BTreeSet::new();
    for g in k.generators().column_vectors() {
        let image = normalize_ray(&x.mul_vec(&g)).expect("invertible map sends rays to nonzero vectors");
        match index.get(&image) {
            Some(&j) if hit.insert(j) => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::int;

    fn m(rows: &[&[i64]]) -> RMatrix {
        RMatrix::from_i64(rows)
    }

    fn v(x: &[i64]) -> Vec<Rational> {
        x.iter().map(|&a| int(a)).collect()
    }

    fn wedge() -> PolyCone {
        // cone{(1,0), (1,1)}
        PolyCone::from_generators(&m(&[&[1, 1], &[0, 1]])).unwrap()
    }

    #[test]
    fn orthant_from_identity() {
        let k = PolyCone::from_generators(&RMatrix::identity(3)).unwrap();
        assert_eq!(k.generators(), &RMatrix::identity(3));
        assert!(k.is_proper());
        assert_eq!(k, PolyCone::orthant(3));
    }

    #[test]
    fn redundant_generators_are_dropped() {
        // (1,1) = (1,0) + (0,1) is not extreme.
        let k = PolyCone::from_generators(&m(&[&[1, 1, 0], &[0, 1, 1]])).unwrap();
        assert_eq!(k.generators(), &RMatrix::identity(2));
        // Scaled duplicates collapse.
        let k = PolyCone::from_generators(&m(&[&[2, 1, 0], &[0, 0, 3]])).unwrap();
        assert_eq!(k.num_rays(), 2);
    }

    #[test]
    fn zero_generator_rejected() {
        assert!(matches!(
            PolyCone::from_generators(&m(&[&[1, 0], &[0, 0]])),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn facet_examples() {
        assert_eq!(PolyCone::orthant(2).facets().unwrap(), &RMatrix::identity(2));
        let f = PolyCone::from_generators(&RMatrix::identity(2)).unwrap().facets().unwrap().clone();
        assert_eq!(f, RMatrix::identity(2));
        // normals (1,-1) and (0,1), in canonical order
        assert_eq!(wedge().facets().unwrap(), &m(&[&[1, -1], &[0, 1]]));
    }

    #[test]
    fn simplicial_facets_are_inverse_rows() {
        let t = m(&[&[2, 1, 0], &[0, 1, 1], &[1, 0, 3]]);
        let k = PolyCone::simplicial(&t).unwrap();
        let inv = t.inverse().unwrap();
        let expected: Vec<Vec<Rational>> = sorted_rays(
            (0..3).map(|i| normalize_ray(inv.row(i)).unwrap()).collect(),
        );
        assert_eq!(k.facets().unwrap(), &RMatrix::from_rows(&expected).unwrap());
    }

    #[test]
    fn square_pyramid_has_four_facets() {
        let g = m(&[&[1, -1, -1, 1], &[1, 1, -1, -1], &[1, 1, 1, 1]]);
        let k = PolyCone::from_generators(&g).unwrap();
        assert_eq!(k.num_rays(), 4);
        assert_eq!(k.facets().unwrap().rows(), 4);
        assert!(!k.is_simplicial().unwrap());
        assert!(k.contains_interior(&v(&[0, 0, 1])).unwrap());
        assert!(!k.contains(&v(&[2, 0, 1])).unwrap());
    }

    #[test]
    fn dual_examples() {
        assert_eq!(PolyCone::orthant(3).dual().unwrap(), PolyCone::orthant(3));
        let d = wedge().dual().unwrap();
        assert_eq!(d, PolyCone::from_generators(&m(&[&[0, 1], &[1, -1]])).unwrap());
        assert_eq!(d.dual().unwrap(), wedge());
    }

    #[test]
    fn properness_examples() {
        assert!(PolyCone::orthant(3).is_proper());
        let half = PolyCone::from_generators(&m(&[&[1, -1, 0], &[0, 0, 1]])).unwrap();
        assert_eq!(half.properness(), Properness { pointed: false, full_dimensional: true });
        let flat = PolyCone::from_generators(&m(&[&[1, 0], &[0, 1], &[0, 0]])).unwrap();
        assert_eq!(flat.properness(), Properness { pointed: true, full_dimensional: false });
        assert!(matches!(flat.facets(), Err(Error::NotProper(_))));
        assert!(half.contains(&v(&[-3, 1])).unwrap());
        assert!(!half.contains(&v(&[0, -1])).unwrap());
    }

    #[test]
    fn membership_examples() {
        let o = PolyCone::orthant(2);
        assert!(o.contains_interior(&v(&[1, 1])).unwrap());
        assert!(o.contains(&v(&[1, 0])).unwrap());
        assert!(!o.contains_interior(&v(&[1, 0])).unwrap());
        assert!(!wedge().contains(&v(&[0, 1])).unwrap());
        assert!(matches!(o.contains(&v(&[1])), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn simplicial_examples() {
        assert!(PolyCone::orthant(4).is_simplicial().unwrap());
        assert!(wedge().is_simplicial().unwrap());
    }

    #[test]
    fn extend_examples() {
        let o3 = PolyCone::orthant(3);
        assert_eq!(o3.extend_to_simplicial(&v(&[1, 0, 0])).unwrap(), RMatrix::identity(3));
        let t = PolyCone::orthant(2).extend_to_simplicial(&v(&[1, 1])).unwrap();
        assert_eq!(t, m(&[&[1, 1], &[1, 0]]));
        assert!(o3.extend_to_simplicial(&v(&[0, 0, 0])).is_err());
        assert!(o3.extend_to_simplicial(&v(&[1, -1, 0])).is_err());
    }

    #[test]
    fn nonneg_map_examples() {
        let o = PolyCone::orthant(2);
        assert!(is_nonneg_map(&m(&[&[1, 2], &[0, 3]]), &o, &o).unwrap());
        assert!(!is_nonneg_map(&(-&RMatrix::identity(2)), &o, &o).unwrap());
        // swap of the wedge's coordinates: (1,0) -> (0,1) leaves the wedge
        let w = wedge();
        let swap = m(&[&[0, 1], &[1, 0]]);
        // G = [(1,1) (1,0)], F = [(1,-1); (0,1)]
        assert_eq!(ray_facet_product(&swap, &w, &w).unwrap(), m(&[&[0, -1], &[1, 1]]));
        assert!(!is_nonneg_map(&swap, &w, &w).unwrap());
        // shear (x, y) -> (x + y, y) keeps the wedge
        assert!(is_nonneg_map(&m(&[&[1, 1], &[0, 1]]), &w, &w).unwrap());
    }

    #[test]
    fn interior_map_examples() {
        let o = PolyCone::orthant(2);
        assert!(maps_interior_to_interior(&RMatrix::identity(2), &o, &o).unwrap());
        assert!(!maps_interior_to_interior(&RMatrix::unit(2, 2, 0, 0), &o, &o).unwrap());
        assert!(maps_interior_to_interior(&m(&[&[0, 3], &[1, 0]]), &o, &o).unwrap());
    }

    #[test]
    fn inverse_nonnegative_examples() {
        let o = PolyCone::orthant(2);
        assert!(is_k_inverse_nonnegative(&m(&[&[1, -1], &[0, 1]]), &o).unwrap());
        assert!(is_k_inverse_nonnegative(&RMatrix::identity(2), &o).unwrap());
        assert!(!is_k_inverse_nonnegative(&m(&[&[1, 2], &[2, 4]]), &o).unwrap());
    }

    #[test]
    fn automorphism_examples() {
        let o = PolyCone::orthant(3);
        assert!(is_automorphism(&m(&[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]]), &o).unwrap());
        assert!(is_automorphism(&m(&[&[2, 0, 0], &[0, 1, 0], &[0, 0, 5]]), &o).unwrap());
        let o2 = PolyCone::orthant(2);
        assert!(!is_automorphism(&m(&[&[0, -1], &[1, 0]]), &o2).unwrap());
        assert!(!is_automorphism(&m(&[&[1, 1], &[0, 1]]), &o2).unwrap());
    }

    #[test]
    fn cone_file_round_trip() {
        let k = PolyCone::parse("# wedge\ndim 2\n1 0\n1 1\n").unwrap();
        assert_eq!(k, wedge());
        assert_eq!(PolyCone::parse(&k.to_text()).unwrap(), k);
        assert!(PolyCone::parse("dim 2\n1 0 0\n").is_err());
        assert!(PolyCone::parse("1 0\n").is_err());
    }
}
