//! Finitely generated convex sets `conv(V) + cone(R)` with exact
//! coordinates, their inequality descriptions and the operators the backward
//! recursion needs.
//!
//! A set in canonical form has:
//! - its lineality space stored as `+l` and `-l` rays, `l` running over the
//!   reduced echelon basis scaled to coprime integers;
//! - every other generator projected onto the orthogonal complement of the
//!   lineality space, with no redundant generator;
//! - rays scaled (positively) to coprime integers;
//! - vertices and rays sorted lexicographically.
//!
//! Two canonical sets are equal as point sets iff they are equal as values.

mod dd;

use std::sync::{Arc, OnceLock};

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::linalg::{self, ComplementProjector};
use crate::lp::{self, LinearProgram, LpError, LpResult, Sense};
use crate::rational::{
    add, axpy, dot, is_zero_vector, primitive, primitive_unsigned, scale, sub, zeros, Rational,
    Vector,
};

pub use dd::{cone_generators, ConeGenerators};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("operation needs a nonempty set")]
    EmptySet,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("rays must be nonzero")]
    ZeroRay,
    #[error("an empty set cannot carry rays")]
    RaysWithoutVertices,
    #[error("set is not a cone with apex at the origin")]
    NotACone,
    #[error("point does not satisfy the constraints")]
    InfeasiblePoint,
    #[error("direction leaves the affine hull")]
    DirectionOutsideHull,
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// `conv(vertices) + cone(rays)`; empty iff there are no vertices.
#[derive(Debug, Clone)]
pub struct FGSet {
    dim: usize,
    vertices: Vec<Vector>,
    rays: Vec<Vector>,
    canonical: bool,
    hrep: OnceLock<Arc<HRep>>,
}

impl PartialEq for FGSet {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.vertices == other.vertices && self.rays == other.rays
    }
}

impl Eq for FGSet {}

impl FGSet {
    pub fn new(
        dim: usize,
        vertices: Vec<Vector>,
        rays: Vec<Vector>,
    ) -> Result<Self, GeometryError> {
        if dim == 0 {
            return Err(GeometryError::ZeroDimension);
        }
        for g in vertices.iter().chain(&rays) {
            if g.len() != dim {
                return Err(GeometryError::DimensionMismatch {
                    expected: dim,
                    got: g.len(),
                });
            }
        }
        if rays.iter().any(|r| is_zero_vector(r)) {
            return Err(GeometryError::ZeroRay);
        }
        if vertices.is_empty() && !rays.is_empty() {
            return Err(GeometryError::RaysWithoutVertices);
        }
        Ok(Self::raw(dim, vertices, rays, false))
    }

    fn raw(dim: usize, vertices: Vec<Vector>, rays: Vec<Vector>, canonical: bool) -> Self {
        FGSet {
            dim,
            vertices,
            rays,
            canonical,
            hrep: OnceLock::new(),
        }
    }

    pub fn empty(dim: usize) -> Self {
        Self::raw(dim, Vec::new(), Vec::new(), true)
    }

    pub fn point(p: Vector) -> Self {
        let dim = p.len();
        Self::raw(dim, vec![p], Vec::new(), true)
    }

    /// Cone with apex at the origin.
    pub fn cone(dim: usize, rays: Vec<Vector>) -> Result<Self, GeometryError> {
        Self::new(dim, vec![zeros(dim)], rays)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    pub fn rays(&self) -> &[Vector] {
        &self.rays
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical
    }

    fn check_dim(&self, got: usize) -> Result<(), GeometryError> {
        if got != self.dim {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim,
                got,
            });
        }
        Ok(())
    }

    /// Cached inequality description.
    pub fn hrep(&self) -> Result<Arc<HRep>, GeometryError> {
        if let Some(h) = self.hrep.get() {
            return Ok(h.clone());
        }
        let h = Arc::new(compute_hrep(self)?);
        Ok(self.hrep.get_or_init(|| h).clone())
    }
}

/// `a . x = b` for equalities and `a . x <= b` for inequalities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HRep {
    pub dim: usize,
    pub equalities: Vec<(Vector, Rational)>,
    pub inequalities: Vec<(Vector, Rational)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Closure,
    RelativeInterior,
}

impl HRep {
    pub fn new(dim: usize) -> Self {
        HRep {
            dim,
            equalities: Vec::new(),
            inequalities: Vec::new(),
        }
    }

    fn check_dim(&self, got: usize) -> Result<(), GeometryError> {
        if got != self.dim {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim,
                got,
            });
        }
        Ok(())
    }

    pub fn satisfies(&self, x: &[Rational]) -> bool {
        self.equalities.iter().all(|(a, b)| &dot(a, x) == b)
            && self.inequalities.iter().all(|(a, b)| &dot(a, x) <= b)
    }

    fn to_lp(&self, objective: Vector, sense: Sense) -> LinearProgram {
        let mut lp = LinearProgram::new(self.dim, sense).with_objective(objective);
        for (a, b) in &self.equalities {
            lp.add_eq(a.clone(), b.clone());
        }
        for (a, b) in &self.inequalities {
            lp.add_le(a.clone(), b.clone());
        }
        lp
    }

    pub fn is_feasible(&self) -> bool {
        !matches!(
            lp::solve_lp(&self.to_lp(zeros(self.dim), Sense::Maximize)),
            Ok(LpResult::Infeasible { .. })
        )
    }

    /// Indices of inequalities that hold with equality on the whole
    /// (nonempty) set.
    pub fn implicit_equalities(&self) -> Vec<usize> {
        (0..self.inequalities.len())
            .filter(|&i| {
                let (a, b) = &self.inequalities[i];
                match lp::solve_lp(&self.to_lp(a.clone(), Sense::Minimize)) {
                    Ok(LpResult::Optimal { value, .. }) => &value == b,
                    _ => false,
                }
            })
            .collect()
    }

    /// Membership for an arbitrary description; implicit equalities are
    /// detected by linear programming before strictness is tested.
    pub fn contains(&self, x: &[Rational], mode: Membership) -> Result<bool, GeometryError> {
        self.check_dim(x.len())?;
        if !self.satisfies(x) {
            return Ok(false);
        }
        if mode == Membership::Closure {
            return Ok(true);
        }
        let implicit = self.implicit_equalities();
        Ok(self
            .inequalities
            .iter()
            .enumerate()
            .all(|(i, (a, b))| implicit.contains(&i) || &dot(a, x) < b))
    }
}

/// Reduces a generator family to canonical form, assuming the non-lineality
/// generators are already irredundant modulo the lineality space.
fn normalized(
    dim: usize,
    mut points: Vec<Vector>,
    rays: Vec<Vector>,
    lineality: &[Vector],
) -> FGSet {
    if points.is_empty() {
        return FGSet::empty(dim);
    }
    let basis: Vec<Vector> = linalg::row_reduce(lineality, dim)
        .iter()
        .map(|l| primitive_unsigned(l).expect("nonzero basis row"))
        .collect();
    let proj = ComplementProjector::new(basis.clone());
    let mut out_rays: Vec<Vector> = Vec::new();
    if !proj.is_trivial() {
        points = points.iter().map(|p| proj.project(p)).collect();
    }
    for r in &rays {
        if let Some(p) = primitive(&proj.project(r)) {
            out_rays.push(p);
        }
    }
    for l in basis {
        out_rays.push(l.iter().map(|x| -x.clone()).collect());
        out_rays.push(l);
    }
    points.sort();
    points.dedup();
    out_rays.sort();
    out_rays.dedup();
    FGSet::raw(dim, points, out_rays, true)
}

/// Minimal generators of the same closed set: facets by double description,
/// then extreme points and rays of the facet description.
pub fn canonicalize(s: &FGSet) -> FGSet {
    if s.canonical {
        return s.clone();
    }
    let Ok(h) = compute_hrep(s) else {
        return FGSet::empty(s.dim);
    };
    let c = h_to_v(&h);
    let _ = c.hrep.set(Arc::new(h));
    c
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineHull {
    pub point: Vector,
    pub basis: Vec<Vector>,
}

pub fn affine_hull(s: &FGSet) -> Result<AffineHull, GeometryError> {
    let c = canonicalize(s);
    let Some(origin) = c.vertices.first().cloned() else {
        return Err(GeometryError::EmptySet);
    };
    let dirs: Vec<Vector> = c
        .vertices
        .iter()
        .skip(1)
        .map(|v| sub(v, &origin))
        .chain(c.rays.iter().cloned())
        .collect();
    let basis = linalg::row_reduce(&dirs, c.dim)
        .iter()
        .map(|r| primitive_unsigned(r).expect("nonzero basis row"))
        .collect();
    Ok(AffineHull {
        point: origin,
        basis,
    })
}

fn negated(v: &[Rational]) -> Vector {
    v.iter().map(|x| -x.clone()).collect()
}

fn compute_hrep(s: &FGSet) -> Result<HRep, GeometryError> {
    if s.is_empty() {
        return Err(GeometryError::EmptySet);
    }
    let d = s.dim;
    // Homogenize: (1, v) for vertices, (0, r) for rays; the dual cone of the
    // homogenized cone lists the valid inequalities a0 + a . x >= 0.
    let gens: Vec<Vector> = s
        .vertices
        .iter()
        .map(|v| {
            std::iter::once(Rational::one())
                .chain(v.iter().cloned())
                .collect()
        })
        .chain(s.rays.iter().map(|r| {
            std::iter::once(Rational::zero())
                .chain(r.iter().cloned())
                .collect()
        }))
        .collect();
    let dual = cone_generators(&gens, d + 1);

    // rows [a | b] meaning a . x = b
    let eq_aug: Vec<Vector> = dual
        .lineality
        .iter()
        .map(|l| {
            let mut row = l[1..].to_vec();
            row.push(-l[0].clone());
            row
        })
        .collect();
    let eq_rref = linalg::row_reduce(&eq_aug, d);
    let eq_pivots = linalg::pivots(&eq_rref);

    let mut inequalities = Vec::new();
    for e in &dual.rays {
        // -e' . x <= e0
        let mut row = negated(&e[1..]);
        row.push(e[0].clone());
        for (eq, &p) in eq_rref.iter().zip(&eq_pivots) {
            if !row[p].is_zero() {
                let f = -row[p].clone();
                axpy(&mut row, &f, eq);
            }
        }
        if is_zero_vector(&row[..d]) {
            continue;
        }
        let row = primitive(&row).expect("nonzero row");
        inequalities.push((row[..d].to_vec(), row[d].clone()));
    }
    inequalities.sort();
    inequalities.dedup();
    let mut equalities: Vec<(Vector, Rational)> = eq_rref
        .iter()
        .map(|r| {
            let r = primitive_unsigned(r).expect("nonzero row");
            (r[..d].to_vec(), r[d].clone())
        })
        .collect();
    equalities.sort();
    Ok(HRep {
        dim: d,
        equalities,
        inequalities,
    })
}

/// Irredundant inequality description (facets plus affine-hull equalities).
pub fn v_to_h(s: &FGSet) -> Result<HRep, GeometryError> {
    Ok((*s.hrep()?).clone())
}

pub fn h_to_v(h: &HRep) -> FGSet {
    let d = h.dim;
    let homog = |a: &[Rational], b: &Rational| -> Vector {
        std::iter::once(b.clone()).chain(negated(a)).collect()
    };
    let mut cons: Vec<Vector> = Vec::new();
    for (a, b) in &h.equalities {
        let row = homog(a, b);
        cons.push(negated(&row));
        cons.push(row);
    }
    for (a, b) in &h.inequalities {
        cons.push(homog(a, b));
    }
    cons.push(crate::rational::unit(d + 1, 0));
    let gens = cone_generators(&cons, d + 1);
    let mut points = Vec::new();
    let mut rays = Vec::new();
    for g in gens.rays {
        if g[0].is_positive() {
            let inv = Rational::one() / &g[0];
            points.push(scale(&g[1..], &inv));
        } else {
            rays.push(g[1..].to_vec());
        }
    }
    let lineality: Vec<Vector> = gens.lineality.iter().map(|l| l[1..].to_vec()).collect();
    normalized(d, points, rays, &lineality)
}

pub fn intersect(s: &FGSet, t: &FGSet) -> Result<FGSet, GeometryError> {
    s.check_dim(t.dim)?;
    if s.is_empty() || t.is_empty() {
        return Ok(FGSet::empty(s.dim));
    }
    let hs = s.hrep()?;
    let ht = t.hrep()?;
    let mut h = HRep::new(s.dim);
    h.equalities
        .extend(hs.equalities.iter().chain(&ht.equalities).cloned());
    h.inequalities
        .extend(hs.inequalities.iter().chain(&ht.inequalities).cloned());
    Ok(h_to_v(&h))
}

/// Convex hull of a union, remembering which member each generator came
/// from.
#[derive(Debug, Clone)]
pub struct TaggedSet<T> {
    /// Canonical form of the hull.
    pub set: FGSet,
    /// Union of the members' generators, exact duplicates removed (first tag
    /// wins). Generates the same closed set as `set`.
    pub vertices: Vec<(Vector, T)>,
    pub rays: Vec<(Vector, T)>,
}

impl<T> TaggedSet<T> {
    pub fn vertex_points(&self) -> Vec<Vector> {
        self.vertices.iter().map(|(v, _)| v.clone()).collect()
    }

    pub fn ray_vectors(&self) -> Vec<Vector> {
        self.rays.iter().map(|(r, _)| r.clone()).collect()
    }
}

pub fn conv_union<T: Clone>(sets: &[FGSet], tags: &[T]) -> Result<TaggedSet<T>, GeometryError> {
    let Some(first) = sets.first() else {
        return Err(GeometryError::EmptySet);
    };
    let dim = first.dim;
    let mut vertices: Vec<(Vector, T)> = Vec::new();
    let mut rays: Vec<(Vector, T)> = Vec::new();
    for (s, tag) in sets.iter().zip(tags) {
        s.check_dim(dim)?;
        for v in &s.vertices {
            if !vertices.iter().any(|(w, _)| w == v) {
                vertices.push((v.clone(), tag.clone()));
            }
        }
        for r in &s.rays {
            let r = primitive(r).expect("nonzero ray");
            if !rays.iter().any(|(w, _)| *w == r) {
                rays.push((r, tag.clone()));
            }
        }
    }
    if vertices.is_empty() {
        return Err(GeometryError::EmptySet);
    }
    let raw = FGSet::raw(
        dim,
        vertices.iter().map(|(v, _)| v.clone()).collect(),
        rays.iter().map(|(r, _)| r.clone()).collect(),
        false,
    );
    Ok(TaggedSet {
        set: canonicalize(&raw),
        vertices,
        rays,
    })
}

/// Average of the canonical vertices plus the sum of the canonical rays.
pub fn ri_point(s: &FGSet) -> Result<Vector, GeometryError> {
    let c = canonicalize(s);
    if c.is_empty() {
        return Err(GeometryError::EmptySet);
    }
    let mut p = zeros(c.dim);
    for v in &c.vertices {
        p = add(&p, v);
    }
    let n = Rational::from_integer(c.vertices.len().into());
    p = scale(&p, &(Rational::one() / n));
    for r in &c.rays {
        p = add(&p, r);
    }
    Ok(p)
}

pub fn contains(s: &FGSet, x: &[Rational], mode: Membership) -> Result<bool, GeometryError> {
    s.check_dim(x.len())?;
    let h = s.hrep()?;
    if !h.equalities.iter().all(|(a, b)| &dot(a, x) == b) {
        return Ok(false);
    }
    Ok(h.inequalities.iter().all(|(a, b)| {
        let ax = dot(a, x);
        match mode {
            Membership::Closure => &ax <= b,
            Membership::RelativeInterior => &ax < b,
        }
    }))
}

/// `cl(ri P ∩ ri Q)`, or `None` when the relative interiors are disjoint.
pub fn ri_intersection_closure(p: &FGSet, q: &FGSet) -> Result<Option<FGSet>, GeometryError> {
    if p.is_empty() || q.is_empty() {
        return Err(GeometryError::EmptySet);
    }
    let z = intersect(p, q)?;
    if z.is_empty() {
        return Ok(None);
    }
    let probe = ri_point(&z)?;
    if contains(p, &probe, Membership::RelativeInterior)?
        && contains(q, &probe, Membership::RelativeInterior)?
    {
        Ok(Some(z))
    } else {
        Ok(None)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Finite(Rational),
    Unbounded,
}

/// Largest `t` with `x + t * dir` still satisfying `h`.
pub fn max_step(h: &HRep, x: &[Rational], dir: &[Rational]) -> Result<Step, GeometryError> {
    h.check_dim(x.len())?;
    h.check_dim(dir.len())?;
    if !h.satisfies(x) {
        return Err(GeometryError::InfeasiblePoint);
    }
    if h.equalities.iter().any(|(a, _)| !dot(a, dir).is_zero()) {
        return Err(GeometryError::DirectionOutsideHull);
    }
    let mut best: Option<Rational> = None;
    for (a, b) in &h.inequalities {
        let rate = dot(a, dir);
        if rate.is_positive() {
            let t = (b - dot(a, x)) / rate;
            if best.as_ref().is_none_or(|cur| t < *cur) {
                best = Some(t);
            }
        }
    }
    Ok(best.map_or(Step::Unbounded, Step::Finite))
}

/// `{y : <x, y> >= 0 for all x in C}` for a cone `C` with apex at the origin.
pub fn dual_cone(c: &FGSet) -> Result<FGSet, GeometryError> {
    let c = canonicalize(c);
    if c.vertices.len() != 1 || !is_zero_vector(&c.vertices[0]) {
        return Err(GeometryError::NotACone);
    }
    let gens = cone_generators(&c.rays, c.dim);
    Ok(normalized(
        c.dim,
        vec![zeros(c.dim)],
        gens.rays,
        &gens.lineality,
    ))
}

/// True when the set is a linear subspace (cone whose every ray is a line).
pub fn is_linear_subspace(s: &FGSet) -> bool {
    let c = canonicalize(s);
    c.vertices.len() == 1
        && is_zero_vector(&c.vertices[0])
        && c.rays.iter().all(|r| c.rays.contains(&negated(r)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn v(xs: &[i64]) -> Vector {
        xs.iter().map(|&x| int(x)).collect()
    }

    fn set(dim: usize, vs: &[&[i64]], rs: &[&[i64]]) -> FGSet {
        FGSet::new(
            dim,
            vs.iter().map(|x| v(x)).collect(),
            rs.iter().map(|x| v(x)).collect(),
        )
        .unwrap()
    }

    fn interval(a: i64, b: i64) -> FGSet {
        set(1, &[&[a], &[b]], &[])
    }

    #[test]
    fn canonicalize_drops_interior_vertex() {
        let s = FGSet::new(1, vec![v(&[0]), v(&[1]), vec![ratio(1, 2)]], vec![]).unwrap();
        let c = canonicalize(&s);
        assert_eq!(c.vertices(), &[v(&[0]), v(&[1])]);
        assert!(c.is_canonical());
        assert_eq!(canonicalize(&c), c);
    }

    #[test]
    fn canonicalize_scales_rays() {
        let c = canonicalize(&set(2, &[&[0, 0]], &[&[2, 2]]));
        assert_eq!(c.rays(), &[v(&[1, 1])]);
    }

    #[test]
    fn canonicalize_projects_out_lines() {
        // strip {0 <= x <= 1} x R written with a skewed generator family
        let s = set(
            2,
            &[&[0, 5], &[1, -3], &[1, 7]],
            &[&[0, 2], &[0, -1], &[1, 4]],
        );
        let c = canonicalize(&s);
        // (1,4) is not a line, so the set is {x >= 0} x R
        assert_eq!(c.vertices(), &[v(&[0, 0])]);
        assert_eq!(c.rays(), &[v(&[0, -1]), v(&[0, 1]), v(&[1, 0])]);
    }

    #[test]
    fn affine_hull_examples() {
        let seg = set(2, &[&[0, 0], &[1, 1]], &[]);
        let h = affine_hull(&seg).unwrap();
        assert_eq!(h.point, v(&[0, 0]));
        assert_eq!(h.basis, vec![v(&[1, 1])]);
        let tri = set(2, &[&[0, 0], &[1, 0], &[0, 1]], &[]);
        assert_eq!(affine_hull(&tri).unwrap().basis.len(), 2);
        assert_eq!(affine_hull(&FGSet::empty(2)), Err(GeometryError::EmptySet));
    }

    #[test]
    fn segment_hrep() {
        let seg = set(2, &[&[0, 0], &[1, 1]], &[]);
        let h = v_to_h(&seg).unwrap();
        assert_eq!(h.equalities, vec![(v(&[1, -1]), int(0))]);
        assert_eq!(h.inequalities.len(), 2);
        assert!(h.satisfies(&[ratio(1, 2), ratio(1, 2)]));
        assert!(!h.satisfies(&v(&[2, 2])));
        assert!(!h.satisfies(&v(&[-1, -1])));
    }

    #[test]
    fn unit_square_hrep() {
        let sq = set(2, &[&[0, 0], &[1, 0], &[0, 1], &[1, 1]], &[]);
        let h = v_to_h(&sq).unwrap();
        assert!(h.equalities.is_empty());
        assert_eq!(h.inequalities.len(), 4);
        assert_eq!(v_to_h(&FGSet::empty(2)), Err(GeometryError::EmptySet));
    }

    #[test]
    fn orthant_from_inequalities() {
        let mut h = HRep::new(2);
        h.inequalities.push((v(&[-1, 0]), int(0)));
        h.inequalities.push((v(&[0, -1]), int(0)));
        let s = h_to_v(&h);
        assert_eq!(s.vertices(), &[v(&[0, 0])]);
        assert_eq!(s.rays(), &[v(&[0, 1]), v(&[1, 0])]);
    }

    #[test]
    fn infeasible_inequalities_give_empty() {
        let mut h = HRep::new(1);
        h.inequalities.push((v(&[1]), int(0)));
        h.inequalities.push((v(&[-1]), int(-1)));
        assert!(h_to_v(&h).is_empty());
        assert!(!h.is_feasible());
    }

    #[test]
    fn interval_intersections() {
        assert_eq!(
            intersect(&interval(0, 2), &interval(1, 3)).unwrap(),
            interval(1, 2)
        );
        assert!(intersect(&interval(0, 1), &interval(2, 3))
            .unwrap()
            .is_empty());
        assert!(matches!(
            intersect(&interval(0, 1), &set(2, &[&[0, 0]], &[])),
            Err(GeometryError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn conv_union_examples() {
        let pts = [
            set(2, &[&[0, 0]], &[]),
            set(2, &[&[1, 0]], &[]),
            set(2, &[&[0, 1]], &[]),
        ];
        let u = conv_union(&pts, &[0, 1, 2]).unwrap();
        assert_eq!(
            u.set,
            canonicalize(&set(2, &[&[0, 0], &[1, 0], &[0, 1]], &[]))
        );
        assert_eq!(u.vertices.len(), 3);

        let cones = [
            set(2, &[&[0, 0]], &[&[1, 0]]),
            set(2, &[&[0, 0]], &[&[0, 1]]),
        ];
        let u = conv_union(&cones, &["a", "b"]).unwrap();
        assert_eq!(
            u.set,
            canonicalize(&set(2, &[&[0, 0]], &[&[1, 0], &[0, 1]]))
        );
        assert_eq!(u.vertices, vec![(v(&[0, 0]), "a")]);
        assert!(conv_union::<u8>(&[], &[]).is_err());
    }

    #[test]
    fn ri_point_examples() {
        let tri = set(2, &[&[0, 0], &[1, 0], &[0, 1]], &[]);
        assert_eq!(ri_point(&tri).unwrap(), vec![ratio(1, 3), ratio(1, 3)]);
        let cone = set(2, &[&[0, 0]], &[&[1, 0], &[0, 1]]);
        assert_eq!(ri_point(&cone).unwrap(), v(&[1, 1]));
        assert_eq!(ri_point(&FGSet::empty(1)), Err(GeometryError::EmptySet));
    }

    #[test]
    fn membership_modes() {
        let s = interval(0, 1);
        assert!(!contains(&s, &v(&[0]), Membership::RelativeInterior).unwrap());
        assert!(contains(&s, &v(&[0]), Membership::Closure).unwrap());
        assert!(contains(&s, &[ratio(1, 2)], Membership::RelativeInterior).unwrap());
        assert!(contains(&s, &v(&[0, 0]), Membership::Closure).is_err());
        // a single point is its own relative interior
        let p = set(2, &[&[3, 4]], &[]);
        assert!(contains(&p, &v(&[3, 4]), Membership::RelativeInterior).unwrap());
    }

    #[test]
    fn hrep_membership_detects_implicit_equalities() {
        // x <= 0, -x <= 0, y <= 1, -y <= 1 : segment on the y axis
        let mut h = HRep::new(2);
        h.inequalities.push((v(&[1, 0]), int(0)));
        h.inequalities.push((v(&[-1, 0]), int(0)));
        h.inequalities.push((v(&[0, 1]), int(1)));
        h.inequalities.push((v(&[0, -1]), int(1)));
        assert_eq!(h.implicit_equalities(), vec![0, 1]);
        assert!(h
            .contains(&v(&[0, 0]), Membership::RelativeInterior)
            .unwrap());
        assert!(!h
            .contains(&v(&[0, 1]), Membership::RelativeInterior)
            .unwrap());
    }

    #[test]
    fn ri_intersection_examples() {
        assert_eq!(
            ri_intersection_closure(&interval(0, 2), &interval(1, 3)).unwrap(),
            Some(interval(1, 2))
        );
        assert_eq!(
            ri_intersection_closure(&interval(0, 1), &interval(1, 2)).unwrap(),
            None
        );
    }

    #[test]
    fn max_step_examples() {
        let h = v_to_h(&interval(0, 4)).unwrap();
        assert_eq!(
            max_step(&h, &v(&[1]), &v(&[1])).unwrap(),
            Step::Finite(int(3))
        );
        let half = v_to_h(&set(1, &[&[0]], &[&[1]])).unwrap();
        assert_eq!(
            max_step(&half, &v(&[1]), &v(&[1])).unwrap(),
            Step::Unbounded
        );
        assert_eq!(
            max_step(&h, &v(&[5]), &v(&[1])),
            Err(GeometryError::InfeasiblePoint)
        );
    }

    #[test]
    fn dual_cone_examples() {
        let orthant = set(2, &[&[0, 0]], &[&[1, 0], &[0, 1]]);
        assert_eq!(dual_cone(&orthant).unwrap(), canonicalize(&orthant));

        let plane = set(2, &[&[0, 0]], &[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]]);
        assert_eq!(dual_cone(&plane).unwrap(), FGSet::point(v(&[0, 0])));

        let k = set(2, &[&[0, 0]], &[&[1, 0], &[1, 1]]);
        let kd = dual_cone(&k).unwrap();
        assert_eq!(kd, canonicalize(&set(2, &[&[0, 0]], &[&[0, 1], &[1, -1]])));
        assert_eq!(dual_cone(&kd).unwrap(), canonicalize(&k));

        assert_eq!(dual_cone(&interval(0, 1)), Err(GeometryError::NotACone));
    }

    #[test]
    fn subspace_detection() {
        let line = set(2, &[&[0, 0]], &[&[1, 1], &[-1, -1]]);
        assert!(is_linear_subspace(&line));
        assert!(!is_linear_subspace(&set(2, &[&[0, 0]], &[&[1, 1]])));
    }
}
