//! Rational polytopes with both representations and a face lattice.

use std::collections::{BTreeSet, VecDeque};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::dd::{extreme_rays, facets_of_generators};
use crate::error::{Error, Result};
use crate::lattice::{
    clear_denominators, rank, rat_int, IntVector, LatticeTag, Rational, RationalVector,
};

/// The halfspace `<normal, x> >= -offset`, or the hyperplane `<normal, x> = -offset`
/// when used as an equation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Facet {
    pub normal: IntVector,
    pub offset: Rational,
}

impl Facet {
    /// `<normal, x> + offset`; nonnegative inside.
    pub fn slack(&self, x: &RationalVector) -> Rational {
        self.normal.dot_rational(x) + &self.offset
    }
}

/// A face, given by the indices of the parent's vertices it contains.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Face {
    pub vertex_indices: Vec<usize>,
    pub dim: i64,
}

impl Face {
    pub fn vertices<'a>(&'a self, parent: &'a Polytope) -> impl Iterator<Item = &'a RationalVector> + 'a {
        self.vertex_indices.iter().map(move |&i| &parent.vertices[i])
    }

    pub fn contains_vertex(&self, i: usize) -> bool {
        self.vertex_indices.binary_search(&i).is_ok()
    }
}

#[derive(Clone, Debug)]
pub struct Polytope {
    ambient_dim: usize,
    vertices: Vec<RationalVector>,
    facets: Vec<Facet>,
    equations: Vec<Facet>,
    dim: usize,
    lattice: Option<LatticeTag>,
    faces: OnceLock<Vec<Face>>,
}

impl PartialEq for Polytope {
    fn eq(&self, other: &Self) -> bool {
        self.ambient_dim == other.ambient_dim
            && self.vertices == other.vertices
            && self.facets == other.facets
            && self.equations == other.equations
    }
}

impl Eq for Polytope {}

/// Convex hull of a nonempty list of points.
pub fn hull(points: &[RationalVector]) -> Result<Polytope> {
    let first = points.first().ok_or(Error::EmptyInput)?;
    let d = first.dim();
    if let Some(bad) = points.iter().find(|p| p.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: bad.dim(),
        });
    }
    let pts: Vec<RationalVector> = points
        .iter()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let homog: Vec<IntVector> = pts.iter().map(homogenize).collect();
    let (normals, eqs) = facets_of_generators(&homog, d + 1);

    let mut equations: Vec<Facet> = eqs
        .iter()
        .map(|e| split_homogeneous(e).expect("equation with zero normal"))
        .map(|f| {
            if f.normal.sign_normalized() != f.normal {
                Facet {
                    normal: -&f.normal,
                    offset: -f.offset,
                }
            } else {
                f
            }
        })
        .collect();
    equations.sort();

    let mut facets: Vec<Facet> = normals
        .iter()
        .filter_map(split_homogeneous)
        .filter(|f| pts.iter().any(|p| f.slack(p).is_zero()))
        .collect();
    facets.sort();
    facets.dedup();

    let eq_normals: Vec<IntVector> = equations.iter().map(|e| e.normal.clone()).collect();
    let vertices: Vec<RationalVector> = pts
        .into_iter()
        .filter(|p| {
            let mut tight = eq_normals.clone();
            tight.extend(
                facets
                    .iter()
                    .filter(|f| f.slack(p).is_zero())
                    .map(|f| f.normal.clone()),
            );
            rank(&tight) == d
        })
        .collect();

    Ok(Polytope {
        ambient_dim: d,
        dim: d - equations.len(),
        vertices,
        facets,
        equations,
        lattice: None,
        faces: OnceLock::new(),
    })
}

/// `(den, den * x)` made primitive.
fn homogenize(p: &RationalVector) -> IntVector {
    let mut coords = vec![Rational::one()];
    coords.extend(p.0.iter().cloned());
    clear_denominators(&RationalVector(coords)).primitive_or_zero()
}

/// Splits a homogeneous inequality `(c, n)` into a facet with primitive normal.
fn split_homogeneous(v: &IntVector) -> Option<Facet> {
    let n = IntVector(v.0[1..].to_vec());
    let g = n.content();
    if g.is_zero() {
        return None;
    }
    Some(Facet {
        normal: IntVector(n.0.iter().map(|a| a / &g).collect()),
        offset: Rational::new(v.0[0].clone(), g),
    })
}

fn homogeneous_constraint(f: &Facet) -> IntVector {
    let den = f.offset.denom().clone();
    let mut coords = vec![f.offset.numer().clone()];
    coords.extend(f.normal.0.iter().map(|a| a * &den));
    IntVector(coords)
}

impl Polytope {
    /// The polytope `{x : <n, x> >= -c for (n, c) in ineqs, <n, x> = -c for (n, c) in eqs}`.
    pub fn from_constraints(ineqs: &[Facet], eqs: &[Facet], ambient_dim: usize) -> Result<Polytope> {
        for f in ineqs.iter().chain(eqs) {
            if f.normal.dim() != ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: ambient_dim,
                    found: f.normal.dim(),
                });
            }
        }
        let mut cone_ineqs: Vec<IntVector> = ineqs.iter().map(homogeneous_constraint).collect();
        cone_ineqs.push(IntVector::unit(ambient_dim + 1, 0));
        let cone_eqs: Vec<IntVector> = eqs.iter().map(homogeneous_constraint).collect();
        let desc = extreme_rays(&cone_ineqs, &cone_eqs, ambient_dim + 1);

        let points: Vec<RationalVector> = desc
            .rays
            .iter()
            .filter(|r| r[0].is_positive())
            .map(|r| {
                RationalVector(
                    r.0[1..]
                        .iter()
                        .map(|a| Rational::new(a.clone(), r[0].clone()))
                        .collect(),
                )
            })
            .collect();
        if points.is_empty() {
            return Err(Error::EmptyPolyhedron);
        }
        if !desc.lineality.is_empty() || desc.rays.iter().any(|r| r[0].is_zero()) {
            return Err(Error::Unbounded);
        }
        hull(&points)
    }

    pub fn from_integer_points(points: &[IntVector]) -> Result<Polytope> {
        hull(&points.iter().map(IntVector::to_rational).collect::<Vec<_>>())
    }

    pub fn with_lattice(mut self, tag: LatticeTag) -> Polytope {
        self.lattice = Some(tag);
        self
    }

    pub fn lattice(&self) -> Option<LatticeTag> {
        self.lattice
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[RationalVector] {
        &self.vertices
    }

    /// Vertices as lattice points, if all are integral.
    pub fn integer_vertices(&self) -> Option<Vec<IntVector>> {
        self.vertices.iter().map(RationalVector::to_integer).collect()
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn equations(&self) -> &[Facet] {
        &self.equations
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn vertex_index(&self, x: &RationalVector) -> Option<usize> {
        self.vertices.binary_search(x).ok()
    }

    pub fn contains(&self, x: &RationalVector) -> Result<bool> {
        if x.dim() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                found: x.dim(),
            });
        }
        Ok(self.equations.iter().all(|e| e.slack(x).is_zero())
            && self.facets.iter().all(|f| !f.slack(x).is_negative()))
    }

    pub fn contains_int(&self, x: &IntVector) -> Result<bool> {
        self.contains(&x.to_rational())
    }

    pub fn is_subset(&self, other: &Polytope) -> Result<bool> {
        for v in &self.vertices {
            if !other.contains(v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Origin in the relative interior and the polytope full-dimensional.
    pub fn origin_is_interior(&self) -> bool {
        self.is_full_dimensional() && self.facets.iter().all(|f| f.offset.is_positive())
    }

    /// `{v : <v, x> >= -1 for all x in self}`.
    pub fn dual(&self) -> Result<Polytope> {
        if !self.is_full_dimensional() {
            return Err(Error::NotFullDimensional);
        }
        if !self.origin_is_interior() {
            return Err(Error::OriginNotInterior);
        }
        let ineqs: Vec<Facet> = self
            .vertices
            .iter()
            .map(|v| {
                let n = clear_denominators(v);
                let g = n.content();
                Facet {
                    normal: IntVector(n.0.iter().map(|a| a / &g).collect()),
                    offset: nonzero_ratio(&n, v) / rat_int(&g),
                }
            })
            .collect();
        let d = Polytope::from_constraints(&ineqs, &[], self.ambient_dim)?;
        Ok(match self.lattice {
            Some(t) => d.with_lattice(t.dual()),
            None => d,
        })
    }

    pub fn is_reflexive(&self) -> bool {
        if self.integer_vertices().is_none() || !self.origin_is_interior() {
            return false;
        }
        self.dual()
            .map(|d| d.integer_vertices().is_some())
            .unwrap_or(false)
    }

    /// All lattice points, sorted lexicographically.
    pub fn lattice_points(&self) -> Vec<IntVector> {
        let d = self.ambient_dim;
        let lo: Vec<BigInt> = (0..d)
            .map(|i| {
                self.vertices
                    .iter()
                    .map(|v| v.0[i].floor().to_integer())
                    .min()
                    .expect("nonempty")
            })
            .collect();
        let hi: Vec<BigInt> = (0..d)
            .map(|i| {
                self.vertices
                    .iter()
                    .map(|v| v.0[i].ceil().to_integer())
                    .max()
                    .expect("nonempty")
            })
            .collect();
        let mut out = Vec::new();
        let mut cur = lo.clone();
        loop {
            let p = IntVector(cur.clone());
            if self.contains_int(&p).expect("dimension matches") {
                out.push(p);
            }
            let mut i = d;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if cur[i] < hi[i] {
                    cur[i] += 1;
                    break;
                }
                cur[i] = lo[i].clone();
            }
        }
    }

    /// Lattice points on the relative boundary (the origin excluded for full-dimensional polytopes).
    pub fn boundary_lattice_points(&self) -> Vec<IntVector> {
        self.lattice_points()
            .into_iter()
            .filter(|p| {
                let x = p.to_rational();
                self.facets.iter().any(|f| f.slack(&x).is_zero())
            })
            .collect()
    }

    /// Indices of vertices on each facet, in facet order.
    pub fn facet_incidences(&self) -> Vec<Vec<usize>> {
        self.facets
            .iter()
            .map(|f| {
                (0..self.vertices.len())
                    .filter(|&i| f.slack(&self.vertices[i]).is_zero())
                    .collect()
            })
            .collect()
    }

    /// Every face including the empty face and the polytope itself, sorted by
    /// dimension and then by vertex set.
    pub fn all_faces(&self) -> &[Face] {
        self.faces.get_or_init(|| {
            let incid: Vec<BTreeSet<usize>> = self
                .facet_incidences()
                .into_iter()
                .map(|v| v.into_iter().collect())
                .collect();
            let top: BTreeSet<usize> = (0..self.vertices.len()).collect();
            let mut seen: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
            seen.insert(top.clone());
            let mut queue = VecDeque::from([top]);
            while let Some(f) = queue.pop_front() {
                for inc in &incid {
                    let g: BTreeSet<usize> = f.intersection(inc).copied().collect();
                    if g != f && seen.insert(g.clone()) {
                        queue.push_back(g);
                    }
                }
            }
            let mut faces: Vec<Face> = seen
                .into_iter()
                .map(|s| {
                    let idx: Vec<usize> = s.into_iter().collect();
                    let dim = self.affine_dim(&idx);
                    Face {
                        vertex_indices: idx,
                        dim,
                    }
                })
                .collect();
            faces.sort_by(|a, b| (a.dim, &a.vertex_indices).cmp(&(b.dim, &b.vertex_indices)));
            faces
        })
    }

    /// Faces of dimension `d`, for `0 <= d < dim`.
    pub fn faces(&self, d: i64) -> Result<Vec<Face>> {
        if d < 0 || d >= self.dim as i64 {
            return Err(Error::FaceDimension(d));
        }
        Ok(self
            .all_faces()
            .iter()
            .filter(|f| f.dim == d)
            .cloned()
            .collect())
    }

    /// The smallest face containing the given vertices.
    pub fn face_closure(&self, vertex_indices: &[usize]) -> Face {
        let facets: Vec<&Facet> = self
            .facets
            .iter()
            .filter(|f| vertex_indices.iter().all(|&i| f.slack(&self.vertices[i]).is_zero()))
            .collect();
        let idx: Vec<usize> = (0..self.vertices.len())
            .filter(|&i| facets.iter().all(|f| f.slack(&self.vertices[i]).is_zero()))
            .collect();
        let dim = self.affine_dim(&idx);
        Face {
            vertex_indices: idx,
            dim,
        }
    }

    /// Facets containing every vertex of `face`.
    pub fn facets_containing(&self, face: &Face) -> Vec<&Facet> {
        self.facets
            .iter()
            .filter(|f| face.vertices(self).all(|v| f.slack(v).is_zero()))
            .collect()
    }

    /// Does the face contain the point `x`?
    pub fn face_contains(&self, face: &Face, x: &RationalVector) -> Result<bool> {
        if !self.contains(x)? {
            return Ok(false);
        }
        Ok(self
            .facets_containing(face)
            .iter()
            .all(|f| f.slack(x).is_zero()))
    }

    /// The face as a polytope of its own.
    pub fn face_polytope(&self, face: &Face) -> Result<Polytope> {
        hull(&face.vertices(self).cloned().collect::<Vec<_>>())
    }

    fn affine_dim(&self, idx: &[usize]) -> i64 {
        let rows: Vec<IntVector> = idx.iter().map(|&i| homogenize(&self.vertices[i])).collect();
        rank(&rows) as i64 - 1
    }
}

/// For a nonzero rational vector `v` and its integer multiple `n = k v`, returns `k`.
fn nonzero_ratio(n: &IntVector, v: &RationalVector) -> Rational {
    let i = v.0.iter().position(|a| !a.is_zero()).expect("nonzero");
    rat_int(&n.0[i]) / &v.0[i]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::rat;

    fn pts(rows: &[&[i64]]) -> Vec<RationalVector> {
        rows.iter().map(|r| IntVector::from_i64s(r).to_rational()).collect()
    }

    fn square() -> Polytope {
        hull(&pts(&[&[-1, -1], &[-1, 1], &[1, -1], &[1, 1]])).unwrap()
    }

    #[test]
    fn square_with_center() {
        let p = hull(&pts(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1], &[1, 1]])).unwrap();
        let q = hull(&[pts(&[&[0, 0], &[2, 0], &[0, 2], &[2, 2]]), vec![RationalVector(vec![rat(1, 1), rat(1, 1)])]].concat()).unwrap();
        assert_eq!(p.vertices().len(), 4);
        assert_eq!(q.vertices().len(), 4);
        assert_eq!(q.facets().len(), 4);
    }

    #[test]
    fn square_dual_is_cross_polytope() {
        let d = square().dual().unwrap();
        assert_eq!(d.vertices(), &pts(&[&[-1, 0], &[0, -1], &[0, 1], &[1, 0]])[..]);
        assert!(square().is_reflexive());
    }

    #[test]
    fn lower_dimensional_hull() {
        let p = hull(&pts(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0]])).unwrap();
        assert_eq!(p.dim(), 2);
        assert_eq!(p.equations().len(), 1);
        assert_eq!(p.facets().len(), 3);
        assert!(p.contains(&RationalVector(vec![rat(1, 3), rat(1, 3), rat(0, 1)])).unwrap());
        assert!(!p.contains(&RationalVector(vec![rat(1, 3), rat(1, 3), rat(1, 1)])).unwrap());
    }

    #[test]
    fn point_and_segment() {
        let p = hull(&pts(&[&[2, 3]])).unwrap();
        assert_eq!(p.dim(), 0);
        assert_eq!(p.vertices().len(), 1);
        let s = hull(&pts(&[&[-1, -1, -1, -1, 0], &[-1, -1, -1, -1, 4]])).unwrap();
        assert_eq!(s.dim(), 1);
        assert_eq!(s.lattice_points().len(), 5);
    }

    #[test]
    fn dimension_mismatch() {
        let e = hull(&[RationalVector::zeros(2), RationalVector::zeros(3)]);
        assert!(matches!(e, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn shifted_square_is_not_reflexive() {
        let p = hull(&pts(&[&[0, 0], &[2, 0], &[0, 2], &[2, 2]])).unwrap();
        assert!(!p.is_reflexive());
        assert!(matches!(p.dual(), Err(Error::OriginNotInterior)));
    }

    #[test]
    fn from_constraints_round_trip() {
        let sq = square();
        let back = Polytope::from_constraints(sq.facets(), &[], 2).unwrap();
        assert_eq!(back, sq);
        let unb = Polytope::from_constraints(&sq.facets()[..3], &[], 2);
        assert!(matches!(unb, Err(Error::Unbounded)));
    }

    #[test]
    fn faces_of_square() {
        let sq = square();
        assert_eq!(sq.faces(0).unwrap().len(), 4);
        assert_eq!(sq.faces(1).unwrap().len(), 4);
        assert_eq!(sq.all_faces().len(), 10);
        assert!(sq.faces(2).is_err());
    }
}
