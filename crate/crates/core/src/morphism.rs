//! Integer linear maps between lattices and compatibility of fans under them.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fan::{face_of_cone, Cone, Fan};
use crate::lattice::{
    bareiss_det, clear_denominators, independent_subset, integer_kernel, rat_int, solve_rational, IntVector,
    IntegerMatrix, Rational, RationalVector,
};
pub use crate::lattice::LatticeTag;
use crate::polytope::{hull, Face, Facet, Polytope};

/// A linear map between lattices, acting on column vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeMap {
    pub matrix: IntegerMatrix,
    pub source: LatticeTag,
    pub target: LatticeTag,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapJson {
    pub name: String,
    pub matrix: Vec<Vec<i64>>,
    pub source: LatticeTag,
    pub target: LatticeTag,
}

impl LatticeMap {
    pub fn new(matrix: IntegerMatrix, source: LatticeTag, target: LatticeTag) -> Self {
        LatticeMap { matrix, source, target }
    }

    pub fn identity(n: usize, lattice: LatticeTag) -> Self {
        LatticeMap::new(IntegerMatrix::identity(n), lattice, lattice)
    }

    pub fn from_json(j: &MapJson) -> Result<Self> {
        let rows: Vec<&[i64]> = j.matrix.iter().map(Vec::as_slice).collect();
        Ok(LatticeMap::new(IntegerMatrix::from_i64_rows(&rows)?, j.source, j.target))
    }

    pub fn to_json(&self, name: &str) -> MapJson {
        MapJson {
            name: name.to_string(),
            matrix: self.matrix.row_vectors().iter().map(IntVector::to_i64s).collect(),
            source: self.source,
            target: self.target,
        }
    }

    pub fn source_dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn target_dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn apply(&self, x: &IntVector) -> Result<IntVector> {
        self.matrix.mul_vec(x)
    }

    pub fn apply_rational(&self, x: &RationalVector) -> Result<RationalVector> {
        self.matrix.mul_rational_vec(x)
    }

    /// The dual map between the dual lattices.
    pub fn transpose(&self) -> LatticeMap {
        LatticeMap::new(self.matrix.transpose(), self.target.dual(), self.source.dual())
    }

    /// `<n, self(x)> = <pullback(n), x>`.
    pub fn pullback_functional(&self, n: &IntVector) -> Result<IntVector> {
        self.matrix.transpose().mul_vec(n)
    }

    /// Primitive generators of the kernel.
    pub fn kernel(&self) -> Vec<IntVector> {
        integer_kernel(&self.matrix)
    }

    /// Images of the generators of a cone, with zero images dropped.
    fn image_cone(&self, c: &Cone) -> Result<Cone> {
        let imgs = c.rays().iter().map(|r| self.apply(r)).collect::<Result<Vec<_>>>()?;
        let imgs: Vec<IntVector> = imgs.into_iter().filter(|v| !v.is_zero()).collect();
        if imgs.is_empty() {
            return Ok(Cone::zero(self.target_dim()));
        }
        Cone::new(&imgs, self.target_dim())
    }
}

/// Convex hull of the images of the vertices of `p`.
pub fn image_polytope(m: &LatticeMap, p: &Polytope) -> Result<Polytope> {
    if p.ambient_dim() != m.source_dim() {
        return Err(Error::DimensionMismatch {
            expected: m.source_dim(),
            found: p.ambient_dim(),
        });
    }
    let imgs = p
        .vertices()
        .iter()
        .map(|v| m.apply_rational(v))
        .collect::<Result<Vec<_>>>()?;
    Ok(hull(&imgs)?.with_lattice(m.target))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MorphismCheck {
    pub exists: bool,
    /// Rays (by source index) of a maximal cone whose image lies in no target cone.
    pub counterexample: Option<Vec<usize>>,
}

/// Does every cone of `source` map into some cone of `target`?
pub fn fan_morphism_exists(m: &LatticeMap, source: &Fan, target: &Fan) -> Result<MorphismCheck> {
    if source.ambient_dim() != m.source_dim() || target.ambient_dim() != m.target_dim() {
        return Err(Error::DimensionMismatch {
            expected: m.source_dim(),
            found: source.ambient_dim(),
        });
    }
    let images: Vec<IntVector> = source
        .rays()
        .iter()
        .map(|r| m.apply(r))
        .collect::<Result<_>>()?;
    let bad = source.maximal_cones().par_iter().find_first(|cone| {
        !target
            .cones()
            .iter()
            .any(|t| cone.iter().all(|&i| t.contains(&images[i])))
    });
    Ok(MorphismCheck {
        exists: bad.is_none(),
        counterexample: bad.cloned(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Covering {
    pub covered: bool,
    /// Cones of the target fan (as ray index sets) of the image's dimension lying in the image.
    pub pieces: Vec<Vec<usize>>,
    /// Maximal cones of the target fan meeting the image in its full dimension.
    pub meeting: Vec<usize>,
    #[serde(skip)]
    pub image_volume: Rational,
    #[serde(skip)]
    pub pieces_volume: Rational,
}

/// Is `m(c)` a union of cones of `f`?
///
/// The cones of `f` of the image's dimension that lie inside it are
/// interior-disjoint, so they cover it exactly when their volumes, cut off by
/// a hyperplane positive on the image, add up to that of the image.
pub fn image_is_union_of_cones(m: &LatticeMap, c: &Cone, source: &Fan, f: &Fan) -> Result<Covering> {
    let mut idx: Vec<usize> = c
        .rays()
        .iter()
        .map(|r| source.ray_index(r).ok_or(Error::ConeNotInFan))
        .collect::<Result<_>>()?;
    idx.sort_unstable();
    if source.all_cones().binary_search_by(|x| (x.len(), x).cmp(&(idx.len(), &idx))).is_err() {
        return Err(Error::ConeNotInFan);
    }
    let k = match m.image_cone(c) {
        Ok(k) => k,
        Err(Error::NotPointed) => {
            return Ok(Covering {
                covered: false,
                pieces: vec![],
                meeting: vec![],
                image_volume: Rational::zero(),
                pieces_volume: Rational::zero(),
            })
        }
        Err(e) => return Err(e),
    };
    let dim = k.dim();
    if dim == 0 {
        return Ok(Covering {
            covered: true,
            pieces: vec![vec![]],
            meeting: vec![],
            image_volume: Rational::zero(),
            pieces_volume: Rational::zero(),
        });
    }
    let lambda = k
        .facet_normals()
        .iter()
        .fold(IntVector::zeros(k.ambient_dim()), |acc, n| &acc + n);
    let coords = coordinate_choice(k.rays(), dim)
        .ok_or_else(|| Error::InvalidFan("image rays do not span the image".into()))?;

    let pieces: Vec<Vec<usize>> = f
        .all_cones()
        .par_iter()
        .filter(|s| s.len() >= dim && f.cone_dim(s) == dim)
        .filter(|s| s.iter().all(|&i| k.contains(&f.rays()[i])))
        .cloned()
        .collect();
    let image_volume = cone_volume(&k, &lambda, &coords)?;
    let piece_vols = pieces
        .par_iter()
        .map(|s| f.cone_of(s).and_then(|cone| cone_volume(&cone, &lambda, &coords)))
        .collect::<Result<Vec<_>>>()?;
    let pieces_volume: Rational = piece_vols.into_iter().sum();
    let meeting = f
        .cones()
        .iter()
        .enumerate()
        .filter(|(_, s)| k.intersect(s).map(|x| x.dim() == dim).unwrap_or(false))
        .map(|(i, _)| i)
        .collect();
    Ok(Covering {
        covered: pieces_volume == image_volume,
        pieces,
        meeting,
        image_volume,
        pieces_volume,
    })
}

/// Coordinates on which the linear span of `rays` projects isomorphically.
fn coordinate_choice(rays: &[IntVector], dim: usize) -> Option<Vec<usize>> {
    let d = rays.first()?.dim();
    let cols: Vec<IntVector> = (0..d)
        .map(|j| IntVector::new(rays.iter().map(|r| r[j].clone()).collect()))
        .collect();
    let chosen = independent_subset(&cols);
    (chosen.len() == dim).then_some(chosen)
}

/// Volume, up to a constant depending only on the span and coordinates, of
/// `{x in c : lambda(x) <= 1}`, via a pulling triangulation.
fn cone_volume(c: &Cone, lambda: &IntVector, coords: &[usize]) -> Result<Rational> {
    let mut total = Rational::zero();
    for simplex in pulling_triangulation(c)? {
        let mut rows = Vec::with_capacity(simplex.len());
        let mut denom = BigInt::from(1);
        for r in &simplex {
            let l = lambda.dot(r);
            if !l.is_positive() {
                return Err(Error::InvalidFan(format!("cross-section not positive on {r}")));
            }
            denom *= l;
            rows.push(coords.iter().map(|&j| r[j].clone()).collect::<Vec<_>>());
        }
        total += Rational::new(bareiss_det(rows).abs(), denom);
    }
    Ok(total)
}

/// Simplicial cones triangulating `c`: pull the first ray and recurse on the
/// facets not containing it.
pub fn pulling_triangulation(c: &Cone) -> Result<Vec<Vec<IntVector>>> {
    if c.is_simplicial() {
        return Ok(vec![c.rays().to_vec()]);
    }
    let apex = c.rays()[0].clone();
    let mut out = Vec::new();
    for facet in c.facet_ray_sets() {
        if facet.contains(&0) {
            continue;
        }
        let gens: Vec<IntVector> = facet.iter().map(|&i| c.rays()[i].clone()).collect();
        for mut s in pulling_triangulation(&Cone::new(&gens, c.ambient_dim())?)? {
            s.insert(0, apex.clone());
            out.push(s);
        }
    }
    Ok(out)
}

/// One two-dimensional section `W ∩ g` of a preimage wedge with a face.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Section {
    pub face: Vec<usize>,
    pub vertices: Vec<RationalVector>,
    pub dim: usize,
}

impl Section {
    /// A lattice point or a segment with lattice endpoints.
    pub fn is_lattice(&self) -> bool {
        self.dim <= 1 && self.vertices.iter().all(RationalVector::is_integral)
    }
}

/// Intersections of `{x : m(x) in R>=0 ell}` with the faces of `p` whose cones lie in `f`.
pub fn preimage_ray_sections(m: &LatticeMap, ell: &IntVector, f: &Fan, p: &Polytope) -> Result<Vec<Section>> {
    if ell.is_zero() {
        return Err(Error::ZeroVector);
    }
    let kernel = m.kernel();
    let rows: Vec<RationalVector> = m.matrix.row_vectors().iter().map(IntVector::to_rational).collect();
    let rhs: Vec<Rational> = ell.coords().iter().map(rat_int).collect();
    let x0 = solve_rational(&rows, &rhs, m.source_dim())
        .ok_or_else(|| Error::Infeasible(format!("{ell} has no preimage")))?;
    let x0 = clear_denominators(&x0);
    let mut basis = vec![x0];
    basis.extend(kernel);

    let faces: Vec<Face> = f
        .all_cones()
        .iter()
        .filter(|c| !c.is_empty())
        .map(|c| face_of_cone(f, p, c))
        .collect::<Result<_>>()?;
    let sections: Vec<Option<Section>> = faces
        .par_iter()
        .map(|g| section(&basis, g, p))
        .collect::<Result<_>>()?;
    Ok(sections.into_iter().flatten().collect())
}

fn section(basis: &[IntVector], g: &Face, p: &Polytope) -> Result<Option<Section>> {
    let t = basis.len();
    let mut ineqs = vec![Facet {
        normal: IntVector::unit(t, 0),
        offset: Rational::zero(),
    }];
    let mut eqs = Vec::new();
    let tight: BTreeSet<usize> = p
        .facets()
        .iter()
        .enumerate()
        .filter(|(_, fct)| g.vertices(p).all(|v| fct.slack(v).is_zero()))
        .map(|(i, _)| i)
        .collect();
    for (i, fct) in p.facets().iter().enumerate() {
        let normal = IntVector::new(basis.iter().map(|b| fct.normal.dot(b)).collect());
        let c = Facet {
            normal,
            offset: fct.offset.clone(),
        };
        if tight.contains(&i) {
            if c.normal.is_zero() {
                if !c.offset.is_zero() {
                    return Ok(None);
                }
            } else {
                eqs.push(c);
            }
        } else if c.normal.is_zero() {
            if c.offset.is_negative() {
                return Ok(None);
            }
        } else {
            ineqs.push(c);
        }
    }
    for e in p.equations() {
        let normal = IntVector::new(basis.iter().map(|b| e.normal.dot(b)).collect());
        if normal.is_zero() {
            if !e.offset.is_zero() {
                return Ok(None);
            }
        } else {
            eqs.push(Facet {
                normal,
                offset: e.offset.clone(),
            });
        }
    }
    let poly = match Polytope::from_constraints(&ineqs, &eqs, t) {
        Ok(q) => q,
        Err(Error::EmptyPolyhedron) => return Ok(None),
        Err(e) => return Err(e),
    };
    let vertices = poly
        .vertices()
        .iter()
        .map(|st| {
            let mut x = RationalVector::zeros(basis[0].dim());
            for (c, b) in st.coords().iter().zip(basis) {
                x = &x + &b.to_rational().scale(c);
            }
            x
        })
        .collect();
    Ok(Some(Section {
        face: g.vertex_indices.clone(),
        vertices,
        dim: poly.dim(),
    }))
}

/// The fan of all nonempty full-dimensional pieces `C2 ∩ m^{-1}(C1)` with
/// `C1` in `target` and `C2` in `source`. Every ray must pass through a
/// lattice point of `p`.
pub fn intersection_fan(m: &LatticeMap, target: &Fan, source: &Fan, p: &Polytope) -> Result<Fan> {
    let pulled: Vec<(Vec<IntVector>, Vec<IntVector>)> = target
        .cones()
        .iter()
        .map(|c1| {
            let ineqs = c1
                .facet_normals()
                .iter()
                .map(|n| m.pullback_functional(n))
                .collect::<Result<Vec<_>>>()?;
            let eqs = c1
                .equations()
                .iter()
                .map(|e| m.pullback_functional(e))
                .collect::<Result<Vec<_>>>()?;
            Ok((ineqs, eqs))
        })
        .collect::<Result<_>>()?;
    let jobs: Vec<(usize, usize)> = (0..source.maximal_cones().len())
        .flat_map(|j| (0..target.maximal_cones().len()).map(move |i| (j, i)))
        .collect();
    let pieces: Vec<Option<Vec<IntVector>>> = jobs
        .par_iter()
        .map(|&(j, i)| {
            let c2 = &source.cones()[j];
            let (ineqs, eqs) = &pulled[i];
            // Some pulled-back facet must not be negative on all of c2.
            if ineqs
                .iter()
                .any(|n| c2.rays().iter().all(|r| n.dot(r).is_negative()))
            {
                return Ok(None);
            }
            let mut all_ineqs = c2.facet_normals().to_vec();
            all_ineqs.extend(ineqs.iter().cloned());
            let mut all_eqs = c2.equations().to_vec();
            all_eqs.extend(eqs.iter().cloned());
            let piece = Cone::from_inequalities(&all_ineqs, &all_eqs, source.ambient_dim())?;
            Ok((piece.dim() == c2.dim()).then(|| piece.rays().to_vec()))
        })
        .collect::<Result<_>>()?;

    let mut ray_ids: BTreeMap<IntVector, usize> = BTreeMap::new();
    let mut cone_sets: BTreeSet<Vec<IntVector>> = BTreeSet::new();
    for mut rays in pieces.into_iter().flatten() {
        rays.sort();
        for r in &rays {
            ray_ids.entry(r.clone()).or_insert(0);
        }
        cone_sets.insert(rays);
    }
    let rays: Vec<IntVector> = ray_ids.keys().cloned().collect();
    for (i, r) in rays.iter().enumerate() {
        ray_ids.insert(r.clone(), i);
        if !p.contains_int(r)? {
            return Err(Error::InvalidFan(format!("ray {r} is not over a lattice point")));
        }
    }
    let cones: Vec<Vec<usize>> = cone_sets
        .iter()
        .map(|s| s.iter().map(|r| ray_ids[r]).collect())
        .collect();
    let fan = Fan::new(source.ambient_dim(), rays, cones)?;
    fan.validate()?;
    Ok(fan)
}

/// The map `L'` on the target with `L' m = m L`, if `L` preserves the kernel of `m`
/// and `L'` is integral.
pub fn symmetry_descends(l: &LatticeMap, m: &LatticeMap) -> Result<LatticeMap> {
    let ml = m.matrix.mul(&l.matrix)?;
    let rows: Vec<RationalVector> = m.matrix.row_vectors().iter().map(IntVector::to_rational).collect();
    let n = m.target_dim();
    let mut cols: Vec<IntVector> = Vec::with_capacity(n);
    for i in 0..n {
        let e: Vec<Rational> = (0..n).map(|j| if i == j { Rational::from_integer(1.into()) } else { Rational::zero() }).collect();
        let s = solve_rational(&rows, &e, m.source_dim())
            .ok_or_else(|| Error::NoDescent("map is not surjective".into()))?;
        let col = ml.mul_rational_vec(&s)?;
        let col = col
            .to_integer()
            .ok_or_else(|| Error::NoDescent(format!("descended column {col} is not integral")))?;
        cols.push(col);
    }
    let lp = IntegerMatrix::from_rows(&cols)?.transpose();
    if lp.mul(&m.matrix)? != ml {
        return Err(Error::NoDescent("kernel is not preserved".into()));
    }
    Ok(LatticeMap::new(lp, m.target, m.target))
}

/// Does `l` send the set of maximal cones of `f` to itself?
pub fn permutes_maximal_cones(l: &LatticeMap, f: &Fan) -> Result<bool> {
    let images: Vec<Option<usize>> = f
        .rays()
        .iter()
        .map(|r| Ok(f.ray_index(&l.apply(r)?)))
        .collect::<Result<_>>()?;
    let cones: BTreeSet<&Vec<usize>> = f.maximal_cones().iter().collect();
    Ok(f.maximal_cones().iter().all(|c| {
        let mut img: Vec<usize> = match c.iter().map(|&i| images[i]).collect::<Option<Vec<_>>>() {
            Some(v) => v,
            None => return false,
        };
        img.sort_unstable();
        cones.contains(&img)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::face_fan;

    fn square() -> Polytope {
        Polytope::from_integer_points(&[
            IntVector::from_i64s(&[-1, -1]),
            IntVector::from_i64s(&[-1, 1]),
            IntVector::from_i64s(&[1, -1]),
            IntVector::from_i64s(&[1, 1]),
        ])
        .unwrap()
    }

    #[test]
    fn identity_morphism() {
        let f = face_fan(&square()).unwrap();
        let id = LatticeMap::identity(2, LatticeTag::N);
        assert!(fan_morphism_exists(&id, &f, &f).unwrap().exists);
        assert_eq!(image_polytope(&id, &square()).unwrap(), square());
    }

    #[test]
    fn quadrant_does_not_cover_upper_cone() {
        let p = square();
        let f = face_fan(&p).unwrap();
        let q = Fan::new(
            2,
            vec![IntVector::from_i64s(&[1, 0]), IntVector::from_i64s(&[0, 1])],
            vec![vec![0, 1]],
        )
        .unwrap();
        let id = LatticeMap::identity(2, LatticeTag::N);
        let upper = Cone::new(&[IntVector::from_i64s(&[1, 1]), IntVector::from_i64s(&[-1, 1])], 2).unwrap();
        assert!(!image_is_union_of_cones(&id, &upper, &f, &q).unwrap().covered);
        let whole = image_is_union_of_cones(&id, &upper, &f, &f).unwrap();
        assert!(whole.covered);
        assert_eq!(whole.pieces.len(), 1);
    }

    #[test]
    fn refined_square_covers() {
        let p = square();
        let f = face_fan(&p).unwrap();
        let rays: Vec<IntVector> = [[1, 0], [1, 1], [0, 1], [-1, 1], [-1, 0], [-1, -1], [0, -1], [1, -1]]
            .iter()
            .map(|r| IntVector::from_i64s(r))
            .collect();
        let fine = Fan::new(2, rays, (0..8).map(|i| vec![i, (i + 1) % 8]).collect()).unwrap();
        let id = LatticeMap::identity(2, LatticeTag::N);
        for c in f.cones() {
            let cov = image_is_union_of_cones(&id, c, &f, &fine).unwrap();
            assert!(cov.covered);
            assert_eq!(cov.pieces.len(), 2);
        }
        let bogus = Cone::new(&[IntVector::from_i64s(&[1, 0]), IntVector::from_i64s(&[0, 1])], 2).unwrap();
        assert_eq!(image_is_union_of_cones(&id, &bogus, &f, &fine), Err(Error::ConeNotInFan));
    }

    #[test]
    fn projection_sections() {
        // Projection of the square onto the first axis.
        let p = square();
        let f = face_fan(&p).unwrap();
        let m = LatticeMap::new(IntegerMatrix::from_i64_rows(&[&[1, 0]]).unwrap(), LatticeTag::NPrime, LatticeTag::N);
        let secs = preimage_ray_sections(&m, &IntVector::from_i64s(&[1]), &f, &p).unwrap();
        assert!(secs.iter().all(Section::is_lattice));
        assert!(secs.iter().any(|s| s.dim == 1));
        assert_eq!(preimage_ray_sections(&m, &IntVector::from_i64s(&[0]), &f, &p), Err(Error::ZeroVector));
    }

    #[test]
    fn swap_descends_through_identity() {
        let id = LatticeMap::identity(2, LatticeTag::N);
        let swap = LatticeMap::new(IntegerMatrix::from_i64_rows(&[&[0, 1], &[1, 0]]).unwrap(), LatticeTag::N, LatticeTag::N);
        assert_eq!(symmetry_descends(&swap, &id).unwrap().matrix, swap.matrix);
        let f = face_fan(&square()).unwrap();
        assert!(permutes_maximal_cones(&swap, &f).unwrap());
    }

    #[test]
    fn kernel_must_be_preserved() {
        let m = LatticeMap::new(IntegerMatrix::from_i64_rows(&[&[1, 0]]).unwrap(), LatticeTag::NPrime, LatticeTag::N);
        let swap = LatticeMap::new(
            IntegerMatrix::from_i64_rows(&[&[0, 1], &[1, 0]]).unwrap(),
            LatticeTag::NPrime,
            LatticeTag::NPrime,
        );
        assert!(matches!(symmetry_descends(&swap, &m), Err(Error::NoDescent(_))));
    }
}
