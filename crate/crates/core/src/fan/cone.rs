use std::collections::{BTreeSet, VecDeque};

use num_traits::{Signed, Zero};

use crate::dd::{extreme_rays, facets_of_generators};
use crate::error::{Error, Result};
use crate::lattice::{rank, IntVector, RationalVector};

/// A pointed rational polyhedral cone with primitive ray generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone {
    ambient_dim: usize,
    rays: Vec<IntVector>,
    facet_normals: Vec<IntVector>,
    equations: Vec<IntVector>,
}

impl Cone {
    /// The cone generated by `generators`. Redundant and zero generators are
    /// dropped; the surviving rays keep their input order.
    pub fn new(generators: &[IntVector], ambient_dim: usize) -> Result<Cone> {
        if let Some(g) = generators.iter().find(|g| g.dim() != ambient_dim) {
            return Err(Error::DimensionMismatch {
                expected: ambient_dim,
                found: g.dim(),
            });
        }
        let mut prims: Vec<IntVector> = Vec::new();
        for g in generators {
            if let Ok(p) = g.primitive() {
                if !prims.contains(&p) {
                    prims.push(p);
                }
            }
        }
        let (facet_normals, equations) = facets_of_generators(&prims, ambient_dim);
        let mut all = facet_normals.clone();
        all.extend(equations.iter().cloned());
        if rank(&all) != ambient_dim {
            return Err(Error::NotPointed);
        }
        let dim = ambient_dim - equations.len();
        let rays = prims
            .into_iter()
            .filter(|g| {
                let mut tight = equations.clone();
                tight.extend(facet_normals.iter().filter(|n| n.dot(g).is_zero()).cloned());
                rank(&tight) + 1 == ambient_dim && dim > 0
            })
            .collect();
        Ok(Cone {
            ambient_dim,
            rays,
            facet_normals,
            equations,
        })
    }

    /// `{x : a.x >= 0, e.x = 0}`; must be pointed.
    pub fn from_inequalities(ineqs: &[IntVector], eqs: &[IntVector], ambient_dim: usize) -> Result<Cone> {
        let d = extreme_rays(ineqs, eqs, ambient_dim);
        if !d.lineality.is_empty() {
            return Err(Error::NotPointed);
        }
        Cone::new(&d.rays, ambient_dim)
    }

    pub fn zero(ambient_dim: usize) -> Cone {
        Cone {
            ambient_dim,
            rays: vec![],
            facet_normals: vec![],
            equations: (0..ambient_dim).map(|i| IntVector::unit(ambient_dim, i)).collect(),
        }
    }

    pub fn rays(&self) -> &[IntVector] {
        &self.rays
    }

    pub fn facet_normals(&self) -> &[IntVector] {
        &self.facet_normals
    }

    pub fn equations(&self) -> &[IntVector] {
        &self.equations
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.ambient_dim - self.equations.len()
    }

    pub fn is_simplicial(&self) -> bool {
        self.rays.len() == self.dim()
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn contains(&self, x: &IntVector) -> bool {
        self.equations.iter().all(|e| e.dot(x).is_zero())
            && self.facet_normals.iter().all(|n| !n.dot(x).is_negative())
    }

    pub fn contains_rational(&self, x: &RationalVector) -> bool {
        self.equations.iter().all(|e| e.dot_rational(x).is_zero())
            && self
                .facet_normals
                .iter()
                .all(|n| !n.dot_rational(x).is_negative())
    }

    pub fn relative_interior_contains(&self, x: &IntVector) -> bool {
        self.equations.iter().all(|e| e.dot(x).is_zero())
            && self.facet_normals.iter().all(|n| n.dot(x).is_positive())
    }

    pub fn span_contains(&self, x: &IntVector) -> bool {
        self.equations.iter().all(|e| e.dot(x).is_zero())
    }

    pub fn contains_cone(&self, other: &Cone) -> bool {
        other.rays.iter().all(|r| self.contains(r))
    }

    pub fn intersect(&self, other: &Cone) -> Result<Cone> {
        let mut ineqs = self.facet_normals.clone();
        ineqs.extend(other.facet_normals.iter().cloned());
        let mut eqs = self.equations.clone();
        eqs.extend(other.equations.iter().cloned());
        Cone::from_inequalities(&ineqs, &eqs, self.ambient_dim)
    }

    /// Ray indices on each facet, in facet order.
    pub fn facet_ray_sets(&self) -> Vec<Vec<usize>> {
        self.facet_normals
            .iter()
            .map(|n| (0..self.rays.len()).filter(|&i| n.dot(&self.rays[i]).is_zero()).collect())
            .collect()
    }

    /// All faces as sorted ray index sets, from the apex to the cone itself.
    pub fn face_ray_sets(&self) -> Vec<Vec<usize>> {
        let incid: Vec<BTreeSet<usize>> = self
            .facet_ray_sets()
            .into_iter()
            .map(|v| v.into_iter().collect())
            .collect();
        let top: BTreeSet<usize> = (0..self.rays.len()).collect();
        let mut seen = BTreeSet::from([top.clone()]);
        let mut queue = VecDeque::from([top]);
        while let Some(f) = queue.pop_front() {
            for inc in &incid {
                let g: BTreeSet<usize> = f.intersection(inc).copied().collect();
                if g != f && seen.insert(g.clone()) {
                    queue.push_back(g);
                }
            }
        }
        let mut out: Vec<Vec<usize>> = seen.into_iter().map(|s| s.into_iter().collect()).collect();
        out.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
        out
    }

    /// Is the cone spanned by these rays a face? Indices must be sorted.
    pub fn is_face(&self, ray_subset: &[usize]) -> bool {
        let normals: Vec<&IntVector> = self
            .facet_normals
            .iter()
            .filter(|n| ray_subset.iter().all(|&i| n.dot(&self.rays[i]).is_zero()))
            .collect();
        let closure: Vec<usize> = (0..self.rays.len())
            .filter(|&i| normals.iter().all(|n| n.dot(&self.rays[i]).is_zero()))
            .collect();
        closure == ray_subset
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(v: &[i64]) -> IntVector {
        IntVector::from_i64s(v)
    }

    #[test]
    fn redundant_generators_are_dropped() {
        let c = Cone::new(&[iv(&[1, 0]), iv(&[1, 1]), iv(&[0, 1]), iv(&[2, 0])], 2).unwrap();
        assert_eq!(c.rays(), &[iv(&[1, 0]), iv(&[0, 1])]);
        assert!(c.is_simplicial());
    }

    #[test]
    fn lines_are_rejected() {
        assert!(matches!(
            Cone::new(&[iv(&[1, 0]), iv(&[-1, 0])], 2),
            Err(Error::NotPointed)
        ));
    }

    #[test]
    fn square_cone_faces() {
        let c = Cone::new(&[iv(&[1, 1, 1]), iv(&[1, -1, 1]), iv(&[-1, -1, 1]), iv(&[-1, 1, 1])], 3).unwrap();
        assert!(!c.is_simplicial());
        assert_eq!(c.face_ray_sets().len(), 10);
        assert!(c.is_face(&[0, 1]));
        assert!(!c.is_face(&[0, 2]));
    }

    #[test]
    fn intersection_of_quadrant_cones() {
        let a = Cone::new(&[iv(&[1, 0]), iv(&[1, 2])], 2).unwrap();
        let b = Cone::new(&[iv(&[1, 1]), iv(&[0, 1])], 2).unwrap();
        let i = a.intersect(&b).unwrap();
        assert_eq!(i.rays(), &[iv(&[1, 1]), iv(&[1, 2])]);
    }
}
