use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::Fan;
use crate::error::{Error, Result};
use crate::lattice::{rank, rat_int, solve_rational, IntVector, Rational, RationalVector};
use crate::polytope::{Face, Facet, Polytope};

/// A function on the support of a fan, linear on each cone, given by its
/// values on the ray generators.
#[derive(Clone, Debug)]
pub struct PlFunction<'a> {
    fan: &'a Fan,
    values: Vec<Rational>,
}

/// Outcome of a convexity test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Convexity {
    pub convex: bool,
    pub strict: bool,
    /// Per maximal cone, the least value of `phi(r) + <m_sigma, r>` over the
    /// compared rays outside the cone (`None` when nothing was compared).
    #[serde(skip)]
    pub margins: Vec<Option<Rational>>,
    /// First failing maximal cone, if any.
    pub witness: Option<usize>,
}

impl<'a> PlFunction<'a> {
    pub fn new(fan: &'a Fan, values: Vec<Rational>) -> Result<Self> {
        if values.len() != fan.rays().len() {
            return Err(Error::DimensionMismatch {
                expected: fan.rays().len(),
                found: values.len(),
            });
        }
        Ok(PlFunction { fan, values })
    }

    pub fn from_map(fan: &'a Fan, map: &BTreeMap<IntVector, Rational>) -> Result<Self> {
        let values = fan
            .rays()
            .iter()
            .map(|r| {
                map.get(r)
                    .cloned()
                    .ok_or_else(|| Error::InvalidFan(format!("no value for ray {r}")))
            })
            .collect::<Result<_>>()?;
        Ok(PlFunction { fan, values })
    }

    pub fn from_fn(fan: &'a Fan, f: impl Fn(&IntVector) -> Rational) -> Self {
        let values = fan.rays().iter().map(f).collect();
        PlFunction { fan, values }
    }

    pub fn fan(&self) -> &'a Fan {
        self.fan
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn to_map(&self) -> BTreeMap<IntVector, Rational> {
        self.fan
            .rays()
            .iter()
            .cloned()
            .zip(self.values.iter().cloned())
            .collect()
    }

    /// Solves `<m, r> = -phi(r)` on the rays of a cone. `None` when the
    /// function is not linear on the cone.
    fn solve_piece(&self, ray_indices: &[usize]) -> Option<RationalVector> {
        let rows: Vec<RationalVector> = ray_indices
            .iter()
            .map(|&i| self.fan.rays()[i].to_rational())
            .collect();
        let rhs: Vec<Rational> = ray_indices.iter().map(|&i| -&self.values[i]).collect();
        solve_rational(&rows, &rhs, self.fan.ambient_dim())
    }

    /// The linear functional `m_sigma` on a full-dimensional maximal cone.
    ///
    /// `Ok(None)` when the ray values are not those of a linear function;
    /// an error when the cone is not full-dimensional.
    pub fn linear_piece(&self, cone: usize) -> Result<Option<RationalVector>> {
        let idx = &self.fan.maximal_cones()[cone];
        let gens: Vec<IntVector> = idx.iter().map(|&i| self.fan.rays()[i].clone()).collect();
        if rank(&gens) != self.fan.ambient_dim() {
            return Err(Error::DegenerateCone(idx.clone()));
        }
        Ok(self.solve_piece(idx))
    }

    /// Value at an arbitrary point of the support.
    pub fn evaluate(&self, x: &IntVector) -> Result<Rational> {
        if x.is_zero() {
            return Ok(Rational::zero());
        }
        let p = x.primitive()?;
        if let Some(i) = self.fan.ray_index(&p) {
            return Ok(&self.values[i] * rat_int(&x.content()));
        }
        for (k, cone) in self.fan.cones().iter().enumerate() {
            if cone.contains(x) {
                let m = self
                    .solve_piece(&self.fan.maximal_cones()[k])
                    .ok_or_else(|| Error::DegenerateCone(self.fan.maximal_cones()[k].clone()))?;
                return Ok(-x.dot_rational(&m));
            }
        }
        Err(Error::OutsideSupport(format!("{x}")))
    }

    /// Convexity against every ray of a fan whose maximal cones are full-dimensional.
    pub fn convexity(&self) -> Result<Convexity> {
        let all: Vec<usize> = (0..self.fan.rays().len()).collect();
        let per_cone: Vec<Result<(bool, Option<Rational>)>> = (0..self.fan.maximal_cones().len())
            .into_par_iter()
            .map(|k| {
                let m = match self.linear_piece(k)? {
                    Some(m) => m,
                    None => return Ok((false, None)),
                };
                Ok((true, self.margin(&m, k, &all)))
            })
            .collect();
        summarize(per_cone)
    }

    /// Convexity relative to a coarser fan: each maximal cone is compared only
    /// with the rays lying in a base cone that contains it. Cones need not be
    /// full-dimensional.
    pub fn relative_convexity(&self, base: &Fan) -> Result<Convexity> {
        let parents = self.fan.parents_in(base)?;
        let rays_in_base: Vec<Vec<usize>> = base
            .cones()
            .iter()
            .map(|b| (0..self.fan.rays().len()).filter(|&i| b.contains(&self.fan.rays()[i])).collect())
            .collect();
        self.relative_convexity_with(&parents, &rays_in_base, None)
    }

    /// As [`PlFunction::relative_convexity`], with precomputed parents and
    /// per-base-cone ray lists, optionally restricted to some base cones.
    pub(crate) fn relative_convexity_with(
        &self,
        parents: &[usize],
        rays_in_base: &[Vec<usize>],
        only_bases: Option<&[usize]>,
    ) -> Result<Convexity> {
        let per_cone: Vec<Result<(bool, Option<Rational>)>> = (0..self.fan.maximal_cones().len())
            .into_par_iter()
            .map(|k| {
                if let Some(b) = only_bases {
                    if !b.contains(&parents[k]) {
                        return Ok((true, None));
                    }
                }
                let m = match self.solve_piece(&self.fan.maximal_cones()[k]) {
                    Some(m) => m,
                    None => return Ok((false, None)),
                };
                Ok((true, self.margin(&m, k, &rays_in_base[parents[k]])))
            })
            .collect();
        summarize(per_cone)
    }

    fn margin(&self, m: &RationalVector, cone: usize, candidates: &[usize]) -> Option<Rational> {
        let own = &self.fan.maximal_cones()[cone];
        candidates
            .iter()
            .filter(|i| own.binary_search(i).is_err())
            .map(|&i| &self.values[i] + self.fan.rays()[i].dot_rational(m))
            .min()
    }

    pub fn is_convex(&self) -> Result<bool> {
        Ok(self.convexity()?.convex)
    }

    pub fn is_strictly_convex(&self) -> Result<bool> {
        Ok(self.convexity()?.strict)
    }

    /// `{u : <u, r> >= -phi(r) for every ray r}`.
    pub fn newton_polytope(&self) -> Result<Polytope> {
        let ineqs: Vec<Facet> = self
            .fan
            .rays()
            .iter()
            .zip(&self.values)
            .map(|(r, v)| Facet {
                normal: r.clone(),
                offset: v.clone(),
            })
            .collect();
        Polytope::from_constraints(&ineqs, &[], self.fan.ambient_dim())
    }
}

fn summarize(per_cone: Vec<Result<(bool, Option<Rational>)>>) -> Result<Convexity> {
    let mut convex = true;
    let mut strict = true;
    let mut witness = None;
    let mut margins = Vec::with_capacity(per_cone.len());
    for (k, r) in per_cone.into_iter().enumerate() {
        let (linear, margin) = r?;
        let ok = linear && margin.as_ref().is_none_or(|m| !m.is_negative());
        let ok_strict = linear && margin.as_ref().is_none_or(|m| m.is_positive());
        if !ok {
            convex = false;
        }
        if !ok_strict {
            strict = false;
            witness.get_or_insert(k);
        }
        margins.push(margin);
    }
    Ok(Convexity {
        convex,
        strict: strict && convex,
        margins,
        witness,
    })
}

/// Lattice points of a Newton polytope split by their behaviour on the torus
/// orbit of the cone over a face.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitSections {
    pub nonvanishing: Vec<IntVector>,
    pub vanishing: Vec<IntVector>,
}

/// `z^m` is nowhere zero on the orbit of `cone(f)` exactly when
/// `<m, v> = -phi(v)` for every vertex `v` of `f`; otherwise it vanishes there.
pub fn orbit_section_analysis(
    p: &Polytope,
    f: &Face,
    newt: &Polytope,
    phi: &PlFunction,
) -> Result<OrbitSections> {
    let verts: Vec<(IntVector, Rational)> = f
        .vertices(p)
        .map(|v| {
            let v = v
                .to_integer()
                .ok_or_else(|| Error::InvalidFan(format!("vertex {v} is not a lattice point")))?;
            let val = phi.evaluate(&v)?;
            Ok((v, val))
        })
        .collect::<Result<_>>()?;
    let mut out = OrbitSections {
        nonvanishing: vec![],
        vanishing: vec![],
    };
    for m in newt.lattice_points() {
        let tight = verts.iter().all(|(v, val)| rat_int(&m.dot(v)) == -val);
        if tight {
            out.nonvanishing.push(m);
        } else {
            out.vanishing.push(m);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::face_fan;
    use crate::lattice::rat;
    use crate::polytope::hull;

    fn square() -> Polytope {
        hull(
            &[[-1, -1], [-1, 1], [1, -1], [1, 1]]
                .iter()
                .map(|r| IntVector::from_i64s(r).to_rational())
                .collect::<Vec<_>>(),
        )
        .unwrap()
    }

    #[test]
    fn support_function_of_square() {
        let p = square();
        let f = face_fan(&p).unwrap();
        let phi = PlFunction::from_fn(&f, |_| rat(1, 1));
        assert!(phi.is_strictly_convex().unwrap());
        assert_eq!(phi.newton_polytope().unwrap(), p.dual().unwrap());
    }

    #[test]
    fn linear_function_is_convex_not_strict() {
        let f = face_fan(&square()).unwrap();
        let phi = PlFunction::from_fn(&f, |r| rat_int(&(&r[0] * 3 - &r[1])));
        let c = phi.convexity().unwrap();
        assert!(c.convex);
        assert!(!c.strict);
    }

    #[test]
    fn zero_function_newton_polytope_is_origin() {
        let f = face_fan(&square()).unwrap();
        let phi = PlFunction::from_fn(&f, |_| Rational::zero());
        let n = phi.newton_polytope().unwrap();
        assert_eq!(n.vertices(), &[RationalVector::zeros(2)]);
    }

    #[test]
    fn concave_function_fails() {
        let f = face_fan(&square()).unwrap();
        let phi = PlFunction::from_fn(&f, |_| rat(-1, 1));
        assert!(!phi.is_convex().unwrap());
    }

    #[test]
    fn empty_face_is_open_torus() {
        let p = square();
        let f = face_fan(&p).unwrap();
        let phi = PlFunction::from_fn(&f, |_| rat(1, 1));
        let newt = phi.newton_polytope().unwrap();
        let empty = Face {
            vertex_indices: vec![],
            dim: -1,
        };
        let s = orbit_section_analysis(&p, &empty, &newt, &phi).unwrap();
        assert_eq!(s.nonvanishing.len(), newt.lattice_points().len());
        assert!(s.vanishing.is_empty());
    }
}
