//! Star subdivisions, crepant refinements by pulling, and projectivity certificates.

pub mod feasibility;

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fan::{Cone, Convexity, Fan, PlFunction};
use crate::lattice::{
    express_in_basis, independent_subset, rank, rat, solve_rational, IntVector, Rational, RationalPair,
    RationalVector,
};
use crate::polytope::Polytope;
use feasibility::{feasible_point, Constraint};

/// A strictly convex piecewise linear function witnessing that a fan is
/// projective, either outright or relative to a coarser fan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubdivisionCertificate {
    pub ray_values: BTreeMap<IntVector, Rational>,
    /// Per maximal cone of the certified fan, the least strictness margin.
    pub margins: Vec<Option<Rational>>,
    /// Whether the margins were taken only within cones of a coarser fan.
    pub relative: bool,
}

impl SubdivisionCertificate {
    fn from_check(phi: &PlFunction, c: Convexity, relative: bool) -> Result<Self> {
        if !c.strict {
            return Err(Error::Infeasible(format!(
                "function is not strictly convex on maximal cone {:?}",
                c.witness
            )));
        }
        Ok(SubdivisionCertificate {
            ray_values: phi.to_map(),
            margins: c.margins,
            relative,
        })
    }

    pub fn function<'a>(&self, fan: &'a Fan) -> Result<PlFunction<'a>> {
        PlFunction::from_map(fan, &self.ray_values)
    }

    /// Least margin over all cones.
    pub fn min_margin(&self) -> Option<Rational> {
        self.margins.iter().flatten().min().cloned()
    }

    pub fn to_json(&self) -> Value {
        let values: serde_json::Map<String, Value> = self
            .ray_values
            .iter()
            .map(|(r, v)| (r.to_string(), serde_json::to_value(RationalPair(v)).expect("serializable")))
            .collect();
        json!({ "ray_values": values })
    }

    /// Re-verifies strict convexity on `fan`, relative to `base` if given.
    pub fn verify(&self, fan: &Fan, base: Option<&Fan>) -> Result<bool> {
        let phi = self.function(fan)?;
        let c = match base {
            Some(b) => phi.relative_convexity(b)?,
            None => phi.convexity()?,
        };
        Ok(c.strict)
    }
}

/// Replaces every cone containing `ell` by the joins of `ell` with its facets
/// not containing `ell`.
pub fn star_subdivide(f: &Fan, ell: &IntVector) -> Result<Fan> {
    let l = ell.primitive()?;
    if f.ray_index(&l).is_some() {
        return Err(Error::AlreadyRay(l.to_string()));
    }
    if !f.support_contains(&l) {
        return Err(Error::OutsideSupport(l.to_string()));
    }
    let mut rays = f.rays().to_vec();
    rays.push(l.clone());
    let new = rays.len() - 1;
    let mut cones = Vec::new();
    for (idx, cone) in f.maximal_cones().iter().zip(f.cones()) {
        if !cone.contains(&l) {
            cones.push(idx.clone());
            continue;
        }
        for (n, facet) in cone.facet_normals().iter().zip(cone.facet_ray_sets()) {
            if n.dot(&l).is_positive() {
                let mut c: Vec<usize> = facet.iter().map(|&i| idx[i]).collect();
                c.push(new);
                cones.push(c);
            }
        }
    }
    Fan::new(f.ambient_dim(), rays, cones)
}

/// Nonzero lattice points of `p` on the boundary and in `|f|`, primitive, in
/// lexicographic order.
pub fn crepant_points(f: &Fan, p: &Polytope) -> Vec<IntVector> {
    let mut seen = BTreeSet::new();
    p.boundary_lattice_points()
        .into_par_iter()
        .filter(|x| !x.is_zero() && f.support_contains(x))
        .collect::<Vec<_>>()
        .into_iter()
        .filter_map(|x| x.primitive().ok())
        .filter(|x| seen.insert(x.clone()))
        .collect()
}

struct Piece {
    rays: Vec<usize>,
    cone: Cone,
    parent: usize,
    m: RationalVector,
}

/// Pulling refinement with heights: each pulled point gets the current value
/// lowered by some `eps`, halved until the function stays strictly convex.
struct Refiner<'a> {
    dim: usize,
    rays: Vec<IntVector>,
    values: Vec<Rational>,
    pieces: Vec<Piece>,
    base: Option<&'a Fan>,
    /// Ray indices lying in each base cone (a single list when not relative).
    base_rays: Vec<Vec<usize>>,
}

fn solve_m(rays: &[IntVector], values: &[Rational], idx: &[usize], dim: usize) -> Option<RationalVector> {
    let rows: Vec<RationalVector> = idx.iter().map(|&i| rays[i].to_rational()).collect();
    let rhs: Vec<Rational> = idx.iter().map(|&i| -&values[i]).collect();
    solve_rational(&rows, &rhs, dim)
}

impl<'a> Refiner<'a> {
    fn new(f: &Fan, start: &PlFunction, base: Option<&'a Fan>) -> Result<Self> {
        let dim = f.ambient_dim();
        let rays = f.rays().to_vec();
        let values = start.values().to_vec();
        let (parents, base_rays) = match base {
            Some(b) => {
                let parents = f.parents_in(b)?;
                let lists = b
                    .cones()
                    .iter()
                    .map(|c| (0..rays.len()).filter(|&i| c.contains(&rays[i])).collect())
                    .collect();
                (parents, lists)
            }
            None => (vec![0; f.maximal_cones().len()], vec![(0..rays.len()).collect()]),
        };
        let pieces = f
            .maximal_cones()
            .iter()
            .zip(f.cones())
            .zip(parents)
            .map(|((idx, cone), parent)| {
                let m = solve_m(&rays, &values, idx, dim)
                    .ok_or_else(|| Error::Infeasible(format!("start function not linear on {idx:?}")))?;
                Ok(Piece {
                    rays: idx.clone(),
                    cone: cone.clone(),
                    parent,
                    m,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let r = Refiner {
            dim,
            rays,
            values,
            pieces,
            base,
            base_rays,
        };
        let bad = (0..r.pieces.len()).into_par_iter().find_any(|&k| {
            let p = &r.pieces[k];
            !r.strict_on(&p.rays, &p.m, &r.base_rays[p.parent], &r.values)
        });
        if let Some(k) = bad {
            return Err(Error::Infeasible(format!(
                "start function not strictly convex on {:?}",
                r.pieces[k].rays
            )));
        }
        Ok(r)
    }

    fn strict_on(&self, own: &[usize], m: &RationalVector, candidates: &[usize], values: &[Rational]) -> bool {
        candidates
            .iter()
            .filter(|i| own.binary_search(i).is_err())
            .all(|&i| (&values[i] + self.rays[i].dot_rational(m)).is_positive())
    }

    fn pull(&mut self, ell: &IntVector) -> Result<()> {
        let existing = self.rays.iter().position(|r| r == ell);
        let containing: Vec<usize> = (0..self.pieces.len())
            .filter(|&k| self.pieces[k].cone.contains(ell))
            .collect();
        if containing.is_empty() {
            return Err(Error::OutsideSupport(ell.to_string()));
        }
        if existing.is_some() && containing.iter().all(|&k| self.pieces[k].cone.is_simplicial()) {
            return Ok(());
        }
        let idx = match existing {
            Some(i) => i,
            None => {
                self.rays.push(ell.clone());
                let m = &self.pieces[containing[0]].m;
                self.values.push(-ell.dot_rational(m));
                let i = self.rays.len() - 1;
                match self.base {
                    Some(b) => {
                        for (list, c) in self.base_rays.iter_mut().zip(b.cones()) {
                            if c.contains(ell) {
                                list.push(i);
                            }
                        }
                    }
                    None => self.base_rays[0].push(i),
                }
                i
            }
        };
        let mut replaced: Vec<(Vec<usize>, Cone, usize)> = Vec::new();
        for &k in &containing {
            let p = &self.pieces[k];
            if p.cone.is_simplicial() && p.rays.contains(&idx) {
                replaced.push((p.rays.clone(), p.cone.clone(), p.parent));
                continue;
            }
            let local: Vec<usize> = p
                .cone
                .rays()
                .iter()
                .map(|r| self.rays.iter().position(|x| x == r).expect("known ray"))
                .collect();
            for (n, facet) in p.cone.facet_normals().iter().zip(p.cone.facet_ray_sets()) {
                if n.dot(ell).is_positive() {
                    let mut c: Vec<usize> = facet.iter().map(|&i| local[i]).collect();
                    c.push(idx);
                    c.sort_unstable();
                    let gens: Vec<IntVector> = c.iter().map(|&i| self.rays[i].clone()).collect();
                    replaced.push((c, Cone::new(&gens, self.dim)?, p.parent));
                }
            }
        }
        let touched: BTreeSet<usize> = containing.iter().map(|&k| self.pieces[k].parent).collect();
        let untouched: Vec<usize> = (0..self.pieces.len())
            .filter(|k| containing.binary_search(k).is_err())
            .collect();
        let h0 = self.values[idx].clone();
        let mut eps = rat(1, 2);
        for _ in 0..200 {
            let mut values = self.values.clone();
            values[idx] = &h0 - &eps;
            let ms: Option<Vec<RationalVector>> = replaced
                .par_iter()
                .map(|(c, _, _)| solve_m(&self.rays, &values, c, self.dim))
                .collect();
            let ok = ms.as_ref().is_some_and(|ms| {
                replaced
                    .par_iter()
                    .zip(ms)
                    .all(|((c, _, parent), m)| self.strict_on(c, m, &self.base_rays[*parent], &values))
                    && untouched.par_iter().all(|&k| {
                        let p = &self.pieces[k];
                        !touched.contains(&p.parent)
                            || !self.base_rays[p.parent].contains(&idx)
                            || (&values[idx] + ell.dot_rational(&p.m)).is_positive()
                    })
            });
            if ok {
                let ms = ms.expect("checked");
                self.values = values;
                let mut pieces: Vec<Piece> = untouched
                    .iter()
                    .map(|&k| {
                        let p = &self.pieces[k];
                        Piece {
                            rays: p.rays.clone(),
                            cone: p.cone.clone(),
                            parent: p.parent,
                            m: p.m.clone(),
                        }
                    })
                    .collect();
                pieces.extend(
                    replaced
                        .into_iter()
                        .zip(ms)
                        .map(|((rays, cone, parent), m)| Piece { rays, cone, parent, m }),
                );
                self.pieces = pieces;
                return Ok(());
            }
            eps /= rat(2, 1);
        }
        Err(Error::Infeasible(format!("no pulling height found for {ell}")))
    }

    fn finish(self) -> Result<(Fan, BTreeMap<IntVector, Rational>)> {
        if let Some(p) = self.pieces.iter().find(|p| !p.cone.is_simplicial()) {
            return Err(Error::InvalidFan(format!("cone {:?} is not simplicial", p.rays)));
        }
        let cones = self.pieces.into_iter().map(|p| p.rays).collect();
        let values = self.rays.iter().cloned().zip(self.values).collect();
        Ok((Fan::new(self.dim, self.rays, cones)?, values))
    }
}

/// Pulls every crepant point of `p` in `|f|` into `f` in lexicographic order,
/// starting from a function `start` that is strictly convex on `f` (relative
/// to `base` when given). The result is simplicial and its certificate is
/// re-verified from scratch.
pub fn maximal_crepant_refinement_from(
    f: &Fan,
    p: &Polytope,
    start: &PlFunction,
    base: Option<&Fan>,
) -> Result<(Fan, SubdivisionCertificate)> {
    for r in f.rays() {
        if !on_boundary(p, r)? {
            return Err(Error::InvalidFan(format!("ray {r} is not through a boundary lattice point")));
        }
    }
    let mut refiner = Refiner::new(f, start, base)?;
    for ell in crepant_points(f, p) {
        refiner.pull(&ell)?;
    }
    let (fan, values) = refiner.finish()?;
    let phi = PlFunction::from_map(&fan, &values)?;
    let check = match base {
        Some(b) => phi.relative_convexity(b)?,
        None => phi.convexity()?,
    };
    let cert = SubdivisionCertificate::from_check(&phi, check, base.is_some())?;
    Ok((fan, cert))
}

/// Maximal crepant refinement of `f` with respect to `p`. The starting
/// function comes from [`certify_regular`]; fans that are not complete are
/// certified relative to themselves.
pub fn maximal_crepant_refinement(f: &Fan, p: &Polytope) -> Result<(Fan, SubdivisionCertificate)> {
    let complete = f.is_complete_sampled(1000);
    let start = certify_regular(f, f, p)?;
    let phi = start.function(f)?;
    maximal_crepant_refinement_from(f, p, &phi, if complete { None } else { Some(f) })
}

fn on_boundary(p: &Polytope, r: &IntVector) -> Result<bool> {
    let x = r.to_rational();
    Ok(p.contains(&x)? && p.facets().iter().any(|fc| fc.slack(&x).is_zero()))
}

/// Searches for a strictly convex function on `refined` by exact feasibility:
/// one variable per ray, linearity on each maximal cone, and margin at least
/// one across every wall. The solution is then checked globally (or relative
/// to `base` when `refined` is not complete).
pub fn certify_regular(refined: &Fan, base: &Fan, p: &Polytope) -> Result<SubdivisionCertificate> {
    for r in refined.rays() {
        if !on_boundary(p, r)? {
            return Err(Error::InvalidFan(format!("ray {r} is not through a boundary lattice point")));
        }
    }
    let parents = refined.parents_in(base)?;
    let n = refined.rays().len();
    let rays = refined.rays();
    let cones = refined.maximal_cones();
    let bases: Vec<Vec<usize>> = cones
        .iter()
        .map(|c| {
            let gens: Vec<IntVector> = c.iter().map(|&i| rays[i].clone()).collect();
            independent_subset(&gens).into_iter().map(|k| c[k]).collect()
        })
        .collect();
    // phi(r) - sum c_i phi(b_i) as a row.
    let relation = |k: usize, r: usize| -> Option<Vec<Rational>> {
        let gens: Vec<IntVector> = bases[k].iter().map(|&i| rays[i].clone()).collect();
        let coeffs = express_in_basis(&gens, &rays[r])?;
        let mut row = vec![Rational::zero(); n];
        row[r] += Rational::one();
        for (&i, c) in bases[k].iter().zip(coeffs.coords()) {
            row[i] -= c;
        }
        Some(row)
    };
    let mut eqs = Vec::new();
    for (k, c) in cones.iter().enumerate() {
        for &r in c {
            if !bases[k].contains(&r) {
                let row = relation(k, r).expect("ray in its own cone's span");
                eqs.push(Constraint::new(row, Rational::zero()));
            }
        }
    }
    let dims: Vec<usize> = bases.iter().map(Vec::len).collect();
    let pairs: Vec<(usize, usize)> = (0..cones.len())
        .flat_map(|i| (0..cones.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j)
        .collect();
    let ineqs: Vec<Constraint> = pairs
        .par_iter()
        .filter(|&&(i, j)| {
            // Walls between full-dimensional cones always count; lower-dimensional
            // cones are only compared inside a common base cone.
            dims[i] == dims[j] && (parents[i] == parents[j] || dims[i] == refined.ambient_dim())
        })
        .flat_map_iter(|&(i, j)| {
            let shared: Vec<IntVector> = cones[i]
                .iter()
                .filter(|r| cones[j].binary_search(r).is_ok())
                .map(|&r| rays[r].clone())
                .collect();
            let wall = rank(&shared) + 1 == dims[i];
            let rows: Vec<Constraint> = if wall {
                cones[j]
                    .iter()
                    .filter(|r| cones[i].binary_search(r).is_err())
                    .filter_map(|&r| relation(i, r))
                    .map(|row| Constraint::new(row, Rational::one()))
                    .collect()
            } else {
                vec![]
            };
            rows
        })
        .collect();
    let x = feasible_point(&ineqs, &eqs, n)
        .ok_or_else(|| Error::Infeasible("no strictly convex function on the fan".into()))?;
    let phi = PlFunction::new(refined, x)?;
    let complete = refined.is_complete_sampled(1000);
    let check = if complete {
        phi.convexity()?
    } else {
        phi.relative_convexity(base)?
    };
    SubdivisionCertificate::from_check(&phi, check, !complete)
}

/// Why a cone is not maximally subdivided.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Unsubdivided {
    pub rays: Vec<usize>,
    pub dim: usize,
    pub simplicial: bool,
    /// Lattice points of `p` in the cone whose rays are not rays of the fan.
    pub missing: Vec<IntVector>,
}

/// Cones of `f` that are not simplicial or contain a nonzero lattice point of
/// `p` not on a ray of `f`.
pub fn find_unsubdivided(f: &Fan, p: &Polytope) -> Result<Vec<Unsubdivided>> {
    let points: Vec<IntVector> = p
        .lattice_points()
        .into_iter()
        .filter(|x| !x.is_zero())
        .filter(|x| x.primitive().map(|q| f.ray_index(&q).is_none()).unwrap_or(false))
        .filter(|x| f.support_contains(x))
        .collect();
    let cones: Vec<Vec<usize>> = f.all_cones().iter().filter(|c| !c.is_empty()).cloned().collect();
    let out = cones
        .par_iter()
        .map(|c| {
            let cone = f.cone_of(c)?;
            let missing: Vec<IntVector> = points.iter().filter(|x| cone.contains(x)).cloned().collect();
            Ok((!cone.is_simplicial() || !missing.is_empty()).then(|| Unsubdivided {
                rays: c.clone(),
                dim: cone.dim(),
                simplicial: cone.is_simplicial(),
                missing,
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(out.into_iter().flatten().collect())
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
    fn star_of_quadrant() {
        let f = Fan::new(
            2,
            vec![IntVector::from_i64s(&[1, 0]), IntVector::from_i64s(&[0, 1])],
            vec![vec![0, 1]],
        )
        .unwrap();
        let g = star_subdivide(&f, &IntVector::from_i64s(&[1, 1])).unwrap();
        assert_eq!(g.maximal_cones().len(), 2);
        assert!(matches!(star_subdivide(&f, &IntVector::from_i64s(&[1, 0])), Err(Error::AlreadyRay(_))));
        assert!(matches!(
            star_subdivide(&f, &IntVector::from_i64s(&[-1, 0])),
            Err(Error::OutsideSupport(_))
        ));
    }

    #[test]
    fn star_of_square_fan() {
        let p = square();
        let f = face_fan(&p).unwrap();
        let g = star_subdivide(&f, &IntVector::from_i64s(&[1, 0])).unwrap();
        assert_eq!(g.rays().len(), 5);
        g.validate().unwrap();
        assert!(g.same_support_sampled(&f, 200));
    }

    #[test]
    fn square_mpcp() {
        let p = square();
        let f = face_fan(&p).unwrap();
        let (g, cert) = maximal_crepant_refinement(&f, &p).unwrap();
        assert_eq!(g.rays().len(), 8);
        assert_eq!(g.maximal_cones().len(), 8);
        assert!(g.is_simplicial());
        assert!(cert.verify(&g, None).unwrap());
        assert!(find_unsubdivided(&g, &p).unwrap().is_empty());
    }

    #[test]
    fn square_fan_unsubdivided() {
        let p = square();
        let f = face_fan(&p).unwrap();
        let u = find_unsubdivided(&f, &p).unwrap();
        assert_eq!(u.len(), 4);
        assert!(u.iter().all(|c| c.dim == 2 && c.simplicial));
    }

    #[test]
    fn support_function_certifies_face_fan() {
        let p = square();
        let f = face_fan(&p).unwrap();
        let c = certify_regular(&f, &f, &p).unwrap();
        assert!(!c.relative);
        assert!(c.verify(&f, None).unwrap());
    }
}
