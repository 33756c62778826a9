//! Cones, fans, piecewise linear functions and nef partitions.

mod cone;
mod nef;
mod pl;

use std::collections::BTreeSet;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use cone::Cone;
pub use nef::{amenable_check, nef_partition_check, NefPartition};
pub use pl::{orbit_section_analysis, Convexity, OrbitSections, PlFunction};

use crate::error::{Error, Result};
use crate::lattice::{IntVector, RationalVector};
use crate::polytope::{Face, Polytope};

/// A fan stored by its rays and maximal cones (sorted ray index lists).
///
/// Cone geometry and the face closure are computed on first use and cached.
#[derive(Debug)]
pub struct Fan {
    ambient_dim: usize,
    rays: Vec<IntVector>,
    maximal_cones: Vec<Vec<usize>>,
    cones: OnceLock<Vec<Cone>>,
    all_cones: OnceLock<Vec<Vec<usize>>>,
}

impl Clone for Fan {
    fn clone(&self) -> Self {
        Fan {
            ambient_dim: self.ambient_dim,
            rays: self.rays.clone(),
            maximal_cones: self.maximal_cones.clone(),
            cones: self.cones.clone(),
            all_cones: self.all_cones.clone(),
        }
    }
}

impl PartialEq for Fan {
    fn eq(&self, other: &Self) -> bool {
        self.ambient_dim == other.ambient_dim
            && self.rays == other.rays
            && self.maximal_cones == other.maximal_cones
    }
}

impl Eq for Fan {}

/// Shared JSON layout for fans.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanJson {
    pub name: String,
    pub ambient_dim: usize,
    pub rays: Vec<Vec<i64>>,
    pub maximal_cones: Vec<Vec<usize>>,
}

impl Fan {
    /// Builds a fan from rays and cones. Cones are sorted, cones contained in
    /// others are dropped, and each listed ray must be an extreme ray of its cone.
    /// The pairwise intersection property is checked separately by [`Fan::validate`].
    pub fn new(ambient_dim: usize, rays: Vec<IntVector>, cones: Vec<Vec<usize>>) -> Result<Fan> {
        for r in &rays {
            if r.dim() != ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: ambient_dim,
                    found: r.dim(),
                });
            }
            if r.primitive()? != *r {
                return Err(Error::InvalidFan(format!("ray {r} is not primitive")));
            }
        }
        let distinct: BTreeSet<&IntVector> = rays.iter().collect();
        if distinct.len() != rays.len() {
            return Err(Error::InvalidFan("repeated ray".into()));
        }
        let mut sets: Vec<Vec<usize>> = cones
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c.dedup();
                c
            })
            .collect();
        if let Some(bad) = sets.iter().flatten().find(|&&i| i >= rays.len()) {
            return Err(Error::InvalidFan(format!("ray index {bad} out of range")));
        }
        sets.sort();
        sets.dedup();
        let maximal: Vec<Vec<usize>> = sets
            .iter()
            .filter(|c| !sets.iter().any(|d| d.len() > c.len() && is_subset(c, d)))
            .cloned()
            .collect();
        let built: Vec<Cone> = maximal
            .par_iter()
            .map(|c| {
                let gens: Vec<IntVector> = c.iter().map(|&i| rays[i].clone()).collect();
                let cone = Cone::new(&gens, ambient_dim)?;
                if cone.rays().len() != gens.len() {
                    return Err(Error::InvalidFan(format!("cone {c:?} has a redundant ray")));
                }
                Ok(cone)
            })
            .collect::<Result<_>>()?;
        let fan = Fan {
            ambient_dim,
            rays,
            maximal_cones: maximal,
            cones: OnceLock::new(),
            all_cones: OnceLock::new(),
        };
        let _ = fan.cones.set(built);
        Ok(fan)
    }

    pub fn from_json(j: &FanJson) -> Result<Fan> {
        let rays = j.rays.iter().map(|r| IntVector::from_i64s(r)).collect();
        Fan::new(j.ambient_dim, rays, j.maximal_cones.clone())
    }

    pub fn to_json(&self, name: &str) -> FanJson {
        FanJson {
            name: name.to_string(),
            ambient_dim: self.ambient_dim,
            rays: self.rays.iter().map(IntVector::to_i64s).collect(),
            maximal_cones: self.maximal_cones.clone(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rays(&self) -> &[IntVector] {
        &self.rays
    }

    pub fn maximal_cones(&self) -> &[Vec<usize>] {
        &self.maximal_cones
    }

    pub fn ray_index(&self, r: &IntVector) -> Option<usize> {
        self.rays.iter().position(|x| x == r)
    }

    /// Geometry of the maximal cones, aligned with [`Fan::maximal_cones`].
    pub fn cones(&self) -> &[Cone] {
        self.cones.get_or_init(|| {
            self.maximal_cones
                .iter()
                .map(|c| self.cone_of(c).expect("validated on construction"))
                .collect()
        })
    }

    pub fn cone_of(&self, ray_indices: &[usize]) -> Result<Cone> {
        if ray_indices.is_empty() {
            return Ok(Cone::zero(self.ambient_dim));
        }
        let gens: Vec<IntVector> = ray_indices.iter().map(|&i| self.rays[i].clone()).collect();
        Cone::new(&gens, self.ambient_dim)
    }

    /// Every cone of the fan (the face closure of the maximal cones), as sorted
    /// ray index sets ordered by size and then lexicographically. Includes `{0}`.
    pub fn all_cones(&self) -> &[Vec<usize>] {
        self.all_cones.get_or_init(|| {
            let mut set: BTreeSet<Vec<usize>> = BTreeSet::new();
            set.insert(vec![]);
            for (idx, cone) in self.maximal_cones.iter().zip(self.cones()) {
                for f in cone.face_ray_sets() {
                    let mut g: Vec<usize> = f.iter().map(|&i| idx[i]).collect();
                    g.sort_unstable();
                    set.insert(g);
                }
            }
            let mut out: Vec<Vec<usize>> = set.into_iter().collect();
            out.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
            out
        })
    }

    /// Cones of a given dimension, as ray index sets.
    pub fn cones_of_dim(&self, d: usize) -> Vec<Vec<usize>> {
        self.all_cones()
            .iter()
            .filter(|c| self.cone_dim(c) == d)
            .cloned()
            .collect()
    }

    pub fn cone_dim(&self, ray_indices: &[usize]) -> usize {
        crate::lattice::rank(&ray_indices.iter().map(|&i| self.rays[i].clone()).collect::<Vec<_>>())
    }

    pub fn is_simplicial(&self) -> bool {
        self.cones().iter().all(Cone::is_simplicial)
    }

    pub fn support_contains(&self, x: &IntVector) -> bool {
        self.cones().iter().any(|c| c.contains(x))
    }

    pub fn support_contains_rational(&self, x: &RationalVector) -> bool {
        self.cones().iter().any(|c| c.contains_rational(x))
    }

    /// Index of the first maximal cone containing `x`.
    pub fn containing_cone(&self, x: &IntVector) -> Option<usize> {
        self.cones().iter().position(|c| c.contains(x))
    }

    /// Deterministic pseudo-random integer directions.
    pub fn sample_directions(dim: usize, count: usize, seed: u64) -> Vec<IntVector> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let v = IntVector::from_i64s(&(0..dim).map(|_| rng.random_range(-1000..=1000)).collect::<Vec<_>>());
            if !v.is_zero() {
                out.push(v);
            }
        }
        out
    }

    /// Sampled completeness: every one of `count` deterministic directions lies in some cone.
    pub fn is_complete_sampled(&self, count: usize) -> bool {
        Self::sample_directions(self.ambient_dim, count, 0x5eed)
            .par_iter()
            .all(|v| self.support_contains(v))
    }

    /// Sampled support comparison with another fan.
    pub fn same_support_sampled(&self, other: &Fan, count: usize) -> bool {
        Self::sample_directions(self.ambient_dim, count, 0xface)
            .par_iter()
            .all(|v| self.support_contains(v) == other.support_contains(v))
    }

    /// For each maximal cone, the index of a maximal cone of `coarse` containing it.
    pub fn parents_in(&self, coarse: &Fan) -> Result<Vec<usize>> {
        self.cones()
            .par_iter()
            .enumerate()
            .map(|(i, c)| {
                coarse
                    .cones()
                    .iter()
                    .position(|d| d.contains_cone(c))
                    .ok_or_else(|| {
                        Error::InvalidFan(format!("cone {:?} lies in no coarse cone", self.maximal_cones[i]))
                    })
            })
            .collect()
    }

    pub fn refines(&self, coarse: &Fan) -> bool {
        self.parents_in(coarse).is_ok()
    }

    /// Checks that any two maximal cones meet in a common face.
    pub fn validate(&self) -> Result<()> {
        let n = self.maximal_cones.len();
        let table = SignTable::new(self);
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        pairs.par_iter().try_for_each(|&(i, j)| {
            if table.separated(i, j)
                || table.tilted(self, i, j)
                || table.tilted(self, j, i)
                || table.centroid(self, i, j)
            {
                Ok(())
            } else {
                self.check_pair(i, j)
            }
        })
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        let (si, sj) = (&self.maximal_cones[i], &self.maximal_cones[j]);
        let (ci, cj) = (&self.cones()[i], &self.cones()[j]);
        let bad = || Error::InvalidFan(format!("cones {si:?} and {sj:?} do not meet in a common face"));

        // A hyperplane with ci on one side and cj on the other reduces the
        // question to the two faces cut out by it.
        let mut candidates: Vec<IntVector> = ci.facet_normals().to_vec();
        candidates.extend(cj.facet_normals().iter().map(|n| -n));
        for e in ci.equations().iter().chain(cj.equations()) {
            candidates.push(e.clone());
            candidates.push(-e);
        }
        for h in &candidates {
            let side_i = si.iter().all(|&r| h.dot(&self.rays[r]) >= 0.into());
            let side_j = sj.iter().all(|&r| h.dot(&self.rays[r]) <= 0.into());
            if side_i && side_j {
                let fi: Vec<usize> = si.iter().copied().filter(|&r| h.dot(&self.rays[r]) == 0.into()).collect();
                let fj: Vec<usize> = sj.iter().copied().filter(|&r| h.dot(&self.rays[r]) == 0.into()).collect();
                if fi == fj {
                    return Ok(());
                }
                break;
            }
        }

        let shared_i: Vec<usize> = si.iter().copied().filter(|&r| cj.contains(&self.rays[r])).collect();
        let shared_j: Vec<usize> = sj.iter().copied().filter(|&r| ci.contains(&self.rays[r])).collect();
        if shared_i != shared_j {
            return Err(bad());
        }
        let local = |s: &[usize], c: &[usize]| -> Vec<usize> {
            s.iter().map(|r| c.iter().position(|x| x == r).expect("member")).collect()
        };
        if !ci.is_face(&local(&shared_i, si)) || !cj.is_face(&local(&shared_j, sj)) {
            return Err(bad());
        }
        let inter = ci.intersect(cj)?;
        let shared = self.cone_of(&shared_i)?;
        if inter.rays().iter().all(|r| shared.contains(r)) {
            Ok(())
        } else {
            Err(bad())
        }
    }
}

/// Rays and per-cone (facet normals, equations) in machine integers small
/// enough that all dot products and cross-multiplications fit in `i128`.
type SmallRows = Vec<Vec<i64>>;

struct SmallCones {
    rays: SmallRows,
    cones: Vec<(SmallRows, SmallRows)>,
}

impl SmallCones {
    const BOUND: i64 = 1 << 20;

    fn new(fan: &Fan) -> Option<SmallCones> {
        let small = |v: &IntVector| -> Option<Vec<i64>> {
            let s: Vec<i64> = v.coords().iter().map(|x| i64::try_from(x).ok()).collect::<Option<_>>()?;
            s.iter().all(|x| x.abs() < Self::BOUND).then_some(s)
        };
        let rays = fan.rays.iter().map(small).collect::<Option<Vec<_>>>()?;
        let cones = fan
            .cones()
            .iter()
            .map(|c| {
                let n = c.facet_normals().iter().map(small).collect::<Option<Vec<_>>>()?;
                let mut e = Vec::new();
                for x in c.equations() {
                    let x = small(x)?;
                    e.push(x.iter().map(|v| -v).collect());
                    e.push(x);
                }
                Some((n, e))
            })
            .collect::<Option<Vec<_>>>()?;
        Some(SmallCones { rays, cones })
    }
}

/// Sign patterns of every facet hyperplane of the fan on every ray, as
/// bitsets. A hyperplane that is `>= 0` on one cone, `<= 0` on the other and
/// cuts out the same rays from both shows that they meet in a common face;
/// this settles most pairs in [`Fan::validate`] without exact geometry.
struct SignTable {
    words: usize,
    small: Option<SmallCones>,
    /// Per hyperplane: rays with positive and with zero value.
    planes: Vec<(Vec<u64>, Vec<u64>)>,
    cones: Vec<Vec<u64>>,
}

impl SignTable {
    fn new(fan: &Fan) -> SignTable {
        let words = fan.rays.len().div_ceil(64);
        let mut hyperplanes: BTreeSet<IntVector> = BTreeSet::new();
        for c in fan.cones() {
            for h in c.facet_normals().iter().chain(c.equations()) {
                if let Ok(p) = h.primitive() {
                    hyperplanes.insert(p.sign_normalized());
                }
            }
        }
        let bits = |pred: &dyn Fn(usize) -> bool| -> Vec<u64> {
            let mut w = vec![0u64; words];
            for r in (0..fan.rays.len()).filter(|&r| pred(r)) {
                w[r / 64] |= 1 << (r % 64);
            }
            w
        };
        let planes = hyperplanes
            .par_iter()
            .map(|h| {
                let vals: Vec<std::cmp::Ordering> = fan.rays.iter().map(|r| h.dot(r).cmp(&num_bigint::BigInt::ZERO)).collect();
                (
                    bits(&|r| vals[r] == std::cmp::Ordering::Greater),
                    bits(&|r| vals[r] == std::cmp::Ordering::Equal),
                )
            })
            .collect();
        let cones = fan.maximal_cones.iter().map(|c| bits(&|r| c.binary_search(&r).is_ok())).collect();
        SignTable {
            words,
            small: SmallCones::new(fan),
            planes,
            cones,
        }
    }

    /// Tries planes `n + lambda * e` with `n` a facet normal and `e` an
    /// equation of cone `i`: such a plane is `>= 0` on cone `i` for every
    /// `lambda`, and an open interval of `lambda` makes it `<= 0` on cone `j`.
    fn tilted(&self, fan: &Fan, i: usize, j: usize) -> bool {
        let Some(small) = &self.small else {
            return false;
        };
        let (si, sj) = (&fan.maximal_cones[i], &fan.maximal_cones[j]);
        let dot = |h: &[i64], r: usize| -> i128 {
            h.iter().zip(&small.rays[r]).map(|(a, b)| *a as i128 * *b as i128).sum()
        };
        let (normals, eqs) = &small.cones[i];
        normals.iter().any(|n| {
            eqs.iter().any(|e| {
                // Bounds lo < lambda < hi as fractions (num, den) with den > 0.
                let mut lo: Option<(i128, i128)> = None;
                let mut hi: Option<(i128, i128)> = None;
                for &r in sj {
                    let (a, b) = (dot(n, r), dot(e, r));
                    match b.cmp(&0) {
                        std::cmp::Ordering::Equal if a > 0 => return false,
                        std::cmp::Ordering::Equal => {}
                        std::cmp::Ordering::Greater => {
                            if hi.is_none_or(|(p, q)| -a * q < p * b) {
                                hi = Some((-a, b));
                            }
                        }
                        std::cmp::Ordering::Less => {
                            if lo.is_none_or(|(p, q)| a * q > p * -b) {
                                lo = Some((a, -b));
                            }
                        }
                    }
                }
                if let (Some((p, q)), Some((u, v))) = (lo, hi) {
                    if p * v >= u * q {
                        return false;
                    }
                }
                let fi = si.iter().filter(|&&r| dot(n, r) == 0);
                let fj = sj.iter().filter(|&&r| dot(n, r) == 0 && dot(e, r) == 0);
                fi.eq(fj)
            })
        })
    }

    /// Tries the plane through the shared rays that points from cone `j`
    /// towards cone `i`: the difference of normalized ray sums, pushed into
    /// the orthogonal complement of the shared rays and rounded to integers.
    /// The rounded plane is verified exactly.
    fn centroid(&self, fan: &Fan, i: usize, j: usize) -> bool {
        let Some(small) = &self.small else {
            return false;
        };
        let (si, sj) = (&fan.maximal_cones[i], &fan.maximal_cones[j]);
        let d = fan.ambient_dim;
        let shared: Vec<usize> = si.iter().copied().filter(|r| sj.binary_search(r).is_ok()).collect();
        let mut h = vec![0f64; d];
        for (set, sign) in [(si, 1.0), (sj, -1.0)] {
            for &r in set {
                let v = &small.rays[r];
                let norm = v.iter().map(|x| (*x as f64).powi(2)).sum::<f64>().sqrt();
                for k in 0..d {
                    h[k] += sign * v[k] as f64 / norm;
                }
            }
        }
        let basis: Vec<Vec<i64>> = if shared.is_empty() {
            (0..d).map(|k| (0..d).map(|l| i64::from(k == l)).collect()).collect()
        } else {
            let m = crate::lattice::IntegerMatrix::from_rows(
                &shared.iter().map(|&r| fan.rays[r].clone()).collect::<Vec<_>>(),
            )
            .expect("rows of equal length");
            let Some(b) = crate::lattice::integer_kernel(&m)
                .iter()
                .map(|k| k.coords().iter().map(|x| i64::try_from(x).ok()).collect::<Option<Vec<i64>>>())
                .collect::<Option<Vec<_>>>()
            else {
                return false;
            };
            b
        };
        let mut plane = vec![0i128; d];
        for k in &basis {
            let c = (k.iter().zip(&h).map(|(a, b)| *a as f64 * b).sum::<f64>() * 1e6).round();
            if !c.is_finite() || c.abs() > 1e12 {
                return false;
            }
            for l in 0..d {
                plane[l] += c as i128 * k[l] as i128;
            }
        }
        let dot = |r: usize| -> i128 { plane.iter().zip(&small.rays[r]).map(|(a, b)| a * *b as i128).sum() };
        si.iter().all(|&r| {
            let v = dot(r);
            v > 0 || (v == 0 && shared.contains(&r))
        }) && sj.iter().all(|&r| {
            let v = dot(r);
            v < 0 || (v == 0 && shared.contains(&r))
        })
    }

    fn separated(&self, i: usize, j: usize) -> bool {
        let (ci, cj) = (&self.cones[i], &self.cones[j]);
        self.planes.iter().any(|(pos, zero)| {
            let mut fwd = true;
            let mut bwd = true;
            for w in 0..self.words {
                let (p, z) = (pos[w], zero[w]);
                let n = !(p | z);
                if ci[w] & z != cj[w] & z {
                    return false;
                }
                fwd &= ci[w] & n == 0 && cj[w] & p == 0;
                bwd &= ci[w] & p == 0 && cj[w] & n == 0;
            }
            fwd || bwd
        })
    }
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.binary_search(x).is_ok())
}

/// The complete fan of cones over the proper faces of `p`.
///
/// Ray `i` is the primitive generator through vertex `i` of `p`.
pub fn face_fan(p: &Polytope) -> Result<Fan> {
    if !p.origin_is_interior() {
        return Err(Error::OriginNotInterior);
    }
    let rays: Vec<IntVector> = p
        .vertices()
        .iter()
        .map(RationalVector::ray_generator)
        .collect::<Result<_>>()?;
    Fan::new(p.ambient_dim(), rays, p.facet_incidences())
}

/// For a fan whose rays pass through vertices of `p` (a face fan or a subfan of
/// one), the face of `p` spanned by the vertices on the given rays.
pub fn face_of_cone(fan: &Fan, p: &Polytope, ray_indices: &[usize]) -> Result<Face> {
    let vidx: Vec<usize> = ray_indices
        .iter()
        .map(|&i| vertex_on_ray(p, &fan.rays()[i]))
        .collect::<Result<_>>()?;
    Ok(p.face_closure(&vidx))
}

fn vertex_on_ray(p: &Polytope, r: &IntVector) -> Result<usize> {
    p.vertices()
        .iter()
        .position(|v| v.ray_generator().ok().as_ref() == Some(r))
        .ok_or_else(|| Error::InvalidFan(format!("ray {r} passes through no vertex")))
}

/// The subfan of cones over faces of `p` containing none of the forbidden point sets.
///
/// `f` must be the face fan of `p` or a subfan of it. A face contains a set
/// when it contains every point of the set.
pub fn subfan_excluding(f: &Fan, p: &Polytope, forbidden: &[Vec<RationalVector>]) -> Result<Fan> {
    for x in forbidden.iter().flatten() {
        if !f.support_contains_rational(x) {
            return Err(Error::OutsideSupport(format!("{x}")));
        }
    }
    let mut kept: Vec<Vec<usize>> = Vec::new();
    for c in f.all_cones() {
        let face = face_of_cone(f, p, c)?;
        let mut excluded = false;
        for set in forbidden {
            let mut all = true;
            for x in set {
                if !p.face_contains(&face, x)? {
                    all = false;
                    break;
                }
            }
            if all {
                excluded = true;
                break;
            }
        }
        if !excluded {
            kept.push(c.clone());
        }
    }
    let used: BTreeSet<usize> = kept.iter().flatten().copied().collect();
    let new_index = |i: usize| used.iter().position(|&u| u == i).expect("used ray");
    let rays: Vec<IntVector> = used.iter().map(|&i| f.rays()[i].clone()).collect();
    let cones: Vec<Vec<usize>> = kept
        .iter()
        .map(|c| c.iter().map(|&i| new_index(i)).collect())
        .collect();
    Fan::new(f.ambient_dim(), rays, cones)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::hull;

    fn iv(v: &[i64]) -> IntVector {
        IntVector::from_i64s(v)
    }

    pub(crate) fn square() -> Polytope {
        hull(
            &[[-1, -1], [-1, 1], [1, -1], [1, 1]]
                .iter()
                .map(|r| iv(r).to_rational())
                .collect::<Vec<_>>(),
        )
        .unwrap()
    }

    #[test]
    fn face_fan_of_square() {
        let f = face_fan(&square()).unwrap();
        assert_eq!(f.rays().len(), 4);
        assert_eq!(f.maximal_cones().len(), 4);
        assert!(f.is_complete_sampled(200));
        f.validate().unwrap();
        assert_eq!(f.all_cones().len(), 9);
    }

    #[test]
    fn overlapping_cones_are_invalid() {
        let f = Fan::new(
            2,
            vec![iv(&[1, 0]), iv(&[1, 2]), iv(&[1, 1]), iv(&[0, 1])],
            vec![vec![0, 1], vec![2, 3]],
        )
        .unwrap();
        assert!(f.validate().is_err());
    }

    #[test]
    fn subfan_with_nothing_forbidden() {
        let p = square();
        let f = face_fan(&p).unwrap();
        let g = subfan_excluding(&f, &p, &[]).unwrap();
        assert_eq!(g, f);
        let corner = vec![iv(&[1, 1]).to_rational()];
        let h = subfan_excluding(&f, &p, &[corner]).unwrap();
        assert_eq!(h.maximal_cones().len(), 2);
        assert_eq!(h.rays().len(), 3);
    }
}
