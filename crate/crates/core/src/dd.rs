//! Double description conversion for polyhedral cones.
//!
//! Cones are `{x : A x >= 0, E x = 0}`. The solution space of `E` is
//! parametrized by an integer kernel basis, the lineality space is split off,
//! and Motzkin's incremental method runs on the remaining pointed cone with
//! the combinatorial adjacency test.

use bitvec::prelude::*;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::lattice::{
    hermite_form, independent_subset, integer_kernel, solve_rational, IntVector, IntegerMatrix,
    Rational, RationalVector,
};

/// Generators of a cone: extreme rays of its pointed part and a lattice basis
/// of its lineality space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeDescription {
    pub rays: Vec<IntVector>,
    pub lineality: Vec<IntVector>,
}

/// Extreme rays and lineality of `{x in R^dim : a.x >= 0 for a in ineqs, e.x = 0 for e in eqs}`.
///
/// Rays are primitive and sorted; the lineality basis is in Hermite form.
pub fn extreme_rays(ineqs: &[IntVector], eqs: &[IntVector], dim: usize) -> ConeDescription {
    let k_basis: Vec<IntVector> = if eqs.is_empty() {
        (0..dim).map(|i| IntVector::unit(dim, i)).collect()
    } else {
        integer_kernel(&IntegerMatrix::from_rows(eqs).expect("uniform equation rows"))
    };
    if k_basis.is_empty() {
        return ConeDescription {
            rays: vec![],
            lineality: vec![],
        };
    }
    let k = k_basis.len();
    let a1: Vec<IntVector> = ineqs
        .iter()
        .map(|a| IntVector(k_basis.iter().map(|b| a.dot(b)).collect()))
        .collect();

    let lin: Vec<IntVector> = if a1.is_empty() {
        (0..k).map(|i| IntVector::unit(k, i)).collect()
    } else {
        integer_kernel(&IntegerMatrix::from_rows(&a1).expect("uniform rows"))
    };
    let q_basis: Vec<IntVector> = if lin.is_empty() {
        (0..k).map(|i| IntVector::unit(k, i)).collect()
    } else {
        integer_kernel(&IntegerMatrix::from_rows(&lin).expect("uniform rows"))
    };
    let lift = |y: &IntVector| -> IntVector {
        let mut x = IntVector::zeros(dim);
        for (c, b) in y.0.iter().zip(&k_basis) {
            if !c.is_zero() {
                x = &x + &b.scale(c);
            }
        }
        x
    };

    let lineality = canonical_basis(&lin.iter().map(lift).collect::<Vec<_>>());

    let rays = if q_basis.is_empty() {
        vec![]
    } else {
        let a2: Vec<IntVector> = a1
            .iter()
            .map(|a| IntVector(q_basis.iter().map(|b| a.dot(b)).collect()))
            .collect();
        let mut rays: Vec<IntVector> = pointed_rays(&a2, q_basis.len())
            .into_iter()
            .map(|z| {
                let mut y = IntVector::zeros(k);
                for (c, b) in z.0.iter().zip(&q_basis) {
                    if !c.is_zero() {
                        y = &y + &b.scale(c);
                    }
                }
                lift(&y).primitive_or_zero()
            })
            .collect();
        rays.sort();
        rays.dedup();
        rays
    };
    ConeDescription { rays, lineality }
}

/// Facet normals and equations of the cone generated by `generators`.
///
/// Facet normals are primitive, lie in the linear span of the generators and
/// are sorted. Equations span the orthogonal complement of that span.
pub fn facets_of_generators(generators: &[IntVector], dim: usize) -> (Vec<IntVector>, Vec<IntVector>) {
    let d = extreme_rays(generators, &[], dim);
    (d.rays, d.lineality)
}

fn canonical_basis(rows: &[IntVector]) -> Vec<IntVector> {
    if rows.is_empty() {
        return vec![];
    }
    let (h, _) = hermite_form(&IntegerMatrix::from_rows(rows).expect("uniform rows"));
    h.row_vectors()
        .into_iter()
        .filter(|r| !r.is_zero())
        .map(|r| r.primitive_or_zero().sign_normalized())
        .collect()
}

/// Extreme rays of `{z in R^q : A z >= 0}` where `A` has rank `q`.
fn pointed_rays(a: &[IntVector], q: usize) -> Vec<IntVector> {
    let m = a.len();
    let init = independent_subset(a);
    debug_assert_eq!(init.len(), q, "constraint matrix must have full column rank");
    if init.len() < q {
        return vec![];
    }
    let basis_rows: Vec<RationalVector> = init.iter().map(|&i| a[i].to_rational()).collect();

    let mut rays: Vec<IntVector> = Vec::with_capacity(q);
    let mut zeros: Vec<BitVec> = Vec::with_capacity(q);
    for i in 0..q {
        let rhs: Vec<Rational> = (0..q)
            .map(|j| if i == j { Rational::from_integer(1.into()) } else { Rational::zero() })
            .collect();
        let sol = solve_rational(&basis_rows, &rhs, q).expect("basis is invertible");
        let r = sol.ray_generator().expect("nonzero solution");
        let mut z = bitvec![0; m];
        for (j, &row) in init.iter().enumerate() {
            if j != i {
                z.set(row, true);
            }
        }
        rays.push(r);
        zeros.push(z);
    }

    let mut processed = bitvec![0; m];
    for &i in &init {
        processed.set(i, true);
    }
    for (j, row) in a.iter().enumerate() {
        if processed[j] {
            continue;
        }
        processed.set(j, true);
        if row.is_zero() {
            for z in zeros.iter_mut() {
                z.set(j, true);
            }
            continue;
        }
        let vals: Vec<BigInt> = rays.iter().map(|r| row.dot(r)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();
        if neg.is_empty() {
            for (i, v) in vals.iter().enumerate() {
                if v.is_zero() {
                    zeros[i].set(j, true);
                }
            }
            continue;
        }

        let mut new_rays = Vec::new();
        let mut new_zeros = Vec::new();
        for &p in &pos {
            for &n in &neg {
                let common = zeros[p].clone() & zeros[n].as_bitslice();
                if common.count_ones() + 2 < q {
                    continue;
                }
                let blocked = (0..rays.len()).any(|r| {
                    r != p && r != n && {
                        let mut c = common.clone();
                        c &= !zeros[r].clone();
                        c.not_any()
                    }
                });
                if blocked {
                    continue;
                }
                let v = &rays[n].scale(&vals[p]) - &rays[p].scale(&vals[n]);
                let mut z = common;
                z.set(j, true);
                new_rays.push(v.primitive_or_zero());
                new_zeros.push(z);
            }
        }

        let mut kept_rays = Vec::new();
        let mut kept_zeros = Vec::new();
        for i in 0..rays.len() {
            if vals[i].is_negative() {
                continue;
            }
            let mut z = zeros[i].clone();
            if vals[i].is_zero() {
                z.set(j, true);
            }
            kept_rays.push(rays[i].clone());
            kept_zeros.push(z);
        }
        kept_rays.extend(new_rays);
        kept_zeros.extend(new_zeros);
        rays = kept_rays;
        zeros = kept_zeros;
    }
    rays
}

/// Rational point of the cone's interior direction: the sum of its rays.
pub fn ray_sum(rays: &[IntVector], dim: usize) -> IntVector {
    rays.iter().fold(IntVector::zeros(dim), |acc, r| &acc + r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn iv(v: &[i64]) -> IntVector {
        IntVector::from_i64s(v)
    }

    #[test]
    fn positive_orthant() {
        let ineqs: Vec<_> = (0..3).map(|i| IntVector::unit(3, i)).collect();
        let d = extreme_rays(&ineqs, &[], 3);
        assert_eq!(d.rays.len(), 3);
        assert!(d.lineality.is_empty());
    }

    #[test]
    fn half_space_has_lineality() {
        let d = extreme_rays(&[iv(&[1, 0, 0])], &[], 3);
        assert_eq!(d.rays, vec![iv(&[1, 0, 0])]);
        assert_eq!(d.lineality.len(), 2);
    }

    #[test]
    fn square_pyramid_facets() {
        let gens = [iv(&[1, 1, 1]), iv(&[1, -1, 1]), iv(&[-1, 1, 1]), iv(&[-1, -1, 1])];
        let (facets, eqs) = facets_of_generators(&gens, 3);
        assert!(eqs.is_empty());
        assert_eq!(
            facets,
            vec![iv(&[-1, 0, 1]), iv(&[0, -1, 1]), iv(&[0, 1, 1]), iv(&[1, 0, 1])]
        );
    }

    #[test]
    fn lower_dimensional_cone() {
        let gens = [iv(&[1, 0, 0]), iv(&[0, 1, 0])];
        let (facets, eqs) = facets_of_generators(&gens, 3);
        assert_eq!(facets, vec![iv(&[0, 1, 0]), iv(&[1, 0, 0])]);
        assert_eq!(eqs, vec![iv(&[0, 0, 1])]);
    }

    #[test]
    fn equations_restrict_space() {
        let ineqs: Vec<_> = (0..3).map(|i| IntVector::unit(3, i)).collect();
        let d = extreme_rays(&ineqs, &[iv(&[1, 1, -1])], 3);
        assert_eq!(d.rays, vec![iv(&[0, 1, 1]), iv(&[1, 0, 1])]);
    }

    // Independent oracle: a vector is an extreme ray of a pointed cone iff it
    // satisfies all constraints and the tight rows have rank dim - 1.
    proptest! {
        #[test]
        fn rays_are_extreme(gens in prop::collection::vec(prop::collection::vec(-3i64..4, 3), 1..7)) {
            let gens: Vec<IntVector> = gens.iter().map(|g| iv(g)).filter(|g| !g.is_zero()).collect();
            prop_assume!(!gens.is_empty());
            let (facets, eqs) = facets_of_generators(&gens, 3);
            for f in &facets {
                for g in &gens {
                    prop_assert!(!f.dot(g).is_negative());
                }
                for e in &eqs {
                    prop_assert!(e.dot(f).is_zero());
                }
                // a facet normal is tight on a generating set of a facet: rank dim(cone) - 1
                let cone_dim = 3 - eqs.len();
                let span_rank = crate::lattice::rank(&gens.iter().filter(|g| f.dot(g).is_zero()).cloned().collect::<Vec<_>>());
                prop_assert_eq!(span_rank + 1, cone_dim);
            }
        }
    }
}
