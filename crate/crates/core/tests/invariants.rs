//! Structural invariants of the bundled data and of the constructions built
//! from it, checked against small independent oracles.

use std::collections::BTreeSet;

use toricmorph::fan::{face_fan, orbit_section_analysis, subfan_excluding};
use toricmorph::fixtures;
use toricmorph::lattice::{rank_rational, rat};
use toricmorph::polytope::hull;
use toricmorph::subdivision::{crepant_points, maximal_crepant_refinement};
use toricmorph::{Fan, IntVector, PlFunction, Polytope, RationalVector};

const REFLEXIVE: [&str; 6] = ["nabla", "delta_wp", "delta_star_wp", "delta_p24", "delta_star_p24", "delta_p5"];
const ALL_POLYTOPES: [&str; 10] = [
    "nabla",
    "nabla_1",
    "nabla_2",
    "nabla_prime_2",
    "delta_wp",
    "delta_star_wp",
    "delta_p24",
    "delta_star_p24",
    "delta_p5",
    "face_f1",
];

fn vertex_set(p: &Polytope) -> BTreeSet<RationalVector> {
    p.vertices().iter().cloned().collect()
}

/// Bounding-box enumeration tested against the facet inequalities directly.
fn brute_lattice_points(p: &Polytope) -> BTreeSet<IntVector> {
    let n = p.ambient_dim();
    let ints: Vec<Vec<i64>> = p
        .vertices()
        .iter()
        .map(|v| v.to_integer().expect("lattice polytope").to_i64s())
        .collect();
    let lo: Vec<i64> = (0..n).map(|i| ints.iter().map(|v| v[i]).min().unwrap()).collect();
    let hi: Vec<i64> = (0..n).map(|i| ints.iter().map(|v| v[i]).max().unwrap()).collect();
    let mut out = BTreeSet::new();
    let mut x = lo.clone();
    loop {
        let v = IntVector::from_i64s(&x);
        let r = v.to_rational();
        let inside = p.facets().iter().all(|f| f.slack(&r) >= rat(0, 1))
            && p.equations().iter().all(|f| f.slack(&r) == rat(0, 1));
        if inside {
            out.insert(v);
        }
        let mut i = 0;
        while i < n {
            if x[i] < hi[i] {
                x[i] += 1;
                break;
            }
            x[i] = lo[i];
            i += 1;
        }
        if i == n {
            return out;
        }
    }
}

#[test]
fn duality_is_an_involution() {
    for name in REFLEXIVE {
        let p = fixtures::polytope(name).unwrap();
        let dd = p.dual().unwrap().dual().unwrap();
        assert_eq!(vertex_set(&dd), vertex_set(&p), "{name}");
    }
}

#[test]
fn stored_duals_agree() {
    let d = fixtures::polytope("delta_wp").unwrap().dual().unwrap();
    assert_eq!(vertex_set(&d), vertex_set(&fixtures::polytope("delta_star_wp").unwrap()));
    let d = fixtures::polytope("delta_star_p24").unwrap().dual().unwrap();
    assert_eq!(vertex_set(&d), vertex_set(&fixtures::polytope("delta_p24").unwrap()));
}

#[test]
fn nabla_is_the_hull_of_its_parts() {
    let mut pts = fixtures::polytope("nabla_1").unwrap().vertices().to_vec();
    pts.extend_from_slice(fixtures::polytope("nabla_2").unwrap().vertices());
    assert_eq!(vertex_set(&hull(&pts).unwrap()), vertex_set(&fixtures::polytope("nabla").unwrap()));
}

#[test]
fn hull_is_idempotent() {
    for name in ALL_POLYTOPES {
        let p = fixtures::polytope(name).unwrap();
        let q = hull(p.vertices()).unwrap();
        assert_eq!(vertex_set(&q), vertex_set(&p), "{name}");
        let f: BTreeSet<_> = q.facets().iter().cloned().collect();
        let g: BTreeSet<_> = p.facets().iter().cloned().collect();
        assert_eq!(f, g, "{name}");
    }
}

#[test]
fn facets_are_spanned_by_vertices() {
    for name in ALL_POLYTOPES {
        let p = fixtures::polytope(name).unwrap();
        for f in p.facets() {
            let tight: Vec<&RationalVector> = p
                .vertices()
                .iter()
                .filter(|v| f.slack(v) == rat(0, 1))
                .collect();
            let diffs: Vec<RationalVector> = tight
                .iter()
                .map(|v| {
                    let c = v.coords().iter().zip(tight[0].coords()).map(|(a, b)| a - b).collect();
                    RationalVector::new(c)
                })
                .collect();
            assert_eq!(rank_rational(&diffs) + 1, p.dim(), "{name}: facet {:?}", f.normal);
        }
    }
}

#[test]
fn lattice_points_match_brute_force() {
    for name in ALL_POLYTOPES {
        let p = fixtures::polytope(name).unwrap();
        let fast: BTreeSet<IntVector> = p.lattice_points().into_iter().collect();
        assert_eq!(fast, brute_lattice_points(&p), "{name}");
    }
}

#[test]
fn reflexive_fixtures_are_reflexive() {
    for name in REFLEXIVE {
        assert!(fixtures::polytope(name).unwrap().is_reflexive(), "{name}");
    }
    assert_eq!(fixtures::polytope("nabla").unwrap().vertices().len(), 12);
}

#[test]
fn support_function_newton_polytope_is_the_dual() {
    for name in REFLEXIVE {
        let p = fixtures::polytope(name).unwrap();
        let ff = face_fan(&p).unwrap();
        let phi = PlFunction::from_fn(&ff, |_| rat(1, 1));
        let newt = phi.newton_polytope().unwrap();
        assert_eq!(vertex_set(&newt), vertex_set(&p.dual().unwrap()), "{name}");
    }
}

#[test]
fn sigma_prime_wp_shape() {
    let f = fixtures::fan("sigma_prime_wp").unwrap();
    assert_eq!(f.rays().len(), 9);
    assert_eq!(f.maximal_cones().len(), 14);
    for r in f.rays() {
        assert_eq!(r.primitive().unwrap(), *r);
    }
    for c in f.maximal_cones() {
        assert_eq!(f.cone_dim(c), 4);
    }
    f.validate().unwrap();
}

fn cone_key(f: &Fan, c: &[usize]) -> BTreeSet<IntVector> {
    c.iter().map(|&i| f.rays()[i].clone()).collect()
}

fn sigma_prime(nabla: &Polytope, sigma: &Fan) -> Fan {
    let sets: Vec<Vec<RationalVector>> = fixtures::list("forbidden_sets")
        .unwrap()
        .point_sets("sets")
        .unwrap()
        .iter()
        .map(|s| s.iter().map(IntVector::to_rational).collect())
        .collect();
    subfan_excluding(sigma, nabla, &sets).unwrap()
}

#[test]
fn face_fans_are_valid_and_subfan_is_closed() {
    for name in REFLEXIVE {
        face_fan(&fixtures::polytope(name).unwrap()).unwrap().validate().unwrap();
    }
    let nabla = fixtures::polytope("nabla").unwrap();
    let sigma = face_fan(&nabla).unwrap();
    let sub = sigma_prime(&nabla, &sigma);
    sub.validate().unwrap();
    let all: BTreeSet<_> = sigma.all_cones().iter().map(|c| cone_key(&sigma, c)).collect();
    let sub_all: BTreeSet<_> = sub.all_cones().iter().map(|c| cone_key(&sub, c)).collect();
    assert!(sub_all.is_subset(&all));
    for c in sub.all_cones() {
        for face in sub.cone_of(c).unwrap().face_ray_sets() {
            let key: BTreeSet<IntVector> = face.iter().map(|&i| sub.rays()[c[i]].clone()).collect();
            assert!(key.is_empty() || sub_all.contains(&key));
        }
    }
}

#[test]
fn orbit_partition_is_exhaustive_and_disjoint() {
    let nabla = fixtures::polytope("nabla").unwrap();
    let sigma = face_fan(&nabla).unwrap();
    for part in ["nabla_1", "nabla_2"] {
        let ones = fixtures::polytope(part).unwrap().integer_vertices().unwrap();
        let phi = PlFunction::from_fn(&sigma, |r| if ones.contains(r) { rat(1, 1) } else { rat(0, 1) });
        let newt = phi.newton_polytope().unwrap();
        let pts: BTreeSet<IntVector> = newt.lattice_points().into_iter().collect();
        for c in sigma.all_cones() {
            let face = toricmorph::fan::face_of_cone(&sigma, &nabla, c).unwrap();
            let a = orbit_section_analysis(&nabla, &face, &newt, &phi).unwrap();
            let nv: BTreeSet<_> = a.nonvanishing.iter().cloned().collect();
            let v: BTreeSet<_> = a.vanishing.iter().cloned().collect();
            assert!(nv.is_disjoint(&v));
            assert_eq!(&nv | &v, pts);
            assert_eq!(a.nonvanishing.len() + a.vanishing.len(), pts.len());
        }
    }
}

#[test]
fn refinement_is_deterministic_and_crepant() {
    let p = fixtures::polytope("delta_star_p24").unwrap();
    let f = face_fan(&p).unwrap();
    let (a, cert) = maximal_crepant_refinement(&f, &p).unwrap();
    let (b, _) = maximal_crepant_refinement(&f, &p).unwrap();
    assert_eq!(a.to_json("a").rays, b.to_json("a").rays);
    assert_eq!(a.to_json("a").maximal_cones, b.to_json("a").maximal_cones);
    a.validate().unwrap();
    assert!(a.refines(&f));
    assert!(a.same_support_sampled(&f, 1000));
    assert!(cert.verify(&a, None).unwrap());
    assert!(cert.function(&a).unwrap().is_strictly_convex().unwrap());
    let boundary: BTreeSet<IntVector> = p.boundary_lattice_points().into_iter().collect();
    for r in a.rays() {
        assert!(boundary.contains(r), "ray {r} is not a boundary point");
    }
    let used: BTreeSet<IntVector> = a.rays().iter().cloned().collect();
    for q in crepant_points(&f, &p) {
        assert!(used.contains(&q), "{q} unused");
    }
}
