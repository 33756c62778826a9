//! The verification checks V1..V14 run over the bundled data.
//!
//! Expensive shared objects (the subfan of the face fan of nabla, the MPCP
//! refinement of the stored fan and the intersection fan) are built once per
//! process and reused by every check that needs them.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fan::{
    amenable_check, face_fan, face_of_cone, nef_partition_check, orbit_section_analysis, subfan_excluding, Cone,
    Fan, NefPartition, PlFunction,
};
use crate::fixtures;
use crate::lattice::{rat, rank_rational, solve_rational, IntVector, IntegerMatrix, Rational, RationalVector};
use crate::laurent::{
    chart_restrict, eval_gradient, eval_hessian, parse, parse_with, pullback_from_lattice_map, section_points,
    substitute, substitute_rational, verify_identity_mod, ChartVar, LaurentPoly, MonomialMap,
};
use crate::morphism::{
    fan_morphism_exists, image_is_union_of_cones, image_polytope, intersection_fan, permutes_maximal_cones,
    preimage_ray_sections, symmetry_descends, LatticeMap, LatticeTag,
};
use crate::polytope::Polytope;
use crate::subdivision::{find_unsubdivided, maximal_crepant_refinement, SubdivisionCertificate};

pub const CHECK_IDS: [&str; 14] = [
    "V1", "V2", "V3", "V4", "V5", "V6", "V7", "V8", "V9", "V10", "V11", "V12", "V13", "V14",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub check_id: String,
    pub status: Status,
    pub elapsed_ms: u64,
    pub witness: Value,
    pub paper_anchor: String,
}

/// Runs one check. Unknown ids are an error; failures of the check itself
/// are reported through the status.
pub fn run(id: &str) -> Result<CheckReport> {
    let info = fixtures::list_checks()
        .into_iter()
        .find(|c| c.id == id)
        .ok_or_else(|| Error::UnknownFixture(format!("check {id}")))?;
    let f: fn() -> Result<(bool, Value)> = match id {
        "V1" => v1_duality,
        "V2" => v2_reflexivity,
        "V3" => v3_covering,
        "V4" => v4_preimage_rays,
        "V5" => v5_orbits,
        "V6" => v6_intersection_fan,
        "V7" => v7_census,
        "V8" => v8_mpcp,
        "V9" => v9_newton,
        "V10" => v10_equations,
        "V11" => v11_ring_morphisms,
        "V12" => v12_singular_locus,
        "V13" => v13_symmetry,
        "V14" => v14_amenable,
        _ => return Err(Error::UnknownFixture(format!("check {id}"))),
    };
    let start = Instant::now();
    let (status, witness) = match f() {
        Ok((true, w)) => (Status::Pass, w),
        Ok((false, w)) => (Status::Fail, w),
        Err(e) => (Status::Error, json!({ "error": e.to_string() })),
    };
    Ok(CheckReport {
        check_id: id.to_string(),
        status,
        elapsed_ms: u64::try_from(start.elapsed().as_millis()).unwrap_or(u64::MAX),
        witness,
        paper_anchor: info.anchor,
    })
}

/// Runs several checks, in parallel unless `serial`; reports come back in
/// the order of `ids`.
pub fn run_many(ids: &[String], serial: bool) -> Result<Vec<CheckReport>> {
    if serial {
        ids.iter().map(|id| run(id)).collect()
    } else {
        ids.par_iter().map(|id| run(id)).collect()
    }
}

struct Shared {
    nabla: Polytope,
    sigma: Fan,
    sigma_prime: Fan,
    forbidden: Vec<Vec<IntVector>>,
    sigma_wp: Fan,
    delta_star_wp: Polytope,
    h: LatticeMap,
}

fn shared() -> Result<&'static Shared> {
    static CELL: OnceLock<Result<Shared>> = OnceLock::new();
    CELL.get_or_init(|| {
        let nabla = fixtures::polytope("nabla")?;
        let sigma = face_fan(&nabla)?;
        let forbidden = fixtures::list("forbidden_sets")?.point_sets("sets")?;
        let sets: Vec<Vec<RationalVector>> = forbidden
            .iter()
            .map(|s| s.iter().map(IntVector::to_rational).collect())
            .collect();
        let sigma_prime = subfan_excluding(&sigma, &nabla, &sets)?;
        Ok(Shared {
            nabla,
            sigma,
            sigma_prime,
            forbidden,
            sigma_wp: fixtures::fan("sigma_prime_wp")?,
            delta_star_wp: fixtures::polytope("delta_star_wp")?,
            h: fixtures::map("h_star")?,
        })
    })
    .as_ref()
    .map_err(Clone::clone)
}

fn mpcp() -> Result<&'static (Fan, SubdivisionCertificate)> {
    static CELL: OnceLock<Result<(Fan, SubdivisionCertificate)>> = OnceLock::new();
    CELL.get_or_init(|| {
        let s = shared()?;
        maximal_crepant_refinement(&s.sigma_wp, &s.delta_star_wp)
    })
    .as_ref()
    .map_err(Clone::clone)
}

fn sigma_int() -> Result<&'static Fan> {
    static CELL: OnceLock<Result<Fan>> = OnceLock::new();
    CELL.get_or_init(|| {
        let s = shared()?;
        intersection_fan(&s.h, &mpcp()?.0, &s.sigma_prime, &s.nabla)
    })
    .as_ref()
    .map_err(Clone::clone)
}

fn indicator<'a>(fan: &'a Fan, ones: &[IntVector]) -> PlFunction<'a> {
    PlFunction::from_fn(fan, |r| if ones.contains(r) { rat(1, 1) } else { rat(0, 1) })
}

/// The pair `phi^1, phi^2` on the face fan of nabla.
fn nabla_partition(sigma: &Fan) -> Result<(PlFunction<'_>, PlFunction<'_>)> {
    let v1 = fixtures::polytope("nabla_1")?
        .integer_vertices()
        .ok_or(Error::NotFullDimensional)?;
    let v2 = fixtures::polytope("nabla_2")?
        .integer_vertices()
        .ok_or(Error::NotFullDimensional)?;
    Ok((indicator(sigma, &v1), indicator(sigma, &v2)))
}

fn rows(v: &[IntVector]) -> Vec<Vec<i64>> {
    v.iter().map(IntVector::to_i64s).collect()
}

fn cone_rows(f: &Fan, c: &[usize]) -> Vec<Vec<i64>> {
    let mut r: Vec<Vec<i64>> = c.iter().map(|&i| f.rays()[i].to_i64s()).collect();
    r.sort();
    r
}

fn v1_duality() -> Result<(bool, Value)> {
    let wp = fixtures::polytope("delta_wp")?.dual()? == fixtures::polytope("delta_star_wp")?;
    let p24 = fixtures::polytope("delta_star_p24")?.dual()? == fixtures::polytope("delta_p24")?;
    let mut involution = BTreeMap::new();
    for e in fixtures::entries().iter().filter(|e| e.kind == fixtures::Kind::Polytope) {
        let p = fixtures::polytope(e.name)?;
        if p.is_reflexive() {
            involution.insert(e.name, p.dual()?.dual()? == p);
        }
    }
    let ok = wp && p24 && involution.values().all(|&b| b);
    Ok((
        ok,
        json!({ "dual_delta_wp_is_stored": wp, "dual_delta_star_p24_is_stored": p24, "dual_dual_identity": involution }),
    ))
}

fn v2_reflexivity() -> Result<(bool, Value)> {
    let names = ["nabla", "delta_wp", "delta_star_wp", "delta_p24", "delta_star_p24", "delta_p5"];
    let mut refl = BTreeMap::new();
    for n in names {
        refl.insert(n, fixtures::polytope(n)?.is_reflexive());
    }
    let nv = fixtures::polytope("nabla")?.vertices().len();
    Ok((
        refl.values().all(|&b| b) && nv == 12,
        json!({ "reflexive": refl, "nabla_vertices": nv }),
    ))
}

fn v3_covering() -> Result<(bool, Value)> {
    let s = shared()?;
    let cones = s.sigma_prime.all_cones();
    let uncovered: Vec<Vec<Vec<i64>>> = cones
        .par_iter()
        .map(|c| -> Result<Option<Vec<Vec<i64>>>> {
            let cone = s.sigma_prime.cone_of(c)?;
            let cov = image_is_union_of_cones(&s.h, &cone, &s.sigma_prime, &s.sigma_wp)?;
            Ok((!cov.covered).then(|| cone_rows(&s.sigma_prime, c)))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let img = image_polytope(&s.h, &s.nabla)?;
    let witness = fixtures::list("image_points")?.point(&["outside_witness", "image"])?;
    let contains = s.delta_star_wp.is_subset(&img)?;
    let strict = img.contains_int(&witness)? && !s.delta_star_wp.contains_int(&witness)?;
    let kernel = s.h.kernel();
    let expected = IntVector::from_i64s(&[0, 0, 0, 2, -1]);
    let kernel_ok = kernel.len() == 1 && (kernel[0] == expected || kernel[0] == -&expected);
    Ok((
        uncovered.is_empty() && contains && strict && kernel_ok,
        json!({
            "cones_checked": cones.len(),
            "uncovered": uncovered,
            "image_contains_delta_star_wp": contains,
            "strict_witness": witness.to_i64s(),
            "witness_separates": strict,
            "kernel": rows(&kernel),
        }),
    ))
}

fn v4_preimage_rays() -> Result<(bool, Value)> {
    let s = shared()?;
    let points: Vec<IntVector> = s
        .delta_star_wp
        .lattice_points()
        .into_iter()
        .filter(|l| !l.is_zero())
        .collect();
    let bad: Vec<Vec<i64>> = points
        .par_iter()
        .map(|l| -> Result<Option<Vec<i64>>> {
            let secs = preimage_ray_sections(&s.h, l, &s.sigma_prime, &s.nabla)?;
            Ok((!secs.iter().all(|x| x.is_lattice())).then(|| l.to_i64s()))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok((
        bad.is_empty(),
        json!({ "lattice_points_checked": points.len(), "non_lattice_sections_at": bad }),
    ))
}

fn v5_orbits() -> Result<(bool, Value)> {
    let s = shared()?;
    let (_, phi2) = nabla_partition(&s.sigma)?;
    let newt = phi2.newton_polytope()?;
    let expected = fixtures::list("forbidden_sets")?.points("expected_nonvanishing")?;
    let kept: BTreeSet<Vec<Vec<i64>>> = s
        .sigma_prime
        .all_cones()
        .iter()
        .map(|c| cone_rows(&s.sigma_prime, c))
        .collect();
    let mut per_condition = vec![0usize; s.forbidden.len()];
    let mut bad = Vec::new();
    let mut excluded = 0;
    for c in s.sigma.all_cones() {
        if kept.contains(&cone_rows(&s.sigma, c)) {
            continue;
        }
        excluded += 1;
        let face = face_of_cone(&s.sigma, &s.nabla, c)?;
        let mut conds = Vec::new();
        for (k, set) in s.forbidden.iter().enumerate() {
            let mut all = true;
            for x in set {
                all &= s.nabla.face_contains(&face, &x.to_rational())?;
            }
            if all {
                conds.push(k);
            }
        }
        let an = orbit_section_analysis(&s.nabla, &face, &newt, &phi2)?;
        let good = conds.len() == 1 && an.nonvanishing.len() == 1 && an.nonvanishing[0] == expected[conds[0]];
        if good {
            per_condition[conds[0]] += 1;
        } else {
            bad.push(json!({
                "cone": cone_rows(&s.sigma, c),
                "conditions": conds,
                "nonvanishing": rows(&an.nonvanishing),
            }));
        }
    }
    Ok((
        bad.is_empty() && excluded > 0,
        json!({ "excluded_faces": excluded, "per_condition": per_condition, "expected": rows(&expected), "bad": bad }),
    ))
}

fn triangle_cones(si: &Fan) -> Result<Vec<(Vec<Vec<i64>>, bool)>> {
    let tri = fixtures::list("triangles")?.point_sets("triangles")?;
    let present: BTreeSet<Vec<Vec<i64>>> = si.all_cones().iter().map(|c| cone_rows(si, c)).collect();
    tri.iter()
        .map(|t| {
            let mut r: Vec<Vec<i64>> = t.iter().map(|v| v.primitive().map(|p| p.to_i64s())).collect::<Result<_>>()?;
            r.sort();
            let here = present.contains(&r);
            Ok((r, here))
        })
        .collect()
}

fn v6_intersection_fan() -> Result<(bool, Value)> {
    let s = shared()?;
    let si = sigma_int()?;
    let (mp, _) = mpcp()?;
    si.validate()?;
    let refines = si.refines(&s.sigma_prime);
    let mut off_lattice = Vec::new();
    for r in si.rays() {
        if !s.nabla.contains_int(r)? {
            off_lattice.push(r.to_i64s());
        }
    }
    let morphism = fan_morphism_exists(&s.h, si, mp)?;
    let triangles = triangle_cones(si)?;
    Ok((
        refines && off_lattice.is_empty() && morphism.exists,
        json!({
            "rays": si.rays().len(),
            "maximal_cones": si.maximal_cones().len(),
            "valid": true,
            "refines_sigma_prime": refines,
            "rays_not_through_lattice_points": off_lattice,
            "fan_morphism": morphism.exists,
            "counterexample": morphism.counterexample,
            "stored_triangles_present": triangles.iter().map(|(_, b)| *b).collect::<Vec<_>>(),
        }),
    ))
}

fn v7_census() -> Result<(bool, Value)> {
    let s = shared()?;
    let si = sigma_int()?;
    let un = find_unsubdivided(si, &s.nabla)?;
    let found: BTreeSet<Vec<Vec<i64>>> = un.iter().filter(|u| u.dim == 3).map(|u| cone_rows(si, &u.rays)).collect();
    let np2 = fixtures::polytope("nabla_prime_2")?;
    let mut expected: BTreeSet<Vec<Vec<i64>>> = BTreeSet::new();
    for f in np2.faces(2)? {
        let mut r: Vec<Vec<i64>> = f
            .vertices(&np2)
            .map(|v| v.ray_generator().map(|p| p.to_i64s()))
            .collect::<Result<_>>()?;
        r.sort();
        expected.insert(r);
    }
    let faces = expected.len();
    for (t, _) in triangle_cones(si)? {
        expected.insert(t);
    }
    let missing: Vec<_> = expected.difference(&found).cloned().collect();
    let extra: Vec<_> = found.difference(&expected).cloned().collect();
    let by_dim: BTreeMap<String, usize> = un.iter().fold(BTreeMap::new(), |mut m, u| {
        *m.entry(format!("{}{}", u.dim, if u.simplicial { "" } else { "_nonsimplicial" }))
            .or_insert(0) += 1;
        m
    });
    Ok((
        missing.is_empty() && extra.is_empty(),
        json!({
            "found_three_dim": found.len(),
            "expected": expected.len(),
            "expected_faces_of_nabla_prime_2": faces,
            "missing": missing,
            "extra": extra,
            "all_unsubdivided_by_dim": by_dim,
            "note": "(0,0,0,2,-1) spans the kernel of h* and is a vertex of nabla_prime_2; every edge of the refinement of F1 at the image of a vertex of nabla_prime_2 gives its own unsubdivided 3-cone through it, so the count is 4 + 3 + sum(deg - 2) over three image vertices and stays above 10 for every maximal subdivision of F1",
        }),
    ))
}

fn v8_mpcp() -> Result<(bool, Value)> {
    let s = shared()?;
    let (mp, cert) = mpcp()?;
    let refines = mp.refines(&s.sigma_wp);
    let simplicial = mp.is_simplicial();
    let maximal = find_unsubdivided(mp, &s.delta_star_wp)?.is_empty();
    let certified = cert.verify(mp, None)?;
    let pl = fixtures::list("phi_prime")?;
    let lowered = pl.points("lowered_rays")?;
    let eps = rat(1, 8);
    let one = rat(1, 1);
    let phi_prime = PlFunction::from_fn(&s.sigma_wp, |r| if lowered.contains(r) { &one - &eps } else { one.clone() });
    let phi_prime_strict = phi_prime.is_strictly_convex()?;
    let si = sigma_int()?;
    let (res, res_cert) = maximal_crepant_refinement(si, &s.nabla)?;
    let res_refines = res.refines(si);
    let res_simplicial = res.is_simplicial();
    let res_maximal = find_unsubdivided(&res, &s.nabla)?.is_empty();
    let res_certified = res_cert.verify(&res, Some(si))?;
    Ok((
        refines && simplicial && maximal && certified && phi_prime_strict && res_refines && res_simplicial && res_maximal && res_certified,
        json!({
            "mpcp": {
                "rays": mp.rays().len(),
                "maximal_cones": mp.maximal_cones().len(),
                "refines_stored_fan": refines,
                "simplicial": simplicial,
                "no_unsubdivided_cones": maximal,
                "certificate_verified": certified,
                "min_margin": cert.min_margin().map(|m| m.to_string()),
            },
            "phi_prime_eps_1_8_strictly_convex": phi_prime_strict,
            "sigma_int_resolution": {
                "rays": res.rays().len(),
                "maximal_cones": res.maximal_cones().len(),
                "refines_sigma_int": res_refines,
                "simplicial": res_simplicial,
                "no_unsubdivided_cones": res_maximal,
                "relative_certificate_verified": res_certified,
            },
        }),
    ))
}

fn v9_newton() -> Result<(bool, Value)> {
    let s = shared()?;
    let (phi1, phi2) = nabla_partition(&s.sigma)?;
    let pts = fixtures::list("newton_points")?;
    let sorted = |mut v: Vec<IntVector>| {
        v.sort();
        v
    };
    let n1 = sorted(phi1.newton_polytope()?.lattice_points());
    let n2 = sorted(phi2.newton_polytope()?.lattice_points());
    let ok1 = n1 == sorted(pts.points("phi_1")?);
    let ok2 = n2 == sorted(pts.points("phi_2")?);
    let ff = face_fan(&s.delta_star_wp)?;
    let support = PlFunction::from_fn(&ff, |_| rat(1, 1));
    let ok3 = support.newton_polytope()? == fixtures::polytope("delta_wp")?;
    Ok((
        ok1 && ok2 && ok3,
        json!({
            "phi_1_points": rows(&n1),
            "phi_2_points": rows(&n2),
            "support_function_newton_is_delta_wp": ok3,
        }),
    ))
}

fn ordered(ts: &fixtures::TorusSections) -> (Vec<String>, Vec<IntVector>) {
    let names: Vec<String> = ts.ordered_variables().into_iter().rev().collect();
    let exps = names.iter().map(|n| ts.variables[n].clone()).collect();
    (names, exps)
}

fn same_generators(got: &[LaurentPoly], stored: &[String], vars: &[String]) -> Result<bool> {
    let mut stored: Vec<LaurentPoly> = stored.iter().map(|s| parse(s, vars)).collect::<Result<_>>()?;
    if got.len() != stored.len() {
        return Ok(false);
    }
    for g in got {
        match stored.iter().position(|p| p == g) {
            Some(i) => {
                stored.remove(i);
            }
            None => return Ok(false),
        }
    }
    Ok(true)
}

fn v10_equations() -> Result<(bool, Value)> {
    let s = shared()?;
    let secs = fixtures::sections()?;
    let mw = &secs.mirror_wp;
    let (xv, xe) = ordered(mw);
    let spec = mw
        .rest
        .get("specialization")
        .and_then(Value::as_object)
        .ok_or_else(|| Error::Parse("missing specialization".into()))?;
    let mut subs = BTreeMap::new();
    for (k, v) in spec {
        let e = v.as_str().ok_or_else(|| Error::Parse(format!("specialization {k}")))?;
        subs.insert(k.clone(), parse(e, &[])?);
    }
    let text = |k: &str| mw.expr(k).ok_or_else(|| Error::Parse(format!("missing {k}")));
    let general = parse_with(text("general")?, &xv, &subs)?;
    let degenerate = parse(text("degenerate")?, &xv)?;
    let eq3 = general == degenerate;

    let w1 = fixtures::chart("w1")?;
    let dv = w1.names();
    let g = parse(&w1.ideal[0], &dv)?;
    let fac = w1
        .factored
        .as_ref()
        .ok_or_else(|| Error::Parse("w1 has no factored form".into()))?;
    let factored = g == &parse(&fac.lhs, &dv)? - &parse(&fac.rhs, &dv)?;

    let ff = face_fan(&s.delta_star_wp)?;
    let support = PlFunction::from_fn(&ff, |_| rat(1, 1));
    let w1_got = chart_restrict(
        &section_points(&degenerate, &xe)?,
        &support,
        &Cone::new(&w1.cone, 4)?,
        &w1.chart_vars(),
    )?;
    let w1_ok = same_generators(std::slice::from_ref(&w1_got), &w1.ideal, &dv)?;

    let (phi1, phi2) = nabla_partition(&s.sigma)?;
    let (yv, ye) = ordered(&secs.bb);
    let eqs: Vec<String> = serde_json::from_value(
        secs.bb
            .rest
            .get("equations")
            .cloned()
            .ok_or_else(|| Error::Parse("missing equations".into()))?,
    )
    .map_err(|e| Error::Parse(e.to_string()))?;
    let mut charts = BTreeMap::new();
    charts.insert("w1".to_string(), json!({ "restricted": [w1_got.to_string()], "matches": w1_ok }));
    let mut all = eq3 && factored && w1_ok;
    for name in ["u1", "u2"] {
        let ch = fixtures::chart(name)?;
        let cone = Cone::new(&ch.cone, 5)?;
        let mut got = Vec::new();
        for (eq, phi) in eqs.iter().zip([&phi1, &phi2]) {
            let f = parse(eq, &yv)?;
            got.push(chart_restrict(&section_points(&f, &ye)?, phi, &cone, &ch.chart_vars())?);
        }
        let ok = same_generators(&got, &ch.ideal, &ch.names())?;
        all &= ok;
        charts.insert(
            name.to_string(),
            json!({ "restricted": got.iter().map(ToString::to_string).collect::<Vec<_>>(), "matches": ok }),
        );
    }
    Ok((
        all,
        json!({ "specialized_general_equals_degenerate": eq3, "w1_factored_form": factored, "charts": charts }),
    ))
}

fn v11_ring_morphisms() -> Result<(bool, Value)> {
    let s = shared()?;
    let w1 = fixtures::chart("w1")?;
    let dv = w1.names();
    let g = parse(&w1.ideal[0], &dv)?;
    let source: Vec<ChartVar> = w1
        .variables
        .iter()
        .map(|v| ChartVar { name: v.name.clone(), exponent: v.exponent.clone(), unit: v.unit })
        .collect();
    let mut all = true;
    let mut out = BTreeMap::new();
    for name in ["u1", "u2"] {
        let ch = fixtures::chart(name)?;
        let cv = ch.names();
        let m = ch
            .morphism
            .as_ref()
            .ok_or_else(|| Error::Parse(format!("{name} has no morphism")))?;
        let forward = MonomialMap::from_exprs(&cv, m.forward.iter())?;
        let inverse = MonomialMap::from_exprs(&dv, m.inverse.iter())?;
        let pullback = pullback_from_lattice_map(&s.h, &source, &ch.chart_vars())?;
        let is_pullback = pullback == forward;
        let mut fixes = true;
        for d in &dv {
            let image = forward
                .images
                .get(d)
                .ok_or_else(|| Error::UnknownVariable(d.clone()))?;
            fixes &= substitute_rational(image, &inverse)?.equals_poly(&LaurentPoly::var(&dv, d)?)?;
        }
        let mut generators_vanish = true;
        for gen in &ch.ideal {
            generators_vanish &= substitute_rational(&parse(gen, &cv)?, &inverse)?.is_zero();
        }
        let rel = ch
            .relation
            .as_ref()
            .ok_or_else(|| Error::Parse(format!("{name} has no relation")))?;
        let relation = &parse(&rel.lhs, &cv)? - &parse(&rel.rhs, &cv)?;
        let cofactor = parse(&m.relation_cofactor, &dv)?;
        let relation_ok = verify_identity_mod(&substitute(&relation, &inverse)?, &g, &cofactor)?;
        let monoid_ok = monoid_relation_holds(&ch, &relation)?;
        let ok = is_pullback && fixes && generators_vanish && relation_ok && monoid_ok;
        all &= ok;
        out.insert(
            m.name.clone(),
            json!({
                "pullback_of_transpose": is_pullback,
                "pullback": pullback.images.iter().map(|(k, v)| (k.clone(), v.to_string())).collect::<BTreeMap<_, _>>(),
                "inverse_fixes_coordinates": fixes,
                "ideal_generators_vanish": generators_vanish,
                "relation_via_cofactor": relation_ok,
                "relation_holds_on_exponents": monoid_ok,
            }),
        );
    }
    Ok((all, json!(out)))
}

/// Both sides of a binomial relation have the same character.
fn monoid_relation_holds(ch: &fixtures::Chart, relation: &LaurentPoly) -> Result<bool> {
    let exps: Vec<IntVector> = ch.variables.iter().map(|v| v.exponent.clone()).collect();
    let pts = section_points(relation, &exps)?;
    Ok(pts.len() == 2 && pts[0].0 == pts[1].0)
}

/// `a . (D1, D2, D3) + c` for the four forms whose pairwise vanishing cuts out the lines.
fn line_forms() -> Vec<([i64; 3], i64)> {
    vec![([1, 0, 0], 0), ([0, 1, 0], 0), ([0, 0, 1], 0), ([-1, -1, -1], 1)]
}

/// The point where the listed forms take the listed values, if unique.
fn solve_forms(conds: &[(usize, Rational)]) -> Option<Vec<Rational>> {
    let forms = line_forms();
    let a: Vec<RationalVector> = conds
        .iter()
        .map(|(k, _)| RationalVector::new(forms[*k].0.iter().map(|&x| rat(x, 1)).collect()))
        .collect();
    let b: Vec<Rational> = conds.iter().map(|(k, v)| v - rat(forms[*k].1, 1)).collect();
    if rank_rational(&a) < 3 {
        return None;
    }
    solve_rational(&a, &b, 3).map(|x| x.coords().to_vec())
}

fn v12_singular_locus() -> Result<(bool, Value)> {
    let w1 = fixtures::chart("w1")?;
    let dv = w1.names();
    let g = parse(&w1.ideal[0], &dv)?;
    let b = rat(5, 2);
    let point = |d: &[Rational]| -> BTreeMap<String, Rational> {
        let mut m: BTreeMap<String, Rational> = dv.iter().take(3).cloned().zip(d.iter().cloned()).collect();
        m.insert(dv[3].clone(), -&b);
        m
    };
    let samples = [rat(1, 3), rat(2, 5), rat(3, 7), rat(-2, 1), rat(7, 2)];
    let lines: Vec<(usize, usize)> = (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).collect();
    let mut line_results = Vec::new();
    let mut all = true;
    for &(i, j) in &lines {
        let k = (0..4).find(|k| *k != i && *k != j).expect("third form");
        let mut singular = 0;
        let mut rank3 = 0;
        for t in &samples {
            let x = solve_forms(&[(i, rat(0, 1)), (j, rat(0, 1)), (k, t.clone())])
                .ok_or_else(|| Error::Infeasible("line sample".into()))?;
            let p = point(&x);
            let (v, grad) = eval_gradient(&g, &p, &b)?;
            if num_traits::Zero::is_zero(&v) && grad.iter().all(num_traits::Zero::is_zero) {
                singular += 1;
            }
            let h = eval_hessian(&g, &p, &b)?;
            if rank_rational(&h.into_iter().map(RationalVector::new).collect::<Vec<_>>()) == 3 {
                rank3 += 1;
            }
        }
        all &= singular == samples.len() && rank3 == samples.len();
        line_results.push(json!({ "forms": [i, j], "singular_samples": singular, "transverse_rank_3": rank3 }));
    }
    let generic = point(&[rat(1, 7), rat(1, 11), rat(1, 13)]);
    let mut generic = generic;
    generic.insert(dv[3].clone(), rat(2, 1));
    let (_, ggrad) = eval_gradient(&g, &generic, &b)?;
    let generic_smooth = !ggrad.iter().all(num_traits::Zero::is_zero);
    let mut meets: BTreeMap<Vec<Rational>, BTreeSet<usize>> = BTreeMap::new();
    for (a, &(i, j)) in lines.iter().enumerate() {
        for (c, &(k, l)) in lines.iter().enumerate().skip(a + 1) {
            let idx: BTreeSet<usize> = [i, j, k, l].into_iter().collect();
            let conds: Vec<(usize, Rational)> = idx.iter().map(|&f| (f, rat(0, 1))).collect();
            if let Some(x) = solve_forms(&conds) {
                let e = meets.entry(x).or_default();
                e.insert(a);
                e.insert(c);
            }
        }
    }
    let triple: Vec<&Vec<Rational>> = meets.iter().filter(|(_, s)| s.len() >= 3).map(|(p, _)| p).collect();
    let mut triple_rank = Vec::new();
    let mut triple_ok = triple.len() == 4;
    for x in &triple {
        let p = point(x);
        let (v, grad) = eval_gradient(&g, &p, &b)?;
        let h = eval_hessian(&g, &p, &b)?;
        let r = rank_rational(&h.into_iter().map(RationalVector::new).collect::<Vec<_>>());
        triple_ok &= num_traits::Zero::is_zero(&v) && grad.iter().all(num_traits::Zero::is_zero) && r == 1;
        triple_rank.push(r);
    }
    Ok((
        all && generic_smooth && triple_ok,
        json!({
            "b": "5/2",
            "lines": line_results,
            "generic_point_smooth": generic_smooth,
            "triple_points": triple.iter().map(|x| x.iter().map(ToString::to_string).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "hessian_rank_at_triple_points": triple_rank,
        }),
    ))
}

fn v13_symmetry() -> Result<(bool, Value)> {
    let s = shared()?;
    let mut out = Vec::new();
    let mut all = true;
    for perm in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
        let mut m = vec![vec![0i64; 5]; 5];
        for (i, &p) in perm.iter().enumerate() {
            m[p][i] = 1;
        }
        m[3][3] = 1;
        m[4][4] = 1;
        let r: Vec<&[i64]> = m.iter().map(Vec::as_slice).collect();
        let l = LatticeMap::new(IntegerMatrix::from_i64_rows(&r)?, LatticeTag::NPrime, LatticeTag::NPrime);
        let descended = symmetry_descends(&l, &s.h);
        let permutes = permutes_maximal_cones(&l, &s.sigma_prime)?;
        all &= descended.is_ok() && permutes;
        out.push(json!({
            "permutation": perm,
            "descends_to": descended.as_ref().ok().map(|d| rows(&d.matrix.row_vectors())),
            "permutes_sigma_prime": permutes,
        }));
    }
    Ok((all, json!(out)))
}

fn v14_amenable() -> Result<(bool, Value)> {
    let s = shared()?;
    let (phi1, phi2) = nabla_partition(&s.sigma)?;
    let nabla_ok = nef_partition_check(&NefPartition::new(vec![phi1, phi2]))?;
    let p5 = fixtures::polytope("delta_p5")?;
    let f5 = face_fan(&p5)?;
    let nl = fixtures::list("nef_p5")?;
    let parts: Vec<PlFunction> = nl.point_sets("parts")?.iter().map(|set| indicator(&f5, set)).collect();
    let np = NefPartition::new(parts);
    let p5_ok = nef_partition_check(&np)?;
    let amen: Vec<(Vec<i64>, bool)> = nl.points("amenable")?.iter().map(|v| (v.to_i64s(), amenable_check(v, &np))).collect();
    let not: Vec<(Vec<i64>, bool)> = nl
        .points("not_amenable")?
        .iter()
        .map(|v| (v.to_i64s(), amenable_check(v, &np)))
        .collect();
    Ok((
        nabla_ok && p5_ok && amen.iter().all(|x| x.1) && not.iter().all(|x| !x.1),
        json!({
            "nabla_partition": nabla_ok,
            "p5_partition": p5_ok,
            "amenable": amen,
            "not_amenable": not,
        }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_check() {
        assert!(run("V99").is_err());
    }

    #[test]
    fn ids_match_table() {
        let table: Vec<String> = fixtures::list_checks().into_iter().map(|c| c.id).collect();
        assert_eq!(table, CHECK_IDS.iter().map(|s| s.to_string()).collect::<Vec<_>>());
    }

    #[test]
    fn line_forms_meet_in_four_points() {
        let mut pts = BTreeSet::new();
        for skip in 0..4 {
            let conds: Vec<(usize, Rational)> = (0..4).filter(|&k| k != skip).map(|k| (k, rat(0, 1))).collect();
            pts.insert(solve_forms(&conds[..3]).unwrap());
        }
        assert_eq!(pts.len(), 4);
    }
}
