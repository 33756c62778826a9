//! Laurent polynomial identities on the bundled charts, plus ring and
//! substitution properties on random input.

use std::collections::BTreeMap;

use proptest::prelude::*;
use toricmorph::fixtures;
use toricmorph::lattice::rat;
use toricmorph::laurent::{
    eval_gradient, parse, pullback_from_lattice_map, substitute, substitute_rational, verify_identity,
    verify_identity_mod, ChartVar, RationalFunction,
};
use toricmorph::{LaurentPoly, MonomialMap, ParamPoly};

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn chart_var_list(c: &fixtures::Chart) -> Vec<ChartVar> {
    c.chart_vars().vars
}

#[test]
fn forward_map_on_first_coordinate() {
    let u1 = fixtures::chart("u1").unwrap();
    let r3 = u1.morphism.as_ref().unwrap();
    let m = MonomialMap::from_exprs(&u1.names(), r3.forward.iter()).unwrap();
    let w = names(&["D1", "D2", "D3", "D4"]);
    let got = substitute(&parse("D1", &w).unwrap(), &m).unwrap();
    assert_eq!(got, parse("B1*B6^-1", &u1.names()).unwrap());
    assert_eq!(substitute(&parse("D4", &w).unwrap(), &m).unwrap(), parse("B5*B6^-1", &u1.names()).unwrap());
}

#[test]
fn identity_map_fixes_everything() {
    let v = names(&["x", "y"]);
    let f = parse("x^2*y^-1 + b*x - 3", &v).unwrap();
    assert_eq!(substitute(&f, &MonomialMap::identity(&v)).unwrap(), f);
}

#[test]
fn inverse_composed_with_forward_fixes_coordinates() {
    for chart in ["u1", "u2"] {
        let c = fixtures::chart(chart).unwrap();
        let mor = c.morphism.as_ref().unwrap();
        let w = fixtures::chart(&mor.target_chart).unwrap().names();
        let inv = MonomialMap::from_exprs(&w, mor.inverse.iter()).unwrap();
        for (d, image) in &mor.forward {
            let back = substitute_rational(&parse(image, &c.names()).unwrap(), &inv).unwrap();
            assert!(back.equals_poly(&parse(d, &w).unwrap()).unwrap(), "{chart}: {d}");
        }
    }
}

#[test]
fn transpose_of_h_star_gives_the_forward_monomials() {
    let h = fixtures::map("h_star").unwrap();
    let w1 = fixtures::chart("w1").unwrap();
    let u1 = fixtures::chart("u1").unwrap();
    let m = pullback_from_lattice_map(&h, &chart_var_list(&w1), &u1.chart_vars()).unwrap();
    assert_eq!(m.images["D1"], parse("B1*B6^-1", &u1.names()).unwrap());
    assert_eq!(m.images["D4"], parse("B5*B6^-1", &u1.names()).unwrap());
    let id = toricmorph::LatticeMap::identity(4, toricmorph::LatticeTag::N);
    let same = pullback_from_lattice_map(&id, &chart_var_list(&w1), &w1.chart_vars()).unwrap();
    assert_eq!(same.images, MonomialMap::identity(&w1.names()).images);
}

#[test]
fn mirror_equation_expansion() {
    let x = names(&["X1", "X2", "X3", "X4"]);
    let lhs = parse("X1*(1 + b*(X1*X2*X3*X4)^-1)^2", &x).unwrap();
    let rhs = parse("X1 + 2*b*(X2*X3*X4)^-1 + b^2*X1^-1*(X2*X3*X4)^-2", &x).unwrap();
    assert!(verify_identity(&lhs, &rhs));
}

#[test]
fn w1_generator_factors() {
    let w1 = fixtures::chart("w1").unwrap();
    let v = w1.names();
    let g = parse(&w1.ideal[0], &v).unwrap();
    let factored = parse("(1 + b*D4^-1)^2 - D1*D2*D3*D4^-1*(1 - D1 - D2 - D3)", &v).unwrap();
    assert_eq!(g, factored);
}

#[test]
fn monoid_relation_holds_modulo_the_w1_generator() {
    let w1 = fixtures::chart("w1").unwrap();
    let v = w1.names();
    let g = parse(&w1.ideal[0], &v).unwrap();
    let u1 = fixtures::chart("u1").unwrap();
    let mor = u1.morphism.as_ref().unwrap();
    let inv: BTreeMap<String, LaurentPoly> = mor
        .inverse
        .iter()
        .map(|(k, e)| (k.clone(), parse(e, &v).unwrap()))
        .collect();
    let lhs = &(&inv["B1"] * &inv["B2"]) * &inv["B3"];
    let rhs = &inv["B4"] * &inv["B4"];
    let cofactor = parse(&mor.relation_cofactor, &v).unwrap();
    assert!(verify_identity_mod(&(&lhs - &rhs), &g, &cofactor).unwrap());
    assert!(!verify_identity_mod(&(&lhs - &rhs), &g, &(-&cofactor)).unwrap());
}

#[test]
fn singular_and_smooth_points() {
    let w1 = fixtures::chart("w1").unwrap();
    let v = w1.names();
    let g = parse(&w1.ideal[0], &v).unwrap();
    let b = rat(5, 2);
    let point = |d: [(i64, i64); 4]| -> BTreeMap<String, _> {
        v.iter().cloned().zip(d.iter().map(|&(n, m)| rat(n, m))).collect()
    };
    let (val, grad) = eval_gradient(&g, &point([(0, 1), (0, 1), (1, 3), (-5, 2)]), &b).unwrap();
    assert_eq!(val, rat(0, 1));
    assert!(grad.iter().all(|x| *x == rat(0, 1)));
    let (_, grad) = eval_gradient(&g, &point([(1, 7), (1, 11), (1, 13), (2, 1)]), &b).unwrap();
    assert!(grad.iter().any(|x| *x != rat(0, 1)));
    let one = LaurentPoly::one(&v);
    let (val, grad) = eval_gradient(&one, &point([(1, 7), (1, 11), (1, 13), (2, 1)]), &b).unwrap();
    assert_eq!(val, rat(1, 1));
    assert!(grad.iter().all(|x| *x == rat(0, 1)));
}

const VARS: [&str; 3] = ["x", "y", "z"];

fn param() -> impl Strategy<Value = ParamPoly> {
    prop::collection::vec((0u32..3, -4i64..5, 1i64..4), 0..3).prop_map(|ts| {
        ts.into_iter()
            .fold(ParamPoly::zero(), |acc, (k, n, d)| &acc + &ParamPoly::term(k, rat(n, d)))
    })
}

fn poly() -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec((prop::collection::vec(-2i64..3, 3), param()), 0..5)
        .prop_map(|ts| LaurentPoly::from_terms(&names(&VARS), ts))
}

fn monomial_map() -> impl Strategy<Value = MonomialMap> {
    prop::collection::vec((prop::collection::vec(-2i64..3, 3), prop::bool::ANY), 3).prop_map(|imgs| {
        let v = names(&VARS);
        let mut m = MonomialMap::new(&v);
        for (name, (e, neg)) in v.iter().zip(imgs) {
            let c = ParamPoly::constant(rat(if neg { -1 } else { 1 }, 1));
            m.images.insert(name.clone(), LaurentPoly::monomial(&v, e, c));
        }
        m
    })
}

fn compose(first: &MonomialMap, then: &MonomialMap) -> MonomialMap {
    let mut m = MonomialMap::new(&then.target_vars);
    for (k, img) in &first.images {
        m.images.insert(k.clone(), substitute(img, then).unwrap());
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(f in poly(), g in poly(), h in poly()) {
        prop_assert_eq!(&(&f * &g) * &h, &f * &(&g * &h));
        prop_assert_eq!(&f * &(&g + &h), &(&f * &g) + &(&f * &h));
        prop_assert_eq!(&f * &g, &g * &f);
        prop_assert_eq!(&f + &g, &g + &f);
        prop_assert!((&f - &f).is_zero());
        prop_assert_eq!(&f * &LaurentPoly::one(&names(&VARS)), f.clone());
    }

    #[test]
    fn pullback_is_multiplicative(f in poly(), g in poly(), m in monomial_map()) {
        let lhs = substitute(&(&f * &g), &m).unwrap();
        let rhs = &substitute(&f, &m).unwrap() * &substitute(&g, &m).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(
            substitute(&(&f + &g), &m).unwrap(),
            &substitute(&f, &m).unwrap() + &substitute(&g, &m).unwrap()
        );
    }

    #[test]
    fn pullback_composes(f in poly(), m1 in monomial_map(), m2 in monomial_map()) {
        let step = substitute(&substitute(&f, &m1).unwrap(), &m2).unwrap();
        prop_assert_eq!(step, substitute(&f, &compose(&m1, &m2)).unwrap());
    }

    #[test]
    fn display_parses_back(f in poly()) {
        let v = names(&VARS);
        prop_assert_eq!(parse(&f.to_string(), &v).unwrap(), f);
    }

    #[test]
    fn json_round_trip(f in poly()) {
        let s = serde_json::to_string(&f).unwrap();
        let g: LaurentPoly = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(g, f);
    }

    #[test]
    fn specialization_commutes_with_evaluation(f in poly(), n in -5i64..6, xs in prop::collection::vec(1i64..5, 3)) {
        let b = rat(n, 3);
        let point: BTreeMap<String, _> = names(&VARS).into_iter().zip(xs.iter().map(|&x| rat(x, 2))).collect();
        prop_assert_eq!(f.eval(&point, &b).unwrap(), f.specialize(&b).eval(&point, &rat(0, 1)).unwrap());
    }

    #[test]
    fn rational_functions_are_fractions(f in poly(), m in monomial_map()) {
        let r = substitute_rational(&f, &m).unwrap();
        prop_assert!(r.equals_poly(&substitute(&f, &m).unwrap()).unwrap());
        let q = RationalFunction::from_poly(f.clone());
        prop_assert!(q.equals_poly(&f).unwrap());
    }
}
