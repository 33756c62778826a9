use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{LaurentPoly, ParamPoly};
use crate::error::{Error, Result};
use crate::fan::{Cone, PlFunction};
use crate::lattice::{independent_subset, express_in_basis, IntVector};
use crate::morphism::LatticeMap;

/// Images of source variables, all expressed over `target_vars`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialMap {
    pub target_vars: Vec<String>,
    pub images: BTreeMap<String, LaurentPoly>,
}

impl MonomialMap {
    pub fn new(target_vars: &[String]) -> Self {
        MonomialMap {
            target_vars: target_vars.to_vec(),
            images: BTreeMap::new(),
        }
    }

    pub fn identity(vars: &[String]) -> Self {
        let mut m = Self::new(vars);
        for v in vars {
            m.images.insert(v.clone(), LaurentPoly::var(vars, v).expect("own variable"));
        }
        m
    }

    /// Parses each image expression over `target_vars`.
    pub fn from_exprs<'a>(
        target_vars: &[String],
        exprs: impl IntoIterator<Item = (&'a String, &'a String)>,
    ) -> Result<Self> {
        let mut m = Self::new(target_vars);
        for (k, e) in exprs {
            m.images.insert(k.clone(), super::parse(e, target_vars)?);
        }
        Ok(m)
    }

    fn image(&self, name: &str) -> Result<&LaurentPoly> {
        self.images
            .get(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }
}

/// Substitutes and expands. Negative powers are allowed only where the image
/// is a monomial with constant coefficient.
pub fn substitute(f: &LaurentPoly, m: &MonomialMap) -> Result<LaurentPoly> {
    let mut out = LaurentPoly::zero(&m.target_vars);
    let mut cache: BTreeMap<(usize, i64), LaurentPoly> = BTreeMap::new();
    for (e, c) in f.terms() {
        let mut t = LaurentPoly::constant(&m.target_vars, c.clone());
        for (i, &k) in e.iter().enumerate() {
            if k == 0 {
                continue;
            }
            let name = &f.vars()[i];
            let p = match cache.get(&(i, k)) {
                Some(p) => p.clone(),
                None => {
                    let img = m.image(name)?;
                    let p = img.pow(k).map_err(|err| match err {
                        Error::NonMonomialInverse(_) => Error::NonMonomialInverse(name.clone()),
                        other => other,
                    })?;
                    cache.insert((i, k), p.clone());
                    p
                }
            };
            t = t.checked_mul(&p)?;
        }
        out = &out + &t;
    }
    out.with_vars(&m.target_vars)
}

/// Quotient of two Laurent polynomials; equality is cross-multiplication.
#[derive(Clone, Debug)]
pub struct RationalFunction {
    pub num: LaurentPoly,
    pub den: LaurentPoly,
}

impl RationalFunction {
    pub fn from_poly(p: LaurentPoly) -> Self {
        let den = LaurentPoly::one(p.vars());
        RationalFunction { num: p, den }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn mul(&self, other: &RationalFunction) -> Result<RationalFunction> {
        Ok(RationalFunction {
            num: self.num.checked_mul(&other.num)?,
            den: self.den.checked_mul(&other.den)?,
        })
    }

    pub fn add(&self, other: &RationalFunction) -> Result<RationalFunction> {
        if self.den == other.den {
            return Ok(RationalFunction {
                num: &self.num + &other.num,
                den: self.den.clone(),
            });
        }
        Ok(RationalFunction {
            num: &self.num.checked_mul(&other.den)? + &other.num.checked_mul(&self.den)?,
            den: self.den.checked_mul(&other.den)?,
        })
    }

    pub fn recip(&self) -> Result<RationalFunction> {
        if self.num.is_zero() {
            return Err(Error::DivisionByZero("rational function".into()));
        }
        Ok(RationalFunction {
            num: self.den.clone(),
            den: self.num.clone(),
        })
    }

    pub fn pow(&self, k: i64) -> Result<RationalFunction> {
        let base = if k < 0 { self.recip()? } else { self.clone() };
        let n = k.unsigned_abs();
        let exp = i64::try_from(n).map_err(|_| Error::Overflow)?;
        Ok(RationalFunction {
            num: base.num.pow(exp)?,
            den: base.den.pow(exp)?,
        })
    }

    pub fn equals(&self, other: &RationalFunction) -> Result<bool> {
        Ok(self.num.checked_mul(&other.den)? == other.num.checked_mul(&self.den)?)
    }

    pub fn equals_poly(&self, p: &LaurentPoly) -> Result<bool> {
        Ok(self.num == p.checked_mul(&self.den)?)
    }
}

/// Substitution into the field of fractions: any image may be inverted.
pub fn substitute_rational(f: &LaurentPoly, m: &MonomialMap) -> Result<RationalFunction> {
    let one = LaurentPoly::one(&m.target_vars);
    let mut out = RationalFunction::from_poly(LaurentPoly::zero(&m.target_vars));
    for (e, c) in f.terms() {
        let mut t = RationalFunction::from_poly(one.scale(c));
        for (i, &k) in e.iter().enumerate() {
            if k != 0 {
                let img = RationalFunction::from_poly(m.image(&f.vars()[i])?.clone());
                t = t.mul(&img.pow(k)?)?;
            }
        }
        out = out.add(&t)?;
    }
    Ok(out)
}

/// A chart coordinate: a character of the torus, optionally invertible on the chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartVar {
    pub name: String,
    pub exponent: IntVector,
    pub unit: bool,
}

/// Coordinates of an affine chart together with its cone.
///
/// Non-unit coordinates pair positively with the interior of the cone and
/// units pair to zero, which bounds every rewriting search.
#[derive(Clone, Debug)]
pub struct ChartVars {
    pub vars: Vec<ChartVar>,
    pub cone: Vec<IntVector>,
}

impl ChartVars {
    pub fn new(vars: Vec<ChartVar>, cone: Vec<IntVector>) -> Self {
        ChartVars { vars, cone }
    }

    pub fn names(&self) -> Vec<String> {
        self.vars.iter().map(|v| v.name.clone()).collect()
    }

    fn weight_vector(&self) -> IntVector {
        let dim = self.vars.first().map_or(0, |v| v.exponent.dim());
        self.cone
            .iter()
            .fold(IntVector::zeros(dim), |acc, r| &acc + r)
    }

    /// Exponents (in chart variable order) of a monomial equal to `z^target`.
    ///
    /// Among all solutions with nonnegative non-unit exponents this returns the
    /// one of least total non-unit degree, ties going to the lexicographically
    /// largest exponent vector.
    pub fn express(&self, target: &IntVector) -> Result<Vec<i64>> {
        let no_solution = || Error::NoChartSolution(target.to_string());
        let w = self.weight_vector();
        let plain: Vec<usize> = (0..self.vars.len()).filter(|&i| !self.vars[i].unit).collect();
        let units: Vec<usize> = (0..self.vars.len()).filter(|&i| self.vars[i].unit).collect();
        let unit_vecs: Vec<IntVector> = units.iter().map(|&i| self.vars[i].exponent.clone()).collect();
        let basis_idx = independent_subset(&unit_vecs);
        let basis: Vec<IntVector> = basis_idx.iter().map(|&i| unit_vecs[i].clone()).collect();
        let weights: Vec<BigInt> = plain.iter().map(|&i| self.vars[i].exponent.dot(&w)).collect();
        for u in &units {
            if !self.vars[*u].exponent.dot(&w).is_zero() {
                return Err(Error::NoChartSolution(format!("unit {} is not a unit", self.vars[*u].name)));
            }
        }
        if weights.iter().any(|x| !x.is_positive()) {
            return Err(Error::NoChartSolution("chart coordinate with nonpositive weight".into()));
        }
        let total = target.dot(&w);
        if total.is_negative() {
            return Err(no_solution());
        }
        let weights: Vec<u64> = weights
            .iter()
            .map(|x| x.to_u64().ok_or(Error::Overflow))
            .collect::<Result<_>>()?;
        let total = total.to_u64().ok_or(Error::Overflow)?;
        let mut candidates: Vec<Vec<u64>> = Vec::new();
        compositions(&weights, total, &mut vec![0; weights.len()], 0, &mut candidates);
        candidates.sort_by(|a, b| {
            let da: u64 = a.iter().sum();
            let db: u64 = b.iter().sum();
            da.cmp(&db).then_with(|| b.cmp(a))
        });
        for cand in candidates {
            let mut rest = target.clone();
            for (k, &i) in plain.iter().enumerate() {
                rest = &rest - &self.vars[i].exponent.scale(&BigInt::from(cand[k]));
            }
            let unit_coords = if basis.is_empty() {
                if !rest.is_zero() {
                    continue;
                }
                vec![]
            } else {
                let Some(x) = express_in_basis(&basis, &rest) else {
                    continue;
                };
                let back = basis
                    .iter()
                    .zip(x.coords())
                    .try_fold(IntVector::zeros(rest.dim()), |acc, (b, c)| {
                        c.is_integer().then(|| &acc + &b.scale(&c.to_integer()))
                    });
                if back.as_ref() != Some(&rest) {
                    continue;
                }
                x.coords()
                    .iter()
                    .map(|c| c.to_integer().to_i64().ok_or(Error::Overflow))
                    .collect::<Result<Vec<_>>>()?
            };
            let mut exp = vec![0i64; self.vars.len()];
            for (k, &i) in plain.iter().enumerate() {
                exp[i] = i64::try_from(cand[k]).map_err(|_| Error::Overflow)?;
            }
            for (k, &bi) in basis_idx.iter().enumerate() {
                exp[units[bi]] = unit_coords[k];
            }
            return Ok(exp);
        }
        Err(no_solution())
    }
}

/// All `c >= 0` with `sum c_i * weights_i == total`.
fn compositions(weights: &[u64], total: u64, cur: &mut Vec<u64>, i: usize, out: &mut Vec<Vec<u64>>) {
    if i == weights.len() {
        if total == 0 {
            out.push(cur.clone());
        }
        return;
    }
    let mut k = 0;
    while k * weights[i] <= total {
        cur[i] = k;
        compositions(weights, total - k * weights[i], cur, i + 1, out);
        k += 1;
    }
    cur[i] = 0;
}

/// Monomial map induced by a lattice map on characters: a source variable with
/// exponent `u` goes to the target-chart monomial with exponent `m^T u`.
pub fn pullback_from_lattice_map(
    m: &LatticeMap,
    source_vars: &[ChartVar],
    target: &ChartVars,
) -> Result<MonomialMap> {
    let dual = m.transpose();
    let names = target.names();
    let mut out = MonomialMap::new(&names);
    for v in source_vars {
        let image = dual.apply(&v.exponent)?;
        let exp = target.express(&image)?;
        out.images
            .insert(v.name.clone(), LaurentPoly::monomial(&names, exp, ParamPoly::one()));
    }
    Ok(out)
}

/// Lattice points and coefficients of a polynomial in torus coordinates whose
/// variables have the given character exponents.
pub fn section_points(f: &LaurentPoly, exponents: &[IntVector]) -> Result<Vec<(IntVector, ParamPoly)>> {
    if exponents.len() != f.vars().len() {
        return Err(Error::DimensionMismatch {
            expected: f.vars().len(),
            found: exponents.len(),
        });
    }
    let dim = exponents.first().map_or(0, IntVector::dim);
    Ok(f.terms()
        .iter()
        .map(|(e, c)| {
            let p = e
                .iter()
                .zip(exponents)
                .fold(IntVector::zeros(dim), |acc, (k, u)| &acc + &u.scale(&BigInt::from(*k)));
            (p, c.clone())
        })
        .collect())
}

/// Trivializes a section on the chart of `cone` and rewrites it in chart coordinates.
///
/// The multiplier is `z^{-u}` where `u` is the linear piece of `phi`
/// (`<u, r> = -phi(r)`) on a maximal cone containing `cone`. When several
/// maximal cones contain it the pieces differ by characters that are units on
/// the chart; the piece of least L1 norm is used, ties going to the
/// lexicographically largest.
pub fn chart_restrict(
    section: &[(IntVector, ParamPoly)],
    phi: &PlFunction,
    cone: &Cone,
    chart: &ChartVars,
) -> Result<LaurentPoly> {
    let multiplier = chart_multiplier(phi, cone)?;
    let names = chart.names();
    let mut out = LaurentPoly::zero(&names);
    for (p, c) in section {
        let target = p - &multiplier;
        let exp = chart.express(&target)?;
        out = &out + &LaurentPoly::monomial(&names, exp, c.clone());
    }
    Ok(out)
}

/// The linear piece `u` of `phi` used by [`chart_restrict`].
pub fn chart_multiplier(phi: &PlFunction, cone: &Cone) -> Result<IntVector> {
    let fan = phi.fan();
    let mut best: Option<IntVector> = None;
    for (i, c) in fan.cones().iter().enumerate() {
        if !cone.rays().iter().all(|r| c.contains(r)) {
            continue;
        }
        let Some(u) = phi.linear_piece(i)? else {
            continue;
        };
        let Some(u) = u.to_integer() else {
            continue;
        };
        let key = (l1(&u), std::cmp::Reverse(u.clone()));
        if best.as_ref().is_none_or(|b| key < (l1(b), std::cmp::Reverse(b.clone()))) {
            best = Some(u);
        }
    }
    best.ok_or(Error::ConeNotInFan)
}

fn l1(u: &IntVector) -> BigInt {
    u.coords().iter().map(|x| x.abs()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::face_fan;
    use crate::lattice::rat;
    use crate::laurent::parse;
    use crate::polytope::Polytope;

    fn vars(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn iv(v: &[i64]) -> IntVector {
        IntVector::from_i64s(v)
    }

    #[test]
    fn identity_substitution() {
        let v = vars(&["x", "y"]);
        let f = parse("x^-1*y^2 + b*x - 3", &v).unwrap();
        assert_eq!(substitute(&f, &MonomialMap::identity(&v)).unwrap(), f);
    }

    #[test]
    fn non_monomial_inverse_is_rejected() {
        let v = vars(&["t"]);
        let mut m = MonomialMap::new(&v);
        m.images.insert("x".into(), parse("1 - t", &v).unwrap());
        let f = parse("x^-1", &vars(&["x"])).unwrap();
        assert_eq!(substitute(&f, &m), Err(Error::NonMonomialInverse("x".into())));
        let r = substitute_rational(&f, &m).unwrap();
        assert!(r.mul(&RationalFunction::from_poly(parse("1 - t", &v).unwrap())).unwrap().equals_poly(&LaurentPoly::one(&v)).unwrap());
    }

    #[test]
    fn chart_rewriting_prefers_low_degree() {
        let chart = ChartVars::new(
            vec![
                ChartVar { name: "p".into(), exponent: iv(&[1, 0]), unit: false },
                ChartVar { name: "q".into(), exponent: iv(&[1, 2]), unit: false },
                ChartVar { name: "r".into(), exponent: iv(&[2, 2]), unit: false },
            ],
            vec![iv(&[0, 1]), iv(&[2, -1])],
        );
        assert_eq!(chart.express(&iv(&[2, 2])).unwrap(), vec![0, 0, 1]);
        assert_eq!(chart.express(&iv(&[3, 2])).unwrap(), vec![1, 0, 1]);
        assert_eq!(chart.express(&iv(&[3, 4])).unwrap(), vec![0, 1, 1]);
        assert!(chart.express(&iv(&[0, -1])).is_err());
    }

    #[test]
    fn single_monomial_on_its_vertex_chart() {
        let p = Polytope::from_integer_points(&[iv(&[1, 0]), iv(&[0, 1]), iv(&[-1, -1])]).unwrap();
        let fan = face_fan(&p).unwrap();
        let phi = PlFunction::from_fn(&fan, |_| rat(1, 1));
        let cone = fan.cones()[0].clone();
        let u = chart_multiplier(&phi, &cone).unwrap();
        let dual: Vec<IntVector> = cone.facet_normals().to_vec();
        let chart = ChartVars::new(
            dual.iter()
                .enumerate()
                .map(|(i, e)| ChartVar { name: format!("t{i}"), exponent: e.clone(), unit: false })
                .collect(),
            cone.rays().to_vec(),
        );
        let out = chart_restrict(&[(u, ParamPoly::one())], &phi, &cone, &chart).unwrap();
        assert_eq!(out, LaurentPoly::one(&chart.names()));
    }
}
