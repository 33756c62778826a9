//! Laurent polynomials over `Q[b]`, substitutions between coordinate charts,
//! chart restriction of torus sections and exact evaluation of derivatives.
//!
//! Exponents are `i64` and every exponent operation is overflow-checked.
//! The single parameter `b` has nonnegative powers only.

mod chart;
mod parse;
mod serial;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Pow, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{rat_int, Rational};

pub use chart::{
    chart_restrict, pullback_from_lattice_map, section_points, substitute, substitute_rational,
    ChartVar, ChartVars, MonomialMap, RationalFunction,
};
pub use parse::{parse, parse_with};

/// Polynomial in the parameter `b`, stored as power -> nonzero coefficient.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParamPoly {
    coeffs: BTreeMap<u32, Rational>,
}

impl ParamPoly {
    pub fn zero() -> Self {
        ParamPoly::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(0, c)
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    /// `c * b^k`.
    pub fn term(k: u32, c: Rational) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(k, c);
        }
        ParamPoly { coeffs }
    }

    pub fn b() -> Self {
        Self::term(1, Rational::one())
    }

    pub fn coefficients(&self) -> &BTreeMap<u32, Rational> {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// The value when the polynomial does not involve `b`.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.coeffs.len() {
            0 => Some(Rational::zero()),
            1 => self.coeffs.get(&0).cloned(),
            _ => None,
        }
    }

    pub fn eval(&self, b: &Rational) -> Rational {
        self.coeffs.iter().map(|(k, c)| c * Pow::pow(b, *k)).sum()
    }

    pub fn scale(&self, c: &Rational) -> ParamPoly {
        if c.is_zero() {
            return ParamPoly::zero();
        }
        ParamPoly {
            coeffs: self.coeffs.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    fn add_term(&mut self, k: u32, c: Rational) {
        let e = self.coeffs.entry(k).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&k);
        }
    }
}

impl Add for &ParamPoly {
    type Output = ParamPoly;
    fn add(self, rhs: &ParamPoly) -> ParamPoly {
        let mut out = self.clone();
        for (k, c) in &rhs.coeffs {
            out.add_term(*k, c.clone());
        }
        out
    }
}

impl Neg for &ParamPoly {
    type Output = ParamPoly;
    fn neg(self) -> ParamPoly {
        ParamPoly {
            coeffs: self.coeffs.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }
}

impl Mul for &ParamPoly {
    type Output = ParamPoly;
    fn mul(self, rhs: &ParamPoly) -> ParamPoly {
        let mut out = ParamPoly::zero();
        for (i, a) in &self.coeffs {
            for (j, c) in &rhs.coeffs {
                out.add_term(i + j, a * c);
            }
        }
        out
    }
}

impl fmt::Display for ParamPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        for (n, (k, c)) in self.coeffs.iter().rev().enumerate() {
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if n == 0 {
                if sign == "-" {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            write_scaled(f, &mag, *k)?;
        }
        Ok(())
    }
}

/// A rational in the parseable form `n` or `n*d^-1`.
fn rational_str(r: &Rational) -> String {
    if r.is_integer() {
        r.to_string()
    } else {
        format!("{}*{}^-1", r.numer(), r.denom())
    }
}

fn write_scaled(f: &mut fmt::Formatter<'_>, mag: &Rational, k: u32) -> fmt::Result {
    let b = match k {
        0 => String::new(),
        1 => "b".to_string(),
        k => format!("b^{k}"),
    };
    match (mag.is_one(), b.is_empty()) {
        (true, true) => f.write_str("1"),
        (true, false) => f.write_str(&b),
        (false, true) => f.write_str(&rational_str(mag)),
        (false, false) => write!(f, "{}*{b}", rational_str(mag)),
    }
}

/// Sparse Laurent polynomial in named variables with [`ParamPoly`] coefficients.
///
/// Operations between polynomials over different variable lists work over the
/// union of the lists (first operand's order, then new names).
#[derive(Clone, Debug)]
pub struct LaurentPoly {
    vars: Vec<String>,
    terms: BTreeMap<Vec<i64>, ParamPoly>,
}

fn checked_add_exp(a: &[i64], b: &[i64]) -> Result<Vec<i64>> {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.checked_add(*y).ok_or(Error::Overflow))
        .collect()
}

impl LaurentPoly {
    pub fn zero(vars: &[String]) -> Self {
        LaurentPoly {
            vars: vars.to_vec(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &[String], c: ParamPoly) -> Self {
        Self::monomial(vars, vec![0; vars.len()], c)
    }

    pub fn one(vars: &[String]) -> Self {
        Self::constant(vars, ParamPoly::one())
    }

    pub fn monomial(vars: &[String], exp: Vec<i64>, c: ParamPoly) -> Self {
        assert_eq!(exp.len(), vars.len(), "exponent length");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        LaurentPoly {
            vars: vars.to_vec(),
            terms,
        }
    }

    /// The variable `name` itself.
    pub fn var(vars: &[String], name: &str) -> Result<Self> {
        let i = vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        let mut exp = vec![0; vars.len()];
        exp[i] = 1;
        Ok(Self::monomial(vars, exp, ParamPoly::one()))
    }

    pub fn from_terms(vars: &[String], terms: impl IntoIterator<Item = (Vec<i64>, ParamPoly)>) -> Self {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), vars.len(), "exponent length");
            p.add_term(e, c);
        }
        p
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<i64>, ParamPoly> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The single term of a monomial, if the polynomial is one.
    pub fn as_monomial(&self) -> Option<(&[i64], &ParamPoly)> {
        if self.terms.len() != 1 {
            return None;
        }
        self.terms.iter().next().map(|(e, c)| (e.as_slice(), c))
    }

    /// Names of variables that occur with a nonzero exponent.
    pub fn used_vars(&self) -> Vec<String> {
        (0..self.vars.len())
            .filter(|&i| self.terms.keys().any(|e| e[i] != 0))
            .map(|i| self.vars[i].clone())
            .collect()
    }

    fn add_term(&mut self, exp: Vec<i64>, c: ParamPoly) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exp) {
            Some(e) => {
                *e = &*e + &c;
                if e.is_zero() {
                    self.terms.remove(&exp);
                }
            }
            None => {
                self.terms.insert(exp, c);
            }
        }
    }

    /// Re-expresses over `vars`, which must contain every used variable.
    pub fn with_vars(&self, vars: &[String]) -> Result<LaurentPoly> {
        let pos: Vec<Option<usize>> = self.vars.iter().map(|v| vars.iter().position(|w| w == v)).collect();
        let mut out = LaurentPoly::zero(vars);
        for (e, c) in &self.terms {
            let mut ne = vec![0; vars.len()];
            for (i, &x) in e.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                let j = pos[i].ok_or_else(|| Error::UnknownVariable(self.vars[i].clone()))?;
                ne[j] = x;
            }
            out.add_term(ne, c.clone());
        }
        Ok(out)
    }

    fn aligned(&self, other: &LaurentPoly) -> (LaurentPoly, LaurentPoly) {
        if self.vars == other.vars {
            return (self.clone(), other.clone());
        }
        let mut vars = self.vars.clone();
        for v in &other.vars {
            if !vars.contains(v) {
                vars.push(v.clone());
            }
        }
        (
            self.with_vars(&vars).expect("union of variables"),
            other.with_vars(&vars).expect("union of variables"),
        )
    }

    pub fn checked_mul(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        let (a, b) = self.aligned(other);
        let mut out = LaurentPoly::zero(&a.vars);
        for (e1, c1) in &a.terms {
            for (e2, c2) in &b.terms {
                out.add_term(checked_add_exp(e1, e2)?, c1 * c2);
            }
        }
        Ok(out)
    }

    /// Integer power; negative powers only for monomials with a constant coefficient.
    pub fn pow(&self, n: i64) -> Result<LaurentPoly> {
        if n < 0 {
            let inv = self.inverse_monomial()?;
            return inv.pow(n.checked_neg().ok_or(Error::Overflow)?);
        }
        let mut acc = LaurentPoly::one(&self.vars);
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.checked_mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.checked_mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Inverse of a monomial whose coefficient is a nonzero rational.
    pub fn inverse_monomial(&self) -> Result<LaurentPoly> {
        let non_monomial = || Error::NonMonomialInverse(self.to_string());
        let (e, c) = self.as_monomial().ok_or_else(non_monomial)?;
        let c = c.as_constant().ok_or_else(non_monomial)?;
        let ne: Vec<i64> = e
            .iter()
            .map(|x| x.checked_neg().ok_or(Error::Overflow))
            .collect::<Result<_>>()?;
        Ok(LaurentPoly::monomial(&self.vars, ne, ParamPoly::constant(c.recip())))
    }

    pub fn scale(&self, c: &ParamPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero(&self.vars);
        for (e, d) in &self.terms {
            out.add_term(e.clone(), d * c);
        }
        out
    }

    /// Sets `b` to a rational value; the result has constant coefficients.
    pub fn specialize(&self, b: &Rational) -> LaurentPoly {
        LaurentPoly::from_terms(
            &self.vars,
            self.terms
                .iter()
                .map(|(e, c)| (e.clone(), ParamPoly::constant(c.eval(b)))),
        )
    }

    /// Exact value at a point with the parameter set to `b`.
    ///
    /// Variables that do not occur may be omitted from `point`.
    pub fn eval(&self, point: &BTreeMap<String, Rational>, b: &Rational) -> Result<Rational> {
        let mut vals: Vec<Rational> = Vec::with_capacity(self.vars.len());
        for (i, v) in self.vars.iter().enumerate() {
            match point.get(v) {
                Some(x) => vals.push(x.clone()),
                None if self.terms.keys().all(|e| e[i] == 0) => vals.push(Rational::zero()),
                None => return Err(Error::UnknownVariable(v.clone())),
            }
        }
        let mut total = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.eval(b);
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                if vals[i].is_zero() {
                    if k < 0 {
                        return Err(Error::DivisionByZero(self.vars[i].clone()));
                    }
                    t = Rational::zero();
                    break;
                }
                let p = i32::try_from(k).map_err(|_| Error::Overflow)?;
                t *= Pow::pow(&vals[i], p);
            }
            total += t;
        }
        Ok(total)
    }

    /// Partial derivative with respect to `name`.
    pub fn derivative(&self, name: &str) -> Result<LaurentPoly> {
        let i = self
            .vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        let mut out = LaurentPoly::zero(&self.vars);
        for (e, c) in &self.terms {
            let k = e[i];
            if k == 0 {
                continue;
            }
            let mut ne = e.clone();
            ne[i] = k.checked_sub(1).ok_or(Error::Overflow)?;
            out.add_term(ne, c.scale(&rat_int(&k.into())));
        }
        Ok(out)
    }
}

/// Value and gradient (in the polynomial's variable order) at a point.
pub fn eval_gradient(
    f: &LaurentPoly,
    point: &BTreeMap<String, Rational>,
    b: &Rational,
) -> Result<(Rational, Vec<Rational>)> {
    let value = f.eval(point, b)?;
    let grad = f
        .vars()
        .iter()
        .map(|v| f.derivative(v)?.eval(point, b))
        .collect::<Result<_>>()?;
    Ok((value, grad))
}

/// Matrix of second partials at a point.
pub fn eval_hessian(
    f: &LaurentPoly,
    point: &BTreeMap<String, Rational>,
    b: &Rational,
) -> Result<Vec<Vec<Rational>>> {
    let firsts: Vec<LaurentPoly> = f.vars().iter().map(|v| f.derivative(v)).collect::<Result<_>>()?;
    firsts
        .iter()
        .map(|d| {
            f.vars()
                .iter()
                .map(|v| d.derivative(v)?.eval(point, b))
                .collect::<Result<Vec<_>>>()
        })
        .collect()
}

/// Exact equality of two polynomials.
pub fn verify_identity(lhs: &LaurentPoly, rhs: &LaurentPoly) -> bool {
    lhs == rhs
}

/// Whether `f = cofactor * g` exactly.
pub fn verify_identity_mod(f: &LaurentPoly, g: &LaurentPoly, cofactor: &LaurentPoly) -> Result<bool> {
    Ok(*f == cofactor.checked_mul(g)?)
}

impl PartialEq for LaurentPoly {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = self.aligned(other);
        a.terms == b.terms
    }
}

impl Eq for LaurentPoly {}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let (mut a, b) = self.aligned(rhs);
        for (e, c) in b.terms {
            a.add_term(e, c);
        }
        a
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self + &(-rhs)
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    /// Panics on exponent overflow; use [`LaurentPoly::checked_mul`] otherwise.
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.checked_mul(rhs).expect("exponent overflow")
    }
}

impl fmt::Display for LaurentPoly {
    /// Terms in descending exponent order; the output parses back with [`parse`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (e, c)) in self.terms.iter().rev().enumerate() {
            let mono: Vec<String> = e
                .iter()
                .zip(&self.vars)
                .filter(|(k, _)| **k != 0)
                .map(|(k, v)| if *k == 1 { v.clone() } else { format!("{v}^{k}") })
                .collect();
            let (neg, coef) = match c.as_constant() {
                Some(r) if r.is_negative() => (true, ParamPoly::constant(-r)),
                _ => (false, c.clone()),
            };
            let coef_s = match coef.as_constant() {
                Some(r) => {
                    if r.is_one() && !mono.is_empty() {
                        String::new()
                    } else {
                        rational_str(&r)
                    }
                }
                None if coef.coefficients().len() == 1 => param_term(&coef),
                None => format!("({coef})"),
            };
            let body = match (coef_s.is_empty(), mono.is_empty()) {
                (true, _) => mono.join("*"),
                (false, true) => coef_s,
                (false, false) => format!("{coef_s}*{}", mono.join("*")),
            };
            match (n, neg) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => f.write_str(&body)?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

fn param_term(c: &ParamPoly) -> String {
    let (k, r) = c.coefficients().iter().next().expect("one term");
    let b = if *k == 1 { "b".to_string() } else { format!("b^{k}") };
    if r.is_one() {
        b
    } else if r.is_integer() {
        format!("({r})*{b}")
    } else {
        format!("({}*{}^-1)*{b}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::rat;

    fn vars(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn param_arithmetic() {
        let b = ParamPoly::b();
        let one = ParamPoly::one();
        let s = &b + &one;
        let sq = &s * &s;
        assert_eq!(sq.eval(&rat(5, 2)), rat(49, 4));
        assert_eq!(sq.to_string(), "b^2 + 2*b + 1");
        assert!((&sq + &(-&sq)).is_zero());
    }

    #[test]
    fn monomial_inverse() {
        let v = vars(&["x", "y"]);
        let m = LaurentPoly::monomial(&v, vec![1, -2], ParamPoly::constant(rat(3, 1)));
        let inv = m.inverse_monomial().unwrap();
        assert_eq!(&m * &inv, LaurentPoly::one(&v));
        let p = &m + &LaurentPoly::one(&v);
        assert!(matches!(p.pow(-1), Err(Error::NonMonomialInverse(_))));
        let with_b = LaurentPoly::monomial(&v, vec![1, 0], ParamPoly::b());
        assert!(with_b.inverse_monomial().is_err());
    }

    #[test]
    fn overflow_is_reported() {
        let v = vars(&["x"]);
        let m = LaurentPoly::monomial(&v, vec![i64::MAX], ParamPoly::one());
        assert_eq!(m.checked_mul(&m), Err(Error::Overflow));
    }

    #[test]
    fn union_of_variables() {
        let x = LaurentPoly::var(&vars(&["x"]), "x").unwrap();
        let y = LaurentPoly::var(&vars(&["y"]), "y").unwrap();
        let s = &x + &y;
        assert_eq!(s.vars(), &vars(&["x", "y"]));
        assert_eq!(&s - &y, x);
    }

    #[test]
    fn evaluation_and_derivative() {
        let v = vars(&["x", "y"]);
        let f = parse("b*x^2*y^-1 + 3*y", &v).unwrap();
        let mut pt = BTreeMap::new();
        pt.insert("x".to_string(), rat(2, 1));
        pt.insert("y".to_string(), rat(1, 2));
        let (val, grad) = eval_gradient(&f, &pt, &rat(1, 1)).unwrap();
        assert_eq!(val, rat(8, 1) + rat(3, 2));
        assert_eq!(grad, vec![rat(8, 1), rat(-16, 1) + rat(3, 1)]);
        pt.insert("y".to_string(), rat(0, 1));
        assert_eq!(f.eval(&pt, &rat(1, 1)), Err(Error::DivisionByZero("y".into())));
    }

    #[test]
    fn constant_has_zero_gradient() {
        let v = vars(&["x"]);
        let one = LaurentPoly::one(&v);
        let mut pt = BTreeMap::new();
        pt.insert("x".to_string(), rat(7, 3));
        let (val, grad) = eval_gradient(&one, &pt, &rat(5, 2)).unwrap();
        assert_eq!(val, rat(1, 1));
        assert_eq!(grad, vec![rat(0, 1)]);
    }

    #[test]
    fn display_round_trip() {
        let v = vars(&["x", "y"]);
        for s in [
            "x^-1*y - 1",
            "-(1 - x)^2*y^-2",
            "(1 + b*y^-1)^2 - 3*x",
            "2*b^2*x + b*y - 1",
        ] {
            let p = parse(s, &v).unwrap();
            let q = parse(&p.to_string(), &v).unwrap();
            assert_eq!(p, q, "{s} -> {p}");
        }
    }
}
