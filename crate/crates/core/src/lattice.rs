//! Exact integer and rational linear algebra.
//!
//! Everything above this module works with [`IntVector`] (lattice points,
//! ray generators, facet normals) and [`RationalVector`] (rational points).
//! All arithmetic is arbitrary precision.

use std::fmt;
use std::ops::{Add, Index, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(v: i64) -> BigInt {
    BigInt::from(v)
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(v: &BigInt) -> Rational {
    Rational::from_integer(v.clone())
}

/// Which of the four lattices a vector or polytope lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LatticeTag {
    #[serde(rename = "M")]
    M,
    #[serde(rename = "N")]
    N,
    #[serde(rename = "M'")]
    MPrime,
    #[serde(rename = "N'")]
    NPrime,
}

impl LatticeTag {
    pub fn dual(self) -> LatticeTag {
        match self {
            LatticeTag::M => LatticeTag::N,
            LatticeTag::N => LatticeTag::M,
            LatticeTag::MPrime => LatticeTag::NPrime,
            LatticeTag::NPrime => LatticeTag::MPrime,
        }
    }
}

impl fmt::Display for LatticeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LatticeTag::M => "M",
            LatticeTag::N => "N",
            LatticeTag::MPrime => "M'",
            LatticeTag::NPrime => "N'",
        })
    }
}

/// A point of an integer lattice (M, N, M' or N').
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntVector(pub Vec<BigInt>);

impl IntVector {
    pub fn new(coords: Vec<BigInt>) -> Self {
        IntVector(coords)
    }

    pub fn from_i64s(coords: &[i64]) -> Self {
        IntVector(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        IntVector(vec![BigInt::zero(); dim])
    }

    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[i] = BigInt::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn dot(&self, other: &IntVector) -> BigInt {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn dot_rational(&self, other: &RationalVector) -> Rational {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| b * a)
            .fold(Rational::zero(), |acc, x| acc + x)
    }

    pub fn scale(&self, k: &BigInt) -> IntVector {
        IntVector(self.0.iter().map(|a| a * k).collect())
    }

    pub fn content(&self) -> BigInt {
        self.0.iter().fold(BigInt::zero(), |g, a| g.gcd(a))
    }

    /// Divides by the gcd of the entries. Fails on the zero vector.
    pub fn primitive(&self) -> Result<IntVector> {
        let g = self.content();
        if g.is_zero() {
            return Err(Error::ZeroVector);
        }
        Ok(IntVector(self.0.iter().map(|a| a / &g).collect()))
    }

    /// Primitive form, or the zero vector unchanged.
    pub(crate) fn primitive_or_zero(&self) -> IntVector {
        self.primitive().unwrap_or_else(|_| self.clone())
    }

    pub fn to_rational(&self) -> RationalVector {
        RationalVector(self.0.iter().map(rat_int).collect())
    }

    pub fn to_i64s(&self) -> Vec<i64> {
        self.0
            .iter()
            .map(|a| i64::try_from(a).expect("coordinate exceeds i64 for display"))
            .collect()
    }

    /// Sign normalization: first nonzero coordinate positive.
    pub fn sign_normalized(&self) -> IntVector {
        match self.0.iter().find(|a| !a.is_zero()) {
            Some(a) if a.is_negative() => -self,
            _ => self.clone(),
        }
    }
}

impl Index<usize> for IntVector {
    type Output = BigInt;
    fn index(&self, i: usize) -> &BigInt {
        &self.0[i]
    }
}

impl Neg for &IntVector {
    type Output = IntVector;
    fn neg(self) -> IntVector {
        IntVector(self.0.iter().map(|a| -a).collect())
    }
}

impl Add for &IntVector {
    type Output = IntVector;
    fn add(self, o: &IntVector) -> IntVector {
        IntVector(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &IntVector {
    type Output = IntVector;
    fn sub(self, o: &IntVector) -> IntVector {
        IntVector(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }
}

impl fmt::Display for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Integers serialize as JSON numbers when they fit in an `i64`, otherwise as strings.
fn ser_int<S: Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v.to_i64() {
        Some(x) => s.serialize_i64(x),
        None => s.serialize_str(&v.to_string()),
    }
}

struct IntRef<'a>(&'a BigInt);

impl Serialize for IntRef<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ser_int(self.0, s)
    }
}

impl Serialize for IntVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(IntRef))
    }
}

impl<'de> Deserialize<'de> for IntVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(IntVector::from_i64s(&Vec::<i64>::deserialize(d)?))
    }
}

/// Serializes as `[numerator, denominator]`.
pub struct RationalPair<'a>(pub &'a Rational);

impl Serialize for RationalPair<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq([IntRef(self.0.numer()), IntRef(self.0.denom())])
    }
}

/// A point with rational coordinates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalVector(pub Vec<Rational>);

impl RationalVector {
    pub fn new(coords: Vec<Rational>) -> Self {
        RationalVector(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        RationalVector(vec![Rational::zero(); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn dot(&self, other: &RationalVector) -> Rational {
        self.0
            .iter()
            .zip(&other.0)
            .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
    }

    pub fn scale(&self, k: &Rational) -> RationalVector {
        RationalVector(self.0.iter().map(|a| a * k).collect())
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|a| a.is_integer())
    }

    pub fn to_integer(&self) -> Option<IntVector> {
        self.is_integral()
            .then(|| IntVector(self.0.iter().map(|a| a.to_integer()).collect()))
    }

    /// The primitive integer vector on the ray through a nonzero point.
    pub fn ray_generator(&self) -> Result<IntVector> {
        let den = self
            .0
            .iter()
            .fold(BigInt::one(), |l, a| l.lcm(a.denom()));
        IntVector(self.0.iter().map(|a| (a * rat_int(&den)).to_integer()).collect()).primitive()
    }
}

impl Serialize for RationalVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(RationalPair))
    }
}

impl Sub for &RationalVector {
    type Output = RationalVector;
    fn sub(self, o: &RationalVector) -> RationalVector {
        RationalVector(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }
}

impl Add for &RationalVector {
    type Output = RationalVector;
    fn add(self, o: &RationalVector) -> RationalVector {
        RationalVector(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Display for RationalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for RationalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<&IntVector> for RationalVector {
    fn from(v: &IntVector) -> Self {
        v.to_rational()
    }
}

/// Row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        Ok(IntegerMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_rows(rows: &[IntVector]) -> Result<Self> {
        let cols = rows.first().map_or(0, IntVector::dim);
        if let Some(bad) = rows.iter().find(|r| r.dim() != cols) {
            return Err(Error::DimensionMismatch {
                expected: cols,
                found: bad.dim(),
            });
        }
        Ok(IntegerMatrix {
            rows: rows.len(),
            cols,
            entries: rows.iter().flat_map(|r| r.0.iter().cloned()).collect(),
        })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Result<Self> {
        let rows: Vec<IntVector> = rows.iter().map(|r| IntVector::from_i64s(r)).collect();
        Self::from_rows(&rows)
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        IntegerMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.entries[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    fn get_mut(&mut self, i: usize, j: usize) -> &mut BigInt {
        &mut self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> IntVector {
        IntVector(self.entries[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn row_vectors(&self) -> Vec<IntVector> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> IntegerMatrix {
        let mut t = Self::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *t.get_mut(j, i) = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &IntVector) -> Result<IntVector> {
        if v.dim() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.dim(),
            });
        }
        Ok(IntVector(
            (0..self.rows).map(|i| self.row(i).dot(v)).collect(),
        ))
    }

    pub fn mul_rational_vec(&self, v: &RationalVector) -> Result<RationalVector> {
        if v.dim() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.dim(),
            });
        }
        Ok(RationalVector(
            (0..self.rows).map(|i| self.row(i).dot_rational(v)).collect(),
        ))
    }

    pub fn mul(&self, other: &IntegerMatrix) -> Result<IntegerMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    *out.get_mut(i, j) += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Result<BigInt> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: self.cols,
            });
        }
        Ok(bareiss_det(
            (0..self.rows)
                .map(|i| self.row(i).0)
                .collect::<Vec<_>>(),
        ))
    }

    pub fn rank(&self) -> usize {
        rank(&self.row_vectors())
    }
}

impl fmt::Debug for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            writeln!(f, "  {}", self.row(i))?;
        }
        write!(f, "]")
    }
}

pub(crate) fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Row Hermite normal form: returns `(h, u)` with `u` unimodular and `u * m = h`.
///
/// `h` is in row echelon form with positive pivots, entries above each pivot
/// reduced into `[0, pivot)`, zero rows last.
pub fn hermite_form(m: &IntegerMatrix) -> (IntegerMatrix, IntegerMatrix) {
    let (rows, cols) = (m.rows, m.cols);
    let mut h: Vec<Vec<BigInt>> = (0..rows).map(|i| m.row(i).0).collect();
    let mut u: Vec<Vec<BigInt>> = (0..rows).map(|i| IntegerMatrix::identity(rows).row(i).0).collect();

    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for col in 0..cols {
        if pivot_row == rows {
            break;
        }
        // Euclid on the column below pivot_row.
        loop {
            let nonzero: Vec<usize> = (pivot_row..rows).filter(|&i| !h[i][col].is_zero()).collect();
            if nonzero.is_empty() {
                break;
            }
            let best = *nonzero
                .iter()
                .min_by_key(|&&i| h[i][col].abs())
                .expect("nonempty");
            h.swap(pivot_row, best);
            u.swap(pivot_row, best);
            if nonzero.len() == 1 {
                break;
            }
            for i in pivot_row + 1..rows {
                if h[i][col].is_zero() {
                    continue;
                }
                let q = h[i][col].div_floor(&h[pivot_row][col]);
                row_axpy(&mut h, i, pivot_row, &q);
                row_axpy(&mut u, i, pivot_row, &q);
            }
        }
        if h[pivot_row][col].is_zero() {
            continue;
        }
        if h[pivot_row][col].is_negative() {
            h[pivot_row].iter_mut().for_each(|a| *a = -&*a);
            u[pivot_row].iter_mut().for_each(|a| *a = -&*a);
        }
        for i in 0..pivot_row {
            let q = h[i][col].div_floor(&h[pivot_row][col]);
            if !q.is_zero() {
                row_axpy(&mut h, i, pivot_row, &q);
                row_axpy(&mut u, i, pivot_row, &q);
            }
        }
        pivots.push(col);
        pivot_row += 1;
    }
    let flat = |v: Vec<Vec<BigInt>>, c: usize| IntegerMatrix {
        rows,
        cols: c,
        entries: v.into_iter().flatten().collect(),
    };
    (flat(h, cols), flat(u, rows))
}

/// `rows[i] -= q * rows[j]`
fn row_axpy(rows: &mut [Vec<BigInt>], i: usize, j: usize, q: &BigInt) {
    let src = rows[j].clone();
    for (a, b) in rows[i].iter_mut().zip(&src) {
        *a -= q * b;
    }
}

/// Basis of `{k in Z^n : m k = 0}`, in Hermite normal form.
///
/// Each basis vector is primitive with its first nonzero coordinate positive.
pub fn integer_kernel(m: &IntegerMatrix) -> Vec<IntVector> {
    let n = m.cols;
    if m.rows == 0 {
        return (0..n).map(|i| IntVector::unit(n, i)).collect();
    }
    let (h, u) = hermite_form(&m.transpose());
    let basis: Vec<IntVector> = (0..h.rows)
        .filter(|&i| h.row(i).is_zero())
        .map(|i| u.row(i))
        .collect();
    if basis.is_empty() {
        return basis;
    }
    let (hk, _) = hermite_form(&IntegerMatrix::from_rows(&basis).expect("uniform rows"));
    hk.row_vectors()
        .into_iter()
        .filter(|r| !r.is_zero())
        .map(|r| r.primitive_or_zero().sign_normalized())
        .collect()
}

/// Divides an integer vector by the gcd of its entries.
pub fn primitive(v: &IntVector) -> Result<IntVector> {
    v.primitive()
}

/// Rank of a list of integer vectors.
pub fn rank(rows: &[IntVector]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let (h, _) = hermite_form(&IntegerMatrix::from_rows(rows).expect("uniform rows"));
    (0..h.rows).filter(|&i| !h.row(i).is_zero()).count()
}

/// Rank of a list of rational vectors.
pub fn rank_rational(rows: &[RationalVector]) -> usize {
    let ints: Vec<IntVector> = rows.iter().map(clear_denominators).collect();
    rank(&ints)
}

/// Scales a rational vector to an integer vector (not necessarily primitive).
pub fn clear_denominators(v: &RationalVector) -> IntVector {
    let den = v.0.iter().fold(BigInt::one(), |l, a| l.lcm(a.denom()));
    IntVector(
        v.0.iter()
            .map(|a| (a * rat_int(&den)).to_integer())
            .collect(),
    )
}

/// Solves `A x = b` over the rationals. `a` is given by rows.
///
/// Returns one solution (free variables set to zero) or `None` if inconsistent.
pub fn solve_rational(a: &[RationalVector], b: &[Rational], ncols: usize) -> Option<RationalVector> {
    let nrows = a.len();
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut row = r.0.clone();
            row.push(bi.clone());
            row
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..nrows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let pivot_row = m[r].clone();
                for (x, p) in m[i][c..=ncols].iter_mut().zip(&pivot_row[c..=ncols]) {
                    *x -= &f * p;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
        if r == nrows {
            break;
        }
    }
    if m[r..].iter().any(|row| !row[ncols].is_zero()) {
        return None;
    }
    let mut x = vec![Rational::zero(); ncols];
    for (i, &c) in pivot_cols.iter().enumerate() {
        x[c] = m[i][ncols].clone();
    }
    Some(RationalVector(x))
}

/// Coordinates of `target` in terms of `basis` (which must be linearly independent),
/// or `None` if `target` is not in their span.
pub fn express_in_basis(basis: &[IntVector], target: &IntVector) -> Option<RationalVector> {
    let dim = target.dim();
    let k = basis.len();
    let rows: Vec<RationalVector> = (0..dim)
        .map(|i| RationalVector(basis.iter().map(|b| rat_int(&b[i])).collect()))
        .collect();
    let rhs: Vec<Rational> = target.0.iter().map(rat_int).collect();
    solve_rational(&rows, &rhs, k)
}

/// Indices of a maximal linearly independent subset, chosen greedily in order.
pub fn independent_subset(vectors: &[IntVector]) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut chosen_vecs: Vec<IntVector> = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        chosen_vecs.push(v.clone());
        if rank(&chosen_vecs) == chosen_vecs.len() {
            chosen.push(i);
        } else {
            chosen_vecs.pop();
        }
    }
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn h_star() -> IntegerMatrix {
        IntegerMatrix::from_i64_rows(&[
            &[0, 0, 0, 1, 2],
            &[0, 0, 1, 0, 0],
            &[0, 1, 0, 0, 0],
            &[1, 0, 0, 0, 0],
        ])
        .unwrap()
    }

    #[test]
    fn hermite_identity() {
        let id = IntegerMatrix::identity(4);
        let (h, u) = hermite_form(&id);
        assert_eq!(h, id);
        assert_eq!(u, id);
    }

    #[test]
    fn hermite_zero_matrix() {
        let z = IntegerMatrix::zero(2, 2);
        let (h, u) = hermite_form(&z);
        assert!(h.is_zero());
        assert_eq!(u, IntegerMatrix::identity(2));
    }

    #[test]
    fn hermite_h_star_rank_four() {
        let m = h_star();
        let (h, u) = hermite_form(&m);
        assert_eq!(u.mul(&m).unwrap(), h);
        assert_eq!(h.rank(), 4);
        // Independent row reduction by hand: h* is a coordinate permutation
        // followed by one shear, so its row HNF is [I_4 | c] with c = (0,0,0,2).
        let expected = IntegerMatrix::from_i64_rows(&[
            &[1, 0, 0, 0, 0],
            &[0, 1, 0, 0, 0],
            &[0, 0, 1, 0, 0],
            &[0, 0, 0, 1, 2],
        ])
        .unwrap();
        assert_eq!(h, expected);
    }

    #[test]
    fn kernel_of_h_star() {
        assert_eq!(
            integer_kernel(&h_star()),
            vec![IntVector::from_i64s(&[0, 0, 0, 2, -1])]
        );
    }

    #[test]
    fn kernel_of_identity_is_empty() {
        assert!(integer_kernel(&IntegerMatrix::identity(5)).is_empty());
    }

    #[test]
    fn kernel_of_row_one_one() {
        let m = IntegerMatrix::from_i64_rows(&[&[1, 1]]).unwrap();
        assert_eq!(integer_kernel(&m), vec![IntVector::from_i64s(&[1, -1])]);
    }

    #[test]
    fn primitive_examples() {
        let p = |v: &[i64]| primitive(&IntVector::from_i64s(v)).unwrap();
        assert_eq!(p(&[0, 0, 0, 4, -2]), IntVector::from_i64s(&[0, 0, 0, 2, -1]));
        assert_eq!(p(&[3, -1, -1, -1]), IntVector::from_i64s(&[3, -1, -1, -1]));
        assert_eq!(p(&[-2, 0, 0, 2]), IntVector::from_i64s(&[-1, 0, 0, 1]));
        assert!(matches!(
            primitive(&IntVector::zeros(3)),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn determinant_small() {
        let m = IntegerMatrix::from_i64_rows(&[&[2, 1], &[7, 4]]).unwrap();
        assert_eq!(m.det().unwrap(), int(1));
        let m = IntegerMatrix::from_i64_rows(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 3]]).unwrap();
        assert_eq!(m.det().unwrap(), int(-3));
    }

    fn small_matrix() -> impl Strategy<Value = (usize, usize, Vec<i64>)> {
        (1usize..5, 1usize..6).prop_flat_map(|(r, c)| {
            (Just(r), Just(c), prop::collection::vec(-4i64..5, r * c))
        })
    }

    proptest! {
        #[test]
        fn kernel_vectors_are_annihilated((r, c, e) in small_matrix()) {
            let m = IntegerMatrix::new(r, c, e.into_iter().map(BigInt::from).collect()).unwrap();
            let k = integer_kernel(&m);
            prop_assert_eq!(k.len() + m.rank(), c);
            for v in &k {
                prop_assert!(m.mul_vec(v).unwrap().is_zero());
                prop_assert_eq!(v.content(), int(1));
                prop_assert_eq!(v.sign_normalized(), v.clone());
            }
        }

        #[test]
        fn hermite_round_trip((r, c, e) in small_matrix()) {
            let m = IntegerMatrix::new(r, c, e.into_iter().map(BigInt::from).collect()).unwrap();
            let (h, u) = hermite_form(&m);
            prop_assert_eq!(u.mul(&m).unwrap(), h);
            prop_assert!(u.det().unwrap().abs() == int(1));
        }

        #[test]
        fn primitive_is_idempotent(v in prop::collection::vec(-30i64..30, 1..6)) {
            let v = IntVector::from_i64s(&v);
            if let Ok(p) = primitive(&v) {
                prop_assert_eq!(primitive(&p).unwrap(), p);
            }
        }
    }
}
