//! Exact feasibility of `A x >= b, E x = e` over the rationals.

use std::collections::BTreeSet;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::lattice::Rational;

/// A linear constraint `coeffs . x >= rhs` (or `= rhs`).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rational>, rhs: Rational) -> Self {
        Constraint { coeffs, rhs }
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        self.coeffs.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    fn is_trivial(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Scales so that the first nonzero coefficient has absolute value 1.
    fn normalized(mut self) -> Self {
        if let Some(p) = self.coeffs.iter().find(|c| !c.is_zero()).map(|c| c.abs()) {
            for c in &mut self.coeffs {
                *c /= &p;
            }
            self.rhs /= &p;
        }
        self
    }
}

/// A feasible point, or `None`.
pub fn feasible_point(ineqs: &[Constraint], eqs: &[Constraint], nvars: usize) -> Option<Vec<Rational>> {
    if nvars <= 40 {
        fourier_motzkin(ineqs, eqs, nvars)
    } else {
        simplex(ineqs, eqs, nvars)
    }
}

/// Gaussian elimination of the equations: returns the pivot variable and its
/// expression `x_p = rhs - sum coeffs_j x_j` for each, or `None` if inconsistent.
fn eliminate_equations(eqs: &[Constraint], nvars: usize) -> Option<Vec<(usize, Constraint)>> {
    let mut rows: Vec<Constraint> = eqs.to_vec();
    let mut pivots: Vec<(usize, Constraint)> = Vec::new();
    while let Some(r) = rows.pop() {
        let Some(p) = (0..nvars).find(|&j| !r.coeffs[j].is_zero()) else {
            if r.rhs.is_zero() {
                continue;
            }
            return None;
        };
        let a = r.coeffs[p].clone();
        let norm = Constraint::new(r.coeffs.iter().map(|c| c / &a).collect(), &r.rhs / &a);
        for other in rows.iter_mut().chain(pivots.iter_mut().map(|(_, c)| c)) {
            let f = other.coeffs[p].clone();
            if !f.is_zero() {
                for j in 0..nvars {
                    other.coeffs[j] -= &f * &norm.coeffs[j];
                }
                other.rhs -= &f * &norm.rhs;
            }
        }
        pivots.push((p, norm));
    }
    Some(pivots)
}

/// Replaces pivot variables in `c` by their expressions.
fn substitute(c: &Constraint, pivots: &[(usize, Constraint)]) -> Constraint {
    let mut out = c.clone();
    for (p, e) in pivots {
        let f = out.coeffs[*p].clone();
        if !f.is_zero() {
            for j in 0..out.coeffs.len() {
                out.coeffs[j] -= &f * &e.coeffs[j];
            }
            out.rhs -= &f * &e.rhs;
        }
    }
    out
}

fn back_substitute(x: &mut [Rational], pivots: &[(usize, Constraint)]) {
    for (p, e) in pivots {
        let rest: Rational = e
            .coeffs
            .iter()
            .enumerate()
            .filter(|(j, _)| j != p)
            .map(|(j, c)| c * &x[j])
            .sum();
        x[*p] = &e.rhs - rest;
    }
}

#[derive(Clone)]
struct Row {
    c: Constraint,
    history: BTreeSet<usize>,
}

/// Fourier–Motzkin elimination with Chernikov's history rule and duplicate
/// removal; back-substitution picks small integers where the bounds allow.
pub fn fourier_motzkin(ineqs: &[Constraint], eqs: &[Constraint], nvars: usize) -> Option<Vec<Rational>> {
    let pivots = eliminate_equations(eqs, nvars)?;
    let pivot_vars: BTreeSet<usize> = pivots.iter().map(|(p, _)| *p).collect();
    let mut rows: Vec<Row> = ineqs
        .iter()
        .enumerate()
        .map(|(i, c)| Row {
            c: substitute(c, &pivots).normalized(),
            history: BTreeSet::from([i]),
        })
        .collect();
    let order: Vec<usize> = (0..nvars).filter(|j| !pivot_vars.contains(j)).collect();
    let mut stages: Vec<Vec<Row>> = Vec::with_capacity(order.len());
    for (step, &j) in order.iter().enumerate() {
        for r in &rows {
            if r.c.is_trivial() && r.c.rhs.is_positive() {
                return None;
            }
        }
        stages.push(rows.clone());
        let (mut pos, mut neg, mut keep) = (vec![], vec![], vec![]);
        for r in rows {
            if r.c.coeffs[j].is_positive() {
                pos.push(r);
            } else if r.c.coeffs[j].is_negative() {
                neg.push(r);
            } else if !r.c.is_trivial() {
                keep.push(r);
            }
        }
        let limit = step + 2;
        for p in &pos {
            for n in &neg {
                let history: BTreeSet<usize> = p.history.union(&n.history).copied().collect();
                if history.len() > limit {
                    continue;
                }
                let (a, b) = (p.c.coeffs[j].clone(), -n.c.coeffs[j].clone());
                let coeffs: Vec<Rational> = p
                    .c
                    .coeffs
                    .iter()
                    .zip(&n.c.coeffs)
                    .map(|(x, y)| x * &b + y * &a)
                    .collect();
                let c = Constraint::new(coeffs, &p.c.rhs * &b + &n.c.rhs * &a).normalized();
                if c.is_trivial() {
                    if c.rhs.is_positive() {
                        return None;
                    }
                    continue;
                }
                keep.push(Row { c, history });
            }
        }
        keep.sort_by(|x, y| x.c.cmp(&y.c));
        // Among parallel rows keep the one with the largest right-hand side.
        keep.dedup_by(|later, kept| {
            if later.c.coeffs != kept.c.coeffs {
                return false;
            }
            if later.c.rhs > kept.c.rhs {
                std::mem::swap(later, kept);
            }
            true
        });
        rows = keep;
    }
    if rows.iter().any(|r| r.c.is_trivial() && r.c.rhs.is_positive()) {
        return None;
    }
    let mut x = vec![Rational::zero(); nvars];
    for (stage, &j) in stages.iter().zip(&order).rev() {
        let mut lo: Option<Rational> = None;
        let mut hi: Option<Rational> = None;
        for r in stage {
            let a = &r.c.coeffs[j];
            if a.is_zero() {
                continue;
            }
            let rest: Rational = r
                .c
                .coeffs
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .map(|(k, c)| c * &x[k])
                .sum();
            let bound = (&r.c.rhs - rest) / a;
            if a.is_positive() {
                lo = Some(lo.map_or(bound.clone(), |l: Rational| l.max(bound)));
            } else {
                hi = Some(hi.map_or(bound.clone(), |h: Rational| h.min(bound)));
            }
        }
        x[j] = nice_value(lo, hi)?;
    }
    back_substitute(&mut x, &pivots);
    Some(x)
}

/// The integer of least absolute value in `[lo, hi]`, or `lo` if there is none.
fn nice_value(lo: Option<Rational>, hi: Option<Rational>) -> Option<Rational> {
    let zero = Rational::zero();
    match (lo, hi) {
        (None, None) => Some(zero),
        (Some(l), None) => Some(if l <= zero { zero } else { l.ceil() }),
        (None, Some(h)) => Some(if h >= zero { zero } else { h.floor() }),
        (Some(l), Some(h)) => {
            if l > h {
                return None;
            }
            if l <= zero && zero <= h {
                return Some(zero);
            }
            let cand = if l > zero { l.ceil() } else { h.floor() };
            Some(if l <= cand && cand <= h { cand } else { l })
        }
    }
}

/// Phase I of the simplex method with Bland's rule on a dense exact tableau.
pub fn simplex(ineqs: &[Constraint], eqs: &[Constraint], nvars: usize) -> Option<Vec<Rational>> {
    // Columns: x+ (nvars), x- (nvars), one surplus per inequality, one artificial per row.
    let m = ineqs.len() + eqs.len();
    let ns = ineqs.len();
    let ncols = 2 * nvars + ns + m;
    let mut t: Vec<Vec<Rational>> = Vec::with_capacity(m);
    let mut rhs: Vec<Rational> = Vec::with_capacity(m);
    for (i, c) in ineqs.iter().chain(eqs).enumerate() {
        let mut row = vec![Rational::zero(); ncols];
        for j in 0..nvars {
            row[j] = c.coeffs[j].clone();
            row[nvars + j] = -c.coeffs[j].clone();
        }
        if i < ns {
            row[2 * nvars + i] = -Rational::one();
        }
        let mut b = c.rhs.clone();
        if b.is_negative() {
            for v in &mut row {
                *v = -v.clone();
            }
            b = -b;
        }
        row[2 * nvars + ns + i] = Rational::one();
        t.push(row);
        rhs.push(b);
    }
    let mut basis: Vec<usize> = (0..m).map(|i| 2 * nvars + ns + i).collect();
    // Reduced costs of the phase I objective (sum of artificials).
    let art_start = 2 * nvars + ns;
    loop {
        let mut cost = vec![Rational::zero(); ncols];
        for j in 0..ncols {
            let c_j = if j >= art_start { Rational::one() } else { Rational::zero() };
            let z: Rational = (0..m)
                .filter(|&i| basis[i] >= art_start)
                .map(|i| &t[i][j])
                .sum();
            cost[j] = c_j - z;
        }
        let Some(enter) = (0..ncols).find(|&j| cost[j].is_negative()) else {
            break;
        };
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = &rhs[i] / &t[i][enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let (r, _) = leave?;
        let piv = t[r][enter].clone();
        for v in &mut t[r] {
            *v /= &piv;
        }
        rhs[r] /= &piv;
        let prow = t[r].clone();
        let prhs = rhs[r].clone();
        for i in 0..m {
            if i != r && !t[i][enter].is_zero() {
                let f = t[i][enter].clone();
                for j in 0..ncols {
                    if !prow[j].is_zero() {
                        let d = &f * &prow[j];
                        t[i][j] -= d;
                    }
                }
                rhs[i] -= &f * &prhs;
            }
        }
        basis[r] = enter;
    }
    let infeasibility: Rational = (0..m).filter(|&i| basis[i] >= art_start).map(|i| &rhs[i]).sum();
    if infeasibility.is_positive() {
        return None;
    }
    let mut x = vec![Rational::zero(); nvars];
    for i in 0..m {
        let b = basis[i];
        if b < nvars {
            x[b] += &rhs[i];
        } else if b < 2 * nvars {
            x[b - nvars] -= &rhs[i];
        }
    }
    Some(x)
}

/// Smallest positive integer multiple making every entry integral.
pub fn common_denominator(x: &[Rational]) -> num_bigint::BigInt {
    x.iter().fold(num_bigint::BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::rat;
    use proptest::prelude::*;

    fn c(coeffs: &[i64], rhs: i64) -> Constraint {
        Constraint::new(coeffs.iter().map(|&v| rat(v, 1)).collect(), rat(rhs, 1))
    }

    #[test]
    fn contradiction() {
        let ineqs = [c(&[1, -1], 1), c(&[-1, 1], 1)];
        assert!(fourier_motzkin(&ineqs, &[], 2).is_none());
        assert!(simplex(&ineqs, &[], 2).is_none());
    }

    #[test]
    fn box_with_equation() {
        let ineqs = [c(&[1, 0, 0], 2), c(&[0, -1, 0], -5)];
        let eqs = [c(&[1, 1, 1], 3)];
        for x in [fourier_motzkin(&ineqs, &eqs, 3).unwrap(), simplex(&ineqs, &eqs, 3).unwrap()] {
            assert!(ineqs.iter().all(|r| r.eval(&x) >= r.rhs));
            assert!(eqs.iter().all(|r| r.eval(&x) == r.rhs));
        }
    }

    #[test]
    fn back_substitution_prefers_small_integers() {
        let x = fourier_motzkin(&[c(&[2, 0], 3), c(&[0, 1], -4)], &[], 2).unwrap();
        assert_eq!(x, vec![rat(2, 1), rat(0, 1)]);
    }

    proptest! {
        #[test]
        fn solvers_agree(rows in proptest::collection::vec((proptest::collection::vec(-3i64..=3, 3), -3i64..=3), 1..8)) {
            let ineqs: Vec<Constraint> = rows.iter().map(|(a, b)| c(a, *b)).collect();
            let fm = fourier_motzkin(&ineqs, &[], 3);
            let sx = simplex(&ineqs, &[], 3);
            prop_assert_eq!(fm.is_some(), sx.is_some());
            for x in fm.iter().chain(sx.iter()) {
                prop_assert!(ineqs.iter().all(|r| r.eval(x) >= r.rhs));
            }
        }
    }
}
