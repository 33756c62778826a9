use num_traits::{One, Zero};

use super::PlFunction;
use crate::error::Result;
use crate::lattice::{rat_int, IntVector, Rational};

/// Piecewise linear functions on one complete fan that should sum to the
/// reflexive support function.
#[derive(Clone, Debug)]
pub struct NefPartition<'a> {
    pub parts: Vec<PlFunction<'a>>,
}

impl<'a> NefPartition<'a> {
    pub fn new(parts: Vec<PlFunction<'a>>) -> Self {
        NefPartition { parts }
    }

    /// Rays on which part `i` equals one.
    pub fn e_set(&self, i: usize) -> Vec<IntVector> {
        let part = &self.parts[i];
        part.fan()
            .rays()
            .iter()
            .zip(part.values())
            .filter(|(_, v)| v.is_one())
            .map(|(r, _)| r.clone())
            .collect()
    }
}

/// Each part convex with values in {0, 1}, and the parts summing to 1 on every ray.
pub fn nef_partition_check(np: &NefPartition) -> Result<bool> {
    let Some(first) = np.parts.first() else {
        return Ok(false);
    };
    let n = first.fan().rays().len();
    for part in &np.parts {
        if part.values().len() != n || !part.values().iter().all(|v| v.is_zero() || v.is_one()) {
            return Ok(false);
        }
    }
    for i in 0..n {
        let s: Rational = np.parts.iter().map(|p| p.values()[i].clone()).sum();
        if !s.is_one() {
            return Ok(false);
        }
    }
    for part in &np.parts {
        if !part.is_convex()? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `<v, u> = -1` on the first part's vertex set and `<v, u> >= 0` on the others.
pub fn amenable_check(v: &IntVector, np: &NefPartition) -> bool {
    let minus_one = -Rational::one();
    np.e_set(0).iter().all(|u| rat_int(&v.dot(u)) == minus_one)
        && (1..np.parts.len()).all(|i| np.e_set(i).iter().all(|u| v.dot(u) >= 0.into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::face_fan;
    use crate::lattice::rat;
    use crate::polytope::Polytope;

    #[test]
    fn trivial_partition() {
        let p = Polytope::from_integer_points(&[
            IntVector::from_i64s(&[1, 0]),
            IntVector::from_i64s(&[0, 1]),
            IntVector::from_i64s(&[-1, -1]),
        ])
        .unwrap();
        let f = face_fan(&p).unwrap();
        let np = NefPartition::new(vec![PlFunction::from_fn(&f, |_| rat(1, 1))]);
        assert!(nef_partition_check(&np).unwrap());
    }
}
