//! Benchmark inputs shared by the criterion targets.

use toricmorph::fixtures;
use toricmorph::{Fan, Polytope};

/// The reflexive polytope nabla and the fan over the cones of the weighted
/// projective polytope, loaded once per benchmark.
pub struct Inputs {
    pub nabla: Polytope,
    pub delta_star_wp: Polytope,
    pub sigma_wp: Fan,
}

pub fn inputs() -> Inputs {
    Inputs {
        nabla: fixtures::polytope("nabla").expect("bundled"),
        delta_star_wp: fixtures::polytope("delta_star_wp").expect("bundled"),
        sigma_wp: fixtures::fan("sigma_prime_wp").expect("bundled"),
    }
}
