//! Exact polyhedral and toric computations: lattice linear algebra, polytopes,
//! fans, lattice maps between fans, crepant subdivisions and Laurent
//! polynomial identities, together with the data registry and the
//! verification checks built on top of them.

pub mod checks;
pub mod dd;
pub mod error;
pub mod fan;
pub mod fixtures;
pub mod lattice;
pub mod laurent;
pub mod morphism;
pub mod polytope;
pub mod subdivision;

pub use error::{Error, Result};
pub use fan::{Cone, Fan, NefPartition, PlFunction};
pub use lattice::{IntVector, IntegerMatrix, Rational, RationalVector};
pub use laurent::{LaurentPoly, MonomialMap, ParamPoly};
pub use morphism::{LatticeMap, LatticeTag};
pub use polytope::{Face, Polytope};
pub use subdivision::SubdivisionCertificate;
