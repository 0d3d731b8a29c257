//! Exact combinatorics of generalized boundary blow-up.
//!
//! Toric monoids and their refinements, monoidal complexes, combinatorial
//! manifolds with corners and b-maps, interior binomial subvarieties and
//! fiber products of b-maps, plus a floating-point sampler for checking
//! emitted chart atlases.

pub mod exact;
pub mod monoid;
pub mod refinement;
pub mod complex;
pub mod manifold;
pub mod binomial;
pub mod fiber;
pub mod verify;
