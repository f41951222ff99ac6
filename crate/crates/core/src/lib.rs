//! Finite-field hunting for singular members of hypersurface families,
//! interpolation of their loci, multimodular lifting back to ℚ, and the
//! lattice and abelian-cover numerics used to check surface invariants.

pub mod cover;
pub mod exactla;
pub mod fixture;
pub mod fields;
pub mod hunt;
pub mod interp;
pub mod lattice;
pub mod lift;
pub mod poly;
pub mod report;
pub mod ring;
pub mod rng;
