//! Z_N lattice gauge theory on the torus: exact clock/shift algebra, exact
//! diagonalization in the gauge-invariant flux basis, the dual clock model,
//! and replica mean-field theory of the random-coupling Z_2 model.

pub mod algebra;
pub mod lattice;
pub mod eigen;
pub mod sparse;
pub mod duality;
pub mod gauge;
pub mod io;
pub mod mft;
pub mod seed;
