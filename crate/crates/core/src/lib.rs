//! Verification engine for four-dimensional coupled Painlevé III Hamiltonian
//! systems with affine Weyl group symmetry.

pub mod algebra;
pub mod report;
pub mod sampling;
pub mod systems;
pub mod transforms;
pub mod weyl;
pub mod holomorphy;
pub mod degeneration;
pub mod numerics;
pub mod suite;
