//! Odd brackets, coordinate changes and semidensities.

pub mod berezinian;
pub mod bracket;
pub mod maps;

pub use berezinian::{ber_sqrt, berezinian, berezinian_of, jacobian_right, pullback_semidensity};
pub use bracket::{
    antisymmetry_residual, bracket, bracket_with, coordinate, d_z, hamiltonian_vector_field, jacobi_residual,
    Structure,
};
pub use maps::{decompose, Decomposition, MapKind, SuperMap};
