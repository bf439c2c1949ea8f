//! Exact supercommutative arithmetic.

pub mod expr;
pub mod matrix;
pub mod poly;
pub mod scalar;
pub mod symbols;

pub use expr::{product_sign, render_scalar, Bindings, OddKey, Parity, SuperExpr};
pub use matrix::SMatrix;
pub use poly::{Monomial, Poly};
pub use scalar::Scalar;
pub use symbols::{same_table, ChartSpec, OddKind, Symbol, SymbolTable, Table, Var, VarKind};
