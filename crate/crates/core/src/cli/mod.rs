//! Expression grammar, manifests and the command-line driver.

pub mod manifest;
pub mod parse;
pub mod run;
pub mod suites;

pub use manifest::{Manifest, Resolved};
pub use parse::parse_expr;
pub use run::{run, Report};

use crate::superalgebra::SuperExpr;

/// Canonical text of an element; `parse_expr(&render_expr(e), table) == e`.
pub fn render_expr(e: &SuperExpr) -> String {
    e.render()
}
