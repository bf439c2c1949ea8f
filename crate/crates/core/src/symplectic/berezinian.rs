use crate::error::{Error, Result};
use crate::superalgebra::{SMatrix, SuperExpr};

use super::maps::SuperMap;

/// `Ber = det(I00 - I01 I11⁻¹ I10) / det I11` on the (even | odd) block split.
pub fn berezinian_of(j: &SMatrix) -> Result<SuperExpr> {
    let n = j.rows / 2;
    if j.rows != j.cols || j.rows != 2 * n {
        return Err(Error::Precondition("Berezinian of a non-square supermatrix".into()));
    }
    let i00 = j.block(0, 0, n, n);
    let i01 = j.block(0, n, n, n);
    let i10 = j.block(n, 0, n, n);
    let i11 = j.block(n, n, n, n);
    let i11inv = i11.inverse_even()?;
    let schur = i00.sub(&i01.mul(&i11inv).mul(&i10));
    let num = schur.det_even()?;
    let den = i11.det_even()?.invert_even()?;
    Ok(&num * &den)
}

/// Jacobian with right derivatives in the odd source coordinates.
///
/// Entry `(A, B)` is `∂F^A/∂z^B` taken from the right; it only differs from the
/// left-derivative Jacobian by the sign of the even-row / odd-column block.
pub fn jacobian_right(f: &SuperMap) -> SMatrix {
    let j = f.jacobian();
    let n = f.n();
    let mut r = j.clone();
    for a in 0..n {
        for b in n..2 * n {
            r.set(a, b, -j.get(a, b));
        }
    }
    r
}

/// Berezinian of the map's Jacobian; multiplicative under composition.
pub fn berezinian(f: &SuperMap) -> Result<SuperExpr> {
    berezinian_of(&jacobian_right(f))
}

/// `Ber^{1/2}`, body root chosen with positive leading coefficient.
pub fn ber_sqrt(f: &SuperMap) -> Result<SuperExpr> {
    berezinian(f)?.sqrt_even()
}

/// `s ↦ s(F(z)) Ber^{1/2}(∂F/∂z)`: a semidensity coefficient in the target coordinates
/// becomes one in the source coordinates.
pub fn pullback_semidensity(f: &SuperMap, s: &SuperExpr) -> Result<SuperExpr> {
    Ok(&f.pull(s)? * &ber_sqrt(f)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::parse_expr;
    use crate::superalgebra::{SymbolTable, Table};

    fn exprs(t: &Table, s: &[&str]) -> Vec<SuperExpr> {
        s.iter().map(|e| parse_expr(e, t).unwrap()).collect()
    }

    #[test]
    fn square_point_map() {
        let t = SymbolTable::standard(1, 0);
        let f = SuperMap::new(&t, exprs(&t, &["x1^2", "th1/(2*x1)"]), None).unwrap();
        assert_eq!(berezinian(&f).unwrap(), parse_expr("4*x1^2", &t).unwrap());
        assert_eq!(ber_sqrt(&f).unwrap(), parse_expr("2*x1", &t).unwrap());
    }

    #[test]
    fn multiplicative() {
        let t = SymbolTable::standard(2, 1);
        let f = SuperMap::new(
            &t,
            exprs(&t, &["x1 + th1*th2", "x2 + b1*th1", "(1 + x1)*th1 + b1*x2", "th2 + x2*th1*th2*b1 + th1"]),
            None,
        )
        .unwrap();
        let g = SuperMap::new(
            &t,
            exprs(&t, &["x1 + x2*b1*th2", "2*x2 + th1*th2", "th1 + x1*b1*th1*th2", "(1 + x2)*th2 + b1"]),
            None,
        )
        .unwrap();
        let fg = f.compose(&g).unwrap();
        let lhs = berezinian(&fg).unwrap();
        let rhs = &g.pull(&berezinian(&f).unwrap()).unwrap() * &berezinian(&g).unwrap();
        assert_eq!(lhs, rhs);
        let left = |m: &SuperMap| berezinian_of(&m.jacobian()).unwrap();
        assert_ne!(left(&fg), &g.pull(&left(&f)).unwrap() * &left(&g));
    }
}
