//! Invariants of semidensities on surfaces of codimension (1|1).

use num_rational::BigRational;

use crate::bv::{delta_sharp, delta_vol, VolumeForm};
use crate::error::{Error, Result};
use crate::superalgebra::{Bindings, SuperExpr, Table};
use crate::symplectic::bracket;

/// Surface `{x⁰ = θ₀ = 0}` cut out by one conjugate Darboux pair of the chart.
///
/// Objects on the surface live on the ambient table with `x⁰` and `θ₀` absent.
#[derive(Clone, Debug)]
pub struct AdjustedSurface {
    pub table: Table,
    pub pair: usize,
}

impl AdjustedSurface {
    pub fn new(table: &Table, pair: usize) -> Result<AdjustedSurface> {
        if pair >= table.n() {
            return Err(Error::Input(format!("no coordinate pair {pair} in a chart of dimension {}", table.n())));
        }
        Ok(AdjustedSurface { table: table.clone(), pair })
    }

    /// Surface given by the names of its even and odd defining coordinates.
    pub fn from_names(table: &Table, x0: &str, theta0: &str) -> Result<AdjustedSurface> {
        let i = table
            .coords()
            .iter()
            .position(|c| c == x0)
            .ok_or_else(|| Error::Input(format!("`{x0}` is not an even coordinate")))?;
        let j = table
            .thetas()
            .iter()
            .position(|c| c == theta0)
            .ok_or_else(|| Error::Input(format!("`{theta0}` is not an odd coordinate")))?;
        if i != j {
            return Err(Error::Precondition(format!("`{x0}` and `{theta0}` are not a conjugate pair")));
        }
        AdjustedSurface::new(table, i)
    }

    /// Sets `x⁰ = θ₀ = 0`.
    pub fn restrict(&self, e: &SuperExpr) -> Result<SuperExpr> {
        let t = &self.table;
        let b = Bindings::new(t).theta(self.pair, SuperExpr::zero(t));
        e.substitute(&b)?.restrict_coord_zero(self.pair)
    }

    /// Whether `e` lives on the surface chart.
    pub fn is_on_surface(&self, e: &SuperExpr) -> bool {
        e.terms().all(|(k, s)| {
            !k.contains(self.table.theta_index(self.pair))
                && !s.contains_var(crate::superalgebra::Var::coord(self.pair))
        })
    }
}

/// `K(s)`: `∂s/∂θ₀` restricted to the surface; flips parity.
pub fn pullback_k(s: &SuperExpr, c: &AdjustedSurface) -> Result<SuperExpr> {
    c.restrict(&s.d_theta(c.pair))
}

/// `Δ#` of the induced chart `(x^i, θ_j)`, `i, j ≠ 0`.
pub fn delta_sharp_on_surface(s: &SuperExpr, c: &AdjustedSurface) -> SuperExpr {
    let mut acc = SuperExpr::zero(s.table());
    for i in (0..s.table().n()).filter(|&i| i != c.pair) {
        acc = &acc + &s.d_theta(i).d_coord(i);
    }
    acc
}

/// `K(Δ#s) + Δ̃#K(s)`.
pub fn surface_relation_residual(s: &SuperExpr, c: &AdjustedSurface) -> Result<SuperExpr> {
    Ok(&pullback_k(&delta_sharp(s), c)? + &delta_sharp_on_surface(&pullback_k(s, c)?, c))
}

/// Bracket part of the dual semidensity before the `1/√{f,φ}` normalisation.
pub fn dual_density_numerator(f: &SuperExpr, phi: &SuperExpr, dv: &VolumeForm) -> Result<SuperExpr> {
    if !f.is_even() || !phi.is_odd() {
        return Err(Error::Parity("dual density needs f even and φ odd".into()));
    }
    let fp = bracket(f, phi)?;
    let fp_inv = fp.invert_even()?;
    let ff = bracket(f, f)?;
    let half = BigRational::new(1.into(), 2.into());
    let t1 = delta_vol(f, dv)?;
    let t2 = &(&ff * &fp_inv).scale_rational(&half) * &delta_vol(phi, dv)?;
    let t3 = &bracket(f, &fp)? * &fp_inv;
    let t4 = &(&ff * &(&fp_inv * &fp_inv)).scale_rational(&half) * &bracket(phi, &fp)?;
    Ok(&(&(&t1 - &t2) - &t3) - &t4)
}

/// `Ã|_{f=φ=0}` for a surface whose defining pair `(f, φ)` vanishes on `C`.
pub fn dual_density(f: &SuperExpr, phi: &SuperExpr, dv: &VolumeForm, c: &AdjustedSurface) -> Result<SuperExpr> {
    if !c.restrict(f)?.is_zero() || !c.restrict(phi)?.is_zero() {
        return Err(Error::Precondition("f and φ must vanish on the surface".into()));
    }
    let num = c.restrict(&dual_density_numerator(f, phi, dv)?)?;
    let root = c.restrict(&bracket(f, phi)?)?.sqrt_even()?;
    Ok(&root.invert_even()? * &num)
}

/// `(P₀, P₁) = (K(Δ#√dv)², K(√dv)·K(Δ#√dv))`.
pub fn densities_p(dv: &VolumeForm, c: &AdjustedSurface) -> Result<(SuperExpr, SuperExpr)> {
    let s = dv.sqrt()?;
    let ks = pullback_k(&s, c)?;
    let kd = pullback_k(&delta_sharp(&s), c)?;
    Ok((&kd * &kd, &ks * &kd))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::parse_expr;
    use crate::superalgebra::{ChartSpec, SymbolTable};

    fn chart(aux: &[&str]) -> Table {
        SymbolTable::new(ChartSpec {
            chart: "E".into(),
            even: vec!["x0".into(), "x1".into(), "x2".into()],
            odd: vec!["th0".into(), "th1".into(), "th2".into()],
            aux: aux.iter().map(|s| s.to_string()).collect(),
            functions: vec!["b0".into(), "b1".into(), "b2".into()],
            ..Default::default()
        })
        .unwrap()
    }

    #[test]
    fn worked_surface_values() {
        let t = chart(&[]);
        let p = |s| parse_expr(s, &t).unwrap();
        let c = AdjustedSurface::from_names(&t, "x0", "th0").unwrap();
        let s = p("1 + b0*th1*th2 + b1*th2*th0 + b2*th0*th1");
        assert_eq!(pullback_k(&s, &c).unwrap().render(), "b2*th1 - b1*th2");
        let kd = pullback_k(&delta_sharp(&s), &c).unwrap();
        assert_eq!(kd, c.restrict(&p("D(b1,x2) - D(b2,x1)")).unwrap());
        assert!(surface_relation_residual(&s, &c).unwrap().is_zero());
        assert!(pullback_k(&p("1"), &c).unwrap().is_zero());
    }

    #[test]
    fn dual_density_examples() {
        let t = chart(&["b"]);
        let p = |s| parse_expr(s, &t).unwrap();
        let c = AdjustedSurface::new(&t, 0).unwrap();
        let flat = VolumeForm::new(p("1")).unwrap();
        assert!(dual_density(&p("x0"), &p("th0"), &flat, &c).unwrap().is_zero());
        let dv = VolumeForm::new(p("(1 + x1*th0*th1)^2")).unwrap();
        let base = dual_density(&p("x0"), &p("th0"), &dv, &c).unwrap();
        assert_eq!(base, p("x1*th1"));
        let scaled = dual_density(&p("4*x0"), &p("th0"), &dv, &c).unwrap();
        assert_eq!(scaled, base.scale_int(2));
        let k = pullback_k(&dv.sqrt().unwrap(), &c).unwrap();
        assert_eq!(&base * &c.restrict(&dv.sqrt().unwrap()).unwrap(), k);
    }

    #[test]
    fn flat_densities_vanish() {
        let t = chart(&[]);
        let c = AdjustedSurface::new(&t, 0).unwrap();
        let (p0, p1) = densities_p(&VolumeForm::new(SuperExpr::one(&t)).unwrap(), &c).unwrap();
        assert!(p0.is_zero() && p1.is_zero());
    }
}
