//! Second-order odd Laplacians: `Δ₀`, `Δ_dv`, `Δ#` and the identities they satisfy.

use crate::error::{Error, Result};
use num_rational::BigRational;
use num_traits::Signed;

pub use crate::flows::moser_hamiltonian;
use crate::superalgebra::{OddKey, Parity, Scalar, SuperExpr};
use crate::symplectic::{ber_sqrt, berezinian, bracket, d_z, hamiltonian_vector_field, SuperMap};

/// Coordinate volume density `ρ(x,θ) D(x,θ)` in a Darboux chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VolumeForm {
    pub rho: SuperExpr,
}

impl VolumeForm {
    pub fn new(rho: SuperExpr) -> Result<VolumeForm> {
        if rho.parity() != Parity::Even {
            return Err(Error::Parity("volume density must be even".into()));
        }
        if rho.body().is_zero() {
            return Err(Error::NotInvertible("volume density has zero body".into()));
        }
        Ok(VolumeForm { rho })
    }

    /// Coefficient of `√dv`.
    pub fn sqrt(&self) -> Result<SuperExpr> {
        self.rho.sqrt_even()
    }
}

/// `Δ₀ f = Σ_i ∂²f / ∂x^i ∂θ_i`.
pub fn delta0(f: &SuperExpr) -> SuperExpr {
    let mut acc = SuperExpr::zero(f.table());
    for i in 0..f.table().n() {
        acc = &acc + &f.d_theta(i).d_coord(i);
    }
    acc
}

/// `Δ_dv f = Δ₀ f + ½ ρ⁻¹ {ρ, f}`.
pub fn delta_vol(f: &SuperExpr, dv: &VolumeForm) -> Result<SuperExpr> {
    let rinv = dv.rho.invert_even()?;
    let br = bracket(&dv.rho, f)?;
    Ok(&delta0(f) + &(&rinv * &br).scale_rational(&half()))
}

/// `Δ#` on semidensity coefficients in a Darboux chart; flips parity.
pub fn delta_sharp(s: &SuperExpr) -> SuperExpr {
    delta0(s)
}

/// `δ_Q s = Q Δ#s + Δ#(Q s)`.
pub fn infinitesimal_action(q: &SuperExpr, s: &SuperExpr) -> Result<SuperExpr> {
    if !q.is_odd() {
        return Err(Error::Parity("generator must be odd".into()));
    }
    Ok(&(q * &delta_sharp(s)) + &delta_sharp(&(q * s)))
}

/// `½ (-1)^{p(f)} div_dv D_f` with the divergence
/// `div_dv X = Σ_A (-1)^{p(A) p(f)} (∂_A X^A + ρ⁻¹ (∂_A ρ) X^A)`.
pub fn delta_by_divergence(f: &SuperExpr, dv: &VolumeForm) -> Result<SuperExpr> {
    let pf = parity_bit(f)?;
    let t = f.table();
    let n = t.n();
    let d = hamiltonian_vector_field(f)?;
    let rinv = dv.rho.invert_even()?;
    let mut acc = SuperExpr::zero(t);
    for (a, da) in d.iter().enumerate() {
        let pa = u32::from(a >= n);
        let term = &d_z(da, a) + &(&rinv * &(&d_z(&dv.rho, a) * da));
        acc = if (pa * pf) % 2 == 1 { &acc - &term } else { &acc + &term };
    }
    let acc = acc.scale_rational(&half());
    Ok(if pf == 1 { -&acc } else { acc })
}

fn half() -> BigRational {
    BigRational::new(1.into(), 2.into())
}

fn parity_bit(f: &SuperExpr) -> Result<u32> {
    f.parity().bit().ok_or_else(|| Error::Parity("operand must have definite parity".into()))
}

fn sign(neg: bool, e: SuperExpr) -> SuperExpr {
    if neg {
        -&e
    } else {
        e
    }
}

/// `Δ{f,g} - {Δf,g} - (-1)^{p(f)+1}{f,Δg}`.
pub fn derivation_residual(f: &SuperExpr, g: &SuperExpr, dv: &VolumeForm) -> Result<SuperExpr> {
    let pf = parity_bit(f)?;
    parity_bit(g)?;
    let lhs = delta_vol(&bracket(f, g)?, dv)?;
    let a = bracket(&delta_vol(f, dv)?, g)?;
    let b = sign(pf % 2 == 0, bracket(f, &delta_vol(g, dv)?)?);
    Ok(&(&lhs - &a) - &b)
}

/// `Δ(fg) - Δf·g - (-1)^{p(f)} f Δg - (-1)^{p(f)}{f,g}`.
pub fn leibniz_residual(f: &SuperExpr, g: &SuperExpr, dv: &VolumeForm) -> Result<SuperExpr> {
    let pf = parity_bit(f)?;
    parity_bit(g)?;
    let lhs = delta_vol(&(f * g), dv)?;
    let a = &delta_vol(f, dv)? * g;
    let b = sign(pf == 1, f * &delta_vol(g, dv)?);
    let c = sign(pf == 1, bracket(f, g)?);
    Ok(&(&(&lhs - &a) - &b) - &c)
}

/// `Δ₀f - (Δ̃₀ f)∘F + ½ Ber(F)⁻¹ {Ber(F), f}` for a canonical map `F`.
pub fn chart_change_residual(f: &SuperExpr, map: &SuperMap) -> Result<SuperExpr> {
    let inv = map.invert()?;
    let f_new = inv.pull(f)?;
    let transported = map.pull(&delta0(&f_new))?;
    let ber = berezinian(map)?;
    let log_term = (&ber.invert_even()? * &bracket(&ber, f)?).scale_rational(&half());
    Ok(&(&delta0(f) - &transported) + &log_term)
}

/// `Δ#(f√dv) - (Δ_dv f)√dv - (-1)^{p(f)} f Δ#√dv`.
pub fn module_rule_residual(f: &SuperExpr, dv: &VolumeForm) -> Result<SuperExpr> {
    let pf = parity_bit(f)?;
    let s = dv.sqrt()?;
    let lhs = delta_sharp(&(f * &s));
    let a = &delta_vol(f, dv)? * &s;
    let b = sign(pf == 1, f * &delta_sharp(&s));
    Ok(&(&lhs - &a) - &b)
}

/// `Δ_dv² f - {σ⁻¹ Δ₀ σ, f}` with `σ = √ρ`.
pub fn square_residual(f: &SuperExpr, dv: &VolumeForm) -> Result<SuperExpr> {
    let s = dv.sqrt()?;
    let lhs = delta_vol(&delta_vol(f, dv)?, dv)?;
    let r = &s.invert_even()? * &delta0(&s);
    Ok(&lhs - &bracket(&r, f)?)
}

/// `Δ₀ Ber^{1/2}(F)` for a canonical map.
pub fn ber_root_residual(map: &SuperMap) -> Result<SuperExpr> {
    Ok(delta0(&ber_sqrt(map)?))
}

/// Named residuals of the BV identities; every value is zero when the identities hold.
pub fn bv_identity_residuals(
    f: &SuperExpr,
    g: &SuperExpr,
    dv: &VolumeForm,
    map: &SuperMap,
) -> Result<Vec<(&'static str, SuperExpr)>> {
    Ok(vec![
        ("derivation", derivation_residual(f, g, dv)?),
        ("leibniz", leibniz_residual(f, g, dv)?),
        ("chart-change", chart_change_residual(f, map)?),
        ("module-rule", module_rule_residual(f, dv)?),
        ("square", square_residual(f, dv)?),
        ("ber-root", ber_root_residual(map)?),
    ])
}

/// `(s, Δ#s, s·Δ#s, s⁻¹Δ#s)` for `s = √dv`; weights ½, ½, 1 and 0.
pub fn canonical_objects(dv: &VolumeForm) -> Result<[SuperExpr; 4]> {
    let s = dv.sqrt()?;
    let d = delta_sharp(&s);
    let prod = &s * &d;
    let ratio = &s.invert_even()? * &d;
    Ok([s, d, prod, ratio])
}

/// Signed coefficient of `θ₁…θₙ`.
pub fn c_raw(s: &SuperExpr) -> Scalar {
    s.coefficient(OddKey(s.table().theta_mask()))
}

/// `|c|` for the constant top coefficient of a closed semidensity.
pub fn c_invariant(s: &SuperExpr) -> Result<BigRational> {
    let c = c_raw(s);
    c.constant()
        .map(|r| r.abs())
        .ok_or_else(|| Error::Precondition(format!("top coefficient {} is not constant", crate::superalgebra::render_scalar(&c, s.table()))))
}

/// The odd constant `ν` in the span of the aux odds with `Δ#s = ν s`, if any.
pub fn classify_nu(s: &SuperExpr) -> Result<Option<SuperExpr>> {
    if !s.is_even() {
        return Err(Error::Parity("classify_nu needs an even semidensity".into()));
    }
    let ratio = &s.invert_even()? * &delta_sharp(s);
    let aux = s.table().aux_mask();
    let constant = ratio
        .terms()
        .all(|(k, c)| k.len() == 1 && k.0 & aux == k.0 && c.constant().is_some());
    Ok(constant.then_some(ratio))
}

/// `Δ#r + Δ#(Q(t)·(s + tΔ#r))` for the Moser generator.
pub fn moser_residual(s: &SuperExpr, r: &SuperExpr) -> Result<SuperExpr> {
    let q = moser_hamiltonian(s, r)?;
    let tt = q.table().clone();
    let idx = tt.param_index(crate::flows::TIME).unwrap();
    let st = &s.retag(&tt)? + &(&SuperExpr::param(&tt, idx) * &delta_sharp(&r.retag(&tt)?));
    Ok(&delta_sharp(&r.retag(&tt)?) + &delta_sharp(&(&q * &st)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::parse_expr;
    use crate::superalgebra::SymbolTable;

    #[test]
    fn worked_values() {
        let t = SymbolTable::standard(2, 0);
        let p = |s| parse_expr(s, &t).unwrap();
        assert_eq!(delta0(&p("x1*th1")), p("1"));
        assert_eq!(delta0(&p("x1*x2*th1*th2")), p("-x1*th1 + x2*th2"));
        let dv = VolumeForm::new(p("1 + 2*x1*th1*th2")).unwrap();
        assert_eq!(delta_vol(&p("th1"), &dv).unwrap(), p("th1*th2"));
    }

    #[test]
    fn action_example() {
        let t = SymbolTable::standard(3, 0);
        let p = |s| parse_expr(s, &t).unwrap();
        assert_eq!(infinitesimal_action(&p("th1*th2*th3"), &p("x1")).unwrap(), p("th2*th3"));
    }

    #[test]
    fn divergence_form_agrees() {
        let t = SymbolTable::standard(2, 1);
        let p = |s| parse_expr(s, &t).unwrap();
        let dv = VolumeForm::new(p("(1 + x1^2)*(1 + b1*x2*th1 + x1*th1*th2)")).unwrap();
        for f in ["x1*x2*th1*th2", "b1*th1 + x2^2*th1*th2", "x1^3*th1", "b1*x2 + x1*th2"] {
            assert_eq!(delta_by_divergence(&p(f), &dv).unwrap(), delta_vol(&p(f), &dv).unwrap(), "{f}");
        }
    }

    #[test]
    fn invariants_of_semidensities() {
        let t = SymbolTable::standard(2, 1);
        let p = |s| parse_expr(s, &t).unwrap();
        assert_eq!(c_invariant(&p("1 - 5*th1*th2")).unwrap(), BigRational::from_integer(5.into()));
        assert!(c_invariant(&p("1 + x1*th1*th2")).is_err());
        assert_eq!(classify_nu(&p("1")).unwrap(), Some(p("0")));
        let t1 = SymbolTable::standard(1, 1);
        let q = |s| parse_expr(s, &t1).unwrap();
        assert_eq!(classify_nu(&q("1 - b1*x1*th1")).unwrap(), Some(q("b1")));
        assert_eq!(classify_nu(&q("1 + x1^2*th1*b1")).unwrap(), None);
        assert!(moser_residual(&p("1"), &p("x1*th1*th2*b1")).unwrap().is_zero());
    }
}
