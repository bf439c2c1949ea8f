//! Multivector fields and differential forms on the base, seen as functions and
//! semidensities on the odd cotangent bundle.

use std::collections::BTreeMap;

use num_rational::BigRational;

use crate::bv::{delta_vol, VolumeForm};
use crate::error::{Error, Result};
use crate::superalgebra::{Bindings, OddKey, Scalar, SuperExpr, Table};
use crate::symplectic::bracket;

/// `T^{i₁…i_k}(x) ∂_{i₁}∧…∧∂_{i_k}` stored as `T^{i₁…i_k} θ_{i₁}…θ_{i_k}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultivectorField {
    pub expr: SuperExpr,
}

/// `w_{i₁…i_k}(x) dx^{i₁}∧…∧dx^{i_k}` stored as `w_{i₁…i_k} ξ^{i₁}…ξ^{i_k}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferentialForm {
    pub expr: SuperExpr,
}

impl MultivectorField {
    pub fn new(expr: SuperExpr) -> Result<MultivectorField> {
        if !expr.is_frame_free() {
            return Err(Error::Input("multivector field may not contain frame odds".into()));
        }
        Ok(MultivectorField { expr })
    }

    /// `Σ X^i ∂_i`.
    pub fn vector_field(table: &Table, components: &[SuperExpr]) -> Result<MultivectorField> {
        let mut acc = SuperExpr::zero(table);
        for (i, c) in components.iter().enumerate() {
            acc = acc.try_add(&c.try_mul(&SuperExpr::theta(table, i))?)?;
        }
        MultivectorField::new(acc)
    }

    /// Components `X^i` of the degree-one part.
    pub fn components(&self) -> Vec<SuperExpr> {
        let t = self.expr.table();
        (0..t.n()).map(|i| self.expr.homogeneous_part(1).d_odd_right(t.theta_index(i))).collect()
    }
}

impl DifferentialForm {
    pub fn new(expr: SuperExpr) -> Result<DifferentialForm> {
        if expr.uses_odd_mask(expr.table().theta_mask()) {
            return Err(Error::Input("differential form may not contain θ".into()));
        }
        Ok(DifferentialForm { expr })
    }

    pub fn zero(table: &Table) -> DifferentialForm {
        DifferentialForm { expr: SuperExpr::zero(table) }
    }

    pub fn table(&self) -> &Table {
        self.expr.table()
    }

    /// `dx^{i₁}∧…` for ascending indices.
    pub fn basis(table: &Table, indices: &[usize]) -> DifferentialForm {
        let mut e = SuperExpr::one(table);
        for &i in indices {
            e = &e * &SuperExpr::frame(table, i);
        }
        DifferentialForm { expr: e }
    }

    /// Degree-`k` component.
    pub fn component(&self, k: u32) -> DifferentialForm {
        let mask = self.table().frame_mask();
        DifferentialForm { expr: self.expr.filter_terms(|key| (key.0 & mask).count_ones() == k) }
    }

    pub fn top(&self) -> DifferentialForm {
        self.component(self.table().n() as u32)
    }

    /// Coefficients keyed by the frame part of each monomial; the remaining odd
    /// generators stay on the left.
    pub fn coefficients(&self) -> BTreeMap<OddKey, SuperExpr> {
        let t = self.table();
        let mask = t.frame_mask();
        let mut out: BTreeMap<OddKey, SuperExpr> = BTreeMap::new();
        for (k, s) in self.expr.terms() {
            let c = SuperExpr::term(t, OddKey(k.0 & !mask), s.clone());
            let slot = out.entry(OddKey(k.0 & mask)).or_insert_with(|| SuperExpr::zero(t));
            *slot = &*slot + &c;
        }
        out
    }

    /// Wedge notation with ascending indices, e.g. `-dx1^dx2 + x1*dx1`.
    pub fn render(&self) -> String {
        let t = self.table();
        let mut parts: Vec<String> = Vec::new();
        let mut coeffs: Vec<(OddKey, SuperExpr)> = self.coefficients().into_iter().collect();
        coeffs.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.0.cmp(&b.0)));
        for (key, c) in coeffs {
            let wedge: Vec<String> = key
                .indices()
                .map(|k| format!("d{}", t.coord_name(k - t.frame_index(0))))
                .collect();
            let wedge = wedge.join("^");
            let cr = c.render();
            let neg = cr.starts_with('-') && !cr[1..].contains(" + ") && !cr[1..].contains(" - ");
            let body = if neg { cr[1..].to_string() } else { cr };
            let compound = body.contains(" + ") || body.contains(" - ");
            let atom = if compound && !wedge.is_empty() { format!("({body})") } else { body };
            let text = if wedge.is_empty() {
                atom
            } else if atom == "1" {
                wedge
            } else {
                format!("{atom}*{wedge}")
            };
            parts.push(if neg { format!("-{text}") } else { text });
        }
        if parts.is_empty() {
            return "0".into();
        }
        let mut out = parts[0].clone();
        for p in &parts[1..] {
            match p.strip_prefix('-') {
                Some(rest) => {
                    out.push_str(" - ");
                    out.push_str(rest);
                }
                None => {
                    out.push_str(" + ");
                    out.push_str(p);
                }
            }
        }
        out
    }
}

pub fn tau(t: &MultivectorField) -> SuperExpr {
    t.expr.clone()
}

pub fn tau_inverse(e: &SuperExpr) -> Result<MultivectorField> {
    MultivectorField::new(e.clone())
}

/// Bracket of multivector fields transported from the canonical bracket.
pub fn schouten(a: &MultivectorField, b: &MultivectorField) -> Result<MultivectorField> {
    MultivectorField::new(bracket(&a.expr, &b.expr)?)
}

/// Commutator `XY - YX` of vector fields given by components.
pub fn lie_bracket(x: &[SuperExpr], y: &[SuperExpr]) -> Vec<SuperExpr> {
    (0..x.len())
        .map(|i| {
            let mut acc = SuperExpr::zero(x[0].table());
            for j in 0..x.len() {
                acc = &acc + &(&(&x[j] * &y[i].d_coord(j)) - &(&y[j] * &x[i].d_coord(j)));
            }
            acc
        })
        .collect()
}

fn frame_odds(t: &Table) -> Vec<usize> {
    (0..t.n()).map(|i| t.frame_index(i)).collect()
}

fn kernel(t: &Table) -> SuperExpr {
    let mut e = SuperExpr::one(t);
    for i in 0..t.n() {
        e = &e * &(&SuperExpr::one(t) + &(&SuperExpr::theta(t, i) * &SuperExpr::frame(t, i)));
    }
    e
}

fn raw_integral(w: &SuperExpr) -> SuperExpr {
    (w * &kernel(w.table())).berezin(&frame_odds(w.table()))
}

/// Sign of the `dⁿξ` measure, fixed so that `1 ↦ θ₁…θₙ`.
pub fn measure_sign(t: &Table) -> Result<i64> {
    let one = raw_integral(&SuperExpr::one(t));
    let top = SuperExpr::theta_top(t);
    if one == top {
        Ok(1)
    } else if one == -&top {
        Ok(-1)
    } else {
        Err(Error::Precondition("Berezin kernel does not reach the top θ monomial".into()))
    }
}

/// Coefficient of `√D` for the semidensity attached to a form: `±∫ w(x,ξ) exp(θ_iξ^i) dⁿξ`.
pub fn tau_sharp(w: &DifferentialForm) -> Result<SuperExpr> {
    let t = w.table();
    let eps = measure_sign(t)?;
    Ok(raw_integral(&w.expr).scale_int(eps))
}

/// `ξ^I ↦ σ θ_J` on basis monomials; the frame part of each key is sent to its θ image.
fn basis_images(t: &Table) -> Result<BTreeMap<u64, (u64, bool)>> {
    let n = t.n();
    let mut out = BTreeMap::new();
    for subset in 0u64..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|i| subset >> i & 1 == 1).collect();
        let img = tau_sharp(&DifferentialForm::basis(t, &idx))?;
        let (k, s) = img.terms().next().ok_or_else(|| Error::Precondition("degenerate basis image".into()))?;
        let neg = if s.is_one() {
            false
        } else if s.neg().is_one() {
            true
        } else {
            return Err(Error::Precondition("basis image is not a signed monomial".into()));
        };
        out.insert(k.0, (frame_key(t, &idx), neg));
    }
    Ok(out)
}

fn frame_key(t: &Table, idx: &[usize]) -> u64 {
    idx.iter().fold(0u64, |m, &i| m | 1 << t.frame_index(i))
}

/// Form whose semidensity coefficient is `s`, recovering every component.
pub fn tau_sharp_inverse(s: &SuperExpr) -> Result<DifferentialForm> {
    let t = s.table();
    if !s.is_frame_free() {
        return Err(Error::Input("semidensity coefficient may not contain frame odds".into()));
    }
    let images = basis_images(t)?;
    let tm = t.theta_mask();
    let mut acc = SuperExpr::zero(t);
    for (k, c) in s.terms() {
        let (frame, neg) = images[&(k.0 & tm)];
        let c = if neg { c.neg() } else { c.clone() };
        acc = &acc + &SuperExpr::term(t, OddKey((k.0 & !tm) | frame), c);
    }
    DifferentialForm::new(acc)
}

/// `d = ξ^i ∂/∂x^i`.
pub fn exterior_d(w: &DifferentialForm) -> DifferentialForm {
    let t = w.table();
    let mut acc = SuperExpr::zero(t);
    for i in 0..t.n() {
        acc = &acc + &(&SuperExpr::frame(t, i) * &w.expr.d_coord(i));
    }
    DifferentialForm { expr: acc }
}

/// Radial homotopy `h` with `dh + hd = id - (value at 0)` on polynomial forms.
///
/// A monomial `c x^α ξ^I` maps to `ι_x(c x^α ξ^I) / (|α| + |I|)` with `ι_x = x^i ∂/∂ξ^i`.
pub fn poincare_homotopy(w: &DifferentialForm) -> Result<DifferentialForm> {
    let t = w.table();
    let fm = t.frame_mask();
    let mut acc = SuperExpr::zero(t);
    for (k, s) in w.expr.terms() {
        if !s.is_polynomial() || s.has_jets() {
            return Err(Error::Unsupported("homotopy operator needs polynomial coefficients".into()));
        }
        let deg_i = (k.0 & fm).count_ones();
        if deg_i == 0 {
            continue;
        }
        for (m, c) in s.numer().terms() {
            let deg_x: u32 = m
                .factors()
                .filter(|(v, _)| matches!(v.kind(), crate::superalgebra::VarKind::Coord(_)))
                .map(|(_, e)| e)
                .sum();
            let mono = SuperExpr::term(
                t,
                k,
                Scalar::from_poly(crate::superalgebra::Poly::term(c.clone(), m.clone())),
            );
            let mut contracted = SuperExpr::zero(t);
            for i in 0..t.n() {
                contracted = &contracted + &(&SuperExpr::coord(t, i) * &mono.d_odd(t.frame_index(i)));
            }
            let r = BigRational::new(1.into(), (deg_x + deg_i).into());
            acc = &acc + &contracted.scale_rational(&r);
        }
    }
    Ok(DifferentialForm { expr: acc })
}

/// `T ⌐ w` defined through `τ#(T⌐w) = τ(T)·τ#(w)`.
pub fn inner_product(t: &MultivectorField, w: &DifferentialForm) -> Result<DifferentialForm> {
    tau_sharp_inverse(&t.expr.try_mul(&tau_sharp(w)?)?)
}

fn check_shift(a: &[SuperExpr], t: &Table) -> Result<()> {
    if a.len() != t.n() {
        return Err(Error::Input(format!("one-form needs {} coefficients, got {}", t.n(), a.len())));
    }
    for c in a {
        if !c.is_odd() {
            return Err(Error::Parity("one-form shift needs odd-valued coefficients".into()));
        }
        if !c.is_theta_free() || !c.is_frame_free() {
            return Err(Error::Input("one-form coefficients depend on x and auxiliary odds only".into()));
        }
    }
    Ok(())
}

/// `s(x, θ_i + a_i)` for an odd-valued one-form `a = a_i dx^i`.
pub fn one_form_shift(a: &[SuperExpr], s: &SuperExpr) -> Result<SuperExpr> {
    let t = s.table();
    check_shift(a, t)?;
    let mut b = Bindings::new(t);
    for (i, c) in a.iter().enumerate() {
        b = b.theta(i, &SuperExpr::theta(t, i) + c);
    }
    s.substitute(&b)
}

/// `Σ_p (1/p!) a∧…∧a ∧ w`.
pub fn one_form_shift_form(a: &[SuperExpr], w: &DifferentialForm) -> Result<DifferentialForm> {
    let t = w.table();
    check_shift(a, t)?;
    let mut one_form = SuperExpr::zero(t);
    for (i, c) in a.iter().enumerate() {
        one_form = &one_form + &(c * &SuperExpr::frame(t, i));
    }
    let mut acc = w.expr.clone();
    let mut power = w.expr.clone();
    for p in 1..=t.n() as i64 {
        power = (&one_form * &power).scale_rational(&BigRational::new(1.into(), p.into()));
        if power.is_zero() {
            break;
        }
        acc = &acc + &power;
    }
    Ok(DifferentialForm { expr: acc })
}

/// `w * w'` with `τ#(w*w') = √(τ#w · τ#w')`.
pub fn star(w: &DifferentialForm, w2: &DifferentialForm) -> Result<DifferentialForm> {
    if w.top().expr.is_zero() || w2.top().expr.is_zero() {
        return Err(Error::Precondition("star needs nonzero top-degree components".into()));
    }
    let prod = tau_sharp(w)?.try_mul(&tau_sharp(w2)?)?;
    tau_sharp_inverse(&prod.sqrt_series()?)
}

/// `(1/ρ) ∂_i(ρ X^i)` for `w = ρ dx¹∧…∧dxⁿ`.
pub fn divergence(x: &[SuperExpr], w: &DifferentialForm) -> Result<SuperExpr> {
    let rho = top_density(w)?;
    let rinv = rho.invert_even()?;
    let mut acc = SuperExpr::zero(w.table());
    for (i, c) in x.iter().enumerate() {
        acc = &acc + &(&rho * c).d_coord(i);
    }
    Ok(&rinv * &acc)
}

/// `ρ` with `w = ρ dx¹∧…∧dxⁿ`; `w` must be a top form with invertible coefficient.
pub fn top_density(w: &DifferentialForm) -> Result<SuperExpr> {
    let t = w.table();
    if w.top() != *w {
        return Err(Error::Input("expected a top-degree form".into()));
    }
    let rho = w.coefficients().remove(&OddKey(t.frame_mask())).unwrap_or_else(|| SuperExpr::zero(t));
    if !rho.is_even() || rho.body().is_zero() {
        return Err(Error::NotInvertible("top form has degenerate coefficient".into()));
    }
    Ok(rho)
}

/// `Δ_{ρ²}(τX) - τ(div_w X)`.
pub fn divergence_residual(x: &[SuperExpr], w: &DifferentialForm) -> Result<SuperExpr> {
    let rho = top_density(w)?;
    let dv = VolumeForm::new(&rho * &rho)?;
    let tx = MultivectorField::vector_field(w.table(), x)?;
    Ok(&delta_vol(&tx.expr, &dv)? - &divergence(x, w)?)
}

/// Top component of the form attached to `s`: the integrand over `{θ = 0}`.
pub fn lagrangian_top_form(s: &SuperExpr) -> Result<DifferentialForm> {
    Ok(tau_sharp_inverse(s)?.top())
}
