//! Seeded verification suites. Each suite evaluates named residuals on random
//! samples; every residual must be the zero expression.

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::bv::{
    c_invariant, chart_change_residual, delta0, delta_by_divergence, delta_sharp, delta_vol, derivation_residual,
    infinitesimal_action, leibniz_residual, module_rule_residual, square_residual, ber_root_residual, VolumeForm,
};
use crate::darboux::{
    darboux_pipeline, darboux_step, f3_identity_residual, pushforward_structure, r_residual, residual_report, solve_r,
    structure_matrices, StepKind,
};
use crate::error::Result;
use crate::flows::{derivative_at_zero, exp_flow, group_law_residual, hamiltonian_from_adjusted, moser_flow, FlowTime, TIME};
use crate::forms::{
    divergence_residual, exterior_d, lie_bracket, one_form_shift, one_form_shift_form, poincare_homotopy, schouten,
    tau_sharp, tau_sharp_inverse, DifferentialForm, MultivectorField,
};
use crate::sampling::Sampler;
use crate::superalgebra::{Bindings, OddKey, Parity, Scalar, SuperExpr, Table};
use crate::surfaces::{densities_p, dual_density, pullback_k, surface_relation_residual, AdjustedSurface};
use crate::symplectic::{
    ber_sqrt, berezinian, bracket, bracket_with, decompose, jacobi_residual, pullback_semidensity, Structure,
    SuperMap,
};

use super::parse_expr;

/// Inputs shared by all samples of a suite.
#[derive(Clone, Debug)]
pub struct Context {
    pub table: Table,
    pub structure: Option<Structure>,
}

type Residuals = Vec<(String, SuperExpr)>;
type SampleFn = fn(&mut Sampler, &Context) -> Result<Residuals>;

pub struct Suite {
    pub name: &'static str,
    /// Identity whose failure the suite reports.
    pub identity: &'static str,
    sample: SampleFn,
}

/// One nonzero residual.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Failure {
    pub sample: usize,
    pub label: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub identity: String,
    pub samples: usize,
    pub checks: usize,
    pub failures: Vec<Failure>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn one(label: &str, e: SuperExpr) -> Residuals {
    vec![(label.to_string(), e)]
}

/// Zero when `ok`, one otherwise: boolean checks expressed as residuals.
fn flag(t: &Table, ok: bool) -> SuperExpr {
    if ok {
        SuperExpr::zero(t)
    } else {
        SuperExpr::one(t)
    }
}

fn indexed(label: &str, es: impl IntoIterator<Item = SuperExpr>) -> Residuals {
    es.into_iter().enumerate().map(|(i, e)| (format!("{label}[{i}]"), e)).collect()
}

fn target_diff(a: &SuperMap, b: &SuperMap) -> Vec<SuperExpr> {
    a.targets.iter().zip(b.targets.iter()).map(|(x, y)| x - y).collect()
}

fn graded_sign(a: &SuperExpr, b: &SuperExpr) -> bool {
    a.is_odd() && b.is_odd()
}

// ---- superalgebra

fn supercommutativity(s: &mut Sampler, c: &Context) -> Result<Residuals> {
    let t = &c.table;
    let (pa, pb, pc) = (s.parity(), s.parity(), s.parity());
    let (a, b, d) = (s.expr(t, pa), s.expr(t, pb), s.expr(t, pc));
    let ab = &a * &b;
    let ba = &b * &a;
    let comm = if graded_sign(&a, &b) { &ab + &ba } else { &ab - &ba };
    let assoc = &(&ab * &d) - &(&a * &(&b * &d));
    Ok(vec![("commutativity".into(), comm), ("associativity".into(), assoc)])
}

fn odd_derivatives(s: &mut Sampler, c: &Context) -> Result<Residuals> {
    let t = &c.table;
    let p = s.parity();
    let e = s.expr(t, p);
    let i = s.rng.gen_range(0..t.n());
    let j = s.rng.gen_range(0..t.n());
    Ok(one("anticommutator", &e.d_theta(i).d_theta(j) + &e.d_theta(j).d_theta(i)))
}

fn berezin_integral(s: &mut Sampler, c: &Context) -> Result<Residuals> {
    let t = &c.table;
    let p = s.parity();
    let e = s.expr(t, p);
    let odds: Vec<usize> = (0..t.n()).map(|i| t.theta_index(i)).collect();
    let mut it = e.clone();
    for &k in odds.iter().rev() {
        it = it.d_odd_right(k);
    }
    Ok(one("iterated", &e.berezin(&odds) - &it))
}

fn invert_sqrt(s: &mut Sampler, c: &Context) -> Result<Residuals> {
    let t = &c.table;
    let sigma = s.root_density(t);
    let inv = sigma.invert_even()?;
    let sq = (&sigma * &sigma).sqrt_even()?;
    Ok(vec![("inverse".into(), &(&sigma * &inv) - &SuperExpr::one(t)), ("sqrt".into(), &(&sq * &sq) - &(&sigma * &sigma))])
}

fn normalize(s: &mut Sampler, c: &Context) -> Result<Residuals> {
    let t = &c.table;
    let p = s.parity();
    let mut raw: Vec<(OddKey, Scalar)> = Vec::new();
    for _ in 0..4 {
        let e = s.expr(t, p);
        raw.extend(e.terms().map(|(k, v)| (k, v.clone())));
    }
    let a = SuperExpr::from_terms(t, raw.clone());
    raw.shuffle(&mut s.rng);
    let b = SuperExpr::from_terms(t, raw);
    let again = SuperExpr::from_terms(t, a.terms().map(|(k, v)| (k, v.clone())));
    Ok(vec![("order".into(), &a - &b), ("idempotent".into(), &a - &again)])
}

fn parse_render(s: &mut Sampler, c: &Context) -> Result<Residuals> {
    let t = &c.table;
    let p = s.parity();
    let e = &s.expr(t, p) + &s.form(t).expr;
    let back = parse_expr(&e.render(), t)?;
    Ok(one("roundtrip", &back - &e))
}

// ---- symplectic

fn jacobi(s: &mut Sampler, c: &Context) -> Result<Residuals> {
    let t = &c.table;
    let (p1, p2, p3) = (s.parity(), s.parity(), s.parity());
    let (f, g, h) = (s.expr(t, p1), s.expr(t, p2), s.expr(t, p3));
    Ok(one("jacobi", jacobi_residual(&f, &g, &h, c.structure.as_ref())?))
}

fn bracket_modes(s: &mut Sampler, c: &Context) -> Result<Residuals> {
    let t = &c.table;
    let (p1, p2) = (s.parity(), s.parity());
    let (f, g) = (s.expr(t, p1), s.expr(t, p2));
    Ok(one("modes", &bracket(&f, &g)? - &bracket_with(&f, &g, &Structure::canonical(t))?))
}

fn ber_multiplicative(s: &mut Sampler, c: &Context) -> Result<Residuals> {
    let t = &c.table;
    let f = s.canonical_map(t)?;
    let g = s.canonical_map(t)?;
    let h = f.compose(&g)?;
    let expected = &g.pull(&berezinian(&f)?)? * &berezinian(&g)?;
    Ok(one("ber", &berezinian(&h)? - &expected))
}

fn ber_root(s: &mut Sampler, c: &Context) -> Result<Residuals> {
    let t = &c.table;
    let f = s.canonical_map(t)?;
    let r = ber_sqrt(&f)?;
    let body_square = berezinian(&f)?.body().sqrt().is_some();
    Ok(vec![("square".into(), &(&r * &r) - &berezinian(&f)?), ("body".into(), flag(t, body_square))])
}

fn decomposition(s: &mut Sampler, c: &Context) -> Result<Residuals> {
    let t = &c.table;
    let f = s.special_map(t)?.compose(&s.point_map(t)?.compose(&s.adjusted_flow(t)?.1)?)?;
    let d = decompose(&f)?;
    let back = d.special.compose(&d.point.compose(&d.adjusted)?)?;
    Ok(indexed("target", target_diff(&back, &f)))
}

fn pullback_functorial(s: &mut Sampler, c: &Context) -> Result<Residuals> {
    let t = &c.table;
    let f = s.canonical_map(t)?;
    let g = s.canonical_map(t)?;
    let p = s.parity();
    let sd = s.expr(t, p);
    let lhs = pullback_semidensity(&f.compose(&g)?, &sd)?;
    let rhs = pullback_semidensity(&g, &pullback_semidensity(&f, &sd)?)?;
    Ok(one("pullback", &lhs - &rhs))
}

// ---- bv

fn delta0_square(s: &mut Sampler, c: &Context) -> Result<Residuals> {
    let p = s.parity();
    let f = s.expr(&c.table, p);
    Ok(one("delta0^2", delta0(&delta0(&f))))
}

fn delta_divergence(s: &mut Sampler, c: &Context) -> Result<Residuals> {
    let t = &c.table;
    let p = s.parity();
    let f = s.expr(t, p);
    let dv = s.volume(t);
    Ok(one("routes", &delta_by_divergence(&f, &dv)? - &delta_vol(&f, &dv)?))
}

fn leibniz(s: &mut Sampler, c: &Context) -> Result<Residuals> {
    let t = &c.table;
    let (p1, p2) = (s.parity(), s.parity());
    let (f, g) = (s.expr(t, p1), s.expr(t, p2));
    let dv = s.volume(t);
    Ok(vec![
        ("derivation".into(), derivation_residual(&f, &g, &dv)?),
        ("product".into(), leibniz_residual(&f, &g, &dv)?),
    ])
}

fn chart_change(s: &mut Sampler, c: &Context) -> Result<Residuals> {
    let t = &c.table;
    let p = s.parity();
    let f = s.expr(t, p);
    let m = s.canonical_map(t)?;
    Ok(one("chart-change", chart_change_residual(&f, &m)?))
}

fn module_rule(s: &mut Sampler, c: &Context) -> Result<Residuals> {
    let t = &c.table;
    let p = s.parity();
    let f = s.expr(t, p);
    let dv = s.volume(t);
    Ok(one("module", module_rule_residual(&f, &dv)?))
}

fn square_formula(s: &mut Sampler, c: &Context) -> Result<Residuals> {
    let t = &c.table;
    let p = s.parity();
    let f = s.expr(t, p);
    let dv = s.volume(t);
    Ok(one("square", square_residual(&f, &dv)?))
}

fn ber_root_closed(s: &mut Sampler, c: &Context) -> Result<Residuals> {
    let m = s.canonical_map(&c.table)?;
    Ok(one("delta0 ber^1/2", ber_root_residual(&m)?))
}

fn covariance(s: &mut Sampler, c: &Context) -> Result<Residuals> {
    let t = &c.table;
    let mut out = Vec::new();
    let maps = [("special", s.special_map(t)?), ("point", s.point_map(t)?), ("adjusted", s.adjusted_flow(t)?.1)];
    for (name, m) in maps {
        let p = s.parity();
        let sd = s.expr(t, p);
        let lhs = delta_sharp(&pullback_semidensity(&m, &sd)?);
        let rhs = pullback_semidensity(&m, &delta_sharp(&sd))?;
        out.push((name.to_string(), &lhs - &rhs));
    }
    Ok(out)
}

fn flow_consistency(s: &mut Sampler, c: &Context) -> Result<Residuals> {
    let t = &c.table;
    let q = s.generator(t);
    let p = s.parity();
    let sd = s.expr(t, p);
    let f = exp_flow(&q, &FlowTime::Formal)?;
    let tt = f.table.clone();
    let idx = tt.param_index(TIME).unwrap();
    let moved = pullback_semidensity(&f, &sd.retag(&tt)?)?;
    let rate = derivative_at_zero(&moved, idx)?.retag(t)?;
    Ok(one("rate", &rate + &infinitesimal_action(&q, &sd)?))
}

/// Closed even semidensity `k + cθ₁…θₙ + Δ#u`; `c = 0` when `θ₁…θₙ` is odd.
fn closed_semidensity(s: &mut Sampler, t: &Table) -> (SuperExpr, BigRational) {
    let k = s.rng.gen_range(1..=3);
    let cval = if t.n() % 2 == 0 { s.rng.gen_range(-3i64..=3) } else { 0 };
    let u = s.generator(t);
    let e = &(&SuperExpr::int(t, k) + &SuperExpr::theta_top(t).scale_int(cval)) + &delta_sharp(&u);
    (e, BigRational::from_integer(cval.abs().into()))
}

fn c_invariance(s: &mut Sampler, c: &Context) -> Result<Residuals> {
    let t = &c.table;
    let (sd, cval) = closed_semidensity(s, t);
    let m = s.canonical_map(t)?;
    let moved = pullback_semidensity(&m, &sd)?;
    let got = c_invariant(&moved)?;
    Ok(vec![
        ("closed".into(), delta_sharp(&moved)),
        ("c".into(), SuperExpr::rational(t, &(got - cval))),
    ])
}

// ---- forms

fn intertwining(s: &mut Sampler, c: &Context) -> Result<Residuals> {
    let w = s.form(&c.table);
    Ok(one("intertwining", &delta_sharp(&tau_sharp(&w)?) - &tau_sharp(&exterior_d(&w))?))
}

fn tau_sharp_roundtrip(s: &mut Sampler, c: &Context) -> Result<Residuals> {
    let t = &c.table;
    let w = s.form(t);
    let p = s.parity();
    let sd = s.expr(t, p);
    Ok(vec![
        ("form".into(), &tau_sharp_inverse(&tau_sharp(&w)?)?.expr - &w.expr),
        ("semidensity".into(), &tau_sharp(&tau_sharp_inverse(&sd)?)? - &sd),
    ])
}

fn value_at_origin(w: &DifferentialForm) -> Result<SuperExpr> {
    let t = w.table();
    let mut b = Bindings::new(t);
    for i in 0..t.n() {
        b = b.coord(i, SuperExpr::zero(t));
    }
    w.component(0).expr.substitute(&b)
}

fn homotopy(s: &mut Sampler, c: &Context) -> Result<Residuals> {
    let w = s.form(&c.table);
    let lhs = &exterior_d(&poincare_homotopy(&w)?).expr + &poincare_homotopy(&exterior_d(&w))?.expr;
    Ok(one("dh+hd", &(&lhs - &w.expr) + &value_at_origin(&w)?))
}

fn divergence(s: &mut Sampler, c: &Context) -> Result<Residuals> {
    let t = &c.table;
    let x = s.vector_field(t);
    let k = s.rng.gen_range(1..=3);
    let i = s.rng.gen_range(0..t.n());
    let xi = SuperExpr::coord(t, i);
    let rho = &SuperExpr::int(t, k) + &(&xi * &xi);
    let w = DifferentialForm::new(&rho * &SuperExpr::term(t, OddKey(t.frame_mask()), Scalar::one()))?;
    Ok(one("divergence", divergence_residual(&x, &w)?))
}

fn shift_routes(s: &mut Sampler, c: &Context) -> Result<Residuals> {
    let t = &c.table;
    let a: Vec<SuperExpr> = (0..t.n()).map(|_| s.aux_valued(t, Parity::Odd)).collect();
    let w = s.form(t);
    let lhs = one_form_shift(&a, &tau_sharp(&w)?)?;
    let rhs = tau_sharp(&one_form_shift_form(&a, &w)?)?;
    Ok(one("routes", &lhs - &rhs))
}

fn schouten_vector_fields(s: &mut Sampler, c: &Context) -> Result<Residuals> {
    let t = &c.table;
    let (x, y) = (s.vector_field(t), s.vector_field(t));
    let tx = MultivectorField::vector_field(t, &x)?;
    let ty = MultivectorField::vector_field(t, &y)?;
    let comm = MultivectorField::vector_field(t, &lie_bracket(&x, &y))?;
    Ok(one("sign", &comm.expr + &schouten(&tx, &ty)?.expr))
}

// ---- darboux

fn sample_structure(s: &mut Sampler, c: &Context) -> Result<Structure> {
    match &c.structure {
        Some(st) => Ok(st.clone()),
        None => pushforward_structure(&s.messy_map(&c.table)?),
    }
}

fn darboux(s: &mut Sampler, c: &Context) -> Result<Residuals> {
    let st = sample_structure(s, c)?;
    let res = darboux_pipeline(&st)?;
    let mut out: Residuals = residual_report(&res.map, &st)?
        .into_iter()
        .map(|(a, b, e)| (format!("bracket[{a},{b}]"), e))
        .collect();
    out.push(("canonical".into(), flag(&c.table, res.canonical)));
    Ok(out)
}

fn darboux_identity(_s: &mut Sampler, c: &Context) -> Result<Residuals> {
    let t = &c.table;
    let res = darboux_pipeline(&Structure::canonical(t))?;
    Ok(indexed("target", target_diff(&res.map, &SuperMap::identity(t))))
}

fn solve_r_suite(s: &mut Sampler, c: &Context) -> Result<Residuals> {
    let st = sample_structure(s, c)?;
    let (e, f) = (st.e_block(), st.f_block());
    let r = solve_r(&e, &f)?;
    Ok(indexed("residual", r_residual(&r, &e, &f).entries().cloned()))
}

/// F3 steps rely on `θ_m∂E^{mj}/∂θ_i + θ_m∂E^{mi}/∂θ_j + rE^{ij} = O(θ^{r+1})`.
fn f3_identity(s: &mut Sampler, c: &Context) -> Result<Residuals> {
    let n = c.table.n();
    let mut st = sample_structure(s, c)?;
    let mut kinds = vec![StepKind::F1, StepKind::F2, StepKind::F1];
    kinds.extend(std::iter::repeat(StepKind::F3).take(n));
    let mut out = Vec::new();
    for (i, k) in kinds.into_iter().enumerate() {
        if k == StepKind::F3 {
            let sm = structure_matrices(&st)?;
            let res = f3_identity_residual(&sm.e, sm.class.0);
            out.extend(indexed(&format!("step {}", i + 1), res.entries().cloned()));
        }
        st = darboux_step(k, &st)?.1;
    }
    Ok(out)
}

// ---- flows

fn flow_group(s: &mut Sampler, c: &Context) -> Result<Residuals> {
    let q = s.generator(&c.table);
    let a = BigRational::new(s.rng.gen_range(-3..=3).into(), 2.into());
    let b = BigRational::new(s.rng.gen_range(1..=3).into(), 1.into());
    Ok(indexed("group", group_law_residual(&q, &a, &b)?))
}

fn flow_canonical(s: &mut Sampler, c: &Context) -> Result<Residuals> {
    let t = &c.table;
    let q = s.generator(t);
    let mut out = Vec::new();
    for (p, d) in [(1, 2), (1, 1), (2, 1)] {
        let f = exp_flow(&q, &FlowTime::Value(BigRational::new(p.into(), d.into())))?;
        out.push((format!("t={p}/{d} canonical"), flag(t, f.is_canonical()?)));
        for (a, b, e) in residual_report(&f, &Structure::canonical(t))? {
            out.push((format!("t={p}/{d} bracket[{a},{b}]"), e));
        }
    }
    Ok(out)
}

fn flow_roundtrip(s: &mut Sampler, c: &Context) -> Result<Residuals> {
    let (q, f) = s.adjusted_flow(&c.table)?;
    Ok(one("generator", &hamiltonian_from_adjusted(&f)? - &q))
}

fn flow_injective(s: &mut Sampler, c: &Context) -> Result<Residuals> {
    let t = &c.table;
    let q1 = s.generator(t);
    let q2 = s.generator(t);
    let one_t = FlowTime::Value(BigRational::from_integer(1.into()));
    let differ = exp_flow(&q1, &one_t)?.targets != exp_flow(&q2, &one_t)?.targets;
    Ok(one("injective", flag(t, q1 == q2 || differ)))
}

fn flow_fixes_surface(s: &mut Sampler, c: &Context) -> Result<Residuals> {
    let t = &c.table;
    let (_, f) = s.adjusted_flow(t)?;
    let mut b = Bindings::new(t);
    for i in 0..t.n() {
        b = b.theta(i, SuperExpr::zero(t));
    }
    let mut out = Vec::new();
    for (a, e) in f.targets.iter().enumerate() {
        let on = e.substitute(&b)?;
        let expected = if a < t.n() { SuperExpr::coord(t, a) } else { SuperExpr::zero(t) };
        out.push((format!("target[{a}]"), &on - &expected));
    }
    Ok(out)
}

fn moser(s: &mut Sampler, c: &Context) -> Result<Residuals> {
    let t = &c.table;
    let k = s.rng.gen_range(1..=3);
    let u = s.generator(t);
    let sd = &SuperExpr::int(t, k) + &delta_sharp(&u);
    let r = s.generator(t);
    let f = moser_flow(&sd, &r)?;
    Ok(one("moser", &pullback_semidensity(&f, &(&sd + &delta_sharp(&r)))? - &sd))
}

// ---- surfaces

fn surface(c: &Context) -> Result<AdjustedSurface> {
    AdjustedSurface::new(&c.table, 0)
}

fn surface_relation(s: &mut Sampler, c: &Context) -> Result<Residuals> {
    let p = s.parity();
    let sd = s.expr(&c.table, p);
    Ok(one("relation", surface_relation_residual(&sd, &surface(c)?)?))
}

fn dual_density_crosscheck(s: &mut Sampler, c: &Context) -> Result<Residuals> {
    let t = &c.table;
    let sf = surface(c)?;
    let dv = s.volume(t);
    let root = dv.sqrt()?;
    let a = dual_density(&SuperExpr::coord(t, 0), &SuperExpr::theta(t, 0), &dv, &sf)?;
    Ok(one("cross-check", &(&a * &sf.restrict(&root)?) - &pullback_k(&root, &sf)?))
}

fn densities(s: &mut Sampler, c: &Context) -> Result<Residuals> {
    let t = &c.table;
    let sf = surface(c)?;
    let (_, p1) = densities_p(&s.volume(t), &sf)?;
    let u = s.generator(t);
    let k = s.rng.gen_range(1..=3);
    let sigma = &SuperExpr::int(t, k) + &delta_sharp(&u);
    let (q0, q1) = densities_p(&VolumeForm::new(&sigma * &sigma)?, &sf)?;
    Ok(vec![("P1^2".into(), &p1 * &p1), ("closed P0".into(), q0), ("closed P1".into(), q1)])
}

/// Random combination of aux odds with integer coefficients.
fn odd_constant(s: &mut Sampler, t: &Table) -> SuperExpr {
    let mut e = SuperExpr::zero(t);
    for k in 0..t.n_aux() {
        e = &e + &SuperExpr::aux(t, k).scale_int(s.rng.gen_range(-2..=2));
    }
    e
}

/// `(f, φ) ↦ (af + βφ, γf + bφ)` multiplies the dual density by `Ber^{1/2}` of the mixing.
fn dual_density_mixing(s: &mut Sampler, c: &Context) -> Result<Residuals> {
    let t = &c.table;
    let sf = surface(c)?;
    let dv = s.volume(t);
    let (f, phi) = (SuperExpr::coord(t, 0), SuperExpr::theta(t, 0));
    let a = [1i64, 4, 9][s.rng.gen_range(0..3)];
    let b = [1i64, 4, 9][s.rng.gen_range(0..3)];
    let (beta, gamma) = (odd_constant(s, t), odd_constant(s, t));
    let f2 = &f.scale_int(a) + &(&beta * &phi);
    let phi2 = &(&gamma * &f) + &phi.scale_int(b);
    let binv = BigRational::new(1.into(), b.into());
    let ber = (&SuperExpr::int(t, a) - &(&beta * &gamma).scale_rational(&binv)).scale_rational(&binv);
    let base = dual_density(&f, &phi, &dv, &sf)?;
    let mixed = dual_density(&f2, &phi2, &dv, &sf)?;
    Ok(one("mixing", &mixed - &(&ber.sqrt_even()? * &base)))
}

pub const SUITES: &[Suite] = &[
    Suite { name: "supercommutativity", identity: "graded commutativity and associativity of the product", sample: supercommutativity },
    Suite { name: "odd-derivatives", identity: "odd partial derivatives anticommute", sample: odd_derivatives },
    Suite { name: "berezin", identity: "Berezin integral equals iterated right extraction", sample: berezin_integral },
    Suite { name: "invert-sqrt", identity: "even inverse and square root multiply back", sample: invert_sqrt },
    Suite { name: "normalize", identity: "normal form is idempotent and order-insensitive", sample: normalize },
    Suite { name: "parse-render", identity: "parse(render(e)) = e", sample: parse_render },
    Suite { name: "jacobi", identity: "graded Jacobi identity of the odd bracket", sample: jacobi },
    Suite { name: "bracket-modes", identity: "canonical bracket equals the structure bracket with the canonical matrix", sample: bracket_modes },
    Suite { name: "ber-multiplicative", identity: "Ber(F∘G) = Ber(F)∘G · Ber(G)", sample: ber_multiplicative },
    Suite { name: "ber-sqrt", identity: "Ber^{1/2}(F)² = Ber(F) with square body", sample: ber_root },
    Suite { name: "decompose", identity: "special ∘ point ∘ adjusted reproduces the map", sample: decomposition },
    Suite { name: "pullback-functorial", identity: "pullback(F∘G) = pullback(G)∘pullback(F) on semidensities", sample: pullback_functorial },
    Suite { name: "delta0-square", identity: "Δ₀² = 0", sample: delta0_square },
    Suite { name: "delta-divergence", identity: "Δ_dv as half the divergence of the Hamiltonian field", sample: delta_divergence },
    Suite { name: "leibniz", identity: "Δ_dv is a derivation of the bracket and obeys the product rule", sample: leibniz },
    Suite { name: "chart-change", identity: "transformation rule of Δ₀ under canonical maps", sample: chart_change },
    Suite { name: "module-rule", identity: "Δ#(f√dv) = (Δ_dv f)√dv + (-1)^{p(f)} f Δ#√dv", sample: module_rule },
    Suite { name: "square", identity: "Δ_dv² = {σ⁻¹Δ₀σ, ·}", sample: square_formula },
    Suite { name: "ber-root", identity: "Δ₀ Ber^{1/2}(F) = 0 for canonical F", sample: ber_root_closed },
    Suite { name: "covariance", identity: "Δ# commutes with pullback by canonical maps", sample: covariance },
    Suite { name: "flow-consistency", identity: "d/dt pullback along the flow of Q is -δ_Q", sample: flow_consistency },
    Suite { name: "c-invariant", identity: "top coefficient of a closed semidensity is invariant", sample: c_invariance },
    Suite { name: "intertwining", identity: "Δ#∘τ# = τ#∘d", sample: intertwining },
    Suite { name: "tau-sharp-roundtrip", identity: "τ# and its inverse are mutually inverse", sample: tau_sharp_roundtrip },
    Suite { name: "homotopy", identity: "dh + hd = id - evaluation at the origin", sample: homotopy },
    Suite { name: "divergence", identity: "Δ_{ρ²}(τX) = τ(div X)", sample: divergence },
    Suite { name: "one-form-shift", identity: "θ-shift by a one-form equals the exponential wedge series", sample: shift_routes },
    Suite { name: "schouten", identity: "τ([X,Y]) = -{τX, τY} on vector fields", sample: schouten_vector_fields },
    Suite { name: "darboux", identity: "Darboux pipeline ends in canonical coordinates", sample: darboux },
    Suite { name: "darboux-identity", identity: "Darboux pipeline fixes canonical input", sample: darboux_identity },
    Suite { name: "solve-r", identity: "2R + RFR - E = 0", sample: solve_r_suite },
    Suite { name: "f3-identity", identity: "graded symmetry identity of E behind the F3 step", sample: f3_identity },
    Suite { name: "flow-group", identity: "flow group law", sample: flow_group },
    Suite { name: "flow-canonical", identity: "flows are canonical", sample: flow_canonical },
    Suite { name: "flow-roundtrip", identity: "generator recovered from its time-one flow", sample: flow_roundtrip },
    Suite { name: "flow-injective", identity: "distinct generators give distinct flows", sample: flow_injective },
    Suite { name: "flow-surface", identity: "adjusted flows fix θ = 0", sample: flow_fixes_surface },
    Suite { name: "moser", identity: "Moser flow pulls s + Δ#r back to s", sample: moser },
    Suite { name: "surface-relation", identity: "K(Δ#s) = -Δ̃#K(s) on the surface", sample: surface_relation },
    Suite { name: "dual-density", identity: "dual density times √ρ equals K(√dv)", sample: dual_density_crosscheck },
    Suite { name: "dual-density-mixing", identity: "dual density scales by Ber^{1/2} of the (f, φ) mixing", sample: dual_density_mixing },
    Suite { name: "densities-p", identity: "P₁² = 0, and P₀ = P₁ = 0 for closed √dv", sample: densities },
];

pub fn find(name: &str) -> Option<&'static Suite> {
    SUITES.iter().find(|s| s.name == name)
}

fn suite_seed(seed: u64, name: &str) -> u64 {
    // FNV-1a over the suite name keeps suites independent of their listing order.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h ^ seed
}

/// Runs `samples` samples. Errors raised while evaluating a sample count as failures.
pub fn run_suite(suite: &Suite, ctx: &Context, samples: usize, seed: u64) -> SuiteReport {
    let mut sampler = Sampler::new(suite_seed(seed, suite.name));
    let mut failures = Vec::new();
    let mut checks = 0;
    for i in 0..samples {
        match (suite.sample)(&mut sampler, ctx) {
            Ok(rs) => {
                checks += rs.len();
                for (label, e) in rs {
                    if !e.is_zero() {
                        failures.push(Failure { sample: i, label, value: e.render() });
                    }
                }
            }
            Err(e) => {
                checks += 1;
                failures.push(Failure { sample: i, label: "error".into(), value: e.to_string() });
            }
        }
    }
    SuiteReport {
        suite: suite.name.into(),
        identity: suite.identity.into(),
        samples,
        checks,
        failures,
    }
}

/// Runs several suites on scoped threads; reports keep the order of `suites`.
pub fn run_suites(suites: &[&'static Suite], ctx: &Context, samples: usize, seed: u64) -> Vec<SuiteReport> {
    std::thread::scope(|sc| {
        let handles: Vec<_> = suites.iter().map(|s| sc.spawn(move || run_suite(s, ctx, samples, seed))).collect();
        handles.into_iter().map(|h| h.join().expect("suite thread panicked")).collect()
    })
}
