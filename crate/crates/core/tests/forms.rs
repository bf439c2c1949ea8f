use oddsym::bv::{delta0, delta_sharp};
use oddsym::cli::parse_expr;
use oddsym::forms::{
    divergence, divergence_residual, exterior_d, inner_product, lagrangian_top_form, lie_bracket, one_form_shift,
    one_form_shift_form, poincare_homotopy, schouten, star, tau, tau_sharp, tau_sharp_inverse, DifferentialForm,
    MultivectorField,
};
use oddsym::sampling::Sampler;
use oddsym::symplectic::bracket;
use oddsym::{ChartSpec, OddKey, Parity, SuperExpr, SymbolTable, Table};
use proptest::prelude::*;

fn p(t: &Table, s: &str) -> SuperExpr {
    parse_expr(s, t).unwrap()
}

fn form(t: &Table, s: &str) -> DifferentialForm {
    DifferentialForm::new(p(t, s)).unwrap()
}

fn worked_chart() -> Table {
    SymbolTable::new(ChartSpec {
        chart: "E".into(),
        even: vec!["x0".into(), "x1".into(), "x2".into()],
        odd: vec!["th0".into(), "th1".into(), "th2".into()],
        functions: vec!["b0".into(), "b1".into(), "b2".into()],
        ..Default::default()
    })
    .unwrap()
}

/// `dx^{i₁}∧…∧dx^{i_k}` acting as `∂_{θ_{i₁}}⋯∂_{θ_{i_k}}` on `θ₁⋯θₙ`, coefficients on the left.
fn tau_sharp_oracle(w: &DifferentialForm) -> SuperExpr {
    let t = w.table();
    let mut acc = SuperExpr::zero(t);
    for (key, c) in w.coefficients() {
        let mut e = SuperExpr::theta_top(t);
        let frames: Vec<usize> = (0..t.n()).filter(|&i| key.contains(t.frame_index(i))).collect();
        for &i in frames.iter().rev() {
            e = e.d_theta(i);
        }
        acc = &acc + &(&c * &e);
    }
    acc
}

#[test]
fn tau_on_multivectors() {
    let t = SymbolTable::standard_with(2, 0, &[], &["T"]);
    let d1 = MultivectorField::vector_field(&t, &[p(&t, "1"), p(&t, "0")]).unwrap();
    assert_eq!(tau(&d1), p(&t, "th1"));
    assert_eq!(tau(&MultivectorField::new(p(&t, "T*th1*th2")).unwrap()), p(&t, "T*th1*th2"));

    let (x, y) = (vec![p(&t, "x2"), p(&t, "0")], vec![p(&t, "0"), p(&t, "1")]);
    assert_eq!(lie_bracket(&x, &y), vec![p(&t, "-1"), p(&t, "0")]);
    let (tx, ty) = (MultivectorField::vector_field(&t, &x).unwrap(), MultivectorField::vector_field(&t, &y).unwrap());
    assert_eq!(bracket(&tx.expr, &ty.expr).unwrap(), p(&t, "th1"));
    let comm = MultivectorField::vector_field(&t, &lie_bracket(&x, &y)).unwrap();
    assert_eq!(tau(&comm), schouten(&tx, &ty).unwrap().expr.neg());
}

#[test]
fn tau_sharp_table() {
    let t = SymbolTable::standard_with(2, 0, &[], &["f", "w1", "w2", "w"]);
    assert_eq!(tau_sharp(&form(&t, "f")).unwrap(), p(&t, "f*th1*th2"));
    assert_eq!(tau_sharp(&form(&t, "w1*xi1 + w2*xi2")).unwrap(), p(&t, "w1*th2 - w2*th1"));
    assert_eq!(tau_sharp(&form(&t, "w*xi1*xi2")).unwrap(), p(&t, "-w"));
}

#[test]
fn exterior_derivative() {
    let t = SymbolTable::standard_with(2, 0, &[], &["b1", "b2", "f"]);
    assert_eq!(exterior_d(&form(&t, "b1*xi1 + b2*xi2")), form(&t, "(D(b2,x1) - D(b1,x2))*xi1*xi2"));
    assert!(exterior_d(&exterior_d(&form(&t, "f"))).expr.is_zero());

    let w = worked_chart();
    let one_form = form(&w, "b0*xi0 + b1*xi1 + b2*xi2");
    assert_eq!(tau_sharp(&exterior_d(&one_form)).unwrap(), delta_sharp(&tau_sharp(&one_form).unwrap()));
}

#[test]
fn homotopy_operator() {
    let t = SymbolTable::standard(2, 0);
    let a = poincare_homotopy(&form(&t, "xi1*xi2")).unwrap();
    assert_eq!(a, form(&t, "-x2/2*xi1 + x1/2*xi2"));
    assert_eq!(exterior_d(&a), form(&t, "xi1*xi2"));
    let a = poincare_homotopy(&form(&t, "x1*xi1*xi2")).unwrap();
    assert_eq!(a, form(&t, "-x1*x2/3*xi1 + x1^2/3*xi2"));
    assert_eq!(exterior_d(&a), form(&t, "x1*xi1*xi2"));
    assert!(poincare_homotopy(&form(&t, "7")).unwrap().expr.is_zero());
}

#[test]
fn inner_products() {
    let t1 = SymbolTable::standard(1, 0);
    let d1 = MultivectorField::new(p(&t1, "th1")).unwrap();
    assert_eq!(inner_product(&d1, &form(&t1, "xi1")).unwrap(), form(&t1, "1"));
    let t2 = SymbolTable::standard(2, 0);
    let d1 = MultivectorField::new(p(&t2, "th1")).unwrap();
    assert_eq!(inner_product(&d1, &form(&t2, "xi1*xi2")).unwrap(), form(&t2, "xi2"));
    let zero = MultivectorField::new(p(&t2, "0")).unwrap();
    assert!(inner_product(&zero, &form(&t2, "x1*xi1*xi2 + xi1")).unwrap().expr.is_zero());
}

#[test]
fn one_form_shifts() {
    let t = SymbolTable::standard(2, 2);
    let s = p(&t, "th1*th2");
    assert_eq!(one_form_shift(&[p(&t, "0"), p(&t, "0")], &s).unwrap(), s);
    let a = [p(&t, "b1"), p(&t, "b2")];
    let shifted = one_form_shift(&a, &s).unwrap();
    assert_eq!(shifted, p(&t, "th1*th2 + th1*b2 + b1*th2 + b1*b2"));
    let w = tau_sharp_inverse(&s).unwrap();
    assert_eq!(tau_sharp(&one_form_shift_form(&a, &w).unwrap()).unwrap(), shifted);

    let bx = [p(&t, "x2*b1"), p(&t, "b2 - b1")];
    let sum: Vec<SuperExpr> = a.iter().zip(&bx).map(|(u, v)| u + v).collect();
    let twice = one_form_shift(&bx, &one_form_shift(&a, &s).unwrap()).unwrap();
    assert_eq!(twice, one_form_shift(&sum, &s).unwrap());
}

#[test]
fn star_products() {
    let t = SymbolTable::standard(1, 0);
    assert_eq!(star(&form(&t, "4*xi1"), &form(&t, "xi1")).unwrap(), form(&t, "2*xi1"));
    let w = form(&t, "(1 + x1^2)*xi1 + x1");
    assert_eq!(star(&w, &w).unwrap(), w);
    let w = form(&t, "xi1 + 3");
    assert_eq!(star(&w, &w).unwrap(), w);
}

#[test]
fn divergences() {
    let t = SymbolTable::standard(2, 0);
    let flat = form(&t, "xi1*xi2");
    let x = [p(&t, "x1"), p(&t, "0")];
    assert!(divergence(&x, &flat).unwrap().is_one());
    assert_eq!(divergence(&x, &flat).unwrap(), delta0(&p(&t, "x1*th1")));
    let y = [p(&t, "x1^2*x2"), p(&t, "x2^3 + x1")];
    assert_eq!(divergence(&y, &flat).unwrap(), p(&t, "2*x1*x2 + 3*x2^2"));
    let w = form(&t, "x2^2*xi1*xi2");
    assert!(divergence_residual(&y, &w).unwrap().is_zero());
}

#[test]
fn lagrangian_top_forms() {
    let w = worked_chart();
    let s = p(&w, "1 + b0*th1*th2 + b1*th2*th0 + b2*th0*th1");
    assert_eq!(lagrangian_top_form(&s).unwrap(), form(&w, "-xi0*xi1*xi2"));
    let t = SymbolTable::standard(3, 0);
    assert_eq!(lagrangian_top_form(&p(&t, "1")).unwrap(), form(&t, "-xi1*xi2*xi3"));
    assert!(lagrangian_top_form(&p(&t, "x1*th1 + th2*th3")).unwrap().expr.is_zero());
}

#[test]
fn tau_sharp_matches_contraction_oracle_on_every_basis_form() {
    for n in 1..=4 {
        let t = SymbolTable::standard(n, 0);
        for mask in 0u64..(1 << n) {
            let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let w = DifferentialForm::basis(&t, &idx);
            assert_eq!(tau_sharp(&w).unwrap(), tau_sharp_oracle(&w), "n={n} {}", w.render());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn tau_sharp_agrees_with_oracle(seed in any::<u64>(), n in 1usize..=4, aux in 0usize..=2) {
        let t = SymbolTable::standard(n, aux);
        let w = Sampler::new(seed).form(&t);
        let got = tau_sharp(&w).unwrap();
        prop_assert_eq!(&got, &tau_sharp_oracle(&w));
        prop_assert_eq!(tau_sharp_inverse(&got).unwrap(), w);
    }

    #[test]
    fn intertwining(seed in any::<u64>(), n in 1usize..=4) {
        let t = SymbolTable::standard(n, 1);
        let w = Sampler::new(seed).form(&t);
        prop_assert_eq!(tau_sharp_oracle(&exterior_d(&w)), delta_sharp(&tau_sharp_oracle(&w)));
    }

    #[test]
    fn homotopy_formula_on_exact_forms(seed in any::<u64>(), n in 1usize..=3) {
        let t = SymbolTable::standard(n, 1);
        let a = Sampler::new(seed).form(&t);
        let w = exterior_d(&a);
        prop_assert_eq!(exterior_d(&poincare_homotopy(&w).unwrap()), w);
    }

    #[test]
    fn schouten_sign_on_vector_fields(seed in any::<u64>(), n in 1usize..=4) {
        let t = SymbolTable::standard(n, 0);
        let mut s = Sampler::new(seed);
        let (x, y) = (s.vector_field(&t), s.vector_field(&t));
        let tx = MultivectorField::vector_field(&t, &x).unwrap();
        let ty = MultivectorField::vector_field(&t, &y).unwrap();
        let comm = MultivectorField::vector_field(&t, &lie_bracket(&x, &y)).unwrap();
        prop_assert_eq!(comm.expr, schouten(&tx, &ty).unwrap().expr.neg());
    }

    #[test]
    fn divergence_matches_delta(seed in any::<u64>(), n in 1usize..=4) {
        let t = SymbolTable::standard(n, 0);
        let mut s = Sampler::new(seed);
        let x = s.vector_field(&t);
        let i = (seed % n as u64) as usize;
        let rho = &SuperExpr::int(&t, 2) + &SuperExpr::coord(&t, i).pow(2);
        let w = DifferentialForm::new(&rho * &SuperExpr::term(&t, OddKey(t.frame_mask()), oddsym::Scalar::one())).unwrap();
        prop_assert!(divergence_residual(&x, &w).unwrap().is_zero());
    }

    #[test]
    fn shift_routes_agree(seed in any::<u64>(), n in 1usize..=3) {
        let t = SymbolTable::standard(n, 2);
        let mut s = Sampler::new(seed);
        let a: Vec<SuperExpr> = (0..n).map(|_| s.aux_valued(&t, Parity::Odd)).collect();
        let w = s.form(&t);
        let lhs = one_form_shift(&a, &tau_sharp(&w).unwrap()).unwrap();
        prop_assert_eq!(lhs, tau_sharp(&one_form_shift_form(&a, &w).unwrap()).unwrap());
    }
}
