use oddsym::bv::{
    bv_identity_residuals, c_invariant, canonical_objects, classify_nu, delta0, delta_sharp, delta_vol,
    infinitesimal_action, moser_residual, VolumeForm,
};
use oddsym::cli::parse_expr;
use oddsym::flows::{moser_hamiltonian, time_table, TIME};
use oddsym::sampling::Sampler;
use oddsym::symplectic::{pullback_semidensity, SuperMap};
use oddsym::{ChartSpec, Parity, SuperExpr, SymbolTable, Table};
use num_rational::BigRational;
use proptest::prelude::*;

fn p(t: &Table, s: &str) -> SuperExpr {
    parse_expr(s, t).unwrap()
}

fn vol(t: &Table, rho: &str) -> VolumeForm {
    VolumeForm::new(p(t, rho)).unwrap()
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

#[test]
fn delta0_examples() {
    let t = SymbolTable::standard(2, 0);
    assert!(delta0(&p(&t, "x1*th1")).is_one());
    assert_eq!(delta0(&p(&t, "x1*x2*th1*th2")), p(&t, "x2*th2 - x1*th1"));
}

#[test]
fn delta_vol_examples() {
    let t = SymbolTable::standard(2, 0);
    let f = p(&t, "x1^2*th1*th2 + x2*th2");
    assert_eq!(delta_vol(&f, &vol(&t, "1")).unwrap(), delta0(&f));
    assert_eq!(delta_vol(&p(&t, "th1"), &vol(&t, "1 + 2*x1*th1*th2")).unwrap(), p(&t, "th1*th2"));
    assert!(delta_vol(&p(&t, "x1"), &vol(&t, "1")).unwrap().is_zero());
}

#[test]
fn delta_sharp_examples() {
    let t = SymbolTable::standard(2, 0);
    assert!(delta_sharp(&p(&t, "1")).is_zero());
    assert!(delta_sharp(&p(&t, "x1*th1")).is_one());

    let w = worked_chart();
    let s = p(&w, "1 + b0*th1*th2 + b1*th2*th0 + b2*th0*th1");
    let expected = p(
        &w,
        "(D(b1,x2) - D(b2,x1))*th0 + (D(b2,x0) - D(b0,x2))*th1 + (D(b0,x1) - D(b1,x0))*th2",
    );
    assert_eq!(delta_sharp(&s), expected);
}

#[test]
fn identity_residual_examples() {
    let t = SymbolTable::standard(1, 0);
    let double = SuperMap::point(&t, vec![p(&t, "2*x1")], vec![p(&t, "x1/2")]).unwrap();
    for (name, r) in bv_identity_residuals(&p(&t, "x1*th1"), &p(&t, "th1"), &vol(&t, "1"), &double).unwrap() {
        assert!(r.is_zero(), "{name} = {r}");
    }
}

#[test]
fn infinitesimal_action_examples() {
    let t = SymbolTable::standard(3, 0);
    let q = p(&t, "th1*th2*th3");
    assert!(infinitesimal_action(&q, &p(&t, "1")).unwrap().is_zero());
    assert_eq!(infinitesimal_action(&q, &p(&t, "x1")).unwrap(), p(&t, "th2*th3"));
    assert!(infinitesimal_action(&p(&t, "0"), &p(&t, "x1*th1")).unwrap().is_zero());
}

#[test]
fn canonical_object_examples() {
    let t = SymbolTable::standard(2, 0);
    let [s, d, prod, ratio] = canonical_objects(&vol(&t, "1")).unwrap();
    assert!(s.is_one() && d.is_zero() && prod.is_zero() && ratio.is_zero());

    let [s, d, _, _] = canonical_objects(&vol(&t, "1 + 2*x1*th1*th2")).unwrap();
    assert_eq!(s, p(&t, "1 + x1*th1*th2"));
    assert_eq!(d, delta0(&s));

    let w = worked_chart();
    let s = p(&w, "1 + b0*th1*th2 + b1*th2*th0 + b2*th0*th1");
    let [back, ..] = canonical_objects(&VolumeForm::new(&s * &s).unwrap()).unwrap();
    assert_eq!(back, s);
}

#[test]
fn invariant_constant_examples() {
    let t = SymbolTable::standard(3, 0);
    assert_eq!(c_invariant(&p(&t, "1 + 5*th1*th2*th3")).unwrap(), BigRational::from_integer(5.into()));
    assert_eq!(c_invariant(&p(&t, "1")).unwrap(), BigRational::from_integer(0.into()));
    assert!(c_invariant(&p(&t, "1 + x1*th1*th2*th3")).is_err());
}

#[test]
fn nu_examples() {
    let t = SymbolTable::standard(1, 1);
    assert!(classify_nu(&p(&t, "1")).unwrap().unwrap().is_zero());
    // -β₁x¹θ₁ = x¹θ₁β₁, and Δ₀ of that is β₁.
    assert_eq!(classify_nu(&p(&t, "1 - b1*x1*th1")).unwrap(), Some(p(&t, "b1")));
    assert_eq!(classify_nu(&p(&t, "1 + x1^2*th1*b1")).unwrap(), None);
}

#[test]
fn moser_generator_examples() {
    let t = SymbolTable::standard(3, 0);
    assert!(moser_hamiltonian(&p(&t, "1"), &p(&t, "0")).unwrap().is_zero());

    let r = p(&t, "x1*th1*th2*th3");
    let q = moser_hamiltonian(&p(&t, "1"), &r).unwrap();
    let (tt, i) = time_table(&t).unwrap();
    assert_eq!(tt.param_name(i), TIME);
    let st = &SuperExpr::one(&tt) + &(&SuperExpr::param(&tt, i) * &delta_sharp(&r.retag(&tt).unwrap()));
    assert_eq!(&q * &st, r.retag(&tt).unwrap().neg());
    assert!(moser_residual(&p(&t, "1"), &r).unwrap().is_zero());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn delta0_squares_to_zero(seed in any::<u64>(), n in 1usize..=4, aux in 0usize..=2) {
        let t = SymbolTable::standard(n, aux);
        let mut s = Sampler::new(seed);
        let pa = s.parity();
        let f = s.expr(&t, pa);
        prop_assert!(delta0(&delta0(&f)).is_zero());
        prop_assert!(delta_sharp(&delta_sharp(&f)).is_zero());
    }

    #[test]
    fn identities_hold(seed in any::<u64>(), n in 1usize..=3) {
        let t = SymbolTable::standard(n, 1);
        let mut s = Sampler::new(seed);
        let (pf, pg) = (s.parity(), s.parity());
        let (f, g) = (s.expr(&t, pf), s.expr(&t, pg));
        let dv = s.volume(&t);
        let map = s.canonical_map(&t).unwrap();
        for (name, r) in bv_identity_residuals(&f, &g, &dv, &map).unwrap() {
            prop_assert!(r.is_zero(), "{} = {}", name, r);
        }
    }

    #[test]
    fn delta_sharp_is_covariant(seed in any::<u64>(), n in 1usize..=3) {
        let t = SymbolTable::standard(n, 1);
        let mut s = Sampler::new(seed);
        let map = s.canonical_map(&t).unwrap();
        let pa = s.parity();
        let sd = s.expr(&t, pa);
        let lhs = delta_sharp(&pullback_semidensity(&map, &sd).unwrap());
        let rhs = pullback_semidensity(&map, &delta_sharp(&sd)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn moser_generator_cancels(seed in any::<u64>(), n in 2usize..=3) {
        let t = SymbolTable::standard(n, 1);
        let mut s = Sampler::new(seed);
        let r = s.expr_with(&t, Parity::Odd, 2);
        prop_assert!(moser_residual(&SuperExpr::one(&t), &r).unwrap().is_zero());
    }
}
