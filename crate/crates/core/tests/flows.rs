use num_rational::BigRational;
use oddsym::bv::{delta_sharp, infinitesimal_action};
use oddsym::cli::parse_expr;
use oddsym::flows::{
    delta_map, derivative_at_zero, exp_flow, group_law_residual, hamiltonian_from_adjusted, moser_flow, FlowTime,
    TIME,
};
use oddsym::sampling::Sampler;
use oddsym::symplectic::{bracket, coordinate, pullback_semidensity, SuperMap};
use oddsym::{Parity, SuperExpr, SymbolTable, Table};
use proptest::prelude::*;

fn p(t: &Table, s: &str) -> SuperExpr {
    parse_expr(s, t).unwrap()
}

fn exprs(t: &Table, s: &[&str]) -> Vec<SuperExpr> {
    s.iter().map(|e| p(t, e)).collect()
}

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

fn at(p: i64, q: i64) -> FlowTime {
    FlowTime::Value(rat(p, q))
}

/// Lie series `Σ tᵏ/k! {Q,·}ᵏ z^A`, summed until the bracket powers vanish.
fn lie_series(q: &SuperExpr, t: &BigRational) -> Vec<SuperExpr> {
    let tb = q.table();
    (0..2 * tb.n())
        .map(|a| {
            let mut term = coordinate(tb, a);
            let mut acc = term.clone();
            let mut coef = BigRational::from_integer(1.into());
            for k in 1.. {
                term = bracket(q, &term).unwrap();
                if term.is_zero() {
                    break;
                }
                coef = coef * t / BigRational::from_integer(k.into());
                acc = &acc + &term.scale_rational(&coef);
            }
            acc
        })
        .collect()
}

#[test]
fn flow_examples() {
    let t = SymbolTable::standard(2, 1);
    assert_eq!(exp_flow(&p(&t, "0"), &at(1, 1)).unwrap(), SuperMap::identity(&t));

    let t3 = SymbolTable::standard(3, 0);
    let f = exp_flow(&p(&t3, "th1*th2*th3"), &at(1, 1)).unwrap();
    let want = ["x1 - th2*th3", "x2 + th1*th3", "x3 - th1*th2", "th1", "th2", "th3"];
    assert_eq!(f.targets, exprs(&t3, &want));

    let f = exp_flow(&p(&t, "b1*x1*th1*th2"), &FlowTime::Formal).unwrap();
    let tt = f.table.clone();
    // ∂_{θ₁}(β₁x¹θ₁θ₂) = -β₁x¹θ₂ once β₁ passes θ₁, so the x-components pick up that sign.
    let want = ["x1 + t*b1*x1*th2", "x2 - t*b1*x1*th1", "th1 + t*b1*th1*th2", "th2"];
    assert_eq!(f.targets, exprs(&tt, &want));
    assert!(f.is_canonical().unwrap());
    let q = p(&t, "b1*x1*th1*th2");
    assert_eq!(exp_flow(&q, &at(1, 1)).unwrap().targets, lie_series(&q, &rat(1, 1)));
}

#[test]
fn generator_recovery_examples() {
    let t3 = SymbolTable::standard(3, 0);
    assert!(hamiltonian_from_adjusted(&SuperMap::identity(&t3)).unwrap().is_zero());
    let q = p(&t3, "th1*th2*th3");
    let f = exp_flow(&q, &at(1, 1)).unwrap();
    assert_eq!(hamiltonian_from_adjusted(&f).unwrap(), q);
    assert_eq!(delta_map(&exprs(&t3, &["-th2*th3", "th1*th3", "-th1*th2"])), q);

    let t = SymbolTable::standard(2, 1);
    let q = p(&t, "b1*x1*th1*th2");
    assert_eq!(hamiltonian_from_adjusted(&exp_flow(&q, &at(1, 1)).unwrap()).unwrap(), q);
    let stretch = SuperMap::new(&t, exprs(&t, &["x1 + b1*th1", "x2", "th1", "th2"]), None).unwrap();
    assert!(hamiltonian_from_adjusted(&stretch).is_err());
}

#[test]
fn moser_examples() {
    let t = SymbolTable::standard(2, 1);
    let one = SuperExpr::one(&t);
    assert_eq!(moser_flow(&one, &p(&t, "0")).unwrap(), SuperMap::identity(&t));

    let r = p(&t, "b1*x1*th1*th2");
    // Δ₀(β₁x¹θ₁θ₂) = ∂₁∂_{θ₁}(β₁x¹θ₁θ₂) = -β₁θ₂.
    assert_eq!(delta_sharp(&r), p(&t, "-b1*th2"));
    let f = moser_flow(&one, &r).unwrap();
    assert!(f.is_canonical().unwrap());
    assert_eq!(pullback_semidensity(&f, &(&one + &delta_sharp(&r))).unwrap(), one);

    let t3 = SymbolTable::standard(3, 0);
    let s = p(&t3, "1 + x2*th1*th3");
    let r = p(&t3, "x1^2*x3*th1*th2*th3 + x2*th1*th2*th3");
    let f = moser_flow(&s, &r).unwrap();
    assert_eq!(pullback_semidensity(&f, &(&s + &delta_sharp(&r))).unwrap(), s);
}

#[test]
fn lie_series_oracle_on_fixed_generators() {
    let t3 = SymbolTable::standard(3, 1);
    for q in ["th1*th2*th3", "x1*x2*th1*th2*th3 + b1*x3*th2*th3", "b1*x1^2*th1*th2"] {
        let q = p(&t3, q);
        for (a, b) in [(1, 1), (1, 2), (2, 1), (-1, 3)] {
            let f = exp_flow(&q, &at(a, b)).unwrap();
            assert_eq!(f.targets, lie_series(&q, &rat(a, b)));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn flow_matches_lie_series(seed in any::<u64>(), n in 2usize..=3) {
        let t = SymbolTable::standard(n, 1);
        let q = Sampler::new(seed).generator(&t);
        for (a, b) in [(1, 2), (1, 1), (2, 1)] {
            let f = exp_flow(&q, &at(a, b)).unwrap();
            prop_assert_eq!(&f.targets, &lie_series(&q, &rat(a, b)));
            prop_assert!(f.is_canonical().unwrap());
        }
    }

    #[test]
    fn generator_round_trip(seed in any::<u64>(), n in 2usize..=3) {
        let t = SymbolTable::standard(n, 1);
        let (q, f) = Sampler::new(seed).adjusted_flow(&t).unwrap();
        prop_assert_eq!(hamiltonian_from_adjusted(&f).unwrap(), q);
    }

    #[test]
    fn flows_form_a_group(seed in any::<u64>(), n in 2usize..=3) {
        let t = SymbolTable::standard(n, 1);
        let q = Sampler::new(seed).generator(&t);
        for r in group_law_residual(&q, &rat(1, 3), &rat(-5, 2)).unwrap() {
            prop_assert!(r.is_zero());
        }
    }

    #[test]
    fn flow_derivative_is_minus_action(seed in any::<u64>(), n in 2usize..=3) {
        let t = SymbolTable::standard(n, 1);
        let mut s = Sampler::new(seed);
        let q = s.generator(&t);
        let pa = s.parity();
        let sd = s.expr(&t, pa);
        let f = exp_flow(&q, &FlowTime::Formal).unwrap();
        let tt = f.table.clone();
        let idx = tt.param_index(TIME).unwrap();
        let moved = pullback_semidensity(&f, &sd.retag(&tt).unwrap()).unwrap();
        let rate = derivative_at_zero(&moved, idx).unwrap().retag(&t).unwrap();
        prop_assert_eq!(rate, infinitesimal_action(&q, &sd).unwrap().neg());
    }

    #[test]
    fn moser_pulls_back_exactly(seed in any::<u64>(), n in 2usize..=3) {
        let t = SymbolTable::standard(n, 1);
        let mut s = Sampler::new(seed);
        let r = s.expr_with(&t, Parity::Odd, 2);
        let base = SuperExpr::one(&t);
        let f = moser_flow(&base, &r).unwrap();
        prop_assert_eq!(pullback_semidensity(&f, &(&base + &delta_sharp(&r))).unwrap(), base);
    }
}
