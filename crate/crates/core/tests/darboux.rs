use num_rational::BigRational;
use oddsym::cli::parse_expr;
use oddsym::darboux::{
    darboux_pipeline, darboux_step, pushforward_structure, r_residual, residual_report, series_coefficient, solve_r,
    structure_matrices, StepKind,
};
use oddsym::sampling::Sampler;
use oddsym::symplectic::{jacobi_residual, Structure, SuperMap};
use oddsym::{Parity, SMatrix, SuperExpr, SymbolTable, Table};
use proptest::prelude::*;

fn p(t: &Table, s: &str) -> SuperExpr {
    parse_expr(s, t).unwrap()
}

fn structure(t: &Table, rows: &[&[&str]]) -> Structure {
    let n2 = rows.len();
    Structure { omega: SMatrix::from_fn(t, n2, n2, |a, b| p(t, rows[a][b])) }
}

fn odd_symmetric(s: &mut Sampler, t: &Table) -> SMatrix {
    let n = t.n();
    let mut m = SMatrix::zeros(t, n, n);
    for i in 0..n {
        for j in i..n {
            let e = s.expr_with(t, Parity::Odd, 0);
            m.set(i, j, e.clone());
            m.set(j, i, e);
        }
    }
    m
}

/// `R ← (E − RFR)/2` until it stops changing: nilpotency of the odd entries ends the loop.
fn r_by_iteration(e: &SMatrix, f: &SMatrix) -> SMatrix {
    let half = SuperExpr::rational(e.table(), &BigRational::new(1.into(), 2.into()));
    let mut r = SMatrix::zeros(e.table(), e.rows, e.cols);
    loop {
        let next = e.sub(&r.mul(f).mul(&r)).scale(&half);
        if next == r {
            return r;
        }
        r = next;
    }
}

#[test]
fn structure_matrix_examples() {
    let t = SymbolTable::standard(2, 0);
    let sm = structure_matrices(&Structure::canonical(&t)).unwrap();
    assert!(sm.e.is_zero() && sm.f.is_zero() && sm.p_block().is_zero());
    assert_eq!(sm.class, (3, 3));

    let t1 = SymbolTable::standard(1, 0);
    let s = structure(&t1, &[&["0", "1 + x1"], &["-1 - x1", "0"]]);
    let sm = structure_matrices(&s).unwrap();
    assert_eq!(sm.a.get(0, 0), &p(&t1, "1 + x1"));
    assert_eq!(sm.class, (2, 0));
}

#[test]
fn r_equation() {
    assert_eq!(series_coefficient(0), BigRational::new(1.into(), 2.into()));
    assert_eq!(series_coefficient(1), BigRational::new((-1).into(), 8.into()));

    let t = SymbolTable::standard(2, 2);
    let mut s = Sampler::new(11);
    let e = odd_symmetric(&mut s, &t);
    let zero = SMatrix::zeros(&t, 2, 2);
    let half = SuperExpr::rational(&t, &BigRational::new(1.into(), 2.into()));
    assert_eq!(solve_r(&e, &zero).unwrap(), e.scale(&half));

    let f = odd_symmetric(&mut s, &t);
    let r = solve_r(&e, &f).unwrap();
    assert!(r_residual(&r, &e, &f).is_zero());
    // Reversing three odd factors flips the sign, so EFE is antisymmetric and R is not symmetric.
    let efe = e.mul(&f).mul(&e);
    assert_eq!(efe.transpose(), efe.neg());
    let eighth = SuperExpr::rational(&t, &BigRational::new((-1).into(), 8.into()));
    let two_terms = e.scale(&half).add(&e.mul(&f).mul(&e).scale(&eighth));
    let ef = e.mul(&f);
    if ef.mul(&ef).mul(&e).is_zero() {
        assert_eq!(r, two_terms);
    }
}

#[test]
fn single_steps() {
    let t1 = SymbolTable::standard(1, 0);
    let s = structure(&t1, &[&["0", "1 + x1"], &["-1 - x1", "0"]]);
    let (step, next) = darboux_step(StepKind::F1, &s).unwrap();
    assert_eq!(step.map.targets, vec![p(&t1, "x1"), p(&t1, "th1/(1 + x1)")]);
    assert!(next.is_canonical());

    let t = SymbolTable::standard(2, 1);
    let (step, _) = darboux_step(StepKind::F1, &Structure::canonical(&t)).unwrap();
    assert_eq!(step.map, SuperMap::identity(&t));

    let s = structure(
        &t,
        &[&["0", "b1", "1", "0"], &["b1", "0", "0", "1"], &["-1", "0", "0", "0"], &["0", "-1", "0", "0"]],
    );
    let (step, next) = darboux_step(StepKind::F2, &s).unwrap();
    assert_eq!(step.map.targets[0], p(&t, "x1 - th2*b1/2"));
    assert_eq!(step.map.targets[1], p(&t, "x2 - th1*b1/2"));
    let e = structure_matrices(&next).unwrap().e;
    assert!(e.entries().all(|x| x.min_theta_degree().map_or(true, |d| d >= 1)));
}

#[test]
fn pipeline_examples() {
    let t = SymbolTable::standard(2, 1);
    let res = darboux_pipeline(&Structure::canonical(&t)).unwrap();
    assert_eq!(res.map, SuperMap::identity(&t));
    assert!(res.steps.iter().all(|s| s.map == SuperMap::identity(&t)));

    let t1 = SymbolTable::standard(1, 0);
    let s = structure(&t1, &[&["0", "1 + x1"], &["-1 - x1", "0"]]);
    let res = darboux_pipeline(&s).unwrap();
    assert!(res.canonical);
    assert!(residual_report(&res.map, &s).unwrap().is_empty());
    assert_eq!(res.map.targets, vec![p(&t1, "x1"), p(&t1, "th1/(1 + x1)")]);
}

#[test]
fn step_sequence_and_class_cap() {
    let t = SymbolTable::standard(2, 1);
    let g = Sampler::new(3).messy_map(&t).unwrap();
    let res = darboux_pipeline(&pushforward_structure(&g).unwrap()).unwrap();
    let kinds: Vec<StepKind> = res.steps.iter().map(|s| s.kind).collect();
    use StepKind::*;
    assert_eq!(kinds, vec![F1, F2, F1, F3, F3, F4, F4, Shift]);
    assert_eq!(res.steps.last().unwrap().after, (3, 3));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn r_matches_fixed_point(seed in any::<u64>(), n in 1usize..=3) {
        let t = SymbolTable::standard(n, 2);
        let mut s = Sampler::new(seed);
        let (e, f) = (odd_symmetric(&mut s, &t), odd_symmetric(&mut s, &t));
        let r = solve_r(&e, &f).unwrap();
        prop_assert_eq!(&r, &r_by_iteration(&e, &f));
        prop_assert!(r_residual(&r, &e, &f).is_zero());
    }

    #[test]
    fn pushed_structures_reach_darboux_form(seed in any::<u64>(), n in 1usize..=2) {
        let t = SymbolTable::standard(n, 1);
        let g = Sampler::new(seed).messy_map(&t).unwrap();
        let s = pushforward_structure(&g).unwrap();
        let (a, b, c) = (p(&t, "x1*th1"), p(&t, "th1"), p(&t, "x1^2"));
        prop_assert!(jacobi_residual(&a, &b, &c, Some(&s)).unwrap().is_zero());
        let res = darboux_pipeline(&s).unwrap();
        prop_assert!(res.canonical);
        // Independent of the transported data: the composite from the original chart is canonical.
        prop_assert!(res.map.compose(&g).unwrap().is_canonical().unwrap());
    }
}
