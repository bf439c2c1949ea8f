//! One PASS/FAIL line per acceptance criterion; all comparisons are exact.

use num_rational::BigRational;
use oddsym::bv::{c_invariant, classify_nu, delta_sharp, VolumeForm};
use oddsym::cli::parse_expr;
use oddsym::cli::suites::{find, run_suite, Context};
use oddsym::darboux::{darboux_pipeline, pushforward_structure, r_residual, residual_report, series_coefficient, solve_r};
use oddsym::forms::{tau_sharp, DifferentialForm};
use oddsym::sampling::Sampler;
use oddsym::surfaces::{densities_p, pullback_k, AdjustedSurface};
use oddsym::symplectic::{pullback_semidensity, Structure, SuperMap};
use oddsym::{ChartSpec, Parity, SMatrix, SuperExpr, SymbolTable, Table};

/// Criteria whose quoted values the implementation does not reproduce; see the notes printed with them.
const KNOWN_FAILING: &[u32] = &[1];

struct Outcome {
    ok: bool,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Outcome {
        Outcome { ok: true, notes: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.ok = false;
            self.notes.push(what.into());
        }
    }

    fn suite(&mut self, name: &str, t: &Table, structure: Option<Structure>, samples: usize, seed: u64) {
        let ctx = Context { table: t.clone(), structure };
        let rep = run_suite(find(name).unwrap(), &ctx, samples, seed);
        let head = rep.failures.first().map(|f| format!(": sample {} {} = {}", f.sample, f.label, f.value));
        self.check(rep.passed(), format!("{name} on n={} aux={}{}", t.n(), t.n_aux(), head.unwrap_or_default()));
    }
}

fn p(t: &Table, s: &str) -> SuperExpr {
    parse_expr(s, t).unwrap()
}

fn e3(functions: &[&str], aux: &[&str]) -> Table {
    SymbolTable::new(ChartSpec {
        chart: "E".into(),
        even: vec!["x0".into(), "x1".into(), "x2".into()],
        odd: vec!["th0".into(), "th1".into(), "th2".into()],
        aux: aux.iter().map(|s| s.to_string()).collect(),
        functions: functions.iter().map(|s| s.to_string()).collect(),
        ..Default::default()
    })
    .unwrap()
}

/// Worked example on `E^{3.3}` for one choice of `b₀, b₁, b₂`, with the hand values of
/// `∂₂b₁ − ∂₁b₂` and of `b₂θ₁ − b₁θ₂` on `x⁰ = 0`.
fn worked_example(out: &mut Outcome, label: &str, t: &Table, b: [&str; 3], curl: &str, k: &str) {
    let c = AdjustedSurface::new(t, 0).unwrap();
    let w = DifferentialForm::new(p(t, &format!("-xi0*xi1*xi2 + ({})*xi0 + ({})*xi1 + ({})*xi2", b[0], b[1], b[2]))).unwrap();
    let s = p(t, &format!("1 + ({})*th1*th2 + ({})*th2*th0 + ({})*th0*th1", b[0], b[1], b[2]));
    let (curl, k) = (p(t, curl), p(t, k));
    let quoted_p1 = &curl * &k.neg();

    out.check(tau_sharp(&w).unwrap() == s, format!("{label}: τ#(w)"));
    out.check(pullback_k(&s, &c).unwrap() == k, format!("{label}: K(s)"));
    out.check(pullback_k(&delta_sharp(&s), &c).unwrap() == curl, format!("{label}: K(Δ#s)"));
    let (p0, p1) = densities_p(&VolumeForm::new(&s * &s).unwrap(), &c).unwrap();
    out.check(p0 == &curl * &curl, format!("{label}: P₀"));
    out.check(
        p1 == quoted_p1,
        format!("{label}: P₁ = {} but (∂₂b₁−∂₁b₂)(b₁θ₂−b₂θ₁) = {}; K(√dv)·K(Δ#√dv) = {}", p1, quoted_p1, &k * &curl),
    );
}

fn criterion_1() -> Outcome {
    let mut out = Outcome::new();
    let t = e3(&["b0", "b1", "b2"], &[]);
    let curl = "D(b1,x2) - D(b2,x1)";
    let k = "b2*th1 - b1*th2";
    // On the surface the jets read as their restrictions.
    let c = AdjustedSurface::new(&t, 0).unwrap();
    let (curl, k) = (c.restrict(&p(&t, curl)).unwrap().render(), c.restrict(&p(&t, k)).unwrap().render());
    worked_example(&mut out, "symbolic", &t, ["b0", "b1", "b2"], &curl, &k);

    let t = e3(&[], &[]);
    worked_example(&mut out, "I1", &t, ["x1*x2", "x2^2", "x1"], "2*x2 - 1", "x1*th1 - x2^2*th2");
    worked_example(&mut out, "I2", &t, ["x0^2", "x0*x2 + x1^3", "x1*x2^2 + x0"], "-x2^2", "x1*x2^2*th1 - x1^3*th2");
    worked_example(
        &mut out,
        "I3",
        &t,
        ["1 + x1", "3*x1*x2 - x0*x1", "x2^3 + 2*x1^2"],
        "-x1",
        "(x2^3 + 2*x1^2)*th1 - 3*x1*x2*th2",
    );
    out
}

fn criterion_2() -> Outcome {
    let mut out = Outcome::new();
    let t = SymbolTable::standard_with(2, 0, &[], &["f", "w1", "w2", "w"]);
    let f = |s: &str| DifferentialForm::new(p(&t, s)).unwrap();
    out.check(tau_sharp(&f("f")).unwrap() == p(&t, "f*th1*th2"), "function");
    out.check(tau_sharp(&f("w1*xi1 + w2*xi2")).unwrap() == p(&t, "w1*th2 - w2*th1"), "one-form");
    out.check(tau_sharp(&f("w*xi1*xi2")).unwrap() == p(&t, "-w"), "top form");
    out
}

fn criterion_3() -> Outcome {
    let mut out = Outcome::new();
    let suites = ["jacobi", "delta0-square", "leibniz", "chart-change", "module-rule", "square", "ber-root"];
    for (n, aux) in [(2, 1), (3, 1)] {
        let t = SymbolTable::standard(n, aux);
        for name in suites {
            out.suite(name, &t, None, 200, 31 + n as u64);
        }
    }
    out
}

fn criterion_4() -> Outcome {
    let mut out = Outcome::new();
    for (n, seed) in [(2, 40), (3, 41)] {
        let t = SymbolTable::standard(n, 1);
        let mut s = Sampler::new(seed);
        for i in 0..20 {
            let maps: [(&str, SuperMap); 3] = [
                ("special", s.special_map(&t).unwrap()),
                ("point", s.point_map(&t).unwrap()),
                ("adjusted", s.adjusted_flow(&t).unwrap().1),
            ];
            for (class, m) in maps {
                let pa = s.parity();
                let sd = s.expr(&t, pa);
                let lhs = delta_sharp(&pullback_semidensity(&m, &sd).unwrap());
                let rhs = pullback_semidensity(&m, &delta_sharp(&sd)).unwrap();
                out.check(lhs == rhs, format!("n={n} {class} map {i}"));
            }
        }
    }
    out
}

fn criterion_5() -> Outcome {
    let mut out = Outcome::new();
    for n in 1..=4 {
        let t = SymbolTable::standard(n, 1);
        out.suite("intertwining", &t, None, 20, 50 + n as u64);
        out.suite("divergence", &SymbolTable::standard(n, 0), None, 20, 60 + n as u64);
    }
    out
}

fn criterion_6() -> Outcome {
    let mut out = Outcome::new();
    let mut count = 0;
    for n in 1..=3 {
        let t = SymbolTable::standard(n, 1);
        for seed in 0..4 {
            let g = Sampler::new(700 + 10 * n as u64 + seed).messy_map(&t).unwrap();
            let s = pushforward_structure(&g).unwrap();
            let res = darboux_pipeline(&s).unwrap();
            let residuals = residual_report(&res.map, &s).unwrap();
            out.check(res.canonical && residuals.is_empty(), format!("n={n} structure {seed}: final chart"));
            out.check(res.map.compose(&g).unwrap().is_canonical().unwrap(), format!("n={n} structure {seed}: composite"));
            count += 1;
        }
        let id = darboux_pipeline(&Structure::canonical(&t)).unwrap();
        out.check(id.map == SuperMap::identity(&t), format!("n={n}: identity on Darboux input"));
    }
    out.check(count >= 10, "structure count");

    let t1 = SymbolTable::standard(1, 0);
    let s = Structure { omega: SMatrix::from_fn(&t1, 2, 2, |a, b| p(&t1, [["0", "1 + x1"], ["-1 - x1", "0"]][a][b])) };
    let res = darboux_pipeline(&s).unwrap();
    out.check(res.canonical && residual_report(&res.map, &s).unwrap().is_empty(), "{x,θ} = 1 + x");
    out.check(res.map.targets == vec![p(&t1, "x1"), p(&t1, "th1/(1 + x1)")], "{x,θ} = 1 + x: θ̃");

    out.check(series_coefficient(0) == BigRational::new(1.into(), 2.into()), "c₀");
    out.check(series_coefficient(1) == BigRational::new((-1).into(), 8.into()), "c₁");
    for n in 1..=3 {
        let t = SymbolTable::standard(n, 2);
        let mut sm = Sampler::new(90 + n as u64);
        for i in 0..5 {
            let mut sym = || {
                let mut m = SMatrix::zeros(&t, n, n);
                for a in 0..n {
                    for b in a..n {
                        let e = sm.expr_with(&t, Parity::Odd, 0);
                        m.set(a, b, e.clone());
                        m.set(b, a, e);
                    }
                }
                m
            };
            let (e, f) = (sym(), sym());
            let r = solve_r(&e, &f).unwrap();
            out.check(r_residual(&r, &e, &f).is_zero(), format!("solve_R n={n} sample {i}"));
        }
    }
    out
}

fn criterion_7() -> Outcome {
    let mut out = Outcome::new();
    for n in [2, 3] {
        let t = SymbolTable::standard(n, 1);
        out.suite("flow-roundtrip", &t, None, 20, 70 + n as u64);
        out.suite("flow-canonical", &t, None, 20, 75 + n as u64);
    }
    out
}

fn criterion_8() -> Outcome {
    let mut out = Outcome::new();
    for n in [2, 3] {
        out.suite("moser", &SymbolTable::standard(n, 1), None, 10, 80 + n as u64);
    }
    out
}

fn criterion_9() -> Outcome {
    let mut out = Outcome::new();
    for n in [2, 3, 4] {
        let t = SymbolTable::standard(n, 1);
        out.suite("surface-relation", &t, None, 20, 90 + n as u64);
        out.suite("dual-density", &t, None, 20, 95 + n as u64);
    }
    out
}

fn criterion_10() -> Outcome {
    let mut out = Outcome::new();
    for n in [2, 3] {
        out.suite("c-invariant", &SymbolTable::standard(n, 1), None, 20, 100 + n as u64);
    }
    let t = SymbolTable::standard(1, 1);
    out.check(classify_nu(&p(&t, "1")).unwrap() == Some(SuperExpr::zero(&t)), "ν on √D");
    out.check(classify_nu(&p(&t, "1 - b1*x1*th1")).unwrap() == Some(p(&t, "b1")), "ν on (1 − β₁x¹θ₁)√D");

    // s = Δ#h − νh with Δ#h invertible satisfies Δ#s = νs.
    for n in [1, 2, 3] {
        let t = SymbolTable::standard(n, 2);
        let nu = p(&t, "b1 - 2*b2");
        let mut sm = Sampler::new(110 + n as u64);
        for i in 0..7 {
            let h = &p(&t, "x1*th1") + &sm.expr_with(&t, Parity::Odd, 2);
            let s = &delta_sharp(&h) - &(&nu * &h);
            out.check(classify_nu(&s).unwrap() == Some(nu.clone()), format!("ν on Δ#h − νh, n={n} sample {i}"));
        }
    }
    let t = SymbolTable::standard(3, 0);
    out.check(c_invariant(&p(&t, "1 + 5*th1*th2*th3")).unwrap() == BigRational::from_integer(5.into()), "c = 5");
    out
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 10] = [
        (1, "worked example on E^{3.3}", criterion_1),
        (2, "τ# table at n = 2", criterion_2),
        (3, "identity suites, 200 samples each", criterion_3),
        (4, "Δ# covariance, 20 maps per class", criterion_4),
        (5, "intertwining and divergence, n ≤ 4", criterion_5),
        (6, "Darboux pipeline and solve_R", criterion_6),
        (7, "flow round trip and canonicity", criterion_7),
        (8, "Moser construction", criterion_8),
        (9, "surface relation and dual density", criterion_9),
        (10, "invariant constant and ν", criterion_10),
    ];
    let mut unexpected = Vec::new();
    for (k, name, run) in criteria {
        let o = run();
        println!("{} criterion {k}: {name}", if o.ok { "PASS" } else { "FAIL" });
        for note in &o.notes {
            println!("    {note}");
        }
        if o.ok == KNOWN_FAILING.contains(&k) {
            unexpected.push(k);
        }
    }
    if !unexpected.is_empty() {
        println!("criteria with unexpected outcome: {unexpected:?}");
        std::process::exit(1);
    }
}
