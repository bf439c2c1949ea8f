//! Hamiltonian flows of odd generators, their inverse problem and Moser deformations.

use num_rational::BigRational;

use crate::bv::delta_sharp;
use crate::error::{Error, Result};
use crate::superalgebra::{Bindings, Scalar, SuperExpr, Table, Var};
use crate::symplectic::{bracket, coordinate, SuperMap};

/// Name of the formal time parameter.
pub const TIME: &str = "t";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FlowTime {
    Value(BigRational),
    Formal,
}

/// Chart with the time parameter available, and its index.
pub fn time_table(t: &Table) -> Result<(Table, usize)> {
    let tt = t.with_param(TIME)?;
    let idx = tt.param_index(TIME).unwrap();
    Ok((tt, idx))
}

fn check_generator(q: &SuperExpr) -> Result<()> {
    if !q.is_odd() {
        return Err(Error::Parity("flow generator must be odd".into()));
    }
    if !q.homogeneous_part(1).is_zero() {
        return Err(Error::Precondition(
            "generator has a θ-linear part; its flow is not integrated in closed form".into(),
        ));
    }
    Ok(())
}

/// Solves `dy^A/dt = {Q, z^A}|_{z = y}`, `y(0) = z`, for a generator that may depend on
/// the parameter `t` polynomially. Returns `y(t)` with `t` left formal.
pub fn integrate_flow(q: &SuperExpr, time: usize) -> Result<Vec<SuperExpr>> {
    check_generator(q)?;
    let tb = q.table();
    let n = tb.n();
    let tv = Var::param(time);
    let field: Vec<SuperExpr> = (0..2 * n).map(|a| bracket(q, &coordinate(tb, a))).collect::<Result<_>>()?;
    let z: Vec<SuperExpr> = (0..2 * n).map(|a| coordinate(tb, a)).collect();
    let mut y = z.clone();
    let cap = 4 * tb.n_odd() + 8;
    for _ in 0..cap {
        let bind = Bindings::from_coordinates(tb, &y[..n], &y[n..]);
        let mut next = Vec::with_capacity(2 * n);
        for a in 0..2 * n {
            let along = field[a].substitute(&bind)?;
            let integral = along.try_map_coefficients(|s| s.integrate(tv))?;
            next.push(&z[a] + &integral);
        }
        if next == y {
            return Ok(y);
        }
        y = next;
    }
    Err(Error::NoConvergence("flow iteration did not stabilise".into()))
}

/// Time-`t` map of a time-independent generator.
pub fn exp_flow(q: &SuperExpr, time: &FlowTime) -> Result<SuperMap> {
    let base = q.table().clone();
    let (tt, idx) = time_table(&base)?;
    if base.param_index(TIME).is_some() && q.terms().any(|(_, s)| s.contains_var(Var::param(idx))) {
        return Err(Error::Precondition("exp_flow takes a time-independent generator".into()));
    }
    let y = integrate_flow(&q.retag(&tt)?, idx)?;
    match time {
        FlowTime::Formal => SuperMap::new(&tt, y, None),
        FlowTime::Value(v) => {
            let b = Bindings::new(&tt).param(idx, SuperExpr::rational(&tt, v));
            let ys: Vec<SuperExpr> =
                y.iter().map(|e| e.substitute(&b).and_then(|e| e.retag(&base))).collect::<Result<_>>()?;
            SuperMap::new(&base, ys, None)
        }
    }
}

/// Time-one map of a generator depending on `t`.
pub fn time_dependent_flow(q: &SuperExpr) -> Result<SuperMap> {
    let tb = q.table();
    let idx = tb
        .param_index(TIME)
        .ok_or_else(|| Error::Precondition("time-dependent generator needs the parameter t".into()))?;
    let y = integrate_flow(q, idx)?;
    let b = Bindings::new(tb).param(idx, SuperExpr::one(tb));
    let ys: Vec<SuperExpr> = y.iter().map(|e| e.substitute(&b)).collect::<Result<_>>()?;
    SuperMap::new(tb, ys, None)
}

/// `δ({f^i}) = -Σ_i θ_i Σ_p f^i_(p) / (p+1)`.
pub fn delta_map(f: &[SuperExpr]) -> SuperExpr {
    let tb = f[0].table();
    let mut acc = SuperExpr::zero(tb);
    for (i, fi) in f.iter().enumerate() {
        let mut scaled = SuperExpr::zero(tb);
        for (k, s) in fi.terms() {
            let p = fi.theta_degree(k) as i64;
            scaled = &scaled + &SuperExpr::term(tb, k, s.scale(&BigRational::new((-1).into(), (p + 1).into())));
        }
        acc = &acc + &(&SuperExpr::theta(tb, i) * &scaled);
    }
    acc
}

fn x_displacement(m: &SuperMap) -> Vec<SuperExpr> {
    (0..m.n()).map(|i| &m.targets[i] - &SuperExpr::coord(&m.table, i)).collect()
}

/// The generator `Q = O(θ²)` whose time-one flow is the given adjusted canonical map.
pub fn hamiltonian_from_adjusted(f: &SuperMap) -> Result<SuperExpr> {
    if !f.is_adjusted() {
        return Err(Error::Precondition("map is not adjusted".into()));
    }
    if !f.is_canonical()? {
        return Err(Error::Precondition("map is not canonical".into()));
    }
    let target = x_displacement(f);
    let mut q = delta_map(&target);
    let one = FlowTime::Value(BigRational::from_integer(1.into()));
    let cap = 2 * f.table.n_odd() + 4;
    for _ in 0..cap {
        let g = exp_flow(&q, &one)?;
        let got = x_displacement(&g);
        let diff: Vec<SuperExpr> = target.iter().zip(got.iter()).map(|(a, b)| a - b).collect();
        if diff.iter().all(|d| d.is_zero()) {
            if g.targets != f.targets {
                return Err(Error::Precondition("θ-part is not determined by the x-part; map not canonical".into()));
            }
            return Ok(q);
        }
        q = &q + &delta_map(&diff);
    }
    Err(Error::NoConvergence("generator iteration did not stabilise".into()))
}

/// `Q(t) = -r / (s + t Δ#r)` over the chart extended by `t`.
pub fn moser_hamiltonian(s: &SuperExpr, r: &SuperExpr) -> Result<SuperExpr> {
    let (tt, idx) = time_table(s.table())?;
    let s = s.retag(&tt)?;
    let r = r.retag(&tt)?;
    let st = &s + &(&SuperExpr::param(&tt, idx) * &delta_sharp(&r));
    Ok(-&(&r * &st.invert_even()?))
}

/// Canonical map `F` with `F*(s + Δ#r) = s` for closed even `s` and odd `r = O(θ²)`.
///
/// The flow integrated is that of `-Q(t)`: in the present conventions the pullback along
/// the flow of `H` moves a semidensity by `-δ_H`.
pub fn moser_flow(s: &SuperExpr, r: &SuperExpr) -> Result<SuperMap> {
    if !s.is_even() || s.body().is_zero() {
        return Err(Error::Precondition("s must be even and nondegenerate".into()));
    }
    if !delta_sharp(s).is_zero() {
        return Err(Error::Precondition("s is not closed".into()));
    }
    if !r.is_odd() || r.min_theta_degree().is_some_and(|d| d < 2) {
        return Err(Error::Precondition("r must be odd and O(θ²)".into()));
    }
    let q = moser_hamiltonian(s, r)?;
    let m = time_dependent_flow(&-&q)?;
    let base = s.table();
    let ys: Vec<SuperExpr> = m.targets.iter().map(|e| e.retag(base)).collect::<Result<_>>()?;
    SuperMap::new(base, ys, None)
}

/// Flow residual `exp_flow(Q,a) ∘ exp_flow(Q,b) - exp_flow(Q,a+b)` on every target.
pub fn group_law_residual(q: &SuperExpr, a: &BigRational, b: &BigRational) -> Result<Vec<SuperExpr>> {
    let fa = exp_flow(q, &FlowTime::Value(a.clone()))?;
    let fb = exp_flow(q, &FlowTime::Value(b.clone()))?;
    let fab = exp_flow(q, &FlowTime::Value(a + b))?;
    let c = fa.compose(&fb)?;
    Ok(c.targets.iter().zip(fab.targets.iter()).map(|(x, y)| x - y).collect())
}

/// `d/dt|₀` of an expression polynomial in `t`.
pub fn derivative_at_zero(e: &SuperExpr, time: usize) -> Result<SuperExpr> {
    let d = e.d_param(time);
    let tb = e.table();
    d.substitute(&Bindings::new(tb).param(time, SuperExpr::scalar(tb, Scalar::zero())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::parse_expr;
    use crate::superalgebra::SymbolTable;
    use crate::bv::infinitesimal_action;
    use crate::symplectic::pullback_semidensity;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn quadratic_generator() {
        let t = SymbolTable::standard(3, 0);
        let q = parse_expr("th1*th2*th3", &t).unwrap();
        let f = exp_flow(&q, &FlowTime::Formal).unwrap();
        let tt = f.table.clone();
        let p = |s| parse_expr(s, &tt).unwrap();
        let want = ["x1 - t*th2*th3", "x2 + t*th1*th3", "x3 - t*th1*th2", "th1", "th2", "th3"];
        assert_eq!(f.targets, want.iter().map(|s| p(s)).collect::<Vec<_>>());
    }

    #[test]
    fn degree_one_rejected() {
        let t = SymbolTable::standard(1, 0);
        assert!(exp_flow(&parse_expr("x1*th1", &t).unwrap(), &FlowTime::Formal).is_err());
    }

    #[test]
    fn group_law_and_inverse() {
        let t = SymbolTable::standard(2, 1);
        let q = parse_expr("x1*x2*th1*th2*b1 + x1^2*th1*th2*b1 + b1*x2", &t).unwrap();
        for r in group_law_residual(&q, &rat(1, 2), &rat(-3, 7)).unwrap() {
            assert!(r.is_zero());
        }
        let q3 = SymbolTable::standard(3, 0);
        let q = parse_expr("x1*th1*th2*th3 + x2*x3*th1*th2*th3", &q3).unwrap();
        let f = exp_flow(&q, &FlowTime::Value(rat(1, 1))).unwrap();
        assert!(f.is_canonical().unwrap());
        assert_eq!(hamiltonian_from_adjusted(&f).unwrap(), q);
    }

    #[test]
    fn moser_pulls_back() {
        let t = SymbolTable::standard(3, 0);
        let p = |s| parse_expr(s, &t).unwrap();
        let s = p("1 + x2*th1*th3");
        let r = p("x1^2*th1*th2*th3 + x2*x3*th1*th2*th3");
        let f = moser_flow(&s, &r).unwrap();
        assert!(f.is_canonical().unwrap());
        let moved = &s + &delta_sharp(&r);
        assert_eq!(pullback_semidensity(&f, &moved).unwrap(), s);
    }

    #[test]
    fn flow_moves_semidensity_by_minus_delta() {
        let t = SymbolTable::standard(3, 0);
        let p = |s| parse_expr(s, &t).unwrap();
        let q = p("x1*th1*th2*th3 + x2^2*th2*th1*th3");
        let s = p("x1^2 + x3*th1*th2");
        let f = exp_flow(&q, &FlowTime::Formal).unwrap();
        let tt = f.table.clone();
        let idx = tt.param_index(TIME).unwrap();
        let moved = pullback_semidensity(&f, &s.retag(&tt).unwrap()).unwrap();
        let rate = derivative_at_zero(&moved, idx).unwrap().retag(&t).unwrap();
        assert_eq!(rate, -&infinitesimal_action(&q, &s).unwrap());
    }
}
