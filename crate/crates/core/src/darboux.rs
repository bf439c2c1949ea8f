//! Constructive passage from arbitrary coordinates to Darboux coordinates for an odd
//! symplectic structure given by its bracket matrix.

use std::fmt;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::forms::{poincare_homotopy, DifferentialForm};
use crate::superalgebra::{SMatrix, SuperExpr, Table};
use crate::symplectic::{coordinate, Structure, SuperMap};

/// `E^{ij} = {x^i,x^j}`, `F_{ij} = {θ_i,θ_j}`, `A^i_j = {x^i,θ_j}` and the class
/// `(p, q)` with `E = O(θ^p)`, `A - 1 = O(θ^q)`.
#[derive(Clone, Debug)]
pub struct StructureMatrices {
    pub e: SMatrix,
    pub f: SMatrix,
    pub a: SMatrix,
    pub class: (u32, u32),
}

impl StructureMatrices {
    pub fn p_block(&self) -> SMatrix {
        self.a.sub(&SMatrix::identity(self.a.table(), self.a.rows))
    }
}

fn order(m: &SMatrix, cap: u32) -> u32 {
    m.entries()
        .filter_map(|e| e.min_theta_degree())
        .min()
        .map_or(cap, |d| d.min(cap))
}

/// Checks graded symmetry and parities of bracket data.
pub fn validate_structure(s: &Structure) -> Result<()> {
    let n = s.n();
    for a in 0..2 * n {
        for b in 0..2 * n {
            let w = s.get(a, b);
            let mixed = (a < n) != (b < n);
            let ok_parity = if mixed { w.is_even() } else { w.is_odd() };
            if !ok_parity {
                return Err(Error::Parity(format!("bracket entry ({a},{b}) has the wrong parity")));
            }
            let both_even = a < n && b < n;
            let mirrored = if both_even { s.get(b, a).clone() } else { -s.get(b, a) };
            if *w != mirrored {
                return Err(Error::Input(format!("bracket entries ({a},{b}) and ({b},{a}) are not graded antisymmetric")));
            }
        }
    }
    Ok(())
}

pub fn structure_matrices(s: &Structure) -> Result<StructureMatrices> {
    validate_structure(s)?;
    let n = s.n();
    let a = s.a_block();
    let body = a.map(|e| Ok(SuperExpr::scalar(a.table(), e.body())))?;
    if body.det_even()?.is_zero() {
        return Err(Error::NotInvertible("{x, θ} block has singular body".into()));
    }
    let e = s.e_block();
    let f = s.f_block();
    let cap = n as u32 + 1;
    let p = a.sub(&SMatrix::identity(a.table(), n));
    let class = (order(&e, cap), order(&p, cap));
    Ok(StructureMatrices { e, f, a, class })
}

/// Coefficients of `(√(1+t) − 1)/t`.
pub fn series_coefficient(k: usize) -> BigRational {
    let mut c = BigRational::from_integer(1.into());
    let half = BigRational::new(1.into(), 2.into());
    for j in 0..=k {
        c = c * (&half - BigRational::from_integer((j as i64).into())) / BigRational::from_integer((j as i64 + 1).into());
    }
    c
}

/// Odd `R` with `2R + RFR = E`, summed until `(EF)^k E` vanishes. Only the leading
/// term `E/2` is symmetric: `(EFE)ᵀ = −EFE` for odd entries.
pub fn solve_r(e: &SMatrix, f: &SMatrix) -> Result<SMatrix> {
    if e.entries().chain(f.entries()).any(|x| !x.is_odd()) {
        return Err(Error::Parity("R-equation needs odd-valued E and F".into()));
    }
    let ef = e.mul(f);
    let mut term = e.clone();
    let mut r = SMatrix::zeros(e.table(), e.rows, e.cols);
    let mut k = 0;
    while !term.is_zero() {
        r = r.add(&term.scale(&SuperExpr::rational(e.table(), &series_coefficient(k))));
        term = ef.mul(&term);
        k += 1;
    }
    Ok(r)
}

pub fn r_residual(r: &SMatrix, e: &SMatrix, f: &SMatrix) -> SMatrix {
    r.scale(&SuperExpr::int(r.table(), 2)).add(&r.mul(f).mul(r)).sub(e)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepKind {
    F1,
    F2,
    F3,
    F4,
    Shift,
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepKind::F1 => "F1",
            StepKind::F2 => "F2",
            StepKind::F3 => "F3",
            StepKind::F4 => "F4",
            StepKind::Shift => "shift",
        })
    }
}

/// `∫₀¹ τ^a g(x, τθ) dτ`, i.e. the θ-degree-`p` part divided by `p + a + 1`.
fn radial(e: &SuperExpr, a: u32) -> SuperExpr {
    let t = e.table();
    SuperExpr::from_terms(
        t,
        e.terms().map(|(k, s)| {
            let p = e.theta_degree(k) + a + 1;
            (k, s.scale(&BigRational::new(1.into(), (p as i64).into())))
        }),
    )
}

fn theta_row(t: &Table, m: &SMatrix, col: usize) -> SuperExpr {
    let mut acc = SuperExpr::zero(t);
    for r in 0..m.rows {
        acc = &acc + &(&SuperExpr::theta(t, r) * m.get(r, col));
    }
    acc
}

fn coords(t: &Table) -> Vec<SuperExpr> {
    (0..2 * t.n()).map(|a| coordinate(t, a)).collect()
}

/// New coordinates of one normalisation step as functions of the current ones.
pub fn step_map(kind: StepKind, sm: &StructureMatrices) -> Result<SuperMap> {
    let t = sm.e.table().clone();
    let n = t.n();
    let mut z = coords(&t);
    match kind {
        StepKind::F1 => {
            let ainv = sm.a.inverse_even()?;
            for j in 0..n {
                z[n + j] = theta_row(&t, &ainv, j);
            }
        }
        StepKind::F2 => {
            let r = solve_r(&sm.e, &sm.f)?;
            for i in 0..n {
                z[i] = &z[i] - &theta_row(&t, &r, i);
            }
        }
        StepKind::F3 => {
            let e = sm.e.map(|x| Ok(radial(x, 1)))?;
            for i in 0..n {
                z[i] = &z[i] - &theta_row(&t, &e, i);
            }
        }
        StepKind::F4 => {
            let p = sm.p_block().map(|x| Ok(radial(x, 0)))?;
            for j in 0..n {
                z[n + j] = &z[n + j] - &theta_row(&t, &p, j);
            }
        }
        StepKind::Shift => {
            let a = shift_potential(&sm.f)?;
            for i in 0..n {
                z[n + i] = &z[n + i] + &a[i];
            }
        }
    }
    SuperMap::new(&t, z, None)
}

/// `A_i(x)` with `F_{ij} = ∂_i A_j − ∂_j A_i` for closed x-dependent odd `F`.
pub fn shift_potential(f: &SMatrix) -> Result<Vec<SuperExpr>> {
    let t = f.table().clone();
    let n = t.n();
    let mut w = SuperExpr::zero(&t);
    for i in 0..n {
        for j in i + 1..n {
            let fij = f.get(i, j);
            if !fij.is_theta_free() {
                return Err(Error::Precondition("{θ, θ} still depends on θ".into()));
            }
            w = &w + &(&(fij * &SuperExpr::frame(&t, i)) * &SuperExpr::frame(&t, j));
        }
    }
    let w = DifferentialForm::new(w)?;
    if !crate::forms::exterior_d(&w).expr.is_zero() {
        return Err(Error::Precondition("{θ, θ} is not a closed two-form".into()));
    }
    let a = poincare_homotopy(&w)?;
    // d(a_k ξ^k) carries an extra sign for odd coefficients, hence A = -a.
    Ok((0..n).map(|k| -&a.expr.d_odd_right(t.frame_index(k))).collect())
}

/// Bracket data in the new coordinates `G(z)`, written as functions of the new coordinates.
pub fn transport(s: &Structure, g: &SuperMap) -> Result<Structure> {
    let b = g.bracket_matrix_with(s)?;
    let ginv = g.invert()?;
    Ok(Structure { omega: b.map(|e| ginv.pull(e))? })
}

/// Bracket obtained by pushing the canonical one through `G`.
pub fn pushforward_structure(g: &SuperMap) -> Result<Structure> {
    transport(&Structure::canonical(&g.table), g)
}

fn check_class(kind: StepKind, before: (u32, u32), after: (u32, u32), cap: u32) -> Result<()> {
    let (p, q) = before;
    let pre = match kind {
        StepKind::F1 => true,
        StepKind::F2 => q >= 1,
        StepKind::F3 => p >= 1 && q >= 1,
        StepKind::F4 => p == cap && q >= 1,
        StepKind::Shift => p == cap && q == cap,
    };
    if !pre {
        return Err(Error::Precondition(format!("{kind} does not apply to class ({p},{q})")));
    }
    let (p2, q2) = after;
    let post = match kind {
        StepKind::F1 => q2 >= 1 && p2 >= p,
        StepKind::F2 => p2 >= 1,
        StepKind::F3 => p2 >= (p + 1).min(cap) && q2 >= 1,
        StepKind::F4 => p2 == cap && q2 >= (q + 1).min(cap),
        StepKind::Shift => p2 == cap && q2 == cap,
    };
    if !post {
        return Err(Error::Precondition(format!("{kind} produced class ({p2},{q2}) from ({p},{q})")));
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct Step {
    pub kind: StepKind,
    pub map: SuperMap,
    pub before: (u32, u32),
    pub after: (u32, u32),
}

/// One step with class bookkeeping; returns the map and the transported bracket.
pub fn darboux_step(kind: StepKind, s: &Structure) -> Result<(Step, Structure)> {
    let sm = structure_matrices(s)?;
    let g = step_map(kind, &sm)?;
    let next = transport(s, &g)?;
    let after = structure_matrices(&next)?.class;
    check_class(kind, sm.class, after, s.n() as u32 + 1)?;
    Ok((Step { kind, map: g, before: sm.class, after }, next))
}

#[derive(Clone, Debug)]
pub struct DarbouxResult {
    pub steps: Vec<Step>,
    /// Darboux coordinates as functions of the input coordinates.
    pub map: SuperMap,
    pub structure: Structure,
    pub canonical: bool,
}

/// `F₁, F₂, F₁, F₃ⁿ, F₄ⁿ`, then the θ-shift absorbing the remaining `{θ,θ}`.
pub fn darboux_pipeline(s: &Structure) -> Result<DarbouxResult> {
    let t = s.table().clone();
    let n = t.n();
    let mut kinds = vec![StepKind::F1, StepKind::F2, StepKind::F1];
    kinds.extend(std::iter::repeat(StepKind::F3).take(n));
    kinds.extend(std::iter::repeat(StepKind::F4).take(n));
    kinds.push(StepKind::Shift);
    let mut cur = s.clone();
    let mut total = SuperMap::identity(&t);
    let mut steps = Vec::new();
    for kind in kinds {
        let (step, next) = darboux_step(kind, &cur)?;
        total = step.map.compose(&total)?;
        steps.push(step);
        cur = next;
    }
    let canonical = cur.is_canonical() && total.is_canonical_between(s, &Structure::canonical(&t))?;
    Ok(DarbouxResult { steps, map: total, structure: cur, canonical })
}

/// Nonzero entries of `{Φ^A, Φ^B}_Ω − Ω_can^{AB}`.
pub fn residual_report(map: &SuperMap, s: &Structure) -> Result<Vec<(usize, usize, SuperExpr)>> {
    let lhs = map.bracket_matrix_with(s)?;
    let can = Structure::canonical(&map.table);
    let mut out = Vec::new();
    for a in 0..lhs.rows {
        for b in 0..lhs.cols {
            let d = lhs.get(a, b) - can.get(a, b);
            if !d.is_zero() {
                out.push((a, b, d));
            }
        }
    }
    Ok(out)
}

/// `θ_m ∂E^{mj}/∂θ_i + θ_m ∂E^{mi}/∂θ_j + rE^{ij}` restricted to θ-degree ≤ r.
pub fn f3_identity_residual(e: &SMatrix, r: u32) -> SMatrix {
    let t = e.table().clone();
    let n = e.rows;
    SMatrix::from_fn(&t, n, n, |i, j| {
        let mut acc = e.get(i, j).scale_int(r as i64);
        for m in 0..n {
            let th = SuperExpr::theta(&t, m);
            acc = &acc + &(&th * &e.get(m, j).d_theta(i));
            acc = &acc + &(&th * &e.get(m, i).d_theta(j));
        }
        acc.filter_terms(|k| (k.0 & t.theta_mask()).count_ones() <= r)
    })
}
