use crate::error::{Error, Result};
use crate::superalgebra::{same_table, Bindings, OddKey, SMatrix, Scalar, SuperExpr, Table};

use super::bracket::{bracket, bracket_with, coordinate, d_z, Structure};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapKind {
    /// `x̃ = x + O(θ)`, `θ̃ = O(θ)`.
    Adjusted,
    /// Lift of a change of even coordinates.
    Point,
    /// `θ̃ = θ + Ψ(x)`.
    Special,
    General,
}

/// New coordinates expressed in the old ones: `x̃^i = targets[i]`, `θ̃_j = targets[n + j]`.
///
/// Source and target share one symbol table; the target coordinates reuse the
/// source names. `body_inverse`, when present, gives the old even coordinates
/// in terms of the new ones for the aux-free body of the map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuperMap {
    pub table: Table,
    pub source: String,
    pub target: String,
    pub targets: Vec<SuperExpr>,
    pub body_inverse: Option<Vec<SuperExpr>>,
    pub kind: MapKind,
}

impl SuperMap {
    pub fn new(table: &Table, targets: Vec<SuperExpr>, body_inverse: Option<Vec<SuperExpr>>) -> Result<SuperMap> {
        let n = table.n();
        if targets.len() != 2 * n {
            return Err(Error::Input(format!("map needs {} targets, got {}", 2 * n, targets.len())));
        }
        for (a, e) in targets.iter().enumerate() {
            if !same_table(e.table(), table) {
                return Err(Error::TableMismatch("map target over another chart".into()));
            }
            let ok = if a < n { e.is_even() } else { e.is_odd() };
            if !ok {
                return Err(Error::Parity(format!("target {a} has the wrong parity")));
            }
        }
        if let Some(bi) = &body_inverse {
            if bi.len() != n {
                return Err(Error::Input("body inverse needs one entry per even coordinate".into()));
            }
        }
        let mut m = SuperMap {
            table: table.clone(),
            source: table.chart.clone(),
            target: format!("{}~", table.chart),
            targets,
            body_inverse,
            kind: MapKind::General,
        };
        m.kind = m.classify();
        Ok(m)
    }

    pub fn identity(table: &Table) -> SuperMap {
        let targets = (0..2 * table.n()).map(|a| coordinate(table, a)).collect();
        SuperMap::new(table, targets, None).unwrap()
    }

    /// Adjusted map from its targets; fails when not adjusted.
    pub fn adjusted(table: &Table, targets: Vec<SuperExpr>) -> Result<SuperMap> {
        let m = SuperMap::new(table, targets, None)?;
        if !m.is_adjusted() {
            return Err(Error::Precondition("map is not adjusted".into()));
        }
        Ok(m)
    }

    /// Point lift `x̃ = f(x)`, `θ̃_i = (∂x^m/∂x̃^i) θ_m`; `inverse` gives `x` in terms of `x̃`.
    pub fn point(table: &Table, body: Vec<SuperExpr>, inverse: Vec<SuperExpr>) -> Result<SuperMap> {
        let n = table.n();
        if body.len() != n || inverse.len() != n {
            return Err(Error::Input("point map needs n body and n inverse entries".into()));
        }
        if body.iter().chain(inverse.iter()).any(|e| !e.is_theta_free() || !e.is_frame_free() || !e.is_even()) {
            return Err(Error::Precondition("point map data must be even functions of x".into()));
        }
        let composed = substitute_all(&body, &Bindings::from_coordinates(table, &inverse, &[]))?;
        for (i, e) in composed.iter().enumerate() {
            if *e != SuperExpr::coord(table, i) {
                return Err(Error::Precondition("supplied inverse does not invert the body map".into()));
            }
        }
        let jac = SMatrix::from_fn(table, n, n, |k, m| body[k].d_coord(m));
        let jinv = jac.inverse_even()?;
        let mut targets = body.clone();
        for i in 0..n {
            let mut acc = SuperExpr::zero(table);
            for m in 0..n {
                acc = &acc + &(jinv.get(m, i) * &SuperExpr::theta(table, m));
            }
            targets.push(acc);
        }
        let mut m = SuperMap::new(table, targets, Some(inverse))?;
        m.kind = MapKind::Point;
        Ok(m)
    }

    /// `x̃ = x`, `θ̃ = θ + Ψ(x)` with odd `Ψ` depending on `x` only; `Ψ` must be closed.
    pub fn special(table: &Table, psi: Vec<SuperExpr>) -> Result<SuperMap> {
        let n = table.n();
        if psi.len() != n {
            return Err(Error::Input("special map needs n entries".into()));
        }
        if psi.iter().any(|e| !e.is_odd() || !e.is_theta_free() || !e.is_frame_free()) {
            return Err(Error::Precondition("Ψ must be odd functions of x".into()));
        }
        for i in 0..n {
            for j in i + 1..n {
                if psi[j].d_coord(i) != psi[i].d_coord(j) {
                    return Err(Error::Precondition("Ψ is not closed".into()));
                }
            }
        }
        let mut targets: Vec<SuperExpr> = (0..n).map(|i| SuperExpr::coord(table, i)).collect();
        for (i, p) in psi.iter().enumerate() {
            targets.push(&SuperExpr::theta(table, i) + p);
        }
        let mut m = SuperMap::new(table, targets, None)?;
        m.kind = MapKind::Special;
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.table.n()
    }

    pub fn x_targets(&self) -> &[SuperExpr] {
        &self.targets[..self.n()]
    }

    pub fn theta_targets(&self) -> &[SuperExpr] {
        &self.targets[self.n()..]
    }

    pub fn bindings(&self) -> Bindings {
        Bindings::from_coordinates(&self.table, self.x_targets(), self.theta_targets())
    }

    /// `x̃|_{θ=0} = x` and `θ̃|_{θ=0} = 0`.
    pub fn is_adjusted(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| self.targets[i].theta_free_part() == SuperExpr::coord(&self.table, i))
            && (0..n).all(|i| self.targets[n + i].theta_free_part().is_zero())
    }

    pub fn body_is_identity(&self) -> bool {
        (0..self.n()).all(|i| self.targets[i].body() == Scalar::coord(i))
    }

    fn classify(&self) -> MapKind {
        if self.is_adjusted() {
            MapKind::Adjusted
        } else {
            MapKind::General
        }
    }

    /// `f ∘ F`: the function `f` of the new coordinates written in the old ones.
    pub fn pull(&self, f: &SuperExpr) -> Result<SuperExpr> {
        f.substitute(&self.bindings())
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &SuperMap) -> Result<SuperMap> {
        if !same_table(&self.table, &inner.table) {
            return Err(Error::TableMismatch("composition across charts".into()));
        }
        let targets = substitute_all(&self.targets, &inner.bindings())?;
        let side = |m: &SuperMap| {
            if m.body_is_identity() {
                Some(identity_x(&m.table))
            } else {
                m.body_inverse.clone()
            }
        };
        let body_inverse = match (side(self), side(inner)) {
            _ if self.body_is_identity() && inner.body_is_identity() => None,
            (Some(o), Some(i)) => Some(substitute_all(&i, &Bindings::from_coordinates(&self.table, &o, &[]))?),
            _ => None,
        };
        let mut m = SuperMap::new(&self.table, targets, body_inverse)?;
        m.source = inner.source.clone();
        m.target = self.target.clone();
        Ok(m)
    }

    /// Inverse map by graded fixed-point iteration.
    ///
    /// Writes `x̃ = f₀(x) + a(x,θ)` and `θ̃ = θ M(x) + b(x,θ)` with `M` the aux-free
    /// θ-linear part, then iterates `x = f₀⁻¹(x̃ - a)`, `θ = (θ̃ - b) M⁻¹` until stable.
    pub fn invert(&self) -> Result<SuperMap> {
        let t = &self.table;
        let n = self.n();
        let ginv: Vec<SuperExpr> = if self.body_is_identity() {
            identity_x(t)
        } else {
            self.body_inverse
                .clone()
                .ok_or_else(|| Error::Precondition("inverting a map with non-identity body needs its body inverse".into()))?
        };
        let bodies: Vec<SuperExpr> = (0..n).map(|i| SuperExpr::scalar(t, self.targets[i].body())).collect();
        let a: Vec<SuperExpr> = (0..n).map(|i| &self.targets[i] - &bodies[i]).collect();
        let mmat = SMatrix::from_fn(t, n, n, |m, j| {
            let key = OddKey(1 << t.theta_index(m));
            SuperExpr::scalar(t, self.targets[n + j].coefficient(key))
        });
        let minv = mmat
            .inverse_even()
            .map_err(|_| Error::NotInvertible("θ-linear part of the map is singular".into()))?;
        let b: Vec<SuperExpr> = (0..n)
            .map(|j| {
                let mut lin = SuperExpr::zero(t);
                for m in 0..n {
                    lin = &lin + &(&SuperExpr::theta(t, m) * mmat.get(m, j));
                }
                &self.targets[n + j] - &lin
            })
            .collect();
        let xt: Vec<SuperExpr> = (0..n).map(|i| SuperExpr::coord(t, i)).collect();
        let tt: Vec<SuperExpr> = (0..n).map(|i| SuperExpr::theta(t, i)).collect();
        let row_times = |row: &[SuperExpr], m: &SMatrix| -> Vec<SuperExpr> {
            (0..n)
                .map(|c| {
                    let mut acc = SuperExpr::zero(t);
                    for (j, r) in row.iter().enumerate() {
                        acc = &acc + &(r * m.get(j, c));
                    }
                    acc
                })
                .collect()
        };
        let mut xs = ginv.clone();
        let minv0 = minv.map(|e| e.substitute(&Bindings::from_coordinates(t, &xs, &[])))?;
        let mut ths = row_times(&tt, &minv0);
        let cap = 2 * t.n_odd() + 6;
        for _ in 0..cap {
            let bind = Bindings::from_coordinates(t, &xs, &ths);
            let a_val = substitute_all(&a, &bind)?;
            let shifted: Vec<SuperExpr> = (0..n).map(|i| &xt[i] - &a_val[i]).collect();
            let new_x = substitute_all(&ginv, &Bindings::from_coordinates(t, &shifted, &[]))?;
            let b_val = substitute_all(&b, &bind)?;
            let minv_val = minv.map(|e| e.substitute(&Bindings::from_coordinates(t, &xs, &[])))?;
            let rhs: Vec<SuperExpr> = (0..n).map(|j| &tt[j] - &b_val[j]).collect();
            let new_th = row_times(&rhs, &minv_val);
            if new_x == xs && new_th == ths {
                let mut targets = xs;
                targets.extend(ths);
                let body_inverse = if self.body_is_identity() {
                    None
                } else {
                    Some(bodies.clone())
                };
                let mut m = SuperMap::new(t, targets, body_inverse)?;
                m.source = self.target.clone();
                m.target = self.source.clone();
                return Ok(m);
            }
            xs = new_x;
            ths = new_th;
        }
        Err(Error::NoConvergence("map inversion did not stabilise".into()))
    }

    /// `{F^A, F^B}` for the canonical bracket.
    pub fn bracket_matrix(&self) -> Result<SMatrix> {
        let n2 = 2 * self.n();
        SMatrix::try_from_fn(&self.table, n2, n2, |a, b| bracket(&self.targets[a], &self.targets[b]))
    }

    /// `{F^A, F^B}` computed with structure data in the source coordinates.
    pub fn bracket_matrix_with(&self, s: &Structure) -> Result<SMatrix> {
        let n2 = 2 * self.n();
        SMatrix::try_from_fn(&self.table, n2, n2, |a, b| bracket_with(&self.targets[a], &self.targets[b], s))
    }

    /// Pulls the canonical brackets back: `{F^A, F^B} = Ω_can^{AB}`.
    pub fn is_canonical(&self) -> Result<bool> {
        Ok(self.bracket_matrix()? == Structure::canonical(&self.table).omega)
    }

    /// `{F^A, F^B}_source = Ω_target^{AB} ∘ F`.
    pub fn is_canonical_between(&self, source: &Structure, target: &Structure) -> Result<bool> {
        let lhs = self.bracket_matrix_with(source)?;
        let rhs = target.omega.map(|e| self.pull(e))?;
        Ok(lhs == rhs)
    }

    /// Left-derivative Jacobian, row = target coordinate, column = source coordinate.
    pub fn jacobian(&self) -> SMatrix {
        let n2 = 2 * self.n();
        SMatrix::from_fn(&self.table, n2, n2, |a, b| d_z(&self.targets[a], b))
    }
}

fn identity_x(t: &Table) -> Vec<SuperExpr> {
    (0..t.n()).map(|i| SuperExpr::coord(t, i)).collect()
}

pub(crate) fn substitute_all(es: &[SuperExpr], b: &Bindings) -> Result<Vec<SuperExpr>> {
    es.iter().map(|e| e.substitute(b)).collect()
}

/// Factorisation `F = F_s ∘ F_p ∘ F_adj` into special, point and adjusted maps.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub special: SuperMap,
    pub point: SuperMap,
    pub adjusted: SuperMap,
}

/// Splits a map into special, point and adjusted factors.
pub fn decompose(f: &SuperMap) -> Result<Decomposition> {
    let t = &f.table;
    let n = f.n();
    let f0: Vec<SuperExpr> = f.x_targets().iter().map(|e| e.theta_free_part()).collect();
    let psi: Vec<SuperExpr> = f.theta_targets().iter().map(|e| e.theta_free_part()).collect();
    let mut body_only = f0.clone();
    body_only.extend((0..n).map(|i| SuperExpr::theta(t, i)));
    let body_map = SuperMap::new(t, body_only, f.body_inverse.clone())?;
    let g: Vec<SuperExpr> = body_map.invert()?.x_targets().to_vec();
    let point = SuperMap::point_unchecked(t, f0, g.clone())?;
    let psi_s = substitute_all(&psi, &Bindings::from_coordinates(t, &g, &[]))?;
    let special = SuperMap::special(t, psi_s)?;
    let rest = point.invert()?.compose(&special.invert()?.compose(f)?)?;
    if !rest.is_adjusted() {
        return Err(Error::Precondition("remaining factor is not adjusted".into()));
    }
    let mut adjusted = rest;
    adjusted.kind = MapKind::Adjusted;
    Ok(Decomposition { special, point, adjusted })
}

impl SuperMap {
    /// Point lift whose body may carry aux-valued corrections; `inverse` is trusted.
    fn point_unchecked(table: &Table, body: Vec<SuperExpr>, inverse: Vec<SuperExpr>) -> Result<SuperMap> {
        let n = table.n();
        let jac = SMatrix::from_fn(table, n, n, |k, m| body[k].d_coord(m));
        let jinv = jac.inverse_even()?;
        let mut targets = body.clone();
        for i in 0..n {
            let mut acc = SuperExpr::zero(table);
            for m in 0..n {
                acc = &acc + &(jinv.get(m, i) * &SuperExpr::theta(table, m));
            }
            targets.push(acc);
        }
        let aux_free_inverse: Vec<SuperExpr> = inverse.iter().map(|e| SuperExpr::scalar(table, e.body())).collect();
        let mut m = SuperMap::new(table, targets, Some(aux_free_inverse))?;
        m.kind = MapKind::Point;
        Ok(m)
    }
}
