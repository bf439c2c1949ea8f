use crate::error::{Error, Result};
use crate::superalgebra::{Parity, SMatrix, SuperExpr, Table};

/// Bracket data `Ω^{AB} = {z^A, z^B}` on `z = (x^1..x^n, θ_1..θ_n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Structure {
    pub omega: SMatrix,
}

impl Structure {
    /// `{x^i, θ_j} = δ^i_j`, `{θ_j, x^i} = -δ^i_j`, all others zero.
    pub fn canonical(table: &Table) -> Structure {
        let n = table.n();
        let mut omega = SMatrix::zeros(table, 2 * n, 2 * n);
        for i in 0..n {
            omega.set(i, n + i, SuperExpr::one(table));
            omega.set(n + i, i, SuperExpr::int(table, -1));
        }
        Structure { omega }
    }

    pub fn table(&self) -> &Table {
        self.omega.table()
    }

    pub fn n(&self) -> usize {
        self.table().n()
    }

    pub fn get(&self, a: usize, b: usize) -> &SuperExpr {
        self.omega.get(a, b)
    }

    pub fn is_canonical(&self) -> bool {
        *self == Structure::canonical(self.table())
    }

    /// `E^{ij} = {x^i, x^j}`.
    pub fn e_block(&self) -> SMatrix {
        self.omega.block(0, 0, self.n(), self.n())
    }

    /// `A^i_j = {x^i, θ_j}`.
    pub fn a_block(&self) -> SMatrix {
        self.omega.block(0, self.n(), self.n(), self.n())
    }

    /// `F_{ij} = {θ_i, θ_j}`.
    pub fn f_block(&self) -> SMatrix {
        self.omega.block(self.n(), self.n(), self.n(), self.n())
    }
}

/// Coordinate `z^A` of the chart.
pub fn coordinate(table: &Table, a: usize) -> SuperExpr {
    let n = table.n();
    if a < n {
        SuperExpr::coord(table, a)
    } else {
        SuperExpr::theta(table, a - n)
    }
}

/// Left derivative along `z^A`.
pub fn d_z(f: &SuperExpr, a: usize) -> SuperExpr {
    let n = f.table().n();
    if a < n {
        f.d_coord(a)
    } else {
        f.d_theta(a - n)
    }
}

fn parity_parts(f: &SuperExpr) -> [(u32, SuperExpr); 2] {
    [(0, f.even_part()), (1, f.odd_part())]
}

/// Canonical bracket `{f,g} = ∂f/∂x^i ∂g/∂θ_i + (-1)^{p(f)} ∂f/∂θ_i ∂g/∂x^i`.
pub fn bracket(f: &SuperExpr, g: &SuperExpr) -> Result<SuperExpr> {
    let t = f.table();
    if !crate::superalgebra::same_table(t, g.table()) {
        return Err(Error::TableMismatch("bracket operands".into()));
    }
    let mut acc = SuperExpr::zero(t);
    for (pf, fp) in parity_parts(f) {
        if fp.is_zero() {
            continue;
        }
        for i in 0..t.n() {
            acc = &acc + &(&fp.d_coord(i) * &g.d_theta(i));
            let second = &fp.d_theta(i) * &g.d_coord(i);
            acc = if pf == 1 { &acc - &second } else { &acc + &second };
        }
    }
    Ok(acc)
}

/// Bracket for arbitrary structure data:
/// `{f,g} = ∂f/∂z^A (-1)^{p(f)p(A)+p(A)} Ω^{AB} ∂g/∂z^B`.
pub fn bracket_with(f: &SuperExpr, g: &SuperExpr, s: &Structure) -> Result<SuperExpr> {
    let t = f.table();
    if !crate::superalgebra::same_table(t, g.table()) || !crate::superalgebra::same_table(t, s.table()) {
        return Err(Error::TableMismatch("bracket operands".into()));
    }
    let n = t.n();
    let dg: Vec<SuperExpr> = (0..2 * n).map(|b| d_z(g, b)).collect();
    let mut acc = SuperExpr::zero(t);
    for (pf, fp) in parity_parts(f) {
        if fp.is_zero() {
            continue;
        }
        for a in 0..2 * n {
            let df = d_z(&fp, a);
            if df.is_zero() {
                continue;
            }
            let pa = u32::from(a >= n);
            let neg = (pf * pa + pa) % 2 == 1;
            let mut row = SuperExpr::zero(t);
            for (b, dgb) in dg.iter().enumerate() {
                let w = s.get(a, b);
                if w.is_zero() || dgb.is_zero() {
                    continue;
                }
                row = &row + &(w * dgb);
            }
            let term = &df * &row;
            acc = if neg { &acc - &term } else { &acc + &term };
        }
    }
    Ok(acc)
}

/// Components `D_f^A = {f, z^A}` of the Hamiltonian vector field.
pub fn hamiltonian_vector_field(f: &SuperExpr) -> Result<Vec<SuperExpr>> {
    let t = f.table();
    (0..2 * t.n()).map(|a| bracket(f, &coordinate(t, a))).collect()
}

fn parity_bit(e: &SuperExpr, what: &str) -> Result<u32> {
    match e.parity() {
        Parity::Even => Ok(0),
        Parity::Odd => Ok(1),
        Parity::Mixed => Err(Error::Parity(format!("{what} must have definite parity"))),
    }
}

/// `{f,{g,h}}(-1)^{(p(f)+1)(p(h)+1)} + cyclic`, zero for a valid bracket.
pub fn jacobi_residual(f: &SuperExpr, g: &SuperExpr, h: &SuperExpr, s: Option<&Structure>) -> Result<SuperExpr> {
    let br = |a: &SuperExpr, b: &SuperExpr| match s {
        Some(s) => bracket_with(a, b, s),
        None => bracket(a, b),
    };
    let (pf, pg, ph) = (parity_bit(f, "f")?, parity_bit(g, "g")?, parity_bit(h, "h")?);
    let sign = |a: u32, c: u32| ((a + 1) * (c + 1)) % 2 == 1;
    let mut acc = SuperExpr::zero(f.table());
    for (a, b, c, pa, pc) in [(f, g, h, pf, ph), (g, h, f, pg, pf), (h, f, g, ph, pg)] {
        let term = br(a, &br(b, c)?)?;
        acc = if sign(pa, pc) { &acc - &term } else { &acc + &term };
    }
    Ok(acc)
}

/// `{g, f} + (-1)^{(p(f)+1)(p(g)+1)} {f, g}`, zero by graded antisymmetry.
pub fn antisymmetry_residual(f: &SuperExpr, g: &SuperExpr) -> Result<SuperExpr> {
    let (pf, pg) = (parity_bit(f, "f")?, parity_bit(g, "g")?);
    let fg = bracket(f, g)?;
    let gf = bracket(g, f)?;
    Ok(if ((pf + 1) * (pg + 1)) % 2 == 1 { &gf - &fg } else { &gf + &fg })
}
