//! Small dense matrices of superalgebra elements.

use super::expr::SuperExpr;
use super::symbols::Table;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SMatrix {
    pub rows: usize,
    pub cols: usize,
    table: Table,
    data: Vec<SuperExpr>,
}

impl SMatrix {
    pub fn zeros(table: &Table, rows: usize, cols: usize) -> SMatrix {
        SMatrix { rows, cols, table: table.clone(), data: vec![SuperExpr::zero(table); rows * cols] }
    }

    pub fn identity(table: &Table, n: usize) -> SMatrix {
        let mut m = SMatrix::zeros(table, n, n);
        for i in 0..n {
            m.set(i, i, SuperExpr::one(table));
        }
        m
    }

    pub fn from_fn(table: &Table, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> SuperExpr) -> SMatrix {
        let mut m = SMatrix::zeros(table, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn try_from_fn(
        table: &Table,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Result<SuperExpr>,
    ) -> Result<SMatrix> {
        let mut m = SMatrix::zeros(table, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j)?);
            }
        }
        Ok(m)
    }

    pub fn table(&self) -> &Table {
        &self.table
    }

    pub fn get(&self, i: usize, j: usize) -> &SuperExpr {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, e: SuperExpr) {
        self.data[i * self.cols + j] = e;
    }

    pub fn entries(&self) -> impl Iterator<Item = &SuperExpr> {
        self.data.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    pub fn mul(&self, o: &SMatrix) -> SMatrix {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        SMatrix::from_fn(&self.table, self.rows, o.cols, |i, j| {
            let mut acc = SuperExpr::zero(&self.table);
            for k in 0..self.cols {
                acc = &acc + &(self.get(i, k) * o.get(k, j));
            }
            acc
        })
    }

    pub fn add(&self, o: &SMatrix) -> SMatrix {
        SMatrix::from_fn(&self.table, self.rows, self.cols, |i, j| self.get(i, j) + o.get(i, j))
    }

    pub fn sub(&self, o: &SMatrix) -> SMatrix {
        SMatrix::from_fn(&self.table, self.rows, self.cols, |i, j| self.get(i, j) - o.get(i, j))
    }

    pub fn neg(&self) -> SMatrix {
        SMatrix::from_fn(&self.table, self.rows, self.cols, |i, j| -self.get(i, j))
    }

    pub fn scale(&self, e: &SuperExpr) -> SMatrix {
        SMatrix::from_fn(&self.table, self.rows, self.cols, |i, j| e * self.get(i, j))
    }

    pub fn transpose(&self) -> SMatrix {
        SMatrix::from_fn(&self.table, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map(&self, mut f: impl FnMut(&SuperExpr) -> Result<SuperExpr>) -> Result<SMatrix> {
        let mut m = self.clone();
        for e in m.data.iter_mut() {
            *e = f(e)?;
        }
        Ok(m)
    }

    /// Inverse of a square matrix with even entries and invertible body.
    pub fn inverse_even(&self) -> Result<SMatrix> {
        let n = self.rows;
        if n != self.cols {
            return Err(Error::Precondition("inverse of a non-square matrix".into()));
        }
        if !self.data.iter().all(|e| e.is_even()) {
            return Err(Error::Parity("matrix inverse needs even entries".into()));
        }
        let mut a = self.clone();
        let mut inv = SMatrix::identity(&self.table, n);
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !a.get(r, col).body().is_zero())
                .ok_or_else(|| Error::NotInvertible("matrix body is singular".into()))?;
            if pivot != col {
                a.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            let p = a.get(col, col).invert_even()?;
            for j in 0..n {
                a.set(col, j, &p * a.get(col, j));
                inv.set(col, j, &p * inv.get(col, j));
            }
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let f = a.get(r, col).clone();
                for j in 0..n {
                    a.set(r, j, a.get(r, j) - &(&f * a.get(col, j)));
                    inv.set(r, j, inv.get(r, j) - &(&f * inv.get(col, j)));
                }
            }
        }
        Ok(inv)
    }

    /// Determinant of a square matrix with even entries.
    pub fn det_even(&self) -> Result<SuperExpr> {
        let n = self.rows;
        if n != self.cols {
            return Err(Error::Precondition("determinant of a non-square matrix".into()));
        }
        if !self.data.iter().all(|e| e.is_even()) {
            return Err(Error::Parity("determinant needs even entries".into()));
        }
        Ok(self.laplace(&(0..n).collect::<Vec<_>>(), 0))
    }

    fn laplace(&self, cols: &[usize], row: usize) -> SuperExpr {
        if cols.is_empty() {
            return SuperExpr::one(&self.table);
        }
        let mut acc = SuperExpr::zero(&self.table);
        for (k, &c) in cols.iter().enumerate() {
            let e = self.get(row, c);
            if e.is_zero() {
                continue;
            }
            let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let minor = e * &self.laplace(&rest, row + 1);
            acc = if k % 2 == 0 { &acc + &minor } else { &acc - &minor };
        }
        acc
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Block `[r0, r0+rows) × [c0, c0+cols)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> SMatrix {
        SMatrix::from_fn(&self.table, rows, cols, |i, j| self.get(r0 + i, c0 + j).clone())
    }
}
