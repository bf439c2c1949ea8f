use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Maximum number of even coordinates; jet multi-indices pack 7 bits per coordinate.
pub const MAX_COORDS: usize = 8;
/// Odd generators are stored as bits of a `u64`.
pub const MAX_ODD: usize = 64;

const KIND_SHIFT: u32 = 62;
const FUNC_SHIFT: u32 = 56;
const ORDER_BITS: u32 = 7;
const ORDER_MASK: u64 = (1 << ORDER_BITS) - 1;

/// An even generator of the scalar ring.
///
/// Coordinates sort before parameters, parameters before jets. A jet is a
/// partial derivative of an uninterpreted even function of the coordinates;
/// differentiating a jet raises one entry of its multi-index.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Var(u64);

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum VarKind {
    Coord(usize),
    Param(usize),
    Jet { func: usize, orders: [u8; MAX_COORDS] },
}

impl Var {
    pub fn coord(i: usize) -> Var {
        Var(i as u64)
    }

    pub fn param(i: usize) -> Var {
        Var((1 << KIND_SHIFT) | i as u64)
    }

    pub fn jet(func: usize, orders: &[u8; MAX_COORDS]) -> Var {
        let mut packed = 0u64;
        for (k, &o) in orders.iter().enumerate() {
            packed |= (o as u64 & ORDER_MASK) << (ORDER_BITS * (MAX_COORDS - 1 - k) as u32);
        }
        Var((2 << KIND_SHIFT) | ((func as u64) << FUNC_SHIFT) | packed)
    }

    pub fn kind(self) -> VarKind {
        match self.0 >> KIND_SHIFT {
            0 => VarKind::Coord(self.0 as usize),
            1 => VarKind::Param((self.0 & !(3 << KIND_SHIFT)) as usize),
            _ => {
                let func = ((self.0 >> FUNC_SHIFT) & 0x3f) as usize;
                let mut orders = [0u8; MAX_COORDS];
                for (k, o) in orders.iter_mut().enumerate() {
                    *o = ((self.0 >> (ORDER_BITS * (MAX_COORDS - 1 - k) as u32)) & ORDER_MASK) as u8;
                }
                VarKind::Jet { func, orders }
            }
        }
    }

    pub fn is_jet(self) -> bool {
        matches!(self.kind(), VarKind::Jet { .. })
    }

    /// Derivative of this generator along coordinate `i`: `Some(v)` when the
    /// result is another generator, `None` when it is zero. `Coord(i)` itself
    /// differentiates to one and is handled by the caller.
    pub(crate) fn jet_derivative(self, i: usize) -> Option<Var> {
        match self.kind() {
            VarKind::Jet { func, mut orders } => {
                orders[i] += 1;
                assert!(orders[i] as u64 <= ORDER_MASK, "jet order overflow");
                Some(Var::jet(func, &orders))
            }
            _ => None,
        }
    }
}

/// Where an odd generator sits in the global order.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OddKind {
    Aux(usize),
    Theta(usize),
    Frame(usize),
}

/// A symbol resolved by name.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Symbol {
    Even(Var),
    Odd(usize),
    Function(usize),
}

/// Names and ordering of all generators of a chart.
///
/// Odd generators are numbered globally: aux constants first, then the
/// coordinate odds `θ_i`, then the frame odds `ξ^i` used for differential
/// forms. Aux odds never count toward θ-degree.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SymbolTable {
    pub chart: String,
    even: Vec<String>,
    theta: Vec<String>,
    frame: Vec<String>,
    aux: Vec<String>,
    params: Vec<String>,
    functions: Vec<String>,
    lookup: HashMap<String, Symbol>,
}

pub type Table = Arc<SymbolTable>;

/// Builder input for [`SymbolTable::new`].
#[derive(Clone, Default, Debug)]
pub struct ChartSpec {
    pub chart: String,
    pub even: Vec<String>,
    pub odd: Vec<String>,
    pub frame: Vec<String>,
    pub aux: Vec<String>,
    pub params: Vec<String>,
    pub functions: Vec<String>,
}

impl SymbolTable {
    pub fn new(cs: ChartSpec) -> Result<Table> {
        let n = cs.even.len();
        if cs.odd.len() != n {
            return Err(Error::Input(format!(
                "chart has {} even and {} odd coordinates",
                n,
                cs.odd.len()
            )));
        }
        if n > MAX_COORDS {
            return Err(Error::Input(format!("at most {MAX_COORDS} coordinate pairs are supported")));
        }
        let frame = if cs.frame.is_empty() {
            cs.even.iter().enumerate().map(|(i, x)| frame_name(x, i)).collect()
        } else {
            cs.frame
        };
        if frame.len() != n {
            return Err(Error::Input("frame list must match the chart dimension".into()));
        }
        if cs.aux.len() + 2 * n > MAX_ODD {
            return Err(Error::Input("too many odd generators".into()));
        }
        if cs.functions.len() > 63 {
            return Err(Error::Input("too many function symbols".into()));
        }
        let mut t = SymbolTable {
            chart: cs.chart,
            even: cs.even,
            theta: cs.odd,
            frame,
            aux: cs.aux,
            params: cs.params,
            functions: cs.functions,
            lookup: HashMap::new(),
        };
        let mut entries: Vec<(String, Symbol)> = Vec::new();
        for (i, s) in t.even.iter().enumerate() {
            entries.push((s.clone(), Symbol::Even(Var::coord(i))));
        }
        for (i, s) in t.params.iter().enumerate() {
            entries.push((s.clone(), Symbol::Even(Var::param(i))));
        }
        for (i, s) in t.functions.iter().enumerate() {
            entries.push((s.clone(), Symbol::Function(i)));
        }
        let m = t.aux.len();
        for (i, s) in t.aux.iter().enumerate() {
            entries.push((s.clone(), Symbol::Odd(i)));
        }
        for (i, s) in t.theta.iter().enumerate() {
            entries.push((s.clone(), Symbol::Odd(m + i)));
        }
        for (i, s) in t.frame.iter().enumerate() {
            entries.push((s.clone(), Symbol::Odd(m + n + i)));
        }
        for (name, sym) in entries {
            if !valid_ident(&name) || name == "D" {
                return Err(Error::Input(format!("invalid symbol name `{name}`")));
            }
            if t.lookup.insert(name.clone(), sym).is_some() {
                return Err(Error::Input(format!("duplicate symbol name `{name}`")));
            }
        }
        Ok(Arc::new(t))
    }

    /// `x1..xn`, `th1..thn`, `xi1..xin`, `b1..bm` with no parameters.
    pub fn standard(n: usize, aux: usize) -> Table {
        Self::standard_with(n, aux, &[], &[])
    }

    pub fn standard_with(n: usize, aux: usize, params: &[&str], functions: &[&str]) -> Table {
        SymbolTable::new(ChartSpec {
            chart: "U".into(),
            even: (1..=n).map(|i| format!("x{i}")).collect(),
            odd: (1..=n).map(|i| format!("th{i}")).collect(),
            frame: vec![],
            aux: (1..=aux).map(|i| format!("b{i}")).collect(),
            params: params.iter().map(|s| s.to_string()).collect(),
            functions: functions.iter().map(|s| s.to_string()).collect(),
        })
        .expect("standard chart names are valid")
    }

    pub fn n(&self) -> usize {
        self.even.len()
    }

    pub fn n_aux(&self) -> usize {
        self.aux.len()
    }

    pub fn n_params(&self) -> usize {
        self.params.len()
    }

    pub fn n_functions(&self) -> usize {
        self.functions.len()
    }

    pub fn n_odd(&self) -> usize {
        self.aux.len() + 2 * self.n()
    }

    pub fn theta_index(&self, i: usize) -> usize {
        self.aux.len() + i
    }

    pub fn frame_index(&self, i: usize) -> usize {
        self.aux.len() + self.n() + i
    }

    pub fn aux_index(&self, i: usize) -> usize {
        i
    }

    pub fn odd_kind(&self, k: usize) -> OddKind {
        let m = self.aux.len();
        let n = self.n();
        if k < m {
            OddKind::Aux(k)
        } else if k < m + n {
            OddKind::Theta(k - m)
        } else {
            OddKind::Frame(k - m - n)
        }
    }

    pub fn theta_mask(&self) -> u64 {
        mask_range(self.aux.len(), self.aux.len() + self.n())
    }

    pub fn frame_mask(&self) -> u64 {
        mask_range(self.aux.len() + self.n(), self.aux.len() + 2 * self.n())
    }

    pub fn aux_mask(&self) -> u64 {
        mask_range(0, self.aux.len())
    }

    pub fn resolve(&self, name: &str) -> Option<Symbol> {
        self.lookup.get(name).copied()
    }

    pub fn odd_name(&self, k: usize) -> &str {
        match self.odd_kind(k) {
            OddKind::Aux(i) => &self.aux[i],
            OddKind::Theta(i) => &self.theta[i],
            OddKind::Frame(i) => &self.frame[i],
        }
    }

    pub fn coord_name(&self, i: usize) -> &str {
        &self.even[i]
    }

    pub fn param_name(&self, i: usize) -> &str {
        &self.params[i]
    }

    pub fn function_name(&self, i: usize) -> &str {
        &self.functions[i]
    }

    pub fn param_index(&self, name: &str) -> Option<usize> {
        self.params.iter().position(|p| p == name)
    }

    pub fn coords(&self) -> &[String] {
        &self.even
    }

    pub fn thetas(&self) -> &[String] {
        &self.theta
    }

    pub fn frames(&self) -> &[String] {
        &self.frame
    }

    pub fn auxes(&self) -> &[String] {
        &self.aux
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn functions(&self) -> &[String] {
        &self.functions
    }

    /// Same generators with one extra even parameter appended (no-op if present).
    pub fn with_param(&self, name: &str) -> Result<Table> {
        if self.param_index(name).is_some() {
            return Ok(Arc::new(self.clone()));
        }
        let mut params = self.params.clone();
        params.push(name.to_string());
        SymbolTable::new(ChartSpec {
            chart: self.chart.clone(),
            even: self.even.clone(),
            odd: self.theta.clone(),
            frame: self.frame.clone(),
            aux: self.aux.clone(),
            params,
            functions: self.functions.clone(),
        })
    }

    pub fn var_name(&self, v: Var) -> String {
        match v.kind() {
            VarKind::Coord(i) => self.even[i].clone(),
            VarKind::Param(i) => self.params[i].clone(),
            VarKind::Jet { func, orders } => {
                let mut parts = vec![self.functions[func].clone()];
                for (i, &o) in orders.iter().enumerate() {
                    for _ in 0..o {
                        parts.push(self.even[i].clone());
                    }
                }
                if parts.len() == 1 {
                    parts.pop().unwrap()
                } else {
                    format!("D({})", parts.join(","))
                }
            }
        }
    }
}

impl fmt::Display for SymbolTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}; {}]", self.chart, self.even.join(","), self.theta.join(","))
    }
}

pub(crate) fn mask_range(lo: usize, hi: usize) -> u64 {
    let upper = if hi >= 64 { u64::MAX } else { (1u64 << hi) - 1 };
    let lower = if lo >= 64 { u64::MAX } else { (1u64 << lo) - 1 };
    upper & !lower
}

fn valid_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// `xi<suffix>` for a coordinate named `x<suffix>`, otherwise `xi<i+1>`.
fn frame_name(coord: &str, i: usize) -> String {
    match coord.strip_prefix('x') {
        Some(rest) if !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit()) => format!("xi{rest}"),
        _ => format!("xi{}", i + 1),
    }
}

/// Two tables describe the same generators.
pub fn same_table(a: &Table, b: &Table) -> bool {
    Arc::ptr_eq(a, b)
        || (a.even == b.even
            && a.theta == b.theta
            && a.frame == b.frame
            && a.aux == b.aux
            && a.params == b.params
            && a.functions == b.functions)
}
