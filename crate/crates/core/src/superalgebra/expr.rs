//! Elements of the superalgebra: odd monomials with rational-function coefficients.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::poly::{Monomial, Poly};
use super::scalar::Scalar;
use super::symbols::{same_table, Table, Var, VarKind};
use crate::error::{Error, Result};

/// Strictly increasing product of odd generators, one bit per generator.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct OddKey(pub u64);

impl OddKey {
    pub const ONE: OddKey = OddKey(0);

    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, k: usize) -> bool {
        self.0 >> k & 1 == 1
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mut m = self.0;
        std::iter::from_fn(move || {
            if m == 0 {
                None
            } else {
                let k = m.trailing_zeros() as usize;
                m &= m - 1;
                Some(k)
            }
        })
    }
}

impl Ord for OddKey {
    /// Shorter products first, then lexicographic on the index sequence.
    fn cmp(&self, o: &OddKey) -> Ordering {
        match self.len().cmp(&o.len()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let d = self.0 ^ o.0;
        if d == 0 {
            return Ordering::Equal;
        }
        if self.0 >> d.trailing_zeros() & 1 == 1 {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
}

impl PartialOrd for OddKey {
    fn partial_cmp(&self, o: &OddKey) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// `(-1)^(number of inversions)` for the product of two odd monomials; `None` when they overlap.
pub fn product_sign(a: u64, b: u64) -> Option<bool> {
    if a & b != 0 {
        return None;
    }
    let mut inv = 0u32;
    let mut m = b;
    while m != 0 {
        let j = m.trailing_zeros();
        let above = if j >= 63 { 0 } else { a >> (j + 1) };
        inv += above.count_ones();
        m &= m - 1;
    }
    Some(inv % 2 == 1)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

impl Parity {
    pub fn bit(self) -> Option<u32> {
        match self {
            Parity::Even => Some(0),
            Parity::Odd => Some(1),
            Parity::Mixed => None,
        }
    }
}

/// An element of `C(x)[odd generators]` attached to a symbol table.
#[derive(Clone, PartialEq, Eq)]
pub struct SuperExpr {
    table: Table,
    terms: BTreeMap<OddKey, Scalar>,
}

/// Images of generators under a substitution, all expressed over one table.
#[derive(Clone)]
pub struct Bindings {
    pub table: Table,
    pub coords: Vec<Option<SuperExpr>>,
    pub params: Vec<Option<SuperExpr>>,
    pub odds: Vec<Option<SuperExpr>>,
}

impl Bindings {
    pub fn new(table: &Table) -> Bindings {
        Bindings {
            table: table.clone(),
            coords: vec![None; table.n()],
            params: vec![None; table.n_params()],
            odds: vec![None; table.n_odd()],
        }
    }

    pub fn coord(mut self, i: usize, e: SuperExpr) -> Self {
        self.coords[i] = Some(e);
        self
    }

    pub fn theta(mut self, i: usize, e: SuperExpr) -> Self {
        let k = self.table.theta_index(i);
        self.odds[k] = Some(e);
        self
    }

    pub fn odd(mut self, k: usize, e: SuperExpr) -> Self {
        self.odds[k] = Some(e);
        self
    }

    pub fn param(mut self, i: usize, e: SuperExpr) -> Self {
        self.params[i] = Some(e);
        self
    }

    /// Coordinates `x` then `θ`, as produced by maps.
    pub fn from_coordinates(table: &Table, xs: &[SuperExpr], thetas: &[SuperExpr]) -> Bindings {
        let mut b = Bindings::new(table);
        for (i, e) in xs.iter().enumerate() {
            b.coords[i] = Some(e.clone());
        }
        for (i, e) in thetas.iter().enumerate() {
            b.odds[table.theta_index(i)] = Some(e.clone());
        }
        b
    }
}

impl SuperExpr {
    pub fn zero(table: &Table) -> SuperExpr {
        SuperExpr { table: table.clone(), terms: BTreeMap::new() }
    }

    pub fn one(table: &Table) -> SuperExpr {
        SuperExpr::scalar(table, Scalar::one())
    }

    pub fn int(table: &Table, k: i64) -> SuperExpr {
        SuperExpr::scalar(table, Scalar::int(k))
    }

    pub fn rational(table: &Table, r: &BigRational) -> SuperExpr {
        SuperExpr::scalar(table, Scalar::from_rational(r))
    }

    pub fn scalar(table: &Table, s: Scalar) -> SuperExpr {
        SuperExpr::term(table, OddKey::ONE, s)
    }

    pub fn term(table: &Table, key: OddKey, s: Scalar) -> SuperExpr {
        let mut terms = BTreeMap::new();
        if !s.is_zero() {
            terms.insert(key, s);
        }
        SuperExpr { table: table.clone(), terms }
    }

    pub fn coord(table: &Table, i: usize) -> SuperExpr {
        SuperExpr::scalar(table, Scalar::coord(i))
    }

    pub fn param(table: &Table, i: usize) -> SuperExpr {
        SuperExpr::scalar(table, Scalar::var(Var::param(i)))
    }

    pub fn odd(table: &Table, k: usize) -> SuperExpr {
        SuperExpr::term(table, OddKey(1 << k), Scalar::one())
    }

    pub fn theta(table: &Table, i: usize) -> SuperExpr {
        SuperExpr::odd(table, table.theta_index(i))
    }

    pub fn frame(table: &Table, i: usize) -> SuperExpr {
        SuperExpr::odd(table, table.frame_index(i))
    }

    pub fn aux(table: &Table, i: usize) -> SuperExpr {
        SuperExpr::odd(table, table.aux_index(i))
    }

    /// Product `θ_0 … θ_{n-1}`.
    pub fn theta_top(table: &Table) -> SuperExpr {
        SuperExpr::term(table, OddKey(table.theta_mask()), Scalar::one())
    }

    pub fn table(&self) -> &Table {
        &self.table
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (OddKey, &Scalar)> {
        self.terms.iter().map(|(k, s)| (*k, s))
    }

    pub fn coefficient(&self, key: OddKey) -> Scalar {
        self.terms.get(&key).cloned().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&OddKey::ONE).is_some_and(|s| s.is_one())
    }

    fn check(&self, o: &SuperExpr) -> Result<()> {
        if same_table(&self.table, &o.table) {
            Ok(())
        } else {
            Err(Error::TableMismatch(format!("{} vs {}", self.table, o.table)))
        }
    }

    fn expect_same(&self, o: &SuperExpr) {
        if let Err(e) = self.check(o) {
            panic!("{e}");
        }
    }

    pub fn from_terms(table: &Table, it: impl IntoIterator<Item = (OddKey, Scalar)>) -> SuperExpr {
        let mut e = SuperExpr::zero(table);
        for (k, s) in it {
            e.add_term(k, s);
        }
        e
    }

    /// Sums `c · ζ_{k₁}ζ_{k₂}…` over raw words in odd-generator indices, reordering
    /// each word with its sign; repeated generators give zero.
    pub fn normalize(table: &Table, raw: impl IntoIterator<Item = (Scalar, Vec<usize>)>) -> SuperExpr {
        let mut e = SuperExpr::zero(table);
        'words: for (c, word) in raw {
            let (mut key, mut negative) = (0u64, false);
            for k in word {
                match product_sign(key, 1 << k) {
                    Some(flip) => negative ^= flip,
                    None => continue 'words,
                }
                key |= 1 << k;
            }
            e.add_term(OddKey(key), if negative { c.neg() } else { c });
        }
        e
    }

    fn add_term(&mut self, k: OddKey, s: Scalar) {
        if s.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(k) {
            Entry::Vacant(e) => {
                e.insert(s);
            }
            Entry::Occupied(mut e) => {
                let v = e.get().add(&s);
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn try_add(&self, o: &SuperExpr) -> Result<SuperExpr> {
        self.check(o)?;
        let mut r = self.clone();
        for (k, s) in o.terms.iter() {
            r.add_term(*k, s.clone());
        }
        Ok(r)
    }

    pub fn try_sub(&self, o: &SuperExpr) -> Result<SuperExpr> {
        self.try_add(&o.neg())
    }

    pub fn try_mul(&self, o: &SuperExpr) -> Result<SuperExpr> {
        self.check(o)?;
        let mut r = SuperExpr::zero(&self.table);
        for (ka, sa) in self.terms.iter() {
            for (kb, sb) in o.terms.iter() {
                if let Some(neg) = product_sign(ka.0, kb.0) {
                    let c = sa.mul(sb);
                    r.add_term(OddKey(ka.0 | kb.0), if neg { c.neg() } else { c });
                }
            }
        }
        Ok(r)
    }

    pub fn neg(&self) -> SuperExpr {
        SuperExpr {
            table: self.table.clone(),
            terms: self.terms.iter().map(|(k, s)| (*k, s.neg())).collect(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> SuperExpr {
        if s.is_zero() {
            return SuperExpr::zero(&self.table);
        }
        self.map_coefficients(|c| c.mul(s))
    }

    pub fn scale_rational(&self, r: &BigRational) -> SuperExpr {
        self.scale(&Scalar::from_rational(r))
    }

    pub fn scale_int(&self, k: i64) -> SuperExpr {
        self.scale(&Scalar::int(k))
    }

    pub fn map_coefficients(&self, mut f: impl FnMut(&Scalar) -> Scalar) -> SuperExpr {
        SuperExpr::from_terms(&self.table, self.terms.iter().map(|(k, s)| (*k, f(s))))
    }

    pub fn try_map_coefficients(&self, mut f: impl FnMut(&Scalar) -> Result<Scalar>) -> Result<SuperExpr> {
        let mut out = SuperExpr::zero(&self.table);
        for (k, s) in self.terms.iter() {
            out.add_term(*k, f(s)?);
        }
        Ok(out)
    }

    pub fn filter_terms(&self, mut keep: impl FnMut(OddKey) -> bool) -> SuperExpr {
        SuperExpr {
            table: self.table.clone(),
            terms: self.terms.iter().filter(|(k, _)| keep(**k)).map(|(k, s)| (*k, s.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> SuperExpr {
        let mut acc = SuperExpr::one(&self.table);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn parity(&self) -> Parity {
        let mut even = false;
        let mut odd = false;
        for k in self.terms.keys() {
            if k.len() % 2 == 0 {
                even = true;
            } else {
                odd = true;
            }
        }
        match (even, odd) {
            (_, false) => Parity::Even,
            (false, true) => Parity::Odd,
            _ => Parity::Mixed,
        }
    }

    pub fn is_even(&self) -> bool {
        self.parity() == Parity::Even
    }

    /// True for odd elements and for zero.
    pub fn is_odd(&self) -> bool {
        self.terms.keys().all(|k| k.len() % 2 == 1)
    }

    pub fn even_part(&self) -> SuperExpr {
        self.filter_terms(|k| k.len() % 2 == 0)
    }

    pub fn odd_part(&self) -> SuperExpr {
        self.filter_terms(|k| k.len() % 2 == 1)
    }

    pub fn theta_degree(&self, k: OddKey) -> u32 {
        (k.0 & self.table.theta_mask()).count_ones()
    }

    /// Component of θ-degree `p`; aux and frame odds do not count.
    pub fn homogeneous_part(&self, p: u32) -> SuperExpr {
        let tm = self.table.theta_mask();
        self.filter_terms(|k| (k.0 & tm).count_ones() == p)
    }

    /// Smallest θ-degree present, `None` for zero.
    pub fn min_theta_degree(&self) -> Option<u32> {
        self.terms.keys().map(|k| self.theta_degree(*k)).min()
    }

    pub fn max_theta_degree(&self) -> Option<u32> {
        self.terms.keys().map(|k| self.theta_degree(*k)).max()
    }

    /// Terms free of every odd generator.
    pub fn body(&self) -> Scalar {
        self.coefficient(OddKey::ONE)
    }

    /// Sets every coordinate odd `θ_i` to zero.
    pub fn theta_free_part(&self) -> SuperExpr {
        let tm = self.table.theta_mask();
        self.filter_terms(|k| k.0 & tm == 0)
    }

    pub fn uses_odd_mask(&self, mask: u64) -> bool {
        self.terms.keys().any(|k| k.0 & mask != 0)
    }

    pub fn is_theta_free(&self) -> bool {
        !self.uses_odd_mask(self.table.theta_mask())
    }

    pub fn is_frame_free(&self) -> bool {
        !self.uses_odd_mask(self.table.frame_mask())
    }

    /// Every coefficient is a polynomial in coordinates and parameters.
    pub fn is_polynomial(&self) -> bool {
        self.terms.values().all(|s| s.is_polynomial() && !s.has_jets())
    }

    pub fn has_jets(&self) -> bool {
        self.terms.values().any(|s| s.has_jets())
    }

    /// Total derivative along even coordinate `i`.
    pub fn d_coord(&self, i: usize) -> SuperExpr {
        self.map_coefficients(|s| s.derivative(i))
    }

    /// Partial derivative in parameter `j`.
    pub fn d_param(&self, j: usize) -> SuperExpr {
        let v = Var::param(j);
        self.map_coefficients(|s| s.partial(v))
    }

    /// Left derivative in odd generator `k`.
    pub fn d_odd(&self, k: usize) -> SuperExpr {
        let below = (1u64 << k) - 1;
        SuperExpr::from_terms(
            &self.table,
            self.terms.iter().filter(|(m, _)| m.contains(k)).map(|(m, s)| {
                let neg = (m.0 & below).count_ones() % 2 == 1;
                (OddKey(m.0 & !(1 << k)), if neg { s.neg() } else { s.clone() })
            }),
        )
    }

    /// Right derivative in odd generator `k`.
    pub fn d_odd_right(&self, k: usize) -> SuperExpr {
        SuperExpr::from_terms(
            &self.table,
            self.terms.iter().filter(|(m, _)| m.contains(k)).map(|(m, s)| {
                let above = if k >= 63 { 0 } else { m.0 >> (k + 1) };
                let neg = above.count_ones() % 2 == 1;
                (OddKey(m.0 & !(1 << k)), if neg { s.neg() } else { s.clone() })
            }),
        )
    }

    pub fn d_theta(&self, i: usize) -> SuperExpr {
        self.d_odd(self.table.theta_index(i))
    }

    /// `∫ f dθ_{k_1} … dθ_{k_r}` with `∫ θ_{k_1} … θ_{k_r} = 1`: right derivatives,
    /// last listed generator first.
    pub fn berezin(&self, odds: &[usize]) -> SuperExpr {
        let mut r = self.clone();
        for &k in odds.iter().rev() {
            r = r.d_odd_right(k);
        }
        r
    }

    /// Inverse of an even element with nonzero body.
    pub fn invert_even(&self) -> Result<SuperExpr> {
        if self.parity() != Parity::Even {
            return Err(Error::Parity("inverse requires an even element".into()));
        }
        self.invert_series()
    }

    /// Inverse through the nilpotent series; any parity, body must not vanish.
    pub fn invert_series(&self) -> Result<SuperExpr> {
        let b = self.body();
        if b.is_zero() {
            return Err(Error::NotInvertible("body is zero".into()));
        }
        let binv = b.inv()?;
        let u = self.try_sub(&SuperExpr::scalar(&self.table, b))?.scale(&binv.neg());
        Ok(geometric(&u).scale(&binv))
    }

    /// Square root of an even element whose body is a perfect square; the body root has
    /// positive leading coefficient.
    pub fn sqrt_even(&self) -> Result<SuperExpr> {
        if self.parity() != Parity::Even {
            return Err(Error::Parity("square root requires an even element".into()));
        }
        self.sqrt_series()
    }

    /// Binomial series square root; any parity.
    pub fn sqrt_series(&self) -> Result<SuperExpr> {
        let b = self.body();
        if b.is_zero() {
            return Err(Error::NotInvertible("body is zero".into()));
        }
        let r = b.sqrt().ok_or_else(|| Error::NotSquare(format!("body {}", render_scalar(&b, &self.table))))?;
        let r = if r.leading_sign() < 0 { r.neg() } else { r };
        let u = self.try_sub(&SuperExpr::scalar(&self.table, b.clone()))?.scale(&b.inv()?);
        let mut sum = SuperExpr::one(&self.table);
        let mut power = SuperExpr::one(&self.table);
        let mut coeff = BigRational::one();
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let mut k = 0i64;
        loop {
            power = &power * &u;
            if power.is_zero() {
                break;
            }
            coeff = coeff * (&half - BigRational::from_integer(BigInt::from(k))) / BigRational::from_integer(BigInt::from(k + 1));
            k += 1;
            sum = &sum + &power.scale_rational(&coeff);
        }
        Ok(sum.scale(&r))
    }

    /// Simultaneous substitution of generators; unbound generators stay.
    pub fn substitute(&self, b: &Bindings) -> Result<SuperExpr> {
        let target = &b.table;
        if self.table.n() != target.n()
            || self.table.n_aux() != target.n_aux()
            || self.table.n_functions() != target.n_functions()
            || self.table.n_params() > target.n_params()
        {
            return Err(Error::TableMismatch("substitution between incompatible charts".into()));
        }
        let mut even: Vec<(Var, SuperExpr)> = Vec::new();
        for (i, e) in b.coords.iter().enumerate() {
            if let Some(e) = e {
                even.push((Var::coord(i), e.clone()));
            }
        }
        for (i, e) in b.params.iter().enumerate() {
            if let Some(e) = e {
                even.push((Var::param(i), e.clone()));
            }
        }
        for (_, e) in even.iter() {
            if !same_table(e.table(), target) {
                return Err(Error::TableMismatch("binding over a different chart".into()));
            }
            if !e.is_even() {
                return Err(Error::Parity("even generator bound to a non-even element".into()));
            }
        }
        for e in b.odds.iter().flatten() {
            if !same_table(e.table(), target) {
                return Err(Error::TableMismatch("binding over a different chart".into()));
            }
            if !e.is_odd() {
                return Err(Error::Parity("odd generator bound to a non-odd element".into()));
            }
        }
        let ctx = EvenSubst::new(even, target)?;
        let mut out = SuperExpr::zero(target);
        for (k, s) in self.terms.iter() {
            let mut t = ctx.apply(s)?;
            for idx in k.indices() {
                let y = match &b.odds[idx] {
                    Some(e) => e.clone(),
                    None => SuperExpr::odd(target, idx),
                };
                t = &t * &y;
                if t.is_zero() {
                    break;
                }
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// Same expression over a table with identical generators; parameters used by the
    /// expression must keep their names and positions.
    pub fn retag(&self, table: &Table) -> Result<SuperExpr> {
        let a = &self.table;
        if a.coords() != table.coords()
            || a.thetas() != table.thetas()
            || a.frames() != table.frames()
            || a.auxes() != table.auxes()
            || a.functions() != table.functions()
        {
            return Err(Error::TableMismatch(format!("cannot move {} onto {}", a, table)));
        }
        for (i, name) in a.params().iter().enumerate() {
            let used = self.terms.values().any(|s| s.contains_var(Var::param(i)));
            if used && table.params().get(i) != Some(name) {
                return Err(Error::TableMismatch(format!("parameter `{name}` is not available on {table}")));
            }
        }
        Ok(SuperExpr { table: table.clone(), terms: self.terms.clone() })
    }

    /// Sets coordinate `i` to zero while keeping jets, which then stand for their restrictions.
    pub fn restrict_coord_zero(&self, i: usize) -> Result<SuperExpr> {
        let v = Var::coord(i);
        self.try_map_coefficients(|s| s.compose(&mut |w| if w == v { Some(Scalar::zero()) } else { None }))
    }

    /// Sets odd generator `k` to zero.
    pub fn drop_odd(&self, k: usize) -> SuperExpr {
        self.filter_terms(|m| !m.contains(k))
    }

    /// Exact equality to a constant, θ-free and aux-free.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.is_zero() {
            return Some(BigRational::zero());
        }
        if self.terms.len() != 1 {
            return None;
        }
        self.terms.get(&OddKey::ONE)?.constant()
    }

    pub fn render(&self) -> String {
        self.to_string()
    }
}

/// `Σ_k u^k` for nilpotent `u`.
fn geometric(u: &SuperExpr) -> SuperExpr {
    let mut sum = SuperExpr::one(u.table());
    let mut power = SuperExpr::one(u.table());
    loop {
        power = &power * u;
        if power.is_zero() {
            return sum;
        }
        sum = &sum + &power;
    }
}

/// Substitution of even generators by even elements, with Taylor expansion in the
/// nilpotent parts.
struct EvenSubst {
    table: Table,
    body: Vec<(Var, Scalar)>,
    nil: Vec<(Var, SuperExpr)>,
    identity_coords: bool,
}

impl EvenSubst {
    fn new(bound: Vec<(Var, SuperExpr)>, table: &Table) -> Result<EvenSubst> {
        let mut body = Vec::new();
        let mut nil = Vec::new();
        let mut identity_coords = true;
        for (v, e) in bound {
            let b = e.body();
            let rest = e.try_sub(&SuperExpr::scalar(table, b.clone()))?;
            if matches!(v.kind(), VarKind::Coord(_)) && b != Scalar::var(v) {
                identity_coords = false;
            }
            body.push((v, b));
            if !rest.is_zero() {
                nil.push((v, rest));
            }
        }
        Ok(EvenSubst { table: table.clone(), body, nil, identity_coords })
    }

    fn compose_body(&self, s: &Scalar) -> Result<Scalar> {
        if s.has_jets() && !self.identity_coords {
            return Err(Error::Unsupported(
                "uninterpreted functions only compose with coordinate shifts".into(),
            ));
        }
        s.compose(&mut |v| self.body.iter().find(|(w, _)| *w == v).map(|(_, b)| b.clone()))
    }

    fn apply(&self, s: &Scalar) -> Result<SuperExpr> {
        if self.nil.is_empty() {
            return Ok(SuperExpr::scalar(&self.table, self.compose_body(s)?));
        }
        let mut out = SuperExpr::zero(&self.table);
        self.taylor(0, s, SuperExpr::one(&self.table), BigRational::one(), &mut out)?;
        Ok(out)
    }

    fn taylor(
        &self,
        idx: usize,
        deriv: &Scalar,
        product: SuperExpr,
        inv_fact: BigRational,
        out: &mut SuperExpr,
    ) -> Result<()> {
        if deriv.is_zero() || product.is_zero() {
            return Ok(());
        }
        if idx == self.nil.len() {
            let val = self.compose_body(deriv)?;
            *out = &*out + &product.scale(&val.scale(&inv_fact));
            return Ok(());
        }
        let (v, n) = &self.nil[idx];
        let mut d = deriv.clone();
        let mut p = product;
        let mut f = inv_fact;
        let mut e = 0i64;
        loop {
            self.taylor(idx + 1, &d, p.clone(), f.clone(), out)?;
            p = &p * n;
            if p.is_zero() {
                return Ok(());
            }
            d = match v.kind() {
                VarKind::Coord(i) => d.derivative(i),
                _ => d.partial(*v),
            };
            if d.is_zero() {
                return Ok(());
            }
            e += 1;
            f = f / BigRational::from_integer(BigInt::from(e));
        }
    }
}

impl Add for &SuperExpr {
    type Output = SuperExpr;
    fn add(self, o: &SuperExpr) -> SuperExpr {
        self.expect_same(o);
        self.try_add(o).unwrap()
    }
}

impl Sub for &SuperExpr {
    type Output = SuperExpr;
    fn sub(self, o: &SuperExpr) -> SuperExpr {
        self.expect_same(o);
        self.try_sub(o).unwrap()
    }
}

impl Mul for &SuperExpr {
    type Output = SuperExpr;
    fn mul(self, o: &SuperExpr) -> SuperExpr {
        self.expect_same(o);
        self.try_mul(o).unwrap()
    }
}

impl Neg for &SuperExpr {
    type Output = SuperExpr;
    fn neg(self) -> SuperExpr {
        SuperExpr::neg(self)
    }
}

impl fmt::Debug for SuperExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SuperExpr({self})")
    }
}

fn rational_str(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn monomial_factors(m: &Monomial, table: &Table) -> Vec<String> {
    m.factors()
        .map(|(v, e)| {
            let name = table.var_name(v);
            if e == 1 {
                name
            } else {
                format!("{name}^{e}")
            }
        })
        .collect()
}

/// Signed terms `(negative, body)` in ascending order.
fn poly_terms(p: &Poly, den: &BigInt, table: &Table, odd: &[String]) -> Vec<(bool, String)> {
    p.terms()
        .map(|(m, c)| {
            let r = BigRational::new(c.clone(), den.clone());
            let neg = r.is_negative();
            let a = r.abs();
            let mut factors = monomial_factors(m, table);
            factors.extend(odd.iter().cloned());
            let body = if factors.is_empty() {
                rational_str(&a)
            } else if a.is_one() {
                factors.join("*")
            } else {
                format!("{}*{}", rational_str(&a), factors.join("*"))
            };
            (neg, body)
        })
        .collect()
}

fn join_terms(terms: &[(bool, String)]) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, (neg, body)) in terms.iter().enumerate() {
        match (i, neg) {
            (0, true) => s.push('-'),
            (0, false) => {}
            (_, true) => s.push_str(" - "),
            (_, false) => s.push_str(" + "),
        }
        s.push_str(body);
    }
    s
}

fn scalar_terms(s: &Scalar, table: &Table, odd: &[String]) -> Vec<(bool, String)> {
    if let Some(d) = s.denom().constant_value() {
        return poly_terms(s.numer(), &d, table, odd);
    }
    let one = BigInt::one();
    let num_terms = poly_terms(s.numer(), &one, table, &[]);
    let (neg, num) = if num_terms.len() == 1 {
        (num_terms[0].0, num_terms[0].1.clone())
    } else {
        (false, format!("({})", join_terms(&num_terms)))
    };
    let den_terms = poly_terms(s.denom(), &one, table, &[]);
    let single_var = den_terms.len() == 1
        && s.denom().leading().is_some_and(|(m, c)| c.is_one() && m.degree() == 1);
    let den = if single_var { den_terms[0].1.clone() } else { format!("({})", join_terms(&den_terms)) };
    let mut body = format!("{num}/{den}");
    for o in odd {
        body.push('*');
        body.push_str(o);
    }
    vec![(neg, body)]
}

pub fn render_scalar(s: &Scalar, table: &Table) -> String {
    join_terms(&scalar_terms(s, table, &[]))
}

impl fmt::Display for SuperExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut all = Vec::new();
        for (k, s) in self.terms.iter() {
            let odd: Vec<String> = k.indices().map(|i| self.table.odd_name(i).to_string()).collect();
            all.extend(scalar_terms(s, &self.table, &odd));
        }
        f.write_str(&join_terms(&all))
    }
}
