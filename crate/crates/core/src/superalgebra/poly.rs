//! Sparse multivariate polynomials over the integers.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use super::symbols::{Var, VarKind};

/// Product of powers of even generators, sorted by generator.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(SmallVec<[(Var, u32); 4]>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(SmallVec::new())
    }

    pub fn var(v: Var) -> Monomial {
        Self::pow_of(v, 1)
    }

    pub fn pow_of(v: Var, e: u32) -> Monomial {
        let mut s = SmallVec::new();
        if e > 0 {
            s.push((v, e));
        }
        Monomial(s)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exp(&self, v: Var) -> u32 {
        self.0.iter().find(|(w, _)| *w == v).map(|&(_, e)| e).unwrap_or(0)
    }

    pub fn factors(&self) -> impl Iterator<Item = (Var, u32)> + '_ {
        self.0.iter().copied()
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let mut out: SmallVec<[(Var, u32); 4]> = SmallVec::with_capacity(self.0.len() + o.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < o.0.len() {
            let (a, b) = (self.0[i], o.0[j]);
            match a.0.cmp(&b.0) {
                Ordering::Less => {
                    out.push(a);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a.0, a.1 + b.1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&o.0[j..]);
        Monomial(out)
    }

    /// `self / o` when `o` divides `self`.
    pub fn div(&self, o: &Monomial) -> Option<Monomial> {
        let mut out = SmallVec::new();
        let mut j = 0;
        for &(v, e) in self.0.iter() {
            if j < o.0.len() && o.0[j].0 < v {
                return None;
            }
            if j < o.0.len() && o.0[j].0 == v {
                let f = o.0[j].1;
                j += 1;
                match e.cmp(&f) {
                    Ordering::Less => return None,
                    Ordering::Equal => {}
                    Ordering::Greater => out.push((v, e - f)),
                }
            } else {
                out.push((v, e));
            }
        }
        if j < o.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    /// Splits off the power of `v`.
    pub fn split(&self, v: Var) -> (u32, Monomial) {
        let mut e = 0;
        let rest = self
            .0
            .iter()
            .copied()
            .filter(|&(w, f)| {
                if w == v {
                    e = f;
                    false
                } else {
                    true
                }
            })
            .collect();
        (e, Monomial(rest))
    }
}

impl Ord for Monomial {
    /// Graded lexicographic order, earlier generators weigh more.
    fn cmp(&self, o: &Monomial) -> Ordering {
        match self.degree().cmp(&o.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        for (a, b) in self.0.iter().zip(o.0.iter()) {
            if a.0 != b.0 {
                return if a.0 < b.0 { Ordering::Greater } else { Ordering::Less };
            }
            if a.1 != b.1 {
                return a.1.cmp(&b.1);
            }
        }
        self.0.len().cmp(&o.0.len())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Monomial) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Polynomial in the even generators with integer coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigInt>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn one() -> Poly {
        Poly::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Poly {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(Monomial::one(), c);
        }
        p
    }

    pub fn var(v: Var) -> Poly {
        Poly::term(BigInt::one(), Monomial::var(v))
    }

    pub fn term(c: BigInt, m: Monomial) -> Poly {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&Monomial::one()).is_some_and(|c| c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.contains_key(&Monomial::one()))
    }

    pub fn constant_value(&self) -> Option<BigInt> {
        if self.is_zero() {
            Some(BigInt::zero())
        } else if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn constant_term(&self) -> BigInt {
        self.terms.get(&Monomial::one()).cloned().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn leading(&self) -> Option<(&Monomial, &BigInt)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> BigInt {
        self.leading().map(|(_, c)| c.clone()).unwrap_or_default()
    }

    pub fn total_degree(&self) -> u32 {
        self.leading().map(|(m, _)| m.degree()).unwrap_or(0)
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut r = self.clone();
        for (m, c) in o.terms.iter() {
            r.add_term(m.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let mut r = self.clone();
        for (m, c) in o.terms.iter() {
            r.add_term(m.clone(), -c);
        }
        r
    }

    pub fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = self.constant_value() {
            return o.scale(&c);
        }
        if let Some(c) = o.constant_value() {
            return self.scale(&c);
        }
        let mut r = Poly::zero();
        for (ma, ca) in self.terms.iter() {
            for (mb, cb) in o.terms.iter() {
                r.add_term(ma.mul(mb), ca * cb);
            }
        }
        r
    }

    pub fn scale(&self, c: &BigInt) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    pub fn mul_term(&self, c: &BigInt, m: &Monomial) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(k, x)| (k.mul(m), x * c)).collect() }
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Exact division of every coefficient by an integer.
    pub fn div_int(&self, c: &BigInt) -> Option<Poly> {
        let mut terms = BTreeMap::new();
        for (m, x) in self.terms.iter() {
            let (q, r) = x.div_rem(c);
            if !r.is_zero() {
                return None;
            }
            terms.insert(m.clone(), q);
        }
        Some(Poly { terms })
    }

    /// Total derivative along coordinate `i`; jets pick up one more index.
    pub fn derivative(&self, i: usize) -> Poly {
        let xi = Var::coord(i);
        let mut r = Poly::zero();
        for (m, c) in self.terms.iter() {
            for (v, e) in m.factors() {
                let (_, rest) = m.split(v);
                let lowered = rest.mul(&Monomial::pow_of(v, e - 1));
                if v == xi {
                    r.add_term(lowered, c * BigInt::from(e));
                } else if let Some(w) = v.jet_derivative(i) {
                    r.add_term(lowered.mul(&Monomial::var(w)), c * BigInt::from(e));
                }
            }
        }
        r
    }

    /// Partial derivative in a single generator, every other generator held fixed.
    pub fn partial(&self, v: Var) -> Poly {
        let mut r = Poly::zero();
        for (m, c) in self.terms.iter() {
            let (e, rest) = m.split(v);
            if e > 0 {
                r.add_term(rest.mul(&Monomial::pow_of(v, e - 1)), c * BigInt::from(e));
            }
        }
        r
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms.keys().flat_map(|m| m.factors().map(|(v, _)| v)).collect()
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.terms.keys().any(|m| m.exp(v) > 0)
    }

    pub fn has_jets(&self) -> bool {
        self.terms.keys().any(|m| m.factors().any(|(v, _)| v.is_jet()))
    }

    pub fn depends_on_coords(&self) -> bool {
        self.terms.keys().any(|m| {
            m.factors().any(|(v, _)| matches!(v.kind(), VarKind::Coord(_) | VarKind::Jet { .. }))
        })
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exp(v)).max().unwrap_or(0)
    }

    /// Non-negative gcd of the coefficients.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Coefficients in `v`, indexed by degree, trailing zeros trimmed.
    pub fn to_univariate(&self, v: Var) -> Vec<Poly> {
        let mut out: Vec<Poly> = vec![Poly::zero(); self.degree_in(v) as usize + 1];
        for (m, c) in self.terms.iter() {
            let (e, rest) = m.split(v);
            out[e as usize].add_term(rest, c.clone());
        }
        trim(&mut out);
        out
    }

    /// Coefficients of `self` as a polynomial in the variables outside `keep`.
    pub fn coefficients_outside(&self, keep: &BTreeSet<Var>) -> Vec<Poly> {
        let mut groups: BTreeMap<Monomial, Poly> = BTreeMap::new();
        for (m, c) in self.terms.iter() {
            let (inside, outside): (SmallVec<[(Var, u32); 4]>, SmallVec<[(Var, u32); 4]>) =
                m.0.iter().copied().partition(|(v, _)| keep.contains(v));
            groups.entry(Monomial(outside)).or_default().add_term(Monomial(inside), c.clone());
        }
        groups.into_values().collect()
    }

    pub fn from_univariate(v: Var, coeffs: &[Poly]) -> Poly {
        let mut r = Poly::zero();
        for (e, c) in coeffs.iter().enumerate() {
            r = r.add(&c.mul_term(&BigInt::one(), &Monomial::pow_of(v, e as u32)));
        }
        r
    }

    /// `self / d` when the division is exact.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() {
            return None;
        }
        if let Some(c) = d.constant_value() {
            return self.div_int(&c);
        }
        let (lm, lc) = d.leading().map(|(m, c)| (m.clone(), c.clone()))?;
        let mut q = Poly::zero();
        let mut r = self.clone();
        while let Some((rm, rc)) = r.leading().map(|(m, c)| (m.clone(), c.clone())) {
            let m = rm.div(&lm)?;
            let (c, rem) = rc.div_rem(&lc);
            if !rem.is_zero() {
                return None;
            }
            r = r.sub(&d.mul_term(&c, &m));
            q.add_term(m, c);
        }
        Some(q)
    }

    /// Greatest common divisor with positive leading coefficient.
    pub fn gcd(&self, o: &Poly) -> Poly {
        normalize_sign(gcd_rec(self, o))
    }

    /// Square root with positive leading coefficient when `self` is a perfect square.
    pub fn sqrt(&self) -> Option<Poly> {
        if self.is_zero() {
            return Some(Poly::zero());
        }
        let (lm, lc) = self.leading().map(|(m, c)| (m.clone(), c.clone()))?;
        if lc.is_negative() {
            return None;
        }
        let root_c = lc.sqrt();
        if &root_c * &root_c != lc {
            return None;
        }
        let mut root_m = SmallVec::new();
        for (v, e) in lm.factors() {
            if e % 2 != 0 {
                return None;
            }
            root_m.push((v, e / 2));
        }
        let lead = (Monomial(root_m), root_c);
        let mut q = Poly::term(lead.1.clone(), lead.0.clone());
        let two_lead_c = &lead.1 * 2;
        let max_deg = self.total_degree() / 2;
        loop {
            let r = self.sub(&q.mul(&q));
            let Some((rm, rc)) = r.leading().map(|(m, c)| (m.clone(), c.clone())) else {
                return Some(q);
            };
            let m = rm.div(&lead.0)?;
            let (c, rem) = rc.div_rem(&two_lead_c);
            if !rem.is_zero() || m.degree() > max_deg || m >= lead.0 {
                return None;
            }
            q.add_term(m, c);
        }
    }

    /// Evaluation homomorphism into any commutative ring.
    pub fn eval_in<R: EvalRing>(&self, f: &mut dyn FnMut(Var) -> R) -> R {
        let mut cache: HashMap<Var, Vec<R>> = HashMap::new();
        let mut acc = R::zero();
        for (m, c) in self.terms.iter() {
            let mut t = R::from_int(c);
            for (v, e) in m.factors() {
                let powers = cache.entry(v).or_insert_with(|| vec![R::one(), f(v)]);
                while powers.len() <= e as usize {
                    let next = powers.last().unwrap().mul(&powers[1]);
                    powers.push(next);
                }
                t = t.mul(&powers[e as usize]);
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Replaces per-monomial coefficients, used to scale homogeneous pieces.
    pub fn map_terms(&self, mut f: impl FnMut(&Monomial, &BigInt) -> BigInt) -> Poly {
        let mut r = Poly::zero();
        for (m, c) in self.terms.iter() {
            r.add_term(m.clone(), f(m, c));
        }
        r
    }
}

/// Minimal ring interface for [`Poly::eval_in`].
pub trait EvalRing: Clone {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(c: &BigInt) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
}

impl EvalRing for Poly {
    fn zero() -> Self {
        Poly::zero()
    }
    fn one() -> Self {
        Poly::one()
    }
    fn from_int(c: &BigInt) -> Self {
        Poly::constant(c.clone())
    }
    fn add(&self, o: &Self) -> Self {
        Poly::add(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        Poly::mul(self, o)
    }
}

fn trim(v: &mut Vec<Poly>) {
    while v.last().is_some_and(|p| p.is_zero()) {
        v.pop();
    }
}

fn normalize_sign(p: Poly) -> Poly {
    if p.leading_coeff().is_negative() {
        p.neg()
    } else {
        p
    }
}

fn gcd_rec(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::constant(a.content().gcd(&b.content()));
    }
    if a == b {
        return a.clone();
    }
    let va = a.vars();
    let vb = b.vars();
    if va.is_disjoint(&vb) {
        return Poly::constant(a.content().gcd(&b.content()));
    }
    // A common factor only involves variables of both sides: fold the smaller side
    // through the coefficients of the larger one over its extra variables.
    if va.is_subset(&vb) && va != vb {
        return gcd_fold(a, &b.coefficients_outside(&va));
    }
    if vb.is_subset(&va) && va != vb {
        return gcd_fold(b, &a.coefficients_outside(&vb));
    }
    let v = *va.union(&vb).max().unwrap();
    if !va.contains(&v) {
        return gcd_fold(a, &b.to_univariate(v));
    }
    if !vb.contains(&v) {
        return gcd_fold(b, &a.to_univariate(v));
    }
    let ua = a.to_univariate(v);
    let ub = b.to_univariate(v);
    let ca = uni_content(&ua);
    let cb = uni_content(&ub);
    let pa = uni_div(&ua, &ca);
    let pb = uni_div(&ub, &cb);
    let c = gcd_rec(&ca, &cb);
    let g = primitive_prs(pa, pb);
    Poly::from_univariate(v, &g).mul(&c)
}

/// `gcd(a, c_0, c_1, …)`, starting from the side that is free of the main variable.
fn gcd_fold(a: &Poly, coeffs: &[Poly]) -> Poly {
    let mut g = a.clone();
    for c in coeffs {
        g = gcd_rec(&g, c);
        if g.is_constant() && g.content().is_one() {
            return Poly::one();
        }
    }
    normalize_sign(g)
}

fn uni_content(u: &[Poly]) -> Poly {
    let mut g = Poly::zero();
    for c in u {
        g = gcd_rec(&g, c);
        if g.is_constant() && g.content().is_one() {
            return Poly::one();
        }
    }
    normalize_sign(g)
}

fn uni_div(u: &[Poly], c: &Poly) -> Vec<Poly> {
    u.iter().map(|x| x.div_exact(c).expect("content divides coefficients")).collect()
}

fn uni_primitive(u: &[Poly]) -> Vec<Poly> {
    let c = uni_content(u);
    let mut p = uni_div(u, &c);
    if p.last().is_some_and(|l| l.leading_coeff().is_negative()) {
        p = p.iter().map(Poly::neg).collect();
    }
    p
}

fn primitive_prs(mut p: Vec<Poly>, mut q: Vec<Poly>) -> Vec<Poly> {
    if p.len() < q.len() {
        std::mem::swap(&mut p, &mut q);
    }
    loop {
        let r = prem(&p, &q);
        if r.is_empty() {
            return uni_primitive(&q);
        }
        if r.len() == 1 {
            return vec![Poly::one()];
        }
        p = q;
        q = uni_primitive(&r);
    }
}

fn prem(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r = a.to_vec();
    while !r.is_empty() && r.len() > db {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        for x in r.iter_mut() {
            *x = x.mul(lb);
        }
        for (j, bj) in b.iter().enumerate() {
            let k = j + dr - db;
            r[k] = r[k].sub(&lr.mul(bj));
        }
        trim(&mut r);
    }
    r
}
