//! Rational functions of the even generators.

use std::collections::HashMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::poly::{EvalRing, Monomial, Poly};
use super::symbols::{Var, VarKind};
use crate::error::{Error, Result};

/// `num / den` with integer coefficients, no common factor, and a
/// denominator whose graded-lex leading coefficient is positive.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Scalar {
    num: Poly,
    den: Poly,
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl Scalar {
    pub fn zero() -> Scalar {
        Scalar { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Scalar {
        Scalar { num: Poly::one(), den: Poly::one() }
    }

    pub fn int(k: i64) -> Scalar {
        Scalar::from_poly(Poly::constant(BigInt::from(k)))
    }

    pub fn from_bigint(k: BigInt) -> Scalar {
        Scalar::from_poly(Poly::constant(k))
    }

    pub fn ratio(p: i64, q: i64) -> Scalar {
        Scalar::from_rational(&BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn from_rational(r: &BigRational) -> Scalar {
        Scalar::new(Poly::constant(r.numer().clone()), Poly::constant(r.denom().clone()))
            .expect("rational has nonzero denominator")
    }

    pub fn from_poly(p: Poly) -> Scalar {
        Scalar { num: p, den: Poly::one() }
    }

    pub fn var(v: Var) -> Scalar {
        Scalar::from_poly(Poly::var(v))
    }

    pub fn coord(i: usize) -> Scalar {
        Scalar::var(Var::coord(i))
    }

    /// Reduces `num / den` to canonical form.
    pub fn new(num: Poly, den: Poly) -> Result<Scalar> {
        if den.is_zero() {
            return Err(Error::NotInvertible("division by zero".into()));
        }
        if num.is_zero() {
            return Ok(Scalar::zero());
        }
        let (mut num, mut den) = if let Some(d) = den.constant_value() {
            let g = num.content().gcd(&d);
            if g.is_one() {
                (num, den)
            } else {
                (num.div_int(&g).unwrap(), Poly::constant(d / g))
            }
        } else {
            let g = num.gcd(&den);
            if g.is_one() {
                (num, den)
            } else {
                (num.div_exact(&g).expect("gcd divides"), den.div_exact(&g).expect("gcd divides"))
            }
        };
        if den.leading_coeff().is_negative() {
            num = num.neg();
            den = den.neg();
        }
        Ok(Scalar { num, den })
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    /// Value when the scalar is a rational constant.
    pub fn constant(&self) -> Option<BigRational> {
        let n = self.num.constant_value()?;
        let d = self.den.constant_value()?;
        Some(BigRational::new(n, d))
    }

    pub fn has_jets(&self) -> bool {
        self.num.has_jets() || self.den.has_jets()
    }

    pub fn depends_on_coords(&self) -> bool {
        self.num.depends_on_coords() || self.den.depends_on_coords()
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.num.contains_var(v) || self.den.contains_var(v)
    }

    pub fn add(&self, o: &Scalar) -> Scalar {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            return Scalar::new(self.num.add(&o.num), self.den.clone()).unwrap();
        }
        if let (Some(a), Some(b)) = (self.den.constant_value(), o.den.constant_value()) {
            let l = a.lcm(&b);
            let num = self.num.scale(&(&l / &a)).add(&o.num.scale(&(&l / &b)));
            return Scalar::new(num, Poly::constant(l)).unwrap();
        }
        let num = self.num.mul(&o.den).add(&o.num.mul(&self.den));
        Scalar::new(num, self.den.mul(&o.den)).unwrap()
    }

    pub fn sub(&self, o: &Scalar) -> Scalar {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Scalar {
        Scalar { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn mul(&self, o: &Scalar) -> Scalar {
        if self.is_zero() || o.is_zero() {
            return Scalar::zero();
        }
        if self.den.is_one() && o.den.is_one() {
            return Scalar::from_poly(self.num.mul(&o.num));
        }
        Scalar::new(self.num.mul(&o.num), self.den.mul(&o.den)).unwrap()
    }

    pub fn scale(&self, r: &BigRational) -> Scalar {
        self.mul(&Scalar::from_rational(r))
    }

    pub fn inv(&self) -> Result<Scalar> {
        Scalar::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, o: &Scalar) -> Result<Scalar> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, e: u32) -> Scalar {
        Scalar { num: self.num.pow(e), den: self.den.pow(e) }
    }

    /// Total derivative along coordinate `i`.
    pub fn derivative(&self, i: usize) -> Scalar {
        let dn = self.num.derivative(i);
        if self.den.is_constant() {
            return Scalar::new(dn, self.den.clone()).unwrap();
        }
        let dd = self.den.derivative(i);
        let num = dn.mul(&self.den).sub(&self.num.mul(&dd));
        Scalar::new(num, self.den.mul(&self.den)).unwrap()
    }

    /// Partial derivative in one generator, jets treated as independent.
    pub fn partial(&self, v: Var) -> Scalar {
        let dn = self.num.partial(v);
        if !self.den.contains_var(v) {
            return Scalar::new(dn, self.den.clone()).unwrap();
        }
        let dd = self.den.partial(v);
        let num = dn.mul(&self.den).sub(&self.num.mul(&dd));
        Scalar::new(num, self.den.mul(&self.den)).unwrap()
    }

    /// Antiderivative in `v` vanishing at `v = 0`; the denominator must not involve `v`.
    pub fn integrate(&self, v: Var) -> Result<Scalar> {
        if self.den.contains_var(v) {
            return Err(Error::Unsupported("integrand is not polynomial in the integration variable".into()));
        }
        let num = self.num.map_terms(|_, c| c.clone());
        let coeffs = num.to_univariate(v);
        let mut acc = Scalar::zero();
        let mut l = BigInt::one();
        for k in 1..=coeffs.len() {
            l = l.lcm(&BigInt::from(k));
        }
        let mut total = Poly::zero();
        for (a, c) in coeffs.iter().enumerate() {
            let factor = &l / BigInt::from(a + 1);
            total = total.add(&c.mul_term(&factor, &Monomial::pow_of(v, a as u32 + 1)));
        }
        acc = acc.add(&Scalar::new(total, self.den.scale(&l))?);
        Ok(acc)
    }

    /// Substitutes generators; `f` returns `None` to keep a generator.
    pub fn compose(&self, f: &mut dyn FnMut(Var) -> Option<Scalar>) -> Result<Scalar> {
        let mut g = |v: Var| f(v).unwrap_or_else(|| Scalar::var(v));
        let n = self.num.eval_in(&mut g);
        let d = self.den.eval_in(&mut g);
        if d.is_zero() {
            return Err(Error::NotInvertible("denominator vanishes under substitution".into()));
        }
        n.div(&d)
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, point: &HashMap<Var, BigRational>) -> Result<BigRational> {
        let mut missing = None;
        let mut f = |v: Var| match point.get(&v) {
            Some(r) => RationalRing(r.clone()),
            None => {
                missing = Some(v);
                RationalRing(BigRational::zero())
            }
        };
        let n = self.num.eval_in(&mut f).0;
        let d = self.den.eval_in(&mut f).0;
        if let Some(v) = missing {
            return Err(Error::Input(format!("no value for generator {v:?}")));
        }
        if d.is_zero() {
            return Err(Error::NotInvertible("denominator vanishes at the point".into()));
        }
        Ok(n / d)
    }

    /// Square root with positive leading coefficient, when one exists.
    pub fn sqrt(&self) -> Option<Scalar> {
        let n = self.num.sqrt();
        let d = self.den.sqrt();
        match (n, d) {
            (Some(n), Some(d)) => Scalar::new(n, d).ok(),
            _ => {
                // 2/8 has no integer root pair but 8/2 = 4 after scaling by the denominator.
                let n2 = self.num.mul(&self.den).sqrt()?;
                Scalar::new(n2, self.den.clone()).ok()
            }
        }
    }

    /// Sign of the graded-lex leading coefficient of the numerator.
    pub fn leading_sign(&self) -> i32 {
        let c = self.num.leading_coeff();
        if c.is_positive() {
            1
        } else if c.is_negative() {
            -1
        } else {
            0
        }
    }

    /// Keeps only coordinate-free pieces, used to detect parameter-only scalars.
    pub fn coords_free(&self) -> bool {
        !self.num.vars().into_iter().chain(self.den.vars()).any(|v| !matches!(v.kind(), VarKind::Param(_)))
    }

    /// Multiplies each numerator monomial by a rational factor depending on it.
    pub fn map_numerator(&self, f: impl Fn(&Monomial) -> BigRational) -> Result<Scalar> {
        let mut acc = Scalar::zero();
        for (m, c) in self.num.terms() {
            let r = f(m) * BigRational::from_integer(c.clone());
            acc = acc.add(&Scalar::from_rational(&r).mul(&Scalar::from_poly(Poly::term(BigInt::one(), m.clone()))));
        }
        acc.div(&Scalar::from_poly(self.den.clone()))
    }
}

#[derive(Clone)]
struct RationalRing(BigRational);

impl EvalRing for RationalRing {
    fn zero() -> Self {
        RationalRing(BigRational::zero())
    }
    fn one() -> Self {
        RationalRing(BigRational::one())
    }
    fn from_int(c: &BigInt) -> Self {
        RationalRing(BigRational::from_integer(c.clone()))
    }
    fn add(&self, o: &Self) -> Self {
        RationalRing(&self.0 + &o.0)
    }
    fn mul(&self, o: &Self) -> Self {
        RationalRing(&self.0 * &o.0)
    }
}

impl EvalRing for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn one() -> Self {
        Scalar::one()
    }
    fn from_int(c: &BigInt) -> Self {
        Scalar::from_bigint(c.clone())
    }
    fn add(&self, o: &Self) -> Self {
        Scalar::add(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        Scalar::mul(self, o)
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        Scalar::add(self, o)
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        Scalar::sub(self, o)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        Scalar::mul(self, o)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::neg(self)
    }
}
