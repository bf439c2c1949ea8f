//! Seeded random samples for verification suites and property tests.

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::flows::{exp_flow, FlowTime};
use crate::bv::VolumeForm;
use crate::forms::DifferentialForm;
use crate::superalgebra::{Bindings, Monomial, OddKey, Parity, Poly, Scalar, SuperExpr, Table, Var};
use crate::symplectic::SuperMap;

/// Size limits for generated data.
#[derive(Clone, Copy, Debug)]
pub struct Limits {
    pub degree: u32,
    pub terms: usize,
    pub coeff: i64,
}

impl Default for Limits {
    fn default() -> Limits {
        Limits { degree: 3, terms: 3, coeff: 3 }
    }
}

pub struct Sampler {
    pub rng: ChaCha8Rng,
    pub limits: Limits,
}

impl Sampler {
    pub fn new(seed: u64) -> Sampler {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed), limits: Limits::default() }
    }

    fn coeff(&mut self) -> i64 {
        let c = self.limits.coeff;
        loop {
            let v = self.rng.gen_range(-c..=c);
            if v != 0 {
                return v;
            }
        }
    }

    /// Polynomial in the listed coordinates with total degree at most `degree`.
    pub fn poly_in(&mut self, coords: &[usize], degree: u32, terms: usize) -> Poly {
        let mut p = Poly::zero();
        for _ in 0..terms {
            let mut m = Monomial::one();
            if !coords.is_empty() {
                let d = self.rng.gen_range(0..=degree);
                for _ in 0..d {
                    let i = *coords.choose(&mut self.rng).unwrap();
                    m = m.mul(&Monomial::var(Var::coord(i)));
                }
            }
            p = p.add(&Poly::term(self.coeff().into(), m));
        }
        p
    }

    pub fn poly(&mut self, t: &Table) -> Scalar {
        let coords: Vec<usize> = (0..t.n()).collect();
        let (d, k) = (self.limits.degree, self.limits.terms);
        Scalar::from_poly(self.poly_in(&coords, d, k))
    }

    /// Random odd-generator key among `mask` with the requested parity of its length.
    fn key(&mut self, mask: u64, parity: u32, min_len: u32) -> Option<OddKey> {
        let bits: Vec<usize> = (0..64).filter(|k| mask >> k & 1 == 1).collect();
        for _ in 0..32 {
            let mut k = 0u64;
            for &b in &bits {
                if self.rng.gen_bool(0.5) {
                    k |= 1 << b;
                }
            }
            if k.count_ones() % 2 == parity && k.count_ones() >= min_len {
                return Some(OddKey(k));
            }
        }
        None
    }

    /// Homogeneous element in `(x, θ, aux)` whose θ-degree is at least `min_theta`.
    pub fn expr_with(&mut self, t: &Table, parity: Parity, min_theta: u32) -> SuperExpr {
        let p = parity.bit().unwrap_or(0);
        let mask = t.theta_mask() | t.aux_mask();
        let mut e = SuperExpr::zero(t);
        for _ in 0..self.limits.terms {
            if let Some(k) = self.key(mask, p, 0) {
                if (k.0 & t.theta_mask()).count_ones() >= min_theta {
                    let c = self.poly(t);
                    e = &e + &SuperExpr::term(t, k, c);
                }
            }
        }
        e
    }

    pub fn expr(&mut self, t: &Table, parity: Parity) -> SuperExpr {
        self.expr_with(t, parity, 0)
    }

    pub fn parity(&mut self) -> Parity {
        if self.rng.gen_bool(0.5) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Element in `(x, aux)` only.
    pub fn aux_valued(&mut self, t: &Table, parity: Parity) -> SuperExpr {
        let p = parity.bit().unwrap_or(0);
        let mut e = SuperExpr::zero(t);
        for _ in 0..self.limits.terms {
            if let Some(k) = self.key(t.aux_mask(), p, 0) {
                let c = self.poly(t);
                e = &e + &SuperExpr::term(t, k, c);
            }
        }
        e
    }

    /// Form with polynomial coefficients in `x` and aux odds; components of random
    /// coefficient parity per frame monomial.
    pub fn form(&mut self, t: &Table) -> DifferentialForm {
        let mut e = SuperExpr::zero(t);
        for _ in 0..self.limits.terms + 1 {
            let par = self.rng.gen_range(0..2);
            let frame = self.key(t.frame_mask(), par, 0).unwrap_or(OddKey::ONE);
            let c = if t.n_aux() > 0 && self.rng.gen_bool(0.5) {
                self.aux_valued(t, Parity::Odd)
            } else {
                SuperExpr::scalar(t, self.poly(t))
            };
            e = &e + &(&c * &SuperExpr::term(t, frame, Scalar::one()));
        }
        DifferentialForm::new(e).unwrap()
    }

    /// Vector field components in `x` (and aux odds of even total parity).
    pub fn vector_field(&mut self, t: &Table) -> Vec<SuperExpr> {
        (0..t.n()).map(|_| self.aux_valued(t, Parity::Even)).collect()
    }

    /// `ρ = σ²` with `σ` even, body a polynomial with positive constant term.
    pub fn volume(&mut self, t: &Table) -> VolumeForm {
        let sigma = self.root_density(t);
        VolumeForm::new(&sigma * &sigma).unwrap()
    }

    /// Even `σ` with body `k + x_i²`-type polynomial, nonvanishing on the reals.
    pub fn root_density(&mut self, t: &Table) -> SuperExpr {
        let k = self.rng.gen_range(1..=3);
        let mut body = SuperExpr::int(t, k);
        if t.n() > 0 && self.rng.gen_bool(0.5) {
            let i = self.rng.gen_range(0..t.n());
            let xi = SuperExpr::coord(t, i);
            body = &body + &(&xi * &xi);
        }
        &body + &self.expr_with(t, Parity::Even, 1)
    }

    /// Point map with triangular polynomial body and its polynomial inverse.
    pub fn point_map(&mut self, t: &Table) -> Result<SuperMap> {
        let n = t.n();
        let mut body: Vec<SuperExpr> = (0..n).map(|i| SuperExpr::coord(t, i)).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut self.rng);
        let mut stages = Vec::new();
        for (pos, &i) in order.iter().enumerate() {
            let rest: Vec<usize> = order[pos + 1..].to_vec();
            let shift = if rest.is_empty() {
                Poly::constant(self.rng.gen_range(-2..=2).into())
            } else {
                self.poly_in(&rest, 2, 2)
            };
            let scale: i64 = [1, -1, 2][self.rng.gen_range(0..3)];
            stages.push((i, scale, Scalar::from_poly(shift)));
        }
        // x̃_i = scale·x_i + shift(later coordinates): triangular, inverted by back substitution.
        for &(i, scale, ref shift) in &stages {
            body[i] = &SuperExpr::coord(t, i).scale_int(scale) + &SuperExpr::scalar(t, shift.clone());
        }
        let mut inverse: Vec<Option<SuperExpr>> = vec![None; n];
        for &(i, scale, ref shift) in stages.iter().rev() {
            let b = Bindings::from_coordinates(
                t,
                &(0..n).map(|j| inverse[j].clone().unwrap_or_else(|| SuperExpr::coord(t, j))).collect::<Vec<_>>(),
                &[],
            );
            let sh = SuperExpr::scalar(t, shift.clone()).substitute(&b)?;
            let inv = (&SuperExpr::coord(t, i) - &sh).scale_rational(&BigRational::new(1.into(), scale.into()));
            inverse[i] = Some(inv);
        }
        let inverse: Vec<SuperExpr> = inverse.into_iter().map(|e| e.unwrap()).collect();
        SuperMap::point(t, body, inverse)
    }

    /// Special map `θ̃ = θ + ∂φ` with odd `φ(x)`.
    pub fn special_map(&mut self, t: &Table) -> Result<SuperMap> {
        let phi = self.aux_valued(t, Parity::Odd);
        let psi: Vec<SuperExpr> = (0..t.n()).map(|i| phi.d_coord(i)).collect();
        SuperMap::special(t, psi)
    }

    /// Odd generator with θ-degree at least two.
    pub fn generator(&mut self, t: &Table) -> SuperExpr {
        self.expr_with(t, Parity::Odd, 2)
    }

    /// Time-one flow of a random generator.
    pub fn adjusted_flow(&mut self, t: &Table) -> Result<(SuperExpr, SuperMap)> {
        let q = self.generator(t);
        let one = FlowTime::Value(BigRational::from_integer(1.into()));
        let f = exp_flow(&q, &one)?;
        Ok((q, f))
    }

    /// Canonical map from one of the three factor classes.
    pub fn canonical_map(&mut self, t: &Table) -> Result<SuperMap> {
        match self.rng.gen_range(0..3) {
            0 => self.point_map(t),
            1 => self.special_map(t),
            _ => Ok(self.adjusted_flow(t)?.1),
        }
    }

    /// Invertible map with identity body that is generally not canonical.
    pub fn messy_map(&mut self, t: &Table) -> Result<SuperMap> {
        let n = t.n();
        let mut targets = Vec::with_capacity(2 * n);
        for i in 0..n {
            let nil = self.expr_with(t, Parity::Even, 1);
            targets.push(&SuperExpr::coord(t, i) + &nil);
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut self.rng);
        for j in 0..n {
            let mut th = SuperExpr::theta(t, j);
            let pos = order.iter().position(|&o| o == j).unwrap();
            for &m in &order[pos + 1..] {
                if self.rng.gen_bool(0.5) {
                    let c = Scalar::from_poly(self.poly_in(&(0..n).collect::<Vec<_>>(), 1, 1));
                    th = &th + &(&SuperExpr::scalar(t, c) * &SuperExpr::theta(t, m));
                }
            }
            let extra = self.expr_with(t, Parity::Odd, 0).filter_terms(|k| (k.0 & t.theta_mask()).count_ones() != 1);
            targets.push(&th + &extra);
        }
        SuperMap::new(t, targets, None)
    }
}
