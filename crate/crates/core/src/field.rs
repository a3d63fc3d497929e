//! Scalar fields used by the verifiers and exact solvers.
//!
//! A [`Field`] is a context object; elements are plain values. Three
//! instances are provided: `f64` ([`Reals`]), the rationals ([`Rationals`]),
//! and `Q(alpha)` for a real algebraic `alpha` ([`NumberField`]).

use std::cmp::Ordering;
use std::fmt::Debug;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::poly::{int, QPoly};
use crate::relation::minimal_polynomial;
use crate::roots::{AlgebraicScalar, IsolatedRoot};

pub trait Field: Clone + Debug + Send + Sync {
    type Elem: Clone + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_rational(&self, q: &BigRational) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn sign(&self, a: &Self::Elem) -> Ordering;
    fn to_f64(&self, a: &Self::Elem) -> f64;
    /// Exact fields decide equality without tolerance.
    fn is_exact(&self) -> bool;

    fn from_i64(&self, n: i64) -> Self::Elem {
        self.from_rational(&int(n))
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    fn eq(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        self.is_zero(&self.sub(a, b))
    }

    fn is_positive(&self, a: &Self::Elem) -> bool {
        self.sign(a) == Ordering::Greater
    }

    fn sum<'a, I>(&self, items: I) -> Self::Elem
    where
        I: IntoIterator<Item = &'a Self::Elem>,
        Self::Elem: 'a,
    {
        items.into_iter().fold(self.zero(), |acc, x| self.add(&acc, x))
    }

    fn product<'a, I>(&self, items: I) -> Self::Elem
    where
        I: IntoIterator<Item = &'a Self::Elem>,
        Self::Elem: 'a,
    {
        items.into_iter().fold(self.one(), |acc, x| self.mul(&acc, x))
    }

    fn pow(&self, a: &Self::Elem, k: u32) -> Self::Elem {
        (0..k).fold(self.one(), |acc, _| self.mul(&acc, a))
    }
}

/// Double precision reals; `is_zero` is exact comparison with 0.
#[derive(Clone, Copy, Debug, Default)]
pub struct Reals;

impl Field for Reals {
    type Elem = f64;

    fn zero(&self) -> f64 {
        0.0
    }
    fn one(&self) -> f64 {
        1.0
    }
    fn from_rational(&self, q: &BigRational) -> f64 {
        q.to_f64().unwrap_or(f64::NAN)
    }
    fn add(&self, a: &f64, b: &f64) -> f64 {
        a + b
    }
    fn sub(&self, a: &f64, b: &f64) -> f64 {
        a - b
    }
    fn mul(&self, a: &f64, b: &f64) -> f64 {
        a * b
    }
    fn neg(&self, a: &f64) -> f64 {
        -a
    }
    fn inv(&self, a: &f64) -> Result<f64> {
        if *a == 0.0 {
            Err(Error::DivisionByZero)
        } else {
            Ok(1.0 / a)
        }
    }
    fn is_zero(&self, a: &f64) -> bool {
        *a == 0.0
    }
    fn sign(&self, a: &f64) -> Ordering {
        a.partial_cmp(&0.0).unwrap_or(Ordering::Equal)
    }
    fn to_f64(&self, a: &f64) -> f64 {
        *a
    }
    fn is_exact(&self) -> bool {
        false
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_rational(&self, q: &BigRational) -> BigRational {
        q.clone()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> Result<BigRational> {
        if a.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(a.recip())
        }
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn sign(&self, a: &BigRational) -> Ordering {
        a.cmp(&BigRational::zero())
    }
    fn to_f64(&self, a: &BigRational) -> f64 {
        a.to_f64().unwrap_or(f64::NAN)
    }
    fn is_exact(&self) -> bool {
        true
    }
}

/// Largest degree tried when looking for a smaller defining polynomial.
pub const MINIMAL_POLYNOMIAL_SEARCH_DEGREE: usize = 8;

#[derive(Debug)]
struct FieldDef {
    root: AlgebraicScalar,
    modulus: QPoly,
    // a tight copy of the isolating interval, for cheap sign/f64 evaluation
    tight: Option<IsolatedRoot>,
}

/// `Q(alpha)` for a real algebraic `alpha`, elements are polynomials in
/// `alpha` reduced modulo the (square-free, not necessarily irreducible)
/// defining polynomial.
///
/// Zero tests and inverses are decided with a gcd against the modulus plus
/// the isolating interval, so a reducible modulus never yields a wrong answer.
#[derive(Clone, Debug)]
pub struct NumberField {
    def: Arc<FieldDef>,
}

impl NumberField {
    /// The defining polynomial is first cut down to the minimal polynomial
    /// of the root when an exactly verified smaller factor is found.
    pub fn new(root: &AlgebraicScalar) -> Self {
        let reduced = match root {
            AlgebraicScalar::Root(r) if r.poly().degree().unwrap_or(0) > 2 => {
                let (lo, hi) = r.interval();
                minimal_polynomial(r, MINIMAL_POLYNOMIAL_SEARCH_DEGREE)
                    .and_then(|m| IsolatedRoot::new(m, lo.clone(), hi.clone()).ok())
                    .map_or_else(|| root.clone(), AlgebraicScalar::Root)
            }
            _ => root.clone(),
        };
        Self::with_defining_poly(&reduced)
    }

    /// `Q(alpha)` modulo the root's own defining polynomial, reducible or not.
    pub fn with_defining_poly(root: &AlgebraicScalar) -> Self {
        let modulus = root.defining_poly().monic();
        let tight = match root {
            AlgebraicScalar::Rational(_) => None,
            AlgebraicScalar::Root(r) => {
                let mut t = r.clone();
                let eps = BigRational::new(BigInt::one(), BigInt::one() << 80);
                match t.refine(&eps) {
                    // the root turned out rational; the caller's interval was still valid
                    Some(_) => Some(r.clone()),
                    None => Some(t),
                }
            }
        };
        NumberField {
            def: Arc::new(FieldDef {
                root: root.clone(),
                modulus,
                tight,
            }),
        }
    }

    pub fn root(&self) -> &AlgebraicScalar {
        &self.def.root
    }

    pub fn modulus(&self) -> &QPoly {
        &self.def.modulus
    }

    /// The generator `alpha` itself.
    pub fn generator(&self) -> QPoly {
        QPoly::x().rem(&self.def.modulus)
    }

    pub fn embed(&self, p: &QPoly) -> QPoly {
        p.rem(&self.def.modulus)
    }

    fn vanishes(&self, g: &QPoly) -> bool {
        match &self.def.root {
            AlgebraicScalar::Rational(q) => g.eval(q).is_zero(),
            AlgebraicScalar::Root(r) => r.is_root_of_factor(g),
        }
    }

    fn rational_value(&self, a: &QPoly) -> Option<BigRational> {
        match &self.def.root {
            AlgebraicScalar::Rational(q) => Some(a.eval(q)),
            AlgebraicScalar::Root(_) => None,
        }
    }

    /// Rational value of `a` when `a` is a constant (or the root is rational).
    pub fn as_rational(&self, a: &QPoly) -> Option<BigRational> {
        let a = self.embed(a);
        if let Some(q) = self.rational_value(&a) {
            return Some(q);
        }
        if a.is_constant() {
            return Some(a.coeff(0));
        }
        None
    }

    /// Rational within roughly `2^-bits` of the value of `a`, exact when `a` is rational.
    pub fn approx_rational(&self, a: &QPoly, bits: u32) -> BigRational {
        let a = self.embed(a);
        if let Some(q) = self.as_rational(&a) {
            return q;
        }
        let mut iv = self.def.tight.clone().expect("irrational root carries an interval");
        let eps = BigRational::new(BigInt::one(), BigInt::one() << bits);
        match iv.refine(&eps) {
            Some(q) => a.eval(&q),
            None => a.eval(&iv.midpoint()),
        }
    }
}

impl Field for NumberField {
    type Elem = QPoly;

    fn zero(&self) -> QPoly {
        QPoly::zero()
    }
    fn one(&self) -> QPoly {
        QPoly::one()
    }
    fn from_rational(&self, q: &BigRational) -> QPoly {
        QPoly::constant(q.clone())
    }
    fn add(&self, a: &QPoly, b: &QPoly) -> QPoly {
        a + b
    }
    fn sub(&self, a: &QPoly, b: &QPoly) -> QPoly {
        a - b
    }
    fn mul(&self, a: &QPoly, b: &QPoly) -> QPoly {
        (a * b).rem(&self.def.modulus)
    }
    fn neg(&self, a: &QPoly) -> QPoly {
        -a
    }

    fn inv(&self, a: &QPoly) -> Result<QPoly> {
        let a = self.embed(a);
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let g = a.gcd(&self.def.modulus);
        let modulus = if g.is_constant() {
            self.def.modulus.clone()
        } else if self.vanishes(&g) {
            return Err(Error::DivisionByZero);
        } else {
            // alpha is a root of the cofactor; invert there and keep the representative
            self.def.modulus.exact_div(&g)
        };
        let (one, s, _) = a.ext_gcd(&modulus);
        debug_assert!(one == QPoly::one());
        Ok(s.rem(&self.def.modulus))
    }

    fn is_zero(&self, a: &QPoly) -> bool {
        let a = self.embed(a);
        if a.is_zero() {
            return true;
        }
        if let Some(q) = self.rational_value(&a) {
            return q.is_zero();
        }
        if let Some(t) = &self.def.tight {
            let (lo, hi) = t.interval();
            let (vlo, vhi) = a.eval_interval(lo, hi);
            if vlo.is_positive() || vhi.is_negative() {
                return false;
            }
        }
        let g = a.gcd(&self.def.modulus);
        !g.is_constant() && self.vanishes(&g)
    }

    fn sign(&self, a: &QPoly) -> Ordering {
        let a = self.embed(a);
        if let Some(q) = self.rational_value(&a) {
            return q.cmp(&BigRational::zero());
        }
        if self.is_zero(&a) {
            return Ordering::Equal;
        }
        let mut iv = self.def.tight.clone().expect("irrational root carries an interval");
        loop {
            let (lo, hi) = iv.interval();
            let (vlo, vhi) = a.eval_interval(lo, hi);
            if vlo.is_positive() {
                return Ordering::Greater;
            }
            if vhi.is_negative() {
                return Ordering::Less;
            }
            let eps = iv.width() / int(1 << 20);
            if let Some(q) = iv.refine(&eps) {
                return a.eval(&q).cmp(&BigRational::zero());
            }
        }
    }

    fn to_f64(&self, a: &QPoly) -> f64 {
        let a = self.embed(a);
        if let Some(q) = self.rational_value(&a) {
            return q.to_f64().unwrap_or(f64::NAN);
        }
        let iv = self.def.tight.as_ref().expect("irrational root carries an interval");
        a.eval(&iv.midpoint()).to_f64().unwrap_or(f64::NAN)
    }

    fn is_exact(&self) -> bool {
        true
    }
}
