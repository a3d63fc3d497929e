//! Exact isolation of positive real roots via Sturm sequences.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::poly::{int, QPoly};

/// A real number known exactly: a rational, or the unique root of a square-free
/// rational polynomial inside an isolating open interval `(lo, hi)`.
#[derive(Clone, PartialEq)]
pub enum AlgebraicScalar {
    Rational(BigRational),
    Root(IsolatedRoot),
}

#[derive(Clone, PartialEq, Debug)]
pub struct IsolatedRoot {
    poly: QPoly,
    lo: BigRational,
    hi: BigRational,
}

impl IsolatedRoot {
    /// `poly` must be square-free with exactly one root in `(lo, hi)` and no
    /// root at either endpoint.
    pub fn new(poly: QPoly, lo: BigRational, hi: BigRational) -> Result<Self> {
        if poly.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let root = IsolatedRoot { poly, lo, hi };
        let slo = root.poly.sign_at(&root.lo);
        let shi = root.poly.sign_at(&root.hi);
        if slo == Ordering::Equal || shi == Ordering::Equal || slo == shi {
            return Err(Error::Parse(format!(
                "interval ({}, {}) does not isolate a simple root of {}",
                root.lo, root.hi, root.poly
            )));
        }
        Ok(root)
    }

    pub fn poly(&self) -> &QPoly {
        &self.poly
    }

    pub fn interval(&self) -> (&BigRational, &BigRational) {
        (&self.lo, &self.hi)
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    /// Bisect until the interval is no wider than `eps`. Returns the exact
    /// rational if a midpoint hits the root.
    pub fn refine(&mut self, eps: &BigRational) -> Option<BigRational> {
        let two = int(2);
        let s_lo = self.poly.sign_at(&self.lo);
        while self.width() > *eps {
            let mid = (&self.lo + &self.hi) / &two;
            match self.poly.sign_at(&mid) {
                Ordering::Equal => return Some(mid),
                s if s == s_lo => self.lo = mid,
                _ => self.hi = mid,
            }
        }
        None
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / int(2)
    }

    /// Whether the root of this interval is also a root of `q`.
    ///
    /// Requires `q | poly`, so `q` has at most this one root in the interval
    /// and it is simple.
    pub fn is_root_of_factor(&self, q: &QPoly) -> bool {
        if q.degree().unwrap_or(0) == 0 {
            return false;
        }
        let a = q.sign_at(&self.lo);
        let b = q.sign_at(&self.hi);
        a != Ordering::Equal && b != Ordering::Equal && a != b
    }
}

impl AlgebraicScalar {
    pub fn to_f64(&self) -> f64 {
        match self {
            AlgebraicScalar::Rational(q) => q.to_f64().unwrap_or(f64::NAN),
            AlgebraicScalar::Root(r) => {
                let mut r = r.clone();
                match r.refine(&BigRational::new(BigInt::one(), BigInt::one() << 64)) {
                    Some(q) => q.to_f64().unwrap_or(f64::NAN),
                    None => r.midpoint().to_f64().unwrap_or(f64::NAN),
                }
            }
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            AlgebraicScalar::Rational(q) => Some(q),
            AlgebraicScalar::Root(_) => None,
        }
    }

    /// Defining polynomial: `x - q` for rationals.
    pub fn defining_poly(&self) -> QPoly {
        match self {
            AlgebraicScalar::Rational(q) => QPoly::new(vec![-q.clone(), BigRational::one()]),
            AlgebraicScalar::Root(r) => r.poly.clone(),
        }
    }

    /// Isolating interval; degenerate `[q, q]` for rationals.
    pub fn interval(&self) -> (BigRational, BigRational) {
        match self {
            AlgebraicScalar::Rational(q) => (q.clone(), q.clone()),
            AlgebraicScalar::Root(r) => (r.lo.clone(), r.hi.clone()),
        }
    }

    pub fn width(&self) -> BigRational {
        let (lo, hi) = self.interval();
        hi - lo
    }

    /// Drive the interval width below `eps`; may discover the root is rational.
    pub fn refine(&mut self, eps: &BigRational) {
        if let AlgebraicScalar::Root(r) = self {
            if let Some(q) = r.refine(eps) {
                *self = AlgebraicScalar::Rational(q);
            }
        }
    }
}

impl fmt::Debug for AlgebraicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraicScalar::Rational(q) => write!(f, "{q}"),
            AlgebraicScalar::Root(r) => write!(
                f,
                "root of {} in ({}, {}) ~ {}",
                r.poly,
                r.lo,
                r.hi,
                self.to_f64()
            ),
        }
    }
}

impl fmt::Display for AlgebraicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

pub fn sturm_chain(p: &QPoly) -> Vec<QPoly> {
    let mut chain = vec![p.clone(), p.derivative()];
    loop {
        let n = chain.len();
        if chain[n - 1].is_zero() {
            chain.pop();
            break;
        }
        let r = chain[n - 2].rem(&chain[n - 1]);
        if r.is_zero() {
            break;
        }
        chain.push(-r);
    }
    chain
}

fn sign_variations(chain: &[QPoly], x: &BigRational) -> usize {
    let mut last = Ordering::Equal;
    let mut count = 0;
    for p in chain {
        let s = p.sign_at(x);
        if s == Ordering::Equal {
            continue;
        }
        if last != Ordering::Equal && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

/// Number of distinct real roots in the half-open interval `(a, b]`.
pub fn count_roots(chain: &[QPoly], a: &BigRational, b: &BigRational) -> usize {
    sign_variations(chain, a).saturating_sub(sign_variations(chain, b))
}

/// Cauchy bound: every root has modulus strictly below the returned value.
pub fn root_bound(p: &QPoly) -> BigRational {
    let lc = p.leading().abs();
    let max = p
        .coeffs()
        .iter()
        .take(p.coeffs().len().saturating_sub(1))
        .map(|c| c.abs() / &lc)
        .max()
        .unwrap_or_else(BigRational::zero);
    max + BigRational::one()
}

/// Simplest rational (smallest denominator) in the closed interval `[lo, hi]`, `0 < lo <= hi`.
pub fn simplest_rational(lo: &BigRational, hi: &BigRational) -> BigRational {
    let fl = lo.floor();
    if fl == *lo {
        return fl;
    }
    let next = &fl + BigRational::one();
    if next <= *hi {
        return next;
    }
    let inner = simplest_rational(&(hi - &fl).recip(), &(lo - &fl).recip());
    fl + inner.recip()
}

/// All strictly positive real roots of `p`, sorted, each isolated to an
/// interval of width at most `eps`. Rational roots come back exact.
pub fn positive_roots(p: &QPoly, eps: f64) -> Result<Vec<AlgebraicScalar>> {
    isolate_positive_roots(p, eps, true)
}

/// As [`positive_roots`], but rational roots are only recognised when a
/// bisection midpoint hits them. Meant for polynomials whose coefficients
/// are themselves rounded, where exact rational detection is meaningless
/// and expensive.
pub fn positive_roots_approx(p: &QPoly, eps: f64) -> Result<Vec<AlgebraicScalar>> {
    isolate_positive_roots(p, eps, false)
}

fn isolate_positive_roots(p: &QPoly, eps: f64, detect_rationals: bool) -> Result<Vec<AlgebraicScalar>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let eps = BigRational::from_float(eps)
        .filter(|e| e.is_positive())
        .ok_or_else(|| Error::Parse(format!("precision {eps}")))?;
    let mut s = p.square_free_part();
    // drop the root at zero, it is not positive
    while s.coeff(0).is_zero() && !s.is_zero() && s.degree().unwrap() > 0 {
        s = s.exact_div(&QPoly::x());
    }
    let mut found: Vec<AlgebraicScalar> = Vec::new();
    'restart: loop {
        if s.degree().unwrap_or(0) == 0 {
            break;
        }
        let chain = sturm_chain(&s);
        let bound = root_bound(&s);
        let mut stack = vec![(BigRational::zero(), bound)];
        let mut isolated = Vec::new();
        while let Some((a, b)) = stack.pop() {
            match count_roots(&chain, &a, &b) {
                0 => {}
                1 => isolated.push((a, b)),
                _ => {
                    let mid = (&a + &b) / int(2);
                    if s.eval(&mid).is_zero() {
                        found.push(AlgebraicScalar::Rational(mid.clone()));
                        s = s.exact_div(&QPoly::new(vec![-mid, BigRational::one()]));
                        continue 'restart;
                    }
                    stack.push((mid.clone(), b));
                    stack.push((a, mid));
                }
            }
        }
        for (a, b) in isolated {
            if s.eval(&b).is_zero() {
                found.push(AlgebraicScalar::Rational(b));
                continue;
            }
            let mut root = IsolatedRoot::new(s.clone(), a, b)?;
            found.push(if detect_rationals {
                finish_root(&mut root, &eps)
            } else {
                match root.refine(&eps) {
                    Some(q) => AlgebraicScalar::Rational(q),
                    None => AlgebraicScalar::Root(root),
                }
            });
        }
        break;
    }
    found.sort_by(|x, y| x.to_f64().partial_cmp(&y.to_f64()).unwrap_or(Ordering::Equal));
    Ok(found)
}

fn finish_root(root: &mut IsolatedRoot, eps: &BigRational) -> AlgebraicScalar {
    if let Some(q) = root.refine(eps) {
        return AlgebraicScalar::Rational(q);
    }
    // A rational root p/q of the primitive integer form has q | leading coefficient;
    // once the interval is narrower than 1/(2 lc^2) the simplest rational inside is
    // the only candidate.
    let lc = root.poly.primitive().last().cloned().unwrap_or_else(BigInt::one);
    let lc = BigRational::from_integer(lc.abs());
    let fine = (&lc * &lc * int(2)).recip();
    if let Some(q) = root.refine(&fine) {
        return AlgebraicScalar::Rational(q);
    }
    let candidate = simplest_rational(&root.lo, &root.hi);
    if root.poly.eval(&candidate).is_zero() {
        return AlgebraicScalar::Rational(candidate);
    }
    AlgebraicScalar::Root(root.clone())
}
