//! Integer relations among powers of a real algebraic number, found by LLL
//! reduction and then verified exactly. Used to replace a reducible defining
//! polynomial by the minimal polynomial of the root.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::poly::QPoly;
use crate::roots::IsolatedRoot;

fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn gram_schmidt(basis: &[Vec<BigInt>]) -> (Vec<BigRational>, Vec<Vec<BigRational>>) {
    let n = basis.len();
    let rows: Vec<Vec<BigRational>> = basis
        .iter()
        .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect();
    let mut star: Vec<Vec<BigRational>> = Vec::with_capacity(n);
    let mut norms = Vec::with_capacity(n);
    let mut mu = vec![vec![BigRational::zero(); n]; n];
    for i in 0..n {
        let mut v = rows[i].clone();
        for j in 0..i {
            mu[i][j] = if norms[j] == BigRational::zero() {
                BigRational::zero()
            } else {
                dot(&rows[i], &star[j]) / &norms[j]
            };
            for (x, s) in v.iter_mut().zip(&star[j]) {
                *x -= &mu[i][j] * s;
            }
        }
        norms.push(dot(&v, &v));
        star.push(v);
    }
    (norms, mu)
}

fn round(x: &BigRational) -> BigInt {
    (x + BigRational::new(BigInt::one(), BigInt::from(2))).floor().to_integer()
}

/// LLL reduction with `delta = 3/4`, in place.
pub fn lll_reduce(basis: &mut [Vec<BigInt>]) {
    let n = basis.len();
    if n < 2 {
        return;
    }
    let delta = BigRational::new(BigInt::from(3), BigInt::from(4));
    let (mut norms, mut mu) = gram_schmidt(basis);
    let mut k = 1;
    while k < n {
        for j in (0..k).rev() {
            let q = round(&mu[k][j]);
            if q.is_zero() {
                continue;
            }
            let bj = basis[j].clone();
            for (x, y) in basis[k].iter_mut().zip(&bj) {
                *x -= &q * y;
            }
            let qr = BigRational::from_integer(q);
            for i in 0..j {
                let t = &qr * &mu[j][i];
                mu[k][i] -= t;
            }
            mu[k][j] -= &qr;
        }
        let lhs = &norms[k];
        let rhs = (&delta - &mu[k][k - 1] * &mu[k][k - 1]) * &norms[k - 1];
        if *lhs >= rhs {
            k += 1;
        } else {
            basis.swap(k, k - 1);
            (norms, mu) = gram_schmidt(basis);
            k = k.max(2) - 1;
        }
    }
}

/// Dense polynomials over `Z/p`, lowest degree first, no trailing zeros.
mod modp {
    pub type Poly = Vec<u64>;

    pub fn trim(mut a: Poly) -> Poly {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    fn inv(a: u64, p: u64) -> u64 {
        pow(a, p - 2, p)
    }

    fn pow(mut a: u64, mut e: u64, p: u64) -> u64 {
        let mut r = 1;
        a %= p;
        while e > 0 {
            if e & 1 == 1 {
                r = r * a % p;
            }
            a = a * a % p;
            e >>= 1;
        }
        r
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Poly {
        let n = a.len().max(b.len());
        let at = |v: &[u64], i: usize| v.get(i).copied().unwrap_or(0);
        trim((0..n).map(|i| (at(a, i) + p - at(b, i)) % p).collect())
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Poly {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        trim(out)
    }

    /// Quotient and remainder; `b` must be nonzero.
    pub fn div_rem(a: &[u64], b: &[u64], p: u64) -> (Poly, Poly) {
        let mut r = a.to_vec();
        let db = b.len() - 1;
        let li = inv(b[db], p);
        let mut q = vec![0; a.len().saturating_sub(db)];
        while r.len() > db {
            let k = r.len() - 1 - db;
            let c = r[r.len() - 1] * li % p;
            q[k] = c;
            for (i, y) in b.iter().enumerate() {
                r[k + i] = (r[k + i] + p - c * y % p) % p;
            }
            r = trim(r);
        }
        (trim(q), r)
    }

    pub fn rem(a: &[u64], b: &[u64], p: u64) -> Poly {
        div_rem(a, b, p).1
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Poly {
        let (mut a, mut b) = (a.to_vec(), b.to_vec());
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    pub fn derivative(a: &[u64], p: u64) -> Poly {
        trim(a.iter().enumerate().skip(1).map(|(i, c)| (i as u64 % p) * c % p).collect())
    }

    /// `base^e mod f`.
    pub fn pow_mod(base: &[u64], mut e: u64, f: &[u64], p: u64) -> Poly {
        let mut r = vec![1];
        let mut b = rem(base, f, p);
        while e > 0 {
            if e & 1 == 1 {
                r = rem(&mul(&r, &b, p), f, p);
            }
            b = rem(&mul(&b, &b, p), f, p);
            e >>= 1;
        }
        r
    }

    /// Degrees of the irreducible factors of a square-free `f`.
    pub fn factor_degrees(f: &[u64], p: u64) -> Vec<usize> {
        let mut f = f.to_vec();
        let mut out = Vec::new();
        let x = vec![0, 1];
        let mut h = x.clone();
        let mut i = 1;
        while f.len() > 2 * i {
            h = pow_mod(&h, p, &f, p);
            let g = gcd(&sub(&h, &x, p), &f, p);
            let dg = g.len() - 1;
            if dg > 0 {
                out.extend(std::iter::repeat_n(i, dg / i));
                f = div_rem(&f, &g, p).0;
                h = rem(&h, &f, p);
            }
            i += 1;
        }
        if f.len() > 1 {
            out.push(f.len() - 1);
        }
        out
    }
}

const SIEVE_PRIMES: [u64; 12] = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
const SIEVE_GOOD_PRIMES: usize = 6;

/// Degrees a factor over `Q` of the square-free polynomial `p` can have,
/// from its factorisation patterns modulo small primes.
pub fn possible_factor_degrees(p: &QPoly) -> BTreeSet<usize> {
    let ints = p.primitive();
    let n = ints.len().saturating_sub(1);
    let mut possible: BTreeSet<usize> = (0..=n).collect();
    let mut good = 0;
    for &q in &SIEVE_PRIMES {
        let qb = BigInt::from(q);
        let f: modp::Poly = ints.iter().map(|c| c.mod_floor(&qb).to_u64().expect("reduced mod q")).collect();
        if f.len() != ints.len() || f[n] == 0 {
            continue;
        }
        if modp::gcd(&f, &modp::derivative(&f, q), q).len() > 1 {
            continue;
        }
        let mut sums = BTreeSet::from([0usize]);
        for d in modp::factor_degrees(&f, q) {
            let shifted: Vec<usize> = sums.iter().map(|s| s + d).collect();
            sums.extend(shifted);
        }
        possible = possible.intersection(&sums).copied().collect();
        good += 1;
        if good == SIEVE_GOOD_PRIMES {
            break;
        }
    }
    possible
}

/// The lowest-degree factor of the root's polynomial that still vanishes at
/// the root, searched up to `max_degree`; `None` when nothing smaller is found.
pub fn minimal_polynomial(root: &IsolatedRoot, max_degree: usize) -> Option<QPoly> {
    let p = root.poly();
    let n = p.degree()?;
    let coef_bits = p.primitive().iter().map(|c| c.bits()).max().unwrap_or(1);
    let degrees = possible_factor_degrees(&p.square_free_part());
    for d in (1..n.min(max_degree + 1)).filter(|d| degrees.contains(d)) {
        // room for factor coefficients up to the Mignotte bound, times the lattice dimension
        let k = 64 + (d as u64 + 1) * (n as u64 + coef_bits + 16);
        let mut iv = root.clone();
        let eps = BigRational::new(BigInt::one(), BigInt::one() << (k + 32));
        let alpha = match iv.refine(&eps) {
            Some(q) => return Some(QPoly::new(vec![-q, BigRational::one()])),
            None => iv.midpoint(),
        };
        let scale = BigRational::from_integer(BigInt::one() << k);
        let mut power = BigRational::one();
        let mut basis = Vec::with_capacity(d + 1);
        for i in 0..=d {
            let mut row = vec![BigInt::zero(); d + 2];
            row[i] = BigInt::one();
            row[d + 1] = round(&(&power * &scale));
            basis.push(row);
            power *= &alpha;
        }
        lll_reduce(&mut basis);
        for row in &basis {
            let f = QPoly::new(row[..=d].iter().map(|c| BigRational::from_integer(c.clone())).collect());
            if f.degree().unwrap_or(0) == 0 {
                continue;
            }
            if p.rem(&f).is_zero() && root.is_root_of_factor(&f) {
                return Some(f);
            }
        }
    }
    None
}
