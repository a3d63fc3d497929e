//! Dense linear algebra: exact elimination over a [`Field`], fraction-free
//! determinants over `Q[x]`, and tolerance-based kernels in `f64`.

use minilp::{ComparisonOp, OptimizationDirection, Problem};

use crate::field::Field;
use crate::poly::QPoly;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref<F: Field>(f: &F, m: &mut [Vec<F::Elem>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !f.is_zero(&m[i][c])) else {
            continue;
        };
        m.swap(r, p);
        let inv = f.inv(&m[r][c]).expect("pivot is nonzero");
        for j in c..cols {
            m[r][j] = f.mul(&m[r][j], &inv);
        }
        for i in 0..rows {
            if i == r || f.is_zero(&m[i][c]) {
                continue;
            }
            let factor = m[i][c].clone();
            for j in c..cols {
                let t = f.mul(&factor, &m[r][j]);
                m[i][j] = f.sub(&m[i][j], &t);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<F: Field>(f: &F, m: &[Vec<F::Elem>]) -> usize {
    let mut m = m.to_vec();
    rref(f, &mut m).len()
}

/// Basis of the right kernel `{x : m x = 0}`, one vector per free column.
pub fn kernel<F: Field>(f: &F, m: &[Vec<F::Elem>], cols: usize) -> Vec<Vec<F::Elem>> {
    let mut m = m.to_vec();
    let pivots = rref(f, &mut m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![f.zero(); cols];
            v[fc] = f.one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(&m[r][fc]);
            }
            v
        })
        .collect()
}

/// Determinant by Gaussian elimination over the field.
pub fn det<F: Field>(f: &F, m: &[Vec<F::Elem>]) -> F::Elem {
    let n = m.len();
    let mut m = m.to_vec();
    let mut d = f.one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !f.is_zero(&m[i][c])) else {
            return f.zero();
        };
        if p != c {
            m.swap(p, c);
            d = f.neg(&d);
        }
        d = f.mul(&d, &m[c][c]);
        let inv = f.inv(&m[c][c]).expect("pivot is nonzero");
        for i in c + 1..n {
            if f.is_zero(&m[i][c]) {
                continue;
            }
            let factor = f.mul(&m[i][c], &inv);
            for j in c..n {
                let t = f.mul(&factor, &m[c][j]);
                m[i][j] = f.sub(&m[i][j], &t);
            }
        }
    }
    d
}

/// Exact determinant of a polynomial matrix by Bareiss fraction-free elimination.
pub fn det_poly(m: &[Vec<QPoly>]) -> QPoly {
    let n = m.len();
    if n == 0 {
        return QPoly::one();
    }
    let mut a = m.to_vec();
    let mut sign = false;
    let mut prev = QPoly::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return QPoly::zero();
            };
            a.swap(k, p);
            sign = !sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num.exact_div(&prev);
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign {
        -d
    } else {
        d
    }
}

/// Evaluate a polynomial matrix at `x` inside a field, the generator being `x`.
pub fn eval_poly_matrix<F: Field>(f: &F, m: &[Vec<QPoly>], x: &F::Elem) -> Vec<Vec<F::Elem>> {
    m.iter()
        .map(|row| {
            row.iter()
                .map(|p| {
                    p.coeffs().iter().rev().fold(f.zero(), |acc, c| {
                        f.add(&f.mul(&acc, x), &f.from_rational(c))
                    })
                })
                .collect()
        })
        .collect()
}

/// Kernel basis in floating point. A pivot counts as zero when it is below
/// `tol` times the largest entry of the matrix (or `tol` for a zero matrix).
pub fn kernel_f64(m: &[Vec<f64>], cols: usize, tol: f64) -> Vec<Vec<f64>> {
    let mut a = m.to_vec();
    let rows = a.len();
    let scale = a
        .iter()
        .flatten()
        .fold(0.0f64, |acc, x| acc.max(x.abs()))
        .max(1.0);
    let thresh = tol * scale;
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let (p, best) = (r..rows)
            .map(|i| (i, a[i][c].abs()))
            .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= thresh {
            for row in a.iter_mut().skip(r) {
                row[c] = 0.0;
            }
            continue;
        }
        a.swap(r, p);
        let piv = a[r][c];
        for j in c..cols {
            a[r][j] /= piv;
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let factor = a[i][c];
            if factor != 0.0 {
                for j in c..cols {
                    a[i][j] -= factor * a[r][j];
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|fc| {
            let mut v = vec![0.0; cols];
            v[fc] = 1.0;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[r][fc];
            }
            v
        })
        .collect()
}

/// Maximise the smallest component of `sum_k c_k basis[k]` subject to every
/// component being at most 1. Returns the optimal vector and its minimum.
pub fn max_min_combination(basis: &[Vec<f64>]) -> Option<(Vec<f64>, f64)> {
    let n = basis.first()?.len();
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let t = lp.add_var(1.0, (f64::NEG_INFINITY, 1.0));
    let cs: Vec<_> = basis
        .iter()
        .map(|_| lp.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY)))
        .collect();
    for i in 0..n {
        let row: Vec<_> = cs.iter().zip(basis).map(|(&c, b)| (c, b[i])).collect();
        let mut lower = row.clone();
        lower.push((t, -1.0));
        lp.add_constraint(lower.as_slice(), ComparisonOp::Ge, 0.0);
        lp.add_constraint(row.as_slice(), ComparisonOp::Le, 1.0);
    }
    let sol = lp.solve().ok()?;
    let v: Vec<f64> = (0..n)
        .map(|i| cs.iter().zip(basis).map(|(&c, b)| sol[c] * b[i]).sum())
        .collect();
    Some((v, sol[t]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rationals;
    use crate::poly::{int, rat};
    use num_rational::BigRational;

    fn q(rows: &[&[i64]]) -> Vec<Vec<BigRational>> {
        rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    #[test]
    fn exact_kernel_and_rank() {
        let m = q(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank(&Rationals, &m), 2);
        let k = kernel(&Rationals, &m, 3);
        assert_eq!(k, vec![vec![int(-1), int(-1), int(1)]]);
    }

    #[test]
    fn det_matches_cofactor_expansion() {
        let m = q(&[&[2, -1, 0], &[1, 3, 4], &[0, 5, -2]]);
        // 2(-6-20) + 1(-2-0) = -54
        assert_eq!(det(&Rationals, &m), int(-54));
    }

    #[test]
    fn bareiss_cycle_matrix() {
        // x * (3-cycle adjacency) - I has determinant x^3 - 1
        let x = QPoly::x();
        let z = QPoly::zero();
        let mi = -QPoly::one();
        let m = vec![
            vec![mi.clone(), x.clone(), z.clone()],
            vec![z.clone(), mi.clone(), x.clone()],
            vec![x.clone(), z.clone(), mi.clone()],
        ];
        assert_eq!(det_poly(&m), QPoly::from_ints(&[-1, 0, 0, 1]));
        let at = eval_poly_matrix(&Rationals, &m, &rat(1, 2));
        assert_eq!(det(&Rationals, &at), rat(-7, 8));
    }

    #[test]
    fn bareiss_needs_pivoting() {
        let o = QPoly::one();
        let z = QPoly::zero();
        let m = vec![vec![z.clone(), o.clone()], vec![o.clone(), z.clone()]];
        assert_eq!(det_poly(&m), -QPoly::one());
    }

    #[test]
    fn float_kernel_and_lp() {
        let m = vec![vec![1.0, -1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0, -1.0]];
        let k = kernel_f64(&m, 4, 1e-12);
        assert_eq!(k.len(), 2);
        let (v, t) = max_min_combination(&k).unwrap();
        assert!((t - 1.0).abs() < 1e-9);
        assert!(v.iter().all(|x| (x - 1.0).abs() < 1e-9));
    }

    #[test]
    fn lp_detects_no_positive_vector() {
        // over the span of (1, -1) the best minimum is 0, attained at c = 0
        let (_, t) = max_min_combination(&[vec![1.0, -1.0]]).unwrap();
        assert!(t.abs() < 1e-12);
    }
}
