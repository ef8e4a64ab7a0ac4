//! Binomial systems `x^A = c`: normal form and exact-or-numeric solving by
//! Hermite normal form back-substitution.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::{NumericRoot, RootFlag, NEWTON_MAX_ITERS, NEWTON_TOL};
use crate::lattice::{det, hnf, IntMatrix};
use crate::polynomial::{Coefficient, GaussianRational, LaurentSystem};
use crate::{Error, Result};

/// Rows `a_k` of `a` with right-hand sides `c_k`, meaning `x^{a_k} = c_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct BinomialNormalForm {
    pub a: IntMatrix,
    pub c: Vec<Coefficient>,
}

/// Rewrites `c_a x^a + c_b x^b = 0` as `x^{a-b} = -c_b/c_a`.
///
/// Of the two orientations the one with `|c| > 1` is kept; when `|c| = 1` the
/// row's first nonzero entry is made positive.
pub fn binomial_normal_form(s: &LaurentSystem) -> Result<BinomialNormalForm> {
    let mut rows = Vec::with_capacity(s.len());
    let mut cs = Vec::with_capacity(s.len());
    for (i, f) in s.polys().iter().enumerate() {
        if f.num_terms() != 2 {
            return Err(Error::NotBinomial(i + 1, f.num_terms()));
        }
        let mut it = f.terms();
        let (a, ca) = it.next().unwrap();
        let (b, cb) = it.next().unwrap();
        let mut row: Vec<i64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        let mut c = -&(cb * &ca.inv().expect("nonzero coefficient"));
        let flip = match magnitude_vs_one(&c) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => row.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0),
        };
        if flip {
            row.iter_mut().for_each(|x| *x = -*x);
            c = c.inv().expect("nonzero");
        }
        rows.push(row);
        cs.push(c);
    }
    Ok(BinomialNormalForm { a: IntMatrix::from_rows(&rows)?, c: cs })
}

fn magnitude_vs_one(c: &Coefficient) -> std::cmp::Ordering {
    match c.exact() {
        Some(g) => (&g.re * &g.re + &g.im * &g.im).cmp(&BigRational::one()),
        None => c.norm().partial_cmp(&1.0).unwrap_or(std::cmp::Ordering::Equal),
    }
}

/// All `|det B|` solutions of `y^B = c` in the torus.
///
/// With `U·B = H` upper triangular, `y^H = c^U` is solved from the last
/// coordinate up, taking every `H_ii`-th root. When all pivots are one and
/// `c` is exact the roots are exact.
pub fn solve_binomial_square(b: &IntMatrix, c: &[Coefficient]) -> Result<Vec<NumericRoot>> {
    if !b.is_square() {
        return Err(Error::NotSquare { rows: b.rows(), cols: b.cols() });
    }
    let m = b.rows();
    if c.len() != m {
        return Err(Error::DimensionMismatch(format!("{m} rows, {} right-hand sides", c.len())));
    }
    if c.iter().any(|x| x.is_zero()) {
        return Err(Error::Shape("zero right-hand side".into()));
    }
    if det(b)?.is_zero() {
        return Err(Error::Singular);
    }
    let (h, u) = hnf(b);
    let pivots: Vec<i64> = (0..m)
        .map(|i| h[(i, i)].to_i64().ok_or(Error::ExponentOverflow))
        .collect::<Result<_>>()?;
    let exact_ok = pivots.iter().all(|&p| p == 1) && c.iter().all(Coefficient::is_exact);
    if exact_ok {
        if let Some(root) = exact_unimodular(&h, &u, c) {
            return Ok(vec![root]);
        }
    }
    // log of the transformed right-hand sides
    let logc: Vec<Complex64> = c.iter().map(|x| x.value().ln()).collect();
    let rhs: Vec<Complex64> = (0..m)
        .map(|i| (0..m).map(|k| logc[k] * big_to_f64(&u[(i, k)])).sum())
        .collect();
    let mut roots = Vec::new();
    let mut logy = vec![Complex64::new(0.0, 0.0); m];
    back_substitute(&h, &pivots, &rhs, m, &mut logy, &mut roots);
    let b64 = b.to_rows_i64().ok_or(Error::ExponentOverflow)?;
    let cv: Vec<Complex64> = c.iter().map(Coefficient::value).collect();
    Ok(roots.into_iter().map(|y| polish(&b64, &cv, y)).collect())
}

fn big_to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn back_substitute(
    h: &IntMatrix,
    pivots: &[i64],
    rhs: &[Complex64],
    i: usize,
    logy: &mut Vec<Complex64>,
    out: &mut Vec<Vec<Complex64>>,
) {
    if i == 0 {
        out.push(logy.iter().map(|l| l.exp()).collect());
        return;
    }
    let r = i - 1;
    let mut t = rhs[r];
    for j in i..logy.len() {
        t -= logy[j] * big_to_f64(&h[(r, j)]);
    }
    let k = pivots[r];
    for branch in 0..k {
        logy[r] = (t + Complex64::new(0.0, 2.0 * PI * branch as f64)) / k as f64;
        back_substitute(h, pivots, rhs, r, logy, out);
    }
}

fn exact_unimodular(h: &IntMatrix, u: &IntMatrix, c: &[Coefficient]) -> Option<NumericRoot> {
    let m = c.len();
    let small = |x: &BigInt| x.to_i64();
    let mut rhs = Vec::with_capacity(m);
    for i in 0..m {
        let mut acc = Coefficient::one();
        for k in 0..m {
            acc = &acc * &c[k].pow(small(&u[(i, k)])?)?;
        }
        rhs.push(acc);
    }
    let mut y = vec![Coefficient::one(); m];
    for r in (0..m).rev() {
        let mut t = rhs[r].clone();
        for j in r + 1..m {
            t = &t * &y[j].pow(-small(&h[(r, j)])?)?;
        }
        y[r] = t;
    }
    let exact: Vec<GaussianRational> = y.iter().map(|x| x.exact().cloned()).collect::<Option<_>>()?;
    Some(NumericRoot {
        coords: y.iter().map(Coefficient::value).collect(),
        exact: Some(exact),
        residual: 0.0,
        slack: None,
        flag: RootFlag::Regular,
    })
}

fn binomial_residual(b: &[Vec<i64>], c: &[Complex64], y: &[Complex64]) -> Vec<Complex64> {
    b.iter()
        .zip(c)
        .map(|(row, ck)| row.iter().zip(y).fold(Complex64::new(1.0, 0.0), |a, (&e, yj)| a * yj.powi(e as i32)) - ck)
        .collect()
}

/// Newton steps on `y^B - c`.
fn polish(b: &[Vec<i64>], c: &[Complex64], mut y: Vec<Complex64>) -> NumericRoot {
    let m = y.len();
    for _ in 0..NEWTON_MAX_ITERS {
        let f = binomial_residual(b, c, &y);
        if f.iter().all(|z| z.norm() < NEWTON_TOL * 1e-2) {
            break;
        }
        let mut j = DMatrix::zeros(m, m);
        for (i, row) in b.iter().enumerate() {
            let mono = f[i] + c[i];
            for (k, &e) in row.iter().enumerate() {
                if e != 0 {
                    j[(i, k)] = mono * e as f64 / y[k];
                }
            }
        }
        let Some(dy) = j.lu().solve(&DVector::from_iterator(m, f.iter().map(|z| -z))) else {
            break;
        };
        let step = dy.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for k in 0..m {
            y[k] += dy[k];
        }
        if step < 1e-16 * y.iter().map(|z| z.norm()).fold(1.0, f64::max) {
            break;
        }
    }
    let residual = binomial_residual(b, c, &y).iter().map(|z| z.norm()).fold(0.0, f64::max);
    NumericRoot::numeric(y, residual, RootFlag::Regular)
}
