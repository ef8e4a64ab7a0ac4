//! Exact integer linear algebra on arbitrary-precision entries.
//!
//! Everything here works over `BigInt`/`BigRational`; no floating point is
//! involved, so kernels, determinants and unimodular completions are exact.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Integer vector, typically an exponent vector or a direction.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntVector(pub Vec<BigInt>);

impl IntVector {
    pub fn from_i64s(entries: &[i64]) -> Self {
        IntVector(entries.iter().map(|&e| BigInt::from(e)).collect())
    }

    pub fn zeros(n: usize) -> Self {
        IntVector(vec![BigInt::zero(); n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// Entries as machine integers, `None` if any entry does not fit.
    pub fn to_i64s(&self) -> Option<Vec<i64>> {
        self.0.iter().map(ToPrimitive::to_i64).collect()
    }

    /// gcd of the absolute values of the entries (0 for the zero vector).
    pub fn content(&self) -> BigInt {
        self.0.iter().fold(BigInt::zero(), |g, e| g.gcd(e))
    }

    pub fn is_primitive(&self) -> bool {
        self.content().is_one()
    }

    pub fn dot(&self, other: &IntVector) -> BigInt {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn neg(&self) -> IntVector {
        IntVector(self.0.iter().map(|e| -e).collect())
    }

    pub fn sub(&self, other: &IntVector) -> IntVector {
        IntVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

impl fmt::Display for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// Dense row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows of machine integers. All rows must have the
    /// same length.
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(IntMatrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().map(|&e| BigInt::from(e)).collect(),
        })
    }

    pub fn from_vectors(rows: &[IntVector]) -> Result<Self> {
        let cols = rows.first().map_or(0, IntVector::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(IntMatrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flat_map(|r| r.0.iter().cloned()).collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> IntVector {
        IntVector(self.data[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn col(&self, j: usize) -> IntVector {
        IntVector((0..self.rows).map(|i| self[(i, j)].clone()).collect())
    }

    pub fn to_rows_i64(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows).map(|i| self.row(i).to_i64s()).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// `self · v`.
    pub fn mul_vec(&self, v: &IntVector) -> Result<IntVector> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok(IntVector((0..self.rows).map(|i| self.row(i).dot(v)).collect()))
    }

    /// Row vector times matrix, `aᵀ · self`.
    pub fn vec_mul(&self, a: &IntVector) -> Result<IntVector> {
        if self.rows != a.len() {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} times {}x{}",
                a.len(),
                self.rows,
                self.cols
            )));
        }
        Ok(IntVector(
            (0..self.cols)
                .map(|j| (0..self.rows).map(|i| &a.0[i] * &self[(i, j)]).sum())
                .collect(),
        ))
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Drops column `j`.
    pub fn without_col(&self, j: usize) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.rows, self.cols - 1);
        for i in 0..self.rows {
            let mut c = 0;
            for k in 0..self.cols {
                if k != j {
                    out[(i, c)] = self[(i, k)].clone();
                    c += 1;
                }
            }
        }
        out
    }

    pub fn is_unimodular(&self) -> bool {
        matches!(det(self), Ok(d) if d.abs().is_one())
    }

    /// Exact inverse of a unimodular matrix.
    pub fn inverse_unimodular(&self) -> Result<IntMatrix> {
        let d = det(self)?;
        if !d.abs().is_one() {
            return Err(Error::Singular);
        }
        let n = self.rows;
        let mut aug: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                (0..2 * n)
                    .map(|j| {
                        if j < n {
                            BigRational::from_integer(self[(i, j)].clone())
                        } else if j - n == i {
                            BigRational::one()
                        } else {
                            BigRational::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        gauss_jordan(&mut aug, n);
        let mut inv = IntMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let q = &aug[i][n + j];
                debug_assert!(q.is_integer());
                inv[(i, j)] = q.to_integer();
            }
        }
        Ok(inv)
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// Divides `v` by the gcd of its entries; signs are kept.
pub fn gcd_normalize(v: &IntVector) -> Result<IntVector> {
    let g = v.content();
    if g.is_zero() {
        return Err(Error::ZeroDirection);
    }
    Ok(IntVector(v.0.iter().map(|e| e / &g).collect()))
}

/// Negates `v` when its first nonzero entry is negative.
pub fn sign_normalize_first(v: &IntVector) -> Result<IntVector> {
    match v.0.iter().find(|e| !e.is_zero()) {
        None => Err(Error::ZeroDirection),
        Some(e) if e.is_negative() => Ok(v.neg()),
        Some(_) => Ok(v.clone()),
    }
}

/// Primitive and sign-normalized representative of the ray through `v`.
pub fn normalize_direction(v: &IntVector) -> Result<IntVector> {
    sign_normalize_first(&gcd_normalize(v)?)
}

/// Primitive integer vector on the ray through a rational vector.
pub fn primitive_from_rationals(v: &[BigRational]) -> Result<IntVector> {
    let den = v.iter().fold(BigInt::one(), |l, q| l.lcm(q.denom()));
    let ints = IntVector(v.iter().map(|q| (q * &den).to_integer()).collect());
    gcd_normalize(&ints)
}

fn gauss_jordan(rows: &mut [Vec<BigRational>], ncols: usize) -> Vec<usize> {
    let m = rows.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m {
            break;
        }
        let Some(p) = (r..m).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..m {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                let (head, tail) = rows.split_at_mut(i.max(r));
                let (pivot_row, target) = if i < r {
                    (&tail[0], &mut head[i])
                } else {
                    (&head[r], &mut tail[0])
                };
                for (x, y) in target.iter_mut().zip(pivot_row.iter()) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

fn rational_rows(a: &IntMatrix) -> Vec<Vec<BigRational>> {
    (0..a.rows())
        .map(|i| {
            (0..a.cols())
                .map(|j| BigRational::from_integer(a[(i, j)].clone()))
                .collect()
        })
        .collect()
}

pub fn rank(a: &IntMatrix) -> usize {
    let mut rows = rational_rows(a);
    gauss_jordan(&mut rows, a.cols()).len()
}

/// Basis of the rational kernel of `a`, each vector primitive.
pub fn kernel_basis(a: &IntMatrix) -> Vec<IntVector> {
    let n = a.cols();
    let mut rows = rational_rows(a);
    let pivots = gauss_jordan(&mut rows, n);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); n];
            v[f] = BigRational::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -rows[r][f].clone();
            }
            primitive_from_rationals(&v).expect("kernel vector is nonzero")
        })
        .collect()
}

/// The primitive, sign-normalized generator of the kernel of a rank `n-1`
/// matrix with `n` columns.
pub fn kernel_primitive(a: &IntMatrix) -> Result<IntVector> {
    let basis = kernel_basis(a);
    if basis.len() != 1 {
        return Err(Error::RankDeficient);
    }
    sign_normalize_first(&basis[0])
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn det(a: &IntMatrix) -> Result<BigInt> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut m = a.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[(k, k)].is_zero() {
            match (k + 1..n).find(|&i| !m[(i, k)].is_zero()) {
                Some(p) => {
                    m.swap_rows(k, p);
                    sign = -sign;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[(i, j)] * &m[(k, k)] - &m[(i, k)] * &m[(k, j)];
                m[(i, j)] = v / &prev;
            }
        }
        prev = m[(k, k)].clone();
    }
    Ok(sign * &m[(n - 1, n - 1)])
}

/// Returns `(g, s, t)` with `s·a + t·b = g = gcd(a, b) ≥ 0`.
pub fn extended_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (BigInt::one(), BigInt::zero());
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while !r1.is_zero() {
        let q = r0.div_floor(&r1);
        let r2 = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, r2);
        let s2 = &s0 - &q * &s1;
        s0 = std::mem::replace(&mut s1, s2);
        let t2 = &t0 - &q * &t1;
        t0 = std::mem::replace(&mut t1, t2);
    }
    if r0.is_negative() {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Square unimodular matrix whose first column is the primitive vector `v`.
///
/// When `v` has an entry of absolute value one the completion uses unit
/// columns around that pivot (so `v = (1, …)` gives `[v | e2 | … | en]`),
/// otherwise an extended-gcd sweep. The result has determinant +1 except for
/// the 1x1 case `v = (-1)`.
pub fn unimodular_with_first_column(v: &IntVector) -> Result<IntMatrix> {
    let n = v.len();
    if n == 0 || v.is_zero() {
        return Err(Error::ZeroDirection);
    }
    let g = v.content();
    if !g.is_one() {
        return Err(Error::NotPrimitive(g.to_string()));
    }
    let mut m = if let Some(p) = v.0.iter().position(|e| e.abs().is_one()) {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, 0)] = v.0[i].clone();
        }
        for (c, k) in (0..n).filter(|&k| k != p).enumerate() {
            m[(k, c + 1)] = BigInt::one();
        }
        m
    } else {
        // Reduce v to e1 by 2x2 unimodular row operations G, keeping track of
        // the product of the inverses, which then has v as first column.
        let mut w = v.0.clone();
        let mut inv = IntMatrix::identity(n);
        for j in (1..n).rev() {
            if w[j].is_zero() {
                continue;
            }
            let i = j - 1;
            let (g, s, t) = extended_gcd(&w[i], &w[j]);
            let (x, y) = (&w[i] / &g, &w[j] / &g);
            // G = [[s, t], [-y, x]], G^{-1} = [[x, -t], [y, s]]
            for r in 0..n {
                let a = inv[(r, i)].clone();
                let b = inv[(r, j)].clone();
                inv[(r, i)] = &a * &x + &b * &y;
                inv[(r, j)] = -(&a * &t) + &b * &s;
            }
            w[i] = g;
            w[j] = BigInt::zero();
        }
        if w[0].is_negative() {
            // first column currently equals -v
            for r in 0..n {
                inv[(r, 0)] = -inv[(r, 0)].clone();
            }
        }
        inv
    };
    if det(&m)?.is_negative() {
        if n == 1 {
            // [[-1]]: the only completion
            return Ok(m);
        }
        if n == 2 {
            for r in 0..n {
                m[(r, 1)] = -m[(r, 1)].clone();
            }
        } else {
            for r in 0..n {
                let t = m[(r, n - 1)].clone();
                m[(r, n - 1)] = m[(r, n - 2)].clone();
                m[(r, n - 2)] = t;
            }
        }
    }
    Ok(m)
}

/// Row Hermite normal form: returns `(H, U)` with `U` unimodular and
/// `U·A = H`. Pivots are positive and entries above a pivot are reduced
/// into `[0, pivot)`; zero rows come last.
pub fn hnf(a: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let (m, n) = (a.rows(), a.cols());
    let mut h = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        for i in r + 1..m {
            if h[(i, c)].is_zero() {
                continue;
            }
            let (g, s, t) = extended_gcd(&h[(r, c)], &h[(i, c)]);
            let x = &h[(r, c)] / &g;
            let y = &h[(i, c)] / &g;
            for mat in [&mut h, &mut u] {
                for j in 0..mat.cols() {
                    let p = mat[(r, j)].clone();
                    let q = mat[(i, j)].clone();
                    mat[(r, j)] = &s * &p + &t * &q;
                    mat[(i, j)] = -(&y * &p) + &x * &q;
                }
            }
        }
        if h[(r, c)].is_zero() {
            continue;
        }
        if h[(r, c)].is_negative() {
            for mat in [&mut h, &mut u] {
                for j in 0..mat.cols() {
                    mat[(r, j)] = -mat[(r, j)].clone();
                }
            }
        }
        let pivot = h[(r, c)].clone();
        for i in 0..r {
            let q = h[(i, c)].div_floor(&pivot);
            if q.is_zero() {
                continue;
            }
            for mat in [&mut h, &mut u] {
                for j in 0..mat.cols() {
                    let d = &q * &mat[(r, j)];
                    mat[(i, j)] -= d;
                }
            }
        }
        r += 1;
    }
    (h, u)
}
