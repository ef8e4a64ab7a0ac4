//! Exact rational feasibility for small linear systems.
//!
//! Systems are `E·x = f`, `G·x ≥ h` over free rational variables. The
//! equalities are eliminated by exact Gauss–Jordan, the free parameters are
//! pivoted into the basis, and the remaining slack dictionary goes through a
//! phase-one simplex with Bland's rule. Arithmetic first runs on checked
//! `i128` ratios and restarts on `BigRational` if anything overflows.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, Signed, Zero};

trait Scalar: Clone + PartialEq + std::fmt::Debug {
    fn from_i64(v: i64) -> Self;
    fn zero() -> Self;
    fn add(&self, o: &Self) -> Option<Self>;
    fn sub(&self, o: &Self) -> Option<Self>;
    fn mul(&self, o: &Self) -> Option<Self>;
    fn div(&self, o: &Self) -> Option<Self>;
    fn is_zero(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn to_big(&self) -> BigRational;
}

type Small = Ratio<i128>;

impl Scalar for Small {
    fn from_i64(v: i64) -> Self {
        Ratio::from_integer(v as i128)
    }
    fn zero() -> Self {
        Zero::zero()
    }
    fn add(&self, o: &Self) -> Option<Self> {
        self.checked_add(o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        self.checked_sub(o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(o)
    }
    fn div(&self, o: &Self) -> Option<Self> {
        self.checked_div(o)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn to_big(&self) -> BigRational {
        BigRational::new(BigInt::from(*self.numer()), BigInt::from(*self.denom()))
    }
}

impl Scalar for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn zero() -> Self {
        Zero::zero()
    }
    fn add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn div(&self, o: &Self) -> Option<Self> {
        Some(self / o)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn to_big(&self) -> BigRational {
        self.clone()
    }
}

/// A conjunction of linear equalities and `≥` inequalities with integer
/// coefficients over free rational unknowns.
#[derive(Clone, Debug, Default)]
pub struct LinearSystem {
    nvars: usize,
    eqs: Vec<(Vec<i64>, i64)>,
    ges: Vec<(Vec<i64>, i64)>,
}

impl LinearSystem {
    pub fn new(nvars: usize) -> Self {
        LinearSystem {
            nvars,
            eqs: Vec::new(),
            ges: Vec::new(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Adds `a·x = b`.
    pub fn eq(&mut self, a: Vec<i64>, b: i64) -> &mut Self {
        assert_eq!(a.len(), self.nvars);
        self.eqs.push((a, b));
        self
    }

    /// Adds `a·x ≥ b`.
    pub fn ge(&mut self, a: Vec<i64>, b: i64) -> &mut Self {
        assert_eq!(a.len(), self.nvars);
        self.ges.push((a, b));
        self
    }

    pub fn equalities(&self) -> &[(Vec<i64>, i64)] {
        &self.eqs
    }

    pub fn inequalities(&self) -> &[(Vec<i64>, i64)] {
        &self.ges
    }

    /// Appends all constraints of `other` (same number of unknowns).
    pub fn extend(&mut self, other: &LinearSystem) {
        assert_eq!(other.nvars, self.nvars);
        self.eqs.extend(other.eqs.iter().cloned());
        self.ges.extend(other.ges.iter().cloned());
    }

    pub fn is_feasible(&self) -> bool {
        self.feasible_point().is_some()
    }

    /// Some point satisfying every constraint, or `None` when the system is
    /// infeasible.
    pub fn feasible_point(&self) -> Option<Vec<BigRational>> {
        match solve::<Small>(self) {
            Ok(r) => r,
            Err(Overflow) => solve::<BigRational>(self).expect("big rationals do not overflow"),
        }
    }

    /// Exact check that `x` satisfies the system.
    pub fn satisfied_by(&self, x: &[BigRational]) -> bool {
        let eval = |a: &[i64]| -> BigRational {
            a.iter()
                .zip(x)
                .map(|(&c, v)| v * BigRational::from_integer(BigInt::from(c)))
                .sum()
        };
        self.eqs
            .iter()
            .all(|(a, b)| eval(a) == BigRational::from_integer(BigInt::from(*b)))
            && self
                .ges
                .iter()
                .all(|(a, b)| eval(a) >= BigRational::from_integer(BigInt::from(*b)))
    }
}

#[derive(Debug)]
struct Overflow;

type Solved = std::result::Result<Option<Vec<BigRational>>, Overflow>;

fn ck<T>(v: Option<T>) -> std::result::Result<T, Overflow> {
    v.ok_or(Overflow)
}

/// Dictionary row: `basic = constant + Σ coeffs[j]·nonbasic[j]`.
#[derive(Clone)]
struct Row<T> {
    basic: usize,
    constant: T,
    coeffs: Vec<T>,
    /// Rows whose basic variable is a free parameter are never ratio-tested.
    free: bool,
}

#[allow(clippy::needless_range_loop)]
fn solve<T: Scalar>(sys: &LinearSystem) -> Solved {
    let n = sys.nvars;
    // Gauss–Jordan on the equalities: x[p_r] = rhs_r - Σ_free e[r][j] x[j].
    let mut mat: Vec<Vec<T>> = sys
        .eqs
        .iter()
        .map(|(a, b)| {
            let mut r: Vec<T> = a.iter().map(|&c| T::from_i64(c)).collect();
            r.push(T::from_i64(*b));
            r
        })
        .collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut rank = 0;
    for c in 0..n {
        let Some(p) = (rank..mat.len()).find(|&i| !mat[i][c].is_zero()) else {
            continue;
        };
        mat.swap(rank, p);
        let inv = mat[rank][c].clone();
        for k in 0..=n {
            mat[rank][k] = ck(mat[rank][k].div(&inv))?;
        }
        for i in 0..mat.len() {
            if i != rank && !mat[i][c].is_zero() {
                let f = mat[i][c].clone();
                for k in 0..=n {
                    let d = ck(f.mul(&mat[rank][k]))?;
                    mat[i][k] = ck(mat[i][k].sub(&d))?;
                }
            }
        }
        pivots.push(c);
        rank += 1;
    }
    if mat[rank..].iter().any(|r| !r[n].is_zero()) {
        return Ok(None);
    }
    let params: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let d = params.len();

    // x = x0 + K·u
    let mut x0 = vec![T::zero(); n];
    let mut kmat = vec![vec![T::zero(); d]; n];
    for (r, &p) in pivots.iter().enumerate() {
        x0[p] = mat[r][n].clone();
        for (j, &q) in params.iter().enumerate() {
            kmat[p][j] = ck(T::zero().sub(&mat[r][q]))?;
        }
    }
    for (j, &q) in params.iter().enumerate() {
        kmat[q][j] = T::from_i64(1);
    }

    // Dictionary over variable ids: 0..d parameters, d..d+m slacks, d+m is
    // the phase-one artificial.
    let m = sys.ges.len();
    let mut cols: Vec<usize> = (0..d).collect();
    let mut rows: Vec<Row<T>> = Vec::with_capacity(m);
    for (i, (a, b)) in sys.ges.iter().enumerate() {
        let mut constant = ck(T::zero().sub(&T::from_i64(*b)))?;
        for (k, &c) in a.iter().enumerate() {
            if c != 0 {
                let t = ck(T::from_i64(c).mul(&x0[k]))?;
                constant = ck(constant.add(&t))?;
            }
        }
        let mut coeffs = vec![T::zero(); d];
        for (j, coef) in coeffs.iter_mut().enumerate() {
            for (k, &c) in a.iter().enumerate() {
                if c != 0 && !kmat[k][j].is_zero() {
                    let t = ck(T::from_i64(c).mul(&kmat[k][j]))?;
                    *coef = ck(coef.add(&t))?;
                }
            }
        }
        rows.push(Row {
            basic: d + i,
            constant,
            coeffs,
            free: false,
        });
    }

    // Move every parameter that appears in some slack row into the basis.
    for j in 0..d {
        if let Some(r) = rows.iter().position(|row| !row.free && !row.coeffs[j].is_zero()) {
            pivot(&mut rows, &mut cols, r, j)?;
            rows[r].free = true;
        }
    }

    let artificial = d + m;
    let worst = rows
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.free && r.constant.is_negative())
        .min_by(|a, b| cmp(&a.1.constant, &b.1.constant))
        .map(|(i, _)| i);
    if let Some(start) = worst {
        cols.push(artificial);
        for row in rows.iter_mut() {
            row.coeffs.push(if row.free { T::zero() } else { T::from_i64(1) });
        }
        let ac = cols.len() - 1;
        pivot(&mut rows, &mut cols, start, ac)?;
        while let Some(ar) = rows.iter().position(|r| r.basic == artificial) {
            if rows[ar].constant.is_zero() {
                break;
            }
            // entering: smallest variable id with negative objective coefficient,
            // never a parameter column
            let entering = (0..cols.len())
                .filter(|&j| cols[j] >= d && rows[ar].coeffs[j].is_negative())
                .min_by_key(|&j| cols[j]);
            let Some(e) = entering else {
                return Ok(None);
            };
            let mut best: Option<(usize, T)> = None;
            for (i, r) in rows.iter().enumerate() {
                if r.free || !r.coeffs[e].is_negative() {
                    continue;
                }
                let ratio = ck(r.constant.div(&ck(T::zero().sub(&r.coeffs[e]))?))?;
                let better = match &best {
                    None => true,
                    Some((bi, bv)) => match cmp(&ratio, bv) {
                        std::cmp::Ordering::Less => true,
                        std::cmp::Ordering::Equal => {
                            let cur = rows[*bi].basic;
                            r.basic == artificial || (cur != artificial && r.basic < cur)
                        }
                        std::cmp::Ordering::Greater => false,
                    },
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            let (leave, _) = best.expect("phase one objective is bounded below");
            pivot(&mut rows, &mut cols, leave, e)?;
        }
        if let Some(r) = rows.iter().find(|r| r.basic == artificial) {
            if !r.constant.is_zero() {
                return Ok(None);
            }
        }
    }

    let mut u = vec![T::zero(); d];
    for r in &rows {
        if r.basic < d {
            u[r.basic] = r.constant.clone();
        }
    }
    let mut x = Vec::with_capacity(n);
    for k in 0..n {
        let mut v = x0[k].clone();
        for j in 0..d {
            if !kmat[k][j].is_zero() && !u[j].is_zero() {
                v = ck(v.add(&ck(kmat[k][j].mul(&u[j]))?))?;
            }
        }
        x.push(v.to_big());
    }
    Ok(Some(x))
}

fn cmp<T: Scalar>(a: &T, b: &T) -> std::cmp::Ordering {
    match a.sub(b) {
        Some(d) if d.is_zero() => std::cmp::Ordering::Equal,
        Some(d) if d.is_negative() => std::cmp::Ordering::Less,
        Some(_) => std::cmp::Ordering::Greater,
        None => a.to_big().cmp(&b.to_big()),
    }
}

/// Exchanges the basic variable of row `r` with the nonbasic column `c`.
fn pivot<T: Scalar>(rows: &mut [Row<T>], cols: &mut [usize], r: usize, c: usize) -> std::result::Result<(), Overflow> {
    let a = rows[r].coeffs[c].clone();
    debug_assert!(!a.is_zero());
    // x_c = (x_b - const - Σ_{j≠c} t_j x_j) / a
    let leaving = rows[r].basic;
    let entering = cols[c];
    {
        let row = &mut rows[r];
        let neg_inv = ck(T::zero().sub(&ck(T::from_i64(1).div(&a))?))?;
        row.constant = ck(row.constant.mul(&neg_inv))?;
        for (j, t) in row.coeffs.iter_mut().enumerate() {
            if j == c {
                *t = ck(T::from_i64(1).div(&a))?;
            } else if !t.is_zero() {
                *t = ck(t.mul(&neg_inv))?;
            }
        }
        row.basic = entering;
    }
    cols[c] = leaving;
    let pivot_row = rows[r].clone();
    for (i, row) in rows.iter_mut().enumerate() {
        if i == r {
            continue;
        }
        let f = row.coeffs[c].clone();
        if f.is_zero() {
            continue;
        }
        row.constant = ck(row.constant.add(&ck(f.mul(&pivot_row.constant))?))?;
        for j in 0..row.coeffs.len() {
            if j == c {
                row.coeffs[j] = ck(f.mul(&pivot_row.coeffs[c]))?;
            } else if !pivot_row.coeffs[j].is_zero() {
                let t = ck(f.mul(&pivot_row.coeffs[j]))?;
                row.coeffs[j] = ck(row.coeffs[j].add(&t))?;
            }
        }
    }
    Ok(())
}
