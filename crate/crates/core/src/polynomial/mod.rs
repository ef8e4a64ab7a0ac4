//! Sparse Laurent polynomials with complex coefficients and integer exponents.

mod coefficient;
mod parse;
mod series;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

pub use coefficient::{Coefficient, GaussianRational};
pub use parse::{parse_polynomial, parse_system};
pub use series::{substitute_series, SeriesPoint};

use crate::lattice::IntMatrix;
use crate::polytope::SupportSet;
use crate::{Error, Result};

/// An exponent vector ordered graded-lexicographically: total degree first,
/// then lexicographic.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Exponent(pub Vec<i64>);

impl Exponent {
    pub fn degree(&self) -> i64 {
        self.0.iter().sum()
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn checked_add_vec(a: &[i64], b: &[i64]) -> Result<Vec<i64>> {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.checked_add(*y).ok_or(Error::ExponentOverflow))
        .collect()
}

/// `Σ c_a x^a` with no zero coefficients stored.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentPoly {
    nvars: usize,
    terms: BTreeMap<Exponent, Coefficient>,
}

impl LaurentPoly {
    pub fn zero(nvars: usize) -> Self {
        LaurentPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Coefficient) -> Self {
        Self::monomial(vec![0; nvars], c)
    }

    pub fn monomial(exp: Vec<i64>, c: Coefficient) -> Self {
        let mut p = Self::zero(exp.len());
        p.add_term(exp, c);
        p
    }

    /// The variable `x_i` (zero based).
    pub fn variable(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, Coefficient::one())
    }

    /// Collects terms, summing coefficients of equal exponents.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<i64>, Coefficient)>,
    {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, exp: Vec<i64>, c: Coefficient) {
        assert_eq!(exp.len(), self.nvars, "exponent length");
        let key = Exponent(exp);
        let sum = match self.terms.get(&key) {
            Some(old) => old + &c,
            None => c,
        };
        if sum.is_zero() {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, sum);
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in increasing graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&[i64], &Coefficient)> {
        self.terms.iter().map(|(e, c)| (e.0.as_slice(), c))
    }

    pub fn coefficient(&self, exp: &[i64]) -> Option<&Coefficient> {
        self.terms.get(&Exponent(exp.to_vec()))
    }

    pub fn is_exact(&self) -> bool {
        self.terms.values().all(Coefficient::is_exact)
    }

    pub fn inexact(&self) -> Self {
        LaurentPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.inexact())).collect(),
        }
    }

    /// Exponent vectors with nonzero coefficient.
    pub fn support(&self) -> SupportSet {
        assert!(!self.is_zero(), "the zero polynomial has empty support");
        SupportSet::new(self.terms.keys().map(|e| e.0.clone()).collect())
    }

    pub fn add(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut p = self.clone();
        for (e, c) in &other.terms {
            p.add_term(e.0.clone(), c.clone());
        }
        p
    }

    pub fn sub(&self, other: &LaurentPoly) -> LaurentPoly {
        self.add(&other.scale(&Coefficient::from_i64(-1)))
    }

    pub fn scale(&self, c: &Coefficient) -> LaurentPoly {
        LaurentPoly::from_terms(self.nvars, self.terms.iter().map(|(e, d)| (e.0.clone(), d * c)))
    }

    pub fn mul(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        let mut p = LaurentPoly::zero(self.nvars);
        for (a, c) in &self.terms {
            for (b, d) in &other.terms {
                p.add_term(checked_add_vec(&a.0, &b.0)?, c * d);
            }
        }
        Ok(p)
    }

    /// Multiplies by the monomial `x^shift`.
    pub fn shift(&self, shift: &[i64]) -> Result<LaurentPoly> {
        let mut p = LaurentPoly::zero(self.nvars);
        for (a, c) in &self.terms {
            p.add_term(checked_add_vec(&a.0, shift)?, c.clone());
        }
        Ok(p)
    }

    /// Keeps the terms whose exponents satisfy `keep`.
    pub fn filter_terms(&self, mut keep: impl FnMut(&[i64]) -> bool) -> LaurentPoly {
        LaurentPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| keep(&e.0))
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn eval(&self, x: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| c.value() * monomial_value(&e.0, x))
            .sum()
    }

    /// Partial derivative with respect to `x_i`.
    pub fn derivative(&self, i: usize) -> LaurentPoly {
        LaurentPoly::from_terms(
            self.nvars,
            self.terms.iter().filter(|(e, _)| e.0[i] != 0).map(|(e, c)| {
                let mut f = e.0.clone();
                f[i] -= 1;
                (f, c.scale_i64(e.0[i]))
            }),
        )
    }

    /// Substitution `x = y^M`: every exponent `a` becomes `aᵀM`.
    pub fn power_transform(&self, m: &IntMatrix) -> Result<LaurentPoly> {
        if !m.is_square() || m.rows() != self.nvars {
            return Err(Error::DimensionMismatch(format!(
                "{} variables, {}x{} transform",
                self.nvars,
                m.rows(),
                m.cols()
            )));
        }
        let rows = m.to_rows_i64().ok_or(Error::ExponentOverflow)?;
        let n = self.nvars;
        let mut p = LaurentPoly::zero(n);
        for (a, c) in &self.terms {
            let mut b = vec![0i64; n];
            for (j, bj) in b.iter_mut().enumerate() {
                let mut s: i64 = 0;
                for (i, ai) in a.0.iter().enumerate() {
                    let t = ai.checked_mul(rows[i][j]).ok_or(Error::ExponentOverflow)?;
                    s = s.checked_add(t).ok_or(Error::ExponentOverflow)?;
                }
                *bj = s;
            }
            p.add_term(b, c.clone());
        }
        Ok(p)
    }

    /// Componentwise minimal exponent over all terms.
    pub fn min_exponent(&self) -> Vec<i64> {
        let mut m: Option<Vec<i64>> = None;
        for e in self.terms.keys() {
            m = Some(match m {
                None => e.0.clone(),
                Some(m) => m.iter().zip(&e.0).map(|(x, y)| *x.min(y)).collect(),
            });
        }
        m.unwrap_or_else(|| vec![0; self.nvars])
    }

    /// Divides by `x^m` with `m` the componentwise minimal exponent and
    /// returns the quotient together with `m`.
    pub fn divide_common_monomial(&self) -> (LaurentPoly, Vec<i64>) {
        let m = self.min_exponent();
        let neg: Vec<i64> = m.iter().map(|x| -x).collect();
        let q = self.shift(&neg).expect("shifting by the minimum stays in range");
        (q, m)
    }

    /// Drops variable `i`, which must not occur in any term.
    pub fn drop_variable(&self, i: usize) -> Result<LaurentPoly> {
        let mut p = LaurentPoly::zero(self.nvars - 1);
        for (e, c) in &self.terms {
            if e.0[i] != 0 {
                return Err(Error::Shape(format!("variable {} still occurs", i + 1)));
            }
            let mut f = e.0.clone();
            f.remove(i);
            p.add_term(f, c.clone());
        }
        Ok(p)
    }

    /// Appends fresh variables (exponent zero) at the end.
    pub fn extend_variables(&self, extra: usize) -> LaurentPoly {
        LaurentPoly::from_terms(
            self.nvars + extra,
            self.terms.iter().map(|(e, c)| {
                let mut f = e.0.clone();
                f.extend(std::iter::repeat_n(0, extra));
                (f, c.clone())
            }),
        )
    }

    /// Permutes variables: variable `i` becomes variable `perm[i]`.
    pub fn permute_variables(&self, perm: &[usize]) -> LaurentPoly {
        LaurentPoly::from_terms(
            self.nvars,
            self.terms.iter().map(|(e, c)| {
                let mut f = vec![0; self.nvars];
                for (i, &x) in e.0.iter().enumerate() {
                    f[perm[i]] = x;
                }
                (f, c.clone())
            }),
        )
    }

    pub fn display_with<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names }
    }
}

pub(crate) fn monomial_value(e: &[i64], x: &[Complex64]) -> Complex64 {
    let mut v = Complex64::new(1.0, 0.0);
    for (k, &ek) in e.iter().enumerate() {
        if ek != 0 {
            v *= x[k].powi(ek as i32);
        }
    }
    v
}

pub struct PolyDisplay<'a> {
    poly: &'a LaurentPoly,
    names: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    /// Canonical form: terms in decreasing graded-lex order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.poly.terms.iter().rev().enumerate() {
            let negative = c.is_negative_rational();
            let c = if negative { -c } else { c.clone() };
            match (k, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut factors: Vec<String> = Vec::new();
            for (i, &p) in e.0.iter().enumerate() {
                match p {
                    0 => {}
                    1 => factors.push(self.names[i].clone()),
                    _ => factors.push(format!("{}^{}", self.names[i], p)),
                }
            }
            let one = c == Coefficient::one();
            if factors.is_empty() {
                write!(f, "{c}")?;
            } else if one {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", c, factors.join("*"))?;
            }
        }
        Ok(())
    }
}

pub fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = default_names(self.nvars);
        write!(f, "{}", self.display_with(&names))
    }
}

/// A tuple of Laurent polynomials in shared variables.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentSystem {
    polys: Vec<LaurentPoly>,
    names: Vec<String>,
}

impl LaurentSystem {
    pub fn new(polys: Vec<LaurentPoly>, names: Vec<String>) -> Result<Self> {
        if let Some(p) = polys.iter().find(|p| p.nvars() != names.len()) {
            return Err(Error::InconsistentVariables(format!(
                "polynomial in {} variables, {} names",
                p.nvars(),
                names.len()
            )));
        }
        Ok(LaurentSystem { polys, names })
    }

    pub fn with_default_names(polys: Vec<LaurentPoly>) -> Result<Self> {
        let n = polys.first().map(LaurentPoly::nvars).ok_or(Error::EmptyInput)?;
        Self::new(polys, default_names(n))
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn polys(&self) -> &[LaurentPoly] {
        &self.polys
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn supports(&self) -> Vec<SupportSet> {
        self.polys.iter().map(LaurentPoly::support).collect()
    }

    pub fn eval(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.polys.iter().map(|p| p.eval(x)).collect()
    }

    pub fn map<F>(&self, f: F) -> Result<LaurentSystem>
    where
        F: FnMut(&LaurentPoly) -> Result<LaurentPoly>,
    {
        let polys = self.polys.iter().map(f).collect::<Result<Vec<_>>>()?;
        let n = polys.first().map_or(self.nvars(), LaurentPoly::nvars);
        let names = if n == self.nvars() { self.names.clone() } else { default_names(n) };
        LaurentSystem::new(polys, names)
    }

    pub fn power_transform(&self, m: &IntMatrix) -> Result<LaurentSystem> {
        self.map(|p| p.power_transform(m))
    }

    pub fn permute_variables(&self, perm: &[usize]) -> LaurentSystem {
        LaurentSystem {
            polys: self.polys.iter().map(|p| p.permute_variables(perm)).collect(),
            names: self.names.clone(),
        }
    }
}

impl fmt::Display for LaurentSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vars: {}", self.names.join(" "))?;
        for p in &self.polys {
            writeln!(f, "{};", p.display_with(&self.names))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn binomial_system() -> LaurentSystem {
        parse_system("x1*x2^2*x3 - 2*x1^2*x2^3*x3;\n3*x1^2*x2^2*x3^5 + 9*x2*x3;").unwrap()
    }

    #[test]
    fn support_of_binomial_example() {
        let s = binomial_system();
        assert_eq!(s.polys()[0].support().points(), &[vec![1, 2, 1], vec![2, 3, 1]]);
        let c = LaurentPoly::constant(3, Coefficient::from_i64(5));
        assert_eq!(c.support().points(), &[vec![0, 0, 0]]);
    }

    #[test]
    fn power_transform_of_binomial_example() {
        let s = binomial_system();
        let m = IntMatrix::from_rows(&[vec![4, 0, 1], vec![-4, 1, 0], vec![-1, 0, 0]]).unwrap();
        let t = s.power_transform(&m).unwrap();
        // after dividing out the common monomial the exponent differences are AM
        let (q0, _) = t.polys()[0].divide_common_monomial();
        let (q1, _) = t.polys()[1].divide_common_monomial();
        let e0: Vec<&[i64]> = q0.terms().map(|(e, _)| e).collect();
        let e1: Vec<&[i64]> = q1.terms().map(|(e, _)| e).collect();
        assert_eq!(e0, vec![&[0, 0, 0][..], &[0, 1, 1][..]]);
        assert_eq!(e1, vec![&[0, 0, 0][..], &[0, 1, 2][..]]);
        assert_eq!(s.power_transform(&IntMatrix::identity(3)).unwrap(), s);
    }

    #[test]
    fn divide_common_monomial_examples() {
        let s = binomial_system();
        let (q, m) = s.polys()[0].divide_common_monomial();
        assert_eq!(m, vec![1, 2, 1]);
        assert_eq!(q.to_string(), "-2*x1*x2 + 1");
        let p = parse_polynomial("1 + x1", &["x1".to_string()]).unwrap();
        assert_eq!(p.divide_common_monomial(), (p.clone(), vec![0]));
        let p = parse_polynomial("x1^-2 + x1", &["x1".to_string()]).unwrap();
        let (q, m) = p.divide_common_monomial();
        assert_eq!(m, vec![-2]);
        assert_eq!(q.to_string(), "x1^3 + 1");
    }

    #[test]
    fn arithmetic_and_derivative() {
        let names = default_names(2);
        let p = parse_polynomial("x1^2*x2 - 3*x2^-1", &names).unwrap();
        let q = parse_polynomial("x1 + 1", &names).unwrap();
        let pq = p.mul(&q).unwrap();
        assert_eq!(pq.num_terms(), 4);
        assert!(pq.sub(&pq).is_zero());
        let d = p.derivative(1);
        assert_eq!(d.to_string(), "x1^2 + 3*x2^-2");
        let x = [Complex64::new(2.0, 0.0), Complex64::new(0.5, 0.0)];
        assert!((p.eval(&x) - Complex64::new(-4.0, 0.0)).norm() < 1e-14);
    }

    fn small_poly(n: usize) -> impl Strategy<Value = LaurentPoly> {
        prop::collection::vec(
            (prop::collection::vec(-3i64..4, n), -5i64..6, 1i64..4),
            1..6,
        )
        .prop_map(move |ts| {
            LaurentPoly::from_terms(
                n,
                ts.into_iter().map(|(e, a, b)| (e, Coefficient::from_ratio(a, b))),
            )
        })
    }

    fn unimodular3() -> impl Strategy<Value = IntMatrix> {
        // products of elementary matrices
        prop::collection::vec((0usize..3, 0usize..3, -2i64..3), 0..6).prop_map(|ops| {
            let mut m = IntMatrix::identity(3);
            for (i, j, k) in ops {
                if i != j {
                    let mut e = IntMatrix::identity(3);
                    e[(i, j)] = k.into();
                    m = m.mul(&e).unwrap();
                }
            }
            m
        })
    }

    proptest! {
        #[test]
        fn power_transform_is_an_action(p in small_poly(3), m1 in unimodular3(), m2 in unimodular3()) {
            let lhs = p.power_transform(&m1).unwrap().power_transform(&m2).unwrap();
            let rhs = p.power_transform(&m1.mul(&m2).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn power_transform_inverts(p in small_poly(3), m in unimodular3()) {
            let inv = m.inverse_unimodular().unwrap();
            let q = p.power_transform(&m).unwrap().power_transform(&inv).unwrap();
            prop_assert_eq!(q, p);
        }

        #[test]
        fn print_parse_round_trip(ps in prop::collection::vec(small_poly(3), 1..4)) {
            let ps: Vec<LaurentPoly> = ps.into_iter().filter(|p| !p.is_zero()).collect();
            prop_assume!(!ps.is_empty());
            let s = LaurentSystem::with_default_names(ps).unwrap();
            let text = s.to_string();
            prop_assert_eq!(parse_system(&text).unwrap(), s);
        }
    }
}
