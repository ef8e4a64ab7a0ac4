//! Substitution of truncated two-term series `x_k = c_k t^{e_k} + d_k t^{f_k}`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;

use super::{Coefficient, LaurentPoly};
use crate::{Error, Result};

/// A point on a curve given by the first one or two terms of a series in `t`,
/// with integral exponents (denominators already cleared).
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesPoint {
    pub exponents: Vec<i64>,
    pub coefficients: Vec<Coefficient>,
    pub second_exponents: Option<Vec<i64>>,
    pub second_coefficients: Option<Vec<Coefficient>>,
}

impl SeriesPoint {
    pub fn leading(exponents: Vec<i64>, coefficients: Vec<Coefficient>) -> Self {
        SeriesPoint { exponents, coefficients, second_exponents: None, second_coefficients: None }
    }

    pub fn with_second(mut self, exponents: Vec<i64>, coefficients: Vec<Coefficient>) -> Self {
        self.second_exponents = Some(exponents);
        self.second_coefficients = Some(coefficients);
        self
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    /// Only the leading terms.
    pub fn first_term(&self) -> SeriesPoint {
        SeriesPoint::leading(self.exponents.clone(), self.coefficients.clone())
    }

    fn second(&self, k: usize) -> Option<(i64, &Coefficient)> {
        let e = self.second_exponents.as_ref()?[k];
        let d = &self.second_coefficients.as_ref()?[k];
        if d.is_zero() {
            None
        } else {
            Some((e, d))
        }
    }

    /// Numeric value of the truncated series at `t`.
    pub fn eval(&self, t: Complex64) -> Vec<Complex64> {
        (0..self.len())
            .map(|k| {
                let mut x = self.coefficients[k].value() * t.powi(self.exponents[k] as i32);
                if let Some((e, d)) = self.second(k) {
                    x += d.value() * t.powi(e as i32);
                }
                x
            })
            .collect()
    }
}

type Series = BTreeMap<i64, Coefficient>;

fn add_into(s: &mut Series, k: i64, c: Coefficient) {
    let sum = match s.get(&k) {
        Some(old) => old + &c,
        None => c,
    };
    if sum.is_zero() {
        s.remove(&k);
    } else {
        s.insert(k, sum);
    }
}

fn mul_truncated(a: &Series, b: &Series, cut: i64) -> Result<Series> {
    let mut out = Series::new();
    for (i, c) in a {
        for (j, d) in b {
            let k = i.checked_add(*j).ok_or(Error::ExponentOverflow)?;
            if k > cut {
                break;
            }
            add_into(&mut out, k, c * d);
        }
    }
    Ok(out)
}

/// `(c t^e + d t^f)^p` up to relative order `span` above its leading power.
fn power_of_binomial(
    c: &Coefficient,
    e: i64,
    second: Option<(i64, &Coefficient)>,
    p: i64,
    span: i64,
) -> Result<Series> {
    let mut s = Series::new();
    let lead_exp = e.checked_mul(p).ok_or(Error::ExponentOverflow)?;
    let lead = c.pow(p).ok_or(Error::Shape("zero leading coefficient".into()))?;
    let Some((f, d)) = second else {
        s.insert(lead_exp, lead);
        return Ok(s);
    };
    let step = f - e;
    if step <= 0 {
        return Err(Error::Shape("second exponent must exceed the leading one".into()));
    }
    let ratio = d * &c.inv().ok_or(Error::Shape("zero leading coefficient".into()))?;
    // generalized binomial coefficients C(p, j), exact
    let mut binom = BigRational::from_integer(BigInt::from(1));
    let mut ratio_pow = Coefficient::one();
    let mut j: i64 = 0;
    while j.checked_mul(step).ok_or(Error::ExponentOverflow)? <= span {
        if p >= 0 && j > p {
            break;
        }
        let term = &(&lead * &Coefficient::from_rational(binom.clone())) * &ratio_pow;
        add_into(&mut s, lead_exp + j * step, term);
        binom *= BigRational::new(BigInt::from(p - j), BigInt::from(j + 1));
        ratio_pow = &ratio_pow * &ratio;
        j += 1;
    }
    Ok(s)
}

/// Substitutes the series into `f`, keeping powers of `t` up to `order_cut`.
/// The result is a Laurent polynomial in the single variable `t`.
pub fn substitute_series(f: &LaurentPoly, s: &SeriesPoint, order_cut: i64) -> Result<LaurentPoly> {
    if s.len() != f.nvars() {
        return Err(Error::DimensionMismatch(format!(
            "series of length {} for {} variables",
            s.len(),
            f.nvars()
        )));
    }
    let mut total = Series::new();
    for (a, c) in f.terms() {
        let mut low: i64 = 0;
        for (ak, ek) in a.iter().zip(&s.exponents) {
            low = ak
                .checked_mul(*ek)
                .and_then(|x| low.checked_add(x))
                .ok_or(Error::ExponentOverflow)?;
        }
        if low > order_cut {
            continue;
        }
        let span = order_cut - low;
        let mut acc = Series::new();
        acc.insert(0, c.clone());
        // leading power of the partial product; terms more than `span` above
        // it cannot reach the cut
        let mut base: i64 = 0;
        for (k, &ak) in a.iter().enumerate() {
            if ak == 0 {
                continue;
            }
            let fac = power_of_binomial(&s.coefficients[k], s.exponents[k], s.second(k), ak, span)?;
            base = base.checked_add(ak * s.exponents[k]).ok_or(Error::ExponentOverflow)?;
            acc = mul_truncated(&acc, &fac, base + span)?;
        }
        for (k, v) in acc {
            add_into(&mut total, k, v);
        }
    }
    Ok(LaurentPoly::from_terms(1, total.into_iter().map(|(k, v)| (vec![k], v))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::{default_names, parse_polynomial};
    use proptest::prelude::*;

    fn binomial_curve() -> SeriesPoint {
        SeriesPoint::leading(
            vec![4, -4, -1],
            vec![Coefficient::from_i64(-6), Coefficient::from_ratio(-1, 12), Coefficient::one()],
        )
    }

    #[test]
    fn hyperplane_spread() {
        let h = parse_polynomial("3 + 5*x1 - 7*x2 + 2*x3", &default_names(3)).unwrap();
        let p = substitute_series(&h, &binomial_curve(), 100).unwrap();
        let exps: Vec<i64> = p.terms().map(|(e, _)| e[0]).collect();
        assert_eq!(exps, vec![-4, -1, 0, 4]);
    }

    #[test]
    fn identity_series() {
        let f = parse_polynomial("x1", &default_names(1)).unwrap();
        let s = SeriesPoint::leading(vec![1], vec![Coefficient::one()]);
        assert_eq!(substitute_series(&f, &s, 10).unwrap().to_string(), "x1");
    }

    #[test]
    fn curve_solves_binomial_system() {
        let names = default_names(3);
        for text in ["x1*x2^2*x3 - 2*x1^2*x2^3*x3", "3*x1^2*x2^2*x3^5 + 9*x2*x3"] {
            let f = parse_polynomial(text, &names).unwrap();
            assert!(substitute_series(&f, &binomial_curve(), 50).unwrap().is_zero());
        }
    }

    #[test]
    fn low_cut_keeps_cancelling_terms() {
        let names = default_names(3);
        let f = parse_polynomial("3*x1^2*x2^2*x3^5 + 9*x2*x3", &names).unwrap();
        assert!(substitute_series(&f, &binomial_curve(), -5).unwrap().is_zero());
        let g = parse_polynomial("x1^2*x2^2*x3^5", &names).unwrap();
        assert_eq!(substitute_series(&g, &binomial_curve(), -5).unwrap().to_string(), "1/4*x1^-5");
    }

    #[test]
    fn negative_powers_of_two_terms() {
        // (1 + t)^-1 = 1 - t + t^2 - ...
        let f = parse_polynomial("x1^-1", &default_names(1)).unwrap();
        let s = SeriesPoint::leading(vec![0], vec![Coefficient::one()])
            .with_second(vec![1], vec![Coefficient::one()]);
        let p = substitute_series(&f, &s, 3).unwrap();
        let got: Vec<(i64, Coefficient)> = p.terms().map(|(e, c)| (e[0], c.clone())).collect();
        let want: Vec<(i64, Coefficient)> = (0..=3).map(|k| (k, Coefficient::from_i64(if k % 2 == 0 { 1 } else { -1 }))).collect();
        assert_eq!(got, want);
    }

    fn small_poly() -> impl Strategy<Value = LaurentPoly> {
        prop::collection::vec((prop::collection::vec(-2i64..3, 2), -4i64..5), 1..5).prop_map(|ts| {
            LaurentPoly::from_terms(2, ts.into_iter().map(|(e, c)| (e, Coefficient::from_i64(c))))
        })
    }

    proptest! {
        #[test]
        fn substitution_is_linear(f in small_poly(), g in small_poly(),
                                  e in prop::collection::vec(-2i64..3, 2),
                                  c in prop::collection::vec(1i64..4, 2),
                                  d in prop::collection::vec(-3i64..4, 2)) {
            let s = SeriesPoint::leading(e.clone(), c.iter().map(|&x| Coefficient::from_i64(x)).collect())
                .with_second(e.iter().map(|x| x + 1).collect(), d.iter().map(|&x| Coefficient::from_i64(x)).collect());
            let cut = 4;
            let lhs = substitute_series(&f.add(&g), &s, cut).unwrap();
            let rhs = substitute_series(&f, &s, cut).unwrap().add(&substitute_series(&g, &s, cut).unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn truncation_matches_numeric_value(f in small_poly(),
                                            c in prop::collection::vec(1i64..4, 2)) {
            // one-term series: substitution is exact, so compare with evaluation
            let s = SeriesPoint::leading(vec![1, -1], c.iter().map(|&x| Coefficient::from_i64(x)).collect());
            let p = substitute_series(&f, &s, 1000).unwrap();
            let t = Complex64::new(0.7, 0.2);
            let lhs = p.eval(&[t]);
            let rhs = f.eval(&s.eval(t));
            prop_assert!((lhs - rhs).norm() < 1e-9 * (1.0 + rhs.norm()));
        }
    }
}
