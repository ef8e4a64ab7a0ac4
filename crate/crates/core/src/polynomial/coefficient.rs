use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An exact Gaussian rational `re + im·i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        GaussianRational { re, im: BigRational::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(ratio_to_f64(&self.re), ratio_to_f64(&self.im))
    }

    fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Option<GaussianRational> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(GaussianRational::new(&self.re / &n, -&self.im / &n))
    }

    pub fn mul(&self, o: &GaussianRational) -> GaussianRational {
        GaussianRational::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }

    pub fn add(&self, o: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re + &o.re, &self.im + &o.im)
    }

    pub fn neg(&self) -> GaussianRational {
        GaussianRational::new(-&self.re, -&self.im)
    }
}

pub(crate) fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// A complex double with an exact Gaussian-rational shadow, kept as long as
/// every operation producing it was exact.
#[derive(Clone, Debug)]
pub struct Coefficient {
    value: Complex64,
    exact: Option<GaussianRational>,
}

impl PartialEq for Coefficient {
    fn eq(&self, other: &Self) -> bool {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => a == b,
            (None, None) => self.value == other.value,
            _ => false,
        }
    }
}

impl Coefficient {
    pub fn from_exact(g: GaussianRational) -> Self {
        Coefficient { value: g.to_complex(), exact: Some(g) }
    }

    pub fn from_rational(r: BigRational) -> Self {
        Self::from_exact(GaussianRational::real(r))
    }

    pub fn from_i64(k: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(k)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn gaussian(re: (i64, i64), im: (i64, i64)) -> Self {
        Self::from_exact(GaussianRational::new(
            BigRational::new(re.0.into(), re.1.into()),
            BigRational::new(im.0.into(), im.1.into()),
        ))
    }

    pub fn from_complex(value: Complex64) -> Self {
        Coefficient { value, exact: None }
    }

    pub fn zero() -> Self {
        Self::from_i64(0)
    }

    pub fn one() -> Self {
        Self::from_i64(1)
    }

    pub fn value(&self) -> Complex64 {
        self.value
    }

    pub fn exact(&self) -> Option<&GaussianRational> {
        self.exact.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// Drops the exact shadow.
    pub fn inexact(&self) -> Self {
        Coefficient { value: self.value, exact: None }
    }

    pub fn is_zero(&self) -> bool {
        match &self.exact {
            Some(g) => g.is_zero(),
            None => self.value == Complex64::new(0.0, 0.0),
        }
    }

    pub fn norm(&self) -> f64 {
        self.value.norm()
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(match &self.exact {
            Some(g) => Self::from_exact(g.inv()?),
            None => Self::from_complex(self.value.inv()),
        })
    }

    pub fn pow(&self, e: i64) -> Option<Self> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        let mut base = self.clone();
        let mut acc = Coefficient::one();
        let mut k = e as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        Some(acc)
    }

    pub fn scale_i64(&self, k: i64) -> Self {
        self * &Coefficient::from_i64(k)
    }

    /// Whether the value is a nonzero real number with an exact shadow and
    /// negative sign (used for printing `- term`).
    pub(crate) fn is_negative_rational(&self) -> bool {
        matches!(&self.exact, Some(g) if g.im.is_zero() && g.re.is_negative())
    }
}

impl<'a> Add<&'a Coefficient> for &'a Coefficient {
    type Output = Coefficient;
    fn add(self, o: &Coefficient) -> Coefficient {
        match (&self.exact, &o.exact) {
            (Some(a), Some(b)) => Coefficient::from_exact(a.add(b)),
            _ => Coefficient::from_complex(self.value + o.value),
        }
    }
}

impl<'a> Sub<&'a Coefficient> for &'a Coefficient {
    type Output = Coefficient;
    fn sub(self, o: &Coefficient) -> Coefficient {
        self + &(-o)
    }
}

impl<'a> Mul<&'a Coefficient> for &'a Coefficient {
    type Output = Coefficient;
    fn mul(self, o: &Coefficient) -> Coefficient {
        match (&self.exact, &o.exact) {
            (Some(a), Some(b)) => Coefficient::from_exact(a.mul(b)),
            _ => Coefficient::from_complex(self.value * o.value),
        }
    }
}

impl Neg for &Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        match &self.exact {
            Some(g) => Coefficient::from_exact(g.neg()),
            None => Coefficient::from_complex(-self.value),
        }
    }
}

impl From<Complex64> for Coefficient {
    fn from(z: Complex64) -> Self {
        Coefficient::from_complex(z)
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

// Display for f64 is the shortest string that parses back to x
fn fmt_float(x: f64) -> String {
    format!("{x}")
}

impl fmt::Display for Coefficient {
    /// Real exact values print as `p/q`; everything else as `(a+b*i)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some(g) if g.im.is_zero() => write!(f, "{}", fmt_rational(&g.re)),
            Some(g) => {
                let sign = if g.im.is_negative() { '-' } else { '+' };
                write!(f, "({}{}{}*i)", fmt_rational(&g.re), sign, fmt_rational(&g.im.abs()))
            }
            None => {
                let sign = if self.value.im.is_sign_negative() { '-' } else { '+' };
                write!(
                    f,
                    "({}{}{}*i)",
                    fmt_float(self.value.re),
                    sign,
                    fmt_float(self.value.im.abs())
                )
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_arithmetic_stays_exact() {
        let a = Coefficient::gaussian((-1, 2), (1, 2));
        let b = Coefficient::from_ratio(2, 3);
        let c = &(&a * &b) + &a;
        assert!(c.is_exact());
        assert_eq!(c, Coefficient::gaussian((-5, 6), (5, 6)));
        let d = &c + &Coefficient::from_complex(Complex64::new(1.0, 0.0));
        assert!(!d.is_exact());
    }

    #[test]
    fn powers_and_inverse() {
        let a = Coefficient::from_ratio(-1, 12);
        assert_eq!(a.pow(-2).unwrap(), Coefficient::from_i64(144));
        assert_eq!(a.pow(0).unwrap(), Coefficient::one());
        let i = Coefficient::gaussian((0, 1), (1, 1));
        assert_eq!(i.pow(4).unwrap(), Coefficient::one());
        assert_eq!(i.pow(-1).unwrap(), Coefficient::gaussian((0, 1), (-1, 1)));
        assert!(Coefficient::zero().inv().is_none());
    }

    #[test]
    fn display_forms() {
        assert_eq!(Coefficient::from_ratio(-1, 12).to_string(), "-1/12");
        assert_eq!(Coefficient::gaussian((1, 2), (-3, 4)).to_string(), "(1/2-3/4*i)");
        assert_eq!(
            Coefficient::from_complex(Complex64::new(0.1, 2.5)).to_string(),
            "(0.1+2.5*i)"
        );
    }
}
