//! Coefficients of the second term `y_k = c_k + z_k t` by linear least
//! squares on the lowest order of the substituted system.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::eval::PolySystem;
use crate::polynomial::{LaurentPoly, LaurentSystem};
use crate::{Error, Result};

/// Rank and residual tolerances of the least-squares solve.
pub const RANK_TOL: f64 = 1e-10;
pub const SECOND_TERM_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub enum SecondTerm {
    /// `z_2, …, z_n`.
    Coefficients(Vec<Complex64>),
    /// The linear system is inconsistent: the initial root gives an isolated
    /// solution at infinity.
    NoSeries { residual: f64 },
    /// Rank deficient: a higher multiplicity is suspected.
    Underdetermined,
}

/// `sy` is the system after `x = y^M`, with `t = y_1` first; `root` holds
/// `c_2, …, c_n`, a root of the lowest-order part in `t`.
///
/// Each equation is divided by its lowest power of `t` and split as
/// `g_0(y') + t g_1(y') + O(t²)`. Substituting `y' = c + z t` leaves
/// `t (∇g_0(c)·z + g_1(c))` at order one, so `z` solves the overdetermined
/// system `∇g_0(c) z = -g_1(c)`.
pub fn second_term_linear(sy: &LaurentSystem, root: &[Complex64]) -> Result<SecondTerm> {
    let n = sy.nvars();
    if root.len() + 1 != n {
        return Err(Error::DimensionMismatch(format!("root of length {} for {n} variables", root.len())));
    }
    let m = n - 1;
    let rows = sy.len();
    let mut a = DMatrix::zeros(rows, m);
    let mut b = DVector::zeros(rows);
    for (i, f) in sy.polys().iter().enumerate() {
        let low = f.terms().map(|(e, _)| e[0]).min().ok_or(Error::ZeroEquation)?;
        let part = |k: i64| -> Result<LaurentPoly> {
            f.filter_terms(|e| e[0] == low + k)
                .shift(&std::iter::once(-(low + k)).chain(std::iter::repeat_n(0, m)).collect::<Vec<_>>())?
                .drop_variable(0)
        };
        let g0 = PolySystem::from_polys(m, &[part(0)?]);
        let g1 = part(1)?;
        let mut val = [Complex64::new(0.0, 0.0)];
        let mut jac = DMatrix::zeros(1, m);
        g0.eval_jac(root, Complex64::new(1.0, 0.0), &mut val, &mut jac, 0);
        a.row_mut(i).copy_from(&jac.row(0));
        b[i] = -g1.eval(root);
    }
    if m == 0 {
        let residual = b.iter().map(|z| z.norm()).fold(0.0, f64::max);
        return Ok(if residual < SECOND_TERM_TOL { SecondTerm::Coefficients(vec![]) } else { SecondTerm::NoSeries { residual } });
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    if svd.singular_values.iter().filter(|&&s| s > RANK_TOL * smax.max(1.0)).count() < m {
        return Ok(SecondTerm::Underdetermined);
    }
    let z = svd.solve(&b, 0.0).map_err(|e| Error::Shape(e.to_string()))?;
    let r = &a * &z - &b;
    let scale = b.iter().chain(a.iter()).map(|v| v.norm()).fold(1.0, f64::max);
    let residual = r.iter().map(|v| v.norm()).fold(0.0, f64::max) / scale;
    if residual < SECOND_TERM_TOL {
        Ok(SecondTerm::Coefficients(z.iter().copied().collect()))
    } else {
        Ok(SecondTerm::NoSeries { residual })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::parse_system;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn consistent_and_inconsistent_continuations() {
        // y2 = 1 - 3 t is a curve of both equations
        let s = parse_system("vars: t, y\ny - 1 + 3*t;\n y^2 - 1 + 6*t - 9*t^2;").unwrap();
        match second_term_linear(&s, &[c(1.0, 0.0)]).unwrap() {
            SecondTerm::Coefficients(z) => assert!((z[0] - c(-3.0, 0.0)).norm() < 1e-12),
            other => panic!("{other:?}"),
        }
        let s = parse_system("vars: t, y\ny - 1 + 3*t;\n y - 1 + 5*t;").unwrap();
        assert!(matches!(second_term_linear(&s, &[c(1.0, 0.0)]).unwrap(), SecondTerm::NoSeries { .. }));
    }

    #[test]
    fn rank_deficiency_is_flagged() {
        // the gradient of the lowest part vanishes at the double root y = 1
        let s = parse_system("vars: t, y\n(y - 1)^2 + t;\n (y - 1)^2 + 2*t;").unwrap();
        assert_eq!(second_term_linear(&s, &[c(1.0, 0.0)]).unwrap(), SecondTerm::Underdetermined);
    }

    #[test]
    fn cyclic4_series_terminates() {
        // cyclic 4-roots after x = y^M with tropism (1,-1,1,-1): the roots of
        // the lowest part continue with z = 0
        let s = parse_system(
            "vars: y1, y2, y3, y4\n\
             y1 + y1^-1*y2 + y1*y3 + y1^-1*y4;\n\
             y2 + y2*y3 + y3*y4 + y4;\n\
             y1*y2*y3 + y1^-1*y2*y3*y4 + y1*y3*y4 + y1^-1*y2*y4;\n\
             y2*y3*y4 - 1;",
        )
        .unwrap();
        for root in [[c(-1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(-1.0, 0.0), c(-1.0, 0.0)]] {
            match second_term_linear(&s, &root).unwrap() {
                SecondTerm::Coefficients(z) => assert!(z.iter().all(|v| v.norm() < 1e-12), "{z:?}"),
                other => panic!("{other:?}"),
            }
        }
    }
}
