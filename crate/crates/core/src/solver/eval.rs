//! Flattened complex polynomials for fast repeated evaluation.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::polynomial::LaurentPoly;

#[derive(Clone, Debug)]
pub(crate) struct Term {
    pub coef: Complex64,
    /// `(variable, power)` pairs with nonzero power.
    pub vars: Vec<(usize, i32)>,
}

impl Term {
    pub fn new(coef: Complex64, exps: &[i64]) -> Term {
        let vars = exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e != 0)
            .map(|(v, &e)| (v, e as i32))
            .collect();
        Term { coef, vars }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct PolySystem {
    pub nvars: usize,
    pub polys: Vec<Vec<Term>>,
}

impl PolySystem {
    pub fn from_polys(nvars: usize, polys: &[LaurentPoly]) -> PolySystem {
        let polys = polys
            .iter()
            .map(|p| p.terms().map(|(e, c)| Term::new(c.value(), e)).collect())
            .collect();
        PolySystem { nvars, polys }
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    /// Values into `f` and partial derivatives added (scaled by `scale`) into
    /// rows `row0..` of `jac`.
    pub fn eval_jac(
        &self,
        x: &[Complex64],
        scale: Complex64,
        f: &mut [Complex64],
        jac: &mut DMatrix<Complex64>,
        row0: usize,
    ) {
        let mut pows: Vec<Complex64> = Vec::with_capacity(8);
        let mut suffix: Vec<Complex64> = Vec::with_capacity(9);
        for (i, p) in self.polys.iter().enumerate() {
            let mut val = Complex64::new(0.0, 0.0);
            for t in p {
                pows.clear();
                pows.extend(t.vars.iter().map(|&(v, e)| x[v].powi(e)));
                suffix.clear();
                suffix.resize(pows.len() + 1, Complex64::new(1.0, 0.0));
                for k in (0..pows.len()).rev() {
                    suffix[k] = suffix[k + 1] * pows[k];
                }
                val += t.coef * suffix[0];
                let mut prefix = t.coef * scale;
                for (k, &(v, e)) in t.vars.iter().enumerate() {
                    let d = x[v].powi(e - 1) * e as f64;
                    jac[(row0 + i, v)] += prefix * d * suffix[k + 1];
                    prefix *= pows[k];
                }
            }
            f[i] = val;
        }
    }
}

pub(crate) fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::{default_names, parse_polynomial};

    #[test]
    fn jacobian_matches_symbolic_derivative() {
        let names = default_names(3);
        let p = parse_polynomial("3*x1^2*x2 - x2*x3^3 + 2*x1^-1 + 5", &names).unwrap();
        let sys = PolySystem::from_polys(3, std::slice::from_ref(&p));
        let x = [Complex64::new(0.3, 1.1), Complex64::new(-0.7, 0.2), Complex64::new(1.4, -0.5)];
        let mut f = [Complex64::new(0.0, 0.0)];
        let mut j = DMatrix::zeros(1, 3);
        sys.eval_jac(&x, Complex64::new(1.0, 0.0), &mut f, &mut j, 0);
        assert!((f[0] - p.eval(&x)).norm() < 1e-12);
        for v in 0..3 {
            assert!((j[(0, v)] - p.derivative(v).eval(&x)).norm() < 1e-12);
        }
    }
}
