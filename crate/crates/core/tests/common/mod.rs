#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use tropcert::polynomial::{Coefficient, LaurentPoly, LaurentSystem};
use tropcert::polytope::SupportSet;

/// A support with 2 to `max_points` points (at least two distinct) and
/// coordinates in `[0, 3)`.
pub fn random_support(rng: &mut impl Rng, n: usize, max_points: usize) -> SupportSet {
    loop {
        let k = rng.gen_range(2..=max_points);
        let pts: Vec<Vec<i64>> = (0..k).map(|_| (0..n).map(|_| rng.gen_range(0..3)).collect()).collect();
        let s = SupportSet::new(pts);
        if s.len() >= 2 {
            return s;
        }
    }
}

pub fn random_supports(rng: &mut impl Rng, n: usize, max_points: usize) -> Vec<SupportSet> {
    (0..n).map(|_| random_support(rng, n, max_points)).collect()
}

/// Random unit-modulus complex coefficients on the given supports.
pub fn random_system(rng: &mut impl Rng, supports: &[SupportSet]) -> LaurentSystem {
    let n = supports[0].dim();
    let polys = supports
        .iter()
        .map(|a| {
            LaurentPoly::from_terms(
                n,
                a.points().iter().map(|p| {
                    let c = Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
                    (p.clone(), Coefficient::from_complex(c))
                }),
            )
        })
        .collect();
    LaurentSystem::with_default_names(polys).unwrap()
}
