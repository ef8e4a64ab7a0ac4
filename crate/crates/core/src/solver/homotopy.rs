//! Total-degree homotopy continuation in projective coordinates, slack
//! embedding, and Newton refinement.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::eval::{max_norm, PolySystem, Term};
use super::{NumericRoot, RootFlag, DIVERGENCE, NEWTON_MAX_ITERS, NEWTON_TOL};
use crate::polynomial::{Coefficient, LaurentPoly, LaurentSystem};
use crate::{Error, Result};

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

#[derive(Clone, Debug)]
pub struct SolverOptions {
    pub seed: u64,
    /// Upper bound on the total degree (number of paths).
    pub max_paths: usize,
    pub max_steps: usize,
    /// Regular roots need residual below this after refinement.
    pub residual_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { seed: 0xC0FFEE, max_paths: 100_000, max_steps: 20_000, residual_tol: 1e-10 }
    }
}

/// Endpoints of all paths: finite roots (regular or suspect), and counts of
/// paths that diverged or failed.
#[derive(Clone, Debug, Default)]
pub struct SolveReport {
    pub roots: Vec<NumericRoot>,
    pub at_infinity: usize,
    pub failures: usize,
    pub paths: usize,
    /// Paths tracked a second time with a reseeded homotopy.
    pub retried: usize,
}

impl SolveReport {
    pub fn regular_roots(&self) -> impl Iterator<Item = &NumericRoot> {
        self.roots.iter().filter(|r| r.is_regular())
    }
}

fn unit(rng: &mut impl Rng) -> C {
    C::from_polar(1.0, rng.gen_range(0.0..2.0 * PI))
}

/// Appends `γ_k s` to equation `k` of an `(n+1) × n` system, with `γ_k`
/// random on the unit circle; the slack `s` becomes the last variable.
pub fn embed_slack(s: &LaurentSystem, seed: u64) -> Result<LaurentSystem> {
    let n = s.nvars();
    if s.len() != n + 1 {
        return Err(Error::Shape(format!("slack embedding needs n+1 equations, got {} in {n} unknowns", s.len())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let mut names = s.names().to_vec();
    let mut slack = String::from("s");
    let mut k = 0;
    while names.contains(&slack) {
        slack = format!("s{k}");
        k += 1;
    }
    names.push(slack);
    let polys = s
        .polys()
        .iter()
        .map(|p| {
            let mut q = p.extend_variables(1);
            let mut e = vec![0; n + 1];
            e[n] = 1;
            q.add_term(e, Coefficient::from_complex(unit(&mut rng)));
            q
        })
        .collect();
    LaurentSystem::new(polys, names)
}

struct Homotopy {
    n: usize,
    /// target, homogenized with variable 0
    f: PolySystem,
    /// start system `x_i^{d_i} - γ_i x_0^{d_i}`
    g: PolySystem,
    gamma: C,
    patch: Vec<C>,
    start_roots: Vec<Vec<C>>,
}

impl Homotopy {
    fn new(shifted: &[LaurentPoly], degrees: &[i64], seed: u64) -> Homotopy {
        let n = shifted.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gamma = unit(&mut rng);
        let patch: Vec<C> = (0..=n).map(|_| unit(&mut rng)).collect();
        let mut f = Vec::with_capacity(n);
        let mut g = Vec::with_capacity(n);
        let mut start_roots = Vec::with_capacity(n);
        for (i, p) in shifted.iter().enumerate() {
            let d = degrees[i];
            f.push(
                p.terms()
                    .map(|(e, c)| {
                        let mut h = vec![d - e.iter().sum::<i64>()];
                        h.extend_from_slice(e);
                        Term::new(c.value(), &h)
                    })
                    .collect(),
            );
            let gi = unit(&mut rng);
            let mut xe = vec![0; n + 1];
            xe[i + 1] = d;
            let mut ze = vec![0; n + 1];
            ze[0] = d;
            g.push(vec![Term::new(ONE, &xe), Term::new(-gi, &ze)]);
            let base = gi.powf(1.0 / d as f64);
            start_roots.push((0..d).map(|k| base * C::from_polar(1.0, 2.0 * PI * k as f64 / d as f64)).collect());
        }
        Homotopy {
            n,
            f: PolySystem { nvars: n + 1, polys: f },
            g: PolySystem { nvars: n + 1, polys: g },
            gamma,
            patch,
            start_roots,
        }
    }

    fn start_point(&self, mut k: usize) -> Vec<C> {
        let mut x = vec![ONE];
        for roots in &self.start_roots {
            x.push(roots[k % roots.len()]);
            k /= roots.len();
        }
        let l: C = self.patch.iter().zip(&x).map(|(a, b)| a * b).sum();
        x.iter().map(|v| v / l).collect()
    }

    /// `H(x, t)`, `∂H/∂x` and `∂H/∂t` with the patch as the last row.
    fn eval(&self, x: &[C], t: f64, want_t: bool, jac: &mut DMatrix<C>, h: &mut [C], ht: &mut [C]) {
        let n = self.n;
        jac.fill(ZERO);
        let mut fv = vec![ZERO; n];
        let mut gv = vec![ZERO; n];
        let a = self.gamma * (1.0 - t);
        self.f.eval_jac(x, C::new(t, 0.0), &mut fv, jac, 0);
        self.g.eval_jac(x, a, &mut gv, jac, 0);
        for i in 0..n {
            h[i] = a * gv[i] + fv[i] * t;
            if want_t {
                ht[i] = fv[i] - self.gamma * gv[i];
            }
        }
        h[n] = self.patch.iter().zip(x).map(|(p, v)| p * v).sum::<C>() - ONE;
        ht[n] = ZERO;
        for (j, p) in self.patch.iter().enumerate() {
            jac[(n, j)] = *p;
        }
    }

    /// Newton at fixed `t`; `None` unless the updates contract quickly below
    /// `tol`.
    fn correct(&self, x: &mut [C], t: f64, iters: usize, tol: f64, bufs: &mut Bufs) -> bool {
        let mut prev = f64::INFINITY;
        for _ in 0..iters {
            self.eval(x, t, false, &mut bufs.jac, &mut bufs.h, &mut bufs.ht);
            let rhs = DVector::from_iterator(self.n + 1, bufs.h.iter().map(|v| -v));
            let Some(dx) = bufs.jac.clone().lu().solve(&rhs) else {
                return false;
            };
            let step = dx.iter().map(|z| z.norm()).fold(0.0, f64::max);
            for (xi, d) in x.iter_mut().zip(dx.iter()) {
                *xi += d;
            }
            let scale = max_norm(x).max(1.0);
            if step <= tol * scale {
                return true;
            }
            if step > 0.5 * prev {
                return false;
            }
            prev = step;
        }
        false
    }

    /// Tracks from `t = 0` until `t = 1`, or until the step size stalls.
    /// Also returns the rate `r` in `|x_0| / |x| ~ (1-t)^r` estimated over
    /// the last stretch with `1 - t < 1e-2`, when it spans two decades.
    fn track(&self, start: Vec<C>, max_steps: usize) -> (Vec<C>, f64, Option<f64>) {
        const H_MAX: f64 = 0.05;
        const H_MIN: f64 = 1e-10;
        let m = self.n + 1;
        let mut bufs = Bufs::new(m);
        let mut x = start;
        let mut t = 0.0;
        let mut h: f64 = 0.01;
        let mut streak = 0;
        let mut first_near: Option<(f64, f64)> = None;
        let mut last_near: Option<(f64, f64)> = None;
        for _ in 0..max_steps {
            if t >= 1.0 {
                break;
            }
            let step = h.min(1.0 - t);
            self.eval(&x, t, true, &mut bufs.jac, &mut bufs.h, &mut bufs.ht);
            let rhs = DVector::from_iterator(m, bufs.ht.iter().map(|v| -v));
            let dxdt = bufs.jac.clone().lu().solve(&rhs);
            let mut trial = x.clone();
            let t1 = if step == 1.0 - t { 1.0 } else { t + step };
            let ok = match dxdt {
                Some(d) => {
                    for (xi, di) in trial.iter_mut().zip(d.iter()) {
                        *xi += di * step;
                    }
                    self.correct(&mut trial, t1, 4, 1e-9, &mut bufs)
                }
                None => false,
            };
            if ok {
                x = trial;
                t = t1;
                if t < 1.0 && 1.0 - t < 1e-2 {
                    let sample = (1.0 - t, x[0].norm() / max_norm(&x));
                    first_near.get_or_insert(sample);
                    last_near = Some(sample);
                }
                streak += 1;
                if streak >= 3 {
                    h = (h * 2.0).min(H_MAX);
                    streak = 0;
                }
            } else {
                h *= 0.5;
                streak = 0;
                if h < H_MIN {
                    break;
                }
            }
        }
        let rate = match (first_near, last_near) {
            (Some((d0, r0)), Some((d1, r1))) if d1 < 1e-2 * d0 && r0 > 0.0 && r1 > 0.0 => Some((r0 / r1).ln() / (d0 / d1).ln()),
            _ => None,
        };
        (x, t, rate)
    }
}

struct Bufs {
    jac: DMatrix<C>,
    h: Vec<C>,
    ht: Vec<C>,
}

impl Bufs {
    fn new(m: usize) -> Bufs {
        Bufs { jac: DMatrix::zeros(m, m), h: vec![ZERO; m], ht: vec![ZERO; m] }
    }
}

enum PathEnd {
    Finite(NumericRoot),
    Infinity,
    Failed,
}

/// Newton on a square or overdetermined system (least squares steps).
fn newton(sys: &PolySystem, x: &mut [C], iters: usize) -> (f64, f64) {
    let (rows, cols) = (sys.len(), sys.nvars);
    let mut f = vec![ZERO; rows];
    let mut jac = DMatrix::zeros(rows, cols);
    for _ in 0..iters {
        jac.fill(ZERO);
        sys.eval_jac(x, ONE, &mut f, &mut jac, 0);
        if max_norm(&f) < NEWTON_TOL * 1e-3 {
            break;
        }
        let rhs = DVector::from_iterator(rows, f.iter().map(|v| -v));
        let dx = if rows == cols {
            jac.clone().lu().solve(&rhs)
        } else {
            jac.clone().svd(true, true).solve(&rhs, 1e-14).ok()
        };
        let Some(dx) = dx else { break };
        let step = dx.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (xi, d) in x.iter_mut().zip(dx.iter()) {
            *xi += d;
        }
        if !step.is_finite() || step <= 1e-15 * max_norm(x).max(1.0) {
            break;
        }
    }
    jac.fill(ZERO);
    sys.eval_jac(x, ONE, &mut f, &mut jac, 0);
    let sv = jac.singular_values();
    let (lo, hi) = sv.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &s| (lo.min(s), hi.max(s)));
    let cond = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    (max_norm(&f), cond)
}

const COND_MAX: f64 = 1e10;
/// Paths stalling near `t = 1` with `|x_0| / |x|` shrinking at least like
/// this power of `1 - t` are counted at infinity.
const DECAY_RATE: f64 = 0.05;

fn classify(affine: &PolySystem, tol: f64, mut x: Vec<C>) -> NumericRoot {
    let (res, cond) = newton(affine, &mut x, NEWTON_MAX_ITERS);
    let flag = if res < tol && cond < COND_MAX && x.iter().all(|z| z.is_finite()) {
        RootFlag::Regular
    } else {
        RootFlag::Suspect
    };
    NumericRoot::numeric(x, res, flag)
}

impl Homotopy {
    fn run(&self, k: usize, affine: &PolySystem, opts: &SolverOptions) -> PathEnd {
        let (mut x, t, rate) = self.track(self.start_point(k), opts.max_steps);
        if t < 0.999 || x.iter().any(|z| !z.is_finite()) {
            return PathEnd::Failed;
        }
        let before = x.clone();
        let mut bufs = Bufs::new(self.n + 1);
        let converged = self.correct(&mut x, 1.0, NEWTON_MAX_ITERS, 1e-13, &mut bufs);
        if !converged {
            x = before;
            // a stalled path whose homogenizing coordinate still decays
            if t < 1.0 && rate.is_some_and(|r| r > DECAY_RATE) {
                return PathEnd::Infinity;
            }
        }
        let scale = max_norm(&x);
        let x0 = x[0];
        if x0.norm() * DIVERGENCE < scale {
            return PathEnd::Infinity;
        }
        let affine_x: Vec<C> = x[1..].iter().map(|v| v / x0).collect();
        let root = classify(affine, opts.residual_tol, affine_x);
        if !converged && !root.is_regular() && max_norm(&root.coords) > DIVERGENCE {
            return PathEnd::Infinity;
        }
        PathEnd::Finite(root)
    }
}

fn same_point(a: &[C], b: &[C], tol: f64) -> bool {
    let scale = max_norm(a).max(1.0);
    a.iter().zip(b).all(|(u, v)| (u - v).norm() <= tol * scale)
}

/// All isolated roots of a square system by a total-degree homotopy with
/// default options and the given seed.
pub fn solve_square_numeric(s: &LaurentSystem, seed: u64) -> Result<SolveReport> {
    solve_square_numeric_with(s, &SolverOptions { seed, ..SolverOptions::default() })
}

/// Every equation is first divided by its common monomial, so Laurent
/// systems are solved through polynomial ones; roots with zero coordinates
/// of the shifted system are reported like any other.
pub fn solve_square_numeric_with(s: &LaurentSystem, opts: &SolverOptions) -> Result<SolveReport> {
    let n = s.nvars();
    if n == 0 || s.is_empty() {
        return Err(Error::EmptyInput);
    }
    if s.len() != n {
        return Err(Error::Shape(format!("{} equations in {n} unknowns", s.len())));
    }
    let shifted: Vec<LaurentPoly> = s.polys().iter().map(|p| p.divide_common_monomial().0).collect();
    if shifted.iter().any(LaurentPoly::is_zero) {
        return Err(Error::ZeroEquation);
    }
    let degrees: Vec<i64> = shifted
        .iter()
        .map(|p| p.terms().map(|(e, _)| e.iter().sum::<i64>()).max().unwrap_or(0))
        .collect();
    if degrees.contains(&0) {
        // a nonzero constant equation
        return Ok(SolveReport::default());
    }
    let mut total: usize = 1;
    for &d in &degrees {
        total = total
            .checked_mul(d as usize)
            .filter(|&t| t <= opts.max_paths)
            .ok_or_else(|| Error::Shape(format!("total degree exceeds the path limit {}", opts.max_paths)))?;
    }
    let affine = PolySystem::from_polys(n, &shifted);
    let first = Homotopy::new(&shifted, &degrees, opts.seed);
    let ends: Vec<PathEnd> = (0..total).into_par_iter().map(|k| first.run(k, &affine, opts)).collect();

    let mut report = SolveReport { paths: total, ..SolveReport::default() };
    let mut retry = Vec::new();
    for (k, end) in ends.into_iter().enumerate() {
        if !absorb(&mut report, end) {
            retry.push(k);
        }
    }
    if !retry.is_empty() {
        let second = Homotopy::new(&shifted, &degrees, opts.seed.wrapping_add(1));
        report.retried = retry.len();
        let ends: Vec<PathEnd> = retry.par_iter().map(|&k| second.run(k, &affine, opts)).collect();
        for end in ends {
            if !absorb(&mut report, end) {
                report.failures += 1;
            }
        }
    }
    Ok(report)
}

/// Records a path end; `false` for failures and for regular roots already
/// found by another path (a jump between paths).
fn absorb(report: &mut SolveReport, end: PathEnd) -> bool {
    match end {
        PathEnd::Infinity => {
            report.at_infinity += 1;
            true
        }
        PathEnd::Failed => false,
        PathEnd::Finite(root) => {
            if root.is_regular() {
                if report.roots.iter().any(|r| r.is_regular() && same_point(&r.coords, &root.coords, 1e-8)) {
                    return false;
                }
            } else if report.roots.iter().any(|r| !r.is_regular() && same_point(&r.coords, &root.coords, 1e-5)) {
                return true;
            }
            report.roots.push(root);
            true
        }
    }
}

/// Gauss-Newton refinement of a root of a possibly overdetermined system.
pub fn refine_overdetermined(s: &LaurentSystem, x: &[C]) -> NumericRoot {
    let sys = PolySystem::from_polys(s.nvars(), s.polys());
    let mut y = x.to_vec();
    let (res, cond) = newton(&sys, &mut y, NEWTON_MAX_ITERS);
    let flag = if res < 1e-10 && cond < COND_MAX { RootFlag::Regular } else { RootFlag::Suspect };
    NumericRoot::numeric(y, res, flag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::parse_system;

    fn sorted_re(r: &SolveReport) -> Vec<f64> {
        let mut v: Vec<f64> = r.regular_roots().map(|x| x.coords[0].re).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn quadratic() {
        let r = solve_square_numeric(&parse_system("x^2 - 1;").unwrap(), 1).unwrap();
        let v = sorted_re(&r);
        assert_eq!(v.len(), 2);
        assert!((v[0] + 1.0).abs() < 1e-12 && (v[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bilinear_pair_has_two_roots_at_infinity() {
        // mixed volume 2, total degree 4
        let s = parse_system("x*y + 3*x - 2*y - 4;\n2*x*y - x + y - 3;").unwrap();
        let r = solve_square_numeric(&s, 7).unwrap();
        assert_eq!(r.paths, 4);
        assert_eq!(r.regular_roots().count(), 2);
        assert_eq!(r.at_infinity, 2);
        for root in r.regular_roots() {
            assert!(root.residual < 1e-10);
        }
    }

    #[test]
    fn embedding_shape_and_true_root() {
        let s = parse_system("y - 1;\ny^2 - 1;").unwrap();
        let e = embed_slack(&s, 3).unwrap();
        assert_eq!((e.len(), e.nvars()), (2, 2));
        assert_eq!(e.names()[1], "s");
        let r = solve_square_numeric(&e, 3).unwrap();
        let hits: Vec<_> = r
            .regular_roots()
            .cloned()
            .map(NumericRoot::split_slack)
            .filter(|x| x.slack_is_zero())
            .collect();
        assert_eq!(hits.len(), 1);
        assert!((hits[0].coords[0] - ONE).norm() < 1e-12);
        assert!(embed_slack(&e, 3).is_err());
    }

    #[test]
    fn consistent_overdetermined_roots_have_zero_slack() {
        // (x, y) = (1, 2) and (2, -1) satisfy all three equations
        let s = parse_system("x^2 - 3*x + 2;\n (y-2)*(y+1);\n 3*x + y - 5;").unwrap();
        let e = embed_slack(&s, 9).unwrap();
        let r = solve_square_numeric(&e, 9).unwrap();
        let mut found: Vec<(f64, f64)> = r
            .regular_roots()
            .cloned()
            .map(NumericRoot::split_slack)
            .filter(|x| x.slack_is_zero())
            .map(|x| (x.coords[0].re, x.coords[1].re))
            .collect();
        found.sort_by(|a, b| a.0.total_cmp(&b.0));
        assert_eq!(found.len(), 2);
        assert!((found[0].0 - 1.0).abs() < 1e-10 && (found[0].1 - 2.0).abs() < 1e-10);
        assert!((found[1].0 - 2.0).abs() < 1e-10 && (found[1].1 + 1.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_non_square_and_large_degree() {
        assert!(solve_square_numeric(&parse_system("x + y;").unwrap(), 0).is_err());
        let s = parse_system("x^400 - 1;\ny^400 - 1;").unwrap();
        assert!(solve_square_numeric(&s, 0).is_err());
    }
}
