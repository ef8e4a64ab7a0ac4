//! Puiseux series certificates for solution curves: assembly from initial
//! roots, verification by substitution, degrees, and the whole pipeline from
//! tropisms to certificates.

use std::fmt;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::lattice::{normalize_direction, unimodular_with_first_column, IntMatrix, IntVector};
use crate::polynomial::{substitute_series, Coefficient, LaurentPoly, LaurentSystem, SeriesPoint};
use crate::solver::{
    binomial_normal_form, embed_slack, refine_overdetermined, second_term_linear, solve_binomial_square,
    solve_square_numeric, NumericRoot, SecondTerm, SolveReport,
};
use crate::tropism::{enumerate_pretropisms, initial_form_system};
use crate::{Error, Result};

/// Values below this magnitude count as zero in exact-zero detection.
pub const EXACT_ZERO_TOL: f64 = 1e-12;
/// Parameter values at which an exact curve is sampled.
pub const SAMPLE_T: [f64; 3] = [0.1, 0.7, 1.3];
/// Relative threshold below which a substituted t-coefficient is treated as
/// vanished when measuring orders.
pub const ORDER_TOL: f64 = 1e-8;
/// Initial roots closer than this to a coordinate hyperplane are discarded.
pub const TORUS_TOL: f64 = 1e-8;
/// Residual a refined initial root must reach to be kept.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-10;
/// Orders above the lowest one that `verify` inspects.
const ORDER_WINDOW: i64 = 3;

pub const CURVE_CAVEAT: &str =
    "curves inside a hyperplane x1 = constant are not detected and do not count toward the degree";

/// Increase of the lowest surviving order in `t` when the second term is
/// added, or exact vanishing of the system along the curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderGain {
    Gain(u32),
    ExactZero,
}

impl OrderGain {
    /// A gain of at least one (or exact vanishing) certifies the branch.
    pub fn certifies(self) -> bool {
        !matches!(self, OrderGain::Gain(0))
    }
}

impl fmt::Display for OrderGain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderGain::Gain(g) => write!(f, "{g}"),
            OrderGain::ExactZero => write!(f, "exact-zero"),
        }
    }
}

impl Serialize for OrderGain {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            OrderGain::Gain(g) => s.serialize_u32(*g),
            OrderGain::ExactZero => s.serialize_str("exact-zero"),
        }
    }
}

impl<'de> Deserialize<'de> for OrderGain {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(u32),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Int(g) => Ok(OrderGain::Gain(g)),
            Repr::Text(t) if t == "exact-zero" => Ok(OrderGain::ExactZero),
            Repr::Text(t) => Err(serde::de::Error::custom(format!("unknown order gain {t:?}"))),
        }
    }
}

/// Leading term `x_k = c_k t^{ν_k}` of a curve branch, optionally with the
/// second term `d_k t^{μ_k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub tropism: IntVector,
    pub nu1: i64,
    pub exponents: Vec<i64>,
    pub leading: Vec<Coefficient>,
    pub second_exponents: Option<Vec<i64>>,
    pub second: Option<Vec<Coefficient>>,
    pub transform: IntMatrix,
    /// The root `(y_2, …, y_n)` of the reduced initial system it came from.
    pub initial_root: Option<NumericRoot>,
    pub verified: Option<OrderGain>,
}

impl Certificate {
    /// A one-term certificate along the tropism `v`. The tropism must be
    /// primitive with positive first entry.
    pub fn from_leading(tropism: IntVector, leading: Vec<Coefficient>) -> Result<Certificate> {
        let v = normalize_direction(&tropism)?;
        if v != tropism {
            return Err(Error::NotPrimitive(format!("{tropism} is not normalized")));
        }
        if !v.0[0].is_positive() {
            return Err(Error::Shape(format!("tropism {v} has no positive first entry")));
        }
        if leading.len() != v.len() {
            return Err(Error::DimensionMismatch(format!("{} coefficients for {} variables", leading.len(), v.len())));
        }
        if leading.iter().any(Coefficient::is_zero) {
            return Err(Error::Shape("zero leading coefficient".into()));
        }
        let exponents = v.to_i64s().ok_or(Error::ExponentOverflow)?;
        let transform = unimodular_with_first_column(&v)?;
        Ok(Certificate {
            nu1: exponents[0],
            exponents,
            leading,
            second_exponents: None,
            second: None,
            transform,
            tropism: v,
            initial_root: None,
            verified: None,
        })
    }

    /// Adds second-term coefficients at exponents `ν + 1`.
    pub fn with_second(mut self, d: Vec<Coefficient>) -> Result<Certificate> {
        if d.len() != self.len() {
            return Err(Error::DimensionMismatch(format!("{} second coefficients for {} variables", d.len(), self.len())));
        }
        self.second_exponents = Some(self.exponents.iter().map(|e| e + 1).collect());
        self.second = Some(d);
        Ok(self)
    }

    /// Assembles the certificate for a root `c = (y_2, …, y_n)` of the
    /// reduced initial system and second-term coefficients `z` in the
    /// transformed coordinates, using `x_k = t^{v_k} Π y_i^{M_ki}`.
    pub fn from_root(tropism: IntVector, root: NumericRoot, z: Option<&[Complex64]>) -> Result<Certificate> {
        let m = unimodular_with_first_column(&tropism)?;
        let n = tropism.len();
        if root.len() + 1 != n {
            return Err(Error::DimensionMismatch(format!("root of length {} for {n} variables", root.len())));
        }
        let rows = m.to_rows_i64().ok_or(Error::ExponentOverflow)?;
        let ys = root.coefficients();
        let mut leading = Vec::with_capacity(n);
        for row in &rows {
            let mut c = Coefficient::one();
            for (y, &e) in ys.iter().zip(&row[1..]) {
                c = &c * &y.pow(e).ok_or(Error::Singular)?;
            }
            leading.push(c);
        }
        let mut cert = Certificate::from_leading(tropism, leading)?;
        if let Some(z) = z {
            let d: Vec<Complex64> = rows
                .iter()
                .zip(&cert.leading)
                .map(|(row, c)| {
                    let s: Complex64 = row[1..].iter().zip(z).zip(&root.coords).map(|((&e, zi), yi)| zi / yi * e as f64).sum();
                    c.value() * s
                })
                .collect();
            let scale = cert.leading.iter().map(Coefficient::norm).fold(1.0, f64::max);
            if d.iter().any(|v| v.norm() >= EXACT_ZERO_TOL * scale) {
                cert = cert.with_second(d.into_iter().map(Coefficient::from_complex).collect())?;
            }
        }
        cert.initial_root = Some(root);
        Ok(cert)
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn series(&self) -> SeriesPoint {
        let s = SeriesPoint::leading(self.exponents.clone(), self.leading.clone());
        match (&self.second_exponents, &self.second) {
            (Some(e), Some(d)) => s.with_second(e.clone(), d.clone()),
            _ => s,
        }
    }

    /// `max(ν ∪ {0}) - min(ν ∪ {0})`, the degree of one branch.
    pub fn spread(&self) -> i64 {
        let hi = self.exponents.iter().copied().fold(0, i64::max);
        let lo = self.exponents.iter().copied().fold(0, i64::min);
        hi - lo
    }

    pub fn to_json(&self) -> Value {
        let terms = |e: &[i64], c: &[Coefficient]| -> Value {
            Value::Array(
                e.iter()
                    .zip(c)
                    .map(|(e, c)| json!({"exp": e, "re": c.value().re, "im": c.value().im}))
                    .collect(),
            )
        };
        let mut obj = json!({
            "tropism": self.exponents,
            "nu1": self.nu1,
            "leading": terms(&self.exponents, &self.leading),
            "transform": self.transform.to_rows_i64(),
            "degree": degree(self, 1),
        });
        if let (Some(e), Some(d)) = (&self.second_exponents, &self.second) {
            obj["second"] = terms(e, d);
        }
        if let Some(g) = self.verified {
            obj["verified_order_gain"] = serde_json::to_value(g).expect("serializable");
        }
        obj
    }

    /// Reads the schema written by [`Certificate::to_json`]. Coefficients
    /// come back as doubles without exact shadows.
    pub fn from_json(value: &Value) -> Result<Certificate> {
        let bad = |what: &str| Error::Shape(format!("certificate JSON: {what}"));
        let ints = |v: &Value| -> Option<Vec<i64>> { v.as_array()?.iter().map(Value::as_i64).collect() };
        let terms = |v: &Value| -> Option<(Vec<i64>, Vec<Coefficient>)> {
            let mut es = Vec::new();
            let mut cs = Vec::new();
            for t in v.as_array()? {
                es.push(t.get("exp")?.as_i64()?);
                cs.push(Coefficient::from_complex(Complex64::new(t.get("re")?.as_f64()?, t.get("im")?.as_f64()?)));
            }
            Some((es, cs))
        };
        let v = ints(value.get("tropism").ok_or_else(|| bad("missing tropism"))?).ok_or_else(|| bad("tropism"))?;
        let (exps, leading) = terms(value.get("leading").ok_or_else(|| bad("missing leading"))?).ok_or_else(|| bad("leading"))?;
        if exps != v {
            return Err(bad("leading exponents differ from the tropism"));
        }
        let mut cert = Certificate::from_leading(IntVector::from_i64s(&v), leading)?;
        if let Some(nu1) = value.get("nu1") {
            if nu1.as_i64() != Some(cert.nu1) {
                return Err(bad("nu1 differs from the first tropism entry"));
            }
        }
        if let Some(rows) = value.get("transform") {
            let rows: Vec<Vec<i64>> =
                rows.as_array().and_then(|r| r.iter().map(ints).collect()).ok_or_else(|| bad("transform"))?;
            let m = IntMatrix::from_rows(&rows)?;
            if !m.is_square() || m.rows() != cert.len() || !m.is_unimodular() || m.col(0) != cert.tropism {
                return Err(bad("transform is not unimodular with the tropism as first column"));
            }
            cert.transform = m;
        }
        if let Some(s) = value.get("second") {
            let (e, d) = terms(s).ok_or_else(|| bad("second"))?;
            if e.len() != cert.len() {
                return Err(bad("second term length"));
            }
            cert.second_exponents = Some(e);
            cert.second = Some(d);
        }
        if let Some(g) = value.get("verified_order_gain") {
            cert.verified = Some(serde_json::from_value(g.clone()).map_err(|e| bad(&e.to_string()))?);
        }
        Ok(cert)
    }
}

/// Exact values in full, doubles to ten decimals with negligible parts dropped.
fn short(c: &Coefficient) -> String {
    if c.is_exact() {
        return c.to_string();
    }
    let z = c.value();
    let tiny = 1e-12 * z.norm().max(1.0);
    let num = |x: f64| {
        let s = format!("{x:.10}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" { "0".to_string() } else { s.to_string() }
    };
    match (z.re.abs() > tiny, z.im.abs() > tiny) {
        (_, false) => num(z.re),
        (false, true) => format!("{}*i", num(z.im)),
        (true, true) => format!("({}{}{}*i)", num(z.re), if z.im < 0.0 { "-" } else { "+" }, num(z.im.abs())),
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let series = self.series();
        for k in 0..self.len() {
            write!(f, "x{} = {}*t^{}", k + 1, short(&self.leading[k]), self.exponents[k])?;
            if let (Some(e), Some(d)) = (&series.second_exponents, &series.second_coefficients) {
                if d[k].norm() >= EXACT_ZERO_TOL * self.leading[k].norm().max(1.0) {
                    let term = short(&d[k]);
                    match term.strip_prefix('-') {
                        Some(rest) => write!(f, " - {rest}*t^{}", e[k])?,
                        None => write!(f, " + {term}*t^{}", e[k])?,
                    }
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Lowest exponent of `p` (a polynomial in `t`) whose coefficient exceeds
/// `tol`, or `None` when all vanish.
fn lowest_order(p: &LaurentPoly, tol: f64) -> Option<i64> {
    p.terms().filter(|(_, c)| c.norm() > tol).map(|(e, _)| e[0]).min()
}

/// Substitutes the certificate into `s`. Returns the exact-zero marker when
/// every equation vanishes identically on the sampled values of `t` (or in
/// exact arithmetic), otherwise the smallest over all equations of the order
/// gained by the second term beyond what the leading term alone guarantees.
pub fn verify(s: &LaurentSystem, cert: &Certificate) -> Result<OrderGain> {
    if s.nvars() != cert.len() {
        return Err(Error::DimensionMismatch(format!("certificate for {} variables, system in {}", cert.len(), s.nvars())));
    }
    let series = cert.series();
    let first = series.first_term();
    let vanishes = |pt: &SeriesPoint| {
        SAMPLE_T.iter().all(|&t| s.eval(&pt.eval(Complex64::new(t, 0.0))).iter().all(|v| v.norm() < EXACT_ZERO_TOL))
    };
    if vanishes(&first) && vanishes(&series) {
        return Ok(OrderGain::ExactZero);
    }
    let mut gain: Option<i64> = None;
    let mut all_exact_zero = true;
    for f in s.polys() {
        let low = f
            .terms()
            .map(|(a, _)| a.iter().zip(&cert.exponents).map(|(x, y)| x * y).sum::<i64>())
            .min()
            .ok_or(Error::ZeroEquation)?;
        let cut = low + ORDER_WINDOW;
        let scale = f
            .terms()
            .map(|(a, c)| {
                c.norm() * a.iter().zip(&cert.leading).map(|(&e, y)| y.norm().powi(e as i32)).product::<f64>()
            })
            .fold(1.0, f64::max);
        let one = substitute_series(f, &first, cut)?;
        let two = substitute_series(f, &series, cut)?;
        if one.is_exact() && two.is_exact() && two.is_zero() {
            continue;
        }
        all_exact_zero = false;
        let o1 = lowest_order(&one, ORDER_TOL * scale).unwrap_or(cut + 1);
        let o2 = lowest_order(&two, ORDER_TOL * scale).unwrap_or(cut + 1);
        let g = (o2 - o1.min(low + 1)).max(0);
        gain = Some(gain.map_or(g, |h| h.min(g)));
    }
    if all_exact_zero {
        return Ok(OrderGain::ExactZero);
    }
    Ok(OrderGain::Gain(gain.unwrap_or(0) as u32))
}

/// Degree of the curve with `root_count` branches along the certificate's
/// tropism.
pub fn degree(cert: &Certificate, root_count: usize) -> i64 {
    root_count as i64 * cert.spread()
}

/// Degree of one branch as the t-degree spread of `γ_0 + Σ γ_k x_k(t)` for
/// random `γ`, computed from the leading terms.
pub fn degree_by_hyperplane(cert: &Certificate, seed: u64) -> Result<i64> {
    let n = cert.len();
    let first = cert.series().first_term();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..2 {
        let gamma: Vec<Complex64> = (0..=n).map(|_| Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))).collect();
        let mut h = LaurentPoly::constant(n, Coefficient::from_complex(gamma[0]));
        for k in 0..n {
            let mut e = vec![0; n];
            e[k] = 1;
            h.add_term(e, Coefficient::from_complex(gamma[k + 1]));
        }
        let hi = first.exponents.iter().copied().fold(0, i64::max);
        let p = substitute_series(&h, &first, hi)?;
        // magnitudes summed into each power, to detect cancellation
        let mut mass = std::collections::BTreeMap::<i64, f64>::new();
        *mass.entry(0).or_default() += 1.0;
        for (e, c) in first.exponents.iter().zip(&first.coefficients) {
            *mass.entry(*e).or_default() += c.norm();
        }
        let cancelled = mass.iter().any(|(e, m)| p.coefficient(&[*e]).map_or(0.0, Coefficient::norm) < 1e-10 * m);
        if cancelled {
            continue;
        }
        let lo = p.terms().map(|(e, _)| e[0]).min().unwrap_or(0);
        let hi = p.terms().map(|(e, _)| e[0]).max().unwrap_or(0);
        return Ok(hi - lo);
    }
    Err(Error::Shape("hyperplane coefficients cancel after reseeding".into()))
}

/// The system along a tropism after `x = y^M`: the full transformed system
/// with `y_1 = t` first, and the reduced initial system in `y_2, …, y_n`.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub tropism: IntVector,
    pub transform: IntMatrix,
    pub full: LaurentSystem,
    pub initial: LaurentSystem,
}

/// Transforms `s` and its initial form along `v` by the unimodular matrix
/// with first column `v`, dividing the initial form by its power of `y_1`.
pub fn reduce(s: &LaurentSystem, v: &IntVector) -> Result<Reduction> {
    let n = s.nvars();
    if v.len() != n {
        return Err(Error::DimensionMismatch(format!("direction of length {} for {n} variables", v.len())));
    }
    if n < 2 {
        return Err(Error::Shape("curves need at least two variables".into()));
    }
    let m = unimodular_with_first_column(v)?;
    let names: Vec<String> = (1..=n).map(|i| format!("y{i}")).collect();
    let full = LaurentSystem::new(s.power_transform(&m)?.polys().to_vec(), names.clone())?;
    let initial = initial_form_system(s, v).power_transform(&m)?;
    let reduced = initial
        .polys()
        .iter()
        .map(|p| {
            let mut shift = vec![0; n];
            shift[0] = -p.min_exponent()[0];
            p.shift(&shift)?.drop_variable(0)
        })
        .collect::<Result<Vec<_>>>()?;
    let initial = LaurentSystem::new(reduced, names[1..].to_vec())?;
    Ok(Reduction { tropism: v.clone(), transform: m, full, initial })
}

/// How the roots of a reduced initial system were obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialSolve {
    Binomial,
    Square,
    Slack,
}

/// Roots in the torus of a reduced initial system.
#[derive(Clone, Debug)]
pub struct InitialRoots {
    pub method: InitialSolve,
    pub roots: Vec<NumericRoot>,
    /// The numeric solve of the (embedded) square system, when one ran.
    pub report: Option<SolveReport>,
    /// `|det|` of the binomial exponent matrix, when binomial.
    pub binomial_det: Option<u64>,
}

/// Solves the reduced initial system: exactly when it is a square binomial
/// system, by homotopy when square, and through the slack embedding when it
/// has one equation too many.
pub fn solve_initial(initial: &LaurentSystem, seed: u64) -> Result<InitialRoots> {
    let m = initial.nvars();
    let eqs = initial.len();
    if eqs == m && initial.polys().iter().all(|p| p.num_terms() == 2) {
        let nf = binomial_normal_form(initial)?;
        return match solve_binomial_square(&nf.a, &nf.c) {
            Ok(roots) => {
                let count = roots.len() as u64;
                Ok(InitialRoots { method: InitialSolve::Binomial, roots, report: None, binomial_det: Some(count) })
            }
            Err(Error::Singular) => {
                Ok(InitialRoots { method: InitialSolve::Binomial, roots: vec![], report: None, binomial_det: Some(0) })
            }
            Err(e) => Err(e),
        };
    }
    if eqs == m {
        let report = solve_square_numeric(initial, seed)?;
        let roots = report.regular_roots().filter(|r| r.in_torus(TORUS_TOL)).cloned().collect();
        return Ok(InitialRoots { method: InitialSolve::Square, roots, report: Some(report), binomial_det: None });
    }
    if eqs == m + 1 {
        let embedded = embed_slack(initial, seed)?;
        let report = solve_square_numeric(&embedded, seed)?;
        let mut roots: Vec<NumericRoot> = Vec::new();
        for r in report.regular_roots() {
            let r = r.clone().split_slack();
            if !r.slack_is_zero() || !r.in_torus(TORUS_TOL) {
                continue;
            }
            let refined = refine_overdetermined(initial, &r.coords);
            if refined.residual >= ROOT_RESIDUAL_TOL || !refined.in_torus(TORUS_TOL) {
                continue;
            }
            let dup = roots.iter().any(|q| {
                q.coords.iter().zip(&refined.coords).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) < 1e-8
            });
            if !dup {
                roots.push(NumericRoot { slack: r.slack, ..refined });
            }
        }
        return Ok(InitialRoots { method: InitialSolve::Slack, roots, report: Some(report), binomial_det: None });
    }
    Err(Error::Shape(format!("{eqs} equations in {m} unknowns after reduction")))
}

/// Outcome of one tropism, or of the whole system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    NoTropism,
    NoRootAtInfinity,
    NoSeries,
    Certificate,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::NoTropism => "no tropism",
            Outcome::NoRootAtInfinity => "no root at infinity",
            Outcome::NoSeries => "no series",
            Outcome::Certificate => "certificate",
        })
    }
}

/// Why an initial root produced no certificate.
#[derive(Clone, Debug, PartialEq)]
pub enum Rejection {
    /// The second-term system is inconsistent: an isolated root at infinity.
    NoSeries { residual: f64 },
    /// The second-term system is rank deficient.
    Underdetermined,
    /// The assembled certificate failed verification.
    Unverified(OrderGain),
}

#[derive(Clone, Debug)]
pub struct RejectedRoot {
    pub root: NumericRoot,
    pub reason: Rejection,
}

#[derive(Clone, Debug)]
pub struct TropismReport {
    pub tropism: IntVector,
    pub outcome: Outcome,
    pub method: Option<InitialSolve>,
    /// Number of roots of the reduced initial system in the torus.
    pub initial_roots: usize,
    pub certificates: Vec<Certificate>,
    pub rejected: Vec<RejectedRoot>,
    /// Sum of the branch degrees of the certificates.
    pub degree: i64,
    pub error: Option<String>,
}

impl TropismReport {
    fn failed(tropism: IntVector, e: Error) -> TropismReport {
        TropismReport {
            tropism,
            outcome: Outcome::NoRootAtInfinity,
            method: None,
            initial_roots: 0,
            certificates: vec![],
            rejected: vec![],
            degree: 0,
            error: Some(e.to_string()),
        }
    }

    pub fn to_json(&self) -> Value {
        let mut obj = json!({
            "tropism": self.tropism.to_i64s(),
            "outcome": self.outcome,
            "initial_roots": self.initial_roots,
            "certificates": self.certificates.iter().map(Certificate::to_json).collect::<Vec<_>>(),
            "rejected": self.rejected.iter().map(|r| {
                let reason = match &r.reason {
                    Rejection::NoSeries { residual } => json!({"no-series": residual}),
                    Rejection::Underdetermined => json!("underdetermined"),
                    Rejection::Unverified(g) => json!({"unverified": g}),
                };
                json!({
                    "root": r.root.coords.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
                    "reason": reason,
                })
            }).collect::<Vec<_>>(),
            "degree": self.degree,
        });
        if let Some(m) = self.method {
            obj["method"] = json!(m);
        }
        if let Some(e) = &self.error {
            obj["error"] = json!(e);
        }
        obj
    }
}

#[derive(Clone, Debug)]
pub struct PipelineReport {
    pub nvars: usize,
    pub equations: usize,
    pub outcome: Outcome,
    pub tropisms: Vec<TropismReport>,
    /// Sum of the degrees over all tropisms.
    pub degree: i64,
    pub elapsed: Duration,
    pub caveat: &'static str,
}

impl PipelineReport {
    pub fn certificates(&self) -> impl Iterator<Item = &Certificate> {
        self.tropisms.iter().flat_map(|t| &t.certificates)
    }

    /// Deterministic for a fixed seed: timing is left out.
    pub fn to_json(&self) -> Value {
        json!({
            "variables": self.nvars,
            "equations": self.equations,
            "outcome": self.outcome,
            "degree": self.degree,
            "tropisms": self.tropisms.iter().map(TropismReport::to_json).collect::<Vec<_>>(),
            "caveat": self.caveat,
        })
    }
}

impl fmt::Display for PipelineReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} equations in {} variables: {}", self.equations, self.nvars, self.outcome)?;
        for t in &self.tropisms {
            write!(f, "tropism {}: {}, {} initial roots", t.tropism, t.outcome, t.initial_roots)?;
            if let Some(e) = &t.error {
                write!(f, " ({e})")?;
            }
            writeln!(f)?;
            for c in &t.certificates {
                let gain = c.verified.map_or("-".to_string(), |g| g.to_string());
                writeln!(f, "  certificate, order gain {gain}, degree {}", degree(c, 1))?;
                for line in c.to_string().lines() {
                    writeln!(f, "    {line}")?;
                }
            }
            for r in &t.rejected {
                writeln!(f, "  rejected root: {:?}", r.reason)?;
            }
        }
        writeln!(f, "degree {}", self.degree)?;
        writeln!(f, "note: {}", self.caveat)
    }
}

/// Certificates for all branches of the tropism `v`.
pub fn certify_tropism(s: &LaurentSystem, v: &IntVector, seed: u64) -> Result<TropismReport> {
    let red = reduce(s, v)?;
    let solved = solve_initial(&red.initial, seed)?;
    let mut report = TropismReport {
        tropism: v.clone(),
        outcome: Outcome::NoRootAtInfinity,
        method: Some(solved.method),
        initial_roots: solved.roots.len(),
        certificates: vec![],
        rejected: vec![],
        degree: 0,
        error: None,
    };
    if solved.binomial_det == Some(0) {
        report.error = Some("initial binomial system has no isolated roots".into());
    }
    for root in solved.roots {
        let z = match second_term_linear(&red.full, &root.coords)? {
            SecondTerm::Coefficients(z) => z,
            SecondTerm::NoSeries { residual } => {
                report.rejected.push(RejectedRoot { root, reason: Rejection::NoSeries { residual } });
                continue;
            }
            SecondTerm::Underdetermined => {
                report.rejected.push(RejectedRoot { root, reason: Rejection::Underdetermined });
                continue;
            }
        };
        let mut cert = Certificate::from_root(v.clone(), root, Some(&z))?;
        let gain = verify(s, &cert)?;
        cert.verified = Some(gain);
        if gain.certifies() {
            report.certificates.push(cert);
        } else {
            let root = cert.initial_root.take().expect("set by from_root");
            report.rejected.push(RejectedRoot { root, reason: Rejection::Unverified(gain) });
        }
    }
    report.degree = report.certificates.iter().map(|c| degree(c, 1)).sum();
    report.outcome = if !report.certificates.is_empty() {
        Outcome::Certificate
    } else if report.initial_roots > 0 {
        Outcome::NoSeries
    } else {
        Outcome::NoRootAtInfinity
    };
    Ok(report)
}

/// Runs the whole pipeline: tropisms, initial roots, second terms and
/// verified certificates. Failures along one tropism are recorded in its
/// report.
pub fn certify_curves(s: &LaurentSystem, seed: u64) -> Result<PipelineReport> {
    let start = Instant::now();
    let n = s.nvars();
    if s.len() != n && s.len() + 1 != n {
        return Err(Error::Shape(format!("{} equations in {n} unknowns", s.len())));
    }
    let tropisms = match enumerate_pretropisms(s) {
        Ok(ts) => ts,
        Err(Error::MonomialEquation) => vec![],
        Err(e) => return Err(e),
    };
    let tropisms: Vec<TropismReport> = tropisms
        .par_iter()
        .map(|t| certify_tropism(s, &t.v, seed).unwrap_or_else(|e| TropismReport::failed(t.v.clone(), e)))
        .collect();
    let outcome = tropisms.iter().map(|t| t.outcome).max().unwrap_or(Outcome::NoTropism);
    Ok(PipelineReport {
        nvars: n,
        equations: s.len(),
        outcome,
        degree: tropisms.iter().map(|t| t.degree).sum(),
        tropisms,
        elapsed: start.elapsed(),
        caveat: CURVE_CAVEAT,
    })
}

/// Whether two one-term curves agree after reparametrizing `t` by a root of
/// unity of order `ν_1`.
pub fn same_curve(a: &Certificate, b: &Certificate, tol: f64) -> bool {
    if a.exponents != b.exponents {
        return false;
    }
    let k = a.nu1.unsigned_abs().max(1);
    (0..k).any(|j| {
        let w = Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / k as f64);
        a.exponents.iter().zip(&a.leading).zip(&b.leading).all(|((&e, x), y)| (x.value() * w.powi(e as i32) - y.value()).norm() < tol)
    })
}

/// Leading terms of the images of a one-term certificate under the group
/// generated by coordinate permutations (`x_i -> x_{p[i]}`), each normalized
/// to `ν_1 > 0` and `c_1 = 1`, without repetitions.
pub fn curve_orbit(cert: &Certificate, generators: &[Vec<usize>]) -> Result<Vec<Certificate>> {
    let normalize = |exps: Vec<i64>, cs: Vec<Complex64>| -> Result<Certificate> {
        let (exps, cs): (Vec<i64>, Vec<Complex64>) = if exps[0] < 0 {
            (exps.iter().map(|e| -e).collect(), cs)
        } else {
            (exps, cs)
        };
        if exps[0] == 0 {
            return Err(Error::Shape("image curve lies in a hyperplane x1 = constant".into()));
        }
        let lambda = cs[0].inv().powf(1.0 / exps[0] as f64);
        let cs = cs.iter().zip(&exps).map(|(c, &e)| Coefficient::from_complex(c * lambda.powi(e as i32))).collect();
        Certificate::from_leading(IntVector::from_i64s(&exps), cs)
    };
    let n = cert.len();
    for g in generators {
        crate::tropism::check_permutation(g, n)?;
    }
    let start = normalize(cert.exponents.clone(), cert.leading.iter().map(Coefficient::value).collect())?;
    let mut orbit = vec![start];
    let mut i = 0;
    while i < orbit.len() {
        for g in generators {
            let c = &orbit[i];
            let mut exps = vec![0; n];
            let mut cs = vec![Complex64::new(0.0, 0.0); n];
            for k in 0..n {
                exps[g[k]] = c.exponents[k];
                cs[g[k]] = c.leading[k].value();
            }
            let image = normalize(exps, cs)?;
            if !orbit.iter().any(|o| same_curve(o, &image, 1e-9)) {
                orbit.push(image);
            }
        }
        i += 1;
    }
    Ok(orbit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn curve(v: &[i64], cs: &[(f64, f64)]) -> Certificate {
        Certificate::from_leading(IntVector::from_i64s(v), cs.iter().map(|&(a, b)| c(a, b).into()).collect()).unwrap()
    }

    #[test]
    fn binomial_example_certificate() {
        let s = catalog::binomial();
        let r = certify_curves(&s, 1).unwrap();
        assert_eq!(r.outcome, Outcome::Certificate);
        let certs: Vec<&Certificate> = r.certificates().collect();
        assert_eq!(certs.len(), 1);
        let cert = certs[0];
        assert_eq!(cert.exponents, vec![4, -4, -1]);
        assert_eq!(cert.leading, vec![Coefficient::from_i64(-6), Coefficient::from_ratio(-1, 12), Coefficient::one()]);
        assert!(cert.second.is_none());
        assert_eq!(cert.verified, Some(OrderGain::ExactZero));
        assert_eq!(degree(cert, 1), 8);
        assert_eq!(degree_by_hyperplane(cert, 3).unwrap(), 8);
        assert_eq!(r.degree, 8);
    }

    #[test]
    fn cyclic4_two_exact_curves() {
        let s = catalog::cyclic(4);
        let r = certify_curves(&s, 1).unwrap();
        assert_eq!(r.tropisms.len(), 1);
        let certs: Vec<&Certificate> = r.certificates().collect();
        assert_eq!(certs.len(), 2);
        let expected = [curve(&[1, -1, 1, -1], &[(1., 0.), (-1., 0.), (-1., 0.), (1., 0.)]), curve(&[1, -1, 1, -1], &[(1., 0.), (1., 0.), (-1., 0.), (-1., 0.)])];
        for e in &expected {
            assert_eq!(certs.iter().filter(|c| same_curve(c, e, 1e-12)).count(), 1);
        }
        for cert in certs {
            assert_eq!(verify(&s, cert).unwrap(), OrderGain::ExactZero);
            assert_eq!(degree_by_hyperplane(cert, 9).unwrap(), 2);
        }
        assert_eq!(r.degree, 4);
    }

    #[test]
    fn tampered_certificate_fails() {
        let s = catalog::cyclic(4);
        let cert = curve(&[1, -1, 1, -1], &[(1., 0.), (-1., 0.), (-1.001, 0.), (1., 0.)]);
        assert_eq!(verify(&s, &cert).unwrap(), OrderGain::Gain(0));
    }

    #[test]
    fn dense_square_system_has_no_curves() {
        // two generic conics meet in isolated points only
        let s = crate::polynomial::parse_system(
            "3*x^2 + 2*x*y - 5*y^2 + x - 7*y + 11;\n x^2 - 4*x*y + 2*y^2 + 6*x + y - 3;",
        )
        .unwrap();
        let r = certify_curves(&s, 1).unwrap();
        assert!(!r.tropisms.is_empty());
        assert_eq!(r.certificates().count(), 0);
        assert!(r.tropisms.iter().all(|t| t.outcome != Outcome::Certificate));
        assert_eq!(r.degree, 0);
    }

    #[test]
    fn second_term_recovers_a_twisted_cubic_branch() {
        // x2 = x1^2 + x1, x3 = x1 + 1: along v = (-1,-2,-1) the branch at
        // infinity is x1 = t^-1, x2 = t^-2 + t^-1, x3 = t^-1 + 1
        let s = crate::polynomial::parse_system("x2 - x1^2 - x1;\n x3 - x1 - 1;").unwrap();
        let r = certify_curves(&s, 1).unwrap();
        assert!(r.certificates().all(|c| c.verified.unwrap().certifies()));
        assert!(r.certificates().count() >= 1);
    }

    #[test]
    fn hyperplane_degree_matches_formula() {
        for (v, cs) in [
            (vec![1, 0, 0], vec![(1., 0.), (1., 0.), (1., 0.)]),
            (vec![2, -3, 1], vec![(0.5, 1.), (-2., 0.3), (1., -1.)]),
            (vec![1, 4, 4], vec![(1., 0.), (2., 0.), (3., 0.)]),
        ] {
            let cert = curve(&v, &cs);
            assert_eq!(degree_by_hyperplane(&cert, 5).unwrap(), degree(&cert, 1));
        }
    }

    #[test]
    fn json_round_trip() {
        let s = catalog::cyclic(4);
        let r = certify_curves(&s, 1).unwrap();
        for cert in r.certificates() {
            let back = Certificate::from_json(&cert.to_json()).unwrap();
            assert_eq!(back.exponents, cert.exponents);
            assert_eq!(back.transform, cert.transform);
            assert_eq!(back.verified, Some(OrderGain::ExactZero));
            assert_eq!(verify(&s, &back).unwrap(), OrderGain::ExactZero);
        }
        let bad = json!({"tropism": [2, 4], "leading": [{"exp": 2, "re": 1.0, "im": 0.0}, {"exp": 4, "re": 1.0, "im": 0.0}]});
        assert!(Certificate::from_json(&bad).is_err());
    }

    #[test]
    fn orbit_of_cyclic4_curve() {
        let cert = curve(&[1, -1, 1, -1], &[(1., 0.), (-1., 0.), (-1., 0.), (1., 0.)]);
        let orbit = curve_orbit(&cert, &[crate::tropism::cyclic_generator(4)]).unwrap();
        assert_eq!(orbit.len(), 2);
    }
}
