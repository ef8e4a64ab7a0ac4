//! Root finding for initial form systems: exact binomial solving, numeric
//! homotopy continuation, slack embedding and the second-term linear solve.

mod binomial;
pub(crate) mod eval;
mod homotopy;
mod second;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::polynomial::{Coefficient, GaussianRational};

pub use binomial::{binomial_normal_form, solve_binomial_square, BinomialNormalForm};
pub use homotopy::{embed_slack, refine_overdetermined, solve_square_numeric, solve_square_numeric_with, SolveReport, SolverOptions};
pub use second::{second_term_linear, SecondTerm};

/// Slack values below this magnitude mark a root of the original system.
pub const SLACK_TOL: f64 = 1e-8;
/// Paths whose affine coordinates exceed this magnitude went to infinity.
pub const DIVERGENCE: f64 = 1e8;
/// Newton refinement target for the residual.
pub const NEWTON_TOL: f64 = 1e-12;
pub const NEWTON_MAX_ITERS: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RootFlag {
    Regular,
    Suspect,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NumericRoot {
    pub coords: Vec<Complex64>,
    /// Exact values, when the root was computed in exact arithmetic.
    pub exact: Option<Vec<GaussianRational>>,
    /// Largest absolute equation value at `coords`.
    pub residual: f64,
    pub slack: Option<Complex64>,
    pub flag: RootFlag,
}

impl NumericRoot {
    pub fn numeric(coords: Vec<Complex64>, residual: f64, flag: RootFlag) -> Self {
        NumericRoot { coords, exact: None, residual, slack: None, flag }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Coordinates as coefficients, exact when available.
    pub fn coefficients(&self) -> Vec<Coefficient> {
        match &self.exact {
            Some(e) => e.iter().cloned().map(Coefficient::from_exact).collect(),
            None => self.coords.iter().map(|&z| Coefficient::from_complex(z)).collect(),
        }
    }

    /// Moves the last coordinate into `slack`.
    pub fn split_slack(mut self) -> Self {
        self.slack = self.coords.pop();
        if let Some(e) = &mut self.exact {
            e.pop();
        }
        self
    }

    pub fn is_regular(&self) -> bool {
        self.flag == RootFlag::Regular
    }

    /// All coordinates have magnitude above `tol`.
    pub fn in_torus(&self, tol: f64) -> bool {
        self.coords.iter().all(|z| z.norm() > tol)
    }

    pub fn slack_is_zero(&self) -> bool {
        self.slack.is_none_or(|s| s.norm() < SLACK_TOL)
    }

    /// All imaginary parts below `tol` relative to the magnitude.
    pub fn is_real(&self, tol: f64) -> bool {
        self.coords.iter().all(|z| z.im.abs() <= tol * z.norm().max(1.0))
    }
}
