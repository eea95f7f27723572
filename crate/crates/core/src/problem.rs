//! Manufactured test problems for `beta . grad u + mu u = f` on the unit square.
//!
//! Each example carries a closed-form exact solution vanishing on its inflow
//! boundary, so the regularized discrete solution can be compared directly
//! against it.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::Point;

pub const EXAMPLE1_DEFAULT_S: f64 = 0.51;
pub const EXAMPLE4_DEFAULT_S: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Example {
    /// `beta = (x1, 1)`, `u = (1 + x1^s) x2`; in H^1 iff `s > 1/2`.
    Example1 { s: f64 },
    /// `beta = (1, 0)`, `u = x1 x2`; characteristic top and bottom edges.
    Example2,
    /// `beta = (1, 1)`, `u = x2 sin(4 x1)`; no characteristic boundary. The
    /// source is built from `u`: `f = (x2 + 1) sin(4 x1) + 4 x2 cos(4 x1)`.
    Example3,
    /// `beta = (1 - x1 + (1 - x2)^s, 1 + x2)`, `u = (e^x1 - 1) sin(x2)`;
    /// `beta . n` degenerates at the top-right corner. `f = beta . grad u + u`.
    Example4 { s: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Norm {
    L2Domain,
    L2GammaPlus,
    H1Semi,
    L2Gamma0,
}

impl Norm {
    pub const ALL: [Norm; 4] = [Norm::L2Domain, Norm::L2GammaPlus, Norm::H1Semi, Norm::L2Gamma0];

    pub fn name(self) -> &'static str {
        match self {
            Norm::L2Domain => "l2_domain",
            Norm::L2GammaPlus => "l2_gamma_plus",
            Norm::H1Semi => "h1_semi",
            Norm::L2Gamma0 => "l2_gamma0",
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Norm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Norm::ALL
            .into_iter()
            .find(|n| n.name() == s)
            .ok_or_else(|| format!("unknown norm '{s}'"))
    }
}

/// Continuous problem data. Field evaluation is pure and thread-safe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Problem {
    pub example: Example,
}

fn check_s(s: f64) -> Result<f64> {
    if s.is_finite() && s > 0.0 {
        Ok(s)
    } else {
        Err(Error::InvalidParameter { name: "s", value: s })
    }
}

impl Problem {
    pub const LABELS: [&'static str; 4] = ["example1", "example2", "example3", "example4"];

    /// Looks up a registry entry. `s` is used by example1 and example4 and
    /// falls back to their defaults when absent.
    pub fn from_label(label: &str, s: Option<f64>) -> Result<Problem> {
        let example = match label {
            "example1" => Example::Example1 {
                s: check_s(s.unwrap_or(EXAMPLE1_DEFAULT_S))?,
            },
            "example2" => Example::Example2,
            "example3" => Example::Example3,
            "example4" => Example::Example4 {
                s: check_s(s.unwrap_or(EXAMPLE4_DEFAULT_S))?,
            },
            other => return Err(Error::UnknownExample(other.to_string())),
        };
        Ok(Problem { example })
    }

    pub fn label(&self) -> &'static str {
        match self.example {
            Example::Example1 { .. } => "example1",
            Example::Example2 => "example2",
            Example::Example3 => "example3",
            Example::Example4 { .. } => "example4",
        }
    }

    pub fn s(&self) -> Option<f64> {
        match self.example {
            Example::Example1 { s } | Example::Example4 { s } => Some(s),
            _ => None,
        }
    }

    pub fn beta(&self, p: Point) -> Point {
        let [x1, x2] = p;
        match self.example {
            Example::Example1 { .. } => [x1, 1.0],
            Example::Example2 => [1.0, 0.0],
            Example::Example3 => [1.0, 1.0],
            Example::Example4 { s } => [1.0 - x1 + (1.0 - x2).max(0.0).powf(s), 1.0 + x2],
        }
    }

    pub fn div_beta(&self, _p: Point) -> f64 {
        match self.example {
            Example::Example1 { .. } => 1.0,
            Example::Example2 | Example::Example3 | Example::Example4 { .. } => 0.0,
        }
    }

    pub fn mu(&self, _p: Point) -> f64 {
        1.0
    }

    pub fn u(&self, p: Point) -> f64 {
        let [x1, x2] = p;
        match self.example {
            Example::Example1 { s } => (1.0 + x1.max(0.0).powf(s)) * x2,
            Example::Example2 => x1 * x2,
            Example::Example3 => x2 * (4.0 * x1).sin(),
            Example::Example4 { .. } => x1.exp_m1() * x2.sin(),
        }
    }

    pub fn grad_u(&self, p: Point) -> Point {
        let [x1, x2] = p;
        match self.example {
            Example::Example1 { s } => [s * x1.powf(s - 1.0) * x2, 1.0 + x1.max(0.0).powf(s)],
            Example::Example2 => [x2, x1],
            Example::Example3 => [4.0 * x2 * (4.0 * x1).cos(), (4.0 * x1).sin()],
            Example::Example4 { .. } => [x1.exp() * x2.sin(), x1.exp_m1() * x2.cos()],
        }
    }

    pub fn f(&self, p: Point) -> f64 {
        let [x1, x2] = p;
        match self.example {
            Example::Example1 { s } => {
                let xs = x1.max(0.0).powf(s);
                (s + 1.0) * xs * x2 + xs + x2 + 1.0
            }
            Example::Example2 => x1 * x2 + x2,
            Example::Example3 | Example::Example4 { .. } => {
                let b = self.beta(p);
                let g = self.grad_u(p);
                b[0] * g[0] + b[1] * g[1] + self.mu(p) * self.u(p)
            }
        }
    }

    /// Minimum of `mu - div(beta)/2` over an `n_samples x n_samples` grid of
    /// cell centres.
    pub fn coercivity_constant(&self, n_samples: usize) -> Result<f64> {
        let n = n_samples.max(1);
        let mut min = f64::INFINITY;
        for j in 0..n {
            for i in 0..n {
                let p = [(i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64];
                min = min.min(self.mu(p) - 0.5 * self.div_beta(p));
            }
        }
        if min > 0.0 {
            Ok(min)
        } else {
            Err(Error::NotCoercive(min))
        }
    }

    /// Theoretical exponent `r` in `error <= C eps^r`.
    pub fn expected_rate(&self, norm: Norm) -> Result<f64> {
        let missing = |reason| Error::NoExpectedRate {
            label: self.label().to_string(),
            norm: norm.to_string(),
            reason,
        };
        match self.example {
            Example::Example1 { s } => {
                if s <= 0.5 {
                    return Err(missing("exact solution is not in H^1"));
                }
                Ok(match norm {
                    Norm::L2Domain | Norm::L2GammaPlus => 0.5,
                    Norm::H1Semi => 0.0,
                    Norm::L2Gamma0 => 0.25,
                })
            }
            Example::Example2 => Ok(match norm {
                Norm::L2Domain | Norm::L2GammaPlus => 0.75,
                Norm::H1Semi => 0.25,
                Norm::L2Gamma0 => 0.5,
            }),
            Example::Example3 => match norm {
                Norm::L2Domain | Norm::L2GammaPlus => Ok(1.0),
                Norm::H1Semi => Ok(0.5),
                Norm::L2Gamma0 => Err(missing("characteristic boundary has measure zero")),
            },
            Example::Example4 { s } => {
                let r = alpha_rate(alpha_of_s(s));
                match norm {
                    Norm::L2Domain | Norm::L2GammaPlus => Ok(r),
                    Norm::H1Semi => Ok(r - 0.5),
                    Norm::L2Gamma0 => Err(missing("characteristic boundary has measure zero")),
                }
            }
        }
    }
}

/// Largest `alpha` with `(beta . n)^-alpha` integrable on the outflow boundary
/// of example4, i.e. the bound `s alpha < 1`.
pub fn alpha_of_s(s: f64) -> f64 {
    1.0 / s
}

/// `min{1, (3 + alpha)/4}`, the two-dimensional L^2 rate for a degenerate
/// outflow weight.
pub fn alpha_rate(alpha: f64) -> f64 {
    ((3.0 + alpha) / 4.0).min(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularizedProblem {
    pub problem: Problem,
    pub epsilon: f64,
}

impl RegularizedProblem {
    pub fn new(problem: Problem, epsilon: f64) -> Result<Self> {
        if epsilon.is_finite() && epsilon > 0.0 {
            Ok(Self { problem, epsilon })
        } else {
            Err(Error::InvalidParameter {
                name: "epsilon",
                value: epsilon,
            })
        }
    }
}
