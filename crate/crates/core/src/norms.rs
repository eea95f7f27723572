//! Error norms between the exact solution and a discrete P1 field.

use serde::Serialize;

use crate::fem::DiscreteField;
use crate::mesh::{barycentric, BoundaryTag, EdgeRule, Point};
use crate::problem::{Norm, Problem};
use crate::quadrature::QuadratureRule;

const L2_REL_TOL: f64 = 1e-7;
const L2_MAX_DEPTH: u32 = 8;

/// Exact data needed to measure errors.
pub trait ExactSolution {
    fn u(&self, p: Point) -> f64;
    fn grad_u(&self, p: Point) -> Point;
    fn beta(&self, p: Point) -> Point;
}

impl ExactSolution for Problem {
    fn u(&self, p: Point) -> f64 {
        Problem::u(self, p)
    }
    fn grad_u(&self, p: Point) -> Point {
        Problem::grad_u(self, p)
    }
    fn beta(&self, p: Point) -> Point {
        Problem::beta(self, p)
    }
}

/// The four error norms at one value of epsilon.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorRecord {
    pub k: i32,
    #[serde(rename = "eps")]
    pub epsilon: f64,
    pub l2_domain: f64,
    /// `None` when the mesh has no outflow edges.
    pub l2_gamma_plus: Option<f64>,
    pub h1_semi: f64,
    /// `None` when the mesh has no characteristic edges.
    pub l2_gamma0: Option<f64>,
    pub residual: f64,
    pub peclet: f64,
}

impl ErrorRecord {
    pub fn get(&self, norm: Norm) -> Option<f64> {
        match norm {
            Norm::L2Domain => Some(self.l2_domain),
            Norm::L2GammaPlus => self.l2_gamma_plus,
            Norm::H1Semi => Some(self.h1_semi),
            Norm::L2Gamma0 => self.l2_gamma0,
        }
    }

    pub fn peclet_warning(&self) -> bool {
        self.peclet > 1.0
    }
}

/// `||u - u_h||_{L^2(Omega)}`. Triangles where `u` is not resolved by a single
/// application of `rule` (fractional powers at the boundary) are subdivided.
pub fn l2_domain_error<P: ExactSolution>(field: &DiscreteField, problem: &P, rule: &QuadratureRule) -> f64 {
    let mesh = field.mesh;
    let mut total = 0.0;
    for t in 0..mesh.triangles.len() {
        let corners = mesh.corners(t);
        let area = mesh.signed_area(t).abs();
        let err2 = |x: Point| {
            let e = problem.u(x) - field.value_in(t, barycentric(&corners, x));
            e * e
        };
        total += rule.integrate_adaptive(&corners, &err2, L2_REL_TOL, 1e-30 * area, L2_MAX_DEPTH);
    }
    total.sqrt()
}

/// `||grad(u - u_h)||_{L^2(Omega)}`.
pub fn h1_semi_error<P: ExactSolution>(field: &DiscreteField, problem: &P, rule: &QuadratureRule) -> f64 {
    let mesh = field.mesh;
    let mut total = 0.0;
    for t in 0..mesh.triangles.len() {
        let corners = mesh.corners(t);
        let gh = field.gradient_in(t);
        total += rule.integrate(&corners, |x| {
            let g = problem.grad_u(x);
            (g[0] - gh[0]).powi(2) + (g[1] - gh[1]).powi(2)
        });
    }
    total.sqrt()
}

fn boundary_error<P: ExactSolution, W>(
    field: &DiscreteField,
    problem: &P,
    tags: &[BoundaryTag],
    edge_rules: &[EdgeRule],
    wanted: BoundaryTag,
    weight: W,
) -> Option<f64>
where
    W: Fn(usize, [f64; 2]) -> f64,
{
    let mesh = field.mesh;
    let mut seen = false;
    let mut total = 0.0;
    for (e, (tag, rule)) in tags.iter().zip(edge_rules).enumerate() {
        if *tag != wanted {
            continue;
        }
        seen = true;
        let [a, b] = mesh.boundary_edges[e].vertices;
        let pa = mesh.vertices[a];
        let len = mesh.boundary_edges[e].length;
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            // The P1 trace is linear along the edge.
            let t = (x[0] - pa[0]).hypot(x[1] - pa[1]) / len;
            let uh = (1.0 - t) * field.values[a] + t * field.values[b];
            let err = problem.u(x) - uh;
            total += w * weight(e, x) * err * err;
        }
    }
    seen.then(|| total.sqrt())
}

/// `||u - u_h||_{L^2(Gamma_+; beta . n)}`; `None` without outflow edges.
pub fn weighted_outflow_error<P: ExactSolution>(
    field: &DiscreteField,
    problem: &P,
    tags: &[BoundaryTag],
    edge_rules: &[EdgeRule],
) -> Option<f64> {
    let mesh = field.mesh;
    boundary_error(field, problem, tags, edge_rules, BoundaryTag::Outflow, |e, x| {
        let b = problem.beta(x);
        let n = mesh.boundary_edges[e].normal;
        (b[0] * n[0] + b[1] * n[1]).max(0.0)
    })
}

/// `||u - u_h||_{L^2(Gamma_0)}`; `None` without characteristic edges.
pub fn characteristic_error<P: ExactSolution>(
    field: &DiscreteField,
    problem: &P,
    tags: &[BoundaryTag],
    edge_rules: &[EdgeRule],
) -> Option<f64> {
    boundary_error(field, problem, tags, edge_rules, BoundaryTag::Characteristic, |_, _| {
        1.0
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    pub l2_domain: f64,
    pub l2_gamma_plus: Option<f64>,
    pub h1_semi: f64,
    pub l2_gamma0: Option<f64>,
}

pub fn compute_norms<P: ExactSolution>(
    field: &DiscreteField,
    problem: &P,
    tags: &[BoundaryTag],
    rule: &QuadratureRule,
    edge_rules: &[EdgeRule],
) -> ErrorNorms {
    ErrorNorms {
        l2_domain: l2_domain_error(field, problem, rule),
        l2_gamma_plus: weighted_outflow_error(field, problem, tags, edge_rules),
        h1_semi: h1_semi_error(field, problem, rule),
        l2_gamma0: characteristic_error(field, problem, tags, edge_rules),
    }
}
