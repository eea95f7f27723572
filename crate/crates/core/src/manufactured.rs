//! A smooth manufactured solution of the regularized problem itself, used for
//! mesh-convergence checks at fixed epsilon.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::fem::{assemble, Coefficients, DiscreteField};
use crate::mesh::{classify_boundary, Mesh, Point, CLASSIFY_TOL};
use crate::norms::{l2_domain_error, ExactSolution};
use crate::quadrature::QuadratureRule;
use crate::solver::solve_direct;

/// `u = sin(pi x1 / 2) sin(pi x2 / 2)` with `beta = (1, 1)` and `mu = 1`.
///
/// `u` vanishes on the inflow edges (left, bottom) and its normal derivative
/// vanishes on the outflow edges, so it solves the discrete weak form's
/// continuous counterpart exactly once `f = -eps lap u + beta . grad u + u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SineProduct {
    pub epsilon: f64,
}

impl SineProduct {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                value: epsilon,
            });
        }
        Ok(Self { epsilon })
    }

    pub fn value(p: Point) -> f64 {
        (FRAC_PI_2 * p[0]).sin() * (FRAC_PI_2 * p[1]).sin()
    }

    pub fn gradient(p: Point) -> Point {
        let (s1, c1) = (FRAC_PI_2 * p[0]).sin_cos();
        let (s2, c2) = (FRAC_PI_2 * p[1]).sin_cos();
        [FRAC_PI_2 * c1 * s2, FRAC_PI_2 * s1 * c2]
    }
}

impl Coefficients for SineProduct {
    fn beta(&self, _: Point) -> Point {
        [1.0, 1.0]
    }

    fn mu(&self, _: Point) -> f64 {
        1.0
    }

    fn f(&self, p: Point) -> f64 {
        let u = Self::value(p);
        let g = Self::gradient(p);
        let laplacian = -2.0 * FRAC_PI_2 * FRAC_PI_2 * u;
        -self.epsilon * laplacian + g[0] + g[1] + u
    }
}

impl ExactSolution for SineProduct {
    fn u(&self, p: Point) -> f64 {
        Self::value(p)
    }

    fn grad_u(&self, p: Point) -> Point {
        Self::gradient(p)
    }

    fn beta(&self, _: Point) -> Point {
        [1.0, 1.0]
    }
}

/// `(h, ||u - u_h||_L2)` for each mesh resolution in `n_cells`.
pub fn h_convergence(epsilon: f64, n_cells: &[usize]) -> Result<Vec<(f64, f64)>> {
    let problem = SineProduct::new(epsilon)?;
    let rule = QuadratureRule::degree5();
    n_cells
        .iter()
        .map(|&n| {
            let mesh = Mesh::unit_square(n)?;
            let tags = classify_boundary(&mesh, |x| Coefficients::beta(&problem, x), CLASSIFY_TOL);
            let system = assemble(&mesh, &problem, &tags, epsilon, &rule)?;
            let report = solve_direct(&system.matrix, &system.rhs)?;
            let field = DiscreteField::from_solution(&mesh, &system, &report.solution);
            Ok((mesh.h, l2_domain_error(&field, &problem, &rule)))
        })
        .collect()
}
