//! P1 Galerkin discretization of `-eps Lap u + beta . grad u + mu u = f` with
//! homogeneous Dirichlet data on the inflow boundary and natural (homogeneous
//! Neumann) conditions elsewhere.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mesh::{barycentric, signed_area, BoundaryTag, Mesh, Point};
use crate::problem::Problem;
use crate::quadrature::QuadratureRule;
use crate::sparse::CsrMatrix;

/// Element matrix `A[i][j] = a(phi_j, phi_i)` (row = test function) and load.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementSystem {
    pub matrix: [[f64; 3]; 3],
    pub load: [f64; 3],
}

/// Gradients of the three barycentric coordinates; constant on the triangle.
pub fn p1_gradients(p: &[Point; 3]) -> [Point; 3] {
    let two_a = 2.0 * signed_area(p);
    [
        [(p[1][1] - p[2][1]) / two_a, (p[2][0] - p[1][0]) / two_a],
        [(p[2][1] - p[0][1]) / two_a, (p[0][0] - p[2][0]) / two_a],
        [(p[0][1] - p[1][1]) / two_a, (p[1][0] - p[0][0]) / two_a],
    ]
}

fn triangle_diameter(p: &[Point; 3]) -> f64 {
    let d = |a: Point, b: Point| (a[0] - b[0]).hypot(a[1] - b[1]);
    d(p[0], p[1]).max(d(p[1], p[2])).max(d(p[2], p[0]))
}

/// `eps K + C + M` and the load vector on one triangle. `K` is the P1 stiffness
/// block, `C[i][j] = int (beta . grad phi_j) phi_i`, `M[i][j] = int mu phi_i phi_j`.
pub fn element_matrices<B, M, F>(
    p: &[Point; 3],
    beta: B,
    mu: M,
    f: F,
    epsilon: f64,
    rule: &QuadratureRule,
) -> Result<ElementSystem>
where
    B: Fn(Point) -> Point,
    M: Fn(Point) -> f64,
    F: Fn(Point) -> f64,
{
    let area = signed_area(p);
    let h = triangle_diameter(p);
    if area.is_nan() || area < 1e-14 * h * h || h == 0.0 {
        return Err(Error::DegenerateTriangle { index: 0, area });
    }
    let grads = p1_gradients(p);
    let mut matrix = [[0.0; 3]; 3];
    let mut load = [0.0; 3];

    for i in 0..3 {
        for j in 0..3 {
            let g = grads[i][0] * grads[j][0] + grads[i][1] * grads[j][1];
            matrix[i][j] = epsilon * area * g;
        }
    }

    for (x, (lam, w)) in rule.mapped_points(p).zip(rule.points.iter().zip(&rule.weights)) {
        let wa = w * area;
        let b = beta(x);
        let m = mu(x);
        let fx = f(x);
        let adv = [
            b[0] * grads[0][0] + b[1] * grads[0][1],
            b[0] * grads[1][0] + b[1] * grads[1][1],
            b[0] * grads[2][0] + b[1] * grads[2][1],
        ];
        for i in 0..3 {
            for j in 0..3 {
                matrix[i][j] += wa * (adv[j] + m * lam[j]) * lam[i];
            }
            load[i] += wa * fx * lam[i];
        }
    }
    Ok(ElementSystem { matrix, load })
}

/// Coefficients and source of `-eps Lap u + beta . grad u + mu u = f`.
pub trait Coefficients: Sync {
    fn beta(&self, p: Point) -> Point;
    fn mu(&self, p: Point) -> f64;
    fn f(&self, p: Point) -> f64;
}

impl Coefficients for Problem {
    fn beta(&self, p: Point) -> Point {
        Problem::beta(self, p)
    }
    fn mu(&self, p: Point) -> f64 {
        Problem::mu(self, p)
    }
    fn f(&self, p: Point) -> f64 {
        Problem::f(self, p)
    }
}

/// Assembled system on the free (non-Dirichlet) vertices.
#[derive(Debug, Clone)]
pub struct SparseSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    /// Free index of each mesh vertex, `None` for Dirichlet vertices.
    pub free_index: Vec<Option<usize>>,
    /// Mesh vertex of each free index.
    pub free_vertices: Vec<usize>,
}

impl SparseSystem {
    pub fn dim(&self) -> usize {
        self.free_vertices.len()
    }

    pub fn n_dirichlet(&self) -> usize {
        self.free_index.len() - self.free_vertices.len()
    }
}

/// Vertices touching at least one inflow edge, corners included.
pub fn dirichlet_vertices(mesh: &Mesh, tags: &[BoundaryTag]) -> Vec<bool> {
    let mut fixed = vec![false; mesh.n_vertices()];
    for (edge, tag) in mesh.boundary_edges.iter().zip(tags) {
        if *tag == BoundaryTag::Inflow {
            fixed[edge.vertices[0]] = true;
            fixed[edge.vertices[1]] = true;
        }
    }
    fixed
}

/// Assembles the Galerkin system. `tags` must come from classifying the mesh
/// boundary against `problem.beta`. Element work runs in parallel; the
/// reduction runs in element order, so the matrix does not depend on the
/// number of worker threads.
pub fn assemble<C: Coefficients + ?Sized>(
    mesh: &Mesh,
    problem: &C,
    tags: &[BoundaryTag],
    epsilon: f64,
    rule: &QuadratureRule,
) -> Result<SparseSystem> {
    let fixed = dirichlet_vertices(mesh, tags);
    let mut free_index = vec![None; mesh.n_vertices()];
    let mut free_vertices = Vec::new();
    for (v, &is_fixed) in fixed.iter().enumerate() {
        if !is_fixed {
            free_index[v] = Some(free_vertices.len());
            free_vertices.push(v);
        }
    }
    if free_vertices.is_empty() {
        return Err(Error::EmptySystem);
    }

    let elements: Vec<ElementSystem> = (0..mesh.triangles.len())
        .into_par_iter()
        .map(|t| {
            element_matrices(
                &mesh.corners(t),
                |x| problem.beta(x),
                |x| problem.mu(x),
                |x| problem.f(x),
                epsilon,
                rule,
            )
            .map_err(|e| match e {
                Error::DegenerateTriangle { area, .. } => Error::DegenerateTriangle { index: t, area },
                other => other,
            })
        })
        .collect::<Result<_>>()?;

    let n = free_vertices.len();
    let mut entries = Vec::with_capacity(9 * elements.len());
    let mut rhs = vec![0.0; n];
    for (tri, el) in mesh.triangles.iter().zip(&elements) {
        for i in 0..3 {
            let Some(row) = free_index[tri[i]] else { continue };
            rhs[row] += el.load[i];
            for j in 0..3 {
                if let Some(col) = free_index[tri[j]] {
                    entries.push((row, col, el.matrix[i][j]));
                }
            }
        }
    }
    Ok(SparseSystem {
        matrix: CsrMatrix::from_triplets(n, entries),
        rhs,
        free_index,
        free_vertices,
    })
}

/// Continuous piecewise-linear field given by its vertex values.
#[derive(Debug, Clone)]
pub struct DiscreteField<'m> {
    pub mesh: &'m Mesh,
    pub values: Vec<f64>,
}

impl<'m> DiscreteField<'m> {
    pub fn new(mesh: &'m Mesh, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), mesh.n_vertices());
        Self { mesh, values }
    }

    pub fn zero(mesh: &'m Mesh) -> Self {
        Self::new(mesh, vec![0.0; mesh.n_vertices()])
    }

    pub fn interpolate<G: Fn(Point) -> f64>(mesh: &'m Mesh, g: G) -> Self {
        Self::new(mesh, mesh.vertices.iter().map(|&p| g(p)).collect())
    }

    /// Scatters a free-vertex solution back to all vertices; Dirichlet vertices get 0.
    pub fn from_solution(mesh: &'m Mesh, system: &SparseSystem, x: &[f64]) -> Self {
        let mut values = vec![0.0; mesh.n_vertices()];
        for (&v, &xi) in system.free_vertices.iter().zip(x) {
            values[v] = xi;
        }
        Self::new(mesh, values)
    }

    pub fn evaluate(&self, p: Point) -> Result<f64> {
        let (t, lam) = self.mesh.locate(p)?;
        Ok(self.value_in(t, lam))
    }

    /// Value at barycentric coordinates `lam` of triangle `t`.
    pub fn value_in(&self, t: usize, lam: [f64; 3]) -> f64 {
        let tri = self.mesh.triangles[t];
        lam[0] * self.values[tri[0]] + lam[1] * self.values[tri[1]] + lam[2] * self.values[tri[2]]
    }

    pub fn gradient_in(&self, t: usize) -> Point {
        let tri = self.mesh.triangles[t];
        let grads = p1_gradients(&self.mesh.corners(t));
        let mut g = [0.0; 2];
        for k in 0..3 {
            g[0] += self.values[tri[k]] * grads[k][0];
            g[1] += self.values[tri[k]] * grads[k][1];
        }
        g
    }

    /// Barycentric coordinates of `p` with respect to triangle `t`.
    pub fn local_coords(&self, t: usize, p: Point) -> [f64; 3] {
        barycentric(&self.mesh.corners(t), p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PecletReport {
    pub max: f64,
    pub warning: bool,
}

pub fn peclet_number(beta_norm: f64, h: f64, epsilon: f64) -> f64 {
    beta_norm * h / (2.0 * epsilon)
}

/// Largest element Peclet number `|beta| h_K / (2 eps)`, with `|beta|` the
/// maximum over the element's vertices.
pub fn peclet_guard<C: Coefficients + ?Sized>(mesh: &Mesh, problem: &C, epsilon: f64) -> PecletReport {
    let max = (0..mesh.triangles.len())
        .map(|t| {
            let corners = mesh.corners(t);
            let b = corners
                .iter()
                .map(|&x| {
                    let v = problem.beta(x);
                    v[0].hypot(v[1])
                })
                .fold(0.0, f64::max);
            peclet_number(b, triangle_diameter(&corners), epsilon)
        })
        .fold(0.0, f64::max);
    PecletReport {
        max,
        warning: max > 1.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{classify_boundary, CLASSIFY_TOL};

    const REF: [Point; 3] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];

    fn assert_block(got: &[[f64; 3]; 3], want: &[[f64; 3]; 3]) {
        for i in 0..3 {
            for j in 0..3 {
                assert!(
                    (got[i][j] - want[i][j]).abs() < 1e-12,
                    "[{i}][{j}] {} vs {}",
                    got[i][j],
                    want[i][j]
                );
            }
        }
    }

    #[test]
    fn stiffness_block() {
        let rule = QuadratureRule::degree5();
        let el = element_matrices(&REF, |_| [0.0, 0.0], |_| 0.0, |_| 0.0, 1.0, &rule).unwrap();
        assert_block(&el.matrix, &[[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]]);
    }

    #[test]
    fn mass_block() {
        let rule = QuadratureRule::degree5();
        let el = element_matrices(&REF, |_| [0.0, 0.0], |_| 1.0, |_| 0.0, 0.0, &rule).unwrap();
        let m = |v: f64| v / 24.0;
        assert_block(
            &el.matrix,
            &[
                [m(2.0), m(1.0), m(1.0)],
                [m(1.0), m(2.0), m(1.0)],
                [m(1.0), m(1.0), m(2.0)],
            ],
        );
    }

    #[test]
    fn advection_block() {
        let rule = QuadratureRule::degree5();
        let el = element_matrices(&REF, |_| [1.0, 0.0], |_| 0.0, |_| 0.0, 0.0, &rule).unwrap();
        let r = [-1.0 / 6.0, 1.0 / 6.0, 0.0];
        assert_block(&el.matrix, &[r, r, r]);
    }

    #[test]
    fn degenerate_triangle_is_rejected() {
        let rule = QuadratureRule::degree5();
        let flat = [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]];
        let err = element_matrices(&flat, |_| [0.0, 0.0], |_| 1.0, |_| 0.0, 1.0, &rule).unwrap_err();
        assert!(matches!(err, Error::DegenerateTriangle { .. }));
    }

    #[test]
    fn dirichlet_sets_on_small_mesh() {
        let mesh = Mesh::unit_square(2).unwrap();
        let rule = QuadratureRule::degree5();
        let ex3 = Problem::from_label("example3", None).unwrap();
        let tags = classify_boundary(&mesh, |x| ex3.beta(x), CLASSIFY_TOL);
        let sys = assemble(&mesh, &ex3, &tags, 0.1, &rule).unwrap();
        assert_eq!((sys.n_dirichlet(), sys.dim()), (5, 4));

        let ex1 = Problem::from_label("example1", Some(0.51)).unwrap();
        let tags = classify_boundary(&mesh, |x| ex1.beta(x), CLASSIFY_TOL);
        let sys = assemble(&mesh, &ex1, &tags, 0.1, &rule).unwrap();
        assert_eq!((sys.n_dirichlet(), sys.dim()), (3, 6));
        assert_eq!(sys.free_index[0..3], [None, None, None]);
    }

    #[test]
    fn interior_rows_annihilate_constants_without_advection() {
        // eps = 1, beta = 0, mu = 0 rows of interior vertices sum to zero.
        let mesh = Mesh::unit_square(4).unwrap();
        let rule = QuadratureRule::degree5();
        let mut row_sums = vec![0.0; mesh.n_vertices()];
        for t in 0..mesh.triangles.len() {
            let el = element_matrices(&mesh.corners(t), |_| [0.0, 0.0], |_| 0.0, |_| 0.0, 1.0, &rule).unwrap();
            for i in 0..3 {
                row_sums[mesh.triangles[t][i]] += el.matrix[i].iter().sum::<f64>();
            }
        }
        for (v, p) in mesh.vertices.iter().enumerate() {
            if p[0] > 0.0 && p[0] < 1.0 && p[1] > 0.0 && p[1] < 1.0 {
                assert!(row_sums[v].abs() < 1e-12);
            }
        }
    }

    struct Reaction {
        c: f64,
    }

    impl Coefficients for Reaction {
        fn beta(&self, _: Point) -> Point {
            [0.0, 0.0]
        }
        fn mu(&self, _: Point) -> f64 {
            1.0
        }
        fn f(&self, _: Point) -> f64 {
            self.c
        }
    }

    #[test]
    fn patch_test_constant_solution() {
        // -Lap u + u = c with natural boundary conditions is solved by u = c.
        let mesh = Mesh::unit_square(6).unwrap();
        let rule = QuadratureRule::degree5();
        let no_inflow = vec![BoundaryTag::Outflow; mesh.boundary_edges.len()];
        let c = 2.75;
        let sys = assemble(&mesh, &Reaction { c }, &no_inflow, 1.0, &rule).unwrap();
        assert_eq!(sys.dim(), mesh.n_vertices());
        let ax = sys.matrix.mul(&vec![c; sys.dim()]);
        for (v, (a, b)) in ax.iter().zip(&sys.rhs).enumerate() {
            assert!((a - b).abs() < 1e-12, "row {v}");
        }
    }

    #[test]
    fn evaluation_reproduces_affine_data() {
        let mesh = Mesh::unit_square(5).unwrap();
        let f = DiscreteField::interpolate(&mesh, |p| p[0]);
        assert!((f.evaluate([0.25, 0.6]).unwrap() - 0.25).abs() < 1e-15);
        let one = DiscreteField::interpolate(&mesh, |_| 1.0);
        assert!((one.evaluate([0.13, 0.77]).unwrap() - 1.0).abs() < 1e-15);
        let g = DiscreteField::interpolate(&mesh, |p| 3.0 * p[0] - p[1] + 0.5);
        for (v, &p) in mesh.vertices.iter().enumerate() {
            assert_eq!(g.evaluate(p).unwrap(), g.values[v]);
        }
        assert!(g.evaluate([1.0 + 1e-9, 0.5]).is_err());
    }

    #[test]
    fn peclet_numbers() {
        assert!((peclet_number(2f64.sqrt(), 0.01, 0.1) - 0.0707106781).abs() < 1e-9);
        assert!((peclet_number(1.0, 0.002, 0.00144) - 0.6944).abs() < 1e-4);
        let pe = peclet_number(1.0, 0.002, 1.6f64.powi(-14));
        assert!((pe - 0.72058).abs() < 1e-4 && pe < 1.0);
        assert!(peclet_number(1.0, 0.01, 1e300) < 1e-300);

        let mesh = Mesh::unit_square(16).unwrap();
        let ex3 = Problem::from_label("example3", None).unwrap();
        let rep = peclet_guard(&mesh, &ex3, 0.1);
        assert!((rep.max - peclet_number(2f64.sqrt(), mesh.h, 0.1)).abs() < 1e-15);
        assert!(!rep.warning);
        assert!(peclet_guard(&mesh, &ex3, 1e-4).warning);
    }
}
