use crate::mesh::{signed_area, Point};

/// Triangle quadrature in barycentric coordinates. Weights are normalized to
/// sum to one, so physical integrals are `area * sum(w_q f(x_q))`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl QuadratureRule {
    pub fn centroid() -> Self {
        let t = 1.0 / 3.0;
        Self {
            points: vec![[t, t, t]],
            weights: vec![1.0],
            degree: 1,
        }
    }

    /// Three-point rule at the edge midpoints.
    pub fn midpoints() -> Self {
        Self {
            points: vec![[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]],
            weights: vec![1.0 / 3.0; 3],
            degree: 2,
        }
    }

    /// Seven-point Radon rule, exact for polynomials of degree 5.
    pub fn degree5() -> Self {
        let r15 = 15f64.sqrt();
        let a1 = (6.0 - r15) / 21.0;
        let a2 = (6.0 + r15) / 21.0;
        let w1 = (155.0 - r15) / 1200.0;
        let w2 = (155.0 + r15) / 1200.0;
        let t = 1.0 / 3.0;
        let orbit = |a: f64| {
            let b = 1.0 - 2.0 * a;
            [[a, a, b], [a, b, a], [b, a, a]]
        };
        let mut points = vec![[t, t, t]];
        let mut weights = vec![9.0 / 40.0];
        points.extend(orbit(a1));
        weights.extend([w1; 3]);
        points.extend(orbit(a2));
        weights.extend([w2; 3]);
        Self {
            points,
            weights,
            degree: 5,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Physical location of each quadrature point on the triangle `p`.
    pub fn mapped_points<'a>(&'a self, p: &'a [Point; 3]) -> impl Iterator<Item = Point> + 'a {
        self.points.iter().map(move |l| {
            [
                l[0] * p[0][0] + l[1] * p[1][0] + l[2] * p[2][0],
                l[0] * p[0][1] + l[1] * p[1][1] + l[2] * p[2][1],
            ]
        })
    }

    pub fn integrate<F: Fn(Point) -> f64>(&self, p: &[Point; 3], f: F) -> f64 {
        let area = signed_area(p).abs();
        area * self
            .mapped_points(p)
            .zip(&self.weights)
            .map(|(x, w)| w * f(x))
            .sum::<f64>()
    }

    /// Like [`integrate`](Self::integrate), but splits a triangle into its four
    /// midpoint children, recursively, wherever the rule on the parent and the
    /// sum over the children differ by more than `rel_tol * |sum| + abs_tol`.
    pub fn integrate_adaptive<F: Fn(Point) -> f64>(
        &self,
        p: &[Point; 3],
        f: &F,
        rel_tol: f64,
        abs_tol: f64,
        max_depth: u32,
    ) -> f64 {
        let whole = self.integrate(p, f);
        self.refine(p, f, whole, rel_tol, abs_tol, max_depth)
    }

    fn refine<F: Fn(Point) -> f64>(&self, p: &[Point; 3], f: &F, whole: f64, rel: f64, abs: f64, depth: u32) -> f64 {
        if depth == 0 {
            return whole;
        }
        let mid = |a: Point, b: Point| [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
        let (m01, m12, m20) = (mid(p[0], p[1]), mid(p[1], p[2]), mid(p[2], p[0]));
        let kids = [[p[0], m01, m20], [m01, p[1], m12], [m20, m12, p[2]], [m12, m20, m01]];
        let parts = kids.map(|k| self.integrate(&k, f));
        let sum: f64 = parts.iter().sum();
        if (sum - whole).abs() <= rel * sum.abs() + abs {
            return sum;
        }
        kids.iter()
            .zip(parts)
            .map(|(k, part)| self.refine(k, f, part, rel, abs / 4.0, depth - 1))
            .sum()
    }
}
