//! Structured triangulations of the unit square and boundary classification.
//!
//! Every grid cell is split along its lower-left to upper-right diagonal, so the
//! mesh has `(n+1)^2` vertices, `2n^2` triangles and `4n` boundary edges. Boundary
//! edges are stored in counterclockwise order starting at the origin: bottom,
//! right, top, left.

use std::fmt;
use std::io::Write;

use crate::error::{Error, Result};

pub type Point = [f64; 2];

/// Default tolerance for `beta . n` when tagging boundary edges.
pub const CLASSIFY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Bottom,
    Right,
    Top,
    Left,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryEdge {
    pub vertices: [usize; 2],
    pub normal: Point,
    pub length: f64,
    pub side: Side,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryTag {
    Inflow,
    Outflow,
    Characteristic,
}

impl fmt::Display for BoundaryTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundaryTag::Inflow => "inflow",
            BoundaryTag::Outflow => "outflow",
            BoundaryTag::Characteristic => "characteristic",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Mesh {
    pub vertices: Vec<Point>,
    /// Counterclockwise vertex triples.
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<BoundaryEdge>,
    pub n_cells: usize,
    /// Largest triangle diameter.
    pub h: f64,
}

impl Mesh {
    pub fn unit_square(n_cells: usize) -> Result<Mesh> {
        if n_cells == 0 {
            return Err(Error::EmptyMesh);
        }
        let n = n_cells;
        let step = 1.0 / n as f64;
        let vid = |i: usize, j: usize| j * (n + 1) + i;

        let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
        for j in 0..=n {
            for i in 0..=n {
                // i * step drifts from 1.0 at the far side; pin the last row/column.
                let x = if i == n { 1.0 } else { i as f64 * step };
                let y = if j == n { 1.0 } else { j as f64 * step };
                vertices.push([x, y]);
            }
        }

        let mut triangles = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                let (a, b, c, d) = (vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1));
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            }
        }

        let mut boundary_edges = Vec::with_capacity(4 * n);
        let mut push = |a: usize, b: usize, normal: Point, side: Side| {
            boundary_edges.push(BoundaryEdge {
                vertices: [a, b],
                normal,
                length: step,
                side,
            });
        };
        for i in 0..n {
            push(vid(i, 0), vid(i + 1, 0), [0.0, -1.0], Side::Bottom);
        }
        for j in 0..n {
            push(vid(n, j), vid(n, j + 1), [1.0, 0.0], Side::Right);
        }
        for i in (0..n).rev() {
            push(vid(i + 1, n), vid(i, n), [0.0, 1.0], Side::Top);
        }
        for j in (0..n).rev() {
            push(vid(0, j + 1), vid(0, j), [-1.0, 0.0], Side::Left);
        }

        let mut mesh = Mesh {
            vertices,
            triangles,
            boundary_edges,
            n_cells,
            h: 0.0,
        };
        mesh.h = (0..mesh.triangles.len()).map(|t| mesh.diameter(t)).fold(0.0, f64::max);
        Ok(mesh)
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn corners(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn signed_area(&self, t: usize) -> f64 {
        signed_area(&self.corners(t))
    }

    pub fn diameter(&self, t: usize) -> f64 {
        let [p, q, r] = self.corners(t);
        dist(p, q).max(dist(q, r)).max(dist(r, p))
    }

    pub fn edge_midpoint(&self, e: usize) -> Point {
        let [a, b] = self.boundary_edges[e].vertices;
        let (p, q) = (self.vertices[a], self.vertices[b]);
        [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]
    }

    /// Index of a triangle containing `p`, with its barycentric coordinates.
    pub fn locate(&self, p: Point) -> Result<(usize, [f64; 3])> {
        const TOL: f64 = 1e-12;
        let [x, y] = p;
        if !((-TOL..=1.0 + TOL).contains(&x) && (-TOL..=1.0 + TOL).contains(&y)) {
            return Err(Error::OutsideDomain(x, y));
        }
        let n = self.n_cells;
        let cell = |v: f64| ((v * n as f64).floor().max(0.0) as usize).min(n - 1);
        let (i, j) = (cell(x), cell(y));
        let base = 2 * (j * n + i);
        let x0 = self.vertices[j * (n + 1) + i];
        let t = if x - x0[0] >= y - x0[1] { base } else { base + 1 };
        Ok((t, barycentric(&self.corners(t), p)))
    }

    /// Writes `v x y`, `t i j k` and `e i j TAG` lines.
    pub fn write_dump<W: Write>(&self, tags: &[BoundaryTag], mut w: W) -> Result<()> {
        for v in &self.vertices {
            writeln!(w, "v {} {}", v[0], v[1])?;
        }
        for t in &self.triangles {
            writeln!(w, "t {} {} {}", t[0], t[1], t[2])?;
        }
        for (edge, tag) in self.boundary_edges.iter().zip(tags) {
            writeln!(w, "e {} {} {}", edge.vertices[0], edge.vertices[1], tag)?;
        }
        Ok(())
    }
}

pub fn signed_area(p: &[Point; 3]) -> f64 {
    0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]))
}

pub fn barycentric(p: &[Point; 3], x: Point) -> [f64; 3] {
    let area = signed_area(p);
    let l1 = signed_area(&[p[0], x, p[2]]) / area;
    let l2 = signed_area(&[p[0], p[1], x]) / area;
    [1.0 - l1 - l2, l1, l2]
}

fn dist(p: Point, q: Point) -> f64 {
    (p[0] - q[0]).hypot(p[1] - q[1])
}

/// Tags each boundary edge by the sign of `beta . n` at its midpoint.
pub fn classify_boundary<F>(mesh: &Mesh, beta: F, tol: f64) -> Vec<BoundaryTag>
where
    F: Fn(Point) -> Point,
{
    (0..mesh.boundary_edges.len())
        .map(|e| {
            let b = beta(mesh.edge_midpoint(e));
            let n = mesh.boundary_edges[e].normal;
            let flux = b[0] * n[0] + b[1] * n[1];
            if flux > tol {
                BoundaryTag::Outflow
            } else if flux < -tol {
                BoundaryTag::Inflow
            } else {
                BoundaryTag::Characteristic
            }
        })
        .collect()
}

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre_unit(order: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    match order {
        2 => {
            let d = 0.5 / 3f64.sqrt();
            Ok((vec![0.5 - d, 0.5 + d], vec![0.5, 0.5]))
        }
        3 => {
            let d = 0.5 * (0.6f64).sqrt();
            Ok((vec![0.5 - d, 0.5, 0.5 + d], vec![5.0 / 18.0, 4.0 / 9.0, 5.0 / 18.0]))
        }
        other => Err(Error::UnsupportedEdgeOrder(other)),
    }
}

#[derive(Debug, Clone)]
pub struct EdgeRule {
    pub nodes: Vec<Point>,
    pub weights: Vec<f64>,
}

/// Per-edge Gauss rules; weights on each edge sum to its length.
pub fn edge_quadrature(mesh: &Mesh, order: usize) -> Result<Vec<EdgeRule>> {
    let (ts, ws) = gauss_legendre_unit(order)?;
    Ok(mesh
        .boundary_edges
        .iter()
        .map(|edge| {
            let p = mesh.vertices[edge.vertices[0]];
            let q = mesh.vertices[edge.vertices[1]];
            EdgeRule {
                nodes: ts
                    .iter()
                    .map(|&t| [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])])
                    .collect(),
                weights: ws.iter().map(|w| w * edge.length).collect(),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_for_small_meshes() {
        let m = Mesh::unit_square(1).unwrap();
        assert_eq!((m.vertices.len(), m.triangles.len(), m.boundary_edges.len()), (4, 2, 4));
        let m = Mesh::unit_square(2).unwrap();
        assert_eq!((m.vertices.len(), m.triangles.len(), m.boundary_edges.len()), (9, 8, 8));
    }

    #[test]
    fn rejects_zero_cells() {
        assert_eq!(Mesh::unit_square(0).unwrap_err(), Error::EmptyMesh);
    }

    #[test]
    fn paper_scale_mesh_size() {
        let m = Mesh::unit_square(512).unwrap();
        assert!((m.h - 2f64.sqrt() / 512.0).abs() < 1e-15);
        assert!((m.h - 0.00276).abs() < 1e-5);
    }

    #[test]
    fn example_fields_classify_as_expected() {
        let m = Mesh::unit_square(4).unwrap();
        let tags = classify_boundary(&m, |p| [p[0], 1.0], CLASSIFY_TOL);
        for (edge, tag) in m.boundary_edges.iter().zip(&tags) {
            let want = match edge.side {
                Side::Bottom => BoundaryTag::Inflow,
                Side::Left => BoundaryTag::Characteristic,
                Side::Right | Side::Top => BoundaryTag::Outflow,
            };
            assert_eq!(*tag, want, "{:?}", edge.side);
        }

        let tags = classify_boundary(&m, |_| [1.0, 1.0], CLASSIFY_TOL);
        for (edge, tag) in m.boundary_edges.iter().zip(&tags) {
            let want = match edge.side {
                Side::Bottom | Side::Left => BoundaryTag::Inflow,
                Side::Right | Side::Top => BoundaryTag::Outflow,
            };
            assert_eq!(*tag, want);
        }
    }

    #[test]
    fn gauss_rules() {
        let (_, w) = gauss_legendre_unit(2).unwrap();
        assert_eq!(w, vec![0.5, 0.5]);
        let (t, w) = gauss_legendre_unit(3).unwrap();
        let quintic: f64 = t.iter().zip(&w).map(|(t, w)| w * t.powi(5)).sum();
        assert!((quintic - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(gauss_legendre_unit(4).unwrap_err(), Error::UnsupportedEdgeOrder(4));
    }

    #[test]
    fn edge_weights_sum_to_length() {
        let m = Mesh::unit_square(3).unwrap();
        for order in [2, 3] {
            let rules = edge_quadrature(&m, order).unwrap();
            for (rule, edge) in rules.iter().zip(&m.boundary_edges) {
                let s: f64 = rule.weights.iter().sum();
                assert!((s - edge.length).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn locate_picks_containing_triangle() {
        let m = Mesh::unit_square(8).unwrap();
        for p in [[0.0, 0.0], [1.0, 1.0], [0.3, 0.71], [0.999, 0.001], [0.5, 0.5]] {
            let (_, lam) = m.locate(p).unwrap();
            assert!(lam.iter().all(|&l| l > -1e-12), "{p:?} {lam:?}");
        }
        assert!(m.locate([1.1, 0.5]).is_err());
    }

    #[test]
    fn dump_format() {
        let m = Mesh::unit_square(1).unwrap();
        let tags = classify_boundary(&m, |_| [1.0, 0.0], CLASSIFY_TOL);
        let mut buf = Vec::new();
        m.write_dump(&tags, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 4 + 2 + 4);
        assert_eq!(lines[0], "v 0 0");
        assert_eq!(lines[4], "t 0 1 3");
        assert_eq!(lines[6], "e 0 1 characteristic");
        assert_eq!(lines[7], "e 1 3 outflow");
        assert_eq!(lines[9], "e 2 0 inflow");
    }
}
