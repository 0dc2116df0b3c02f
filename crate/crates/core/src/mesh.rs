//! Uniform triangulations of the unit square.
//!
//! Each of the `n × n` sub-squares is cut along its negative-slope diagonal
//! (top-left to bottom-right corner). Every edge carries a fixed global unit
//! normal `n_e`, obtained by rotating the tangent from the lower to the higher
//! vertex index by −90°. The sign `s(T, e)` is `+1` when the outward normal of
//! `T` on `e` coincides with `n_e`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = [f64; 2];

/// Geometry of a single triangle; vertices counterclockwise.
///
/// Local edge `i` runs from vertex `i` to vertex `(i + 1) % 3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleGeometry {
    pub vertices: [Point; 3],
}

impl TriangleGeometry {
    pub fn new(vertices: [Point; 3]) -> Self {
        Self { vertices }
    }

    pub fn reference() -> Self {
        Self::new([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    }

    pub fn signed_area(&self) -> f64 {
        let [a, b, c] = self.vertices;
        0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    pub fn check_nondegenerate(&self) -> Result<()> {
        let area = self.signed_area();
        let scale = self.diameter().powi(2);
        if !(area.abs() > 1e-14 * scale) || !area.is_finite() {
            return Err(Error::DegenerateElement { area });
        }
        Ok(())
    }

    pub fn diameter(&self) -> f64 {
        (0..3).map(|i| self.edge_length(i)).fold(0.0, f64::max)
    }

    pub fn centroid(&self) -> Point {
        let [a, b, c] = self.vertices;
        [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0]
    }

    pub fn edge(&self, i: usize) -> (Point, Point) {
        (self.vertices[i], self.vertices[(i + 1) % 3])
    }

    pub fn edge_length(&self, i: usize) -> f64 {
        let (a, b) = self.edge(i);
        (b[0] - a[0]).hypot(b[1] - a[1])
    }

    /// Outward unit normal on local edge `i` (counterclockwise orientation assumed).
    pub fn outward_normal(&self, i: usize) -> Point {
        let (a, b) = self.edge(i);
        let len = self.edge_length(i);
        let sign = self.signed_area().signum();
        [sign * (b[1] - a[1]) / len, -sign * (b[0] - a[0]) / len]
    }

    /// Map barycentric coordinates to a physical point.
    pub fn map(&self, bary: [f64; 3]) -> Point {
        let [a, b, c] = self.vertices;
        [
            bary[0] * a[0] + bary[1] * b[0] + bary[2] * c[0],
            bary[0] * a[1] + bary[1] * b[1] + bary[2] * c[1],
        ]
    }

    /// Constant gradients of the three barycentric coordinate functions.
    pub fn barycentric_gradients(&self) -> [Point; 3] {
        let [a, b, c] = self.vertices;
        let two_area = 2.0 * self.signed_area();
        [
            [(b[1] - c[1]) / two_area, (c[0] - b[0]) / two_area],
            [(c[1] - a[1]) / two_area, (a[0] - c[0]) / two_area],
            [(a[1] - b[1]) / two_area, (b[0] - a[0]) / two_area],
        ]
    }

    /// Barycentric coordinates of a physical point.
    pub fn barycentric(&self, p: Point) -> [f64; 3] {
        let g = self.barycentric_gradients();
        let a = self.vertices[0];
        let l1 = g[1][0] * (p[0] - a[0]) + g[1][1] * (p[1] - a[1]);
        let l2 = g[2][0] * (p[0] - a[0]) + g[2][1] * (p[1] - a[1]);
        [1.0 - l1 - l2, l1, l2]
    }
}

/// Side of the unit square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Bottom,
    Right,
    Top,
    Left,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Bottom, Side::Right, Side::Top, Side::Left];

    pub fn name(self) -> &'static str {
        match self {
            Side::Bottom => "bottom",
            Side::Right => "right",
            Side::Top => "top",
            Side::Left => "left",
        }
    }

    /// Whether `p` lies on the line containing this side.
    fn contains_line(self, p: Point, tol: f64) -> bool {
        match self {
            Side::Bottom => p[1].abs() <= tol,
            Side::Top => (p[1] - 1.0).abs() <= tol,
            Side::Left => p[0].abs() <= tol,
            Side::Right => (p[0] - 1.0).abs() <= tol,
        }
    }

    /// Coordinate running along the side.
    fn tangential(self, p: Point) -> f64 {
        match self {
            Side::Bottom | Side::Top => p[0],
            Side::Left | Side::Right => p[1],
        }
    }
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Side::ALL
            .into_iter()
            .find(|side| side.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown side `{s}`")))
    }
}

/// A whole side or an axis-aligned sub-interval of one, with data flags.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundarySegmentSpec {
    pub side: Side,
    /// Closed interval of the tangential coordinate; `(0, 1)` is the whole side.
    pub interval: (f64, f64),
    pub dirichlet: bool,
    pub neumann: bool,
}

impl BoundarySegmentSpec {
    pub fn whole(side: Side, dirichlet: bool, neumann: bool) -> Self {
        Self { side, interval: (0.0, 1.0), dirichlet, neumann }
    }

    pub fn partial(side: Side, lo: f64, hi: f64, dirichlet: bool, neumann: bool) -> Self {
        Self { side, interval: (lo, hi), dirichlet, neumann }
    }
}

/// Per-edge data flags; interior edges carry neither.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryTags {
    pub dirichlet: Vec<bool>,
    pub neumann: Vec<bool>,
}

impl BoundaryTags {
    pub fn untagged(num_edges: usize) -> Self {
        Self { dirichlet: vec![false; num_edges], neumann: vec![false; num_edges] }
    }

    pub fn num_edges(&self) -> usize {
        self.dirichlet.len()
    }

    pub fn is_cauchy(&self, edge: usize) -> bool {
        self.dirichlet[edge] && self.neumann[edge]
    }

    pub fn dirichlet_edges(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_edges()).filter(|&e| self.dirichlet[e])
    }

    pub fn neumann_edges(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_edges()).filter(|&e| self.neumann[e])
    }
}

/// Triangles incident to an edge: `plus` has `s(T, e) = +1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeNeighbors {
    pub plus: Option<usize>,
    pub minus: Option<usize>,
}

impl EdgeNeighbors {
    pub fn is_boundary(&self) -> bool {
        self.plus.is_none() || self.minus.is_none()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> {
        self.plus
            .map(|t| (t, 1.0))
            .into_iter()
            .chain(self.minus.map(|t| (t, -1.0)))
    }
}

#[derive(Debug, Clone)]
pub struct Mesh {
    n: usize,
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
    edge_normals: Vec<Point>,
    edge_lengths: Vec<f64>,
    edge_neighbors: Vec<EdgeNeighbors>,
    triangle_edges: Vec<[usize; 3]>,
    triangle_signs: Vec<[f64; 3]>,
    areas: Vec<f64>,
    diameters: Vec<f64>,
}

impl Mesh {
    /// `n × n` uniform triangulation of `(0,1)²`.
    pub fn uniform_unit_square(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("subdivision n must be at least 1".into()));
        }
        let h = 1.0 / n as f64;
        let vid = |i: usize, j: usize| j * (n + 1) + i;

        let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
        for j in 0..=n {
            for i in 0..=n {
                vertices.push([i as f64 * h, j as f64 * h]);
            }
        }
        // exact endpoints
        for v in vertices.iter_mut() {
            for c in v.iter_mut() {
                if (*c - 1.0).abs() < 1e-15 {
                    *c = 1.0;
                }
            }
        }

        let mut triangles = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                let (bl, br, tl, tr) = (vid(i, j), vid(i + 1, j), vid(i, j + 1), vid(i + 1, j + 1));
                triangles.push([bl, br, tl]);
                triangles.push([br, tr, tl]);
            }
        }

        let mut lookup: HashMap<[usize; 2], usize> = HashMap::new();
        let mut edges = Vec::new();
        let mut edge_neighbors: Vec<EdgeNeighbors> = Vec::new();
        let mut triangle_edges = Vec::with_capacity(triangles.len());
        let mut triangle_signs = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            let mut te = [0; 3];
            let mut ts = [0.0; 3];
            for i in 0..3 {
                let (a, b) = (tri[i], tri[(i + 1) % 3]);
                let key = [a.min(b), a.max(b)];
                let e = *lookup.entry(key).or_insert_with(|| {
                    edges.push(key);
                    edge_neighbors.push(EdgeNeighbors { plus: None, minus: None });
                    edges.len() - 1
                });
                // counterclockwise traversal a -> b has outward normal = rot(-90°)(b - a)
                let sign = if a < b { 1.0 } else { -1.0 };
                if sign > 0.0 {
                    edge_neighbors[e].plus = Some(t);
                } else {
                    edge_neighbors[e].minus = Some(t);
                }
                te[i] = e;
                ts[i] = sign;
            }
            triangle_edges.push(te);
            triangle_signs.push(ts);
        }

        let edge_lengths: Vec<f64> = edges
            .iter()
            .map(|&[a, b]| {
                let (p, q) = (vertices[a], vertices[b]);
                (q[0] - p[0]).hypot(q[1] - p[1])
            })
            .collect();
        let edge_normals = edges
            .iter()
            .zip(&edge_lengths)
            .map(|(&[a, b], &len)| {
                let (p, q) = (vertices[a], vertices[b]);
                [(q[1] - p[1]) / len, -(q[0] - p[0]) / len]
            })
            .collect();

        let geometry =
            |tri: &[usize; 3]| TriangleGeometry::new([vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]]);
        let areas = triangles.iter().map(|t| geometry(t).area()).collect();
        let diameters = triangles.iter().map(|t| geometry(t).diameter()).collect();

        Ok(Self {
            n,
            vertices,
            triangles,
            edges,
            edge_normals,
            edge_lengths,
            edge_neighbors,
            triangle_edges,
            triangle_signs,
            areas,
            diameters,
        })
    }

    /// Subdivision parameter; the square side is `1/n`.
    pub fn subdivisions(&self) -> usize {
        self.n
    }

    pub fn mesh_size(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> Point {
        self.vertices[v]
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn triangle(&self, t: usize) -> [usize; 3] {
        self.triangles[t]
    }

    pub fn geometry(&self, t: usize) -> TriangleGeometry {
        let [a, b, c] = self.triangles[t];
        TriangleGeometry::new([self.vertices[a], self.vertices[b], self.vertices[c]])
    }

    /// Edge as `(lower vertex index, higher vertex index)`.
    pub fn edge(&self, e: usize) -> [usize; 2] {
        self.edges[e]
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn edge_endpoints(&self, e: usize) -> (Point, Point) {
        let [a, b] = self.edges[e];
        (self.vertices[a], self.vertices[b])
    }

    pub fn edge_midpoint(&self, e: usize) -> Point {
        let (a, b) = self.edge_endpoints(e);
        [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
    }

    pub fn edge_normal(&self, e: usize) -> Point {
        self.edge_normals[e]
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        self.edge_lengths[e]
    }

    pub fn edge_neighbors(&self, e: usize) -> EdgeNeighbors {
        self.edge_neighbors[e]
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.edge_neighbors[e].is_boundary()
    }

    /// Global edges of `t`, local edge `i` joining local vertices `i` and `i+1`.
    pub fn triangle_edges(&self, t: usize) -> [usize; 3] {
        self.triangle_edges[t]
    }

    /// `s(T, e)` for the three local edges.
    pub fn triangle_signs(&self, t: usize) -> [f64; 3] {
        self.triangle_signs[t]
    }

    pub fn area(&self, t: usize) -> f64 {
        self.areas[t]
    }

    pub fn diameter(&self, t: usize) -> f64 {
        self.diameters[t]
    }

    /// Quadratic Lagrange nodes: vertices first, then one midpoint per edge.
    pub fn num_p2_nodes(&self) -> usize {
        self.num_vertices() + self.num_edges()
    }

    pub fn p2_node_point(&self, node: usize) -> Point {
        if node < self.num_vertices() {
            self.vertices[node]
        } else {
            self.edge_midpoint(node - self.num_vertices())
        }
    }

    /// Global P2 nodes of `t` in local order (vertices, then local edge midpoints).
    pub fn triangle_p2_nodes(&self, t: usize) -> [usize; 6] {
        let [a, b, c] = self.triangles[t];
        let [e0, e1, e2] = self.triangle_edges[t];
        let nv = self.num_vertices();
        [a, b, c, nv + e0, nv + e1, nv + e2]
    }

    /// P2 nodes on the closed edge: `[lower vertex, midpoint, higher vertex]`.
    pub fn edge_p2_nodes(&self, e: usize) -> [usize; 3] {
        let [a, b] = self.edges[e];
        [a, self.num_vertices() + e, b]
    }

    /// Tag boundary edges with Dirichlet/Neumann flags.
    ///
    /// A boundary edge belongs to a segment iff both endpoints lie on the
    /// segment's closure. Interval endpoints must fall on mesh lines.
    pub fn classify_boundary(&self, specs: &[BoundarySegmentSpec]) -> Result<BoundaryTags> {
        let n = self.n as f64;
        let tol = 1e-12;
        for spec in specs {
            let (lo, hi) = spec.interval;
            if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo >= hi {
                return Err(Error::InvalidArgument(format!(
                    "segment interval ({lo}, {hi}) on {} must satisfy 0 <= lo < hi <= 1",
                    spec.side.name()
                )));
            }
            for value in [lo, hi] {
                if (value * n - (value * n).round()).abs() > 1e-9 {
                    return Err(Error::MisalignedSegment { value, n: self.n });
                }
            }
        }

        let mut tags = BoundaryTags::untagged(self.num_edges());
        for e in 0..self.num_edges() {
            if !self.is_boundary_edge(e) {
                continue;
            }
            let (a, b) = self.edge_endpoints(e);
            for spec in specs {
                let on_side = spec.side.contains_line(a, tol) && spec.side.contains_line(b, tol);
                if !on_side {
                    continue;
                }
                let (lo, hi) = spec.interval;
                let inside = |p: Point| {
                    let s = spec.side.tangential(p);
                    s >= lo - tol && s <= hi + tol
                };
                if inside(a) && inside(b) {
                    tags.dirichlet[e] |= spec.dirichlet;
                    tags.neumann[e] |= spec.neumann;
                }
            }
        }
        Ok(tags)
    }
}
