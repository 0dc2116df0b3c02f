use crate::mesh::{Point, TriangleGeometry};

/// Number of bivariate monomials of total degree `<= k`.
pub fn dim_pk(k: usize) -> usize {
    (k + 1) * (k + 2) / 2
}

/// Exponents `(a, b)` ordered by total degree, then by increasing `b`.
pub fn monomial_exponents(k: usize) -> Vec<(i32, i32)> {
    let mut out = Vec::with_capacity(dim_pk(k));
    for d in 0..=k as i32 {
        for b in 0..=d {
            out.push((d - b, b));
        }
    }
    out
}

/// A polynomial of degree `<= k` on one element, in monomials centered at
/// the element centroid and scaled by its diameter.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementPolynomial {
    degree: usize,
    center: Point,
    scale: f64,
    coeffs: Vec<f64>,
}

impl ElementPolynomial {
    pub fn new(degree: usize, center: Point, scale: f64, coeffs: Vec<f64>) -> Self {
        assert_eq!(coeffs.len(), dim_pk(degree), "coefficient count must be (k+1)(k+2)/2");
        Self { degree, center, scale, coeffs }
    }

    pub fn zero(degree: usize, geom: &TriangleGeometry) -> Self {
        Self::new(degree, geom.centroid(), geom.diameter(), vec![0.0; dim_pk(degree)])
    }

    /// Constant `c` on `geom`, stored with `degree`.
    pub fn constant(degree: usize, geom: &TriangleGeometry, c: f64) -> Self {
        let mut p = Self::zero(degree, geom);
        p.coeffs[0] = c;
        p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn center(&self) -> Point {
        self.center
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    fn local(&self, p: Point) -> (f64, f64) {
        ((p[0] - self.center[0]) / self.scale, (p[1] - self.center[1]) / self.scale)
    }

    pub fn eval(&self, p: Point) -> f64 {
        let (x, y) = self.local(p);
        monomial_exponents(self.degree)
            .iter()
            .zip(&self.coeffs)
            .map(|(&(a, b), c)| c * x.powi(a) * y.powi(b))
            .sum()
    }

    pub fn gradient(&self, p: Point) -> Point {
        let (x, y) = self.local(p);
        let mut g = [0.0; 2];
        for (&(a, b), c) in monomial_exponents(self.degree).iter().zip(&self.coeffs) {
            if a > 0 {
                g[0] += c * f64::from(a) * x.powi(a - 1) * y.powi(b);
            }
            if b > 0 {
                g[1] += c * f64::from(b) * x.powi(a) * y.powi(b - 1);
            }
        }
        [g[0] / self.scale, g[1] / self.scale]
    }

    pub fn laplacian(&self, p: Point) -> f64 {
        let (x, y) = self.local(p);
        let mut l = 0.0;
        for (&(a, b), c) in monomial_exponents(self.degree).iter().zip(&self.coeffs) {
            if a > 1 {
                l += c * f64::from(a * (a - 1)) * x.powi(a - 2) * y.powi(b);
            }
            if b > 1 {
                l += c * f64::from(b * (b - 1)) * x.powi(a) * y.powi(b - 2);
            }
        }
        l / (self.scale * self.scale)
    }

    /// Values of each basis monomial at `p`.
    pub fn basis_values(degree: usize, center: Point, scale: f64, p: Point) -> Vec<f64> {
        let (x, y) = ((p[0] - center[0]) / scale, (p[1] - center[1]) / scale);
        monomial_exponents(degree).iter().map(|&(a, b)| x.powi(a) * y.powi(b)).collect()
    }

    /// The basis monomial with index `i`, as a polynomial.
    pub fn basis(degree: usize, center: Point, scale: f64, i: usize) -> Self {
        let mut coeffs = vec![0.0; dim_pk(degree)];
        coeffs[i] = 1.0;
        Self::new(degree, center, scale, coeffs)
    }

    /// `self − other`; both must share degree, center and scale.
    pub fn difference(&self, other: &Self) -> Self {
        assert!(
            self.degree == other.degree && self.center == other.center && self.scale == other.scale,
            "polynomials in different bases"
        );
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Self::new(self.degree, self.center, self.scale, coeffs)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= factor);
        out
    }
}

/// Shifted Legendre polynomial `P_j(2t - 1)` on `[0, 1]`.
pub fn shifted_legendre(j: usize, t: f64) -> f64 {
    let s = 2.0 * t - 1.0;
    let (mut p0, mut p1) = (1.0, s);
    match j {
        0 => 1.0,
        1 => s,
        _ => {
            for k in 2..=j {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * s * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            p1
        }
    }
}

/// A polynomial on the segment `a → b` in the arc-length parameter
/// `t ∈ [0, 1]`, expanded in shifted Legendre polynomials.
///
/// `coeffs[0]` is the mean value over the edge.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgePolynomial {
    pub a: Point,
    pub b: Point,
    pub coeffs: Vec<f64>,
}

impl EdgePolynomial {
    pub fn new(a: Point, b: Point, coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "edge polynomial needs at least one coefficient");
        Self { a, b, coeffs }
    }

    pub fn zero(a: Point, b: Point, degree: usize) -> Self {
        Self::new(a, b, vec![0.0; degree + 1])
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn length(&self) -> f64 {
        (self.b[0] - self.a[0]).hypot(self.b[1] - self.a[1])
    }

    pub fn eval_param(&self, t: f64) -> f64 {
        self.coeffs.iter().enumerate().map(|(j, c)| c * shifted_legendre(j, t)).sum()
    }

    pub fn param_of(&self, p: Point) -> f64 {
        let d = [self.b[0] - self.a[0], self.b[1] - self.a[1]];
        ((p[0] - self.a[0]) * d[0] + (p[1] - self.a[1]) * d[1]) / (d[0] * d[0] + d[1] * d[1])
    }

    /// Value at a physical point on the segment.
    pub fn eval_at(&self, p: Point) -> f64 {
        self.eval_param(self.param_of(p))
    }

    /// `∫_e p ds`.
    pub fn integral(&self) -> f64 {
        self.length() * self.coeffs[0]
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(self.a, self.b, self.coeffs.iter().map(|c| c * factor).collect())
    }

    /// The same polynomial parametrized from `a` to `b`; `a, b` must be the
    /// endpoints of this segment in either order.
    pub fn reoriented(&self, a: Point, b: Point) -> Self {
        if a == self.a && b == self.b {
            return self.clone();
        }
        assert!(a == self.b && b == self.a, "reoriented onto a different segment");
        let coeffs = self.coeffs.iter().enumerate().map(|(j, &c)| if j % 2 == 1 { -c } else { c }).collect();
        Self::new(a, b, coeffs)
    }

    /// `self − other` on the orientation of `self`.
    pub fn difference(&self, other: &Self) -> Self {
        let other = other.reoriented(self.a, self.b);
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |c: &[f64], j: usize| c.get(j).copied().unwrap_or(0.0);
        Self::new(self.a, self.b, (0..n).map(|j| get(&self.coeffs, j) - get(&other.coeffs, j)).collect())
    }
}

/// Quadratic Lagrange basis on a triangle.
///
/// Local nodes: vertices 0, 1, 2, then midpoints of local edges 0, 1, 2
/// (edge `i` joins vertices `i` and `i + 1`).
#[derive(Debug, Clone, Copy)]
pub struct P2Basis {
    grads: [Point; 3],
}

impl P2Basis {
    pub fn new(geom: &TriangleGeometry) -> Self {
        Self { grads: geom.barycentric_gradients() }
    }

    pub fn values(&self, l: [f64; 3]) -> [f64; 6] {
        [
            l[0] * (2.0 * l[0] - 1.0),
            l[1] * (2.0 * l[1] - 1.0),
            l[2] * (2.0 * l[2] - 1.0),
            4.0 * l[0] * l[1],
            4.0 * l[1] * l[2],
            4.0 * l[2] * l[0],
        ]
    }

    pub fn gradients(&self, l: [f64; 3]) -> [Point; 6] {
        let g = self.grads;
        let lin = |a: f64, ga: Point, b: f64, gb: Point| [a * ga[0] + b * gb[0], a * ga[1] + b * gb[1]];
        [
            lin(4.0 * l[0] - 1.0, g[0], 0.0, g[0]),
            lin(4.0 * l[1] - 1.0, g[1], 0.0, g[1]),
            lin(4.0 * l[2] - 1.0, g[2], 0.0, g[2]),
            lin(4.0 * l[1], g[0], 4.0 * l[0], g[1]),
            lin(4.0 * l[2], g[1], 4.0 * l[1], g[2]),
            lin(4.0 * l[0], g[2], 4.0 * l[2], g[0]),
        ]
    }

    /// Constant Laplacians of the six basis functions.
    pub fn laplacians(&self) -> [f64; 6] {
        let g = self.grads;
        let dot = |a: Point, b: Point| a[0] * b[0] + a[1] * b[1];
        [
            4.0 * dot(g[0], g[0]),
            4.0 * dot(g[1], g[1]),
            4.0 * dot(g[2], g[2]),
            8.0 * dot(g[0], g[1]),
            8.0 * dot(g[1], g[2]),
            8.0 * dot(g[2], g[0]),
        ]
    }

    /// Barycentric coordinates of the six nodes.
    pub fn node_barycentrics() -> [[f64; 3]; 6] {
        [
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.5, 0.5, 0.0],
            [0.0, 0.5, 0.5],
            [0.5, 0.0, 0.5],
        ]
    }
}
