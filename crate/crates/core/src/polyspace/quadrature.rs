use crate::error::{Error, Result};
use crate::mesh::TriangleGeometry;

/// Highest total degree a triangle rule can be requested for.
pub const MAX_TRIANGLE_DEGREE: usize = 10;

/// Gauss-Legendre rule on `[0, 1]`; weights sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// `m`-point rule, exact for polynomials of degree `2m - 1`.
    pub fn new(m: usize) -> Self {
        assert!(m > 0, "Gauss-Legendre rule needs at least one point");
        let mut points = vec![0.0; m];
        let mut weights = vec![0.0; m];
        let mf = m as f64;
        for i in 0..m.div_ceil(2) {
            // Newton on P_m starting from the Chebyshev-like guess
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(m, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(m, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // map [-1, 1] -> [0, 1]
            points[i] = 0.5 * (1.0 - x);
            points[m - 1 - i] = 0.5 * (1.0 + x);
            weights[i] = 0.5 * w;
            weights[m - 1 - i] = 0.5 * w;
        }
        Self { points, weights }
    }

    /// Smallest rule exact for degree `degree`.
    pub fn for_degree(degree: usize) -> Self {
        Self::new(degree / 2 + 1)
    }

    /// The default edge rule: four points, exact to degree 7.
    pub fn edge_default() -> Self {
        Self::new(4)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }
}

/// `P_m(x)` and `P_m'(x)` by the three-term recurrence.
fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let mf = m as f64;
    let dp = mf * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Quadrature on the reference triangle `(0,0), (1,0), (0,1)`.
///
/// Points are barycentric coordinates; weights sum to the reference area 1/2.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleQuadrature {
    pub degree: usize,
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl TriangleQuadrature {
    /// Collapsed tensor-product Gauss rule exact for total degree `min_degree`.
    pub fn new(min_degree: usize) -> Result<Self> {
        if min_degree > MAX_TRIANGLE_DEGREE {
            return Err(Error::UnsupportedDegree(min_degree));
        }
        // the collapse Jacobian (1 - x) raises the degree in x by one
        let m = (min_degree + 2).div_ceil(2);
        let g = GaussLegendre::new(m);
        let mut points = Vec::with_capacity(m * m);
        let mut weights = Vec::with_capacity(m * m);
        for (u, wu) in g.iter() {
            for (v, wv) in g.iter() {
                let x = u;
                let y = v * (1.0 - u);
                points.push([1.0 - x - y, x, y]);
                weights.push(wu * wv * (1.0 - u));
            }
        }
        Ok(Self { degree: min_degree, points, weights })
    }

    /// Rule used for assembly and norms: exact to degree 6.
    pub fn assembly_default() -> Self {
        Self::new(6).expect("degree 6 is supported")
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Physical points and weights on `geom` (weights sum to its area).
    pub fn mapped<'a>(&'a self, geom: &'a TriangleGeometry) -> impl Iterator<Item = ([f64; 2], f64)> + 'a {
        let scale = 2.0 * geom.area();
        self.points
            .iter()
            .zip(&self.weights)
            .map(move |(b, w)| (geom.map(*b), w * scale))
    }

    pub fn integrate(&self, geom: &TriangleGeometry, f: impl Fn([f64; 2]) -> f64) -> f64 {
        self.mapped(geom).map(|(p, w)| w * f(p)).sum()
    }
}

/// Points and weights (summing to the edge length) along the segment `a → b`.
pub fn edge_points<'a>(
    rule: &'a GaussLegendre,
    a: [f64; 2],
    b: [f64; 2],
) -> impl Iterator<Item = (f64, [f64; 2], f64)> + 'a {
    let len = (b[0] - a[0]).hypot(b[1] - a[1]);
    rule.iter().map(move |(t, w)| {
        let p = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
        (t, p, w * len)
    })
}
