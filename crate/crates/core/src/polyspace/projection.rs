use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use super::poly::{dim_pk, shifted_legendre, EdgePolynomial, ElementPolynomial};
use super::quadrature::{GaussLegendre, TriangleQuadrature};
use crate::error::{Error, Result};
use crate::mesh::{BoundaryTags, Mesh, Point, TriangleGeometry};

/// Mass matrix of the scaled monomial basis of `P_k(T)`.
pub fn element_mass_matrix(geom: &TriangleGeometry, k: usize, quad: &TriangleQuadrature) -> DMatrix<f64> {
    let dim = dim_pk(k);
    let (center, scale) = (geom.centroid(), geom.diameter());
    let mut mass = DMatrix::zeros(dim, dim);
    for (p, w) in quad.mapped(geom) {
        let phi = ElementPolynomial::basis_values(k, center, scale, p);
        for i in 0..dim {
            for j in 0..dim {
                mass[(i, j)] += w * phi[i] * phi[j];
            }
        }
    }
    mass
}

/// L2 projection of `f` onto `P_k(T)` (the operator `Q_0`).
pub fn project_l2_element(
    f: impl Fn(Point) -> f64,
    geom: &TriangleGeometry,
    k: usize,
    quad: &TriangleQuadrature,
) -> Result<ElementPolynomial> {
    geom.check_nondegenerate()?;
    if quad.degree < 2 * k {
        return Err(Error::InvalidArgument(format!(
            "quadrature degree {} too low for projection onto P{k}",
            quad.degree
        )));
    }
    let dim = dim_pk(k);
    let (center, scale) = (geom.centroid(), geom.diameter());
    let mass = element_mass_matrix(geom, k, quad);
    let mut rhs = DVector::zeros(dim);
    for (p, w) in quad.mapped(geom) {
        let fp = f(p);
        let phi = ElementPolynomial::basis_values(k, center, scale, p);
        for i in 0..dim {
            rhs[i] += w * fp * phi[i];
        }
    }
    let chol = mass.cholesky().ok_or(Error::DegenerateElement { area: geom.signed_area() })?;
    let coeffs = chol.solve(&rhs);
    Ok(ElementPolynomial::new(k, center, scale, coeffs.iter().copied().collect()))
}

/// L2 projection of `g` onto polynomials of `degree` on the segment `a → b`
/// (the operators `Q_b` and `Q_n`), using a Gauss rule with at least four points.
pub fn project_l2_edge(g: impl Fn(Point) -> f64, a: Point, b: Point, degree: usize) -> Result<EdgePolynomial> {
    project_l2_edge_with(g, a, b, degree, &GaussLegendre::new((degree + 1).max(4)))
}

pub fn project_l2_edge_with(
    g: impl Fn(Point) -> f64,
    a: Point,
    b: Point,
    degree: usize,
    rule: &GaussLegendre,
) -> Result<EdgePolynomial> {
    let samples: Vec<f64> = rule
        .points
        .iter()
        .map(|&t| g([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]))
        .collect();
    project_edge_samples(&samples, a, b, degree, rule)
}

/// Projection from values of the data sampled at the points of `rule`.
pub(crate) fn project_edge_samples(
    samples: &[f64],
    a: Point,
    b: Point,
    degree: usize,
    rule: &GaussLegendre,
) -> Result<EdgePolynomial> {
    let len = (b[0] - a[0]).hypot(b[1] - a[1]);
    if !(len > 0.0) {
        return Err(Error::InvalidArgument("zero-length edge".into()));
    }
    debug_assert_eq!(samples.len(), rule.len());
    let coeffs = (0..=degree)
        .map(|j| {
            let moment: f64 = rule
                .iter()
                .zip(samples)
                .map(|((t, w), g)| w * g * shifted_legendre(j, t))
                .sum();
            (2 * j + 1) as f64 * moment
        })
        .collect();
    Ok(EdgePolynomial::new(a, b, coeffs))
}

/// Values of `g1` at every P2 node on the closure of the Dirichlet edges,
/// keyed by global P2 node index.
pub fn interpolate_dirichlet_nodes(
    g1: impl Fn(Point) -> f64,
    mesh: &Mesh,
    tags: &BoundaryTags,
) -> BTreeMap<usize, f64> {
    let mut values = BTreeMap::new();
    for e in tags.dirichlet_edges() {
        for node in mesh.edge_p2_nodes(e) {
            values.entry(node).or_insert_with(|| g1(mesh.p2_node_point(node)));
        }
    }
    values
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{BoundarySegmentSpec, Side};

    #[test]
    fn constant_and_member_reproduced() {
        let geom = TriangleGeometry::new([[0.1, 0.2], [0.7, 0.1], [0.3, 0.9]]);
        let q = TriangleQuadrature::new(6).unwrap();
        for k in 0..=3 {
            let p = project_l2_element(|_| 2.5, &geom, k, &q).unwrap();
            assert!((p.eval([0.3, 0.3]) - 2.5).abs() < 1e-13);
        }
        let p = project_l2_element(|x| x[0] * x[0], &geom, 2, &q).unwrap();
        for x in [[0.2, 0.3], [0.5, 0.4], [0.3, 0.7]] {
            assert!((p.eval(x) - x[0] * x[0]).abs() < 1e-13);
        }
    }

    #[test]
    fn cubic_onto_p2_matches_normal_equations() {
        // Oracle: normal equations in the plain monomial basis with exact moments
        // ∫_ref x^a y^b = a! b! / (a+b+2)!.
        let fact = |k: i32| (1..=k).map(f64::from).product::<f64>();
        let moment = |a: i32, b: i32| fact(a) * fact(b) / fact(a + b + 2);
        let exps = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)];
        let mut gram = DMatrix::zeros(6, 6);
        let mut rhs = DVector::zeros(6);
        for (i, &(a, b)) in exps.iter().enumerate() {
            for (j, &(c, d)) in exps.iter().enumerate() {
                gram[(i, j)] = moment(a + c, b + d);
            }
            rhs[i] = moment(a + 3, b);
        }
        let coef = gram.lu().solve(&rhs).unwrap();
        let oracle = |p: Point| {
            exps.iter().zip(coef.iter()).map(|(&(a, b), c)| c * p[0].powi(a) * p[1].powi(b)).sum::<f64>()
        };

        let geom = TriangleGeometry::reference();
        let q = TriangleQuadrature::new(6).unwrap();
        let proj = project_l2_element(|p| p[0].powi(3), &geom, 2, &q).unwrap();
        for p in [[0.1, 0.1], [0.6, 0.2], [0.25, 0.5], [0.0, 0.0]] {
            assert!((proj.eval(p) - oracle(p)).abs() < 1e-12);
        }
    }

    #[test]
    fn projection_is_idempotent_and_orthogonal() {
        let geom = TriangleGeometry::new([[0.0, 0.0], [0.5, 0.0], [0.0, 0.5]]);
        let q = TriangleQuadrature::new(10).unwrap();
        let f = |p: Point| (3.0 * p[0]).sin() * (p[1] + 1.0).exp();
        let once = project_l2_element(f, &geom, 2, &q).unwrap();
        let twice = project_l2_element(|p| once.eval(p), &geom, 2, &q).unwrap();
        for (a, b) in once.coeffs().iter().zip(twice.coeffs()) {
            assert!((a - b).abs() < 1e-13);
        }
        for i in 0..dim_pk(2) {
            let phi = ElementPolynomial::basis(2, geom.centroid(), geom.diameter(), i);
            let r = q.integrate(&geom, |p| (f(p) - once.eval(p)) * phi.eval(p));
            assert!(r.abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_element_rejected() {
        let geom = TriangleGeometry::new([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]);
        let q = TriangleQuadrature::new(6).unwrap();
        assert!(matches!(project_l2_element(|_| 1.0, &geom, 1, &q), Err(Error::DegenerateElement { .. })));
    }

    #[test]
    fn edge_projection_examples() {
        let (a, b) = ([0.0, 0.0], [1.0, 0.0]);
        let p = project_l2_edge(|_| 1.0, a, b, 1).unwrap();
        assert!((p.coeffs[0] - 1.0).abs() < 1e-15 && p.coeffs[1].abs() < 1e-15);
        let p = project_l2_edge(|x| 2.0 * x[0] - 0.5, a, b, 1).unwrap();
        for t in [0.0, 0.3, 1.0] {
            assert!((p.eval_param(t) - (2.0 * t - 0.5)).abs() < 1e-14);
        }
        // t^2 onto P1: t - 1/6
        let p = project_l2_edge(|x| x[0] * x[0], a, b, 1).unwrap();
        for t in [0.0, 0.4, 1.0] {
            assert!((p.eval_param(t) - (t - 1.0 / 6.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn edge_projection_preserves_integral() {
        let (a, b) = ([0.2, 0.3], [0.5, 0.9]);
        let g = |p: Point| (p[0] * 4.0).cos() + p[1] * p[1];
        let fine = GaussLegendre::new(12);
        for d in 0..=3 {
            let p = project_l2_edge_with(g, a, b, d, &fine).unwrap();
            let exact: f64 = crate::polyspace::edge_points(&fine, a, b).map(|(_, x, w)| w * g(x)).sum();
            assert!((p.integral() - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn zero_length_edge_rejected() {
        assert!(project_l2_edge(|_| 1.0, [0.5, 0.5], [0.5, 0.5], 1).is_err());
    }

    #[test]
    fn dirichlet_nodes_on_bottom() {
        let mesh = Mesh::uniform_unit_square(1).unwrap();
        let tags = mesh.classify_boundary(&[BoundarySegmentSpec::whole(Side::Bottom, true, false)]).unwrap();
        let vals = interpolate_dirichlet_nodes(|p| p[0], &mesh, &tags);
        let mut got: Vec<(f64, f64)> = vals.iter().map(|(&n, &v)| (mesh.p2_node_point(n)[0], v)).collect();
        got.sort_by(|a, b| a.0.total_cmp(&b.0));
        assert_eq!(got, vec![(0.0, 0.0), (0.5, 0.5), (1.0, 1.0)]);
        let zeros = interpolate_dirichlet_nodes(|p| p[0].sin() * p[1].sin(), &mesh, &tags);
        assert!(zeros.values().all(|v| *v == 0.0));
    }
}
