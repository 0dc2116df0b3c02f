//! Projection of the exact solution and the error norms of `e = u_h − Q_h u`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linsolve::Solution;
use crate::mesh::{BoundaryTags, Mesh};
use crate::polyspace::{
    project_l2_edge, project_l2_element, EdgePolynomial, ElementPolynomial, P2Basis, TriangleQuadrature,
};
use crate::problems::ManufacturedSolution;
use crate::weak_laplacian::{stabilizer_form, ElementWeakFunction};

/// Quadrature degree for projections and norm integrals.
pub const NORM_DEGREE: usize = 10;

/// `Q_h u`: elementwise P2 projection, P2 edge traces and P1 normal fluxes.
#[derive(Debug, Clone)]
pub struct ExactProjection {
    pub q0: Vec<ElementPolynomial>,
    /// Trace projection per edge, parametrized from the lower to the higher vertex.
    pub qb: Vec<EdgePolynomial>,
    /// Flux coefficients of `Q_n(∇u·n_e)` per edge.
    pub qn: Vec<[f64; 2]>,
}

pub fn project_exact(u: &ManufacturedSolution, mesh: &Mesh) -> Result<ExactProjection> {
    let quad = TriangleQuadrature::new(NORM_DEGREE)?;
    let q0 = (0..mesh.num_triangles())
        .map(|t| project_l2_element(|p| u.value(p), &mesh.geometry(t), 2, &quad))
        .collect::<Result<Vec<_>>>()?;
    let mut qb = Vec::with_capacity(mesh.num_edges());
    let mut qn = Vec::with_capacity(mesh.num_edges());
    for e in 0..mesh.num_edges() {
        let (a, b) = mesh.edge_endpoints(e);
        let n = mesh.edge_normal(e);
        qb.push(project_l2_edge(|p| u.value(p), a, b, 2)?);
        let flux = project_l2_edge(|p| u.flux(p, n), a, b, 1)?;
        qn.push([flux.coeffs[0], flux.coeffs[1]]);
    }
    Ok(ExactProjection { q0, qb, qn })
}

/// The weak function of a continuous P2 field with edge fluxes on triangle `t`.
/// `primal` is in the global dof layout (nodal values, then two flux
/// coefficients per edge).
pub fn c0_weak_function(mesh: &Mesh, t: usize, primal: &[f64]) -> Result<ElementWeakFunction> {
    let num_u = mesh.num_p2_nodes();
    let values = mesh.triangle_p2_nodes(t).map(|n| primal[n]);
    let fluxes = mesh.triangle_edges(t).map(|e| [primal[num_u + 2 * e], primal[num_u + 2 * e + 1]]);
    c0_weak_function_local(mesh, t, values, fluxes)
}

/// As [`c0_weak_function`] from the local nodal values and the flux
/// coefficients of the three local edges.
pub fn c0_weak_function_local(
    mesh: &Mesh,
    t: usize,
    values: [f64; 6],
    fluxes: [[f64; 2]; 3],
) -> Result<ElementWeakFunction> {
    let geom = mesh.geometry(t);
    let basis = P2Basis::new(&geom);
    let interp = |p| {
        let phi = basis.values(geom.barycentric(p));
        phi.iter().zip(&values).map(|(a, b)| a * b).sum::<f64>()
    };
    let v0 = project_l2_element(interp, &geom, 2, &TriangleQuadrature::new(4)?)?;
    let edges = mesh.triangle_edges(t);
    let vb = [0, 1, 2].map(|i| {
        let (a, b) = geom.edge(i);
        project_l2_edge(|p| v0.eval(p), a, b, 2)
    });
    let vn = [0, 1, 2].map(|i| {
        let (a, b) = mesh.edge_endpoints(edges[i]);
        EdgePolynomial::new(a, b, fluxes[i].to_vec())
    });
    let [b0, b1, b2] = vb;
    Ok(ElementWeakFunction { v0, vb: [b0?, b1?, b2?], vn, signs: mesh.triangle_signs(t) })
}

/// `Q_h u` restricted to triangle `t` as a weak function.
pub fn projected_weak_function(mesh: &Mesh, t: usize, qhu: &ExactProjection) -> ElementWeakFunction {
    let edges = mesh.triangle_edges(t);
    ElementWeakFunction {
        v0: qhu.q0[t].clone(),
        vb: edges.map(|e| qhu.qb[e].clone()),
        vn: edges.map(|e| {
            let (a, b) = mesh.edge_endpoints(e);
            EdgePolynomial::new(a, b, qhu.qn[e].to_vec())
        }),
        signs: mesh.triangle_signs(t),
    }
}

/// Error norms of `e = u_h − Q_h u` and the multiplier norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorReport {
    pub h2: f64,
    pub l1: f64,
    pub l2: f64,
    pub h1: f64,
    pub linf: f64,
    pub w11: f64,
    pub lambda0h: f64,
}

impl ErrorReport {
    /// The six error norms in table order (`h2, l1, l2, h1, linf, w11`).
    pub fn error_norms(&self) -> [f64; 6] {
        [self.h2, self.l1, self.l2, self.h1, self.linf, self.w11]
    }
}

/// The two parts of `‖e‖²_{2,h}`: `Σ_T ‖Δe0‖²_T` and `s(e, e)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteH2Parts {
    pub laplacian: f64,
    pub stabilizer: f64,
}

fn check_sizes(solution: &Solution, qhu: &ExactProjection, mesh: &Mesh) -> Result<()> {
    let checks = [
        (mesh.num_p2_nodes(), solution.u0.len()),
        (mesh.num_edges(), solution.un.len()),
        (mesh.num_triangles(), solution.lambda.len()),
        (mesh.num_triangles(), qhu.q0.len()),
        (mesh.num_edges(), qhu.qn.len()),
    ];
    for (expected, got) in checks {
        if expected != got {
            return Err(Error::DimensionMismatch { expected, got });
        }
    }
    Ok(())
}

pub fn discrete_h2_parts(solution: &Solution, qhu: &ExactProjection, mesh: &Mesh) -> Result<DiscreteH2Parts> {
    check_sizes(solution, qhu, mesh)?;
    let primal = solution.primal();
    let mut parts = DiscreteH2Parts { laplacian: 0.0, stabilizer: 0.0 };
    for t in 0..mesh.num_triangles() {
        let geom = mesh.geometry(t);
        let e = c0_weak_function(mesh, t, &primal)?.difference(&projected_weak_function(mesh, t, qhu));
        let lap = e.v0.laplacian(geom.centroid());
        parts.laplacian += geom.area() * lap * lap;
        parts.stabilizer += stabilizer_form(&e, &e, &geom);
    }
    Ok(parts)
}

/// `∫_0^1 |c0 + c1 (2t − 1)| dt`, exact.
fn mean_abs_linear(c0: f64, c1: f64) -> f64 {
    let (a, b) = (c0 - c1, c0 + c1);
    if a * b >= 0.0 {
        c0.abs()
    } else {
        (a * a + b * b) / (2.0 * (a.abs() + b.abs()))
    }
}

pub fn error_norms(solution: &Solution, qhu: &ExactProjection, mesh: &Mesh, tags: &BoundaryTags) -> Result<ErrorReport> {
    let parts = discrete_h2_parts(solution, qhu, mesh)?;
    let quad = TriangleQuadrature::new(NORM_DEGREE)?;
    let nodes_bary = P2Basis::node_barycentrics();
    let (mut l1, mut l2sq, mut linf, mut h1sq, mut w11) = (0.0, 0.0, 0.0f64, 0.0, 0.0);
    for t in 0..mesh.num_triangles() {
        let geom = mesh.geometry(t);
        let basis = P2Basis::new(&geom);
        let values = mesh.triangle_p2_nodes(t).map(|n| solution.u0[n]);
        let e0 = |l: [f64; 3]| {
            let phi = basis.values(l);
            let uh: f64 = phi.iter().zip(&values).map(|(a, b)| a * b).sum();
            uh - qhu.q0[t].eval(geom.map(l))
        };
        for (l, w) in quad.points.iter().zip(&quad.weights) {
            let v = e0(*l);
            let w = w * 2.0 * geom.area();
            l1 += w * v.abs();
            l2sq += w * v * v;
            linf = linf.max(v.abs());
        }
        for l in nodes_bary {
            linf = linf.max(e0(l).abs());
        }
        let h = geom.diameter();
        for (i, e) in mesh.triangle_edges(t).into_iter().enumerate() {
            let len = geom.edge_length(i);
            let c0 = solution.un[e][0] - qhu.qn[e][0];
            let c1 = solution.un[e][1] - qhu.qn[e][1];
            h1sq += h * len * (c0 * c0 + c1 * c1 / 3.0);
            w11 += h * len * mean_abs_linear(c0, c1);
        }
    }
    Ok(ErrorReport {
        h2: (parts.laplacian + parts.stabilizer).sqrt(),
        l1,
        l2: l2sq.sqrt(),
        h1: h1sq.sqrt(),
        linf,
        w11,
        lambda0h: lambda_norm(&solution.lambda, mesh, tags)?,
    })
}

/// `Σ_{e ∉ Γn} h_e ‖[λ]‖²_e` for piecewise constant `λ`, where the jump on a
/// boundary edge is the one-sided value.
pub fn lambda_norm_squared(lambda: &[f64], mesh: &Mesh, tags: &BoundaryTags) -> Result<f64> {
    if lambda.len() != mesh.num_triangles() {
        return Err(Error::DimensionMismatch { expected: mesh.num_triangles(), got: lambda.len() });
    }
    let mut sum = 0.0;
    for e in 0..mesh.num_edges() {
        if tags.neumann[e] {
            continue;
        }
        let jump = edge_jump(lambda, mesh, e);
        let h = mesh.edge_length(e);
        sum += h * h * jump * jump;
    }
    Ok(sum)
}

pub fn lambda_norm(lambda: &[f64], mesh: &Mesh, tags: &BoundaryTags) -> Result<f64> {
    Ok(lambda_norm_squared(lambda, mesh, tags)?.sqrt())
}

/// `[λ]_e = Σ_{T ∋ e} s(T, e) λ_T`.
pub fn edge_jump(lambda: &[f64], mesh: &Mesh, e: usize) -> f64 {
    mesh.edge_neighbors(e).iter().map(|(t, s)| s * lambda[t]).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{BoundarySegmentSpec, Side};
    use crate::polyspace::GaussLegendre;
    use crate::problems::{QUAD, SINSIN};

    #[test]
    fn mean_abs_linear_matches_fine_quadrature() {
        let rule = GaussLegendre::new(2000);
        for (c0, c1) in [(0.3, 0.1), (0.1, 0.3), (-0.2, 0.5), (0.0, 1.0), (0.0, 0.0), (-1.0, -0.2)] {
            let q: f64 = rule.iter().map(|(t, w)| w * (c0 + c1 * (2.0 * t - 1.0)).abs()).sum();
            assert!((mean_abs_linear(c0, c1) - q).abs() < 1e-6, "{c0} {c1}");
        }
    }

    #[test]
    fn quadratic_projection_is_exact() {
        let mesh = Mesh::uniform_unit_square(2).unwrap();
        let q = project_exact(&QUAD, &mesh).unwrap();
        for t in 0..mesh.num_triangles() {
            let c = mesh.geometry(t).centroid();
            assert!((q.q0[t].eval(c) - QUAD.value(c)).abs() < 1e-13);
        }
    }

    #[test]
    fn linear_flux_is_constant() {
        let lin = ManufacturedSolution { name: "lin", u: |p| 2.0 * p[0] - p[1], grad: |_| [2.0, -1.0], laplacian: |_| 0.0 };
        let mesh = Mesh::uniform_unit_square(2).unwrap();
        let q = project_exact(&lin, &mesh).unwrap();
        for e in 0..mesh.num_edges() {
            let n = mesh.edge_normal(e);
            assert!((q.qn[e][0] - (2.0 * n[0] - n[1])).abs() < 1e-14);
            assert!(q.qn[e][1].abs() < 1e-14);
        }
    }

    #[test]
    fn sinsin_projection_against_fine_oracle() {
        // moments of Q0 u against each basis function equal those of u
        let mesh = Mesh::uniform_unit_square(2).unwrap();
        let q = project_exact(&SINSIN, &mesh).unwrap();
        let geom = mesh.geometry(3);
        let fine = TriangleQuadrature::new(10).unwrap();
        let p = &q.q0[3];
        for i in 0..6 {
            let phi = ElementPolynomial::basis(2, p.center(), p.scale(), i);
            let lhs = fine.integrate(&geom, |x| p.eval(x) * phi.eval(x));
            // refine the triangle into four for an independent right-hand side
            let v = geom.vertices;
            let mid = |a: [f64; 2], b: [f64; 2]| [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
            let (m01, m12, m20) = (mid(v[0], v[1]), mid(v[1], v[2]), mid(v[2], v[0]));
            let subs = [[v[0], m01, m20], [m01, v[1], m12], [m20, m12, v[2]], [m12, m20, m01]];
            let rhs: f64 = subs
                .iter()
                .map(|s| fine.integrate(&crate::mesh::TriangleGeometry::new(*s), |x| SINSIN.value(x) * phi.eval(x)))
                .sum();
            assert!((lhs - rhs).abs() < 1e-14, "{i}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn lambda_norm_examples() {
        let mesh = Mesh::uniform_unit_square(1).unwrap();
        let none = BoundaryTags::untagged(mesh.num_edges());
        assert_eq!(lambda_norm(&[0.0, 0.0], &mesh, &none).unwrap(), 0.0);
        let bottom = mesh.classify_boundary(&[BoundarySegmentSpec::whole(Side::Bottom, true, true)]).unwrap();
        assert!((lambda_norm(&[1.0, 1.0], &mesh, &bottom).unwrap() - 3f64.sqrt()).abs() < 1e-14);
        // λ = 1 on the lower-left triangle: the diagonal contributes
        // h_e ∫_e 1 = √2·√2 and its two unit boundary edges 1 each
        let lambda = [1.0, 0.0];
        assert!((lambda_norm(&lambda, &mesh, &none).unwrap() - 2.0).abs() < 1e-14);
    }
}
