//! Weak functions on a triangle, the discrete weak Laplacian and the
//! element stabilizer.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::mesh::{Point, TriangleGeometry};
use crate::polyspace::{
    dim_pk, edge_points, element_mass_matrix, project_l2_edge, EdgePolynomial, ElementPolynomial, GaussLegendre,
    TriangleQuadrature, MAX_TRIANGLE_DEGREE,
};

/// A weak function `{v0, vb, vn n}` on one triangle.
///
/// `vn[i]` is stored with respect to the global normal `n_e` of local edge
/// `i`; the outward value seen from this triangle is `signs[i] * vn[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementWeakFunction {
    pub v0: ElementPolynomial,
    pub vb: [EdgePolynomial; 3],
    pub vn: [EdgePolynomial; 3],
    pub signs: [f64; 3],
}

impl ElementWeakFunction {
    /// The weak function determined by `v0` alone: `vb = v0|∂T`, `vn = ∇v0·n`.
    pub fn from_polynomial(v0: ElementPolynomial, geom: &TriangleGeometry, signs: [f64; 3]) -> Result<Self> {
        let k = v0.degree();
        let mut vb = Vec::with_capacity(3);
        let mut vn = Vec::with_capacity(3);
        for (i, &sign) in signs.iter().enumerate() {
            let (a, b) = geom.edge(i);
            let n = geom.outward_normal(i);
            vb.push(project_l2_edge(|p| v0.eval(p), a, b, k)?);
            let stored = |p: Point| {
                let g = v0.gradient(p);
                sign * (g[0] * n[0] + g[1] * n[1])
            };
            vn.push(project_l2_edge(stored, a, b, k.saturating_sub(1))?);
        }
        Ok(Self {
            v0,
            vb: vb.try_into().expect("three edges"),
            vn: vn.try_into().expect("three edges"),
            signs,
        })
    }

    /// Componentwise `self − other` (same element, same signs).
    pub fn difference(&self, other: &Self) -> Self {
        Self {
            v0: self.v0.difference(&other.v0),
            vb: [0, 1, 2].map(|i| self.vb[i].difference(&other.vb[i])),
            vn: [0, 1, 2].map(|i| self.vn[i].difference(&other.vn[i])),
            signs: self.signs,
        }
    }

    /// Outward normal-derivative value on local edge `i` at `p`.
    pub fn outward_vn(&self, i: usize, p: Point) -> f64 {
        self.signs[i] * self.vn[i].eval_at(p)
    }

    fn trace_degree(&self) -> usize {
        self.vb.iter().map(EdgePolynomial::degree).max().unwrap_or(0)
    }

    fn flux_degree(&self) -> usize {
        self.vn.iter().map(EdgePolynomial::degree).max().unwrap_or(0)
    }
}

/// The discrete weak Laplacian of `v` in `P_r(T)`.
///
/// Solves `(p, φ)_T = (v0, Δφ)_T − ⟨vb, ∇φ·n⟩_∂T + ⟨vn, φ⟩_∂T` for all
/// `φ ∈ P_r(T)`, with all integrals computed exactly for polynomial data.
pub fn discrete_weak_laplacian(v: &ElementWeakFunction, geom: &TriangleGeometry, r: usize) -> Result<ElementPolynomial> {
    geom.check_nondegenerate()?;
    let k = v.v0.degree();
    let tri_degree = (k + r.saturating_sub(2)).max(2 * r);
    if tri_degree > MAX_TRIANGLE_DEGREE {
        return Err(Error::UnsupportedDegree(tri_degree));
    }
    let quad = TriangleQuadrature::new(tri_degree)?;
    let edge_rule = GaussLegendre::for_degree((v.trace_degree() + r).max(v.flux_degree() + r));

    let dim = dim_pk(r);
    let (center, scale) = (geom.centroid(), geom.diameter());
    let basis: Vec<ElementPolynomial> = (0..dim).map(|i| ElementPolynomial::basis(r, center, scale, i)).collect();

    let mut rhs = DVector::zeros(dim);
    for (p, w) in quad.mapped(geom) {
        let v0 = v.v0.eval(p);
        for (i, phi) in basis.iter().enumerate() {
            rhs[i] += w * v0 * phi.laplacian(p);
        }
    }
    for e in 0..3 {
        let (a, b) = geom.edge(e);
        let n = geom.outward_normal(e);
        for (_, p, w) in edge_points(&edge_rule, a, b) {
            let vb = v.vb[e].eval_at(p);
            let vn = v.outward_vn(e, p);
            for (i, phi) in basis.iter().enumerate() {
                let g = phi.gradient(p);
                rhs[i] += w * (vn * phi.eval(p) - vb * (g[0] * n[0] + g[1] * n[1]));
            }
        }
    }
    let mass = element_mass_matrix(geom, r, &quad);
    let chol = mass.cholesky().ok_or(Error::DegenerateElement { area: geom.signed_area() })?;
    let coeffs = chol.solve(&rhs);
    Ok(ElementPolynomial::new(r, center, scale, coeffs.iter().copied().collect()))
}

/// Weak Laplacian of a continuous quadratic weak function, tested against
/// constants: `(Σ_e s(T,e) ∫_e vn ds) / |T|`.
///
/// `fluxes[i]` holds the shifted-Legendre coefficients of the stored flux on
/// local edge `i`; only the mean survives the integral.
pub fn weak_laplacian_c0_k2(geom: &TriangleGeometry, signs: [f64; 3], fluxes: [[f64; 2]; 3]) -> Result<f64> {
    geom.check_nondegenerate()?;
    let boundary: f64 = (0..3).map(|i| signs[i] * geom.edge_length(i) * fluxes[i][0]).sum();
    Ok(boundary / geom.area())
}

/// Element stabilizer
/// `h⁻³⟨σ0−σb, v0−vb⟩_∂T + h⁻¹⟨∇σ0·n−σn, ∇v0·n−vn⟩_∂T`.
pub fn stabilizer_form(sigma: &ElementWeakFunction, v: &ElementWeakFunction, geom: &TriangleGeometry) -> f64 {
    let deg = sigma.v0.degree().max(v.v0.degree()).max(sigma.trace_degree()).max(v.trace_degree());
    let rule = GaussLegendre::new((deg + 1).max(4));
    let h = geom.diameter();
    let mut trace_term = 0.0;
    let mut flux_term = 0.0;
    for e in 0..3 {
        let (a, b) = geom.edge(e);
        let n = geom.outward_normal(e);
        for (_, p, w) in edge_points(&rule, a, b) {
            let ds = sigma.v0.eval(p) - sigma.vb[e].eval_at(p);
            let dv = v.v0.eval(p) - v.vb[e].eval_at(p);
            trace_term += w * ds * dv;
            let gs = sigma.v0.gradient(p);
            let gv = v.v0.gradient(p);
            let fs = gs[0] * n[0] + gs[1] * n[1] - sigma.outward_vn(e, p);
            let fv = gv[0] * n[0] + gv[1] * n[1] - v.outward_vn(e, p);
            flux_term += w * fs * fv;
        }
    }
    trace_term / h.powi(3) + flux_term / h
}
