//! Polynomial spaces, quadrature and the L2 projections onto element and
//! edge polynomials.

mod poly;
mod projection;
mod quadrature;

pub use poly::{dim_pk, monomial_exponents, shifted_legendre, EdgePolynomial, ElementPolynomial, P2Basis};
pub use projection::{
    element_mass_matrix, interpolate_dirichlet_nodes, project_l2_edge, project_l2_edge_with, project_l2_element,
};
pub(crate) use projection::project_edge_samples;
pub use quadrature::{edge_points, GaussLegendre, TriangleQuadrature, MAX_TRIANGLE_DEGREE};
