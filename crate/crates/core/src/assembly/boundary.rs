use crate::error::{Error, Result};
use crate::mesh::{BoundaryTags, Mesh, Point};
use crate::polyspace::{project_edge_samples, GaussLegendre};
use crate::problems::{NoiseSpec, NoiseStream};

use super::dofmap::DofMap;

/// Outward unit normal of a boundary edge.
fn outward_normal(mesh: &Mesh, e: usize) -> Result<(Point, f64)> {
    let nb = mesh.edge_neighbors(e);
    if !nb.is_boundary() {
        return Err(Error::InvalidArgument(format!("edge {e} is interior")));
    }
    let (_, sign) = nb.iter().next().expect("boundary edge has one triangle");
    let n = mesh.edge_normal(e);
    Ok(([sign * n[0], sign * n[1]], sign))
}

fn edge_samples(mesh: &Mesh, e: usize, rule: &GaussLegendre, g2: &dyn Fn(Point, Point) -> f64, n_out: Point) -> Vec<f64> {
    let (a, b) = mesh.edge_endpoints(e);
    rule.points.iter().map(|&t| g2([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])], n_out)).collect()
}

fn stored_coefficients(mesh: &Mesh, e: usize, samples: &[f64], rule: &GaussLegendre, sign: f64) -> Result<[f64; 2]> {
    let (a, b) = mesh.edge_endpoints(e);
    let q = project_edge_samples(samples, a, b, 1, rule)?;
    Ok([sign * q.coeffs[0], sign * q.coeffs[1]])
}

/// Flux coefficients (w.r.t. the global edge normal) of `Q_n g2` on a
/// Neumann edge. `g2(p, n)` is the outward normal derivative at `p`.
pub fn neumann_coefficients(
    mesh: &Mesh,
    tags: &BoundaryTags,
    e: usize,
    g2: &dyn Fn(Point, Point) -> f64,
) -> Result<[f64; 2]> {
    if !tags.neumann.get(e).copied().unwrap_or(false) {
        return Err(Error::NotNeumann(e));
    }
    let (n_out, sign) = outward_normal(mesh, e)?;
    let rule = GaussLegendre::edge_default();
    let samples = edge_samples(mesh, e, &rule, g2, n_out);
    stored_coefficients(mesh, e, &samples, &rule, sign)
}

/// Values of all constrained primal dofs (zero at free dofs).
///
/// Dirichlet nodes take `g1` at the node; Neumann edges take the projection
/// of `g2` sampled at four Gauss points. Noise is drawn edge by edge in
/// ascending edge index: first the not yet visited nodes `lo, mid, hi` of a
/// Dirichlet edge, then the Gauss samples of a Neumann edge.
pub fn apply_boundary_conditions(
    mesh: &Mesh,
    tags: &BoundaryTags,
    dofmap: &DofMap,
    g1: &dyn Fn(Point) -> f64,
    g2: &dyn Fn(Point, Point) -> f64,
    noise: &NoiseSpec,
) -> Result<Vec<f64>> {
    let mut values = vec![0.0; dofmap.num_primal()];
    let mut seen = vec![false; dofmap.num_u()];
    let mut stream: NoiseStream = noise.stream();
    let rule = GaussLegendre::edge_default();
    for e in 0..mesh.num_edges() {
        if tags.dirichlet[e] {
            let [lo, mid, hi] = mesh.edge_p2_nodes(e);
            for node in [lo, mid, hi] {
                if !seen[node] {
                    seen[node] = true;
                    values[dofmap.u_dof(node)] = stream.perturb(g1(mesh.p2_node_point(node)));
                }
            }
        }
        if tags.neumann[e] {
            let (n_out, sign) = outward_normal(mesh, e)?;
            let samples: Vec<f64> =
                edge_samples(mesh, e, &rule, g2, n_out).into_iter().map(|v| stream.perturb(v)).collect();
            let c = stored_coefficients(mesh, e, &samples, &rule, sign)?;
            values[dofmap.flux_dof(e, 0)] = c[0];
            values[dofmap.flux_dof(e, 1)] = c[1];
        }
    }
    Ok(values)
}
