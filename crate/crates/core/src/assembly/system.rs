use crate::error::Result;
use crate::linsolve::CscMatrix;
use crate::mesh::{BoundaryTags, Mesh, Point};
use crate::polyspace::{GaussLegendre, P2Basis, TriangleQuadrature};
use crate::problems::{ManufacturedSolution, NoiseSpec};

use super::boundary::apply_boundary_conditions;
use super::dofmap::DofMap;

/// Quadrature degree for the load `∫_T f`.
pub const LOAD_DEGREE: usize = 10;

/// Local dof layout on a triangle: six P2 nodes, then `(c0, c1)` per local edge.
pub const LOCAL_DOFS: usize = 12;

/// Global indices of the twelve local dofs of triangle `t`.
pub fn local_dofs(mesh: &Mesh, dofmap: &DofMap, t: usize) -> [usize; LOCAL_DOFS] {
    let nodes = mesh.triangle_p2_nodes(t);
    let edges = mesh.triangle_edges(t);
    let mut dofs = [0; LOCAL_DOFS];
    for i in 0..6 {
        dofs[i] = dofmap.u_dof(nodes[i]);
    }
    for i in 0..3 {
        dofs[6 + 2 * i] = dofmap.flux_dof(edges[i], 0);
        dofs[7 + 2 * i] = dofmap.flux_dof(edges[i], 1);
    }
    dofs
}

/// Element stabilizer matrix in the local layout.
///
/// For a continuous P2 field the trace mismatch `v0 − vb` vanishes, so only
/// `h⁻¹ ∫_∂T (∇v0·n − vn)²` remains. The flux on local edge `i` is evaluated
/// at the global parameter, which runs backwards when `signs[i] < 0`.
pub fn element_stabilizer(mesh: &Mesh, t: usize) -> [[f64; LOCAL_DOFS]; LOCAL_DOFS] {
    let geom = mesh.geometry(t);
    let signs = mesh.triangle_signs(t);
    let basis = P2Basis::new(&geom);
    let h = geom.diameter();
    let rule = GaussLegendre::edge_default();
    let mut s = [[0.0; LOCAL_DOFS]; LOCAL_DOFS];
    for i in 0..3 {
        let n = geom.outward_normal(i);
        let len = geom.edge_length(i);
        for (tau, w) in rule.iter() {
            let mut l = [0.0; 3];
            l[i] = 1.0 - tau;
            l[(i + 1) % 3] = tau;
            let grads = basis.gradients(l);
            let mut a = [0.0; LOCAL_DOFS];
            for j in 0..6 {
                a[j] = grads[j][0] * n[0] + grads[j][1] * n[1];
            }
            let t_global = if signs[i] > 0.0 { tau } else { 1.0 - tau };
            a[6 + 2 * i] = -signs[i];
            a[7 + 2 * i] = -signs[i] * (2.0 * t_global - 1.0);
            let weight = w * len / h;
            for r in 0..LOCAL_DOFS {
                if a[r] == 0.0 {
                    continue;
                }
                for c in 0..LOCAL_DOFS {
                    s[r][c] += weight * (a[r] * a[c]);
                }
            }
        }
    }
    s
}

/// Stabilizer over all primal dofs.
pub fn assemble_stabilizer(mesh: &Mesh, dofmap: &DofMap) -> CscMatrix {
    let n = dofmap.num_primal();
    let mut triplets = Vec::with_capacity(mesh.num_triangles() * LOCAL_DOFS * LOCAL_DOFS);
    for t in 0..mesh.num_triangles() {
        let dofs = local_dofs(mesh, dofmap, t);
        let s = element_stabilizer(mesh, t);
        for r in 0..LOCAL_DOFS {
            for c in 0..LOCAL_DOFS {
                if s[r][c] != 0.0 {
                    triplets.push((dofs[r], dofs[c], s[r][c]));
                }
            }
        }
    }
    CscMatrix::from_triplets(n, n, &triplets)
}

/// Weak Laplacian tested against the piecewise constants: row `T` holds
/// `Σ_e s(T,e) |e|` on the mean flux coefficients. Also returns `∫_T f`.
pub fn assemble_constraint(mesh: &Mesh, dofmap: &DofMap, f: &dyn Fn(Point) -> f64) -> Result<(CscMatrix, Vec<f64>)> {
    let quad = TriangleQuadrature::new(LOAD_DEGREE)?;
    let mut triplets = Vec::with_capacity(3 * mesh.num_triangles());
    let mut load = Vec::with_capacity(mesh.num_triangles());
    for t in 0..mesh.num_triangles() {
        let geom = mesh.geometry(t);
        geom.check_nondegenerate()?;
        let signs = mesh.triangle_signs(t);
        for (i, &e) in mesh.triangle_edges(t).iter().enumerate() {
            triplets.push((t, dofmap.flux_dof(e, 0), signs[i] * geom.edge_length(i)));
        }
        load.push(quad.integrate(&geom, f));
    }
    Ok((CscMatrix::from_triplets(mesh.num_triangles(), dofmap.num_primal(), &triplets), load))
}

fn restrict_columns(a: &CscMatrix, dofmap: &DofMap, rows_free: bool) -> CscMatrix {
    let mut t = Vec::with_capacity(a.nnz());
    for (i, j, v) in a.triplets() {
        let Some(jf) = dofmap.free_position(j) else { continue };
        if rows_free {
            let Some(i_f) = dofmap.free_position(i) else { continue };
            t.push((i_f, jf, v));
        } else {
            t.push((i, jf, v));
        }
    }
    let nrows = if rows_free { dofmap.num_free() } else { a.nrows() };
    CscMatrix::from_triplets(nrows, dofmap.num_free(), &t)
}

/// The assembled saddle-point system `[S Bᵀ; B 0] (u, λ) = (rhs_dual, rhs_primal)`
/// over the free primal dofs and the multipliers.
#[derive(Debug, Clone)]
pub struct SaddleSystem {
    pub dofmap: DofMap,
    /// Stabilizer over all primal dofs.
    pub stabilizer: CscMatrix,
    /// Constraint rows over all primal dofs.
    pub constraint: CscMatrix,
    /// `∫_T f` per triangle.
    pub load: Vec<f64>,
    /// Prescribed values of constrained dofs, zero elsewhere.
    pub boundary_values: Vec<f64>,
    s_free: CscMatrix,
    b_free: CscMatrix,
    matrix: CscMatrix,
    rhs_dual: Vec<f64>,
    rhs_primal: Vec<f64>,
}

impl SaddleSystem {
    pub fn assemble(
        mesh: &Mesh,
        tags: &BoundaryTags,
        f: &dyn Fn(Point) -> f64,
        boundary_values: Vec<f64>,
    ) -> Result<Self> {
        let dofmap = DofMap::new(mesh, tags);
        let stabilizer = assemble_stabilizer(mesh, &dofmap);
        let (constraint, load) = assemble_constraint(mesh, &dofmap, f)?;
        Self::from_parts(dofmap, stabilizer, constraint, load, boundary_values)
    }

    pub fn from_parts(
        dofmap: DofMap,
        stabilizer: CscMatrix,
        constraint: CscMatrix,
        load: Vec<f64>,
        boundary_values: Vec<f64>,
    ) -> Result<Self> {
        if boundary_values.len() != dofmap.num_primal() {
            return Err(crate::Error::DimensionMismatch { expected: dofmap.num_primal(), got: boundary_values.len() });
        }
        let s_free = restrict_columns(&stabilizer, &dofmap, true);
        let b_free = restrict_columns(&constraint, &dofmap, false);
        let nf = dofmap.num_free();
        let mut t = s_free.triplets();
        for (r, c, v) in b_free.triplets() {
            t.push((nf + r, c, v));
            t.push((c, nf + r, v));
        }
        let dim = nf + dofmap.num_lambda();
        let matrix = CscMatrix::from_triplets(dim, dim, &t);
        let mut system = Self {
            dofmap,
            stabilizer,
            constraint,
            load,
            boundary_values: Vec::new(),
            s_free,
            b_free,
            matrix,
            rhs_dual: Vec::new(),
            rhs_primal: Vec::new(),
        };
        system.set_boundary_values(boundary_values);
        Ok(system)
    }

    /// Replace the prescribed values and recompute the lifted right-hand side.
    pub fn set_boundary_values(&mut self, values: Vec<f64>) {
        assert_eq!(values.len(), self.dofmap.num_primal());
        let mut lifted = values.clone();
        for &d in self.dofmap.free_dofs() {
            lifted[d] = 0.0;
        }
        let s_lift = self.stabilizer.mul_vec(&lifted);
        self.rhs_dual = self.dofmap.free_dofs().iter().map(|&d| -s_lift[d]).collect();
        let b_lift = self.constraint.mul_vec(&lifted);
        self.rhs_primal = self.load.iter().zip(b_lift).map(|(l, b)| l - b).collect();
        self.boundary_values = lifted;
    }

    pub fn num_free(&self) -> usize {
        self.dofmap.num_free()
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CscMatrix {
        &self.matrix
    }

    pub fn free_stabilizer(&self) -> &CscMatrix {
        &self.s_free
    }

    pub fn free_constraint(&self) -> &CscMatrix {
        &self.b_free
    }

    pub fn rhs_dual(&self) -> &[f64] {
        &self.rhs_dual
    }

    pub fn rhs_primal(&self) -> &[f64] {
        &self.rhs_primal
    }

    pub fn rhs(&self) -> Vec<f64> {
        let mut b = self.rhs_dual.clone();
        b.extend_from_slice(&self.rhs_primal);
        b
    }

    /// Full primal vector from values at the free dofs.
    pub fn expand(&self, free_values: &[f64]) -> Vec<f64> {
        self.dofmap.expand(free_values, &self.boundary_values)
    }
}

/// Assemble the system for a manufactured solution, with Cauchy data taken
/// from the exact solution and optionally perturbed.
pub fn build_saddle_system(
    mesh: &Mesh,
    tags: &BoundaryTags,
    problem: &ManufacturedSolution,
    noise: &NoiseSpec,
) -> Result<SaddleSystem> {
    let dofmap = DofMap::new(mesh, tags);
    let values = apply_boundary_conditions(
        mesh,
        tags,
        &dofmap,
        &|p| problem.value(p),
        &|p, n| problem.flux(p, n),
        noise,
    )?;
    let f = |p: Point| problem.source(p);
    SaddleSystem::assemble(mesh, tags, &f, values)
}
