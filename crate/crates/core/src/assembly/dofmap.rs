use crate::mesh::{BoundaryTags, Mesh};

const NONE: usize = usize::MAX;

/// Numbering of the primal unknowns and the multiplier.
///
/// Primal dofs are the P2 nodal values `0..V+E` followed by two flux
/// coefficients per edge (mean and linear shifted-Legendre mode, with respect
/// to the global edge normal). Multipliers are one per triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    num_u: usize,
    num_edges: usize,
    num_lambda: usize,
    constrained: Vec<bool>,
    free: Vec<usize>,
    free_index: Vec<usize>,
}

impl DofMap {
    /// Nodes on the closure of a Dirichlet edge and both flux coefficients of
    /// a Neumann edge are constrained.
    pub fn new(mesh: &Mesh, tags: &BoundaryTags) -> Self {
        let num_u = mesh.num_p2_nodes();
        let num_edges = mesh.num_edges();
        let mut constrained = vec![false; num_u + 2 * num_edges];
        for e in tags.dirichlet_edges() {
            for node in mesh.edge_p2_nodes(e) {
                constrained[node] = true;
            }
        }
        for e in tags.neumann_edges() {
            constrained[num_u + 2 * e] = true;
            constrained[num_u + 2 * e + 1] = true;
        }
        let mut free = Vec::new();
        let mut free_index = vec![NONE; constrained.len()];
        for (d, &c) in constrained.iter().enumerate() {
            if !c {
                free_index[d] = free.len();
                free.push(d);
            }
        }
        Self { num_u, num_edges, num_lambda: mesh.num_triangles(), constrained, free, free_index }
    }

    pub fn num_u(&self) -> usize {
        self.num_u
    }

    pub fn num_flux(&self) -> usize {
        2 * self.num_edges
    }

    pub fn num_lambda(&self) -> usize {
        self.num_lambda
    }

    pub fn num_primal(&self) -> usize {
        self.num_u + 2 * self.num_edges
    }

    pub fn num_free(&self) -> usize {
        self.free.len()
    }

    pub fn u_dof(&self, node: usize) -> usize {
        node
    }

    /// Coefficient `j` (0 = mean, 1 = linear) of the flux on edge `e`.
    pub fn flux_dof(&self, e: usize, j: usize) -> usize {
        debug_assert!(j < 2);
        self.num_u + 2 * e + j
    }

    pub fn is_constrained(&self, dof: usize) -> bool {
        self.constrained[dof]
    }

    pub fn free_dofs(&self) -> &[usize] {
        &self.free
    }

    pub fn constrained_dofs(&self) -> impl Iterator<Item = usize> + '_ {
        self.constrained.iter().enumerate().filter(|(_, &c)| c).map(|(d, _)| d)
    }

    pub fn free_position(&self, dof: usize) -> Option<usize> {
        let i = self.free_index[dof];
        (i != NONE).then_some(i)
    }

    /// Scatter a vector over free dofs into a full primal vector on top of `base`.
    pub fn expand(&self, free_values: &[f64], base: &[f64]) -> Vec<f64> {
        assert_eq!(free_values.len(), self.num_free());
        let mut full = base.to_vec();
        for (&d, &v) in self.free.iter().zip(free_values) {
            full[d] = v;
        }
        full
    }

    pub fn restrict(&self, full: &[f64]) -> Vec<f64> {
        self.free.iter().map(|&d| full[d]).collect()
    }
}
