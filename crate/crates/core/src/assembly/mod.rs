//! Global dof layout, the stabilizer and constraint matrices, boundary
//! lifting and the saddle-point system.

mod boundary;
mod dofmap;
mod system;

pub use boundary::{apply_boundary_conditions, neumann_coefficients};
pub use dofmap::DofMap;
pub use system::{
    assemble_constraint, assemble_stabilizer, build_saddle_system, element_stabilizer, local_dofs, SaddleSystem,
    LOAD_DEGREE, LOCAL_DOFS,
};
