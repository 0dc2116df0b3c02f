use pdwg::assembly::{apply_boundary_conditions, assemble_constraint, assemble_stabilizer, build_saddle_system, DofMap};
use pdwg::linsolve::max_norm;
use pdwg::mesh::{BoundarySegmentSpec, BoundaryTags, Mesh, Side};
use pdwg::norms::project_exact;
use pdwg::problems::{CaseConfig, NoiseSpec, QUAD, SINSIN};

fn mesh_and_tags(n: usize, case: &str) -> (Mesh, BoundaryTags) {
    let mesh = Mesh::uniform_unit_square(n).unwrap();
    let tags = mesh.classify_boundary(&CaseConfig::by_name(case).unwrap().segments).unwrap();
    (mesh, tags)
}

/// Nodal values and projected fluxes of the exact quadratic.
fn quad_interpolant(mesh: &Mesh, dofmap: &DofMap) -> Vec<f64> {
    let mut x = vec![0.0; dofmap.num_primal()];
    for node in 0..mesh.num_p2_nodes() {
        x[dofmap.u_dof(node)] = QUAD.value(mesh.p2_node_point(node));
    }
    let q = project_exact(&QUAD, mesh).unwrap();
    for (e, c) in q.qn.iter().enumerate() {
        x[dofmap.flux_dof(e, 0)] = c[0];
        x[dofmap.flux_dof(e, 1)] = c[1];
    }
    x
}

#[test]
fn unit_flux_on_the_diagonal() {
    let mesh = Mesh::uniform_unit_square(1).unwrap();
    let dofmap = DofMap::new(&mesh, &BoundaryTags::untagged(mesh.num_edges()));
    let s = assemble_stabilizer(&mesh, &dofmap);
    let diag = (0..mesh.num_edges()).find(|&e| !mesh.is_boundary_edge(e)).unwrap();
    let mut v = vec![0.0; dofmap.num_primal()];
    v[dofmap.flux_dof(diag, 0)] = 1.0;
    // two triangles, each h_T^{-1} |e| = (1/√2) √2
    assert!((s.quadratic_form(&v) - 2.0).abs() < 1e-13);
    assert_eq!(s.quadratic_form(&vec![0.0; dofmap.num_primal()]), 0.0);
}

#[test]
fn stabilizer_vanishes_on_global_quadratic() {
    for n in [1, 3, 6] {
        let mesh = Mesh::uniform_unit_square(n).unwrap();
        let dofmap = DofMap::new(&mesh, &BoundaryTags::untagged(mesh.num_edges()));
        let s = assemble_stabilizer(&mesh, &dofmap);
        let x = quad_interpolant(&mesh, &dofmap);
        assert!(max_norm(&s.mul_vec(&x)) < 1e-10, "n={n}");
    }
}

#[test]
fn constraint_reproduces_source_integral() {
    let (mesh, tags) = mesh_and_tags(4, "case1");
    let dofmap = DofMap::new(&mesh, &tags);
    let (b, load) = assemble_constraint(&mesh, &dofmap, &|p| QUAD.source(p)).unwrap();
    let bx = b.mul_vec(&quad_interpolant(&mesh, &dofmap));
    for t in 0..mesh.num_triangles() {
        assert!((bx[t] - 4.0 * mesh.area(t)).abs() < 1e-13);
        assert!((load[t] - 4.0 * mesh.area(t)).abs() < 1e-14);
    }
    let (_, zero) = assemble_constraint(&mesh, &dofmap, &|_| 0.0).unwrap();
    assert!(zero.iter().all(|&v| v == 0.0));
}

#[test]
fn outward_unit_flux_sums_to_perimeter() {
    let mesh = Mesh::uniform_unit_square(1).unwrap();
    let dofmap = DofMap::new(&mesh, &BoundaryTags::untagged(mesh.num_edges()));
    let (b, _) = assemble_constraint(&mesh, &dofmap, &|_| 0.0).unwrap();
    for t in 0..2 {
        let mut v = vec![0.0; dofmap.num_primal()];
        for (&e, s) in mesh.triangle_edges(t).iter().zip(mesh.triangle_signs(t)) {
            v[dofmap.flux_dof(e, 0)] = s;
        }
        let perimeter: f64 = mesh.triangle_edges(t).iter().map(|&e| mesh.edge_length(e)).sum();
        assert!((b.mul_vec(&v)[t] - perimeter).abs() < 1e-14);
        assert!((perimeter - (2.0 + 2f64.sqrt())).abs() < 1e-14);
    }
}

/// Shifted-Legendre coefficients of `g` on `[0, 1]` by composite Simpson.
fn legendre_p1_oracle(g: impl Fn(f64) -> f64) -> [f64; 2] {
    let m = 2000;
    let h = 1.0 / m as f64;
    let (mut c0, mut c1) = (0.0, 0.0);
    for i in 0..=m {
        let t = i as f64 * h;
        let w = if i == 0 || i == m { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        c0 += w * g(t);
        c1 += w * g(t) * (2.0 * t - 1.0);
    }
    [c0 * h / 3.0, 3.0 * c1 * h / 3.0]
}

#[test]
fn neumann_data_on_top_edge() {
    let mesh = Mesh::uniform_unit_square(4).unwrap();
    let tags = mesh.classify_boundary(&[BoundarySegmentSpec::whole(Side::Top, false, true)]).unwrap();
    let dofmap = DofMap::new(&mesh, &tags);
    let values = apply_boundary_conditions(
        &mesh,
        &tags,
        &dofmap,
        &|p| SINSIN.value(p),
        &|p, n| SINSIN.flux(p, n),
        &NoiseSpec::none(),
    )
    .unwrap();
    let mut seen = 0;
    for e in tags.neumann_edges() {
        let (a, b) = mesh.edge_endpoints(e);
        let n_e = mesh.edge_normal(e);
        // outward normal on y = 1 is +y; stored flux is relative to n_e
        assert!(n_e[0].abs() < 1e-15 && n_e[1].abs() == 1.0);
        let c = legendre_p1_oracle(|t| n_e[1] * (a[0] + t * (b[0] - a[0])).sin() * 1f64.cos());
        assert!((values[dofmap.flux_dof(e, 0)] - c[0]).abs() < 1e-12);
        assert!((values[dofmap.flux_dof(e, 1)] - c[1]).abs() < 1e-12);
        seen += 1;
    }
    assert_eq!(seen, 4);
}

#[test]
fn homogeneous_data_gives_zero_lifting() {
    let (mesh, tags) = mesh_and_tags(3, "case1");
    let dofmap = DofMap::new(&mesh, &tags);
    let values = apply_boundary_conditions(&mesh, &tags, &dofmap, &|_| 0.0, &|_, _| 0.0, &NoiseSpec::none()).unwrap();
    assert!(values.iter().all(|&v| v == 0.0));
}

#[test]
fn dof_counts() {
    for n in [1, 2, 5] {
        let (mesh, tags) = mesh_and_tags(n, "case1");
        let dofmap = DofMap::new(&mesh, &tags);
        let (v, e, t) = (mesh.num_vertices(), mesh.num_edges(), mesh.num_triangles());
        assert_eq!(dofmap.num_u(), v + e);
        assert_eq!(dofmap.num_flux(), 2 * e);
        assert_eq!(dofmap.num_lambda(), t);
        assert_eq!(dofmap.free_dofs().len() + dofmap.constrained_dofs().count(), dofmap.num_primal());
    }
    // every boundary edge Cauchy at n=1: the square's 8 P2 boundary nodes and
    // 4 edge fluxes are fixed, leaving the centre node and the diagonal flux
    let mesh = Mesh::uniform_unit_square(1).unwrap();
    let all = [Side::Bottom, Side::Right, Side::Top, Side::Left].map(|s| BoundarySegmentSpec::whole(s, true, true));
    let tags = mesh.classify_boundary(&all).unwrap();
    let system = build_saddle_system(&mesh, &tags, &QUAD, &NoiseSpec::none()).unwrap();
    assert_eq!(system.num_free(), 3);
    assert_eq!(system.dim(), system.num_free() + 2);
}

#[test]
fn exact_quadratic_satisfies_the_system() {
    for case in ["case1", "case2", "case5"] {
        let (mesh, tags) = mesh_and_tags(4, case);
        let system = build_saddle_system(&mesh, &tags, &QUAD, &NoiseSpec::none()).unwrap();
        let mut x = system.dofmap.restrict(&quad_interpolant(&mesh, &system.dofmap));
        x.resize(system.dim(), 0.0);
        let r = pdwg::linsolve::residual(system.matrix(), &x, &system.rhs());
        assert!(max_norm(&r) < 1e-10, "{case}: {}", max_norm(&r));
    }
}

#[test]
fn block_matrix_is_symmetric_and_s_is_semidefinite() {
    let (mesh, tags) = mesh_and_tags(4, "case2");
    let system = build_saddle_system(&mesh, &tags, &SINSIN, &NoiseSpec::none()).unwrap();
    assert!(system.matrix().symmetry_defect() <= 1e-14);
    let eig = nalgebra::SymmetricEigen::new(system.free_stabilizer().to_dense()).eigenvalues;
    let scale = eig.amax();
    assert!(eig.iter().all(|&l| l >= -1e-12 * scale));
}
