use pdwg::assembly::build_saddle_system;
use pdwg::linsolve::{factor_and_solve, factor_and_solve_with, max_norm, residual, LuOptions, Ordering, PivotStrategy};
use pdwg::mesh::Mesh;
use pdwg::problems::{CaseConfig, NoiseSpec, SINSIN};
use pdwg::Error;

fn system(case: &str, n: usize) -> pdwg::assembly::SaddleSystem {
    let mesh = Mesh::uniform_unit_square(n).unwrap();
    let tags = mesh.classify_boundary(&CaseConfig::by_name(case).unwrap().segments).unwrap();
    build_saddle_system(&mesh, &tags, &SINSIN, &NoiseSpec::none()).unwrap()
}

fn stacked(s: &pdwg::linsolve::Solution, sys: &pdwg::assembly::SaddleSystem) -> Vec<f64> {
    let mut x = sys.dofmap.restrict(&s.primal());
    x.extend_from_slice(&s.lambda);
    x
}

#[test]
fn mixed_case_residual_is_small() {
    let sys = system("case2", 8);
    let sol = factor_and_solve(&sys).unwrap();
    let b = sys.rhs();
    let r = residual(sys.matrix(), &stacked(&sol, &sys), &b);
    assert!(max_norm(&r) <= 1e-11 * max_norm(&b));
    assert!(sol.residual_inf <= 1e-10 * max_norm(&b).max(1.0));
    assert_eq!(sol.pivot_report.off_diagonal_pivots, 0);
}

fn max_difference(sys: &pdwg::assembly::SaddleSystem, opts: &LuOptions) -> f64 {
    let reference = stacked(&factor_and_solve(sys).unwrap(), sys);
    let x = stacked(&factor_and_solve_with(sys, opts).unwrap(), sys);
    x.iter().zip(&reference).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

#[test]
fn orderings_and_pivoting_agree() {
    let variants = [
        LuOptions { strategy: PivotStrategy::Partial, ordering: Ordering::Natural, ..LuOptions::default() },
        LuOptions { strategy: PivotStrategy::Partial, ordering: Ordering::Amd, ..LuOptions::default() },
        LuOptions::default(),
    ];
    for case in ["case1", "case2"] {
        let sys = system(case, 4);
        for opts in &variants {
            let diff = max_difference(&sys, opts);
            assert!(diff <= 1e-12, "{case} {opts:?}: {diff:e}");
        }
        // the multipliers are increasingly ill-conditioned under refinement;
        // agreement degrades roughly like n^4
        let diff = max_difference(&system(case, 8), &variants[0]);
        assert!(diff <= 1e-12 * 16.0, "{case} n=8: {diff:e}");
    }
}

#[test]
fn dense_oracle_on_small_system() {
    let sys = system("case1", 2);
    let sol = factor_and_solve(&sys).unwrap();
    let dense = sys.matrix().to_dense();
    let oracle = dense.lu().solve(&nalgebra::DVector::from_vec(sys.rhs())).unwrap();
    let x = stacked(&sol, &sys);
    for (a, b) in x.iter().zip(oracle.iter()) {
        assert!((a - b).abs() < 1e-10 * (1.0 + b.abs()));
    }
}

#[test]
fn no_data_is_singular() {
    // no Dirichlet data: constants lie in the kernel of S and B
    let mesh = Mesh::uniform_unit_square(2).unwrap();
    let tags = pdwg::mesh::BoundaryTags::untagged(mesh.num_edges());
    let sys = build_saddle_system(&mesh, &tags, &SINSIN, &NoiseSpec::none()).unwrap();
    assert!(matches!(factor_and_solve(&sys), Err(Error::SingularSystem { .. })));
}
