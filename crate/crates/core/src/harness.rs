//! Convergence studies, observed orders, noise studies and field snapshots.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::assembly::{apply_boundary_conditions, build_saddle_system, SaddleSystem};
use crate::error::{Error, Result};
use crate::linsolve::{factor_and_solve, PivotReport, Solution};
use crate::mesh::{BoundaryTags, Mesh};
use crate::norms::{error_norms, project_exact, ErrorReport};
use crate::problems::{CaseConfig, ManufacturedSolution, NoiseSpec};

pub const TABLE_HEADER: [&str; 15] = [
    "n", "h", "h2", "l1", "l2", "h1", "linf", "w11", "lambda0h", "ord_h2", "ord_l1", "ord_l2", "ord_h1", "ord_linf",
    "ord_w11",
];

pub const NORM_NAMES: [&str; 6] = ["h2", "l1", "l2", "h1", "linf", "w11"];

/// `log2(coarse / fine)`; undefined unless both errors are positive.
pub fn compute_order(coarse: f64, fine: f64) -> Option<f64> {
    (coarse > 0.0 && fine > 0.0 && coarse.is_finite() && fine.is_finite()).then(|| (coarse / fine).log2())
}

/// Shortest round-trip representation; stable across runs and platforms.
fn fmt_value(v: f64) -> String {
    format!("{v:e}")
}

fn fmt_order(v: Option<f64>) -> String {
    v.map(|o| format!("{o:.4}")).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub h: f64,
    pub report: Option<ErrorReport>,
    /// Observed orders of the six error norms against the previous row.
    pub orders: [Option<f64>; 6],
    pub residual_inf: Option<f64>,
    pub pivot_report: Option<PivotReport>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub problem: String,
    pub case: String,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn row(&self, n: usize) -> Option<&ConvergenceRow> {
        self.rows.iter().find(|r| r.n == n)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(TABLE_HEADER)?;
        for row in &self.rows {
            let mut rec = vec![row.n.to_string(), fmt_value(row.h)];
            match &row.report {
                Some(r) => {
                    rec.extend(r.error_norms().iter().map(|&v| fmt_value(v)));
                    rec.push(fmt_value(r.lambda0h));
                }
                None => rec.extend(std::iter::repeat_n(String::new(), 7)),
            }
            rec.extend(row.orders.iter().map(|&o| fmt_order(o)));
            w.write_record(&rec)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    /// Two tables in the usual layout: `h2, l1, l2` then `h1, linf, w11`,
    /// each followed by its order column.
    pub fn to_markdown(&self) -> String {
        let mut out = format!("{} / {}\n", self.problem, self.case);
        for group in [[0, 1, 2], [3, 4, 5]] {
            out.push_str("\n| 1/h |");
            for k in group {
                let _ = write!(out, " {} | order |", NORM_NAMES[k]);
            }
            out.push_str("\n|---|");
            out.push_str(&"---|---|".repeat(3));
            out.push('\n');
            for row in &self.rows {
                let _ = write!(out, "| {} |", row.n);
                for k in group {
                    match &row.report {
                        Some(r) => {
                            let _ = write!(out, " {:.4e} | {} |", r.error_norms()[k], fmt_order(row.orders[k]));
                        }
                        None => out.push_str(" failed | |"),
                    }
                }
                out.push('\n');
            }
        }
        out
    }
}

/// Solve one configuration with exact Cauchy data and measure the error.
pub fn solve_and_measure(
    problem: &ManufacturedSolution,
    mesh: &Mesh,
    tags: &BoundaryTags,
    noise: &NoiseSpec,
) -> Result<(Solution, ErrorReport)> {
    let system = build_saddle_system(mesh, tags, problem, noise)?;
    let solution = factor_and_solve(&system)?;
    let qhu = project_exact(problem, mesh)?;
    let report = error_norms(&solution, &qhu, mesh, tags)?;
    Ok((solution, report))
}

/// One solve per `n`; orders are filled where `n` doubles from the previous row.
pub fn run_convergence(problem: &ManufacturedSolution, case: &CaseConfig, n_list: &[usize]) -> Result<ConvergenceTable> {
    if n_list.is_empty() || n_list.windows(2).any(|w| w[1] <= w[0]) || n_list[0] == 0 {
        return Err(Error::InvalidArgument(format!("n list must be positive and strictly increasing: {n_list:?}")));
    }
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let mesh = Mesh::uniform_unit_square(n)?;
        let tags = mesh.classify_boundary(&case.segments)?;
        let mut row = ConvergenceRow {
            n,
            h: mesh.mesh_size(),
            report: None,
            orders: [None; 6],
            residual_inf: None,
            pivot_report: None,
            failure: None,
        };
        match solve_and_measure(problem, &mesh, &tags, &NoiseSpec::none()) {
            Ok((solution, report)) => {
                row.report = Some(report);
                row.residual_inf = Some(solution.residual_inf);
                row.pivot_report = Some(solution.pivot_report);
            }
            Err(e) => row.failure = Some(e.to_string()),
        }
        if let (Some(prev), Some(cur)) = (rows.last(), row.report.as_ref()) {
            if let Some(prev_report) = prev.report.as_ref().filter(|_| prev.n * 2 == n) {
                let (a, b) = (prev_report.error_norms(), cur.error_norms());
                for k in 0..6 {
                    row.orders[k] = compute_order(a[k], b[k]);
                }
            }
        }
        rows.push(row);
    }
    Ok(ConvergenceTable { problem: problem.name.to_string(), case: case.name.clone(), rows })
}

/// Nodal and elementwise fields of one solve.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSnapshot {
    /// `(x, y, u0, u0 − u(x, y))` per P2 node.
    pub nodes: Vec<[f64; 4]>,
    /// `(cx, cy, λ)` per triangle.
    pub elements: Vec<[f64; 3]>,
}

impl FieldSnapshot {
    pub fn new(mesh: &Mesh, solution: &Solution, problem: &ManufacturedSolution) -> Self {
        let nodes = (0..mesh.num_p2_nodes())
            .map(|k| {
                let p = mesh.p2_node_point(k);
                let u = solution.u0[k];
                [p[0], p[1], u, u - problem.value(p)]
            })
            .collect();
        let elements = (0..mesh.num_triangles())
            .map(|t| {
                let c = mesh.geometry(t).centroid();
                [c[0], c[1], solution.lambda[t]]
            })
            .collect();
        Self { nodes, elements }
    }

    pub fn nodes_csv(&self) -> Result<String> {
        rows_csv(&["x", "y", "u0", "err"], self.nodes.iter().map(|r| r.as_slice()))
    }

    pub fn elements_csv(&self) -> Result<String> {
        rows_csv(&["cx", "cy", "lambda"], self.elements.iter().map(|r| r.as_slice()))
    }

    /// Write `<stem>_nodes.csv` and `<stem>_lambda.csv` into `dir`.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<()> {
        std::fs::write(dir.join(format!("{stem}_nodes.csv")), self.nodes_csv()?)?;
        std::fs::write(dir.join(format!("{stem}_lambda.csv")), self.elements_csv()?)?;
        Ok(())
    }
}

fn rows_csv<'a>(header: &[&str], rows: impl Iterator<Item = &'a [f64]>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r.iter().map(|&v| fmt_value(v)))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseRun {
    pub amplitude: f64,
    pub report: Option<ErrorReport>,
    pub snapshot: Option<FieldSnapshot>,
    pub solution: Option<Solution>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseStudy {
    pub problem: String,
    pub case: String,
    pub n: usize,
    pub seed: u64,
    pub runs: Vec<NoiseRun>,
}

impl NoiseStudy {
    pub fn summary_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["amplitude", "h2", "l1", "l2", "h1", "linf", "w11", "lambda0h"])?;
        for run in &self.runs {
            let mut rec = vec![fmt_value(run.amplitude)];
            match &run.report {
                Some(r) => {
                    rec.extend(r.error_norms().iter().map(|&v| fmt_value(v)));
                    rec.push(fmt_value(r.lambda0h));
                }
                None => rec.extend(std::iter::repeat_n(String::new(), 7)),
            }
            w.write_record(&rec)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }
}

fn solve_with_values(
    system: &mut SaddleSystem,
    values: Vec<f64>,
    mesh: &Mesh,
    tags: &BoundaryTags,
    problem: &ManufacturedSolution,
) -> Result<(Solution, ErrorReport)> {
    system.set_boundary_values(values);
    let solution = factor_and_solve(system)?;
    let qhu = project_exact(problem, mesh)?;
    let report = error_norms(&solution, &qhu, mesh, tags)?;
    Ok((solution, report))
}

/// One solve per amplitude on the same mesh and system; only the boundary
/// data change between runs, and every run draws from the same seed.
pub fn run_noise_study(
    problem: &ManufacturedSolution,
    case: &CaseConfig,
    n: usize,
    amplitudes: &[f64],
    seed: u64,
) -> Result<NoiseStudy> {
    if !amplitudes.contains(&0.0) {
        return Err(Error::InvalidArgument("noise amplitudes must include 0 as the clean reference".into()));
    }
    let mesh = Mesh::uniform_unit_square(n)?;
    let tags = mesh.classify_boundary(&case.segments)?;
    let mut system = build_saddle_system(&mesh, &tags, problem, &NoiseSpec::none())?;
    let mut runs = Vec::with_capacity(amplitudes.len());
    for &amplitude in amplitudes {
        let spec = NoiseSpec::new(amplitude, seed)?;
        let values = apply_boundary_conditions(
            &mesh,
            &tags,
            &system.dofmap,
            &|p| problem.value(p),
            &|p, nrm| problem.flux(p, nrm),
            &spec,
        )?;
        let run = match solve_with_values(&mut system, values, &mesh, &tags, problem) {
            Ok((solution, report)) => NoiseRun {
                amplitude,
                report: Some(report),
                snapshot: Some(FieldSnapshot::new(&mesh, &solution, problem)),
                solution: Some(solution),
                failure: None,
            },
            Err(e) => NoiseRun { amplitude, report: None, snapshot: None, solution: None, failure: Some(e.to_string()) },
        };
        runs.push(run);
    }
    Ok(NoiseStudy { problem: problem.name.to_string(), case: case.name.clone(), n, seed, runs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::QUAD;

    #[test]
    fn orders() {
        let o = compute_order(0.1526, 0.09246).unwrap();
        assert!((o - 0.7229).abs() < 5e-4, "{o}");
        assert_eq!(compute_order(0.3, 0.3), Some(0.0));
        assert!((compute_order(0.3, 0.075).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(compute_order(0.0, 1.0), None);
        assert_eq!(compute_order(1.0, -1.0), None);
    }

    #[test]
    fn n_list_validated() {
        let case = CaseConfig::by_name("case1").unwrap();
        assert!(run_convergence(&QUAD, &case, &[2, 2]).is_err());
        assert!(run_convergence(&QUAD, &case, &[]).is_err());
        assert!(run_convergence(&QUAD, &case, &[0, 1]).is_err());
    }

    #[test]
    fn table_layout() {
        let case = CaseConfig::by_name("case1").unwrap();
        let table = run_convergence(&QUAD, &case, &[1, 2, 3]).unwrap();
        let csv = table.to_csv().unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], TABLE_HEADER.join(","));
        assert_eq!(lines.len(), 4);
        assert!(lines[1].ends_with(",,,,,,"));
        // 2 -> 3 is not a halving: orders left blank
        assert!(lines[3].ends_with(",,,,,,"));
        assert!(!lines[2].ends_with(",,,,,,"));
        assert!(table.to_markdown().contains("| 1/h | h2 | order |"));
    }

    #[test]
    fn failed_rows_are_recorded() {
        // the half-side segment cannot be resolved by a single element
        let case = CaseConfig::by_name("figures").unwrap();
        let err = run_convergence(&QUAD, &case, &[1, 2]);
        assert!(matches!(err, Err(Error::MisalignedSegment { .. })));
    }

    #[test]
    fn snapshot_sizes() {
        let mesh = Mesh::uniform_unit_square(2).unwrap();
        let tags = mesh.classify_boundary(&CaseConfig::by_name("case1").unwrap().segments).unwrap();
        let (solution, _) = solve_and_measure(&QUAD, &mesh, &tags, &NoiseSpec::none()).unwrap();
        let snap = FieldSnapshot::new(&mesh, &solution, &QUAD);
        assert_eq!(snap.nodes.len(), mesh.num_vertices() + mesh.num_edges());
        assert!(snap.nodes.iter().all(|r| r[3].abs() < 1e-12));
        assert_eq!(snap.nodes_csv().unwrap().lines().count(), snap.nodes.len() + 1);
        assert!(snap.elements_csv().unwrap().starts_with("cx,cy,lambda\n"));
    }
}
