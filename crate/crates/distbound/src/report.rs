//! Drivers tying builders, solver, recovery, and sampling together, and the
//! JSON/CSV result contracts emitted by the command-line interface.

use crate::program::{
    build_distance_program, build_peak_program, build_shape_program, BuildError, MomentProgram,
    PeakSense, ProblemSpec,
};
use crate::recovery::{extract_atoms, extract_certificate, Certificate, ExtractionReport};
use crate::sdp::standard::{to_standard_form, StandardForm};
use crate::sdp::{ConicSolution, ConicSolver, InteriorPointSolver, SolveError, SolveOptions, Status};
use crate::sim::{sample_upper_bound, SampleOptions, SimError, UpperBound};
use crate::sparsity::build_sparse_distance_program;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("solver returned status `{0}`")]
    NotOptimal(Status),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SparseMode {
    Auto,
    On,
    Off,
}

impl std::str::FromStr for SparseMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto" => Ok(SparseMode::Auto),
            "on" => Ok(SparseMode::On),
            "off" => Ok(SparseMode::Off),
            other => Err(format!("unknown sparse mode `{}`", other)),
        }
    }
}

fn cost_is_separable(problem: &ProblemSpec) -> bool {
    match &problem.objective {
        crate::program::ObjectiveSpec::Polynomial { cost, .. } => {
            // the joint block is [x1..xn, y1..yn]; a term is separable when
            // all its variables share one coordinate index
            let n = problem.dim();
            for (idx, _) in cost.terms() {
                let mut owner = None;
                for (pos, &e) in idx.0.iter().enumerate() {
                    if e == 0 {
                        continue;
                    }
                    let i = pos % n;
                    match owner {
                        None => owner = Some(i),
                        Some(j) if j == i => {}
                        Some(_) => return false,
                    }
                }
            }
            true
        }
        // lifted kinds bound per-coordinate functionals
        _ => true,
    }
}

/// Whether a solve at this degree uses the sparse split.
pub fn use_sparse(problem: &ProblemSpec, d: u32, mode: SparseMode) -> bool {
    match mode {
        SparseMode::Off => false,
        SparseMode::On => problem.dim() >= 2 && problem.shape.is_none(),
        SparseMode::Auto => {
            problem.dim() >= 3
                && d >= 4
                && problem.shape.is_none()
                && cost_is_separable(problem)
        }
    }
}

pub fn build_program(
    problem: &ProblemSpec,
    d: u32,
    mode: SparseMode,
) -> Result<MomentProgram, BuildError> {
    if problem.shape.is_some() {
        build_shape_program(problem, d)
    } else if use_sparse(problem, d, mode) {
        build_sparse_distance_program(problem, d)
    } else {
        build_distance_program(problem, d)
    }
}

/// Everything produced by one degree of the hierarchy.
pub struct SolveArtifacts {
    pub program: MomentProgram,
    pub standard: StandardForm,
    pub solution: ConicSolution,
}

#[derive(Debug, Clone, Serialize)]
pub struct DegreeOutcome {
    pub degree: u32,
    pub status: String,
    /// Raw relaxation objective (for example squared distance).
    pub raw_bound: Option<f64>,
    /// Report-transformed bound (for example the square root).
    pub bound: Option<f64>,
    pub gap: Option<f64>,
    pub iterations: Option<usize>,
    pub sparse: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extraction: Option<ExtractionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResultRecord {
    pub name: String,
    pub objective: String,
    pub degrees: Vec<DegreeOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monotonicity_violation: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper_bound: Option<UpperBound>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<crate::recovery::CertificateExport>,
}

/// Solve one degree and post-process. Returns the artifacts so callers can
/// reuse the solved program for certificates.
pub fn solve_degree(
    problem: &ProblemSpec,
    d: u32,
    mode: SparseMode,
    opts: &SolveOptions,
) -> Result<(DegreeOutcome, SolveArtifacts), RunError> {
    let program = build_program(problem, d, mode)?;
    let standard = to_standard_form(&program);
    let solution = InteriorPointSolver.solve(&standard.conic, opts)?;
    let raw_sign = if program.objective.maximize { -1.0 } else { 1.0 };
    let raw = raw_sign * solution.primal_objective;
    let outcome = if solution.status == Status::Optimal {
        let extraction = extract_atoms(
            &program,
            &standard,
            &solution,
            crate::recovery::DEFAULT_RANK_THRESHOLD,
        );
        DegreeOutcome {
            degree: d,
            status: solution.status.to_string(),
            raw_bound: Some(raw),
            bound: Some(program.objective.transform.apply(raw)),
            gap: Some(solution.duality_gap()),
            iterations: Some(solution.iterations),
            sparse: program.sparse,
            extraction: Some(extraction),
            error: None,
        }
    } else {
        DegreeOutcome {
            degree: d,
            status: solution.status.to_string(),
            raw_bound: Some(raw),
            bound: Some(program.objective.transform.apply(raw)),
            gap: Some(solution.duality_gap()),
            iterations: Some(solution.iterations),
            sparse: program.sparse,
            extraction: None,
            error: None,
        }
    };
    Ok((
        outcome,
        SolveArtifacts {
            program,
            standard,
            solution,
        },
    ))
}

fn error_outcome(d: u32, e: &RunError) -> DegreeOutcome {
    DegreeOutcome {
        degree: d,
        status: "error".into(),
        raw_bound: None,
        bound: None,
        gap: None,
        iterations: None,
        sparse: false,
        extraction: None,
        error: Some(e.to_string()),
    }
}

/// Hierarchy sweep over a degree range; degrees run as concurrent solver
/// tasks with ordered output assembly. Per-degree failures are preserved as
/// error rows.
pub fn sweep(
    problem: &ProblemSpec,
    degrees: std::ops::RangeInclusive<u32>,
    mode: SparseMode,
    opts: &SolveOptions,
) -> ResultRecord {
    let ds: Vec<u32> = degrees.collect();
    let outcomes: Vec<DegreeOutcome> = ds
        .par_iter()
        .map(|&d| match solve_degree(problem, d, mode, opts) {
            Ok((outcome, _)) => outcome,
            Err(e) => error_outcome(d, &e),
        })
        .collect();
    let mut monotonicity_violation = None;
    let mut prev: Option<(u32, f64)> = None;
    for o in &outcomes {
        if o.status == "optimal" {
            if let (Some(raw), Some((pd, praw))) = (o.raw_bound, prev) {
                if raw < praw - 1e-6 {
                    monotonicity_violation = Some(format!(
                        "bound decreased from degree {} ({:.6e}) to degree {} ({:.6e})",
                        pd, praw, o.degree, raw
                    ));
                }
            }
            if let Some(raw) = o.raw_bound {
                prev = Some((o.degree, raw));
            }
        }
    }
    ResultRecord {
        name: problem.name.clone(),
        objective: problem.objective.kind_name().into(),
        degrees: outcomes,
        monotonicity_violation,
        upper_bound: None,
        certificate: None,
    }
}

pub fn sweep_csv(record: &ResultRecord, times: &BTreeMap<u32, f64>) -> String {
    let mut s = String::from("degree,bound,raw,status,gap,time_s\n");
    for o in &record.degrees {
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            o.degree,
            o.bound.map(|v| v.to_string()).unwrap_or_default(),
            o.raw_bound.map(|v| v.to_string()).unwrap_or_default(),
            o.status,
            o.gap.map(|v| v.to_string()).unwrap_or_default(),
            times.get(&o.degree).map(|v| v.to_string()).unwrap_or_default(),
        ));
    }
    s
}

/// Safety margin at degree d: for each unsafe-set constraint p_i, an upper
/// bound on sup p_i along trajectories; the minimum over constraints upper
/// bounds the margin, and a negative value certifies safety.
pub fn safety_margin(
    problem: &ProblemSpec,
    d: u32,
    opts: &SolveOptions,
) -> Result<(f64, Vec<f64>), RunError> {
    let constraints = problem.xu.inequalities();
    if constraints.is_empty() {
        return Err(RunError::Build(BuildError::Invalid(
            "unsafe set has no inequality constraints".into(),
        )));
    }
    let mut branch_bounds = Vec::with_capacity(constraints.len());
    for p in constraints {
        let mp = build_peak_program(problem, p, d, PeakSense::Maximize)?;
        let sf = to_standard_form(&mp);
        let sol = InteriorPointSolver.solve(&sf.conic, opts)?;
        if sol.status != Status::Optimal {
            return Err(RunError::NotOptimal(sol.status));
        }
        branch_bounds.push(-sol.primal_objective);
    }
    let margin = branch_bounds.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok((margin, branch_bounds))
}

/// Solve + extract + certify + verify, producing the certificate export.
pub fn certify(
    problem: &ProblemSpec,
    d: u32,
    samples: usize,
    epsilon: f64,
    seed: u64,
    mode: SparseMode,
    opts: &SolveOptions,
) -> Result<(DegreeOutcome, Certificate, crate::recovery::VerificationReport), RunError> {
    let (outcome, art) = solve_degree(problem, d, mode, opts)?;
    if art.solution.status != Status::Optimal {
        return Err(RunError::NotOptimal(art.solution.status));
    }
    let cert = extract_certificate(&art.program, &art.standard, &art.solution)
        .map_err(|_| RunError::NotOptimal(art.solution.status))?;
    let report = crate::recovery::verify_certificate(&cert, problem, samples, epsilon, seed)
        .map_err(|e| {
            RunError::Build(BuildError::Invalid(format!("verification failed: {}", e)))
        })?;
    Ok((outcome, cert, report))
}

/// Sampling wrapper matching the CLI record shape.
pub fn sample(problem: &ProblemSpec, n: usize, seed: u64) -> Result<UpperBound, RunError> {
    Ok(sample_upper_bound(
        problem,
        n,
        seed,
        &SampleOptions::default(),
    )?)
}

/// Grid CSVs for plotting: point-set distance and pointwise constraint
/// margin over the state box, sampled trajectories, and extracted atoms.
pub struct PlotExport {
    pub distance_grid: String,
    pub trajectories: String,
    pub atoms: String,
}

pub fn export_plot(
    problem: &ProblemSpec,
    record: Option<&ResultRecord>,
    grid_per_dim: usize,
    n_trajectories: usize,
    seed: u64,
) -> Result<PlotExport, RunError> {
    if problem.dim() != 2 {
        return Err(RunError::Build(BuildError::Invalid(
            "plot export supports two-dimensional state spaces".into(),
        )));
    }
    let metric = crate::sim::Metric::from_objective(&problem.objective);
    let grid = crate::sim::UnsafeGrid::new(&problem.xu, None)?;
    let bounds = problem.x.bounds().unwrap();
    let g = grid_per_dim.max(2);
    let mut distance_grid = String::from("x1,x2,distance,margin\n");
    for i in 0..g {
        for j in 0..g {
            let x = [
                bounds[0].0 + (bounds[0].1 - bounds[0].0) * i as f64 / (g - 1) as f64,
                bounds[1].0 + (bounds[1].1 - bounds[1].0) * j as f64 / (g - 1) as f64,
            ];
            let (d, _) = grid.distance(&x, &metric);
            let margin = problem
                .xu
                .inequalities()
                .iter()
                .map(|p| p.evaluate(&x).unwrap())
                .fold(f64::INFINITY, f64::min);
            distance_grid.push_str(&format!("{},{},{},{}\n", x[0], x[1], d, margin));
        }
    }

    let mut trajectories = String::from("sample,t,x1,x2\n");
    if problem.shape.is_none() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for k in 0..n_trajectories {
            let x0 = match sample_in_x0(problem, &mut rng) {
                Some(p) => p,
                None => break,
            };
            let traj = crate::sim::integrate(
                crate::sim::field_from_polys(&problem.dynamics),
                &x0,
                problem.horizon,
                Some(&problem.x),
                &crate::sim::IntegrateOptions {
                    max_step: problem.horizon / 200.0,
                    ..Default::default()
                },
            )?;
            for (t, x) in traj.times.iter().zip(&traj.states) {
                trajectories.push_str(&format!("{},{},{},{}\n", k, t, x[0], x[1]));
            }
        }
    }

    let mut atoms = String::from("kind,x1,x2,t\n");
    if let Some(rec) = record {
        for o in &rec.degrees {
            if let Some(ext) = &o.extraction {
                if let Some(x0) = &ext.x0 {
                    atoms.push_str(&format!("x0*,{},{},\n", x0[0], x0[1]));
                }
                if let Some(xp) = &ext.xp {
                    atoms.push_str(&format!(
                        "xp*,{},{},{}\n",
                        xp[0],
                        xp[1],
                        ext.t_seconds.unwrap_or(f64::NAN)
                    ));
                }
                if let Some(y) = &ext.y {
                    atoms.push_str(&format!("y*,{},{},\n", y[0], y[1]));
                }
            }
        }
    }
    Ok(PlotExport {
        distance_grid,
        trajectories,
        atoms,
    })
}

fn sample_in_x0(problem: &ProblemSpec, rng: &mut rand_chacha::ChaCha8Rng) -> Option<Vec<f64>> {
    use rand::Rng;
    let bounds = problem.x0.bounds().or(problem.x.bounds())?;
    for _ in 0..10_000 {
        let p: Vec<f64> = bounds
            .iter()
            .map(|&(lo, hi)| rng.gen_range(lo..=hi))
            .collect();
        if problem.x0.contains(&p, 0.0).unwrap_or(false) {
            return Some(p);
        }
    }
    None
}
