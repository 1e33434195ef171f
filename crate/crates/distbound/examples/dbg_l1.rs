use distbound::problem::ProblemFile;
use distbound::report::{build_program, SparseMode};
use distbound::sdp::standard::to_standard_form;
use distbound::sdp::{ConicSolver, InteriorPointSolver, SolveOptions};

fn main() {
    let d: u32 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let path = format!("{}/problems/flow_l1.json", env!("CARGO_MANIFEST_DIR"));
    let p = ProblemFile::from_json(&std::fs::read_to_string(path).unwrap())
        .unwrap()
        .to_problem_spec()
        .unwrap();
    let mp = build_program(&p, d, SparseMode::Off).unwrap();
    let sf = to_standard_form(&mp);
    let mut opts = SolveOptions::from_env();
    opts.verbose = true;
    let sol = InteriorPointSolver.solve(&sf.conic, &opts).unwrap();
    eprintln!("status {:?} primal {:.6e} dual {:.6e}", sol.status, sol.primal_objective, sol.dual_objective);
}
