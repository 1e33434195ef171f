use distbound::problem::ProblemFile;
use distbound::report::{build_program, SparseMode};
use distbound::sdp::standard::to_standard_form;
use distbound::sdp::{ConicSolver, InteriorPointSolver, SolveOptions};
fn main() {
    let path = format!("{}/problems/flow_uncertain.json", env!("CARGO_MANIFEST_DIR"));
    let p = ProblemFile::from_json(&std::fs::read_to_string(path).unwrap()).unwrap().to_problem_spec().unwrap();
    let mp = build_program(&p, 5, SparseMode::Off).unwrap();
    let sf = to_standard_form(&mp);
    let mut opts = SolveOptions::from_env();
    opts.verbose = true;
    opts.max_iter = 4;
    let _ = InteriorPointSolver.solve(&sf.conic, &opts);
}
