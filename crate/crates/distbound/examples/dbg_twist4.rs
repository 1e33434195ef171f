use distbound::problem::ProblemFile;
use distbound::report::{solve_degree, SparseMode};
use distbound::sdp::SolveOptions;
use std::time::Instant;

fn main() {
    let path = format!("{}/problems/twist.json", env!("CARGO_MANIFEST_DIR"));
    let p = ProblemFile::from_json(&std::fs::read_to_string(path).unwrap())
        .unwrap()
        .to_problem_spec()
        .unwrap();
    let t0 = Instant::now();
    match solve_degree(&p, 4, SparseMode::On, &SolveOptions::from_env()) {
        Ok((o, _)) => eprintln!(
            "twist d=4 sparse bound={:.6} status={} gap={:.1e} iters={} [{:.1}s]",
            o.bound.unwrap(), o.status, o.gap.unwrap(), o.iterations.unwrap(),
            t0.elapsed().as_secs_f64()
        ),
        Err(e) => eprintln!("twist d=4 error {}", e),
    }
}
