use distbound::problem::ProblemFile;
use distbound::report::{solve_degree, SparseMode};
use distbound::sdp::SolveOptions;
use std::time::Instant;

fn main() {
    let path = format!("{}/problems/flow_uncertain.json", env!("CARGO_MANIFEST_DIR"));
    let p = ProblemFile::from_json(&std::fs::read_to_string(path).unwrap())
        .unwrap()
        .to_problem_spec()
        .unwrap();
    for d in [5u32] {
        let t0 = Instant::now();
        match solve_degree(&p, d, SparseMode::Off, &SolveOptions::from_env()) {
            Ok((o, _)) => eprintln!(
                "uncertain d={} bound={:.6} status={} gap={:.1e} iters={} [{:.1}s]",
                d, o.bound.unwrap(), o.status, o.gap.unwrap(), o.iterations.unwrap(),
                t0.elapsed().as_secs_f64()
            ),
            Err(e) => eprintln!("uncertain d={} error {}", d, e),
        }
    }
}
