use distbound::problem::ProblemFile;
use distbound::report::sample;
use std::time::Instant;

fn main() {
    for name in ["flow_halfcircle", "flow_moon", "flow_l1", "twist", "shape_translate", "flow_uncertain"] {
        let path = format!("{}/problems/{}.json", env!("CARGO_MANIFEST_DIR"), name);
        let p = ProblemFile::from_json(&std::fs::read_to_string(path).unwrap())
            .unwrap()
            .to_problem_spec()
            .unwrap();
        let t0 = Instant::now();
        match sample(&p, 500, 1) {
            Ok(ub) => eprintln!(
                "{}: upper bound {:.6} empirical={} witness x0 {:?} t {:.4} [{:.1}s]",
                name, ub.value, ub.empirical, ub.witness.x0, ub.witness.time,
                t0.elapsed().as_secs_f64()
            ),
            Err(e) => eprintln!("{}: error {}", name, e),
        }
    }
}
