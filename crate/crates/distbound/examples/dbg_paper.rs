use distbound::problem::ProblemFile;
use distbound::report::{safety_margin, solve_degree, SparseMode};
use distbound::sdp::SolveOptions;
use std::time::Instant;

fn load(name: &str) -> distbound::program::ProblemSpec {
    let path = format!("{}/problems/{}.json", env!("CARGO_MANIFEST_DIR"), name);
    let text = std::fs::read_to_string(path).unwrap();
    ProblemFile::from_json(&text)
        .unwrap()
        .to_problem_spec()
        .unwrap()
}

fn main() {
    let which = std::env::args().nth(1).unwrap_or_else(|| "all".into());
    let opts = SolveOptions::default();

    if which == "moon" || which == "all" {
        let p = load("flow_moon");
        for d in 1..=5 {
            let t0 = Instant::now();
            match solve_degree(&p, d, SparseMode::Off, &opts) {
                Ok((o, _)) => eprintln!(
                    "moon d={} bound={:.6} status={} gap={:.1e} iters={} [{:.1}s]",
                    d,
                    o.bound.unwrap(),
                    o.status,
                    o.gap.unwrap(),
                    o.iterations.unwrap(),
                    t0.elapsed().as_secs_f64()
                ),
                Err(e) => eprintln!("moon d={} error {}", d, e),
            }
        }
    }
    if which == "l1" || which == "all" {
        let p = load("flow_l1");
        for d in 1..=4 {
            let t0 = Instant::now();
            match solve_degree(&p, d, SparseMode::Off, &opts) {
                Ok((o, _)) => eprintln!(
                    "l1 d={} bound={:.6} status={} [{:.1}s]",
                    d,
                    o.bound.unwrap(),
                    o.status,
                    t0.elapsed().as_secs_f64()
                ),
                Err(e) => eprintln!("l1 d={} error {}", d, e),
            }
        }
    }
    if which == "uncertain" || which == "all" {
        let p = load("flow_uncertain");
        for d in 3..=4 {
            let t0 = Instant::now();
            match solve_degree(&p, d, SparseMode::Off, &opts) {
                Ok((o, _)) => eprintln!(
                    "uncertain d={} bound={:.6} status={} [{:.1}s]",
                    d,
                    o.bound.unwrap(),
                    o.status,
                    t0.elapsed().as_secs_f64()
                ),
                Err(e) => eprintln!("uncertain d={} error {}", d, e),
            }
        }
    }
    if which == "twist" || which == "all" {
        let p = load("twist");
        for (d, mode) in [(2, SparseMode::On), (3, SparseMode::On), (3, SparseMode::Off)] {
            let t0 = Instant::now();
            match solve_degree(&p, d, mode, &opts) {
                Ok((o, _)) => eprintln!(
                    "twist d={} sparse={:?} bound={:.6} status={} [{:.1}s]",
                    d,
                    mode,
                    o.bound.unwrap(),
                    o.status,
                    t0.elapsed().as_secs_f64()
                ),
                Err(e) => eprintln!("twist d={} error {}", d, e),
            }
        }
    }
    if which == "shape" || which == "all" {
        let p = load("shape_translate");
        for d in 3..=4 {
            let t0 = Instant::now();
            match solve_degree(&p, d, SparseMode::Off, &opts) {
                Ok((o, _)) => eprintln!(
                    "shape d={} bound={:.6} status={} [{:.1}s]",
                    d,
                    o.bound.unwrap(),
                    o.status,
                    t0.elapsed().as_secs_f64()
                ),
                Err(e) => eprintln!("shape d={} error {}", d, e),
            }
        }
    }
    if which == "margin" || which == "all" {
        let p = load("flow_halfcircle");
        let t0 = Instant::now();
        match safety_margin(&p, 4, &opts) {
            Ok((m, branches)) => eprintln!(
                "margin = {:.6}, branches {:?} [{:.1}s]",
                m,
                branches,
                t0.elapsed().as_secs_f64()
            ),
            Err(e) => eprintln!("margin error {}", e),
        }
    }
    if which == "peak" || which == "all" {
        let p = load("flow_halfcircle");
        let obj = distbound::poly::parse_polynomial("x2", &p.state_vars).unwrap();
        let mp =
            distbound::program::build_peak_program(&p, &obj, 4, distbound::program::PeakSense::Minimize)
                .unwrap();
        let sf = distbound::sdp::standard::to_standard_form(&mp);
        use distbound::sdp::ConicSolver;
        let sol = distbound::sdp::InteriorPointSolver.solve(&sf.conic, &opts).unwrap();
        eprintln!("peak min x2 d=4: {:.6} status {:?}", sol.primal_objective, sol.status);
    }
}
