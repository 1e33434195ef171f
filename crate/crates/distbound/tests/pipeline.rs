//! End-to-end checks of the build -> standard form -> solve pipeline on the
//! Flow system.

use distbound::poly::{parse_polynomial, var_names};
use distbound::program::{build_distance_program, ObjectiveSpec, ProblemSpec};
use distbound::sdp::standard::to_standard_form;
use distbound::sdp::{ConicSolver, InteriorPointSolver, SolveOptions, Status};
use distbound::sets::SemialgebraicSet;

fn flow_halfcircle() -> ProblemSpec {
    let xv = var_names(&["x1", "x2"]);
    let tx = var_names(&["t", "x1", "x2"]);
    let x0 = SemialgebraicSet::new(
        xv.clone(),
        vec![parse_polynomial("0.4^2 - (x1-1.5)^2 - x2^2", &xv).unwrap()],
        vec![],
    )
    .unwrap();
    let x = SemialgebraicSet::free(xv.clone()).with_box(&[(-3.0, 3.0), (-3.0, 3.0)]);
    let mut xu = SemialgebraicSet::new(
        xv.clone(),
        vec![
            parse_polynomial("0.5^2 - x1^2 - (x2+0.7)^2", &xv).unwrap(),
            parse_polynomial("-0.7071067811865476*(x1 + x2 + 0.7)", &xv).unwrap(),
        ],
        vec![],
    )
    .unwrap();
    xu.set_bounds(vec![(-0.5, 0.5), (-1.2, -0.2)]);
    let xy = var_names(&["x1", "x2", "y1", "y2"]);
    ProblemSpec {
        name: "flow_halfcircle".into(),
        state_vars: xv,
        dynamics: vec![
            parse_polynomial("x2", &tx).unwrap(),
            parse_polynomial("-x1 - x2 + x1^3/3", &tx).unwrap(),
        ],
        horizon: 5.0,
        x0,
        x,
        xu,
        objective: ObjectiveSpec::l2_squared(&xy),
        uncertainty: None,
        shape: None,
    }
}

#[test]
fn flow_halfcircle_low_degrees() {
    let problem = flow_halfcircle();
    let mut prev = f64::NEG_INFINITY;
    for d in [2u32, 3] {
        let mp = build_distance_program(&problem, d).unwrap();
        let sf = to_standard_form(&mp);
        let sol = InteriorPointSolver
            .solve(&sf.conic, &SolveOptions::default())
            .unwrap();
        assert_eq!(sol.status, Status::Optimal, "degree {}", d);
        let bound = mp.objective.transform.apply(sol.primal_objective);
        eprintln!(
            "d={} raw={:.6} bound={:.4} gap={:.2e} iters={}",
            d,
            sol.primal_objective,
            bound,
            sol.duality_gap(),
            sol.iterations
        );
        assert!(sol.duality_gap() < 1e-6);
        assert!(bound <= 0.2835, "lower bound must not exceed the optimum");
        assert!(sol.primal_objective >= prev - 1e-6, "monotone in degree");
        prev = sol.primal_objective;
    }
}
