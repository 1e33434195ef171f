use distbound::poly::{parse_polynomial, var_names};
use distbound::program::{build_distance_program, ObjectiveSpec, ProblemSpec};
use distbound::sdp::standard::to_standard_form;
use distbound::sdp::{ConicSolver, InteriorPointSolver, SolveOptions};
use distbound::sets::SemialgebraicSet;

fn main() {
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
    let problem = ProblemSpec {
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
    };
    let d: u32 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    let mp = build_distance_program(&problem, d).unwrap();
    eprintln!("measures: {:?}", mp.measures.iter().map(|m| (m.name.clone(), m.moment_count())).collect::<Vec<_>>());
    eprintln!("rows: {}, blocks: {}", mp.rows.len(), mp.blocks.len());
    let sf = to_standard_form(&mp);
    eprintln!("vars: {}, eq: {}, psd sizes: {:?}", sf.conic.num_vars, sf.conic.eq.len(), sf.conic.psd.iter().map(|b| b.size).collect::<Vec<_>>());
    let mut opts = SolveOptions::default();
    opts.verbose = true;
    let sol = InteriorPointSolver.solve(&sf.conic, &opts).unwrap();
    eprintln!("status {:?} primal {:.8} dual {:.8} sqrt {:.6}", sol.status, sol.primal_objective, sol.dual_objective, mp.objective.transform.apply(sol.primal_objective));
}
