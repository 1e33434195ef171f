fn main() {
    use distbound::sdp::*;
    let cp = ConicProgram {
        num_vars: 1,
        objective: vec![0.0],
        eq: vec![SparseRow { terms: vec![(0, 1.0)], rhs: -1.0 }],
        ineq: vec![],
        psd: vec![PsdBlock { size: 1, vars: vec![0], patterns: vec![vec![(0, 0, 1.0)]], label: "m".into() }],
    };
    let mut opts = SolveOptions::default();
    opts.verbose = true;
    let sol = InteriorPointSolver.solve(&cp, &opts).unwrap();
    eprintln!("status {:?}", sol.status);
}
