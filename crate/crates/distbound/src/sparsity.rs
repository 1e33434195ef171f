//! Correlative sparsity for separable costs: the joint measure splits into
//! clique measures over n+1 variables each, glued by overlap marginals.

use crate::moments::{measure_block, MeasureDef};
use crate::poly::{monomial_basis, MultiIndex, Polynomial};
use crate::program::build::{MU0, MUP, OCC};
use crate::program::{
    liouville_rows, normalization_row, scaled_parts, support_rows, tilde_degree, AffineRow,
    BuildError, CoordRef, MomentProgram, ObjectiveSpec, ProblemSpec, ProgramObjective,
    ProgramRoles, RowRole,
};
use crate::sets::SemialgebraicSet;
use std::collections::BTreeSet;

/// Clique decomposition of the joint (x, y) block: variable sets I and the
/// constraint assignment J.
#[derive(Debug, Clone, PartialEq)]
pub struct CliqueDecomposition {
    pub cliques: Vec<Vec<String>>,
    /// Clique carrying the state-set constraints.
    pub state_clique: usize,
    /// Clique carrying the unsafe-set constraints.
    pub unsafe_clique: usize,
}

/// Canonical chain decomposition for a separable cost over n >= 2 states:
///   I_1 = {x_1..x_n, y_1},  I_i = {x_i..x_n, y_1..y_i},  I_n = {x_n, y_1..y_n}
/// with the state constraints on I_1 and the unsafe constraints on I_n.
pub fn csp_cliques(
    state_vars: &[String],
    y_vars: &[String],
) -> Result<CliqueDecomposition, BuildError> {
    let n = state_vars.len();
    if n < 2 {
        return Err(BuildError::Invalid(
            "correlative sparsity needs at least two states; use the dense program".into(),
        ));
    }
    let mut cliques = Vec::with_capacity(n);
    for i in 0..n {
        let mut c: Vec<String> = state_vars[i..].to_vec();
        c.extend_from_slice(&y_vars[..=i]);
        cliques.push(c);
    }
    Ok(CliqueDecomposition {
        cliques,
        state_clique: 0,
        unsafe_clique: n - 1,
    })
}

/// Running Intersection Property: for each k, the intersection of I_{k+1}
/// with the union of the previous cliques is contained in a single earlier
/// clique.
pub fn verify_rip(cliques: &[Vec<String>]) -> bool {
    for k in 1..cliques.len() {
        let union: BTreeSet<&String> = cliques[..k].iter().flatten().collect();
        let inter: Vec<&String> = cliques[k].iter().filter(|v| union.contains(v)).collect();
        let contained = cliques[..k]
            .iter()
            .any(|cj| inter.iter().all(|v| cj.contains(v)));
        if !contained {
            return false;
        }
    }
    true
}

/// Coverage: every variable appears in some clique, and every required
/// cohabiting pair shares a clique.
pub fn verify_coverage(
    cliques: &[Vec<String>],
    all_vars: &[String],
    pairs: &[(String, String)],
) -> bool {
    let union: BTreeSet<&String> = cliques.iter().flatten().collect();
    if !all_vars.iter().all(|v| union.contains(v)) {
        return false;
    }
    pairs.iter().all(|(a, b)| {
        cliques
            .iter()
            .any(|c| c.contains(a) && c.contains(b))
    })
}

/// Splits a scaled polynomial cost into per-pair components c_i(x_i, y_i);
/// constants fold into the first component.
fn separate_cost(
    cost: &Polynomial,
    state_vars: &[String],
    y_vars: &[String],
) -> Result<Vec<Polynomial>, BuildError> {
    let n = state_vars.len();
    let xy = cost.vars().to_vec();
    let mut parts: Vec<Polynomial> = (0..n).map(|_| Polynomial::zero(&xy)).collect();
    for (idx, c) in cost.terms() {
        let mut owner: Option<usize> = None;
        for (pos, &e) in idx.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let var = &xy[pos];
            let i = state_vars
                .iter()
                .position(|v| v == var)
                .or_else(|| y_vars.iter().position(|v| v == var))
                .ok_or_else(|| BuildError::Invalid("cost variable outside joint block".into()))?;
            match owner {
                None => owner = Some(i),
                Some(j) if j == i => {}
                Some(_) => return Err(BuildError::NonSeparableCost),
            }
        }
        let i = owner.unwrap_or(0);
        parts[i] = parts[i].add(&Polynomial::monomial(&xy, idx.clone(), c));
    }
    Ok(parts)
}

/// Sparse degree-d distance relaxation: eta splits into clique measures
/// eta_1..eta_n with overlap-marginal rows, the x-marginal link attaching to
/// eta_1 (which carries the full state block).
pub fn build_sparse_distance_program(
    problem: &ProblemSpec,
    d: u32,
) -> Result<MomentProgram, BuildError> {
    if problem.shape.is_some() {
        return Err(BuildError::Invalid(
            "correlative sparsity is not applied in shape mode".into(),
        ));
    }
    let parts = scaled_parts(problem)?;
    let n = problem.dim();
    let d_tilde = tilde_degree(d, parts.deg_f);
    let y_vars = problem.y_vars();
    let decomp = csp_cliques(&problem.state_vars, &y_vars)?;

    let mu0 = MeasureDef::new(MU0, "mu0", parts.x0_scaled.clone(), 2 * d);
    let mup = MeasureDef::new(
        MUP,
        "mup",
        crate::program::time_product_support(&parts.x_scaled, None),
        2 * d,
    );
    let occ = MeasureDef::new(
        OCC,
        "mu",
        crate::program::time_product_support(&parts.x_scaled, parts.h_scaled.as_ref()),
        2 * d_tilde,
    );

    // clique supports: eta_1 gets the state-set constraints, eta_n the
    // unsafe-set constraints, inner cliques only per-variable box bounds
    // (all scaled variables range in [-1, 1])
    let unit_box = |vars: &[String]| -> Vec<Polynomial> {
        (0..vars.len())
            .map(|i| {
                let v = Polynomial::variable(vars, &vars[i]).unwrap();
                Polynomial::constant(vars, 1.0).sub(&v.mul(&v))
            })
            .collect()
    };
    let mut etas = Vec::with_capacity(n);
    for (ci, clique) in decomp.cliques.iter().enumerate() {
        let mut ineqs: Vec<Polynomial> = Vec::new();
        let mut eqs: Vec<Polynomial> = Vec::new();
        if ci == decomp.state_clique {
            for g in parts.x_scaled.inequalities() {
                ineqs.push(g.lift_to(clique)?);
            }
            for g in parts.x_scaled.equalities() {
                eqs.push(g.lift_to(clique)?);
            }
            // bound the lone y variable
            let y_only: Vec<String> = clique
                .iter()
                .filter(|v| y_vars.contains(v))
                .cloned()
                .collect();
            for g in unit_box(&y_only) {
                ineqs.push(g.lift_to(clique)?);
            }
        } else if ci == decomp.unsafe_clique {
            for g in parts.xu_scaled_y.inequalities() {
                ineqs.push(g.lift_to(clique)?);
            }
            for g in parts.xu_scaled_y.equalities() {
                eqs.push(g.lift_to(clique)?);
            }
            let x_only: Vec<String> = clique
                .iter()
                .filter(|v| problem.state_vars.contains(v))
                .cloned()
                .collect();
            for g in unit_box(&x_only) {
                ineqs.push(g.lift_to(clique)?);
            }
        } else {
            ineqs = unit_box(clique);
        }
        let support = SemialgebraicSet::new(clique.clone(), ineqs, eqs)?;
        etas.push(MeasureDef::new(3 + ci, &format!("eta{}", ci + 1), support, 2 * d));
    }

    let mut rows = vec![normalization_row(MU0, mu0.full_vars.len())];
    rows.extend(liouville_rows(
        &parts.f_scaled,
        &parts.tx_block,
        &parts.occ_block,
        d,
        d_tilde,
        MU0,
        MUP,
        OCC,
    )?);

    // x-marginal link through eta_1 (holds all state variables)
    let eta1 = &etas[decomp.state_clique];
    let eta1_n = eta1.full_vars.len();
    for alpha in monomial_basis(n, 2 * d) {
        let mut eta_idx = vec![0u32; eta1_n];
        for (i, &e) in alpha.0.iter().enumerate() {
            let pos = eta1
                .full_vars
                .iter()
                .position(|v| *v == problem.state_vars[i])
                .unwrap();
            eta_idx[pos] = e;
        }
        let mut mup_idx = vec![0u32];
        mup_idx.extend_from_slice(&alpha.0);
        rows.push(AffineRow {
            terms: vec![
                (eta1.id, MultiIndex(eta_idx), 1.0),
                (MUP, MultiIndex(mup_idx), -1.0),
            ],
            free_terms: Vec::new(),
            rhs: 0.0,
            role: RowRole::Marginal(alpha),
        });
    }

    // overlap marginals between consecutive cliques
    for ci in 0..n - 1 {
        let a = &etas[ci];
        let b = &etas[ci + 1];
        let shared: Vec<String> = a
            .full_vars
            .iter()
            .filter(|v| b.full_vars.contains(v))
            .cloned()
            .collect();
        for beta in monomial_basis(shared.len(), 2 * d) {
            let embed = |m: &MeasureDef| {
                let mut idx = vec![0u32; m.full_vars.len()];
                for (si, &e) in beta.0.iter().enumerate() {
                    let pos = m
                        .full_vars
                        .iter()
                        .position(|v| *v == shared[si])
                        .unwrap();
                    idx[pos] = e;
                }
                MultiIndex(idx)
            };
            rows.push(AffineRow {
                terms: vec![(a.id, embed(a), 1.0), (b.id, embed(b), -1.0)],
                free_terms: Vec::new(),
                rhs: 0.0,
                role: RowRole::Overlap,
            });
        }
    }

    let mut blocks = Vec::new();
    for (m, deg) in [(&mu0, d), (&mup, d), (&occ, d_tilde)] {
        let (bs, eq) = measure_block(m, deg)?;
        blocks.extend(bs);
        rows.extend(support_rows(m, eq));
    }
    for eta in &etas {
        let (bs, eq) = measure_block(eta, d)?;
        blocks.extend(bs);
        rows.extend(support_rows(eta, eq));
    }

    // coordinate homes: the pair (x_i, y_i) cohabits clique i
    let x_coords: Vec<CoordRef> = (0..n)
        .map(|i| {
            let m = &etas[i];
            CoordRef {
                measure: m.id,
                pos: m
                    .full_vars
                    .iter()
                    .position(|v| *v == problem.state_vars[i])
                    .unwrap(),
            }
        })
        .collect();
    let y_coords: Vec<CoordRef> = (0..n)
        .map(|i| {
            let m = &etas[i];
            CoordRef {
                measure: m.id,
                pos: m.full_vars.iter().position(|v| *v == y_vars[i]).unwrap(),
            }
        })
        .collect();

    // objective: each separable component attaches to its clique
    let objective = match &problem.objective {
        ObjectiveSpec::Polynomial { cost, transform } => {
            if cost.degree() > 2 * d {
                return Err(BuildError::ObjectiveDegree {
                    deg: cost.degree(),
                    max: 2 * d,
                });
            }
            let xy = problem.xy_vars();
            let scaled = parts.scaling.scale_poly(&cost.lift_to(&xy)?);
            let components = separate_cost(&scaled, &problem.state_vars, &y_vars)?;
            let mut terms = Vec::new();
            for (i, comp) in components.iter().enumerate() {
                let m = &etas[i];
                for (idx, c) in comp.terms() {
                    // embed the xy-block monomial into the clique block
                    let mut clique_idx = vec![0u32; m.full_vars.len()];
                    for (pos, &e) in idx.0.iter().enumerate() {
                        if e == 0 {
                            continue;
                        }
                        let var = &xy[pos];
                        let cp = m
                            .full_vars
                            .iter()
                            .position(|v| v == var)
                            .expect("separable component stays in its clique");
                        clique_idx[cp] = e;
                    }
                    terms.push((m.id, MultiIndex(clique_idx), c));
                }
            }
            ProgramObjective {
                terms,
                free_terms: Vec::new(),
                maximize: false,
                transform: *transform,
            }
        }
        _ => ProgramObjective {
            terms: Vec::new(),
            free_terms: Vec::new(),
            maximize: false,
            transform: problem.objective.transform(),
        },
    };

    let mut measures = vec![mu0, mup, occ];
    measures.extend(etas);
    let eta_ids: Vec<usize> = (0..n).map(|i| 3 + i).collect();
    let mut program = MomentProgram {
        degree: d,
        tilde_degree: d_tilde,
        measures,
        free_vars: Vec::new(),
        rows,
        ineq_rows: Vec::new(),
        blocks,
        objective,
        roles: ProgramRoles {
            mu0: MU0,
            mup: MUP,
            occ: OCC,
            eta: eta_ids,
            mus: None,
            x_coords,
            y_coords,
        },
        scaling: parts.scaling,
        sparse: true,
    };
    if let Some(kind) = problem.objective.lift_kind() {
        program = crate::program::apply_polyhedral_lift(program, kind)?;
    }
    Ok(program)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::var_names;

    fn names(prefix: &str, n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("{}{}", prefix, i)).collect()
    }

    #[test]
    fn clique_structure_matches_chain() {
        let d = csp_cliques(&names("x", 4), &names("y", 4)).unwrap();
        assert_eq!(
            d.cliques[0],
            var_names(&["x1", "x2", "x3", "x4", "y1"])
        );
        assert_eq!(d.cliques[1], var_names(&["x2", "x3", "x4", "y1", "y2"]));
        assert_eq!(d.cliques[2], var_names(&["x3", "x4", "y1", "y2", "y3"]));
        assert_eq!(d.cliques[3], var_names(&["x4", "y1", "y2", "y3", "y4"]));
        // every clique has n + 1 variables
        assert!(d.cliques.iter().all(|c| c.len() == 5));

        let d2 = csp_cliques(&names("x", 2), &names("y", 2)).unwrap();
        assert_eq!(d2.cliques[0], var_names(&["x1", "x2", "y1"]));
        assert_eq!(d2.cliques[1], var_names(&["x2", "y1", "y2"]));

        assert!(csp_cliques(&names("x", 1), &names("y", 1)).is_err());
    }

    #[test]
    fn chordal_extension_edge_count() {
        // new edges added by the chain decomposition vs the base graph:
        // (n-1) n / 2
        for n in 2..=6 {
            let d = csp_cliques(&names("x", n), &names("y", n)).unwrap();
            let mut base: BTreeSet<(String, String)> = BTreeSet::new();
            let xs = names("x", n);
            let ys = names("y", n);
            let mut edge = |a: &String, b: &String| {
                let (a, b) = if a < b { (a, b) } else { (b, a) };
                (a.clone(), b.clone())
            };
            for i in 0..n {
                for j in i + 1..n {
                    base.insert(edge(&xs[i], &xs[j]));
                    base.insert(edge(&ys[i], &ys[j]));
                }
                base.insert(edge(&xs[i], &ys[i]));
            }
            let mut extended = BTreeSet::new();
            for c in &d.cliques {
                for i in 0..c.len() {
                    for j in i + 1..c.len() {
                        extended.insert(edge(&c[i], &c[j]));
                    }
                }
            }
            let new_edges = extended.difference(&base).count();
            assert_eq!(new_edges, (n - 1) * n / 2, "n = {}", n);
        }
    }

    #[test]
    fn rip_holds_for_canonical_chain() {
        for n in 2..=8 {
            let d = csp_cliques(&names("x", n), &names("y", n)).unwrap();
            assert!(verify_rip(&d.cliques), "n = {}", n);
            let all: Vec<String> = names("x", n).into_iter().chain(names("y", n)).collect();
            let pairs: Vec<(String, String)> = (0..n)
                .map(|i| (format!("x{}", i + 1), format!("y{}", i + 1)))
                .collect();
            assert!(verify_coverage(&d.cliques, &all, &pairs));
        }
    }

    #[test]
    fn alternate_decomposition_also_valid() {
        // the alternate n = 3 decompositions both satisfy RIP
        let alt1 = vec![
            var_names(&["x1", "x2", "x3", "y1"]),
            var_names(&["x2", "x3", "y1", "y3"]),
            var_names(&["x2", "y1", "y2", "y3"]),
        ];
        assert!(verify_rip(&alt1));
        let alt2 = vec![
            var_names(&["x1", "x2", "x3", "y3"]),
            var_names(&["x1", "x2", "y2", "y3"]),
            var_names(&["x1", "y1", "y2", "y3"]),
        ];
        assert!(verify_rip(&alt2));
    }

    #[test]
    fn pairwise_coverage_failure_detected() {
        // split cliques that miss the (x1, y2) interaction
        let cliques = vec![var_names(&["x1", "y1"]), var_names(&["x2", "y2"])];
        let all = var_names(&["x1", "x2", "y1", "y2"]);
        assert!(!verify_coverage(
            &cliques,
            &all,
            &[("x1".into(), "y2".into())]
        ));
    }

    #[test]
    fn separable_cost_split() {
        let xy = var_names(&["x1", "x2", "y1", "y2"]);
        let cost = crate::poly::parse_polynomial(
            "(x1 - y1)^2 + (x2 - y2)^2 + 3",
            &xy,
        )
        .unwrap();
        let parts = separate_cost(&cost, &var_names(&["x1", "x2"]), &var_names(&["y1", "y2"]))
            .unwrap();
        assert_eq!(parts.len(), 2);
        // cross terms rejected
        let bad = crate::poly::parse_polynomial("x1*y2", &xy).unwrap();
        assert!(matches!(
            separate_cost(&bad, &var_names(&["x1", "x2"]), &var_names(&["y1", "y2"])),
            Err(BuildError::NonSeparableCost)
        ));
    }

    #[test]
    fn sparse_block_sizes() {
        // n = 4, d = 4: each clique moment matrix has size C(9, 4) = 126
        // while the dense joint matrix would be C(12, 4) = 495
        assert_eq!(crate::poly::binomial(9, 4), 126);
        assert_eq!(crate::poly::binomial(12, 4), 495);
    }
}
