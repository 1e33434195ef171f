//! Builders for the dense distance relaxation, the uncertain variant, and
//! peak estimation programs.

use super::*;
use crate::moments::{measure_block, MeasureDef};
use crate::poly::Polynomial;

pub(crate) const MU0: MeasureId = 0;
pub(crate) const MUP: MeasureId = 1;
pub(crate) const OCC: MeasureId = 2;
pub(crate) const ETA: MeasureId = 3;

/// Common scaled pieces shared by the distance/peak builders.
pub(crate) struct ScaledParts {
    pub scaling: ScalingInfo,
    pub x0_scaled: SemialgebraicSet,
    pub x_scaled: SemialgebraicSet,
    pub xu_scaled_y: SemialgebraicSet,
    pub h_scaled: Option<SemialgebraicSet>,
    pub f_scaled: Vec<Polynomial>,
    pub deg_f: u32,
    pub tx_block: Vec<String>,
    pub occ_block: Vec<String>,
}

pub(crate) fn scaled_parts(problem: &ProblemSpec) -> Result<ScaledParts, BuildError> {
    problem.validate()?;
    let mut scaling = ScalingInfo {
        horizon: problem.horizon,
        maps: Default::default(),
    };
    let x_bounds = problem.x.bounds().unwrap().to_vec();
    scaling.add_from_bounds(&problem.state_vars, &x_bounds);
    let y_vars = problem.y_vars();
    let y_bounds = problem.xu.bounds().map(|b| b.to_vec()).unwrap_or(x_bounds);
    scaling.add_from_bounds(&y_vars, &y_bounds);
    if let Some(h) = &problem.uncertainty {
        scaling.add_from_bounds(&h.vars().to_vec(), h.bounds().unwrap());
    }

    let x0_scaled = scaling.scale_set(&problem.x0);
    let x_scaled = scaling.scale_set(&problem.x);
    let xu_scaled_y = scaling.scale_set(&problem.xu.rename_vars(&y_vars));
    let h_scaled = problem.uncertainty.as_ref().map(|h| scaling.scale_set(h));

    let tx_block: Vec<String> = std::iter::once("t".to_string())
        .chain(problem.state_vars.iter().cloned())
        .collect();
    let occ_block: Vec<String> = match &problem.uncertainty {
        Some(h) => tx_block.iter().cloned().chain(h.vars().iter().cloned()).collect(),
        None => tx_block.clone(),
    };
    let deg_f = problem.dynamics.iter().map(|f| f.degree()).max().unwrap_or(1);
    let f_lifted: Vec<Polynomial> = problem
        .dynamics
        .iter()
        .map(|f| f.lift_to(&occ_block))
        .collect::<Result<_, _>>()?;
    let f_scaled = scale_dynamics(&f_lifted, &problem.state_vars, &scaling);

    Ok(ScaledParts {
        scaling,
        x0_scaled,
        x_scaled,
        xu_scaled_y,
        h_scaled,
        f_scaled,
        deg_f,
        tx_block,
        occ_block,
    })
}

/// Degree-d relaxation of the distance program with measures
/// (mu_0, mu_p, mu, eta). With `objective_cost = None` the objective is left
/// deferred for a polyhedral lift.
pub(crate) fn build_distance_core(
    problem: &ProblemSpec,
    d: u32,
    objective_cost: Option<&Polynomial>,
    transform: ReportTransform,
) -> Result<MomentProgram, BuildError> {
    let parts = scaled_parts(problem)?;
    let n = problem.dim();
    let d_tilde = tilde_degree(d, parts.deg_f);

    let mu0 = MeasureDef::new(MU0, "mu0", parts.x0_scaled.clone(), 2 * d);
    let mup = MeasureDef::new(
        MUP,
        "mup",
        time_product_support(&parts.x_scaled, None),
        2 * d,
    );
    let occ = MeasureDef::new(
        OCC,
        "mu",
        time_product_support(&parts.x_scaled, parts.h_scaled.as_ref()),
        2 * d_tilde,
    );
    let eta_support = {
        let xu = &parts.xu_scaled_y;
        parts.x_scaled.product(xu)?
    };
    let eta = MeasureDef::new(ETA, "eta", eta_support, 2 * d);

    let mut rows = vec![normalization_row(MU0, mu0.full_vars.len())];
    rows.extend(marginal_rows(n, d, ETA, MUP));
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

    let mut blocks = Vec::new();
    for (m, deg) in [(&mu0, d), (&mup, d), (&occ, d_tilde), (&eta, d)] {
        let (bs, eq) = measure_block(m, deg)?;
        blocks.extend(bs);
        rows.extend(support_rows(m, eq));
    }

    let objective = match objective_cost {
        Some(cost) => {
            if cost.degree() > 2 * d {
                return Err(BuildError::ObjectiveDegree {
                    deg: cost.degree(),
                    max: 2 * d,
                });
            }
            let xy = problem.xy_vars();
            let scaled = parts.scaling.scale_poly(&cost.lift_to(&xy)?);
            ProgramObjective {
                terms: scaled
                    .terms()
                    .map(|(idx, c)| (ETA, idx.clone(), c))
                    .collect(),
                free_terms: Vec::new(),
                maximize: false,
                transform,
            }
        }
        None => ProgramObjective {
            terms: Vec::new(),
            free_terms: Vec::new(),
            maximize: false,
            transform,
        },
    };

    let x_coords = (0..n).map(|i| CoordRef { measure: ETA, pos: i }).collect();
    let y_coords = (0..n)
        .map(|i| CoordRef {
            measure: ETA,
            pos: n + i,
        })
        .collect();
    Ok(MomentProgram {
        degree: d,
        tilde_degree: d_tilde,
        measures: vec![mu0, mup, occ, eta],
        free_vars: Vec::new(),
        rows,
        ineq_rows: Vec::new(),
        blocks,
        objective,
        roles: ProgramRoles {
            mu0: MU0,
            mup: MUP,
            occ: OCC,
            eta: vec![ETA],
            mus: None,
            x_coords,
            y_coords,
        },
        scaling: parts.scaling,
        sparse: false,
    })
}

/// Degree-d distance relaxation for a polynomial objective. Lifted objective
/// kinds go through `apply_polyhedral_lift` on a deferred-objective build.
pub fn build_distance_program(problem: &ProblemSpec, d: u32) -> Result<MomentProgram, BuildError> {
    match &problem.objective {
        ObjectiveSpec::Polynomial { cost, transform } => {
            build_distance_core(problem, d, Some(cost), *transform)
        }
        other => {
            let kind = other.lift_kind().unwrap();
            let base = build_distance_core(problem, d, None, other.transform())?;
            super::lift::apply_polyhedral_lift(base, kind)
        }
    }
}

/// Uncertain variant: requires a declared uncertainty set; the occupation
/// measure lives over (t, x, h) while Liouville test monomials stay in
/// (t, x).
pub fn build_uncertain_program(problem: &ProblemSpec, d: u32) -> Result<MomentProgram, BuildError> {
    if problem.uncertainty.is_none() {
        return Err(BuildError::Invalid(
            "problem declares no uncertainty set".into(),
        ));
    }
    build_distance_program(problem, d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeakSense {
    Minimize,
    Maximize,
}

/// Peak estimation: optimize `<p(x), mu_p>` subject to Liouville consistency.
/// Maximization yields upper bounds on the trajectory supremum; minimization
/// yields lower bounds on the infimum.
pub fn build_peak_program(
    problem: &ProblemSpec,
    p: &Polynomial,
    d: u32,
    sense: PeakSense,
) -> Result<MomentProgram, BuildError> {
    let parts = scaled_parts(problem)?;
    let d_tilde = tilde_degree(d, parts.deg_f);
    if p.degree() > 2 * d {
        return Err(BuildError::ObjectiveDegree {
            deg: p.degree(),
            max: 2 * d,
        });
    }

    let mu0 = MeasureDef::new(MU0, "mu0", parts.x0_scaled.clone(), 2 * d);
    let mup = MeasureDef::new(
        MUP,
        "mup",
        time_product_support(&parts.x_scaled, None),
        2 * d,
    );
    let occ = MeasureDef::new(
        OCC,
        "mu",
        time_product_support(&parts.x_scaled, parts.h_scaled.as_ref()),
        2 * d_tilde,
    );

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
    let mut blocks = Vec::new();
    for (m, deg) in [(&mu0, d), (&mup, d), (&occ, d_tilde)] {
        let (bs, eq) = measure_block(m, deg)?;
        blocks.extend(bs);
        rows.extend(support_rows(m, eq));
    }

    // objective over mu_p: lift p(x) to (t, x) and scale
    let p_scaled = parts
        .scaling
        .scale_poly(&p.lift_to(&problem.state_vars)?)
        .lift_to(&parts.tx_block)?;
    let objective = ProgramObjective {
        terms: p_scaled
            .terms()
            .map(|(idx, c)| (MUP, idx.clone(), c))
            .collect(),
        free_terms: Vec::new(),
        maximize: sense == PeakSense::Maximize,
        transform: ReportTransform::Identity,
    };

    let n = problem.dim();
    Ok(MomentProgram {
        degree: d,
        tilde_degree: d_tilde,
        measures: vec![mu0, mup, occ],
        free_vars: Vec::new(),
        rows,
        ineq_rows: Vec::new(),
        blocks,
        objective,
        roles: ProgramRoles {
            mu0: MU0,
            mup: MUP,
            occ: OCC,
            eta: Vec::new(),
            mus: None,
            x_coords: (0..n).map(|i| CoordRef { measure: MUP, pos: 1 + i }).collect(),
            y_coords: Vec::new(),
        },
        scaling: parts.scaling,
        sparse: false,
    })
}
