//! Shape distance programs: a body set transported by a polynomial
//! transform along orientation trajectories, linked to the joint measure by
//! orientation-marginal and pushforward-moment rows.

use super::build::{ETA, MU0, MUP, OCC};
use super::*;
use crate::moments::{measure_block, MeasureDef};
use crate::poly::{binomial, monomial_basis, Polynomial};

pub(crate) const MUS: MeasureId = 4;

/// Degree-d relaxation of the shape distance program. The shape measure is
/// truncated to order `2*kappa*d` where `kappa = deg A`.
pub fn build_shape_program(problem: &ProblemSpec, d: u32) -> Result<MomentProgram, BuildError> {
    problem.validate()?;
    let shape = problem
        .shape
        .as_ref()
        .ok_or_else(|| BuildError::Invalid("problem declares no shape".into()))?;
    let n = problem.dim();
    let n_w = shape.orient_vars.len();
    let n_s = shape.body_vars.len();

    let mut scaling = ScalingInfo {
        horizon: problem.horizon,
        maps: Default::default(),
    };
    let x_bounds = problem.x.bounds().unwrap().to_vec();
    scaling.add_from_bounds(&problem.state_vars, &x_bounds);
    let y_vars = problem.y_vars();
    let y_bounds = problem.xu.bounds().map(|b| b.to_vec()).unwrap_or(x_bounds);
    scaling.add_from_bounds(&y_vars, &y_bounds);
    scaling.add_from_bounds(&shape.orient_vars, shape.orientation.bounds().unwrap());
    scaling.add_from_bounds(&shape.body_vars, shape.body.bounds().unwrap());

    let kappa = shape.transform.iter().map(|a| a.degree()).max().unwrap_or(1).max(1);
    let mus_trunc = 2 * kappa * d;
    let mus_matrix_size = binomial(n_s + n_w + (kappa * d) as usize, (kappa * d) as usize);
    let guard = size_guard_limit();
    if mus_matrix_size > guard {
        return Err(BuildError::ShapeSizeGuard {
            size: mus_matrix_size,
            limit: guard,
        });
    }

    let omega0_scaled = scaling.scale_set(&shape.orientation_init);
    let omega_scaled = scaling.scale_set(&shape.orientation);
    let body_scaled = scaling.scale_set(&shape.body);
    let x_scaled = scaling.scale_set(&problem.x);
    let xu_scaled_y = scaling.scale_set(&problem.xu.rename_vars(&y_vars));

    let deg_f = shape.dynamics.iter().map(|f| f.degree()).max().unwrap_or(1);
    let d_tilde = tilde_degree(d, deg_f);
    let tw_block: Vec<String> = std::iter::once("t".to_string())
        .chain(shape.orient_vars.iter().cloned())
        .collect();
    let f_lifted: Vec<Polynomial> = shape
        .dynamics
        .iter()
        .map(|f| f.lift_to(&tw_block))
        .collect::<Result<_, _>>()?;
    let f_scaled = scale_dynamics(&f_lifted, &shape.orient_vars, &scaling);

    let mu0 = MeasureDef::new(MU0, "mu0", omega0_scaled, 2 * d);
    let mup = MeasureDef::new(MUP, "mup", time_product_support(&omega_scaled, None), 2 * d);
    let occ = MeasureDef::new(
        OCC,
        "mu",
        time_product_support(&omega_scaled, None),
        2 * d_tilde,
    );
    let eta = MeasureDef::new(ETA, "eta", x_scaled.product(&xu_scaled_y)?, 2 * d);
    let mus_support = body_scaled.product(&omega_scaled)?;
    let mus = MeasureDef::new(MUS, "mus", mus_support, mus_trunc);

    let mut rows = vec![normalization_row(MU0, mu0.full_vars.len())];
    rows.extend(liouville_rows(
        &f_scaled, &tw_block, &tw_block, d, d_tilde, MU0, MUP, OCC,
    )?);

    // orientation marginals: <w^b, mu_p> = <w^b, mu_s> for |b| <= 2d
    for beta in monomial_basis(n_w, 2 * d) {
        let mut mup_idx = vec![0u32];
        mup_idx.extend_from_slice(&beta.0);
        let mut mus_idx = vec![0u32; n_s];
        mus_idx.extend_from_slice(&beta.0);
        rows.push(AffineRow {
            terms: vec![
                (MUP, MultiIndex(mup_idx), 1.0),
                (MUS, MultiIndex(mus_idx), -1.0),
            ],
            free_terms: Vec::new(),
            rhs: 0.0,
            role: RowRole::OmegaMarginal(beta),
        });
    }

    // pushforward: <x^a, eta> = <A(s; w)^a, mu_s> for |a| <= 2d, where A is
    // expressed over the scaled (s, w) block and scaled x coordinates
    let sw_block: Vec<String> = shape
        .body_vars
        .iter()
        .chain(shape.orient_vars.iter())
        .cloned()
        .collect();
    let mut a_scaled = Vec::with_capacity(n);
    for (i, a) in shape.transform.iter().enumerate() {
        let lifted = a.lift_to(&sw_block)?;
        let subst = scaling.scale_poly(&lifted);
        let (ox, hx) = scaling.map_of(&problem.state_vars[i]);
        // scaled x-coordinate of the transform: (A - offset)/half
        a_scaled.push(
            subst
                .sub(&Polynomial::constant(&sw_block, ox))
                .scale(1.0 / hx),
        );
    }
    for alpha in monomial_basis(n, 2 * d) {
        let mut eta_idx = alpha.0.clone();
        eta_idx.extend(std::iter::repeat(0).take(n));
        let mut image = Polynomial::constant(&sw_block, 1.0);
        for (i, &e) in alpha.0.iter().enumerate() {
            if e > 0 {
                image = image.mul(&a_scaled[i].pow(e));
            }
        }
        let mut terms = vec![(ETA, MultiIndex(eta_idx), 1.0)];
        for (idx, c) in image.terms() {
            terms.push((MUS, idx.clone(), -c));
        }
        rows.push(AffineRow {
            terms,
            free_terms: Vec::new(),
            rhs: 0.0,
            role: RowRole::Pushforward(alpha),
        });
    }

    let mut blocks = Vec::new();
    for (m, deg) in [
        (&mu0, d),
        (&mup, d),
        (&occ, d_tilde),
        (&eta, d),
        (&mus, kappa * d),
    ] {
        let (bs, eq) = measure_block(m, deg)?;
        blocks.extend(bs);
        rows.extend(support_rows(m, eq));
    }

    let objective = match &problem.objective {
        ObjectiveSpec::Polynomial { cost, transform } => {
            if cost.degree() > 2 * d {
                return Err(BuildError::ObjectiveDegree {
                    deg: cost.degree(),
                    max: 2 * d,
                });
            }
            let xy = problem.xy_vars();
            let scaled = scaling.scale_poly(&cost.lift_to(&xy)?);
            ProgramObjective {
                terms: scaled
                    .terms()
                    .map(|(idx, c)| (ETA, idx.clone(), c))
                    .collect(),
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

    let x_coords = (0..n).map(|i| CoordRef { measure: ETA, pos: i }).collect();
    let y_coords = (0..n)
        .map(|i| CoordRef {
            measure: ETA,
            pos: n + i,
        })
        .collect();
    let mut program = MomentProgram {
        degree: d,
        tilde_degree: d_tilde,
        measures: vec![mu0, mup, occ, eta, mus],
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
            mus: Some(MUS),
            x_coords,
            y_coords,
        },
        scaling,
        sparse: false,
    };
    if let Some(kind) = problem.objective.lift_kind() {
        program = super::lift::apply_polyhedral_lift(program, kind)?;
    }
    Ok(program)
}
