//! Polyhedral-norm objectives via slack-variable lifts: L1, Linf, and the
//! odd-power L3 distance become linear objectives over free scalars bounded
//! by joint-measure moment functionals.

use super::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiftKind {
    L1,
    Linf,
    L3,
}

impl LiftKind {
    fn power(&self) -> u32 {
        match self {
            LiftKind::L1 | LiftKind::Linf => 1,
            LiftKind::L3 => 3,
        }
    }
}

/// Adds slack scalars q with `-q_i <= <(x_i - y_i)^p, eta> <= q_i` and the
/// objective `sum q_i` (single q for Linf). The base program must have been
/// built with a deferred objective.
pub fn apply_polyhedral_lift(
    mut program: MomentProgram,
    kind: LiftKind,
) -> Result<MomentProgram, BuildError> {
    if !program.objective.terms.is_empty() || !program.objective.free_terms.is_empty() {
        return Err(BuildError::WrongObjectiveKind("deferred"));
    }
    let n = program.roles.x_coords.len();
    if n == 0 || program.roles.y_coords.len() != n {
        return Err(BuildError::Invalid(
            "polyhedral lift needs a joint measure with paired coordinates".into(),
        ));
    }
    let p = kind.power();
    let shared_q = kind == LiftKind::Linf;
    let q_count = if shared_q { 1 } else { n };
    let q_base = program.free_vars.len();
    for i in 0..q_count {
        program.free_vars.push(format!("q{}", i + 1));
    }

    for i in 0..n {
        let xr = program.roles.x_coords[i];
        let yr = program.roles.y_coords[i];
        if xr.measure != yr.measure {
            return Err(BuildError::Invalid(
                "lift coordinates split across measures".into(),
            ));
        }
        let m = program.measure(xr.measure);
        let block = m.full_vars.clone();
        // original x_i - y_i expressed over the scaled block
        let (ox, hx) = program.scaling.map_of(&block[xr.pos]);
        let (oy, hy) = program.scaling.map_of(&block[yr.pos]);
        let mut diff = Polynomial::constant(&block, ox - oy);
        diff = diff.add(&Polynomial::monomial(
            &block,
            MultiIndex::unit(block.len(), xr.pos),
            hx,
        ));
        diff = diff.sub(&Polynomial::monomial(
            &block,
            MultiIndex::unit(block.len(), yr.pos),
            hy,
        ));
        let powed = diff.pow(p);
        let qi = q_base + if shared_q { 0 } else { i };
        // q_i - <expr> >= 0
        let mut upper = AffineRow {
            terms: powed
                .terms()
                .map(|(idx, c)| (xr.measure, idx.clone(), -c))
                .collect(),
            free_terms: vec![(qi, 1.0)],
            rhs: 0.0,
            role: RowRole::Support,
        };
        // q_i + <expr> >= 0
        let mut lower = AffineRow {
            terms: powed
                .terms()
                .map(|(idx, c)| (xr.measure, idx.clone(), c))
                .collect(),
            free_terms: vec![(qi, 1.0)],
            rhs: 0.0,
            role: RowRole::Support,
        };
        upper.rhs = 0.0;
        lower.rhs = 0.0;
        program.ineq_rows.push(upper);
        program.ineq_rows.push(lower);
    }

    program.objective = ProgramObjective {
        terms: Vec::new(),
        free_terms: (0..q_count).map(|i| (q_base + i, 1.0)).collect(),
        maximize: false,
        transform: match kind {
            LiftKind::L3 => ReportTransform::Root(3),
            _ => ReportTransform::Identity,
        },
    };
    Ok(program)
}
