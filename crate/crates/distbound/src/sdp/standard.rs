//! Conversion of a `MomentProgram` to standard conic form, with a recorded
//! back-map from moment indices (deduplicated via matrix symmetry) to scalar
//! variables for solution recovery.

use super::{ConicProgram, PsdBlock, SparseRow};
use crate::moments::MeasureId;
use crate::poly::{monomial_basis, MultiIndex};
use crate::program::{MomentProgram, RowRole};
use std::collections::HashMap;

pub struct StandardForm {
    pub conic: ConicProgram,
    pub backmap: BackMap,
}

pub struct BackMap {
    seq_offset: Vec<usize>,
    seq_index: Vec<HashMap<MultiIndex, usize>>,
    pub free_offset: usize,
    /// Role of each equality row, aligned with `conic.eq`.
    pub row_roles: Vec<RowRole>,
    /// Owning measure of each PSD block, aligned with `conic.psd`.
    pub block_measures: Vec<MeasureId>,
}

impl BackMap {
    /// Scalar variable holding a reduced-block moment.
    pub fn var_of(&self, measure: MeasureId, reduced: &MultiIndex) -> usize {
        self.seq_offset[measure] + self.seq_index[measure][reduced]
    }

    pub fn free_var(&self, i: usize) -> usize {
        self.free_offset + i
    }

    /// Moment of a full-block monomial from a solved variable vector,
    /// mapping through any pinned coordinates.
    pub fn moment(
        &self,
        mp: &MomentProgram,
        x: &[f64],
        measure: MeasureId,
        full: &MultiIndex,
    ) -> f64 {
        let (reduced, factor) = mp.measure(measure).moment_ref(full);
        factor * x[self.var_of(measure, &reduced)]
    }
}

/// Bijection between distinct moments of every sequence (plus free scalars)
/// and the scalar variables of a conic program.
pub fn to_standard_form(mp: &MomentProgram) -> StandardForm {
    let mut seq_offset = Vec::with_capacity(mp.measures.len());
    let mut seq_index = Vec::with_capacity(mp.measures.len());
    let mut next = 0usize;
    for m in &mp.measures {
        seq_offset.push(next);
        let basis = monomial_basis(m.dim(), m.trunc);
        let mut map = HashMap::with_capacity(basis.len());
        for (i, idx) in basis.into_iter().enumerate() {
            map.insert(idx, i);
        }
        next += map.len();
        seq_index.push(map);
    }
    let free_offset = next;
    let num_vars = next + mp.free_vars.len();

    let backmap = BackMap {
        seq_offset,
        seq_index,
        free_offset,
        row_roles: mp.rows.iter().map(|r| r.role.clone()).collect(),
        block_measures: mp.blocks.iter().map(|b| b.measure).collect(),
    };

    let mut objective = vec![0.0; num_vars];
    let obj_sign = if mp.objective.maximize { -1.0 } else { 1.0 };
    for (mid, full, c) in &mp.objective.terms {
        let (reduced, factor) = mp.measure(*mid).moment_ref(full);
        objective[backmap.var_of(*mid, &reduced)] += obj_sign * c * factor;
    }
    for (fi, c) in &mp.objective.free_terms {
        objective[backmap.free_var(*fi)] += obj_sign * c;
    }

    let convert_row = |row: &crate::program::AffineRow| -> SparseRow {
        let mut terms: Vec<(u32, f64)> =
            Vec::with_capacity(row.terms.len() + row.free_terms.len());
        for (mid, full, c) in &row.terms {
            let (reduced, factor) = mp.measure(*mid).moment_ref(full);
            let v = c * factor;
            if v != 0.0 {
                terms.push((backmap.var_of(*mid, &reduced) as u32, v));
            }
        }
        for (fi, c) in &row.free_terms {
            terms.push((backmap.free_var(*fi) as u32, *c));
        }
        SparseRow { terms, rhs: row.rhs }
    };

    let eq: Vec<SparseRow> = mp.rows.iter().map(convert_row).collect();
    let ineq: Vec<SparseRow> = mp.ineq_rows.iter().map(convert_row).collect();

    let psd: Vec<PsdBlock> = mp
        .blocks
        .iter()
        .map(|spec| {
            let mut by_var: HashMap<u32, Vec<(u32, u32, f64)>> = HashMap::new();
            for ((r, c), terms) in &spec.entries {
                for (coeff, idx) in terms {
                    if *coeff == 0.0 {
                        continue;
                    }
                    let v = backmap.var_of(spec.measure, idx) as u32;
                    by_var
                        .entry(v)
                        .or_default()
                        .push((*r as u32, *c as u32, *coeff));
                }
            }
            let mut vars: Vec<u32> = by_var.keys().copied().collect();
            vars.sort_unstable();
            let patterns = vars.iter().map(|v| by_var.remove(v).unwrap()).collect();
            PsdBlock {
                size: spec.size,
                vars,
                patterns,
                label: spec.label.clone(),
            }
        })
        .collect();

    StandardForm {
        conic: ConicProgram {
            num_vars,
            objective,
            eq,
            ineq,
            psd,
        },
        backmap,
    }
}
