//! Symbolic assembly of moment and localizing matrices: PSD blocks whose
//! entries are linear functionals of a measure's moment sequence.

use crate::poly::{binomial, monomial_basis, MultiIndex, Polynomial};
use crate::sets::SemialgebraicSet;
use thiserror::Error;

pub type MeasureId = usize;

#[derive(Debug, Error)]
pub enum MomentError {
    #[error("requested matrix degree {requested} exceeds truncation {trunc} of `{measure}`")]
    TruncationExceeded {
        measure: String,
        requested: u32,
        trunc: u32,
    },
    #[error("localizing polynomial degree {deg_g} exceeds truncation 2d = {two_d}")]
    LocalizerTooLarge { deg_g: u32, two_d: u32 },
    #[error("support set variables do not match the measure block")]
    VariableMismatch,
}

/// One measure variable of the moment program: a truncated moment sequence
/// over a (possibly pinned-reduced) variable block, supported on a
/// semialgebraic set.
#[derive(Debug, Clone)]
pub struct MeasureDef {
    pub id: MeasureId,
    pub name: String,
    /// Variable block as referenced by program builders.
    pub full_vars: Vec<String>,
    /// Variables pinned to constants by point equalities of the support.
    pub pinned: Vec<(usize, f64)>,
    /// Remaining (free) variables, in original order.
    pub vars: Vec<String>,
    keep: Vec<usize>,
    /// Moment truncation degree (2d).
    pub trunc: u32,
    /// Support over the reduced variables, pins substituted.
    pub support: SemialgebraicSet,
}

impl MeasureDef {
    pub fn new(
        id: MeasureId,
        name: &str,
        support: SemialgebraicSet,
        trunc: u32,
    ) -> MeasureDef {
        let full_vars = support.vars().to_vec();
        let (pinned, reduced) = support.extract_pins();
        let keep: Vec<usize> = (0..full_vars.len())
            .filter(|i| !pinned.iter().any(|&(j, _)| j == *i))
            .collect();
        MeasureDef {
            id,
            name: name.to_string(),
            full_vars,
            pinned,
            vars: reduced.vars().to_vec(),
            keep,
            trunc,
            support: reduced,
        }
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    /// Number of distinct moments up to the truncation degree.
    pub fn moment_count(&self) -> usize {
        binomial(self.dim() + self.trunc as usize, self.trunc as usize)
    }

    /// Map a monomial over the full block to (reduced index, constant factor)
    /// by substituting the pinned values.
    pub fn moment_ref(&self, full: &MultiIndex) -> (MultiIndex, f64) {
        debug_assert_eq!(full.len(), self.full_vars.len());
        if self.pinned.is_empty() {
            return (full.clone(), 1.0);
        }
        let mut factor = 1.0;
        for &(i, val) in &self.pinned {
            if full.0[i] > 0 {
                factor *= val.powi(full.0[i] as i32);
            }
        }
        let reduced = MultiIndex(self.keep.iter().map(|&i| full.0[i]).collect());
        (reduced, factor)
    }
}

/// A symmetric PSD block whose (r, c) entry is a linear functional
/// `sum_k coeff_k * m_{idx_k}` of one measure's moments. Entries are stored
/// for `r <= c` only.
#[derive(Debug, Clone)]
pub struct PsdBlockSpec {
    pub measure: MeasureId,
    pub size: usize,
    pub entries: Vec<((usize, usize), Vec<(f64, MultiIndex)>)>,
    pub label: String,
}

impl PsdBlockSpec {
    /// Instantiate the block numerically from a moment lookup.
    pub fn instantiate<F: Fn(&MultiIndex) -> f64>(&self, moment: F) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.size, self.size);
        for ((r, c), terms) in &self.entries {
            let v: f64 = terms.iter().map(|(k, idx)| k * moment(idx)).sum();
            m[(*r, *c)] = v;
            m[(*c, *r)] = v;
        }
        m
    }
}

/// Degree-`d` moment matrix of `seq`: entry (a, b) references `m_{a+b}`.
pub fn moment_matrix_spec(seq: &MeasureDef, d: u32) -> Result<PsdBlockSpec, MomentError> {
    if 2 * d > seq.trunc {
        return Err(MomentError::TruncationExceeded {
            measure: seq.name.clone(),
            requested: 2 * d,
            trunc: seq.trunc,
        });
    }
    let basis = monomial_basis(seq.dim(), d);
    let mut entries = Vec::with_capacity(basis.len() * (basis.len() + 1) / 2);
    for (r, a) in basis.iter().enumerate() {
        for (c, b) in basis.iter().enumerate().skip(r) {
            entries.push(((r, c), vec![(1.0, a.add(b))]));
        }
    }
    Ok(PsdBlockSpec {
        measure: seq.id,
        size: basis.len(),
        entries,
        label: format!("M_{}({})", d, seq.name),
    })
}

/// Localizing matrix of `g` at relaxation degree `d`: block degree is
/// `d - ceil(deg g / 2)`, entry (a, b) references `sum_g g_gamma m_{a+b+gamma}`.
pub fn localizing_matrix_spec(
    seq: &MeasureDef,
    g: &Polynomial,
    d: u32,
) -> Result<PsdBlockSpec, MomentError> {
    let deg_g = g.degree();
    if deg_g > 2 * d {
        return Err(MomentError::LocalizerTooLarge {
            deg_g,
            two_d: 2 * d,
        });
    }
    if g.vars() != seq.vars.as_slice() {
        return Err(MomentError::VariableMismatch);
    }
    let block_deg = d - deg_g.div_ceil(2);
    if block_deg * 2 + deg_g > seq.trunc {
        return Err(MomentError::TruncationExceeded {
            measure: seq.name.clone(),
            requested: block_deg * 2 + deg_g,
            trunc: seq.trunc,
        });
    }
    let basis = monomial_basis(seq.dim(), block_deg);
    let mut entries = Vec::with_capacity(basis.len() * (basis.len() + 1) / 2);
    for (r, a) in basis.iter().enumerate() {
        for (c, b) in basis.iter().enumerate().skip(r) {
            let ab = a.add(b);
            let terms: Vec<(f64, MultiIndex)> =
                g.terms().map(|(gamma, gc)| (gc, ab.add(gamma))).collect();
            entries.push(((r, c), terms));
        }
    }
    Ok(PsdBlockSpec {
        measure: seq.id,
        size: basis.len(),
        entries,
        label: format!("M_{}({}*{})", block_deg, g, seq.name),
    })
}

/// A single-measure linear functional, used for support equality rows.
#[derive(Debug, Clone)]
pub struct LinearFunctional(pub Vec<(f64, MultiIndex)>);

/// All PSD blocks and equality rows that certify `seq` is supported on its
/// set at relaxation degree `d`: one moment matrix, one localizing matrix per
/// inequality, and per equality `g` the affine rows `<g * x^a> = 0` for every
/// monomial with `deg(g * x^a) <= 2d`.
pub fn measure_block(
    seq: &MeasureDef,
    d: u32,
) -> Result<(Vec<PsdBlockSpec>, Vec<LinearFunctional>), MomentError> {
    let mut blocks = vec![moment_matrix_spec(seq, d)?];
    for g in seq.support.inequalities() {
        blocks.push(localizing_matrix_spec(seq, g, d)?);
    }
    let mut rows = Vec::new();
    for g in seq.support.equalities() {
        let deg_g = g.degree();
        if deg_g > 2 * d {
            return Err(MomentError::LocalizerTooLarge {
                deg_g,
                two_d: 2 * d,
            });
        }
        for alpha in monomial_basis(seq.dim(), 2 * d - deg_g) {
            let terms = g
                .terms()
                .map(|(gamma, gc)| (gc, alpha.add(gamma)))
                .collect();
            rows.push(LinearFunctional(terms));
        }
    }
    Ok((blocks, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_polynomial, var_names};
    use nalgebra::SymmetricEigen;
    use std::collections::HashMap;

    fn seq2(trunc: u32) -> MeasureDef {
        let vars = var_names(&["x1", "x2"]);
        MeasureDef::new(0, "m", SemialgebraicSet::free(vars), trunc)
    }

    #[test]
    fn moment_matrix_3x3_layout() {
        let seq = seq2(2);
        let spec = moment_matrix_spec(&seq, 1).unwrap();
        assert_eq!(spec.size, 3);
        // basis {1, x1, x2}; entries reference m_{a+b}
        let get = |r, c| {
            spec.entries
                .iter()
                .find(|((rr, cc), _)| (*rr, *cc) == (r, c))
                .map(|(_, t)| t[0].1.clone())
                .unwrap()
        };
        assert_eq!(get(0, 0).0, vec![0, 0]);
        assert_eq!(get(0, 1).0, vec![1, 0]);
        assert_eq!(get(0, 2).0, vec![0, 1]);
        assert_eq!(get(1, 1).0, vec![2, 0]);
        assert_eq!(get(1, 2).0, vec![1, 1]);
        assert_eq!(get(2, 2).0, vec![0, 2]);
    }

    #[test]
    fn moment_matrix_sizes() {
        let seq = seq2(4);
        assert_eq!(moment_matrix_spec(&seq, 2).unwrap().size, 6);
        // joint measure of an n = 3 state problem lives over 6 variables
        let vars = var_names(&["x1", "x2", "x3", "y1", "y2", "y3"]);
        let seq6 = MeasureDef::new(1, "eta", SemialgebraicSet::free(vars), 10);
        assert_eq!(moment_matrix_spec(&seq6, 5).unwrap().size, 462);
        assert!(moment_matrix_spec(&seq6, 6).is_err());
    }

    #[test]
    fn localizer_unrolled_example() {
        // g = 1 - x1^2 over one variable at d = 2: 2x2 block
        // [[m0 - m2, m1 - m3], [m1 - m3, m2 - m4]]
        let vars = var_names(&["x1"]);
        let g = parse_polynomial("1 - x1^2", &vars).unwrap();
        let seq = MeasureDef::new(0, "m", SemialgebraicSet::free(vars), 4);
        let spec = localizing_matrix_spec(&seq, &g, 2).unwrap();
        assert_eq!(spec.size, 2);
        let moments: Vec<f64> = vec![1.0, 0.5, 0.4, 0.3, 0.25];
        let m = spec.instantiate(|idx| moments[idx.0[0] as usize]);
        assert!((m[(0, 0)] - (1.0 - 0.4)).abs() < 1e-15);
        assert!((m[(0, 1)] - (0.5 - 0.3)).abs() < 1e-15);
        assert!((m[(1, 1)] - (0.4 - 0.25)).abs() < 1e-15);
    }

    #[test]
    fn localizer_with_unit_g_matches_moment_matrix() {
        let seq = seq2(4);
        let one = Polynomial::constant(&var_names(&["x1", "x2"]), 1.0);
        let lhs = localizing_matrix_spec(&seq, &one, 2).unwrap();
        let rhs = moment_matrix_spec(&seq, 2).unwrap();
        assert_eq!(lhs.size, rhs.size);
        let mut vals = HashMap::new();
        let mut c = 0.1;
        for idx in crate::poly::monomial_basis(2, 4) {
            vals.insert(idx, c);
            c += 0.07;
        }
        let a = lhs.instantiate(|i| vals[i]);
        let b = rhs.instantiate(|i| vals[i]);
        assert_eq!(a, b);
    }

    #[test]
    fn localizer_degree_rule() {
        // deg g = 3 at d = 4 gives a block of degree 2
        let vars = var_names(&["x1", "x2"]);
        let g = parse_polynomial("x1^3 - x2", &vars).unwrap();
        let seq = MeasureDef::new(0, "m", SemialgebraicSet::free(vars), 8);
        let spec = localizing_matrix_spec(&seq, &g, 4).unwrap();
        assert_eq!(spec.size, 6); // C(2+2, 2)
    }

    #[test]
    fn measure_block_counts() {
        // half-circle at d = 2: moment block size 6 + two localizers size 3
        let vars = var_names(&["x1", "x2"]);
        let g1 = parse_polynomial("0.5^2 - x1^2 - (x2+0.7)^2", &vars).unwrap();
        let g2 = parse_polynomial("-0.7071067811865476*(x1 + x2 + 0.7)", &vars).unwrap();
        let xu = SemialgebraicSet::new(vars, vec![g1, g2], vec![]).unwrap();
        let seq = MeasureDef::new(0, "eta", xu, 4);
        let (blocks, rows) = measure_block(&seq, 2).unwrap();
        assert_eq!(blocks.len(), 3);
        assert_eq!(blocks[0].size, 6);
        assert_eq!(blocks[1].size, 3);
        assert_eq!(blocks[2].size, 3);
        assert!(rows.is_empty());
    }

    #[test]
    fn equality_rows_cover_degrees() {
        // circle equality at 2d = 4 gives rows for all alpha up to degree 2
        let vars = var_names(&["w3", "w4"]);
        let circ = parse_polynomial("w3^2 + w4^2 - 1", &vars).unwrap();
        let s = SemialgebraicSet::new(vars, vec![], vec![circ]).unwrap();
        let seq = MeasureDef::new(0, "mu", s, 4);
        let (_, rows) = measure_block(&seq, 2).unwrap();
        assert_eq!(rows.len(), 6); // C(2+2, 2)
    }

    #[test]
    fn peak_measure_block_size() {
        // [0,T] x X block for mu_p at d = 4, n = 2: moment size C(3+4, 4) = 35
        let vars = var_names(&["t", "x1", "x2"]);
        let seq = MeasureDef::new(0, "mp", SemialgebraicSet::free(vars), 8);
        assert_eq!(moment_matrix_spec(&seq, 4).unwrap().size, 35);
    }

    /// Moments of a finite atomic measure instantiate PSD moment and
    /// localizing matrices (up to numerical roundoff).
    #[test]
    fn empirical_measure_psd() {
        let vars = var_names(&["x1", "x2"]);
        let g1 = parse_polynomial("1 - x1^2 - x2^2", &vars).unwrap();
        let g2 = parse_polynomial("x1 + 1", &vars).unwrap();
        let k = SemialgebraicSet::new(vars, vec![g1, g2], vec![]).unwrap();
        let seq = MeasureDef::new(0, "m", k.clone(), 6);

        let mut state = 42u64;
        let mut rnd = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        for _trial in 0..10 {
            // rejection-sample atoms inside K
            let mut atoms = Vec::new();
            while atoms.len() < 4 {
                let p = [rnd(), rnd()];
                if k.contains(&p, 0.0).unwrap() {
                    atoms.push((0.1 + rnd().abs(), p));
                }
            }
            let moment = |idx: &MultiIndex| -> f64 {
                atoms
                    .iter()
                    .map(|(w, p)| {
                        w * p[0].powi(idx.0[0] as i32) * p[1].powi(idx.0[1] as i32)
                    })
                    .sum()
            };
            let (blocks, _) = measure_block(&seq, 3).unwrap();
            for b in &blocks {
                let m = b.instantiate(moment);
                let eig = SymmetricEigen::new(m);
                let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
                assert!(min > -1e-9, "block {} has min eigenvalue {}", b.label, min);
            }
        }
    }

    #[test]
    fn pinned_measure_references() {
        let vars = var_names(&["w1", "w3", "w4"]);
        let eqs = vec![
            parse_polynomial("w3 - 0.6", &vars).unwrap(),
            parse_polynomial("w4 + 0.8", &vars).unwrap(),
        ];
        let s = SemialgebraicSet::new(vars, vec![], eqs).unwrap();
        let seq = MeasureDef::new(0, "mu0", s, 4);
        assert_eq!(seq.vars, vec!["w1".to_string()]);
        let (idx, f) = seq.moment_ref(&MultiIndex(vec![2, 1, 2]));
        assert_eq!(idx.0, vec![2]);
        assert!((f - 0.6 * 0.64).abs() < 1e-15);
    }
}
