//! Assembly of complete moment programs for distance, peak, safety-margin,
//! uncertain, and shape problems at a given relaxation degree.
//!
//! All programs are assembled in scaled coordinates: time is mapped to
//! [0, 1] (dynamics multiplied by the horizon) and every space variable is
//! affinely mapped to [-1, 1] using its declared box. Objective values need
//! no unscaling because cost polynomials are composed with the same maps.

pub(crate) mod build;
mod lift;
mod shape;

pub use build::{build_distance_program, build_peak_program, build_uncertain_program, PeakSense};
pub(crate) use build::scaled_parts;
pub use lift::{apply_polyhedral_lift, LiftKind};
pub use shape::build_shape_program;

use crate::moments::{MeasureDef, MeasureId, MomentError, PsdBlockSpec};
use crate::poly::{MultiIndex, PolyError, Polynomial};
use crate::sets::{SemialgebraicSet, SetError};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("set `{0}` needs box bounds for scaling; declare a box")]
    MissingBounds(String),
    #[error("objective degree {deg} exceeds relaxation budget 2d = {max}")]
    ObjectiveDegree { deg: u32, max: u32 },
    #[error("cost is not additively separable into per-coordinate terms")]
    NonSeparableCost,
    #[error("operation requires a {0} objective")]
    WrongObjectiveKind(&'static str),
    #[error("{0}")]
    Invalid(String),
    #[error(
        "shape measure moment matrix would have size {size} (limit {limit}); \
         lower the degree or raise DISTBOUND_SIZE_GUARD"
    )]
    ShapeSizeGuard { size: usize, limit: usize },
    #[error(transparent)]
    Moment(#[from] MomentError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Set(#[from] SetError),
}

/// Transform applied to the raw optimal value before reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ReportTransform {
    Identity,
    Sqrt,
    Root(u32),
}

impl ReportTransform {
    pub fn apply(&self, raw: f64) -> f64 {
        match self {
            ReportTransform::Identity => raw,
            ReportTransform::Sqrt => raw.max(0.0).sqrt(),
            ReportTransform::Root(k) => raw.max(0.0).powf(1.0 / *k as f64),
        }
    }
}

#[derive(Debug, Clone)]
pub enum ObjectiveSpec {
    /// Polynomial cost over the joint block [x.., y..].
    Polynomial {
        cost: Polynomial,
        transform: ReportTransform,
    },
    L1,
    Linf,
    L3,
}

impl ObjectiveSpec {
    /// Squared Euclidean cost; reported bounds are square roots.
    pub fn l2_squared(xy: &[String]) -> Self {
        let n = xy.len() / 2;
        let mut cost = Polynomial::zero(xy);
        for i in 0..n {
            let xi = Polynomial::variable(xy, &xy[i]).unwrap();
            let yi = Polynomial::variable(xy, &xy[n + i]).unwrap();
            cost = cost.add(&xi.sub(&yi).pow(2));
        }
        ObjectiveSpec::Polynomial {
            cost,
            transform: ReportTransform::Sqrt,
        }
    }

    /// Fourth-power cost; reported bounds are fourth roots.
    pub fn l4(xy: &[String]) -> Self {
        let n = xy.len() / 2;
        let mut cost = Polynomial::zero(xy);
        for i in 0..n {
            let xi = Polynomial::variable(xy, &xy[i]).unwrap();
            let yi = Polynomial::variable(xy, &xy[n + i]).unwrap();
            cost = cost.add(&xi.sub(&yi).pow(4));
        }
        ObjectiveSpec::Polynomial {
            cost,
            transform: ReportTransform::Root(4),
        }
    }

    pub fn is_lifted(&self) -> bool {
        !matches!(self, ObjectiveSpec::Polynomial { .. })
    }

    pub fn lift_kind(&self) -> Option<LiftKind> {
        match self {
            ObjectiveSpec::L1 => Some(LiftKind::L1),
            ObjectiveSpec::Linf => Some(LiftKind::Linf),
            ObjectiveSpec::L3 => Some(LiftKind::L3),
            ObjectiveSpec::Polynomial { .. } => None,
        }
    }

    pub fn transform(&self) -> ReportTransform {
        match self {
            ObjectiveSpec::Polynomial { transform, .. } => *transform,
            ObjectiveSpec::L3 => ReportTransform::Root(3),
            _ => ReportTransform::Identity,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ObjectiveSpec::Polynomial { .. } => "polynomial",
            ObjectiveSpec::L1 => "l1",
            ObjectiveSpec::Linf => "linf",
            ObjectiveSpec::L3 => "l3",
        }
    }
}

/// Shape transported along orientation trajectories.
#[derive(Debug, Clone)]
pub struct ShapeSpec {
    pub body_vars: Vec<String>,
    pub body: SemialgebraicSet,
    pub orient_vars: Vec<String>,
    pub orientation: SemialgebraicSet,
    pub orientation_init: SemialgebraicSet,
    /// One component per state coordinate, over [body.., orient..].
    pub transform: Vec<Polynomial>,
    /// Orientation dynamics over [t, orient..].
    pub dynamics: Vec<Polynomial>,
}

#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub name: String,
    pub state_vars: Vec<String>,
    /// Over [t, state..] (plus uncertainty variables when present). Empty in
    /// shape mode, where `shape.dynamics` drives the orientation.
    pub dynamics: Vec<Polynomial>,
    pub horizon: f64,
    pub x0: SemialgebraicSet,
    pub x: SemialgebraicSet,
    pub xu: SemialgebraicSet,
    pub objective: ObjectiveSpec,
    pub uncertainty: Option<SemialgebraicSet>,
    pub shape: Option<ShapeSpec>,
}

impl ProblemSpec {
    pub fn dim(&self) -> usize {
        self.state_vars.len()
    }

    /// Names of the unsafe-set coordinates in the joint block: y1..yn, with a
    /// suffix fallback when the state block already uses those names.
    pub fn y_vars(&self) -> Vec<String> {
        (0..self.dim())
            .map(|i| {
                let cand = format!("y{}", i + 1);
                if self.state_vars.contains(&cand) {
                    format!("{}_u", self.state_vars[i])
                } else {
                    cand
                }
            })
            .collect()
    }

    pub fn xy_vars(&self) -> Vec<String> {
        self.state_vars.iter().cloned().chain(self.y_vars()).collect()
    }

    pub fn validate(&self) -> Result<(), BuildError> {
        let n = self.dim();
        if n == 0 {
            return Err(BuildError::Invalid("empty state block".into()));
        }
        if self.state_vars.iter().any(|v| v == "t") {
            return Err(BuildError::Invalid("`t` is reserved for time".into()));
        }
        if self.horizon <= 0.0 {
            return Err(BuildError::Invalid("horizon must be positive".into()));
        }
        if self.x.bounds().is_none() {
            return Err(BuildError::MissingBounds("state".into()));
        }
        for (s, name) in [(&self.x0, "initial"), (&self.x, "state"), (&self.xu, "unsafe")] {
            if s.vars() != self.state_vars.as_slice() {
                return Err(BuildError::Invalid(format!(
                    "{} set is not declared over the state variables",
                    name
                )));
            }
        }
        if let Some(shape) = &self.shape {
            if shape.transform.len() != n {
                return Err(BuildError::Invalid(
                    "shape transform must have one component per state coordinate".into(),
                ));
            }
            if shape.orientation.bounds().is_none() {
                return Err(BuildError::MissingBounds("orientation".into()));
            }
            if shape.body.bounds().is_none() {
                return Err(BuildError::MissingBounds("body".into()));
            }
            if shape.dynamics.len() != shape.orient_vars.len() {
                return Err(BuildError::Invalid(
                    "orientation dynamics dimension mismatch".into(),
                ));
            }
        } else {
            if self.dynamics.len() != n {
                return Err(BuildError::Invalid(
                    "dynamics must have one component per state variable".into(),
                ));
            }
        }
        if let Some(h) = &self.uncertainty {
            if h.bounds().is_none() {
                return Err(BuildError::MissingBounds("uncertainty".into()));
            }
        }
        Ok(())
    }
}

/// Degree of the occupation-measure truncation induced by the dynamics:
/// `d + ceil(deg(f)/2) - 1`.
pub fn tilde_degree(d: u32, deg_f: u32) -> u32 {
    d + deg_f.max(1).div_ceil(2) - 1
}

/// Per-variable affine map `original = offset + half * scaled`.
#[derive(Debug, Clone, Default)]
pub struct ScalingInfo {
    pub horizon: f64,
    pub maps: BTreeMap<String, (f64, f64)>,
}

impl ScalingInfo {
    pub fn map_of(&self, var: &str) -> (f64, f64) {
        self.maps.get(var).copied().unwrap_or((0.0, 1.0))
    }

    pub fn add_from_bounds(&mut self, vars: &[String], bounds: &[(f64, f64)]) {
        for (v, &(lo, hi)) in vars.iter().zip(bounds) {
            let half = ((hi - lo) / 2.0).max(1e-12);
            self.maps.insert(v.clone(), ((hi + lo) / 2.0, half));
        }
    }

    /// Offsets and halfwidths aligned with a variable block.
    pub fn maps_for(&self, vars: &[String]) -> (Vec<f64>, Vec<f64>) {
        let mut off = Vec::with_capacity(vars.len());
        let mut half = Vec::with_capacity(vars.len());
        for v in vars {
            let (o, h) = self.map_of(v);
            off.push(o);
            half.push(h);
        }
        (off, half)
    }

    /// Map a scaled point of a block back to original coordinates.
    pub fn unscale_point(&self, vars: &[String], scaled: &[f64]) -> Vec<f64> {
        vars.iter()
            .zip(scaled)
            .map(|(v, &s)| {
                let (o, h) = self.map_of(v);
                o + h * s
            })
            .collect()
    }

    /// Express a polynomial given in original coordinates over scaled ones.
    pub fn scale_poly(&self, p: &Polynomial) -> Polynomial {
        let (off, half) = self.maps_for(p.vars());
        p.affine_substitute(&off, &half)
    }

    /// Rescale a set given in original coordinates, normalizing constraints
    /// to unit max coefficient.
    pub fn scale_set(&self, s: &SemialgebraicSet) -> SemialgebraicSet {
        let (off, half) = self.maps_for(s.vars());
        let scaled = s.affine_substitute(&off, &half);
        let norm = |p: &Polynomial| {
            let m = p.terms().map(|(_, c)| c.abs()).fold(0.0_f64, f64::max);
            if m > 0.0 {
                p.scale(1.0 / m)
            } else {
                p.clone()
            }
        };
        let mut out = SemialgebraicSet::new(
            s.vars().to_vec(),
            scaled.inequalities().iter().map(&norm).collect(),
            scaled.equalities().iter().map(&norm).collect(),
        )
        .expect("scaled constraints stay in-block");
        if let Some(b) = scaled.bounds() {
            out.set_bounds(b.to_vec());
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RowRole {
    Normalization,
    /// x-marginal link between the joint measure and the peak measure.
    Marginal(MultiIndex),
    /// Liouville row at test monomial x^alpha t^beta.
    Liouville(MultiIndex, u32),
    /// Orientation-marginal link (shape mode) at an omega monomial.
    OmegaMarginal(MultiIndex),
    /// Transform-pushforward link (shape mode) at an x monomial.
    Pushforward(MultiIndex),
    /// Support equality constraints.
    Support,
    /// Clique-overlap marginal equalities (sparse mode).
    Overlap,
}

#[derive(Debug, Clone)]
pub struct AffineRow {
    /// Terms reference monomials over each measure's full variable block.
    pub terms: Vec<(MeasureId, MultiIndex, f64)>,
    pub free_terms: Vec<(usize, f64)>,
    pub rhs: f64,
    pub role: RowRole,
}

#[derive(Debug, Clone)]
pub struct ProgramObjective {
    pub terms: Vec<(MeasureId, MultiIndex, f64)>,
    pub free_terms: Vec<(usize, f64)>,
    pub maximize: bool,
    pub transform: ReportTransform,
}

/// Location of a joint-measure coordinate: which measure carries it and at
/// which position of that measure's full block.
#[derive(Debug, Clone, Copy)]
pub struct CoordRef {
    pub measure: MeasureId,
    pub pos: usize,
}

#[derive(Debug, Clone)]
pub struct ProgramRoles {
    pub mu0: MeasureId,
    pub mup: MeasureId,
    pub occ: MeasureId,
    pub eta: Vec<MeasureId>,
    pub mus: Option<MeasureId>,
    pub x_coords: Vec<CoordRef>,
    pub y_coords: Vec<CoordRef>,
}

/// A fully assembled finite-dimensional relaxation: measure sequences, free
/// scalars, affine rows, PSD block specs, and a linear objective.
#[derive(Debug, Clone)]
pub struct MomentProgram {
    pub degree: u32,
    pub tilde_degree: u32,
    pub measures: Vec<MeasureDef>,
    pub free_vars: Vec<String>,
    pub rows: Vec<AffineRow>,
    /// Inequality rows (`expr >= rhs`), used by polyhedral lifts.
    pub ineq_rows: Vec<AffineRow>,
    pub blocks: Vec<PsdBlockSpec>,
    pub objective: ProgramObjective,
    pub roles: ProgramRoles,
    pub scaling: ScalingInfo,
    pub sparse: bool,
}

impl MomentProgram {
    pub fn measure(&self, id: MeasureId) -> &MeasureDef {
        &self.measures[id]
    }

    pub fn num_moments(&self) -> usize {
        self.measures.iter().map(|m| m.moment_count()).sum()
    }
}

/// Builds `[0,1] x K` support over the block `[t, vars..]`, with the time
/// interval encoded as `t(1-t) >= 0`.
pub(crate) fn time_product_support(
    k: &SemialgebraicSet,
    extra: Option<&SemialgebraicSet>,
) -> SemialgebraicSet {
    let mut vars = vec!["t".to_string()];
    vars.extend(k.vars().iter().cloned());
    if let Some(e) = extra {
        vars.extend(e.vars().iter().cloned());
    }
    let t = Polynomial::variable(&vars, "t").unwrap();
    let tc = t.mul(&Polynomial::constant(&vars, 1.0).sub(&t));
    let mut ineqs = vec![tc];
    let mut eqs = Vec::new();
    for g in k.inequalities() {
        ineqs.push(g.lift_to(&vars).unwrap());
    }
    for g in k.equalities() {
        eqs.push(g.lift_to(&vars).unwrap());
    }
    if let Some(e) = extra {
        for g in e.inequalities() {
            ineqs.push(g.lift_to(&vars).unwrap());
        }
        for g in e.equalities() {
            eqs.push(g.lift_to(&vars).unwrap());
        }
    }
    let mut out = SemialgebraicSet::new(vars, ineqs, eqs).unwrap();
    let mut bounds = vec![(0.0, 1.0)];
    if let (Some(kb), eb) = (k.bounds(), extra.and_then(|e| e.bounds())) {
        bounds.extend_from_slice(kb);
        if let Some(eb) = eb {
            bounds.extend_from_slice(eb);
        }
        if bounds.len() == out.vars().len() {
            out.set_bounds(bounds);
        }
    }
    out
}

/// Scaled dynamics over the occupation block `[t, state.., extra..]`:
/// substitutes the per-variable affine maps and multiplies by `T / half_i`.
pub(crate) fn scale_dynamics(
    dynamics: &[Polynomial],
    state_vars: &[String],
    scaling: &ScalingInfo,
) -> Vec<Polynomial> {
    dynamics
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let block = f.vars();
            let mut off = Vec::with_capacity(block.len());
            let mut half = Vec::with_capacity(block.len());
            for v in block {
                if v == "t" {
                    off.push(0.0);
                    half.push(scaling.horizon);
                } else {
                    let (o, h) = scaling.map_of(v);
                    off.push(o);
                    half.push(h);
                }
            }
            let (_, hi) = scaling.map_of(&state_vars[i]);
            f.affine_substitute(&off, &half)
                .scale(scaling.horizon / hi)
        })
        .collect()
}

/// Liouville rows for all test monomials `x^alpha t^beta` with
/// `|alpha| + beta <= 2d`. Rows whose Lie derivative exceeds the occupation
/// truncation (possible for even-degree dynamics) are skipped.
#[allow(clippy::too_many_arguments)]
pub(crate) fn liouville_rows(
    f_scaled: &[Polynomial],
    tx_block: &[String],
    occ_block: &[String],
    d: u32,
    d_tilde: u32,
    mu0: MeasureId,
    mup: MeasureId,
    occ: MeasureId,
) -> Result<Vec<AffineRow>, BuildError> {
    let n = tx_block.len() - 1;
    let mut rows = Vec::new();
    for m in crate::poly::monomial_basis(n + 1, 2 * d) {
        let beta = m.0[0];
        let alpha = MultiIndex(m.0[1..].to_vec());
        let v = Polynomial::monomial(tx_block, m.clone(), 1.0);
        let lf = crate::poly::lie_derivative_in(&v, f_scaled, occ_block)?;
        if lf.degree() > 2 * d_tilde {
            continue;
        }
        let mut terms = Vec::new();
        if beta == 0 {
            terms.push((mu0, alpha.clone(), 1.0));
        }
        for (idx, c) in lf.terms() {
            terms.push((occ, idx.clone(), c));
        }
        terms.push((mup, m, -1.0));
        rows.push(AffineRow {
            terms,
            free_terms: Vec::new(),
            rhs: 0.0,
            role: RowRole::Liouville(alpha, beta),
        });
    }
    Ok(rows)
}

/// Marginal rows `m^eta_{alpha, 0} = m^p_{alpha, 0}` for all
/// `alpha in N^n_{<= 2d}`.
pub(crate) fn marginal_rows(
    n: usize,
    d: u32,
    eta: MeasureId,
    mup: MeasureId,
) -> Vec<AffineRow> {
    crate::poly::monomial_basis(n, 2 * d)
        .into_iter()
        .map(|alpha| {
            let mut eta_idx = alpha.0.clone();
            eta_idx.extend(std::iter::repeat(0).take(n));
            let mut mup_idx = vec![0u32];
            mup_idx.extend_from_slice(&alpha.0);
            AffineRow {
                terms: vec![
                    (eta, MultiIndex(eta_idx), 1.0),
                    (mup, MultiIndex(mup_idx), -1.0),
                ],
                free_terms: Vec::new(),
                rhs: 0.0,
                role: RowRole::Marginal(alpha),
            }
        })
        .collect()
}

pub(crate) fn normalization_row(mu0: MeasureId, n: usize) -> AffineRow {
    AffineRow {
        terms: vec![(mu0, MultiIndex::zero(n), 1.0)],
        free_terms: Vec::new(),
        rhs: 1.0,
        role: RowRole::Normalization,
    }
}

/// Wrap support-equality functionals from `measure_block` into program rows.
pub(crate) fn support_rows(
    measure: &MeasureDef,
    funcs: Vec<crate::moments::LinearFunctional>,
) -> Vec<AffineRow> {
    // functionals are over the reduced block; expand to full indices
    let full_n = measure.full_vars.len();
    let keep: Vec<usize> = measure
        .full_vars
        .iter()
        .enumerate()
        .filter(|(i, _)| !measure.pinned.iter().any(|&(j, _)| j == *i))
        .map(|(i, _)| i)
        .collect();
    funcs
        .into_iter()
        .map(|f| AffineRow {
            terms: f
                .0
                .into_iter()
                .map(|(c, idx)| {
                    let mut full = vec![0u32; full_n];
                    for (pos, &orig) in keep.iter().enumerate() {
                        full[orig] = idx.0[pos];
                    }
                    (measure.id, MultiIndex(full), c)
                })
                .collect(),
            free_terms: Vec::new(),
            rhs: 0.0,
            role: RowRole::Support,
        })
        .collect()
}

pub(crate) fn size_guard_limit() -> usize {
    std::env::var("DISTBOUND_SIZE_GUARD")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(600)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::var_names;

    #[test]
    fn tilde_degree_examples() {
        assert_eq!(tilde_degree(4, 3), 5);
        for d in 1..6 {
            assert_eq!(tilde_degree(d, 1), d);
        }
        assert_eq!(tilde_degree(3, 4), 4);
    }

    #[test]
    fn marginal_row_counts() {
        let rows = marginal_rows(2, 4, 3, 1);
        assert_eq!(rows.len(), 45); // C(10, 8)
        // alpha = 0 equates masses
        let r0 = &rows[0];
        assert_eq!(r0.terms[0].1 .0, vec![0, 0, 0, 0]);
        assert_eq!(r0.terms[1].1 .0, vec![0, 0, 0]);
        // alpha = e1 equates first x-moments
        let r1 = &rows[1];
        assert_eq!(r1.terms[0].1 .0, vec![1, 0, 0, 0]);
        assert_eq!(r1.terms[1].1 .0, vec![0, 1, 0]);
    }

    #[test]
    fn liouville_stationary_dynamics() {
        // f = 0: rows force the x-marginal of mu_p to match mu_0 on any
        // trajectory-generated moment triple. Use a hand-built atomic
        // stationary trajectory as the oracle.
        let tx = var_names(&["t", "x1", "x2"]);
        let f = vec![Polynomial::zero(&tx), Polynomial::zero(&tx)];
        let rows = liouville_rows(&f, &tx, &tx, 2, 2, 0, 1, 2).unwrap();
        assert_eq!(rows.len(), 35); // C(3 + 4, 4)

        let x0 = [0.3_f64, -0.7_f64];
        let t_star = 0.6_f64;
        let mu0 = |a: &MultiIndex| x0[0].powi(a.0[0] as i32) * x0[1].powi(a.0[1] as i32);
        let mup = |a: &MultiIndex| {
            t_star.powi(a.0[0] as i32)
                * x0[0].powi(a.0[1] as i32)
                * x0[1].powi(a.0[2] as i32)
        };
        // occupation of the stationary trajectory over [0, t*]
        let occ = |a: &MultiIndex| {
            (t_star.powi(a.0[0] as i32 + 1) / (a.0[0] as f64 + 1.0))
                * x0[0].powi(a.0[1] as i32)
                * x0[1].powi(a.0[2] as i32)
        };
        for row in &rows {
            let mut acc = -row.rhs;
            for (mid, idx, c) in &row.terms {
                acc += c * match mid {
                    0 => mu0(idx),
                    1 => mup(idx),
                    _ => occ(idx),
                };
            }
            assert!(acc.abs() < 1e-12, "row {:?} residual {}", row.role, acc);
        }
    }

    #[test]
    fn liouville_constant_test_function() {
        let tx = var_names(&["t", "x1"]);
        let f = vec![Polynomial::zero(&tx)];
        let rows = liouville_rows(&f, &tx, &tx, 1, 1, 0, 1, 2).unwrap();
        let first = rows
            .iter()
            .find(|r| r.role == RowRole::Liouville(MultiIndex(vec![0]), 0))
            .unwrap();
        // v = 1: m^0_0 - m^p_{0,0} = 0
        assert_eq!(first.terms.len(), 2);
        assert_eq!(first.terms[0], (0, MultiIndex(vec![0]), 1.0));
        assert_eq!(first.terms[1], (1, MultiIndex(vec![0, 0]), -1.0));
        // v = t: <1, mu> = <t, mu_p>  (mass of occupation = scaled dwell time)
        let t_row = rows
            .iter()
            .find(|r| r.role == RowRole::Liouville(MultiIndex(vec![0]), 1))
            .unwrap();
        assert!(t_row
            .terms
            .iter()
            .any(|(m, i, c)| *m == 2 && i.0 == vec![0, 0] && *c == 1.0));
        assert!(t_row
            .terms
            .iter()
            .any(|(m, i, c)| *m == 1 && i.0 == vec![1, 0] && *c == -1.0));
    }

    #[test]
    fn scaling_roundtrip() {
        let mut sc = ScalingInfo {
            horizon: 5.0,
            maps: BTreeMap::new(),
        };
        sc.add_from_bounds(
            &var_names(&["x1", "x2"]),
            &[(-3.0, 3.0), (-1.0, 2.0)],
        );
        let p = sc.unscale_point(&var_names(&["x1", "x2"]), &[1.0, -1.0]);
        assert_eq!(p, vec![3.0, -1.0]);
        let vars = var_names(&["x1", "x2"]);
        let poly = crate::poly::parse_polynomial("x1^2 + x2", &vars).unwrap();
        let scaled = sc.scale_poly(&poly);
        // at scaled point (1, -1) equals original at (3, -1)
        assert!((scaled.evaluate(&[1.0, -1.0]).unwrap() - (9.0 - 1.0)).abs() < 1e-12);
    }
}
