//! Post-processing of solved relaxations: rank-one diagnostics on moment
//! matrices, near-optimal point extraction from first moments, and dual
//! polynomial certificates with sampled verification.

use crate::moments::MeasureId;
use crate::poly::{MultiIndex, Polynomial};
use crate::program::{MomentProgram, ReportTransform, RowRole};
use crate::sdp::standard::StandardForm;
use crate::sdp::{ConicSolution, Status};
use crate::sets::SemialgebraicSet;
use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RecoveryError {
    #[error("solution status is {0}, not optimal")]
    NotOptimal(crate::sdp::Status),
    #[error("set `{0}` has no box bounds to sample from")]
    MissingBounds(String),
}

pub const DEFAULT_RANK_THRESHOLD: f64 = 1e-2;

/// Eigenvalue ratio lambda_2 / lambda_1 of the order-(0..2) moment-matrix
/// corner, and whether it clears the rank-one threshold.
pub fn rank_one_check(
    mp: &MomentProgram,
    sf: &StandardForm,
    sol: &ConicSolution,
    measure: MeasureId,
    threshold: f64,
) -> (f64, bool) {
    let m = mp.measure(measure);
    let n = m.dim();
    let mut corner = DMatrix::zeros(n + 1, n + 1);
    let basis: Vec<MultiIndex> = crate::poly::monomial_basis(n, 1);
    for (r, a) in basis.iter().enumerate() {
        for (c, b) in basis.iter().enumerate().skip(r) {
            let v = sol.x[sf.backmap.var_of(measure, &a.add(b))];
            corner[(r, c)] = v;
            corner[(c, r)] = v;
        }
    }
    let mut eig: Vec<f64> = corner.symmetric_eigenvalues().iter().cloned().collect();
    eig.sort_by(|a, b| b.total_cmp(a));
    let ratio = if eig[0] > 0.0 {
        (eig.get(1).copied().unwrap_or(0.0) / eig[0]).max(0.0)
    } else {
        f64::INFINITY
    };
    (ratio, ratio < threshold)
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtractionReport {
    /// lambda_2/lambda_1 per measure name.
    pub ratios: BTreeMap<String, f64>,
    pub rank_one: bool,
    pub x0: Option<Vec<f64>>,
    /// Peak time as a fraction of the horizon.
    pub t_scaled: Option<f64>,
    /// Peak time in the original units.
    pub t_seconds: Option<f64>,
    pub xp: Option<Vec<f64>>,
    /// Trajectory-side contact point read from the joint measure.
    pub x_contact: Option<Vec<f64>>,
    /// Unsafe-set contact point.
    pub y: Option<Vec<f64>>,
    /// Body coordinate (shape mode).
    pub body: Option<Vec<f64>>,
    /// |x_p - x_contact| consistency residual (absent in shape mode, where
    /// the peak measure lives on orientations).
    pub residual: Option<f64>,
}

fn first_moments(
    mp: &MomentProgram,
    sf: &StandardForm,
    sol: &ConicSolution,
    measure: MeasureId,
) -> Vec<f64> {
    let m = mp.measure(measure);
    let n_full = m.full_vars.len();
    (0..n_full)
        .map(|i| {
            sf.backmap
                .moment(mp, &sol.x, measure, &MultiIndex::unit(n_full, i))
        })
        .collect()
}

/// Reads near-optimal points from first moments when the relevant moment
/// matrices pass the rank-one check; otherwise only diagnostics are filled.
pub fn extract_atoms(
    mp: &MomentProgram,
    sf: &StandardForm,
    sol: &ConicSolution,
    threshold: f64,
) -> ExtractionReport {
    let mut ratios = BTreeMap::new();
    let mut all_pass = true;
    let mut checked = vec![mp.roles.mu0, mp.roles.mup];
    checked.extend(mp.roles.eta.iter().copied());
    if let Some(mus) = mp.roles.mus {
        checked.push(mus);
    }
    for id in checked {
        let (ratio, ok) = rank_one_check(mp, sf, sol, id, threshold);
        ratios.insert(mp.measure(id).name.clone(), ratio);
        all_pass &= ok;
    }

    let mut report = ExtractionReport {
        ratios,
        rank_one: all_pass,
        x0: None,
        t_scaled: None,
        t_seconds: None,
        xp: None,
        x_contact: None,
        y: None,
        body: None,
        residual: None,
    };
    if !all_pass {
        return report;
    }

    let scaling = &mp.scaling;
    // initial point
    let mu0 = mp.measure(mp.roles.mu0);
    let m0 = first_moments(mp, sf, sol, mp.roles.mu0);
    report.x0 = Some(scaling.unscale_point(&mu0.full_vars, &m0));
    // peak measure: block [t, state-or-orientation..]
    let mup = mp.measure(mp.roles.mup);
    let mpm = first_moments(mp, sf, sol, mp.roles.mup);
    report.t_scaled = Some(mpm[0]);
    report.t_seconds = Some(mpm[0] * scaling.horizon);
    report.xp = Some(scaling.unscale_point(&mup.full_vars[1..], &mpm[1..]));
    // joint measure coordinates, per home clique
    let x_contact: Vec<f64> = mp
        .roles
        .x_coords
        .iter()
        .map(|cr| {
            let m = mp.measure(cr.measure);
            let idx = MultiIndex::unit(m.full_vars.len(), cr.pos);
            let (o, h) = scaling.map_of(&m.full_vars[cr.pos]);
            o + h * sf.backmap.moment(mp, &sol.x, cr.measure, &idx)
        })
        .collect();
    let y: Vec<f64> = mp
        .roles
        .y_coords
        .iter()
        .map(|cr| {
            let m = mp.measure(cr.measure);
            let idx = MultiIndex::unit(m.full_vars.len(), cr.pos);
            let (o, h) = scaling.map_of(&m.full_vars[cr.pos]);
            o + h * sf.backmap.moment(mp, &sol.x, cr.measure, &idx)
        })
        .collect();
    if !x_contact.is_empty() {
        if mp.roles.mus.is_none() {
            report.residual = Some(
                report
                    .xp
                    .as_ref()
                    .unwrap()
                    .iter()
                    .zip(&x_contact)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt(),
            );
        }
        report.x_contact = Some(x_contact);
        report.y = Some(y);
    }
    if let Some(mus) = mp.roles.mus {
        let m = mp.measure(mus);
        let firsts = first_moments(mp, sf, sol, mus);
        let n_body = m.full_vars.len() - mp.measure(mp.roles.mup).full_vars.len() + 1;
        report.body = Some(scaling.unscale_point(&m.full_vars[..n_body], &firsts[..n_body]));
    }
    report
}

/// Dual polynomial certificate in original coordinates.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub gamma: f64,
    /// Lower bound on the point-set cost, over the state block.
    pub w: Polynomial,
    /// Auxiliary function over [t, state-or-orientation..].
    pub v: Polynomial,
    /// Orientation-marginal dual (shape mode).
    pub z: Option<Polynomial>,
    /// Dual PSD (Gram) blocks with their labels.
    pub gram: Vec<(String, DMatrix<f64>)>,
    pub transform: ReportTransform,
}

/// Reads gamma, w, v (and z in shape mode) from the equality-row duals, and
/// re-expresses them in original coordinates.
pub fn extract_certificate(
    mp: &MomentProgram,
    sf: &StandardForm,
    sol: &ConicSolution,
) -> Result<Certificate, RecoveryError> {
    if sol.status != Status::Optimal {
        return Err(RecoveryError::NotOptimal(sol.status));
    }
    let mup = mp.measure(mp.roles.mup);
    let tx_vars = mup.full_vars.clone();
    let state_vars: Vec<String> = tx_vars[1..].to_vec();
    let n = state_vars.len();

    let mut gamma = 0.0;
    let mut w_scaled = Polynomial::zero(&mp.roles.state_block(mp));
    let mut v_scaled = Polynomial::zero(&tx_vars);
    let mut z_scaled: Option<Polynomial> = mp
        .roles
        .mus
        .map(|_| Polynomial::zero(&state_vars_of_omega(mp)));
    for (row, &dual) in sf.backmap.row_roles.iter().zip(&sol.eq_duals) {
        match row {
            RowRole::Normalization => gamma = -dual,
            RowRole::Marginal(alpha) | RowRole::Pushforward(alpha) => {
                w_scaled = w_scaled.add(&Polynomial::monomial(
                    w_scaled.vars(),
                    alpha.clone(),
                    -dual,
                ));
            }
            RowRole::Liouville(alpha, beta) => {
                let mut idx = vec![*beta];
                idx.extend_from_slice(&alpha.0);
                v_scaled = v_scaled.add(&Polynomial::monomial(
                    &tx_vars,
                    MultiIndex(idx),
                    dual,
                ));
            }
            RowRole::OmegaMarginal(beta) => {
                if let Some(z) = &mut z_scaled {
                    *z = z.add(&Polynomial::monomial(z.vars(), beta.clone(), dual));
                }
            }
            _ => {}
        }
    }
    let _ = n;

    // unscale: substitute scaled = (orig - offset)/half for every variable
    let unscale = |p: &Polynomial, time_first: bool| -> Polynomial {
        let vars = p.vars();
        let mut off = Vec::with_capacity(vars.len());
        let mut inv = Vec::with_capacity(vars.len());
        for (i, v) in vars.iter().enumerate() {
            if time_first && i == 0 {
                off.push(0.0);
                inv.push(1.0 / mp.scaling.horizon);
            } else {
                let (o, h) = mp.scaling.map_of(v);
                off.push(-o / h);
                inv.push(1.0 / h);
            }
        }
        p.affine_substitute(&off, &inv)
    };

    let gram = mp
        .blocks
        .iter()
        .zip(&sol.psd_duals)
        .map(|(spec, m)| (spec.label.clone(), m.clone()))
        .collect();
    Ok(Certificate {
        gamma,
        w: unscale(&w_scaled, false),
        v: unscale(&v_scaled, true),
        z: z_scaled.map(|z| unscale(&z, false)),
        gram,
        transform: mp.objective.transform,
    })
}

fn state_vars_of_omega(mp: &MomentProgram) -> Vec<String> {
    mp.measure(mp.roles.mup).full_vars[1..].to_vec()
}

impl crate::program::ProgramRoles {
    fn state_block(&self, mp: &MomentProgram) -> Vec<String> {
        // w(x) lives over the x-part of the joint block
        self.x_coords
            .iter()
            .map(|cr| mp.measure(cr.measure).full_vars[cr.pos].clone())
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionCheck {
    pub name: String,
    pub worst: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub conditions: Vec<ConditionCheck>,
    pub all_pass: bool,
    pub samples: usize,
    pub epsilon: f64,
}

/// Samples the four dual-certificate inequalities (raw cost scale):
///   (i)  c(x, y) - w(x) >= -eps on X x Xu
///   (ii) w(x) - v(t, x) >= -eps on [0, T] x X
///   (iii) L_f v >= -eps on [0, T] x X (x H under uncertainty)
///   (iv) v(0, x) - gamma >= -eps on X0
/// In shape mode (ii) splits through z: w(A(s; w)) - z(w) and z(w) - v(t, w).
pub fn verify_certificate(
    cert: &Certificate,
    problem: &crate::program::ProblemSpec,
    n_samples: usize,
    epsilon: f64,
    seed: u64,
) -> Result<VerificationReport, RecoveryError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut conditions = Vec::new();
    let metric = crate::sim::Metric::from_objective(&problem.objective);

    let sample_box = |set: &SemialgebraicSet,
                      fallback: Option<&[(f64, f64)]>,
                      rng: &mut ChaCha8Rng|
     -> Result<Option<Vec<f64>>, RecoveryError> {
        let bounds = set
            .bounds()
            .or(fallback)
            .ok_or_else(|| RecoveryError::MissingBounds("sampling".into()))?;
        for _ in 0..200 {
            let p: Vec<f64> = bounds
                .iter()
                .map(|&(lo, hi)| rng.gen_range(lo..=hi))
                .collect();
            if set.contains(&p, 0.0).unwrap_or(false) {
                return Ok(Some(p));
            }
        }
        Ok(None)
    };

    let x_bounds = problem.x.bounds();

    // (i) cost dominance over X x Xu
    let mut worst_i = f64::INFINITY;
    for _ in 0..n_samples {
        let x = match sample_box(&problem.x, None, &mut rng)? {
            Some(p) => p,
            None => continue,
        };
        let y = match sample_box(&problem.xu, x_bounds, &mut rng)? {
            Some(p) => p,
            None => continue,
        };
        let c = metric.raw(&x, &y);
        let wx = cert.w.evaluate(&x).unwrap();
        worst_i = worst_i.min(c - wx);
    }
    conditions.push(ConditionCheck {
        name: "cost_dominates_w".into(),
        worst: worst_i,
        pass: worst_i >= -epsilon,
    });

    match &problem.shape {
        None => {
            // (ii) w >= v on [0,T] x X
            let mut worst = f64::INFINITY;
            for _ in 0..n_samples {
                let x = match sample_box(&problem.x, None, &mut rng)? {
                    Some(p) => p,
                    None => continue,
                };
                let t = rng.gen_range(0.0..=problem.horizon);
                let wx = cert.w.evaluate(&x).unwrap();
                let mut p = vec![t];
                p.extend_from_slice(&x);
                worst = worst.min(wx - cert.v.evaluate(&p).unwrap());
            }
            conditions.push(ConditionCheck {
                name: "w_dominates_v".into(),
                worst,
                pass: worst >= -epsilon,
            });

            // (iii) L_f v >= 0
            let occ_block: Vec<String> = problem.dynamics[0].vars().to_vec();
            let lv = crate::poly::lie_derivative_in(&cert.v, &problem.dynamics, &occ_block)
                .expect("certificate block matches dynamics");
            let mut worst = f64::INFINITY;
            for _ in 0..n_samples {
                let x = match sample_box(&problem.x, None, &mut rng)? {
                    Some(p) => p,
                    None => continue,
                };
                let t = rng.gen_range(0.0..=problem.horizon);
                let mut p = vec![t];
                p.extend_from_slice(&x);
                if let Some(h) = &problem.uncertainty {
                    if let Some(hv) = sample_box(h, None, &mut rng)? {
                        p.extend_from_slice(&hv);
                    } else {
                        continue;
                    }
                }
                worst = worst.min(lv.evaluate(&p).unwrap());
            }
            conditions.push(ConditionCheck {
                name: "lie_derivative_nonneg".into(),
                worst,
                pass: worst >= -epsilon,
            });

            // (iv) v(0, x) >= gamma on X0
            let mut worst = f64::INFINITY;
            for _ in 0..n_samples {
                let x = match sample_box(&problem.x0, x_bounds, &mut rng)? {
                    Some(p) => p,
                    None => continue,
                };
                let mut p = vec![0.0];
                p.extend_from_slice(&x);
                worst = worst.min(cert.v.evaluate(&p).unwrap() - cert.gamma);
            }
            conditions.push(ConditionCheck {
                name: "initial_above_gamma".into(),
                worst,
                pass: worst >= -epsilon,
            });
        }
        Some(shape) => {
            let z = cert.z.as_ref().expect("shape certificate carries z");
            let sw_block: Vec<String> = shape
                .body_vars
                .iter()
                .chain(shape.orient_vars.iter())
                .cloned()
                .collect();
            let transform: Vec<Polynomial> = shape
                .transform
                .iter()
                .map(|a| a.lift_to(&sw_block).unwrap())
                .collect();

            // (ii-a) w(A(s; w)) >= z(w) on S x Omega
            let mut worst = f64::INFINITY;
            for _ in 0..n_samples {
                let s = match sample_box(&shape.body, None, &mut rng)? {
                    Some(p) => p,
                    None => continue,
                };
                let om = match sample_box(&shape.orientation, None, &mut rng)? {
                    Some(p) => p,
                    None => continue,
                };
                let mut sw = s.clone();
                sw.extend_from_slice(&om);
                let x: Vec<f64> = transform.iter().map(|a| a.evaluate(&sw).unwrap()).collect();
                worst =
                    worst.min(cert.w.evaluate(&x).unwrap() - z.evaluate(&om).unwrap());
            }
            conditions.push(ConditionCheck {
                name: "w_transform_dominates_z".into(),
                worst,
                pass: worst >= -epsilon,
            });

            // (ii-b) z(w) >= v(t, w)
            let mut worst = f64::INFINITY;
            for _ in 0..n_samples {
                let om = match sample_box(&shape.orientation, None, &mut rng)? {
                    Some(p) => p,
                    None => continue,
                };
                let t = rng.gen_range(0.0..=problem.horizon);
                let mut p = vec![t];
                p.extend_from_slice(&om);
                worst = worst.min(z.evaluate(&om).unwrap() - cert.v.evaluate(&p).unwrap());
            }
            conditions.push(ConditionCheck {
                name: "z_dominates_v".into(),
                worst,
                pass: worst >= -epsilon,
            });

            // (iii) L_f v >= 0 over [0, T] x Omega
            let tw_block: Vec<String> = std::iter::once("t".to_string())
                .chain(shape.orient_vars.iter().cloned())
                .collect();
            let f: Vec<Polynomial> = shape
                .dynamics
                .iter()
                .map(|p| p.lift_to(&tw_block).unwrap())
                .collect();
            let lv = crate::poly::lie_derivative_in(&cert.v, &f, &tw_block).unwrap();
            let mut worst = f64::INFINITY;
            for _ in 0..n_samples {
                let om = match sample_box(&shape.orientation, None, &mut rng)? {
                    Some(p) => p,
                    None => continue,
                };
                let t = rng.gen_range(0.0..=problem.horizon);
                let mut p = vec![t];
                p.extend_from_slice(&om);
                worst = worst.min(lv.evaluate(&p).unwrap());
            }
            conditions.push(ConditionCheck {
                name: "lie_derivative_nonneg".into(),
                worst,
                pass: worst >= -epsilon,
            });

            // (iv) v(0, w) >= gamma on Omega0
            let mut worst = f64::INFINITY;
            for _ in 0..n_samples {
                let om = match sample_box(&shape.orientation_init, shape.orientation.bounds(), &mut rng)? {
                    Some(p) => p,
                    None => continue,
                };
                let mut p = vec![0.0];
                p.extend_from_slice(&om);
                worst = worst.min(cert.v.evaluate(&p).unwrap() - cert.gamma);
            }
            conditions.push(ConditionCheck {
                name: "initial_above_gamma".into(),
                worst,
                pass: worst >= -epsilon,
            });
        }
    }

    let all_pass = conditions.iter().all(|c| c.pass);
    Ok(VerificationReport {
        conditions,
        all_pass,
        samples: n_samples,
        epsilon,
    })
}

/// JSON export of a certificate: coefficient lists in graded-lex order.
#[derive(Debug, Clone, Serialize)]
pub struct CertificateExport {
    pub gamma: f64,
    pub bound: f64,
    pub w: PolyExport,
    pub v: PolyExport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<PolyExport>,
    pub verification: Option<VerificationReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PolyExport {
    pub vars: Vec<String>,
    /// entries [exponents.., coefficient] in graded-lex term order
    pub terms: Vec<Vec<serde_json::Value>>,
}

impl PolyExport {
    pub fn from_poly(p: &Polynomial) -> PolyExport {
        PolyExport {
            vars: p.vars().to_vec(),
            terms: p
                .terms()
                .map(|(idx, c)| {
                    let mut row: Vec<serde_json::Value> =
                        idx.0.iter().map(|&e| serde_json::json!(e)).collect();
                    row.push(serde_json::json!(c));
                    row
                })
                .collect(),
        }
    }
}

impl Certificate {
    pub fn export(&self, verification: Option<VerificationReport>) -> CertificateExport {
        CertificateExport {
            gamma: self.gamma,
            bound: self.transform.apply(self.gamma),
            w: PolyExport::from_poly(&self.w),
            v: PolyExport::from_poly(&self.v),
            z: self.z.as_ref().map(PolyExport::from_poly),
            verification,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::var_names;

    #[test]
    fn dirac_moments_have_zero_ratio() {
        // moment matrix corner of a Dirac at z: rank one exactly
        let z = [0.4, -1.2];
        let mut corner = DMatrix::zeros(3, 3);
        let lift = |i: usize| if i == 0 { 1.0 } else { z[i - 1] };
        for r in 0..3 {
            for c in 0..3 {
                corner[(r, c)] = lift(r) * lift(c);
            }
        }
        let mut eig: Vec<f64> = corner.symmetric_eigenvalues().iter().cloned().collect();
        eig.sort_by(|a, b| b.total_cmp(a));
        assert!(eig[1].abs() / eig[0] < 1e-14);
    }

    #[test]
    fn two_atom_measure_fails_rank_one() {
        // moments of (delta_a + delta_b)/2 for well-separated atoms
        let a = [1.0];
        let b = [-1.0];
        let mut corner = DMatrix::zeros(2, 2);
        for r in 0..2 {
            for c in 0..2 {
                let ma = if r == 0 { 1.0 } else { a[0] } * if c == 0 { 1.0 } else { a[0] };
                let mb = if r == 0 { 1.0 } else { b[0] } * if c == 0 { 1.0 } else { b[0] };
                corner[(r, c)] = 0.5 * (ma + mb);
            }
        }
        let mut eig: Vec<f64> = corner.symmetric_eigenvalues().iter().cloned().collect();
        eig.sort_by(|x, y| y.total_cmp(x));
        let ratio = eig[1] / eig[0];
        assert!(ratio > DEFAULT_RANK_THRESHOLD, "ratio {}", ratio);
    }

    #[test]
    fn perturbed_w_fails_condition_one() {
        // construct a trivially valid certificate for a toy problem, then
        // break condition (i) by lifting w
        let xv = var_names(&["x1"]);
        let tx = var_names(&["t", "x1"]);
        let x0 = SemialgebraicSet::free(xv.clone()).with_box(&[(0.0, 0.1)]);
        let x = SemialgebraicSet::free(xv.clone()).with_box(&[(-1.0, 1.0)]);
        let xu = SemialgebraicSet::free(xv.clone()).with_box(&[(0.9, 1.0)]);
        let problem = crate::program::ProblemSpec {
            name: "toy".into(),
            state_vars: xv.clone(),
            dynamics: vec![Polynomial::zero(&tx)],
            horizon: 1.0,
            x0,
            x,
            xu,
            objective: crate::program::ObjectiveSpec::l2_squared(&var_names(&["x1", "y1"])),
            uncertainty: None,
            shape: None,
        };
        let zero_cert = Certificate {
            gamma: 0.0,
            w: Polynomial::zero(&xv),
            v: Polynomial::zero(&tx),
            z: None,
            gram: vec![],
            transform: ReportTransform::Sqrt,
        };
        let rep = verify_certificate(&zero_cert, &problem, 500, 1e-9, 7).unwrap();
        assert!(rep.all_pass, "zero certificate is feasible: {:?}", rep);

        let bad = Certificate {
            w: Polynomial::constant(&xv, 1.0),
            ..zero_cert
        };
        let rep = verify_certificate(&bad, &problem, 500, 1e-9, 7).unwrap();
        let c1 = &rep.conditions[0];
        assert!(!c1.pass);
        assert!((c1.worst + 1.0).abs() < 0.2, "violation about -1: {}", c1.worst);
    }
}
