//! Trajectory integration, point-set distances, and Monte-Carlo upper
//! bounds: the sampling side that sandwiches every relaxation lower bound
//! from above.

use crate::poly::Polynomial;
use crate::program::{ObjectiveSpec, ProblemSpec, ReportTransform};
use crate::sets::SemialgebraicSet;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("step size collapsed below {0:e} during integration")]
    StepCollapse(f64),
    #[error("unsafe set has no feasible grid point; refine the grid or bounds")]
    EmptyGrid,
    #[error("could not sample a point of the initial set within the retry budget")]
    EmptyInitialSet,
    #[error("set `{0}` has no box bounds to sample from")]
    MissingBounds(String),
}

#[derive(Debug, Clone)]
pub struct IntegrateOptions {
    pub tol: f64,
    pub max_step: f64,
    pub min_step: f64,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions {
            tol: 1e-8,
            max_step: f64::INFINITY,
            min_step: 1e-12,
        }
    }
}

/// One integrated trajectory: adaptive time grid, states, and optional
/// truncation where the state set was exited.
#[derive(Debug, Clone, Serialize)]
pub struct TrajectorySample {
    pub x0: Vec<f64>,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub exited: bool,
}

impl TrajectorySample {
    pub fn write_csv<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        write!(w, "t")?;
        for i in 0..self.x0.len() {
            write!(w, ",x{}", i + 1)?;
        }
        writeln!(w)?;
        for (t, x) in self.times.iter().zip(&self.states) {
            write!(w, "{}", t)?;
            for v in x {
                write!(w, ",{}", v)?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

// Dormand-Prince 5(4) tableau
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const C: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Adaptive Dormand-Prince integration of `dx/dt = f(t, x)` over `[0, t_end]`.
/// The record is truncated on exit from `state_set` (trajectories that touch
/// the boundary are assumed not to return).
pub fn integrate<F>(
    mut f: F,
    x0: &[f64],
    t_end: f64,
    state_set: Option<&SemialgebraicSet>,
    opts: &IntegrateOptions,
) -> Result<TrajectorySample, SimError>
where
    F: FnMut(f64, &[f64]) -> Vec<f64>,
{
    let n = x0.len();
    let mut t = 0.0;
    let mut x = x0.to_vec();
    let mut h = (t_end / 100.0).min(opts.max_step);
    let mut times = vec![0.0];
    let mut states = vec![x.clone()];
    let mut exited = false;
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];

    while t < t_end {
        if t + h > t_end {
            h = t_end - t;
        }
        k[0] = f(t, &x);
        for stage in 0..6 {
            let mut xs = x.clone();
            for (j, kj) in k.iter().enumerate().take(stage + 1) {
                let a = A[stage][j];
                if a != 0.0 {
                    for i in 0..n {
                        xs[i] += h * a * kj[i];
                    }
                }
            }
            k[stage + 1] = f(t + C[stage] * h, &xs);
        }
        let mut x5 = x.clone();
        let mut err: f64 = 0.0;
        for i in 0..n {
            let mut d5 = 0.0;
            let mut d4 = 0.0;
            for (j, kj) in k.iter().enumerate() {
                d5 += B5[j] * kj[i];
                d4 += B4[j] * kj[i];
            }
            x5[i] += h * d5;
            let scale = 1.0 + x[i].abs().max(x5[i].abs());
            err += ((d5 - d4) * h / scale).powi(2);
        }
        err = (err / n as f64).sqrt();
        if err <= opts.tol || h <= opts.min_step {
            t += h;
            x = x5;
            times.push(t);
            states.push(x.clone());
            if let Some(set) = state_set {
                if !set.contains(&x, 1e-9).unwrap_or(false) {
                    exited = true;
                    break;
                }
            }
        }
        let factor = if err > 0.0 {
            0.9 * (opts.tol / err).powf(0.2)
        } else {
            5.0
        };
        h = (h * factor.clamp(0.2, 5.0)).min(opts.max_step);
        if h < opts.min_step {
            if err > opts.tol {
                return Err(SimError::StepCollapse(opts.min_step));
            }
            h = opts.min_step;
        }
    }
    Ok(TrajectorySample {
        x0: x0.to_vec(),
        times,
        states,
        exited,
    })
}

/// Polynomial vector field over the block `[t, x..]` as an integrator callback.
pub fn field_from_polys(f: &[Polynomial]) -> impl FnMut(f64, &[f64]) -> Vec<f64> + '_ {
    move |t, x| {
        let mut point = Vec::with_capacity(1 + x.len());
        point.push(t);
        point.extend_from_slice(x);
        f.iter().map(|fi| fi.evaluate(&point).unwrap()).collect()
    }
}

/// Pairwise cost on the reported scale of an objective.
#[derive(Clone)]
pub struct Metric {
    cost: MetricKind,
    transform: ReportTransform,
}

#[derive(Clone)]
enum MetricKind {
    SumPower(u32),
    SumAbsPower(u32),
    Max,
    Poly(Polynomial),
}

impl Metric {
    pub fn from_objective(objective: &ObjectiveSpec) -> Metric {
        match objective {
            ObjectiveSpec::Polynomial { cost, transform } => Metric {
                cost: MetricKind::Poly(cost.clone()),
                transform: *transform,
            },
            ObjectiveSpec::L1 => Metric {
                cost: MetricKind::SumAbsPower(1),
                transform: ReportTransform::Identity,
            },
            ObjectiveSpec::Linf => Metric {
                cost: MetricKind::Max,
                transform: ReportTransform::Identity,
            },
            ObjectiveSpec::L3 => Metric {
                cost: MetricKind::SumAbsPower(3),
                transform: ReportTransform::Root(3),
            },
        }
    }

    pub fn l2() -> Metric {
        Metric {
            cost: MetricKind::SumPower(2),
            transform: ReportTransform::Sqrt,
        }
    }

    /// Raw cost c(x, y) before the report transform.
    pub fn raw(&self, x: &[f64], y: &[f64]) -> f64 {
        match &self.cost {
            MetricKind::SumPower(p) => x
                .iter()
                .zip(y)
                .map(|(a, b)| (a - b).powi(*p as i32))
                .sum(),
            MetricKind::SumAbsPower(p) => x
                .iter()
                .zip(y)
                .map(|(a, b)| (a - b).abs().powi(*p as i32))
                .sum(),
            MetricKind::Max => x
                .iter()
                .zip(y)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
            MetricKind::Poly(c) => {
                let mut pt = x.to_vec();
                pt.extend_from_slice(y);
                c.evaluate(&pt).unwrap()
            }
        }
    }

    /// Reported-scale distance.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        self.transform.apply(self.raw(x, y))
    }
}

/// Precomputed membership-filtered grid over the unsafe set's box, used for
/// point-set distance queries.
pub struct UnsafeGrid {
    pub set: SemialgebraicSet,
    points: Vec<Vec<f64>>,
    coarse: Vec<usize>,
    steps: Vec<f64>,
}

impl UnsafeGrid {
    /// `per_dim` defaults to 200 points per dimension in 1-2D, reduced in
    /// higher dimension to keep the grid tractable.
    pub fn new(set: &SemialgebraicSet, per_dim: Option<usize>) -> Result<UnsafeGrid, SimError> {
        let bounds = set
            .bounds()
            .ok_or_else(|| SimError::MissingBounds("unsafe".into()))?
            .to_vec();
        let n = bounds.len();
        let per = per_dim.unwrap_or(match n {
            0..=2 => 200,
            3 => 40,
            _ => 12,
        });
        let mut points = Vec::new();
        let mut idx = vec![0usize; n];
        let steps: Vec<f64> = bounds
            .iter()
            .map(|&(lo, hi)| (hi - lo) / (per.max(2) - 1) as f64)
            .collect();
        'outer: loop {
            let p: Vec<f64> = (0..n)
                .map(|i| bounds[i].0 + steps[i] * idx[i] as f64)
                .collect();
            if set.contains(&p, 0.0).unwrap_or(false) {
                points.push(p);
            }
            for i in 0..n {
                idx[i] += 1;
                if idx[i] < per {
                    continue 'outer;
                }
                idx[i] = 0;
            }
            break;
        }
        if points.is_empty() {
            return Err(SimError::EmptyGrid);
        }
        // subsampled index list for fast first-pass scans
        let stride = (points.len() / 2000).max(1);
        let coarse = (0..points.len()).step_by(stride).collect();
        Ok(UnsafeGrid {
            set: set.clone(),
            points,
            coarse,
            steps,
        })
    }

    fn nearest_on(&self, x: &[f64], metric: &Metric, indices: &[usize]) -> (f64, usize) {
        let mut best = f64::INFINITY;
        let mut arg = indices[0];
        for &i in indices {
            let d = metric.raw(x, &self.points[i]);
            if d < best {
                best = d;
                arg = i;
            }
        }
        (best, arg)
    }

    /// Point-set distance on the reported scale: full grid scan followed by
    /// per-coordinate descent inside the set.
    pub fn distance(&self, x: &[f64], metric: &Metric) -> (f64, Vec<f64>) {
        let all: Vec<usize> = (0..self.points.len()).collect();
        let (_, arg) = self.nearest_on(x, metric, &all);
        let y = self.refine(x, self.points[arg].clone(), metric, 50);
        (metric.eval(x, &y), y)
    }

    /// Cheap approximate distance for inner scan loops.
    pub fn coarse_distance(&self, x: &[f64], metric: &Metric) -> (f64, usize) {
        self.nearest_on(x, metric, &self.coarse)
    }

    /// Coordinate descent on y within the set, shrinking steps; never leaves
    /// the set, so the result stays a valid witness.
    pub fn refine(&self, x: &[f64], mut y: Vec<f64>, metric: &Metric, rounds: usize) -> Vec<f64> {
        let n = y.len();
        let mut step: Vec<f64> = self.steps.clone();
        let mut best = metric.raw(x, &y);
        for _ in 0..rounds {
            let mut improved = false;
            for i in 0..n {
                for sgn in [1.0, -1.0] {
                    let mut cand = y.clone();
                    cand[i] += sgn * step[i];
                    if !self.set.contains(&cand, 0.0).unwrap_or(false) {
                        continue;
                    }
                    let d = metric.raw(x, &cand);
                    if d < best {
                        best = d;
                        y = cand;
                        improved = true;
                        break;
                    }
                }
            }
            if !improved {
                for s in &mut step {
                    *s *= 0.5;
                }
            }
        }
        y
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct UpperBoundWitness {
    pub x0: Vec<f64>,
    pub time: f64,
    pub state: Vec<f64>,
    pub contact: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct UpperBound {
    pub value: f64,
    pub witness: UpperBoundWitness,
    /// Upper bounds under sampled uncertainty realizations are empirical:
    /// the adversarial infimum over h(.) is not certified by sampling.
    pub empirical: bool,
    pub samples: usize,
    pub seed: u64,
}

pub struct SampleOptions {
    pub grid_per_dim: Option<usize>,
    pub integrate: IntegrateOptions,
    pub uncertainty_switches: usize,
    pub body_grid: usize,
}

impl Default for SampleOptions {
    fn default() -> Self {
        SampleOptions {
            grid_per_dim: None,
            integrate: IntegrateOptions {
                max_step: 0.0, // filled from horizon
                ..Default::default()
            },
            uncertainty_switches: 20,
            body_grid: 9,
        }
    }
}

fn sample_in_set(
    set: &SemialgebraicSet,
    fallback_bounds: Option<&[(f64, f64)]>,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<f64>, SimError> {
    let bounds = set
        .bounds()
        .or(fallback_bounds)
        .ok_or_else(|| SimError::MissingBounds("initial".into()))?;
    for _ in 0..100_000 {
        let p: Vec<f64> = bounds
            .iter()
            .map(|&(lo, hi)| rng.gen_range(lo..=hi))
            .collect();
        if set.contains(&p, 0.0).unwrap_or(false) {
            return Ok(p);
        }
    }
    Err(SimError::EmptyInitialSet)
}

/// Minimum reported-scale distance between one trajectory record and the
/// unsafe grid, with local refinement at the best time point.
fn trajectory_min_distance(
    traj: &TrajectorySample,
    grid: &UnsafeGrid,
    metric: &Metric,
) -> (f64, usize, Vec<f64>) {
    let mut best = f64::INFINITY;
    let mut best_t = 0;
    let mut best_arg = 0;
    for (ti, x) in traj.states.iter().enumerate() {
        let (d, arg) = grid.coarse_distance(x, metric);
        if d < best {
            best = d;
            best_t = ti;
            best_arg = arg;
        }
    }
    let x = &traj.states[best_t];
    let y = grid.refine(x, grid.points[best_arg].clone(), metric, 50);
    (metric.eval(x, &y), best_t, y)
}

/// Monte-Carlo upper bound on the closest-approach distance: minimum over
/// `n_samples` initial conditions of the per-trajectory minimum point-set
/// distance. Deterministic for a fixed seed.
pub fn sample_upper_bound(
    problem: &ProblemSpec,
    n_samples: usize,
    seed: u64,
    opts: &SampleOptions,
) -> Result<UpperBound, SimError> {
    let metric = Metric::from_objective(&problem.objective);
    let grid = UnsafeGrid::new(&problem.xu, opts.grid_per_dim)?;
    let mut iopts = opts.integrate.clone();
    if iopts.max_step <= 0.0 {
        iopts.max_step = problem.horizon / 200.0;
    }

    let results: Vec<(f64, UpperBoundWitness)> = (0..n_samples.max(1))
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (i as u64).wrapping_mul(0x9E3779B97F4A7C15));
            run_one_sample(problem, &grid, &metric, &iopts, opts, &mut rng)
        })
        .collect::<Result<_, _>>()?;

    let (value, witness) = results
        .into_iter()
        .enumerate()
        .min_by(|(ia, (da, _)), (ib, (db, _))| da.total_cmp(db).then(ia.cmp(ib)))
        .map(|(_, r)| r)
        .unwrap();
    Ok(UpperBound {
        value,
        witness,
        empirical: problem.uncertainty.is_some(),
        samples: n_samples.max(1),
        seed,
    })
}

fn run_one_sample(
    problem: &ProblemSpec,
    grid: &UnsafeGrid,
    metric: &Metric,
    iopts: &IntegrateOptions,
    opts: &SampleOptions,
    rng: &mut ChaCha8Rng,
) -> Result<(f64, UpperBoundWitness), SimError> {
    if let Some(shape) = &problem.shape {
        let w0 = sample_in_set(&shape.orientation_init, shape.orientation.bounds(), rng)?;
        let traj = integrate(
            field_from_polys(&shape.dynamics),
            &w0,
            problem.horizon,
            Some(&shape.orientation),
            iopts,
        )?;
        // grid over the body, transported by the transform at each time
        let body_bounds = shape.body.bounds().unwrap();
        let mut body_pts = Vec::new();
        let per = opts.body_grid.max(2);
        let mut idx = vec![0usize; body_bounds.len()];
        'outer: loop {
            let s: Vec<f64> = (0..body_bounds.len())
                .map(|i| {
                    let (lo, hi) = body_bounds[i];
                    lo + (hi - lo) * idx[i] as f64 / (per - 1) as f64
                })
                .collect();
            if shape.body.contains(&s, 1e-9).unwrap_or(false) {
                body_pts.push(s);
            }
            for i in 0..body_bounds.len() {
                idx[i] += 1;
                if idx[i] < per {
                    continue 'outer;
                }
                idx[i] = 0;
            }
            break;
        }
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
        let mut best = (f64::INFINITY, 0usize, Vec::new(), Vec::new());
        for (ti, w) in traj.states.iter().enumerate() {
            for s in &body_pts {
                let mut sw = s.clone();
                sw.extend_from_slice(w);
                let x: Vec<f64> = transform.iter().map(|a| a.evaluate(&sw).unwrap()).collect();
                let (d, arg) = grid.coarse_distance(&x, metric);
                if d < best.0 {
                    best = (d, ti, x, grid.points[arg].clone());
                }
            }
        }
        let y = grid.refine(&best.2, best.3, metric, 50);
        let d = metric.eval(&best.2, &y);
        Ok((
            d,
            UpperBoundWitness {
                x0: w0,
                time: traj.times[best.1],
                state: best.2,
                contact: y,
            },
        ))
    } else if let Some(h_set) = &problem.uncertainty {
        let x0 = sample_in_set(&problem.x0, problem.x.bounds(), rng)?;
        let h_bounds = h_set.bounds().unwrap().to_vec();
        let switches = opts.uncertainty_switches.max(1);
        let h_values: Vec<Vec<f64>> = (0..switches)
            .map(|_| {
                h_bounds
                    .iter()
                    .map(|&(lo, hi)| rng.gen_range(lo..=hi))
                    .collect()
            })
            .collect();
        let horizon = problem.horizon;
        let dynamics = &problem.dynamics;
        let field = move |t: f64, x: &[f64]| {
            let k = (((t / horizon) * switches as f64) as usize).min(switches - 1);
            let mut point = Vec::with_capacity(1 + x.len() + h_bounds.len());
            point.push(t);
            point.extend_from_slice(x);
            point.extend_from_slice(&h_values[k]);
            dynamics
                .iter()
                .map(|fi| fi.evaluate(&point).unwrap())
                .collect()
        };
        let traj = integrate(field, &x0, problem.horizon, Some(&problem.x), iopts)?;
        let (d, ti, y) = trajectory_min_distance(&traj, grid, metric);
        Ok((
            d,
            UpperBoundWitness {
                x0,
                time: traj.times[ti],
                state: traj.states[ti].clone(),
                contact: y,
            },
        ))
    } else {
        let x0 = sample_in_set(&problem.x0, problem.x.bounds(), rng)?;
        let traj = integrate(
            field_from_polys(&problem.dynamics),
            &x0,
            problem.horizon,
            Some(&problem.x),
            iopts,
        )?;
        let (d, ti, y) = trajectory_min_distance(&traj, grid, metric);
        Ok((
            d,
            UpperBoundWitness {
                x0,
                time: traj.times[ti],
                state: traj.states[ti].clone(),
                contact: y,
            },
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_polynomial, var_names};

    fn flow() -> Vec<Polynomial> {
        let tx = var_names(&["t", "x1", "x2"]);
        vec![
            parse_polynomial("x2", &tx).unwrap(),
            parse_polynomial("-x1 - x2 + x1^3/3", &tx).unwrap(),
        ]
    }

    #[test]
    fn exponential_decay_closed_form() {
        let tx = var_names(&["t", "x1"]);
        let f = vec![parse_polynomial("-x1", &tx).unwrap()];
        let traj = integrate(
            field_from_polys(&f),
            &[1.0],
            2.0,
            None,
            &IntegrateOptions::default(),
        )
        .unwrap();
        for (t, x) in traj.times.iter().zip(&traj.states) {
            assert!((x[0] - (-t).exp()).abs() < 1e-6, "t={} x={}", t, x[0]);
        }
    }

    #[test]
    fn stationary_field() {
        let tx = var_names(&["t", "x1"]);
        let f = vec![Polynomial::zero(&tx)];
        let traj = integrate(
            field_from_polys(&f),
            &[0.7],
            1.0,
            None,
            &IntegrateOptions::default(),
        )
        .unwrap();
        assert!(traj.states.iter().all(|x| (x[0] - 0.7).abs() < 1e-12));
    }

    #[test]
    fn flow_minimum_x2_matches_report() {
        // From the reported optimizer, the minimum of x2 and its time.
        let f = flow();
        let traj = integrate(
            field_from_polys(&f),
            &[1.4889, -0.3998],
            5.0,
            None,
            &IntegrateOptions::default(),
        )
        .unwrap();
        let (ti, min_x2) = traj
            .states
            .iter()
            .enumerate()
            .map(|(i, x)| (i, x[1]))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        assert!((min_x2 - (-0.5734)).abs() < 2e-3, "min x2 = {}", min_x2);
        assert!((traj.times[ti] - 1.6627).abs() < 0.05, "t = {}", traj.times[ti]);
    }

    #[test]
    fn liouville_identity_along_trajectory() {
        // v(T, x(T)) - v(0, x0) equals the integral of the Lie derivative
        // along the trajectory; validates integrator and lie_derivative
        // against each other.
        let tx = var_names(&["t", "x1", "x2"]);
        let f = flow();
        let v = parse_polynomial("x1^2*x2 + 0.3*t*x2 - x1", &tx).unwrap();
        let lv = crate::poly::lie_derivative(&v, &f).unwrap();
        let x0 = [1.2, 0.4];
        let t_end = 2.0;
        let traj = integrate(
            field_from_polys(&f),
            &x0,
            t_end,
            None,
            &IntegrateOptions {
                tol: 1e-10,
                max_step: 1e-3,
                ..Default::default()
            },
        )
        .unwrap();
        // trapezoid quadrature of <L_f v> along the stored grid
        let mut integral = 0.0;
        for w in traj.times.windows(2).zip(traj.states.windows(2)) {
            let (ts, xs) = w;
            let eval = |t: f64, x: &[f64]| {
                let mut p = vec![t];
                p.extend_from_slice(x);
                lv.evaluate(&p).unwrap()
            };
            integral += 0.5 * (ts[1] - ts[0]) * (eval(ts[0], &xs[0]) + eval(ts[1], &xs[1]));
        }
        let vt = {
            let mut p = vec![t_end];
            p.extend_from_slice(traj.states.last().unwrap());
            v.evaluate(&p).unwrap()
        };
        let v0 = {
            let mut p = vec![0.0];
            p.extend_from_slice(&x0);
            v.evaluate(&p).unwrap()
        };
        assert!(
            (vt - v0 - integral).abs() < 1e-4,
            "liouville identity residual {}",
            vt - v0 - integral
        );
    }

    fn halfcircle() -> SemialgebraicSet {
        let vars = var_names(&["x1", "x2"]);
        let mut s = SemialgebraicSet::new(
            vars.clone(),
            vec![
                parse_polynomial("0.5^2 - x1^2 - (x2+0.7)^2", &vars).unwrap(),
                parse_polynomial("-0.7071067811865476*(x1 + x2 + 0.7)", &vars).unwrap(),
            ],
            vec![],
        )
        .unwrap();
        s.set_bounds(vec![(-0.5, 0.5), (-1.2, -0.2)]);
        s
    }

    #[test]
    fn point_set_distance_halfcircle() {
        let grid = UnsafeGrid::new(&halfcircle(), None).unwrap();
        let metric = Metric::l2();
        let (d, y) = grid.distance(&[0.0, -0.2997], &metric);
        assert!((d - 0.2831).abs() < 1e-3, "d = {}", d);
        // the witness may drift slightly along the flat boundary, where the
        // distance is first-order insensitive
        assert!((y[0] - (-0.2002)).abs() < 2e-2 && (y[1] - (-0.4998)).abs() < 2e-2);

        // a point inside the set has distance ~0
        let (d0, _) = grid.distance(&[-0.2, -0.55], &metric);
        assert!(d0 < 2e-2, "inside distance {}", d0);
    }

    #[test]
    fn point_set_distance_l1() {
        let grid = UnsafeGrid::new(&halfcircle(), None).unwrap();
        let metric = Metric::from_objective(&ObjectiveSpec::L1);
        let (d, _) = grid.distance(&[0.0, -0.2997], &metric);
        assert!((d - 0.4003).abs() < 5e-3, "d = {}", d);
    }

    #[test]
    fn metric_symmetry() {
        let metric = Metric::l2();
        let mut state = 7u64;
        let mut rnd = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(11);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 4.0 - 2.0
        };
        for _ in 0..50 {
            let x = [rnd(), rnd()];
            let y = [rnd(), rnd()];
            assert!((metric.eval(&x, &y) - metric.eval(&y, &x)).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_refinement_monotone() {
        let set = halfcircle();
        let metric = Metric::l2();
        let coarse = UnsafeGrid::new(&set, Some(60)).unwrap();
        let fine = UnsafeGrid::new(&set, Some(120)).unwrap();
        for x in [[0.0, -0.2997], [1.0, 0.0], [-1.0, -1.0]] {
            let (dc, _) = coarse.distance(&x, &metric);
            let (df, _) = fine.distance(&x, &metric);
            assert!(df <= dc + 1e-3, "coarse {} fine {}", dc, df);
        }
    }
}
