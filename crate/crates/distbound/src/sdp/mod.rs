//! Standard-form conic programs with PSD blocks, linear equalities and
//! inequalities, and free scalar variables, plus the built-in interior-point
//! solver and a text interchange format for external solvers.

mod linalg;
mod solver;
pub mod standard;

pub use solver::InteriorPointSolver;

use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(
        "PSD block `{label}` has size {size}, above the limit {limit}; \
         try --sparse on or a lower relaxation degree"
    )]
    SizeGuard {
        label: String,
        size: usize,
        limit: usize,
    },
    #[error("conic program contains non-finite data")]
    NonFiniteData,
    #[error("inconsistent equality rows: empty row with nonzero rhs {0}")]
    InconsistentRow(f64),
}

/// Sparse linear row `sum_j coeff_j x_j (= or >=) rhs`.
#[derive(Debug, Clone, Default)]
pub struct SparseRow {
    pub terms: Vec<(u32, f64)>,
    pub rhs: f64,
}

/// PSD constraint `sum_j x_j B_j >= 0`, stored as per-variable sparse
/// symmetric patterns (upper triangle, r <= c).
#[derive(Debug, Clone)]
pub struct PsdBlock {
    pub size: usize,
    pub vars: Vec<u32>,
    pub patterns: Vec<Vec<(u32, u32, f64)>>,
    pub label: String,
}

impl PsdBlock {
    /// Dense value of the block at `x`.
    pub fn value(&self, x: &[f64]) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.size, self.size);
        for (v, pat) in self.vars.iter().zip(&self.patterns) {
            let xv = x[*v as usize];
            if xv == 0.0 {
                continue;
            }
            for &(r, c, k) in pat {
                m[(r as usize, c as usize)] += k * xv;
                if r != c {
                    m[(c as usize, r as usize)] += k * xv;
                }
            }
        }
        m
    }
}

/// `min c'x  s.t.  eq rows hold, ineq rows are >= , PSD blocks are >= 0`.
#[derive(Debug, Clone, Default)]
pub struct ConicProgram {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub eq: Vec<SparseRow>,
    pub ineq: Vec<SparseRow>,
    pub psd: Vec<PsdBlock>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
    MaxIter,
    IllConditioned,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Status::Optimal => "optimal",
            Status::Infeasible => "infeasible",
            Status::Unbounded => "unbounded",
            Status::MaxIter => "max-iter",
            Status::IllConditioned => "ill-conditioned",
        };
        write!(f, "{}", s)
    }
}

#[derive(Debug, Clone)]
pub struct ConicSolution {
    pub status: Status,
    pub x: Vec<f64>,
    /// One multiplier per original equality row (zero on redundant rows
    /// eliminated by presolve).
    pub eq_duals: Vec<f64>,
    pub ineq_duals: Vec<f64>,
    pub psd_duals: Vec<DMatrix<f64>>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub iterations: usize,
}

impl ConicSolution {
    /// Relative duality gap `|p - d| / max(1, |p|)`.
    pub fn duality_gap(&self) -> f64 {
        (self.primal_objective - self.dual_objective).abs()
            / self.primal_objective.abs().max(1.0)
    }
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub max_iter: usize,
    pub tol_feas: f64,
    pub tol_gap: f64,
    /// Largest admissible PSD block size.
    pub size_guard: usize,
    pub verbose: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_iter: 200,
            tol_feas: 1e-6,
            tol_gap: 1e-6,
            size_guard: 600,
            verbose: false,
        }
    }
}

impl SolveOptions {
    /// Tolerance override from the environment (`DISTBOUND_SOLVER_TOL`).
    pub fn from_env() -> Self {
        let mut o = SolveOptions::default();
        if let Ok(v) = std::env::var("DISTBOUND_SOLVER_TOL") {
            if let Ok(t) = v.parse::<f64>() {
                o.tol_feas = t;
                o.tol_gap = t;
            }
        }
        o
    }
}

/// Abstract solver interface: standard primal conic form in, solution out.
/// An external solver can replace the built-in one without touching the
/// program builders.
pub trait ConicSolver {
    fn solve(&self, cp: &ConicProgram, opts: &SolveOptions) -> Result<ConicSolution, SolveError>;
}

// ---------------------------------------------------------------------------
// Text interchange format (one directive per line):
//   CONIC 1
//   VARS n
//   OBJ j coeff
//   EQ row j coeff    EQRHS row value
//   GE row j coeff    GERHS row value
//   PSD k size
//   PSDE k r c j coeff
//   END
// ---------------------------------------------------------------------------

pub fn export_text(cp: &ConicProgram) -> String {
    use std::fmt::Write;
    let mut s = String::new();
    writeln!(s, "CONIC 1").unwrap();
    writeln!(s, "VARS {}", cp.num_vars).unwrap();
    for (j, &c) in cp.objective.iter().enumerate() {
        if c != 0.0 {
            writeln!(s, "OBJ {} {:e}", j, c).unwrap();
        }
    }
    for (r, row) in cp.eq.iter().enumerate() {
        for &(j, c) in &row.terms {
            writeln!(s, "EQ {} {} {:e}", r, j, c).unwrap();
        }
        if row.rhs != 0.0 {
            writeln!(s, "EQRHS {} {:e}", r, row.rhs).unwrap();
        }
    }
    for (r, row) in cp.ineq.iter().enumerate() {
        for &(j, c) in &row.terms {
            writeln!(s, "GE {} {} {:e}", r, j, c).unwrap();
        }
        if row.rhs != 0.0 {
            writeln!(s, "GERHS {} {:e}", r, row.rhs).unwrap();
        }
    }
    for (k, b) in cp.psd.iter().enumerate() {
        writeln!(s, "PSD {} {}", k, b.size).unwrap();
        for (v, pat) in b.vars.iter().zip(&b.patterns) {
            for &(r, c, co) in pat {
                writeln!(s, "PSDE {} {} {} {} {:e}", k, r, c, v, co).unwrap();
            }
        }
    }
    writeln!(s, "END").unwrap();
    s
}

pub fn import_text(text: &str) -> Result<ConicProgram, String> {
    let mut cp = ConicProgram::default();
    let mut psd_tmp: Vec<(usize, Vec<(u32, u32, u32, f64)>)> = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let toks: Vec<&str> = line.split_whitespace().collect();
        let err = |m: &str| format!("line {}: {}", ln + 1, m);
        match toks.as_slice() {
            [] | ["CONIC", _] | ["END"] => {}
            ["VARS", n] => {
                cp.num_vars = n.parse().map_err(|_| err("bad VARS"))?;
                cp.objective = vec![0.0; cp.num_vars];
            }
            ["OBJ", j, c] => {
                let j: usize = j.parse().map_err(|_| err("bad OBJ index"))?;
                cp.objective[j] = c.parse().map_err(|_| err("bad OBJ coeff"))?;
            }
            ["EQ", r, j, c] | ["GE", r, j, c] => {
                let rows = if toks[0] == "EQ" { &mut cp.eq } else { &mut cp.ineq };
                let r: usize = r.parse().map_err(|_| err("bad row"))?;
                while rows.len() <= r {
                    rows.push(SparseRow::default());
                }
                rows[r].terms.push((
                    j.parse().map_err(|_| err("bad var"))?,
                    c.parse().map_err(|_| err("bad coeff"))?,
                ));
            }
            ["EQRHS", r, v] | ["GERHS", r, v] => {
                let rows = if toks[0] == "EQRHS" { &mut cp.eq } else { &mut cp.ineq };
                let r: usize = r.parse().map_err(|_| err("bad row"))?;
                while rows.len() <= r {
                    rows.push(SparseRow::default());
                }
                rows[r].rhs = v.parse().map_err(|_| err("bad rhs"))?;
            }
            ["PSD", k, size] => {
                let k: usize = k.parse().map_err(|_| err("bad block"))?;
                while psd_tmp.len() <= k {
                    psd_tmp.push((0, Vec::new()));
                }
                psd_tmp[k].0 = size.parse().map_err(|_| err("bad size"))?;
            }
            ["PSDE", k, r, c, j, co] => {
                let k: usize = k.parse().map_err(|_| err("bad block"))?;
                while psd_tmp.len() <= k {
                    psd_tmp.push((0, Vec::new()));
                }
                psd_tmp[k].1.push((
                    r.parse().map_err(|_| err("bad r"))?,
                    c.parse().map_err(|_| err("bad c"))?,
                    j.parse().map_err(|_| err("bad var"))?,
                    co.parse().map_err(|_| err("bad coeff"))?,
                ));
            }
            _ => return Err(err("unrecognized directive")),
        }
    }
    for (size, entries) in psd_tmp {
        let mut vars: Vec<u32> = entries.iter().map(|e| e.2).collect();
        vars.sort_unstable();
        vars.dedup();
        let mut patterns = vec![Vec::new(); vars.len()];
        for (r, c, j, co) in entries {
            let vi = vars.binary_search(&j).unwrap();
            patterns[vi].push((r, c, co));
        }
        cp.psd.push(PsdBlock {
            size,
            vars,
            patterns,
            label: String::new(),
        });
    }
    Ok(cp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_roundtrip() {
        let cp = ConicProgram {
            num_vars: 3,
            objective: vec![1.0, 0.0, -2.5],
            eq: vec![SparseRow {
                terms: vec![(0, 1.0), (2, 3.0)],
                rhs: 1.0,
            }],
            ineq: vec![SparseRow {
                terms: vec![(1, 1.0)],
                rhs: -2.0,
            }],
            psd: vec![PsdBlock {
                size: 2,
                vars: vec![0, 1],
                patterns: vec![vec![(0, 0, 1.0)], vec![(0, 1, 0.5), (1, 1, 1.0)]],
                label: String::new(),
            }],
        };
        let text = export_text(&cp);
        let back = import_text(&text).unwrap();
        assert_eq!(back.num_vars, 3);
        assert_eq!(back.objective, cp.objective);
        assert_eq!(back.eq.len(), 1);
        assert_eq!(back.eq[0].rhs, 1.0);
        assert_eq!(back.ineq[0].rhs, -2.0);
        assert_eq!(back.psd[0].size, 2);
        assert_eq!(back.psd[0].vars, vec![0, 1]);
    }
}
