//! Dense symmetric linear algebra used by the interior-point solver:
//! Nesterov-Todd scalings, block-diagonal Schur complements, and a pivoted
//! Cholesky for selecting independent equality rows.

use nalgebra::{DMatrix, DVector};

/// Nesterov-Todd scaling point of a PSD pair (S, Z): matrices `r`, `rti`
/// with `r' Z r = rinv S rinv' = diag(lambda)`, where `rti = rinv'`.
pub struct NtScaling {
    pub r: DMatrix<f64>,
    pub rti: DMatrix<f64>,
    pub lambda: DVector<f64>,
    /// `big_r = r r'`, so `W'W(M) = big_r M big_r`.
    pub big_r: DMatrix<f64>,
    /// `big_r_inv = rti rti'`.
    pub big_r_inv: DMatrix<f64>,
}

/// Square factor `F` with `F F' = S`, via Cholesky when `S` is safely
/// positive definite and a clamped eigendecomposition otherwise.
pub fn factor_psd(s: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    if let Some(c) = nalgebra::Cholesky::new(s.clone()) {
        return Some(c.l());
    }
    let eig = nalgebra::SymmetricEigen::new(s.clone());
    let max = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
    if !(max > 0.0) || !max.is_finite() {
        return None;
    }
    let floor = 1e-13 * max;
    let sq = eig.eigenvalues.map(|v| v.max(floor).sqrt());
    let mut f = eig.eigenvectors;
    for (j, col) in sq.iter().enumerate() {
        f.column_mut(j).scale_mut(*col);
    }
    Some(f)
}

pub fn nt_scaling(s: &DMatrix<f64>, z: &DMatrix<f64>) -> Option<NtScaling> {
    let ls = factor_psd(s)?;
    let lz = factor_psd(z)?;
    let m = lz.transpose() * &ls;
    let svd = nalgebra::SVD::new(m, true, true);
    let u = svd.u.as_ref()?;
    let vt = svd.v_t.as_ref()?;
    let smax = svd
        .singular_values
        .iter()
        .cloned()
        .fold(0.0_f64, f64::max);
    if !(smax > 0.0) || !smax.is_finite() {
        return None;
    }
    let sig = svd.singular_values.map(|v| v.max(1e-14 * smax));
    let inv_sqrt = DMatrix::from_diagonal(&sig.map(|v| 1.0 / v.sqrt()));
    let r = &ls * vt.transpose() * &inv_sqrt;
    let rti = &lz * u * &inv_sqrt;
    let big_r = &r * r.transpose();
    let big_r_inv = &rti * rti.transpose();
    Some(NtScaling {
        r,
        rti,
        lambda: sig.clone_owned(),
        big_r,
        big_r_inv,
    })
}

/// Largest step `a` with `m + a*dm` staying PSD, clamped to `cap`.
pub fn max_psd_step(m: &DMatrix<f64>, dm: &DMatrix<f64>, cap: f64) -> f64 {
    let sym = match nalgebra::Cholesky::new(m.clone()) {
        Some(chol) => {
            // T = L^-1 dm L^-T
            let l = chol.l();
            let mut t = dm.clone();
            l.solve_lower_triangular_mut(&mut t);
            let mut tt = t.transpose();
            l.solve_lower_triangular_mut(&mut tt);
            (&tt + tt.transpose()) * 0.5
        }
        None => {
            let eig = nalgebra::SymmetricEigen::new(m.clone());
            let max = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
            if !(max > 0.0) || !max.is_finite() {
                return 0.0;
            }
            let floor = 1e-15 * max;
            let isq = eig.eigenvalues.map(|v| 1.0 / v.max(floor).sqrt());
            let vt = eig.eigenvectors.transpose();
            let mut t = &vt * dm * vt.transpose();
            for i in 0..t.nrows() {
                for j in 0..t.ncols() {
                    t[(i, j)] *= isq[i] * isq[j];
                }
            }
            t
        }
    };
    let eig = sym.symmetric_eigenvalues();
    let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    if min >= 0.0 {
        cap
    } else {
        cap.min(-1.0 / min)
    }
}

/// Block-diagonal symmetric positive definite matrix with a Cholesky solve,
/// indexed by variable groups.
pub struct BlockDiag {
    /// group id -> global variable ids (sorted)
    pub groups: Vec<Vec<u32>>,
    /// global variable -> (group, local index)
    pub var_loc: Vec<(u32, u32)>,
    pub blocks: Vec<DMatrix<f64>>,
}

impl BlockDiag {
    pub fn zeros(groups: Vec<Vec<u32>>, num_vars: usize) -> Self {
        let mut var_loc = vec![(u32::MAX, u32::MAX); num_vars];
        for (g, vars) in groups.iter().enumerate() {
            for (i, &v) in vars.iter().enumerate() {
                var_loc[v as usize] = (g as u32, i as u32);
            }
        }
        let blocks = groups.iter().map(|g| DMatrix::zeros(g.len(), g.len())).collect();
        BlockDiag {
            groups,
            var_loc,
            blocks,
        }
    }

    pub fn reset(&mut self) {
        for b in &mut self.blocks {
            b.fill(0.0);
        }
    }

    pub fn add(&mut self, i: u32, j: u32, v: f64) {
        let (g, li) = self.var_loc[i as usize];
        let (g2, lj) = self.var_loc[j as usize];
        debug_assert_eq!(g, g2, "cross-group coupling in block-diagonal matrix");
        self.blocks[g as usize][(li as usize, lj as usize)] += v;
        if li != lj {
            self.blocks[g as usize][(lj as usize, li as usize)] += v;
        }
    }
}

/// Cholesky factors of a `BlockDiag`, with a small ridge retry on breakdown.
pub struct BlockDiagChol {
    pub groups: Vec<Vec<u32>>,
    pub var_loc: Vec<(u32, u32)>,
    factors: Vec<nalgebra::Cholesky<f64, nalgebra::Dyn>>,
}

impl BlockDiag {
    pub fn factorize(&self) -> Option<BlockDiagChol> {
        let mut factors = Vec::with_capacity(self.blocks.len());
        for b in &self.blocks {
            let mut attempt = b.clone();
            let mut ridge = 0.0;
            let scale = b.diagonal().amax().max(1e-300);
            let f = loop {
                match nalgebra::Cholesky::new(attempt.clone()) {
                    Some(f) => break Some(f),
                    None => {
                        ridge = if ridge == 0.0 { 1e-13 * scale } else { ridge * 100.0 };
                        if ridge > 1e-3 * scale {
                            break None;
                        }
                        attempt = b.clone();
                        for i in 0..attempt.nrows() {
                            attempt[(i, i)] += ridge;
                        }
                    }
                }
            }?;
            factors.push(f);
        }
        Some(BlockDiagChol {
            groups: self.groups.clone(),
            var_loc: self.var_loc.clone(),
            factors,
        })
    }
}

impl BlockDiagChol {
    /// In-place solve of `H u = v` over the full variable vector.
    pub fn solve(&self, v: &mut [f64]) {
        for g in 0..self.groups.len() {
            self.solve_group(g, v);
        }
    }

    /// Solve restricted to one group; the complement of the group is
    /// untouched (valid because H is block diagonal).
    pub fn solve_group(&self, g: usize, v: &mut [f64]) {
        let vars = &self.groups[g];
        let mut local = DVector::zeros(vars.len());
        for (i, &var) in vars.iter().enumerate() {
            local[i] = v[var as usize];
        }
        self.factors[g].solve_mut(&mut local);
        for (i, &var) in vars.iter().enumerate() {
            v[var as usize] = local[i];
        }
    }
}

/// Pivoted Cholesky of the Gram matrix `A A'` over sparse rows; returns the
/// indices of a maximal well-conditioned independent subset of rows.
pub fn independent_rows(rows: &[Vec<(u32, f64)>], tol: f64) -> Vec<usize> {
    let p = rows.len();
    if p == 0 {
        return Vec::new();
    }
    // Gram matrix via sparse dot products
    let mut gram = DMatrix::zeros(p, p);
    // index rows by variable for sparse pairwise dots
    let mut dense: Vec<std::collections::HashMap<u32, f64>> = Vec::with_capacity(p);
    for r in rows {
        dense.push(r.iter().copied().collect());
    }
    for i in 0..p {
        for j in i..p {
            let (small, big) = if rows[i].len() <= rows[j].len() {
                (&rows[i], &dense[j])
            } else {
                (&rows[j], &dense[i])
            };
            let mut acc = 0.0;
            for &(v, c) in small.iter() {
                if let Some(&c2) = big.get(&v) {
                    acc += c * c2;
                }
            }
            gram[(i, j)] = acc;
            gram[(j, i)] = acc;
        }
    }
    let max_diag = (0..p).map(|i| gram[(i, i)]).fold(0.0_f64, f64::max);
    if max_diag <= 0.0 {
        return Vec::new();
    }
    let threshold = tol * max_diag;

    // outer-product pivoted Cholesky; selected pivots form the subset
    let mut selected = Vec::new();
    let mut active: Vec<usize> = (0..p).collect();
    let mut l: Vec<Vec<f64>> = vec![Vec::new(); p]; // computed factor columns per row
    while !active.is_empty() {
        let pivot = *active
            .iter()
            .max_by(|&&a, &&b| gram[(a, a)].total_cmp(&gram[(b, b)]))
            .unwrap();
        let d = gram[(pivot, pivot)];
        if d <= threshold {
            break;
        }
        let root = d.sqrt();
        selected.push(pivot);
        active.retain(|&i| i != pivot);
        // update remaining diagonal: for each active i, the factor entry is
        // (gram[i,pivot] - l_i . l_pivot)/root
        let lp = l[pivot].clone();
        for &i in &active {
            let cross: f64 = l[i].iter().zip(&lp).map(|(a, b)| a * b).sum();
            let entry = (gram[(i, pivot)] - cross) / root;
            l[i].push(entry);
            gram[(i, i)] -= entry * entry;
        }
        l[pivot].push(root);
    }
    selected.sort_unstable();
    selected
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nt_scaling_identities() {
        let s = DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 1.0]);
        let z = DMatrix::from_row_slice(2, 2, &[1.5, -0.2, -0.2, 0.8]);
        let nt = nt_scaling(&s, &z).unwrap();
        let lam = DMatrix::from_diagonal(&nt.lambda);
        let a = nt.r.transpose() * &z * &nt.r;
        let b = nt.rti.transpose() * &s * &nt.rti;
        assert!((a.clone() - lam.clone()).norm() < 1e-10, "r'Zr = diag: {}", a);
        assert!((b.clone() - lam).norm() < 1e-10, "rinv S rinv' = diag: {}", b);
        // W'W(Z) applied through big_r reproduces S on the scaling point:
        // big_r * Z * big_r = S
        let w = &nt.big_r * &z * &nt.big_r;
        assert!((w - &s).norm() < 1e-10);
    }

    #[test]
    fn psd_step_bound() {
        let m = DMatrix::identity(2, 2);
        let dm = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -0.5]);
        let a = max_psd_step(&m, &dm, 10.0);
        assert!((a - 1.0).abs() < 1e-9);
        let dm2 = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        assert_eq!(max_psd_step(&m, &dm2, 7.0), 7.0);
    }

    #[test]
    fn independent_row_selection() {
        let rows = vec![
            vec![(0u32, 1.0), (1, 1.0)],
            vec![(0, 2.0), (1, 2.0)], // dependent on row 0
            vec![(2, 1.0)],
            vec![(0, 1.0), (2, -1.0)],
        ];
        let sel = independent_rows(&rows, 1e-10);
        assert_eq!(sel.len(), 3);
        assert!(!sel.contains(&1) || !sel.contains(&0));
    }
}
