//! Basic semialgebraic set descriptions: inequality constraints `g_k >= 0`,
//! equality constraints `g = 0`, optional box bounds for scaling/sampling,
//! and the redundant ball augmentation that makes compact sets Archimedean.

use crate::poly::{MultiIndex, PolyError, Polynomial};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SetError {
    #[error("constraint uses variables outside the declared block")]
    VariableMismatch,
    #[error("ball radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("variable name collision in product: `{0}`")]
    NameCollision(String),
    #[error("point dimension {got} does not match variable count {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SemialgebraicSet {
    vars: Vec<String>,
    inequalities: Vec<Polynomial>,
    equalities: Vec<Polynomial>,
    /// Per-variable interval bounds, used for scaling and sampling grids.
    bounds: Option<Vec<(f64, f64)>>,
}

impl SemialgebraicSet {
    pub fn new(
        vars: Vec<String>,
        inequalities: Vec<Polynomial>,
        equalities: Vec<Polynomial>,
    ) -> Result<Self, SetError> {
        for p in inequalities.iter().chain(&equalities) {
            if p.vars() != vars.as_slice() {
                return Err(SetError::VariableMismatch);
            }
        }
        Ok(SemialgebraicSet {
            vars,
            inequalities,
            equalities,
            bounds: None,
        })
    }

    pub fn free(vars: Vec<String>) -> Self {
        SemialgebraicSet {
            vars,
            inequalities: Vec::new(),
            equalities: Vec::new(),
            bounds: None,
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn inequalities(&self) -> &[Polynomial] {
        &self.inequalities
    }

    pub fn equalities(&self) -> &[Polynomial] {
        &self.equalities
    }

    pub fn bounds(&self) -> Option<&[(f64, f64)]> {
        self.bounds.as_deref()
    }

    pub fn set_bounds(&mut self, bounds: Vec<(f64, f64)>) {
        assert_eq!(bounds.len(), self.vars.len());
        self.bounds = Some(bounds);
    }

    /// Box shorthand: appends `(hi - x_i)(x_i - lo) >= 0` per coordinate and
    /// records the interval bounds.
    pub fn with_box(mut self, bounds: &[(f64, f64)]) -> Self {
        assert_eq!(bounds.len(), self.vars.len());
        for (i, &(lo, hi)) in bounds.iter().enumerate() {
            let xi = Polynomial::variable(&self.vars, &self.vars[i]).unwrap();
            let upper = Polynomial::constant(&self.vars, hi).sub(&xi);
            let lower = xi.sub(&Polynomial::constant(&self.vars, lo));
            self.inequalities.push(upper.mul(&lower));
        }
        self.bounds = Some(bounds.to_vec());
        self
    }

    /// Appends the redundant ball constraint `R^2 - sum x_i^2 >= 0`;
    /// `radius` is Euclidean.
    pub fn add_ball(&self, radius: f64) -> Result<Self, SetError> {
        if radius <= 0.0 {
            return Err(SetError::NonPositiveRadius(radius));
        }
        let mut out = self.clone();
        let mut g = Polynomial::constant(&self.vars, radius * radius);
        for i in 0..self.vars.len() {
            let sq = Polynomial::monomial(
                &self.vars,
                MultiIndex::unit(self.vars.len(), i).add(&MultiIndex::unit(self.vars.len(), i)),
                1.0,
            );
            g = g.sub(&sq);
        }
        out.inequalities.push(g);
        Ok(out)
    }

    /// Circumscribing Euclidean radius of the recorded box, if any.
    pub fn circumscribing_radius(&self) -> Option<f64> {
        self.bounds.as_ref().map(|b| {
            b.iter()
                .map(|&(lo, hi)| lo.abs().max(hi.abs()).powi(2))
                .sum::<f64>()
                .sqrt()
        })
    }

    pub fn contains(&self, point: &[f64], tol: f64) -> Result<bool, SetError> {
        if point.len() != self.vars.len() {
            return Err(SetError::DimensionMismatch {
                expected: self.vars.len(),
                got: point.len(),
            });
        }
        for g in &self.inequalities {
            if g.evaluate(point)? < -tol {
                return Ok(false);
            }
        }
        for g in &self.equalities {
            if g.evaluate(point)?.abs() > tol {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Product of two sets over disjoint variable blocks: constraints are
    /// lifted to the concatenated block.
    pub fn product(&self, other: &SemialgebraicSet) -> Result<SemialgebraicSet, SetError> {
        for v in &other.vars {
            if self.vars.contains(v) {
                return Err(SetError::NameCollision(v.clone()));
            }
        }
        let vars: Vec<String> = self.vars.iter().chain(&other.vars).cloned().collect();
        let lift = |p: &Polynomial| p.lift_to(&vars).map_err(SetError::from);
        let inequalities = self
            .inequalities
            .iter()
            .chain(&other.inequalities)
            .map(lift)
            .collect::<Result<_, _>>()?;
        let equalities = self
            .equalities
            .iter()
            .chain(&other.equalities)
            .map(lift)
            .collect::<Result<_, _>>()?;
        let bounds = match (&self.bounds, &other.bounds) {
            (Some(a), Some(b)) => Some(a.iter().chain(b).cloned().collect()),
            _ => None,
        };
        Ok(SemialgebraicSet {
            vars,
            inequalities,
            equalities,
            bounds,
        })
    }

    /// Positionally rename the ambient variables.
    pub fn rename_vars(&self, vars: &[String]) -> SemialgebraicSet {
        assert_eq!(vars.len(), self.vars.len());
        SemialgebraicSet {
            vars: vars.to_vec(),
            inequalities: self
                .inequalities
                .iter()
                .map(|p| p.rename_vars(vars))
                .collect(),
            equalities: self.equalities.iter().map(|p| p.rename_vars(vars)).collect(),
            bounds: self.bounds.clone(),
        }
    }

    /// Apply `x_i -> offset_i + scale_i * x_i` to every constraint. Bounds
    /// are mapped through the inverse so the new bounds describe the new
    /// coordinates.
    pub fn affine_substitute(&self, offsets: &[f64], scales: &[f64]) -> SemialgebraicSet {
        SemialgebraicSet {
            vars: self.vars.clone(),
            inequalities: self
                .inequalities
                .iter()
                .map(|p| p.affine_substitute(offsets, scales))
                .collect(),
            equalities: self
                .equalities
                .iter()
                .map(|p| p.affine_substitute(offsets, scales))
                .collect(),
            bounds: self.bounds.as_ref().map(|b| {
                b.iter()
                    .enumerate()
                    .map(|(i, &(lo, hi))| ((lo - offsets[i]) / scales[i], (hi - offsets[i]) / scales[i]))
                    .collect()
            }),
        }
    }

    /// Split off equality constraints that pin a single variable to a value
    /// (`x_i - c = 0`), returning the pinned assignments and the set over the
    /// remaining variables with those values substituted.
    pub fn extract_pins(&self) -> (Vec<(usize, f64)>, SemialgebraicSet) {
        let n = self.vars.len();
        let mut pins: Vec<(usize, f64)> = Vec::new();
        let mut rest_eq: Vec<&Polynomial> = Vec::new();
        for g in &self.equalities {
            if let Some(pin) = single_var_pin(g, n) {
                if !pins.iter().any(|&(i, _)| i == pin.0) {
                    pins.push(pin);
                    continue;
                }
            }
            rest_eq.push(g);
        }
        if pins.is_empty() {
            return (pins, self.clone());
        }
        let keep: Vec<usize> = (0..n).filter(|i| !pins.iter().any(|&(j, _)| j == *i)).collect();
        let restrict = |p: &Polynomial| p.restrict(&keep, &pins);
        let reduced = SemialgebraicSet {
            vars: keep.iter().map(|&i| self.vars[i].clone()).collect(),
            inequalities: self.inequalities.iter().map(restrict).collect(),
            equalities: rest_eq.into_iter().map(restrict).collect(),
            bounds: self
                .bounds
                .as_ref()
                .map(|b| keep.iter().map(|&i| b[i]).collect()),
        };
        (pins, reduced)
    }
}

fn single_var_pin(g: &Polynomial, n: usize) -> Option<(usize, f64)> {
    if g.degree() != 1 || g.num_terms() > 2 {
        return None;
    }
    let mut var = None;
    let mut coeff = 0.0;
    let mut cst = 0.0;
    for (idx, c) in g.terms() {
        if idx.degree() == 0 {
            cst = c;
        } else {
            let i = idx.0.iter().position(|&e| e == 1)?;
            if idx.degree() != 1 {
                return None;
            }
            var = Some(i);
            coeff = c;
        }
    }
    let _ = n;
    var.map(|i| (i, -cst / coeff))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_polynomial, var_names};

    fn halfcircle_unsafe() -> SemialgebraicSet {
        let vars = var_names(&["x1", "x2"]);
        let g1 = parse_polynomial("0.5^2 - x1^2 - (x2+0.7)^2", &vars).unwrap();
        let g2 = parse_polynomial("-0.7071067811865476*(x1 + x2 + 0.7)", &vars).unwrap();
        SemialgebraicSet::new(vars, vec![g1, g2], vec![]).unwrap()
    }

    #[test]
    fn membership_examples() {
        let xu = halfcircle_unsafe();
        assert!(xu.contains(&[-0.2002, -0.4998], 1e-3).unwrap());
        assert!(!xu.contains(&[0.6, 0.0], 1e-9).unwrap());

        // violating one inequality by 2*tol fails
        let vars = var_names(&["x1"]);
        let g = parse_polynomial("x1", &vars).unwrap();
        let s = SemialgebraicSet::new(vars, vec![g], vec![]).unwrap();
        let tol = 1e-6;
        assert!(!s.contains(&[-2.0 * tol], tol).unwrap());
    }

    #[test]
    fn initial_set_and_lift_circle() {
        let vars = var_names(&["x1", "x2"]);
        let g = parse_polynomial("0.4^2 - (x1-1.5)^2 - x2^2", &vars).unwrap();
        let x0 = SemialgebraicSet::new(vars, vec![g], vec![]).unwrap();
        assert!(x0.contains(&[1.5, 0.0], 0.0).unwrap());
        assert!(!x0.contains(&[1.0, 0.0], 1e-9).unwrap());

        let wv = var_names(&["w3", "w4"]);
        let circle = parse_polynomial("w3^2 + w4^2 - 1", &wv).unwrap();
        let lift = SemialgebraicSet::new(wv, vec![], vec![circle]).unwrap();
        assert!(lift.contains(&[0.6, 0.8], 1e-12).unwrap());
        assert!(!lift.contains(&[0.5, 0.5], 1e-6).unwrap());
    }

    #[test]
    fn ball_examples() {
        let vars = var_names(&["x1", "x2"]);
        let b = SemialgebraicSet::free(vars).with_box(&[(-3.0, 3.0), (-3.0, 3.0)]);
        let r = b.circumscribing_radius().unwrap();
        assert!((r - 3.0 * 2.0_f64.sqrt()).abs() < 1e-12);
        let with_ball = b.add_ball(r).unwrap();
        let g = with_ball.inequalities().last().unwrap();
        // 18 - x1^2 - x2^2
        assert!((g.evaluate(&[0.0, 0.0]).unwrap() - 18.0).abs() < 1e-12);
        assert!((g.evaluate(&[3.0, 3.0]).unwrap()).abs() < 1e-12);

        let unit = SemialgebraicSet::free(var_names(&["x1"])).add_ball(1.0).unwrap();
        assert!(unit.contains(&[0.99], 0.0).unwrap());
        assert!(!unit.contains(&[1.01], 1e-9).unwrap());

        // Twist state box: circumscribing radius over corners is sqrt(3)
        let x3 = SemialgebraicSet::free(var_names(&["x1", "x2", "x3"]))
            .with_box(&[(-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0)]);
        let brute = {
            let mut best: f64 = 0.0;
            for c in 0..8 {
                let p = [
                    if c & 1 == 0 { -1.0 } else { 1.0_f64 },
                    if c & 2 == 0 { -1.0 } else { 1.0 },
                    if c & 4 == 0 { -1.0 } else { 1.0 },
                ];
                best = best.max(p.iter().map(|v| v * v).sum::<f64>().sqrt());
            }
            best
        };
        assert!((x3.circumscribing_radius().unwrap() - brute).abs() < 1e-12);
        assert!(x3.add_ball(-1.0).is_err());
    }

    #[test]
    fn ball_preserves_membership_inside() {
        let vars = var_names(&["x1", "x2"]);
        let b = SemialgebraicSet::free(vars).with_box(&[(-1.0, 1.0), (-1.0, 1.0)]);
        let with_ball = b.add_ball(b.circumscribing_radius().unwrap()).unwrap();
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut rnd = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        for _ in 0..200 {
            let p = [rnd(), rnd()];
            assert_eq!(
                b.contains(&p, 0.0).unwrap(),
                with_ball.contains(&p, 0.0).unwrap()
            );
        }
    }

    #[test]
    fn product_concatenates_constraints() {
        let xv = var_names(&["x1", "x2"]);
        let x = SemialgebraicSet::free(xv).with_box(&[(-3.0, 3.0), (-3.0, 3.0)]);
        let xu = halfcircle_unsafe().rename_vars(&var_names(&["y1", "y2"]));
        let prod = x.product(&xu).unwrap();
        assert_eq!(prod.vars().len(), 4);
        assert_eq!(prod.inequalities().len(), 4);
        assert!(prod
            .contains(&[0.0, 0.0, -0.2002, -0.4998], 1e-3)
            .unwrap());
        assert!(!prod.contains(&[0.0, 0.0, 0.6, 0.0], 1e-9).unwrap());

        // collision rejected
        assert!(x.product(&halfcircle_unsafe()).is_err());
    }

    #[test]
    fn product_membership_is_conjunction() {
        let a = SemialgebraicSet::free(var_names(&["a"])).with_box(&[(0.0, 1.0)]);
        let b = SemialgebraicSet::free(var_names(&["b"])).with_box(&[(-1.0, 0.0)]);
        let ab = a.product(&b).unwrap();
        let pts = [[0.5, -0.5], [0.5, 0.5], [-0.5, -0.5], [2.0, -3.0]];
        for p in pts {
            assert_eq!(
                ab.contains(&p, 0.0).unwrap(),
                a.contains(&p[..1], 0.0).unwrap() && b.contains(&p[1..], 0.0).unwrap()
            );
        }
    }

    #[test]
    fn constraint_order_irrelevant_for_membership() {
        let xu = halfcircle_unsafe();
        let mut rev = xu.clone();
        rev.inequalities.reverse();
        for p in [[-0.2, -0.5], [0.6, 0.0], [0.0, -0.9], [-0.4, -0.6]] {
            assert_eq!(
                xu.contains(&p, 1e-9).unwrap(),
                rev.contains(&p, 1e-9).unwrap()
            );
        }
    }

    #[test]
    fn moon_membership() {
        let vars = var_names(&["x1", "x2"]);
        let g1 = parse_polynomial("(x1-0.6596)^2 + (x2-0.3989)^2 - 1.16^2", &vars).unwrap();
        let g2 = parse_polynomial("0.8^2 - (x1-0.4)^2 - (x2+0.4)^2", &vars).unwrap();
        let moon = SemialgebraicSet::new(vars, vec![g1, g2], vec![]).unwrap();
        // reported contact point sits on both circles
        assert!(moon.contains(&[1.161, -0.6472], 5e-3).unwrap());
        // center of the inner circle is inside the outer circle, hence not in the moon
        assert!(!moon.contains(&[0.4, -0.4], 1e-9).unwrap());
    }

    #[test]
    fn pins_extracted() {
        let vars = var_names(&["w1", "w3"]);
        let eq = parse_polynomial("w3 - 0.25", &vars).unwrap();
        let ineq = parse_polynomial("1 - w1^2 - w3^2", &vars).unwrap();
        let s = SemialgebraicSet::new(vars, vec![ineq], vec![eq]).unwrap();
        let (pins, reduced) = s.extract_pins();
        assert_eq!(pins, vec![(1, 0.25)]);
        assert_eq!(reduced.vars(), &["w1".to_string()]);
        let g = &reduced.inequalities()[0];
        assert!((g.evaluate(&[0.0]).unwrap() - (1.0 - 0.0625)).abs() < 1e-12);
    }
}
