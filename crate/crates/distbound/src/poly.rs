//! Sparse multivariate polynomials over named variable blocks.
//!
//! Monomials are kept in graded-lexicographic order, which fixes the
//! moment-index layout used by every downstream module.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PolyError {
    #[error("undeclared identifier `{0}`")]
    UndeclaredIdentifier(String),
    #[error("malformed expression: {0}")]
    Malformed(String),
    #[error("exponent must be a natural number, got `{0}`")]
    BadExponent(String),
    #[error("division only by nonzero numeric literals")]
    BadDivisor,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Exponent vector of a monomial; one entry per ambient variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        MultiIndex(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.len(), other.len());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for MultiIndex {
    /// Graded-lexicographic: first by total degree, ties broken
    /// lexicographically on the exponent vector (earlier variable first).
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All multi-indices in `n` variables with total degree at most `d`,
/// in graded-lexicographic order. Count is C(n+d, d).
pub fn monomial_basis(n: usize, d: u32) -> Vec<MultiIndex> {
    let mut out = Vec::with_capacity(binomial(n + d as usize, d as usize));
    let mut cur = vec![0u32; n];
    for deg in 0..=d {
        emit_of_degree(&mut cur, 0, deg, &mut out);
    }
    out
}

fn emit_of_degree(cur: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if pos + 1 == cur.len() {
        cur[pos] = remaining;
        out.push(MultiIndex(cur.clone()));
        cur[pos] = 0;
        return;
    }
    // lex order within a degree class: highest exponent on the earliest variable first
    for e in (0..=remaining).rev() {
        cur[pos] = e;
        emit_of_degree(cur, pos + 1, remaining - e, out);
    }
    cur[pos] = 0;
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// Sparse polynomial: map from multi-index to nonzero coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    vars: Vec<String>,
    terms: BTreeMap<MultiIndex, f64>,
}

impl Polynomial {
    pub fn zero(vars: &[String]) -> Self {
        Polynomial {
            vars: vars.to_vec(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &[String], c: f64) -> Self {
        let mut p = Self::zero(vars);
        if c != 0.0 {
            p.terms.insert(MultiIndex::zero(vars.len()), c);
        }
        p
    }

    pub fn variable(vars: &[String], name: &str) -> Result<Self, PolyError> {
        let i = vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| PolyError::UndeclaredIdentifier(name.to_string()))?;
        let mut p = Self::zero(vars);
        p.terms.insert(MultiIndex::unit(vars.len(), i), 1.0);
        Ok(p)
    }

    pub fn monomial(vars: &[String], idx: MultiIndex, coeff: f64) -> Self {
        let mut p = Self::zero(vars);
        if coeff != 0.0 {
            p.terms.insert(idx, coeff);
        }
        p
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, f64)> {
        self.terms.iter().map(|(k, &v)| (k, v))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Max total degree over stored terms; zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn coefficient(&self, idx: &MultiIndex) -> f64 {
        self.terms.get(idx).copied().unwrap_or(0.0)
    }

    fn insert(&mut self, idx: MultiIndex, c: f64) {
        if c == 0.0 {
            return;
        }
        match self.terms.entry(idx) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = e.get() + c;
                if v == 0.0 {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        debug_assert_eq!(self.vars, other.vars);
        let mut out = self.clone();
        for (idx, c) in other.terms() {
            out.insert(idx.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, k: f64) -> Polynomial {
        let mut out = Self::zero(&self.vars);
        if k == 0.0 {
            return out;
        }
        for (idx, c) in self.terms() {
            out.terms.insert(idx.clone(), c * k);
        }
        out
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        debug_assert_eq!(self.vars, other.vars);
        let mut out = Self::zero(&self.vars);
        for (a, ca) in self.terms() {
            for (b, cb) in other.terms() {
                out.insert(a.add(b), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut out = Self::constant(&self.vars, 1.0);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn partial(&self, var: &str) -> Result<Polynomial, PolyError> {
        let i = self
            .vars
            .iter()
            .position(|v| v == var)
            .ok_or_else(|| PolyError::UndeclaredIdentifier(var.to_string()))?;
        let mut out = Self::zero(&self.vars);
        for (idx, c) in self.terms() {
            let e = idx.0[i];
            if e > 0 {
                let mut d = idx.clone();
                d.0[i] = e - 1;
                out.insert(d, c * e as f64);
            }
        }
        Ok(out)
    }

    pub fn evaluate(&self, point: &[f64]) -> Result<f64, PolyError> {
        if point.len() != self.vars.len() {
            return Err(PolyError::DimensionMismatch {
                expected: self.vars.len(),
                got: point.len(),
            });
        }
        let mut acc = 0.0;
        for (idx, c) in self.terms() {
            let mut t = c;
            for (x, &e) in point.iter().zip(&idx.0) {
                if e > 0 {
                    t *= x.powi(e as i32);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Re-express this polynomial over a superset variable block.
    pub fn lift_to(&self, vars: &[String]) -> Result<Polynomial, PolyError> {
        let map: Vec<usize> = self
            .vars
            .iter()
            .map(|v| {
                vars.iter()
                    .position(|w| w == v)
                    .ok_or_else(|| PolyError::UndeclaredIdentifier(v.clone()))
            })
            .collect::<Result<_, _>>()?;
        let mut out = Polynomial::zero(vars);
        for (idx, c) in self.terms() {
            let mut e = vec![0u32; vars.len()];
            for (old, &new) in map.iter().enumerate() {
                e[new] = idx.0[old];
            }
            out.insert(MultiIndex(e), c);
        }
        Ok(out)
    }

    /// Rename the ambient variables positionally (exponents unchanged).
    pub fn rename_vars(&self, vars: &[String]) -> Polynomial {
        assert_eq!(vars.len(), self.vars.len());
        Polynomial {
            vars: vars.to_vec(),
            terms: self.terms.clone(),
        }
    }

    /// Substitute each variable by a polynomial over a new block.
    pub fn substitute(&self, images: &[Polynomial]) -> Polynomial {
        assert_eq!(images.len(), self.vars.len());
        let new_vars = images
            .first()
            .map(|p| p.vars.clone())
            .unwrap_or_default();
        let mut out = Polynomial::zero(&new_vars);
        for (idx, c) in self.terms() {
            let mut term = Polynomial::constant(&new_vars, c);
            for (i, &e) in idx.0.iter().enumerate() {
                if e > 0 {
                    term = term.mul(&images[i].pow(e));
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Substitute `var_i -> offset_i + scale_i * var_i` in place.
    pub fn affine_substitute(&self, offsets: &[f64], scales: &[f64]) -> Polynomial {
        let images: Vec<Polynomial> = (0..self.vars.len())
            .map(|i| {
                let mut p = Polynomial::constant(&self.vars, offsets[i]);
                p.insert(MultiIndex::unit(self.vars.len(), i), scales[i]);
                p
            })
            .collect();
        self.substitute(&images)
    }

    /// Drop trailing variables whose exponents are fixed to known values,
    /// folding the corresponding powers into the coefficients.
    pub fn restrict(&self, keep: &[usize], fixed: &[(usize, f64)]) -> Polynomial {
        let new_vars: Vec<String> = keep.iter().map(|&i| self.vars[i].clone()).collect();
        let mut out = Polynomial::zero(&new_vars);
        for (idx, c) in self.terms() {
            let mut coeff = c;
            for &(i, val) in fixed {
                if idx.0[i] > 0 {
                    coeff *= val.powi(idx.0[i] as i32);
                }
            }
            let e: Vec<u32> = keep.iter().map(|&i| idx.0[i]).collect();
            out.insert(MultiIndex(e), coeff);
        }
        out
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (idx, c) in self.terms() {
            let mag = c.abs();
            if first {
                if c < 0.0 {
                    write!(f, "-")?;
                }
                first = false;
            } else if c < 0.0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let is_const = idx.degree() == 0;
            if is_const || mag != 1.0 {
                write!(f, "{}", mag)?;
                if !is_const {
                    write!(f, "*")?;
                }
            }
            let mut started = false;
            for (i, &e) in idx.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if started {
                    write!(f, "*")?;
                }
                started = true;
                write!(f, "{}", self.vars[i])?;
                if e > 1 {
                    write!(f, "^{}", e)?;
                }
            }
        }
        Ok(())
    }
}

/// Lie derivative along `f`: `L_f v = d_t v + f . grad_x v`.
///
/// `v` lives over the block `[t, x1, ..., xn]` (time first); `f` supplies one
/// component per state variable, each over the same block.
pub fn lie_derivative(v: &Polynomial, f: &[Polynomial]) -> Result<Polynomial, PolyError> {
    let n_state = v.vars.len().checked_sub(1).unwrap_or(0);
    if f.len() != n_state {
        return Err(PolyError::DimensionMismatch {
            expected: n_state,
            got: f.len(),
        });
    }
    let mut out = v.partial(&v.vars[0])?;
    for (i, fi) in f.iter().enumerate() {
        debug_assert_eq!(fi.vars, v.vars);
        out = out.add(&v.partial(&v.vars[i + 1])?.mul(fi));
    }
    Ok(out)
}

/// Lie derivative when the occupation block carries extra trailing variables
/// (e.g. uncertainty) that the test function does not depend on. `v` is over
/// `[t, x..]`; `f` components are over `[t, x.., extra..]`.
pub fn lie_derivative_in(
    v: &Polynomial,
    f: &[Polynomial],
    block: &[String],
) -> Result<Polynomial, PolyError> {
    let lifted = v.lift_to(block)?;
    let n_state = v.vars.len() - 1;
    let mut out = lifted.partial(&block[0])?;
    for i in 0..n_state {
        out = out.add(&lifted.partial(&block[i + 1])?.mul(&f[i]));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Expression parser: +, -, *, ^ with natural exponents, parentheses, decimal
// literals, and division by numeric literals only.
// ---------------------------------------------------------------------------

pub fn parse_polynomial(text: &str, vars: &[String]) -> Result<Polynomial, PolyError> {
    let mut parser = Parser {
        bytes: text.as_bytes(),
        pos: 0,
        vars,
    };
    let p = parser.expr()?;
    parser.skip_ws();
    if parser.pos != parser.bytes.len() {
        return Err(PolyError::Malformed(format!(
            "unexpected trailing input at byte {}",
            parser.pos
        )));
    }
    Ok(p)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    vars: &'a [String],
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Polynomial, PolyError> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                self.term()?.scale(-1.0)
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, PolyError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.factor()?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    self.skip_ws();
                    let d = self.number()?;
                    if d == 0.0 {
                        return Err(PolyError::BadDivisor);
                    }
                    acc = acc.scale(1.0 / d);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Polynomial, PolyError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if self.pos == start {
                let rest = String::from_utf8_lossy(&self.bytes[start..]).into_owned();
                return Err(PolyError::BadExponent(rest));
            }
            let txt = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
            // reject fractional exponents like 2.5
            if self.bytes.get(self.pos) == Some(&b'.') {
                return Err(PolyError::BadExponent(format!("{}.", txt)));
            }
            let e: u32 = txt
                .parse()
                .map_err(|_| PolyError::BadExponent(txt.to_string()))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial, PolyError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(PolyError::Malformed("missing closing parenthesis".into()));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(self.factor()?.scale(-1.0))
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let v = self.number()?;
                Ok(Polynomial::constant(self.vars, v))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.bytes.len()
                    && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
                Polynomial::variable(self.vars, name)
            }
            other => Err(PolyError::Malformed(format!(
                "unexpected token {:?} at byte {}",
                other.map(|b| b as char),
                self.pos
            ))),
        }
    }

    fn number(&mut self) -> Result<f64, PolyError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b.is_ascii_digit() || b == b'.' {
                self.pos += 1;
            } else if (b == b'e' || b == b'E')
                && self.pos > start
                && self
                    .bytes
                    .get(self.pos + 1)
                    .map(|&n| n.is_ascii_digit() || n == b'+' || n == b'-')
                    .unwrap_or(false)
            {
                self.pos += 2;
                while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                break;
            } else {
                break;
            }
        }
        if self.pos == start {
            return Err(PolyError::Malformed(format!(
                "expected number at byte {}",
                start
            )));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| PolyError::Malformed("bad numeric literal".into()))
    }
}

pub fn var_names(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flow_field(block: &[String]) -> Vec<Polynomial> {
        vec![
            parse_polynomial("x2", block).unwrap(),
            parse_polynomial("-x1 - x2 + x1^3/3", block).unwrap(),
        ]
    }

    #[test]
    fn parse_single_variable() {
        let vars = var_names(&["x1", "x2"]);
        let p = parse_polynomial("x2", &vars).unwrap();
        assert_eq!(p.degree(), 1);
        assert_eq!(p.num_terms(), 1);
        assert_eq!(p.evaluate(&[5.0, 7.0]).unwrap(), 7.0);
    }

    #[test]
    fn parse_flow_component() {
        let vars = var_names(&["x1", "x2"]);
        let p = parse_polynomial("-x1 - x2 + x1^3/3", &vars).unwrap();
        assert_eq!(p.degree(), 3);
        let v = p.evaluate(&[2.0, 1.0]).unwrap();
        assert!((v - (-2.0 - 1.0 + 8.0 / 3.0)).abs() < 1e-14);
    }

    #[test]
    fn parse_zero() {
        let vars = var_names(&["x1"]);
        let p = parse_polynomial("0", &vars).unwrap();
        assert!(p.is_zero());
        assert_eq!(p.degree(), 0);
    }

    #[test]
    fn parse_errors() {
        let vars = var_names(&["x1"]);
        assert!(matches!(
            parse_polynomial("x1 + z", &vars),
            Err(PolyError::UndeclaredIdentifier(_))
        ));
        assert!(parse_polynomial("x1 +", &vars).is_err());
        assert!(matches!(
            parse_polynomial("x1^2.5", &vars),
            Err(PolyError::BadExponent(_))
        ));
        assert!(matches!(
            parse_polynomial("x1/x1", &vars),
            Err(PolyError::Malformed(_)) | Err(PolyError::UndeclaredIdentifier(_))
        ));
    }

    #[test]
    fn evaluate_examples() {
        let vars = var_names(&["x1", "x2"]);
        let p = parse_polynomial("x1^2 + x2", &vars).unwrap();
        assert_eq!(p.evaluate(&[2.0, 3.0]).unwrap(), 7.0);

        // Flow second component at the reported minimizing point; the value
        // is computed by hand here as the independent check.
        let f2 = parse_polynomial("-x1 - x2 + x1^3/3", &vars).unwrap();
        let x = [0.6767_f64, -0.5734_f64];
        let by_hand = -x[0] - x[1] + x[0] * x[0] * x[0] / 3.0;
        assert!((f2.evaluate(&x).unwrap() - by_hand).abs() < 1e-15);

        let z = Polynomial::zero(&vars);
        assert_eq!(z.evaluate(&[10.0, -4.0]).unwrap(), 0.0);
    }

    #[test]
    fn lie_derivative_examples() {
        let block = var_names(&["t", "x1", "x2"]);
        let f = flow_field(&block);

        let v = parse_polynomial("x1", &block).unwrap();
        let lv = lie_derivative(&v, &f).unwrap();
        assert_eq!(lv, parse_polynomial("x2", &block).unwrap());

        let v = parse_polynomial("t", &block).unwrap();
        let lv = lie_derivative(&v, &f).unwrap();
        assert_eq!(lv, Polynomial::constant(&block, 1.0));

        let v = parse_polynomial("x2", &block).unwrap();
        let lv = lie_derivative(&v, &f).unwrap();
        assert_eq!(lv, parse_polynomial("-x1 - x2 + x1^3/3", &block).unwrap());

        // constants vanish
        let c = Polynomial::constant(&block, 4.2);
        assert!(lie_derivative(&c, &f).unwrap().is_zero());
    }

    #[test]
    fn lie_derivative_dimension_mismatch() {
        let block = var_names(&["t", "x1", "x2"]);
        let v = parse_polynomial("x1", &block).unwrap();
        let f = vec![parse_polynomial("x2", &block).unwrap()];
        assert!(lie_derivative(&v, &f).is_err());
    }

    #[test]
    fn basis_counts_and_order() {
        let b = monomial_basis(2, 2);
        assert_eq!(b.len(), 6);
        let expected: Vec<Vec<u32>> = vec![
            vec![0, 0],
            vec![1, 0],
            vec![0, 1],
            vec![2, 0],
            vec![1, 1],
            vec![0, 2],
        ];
        let got: Vec<Vec<u32>> = b.into_iter().map(|m| m.0).collect();
        assert_eq!(got, expected);

        assert_eq!(monomial_basis(4, 4).len(), 70);
        assert_eq!(monomial_basis(8, 4).len(), 495);
        for n in 1..=8 {
            for d in 0..=6u32 {
                assert_eq!(monomial_basis(n, d).len(), binomial(n + d as usize, d as usize));
            }
        }
    }

    #[test]
    fn display_roundtrip() {
        let vars = var_names(&["x1", "x2"]);
        let p = parse_polynomial("3 - x1*x2 + 0.5*x2^2 - x1^3/3", &vars).unwrap();
        let q = parse_polynomial(&p.to_string(), &vars).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn affine_substitution_matches_pointwise() {
        let vars = var_names(&["x1", "x2"]);
        let p = parse_polynomial("1 + x1^2*x2 - 2*x2^3", &vars).unwrap();
        let q = p.affine_substitute(&[0.5, -1.0], &[2.0, 3.0]);
        for pt in [[0.3, 0.7], [-1.1, 0.2], [2.0, -2.0]] {
            let direct = p
                .evaluate(&[0.5 + 2.0 * pt[0], -1.0 + 3.0 * pt[1]])
                .unwrap();
            assert!((q.evaluate(&pt).unwrap() - direct).abs() < 1e-10);
        }
    }
}
