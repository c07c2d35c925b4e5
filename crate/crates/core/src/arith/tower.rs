//! Towers of explicit extension steps over a prime base field.
//!
//! Elements are coordinate vectors in the multiplicative tower basis
//! `θ_1^{k_1} ⋯ θ_s^{k_s}` with lower steps innermost, so an element of the
//! `j`-th prefix field occupies the first `dims[j]` coordinates.

use std::sync::OnceLock;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::expr::{self, Expr};
use crate::error::{Error, Result};
use crate::fpoly::FpPoly;
use crate::linalg::{is_zero_vec, Matrix, Vector};
use crate::scalar::{BaseField, BaseKind, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepKind {
    Eisenstein,
    Unramified,
    General,
}

/// A step as written by the user: coefficient expressions, lowest degree first,
/// including the leading coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExtensionStep {
    pub label: String,
    pub kind: StepKind,
    pub poly: Vec<String>,
}

impl ExtensionStep {
    pub fn new(label: &str, kind: StepKind, poly: &[&str]) -> Self {
        ExtensionStep {
            label: label.to_string(),
            kind,
            poly: poly.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Step {
    pub label: String,
    pub kind: StepKind,
    pub degree: usize,
    /// Coefficients as vectors of the field below, leading `1` included.
    pub poly: Vec<Vector>,
    pub ram_index: usize,
    pub res_degree: usize,
    /// `O_j = O_{j-1}[θ_j]` certified, so the different is `v_j(g'(θ_j))`.
    pub monogenic: bool,
    /// Uniformizer of the prefix field ending at this step.
    pub uniformizer: Vector,
}

#[derive(Debug)]
pub struct FieldTower {
    base: BaseField,
    steps: Vec<Step>,
    dims: Vec<usize>,
    ram_index: usize,
    res_degree: usize,
    basis_vals: OnceLock<Vec<i64>>,
    trace_vec: OnceLock<Vector>,
}

impl PartialEq for FieldTower {
    fn eq(&self, o: &Self) -> bool {
        std::ptr::eq(self, o)
            || (self.base == o.base
                && self.steps.len() == o.steps.len()
                && self.steps.iter().zip(&o.steps).all(|(a, b)| a.label == b.label && a.poly == b.poly))
    }
}

impl FieldTower {
    pub fn base_only(base: BaseField) -> Self {
        FieldTower {
            base,
            steps: vec![],
            dims: vec![1],
            ram_index: 1,
            res_degree: 1,
            basis_vals: OnceLock::new(),
            trace_vec: OnceLock::new(),
        }
    }

    /// Validate and build a tower from user steps.
    pub fn build(base: BaseField, steps: &[ExtensionStep]) -> Result<Self> {
        let mut t = FieldTower::base_only(base);
        for s in steps {
            t = t.extend(s)?;
        }
        Ok(t)
    }

    pub fn base(&self) -> &BaseField {
        &self.base
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn degree(&self) -> usize {
        *self.dims.last().unwrap()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Ramification index over the base.
    pub fn e(&self) -> usize {
        self.ram_index
    }

    /// Residue degree over the base.
    pub fn f(&self) -> usize {
        self.res_degree
    }

    pub fn is_totally_ramified(&self) -> bool {
        self.res_degree == 1
    }

    pub fn uniformizer(&self) -> Vector {
        match self.steps.last() {
            Some(s) => s.uniformizer.clone(),
            None => vec![self.base.uniformizer()],
        }
    }

    pub fn labels(&self) -> Vec<&str> {
        self.steps.iter().map(|s| s.label.as_str()).collect()
    }

    pub fn zero(&self) -> Vector {
        vec![self.base.zero(); self.degree()]
    }

    pub fn one(&self) -> Vector {
        self.scalar(self.base.one())
    }

    pub fn scalar(&self, s: Scalar) -> Vector {
        let mut v = self.zero();
        v[0] = s;
        v
    }

    pub fn int(&self, c: i64) -> Vector {
        self.scalar(self.base.from_int(c))
    }

    /// Generator of step `j` (0-based).
    pub fn generator(&self, j: usize) -> Vector {
        let mut v = self.zero();
        if self.steps[j].degree > 1 {
            v[self.dims[j]] = self.base.one();
        }
        v
    }

    /// Pad a vector of the `level`-th prefix field to the full tower.
    pub fn embed(&self, v: &[Scalar]) -> Vector {
        let mut out = v.to_vec();
        out.resize(self.degree(), self.base.zero());
        out
    }

    pub fn add(&self, a: &[Scalar], b: &[Scalar]) -> Vector {
        a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
    }

    pub fn sub(&self, a: &[Scalar], b: &[Scalar]) -> Vector {
        a.iter().zip(b).map(|(x, y)| x.sub(y)).collect()
    }

    pub fn neg(&self, a: &[Scalar]) -> Vector {
        a.iter().map(Scalar::neg).collect()
    }

    pub fn scale(&self, s: &Scalar, a: &[Scalar]) -> Vector {
        a.iter().map(|x| x.mul(s)).collect()
    }

    pub fn mul(&self, a: &[Scalar], b: &[Scalar]) -> Vector {
        self.mul_level(self.steps.len(), a, b)
    }

    fn mul_level(&self, level: usize, a: &[Scalar], b: &[Scalar]) -> Vector {
        if level == 0 {
            return vec![a[0].mul(&b[0])];
        }
        let step = &self.steps[level - 1];
        let d = step.degree;
        let sub = self.dims[level - 1];
        let chunk = |v: &[Scalar], i: usize| v[i * sub..(i + 1) * sub].to_vec();
        let mut prod: Vec<Option<Vector>> = vec![None; 2 * d - 1];
        let bs: Vec<Vector> = (0..d).map(|j| chunk(b, j)).collect();
        let bz: Vec<bool> = bs.iter().map(|x| is_zero_vec(x)).collect();
        for i in 0..d {
            let ai = chunk(a, i);
            if is_zero_vec(&ai) {
                continue;
            }
            for j in 0..d {
                if bz[j] {
                    continue;
                }
                let t = self.mul_level(level - 1, &ai, &bs[j]);
                prod[i + j] = Some(match prod[i + j].take() {
                    None => t,
                    Some(acc) => self.add(&acc, &t),
                });
            }
        }
        for k in (d..2 * d - 1).rev() {
            let Some(top) = prod[k].take() else { continue };
            if is_zero_vec(&top) {
                continue;
            }
            for i in 0..d {
                if is_zero_vec(&step.poly[i]) {
                    continue;
                }
                let t = self.mul_level(level - 1, &top, &step.poly[i]);
                let idx = k - d + i;
                prod[idx] = Some(match prod[idx].take() {
                    None => self.neg(&t),
                    Some(acc) => self.sub(&acc, &t),
                });
            }
        }
        let zero = vec![self.base.zero(); sub];
        let mut out = Vec::with_capacity(d * sub);
        for c in prod.into_iter().take(d) {
            out.extend(c.unwrap_or_else(|| zero.clone()));
        }
        out
    }

    pub fn pow(&self, a: &[Scalar], e: i64) -> Option<Vector> {
        let mut base = if e < 0 { self.inv(a)? } else { a.to_vec() };
        let mut e = e.unsigned_abs();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        Some(acc)
    }

    /// Basis monomial with index `i`.
    pub fn basis(&self, i: usize) -> Vector {
        let mut v = self.zero();
        v[i] = self.base.one();
        v
    }

    /// Matrix of multiplication by `a` over the base (columns are `a·b_i`).
    pub fn mult_matrix(&self, a: &[Scalar]) -> Matrix {
        let n = self.degree();
        let cols: Vec<Vector> = (0..n).map(|i| self.mul(a, &self.basis(i))).collect();
        Matrix::from_columns(&cols, n)
    }

    pub fn norm(&self, a: &[Scalar]) -> Scalar {
        self.mult_matrix(a).det()
    }

    pub fn trace(&self, a: &[Scalar]) -> Scalar {
        self.mult_matrix(a).trace()
    }

    pub fn inv(&self, a: &[Scalar]) -> Option<Vector> {
        if is_zero_vec(a) {
            return None;
        }
        self.mult_matrix(a).solve(&self.one())
    }

    /// Normalized valuation of an exact element; `None` for zero.
    pub fn valuation(&self, a: &[Scalar]) -> Option<i64> {
        if is_zero_vec(a) {
            return None;
        }
        if self.steps.is_empty() {
            return self.base.valuation(&a[0]);
        }
        let m = self.mult_matrix(a);
        let vn = match crate::modular::padic_det_valuation(&m.rows, self.base.p()) {
            Some(v) => v,
            None => self.base.valuation(&m.det())?,
        };
        debug_assert_eq!(vn % self.res_degree as i64, 0);
        Some(vn / self.res_degree as i64)
    }

    /// Residue in `F_p` of an element of nonnegative valuation, for residue degree 1.
    pub fn residue(&self, a: &[Scalar]) -> Option<u64> {
        if self.res_degree != 1 {
            return None;
        }
        match self.valuation(a) {
            None => return Some(0),
            Some(v) if v > 0 => return Some(0),
            Some(v) if v < 0 => return None,
            _ => {}
        }
        (1..self.base.p()).find(|&r| {
            let d = self.sub(a, &self.int(r as i64));
            self.valuation(&d).is_none_or(|v| v > 0)
        })
    }

    /// Valuations of the basis monomials.
    pub fn basis_valuations(&self) -> &[i64] {
        self.basis_vals.get_or_init(|| {
            (0..self.degree()).map(|i| self.valuation(&self.basis(i)).unwrap()).collect()
        })
    }

    /// `Tr(b_i)` for every basis monomial, so that `Tr(a) = Σ a_i Tr(b_i)`.
    pub fn trace_vector(&self) -> &[Scalar] {
        self.trace_vec.get_or_init(|| (0..self.degree()).map(|i| self.trace(&self.basis(i))).collect())
    }

    pub fn fast_trace(&self, a: &[Scalar]) -> Scalar {
        crate::linalg::dot(a, self.trace_vector())
    }

    /// Representative of `a` modulo `𝔭^n` with coordinatewise truncation.
    pub fn truncate(&self, a: &[Scalar], n: i64) -> Vector {
        let e = self.ram_index as i64;
        let bv = self.basis_valuations();
        a.iter()
            .zip(bv)
            .map(|(c, &vb)| {
                let m = Integer::div_ceil(&(n - vb), &e);
                self.base.truncate(c, m)
            })
            .collect()
    }

    pub fn step_index(&self, label: &str) -> Option<usize> {
        self.steps.iter().position(|s| s.label == label)
    }

    pub fn eval(&self, e: &Expr) -> Result<Vector> {
        Ok(match e {
            Expr::Int(n) => {
                let s = self.base.parse_literal(n).ok_or_else(|| Error::Parse {
                    pos: 0,
                    msg: format!("bad integer `{n}`"),
                })?;
                self.scalar(s)
            }
            Expr::Var(v) => {
                if let Some(j) = self.step_index(v) {
                    self.generator(j)
                } else if v == "t" && self.base.kind() == BaseKind::LaurentSeries {
                    self.scalar(self.base.uniformizer())
                } else {
                    return Err(Error::Schema(format!("undeclared label `{v}`")));
                }
            }
            Expr::Neg(a) => self.neg(&self.eval(a)?),
            Expr::Add(a, b) => self.add(&self.eval(a)?, &self.eval(b)?),
            Expr::Sub(a, b) => self.sub(&self.eval(a)?, &self.eval(b)?),
            Expr::Mul(a, b) => self.mul(&self.eval(a)?, &self.eval(b)?),
            Expr::Div(a, b) => {
                let d = self.eval(b)?;
                let inv = self.inv(&d).ok_or_else(|| Error::Invalid("division by zero".into()))?;
                self.mul(&self.eval(a)?, &inv)
            }
            Expr::Pow(a, k) => {
                let x = self.eval(a)?;
                self.pow(&x, *k).ok_or_else(|| Error::Invalid("zero to a negative power".into()))?
            }
        })
    }

    pub fn parse(&self, s: &str) -> Result<Vector> {
        self.eval(&expr::parse(s)?)
    }

    /// Evaluate a polynomial with coefficients in this field at `x`.
    pub fn eval_poly(&self, coeffs: &[Vector], x: &[Scalar]) -> Vector {
        let mut acc = self.zero();
        for c in coeffs.iter().rev() {
            acc = self.add(&self.mul(&acc, x), &self.embed(c));
        }
        acc
    }

    /// Add one step on top of this tower.
    pub fn extend(&self, step: &ExtensionStep) -> Result<FieldTower> {
        let label = step.label.trim();
        if label.is_empty()
            || label == "t"
            || self.step_index(label).is_some()
            || !label.chars().all(|c| c.is_alphanumeric() || c == '_')
            || label.chars().next().unwrap().is_ascii_digit()
        {
            return Err(Error::Schema(format!("invalid or duplicate step label `{label}`")));
        }
        let coeffs: Vec<Vector> = step
            .poly
            .iter()
            .map(|s| self.parse(s).map_err(|e| e.at(label)))
            .collect::<Result<_>>()?;
        if coeffs.len() < 3 {
            return Err(Error::DegreeTooSmall(label.into()));
        }
        if coeffs.last().unwrap() != &self.one() {
            return Err(Error::NotMonic(label.into()));
        }
        let d = coeffs.len() - 1;
        let vals: Vec<Option<i64>> = coeffs.iter().map(|c| self.valuation(c)).collect();
        let p = self.base.p();

        let residue_poly = |/* integral coefficients */| -> Option<FpPoly> {
            let mut r = vec![];
            for c in &coeffs {
                r.push(self.residue(c)?);
            }
            Some(FpPoly::new(p, r))
        };

        // (e_step, f_step, element y of level j with v_j(y) = a, a, monogenic)
        let (e_step, f_step, shift, a) = match step.kind {
            StepKind::Eisenstein => {
                let ok = vals[0] == Some(1)
                    && vals[1..d].iter().all(|v| v.is_none_or(|v| v >= 1));
                if !ok {
                    return Err(Error::NotEisenstein(label.into()));
                }
                (d, 1, None, 1)
            }
            StepKind::Unramified => {
                if self.res_degree != 1 {
                    return Err(Error::Unsupported(format!(
                        "{label}: unramified step over a residue field larger than F_p"
                    )));
                }
                let integral = vals.iter().all(|v| v.is_none_or(|v| v >= 0));
                match residue_poly() {
                    Some(r) if integral && r.is_irreducible() => (1, d, None, 0),
                    _ => return Err(Error::NotIrreducibleResidue(label.into())),
                }
            }
            StepKind::General => self.classify_general(label, &coeffs, &vals)?,
        };

        let mut dims = self.dims.clone();
        dims.push(self.degree() * d);
        let mut steps = self.steps.clone();
        steps.push(Step {
            label: label.to_string(),
            kind: step.kind,
            degree: d,
            poly: coeffs,
            ram_index: e_step,
            res_degree: f_step,
            monogenic: f_step == d || a == 1,
            uniformizer: vec![],
        });
        let mut t = FieldTower {
            base: self.base.clone(),
            steps,
            dims,
            ram_index: self.ram_index * e_step,
            res_degree: self.res_degree * f_step,
            basis_vals: OnceLock::new(),
            trace_vec: OnceLock::new(),
        };
        let below_pi = t.embed(&self.uniformizer());
        let unif = if e_step == 1 {
            below_pi
        } else {
            let theta = t.generator(t.steps.len() - 1);
            let y = match &shift {
                Some(c) => t.sub(&theta, &t.embed(c)),
                None => theta,
            };
            // a·s + d·u = 1
            let g = a.extended_gcd(&(d as i64));
            debug_assert_eq!(g.gcd.abs(), 1);
            let (s, u) = if g.gcd == 1 { (g.x, g.y) } else { (-g.x, -g.y) };
            let ys = t.pow(&y, s).ok_or(Error::Invalid("zero uniformizer candidate".into()))?;
            let pis = t.pow(&below_pi, u).unwrap();
            t.mul(&ys, &pis)
        };
        t.steps.last_mut().unwrap().uniformizer = unif;
        if t.valuation(&t.uniformizer()) != Some(1) {
            return Err(Error::Unsupported(format!("{label}: uniformizer check failed")));
        }
        Ok(t)
    }

    /// Decide the ramification of a general step: unramified when the residue
    /// polynomial is irreducible, totally ramified when some `θ - c` has norm
    /// valuation coprime to the degree. Returns `(e, f, c, a)`.
    fn classify_general(
        &self,
        label: &str,
        coeffs: &[Vector],
        vals: &[Option<i64>],
    ) -> Result<(usize, usize, Option<Vector>, i64)> {
        let d = coeffs.len() - 1;
        let p = self.base.p();
        if self.res_degree == 1 && vals.iter().all(|v| v.is_none_or(|v| v >= 0)) {
            let res: Option<Vec<u64>> = coeffs.iter().map(|c| self.residue(c)).collect();
            if let Some(r) = res {
                if FpPoly::new(p, r).is_irreducible() {
                    return Ok((1, d, None, 0));
                }
            }
        }
        let Some(v0) = vals[0] else {
            return Err(Error::Invalid(format!("{label}: polynomial has the root 0")));
        };
        if v0.gcd(&(d as i64)) == 1 {
            return Ok((d, 1, None, v0));
        }
        if self.res_degree != 1 {
            return Err(Error::Unsupported(format!(
                "{label}: cannot classify general step over residue degree > 1"
            )));
        }
        let pi = self.uniformizer();
        let start = Integer::div_floor(&v0, &(d as i64));
        let width = 4 * p as usize;
        let mut beam: Vec<(Vector, i64)> = vec![(self.zero(), v0)];
        for i in start..start + 64 {
            let digit = self.pow(&pi, i).unwrap();
            let mut next: Vec<(Vector, i64)> = vec![];
            for (c, _) in &beam {
                for r in 0..p {
                    let cand = self.add(c, &self.scale(&self.base.from_int(r as i64), &digit));
                    let g = self.eval_poly(coeffs, &cand);
                    let Some(a) = self.valuation(&g) else {
                        return Err(Error::Invalid(format!("{label}: polynomial has a root below")));
                    };
                    if a.gcd(&(d as i64)) == 1 {
                        return Ok((d, 1, Some(cand), a));
                    }
                    next.push((cand, a));
                }
            }
            next.sort_by(|x, y| y.1.cmp(&x.1));
            next.truncate(width);
            beam = next;
        }
        Err(Error::Unsupported(format!(
            "{label}: ramification of general step not determined; present it as eisenstein or unramified"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q2() -> BaseField {
        BaseField::padic(2).unwrap()
    }

    #[test]
    fn eisenstein_quadratic() {
        let t = FieldTower::build(q2(), &[ExtensionStep::new("a", StepKind::Eisenstein, &["2", "0", "1"])])
            .unwrap();
        assert_eq!((t.degree(), t.e(), t.f()), (2, 2, 1));
        let a = t.generator(0);
        assert_eq!(t.mul(&a, &a), t.int(-2));
        assert_eq!(t.valuation(&a), Some(1));
    }

    #[test]
    fn cyclotomic_32_is_totally_ramified() {
        let mut poly = vec!["1"];
        poly.extend(std::iter::repeat_n("0", 15));
        poly.push("1");
        let t = FieldTower::build(q2(), &[ExtensionStep::new("z", StepKind::General, &poly)]).unwrap();
        assert_eq!((t.degree(), t.e(), t.f()), (16, 16, 1));
        let z = t.generator(0);
        assert_eq!(t.valuation(&t.sub(&z, &t.one())), Some(1));
        assert_eq!(t.valuation(&t.int(2)), Some(16));
        assert_eq!(t.norm(&t.sub(&z, &t.one())), q2().from_int(2));
    }

    #[test]
    fn q2_i_via_eisenstein_shift() {
        let t = FieldTower::build(q2(), &[ExtensionStep::new("p", StepKind::Eisenstein, &["2", "-2", "1"])])
            .unwrap();
        let i = t.parse("p - 1").unwrap();
        assert_eq!(t.mul(&i, &i), t.int(-1));
        assert_eq!(t.trace(&i), q2().zero());
        assert_eq!(t.trace(&t.parse("1 + (p - 1)").unwrap()), q2().from_int(2));
        let inv = t.inv(&t.parse("p").unwrap()).unwrap();
        // (1+i)^-1 = (1-i)/2
        assert_eq!(inv, t.parse("(1 - (p - 1))/2").unwrap());
    }

    #[test]
    fn rejects_bad_steps() {
        let e = FieldTower::build(q2(), &[ExtensionStep::new("a", StepKind::Eisenstein, &["4", "0", "1"])]);
        assert_eq!(e.unwrap_err(), Error::NotEisenstein("a".into()));
        let e = FieldTower::build(q2(), &[ExtensionStep::new("a", StepKind::Eisenstein, &["2", "0", "3"])]);
        assert_eq!(e.unwrap_err(), Error::NotMonic("a".into()));
        let e = FieldTower::build(q2(), &[ExtensionStep::new("a", StepKind::Unramified, &["1", "0", "1"])]);
        assert_eq!(e.unwrap_err(), Error::NotIrreducibleResidue("a".into()));
        let e = FieldTower::build(q2(), &[ExtensionStep::new("a", StepKind::Eisenstein, &["2", "1"])]);
        assert_eq!(e.unwrap_err(), Error::DegreeTooSmall("a".into()));
        let e = FieldTower::build(q2(), &[ExtensionStep::new("a", StepKind::General, &["b", "0", "1"])]);
        assert!(matches!(e.unwrap_err(), Error::Schema(_)));
    }

    #[test]
    fn unramified_step() {
        let t = FieldTower::build(q2(), &[ExtensionStep::new("w", StepKind::Unramified, &["1", "1", "1"])])
            .unwrap();
        assert_eq!((t.e(), t.f()), (1, 2));
        assert_eq!(t.valuation(&t.generator(0)), Some(0));
        assert_eq!(t.valuation(&t.int(2)), Some(1));
    }

    #[test]
    fn artin_schreier_laurent() {
        let f2 = BaseField::laurent(2).unwrap();
        let t = FieldTower::build(f2, &[ExtensionStep::new("x", StepKind::General, &["1/t", "1", "1"])]).unwrap();
        assert_eq!((t.e(), t.f()), (2, 1));
        assert_eq!(t.valuation(&t.generator(0)), Some(-1));
    }
}
