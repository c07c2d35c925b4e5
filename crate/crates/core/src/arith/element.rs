use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::tower::FieldTower;
use crate::error::{Error, Result};
use crate::linalg::{is_zero_vec, Matrix, Vector};
use crate::scalar::Scalar;

/// Normalized valuation, `+∞` for zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Valuation::Finite(_))
    }
}

impl From<Option<i64>> for Valuation {
    fn from(v: Option<i64>) -> Self {
        v.map_or(Valuation::Infinite, Valuation::Finite)
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Valuation {
    fn cmp(&self, o: &Self) -> Ordering {
        match (self, o) {
            (Valuation::Infinite, Valuation::Infinite) => Ordering::Equal,
            (Valuation::Infinite, _) => Ordering::Greater,
            (_, Valuation::Infinite) => Ordering::Less,
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

/// An element of the top field of a tower.
///
/// Exact elements have `precision == None`. A truncated element is known modulo
/// `𝔭^N` of the top field; its representative is exact but only the class
/// modulo `𝔭^N` is meaningful.
#[derive(Clone, Debug)]
pub struct FieldElement {
    tower: Arc<FieldTower>,
    coords: Vector,
    precision: Option<i64>,
    source: Option<Arc<Vector>>,
}

impl FieldElement {
    pub fn new(tower: &Arc<FieldTower>, coords: Vector) -> Self {
        assert_eq!(coords.len(), tower.degree(), "coordinate vector has the wrong length");
        FieldElement { tower: tower.clone(), coords, precision: None, source: None }
    }

    pub fn parse(tower: &Arc<FieldTower>, s: &str) -> Result<Self> {
        Ok(FieldElement::new(tower, tower.parse(s)?))
    }

    pub fn zero(tower: &Arc<FieldTower>) -> Self {
        FieldElement::new(tower, tower.zero())
    }

    pub fn one(tower: &Arc<FieldTower>) -> Self {
        FieldElement::new(tower, tower.one())
    }

    pub fn int(tower: &Arc<FieldTower>, c: i64) -> Self {
        FieldElement::new(tower, tower.int(c))
    }

    pub fn generator(tower: &Arc<FieldTower>, j: usize) -> Self {
        FieldElement::new(tower, tower.generator(j))
    }

    pub fn uniformizer(tower: &Arc<FieldTower>) -> Self {
        FieldElement::new(tower, tower.uniformizer())
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.coords
    }

    pub fn into_coords(self) -> Vector {
        self.coords
    }

    pub fn precision(&self) -> Option<i64> {
        self.precision
    }

    pub fn is_exact(&self) -> bool {
        self.precision.is_none()
    }

    fn same_tower(&self, o: &FieldElement) -> Result<()> {
        if Arc::ptr_eq(&self.tower, &o.tower) || *self.tower == *o.tower {
            Ok(())
        } else {
            Err(Error::TowerMismatch)
        }
    }

    fn derived(&self, coords: Vector, precision: Option<i64>) -> Self {
        FieldElement { tower: self.tower.clone(), coords, precision, source: None }
    }

    /// Valuation of the representative: exact, or `None` for the zero vector.
    fn rep_valuation(&self) -> Option<i64> {
        self.tower.valuation(&self.coords)
    }

    /// A lower bound for the true valuation.
    fn valuation_floor(&self) -> Valuation {
        let rv: Valuation = self.rep_valuation().into();
        match self.precision {
            None => rv,
            Some(n) => rv.min(Valuation::Finite(n)),
        }
    }

    pub fn try_add(&self, o: &FieldElement) -> Result<FieldElement> {
        self.same_tower(o)?;
        Ok(self.derived(self.tower.add(&self.coords, &o.coords), min_prec(self.precision, o.precision)))
    }

    pub fn try_sub(&self, o: &FieldElement) -> Result<FieldElement> {
        self.same_tower(o)?;
        Ok(self.derived(self.tower.sub(&self.coords, &o.coords), min_prec(self.precision, o.precision)))
    }

    pub fn try_mul(&self, o: &FieldElement) -> Result<FieldElement> {
        self.same_tower(o)?;
        let prec = match (self.precision, o.precision) {
            (None, None) => None,
            _ => {
                let a = self.valuation_floor();
                let b = o.valuation_floor();
                let t1 = shift(b, self.precision);
                let t2 = shift(a, o.precision);
                match t1.min(t2) {
                    Valuation::Finite(v) => Some(v),
                    Valuation::Infinite => None,
                }
            }
        };
        Ok(self.derived(self.tower.mul(&self.coords, &o.coords), prec))
    }

    pub fn scale(&self, s: &Scalar) -> FieldElement {
        let prec = self.precision.map(|n| {
            n + self.tower.base().valuation(s).unwrap_or(0) * self.tower.e() as i64
        });
        self.derived(self.tower.scale(s, &self.coords), prec)
    }

    pub fn inv(&self) -> Result<FieldElement> {
        let Some(v) = self.rep_valuation() else {
            return Err(Error::DivisionByIndistinguishableZero);
        };
        let prec = match self.precision {
            None => None,
            Some(n) if v >= n => return Err(Error::DivisionByIndistinguishableZero),
            Some(n) => Some(n - 2 * v),
        };
        let c = self.tower.inv(&self.coords).ok_or(Error::DivisionByIndistinguishableZero)?;
        Ok(self.derived(c, prec))
    }

    pub fn try_div(&self, o: &FieldElement) -> Result<FieldElement> {
        self.try_mul(&o.inv()?)
    }

    pub fn pow(&self, e: i64) -> Result<FieldElement> {
        let mut acc = FieldElement::one(&self.tower);
        let base = if e < 0 { self.inv()? } else { self.clone() };
        for _ in 0..e.unsigned_abs() {
            acc = acc.try_mul(&base)?;
        }
        Ok(acc)
    }

    /// Normalized valuation of the top field.
    pub fn valuation(&self) -> Result<Valuation> {
        let rv = self.rep_valuation();
        match self.precision {
            None => Ok(rv.into()),
            Some(n) => match rv {
                Some(v) if v < n => Ok(Valuation::Finite(v)),
                _ => Err(Error::PrecisionExhausted(format!(
                    "valuation not determined below precision {n}"
                ))),
            },
        }
    }

    /// `v(x) < precision - guard`, i.e. nonzero with room to spare.
    pub fn is_provably_nonzero(&self, guard: i64) -> bool {
        match (self.rep_valuation(), self.precision) {
            (None, _) => false,
            (Some(_), None) => true,
            (Some(v), Some(n)) => v < n - guard,
        }
    }

    pub fn is_zero(&self) -> bool {
        is_zero_vec(&self.coords)
    }

    pub fn mult_matrix(&self) -> Matrix {
        self.tower.mult_matrix(&self.coords)
    }

    /// Trace down to the base field.
    pub fn trace_abs(&self) -> Scalar {
        self.tower.trace(&self.coords)
    }

    /// Norm down to the base field.
    pub fn norm_abs(&self) -> Scalar {
        self.tower.norm(&self.coords)
    }

    /// Truncate to absolute precision `n`, or extend from an exact source.
    pub fn with_precision(&self, n: i64) -> Result<FieldElement> {
        if n < 1 {
            return Err(Error::Invalid("precision must be at least 1".into()));
        }
        let exact: Arc<Vector> = match (self.precision, &self.source) {
            (None, _) => Arc::new(self.coords.clone()),
            (Some(_), Some(src)) => src.clone(),
            (Some(cur), None) => {
                if n > cur {
                    return Err(Error::CannotExtend);
                }
                let c = self.tower.truncate(&self.coords, n);
                return Ok(FieldElement { precision: Some(n), ..self.derived(c, None) });
            }
        };
        let c = self.tower.truncate(&exact, n);
        Ok(FieldElement {
            tower: self.tower.clone(),
            coords: c,
            precision: Some(n),
            source: Some(exact),
        })
    }

    /// Equality modulo the smaller of the two precisions.
    pub fn eq_mod_precision(&self, o: &FieldElement) -> bool {
        if self.same_tower(o).is_err() {
            return false;
        }
        let d = self.tower.sub(&self.coords, &o.coords);
        match (self.tower.valuation(&d), min_prec(self.precision, o.precision)) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(v), Some(n)) => v >= n,
        }
    }
}

fn min_prec(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => Some(a.min(b)),
    }
}

fn shift(v: Valuation, prec: Option<i64>) -> Valuation {
    match (v, prec) {
        (_, None) | (Valuation::Infinite, _) => Valuation::Infinite,
        (Valuation::Finite(a), Some(n)) => Valuation::Finite(a + n),
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, o: &Self) -> bool {
        self.eq_mod_precision(o)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl $tr for &FieldElement {
            type Output = FieldElement;
            /// Panics when the operands live in different towers.
            fn $m(self, o: &FieldElement) -> FieldElement {
                self.$f(o).expect("operands from different towers")
            }
        }
    };
}
binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.derived(self.tower.neg(&self.coords), self.precision)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dims = self.tower.dims();
        let labels = self.tower.labels();
        let mut first = true;
        for (i, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut mono = vec![];
            let mut rest = i;
            for (j, l) in labels.iter().enumerate() {
                let d = dims[j + 1] / dims[j];
                let k = rest % d;
                rest /= d;
                match k {
                    0 => {}
                    1 => mono.push(l.to_string()),
                    _ => mono.push(format!("{l}^{k}")),
                }
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if mono.is_empty() {
                write!(f, "({c})")?;
            } else if c.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "({c})*{}", mono.join("*"))?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        if let Some(n) = self.precision {
            write!(f, " + O(pi^{n})")?;
        }
        Ok(())
    }
}
