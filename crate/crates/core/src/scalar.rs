//! Scalars of the prime base field: `Q_p` (represented by exact rationals) or
//! `F_p((t))` (represented by exact rational functions in `t`).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fpoly::{is_prime, FpPoly, RatFunc};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Scalar {
    Rat(BigRational),
    Fpt(RatFunc),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaseKind {
    PAdic,
    LaurentSeries,
}

/// The prime field at the bottom of every tower.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BaseField {
    kind: BaseKind,
    p: u64,
}

impl BaseField {
    pub fn new(kind: BaseKind, p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Schema(format!("{p} is not prime")));
        }
        Ok(BaseField { kind, p })
    }

    pub fn padic(p: u64) -> Result<Self> {
        BaseField::new(BaseKind::PAdic, p)
    }

    pub fn laurent(p: u64) -> Result<Self> {
        BaseField::new(BaseKind::LaurentSeries, p)
    }

    pub fn kind(&self) -> BaseKind {
        self.kind
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn characteristic(&self) -> u64 {
        match self.kind {
            BaseKind::PAdic => 0,
            BaseKind::LaurentSeries => self.p,
        }
    }

    pub fn zero(&self) -> Scalar {
        self.from_int(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_int(1)
    }

    pub fn from_int(&self, c: i64) -> Scalar {
        match self.kind {
            BaseKind::PAdic => Scalar::Rat(BigRational::from_integer(c.into())),
            BaseKind::LaurentSeries => Scalar::Fpt(RatFunc::from_int(self.p, c)),
        }
    }

    pub fn from_bigint(&self, c: BigInt) -> Scalar {
        match self.kind {
            BaseKind::PAdic => Scalar::Rat(BigRational::from_integer(c)),
            BaseKind::LaurentSeries => {
                let r = c.mod_floor(&BigInt::from(self.p)).to_i64().unwrap();
                Scalar::Fpt(RatFunc::from_int(self.p, r))
            }
        }
    }

    /// The standard uniformizer: `p` or `t`.
    pub fn uniformizer(&self) -> Scalar {
        match self.kind {
            BaseKind::PAdic => self.from_int(self.p as i64),
            BaseKind::LaurentSeries => Scalar::Fpt(RatFunc::t(self.p)),
        }
    }

    /// The variable `t` of a Laurent-series base.
    pub fn variable(&self) -> Option<Scalar> {
        match self.kind {
            BaseKind::PAdic => None,
            BaseKind::LaurentSeries => Some(Scalar::Fpt(RatFunc::t(self.p))),
        }
    }

    /// Normalized valuation; `None` for zero.
    pub fn valuation(&self, x: &Scalar) -> Option<i64> {
        match x {
            Scalar::Rat(q) => {
                if q.is_zero() {
                    return None;
                }
                Some(int_valuation(q.numer(), self.p) - int_valuation(q.denom(), self.p))
            }
            Scalar::Fpt(f) => f.valuation(),
        }
    }

    /// Residue in `F_p` of an element of nonnegative valuation.
    pub fn residue(&self, x: &Scalar) -> u64 {
        match x {
            Scalar::Rat(q) => {
                let p = BigInt::from(self.p);
                let n = q.numer().mod_floor(&p).to_u64().unwrap();
                let d = q.denom().mod_floor(&p).to_u64().unwrap();
                assert!(d != 0, "residue of a non-integral rational");
                (n as u128 * crate::fpoly::inv_mod(d, self.p) as u128 % self.p as u128) as u64
            }
            Scalar::Fpt(f) => match f.valuation() {
                Some(v) if v <= 0 => f.residue(),
                _ => 0,
            },
        }
    }

    /// A representative `r` with `v(x - r) >= m`: an integer multiple of a power of `p`
    /// for `Q_p`, a Laurent polynomial for `F_p((t))`.
    pub fn truncate(&self, x: &Scalar, m: i64) -> Scalar {
        match x {
            Scalar::Rat(q) => {
                let Some(v) = self.valuation(x) else { return x.clone() };
                if v >= m {
                    return self.zero();
                }
                let p = BigInt::from(self.p);
                let pv = pow_big(&p, v.unsigned_abs());
                let unit = if v >= 0 {
                    q / BigRational::from_integer(pv.clone())
                } else {
                    q * BigRational::from_integer(pv.clone())
                };
                let modulus = pow_big(&p, (m - v) as u64);
                let inv_d = mod_inverse(unit.denom(), &modulus);
                let r = (unit.numer() * inv_d).mod_floor(&modulus);
                let r = BigRational::from_integer(r);
                Scalar::Rat(if v >= 0 {
                    r * BigRational::from_integer(pv)
                } else {
                    r / BigRational::from_integer(pv)
                })
            }
            Scalar::Fpt(f) => Scalar::Fpt(f.truncate(m)),
        }
    }

    /// Simplest exact scalar congruent to `x` modulo `𝔭^m`, by half extended
    /// Euclid. Used to recover exact coordinates from Hensel approximations.
    pub fn reconstruct(&self, x: &Scalar, m: i64) -> Option<Scalar> {
        let Some(v) = self.valuation(x) else { return Some(self.zero()) };
        if v >= m {
            return Some(self.zero());
        }
        let shift = if v < 0 { -v } else { 0 };
        let pi = self.uniformizer();
        let xs = x.mul(&pi.pow(shift));
        let m = m + shift;
        let out = match &xs {
            Scalar::Rat(q) => {
                let p = BigInt::from(self.p);
                let modulus = pow_big(&p, m as u64);
                let a = (q.numer() * mod_inverse(q.denom(), &modulus)).mod_floor(&modulus);
                let bound = isqrt(&(&modulus / BigInt::from(2)));
                let (r0, s0) = half_gcd_int(&modulus, &a, &bound)?;
                if s0.is_zero() || !s0.gcd(&p).is_one() {
                    return None;
                }
                Scalar::Rat(BigRational::new(r0, s0))
            }
            Scalar::Fpt(f) => {
                let pp = self.p;
                let tr = f.truncate(m);
                // tr is a polynomial because v(xs) >= 0
                let a = tr.num().clone();
                let modulus = FpPoly::monomial(pp, 1, m as usize);
                let (r0, s0) = half_gcd_poly(&modulus, &a, (m as usize) / 2)?;
                if s0.is_zero() || s0.coeff(0) == 0 {
                    return None;
                }
                Scalar::Fpt(RatFunc::new(r0, s0))
            }
        };
        Some(out.mul(&pi.pow(-shift)))
    }

    /// Parse an integer or `a/b` literal.
    pub fn parse_literal(&self, s: &str) -> Option<Scalar> {
        let s = s.trim();
        if let Some((a, b)) = s.split_once('/') {
            let a: BigInt = a.trim().parse().ok()?;
            let b: BigInt = b.trim().parse().ok()?;
            if b.is_zero() {
                return None;
            }
            let num = self.from_bigint(a);
            let den = self.from_bigint(b);
            if den.is_zero() {
                return None;
            }
            Some(num.div(&den))
        } else {
            let a: BigInt = s.parse().ok()?;
            Some(self.from_bigint(a))
        }
    }
}

impl fmt::Display for BaseField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            BaseKind::PAdic => write!(f, "Q{}", self.p),
            BaseKind::LaurentSeries => write!(f, "F{}((t))", self.p),
        }
    }
}

pub(crate) fn rat_valuation(q: &BigRational, p: u64) -> Option<i64> {
    (!q.is_zero()).then(|| int_valuation(q.numer(), p) - int_valuation(q.denom(), p))
}

fn int_valuation(n: &BigInt, p: u64) -> i64 {
    if n.is_zero() {
        return 0;
    }
    if p == 2 {
        return n.trailing_zeros().unwrap_or(0) as i64;
    }
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

fn pow_big(p: &BigInt, e: u64) -> BigInt {
    num_traits::pow(p.clone(), e as usize)
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let g = a.mod_floor(m).extended_gcd(m);
    assert!(g.gcd.is_one(), "non-invertible residue");
    g.x.mod_floor(m)
}

fn isqrt(n: &BigInt) -> BigInt {
    n.sqrt()
}

fn half_gcd_int(m: &BigInt, a: &BigInt, bound: &BigInt) -> Option<(BigInt, BigInt)> {
    let (mut r0, mut r1) = (m.clone(), a.clone());
    let (mut s0, mut s1) = (BigInt::zero(), BigInt::one());
    while &r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let s2 = &s0 - &q * &s1;
        r0 = r1;
        r1 = r2;
        s0 = s1;
        s1 = s2;
    }
    if s1.abs() > *bound {
        return None;
    }
    Some((r1, s1))
}

fn half_gcd_poly(m: &FpPoly, a: &FpPoly, bound: usize) -> Option<(FpPoly, FpPoly)> {
    let p = m.modulus();
    let (mut r0, mut r1) = (m.clone(), a.clone());
    let (mut s0, mut s1) = (FpPoly::zero(p), FpPoly::constant(p, 1));
    while r1.degree().is_some_and(|d| d >= bound) {
        let (q, r2) = r0.div_rem(&r1);
        let s2 = s0.sub(&q.mul(&s1));
        r0 = r1;
        r1 = r2;
        s0 = s1;
        s1 = s2;
    }
    if s1.degree().is_none_or(|d| d > bound) {
        return None;
    }
    Some((r1, s1))
}

impl Scalar {
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(q) => q.is_zero(),
            Scalar::Fpt(f) => f.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rat(q) => q.is_one(),
            Scalar::Fpt(f) => f.num().is_one() && f.den().is_one(),
        }
    }

    pub fn add(&self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            (Scalar::Fpt(a), Scalar::Fpt(b)) => Scalar::Fpt(a.add(b)),
            _ => panic!("mixed base scalars"),
        }
    }

    pub fn sub(&self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a - b),
            (Scalar::Fpt(a), Scalar::Fpt(b)) => Scalar::Fpt(a.sub(b)),
            _ => panic!("mixed base scalars"),
        }
    }

    pub fn mul(&self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            (Scalar::Fpt(a), Scalar::Fpt(b)) => Scalar::Fpt(a.mul(b)),
            _ => panic!("mixed base scalars"),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rat(a) => Scalar::Rat(-a),
            Scalar::Fpt(a) => Scalar::Fpt(a.neg()),
        }
    }

    pub fn inv(&self) -> Scalar {
        match self {
            Scalar::Rat(a) => Scalar::Rat(a.recip()),
            Scalar::Fpt(a) => Scalar::Fpt(a.inv()),
        }
    }

    pub fn div(&self, o: &Scalar) -> Scalar {
        self.mul(&o.inv())
    }

    pub fn pow(&self, e: i64) -> Scalar {
        let base = if e < 0 { self.inv() } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = match self {
            Scalar::Rat(_) => Scalar::Rat(BigRational::one()),
            Scalar::Fpt(f) => Scalar::Fpt(RatFunc::from_int(f.modulus(), 1)),
        };
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            e >>= 1;
        }
        acc
    }

    /// Rough size of the representation, used to pick between equivalent pivots.
    pub fn height(&self) -> u64 {
        match self {
            Scalar::Rat(q) => q.numer().bits() + q.denom().bits(),
            Scalar::Fpt(f) => {
                (f.num().degree().unwrap_or(0) + f.den().degree().unwrap_or(0)) as u64 + 1
            }
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rat(q) => Some(q),
            Scalar::Fpt(_) => None,
        }
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        Scalar::add(self, o)
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        Scalar::sub(self, o)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        Scalar::mul(self, o)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::neg(self)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(q) => write!(f, "{q}"),
            Scalar::Fpt(r) => write!(f, "{r}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn padic_valuation_and_residue() {
        let q2 = BaseField::padic(2).unwrap();
        let x = q2.parse_literal("12/5").unwrap();
        assert_eq!(q2.valuation(&x), Some(2));
        let y = q2.parse_literal("3/5").unwrap();
        assert_eq!(q2.residue(&y), 1);
        assert_eq!(q2.valuation(&q2.zero()), None);
    }

    #[test]
    fn truncate_one_third() {
        let q2 = BaseField::padic(2).unwrap();
        let x = q2.parse_literal("1/3").unwrap();
        let r = q2.truncate(&x, 10);
        assert!(q2.valuation(&x.sub(&r)).unwrap() >= 10);
        // 1/3 = ...10101011 in Z_2; mod 2^10 that is 683.
        assert_eq!(r, q2.from_int(683));
    }

    #[test]
    fn reconstruct_recovers_small_fractions() {
        let q3 = BaseField::padic(3).unwrap();
        for lit in ["-7/4", "5", "-1/2", "9/8", "2/27"] {
            let x = q3.parse_literal(lit).unwrap();
            let r = q3.truncate(&x, 40);
            assert_eq!(q3.reconstruct(&r, 40), Some(x), "{lit}");
        }
        let f2 = BaseField::laurent(2).unwrap();
        let t = f2.uniformizer();
        let x = f2.one().add(&t).div(&f2.one().add(&t.mul(&t).mul(&t))).mul(&t.inv());
        let r = f2.truncate(&x, 30);
        assert_eq!(f2.reconstruct(&r, 30), Some(x));
    }

    #[test]
    fn rejects_composite_p() {
        assert!(BaseField::padic(4).is_err());
        assert!(BaseField::laurent(9).is_err());
    }
}
