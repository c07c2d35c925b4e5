//! Dense polynomials over a prime field `F_p` and the rational functions built from them.
//!
//! These back the Laurent-series base field `F_p((t))`: exact elements are kept as
//! reduced fractions of polynomials in `t`, and the `t`-adic valuation is the order
//! of vanishing at `t = 0`.

use std::fmt;

/// Polynomial over `F_p`, coefficients lowest degree first, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FpPoly {
    p: u64,
    coeffs: Vec<u64>,
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a % p, p - 2, p)
}

pub(crate) fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * a as u128 % p as u128) as u64;
        }
        a = (a as u128 * a as u128 % p as u128) as u64;
        e >>= 1;
    }
    r
}

impl FpPoly {
    pub fn new(p: u64, mut coeffs: Vec<u64>) -> Self {
        for c in coeffs.iter_mut() {
            *c %= p;
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        FpPoly { p, coeffs }
    }

    pub fn zero(p: u64) -> Self {
        FpPoly { p, coeffs: vec![] }
    }

    pub fn constant(p: u64, c: i64) -> Self {
        FpPoly::new(p, vec![c.rem_euclid(p as i64) as u64])
    }

    /// The monomial `c·t^k`.
    pub fn monomial(p: u64, c: u64, k: usize) -> Self {
        let mut v = vec![0; k + 1];
        v[k] = c;
        FpPoly::new(p, v)
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    /// Order of vanishing at `t = 0`; `None` for zero.
    pub fn ord(&self) -> Option<usize> {
        self.coeffs.iter().position(|&c| c != 0)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let v = (0..n).map(|i| (self.coeff(i) + o.coeff(i)) % self.p).collect();
        FpPoly::new(self.p, v)
    }

    pub fn neg(&self) -> Self {
        let v = self.coeffs.iter().map(|&c| (self.p - c) % self.p).collect();
        FpPoly::new(self.p, v)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: u64) -> Self {
        let p = self.p as u128;
        let v = self.coeffs.iter().map(|&a| (a as u128 * c as u128 % p) as u64).collect();
        FpPoly::new(self.p, v)
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return FpPoly::zero(self.p);
        }
        let p = self.p as u128;
        let mut v = vec![0u128; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                v[i + j] = (v[i + j] + a as u128 * b as u128) % p;
            }
        }
        FpPoly::new(self.p, v.into_iter().map(|c| c as u64).collect())
    }

    /// Multiply by `t^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut v = vec![0; k];
        v.extend_from_slice(&self.coeffs);
        FpPoly { p: self.p, coeffs: v }
    }

    /// Divide by `t^k`, assuming `t^k` divides.
    pub fn unshift(&self, k: usize) -> Self {
        FpPoly::new(self.p, self.coeffs.iter().skip(k).copied().collect())
    }

    /// Keep only the terms of degree `< k`.
    pub fn truncate(&self, k: usize) -> Self {
        FpPoly::new(self.p, self.coeffs.iter().take(k).copied().collect())
    }

    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let p = self.p;
        let dd = d.degree().unwrap();
        let inv_lead = inv_mod(d.lead(), p);
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (FpPoly::zero(p), self.clone());
        }
        let mut q = vec![0u64; r.len() - dd];
        for k in (dd..r.len()).rev() {
            let c = (r[k] as u128 * inv_lead as u128 % p as u128) as u64;
            if c == 0 {
                continue;
            }
            q[k - dd] = c;
            for (i, &dc) in d.coeffs.iter().enumerate() {
                let sub = (c as u128 * dc as u128 % p as u128) as u64;
                r[k - dd + i] = (r[k - dd + i] + p - sub) % p;
            }
        }
        (FpPoly::new(p, q), FpPoly::new(p, r))
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(inv_mod(self.lead(), self.p))
    }

    pub fn gcd(&self, o: &Self) -> Self {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `x^e mod m`, where `x` is the polynomial variable.
    fn pow_x_mod(e: u128, m: &Self) -> Self {
        let p = m.p;
        let mut result = FpPoly::constant(p, 1).div_rem(m).1;
        let mut base = FpPoly::new(p, vec![0, 1]).div_rem(m).1;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base).div_rem(m).1;
            }
            base = base.mul(&base).div_rem(m).1;
            e >>= 1;
        }
        result
    }

    /// Rabin's irreducibility test over `F_p`.
    pub fn is_irreducible(&self) -> bool {
        let Some(n) = self.degree() else { return false };
        if n == 0 {
            return false;
        }
        if n == 1 {
            return true;
        }
        let f = self.monic();
        let p = self.p as u128;
        let x = FpPoly::new(self.p, vec![0, 1]);
        let qn = p.checked_pow(n as u32).expect("degree too large for irreducibility test");
        if !FpPoly::pow_x_mod(qn, &f).sub(&x).div_rem(&f).1.is_zero() {
            return false;
        }
        for q in prime_factors(n as u64) {
            let k = n / q as usize;
            let h = FpPoly::pow_x_mod(p.pow(k as u32), &f).sub(&x);
            if !f.gcd(&h).is_one() {
                return false;
            }
        }
        true
    }
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = vec![];
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub(crate) fn is_prime(n: u64) -> bool {
    n >= 2 && prime_factors(n) == [n]
}

/// Element of `F_p(t)`: reduced fraction with monic denominator.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatFunc {
    num: FpPoly,
    den: FpPoly,
}

impl RatFunc {
    pub fn new(num: FpPoly, den: FpPoly) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        let p = num.modulus();
        if num.is_zero() {
            return RatFunc { num, den: FpPoly::constant(p, 1) };
        }
        let g = num.gcd(&den);
        let (mut n, _) = num.div_rem(&g);
        let (mut d, _) = den.div_rem(&g);
        let l = inv_mod(d.lead(), p);
        n = n.scale(l);
        d = d.scale(l);
        RatFunc { num: n, den: d }
    }

    pub fn from_poly(num: FpPoly) -> Self {
        let p = num.modulus();
        RatFunc { num, den: FpPoly::constant(p, 1) }
    }

    pub fn from_int(p: u64, c: i64) -> Self {
        RatFunc::from_poly(FpPoly::constant(p, c))
    }

    /// The variable `t`.
    pub fn t(p: u64) -> Self {
        RatFunc::from_poly(FpPoly::monomial(p, 1, 1))
    }

    pub fn modulus(&self) -> u64 {
        self.num.modulus()
    }

    pub fn num(&self) -> &FpPoly {
        &self.num
    }

    pub fn den(&self) -> &FpPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return RatFunc::new(self.num.add(&o.num), self.den.clone());
        }
        RatFunc::new(
            self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
    }

    pub fn neg(&self) -> Self {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        RatFunc::new(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero rational function");
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    /// `t`-adic valuation, `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        let a = self.num.ord()? as i64;
        let b = self.den.ord().expect("nonzero denominator") as i64;
        Some(a - b)
    }

    /// Residue of a `t`-adic unit: value at `t = 0`.
    pub fn residue(&self) -> u64 {
        let p = self.modulus();
        let n = self.num.coeff(0);
        let d = self.den.coeff(0);
        assert!(d != 0, "residue of a non-integral rational function");
        (n as u128 * inv_mod(d, p) as u128 % p as u128) as u64
    }

    /// Laurent polynomial `r` with `v(self - r) >= m`.
    pub fn truncate(&self, m: i64) -> Self {
        let p = self.modulus();
        let Some(v) = self.valuation() else { return self.clone() };
        if v >= m {
            return RatFunc::from_int(p, 0);
        }
        // self = t^v * u with u a unit power series; expand u to (m - v) terms.
        let n0 = self.num.ord().unwrap();
        let d0 = self.den.ord().unwrap();
        let num = self.num.unshift(n0);
        let den = self.den.unshift(d0);
        let terms = (m - v) as usize;
        let inv_d = inv_mod(den.coeff(0), p);
        let mut rem: Vec<u64> = (0..terms).map(|i| num.coeff(i)).collect();
        let mut series = vec![0u64; terms];
        for i in 0..terms {
            let c = (rem[i] as u128 * inv_d as u128 % p as u128) as u64;
            series[i] = c;
            if c == 0 {
                continue;
            }
            for (j, &dc) in den.coeffs().iter().enumerate() {
                if i + j >= terms {
                    break;
                }
                let s = (c as u128 * dc as u128 % p as u128) as u64;
                rem[i + j] = (rem[i + j] + p - s) % p;
            }
        }
        let poly = FpPoly::new(p, series);
        if v >= 0 {
            RatFunc::from_poly(poly.shift(v as usize))
        } else {
            RatFunc::new(poly, FpPoly::monomial(p, 1, (-v) as usize))
        }
    }
}

impl fmt::Display for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c) {
                (0, _) => write!(f, "{c}")?,
                (1, 1) => write!(f, "t")?,
                (1, _) => write!(f, "{c}*t")?,
                (_, 1) => write!(f, "t^{i}")?,
                _ => write!(f, "{c}*t^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}
